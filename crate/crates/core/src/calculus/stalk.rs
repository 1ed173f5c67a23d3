use super::selection::SelectionComplex;
use crate::error::{Error, Result};
use crate::qlinalg::{cohomology, inverse, laplacian_report, CohomologyReport, Matrix};
use serde::Serialize;
use std::collections::BTreeMap;

/// Degree-0 cohomology of a γ-complex (a kernel) identified with that of
/// the matching δ-complex (a cokernel). The identification evaluates a
/// kernel vector at one degree-0 face and reads it in the cokernel; the
/// full pairing `ker ↪ T ↠ coker` would count each vertex of the fiber.
#[derive(Clone, Debug)]
pub struct H0Stalk {
    pub gamma: SelectionComplex,
    pub delta: SelectionComplex,
    pub gamma_report: CohomologyReport,
    pub delta_report: CohomologyReport,
    /// Columns span the kernel inside the degree-0 term `T`.
    pub kernel: Matrix,
    /// Projection of `T` onto the cokernel.
    pub projection: Matrix,
    /// Kernel coordinates to cokernel coordinates.
    pub transport: Matrix,
    pub transport_inverse: Matrix,
    /// Whether every degree-0 face yields the same transport.
    pub anchor_independent: bool,
    pub laplacian: BTreeMap<i32, bool>,
}

/// Summary suitable for reports.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StalkSummary {
    pub dim: usize,
    pub gamma_ranks: BTreeMap<i32, usize>,
    pub delta_ranks: BTreeMap<i32, usize>,
    pub laplacian_invertible: BTreeMap<i32, bool>,
    pub anchor_independent: bool,
}

impl H0Stalk {
    pub fn dim(&self) -> usize {
        self.kernel.cols()
    }

    pub fn summary(&self) -> StalkSummary {
        StalkSummary {
            dim: self.dim(),
            gamma_ranks: self.gamma_report.ranks.clone(),
            delta_ranks: self.delta_report.ranks.clone(),
            laplacian_invertible: self.laplacian.clone(),
            anchor_independent: self.anchor_independent,
        }
    }

    /// Converts a vector of `T`, known to represent a cokernel class, into kernel coordinates.
    pub fn from_term(&self, m: &Matrix) -> Matrix {
        &self.transport_inverse * &(&self.projection * m)
    }
}

/// `ker → E_a → coker`: a kernel vector keeps only its component at the
/// degree-0 face `a`, which is then read in the cokernel.
fn anchored_transport(gamma: &SelectionComplex, a: usize, kernel: &Matrix, projection: &Matrix) -> Matrix {
    let b = gamma.blocks[&a];
    let restricted = kernel.block(b.offset, 0, b.dim, kernel.cols());
    &projection.block(0, b.offset, projection.rows(), b.dim) * &restricted
}

/// Certifies concentration in degree 0 and builds the transport.
pub fn h0_stalk(gamma: SelectionComplex, delta: SelectionComplex, what: &str) -> Result<H0Stalk> {
    let gamma_report = cohomology(&gamma.complex, true)?;
    let delta_report = cohomology(&delta.complex, true)?;
    if let Some(d) = gamma_report.support().into_iter().find(|&d| d != 0) {
        return Err(Error::Acyclicity(format!("{what}: gamma complex has cohomology in degree {d}")));
    }
    if let Some(d) = delta_report.support().into_iter().find(|&d| d != 0) {
        return Err(Error::Acyclicity(format!("{what}: delta complex has cohomology in degree {d}")));
    }
    let kernel = gamma_report.h0_kernel_basis.clone().expect("requested");
    let projection = delta_report.h0_cokernel_projection.clone().expect("requested");
    if kernel.cols() != projection.rows() {
        return Err(Error::Acyclicity(format!(
            "{what}: kernel has dimension {} but cokernel has dimension {}",
            kernel.cols(),
            projection.rows()
        )));
    }
    let anchors: Vec<Matrix> =
        gamma.faces_in_degree(0).iter().map(|&a| anchored_transport(&gamma, a, &kernel, &projection)).collect();
    let transport = match anchors.first() {
        Some(t) => t.clone(),
        None => &projection * &kernel,
    };
    let anchor_independent = anchors.iter().all(|t| *t == transport);
    let transport_inverse = inverse(&transport)
        .ok_or_else(|| Error::Transport(format!("{what}: kernel to cokernel composite is singular")))?;
    let laplacian = laplacian_report(&gamma.complex, &delta.complex)?;
    Ok(H0Stalk {
        gamma,
        delta,
        gamma_report,
        delta_report,
        kernel,
        projection,
        transport,
        transport_inverse,
        anchor_independent,
        laplacian,
    })
}
