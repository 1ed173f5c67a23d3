use crate::arrangement::{ConeSelection, FacePoset};
use crate::error::{Error, Result};
use crate::hypsheaf::HyperbolicSheaf;
use crate::qlinalg::{complex_check, ChainComplex, Matrix, Summand, Term};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

static BUILT: AtomicUsize = AtomicUsize::new(0);
static FAILED: AtomicUsize = AtomicUsize::new(0);

/// Number of complexes assembled so far and how many failed `d² = 0`.
pub fn complex_statistics() -> (usize, usize) {
    (BUILT.load(Ordering::Relaxed), FAILED.load(Ordering::Relaxed))
}

/// Records a constructed complex; errors if it is not a complex.
pub(crate) fn certify(c: &ChainComplex) -> Result<()> {
    BUILT.fetch_add(1, Ordering::Relaxed);
    if complex_check(c) {
        Ok(())
    } else {
        FAILED.fetch_add(1, Ordering::Relaxed);
        let d = (1..c.differentials.len())
            .find(|&i| !(&c.differentials[i] * &c.differentials[i - 1]).is_zero())
            .unwrap_or(0);
        Err(Error::NotComplex(c.lowest_degree + d as i32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    Gamma,
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Grading {
    Dim,
    NegDim,
    Codim,
    /// `dim B − base` for γ, its negative for δ.
    Relative(i32),
}

/// Where a face's stalk sits inside a complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub degree: i32,
    pub offset: usize,
    pub dim: usize,
}

/// `⊕ E_B ⊗ or_B` over selected faces with `γ⊗ε` or `δ⊗ε` differentials.
#[derive(Clone, Debug, Serialize)]
pub struct SelectionComplex {
    pub selection: ConeSelection,
    pub grading: Grading,
    pub variant: Variant,
    pub blocks: BTreeMap<usize, Block>,
    pub complex: ChainComplex,
}

impl SelectionComplex {
    /// Coordinates of the degree-0 term as a list of faces.
    pub fn faces_in_degree(&self, degree: i32) -> Vec<usize> {
        self.blocks.iter().filter(|(_, b)| b.degree == degree).map(|(&f, _)| f).collect()
    }
}

/// Assembles the complex over `selection`. `twist[B]` multiplies every block
/// touching `B`; covering pairs inside the selection must change degree by one
/// in the direction of the variant.
pub fn build_selection_complex(
    q: &HyperbolicSheaf,
    selection: ConeSelection,
    grading: Grading,
    variant: Variant,
    twist: Option<&[i8]>,
) -> Result<SelectionComplex> {
    let p = q.poset();
    let n = p.ambient_dim() as i32;
    let degree = |b: usize| -> i32 {
        let d = p.dim(b) as i32;
        match (grading, variant) {
            (Grading::Dim, _) => d,
            (Grading::NegDim, _) => -d,
            (Grading::Codim, _) => n - d,
            (Grading::Relative(base), Variant::Gamma) => d - base,
            (Grading::Relative(base), Variant::Delta) => base - d,
        }
    };
    let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for &b in &selection.face_ids {
        by_degree.entry(degree(b)).or_default().push(b);
    }
    let lo = by_degree.keys().next().copied().unwrap_or(0);
    let hi = by_degree.keys().next_back().copied().unwrap_or(0);
    let mut blocks = BTreeMap::new();
    let mut terms = Vec::new();
    for d in lo..=hi {
        let mut offset = 0;
        let mut summands = Vec::new();
        for &b in by_degree.get(&d).map(Vec::as_slice).unwrap_or(&[]) {
            blocks.insert(b, Block { degree: d, offset, dim: q.dim(b) });
            summands.push(Summand { label: p.sign_string(b), dim: q.dim(b) });
            offset += q.dim(b);
        }
        terms.push(Term { dim: offset, summands: Some(summands) });
    }
    let mut diffs: Vec<Matrix> = (lo..hi)
        .map(|d| {
            let i = (d - lo) as usize;
            Matrix::zeros(terms[i + 1].dim, terms[i].dim)
        })
        .collect();
    let tw = |b: usize| twist.map_or(1, |t| t[b]);
    for (ci, &(b, c)) in p.covers.iter().enumerate() {
        let (Some(bb), Some(bc)) = (blocks.get(&b), blocks.get(&c)) else { continue };
        let sign = p.incidence[ci] * tw(b) * tw(c);
        match variant {
            Variant::Gamma => {
                if bc.degree != bb.degree + 1 {
                    return Err(Error::Shape(format!("grading breaks at covering pair {b} -> {c}")));
                }
                let m = q.gamma_matrices()[ci].signed(sign);
                diffs[(bb.degree - lo) as usize].set_block(bc.offset, bb.offset, &m);
            }
            Variant::Delta => {
                if bb.degree != bc.degree + 1 {
                    return Err(Error::Shape(format!("grading breaks at covering pair {b} -> {c}")));
                }
                let m = q.delta_matrices()[ci].signed(sign);
                diffs[(bc.degree - lo) as usize].set_block(bb.offset, bc.offset, &m);
            }
        }
    }
    let complex = ChainComplex::new(lo, terms, diffs)?;
    certify(&complex)?;
    Ok(SelectionComplex { selection, grading, variant, blocks, complex })
}

/// Orientation sign of `V/B`: determinant of the span basis of `B` stacked
/// on the coordinate vectors completing it.
pub fn quotient_orientation(poset: &FacePoset, b: usize) -> i8 {
    let face = poset.face(b);
    let n = poset.ambient_dim();
    let mut rows = face.span_basis.to_rows();
    for j in (0..n).filter(|j| !face.pivots.contains(j)) {
        let mut e = vec![crate::qlinalg::q(0); n];
        e[j] = crate::qlinalg::q(1);
        rows.push(e);
    }
    if n == 0 {
        return 1;
    }
    crate::qlinalg::sign_of(&Matrix::from_rows(rows).det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{corpus, enumerate_faces, ConeTag};
    use crate::hypsheaf::constant_sheaf;
    use crate::qlinalg::cohomology;
    use std::sync::Arc;

    #[test]
    fn constant_line_compact() {
        let q = constant_sheaf(Arc::new(enumerate_faces(&corpus::a1())));
        let all = ConeSelection { face_ids: vec![0, 1, 2], tag: ConeTag::Custom };
        let c = build_selection_complex(&q, all, Grading::Dim, Variant::Gamma, None).unwrap();
        let r = cohomology(&c.complex, false).unwrap();
        assert_eq!((r.rank(0), r.rank(1)), (0, 1));
        assert_eq!(c.faces_in_degree(1), vec![1, 2]);
    }

    #[test]
    fn bad_grading_rejected() {
        let q = constant_sheaf(Arc::new(enumerate_faces(&corpus::a1())));
        let all = ConeSelection { face_ids: vec![0, 1, 2], tag: ConeTag::Custom };
        assert!(build_selection_complex(&q, all, Grading::Dim, Variant::Delta, None).is_err());
    }

    #[test]
    fn orientations_are_signs() {
        let p = enumerate_faces(&corpus::a3());
        for b in 0..p.len() {
            assert!(quotient_orientation(&p, b).abs() == 1);
        }
        assert_eq!(quotient_orientation(&p, 0), 1);
    }
}
