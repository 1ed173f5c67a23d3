use super::{cokernel_projection, kernel_basis, rank, solve, Matrix};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// A labeled coordinate block of a term, usually one face's stalk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub label: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summands: Option<Vec<Summand>>,
}

/// Cochain complex: `differentials[i]` maps degree `lowest_degree + i` to the next.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainComplex {
    pub lowest_degree: i32,
    pub terms: Vec<Term>,
    #[serde(serialize_with = "serialize_mats")]
    pub differentials: Vec<Matrix>,
}

fn serialize_mats<S: serde::Serializer>(ms: &[Matrix], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<Vec<String>>> =
        ms.iter().map(|m| m.to_rows().iter().map(|r| super::serde_q::vec_to_strings(r)).collect()).collect();
    rows.serialize(s)
}

impl ChainComplex {
    /// Builds a complex and checks differential shapes (not d² = 0).
    pub fn new(lowest_degree: i32, terms: Vec<Term>, differentials: Vec<Matrix>) -> Result<Self> {
        let expected = terms.len().saturating_sub(1);
        if differentials.len() != expected {
            return Err(Error::Shape(format!(
                "{} terms need {} differentials, got {}",
                terms.len(),
                expected,
                differentials.len()
            )));
        }
        for (i, d) in differentials.iter().enumerate() {
            if d.shape() != (terms[i + 1].dim, terms[i].dim) {
                return Err(Error::Shape(format!(
                    "differential at degree {} is {:?}, expected {:?}",
                    lowest_degree + i as i32,
                    d.shape(),
                    (terms[i + 1].dim, terms[i].dim)
                )));
            }
        }
        Ok(ChainComplex { lowest_degree, terms, differentials })
    }

    /// Unlabeled complex from term dimensions.
    pub fn from_dims(lowest_degree: i32, dims: &[usize], differentials: Vec<Matrix>) -> Result<Self> {
        let terms = dims.iter().map(|&dim| Term { dim, summands: None }).collect();
        Self::new(lowest_degree, terms, differentials)
    }

    pub fn highest_degree(&self) -> i32 {
        self.lowest_degree + self.terms.len() as i32 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> {
        self.lowest_degree..=self.highest_degree()
    }

    pub fn term_dim(&self, degree: i32) -> usize {
        let i = degree - self.lowest_degree;
        if i < 0 || i as usize >= self.terms.len() {
            0
        } else {
            self.terms[i as usize].dim
        }
    }

    /// Differential leaving `degree`, zero outside the stored range.
    pub fn differential(&self, degree: i32) -> Matrix {
        let i = degree - self.lowest_degree;
        if i >= 0 && (i as usize) < self.differentials.len() {
            self.differentials[i as usize].clone()
        } else {
            Matrix::zeros(self.term_dim(degree + 1), self.term_dim(degree))
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|d| sign(d) * self.term_dim(d) as i64).sum()
    }
}

fn sign(d: i32) -> i64 {
    if d.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// True iff every consecutive composite of differentials vanishes.
pub fn complex_check(c: &ChainComplex) -> bool {
    c.differentials.windows(2).all(|w| (&w[1] * &w[0]).is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub ranks: BTreeMap<i32, usize>,
    #[serde(skip)]
    pub h0_kernel_basis: Option<Matrix>,
    #[serde(skip)]
    pub h0_cokernel_projection: Option<Matrix>,
}

impl CohomologyReport {
    pub fn rank(&self, degree: i32) -> usize {
        self.ranks.get(&degree).copied().unwrap_or(0)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    /// Degrees with nonzero cohomology.
    pub fn support(&self) -> Vec<i32> {
        self.ranks.iter().filter(|(_, &r)| r > 0).map(|(&d, _)| d).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().map(|(&d, &r)| sign(d) * r as i64).sum()
    }

    /// True iff all cohomology sits in `degree`.
    pub fn concentrated_in(&self, degree: i32) -> bool {
        self.ranks.iter().all(|(&d, &r)| d == degree || r == 0)
    }
}

/// Cohomology ranks; with `want_h0` also the degree-0 kernel basis of the
/// outgoing differential and the cokernel projection of the incoming one.
pub fn cohomology(c: &ChainComplex, want_h0: bool) -> Result<CohomologyReport> {
    if let Some(i) = (1..c.differentials.len()).find(|&i| !(&c.differentials[i] * &c.differentials[i - 1]).is_zero()) {
        return Err(Error::NotComplex(c.lowest_degree + i as i32));
    }
    let ranks_d: Vec<usize> = c.differentials.iter().map(rank).collect();
    let mut ranks = BTreeMap::new();
    for (i, t) in c.terms.iter().enumerate() {
        let out = ranks_d.get(i).copied().unwrap_or(0);
        let inc = if i > 0 { ranks_d[i - 1] } else { 0 };
        ranks.insert(c.lowest_degree + i as i32, t.dim - out - inc);
    }
    let (k, p) = if want_h0 {
        (Some(kernel_basis(&c.differential(0))), Some(cokernel_projection(&c.differential(-1))))
    } else {
        (None, None)
    };
    let report = CohomologyReport { ranks, h0_kernel_basis: k, h0_cokernel_projection: p };
    debug_assert_eq!(report.euler_characteristic(), c.euler_characteristic());
    Ok(report)
}

/// Degree-indexed family of matrices; absent degrees are zero.
#[derive(Clone, Debug, Default)]
pub struct ChainMap {
    pub components: BTreeMap<i32, Matrix>,
}

impl ChainMap {
    pub fn from_list(lowest_degree: i32, maps: Vec<Matrix>) -> Self {
        ChainMap { components: maps.into_iter().enumerate().map(|(i, m)| (lowest_degree + i as i32, m)).collect() }
    }

    pub fn component(&self, degree: i32, src: &ChainComplex, dst: &ChainComplex) -> Matrix {
        self.components
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(dst.term_dim(degree), src.term_dim(degree)))
    }

    /// Checks shapes and commutation with the differentials.
    pub fn verify(&self, src: &ChainComplex, dst: &ChainComplex) -> Result<()> {
        for (&d, m) in &self.components {
            if m.shape() != (dst.term_dim(d), src.term_dim(d)) {
                return Err(Error::Shape(format!("chain map component at degree {d} is {:?}", m.shape())));
            }
        }
        let lo = src.lowest_degree.min(dst.lowest_degree) - 1;
        let hi = src.highest_degree().max(dst.highest_degree());
        for d in lo..=hi {
            let left = &dst.differential(d) * &self.component(d, src, dst);
            let right = &self.component(d + 1, src, dst) * &src.differential(d);
            if left != right {
                return Err(Error::NotChainMap(d));
            }
        }
        Ok(())
    }
}

/// How degree-0 cohomology is coordinatized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum H0Model {
    /// Kernel of the outgoing differential modulo the incoming image.
    Kernel,
    /// Cokernel of the incoming differential; needs a zero outgoing differential.
    Cokernel,
}

/// Coordinates of H⁰ in the kernel model: `(K, P, R)` with columns of `K`
/// spanning cycles, `P` the quotient by boundaries in cycle coordinates and
/// `R` a right inverse of `P`.
fn kernel_model(c: &ChainComplex) -> (Matrix, Matrix, Matrix) {
    let k = kernel_basis(&c.differential(0));
    let incoming = c.differential(-1);
    let x = solve(&k, &incoming).expect("boundaries lie in cycles");
    let p = cokernel_projection(&x);
    let r = right_inverse(&p);
    (k, p, r)
}

fn right_inverse(p: &Matrix) -> Matrix {
    solve(p, &Matrix::identity(p.rows())).expect("full row rank")
}

/// Matrix of the map on degree-0 cohomology induced by a verified chain map.
pub fn induced_h0_map(src: &ChainComplex, dst: &ChainComplex, map: &ChainMap, model: H0Model) -> Result<Matrix> {
    map.verify(src, dst)?;
    let f0 = map.component(0, src, dst);
    match model {
        H0Model::Kernel => {
            let (ks, _, rs) = kernel_model(src);
            let (kd, pd, _) = kernel_model(dst);
            let image = &(&f0 * &ks) * &rs;
            let coords = solve(&kd, &image).ok_or(Error::NotChainMap(0))?;
            Ok(&pd * &coords)
        }
        H0Model::Cokernel => {
            if !src.differential(0).is_zero() || !dst.differential(0).is_zero() {
                return Err(Error::Shape("cokernel model needs degree 0 to be the top nonzero differential".into()));
            }
            let ps = cokernel_projection(&src.differential(-1));
            let pd = cokernel_projection(&dst.differential(-1));
            Ok(&(&pd * &f0) * &right_inverse(&ps))
        }
    }
}

/// For each positive degree p of the γ-complex, whether `Δ = δγ + γδ` is
/// invertible on its term; the δ-complex holds the same term at degree −p.
pub fn laplacian_report(gamma_cx: &ChainComplex, delta_cx: &ChainComplex) -> Result<BTreeMap<i32, bool>> {
    let mut out = BTreeMap::new();
    for p in gamma_cx.degrees().filter(|&p| p > 0) {
        let n = gamma_cx.term_dim(p);
        if delta_cx.term_dim(-p) != n
            || delta_cx.term_dim(-p + 1) != gamma_cx.term_dim(p - 1)
            || delta_cx.term_dim(-p - 1) != gamma_cx.term_dim(p + 1)
        {
            return Err(Error::Shape(format!("γ and δ complexes disagree around degree {p}")));
        }
        let lap = &(&gamma_cx.differential(p - 1) * &delta_cx.differential(-p))
            + &(&delta_cx.differential(-p - 1) * &gamma_cx.differential(p));
        out.insert(p, rank(&lap) == n);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(rows)
    }

    #[test]
    fn complex_check_examples() {
        assert!(complex_check(&ChainComplex::from_dims(0, &[3], vec![]).unwrap()));
        let bad = ChainComplex::from_dims(0, &[1, 1, 1], vec![m(&[&[1]]), m(&[&[1]])]).unwrap();
        assert!(!complex_check(&bad));
        assert!(matches!(cohomology(&bad, false), Err(Error::NotComplex(1))));
    }

    #[test]
    fn cohomology_examples() {
        let c = ChainComplex::from_dims(0, &[1, 1], vec![m(&[&[1]])]).unwrap();
        assert_eq!(cohomology(&c, false).unwrap().total_rank(), 0);
        let z = ChainComplex::from_dims(-1, &[2, 3], vec![Matrix::zeros(3, 2)]).unwrap();
        let r = cohomology(&z, false).unwrap();
        assert_eq!((r.rank(-1), r.rank(0)), (2, 3));
        let line = ChainComplex::from_dims(0, &[1, 2], vec![m(&[&[1], &[-1]])]).unwrap();
        let r = cohomology(&line, false).unwrap();
        assert_eq!((r.rank(0), r.rank(1)), (0, 1));
        assert_eq!(r.euler_characteristic(), line.euler_characteristic());
    }

    #[test]
    fn shape_errors() {
        assert!(ChainComplex::from_dims(0, &[1, 2], vec![Matrix::zeros(1, 2)]).is_err());
        assert!(ChainComplex::from_dims(0, &[1, 2], vec![]).is_err());
    }

    #[test]
    fn induced_maps() {
        let c = ChainComplex::from_dims(0, &[2, 1], vec![m(&[&[1, 1]])]).unwrap();
        let id = ChainMap::from_list(0, vec![Matrix::identity(2), Matrix::identity(1)]);
        assert!(induced_h0_map(&c, &c, &id, H0Model::Kernel).unwrap().is_identity());
        let zero = ChainMap::default();
        assert!(induced_h0_map(&c, &c, &zero, H0Model::Kernel).unwrap().is_zero());
        let broken = ChainMap::from_list(0, vec![m(&[&[1, 0], &[0, 0]]), Matrix::identity(1)]);
        assert!(matches!(induced_h0_map(&c, &c, &broken, H0Model::Kernel), Err(Error::NotChainMap(0))));
        // Cokernel model on a complex ending at degree 0.
        let d = ChainComplex::from_dims(-1, &[1, 2], vec![m(&[&[1], &[1]])]).unwrap();
        let id = ChainMap::from_list(-1, vec![Matrix::identity(1), Matrix::identity(2)]);
        assert!(induced_h0_map(&d, &d, &id, H0Model::Cokernel).unwrap().is_identity());
    }

    #[test]
    fn composite_induces_product() {
        // Q² -> Q with (1,1); endomorphisms preserving the kernel.
        let c = ChainComplex::from_dims(0, &[2, 1], vec![m(&[&[1, 1]])]).unwrap();
        let f = ChainMap::from_list(0, vec![m(&[&[2, 1], &[1, 2]]), m(&[&[3]])]);
        let g = ChainMap::from_list(0, vec![m(&[&[0, 1], &[1, 0]]), m(&[&[1]])]);
        let gf = ChainMap::from_list(0, vec![&m(&[&[0, 1], &[1, 0]]) * &m(&[&[2, 1], &[1, 2]]), m(&[&[3]])]);
        let hf = induced_h0_map(&c, &c, &f, H0Model::Kernel).unwrap();
        let hg = induced_h0_map(&c, &c, &g, H0Model::Kernel).unwrap();
        let hgf = induced_h0_map(&c, &c, &gf, H0Model::Kernel).unwrap();
        assert_eq!(&hg * &hf, hgf);
        assert_eq!(hf, Matrix::from_rows(vec![vec![q(1)]]));
    }

    #[test]
    fn kernel_model_with_boundaries() {
        // Q --(1,0)--> Q² --[0 1]--> Q: H⁰ is 0-dimensional at the middle degree.
        let c = ChainComplex::from_dims(-1, &[1, 2, 1], vec![m(&[&[1], &[0]]), m(&[&[0, 1]])]).unwrap();
        let id = ChainMap::from_list(-1, vec![Matrix::identity(1), Matrix::identity(2), Matrix::identity(1)]);
        assert_eq!(induced_h0_map(&c, &c, &id, H0Model::Kernel).unwrap().shape(), (0, 0));
    }

    #[test]
    fn laplacian_one_by_one() {
        let g = ChainComplex::from_dims(0, &[1, 1], vec![m(&[&[1]])]).unwrap();
        let d = ChainComplex::from_dims(-1, &[1, 1], vec![m(&[&[1]])]).unwrap();
        assert_eq!(laplacian_report(&g, &d).unwrap().get(&1), Some(&true));
        let g0 = ChainComplex::from_dims(0, &[1, 0], vec![Matrix::zeros(0, 1)]).unwrap();
        let d0 = ChainComplex::from_dims(-1, &[0, 1], vec![Matrix::zeros(1, 0)]).unwrap();
        assert_eq!(laplacian_report(&g0, &d0).unwrap().get(&1), Some(&true));
    }
}
