//! Hyperbolic sheaves: a vector space per face with generalization maps `γ`
//! and specialization maps `δ` on covering pairs.

pub mod corpus;
mod io;
mod validate;

pub use io::{read_sheaf, sheaf_from_json, sheaf_to_json, write_sheaf, SheafFile};
pub use validate::{validate, Check, Failure, ValidationReport};

use crate::arrangement::{enumerate_faces, Arrangement, FacePoset};
use crate::error::{Error, Result};
use crate::qlinalg::Matrix;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

#[derive(Clone, Debug)]
pub struct HyperbolicSheaf {
    poset: Arc<FacePoset>,
    dims: Vec<usize>,
    /// `γ` on each covering pair `(a, b)` of `poset.covers`, shaped `dims[b] × dims[a]`.
    gamma: Vec<Matrix>,
    /// `δ` on each covering pair `(a, b)`, mapping `E_b → E_a`, shaped `dims[a] × dims[b]`.
    delta: Vec<Matrix>,
    composites: OnceLock<Arc<Composites>>,
}

/// `γ` and `δ` on all comparable pairs, each along one fixed maximal chain.
#[derive(Debug)]
pub(crate) struct Composites {
    gamma: HashMap<(usize, usize), Matrix>,
    delta: HashMap<(usize, usize), Matrix>,
}

impl PartialEq for HyperbolicSheaf {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset && self.dims == other.dims && self.gamma == other.gamma && self.delta == other.delta
    }
}

impl HyperbolicSheaf {
    /// Builds a sheaf, checking matrix shapes only.
    pub fn new(poset: Arc<FacePoset>, dims: Vec<usize>, gamma: Vec<Matrix>, delta: Vec<Matrix>) -> Result<Self> {
        if dims.len() != poset.len() {
            return Err(Error::InvalidSheaf(format!("{} dims for {} faces", dims.len(), poset.len())));
        }
        if gamma.len() != poset.covers.len() || delta.len() != poset.covers.len() {
            return Err(Error::InvalidSheaf(format!("expected {} covering-pair matrices", poset.covers.len())));
        }
        for (i, &(a, b)) in poset.covers.iter().enumerate() {
            let name = || format!("{}->{} ({} -> {})", a, b, poset.sign_string(a), poset.sign_string(b));
            if gamma[i].shape() != (dims[b], dims[a]) {
                return Err(Error::InvalidSheaf(format!(
                    "gamma on covering pair {} has shape {:?}, expected {:?}",
                    name(),
                    gamma[i].shape(),
                    (dims[b], dims[a])
                )));
            }
            if delta[i].shape() != (dims[a], dims[b]) {
                return Err(Error::InvalidSheaf(format!(
                    "delta on covering pair {} has shape {:?}, expected {:?}",
                    name(),
                    delta[i].shape(),
                    (dims[a], dims[b])
                )));
            }
        }
        Ok(HyperbolicSheaf { poset, dims, gamma, delta, composites: OnceLock::new() })
    }

    pub fn poset(&self) -> &Arc<FacePoset> {
        &self.poset
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.poset.arrangement
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, a: usize) -> usize {
        self.dims[a]
    }

    /// `γ_{ab}` for a covering pair `a <₁ b`.
    pub fn gamma_cover(&self, a: usize, b: usize) -> &Matrix {
        &self.gamma[self.poset.cover_index(a, b).expect("covering pair")]
    }

    /// `δ_{ba}` for a covering pair `a <₁ b`.
    pub fn delta_cover(&self, a: usize, b: usize) -> &Matrix {
        &self.delta[self.poset.cover_index(a, b).expect("covering pair")]
    }

    pub fn gamma_matrices(&self) -> &[Matrix] {
        &self.gamma
    }

    pub fn delta_matrices(&self) -> &[Matrix] {
        &self.delta
    }

    pub(crate) fn composites(&self) -> Arc<Composites> {
        self.composites.get_or_init(|| Arc::new(self.build_composites())).clone()
    }

    fn build_composites(&self) -> Composites {
        let p = &self.poset;
        let m = p.len();
        let mut gamma = HashMap::new();
        let mut delta = HashMap::new();
        let mut pairs: Vec<(usize, usize)> =
            (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).filter(|&(a, b)| p.leq(a, b)).collect();
        pairs.sort_by_key(|&(a, b)| p.dim(b) - p.dim(a));
        for (a, b) in pairs {
            if a == b {
                gamma.insert((a, a), Matrix::identity(self.dims[a]));
                delta.insert((a, a), Matrix::identity(self.dims[a]));
                continue;
            }
            let c = *p.lower_covers(b).iter().find(|&&c| p.leq(a, c)).expect("chain exists");
            let g = self.gamma_cover(c, b) * &gamma[&(a, c)];
            let d = &delta[&(a, c)] * self.delta_cover(c, b);
            gamma.insert((a, b), g);
            delta.insert((a, b), d);
        }
        Composites { gamma, delta }
    }

    /// `γ_{ab}: E_a → E_b` for `a ≤ b`.
    pub fn gamma(&self, a: usize, b: usize) -> Matrix {
        self.composites().gamma.get(&(a, b)).cloned().expect("a ≤ b")
    }

    /// `δ_{ba}: E_b → E_a` for `a ≤ b`.
    pub fn delta(&self, b: usize, a: usize) -> Matrix {
        self.composites().delta.get(&(a, b)).cloned().expect("a ≤ b")
    }

    /// Flopping operator `φ_{ab} = γ_{cb} δ_{ac}` through the meet `c`.
    pub fn flop(&self, a: usize, b: usize) -> Matrix {
        let c = self.poset.meet(a, b);
        &self.gamma(c, b) * &self.delta(a, c)
    }

    /// Dual sheaf: transposes swap the roles of `γ` and `δ`.
    pub fn verdier_dual(&self) -> HyperbolicSheaf {
        let gamma = self.delta.iter().map(Matrix::transpose).collect();
        let delta = self.gamma.iter().map(Matrix::transpose).collect();
        HyperbolicSheaf::new(self.poset.clone(), self.dims.clone(), gamma, delta).expect("transposes have dual shapes")
    }

    /// Same data on an equal poset held through another pointer.
    pub fn on_poset(&self, poset: Arc<FacePoset>) -> Result<HyperbolicSheaf> {
        if *poset != *self.poset {
            return Err(Error::PosetMismatch);
        }
        HyperbolicSheaf::new(poset, self.dims.clone(), self.gamma.clone(), self.delta.clone())
    }

    /// True when all stalks vanish.
    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }
}

/// All stalks `k`, all maps the identity.
pub fn constant_sheaf(poset: Arc<FacePoset>) -> HyperbolicSheaf {
    let n = poset.covers.len();
    let dims = vec![1; poset.len()];
    HyperbolicSheaf::new(poset, dims, vec![Matrix::identity(1); n], vec![Matrix::identity(1); n]).expect("shapes")
}

/// `k` on the minimal face, zero elsewhere.
pub fn skyscraper_sheaf(poset: Arc<FacePoset>) -> HyperbolicSheaf {
    let mut dims = vec![0; poset.len()];
    dims[poset.minimal_face()] = 1;
    let gamma = poset.covers.iter().map(|&(a, b)| Matrix::zeros(dims[b], dims[a])).collect();
    let delta = poset.covers.iter().map(|&(a, b)| Matrix::zeros(dims[a], dims[b])).collect();
    HyperbolicSheaf::new(poset, dims, gamma, delta).expect("shapes")
}

/// The sheaf with every stalk zero.
pub fn zero_sheaf(poset: Arc<FacePoset>) -> HyperbolicSheaf {
    let n = poset.covers.len();
    let dims = vec![0; poset.len()];
    HyperbolicSheaf::new(poset, dims, vec![Matrix::zeros(0, 0); n], vec![Matrix::zeros(0, 0); n]).expect("shapes")
}

/// Blockwise sum of two sheaves on the same poset.
pub fn direct_sum(q1: &HyperbolicSheaf, q2: &HyperbolicSheaf) -> Result<HyperbolicSheaf> {
    if q1.poset != q2.poset && *q1.poset != *q2.poset {
        return Err(Error::PosetMismatch);
    }
    let dims = q1.dims.iter().zip(&q2.dims).map(|(a, b)| a + b).collect();
    let gamma = q1.gamma.iter().zip(&q2.gamma).map(|(a, b)| a.direct_sum(b)).collect();
    let delta = q1.delta.iter().zip(&q2.delta).map(|(a, b)| a.direct_sum(b)).collect();
    HyperbolicSheaf::new(q1.poset.clone(), dims, gamma, delta)
}

/// External tensor product on the direct-sum arrangement.
pub fn external_product(q1: &HyperbolicSheaf, q2: &HyperbolicSheaf) -> HyperbolicSheaf {
    let (p1, p2) = (&q1.poset, &q2.poset);
    let m1 = p1.arrangement.len();
    let poset = Arc::new(enumerate_faces(&p1.arrangement.direct_sum(&p2.arrangement)));
    let split = |f: usize| {
        let s = &poset.face(f).signs;
        (p1.find(&s[..m1]).expect("first factor face"), p2.find(&s[m1..]).expect("second factor face"))
    };
    let parts: Vec<(usize, usize)> = (0..poset.len()).map(split).collect();
    let dims: Vec<usize> = parts.iter().map(|&(a, b)| q1.dims[a] * q2.dims[b]).collect();
    let mut gamma = Vec::new();
    let mut delta = Vec::new();
    for &(x, y) in &poset.covers {
        let ((a1, a2), (b1, b2)) = (parts[x], parts[y]);
        if a2 == b2 {
            let id = Matrix::identity(q2.dims[a2]);
            gamma.push(q1.gamma_cover(a1, b1).kron(&id));
            delta.push(q1.delta_cover(a1, b1).kron(&id));
        } else {
            let id = Matrix::identity(q1.dims[a1]);
            gamma.push(id.kron(q2.gamma_cover(a2, b2)));
            delta.push(id.kron(q2.delta_cover(a2, b2)));
        }
    }
    HyperbolicSheaf::new(poset, dims, gamma, delta).expect("kronecker shapes")
}
