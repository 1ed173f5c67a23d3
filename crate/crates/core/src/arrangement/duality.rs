use super::{intersection_poset, Arrangement, FacePoset};
use crate::error::{Error, Result};
use crate::qlinalg::{dot, sign_of, Rational};
use num_traits::Zero;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConeTag {
    U,
    V,
    Fiber,
    HalfSpace,
    Custom,
}

/// A set of faces picked out by a geometric rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeSelection {
    pub face_ids: Vec<usize>,
    pub tag: ConeTag,
}

impl ConeSelection {
    pub fn contains(&self, i: usize) -> bool {
        self.face_ids.binary_search(&i).is_ok()
    }
}

/// One hyperplane per one-dimensional flat, normal to its spanning vector.
pub fn dual_arrangement(arr: &Arrangement) -> Result<Arrangement> {
    if arr.dim() == 0 {
        return Ok(Arrangement::new(0, vec![]).expect("empty arrangement"));
    }
    let lines: Vec<Vec<Rational>> =
        intersection_poset(arr).into_iter().filter(|f| f.dim == 1).map(|f| f.basis.row(0).to_vec()).collect();
    if lines.is_empty() {
        let min = intersection_poset(arr).into_iter().last().expect("ambient flat exists");
        return Err(Error::NoDual(format!(
            "no one-dimensional flats: the minimal flat has dimension {} and is cut out by hyperplanes {:?}",
            min.dim, min.zero_set
        )));
    }
    Arrangement::new(arr.dim(), lines)
}

/// `U = {B : f ≥ 0 on B}` and `V = {0} ∪ {B : f > 0 on closure(B) minus the lineality}`.
pub fn cones_for_functional(poset: &FacePoset, f: &[Rational]) -> (ConeSelection, ConeSelection) {
    let m = poset.minimal_face();
    let lineality = &poset.face(m).span_basis;
    let kills_lineality = (0..lineality.rows()).all(|r| dot(f, lineality.row(r)).is_zero());
    let value: Vec<i8> = poset.faces.iter().map(|face| sign_of(&dot(f, &face.interior_point))).collect();
    let mut u = Vec::new();
    let mut v = Vec::new();
    if kills_lineality {
        for b in 0..poset.len() {
            let below = poset.below(b);
            if below.iter().all(|&c| value[c] >= 0) {
                u.push(b);
            }
            if b == m || below.iter().all(|&c| c == m || value[c] > 0) {
                v.push(b);
            }
        }
    }
    (ConeSelection { face_ids: u, tag: ConeTag::U }, ConeSelection { face_ids: v, tag: ConeTag::V })
}

/// Big and small dual cones of a face of the dual arrangement.
pub fn dual_cones(primal: &FacePoset, dual: &FacePoset, a_dual: usize) -> Result<(ConeSelection, ConeSelection)> {
    if a_dual >= dual.len() {
        return Err(Error::InvalidFace(format!("dual face index {a_dual} out of range")));
    }
    if dual.ambient_dim() != primal.ambient_dim() {
        return Err(Error::InvalidFace("dual poset lives in a different dimension".into()));
    }
    Ok(cones_for_functional(primal, &dual.face(a_dual).interior_point))
}

/// `A∨₁ ≤ A∨₂` implies `U(A∨₁) ⊇ U(A∨₂)` and `V(A∨₁) ⊆ V(A∨₂)`.
pub fn monotone_cones_check(primal: &FacePoset, dual: &FacePoset) -> bool {
    let cones: Vec<_> = (0..dual.len()).map(|a| dual_cones(primal, dual, a).expect("valid index")).collect();
    dual.covers.iter().all(|&(a1, a2)| {
        let (u1, v1) = &cones[a1];
        let (u2, v2) = &cones[a2];
        u2.face_ids.iter().all(|&b| u1.contains(b)) && v1.face_ids.iter().all(|&b| v2.contains(b))
    })
}

/// No two distinct faces of the selection are antipodal.
pub fn strictly_convex(poset: &FacePoset, sel: &ConeSelection) -> bool {
    sel.face_ids.iter().all(|&a| {
        let neg: Vec<i8> = poset.face(a).signs.iter().map(|s| -s).collect();
        match poset.find(&neg) {
            Some(b) => b == a || !sel.contains(b),
            None => true,
        }
    })
}
