use super::selection::{build_selection_complex, Grading, Variant};
use super::stalk::{h0_stalk, H0Stalk};
use crate::arrangement::{
    dual_arrangement, enumerate_faces, flat_of_face, intersection_poset, is_polarization, ConeSelection, ConeTag,
    FacePoset, Flat,
};
use crate::error::{Error, Result};
use crate::hypsheaf::HyperbolicSheaf;
use crate::qlinalg::{dot, feasible_point, Constraint, Rational};
use num_traits::Zero;

/// Vanishing cycles of a sheaf along `f` at a face.
#[derive(Clone, Debug)]
pub struct VanishingCycles {
    pub dim: usize,
    pub stalk: H0Stalk,
}

impl VanishingCycles {
    pub fn gamma_acyclic(&self) -> bool {
        self.stalk.gamma_report.concentrated_in(0)
    }

    pub fn delta_acyclic(&self) -> bool {
        self.stalk.delta_report.concentrated_in(0)
    }
}

/// True iff `f ≥ 0` on the whole face.
pub fn nonnegative_on(poset: &FacePoset, f: &[Rational], b: usize) -> bool {
    let face = poset.face(b);
    let mut cons: Vec<Constraint> = face
        .signs
        .iter()
        .enumerate()
        .map(|(i, &s)| Constraint::with_sign(poset.arrangement.hyperplane(i).to_vec(), s))
        .collect();
    cons.push(Constraint::with_sign(f.to_vec(), -1));
    feasible_point(poset.ambient_dim(), &cons).is_none()
}

/// `{A} ∪ {B > A : f|_B ≥ 0}`.
pub fn half_space_selection(poset: &FacePoset, f: &[Rational], a: usize) -> ConeSelection {
    let face_ids = (0..poset.len()).filter(|&b| b == a || (poset.leq(a, b) && nonnegative_on(poset, f, b))).collect();
    ConeSelection { face_ids, tag: ConeTag::HalfSpace }
}

/// Vanishing cycles via the γ half-space complex and its δ counterpart.
pub fn vanishing_cycles(q: &HyperbolicSheaf, f: &[Rational], a: usize) -> Result<VanishingCycles> {
    let p = q.poset();
    if f.len() != p.ambient_dim() {
        return Err(Error::Shape(format!("covector has length {}, expected {}", f.len(), p.ambient_dim())));
    }
    if a >= p.len() {
        return Err(Error::InvalidFace(format!("face index {a} out of range")));
    }
    if f.iter().all(Zero::is_zero) {
        return Err(Error::NotPolarization("the zero covector".into()));
    }
    let l = flat_of_face(&p.arrangement, p.face(a));
    if l.basis_vectors().iter().any(|v| !dot(f, v).is_zero()) {
        return Err(Error::NotPolarization(format!("covector does not vanish on the face {}", p.sign_string(a))));
    }
    if !is_polarization(&p.arrangement, &l, f)? {
        return Err(Error::NotPolarization(format!(
            "a flat not inside the span of {} lies in the kernel of the covector",
            p.sign_string(a)
        )));
    }
    let base = p.dim(a) as i32;
    let sel = half_space_selection(p, f, a);
    let gamma = build_selection_complex(q, sel.clone(), Grading::Relative(base), Variant::Gamma, None)?;
    let delta = build_selection_complex(q, sel, Grading::Relative(base), Variant::Delta, None)?;
    let stalk = h0_stalk(gamma, delta, &format!("vanishing cycles at {}", p.sign_string(a)))?;
    Ok(VanishingCycles { dim: stalk.dim(), stalk })
}

/// Candidate polarizations at a flat: interior points of dual faces that
/// vanish on it, plus interior points of the faces of the dual of its
/// quotient arrangement pulled back to `V`. Only genuine polarizations are kept.
pub fn polarizations(poset: &FacePoset, l: &Flat) -> Vec<Vec<Rational>> {
    let arr = &poset.arrangement;
    let n = arr.dim();
    let mut cands: Vec<Vec<Rational>> = Vec::new();
    if let Ok(d) = dual_arrangement(arr) {
        cands.extend(enumerate_faces(&d).faces.iter().map(|f| f.interior_point.clone()));
    }
    let nonpivots: Vec<usize> = (0..n).filter(|j| !l.pivots.contains(j)).collect();
    let quotient: Vec<Vec<Rational>> =
        l.zero_set.iter().map(|&h| nonpivots.iter().map(|&j| arr.hyperplane(h)[j].clone()).collect()).collect();
    if let Ok(qa) = crate::arrangement::Arrangement::new(nonpivots.len(), quotient) {
        if let Ok(qd) = dual_arrangement(&qa) {
            for face in &enumerate_faces(&qd).faces {
                // Pull back g on V/L along v ↦ v[nonpivot] − Σ v[p_i] b_i[nonpivot].
                let g = &face.interior_point;
                let mut f = vec![Rational::zero(); n];
                for (k, &j) in nonpivots.iter().enumerate() {
                    f[j] += &g[k];
                    for (i, &p) in l.pivots.iter().enumerate() {
                        f[p] -= &g[k] * l.basis.get(i, j);
                    }
                }
                cands.push(f);
            }
        }
    }
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for f in cands {
        if f.iter().all(Zero::is_zero) || out.contains(&f) {
            continue;
        }
        if l.basis_vectors().iter().any(|v| !dot(&f, v).is_zero()) {
            continue;
        }
        if is_polarization(arr, l, &f).unwrap_or(false) {
            out.push(f);
        }
    }
    out
}

/// Every admissible `(flat, f, A)` of the arrangement: `A` spans the flat and `f` polarizes it.
pub fn vanishing_instances(poset: &FacePoset) -> Vec<(Flat, Vec<Rational>, usize)> {
    let mut out = Vec::new();
    for l in intersection_poset(&poset.arrangement) {
        let fs = polarizations(poset, &l);
        for a in (0..poset.len()).filter(|&a| poset.face(a).zero_set() == l.zero_set) {
            for f in &fs {
                out.push((l.clone(), f.clone(), a));
            }
        }
    }
    out
}
