use super::{enumerate_faces, Arrangement, FacePoset, Flat};
use crate::error::{Error, Result};
use crate::qlinalg::{dot, Rational};
use std::sync::Arc;

/// Arrangements attached to a flat, with the face map onto their product.
///
/// The product lives on `L × V/L` with coordinates `(v[pivots], residual on
/// the non-pivot columns)`, the non-pivot coordinate vectors spanning a fixed
/// complement of `L`.
#[derive(Debug, Clone)]
pub struct Derived {
    pub flat: Flat,
    pub induced: Arrangement,
    pub quotient: Arrangement,
    pub product: Arrangement,
    /// Original hyperplanes mapping onto each product hyperplane.
    pub product_sources: Vec<Vec<usize>>,
    pub product_poset: Arc<FacePoset>,
    /// Face index in the source poset to face index in `product_poset`.
    pub face_map: Vec<usize>,
}

impl Derived {
    /// The linear identification `V → L × V/L`.
    pub fn lambda(&self, v: &[Rational]) -> Vec<Rational> {
        let l = &self.flat;
        let n = v.len();
        let mut out: Vec<Rational> = l.pivots.iter().map(|&p| v[p].clone()).collect();
        for j in (0..n).filter(|j| !l.pivots.contains(j)) {
            let mut r = v[j].clone();
            for (i, &p) in l.pivots.iter().enumerate() {
                r -= &v[p] * l.basis.get(i, j);
            }
            out.push(r);
        }
        out
    }

    /// Faces of the source poset mapping to `b`.
    pub fn fiber(&self, b: usize) -> Vec<usize> {
        (0..self.face_map.len()).filter(|&a| self.face_map[a] == b).collect()
    }
}

/// Builds the derived arrangements of `l` and the face map of `poset`.
pub fn derived_arrangements(poset: &FacePoset, l: &Flat) -> Result<Derived> {
    let arr = &poset.arrangement;
    let n = arr.dim();
    let closure = super::flat_from_hyperplanes(arr, &l.zero_set)?;
    if closure.zero_set != l.zero_set || closure.dim != l.dim || closure.basis != l.basis {
        return Err(Error::NotAFlat(format!("hyperplanes {:?} do not describe a flat", l.zero_set)));
    }
    let k = l.dim;
    let nonpivots: Vec<usize> = (0..n).filter(|j| !l.pivots.contains(j)).collect();

    let mut induced: Vec<Vec<Rational>> = Vec::new();
    let mut induced_sources: Vec<Vec<usize>> = Vec::new();
    let mut quotient: Vec<Vec<Rational>> = Vec::new();
    let mut quotient_sources: Vec<usize> = Vec::new();
    for (h, cov) in arr.hyperplanes().iter().enumerate() {
        if l.zero_set.contains(&h) {
            quotient.push(nonpivots.iter().map(|&j| cov[j].clone()).collect());
            quotient_sources.push(h);
        } else {
            let r: Vec<Rational> = (0..k).map(|i| dot(cov, l.basis.row(i))).collect();
            let tmp = Arrangement { dim: k, hyperplanes: induced.clone() };
            match tmp.position_of(&r) {
                Some(j) => induced_sources[j].push(h),
                None => {
                    induced.push(r);
                    induced_sources.push(vec![h]);
                }
            }
        }
    }
    let induced = Arrangement::new(k, induced)?;
    let quotient = Arrangement::new(n - k, quotient)?;
    let product = induced.direct_sum(&quotient);
    let mut product_sources = induced_sources.clone();
    product_sources.extend(quotient_sources.iter().map(|&h| vec![h]));
    let product_poset = Arc::new(enumerate_faces(&product));

    let mut face_map = Vec::with_capacity(poset.len());
    for a in 0..poset.len() {
        let c = (0..poset.len())
            .filter(|&c| poset.leq(c, a) && l.zero_set.iter().all(|&h| poset.face(c).signs[h] == 0))
            .max_by_key(|&c| poset.dim(c))
            .expect("the minimal face lies in every flat");
        let mut signs: Vec<i8> = induced_sources.iter().map(|src| poset.face(c).signs[src[0]]).collect();
        signs.extend(quotient_sources.iter().map(|&h| poset.face(a).signs[h]));
        let b = product_poset.find(&signs).ok_or_else(|| {
            Error::NotAFlat(format!("face map produced unrealizable sign vector {}", super::sign_string(&signs)))
        })?;
        face_map.push(b);
    }
    debug_assert!(face_map_is_sound(poset, &product_poset, &face_map));
    Ok(Derived { flat: l.clone(), induced, quotient, product, product_sources, product_poset, face_map })
}

fn face_map_is_sound(src: &FacePoset, dst: &FacePoset, map: &[usize]) -> bool {
    let surjective = (0..dst.len()).all(|b| map.contains(&b));
    let monotone = src.covers.iter().all(|&(a, b)| dst.leq(map[a], map[b]));
    let dims = (0..src.len()).all(|a| dst.dim(map[a]) <= src.dim(a));
    surjective && monotone && dims
}

/// Sign identifying `Lin(A')/Lin(A)` with `Lin(B')/Lin(B)` for `A <₁ A'`
/// over `B <₁ B'`, realized as the product of the two incidence signs.
pub fn relative_sign(src: &FacePoset, d: &Derived, a: usize, a2: usize) -> Result<i8> {
    let eps = src.cover_index(a, a2).map(|i| src.incidence[i]).ok_or(Error::NotCover(a, a2))?;
    let (b, b2) = (d.face_map[a], d.face_map[a2]);
    let p = d.product_poset.as_ref();
    if src.dim(a) < p.dim(b) || src.dim(a) - p.dim(b) != src.dim(a2) - p.dim(b2) {
        return Err(Error::Shape(format!("faces {a}, {a2} drop dimension differently under the face map")));
    }
    let eps_nu = p.cover_index(b, b2).map(|i| p.incidence[i]).ok_or(Error::NotCover(b, b2))?;
    Ok(eps * eps_nu)
}

#[cfg(test)]
mod tests {
    use super::super::{corpus, flat_from_hyperplanes, intersection_poset};
    use super::*;
    use crate::qlinalg::sign_of;

    #[test]
    fn whole_space_and_origin_are_identities() {
        for a in [corpus::a2(), corpus::a3()] {
            let p = enumerate_faces(&a);
            for l in [flat_from_hyperplanes(&a, &[]).unwrap(), flat_from_hyperplanes(&a, &[0, 1]).unwrap()] {
                let d = derived_arrangements(&p, &l).unwrap();
                assert_eq!(d.product, a);
                for i in 0..p.len() {
                    assert_eq!(d.product_poset.face(d.face_map[i]).signs, p.face(i).signs);
                }
            }
        }
    }

    #[test]
    fn a3_along_x_axis() {
        let a = corpus::a3();
        let p = enumerate_faces(&a);
        let l = flat_from_hyperplanes(&a, &[1]).unwrap();
        let d = derived_arrangements(&p, &l).unwrap();
        assert_eq!(d.product.len(), 2);
        assert_eq!(d.product_sources, vec![vec![0, 2], vec![1]]);
        let q = &d.product_poset;
        // {y > x > 0}: signs (x, y, x−y) = (+, +, −).
        assert_eq!(q.sign_string(d.face_map[p.parse_face("++-").unwrap()]), "0+");
        assert_eq!(q.sign_string(d.face_map[p.parse_face("+++").unwrap()]), "++");
    }

    #[test]
    fn lambda_matches_quotient_signs() {
        let a = corpus::braid3();
        let p = enumerate_faces(&a);
        for l in intersection_poset(&a) {
            let d = derived_arrangements(&p, &l).unwrap();
            let k = d.induced.dim();
            for i in 0..p.len() {
                let img = d.lambda(&p.face(i).interior_point);
                let target = d.product_poset.face(d.face_map[i]);
                for (j, src) in d.product_sources.iter().enumerate() {
                    if j >= d.induced.len() {
                        let v = dot(d.product.hyperplane(j), &img);
                        assert_eq!(sign_of(&v), target.signs[j]);
                        assert_eq!(sign_of(&v), p.face(i).signs[src[0]]);
                    }
                }
                assert_eq!(img.len(), k + d.quotient.dim());
            }
        }
    }

    #[test]
    fn rejects_non_flat() {
        let a = corpus::a3();
        let p = enumerate_faces(&a);
        let mut l = flat_from_hyperplanes(&a, &[0]).unwrap();
        l.zero_set = vec![1];
        assert!(derived_arrangements(&p, &l).is_err());
    }
}
