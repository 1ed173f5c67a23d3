use super::{Arrangement, Face};
use crate::error::{Error, Result};
use crate::qlinalg::{dot, kernel_basis, rref, Matrix, Rational};
use num_traits::Zero;
use std::collections::BTreeSet;

/// Intersection of a set of hyperplanes, closed under containment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flat {
    /// Every hyperplane containing the flat.
    pub zero_set: Vec<usize>,
    pub dim: usize,
    /// Reduced row echelon basis, one row per vector.
    pub basis: Matrix,
    pub pivots: Vec<usize>,
}

impl Flat {
    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        if self.dim == 0 {
            return v.iter().all(Zero::is_zero);
        }
        // v lies in the span iff it equals the combination read off the pivots.
        let mut rest = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = v[p].clone();
            for (r, b) in rest.iter_mut().zip(self.basis.row(i)) {
                *r -= &c * b;
            }
        }
        rest.iter().all(Zero::is_zero)
    }

    /// True when `self ⊆ other`.
    pub fn is_subflat_of(&self, other: &Flat) -> bool {
        other.zero_set.iter().all(|h| self.zero_set.contains(h))
    }

    /// Basis rows as vectors.
    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.to_rows()
    }
}

/// Flat cut out by the given hyperplanes.
pub fn flat_from_hyperplanes(arr: &Arrangement, subset: &[usize]) -> Result<Flat> {
    if let Some(&bad) = subset.iter().find(|&&i| i >= arr.len()) {
        return Err(Error::NotAFlat(format!("hyperplane index {bad} out of range (arrangement has {})", arr.len())));
    }
    let k = kernel_basis(&arr.submatrix(subset));
    let (basis, pivots) = if k.cols() == 0 { (Matrix::zeros(0, arr.dim()), vec![]) } else { rref(&k.transpose()) };
    let zero_set =
        (0..arr.len()).filter(|&h| (0..basis.rows()).all(|r| dot(arr.hyperplane(h), basis.row(r)).is_zero())).collect();
    Ok(Flat { zero_set, dim: pivots.len(), basis, pivots })
}

/// The flat spanned by a face.
pub fn flat_of_face(arr: &Arrangement, face: &Face) -> Flat {
    flat_from_hyperplanes(arr, &face.zero_set()).expect("face indices are valid")
}

/// All flats, by decreasing dimension then zero set.
pub fn intersection_poset(arr: &Arrangement) -> Vec<Flat> {
    let top = flat_from_hyperplanes(arr, &[]).expect("empty subset");
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(top.zero_set.clone());
    let mut all = vec![top];
    let mut frontier = 0;
    while frontier < all.len() {
        let f = all[frontier].clone();
        frontier += 1;
        for h in 0..arr.len() {
            if f.zero_set.contains(&h) {
                continue;
            }
            let mut sub = f.zero_set.clone();
            sub.push(h);
            let g = flat_from_hyperplanes(arr, &sub).expect("valid indices");
            if seen.insert(g.zero_set.clone()) {
                all.push(g);
            }
        }
    }
    all.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.zero_set.cmp(&b.zero_set)));
    all
}

/// True when every flat inside `ker f` lies in `l`. Errors if `f` does not vanish on `l`.
pub fn is_polarization(arr: &Arrangement, l: &Flat, f: &[Rational]) -> Result<bool> {
    if f.len() != arr.dim() {
        return Err(Error::Shape(format!("covector has length {}, expected {}", f.len(), arr.dim())));
    }
    if l.basis_vectors().iter().any(|b| !dot(f, b).is_zero()) {
        return Err(Error::NotPolarization("covector does not vanish on the flat".into()));
    }
    Ok(intersection_poset(arr)
        .iter()
        .filter(|g| g.basis_vectors().iter().all(|b| dot(f, b).is_zero()))
        .all(|g| g.is_subflat_of(l)))
}

#[cfg(test)]
mod tests {
    use super::super::corpus;
    use super::*;
    use crate::qlinalg::q;

    #[test]
    fn flat_counts() {
        assert_eq!(intersection_poset(&corpus::a1()).len(), 2);
        let a2 = intersection_poset(&corpus::a2());
        assert_eq!(a2.iter().map(|f| f.dim).collect::<Vec<_>>(), vec![2, 1, 1, 0]);
        assert_eq!(intersection_poset(&corpus::a3()).len(), 5);
        let b3 = intersection_poset(&corpus::braid3());
        assert_eq!(b3.iter().map(|f| f.dim).collect::<Vec<_>>(), vec![3, 2, 2, 2, 1]);
        assert_eq!(b3[4].zero_set, vec![0, 1, 2]);
    }

    #[test]
    fn polarization_examples() {
        let origin = |a: &Arrangement| flat_from_hyperplanes(a, &(0..a.len()).collect::<Vec<_>>()).unwrap();
        let a1 = corpus::a1();
        assert!(is_polarization(&a1, &origin(&a1), &[q(1)]).unwrap());
        let a2 = corpus::a2();
        assert!(!is_polarization(&a2, &origin(&a2), &[q(1), q(0)]).unwrap());
        assert!(is_polarization(&a2, &origin(&a2), &[q(1), q(1)]).unwrap());
        let xaxis = flat_from_hyperplanes(&a2, &[1]).unwrap();
        assert!(is_polarization(&a2, &xaxis, &[q(1), q(0)]).is_err());
        assert!(is_polarization(&a2, &xaxis, &[q(0), q(1)]).unwrap());
    }

    #[test]
    fn membership() {
        let l = flat_from_hyperplanes(&corpus::braid3(), &[0, 1]).unwrap();
        assert!(l.contains_vector(&[q(2), q(2), q(2)]));
        assert!(!l.contains_vector(&[q(1), q(2), q(2)]));
    }
}
