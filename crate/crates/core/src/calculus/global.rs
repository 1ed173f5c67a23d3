use super::blocks::BlockComplex;
use super::selection::{build_selection_complex, Grading, SelectionComplex, Variant};
use crate::arrangement::{ConeSelection, ConeTag};
use crate::error::{Error, Result};
use crate::hypsheaf::{validate, HyperbolicSheaf};
use crate::qlinalg::{cohomology, CohomologyReport, Matrix};

/// Errors with the first failed axiom instance unless the sheaf validates.
pub fn ensure_valid(q: &HyperbolicSheaf) -> Result<()> {
    let report = validate(q);
    match report.first_failure() {
        None => Ok(()),
        Some(c) => {
            let f = c.failure.as_ref().expect("failed checks carry a witness");
            Err(Error::InvalidSheaf(format!("{} fails at faces {:?}: {}", c.name, f.signs, f.detail)))
        }
    }
}

fn all_faces(q: &HyperbolicSheaf) -> ConeSelection {
    ConeSelection { face_ids: (0..q.poset().len()).collect(), tag: ConeTag::Custom }
}

fn check_face(q: &HyperbolicSheaf, a: usize) -> Result<()> {
    if a < q.poset().len() {
        Ok(())
    } else {
        Err(Error::InvalidFace(format!("face index {a} out of range")))
    }
}

/// The γ⊗ε complex over all faces, dimension-`d` faces in degree `d`.
pub fn rgamma_compact_complex(q: &HyperbolicSheaf) -> Result<SelectionComplex> {
    build_selection_complex(q, all_faces(q), Grading::Dim, Variant::Gamma, None)
}

/// The δ⊗ε complex over all faces, dimension-`d` faces in degree `−d`.
pub fn rgamma_full_complex(q: &HyperbolicSheaf) -> Result<SelectionComplex> {
    build_selection_complex(q, all_faces(q), Grading::NegDim, Variant::Delta, None)
}

pub fn rgamma_compact(q: &HyperbolicSheaf) -> Result<CohomologyReport> {
    ensure_valid(q)?;
    cohomology(&rgamma_compact_complex(q)?.complex, false)
}

pub fn rgamma_full(q: &HyperbolicSheaf) -> Result<CohomologyReport> {
    ensure_valid(q)?;
    cohomology(&rgamma_full_complex(q)?.complex, false)
}

/// The δ⊗ε complex over `{B ≥ A}`, chambers in degree 0.
pub fn ordinary_stalk_complex(q: &HyperbolicSheaf, a: usize) -> Result<SelectionComplex> {
    check_face(q, a)?;
    let sel = ConeSelection { face_ids: q.poset().above(a), tag: ConeTag::Custom };
    build_selection_complex(q, sel, Grading::Codim, Variant::Delta, None)
}

pub fn ordinary_stalk(q: &HyperbolicSheaf, a: usize) -> Result<CohomologyReport> {
    ensure_valid(q)?;
    cohomology(&ordinary_stalk_complex(q, a)?.complex, false)
}

/// Total complex rebuilding `E_A` from ordinary stalks: summands `E_C` for
/// `A ≤ B ≤ C` in degree `dim B − dim C`, vertical maps `δ⊗ε` inside each
/// column `B` and horizontal projections `⊗ε` along `B <₁ B'`.
pub fn hyperbolic_from_stalks_complex(q: &HyperbolicSheaf, a: usize) -> Result<crate::qlinalg::ChainComplex> {
    check_face(q, a)?;
    let p = q.poset();
    let column = p.above(a);
    let mut bc = BlockComplex::new();
    for &b in &column {
        for c in p.above(b) {
            let label = format!("{}|{}", p.sign_string(b), p.sign_string(c));
            bc.summand((b, c), p.dim(b) as i32 - p.dim(c) as i32, q.dim(c), label);
        }
    }
    for &b in &column {
        let col_sign: i8 = if (p.dim(b) - p.dim(a)).is_multiple_of(2) { 1 } else { -1 };
        for (ci, &(c1, c2)) in p.covers.iter().enumerate() {
            if p.leq(b, c1) {
                let m = q.delta_matrices()[ci].signed(col_sign * p.incidence[ci]);
                bc.block((b, c2), (b, c1), m);
            }
        }
        for &b2 in p.upper_covers(b) {
            let eps = p.incidence(b, b2);
            for c in p.above(b2) {
                bc.block((b, c), (b2, c), Matrix::identity(q.dim(c)).signed(eps));
            }
        }
    }
    bc.build()
}

pub fn hyperbolic_from_stalks(q: &HyperbolicSheaf, a: usize) -> Result<CohomologyReport> {
    ensure_valid(q)?;
    cohomology(&hyperbolic_from_stalks_complex(q, a)?, false)
}

/// True iff the total complex has cohomology `E_A` in degree 0 only.
pub fn hyperbolic_from_stalks_check(q: &HyperbolicSheaf, a: usize) -> Result<bool> {
    let r = hyperbolic_from_stalks(q, a)?;
    Ok(r.concentrated_in(0) && r.rank(0) == q.dim(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{corpus, enumerate_faces};
    use crate::hypsheaf::corpus::{sheaves, tilted_a1};
    use crate::hypsheaf::{constant_sheaf, skyscraper_sheaf};
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn ranks(r: &CohomologyReport) -> BTreeMap<i32, usize> {
        r.ranks.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k, v)).collect()
    }

    #[test]
    fn line_values() {
        let p = Arc::new(enumerate_faces(&corpus::a1()));
        let c = constant_sheaf(p.clone());
        let s = skyscraper_sheaf(p.clone());
        assert_eq!(ranks(&rgamma_compact(&c).unwrap()), BTreeMap::from([(1, 1)]));
        assert_eq!(ranks(&rgamma_compact(&s).unwrap()), BTreeMap::from([(0, 1)]));
        assert_eq!(ranks(&rgamma_full(&c).unwrap()), BTreeMap::from([(-1, 1)]));
        assert_eq!(ranks(&rgamma_full(&s).unwrap()), BTreeMap::from([(0, 1)]));
        assert_eq!(ranks(&ordinary_stalk(&c, 0).unwrap()), BTreeMap::from([(0, 1)]));
        let plus = p.parse_face("+").unwrap();
        assert!(ranks(&ordinary_stalk(&s, plus).unwrap()).is_empty());
        // Q ⊕ Q → Q² with both columns (1,1) up to sign: rank 1.
        assert_eq!(ranks(&ordinary_stalk(&tilted_a1(), 0).unwrap()), BTreeMap::from([(0, 1), (1, 1)]));
    }

    #[test]
    fn plane_constant() {
        let c = constant_sheaf(Arc::new(enumerate_faces(&corpus::a2())));
        assert_eq!(ranks(&rgamma_compact(&c).unwrap()), BTreeMap::from([(2, 1)]));
        assert_eq!(ranks(&rgamma_full(&c).unwrap()), BTreeMap::from([(-2, 1)]));
        for a in 0..c.poset().len() {
            assert!(hyperbolic_from_stalks_check(&c, a).unwrap());
        }
    }

    #[test]
    fn stalk_reconstruction_and_duality() {
        assert!(hyperbolic_from_stalks_check(&tilted_a1(), 0).unwrap());
        for (name, q) in sheaves() {
            let full = rgamma_full(&q).unwrap();
            let compact = rgamma_compact(&q.verdier_dual()).unwrap();
            for d in -4..=4 {
                assert_eq!(full.rank(d), compact.rank(-d), "{name} degree {d}");
            }
            for a in 0..q.poset().len() {
                assert!(hyperbolic_from_stalks_check(&q, a).unwrap(), "{name} at {}", q.poset().sign_string(a));
            }
        }
    }
}
