use super::blocks::BlockComplex;
use super::global::ensure_valid;
use super::selection::{build_selection_complex, quotient_orientation, Grading, SelectionComplex, Variant};
use super::specialize::specialize;
use super::stalk::{h0_stalk, H0Stalk, StalkSummary};
use crate::arrangement::{
    cones_for_functional, dual_arrangement, enumerate_faces, Arrangement, ConeSelection, ConeTag, FacePoset, Flat,
};
use crate::error::{Error, Result};
use crate::hypsheaf::{validate, HyperbolicSheaf, ValidationReport};
use crate::qlinalg::{cohomology, induced_h0_map, solve, ChainMap, CohomologyReport, H0Model, Matrix};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Fourier transform along the second factor of a product arrangement.
#[derive(Clone, Debug)]
pub struct FourierTransform {
    pub sheaf: HyperbolicSheaf,
    pub stalks: Vec<H0Stalk>,
}

impl FourierTransform {
    pub fn stalk_summaries(&self) -> Vec<(String, StalkSummary)> {
        let p = self.sheaf.poset();
        self.stalks.iter().enumerate().map(|(i, s)| (p.sign_string(i), s.summary())).collect()
    }
}

/// Splits `arr` into factors on the first `k` coordinates (first `m1`
/// hyperplanes) and the remaining ones.
pub fn split_product(arr: &Arrangement, k: usize, m1: usize) -> Result<(Arrangement, Arrangement)> {
    let n = arr.dim();
    if k > n || m1 > arr.len() {
        return Err(Error::Shape(format!("cannot split a {n}-dimensional arrangement at ({k}, {m1})")));
    }
    let hs = arr.hyperplanes();
    let first_ok = hs[..m1].iter().all(|h| h[k..].iter().all(Zero::is_zero));
    let second_ok = hs[m1..].iter().all(|h| h[..k].iter().all(Zero::is_zero));
    if !first_ok || !second_ok {
        return Err(Error::InvalidArrangement(format!("arrangement is not a product at ({k}, {m1})")));
    }
    let a1 = Arrangement::new(k, hs[..m1].iter().map(|h| h[..k].to_vec()).collect())?;
    let a2 = Arrangement::new(n - k, hs[m1..].iter().map(|h| h[k..].to_vec()).collect())?;
    Ok((a1, a2))
}

fn parity(p: usize) -> i8 {
    if p.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Chain map from `blocks`: `(source face, target face, matrix)` placed
/// between the summands of the two selection complexes.
fn chain_map(src: &SelectionComplex, dst: &SelectionComplex, blocks: Vec<(usize, usize, Matrix)>) -> ChainMap {
    let mut components: BTreeMap<i32, Matrix> = BTreeMap::new();
    for (s, d, m) in blocks {
        let (bs, bd) = (&src.blocks[&s], &dst.blocks[&d]);
        let entry = components
            .entry(bs.degree)
            .or_insert_with(|| Matrix::zeros(dst.complex.term_dim(bs.degree), src.complex.term_dim(bs.degree)));
        entry.add_block(bd.offset, bs.offset, &m);
    }
    ChainMap { components }
}

/// Fourier transform in the second factor of `s`, whose arrangement is the
/// product of a `k`-dimensional factor with `m1` hyperplanes and an
/// essential second factor. The result lives on `first ⊕ dual(second)`.
pub fn relative_fourier(s: &HyperbolicSheaf, k: usize, m1: usize) -> Result<FourierTransform> {
    let p = s.poset().clone();
    let (arr1, arr2) = split_product(&p.arrangement, k, m1)?;
    if !arr2.is_essential() {
        return Err(Error::NoDual("the Fourier transform needs an essential arrangement".into()));
    }
    let dual2 = dual_arrangement(&arr2)?;
    let p1 = enumerate_faces(&arr1);
    let p2 = enumerate_faces(&arr2);
    let d2 = enumerate_faces(&dual2);
    let out = Arc::new(enumerate_faces(&arr1.direct_sum(&dual2)));

    let split = |signs: &[i8], f1: &FacePoset, f2: &FacePoset| -> (usize, usize) {
        let a = f1.find(&signs[..m1]).expect("factor face");
        let b = f2.find(&signs[m1..]).expect("factor face");
        (a, b)
    };
    let pair_of_p: Vec<(usize, usize)> = p.faces.iter().map(|f| split(&f.signs, &p1, &p2)).collect();
    let index_p: HashMap<(usize, usize), usize> = pair_of_p.iter().enumerate().map(|(i, &ab)| (ab, i)).collect();
    let twist: Vec<i8> = pair_of_p.iter().map(|&(_, b)| quotient_orientation(&p2, b)).collect();
    let cones: Vec<ConeSelection> =
        (0..d2.len()).map(|x| cones_for_functional(&p2, &d2.face(x).interior_point).1).collect();
    let pair_of_o: Vec<(usize, usize)> = out.faces.iter().map(|f| split(&f.signs, &p1, &d2)).collect();

    let stalks: Vec<H0Stalk> = (0..out.len())
        .into_par_iter()
        .map(|o| {
            let (a1, x) = pair_of_o[o];
            let mut ids: Vec<usize> = cones[x].face_ids.iter().map(|&b| index_p[&(a1, b)]).collect();
            ids.sort_unstable();
            let sel = ConeSelection { face_ids: ids, tag: ConeTag::V };
            let base = p1.dim(a1) as i32;
            let g = build_selection_complex(s, sel.clone(), Grading::Relative(base), Variant::Gamma, Some(&twist))?;
            let d = build_selection_complex(s, sel, Grading::Relative(base), Variant::Delta, Some(&twist))?;
            h0_stalk(g, d, &format!("small dual cone of {}", out.sign_string(o)))
        })
        .collect::<Result<_>>()?;

    let maps: Vec<(Matrix, Matrix)> = out
        .covers
        .par_iter()
        .enumerate()
        .map(|(ci, &(o, o2))| {
            let (sx, sy) = (&stalks[o], &stalks[o2]);
            let ((a1, x), (a1b, _)) = (pair_of_o[o], pair_of_o[o2]);
            if a1 == a1b {
                // V(x) ⊆ V(y): the γ-complex of x is a quotient of that of y,
                // the δ-complex of x a subcomplex of that of y.
                let delta = solve(&sx.kernel, &sy.kernel).ok_or_else(|| {
                    Error::Transport(format!(
                        "kernel of {} not inside kernel of {}",
                        out.sign_string(o2),
                        out.sign_string(o)
                    ))
                })?;
                let gamma = &sy.transport_inverse * &(&sy.projection * &sx.kernel);
                return Ok((gamma, delta));
            }
            let eps_out = out.incidence[ci];
            let mut gb = Vec::new();
            let mut db = Vec::new();
            for &b in &cones[x].face_ids {
                let (lo, hi) = (index_p[&(a1, b)], index_p[&(a1b, b)]);
                let pc = p.cover_index(lo, hi).ok_or(Error::NotCover(lo, hi))?;
                let sign = p.incidence[pc] * eps_out * parity(p2.dim(b));
                gb.push((lo, hi, s.gamma_matrices()[pc].signed(sign)));
                db.push((hi, lo, s.delta_matrices()[pc].signed(sign)));
            }
            let gmap = chain_map(&sx.gamma, &sy.gamma, gb);
            let gamma = induced_h0_map(&sx.gamma.complex, &sy.gamma.complex, &gmap, H0Model::Kernel)?;
            let dmap = chain_map(&sy.delta, &sx.delta, db);
            let coker = induced_h0_map(&sy.delta.complex, &sx.delta.complex, &dmap, H0Model::Cokernel)?;
            Ok((gamma, &(&sx.transport_inverse * &coker) * &sy.transport))
        })
        .collect::<Result<_>>()?;
    let dims = stalks.iter().map(H0Stalk::dim).collect();
    let (gamma, delta) = maps.into_iter().unzip();
    let sheaf = HyperbolicSheaf::new(out, dims, gamma, delta)?;
    Ok(FourierTransform { sheaf, stalks })
}

/// Fourier transform onto the dual arrangement.
pub fn fourier(q: &HyperbolicSheaf) -> Result<FourierTransform> {
    ensure_valid(q)?;
    relative_fourier(q, 0, 0)
}

/// Total complex over `{C∨ ≥ A∨} × U(C∨)` computing the Fourier stalk at
/// `A∨` from big dual cones.
pub fn fourier_cross_complex(
    q: &HyperbolicSheaf,
    dual: &FacePoset,
    a_dual: usize,
) -> Result<crate::qlinalg::ChainComplex> {
    let p = q.poset();
    let n = p.ambient_dim() as i32;
    if a_dual >= dual.len() {
        return Err(Error::InvalidFace(format!("dual face index {a_dual} out of range")));
    }
    let columns = dual.above(a_dual);
    let big: HashMap<usize, ConeSelection> =
        columns.iter().map(|&c| (c, cones_for_functional(p, &dual.face(c).interior_point).0)).collect();
    let twist: Vec<i8> = (0..p.len()).map(|b| quotient_orientation(p, b)).collect();
    let mut bc = BlockComplex::new();
    for &c in &columns {
        for &b in &big[&c].face_ids {
            let deg = n - dual.dim(c) as i32 - p.dim(b) as i32;
            bc.summand((c, b), deg, q.dim(b), format!("{}|{}", dual.sign_string(c), p.sign_string(b)));
        }
    }
    for &c in &columns {
        let u = &big[&c];
        let col = parity((n as usize) - dual.dim(c));
        for (ci, &(b1, b2)) in p.covers.iter().enumerate() {
            if u.contains(b1) && u.contains(b2) {
                let sign = col * p.incidence[ci] * twist[b1] * twist[b2];
                bc.block((c, b2), (c, b1), q.delta_matrices()[ci].signed(sign));
            }
        }
        for &c1 in dual.lower_covers(c) {
            if !dual.leq(a_dual, c1) {
                continue;
            }
            let eps = dual.incidence(c1, c);
            for &b in &u.face_ids {
                bc.block((c, b), (c1, b), Matrix::identity(q.dim(b)).signed(eps));
            }
        }
    }
    bc.build()
}

/// Outcome of the double-complex route at one dual face.
#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub face: String,
    pub expected_dim: usize,
    pub cohomology: CohomologyReport,
    pub agrees: bool,
}

/// Compares every Fourier stalk with the total cohomology of its double complex.
pub fn fourier_cross_check_all(q: &HyperbolicSheaf) -> Result<Vec<CrossCheck>> {
    let ft = fourier(q)?;
    let dual = ft.sheaf.poset().clone();
    (0..dual.len())
        .into_par_iter()
        .map(|a| {
            let r = cohomology(&fourier_cross_complex(q, &dual, a)?, false)?;
            let expected = ft.sheaf.dim(a);
            let agrees = r.concentrated_in(0) && r.rank(0) == expected;
            Ok(CrossCheck { face: dual.sign_string(a), expected_dim: expected, cohomology: r, agrees })
        })
        .collect()
}

/// True iff the double-complex route reproduces the Fourier stalk at `a_dual`.
pub fn fourier_cross_check(q: &HyperbolicSheaf, a_dual: usize) -> Result<bool> {
    let ft = fourier(q)?;
    let r = cohomology(&fourier_cross_complex(q, ft.sheaf.poset(), a_dual)?, false)?;
    Ok(r.concentrated_in(0) && r.rank(0) == ft.sheaf.dim(a_dual))
}

/// Checks, for every dual face `A∨` and primal face, both
/// `1_U(A∨) = Σ_{B∨ ≥ A∨} (−1)^{n − dim B∨} 1_V(B∨)` and the same with `U`, `V` swapped.
pub fn inclusion_exclusion_check(arr: &Arrangement) -> Result<bool> {
    let primal = enumerate_faces(arr);
    let dual = enumerate_faces(&dual_arrangement(arr)?);
    let n = arr.dim();
    let cones: Vec<(ConeSelection, ConeSelection)> =
        (0..dual.len()).map(|x| cones_for_functional(&primal, &dual.face(x).interior_point)).collect();
    let indicator = |sel: &ConeSelection| -> Vec<i64> { (0..primal.len()).map(|b| sel.contains(b) as i64).collect() };
    Ok((0..dual.len()).all(|a| {
        let mut from_v = vec![0i64; primal.len()];
        let mut from_u = vec![0i64; primal.len()];
        for b in dual.above(a) {
            let sign = parity(n - dual.dim(b)) as i64;
            for (i, (u, v)) in indicator(&cones[b].0).iter().zip(indicator(&cones[b].1)).enumerate() {
                from_v[i] += sign * v;
                from_u[i] += sign * u;
            }
        }
        from_v == indicator(&cones[a].0) && from_u == indicator(&cones[a].1)
    }))
}

/// Result of the experimental microlocalization; failures are recorded.
#[derive(Clone, Debug, Serialize)]
pub struct Microlocalization {
    #[serde(skip)]
    pub sheaf: Option<HyperbolicSheaf>,
    pub dims: Option<Vec<usize>>,
    pub validation: Option<ValidationReport>,
    pub error: Option<String>,
}

/// Specialization along `L` followed by the Fourier transform in the normal directions.
pub fn microlocalize_experimental(q: &HyperbolicSheaf, l: &Flat) -> Result<Microlocalization> {
    let (d, s) = specialize(q, l)?;
    match relative_fourier(&s.sheaf, d.induced.dim(), d.induced.len()) {
        Ok(ft) => Ok(Microlocalization {
            dims: Some(ft.sheaf.dims().to_vec()),
            validation: Some(validate(&ft.sheaf)),
            sheaf: Some(ft.sheaf),
            error: None,
        }),
        Err(e) if !e.is_input_error() => {
            Ok(Microlocalization { sheaf: None, dims: None, validation: None, error: Some(e.to_string()) })
        }
        Err(e) => Err(e),
    }
}

/// Double transform compared with the antipodal pullback, face by face.
#[derive(Clone, Debug, Serialize)]
pub struct DoubleFourier {
    /// Per face of the double dual: its dimension and that of the antipodal original face.
    pub dims: Vec<(String, usize, usize)>,
    pub matches_antipode: bool,
    pub validates: bool,
}

pub fn double_fourier_experiment(q: &HyperbolicSheaf) -> Result<DoubleFourier> {
    let once = fourier(q)?;
    let twice = fourier(&once.sheaf)?;
    let p = q.poset();
    let pp = twice.sheaf.poset();
    let mut dims = Vec::with_capacity(pp.len());
    for i in 0..pp.len() {
        let neg: Vec<_> = pp.face(i).interior_point.iter().map(|x| -x).collect();
        let a = p
            .find(&p.arrangement.sign_vector(&neg))
            .ok_or_else(|| Error::InvalidArrangement("the double dual does not refine to the original faces".into()))?;
        dims.push((pp.sign_string(i), twice.sheaf.dim(i), q.dim(a)));
    }
    let matches_antipode = dims.iter().all(|(_, x, y)| x == y);
    Ok(DoubleFourier { dims, matches_antipode, validates: validate(&twice.sheaf).ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::corpus;
    use crate::hypsheaf::corpus::{sheaves, tilted_a1};
    use crate::hypsheaf::{constant_sheaf, skyscraper_sheaf};

    #[test]
    fn line_examples() {
        let p = Arc::new(enumerate_faces(&corpus::a1()));
        let c = fourier(&constant_sheaf(p.clone())).unwrap();
        assert_eq!(c.sheaf.dims(), &[1, 0, 0]);
        let s = fourier(&skyscraper_sheaf(p)).unwrap();
        assert_eq!(s.sheaf.dims(), &[1, 1, 1]);
        assert!(validate(&s.sheaf).ok);
        let t = fourier(&tilted_a1()).unwrap();
        assert!(validate(&t.sheaf).ok);
        assert_eq!(t.sheaf.dim(0), 2);
    }

    #[test]
    fn corpus_outputs_validate_and_cross_check() {
        for (name, q) in sheaves() {
            if !q.arrangement().is_essential() {
                assert!(fourier(&q).is_err());
                continue;
            }
            let ft = fourier(&q).unwrap();
            let r = validate(&ft.sheaf);
            assert!(r.ok, "{name}: {:?}", r.first_failure());
            assert_eq!(ft.sheaf.dim(0), q.dim(0), "{name}");
            for c in fourier_cross_check_all(&q).unwrap() {
                assert!(c.agrees, "{name} at {}: {:?}", c.face, c.cohomology.ranks);
            }
        }
    }

    #[test]
    fn microlocalization_extremes() {
        use crate::arrangement::flat_from_hyperplanes;
        for (name, q) in sheaves().into_iter().filter(|(_, q)| q.arrangement().is_essential()) {
            let arr = q.arrangement().clone();
            let all: Vec<usize> = (0..arr.len()).collect();
            let at_origin = microlocalize_experimental(&q, &flat_from_hyperplanes(&arr, &all).unwrap()).unwrap();
            assert_eq!(at_origin.dims.unwrap(), fourier(&q).unwrap().sheaf.dims(), "{name}");
            let whole = microlocalize_experimental(&q, &flat_from_hyperplanes(&arr, &[]).unwrap()).unwrap();
            assert_eq!(whole.sheaf.unwrap(), q, "{name}");
        }
    }

    #[test]
    fn double_transform_on_lines() {
        let p = Arc::new(enumerate_faces(&corpus::a2()));
        for q in [constant_sheaf(p.clone()), skyscraper_sheaf(p)] {
            let d = double_fourier_experiment(&q).unwrap();
            assert!(d.validates && d.matches_antipode);
        }
    }

    #[test]
    fn inclusion_exclusion() {
        for a in [corpus::a1(), corpus::a2(), corpus::a3(), corpus::four_lines(), corpus::coord3()] {
            assert!(inclusion_exclusion_check(&a).unwrap());
        }
    }
}
