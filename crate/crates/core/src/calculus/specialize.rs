use super::global::ensure_valid;
use super::selection::{build_selection_complex, Grading, Variant};
use super::stalk::{h0_stalk, H0Stalk, StalkSummary};
use crate::arrangement::{
    derived_arrangements, flat_from_hyperplanes, ConeSelection, ConeTag, Derived, FacePoset, Flat,
};
use crate::error::{Error, Result};
use crate::hypsheaf::{validate, HyperbolicSheaf};
use crate::qlinalg::{induced_h0_map, ChainMap, H0Model, Matrix};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A sheaf pushed along a face map, with the fiber complexes behind each stalk.
#[derive(Clone, Debug)]
pub struct Specialization {
    pub sheaf: HyperbolicSheaf,
    pub source: Arc<FacePoset>,
    pub face_map: Vec<usize>,
    pub stalks: Vec<H0Stalk>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberSummary {
    pub face: String,
    pub fiber: Vec<String>,
    #[serde(flatten)]
    pub stalk: StalkSummary,
}

impl Specialization {
    pub fn fiber_summaries(&self) -> Vec<FiberSummary> {
        let p = self.sheaf.poset();
        self.stalks
            .iter()
            .enumerate()
            .map(|(b, s)| FiberSummary {
                face: p.sign_string(b),
                fiber: s.gamma.selection.face_ids.iter().map(|&a| self.source.sign_string(a)).collect(),
                stalk: s.summary(),
            })
            .collect()
    }
}

fn sign_of_parity(p: usize) -> i8 {
    if p.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Chain map between the fiber complexes over `b <₁ b2`, built from covers
/// `a <₁ a2` lying over them. `use_gamma` selects `γ_{a a2}` (fiber `b` to
/// fiber `b2`) or `δ_{a2 a}` (fiber `b2` to fiber `b`).
fn fiber_chain_map(
    q: &HyperbolicSheaf,
    target: &FacePoset,
    face_map: &[usize],
    from: &H0Stalk,
    to: &H0Stalk,
    (b, b2): (usize, usize),
    use_gamma: bool,
) -> ChainMap {
    let src = q.poset();
    let eps_nu = target.incidence(b, b2);
    let (src_cx, dst_cx) = if use_gamma { (&from.gamma, &to.gamma) } else { (&to.delta, &from.delta) };
    let mut components: BTreeMap<i32, Matrix> = BTreeMap::new();
    for (ci, &(a, a2)) in src.covers.iter().enumerate() {
        if face_map[a] != b || face_map[a2] != b2 {
            continue;
        }
        let p = src.dim(a) - target.dim(b);
        if src.dim(a2) - target.dim(b2) != p {
            continue;
        }
        let sign = src.incidence[ci] * eps_nu * sign_of_parity(p);
        let (s, d, m) = if use_gamma {
            (a, a2, q.gamma_matrices()[ci].signed(sign))
        } else {
            (a2, a, q.delta_matrices()[ci].signed(sign))
        };
        let (bs, bd) = (&src_cx.blocks[&s], &dst_cx.blocks[&d]);
        debug_assert_eq!(bs.degree, bd.degree);
        let entry = components
            .entry(bs.degree)
            .or_insert_with(|| Matrix::zeros(dst_cx.complex.term_dim(bs.degree), src_cx.complex.term_dim(bs.degree)));
        entry.add_block(bd.offset, bs.offset, &m);
    }
    ChainMap { components }
}

/// Pushes `q` along a monotone, dimension-lowering face map onto `target`.
/// Each stalk is degree-0 cohomology of the fiber complexes; structure maps
/// are induced by chain maps and `δ` is transported onto the kernel model.
pub fn specialize_along(q: &HyperbolicSheaf, target: Arc<FacePoset>, face_map: &[usize]) -> Result<Specialization> {
    let src = q.poset();
    if face_map.len() != src.len() || face_map.iter().any(|&b| b >= target.len()) {
        return Err(Error::Shape("face map does not match the posets".into()));
    }
    let stalks: Vec<H0Stalk> = (0..target.len())
        .into_par_iter()
        .map(|b| {
            let fiber: Vec<usize> = (0..src.len()).filter(|&a| face_map[a] == b).collect();
            if let Some(&a) = fiber.iter().find(|&&a| src.dim(a) < target.dim(b)) {
                return Err(Error::Shape(format!("face {} gains dimension under the face map", src.sign_string(a))));
            }
            let sel = ConeSelection { face_ids: fiber, tag: ConeTag::Fiber };
            let base = target.dim(b) as i32;
            let g = build_selection_complex(q, sel.clone(), Grading::Relative(base), Variant::Gamma, None)?;
            let d = build_selection_complex(q, sel, Grading::Relative(base), Variant::Delta, None)?;
            h0_stalk(g, d, &format!("fiber over {}", target.sign_string(b)))
        })
        .collect::<Result<_>>()?;
    let maps: Vec<(Matrix, Matrix)> = target
        .covers
        .par_iter()
        .map(|&(b, b2)| {
            let (sb, sb2) = (&stalks[b], &stalks[b2]);
            let gmap = fiber_chain_map(q, &target, face_map, sb, sb2, (b, b2), true);
            let gamma = induced_h0_map(&sb.gamma.complex, &sb2.gamma.complex, &gmap, H0Model::Kernel)?;
            let dmap = fiber_chain_map(q, &target, face_map, sb, sb2, (b, b2), false);
            let coker = induced_h0_map(&sb2.delta.complex, &sb.delta.complex, &dmap, H0Model::Cokernel)?;
            let delta = &(&sb.transport_inverse * &coker) * &sb2.transport;
            Ok((gamma, delta))
        })
        .collect::<Result<_>>()?;
    let dims = stalks.iter().map(H0Stalk::dim).collect();
    let (gamma, delta) = maps.into_iter().unzip();
    let sheaf = HyperbolicSheaf::new(target, dims, gamma, delta)?;
    Ok(Specialization { sheaf, source: src.clone(), face_map: face_map.to_vec(), stalks })
}

/// Specialization to the normal arrangement of a flat.
pub fn specialize(q: &HyperbolicSheaf, l: &Flat) -> Result<(Derived, Specialization)> {
    ensure_valid(q)?;
    let d = derived_arrangements(q.poset(), l)?;
    let s = specialize_along(q, d.product_poset.clone(), &d.face_map)?;
    Ok((d, s))
}

/// Image of a flat `x` of the source arrangement inside the product
/// arrangement of `d`, assuming `x` and `d.flat` are nested.
pub fn image_flat(d: &Derived, x: &Flat) -> Result<Flat> {
    let hs: Vec<usize> =
        (0..d.product.len()).filter(|&j| d.product_sources[j].iter().any(|h| x.zero_set.contains(h))).collect();
    let f = flat_from_hyperplanes(&d.product, &hs)?;
    if f.dim != x.dim {
        return Err(Error::NotAFlat(format!(
            "image of the flat cut out by {:?} has dimension {} instead of {}",
            x.zero_set, f.dim, x.dim
        )));
    }
    Ok(f)
}

/// Outcome of comparing the two iterated specializations with the one-shot one.
#[derive(Clone, Debug, Serialize)]
pub struct BispecReport {
    pub consistent: bool,
    pub same_partition: bool,
    pub same_dims: bool,
    pub all_validate: bool,
    /// Per source face: stalk dimension along each of the three paths.
    pub dims: Vec<[usize; 3]>,
}

fn compose(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&b| second[b]).collect()
}

fn same_partition(x: &[usize], y: &[usize]) -> bool {
    (0..x.len()).all(|i| (0..x.len()).all(|j| (x[i] == x[j]) == (y[i] == y[j])))
}

/// Compares both orders of iterated specialization along flats `N ⊆ M`
/// with one specialization along the composite face map.
pub fn bispec_consistency(q: &HyperbolicSheaf, n: &Flat, m: &Flat) -> Result<BispecReport> {
    if !n.is_subflat_of(m) {
        return Err(Error::NotAFlat(format!("flat {:?} is not contained in flat {:?}", n.zero_set, m.zero_set)));
    }
    let (dm, s_m) = specialize(q, m)?;
    let (dmn, s_mn) = specialize(&s_m.sheaf, &image_flat(&dm, n)?)?;
    let (dn, s_n) = specialize(q, n)?;
    let (dnm, s_nm) = specialize(&s_n.sheaf, &image_flat(&dn, m)?)?;
    let path1 = compose(&dm.face_map, &dmn.face_map);
    let path2 = compose(&dn.face_map, &dnm.face_map);
    let one_shot = specialize_along(q, dmn.product_poset.clone(), &path1)?;
    let dims: Vec<[usize; 3]> = (0..q.poset().len())
        .map(|a| [s_mn.sheaf.dim(path1[a]), s_nm.sheaf.dim(path2[a]), one_shot.sheaf.dim(path1[a])])
        .collect();
    let same_partition = same_partition(&path1, &path2);
    let same_dims = dims.iter().all(|d| d[0] == d[1] && d[1] == d[2]);
    let all_validate = [&s_mn.sheaf, &s_nm.sheaf, &one_shot.sheaf].iter().all(|s| validate(s).ok);
    Ok(BispecReport {
        consistent: same_partition && same_dims && all_validate,
        same_partition,
        same_dims,
        all_validate,
        dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{corpus, enumerate_faces, intersection_poset};
    use crate::hypsheaf::constant_sheaf;
    use crate::hypsheaf::corpus::sheaves;

    #[test]
    fn trivial_flats_are_identities() {
        for (name, q) in sheaves() {
            let arr = q.arrangement().clone();
            let all: Vec<usize> = (0..arr.len()).collect();
            for l in [flat_from_hyperplanes(&arr, &[]).unwrap(), flat_from_hyperplanes(&arr, &all).unwrap()] {
                let (_, s) = specialize(&q, &l).unwrap();
                assert_eq!(s.sheaf.dims(), q.dims(), "{name}");
                assert!(validate(&s.sheaf).ok, "{name}");
            }
        }
    }

    #[test]
    fn outputs_validate() {
        for (name, q) in sheaves() {
            for l in intersection_poset(q.arrangement()) {
                let (_, s) = specialize(&q, &l).unwrap();
                let r = validate(&s.sheaf);
                assert!(r.ok, "{name} along {:?}: {:?}", l.zero_set, r.first_failure());
            }
        }
    }

    #[test]
    fn a3_along_a_line() {
        let a = corpus::a3();
        let q = constant_sheaf(Arc::new(enumerate_faces(&a)));
        let l = flat_from_hyperplanes(&a, &[1]).unwrap();
        let (d, s) = specialize(&q, &l).unwrap();
        let before = crate::calculus::rgamma_compact(&q).unwrap();
        let after = crate::calculus::rgamma_compact(&s.sheaf).unwrap();
        assert_eq!(before.ranks, after.ranks);
        assert_eq!(d.product_poset.len(), 9);
    }

    #[test]
    fn braid_flag() {
        let a = corpus::braid3();
        let q = constant_sheaf(Arc::new(enumerate_faces(&a)));
        let flats = intersection_poset(&a);
        let line = flats.iter().find(|f| f.dim == 1).unwrap();
        let plane = flats.iter().find(|f| f.dim == 2).unwrap();
        let r = bispec_consistency(&q, line, plane).unwrap();
        assert!(r.consistent, "{r:?}");
    }
}
