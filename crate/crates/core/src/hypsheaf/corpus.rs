//! Reference sheaves used by tests, the acceptance suite and the CLI samples.

use super::{constant_sheaf, direct_sum, external_product, skyscraper_sheaf, HyperbolicSheaf};
use crate::arrangement::{corpus as arr, enumerate_faces, FacePoset};
use crate::qlinalg::Matrix;
use std::sync::Arc;

/// On the line: `E_0 = k²`, `E_± = k`, `γ_{0−} = [1 0]`, `γ_{0+} = [0 1]`, `δ_{±0} = (1, 1)ᵀ`.
pub fn tilted_a1() -> HyperbolicSheaf {
    let poset = Arc::new(enumerate_faces(&arr::a1()));
    tilted_on(poset)
}

/// The tilted sheaf on a given copy of the A1 poset.
pub fn tilted_on(poset: Arc<FacePoset>) -> HyperbolicSheaf {
    let minus = poset.parse_face("-").expect("A1 face");
    let mut gamma = Vec::new();
    let mut delta = Vec::new();
    for &(_, b) in &poset.covers {
        gamma.push(if b == minus { Matrix::from_i64(&[&[1, 0]]) } else { Matrix::from_i64(&[&[0, 1]]) });
        delta.push(Matrix::from_i64(&[&[1], &[1]]));
    }
    HyperbolicSheaf::new(poset, vec![2, 1, 1], gamma, delta).expect("tilted shapes")
}

/// Named sheaves covering every corpus arrangement plus products of the tilted sheaf.
pub fn sheaves() -> Vec<(String, HyperbolicSheaf)> {
    let mut out = Vec::new();
    for (name, a) in arr::all() {
        let p = Arc::new(enumerate_faces(&a));
        let c = constant_sheaf(p.clone());
        let s = skyscraper_sheaf(p.clone());
        out.push((format!("constant/{name}"), c.clone()));
        out.push((format!("skyscraper/{name}"), s.clone()));
        out.push((format!("constant+skyscraper/{name}"), direct_sum(&c, &s).expect("same poset")));
    }
    let t = tilted_a1();
    let c1 = constant_sheaf(t.poset().clone());
    let s1 = skyscraper_sheaf(t.poset().clone());
    out.push(("tilted/A1".into(), t.clone()));
    out.push(("tilted-dual/A1".into(), t.verdier_dual()));
    out.push(("tilted+constant/A1".into(), direct_sum(&t, &c1).expect("same poset")));
    out.push(("tilted*constant/A2".into(), external_product(&t, &c1)));
    out.push(("skyscraper*tilted/A2".into(), external_product(&s1, &t)));
    out.push(("tilted*tilted-dual/A2".into(), external_product(&t, &t.verdier_dual())));
    out
}

/// The corpus restricted to sheaves on essential arrangements of dimension at most two.
pub fn planar_sheaves() -> Vec<(String, HyperbolicSheaf)> {
    sheaves().into_iter().filter(|(_, q)| q.arrangement().dim() <= 2).collect()
}
