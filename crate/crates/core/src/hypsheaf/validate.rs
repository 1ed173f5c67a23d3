use super::HyperbolicSheaf;
use crate::qlinalg::{rank, Matrix};
use rayon::prelude::*;
use serde::Serialize;

/// A violated instance: the faces involved and what went wrong.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub faces: Vec<usize>,
    pub signs: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub instances: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// First failing check, if any.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn run<T: Sync>(
    q: &HyperbolicSheaf,
    name: &'static str,
    instances: &[T],
    test: impl Fn(&T) -> Option<(Vec<usize>, String)> + Sync,
) -> Check {
    let failure = instances.par_iter().map(&test).find_first(Option::is_some).flatten().map(|(faces, detail)| {
        Failure { signs: faces.iter().map(|&f| q.poset().sign_string(f)).collect(), faces, detail }
    });
    Check { name, passed: failure.is_none(), instances: instances.len(), failure }
}

fn is_invertible(m: &Matrix) -> bool {
    m.rows() == m.cols() && rank(m) == m.rows()
}

/// Checks functoriality, axioms (i)–(iii) and the rank consequences.
pub fn validate(q: &HyperbolicSheaf) -> ValidationReport {
    let p = q.poset().clone();
    let n = p.len();
    let intervals = p.length_two_intervals();
    let comparable: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| p.leq(a, b)).collect();
    let all_pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let mut checks = Vec::new();

    checks.push(run(q, "gamma_functoriality", &intervals, |(a, d, mid)| {
        let first = q.gamma_cover(mid[0], *d) * q.gamma_cover(*a, mid[0]);
        mid[1..]
            .iter()
            .find(|&&c| q.gamma_cover(c, *d) * q.gamma_cover(*a, c) != first)
            .map(|&c| (vec![*a, mid[0], c, *d], "gamma composites around the diamond differ".to_string()))
    }));
    checks.push(run(q, "delta_functoriality", &intervals, |(a, d, mid)| {
        let first = q.delta_cover(*a, mid[0]) * q.delta_cover(mid[0], *d);
        mid[1..]
            .iter()
            .find(|&&c| q.delta_cover(*a, c) * q.delta_cover(c, *d) != first)
            .map(|&c| (vec![*a, mid[0], c, *d], "delta composites around the diamond differ".to_string()))
    }));
    checks.push(run(q, "axiom_i", &comparable, |&(b, a)| {
        let m = &q.gamma(b, a) * &q.delta(a, b);
        (!m.is_identity()).then(|| (vec![b, a], format!("gamma_BA * delta_AB = {m:?} is not the identity")))
    }));
    checks.push(run(q, "flop_well_defined", &all_pairs, |&(a, b)| {
        let lower: Vec<usize> = (0..n).filter(|&c| p.leq(c, a) && p.leq(c, b)).collect();
        let reference = &q.gamma(lower[0], b) * &q.delta(a, lower[0]);
        lower[1..]
            .iter()
            .find(|&&c| &q.gamma(c, b) * &q.delta(a, c) != reference)
            .map(|&c| (vec![a, b, lower[0], c], "flop depends on the lower bound".to_string()))
    }));
    let triples = p.collinear_triples();
    checks.push(run(q, "axiom_ii", triples, |&(a, b, c)| {
        let lhs = q.flop(a, c);
        let rhs = &q.flop(b, c) * &q.flop(a, b);
        (lhs != rhs).then(|| (vec![a, b, c], "phi_AC differs from phi_BC * phi_AB".to_string()))
    }));
    let neighbors: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|w| {
            let up = p.upper_covers(w);
            let p = &p;
            up.iter()
                .flat_map(move |&a| up.iter().map(move |&b| (a, b, w)))
                .filter(move |&(a, b, _)| a != b && p.face(a).zero_set() == p.face(b).zero_set())
        })
        .collect();
    checks.push(run(q, "axiom_iii", &neighbors, |&(a, b, w)| {
        let f = q.flop(a, b);
        (!is_invertible(&f)).then(|| (vec![a, b, w], format!("flop across the wall is not invertible: {f:?}")))
    }));
    checks.push(run(q, "gamma_surjective", &comparable, |&(a, b)| {
        (rank(&q.gamma(a, b)) != q.dim(b)).then(|| (vec![a, b], "gamma is not surjective".to_string()))
    }));
    checks.push(run(q, "delta_injective", &comparable, |&(a, b)| {
        (rank(&q.delta(b, a)) != q.dim(b)).then(|| (vec![b, a], "delta is not injective".to_string()))
    }));
    let ok = checks.iter().all(|c| c.passed);
    ValidationReport { ok, checks }
}
