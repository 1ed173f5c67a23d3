//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use common::{isomorphic_to_constant, isomorphic_to_skyscraper, oracle_faces};
use hypcalc::arrangement::{corpus, enumerate_faces, intersection_poset, Arrangement, Flat};
use hypcalc::calculus::{
    bispec_consistency, complex_statistics, fourier, fourier_cross_check_all, inclusion_exclusion_check,
    rgamma_compact, rgamma_full, specialize, vanishing_cycles, vanishing_instances, StalkSummary,
};
use hypcalc::hypsheaf::corpus::{sheaves, tilted_a1};
use hypcalc::hypsheaf::{constant_sheaf, direct_sum, skyscraper_sheaf, validate, HyperbolicSheaf};
use hypcalc::qlinalg::{q, Rational};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Laplacian observations gathered while the other criteria run.
#[derive(Default)]
struct LaplacianLog {
    entries: Vec<Value>,
    counterexamples: Vec<Value>,
}

impl LaplacianLog {
    fn record(&mut self, context: String, s: &StalkSummary) {
        let entry = json!({ "context": context, "dim": s.dim, "laplacian_invertible": s.laplacian_invertible });
        if s.laplacian_invertible.values().any(|&ok| !ok) {
            self.counterexamples.push(entry.clone());
        }
        self.entries.push(entry);
    }
}

fn face_sum_sign(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn criterion_1() -> Outcome {
    let expected =
        [("A1", 3, vec![1, 2]), ("A2", 9, vec![1, 4, 4]), ("A3", 13, vec![1, 6, 6]), ("Braid3", 13, vec![0, 1, 6, 6])];
    let all = corpus::all();
    for (name, count, profile) in expected {
        let a = &all.iter().find(|(n, _)| *n == name).expect("corpus name").1;
        let p = enumerate_faces(a);
        let mut by_dim = vec![0usize; a.dim() + 1];
        p.faces.iter().for_each(|f| by_dim[f.dim] += 1);
        ensure!(p.len() == count && by_dim == profile, "{name}: {} faces, profile {by_dim:?}", p.len());
    }
    let mut oracle_checked = 0;
    for (name, a) in &all {
        let p = enumerate_faces(a);
        ensure!(p.euler_sum() == face_sum_sign(a.dim()), "{name}: Euler sum {}", p.euler_sum());
        if a.len() <= 6 {
            let got: BTreeMap<Vec<i8>, usize> = p.faces.iter().map(|f| (f.signs.clone(), f.dim)).collect();
            ensure!(got == oracle_faces(a), "{name}: faces disagree with the sign-vector oracle");
            oracle_checked += 1;
        }
    }
    Ok(format!("{} arrangements, {oracle_checked} checked against the oracle", all.len()))
}

fn criterion_2() -> Outcome {
    let mut diamonds = 0;
    for (name, a) in corpus::all() {
        let p = enumerate_faces(&a);
        for (lo, hi, mid) in p.length_two_intervals() {
            ensure!(mid.len() == 2, "{name}: interval {}..{} is not a diamond", p.sign_string(lo), p.sign_string(hi));
            let prod =
                p.incidence(lo, mid[0]) * p.incidence(mid[0], hi) * p.incidence(lo, mid[1]) * p.incidence(mid[1], hi);
            ensure!(prod == -1, "{name}: diamond {}..{} has sign product {prod}", p.sign_string(lo), p.sign_string(hi));
            diamonds += 1;
        }
    }
    let (built, failed) = complex_statistics();
    ensure!(failed == 0, "{failed} complexes failed d^2 = 0");
    ensure!(built >= 10_000, "only {built} complexes were constructed");
    Ok(format!("{diamonds} diamonds, {built} complexes, 0 failures"))
}

fn mutated(t: &HyperbolicSheaf, ci: usize, in_gamma: bool, r: usize, c: usize, v: Rational) -> HyperbolicSheaf {
    let mut gamma = t.gamma_matrices().to_vec();
    let mut delta = t.delta_matrices().to_vec();
    let m = if in_gamma { &mut gamma[ci] } else { &mut delta[ci] };
    m.set(r, c, v);
    HyperbolicSheaf::new(t.poset().clone(), t.dims().to_vec(), gamma, delta).expect("same shapes")
}

fn criterion_3() -> Outcome {
    let t = tilted_a1();
    let p = t.poset().clone();
    let c = constant_sheaf(p.clone());
    let s = skyscraper_sheaf(p.clone());
    let base = [("constant", c), ("skyscraper", s), ("tilted", t.clone())];
    let mut accepted = 0;
    for (i, (n1, q1)) in base.iter().enumerate() {
        ensure!(validate(q1).ok, "{n1} rejected");
        for (n2, q2) in &base[i..] {
            ensure!(validate(&direct_sum(q1, q2).expect("same poset")).ok, "{n1} + {n2} rejected");
            accepted += 1;
        }
    }
    for (name, q) in sheaves() {
        ensure!(validate(&q).ok, "{name} rejected");
        accepted += 1;
    }
    let mut caught = 0;
    for (ci, &(a, b)) in p.covers.iter().enumerate() {
        for in_gamma in [true, false] {
            let m = if in_gamma { &t.gamma_matrices()[ci] } else { &t.delta_matrices()[ci] };
            for r in 0..m.rows() {
                for col in 0..m.cols() {
                    for v in [q(0), q(2), q(-1), m.get(r, col) + q(1)] {
                        if &v == m.get(r, col) {
                            continue;
                        }
                        let bad = mutated(&t, ci, in_gamma, r, col, v);
                        if (bad.gamma_cover(a, b) * bad.delta_cover(a, b)).is_identity() {
                            continue;
                        }
                        let report = validate(&bad);
                        let named = report.check("axiom_i").and_then(|c| c.failure.as_ref()).map(|f| f.faces.clone());
                        ensure!(
                            !report.ok && named == Some(vec![a, b]),
                            "mutation of cover {}->{} not caught with that pair: {named:?}",
                            p.sign_string(a),
                            p.sign_string(b)
                        );
                        caught += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{accepted} valid sheaves accepted, {caught} mutations caught and named"))
}

fn criterion_4(log: &mut LaplacianLog) -> Outcome {
    let mut instances = 0;
    for (name, q) in sheaves() {
        let dual = q.verdier_dual();
        for (l, f, a) in vanishing_instances(q.poset()) {
            let ctx = format!("{name} f={} at {}", fmt_vec(&f), q.poset().sign_string(a));
            let v = vanishing_cycles(&q, &f, a).map_err(|e| format!("{ctx}: {e}"))?;
            ensure!(v.gamma_acyclic() && v.delta_acyclic(), "{ctx}: not acyclic");
            let (g0, d0) = (v.stalk.gamma_report.rank(0), v.stalk.delta_report.rank(0));
            ensure!(g0 == d0, "{ctx}: H0 ranks {g0} and {d0} differ");
            let vd = vanishing_cycles(&dual, &f, a).map_err(|e| format!("{ctx} (dual): {e}"))?;
            ensure!(vd.dim == v.dim, "{ctx}: dual sheaf gives {} instead of {}", vd.dim, v.dim);
            log.record(format!("vanishing {ctx} flat {:?}", l.zero_set), &v.stalk.summary());
            instances += 1;
        }
    }
    let p = Arc::new(enumerate_faces(&corpus::a1()));
    let x = [q(1)];
    for (name, sheaf, want) in [
        ("constant", constant_sheaf(p.clone()), 0),
        ("skyscraper", skyscraper_sheaf(p.clone()), 1),
        ("tilted", tilted_a1(), 1),
    ] {
        let got = vanishing_cycles(&sheaf, &x, 0).map_err(|e| e.to_string())?.dim;
        ensure!(got == want, "{name}: vanishing cycles at the origin have dimension {got}, expected {want}");
    }
    ensure!(instances > 0, "no admissible instances");
    Ok(format!("{instances} (sheaf, flat, f, face) instances acyclic"))
}

fn fmt_vec(v: &[Rational]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn extreme_flats(a: &Arrangement) -> (Flat, Flat) {
    let flats = intersection_poset(a);
    let lo = flats.iter().min_by_key(|f| f.dim).expect("flats").clone();
    let hi = flats.iter().max_by_key(|f| f.dim).expect("flats").clone();
    (lo, hi)
}

fn criterion_5(log: &mut LaplacianLog) -> Outcome {
    let mut pairs = 0;
    for (name, q) in sheaves() {
        let (lo, hi) = extreme_flats(q.arrangement());
        for l in intersection_poset(q.arrangement()) {
            let ctx = format!("{name} along {:?}", l.zero_set);
            let (_, s) = specialize(&q, &l).map_err(|e| format!("{ctx}: {e}"))?;
            let r = validate(&s.sheaf);
            ensure!(r.ok, "{ctx}: output fails {:?}", r.first_failure().map(|c| c.name));
            for st in &s.stalks {
                ensure!(st.gamma_report.rank(0) == st.delta_report.rank(0), "{ctx}: fiber ranks differ");
            }
            if l == lo || l == hi {
                ensure!(s.sheaf.dims() == q.dims(), "{ctx}: trivial flat changed the stalks");
            }
            for fs in s.fiber_summaries() {
                log.record(format!("specialization {ctx} over {}", fs.face), &fs.stalk);
            }
            pairs += 1;
        }
    }
    let mut flags = 0;
    for (name, q) in sheaves() {
        if !["A2", "A3", "Braid3"].iter().any(|a| name.ends_with(&format!("/{a}"))) {
            continue;
        }
        let flats = intersection_poset(q.arrangement());
        for n in &flats {
            for m in flats.iter().filter(|m| n.is_subflat_of(m)) {
                let r = bispec_consistency(&q, n, m).map_err(|e| format!("{name}: {e}"))?;
                ensure!(r.consistent, "{name}: flag {:?} in {:?} inconsistent", n.zero_set, m.zero_set);
                flags += 1;
            }
        }
    }
    Ok(format!("{pairs} (sheaf, flat) pairs validate, {flags} flags consistent"))
}

fn criterion_6(log: &mut LaplacianLog) -> Outcome {
    let (mut transforms, mut faces) = (0, 0);
    for (name, q) in sheaves() {
        if !q.arrangement().is_essential() {
            continue;
        }
        let ft = fourier(&q).map_err(|e| format!("{name}: {e}"))?;
        let r = validate(&ft.sheaf);
        ensure!(r.ok, "{name}: transform fails {:?}", r.first_failure().map(|c| c.name));
        let origin = ft.sheaf.poset().minimal_face();
        ensure!(ft.sheaf.dim(origin) == q.dim(q.poset().minimal_face()), "{name}: stalk at the dual origin differs");
        for (face, s) in ft.stalk_summaries() {
            log.record(format!("fourier {name} at {face}"), &s);
        }
        for cc in fourier_cross_check_all(&q).map_err(|e| format!("{name}: {e}"))? {
            ensure!(cc.agrees, "{name}: cross check fails at {}", cc.face);
            faces += 1;
        }
        transforms += 1;
    }
    for a in [corpus::a1(), corpus::a2(), corpus::a3()] {
        let p = Arc::new(enumerate_faces(&a));
        let desc = a.describe().join(" ");
        let fc = fourier(&constant_sheaf(p.clone())).map_err(|e| e.to_string())?;
        ensure!(isomorphic_to_skyscraper(&fc.sheaf), "[{desc}]: transform of the constant sheaf is not a skyscraper");
        let fs = fourier(&skyscraper_sheaf(p)).map_err(|e| e.to_string())?;
        ensure!(isomorphic_to_constant(&fs.sheaf), "[{desc}]: transform of the skyscraper is not constant");
    }
    Ok(format!("{transforms} transforms validate, {faces} dual faces cross-checked"))
}

fn criterion_7() -> Outcome {
    let cases = [("A1", corpus::a1()), ("A2", corpus::a2()), ("A3", corpus::a3()), ("FourLines", corpus::four_lines())];
    for (name, a) in &cases {
        ensure!(inclusion_exclusion_check(a).map_err(|e| e.to_string())?, "{name}: identity fails");
    }
    Ok(format!("{} arrangements", cases.len()))
}

fn criterion_8() -> Outcome {
    for (name, a) in corpus::all() {
        let n = a.dim() as i32;
        let c = constant_sheaf(Arc::new(enumerate_faces(&a)));
        let compact = rgamma_compact(&c).map_err(|e| e.to_string())?;
        let full = rgamma_full(&c).map_err(|e| e.to_string())?;
        ensure!(compact.concentrated_in(n) && compact.rank(n) == 1, "{name}: compact {:?}", compact.ranks);
        ensure!(full.concentrated_in(-n) && full.rank(-n) == 1, "{name}: full {:?}", full.ranks);
    }
    let mut count = 0;
    for (name, q) in sheaves() {
        let full = rgamma_full(&q).map_err(|e| e.to_string())?;
        let dual = rgamma_compact(&q.verdier_dual()).map_err(|e| e.to_string())?;
        let n = q.arrangement().dim() as i32;
        for d in -n..=n {
            ensure!(full.rank(d) == dual.rank(-d), "{name}: degree {d} not mirrored");
        }
        count += 1;
    }
    Ok(format!("{count} sheaves mirrored"))
}

fn criterion_9(log: &LaplacianLog) -> Outcome {
    let report = json!({
        "stalks": log.entries.len(),
        "counterexamples": log.counterexamples,
        "entries": log.entries,
    });
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("laplacian_report.json");
    std::fs::write(&out, serde_json::to_string_pretty(&report).expect("json")).map_err(|e| e.to_string())?;
    if !log.counterexamples.is_empty() {
        let fixture = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/laplacian_counterexamples.json");
        std::fs::write(&fixture, serde_json::to_string_pretty(&log.counterexamples).expect("json"))
            .map_err(|e| e.to_string())?;
    }
    ensure!(!log.entries.is_empty(), "no stalks were logged");
    Ok(format!(
        "{} stalks logged, {} with a non-invertible Laplacian, report at {}",
        log.entries.len(),
        log.counterexamples.len(),
        out.display()
    ))
}

fn run(n: usize, f: impl FnOnce() -> Outcome) -> (usize, Outcome, f64) {
    let start = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    (n, r, start.elapsed().as_secs_f64())
}

fn main() {
    let mut log = LaplacianLog::default();
    let mut results = vec![
        run(1, criterion_1),
        run(3, criterion_3),
        run(4, || criterion_4(&mut log)),
        run(5, || criterion_5(&mut log)),
        run(6, || criterion_6(&mut log)),
        run(7, criterion_7),
        run(8, criterion_8),
    ];
    results.push(run(9, || criterion_9(&log)));
    // Runs last so the complex count covers the whole suite.
    results.push(run(2, criterion_2));
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, r, secs) in &results {
        match r {
            Ok(detail) => println!("criterion {n}: PASS ({secs:.2}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.2}s) {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
