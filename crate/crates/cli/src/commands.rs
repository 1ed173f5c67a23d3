use crate::{Command, Common, Failure};
use hypcalc::arrangement::{
    dual_arrangement, enumerate_faces, flat_from_hyperplanes, monotone_cones_check, Arrangement, FacePoset, Flat,
};
use hypcalc::calculus::{
    bispec_consistency, double_fourier_experiment, ensure_valid, fourier, fourier_cross_check_all,
    hyperbolic_from_stalks, inclusion_exclusion_check, microlocalize_experimental, ordinary_stalk, rgamma_compact,
    rgamma_compact_complex, rgamma_full, rgamma_full_complex, specialize, vanishing_cycles,
};
use hypcalc::hypsheaf::{sheaf_from_json, validate, write_sheaf, HyperbolicSheaf, SheafFile};
use hypcalc::qlinalg::{cohomology, format_rational, parse_rational, CohomologyReport, Rational};
use serde_json::{json, Value};
use std::path::Path;

type Outcome = Result<Value, Failure>;

enum Input {
    Arrangement(Arrangement),
    Sheaf(HyperbolicSheaf),
}

fn load(path: &Path) -> Result<Input, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| Failure::Input(format!("{}: {e}", path.display()));
    if value.get("arrangement").is_some() {
        let file: SheafFile = serde_json::from_value(value).map_err(bad)?;
        Ok(Input::Sheaf(sheaf_from_json(&file)?))
    } else {
        Ok(Input::Arrangement(serde_json::from_value(value).map_err(bad)?))
    }
}

fn load_arrangement(path: &Path) -> Result<Arrangement, Failure> {
    Ok(match load(path)? {
        Input::Arrangement(a) => a,
        Input::Sheaf(q) => q.arrangement().clone(),
    })
}

fn load_sheaf(path: &Path) -> Result<HyperbolicSheaf, Failure> {
    match load(path)? {
        Input::Sheaf(q) => Ok(q),
        Input::Arrangement(_) => {
            Err(Failure::Input(format!("{}: expected a sheaf file, found a bare arrangement", path.display())))
        }
    }
}

fn parse_face(p: &FacePoset, s: &str) -> Result<usize, Failure> {
    p.parse_face(s).map_err(|e| Failure::Input(e.to_string()))
}

fn parse_covector(arr: &Arrangement, s: &str) -> Result<Vec<Rational>, Failure> {
    let v: Vec<Rational> = s
        .split(',')
        .map(|x| parse_rational(x.trim()).ok_or_else(|| Failure::Input(format!("bad rational {x:?} in covector"))))
        .collect::<Result<_, _>>()?;
    if v.len() != arr.dim() {
        return Err(Failure::Input(format!("covector has {} entries, the space has dimension {}", v.len(), arr.dim())));
    }
    Ok(v)
}

fn parse_flat(arr: &Arrangement, s: &str) -> Result<Flat, Failure> {
    let idx: Vec<usize> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Failure::Input(format!("bad hyperplane index {x:?}"))))
        .collect::<Result<_, _>>()?;
    if let Some(&bad) = idx.iter().find(|&&i| i >= arr.len()) {
        return Err(Failure::Input(format!("hyperplane index {bad} out of range (arrangement has {})", arr.len())));
    }
    Ok(flat_from_hyperplanes(arr, &idx)?)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn ranks(r: &CohomologyReport) -> Value {
    let nonzero: serde_json::Map<String, Value> =
        r.ranks.iter().filter(|(_, &v)| v > 0).map(|(k, v)| (k.to_string(), json!(v))).collect();
    Value::Object(nonzero)
}

fn face_dims(q: &HyperbolicSheaf) -> Value {
    let p = q.poset();
    Value::Object((0..p.len()).map(|i| (p.sign_string(i), json!(q.dim(i)))).collect())
}

fn save(q: &HyperbolicSheaf, common: &Common) -> Result<Option<String>, Failure> {
    match &common.output {
        Some(path) => {
            write_sheaf(q, path)?;
            Ok(Some(path.display().to_string()))
        }
        None => Ok(None),
    }
}

fn parity(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn mirrored(q: &HyperbolicSheaf) -> Result<bool, Failure> {
    let full = rgamma_full(q)?;
    let dual = rgamma_compact(&q.verdier_dual())?;
    let n = q.arrangement().dim() as i32;
    Ok((-n..=n).all(|d| full.rank(d) == dual.rank(-d)))
}

fn faces(path: &Path) -> Outcome {
    let a = load_arrangement(path)?;
    let p = enumerate_faces(&a);
    let mut profile = vec![0usize; a.dim() + 1];
    p.faces.iter().for_each(|f| profile[f.dim] += 1);
    let list: Vec<Value> = p
        .faces
        .iter()
        .enumerate()
        .map(|(i, f)| {
            json!({
                "signs": p.sign_string(i),
                "dim": f.dim,
                "interior_point": f.interior_point.iter().map(format_rational).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "arrangement": a.describe(),
        "dim": a.dim(),
        "count": p.len(),
        "profile": profile,
        "euler_sum": p.euler_sum(),
        "covering_pairs": p.covers.len(),
        "faces": list,
        "checks": { "euler_relation": p.euler_sum() == parity(a.dim()), "diamonds": p.diamond_check() },
    }))
}

fn dual(path: &Path) -> Outcome {
    let a = load_arrangement(path)?;
    let d = dual_arrangement(&a)?;
    let primal = enumerate_faces(&a);
    let dp = enumerate_faces(&d);
    Ok(json!({
        "arrangement": a.describe(),
        "dual": d.describe(),
        "dual_faces": (0..dp.len()).map(|i| dp.sign_string(i)).collect::<Vec<_>>(),
        "checks": { "monotone_cones": monotone_cones_check(&primal, &dp) },
    }))
}

fn validate_cmd(path: &Path) -> Outcome {
    let q = load_sheaf(path)?;
    let r = validate(&q);
    let value = to_value(&r);
    match r.first_failure() {
        None => Ok(value),
        Some(c) => {
            let f = c.failure.as_ref().expect("failed checks carry a witness");
            Err(Failure::Domain(
                format!("invalid sheaf: {} fails at faces {:?}: {}", c.name, f.signs, f.detail),
                Some(value),
            ))
        }
    }
}

fn rgamma(path: &Path, compact: bool) -> Outcome {
    let q = load_sheaf(path)?;
    ensure_valid(&q)?;
    let cx = if compact { rgamma_compact_complex(&q)? } else { rgamma_full_complex(&q)? };
    let r = cohomology(&cx.complex, false)?;
    Ok(json!({
        "supports": if compact { "compact" } else { "full" },
        "ranks": ranks(&r),
        "euler_characteristic": r.euler_characteristic(),
        "complex": to_value(&cx.complex),
        "checks": { "verdier_mirror": mirrored(&q)? },
    }))
}

fn stalk(path: &Path, face: &str) -> Outcome {
    let q = load_sheaf(path)?;
    let a = parse_face(q.poset(), face)?;
    let ordinary = ordinary_stalk(&q, a)?;
    let rebuilt = hyperbolic_from_stalks(&q, a)?;
    let reconstructs = rebuilt.concentrated_in(0) && rebuilt.rank(0) == q.dim(a);
    Ok(json!({
        "face": q.poset().sign_string(a),
        "dim": q.dim(a),
        "ordinary_stalk": ranks(&ordinary),
        "from_stalks": ranks(&rebuilt),
        "checks": { "reconstructs": reconstructs },
    }))
}

fn vanish(path: &Path, f: &str, face: &str) -> Outcome {
    let q = load_sheaf(path)?;
    ensure_valid(&q)?;
    let f = parse_covector(q.arrangement(), f)?;
    let a = parse_face(q.poset(), face)?;
    let v = vanishing_cycles(&q, &f, a)?;
    let laplacian: serde_json::Map<String, Value> =
        v.stalk.laplacian.iter().map(|(k, ok)| (k.to_string(), json!(ok))).collect();
    Ok(json!({
        "dim": v.dim,
        "gamma_acyclic": v.gamma_acyclic(),
        "delta_acyclic": v.delta_acyclic(),
        "laplacian_iso": laplacian,
        "gamma_ranks": ranks(&v.stalk.gamma_report),
        "delta_ranks": ranks(&v.stalk.delta_report),
        "anchor_independent": v.stalk.anchor_independent,
    }))
}

fn specialize_cmd(path: &Path, flat: &str, common: &Common) -> Outcome {
    let q = load_sheaf(path)?;
    let l = parse_flat(q.arrangement(), flat)?;
    let (d, s) = specialize(&q, &l)?;
    let r = validate(&s.sheaf);
    Ok(json!({
        "flat": { "zero_set": l.zero_set, "dim": l.dim },
        "product": d.product.describe(),
        "dims": face_dims(&s.sheaf),
        "fibers": to_value(&s.fiber_summaries()),
        "output": save(&s.sheaf, common)?,
        "checks": { "validates": r.ok, "first_failure": r.first_failure().map(|c| c.name) },
    }))
}

fn bispec(path: &Path, n: &str, m: &str) -> Outcome {
    let q = load_sheaf(path)?;
    let n = parse_flat(q.arrangement(), n)?;
    let m = parse_flat(q.arrangement(), m)?;
    let r = bispec_consistency(&q, &n, &m)?;
    Ok(json!({
        "flat_n": n.zero_set,
        "flat_m": m.zero_set,
        "report": to_value(&r),
    }))
}

fn fourier_cmd(path: &Path, common: &Common) -> Outcome {
    let q = load_sheaf(path)?;
    let ft = fourier(&q)?;
    let r = validate(&ft.sheaf);
    let (origin, dual_origin) = (q.poset().minimal_face(), ft.sheaf.poset().minimal_face());
    Ok(json!({
        "dual": ft.sheaf.arrangement().describe(),
        "dims": face_dims(&ft.sheaf),
        "stalks": to_value(&ft.stalk_summaries()),
        "output": save(&ft.sheaf, common)?,
        "checks": {
            "validates": r.ok,
            "dual_origin_matches_origin": ft.sheaf.dim(dual_origin) == q.dim(origin),
        },
    }))
}

fn fourier_check(path: &Path) -> Outcome {
    let q = load_sheaf(path)?;
    let checks = fourier_cross_check_all(&q)?;
    Ok(json!({
        "all_agree": checks.iter().all(|c| c.agrees),
        "faces": to_value(&checks),
    }))
}

fn microlocalize(path: &Path, flat: &str, common: &Common) -> Outcome {
    let q = load_sheaf(path)?;
    let l = parse_flat(q.arrangement(), flat)?;
    let r = microlocalize_experimental(&q, &l)?;
    let output = match &r.sheaf {
        Some(s) => save(s, common)?,
        None => None,
    };
    let mut value = to_value(&r);
    value["flat"] = json!({ "zero_set": l.zero_set, "dim": l.dim });
    value["output"] = json!(output);
    value["experimental"] = json!(true);
    Ok(value)
}

fn check_identities(path: &Path) -> Outcome {
    let q = load_sheaf(path)?;
    ensure_valid(&q)?;
    let p = q.poset();
    let reconstruction = (0..p.len())
        .map(|a| hyperbolic_from_stalks(&q, a).map(|r| r.concentrated_in(0) && r.rank(0) == q.dim(a)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = json!({
        "verdier_mirror": mirrored(&q)?,
        "stalk_reconstruction": reconstruction.iter().all(|&ok| ok),
    });
    if q.arrangement().is_essential() {
        out["fourier_cross_check"] = json!(fourier_cross_check_all(&q)?.iter().all(|c| c.agrees));
        out["inclusion_exclusion"] = json!(inclusion_exclusion_check(q.arrangement())?);
        out["double_fourier_experiment"] = to_value(&double_fourier_experiment(&q)?);
    } else {
        out["fourier"] = json!("skipped: the arrangement is not essential");
    }
    Ok(out)
}

/// Runs one subcommand and returns its structured result.
pub fn run(command: &Command, common: &Common) -> Outcome {
    match command {
        Command::Faces { input } => faces(input),
        Command::Dual { input } => dual(input),
        Command::Validate { input } => validate_cmd(input),
        Command::Rgamma { input, compact, .. } => rgamma(input, *compact),
        Command::Stalk { input, face } => stalk(input, face),
        Command::Vanish { input, f, face } => vanish(input, f, face),
        Command::Specialize { input, flat } => specialize_cmd(input, flat, common),
        Command::Bispec { input, flat_n, flat_m } => bispec(input, flat_n, flat_m),
        Command::Fourier { input } => fourier_cmd(input, common),
        Command::FourierCheck { input } => fourier_check(input),
        Command::Microlocalize { input, flat } => microlocalize(input, flat, common),
        Command::CheckIdentities { input } => check_identities(input),
    }
}

fn short(v: &Value) -> String {
    let text = match v {
        Value::Array(a) if a.len() > 6 => format!("[{} items]", a.len()),
        Value::Object(o) if o.len() > 6 => format!("{{{} entries}}", o.len()),
        other => other.to_string(),
    };
    match text.char_indices().nth(72) {
        Some((cut, _)) => format!("{}...", &text[..cut]),
        None => text,
    }
}

/// Two-column summary of the report on stderr.
pub fn print_table(report: &Value) {
    let mut rows: Vec<(String, String)> = vec![("status".into(), short(&report["status"]))];
    if let Value::Object(result) = &report["result"] {
        for (k, v) in result {
            match v {
                Value::Object(inner) if inner.len() <= 6 => {
                    rows.extend(inner.iter().map(|(k2, v2)| (format!("{k}.{k2}"), short(v2))));
                }
                _ => rows.push((k.clone(), short(v))),
            }
        }
    }
    if let Some(e) = report.get("error") {
        rows.push(("error".into(), short(e)));
    }
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    for (k, v) in rows {
        eprintln!("{k:width$}  {v}");
    }
}
