use super::HyperbolicSheaf;
use crate::arrangement::{enumerate_faces, Arrangement};
use crate::error::{Error, Result};
use crate::qlinalg::{format_rational, parse_rational, Matrix, Rational};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

/// On-disk layout of a sheaf. Matrices are row-major arrays of rationals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SheafFile {
    pub arrangement: Arrangement,
    pub faces: Vec<String>,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub gamma: BTreeMap<String, Value>,
    #[serde(default)]
    pub delta: BTreeMap<String, Value>,
}

fn matrix_to_value(m: &Matrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| Value::String(format_rational(x))).collect()))
            .collect(),
    )
}

fn value_to_matrix(v: &Value, rows: usize, cols: usize, what: &str) -> Result<Matrix> {
    let bad = |msg: &str| Error::Format(format!("{what}: {msg}"));
    let arr = v.as_array().ok_or_else(|| bad("matrix must be an array of rows"))?;
    if arr.len() != rows {
        return Err(bad(&format!("has {} rows, expected shape {rows}x{cols}", arr.len())));
    }
    let mut out = Vec::with_capacity(rows);
    for r in arr {
        let r = r.as_array().ok_or_else(|| bad("row must be an array"))?;
        if r.len() != cols {
            return Err(bad(&format!("row of length {}, expected shape {rows}x{cols}", r.len())));
        }
        let row: Result<Vec<Rational>> = r
            .iter()
            .map(|x| match x {
                Value::String(s) => parse_rational(s).ok_or_else(|| bad(&format!("bad rational {s:?}"))),
                Value::Number(n) => n
                    .as_i64()
                    .map(crate::qlinalg::q)
                    .or_else(|| parse_rational(&n.to_string()))
                    .ok_or_else(|| bad(&format!("bad number {n}"))),
                _ => Err(bad("entries must be strings or numbers")),
            })
            .collect();
        out.push(row?);
    }
    Ok(Matrix::from_rows_with_cols(out, cols))
}

/// Serializable form of a sheaf, faces in poset order.
pub fn sheaf_to_json(q: &HyperbolicSheaf) -> SheafFile {
    let p = q.poset();
    let mut gamma = BTreeMap::new();
    let mut delta = BTreeMap::new();
    for (i, &(a, b)) in p.covers.iter().enumerate() {
        let g = &q.gamma_matrices()[i];
        let d = &q.delta_matrices()[i];
        if g.rows() * g.cols() > 0 {
            gamma.insert(format!("{a}->{b}"), matrix_to_value(g));
        }
        if d.rows() * d.cols() > 0 {
            delta.insert(format!("{b}->{a}"), matrix_to_value(d));
        }
    }
    SheafFile {
        arrangement: p.arrangement.clone(),
        faces: (0..p.len()).map(|i| p.sign_string(i)).collect(),
        dims: q.dims().to_vec(),
        gamma,
        delta,
    }
}

fn parse_key(key: &str) -> Option<(usize, usize)> {
    let (a, b) = key.split_once("->")?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Rebuilds a sheaf, checking faces against the arrangement and matrix shapes.
pub fn sheaf_from_json(file: &SheafFile) -> Result<HyperbolicSheaf> {
    let poset = Arc::new(enumerate_faces(&file.arrangement));
    if file.dims.len() != file.faces.len() {
        return Err(Error::Format(format!("{} dims for {} faces", file.dims.len(), file.faces.len())));
    }
    let expected: BTreeSet<String> = (0..poset.len()).map(|i| poset.sign_string(i)).collect();
    let given: BTreeSet<String> = file.faces.iter().cloned().collect();
    if given.len() != file.faces.len() || expected != given {
        let missing: Vec<_> = expected.difference(&given).cloned().collect();
        let extra: Vec<_> = given.difference(&expected).cloned().collect();
        return Err(Error::Format(format!(
            "face list does not match the arrangement: missing {missing:?}, extra {extra:?}{}",
            if given.len() != file.faces.len() { ", duplicates present" } else { "" }
        )));
    }
    let to_poset: Vec<usize> = file.faces.iter().map(|s| poset.parse_face(s).expect("checked above")).collect();
    let mut dims = vec![0; poset.len()];
    for (i, &d) in file.dims.iter().enumerate() {
        dims[to_poset[i]] = d;
    }
    let mut gamma: Vec<Option<Matrix>> = vec![None; poset.covers.len()];
    let mut delta: Vec<Option<Matrix>> = vec![None; poset.covers.len()];
    for (table, is_gamma) in [(&file.gamma, true), (&file.delta, false)] {
        for (key, v) in table {
            let name = if is_gamma { "gamma" } else { "delta" };
            let (x, y) =
                parse_key(key).ok_or_else(|| Error::Format(format!("{name} key {key:?} is not of the form i->j")))?;
            if x >= to_poset.len() || y >= to_poset.len() {
                return Err(Error::Format(format!("{name} key {key:?} refers to a missing face")));
            }
            let (a, b) = if is_gamma { (to_poset[x], to_poset[y]) } else { (to_poset[y], to_poset[x]) };
            let idx = poset
                .cover_index(a, b)
                .ok_or_else(|| Error::Format(format!("{name} key {key:?} is not a covering pair")))?;
            let what = format!("{name} on covering pair {key} ({} -> {})", file.faces[x], file.faces[y]);
            let (r, c) = if is_gamma { (dims[b], dims[a]) } else { (dims[a], dims[b]) };
            let m = value_to_matrix(v, r, c, &what)?;
            let slot = if is_gamma { &mut gamma[idx] } else { &mut delta[idx] };
            if slot.replace(m).is_some() {
                return Err(Error::Format(format!("{what} given twice")));
            }
        }
    }
    let fill = |slots: Vec<Option<Matrix>>, is_gamma: bool| -> Result<Vec<Matrix>> {
        slots
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                let (a, b) = poset.covers[i];
                let (r, c) = if is_gamma { (dims[b], dims[a]) } else { (dims[a], dims[b]) };
                match m {
                    Some(m) => Ok(m),
                    None if r * c == 0 => Ok(Matrix::zeros(r, c)),
                    None => Err(Error::Format(format!(
                        "{} matrix missing for covering pair {} -> {}",
                        if is_gamma { "gamma" } else { "delta" },
                        poset.sign_string(a),
                        poset.sign_string(b)
                    ))),
                }
            })
            .collect()
    };
    let gamma = fill(gamma, true)?;
    let delta = fill(delta, false)?;
    HyperbolicSheaf::new(poset, dims, gamma, delta).map_err(|e| Error::Format(e.to_string()))
}

/// Reads a sheaf file; returns the sheaf and the hash of its arrangement.
pub fn read_sheaf(path: impl AsRef<Path>) -> Result<(HyperbolicSheaf, String)> {
    let text = std::fs::read_to_string(path)?;
    let file: SheafFile = serde_json::from_str(&text)?;
    let q = sheaf_from_json(&file)?;
    let hash = q.arrangement().hash();
    Ok((q, hash))
}

pub fn write_sheaf(q: &HyperbolicSheaf, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&sheaf_to_json(q))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
