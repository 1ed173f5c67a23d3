//! Brute-force reference computations shared by the integration tests.
//! Nothing here calls the library's LP or face enumeration.

#![allow(dead_code)]

use hypcalc::arrangement::Arrangement;
use hypcalc::hypsheaf::HyperbolicSheaf;
use hypcalc::qlinalg::{dot, Rational};
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// `c · x > 0` when strict, `c · x ≥ 0` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Ineq {
    coeffs: Vec<Rational>,
    strict: bool,
}

fn normalize(mut c: Ineq) -> Ineq {
    if let Some(lead) = c.coeffs.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
        for x in c.coeffs.iter_mut() {
            *x = &*x / &lead;
        }
    }
    c
}

/// Fourier–Motzkin elimination over all variables.
fn feasible(n: usize, system: Vec<Ineq>) -> bool {
    let mut cur: BTreeSet<Ineq> = system.into_iter().map(normalize).collect();
    for k in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for c in cur {
            if c.coeffs[k].is_positive() {
                pos.push(c);
            } else if c.coeffs[k].is_negative() {
                neg.push(c);
            } else {
                rest.insert(c);
            }
        }
        for p in &pos {
            for m in &neg {
                let (a, b) = (p.coeffs[k].clone(), -m.coeffs[k].clone());
                let coeffs = p.coeffs.iter().zip(&m.coeffs).map(|(x, y)| x * &b + y * &a).collect();
                rest.insert(normalize(Ineq { coeffs, strict: p.strict || m.strict }));
            }
        }
        cur = rest;
    }
    cur.iter().all(|c| !c.strict)
}

/// Whether some vector realizes the sign vector `s`.
pub fn realizable(arr: &Arrangement, s: &[i8]) -> bool {
    let mut sys = Vec::new();
    for (i, &si) in s.iter().enumerate() {
        let h = arr.hyperplane(i).to_vec();
        let neg: Vec<Rational> = h.iter().map(|x| -x).collect();
        match si {
            0 => {
                sys.push(Ineq { coeffs: h, strict: false });
                sys.push(Ineq { coeffs: neg, strict: false });
            }
            1 => sys.push(Ineq { coeffs: h, strict: true }),
            _ => sys.push(Ineq { coeffs: neg, strict: true }),
        }
    }
    feasible(arr.dim(), sys)
}

fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Every realizable sign vector with its dimension.
pub fn oracle_faces(arr: &Arrangement) -> BTreeMap<Vec<i8>, usize> {
    let m = arr.len();
    let mut out = BTreeMap::new();
    for code in 0..3usize.pow(m as u32) {
        let mut s = Vec::with_capacity(m);
        let mut c = code;
        for _ in 0..m {
            s.push((c % 3) as i8 - 1);
            c /= 3;
        }
        if realizable(arr, &s) {
            let zero: Vec<Vec<Rational>> = (0..m).filter(|&i| s[i] == 0).map(|i| arr.hyperplane(i).to_vec()).collect();
            out.insert(s, arr.dim() - rank(&zero));
        }
    }
    out
}

/// Face order on sign vectors: `a ≤ b` iff each sign of `a` is 0 or agrees with `b`.
pub fn sign_leq(a: &[i8], b: &[i8]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || x == y)
}

/// Whether a point realizes the sign vector.
pub fn point_has_signs(arr: &Arrangement, x: &[Rational], s: &[i8]) -> bool {
    (0..arr.len()).all(|i| {
        let v = dot(arr.hyperplane(i), x);
        let sv = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        sv == s[i]
    })
}

/// Whether all spaces are lines and every `γ` is a nonzero scalar, in which
/// case choosing `e_A = γ_{0A}(e_0)` identifies the sheaf with the constant one.
pub fn isomorphic_to_constant(q: &HyperbolicSheaf) -> bool {
    q.dims().iter().all(|&d| d == 1) && q.gamma_matrices().iter().all(|g| !g.get(0, 0).is_zero())
}

/// Whether only the minimal face carries a nonzero space, and that space is a line.
pub fn isomorphic_to_skyscraper(q: &HyperbolicSheaf) -> bool {
    let p = q.poset();
    let origin = p.minimal_face();
    (0..p.len()).all(|a| q.dim(a) == usize::from(a == origin))
}
