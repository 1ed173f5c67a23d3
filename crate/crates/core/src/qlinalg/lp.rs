//! Exact phase-one simplex for homogeneous sign systems.
//!
//! Strict inequalities are homogeneous, so `a·x > 0` is equivalent to
//! `a·x ≥ 1` after rescaling any solution.

use super::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `a·x = 0`
    Zero,
    /// `a·x > 0`
    Positive,
    /// `a·x < 0`
    Negative,
    /// `a·x ≥ 0`
    NonNegative,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub covector: Vec<Rational>,
    pub relation: Relation,
}

impl Constraint {
    pub fn new(covector: Vec<Rational>, relation: Relation) -> Self {
        Constraint { covector, relation }
    }

    /// Constraint forcing the sign of `a·x` to be `s`.
    pub fn with_sign(covector: Vec<Rational>, s: i8) -> Self {
        let relation = match s {
            0 => Relation::Zero,
            1 => Relation::Positive,
            _ => Relation::Negative,
        };
        Constraint { covector, relation }
    }
}

/// Returns a point of Q^n satisfying every constraint, or `None`.
pub fn feasible_point(n: usize, constraints: &[Constraint]) -> Option<Vec<Rational>> {
    let m = constraints.len();
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }
    let n_slack = constraints.iter().filter(|c| c.relation != Relation::Zero).count();
    let n_struct = 2 * n + n_slack;
    let width = n_struct + m + 1;
    let rhs = width - 1;
    let mut t = vec![vec![Rational::zero(); width]; m + 1];
    let mut slack = 2 * n;
    for (i, c) in constraints.iter().enumerate() {
        assert_eq!(c.covector.len(), n, "constraint length mismatch");
        let flip = c.relation == Relation::Negative;
        for j in 0..n {
            let a = if flip { -&c.covector[j] } else { c.covector[j].clone() };
            t[i][n + j] = -&a;
            t[i][j] = a;
        }
        if c.relation != Relation::Zero {
            t[i][slack] = -Rational::one();
            slack += 1;
        }
        if matches!(c.relation, Relation::Positive | Relation::Negative) {
            t[i][rhs] = Rational::one();
        }
        t[i][n_struct + i] = Rational::one();
    }
    // Objective row: reduced costs of minimizing the sum of artificials.
    let costs: Vec<Rational> = (0..n_struct).map(|j| -(0..m).fold(Rational::zero(), |acc, i| acc + &t[i][j])).collect();
    t[m][..n_struct].clone_from_slice(&costs);
    t[m][rhs] = -(0..m).fold(Rational::zero(), |acc, i| acc + &t[i][rhs]);
    let mut basis: Vec<usize> = (n_struct..n_struct + m).collect();

    // Bland's rule: lowest-index improving column, ties broken by basis index.
    while let Some(enter) = (0..n_struct + m).find(|&j| t[m][j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // Unbounded below cannot happen for a sum of nonnegative artificials.
            unreachable!("phase-one objective is bounded");
        };
        let inv = t[pr][enter].recip();
        for v in t[pr].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = t[pr].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == pr || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        basis[pr] = enter;
    }
    if !t[m][rhs].is_zero() {
        return None;
    }
    let mut y = vec![Rational::zero(); n_struct + m];
    for (i, &b) in basis.iter().enumerate() {
        y[b] = t[i][rhs].clone();
    }
    let x: Vec<Rational> = (0..n).map(|j| &y[j] - &y[n + j]).collect();
    debug_assert!(constraints.iter().all(|c| satisfies(&x, c)));
    Some(x)
}

fn satisfies(x: &[Rational], c: &Constraint) -> bool {
    let v = super::dot(&c.covector, x);
    match c.relation {
        Relation::Zero => v.is_zero(),
        Relation::Positive => v.is_positive(),
        Relation::Negative => v.is_negative(),
        Relation::NonNegative => !v.is_negative(),
    }
}
