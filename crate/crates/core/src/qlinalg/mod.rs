//! Exact rational linear algebra over dense matrices, with an exact simplex
//! feasibility oracle and chain-complex cohomology.

mod complex;
mod lp;
mod matrix;

pub use complex::{
    cohomology, complex_check, induced_h0_map, laplacian_report, ChainComplex, ChainMap, CohomologyReport, H0Model,
    Summand, Term,
};
pub use lp::{feasible_point, Constraint, Relation};
pub use matrix::{cokernel_projection, inverse, kernel_basis, rank, rref, solve, Matrix};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar. `BigRational` keeps values reduced with a positive denominator.
pub type Rational = BigRational;

/// Rational from an integer.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a fraction.
pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign_of(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Formats a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"`, `"p/q"` or a decimal literal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let mut n: BigInt = digits.parse().ok()?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(n, d));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Dot product of two equal-length rational vectors.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Serde helpers for rationals and matrices as strings.
pub mod serde_q {
    use super::{format_rational, parse_rational, Matrix, Rational};
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Str(String),
    }

    fn raw_to_q<E: Error>(r: Raw) -> Result<Rational, E> {
        match r {
            Raw::Int(i) => Ok(super::q(i)),
            Raw::Str(s) => parse_rational(&s).ok_or_else(|| E::custom(format!("bad rational {s:?}"))),
        }
    }

    pub fn vec_to_strings(v: &[Rational]) -> Vec<String> {
        v.iter().map(format_rational).collect()
    }

    pub fn serialize_rows<S: Serializer>(rows: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Vec<String>> = rows.iter().map(|r| vec_to_strings(r)).collect();
        serde::Serialize::serialize(&out, s)
    }

    pub fn deserialize_rows<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let raw: Vec<Vec<Raw>> = Vec::deserialize(d)?;
        raw.into_iter().map(|r| r.into_iter().map(raw_to_q).collect()).collect()
    }

    pub fn serialize_matrix<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        serialize_rows(&m.to_rows(), s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_roundtrip() {
        for (s, v) in [("3", q(3)), ("-1/2", qf(-1, 2)), ("4/2", q(2)), ("0.25", qf(1, 4)), ("-1.5", qf(-3, 2))] {
            assert_eq!(parse_rational(s).unwrap(), v);
        }
        assert_eq!(format_rational(&qf(6, -4)), "-3/2");
        assert_eq!(format_rational(&q(7)), "7");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }
}
