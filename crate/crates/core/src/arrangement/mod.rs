//! Central real hyperplane arrangements and their combinatorics.

mod derived;
mod duality;
mod faces;
mod flats;

pub use derived::{derived_arrangements, relative_sign, Derived};
pub use duality::{
    cones_for_functional, dual_arrangement, dual_cones, monotone_cones_check, strictly_convex, ConeSelection, ConeTag,
};
pub use faces::{enumerate_faces, incidence_sign, sign_char, sign_string, Face, FacePoset};
pub use flats::{flat_from_hyperplanes, flat_of_face, intersection_poset, is_polarization, Flat};

use crate::error::{Error, Result};
use crate::qlinalg::{dot, format_rational, q, rank, serde_q, sign_of, Matrix, Rational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Finite list of nonzero, pairwise non-proportional linear forms on Q^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrangement {
    dim: usize,
    hyperplanes: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct ArrangementJson {
    dim: usize,
    #[serde(serialize_with = "serde_q::serialize_rows", deserialize_with = "serde_q::deserialize_rows")]
    hyperplanes: Vec<Vec<Rational>>,
}

impl Serialize for Arrangement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArrangementJson { dim: self.dim, hyperplanes: self.hyperplanes.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Arrangement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ArrangementJson::deserialize(d)?;
        Arrangement::new(raw.dim, raw.hyperplanes).map_err(serde::de::Error::custom)
    }
}

impl Arrangement {
    pub fn new(dim: usize, hyperplanes: Vec<Vec<Rational>>) -> Result<Self> {
        for (i, h) in hyperplanes.iter().enumerate() {
            if h.len() != dim {
                return Err(Error::InvalidArrangement(format!(
                    "hyperplane {i} has length {}, expected {dim}",
                    h.len()
                )));
            }
            if h.iter().all(Zero::is_zero) {
                return Err(Error::InvalidArrangement(format!("hyperplane {i} is the zero covector")));
            }
            for (j, g) in hyperplanes[..i].iter().enumerate() {
                if rank(&Matrix::from_rows(vec![g.clone(), h.clone()])) < 2 {
                    return Err(Error::InvalidArrangement(format!("hyperplanes {j} and {i} are proportional")));
                }
            }
        }
        Ok(Arrangement { dim, hyperplanes })
    }

    pub fn from_i64(dim: usize, rows: &[&[i64]]) -> Result<Self> {
        Self::new(dim, rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn hyperplanes(&self) -> &[Vec<Rational>] {
        &self.hyperplanes
    }

    pub fn hyperplane(&self, i: usize) -> &[Rational] {
        &self.hyperplanes[i]
    }

    pub fn eval(&self, i: usize, x: &[Rational]) -> Rational {
        dot(&self.hyperplanes[i], x)
    }

    pub fn sign_vector(&self, x: &[Rational]) -> Vec<i8> {
        self.hyperplanes.iter().map(|h| sign_of(&dot(h, x))).collect()
    }

    /// Covectors as the rows of a matrix.
    pub fn matrix(&self) -> Matrix {
        Matrix::from_rows_with_cols(self.hyperplanes.clone(), self.dim)
    }

    /// Rows of the selected covectors.
    pub fn submatrix(&self, indices: &[usize]) -> Matrix {
        Matrix::from_rows_with_cols(indices.iter().map(|&i| self.hyperplanes[i].clone()).collect(), self.dim)
    }

    /// True when the hyperplanes meet only in the origin.
    pub fn is_essential(&self) -> bool {
        rank(&self.matrix()) == self.dim
    }

    /// Index of a hyperplane proportional to `h`, if any.
    pub fn position_of(&self, h: &[Rational]) -> Option<usize> {
        self.hyperplanes.iter().position(|g| rank(&Matrix::from_rows(vec![g.clone(), h.to_vec()])) < 2)
    }

    /// Arrangement on Q^{n1+n2} made of both families on their own coordinates.
    pub fn direct_sum(&self, other: &Arrangement) -> Arrangement {
        let n = self.dim + other.dim;
        let mut hs = Vec::with_capacity(self.len() + other.len());
        for h in &self.hyperplanes {
            let mut v = h.clone();
            v.resize(n, Rational::zero());
            hs.push(v);
        }
        for h in &other.hyperplanes {
            let mut v = vec![Rational::zero(); self.dim];
            v.extend(h.iter().cloned());
            hs.push(v);
        }
        Arrangement { dim: n, hyperplanes: hs }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("arrangement serializes")
    }

    /// SHA-256 of the canonical compact JSON encoding.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("arrangement serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Human-readable covector list.
    pub fn describe(&self) -> Vec<String> {
        self.hyperplanes.iter().map(|h| h.iter().map(format_rational).collect::<Vec<_>>().join(",")).collect()
    }
}

/// Named arrangements used throughout the tests and documentation.
pub mod corpus {
    use super::Arrangement;

    pub fn a1() -> Arrangement {
        Arrangement::from_i64(1, &[&[1]]).unwrap()
    }

    pub fn a2() -> Arrangement {
        Arrangement::from_i64(2, &[&[1, 0], &[0, 1]]).unwrap()
    }

    pub fn a3() -> Arrangement {
        Arrangement::from_i64(2, &[&[1, 0], &[0, 1], &[1, -1]]).unwrap()
    }

    pub fn braid3() -> Arrangement {
        Arrangement::from_i64(3, &[&[1, -1, 0], &[0, 1, -1], &[1, 0, -1]]).unwrap()
    }

    /// Four generic lines through the origin of Q².
    pub fn four_lines() -> Arrangement {
        Arrangement::from_i64(2, &[&[1, 0], &[0, 1], &[1, -1], &[1, 2]]).unwrap()
    }

    /// Coordinate hyperplanes of Q³.
    pub fn coord3() -> Arrangement {
        Arrangement::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap()
    }

    pub fn all() -> Vec<(&'static str, Arrangement)> {
        vec![
            ("A1", a1()),
            ("A2", a2()),
            ("A3", a3()),
            ("Braid3", braid3()),
            ("FourLines", four_lines()),
            ("Coord3", coord3()),
        ]
    }
}
