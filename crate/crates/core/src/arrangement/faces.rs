use super::Arrangement;
use crate::error::{Error, Result};
use crate::qlinalg::{dot, feasible_point, kernel_basis, rank, rref, sign_of, Constraint, Matrix, Rational};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// A realizable sign vector with its span and a certified interior point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub signs: Vec<i8>,
    pub dim: usize,
    /// Reduced row echelon basis of the linear span, one row per basis vector.
    pub span_basis: Matrix,
    /// Pivot columns of `span_basis`; a vector of the span has coordinates `v[pivots]`.
    pub pivots: Vec<usize>,
    pub interior_point: Vec<Rational>,
}

impl Face {
    /// Coordinates of a vector of the face's span in `span_basis`.
    pub fn coordinates(&self, v: &[Rational]) -> Vec<Rational> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    pub fn zero_set(&self) -> Vec<usize> {
        self.signs.iter().enumerate().filter(|(_, &s)| s == 0).map(|(i, _)| i).collect()
    }
}

pub fn sign_char(s: i8) -> char {
    match s {
        -1 => '-',
        0 => '0',
        _ => '+',
    }
}

pub fn sign_string(signs: &[i8]) -> String {
    signs.iter().map(|&s| sign_char(s)).collect()
}

/// Faces of an arrangement ordered by dimension, then sign vector.
#[derive(Debug)]
pub struct FacePoset {
    pub arrangement: Arrangement,
    pub faces: Vec<Face>,
    /// Covering pairs `(lower, upper)` in lexicographic order.
    pub covers: Vec<(usize, usize)>,
    /// Incidence sign per covering pair, aligned with `covers`.
    pub incidence: Vec<i8>,
    cover_index: HashMap<(usize, usize), usize>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    le: Vec<bool>,
    index: HashMap<Vec<i8>, usize>,
    collinear: OnceLock<Arc<Vec<(usize, usize, usize)>>>,
}

impl PartialEq for FacePoset {
    fn eq(&self, other: &Self) -> bool {
        self.arrangement == other.arrangement
    }
}

struct Raw {
    signs: Vec<i8>,
    witness: Vec<Rational>,
}

/// Enumerates faces by inserting hyperplanes one at a time.
pub fn enumerate_faces(arr: &Arrangement) -> FacePoset {
    let n = arr.dim();
    let mut faces = vec![Raw { signs: vec![], witness: vec![Rational::zero(); n] }];
    for (hi, h) in arr.hyperplanes().iter().enumerate() {
        let mut next = Vec::with_capacity(faces.len() * 3);
        for f in faces {
            let zeros: Vec<usize> = f.signs.iter().enumerate().filter(|(_, &s)| s == 0).map(|(i, _)| i).collect();
            let z = arr.submatrix(&zeros);
            if rank(&z.vstack(&Matrix::from_rows(vec![h.clone()]))) == rank(&z) {
                // h vanishes on the span of f.
                next.push(extend(&f, 0, f.witness.clone()));
                continue;
            }
            let hp = dot(h, &f.witness);
            let sigma = sign_of(&hp);
            if sigma == 0 {
                let u = direction_with(&z, h);
                let hu = dot(h, &u);
                let t = step_size(arr, hi, &f.witness, &u);
                let plus: Vec<Rational> = f.witness.iter().zip(&u).map(|(p, d)| p + &t * d).collect();
                let minus: Vec<Rational> = f.witness.iter().zip(&u).map(|(p, d)| p - &t * d).collect();
                let (pos, neg) = if hu.is_positive() { (plus, minus) } else { (minus, plus) };
                next.push(extend(&f, -1, neg));
                next.push(extend(&f, 0, f.witness.clone()));
                next.push(extend(&f, 1, pos));
            } else {
                let mut cons: Vec<Constraint> = f
                    .signs
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| Constraint::with_sign(arr.hyperplane(i).to_vec(), s))
                    .collect();
                cons.push(Constraint::with_sign(h.clone(), -sigma));
                if let Some(x) = feasible_point(n, &cons) {
                    let hx = dot(h, &x);
                    let s = &hp / (&hp - &hx);
                    let mid: Vec<Rational> = f.witness.iter().zip(&x).map(|(p, y)| p + &s * (y - p)).collect();
                    next.push(extend(&f, -sigma, x));
                    next.push(extend(&f, 0, mid));
                }
                next.push(extend(&f, sigma, f.witness.clone()));
            }
        }
        faces = next;
    }
    build_poset(arr.clone(), faces)
}

fn extend(f: &Raw, s: i8, witness: Vec<Rational>) -> Raw {
    let mut signs = f.signs.clone();
    signs.push(s);
    Raw { signs, witness }
}

/// A vector in ker(z) on which h is nonzero.
fn direction_with(z: &Matrix, h: &[Rational]) -> Vec<Rational> {
    let k = kernel_basis(z);
    (0..k.cols()).map(|j| k.col(j)).find(|v| !dot(h, v).is_zero()).expect("h is not identically zero on the span")
}

/// A step keeping the signs of the first `upto` hyperplanes at `p + t u` and `p − t u`.
fn step_size(arr: &Arrangement, upto: usize, p: &[Rational], u: &[Rational]) -> Rational {
    let mut t = Rational::from_integer(1.into());
    for i in 0..upto {
        let gp = arr.eval(i, p);
        let gu = arr.eval(i, u);
        if gp.is_zero() || gu.is_zero() {
            continue;
        }
        let bound = gp.abs() / (gu.abs() * Rational::from_integer(2.into()));
        if bound < t {
            t = bound;
        }
    }
    t
}

fn build_poset(arr: Arrangement, raw: Vec<Raw>) -> FacePoset {
    let n = arr.dim();
    let mut faces: Vec<Face> = raw
        .into_iter()
        .map(|r| {
            let zeros: Vec<usize> = r.signs.iter().enumerate().filter(|(_, &s)| s == 0).map(|(i, _)| i).collect();
            let k = kernel_basis(&arr.submatrix(&zeros));
            let (basis, pivots) = if k.cols() == 0 { (Matrix::zeros(0, n), vec![]) } else { rref(&k.transpose()) };
            debug_assert_eq!(arr.sign_vector(&r.witness), r.signs);
            Face { dim: pivots.len(), signs: r.signs, span_basis: basis, pivots, interior_point: r.witness }
        })
        .collect();
    faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.signs.cmp(&b.signs)));
    let m = faces.len();
    let index: HashMap<Vec<i8>, usize> = faces.iter().enumerate().map(|(i, f)| (f.signs.clone(), i)).collect();
    let mut le = vec![false; m * m];
    for a in 0..m {
        for b in 0..m {
            le[a * m + b] = sign_le(&faces[a].signs, &faces[b].signs);
        }
    }
    let mut covers = Vec::new();
    let mut up = vec![Vec::new(); m];
    let mut down = vec![Vec::new(); m];
    for a in 0..m {
        for b in 0..m {
            if le[a * m + b] && faces[b].dim == faces[a].dim + 1 {
                covers.push((a, b));
                up[a].push(b);
                down[b].push(a);
            }
        }
    }
    let cover_index = covers.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let incidence = covers.iter().map(|&(b, c)| compute_incidence(&faces[b], &faces[c])).collect();
    FacePoset {
        arrangement: arr,
        faces,
        covers,
        incidence,
        cover_index,
        up,
        down,
        le,
        index,
        collinear: OnceLock::new(),
    }
}

fn sign_le(a: &[i8], b: &[i8]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || x == y)
}

/// Sign of det[span_basis(B); interior_point(C)] in the coordinates of Lin(C).
fn compute_incidence(b: &Face, c: &Face) -> i8 {
    let mut rows: Vec<Vec<Rational>> = (0..b.dim).map(|i| c.coordinates(b.span_basis.row(i))).collect();
    rows.push(c.coordinates(&c.interior_point));
    let s = sign_of(&Matrix::from_rows(rows).det());
    debug_assert_ne!(s, 0);
    s
}

/// Incidence sign of a covering pair `b <₁ c`.
pub fn incidence_sign(poset: &FacePoset, b: usize, c: usize) -> Result<i8> {
    poset.cover_index(b, c).map(|i| poset.incidence[i]).ok_or(Error::NotCover(b, c))
}

impl FacePoset {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.arrangement.dim()
    }

    pub fn face(&self, i: usize) -> &Face {
        &self.faces[i]
    }

    pub fn dim(&self, i: usize) -> usize {
        self.faces[i].dim
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.le[a * self.faces.len() + b]
    }

    pub fn cover_index(&self, a: usize, b: usize) -> Option<usize> {
        self.cover_index.get(&(a, b)).copied()
    }

    pub fn incidence(&self, a: usize, b: usize) -> i8 {
        self.incidence[self.cover_index(a, b).expect("covering pair")]
    }

    /// Faces covering `a`.
    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.up[a]
    }

    /// Faces covered by `a`.
    pub fn lower_covers(&self, a: usize) -> &[usize] {
        &self.down[a]
    }

    pub fn above(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&b| self.leq(a, b)).collect()
    }

    pub fn below(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&b| self.leq(b, a)).collect()
    }

    pub fn find(&self, signs: &[i8]) -> Option<usize> {
        self.index.get(signs).copied()
    }

    /// Looks up a face by its sign string over `-0+`.
    pub fn parse_face(&self, s: &str) -> Result<usize> {
        let signs: Option<Vec<i8>> = s
            .chars()
            .map(|c| match c {
                '-' => Some(-1),
                '0' => Some(0),
                '+' => Some(1),
                _ => None,
            })
            .collect();
        let signs = signs.ok_or_else(|| Error::InvalidFace(format!("{s:?} is not a sign string over -0+")))?;
        self.find(&signs).ok_or_else(|| Error::InvalidFace(format!("{s:?} is not a face of the arrangement")))
    }

    pub fn sign_string(&self, i: usize) -> String {
        sign_string(&self.faces[i].signs)
    }

    /// The unique face of minimal dimension (the lineality space).
    pub fn minimal_face(&self) -> usize {
        0
    }

    pub fn chambers(&self) -> Vec<usize> {
        let n = self.ambient_dim();
        (0..self.len()).filter(|&i| self.faces[i].dim == n).collect()
    }

    /// Σ (−1)^dim over all faces.
    pub fn euler_sum(&self) -> i64 {
        self.faces.iter().map(|f| if f.dim.is_multiple_of(2) { 1 } else { -1 }).sum()
    }

    /// Intermediate faces of the interval `[a, d]`.
    pub fn between(&self, a: usize, d: usize) -> Vec<usize> {
        self.up[a].iter().copied().filter(|&c| self.leq(c, d) && c != d).collect()
    }

    /// All length-2 intervals as `(bottom, top, intermediates)`.
    pub fn length_two_intervals(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for d in 0..self.len() {
                if self.faces[d].dim == self.faces[a].dim + 2 && self.leq(a, d) {
                    out.push((a, d, self.between(a, d)));
                }
            }
        }
        out
    }

    /// True iff every length-2 interval has two intermediates and sign product −1.
    pub fn diamond_check(&self) -> bool {
        self.length_two_intervals().iter().all(|(a, d, mid)| {
            mid.len() == 2
                && self.incidence(*a, mid[0])
                    * self.incidence(mid[0], *d)
                    * self.incidence(*a, mid[1])
                    * self.incidence(mid[1], *d)
                    == -1
        })
    }

    /// Greatest common lower bound; faces of an arrangement form a meet-semilattice.
    pub fn meet(&self, a: usize, b: usize) -> usize {
        let signs: Vec<i8> =
            self.faces[a].signs.iter().zip(&self.faces[b].signs).map(|(&x, &y)| if x == y { x } else { 0 }).collect();
        // The sign intersection need not be realizable; take the largest face below both.
        if let Some(i) = self.find(&signs) {
            return i;
        }
        (0..self.len())
            .rev()
            .filter(|&c| self.leq(c, a) && self.leq(c, b))
            .max_by_key(|&c| self.faces[c].dim)
            .expect("minimal face lies below everything")
    }

    /// Necessary sign condition for `b` to meet a segment from `a` to `c`.
    fn sign_between(&self, a: usize, b: usize, c: usize) -> bool {
        let (sa, sb, sc) = (&self.faces[a].signs, &self.faces[b].signs, &self.faces[c].signs);
        sa.iter().zip(sb).zip(sc).all(|((&x, &y), &z)| match (x, z) {
            (0, 0) => y == 0,
            (0, s) | (s, 0) => y == s,
            (s, t) if s == t => y == s,
            _ => true,
        })
    }

    /// Whether some open segment from a point of `a` to a point of `c` meets `b`.
    pub fn collinear(&self, a: usize, b: usize, c: usize) -> bool {
        if !self.sign_between(a, b, c) {
            return false;
        }
        let (sa, sb, sc) = (&self.faces[a].signs, &self.faces[b].signs, &self.faces[c].signs);
        let n = self.ambient_dim();
        let mut cons = Vec::with_capacity(3 * sa.len());
        for (i, h) in self.arrangement.hyperplanes().iter().enumerate() {
            let mut hx = h.clone();
            hx.resize(2 * n, Rational::zero());
            let mut hz = vec![Rational::zero(); n];
            hz.extend(h.iter().cloned());
            let mut hxz = h.clone();
            hxz.extend(h.iter().cloned());
            cons.push(Constraint::with_sign(hx, sa[i]));
            cons.push(Constraint::with_sign(hz, sc[i]));
            cons.push(Constraint::with_sign(hxz, sb[i]));
        }
        feasible_point(2 * n, &cons).is_some()
    }

    /// Faces met by the open segment between the interior points of `a` and `c`.
    fn segment_faces(&self, a: usize, c: usize) -> Vec<usize> {
        let (x, z) = (&self.faces[a].interior_point, &self.faces[c].interior_point);
        let hs = self.arrangement.hyperplanes();
        let hx: Vec<Rational> = hs.iter().map(|h| dot(h, x)).collect();
        let hz: Vec<Rational> = hs.iter().map(|h| dot(h, z)).collect();
        // Points x + t z for t > 0; signs change only where some h vanishes.
        let mut breaks: Vec<Rational> = hx
            .iter()
            .zip(&hz)
            .filter(|(_, b)| !b.is_zero())
            .map(|(a, b)| -(a / b))
            .filter(|t| t.is_positive())
            .collect();
        breaks.sort();
        breaks.dedup();
        let one = Rational::from_integer(1.into());
        let mut samples = Vec::with_capacity(2 * breaks.len() + 1);
        let mut prev = Rational::zero();
        for t in &breaks {
            samples.push((&prev + t) / Rational::from_integer(2.into()));
            samples.push(t.clone());
            prev = t.clone();
        }
        samples.push(prev + one);
        let mut out: Vec<usize> = samples
            .iter()
            .filter_map(|t| {
                let signs: Vec<i8> = hx.iter().zip(&hz).map(|(a, b)| sign_of(&(a + t * b))).collect();
                self.find(&signs)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Triples `(a, b, c)` of distinct faces with `b` between `a` and `c` on a line.
    /// Shared across posets of equal arrangements, since face order is canonical.
    pub fn collinear_triples(&self) -> &[(usize, usize, usize)] {
        type Triples = Arc<Vec<(usize, usize, usize)>>;
        static CACHE: OnceLock<Mutex<HashMap<String, Triples>>> = OnceLock::new();
        self.collinear.get_or_init(|| {
            let cache = CACHE.get_or_init(Default::default);
            let key = self.arrangement.hash();
            if let Some(t) = cache.lock().expect("cache lock").get(&key) {
                return t.clone();
            }
            let m = self.len();
            let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |c| (a, c))).collect();
            let half: Vec<(usize, usize, usize)> = pairs
                .into_par_iter()
                .flat_map_iter(|(a, c)| {
                    let seen = self.segment_faces(a, c);
                    (0..m)
                        .filter(move |&b| {
                            b != a
                                && b != c
                                && self.sign_between(a, b, c)
                                && (seen.contains(&b) || self.collinear(a, b, c))
                        })
                        .map(move |b| (a, b, c))
                })
                .collect();
            let mut all: Vec<(usize, usize, usize)> =
                half.iter().flat_map(|&(a, b, c)| [(a, b, c), (c, b, a)]).collect();
            all.sort_unstable();
            let t = Arc::new(all);
            cache.lock().expect("cache lock").insert(key, t.clone());
            t
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::corpus;
    use super::*;

    fn profile(p: &FacePoset) -> Vec<usize> {
        let mut counts = vec![0; p.ambient_dim() + 1];
        for f in &p.faces {
            counts[f.dim] += 1;
        }
        counts
    }

    #[test]
    fn face_counts() {
        assert_eq!(profile(&enumerate_faces(&corpus::a1())), vec![1, 2]);
        assert_eq!(profile(&enumerate_faces(&corpus::a2())), vec![1, 4, 4]);
        assert_eq!(profile(&enumerate_faces(&corpus::a3())), vec![1, 6, 6]);
        assert_eq!(profile(&enumerate_faces(&corpus::braid3())), vec![0, 1, 6, 6]);
    }

    #[test]
    fn sign_strings_and_order() {
        let p = enumerate_faces(&corpus::a1());
        let names: Vec<String> = (0..3).map(|i| p.sign_string(i)).collect();
        assert_eq!(names, ["0", "-", "+"]);
        assert_eq!(p.parse_face("+").unwrap(), 2);
        assert!(p.parse_face("x").is_err());
        assert_eq!(p.covers, vec![(0, 1), (0, 2)]);
        assert_ne!(p.incidence[0], p.incidence[1]);
    }

    #[test]
    fn diamonds() {
        for (_, a) in corpus::all() {
            let p = enumerate_faces(&a);
            assert!(p.diamond_check());
            let expected = if a.dim().is_multiple_of(2) { 1 } else { -1 };
            assert_eq!(p.euler_sum(), expected);
        }
    }

    #[test]
    fn empty_and_zero_dim() {
        let p = enumerate_faces(&Arrangement::new(0, vec![]).unwrap());
        assert_eq!(p.len(), 1);
        let p = enumerate_faces(&Arrangement::new(2, vec![]).unwrap());
        assert_eq!(p.len(), 1);
        assert_eq!(p.dim(0), 2);
    }

    #[test]
    fn collinearity() {
        let p = enumerate_faces(&corpus::a1());
        assert!(p.collinear(1, 0, 2));
        assert!(!p.collinear(1, 2, 0));
        let p = enumerate_faces(&corpus::a2());
        let a = p.parse_face("++").unwrap();
        let c = p.parse_face("--").unwrap();
        for s in ["00", "+-", "-+"] {
            assert!(p.collinear(a, p.parse_face(s).unwrap(), c));
        }
        let c2 = p.parse_face("+-").unwrap();
        assert!(p.collinear(a, p.parse_face("+0").unwrap(), c2));
        assert!(!p.collinear(a, p.parse_face("0+").unwrap(), c2));
        assert!(!p.collinear(a, p.parse_face("00").unwrap(), c2));
    }

    #[test]
    fn meets() {
        let p = enumerate_faces(&corpus::a3());
        let a = p.parse_face("++-").unwrap();
        let b = p.parse_face("+++").unwrap();
        assert_eq!(p.sign_string(p.meet(a, b)), "++0");
    }
}
