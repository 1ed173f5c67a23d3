use super::selection::certify;
use crate::error::{Error, Result};
use crate::qlinalg::{ChainComplex, Matrix, Summand, Term};
use std::collections::BTreeMap;

/// Assembles a complex from keyed summands and blocks between them.
pub(crate) struct BlockComplex<K: Ord + Clone> {
    summands: BTreeMap<K, (i32, usize, String)>,
    blocks: Vec<(K, K, Matrix)>,
}

impl<K: Ord + Clone + std::fmt::Debug> BlockComplex<K> {
    pub fn new() -> Self {
        BlockComplex { summands: BTreeMap::new(), blocks: Vec::new() }
    }

    pub fn summand(&mut self, key: K, degree: i32, dim: usize, label: String) {
        self.summands.insert(key, (degree, dim, label));
    }

    /// Adds `m` to the block from `src` to `dst`; blocks for the same pair accumulate.
    pub fn block(&mut self, src: K, dst: K, m: Matrix) {
        self.blocks.push((src, dst, m));
    }

    pub fn build(self) -> Result<ChainComplex> {
        let lo = self.summands.values().map(|s| s.0).min().unwrap_or(0);
        let hi = self.summands.values().map(|s| s.0).max().unwrap_or(0);
        let mut offsets: BTreeMap<K, usize> = BTreeMap::new();
        let mut terms: Vec<Term> = (lo..=hi).map(|_| Term { dim: 0, summands: Some(Vec::new()) }).collect();
        for (k, (deg, dim, label)) in &self.summands {
            let t = &mut terms[(deg - lo) as usize];
            offsets.insert(k.clone(), t.dim);
            t.dim += dim;
            t.summands.as_mut().expect("labelled").push(Summand { label: label.clone(), dim: *dim });
        }
        let mut diffs: Vec<Matrix> =
            (lo..hi).map(|d| Matrix::zeros(terms[(d + 1 - lo) as usize].dim, terms[(d - lo) as usize].dim)).collect();
        for (src, dst, m) in self.blocks {
            let (ds, ns, _) = &self.summands[&src];
            let (dd, nd, _) = &self.summands[&dst];
            if *dd != ds + 1 || m.shape() != (*nd, *ns) {
                return Err(Error::Shape(format!("block {src:?} -> {dst:?} does not fit the grading")));
            }
            diffs[(ds - lo) as usize].add_block(offsets[&dst], offsets[&src], &m);
        }
        let c = ChainComplex::new(lo, terms, diffs)?;
        certify(&c)?;
        Ok(c)
    }
}
