//! Bit-packed vectors over GF(2) and incremental Gaussian elimination.

use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        if self.get(i) != bit {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn lowest_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    /// `self ^= other`, touching only the nonzero word span of `other`.
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        let Some(lo) = other.words.iter().position(|&w| w != 0) else {
            return;
        };
        let hi = other.words.iter().rposition(|&w| w != 0).unwrap_or(lo);
        for i in lo..=hi {
            self.words[i] ^= other.words[i];
        }
    }
}

/// Row echelon form built one vector at a time; each stored row has a
/// distinct lowest set bit (its pivot).
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, BitVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after eliminating the stored pivots.
    pub fn reduce(&self, mut v: BitVec) -> BitVec {
        let mut from = 0;
        loop {
            let Some(p) = v.ones().find(|&i| i >= from) else { break };
            match self.rows.get(&p) {
                Some(r) => v.xor_assign(r),
                None => from = p + 1,
            }
        }
        v
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let mut v = v;
        loop {
            let Some(p) = v.lowest_one() else { return false };
            match self.rows.get(&p) {
                Some(r) => v.xor_assign(r),
                None => {
                    self.rows.insert(p, v);
                    return true;
                }
            }
        }
    }

    pub fn in_span(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }
}

/// Rank of a family of vectors.
pub fn rank<'a>(vectors: impl IntoIterator<Item = &'a BitVec>) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v.clone());
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits() {
        let mut v = BitVec::from_indices(130, [3, 64, 129]);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![3, 64, 129]);
        assert_eq!(v.lowest_one(), Some(3));
        v.flip(3);
        assert_eq!(v.lowest_one(), Some(64));
        assert_eq!(v.count_ones(), 2);
        let w = BitVec::from_indices(130, [64]);
        v.xor_assign(&w);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![129]);
    }

    #[test]
    fn elimination() {
        let a = BitVec::from_indices(5, [0, 1]);
        let b = BitVec::from_indices(5, [1, 2]);
        let c = BitVec::from_indices(5, [0, 2]);
        let mut e = Echelon::new();
        assert!(e.insert(a));
        assert!(e.insert(b));
        assert!(!e.insert(c.clone()));
        assert!(e.in_span(&c));
        assert!(!e.in_span(&BitVec::from_indices(5, [4])));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn rank_of_cycle_boundary() {
        // boundary of a 4-cycle: edges as vertex pairs
        let rows: Vec<BitVec> = (0..4).map(|i| BitVec::from_indices(4, [i, (i + 1) % 4])).collect();
        assert_eq!(rank(&rows), 3);
    }
}
