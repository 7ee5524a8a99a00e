//! Dense bit vectors over GF(2) and Gaussian elimination helpers.

use std::fmt;

/// A fixed-length vector over GF(2), packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
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
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Positions of the ones, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// In-place componentwise sum. Lengths must agree.
    pub fn xor_assign(&mut self, other: &Gf2Vector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    fn leading_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

/// Incremental row-echelon form used to test independence one vector at a time.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    // (pivot, reduced row), pivots distinct
    rows: Vec<(usize, Gf2Vector)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &Gf2Vector) -> Gf2Vector {
        let mut r = v.clone();
        for (pivot, row) in &self.rows {
            if r.get(*pivot) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &Gf2Vector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v` if it is independent of the current rows. Returns whether it was added.
    pub fn insert(&mut self, v: &Gf2Vector) -> bool {
        let r = self.reduce(v);
        match r.leading_one() {
            None => false,
            Some(pivot) => {
                // keep rows fully reduced on the new pivot
                for (_, row) in self.rows.iter_mut() {
                    if row.get(pivot) {
                        row.xor_assign(&r);
                    }
                }
                self.rows.push((pivot, r));
                true
            }
        }
    }
}

/// GF(2) rank of a list of equal-length vectors.
pub fn rank(vectors: &[Gf2Vector]) -> usize {
    let mut basis = EchelonBasis::new();
    vectors.iter().filter(|v| basis.insert(v)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_and_count() {
        let mut a = Gf2Vector::from_bits(&[1, 1, 0, 0, 1]);
        let b = Gf2Vector::from_bits(&[0, 1, 1, 0, 1]);
        a.xor_assign(&b);
        assert_eq!(a, Gf2Vector::from_bits(&[1, 0, 1, 0, 0]));
        assert_eq!(a.count_ones(), 2);
        assert_eq!(a.ones().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn rank_of_dependent_set() {
        let a = Gf2Vector::from_bits(&[1, 1, 0]);
        let b = Gf2Vector::from_bits(&[0, 1, 1]);
        let c = Gf2Vector::from_bits(&[1, 0, 1]);
        assert_eq!(rank(&[a.clone(), b.clone(), c.clone()]), 2);
        assert_eq!(rank(&[a.clone(), a.clone()]), 1);
        assert_eq!(rank(&[]), 0);
        let mut e = EchelonBasis::new();
        e.insert(&a);
        e.insert(&b);
        assert!(e.contains(&c));
    }

    #[test]
    fn long_vectors_cross_word_boundary() {
        let a = Gf2Vector::from_indices(130, [0, 64, 129]);
        let b = Gf2Vector::from_indices(130, [64]);
        assert_eq!(rank(&[a.clone(), b.clone()]), 2);
        let mut s = a.clone();
        s.xor_assign(&b);
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![0, 129]);
    }
}
