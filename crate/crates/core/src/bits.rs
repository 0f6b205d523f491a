//! Packed GF(2) vectors and matrices.
//!
//! Bits are stored little-endian inside `u64` words: bit `i` lives in word
//! `i / 64` at position `i % 64`. Bits past `len` are always zero.

use std::fmt;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Build from a slice of 0/1 values; any nonzero byte is a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b != 0);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Copy of bits `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len);
        let mut out = BitVec::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for b in self.iter() {
            write!(f, "{}", u8::from(b))?;
        }
        write!(f, "]")
    }
}

/// Dense row-major GF(2) matrix with packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows: vec![BitVec::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVec>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix { rows, cols }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in 0..self.cols {
                if row.get(c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// `self * v` where `v` is a column vector; one output bit per row.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// Row vector times matrix: XOR of the rows selected by `v`.
    pub fn vec_mul(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.rows.len());
        let mut out = BitVec::zeros(self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            if v.get(i) {
                out.xor_assign(row);
            }
        }
        out
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows.len());
        let rows = self.rows.iter().map(|r| other.vec_mul(r)).collect();
        BitMatrix {
            rows,
            cols: other.cols,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    /// Rank over GF(2) by Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Column `c` as a packed vector of length `num_rows`.
    pub fn column(&self, c: usize) -> BitVec {
        let mut out = BitVec::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                out.set(r, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows.len(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}
