use alloc::vec;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::error::{Error, Result};

/// Dense matrix over GF(2), rows packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if bit {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn column_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let (src, dst) = (k * other.words, r * out.words);
                    for w in 0..out.words {
                        out.data[dst + w] ^= other.data[src + w];
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let (word, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..self.rows).find(|&r| m[r * self.words + word] & bit != 0) else {
                continue;
            };
            if p != rank {
                for w in 0..self.words {
                    m.swap(p * self.words + w, rank * self.words + w);
                }
            }
            for r in 0..self.rows {
                if r != rank && m[r * self.words + word] & bit != 0 {
                    for w in word..self.words {
                        let v = m[rank * self.words + w];
                        m[r * self.words + w] ^= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiVector {
    pub b: Vec<usize>,
}

impl BettiVector {
    pub const FIELD: &'static str = "GF(2)";

    pub fn alternating_sum(&self) -> i64 {
        self.b.iter().enumerate().map(|(p, &x)| if p % 2 == 0 { x as i64 } else { -(x as i64) }).sum()
    }
}

/// Rows are (p-1)-cells, columns p-cells, both in id order.
pub fn boundary_matrix_mod2(k: &Complex, p: usize) -> Result<BitMatrix> {
    if p == 0 || p > k.dim() {
        return Err(Error::BadDimension(p));
    }
    let rows = k.cells_of_dim(p - 1);
    let cols = k.cells_of_dim(p);
    let mut m = BitMatrix::zeros(rows.len(), cols.len());
    for (j, &c) in cols.iter().enumerate() {
        for &f in k.boundary(c) {
            let i = rows.binary_search(&f).expect("face of lower dimension");
            m.set(i, j, true);
        }
    }
    Ok(m)
}

pub fn betti_mod2(k: &Complex) -> BettiVector {
    let n = k.dim();
    let mut ranks = vec![0usize; n + 2];
    for p in 1..=n {
        ranks[p] = boundary_matrix_mod2(k, p).map(|m| m.rank()).unwrap_or(0);
    }
    let b = (0..=n).map(|p| k.count(p) - ranks[p] - ranks[p + 1]).collect();
    BettiVector { b }
}
