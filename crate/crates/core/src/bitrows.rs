//! Bit-packed rows of varying length, stored in words of a chosen width.
//!
//! Bit `j` of a row lives in word `j / W::BITS` at offset `j % W::BITS`.

use num_traits::{PrimInt, Unsigned};

/// Word type used for bit-parallel conjunctions.
pub trait Word: PrimInt + Unsigned + Send + Sync + std::fmt::Debug + 'static {
    const BITS: usize;
}

impl Word for u8 {
    const BITS: usize = 8;
}

impl Word for u16 {
    const BITS: usize = 16;
}

impl Word for u32 {
    const BITS: usize = 32;
}

impl Word for u64 {
    const BITS: usize = 64;
}

#[inline]
pub fn words_for<W: Word>(bits: usize) -> usize {
    bits.div_ceil(W::BITS)
}

#[inline]
pub fn get_bit<W: Word>(row: &[W], j: usize) -> bool {
    (row[j / W::BITS] >> (j % W::BITS)) & W::one() == W::one()
}

#[inline]
pub fn set_bit<W: Word>(row: &mut [W], j: usize) {
    row[j / W::BITS] = row[j / W::BITS] | (W::one() << (j % W::BITS));
}

#[inline]
pub fn clear_bit<W: Word>(row: &mut [W], j: usize) {
    row[j / W::BITS] = row[j / W::BITS] & !(W::one() << (j % W::BITS));
}

#[inline]
pub fn and_assign<W: Word>(acc: &mut [W], row: &[W]) {
    for (a, &r) in acc.iter_mut().zip(row) {
        *a = *a & r;
    }
}

/// Index of the highest set bit, scanning words from the top.
#[inline]
pub fn highest_set<W: Word>(row: &[W]) -> Option<usize> {
    row.iter().enumerate().rev().find_map(|(w, &word)| {
        (word != W::zero()).then(|| w * W::BITS + (W::BITS - 1 - word.leading_zeros() as usize))
    })
}

/// Rows grouped by prefix length `k = 1..=m`; every group holds the same
/// number of rows, each `k` bits long.
#[derive(Debug, Clone)]
pub struct RowTable<W: Word> {
    rows_per_k: usize,
    offsets: Vec<usize>,
    words: Vec<W>,
}

impl<W: Word> RowTable<W> {
    pub fn new(m: usize, rows_per_k: usize) -> Self {
        let mut offsets = Vec::with_capacity(m + 2);
        offsets.push(0);
        offsets.push(0);
        let mut total = 0;
        for k in 1..=m {
            total += rows_per_k * words_for::<W>(k);
            offsets.push(total);
        }
        RowTable {
            rows_per_k,
            offsets,
            words: vec![W::zero(); total],
        }
    }

    pub fn rows_per_k(&self) -> usize {
        self.rows_per_k
    }

    #[inline]
    fn span(&self, k: usize, row: usize) -> (usize, usize) {
        debug_assert!(row < self.rows_per_k);
        let width = words_for::<W>(k);
        let start = self.offsets[k] + row * width;
        (start, start + width)
    }

    #[inline]
    pub fn row(&self, k: usize, row: usize) -> &[W] {
        let (a, b) = self.span(k, row);
        &self.words[a..b]
    }

    #[inline]
    pub fn row_mut(&mut self, k: usize, row: usize) -> &mut [W] {
        let (a, b) = self.span(k, row);
        &mut self.words[a..b]
    }

    /// Sets bits `0..k` of the row.
    pub fn fill(&mut self, k: usize, row: usize) {
        let r = self.row_mut(k, row);
        for j in 0..k {
            set_bit(r, j);
        }
    }

    pub fn get(&self, k: usize, row: usize, j: usize) -> bool {
        j < k && get_bit(self.row(k, row), j)
    }

    pub fn words_in_memory(&self) -> usize {
        self.words.len()
    }
}
