//! Convolution-based matcher.
//!
//! A window matches iff the pattern with every variable replaced by a
//! don't-care matches it as a wildcard pattern, and the text symbols lying
//! under each variable's occurrences are all equal (plus pairwise distinct
//! across variables in injective mode). Both tests reduce to correlations:
//!
//! * wildcard: for each pattern constant `p`, correlate `[T != p]` with
//!   `[P == p]`; a window matches iff all these are zero.
//! * consistency: with `c` occurrences of `x`, the aligned values
//!   `a_1..a_c` are equal iff `c * sum(a^2) == (sum a)^2`, where both sums
//!   come from correlating the text (and its square) with `[P == x]`.
//!
//! Correlations run on overlapping text blocks of length about `2m`
//! through an f64 FFT, rounded back to integers. Inputs are checked so the
//! rounding is exact.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::oracle::{MatchReport, Mode};
use crate::symbol::{ConstId, PatternString, Symbol, TextString, VarId};

/// Every correlated value must stay below this.
pub const VALUE_LIMIT: u64 = 1 << 26;

/// Outputs must stay below this to be representable exactly in an f64.
pub const EXACT_LIMIT: u128 = 1 << 53;

/// Largest output bound handled by a single floating-point pass. Beyond it
/// the inputs are split into limbs.
const SINGLE_PASS_LIMIT: u128 = 1 << 38;

/// Correlation `R[j] = sum_i a[i + j] * b[i]` for `0 <= j <= n - m`,
/// computed by direct summation.
pub fn correlate_direct(a: &[u64], b: &[u64]) -> Vec<u64> {
    if b.len() > a.len() {
        return Vec::new();
    }
    a.windows(b.len())
        .map(|w| w.iter().zip(b).map(|(x, y)| x * y).sum())
        .collect()
}

/// Exact correlation of `a` (length n) with `b` (length m <= n), giving
/// n - m + 1 values.
///
/// Fails with [`Error::OverflowRisk`] when a value reaches [`VALUE_LIMIT`] or
/// an output could reach [`EXACT_LIMIT`]; callers fall back to
/// [`correlate_direct`] in that case.
pub fn correlate(a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
    if b.len() > a.len() {
        return Err(Error::KernelTooLong {
            kernel: b.len(),
            input: a.len(),
        });
    }
    if b.is_empty() {
        return Ok(vec![0; a.len() + 1]);
    }
    let max_a = a.iter().copied().max().unwrap_or(0);
    let max_b = b.iter().copied().max().unwrap_or(0);
    if max_a >= VALUE_LIMIT || max_b >= VALUE_LIMIT {
        return Err(Error::OverflowRisk {
            bound: max_a.max(max_b) as u128,
        });
    }
    let sum_b: u128 = b.iter().map(|&v| v as u128).sum();
    let bound = max_a as u128 * sum_b;
    if bound >= EXACT_LIMIT {
        return Err(Error::OverflowRisk { bound });
    }
    let m = b.len();
    if max_a as u128 * max_b as u128 * m as u128 <= SINGLE_PASS_LIMIT {
        return BlockCorrelator::new(a, m).correlate(b);
    }

    // Split both sides into limbs of `bits` bits so each partial product
    // stays inside the single-pass range.
    let mut bits = 13u32;
    while bits > 1 && ((1u128 << bits) - 1).pow(2) * m as u128 > SINGLE_PASS_LIMIT {
        bits -= 1;
    }
    if ((1u128 << bits) - 1).pow(2) * m as u128 > SINGLE_PASS_LIMIT {
        return Err(Error::OverflowRisk { bound });
    }
    let limbs = |v: &[u64], max: u64| -> Vec<Vec<u64>> {
        let count = (64 - max.leading_zeros()).div_ceil(bits).max(1);
        let mask = (1u64 << bits) - 1;
        (0..count)
            .map(|u| v.iter().map(|&x| (x >> (u * bits)) & mask).collect())
            .collect()
    };
    let a_limbs = limbs(a, max_a);
    let b_limbs = limbs(b, max_b);
    let mut out = vec![0u64; a.len() - m + 1];
    for (u, al) in a_limbs.iter().enumerate() {
        let corr = BlockCorrelator::new(al, m);
        for (v, bl) in b_limbs.iter().enumerate() {
            let part = corr.correlate(bl)?;
            let shift = (u + v) as u32 * bits;
            for (o, p) in out.iter_mut().zip(part) {
                *o += p << shift;
            }
        }
    }
    Ok(out)
}

/// Precomputed block spectra of one input, reusable across kernels of a
/// fixed length.
pub struct BlockCorrelator {
    n: usize,
    m: usize,
    size: usize,
    max_value: u64,
    blocks: Vec<Vec<Complex<f64>>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl BlockCorrelator {
    /// Prepares `a` for correlation with kernels of length `m` (`1 <= m`).
    pub fn new(a: &[u64], m: usize) -> Self {
        let m = m.max(1);
        let n = a.len();
        let size = (2 * m).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let step = size - m + 1;
        let outputs = (n + 1).saturating_sub(m);
        let mut blocks = Vec::with_capacity(outputs.div_ceil(step));
        let mut start = 0;
        while start < outputs {
            let end = (start + size).min(n);
            let mut buf: Vec<Complex<f64>> = a[start..end]
                .iter()
                .map(|&v| Complex::new(v as f64, 0.0))
                .collect();
            buf.resize(size, Complex::new(0.0, 0.0));
            forward.process(&mut buf);
            blocks.push(buf);
            start += step;
        }
        BlockCorrelator {
            n,
            m,
            size,
            max_value: a.iter().copied().max().unwrap_or(0),
            blocks,
            forward,
            inverse,
        }
    }

    pub fn correlate(&self, kernel: &[u64]) -> Result<Vec<u64>> {
        assert_eq!(kernel.len(), self.m, "kernel length must match block setup");
        if self.m > self.n {
            return Err(Error::KernelTooLong {
                kernel: self.m,
                input: self.n,
            });
        }
        let max_k = kernel.iter().copied().max().unwrap_or(0);
        let bound = self.max_value as u128 * max_k as u128 * self.m as u128;
        if bound > SINGLE_PASS_LIMIT {
            return Err(Error::OverflowRisk { bound });
        }

        let mut spectrum = vec![Complex::new(0.0, 0.0); self.size];
        for (i, &v) in kernel.iter().enumerate() {
            spectrum[self.m - 1 - i] = Complex::new(v as f64, 0.0);
        }
        self.forward.process(&mut spectrum);

        let outputs = self.n - self.m + 1;
        let step = self.size - self.m + 1;
        let scale = 1.0 / self.size as f64;
        let mut out = Vec::with_capacity(outputs);
        let mut buf = vec![Complex::new(0.0, 0.0); self.size];
        for block in &self.blocks {
            for ((o, x), y) in buf.iter_mut().zip(block).zip(&spectrum) {
                *o = x * y;
            }
            self.inverse.process(&mut buf);
            let take = step.min(outputs - out.len());
            out.extend(
                buf[self.m - 1..self.m - 1 + take]
                    .iter()
                    .map(|c| (c.re * scale).round().max(0.0) as u64),
            );
        }
        Ok(out)
    }
}

/// One flag per window start (index 0 is window 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowMask {
    bits: Vec<bool>,
}

impl WindowMask {
    pub fn ones(len: usize) -> Self {
        WindowMask {
            bits: vec![true; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        WindowMask { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Whether window `i` (1-based) is set.
    pub fn get(&self, i: usize) -> bool {
        i >= 1 && self.bits.get(i - 1).copied().unwrap_or(false)
    }

    pub fn and_assign(&mut self, other: &WindowMask) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= *b;
        }
    }

    /// 1-based indices of set windows.
    pub fn positions(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// How correlations against the text are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    Fft,
    Direct,
}

/// Text encoded as dense positive integers, with its square, ready for
/// repeated correlation against pattern indicators.
struct EncodedText {
    m: usize,
    evaluation: Evaluation,
    codes: Vec<ConstId>,
    value: Vec<u64>,
    square: Vec<u64>,
    value_fft: Option<BlockCorrelator>,
    square_fft: Option<BlockCorrelator>,
}

impl EncodedText {
    fn new(text: &TextString, m: usize, evaluation: Evaluation) -> Result<Self> {
        let mut codes: Vec<ConstId> = Vec::new();
        let mut code_of = std::collections::HashMap::new();
        let value: Vec<u64> = text
            .symbols()
            .iter()
            .map(|&c| {
                *code_of.entry(c).or_insert_with(|| {
                    codes.push(c);
                    codes.len() as u64
                })
            })
            .collect();
        let square: Vec<u64> = value.iter().map(|v| v * v).collect();
        if evaluation == Evaluation::Fft {
            if let Some(&top) = square.iter().max() {
                if top >= VALUE_LIMIT {
                    return Err(Error::OverflowRisk { bound: top as u128 });
                }
            }
        }
        let (value_fft, square_fft) = match evaluation {
            Evaluation::Fft => (
                Some(BlockCorrelator::new(&value, m)),
                Some(BlockCorrelator::new(&square, m)),
            ),
            Evaluation::Direct => (None, None),
        };
        Ok(EncodedText {
            m,
            evaluation,
            codes,
            value,
            square,
            value_fft,
            square_fft,
        })
    }

    fn correlate_with(&self, a: &[u64], kernel: &[u64]) -> Result<Vec<u64>> {
        match self.evaluation {
            Evaluation::Fft => correlate(a, kernel),
            Evaluation::Direct => Ok(correlate_direct(a, kernel)),
        }
    }

    fn value_corr(&self, kernel: &[u64]) -> Result<Vec<u64>> {
        match &self.value_fft {
            Some(c) => c.correlate(kernel),
            None => Ok(correlate_direct(&self.value, kernel)),
        }
    }

    fn square_corr(&self, kernel: &[u64]) -> Result<Vec<u64>> {
        match &self.square_fft {
            Some(c) => c.correlate(kernel),
            None => Ok(correlate_direct(&self.square, kernel)),
        }
    }

    fn wildcard_mask(&self, pattern: &PatternString) -> Result<WindowMask> {
        let outputs = self.value.len() + 1 - self.m;
        let mut mask = WindowMask::ones(outputs);
        for &p in pattern.constants() {
            let kernel = indicator(pattern, Symbol::Const(p));
            let code = self
                .codes
                .iter()
                .position(|&c| c == p)
                .map(|i| i as u64 + 1);
            let differs: Vec<u64> = self.value.iter().map(|&v| u64::from(Some(v) != code)).collect();
            let mismatches = self.correlate_with(&differs, &kernel)?;
            for (bit, miss) in mask.bits.iter_mut().zip(mismatches) {
                *bit &= miss == 0;
            }
        }
        Ok(mask)
    }

    /// Consistency mask for `x` and the per-window sums of aligned values.
    fn consistency(&self, pattern: &PatternString, x: VarId) -> Result<(WindowMask, Vec<u64>)> {
        let kernel = indicator(pattern, Symbol::Var(x));
        let count = pattern.occurrence_count(x) as u128;
        let sums = self.value_corr(&kernel)?;
        let squares = self.square_corr(&kernel)?;
        let bits = sums
            .iter()
            .zip(&squares)
            .map(|(&s, &q)| count * q as u128 == (s as u128) * (s as u128))
            .collect();
        Ok((WindowMask::from_bits(bits), sums))
    }
}

fn indicator(pattern: &PatternString, sym: Symbol) -> Vec<u64> {
    pattern
        .symbols()
        .iter()
        .map(|&s| u64::from(s == sym))
        .collect()
}

/// Windows where every pattern constant matches the text.
pub fn wildcard_mask(pattern: &PatternString, text: &TextString) -> Result<WindowMask> {
    if pattern.len() > text.len() {
        return Ok(WindowMask::ones(0));
    }
    EncodedText::new(text, pattern.len(), Evaluation::Fft)?.wildcard_mask(pattern)
}

/// Windows where all text symbols under the occurrences of `x` agree.
pub fn variable_consistent(
    pattern: &PatternString,
    text: &TextString,
    x: VarId,
) -> Result<WindowMask> {
    if pattern.len() > text.len() {
        return Ok(WindowMask::ones(0));
    }
    let enc = EncodedText::new(text, pattern.len(), Evaluation::Fft)?;
    Ok(enc.consistency(pattern, x)?.0)
}

/// All matching windows, using FFT correlations.
pub fn conv_match_all(pattern: &PatternString, text: &TextString, mode: Mode) -> Result<MatchReport> {
    conv_match_with(pattern, text, mode, Evaluation::Fft)
}

/// All matching windows, using the chosen correlation evaluation.
pub fn conv_match_with(
    pattern: &PatternString,
    text: &TextString,
    mode: Mode,
    evaluation: Evaluation,
) -> Result<MatchReport> {
    let m = pattern.len();
    if m > text.len() {
        return Ok(MatchReport::default());
    }
    let enc = EncodedText::new(text, m, evaluation)?;
    let mut mask = enc.wildcard_mask(pattern)?;
    let mut sums = Vec::with_capacity(pattern.variables().len());
    for &x in pattern.variables() {
        let (consistent, s) = enc.consistency(pattern, x)?;
        mask.and_assign(&consistent);
        sums.push((pattern.occurrence_count(x) as u64, s));
    }
    if mode.injective() && sums.len() > 1 {
        // Only windows that passed every consistency test remain, so each
        // sum is an exact multiple of its occurrence count.
        let mut values = Vec::with_capacity(sums.len());
        for (w, bit) in mask.bits.iter_mut().enumerate() {
            if !*bit {
                continue;
            }
            values.clear();
            values.extend(sums.iter().map(|(c, s)| s[w] / c));
            values.sort_unstable();
            *bit = values.windows(2).all(|p| p[0] != p[1]);
        }
    }
    Ok(MatchReport::from_positions(mask.positions()))
}
