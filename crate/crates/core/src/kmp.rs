//! The scan loop shared by the FVC and PVC extended-KMP matchers.

use std::collections::BTreeMap;

use crate::bitrows::Word;
use crate::oracle::MatchReport;
use crate::substitution::Substitution;
use crate::symbol::{ConstId, PatternString, Symbol, TextString};

/// A failure function over a preprocessed pattern.
pub trait FailureFunction<W: Word> {
    fn pattern(&self) -> &PatternString;

    /// Whether unbound variables must be extended injectively.
    fn injective(&self) -> bool;

    /// Given a mismatch right after the prefix of length `k` (`1 <= k <= m`)
    /// matched under `pi`, returns the length `j < k` of the longest prefix
    /// that can stay aligned and writes its substitution into `out`.
    /// `scratch` is a reusable buffer for the bit-parallel conjunction.
    fn failure_into(
        &self,
        k: usize,
        pi: &Substitution,
        out: &mut Substitution,
        scratch: &mut Vec<W>,
    ) -> usize;
}

/// Maps text constants to the row slot used by the bitmaps: constants of the
/// pattern get slots `0..|Σ_P|`, everything else shares slot `|Σ_P|`.
#[derive(Debug, Clone)]
pub struct ConstSlots {
    lookup: Vec<u32>,
    count: usize,
}

impl ConstSlots {
    pub fn new(pattern: &PatternString) -> Self {
        let count = pattern.constants().len();
        let size = pattern
            .constants()
            .iter()
            .map(|c| c.index() + 1)
            .max()
            .unwrap_or(0);
        let mut lookup = vec![count as u32; size];
        for (slot, c) in pattern.constants().iter().enumerate() {
            lookup[c.index()] = slot as u32;
        }
        ConstSlots { lookup, count }
    }

    /// Number of slots including the shared "not in the pattern" slot.
    pub fn len(&self) -> usize {
        self.count + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn slot(&self, c: ConstId) -> usize {
        self.lookup
            .get(c.index())
            .map_or(self.count, |&s| s as usize)
    }

    pub fn other(&self) -> usize {
        self.count
    }
}

/// Number of distinct variables in each prefix `P[1:j]`, `0 <= j <= m`.
/// Because variables are listed by first appearance, the variables of
/// `P[1:j]` are exactly `pattern.variables()[..counts[j]]`.
pub fn prefix_variable_counts(pattern: &PatternString) -> Vec<usize> {
    let mut seen = vec![false; pattern.var_slots()];
    let mut counts = Vec::with_capacity(pattern.len() + 1);
    let mut count = 0;
    counts.push(0);
    for s in pattern.symbols() {
        if let Symbol::Var(x) = *s {
            if !seen[x.index()] {
                seen[x.index()] = true;
                count += 1;
            }
        }
        counts.push(count);
    }
    counts
}

/// Left-to-right scan keeping a substitution for the matched prefix; on a
/// mismatch the failure function picks the resume prefix and substitution.
pub fn scan<W: Word, F: FailureFunction<W>>(
    matcher: &F,
    text: &TextString,
    keep_witnesses: bool,
) -> MatchReport {
    let pattern = matcher.pattern();
    let symbols = pattern.symbols();
    let m = symbols.len();
    let n = text.len();
    let injective = matcher.injective();
    let mut report = MatchReport {
        positions: Vec::new(),
        witnesses: keep_witnesses.then(BTreeMap::new),
    };
    if m > n {
        return report;
    }

    let slots = pattern.var_slots();
    let mut pi = Substitution::with_slots(slots);
    let mut next = Substitution::with_slots(slots);
    let mut scratch = Vec::new();
    let mut k = 0;
    let mut i = 0;
    while i < n {
        let t = text.symbols()[i];
        let compatible = match symbols[k] {
            Symbol::Const(c) => c == t,
            Symbol::Var(x) => pi.extend(x, t, injective).is_ok(),
        };
        if compatible {
            i += 1;
            k += 1;
            if k == m {
                let start = i - m + 1;
                report.positions.push(start);
                if let Some(w) = report.witnesses.as_mut() {
                    w.insert(start, pi.clone());
                }
                k = matcher.failure_into(m, &pi, &mut next, &mut scratch);
                std::mem::swap(&mut pi, &mut next);
            }
        } else if k == 0 {
            i += 1;
        } else {
            k = matcher.failure_into(k, &pi, &mut next, &mut scratch);
            std::mem::swap(&mut pi, &mut next);
        }
    }
    report
}
