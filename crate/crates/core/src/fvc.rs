//! Extended KMP for FVC-matching.
//!
//! Aligning the prefix `P[1:j]` under the suffix `P[k-j+1:k]` of the
//! matched prefix identifies symbols pairwise. The resulting shifting graph
//! `G(k,j)` links each suffix symbol with a primed copy of the prefix
//! symbol it sits above (constants are shared, variables are copied). The
//! shift to `j` is possible under the current substitution iff every
//! connected component can be given a single label.
//!
//! [`ConditionTable`] summarizes each component by a representative: the
//! constant it contains, or else its least variable. `G(k,j)` is `G(k-1,j-1)`
//! plus the edge `(P[k], P'[j])`, so the table is filled one diagonal
//! `k - j = d` at a time with a single working state.
//!
//! [`FvcBitmaps`] turns the table into bit rows indexed by `j`, so the
//! failure function is a conjunction of rows followed by a highest-bit scan.

use crate::bitrows::{self, RowTable, Word};
use crate::kmp::{self, ConstSlots, FailureFunction};
use crate::oracle::MatchReport;
use crate::substitution::Substitution;
use crate::symbol::{PatternString, Symbol, TextString, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid,
}

/// Mutable representative maps for one shifting graph.
///
/// `reps[x]` is the representative of variable `x` (`A`), `primes[x]` a
/// member of the component of the primed copy `x'` (`A'`), and
/// `members[x]` lists the variables represented by `x` (`U`).
#[derive(Debug, Clone)]
pub struct ConditionState {
    reps: Vec<Symbol>,
    primes: Vec<Option<Symbol>>,
    members: Vec<Vec<VarId>>,
}

impl ConditionState {
    /// The edgeless graph over `var_slots` variables.
    pub fn new(var_slots: usize) -> Self {
        ConditionState {
            reps: (0..var_slots as u32).map(|x| Symbol::Var(VarId(x))).collect(),
            primes: vec![None; var_slots],
            members: (0..var_slots as u32).map(|x| vec![VarId(x)]).collect(),
        }
    }

    #[inline]
    pub fn rep(&self, s: Symbol) -> Symbol {
        match s {
            Symbol::Const(_) => s,
            Symbol::Var(x) => self.reps[x.index()],
        }
    }

    pub fn prime(&self, x: VarId) -> Option<Symbol> {
        self.primes[x.index()]
    }

    pub fn members(&self, x: VarId) -> &[VarId] {
        &self.members[x.index()]
    }

    fn relabel(&mut self, from: VarId, to: Symbol) {
        let moved = std::mem::take(&mut self.members[from.index()]);
        for &z in &moved {
            self.reps[z.index()] = to;
        }
        if let Symbol::Var(t) = to {
            self.members[t.index()].extend(moved);
        }
    }

    /// Merges the components of `a` and `b`. Invalid iff that connects two
    /// distinct constants; the state is unspecified afterwards.
    pub fn add_condition(&mut self, a: Symbol, b: Symbol) -> Validity {
        let ra = self.rep(a);
        let rb = self.rep(b);
        if ra == rb {
            return Validity::Valid;
        }
        match (ra, rb) {
            (Symbol::Const(_), Symbol::Const(_)) => Validity::Invalid,
            (Symbol::Var(x), c @ Symbol::Const(_)) | (c @ Symbol::Const(_), Symbol::Var(x)) => {
                self.relabel(x, c);
                Validity::Valid
            }
            (Symbol::Var(x), Symbol::Var(y)) => {
                let (keep, drop) = if x < y { (x, y) } else { (y, x) };
                self.relabel(drop, Symbol::Var(keep));
                Validity::Valid
            }
        }
    }

    /// Adds the edge between suffix symbol `beta` and the primed copy of
    /// prefix symbol `alpha`.
    pub fn add_edge(&mut self, alpha: Symbol, beta: Symbol) -> Validity {
        match alpha {
            Symbol::Var(x) => match self.primes[x.index()] {
                Some(node) if node != beta => self.add_condition(node, beta),
                Some(_) => Validity::Valid,
                None => {
                    self.primes[x.index()] = Some(beta);
                    Validity::Valid
                }
            },
            Symbol::Const(_) => self.add_condition(alpha, beta),
        }
    }
}

/// Index of entry `(k, j)`, `0 <= j < k`, in triangular storage.
#[inline]
pub(crate) fn tri(k: usize, j: usize) -> usize {
    debug_assert!(j < k);
    k * (k - 1) / 2 + j
}

/// Shifting condition table: `A` and `A'` for every valid `(k, j)`.
#[derive(Debug, Clone)]
pub struct ConditionTable {
    m: usize,
    slots: usize,
    valid: Vec<bool>,
    reps: Vec<Symbol>,
    primes: Vec<Option<Symbol>>,
}

/// Borrowed view of one valid table entry.
#[derive(Debug, Clone, Copy)]
pub struct ConditionEntry<'a> {
    reps: &'a [Symbol],
    primes: &'a [Option<Symbol>],
}

impl ConditionEntry<'_> {
    /// `A(x)`, extended by `A(x) = x` off the window.
    pub fn rep(&self, x: VarId) -> Symbol {
        self.reps[x.index()]
    }

    /// `A'(x')`: a non-primed member of the component of `x'`.
    pub fn prime(&self, x: VarId) -> Option<Symbol> {
        self.primes[x.index()]
    }

    /// `U(x)`: variables whose representative is `x`.
    pub fn members(&self, x: VarId) -> Vec<VarId> {
        self.reps
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == Symbol::Var(x))
            .map(|(y, _)| VarId(y as u32))
            .collect()
    }
}

impl ConditionTable {
    pub fn build(pattern: &PatternString) -> Self {
        let m = pattern.len();
        let slots = pattern.var_slots();
        let entries = m * (m + 1) / 2;
        let mut table = ConditionTable {
            m,
            slots,
            valid: vec![false; entries],
            reps: vec![Symbol::Var(VarId(0)); entries * slots],
            primes: vec![None; entries * slots],
        };
        let p = pattern.symbols();
        for d in 1..=m {
            let mut state = ConditionState::new(slots);
            table.store(d, 0, &state);
            for j in 1..=m - d {
                let k = d + j;
                if state.add_edge(p[j - 1], p[k - 1]) == Validity::Invalid {
                    break;
                }
                table.store(k, j, &state);
            }
        }
        table
    }

    fn store(&mut self, k: usize, j: usize, state: &ConditionState) {
        let e = tri(k, j);
        self.valid[e] = true;
        let range = e * self.slots..(e + 1) * self.slots;
        self.reps[range.clone()].copy_from_slice(&state.reps);
        self.primes[range].copy_from_slice(&state.primes);
    }

    pub fn pattern_len(&self) -> usize {
        self.m
    }

    pub fn is_valid(&self, k: usize, j: usize) -> bool {
        j < k && k <= self.m && self.valid[tri(k, j)]
    }

    pub fn entry(&self, k: usize, j: usize) -> Option<ConditionEntry<'_>> {
        self.is_valid(k, j).then(|| {
            let range = tri(k, j) * self.slots..(tri(k, j) + 1) * self.slots;
            ConditionEntry {
                reps: &self.reps[range.clone()],
                primes: &self.primes[range],
            }
        })
    }
}

/// Bit rows `v`, `r` and `s` for every prefix length `k`.
///
/// Per `k` the rows are laid out as: `v`, then `r[x][slot]` for every
/// variable slot and constant slot (the last constant slot stands for
/// constants outside the pattern), then `s[x][y]`.
#[derive(Debug, Clone)]
pub struct FvcBitmaps<W: Word> {
    rows: RowTable<W>,
    var_slots: usize,
    const_slots: ConstSlots,
}

impl<W: Word> FvcBitmaps<W> {
    pub fn build(pattern: &PatternString, table: &ConditionTable) -> Self {
        let m = pattern.len();
        let vs = pattern.var_slots();
        let const_slots = ConstSlots::new(pattern);
        let cs = const_slots.len();
        let mut bm = FvcBitmaps {
            rows: RowTable::new(m, 1 + vs * cs + vs * vs),
            var_slots: vs,
            const_slots,
        };
        let consts = pattern.constants();
        for k in 1..=m {
            for j in 0..k {
                let Some(entry) = table.entry(k, j) else {
                    continue;
                };
                bitrows::set_bit(bm.rows.row_mut(k, 0), j);
                for x in 0..vs {
                    let rep = entry.rep(VarId(x as u32));
                    for (slot, &p) in consts.iter().enumerate() {
                        if !matches!(rep, Symbol::Const(c) if c != p) {
                            bitrows::set_bit(bm.rows.row_mut(k, bm.r_row(x, slot)), j);
                        }
                    }
                    if !matches!(rep, Symbol::Const(_)) {
                        let other = bm.const_slots.other();
                        bitrows::set_bit(bm.rows.row_mut(k, bm.r_row(x, other)), j);
                    }
                    for y in 0..vs {
                        if rep != Symbol::Var(VarId(y as u32)) {
                            bitrows::set_bit(bm.rows.row_mut(k, bm.s_row(x, y)), j);
                        }
                    }
                }
            }
        }
        bm
    }

    #[inline]
    fn r_row(&self, x: usize, slot: usize) -> usize {
        1 + x * self.const_slots.len() + slot
    }

    #[inline]
    fn s_row(&self, x: usize, y: usize) -> usize {
        1 + self.var_slots * self.const_slots.len() + x * self.var_slots + y
    }

    pub fn const_slots(&self) -> &ConstSlots {
        &self.const_slots
    }

    pub fn v(&self, k: usize) -> &[W] {
        self.rows.row(k, 0)
    }

    /// Row `r[k][x][slot]`; see [`ConstSlots`] for slot numbering.
    pub fn r(&self, k: usize, x: VarId, slot: usize) -> &[W] {
        self.rows.row(k, self.r_row(x.index(), slot))
    }

    pub fn s(&self, k: usize, x: VarId, y: VarId) -> &[W] {
        self.rows.row(k, self.s_row(x.index(), y.index()))
    }

    pub fn v_bit(&self, k: usize, j: usize) -> bool {
        self.rows.get(k, 0, j)
    }

    pub fn r_bit(&self, k: usize, x: VarId, slot: usize, j: usize) -> bool {
        self.rows.get(k, self.r_row(x.index(), slot), j)
    }

    pub fn s_bit(&self, k: usize, x: VarId, y: VarId, j: usize) -> bool {
        self.rows.get(k, self.s_row(x.index(), y.index()), j)
    }

    pub fn words_in_memory(&self) -> usize {
        self.rows.words_in_memory()
    }
}

/// Preprocessed pattern for FVC-matching, parameterized by the word type of
/// the bit-parallel rows.
#[derive(Debug, Clone)]
pub struct FvcMatcher<W: Word = u64> {
    pattern: PatternString,
    table: ConditionTable,
    bitmaps: FvcBitmaps<W>,
    prefix_vars: Vec<usize>,
}

impl<W: Word> FvcMatcher<W> {
    pub fn new(pattern: &PatternString) -> Self {
        let table = ConditionTable::build(pattern);
        let bitmaps = FvcBitmaps::build(pattern, &table);
        FvcMatcher {
            pattern: pattern.clone(),
            prefix_vars: kmp::prefix_variable_counts(pattern),
            table,
            bitmaps,
        }
    }

    pub fn table(&self) -> &ConditionTable {
        &self.table
    }

    pub fn bitmaps(&self) -> &FvcBitmaps<W> {
        &self.bitmaps
    }

    /// Failure function: for a mismatch after the prefix of length `k`
    /// matched under `pi` (defined on the variables of that prefix),
    /// returns the resume length `j` and the succeeding substitution.
    pub fn failure(&self, k: usize, pi: &Substitution) -> (usize, Substitution) {
        let mut out = Substitution::with_slots(self.pattern.var_slots());
        let j = self.failure_into(k, pi, &mut out, &mut Vec::new());
        (j, out)
    }

    pub fn find(&self, text: &TextString) -> MatchReport {
        kmp::scan(self, text, false)
    }

    /// Like [`find`](Self::find), also recording the substitution in force
    /// at each match.
    pub fn find_with_witnesses(&self, text: &TextString) -> MatchReport {
        kmp::scan(self, text, true)
    }
}

impl<W: Word> FailureFunction<W> for FvcMatcher<W> {
    fn pattern(&self) -> &PatternString {
        &self.pattern
    }

    fn injective(&self) -> bool {
        false
    }

    fn failure_into(
        &self,
        k: usize,
        pi: &Substitution,
        out: &mut Substitution,
        scratch: &mut Vec<W>,
    ) -> usize {
        let bm = &self.bitmaps;
        scratch.clear();
        scratch.extend_from_slice(bm.v(k));
        let dom = &self.pattern.variables()[..self.prefix_vars[k]];
        for &x in dom {
            let Some(c) = pi.get(x) else { continue };
            bitrows::and_assign(scratch, bm.r(k, x, bm.const_slots.slot(c)));
        }
        for &x in dom {
            let Some(px) = pi.get(x) else { continue };
            for &y in dom {
                if x != y && pi.get(y).is_some_and(|py| py != px) {
                    bitrows::and_assign(scratch, bm.s(k, x, y));
                }
            }
        }
        let j = bitrows::highest_set(scratch).expect("shift 0 is always admissible");

        out.clear();
        let entry = self.table.entry(k, j).expect("selected shift is valid");
        for &x in &self.pattern.variables()[..self.prefix_vars[j]] {
            let value = match entry.prime(x).expect("prefix variable has an edge") {
                Symbol::Const(c) => c,
                Symbol::Var(y) => pi.get(y).expect("suffix variable is bound"),
            };
            let _ = out.extend(x, value, false);
        }
        j
    }
}

/// FVC match positions via the extended KMP matcher with 64-bit words.
pub fn match_fvc(pattern: &PatternString, text: &TextString) -> MatchReport {
    FvcMatcher::<u64>::new(pattern).find(text)
}
