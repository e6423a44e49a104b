//! Extended KMP for PVC-matching.
//!
//! Under injective substitutions a shift `(k, j)` needs a shifting graph in
//! which no component holds two constants, two variables, or two primed
//! variables. Such components have at most three nodes, one of each class,
//! so the incremental update per table entry is constant time.

use std::collections::BTreeSet;

use crate::bitrows::{self, RowTable, Word};
use crate::fvc::tri;
use crate::kmp::{self, ConstSlots, FailureFunction};
use crate::oracle::MatchReport;
use crate::substitution::Substitution;
use crate::symbol::{ConstId, PatternString, Symbol, TextString, VarId};

/// A node of the shifting graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(ConstId),
    Var(VarId),
    Prime(VarId),
}

const NONE: u32 = u32::MAX;

/// A component of an injectively valid graph: at most one node per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Component {
    constant: u32,
    var: u32,
    prime: u32,
}

impl Component {
    const EMPTY: Component = Component {
        constant: NONE,
        var: NONE,
        prime: NONE,
    };

    fn of(node: Node) -> Self {
        let mut c = Component::EMPTY;
        match node {
            Node::Const(p) => c.constant = p.0,
            Node::Var(x) => c.var = x.0,
            Node::Prime(x) => c.prime = x.0,
        }
        c
    }

    fn nodes(self) -> impl Iterator<Item = Node> {
        [
            (self.constant != NONE).then_some(Node::Const(ConstId(self.constant))),
            (self.var != NONE).then_some(Node::Var(VarId(self.var))),
            (self.prime != NONE).then_some(Node::Prime(VarId(self.prime))),
        ]
        .into_iter()
        .flatten()
    }

    fn merge(self, other: Component) -> Option<Component> {
        let pick = |a: u32, b: u32| match (a, b) {
            (NONE, b) => Some(b),
            (a, NONE) => Some(a),
            _ => None,
        };
        Some(Component {
            constant: pick(self.constant, other.constant)?,
            var: pick(self.var, other.var)?,
            prime: pick(self.prime, other.prime)?,
        })
    }
}

/// Working state for one diagonal of the injective table.
#[derive(Debug, Clone)]
struct InjectiveState {
    var_comp: Vec<u32>,
    prime_comp: Vec<u32>,
    const_comp: Vec<u32>,
    comps: Vec<Component>,
}

impl InjectiveState {
    fn new(var_slots: usize, const_slots: usize) -> Self {
        InjectiveState {
            var_comp: vec![NONE; var_slots],
            prime_comp: vec![NONE; var_slots],
            const_comp: vec![NONE; const_slots],
            comps: Vec::new(),
        }
    }

    fn handle(&mut self, node: Node, slots: &ConstSlots) -> &mut u32 {
        match node {
            Node::Const(c) => &mut self.const_comp[slots.slot(c)],
            Node::Var(x) => &mut self.var_comp[x.index()],
            Node::Prime(x) => &mut self.prime_comp[x.index()],
        }
    }

    fn comp_of(&mut self, node: Node, slots: &ConstSlots) -> u32 {
        let id = *self.handle(node, slots);
        if id != NONE {
            return id;
        }
        let id = self.comps.len() as u32;
        self.comps.push(Component::of(node));
        *self.handle(node, slots) = id;
        id
    }

    fn component(&self, node: Node, slots: &ConstSlots) -> Component {
        let id = match node {
            Node::Const(c) => self.const_comp[slots.slot(c)],
            Node::Var(x) => self.var_comp[x.index()],
            Node::Prime(x) => self.prime_comp[x.index()],
        };
        if id == NONE {
            Component::of(node)
        } else {
            self.comps[id as usize]
        }
    }

    /// Adds edge `(a, b)`; false if the graph becomes injectively invalid.
    fn add_edge(&mut self, a: Node, b: Node, slots: &ConstSlots) -> bool {
        if let (Node::Const(p), Node::Const(q)) = (a, b) {
            return p == q;
        }
        let ca = self.comp_of(a, slots);
        let cb = self.comp_of(b, slots);
        if ca == cb {
            return true;
        }
        let Some(merged) = self.comps[ca as usize].merge(self.comps[cb as usize]) else {
            return false;
        };
        self.comps[ca as usize] = merged;
        for node in merged.nodes() {
            *self.handle(node, slots) = ca;
        }
        true
    }
}

fn prefix_node(s: Symbol) -> Node {
    match s {
        Symbol::Const(c) => Node::Const(c),
        Symbol::Var(x) => Node::Prime(x),
    }
}

fn suffix_node(s: Symbol) -> Node {
    match s {
        Symbol::Const(c) => Node::Const(c),
        Symbol::Var(x) => Node::Var(x),
    }
}

/// Per-entry summary of the components of variables and primed variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Partners {
    constant: u32,
    other: u32,
}

const NO_PARTNERS: Partners = Partners {
    constant: NONE,
    other: NONE,
};

/// Injective validity and partner maps `F` for every `(k, j)`.
#[derive(Debug, Clone)]
pub struct InjectiveTable {
    m: usize,
    slots: usize,
    valid: Vec<bool>,
    /// Per valid entry: for each variable `x`, the constant and the primed
    /// variable sharing its component.
    var_partners: Vec<Partners>,
    /// Per valid entry: for each primed `x'`, the constant and the variable
    /// sharing its component.
    prime_partners: Vec<Partners>,
}

/// Borrowed view of one injectively valid entry.
#[derive(Debug, Clone, Copy)]
pub struct PartnerEntry<'a> {
    vars: &'a [Partners],
    primes: &'a [Partners],
}

fn opt<T>(raw: u32, f: impl FnOnce(u32) -> T) -> Option<T> {
    (raw != NONE).then(|| f(raw))
}

impl PartnerEntry<'_> {
    /// `F(u)`: the other nodes of `u`'s component (never `u` itself).
    pub fn partners(&self, node: Node) -> BTreeSet<Node> {
        let mut out = BTreeSet::new();
        match node {
            Node::Var(x) => {
                let p = self.vars[x.index()];
                out.extend(opt(p.constant, |c| Node::Const(ConstId(c))));
                out.extend(opt(p.other, |y| Node::Prime(VarId(y))));
            }
            Node::Prime(x) => {
                let p = self.primes[x.index()];
                out.extend(opt(p.constant, |c| Node::Const(ConstId(c))));
                out.extend(opt(p.other, |y| Node::Var(VarId(y))));
            }
            Node::Const(c) => {
                for (y, p) in self.vars.iter().enumerate() {
                    if p.constant == c.0 {
                        out.insert(Node::Var(VarId(y as u32)));
                        out.extend(opt(p.other, |z| Node::Prime(VarId(z))));
                    }
                }
                for (y, p) in self.primes.iter().enumerate() {
                    if p.constant == c.0 {
                        out.insert(Node::Prime(VarId(y as u32)));
                    }
                }
            }
        }
        out
    }

    /// The non-primed partner of `x'` that determines its image.
    pub fn resume_partner(&self, x: VarId) -> Option<Symbol> {
        let p = self.primes[x.index()];
        opt(p.constant, |c| Symbol::Const(ConstId(c)))
            .or_else(|| opt(p.other, |y| Symbol::Var(VarId(y))))
    }
}

impl InjectiveTable {
    pub fn build(pattern: &PatternString) -> Self {
        Self::build_with(pattern, |_, _, _, _| {})
    }

    /// Builds the table, calling `visit(k, j, state, slots)` for every
    /// injectively valid entry while its graph is current.
    fn build_with(
        pattern: &PatternString,
        mut visit: impl FnMut(usize, usize, &InjectiveState, &ConstSlots),
    ) -> Self {
        let m = pattern.len();
        let slots = pattern.var_slots();
        let const_slots = ConstSlots::new(pattern);
        let entries = m * (m + 1) / 2;
        let mut table = InjectiveTable {
            m,
            slots,
            valid: vec![false; entries],
            var_partners: vec![NO_PARTNERS; entries * slots],
            prime_partners: vec![NO_PARTNERS; entries * slots],
        };
        let p = pattern.symbols();
        for d in 1..=m {
            let mut state = InjectiveState::new(slots, const_slots.len());
            table.store(d, 0, &state);
            visit(d, 0, &state, &const_slots);
            for j in 1..=m - d {
                let k = d + j;
                if !state.add_edge(suffix_node(p[k - 1]), prefix_node(p[j - 1]), &const_slots) {
                    break;
                }
                table.store(k, j, &state);
                visit(k, j, &state, &const_slots);
            }
        }
        table
    }

    fn store(&mut self, k: usize, j: usize, state: &InjectiveState) {
        let e = tri(k, j);
        self.valid[e] = true;
        let base = e * self.slots;
        for x in 0..self.slots {
            if let Some(&c) = state.comps.get(state.var_comp[x] as usize) {
                self.var_partners[base + x] = Partners {
                    constant: c.constant,
                    other: c.prime,
                };
            }
            if let Some(&c) = state.comps.get(state.prime_comp[x] as usize) {
                self.prime_partners[base + x] = Partners {
                    constant: c.constant,
                    other: c.var,
                };
            }
        }
    }

    pub fn is_valid(&self, k: usize, j: usize) -> bool {
        j < k && k <= self.m && self.valid[tri(k, j)]
    }

    pub fn entry(&self, k: usize, j: usize) -> Option<PartnerEntry<'_>> {
        self.is_valid(k, j).then(|| {
            let range = tri(k, j) * self.slots..(tri(k, j) + 1) * self.slots;
            PartnerEntry {
                vars: &self.var_partners[range.clone()],
                primes: &self.prime_partners[range],
            }
        })
    }
}

/// Bit rows `v_inj` and `t[x][slot]` for every prefix length `k`.
#[derive(Debug, Clone)]
pub struct PvcBitmaps<W: Word> {
    rows: RowTable<W>,
    const_slots: ConstSlots,
}

impl<W: Word> PvcBitmaps<W> {
    fn t_row(&self, x: usize, slot: usize) -> usize {
        1 + x * self.const_slots.len() + slot
    }

    pub fn const_slots(&self) -> &ConstSlots {
        &self.const_slots
    }

    pub fn v(&self, k: usize) -> &[W] {
        self.rows.row(k, 0)
    }

    pub fn t(&self, k: usize, x: VarId, slot: usize) -> &[W] {
        self.rows.row(k, self.t_row(x.index(), slot))
    }

    pub fn v_bit(&self, k: usize, j: usize) -> bool {
        self.rows.get(k, 0, j)
    }

    pub fn t_bit(&self, k: usize, x: VarId, slot: usize, j: usize) -> bool {
        self.rows.get(k, self.t_row(x.index(), slot), j)
    }
}

/// Builds the injective table and its bitmaps in one pass.
pub fn build_injective<W: Word>(pattern: &PatternString) -> (InjectiveTable, PvcBitmaps<W>) {
    let vs = pattern.var_slots();
    let const_slots = ConstSlots::new(pattern);
    let mut bm = PvcBitmaps {
        rows: RowTable::new(pattern.len(), 1 + vs * const_slots.len()),
        const_slots,
    };
    let consts = pattern.constants().to_vec();
    let table = InjectiveTable::build_with(pattern, |k, j, state, slots| {
        bitrows::set_bit(bm.rows.row_mut(k, 0), j);
        for x in 0..vs {
            let cx = state.component(Node::Var(VarId(x as u32)), slots);
            for (slot, &p) in consts.iter().enumerate() {
                if cx.constant != NONE && cx.constant != p.0 {
                    continue;
                }
                let cp = state.component(Node::Const(p), slots);
                if cx.prime != NONE && cp.prime != NONE && cx.prime != cp.prime {
                    continue;
                }
                let row = bm.t_row(x, slot);
                bitrows::set_bit(bm.rows.row_mut(k, row), j);
            }
            if cx.constant == NONE {
                let row = bm.t_row(x, slots.other());
                bitrows::set_bit(bm.rows.row_mut(k, row), j);
            }
        }
    });
    (table, bm)
}

/// Preprocessed pattern for PVC-matching.
#[derive(Debug, Clone)]
pub struct PvcMatcher<W: Word = u64> {
    pattern: PatternString,
    table: InjectiveTable,
    bitmaps: PvcBitmaps<W>,
    prefix_vars: Vec<usize>,
}

impl<W: Word> PvcMatcher<W> {
    pub fn new(pattern: &PatternString) -> Self {
        let (table, bitmaps) = build_injective(pattern);
        PvcMatcher {
            pattern: pattern.clone(),
            prefix_vars: kmp::prefix_variable_counts(pattern),
            table,
            bitmaps,
        }
    }

    pub fn table(&self) -> &InjectiveTable {
        &self.table
    }

    pub fn bitmaps(&self) -> &PvcBitmaps<W> {
        &self.bitmaps
    }

    /// Injective failure function; `pi` must be injective.
    pub fn failure(&self, k: usize, pi: &Substitution) -> (usize, Substitution) {
        let mut out = Substitution::with_slots(self.pattern.var_slots());
        let j = self.failure_into(k, pi, &mut out, &mut Vec::new());
        (j, out)
    }

    pub fn find(&self, text: &TextString) -> MatchReport {
        kmp::scan(self, text, false)
    }

    pub fn find_with_witnesses(&self, text: &TextString) -> MatchReport {
        kmp::scan(self, text, true)
    }
}

impl<W: Word> FailureFunction<W> for PvcMatcher<W> {
    fn pattern(&self) -> &PatternString {
        &self.pattern
    }

    fn injective(&self) -> bool {
        true
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
        for &x in &self.pattern.variables()[..self.prefix_vars[k]] {
            if let Some(c) = pi.get(x) {
                bitrows::and_assign(scratch, bm.t(k, x, bm.const_slots.slot(c)));
            }
        }
        let j = bitrows::highest_set(scratch).expect("shift 0 is always admissible");

        out.clear();
        let entry = self.table.entry(k, j).expect("selected shift is valid");
        for &x in &self.pattern.variables()[..self.prefix_vars[j]] {
            let value = match entry.resume_partner(x).expect("prefix variable has an edge") {
                Symbol::Const(c) => c,
                Symbol::Var(y) => pi.get(y).expect("suffix variable is bound"),
            };
            let ext = out.extend(x, value, true);
            debug_assert!(ext.is_ok(), "succeeding substitution must be injective");
        }
        j
    }
}

/// PVC match positions via the extended KMP matcher with 64-bit words.
pub fn match_pvc(pattern: &PatternString, text: &TextString) -> MatchReport {
    PvcMatcher::<u64>::new(pattern).find(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fvc::ConditionTable;
    use crate::symbol::{classify_input, Alphabet, VariableCharset};

    fn instance(p: &[u8], t: &[u8]) -> (PatternString, TextString, Alphabet) {
        classify_input(p, t, &VariableCharset::default()).unwrap()
    }

    fn sub(al: &Alphabet, pairs: &[(u8, u8)]) -> Substitution {
        Substitution::from_pairs(
            pairs
                .iter()
                .map(|&(x, c)| (al.var_id(x).unwrap(), al.const_id(c).unwrap())),
        )
    }

    #[test]
    fn injective_validity_of_long_shifts() {
        let (p, _, al) = instance(b"AABaaCbC", b"");
        let table = InjectiveTable::build(&p);
        assert!(!table.is_valid(7, 6));
        let e = table.entry(7, 3).expect("(7,3) injectively valid");
        let [a, b, c] = [b'A', b'B', b'C'].map(|v| al.var_id(v).unwrap());
        let [ca, cb] = [b'a', b'b'].map(|v| al.const_id(v).unwrap());
        assert_eq!(
            e.partners(Node::Const(ca)),
            BTreeSet::from([Node::Prime(a), Node::Var(c)])
        );
        assert_eq!(e.partners(Node::Const(cb)), BTreeSet::from([Node::Prime(b)]));
        assert!(e.partners(Node::Var(a)).is_empty());
        assert_eq!(e.partners(Node::Var(c)), BTreeSet::from([Node::Const(ca), Node::Prime(a)]));
    }

    #[test]
    fn zero_shift_is_edgeless() {
        let (p, _, _) = instance(b"AABaaCbC", b"");
        let table = InjectiveTable::build(&p);
        for k in 1..=p.len() {
            let e = table.entry(k, 0).unwrap();
            for &x in p.variables() {
                assert!(e.partners(Node::Var(x)).is_empty());
                assert!(e.partners(Node::Prime(x)).is_empty());
            }
        }
    }

    #[test]
    fn injective_validity_implies_validity() {
        for raw in [&b"AABaaCbC"[..], b"ABAB", b"AbAbBaB", b"aAaBbCcA"] {
            let (p, _, _) = instance(raw, b"");
            let inj = InjectiveTable::build(&p);
            let plain = ConditionTable::build(&p);
            for k in 1..=p.len() {
                for j in 0..k {
                    assert!(!inj.is_valid(k, j) || plain.is_valid(k, j), "{k},{j}");
                }
            }
        }
    }

    #[test]
    fn t_bitmap_examples() {
        let (p, _, al) = instance(b"AABaaCbC", b"");
        let (_, bm) = build_injective::<u8>(&p);
        let [a, c] = [b'A', b'C'].map(|v| al.var_id(v).unwrap());
        let sa = bm.const_slots().slot(al.const_id(b'a').unwrap());
        let sb = bm.const_slots().slot(al.const_id(b'b').unwrap());
        assert!(bm.t_bit(7, c, sa, 3));
        assert!(!bm.t_bit(7, c, sb, 3));
        for slot in 0..bm.const_slots().len() {
            assert!(!bm.t_bit(7, a, slot, 6));
            for k in 1..=p.len() {
                for &x in p.variables() {
                    assert!(bm.t_bit(k, x, slot, 0));
                }
            }
        }
    }

    #[test]
    fn failure_vectors() {
        let (p, _, al) = instance(b"AABaaCbC", b"abcd");
        let pm = PvcMatcher::<u64>::new(&p);
        let (j, next) = pm.failure(7, &sub(&al, &[(b'A', b'b'), (b'B', b'c'), (b'C', b'a')]));
        assert_eq!(j, 3);
        assert_eq!(next, sub(&al, &[(b'A', b'a'), (b'B', b'b')]));

        let (j, next) = pm.failure(7, &sub(&al, &[(b'A', b'b'), (b'B', b'c'), (b'C', b'd')]));
        assert_eq!(j, 1);
        assert_eq!(next, sub(&al, &[(b'A', b'b')]));

        let (p, _, _) = instance(b"abab", b"");
        let (j, next) = PvcMatcher::<u8>::new(&p).failure(4, &Substitution::new());
        assert_eq!(j, 2);
        assert!(next.is_empty());
    }

    #[test]
    fn cross_component_constant_blocks_shift() {
        // P = AbB: (3,2) puts b, A' and B in one component, (3,1) only
        // links B with A'.
        let (p, _, al) = instance(b"AbB", b"ab");
        let pm = PvcMatcher::<u8>::new(&p);
        let (j, _) = pm.failure(3, &sub(&al, &[(b'A', b'a'), (b'B', b'b')]));
        assert_eq!(j, 2);
        let (j, _) = pm.failure(3, &sub(&al, &[(b'A', b'b'), (b'B', b'a')]));
        assert_eq!(j, 1);
    }

    #[test]
    fn match_examples() {
        let (p, t, _) = instance(b"ABAb", b"ababbbb");
        assert_eq!(match_pvc(&p, &t).positions, [1, 2]);
        let (p, t, _) = instance(b"ab", b"abab");
        assert_eq!(match_pvc(&p, &t).positions, [1, 3]);
        let (p, t, _) = instance(b"AABaaCbC", b"bbaaaabbb");
        assert!(match_pvc(&p, &t).is_empty());
    }
}
