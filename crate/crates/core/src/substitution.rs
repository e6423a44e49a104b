//! Partial maps from variables to constants.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::symbol::{ConstId, Symbol, VarId};

/// Outcome of [`Substitution::extend`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[must_use]
pub enum Extension {
    Ok,
    Conflict,
}

impl Extension {
    pub fn is_ok(self) -> bool {
        self == Extension::Ok
    }
}

/// A partial map variable -> constant with an inverse index.
///
/// The inverse index is what makes the injectivity check O(1).
#[derive(Debug, Clone, Default)]
pub struct Substitution {
    forward: Vec<Option<ConstId>>,
    inverse: HashMap<ConstId, Vec<VarId>>,
    len: usize,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_slots(slots: usize) -> Self {
        Substitution {
            forward: vec![None; slots],
            ..Default::default()
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, ConstId)>>(pairs: I) -> Self {
        let mut sub = Substitution::new();
        for (x, c) in pairs {
            sub.set(x, c);
        }
        sub
    }

    pub fn get(&self, x: VarId) -> Option<ConstId> {
        self.forward.get(x.index()).copied().flatten()
    }

    pub fn contains(&self, x: VarId) -> bool {
        self.get(x).is_some()
    }

    /// Variables currently mapped to `c`, in id order.
    pub fn preimage(&self, c: ConstId) -> &[VarId] {
        self.inverse.get(&c).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_injective(&self) -> bool {
        self.inverse.values().all(|vs| vs.len() <= 1)
    }

    pub fn clear(&mut self) {
        self.forward.iter_mut().for_each(|slot| *slot = None);
        self.inverse.clear();
        self.len = 0;
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, ConstId)> + '_ {
        self.forward
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (VarId(i as u32), c)))
    }

    pub fn to_map(&self) -> BTreeMap<VarId, ConstId> {
        self.iter().collect()
    }

    /// Binds `x -> c` unconditionally, replacing any previous image.
    fn set(&mut self, x: VarId, c: ConstId) {
        if x.index() >= self.forward.len() {
            self.forward.resize(x.index() + 1, None);
        }
        if let Some(old) = self.forward[x.index()].replace(c) {
            if let Some(vs) = self.inverse.get_mut(&old) {
                vs.retain(|&y| y != x);
                if vs.is_empty() {
                    self.inverse.remove(&old);
                }
            }
        } else {
            self.len += 1;
        }
        let vs = self.inverse.entry(c).or_default();
        if let Err(at) = vs.binary_search(&x) {
            vs.insert(at, x);
        }
    }

    /// Tries to add `x -> c`.
    ///
    /// A bound `x` succeeds only if it already maps to `c`. When `injective`
    /// is set, binding to a constant that already has a preimage conflicts.
    /// On conflict the substitution is left unchanged.
    pub fn extend(&mut self, x: VarId, c: ConstId, injective: bool) -> Extension {
        match self.get(x) {
            Some(d) if d == c => Extension::Ok,
            Some(_) => Extension::Conflict,
            None if injective && !self.preimage(c).is_empty() => Extension::Conflict,
            None => {
                self.set(x, c);
                Extension::Ok
            }
        }
    }

    /// Position-wise image of `symbols`: variables replaced, constants kept.
    pub fn apply(&self, symbols: &[Symbol]) -> Result<Vec<Symbol>> {
        symbols
            .iter()
            .map(|&s| match s {
                Symbol::Const(_) => Ok(s),
                Symbol::Var(x) => self
                    .get(x)
                    .map(Symbol::Const)
                    .ok_or(Error::UndefinedVariable(x)),
            })
            .collect()
    }

    /// Checks that the inverse index is exactly the inverse of the forward map.
    pub fn is_consistent(&self) -> bool {
        let mut rebuilt: HashMap<ConstId, BTreeSet<VarId>> = HashMap::new();
        for (x, c) in self.iter() {
            rebuilt.entry(c).or_default().insert(x);
        }
        rebuilt.len() == self.inverse.len()
            && self.len == self.iter().count()
            && rebuilt.iter().all(|(c, xs)| {
                self.inverse
                    .get(c)
                    .is_some_and(|vs| vs.iter().copied().collect::<BTreeSet<_>>() == *xs)
            })
    }
}

impl PartialEq for Substitution {
    fn eq(&self, other: &Self) -> bool {
        self.iter().eq(other.iter())
    }
}

impl Eq for Substitution {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{classify_input, VariableCharset};
    use proptest::prelude::*;

    const A: VarId = VarId(0);
    const B: VarId = VarId(1);
    const LA: ConstId = ConstId(0);
    const LB: ConstId = ConstId(1);

    #[test]
    fn apply_small_instance() {
        let (p, _, al) = classify_input(b"ABAb", b"ab", &VariableCharset::default()).unwrap();
        let a = al.const_id(b'a').unwrap();
        let b = al.const_id(b'b').unwrap();
        let pi = Substitution::from_pairs([(A, a), (B, b)]);
        let img = pi.apply(p.symbols()).unwrap();
        assert_eq!(img, [a, b, a, b].map(Symbol::Const));

        let pi = Substitution::from_pairs([(A, b), (B, b)]);
        let img = pi.apply(p.symbols()).unwrap();
        assert_eq!(img, [b; 4].map(Symbol::Const));
        assert!(!pi.is_injective());
    }

    #[test]
    fn apply_constants_only() {
        let syms = [Symbol::Const(LA), Symbol::Const(LB)];
        assert_eq!(Substitution::new().apply(&syms).unwrap(), syms);
    }

    #[test]
    fn apply_undefined_variable() {
        let syms = [Symbol::Var(B)];
        let pi = Substitution::from_pairs([(A, LA)]);
        assert!(matches!(pi.apply(&syms), Err(Error::UndefinedVariable(x)) if x == B));
    }

    #[test]
    fn extend_cases() {
        let mut pi = Substitution::new();
        assert_eq!(pi.extend(A, LB, true), Extension::Ok);
        assert_eq!(pi.get(A), Some(LB));

        let before = pi.clone();
        assert_eq!(pi.extend(B, LB, true), Extension::Conflict);
        assert_eq!(pi, before);

        assert_eq!(pi.extend(B, LB, false), Extension::Ok);
        assert_eq!(pi.to_map().len(), 2);
        assert_eq!(pi.preimage(LB), &[A, B]);

        assert_eq!(pi.extend(A, LA, false), Extension::Conflict);
        assert_eq!(pi.get(A), Some(LB));
    }

    #[test]
    fn clear_keeps_consistency() {
        let mut pi = Substitution::from_pairs([(A, LA), (B, LB)]);
        pi.clear();
        assert!(pi.is_empty());
        assert!(pi.is_consistent());
        assert_eq!(pi.extend(B, LA, true), Extension::Ok);
        assert_eq!(pi.len(), 1);
    }

    proptest! {
        #[test]
        fn apply_preserves_length_and_constants(
            raw in prop::collection::vec((any::<bool>(), 0u32..6), 1..20),
            images in prop::collection::vec(0u32..6, 6),
        ) {
            let syms: Vec<Symbol> = raw
                .iter()
                .map(|&(v, id)| if v { Symbol::Var(VarId(id)) } else { Symbol::Const(ConstId(id)) })
                .collect();
            let pi = Substitution::from_pairs(images.iter().enumerate().map(|(i, &c)| (VarId(i as u32), ConstId(c))));
            let out = pi.apply(&syms).unwrap();
            prop_assert_eq!(out.len(), syms.len());
            for (s, o) in syms.iter().zip(&out) {
                prop_assert!(!o.is_var());
                if !s.is_var() {
                    prop_assert_eq!(s, o);
                }
            }
        }

        #[test]
        fn extend_is_idempotent_and_consistent(
            ops in prop::collection::vec((0u32..5, 0u32..5, any::<bool>()), 0..40),
        ) {
            let mut pi = Substitution::new();
            for (x, c, inj) in ops {
                let (x, c) = (VarId(x), ConstId(c));
                let first = pi.extend(x, c, inj);
                let snapshot = pi.clone();
                let second = pi.extend(x, c, inj);
                if first.is_ok() {
                    prop_assert_eq!(second, Extension::Ok);
                    prop_assert_eq!(&pi, &snapshot);
                }
                prop_assert!(pi.is_consistent());
            }
        }

        #[test]
        fn injective_extension_stays_injective(
            ops in prop::collection::vec((0u32..6, 0u32..4), 0..40),
        ) {
            let mut pi = Substitution::new();
            for (x, c) in ops {
                let _ = pi.extend(VarId(x), ConstId(c), true);
                prop_assert!(pi.is_injective());
                prop_assert!(pi.is_consistent());
            }
        }
    }
}
