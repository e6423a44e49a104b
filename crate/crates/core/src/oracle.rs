//! Brute-force per-window matcher. Slow and obvious; everything else is
//! checked against it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::substitution::Substitution;
use crate::symbol::{PatternString, Symbol, TextString};

/// Matching semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Any function from variables to constants.
    Fvc,
    /// Injective functions only.
    Pvc,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Fvc, Mode::Pvc];

    pub fn injective(self) -> bool {
        self == Mode::Pvc
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fvc => "fvc",
            Mode::Pvc => "pvc",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fvc" => Ok(Mode::Fvc),
            "pvc" => Ok(Mode::Pvc),
            other => Err(format!("unknown mode `{other}` (expected fvc or pvc)")),
        }
    }
}

/// Match positions (1-based, strictly increasing) and optional witnesses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchReport {
    pub positions: Vec<usize>,
    pub witnesses: Option<BTreeMap<usize, Substitution>>,
}

impl MatchReport {
    pub fn from_positions(positions: Vec<usize>) -> Self {
        MatchReport {
            positions,
            witnesses: None,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Fills `witnesses` by re-running the oracle on each reported window.
    pub fn attach_witnesses(&mut self, pattern: &PatternString, text: &TextString, mode: Mode) {
        if self.witnesses.is_some() {
            return;
        }
        let witnesses = self
            .positions
            .iter()
            .filter_map(|&i| {
                window_match(pattern, text, i, mode.injective())
                    .ok()
                    .flatten()
                    .map(|w| (i, w))
            })
            .collect();
        self.witnesses = Some(witnesses);
    }
}

/// Decides whether `pattern` matches the window of `text` starting at the
/// 1-based index `i`, returning the witness substitution on success.
///
/// Each variable's image is forced by its first occurrence in the window, so
/// binding greedily left to right finds a substitution whenever one exists.
pub fn window_match(
    pattern: &PatternString,
    text: &TextString,
    i: usize,
    injective: bool,
) -> Result<Option<Substitution>> {
    let m = pattern.len();
    let n = text.len();
    if m > n || i == 0 || i > n - m + 1 {
        return Err(Error::IndexOutOfRange {
            index: i,
            last: (n + 1).saturating_sub(m),
        });
    }
    let window = &text.symbols()[i - 1..i - 1 + m];
    let mut pi = Substitution::new();
    for (&p, &t) in pattern.symbols().iter().zip(window) {
        let ok = match p {
            Symbol::Const(c) => c == t,
            Symbol::Var(x) => pi.extend(x, t, injective).is_ok(),
        };
        if !ok {
            return Ok(None);
        }
    }
    Ok(Some(pi))
}

/// All windows where the pattern matches, in O(nm) time.
pub fn naive_all(pattern: &PatternString, text: &TextString, mode: Mode) -> MatchReport {
    let m = pattern.len();
    let n = text.len();
    if m > n {
        return MatchReport {
            positions: Vec::new(),
            witnesses: Some(BTreeMap::new()),
        };
    }
    let mut positions = Vec::new();
    let mut witnesses = BTreeMap::new();
    for i in 1..=n - m + 1 {
        if let Some(w) = window_match(pattern, text, i, mode.injective())
            .expect("window index is in range")
        {
            positions.push(i);
            witnesses.insert(i, w);
        }
    }
    MatchReport {
        positions,
        witnesses: Some(witnesses),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{classify_input, VariableCharset};
    use proptest::prelude::*;

    fn instance(p: &[u8], t: &[u8]) -> (PatternString, TextString, crate::symbol::Alphabet) {
        classify_input(p, t, &VariableCharset::default()).unwrap()
    }

    #[test]
    fn window_small_instance() {
        let (p, t, al) = instance(b"ABAb", b"ababbbb");
        let b = al.const_id(b'b').unwrap();
        let w = window_match(&p, &t, 4, false).unwrap().unwrap();
        assert_eq!(w.get(al.var_id(b'A').unwrap()), Some(b));
        assert_eq!(w.get(al.var_id(b'B').unwrap()), Some(b));
        assert!(window_match(&p, &t, 4, true).unwrap().is_none());
        assert!(window_match(&p, &t, 3, false).unwrap().is_none());
    }

    #[test]
    fn window_out_of_range() {
        let (p, t, _) = instance(b"ABAb", b"ababbbb");
        assert!(matches!(
            window_match(&p, &t, 0, false),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            window_match(&p, &t, 5, false),
            Err(Error::IndexOutOfRange { index: 5, last: 4 })
        ));
    }

    #[test]
    fn naive_examples() {
        let (p, t, _) = instance(b"ABAb", b"ababbbb");
        assert_eq!(naive_all(&p, &t, Mode::Fvc).positions, [1, 2, 4]);
        assert_eq!(naive_all(&p, &t, Mode::Pvc).positions, [1, 2]);

        let (p, t, _) = instance(b"ab", b"abab");
        for mode in Mode::ALL {
            assert_eq!(naive_all(&p, &t, mode).positions, [1, 3]);
        }

        let (p, t, _) = instance(b"AABaaCbC", b"bbaaaabbb");
        assert!(naive_all(&p, &t, Mode::Fvc).is_empty());
        assert!(naive_all(&p, &t, Mode::Pvc).is_empty());
    }

    #[test]
    fn pattern_longer_than_text() {
        let (p, t, _) = instance(b"ABC", b"ab");
        assert!(naive_all(&p, &t, Mode::Fvc).is_empty());
    }

    #[test]
    fn witnesses_reproduce_windows() {
        let (p, t, _) = instance(b"ABAb", b"ababbbb");
        let report = naive_all(&p, &t, Mode::Fvc);
        for (&i, w) in report.witnesses.as_ref().unwrap() {
            let img = w.apply(p.symbols()).unwrap();
            let window: Vec<Symbol> = t.symbols()[i - 1..i - 1 + p.len()]
                .iter()
                .map(|&c| Symbol::Const(c))
                .collect();
            assert_eq!(img, window);
            assert_eq!(w.len(), p.variables().len());
        }
    }

    #[test]
    fn mode_parse() {
        assert_eq!("PVC".parse::<Mode>().unwrap(), Mode::Pvc);
        assert!("xyz".parse::<Mode>().is_err());
    }

    /// Exhaustive search over every function from Π_P into the window's
    /// constants; independent of the greedy construction.
    fn exhaustive_window(p: &PatternString, window: &[crate::symbol::ConstId], injective: bool) -> bool {
        let vars = p.variables();
        let mut values: Vec<_> = window.to_vec();
        values.sort();
        values.dedup();
        let mut choice = vec![0usize; vars.len()];
        loop {
            let ok_inj = !injective || {
                let mut img: Vec<_> = choice.iter().map(|&c| values[c]).collect();
                img.sort();
                img.windows(2).all(|w| w[0] != w[1])
            };
            if ok_inj {
                let pi = Substitution::from_pairs(vars.iter().zip(&choice).map(|(&x, &c)| (x, values[c])));
                let img = pi.apply(p.symbols()).unwrap();
                if img.iter().zip(window).all(|(s, &c)| *s == Symbol::Const(c)) {
                    return true;
                }
            }
            let mut d = 0;
            loop {
                if d == choice.len() {
                    return false;
                }
                choice[d] += 1;
                if choice[d] < values.len() {
                    break;
                }
                choice[d] = 0;
                d += 1;
            }
        }
    }

    proptest! {
        #[test]
        fn greedy_is_complete(
            p in "[ABCab]{1,5}",
            t in "[abc]{5,9}",
        ) {
            let (p, t, _) = instance(p.as_bytes(), t.as_bytes());
            let m = p.len();
            for i in 1..=t.len() - m + 1 {
                let window = &t.symbols()[i - 1..i - 1 + m];
                for inj in [false, true] {
                    let greedy = window_match(&p, &t, i, inj).unwrap().is_some();
                    prop_assert_eq!(greedy, exhaustive_window(&p, window, inj));
                }
            }
        }

        #[test]
        fn pvc_subset_of_fvc(p in "[ABCab]{1,6}", t in "[abc]{0,20}") {
            let (p, t, _) = instance(p.as_bytes(), t.as_bytes());
            let f = naive_all(&p, &t, Mode::Fvc).positions;
            for i in naive_all(&p, &t, Mode::Pvc).positions {
                prop_assert!(f.contains(&i));
            }
        }

        #[test]
        fn constant_patterns_are_exact_search(p in "[ab]{1,4}", t in "[ab]{0,20}") {
            let expected: Vec<usize> = (0..t.len().saturating_sub(p.len()).wrapping_add(1))
                .filter(|&i| t.len() >= p.len() && t.as_bytes()[i..].starts_with(p.as_bytes()))
                .map(|i| i + 1)
                .collect();
            let (pp, tt, _) = instance(p.as_bytes(), t.as_bytes());
            for mode in Mode::ALL {
                prop_assert_eq!(&naive_all(&pp, &tt, mode).positions, &expected);
            }
        }
    }
}
