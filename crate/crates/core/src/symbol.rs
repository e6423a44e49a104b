//! Symbols, pattern and text strings, and raw-input classification.
//!
//! Constants and variables live in two disjoint registries. Ids are dense
//! and assigned in order of first appearance, so "least variable" always
//! means "the variable that appeared first in the pattern".

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Id of a constant symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstId(pub u32);

/// Id of a variable symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl ConstId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Const(ConstId),
    Var(VarId),
}

impl Symbol {
    pub fn is_var(self) -> bool {
        matches!(self, Symbol::Var(_))
    }

    pub fn as_const(self) -> Option<ConstId> {
        match self {
            Symbol::Const(c) => Some(c),
            Symbol::Var(_) => None,
        }
    }

    pub fn as_var(self) -> Option<VarId> {
        match self {
            Symbol::Var(x) => Some(x),
            Symbol::Const(_) => None,
        }
    }
}

/// A pattern over constants and variables, with per-variable occurrence data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternString {
    symbols: Vec<Symbol>,
    constants: Vec<ConstId>,
    variables: Vec<VarId>,
    var_slots: usize,
    occurrences: BTreeMap<VarId, Vec<usize>>,
}

impl PatternString {
    /// Builds a pattern from raw symbols. `constants` and `variables` are
    /// listed in first-appearance order.
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let mut constants = Vec::new();
        let mut variables = Vec::new();
        let mut occurrences: BTreeMap<VarId, Vec<usize>> = BTreeMap::new();
        for (j, &sym) in symbols.iter().enumerate() {
            match sym {
                Symbol::Const(c) => {
                    if !constants.contains(&c) {
                        constants.push(c);
                    }
                }
                Symbol::Var(x) => {
                    let occ = occurrences.entry(x).or_default();
                    if occ.is_empty() {
                        variables.push(x);
                    }
                    occ.push(j);
                }
            }
        }
        let var_slots = variables.iter().map(|x| x.index() + 1).max().unwrap_or(0);
        Ok(PatternString {
            symbols,
            constants,
            variables,
            var_slots,
            occurrences,
        })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// Always false: patterns are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Constants occurring in the pattern (Σ_P), first-appearance order.
    pub fn constants(&self) -> &[ConstId] {
        &self.constants
    }

    /// Variables occurring in the pattern (Π_P), first-appearance order.
    pub fn variables(&self) -> &[VarId] {
        &self.variables
    }

    /// Size of the variable id space: one more than the largest variable id.
    pub fn var_slots(&self) -> usize {
        self.var_slots
    }

    pub fn occurrence_count(&self, x: VarId) -> usize {
        self.occurrences.get(&x).map_or(0, Vec::len)
    }

    /// Sorted 0-based positions where `x` occurs.
    pub fn occurrences(&self, x: VarId) -> &[usize] {
        self.occurrences.get(&x).map_or(&[], Vec::as_slice)
    }

    pub fn is_variable_free(&self) -> bool {
        self.variables.is_empty()
    }
}

/// A text: constants only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TextString {
    symbols: Vec<ConstId>,
}

impl TextString {
    pub fn new(symbols: Vec<ConstId>) -> Self {
        TextString { symbols }
    }

    pub fn symbols(&self) -> &[ConstId] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Byte-level registries mapping ids back to the input bytes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    constants: Vec<u8>,
    variables: Vec<u8>,
    const_ids: BTreeMap<u8, ConstId>,
    var_ids: BTreeMap<u8, VarId>,
}

impl Alphabet {
    fn constant(&mut self, b: u8) -> ConstId {
        if let Some(&id) = self.const_ids.get(&b) {
            return id;
        }
        let id = ConstId(self.constants.len() as u32);
        self.constants.push(b);
        self.const_ids.insert(b, id);
        id
    }

    fn variable(&mut self, b: u8) -> VarId {
        if let Some(&id) = self.var_ids.get(&b) {
            return id;
        }
        let id = VarId(self.variables.len() as u32);
        self.variables.push(b);
        self.var_ids.insert(b, id);
        id
    }

    pub fn constant_count(&self) -> usize {
        self.constants.len()
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn constant_byte(&self, c: ConstId) -> Option<u8> {
        self.constants.get(c.index()).copied()
    }

    pub fn variable_byte(&self, x: VarId) -> Option<u8> {
        self.variables.get(x.index()).copied()
    }

    pub fn const_id(&self, b: u8) -> Option<ConstId> {
        self.const_ids.get(&b).copied()
    }

    pub fn var_id(&self, b: u8) -> Option<VarId> {
        self.var_ids.get(&b).copied()
    }

    pub fn render(&self, sym: Symbol) -> char {
        let b = match sym {
            Symbol::Const(c) => self.constant_byte(c),
            Symbol::Var(x) => self.variable_byte(x),
        };
        b.map_or('?', char::from)
    }
}

/// Set of bytes that denote variables in a raw pattern.
#[derive(Clone, PartialEq, Eq)]
pub struct VariableCharset([bool; 256]);

impl VariableCharset {
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut set = [false; 256];
        for &b in bytes {
            set[b as usize] = true;
        }
        VariableCharset(set)
    }

    pub fn contains(&self, b: u8) -> bool {
        self.0[b as usize]
    }
}

impl Default for VariableCharset {
    /// ASCII uppercase letters.
    fn default() -> Self {
        Self::from_bytes(&(b'A'..=b'Z').collect::<Vec<_>>())
    }
}

impl fmt::Debug for VariableCharset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: String = (0..=255u8)
            .filter(|&b| self.contains(b))
            .map(|b| b.escape_ascii().to_string())
            .collect();
        f.debug_tuple("VariableCharset").field(&members).finish()
    }
}

/// Splits raw bytes into a pattern and a text.
///
/// Pattern bytes in `variables` become variables; every other pattern byte
/// and every text byte becomes a constant. Pattern bytes are registered
/// before text bytes.
pub fn classify_input(
    raw_pattern: &[u8],
    raw_text: &[u8],
    variables: &VariableCharset,
) -> Result<(PatternString, TextString, Alphabet)> {
    if raw_pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let mut alphabet = Alphabet::default();
    let symbols = raw_pattern
        .iter()
        .map(|&b| {
            if variables.contains(b) {
                Symbol::Var(alphabet.variable(b))
            } else {
                Symbol::Const(alphabet.constant(b))
            }
        })
        .collect();
    let text = raw_text.iter().map(|&b| alphabet.constant(b)).collect();
    Ok((PatternString::new(symbols)?, TextString::new(text), alphabet))
}
