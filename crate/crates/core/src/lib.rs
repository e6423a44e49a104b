//! Pattern matching where pattern variables stand for single text symbols.
//!
//! A pattern over constants and variables matches a window of a constant
//! text if some substitution of constants for variables turns the pattern
//! into the window. In FVC mode any function is allowed; in PVC mode the
//! substitution must be injective.
//!
//! Three interchangeable matchers are provided:
//!
//! * [`oracle::naive_all`]: per-window brute force, O(nm).
//! * [`convolution::conv_match_all`]: wildcard and consistency masks from
//!   FFT correlations, O(|Σ_P| n log m).
//! * [`fvc::FvcMatcher`] / [`pvc::PvcMatcher`]: KMP with a failure function
//!   that depends on the current substitution, evaluated bit-parallel.
//!
//! ```
//! use vcmatch::{classify_input, match_fvc, match_pvc, VariableCharset};
//!
//! let (p, t, _) = classify_input(b"ABAb", b"ababbbb", &VariableCharset::default()).unwrap();
//! assert_eq!(match_fvc(&p, &t).positions, [1, 2, 4]);
//! assert_eq!(match_pvc(&p, &t).positions, [1, 2]);
//! ```

pub mod backend;
pub mod bitrows;
pub mod cli;
pub mod convolution;
pub mod error;
pub mod fvc;
pub mod kmp;
pub mod oracle;
pub mod pvc;
pub mod random;
pub mod substitution;
pub mod symbol;

pub use backend::{Backend, ChunkWidth};
pub use convolution::conv_match_all;
pub use error::{Error, Result};
pub use fvc::{match_fvc, FvcMatcher};
pub use oracle::{naive_all, window_match, MatchReport, Mode};
pub use pvc::{match_pvc, PvcMatcher};
pub use substitution::{Extension, Substitution};
pub use symbol::{classify_input, Alphabet, ConstId, PatternString, Symbol, TextString, VarId, VariableCharset};
