//! Uniform entry point over the three matchers.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::bitrows::Word;
use crate::convolution::{conv_match_with, Evaluation};
use crate::error::Error;
use crate::fvc::FvcMatcher;
use crate::oracle::{naive_all, MatchReport, Mode};
use crate::pvc::PvcMatcher;
use crate::symbol::{PatternString, TextString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Naive,
    Conv,
    Kmp,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Naive, Backend::Conv, Backend::Kmp];
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Naive => "naive",
            Backend::Conv => "conv",
            Backend::Kmp => "kmp",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Backend::Naive),
            "conv" => Ok(Backend::Conv),
            "kmp" => Ok(Backend::Kmp),
            other => Err(format!("unknown backend `{other}`")),
        }
    }
}

/// Word width of the bit-parallel rows used by the KMP matchers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ChunkWidth {
    W8,
    W16,
    W32,
    #[default]
    W64,
}

impl ChunkWidth {
    pub const ALL: [ChunkWidth; 4] = [ChunkWidth::W8, ChunkWidth::W16, ChunkWidth::W32, ChunkWidth::W64];

    pub fn from_bits(bits: usize) -> Option<Self> {
        match bits {
            8 => Some(ChunkWidth::W8),
            16 => Some(ChunkWidth::W16),
            32 => Some(ChunkWidth::W32),
            64 => Some(ChunkWidth::W64),
            _ => None,
        }
    }

    pub fn bits(self) -> usize {
        match self {
            ChunkWidth::W8 => 8,
            ChunkWidth::W16 => 16,
            ChunkWidth::W32 => 32,
            ChunkWidth::W64 => 64,
        }
    }
}

/// A report with its preprocessing and query times.
#[derive(Debug, Clone)]
pub struct Timed {
    pub report: MatchReport,
    pub preprocess: Duration,
    pub query: Duration,
    /// Set when the convolution backend fell back to direct summation.
    pub fallback: Option<String>,
}

fn kmp_timed<W: Word>(
    pattern: &PatternString,
    text: &TextString,
    mode: Mode,
    witnesses: bool,
) -> Timed {
    let start = Instant::now();
    let (report, preprocess, query) = match mode {
        Mode::Fvc => {
            let matcher = FvcMatcher::<W>::new(pattern);
            let preprocess = start.elapsed();
            let q = Instant::now();
            let r = if witnesses {
                matcher.find_with_witnesses(text)
            } else {
                matcher.find(text)
            };
            (r, preprocess, q.elapsed())
        }
        Mode::Pvc => {
            let matcher = PvcMatcher::<W>::new(pattern);
            let preprocess = start.elapsed();
            let q = Instant::now();
            let r = if witnesses {
                matcher.find_with_witnesses(text)
            } else {
                matcher.find(text)
            };
            (r, preprocess, q.elapsed())
        }
    };
    Timed {
        report,
        preprocess,
        query,
        fallback: None,
    }
}

/// Runs one backend. The convolution backend retries with direct
/// summation when its floating-point path would not be exact.
pub fn run_backend(
    backend: Backend,
    pattern: &PatternString,
    text: &TextString,
    mode: Mode,
    width: ChunkWidth,
    witnesses: bool,
) -> Timed {
    match backend {
        Backend::Naive => {
            let start = Instant::now();
            let mut report = naive_all(pattern, text, mode);
            let query = start.elapsed();
            if !witnesses {
                report.witnesses = None;
            }
            Timed {
                report,
                preprocess: Duration::ZERO,
                query,
                fallback: None,
            }
        }
        Backend::Conv => {
            let start = Instant::now();
            let (mut report, fallback) = match conv_match_with(pattern, text, mode, Evaluation::Fft) {
                Ok(r) => (r, None),
                Err(e @ Error::OverflowRisk { .. }) => (
                    conv_match_with(pattern, text, mode, Evaluation::Direct)
                        .expect("direct evaluation cannot overflow"),
                    Some(e.to_string()),
                ),
                Err(e) => unreachable!("convolution backend failed: {e}"),
            };
            let query = start.elapsed();
            if witnesses {
                report.attach_witnesses(pattern, text, mode);
            }
            Timed {
                report,
                preprocess: Duration::ZERO,
                query,
                fallback,
            }
        }
        Backend::Kmp => match width {
            ChunkWidth::W8 => kmp_timed::<u8>(pattern, text, mode, witnesses),
            ChunkWidth::W16 => kmp_timed::<u16>(pattern, text, mode, witnesses),
            ChunkWidth::W32 => kmp_timed::<u32>(pattern, text, mode, witnesses),
            ChunkWidth::W64 => kmp_timed::<u64>(pattern, text, mode, witnesses),
        },
    }
}

/// Positions reported by `backend`.
pub fn positions(
    backend: Backend,
    pattern: &PatternString,
    text: &TextString,
    mode: Mode,
    width: ChunkWidth,
) -> Vec<usize> {
    run_backend(backend, pattern, text, mode, width, false)
        .report
        .positions
}

/// Result of running every backend on one instance.
#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub results: Vec<(Backend, Timed)>,
}

impl CrossCheck {
    pub fn run(
        pattern: &PatternString,
        text: &TextString,
        mode: Mode,
        width: ChunkWidth,
        witnesses: bool,
    ) -> Self {
        CrossCheck {
            results: Backend::ALL
                .iter()
                .map(|&b| (b, run_backend(b, pattern, text, mode, width, witnesses)))
                .collect(),
        }
    }

    pub fn agree(&self) -> bool {
        self.results
            .windows(2)
            .all(|w| w[0].1.report.positions == w[1].1.report.positions)
    }

    /// The oracle's report.
    pub fn reference(&self) -> &Timed {
        &self.results[0].1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{classify_input, VariableCharset};

    #[test]
    fn all_backends_small_instance() {
        let (p, t, _) = classify_input(b"ABAb", b"ababbbb", &VariableCharset::default()).unwrap();
        for width in ChunkWidth::ALL {
            let fvc = CrossCheck::run(&p, &t, Mode::Fvc, width, true);
            assert!(fvc.agree());
            assert_eq!(fvc.reference().report.positions, [1, 2, 4]);
            for (_, timed) in &fvc.results {
                assert_eq!(timed.report.witnesses.as_ref().unwrap().len(), 3);
            }
            let pvc = CrossCheck::run(&p, &t, Mode::Pvc, width, false);
            assert!(pvc.agree());
            assert_eq!(pvc.reference().report.positions, [1, 2]);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("kmp".parse::<Backend>().unwrap(), Backend::Kmp);
        assert!("fft".parse::<Backend>().is_err());
        assert_eq!(ChunkWidth::from_bits(16), Some(ChunkWidth::W16));
        assert_eq!(ChunkWidth::from_bits(12), None);
    }
}
