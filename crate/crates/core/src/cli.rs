//! Command-line front end: `find`, `crosscheck` and `bench`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::backend::{run_backend, Backend, ChunkWidth, CrossCheck, Timed};
use crate::oracle::Mode;
use crate::random::{random_instance, random_pattern, random_text, InstanceShape};
use crate::substitution::Substitution;
use crate::symbol::{classify_input, Alphabet, VariableCharset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISAGREE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vcmatch", version, about = "Pattern matching with variables-to-constants substitutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report every window of the text that the pattern matches.
    Find(FindArgs),
    /// Run all backends on random instances and compare.
    Crosscheck(CrosscheckArgs),
    /// Time the backends over a grid of text lengths (CSV on stdout).
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fvc,
    Pvc,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fvc => Mode::Fvc,
            ModeArg::Pvc => Mode::Pvc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Naive,
    Conv,
    Kmp,
    All,
}

#[derive(Debug, Args)]
pub struct FindArgs {
    #[arg(long, conflicts_with = "pattern_file", required_unless_present = "pattern_file")]
    pub pattern: Option<String>,
    #[arg(long)]
    pub pattern_file: Option<PathBuf>,
    /// Read the text from a file (raw bytes). Without any text flag the text
    /// is read from standard input.
    #[arg(long, conflicts_with = "text_inline")]
    pub text_file: Option<PathBuf>,
    #[arg(long)]
    pub text_inline: Option<String>,
    #[arg(long, value_enum, default_value = "fvc")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "kmp")]
    pub algo: AlgoArg,
    /// Pattern bytes treated as variables.
    #[arg(long, default_value = "ABCDEFGHIJKLMNOPQRSTUVWXYZ")]
    pub variables: String,
    #[arg(long)]
    pub json: bool,
    /// Also print a witness substitution for each match.
    #[arg(long)]
    pub witness: bool,
    #[arg(long, default_value_t = 64, value_parser = parse_chunk_width)]
    pub chunk_width: usize,
}

#[derive(Debug, Args)]
pub struct CrosscheckArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    /// Number of distinct variables available to patterns.
    #[arg(long, default_value_t = 3)]
    pub vars: usize,
    /// Number of distinct constants.
    #[arg(long, default_value_t = 3)]
    pub consts: usize,
    #[arg(long, default_value_t = 10)]
    pub max_m: usize,
    #[arg(long, default_value_t = 50)]
    pub max_n: usize,
    #[arg(long)]
    pub adversarial: bool,
    #[arg(long, default_value_t = 64, value_parser = parse_chunk_width)]
    pub chunk_width: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    /// Text lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize << 14, 1 << 15, 1 << 16])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    pub vars: usize,
    #[arg(long, default_value_t = 4)]
    pub consts: usize,
    /// Timed repetitions per cell; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', default_values_t = ["naive".to_string(), "conv".to_string(), "kmp".to_string()])]
    pub algos: Vec<String>,
    #[arg(long, default_value_t = 64, value_parser = parse_chunk_width)]
    pub chunk_width: usize,
}

fn parse_chunk_width(s: &str) -> Result<usize, String> {
    let bits: usize = s.parse().map_err(|e| format!("{e}"))?;
    ChunkWidth::from_bits(bits)
        .map(|_| bits)
        .ok_or_else(|| "chunk width must be 8, 16, 32 or 64".to_string())
}

fn width(bits: usize) -> ChunkWidth {
    ChunkWidth::from_bits(bits).unwrap_or_default()
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Find(a) => run_find(&a, stdin, out, err),
        Command::Crosscheck(a) => run_crosscheck(&a, out),
        Command::Bench(a) => run_bench(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

#[derive(Debug, Serialize)]
struct Timings {
    preprocess_ns: u128,
    query_ns: u128,
}

#[derive(Debug, Serialize)]
struct FindOutput<'a> {
    positions: &'a [usize],
    count: usize,
    algo: &'static str,
    mode: Mode,
    m: usize,
    n: usize,
    timings: Timings,
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witnesses: Option<BTreeMap<usize, BTreeMap<String, String>>>,
}

fn render_witness(alphabet: &Alphabet, w: &Substitution) -> BTreeMap<String, String> {
    w.iter()
        .map(|(x, c)| {
            let x = alphabet.variable_byte(x).map_or('?', char::from).to_string();
            let c = alphabet.constant_byte(c).map_or('?', char::from).to_string();
            (x, c)
        })
        .collect()
}

fn read_source(path: &PathBuf) -> io::Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Runs `find`; the exit code follows [`EXIT_OK`], [`EXIT_DISAGREE`] and
/// [`EXIT_INVALID`].
pub fn run_find(
    args: &FindArgs,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let raw_pattern = match (&args.pattern, &args.pattern_file) {
        (Some(p), _) => p.as_bytes().to_vec(),
        (None, Some(path)) => {
            let mut bytes = read_source(path)?;
            if bytes.ends_with(b"\n") {
                bytes.pop();
                if bytes.ends_with(b"\r") {
                    bytes.pop();
                }
            }
            bytes
        }
        (None, None) => unreachable!("clap requires a pattern source"),
    };
    let raw_text = match (&args.text_inline, &args.text_file) {
        (Some(t), _) => t.as_bytes().to_vec(),
        (None, Some(path)) => read_source(path)?,
        (None, None) => {
            let mut buf = Vec::new();
            stdin.read_to_end(&mut buf)?;
            buf
        }
    };
    let charset = VariableCharset::from_bytes(args.variables.as_bytes());
    let (pattern, text, alphabet) = match classify_input(&raw_pattern, &raw_text, &charset) {
        Ok(v) => v,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_INVALID);
        }
    };
    let mode = Mode::from(args.mode);
    let width = width(args.chunk_width);

    let (algo, timed, agree): (&'static str, Timed, Option<bool>) = match args.algo {
        AlgoArg::All => {
            let check = CrossCheck::run(&pattern, &text, mode, width, args.witness);
            let agree = check.agree();
            if !agree {
                for (b, t) in &check.results {
                    writeln!(err, "{b}: {:?}", t.report.positions)?;
                }
            }
            let mut total = check.reference().clone();
            total.preprocess = check.results.iter().map(|(_, t)| t.preprocess).sum::<Duration>();
            total.query = check.results.iter().map(|(_, t)| t.query).sum::<Duration>();
            total.fallback = check.results.iter().find_map(|(_, t)| t.fallback.clone());
            ("all", total, Some(agree))
        }
        single => {
            let backend = match single {
                AlgoArg::Naive => Backend::Naive,
                AlgoArg::Conv => Backend::Conv,
                _ => Backend::Kmp,
            };
            let name = match backend {
                Backend::Naive => "naive",
                Backend::Conv => "conv",
                Backend::Kmp => "kmp",
            };
            (name, run_backend(backend, &pattern, &text, mode, width, args.witness), None)
        }
    };
    if let Some(e) = &timed.fallback {
        writeln!(err, "warning: {e}; used direct correlation")?;
    }

    let report = &timed.report;
    let witnesses = report.witnesses.as_ref().filter(|_| args.witness);
    if args.json {
        let doc = FindOutput {
            positions: &report.positions,
            count: report.positions.len(),
            algo,
            mode,
            m: pattern.len(),
            n: text.len(),
            timings: Timings {
                preprocess_ns: timed.preprocess.as_nanos(),
                query_ns: timed.query.as_nanos(),
            },
            agree,
            witnesses: witnesses.map(|ws| {
                ws.iter()
                    .map(|(&i, w)| (i, render_witness(&alphabet, w)))
                    .collect()
            }),
        };
        serde_json::to_writer(&mut *out, &doc)?;
        writeln!(out)?;
    } else {
        for &i in &report.positions {
            match witnesses.and_then(|ws| ws.get(&i)) {
                Some(w) => {
                    let pairs: Vec<String> = render_witness(&alphabet, w)
                        .into_iter()
                        .map(|(x, c)| format!("{x}={c}"))
                        .collect();
                    writeln!(out, "{i}\t{}", pairs.join(" "))?;
                }
                None => writeln!(out, "{i}")?,
            }
        }
    }
    Ok(if agree == Some(false) { EXIT_DISAGREE } else { EXIT_OK })
}

/// Runs `crosscheck`: all backends in both modes on seeded random instances.
pub fn run_crosscheck(args: &CrosscheckArgs, out: &mut dyn Write) -> io::Result<i32> {
    let shape = InstanceShape {
        variables: args.vars,
        constants: args.consts,
        max_m: args.max_m,
        max_n: args.max_n,
        adversarial: args.adversarial,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let width = width(args.chunk_width);
    let charset = VariableCharset::default();
    for case in 0..args.cases {
        let (p, t) = random_instance(&mut rng, &shape);
        let (pattern, text, _) = classify_input(&p, &t, &charset).expect("generated pattern is nonempty");
        for mode in Mode::ALL {
            let check = CrossCheck::run(&pattern, &text, mode, width, false);
            if !check.agree() {
                writeln!(
                    out,
                    "counterexample (case {case}, {mode}): pattern={} text={}",
                    String::from_utf8_lossy(&p),
                    String::from_utf8_lossy(&t)
                )?;
                for (b, timed) in &check.results {
                    writeln!(out, "  {b}: {:?}", timed.report.positions)?;
                }
                return Ok(EXIT_DISAGREE);
            }
        }
    }
    writeln!(out, "{}/{} agree", args.cases, args.cases)?;
    Ok(EXIT_OK)
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v.get(v.len() / 2).copied().unwrap_or_default()
}

/// Runs `bench`: one CSV row per (algo, mode, n).
pub fn run_bench(args: &BenchArgs, out: &mut dyn Write) -> io::Result<i32> {
    let backends: Vec<Backend> = args
        .algos
        .iter()
        .map(|a| a.parse::<Backend>())
        .collect::<Result<_, _>>()
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let shape = InstanceShape {
        variables: args.vars,
        constants: args.consts,
        max_m: args.m,
        max_n: args.sizes.iter().copied().max().unwrap_or(0),
        adversarial: false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let raw_pattern = random_pattern(&mut rng, &shape, args.m.max(1));
    let width = width(args.chunk_width);
    let charset = VariableCharset::default();

    writeln!(out, "algo,mode,m,n,vars,consts,preprocess_ns,query_ns")?;
    for &n in &args.sizes {
        let raw_text = random_text(&mut rng, &shape, &raw_pattern, n);
        let (pattern, text, _) =
            classify_input(&raw_pattern, &raw_text, &charset).expect("pattern is nonempty");
        for &backend in &backends {
            for mode in Mode::ALL {
                // warm-up
                let _ = run_backend(backend, &pattern, &text, mode, width, false);
                let runs: Vec<Timed> = (0..args.reps.max(1))
                    .map(|_| run_backend(backend, &pattern, &text, mode, width, false))
                    .collect();
                let pre = median(runs.iter().map(|t| t.preprocess).collect());
                let query = median(runs.iter().map(|t| t.query).collect());
                writeln!(
                    out,
                    "{backend},{mode},{},{},{},{},{},{}",
                    pattern.len(),
                    text.len(),
                    pattern.variables().len(),
                    pattern.constants().len(),
                    pre.as_nanos(),
                    query.as_nanos()
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}
