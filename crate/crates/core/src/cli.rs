//! The `ggr` command line.
//!
//! Every failure is reported as one line `error:<kind>:<message>` on stderr.
//! Exit codes: 0 on success (including negative verdicts), 1 for usage,
//! parse and validation errors, 2 for failures during a run.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::alphabet::TokenString;
use crate::corpus::{generate_dataset, CorpusSpec};
use crate::distance::EditMetric;
use crate::engine::{
    augment, write_pairs_tsv, AmbiguityMode, CompiledGrammar, EngineLimits, GrammarMap,
};
use crate::err::{err_estimate, ErrOptions, UndefinedPolicy};
use crate::error::Error;
use crate::map::{GrowthBound, TableMap, TransductionMap};
use crate::rule::{parse_grammar, validate_ggr, DomainSpec, Grammar, RuleFile};
use crate::search::{format_number, search_dataset, search_rules, write_ranking_tsv, SearchCaps};
use crate::transducer::{
    check_quotient_symmetry_acceptor, check_quotient_symmetry_transducer, quotient,
    AcceptorSymmetry, FiniteTransducer, StatePartition, TransducerSymmetry, DEFAULT_STATE_CAP,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GGR_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ggr",
    version,
    about = "Grammar rules for string transductions: interpret, score, search, augment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that rule files parse and that their rules are grammar rules
    Validate(ValidateArgs),
    /// Apply a grammar or transducer to input strings
    Transduce(TransduceArgs),
    /// Certified interval for the error of rules against a map
    Err(ErrArgs),
    /// Collapse transducer states along a partition
    Quotient(QuotientArgs),
    /// Decide whether a state partition is a symmetry
    CheckSym(CheckSymArgs),
    /// Generate input/output pairs from a grammar
    Augment(AugmentArgs),
    /// Enumerate and rank candidate rules
    Search(SearchArgs),
    /// Emit a built-in grammar or a dataset sampled from it
    Corpus(CorpusArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Rule or grammar files
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Grammar whose alphabets the files must use
    #[arg(long)]
    pub grammar: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MachineSource {
    /// Grammar file
    #[arg(long)]
    pub grammar: Option<PathBuf>,
    /// Transducer file
    #[arg(long)]
    pub transducer: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MapSource {
    /// Grammar file
    #[arg(long)]
    pub grammar: Option<PathBuf>,
    /// Transducer file
    #[arg(long)]
    pub transducer: Option<PathBuf>,
    /// Dataset of `input<TAB>output` lines, read as a partial map
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EngineFlags {
    /// Maximum recursion depth [range: 1..=1000000]
    #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u32).range(1..=1_000_000))]
    pub max_depth: u32,
    /// Allow recursive calls on arguments not shorter than the input
    #[arg(long)]
    pub allow_nondecreasing: bool,
    /// Fail when more than one rule or split matches
    #[arg(long)]
    pub require_unique: bool,
}

impl EngineFlags {
    fn limits(&self) -> EngineLimits {
        EngineLimits {
            max_depth: self.max_depth as usize,
            require_strict_decrease: !self.allow_nondecreasing,
            ambiguity: if self.require_unique {
                AmbiguityMode::RequireUnique
            } else {
                AmbiguityMode::FirstMatch
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct TransduceArgs {
    #[command(flatten)]
    pub source: MachineSource,
    /// Input string, tokens separated by spaces (repeatable)
    #[arg(long)]
    pub input: Vec<String>,
    /// File with one input string per line
    #[arg(long)]
    pub input_file: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineFlags,
    /// Write results here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Indel,
    Levenshtein,
}

#[derive(Debug, Args)]
pub struct ErrArgs {
    #[command(flatten)]
    pub source: MapSource,
    /// Rule file; every rule is scored
    #[arg(long)]
    pub rule: PathBuf,
    /// Length penalty beta [range: > 0]
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub beta: f64,
    /// Stop once the tail bound is at most this [range: >= 0]
    #[arg(long, default_value_t = 1e-9, value_parser = nonneg_f64)]
    pub width: f64,
    /// Largest truncation length tried [range: 0..=64]
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(0..=64))]
    pub max_len: u32,
    /// String distance
    #[arg(long, value_enum, default_value_t = MetricArg::Indel)]
    pub metric: MetricArg,
    /// Skip terms where the map is undefined (always on for --data)
    #[arg(long)]
    pub skip_undefined: bool,
    /// Linear growth constant C, overriding the derived one [range: > 0]
    #[arg(long, value_parser = positive_f64)]
    pub growth: Option<f64>,
    /// Also print the per-length breakdown as TSV
    #[arg(long)]
    pub levels: bool,
    #[command(flatten)]
    pub engine: EngineFlags,
    /// Write results here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuotientArgs {
    /// Transducer or acceptor file
    #[arg(long, alias = "acceptor")]
    pub transducer: PathBuf,
    /// Partition file: one block of state names per line
    #[arg(long)]
    pub partition: PathBuf,
    /// Write the quotient here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SymMachine {
    /// Acceptor file (outputs ignored); the check is exact
    #[arg(long)]
    pub acceptor: Option<PathBuf>,
    /// Deterministic transducer file; the check is bounded by --max-len
    #[arg(long)]
    pub transducer: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckSymArgs {
    #[command(flatten)]
    pub machine: SymMachine,
    /// Partition file: one block of state names per line
    #[arg(long)]
    pub partition: PathBuf,
    /// Input length bound for transducers; default |S| * |S/p| + 1 [range: 0..=64]
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=64))]
    pub max_len: Option<u32>,
    /// Determinization state cap for acceptors [range: 1..=100000000]
    #[arg(long, default_value_t = DEFAULT_STATE_CAP as u64, value_parser = clap::value_parser!(u64).range(1..=100_000_000))]
    pub state_cap: u64,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Grammar file
    #[arg(long)]
    pub grammar: PathBuf,
    /// File with one seed input per line
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Seed input string (repeatable)
    #[arg(long)]
    pub from: Vec<String>,
    /// Maximum number of pairs [range: 0..=10000000]
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(0..=10_000_000))]
    pub budget: u64,
    /// Maximum input length [range: 0..=64]
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(0..=64))]
    pub max_len: u32,
    #[command(flatten)]
    pub engine: EngineFlags,
    /// Write pairs here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub source: MapSource,
    /// Fewest variables per candidate [range: 0..=4]
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=4))]
    pub min_h: u32,
    /// Most variables per candidate [range: 0..=4]
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=4))]
    pub max_h: u32,
    /// Most recursive calls on the right [range: 0..=4]
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=4))]
    pub max_k: u32,
    /// Longest pattern, in symbols [range: 1..=6]
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=6))]
    pub max_pattern_len: u32,
    /// Most literal output tokens on the right [range: 0..=4]
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(0..=4))]
    pub max_literal_len: u32,
    /// Variable domain offered to candidates (repeatable): SIGMA*, SIGMA+, SIGMA1 or regex(...)
    #[arg(long = "domain", default_value = "SIGMA+")]
    pub domains: Vec<String>,
    /// Length penalty beta [range: > 0]
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub beta: f64,
    /// Truncation length of each score [range: 0..=32]
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(0..=32))]
    pub truncation_len: u32,
    /// Skip terms where a grammar or transducer is undefined (always on for --data)
    #[arg(long)]
    pub skip_undefined: bool,
    /// Linear growth constant C, overriding the derived one [range: > 0]
    #[arg(long, value_parser = positive_f64)]
    pub growth: Option<f64>,
    /// Print only the best N candidates [range: >= 1]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub top: Option<u64>,
    #[command(flatten)]
    pub engine: EngineFlags,
    /// Write the ranking here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Built-in corpus
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(CorpusSpec::NAMES))]
    pub name: String,
    /// Emit a sampled dataset instead of the grammar
    #[arg(long)]
    pub dataset: bool,
    /// Longest sampled input [range: 1..=12]
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub max_len: u32,
    /// Number of sampled pairs [range: 0..=5000000]
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(0..=5_000_000))]
    pub count: u64,
    /// Random seed for sampling [range: 0..=2^64-1]
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub engine: EngineFlags,
    /// Write here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} is not a finite number > 0")),
        Err(e) => Err(e.to_string()),
    }
}

fn nonneg_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} is not a finite number >= 0")),
        Err(e) => Err(e.to_string()),
    }
}

/// A reportable failure: kind, single-line message and exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    pub code: i32,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
            code: if e.is_input_error() { 1 } else { 2 },
        }
    }
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            kind: "usage",
            message: message.into(),
            code: 1,
        }
    }

    fn in_file(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }

    fn line(&self) -> String {
        let msg: Vec<&str> = self.message.split_whitespace().collect();
        format!("error:{}:{}", self.kind, msg.join(" "))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

trait InFile<T> {
    fn in_file(self, path: &Path) -> CliResult<T>;
}

impl<T> InFile<T> for crate::error::Result<T> {
    fn in_file(self, path: &Path) -> CliResult<T> {
        self.map_err(|e| Failure::from(e).in_file(path))
    }
}

/// Output of one command: stdout bytes and stderr notes.
#[derive(Default)]
struct Sink {
    out: Vec<u8>,
    notes: Vec<String>,
}

impl Sink {
    /// Sends `text` to `path` if given, else to stdout.
    fn emit(&mut self, path: &Option<PathBuf>, text: &[u8]) -> CliResult<()> {
        match path {
            Some(p) => fs::write(p, text).map_err(Error::from).in_file(p),
            None => {
                self.out.extend_from_slice(text);
                Ok(())
            }
        }
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let f = Failure::usage(first.trim_start_matches("error:").trim());
            let _ = writeln!(stderr, "{}", f.line());
            return f.code;
        }
    };
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => {
                let f = Failure::usage(format!(
                    "{THREADS_ENV} must be a positive integer, got `{v}`"
                ));
                let _ = writeln!(stderr, "{}", f.line());
                return f.code;
            }
        },
        Err(_) => 0,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let f = Failure {
                kind: "runtime",
                message: e.to_string(),
                code: 2,
            };
            let _ = writeln!(stderr, "{}", f.line());
            return f.code;
        }
    };
    let mut sink = Sink::default();
    let result = pool.install(|| dispatch(&cli.command, &mut sink));
    let _ = stdout.write_all(&sink.out);
    let _ = stdout.flush();
    for n in &sink.notes {
        let _ = writeln!(stderr, "note: {n}");
    }
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.line());
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cmd: &Command, sink: &mut Sink) -> CliResult<()> {
    match cmd {
        Command::Validate(a) => validate(a, sink),
        Command::Transduce(a) => transduce(a, sink),
        Command::Err(a) => err(a, sink),
        Command::Quotient(a) => quotient_cmd(a, sink),
        Command::CheckSym(a) => check_sym(a, sink),
        Command::Augment(a) => augment_cmd(a, sink),
        Command::Search(a) => search(a, sink),
        Command::Corpus(a) => corpus(a, sink),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(Error::from).in_file(path)
}

fn load_grammar(path: &Path) -> CliResult<Grammar> {
    parse_grammar(&read(path)?).in_file(path)
}

fn load_transducer(path: &Path) -> CliResult<FiniteTransducer> {
    FiniteTransducer::parse(&read(path)?).in_file(path)
}

fn load_map(
    src: &MapSource,
    growth: Option<f64>,
    limits: EngineLimits,
) -> CliResult<Box<dyn TransductionMap>> {
    let bound = growth.map(GrowthBound::linear);
    if let Some(p) = &src.grammar {
        let g = Arc::new(load_grammar(p)?);
        let m = match bound {
            Some(b) => GrammarMap::with_growth_bound(g, limits, b),
            None => GrammarMap::new(g, limits),
        }
        .in_file(p)?;
        return Ok(Box::new(m));
    }
    if let Some(p) = &src.transducer {
        let mut t = load_transducer(p)?;
        if let Some(b) = bound {
            t = t.with_growth_bound(b);
        }
        return Ok(Box::new(t));
    }
    let p = src.data.as_ref().expect("clap enforces one source");
    let mut t = TableMap::from_tsv(&read(p)?, None, None).in_file(p)?;
    if let Some(b) = bound {
        t = t.with_growth_bound(b);
    }
    Ok(Box::new(t))
}

fn validate(a: &ValidateArgs, sink: &mut Sink) -> CliResult<()> {
    let (input, output) = match &a.grammar {
        Some(p) => {
            let g = load_grammar(p)?;
            (
                Some(Arc::clone(g.input_alphabet())),
                Some(Arc::clone(g.output_alphabet())),
            )
        }
        None => (None, None),
    };
    let mut out = String::new();
    let (mut total, mut bad) = (0, 0);
    for path in &a.files {
        let rf = RuleFile::parse_with(&read(path)?, input.clone(), output.clone()).in_file(path)?;
        for r in &rf.rules {
            total += 1;
            let at = format!("{}:{}:{}", path.display(), r.span.line, r.span.col);
            match validate_ggr(r) {
                Ok(g) => {
                    let _ = writeln!(
                        out,
                        "{at}: ok h={} k={} complexity={}",
                        g.h(),
                        g.k(),
                        g.complexity()
                    );
                }
                Err(v) => {
                    bad += 1;
                    let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
                    let _ = writeln!(out, "{at}: invalid: {}", msgs.join("; "));
                }
            }
        }
    }
    sink.out.extend_from_slice(out.as_bytes());
    if bad > 0 {
        return Err(Failure {
            kind: "validation",
            message: format!("{bad} of {total} rules are not grammar rules"),
            code: 1,
        });
    }
    Ok(())
}

fn inputs(given: &[String], file: &Option<PathBuf>) -> CliResult<Vec<String>> {
    let mut v = given.to_vec();
    if let Some(p) = file {
        v.extend(read(p)?.lines().map(str::to_string));
    }
    if v.is_empty() {
        return Err(Failure::usage("no input: pass --input or --input-file"));
    }
    Ok(v)
}

const UNDEFINED: &str = "<undefined>";

fn transduce(a: &TransduceArgs, sink: &mut Sink) -> CliResult<()> {
    let lines = inputs(&a.input, &a.input_file)?;
    let limits = a.engine.limits();
    limits.validate()?;
    let mut out = String::new();
    if let Some(p) = &a.source.grammar {
        let g = load_grammar(p)?;
        let alpha = Arc::clone(g.input_alphabet());
        let cg = CompiledGrammar::new(Arc::new(g));
        for l in &lines {
            let s = TokenString::parse(&alpha, l)?;
            match cg.interpret(&s, &limits) {
                Ok(o) => out.push_str(&o.to_string()),
                Err(Error::NoRuleMatches(_)) => out.push_str(UNDEFINED),
                Err(e) => return Err(e.into()),
            }
            out.push('\n');
        }
    } else {
        let p = a
            .source
            .transducer
            .as_ref()
            .expect("clap enforces one source");
        let t = load_transducer(p)?;
        for l in &lines {
            let s = TokenString::parse(t.input_alphabet(), l)?;
            match t.run(&s)? {
                Some(o) => out.push_str(&o.to_string()),
                None => out.push_str(UNDEFINED),
            }
            out.push('\n');
        }
    }
    sink.emit(&a.output, out.as_bytes())
}

fn err(a: &ErrArgs, sink: &mut Sink) -> CliResult<()> {
    let limits = a.engine.limits();
    limits.validate()?;
    let map = load_map(&a.source, a.growth, limits)?;
    let rf = RuleFile::parse_with(
        &read(&a.rule)?,
        Some(Arc::clone(map.input_alphabet())),
        Some(Arc::clone(map.output_alphabet())),
    )
    .in_file(&a.rule)?;
    let rules = rf.ggr_rules().in_file(&a.rule)?;
    if rules.is_empty() {
        return Err(Failure::usage(format!("{}: no rules", a.rule.display())));
    }
    let opts = ErrOptions {
        metric: match a.metric {
            MetricArg::Indel => EditMetric::Indel,
            MetricArg::Levenshtein => EditMetric::Levenshtein,
        },
        undefined: if a.skip_undefined || a.source.data.is_some() {
            UndefinedPolicy::Skip
        } else {
            UndefinedPolicy::Error
        },
    };
    let mut out = String::new();
    for (i, r) in rules.iter().enumerate() {
        let e = err_estimate(&*map, r, a.beta, a.width, a.max_len as usize, &opts)?;
        let _ = writeln!(
            out,
            "{} {} {} {:?} {}",
            format_number(e.lower()),
            format_number(e.upper()),
            e.truncation_len,
            e.beta,
            e.term_count
        );
        if a.levels {
            let _ = writeln!(out, "length\tterms\tskipped\tdistance_sum\tsubtotal");
            for l in &e.levels {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    l.length,
                    l.terms,
                    l.skipped,
                    l.distance_sum,
                    format_number(l.subtotal())
                );
            }
        }
        if e.skipped > 0 {
            sink.notes.push(format!(
                "rule {}: {} undefined terms skipped",
                i + 1,
                e.skipped
            ));
        }
        if !e.converged {
            sink.notes.push(format!(
                "rule {}: tail bound {} exceeds width {} at L={}",
                i + 1,
                format_number(e.tail_bound),
                format_number(a.width),
                e.truncation_len
            ));
        }
    }
    sink.emit(&a.output, out.as_bytes())
}

fn quotient_cmd(a: &QuotientArgs, sink: &mut Sink) -> CliResult<()> {
    let t = load_transducer(&a.transducer)?;
    let p = StatePartition::parse(&read(&a.partition)?, &t).in_file(&a.partition)?;
    let q = quotient(&t, &p)?;
    sink.emit(&a.output, q.to_text().as_bytes())
}

fn show(s: &TokenString) -> String {
    if s.is_empty() {
        crate::transducer::EPSILON.to_string()
    } else {
        s.to_string()
    }
}

fn check_sym(a: &CheckSymArgs, sink: &mut Sink) -> CliResult<()> {
    let path = a
        .machine
        .acceptor
        .as_ref()
        .or(a.machine.transducer.as_ref())
        .expect("clap enforces one machine");
    let m = load_transducer(path)?;
    let p = StatePartition::parse(&read(&a.partition)?, &m).in_file(&a.partition)?;
    let line = if a.machine.acceptor.is_some() {
        match check_quotient_symmetry_acceptor(&m, &p, a.state_cap as usize)? {
            AcceptorSymmetry::Symmetric => "symmetric".to_string(),
            AcceptorSymmetry::Counterexample(w) => format!("counterexample {}", show(&w)),
        }
    } else {
        match check_quotient_symmetry_transducer(&m, &p, a.max_len.map(|l| l as usize))? {
            TransducerSymmetry::SymmetricUpTo(l) => format!("symmetric-up-to {l}"),
            TransducerSymmetry::Counterexample {
                input,
                expected,
                quotient_outputs,
            } => {
                let outs: Vec<String> = quotient_outputs.iter().map(show).collect();
                format!(
                    "counterexample {}\texpected={}\tquotient={}",
                    show(&input),
                    expected.as_ref().map_or(UNDEFINED.to_string(), show),
                    outs.join(" | ")
                )
            }
        }
    };
    sink.out.extend_from_slice(line.as_bytes());
    sink.out.push(b'\n');
    Ok(())
}

fn augment_cmd(a: &AugmentArgs, sink: &mut Sink) -> CliResult<()> {
    let limits = a.engine.limits();
    limits.validate()?;
    let g = load_grammar(&a.grammar)?;
    let mut lines = a.from.clone();
    if let Some(p) = &a.seeds {
        lines.extend(
            read(p)?
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(str::to_string),
        );
    }
    let seeds = lines
        .iter()
        .map(|l| TokenString::parse(g.input_alphabet(), l))
        .collect::<crate::error::Result<Vec<_>>>()?;
    let pairs = augment(&g, &seeds, a.budget as usize, a.max_len as usize, &limits)?;
    let mut buf = Vec::new();
    write_pairs_tsv(&mut buf, &pairs)?;
    if (pairs.len() as u64) < a.budget {
        sink.notes.push(format!(
            "only {} pairs up to length {}",
            pairs.len(),
            a.max_len
        ));
    }
    sink.emit(&a.output, &buf)
}

fn search(a: &SearchArgs, sink: &mut Sink) -> CliResult<()> {
    let limits = a.engine.limits();
    limits.validate()?;
    let domain_menu = a
        .domains
        .iter()
        .map(|d| d.parse::<DomainSpec>())
        .collect::<crate::error::Result<Vec<_>>>()?;
    let caps = SearchCaps {
        min_h: a.min_h as usize,
        max_h: a.max_h as usize,
        max_k: a.max_k as usize,
        max_pattern_len: a.max_pattern_len as usize,
        max_literal_len: a.max_literal_len as usize,
        domain_menu,
        beta: a.beta,
        truncation_len: a.truncation_len as usize,
    };
    caps.validate()?;
    let result = match &a.source.data {
        Some(p) => {
            let mut t = TableMap::from_tsv(&read(p)?, None, None).in_file(p)?;
            if let Some(c) = a.growth {
                t = t.with_growth_bound(GrowthBound::linear(c));
            }
            search_dataset(&t, &caps)?
        }
        None => {
            let map = load_map(&a.source, a.growth, limits)?;
            let opts = ErrOptions {
                undefined: if a.skip_undefined {
                    UndefinedPolicy::Skip
                } else {
                    UndefinedPolicy::Error
                },
                ..ErrOptions::default()
            };
            search_rules(&*map, &caps, &opts)?
        }
    };
    sink.notes.push(format!(
        "{} candidates, {} tautologies excluded",
        result.candidates, result.tautologies
    ));
    let mut buf = Vec::new();
    write_ranking_tsv(&mut buf, &result, a.top.map(|t| t as usize))?;
    sink.emit(&a.output, &buf)
}

fn corpus(a: &CorpusArgs, sink: &mut Sink) -> CliResult<()> {
    let g = CorpusSpec::named(&a.name)?.build()?;
    if !a.dataset {
        return sink.emit(&a.output, g.to_dsl().as_bytes());
    }
    let limits = a.engine.limits();
    limits.validate()?;
    let pairs = generate_dataset(&g, a.max_len as usize, a.count as usize, a.seed, &limits)?;
    let mut buf = Vec::new();
    write_pairs_tsv(&mut buf, &pairs)?;
    sink.emit(&a.output, &buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("ggr").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, out, err) = run_args(&["transduce", "--bogus"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.starts_with("error:usage:"), "{err}");
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let (code, _, err) =
            run_args(&["transduce", "--grammar", "/nonexistent.ggr", "--input", "a"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:io:/nonexistent.ggr:"), "{err}");
    }

    #[test]
    fn out_of_range_beta_is_rejected() {
        let (code, _, err) = run_args(&["err", "--data", "x", "--rule", "y", "--beta", "0"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:usage:"), "{err}");
    }

    #[test]
    fn corpus_grammar_round_trips() {
        for name in CorpusSpec::NAMES {
            let (code, out, _) = run_args(&["corpus", name]);
            assert_eq!(code, 0);
            let g = parse_grammar(&out).unwrap();
            assert_eq!(g.to_dsl(), out);
        }
    }
}
