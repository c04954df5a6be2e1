//! Command-line interface: every operation as a subcommand, with budgets,
//! output formats, and table-reproduction scripts.
//!
//! Exit codes: 0 success, 1 error, 2 budget exhausted (partial results are
//! still emitted).

use crate::debruijn::{self, DeBruijnModel, SolveMode};
use crate::density;
use crate::patterns::{self, DeciderMethod};
use crate::search::{self, LongAvoiderStrategy};
use crate::series;
use crate::words::{Pattern, Word};
use crate::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "zimin",
    about = "Zimin word avoidance, word densities, and asymptotic instance probabilities",
    version
)]
struct Cli {
    /// Worker threads (default: all cores; ZIMIN_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write machine-readable output to this file as well as stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct NqArgs {
    /// Zimin order n.
    #[arg(long)]
    n: u32,
    /// Alphabet size q.
    #[arg(long)]
    q: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Compute f(n,q), the least M forcing every q-ary length-M word to
    /// encounter the order-n Zimin word.
    F {
        #[command(flatten)]
        nq: NqArgs,
        /// Search node budget.
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
    },
    /// Enumerate avoiders: maximal-length by default, all with --all.
    Avoiders {
        #[command(flatten)]
        nq: NqArgs,
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
        /// List every avoider instead of only the maximal ones.
        #[arg(long)]
        all: bool,
    },
    /// Search for a long avoiding word by randomized construction.
    Longavoider {
        #[command(flatten)]
        nq: NqArgs,
        /// Target length.
        #[arg(long)]
        target: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::RestartBacktrack)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Letter-attempt budget.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Enumerate minimal instances and report m(n,q).
    Minimal {
        #[command(flatten)]
        nq: NqArgs,
        /// Length cap; defaults to f(n,q) when known (completeness).
        #[arg(long)]
        max_len: Option<u32>,
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
    },
    /// Closed-form bound report for f(n,q).
    Bounds {
        #[command(flatten)]
        nq: NqArgs,
        /// Known f(n-1,q) for the chain bound.
        #[arg(long)]
        f_prev: Option<u64>,
        /// Known m(n-1,q) for the chain bound.
        #[arg(long)]
        m_prev: Option<u64>,
        /// Decimal-digit cap for tower values.
        #[arg(long, default_value_t = 4096)]
        digit_cap: usize,
    },
    /// Instance or factor density of a pattern in a word, or a Monte Carlo
    /// estimate over random words.
    Density {
        /// Pattern over 0-9a-z (canonicalized).
        #[arg(long)]
        pattern: String,
        /// Word to measure, required unless --samples is given.
        #[arg(long)]
        word: Option<String>,
        /// Measure factor density instead of instance density.
        #[arg(long)]
        factor: bool,
        /// Monte Carlo sample count over uniform words of --len.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 2)]
        q: u8,
        #[arg(long, default_value_t = 1000)]
        len: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Exact expected density via finite-length instance probabilities.
    Ei {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        q: u8,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1 << 24)]
        budget: u128,
    },
    /// All attained (Z2-density, Z3-density) pairs over [q]^n.
    Scatter {
        #[arg(long, default_value_t = 2)]
        q: u8,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1 << 24)]
        budget: u128,
    },
    /// Enclosure of the asymptotic order-2 Zimin instance probability.
    Iz2 {
        #[arg(long)]
        q: u32,
        /// Tolerance, e.g. 1e-9.
        #[arg(long, default_value = "1e-9")]
        tol: String,
        #[arg(long, default_value_t = 7)]
        precision: usize,
    },
    /// Enclosure of the asymptotic order-3 Zimin instance probability.
    Iz3 {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 30)]
        big_n: u32,
        #[arg(long, default_value_t = 5)]
        big_m: u32,
        #[arg(long, default_value_t = 8)]
        precision: usize,
    },
    /// Nested-series upper bound on the asymptotic order-n Zimin instance
    /// probability.
    IznUpper {
        #[command(flatten)]
        nq: NqArgs,
        /// Per-level truncations, comma separated (n-2 values).
        #[arg(long, default_value = "20,40")]
        trunc: String,
        #[arg(long, default_value_t = 4)]
        big_m: u32,
    },
    /// Product upper bound from letter multiplicities (default: the order-n
    /// Zimin multiplicities).
    IvUpper {
        #[command(flatten)]
        nq: NqArgs,
        /// Explicit multiplicities, comma separated, overriding --n.
        #[arg(long)]
        multiplicities: Option<String>,
    },
    /// Export a sequence table as CSV.
    Sequences {
        #[arg(long, value_enum)]
        kind: SequenceKindArg,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        ell: Option<u32>,
        #[arg(long, default_value_t = 20)]
        max: usize,
    },
    /// De Bruijn walk tooling: minimize the quadratic objective, verify a
    /// candidate tuple exactly, or analyze a periodic word family.
    Debruijn {
        #[command(subcommand)]
        action: DebruijnAction,
    },
    /// Verify that words avoid the order-n Zimin word, reporting the first
    /// encounter otherwise.
    Verify {
        #[arg(long)]
        n: u32,
        /// File of words, one per line.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Single word to check.
        #[arg(long)]
        word: Option<String>,
    },
    /// Regenerate a published table.
    Tables {
        #[arg(long, value_enum)]
        reproduce: TableArg,
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Greedy,
    RestartBacktrack,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SequenceKindArg {
    A,
    B,
    C,
    D,
    Bhat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableArg {
    Fn2,
    Z2z3,
    Iz3,
    Appendmd,
    Trees,
}

#[derive(Subcommand)]
enum DebruijnAction {
    /// Multi-start minimization of d(p) over the unit cube.
    Minimize {
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long, default_value_t = 64)]
        restarts: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "1e-9")]
        tolerance: String,
    },
    /// Exact-rational verification of a probability tuple ('-' entries are
    /// unconstrained).
    Verify {
        #[arg(long, default_value_t = 4)]
        k: u32,
        /// Tuple like "-,4/5,0,3/5,...".
        #[arg(long)]
        p: String,
    },
    /// Frequencies, implied probabilities, and density estimates of one
    /// period of a word family.
    Family {
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1000)]
        periods: u64,
    },
}

fn rational_json(r: &BigRational) -> Value {
    json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "float": series::to_f64(r),
    })
}

struct Output {
    format: Format,
    out: Option<PathBuf>,
    text: String,
    machine: Option<String>,
    exit: i32,
}

impl Output {
    fn new(format: Format, out: Option<PathBuf>) -> Self {
        Output { format, out, text: String::new(), machine: None, exit: 0 }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn json(&mut self, v: Value) {
        self.machine = Some(serde_json::to_string_pretty(&v).expect("serializable"));
    }

    fn csv(&mut self, s: String) {
        self.machine = Some(s);
    }

    fn finish(self) -> i32 {
        let body = match self.format {
            Format::Text => self.text.clone(),
            _ => self.machine.clone().unwrap_or(self.text.clone()),
        };
        print!("{body}");
        std::io::stdout().flush().ok();
        if let Some(path) = &self.out {
            let payload = self.machine.as_ref().unwrap_or(&self.text);
            if let Err(e) = std::fs::write(path, payload) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        self.exit
    }
}

fn parse_tolerance(text: &str) -> crate::Result<BigRational> {
    let f: f64 = text
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad tolerance {text:?}")))?;
    if !(f > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    BigRational::from_float(f).ok_or_else(|| Error::InvalidInput("bad tolerance".into()))
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let threads = std::env::var("ZIMIN_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .or(cli.threads);
    if let Some(t) = threads {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let mut output = Output::new(cli.format, cli.out.clone());
    match dispatch(cli.command, &mut output) {
        Ok(()) => output.finish(),
        Err(e) => {
            let budget = matches!(
                e,
                Error::BudgetExhausted(_) | Error::EnumerationBudget { .. }
            );
            let code = output.finish();
            eprintln!("{}: {e}", if budget { "budget" } else { "error" });
            if budget {
                2
            } else {
                code.max(1)
            }
        }
    }
}

fn dispatch(command: Command, out: &mut Output) -> crate::Result<()> {
    match command {
        Command::F { nq, budget } => {
            let r = search::compute_f(nq.n, nq.q, budget)?;
            match r.f_value {
                Some(f) => out.line(f.to_string()),
                None => out.line(format!(
                    "budget exhausted; f({},{}) >= {} (deepest avoider + 1)",
                    nq.n,
                    nq.q,
                    r.max_avoider_len + 1
                )),
            }
            out.json(json!({
                "command": "f",
                "n": nq.n, "q": nq.q,
                "f": r.f_value,
                "max_avoider_len": r.max_avoider_len,
                "nodes_explored": r.nodes_explored,
                "budget_exhausted": r.budget_exhausted,
            }));
            if r.budget_exhausted {
                out.exit = 2;
            }
            Ok(())
        }
        Command::Avoiders { nq, budget, all } => {
            if all {
                let words = search::enumerate_all_avoiders(nq.n, nq.q, budget)?;
                for w in &words {
                    out.line(w.to_string());
                }
                out.json(json!({
                    "command": "avoiders",
                    "n": nq.n, "q": nq.q, "all": true,
                    "count": words.len(),
                    "words": words.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                }));
            } else {
                let r = search::enumerate_max_avoiders(nq.n, nq.q, budget)?;
                let words = r.max_avoiders.clone().unwrap_or_default();
                for w in &words {
                    out.line(w);
                }
                out.json(json!({
                    "command": "avoiders",
                    "n": nq.n, "q": nq.q, "all": false,
                    "f": r.f_value,
                    "count": words.len(),
                    "words": words,
                }));
            }
            Ok(())
        }
        Command::Longavoider { nq, target, strategy, seed, budget } => {
            let strat = match strategy {
                StrategyArg::Greedy => LongAvoiderStrategy::Greedy,
                StrategyArg::RestartBacktrack => LongAvoiderStrategy::RestartBacktrack,
            };
            let found = search::find_long_avoider(nq.n, nq.q, target, strat, seed, budget)?;
            match &found {
                Some(w) => out.line(w.to_string()),
                None => out.line("not found"),
            }
            out.json(json!({
                "command": "longavoider",
                "n": nq.n, "q": nq.q, "target": target, "seed": seed,
                "word": found.as_ref().map(|w| w.to_string()),
            }));
            Ok(())
        }
        Command::Minimal { nq, max_len, budget } => {
            let cap = max_len
                .or(match (nq.n, nq.q) {
                    (1, _) => Some(1),
                    (2, q) => Some(2 * q as u32 + 1),
                    (3, 2) => Some(29),
                    _ => None,
                })
                .ok_or_else(|| {
                    Error::InvalidInput(
                        "no known f(n,q) for completeness; pass --max-len explicitly".into(),
                    )
                })?;
            let m = search::enumerate_minimal_instances(nq.n, nq.q, cap, budget)?;
            out.line(format!("m({},{}) = {}", nq.n, nq.q, m.count));
            if m.cap_warning {
                out.line("warning: length cap below f(n,q); count may be incomplete");
            }
            for w in &m.words {
                out.line(w);
            }
            out.json(json!({
                "command": "minimal",
                "n": nq.n, "q": nq.q,
                "count": m.count,
                "cap_warning": m.cap_warning,
                "words": m.words,
            }));
            Ok(())
        }
        Command::Bounds { nq, f_prev, m_prev, digit_cap } => {
            let r = search::bounds_report(nq.n, nq.q, f_prev, m_prev, digit_cap);
            out.line(format!("tetration upper: {} = {}", r.tetration_upper,
                r.tetration_upper_value.clone().unwrap_or_else(|| "(astronomical)".into())));
            out.line(format!("tower upper (alternate): {} = {}", r.tao_upper,
                r.tao_upper_value.clone().unwrap_or_else(|| "(astronomical)".into())));
            out.line(format!("first-moment lower: {}", r.first_moment_lower));
            out.line(format!("product lower (nominal): {}", r.tao_product_lower_nominal));
            if let Some(chain) = r.rs_chain_upper {
                out.line(format!("chain upper from (f,m) of order n-1: {chain}"));
            }
            if let Some(asym) = r.rs_asymptotic_form {
                out.line(format!("asymptotic-form value (not a bound): {asym}"));
            }
            out.json(json!({
                "command": "bounds",
                "n": nq.n, "q": nq.q,
                "tetration_upper": { "base": r.tetration_upper.base, "height": r.tetration_upper.height, "value": r.tetration_upper_value },
                "tao_upper": { "base": r.tao_upper.base, "height": r.tao_upper.height, "value": r.tao_upper_value },
                "first_moment_lower": r.first_moment_lower,
                "tao_product_lower_nominal": r.tao_product_lower_nominal,
                "rs_chain_upper": r.rs_chain_upper,
                "rs_asymptotic_form": r.rs_asymptotic_form,
            }));
            Ok(())
        }
        Command::Density { pattern, word, factor, samples, q, len, seed } => {
            let v = Pattern::parse(&pattern)?;
            if let Some(samples) = samples {
                let mc = density::monte_carlo_density(&v, q, len, samples, seed)?;
                out.line(format!("{} ± {} ({} samples)", mc.mean, mc.std_error, mc.samples));
                out.json(json!({
                    "command": "density",
                    "pattern": v.to_string(), "q": q, "len": len, "seed": seed,
                    "mean": mc.mean, "std_error": mc.std_error, "samples": mc.samples,
                }));
                return Ok(());
            }
            let word = Word::parse(&word.ok_or_else(|| {
                Error::InvalidInput("--word or --samples is required".into())
            })?)?;
            if factor {
                let d = density::factor_density(Word::parse(&pattern)?.as_ref(), &word)?;
                out.line(format!("{}/{}", d.numer(), d.denom()));
                out.json(json!({
                    "command": "density", "kind": "factor",
                    "pattern": pattern, "word": word.to_string(),
                    "density": rational_json(&d),
                }));
            } else {
                let d = density::instance_density(&v, &word)?;
                out.line(format!("{}/{}", d.numerator, d.denominator));
                out.json(json!({
                    "command": "density", "kind": "instance",
                    "pattern": v.to_string(), "word": word.to_string(),
                    "density": rational_json(&d.as_rational()),
                }));
            }
            Ok(())
        }
        Command::Ei { pattern, q, n, budget } => {
            let v = Pattern::parse(&pattern)?;
            let d = density::expected_density_exact(&v, q, n, budget)?;
            out.line(format!("{}/{} ≈ {}", d.numer(), d.denom(), series::to_f64(&d)));
            out.json(json!({
                "command": "ei",
                "pattern": v.to_string(), "q": q, "n": n,
                "expected_density": rational_json(&d),
            }));
            Ok(())
        }
        Command::Scatter { q, n, budget } => {
            let s = density::scatter_z2_z3(q, n, budget)?;
            out.line(format!(
                "{} distinct points over [{}]^{}; denominator {}",
                s.points.len(),
                q,
                n,
                s.denominator
            ));
            out.line(format!(
                "min z2 count {} / max z2 count {}",
                s.min_z2.0, s.max_z2.0
            ));
            out.csv(s.csv());
            Ok(())
        }
        Command::Iz2 { q, tol, precision } => {
            let tol = parse_tolerance(&tol)?;
            let enc = series::i_z2(q, &tol)?;
            out.line(format!(
                "I(Z2,{q}) in [{}, {}] ≈ {}",
                series::to_f64(&enc.lower),
                series::to_f64(&enc.upper),
                enc.midpoint_decimal(precision)
            ));
            out.json(json!({
                "command": "iz2", "q": q,
                "lower": rational_json(&enc.lower),
                "upper": rational_json(&enc.upper),
                "decimal": enc.midpoint_decimal(precision),
                "params": { "terms": enc.params.1 },
            }));
            Ok(())
        }
        Command::Iz3 { q, big_n, big_m, precision } => {
            let enc = series::i_z3(q, big_n, big_m)?;
            out.line(format!(
                "I(Z3,{q}) in [{}, {}] ≈ {}",
                series::to_f64(&enc.lower),
                series::to_f64(&enc.upper),
                enc.midpoint_decimal(precision)
            ));
            out.json(json!({
                "command": "iz3", "q": q,
                "lower": rational_json(&enc.lower),
                "upper": rational_json(&enc.upper),
                "decimal": enc.midpoint_decimal(precision),
                "params": { "N": big_n, "M": big_m },
            }));
            Ok(())
        }
        Command::IznUpper { nq, trunc, big_m } => {
            let truncations: Vec<u32> = trunc
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidInput(format!("bad truncations {trunc:?}")))?;
            let bound = series::i_zn_upper(nq.n, nq.q as u32, &truncations, big_m)?;
            out.line(format!("I(Z{},{}) <= {}", nq.n, nq.q, series::to_f64(&bound)));
            out.json(json!({
                "command": "izn-upper",
                "n": nq.n, "q": nq.q, "truncations": truncations,
                "upper": rational_json(&bound),
            }));
            Ok(())
        }
        Command::IvUpper { nq, multiplicities } => {
            let mults: Vec<u32> = match &multiplicities {
                Some(text) => text
                    .split(',')
                    .map(|s| s.trim().parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidInput(format!("bad multiplicities {text:?}")))?,
                None => series::zimin_multiplicities(nq.n),
            };
            let bound = series::iv_product_upper(&mults, nq.q as u32)?;
            out.line(format!("{} ≈ {}", bound, series::to_f64(&bound)));
            out.json(json!({
                "command": "iv-upper",
                "n": nq.n, "q": nq.q, "multiplicities": mults,
                "upper": rational_json(&bound),
            }));
            Ok(())
        }
        Command::Sequences { kind, q, ell, max } => {
            let table = match kind {
                SequenceKindArg::A => series::bifix_free_counts(q, max),
                SequenceKindArg::B | SequenceKindArg::C | SequenceKindArg::D => {
                    let ell = ell.ok_or_else(|| {
                        Error::InvalidInput("--ell is required for b/c/d".into())
                    })?;
                    let t = series::cd_recursion(q, ell, max);
                    match kind {
                        SequenceKindArg::B => t.b,
                        SequenceKindArg::C => t.c,
                        _ => t.d,
                    }
                }
                SequenceKindArg::Bhat => {
                    let ell = ell.ok_or_else(|| {
                        Error::InvalidInput("--ell is required for bhat".into())
                    })?;
                    series::bhat_recursion(q, ell, max)
                }
            };
            let mut csv = String::from("index,value\n");
            for (i, v) in table.values.iter().enumerate() {
                csv.push_str(&format!("{i},{v}\n"));
                out.line(format!("{i}\t{v}"));
            }
            out.csv(csv);
            Ok(())
        }
        Command::Debruijn { action } => run_debruijn(action, out),
        Command::Verify { n, file, word } => {
            let mut words: Vec<(usize, Word)> = Vec::new();
            if let Some(path) = file {
                let body = std::fs::read_to_string(&path)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
                for (idx, line) in body.lines().enumerate() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let w = Word::parse(line).map_err(|e| Error::Parse {
                        line: idx + 1,
                        msg: e.to_string(),
                    })?;
                    words.push((idx + 1, w));
                }
            }
            if let Some(text) = word {
                words.push((0, Word::parse(&text)?));
            }
            let mut report = Vec::new();
            for (line, w) in &words {
                match search::first_zimin_encounter(w, n) {
                    None => {
                        out.line(format!("{w} AVOIDS"));
                        report.push(json!({ "line": line, "word": w.to_string(), "avoids": true }));
                    }
                    Some((a, b)) => {
                        let sub = w.substring(a, b).expect("verifier range");
                        out.line(format!("{w} ENCOUNTERS at ({a}, {b}): {sub}"));
                        report.push(json!({
                            "line": line, "word": w.to_string(), "avoids": false,
                            "start": a, "end": b, "instance": sub.to_string(),
                        }));
                    }
                }
            }
            out.json(json!({ "command": "verify", "n": n, "words": report }));
            Ok(())
        }
        Command::Tables { reproduce, budget } => run_tables(reproduce, budget, out),
    }
}

fn run_debruijn(action: DebruijnAction, out: &mut Output) -> crate::Result<()> {
    match action {
        DebruijnAction::Minimize { k, restarts, seed, tolerance } => {
            let model = DeBruijnModel::new(k, 2)?;
            let tol: f64 = tolerance
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad tolerance {tolerance:?}")))?;
            let sol = debruijn::minimize_objective(&model, restarts, seed, tol)?;
            out.line(format!(
                "candidate lower bound (de Bruijn heuristic): d = {}",
                sol.objective
            ));
            out.line(format!("p = {:?}", sol.p));
            out.json(json!({
                "command": "debruijn-minimize",
                "k": k, "restarts": restarts, "seed": seed,
                "d_upper_float": sol.objective,
                "p": sol.p,
                "q_dist": sol.q_dist,
                "r": sol.r,
                "reducible": sol.reducible,
                "label": "candidate lower bound (de Bruijn heuristic)",
            }));
            Ok(())
        }
        DebruijnAction::Verify { k, p } => {
            let model = DeBruijnModel::new(k, 2)?;
            let tuple = debruijn::parse_probability_tuple(&p, model.node_count())?;
            let sol = debruijn::verify_candidate(&model, &tuple)?;
            out.line(format!(
                "d = {}/{} ≈ {}{}",
                sol.objective.numer(),
                sol.objective.denom(),
                series::to_f64(&sol.objective),
                if sol.reducible { " (reducible chain)" } else { "" }
            ));
            out.json(json!({
                "command": "debruijn-verify",
                "k": k,
                "d": rational_json(&sol.objective),
                "q_dist": sol.q_dist.iter().map(rational_json).collect::<Vec<_>>(),
                "r": sol.r.iter().map(rational_json).collect::<Vec<_>>(),
                "reducible": sol.reducible,
                "label": "candidate lower bound (de Bruijn heuristic)",
            }));
            Ok(())
        }
        DebruijnAction::Family { k, word, periods } => {
            let model = DeBruijnModel::new(k, 2)?;
            let w = Word::parse(&word)?;
            let analysis = debruijn::word_family_frequencies(&w, &model, periods)?;
            out.line(format!(
                "quadratic estimate {}/{} ≈ {}",
                analysis.quadratic_estimate.numer(),
                analysis.quadratic_estimate.denom(),
                series::to_f64(&analysis.quadratic_estimate)
            ));
            out.line(format!(
                "corrected estimate over {} periods ≈ {}",
                analysis.periods_for_corrected,
                series::to_f64(&analysis.corrected_estimate)
            ));
            out.json(json!({
                "command": "debruijn-family",
                "k": k, "word": w.to_string(), "period": analysis.period,
                "node_freq": analysis.node_freq.iter().map(rational_json).collect::<Vec<_>>(),
                "implied_p": analysis
                    .implied_p
                    .iter()
                    .map(|p| p.as_ref().map(rational_json))
                    .collect::<Vec<_>>(),
                "quadratic_estimate": rational_json(&analysis.quadratic_estimate),
                "corrected_estimate": rational_json(&analysis.corrected_estimate),
            }));
            Ok(())
        }
    }
}

fn run_tables(table: TableArg, budget: u64, out: &mut Output) -> crate::Result<()> {
    match table {
        TableArg::Fn2 => {
            out.line("n\tZ_n\tf(n,2)");
            out.line("0\tε\t0");
            let mut rows = vec![json!({ "n": 0, "f": 0 })];
            for n in 1..=3u32 {
                let z = patterns::zimin_word(n);
                let f = search::compute_f(n, 2, budget)?;
                out.line(format!("{n}\t{z}\t{}", f.f_value.unwrap_or(0)));
                rows.push(json!({ "n": n, "f": f.f_value }));
            }
            let f3 = search::compute_f(3, 2, budget)?.f_value.unwrap_or(29);
            let m3 = search::enumerate_minimal_instances(3, 2, f3 as u32, budget)?.count;
            let chain = (f3 + 1) * m3 + f3;
            out.line(format!("4\t{}\t<= {chain} (chain bound)", patterns::zimin_word(4)));
            rows.push(json!({ "n": 4, "f_upper": chain }));
            out.json(json!({ "command": "tables", "table": "fn2", "rows": rows }));
            Ok(())
        }
        TableArg::Z2z3 => {
            out.line("q\tI(Z2,q)\tI(Z3,q)");
            let mut rows = Vec::new();
            for q in 2..=6u32 {
                let z2 = series::i_z2(q, &parse_tolerance("1e-9")?)?;
                let z3 = series::i_z3(q, 30, 5)?;
                out.line(format!(
                    "{q}\t{}\t{}",
                    z2.midpoint_decimal(7),
                    z3.midpoint_decimal(7)
                ));
                rows.push(json!({
                    "q": q,
                    "iz2": z2.midpoint_decimal(7),
                    "iz3": z3.midpoint_decimal(7),
                }));
            }
            out.json(json!({ "command": "tables", "table": "Z2Z3", "rows": rows }));
            Ok(())
        }
        TableArg::Iz3 => {
            out.line("q\tI(Z3,q)");
            let mut rows = Vec::new();
            for q in 2..=6u32 {
                let z3 = series::i_z3(q, 30, 5)?;
                out.line(format!("{q}\t{}", z3.midpoint_decimal(8)));
                rows.push(json!({ "q": q, "iz3": z3.midpoint_decimal(8) }));
            }
            out.json(json!({ "command": "tables", "table": "IZ3", "rows": rows }));
            Ok(())
        }
        TableArg::Appendmd => {
            let mut rows = Vec::new();
            out.line("liminf-density bounds (upper / lower per cell)");
            out.line("n=2 exact: 1/q for q = 2..5");
            for q in 2..=5u8 {
                // n = 3 rows: upper from the order-3 series, lower closed form.
                let upper = series::i_z3(q as u32, 30, 5)?;
                let lower = density::liminf_bound_report(3, q, Some(2 * q as u64 + 1), None)?;
                let closed = lower
                    .lower_bounds
                    .iter()
                    .find(|b| b.label == "closed form")
                    .expect("closed form present");
                out.line(format!(
                    "n=3 q={q}: upper ≈ {} lower ≈ {:.3e}",
                    upper.midpoint_decimal(6),
                    closed.float
                ));
                rows.push(json!({
                    "n": 3, "q": q,
                    "upper": upper.midpoint_decimal(8),
                    "lower": { "num": closed.num, "den": closed.den },
                }));
            }
            // n = 4 needs f(3,2) and m(3,2); both are recomputed live.
            let f3 = search::compute_f(3, 2, budget)?
                .f_value
                .ok_or(Error::BudgetExhausted(budget))?;
            let m3 = search::enumerate_minimal_instances(3, 2, f3 as u32, budget)?.count;
            let report = density::liminf_bound_report(4, 2, Some(f3), Some(m3))?;
            for b in &report.lower_bounds {
                out.line(format!("n=4 q=2 lower ({}): {:.3e}", b.label, b.float));
            }
            for (n, q) in [(4u32, 2u8), (4, 3), (4, 4), (4, 5), (5, 2), (5, 3), (5, 4), (5, 5)] {
                let upper =
                    series::iv_product_upper(&series::zimin_multiplicities(n), q as u32)?;
                out.line(format!("n={n} q={q}: upper ≈ {:.3e}", series::to_f64(&upper)));
                rows.push(json!({
                    "n": n, "q": q,
                    "upper": { "num": upper.numer().to_string(), "den": upper.denom().to_string() },
                }));
            }
            out.json(json!({ "command": "tables", "table": "appendMD", "rows": rows }));
            Ok(())
        }
        TableArg::Trees => {
            let mut rows = Vec::new();
            for (q, ell, lo, hi) in [(2u32, 1u32, 3usize, 9usize), (2, 2, 5, 10), (2, 3, 7, 12), (3, 1, 3, 6)] {
                let t = series::cd_recursion(q, ell, hi);
                let vals: Vec<String> =
                    (lo..=hi).map(|m| format!("b_{m} = {}", t.b.get(m))).collect();
                out.line(format!("q={q} ell={ell}: {}", vals.join(", ")));
                rows.push(json!({
                    "q": q, "ell": ell,
                    "b": (lo..=hi).map(|m| t.b.get(m).to_string()).collect::<Vec<_>>(),
                }));
            }
            out.json(json!({ "command": "tables", "table": "TREES", "rows": rows }));
            Ok(())
        }
    }
}

impl AsRef<Word> for Word {
    fn as_ref(&self) -> &Word {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_and_basic_commands() {
        assert_eq!(run(["zimin", "f", "--n", "2", "--q", "2"]), 0);
        assert_eq!(run(["zimin", "f", "--n", "3", "--q", "2", "--budget", "10"]), 2);
        assert_eq!(run(["zimin", "bogus-subcommand"]), 1);
        assert_eq!(run(["zimin", "iz2", "--q", "2", "--tol", "1e-7"]), 0);
    }

    #[test]
    fn verify_round_trip_through_file() {
        let dir = std::env::temp_dir().join(format!("zimin-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("avoiders.txt");
        assert_eq!(
            run([
                "zimin",
                "avoiders",
                "--n",
                "2",
                "--q",
                "2",
                "--out",
                path.to_str().unwrap()
            ]),
            0
        );
        assert_eq!(
            run(["zimin", "verify", "--n", "2", "--file", path.to_str().unwrap()]),
            0
        );
        std::fs::remove_dir_all(&dir).ok();
    }
}
