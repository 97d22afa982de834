//! Command-line front end.
//!
//! Exit codes: 0 success, 1 inconclusive certificate under
//! `--require-nontrivial`, 2 usage, parse and input errors, 3 term-count
//! blowup.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bpcheck::{self, BpError, TupleReport};
use crate::embed::{
    certify_all, surface_group_of_genus, Certificate, Chain, EmbedError, Mode, Partner, Word,
};
use crate::field::{set_max_terms, FieldError, DEFAULT_MAX_TERMS};
use crate::liealg::{self, LieError};
use crate::parse::{parse_elem, parse_series, parse_vector_field, ParseError};
use crate::series::{Series, SeriesError};

/// Environment variable overriding the default term-count limit.
pub const MAX_TERMS_ENV: &str = "FPGROUP_MAX_TERMS";

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(
    name = "fpgroup",
    version,
    about = "Exact computations in the group of formal power series under composition"
)]
pub struct Cli {
    /// Term-count limit per coefficient before aborting with a blowup error.
    #[arg(long, global = true, env = MAX_TERMS_ENV)]
    pub max_terms: Option<usize>,
    /// Worker threads for certificate batches and window searches.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ChainArg {
    /// Chain JSON file.
    #[arg(long)]
    pub chain: PathBuf,
}

#[derive(Debug, Args)]
pub struct CertifyOpts {
    /// Escalation cap for the truncation order (default: twice the chain order).
    #[arg(long)]
    pub order_max: Option<usize>,
    #[arg(long, default_value = "symbolic")]
    pub mode: Mode,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Exit with status 1 unless every certificate is Nontrivial.
    #[arg(long)]
    pub require_nontrivial: bool,
}

#[derive(Debug, Args)]
pub struct WindowOpts {
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Window width B: exponents range over [n, n + B].
    #[arg(long, default_value_t = 9)]
    pub window: usize,
    /// Truncation order (default: twice the window word length, at most 32).
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Start a chain with one generator exp(a) for a rational vector field a.
    NewChain {
        #[arg(long)]
        order: usize,
        /// Vector field such as "e1" or "2 e1 + 1/2 e3".
        #[arg(long)]
        base: String,
        #[arg(long, default_value = "X")]
        name: String,
    },
    /// Free product with conjugated copies: --partner NAME=WORD.
    StepFreeProduct {
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long = "partner", required = true)]
        partners: Vec<String>,
    },
    /// Amalgam over the centralizer of u: --partner NAME=WORD, or --prime-all.
    StepAmalgam {
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long)]
        u: String,
        #[arg(long = "partner")]
        partners: Vec<String>,
        /// Partner every generator G with a copy named G'.
        #[arg(long)]
        prime_all: bool,
    },
    /// Extension of the centralizer of u by a new generator.
    StepExt {
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long)]
        u: String,
        #[arg(long, default_value = "T")]
        name: String,
    },
    /// Surface group chain of even genus.
    Surface {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        order: usize,
    },
    /// Evaluate a word to its series.
    Eval {
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long)]
        word: String,
        /// Truncation order (default: the chain order).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Nontriviality certificates for one or more words.
    Certify {
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long = "word", required = true)]
        words: Vec<String>,
        #[command(flatten)]
        opts: CertifyOpts,
        #[arg(long)]
        json: bool,
    },
    /// Window search for independence of a tuple: --u WORD, repeated.
    BpIndependence {
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long = "u", required = true)]
        u: Vec<String>,
        #[command(flatten)]
        window: WindowOpts,
        #[arg(long)]
        json: bool,
    },
    /// Window search for interleaved products: --u repeated k times, --g k+1 times.
    BpSeparation {
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long = "u", required = true)]
        u: Vec<String>,
        #[arg(long = "g", required = true)]
        g: Vec<String>,
        #[command(flatten)]
        window: WindowOpts,
        #[arg(long)]
        json: bool,
    },
    /// exp of a vector field.
    Exp {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        field: String,
        #[arg(long)]
        json: bool,
    },
    /// log of a series given as "[c1, c2, ...]" or series JSON.
    Log {
        #[arg(long)]
        series: String,
        #[arg(long)]
        json: bool,
    },
    /// Flow h^alpha = exp(alpha log h).
    Flow {
        #[arg(long)]
        series: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        json: bool,
    },
    /// Deterministic text rendering of a chain.
    Show {
        #[command(flatten)]
        chain: ChainArg,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Blowup(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Blowup(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Blowup(m) => m,
        }
    }
}

fn is_field_blowup(e: &FieldError) -> bool {
    matches!(e, FieldError::Blowup { .. })
}

fn is_series_blowup(e: &SeriesError) -> bool {
    matches!(e, SeriesError::Field(f) if is_field_blowup(f))
}

fn is_lie_blowup(e: &LieError) -> bool {
    match e {
        LieError::Field(f) => is_field_blowup(f),
        LieError::Series(s) => is_series_blowup(s),
        _ => false,
    }
}

fn classify(msg: String, blowup: bool) -> Failure {
    if blowup {
        Failure::Blowup(msg)
    } else {
        Failure::Usage(msg)
    }
}

impl From<EmbedError> for Failure {
    fn from(e: EmbedError) -> Self {
        classify(e.to_string(), e.blowup().is_some())
    }
}

impl From<LieError> for Failure {
    fn from(e: LieError) -> Self {
        classify(e.to_string(), is_lie_blowup(&e))
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        classify(e.to_string(), is_series_blowup(&e))
    }
}

impl From<BpError> for Failure {
    fn from(e: BpError) -> Self {
        let blowup = matches!(&e, BpError::Series(s) if is_series_blowup(s));
        classify(e.to_string(), blowup)
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Usage(format!("parse error: {e}"))
    }
}

fn read_chain(path: &Path) -> Result<Chain, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(Chain::from_json(&text)?)
}

fn positive_order(order: usize) -> Result<usize, Failure> {
    if order == 0 {
        return Err(Failure::Usage("--order must be at least 1".into()));
    }
    Ok(order)
}

fn parse_partner(text: &str) -> Result<Partner, Failure> {
    let (name, word) = text
        .split_once('=')
        .ok_or_else(|| Failure::Usage(format!("partner {text:?} is not NAME=WORD")))?;
    Ok(Partner::new(name.trim(), Word::parse(word)?))
}

fn words(texts: &[String]) -> Result<Vec<Word>, Failure> {
    Ok(texts
        .iter()
        .map(|t| Word::parse(t))
        .collect::<Result<_, _>>()?)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn chain_output(chain: &Chain) -> String {
    let mut s = chain.to_json();
    s.push('\n');
    s
}

/// Evaluates words for a window search at `order`, rebuilding the chain when
/// it is shorter.
fn window_elements(chain: &Chain, texts: &[String], order: usize) -> Result<Vec<Series>, Failure> {
    let chain = if order > chain.order() {
        chain.rebuild(order)?
    } else {
        chain.clone()
    };
    words(texts)?
        .iter()
        .map(|w| Ok(chain.eval_word_at(w, order)?))
        .collect()
}

fn report_text(report: &TupleReport, as_json: bool) -> String {
    if as_json {
        json(report)
    } else {
        report.table()
    }
}

/// Returns `(stdout, exit code)` for a parsed command.
fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    match &cli.command {
        Command::NewChain { order, base, name } => {
            let n = positive_order(*order)?;
            let a = parse_vector_field(base, n)?;
            Ok((chain_output(&Chain::one_param_base(n, &a, name)?), 0))
        }
        Command::StepFreeProduct { chain, partners } => {
            let c = read_chain(&chain.chain)?;
            let ps = partners
                .iter()
                .map(|p| parse_partner(p))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((chain_output(&c.free_product_step(&ps)?), 0))
        }
        Command::StepAmalgam {
            chain,
            u,
            partners,
            prime_all,
        } => {
            let c = read_chain(&chain.chain)?;
            let mut ps = partners
                .iter()
                .map(|p| parse_partner(p))
                .collect::<Result<Vec<_>, _>>()?;
            if *prime_all {
                ps.extend(c.generators().keys().map(|g| Partner::primed(g)));
            }
            Ok((chain_output(&c.amalgam_step(&ps, &Word::parse(u)?)?), 0))
        }
        Command::StepExt { chain, u, name } => {
            let c = read_chain(&chain.chain)?;
            Ok((
                chain_output(&c.centralizer_extension_step(&Word::parse(u)?, name)?),
                0,
            ))
        }
        Command::Surface { genus, order } => {
            let n = positive_order(*order)?;
            Ok((chain_output(&surface_group_of_genus(*genus, n)?), 0))
        }
        Command::Eval {
            chain,
            word,
            order,
            json: as_json,
        } => {
            let c = read_chain(&chain.chain)?;
            let w = Word::parse(word)?;
            let s = match order {
                Some(m) if *m > c.order() => c.rebuild(positive_order(*m)?)?.eval_word(&w)?,
                Some(m) => c.eval_word_at(&w, positive_order(*m)?)?,
                None => c.eval_word(&w)?,
            };
            Ok((series_text(&s, *as_json), 0))
        }
        Command::Certify {
            chain,
            words: texts,
            opts,
            json: as_json,
        } => {
            let c = read_chain(&chain.chain)?;
            let ws = words(texts)?;
            let order_max = opts.order_max.unwrap_or(2 * c.order()).max(c.order());
            let certs = certify_all(&c, &ws, order_max, opts.mode, opts.seed)
                .into_iter()
                .collect::<Result<Vec<Certificate>, _>>()?;
            let all = certs.iter().all(Certificate::is_nontrivial);
            let code = if opts.require_nontrivial && !all {
                1
            } else {
                0
            };
            let text = if *as_json {
                json(&certs)
            } else {
                certs
                    .iter()
                    .zip(texts)
                    .map(|(cert, t)| format!("{t}: {cert}\n"))
                    .collect()
            };
            Ok((text, code))
        }
        Command::BpIndependence {
            chain,
            u,
            window,
            json: as_json,
        } => {
            let c = read_chain(&chain.chain)?;
            let order = window.order.map_or_else(
                || {
                    Ok(bpcheck::default_order(
                        u.len(),
                        window.n_max,
                        window.window,
                        0,
                    ))
                },
                positive_order,
            )?;
            let us = window_elements(&c, u, order)?;
            let report =
                bpcheck::independence_search(&us, window.n_max, window.window, Some(order))?;
            Ok((report_text(&report, *as_json), 0))
        }
        Command::BpSeparation {
            chain,
            u,
            g,
            window,
            json: as_json,
        } => {
            let c = read_chain(&chain.chain)?;
            let order = window.order.map_or_else(
                || {
                    Ok(bpcheck::default_order(
                        u.len(),
                        window.n_max,
                        window.window,
                        g.len(),
                    ))
                },
                positive_order,
            )?;
            let us = window_elements(&c, u, order)?;
            let gs = window_elements(&c, g, order)?;
            let report =
                bpcheck::separation_check(&us, &gs, window.n_max, window.window, Some(order))?;
            Ok((report_text(&report, *as_json), 0))
        }
        Command::Exp {
            order,
            field,
            json: as_json,
        } => {
            let a = parse_vector_field(field, positive_order(*order)?)?;
            Ok((series_text(&liealg::exp(&a)?, *as_json), 0))
        }
        Command::Log {
            series,
            json: as_json,
        } => {
            let a = liealg::log(&parse_series(series)?)?;
            let text = if *as_json { json(&a) } else { format!("{a}\n") };
            Ok((text, 0))
        }
        Command::Flow {
            series,
            alpha,
            json: as_json,
        } => {
            let h = parse_series(series)?;
            let s = liealg::flow(&h, &parse_elem(alpha)?)?;
            Ok((series_text(&s, *as_json), 0))
        }
        Command::Show { chain } => Ok((read_chain(&chain.chain)?.to_string(), 0)),
    }
}

fn series_text(s: &Series, as_json: bool) -> String {
    if as_json {
        json(s)
    } else {
        format!("{s}\n")
    }
}

fn dispatch(cli: &Cli) -> Result<(String, i32), Failure> {
    set_max_terms(cli.max_terms.unwrap_or(DEFAULT_MAX_TERMS));
    match cli.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Failure::Usage(format!("cannot start {j} workers: {e}")))?
            .install(|| execute(cli)),
        None => execute(cli),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok((text, code)) => match &cli.out {
            Some(path) => match fs::write(path, &text) {
                Ok(()) => Output {
                    code,
                    stdout: String::new(),
                    stderr: String::new(),
                },
                Err(e) => Output {
                    code: 2,
                    stdout: String::new(),
                    stderr: format!("error: cannot write {}: {e}\n", path.display()),
                },
            },
            None => Output {
                code,
                stdout: text,
                stderr: String::new(),
            },
        },
        Err(f) => Output {
            code: f.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message()),
        },
    }
}
