//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on input errors (including bad flags), 2 on
//! capacity errors. Output files are written to a temporary file in the
//! target directory and renamed into place, so a failed run never leaves a
//! partial file behind.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{self, Problem, SearchOptions};
use crate::dag;
use crate::error::{Error, Result};
use crate::experiments::{self, fmt_float, to_csv_string, ExperimentConfig, Learner};
use crate::format;
use crate::learn::{self, SubsampleOptions};
use crate::network::{BayesNet, Dataset, Schema, Structure};
use crate::score::{self, Penalty};

#[derive(Parser, Debug)]
#[command(
    name = "mdlnet",
    version,
    about = "MDL structure learning for discrete Bayesian networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw rows from a network by ancestral sampling.
    Sample {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn a network from data.
    Learn {
        #[command(flatten)]
        input: DataArgs,
        #[arg(long)]
        penalty: Penalty,
        #[command(flatten)]
        learner: LearnerArgs,
        /// Required for the greedy and subsampled modes.
        #[arg(long)]
        seed: Option<u64>,
        /// Learned network (network text format).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Score row of the learned structure (CSV).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Score a structure against data.
    Score {
        #[command(flatten)]
        input: DataArgs,
        #[arg(long)]
        penalty: Penalty,
        /// Network file whose structure is scored.
        #[arg(long, conflicts_with = "structure")]
        net: Option<PathBuf>,
        /// Edge list such as "X0->X1 X1->X2"; empty for no edges.
        #[arg(long)]
        structure: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the sample-complexity bounds.
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
    /// Scaled learning curve of a target network.
    Curve {
        #[arg(long)]
        net: PathBuf,
        /// Comma-separated, strictly increasing sample sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        penalty: Penalty,
        #[command(flatten)]
        learner: LearnerArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo check of the Sanov bound.
    SanovMc {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Histogram of learned |G| against the target's.
    Minimality {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        penalty: Penalty,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every DAG over the variables, one edge list per line.
    EnumerateDags {
        /// Binary variables X0.. of this count.
        #[arg(long, conflicts_with = "net", required_unless_present = "net")]
        vars: Option<usize>,
        /// Use the variables of this network file.
        #[arg(long)]
        net: Option<PathBuf>,
        #[arg(long, default_value_t = dag::DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Network file supplying variable cardinalities; inferred from the data
    /// when absent.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exhaustive,
    Greedy,
    Subsampled,
}

#[derive(Args, Debug)]
struct LearnerArgs {
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// Error budget of the subsampled mode.
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Failure probability of the subsampled mode.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Lower bound on cell probabilities for subsample sizing.
    #[arg(long)]
    min_prob: Option<f64>,
}

impl LearnerArgs {
    fn learner(&self) -> Learner {
        match self.mode {
            Mode::Exhaustive => Learner::Exhaustive,
            Mode::Greedy => Learner::Greedy {
                restarts: self.restarts,
            },
            Mode::Subsampled => Learner::Subsampled {
                eps: self.eps,
                delta: self.delta,
                min_prob: self.min_prob,
            },
        }
    }
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long)]
    n_vars: u32,
    #[arg(long)]
    card_u: u64,
    #[arg(long)]
    m: f64,
    #[arg(long)]
    g: u64,
    #[arg(long)]
    penalty: Penalty,
}

impl ProblemArgs {
    fn problem(&self) -> Result<Problem> {
        Problem::new(self.n_vars, self.card_u, self.m, self.g, self.penalty)
    }
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// Minimal N with N/ψ(N) > g/eps.
    Ideal {
        #[arg(long)]
        g: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        penalty: Penalty,
    },
    /// (N+1)^|U| · 2^(−N·eps).
    Sanov {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        card_u: u64,
        #[arg(long)]
        eps: f64,
    },
    /// (N+1)^|U| · 2^(−N·((1−m)m/4)²).
    Skew {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        card_u: u64,
        #[arg(long)]
        m: f64,
    },
    /// Inverse of x / log₂ x on x ≥ 4.
    FInverse {
        #[arg(long)]
        y: f64,
    },
    /// The error function e(a, b, c, m); prints "invalid" off its domain.
    ErrorFn {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        m: f64,
    },
    /// (ε, δ) guarantee at given a, b, N.
    Guarantee {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal N meeting (eps, delta) targets.
    SampleComplexity {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1_000_000_000_000)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constant-free asymptotic order of the sample complexity.
    Asymptotic {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Per-family sub-sample size for entropy estimation.
    FamilySize {
        #[arg(long)]
        card: usize,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
}

/// Runs the CLI on the process arguments and returns the exit status.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    run(std::env::args_os(), &mut stdout.lock())
}

/// Runs the CLI on `args` (including the program name), writing normal
/// output to `stdout` and diagnostics to stderr. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                let _ = e.print();
                return 0;
            }
            // Fold clap's multi-line message into a single diagnostic line.
            let text = e.render().to_string();
            let msg: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty() && !l.starts_with("tip:"))
                .collect();
            eprintln!("{}", msg.join(" "));
            return 1;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_capacity() {
                2
            } else {
                1
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `contents` to `path` atomically, or to `stdout` when no path is
/// given.
fn emit(path: Option<&Path>, contents: &str, stdout: &mut dyn Write) -> Result<()> {
    let io_err = |p: &Path| {
        let p = p.display().to_string();
        move |source| Error::Io { path: p, source }
    };
    match path {
        None => stdout
            .write_all(contents.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
            tmp.write_all(contents.as_bytes()).map_err(io_err(path))?;
            tmp.as_file().sync_all().map_err(io_err(path))?;
            tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
            Ok(())
        }
    }
}

fn load_net(path: &Path) -> Result<BayesNet> {
    format::parse_network(&read(path)?).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Syntax { line, msg } => {
            Error::input(format!("{}: line {line}: {msg}", path.display()))
        }
        Error::Input(msg) => Error::input(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn load_data(args: &DataArgs) -> Result<Dataset> {
    let schema: Option<Arc<Schema>> = match &args.schema {
        Some(p) => Some(load_net(p)?.schema().clone()),
        None => None,
    };
    format::parse_dataset(&read(&args.data)?, schema.as_ref()).map_err(|e| in_file(&args.data, e))
}

fn require_seed(seed: Option<u64>, mode: Mode) -> Result<u64> {
    match (seed, mode) {
        (Some(s), _) => Ok(s),
        (None, Mode::Exhaustive) => Ok(0),
        (None, _) => Err(Error::input(
            "--seed is required for the greedy and subsampled modes",
        )),
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Sample {
            net,
            rows,
            seed,
            out,
        } => {
            let data = load_net(&net)?.sample(rows, seed);
            emit(out.as_deref(), &format::write_dataset(&data), stdout)
        }
        Command::Learn {
            input,
            penalty,
            learner,
            seed,
            out,
            report,
        } => {
            let data = load_data(&input)?;
            let seed = require_seed(seed, learner.mode)?;
            let result = match learner.learner() {
                Learner::Exhaustive => learn::learn_exhaustive(&data, penalty)?,
                Learner::Greedy { restarts } => {
                    learn::learn_greedy(&data, penalty, restarts, seed)?
                }
                Learner::Subsampled {
                    eps,
                    delta,
                    min_prob,
                } => learn::learn_subsampled(
                    &data,
                    penalty,
                    &SubsampleOptions {
                        eps,
                        delta,
                        seed,
                        min_prob,
                    },
                )?,
            };
            let csv = to_csv_string(std::slice::from_ref(&result.report));
            let net_text = format::write_network(&result.net, "learned");
            emit(out.as_deref(), &net_text, stdout)?;
            match (&out, &report) {
                (_, Some(p)) => emit(Some(p), &csv, stdout),
                (Some(_), None) => emit(None, &csv, stdout),
                (None, None) => Ok(()),
            }
        }
        Command::Score {
            input,
            penalty,
            net,
            structure,
            out,
        } => {
            let data = load_data(&input)?;
            let g = match (net, structure) {
                (Some(p), _) => {
                    let net = load_net(&p)?;
                    if net.schema() != data.schema() {
                        return Err(Error::input("network and dataset variables differ"));
                    }
                    net.structure().clone()
                }
                (None, Some(s)) => Structure::parse_edge_list(data.schema().clone(), &s)?,
                (None, None) => Structure::empty(data.schema().clone()),
            };
            let report = score::score(&g, &data, penalty)?;
            emit(out.as_deref(), &to_csv_string(&[report]), stdout)
        }
        Command::Bounds { which } => bounds_command(which, stdout),
        Command::Curve {
            net,
            grid,
            trials,
            penalty,
            learner,
            seed,
            out,
        } => {
            let cfg = ExperimentConfig {
                target: load_net(&net)?,
                n_grid: grid,
                trials,
                penalty,
                seed,
                learner: learner.learner(),
            };
            let points = experiments::learning_curve(&cfg)?;
            emit(out.as_deref(), &to_csv_string(&points), stdout)
        }
        Command::SanovMc {
            net,
            n,
            eps,
            trials,
            seed,
            out,
        } => {
            let p = experiments::sanov_mc(&load_net(&net)?, n, eps, trials, seed)?;
            emit(out.as_deref(), &to_csv_string(&[p]), stdout)
        }
        Command::Minimality {
            net,
            penalty,
            n,
            trials,
            seed,
            out,
        } => {
            let p = experiments::minimality_probe(&load_net(&net)?, penalty, n, trials, seed)?;
            emit(out.as_deref(), &to_csv_string(&[p]), stdout)
        }
        Command::EnumerateDags {
            vars,
            net,
            limit,
            out,
        } => {
            let schema = match (vars, net) {
                (_, Some(p)) => load_net(&p)?.schema().clone(),
                (Some(n), None) => Arc::new(Schema::binary(n)?),
                (None, None) => return Err(Error::input("one of --vars or --net is required")),
            };
            let dags = dag::enumerate_dags_with_limit(&schema, limit)?;
            let mut text = String::new();
            for g in dags {
                text.push_str(&g.edge_list_string());
                text.push('\n');
            }
            emit(out.as_deref(), &text, stdout)
        }
    }
}

fn bounds_command(which: BoundsCommand, stdout: &mut dyn Write) -> Result<()> {
    let line = |s: String| s + "\n";
    match which {
        BoundsCommand::Ideal { g, eps, penalty } => {
            let n = bounds::ideal_case_n(g, eps, penalty)?;
            emit(None, &line(n.to_string()), stdout)
        }
        BoundsCommand::Sanov { n, card_u, eps } => {
            check_n(n)?;
            emit(
                None,
                &line(fmt_float(bounds::sanov_bound(n, card_u, eps))),
                stdout,
            )
        }
        BoundsCommand::Skew { n, card_u, m } => {
            check_n(n)?;
            if !(m > 0.0 && m < 1.0) {
                return Err(Error::input(format!("m must lie in (0, 1), got {m}")));
            }
            emit(
                None,
                &line(fmt_float(bounds::skew_bound(n, card_u, m))),
                stdout,
            )
        }
        BoundsCommand::FInverse { y } => {
            emit(None, &line(fmt_float(bounds::f_inverse(y)?)), stdout)
        }
        BoundsCommand::ErrorFn { a, b, c, m } => {
            let v = bounds::lemma37_e(a, b, c, m).map_or_else(|| "invalid".to_string(), fmt_float);
            emit(None, &line(v), stdout)
        }
        BoundsCommand::Guarantee {
            a,
            b,
            n,
            problem,
            out,
        } => {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::input("a and b must be positive"));
            }
            check_n(n)?;
            let r = bounds::thm39_eval(a, b, n, &problem.problem()?);
            emit(out.as_deref(), &to_csv_string(&[r]), stdout)
        }
        BoundsCommand::SampleComplexity {
            eps,
            delta,
            problem,
            grid,
            cap,
            out,
        } => {
            let prob = problem.problem()?;
            let found = bounds::sample_complexity_with(
                eps,
                delta,
                &prob,
                SearchOptions { grid, n_cap: cap },
            )?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::input(e.to_string());
            w.write_record(["n", "a", "b", "epsilon", "delta", "feasible"])
                .map_err(io)?;
            match found {
                Some(s) => w.write_record([
                    s.n_samples.to_string(),
                    fmt_float(s.a),
                    fmt_float(s.b),
                    fmt_float(s.epsilon),
                    fmt_float(s.delta),
                    "true".to_string(),
                ]),
                None => w.write_record(["", "", "", "", "", "false"]),
            }
            .map_err(io)?;
            let text = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8");
            emit(out.as_deref(), &text, stdout)
        }
        BoundsCommand::Asymptotic {
            eps,
            delta,
            problem,
        } => {
            let v = bounds::asymptotic_reference(eps, delta, &problem.problem()?)?;
            emit(None, &line(fmt_float(v)), stdout)
        }
        BoundsCommand::FamilySize {
            card,
            m,
            eps,
            delta,
        } => {
            let n = learn::family_sample_size(card, m, eps, delta)?;
            emit(None, &line(n.to_string()), stdout)
        }
    }
}

fn check_n(n: u64) -> Result<()> {
    if n < 1 {
        return Err(Error::input("--n must be >= 1"));
    }
    Ok(())
}
