//! Command-line front end. `main.rs` only forwards to [`run`].

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::circuit;
use crate::densesim::{self, DenseSimulator};
use crate::error::{Error, Result};
use crate::hamiltonian::{self, SortedHamiltonian};
use crate::planner::{self, GreedyOptions, StopRule, TruncationVector};
use crate::report::{self, Format};

#[derive(Debug, Parser)]
#[command(name = "taylor-lcu", version, about = "Truncated Taylor series planning and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Greedy truncation plan under a cost budget or a target bound.
    Plan(PlanArgs),
    /// Analytic error bound and step sizes for one truncation vector.
    Bound(LevelArgs),
    /// Dense single- and multi-step error for one truncation vector.
    Simulate(SimulateArgs),
    /// Full-order against greedy truncation at equal cost.
    Compare(CompareArgs),
    /// Ancilla layout and gate-count proxies.
    Resources(LevelArgs),
    /// Check the walk-operator block identities on the dense circuit model.
    Verify(VerifyArgs),
    /// Redraw the weights of a term list from a folded normal distribution.
    GenRandom(GenRandomArgs),
    /// Synthetic Hamiltonian with weights spread over several decades.
    GenLogspread(GenLogspreadArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Term-list file.
    #[arg(long, value_name = "PATH")]
    pub hamiltonian: PathBuf,
    /// Output file; format follows the extension. JSON on stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct LevelChoice {
    /// Explicit truncation vector, e.g. "4,2,1".
    #[arg(long)]
    pub levels: Option<TruncationVector>,
    /// Full order n (every order up to n keeps all terms).
    #[arg(long)]
    pub order: Option<usize>,
    /// Greedy vector at this cost.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub choice: LevelChoice,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "stop")]
pub struct StopChoice {
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub target_epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub stop: StopChoice,
    /// Cost cap for target-epsilon plans (default 64 L).
    #[arg(long)]
    pub cost_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub levels: LevelArgs,
    /// Number of repeated steps r.
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 10)]
    pub max_order: usize,
    /// Also measure the dense single-step errors.
    #[arg(long)]
    pub dense: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub levels: LevelArgs,
    /// Step size (default ln 2 / Lambda).
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenRandomArgs {
    /// Template term list whose Pauli strings are kept.
    #[arg(long, value_name = "PATH")]
    pub hamiltonian: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenLogspreadArgs {
    #[arg(long, default_value_t = 32)]
    pub terms: usize,
    #[arg(long, default_value_t = 3.0)]
    pub decades: f64,
    #[arg(long, default_value_t = 6)]
    pub qubits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Rendered command output and where it goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub bytes: Vec<u8>,
    pub path: Option<PathBuf>,
}

impl Output {
    pub fn write(&self) -> Result<()> {
        match &self.path {
            Some(path) => fs::write(path, &self.bytes)?,
            None => std::io::stdout().lock().write_all(&self.bytes)?,
        }
        Ok(())
    }
}

pub fn load_hamiltonian(path: &Path) -> Result<SortedHamiltonian> {
    let text = fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(hamiltonian::parse_hamiltonian(&text)?.with_label(label))
}

fn format_for(out: &Option<PathBuf>) -> Result<Format> {
    out.as_deref().map_or(Ok(Format::Json), Format::from_path)
}

fn resolve_levels(h: &SortedHamiltonian, choice: &LevelChoice) -> Result<TruncationVector> {
    let levels = match (&choice.levels, choice.order, choice.budget) {
        (Some(levels), _, _) => levels.clone(),
        (_, Some(order), _) => planner::full_order_levels(h, order),
        (_, _, Some(budget)) => planner::greedy_plan(h, StopRule::Budget(budget))?.final_levels,
        _ => return Err(Error::invalid("one of --levels, --order, --budget is required")),
    };
    levels.validate(h)?;
    Ok(levels)
}

fn term_list_output(h: &SortedHamiltonian, out: &Option<PathBuf>) -> Output {
    Output {
        bytes: h.to_term_list().into_bytes(),
        path: out.clone(),
    }
}

/// Runs one command and returns its rendered output without writing it.
pub fn execute(command: &Command) -> Result<Output> {
    match command {
        Command::Plan(args) => {
            let h = load_hamiltonian(&args.input.hamiltonian)?;
            let stop = match (args.stop.budget, args.stop.target_epsilon) {
                (Some(b), _) => StopRule::Budget(b),
                (_, Some(e)) => StopRule::TargetEpsilon(e),
                _ => return Err(Error::invalid("one of --budget, --target-epsilon is required")),
            };
            let trace = planner::greedy_plan_with(
                &h,
                stop,
                GreedyOptions {
                    cost_cap: args.cost_cap,
                },
            )?;
            let format = format_for(&args.input.out)?;
            Ok(Output {
                bytes: report::serialize_trace(&trace, format)?,
                path: args.input.out.clone(),
            })
        }
        Command::Bound(args) => {
            let h = load_hamiltonian(&args.input.hamiltonian)?;
            let levels = resolve_levels(&h, &args.choice)?;
            let summary = report::bound_summary(&h, &levels)?;
            Ok(Output {
                bytes: report::serialize_bound(&summary, format_for(&args.input.out)?)?,
                path: args.input.out.clone(),
            })
        }
        Command::Simulate(args) => {
            let input = &args.levels.input;
            let h = load_hamiltonian(&input.hamiltonian)?;
            let levels = resolve_levels(&h, &args.levels.choice)?;
            let sim = DenseSimulator::new(&h)?;
            let error_report = if args.steps == 1 {
                sim.single_step_error(&levels)?
            } else {
                sim.multi_step_error(&levels, args.steps)?
            };
            Ok(Output {
                bytes: report::serialize_error_report(&error_report, format_for(&input.out)?)?,
                path: input.out.clone(),
            })
        }
        Command::Compare(args) => {
            let h = load_hamiltonian(&args.input.hamiltonian)?;
            let sim = if args.dense {
                let cap = densesim::qubit_cap_from_env();
                if h.qubit_count() > cap {
                    log::warn!(
                        "{} qubits exceeds the dense cap {cap}; reporting bounds only",
                        h.qubit_count()
                    );
                    None
                } else {
                    Some(DenseSimulator::with_cap(&h, cap)?)
                }
            } else {
                None
            };
            let rows = report::generate_comparison_report(&h, args.max_order, sim.as_ref())?;
            Ok(Output {
                bytes: report::serialize_report(&rows, format_for(&args.input.out)?)?,
                path: args.input.out.clone(),
            })
        }
        Command::Resources(args) => {
            let h = load_hamiltonian(&args.input.hamiltonian)?;
            let levels = resolve_levels(&h, &args.choice)?;
            let estimate = circuit::estimate_resources(&levels)?;
            if format_for(&args.input.out)? != Format::Json {
                return Err(Error::invalid("resource estimates are written as JSON only"));
            }
            Ok(Output {
                bytes: report::to_json(&estimate)?,
                path: args.input.out.clone(),
            })
        }
        Command::Verify(args) => {
            let input = &args.levels.input;
            let h = load_hamiltonian(&input.hamiltonian)?;
            let levels = resolve_levels(&h, &args.levels.choice)?;
            let t = args.t.unwrap_or_else(|| planner::t_infinity(&h));
            let residuals = circuit::verify_identities(&h, &levels, t)?;
            Ok(Output {
                bytes: report::serialize_residuals(&[residuals], format_for(&input.out)?)?,
                path: input.out.clone(),
            })
        }
        Command::GenRandom(args) => {
            let template = load_hamiltonian(&args.hamiltonian)?;
            let h = hamiltonian::random_hamiltonian(&template, args.mu, args.sigma, args.seed)?;
            Ok(term_list_output(&h, &args.out))
        }
        Command::GenLogspread(args) => {
            let h = hamiltonian::logspread_hamiltonian(
                args.terms,
                args.decades,
                args.qubits,
                args.seed,
            )?;
            Ok(term_list_output(&h, &args.out))
        }
    }
}

/// Parses arguments, executes, writes the output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command).and_then(|out| out.write()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
