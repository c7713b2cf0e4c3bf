use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use se_core::bounds::{best_bounds, evaluate_all, CellCaches};
use se_core::coding::{self, CodeSpec, PeelOutcome};
use se_core::constructions;
use se_core::exact::{ExactSolver, SolveOptions, DEFAULT_INCIDENCE_BUDGET};
use se_core::exec::Strategy;
use se_core::report;
use se_core::setsys::{self, Block, Kind, SetSystem, Verdict, VerifyOptions};

/// Single-exclusion systems: bounds, constructions, exact values and
/// stopping redundancy of Reed-Solomon codes.
#[derive(Parser)]
#[command(name = "setool", version)]
struct Cli {
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomised constructions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Work budget: enumeration steps for verifiers, incidence bits for
    /// exact search.
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Table,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate upper and lower bounds on S(n,d-2).
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Emit report data.
    #[command(subcommand)]
    Report(ReportCmd),
    /// Build a set system and write it as a block file.
    Construct(ConstructArgs),
    /// Check a block file exhaustively.
    Verify(VerifyArgs),
    /// Solve a tiny instance exactly.
    Exact(ExactArgs),
    /// Parity-check matrices of Reed-Solomon codes.
    #[command(subcommand)]
    Code(CodeCmd),
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Every bound at one (n,d) cell.
    Eval {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// CSV of every cell 5 < d <= n <= n-max.
    Sweep {
        #[arg(long, default_value_t = 512)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Parallel)]
        strategy: StrategyArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Sequential,
    Parallel,
}

impl StrategyArg {
    fn resolve(self) -> Strategy {
        match self {
            StrategyArg::Sequential => Strategy::Sequential,
            StrategyArg::Parallel => Strategy::default(),
        }
    }
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Winner per cell as CSV plus a gnuplot script.
    Fig1 {
        #[arg(long, default_value_t = 512)]
        n_max: usize,
        /// Where to write the plot script (default: next to --out, or
        /// fig1.gp).
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Parallel)]
        strategy: StrategyArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    WeightedPartition,
    BinParity,
    Kuzjurin,
    Recurrent,
    RandomGreedy,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long)]
    n: usize,
    /// Block size of the SE system (not used by kuzjurin).
    #[arg(long)]
    t: Option<usize>,
    /// Covering block size for kuzjurin.
    #[arg(long)]
    k: Option<usize>,
    /// Number of bins for the partition methods.
    #[arg(long)]
    l: Option<usize>,
    /// Residue class kept by the partition methods.
    #[arg(long, default_value_t = 0)]
    j: usize,
    /// Inclusion probability for random-greedy (default: the minimiser of
    /// the probabilistic bound).
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum KindArg {
    Se,
    Turan,
    Covering,
}

#[derive(Args)]
struct VerifyArgs {
    /// Block file to check.
    file: PathBuf,
    /// Property to check (default: the file's `# kind:` line).
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Turán target size.
    #[arg(long)]
    s: Option<usize>,
    /// Covering design target size.
    #[arg(long)]
    covered: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ExactKind {
    Se,
    Turan,
    Covering,
    /// Stopping redundancy of the [n, n-d+1, d] Reed-Solomon code.
    Rho,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long, value_enum)]
    kind: ExactKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    q: Option<u64>,
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Parity-check matrix with one row per block of an (n,d-2)-SE system.
    MakeH {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Field size (default: smallest prime >= n).
        #[arg(long)]
        q: Option<u64>,
        /// SE system block file (default: the recurrent construction).
        #[arg(long)]
        se: Option<PathBuf>,
    },
    /// Stopping distance of a matrix file.
    Stopping { file: PathBuf },
    /// Peel an erasure pattern; exit 1 when decoding gets stuck.
    Decode {
        file: PathBuf,
        /// Erased positions, 1-based, comma separated.
        #[arg(long, value_delimiter = ',')]
        erased: Vec<usize>,
    },
    /// Replace rows heavier than n-d+2 by minimum-weight rows.
    ReplaceRows {
        file: PathBuf,
        #[arg(long)]
        d: usize,
    },
}

enum Outcome {
    Success,
    Failure,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn verify_opts(cli: &Cli) -> VerifyOptions {
    VerifyOptions {
        budget: cli.budget.unwrap_or(setsys::DEFAULT_BUDGET),
        ..VerifyOptions::default()
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Bounds(BoundsCmd::Eval { n, d }) => bounds_eval(cli, *n, *d),
        Command::Bounds(BoundsCmd::Sweep { n_max, strategy }) => {
            let cells = report::sweep(*n_max, strategy.resolve())?;
            emit(cli, &report::render_sweep_csv(&cells))?;
            Ok(Outcome::Success)
        }
        Command::Report(ReportCmd::Fig1 { n_max, script, strategy }) => {
            let cells = report::sweep(*n_max, strategy.resolve())?;
            emit(cli, &report::render_fig1_csv(&cells))?;
            let csv_name = cli.out.as_deref().map_or("fig1.csv".to_string(), |p| p.display().to_string());
            let script_path = script.clone().unwrap_or_else(|| match &cli.out {
                Some(p) => p.with_extension("gp"),
                None => PathBuf::from("fig1.gp"),
            });
            std::fs::write(&script_path, report::fig1_plot_script(&csv_name, *n_max))
                .with_context(|| format!("writing {}", script_path.display()))?;
            eprintln!("plot script written to {}", script_path.display());
            Ok(Outcome::Success)
        }
        Command::Construct(args) => construct(cli, args),
        Command::Verify(args) => verify(cli, args),
        Command::Exact(args) => exact(cli, args),
        Command::Code(cmd) => code(cli, cmd),
    }
}

fn bounds_eval(cli: &Cli, n: usize, d: usize) -> Result<Outcome> {
    if d < 2 || d > n {
        bail!("need 2 <= d <= n, got n={n} d={d}");
    }
    if d <= 5 {
        eprintln!("warning: d={d} lies outside the bound domain 5 < d <= n; using exact values where known");
        let t = d - 2;
        let exact = match t {
            0 => Some(1.to_string()),
            1 => Some((n - 1).to_string()),
            _ => {
                let opts = SolveOptions {
                    incidence_budget: cli.budget.unwrap_or(DEFAULT_INCIDENCE_BUDGET),
                    ..SolveOptions::default()
                };
                ExactSolver::new(opts).min_se(n, t).ok().map(|(v, _)| v.to_string())
            }
        };
        if let Some(v) = exact {
            let text = match cli.format {
                Format::Table => format!("n={n} d={d} t={t}\nexact S(n,d-2) = {v}\n"),
                Format::Csv => format!("n,d,bound,kind,value,params\n{n},{d},exact,exact,{v},\n"),
            };
            emit(cli, &text)?;
            return Ok(Outcome::Success);
        }
        if d < 3 {
            bail!("no bounds apply at d={d}");
        }
        eprintln!("warning: exact search over budget; falling back to the general bounds");
    }
    let b = if d > 5 { best_bounds(n, d)? } else { evaluate_all(n, d, &CellCaches::default())? };
    let text = match cli.format {
        Format::Table => report::render_table(&b),
        Format::Csv => report::render_table_csv(&b),
    };
    emit(cli, &text)?;
    Ok(Outcome::Success)
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.with_context(|| format!("missing --{flag}"))
}

fn construct(cli: &Cli, a: &ConstructArgs) -> Result<Outcome> {
    let n = a.n;
    let sys = match a.method {
        Method::WeightedPartition => {
            let t = need(a.t, "t")?;
            let l = match a.l {
                Some(l) => l,
                None if t + 2 < n => se_core::bounds::kim_roush_l_min(n, t),
                None => bail!("weighted-partition needs t < n-2"),
            };
            constructions::construct_weighted_partition(n, t, l, a.j)?
        }
        Method::BinParity => {
            let t = need(a.t, "t")?;
            constructions::construct_bin_parity(n, t, need(a.l, "l")?, a.j)?
        }
        Method::Kuzjurin => constructions::construct_kuzjurin(n, need(a.k, "k")?)?,
        Method::Recurrent => constructions::construct_recurrent_se(n, need(a.t, "t")?)?,
        Method::RandomGreedy => {
            let t = need(a.t, "t")?;
            let p = a.p.unwrap_or_else(|| se_core::bounds::p_min(n, t));
            constructions::construct_random_greedy(n, t, p, cli.seed)?
        }
    };
    emit(cli, &setsys::render_blocks(&sys))?;
    eprintln!("{} blocks", sys.len());
    Ok(Outcome::Success)
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<Outcome> {
    let sys = setsys::read_blocks(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
    let kind = match a.kind {
        None => sys.kind.clone(),
        Some(KindArg::Se) => Kind::Se,
        Some(KindArg::Turan) => Kind::Turan { s: need(a.s, "s")? },
        Some(KindArg::Covering) => Kind::Covering {
            covered: need(a.covered, "covered")?,
        },
    };
    if kind == Kind::Unspecified {
        bail!("the file does not name its kind; pass --kind");
    }
    let sys = sys.with_kind(kind.clone());
    let verdict = setsys::verify_kind(&sys, &verify_opts(cli))?;
    report_verdict(cli, &sys, &verdict)
}

fn report_verdict(cli: &Cli, sys: &SetSystem, v: &Verdict) -> Result<Outcome> {
    match v.witness() {
        None => {
            emit(cli, &format!("valid {} (n={} t={}, {} blocks)\n", sys.kind.label(), sys.n, sys.t, sys.len()))?;
            Ok(Outcome::Success)
        }
        Some(x) => {
            emit(cli, &format!("invalid {}: {x} is not hit\n", sys.kind.label()))?;
            Ok(Outcome::Failure)
        }
    }
}

fn exact(cli: &Cli, a: &ExactArgs) -> Result<Outcome> {
    let opts = SolveOptions {
        incidence_budget: cli.budget.unwrap_or(DEFAULT_INCIDENCE_BUDGET),
        ..SolveOptions::default()
    };
    let mut solver = ExactSolver::new(opts);
    let n = a.n;
    if a.kind == ExactKind::Rho {
        let d = need(a.d, "d")?;
        let spec = match a.q {
            Some(q) => CodeSpec::new(n, d, q)?,
            None => CodeSpec::with_smallest_prime(n, d)?,
        };
        let (rho, h) = coding::stopping_redundancy(&spec, &opts)?;
        println!("{rho}");
        return finish_witness(cli, &coding::render_matrix(&h));
    }
    let t = need(a.t, "t")?;
    let (value, sys) = match a.kind {
        ExactKind::Se => solver.min_se(n, t)?,
        ExactKind::Turan => solver.min_turan(n, need(a.s, "s")?, t)?,
        ExactKind::Covering => solver.min_covering(n, need(a.s, "s")?, t)?,
        ExactKind::Rho => unreachable!("handled above"),
    };
    println!("{value}");
    finish_witness(cli, &setsys::render_blocks(&sys))
}

/// Witness to --out, else to stdout after the value.
fn finish_witness(cli: &Cli, text: &str) -> Result<Outcome> {
    emit(cli, text)?;
    if let Some(p) = &cli.out {
        eprintln!("witness written to {}", p.display());
    }
    Ok(Outcome::Success)
}

fn read_matrix(p: &Path) -> Result<coding::ParityCheckMatrix> {
    coding::read_matrix(p).with_context(|| format!("reading {}", p.display()))
}

fn code(cli: &Cli, cmd: &CodeCmd) -> Result<Outcome> {
    match cmd {
        CodeCmd::MakeH { n, d, q, se } => {
            let spec = match q {
                Some(q) => CodeSpec::new(*n, *d, *q)?,
                None => CodeSpec::with_smallest_prime(*n, *d)?,
            };
            let t = d - 2;
            let sys = match se {
                Some(p) => setsys::read_blocks(p).with_context(|| format!("reading {}", p.display()))?,
                None if t == 0 => SetSystem::new(*n, 0, Kind::Se, vec![Block::empty()])?,
                None => constructions::construct_recurrent_se(*n, t)?,
            };
            let h = coding::build_h_from_se(&spec, &sys)?;
            emit(cli, &coding::render_matrix(&h))?;
            Ok(Outcome::Success)
        }
        CodeCmd::Stopping { file } => {
            let h = read_matrix(file)?;
            emit(cli, &format!("{}\n", coding::stopping_distance(&h)?))?;
            Ok(Outcome::Success)
        }
        CodeCmd::Decode { file, erased } => {
            let h = read_matrix(file)?;
            if let Some(&bad) = erased.iter().find(|&&x| x == 0 || x > h.n) {
                bail!("erased position {bad} outside 1..={}", h.n);
            }
            let e = Block::from_members(erased.iter().copied())?;
            match coding::peel_decode(&h, &e) {
                PeelOutcome::Recovered => {
                    emit(cli, "recovered\n")?;
                    Ok(Outcome::Success)
                }
                PeelOutcome::Stuck(rest) => {
                    emit(cli, &format!("stuck {rest}\n"))?;
                    Ok(Outcome::Failure)
                }
            }
        }
        CodeCmd::ReplaceRows { file, d } => {
            let h = read_matrix(file)?;
            let spec = CodeSpec::new(h.n, *d, h.field.q())?;
            let r = coding::replace_nonmin_rows(&spec, &h)?;
            let (before, after) = (h.rank(), r.rank());
            if after < before {
                eprintln!("warning: rank fell from {before} to {after}; the input does not reach stopping distance d");
            }
            emit(cli, &coding::render_matrix(&r))?;
            Ok(Outcome::Success)
        }
    }
}
