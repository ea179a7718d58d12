//! Command-line surface: corpus generation, matrix population, solving,
//! parameter sweeps, exact oracles, ILP export, repository operations,
//! and validation.
//!
//! Reports go to standard output as tab-separated lines with a
//! `#`-prefixed key column; sweeps emit CSV. Exit codes: 0 ok,
//! 2 infeasible, 3 invalid input, 4 corruption.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use verstore::delta::{DeltaMode, DeltaPolicy};
use verstore::error::Error;
use verstore::exact::{ConstraintKind, Objective, ObjectiveKind};
use verstore::genlab;
use verstore::heuristics::{self, GitHConfig, GitHOrdering, GithVersion, Stretch};
use verstore::store::{PlanOptions, PlanStrategy, Repository};
use verstore::{evaluate, formats, spanners, CostMatrices, CostReport, SolverGraph, StoragePlan};

/// Seed used when neither the command line nor a parameter file sets one.
const SEED_ENV: &str = "VERSTORE_SEED";

#[derive(Parser)]
#[command(
    name = "verstore",
    version,
    about = "Storage planning for dataset version collections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus from a parameter file.
    Gen(GenArgs),
    /// Generate a Zipfian access workload file.
    Workload(WorkloadArgs),
    /// Compute cost matrices over a corpus directory.
    Matrix(MatrixArgs),
    /// Solve for a storage plan from a matrix file.
    Solve(SolveArgs),
    /// Sweep a solver parameter and emit one CSV row per run.
    Sweep(SweepArgs),
    /// Exhaustive optimum for small instances.
    Exact(ExactArgs),
    /// Export the bounded-max-recreation integer program in LP format.
    ExportIlp(ExportIlpArgs),
    /// Repository operations.
    #[command(subcommand)]
    Repo(RepoCommand),
    /// Validate matrices, plans, and triangle consistency.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Parameter file with `key = value` lines.
    #[arg(long)]
    params: PathBuf,
    /// Output corpus directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WorkloadArgs {
    /// Number of versions.
    #[arg(long)]
    versions: usize,
    /// Zipf exponent.
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Permutation seed; defaults to VERSTORE_SEED or 1.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Directed,
    Undirected,
}

impl From<ModeArg> for DeltaMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Directed => DeltaMode::Directed,
            ModeArg::Undirected => DeltaMode::Undirected,
        }
    }
}

#[derive(Args)]
struct MatrixArgs {
    /// Corpus directory produced by `gen`.
    #[arg(long)]
    corpus: PathBuf,
    /// Pair admission policy: `k_hop:K` or `threshold:BYTES`.
    #[arg(long)]
    policy: String,
    #[arg(long, value_enum, default_value = "directed")]
    mode: ModeArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OrderingArg {
    /// Non-increasing size.
    SizeDesc,
    /// Name hash then size (degrades to size order when versions carry
    /// no names).
    TypeNamehashSize,
}

impl From<OrderingArg> for GitHOrdering {
    fn from(o: OrderingArg) -> Self {
        match o {
            OrderingArg::SizeDesc => GitHOrdering::SizeDesc,
            OrderingArg::TypeNamehashSize => GitHOrdering::TypeNameHashSize,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    /// Minimum storage: arborescence on directed input, spanning tree on
    /// undirected.
    Mca,
    /// Alias for the undirected minimum spanning tree.
    Mst,
    /// Shortest path tree (minimum recreation).
    Spt,
    /// Local-move greedy (needs --budget, or --theta for the
    /// storage-minimizing variant).
    Lmg,
    /// Threshold Prim (needs --theta, or --budget for the budgeted dual).
    Mp,
    /// Shallow-light balance (needs --alpha).
    Last,
    /// Repack window heuristic (--window, --depth).
    Gith,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Storage budget in bytes (lmg, mp).
    #[arg(long)]
    budget: Option<u64>,
    /// Recreation bound (mp) or total-recreation bound (lmg).
    #[arg(long)]
    theta: Option<u64>,
    /// Stretch factor for last, e.g. 2 or 1.5.
    #[arg(long)]
    alpha: Option<String>,
    /// Window size for gith.
    #[arg(long)]
    window: Option<usize>,
    /// Max delta-chain depth for gith.
    #[arg(long)]
    depth: Option<usize>,
    /// Version ordering for gith.
    #[arg(long, value_enum, default_value = "size-desc")]
    ordering: OrderingArg,
    /// Access workload file (lmg).
    #[arg(long)]
    workload: Option<PathBuf>,
    /// Plan file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Swept range `LO:HI:STEPS` over the strategy's main parameter
    /// (budget for lmg, theta for mp, alpha for last, window for gith).
    #[arg(long, value_name = "LO:HI:STEPS")]
    param_range: String,
    #[arg(long)]
    workload: Option<PathBuf>,
    /// CSV file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    MinStorage,
    MinSumRecreation,
    MinMaxRecreation,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    /// Optional constraint `storage:B`, `sum:B`, or `max:B`.
    #[arg(long)]
    bound: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportIlpArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Max-recreation bound.
    #[arg(long)]
    theta: u64,
    /// LP file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum RepoCommand {
    /// Create an empty repository.
    Init {
        #[arg(long)]
        path: PathBuf,
    },
    /// Commit a file as a new version.
    Commit {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        file: PathBuf,
        /// Comma-separated parent version ids.
        #[arg(long)]
        parents: Option<String>,
    },
    /// Re-plan physical storage with a solver.
    Plan {
        #[arg(long)]
        path: PathBuf,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        theta: Option<u64>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value = "size-desc")]
        ordering: OrderingArg,
        #[arg(long)]
        workload: Option<PathBuf>,
        /// Pair admission policy for matrix population.
        #[arg(long, default_value = "k_hop:10")]
        policy: String,
        #[arg(long, value_enum, default_value = "directed")]
        mode: ModeArg,
    },
    /// Write a version's content to a file.
    Checkout {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        version: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report measured storage and recreation costs.
    Stats {
        #[arg(long)]
        path: PathBuf,
    },
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Plan file to validate against the matrices.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Also check the delta triangle inequalities.
    #[arg(long)]
    triangle: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_class().code() as u8)
        }
    }
}

fn run(cli: Cli) -> verstore::Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Workload(args) => cmd_workload(args),
        Command::Matrix(args) => cmd_matrix(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Exact(args) => cmd_exact(args),
        Command::ExportIlp(args) => cmd_export_ilp(args),
        Command::Repo(command) => cmd_repo(command),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok())
}

fn cmd_gen(args: GenArgs) -> verstore::Result<()> {
    let text = std::fs::read_to_string(&args.params)?;
    let (mut params, dataset, data_seed) = genlab::parse_params(&text, &args.params)?;
    let seed_given = text.lines().any(|line| {
        line.split_once('=')
            .map(|(key, _)| key.trim() == "seed")
            .unwrap_or(false)
    });
    if !seed_given {
        if let Some(seed) = env_seed() {
            params.seed = seed;
        }
    }
    let skeleton = genlab::gen_version_graph(&params, &dataset)?;
    let corpus = genlab::gen_datasets(&skeleton, data_seed);
    genlab::write_corpus(&args.out, &skeleton, &corpus, data_seed)?;
    println!("# corpus\t{}", args.out.display());
    println!("# versions\t{}", skeleton.version_count());
    println!("# seed\t{}", params.seed);
    Ok(())
}

fn cmd_workload(args: WorkloadArgs) -> verstore::Result<()> {
    let seed = args.seed.or_else(env_seed).unwrap_or(1);
    let workload = genlab::gen_workload(args.versions, args.exponent, seed)?;
    formats::write_workload(&args.out, &workload)?;
    println!("# workload\t{}", args.out.display());
    println!("# versions\t{}", args.versions);
    println!("# exponent\t{}", args.exponent);
    println!("# seed\t{seed}");
    Ok(())
}

fn parse_policy(text: &str) -> verstore::Result<DeltaPolicy> {
    let invalid = || {
        Error::InvalidInput(format!(
            "invalid policy `{text}`: expected k_hop:K or threshold:BYTES"
        ))
    };
    let (kind, value) = text.split_once(':').ok_or_else(invalid)?;
    match kind {
        "k_hop" => Ok(DeltaPolicy::KHop(value.parse().map_err(|_| invalid())?)),
        "threshold" => Ok(DeltaPolicy::SizeThreshold(
            value.parse().map_err(|_| invalid())?,
        )),
        _ => Err(invalid()),
    }
}

fn cmd_matrix(args: MatrixArgs) -> verstore::Result<()> {
    let (graph, corpus) = genlab::read_corpus(&args.corpus)?;
    let policy = parse_policy(&args.policy)?;
    let matrices = verstore::delta::populate_matrices(&corpus, &graph, policy, args.mode.into())?;
    formats::write_matrices(&args.out, &matrices)?;
    println!("# matrix\t{}", args.out.display());
    println!("# versions\t{}", graph.version_count());
    println!("# entries\t{}", matrices.len());
    Ok(())
}

struct Solved {
    plan: StoragePlan,
    report: CostReport,
    notes: Vec<String>,
}

fn load_workload(path: &Option<PathBuf>) -> verstore::Result<Option<verstore::WorkloadProfile>> {
    match path {
        Some(p) => Ok(Some(formats::read_workload(p)?)),
        None => Ok(None),
    }
}

fn require<T: Copy>(value: Option<T>, what: &str, strategy: &str) -> verstore::Result<T> {
    value.ok_or_else(|| Error::InvalidInput(format!("strategy `{strategy}` requires --{what}")))
}

#[allow(clippy::too_many_arguments)]
fn solve_on_graph(
    sg: &SolverGraph,
    matrices: &CostMatrices,
    strategy: StrategyArg,
    budget: Option<u64>,
    theta: Option<u64>,
    alpha: Option<&str>,
    window: Option<usize>,
    depth: Option<usize>,
    ordering: GitHOrdering,
    workload: Option<&verstore::WorkloadProfile>,
) -> verstore::Result<Solved> {
    let mut notes = Vec::new();
    let plan = match strategy {
        StrategyArg::Mca => spanners::min_storage(sg)?,
        StrategyArg::Mst => spanners::mst_undirected(sg)?,
        StrategyArg::Spt => spanners::spt(sg)?,
        StrategyArg::Lmg => {
            let base = spanners::min_storage(sg)?;
            let spt = spanners::spt(sg)?;
            match (budget, theta) {
                (Some(b), None) => heuristics::lmg(sg, &base, &spt, b, workload)?,
                (None, Some(t)) => heuristics::lmg_min_storage(sg, &base, &spt, t, workload)?,
                _ => {
                    return Err(Error::InvalidInput(
                        "strategy `lmg` takes exactly one of --budget or --theta".into(),
                    ))
                }
            }
        }
        StrategyArg::Mp => match (theta, budget) {
            (Some(t), None) => heuristics::mp(sg, t)?,
            (None, Some(b)) => heuristics::mp_budget(sg, b)?,
            _ => {
                return Err(Error::InvalidInput(
                    "strategy `mp` takes exactly one of --theta or --budget".into(),
                ))
            }
        },
        StrategyArg::Last => {
            let alpha = Stretch::parse(require(alpha, "alpha", "last")?)?;
            let base = spanners::min_storage(sg)?;
            let (_, dist) = spanners::spt_with_distances(sg)?;
            if sg.directed() {
                notes.push("directed input: balance guarantees do not apply".to_string());
            }
            heuristics::last(sg, &base, &dist, alpha)?
        }
        StrategyArg::Gith => {
            let config = GitHConfig {
                window: window.unwrap_or(10),
                max_depth: depth.unwrap_or(50),
                ordering,
            };
            let versions: Vec<GithVersion> = (1..=sg.version_count())
                .map(|id| GithVersion {
                    id,
                    size: matrices.get(id, id).map(|w| w.storage).unwrap_or_default(),
                    name: None,
                })
                .collect();
            let mut source: &CostMatrices = matrices;
            let (plan, _) = heuristics::gith(&versions, &mut source, &config)?;
            plan
        }
    };
    let report = evaluate(&plan, sg, workload)?;
    Ok(Solved {
        plan,
        report,
        notes,
    })
}

fn print_report(strategy: &str, sg: &SolverGraph, solved: &Solved) {
    println!("# strategy\t{strategy}");
    println!("# versions\t{}", sg.version_count());
    println!(
        "# mode\t{}",
        if sg.directed() {
            "directed"
        } else {
            "undirected"
        }
    );
    println!("# total_storage\t{}", solved.report.total_storage);
    println!("# sum_recreation\t{}", solved.report.sum_recreation);
    println!("# max_recreation\t{}", solved.report.max_recreation);
    if let Some(ws) = solved.report.weighted_sum {
        println!("# weighted_sum\t{ws}");
    }
    for note in &solved.notes {
        println!("# note\t{note}");
    }
}

fn strategy_name(strategy: StrategyArg) -> &'static str {
    match strategy {
        StrategyArg::Mca => "mca",
        StrategyArg::Mst => "mst",
        StrategyArg::Spt => "spt",
        StrategyArg::Lmg => "lmg",
        StrategyArg::Mp => "mp",
        StrategyArg::Last => "last",
        StrategyArg::Gith => "gith",
    }
}

fn cmd_solve(args: SolveArgs) -> verstore::Result<()> {
    let matrices = formats::read_matrices(&args.matrix)?;
    let sg = verstore::solver_graph_from_matrices(&matrices)?;
    let workload = load_workload(&args.workload)?;
    let solved = solve_on_graph(
        &sg,
        &matrices,
        args.strategy,
        args.budget,
        args.theta,
        args.alpha.as_deref(),
        args.window,
        args.depth,
        args.ordering.into(),
        workload.as_ref(),
    )?;
    formats::write_plan(&args.out, &solved.plan)?;
    print_report(strategy_name(args.strategy), &sg, &solved);
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> verstore::Result<()> {
    let matrices = formats::read_matrices(&args.matrix)?;
    let sg = verstore::solver_graph_from_matrices(&matrices)?;
    let workload = load_workload(&args.workload)?;

    let parts: Vec<&str> = args.param_range.split(':').collect();
    let invalid = || {
        Error::InvalidInput(format!(
            "invalid --param-range `{}`: expected LO:HI:STEPS",
            args.param_range
        ))
    };
    if parts.len() != 3 {
        return Err(invalid());
    }
    let lo: f64 = parts[0].parse().map_err(|_| invalid())?;
    let hi: f64 = parts[1].parse().map_err(|_| invalid())?;
    let steps: usize = parts[2].parse().map_err(|_| invalid())?;
    if steps == 0 || hi < lo {
        return Err(invalid());
    }

    let mut csv = String::from("param,total_storage,sum_recreation,max_recreation\n");
    for i in 0..steps {
        let t = if steps == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (steps - 1) as f64
        };
        let (param_label, solved) = match args.strategy {
            StrategyArg::Lmg => {
                let budget = t.round() as u64;
                (
                    budget.to_string(),
                    solve_on_graph(
                        &sg,
                        &matrices,
                        StrategyArg::Lmg,
                        Some(budget),
                        None,
                        None,
                        None,
                        None,
                        GitHOrdering::SizeDesc,
                        workload.as_ref(),
                    )?,
                )
            }
            StrategyArg::Mp => {
                let theta = t.round() as u64;
                (
                    theta.to_string(),
                    solve_on_graph(
                        &sg,
                        &matrices,
                        StrategyArg::Mp,
                        None,
                        Some(theta),
                        None,
                        None,
                        None,
                        GitHOrdering::SizeDesc,
                        None,
                    )?,
                )
            }
            StrategyArg::Last => {
                let alpha = format!("{t:.3}");
                (
                    alpha.clone(),
                    solve_on_graph(
                        &sg,
                        &matrices,
                        StrategyArg::Last,
                        None,
                        None,
                        Some(&alpha),
                        None,
                        None,
                        GitHOrdering::SizeDesc,
                        None,
                    )?,
                )
            }
            StrategyArg::Gith => {
                let window = t.round().max(1.0) as usize;
                (
                    window.to_string(),
                    solve_on_graph(
                        &sg,
                        &matrices,
                        StrategyArg::Gith,
                        None,
                        None,
                        None,
                        Some(window),
                        None,
                        GitHOrdering::SizeDesc,
                        None,
                    )?,
                )
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "strategy `{}` has no swept parameter",
                    strategy_name(other)
                )))
            }
        };
        csv.push_str(&format!(
            "{},{},{},{}\n",
            param_label,
            solved.report.total_storage,
            solved.report.sum_recreation,
            solved.report.max_recreation
        ));
    }
    std::fs::write(&args.out, csv)?;
    println!("# sweep\t{}", args.out.display());
    println!("# rows\t{steps}");
    Ok(())
}

fn cmd_exact(args: ExactArgs) -> verstore::Result<()> {
    let matrices = formats::read_matrices(&args.matrix)?;
    let sg = verstore::solver_graph_from_matrices(&matrices)?;
    let kind = match args.objective {
        ObjectiveArg::MinStorage => ObjectiveKind::MinStorage,
        ObjectiveArg::MinSumRecreation => ObjectiveKind::MinSumRecreation,
        ObjectiveArg::MinMaxRecreation => ObjectiveKind::MinMaxRecreation,
    };
    let objective = match &args.bound {
        None => Objective::new(kind),
        Some(text) => {
            let invalid = || {
                Error::InvalidInput(format!(
                    "invalid --bound `{text}`: expected storage:B, sum:B, or max:B"
                ))
            };
            let (ckind, value) = text.split_once(':').ok_or_else(invalid)?;
            let bound: u64 = value.parse().map_err(|_| invalid())?;
            let ckind = match ckind {
                "storage" => ConstraintKind::StorageBudget,
                "sum" => ConstraintKind::SumRecreation,
                "max" => ConstraintKind::MaxRecreation,
                _ => return Err(invalid()),
            };
            Objective::with_constraint(kind, ckind, bound)?
        }
    };
    let (plan, value) = verstore::exact::enumerate_optimal(&sg, objective)?;
    formats::write_plan(&args.out, &plan)?;
    let report = evaluate(&plan, &sg, None)?;
    println!(
        "# objective\t{}",
        match args.objective {
            ObjectiveArg::MinStorage => "min_storage",
            ObjectiveArg::MinSumRecreation => "min_sum_recreation",
            ObjectiveArg::MinMaxRecreation => "min_max_recreation",
        }
    );
    println!("# optimum\t{value}");
    println!("# total_storage\t{}", report.total_storage);
    println!("# sum_recreation\t{}", report.sum_recreation);
    println!("# max_recreation\t{}", report.max_recreation);
    Ok(())
}

fn cmd_export_ilp(args: ExportIlpArgs) -> verstore::Result<()> {
    let matrices = formats::read_matrices(&args.matrix)?;
    let sg = verstore::solver_graph_from_matrices(&matrices)?;
    let text = verstore::ilp::export_ilp(&sg, args.theta)?;
    std::fs::write(&args.out, text)?;
    println!("# ilp\t{}", args.out.display());
    println!("# theta\t{}", args.theta);
    println!("# edges\t{}", sg.edges().len());
    Ok(())
}

fn cmd_repo(command: RepoCommand) -> verstore::Result<()> {
    match command {
        RepoCommand::Init { path } => {
            Repository::init(&path)?;
            println!("# repository\t{}", path.display());
            Ok(())
        }
        RepoCommand::Commit {
            path,
            file,
            parents,
        } => {
            let mut repo = Repository::open(&path)?;
            let bytes = std::fs::read(&file)?;
            let parents: Vec<usize> = match parents {
                None => Vec::new(),
                Some(text) => text
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse()
                            .map_err(|_| Error::InvalidInput(format!("invalid parent id `{p}`")))
                    })
                    .collect::<verstore::Result<_>>()?,
            };
            let id = repo.commit(&bytes, &parents)?;
            println!("# committed\t{id}");
            Ok(())
        }
        RepoCommand::Plan {
            path,
            strategy,
            budget,
            theta,
            alpha,
            window,
            depth,
            ordering,
            workload,
            policy,
            mode,
        } => {
            let mut repo = Repository::open(&path)?;
            let workload = load_workload(&workload)?;
            let strategy_value = match strategy {
                StrategyArg::Mca | StrategyArg::Mst => PlanStrategy::Mca,
                StrategyArg::Spt => PlanStrategy::Spt,
                StrategyArg::Lmg => PlanStrategy::Lmg {
                    budget: require(budget, "budget", "lmg")?,
                    workload,
                },
                StrategyArg::Mp => PlanStrategy::Mp {
                    theta: require(theta, "theta", "mp")?,
                },
                StrategyArg::Last => PlanStrategy::Last {
                    alpha: Stretch::parse(require(alpha.as_deref(), "alpha", "last")?)?,
                },
                StrategyArg::Gith => PlanStrategy::Gith {
                    config: GitHConfig {
                        window: window.unwrap_or(10),
                        max_depth: depth.unwrap_or(50),
                        ordering: ordering.into(),
                    },
                },
            };
            let options = PlanOptions {
                policy: parse_policy(&policy)?,
                mode: mode.into(),
            };
            let (before, after) = repo.plan(&strategy_value, options)?;
            println!("# strategy\t{}", strategy_name(strategy));
            println!("# before_total_storage\t{}", before.total_storage);
            println!("# before_sum_recreation\t{}", before.sum_recreation);
            println!("# before_max_recreation\t{}", before.max_recreation);
            println!("# after_total_storage\t{}", after.total_storage);
            println!("# after_sum_recreation\t{}", after.sum_recreation);
            println!("# after_max_recreation\t{}", after.max_recreation);
            Ok(())
        }
        RepoCommand::Checkout { path, version, out } => {
            let repo = Repository::open(&path)?;
            let bytes = repo.checkout(version)?;
            std::fs::write(&out, bytes)?;
            println!("# checkout\t{version}");
            println!("# out\t{}", out.display());
            Ok(())
        }
        RepoCommand::Stats { path } => {
            let repo = Repository::open(&path)?;
            let report = repo.stats()?;
            println!("# versions\t{}", repo.version_count());
            println!("# total_storage\t{}", report.total_storage);
            println!("# sum_recreation\t{}", report.sum_recreation);
            println!("# max_recreation\t{}", report.max_recreation);
            Ok(())
        }
    }
}

fn cmd_validate(args: ValidateArgs) -> verstore::Result<()> {
    let matrices = formats::read_matrices(&args.matrix)?;
    let n = matrices.max_version();
    matrices.validate(n)?;
    let sg = verstore::solver_graph_from_matrices(&matrices)?;
    let mut problems = 0usize;

    if let Some(plan_path) = &args.plan {
        let plan = formats::read_plan(plan_path)?;
        let violations = verstore::validate_plan(&plan, &sg);
        for v in &violations {
            println!("violation\tplan\t{v}");
        }
        problems += violations.len();
    }
    if args.triangle {
        let violations = verstore::check_triangle(&matrices);
        for v in &violations {
            println!("violation\ttriangle\t{v}");
        }
        problems += violations.len();
    }
    println!("# versions\t{n}");
    println!("# entries\t{}", matrices.len());
    println!("# violations\t{problems}");
    if problems > 0 {
        return Err(Error::InvalidInput(format!(
            "{problems} validation violation(s)"
        )));
    }
    Ok(())
}
