//! Command-line front end: single runs, experiment grids, exhaustive
//! small-instance verification, and instance inspection.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 unreadable or invalid
//! instance, 4 internal invariant violation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divset::bench::{
    aggregate, divea_seed, eval_seed, greedy_seed, run_grid, summarize, write_csv,
    write_json_summary, ExperimentGrid, IcParams, InstanceSource, ProblemKind,
};
use divset::oracle::{
    brute_force_opt, dgs_guarantee_check, gdgs_seed_guarantee_check, submodularity_ratio,
    GuaranteeReport, MAX_RATIO_N,
};
use divset::problems::{
    degree_cost_model, ingest_graph, CascadeEvaluator, CoverageInstance, GraphFormat, OneMax,
};
use divset::{
    dgs, dgs_solution_count_bound, divea, entropy, gdgs, gdgs_solution_count_bound, ConstraintKind,
    CostModel, DiveaConfig, Error, Objective, Population, Result,
};

#[derive(Parser)]
#[command(
    name = "divset",
    version,
    about = "Diverse high-quality solution sets for budgeted set-function maximization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a diverse feasible population for one instance.
    Solve(SolveArgs),
    /// Sweep a parameter grid and write one CSV row per run.
    Bench(BenchArgs),
    /// Exhaustively verify the value and count guarantees on a small instance.
    Oracle(OracleArgs),
    /// Parse a graph file and report ingestion statistics.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    Coverage,
    Influence,
    Onemax,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Coverage => ProblemKind::Coverage,
            ProblemArg::Influence => ProblemKind::Influence,
            ProblemArg::Onemax => ProblemKind::OneMax,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConstraintArg {
    Uniform,
    Knapsack,
}

impl From<ConstraintArg> for ConstraintKind {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::Uniform => ConstraintKind::Uniform,
            ConstraintArg::Knapsack => ConstraintKind::Knapsack,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Dimacs,
    Edgelist,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Auto => GraphFormat::Auto,
            FormatArg::Dimacs => GraphFormat::Dimacs,
            FormatArg::Edgelist => GraphFormat::EdgeList,
        }
    }
}

/// Instance selection shared by every subcommand.
#[derive(Args)]
struct InstanceArgs {
    /// Graph file (coverage and influence problems).
    instance: Option<PathBuf>,
    /// Ground-set size (onemax only; takes no instance file).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    /// Keep directed arcs exactly as written instead of mirroring them.
    #[arg(long)]
    no_symmetrize: bool,
    /// Arc activation probability where the file gives none.
    #[arg(long, default_value_t = 0.05)]
    p: f64,
}

impl InstanceArgs {
    fn load(&self, problem: ProblemKind) -> Result<InstanceSource> {
        match problem {
            ProblemKind::OneMax => {
                if self.instance.is_some() {
                    return Err(Error::invalid("onemax takes --n, not an instance file"));
                }
                let n = self
                    .n
                    .ok_or_else(|| Error::invalid("onemax needs --n <ground-set size>"))?;
                if n == 0 {
                    return Err(Error::invalid("--n must be at least 1"));
                }
                Ok(InstanceSource::OneMax { n })
            }
            _ => {
                let path = self
                    .instance
                    .as_deref()
                    .ok_or_else(|| Error::invalid("this problem needs an instance file"))?;
                let graph = ingest_graph(path, self.format.into(), !self.no_symmetrize, self.p)?;
                Ok(InstanceSource::Graph(Arc::new(graph)))
            }
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long, value_enum, default_value_t = ConstraintArg::Uniform)]
    constraint: ConstraintArg,
    /// Budget: solution size cap (uniform) or cost cap (knapsack).
    #[arg(long = "B")]
    budget: f64,
    /// Diversity margin reserved for random completion.
    #[arg(long = "m", default_value_t = 0.0)]
    margin: f64,
    /// Population size.
    #[arg(long, default_value_t = 5)]
    mu: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Refine the greedy population with the evolutionary stage.
    #[arg(long)]
    divea: bool,
    /// Evolutionary iterations (with --divea).
    #[arg(long = "t-max", default_value_t = 10_000)]
    t_max: u64,
    /// Per-element mutation probability; defaults to 1/n.
    #[arg(long)]
    mutation_rate: Option<f64>,
    /// Live-edge samples per influence evaluator.
    #[arg(long, default_value_t = 100)]
    r: usize,
    /// Output path; "-" writes to standard output.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long, value_enum, default_value_t = ConstraintArg::Uniform)]
    constraint: ConstraintArg,
    /// Budget axis, comma separated.
    #[arg(long = "B", value_delimiter = ',', default_value = "10,15")]
    budgets: Vec<f64>,
    /// Margin axis, comma separated.
    #[arg(long = "m", value_delimiter = ',', default_value = "2,5,8")]
    margins: Vec<f64>,
    /// Population-size axis, comma separated.
    #[arg(long = "mu", value_delimiter = ',', default_value = "5,10,15,20")]
    mus: Vec<usize>,
    /// Repetitions per cell.
    #[arg(long, default_value_t = 30)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "t-max", default_value_t = 10_000)]
    t_max: u64,
    /// Live-edge samples per influence evaluator.
    #[arg(long, default_value_t = 100)]
    r: usize,
    /// CSV output path for per-run records.
    #[arg(long)]
    csv: PathBuf,
    /// Optional JSON summary of the structural checks.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Print per-cell aggregates to standard output after the sweep.
    #[arg(long)]
    aggregates: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long, value_enum, default_value_t = ConstraintArg::Uniform)]
    constraint: ConstraintArg,
    #[arg(long = "B")]
    budget: f64,
    #[arg(long = "m", default_value_t = 0.0)]
    margin: f64,
    #[arg(long, default_value_t = 3)]
    mu: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seeded greedy repetitions checked against the value floor.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Live-edge samples per influence evaluator.
    #[arg(long, default_value_t = 100)]
    r: usize,
}

#[derive(Args)]
struct InspectArgs {
    #[command(flatten)]
    instance: InstanceArgs,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Inspect(args) => cmd_inspect(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Parse { .. } => 3,
        Error::Invariant(_) | Error::InfeasibleInitial { .. } => 4,
        Error::InvalidParameter(_) | Error::TooLarge { .. } => 2,
    }
}

/// Objective plus cost model for one run, built the same way the grid
/// runner builds them so single runs agree with bench rows.
struct Built {
    objective: Box<dyn Objective>,
    model: CostModel,
}

fn build(
    problem: ProblemKind,
    constraint: ConstraintKind,
    source: &InstanceSource,
    b: f64,
    m: f64,
    r: usize,
    run_seed: u64,
) -> Result<Built> {
    match source {
        InstanceSource::Graph(graph) => match problem {
            ProblemKind::Coverage => {
                let inst = CoverageInstance::from_graph(graph);
                let model = match constraint {
                    ConstraintKind::Uniform => CostModel::uniform(b, m)?,
                    ConstraintKind::Knapsack => CostModel::knapsack(inst.set_size_costs(), b, m)?,
                };
                Ok(Built {
                    objective: Box::new(inst),
                    model,
                })
            }
            ProblemKind::Influence => {
                let ev = CascadeEvaluator::new(graph, r, eval_seed(run_seed))?;
                let model = match constraint {
                    ConstraintKind::Uniform => CostModel::uniform(b, m)?,
                    ConstraintKind::Knapsack => degree_cost_model(graph, b, m)?,
                };
                Ok(Built {
                    objective: Box::new(ev),
                    model,
                })
            }
            ProblemKind::OneMax => Err(Error::invalid("onemax takes --n, not an instance file")),
        },
        InstanceSource::OneMax { n } => {
            if problem != ProblemKind::OneMax {
                return Err(Error::invalid("this problem needs an instance file"));
            }
            let model = match constraint {
                ConstraintKind::Uniform => CostModel::uniform(b, m)?,
                ConstraintKind::Knapsack => CostModel::knapsack(vec![1.0; *n], b, m)?,
            };
            Ok(Built {
                objective: Box::new(OneMax::new(*n)),
                model,
            })
        }
    }
}

fn render_population(pop: &Population, threshold: f64, diversity: f64) -> String {
    let mut out = String::new();
    for sol in pop.solutions() {
        let members: Vec<String> = sol.iter().map(|v| v.to_string()).collect();
        out.push_str(&members.join(" "));
        out.push('\n');
    }
    out.push_str(&format!("threshold {threshold:.6}\n"));
    out.push_str(&format!("entropy {diversity:.6}\n"));
    out
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let problem: ProblemKind = args.problem.into();
    let constraint: ConstraintKind = args.constraint.into();
    let source = args.instance.load(problem)?;
    let built = build(
        problem,
        constraint,
        &source,
        args.budget,
        args.margin,
        args.r,
        args.seed,
    )?;
    let oracle = built.objective.as_ref();

    let (mut population, _trace) = match constraint {
        ConstraintKind::Uniform => dgs(oracle, &built.model, args.mu, greedy_seed(args.seed))?,
        ConstraintKind::Knapsack => gdgs(oracle, &built.model, args.mu, greedy_seed(args.seed))?,
    };
    let mut accepted = 0;
    let mut stage = "greedy";
    if args.divea {
        let f_min = population
            .min_cached_value()
            .expect("greedy populations carry values");
        let config = DiveaConfig {
            t_max: args.t_max,
            mutation_rate: args.mutation_rate,
            f_min,
            seed: divea_seed(args.seed),
            ..DiveaConfig::default()
        };
        let refined = divea(oracle, &built.model, population, &config)?;
        population = refined.population;
        accepted = refined.accepted;
        stage = "greedy+divea";
    }

    let threshold = population
        .min_cached_value()
        .expect("solved populations carry values");
    let diversity = entropy(&population);
    let rendered = render_population(&population, threshold, diversity);
    if args.out == "-" {
        io::stdout().write_all(rendered.as_bytes())?;
    } else {
        let mut w = BufWriter::new(File::create(&args.out)?);
        w.write_all(rendered.as_bytes())?;
        w.flush()?;
    }
    eprintln!(
        "{problem} {constraint} B={} m={} mu={} seed={} [{stage}]: threshold {threshold:.6}, \
         entropy {diversity:.6}, accepted {accepted}",
        args.budget, args.margin, args.mu, args.seed
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let problem: ProblemKind = args.problem.into();
    let constraint: ConstraintKind = args.constraint.into();
    let source = args.instance.load(problem)?;
    let grid = ExperimentGrid {
        problem,
        constraint,
        budgets: args.budgets,
        margins: args.margins,
        population_sizes: args.mus,
        repetitions: args.reps,
        base_seed: args.seed,
        divea: DiveaConfig {
            t_max: args.t_max,
            ..DiveaConfig::default()
        },
        ic: IcParams {
            r: args.r,
            p: args.instance.p,
            symmetrize: !args.instance.no_symmetrize,
        },
    };
    let cells = grid.budgets.len() * grid.margins.len() * grid.population_sizes.len();
    eprintln!(
        "sweeping {cells} cells x {} repetitions ({} runs, 2 records each)",
        grid.repetitions,
        cells * grid.repetitions
    );
    let start = Instant::now();
    let records = run_grid(&grid, &source)?;
    eprintln!(
        "finished {} records in {:.1}s",
        records.len(),
        start.elapsed().as_secs_f64()
    );

    let mut w = BufWriter::new(File::create(&args.csv)?);
    write_csv(&records, &mut w)?;
    w.flush()?;

    let summary = summarize(&records);
    let mut failed_checks = 0u64;
    for (check, counts) in &summary.checks {
        if counts.failed > 0 {
            eprintln!(
                "check {check}: {} of {} runs FAILED",
                counts.failed,
                counts.failed + counts.passed
            );
            failed_checks += counts.failed;
        }
    }
    if failed_checks == 0 {
        eprintln!("all structural checks passed");
    }
    if let Some(path) = &args.summary {
        let mut w = BufWriter::new(File::create(path)?);
        write_json_summary(&summary, &mut w)?;
        w.flush()?;
    }
    if args.aggregates {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        for cell in aggregate(&records) {
            writeln!(out, "{}", cell.display_row())?;
        }
    }
    Ok(())
}

fn print_guarantee(name: &str, report: &GuaranteeReport) -> bool {
    println!(
        "check {name}: {} (min {:.6} >= floor {:.6} = {:.6} x opt {:.6}; {} trials, {} skipped)",
        if report.holds { "pass" } else { "FAIL" },
        report.min_observed,
        report.floor,
        report.bound_fraction,
        report.opt_value,
        report.trials,
        report.skipped,
    );
    report.holds
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let problem: ProblemKind = args.problem.into();
    let constraint: ConstraintKind = args.constraint.into();
    let source = args.instance.load(problem)?;
    let built = build(
        problem,
        constraint,
        &source,
        args.budget,
        args.margin,
        args.r,
        args.seed,
    )?;
    let oracle = built.objective.as_ref();
    let model = &built.model;
    let n = oracle.n();
    let mut failures = 0u32;

    let report = match constraint {
        ConstraintKind::Uniform => {
            dgs_guarantee_check(oracle, model, args.mu, args.trials, args.seed)?
        }
        ConstraintKind::Knapsack => gdgs_seed_guarantee_check(oracle, model)?,
    };
    println!("opt {:.6}", report.opt_value);
    println!("alpha {:.6}", report.alpha);
    let floor_name = match constraint {
        ConstraintKind::Uniform => "completion_floor",
        ConstraintKind::Knapsack => "seed_floor",
    };
    if !print_guarantee(floor_name, &report) {
        failures += 1;
    }

    // Count check: enumerated feasible solutions at the greedy quality
    // level must reach the combinatorial lower bound.
    match constraint {
        ConstraintKind::Uniform => {
            let (_, trace) = dgs(oracle, model, 1, greedy_seed(args.seed))?;
            let level = oracle.evaluate(&trace.core_solution);
            let brute = brute_force_opt(oracle, model, Some(level))?;
            let feasible = brute
                .feasible_count_at_threshold
                .expect("threshold was supplied");
            let (bound, _) = dgs_solution_count_bound(n, model.budget(), model.margin())?;
            let pass = feasible >= bound;
            println!(
                "check solution_count: {} (feasible at level {level:.6}: {feasible} >= guaranteed {bound})",
                if pass { "pass" } else { "FAIL" }
            );
            if !pass {
                failures += 1;
            }
        }
        ConstraintKind::Knapsack => {
            let (_, trace) = gdgs(oracle, model, 1, greedy_seed(args.seed))?;
            let core_value = oracle.evaluate(&trace.core_solution);
            let level = match trace.best_singleton {
                Some((_, single)) if single > core_value => single,
                _ => core_value,
            };
            let brute = brute_force_opt(oracle, model, Some(level))?;
            let feasible = brute
                .feasible_count_at_threshold
                .expect("threshold was supplied");
            let bound = gdgs_solution_count_bound(
                n,
                model.budget(),
                model.margin(),
                model.c_min(),
                model.c_max(),
            )?;
            let pass = feasible >= bound;
            println!(
                "check solution_count: {} (feasible at level {level:.6}: {feasible} >= guaranteed {bound}{})",
                if pass { "pass" } else { "FAIL" },
                if bound == 0u32.into() { "; bound vacuous" } else { "" }
            );
            if !pass {
                failures += 1;
            }
        }
    }

    // For small ground sets, cross-check any certified curvature claim
    // against full enumeration.
    if n <= MAX_RATIO_N {
        let ratio = submodularity_ratio(oracle)?;
        let pass = !oracle.certified_submodular() || ratio.alpha_f == 1.0;
        println!(
            "check alpha_exact: {} (enumerated alpha {:.6} over {} triples{})",
            if pass { "pass" } else { "FAIL" },
            ratio.alpha_f,
            ratio.pairs_examined,
            if ratio.exact {
                ", exact arithmetic"
            } else {
                ""
            }
        );
        if !pass {
            failures += 1;
        }
    }

    if failures > 0 {
        return Err(Error::invariant(format!(
            "{failures} oracle check(s) failed"
        )));
    }
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    let path = args
        .instance
        .instance
        .as_deref()
        .ok_or_else(|| Error::invalid("inspect needs an instance file"))?;
    let graph = ingest_graph(
        path,
        args.instance.format.into(),
        !args.instance.no_symmetrize,
        args.instance.p,
    )?;
    let stats = graph.stats();
    println!("vertices {}", graph.n());
    println!("undirected_edges {}", graph.undirected_edge_count());
    println!("arcs {}", graph.num_arcs());
    if let Some(v) = stats.declared_vertices {
        println!("declared_vertices {v}");
    }
    if let Some(e) = stats.declared_edges {
        println!("declared_edges {e}");
    }
    println!("input_lines {}", stats.input_lines);
    println!("self_loops_dropped {}", stats.self_loops_dropped);
    println!("duplicates_collapsed {}", stats.duplicates_collapsed);
    println!("symmetrized {}", stats.symmetrized);
    let n = graph.n();
    if n > 0 {
        let degrees: Vec<usize> = (0..n).map(|v| graph.out_degree(v)).collect();
        let min = degrees.iter().min().copied().unwrap_or(0);
        let max = degrees.iter().max().copied().unwrap_or(0);
        let mean = degrees.iter().sum::<usize>() as f64 / n as f64;
        println!("out_degree min {min} mean {mean:.2} max {max}");
    }
    if stats.edge_count_mismatch {
        println!("warning: header edge count does not match parsed edges");
    }
    Ok(())
}
