use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sdsbm_core::estimator::{estimate, quantile_rank};
use sdsbm_core::graph_model::block_row_separation;
use sdsbm_core::harness::{
    aggregate, emit_svg, parse_key_values, read_records_csv, records_to_csv, run_monte_carlo, write_aggregate_csv,
    RunConfig, RunRecord, ScenarioKind, ScenarioSpec,
};
use sdsbm_core::theory::{check_assumptions, separation, AssumptionCheck, EpsilonSet};
use sdsbm_core::{AdjacencyMatrix, Error};

#[derive(Parser)]
#[command(name = "sdsbm-lab", version, about = "Community recovery experiments on sparse directed block models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo sweep over scenarios, sizes and methods.
    Run(RunArgs),
    /// Smoothed probability estimate for a graph read from an edge list.
    Estimate(EstimateArgs),
    /// Finite-n check of the three model assumptions for a scenario.
    CheckAssumptions(CheckArgs),
    /// SVG panels from a records CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Plain-text `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario name or `all`.
    #[arg(long)]
    scenario: Option<String>,
    /// `true`, `false` or `both`.
    #[arg(long)]
    directed: Option<String>,
    /// Comma-separated node counts.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    mc: Option<String>,
    /// Comma-separated subset of KMA, KMP, SPECTRAL, DSCORE.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "h-const")]
    h_const: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 for elapsed_ms so identical seeds give identical files.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Bandwidth; defaults to sqrt(ln n / n).
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    n: usize,
    /// Override the derived C_1 constant.
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long = "h-const", default_value_t = 1.0)]
    h_const: f64,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Invalid(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Parse { .. } => Failure::Invalid(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

struct RunPlan {
    scenarios: Vec<ScenarioKind>,
    directions: Vec<bool>,
    out: PathBuf,
    config: RunConfig,
}

fn plan(args: &RunArgs) -> Result<RunPlan, Failure> {
    let mut entries: Vec<(String, String)> = Vec::new();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        entries.extend(parse_key_values(&text, path)?);
    }
    let flags = [
        ("scenario", args.scenario.clone()),
        ("directed", args.directed.clone()),
        ("n", args.n.clone()),
        ("mc", args.mc.clone()),
        ("methods", args.methods.clone()),
        ("seed", args.seed.clone()),
        ("h_const", args.h_const.clone()),
        ("jobs", args.jobs.clone()),
        ("out", args.out.as_ref().map(|p| p.display().to_string())),
    ];
    entries.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
    if args.no_timing {
        entries.push(("record_timing".into(), "false".into()));
    }

    let mut config = RunConfig::default();
    let mut scenario = "all".to_string();
    let mut directed = "both".to_string();
    let mut out = PathBuf::from("results");
    for (k, v) in entries {
        match k.as_str() {
            "scenario" => scenario = v,
            "directed" => directed = v,
            "out" => out = PathBuf::from(v),
            _ => config.set(&k, &v)?,
        }
    }
    config.validate()?;
    let scenarios = if scenario.trim().eq_ignore_ascii_case("all") {
        ScenarioKind::ALL.to_vec()
    } else {
        scenario
            .split(',')
            .map(|s| s.parse::<ScenarioKind>())
            .collect::<Result<_, _>>()?
    };
    let directions = match directed.trim().to_ascii_lowercase().as_str() {
        "true" | "directed" => vec![true],
        "false" | "undirected" => vec![false],
        "both" => vec![true, false],
        other => return Err(invalid(format!("--directed must be true, false or both, got '{other}'"))),
    };
    Ok(RunPlan {
        scenarios,
        directions,
        out,
        config,
    })
}

fn write_outputs(records: &[RunRecord], out: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::Other(format!("{}: {e}", out.display())))?;
    let path = out.join("records.csv");
    std::fs::write(&path, records_to_csv(records)).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    let rows = aggregate(records);
    write_aggregate_csv(&rows, &out.join("aggregate.csv"))?;
    emit_svg(&rows, &out.join("figures").join(""))?;
    for r in &rows {
        println!(
            "{:<17} {:<10} n={:<5} {:<8} mean_ari={:.4} sd={:.4} exact={:.2} errors={}",
            r.scenario,
            if r.directed { "directed" } else { "undirected" },
            r.n,
            r.method,
            r.mean_ari,
            r.sd_ari,
            r.exact_rate,
            r.errors
        );
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<bool, Failure> {
    let plan = plan(args)?;
    let mut records = Vec::new();
    for &kind in &plan.scenarios {
        for &directed in &plan.directions {
            let spec = ScenarioSpec::new(kind, directed);
            records.extend(run_monte_carlo(&spec, &plan.config)?);
        }
    }
    write_outputs(&records, &plan.out)?;
    let failures: Vec<&RunRecord> = records.iter().filter(|r| r.is_error()).collect();
    for r in &failures {
        if let Err(msg) = &r.outcome {
            eprintln!(
                "error row: {} directed={} n={} {} replicate {}: {msg}",
                r.scenario, r.directed, r.n, r.method, r.replicate
            );
        }
    }
    Ok(failures.is_empty())
}

fn cmd_estimate(args: &EstimateArgs) -> Result<(), Failure> {
    let a = AdjacencyMatrix::read_edge_list(&args.edges)?;
    let est = estimate(&a, args.h)?;
    est.write_csv(&args.out)?;
    eprintln!(
        "n = {}, smallest neighborhood = {}, wrote {}",
        a.n(),
        est.min_neighborhood(),
        args.out.display()
    );
    Ok(())
}

fn print_check(name: &str, c: &AssumptionCheck) {
    println!(
        "{name:<28} {:<4} slack={:+.6e} lhs={:.6e} rhs={:.6e}",
        if c.passed { "pass" } else { "FAIL" },
        c.slack,
        c.lhs,
        c.rhs
    );
}

fn cmd_check(args: &CheckArgs) -> Result<(), Failure> {
    let kind: ScenarioKind = args.scenario.parse()?;
    let spec = ScenarioSpec::new(kind, true);
    let n = args.n;
    if n < 4 {
        return Err(invalid("need n >= 4"));
    }
    let block = spec.block(n)?;
    let rho = spec.rho(n)?;
    let k = spec.k(n);
    let d_b = block_row_separation(&block)?;
    let mut eps = EpsilonSet::rate_defaults(n, rho.rho_min(), args.h_const)?;
    if let Some(c1) = args.c1 {
        eps.c1 = c1;
    }
    let report = check_assumptions(n, k, &rho, block.gamma(), d_b, &eps)?;
    let sep = separation(block.gamma(), rho.rho_min(), d_b, n)?;
    let h = sdsbm_core::estimator::default_bandwidth(n, args.h_const);
    println!("scenario {kind}, n = {n}, K = {k}, gamma = {:.6}, d_B* = {d_b:.6}", block.gamma());
    println!(
        "h = {h:.6} (rank {}), eps_pi = {:.6}, eps_AP = {:.6}, eps_m = {:.6}, C_1 = {}",
        quantile_rank(h, n),
        eps.eps_pi,
        eps.eps_ap,
        eps.eps_m,
        eps.c1
    );
    println!(
        "S_n = {:.6}, L_n = {:.6e}, E_min = {:.3}, r = {:.6}",
        sep.s_n, sep.l_n, sep.e_min, sep.r
    );
    print_check("density floor", &report.a1_density);
    print_check("proportion tolerance", &report.a1_eps_pi);
    print_check("community count", &report.a2);
    print_check("signal strength", &report.a3);
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> Result<(), Failure> {
    let records = read_records_csv(&args.input)?;
    let rows = aggregate(&records);
    for path in emit_svg(&rows, &args.out.join(""))? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Estimate(a) => cmd_estimate(a).map(|_| true),
        Command::CheckAssumptions(a) => cmd_check(a).map(|_| true),
        Command::Plot(a) => cmd_plot(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
