//! `netfail`: one subcommand per destruction scenario. Reports are
//! deterministic for a fixed seed; wall-clock data lives only in the
//! side-car manifest so payloads stay byte-identical across reruns and
//! thread counts.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use netfail::cascade;
use netfail::error::Error;
use netfail::formats;
use netfail::frontal;
use netfail::graph::Graph;
use netfail::markov::{self, EdgeRates, RateMatrix, StateVector};
use netfail::protection::{self, SelectionMode};
use netfail::random_graph;
use netfail::rng::substream_seed;

const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser, Serialize)]
#[command(name = "netfail", version, about = "Destruction scenarios for large networks")]
struct Cli {
    /// Master RNG seed (falls back to NETFAIL_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output base path; writes <base>.json / <base>.csv / <base>.manifest.json.
    #[arg(long, global = true, default_value = "netfail_out")]
    output: PathBuf,
    /// Worker threads (affects speed only, never results).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Subcommand, Serialize)]
enum Command {
    /// Deterministic cascade from seed vertices; timeline plus min/max damage times.
    Cascade(CascadeArgs),
    /// Pick the spanning tree with maximal radius and the vertex to protect.
    Protect(ProtectArgs),
    /// Probabilistic damage: exact chain, Monte-Carlo epidemic, or raw matrix evolution.
    Markov(MarkovArgs),
    /// Erdős–Rényi connectivity-threshold experiment.
    Er(ErArgs),
    /// Frontal-layer activation statistics, Monte Carlo, and regeneration demo.
    Frontal(FrontalArgs),
    /// Emit the line graph (edge-damage reduction) of a graph.
    LineGraph(LineGraphArgs),
}

#[derive(Args, Serialize)]
struct CascadeArgs {
    /// Graph file (edge-list text or JSON).
    graph: PathBuf,
    /// Comma-separated seed vertices.
    #[arg(long)]
    seeds: String,
    /// Truncate the reported timeline at this step.
    #[arg(long)]
    max_t: Option<usize>,
}

#[derive(Args, Serialize)]
struct ProtectArgs {
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Exact: enumeration cap. Sampled: number of random trees.
    #[arg(long, default_value_t = protection::DEFAULT_TREE_CAP)]
    budget: usize,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Args, Serialize)]
struct MarkovArgs {
    /// Graph file (exact/montecarlo) or matrix CSV (matrix model).
    input: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Uniform per-edge transmission rate.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Comma-separated sample times.
    #[arg(long, default_value = "1.0")]
    times: String,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Seed vertices (graph models).
    #[arg(long, default_value = "0")]
    seeds: String,
    /// Initial distribution for the matrix model (defaults to point mass at 0).
    #[arg(long)]
    pi0: Option<String>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModelArg {
    Exact,
    Montecarlo,
    Matrix,
}

#[derive(Args, Serialize)]
struct ErArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 300)]
    trials: usize,
    /// Optional comma-separated c grid for a CSV sweep.
    #[arg(long)]
    c_grid: Option<String>,
}

#[derive(Args, Serialize)]
struct FrontalArgs {
    /// Frontal-set size N.
    #[arg(long = "big-n")]
    big_n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, conflicts_with = "default_p")]
    p: Option<f64>,
    /// Use p = (N r)^{-1/2}.
    #[arg(long)]
    default_p: bool,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    /// Damage this fraction of the active set, regenerate, report recovery.
    #[arg(long)]
    damage_fraction: Option<f64>,
}

#[derive(Args, Serialize)]
struct LineGraphArgs {
    graph: PathBuf,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match e {
            Error::Disconnected | Error::TooLarge { .. } | Error::CapExceeded { .. } => {
                EXIT_INFEASIBLE
            }
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    parameters: serde_json::Value,
    master_seed: u64,
    artifact_version: &'a str,
    duration_seconds: f64,
}

/// Payloads produced by one command; written after the run succeeds.
#[derive(Default)]
struct Reports {
    json: Option<String>,
    csv: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore failure when a pool already exists (tests call run twice).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let seed = cli.seed.unwrap_or_else(|| {
        std::env::var("NETFAIL_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0)
    });
    let started = Instant::now();
    match run(&cli, seed) {
        Ok(reports) => {
            if let Err(e) = write_reports(&cli, seed, reports, started.elapsed().as_secs_f64()) {
                eprintln!("error: {}", e.message);
                return ExitCode::from(e.code);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: &Cli, seed: u64) -> Result<Reports, CliError> {
    match &cli.command {
        Command::Cascade(args) => cmd_cascade(args),
        Command::Protect(args) => cmd_protect(args, seed),
        Command::Markov(args) => cmd_markov(args, seed),
        Command::Er(args) => cmd_er(args, seed),
        Command::Frontal(args) => cmd_frontal(args, seed),
        Command::LineGraph(args) => cmd_line_graph(args),
    }
}

fn write_reports(cli: &Cli, seed: u64, reports: Reports, duration: f64) -> Result<(), CliError> {
    if cli.format.json() {
        if let Some(json) = &reports.json {
            std::fs::write(with_ext(&cli.output, "json"), json).map_err(io_err)?;
        }
    }
    if cli.format.csv() {
        if let Some(csv) = &reports.csv {
            std::fs::write(with_ext(&cli.output, "csv"), csv).map_err(io_err)?;
        }
    }
    let manifest = RunManifest {
        command: command_name(&cli.command),
        parameters: serde_json::to_value(&cli.command).expect("args serialize"),
        master_seed: seed,
        artifact_version: env!("CARGO_PKG_VERSION"),
        duration_seconds: duration,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(with_ext(&cli.output, "manifest.json"), text).map_err(io_err)?;
    Ok(())
}

fn io_err(e: std::io::Error) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: format!("writing output: {e}"),
    }
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut name = base.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(ext);
    base.with_file_name(name)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Cascade(_) => "cascade",
        Command::Protect(_) => "protect",
        Command::Markov(_) => "markov",
        Command::Er(_) => "er",
        Command::Frontal(_) => "frontal",
        Command::LineGraph(_) => "line-graph",
    }
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("reading {}: {e}", path.display())))?;
    Ok(formats::parse_graph(&text)?)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    let items: Result<Vec<T>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    items.map_err(|_| CliError::usage(format!("could not parse {what} list {text:?}")))
}

#[derive(Serialize)]
struct CascadeSummary {
    n: usize,
    seeds: Vec<usize>,
    connected: bool,
    t_min: Option<usize>,
    argmin: Option<usize>,
    t_max: Option<usize>,
    argmax: Option<usize>,
    cascade_total_time: usize,
    damaged_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

fn cmd_cascade(args: &CascadeArgs) -> Result<Reports, CliError> {
    let g = load_graph(&args.graph)?;
    let seeds: Vec<usize> = parse_list(&args.seeds, "seed")?;
    if seeds.is_empty() {
        return Err(CliError::usage("at least one seed vertex is required"));
    }
    let timeline = cascade::simulate_cascade(&g, &seeds)?;
    let connected = g.is_connected();
    let (t_min, argmin, t_max, argmax, warning) = if connected {
        let (t_min, argmin) = cascade::min_damage_time(&g)?;
        let (t_max, argmax) = cascade::max_damage_time(&g)?;
        (Some(t_min), Some(argmin), Some(t_max), Some(argmax), None)
    } else {
        (
            None,
            None,
            None,
            None,
            Some("graph is disconnected; total damage times are undefined".to_string()),
        )
    };
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    let summary = CascadeSummary {
        n: g.n(),
        seeds: timeline.seeds.clone(),
        connected,
        t_min,
        argmin,
        t_max,
        argmax,
        cascade_total_time: timeline.total_time(),
        damaged_count: timeline.damaged_count(),
        warning,
    };

    let mut csv = String::from("step,newly_damaged_count,cumulative_count,vertex_list\n");
    let mut cumulative = 0;
    let keep = args
        .max_t
        .map_or(timeline.waves.len(), |t| t.saturating_add(1));
    for (step, wave) in timeline.waves.iter().enumerate().take(keep) {
        cumulative += wave.len();
        let verts: Vec<String> = wave.iter().map(usize::to_string).collect();
        csv.push_str(&format!(
            "{step},{},{cumulative},{}\n",
            wave.len(),
            verts.join(" ")
        ));
    }
    Ok(Reports {
        json: Some(to_pretty(&summary)),
        csv: Some(csv),
    })
}

#[derive(Serialize)]
struct ProtectionPlanJson {
    t_tilde: usize,
    center: usize,
    tree_edges: Vec<(usize, usize)>,
    mode: SelectionMode,
    trees_examined: usize,
    lower_bound: bool,
}

fn cmd_protect(args: &ProtectArgs, seed: u64) -> Result<Reports, CliError> {
    if args.budget == 0 {
        return Err(CliError::usage("budget must be positive"));
    }
    let g = load_graph(&args.graph)?;
    let mode = match args.mode {
        ModeArg::Exact => SelectionMode::Exact,
        ModeArg::Sampled => SelectionMode::Sampled,
    };
    let plan = protection::select_protection_tree(&g, mode, args.budget, seed)?;
    let json = ProtectionPlanJson {
        t_tilde: plan.t_tilde,
        center: plan.protected_vertex,
        tree_edges: plan.chosen_tree.graph().edges().to_vec(),
        mode: plan.mode,
        trees_examined: plan.trees_examined,
        lower_bound: plan.is_lower_bound,
    };
    let mut csv = String::from("u,v\n");
    for (u, v) in plan.chosen_tree.graph().edges() {
        csv.push_str(&format!("{u},{v}\n"));
    }
    Ok(Reports {
        json: Some(to_pretty(&json)),
        csv: Some(csv),
    })
}

#[derive(Serialize)]
struct MarkovReport {
    model: String,
    times: Vec<f64>,
    /// Per time: per-vertex damage probabilities (graph models) or state
    /// probabilities (matrix model).
    probabilities: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    standard_errors: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fully_damaged_probability: Option<Vec<f64>>,
}

fn cmd_markov(args: &MarkovArgs, seed: u64) -> Result<Reports, CliError> {
    let times: Vec<f64> = parse_list(&args.times, "time")?;
    if times.is_empty() {
        return Err(CliError::usage("at least one sample time is required"));
    }
    let horizon = times.iter().cloned().fold(0.0, f64::max);
    let report = match args.model {
        ModelArg::Exact => {
            let g = load_graph(&args.input)?;
            let seeds: Vec<usize> = parse_list(&args.seeds, "seed")?;
            let chain = markov::exact_state_chain(
                &g,
                &EdgeRates::Uniform(args.rate),
                &seeds,
                markov::EXACT_CHAIN_LIMIT,
            )
            .map_err(|e| match e {
                Error::TooLarge { n, limit } => CliError {
                    code: EXIT_INFEASIBLE,
                    message: format!(
                        "graph with {n} vertices exceeds exact-chain limit {limit}; \
                         use --model montecarlo instead"
                    ),
                },
                other => other.into(),
            })?;
            let mut probabilities = Vec::new();
            let mut full = Vec::new();
            for &t in &times {
                let pi = chain.evolve(t)?;
                probabilities.push(chain.vertex_marginals(&pi));
                full.push(chain.fully_damaged_probability(&pi));
            }
            MarkovReport {
                model: "exact".into(),
                times,
                probabilities,
                standard_errors: None,
                trials: None,
                fully_damaged_probability: Some(full),
            }
        }
        ModelArg::Montecarlo => {
            let g = load_graph(&args.input)?;
            let seeds: Vec<usize> = parse_list(&args.seeds, "seed")?;
            let outcome = markov::simulate_epidemic(
                &g,
                &EdgeRates::Uniform(args.rate),
                &seeds,
                horizon,
                &times,
                args.trials,
                seed,
            )?;
            MarkovReport {
                model: "montecarlo".into(),
                times: outcome.times,
                probabilities: outcome.vertex_probabilities,
                standard_errors: Some(outcome.standard_errors),
                trials: Some(outcome.trials),
                fully_damaged_probability: None,
            }
        }
        ModelArg::Matrix => {
            let text = std::fs::read_to_string(&args.input)
                .map_err(|e| CliError::usage(format!("reading {}: {e}", args.input.display())))?;
            let m = formats::parse_matrix_csv(&text)?;
            let rate_matrix = RateMatrix::generator(m.clone()).or_else(|_| RateMatrix::general(m))?;
            let pi0 = match &args.pi0 {
                Some(text) => {
                    let probs: Vec<f64> = parse_list(text, "probability")?;
                    StateVector::distribution(probs.clone())
                        .or_else(|_| StateVector::marginal(probs))?
                }
                None => StateVector::point_mass(rate_matrix.dim(), 0),
            };
            let mut probabilities = Vec::new();
            for &t in &times {
                probabilities.push(
                    markov::evolve_continuous(&pi0, &rate_matrix, t)?
                        .probabilities()
                        .to_vec(),
                );
            }
            MarkovReport {
                model: "matrix".into(),
                times,
                probabilities,
                standard_errors: None,
                trials: None,
                fully_damaged_probability: None,
            }
        }
    };

    let mut csv = String::from("time,vertex,p,stderr\n");
    for (ti, &t) in report.times.iter().enumerate() {
        for (v, &p) in report.probabilities[ti].iter().enumerate() {
            let se = report
                .standard_errors
                .as_ref()
                .map_or(0.0, |s| s[ti][v]);
            csv.push_str(&format!("{t},{v},{p},{se}\n"));
        }
    }
    Ok(Reports {
        json: Some(to_pretty(&report)),
        csv: Some(csv),
    })
}

fn cmd_er(args: &ErArgs, seed: u64) -> Result<Reports, CliError> {
    if random_graph::below_theorem_regime(args.c) {
        eprintln!(
            "warning: c = {} is outside the connectivity theorem's c > 3 regime",
            args.c
        );
    }
    let report = random_graph::threshold_experiment(args.n, args.c, args.trials, seed)?;
    let csv = match &args.c_grid {
        Some(grid) => {
            let cs: Vec<f64> = parse_list(grid, "c")?;
            let mut csv = String::from("c,p,trials,connected_count,empirical_probability\n");
            for (i, &c) in cs.iter().enumerate() {
                let r = random_graph::threshold_experiment(
                    args.n,
                    c,
                    args.trials,
                    substream_seed(seed, i as u64 + 1),
                )?;
                csv.push_str(&format!(
                    "{c},{},{},{},{}\n",
                    r.p, r.trials, r.connected_count, r.empirical_probability
                ));
            }
            Some(csv)
        }
        None => None,
    };
    Ok(Reports {
        json: Some(to_pretty(&report)),
        csv,
    })
}

#[derive(Serialize)]
struct RegenerationReport {
    trials: usize,
    damage_fraction: f64,
    mean_recovered_active: f64,
    variance: f64,
    mean_stderr: f64,
}

#[derive(Serialize)]
struct FrontalReport {
    n: usize,
    r: usize,
    k: usize,
    p: f64,
    exact: frontal::ActivationStats,
    monte_carlo: frontal::MonteCarloStats,
    /// Derived extension N p_c^2, not a closed form from the scenario catalog.
    overlap_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    regeneration: Option<RegenerationReport>,
}

fn cmd_frontal(args: &FrontalArgs, seed: u64) -> Result<Reports, CliError> {
    let p = match (args.p, args.default_p) {
        (Some(p), _) => p,
        (None, true) => frontal::default_p(args.big_n, args.r)?,
        (None, false) => {
            return Err(CliError::usage("provide --p or --default-p"));
        }
    };
    let exact = frontal::activation_stats(args.big_n, p, args.r, args.k)?;
    let monte_carlo =
        frontal::monte_carlo_stats(args.big_n, args.r, args.k, p, args.trials, seed)?;
    let regeneration = match args.damage_fraction {
        Some(f) => {
            if !(0.0..=1.0).contains(&f) {
                return Err(CliError::usage(format!("damage fraction {f} outside [0, 1]")));
            }
            let mut counts = Vec::with_capacity(args.trials);
            for trial in 0..args.trials {
                let sys = frontal::FrontalSystem::generate(
                    args.big_n,
                    args.r,
                    args.k,
                    p,
                    substream_seed(seed, 2 * trial as u64),
                )?;
                let active = sys.active_set();
                let damage_count = (f * active.len() as f64).ceil() as usize;
                let damaged = &active[..damage_count.min(active.len())];
                let regen =
                    sys.regenerate_after_damage(damaged, substream_seed(seed, 2 * trial as u64 + 1))?;
                counts.push(regen.active_count());
            }
            let stats = frontal::stats_from_counts(&counts);
            Some(RegenerationReport {
                trials: stats.trials,
                damage_fraction: f,
                mean_recovered_active: stats.mean,
                variance: stats.variance,
                mean_stderr: stats.mean_stderr,
            })
        }
        None => None,
    };
    let report = FrontalReport {
        n: args.big_n,
        r: args.r,
        k: args.k,
        p,
        overlap_estimate: frontal::overlap_estimate(args.big_n, args.r, args.k, p)?,
        exact,
        monte_carlo,
        regeneration,
    };
    let csv = format!(
        "n,r,k,p,p_c,expected_active,variance,mc_mean,mc_variance\n{},{},{},{},{},{},{},{},{}\n",
        report.n,
        report.r,
        report.k,
        report.p,
        report.exact.p_c,
        report.exact.expected_active,
        report.exact.variance,
        report.monte_carlo.mean,
        report.monte_carlo.variance
    );
    Ok(Reports {
        json: Some(to_pretty(&report)),
        csv: Some(csv),
    })
}

fn cmd_line_graph(args: &LineGraphArgs) -> Result<Reports, CliError> {
    let g = load_graph(&args.graph)?;
    let lg = g.line_graph();
    let json = to_pretty(&formats::GraphJson::from(&lg));
    let mut csv = String::from("u,v\n");
    for (u, v) in lg.edges() {
        csv.push_str(&format!("{u},{v}\n"));
    }
    Ok(Reports {
        json: Some(json),
        csv: Some(csv),
    })
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}
