use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tasp::ewdg::{parse_instance, serialize_instance, EwdgError, SearchGraph};
use tasp::gen::{generate_instance, Family, TopologyKind};
use tasp::harness::{
    corpus_jobs, read_results_csv, render_report, run_benchmark, sweep_jobs, write_results_csv, CostModel, Format,
    HarnessError,
};
use tasp::oracle::{self, check_admissible, OracleError};
use tasp::search::{beast, beauty, beauty_and_beast, ei_ucs, SearchOptions, Status, TaspOptions};
use tasp::{Bound, Extended, Instance, Rational, Report, Scalar};

#[derive(Parser)]
#[command(name = "tasp", version, about = "Shortest paths on estimated weighted digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one benchmark instance.
    Generate(GenerateArgs),
    /// Run one algorithm on an instance.
    Solve(SolveArgs),
    /// Compare every algorithm against exhaustive enumeration.
    Verify(VerifyArgs),
    /// Run a benchmark sweep and write per-run CSV rows.
    Bench(BenchArgs),
    /// Aggregate a results CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_topology)]
    topology: TopologyKind,
    #[arg(long)]
    nodes: usize,
    #[arg(long, default_value_t = 3)]
    layers: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long)]
    cost_max: u64,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Estimator seed in [0, 26].
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    EiUcs,
    Beast,
    Beauty,
    Bnb,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    alg: Alg,
    /// BEAST threshold (`p/q`, integer or `inf`).
    #[arg(long, value_parser = parse_bound)]
    u_prune: Option<Bound>,
    /// BEAUTY threshold (`p/q`, integer or `inf`).
    #[arg(long, value_parser = parse_bound)]
    l_prune: Option<Bound>,
    /// Write the event log here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(short, long)]
    input: PathBuf,
    /// Report destination; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value_t = oracle::DEFAULT_NODE_LIMIT)]
    max_nodes: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files.
    #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
    corpus: Option<PathBuf>,
    /// JSON file with a `families` list.
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Inclusive seed range for sweeps, e.g. `0..26`.
    #[arg(long, default_value = "0..26", value_parser = parse_seeds)]
    seeds: SeedRange,
    /// Per-algorithm limit in seconds.
    #[arg(long, default_value_t = 300)]
    timeout: u64,
    /// Simulated time per invocation, by level.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational, default_value = "1,10,100")]
    tau: Vec<Rational>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Clone, Copy, Debug)]
struct SeedRange(u64, u64);

fn parse_topology(s: &str) -> Result<TopologyKind, String> {
    s.parse().map_err(|e: tasp::gen::GenError| e.to_string())
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    Rational::parse_exact(s.trim()).ok_or_else(|| format!("`{s}` is not a rational (expected p/q or an integer)"))
}

fn parse_bound(s: &str) -> Result<Bound, String> {
    Extended::parse(s).ok_or_else(|| format!("`{s}` is not a rational (expected p/q, an integer or inf)"))
}

fn parse_seeds(s: &str) -> Result<SeedRange, String> {
    let bad = || format!("`{s}` is not a seed range (expected a..b)");
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (s, s),
    };
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(SeedRange(lo, hi))
}

enum Failure {
    Usage(String),
    Validation(String),
    NoSolution,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::NoSolution => 3,
        }
    }
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn harness_failure(e: HarnessError) -> Failure {
    match e {
        HarnessError::Instance { .. } | HarnessError::Gen(_) => Failure::Validation(e.to_string()),
        other => usage(other),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    let inst: Instance = parse_instance(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    inst.validate()
        .map_err(|v| Failure::Validation(format!("{}: {}", path.display(), EwdgError::Invalid(v))))?;
    Ok(inst)
}

fn graph(inst: &Instance) -> Result<SearchGraph<'_, Rational>, Failure> {
    SearchGraph::new(inst).map_err(|e| Failure::Validation(e.to_string()))
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    let family = Family {
        topology: args.topology,
        nodes: args.nodes,
        layers: args.layers,
        density: args.density,
        cost_max: args.cost_max,
        rng_seed: args.rng_seed,
    };
    let inst: Instance = generate_instance(&family.with_seed(args.seed)).map_err(|e| Failure::Validation(e.to_string()))?;
    write(&args.output, &serialize_instance(&inst))
}

#[derive(Serialize)]
struct RunDoc {
    status: Status,
    path: Vec<String>,
    route: Option<String>,
    bound: Bound,
    expanded: u64,
    generated: u64,
    pruned: u64,
    counters: Vec<u64>,
    theta_max: u64,
}

impl RunDoc {
    fn of(inst: &Instance, r: &Report) -> Self {
        RunDoc {
            status: r.status,
            path: r.path.iter().map(|&e| inst.edges[e].label()).collect(),
            route: r.found().then(|| inst.path_label(&r.path)),
            bound: r.bound.clone(),
            expanded: r.expanded,
            generated: r.generated,
            pruned: r.pruned,
            counters: r.counters.clone(),
            theta_max: r.theta_max,
        }
    }
}

#[derive(Serialize)]
struct SolveDoc {
    instance: String,
    algorithm: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<Bound>,
    #[serde(flatten)]
    run: RunDoc,
}

#[derive(Serialize)]
struct TaspDoc {
    instance: String,
    algorithm: &'static str,
    status: Status,
    path: Vec<String>,
    route: Option<String>,
    b_star: Bound,
    l_star: Bound,
    u_star: Bound,
    u_prune: Bound,
    slb: RunDoc,
    sub: Option<RunDoc>,
}

fn to_json(doc: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("report serialization cannot fail");
    text.push('\n');
    text
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    if args.u_prune.is_some() && !matches!(args.alg, Alg::Beast) {
        return Err(usage("--u-prune only applies to --alg beast"));
    }
    if args.l_prune.is_some() && !matches!(args.alg, Alg::Beauty) {
        return Err(usage("--l-prune only applies to --alg beauty"));
    }
    let inst = load_instance(&args.input)?;
    let graph = graph(&inst)?;
    let opts = SearchOptions { trace: args.trace.is_some(), ..Default::default() };
    let single = |algorithm, threshold: Option<Bound>, report: Report| {
        let doc = SolveDoc { instance: inst.name.clone(), algorithm, threshold, run: RunDoc::of(&inst, &report) };
        (to_json(&doc), report.trace_text(), report.status)
    };
    let (json, trace, status) = match args.alg {
        Alg::EiUcs => single("ei-ucs", None, ei_ucs(&graph, &opts)),
        Alg::Beast => {
            let u = args.u_prune.unwrap_or(Extended::Infinite);
            single("beast", Some(u.clone()), beast(&graph, &u, &opts))
        }
        Alg::Beauty => {
            let l = args.l_prune.unwrap_or(Extended::Infinite);
            single("beauty", Some(l.clone()), beauty(&graph, &l, &opts))
        }
        Alg::Bnb => {
            let r = beauty_and_beast(&graph, &TaspOptions { search: opts, share_cache: false });
            let mut trace = r.slb_report.trace_text();
            if let Some(sub) = &r.sub_report {
                trace.push_str(&sub.trace_text());
            }
            let doc = TaspDoc {
                instance: inst.name.clone(),
                algorithm: "bnb",
                status: r.status,
                path: r.path.iter().map(|&e| inst.edges[e].label()).collect(),
                route: (r.status == Status::Found).then(|| inst.path_label(&r.path)),
                b_star: r.b_star.clone(),
                l_star: r.l_star.clone(),
                u_star: r.u_star.clone(),
                u_prune: r.u_prune.clone(),
                slb: RunDoc::of(&inst, &r.slb_report),
                sub: r.sub_report.as_ref().map(|s| RunDoc::of(&inst, s)),
            };
            (to_json(&doc), trace, r.status)
        }
    };
    if let Some(path) = &args.trace {
        write(path, &trace)?;
    }
    match &args.output {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    match status {
        Status::Found => Ok(()),
        Status::NoSolution => Err(Failure::NoSolution),
        Status::TimedOut => Err(usage("search timed out")),
    }
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.input)?;
    let graph = graph(&inst)?;
    let truth = oracle::solve(&inst, args.max_nodes).map_err(|e| match e {
        OracleError::TooLarge { .. } => usage(e),
        other => Failure::Validation(other.to_string()),
    })?;
    println!("L* = {}", truth.l_star);
    println!("U* = {}", truth.u_star);
    println!("B* = {}", truth.b_star);

    let opts = SearchOptions::default();
    let tasp = beauty_and_beast(&graph, &TaspOptions { search: opts.clone(), share_cache: false });
    let admissible = match (&tasp.status, truth.b_star.finite()) {
        (Status::Found, Some(b)) => {
            check_admissible(&inst, &tasp.path, b, args.max_nodes).map_err(|e| Failure::Validation(e.to_string()))?
        }
        (Status::NoSolution, _) => truth.u_star == Extended::Infinite,
        _ => true,
    };
    let checks = [
        ("ei-ucs", "U*", ei_ucs(&graph, &opts).bound, truth.u_star.clone()),
        ("beast", "U*", beast(&graph, &Extended::Infinite, &opts).bound, truth.u_star.clone()),
        ("beauty", "L*", beauty(&graph, &Extended::Infinite, &opts).bound, truth.l_star.clone()),
        ("bnb", "B*", tasp.b_star.clone(), truth.b_star.clone()),
    ];
    let mut ok = true;
    for (alg, what, got, want) in checks {
        let verdict = if got == want { "ok" } else { "MISMATCH" };
        ok &= got == want;
        println!("{alg:<7} {what} {got:<12} {verdict}");
    }
    println!("bnb     path admissible {}", if admissible { "ok" } else { "MISMATCH" });
    if ok && admissible {
        Ok(())
    } else {
        Err(Failure::Validation("algorithm results disagree with exhaustive enumeration".into()))
    }
}

#[derive(serde::Deserialize)]
struct SweepSpec {
    families: Vec<Family>,
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let model = CostModel::new(args.tau).map_err(usage)?;
    let jobs = match (&args.corpus, &args.sweep) {
        (Some(dir), _) => corpus_jobs(dir).map_err(harness_failure)?,
        (None, Some(spec)) => {
            let spec: SweepSpec = serde_json::from_str(&read(spec)?)
                .map_err(|e| Failure::Validation(format!("{}: {e}", spec.display())))?;
            let SeedRange(lo, hi) = args.seeds;
            sweep_jobs(&spec.families, lo..=hi).map_err(harness_failure)?
        }
        (None, None) => return Err(usage("one of --corpus or --sweep is required")),
    };
    let records = run_benchmark(&jobs, &model, Some(Duration::from_secs(args.timeout))).map_err(harness_failure)?;
    for rec in records.iter().filter(|r| r.timed_out) {
        eprintln!("timed out: {} seed {}", rec.instance, rec.seed.map_or("-".to_owned(), |s| s.to_string()));
    }
    write(&args.output, &write_results_csv(&records).map_err(harness_failure)?)
}

fn report(args: ReportArgs) -> Result<(), Failure> {
    let format: Format = args.format.parse().map_err(usage)?;
    let records = read_results_csv(&read(&args.input)?).map_err(harness_failure)?;
    print!("{}", render_report(&records, format).map_err(harness_failure)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) | Failure::Validation(msg) => eprintln!("error: {msg}"),
                Failure::NoSolution => eprintln!("no solution"),
            }
            ExitCode::from(failure.code())
        }
    }
}
