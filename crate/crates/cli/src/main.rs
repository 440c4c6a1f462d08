use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use rainbow_ramsey::colorings::{self, Coloring};
use rainbow_ramsey::extractors::{self, ExtractionOutcome};
use rainbow_ramsey::posets::{parse_spec, Poset};
use rainbow_ramsey::search::{self, AvoidanceProblem, RamseyScan, SearchOutcome};
use rainbow_ramsey::table::{self, Status, TableOptions};
use rainbow_ramsey::{bounds, embedding, lattice, sample, satgen, Error, Subset};

const EXIT_VIOLATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "brr", version, about = "Ramsey and rainbow Ramsey computations on Boolean lattices")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build a coloring from a named construction or sampler.
    Color(ColorArgs),
    /// Re-verify a coloring, an extraction outcome or a search record.
    Check(CheckArgs),
    /// Look for a strong copy of a pattern.
    Embed(EmbedArgs),
    /// Run a constructive extractor on a coloring.
    Extract(ExtractArgs),
    /// Exact search for Ramsey and rainbow Ramsey numbers.
    #[command(subcommand)]
    Search(SearchCommand),
    /// Lower and upper bounds on RR(P, Q).
    Bounds(BoundsArgs),
    /// Write a fixed-palette avoidance problem as DIMACS plus a variable map.
    SatExport(SatExportArgs),
    /// Turn a solver model back into a verified coloring.
    SatDecode(SatDecodeArgs),
    /// Reproduce the exact-value table cell by cell.
    Table(TableArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    LevelBlock,
    Rank,
    ScdBlock,
    CeilSize,
    NearConstant,
    Trace,
    Halves,
    Constant,
    AntichainClasses,
    ChainClasses,
    NoMonoChain,
    NoMonoAntichain,
    Uniform,
}

#[derive(Args)]
struct ColorArgs {
    #[arg(long, value_enum)]
    construction: Construction,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// Size of the traced set for `trace`.
    #[arg(long)]
    ysize: Option<u32>,
    /// Pattern for `halves`.
    #[arg(long = "P")]
    p: Option<String>,
    /// Palette size for `uniform`.
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability of opening a new class in the samplers.
    #[arg(long, default_value_t = 0.1)]
    fresh: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    coloring: Option<PathBuf>,
    /// Monochromatic targets.
    #[arg(long = "P")]
    p: Vec<String>,
    /// Rainbow targets.
    #[arg(long = "Q")]
    q: Vec<String>,
    /// Treat `--P` as a fixed palette: color `i` must avoid the `i`-th pattern.
    #[arg(long)]
    palette: bool,
    /// Extraction outcome to re-verify against `--coloring`.
    #[arg(long)]
    outcome: Option<PathBuf>,
    /// Search record to re-run.
    #[arg(long)]
    record: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmbedMode {
    Plain,
    Mono,
    Rainbow,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long = "P")]
    p: String,
    /// JSON list of subset masks.
    #[arg(long, conflicts_with = "coloring")]
    family: Option<PathBuf>,
    /// Search the whole lattice of `--n` instead of a family.
    #[arg(long, conflicts_with_all = ["family", "coloring"])]
    n: Option<u32>,
    #[arg(long)]
    coloring: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = EmbedMode::Plain)]
    mode: EmbedMode,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Extractor {
    Boolean,
    ChainA2,
    ChainAm,
    Antichain,
    BooleanBm,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(value_enum)]
    extractor: Extractor,
    #[arg(long)]
    coloring: PathBuf,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    /// Thresholds for `boolean-bm`, comma separated.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<u64>>,
}

#[derive(Subcommand)]
enum SearchCommand {
    /// R(P_1, …, P_k): color i avoids the i-th `--P`.
    Ramsey(SearchArgs),
    /// RR(𝒫, 𝒬): no monochromatic `--P` and no rainbow `--Q`.
    Rainbow(SearchArgs),
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long = "P", required = true)]
    p: Vec<String>,
    #[arg(long = "Q")]
    q: Vec<String>,
    /// Decide a single ground size.
    #[arg(long, conflicts_with_all = ["n_lo", "n_hi"])]
    n: Option<u32>,
    #[arg(long, default_value_t = 0)]
    n_lo: u32,
    #[arg(long, default_value_t = 5)]
    n_hi: u32,
    #[arg(long, default_value_t = search::DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for the witness coloring and the per-n search records.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long = "P")]
    p: String,
    #[arg(long = "Q")]
    q: String,
}

#[derive(Args)]
struct SatExportArgs {
    #[arg(long = "P", required = true)]
    p: Vec<String>,
    #[arg(long)]
    n: u32,
    /// Writes `<out>.cnf` and `<out>.map.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SatDecodeArgs {
    /// Variable map written by `sat-export`.
    #[arg(long)]
    map: PathBuf,
    /// Solver output (`v` lines or bare literals).
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 3)]
    max_param: u32,
    #[arg(long, default_value_t = 4)]
    max_search_n: u32,
    #[arg(long, default_value_t = search::DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for per-cell witness colorings and search records.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A decision together with the problem it answers, so it can be re-run.
#[derive(Serialize, Deserialize)]
struct SearchRecord {
    problem: AvoidanceProblem,
    outcome: SearchOutcome,
}

struct Report {
    json: Value,
    text: String,
    exit: u8,
}

impl Report {
    fn new(json: Value, text: impl Into<String>, exit: u8) -> Report {
        Report { json, text: text.into(), exit }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(report) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).unwrap()),
                Format::Text => println!("{}", report.text),
            }
            ExitCode::from(report.exit)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::Verification(_)) => EXIT_VIOLATION,
                _ => EXIT_INPUT,
            };
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> anyhow::Result<Report> {
    match command {
        Command::Color(a) => color(a),
        Command::Check(a) => check(a),
        Command::Embed(a) => embed(a),
        Command::Extract(a) => extract(a),
        Command::Search(SearchCommand::Ramsey(a)) => search_cmd(a, false),
        Command::Search(SearchCommand::Rainbow(a)) => search_cmd(a, true),
        Command::Bounds(a) => bounds_cmd(a),
        Command::SatExport(a) => sat_export(a),
        Command::SatDecode(a) => sat_decode(a),
        Command::Table(a) => table_cmd(a),
    }
}

fn posets(specs: &[String]) -> anyhow::Result<Vec<Poset>> {
    specs.iter().map(|s| Ok(parse_spec(s)?)).collect()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn need<T>(value: Option<T>, flag: &str) -> anyhow::Result<T> {
    value.ok_or_else(|| anyhow::anyhow!("--{flag} is required here"))
}

fn color(a: ColorArgs) -> anyhow::Result<Report> {
    let mut rng = sample::rng(a.seed);
    let n = || need(a.n, "n");
    let m = || need(a.m, "m");
    let c = match a.construction {
        Construction::LevelBlock => colorings::level_block(n()?, m()?)?,
        Construction::Rank => colorings::rank(n()?)?,
        Construction::ScdBlock => colorings::scd_block(n()?, m()?)?,
        Construction::CeilSize => colorings::ceil_size(n()?, m()?)?,
        Construction::NearConstant => colorings::near_constant(n()?)?,
        Construction::Trace => colorings::trace(n()?, need(a.ysize, "ysize")?)?,
        Construction::Halves => colorings::halves(&parse_spec(&need(a.p.clone(), "P")?)?)?,
        Construction::Constant => Coloring::constant(n()?)?,
        Construction::AntichainClasses => sample::antichain_classes(n()?, &mut rng, a.fresh)?,
        Construction::ChainClasses => sample::chain_classes(n()?, &mut rng, a.fresh)?,
        Construction::NoMonoChain => sample::no_mono_chain(n()?, m()? as usize, &mut rng, a.fresh)?,
        Construction::NoMonoAntichain => sample::no_mono_antichain(n()?, m()? as usize, &mut rng, a.fresh)?,
        Construction::Uniform => sample::uniform(n()?, a.k, &mut rng)?,
    };
    if let Some(out) = &a.out {
        write_json(out, &c)?;
    }
    let text = format!("coloring of B_{} with {} colors", c.n(), c.palette_used());
    Ok(Report::new(serde_json::to_value(&c)?, text, 0))
}

fn check(a: CheckArgs) -> anyhow::Result<Report> {
    if let Some(path) = &a.record {
        return check_record(&read_json(path)?, a.jobs.unwrap_or(1));
    }
    let c: Coloring = read_json(&need(a.coloring.clone(), "coloring")?)?;
    if let Some(path) = &a.outcome {
        let outcome: ExtractionOutcome = read_json(path)?;
        return Ok(match outcome.verify(&c) {
            Ok(()) => Report::new(json!({ "verified": true }), "outcome verified", 0),
            Err(e) => Report::new(json!({ "verified": false, "reason": e.to_string() }), e.to_string(), EXIT_VIOLATION),
        });
    }
    let ps = posets(&a.p)?;
    let qs = posets(&a.q)?;
    let report = if a.palette {
        if !qs.is_empty() {
            bail!("--palette takes no rainbow targets");
        }
        colorings::verify_palette(&c, &ps)?
    } else {
        colorings::verify(&c, &ps, &qs)
    };
    let (text, exit) = if report.avoided {
        ("avoided".to_string(), 0)
    } else if let Some((i, e)) = &report.mono_witness {
        (format!("monochromatic {} at {:?}", ps[*i], e.images), EXIT_VIOLATION)
    } else {
        let (i, e) = report.rainbow_witness.as_ref().unwrap();
        (format!("rainbow {} at {:?}", qs[*i], e.images), EXIT_VIOLATION)
    };
    Ok(Report::new(serde_json::to_value(&report)?, text, exit))
}

fn check_record(record: &SearchRecord, jobs: usize) -> anyhow::Result<Report> {
    if let SearchOutcome::Avoidable { witness, .. } = &record.outcome {
        let avoided = match &record.problem.mode {
            search::Mode::FixedPalette { patterns } => colorings::verify_palette(witness, patterns)?.avoided,
            search::Mode::Rainbow { ps, qs } => colorings::verify(witness, ps, qs).avoided,
        };
        if !avoided || witness.n() != record.problem.n {
            return Ok(Report::new(json!({ "verified": false }), "witness does not avoid the targets", EXIT_VIOLATION));
        }
    }
    let rerun = search::decide_with_jobs(&record.problem, jobs)?;
    let same = rerun.same_verdict(&record.outcome);
    let out = json!({ "verified": same, "recorded_nodes": record.outcome.nodes(), "rerun": rerun });
    Ok(if same {
        Report::new(out, "record reproduced", 0)
    } else {
        Report::new(out, "record differs from a fresh run", EXIT_VIOLATION)
    })
}

fn embed(a: EmbedArgs) -> anyhow::Result<Report> {
    let p = parse_spec(&a.p)?;
    let found = match (&a.coloring, a.mode) {
        (Some(path), mode) => {
            let c: Coloring = read_json(path)?;
            match mode {
                EmbedMode::Mono => embedding::find_monochromatic(&c, &p),
                EmbedMode::Rainbow => embedding::find_rainbow(&c, &p),
                EmbedMode::Plain => embedding::find_copy(lattice::Lattice::new(c.n())?.subsets(), &p)?,
            }
        }
        (None, EmbedMode::Plain) => {
            let family: Vec<Subset> = match (&a.family, a.n) {
                (Some(path), _) => read_json(path)?,
                (None, Some(n)) => lattice::Lattice::new(n)?.subsets().to_vec(),
                (None, None) => bail!("one of --family, --n or --coloring is required"),
            };
            embedding::find_copy(&family, &p)?
        }
        (None, _) => bail!("--mode mono and --mode rainbow need --coloring"),
    };
    let text = match &found {
        Some(e) => format!("{p} at {:?}", e.images),
        None => format!("no copy of {p}"),
    };
    Ok(Report::new(json!({ "found": found.is_some(), "embedding": found }), text, 0))
}

fn extract(a: ExtractArgs) -> anyhow::Result<Report> {
    let c: Coloring = read_json(&a.coloring)?;
    let outcome = match a.extractor {
        Extractor::Boolean => extractors::rainbow_boolean(&c, need(a.n, "n")?, a.m.unwrap_or(2))?,
        Extractor::ChainA2 => extractors::rainbow_chain_a2(&c)?,
        Extractor::ChainAm => extractors::rainbow_chain_am(&c, need(a.m, "m")?)?,
        Extractor::Antichain => extractors::rainbow_antichain(&c, need(a.m, "m")?, need(a.n, "n")?)?,
        Extractor::BooleanBm => {
            extractors::rainbow_boolean_bm(&c, need(a.m, "m")?, need(a.n, "n")?, a.r.as_deref())?
        }
    };
    let (text, exit) = match &outcome {
        ExtractionOutcome::Rainbow { witness, .. } => (format!("rainbow {} at {:?}", witness.pattern, witness.images), 0),
        ExtractionOutcome::Monochromatic { witness } => {
            (format!("monochromatic {} at {:?}", witness.pattern, witness.images), 0)
        }
        ExtractionOutcome::PreconditionUnmet { description } => (description.clone(), EXIT_VIOLATION),
    };
    Ok(Report::new(serde_json::to_value(&outcome)?, text, exit))
}

fn search_cmd(a: SearchArgs, rainbow: bool) -> anyhow::Result<Report> {
    let ps = posets(&a.p)?;
    let qs = posets(&a.q)?;
    if !rainbow && !qs.is_empty() {
        bail!("--Q only applies to `search rainbow`");
    }
    let problem = |n: u32| -> anyhow::Result<AvoidanceProblem> {
        let p = if rainbow {
            AvoidanceProblem::rainbow(n, ps.clone(), qs.clone())?
        } else {
            AvoidanceProblem::fixed_palette(n, ps.clone())?
        };
        Ok(p.with_budget(a.budget))
    };
    if let Some(n) = a.n {
        let problem = problem(n)?;
        let outcome = search::decide_with_jobs(&problem, a.jobs)?;
        let record = SearchRecord { problem, outcome };
        if let Some(dir) = &a.out {
            fs::create_dir_all(dir)?;
            write_json(&dir.join(format!("record-n{n}.json")), &record)?;
            if let SearchOutcome::Avoidable { witness, .. } = &record.outcome {
                write_json(&dir.join("witness.json"), witness)?;
            }
        }
        let (text, exit) = match &record.outcome {
            SearchOutcome::Avoidable { nodes, .. } => (format!("n = {n}: avoidable ({nodes} nodes)"), 0),
            SearchOutcome::Unavoidable { nodes, .. } => (format!("n = {n}: unavoidable ({nodes} nodes)"), 0),
            SearchOutcome::BudgetExceeded { nodes, .. } => {
                (format!("n = {n}: budget exceeded after {nodes} nodes"), EXIT_BUDGET)
            }
        };
        return Ok(Report::new(serde_json::to_value(&record)?, text, exit));
    }
    let scan = if rainbow {
        search::rainbow_ramsey(&ps, &qs, a.n_lo, a.n_hi, a.budget, a.jobs)?
    } else {
        search::ramsey(&ps, a.n_lo, a.n_hi, a.budget, a.jobs)?
    };
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        for step in &scan.steps {
            let record = SearchRecord { problem: problem(step.n)?, outcome: step.outcome.clone() };
            write_json(&dir.join(format!("record-n{}.json", step.n)), &record)?;
        }
        if let Some(w) = &scan.witness {
            write_json(&dir.join("witness.json"), w)?;
        }
    }
    let (text, exit) = scan_summary(&scan, a.n_lo);
    Ok(Report::new(serde_json::to_value(&scan)?, text, exit))
}

fn scan_summary(scan: &RamseyScan, n_lo: u32) -> (String, u8) {
    let truncated = scan.steps.iter().any(|s| matches!(s.outcome, SearchOutcome::BudgetExceeded { .. }));
    match (scan.value(), scan.upper) {
        (Some(v), _) => (format!("value {v}"), 0),
        (None, Some(u)) => (format!("value in [{}, {u}]", scan.lower.max(n_lo)), EXIT_BUDGET),
        (None, None) if truncated => (format!("value at least {}", scan.lower.max(n_lo)), EXIT_BUDGET),
        (None, None) => (format!("value above the scanned range, at least {}", scan.lower), 0),
    }
}

fn bounds_cmd(a: BoundsArgs) -> anyhow::Result<Report> {
    let report = bounds::report(&parse_spec(&a.p)?, &parse_spec(&a.q)?);
    let upper = report.best_upper.as_ref().map_or("unknown".to_string(), |u| u.to_string());
    let mut text = format!("{} <= RR({}, {}) <= {upper}", report.best_lower, report.p, report.q);
    if let Some(v) = report.exact {
        text.push_str(&format!(" (exact {v})"));
    }
    Ok(Report::new(serde_json::to_value(&report)?, text, 0))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn sat_export(a: SatExportArgs) -> anyhow::Result<Report> {
    let instance = satgen::encode(a.n, &posets(&a.p)?)?;
    let cnf = with_suffix(&a.out, ".cnf");
    let map = with_suffix(&a.out, ".map.json");
    fs::write(&cnf, instance.to_dimacs()).with_context(|| format!("writing {}", cnf.display()))?;
    write_json(&map, &instance.sidecar())?;
    let out = json!({
        "cnf": cnf,
        "map": map,
        "variables": instance.num_vars,
        "clauses": instance.clauses.len(),
    });
    let text = format!("{} variables, {} clauses", instance.num_vars, instance.clauses.len());
    Ok(Report::new(out, text, 0))
}

fn sat_decode(a: SatDecodeArgs) -> anyhow::Result<Report> {
    let sidecar: satgen::Sidecar = read_json(&a.map)?;
    let instance = satgen::CnfInstance::from_sidecar(&sidecar)?;
    let text = fs::read_to_string(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    if text.lines().any(|l| l.trim() == "s UNSATISFIABLE") {
        return Ok(Report::new(json!({ "satisfiable": false }), "unsatisfiable", 0));
    }
    let coloring = satgen::decode(&satgen::parse_model(&text)?, &instance)?;
    if let Some(out) = &a.out {
        write_json(out, &coloring)?;
    }
    let summary = format!("coloring of B_{} with {} colors", coloring.n(), coloring.palette_used());
    Ok(Report::new(serde_json::to_value(&coloring)?, summary, 0))
}

fn table_cmd(a: TableArgs) -> anyhow::Result<Report> {
    let opts = TableOptions { max_param: a.max_param, max_search_n: a.max_search_n, budget: a.budget, jobs: a.jobs };
    let cells = table::cmd_table(&opts)?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        for cell in &cells {
            let stem = format!("{}-{}", cell.p, cell.q);
            if let Some(w) = &cell.lower_witness {
                write_json(&dir.join(format!("{stem}.witness.json")), w)?;
            }
            if let Some(outcome) = &cell.upper_search {
                let problem = AvoidanceProblem::rainbow(
                    cell.claimed as u32,
                    vec![parse_spec(&cell.p)?],
                    vec![parse_spec(&cell.q)?],
                )?
                .with_budget(a.budget);
                write_json(&dir.join(format!("{stem}.record.json")), &SearchRecord { problem, outcome: outcome.clone() })?;
            }
        }
    }
    let text = cells
        .iter()
        .map(|c| {
            let status = match c.status {
                Status::Confirmed => "confirmed",
                Status::LowerConfirmed => "lower-confirmed",
                Status::SkippedWithReason => "skipped",
            };
            let reason = c.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default();
            format!("RR({}, {}) = {}: {status}{reason}", c.p, c.q, c.claimed)
        })
        .collect::<Vec<_>>()
        .join("\n");
    let exit = if cells.iter().any(|c| c.status == Status::SkippedWithReason) {
        EXIT_VIOLATION
    } else {
        0
    };
    Ok(Report::new(serde_json::to_value(&cells)?, text, exit))
}
