//! Command-line front end: grid and cover emission, colouring construction,
//! verification, the exhaustive oracle, bad-assignment search, threshold
//! reports, and a CSV sweep over a (dims, k) matrix.
//!
//! Exit codes: 0 success or valid; 1 invalid certificate, a definitive No,
//! or a discrepancy; 2 usage error or malformed input file; 3 no guarantee
//! at the requested parameters or a search budget exceeded.

use std::fs::File;
use std::io::Write as IoWrite;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use equigrid::certificate::Certificate;
use equigrid::colouring::{
    verify_colouring, Colouring, ListAssignment, Mode, SizeRule,
};
use equigrid::covering::{self, CoverMode, CoverSubgraph};
use equigrid::engines::{self, ArborOutcome, Provenance};
use equigrid::error::{Error, Result};
use equigrid::io::{read_graph, read_json, write_json};
use equigrid::oracle::{
    cross_check_logged, exists_colouring, search_bad_assignment_logged, AssignmentRecord,
    OracleVerdict, SearchBudget, SearchOutcome,
};
use equigrid::{Graph, GridSpec};

#[derive(Parser)]
#[command(
    name = "equigrid",
    version,
    about = "Equitable list colourings with acyclic or independent classes on grid graphs",
    after_help = "Exit codes: 0 success/valid; 1 invalid certificate or definitive No; \
                  2 usage error or malformed file; 3 no guarantee or budget exceeded."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a grid graph as JSON.
    Grid(GridArgs),
    /// Choose a cycle-covering subgraph for a grid and emit it with its certificate.
    Cover(CoverArgs),
    /// Construct an equitable colouring and emit it with its certificate.
    Colour(ColourArgs),
    /// Check a colouring or cover file against its graph.
    Verify(VerifyArgs),
    /// Decide one list assignment by exhaustive search.
    Oracle(OracleArgs),
    /// Hunt for uncolourable assignments, or cross-check the dispatcher against the oracle.
    Search(SearchArgs),
    /// Report the colour counts from which colourings are guaranteed.
    Thresholds(ThresholdsArgs),
    /// Run a matrix of random trials and summarise it as CSV.
    Sweep(SweepArgs),
}

/// Comma-separated grid dimensions, for example `5,3,2`.
#[derive(Clone, Debug)]
struct Dims(Vec<usize>);

impl std::str::FromStr for Dims {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("'{t}' is not a non-negative integer"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Dims)
    }
}

/// Comma-separated colours, for example `1,2,3`.
#[derive(Clone, Debug)]
struct Pool(Vec<u32>);

impl std::str::FromStr for Pool {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| format!("'{t}' is not a colour")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Pool)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Proper,
    Arbor,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Proper => Mode::Proper,
            ModeArg::Arbor => Mode::Arbor,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Grid dimensions, comma separated.
    #[arg(long)]
    dims: Dims,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long)]
    dims: Dims,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct ColourArgs {
    /// Grid dimensions; routes through the grid dispatcher.
    #[arg(long, conflicts_with = "graph")]
    dims: Option<Dims>,
    /// Graph file (JSON or DIMACS); routes through the greedy colourer.
    #[arg(long)]
    graph: Option<String>,
    #[arg(short, long)]
    k: usize,
    /// List assignment file.
    #[arg(long, conflicts_with = "random_lists")]
    lists: Option<String>,
    /// Draw random k-uniform lists from the pool 1..=2k.
    #[arg(long)]
    random_lists: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Arbor)]
    mode: ModeArg,
    /// Fall back to a randomized repair search when no route applies.
    #[arg(long)]
    heuristic: bool,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    colouring: Option<String>,
    #[arg(long)]
    lists: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Arbor)]
    mode: ModeArg,
    #[arg(short, long)]
    k: Option<usize>,
    /// Require class sizes in {floor(n/k), ceil(n/k)} instead of only the ceiling cap.
    #[arg(long)]
    balanced: bool,
    /// Verify a cover file instead of a colouring.
    #[arg(long, conflicts_with_all = ["colouring", "lists"])]
    cover: Option<String>,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    lists: String,
    /// Defaults to the list size.
    #[arg(short, long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Arbor)]
    mode: ModeArg,
    /// Cap every class at ceil(n/k).
    #[arg(long)]
    equitable: bool,
    #[arg(long, default_value_t = 2_000_000)]
    node_cap: usize,
    /// Wall-clock budget in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    time_cap: u64,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, conflicts_with = "graph")]
    dims: Option<Dims>,
    #[arg(long)]
    graph: Option<String>,
    #[arg(short, long)]
    k: usize,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    equitable: bool,
    /// Colours the searched assignments draw from; defaults to 1..=2k.
    #[arg(long)]
    pool: Option<Pool>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial count for --cross-check.
    #[arg(long)]
    trials: Option<usize>,
    /// Compare the dispatcher with the oracle on random assignments.
    #[arg(long)]
    cross_check: bool,
    #[arg(long, default_value_t = 2_000_000)]
    node_cap: usize,
    #[arg(long, default_value_t = 10_000)]
    time_cap: u64,
    /// Append one JSON line per examined assignment to this file.
    #[arg(long)]
    log: Option<String>,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct ThresholdsArgs {
    #[arg(long)]
    dims: Dims,
    /// Also write the report as JSON, `-` for stdout instead of the text form.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep matrix as JSON; a built-in matrix is used when omitted.
    #[arg(long)]
    config: Option<String>,
    #[arg(long, default_value = "-")]
    out: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("equigrid: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

fn classify(e: &Error) -> u8 {
    match e {
        Error::Discrepancy(_) | Error::VerificationFailed(_) | Error::ConstructionFailed(_) => 1,
        _ => 2,
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Grid(args) => cmd_grid(args),
        Command::Cover(args) => cmd_cover(args),
        Command::Colour(args) => cmd_colour(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Search(args) => cmd_search(args),
        Command::Thresholds(args) => cmd_thresholds(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn cmd_grid(args: GridArgs) -> Result<u8> {
    let spec = GridSpec::new(args.dims.0)?;
    let g = spec.build();
    let payload = json!({
        "dims": spec.dims(),
        "n": g.n(),
        "edges": g.edges(),
    });
    write_json(&args.out, &payload)?;
    Ok(0)
}

fn choose_cover(spec: &GridSpec) -> Result<CoverSubgraph> {
    type Builder = fn(&GridSpec) -> Result<CoverSubgraph>;
    let builders: &[Builder] = match spec.normalized().dim() {
        0 | 1 => {
            return Err(Error::PreconditionViolated(format!(
                "dims {:?} form a forest; there are no cycles to cover",
                spec.dims()
            )))
        }
        2 => &[covering::cover_grid2d],
        3 => &[covering::cover_p2_3d, covering::cover_3x3xn, covering::cover_3d_generic],
        4 => &[covering::cover_cube_chain, covering::cover_2x2xnxn, covering::cover_4d],
        _ => &[covering::cover_generic],
    };
    let mut last = None;
    for build in builders {
        match build(spec) {
            Ok(cover) => return Ok(cover),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one builder was tried"))
}

fn cmd_cover(args: CoverArgs) -> Result<u8> {
    let spec = GridSpec::new(args.dims.0)?;
    let g = spec.build();
    let cover = choose_cover(&spec)?;
    let certificate = covering::verify_cover(&g, &cover, CoverMode::Exact);
    if !certificate.valid {
        return Err(Error::VerificationFailed(format!(
            "constructed cover rejected: {:?}",
            certificate.violation
        )));
    }
    let payload = json!({
        "dims": spec.dims(),
        "cover": cover,
        "certificate": certificate,
    });
    write_json(&args.out, &payload)?;
    Ok(0)
}

/// Reads a typed value from `path`, accepting either the bare value or one of
/// the envelopes this tool emits, with the value nested under `nests`.
fn read_embedded<T: serde::de::DeserializeOwned>(path: &str, nests: &[&[&str]]) -> Result<T> {
    let direct = read_json::<T>(path);
    let Err(direct_err) = direct else { return direct };
    let Ok(value) = read_json::<serde_json::Value>(path) else { return Err(direct_err) };
    for nest in nests {
        let mut cursor = Some(&value);
        for key in *nest {
            cursor = cursor.and_then(|c| c.get(key));
        }
        if let Some(subtree) = cursor {
            if let Ok(parsed) = serde_json::from_value(subtree.clone()) {
                return Ok(parsed);
            }
        }
    }
    Err(direct_err)
}

fn read_lists(path: &str) -> Result<ListAssignment> {
    read_embedded(path, &[&["lists"]])
}

fn read_colouring(path: &str) -> Result<Colouring> {
    read_embedded(path, &[&["colouring"], &["outcome", "colouring"], &["verdict", "witness"]])
}

fn load_lists(
    lists: &Option<String>,
    random: bool,
    n: usize,
    k: usize,
    seed: u64,
) -> Result<ListAssignment> {
    match (lists, random) {
        (Some(path), _) => {
            let l: ListAssignment = read_lists(path)?;
            if l.n() != n {
                return Err(Error::PreconditionViolated(format!(
                    "{path}: {} lists for {n} vertices",
                    l.n()
                )));
            }
            if l.k() != k {
                return Err(Error::PreconditionViolated(format!(
                    "{path}: lists of size {} do not match k = {k}",
                    l.k()
                )));
            }
            Ok(l)
        }
        (None, true) => {
            let pool: Vec<u32> = (1..=(2 * k) as u32).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(ListAssignment::random_uniform(n, k, &pool, &mut rng))
        }
        (None, false) => {
            Err(Error::PreconditionViolated("provide --lists FILE or --random-lists".into()))
        }
    }
}

fn cmd_colour(args: ColourArgs) -> Result<u8> {
    match (&args.dims, &args.graph) {
        (Some(dims), None) => colour_grid(&args, dims.0.clone()),
        (None, Some(path)) => colour_graph(&args, path),
        _ => Err(Error::PreconditionViolated(
            "provide exactly one of --dims or --graph".into(),
        )),
    }
}

fn colour_grid(args: &ColourArgs, dims: Vec<usize>) -> Result<u8> {
    let spec = GridSpec::new(dims)?;
    let g = spec.build();
    let config = json!({
        "dims": spec.dims(),
        "k": args.k,
        "mode": format!("{}", Mode::from(args.mode)),
        "seed": args.seed,
        "random_lists": args.random_lists,
        "heuristic": args.heuristic,
    });
    match args.mode {
        ModeArg::Proper => {
            if args.lists.is_some() || args.random_lists {
                return Err(Error::PreconditionViolated(
                    "proper grid colouring takes no lists; drop --lists/--random-lists".into(),
                ));
            }
            let colouring = engines::equitable_proper_grid(&spec, args.k)?;
            let certificate =
                verify_colouring(&g, None, &colouring, Mode::Proper, args.k, SizeRule::Balanced);
            if !certificate.valid {
                return Err(Error::VerificationFailed(format!(
                    "constructed colouring rejected: {:?}",
                    certificate.violation
                )));
            }
            let payload =
                json!({ "config": config, "colouring": colouring, "certificate": certificate });
            write_json(&args.out, &payload)?;
            Ok(0)
        }
        ModeArg::Arbor => {
            let lists =
                load_lists(&args.lists, args.random_lists, spec.vertex_count(), args.k, args.seed)?;
            let outcome = engines::equitable_list_arbor(&spec, args.k, &lists, args.heuristic)?;
            match outcome.colouring() {
                Some(colouring) => {
                    let certificate = verify_colouring(
                        &g,
                        Some(&lists),
                        colouring,
                        Mode::Arbor,
                        args.k,
                        SizeRule::AtMostCeil,
                    );
                    if !certificate.valid {
                        return Err(Error::VerificationFailed(format!(
                            "constructed colouring rejected: {:?}",
                            certificate.violation
                        )));
                    }
                    let payload = json!({
                        "config": config,
                        "lists": lists,
                        "outcome": outcome,
                        "certificate": certificate,
                    });
                    write_json(&args.out, &payload)?;
                    Ok(0)
                }
                None => {
                    let payload = json!({ "config": config, "lists": lists, "outcome": outcome });
                    write_json(&args.out, &payload)?;
                    eprintln!(
                        "equigrid: no colouring constructed for dims {:?} at k = {}",
                        spec.dims(),
                        args.k
                    );
                    Ok(3)
                }
            }
        }
    }
}

fn colour_graph(args: &ColourArgs, path: &str) -> Result<u8> {
    if args.mode == ModeArg::Proper {
        return Err(Error::PreconditionViolated(
            "proper mode colours grids; give --dims instead of --graph".into(),
        ));
    }
    let g = read_graph(path)?;
    let lists = load_lists(&args.lists, args.random_lists, g.n(), args.k, args.seed)?;
    let colouring = engines::greedy_list_arbor(&g, &lists)?;
    let certificate = check_arbor_unbounded(&g, &lists, &colouring)?;
    let config = json!({
        "graph": path,
        "k": args.k,
        "mode": "arbor",
        "seed": args.seed,
        "random_lists": args.random_lists,
    });
    let payload = json!({
        "config": config,
        "lists": lists,
        "colouring": colouring,
        "certificate": certificate,
    });
    write_json(&args.out, &payload)?;
    Ok(0)
}

/// List membership and per-class acyclicity, with no size rule: the greedy
/// route makes no promise about class sizes.
fn check_arbor_unbounded(
    g: &Graph,
    lists: &ListAssignment,
    colouring: &Colouring,
) -> Result<Certificate> {
    let mut classes: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for (v, &c) in colouring.colours.iter().enumerate() {
        if !lists.contains(v, c) {
            return Err(Error::VerificationFailed(format!(
                "vertex {v} was given colour {c}, which is outside its list"
            )));
        }
        classes.entry(c).or_default().push(v);
    }
    for (c, class) in &classes {
        if !g.is_acyclic(class) {
            return Err(Error::VerificationFailed(format!(
                "colour class {c} contains a cycle"
            )));
        }
    }
    Ok(Certificate::pass("arbor colouring from lists, greedy route")
        .with_caveat("class sizes are unconstrained on general graphs"))
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    if let Some(cover_path) = &args.cover {
        let cover: CoverSubgraph = read_embedded(cover_path, &[&["cover"]])?;
        let g = match &args.graph {
            Some(p) => read_graph(p)?,
            None => cover.host.build(),
        };
        let certificate = covering::verify_cover(&g, &cover, CoverMode::Exact);
        write_json(&args.out, &json!({ "certificate": certificate }))?;
        return finish_verdict(&certificate);
    }
    let graph_path = args
        .graph
        .as_ref()
        .ok_or_else(|| Error::PreconditionViolated("--graph is required".into()))?;
    let colouring_path = args
        .colouring
        .as_ref()
        .ok_or_else(|| Error::PreconditionViolated("provide --colouring or --cover".into()))?;
    let g = read_graph(graph_path)?;
    let colouring = read_colouring(colouring_path)?;
    let lists: Option<ListAssignment> = match &args.lists {
        Some(p) => Some(read_lists(p)?),
        None => None,
    };
    let k = args
        .k
        .or_else(|| lists.as_ref().map(|l| l.k()))
        .ok_or_else(|| Error::PreconditionViolated("-k is required when no lists are given".into()))?;
    let rule = if args.balanced { SizeRule::Balanced } else { SizeRule::AtMostCeil };
    let certificate = verify_colouring(&g, lists.as_ref(), &colouring, args.mode.into(), k, rule);
    let config = json!({
        "graph": graph_path,
        "colouring": colouring_path,
        "lists": args.lists,
        "mode": format!("{}", Mode::from(args.mode)),
        "k": k,
        "balanced": args.balanced,
    });
    write_json(&args.out, &json!({ "config": config, "certificate": certificate }))?;
    finish_verdict(&certificate)
}

fn finish_verdict(certificate: &Certificate) -> Result<u8> {
    if certificate.valid {
        Ok(0)
    } else {
        eprintln!("equigrid: invalid: {:?}", certificate.violation);
        Ok(1)
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<u8> {
    let g = read_graph(&args.graph)?;
    let lists = read_lists(&args.lists)?;
    let k = args.k.unwrap_or_else(|| lists.k());
    let budget = SearchBudget {
        node_cap: args.node_cap,
        time_cap: args.time_cap,
        rng_seed: 0,
        colour_pool: None,
    };
    let verdict = exists_colouring(&g, &lists, k, args.mode.into(), args.equitable, &budget)?;
    let config = json!({
        "graph": args.graph,
        "lists": args.lists,
        "k": k,
        "mode": format!("{}", Mode::from(args.mode)),
        "equitable": args.equitable,
        "node_cap": args.node_cap,
        "time_cap": args.time_cap,
    });
    write_json(&args.out, &json!({ "config": config, "verdict": verdict }))?;
    match verdict {
        OracleVerdict::Yes { .. } => Ok(0),
        OracleVerdict::No => {
            eprintln!("equigrid: no colouring exists for this assignment");
            Ok(1)
        }
        OracleVerdict::BudgetExceeded => {
            eprintln!("equigrid: search budget exceeded before a verdict");
            Ok(3)
        }
    }
}

fn record_sink(path: &Option<String>) -> Result<Box<dyn FnMut(&AssignmentRecord) -> Result<()>>> {
    match path {
        None => Ok(Box::new(|_| Ok(()))),
        Some(p) if p == "-" => Ok(Box::new(|record| {
            let line = serde_json::to_string(record).map_err(|e| Error::Io(e.to_string()))?;
            println!("{line}");
            Ok(())
        })),
        Some(p) => {
            let mut file =
                File::create(p).map_err(|e| Error::Io(format!("{p}: {e}")))?;
            let label = p.clone();
            Ok(Box::new(move |record| {
                let line =
                    serde_json::to_string(record).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(file, "{line}").map_err(|e| Error::Io(format!("{label}: {e}")))
            }))
        }
    }
}

fn cmd_search(args: SearchArgs) -> Result<u8> {
    let mut sink = record_sink(&args.log)?;
    if args.cross_check {
        let dims = args
            .dims
            .as_ref()
            .ok_or_else(|| Error::PreconditionViolated("--cross-check needs --dims".into()))?;
        if args.pool.is_some() {
            return Err(Error::PreconditionViolated(
                "cross-check draws from the default pool 1..=2k; drop --pool".into(),
            ));
        }
        if args.mode == Some(ModeArg::Proper) {
            return Err(Error::PreconditionViolated(
                "cross-check runs in equitable arbor mode; drop --mode".into(),
            ));
        }
        let spec = GridSpec::new(dims.0.clone())?;
        let trials = args.trials.unwrap_or(100);
        let report = cross_check_logged(&spec, args.k, trials, args.seed, &mut sink)?;
        let config = json!({
            "dims": spec.dims(),
            "k": args.k,
            "trials": trials,
            "seed": args.seed,
        });
        write_json(&args.out, &json!({ "config": config, "report": report }))?;
        return Ok(0);
    }
    if args.trials.is_some() {
        return Err(Error::PreconditionViolated(
            "--trials applies to --cross-check; plain searches are bounded by --node-cap".into(),
        ));
    }
    let (g, source) = match (&args.dims, &args.graph) {
        (Some(dims), None) => {
            (GridSpec::new(dims.0.clone())?.build(), json!(dims.0.clone()))
        }
        (None, Some(path)) => (read_graph(path)?, json!(path)),
        _ => {
            return Err(Error::PreconditionViolated(
                "provide exactly one of --dims or --graph".into(),
            ))
        }
    };
    let mode = Mode::from(args.mode.unwrap_or(ModeArg::Arbor));
    let budget = SearchBudget {
        node_cap: args.node_cap,
        time_cap: args.time_cap,
        rng_seed: args.seed,
        colour_pool: args.pool.as_ref().map(|p| p.0.clone()),
    };
    let pool_echo: Vec<u32> = match &args.pool {
        Some(p) => {
            let mut pool = p.0.clone();
            pool.sort_unstable();
            pool.dedup();
            pool
        }
        None => (1..=(2 * args.k) as u32).collect(),
    };
    let outcome =
        search_bad_assignment_logged(&g, args.k, mode, args.equitable, &budget, &mut sink)?;
    let config = json!({
        "source": source,
        "k": args.k,
        "mode": format!("{mode}"),
        "equitable": args.equitable,
        "pool": pool_echo,
        "seed": args.seed,
        "node_cap": args.node_cap,
        "time_cap": args.time_cap,
    });
    write_json(&args.out, &json!({ "config": config, "outcome": outcome }))?;
    match outcome {
        SearchOutcome::Found { .. } => Ok(0),
        SearchOutcome::NotFound { note } => {
            eprintln!("equigrid: no bad assignment found: {note}");
            Ok(1)
        }
    }
}

fn cmd_thresholds(args: ThresholdsArgs) -> Result<u8> {
    let spec = GridSpec::new(args.dims.0)?;
    let report = engines::thresholds(&spec);
    match &args.out {
        Some(path) => {
            write_json(path, &report)?;
            if path != "-" {
                print_thresholds(&report);
            }
        }
        None => print_thresholds(&report),
    }
    Ok(0)
}

fn print_thresholds(report: &engines::ThresholdReport) {
    println!("thresholds for dims {:?}:", report.dims);
    if report.sources.is_empty() {
        println!("  no guarantees known");
        return;
    }
    for source in &report.sources {
        let label = match source.provenance {
            Provenance::Constructive => "constructive",
            Provenance::GuaranteeOnly => "guarantee-only",
        };
        println!("  k ≥ {}, {}: {}", source.k_min, label, source.detail);
    }
    if let Some(k0) = report.constructive_from() {
        println!("  constructive colourings available for every k ≥ {k0}");
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweepConfig {
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_trials")]
    trials: usize,
    entries: Vec<SweepEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweepEntry {
    dims: Vec<usize>,
    k: usize,
}

fn default_trials() -> usize {
    20
}

fn built_in_matrix() -> SweepConfig {
    let shapes: [&[usize]; 7] =
        [&[4, 4], &[6, 6], &[2, 3, 4], &[3, 3, 3], &[2, 2, 2, 2], &[2, 2, 3, 3], &[3, 3, 3, 3]];
    let entries = shapes
        .iter()
        .flat_map(|dims| (2..=6).map(|k| SweepEntry { dims: dims.to_vec(), k }))
        .collect();
    SweepConfig { seed: 0, trials: default_trials(), entries }
}

struct SweepRow {
    dims: Vec<usize>,
    k: usize,
    route: String,
    trials: usize,
    failures: usize,
    max_class: usize,
    ceil_bound: usize,
    wall_ms: u128,
}

fn cmd_sweep(args: SweepArgs) -> Result<u8> {
    let config: SweepConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => built_in_matrix(),
    };
    if let Ok(threads) = std::env::var("EQUIGRID_THREADS") {
        let threads: usize = threads.parse().map_err(|_| {
            Error::PreconditionViolated(format!("EQUIGRID_THREADS='{threads}' is not a number"))
        })?;
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    eprintln!(
        "equigrid: sweeping {} entries, {} trials each, seed {}",
        config.entries.len(),
        config.trials,
        config.seed
    );
    let mut rows = config
        .entries
        .par_iter()
        .enumerate()
        .map(|(index, entry)| sweep_entry(entry, index, config.seed, config.trials))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.dims.cmp(&b.dims).then(a.k.cmp(&b.k)));
    write_csv(&args.out, &rows)?;
    Ok(0)
}

fn sweep_entry(
    entry: &SweepEntry,
    index: usize,
    master_seed: u64,
    trials: usize,
) -> Result<SweepRow> {
    if entry.k == 0 {
        return Err(Error::PreconditionViolated(format!(
            "sweep entry {index} asks for k = 0 colours"
        )));
    }
    let spec = GridSpec::new(entry.dims.clone())?;
    let g = spec.build();
    let n = spec.vertex_count();
    let pool: Vec<u32> = (1..=(2 * entry.k) as u32).collect();
    let stream = master_seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let started = Instant::now();
    let mut failures = 0usize;
    let mut max_class = 0usize;
    let mut route: Option<String> = None;
    for _ in 0..trials {
        let lists = ListAssignment::random_uniform(n, entry.k, &pool, &mut rng);
        match engines::equitable_list_arbor(&spec, entry.k, &lists, false)? {
            ArborOutcome::Coloured { route: r, colouring } => {
                let cert = verify_colouring(
                    &g,
                    Some(&lists),
                    &colouring,
                    Mode::Arbor,
                    entry.k,
                    SizeRule::AtMostCeil,
                );
                if cert.valid {
                    let largest = colouring.class_sizes().values().copied().max().unwrap_or(0);
                    max_class = max_class.max(largest);
                } else {
                    failures += 1;
                }
                route.get_or_insert(r);
            }
            ArborOutcome::Heuristic { .. } => {
                failures += 1;
            }
            ArborOutcome::GuaranteeOnly { .. } => {
                failures += 1;
                route.get_or_insert_with(|| "guarantee-only".into());
            }
            ArborOutcome::NoGuarantee { .. } => {
                failures += 1;
                route.get_or_insert_with(|| "none".into());
            }
        }
    }
    Ok(SweepRow {
        dims: entry.dims.clone(),
        k: entry.k,
        route: route.unwrap_or_else(|| "none".into()),
        trials,
        failures,
        max_class,
        ceil_bound: n.div_ceil(entry.k),
        wall_ms: started.elapsed().as_millis(),
    })
}

fn write_csv(path: &str, rows: &[SweepRow]) -> Result<()> {
    let mut writer: csv::Writer<Box<dyn IoWrite>> = if path == "-" {
        csv::Writer::from_writer(Box::new(std::io::stdout()))
    } else {
        let file = File::create(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        csv::Writer::from_writer(Box::new(file))
    };
    let fail = |e: csv::Error| Error::Io(format!("{path}: {e}"));
    writer
        .write_record(["dims", "k", "route", "trials", "failures", "max_class", "ceil_bound", "wall_ms"])
        .map_err(fail)?;
    for row in rows {
        let dims = row
            .dims
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x");
        writer
            .write_record([
                dims,
                row.k.to_string(),
                row.route.clone(),
                row.trials.to_string(),
                row.failures.to_string(),
                row.max_class.to_string(),
                row.ceil_bound.to_string(),
                row.wall_ms.to_string(),
            ])
            .map_err(fail)?;
    }
    writer.flush().map_err(|e| Error::Io(format!("{path}: {e}")))
}
