use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use toproute_core::bench::run_bench;
use toproute_core::generate::{
    generate_map, generate_queries, ratings_from_checkins, CheckinRow, CheckinTable, GeneratorConfig, QueryGenConfig,
};
use toproute_core::model::validate_map;
use toproute_core::search::{Algorithm, SearchLimits};
use toproute_core::{
    build_feature_index, build_hop_index, parse_queries, AggregationDoc, AggregationSpec, Engine, Error, HopIndex,
    MapDocument, PoiMap,
};

#[derive(Parser)]
#[command(name = "toproute", version, about = "Top-k preference-aware route search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a map file against every map invariant.
    Validate { map: PathBuf },
    /// Build the 2-hop distance index of a map.
    Index {
        map: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a seeded synthetic map.
    GenMap(GenMapArgs),
    /// Generate a seeded batch of queries for a map.
    GenQueries(GenQueriesArgs),
    /// Turn check-in counts (CSV with columns poi,feature,count) into ratings.
    Ratings(RatingsArgs),
    /// Answer the queries in a file.
    Query(QueryArgs),
    /// Run several algorithms over a query batch and report aggregates.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenMapArgs {
    #[arg(long, default_value_t = 100)]
    pois: usize,
    /// Probability of an edge between two POIs.
    #[arg(long, default_value_t = 0.05)]
    density: f64,
    #[arg(long, default_value_t = 8)]
    features: usize,
    #[arg(long, default_value_t = 90.0)]
    stay_mean: f64,
    #[arg(long, default_value_t = 15.0)]
    stay_stddev: f64,
    #[arg(long, default_value_t = 5.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    directed: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenQueriesArgs {
    map: PathBuf,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(short, long, default_value_t = 360.0)]
    b: f64,
    #[arg(long, default_value_t = 2.5)]
    theta: f64,
    /// power_law, log or coverage.
    #[arg(long, default_value = "power_law")]
    aggregation: String,
    /// Power-law exponent; 0.5 when omitted.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(short, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min_features: usize,
    #[arg(long, default_value_t = 4)]
    max_features: usize,
    /// Fixed source POI id.
    #[arg(short)]
    x: Option<u32>,
    /// Fixed destination POI id.
    #[arg(short)]
    y: Option<u32>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RatingsArgs {
    checkins: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    beta: f64,
    /// Replace the ratings of this map and print the updated map.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Caps {
    /// Per-query wall-time cap in milliseconds.
    #[arg(long, default_value_t = 60_000)]
    time_cap_ms: u64,
    /// Per-query memory cap in MiB.
    #[arg(long, default_value_t = 2048)]
    memory_cap_mb: usize,
}

impl Caps {
    fn limits(&self) -> SearchLimits {
        SearchLimits {
            time: Some(Duration::from_millis(self.time_cap_ms)),
            memory_bytes: Some(self.memory_cap_mb.saturating_mul(1 << 20)),
        }
    }
}

#[derive(Args)]
struct QueryArgs {
    map: PathBuf,
    idx: PathBuf,
    /// One query object or an array of them.
    query: PathBuf,
    #[arg(long, default_value = "pacer2")]
    algo: String,
    /// Overrides the k of every query.
    #[arg(short)]
    k: Option<usize>,
    #[command(flatten)]
    caps: Caps,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    map: PathBuf,
    queries: PathBuf,
    /// Prebuilt index; built in memory when absent.
    #[arg(long)]
    idx: Option<PathBuf>,
    /// Comma-separated algorithm names.
    #[arg(long, default_value = "pacer2,pacer1,pacer-sc,greedy", value_delimiter = ',')]
    algos: Vec<String>,
    #[command(flatten)]
    caps: Caps,
    /// Write the aggregate CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write the full report, per-query rows included, as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// An error together with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InfeasibleQuery { .. } | Error::InfeasibleRoute(_) | Error::Unreachable { .. } => 3,
            Error::CapExceeded(_) | Error::Refused(_) => 4,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> CliResult {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| input(e.to_string()))
        }
    }
}

fn load_map(path: &Path) -> CliResult<PoiMap> {
    Ok(PoiMap::from_json(&read_text(path)?)?)
}

fn load_engine(map: &Path, idx: Option<&Path>) -> CliResult<Engine> {
    let map = load_map(map)?;
    match idx {
        Some(idx) => {
            let hops = HopIndex::read_from(BufReader::new(open(idx)?))?;
            let features = build_feature_index(&map);
            Ok(Engine::with_indices(map, features, hops)?)
        }
        None => Ok(Engine::new(map)?),
    }
}

fn parse_algorithm(name: &str) -> CliResult<Algorithm> {
    Ok(name.trim().parse::<Algorithm>()?)
}

fn validate(map: &Path) -> CliResult {
    let doc: MapDocument = serde_json::from_str(&read_text(map)?).map_err(|e| input(e.to_string()))?;
    let report = validate_map(&doc);
    if !report.is_valid() {
        for v in &report.violations {
            eprintln!("{v}");
        }
        return Err(input(format!("{} violation(s)", report.violations.len())));
    }
    println!("ok: {} POIs, {} edges, {} features", doc.pois.len(), doc.edges.len(), doc.features.len());
    Ok(())
}

fn index(map: &Path, output: &Path) -> CliResult {
    let map = load_map(map)?;
    let hops = build_hop_index(&map);
    let file = File::create(output).map_err(|e| input(format!("{}: {e}", output.display())))?;
    let mut w = BufWriter::new(file);
    hops.write_to(&mut w)?;
    w.flush().map_err(|e| input(e.to_string()))?;
    eprintln!("{} labels for {} POIs", hops.label_count(), hops.len());
    Ok(())
}

fn gen_map(a: &GenMapArgs) -> CliResult {
    let cfg = GeneratorConfig {
        poi_count: a.pois,
        edge_density: a.density,
        feature_count: a.features,
        stay_mean: a.stay_mean,
        stay_stddev: a.stay_stddev,
        beta: a.beta,
        seed: a.seed,
        directed: a.directed,
    };
    emit(a.output.as_deref(), &generate_map(&cfg)?.to_json()?)
}

fn gen_queries(a: &GenQueriesArgs) -> CliResult {
    let map = load_map(&a.map)?;
    let cfg = QueryGenConfig {
        count: a.count,
        b: a.b,
        theta: a.theta,
        aggregation: AggregationSpec::from_doc(&AggregationDoc { kind: a.aggregation.clone(), alpha: a.alpha })?
            .to_doc(),
        k: a.k,
        seed: a.seed,
        min_features: a.min_features,
        max_features: a.max_features,
        x: a.x,
        y: a.y,
    };
    let queries = generate_queries(&map, &cfg)?;
    emit(a.output.as_deref(), &serde_json::to_string_pretty(&queries).map_err(|e| input(e.to_string()))?)
}

fn ratings(a: &RatingsArgs) -> CliResult {
    let mut reader = csv::Reader::from_reader(open(&a.checkins)?);
    let rows = reader
        .deserialize::<CheckinRow>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| input(format!("{}: {e}", a.checkins.display())))?;
    let result = ratings_from_checkins(&CheckinTable { rows }, a.beta)?;
    for f in &result.dropped {
        eprintln!("warning: feature \"{f}\" has no check-ins and was dropped");
    }
    let text = match &a.map {
        Some(path) => {
            let mut doc: MapDocument = serde_json::from_str(&read_text(path)?).map_err(|e| input(e.to_string()))?;
            let mut features: Vec<String> = result.ratings.values().flat_map(|r| r.keys().cloned()).collect();
            features.sort();
            features.dedup();
            doc.features = features;
            doc.beta = a.beta;
            for poi in &mut doc.pois {
                poi.ratings = result.ratings.get(&poi.id).cloned().unwrap_or_default();
            }
            let report = validate_map(&doc);
            if !report.is_valid() {
                return Err(input(format!("updated map is invalid: {report}")));
            }
            doc.to_json()?
        }
        None => serde_json::to_string_pretty(&result.ratings).map_err(|e| input(e.to_string()))?,
    };
    emit(a.output.as_deref(), &text)
}

fn query(a: &QueryArgs) -> CliResult {
    let algorithm = parse_algorithm(&a.algo)?;
    let engine = load_engine(&a.map, Some(&a.idx))?;
    let mut docs = parse_queries(&read_text(&a.query)?)?;
    if let Some(k) = a.k {
        for d in &mut docs {
            d.k = k;
        }
    }
    // Every query is answered; the first failure decides the exit code.
    let mut first_failure = None;
    let mut results = Vec::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        match engine.solve(doc, algorithm, a.caps.limits()) {
            Ok(result) => results.push(serde_json::to_value(result).map_err(|e| input(e.to_string()))?),
            Err(e) => {
                let failure = Failure::from(e);
                eprintln!("query {i}: {}", failure.message);
                results.push(serde_json::json!({ "error": failure.message, "exit_code": failure.code }));
                first_failure.get_or_insert(failure);
            }
        }
    }
    let value = if results.len() == 1 { results.pop().unwrap() } else { serde_json::Value::Array(results) };
    emit(a.output.as_deref(), &serde_json::to_string_pretty(&value).map_err(|e| input(e.to_string()))?)?;
    first_failure.map_or(Ok(()), Err)
}

fn bench(a: &BenchArgs) -> CliResult {
    let algorithms = a.algos.iter().map(|s| parse_algorithm(s)).collect::<CliResult<Vec<_>>>()?;
    let engine = load_engine(&a.map, a.idx.as_deref())?;
    let queries = parse_queries(&read_text(&a.queries)?)?;
    let report = run_bench(&engine, &queries, &algorithms, a.caps.limits())?;
    if let Some(path) = &a.json {
        emit(Some(path), &report.to_json()?)?;
    }
    emit(a.csv.as_deref(), report.to_csv()?.trim_end())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Validate { map } => validate(&map),
        Command::Index { map, output } => index(&map, &output),
        Command::GenMap(a) => gen_map(&a),
        Command::GenQueries(a) => gen_queries(&a),
        Command::Ratings(a) => ratings(&a),
        Command::Query(a) => query(&a),
        Command::Bench(a) => bench(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
