//! Command-line front end: `analyze`, `normal-set`, `classify-one` and
//! `validate-world`.
//!
//! Every option can also come from a TOML file passed with `--config`; a flag
//! given on the command line wins over the file.

use std::fs::{self, File};
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::enrichment::{
    load_as_registry, load_geo_table, load_origin_table, parse_date_range, AsRegistry,
    ConflictPolicy, Enrichment, EnrichmentError, OriginTables, PrefixTable,
};
use crate::geometry::{HullKind, DEFAULT_BOUNDARY_STEP_DEG};
use crate::metrics::{report, Aggregate, Exposure, ExposureReport};
use crate::normality::{NormalSet, PairCache, PathVerdict};
use crate::pipeline::{
    classify_with, process_stream, to_tuple_path, Pipeline, PipelineError, RecordReader,
    TracerouteRecord, UnclassifiablePolicy,
};
use crate::world::{self, LoadSummary, PointMode, WorldError, WorldModel, DEFAULT_HULL_CITIES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Enrichment(#[from] EnrichmentError),
    #[error("{path}: {source}")]
    Input {
        path: String,
        #[source]
        source: PipelineError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("invalid traceroute record: {0}")]
    Record(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub cities: Option<PathBuf>,
    pub borders: Option<PathBuf>,
    pub regions: Option<PathBuf>,
    pub geo_table: Option<PathBuf>,
    /// `FILE` or `FILE@YYYY-MM-DD..YYYY-MM-DD`.
    pub origin_tables: Vec<String>,
    pub as_registry: Option<PathBuf>,
    pub traceroutes: Option<PathBuf>,
    pub mode: PointMode,
    pub boundary_step: f64,
    pub hull_cities: usize,
    pub workers: usize,
    pub unclassifiable_policy: UnclassifiablePolicy,
    pub moas: ConflictPolicy,
    pub top_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cities: None,
            borders: None,
            regions: None,
            geo_table: None,
            origin_tables: Vec::new(),
            as_registry: None,
            traceroutes: None,
            mode: PointMode::Population,
            boundary_step: DEFAULT_BOUNDARY_STEP_DEG,
            hull_cities: DEFAULT_HULL_CITIES,
            workers: 1,
            unclassifiable_policy: UnclassifiablePolicy::Exclude,
            moas: ConflictPolicy::Error,
            top_n: 10,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.workers < 1 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if !(self.boundary_step.is_finite() && self.boundary_step > 0.0) {
            return Err(CliError::Config(format!(
                "boundary_step must be positive, got {}",
                self.boundary_step
            )));
        }
        if self.top_n < 1 {
            return Err(CliError::Config("top_n must be at least 1".into()));
        }
        if self.hull_cities < 1 {
            return Err(CliError::Config("hull_cities must be at least 1".into()));
        }
        let given = [&self.cities, &self.borders, &self.regions]
            .iter()
            .filter(|p| p.is_some())
            .count();
        if given != 0 && given != 3 {
            return Err(CliError::Config(
                "give all of --cities, --borders and --regions, or none to use the bundled world"
                    .into(),
            ));
        }
        Ok(())
    }

    /// The settings that affect results, for the report header.
    fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("workers");
        }
        v
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with any of the options below; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Cities file (iso2,name,lat,lon,population). Omit all three world files to use the bundled world.
    #[arg(long, global = true)]
    pub cities: Option<PathBuf>,
    /// Borders GeoJSON with an iso2 property per feature.
    #[arg(long, global = true)]
    pub borders: Option<PathBuf>,
    /// Regions file (iso2,region).
    #[arg(long, global = true)]
    pub regions: Option<PathBuf>,
    /// Geolocation table (cidr,iso2).
    #[arg(long, global = true)]
    pub geo_table: Option<PathBuf>,
    /// Origin table (cidr,asn); repeat as FILE@YYYY-MM-DD..YYYY-MM-DD for dated snapshots.
    #[arg(long = "origin-table", global = true)]
    pub origin_tables: Vec<String>,
    /// AS registration table (asn,iso2).
    #[arg(long, global = true)]
    pub as_registry: Option<PathBuf>,
    /// Hull construction: population or border.
    #[arg(long, global = true)]
    pub mode: Option<PointMode>,
    /// Spacing of hull boundary samples in degrees of arc.
    #[arg(long, global = true)]
    pub boundary_step: Option<f64>,
    /// Cities per country used for population hulls.
    #[arg(long, global = true)]
    pub hull_cities: Option<usize>,
    /// Worker threads for analyze.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// exclude or count-non-normal.
    #[arg(long = "unclassifiable", global = true, value_parser = parse_policy)]
    pub unclassifiable_policy: Option<UnclassifiablePolicy>,
    /// Resolve multiple-origin prefixes by keeping the first row instead of failing.
    #[arg(long, global = true)]
    pub moas_first_wins: bool,
    #[arg(long, global = true)]
    pub top_n: Option<usize>,
}

fn parse_policy(s: &str) -> Result<UnclassifiablePolicy, String> {
    match s {
        "exclude" => Ok(UnclassifiablePolicy::Exclude),
        "count-non-normal" | "count_non_normal" => Ok(UnclassifiablePolicy::CountNonNormal),
        _ => Err(format!("expected exclude or count-non-normal, got {s:?}")),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    cities: Option<PathBuf>,
    borders: Option<PathBuf>,
    regions: Option<PathBuf>,
    geo_table: Option<PathBuf>,
    #[serde(default)]
    origin_tables: Vec<String>,
    as_registry: Option<PathBuf>,
    traceroutes: Option<PathBuf>,
    mode: Option<PointMode>,
    boundary_step: Option<f64>,
    hull_cities: Option<usize>,
    workers: Option<usize>,
    unclassifiable_policy: Option<UnclassifiablePolicy>,
    moas: Option<ConflictPolicy>,
    top_n: Option<usize>,
}

impl CommonArgs {
    pub fn resolve(&self, traceroutes: Option<PathBuf>) -> Result<RunConfig, CliError> {
        let file: ConfigFile = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(io_err(p))?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => ConfigFile::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            cities: self.cities.clone().or(file.cities),
            borders: self.borders.clone().or(file.borders),
            regions: self.regions.clone().or(file.regions),
            geo_table: self.geo_table.clone().or(file.geo_table),
            origin_tables: if self.origin_tables.is_empty() {
                file.origin_tables
            } else {
                self.origin_tables.clone()
            },
            as_registry: self.as_registry.clone().or(file.as_registry),
            traceroutes: traceroutes.or(file.traceroutes),
            mode: self.mode.or(file.mode).unwrap_or(d.mode),
            boundary_step: self
                .boundary_step
                .or(file.boundary_step)
                .unwrap_or(d.boundary_step),
            hull_cities: self
                .hull_cities
                .or(file.hull_cities)
                .unwrap_or(d.hull_cities),
            workers: self.workers.or(file.workers).unwrap_or(d.workers),
            unclassifiable_policy: self
                .unclassifiable_policy
                .or(file.unclassifiable_policy)
                .unwrap_or(d.unclassifiable_policy),
            moas: if self.moas_first_wins {
                ConflictPolicy::FirstWins
            } else {
                file.moas.unwrap_or(d.moas)
            },
            top_n: self.top_n.or(file.top_n).unwrap_or(d.top_n),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "geonormal",
    version,
    about = "Geographic normality of Internet paths"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a traceroute file and write the exposure report.
    Analyze {
        /// Newline-delimited JSON traceroutes.
        #[arg(long)]
        traceroutes: Option<PathBuf>,
        #[arg(long, default_value = "report")]
        output_dir: PathBuf,
    },
    /// Print the geographically normal countries for a country pair.
    NormalSet {
        src: String,
        dst: String,
        /// Print both population and border sets.
        #[arg(long)]
        compare: bool,
        /// Write the hull ring(s) as GeoJSON line strings.
        #[arg(long)]
        export_hull: Option<PathBuf>,
    },
    /// Resolve and classify one traceroute record given as JSON ("-" reads stdin).
    ClassifyOne { record: String },
    /// Load the world files and print the load summary.
    ValidateWorld,
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            traceroutes,
            output_dir,
        } => {
            let cfg = cli.common.resolve(traceroutes)?;
            cmd_analyze(&cfg, &output_dir, out).map(|_| ())
        }
        Command::NormalSet {
            src,
            dst,
            compare,
            export_hull,
        } => {
            let cfg = cli.common.resolve(None)?;
            let modes = if compare {
                vec![PointMode::Population, PointMode::Border]
            } else {
                vec![cfg.mode]
            };
            cmd_normal_set(&cfg, &src, &dst, &modes, export_hull.as_deref(), out).map(|_| ())
        }
        Command::ClassifyOne { record } => {
            let cfg = cli.common.resolve(None)?;
            let line = if record == "-" {
                let mut s = String::new();
                io::stdin()
                    .read_to_string(&mut s)
                    .map_err(io_err(Path::new("<stdin>")))?;
                s
            } else {
                record
            };
            cmd_classify_one(&cfg, line.trim(), out)
        }
        Command::ValidateWorld => {
            let cfg = cli.common.resolve(None)?;
            cmd_validate_world(&cfg, out).map(|_| ())
        }
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    execute(cli, out)
}

struct InputDigest {
    role: &'static str,
    source: String,
    sha256: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digest_file(role: &'static str, path: &Path) -> Result<InputDigest, CliError> {
    let mut hasher = Sha256::new();
    let mut f = File::open(path).map_err(io_err(path))?;
    io::copy(&mut f, &mut hasher).map_err(io_err(path))?;
    Ok(InputDigest {
        role,
        source: path.display().to_string(),
        sha256: hex::encode(hasher.finalize()),
    })
}

pub fn load_world_for(cfg: &RunConfig) -> Result<(WorldModel, LoadSummary), CliError> {
    let (w, s) = match (&cfg.cities, &cfg.borders, &cfg.regions) {
        (Some(c), Some(b), Some(r)) => world::load_world(c, b, r)?,
        _ => world::bundled_world()?,
    };
    Ok((w.with_hull_cities(cfg.hull_cities), s))
}

fn world_digests(cfg: &RunConfig) -> Result<Vec<InputDigest>, CliError> {
    match (&cfg.cities, &cfg.borders, &cfg.regions) {
        (Some(c), Some(b), Some(r)) => Ok(vec![
            digest_file("cities", c)?,
            digest_file("borders", b)?,
            digest_file("regions", r)?,
        ]),
        _ => Ok(vec![
            InputDigest {
                role: "cities",
                source: "bundled".into(),
                sha256: sha256_hex(world::BUNDLED_CITIES.as_bytes()),
            },
            InputDigest {
                role: "borders",
                source: "bundled".into(),
                sha256: sha256_hex(world::BUNDLED_BORDERS.as_bytes()),
            },
            InputDigest {
                role: "regions",
                source: "bundled".into(),
                sha256: sha256_hex(world::BUNDLED_REGIONS.as_bytes()),
            },
        ]),
    }
}

fn split_origin_spec(spec: &str) -> Result<(PathBuf, Option<(i64, i64)>), CliError> {
    match spec.rsplit_once('@') {
        Some((file, range)) if range.contains("..") => {
            let r = parse_date_range(range)
                .map_err(|e| CliError::Config(format!("origin table {spec:?}: {e}")))?;
            Ok((PathBuf::from(file), Some(r)))
        }
        _ => Ok((PathBuf::from(spec), None)),
    }
}

pub fn load_enrichment(cfg: &RunConfig) -> Result<Enrichment, CliError> {
    let geo = match &cfg.geo_table {
        Some(p) => load_geo_table(p)?,
        None => return Err(CliError::Config("--geo-table is required".into())),
    };
    let registry = match &cfg.as_registry {
        Some(p) => load_as_registry(p)?,
        None => AsRegistry::new(),
    };
    let specs = cfg
        .origin_tables
        .iter()
        .map(|s| split_origin_spec(s))
        .collect::<Result<Vec<_>, _>>()?;
    let origin = match specs.as_slice() {
        [] => OriginTables::Single(PrefixTable::new()),
        [(p, None)] => OriginTables::Single(load_origin_table(p, cfg.moas)?),
        _ => {
            let mut dated = Vec::with_capacity(specs.len());
            for (p, range) in &specs {
                let (s, e) = range.ok_or_else(|| {
                    CliError::Config(format!(
                        "{}: several origin tables need FILE@START..END date ranges",
                        p.display()
                    ))
                })?;
                dated.push((s, e, load_origin_table(p, cfg.moas)?));
            }
            dated.sort_by_key(|(s, _, _)| *s);
            if dated.windows(2).any(|w| w[1].0 < w[0].1) {
                return Err(CliError::Config("origin table date ranges overlap".into()));
            }
            OriginTables::Dated(dated)
        }
    };
    Ok(Enrichment {
        geo,
        origin,
        registry,
    })
}

fn enrichment_digests(cfg: &RunConfig) -> Result<Vec<InputDigest>, CliError> {
    let mut out = Vec::new();
    if let Some(p) = &cfg.geo_table {
        out.push(digest_file("geo_table", p)?);
    }
    for spec in &cfg.origin_tables {
        let (p, _) = split_origin_spec(spec)?;
        out.push(digest_file("origin_table", &p)?);
    }
    if let Some(p) = &cfg.as_registry {
        out.push(digest_file("as_registry", p)?);
    }
    Ok(out)
}

/// What `analyze` computed, for callers that want more than the files.
#[derive(Debug)]
pub struct AnalyzeOutcome {
    pub aggregate: Aggregate,
    pub report: ExposureReport,
    pub report_path: PathBuf,
}

/// Classifies `records` with a dedicated pool of `workers` threads.
pub fn aggregate_records<R: io::BufRead + Send>(
    reader: &mut RecordReader<R>,
    pipeline: &Pipeline<'_>,
    workers: usize,
) -> Result<Aggregate, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| {
        let mut total = Aggregate::new();
        process_stream(reader, pipeline, |classified, skips| {
            let part = classified
                .par_iter()
                .fold(Aggregate::new, |mut a, (tp, pc)| {
                    a.accumulate(tp, pc, pipeline.world);
                    a
                })
                .reduce(Aggregate::new, |mut a, b| {
                    a.merge(&b);
                    a
                });
            total.merge(&part);
            total.skips.merge(&skips);
        })?;
        Ok(total)
    })
}

fn fmt_don(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "n/a".into())
}

pub fn cmd_analyze(
    cfg: &RunConfig,
    output_dir: &Path,
    out: &mut dyn Write,
) -> Result<AnalyzeOutcome, CliError> {
    cfg.validate()?;
    let traceroutes = cfg
        .traceroutes
        .clone()
        .ok_or_else(|| CliError::Config("--traceroutes is required".into()))?;
    let (world, _) = load_world_for(cfg)?;
    let enrichment = load_enrichment(cfg)?;
    let mut digests = world_digests(cfg)?;
    digests.extend(enrichment_digests(cfg)?);
    digests.push(digest_file("traceroutes", &traceroutes)?);

    let cache = PairCache::new(cfg.boundary_step);
    let pipeline = Pipeline {
        world: &world,
        enrichment: &enrichment,
        cache: &cache,
        mode: cfg.mode,
        unclassifiable: cfg.unclassifiable_policy,
    };
    let file = File::open(&traceroutes).map_err(io_err(&traceroutes))?;
    let mut reader = RecordReader::new(BufReader::new(file));
    let aggregate = aggregate_records(&mut reader, &pipeline, cfg.workers).map_err(|source| {
        CliError::Input {
            path: traceroutes.display().to_string(),
            source,
        }
    })?;

    let mut rep = report(&aggregate, &world, cfg.top_n);
    rep.header = Some(json!({
        "tool": "geonormal",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg.echo(),
        "inputs": digests
            .iter()
            .map(|d| json!({"role": d.role, "source": d.source, "sha256": d.sha256}))
            .collect::<Vec<_>>(),
    }));

    let mut files = vec![("report.json".to_string(), rep.to_json())];
    files.extend(
        rep.table_exports()
            .into_iter()
            .map(|(n, c)| (format!("tables/{n}"), c)),
    );
    files.extend(
        rep.plot_exports()
            .into_iter()
            .map(|(n, c)| (format!("plots/{n}"), c)),
    );
    write_outputs(output_dir, &files)?;

    let skips: Vec<String> = aggregate
        .skips
        .iter()
        .map(|(r, n)| format!("{r}={n}"))
        .collect();
    let stats = cache.stats();
    let w = |e: io::Error| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    writeln!(
        out,
        "paths classified: {} (unclassifiable counted: {})",
        aggregate.paths, aggregate.unclassifiable_paths
    )
    .map_err(w)?;
    writeln!(
        out,
        "paths skipped: {} [{}]",
        aggregate.skips.total(),
        skips.join(", ")
    )
    .map_err(w)?;
    for e in Exposure::ALL {
        writeln!(
            out,
            "global {} DoN: {}",
            e.as_str(),
            fmt_don(aggregate.global_don(e))
        )
        .map_err(w)?;
    }
    writeln!(
        out,
        "normal sets built: {} (cache hits {})",
        stats.misses, stats.hits
    )
    .map_err(w)?;
    writeln!(out, "report: {}", output_dir.join("report.json").display()).map_err(w)?;

    Ok(AnalyzeOutcome {
        aggregate,
        report: rep,
        report_path: output_dir.join("report.json"),
    })
}

/// Writes everything to a staging directory first, then moves each file
/// into place.
fn write_outputs(output_dir: &Path, files: &[(String, String)]) -> Result<(), CliError> {
    fs::create_dir_all(output_dir).map_err(io_err(output_dir))?;
    let staging = output_dir.join(format!(".staging-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
    }
    let result = (|| {
        for (name, body) in files {
            let p = staging.join(name);
            if let Some(parent) = p.parent() {
                fs::create_dir_all(parent).map_err(io_err(parent))?;
            }
            fs::write(&p, body).map_err(io_err(&p))?;
        }
        for (name, _) in files {
            let dest = output_dir.join(name);
            if let Some(parent) = dest.parent() {
                fs::create_dir_all(parent).map_err(io_err(parent))?;
            }
            fs::rename(staging.join(name), &dest).map_err(io_err(&dest))?;
        }
        Ok(())
    })();
    let _ = fs::remove_dir_all(&staging);
    result
}

fn join_codes<'a>(codes: impl IntoIterator<Item = &'a crate::CountryCode>) -> String {
    let v: Vec<&str> = codes.into_iter().map(|c| c.as_str()).collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(" ")
    }
}

/// Unwraps longitudes so consecutive points never jump across the antimeridian.
fn continuous_lons(points: &[crate::GeoPoint]) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(points.len());
    for p in points {
        let mut lon = p.lon();
        if let Some(prev) = out.last() {
            while lon - prev[0] > 180.0 {
                lon -= 360.0;
            }
            while lon - prev[0] < -180.0 {
                lon += 360.0;
            }
        }
        out.push([lon, p.lat()]);
    }
    out
}

fn hull_feature(ns: &NormalSet) -> Option<serde_json::Value> {
    let hull = ns.hull.as_ref()?;
    let mut ring = hull.vertices_geo();
    let geometry = match hull.kind() {
        HullKind::Point => json!({"type": "Point", "coordinates": [ring[0].lon(), ring[0].lat()]}),
        HullKind::Arc => json!({"type": "LineString", "coordinates": continuous_lons(&ring)}),
        HullKind::Polygon => {
            ring.push(ring[0]);
            json!({"type": "LineString", "coordinates": continuous_lons(&ring)})
        }
    };
    Some(json!({
        "type": "Feature",
        "properties": {"src": ns.src, "dst": ns.dst, "mode": ns.mode, "kind": hull.kind()},
        "geometry": geometry,
    }))
}

pub fn cmd_normal_set(
    cfg: &RunConfig,
    src: &str,
    dst: &str,
    modes: &[PointMode],
    export_hull: Option<&Path>,
    out: &mut dyn Write,
) -> Result<Vec<NormalSet>, CliError> {
    cfg.validate()?;
    let (world, _) = load_world_for(cfg)?;
    let (a, b) = (world.lookup(src)?, world.lookup(dst)?);
    let cache = PairCache::new(cfg.boundary_step);
    let w = |e: io::Error| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    let mut sets = Vec::with_capacity(modes.len());
    for &mode in modes {
        let ns = cache.get_or_build(&world, a, b, mode)?;
        let flag = if ns.unclassifiable {
            " (unclassifiable: endpoints span more than a hemisphere)"
        } else {
            ""
        };
        writeln!(
            out,
            "{a} -> {b} [{mode}]{flag}: {}",
            join_codes(&ns.countries)
        )
        .map_err(w)?;
        sets.push(ns);
    }
    if let Some(path) = export_hull {
        let features: Vec<_> = sets.iter().filter_map(hull_feature).collect();
        let doc = json!({"type": "FeatureCollection", "features": features});
        let mut text = serde_json::to_string_pretty(&doc).expect("geojson serializes");
        text.push('\n');
        fs::write(path, text).map_err(io_err(path))?;
        writeln!(out, "hull written to {}", path.display()).map_err(w)?;
    }
    Ok(sets)
}

fn verdict_line(v: &PathVerdict) -> String {
    if v.normal {
        "normal".into()
    } else {
        format!("non-normal, benefactors {}", join_codes(&v.benefactors))
    }
}

pub fn cmd_classify_one(cfg: &RunConfig, line: &str, out: &mut dyn Write) -> Result<(), CliError> {
    cfg.validate()?;
    let rec = TracerouteRecord::from_json(line).map_err(CliError::Record)?;
    let (world, _) = load_world_for(cfg)?;
    let enrichment = load_enrichment(cfg)?;
    let w = |e: io::Error| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    let show =
        |c: Option<crate::CountryCode>| c.map(|c| c.to_string()).unwrap_or_else(|| "?".into());
    writeln!(
        out,
        "source {} ({})  destination {} ({})",
        rec.src_ip,
        show(enrichment.geolocate(rec.src_ip)),
        rec.dst_ip,
        show(enrichment.geolocate(rec.dst_ip))
    )
    .map_err(w)?;
    for hop in &rec.hops {
        match hop.ip {
            None => writeln!(out, "  ttl {:>3}  *  no response, dropped", hop.ttl),
            Some(ip) => {
                let r = enrichment.resolve(ip, rec.timestamp);
                let kept = r.phys_country.is_some() && r.asn.is_some();
                writeln!(
                    out,
                    "  ttl {:>3}  {ip}  country {}  {}  legal {}{}",
                    hop.ttl,
                    show(r.phys_country),
                    r.asn.map(|a| a.to_string()).unwrap_or_else(|| "AS?".into()),
                    show(r.legal_country),
                    if kept { "" } else { "  dropped" }
                )
            }
        }
        .map_err(w)?;
    }
    let tp = match to_tuple_path(&rec, &enrichment) {
        Ok(tp) => tp,
        Err(reason) => {
            writeln!(out, "skipped: {reason}").map_err(w)?;
            return Ok(());
        }
    };
    writeln!(out, "dropped hops: {}", tp.dropped_hops).map_err(w)?;
    let hops: Vec<String> = tp.hops.iter().map(|h| h.to_string()).collect();
    writeln!(
        out,
        "tuple path: {}",
        if hops.is_empty() {
            "(empty)".into()
        } else {
            hops.join(" -> ")
        }
    )
    .map_err(w)?;
    for c in [tp.src_country, tp.dst_country] {
        if !world.is_known(c) {
            return Err(WorldError::UnknownCountry {
                code: c.to_string(),
                suggestions: world.suggest(c.as_str()),
            }
            .into());
        }
    }
    let cache = PairCache::new(cfg.boundary_step);
    let ns = cache.get_or_build(&world, tp.src_country, tp.dst_country, cfg.mode)?;
    let pc = classify_with(&tp, &ns);
    writeln!(
        out,
        "normal set [{}]: {}{}",
        cfg.mode,
        join_codes(&ns.countries),
        if ns.unclassifiable {
            " (unclassifiable)"
        } else {
            ""
        }
    )
    .map_err(w)?;
    writeln!(out, "physical: {}", verdict_line(&pc.physical)).map_err(w)?;
    writeln!(out, "legal: {}", verdict_line(&pc.legal)).map_err(w)?;
    writeln!(out, "union: {}", verdict_line(&pc.union)).map_err(w)?;
    writeln!(out, "union added countries: {}", pc.union_added_countries).map_err(w)?;
    writeln!(
        out,
        "tuple length: {}  distinct ASes: {}",
        pc.tuple_len, pc.as_count
    )
    .map_err(w)?;
    Ok(())
}

pub fn cmd_validate_world(cfg: &RunConfig, out: &mut dyn Write) -> Result<LoadSummary, CliError> {
    cfg.validate()?;
    let (_, summary) = load_world_for(cfg)?;
    let w = |e: io::Error| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    writeln!(out, "countries with cities: {}", summary.countries).map_err(w)?;
    writeln!(
        out,
        "countries with borders: {}",
        summary.bordered_countries
    )
    .map_err(w)?;
    writeln!(out, "borders-only: {}", join_codes(&summary.borders_only)).map_err(w)?;
    writeln!(out, "cities-only: {}", join_codes(&summary.cities_only)).map_err(w)?;
    writeln!(out, "unused region rows: {}", summary.unused_regions.len()).map_err(w)?;
    writeln!(
        out,
        "hull cities outside their own borders: {}",
        summary.cities_outside_borders.len()
    )
    .map_err(w)?;
    for (c, name) in &summary.cities_outside_borders {
        writeln!(out, "  {c} {name}").map_err(w)?;
    }
    Ok(summary)
}
