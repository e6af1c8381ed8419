#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use geonormal::cli::RunConfig;
use geonormal::world::{world_from_texts, WorldTexts};
use geonormal::WorldModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GRID_ROWS: [f64; 3] = [-10.0, 5.0, 20.0];
pub const GRID_COLS: usize = 8;
pub const HALF_WIDTH: f64 = 5.0;

pub fn grid_code(i: usize) -> String {
    format!("Q{}", (b'A' + i as u8) as char)
}

pub fn grid_len() -> usize {
    GRID_ROWS.len() * GRID_COLS
}

fn grid_center(i: usize) -> (f64, f64) {
    (GRID_ROWS[i / GRID_COLS], (i % GRID_COLS) as f64 * 15.0)
}

fn grid_region(i: usize) -> &'static str {
    match i % GRID_COLS {
        0..=2 => "Europe",
        3..=5 => "Asia",
        _ => "Oceania",
    }
}

/// Cities, borders and regions text for a 3 x 8 grid of square countries.
pub fn grid_world_texts() -> (String, String, String) {
    let mut cities = String::from("iso2,name,lat,lon,population\n");
    let mut regions = String::from("iso2,region\n");
    let mut features = Vec::new();
    for i in 0..grid_len() {
        let code = grid_code(i);
        let (la, lo) = grid_center(i);
        for (k, (dla, dlo, pop)) in [
            (1.0, 1.0, 900_000),
            (-2.0, 1.5, 500_000),
            (1.5, -2.5, 300_000),
        ]
        .into_iter()
        .enumerate()
        {
            writeln!(
                cities,
                "{code},{code} city {k},{},{},{pop}",
                la + dla,
                lo + dlo
            )
            .unwrap();
        }
        writeln!(regions, "{code},{}", grid_region(i)).unwrap();
        let h = HALF_WIDTH;
        let ring = vec![
            [lo - h, la - h],
            [lo + h, la - h],
            [lo + h, la + h],
            [lo - h, la + h],
            [lo - h, la - h],
        ];
        features.push(serde_json::json!({
            "type": "Feature",
            "properties": {"iso2": code},
            "geometry": {"type": "Polygon", "coordinates": [ring]},
        }));
    }
    let borders =
        serde_json::json!({"type": "FeatureCollection", "features": features}).to_string();
    (cities, borders, regions)
}

pub fn grid_world() -> WorldModel {
    let (c, b, r) = grid_world_texts();
    world_from_texts(WorldTexts {
        cities: ("grid cities", &c),
        borders: ("grid borders", &b),
        regions: ("grid regions", &r),
    })
    .unwrap()
    .0
}

/// Geo, origin and registry tables matching the grid world. Country `i`
/// owns 20.i.0.0/16; the upper /17 is announced by an AS registered abroad.
pub fn grid_tables() -> (String, String, String) {
    let mut geo = String::from("prefix,country\n");
    let mut origin = String::from("prefix,asn\n");
    let mut registry = String::from("asn,country\n");
    let n = grid_len();
    for i in 0..n {
        writeln!(geo, "20.{i}.0.0/16,{}", grid_code(i)).unwrap();
        writeln!(origin, "20.{i}.0.0/16,{}", 1000 + i).unwrap();
        writeln!(origin, "20.{i}.128.0/17,{}", 5000 + i).unwrap();
        writeln!(registry, "{},{}", 1000 + i, grid_code(i)).unwrap();
        writeln!(registry, "{},{}", 5000 + i, grid_code((i * 7 + 3) % n)).unwrap();
    }
    (geo, origin, registry)
}

fn host(rng: &mut ChaCha8Rng, country: usize) -> String {
    let upper = rng.gen_bool(0.2);
    let third = if upper {
        rng.gen_range(128..=255)
    } else {
        rng.gen_range(0..=127)
    };
    format!("20.{country}.{third}.{}", rng.gen_range(1..=254))
}

/// Newline-delimited traceroute records over the grid world.
pub fn random_traceroutes(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let countries = grid_len();
    let mut out = String::new();
    for _ in 0..n {
        let src = rng.gen_range(0..countries);
        let dst = if rng.gen_bool(0.15) {
            src
        } else {
            rng.gen_range(0..countries)
        };
        let src_ip = if rng.gen_bool(0.01) {
            "30.0.0.1".to_string()
        } else {
            host(&mut rng, src)
        };
        let dst_ip = host(&mut rng, dst);
        let mut hops = Vec::new();
        let (a, m, b) = (
            rng.gen_range(0..3),
            rng.gen_range(0..4),
            rng.gen_range(0..3),
        );
        let plan = std::iter::repeat_n(Some(src), a)
            .chain((0..m).map(|_| {
                if rng.gen_bool(0.5) {
                    None
                } else {
                    Some(rng.gen_range(0..countries))
                }
            }))
            .chain(std::iter::repeat_n(Some(dst), b))
            .collect::<Vec<_>>();
        for (ttl, c) in plan.into_iter().enumerate() {
            let roll: f64 = rng.gen();
            let ip = if roll < 0.06 {
                serde_json::Value::Null
            } else if roll < 0.09 {
                serde_json::Value::from(format!("30.1.{}.1", rng.gen_range(0..=255)))
            } else {
                let c = c.unwrap_or_else(|| {
                    // a neighbour of the source, often on the normal side
                    let step = [1usize, GRID_COLS, countries - 1][rng.gen_range(0..3)];
                    (src + step) % countries
                });
                serde_json::Value::from(host(&mut rng, c))
            };
            hops.push(serde_json::json!({"ttl": ttl + 1, "ip": ip}));
        }
        let rec = serde_json::json!({
            "src_ip": src_ip,
            "dst_ip": dst_ip,
            "timestamp": 1_600_000_000,
            "hops": hops,
        });
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    out
}

/// Writes the grid dataset to `dir` and returns a config pointing at it.
pub fn write_grid_dataset(dir: &Path, records: usize, seed: u64) -> RunConfig {
    let (c, b, r) = grid_world_texts();
    let (g, o, reg) = grid_tables();
    let p = |name: &str| -> PathBuf { dir.join(name) };
    fs::write(p("cities.csv"), c).unwrap();
    fs::write(p("borders.geojson"), b).unwrap();
    fs::write(p("regions.csv"), r).unwrap();
    fs::write(p("geo.csv"), g).unwrap();
    fs::write(p("origin.csv"), o).unwrap();
    fs::write(p("registry.csv"), reg).unwrap();
    fs::write(p("traceroutes.jsonl"), random_traceroutes(records, seed)).unwrap();
    RunConfig {
        cities: Some(p("cities.csv")),
        borders: Some(p("borders.geojson")),
        regions: Some(p("regions.csv")),
        geo_table: Some(p("geo.csv")),
        origin_tables: vec![p("origin.csv").display().to_string()],
        as_registry: Some(p("registry.csv")),
        traceroutes: Some(p("traceroutes.jsonl")),
        ..RunConfig::default()
    }
}

pub const FIXTURE12: &str = "tests/fixtures/pipeline12";

/// The 12-path fixture config, with paths relative to the package root.
pub fn fixture12_config() -> RunConfig {
    let p = |name: &str| PathBuf::from(format!("{FIXTURE12}/{name}"));
    RunConfig {
        cities: Some(p("cities.csv")),
        borders: Some(p("borders.geojson")),
        regions: Some(p("regions.csv")),
        geo_table: Some(p("geo.csv")),
        origin_tables: vec![format!("{FIXTURE12}/origin.csv")],
        as_registry: Some(p("registry.csv")),
        traceroutes: Some(p("traceroutes.jsonl")),
        ..RunConfig::default()
    }
}

/// Every file under `root`, as sorted relative paths.
pub fn list_files(root: &Path) -> Vec<PathBuf> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                out.push(p.strip_prefix(base).unwrap().to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}
