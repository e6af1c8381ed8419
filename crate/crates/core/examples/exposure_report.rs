//! Batch analysis of a traceroute file into an exposure report.
//!
//! Uses the small synthetic dataset in `tests/fixtures/pipeline12`. Run from
//! `crates/core` with `cargo run --example exposure_report [OUTPUT_DIR]`.

use std::path::PathBuf;

use geonormal::cli::{cmd_analyze, RunConfig};
use geonormal::Exposure;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/pipeline12");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("geonormal-example-report"));

    let cfg = RunConfig {
        cities: Some(base.join("cities.csv")),
        borders: Some(base.join("borders.geojson")),
        regions: Some(base.join("regions.csv")),
        geo_table: Some(base.join("geo.csv")),
        origin_tables: vec![base.join("origin.csv").display().to_string()],
        as_registry: Some(base.join("registry.csv")),
        traceroutes: Some(base.join("traceroutes.jsonl")),
        top_n: 3,
        ..RunConfig::default()
    };
    let outcome = cmd_analyze(&cfg, &out, &mut std::io::stdout())?;

    let rep = &outcome.report;
    for e in Exposure::ALL {
        println!("top {} benefactors:", e.as_str());
        for row in rep.benefactors.get(e) {
            println!(
                "  {} benefited from {} paths",
                row.iso2, row.benefited_paths
            );
        }
    }
    println!("region matrix (physical):");
    for cell in rep
        .region_matrix
        .get(Exposure::Physical)
        .iter()
        .filter(|c| c.cell.total > 0)
    {
        println!(
            "  {:>8} -> {:<8} {}/{}",
            cell.from.to_string(),
            cell.to.to_string(),
            cell.cell.normal,
            cell.cell.total
        );
    }
    Ok(())
}
