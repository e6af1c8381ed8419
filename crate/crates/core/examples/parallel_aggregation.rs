//! Aggregates are mergeable, so any number of workers gives the same report.
//!
//! Run with `cargo run --release --example parallel_aggregation`.

use std::io::Cursor;
use std::time::Instant;

use geonormal::cli::aggregate_records;
use geonormal::enrichment::ConflictPolicy;
use geonormal::metrics::report;
use geonormal::pipeline::{Pipeline, RecordReader, UnclassifiablePolicy};
use geonormal::world::bundled_world;
use geonormal::{AsRegistry, Asn, CountryCode, Enrichment, PairCache, PointMode, PrefixTable};

const COUNTRIES: [&str; 12] = [
    "DE", "FR", "NL", "GB", "ES", "IT", "PL", "SE", "AT", "CH", "BE", "CZ",
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (world, _) = bundled_world()?;
    let mut geo = PrefixTable::new();
    let mut origin = PrefixTable::new();
    let mut registry = AsRegistry::new();
    for (i, c) in COUNTRIES.iter().enumerate() {
        let cc: CountryCode = c.parse()?;
        let asn = Asn::new(65000 + i as u32).unwrap();
        geo.insert(format!("20.{i}.0.0/16").parse()?, cc, ConflictPolicy::Error)?;
        origin.insert(
            format!("20.{i}.0.0/16").parse()?,
            asn,
            ConflictPolicy::Error,
        )?;
        registry.insert(asn, cc)?;
    }
    let enrichment = Enrichment::new(geo, origin, registry);

    // a cheap deterministic generator keeps the example dependency free
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = |n: usize| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % n as u64) as usize
    };
    let mut text = String::new();
    for _ in 0..20_000 {
        let (s, d) = (next(COUNTRIES.len()), next(COUNTRIES.len()));
        let mid: Vec<usize> = (0..next(4)).map(|_| next(COUNTRIES.len())).collect();
        let hops: Vec<String> = std::iter::once(s)
            .chain(mid)
            .chain(std::iter::once(d))
            .enumerate()
            .map(|(t, c)| format!(r#"{{"ttl":{},"ip":"20.{c}.0.{}"}}"#, t + 1, t + 1))
            .collect();
        text.push_str(&format!(
            r#"{{"src_ip":"20.{s}.9.9","dst_ip":"20.{d}.9.9","hops":[{}]}}"#,
            hops.join(",")
        ));
        text.push('\n');
    }

    let mut reports = Vec::new();
    for workers in [1, 2, 8] {
        let cache = PairCache::default();
        let pipeline = Pipeline {
            world: &world,
            enrichment: &enrichment,
            cache: &cache,
            mode: PointMode::Population,
            unclassifiable: UnclassifiablePolicy::Exclude,
        };
        let t = Instant::now();
        let agg = aggregate_records(
            &mut RecordReader::new(Cursor::new(text.as_bytes())),
            &pipeline,
            workers,
        )?;
        println!(
            "{workers} workers: {} paths in {:.2?}, physical DoN {:.4}",
            agg.paths,
            t.elapsed(),
            agg.global_don(geonormal::Exposure::Physical)
                .unwrap_or(f64::NAN)
        );
        reports.push(report(&agg, &world, 10).to_json());
    }
    println!(
        "reports identical: {}",
        reports.windows(2).all(|w| w[0] == w[1])
    );
    Ok(())
}
