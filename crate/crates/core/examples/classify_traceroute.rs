//! One traceroute, from raw hops to physical, legal and union verdicts.
//!
//! Run with `cargo run --example classify_traceroute`.

use geonormal::enrichment::ConflictPolicy;
use geonormal::pipeline::{classify_path, to_tuple_path};
use geonormal::world::bundled_world;
use geonormal::{AsRegistry, Asn, Enrichment, PairCache, PointMode, PrefixTable, TracerouteRecord};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (world, _) = bundled_world()?;

    let mut geo = PrefixTable::new();
    let mut origin = PrefixTable::new();
    let mut registry = AsRegistry::new();
    for (net, cc, asn, reg) in [
        ("11.0.0.0/8", "FR", 3215, "FR"),
        ("12.0.0.0/8", "GB", 5400, "GB"),
        ("13.0.0.0/8", "ES", 3352, "ES"),
        ("14.0.0.0/8", "FR", 1299, "SE"),
    ] {
        geo.insert(net.parse()?, cc.parse()?, ConflictPolicy::Error)?;
        origin.insert(net.parse()?, Asn::new(asn).unwrap(), ConflictPolicy::Error)?;
        registry.insert(Asn::new(asn).unwrap(), reg.parse()?)?;
    }
    let enrichment = Enrichment::new(geo, origin, registry);

    // Paris to Madrid, backtracking through London; one silent hop
    let record = TracerouteRecord::from_json(
        r#"{"src_ip": "11.0.0.1", "dst_ip": "13.0.0.1", "timestamp": 0, "hops": [
            {"ttl": 1, "ip": "11.0.0.2"},
            {"ttl": 2, "ip": "14.0.0.9"},
            {"ttl": 3, "ip": null},
            {"ttl": 4, "ip": "12.0.0.5"},
            {"ttl": 5, "ip": "12.0.0.6"},
            {"ttl": 6, "ip": "13.0.0.1"}
        ]}"#,
    )?;

    let tp = to_tuple_path(&record, &enrichment).map_err(|r| format!("skipped: {r}"))?;
    println!(
        "{} -> {}, {} hops dropped",
        tp.src_country, tp.dst_country, tp.dropped_hops
    );
    for h in &tp.hops {
        println!("  {h}");
    }

    let cache = PairCache::default();
    let pc = classify_path(&tp, &cache, &world, PointMode::Population)?;
    for (name, v) in [
        ("physical", &pc.physical),
        ("legal", &pc.legal),
        ("union", &pc.union),
    ] {
        println!(
            "{name:>9}: normal={} benefactors={:?}",
            v.normal, v.benefactors
        );
    }
    println!(
        "countries added by the legal view: {}",
        pc.union_added_countries
    );
    Ok(())
}
