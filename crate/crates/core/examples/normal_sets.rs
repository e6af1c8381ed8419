//! Geographically normal countries for a country pair, with the bundled world.
//!
//! Run with `cargo run --example normal_sets -- CN MN`.

use geonormal::world::bundled_world;
use geonormal::{normal_set, PointMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (a, b) = match args.as_slice() {
        [a, b] => (a.as_str(), b.as_str()),
        _ => ("CN", "MN"),
    };
    let (world, summary) = bundled_world()?;
    println!(
        "bundled world: {} countries with cities, {} with borders",
        summary.countries, summary.bordered_countries
    );
    let (src, dst) = (world.lookup(a)?, world.lookup(b)?);

    for mode in [PointMode::Population, PointMode::Border] {
        let ns = normal_set(&world, src, dst, mode)?;
        let names: Vec<String> = ns.countries.iter().map(|c| c.to_string()).collect();
        println!("{mode:>10}: {}", names.join(" "));
        if ns.unclassifiable {
            println!("            (no common hemisphere; every third country is a benefactor)");
        }
    }

    let same = normal_set(&world, src, src, PointMode::Population)?;
    println!("{src} -> {src}: {:?}", same.countries);
    Ok(())
}
