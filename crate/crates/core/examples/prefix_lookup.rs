//! Longest-prefix tables and hop enrichment: location, origin AS and the
//! country the AS is registered in.
//!
//! Run with `cargo run --example prefix_lookup`.

use geonormal::enrichment::ConflictPolicy;
use geonormal::{AsRegistry, Asn, Enrichment, PrefixTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut geo = PrefixTable::new();
    geo.insert(
        "198.51.100.0/22".parse()?,
        "DE".parse()?,
        ConflictPolicy::Error,
    )?;
    geo.insert(
        "198.51.101.0/24".parse()?,
        "AT".parse()?,
        ConflictPolicy::Error,
    )?;
    geo.insert(
        "2001:db8::/32".parse()?,
        "NL".parse()?,
        ConflictPolicy::Error,
    )?;

    let mut origin = PrefixTable::new();
    origin.insert(
        "198.51.100.0/22".parse()?,
        Asn::new(64500).unwrap(),
        ConflictPolicy::Error,
    )?;
    origin.insert(
        "198.51.101.0/24".parse()?,
        Asn::new(64501).unwrap(),
        ConflictPolicy::Error,
    )?;

    let mut registry = AsRegistry::new();
    registry.insert(Asn::new(64500).unwrap(), "DE".parse()?)?;
    // hosted in Austria, registered in Bulgaria
    registry.insert(Asn::new(64501).unwrap(), "BG".parse()?)?;

    let e = Enrichment::new(geo, origin, registry);
    for ip in [
        "198.51.100.7",
        "198.51.101.7",
        "198.51.103.250",
        "2001:db8::1",
        "192.168.0.1",
        "203.0.113.5",
    ] {
        let r = e.resolve(ip.parse()?, 0);
        let show = |c: Option<geonormal::CountryCode>| {
            c.map(|c| c.to_string()).unwrap_or_else(|| "-".into())
        };
        println!(
            "{ip:>16}  located {}  origin {}  registered {}",
            show(r.phys_country),
            r.asn.map(|a| a.to_string()).unwrap_or_else(|| "-".into()),
            show(r.legal_country)
        );
    }

    // The matched prefix itself is available too
    let (net, cc) = e.geo.longest_match("198.51.101.9".parse()?).unwrap();
    println!("198.51.101.9 matched {net} -> {cc}");
    Ok(())
}
