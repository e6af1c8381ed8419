//! Spherical convex hulls: construction, containment and boundary samples.
//!
//! Run with `cargo run --example hull_basics`.

use geonormal::geometry::{hull_boundary_samples, spherical_convex_hull, GeometryError};
use geonormal::GeoPoint;

fn main() -> Result<(), GeometryError> {
    // Four capitals and one interior city
    let pts = [
        GeoPoint::new(52.52, 13.40)?, // Berlin
        GeoPoint::new(48.86, 2.35)?,  // Paris
        GeoPoint::new(41.90, 12.50)?, // Rome
        GeoPoint::new(50.08, 14.44)?, // Prague
        GeoPoint::new(48.14, 11.58)?, // Munich, inside
    ];
    let hull = spherical_convex_hull(&pts)?;
    println!(
        "kind: {:?}, {} vertices",
        hull.kind(),
        hull.vertices().len()
    );
    for v in hull.vertices_geo() {
        println!("  vertex {:8.3} {:8.3}", v.lat(), v.lon());
    }

    for (name, lat, lon) in [
        ("Zurich", 47.37, 8.54),
        ("Madrid", 40.42, -3.70),
        ("Vienna", 48.21, 16.37),
    ] {
        let p = GeoPoint::new(lat, lon)?;
        println!("{name:>7} inside: {}", hull.contains(p));
    }

    let samples = hull_boundary_samples(&hull, 1.0)?;
    println!("{} boundary samples at 1 degree spacing", samples.len());

    // A hull across the antimeridian works like any other
    let pacific = [
        GeoPoint::new(-17.7, 178.0)?,
        GeoPoint::new(-13.8, -171.8)?,
        GeoPoint::new(-21.1, -175.2)?,
    ];
    let h = spherical_convex_hull(&pacific)?;
    println!(
        "Fiji-Samoa-Tonga hull contains (-17, 180): {}",
        h.contains(GeoPoint::new(-17.0, 180.0)?)
    );

    // No hemisphere holds antipodal points
    match spherical_convex_hull(&[GeoPoint::new(0.0, 0.0)?, GeoPoint::new(0.0, 180.0)?]) {
        Err(e) => println!("antipodes: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
