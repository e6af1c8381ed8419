//! Geographic normality of Internet paths.
//!
//! Given a source and destination country, `geonormal` builds a spherical
//! convex hull around the most populous cities of both countries and calls
//! every country touching that hull *geographically normal* for the pair. A
//! traceroute reduced to (country, AS) hops is then normal when it only
//! visits normal countries. Paths are judged three ways:
//!
//! - **physical**: the countries that host the routers on the path;
//! - **legal**: the countries where the carrying ASes are registered;
//! - **union**: both together.
//!
//! Aggregating verdicts gives the degree of normality (DoN), the share of
//! normal paths, per country, role, region and exposure, plus benefactor
//! counts for countries that see traffic they have no geographic reason to.
//!
//! ```no_run
//! use geonormal::{normal_set, world::bundled_world, CountryCode, PointMode};
//!
//! let (world, _) = bundled_world()?;
//! let cn: CountryCode = "CN".parse()?;
//! let mn: CountryCode = "MN".parse()?;
//! let ns = normal_set(&world, cn, mn, PointMode::Population)?;
//! println!("{:?}", ns.countries);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The `examples/` directory has one runnable program per capability, and
//! the `geonormal` binary exposes the batch workflow.

pub mod cli;
pub mod enrichment;
pub mod geometry;
pub mod metrics;
pub mod normality;
pub mod pipeline;
pub mod world;

pub use enrichment::{AsRegistry, Asn, Enrichment, PrefixTable};
pub use geometry::{GeoPoint, GeoPolygon, SphericalHull, UnitVec3};
pub use metrics::{don, Aggregate, Exposure, ExposureReport, Role};
pub use normality::{classify, normal_set, NormalSet, PairCache, PathVerdict};
pub use pipeline::{PathClassification, TracerouteRecord, TuplePath};
pub use world::{CountryCode, PointMode, Region, WorldModel};
