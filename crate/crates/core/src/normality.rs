//! Geographically normal country sets and path verdicts.
//!
//! A country is normal for a (source, destination) pair when one of its
//! hull cities falls inside the hull spanning both endpoints, or when a
//! sample along the hull boundary falls inside its borders.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::geometry::{
    convex_hull_of_units, GeometryError, SphericalHull, DEFAULT_BOUNDARY_STEP_DEG,
};
use crate::world::{country_points, CountryCode, PointMode, WorldError, WorldModel};

#[derive(Debug, Clone, Serialize)]
pub struct NormalSet {
    pub src: CountryCode,
    pub dst: CountryCode,
    pub mode: PointMode,
    pub countries: BTreeSet<CountryCode>,
    /// The endpoints do not fit in a hemisphere; `countries` holds only them.
    pub unclassifiable: bool,
    #[serde(skip)]
    pub hull: Option<Arc<SphericalHull>>,
}

impl NormalSet {
    pub fn contains(&self, c: CountryCode) -> bool {
        self.countries.contains(&c)
    }

    fn with_endpoints(&self, src: CountryCode, dst: CountryCode) -> Self {
        Self {
            src,
            dst,
            ..self.clone()
        }
    }
}

impl PartialEq for NormalSet {
    fn eq(&self, o: &Self) -> bool {
        self.src == o.src
            && self.dst == o.dst
            && self.mode == o.mode
            && self.countries == o.countries
            && self.unclassifiable == o.unclassifiable
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathVerdict {
    pub normal: bool,
    pub benefactors: BTreeSet<CountryCode>,
}

/// Knobs for normal-set construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityConfig {
    pub mode: PointMode,
    /// Spacing of hull-boundary samples in degrees.
    pub boundary_step_deg: f64,
}

impl Default for NormalityConfig {
    fn default() -> Self {
        Self {
            mode: PointMode::Population,
            boundary_step_deg: DEFAULT_BOUNDARY_STEP_DEG,
        }
    }
}

fn known(w: &WorldModel, c: CountryCode) -> Result<(), WorldError> {
    if w.is_known(c) {
        Ok(())
    } else {
        Err(WorldError::UnknownCountry {
            code: c.to_string(),
            suggestions: w.suggest(c.as_str()),
        })
    }
}

pub fn normal_set(
    w: &WorldModel,
    src: CountryCode,
    dst: CountryCode,
    mode: PointMode,
) -> Result<NormalSet, WorldError> {
    normal_set_with(
        w,
        src,
        dst,
        &NormalityConfig {
            mode,
            ..NormalityConfig::default()
        },
    )
}

pub fn normal_set_with(
    w: &WorldModel,
    src: CountryCode,
    dst: CountryCode,
    cfg: &NormalityConfig,
) -> Result<NormalSet, WorldError> {
    known(w, src)?;
    known(w, dst)?;
    let base = NormalSet {
        src,
        dst,
        mode: cfg.mode,
        countries: [src, dst].into_iter().collect(),
        unclassifiable: false,
        hull: None,
    };
    if src == dst {
        return Ok(base);
    }
    // fixed input order keeps (A, B) and (B, A) bit-identical
    let (lo, hi) = if src < dst { (src, dst) } else { (dst, src) };
    let mut points = country_points(w, lo, cfg.mode)?;
    points.extend(country_points(w, hi, cfg.mode)?);
    let units: Vec<_> = points.iter().map(|p| p.to_unit()).collect();
    if units.is_empty() {
        // neither endpoint has points in this mode
        return Ok(NormalSet {
            unclassifiable: true,
            ..base
        });
    }
    let hull = match convex_hull_of_units(&units) {
        Ok(h) => h,
        Err(GeometryError::HemisphereViolation { .. }) => {
            return Ok(NormalSet {
                unclassifiable: true,
                ..base
            })
        }
        Err(e) => return Err(WorldError::Validation(e.to_string())),
    };
    let countries = countries_touching(w, &hull, cfg.boundary_step_deg)?;
    Ok(NormalSet {
        countries: countries.into_iter().chain([src, dst]).collect(),
        hull: Some(Arc::new(hull)),
        ..base
    })
}

fn countries_touching(
    w: &WorldModel,
    hull: &SphericalHull,
    step_deg: f64,
) -> Result<BTreeSet<CountryCode>, WorldError> {
    let mut out: BTreeSet<CountryCode> = w
        .countries()
        .filter(|rec| w.hull_city_points(rec.iso2).any(|p| hull.contains(p)))
        .map(|rec| rec.iso2)
        .collect();
    let samples = hull
        .boundary_samples(step_deg)
        .map_err(|e| WorldError::Validation(e.to_string()))?;
    for b in w.all_borders() {
        if out.contains(&b.iso2) {
            continue;
        }
        let hit = b
            .prepared()
            .iter()
            .any(|poly| samples.iter().any(|s| poly.contains_unit(s)));
        if hit {
            out.insert(b.iso2);
        }
    }
    Ok(out)
}

/// Benefactors are path countries outside the normal set, endpoints excluded.
pub fn classify<I>(ns: &NormalSet, path_countries: I) -> PathVerdict
where
    I: IntoIterator<Item = CountryCode>,
{
    let benefactors: BTreeSet<CountryCode> = path_countries
        .into_iter()
        .filter(|c| *c != ns.src && *c != ns.dst)
        .filter(|c| ns.unclassifiable || !ns.countries.contains(c))
        .collect();
    PathVerdict {
        normal: !ns.unclassifiable && benefactors.is_empty(),
        benefactors,
    }
}

type PairKey = (CountryCode, CountryCode, PointMode);
type Slot = OnceLock<Result<Arc<NormalSet>, String>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// Memoizes normal sets by unordered endpoint pair and mode.
///
/// Each pair is built once: the first thread to miss builds it while others
/// asking for the same pair wait, and different pairs build concurrently.
#[derive(Debug)]
pub struct PairCache {
    boundary_step_deg: f64,
    entries: RwLock<HashMap<PairKey, Arc<Slot>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl Default for PairCache {
    fn default() -> Self {
        Self::new(DEFAULT_BOUNDARY_STEP_DEG)
    }
}

impl PairCache {
    pub fn new(boundary_step_deg: f64) -> Self {
        Self {
            boundary_step_deg,
            entries: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_build(
        &self,
        w: &WorldModel,
        src: CountryCode,
        dst: CountryCode,
        mode: PointMode,
    ) -> Result<NormalSet, WorldError> {
        let key = if src <= dst {
            (src, dst, mode)
        } else {
            (dst, src, mode)
        };
        known(w, src)?;
        known(w, dst)?;
        let existing = self.entries.read().expect("cache lock").get(&key).cloned();
        let slot = match existing {
            Some(slot) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                slot
            }
            None => {
                let mut guard = self.entries.write().expect("cache lock");
                match guard.get(&key) {
                    Some(slot) => {
                        self.hits.fetch_add(1, Ordering::Relaxed);
                        slot.clone()
                    }
                    None => {
                        self.misses.fetch_add(1, Ordering::Relaxed);
                        let slot = Arc::new(Slot::new());
                        guard.insert(key, slot.clone());
                        slot
                    }
                }
            }
        };
        let cfg = NormalityConfig {
            mode,
            boundary_step_deg: self.boundary_step_deg,
        };
        let built = slot.get_or_init(|| {
            normal_set_with(w, key.0, key.1, &cfg)
                .map(Arc::new)
                .map_err(|e| e.to_string())
        });
        match built {
            Ok(ns) => Ok(ns.with_endpoints(src, dst)),
            Err(msg) => Err(WorldError::Validation(msg.clone())),
        }
    }
}

pub fn pair_cache_get_or_build(
    cache: &PairCache,
    w: &WorldModel,
    src: CountryCode,
    dst: CountryCode,
    mode: PointMode,
) -> Result<NormalSet, WorldError> {
    cache.get_or_build(w, src, dst, mode)
}
