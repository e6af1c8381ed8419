//! Country metadata: ISO codes, populous cities, border polygons and regions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::geometry::{GeoPoint, GeoPolygon, PreparedPolygon};

/// Number of cities per country used to define population-biased hulls.
pub const DEFAULT_HULL_CITIES: usize = 15;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("unknown country code {code}{}", suggestion_suffix(.suggestions))]
    UnknownCountry {
        code: String,
        suggestions: Vec<CountryCode>,
    },
}

fn suggestion_suffix(s: &[CountryCode]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        let list: Vec<String> = s.iter().map(|c| c.to_string()).collect();
        format!(" (did you mean {}?)", list.join(", "))
    }
}

/// Uppercase ISO 3166-1 alpha-2 code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode([u8; 2]);

impl CountryCode {
    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("ascii")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid country code {0:?}")]
pub struct InvalidCountryCode(pub String);

impl FromStr for CountryCode {
    type Err = InvalidCountryCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let b = t.as_bytes();
        if b.len() != 2 || !b.iter().all(u8::is_ascii_alphabetic) {
            return Err(InvalidCountryCode(s.to_string()));
        }
        Ok(Self([b[0].to_ascii_uppercase(), b[1].to_ascii_uppercase()]))
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CountryCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CountryCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    Africa,
    Americas,
    Asia,
    Europe,
    Oceania,
}

impl Region {
    pub const ALL: [Region; 5] = [
        Region::Africa,
        Region::Americas,
        Region::Asia,
        Region::Europe,
        Region::Oceania,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Region::Africa => "Africa",
            Region::Americas => "Americas",
            Region::Asia => "Asia",
            Region::Europe => "Europe",
            Region::Oceania => "Oceania",
        }
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Region::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown region {s:?}"))
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a country is represented when building a hull.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum PointMode {
    /// The country's most populous cities.
    #[default]
    Population,
    /// Every vertex of the country's border polygons.
    Border,
}

impl FromStr for PointMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "population" | "pop" | "city" => Ok(PointMode::Population),
            "border" | "borders" => Ok(PointMode::Border),
            _ => Err(format!(
                "unknown mode {s:?} (expected population or border)"
            )),
        }
    }
}

impl fmt::Display for PointMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointMode::Population => "population",
            PointMode::Border => "border",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct City {
    pub name: String,
    pub location: GeoPoint,
    pub population: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryRecord {
    pub iso2: CountryCode,
    pub name: String,
    pub region: Region,
    /// Sorted by descending population.
    pub cities: Vec<City>,
}

#[derive(Debug, Clone)]
pub struct CountryBorders {
    pub iso2: CountryCode,
    pub polygons: Vec<GeoPolygon>,
    prepared: Vec<PreparedPolygon>,
}

impl CountryBorders {
    pub fn new(iso2: CountryCode, polygons: Vec<GeoPolygon>) -> Result<Self, WorldError> {
        if polygons.is_empty() {
            return Err(WorldError::Validation(format!(
                "{iso2} has no border polygons"
            )));
        }
        let prepared = polygons
            .iter()
            .map(PreparedPolygon::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| WorldError::Validation(format!("{iso2} border: {e}")))?;
        Ok(Self {
            iso2,
            polygons,
            prepared,
        })
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        let u = p.to_unit();
        self.prepared.iter().any(|poly| poly.contains_unit(&u))
    }

    pub(crate) fn prepared(&self) -> &[PreparedPolygon] {
        &self.prepared
    }
}

/// Problems found while loading that do not stop the load.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadSummary {
    pub countries: usize,
    pub bordered_countries: usize,
    /// Present in the borders file only; used for partial containment.
    pub borders_only: Vec<CountryCode>,
    /// Present in the cities file only; no border test possible.
    pub cities_only: Vec<CountryCode>,
    /// Hull cities falling outside every polygon of their own country.
    pub cities_outside_borders: Vec<(CountryCode, String)>,
    /// Region rows for codes that appear in neither cities nor borders.
    pub unused_regions: Vec<CountryCode>,
}

#[derive(Debug, Clone)]
pub struct WorldModel {
    countries: BTreeMap<CountryCode, CountryRecord>,
    borders: BTreeMap<CountryCode, CountryBorders>,
    region_of: BTreeMap<CountryCode, Region>,
    hull_cities: usize,
}

impl WorldModel {
    /// Assembles and validates a model from in-memory parts.
    pub fn new(
        countries: Vec<CountryRecord>,
        borders: Vec<CountryBorders>,
    ) -> Result<Self, WorldError> {
        let mut by_code = BTreeMap::new();
        for mut c in countries {
            if c.cities.is_empty() {
                return Err(WorldError::Validation(format!("{} has no cities", c.iso2)));
            }
            c.cities
                .sort_by(|a, b| b.population.cmp(&a.population).then(a.name.cmp(&b.name)));
            if by_code.insert(c.iso2, c).is_some() {
                return Err(WorldError::Validation("duplicate country record".into()));
            }
        }
        let mut border_map = BTreeMap::new();
        for b in borders {
            let code = b.iso2;
            if border_map.insert(code, b).is_some() {
                return Err(WorldError::Validation(format!(
                    "duplicate borders for {code}"
                )));
            }
        }
        let region_of = by_code
            .values()
            .map(|c: &CountryRecord| (c.iso2, c.region))
            .collect();
        Ok(Self {
            countries: by_code,
            borders: border_map,
            region_of,
            hull_cities: DEFAULT_HULL_CITIES,
        })
    }

    /// Overrides how many top cities define a country (default 15).
    pub fn with_hull_cities(mut self, k: usize) -> Self {
        self.hull_cities = k.max(1);
        self
    }

    pub fn hull_cities(&self) -> usize {
        self.hull_cities
    }

    pub fn country(&self, code: CountryCode) -> Option<&CountryRecord> {
        self.countries.get(&code)
    }

    pub fn countries(&self) -> impl Iterator<Item = &CountryRecord> {
        self.countries.values()
    }

    pub fn borders(&self, code: CountryCode) -> Option<&CountryBorders> {
        self.borders.get(&code)
    }

    pub fn all_borders(&self) -> impl Iterator<Item = &CountryBorders> {
        self.borders.values()
    }

    pub fn region_of(&self, code: CountryCode) -> Option<Region> {
        self.region_of.get(&code).copied()
    }

    pub fn is_known(&self, code: CountryCode) -> bool {
        self.countries.contains_key(&code) || self.borders.contains_key(&code)
    }

    /// Every code with either cities or borders, sorted.
    pub fn codes(&self) -> BTreeSet<CountryCode> {
        self.countries
            .keys()
            .chain(self.borders.keys())
            .copied()
            .collect()
    }

    /// The `k` most populous cities of a country.
    pub fn hull_city_points(&self, code: CountryCode) -> impl Iterator<Item = GeoPoint> + '_ {
        self.countries.get(&code).into_iter().flat_map(|c| {
            c.cities
                .iter()
                .take(self.hull_cities)
                .map(|city| city.location)
        })
    }

    pub fn lookup(&self, code: &str) -> Result<CountryCode, WorldError> {
        let unknown = || WorldError::UnknownCountry {
            code: code.to_string(),
            suggestions: self.suggest(code),
        };
        let parsed: CountryCode = code.parse().map_err(|_| unknown())?;
        if self.is_known(parsed) {
            Ok(parsed)
        } else {
            Err(unknown())
        }
    }

    /// Known codes sharing a letter in the same position as `code`.
    pub fn suggest(&self, code: &str) -> Vec<CountryCode> {
        let up: Vec<u8> = code.trim().to_ascii_uppercase().into_bytes();
        let mut scored: Vec<(usize, CountryCode)> = self
            .codes()
            .into_iter()
            .filter_map(|c| {
                let same = c
                    .as_str()
                    .bytes()
                    .zip(up.iter())
                    .filter(|(a, b)| a == *b)
                    .count();
                (same > 0).then_some((same, c))
            })
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        scored.into_iter().take(5).map(|(_, c)| c).collect()
    }

    pub fn summary(&self) -> LoadSummary {
        let mut s = LoadSummary {
            countries: self.countries.len(),
            bordered_countries: self.borders.len(),
            ..Default::default()
        };
        s.borders_only = self
            .borders
            .keys()
            .filter(|c| !self.countries.contains_key(c))
            .copied()
            .collect();
        s.cities_only = self
            .countries
            .keys()
            .filter(|c| !self.borders.contains_key(c))
            .copied()
            .collect();
        for rec in self.countries.values() {
            let Some(b) = self.borders.get(&rec.iso2) else {
                continue;
            };
            for city in rec.cities.iter().take(self.hull_cities) {
                if !b.contains(city.location) {
                    s.cities_outside_borders.push((rec.iso2, city.name.clone()));
                }
            }
        }
        s
    }
}

/// Points that stand in for a country when building a hull.
pub fn country_points(
    w: &WorldModel,
    code: CountryCode,
    mode: PointMode,
) -> Result<Vec<GeoPoint>, WorldError> {
    if !w.is_known(code) {
        return Err(WorldError::UnknownCountry {
            code: code.to_string(),
            suggestions: w.suggest(code.as_str()),
        });
    }
    Ok(match mode {
        PointMode::Population => w.hull_city_points(code).collect(),
        PointMode::Border => w
            .borders(code)
            .map(|b| {
                b.polygons
                    .iter()
                    .flat_map(|p| p.vertices().copied())
                    .collect()
            })
            .unwrap_or_default(),
    })
}

fn read_text(path: &Path) -> Result<String, WorldError> {
    let io = |source| WorldError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut text = String::new();
    File::open(path)
        .map_err(io)?
        .read_to_string(&mut text)
        .map_err(io)?;
    Ok(text)
}

fn parse_err(label: &str, line: u64, message: impl Into<String>) -> WorldError {
    WorldError::Parse {
        path: label.to_string(),
        line,
        message: message.into(),
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

fn row_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

/// Parses `iso2,name,lat,lon,population` rows (header required), grouped
/// by country. `label` names the source in errors.
pub fn parse_cities(
    text: &str,
    label: &str,
) -> Result<BTreeMap<CountryCode, Vec<City>>, WorldError> {
    let mut rdr = csv_reader(text);
    let mut out: BTreeMap<CountryCode, Vec<City>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(label, line, e.to_string())
        })?;
        let line = row_line(&rec);
        if rec.len() < 5 {
            return Err(parse_err(
                label,
                line,
                format!("expected 5 fields, found {}", rec.len()),
            ));
        }
        let code: CountryCode = rec[0]
            .parse()
            .map_err(|e| parse_err(label, line, format!("{e}")))?;
        let num = |i: usize, what: &str| -> Result<f64, WorldError> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| parse_err(label, line, format!("bad {what} {:?}", &rec[i])))
        };
        let (lat, lon) = (num(2, "latitude")?, num(3, "longitude")?);
        let location = GeoPoint::new(lat, lon)
            .map_err(|e| parse_err(label, line, format!("city {:?}: {e}", &rec[1])))?;
        let population: u64 = rec[4]
            .parse()
            .map_err(|_| parse_err(label, line, format!("bad population {:?}", &rec[4])))?;
        out.entry(code).or_default().push(City {
            name: rec[1].to_string(),
            location,
            population,
        });
    }
    Ok(out)
}

/// Parses `iso2,region` rows (header required).
pub fn parse_regions(text: &str, label: &str) -> Result<BTreeMap<CountryCode, Region>, WorldError> {
    let mut rdr = csv_reader(text);
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(label, 0, e.to_string()))?;
        let line = row_line(&rec);
        if rec.len() < 2 {
            return Err(parse_err(label, line, "expected iso2,region"));
        }
        let code: CountryCode = rec[0]
            .parse()
            .map_err(|e| parse_err(label, line, format!("{e}")))?;
        let region: Region = rec[1]
            .parse()
            .map_err(|e: String| parse_err(label, line, e))?;
        if let Some(prev) = out.insert(code, region) {
            if prev != region {
                return Err(parse_err(
                    label,
                    line,
                    format!("{code} assigned to both {prev} and {region}"),
                ));
            }
        }
    }
    Ok(out)
}

/// Border features read from a GeoJSON FeatureCollection.
#[derive(Debug, Clone)]
pub struct BorderFeature {
    pub iso2: CountryCode,
    pub name: Option<String>,
    pub polygons: Vec<GeoPolygon>,
}

fn ring_from_json(v: &Value) -> Result<Vec<GeoPoint>, String> {
    let arr = v.as_array().ok_or("ring is not an array")?;
    arr.iter()
        .map(|pos| {
            let p = pos.as_array().ok_or("position is not an array")?;
            let lon = p
                .first()
                .and_then(Value::as_f64)
                .ok_or("missing longitude")?;
            let lat = p.get(1).and_then(Value::as_f64).ok_or("missing latitude")?;
            GeoPoint::new(lat, lon).map_err(|e| e.to_string())
        })
        .collect()
}

fn polygon_from_json(v: &Value) -> Result<GeoPolygon, String> {
    let rings = v
        .as_array()
        .ok_or("polygon is not an array")?
        .iter()
        .map(ring_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    GeoPolygon::new(rings).map_err(|e| e.to_string())
}

/// Parses a GeoJSON FeatureCollection of Polygon / MultiPolygon features,
/// each carrying an `iso2` property. Features with the same code merge.
pub fn parse_borders_geojson(text: &str) -> Result<Vec<BorderFeature>, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or("expected a FeatureCollection")?;
    let mut merged: BTreeMap<CountryCode, BorderFeature> = BTreeMap::new();
    for (i, f) in features.iter().enumerate() {
        let ctx = |m: String| format!("feature {i}: {m}");
        let props = f
            .get("properties")
            .ok_or_else(|| ctx("no properties".into()))?;
        let code = props
            .get("iso2")
            .or_else(|| props.get("ISO_A2"))
            .and_then(Value::as_str)
            .ok_or_else(|| ctx("no iso2 property".into()))?;
        let code: CountryCode = code.parse().map_err(|e| ctx(format!("{e}")))?;
        let name = props
            .get("name")
            .and_then(Value::as_str)
            .map(str::to_string);
        let geom = f.get("geometry").ok_or_else(|| ctx("no geometry".into()))?;
        let coords = geom
            .get("coordinates")
            .ok_or_else(|| ctx("no coordinates".into()))?;
        let polygons = match geom.get("type").and_then(Value::as_str) {
            Some("Polygon") => vec![polygon_from_json(coords).map_err(ctx)?],
            Some("MultiPolygon") => coords
                .as_array()
                .ok_or_else(|| ctx("MultiPolygon coordinates not an array".into()))?
                .iter()
                .map(polygon_from_json)
                .collect::<Result<Vec<_>, _>>()
                .map_err(ctx)?,
            other => return Err(ctx(format!("unsupported geometry type {other:?}"))),
        };
        let entry = merged.entry(code).or_insert_with(|| BorderFeature {
            iso2: code,
            name: None,
            polygons: Vec::new(),
        });
        if entry.name.is_none() {
            entry.name = name;
        }
        entry.polygons.extend(polygons);
    }
    Ok(merged.into_values().collect())
}

/// Raw contents of the three world inputs, each with a label for errors.
#[derive(Debug, Clone, Copy)]
pub struct WorldTexts<'a> {
    pub cities: (&'a str, &'a str),
    pub borders: (&'a str, &'a str),
    pub regions: (&'a str, &'a str),
}

/// Builds a validated model from the text of the three inputs.
pub fn world_from_texts(t: WorldTexts<'_>) -> Result<(WorldModel, LoadSummary), WorldError> {
    let cities = parse_cities(t.cities.1, t.cities.0)?;
    let features = parse_borders_geojson(t.borders.1).map_err(|m| parse_err(t.borders.0, 0, m))?;
    let regions = parse_regions(t.regions.1, t.regions.0)?;

    let names: BTreeMap<CountryCode, String> = features
        .iter()
        .filter_map(|f| f.name.clone().map(|n| (f.iso2, n)))
        .collect();
    let mut records = Vec::with_capacity(cities.len());
    for (code, list) in cities {
        let region = regions.get(&code).copied().ok_or_else(|| {
            WorldError::Validation(format!("{code} has cities but no row in {}", t.regions.0))
        })?;
        records.push(CountryRecord {
            iso2: code,
            name: names
                .get(&code)
                .cloned()
                .unwrap_or_else(|| code.to_string()),
            region,
            cities: list,
        });
    }
    let borders = features
        .into_iter()
        .map(|f| CountryBorders::new(f.iso2, f.polygons))
        .collect::<Result<Vec<_>, _>>()?;
    let mut world = WorldModel::new(records, borders)?;
    for (code, region) in &regions {
        if world.borders.contains_key(code) {
            world.region_of.entry(*code).or_insert(*region);
        }
    }
    let mut summary = world.summary();
    summary.unused_regions = regions
        .keys()
        .filter(|c| !world.is_known(**c))
        .copied()
        .collect();
    Ok((world, summary))
}

/// Loads cities, borders and regions and cross-validates them.
pub fn load_world(
    cities_file: &Path,
    borders_file: &Path,
    regions_file: &Path,
) -> Result<(WorldModel, LoadSummary), WorldError> {
    let (c, b, r) = (
        read_text(cities_file)?,
        read_text(borders_file)?,
        read_text(regions_file)?,
    );
    let (cl, bl, rl) = (
        cities_file.display().to_string(),
        borders_file.display().to_string(),
        regions_file.display().to_string(),
    );
    world_from_texts(WorldTexts {
        cities: (&cl, &c),
        borders: (&bl, &b),
        regions: (&rl, &r),
    })
}

pub(crate) const BUNDLED_CITIES: &str = include_str!("../data/world/cities.csv");
pub(crate) const BUNDLED_BORDERS: &str = include_str!("../data/world/borders.geojson");
pub(crate) const BUNDLED_REGIONS: &str = include_str!("../data/world/regions.csv");

/// The world data shipped with the crate: Natural Earth 1:110m borders and
/// the 30 largest GeoNames cities of each country.
pub fn bundled_world() -> Result<(WorldModel, LoadSummary), WorldError> {
    world_from_texts(WorldTexts {
        cities: ("<bundled cities.csv>", BUNDLED_CITIES),
        borders: ("<bundled borders.geojson>", BUNDLED_BORDERS),
        regions: ("<bundled regions.csv>", BUNDLED_REGIONS),
    })
}
