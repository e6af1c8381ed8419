//! Great-circle primitives and spherical convex hulls.
//!
//! Everything below works on unit vectors. Longitudes only appear when a
//! [`GeoPoint`] is created or rendered, so the antimeridian never shows up in
//! a predicate.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for unit-norm checks.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Angular tolerance (radians) for boundary membership.
pub const BOUNDARY_TOLERANCE: f64 = 1e-7;
/// Points closer than this (radians) are merged before building a hull.
pub const DEDUP_TOLERANCE: f64 = 1e-9;
/// Default spacing of boundary samples, in degrees of arc.
pub const DEFAULT_BOUNDARY_STEP_DEG: f64 = 0.05;

/// Minimum cosine between the projection center and any hull input point.
const HEMISPHERE_MARGIN: f64 = 1e-6;
/// Sine of the turn angle below which three projected points are collinear.
const COLLINEAR_SINE: f64 = 1e-12;
const PERCEPTRON_ROUNDS: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("latitude {0} outside [-90, 90]")]
    InvalidLatitude(f64),
    #[error("longitude {0} is not finite")]
    InvalidLongitude(f64),
    #[error("cannot build a hull from an empty point set")]
    EmptyInput,
    #[error("points do not fit in an open hemisphere ({a} and {b} are {separation_deg:.3} degrees apart)")]
    HemisphereViolation {
        a: GeoPoint,
        b: GeoPoint,
        separation_deg: f64,
    },
    #[error("ring has {0} distinct points, need at least 3")]
    DegenerateRing(usize),
    #[error("ring does not fit in an open hemisphere")]
    RingTooLarge,
    #[error("boundary step must be positive, got {0}")]
    InvalidStep(f64),
}

/// A position on the Earth in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    /// Validates the latitude and normalizes the longitude into (-180, 180].
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeometryError> {
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(GeometryError::InvalidLatitude(lat));
        }
        if !lon.is_finite() {
            return Err(GeometryError::InvalidLongitude(lon));
        }
        Ok(Self {
            lat,
            lon: normalize_lon(lon),
        })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    pub fn to_unit(&self) -> UnitVec3 {
        geo_to_unit(*self)
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.5}, {:.5})", self.lat, self.lon)
    }
}

fn normalize_lon(lon: f64) -> f64 {
    let mut l = lon % 360.0;
    if l <= -180.0 {
        l += 360.0;
    } else if l > 180.0 {
        l -= 360.0;
    }
    l
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVec3 {
    /// Normalizes `(x, y, z)`; `None` for the zero vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Option<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if n < 1e-300 || !n.is_finite() {
            return None;
        }
        Some(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn dot(&self, o: &UnitVec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Raw cross product (not normalized).
    pub fn cross(&self, o: &UnitVec3) -> [f64; 3] {
        [
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        ]
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Great-circle distance in radians.
    pub fn angle_to(&self, o: &UnitVec3) -> f64 {
        let c = self.cross(o);
        let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        s.atan2(self.dot(o))
    }

    pub fn to_geo(&self) -> GeoPoint {
        let lat = self.z.clamp(-1.0, 1.0).asin().to_degrees();
        let lon = if self.x.abs() < 1e-15 && self.y.abs() < 1e-15 {
            0.0
        } else {
            self.y.atan2(self.x).to_degrees()
        };
        GeoPoint {
            lat,
            lon: normalize_lon(lon),
        }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

pub fn geo_to_unit(p: GeoPoint) -> UnitVec3 {
    let (lat, lon) = (p.lat.to_radians(), p.lon.to_radians());
    UnitVec3 {
        x: lat.cos() * lon.cos(),
        y: lat.cos() * lon.sin(),
        z: lat.sin(),
    }
}

fn dot3(a: &[f64; 3], b: &UnitVec3) -> f64 {
    a[0] * b.x + a[1] * b.y + a[2] * b.z
}

fn unit_of(a: [f64; 3]) -> Option<UnitVec3> {
    UnitVec3::normalized(a[0], a[1], a[2])
}

/// Spherical interpolation between `a` and `b` at fraction `t`.
fn slerp(a: &UnitVec3, b: &UnitVec3, t: f64) -> UnitVec3 {
    let omega = a.angle_to(b);
    if omega < 1e-15 {
        return *a;
    }
    let s = omega.sin();
    let wa = ((1.0 - t) * omega).sin() / s;
    let wb = (t * omega).sin() / s;
    UnitVec3::normalized(
        wa * a.x + wb * b.x,
        wa * a.y + wb * b.y,
        wa * a.z + wb * b.z,
    )
    .unwrap_or(*a)
}

/// Angular distance (radians) from `p` to the minor arc `a`→`b`.
pub(crate) fn distance_to_arc(p: &UnitVec3, a: &UnitVec3, b: &UnitVec3) -> f64 {
    let Some(n) = unit_of(a.cross(b)) else {
        return p.angle_to(a);
    };
    let off = dot3(&n.as_array(), p);
    // foot of the perpendicular on the great circle
    let foot = unit_of([p.x - off * n.x, p.y - off * n.y, p.z - off * n.z]);
    if let Some(q) = foot {
        let within = dot3(&a.cross(&q), &n) >= 0.0 && dot3(&q.cross(b), &n) >= 0.0;
        if within {
            return off.abs().asin();
        }
    }
    p.angle_to(a).min(p.angle_to(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullKind {
    Polygon,
    Arc,
    Point,
}

/// A convex region of the sphere, smaller than a hemisphere.
///
/// For [`HullKind::Polygon`] the ring is counterclockwise seen from outside
/// the sphere, so the interior lies to the left of every edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalHull {
    vertices: Vec<UnitVec3>,
    centroid: UnitVec3,
    kind: HullKind,
    /// Unit inward normals of the edge great circles (polygons only).
    #[serde(skip)]
    edge_normals: Vec<UnitVec3>,
}

impl SphericalHull {
    pub fn vertices(&self) -> &[UnitVec3] {
        &self.vertices
    }

    pub fn vertices_geo(&self) -> Vec<GeoPoint> {
        self.vertices.iter().map(UnitVec3::to_geo).collect()
    }

    pub fn centroid(&self) -> UnitVec3 {
        self.centroid
    }

    pub fn kind(&self) -> HullKind {
        self.kind
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        self.contains_unit(&geo_to_unit(p))
    }

    pub fn contains_unit(&self, p: &UnitVec3) -> bool {
        match self.kind {
            HullKind::Point => p.angle_to(&self.vertices[0]) <= BOUNDARY_TOLERANCE,
            HullKind::Arc => {
                distance_to_arc(p, &self.vertices[0], &self.vertices[1]) <= BOUNDARY_TOLERANCE
            }
            HullKind::Polygon => {
                if p.dot(&self.centroid) <= 0.0 {
                    return false;
                }
                // sin of the signed angular distance to each edge circle
                self.edge_normals
                    .iter()
                    .all(|n| n.dot(p) >= -BOUNDARY_TOLERANCE.sin())
            }
        }
    }

    /// Points along every edge at angular spacing no larger than `step_deg`,
    /// vertices included.
    pub fn boundary_samples(&self, step_deg: f64) -> Result<Vec<UnitVec3>, GeometryError> {
        if !(step_deg.is_finite() && step_deg > 0.0) {
            return Err(GeometryError::InvalidStep(step_deg));
        }
        let step = step_deg.to_radians();
        let mut out = Vec::new();
        let push_edge = |a: &UnitVec3, b: &UnitVec3, out: &mut Vec<UnitVec3>| {
            let angle = a.angle_to(b);
            let n = ((angle / step) - 1e-9).ceil().max(1.0) as usize;
            for k in 0..n {
                out.push(slerp(a, b, k as f64 / n as f64));
            }
        };
        match self.kind {
            HullKind::Point => out.push(self.vertices[0]),
            HullKind::Arc => {
                push_edge(&self.vertices[0], &self.vertices[1], &mut out);
                out.push(self.vertices[1]);
            }
            HullKind::Polygon => {
                let n = self.vertices.len();
                for i in 0..n {
                    push_edge(&self.vertices[i], &self.vertices[(i + 1) % n], &mut out);
                }
            }
        }
        Ok(out)
    }
}

pub fn hull_contains(h: &SphericalHull, p: GeoPoint) -> bool {
    h.contains(p)
}

pub fn hull_boundary_samples(
    h: &SphericalHull,
    step_deg: f64,
) -> Result<Vec<GeoPoint>, GeometryError> {
    Ok(h.boundary_samples(step_deg)?
        .iter()
        .map(UnitVec3::to_geo)
        .collect())
}

pub fn spherical_convex_hull(points: &[GeoPoint]) -> Result<SphericalHull, GeometryError> {
    let units: Vec<UnitVec3> = points.iter().map(|p| geo_to_unit(*p)).collect();
    convex_hull_of_units(&units)
}

fn dedup(points: &[UnitVec3]) -> Vec<UnitVec3> {
    let mut out: Vec<UnitVec3> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| q.angle_to(p) <= DEDUP_TOLERANCE) {
            out.push(*p);
        }
    }
    out
}

/// Finds a center whose open hemisphere holds every point with some margin.
fn hemisphere_center(points: &[UnitVec3]) -> Option<UnitVec3> {
    let (sx, sy, sz) = points
        .iter()
        .fold((0.0, 0.0, 0.0), |(x, y, z), p| (x + p.x, y + p.y, z + p.z));
    let mut c = UnitVec3::normalized(sx, sy, sz).unwrap_or(points[0]);
    for _ in 0..PERCEPTRON_ROUNDS {
        let worst = points
            .iter()
            .min_by(|a, b| a.dot(&c).total_cmp(&b.dot(&c)))
            .expect("non-empty");
        if worst.dot(&c) > HEMISPHERE_MARGIN {
            return Some(c);
        }
        c = UnitVec3::normalized(c.x + worst.x, c.y + worst.y, c.z + worst.z)?;
    }
    None
}

fn hemisphere_witness(points: &[UnitVec3]) -> GeometryError {
    let mut best = (0, 0, f64::INFINITY);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[i].dot(&points[j]);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    let (i, j, _) = best;
    GeometryError::HemisphereViolation {
        a: points[i].to_geo(),
        b: points[j].to_geo(),
        separation_deg: points[i].angle_to(&points[j]).to_degrees(),
    }
}

/// Orthonormal tangent basis at `c` with `e1 × e2 = c`.
fn tangent_basis(c: &UnitVec3) -> (UnitVec3, UnitVec3) {
    let helper = if c.z.abs() < 0.9 {
        UnitVec3 {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    } else {
        UnitVec3 {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        }
    };
    let e1 = unit_of(helper.cross(c)).expect("helper is not parallel to center");
    let e2 = unit_of(c.cross(&e1)).expect("orthogonal");
    (e1, e2)
}

/// Gnomonic projection onto the plane tangent at a center point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Gnomonic {
    center: UnitVec3,
    e1: UnitVec3,
    e2: UnitVec3,
}

impl Gnomonic {
    pub(crate) fn new(center: UnitVec3) -> Self {
        let (e1, e2) = tangent_basis(&center);
        Self { center, e1, e2 }
    }

    /// `None` when `p` is not in the open hemisphere around the center.
    pub(crate) fn project(&self, p: &UnitVec3) -> Option<(f64, f64)> {
        let d = p.dot(&self.center);
        if d <= 0.0 {
            return None;
        }
        Some((p.dot(&self.e1) / d, p.dot(&self.e2) / d))
    }
}

fn turn(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn is_left_turn(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    let la = (a.0 - o.0).hypot(a.1 - o.1);
    let lb = (b.0 - o.0).hypot(b.1 - o.1);
    turn(o, a, b) > COLLINEAR_SINE * la * lb
}

pub(crate) fn convex_hull_of_units(points: &[UnitVec3]) -> Result<SphericalHull, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    let pts = dedup(points);
    if pts.len() == 1 {
        return Ok(SphericalHull {
            vertices: pts.clone(),
            centroid: pts[0],
            kind: HullKind::Point,
            edge_normals: Vec::new(),
        });
    }
    let center = hemisphere_center(&pts).ok_or_else(|| hemisphere_witness(&pts))?;
    let proj = Gnomonic::new(center);
    let planar: Vec<(f64, f64)> = pts
        .iter()
        .map(|p| proj.project(p).expect("checked against hemisphere margin"))
        .collect();

    // Andrew's monotone chain
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| {
        planar[i]
            .0
            .total_cmp(&planar[j].0)
            .then(planar[i].1.total_cmp(&planar[j].1))
    });
    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2
            && !is_left_turn(
                planar[lower[lower.len() - 2]],
                planar[lower[lower.len() - 1]],
                planar[i],
            )
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2
            && !is_left_turn(
                planar[upper[upper.len() - 2]],
                planar[upper[upper.len() - 1]],
                planar[i],
            )
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    let mut ring = lower;
    ring.extend(upper);

    if ring.len() <= 2 {
        // all points on one great circle: the extremes of the sort span the arc
        let a = pts[order[0]];
        let b = pts[*order.last().expect("non-empty")];
        let mid = UnitVec3::normalized(a.x + b.x, a.y + b.y, a.z + b.z).unwrap_or(center);
        return Ok(SphericalHull {
            vertices: vec![a, b],
            centroid: mid,
            kind: HullKind::Arc,
            edge_normals: Vec::new(),
        });
    }

    let vertices: Vec<UnitVec3> = ring.iter().map(|&i| pts[i]).collect();
    let n = vertices.len();
    let edge_normals = (0..n)
        .map(|i| unit_of(vertices[i].cross(&vertices[(i + 1) % n])).expect("distinct vertices"))
        .collect();
    Ok(SphericalHull {
        vertices,
        centroid: center,
        kind: HullKind::Polygon,
        edge_normals,
    })
}

/// A polygon with optional holes; the first ring is the outer boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoPolygon {
    rings: Vec<Vec<GeoPoint>>,
}

impl GeoPolygon {
    /// Drops a repeated closing point and requires at least three distinct
    /// points per ring.
    pub fn new(rings: Vec<Vec<GeoPoint>>) -> Result<Self, GeometryError> {
        if rings.is_empty() {
            return Err(GeometryError::DegenerateRing(0));
        }
        let mut out = Vec::with_capacity(rings.len());
        for mut ring in rings {
            while ring.len() > 1 && ring.first() == ring.last() {
                ring.pop();
            }
            let distinct = dedup(&ring.iter().map(|p| p.to_unit()).collect::<Vec<_>>()).len();
            if distinct < 3 {
                return Err(GeometryError::DegenerateRing(distinct));
            }
            out.push(ring);
        }
        Ok(Self { rings: out })
    }

    pub fn rings(&self) -> &[Vec<GeoPoint>] {
        &self.rings
    }

    pub fn outer(&self) -> &[GeoPoint] {
        &self.rings[0]
    }

    pub fn holes(&self) -> &[Vec<GeoPoint>] {
        &self.rings[1..]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &GeoPoint> {
        self.rings.iter().flatten()
    }
}

/// A ring projected about its own center, ready for repeated point tests.
#[derive(Debug, Clone)]
struct PreparedRing {
    units: Vec<UnitVec3>,
    planar: Vec<(f64, f64)>,
    proj: Gnomonic,
    /// Points with a smaller dot product with the center are outside the
    /// padded covering cap.
    cap_min_dot: f64,
    /// Unit normal of each edge's great circle; `None` for degenerate edges.
    edge_normals: Vec<Option<UnitVec3>>,
}

impl PreparedRing {
    fn new(ring: &[GeoPoint]) -> Result<Self, GeometryError> {
        let units: Vec<UnitVec3> = ring.iter().map(|p| p.to_unit()).collect();
        let center = hemisphere_center(&units).ok_or(GeometryError::RingTooLarge)?;
        let proj = Gnomonic::new(center);
        let planar = units
            .iter()
            .map(|u| proj.project(u).ok_or(GeometryError::RingTooLarge))
            .collect::<Result<Vec<_>, _>>()?;
        let cap_cos = units.iter().map(|u| u.dot(&center)).fold(1.0_f64, f64::min);
        // pad by the boundary tolerance so edge points are not filtered out
        let radius = cap_cos.clamp(-1.0, 1.0).acos() + 2.0 * BOUNDARY_TOLERANCE;
        let n = units.len();
        let edge_normals = (0..n)
            .map(|i| unit_of(units[i].cross(&units[(i + 1) % n])))
            .collect();
        Ok(Self {
            units,
            planar,
            proj,
            cap_min_dot: radius.min(std::f64::consts::PI).cos(),
            edge_normals,
        })
    }

    fn near_cap(&self, p: &UnitVec3) -> bool {
        p.dot(&self.proj.center) >= self.cap_min_dot
    }

    fn on_boundary(&self, p: &UnitVec3) -> bool {
        let n = self.units.len();
        let sin_tol = BOUNDARY_TOLERANCE.sin();
        (0..n).any(|i| {
            if let Some(normal) = &self.edge_normals[i] {
                // farther from the great circle than the tolerance
                if normal.dot(p).abs() > sin_tol {
                    return false;
                }
            }
            distance_to_arc(p, &self.units[i], &self.units[(i + 1) % n]) <= BOUNDARY_TOLERANCE
        })
    }

    /// Even-odd crossing test in the tangent plane.
    fn strictly_inside(&self, p: &UnitVec3) -> bool {
        let Some((x, y)) = self.proj.project(p) else {
            return false;
        };
        let n = self.planar.len();
        let mut inside = false;
        for i in 0..n {
            let (x1, y1) = self.planar[i];
            let (x2, y2) = self.planar[(i + 1) % n];
            if (y1 > y) != (y2 > y) {
                let xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1);
                if x < xc {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// A [`GeoPolygon`] with its rings projected for fast containment queries.
#[derive(Debug, Clone)]
pub struct PreparedPolygon {
    outer: PreparedRing,
    holes: Vec<PreparedRing>,
}

impl PreparedPolygon {
    pub fn new(poly: &GeoPolygon) -> Result<Self, GeometryError> {
        Ok(Self {
            outer: PreparedRing::new(poly.outer())?,
            holes: poly
                .holes()
                .iter()
                .map(|r| PreparedRing::new(r))
                .collect::<Result<_, _>>()?,
        })
    }

    /// Points on any ring edge count as inside.
    pub fn contains_unit(&self, p: &UnitVec3) -> bool {
        if !self.outer.near_cap(p) {
            return false;
        }
        if !self.outer.strictly_inside(p) {
            return self.outer.on_boundary(p);
        }
        !self
            .holes
            .iter()
            .any(|hole| hole.near_cap(p) && hole.strictly_inside(p) && !hole.on_boundary(p))
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        self.contains_unit(&p.to_unit())
    }
}

pub fn polygon_contains(poly: &GeoPolygon, p: GeoPoint) -> Result<bool, GeometryError> {
    Ok(PreparedPolygon::new(poly)?.contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    fn close(a: UnitVec3, b: [f64; 3]) -> bool {
        (a.x - b[0]).abs() < 1e-12 && (a.y - b[1]).abs() < 1e-12 && (a.z - b[2]).abs() < 1e-12
    }

    #[test]
    fn embedding_axes() {
        assert!(close(geo_to_unit(gp(0.0, 0.0)), [1.0, 0.0, 0.0]));
        assert!(close(geo_to_unit(gp(90.0, 0.0)), [0.0, 0.0, 1.0]));
        assert!(close(geo_to_unit(gp(0.0, 90.0)), [0.0, 1.0, 0.0]));
    }

    #[test]
    fn longitude_normalization() {
        assert_eq!(gp(0.0, 180.0).lon(), 180.0);
        assert_eq!(gp(0.0, -180.0).lon(), 180.0);
        assert_eq!(gp(0.0, 190.0).lon(), -170.0);
        assert_eq!(gp(0.0, 540.0).lon(), 180.0);
        assert!(GeoPoint::new(95.0, 0.0).is_err());
        assert!(GeoPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn single_point_hull() {
        let h = spherical_convex_hull(&[gp(10.0, 20.0)]).unwrap();
        assert_eq!(h.kind(), HullKind::Point);
        assert!(h.contains(gp(10.0, 20.0)));
        assert!(!h.contains(gp(10.001, 20.0)));
        let s = hull_boundary_samples(&h, 0.1).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn duplicates_collapse_to_point() {
        let h = spherical_convex_hull(&[gp(1.0, 1.0), gp(1.0, 1.0), gp(1.0, 1.0)]).unwrap();
        assert_eq!(h.kind(), HullKind::Point);
    }

    #[test]
    fn empty_input() {
        assert_eq!(spherical_convex_hull(&[]), Err(GeometryError::EmptyInput));
    }

    #[test]
    fn antipodal_points_violate_hemisphere() {
        let err =
            spherical_convex_hull(&[gp(0.0, 0.0), gp(0.0, 180.0), gp(10.0, 90.0)]).unwrap_err();
        match err {
            GeometryError::HemisphereViolation { separation_deg, .. } => {
                assert!((separation_deg - 180.0).abs() < 1e-6)
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn skewed_cluster_still_fits_hemisphere() {
        // mean sits near the cluster, but a far point is still inside some hemisphere
        let mut pts: Vec<GeoPoint> = (0..50).map(|i| gp(0.0, i as f64 * 0.01)).collect();
        pts.push(gp(0.0, 120.0));
        pts.push(gp(5.0, 60.0));
        let h = spherical_convex_hull(&pts).unwrap();
        for p in &pts {
            assert!(h.contains(*p));
        }
    }

    #[test]
    fn collinear_points_make_an_arc() {
        let h = spherical_convex_hull(&[gp(0.0, 0.0), gp(0.0, 5.0), gp(0.0, 10.0)]).unwrap();
        assert_eq!(h.kind(), HullKind::Arc);
        assert!(h.contains(gp(0.0, 7.5)));
        assert!(!h.contains(gp(0.5, 7.5)));
        assert!(!h.contains(gp(0.0, 10.5)));
    }

    #[test]
    fn triangle_contains_edge_midpoints() {
        let verts = [gp(0.0, 0.0), gp(0.0, 10.0), gp(10.0, 0.0)];
        let h = spherical_convex_hull(&verts).unwrap();
        assert_eq!(h.kind(), HullKind::Polygon);
        for i in 0..3 {
            let a = verts[i].to_unit();
            let b = verts[(i + 1) % 3].to_unit();
            let mid = UnitVec3::normalized(a.x + b.x, a.y + b.y, a.z + b.z).unwrap();
            assert!(h.contains_unit(&mid));
        }
        assert!(h.contains(gp(2.0, 2.0)));
        assert!(!h.contains(gp(-5.0, -5.0)));
        for v in &verts {
            assert!(h.contains(*v));
        }
    }

    #[test]
    fn interior_points_are_not_vertices() {
        let h = spherical_convex_hull(&[
            gp(0.0, 0.0),
            gp(0.0, 10.0),
            gp(10.0, 10.0),
            gp(10.0, 0.0),
            gp(5.0, 5.0),
        ])
        .unwrap();
        assert_eq!(h.vertices().len(), 4);
    }

    #[test]
    fn polygon_ring_is_counterclockwise_from_outside() {
        let h = spherical_convex_hull(&[gp(0.0, 0.0), gp(0.0, 10.0), gp(10.0, 0.0), gp(8.0, 9.0)])
            .unwrap();
        let v = h.vertices();
        let n = v.len();
        for i in 0..n {
            let turn = dot3(&v[i].cross(&v[(i + 1) % n]), &v[(i + 2) % n]);
            assert!(turn > 0.0);
        }
    }

    #[test]
    fn arc_boundary_sampling_counts() {
        let h = spherical_convex_hull(&[gp(0.0, 0.0), gp(0.0, 1.0)]).unwrap();
        assert_eq!(h.kind(), HullKind::Arc);
        let s = hull_boundary_samples(&h, 0.25).unwrap();
        assert_eq!(s.len(), 5);
        assert!((s[0].lon() - 0.0).abs() < 1e-9);
        assert!((s[4].lon() - 1.0).abs() < 1e-9);
        assert!(hull_boundary_samples(&h, 0.0).is_err());
    }

    #[test]
    fn triangle_boundary_samples_are_contained_and_spaced() {
        let h = spherical_convex_hull(&[gp(0.0, 0.0), gp(0.0, 10.0), gp(10.0, 0.0)]).unwrap();
        let s = h.boundary_samples(0.1).unwrap();
        for p in &s {
            assert!(h.contains_unit(p));
        }
        let step = 0.1_f64.to_radians();
        for w in s.windows(2) {
            assert!(w[0].angle_to(&w[1]) <= step + 1e-12);
        }
        for v in h.vertices() {
            assert!(s.iter().any(|p| p.angle_to(v) < 1e-12));
        }
    }

    fn square(half: f64) -> Vec<GeoPoint> {
        vec![
            gp(-half, -half),
            gp(-half, half),
            gp(half, half),
            gp(half, -half),
        ]
    }

    #[test]
    fn square_polygon() {
        let poly = GeoPolygon::new(vec![square(1.0)]).unwrap();
        assert!(polygon_contains(&poly, gp(0.0, 0.0)).unwrap());
        assert!(!polygon_contains(&poly, gp(5.0, 5.0)).unwrap());
        // vertices and edges count as inside
        assert!(polygon_contains(&poly, gp(1.0, 1.0)).unwrap());
        assert!(polygon_contains(&poly, gp(0.0, 1.0)).unwrap());
    }

    #[test]
    fn polygon_with_hole() {
        let poly = GeoPolygon::new(vec![square(10.0), square(1.0)]).unwrap();
        assert!(!polygon_contains(&poly, gp(0.0, 0.0)).unwrap());
        assert!(polygon_contains(&poly, gp(5.0, 0.0)).unwrap());
        assert!(polygon_contains(&poly, gp(1.0, 1.0)).unwrap());
        assert!(!polygon_contains(&poly, gp(20.0, 0.0)).unwrap());
    }

    #[test]
    fn polygon_across_antimeridian() {
        let ring = vec![
            gp(-5.0, 175.0),
            gp(-5.0, -175.0),
            gp(5.0, -175.0),
            gp(5.0, 175.0),
        ];
        let poly = GeoPolygon::new(vec![ring]).unwrap();
        assert!(polygon_contains(&poly, gp(0.0, 180.0)).unwrap());
        assert!(polygon_contains(&poly, gp(0.0, -178.0)).unwrap());
        assert!(!polygon_contains(&poly, gp(0.0, 0.0)).unwrap());
        assert!(!polygon_contains(&poly, gp(0.0, 170.0)).unwrap());
    }

    #[test]
    fn polygon_around_pole() {
        let ring: Vec<GeoPoint> = (0..36)
            .map(|i| gp(-70.0, -180.0 + 10.0 * i as f64))
            .collect();
        let poly = GeoPolygon::new(vec![ring]).unwrap();
        assert!(polygon_contains(&poly, gp(-90.0, 0.0)).unwrap());
        assert!(polygon_contains(&poly, gp(-80.0, 33.0)).unwrap());
        assert!(!polygon_contains(&poly, gp(-60.0, 33.0)).unwrap());
    }

    #[test]
    fn closing_point_is_dropped_and_degenerate_rings_rejected() {
        let mut ring = square(1.0);
        ring.push(ring[0]);
        let poly = GeoPolygon::new(vec![ring]).unwrap();
        assert_eq!(poly.outer().len(), 4);
        assert!(GeoPolygon::new(vec![vec![gp(0.0, 0.0), gp(1.0, 1.0)]]).is_err());
    }
}
