//! IP enrichment: longest-prefix-match tables for geolocation and origin AS,
//! and the AS registration registry that supplies legal jurisdiction.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read};
use std::net::{IpAddr, Ipv4Addr, Ipv6Addr};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use ipnet::{IpNet, Ipv4Net, Ipv6Net};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::CountryCode;

#[derive(Debug, Error)]
pub enum EnrichmentError {
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
    #[error("conflicting values for {key}: {existing} vs {new}")]
    Conflict {
        key: String,
        existing: String,
        new: String,
    },
}

/// An autonomous system number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Asn(u32);

impl Asn {
    pub fn new(n: u32) -> Option<Self> {
        (n > 0).then_some(Self(n))
    }

    pub fn get(&self) -> u32 {
        self.0
    }
}

impl FromStr for Asn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let digits = t
            .strip_prefix("AS")
            .or_else(|| t.strip_prefix("as"))
            .unwrap_or(t);
        digits
            .parse::<u32>()
            .ok()
            .and_then(Asn::new)
            .ok_or_else(|| format!("invalid AS number {s:?}"))
    }
}

impl fmt::Display for Asn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AS{}", self.0)
    }
}

/// What to do when two rows give the same prefix different values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictPolicy {
    #[default]
    Error,
    FirstWins,
}

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    children: [u32; 2],
    value: Option<u32>,
}

impl Node {
    fn empty() -> Self {
        Self {
            children: [NIL, NIL],
            value: None,
        }
    }
}

/// Binary trie over address bits, one per address family.
#[derive(Debug, Clone)]
struct BitTrie {
    nodes: Vec<Node>,
}

impl BitTrie {
    fn new() -> Self {
        Self {
            nodes: vec![Node::empty()],
        }
    }

    /// Returns the slot for `prefix_len` leading bits of `bits` (MSB first).
    fn slot(&mut self, bits: u128, width: u32, prefix_len: u8) -> &mut Option<u32> {
        let mut at = 0usize;
        for i in 0..prefix_len as u32 {
            let bit = ((bits >> (width - 1 - i)) & 1) as usize;
            let next = self.nodes[at].children[bit];
            at = if next == NIL {
                self.nodes.push(Node::empty());
                let id = (self.nodes.len() - 1) as u32;
                self.nodes[at].children[bit] = id;
                id as usize
            } else {
                next as usize
            };
        }
        &mut self.nodes[at].value
    }

    /// Deepest stored value on the path of `bits`, with its depth.
    fn longest(&self, bits: u128, width: u32) -> Option<(u8, u32)> {
        let mut at = 0usize;
        let mut best = self.nodes[0].value.map(|v| (0u8, v));
        for i in 0..width {
            let bit = ((bits >> (width - 1 - i)) & 1) as usize;
            let next = self.nodes[at].children[bit];
            if next == NIL {
                break;
            }
            at = next as usize;
            if let Some(v) = self.nodes[at].value {
                best = Some(((i + 1) as u8, v));
            }
        }
        best
    }
}

/// Longest-prefix-match table from CIDR prefixes to values.
#[derive(Debug, Clone)]
pub struct PrefixTable<V> {
    v4: BitTrie,
    v6: BitTrie,
    entries: Vec<(IpNet, V)>,
}

impl<V> Default for PrefixTable<V> {
    fn default() -> Self {
        Self {
            v4: BitTrie::new(),
            v6: BitTrie::new(),
            entries: Vec::new(),
        }
    }
}

fn key_of(net: &IpNet) -> (bool, u128, u32, u8) {
    match net.trunc() {
        IpNet::V4(n) => (false, u32::from(n.network()) as u128, 32, n.prefix_len()),
        IpNet::V6(n) => (true, u128::from(n.network()), 128, n.prefix_len()),
    }
}

impl<V: Clone + PartialEq + fmt::Display> PrefixTable<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(IpNet, V)] {
        &self.entries
    }

    /// Inserts a prefix (host bits are cleared). Re-inserting an identical
    /// value is a no-op; a different value is resolved by `policy`.
    pub fn insert(
        &mut self,
        net: IpNet,
        value: V,
        policy: ConflictPolicy,
    ) -> Result<(), EnrichmentError> {
        let (v6, bits, width, len) = key_of(&net);
        let trie = if v6 { &mut self.v6 } else { &mut self.v4 };
        let slot = trie.slot(bits, width, len);
        match *slot {
            Some(idx) => {
                let existing = &self.entries[idx as usize].1;
                if *existing != value && policy == ConflictPolicy::Error {
                    return Err(EnrichmentError::Conflict {
                        key: net.trunc().to_string(),
                        existing: existing.to_string(),
                        new: value.to_string(),
                    });
                }
                Ok(())
            }
            None => {
                *slot = Some(self.entries.len() as u32);
                self.entries.push((net.trunc(), value));
                Ok(())
            }
        }
    }

    pub fn longest_match(&self, ip: IpAddr) -> Option<(IpNet, &V)> {
        let found = match ip {
            IpAddr::V4(a) => self.v4.longest(u32::from(a) as u128, 32),
            IpAddr::V6(a) => match a.to_ipv4_mapped() {
                Some(v4) => self.v4.longest(u32::from(v4) as u128, 32),
                None => self.v6.longest(u128::from(a), 128),
            },
        };
        found.map(|(_, idx)| {
            let (net, v) = &self.entries[idx as usize];
            (*net, v)
        })
    }

    pub fn lookup(&self, ip: IpAddr) -> Option<&V> {
        self.longest_match(ip).map(|(_, v)| v)
    }
}

pub fn lpm_lookup<V: Clone + PartialEq + fmt::Display>(
    t: &PrefixTable<V>,
    ip: IpAddr,
) -> Option<&V> {
    t.lookup(ip)
}

/// AS number to country of registration.
#[derive(Debug, Clone, Default)]
pub struct AsRegistry {
    mapping: HashMap<Asn, CountryCode>,
}

impl AsRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, asn: Asn, country: CountryCode) -> Result<(), EnrichmentError> {
        match self.mapping.insert(asn, country) {
            Some(prev) if prev != country => Err(EnrichmentError::Conflict {
                key: asn.to_string(),
                existing: prev.to_string(),
                new: country.to_string(),
            }),
            _ => Ok(()),
        }
    }

    pub fn get(&self, asn: Asn) -> Option<CountryCode> {
        self.mapping.get(&asn).copied()
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }
}

impl FromIterator<(Asn, CountryCode)> for AsRegistry {
    fn from_iter<T: IntoIterator<Item = (Asn, CountryCode)>>(iter: T) -> Self {
        Self {
            mapping: iter.into_iter().collect(),
        }
    }
}

/// Origin tables, either one snapshot or several keyed by UTC date range.
#[derive(Debug, Clone)]
pub enum OriginTables {
    Single(PrefixTable<Asn>),
    /// `[start, end)` unix-second ranges.
    Dated(Vec<(i64, i64, PrefixTable<Asn>)>),
}

impl OriginTables {
    pub fn table_at(&self, timestamp: i64) -> Option<&PrefixTable<Asn>> {
        match self {
            OriginTables::Single(t) => Some(t),
            OriginTables::Dated(list) => list
                .iter()
                .find(|(s, e, _)| (*s..*e).contains(&timestamp))
                .map(|(_, _, t)| t),
        }
    }
}

/// Parses `YYYY-MM-DD..YYYY-MM-DD` into a `[start, end)` unix-second range.
pub fn parse_date_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected START..END, got {s:?}"))?;
    let day = |d: &str| -> Result<i64, String> {
        let date =
            NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|e| format!("{d:?}: {e}"))?;
        let dt: DateTime<Utc> = date.and_hms_opt(0, 0, 0).expect("midnight").and_utc();
        Ok(dt.timestamp())
    };
    let (start, end) = (day(a)?, day(b)?);
    if end <= start {
        return Err(format!("empty date range {s:?}"));
    }
    Ok((start, end))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HopResolution {
    pub ip: IpAddr,
    pub phys_country: Option<CountryCode>,
    pub asn: Option<Asn>,
    pub legal_country: Option<CountryCode>,
}

/// Everything needed to resolve an address.
#[derive(Debug, Clone)]
pub struct Enrichment {
    pub geo: PrefixTable<CountryCode>,
    pub origin: OriginTables,
    pub registry: AsRegistry,
}

impl Enrichment {
    pub fn new(
        geo: PrefixTable<CountryCode>,
        origin: PrefixTable<Asn>,
        registry: AsRegistry,
    ) -> Self {
        Self {
            geo,
            origin: OriginTables::Single(origin),
            registry,
        }
    }

    pub fn geolocate(&self, ip: IpAddr) -> Option<CountryCode> {
        if is_reserved(ip) {
            return None;
        }
        self.geo.lookup(ip).copied()
    }

    pub fn resolve(&self, ip: IpAddr, timestamp: i64) -> HopResolution {
        if is_reserved(ip) {
            return HopResolution {
                ip,
                phys_country: None,
                asn: None,
                legal_country: None,
            };
        }
        let asn = self
            .origin
            .table_at(timestamp)
            .and_then(|t| t.lookup(ip))
            .copied();
        HopResolution {
            ip,
            phys_country: self.geo.lookup(ip).copied(),
            asn,
            legal_country: asn.and_then(|a| self.registry.get(a)),
        }
    }
}

pub fn resolve_hop(
    geo: &PrefixTable<CountryCode>,
    origin: &PrefixTable<Asn>,
    reg: &AsRegistry,
    ip: IpAddr,
) -> HopResolution {
    if is_reserved(ip) {
        return HopResolution {
            ip,
            phys_country: None,
            asn: None,
            legal_country: None,
        };
    }
    let asn = origin.lookup(ip).copied();
    HopResolution {
        ip,
        phys_country: geo.lookup(ip).copied(),
        asn,
        legal_country: asn.and_then(|a| reg.get(a)),
    }
}

const RESERVED_V4: &[(Ipv4Addr, u8)] = &[
    (Ipv4Addr::new(0, 0, 0, 0), 8),      // "this network"
    (Ipv4Addr::new(10, 0, 0, 0), 8),     // private
    (Ipv4Addr::new(100, 64, 0, 0), 10),  // shared address space
    (Ipv4Addr::new(127, 0, 0, 0), 8),    // loopback
    (Ipv4Addr::new(169, 254, 0, 0), 16), // link local
    (Ipv4Addr::new(172, 16, 0, 0), 12),  // private
    (Ipv4Addr::new(192, 168, 0, 0), 16), // private
    (Ipv4Addr::new(224, 0, 0, 0), 4),    // multicast
    (Ipv4Addr::new(240, 0, 0, 0), 4),    // reserved, includes broadcast
];

const RESERVED_V6: &[(Ipv6Addr, u8)] = &[
    (Ipv6Addr::UNSPECIFIED, 128),
    (Ipv6Addr::LOCALHOST, 128),
    (Ipv6Addr::new(0xfc00, 0, 0, 0, 0, 0, 0, 0), 7), // unique local
    (Ipv6Addr::new(0xfe80, 0, 0, 0, 0, 0, 0, 0), 10), // link local
    (Ipv6Addr::new(0xff00, 0, 0, 0, 0, 0, 0, 0), 8), // multicast
];

/// Private, loopback, link-local, multicast and other non-routable space.
pub fn is_reserved(ip: IpAddr) -> bool {
    match ip {
        IpAddr::V4(a) => RESERVED_V4
            .iter()
            .any(|(net, len)| Ipv4Net::new(*net, *len).expect("static").contains(&a)),
        IpAddr::V6(a) => {
            if let Some(v4) = a.to_ipv4_mapped() {
                return is_reserved(IpAddr::V4(v4));
            }
            RESERVED_V6
                .iter()
                .any(|(net, len)| Ipv6Net::new(*net, *len).expect("static").contains(&a))
        }
    }
}

fn open(path: &Path) -> Result<File, EnrichmentError> {
    File::open(path).map_err(|source| EnrichmentError::Io {
        path: path.display().to_string(),
        source,
    })
}

enum RowError {
    Invalid(String),
    Fatal(EnrichmentError),
}

impl From<String> for RowError {
    fn from(s: String) -> Self {
        RowError::Invalid(s)
    }
}

/// Reads two-column rows, skipping an optional header line and `#` comments.
fn read_pairs<R: Read>(
    r: R,
    path: &Path,
    mut row: impl FnMut(&str, &str) -> Result<(), RowError>,
) -> Result<(), EnrichmentError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(r);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| EnrichmentError::Parse {
            path: path.display().to_string(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() < 2 {
            return Err(EnrichmentError::Parse {
                path: path.display().to_string(),
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        if i == 0 && parse_net(&rec[0]).is_err() && rec[0].parse::<Asn>().is_err() {
            continue;
        }
        match row(&rec[0], &rec[1]) {
            Ok(()) => {}
            Err(RowError::Fatal(e)) => return Err(e),
            Err(RowError::Invalid(message)) => {
                return Err(EnrichmentError::Parse {
                    path: path.display().to_string(),
                    line,
                    message,
                })
            }
        }
    }
    Ok(())
}

fn parse_net(s: &str) -> Result<IpNet, String> {
    s.parse::<IpNet>()
        .or_else(|_| s.parse::<IpAddr>().map(IpNet::from))
        .map_err(|_| format!("invalid prefix {s:?}"))
}

fn load_prefix_table<V, R>(
    r: R,
    path: &Path,
    policy: ConflictPolicy,
    parse_value: impl Fn(&str) -> Result<V, String>,
) -> Result<PrefixTable<V>, EnrichmentError>
where
    V: Clone + PartialEq + fmt::Display,
    R: Read,
{
    let mut table = PrefixTable::new();
    read_pairs(r, path, |a, b| {
        let net = parse_net(a)?;
        let v = parse_value(b)?;
        table.insert(net, v, policy).map_err(RowError::Fatal)
    })?;
    Ok(table)
}

/// `cidr,iso2` rows.
pub fn load_geo_table(path: &Path) -> Result<PrefixTable<CountryCode>, EnrichmentError> {
    load_prefix_table(
        BufReader::new(open(path)?),
        path,
        ConflictPolicy::Error,
        |s| s.parse::<CountryCode>().map_err(|e| e.to_string()),
    )
}

/// `cidr,asn` rows. Multiple-origin prefixes are a conflict unless
/// `policy` is [`ConflictPolicy::FirstWins`].
pub fn load_origin_table(
    path: &Path,
    policy: ConflictPolicy,
) -> Result<PrefixTable<Asn>, EnrichmentError> {
    load_prefix_table(BufReader::new(open(path)?), path, policy, |s| {
        s.parse::<Asn>()
    })
}

/// `asn,iso2` rows.
pub fn load_as_registry(path: &Path) -> Result<AsRegistry, EnrichmentError> {
    let mut reg = AsRegistry::new();
    read_pairs(BufReader::new(open(path)?), path, |a, b| {
        let asn: Asn = a.parse()?;
        let cc: CountryCode = b
            .parse()
            .map_err(|e: crate::world::InvalidCountryCode| e.to_string())?;
        reg.insert(asn, cc).map_err(RowError::Fatal)
    })?;
    Ok(reg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn cc(s: &str) -> CountryCode {
        s.parse().unwrap()
    }

    fn ip(s: &str) -> IpAddr {
        s.parse().unwrap()
    }

    fn net(s: &str) -> IpNet {
        s.parse().unwrap()
    }

    fn geo(rows: &[(&str, &str)]) -> PrefixTable<CountryCode> {
        let mut t = PrefixTable::new();
        for (n, c) in rows {
            t.insert(net(n), cc(c), ConflictPolicy::Error).unwrap();
        }
        t
    }

    #[test]
    fn longest_prefix_wins() {
        let t = geo(&[("1.2.0.0/16", "US"), ("1.2.3.0/24", "GB")]);
        assert_eq!(lpm_lookup(&t, ip("1.2.3.4")), Some(&cc("GB")));
        assert_eq!(lpm_lookup(&t, ip("1.2.9.9")), Some(&cc("US")));
        assert_eq!(lpm_lookup(&t, ip("1.3.0.1")), None);
    }

    #[test]
    fn empty_table_misses() {
        let t: PrefixTable<CountryCode> = PrefixTable::new();
        assert_eq!(t.lookup(ip("8.8.8.8")), None);
    }

    #[test]
    fn default_route_and_host_routes() {
        let t = geo(&[("0.0.0.0/0", "ZZ"), ("9.9.9.9/32", "CH")]);
        assert_eq!(t.lookup(ip("9.9.9.9")), Some(&cc("CH")));
        assert_eq!(t.lookup(ip("9.9.9.8")), Some(&cc("ZZ")));
        let (n, _) = t.longest_match(ip("9.9.9.9")).unwrap();
        assert_eq!(n, net("9.9.9.9/32"));
    }

    #[test]
    fn host_bits_are_truncated() {
        let t = geo(&[("1.2.3.77/24", "GB")]);
        assert_eq!(t.entries()[0].0, net("1.2.3.0/24"));
        assert_eq!(t.lookup(ip("1.2.3.200")), Some(&cc("GB")));
    }

    #[test]
    fn ipv6_lookup() {
        let t = geo(&[("2001:db8::/32", "DE"), ("2001:db8:1::/48", "FR")]);
        assert_eq!(t.lookup(ip("2001:db8:1::5")), Some(&cc("FR")));
        assert_eq!(t.lookup(ip("2001:db8:2::5")), Some(&cc("DE")));
        assert_eq!(t.lookup(ip("1.2.3.4")), None);
    }

    #[test]
    fn conflicting_duplicate_is_rejected() {
        let mut t = geo(&[("1.2.3.0/24", "GB")]);
        assert!(t
            .insert(net("1.2.3.0/24"), cc("GB"), ConflictPolicy::Error)
            .is_ok());
        let err = t
            .insert(net("1.2.3.0/24"), cc("FR"), ConflictPolicy::Error)
            .unwrap_err();
        assert!(err.to_string().contains("1.2.3.0/24"));
        t.insert(net("1.2.3.0/24"), cc("FR"), ConflictPolicy::FirstWins)
            .unwrap();
        assert_eq!(t.lookup(ip("1.2.3.1")), Some(&cc("GB")));
    }

    #[test]
    fn resolve_full_hit() {
        let g = geo(&[("5.0.0.0/8", "US")]);
        let mut o = PrefixTable::new();
        o.insert(
            net("5.5.0.0/16"),
            Asn::new(100).unwrap(),
            ConflictPolicy::Error,
        )
        .unwrap();
        let reg: AsRegistry = [(Asn::new(100).unwrap(), cc("US"))].into_iter().collect();
        let r = resolve_hop(&g, &o, &reg, ip("5.5.5.5"));
        assert_eq!(r.phys_country, Some(cc("US")));
        assert_eq!(r.asn, Asn::new(100));
        assert_eq!(r.legal_country, Some(cc("US")));
    }

    #[test]
    fn resolve_origin_miss() {
        let g = geo(&[("5.0.0.0/8", "DE")]);
        let r = resolve_hop(&g, &PrefixTable::new(), &AsRegistry::new(), ip("5.5.5.5"));
        assert_eq!(r.phys_country, Some(cc("DE")));
        assert_eq!(r.asn, None);
        assert_eq!(r.legal_country, None);
    }

    #[test]
    fn private_ranges_short_circuit() {
        let g = geo(&[("0.0.0.0/0", "US")]);
        let mut o = PrefixTable::new();
        o.insert(
            net("0.0.0.0/0"),
            Asn::new(1).unwrap(),
            ConflictPolicy::Error,
        )
        .unwrap();
        let reg: AsRegistry = [(Asn::new(1).unwrap(), cc("US"))].into_iter().collect();
        for a in [
            "10.0.0.1",
            "192.168.1.1",
            "172.16.5.5",
            "127.0.0.1",
            "169.254.1.1",
            "224.0.0.5",
            "100.64.0.1",
            "255.255.255.255",
            "::1",
            "fe80::1",
            "fd00::1",
            "ff02::1",
        ] {
            let r = resolve_hop(&g, &o, &reg, ip(a));
            assert_eq!(
                (r.phys_country, r.asn, r.legal_country),
                (None, None, None),
                "{a}"
            );
        }
        assert!(!is_reserved(ip("8.8.8.8")));
        assert!(!is_reserved(ip("172.32.0.1")));
    }

    #[test]
    fn asn_parsing() {
        assert_eq!("AS15169".parse::<Asn>().unwrap().get(), 15169);
        assert_eq!("15169".parse::<Asn>().unwrap().get(), 15169);
        assert!("0".parse::<Asn>().is_err());
        assert!("-3".parse::<Asn>().is_err());
    }

    #[test]
    fn dated_origin_selection() {
        let (s, e) = parse_date_range("2018-01-01..2018-02-01").unwrap();
        assert_eq!(s, 1_514_764_800);
        assert_eq!(e - s, 31 * 86_400);
        let t = OriginTables::Dated(vec![(s, e, PrefixTable::new())]);
        assert!(t.table_at(s).is_some());
        assert!(t.table_at(e).is_none());
        assert!(parse_date_range("2018-02-01..2018-01-01").is_err());
    }

    fn tmp(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_geo_csv() {
        let f = tmp("cidr,iso2\n1.0.0.0/8,AU\n2.0.0.0/8,FR\n3.3.0.0/16,US\n");
        let t = load_geo_table(f.path()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.lookup(ip("1.1.1.1")), Some(&cc("AU")));
        assert_eq!(t.lookup(ip("2.2.2.2")), Some(&cc("FR")));
        assert_eq!(t.lookup(ip("3.3.3.3")), Some(&cc("US")));
    }

    #[test]
    fn load_geo_conflict() {
        let f = tmp("1.0.0.0/8,AU\n1.0.0.0/8,NZ\n");
        match load_geo_table(f.path()).unwrap_err() {
            EnrichmentError::Conflict { key, .. } => assert_eq!(key, "1.0.0.0/8"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn load_geo_parse_error_has_line() {
        let f = tmp("cidr,iso2\n1.0.0.0/8,AU\nnot-a-prefix,AU\n");
        match load_geo_table(f.path()).unwrap_err() {
            EnrichmentError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn moas_policy() {
        let f = tmp("prefix,asn\n4.0.0.0/8,100\n4.0.0.0/8,200\n");
        assert!(matches!(
            load_origin_table(f.path(), ConflictPolicy::Error),
            Err(EnrichmentError::Conflict { .. })
        ));
        let t = load_origin_table(f.path(), ConflictPolicy::FirstWins).unwrap();
        assert_eq!(t.lookup(ip("4.1.1.1")).unwrap().get(), 100);
    }

    #[test]
    fn legal_registration_elsewhere() {
        let origin = tmp("45.10.20.0/24,AS64500\n");
        let reg = tmp("asn,iso2\n64500,BG\n");
        let o = load_origin_table(origin.path(), ConflictPolicy::Error).unwrap();
        let r = load_as_registry(reg.path()).unwrap();
        let g = geo(&[("45.10.0.0/16", "US")]);
        let h = resolve_hop(&g, &o, &r, ip("45.10.20.7"));
        assert_eq!(h.phys_country, Some(cc("US")));
        assert_eq!(h.legal_country, Some(cc("BG")));
    }
}
