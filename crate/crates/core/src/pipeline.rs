//! Traceroutes to compressed (country, AS) tuple paths, and per-path
//! physical, legal and union verdicts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;
use std::net::IpAddr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enrichment::{Asn, Enrichment};
use crate::normality::{classify, NormalSet, PairCache, PathVerdict};
use crate::world::{CountryCode, PointMode, WorldError, WorldModel};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("read error after {processed} records: {source}")]
    Io {
        processed: u64,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    World(#[from] WorldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawHop {
    pub ttl: u32,
    pub ip: Option<IpAddr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracerouteRecord {
    pub src_ip: IpAddr,
    pub dst_ip: IpAddr,
    #[serde(default)]
    pub timestamp: i64,
    pub hops: Vec<RawHop>,
}

impl TracerouteRecord {
    /// Parses one JSON object and checks that TTLs strictly increase.
    pub fn from_json(line: &str) -> Result<Self, String> {
        let rec: TracerouteRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<(), String> {
        for w in self.hops.windows(2) {
            if w[1].ttl <= w[0].ttl {
                return Err(format!(
                    "ttl {} does not increase after {}",
                    w[1].ttl, w[0].ttl
                ));
            }
        }
        Ok(())
    }

    pub fn responsive_hops(&self) -> usize {
        self.hops.iter().filter(|h| h.ip.is_some()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TupleHop {
    pub phys_country: CountryCode,
    pub asn: Asn,
    pub legal_country: Option<CountryCode>,
}

impl fmt::Display for TupleHop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}", self.phys_country, self.asn)?;
        match self.legal_country {
            Some(c) => write!(f, ", legal {c})"),
            None => write!(f, ", legal ?)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TuplePath {
    pub src_country: CountryCode,
    pub dst_country: CountryCode,
    pub hops: Vec<TupleHop>,
    /// Hops left out of the tuple path: unresponsive or unresolved.
    pub dropped_hops: usize,
    /// The subset of `dropped_hops` that never responded.
    pub unresponsive_hops: usize,
}

impl TuplePath {
    pub fn physical_countries(&self) -> impl Iterator<Item = CountryCode> + '_ {
        self.hops.iter().map(|h| h.phys_country)
    }

    pub fn legal_countries(&self) -> impl Iterator<Item = CountryCode> + '_ {
        self.hops.iter().filter_map(|h| h.legal_country)
    }
}

/// Collapses consecutive hops with the same (country, AS) pair.
pub fn compress(hops: &[TupleHop]) -> Vec<TupleHop> {
    let mut out: Vec<TupleHop> = Vec::with_capacity(hops.len());
    for h in hops {
        match out.last() {
            Some(prev) if prev.phys_country == h.phys_country && prev.asn == h.asn => {}
            _ => out.push(*h),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    UnresolvedSource,
    UnresolvedDestination,
    EmptyPath,
    UnclassifiablePair,
}

impl SkipReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            SkipReason::UnresolvedSource => "unresolved_source",
            SkipReason::UnresolvedDestination => "unresolved_destination",
            SkipReason::EmptyPath => "empty_path",
            SkipReason::UnclassifiablePair => "unclassifiable_pair",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SkipLog(BTreeMap<SkipReason, u64>);

impl SkipLog {
    pub fn record(&mut self, reason: SkipReason) {
        *self.0.entry(reason).or_default() += 1;
    }

    pub fn count(&self, reason: SkipReason) -> u64 {
        self.0.get(&reason).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn merge(&mut self, other: &SkipLog) {
        for (r, n) in &other.0 {
            *self.0.entry(*r).or_default() += n;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (SkipReason, u64)> + '_ {
        self.0.iter().map(|(r, n)| (*r, *n))
    }
}

/// Resolves every hop, drops the unknowns, and compresses repeats.
pub fn to_tuple_path(
    rec: &TracerouteRecord,
    enrichment: &Enrichment,
) -> Result<TuplePath, SkipReason> {
    let src_country = enrichment
        .geolocate(rec.src_ip)
        .ok_or(SkipReason::UnresolvedSource)?;
    let dst_country = enrichment
        .geolocate(rec.dst_ip)
        .ok_or(SkipReason::UnresolvedDestination)?;
    if rec.hops.is_empty() {
        return Err(SkipReason::EmptyPath);
    }
    let mut resolved = Vec::with_capacity(rec.hops.len());
    let mut dropped = 0;
    let mut unresponsive = 0;
    for hop in &rec.hops {
        let Some(ip) = hop.ip else {
            dropped += 1;
            unresponsive += 1;
            continue;
        };
        let r = enrichment.resolve(ip, rec.timestamp);
        match (r.phys_country, r.asn) {
            (Some(phys_country), Some(asn)) => resolved.push(TupleHop {
                phys_country,
                asn,
                legal_country: r.legal_country,
            }),
            _ => dropped += 1,
        }
    }
    Ok(TuplePath {
        src_country,
        dst_country,
        hops: compress(&resolved),
        dropped_hops: dropped,
        unresponsive_hops: unresponsive,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathClassification {
    pub physical: PathVerdict,
    pub legal: PathVerdict,
    pub union: PathVerdict,
    pub union_added_countries: usize,
    pub tuple_len: usize,
    pub as_count: usize,
    pub unclassifiable: bool,
}

/// Classifies one tuple path against an already-built normal set.
pub fn classify_with(tp: &TuplePath, ns: &NormalSet) -> PathClassification {
    let physical: BTreeSet<CountryCode> = tp.physical_countries().collect();
    let legal: BTreeSet<CountryCode> = tp.legal_countries().collect();
    let endpoint = |c: &CountryCode| *c == tp.src_country || *c == tp.dst_country;
    let union_added_countries = legal
        .iter()
        .filter(|c| !endpoint(c) && !physical.contains(c))
        .count();
    let as_count = tp.hops.iter().map(|h| h.asn).collect::<BTreeSet<_>>().len();
    PathClassification {
        physical: classify(ns, physical.iter().copied()),
        legal: classify(ns, legal.iter().copied()),
        union: classify(ns, physical.union(&legal).copied()),
        union_added_countries,
        tuple_len: tp.hops.len(),
        as_count,
        unclassifiable: ns.unclassifiable,
    }
}

/// All three verdicts share the normal set of the physical endpoints.
pub fn classify_path(
    tp: &TuplePath,
    cache: &PairCache,
    w: &WorldModel,
    mode: PointMode,
) -> Result<PathClassification, WorldError> {
    let ns = cache.get_or_build(w, tp.src_country, tp.dst_country, mode)?;
    Ok(classify_with(tp, &ns))
}

/// How to treat paths whose endpoints span more than a hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnclassifiablePolicy {
    /// Skip them; they show up in the skip log only.
    #[default]
    Exclude,
    /// Keep them as non-normal paths.
    CountNonNormal,
}

/// The shared, read-only context for processing records.
pub struct Pipeline<'a> {
    pub world: &'a WorldModel,
    pub enrichment: &'a Enrichment,
    pub cache: &'a PairCache,
    pub mode: PointMode,
    pub unclassifiable: UnclassifiablePolicy,
}

pub type Classified = (TuplePath, PathClassification);

/// Outcome of processing one record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordOutcome {
    Classified(Box<Classified>),
    Skipped(SkipReason),
}

impl<'a> Pipeline<'a> {
    pub fn process(&self, rec: &TracerouteRecord) -> Result<RecordOutcome, WorldError> {
        let tp = match to_tuple_path(rec, self.enrichment) {
            Ok(tp) => tp,
            Err(r) => return Ok(RecordOutcome::Skipped(r)),
        };
        if !self.world.is_known(tp.src_country) || !self.world.is_known(tp.dst_country) {
            // geolocated to a code the world files do not describe
            return Ok(RecordOutcome::Skipped(SkipReason::UnclassifiablePair));
        }
        let pc = classify_path(&tp, self.cache, self.world, self.mode)?;
        if pc.unclassifiable && self.unclassifiable == UnclassifiablePolicy::Exclude {
            return Ok(RecordOutcome::Skipped(SkipReason::UnclassifiablePair));
        }
        Ok(RecordOutcome::Classified(Box::new((tp, pc))))
    }

    /// Processes a batch on the current rayon pool. Output order is not
    /// guaranteed to follow input order.
    pub fn process_batch(
        &self,
        records: &[TracerouteRecord],
    ) -> Result<(Vec<Classified>, SkipLog), WorldError> {
        let outcomes: Vec<RecordOutcome> = records
            .par_iter()
            .map(|r| self.process(r))
            .collect::<Result<_, _>>()?;
        let mut out = Vec::with_capacity(outcomes.len());
        let mut skips = SkipLog::default();
        for o in outcomes {
            match o {
                RecordOutcome::Classified(c) => out.push(*c),
                RecordOutcome::Skipped(r) => skips.record(r),
            }
        }
        Ok((out, skips))
    }
}

/// Reads newline-delimited JSON traceroutes. Blank lines and lines starting
/// with `#` are ignored.
pub struct RecordReader<R> {
    inner: R,
    line: u64,
    read: u64,
    buf: String,
}

impl<R: BufRead> RecordReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            line: 0,
            read: 0,
            buf: String::new(),
        }
    }

    pub fn records_read(&self) -> u64 {
        self.read
    }

    /// Up to `n` records; an empty vector means end of input.
    pub fn next_chunk(&mut self, n: usize) -> Result<Vec<TracerouteRecord>, PipelineError> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            self.buf.clear();
            let got = self
                .inner
                .read_line(&mut self.buf)
                .map_err(|source| PipelineError::Io {
                    processed: self.read,
                    source,
                })?;
            if got == 0 {
                break;
            }
            self.line += 1;
            let t = self.buf.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let rec = TracerouteRecord::from_json(t).map_err(|message| PipelineError::Parse {
                line: self.line,
                message,
            })?;
            self.read += 1;
            out.push(rec);
        }
        Ok(out)
    }
}

pub const CHUNK_RECORDS: usize = 4096;

/// Drives records through the pipeline chunk by chunk, handing each chunk's
/// results to `sink`.
pub fn process_stream<R: BufRead>(
    reader: &mut RecordReader<R>,
    pipeline: &Pipeline<'_>,
    mut sink: impl FnMut(Vec<Classified>, SkipLog),
) -> Result<(), PipelineError> {
    loop {
        let chunk = reader.next_chunk(CHUNK_RECORDS)?;
        if chunk.is_empty() {
            return Ok(());
        }
        let (classified, skips) = pipeline.process_batch(&chunk)?;
        sink(classified, skips);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enrichment::{AsRegistry, ConflictPolicy, PrefixTable};

    fn cc(s: &str) -> CountryCode {
        s.parse().unwrap()
    }

    fn hop(c: &str, asn: u32) -> TupleHop {
        TupleHop {
            phys_country: cc(c),
            asn: Asn::new(asn).unwrap(),
            legal_country: Some(cc(c)),
        }
    }

    fn enrichment() -> Enrichment {
        let mut geo = PrefixTable::new();
        let mut origin = PrefixTable::new();
        for (net, c, asn) in [
            ("11.0.0.0/8", "US", 100),
            ("12.0.0.0/8", "GB", 200),
            ("13.0.0.0/8", "US", 300),
        ] {
            geo.insert(net.parse().unwrap(), cc(c), ConflictPolicy::Error)
                .unwrap();
            origin
                .insert(
                    net.parse().unwrap(),
                    Asn::new(asn).unwrap(),
                    ConflictPolicy::Error,
                )
                .unwrap();
        }
        // geolocated but no origin
        geo.insert(
            "14.0.0.0/8".parse().unwrap(),
            cc("DE"),
            ConflictPolicy::Error,
        )
        .unwrap();
        let reg: AsRegistry = [
            (Asn::new(100).unwrap(), cc("US")),
            (Asn::new(300).unwrap(), cc("BG")),
        ]
        .into_iter()
        .collect();
        Enrichment::new(geo, origin, reg)
    }

    fn rec(hops: &[Option<&str>]) -> TracerouteRecord {
        TracerouteRecord {
            src_ip: "11.0.0.1".parse().unwrap(),
            dst_ip: "11.9.9.9".parse().unwrap(),
            timestamp: 0,
            hops: hops
                .iter()
                .enumerate()
                .map(|(i, h)| RawHop {
                    ttl: i as u32 + 1,
                    ip: h.map(|s| s.parse().unwrap()),
                })
                .collect(),
        }
    }

    #[test]
    fn repeated_tuples_collapse() {
        let tp = to_tuple_path(
            &rec(&[Some("11.0.0.2"), Some("11.0.0.3"), Some("12.0.0.1")]),
            &enrichment(),
        )
        .unwrap();
        assert_eq!(tp.hops.len(), 2);
        assert_eq!(tp.hops[0].phys_country, cc("US"));
        assert_eq!(tp.hops[1].phys_country, cc("GB"));
        assert_eq!(tp.dropped_hops, 0);
    }

    #[test]
    fn missing_hop_dropped_then_collapsed() {
        let tp = to_tuple_path(
            &rec(&[Some("11.0.0.2"), None, Some("11.0.0.3")]),
            &enrichment(),
        )
        .unwrap();
        assert_eq!(tp.hops.len(), 1);
        assert_eq!(tp.dropped_hops, 1);
        assert_eq!(tp.unresponsive_hops, 1);
    }

    #[test]
    fn unknown_asn_hop_is_dropped() {
        let tp = to_tuple_path(
            &rec(&[Some("14.0.0.1"), Some("10.0.0.1"), Some("99.0.0.1")]),
            &enrichment(),
        )
        .unwrap();
        assert!(tp.hops.is_empty());
        assert_eq!(tp.dropped_hops, 3);
        assert_eq!(tp.unresponsive_hops, 0);
    }

    #[test]
    fn same_country_different_as_is_kept() {
        let tp = to_tuple_path(
            &rec(&[Some("11.0.0.2"), Some("13.0.0.1"), Some("11.0.0.3")]),
            &enrichment(),
        )
        .unwrap();
        assert_eq!(tp.hops.len(), 3);
        assert_eq!(tp.hops[1].legal_country, Some(cc("BG")));
    }

    #[test]
    fn unresolved_endpoints_skip() {
        let e = enrichment();
        let mut r = rec(&[Some("11.0.0.2")]);
        r.dst_ip = "99.1.1.1".parse().unwrap();
        assert_eq!(
            to_tuple_path(&r, &e),
            Err(SkipReason::UnresolvedDestination)
        );
        r.src_ip = "10.1.1.1".parse().unwrap();
        assert_eq!(to_tuple_path(&r, &e), Err(SkipReason::UnresolvedSource));
        assert_eq!(to_tuple_path(&rec(&[]), &e), Err(SkipReason::EmptyPath));
    }

    #[test]
    fn compress_is_idempotent() {
        let hops = vec![
            hop("US", 1),
            hop("US", 1),
            hop("GB", 2),
            hop("GB", 2),
            hop("US", 1),
        ];
        let once = compress(&hops);
        assert_eq!(once.len(), 3);
        assert_eq!(compress(&once), once);
    }

    #[test]
    fn json_record_parsing() {
        let r = TracerouteRecord::from_json(
            r#"{"src_ip":"1.1.1.1","dst_ip":"2.2.2.2","timestamp":5,"hops":[{"ttl":1,"ip":"3.3.3.3"},{"ttl":2,"ip":null}]}"#,
        )
        .unwrap();
        assert_eq!(r.hops.len(), 2);
        assert_eq!(r.responsive_hops(), 1);
        assert!(TracerouteRecord::from_json(
            r#"{"src_ip":"1.1.1.1","dst_ip":"2.2.2.2","hops":[{"ttl":2,"ip":null},{"ttl":2,"ip":null}]}"#
        )
        .is_err());
        assert!(TracerouteRecord::from_json("{not json").is_err());
    }

    #[test]
    fn reader_reports_line_of_bad_record() {
        let input =
            "\n# comment\n{\"src_ip\":\"1.1.1.1\",\"dst_ip\":\"2.2.2.2\",\"hops\":[]}\nnope\n";
        let mut r = RecordReader::new(input.as_bytes());
        match r.next_chunk(10).unwrap_err() {
            PipelineError::Parse { line, .. } => assert_eq!(line, 4),
            e => panic!("{e}"),
        }
    }
}
