//! Degree-of-normality accounting.
//!
//! An [`Aggregate`] is a bag of counters keyed by country, region, role and
//! exposure. Aggregates merge by addition, so workers can each own one and
//! combine them in any order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::normality::PathVerdict;
use crate::pipeline::{PathClassification, SkipLog, TuplePath};
use crate::world::{CountryCode, Region, WorldModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exposure {
    Physical,
    Legal,
    Union,
}

impl Exposure {
    pub const ALL: [Exposure; 3] = [Exposure::Physical, Exposure::Legal, Exposure::Union];

    pub fn as_str(&self) -> &'static str {
        match self {
            Exposure::Physical => "physical",
            Exposure::Legal => "legal",
            Exposure::Union => "union",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Source,
    Transit,
    Destination,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Source, Role::Transit, Role::Destination];
}

/// Normal and total path counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Counter {
    pub normal: u64,
    pub total: u64,
}

impl Counter {
    pub fn add(&mut self, normal: bool) {
        self.total += 1;
        if normal {
            self.normal += 1;
        }
    }

    pub fn merge(&mut self, o: &Counter) {
        self.normal += o.normal;
        self.total += o.total;
    }

    pub fn don(&self) -> Option<f64> {
        don(self.normal, self.total)
    }
}

/// Normal paths over total paths; `None` when no paths were seen.
pub fn don(normal: u64, total: u64) -> Option<f64> {
    (total > 0).then(|| normal as f64 / total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BenefactorCounters {
    /// Paths on which the country is a benefactor.
    pub benefited_paths: u64,
    /// Paths on which the country appears in the path interior, endpoints included.
    pub transited_paths: u64,
    pub transited_normal: u64,
    /// Interior appearances on paths the country neither starts nor ends.
    pub transit_only_paths: u64,
    pub transit_only_normal: u64,
}

impl BenefactorCounters {
    fn merge(&mut self, o: &BenefactorCounters) {
        self.benefited_paths += o.benefited_paths;
        self.transited_paths += o.transited_paths;
        self.transited_normal += o.transited_normal;
        self.transit_only_paths += o.transit_only_paths;
        self.transit_only_normal += o.transit_only_normal;
    }
}

fn merge_counters<K: Ord + Copy>(into: &mut BTreeMap<K, Counter>, from: &BTreeMap<K, Counter>) {
    for (k, c) in from {
        into.entry(*k).or_default().merge(c);
    }
}

fn merge_counts<K: Ord + Copy>(into: &mut BTreeMap<K, u64>, from: &BTreeMap<K, u64>) {
    for (k, n) in from {
        *into.entry(*k).or_default() += n;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Aggregate {
    pub paths: u64,
    /// Paths whose endpoint pair had no hemisphere; counted as non-normal.
    pub unclassifiable_paths: u64,
    pub global: BTreeMap<Exposure, Counter>,
    pub roles: BTreeMap<(CountryCode, Role, Exposure), Counter>,
    pub benefactors: BTreeMap<(CountryCode, Exposure), BenefactorCounters>,
    pub region_roles: BTreeMap<(Region, Role, Exposure), Counter>,
    pub region_matrix: BTreeMap<(Region, Region, Exposure), Counter>,
    /// (exposure, benefactor count) → paths.
    pub severity: BTreeMap<(Exposure, usize), u64>,
    pub tuple_len_don: BTreeMap<(Exposure, usize), Counter>,
    pub as_count_don: BTreeMap<(Exposure, usize), Counter>,
    pub union_added: BTreeMap<usize, u64>,
    pub skips: SkipLog,
}

/// Countries strictly inside a sequence once the leading run of `src` and
/// the trailing run of `dst` are removed.
fn interior(seq: &[CountryCode], src: CountryCode, dst: CountryCode) -> BTreeSet<CountryCode> {
    let start = seq.iter().position(|c| *c != src).unwrap_or(seq.len());
    let end = seq[start..]
        .iter()
        .rposition(|c| *c != dst)
        .map(|i| start + i + 1)
        .unwrap_or(start);
    seq[start..end].iter().copied().collect()
}

impl Aggregate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn accumulate(&mut self, tp: &TuplePath, pc: &PathClassification, w: &WorldModel) {
        let (src, dst) = (tp.src_country, tp.dst_country);
        self.paths += 1;
        if pc.unclassifiable {
            self.unclassifiable_paths += 1;
        }
        let phys_seq: Vec<CountryCode> = tp.physical_countries().collect();
        let legal_seq: Vec<CountryCode> = tp.legal_countries().collect();
        let phys_interior = interior(&phys_seq, src, dst);
        let legal_interior = interior(&legal_seq, src, dst);
        let union_interior: BTreeSet<CountryCode> =
            phys_interior.union(&legal_interior).copied().collect();
        let (src_region, dst_region) = (w.region_of(src), w.region_of(dst));

        for (e, verdict, transited) in [
            (Exposure::Physical, &pc.physical, &phys_interior),
            (Exposure::Legal, &pc.legal, &legal_interior),
            (Exposure::Union, &pc.union, &union_interior),
        ] {
            self.accumulate_exposure(e, verdict, transited, src, dst, w);
            let normal = verdict.normal;
            if let (Some(a), Some(b)) = (src_region, dst_region) {
                self.region_matrix.entry((a, b, e)).or_default().add(normal);
            }
            *self
                .severity
                .entry((e, verdict.benefactors.len()))
                .or_default() += 1;
            self.tuple_len_don
                .entry((e, pc.tuple_len))
                .or_default()
                .add(normal);
            self.as_count_don
                .entry((e, pc.as_count))
                .or_default()
                .add(normal);
        }
        *self
            .union_added
            .entry(pc.union_added_countries)
            .or_default() += 1;
    }

    fn accumulate_exposure(
        &mut self,
        e: Exposure,
        verdict: &PathVerdict,
        transited: &BTreeSet<CountryCode>,
        src: CountryCode,
        dst: CountryCode,
        w: &WorldModel,
    ) {
        let normal = verdict.normal;
        self.global.entry(e).or_default().add(normal);

        self.roles
            .entry((src, Role::Source, e))
            .or_default()
            .add(normal);
        self.roles
            .entry((dst, Role::Destination, e))
            .or_default()
            .add(normal);
        if let Some(r) = w.region_of(src) {
            self.region_roles
                .entry((r, Role::Source, e))
                .or_default()
                .add(normal);
        }
        if let Some(r) = w.region_of(dst) {
            self.region_roles
                .entry((r, Role::Destination, e))
                .or_default()
                .add(normal);
        }

        let mut transit_regions = BTreeSet::new();
        for &c in transited {
            let b = self.benefactors.entry((c, e)).or_default();
            b.transited_paths += 1;
            b.transited_normal += normal as u64;
            if c != src && c != dst {
                b.transit_only_paths += 1;
                b.transit_only_normal += normal as u64;
                self.roles
                    .entry((c, Role::Transit, e))
                    .or_default()
                    .add(normal);
                if let Some(r) = w.region_of(c) {
                    transit_regions.insert(r);
                }
            }
        }
        for r in transit_regions {
            self.region_roles
                .entry((r, Role::Transit, e))
                .or_default()
                .add(normal);
        }
        for &c in &verdict.benefactors {
            self.benefactors.entry((c, e)).or_default().benefited_paths += 1;
        }
    }

    pub fn merge(&mut self, o: &Aggregate) {
        self.paths += o.paths;
        self.unclassifiable_paths += o.unclassifiable_paths;
        merge_counters(&mut self.global, &o.global);
        merge_counters(&mut self.roles, &o.roles);
        for (k, b) in &o.benefactors {
            self.benefactors.entry(*k).or_default().merge(b);
        }
        merge_counters(&mut self.region_roles, &o.region_roles);
        merge_counters(&mut self.region_matrix, &o.region_matrix);
        merge_counts(&mut self.severity, &o.severity);
        merge_counters(&mut self.tuple_len_don, &o.tuple_len_don);
        merge_counters(&mut self.as_count_don, &o.as_count_don);
        merge_counts(&mut self.union_added, &o.union_added);
        self.skips.merge(&o.skips);
    }

    pub fn global_don(&self, e: Exposure) -> Option<f64> {
        self.global.get(&e).and_then(Counter::don)
    }

    pub fn role(&self, c: CountryCode, role: Role, e: Exposure) -> Counter {
        self.roles.get(&(c, role, e)).copied().unwrap_or_default()
    }

    pub fn benefactor(&self, c: CountryCode, e: Exposure) -> BenefactorCounters {
        self.benefactors.get(&(c, e)).copied().unwrap_or_default()
    }
}

pub fn accumulate(agg: &mut Aggregate, tp: &TuplePath, pc: &PathClassification, w: &WorldModel) {
    agg.accumulate(tp, pc, w);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DonCell {
    pub normal: u64,
    pub total: u64,
    pub don: Option<f64>,
}

impl From<Counter> for DonCell {
    fn from(c: Counter) -> Self {
        Self {
            normal: c.normal,
            total: c.total,
            don: c.don(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ByExposure<T> {
    pub physical: T,
    pub legal: T,
    pub union: T,
}

impl<T> ByExposure<T> {
    fn build(mut f: impl FnMut(Exposure) -> T) -> Self {
        Self {
            physical: f(Exposure::Physical),
            legal: f(Exposure::Legal),
            union: f(Exposure::Union),
        }
    }

    pub fn get(&self, e: Exposure) -> &T {
        match e {
            Exposure::Physical => &self.physical,
            Exposure::Legal => &self.legal,
            Exposure::Union => &self.union,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoleDons {
    pub source: ByExposure<DonCell>,
    pub transit: ByExposure<DonCell>,
    pub destination: ByExposure<DonCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryRow {
    pub iso2: CountryCode,
    pub region: Option<Region>,
    #[serde(flatten)]
    pub roles: RoleDons,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitRow {
    pub iso2: CountryCode,
    pub transited_paths: u64,
    pub ratio_of_paths: f64,
    pub transit_don: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitOnlyRow {
    pub iso2: CountryCode,
    pub transit_only_paths: u64,
    pub ratio_of_paths: f64,
    pub transit_only_don: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenefactorRow {
    pub iso2: CountryCode,
    pub benefited_paths: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenefactorRatioRow {
    pub iso2: CountryCode,
    pub benefited_paths: u64,
    pub transited_paths: u64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRow {
    pub region: Region,
    #[serde(flatten)]
    pub roles: RoleDons,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixCell {
    pub from: Region,
    pub to: Region,
    #[serde(flatten)]
    pub cell: DonCell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountBin {
    pub bin: usize,
    pub paths: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DonBin {
    pub bin: usize,
    #[serde(flatten)]
    pub cell: DonCell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramSection {
    /// Benefactor count → paths.
    pub severity: ByExposure<Vec<CountBin>>,
    pub tuple_len_don: ByExposure<Vec<DonBin>>,
    pub as_count_don: ByExposure<Vec<DonBin>>,
    pub union_added: Vec<CountBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathTotals {
    pub classified: u64,
    pub unclassifiable_counted: u64,
    pub skipped: u64,
    pub skips: SkipLog,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExposureReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub header: Option<serde_json::Value>,
    pub paths: PathTotals,
    pub global: ByExposure<DonCell>,
    pub countries: Vec<CountryRow>,
    pub transit_providers: ByExposure<Vec<TransitRow>>,
    pub transit_only: ByExposure<Vec<TransitOnlyRow>>,
    pub benefactors: ByExposure<Vec<BenefactorRow>>,
    pub benefactor_transit_ratio: ByExposure<Vec<BenefactorRatioRow>>,
    pub regions: Vec<RegionRow>,
    pub region_matrix: ByExposure<Vec<MatrixCell>>,
    pub histograms: HistogramSection,
}

fn ratio(n: u64, d: u64) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

/// Sorts by a descending count then by code, and keeps the first `n`.
fn top_by<T>(mut rows: Vec<T>, n: usize, key: impl Fn(&T) -> (u64, CountryCode)) -> Vec<T> {
    rows.sort_by(|a, b| {
        let (ka, ca) = key(a);
        let (kb, cb) = key(b);
        kb.cmp(&ka).then(ca.cmp(&cb))
    });
    rows.truncate(n);
    rows
}

pub fn report(agg: &Aggregate, w: &WorldModel, top_n: usize) -> ExposureReport {
    let total = agg.paths;
    let countries: BTreeSet<CountryCode> = agg
        .roles
        .keys()
        .map(|k| k.0)
        .chain(agg.benefactors.keys().map(|k| k.0))
        .collect();

    let role_dons = |c: CountryCode| RoleDons {
        source: ByExposure::build(|e| agg.role(c, Role::Source, e).into()),
        transit: ByExposure::build(|e| agg.role(c, Role::Transit, e).into()),
        destination: ByExposure::build(|e| agg.role(c, Role::Destination, e).into()),
    };
    let country_rows = countries
        .iter()
        .map(|&c| CountryRow {
            iso2: c,
            region: w.region_of(c),
            roles: role_dons(c),
        })
        .collect();

    let bens = |e: Exposure| -> Vec<(CountryCode, BenefactorCounters)> {
        agg.benefactors
            .iter()
            .filter(|((_, ke), _)| *ke == e)
            .map(|((c, _), b)| (*c, *b))
            .collect()
    };
    let transit_providers = ByExposure::build(|e| {
        let rows = bens(e)
            .into_iter()
            .filter(|(_, b)| b.transited_paths > 0)
            .map(|(c, b)| TransitRow {
                iso2: c,
                transited_paths: b.transited_paths,
                ratio_of_paths: ratio(b.transited_paths, total),
                transit_don: don(b.transited_normal, b.transited_paths),
            })
            .collect();
        top_by(rows, top_n, |r: &TransitRow| (r.transited_paths, r.iso2))
    });
    let transit_only = ByExposure::build(|e| {
        let rows = bens(e)
            .into_iter()
            .filter(|(_, b)| b.transit_only_paths > 0)
            .map(|(c, b)| TransitOnlyRow {
                iso2: c,
                transit_only_paths: b.transit_only_paths,
                ratio_of_paths: ratio(b.transit_only_paths, total),
                transit_only_don: don(b.transit_only_normal, b.transit_only_paths),
            })
            .collect();
        top_by(rows, top_n, |r: &TransitOnlyRow| {
            (r.transit_only_paths, r.iso2)
        })
    });
    let benefactors = ByExposure::build(|e| {
        let rows = bens(e)
            .into_iter()
            .filter(|(_, b)| b.benefited_paths > 0)
            .map(|(c, b)| BenefactorRow {
                iso2: c,
                benefited_paths: b.benefited_paths,
            })
            .collect();
        top_by(rows, top_n, |r: &BenefactorRow| (r.benefited_paths, r.iso2))
    });
    let benefactor_transit_ratio = ByExposure::build(|e| {
        bens(e)
            .into_iter()
            .filter(|(_, b)| b.transited_paths > 0)
            .map(|(c, b)| BenefactorRatioRow {
                iso2: c,
                benefited_paths: b.benefited_paths,
                transited_paths: b.transited_paths,
                ratio: don(b.benefited_paths, b.transited_paths),
            })
            .collect()
    });

    let region_counter = |r: Region, role: Role, e: Exposure| -> DonCell {
        agg.region_roles
            .get(&(r, role, e))
            .copied()
            .unwrap_or_default()
            .into()
    };
    let regions = Region::ALL
        .iter()
        .map(|&r| RegionRow {
            region: r,
            roles: RoleDons {
                source: ByExposure::build(|e| region_counter(r, Role::Source, e)),
                transit: ByExposure::build(|e| region_counter(r, Role::Transit, e)),
                destination: ByExposure::build(|e| region_counter(r, Role::Destination, e)),
            },
        })
        .collect();
    let region_matrix = ByExposure::build(|e| {
        let mut cells = Vec::with_capacity(25);
        for from in Region::ALL {
            for to in Region::ALL {
                cells.push(MatrixCell {
                    from,
                    to,
                    cell: agg
                        .region_matrix
                        .get(&(from, to, e))
                        .copied()
                        .unwrap_or_default()
                        .into(),
                });
            }
        }
        cells
    });

    let count_bins = |e: Exposure, m: &BTreeMap<(Exposure, usize), u64>| -> Vec<CountBin> {
        m.iter()
            .filter(|((ke, _), _)| *ke == e)
            .map(|((_, bin), n)| CountBin {
                bin: *bin,
                paths: *n,
            })
            .collect()
    };
    let don_bins = |e: Exposure, m: &BTreeMap<(Exposure, usize), Counter>| -> Vec<DonBin> {
        m.iter()
            .filter(|((ke, _), _)| *ke == e)
            .map(|((_, bin), c)| DonBin {
                bin: *bin,
                cell: (*c).into(),
            })
            .collect()
    };
    let histograms = HistogramSection {
        severity: ByExposure::build(|e| count_bins(e, &agg.severity)),
        tuple_len_don: ByExposure::build(|e| don_bins(e, &agg.tuple_len_don)),
        as_count_don: ByExposure::build(|e| don_bins(e, &agg.as_count_don)),
        union_added: agg
            .union_added
            .iter()
            .map(|(bin, n)| CountBin {
                bin: *bin,
                paths: *n,
            })
            .collect(),
    };

    ExposureReport {
        header: None,
        paths: PathTotals {
            classified: agg.paths,
            unclassifiable_counted: agg.unclassifiable_paths,
            skipped: agg.skips.total(),
            skips: agg.skips.clone(),
        },
        global: ByExposure::build(|e| agg.global.get(&e).copied().unwrap_or_default().into()),
        countries: country_rows,
        transit_providers,
        transit_only,
        benefactors,
        benefactor_transit_ratio,
        regions,
        region_matrix,
        histograms,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl ExposureReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Per-table delimited text, as (file name, contents).
    pub fn table_exports(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for e in Exposure::ALL {
            let tag = e.as_str();
            let mut t =
                String::from("country,ratio_of_paths_transited,transit_don,transited_paths\n");
            for r in self.transit_providers.get(e) {
                let _ = writeln!(
                    t,
                    "{},{:.6},{},{}",
                    r.iso2,
                    r.ratio_of_paths,
                    fmt_opt(r.transit_don),
                    r.transited_paths
                );
            }
            out.push((format!("transit_providers_{tag}.csv"), t));

            let mut t = String::from(
                "country,transit_only_over_total,transit_only_don,transit_only_paths\n",
            );
            for r in self.transit_only.get(e) {
                let _ = writeln!(
                    t,
                    "{},{:.6},{},{}",
                    r.iso2,
                    r.ratio_of_paths,
                    fmt_opt(r.transit_only_don),
                    r.transit_only_paths
                );
            }
            out.push((format!("transit_only_{tag}.csv"), t));

            let mut t = String::from("country,paths_benefited_from\n");
            for r in self.benefactors.get(e) {
                let _ = writeln!(t, "{},{}", r.iso2, r.benefited_paths);
            }
            out.push((format!("benefactors_{tag}.csv"), t));

            let mut t = String::from("country,benefited_paths,transited_paths,ratio\n");
            for r in self.benefactor_transit_ratio.get(e) {
                let _ = writeln!(
                    t,
                    "{},{},{},{}",
                    r.iso2,
                    r.benefited_paths,
                    r.transited_paths,
                    fmt_opt(r.ratio)
                );
            }
            out.push((format!("benefactor_transit_ratio_{tag}.csv"), t));

            let mut t = String::from("region,source_don,transit_don,destination_don\n");
            for r in &self.regions {
                let _ = writeln!(
                    t,
                    "{},{},{},{}",
                    r.region,
                    fmt_opt(r.roles.source.get(e).don),
                    fmt_opt(r.roles.transit.get(e).don),
                    fmt_opt(r.roles.destination.get(e).don)
                );
            }
            out.push((format!("regions_{tag}.csv"), t));

            let mut t = String::from("from\\to");
            for r in Region::ALL {
                let _ = write!(t, ",{r}");
            }
            t.push('\n');
            for (i, from) in Region::ALL.iter().enumerate() {
                let _ = write!(t, "{from}");
                for cell in &self.region_matrix.get(e)[i * 5..i * 5 + 5] {
                    let _ = write!(t, ",{}", fmt_opt(cell.cell.don));
                }
                t.push('\n');
            }
            out.push((format!("region_matrix_{tag}.csv"), t));

            let mut t = String::from("country,region,source_don,source_paths,transit_don,transit_paths,destination_don,destination_paths\n");
            for c in &self.countries {
                let (s, tr, d) = (
                    c.roles.source.get(e),
                    c.roles.transit.get(e),
                    c.roles.destination.get(e),
                );
                let _ = writeln!(
                    t,
                    "{},{},{},{},{},{},{},{}",
                    c.iso2,
                    c.region.map(|r| r.to_string()).unwrap_or_default(),
                    fmt_opt(s.don),
                    s.total,
                    fmt_opt(tr.don),
                    tr.total,
                    fmt_opt(d.don),
                    d.total
                );
            }
            out.push((format!("countries_{tag}.csv"), t));
        }
        out
    }

    /// Two-column plot data for each histogram and per-role country DoN CDF.
    pub fn plot_exports(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for e in Exposure::ALL {
            let tag = e.as_str();
            let mut t = String::from("benefactors,paths\n");
            for b in self.histograms.severity.get(e) {
                let _ = writeln!(t, "{},{}", b.bin, b.paths);
            }
            out.push((format!("severity_{tag}.csv"), t));
            for (name, bins) in [
                ("tuple_len_don", self.histograms.tuple_len_don.get(e)),
                ("as_count_don", self.histograms.as_count_don.get(e)),
            ] {
                let mut t = String::from("length,don\n");
                for b in bins {
                    let _ = writeln!(t, "{},{}", b.bin, fmt_opt(b.cell.don));
                }
                out.push((format!("{name}_{tag}.csv"), t));
            }
            for (role, pick) in [
                ("source", Role::Source),
                ("transit", Role::Transit),
                ("destination", Role::Destination),
            ] {
                let mut vals: Vec<f64> = self
                    .countries
                    .iter()
                    .filter_map(|c| {
                        let cells = match pick {
                            Role::Source => &c.roles.source,
                            Role::Transit => &c.roles.transit,
                            Role::Destination => &c.roles.destination,
                        };
                        cells.get(e).don
                    })
                    .collect();
                vals.sort_by(f64::total_cmp);
                let n = vals.len();
                let mut t = String::from("don,cumulative_fraction\n");
                for (i, v) in vals.iter().enumerate() {
                    let _ = writeln!(t, "{v:.6},{:.6}", (i + 1) as f64 / n as f64);
                }
                out.push((format!("cdf_{role}_don_{tag}.csv"), t));
            }
        }
        let mut t = String::from("added_countries,paths\n");
        for b in &self.histograms.union_added {
            let _ = writeln!(t, "{},{}", b.bin, b.paths);
        }
        out.push(("union_added.csv".into(), t));
        out
    }
}
