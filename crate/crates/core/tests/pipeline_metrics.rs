mod common;

use std::collections::BTreeMap;
use std::io::Cursor;

use geonormal::cli::{load_enrichment, load_world_for};
use geonormal::metrics::{report, BenefactorCounters, Counter};
use geonormal::pipeline::{
    classify_with, to_tuple_path, Classified, Pipeline, RecordReader, SkipReason, TupleHop,
    UnclassifiablePolicy,
};
use geonormal::{
    normal_set, Aggregate, Asn, CountryCode, Enrichment, Exposure, PairCache, PointMode, Role,
    TracerouteRecord, TuplePath, WorldModel,
};
use proptest::prelude::*;

fn cc(s: &str) -> CountryCode {
    s.parse().unwrap()
}

struct Data {
    _dir: tempfile::TempDir,
    world: WorldModel,
    enrichment: Enrichment,
    records: Vec<TracerouteRecord>,
}

fn data(n: usize, seed: u64) -> Data {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::write_grid_dataset(dir.path(), n, seed);
    let (world, _) = load_world_for(&cfg).unwrap();
    let enrichment = load_enrichment(&cfg).unwrap();
    let records = common::random_traceroutes(n, seed)
        .lines()
        .map(|l| TracerouteRecord::from_json(l).unwrap())
        .collect();
    Data {
        _dir: dir,
        world,
        enrichment,
        records,
    }
}

fn classify_all(d: &Data, policy: UnclassifiablePolicy) -> Vec<Classified> {
    let cache = PairCache::default();
    let p = Pipeline {
        world: &d.world,
        enrichment: &d.enrichment,
        cache: &cache,
        mode: PointMode::Population,
        unclassifiable: policy,
    };
    let (mut out, _) = p.process_batch(&d.records).unwrap();
    out.sort_by(|a, b| format!("{:?}", a.0).cmp(&format!("{:?}", b.0)));
    out
}

#[test]
fn union_benefactors_cover_physical_ones() {
    let d = data(1000, 11);
    for (tp, pc) in classify_all(&d, UnclassifiablePolicy::Exclude) {
        assert!(
            pc.union.benefactors.is_superset(&pc.physical.benefactors),
            "{tp:?}"
        );
        assert!(
            pc.union.benefactors.is_superset(&pc.legal.benefactors),
            "{tp:?}"
        );
        assert!(
            !pc.union.normal || (pc.physical.normal && pc.legal.normal),
            "{tp:?}"
        );
    }
}

#[test]
fn batch_matches_one_by_one() {
    let d = data(500, 12);
    let cache = PairCache::default();
    let p = Pipeline {
        world: &d.world,
        enrichment: &d.enrichment,
        cache: &cache,
        mode: PointMode::Population,
        unclassifiable: UnclassifiablePolicy::Exclude,
    };
    let (batch, skips) = p.process_batch(&d.records).unwrap();
    let mut serial = Vec::new();
    let mut skipped = 0;
    for r in &d.records {
        match p.process(r).unwrap() {
            geonormal::pipeline::RecordOutcome::Classified(c) => serial.push(*c),
            geonormal::pipeline::RecordOutcome::Skipped(_) => skipped += 1,
        }
    }
    assert_eq!(skips.total(), skipped);
    assert_eq!(batch.len(), serial.len());
    for c in &serial {
        assert!(batch.contains(c));
    }
}

#[test]
fn tuple_paths_are_idempotent_under_compression() {
    let d = data(300, 13);
    for r in &d.records {
        if let Ok(tp) = to_tuple_path(r, &d.enrichment) {
            assert_eq!(geonormal::pipeline::compress(&tp.hops), tp.hops);
            assert!(tp.hops.len() + tp.dropped_hops <= r.hops.len());
            assert!(tp.unresponsive_hops <= tp.dropped_hops);
        }
    }
}

#[test]
fn reader_streams_what_was_written() {
    let text = common::random_traceroutes(50, 14);
    let with_noise = format!("# header comment\n\n{text}");
    let mut reader = RecordReader::new(Cursor::new(with_noise));
    let first = reader.next_chunk(20).unwrap();
    let rest = reader.next_chunk(1000).unwrap();
    assert_eq!(first.len(), 20);
    assert_eq!(rest.len(), 30);
    assert!(reader.next_chunk(10).unwrap().is_empty());
    assert_eq!(reader.records_read(), 50);
}

fn brute_force_benefited(cs: &[Classified], e: Exposure) -> BTreeMap<CountryCode, u64> {
    let mut out = BTreeMap::new();
    for (_, pc) in cs {
        let v = match e {
            Exposure::Physical => &pc.physical,
            Exposure::Legal => &pc.legal,
            Exposure::Union => &pc.union,
        };
        for c in &v.benefactors {
            *out.entry(*c).or_default() += 1;
        }
    }
    out
}

#[test]
fn aggregate_counts_match_brute_force() {
    let d = data(2000, 15);
    let cs = classify_all(&d, UnclassifiablePolicy::Exclude);
    let mut agg = Aggregate::new();
    for (tp, pc) in &cs {
        agg.accumulate(tp, pc, &d.world);
    }
    assert_eq!(agg.paths as usize, cs.len());
    for e in Exposure::ALL {
        let brute = brute_force_benefited(&cs, e);
        for c in d.world.codes() {
            let got = agg.benefactor(c, e).benefited_paths;
            assert_eq!(got, brute.get(&c).copied().unwrap_or(0), "{c} {e:?}");
        }
        let severity: u64 = agg
            .severity
            .iter()
            .filter(|((x, _), _)| *x == e)
            .map(|(_, n)| n)
            .sum();
        assert_eq!(severity, agg.paths);
        let normal = agg.severity.get(&(e, 0)).copied().unwrap_or(0);
        assert_eq!(normal, agg.global[&e].normal);
    }
    let phys = agg.global_don(Exposure::Physical).unwrap();
    let union = agg.global_don(Exposure::Union).unwrap();
    assert!(union <= phys);
    for c in d.world.codes() {
        for role in [Role::Source, Role::Transit, Role::Destination] {
            for e in Exposure::ALL {
                if let Some(x) = agg.role(c, role, e).don() {
                    assert!((0.0..=1.0).contains(&x));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn merge_equals_serial(seed in 0u64..1000, cut_a in 0usize..400, cut_b in 0usize..400) {
        let d = data(400, seed);
        let cs = classify_all(&d, UnclassifiablePolicy::CountNonNormal);
        let (lo, hi) = (cut_a.min(cut_b).min(cs.len()), cut_a.max(cut_b).min(cs.len()));
        let mut serial = Aggregate::new();
        for (tp, pc) in &cs {
            serial.accumulate(tp, pc, &d.world);
        }
        let part = |range: &[Classified]| {
            let mut a = Aggregate::new();
            for (tp, pc) in range {
                a.accumulate(tp, pc, &d.world);
            }
            a
        };
        let (a, b, c) = (part(&cs[..lo]), part(&cs[lo..hi]), part(&cs[hi..]));
        let mut left = a.clone();
        left.merge(&b);
        left.merge(&c);
        let mut right = c.clone();
        right.merge(&a);
        right.merge(&b);
        prop_assert_eq!(&left, &serial);
        prop_assert_eq!(&right, &serial);
        let mut with_empty = serial.clone();
        with_empty.merge(&Aggregate::new());
        prop_assert_eq!(&with_empty, &serial);
    }
}

fn hop(c: &str, asn: u32, legal: &str) -> TupleHop {
    TupleHop {
        phys_country: cc(c),
        asn: Asn::new(asn).unwrap(),
        legal_country: Some(cc(legal)),
    }
}

fn path(src: &str, dst: &str, hops: Vec<TupleHop>) -> TuplePath {
    TuplePath {
        src_country: cc(src),
        dst_country: cc(dst),
        hops,
        dropped_hops: 0,
        unresponsive_hops: 0,
    }
}

#[test]
fn back_tracking_through_a_third_country() {
    let w = common::grid_world();
    // QA and QC are both on the bottom row; QJ sits one row up
    let tp = path(
        "QA",
        "QC",
        vec![hop("QA", 1, "QA"), hop("QJ", 2, "QJ"), hop("QC", 3, "QC")],
    );
    let ns = normal_set(&w, tp.src_country, tp.dst_country, PointMode::Population).unwrap();
    assert!(!ns.contains(cc("QJ")));
    let pc = classify_with(&tp, &ns);
    let mut agg = Aggregate::new();
    agg.accumulate(&tp, &pc, &w);
    let e = Exposure::Physical;
    assert_eq!(
        agg.role(cc("QJ"), Role::Transit, e),
        Counter {
            normal: 0,
            total: 1
        }
    );
    assert_eq!(
        agg.benefactor(cc("QJ"), e),
        BenefactorCounters {
            benefited_paths: 1,
            transited_paths: 1,
            transited_normal: 0,
            transit_only_paths: 1,
            transit_only_normal: 0,
        }
    );
    assert_eq!(
        agg.role(cc("QA"), Role::Source, e),
        Counter {
            normal: 0,
            total: 1
        }
    );
    assert_eq!(agg.severity.get(&(e, 1)), Some(&1));
}

#[test]
fn repeated_transit_counts_once_per_path() {
    let w = common::grid_world();
    let tp = path(
        "QA",
        "QC",
        vec![
            hop("QA", 1, "QA"),
            hop("QB", 2, "QB"),
            hop("QJ", 4, "QJ"),
            hop("QB", 5, "QB"),
            hop("QC", 3, "QC"),
        ],
    );
    let ns = normal_set(&w, tp.src_country, tp.dst_country, PointMode::Population).unwrap();
    let pc = classify_with(&tp, &ns);
    let mut agg = Aggregate::new();
    agg.accumulate(&tp, &pc, &w);
    assert_eq!(
        agg.role(cc("QB"), Role::Transit, Exposure::Physical).total,
        1
    );
}

#[test]
fn domestic_path_counts_source_and_destination() {
    let w = common::grid_world();
    let tp = path("QA", "QA", vec![hop("QA", 1, "QA")]);
    let ns = normal_set(&w, tp.src_country, tp.dst_country, PointMode::Population).unwrap();
    let pc = classify_with(&tp, &ns);
    let mut agg = Aggregate::new();
    agg.accumulate(&tp, &pc, &w);
    for role in [Role::Source, Role::Destination] {
        assert_eq!(
            agg.role(cc("QA"), role, Exposure::Physical),
            Counter {
                normal: 1,
                total: 1
            }
        );
    }
    assert_eq!(
        agg.role(cc("QA"), Role::Transit, Exposure::Physical).total,
        0
    );
}

#[test]
fn empty_tuple_path_is_normal() {
    let w = common::grid_world();
    let tp = path("QA", "QX", vec![]);
    let ns = normal_set(&w, tp.src_country, tp.dst_country, PointMode::Population).unwrap();
    let pc = classify_with(&tp, &ns);
    assert!(pc.physical.normal && pc.legal.normal && pc.union.normal);
}

#[test]
fn all_normal_report_has_no_benefactors() {
    let w = common::grid_world();
    let mut agg = Aggregate::new();
    for (s, d) in [("QA", "QB"), ("QB", "QC"), ("QC", "QC")] {
        let tp = path(s, d, vec![hop(s, 1, s), hop(d, 2, d)]);
        let ns = normal_set(&w, tp.src_country, tp.dst_country, PointMode::Population).unwrap();
        agg.accumulate(&tp, &classify_with(&tp, &ns), &w);
    }
    let rep = report(&agg, &w, 5);
    for e in Exposure::ALL {
        assert_eq!(rep.global.get(e).don, Some(1.0));
        assert!(rep.benefactors.get(e).is_empty());
    }
}

#[test]
fn skip_reasons_are_logged() {
    let d = data(3000, 16);
    let cache = PairCache::default();
    let p = Pipeline {
        world: &d.world,
        enrichment: &d.enrichment,
        cache: &cache,
        mode: PointMode::Population,
        unclassifiable: UnclassifiablePolicy::Exclude,
    };
    let (cs, skips) = p.process_batch(&d.records).unwrap();
    assert_eq!(cs.len() as u64 + skips.total(), d.records.len() as u64);
    assert!(skips.count(SkipReason::UnresolvedSource) > 0);
    assert!(skips.count(SkipReason::EmptyPath) > 0);
}
