mod common;

use proptest::prelude::*;
use rand::Rng;
use rust_decimal::Decimal;
use svc_post::evaluation::*;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn fixture(name: &str) -> String {
    format!("{FIXTURES}/{name}")
}

/// Mean and 1.96 * s / sqrt(n) computed directly, independent of the crate.
fn oracle(scores: &[u8]) -> (f64, f64) {
    let n = scores.len() as f64;
    let mut sum = 0.0;
    for &s in scores {
        sum += s as f64;
    }
    let mean = sum / n;
    if scores.len() < 2 {
        return (mean, 0.0);
    }
    let mut ss = 0.0;
    for &s in scores {
        ss += (s as f64 - mean) * (s as f64 - mean);
    }
    (mean, 1.96 * (ss / (n - 1.0)).sqrt() / n.sqrt())
}

#[test]
fn small_fixture_loads_field_by_field() {
    let r = load_ratings(fixture("ratings_small.csv")).unwrap();
    assert_eq!(r.len(), 4);
    assert_eq!(r[0].listener_id, "L01");
    assert_eq!(r[0].listener_group, ListenerGroup::Ordinary);
    assert_eq!(r[0].system, "baseline");
    assert_eq!(r[0].clip_id, "vibrato_01");
    assert_eq!(r[0].dimension, Dimension::VocalNaturalness);
    assert_eq!(r[0].score, 3);
    assert_eq!(r[2].listener_group, ListenerGroup::Professional);
    assert_eq!(r[2].dimension, Dimension::TechniqueReproduction);
    assert_eq!(r[3].dimension, Dimension::ToneSimilarity);
    assert_eq!(r[3].score, 2);
}

#[test]
fn hundred_seeded_scores_match_oracle() {
    let mut rng = common::rng(100);
    let scores: Vec<u8> = (0..100).map(|_| rng.gen_range(1..=5)).collect();
    let cell = mos_with_ci(&scores).unwrap();
    let (mean, ci) = oracle(&scores);
    assert!((cell.mean - mean).abs() < 1e-12);
    assert!((cell.ci_halfwidth - ci).abs() < 1e-12);
    assert_eq!(cell.n, 100);
}

#[test]
fn engineered_cell_renders_two_decimals() {
    let records = load_ratings(fixture("ratings_three_systems.csv")).unwrap();
    assert_eq!(records.len(), 1200);
    let report = aggregate_report(&records, &[], &[], Pooling::AllListeners).unwrap();
    let row = report.rows.iter().find(|r| r.system == "proposed").unwrap();
    let cell = row.cell(Dimension::VocalNaturalness);
    assert_eq!(cell.n, 100);
    assert_eq!(cell.render(), "4.11 ± 0.08");
    assert!(report.render_text().contains("4.11 ± 0.08"));
}

#[test]
fn disjoint_systems_match_per_cell_oracle() {
    let records = load_ratings(fixture("ratings_three_systems.csv")).unwrap();
    let order = vec!["proposed".to_string(), "ddsp".to_string()];
    let report = aggregate_report(&records, &order, &[], Pooling::AllListeners).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.rows[0].system, "proposed");
    for row in &report.rows {
        for d in Dimension::ALL {
            let scores: Vec<u8> = records
                .iter()
                .filter(|r| r.system == row.system && r.dimension == d)
                .map(|r| r.score)
                .collect();
            let (mean, ci) = oracle(&scores);
            let cell = row.cell(d);
            assert!((cell.mean - mean).abs() < 1e-12);
            assert!((cell.ci_halfwidth - ci).abs() < 1e-12);
        }
    }
}

#[test]
fn cells_partition_the_records() {
    let records = load_ratings(fixture("ratings_three_systems.csv")).unwrap();
    for pooling in [Pooling::AllListeners, Pooling::ByGroup] {
        let report = aggregate_report(&records, &[], &[], pooling).unwrap();
        let total: usize = report
            .rows
            .iter()
            .flat_map(|r| r.cells.iter())
            .map(|c| c.n)
            .sum();
        assert_eq!(total, records.len());
    }
}

#[test]
fn missing_system_is_reported() {
    let records = load_ratings(fixture("ratings_three_systems.csv")).unwrap();
    let order = vec!["proposed".to_string(), "absent".to_string()];
    let err = aggregate_report(&records, &order, &[], Pooling::AllListeners).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("(absent, vocal_naturalness)"), "{msg}");
    assert!(msg.contains("(absent, tone_similarity)"));
}

#[test]
fn cos_sim_column_is_mean_over_pairs() {
    let records = load_ratings(fixture("ratings_three_systems.csv")).unwrap();
    let pairs = load_embedding_pairs(fixture("pairs_multi.txt")).unwrap();
    assert_eq!(pairs.len(), 4);
    let report = aggregate_report(&records, &[], &pairs, Pooling::AllListeners).unwrap();
    let row = report.rows.iter().find(|r| r.system == "proposed").unwrap();
    // Three pairs, oracle mean computed in Python.
    assert_eq!(row.cos_sim_pairs, 3);
    assert!((row.cos_sim.unwrap() - 0.9738297131424701).abs() < 1e-12);
    assert!(report.render_text().contains("| 0.9738"));
    let ddsp = report.rows.iter().find(|r| r.system == "ddsp").unwrap();
    assert_eq!(ddsp.cos_sim, None);
}

#[test]
fn technique_manifest_totals() {
    let m = load_manifest(fixture("techniques.csv")).unwrap();
    assert_eq!(m.totals.techniques, 21);
    assert_eq!(m.totals.clips, 132);
    assert_eq!(m.totals.duration_min, Decimal::new(2601, 2));
    let bel = m
        .entries
        .iter()
        .find(|e| e.technique == "Bel Canto")
        .unwrap();
    assert_eq!(bel.duration_min, Decimal::new(114, 2));
}

#[test]
fn technique_manifest_subsets() {
    let m = load_manifest(fixture("techniques.csv")).unwrap();
    let f = select_subset(
        &m.entries,
        &ManifestFilter {
            gender: Some(Gender::F),
            ..Default::default()
        },
    );
    let names: Vec<&str> = f.entries.iter().map(|e| e.technique.as_str()).collect();
    assert_eq!(
        names,
        [
            "Sobbing",
            "Ultra High Pitch",
            "Pharyngeal Sound",
            "Folk",
            "Rock",
            "Jazz"
        ]
    );
    let g = select_subset(
        &m.entries,
        &ManifestFilter {
            techniques: vec!["Growling".into()],
            gender: None,
        },
    );
    assert_eq!(g.entries.len(), 1);
    assert_eq!(g.entries[0].number, 4);
    assert_eq!(select_subset(&m.entries, &ManifestFilter::default()), m);
}

#[test]
fn mutated_manifest_rows_fail_with_line_numbers() {
    let text = std::fs::read_to_string(fixture("techniques.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let header_line = lines
        .iter()
        .position(|l| l.starts_with("technique,"))
        .unwrap();
    for (row, mutation, field) in [
        (3, ",FM,", ",X,"),
        (9, ",M,3", ",M,0"),
        (15, "1.14", "1:14"),
        (0, ",FM,13", ",FM,-2"),
    ] {
        let target = header_line + 1 + row;
        let mut mutated: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        assert!(mutated[target].contains(mutation), "{}", mutated[target]);
        mutated[target] = mutated[target].replacen(mutation, field, 1);
        let err = parse_manifest(&mutated.join("\n")).unwrap_err();
        match err {
            EvalError::Field { line, .. } => assert_eq!(line as usize, target + 1),
            other => panic!("unexpected {other}"),
        }
    }
}

proptest! {
    #[test]
    fn mos_matches_oracle_and_is_permutation_invariant(
        mut scores in prop::collection::vec(1u8..=5, 1..200),
        seed in any::<u64>(),
    ) {
        let cell = mos_with_ci(&scores).unwrap();
        let (mean, ci) = oracle(&scores);
        prop_assert!((cell.mean - mean).abs() < 1e-12);
        prop_assert!((cell.ci_halfwidth - ci).abs() < 1e-12);
        let mut r = common::rng(seed);
        for i in (1..scores.len()).rev() {
            scores.swap(i, r.gen_range(0..=i));
        }
        let shuffled = mos_with_ci(&scores).unwrap();
        prop_assert!((shuffled.mean - cell.mean).abs() < 1e-12);
        prop_assert!((shuffled.ci_halfwidth - cell.ci_halfwidth).abs() < 1e-12);
    }

    #[test]
    fn mos_is_translation_covariant(scores in prop::collection::vec(1u8..=3, 2..100), shift in 0u8..=2) {
        let base = mos_with_ci(&scores).unwrap();
        let moved: Vec<u8> = scores.iter().map(|s| s + shift).collect();
        let cell = mos_with_ci(&moved).unwrap();
        prop_assert!((cell.mean - base.mean - shift as f64).abs() < 1e-12);
        prop_assert!((cell.ci_halfwidth - base.ci_halfwidth).abs() < 1e-12);
    }
}
