use manualgen::data;
use manualgen::stats::{
    compare_tables, cross_tab, kwic, local_mean_table, parse_tsv, t_test, to_tsv, CodedCorpus, FrequencyTable,
    Partition, Row, StatsError, EMPTY_CELL,
};
use manualgen::{ElementKind, Genre};
use proptest::prelude::*;

const FIXTURE: &str = include_str!("../data/fixtures/annotated-units.jsonl");

fn fixture() -> CodedCorpus {
    CodedCorpus::from_jsonl(FIXTURE, &data::network()).unwrap()
}

fn golden(system: &str, partition: Partition, file: &str) {
    let table = local_mean_table(&fixture(), &data::network(), system, partition).unwrap();
    assert_eq!(to_tsv(&table), file, "{system}");
}

#[test]
fn fixture_tables_match_hand_counts() {
    golden(
        "mood-system",
        Partition::ByElement,
        include_str!("../data/fixtures/mood-by-element.tsv"),
    );
    golden(
        "modal-system",
        Partition::ByElement,
        include_str!("../data/fixtures/modal-by-element.tsv"),
    );
    golden(
        "polarity",
        Partition::ByElement,
        include_str!("../data/fixtures/polarity-by-element.tsv"),
    );
    golden(
        "modal-subtype",
        Partition::ByElement,
        include_str!("../data/fixtures/modal-subtype-by-element.tsv"),
    );
    golden(
        "mood-system",
        Partition::ByGenre,
        include_str!("../data/fixtures/mood-by-genre.tsv"),
    );
}

#[test]
fn fixture_loads_with_metadata() {
    let c = fixture();
    assert_eq!(c.len(), 12);
    assert_eq!(c.meta.source, "hand-annotated");
    let again = CodedCorpus::from_jsonl(&c.to_jsonl(), &data::network()).unwrap();
    assert_eq!(again.units, c.units);
}

#[test]
fn inapplicable_units_leave_the_denominator() {
    let t = local_mean_table(&fixture(), &data::network(), "mood-system", Partition::ByElement).unwrap();
    assert_eq!(t.row("goal").unwrap().n, Some(1));
    let t = local_mean_table(&fixture(), &data::network(), "modal-subtype", Partition::ByElement).unwrap();
    assert_eq!(t.row("result").unwrap().cells, None);
    assert!(to_tsv(&t).contains(EMPTY_CELL));
}

#[test]
fn within_partitions() {
    let net = data::network();
    let t = local_mean_table(
        &fixture(),
        &net,
        "mood-system",
        Partition::ByElementWithinGenre(Genre::Procedure),
    )
    .unwrap();
    assert_eq!(t.cell("substep", "imperative"), Some(100.0));
    assert_eq!(t.row("result").unwrap().cells, None);
    let t = local_mean_table(
        &fixture(),
        &net,
        "polarity",
        Partition::ByGenreWithinElement(ElementKind::Constraint),
    )
    .unwrap();
    assert_eq!(t.cell("elaboration", "negative"), Some(50.0));
    assert_eq!(t.row("procedure").unwrap().cells, None);
    assert!(matches!(
        local_mean_table(&fixture(), &net, "nope", Partition::ByElement),
        Err(StatsError::UnknownSystem(_))
    ));
}

#[test]
fn cross_tab_of_fixture() {
    let t = cross_tab(&fixture());
    assert_eq!(t.row("procedure").unwrap().n, Some(3));
    assert!((t.cell("ready-reference", "function").unwrap() - 25.0).abs() < 1e-9);
    let one = CodedCorpus::new(fixture().units[..1].to_vec(), Default::default()).unwrap();
    let t = cross_tab(&one);
    assert_eq!(t.cell("procedure", "goal"), Some(100.0));
}

#[test]
fn rows_sum_to_a_hundred() {
    let net = data::network();
    for s in net.systems() {
        for p in [Partition::ByElement, Partition::ByGenre] {
            let t = local_mean_table(&fixture(), &net, &s.name, p).unwrap();
            for r in &t.rows {
                if let Some(c) = &r.cells {
                    assert!((c.iter().sum::<f64>() - 100.0).abs() < 0.1);
                }
                assert!(r.n.unwrap() <= 12);
            }
        }
    }
}

#[test]
fn reference_tables_parse() {
    for (name, body) in data::REFERENCE_TABLES {
        let t = parse_tsv(body).unwrap();
        for r in &t.rows {
            if let Some(c) = &r.cells {
                assert!((c.iter().sum::<f64>() - 100.0).abs() < 0.11, "{name} {}", r.label);
            }
        }
    }
}

/// Welch statistics from an independent statistics package:
/// (a, b, t, df).
fn oracle() -> Vec<(Vec<f64>, Vec<f64>, f64, f64)> {
    vec![
        (
            vec![2.1, 2.5, 2.3, 2.2],
            vec![3.1, 3.3, 3.0, 3.4],
            -7.400000000000006,
            5.9734513274336285,
        ),
        (
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            vec![2.0, 4.0, 6.0],
            -0.7385489458759964,
            3.532846715328467,
        ),
        (
            vec![0.97, 0.95, 0.99, 0.96, 0.98, 0.94],
            vec![0.44, 0.52, 0.40, 0.47, 0.46],
            24.10644255630477,
            5.211375521232552,
        ),
        (
            vec![10.0, 12.5, 9.8, 11.1, 10.4, 13.0, 9.9],
            vec![10.2, 10.9, 11.5, 10.0],
            0.5106878756657214,
            8.99707870137448,
        ),
        (
            vec![0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            -1.318794795457454,
            11.039812831518073,
        ),
    ]
}

#[test]
fn welch_matches_oracle() {
    for (a, b, t, df) in oracle() {
        let r = t_test(&a, &b, 0.05).unwrap();
        assert!((r.t - t).abs() < 1e-6, "{} vs {t}", r.t);
        assert!((r.df - df).abs() < 1e-6, "{} vs {df}", r.df);
        let self_test = t_test(&a, &a, 0.05).unwrap();
        assert_eq!(self_test.t, 0.0);
        assert!(!self_test.significant);
    }
    assert!(t_test(&oracle()[0].0, &oracle()[0].1, 0.05).unwrap().significant);
    assert!(!t_test(&oracle()[1].0, &oracle()[1].1, 0.05).unwrap().significant);
}

#[test]
fn concordance_over_fixture() {
    let c = fixture();
    let hits = kwic(&c.texts(), "fenêtre", 4);
    assert_eq!(hits.len(), 2);
    assert_eq!(hits[0].unit, 2);
    assert_eq!(hits[0].left, "Fermez la");
    assert_eq!(hits[0].right, "Rechercher");
    assert!(kwic(&c.texts(), "presse-papiers", 2)
        .iter()
        .all(|h| h.keyword == "presse-papiers"));
}

fn table_of(cells: Vec<(f64, bool)>) -> FrequencyTable {
    FrequencyTable {
        system: "polarity".into(),
        partition: "by-element".into(),
        row_header: "element".into(),
        features: vec!["positive".into(), "negative".into()],
        rows: cells
            .into_iter()
            .enumerate()
            .map(|(i, (p, empty))| Row {
                label: format!("r{i}"),
                n: None,
                cells: (!empty).then(|| vec![p, 100.0 - p]),
            })
            .collect(),
    }
}

proptest! {
    #[test]
    fn compare_is_symmetric(
        a in prop::collection::vec((0.0f64..100.0, any::<bool>()), 1..6),
        noise in prop::collection::vec((-5.0f64..5.0, any::<bool>()), 6),
        tol in 0.0f64..6.0,
    ) {
        let b: Vec<(f64, bool)> = a
            .iter()
            .zip(&noise)
            .map(|((p, e), (d, flip))| ((p + d).clamp(0.0, 100.0), if *flip { !e } else { *e }))
            .collect();
        let (ta, tb) = (table_of(a), table_of(b));
        let ab = compare_tables(&ta, &tb, tol).unwrap();
        let ba = compare_tables(&tb, &ta, tol).unwrap();
        prop_assert_eq!(ab.pass, ba.pass);
    }

    #[test]
    fn self_difference_is_zero(a in prop::collection::vec(-50.0f64..50.0, 2..20)) {
        let varied = a.iter().any(|x| (x - a[0]).abs() > 1e-9);
        prop_assume!(varied);
        prop_assert_eq!(t_test(&a, &a, 0.01).unwrap().t, 0.0);
    }
}
