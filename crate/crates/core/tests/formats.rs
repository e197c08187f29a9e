use entangled_control::certify::{certify_separation, CertifyOptions};
use entangled_control::exact::{q, qi, Exact};
use entangled_control::ks::{validate_basis_set, verify_ks_property, KsBasisSet, Violation};
use entangled_control::witsenhausen::{make_instance, optimal_strategy, DeterministicStrategy};
use entangled_control::zero_error::{build_ks_channel, confusability_graph, ConfusabilityGraph, FiniteChannel};
use entangled_control::Error;

#[test]
fn ks_set_file_round_trips() {
    let set = KsBasisSet::bundled();
    let back = KsBasisSet::from_json(&set.to_json()).unwrap();
    assert_eq!(back, set);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.json");
    std::fs::write(&path, set.to_json()).unwrap();
    assert_eq!(KsBasisSet::load(&path).unwrap(), set);
}

#[test]
fn common_denominator_and_complex_entries() {
    // (1, ±i)/√2 is orthogonal only under the conjugated inner product
    let text = r#"{
        "label": "qubit", "q": 2, "d": 2, "norm_sq": 2,
        "bases": [
            [{"entries": [[1,0],[0,0]], "norm_sq": 1}, {"entries": [[0,0],[1,0]], "norm_sq": 1}],
            [[[1,0],[0,1]], [[1,0],[0,-1]]]
        ]
    }"#;
    let set = KsBasisSet::from_json(text).unwrap();
    assert!(validate_basis_set(&set).passed);
    assert!(!verify_ks_property(&set).holds);
}

#[test]
fn wrong_normalisation_is_reported() {
    let text = r#"{"q": 1, "d": 2, "bases": [[[[1,0],[1,0]], [[1,0],[-1,0]]]]}"#;
    let report = validate_basis_set(&KsBasisSet::from_json(text).unwrap());
    assert!(!report.passed);
    assert!(matches!(
        report.first_failure().unwrap().violation,
        Some(Violation::NotUnit {
            numerator_norm_sq: 2,
            norm_sq: 1,
            ..
        })
    ));
}

#[test]
fn malformed_sets_are_rejected() {
    for text in [
        r#"{"q": 2, "d": 2, "bases": [[[[1,0],[0,0]], [[0,0],[1,0]]]]}"#,
        r#"{"q": 1, "d": 2, "bases": [[[[1,0],[0,0]]]]}"#,
        r#"{"q": 1, "d": 2, "bases": [[[[1,0]], [[0,0],[1,0]]]]}"#,
        r#"{"q": 1, "d": 2, "extra": 1, "bases": []}"#,
    ] {
        assert!(KsBasisSet::from_json(text).is_err(), "{text}");
    }
    assert!(matches!(KsBasisSet::load("/nonexistent/x.json"), Err(Error::Io { .. })));
}

#[test]
fn channel_and_graph_exports_round_trip() {
    let ch = build_ks_channel(&KsBasisSet::bundled()).unwrap();
    assert_eq!(FiniteChannel::from_json(&ch.to_json()).unwrap(), ch);
    let g = confusability_graph(&ch);
    let text = g.to_edge_list();
    let back = ConfusabilityGraph::from_edge_list(&text).unwrap();
    assert_eq!(back.edges(), g.edges());
    assert_eq!(back.labels(), g.labels());
}

#[test]
fn strategy_file_round_trips() {
    let inst = make_instance(KsBasisSet::bundled(), 10, qi(1), None).unwrap();
    let c1 = DeterministicStrategy::from_message_table(&inst, &[0, 1, -2, 3, 0, 5]).c1;
    let s = optimal_strategy(&inst, c1).unwrap();
    let text = s.to_json();
    assert_eq!(DeterministicStrategy::from_json(&text).unwrap(), s);
    assert!(DeterministicStrategy::from_json("{\"c1\": 3}").is_err());
}

#[test]
fn exact_values_carry_both_renderings() {
    let v = serde_json::to_value(Exact(q(7, 2))).unwrap();
    assert_eq!(v["exact"], "7/2");
    assert_eq!(v["decimal"], "3.5");
    let back: Exact = serde_json::from_value(v).unwrap();
    assert_eq!(back.0, q(7, 2));
}

#[test]
fn certificate_json_is_reproducible() {
    let set = KsBasisSet::bundled();
    let run = |workers| {
        let opts = CertifyOptions {
            t: Some(39),
            window: Some(4),
            workers: Some(workers),
            ..Default::default()
        };
        certify_separation(&set, qi(1), q(7, 2), &opts).unwrap().to_json()
    };
    let a = run(1);
    assert_eq!(a, run(4));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["verdict"], "certified");
    assert_eq!(v["bounds"]["mx_sq"]["exact"], "21");
    assert_eq!(v["quantum_cost"]["decimal"], "3.5");
    assert!(!v["search"]["best_strategy"]["c2"].as_array().unwrap().is_empty());
}
