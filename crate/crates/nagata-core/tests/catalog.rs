use std::fs;

use nagata_core::catalog::{
    builtin_catalog, classify_matches_entry, compare_to_prediction, experiment_id, load_record, lookup, round_sig,
    run_experiment, write_record, CatalogError, DimValue, ExperimentContext, ExperimentOutput, ExperimentRecord,
    ExperimentSpec, VerdictKind,
};
use nagata_core::cover_engine::{certify, ControlEntry, ControlSample};
use nagata_core::metric_lab::{fit, FitModel};
use serde_json::json;

fn ctx() -> ExperimentContext {
    ExperimentContext::default()
}

fn entry(s: f64, families: usize, bound: f64) -> ControlEntry {
    ControlEntry {
        scale: s,
        families,
        claimed_bound: bound,
        verified_bound: bound,
        interior_bound: bound,
        components: 10,
        boundary_components: 0,
        boundary_over_claim: 0,
        pass: true,
    }
}

fn cover_record(model: &str, families: usize) -> ExperimentRecord {
    let spec = ExperimentSpec::Cover {
        construction: "brick".into(),
        model: model.into(),
        radius: 30,
        scales: vec![2.0, 4.0, 8.0],
    };
    let entries = [2.0, 4.0, 8.0].iter().map(|&s| entry(s, families, 6.0 * s)).collect();
    ExperimentRecord {
        id: experiment_id(&spec),
        spec,
        output: ExperimentOutput::Cover { certificate: certify(model, 30, "brick", entries), params: vec![] },
        csv: None,
        started_unix_ms: 0,
        finished_unix_ms: 0,
        code_version: "test".into(),
    }
}

#[test]
fn lookups() {
    let v = |n: &str| lookup(n).unwrap().asdim_an.unwrap().value;
    assert_eq!(v("heisenberg"), DimValue::Finite(3));
    assert_eq!(v("Z^2"), DimValue::Finite(2));
    assert_eq!(v("lamplighter-Z2-Z2"), DimValue::Infinite);
    assert_eq!(lookup("heisenberg").unwrap().hirsch.unwrap().value, DimValue::Finite(3));
    assert_eq!(lookup("filiform4").unwrap().hirsch.unwrap().value, DimValue::Finite(4));
    assert_eq!(lookup("sol").unwrap().hirsch.unwrap().value, DimValue::Finite(3));
    assert!(lookup("sl2").is_some() && lookup("so3").is_some());
    assert!(lookup("nonesuch").is_none());
}

#[test]
fn infinity_is_a_tag() {
    let text = serde_json::to_string(&DimValue::Infinite).unwrap();
    assert!(!text.chars().any(|c| c.is_ascii_digit()), "{text}");
    let back: DimValue = serde_json::from_str(&text).unwrap();
    assert_eq!(back, DimValue::Infinite);
}

#[test]
fn every_prediction_has_a_citation() {
    for e in builtin_catalog() {
        for (what, p) in e.predictions() {
            assert!(!p.citation.trim().is_empty(), "{} {what}", e.name);
        }
    }
}

#[test]
fn classify_agrees_with_every_entry() {
    let mut checked = 0;
    for e in builtin_catalog() {
        if let Some(r) = classify_matches_entry(&e) {
            r.unwrap_or_else(|m| panic!("{}: {m}", e.name));
            checked += 1;
        }
    }
    assert!(checked >= 6, "{checked}");
}

#[test]
fn malformed_spec_lists_fields() {
    let bad = json!({"experiment": "cover", "model": "nope", "radius": -1});
    match run_experiment(&bad, &ctx()) {
        Err(CatalogError::InvalidSpec(errs)) => {
            let all = errs.join("\n");
            for f in ["construction", "model", "radius", "scales"] {
                assert!(all.contains(f), "{f} missing from {all}");
            }
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(run_experiment(&json!({"experiment": "dance"}), &ctx()), Err(CatalogError::InvalidSpec(_))));
    assert!(matches!(run_experiment(&json!([1, 2]), &ctx()), Err(CatalogError::InvalidSpec(_))));
}

#[test]
fn heisenberg_distortion_record() {
    let rec = run_experiment(
        &json!({"experiment": "distortion", "model": "heisenberg", "radius": 40, "subgroup": "center"}),
        &ctx(),
    )
    .unwrap();
    let ExperimentOutput::Distortion { power, .. } = &rec.output else { panic!() };
    let a = power.as_ref().unwrap().alpha;
    assert!((0.45..=0.55).contains(&a), "{a}");
    let v = compare_to_prediction(&rec, &lookup("heisenberg").unwrap()).unwrap();
    assert_eq!(v.verdict, VerdictKind::Pass, "{v:?}");
}

#[test]
fn brick_plane_record_passes() {
    let rec = run_experiment(
        &json!({"experiment": "cover", "construction": "brick", "model": "Z^2", "radius": 40, "scales": [2, 4, 8]}),
        &ctx(),
    )
    .unwrap();
    let ExperimentOutput::Cover { certificate, .. } = &rec.output else { panic!() };
    assert!(certificate.pass, "{certificate:?}");
    assert_eq!(certificate.families, 3);
    let v = compare_to_prediction(&rec, &lookup("Z^2").unwrap()).unwrap();
    assert_eq!(v.verdict, VerdictKind::Pass);
    assert_eq!(v.verdict.exit_code(), 0);
}

#[test]
fn verdict_rules() {
    let heis = lookup("heisenberg").unwrap();
    assert_eq!(compare_to_prediction(&cover_record("heisenberg", 4), &heis).unwrap().verdict, VerdictKind::Pass);
    assert_eq!(compare_to_prediction(&cover_record("Z^2", 3), &lookup("Z^2").unwrap()).unwrap().verdict, VerdictKind::Pass);
    // fewer families than the prediction allows contradicts it
    let fewer = compare_to_prediction(&cover_record("heisenberg", 3), &heis).unwrap();
    assert_eq!(fewer.verdict, VerdictKind::Fail);
    assert_eq!(fewer.verdict.exit_code(), 1);
    // a failing certificate never passes
    let mut failing = cover_record("heisenberg", 4);
    if let ExperimentOutput::Cover { certificate, .. } = &mut failing.output {
        certificate.pass = false;
    }
    assert_eq!(compare_to_prediction(&failing, &heis).unwrap().verdict, VerdictKind::Fail);
    // more families only bounds from above
    assert_eq!(compare_to_prediction(&cover_record("heisenberg", 6), &heis).unwrap().verdict, VerdictKind::EvidenceOnly);
}

#[test]
fn lamplighter_curve_is_evidence_only() {
    let scales = [2.0, 4.0, 8.0, 16.0];
    let samples: Vec<ControlSample> = scales
        .iter()
        .map(|&s| ControlSample {
            scale: s,
            bound: Some(s * s),
            rho: Some((s * s / 2.0) as u32),
            clusters: 1,
            colors: 1,
            families_target: 3,
            heuristic: true,
        })
        .collect();
    let pts: Vec<(f64, f64)> = scales.iter().map(|&s| (s, s * s)).collect();
    let spec = ExperimentSpec::ControlCurve { model: "lamplighter".into(), radius: 12, families: 2, scales: scales.to_vec() };
    let rec = ExperimentRecord {
        id: experiment_id(&spec),
        spec,
        output: ExperimentOutput::ControlCurve {
            samples,
            linear: fit(&pts, FitModel::Linear).ok(),
            power: fit(&pts, FitModel::Power).ok(),
            fit_errors: Default::default(),
        },
        csv: None,
        started_unix_ms: 0,
        finished_unix_ms: 0,
        code_version: "test".into(),
    };
    let v = compare_to_prediction(&rec, &lookup("lamplighter").unwrap()).unwrap();
    assert_eq!(v.verdict, VerdictKind::EvidenceOnly);
    assert_eq!(v.verdict.exit_code(), 0);
    assert!(!v.citation.is_empty());
}

#[test]
fn incomparable_pairs_are_errors() {
    let rec = run_experiment(&json!({"experiment": "lie-classify", "algebra": "heis3"}), &ctx()).unwrap();
    assert_eq!(compare_to_prediction(&rec, &lookup("heisenberg").unwrap()).unwrap().verdict, VerdictKind::Pass);
    assert!(matches!(
        compare_to_prediction(&rec, &lookup("Z^2").unwrap()),
        Err(CatalogError::Incomparable { .. })
    ));
}

#[test]
fn record_round_trip_and_determinism() {
    let spec = json!({"experiment": "cover", "construction": "brick", "model": "Z^2", "radius": 20, "scales": [2, 4, 8]});
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(&spec, &ctx()).unwrap();
    let pa = write_record(dir.path(), &a).unwrap();
    assert_eq!(load_record(&pa).unwrap(), a);
    let out_a = fs::read(pa.join("output.json")).unwrap();
    let csv_a = fs::read(pa.join("output.csv")).unwrap();

    let other = tempfile::tempdir().unwrap();
    let cache = tempfile::tempdir().unwrap();
    let b = run_experiment(&spec, &ExperimentContext { cache_dir: Some(cache.path().to_path_buf()) }).unwrap();
    // second run reads the ball back from the cache
    let c = run_experiment(&spec, &ExperimentContext { cache_dir: Some(cache.path().to_path_buf()) }).unwrap();
    for r in [b, c] {
        assert_eq!(r.id, a.id);
        let p = write_record(other.path(), &r).unwrap();
        assert_eq!(fs::read(p.join("output.json")).unwrap(), out_a);
        assert_eq!(fs::read(p.join("output.csv")).unwrap(), csv_a);
        assert_eq!(fs::read(p.join("spec.json")).unwrap(), fs::read(pa.join("spec.json")).unwrap());
    }
}

#[test]
fn ids_depend_only_on_the_spec() {
    let a = ExperimentSpec::from_json(&json!({"experiment": "karidi", "model": "heisenberg", "radius": 10})).unwrap();
    let b = ExperimentSpec::from_json(&json!({"radius": 10, "model": "heisenberg", "experiment": "karidi"})).unwrap();
    let c = ExperimentSpec::from_json(&json!({"experiment": "karidi", "model": "heisenberg", "radius": 11})).unwrap();
    assert_eq!(experiment_id(&a), experiment_id(&b));
    assert_ne!(experiment_id(&a), experiment_id(&c));
    assert_eq!(experiment_id(&a).len(), 16);
}

#[test]
fn six_significant_digits() {
    assert_eq!(round_sig(1.234567891, 6), 1.23457);
    assert_eq!(round_sig(123456789.0, 6), 123457000.0);
    assert_eq!(round_sig(0.000123456789, 6), 0.000123457);
    assert_eq!(round_sig(0.0, 6), 0.0);
}
