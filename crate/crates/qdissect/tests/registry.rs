use num_bigint::BigInt;
use qdissect::pipeline::{pipeline, Theorem};
use qdissect::registry::{verify, verify_all, Registry, BUILTIN};
use qdissect_core::expr::Evaluator;
use qdissect_core::prodmake::prodmake;
use qdissect_core::verify::{perturb, Outcome};

const IDS: [&str; 39] = [
    "RR-1",
    "RR-2",
    "RR-CF",
    "Ram-para",
    "R-5-dis",
    "Rinv-5-dis",
    "5-dis-3",
    "5-dis-4",
    "5-dis-2",
    "5-dis-1",
    "useful-1",
    "useful-2",
    "useful-3",
    "RR-iden-1",
    "RR-iden-2",
    "RR-iden-3",
    "phi-def",
    "psi-def",
    "useful-iden-3",
    "DX-iden-1",
    "DX-iden-2",
    "TX-iden-1",
    "TX-iden-2",
    "key-iden-2",
    "aux-step-2",
    "iden-2-1",
    "useful-iden-4",
    "key-iden-1",
    "aux-step-1",
    "substitution-of-one",
    "Pi_11",
    "Pi_12",
    "Pi1-sigma",
    "Pi1-factored",
    "Pi-1-iden-1",
    "reform-1",
    "reform-2",
    "reform-3",
    "reform-4",
];

#[test]
fn every_labeled_identity_has_exactly_one_entry() {
    let reg = Registry::builtin();
    let ids: Vec<&str> = reg.records().iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, IDS);
    for r in reg.records() {
        let want = match r.id.as_str() {
            "R-5-dis" | "Rinv-5-dis" => 625,
            "RR-1" | "RR-2" | "RR-CF" | "Ram-para" => 500,
            id if id.starts_with("5-dis-") => 500,
            _ => 300,
        };
        assert_eq!(r.order, want, "{}", r.id);
        assert!(!r.anchor.is_empty());
    }
}

#[test]
fn spec_examples_pass() {
    let reg = Registry::builtin();
    for id in ["useful-3", "key-iden-2", "TX-iden-2"] {
        let r = verify(reg.get(id).unwrap(), Some(300));
        assert!(r.pass(), "{id}: {:?}", r.outcome);
    }
}

#[test]
fn all_pass_and_keep_registry_order() {
    let reg = Registry::builtin();
    let reports = verify_all(&reg, None);
    let ids: Vec<&str> = reports.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, IDS);
    for r in &reports {
        assert!(r.pass(), "{}: {:?}", r.id, r.outcome);
    }
}

#[test]
fn passing_at_n_passes_below_n() {
    let reg = Registry::builtin();
    for r in reg.records() {
        for n in [1, 7, r.order / 3] {
            assert!(verify(r, Some(n)).pass(), "{} at {n}", r.id);
        }
    }
}

#[test]
fn perturbed_right_sides_fail_at_the_perturbed_exponent() {
    let reg = Registry::builtin();
    for rec in reg.records() {
        for (exponent, delta) in [(7, 1), (rec.order - 1, -3)] {
            let mut bad = rec.clone();
            bad.rhs = perturb(&rec.rhs, exponent, delta);
            match verify(&bad, None).outcome {
                Outcome::Mismatch { exponent: e, lhs, other, member } => {
                    assert_eq!(e, exponent, "{}", rec.id);
                    assert_eq!(member, 0);
                    assert_eq!(other - lhs, BigInt::from(delta));
                }
                other => panic!("{} +{delta}q^{exponent}: {other:?}", rec.id),
            }
        }
    }
}

#[test]
fn perturbed_intermediate_form_is_named() {
    let reg = Registry::builtin();
    let mut bad = reg.get("reform-3").unwrap().clone();
    bad.middle[0] = perturb(&bad.middle[0], 11, 1);
    match verify(&bad, None).outcome {
        Outcome::Mismatch { exponent, member, .. } => assert_eq!((exponent, member), (11, 1)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn prodmake_recovers_every_registry_product() {
    let reg = Registry::builtin();
    let mut ev = Evaluator::new();
    let mut seen = 0;
    for rec in reg.records() {
        let exprs = std::iter::once(&rec.lhs).chain(rec.members());
        for p in exprs.flat_map(|e| e.products()) {
            let n = 200;
            let f = ev.eval(p, n).unwrap();
            let e = prodmake(&f, n).unwrap();
            let want = p.jp_product().unwrap().unwrap().eta_exponents(n as u64);
            for k in 1..n as u64 {
                assert_eq!(e.get(k).cloned().unwrap_or_default(), BigInt::from(want[k as usize]), "{p} at {k}");
            }
            seen += 1;
        }
    }
    assert!(seen > 40, "only {seen} products");
}

#[test]
fn pipeline_with_flipped_sigma_fails_step_three() {
    let flipped = BUILTIN.replacen(
        r#"rhs = "$SIGMA11 + q^5*$SIGMA12""#,
        r#"rhs = "$SIGMA11 - q^5*$SIGMA12""#,
        1,
    );
    assert_ne!(flipped, BUILTIN);
    let reg = Registry::from_toml_str(&flipped).unwrap();
    let steps = pipeline(&reg, Theorem::Dis3, 300).unwrap();
    let verdicts: Vec<bool> = steps.iter().map(|s| s.pass()).collect();
    assert_eq!(verdicts, [true, true, false, true, true, true, true]);
    assert_eq!(steps[2].step, "Pi1-sigma");
}

#[test]
fn pipelines_pass() {
    let reg = Registry::builtin();
    for t in Theorem::ALL {
        let steps = pipeline(&reg, t, 300).unwrap();
        let want = if t == Theorem::Dis3 { 7 } else { 5 };
        assert_eq!(steps.len(), want, "{t}");
        for s in &steps {
            assert!(s.pass(), "{t} {}: {:?}", s.step, s.report.outcome);
        }
    }
}

#[test]
fn pipeline_reports_missing_entries() {
    let text = BUILTIN.replacen("[[identity]]\nid = \"reform-2\"", "[[identity]]\nid = \"reform-2x\"", 1);
    assert_ne!(text, BUILTIN);
    let reg = Registry::from_toml_str(&text).unwrap();
    let err = pipeline(&reg, Theorem::Dis4, 50).unwrap_err();
    assert!(err.to_string().contains("reform-2"));
}

#[test]
fn bad_registry_files_are_rejected() {
    for (text, what) in [
        ("[[identity]]\nid = \"a\"\nanchor = \"\"\norder = 10\nlhs = \"G(q\"\nrhs = \"1\"", "cannot parse"),
        ("[[identity]]\nid = \"a\"\nanchor = \"\"\norder = 10\nlhs = \"$X\"\nrhs = \"1\"", "unknown definition"),
        ("[defs]\nX = \"$Y\"\nY = \"$X\"", "refers to itself"),
        ("[[identity]]\nid = \"a\"\nanchor = \"\"\norder = 0\nlhs = \"1\"\nrhs = \"1\"", "order below 1"),
        ("[[identity]]\nid = \"a\"\nanchor = \"\"\norder = 5\nlhs = \"1\"\nrhs = \"1\"\nextra = 1", "TOML"),
    ] {
        let err = Registry::from_toml_str(text).unwrap_err();
        assert!(err.to_string().contains(what), "{err}");
    }
}
