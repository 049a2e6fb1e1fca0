//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always show up in `cargo test` output.
//!
//! Exits nonzero on any failure that is not the known, diagnosed one
//! (criterion 4, see `signs`).

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use qdissect::pipeline::{pipeline, Theorem};
use qdissect::registry::{verify, verify_all, Registry};
use qdissect::terms::{term_shapes, TermShape};
use qdissect_core::dissection::{dissect, dissection_from_terms, recombine, slice_support_check};
use qdissect_core::expr::Evaluator;
use qdissect_core::prodmake::{guess_dissection, prodmake, SliceGuess};
use qdissect_core::qproducts::{g_product, g_sum, h_product, h_sum, phi, phi_product, psi, psi_product, Sign};
use qdissect_core::signscan::{scan, Sequence, SignRule};
use qdissect_core::verify::{perturb, summands, Outcome};
use qdissect_core::Series;

const REGISTRY_TIME_LIMIT: Duration = Duration::from_secs(120);
const THEOREM_ORDER: i64 = 500;
const PIPELINE_ORDER: i64 = 300;
const SIGN_ORDER: u64 = 2000;
const GUESS_ORDER: i64 = 500;
const GUESS_PERIOD: u64 = 50;
const SUM_PRODUCT_ORDER: i64 = 1000;
const RANDOM_CASES: u32 = 100;
const MUTATION_DELTA: i64 = 1;

enum Verdict {
    Pass(String),
    Fail(String),
    /// Fails as stated, for a reason established and checked here.
    KnownFail(String),
}

fn report(n: u32, title: &str, v: &Verdict) {
    let (tag, detail) = match v {
        Verdict::Pass(d) => ("PASS", d),
        Verdict::Fail(d) | Verdict::KnownFail(d) => ("FAIL", d),
    };
    println!("{tag} [{n}] {title}: {detail}");
}

fn check(ok: bool, pass: String, fail: String) -> Verdict {
    if ok {
        Verdict::Pass(pass)
    } else {
        Verdict::Fail(fail)
    }
}

fn registry_at_suggested_orders(reg: &Registry) -> Verdict {
    let start = Instant::now();
    let reports = verify_all(reg, None);
    let elapsed = start.elapsed();
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass()).map(|r| r.id.as_str()).collect();
    check(
        failed.is_empty() && elapsed < REGISTRY_TIME_LIMIT,
        format!("{}/{} identities in {:.2}s (limit {}s)", reports.len(), reports.len(), elapsed.as_secs_f64(), REGISTRY_TIME_LIMIT.as_secs()),
        format!("failed {failed:?}, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn shapes(reg: &Registry, t: Theorem) -> Vec<TermShape> {
    term_shapes(&reg.get(t.id()).unwrap().rhs).expect("theorem terms are c*q^s*JP(...)")
}

fn theorem_terms(reg: &Registry) -> Verdict {
    let mut problems = Vec::new();
    let mut ev = Evaluator::new();
    for t in Theorem::ALL {
        let rec = reg.get(t.id()).unwrap();
        let target = ev.eval(&rec.lhs, THEOREM_ORDER).unwrap();
        let terms: Vec<Series> = summands(&rec.rhs).iter().map(|e| ev.eval(e, THEOREM_ORDER).unwrap()).collect();
        let expected: BTreeMap<usize, u64> =
            shapes(reg, t).iter().enumerate().map(|(i, s)| (i, s.shift.rem_euclid(5) as u64)).collect();
        let residues: BTreeSet<u64> = expected.values().copied().collect();
        let support = slice_support_check(&terms, 5, &expected);
        let d = dissection_from_terms(&terms, 5, THEOREM_ORDER).unwrap();
        if terms.len() != 5 || residues.len() != 5 {
            problems.push(format!("{t}: terms do not cover five residues"));
        }
        if !support.pass() {
            problems.push(format!("{t}: support {:?}", support.terms));
        }
        if recombine(&d) != target {
            problems.push(format!("{t}: recombined terms differ from the target"));
        }
    }
    check(
        problems.is_empty(),
        format!("all four theorems: 5 terms on distinct residues mod 5, recombined = target to O(q^{THEOREM_ORDER})"),
        problems.join("; "),
    )
}

fn pipelines(reg: &Registry) -> Verdict {
    let mut summary = Vec::new();
    let mut problems = Vec::new();
    for t in Theorem::ALL {
        let steps = pipeline(reg, t, PIPELINE_ORDER).unwrap();
        let passed = steps.iter().filter(|s| s.pass()).count();
        summary.push(format!("{t} {passed}/{}", steps.len()));
        if passed != steps.len() || (t == Theorem::Dis3 && steps.len() != 7) {
            problems.push(format!("{t}: {passed}/{} steps", steps.len()));
        }
    }
    check(problems.is_empty(), format!("{} at N={PIPELINE_ORDER}", summary.join(", ")), problems.join("; "))
}

/// The alpha rule exactly as printed: residues 4 and 9 swapped relative to
/// the coefficients, which follow the `+q^9` slice-4 term of the dissection.
fn printed_alpha_rule() -> SignRule {
    SignRule::new(10, &[0, 3, 4, 6, 7], &[1, 2, 5, 8, 9], &[4]).unwrap()
}

fn signs() -> Verdict {
    let mut zeros = Vec::new();
    let mut corrected_ok = true;
    for seq in Sequence::ALL {
        let r = scan(seq, &seq.rule(), SIGN_ORDER);
        corrected_ok &= r.pass();
        zeros.extend(r.zeros.iter().map(|n| format!("{seq}({n})")));
    }
    let zeros_ok = zeros == ["alpha(4)", "beta(5)", "delta(2)"];
    let printed = scan(Sequence::Alpha, &printed_alpha_rule(), SIGN_ORDER);
    let diagnosed = printed.violations.iter().all(|v| v.n % 10 == 4 || v.n % 10 == 9);
    let detail = format!(
        "n < {SIGN_ORDER}: printed alpha rule has {} violations, all at n = 4, 9 mod 10; \
         with 4 and 9 swapped alpha has 0, beta/gamma/delta 0 as printed; zeros {}",
        printed.violations.len(),
        zeros.join(" ")
    );
    if printed.pass() && corrected_ok && zeros_ok {
        Verdict::Pass(format!("0 violations, zeros {}", zeros.join(" ")))
    } else if !printed.pass() && diagnosed && corrected_ok && zeros_ok {
        Verdict::KnownFail(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn same_exponents(g: &SliceGuess, s: &TermShape) -> bool {
    let want = s.eta_exponents(g.exponents.order());
    (1..g.exponents.order()).all(|n| g.exponents.get(n).cloned().unwrap_or_default() == BigInt::from(want[n as usize]))
}

/// The guess's period-50 pattern, grouped the way the theorem writes it.
fn grouped(g: &SliceGuess, s: &TermShape) -> Option<BTreeMap<(Sign, u64), i64>> {
    let view = g.period.as_ref().filter(|v| v.leading_exceptions.is_empty())?;
    let factors = if s.modulus == GUESS_PERIOD { view.unsigned_factors() } else { view.signed_factors(s.modulus)? };
    factors.into_iter().map(|f| Some(((f.sign, f.offset), i64::try_from(&f.exponent).ok()?))).collect()
}

fn product_guesses(reg: &Registry) -> Verdict {
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    let mut ev = Evaluator::new();
    for t in Theorem::ALL {
        let f = ev.eval(&reg.get(t.id()).unwrap().lhs, GUESS_ORDER).unwrap();
        let guesses = guess_dissection(&f, 5, GUESS_PERIOD).unwrap();
        let mut prefactors = Vec::new();
        for s in shapes(reg, t) {
            let residue = s.shift.rem_euclid(5) as usize;
            let Some(g) = &guesses[residue] else {
                problems.push(format!("{t}: slice {residue} is zero"));
                continue;
            };
            prefactors.push(format!("{}q^{}", g.scalar, g.prefactor));
            if g.prefactor != s.shift || g.scalar != BigInt::from(s.scalar) {
                problems.push(format!("{t}: slice {residue} is {}q^{}, display has {}q^{}", g.scalar, g.prefactor, s.scalar, s.shift));
            }
            if grouped(g, &s).as_ref() != Some(&s.factors) {
                problems.push(format!("{t}: slice {residue} pattern differs from the display"));
            }
            if !same_exponents(g, &s) {
                problems.push(format!("{t}: slice {residue} exponents differ from the display"));
            }
        }
        summary.push(format!("{t} [{}]", prefactors.join(", ")));
    }
    check(
        problems.is_empty(),
        format!("period {GUESS_PERIOD} products at N={GUESS_ORDER} match the displays: {}", summary.join("; ")),
        problems.join("; "),
    )
}

fn series_strategy() -> impl Strategy<Value = Series> {
    (0i64..3, prop::collection::vec(-30i64..=30, 1..40), 0i64..5).prop_map(|(v, cs, slack)| {
        let order = v + cs.len() as i64 + slack;
        Series::from_dense(v, cs.into_iter().map(BigInt::from).collect(), order)
    })
}

fn runner() -> TestRunner {
    let config = Config { failure_persistence: None, ..Config::with_cases(RANDOM_CASES) };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn properties(reg: &Registry) -> Verdict {
    let mut problems = Vec::new();
    let n = SUM_PRODUCT_ORDER;
    let pairs = [
        ("G", g_sum(n), g_product(n)),
        ("H", h_sum(n), h_product(n)),
        ("phi", phi(Sign::Plus, n), phi_product(Sign::Plus, n)),
        ("phi(-q)", phi(Sign::Minus, n), phi_product(Sign::Minus, n)),
        ("psi", psi(n), psi_product(n)),
    ];
    for (name, sum, product) in pairs {
        if sum != product {
            problems.push(format!("{name} sum != product"));
        }
    }

    let roundtrip = runner().run(&(series_strategy(), 1u64..=8), |(f, m)| {
        prop_assert_eq!(recombine(&dissect(&f, m).unwrap()), f);
        Ok(())
    });
    if let Err(e) = roundtrip {
        problems.push(format!("roundtrip: {e}"));
    }

    let ring = runner().run(&(series_strategy(), series_strategy(), series_strategy()), |(a, b, c)| {
        let agree = |x: &Series, y: &Series| {
            let n = x.order().min(y.order());
            x.truncate(n) == y.truncate(n)
        };
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert!((&a + &(-&a)).is_zero());
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!(agree(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
        prop_assert!(agree(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
        prop_assert!(agree(&(&a * &Series::one(a.order())), &a));
        Ok(())
    });
    if let Err(e) = ring {
        problems.push(format!("ring axioms: {e}"));
    }

    let mut ev = Evaluator::new();
    let mut products = 0;
    for rec in reg.records() {
        for p in std::iter::once(&rec.lhs).chain(rec.members()).flat_map(|e| e.products()) {
            let f = ev.eval(p, rec.order).unwrap();
            match prodmake(&f, rec.order) {
                Ok(e) if e.expand() == f => products += 1,
                _ => problems.push(format!("{}: prodmake of {p} unsound", rec.id)),
            }
        }
    }
    check(
        problems.is_empty(),
        format!(
            "sum = product for G, H, phi, phi(-q), psi to O(q^{n}); {RANDOM_CASES} random dissection roundtrips; \
             {RANDOM_CASES} ring-axiom cases; prodmake sound on {products} registry products"
        ),
        problems.join("; "),
    )
}

fn mutations(reg: &Registry) -> Verdict {
    let mut problems = Vec::new();
    for rec in reg.records() {
        let exponent = (rec.order / 2).max(1);
        let mut bad = rec.clone();
        bad.rhs = perturb(&rec.rhs, exponent, MUTATION_DELTA);
        match verify(&bad, None).outcome {
            Outcome::Mismatch { exponent: e, .. } if e == exponent => {}
            other => problems.push(format!("{}: {other:?}", rec.id)),
        }
    }
    check(
        problems.is_empty(),
        format!("{} registry identities with rhs + q^(N/2) all fail at q^(N/2)", reg.records().len()),
        problems.join("; "),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn main() -> ExitCode {
    let reg = Registry::builtin();
    let criteria: [Criterion; 7] = [
        ("registry verification", Box::new(|| registry_at_suggested_orders(&reg))),
        ("theorem terms recombine", Box::new(|| theorem_terms(&reg))),
        ("proof pipelines", Box::new(|| pipelines(&reg))),
        ("sign patterns", Box::new(signs)),
        ("product guesses", Box::new(|| product_guesses(&reg))),
        ("property suite", Box::new(|| properties(&reg))),
        ("mutation harness", Box::new(|| mutations(&reg))),
    ];
    let mut unexpected = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let v = run();
        report(i as u32 + 1, title, &v);
        unexpected += matches!(v, Verdict::Fail(_)) as u32;
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
