//! Step-by-step replay of the auxiliary-product proofs of the four 5-dissections.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use qdissect_core::expr::{Evaluator, Expr, JpItem};
use qdissect_core::prodmake::{detect_period, prodmake, PeriodView};
use qdissect_core::qproducts::Sign;
use qdissect_core::series::Series;
use qdissect_core::verify::{verify_chain, verify_pair, Outcome, VerifyReport};

use crate::registry::{IdentityRecord, Registry};

/// Period of the eta product that links `Pi_i2` to the dissection.
pub const EXTRA_PERIOD: u64 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// `R(q)R(q^2)^2`
    Dis3,
    /// `1/(R(q)R(q^2)^2)`
    Dis4,
    /// `R(q)^2/R(q^2)`
    Dis2,
    /// `R(q^2)/R(q)^2`
    Dis1,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::Dis3, Theorem::Dis4, Theorem::Dis2, Theorem::Dis1];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::Dis3 => "5-dis-3",
            Theorem::Dis4 => "5-dis-4",
            Theorem::Dis2 => "5-dis-2",
            Theorem::Dis1 => "5-dis-1",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.id() == id)
    }

    /// (index, numerator def, denominator def, dissection def, reformulation id)
    fn parts(self) -> (u8, &'static str, &'static str, &'static str, &'static str) {
        match self {
            Theorem::Dis3 => (1, "NUM1", "DEN1", "DIS3", "reform-1"),
            Theorem::Dis4 => (2, "DEN1", "NUM1", "DIS4", "reform-2"),
            Theorem::Dis2 => (3, "NUM3", "DEN3", "DIS2", "reform-3"),
            Theorem::Dis1 => (4, "DEN3", "NUM3", "DIS1", "reform-4"),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub step: String,
    pub report: VerifyReport,
    /// Extra information, e.g. the product a step recovered.
    pub detail: Option<String>,
}

impl StepReport {
    pub fn pass(&self) -> bool {
        self.report.pass()
    }
}

#[derive(Debug, thiserror::Error)]
#[error("registry has no {kind} {name:?}, which the {theorem} pipeline needs")]
pub struct MissingEntry {
    kind: &'static str,
    name: String,
    theorem: Theorem,
}

struct Ctx<'a> {
    reg: &'a Registry,
    theorem: Theorem,
}

impl<'a> Ctx<'a> {
    fn def(&self, name: &str) -> Result<&'a Expr, MissingEntry> {
        self.reg.def(name).ok_or(MissingEntry { kind: "definition", name: name.into(), theorem: self.theorem })
    }

    fn record(&self, id: &str) -> Result<&'a IdentityRecord, MissingEntry> {
        self.reg.get(id).ok_or(MissingEntry { kind: "identity", name: id.into(), theorem: self.theorem })
    }
}

fn step(report: VerifyReport) -> StepReport {
    StepReport { step: report.id.clone(), report, detail: None }
}

fn record_step(ev: &mut Evaluator, rec: &IdentityRecord, n: i64) -> StepReport {
    step(verify_chain(ev, &rec.id, &rec.lhs, &rec.members(), n))
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::Mul(Box::new(a), Box::new(b))
}

/// Replays the proof of `theorem` to order `n`, one report per step.
///
/// For `5-dis-3` these are the seven displayed steps. The other three
/// theorems only have their auxiliary products displayed, so their steps
/// are: `Pi_i1` equals the denominator quotient, `Pi_i2` divided by the
/// dissection is a scalar times a period-50 eta product, `Pi_i1 * Pi_i2`
/// equals numerator times that product, the reformulation, and the
/// dissection itself.
pub fn pipeline(reg: &Registry, theorem: Theorem, n: i64) -> Result<Vec<StepReport>, MissingEntry> {
    let cx = Ctx { reg, theorem };
    let mut ev = Evaluator::new();
    let (i, num, den, dis, reform) = theorem.parts();
    if theorem == Theorem::Dis3 {
        return [
            "Pi_11",
            "Pi_12",
            "Pi1-sigma",
            "substitution-of-one",
            "Pi1-factored",
            "Pi-1-iden-1",
            reform,
        ]
        .into_iter()
        .map(|id| Ok(record_step(&mut ev, cx.record(id)?, n)))
        .collect();
    }
    let pi1 = cx.def(&format!("PI{i}1"))?;
    let pi2 = cx.def(&format!("PI{i}2"))?;
    let numerator = cx.def(num)?;
    let denominator = cx.def(den)?;
    let dissection = cx.def(dis)?;

    let mut steps = vec![step(verify_pair(&mut ev, &format!("Pi_{i}1"), pi1, denominator, n))];

    let extra_id = format!("Pi_{i}2-extra");
    let extra = extra_term(&mut ev, pi2, dissection, n);
    let (scalar, product) = match extra {
        Ok((scalar, view)) => {
            let product = eta_product_expr(&view);
            steps.push(StepReport {
                step: extra_id.clone(),
                report: VerifyReport { id: extra_id, order: n, outcome: Outcome::Pass },
                detail: Some(format!("Pi_{i}2 / dissection = {scalar} * {product}")),
            });
            (scalar, product)
        }
        Err(why) => {
            steps.push(StepReport {
                step: extra_id.clone(),
                report: VerifyReport { id: extra_id, order: n, outcome: Outcome::Error(why) },
                detail: None,
            });
            (BigInt::one(), Expr::Int(1))
        }
    };
    let scalar = Expr::Int(scalar.to_i64().expect("scalar is small"));
    let lhs = mul(pi1.clone(), pi2.clone());
    let rhs = mul(mul(numerator.clone(), scalar), product);
    steps.push(step(verify_pair(&mut ev, &format!("Pi_{i}-iden"), &lhs, &rhs, n)));
    steps.push(record_step(&mut ev, cx.record(reform)?, n));
    steps.push(record_step(&mut ev, cx.record(theorem.id())?, n));
    Ok(steps)
}

/// `pi2 / dissection` as `scalar * prod (1 - q^k)^{a_k}` with `a_k` of period 50.
fn extra_term(
    ev: &mut Evaluator,
    pi2: &Expr,
    dissection: &Expr,
    n: i64,
) -> Result<(BigInt, PeriodView), String> {
    let quotient = Expr::Div(Box::new(pi2.clone()), Box::new(dissection.clone()));
    let x = ev.eval(&quotient, n).map_err(|e| e.to_string())?;
    if x.is_zero() || x.valuation() != 0 {
        return Err(format!("quotient has valuation {}, not 0", x.valuation()));
    }
    let scalar = x.leading_coefficient().expect("nonzero").clone();
    if !scalar.is_positive() {
        return Err(format!("quotient starts with {scalar}"));
    }
    let unit = x
        .div_exact(&Series::constant(scalar.clone(), x.order()))
        .map_err(|_| format!("quotient is not {scalar} times an integer series"))?;
    let exps = prodmake(&unit, n).map_err(|e| e.to_string())?;
    let view = detect_period(&exps, EXTRA_PERIOD)
        .ok_or_else(|| format!("eta exponents are not periodic mod {EXTRA_PERIOD} below {n}"))?;
    if !view.leading_exceptions.is_empty() {
        return Err(format!("eta exponents break the pattern at {:?}", view.leading_exceptions));
    }
    Ok((scalar, view))
}

/// `JP(...; ...; q^M)` with each `(q^r; q^M)` repeated `|a_r|` times.
pub fn eta_product_expr(view: &PeriodView) -> Expr {
    let mut numerator = Vec::new();
    let mut denominator = Vec::new();
    for g in view.unsigned_factors() {
        let times = g.exponent.magnitude().to_usize().expect("small exponent");
        let item = JpItem { sign: Sign::Plus, offset: g.offset };
        let side = if g.exponent.is_positive() { &mut numerator } else { &mut denominator };
        side.extend(std::iter::repeat_n(item, times));
    }
    Expr::Jp { numerator, denominator, modulus: view.modulus }
}
