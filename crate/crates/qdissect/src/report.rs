//! JSON shapes for everything the CLI prints. Big integers are decimal strings.

use std::collections::BTreeMap;

use qdissect_core::dissection::{Dissection, SupportReport};
use qdissect_core::prodmake::{EtaExponents, GroupedFactor, PeriodView};
use qdissect_core::qproducts::Sign;
use qdissect_core::series::Series;
use qdissect_core::signscan::{SignReport, SignRule};
use qdissect_core::verify::{Outcome, VerifyReport};
use serde::Serialize;

use crate::pipeline::StepReport;

#[derive(Serialize)]
pub struct SeriesJson {
    pub valuation: i64,
    pub order: i64,
    /// `coeffs[i]` is the coefficient of `q^(valuation + i)`.
    pub coeffs: Vec<String>,
}

impl From<&Series> for SeriesJson {
    fn from(s: &Series) -> Self {
        SeriesJson {
            valuation: s.valuation(),
            order: s.order(),
            coeffs: s.coefficients().iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct DissectionJson {
    pub modulus: u64,
    pub source_order: i64,
    pub slices: BTreeMap<usize, SeriesJson>,
}

impl DissectionJson {
    pub fn new(d: &Dissection, only: Option<usize>) -> Self {
        let slices = d
            .slices()
            .iter()
            .enumerate()
            .filter(|(l, _)| only.is_none_or(|o| o == *l))
            .map(|(l, s)| (l, SeriesJson::from(s)))
            .collect();
        DissectionJson { modulus: d.modulus(), source_order: d.source_order(), slices }
    }
}

#[derive(Serialize)]
pub struct VerifyJson {
    pub id: String,
    pub order: i64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    /// Coefficient of the side that disagreed with `lhs`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other: Option<String>,
    /// 0 for the right-hand side, `i + 1` for intermediate form `i`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub member: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<&VerifyReport> for VerifyJson {
    fn from(r: &VerifyReport) -> Self {
        let mut out = VerifyJson {
            id: r.id.clone(),
            order: r.order,
            pass: r.pass(),
            exponent: None,
            lhs: None,
            other: None,
            member: None,
            error: None,
        };
        match &r.outcome {
            Outcome::Pass => {}
            Outcome::Mismatch { exponent, lhs, other, member } => {
                out.exponent = Some(*exponent);
                out.lhs = Some(lhs.to_string());
                out.other = Some(other.to_string());
                out.member = Some(*member);
            }
            Outcome::Error(e) => out.error = Some(e.clone()),
        }
        out
    }
}

#[derive(Serialize)]
pub struct StepJson {
    pub step: String,
    #[serde(flatten)]
    pub report: VerifyJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl From<&StepReport> for StepJson {
    fn from(s: &StepReport) -> Self {
        StepJson { step: s.step.clone(), report: VerifyJson::from(&s.report), detail: s.detail.clone() }
    }
}

#[derive(Serialize)]
pub struct GroupedJson {
    pub sign: &'static str,
    pub offset: u64,
    pub exponent: String,
}

impl From<&GroupedFactor> for GroupedJson {
    fn from(g: &GroupedFactor) -> Self {
        GroupedJson {
            sign: if g.sign == Sign::Minus { "-" } else { "+" },
            offset: g.offset,
            exponent: g.exponent.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct ProdmakeJson {
    /// Nonzero `a_n` only.
    pub exponents: BTreeMap<u64, String>,
    pub order: u64,
    pub period: Option<u64>,
    /// `residue_pattern[r]` is `a_n` for `n ≡ r`.
    pub residue_pattern: Option<Vec<String>>,
    pub leading_exceptions: Option<BTreeMap<u64, String>>,
    /// `(±q^j; q^base)` grouping when the period is twice an odd base.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signed_grouping: Option<SignedJson>,
}

#[derive(Serialize)]
pub struct SignedJson {
    pub base: u64,
    pub factors: Vec<GroupedJson>,
}

impl ProdmakeJson {
    pub fn new(e: &EtaExponents, period: Option<u64>, view: Option<&PeriodView>) -> Self {
        let signed_grouping = view.and_then(|v| {
            let base = v.modulus / 2;
            let factors = v.signed_factors(base)?;
            Some(SignedJson { base, factors: factors.iter().map(GroupedJson::from).collect() })
        });
        ProdmakeJson {
            exponents: e.nonzero().map(|(n, a)| (n, a.to_string())).collect(),
            order: e.order(),
            period,
            residue_pattern: view.map(|v| v.pattern.iter().map(ToString::to_string).collect()),
            leading_exceptions: view
                .map(|v| v.leading_exceptions.iter().map(|(n, a)| (*n, a.to_string())).collect()),
            signed_grouping,
        }
    }
}

#[derive(Serialize)]
pub struct SupportTermJson {
    pub index: usize,
    pub residue: Option<u64>,
    pub expected: Option<u64>,
    pub first_violation: Option<i64>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SupportJson {
    pub modulus: u64,
    pub pass: bool,
    pub terms: Vec<SupportTermJson>,
}

impl From<&SupportReport> for SupportJson {
    fn from(r: &SupportReport) -> Self {
        SupportJson {
            modulus: r.modulus,
            pass: r.pass(),
            terms: r
                .terms
                .iter()
                .map(|t| SupportTermJson {
                    index: t.index,
                    residue: t.residue,
                    expected: t.expected,
                    first_violation: t.first_violation,
                    pass: t.pass,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ViolationJson {
    pub n: u64,
    pub coefficient: String,
    pub expected: &'static str,
}

#[derive(Serialize)]
pub struct SignsJson {
    pub which: String,
    pub order: u64,
    pub modulus: u64,
    pub positive: Vec<u64>,
    pub negative: Vec<u64>,
    pub exceptions: Vec<u64>,
    pub pass: bool,
    pub zeros: Vec<u64>,
    pub violations: Vec<ViolationJson>,
}

impl SignsJson {
    pub fn new(which: &str, rule: &SignRule, r: &SignReport) -> Self {
        SignsJson {
            which: which.to_string(),
            order: r.order,
            modulus: rule.modulus(),
            positive: rule.positive().to_vec(),
            negative: rule.negative().to_vec(),
            exceptions: rule.exceptions().to_vec(),
            pass: r.pass(),
            zeros: r.zeros.clone(),
            violations: r
                .violations
                .iter()
                .map(|v| ViolationJson {
                    n: v.n,
                    coefficient: v.coefficient.to_string(),
                    expected: v.expected.name(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ListEntryJson<'a> {
    pub id: &'a str,
    pub order: i64,
    pub anchor: &'a str,
}
