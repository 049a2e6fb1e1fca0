//! m-dissections: `f(q) = sum_{l<m} q^l f_l(q^m)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::series::Series;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DissectionError {
    NegativeValuation(i64),
    ZeroModulus,
    SliceCount { expected: usize, found: usize },
}

impl fmt::Display for DissectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DissectionError::NegativeValuation(v) => {
                write!(f, "cannot dissect a Laurent series (valuation {v})")
            }
            DissectionError::ZeroModulus => f.write_str("dissection modulus must be positive"),
            DissectionError::SliceCount { expected, found } => {
                write!(f, "expected {expected} slices, found {found}")
            }
        }
    }
}

impl core::error::Error for DissectionError {}

/// The `m` slices of a power series. Slice `l` holds `sum_n a_{mn+l} q^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dissection {
    modulus: u64,
    slices: Vec<Series>,
    source_order: i64,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

impl Dissection {
    /// Assembles a dissection from explicit slices (e.g. the terms of a theorem).
    pub fn from_slices(
        modulus: u64,
        slices: Vec<Series>,
        source_order: i64,
    ) -> Result<Self, DissectionError> {
        if modulus == 0 {
            return Err(DissectionError::ZeroModulus);
        }
        if slices.len() != modulus as usize {
            return Err(DissectionError::SliceCount {
                expected: modulus as usize,
                found: slices.len(),
            });
        }
        Ok(Dissection { modulus, slices, source_order })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn slices(&self) -> &[Series] {
        &self.slices
    }

    pub fn slice(&self, residue: usize) -> Option<&Series> {
        self.slices.get(residue)
    }

    pub fn source_order(&self) -> i64 {
        self.source_order
    }
}

/// Splits `f` into its `m` residue-class slices.
pub fn dissect(f: &Series, m: u64) -> Result<Dissection, DissectionError> {
    if m == 0 {
        return Err(DissectionError::ZeroModulus);
    }
    if !f.is_zero() && f.valuation() < 0 {
        return Err(DissectionError::NegativeValuation(f.valuation()));
    }
    let n = f.order();
    let mi = m as i64;
    let slices = (0..mi)
        .map(|l| {
            let order = ceil_div(n - l, mi).max(0);
            let coeffs: Vec<BigInt> = (0..order)
                .map(|k| f.coefficient(mi * k + l).expect("slice order never exceeds the source"))
                .collect();
            Series::from_dense(0, coeffs, order)
        })
        .collect();
    Ok(Dissection { modulus: m, slices, source_order: n })
}

/// `sum_l q^l slice_l(q^m)`, truncated to the source order.
pub fn recombine(d: &Dissection) -> Series {
    let n = d.source_order;
    d.slices
        .iter()
        .enumerate()
        .map(|(l, s)| s.substitute_power(d.modulus).shift(l as i64).truncate(n))
        .fold(Series::zero(n), |acc, t| &acc + &t)
}

/// Residue-class support of one term of a claimed dissection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSupport {
    pub index: usize,
    /// Residue of the lowest nonzero exponent; `None` for a zero term.
    pub residue: Option<u64>,
    pub expected: Option<u64>,
    /// First exponent outside the term's residue class, if any.
    pub first_violation: Option<i64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportReport {
    pub modulus: u64,
    pub terms: Vec<TermSupport>,
}

impl SupportReport {
    pub fn pass(&self) -> bool {
        self.terms.iter().all(|t| t.pass)
    }
}

/// Checks that each term lives on a single residue class mod `m`, and on the
/// expected one where `expected` names it.
pub fn slice_support_check(
    terms: &[Series],
    m: u64,
    expected: &BTreeMap<usize, u64>,
) -> SupportReport {
    assert!(m >= 1, "modulus must be positive");
    let mi = m as i64;
    let terms = terms
        .iter()
        .enumerate()
        .map(|(index, t)| {
            let residue = (!t.is_zero()).then(|| t.valuation().rem_euclid(mi) as u64);
            let first_violation = residue.and_then(|r| {
                t.terms().map(|(e, _)| e).find(|e| e.rem_euclid(mi) as u64 != r)
            });
            let want = expected.get(&index).copied();
            let matches = match (want, residue) {
                (Some(w), Some(r)) => w % m == r,
                _ => true,
            };
            TermSupport {
                index,
                residue,
                expected: want,
                first_violation,
                pass: first_violation.is_none() && matches,
            }
        })
        .collect();
    SupportReport { modulus: m, terms }
}

/// Sum of `terms[i]`'s slices into the residue each term occupies; the
/// resulting dissection recombines to the sum of the terms.
pub fn dissection_from_terms(
    terms: &[Series],
    m: u64,
    order: i64,
) -> Result<Dissection, DissectionError> {
    let mut acc = dissect(&Series::zero(order), m)?;
    for t in terms {
        let d = dissect(&t.truncate(order), m)?;
        for (slot, s) in acc.slices.iter_mut().zip(d.slices) {
            *slot = &*slot + &s;
        }
    }
    Ok(acc)
}
