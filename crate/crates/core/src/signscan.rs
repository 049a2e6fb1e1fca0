//! Sign patterns of the coefficients of `R(q)R(q^2)^2`, its reciprocal,
//! `R(q)^2/R(q^2)` and its reciprocal.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::qproducts::{base_order, rr_continued_fraction};
use crate::series::Series;

/// The four coefficient sequences whose signs are periodic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sequence {
    /// `R(q) R(q^2)^2`
    Alpha,
    /// `1 / (R(q) R(q^2)^2)`
    Beta,
    /// `R(q)^2 / R(q^2)`
    Gamma,
    /// `R(q^2) / R(q)^2`
    Delta,
}

impl Sequence {
    pub const ALL: [Sequence; 4] = [Sequence::Alpha, Sequence::Beta, Sequence::Gamma, Sequence::Delta];

    pub fn name(self) -> &'static str {
        match self {
            Sequence::Alpha => "alpha",
            Sequence::Beta => "beta",
            Sequence::Gamma => "gamma",
            Sequence::Delta => "delta",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    /// The generating function, as an expression in the crate's expression language.
    pub fn expression(self) -> &'static str {
        match self {
            Sequence::Alpha => "R(q)*R(q^2)^2",
            Sequence::Beta => "1/(R(q)*R(q^2)^2)",
            Sequence::Gamma => "R(q)^2/R(q^2)",
            Sequence::Delta => "R(q^2)/R(q)^2",
        }
    }

    /// The generating function to order `n`.
    pub fn series(self, n: i64) -> Series {
        let r = rr_continued_fraction(n);
        let r2 = r.truncate(base_order(n, 2)).substitute_power(2).truncate(n);
        let unit = "R(q) and R(q^2) start with 1";
        match self {
            Sequence::Alpha => &r * &r2.pow(2).expect(unit),
            Sequence::Beta => (&r * &r2.pow(2).expect(unit)).invert().expect(unit),
            Sequence::Gamma => r.pow(2).expect(unit).div_exact(&r2).expect(unit),
            Sequence::Delta => r2.div_exact(&r.pow(2).expect(unit)).expect(unit),
        }
    }

    /// The sign rule the coefficients obey, including the exceptional zeros.
    ///
    /// For alpha, residue 9 mod 10 is positive and 4 is negative: slice 4 of
    /// the 5-dissection is `+q^9` times a product starting `1 - 3q^5`.
    pub fn rule(self) -> SignRule {
        let rule = match self {
            Sequence::Alpha => SignRule::new(10, &[0, 3, 6, 7, 9], &[1, 2, 4, 5, 8], &[4]),
            Sequence::Beta => SignRule::new(10, &[0, 1, 2, 3, 4], &[5, 6, 7, 8, 9], &[5]),
            Sequence::Gamma => SignRule::new(5, &[0, 2, 4], &[1, 3], &[]),
            Sequence::Delta => SignRule::new(5, &[0, 1], &[2, 3, 4], &[2]),
        };
        rule.expect("built-in rules are well formed")
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignRuleError {
    ZeroModulus,
    ResidueOutOfRange(u64),
    Overlap(u64),
    Uncovered(u64),
}

impl fmt::Display for SignRuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignRuleError::ZeroModulus => f.write_str("sign rule modulus must be positive"),
            SignRuleError::ResidueOutOfRange(r) => write!(f, "residue {r} is not below the modulus"),
            SignRuleError::Overlap(r) => write!(f, "residue {r} is both positive and negative"),
            SignRuleError::Uncovered(r) => write!(f, "residue {r} has no sign"),
        }
    }
}

impl core::error::Error for SignRuleError {}

/// Residue class mod `modulus` -> strict sign, with finitely many indices
/// that must be exactly zero instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignRule {
    modulus: u64,
    positive: Vec<u64>,
    negative: Vec<u64>,
    exceptions: Vec<u64>,
}

impl SignRule {
    pub fn new(
        modulus: u64,
        positive: &[u64],
        negative: &[u64],
        zero_at: &[u64],
    ) -> Result<Self, SignRuleError> {
        if modulus == 0 {
            return Err(SignRuleError::ZeroModulus);
        }
        if let Some(&r) = positive.iter().chain(negative).find(|&&r| r >= modulus) {
            return Err(SignRuleError::ResidueOutOfRange(r));
        }
        if let Some(&r) = positive.iter().find(|r| negative.contains(r)) {
            return Err(SignRuleError::Overlap(r));
        }
        if let Some(r) = (0..modulus).find(|r| !positive.contains(r) && !negative.contains(r)) {
            return Err(SignRuleError::Uncovered(r));
        }
        Ok(SignRule {
            modulus,
            positive: positive.to_vec(),
            negative: negative.to_vec(),
            exceptions: zero_at.to_vec(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn positive(&self) -> &[u64] {
        &self.positive
    }

    pub fn negative(&self) -> &[u64] {
        &self.negative
    }

    pub fn exceptions(&self) -> &[u64] {
        &self.exceptions
    }

    pub fn expected(&self, n: u64) -> Expected {
        if self.exceptions.contains(&n) {
            Expected::Zero
        } else if self.positive.contains(&(n % self.modulus)) {
            Expected::Positive
        } else {
            Expected::Negative
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Positive,
    Negative,
    Zero,
}

impl Expected {
    pub fn admits(self, c: &BigInt) -> bool {
        match self {
            Expected::Positive => c.is_positive(),
            Expected::Negative => c.is_negative(),
            Expected::Zero => c.is_zero(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Expected::Positive => "positive",
            Expected::Negative => "negative",
            Expected::Zero => "zero",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub n: u64,
    pub coefficient: BigInt,
    pub expected: Expected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignReport {
    pub order: u64,
    pub violations: Vec<Violation>,
    /// Every index below `order` whose coefficient is zero.
    pub zeros: Vec<u64>,
}

impl SignReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `f`'s coefficients of `q^0 .. q^(n-1)` against `rule`.
pub fn scan_series(f: &Series, rule: &SignRule, n: u64) -> SignReport {
    let n = n.min(f.order().max(0) as u64);
    let mut violations = Vec::new();
    let mut zeros = Vec::new();
    for k in 0..n {
        let c = f.coefficient(k as i64).expect("k is below the order");
        if c.is_zero() {
            zeros.push(k);
        }
        let expected = rule.expected(k);
        if !expected.admits(&c) {
            violations.push(Violation { n: k, coefficient: c, expected });
        }
    }
    SignReport { order: n, violations, zeros }
}

pub fn scan(which: Sequence, rule: &SignRule, n: u64) -> SignReport {
    scan_series(&which.series(n as i64), rule, n)
}
