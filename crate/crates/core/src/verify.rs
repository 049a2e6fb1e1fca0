//! Coefficient-by-coefficient comparison of expressions.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::expr::{Evaluator, Expr};
use crate::series::Series;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// First exponent where `lhs` and member `member` differ. Member 0 is
    /// the right-hand side, later members are the intermediate forms.
    Mismatch { exponent: i64, lhs: BigInt, other: BigInt, member: usize },
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub id: String,
    pub order: i64,
    pub outcome: Outcome,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

/// First exponent below `n` where `a` and `b` differ, with both coefficients.
pub fn first_difference(a: &Series, b: &Series, n: i64) -> Option<(i64, BigInt, BigInt)> {
    let n = n.min(a.order()).min(b.order());
    let start = a.valuation().min(b.valuation());
    let coeff = |s: &Series, e: i64| {
        if e < s.valuation() {
            BigInt::zero()
        } else {
            s.coefficient(e).expect("below the order")
        }
    };
    (start..n).find_map(|e| {
        let (x, y) = (coeff(a, e), coeff(b, e));
        (x != y).then_some((e, x, y))
    })
}

/// Checks `lhs = members[0] = members[1] = ...` to order `n`.
pub fn verify_chain(ev: &mut Evaluator, id: &str, lhs: &Expr, members: &[&Expr], n: i64) -> VerifyReport {
    let report = |outcome| VerifyReport { id: id.to_string(), order: n, outcome };
    let left = match ev.eval(lhs, n) {
        Ok(s) => s,
        Err(e) => return report(Outcome::Error(e.to_string())),
    };
    for (member, m) in members.iter().enumerate() {
        let right = match ev.eval(m, n) {
            Ok(s) => s,
            Err(e) => return report(Outcome::Error(e.to_string())),
        };
        if let Some((exponent, lhs, other)) = first_difference(&left, &right, n) {
            return report(Outcome::Mismatch { exponent, lhs, other, member });
        }
    }
    report(Outcome::Pass)
}

/// `lhs = rhs` to order `n`.
pub fn verify_pair(ev: &mut Evaluator, id: &str, lhs: &Expr, rhs: &Expr, n: i64) -> VerifyReport {
    verify_chain(ev, id, lhs, &[rhs], n)
}

/// `e + delta * q^exponent`, the negative control for a verifier.
pub fn perturb(e: &Expr, exponent: i64, delta: i64) -> Expr {
    let bump = Expr::Mul(Box::new(Expr::Int(delta)), Box::new(Expr::q_pow(exponent)));
    Expr::Add(Box::new(e.clone()), Box::new(bump))
}

/// The top-level summands of `e`, with subtraction and negation folded into
/// each summand as a leading `Neg`.
pub fn summands(e: &Expr) -> Vec<Expr> {
    fn walk(e: &Expr, negated: bool, out: &mut Vec<Expr>) {
        match e {
            Expr::Add(a, b) => {
                walk(a, negated, out);
                walk(b, negated, out);
            }
            Expr::Sub(a, b) => {
                walk(a, negated, out);
                walk(b, !negated, out);
            }
            Expr::Neg(a) => walk(a, !negated, out),
            other if negated => out.push(Expr::Neg(Box::new(other.clone()))),
            other => out.push(other.clone()),
        }
    }
    let mut out = Vec::new();
    walk(e, false, &mut out);
    out
}
