//! Evaluation of expressions to truncated series.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use super::ast::{Expr, Func, JpItem};
use crate::qproducts::{
    base_order, g_sum, h_sum, phi, product_expand, psi, ramanujan_k, ProductError, Sign,
};
use crate::series::{Series, SeriesError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    Series(SeriesError),
    Product(ProductError),
    UnresolvedRef(String),
    /// Even the largest working order did not give the requested order.
    OrderNotReached { wanted: i64, reached: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalError {
    /// The subexpression that failed, printed.
    pub expr: String,
    pub kind: EvalErrorKind,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "in `{}`: ", self.expr)?;
        match &self.kind {
            EvalErrorKind::Series(e) => write!(f, "{e}"),
            EvalErrorKind::Product(e) => write!(f, "{e}"),
            EvalErrorKind::UnresolvedRef(n) => write!(f, "unresolved reference ${n}"),
            EvalErrorKind::OrderNotReached { wanted, reached } => {
                write!(f, "only reached O(q^{reached}) of the requested O(q^{wanted})")
            }
        }
    }
}

impl core::error::Error for EvalError {}

type JpKey = (Vec<JpItem>, Vec<JpItem>, u64);

/// Evaluates expressions, caching the named functions and products it expands.
#[derive(Default)]
pub struct Evaluator {
    functions: BTreeMap<Func, Series>,
    products: BTreeMap<JpKey, Series>,
}

const MAX_ATTEMPTS: usize = 8;

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// `expr` to exactly order `n`; the working order is raised until every
    /// loss from Laurent terms and division is covered.
    ///
    /// A divisor that truncates to zero (`q` at order 1, say) also raises
    /// the working order; only a divisor still zero on the last attempt is
    /// reported.
    pub fn eval(&mut self, expr: &Expr, n: i64) -> Result<Series, EvalError> {
        let mut budget = n.max(1);
        let mut reached = i64::MIN;
        for attempt in 1..=MAX_ATTEMPTS {
            let s = match self.eval_at(expr, budget) {
                Err(e)
                    if attempt < MAX_ATTEMPTS
                        && e.kind == EvalErrorKind::Series(SeriesError::DivisionByZero) =>
                {
                    budget = 2 * budget + 4;
                    continue;
                }
                r => r?,
            };
            if s.order() >= n {
                return Ok(s.truncate(n));
            }
            reached = s.order();
            budget += (n - s.order()).max(1) + 4;
        }
        Err(EvalError {
            expr: expr.to_string(),
            kind: EvalErrorKind::OrderNotReached { wanted: n, reached },
        })
    }

    fn function(&mut self, f: Func, n: i64) -> Series {
        if let Some(s) = self.functions.get(&f) {
            if s.order() >= n {
                return s.truncate(n);
            }
        }
        let s = match f {
            Func::G => g_sum(n),
            Func::H => h_sum(n),
            Func::R => h_sum(n).div_exact(&g_sum(n)).expect("G starts with 1"),
            Func::Rinv => g_sum(n).div_exact(&h_sum(n)).expect("H starts with 1"),
            Func::Phi => phi(Sign::Plus, n),
            Func::Psi => psi(n),
            Func::K => ramanujan_k(n),
        };
        self.functions.insert(f, s.clone());
        s
    }

    fn product(&mut self, expr: &Expr, n: i64) -> Result<Series, EvalError> {
        let Expr::Jp { numerator, denominator, modulus } = expr else {
            unreachable!("only called on products")
        };
        let key = (numerator.clone(), denominator.clone(), *modulus);
        if let Some(s) = self.products.get(&key) {
            if s.order() >= n {
                return Ok(s.truncate(n));
            }
        }
        let p = expr.jp_product().expect("is a product").map_err(|e| EvalError {
            expr: expr.to_string(),
            kind: EvalErrorKind::Product(e),
        })?;
        let s = product_expand(&p, n);
        self.products.insert(key, s.clone());
        Ok(s)
    }

    /// One pass at working order `n`; the result's order may fall short of `n`.
    pub fn eval_at(&mut self, expr: &Expr, n: i64) -> Result<Series, EvalError> {
        let fail = |kind| EvalError { expr: expr.to_string(), kind };
        let series_err = |e| fail(EvalErrorKind::Series(e));
        Ok(match expr {
            Expr::Int(c) => Series::constant(*c, n),
            Expr::Q => Series::monomial(1, 1, n),
            Expr::Pow(base, k) if **base == Expr::Q => Series::monomial(1, *k, n.max(*k + 1)),
            Expr::Add(a, b) => &self.eval_at(a, n)? + &self.eval_at(b, n)?,
            Expr::Sub(a, b) => &self.eval_at(a, n)? - &self.eval_at(b, n)?,
            Expr::Mul(a, b) => &self.eval_at(a, n)? * &self.eval_at(b, n)?,
            Expr::Div(a, b) => {
                let num = self.eval_at(a, n)?;
                let den = self.eval_at(b, n)?;
                num.div_exact(&den).map_err(series_err)?
            }
            Expr::Neg(a) => -self.eval_at(a, n)?,
            Expr::Pow(a, k) => {
                let base = self.eval_at(a, n)?;
                match base.pow(*k) {
                    Ok(s) => s,
                    Err(SeriesError::NonUnitLeadingCoefficient(_)) if *k < 0 => {
                        let p = base.pow(-*k).map_err(series_err)?;
                        Series::one(p.order()).div_exact(&p).map_err(series_err)?
                    }
                    Err(e) => return Err(series_err(e)),
                }
            }
            Expr::Call(f, arg) => {
                let mut s = self.function(*f, base_order(n, arg.power));
                if arg.negate {
                    s = s.negate_variable();
                }
                s.substitute_power(arg.power)
            }
            Expr::Subst(a, m) => self.eval_at(a, base_order(n, *m))?.substitute_power(*m),
            Expr::Jp { .. } => self.product(expr, n)?,
            Expr::Ref(name) => return Err(fail(EvalErrorKind::UnresolvedRef(name.clone()))),
        })
    }
}

/// One-shot evaluation with a fresh cache.
pub fn eval(expr: &Expr, n: i64) -> Result<Series, EvalError> {
    Evaluator::new().eval(expr, n)
}

/// Coefficient of `q^k` in `expr` to order `n`, convenient for spot checks.
pub fn coefficient(expr: &Expr, n: i64, k: i64) -> Result<BigInt, EvalError> {
    let s = eval(expr, n)?;
    s.coefficient(k).map_err(|e| EvalError { expr: expr.to_string(), kind: EvalErrorKind::Series(e) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::qproducts::{g_product, h_product, psi_product};

    fn ev(src: &str, n: i64) -> Series {
        eval(&parse(src).unwrap(), n).unwrap()
    }

    #[test]
    fn named_functions_match_products() {
        assert_eq!(ev("G", 60), g_product(60));
        assert_eq!(ev("H(q)", 60), h_product(60));
        assert_eq!(ev("psi(q)", 60), psi_product(60));
        assert_eq!(ev("JP(; q, q^4; q^5)", 60), g_product(60));
    }

    #[test]
    fn substitution_and_negation() {
        let s = ev("phi(-q^2)", 20);
        assert_eq!(s.coefficient(2).unwrap(), BigInt::from(-2));
        assert_eq!(s.coefficient(8).unwrap(), BigInt::from(2));
        assert_eq!(s.coefficient(1).unwrap(), BigInt::from(0));
        assert_eq!(ev("subst(G(q)*H(q), 3)", 30), ev("G(q^3)*H(q^3)", 30));
    }

    #[test]
    fn laurent_terms_reach_requested_order() {
        let s = ev("q^-3*psi(q) + q^-3*(1 - q)", 40);
        assert_eq!(s.order(), 40);
        assert_eq!(s.valuation(), -3);
        assert_eq!(s.coefficient(-3).unwrap(), BigInt::from(2));
        // the divisor is zero at working order 1
        let s = ev("1/(q*psi(q^5))", 1);
        assert_eq!((s.valuation(), s.order()), (-1, 1));
    }

    #[test]
    fn division_with_non_unit_denominator() {
        let s = ev("(2 + 4*q)/(2 + 2*q)", 10);
        let want = ev("(1 + 2*q)/(1 + q)", 10);
        assert_eq!(s, want);
        assert!(eval(&parse("1/(2 + q)").unwrap(), 10).is_err());
    }

    #[test]
    fn errors_name_the_subexpression() {
        let err = eval(&parse("G(q) + 1/(q - q)").unwrap(), 10).unwrap_err();
        assert_eq!(err.expr, "1/(q - q)");
        let err = eval(&parse("$X + 1").unwrap(), 10).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::UnresolvedRef("X".into()));
    }

    #[test]
    fn k_is_q_r_r2_squared() {
        assert_eq!(ev("k", 80), ev("q*R(q)*R(q^2)^2", 80));
        assert_eq!(ev("Rinv*R", 50), Series::one(50));
    }
}
