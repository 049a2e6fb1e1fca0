//! Reading the displayed terms of a dissection: `c * q^s * JP(...)`.

use std::collections::BTreeMap;

use qdissect_core::expr::Expr;
use qdissect_core::qproducts::Sign;
use qdissect_core::verify::summands;

/// One term `scalar * q^shift * product`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermShape {
    pub scalar: i64,
    pub shift: i64,
    /// `(sign, offset) -> power` over `q^modulus`, zero powers dropped.
    pub factors: BTreeMap<(Sign, u64), i64>,
    pub modulus: u64,
    pub product: Expr,
}

impl TermShape {
    /// `a_n` with `product = prod (1 - q^n)^{a_n}` for `1 <= n < limit`.
    pub fn eta_exponents(&self, limit: u64) -> Vec<i64> {
        match self.product.jp_product() {
            Some(Ok(p)) => p.eta_exponents(limit),
            _ => unreachable!("term shapes hold a well-formed product"),
        }
    }
}

/// Recognizes a product of integers, powers of `q`, negations and exactly one `JP`.
pub fn term_shape(e: &Expr) -> Option<TermShape> {
    fn walk(e: &Expr, s: &mut TermShape, seen_product: &mut bool) -> Option<()> {
        match e {
            Expr::Mul(a, b) => {
                walk(a, s, seen_product)?;
                walk(b, s, seen_product)
            }
            Expr::Neg(a) => {
                s.scalar = -s.scalar;
                walk(a, s, seen_product)
            }
            Expr::Int(c) => {
                s.scalar *= c;
                Some(())
            }
            Expr::Q => {
                s.shift += 1;
                Some(())
            }
            Expr::Pow(base, k) if **base == Expr::Q => {
                s.shift += k;
                Some(())
            }
            Expr::Jp { numerator, denominator, modulus } if !*seen_product => {
                e.jp_product()?.ok()?;
                *seen_product = true;
                s.product = e.clone();
                s.modulus = *modulus;
                let items = numerator.iter().map(|i| (i, 1)).chain(denominator.iter().map(|i| (i, -1)));
                for (item, p) in items {
                    *s.factors.entry((item.sign, item.offset)).or_insert(0) += p;
                }
                s.factors.retain(|_, p| *p != 0);
                Some(())
            }
            _ => None,
        }
    }
    let mut s = TermShape { scalar: 1, shift: 0, factors: BTreeMap::new(), modulus: 0, product: Expr::Int(1) };
    let mut seen_product = false;
    walk(e, &mut s, &mut seen_product)?;
    seen_product.then_some(s)
}

/// The summands of `e`, each read as a [`TermShape`]; `None` if any is not of that form.
pub fn term_shapes(e: &Expr) -> Option<Vec<TermShape>> {
    summands(e).iter().map(term_shape).collect()
}
