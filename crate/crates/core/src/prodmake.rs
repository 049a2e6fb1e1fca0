//! Recovering `f = prod_{n>=1} (1 - q^n)^{a_n}` from the coefficients of `f`.
//!
//! With `t_n` the coefficients of `-q f'/f`, the exponents satisfy
//! `t_n = sum_{d | n} d a_d`, which is solved for `a_n` one `n` at a time.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dissection::{dissect, DissectionError};
use crate::qproducts::Sign;
use crate::series::{Series, SeriesError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProdmakeError {
    /// Input must have valuation 0 and constant term +1.
    NotUnit,
    /// `n` does not divide the numerator of the recurrence at this index.
    NonIntegralExponent(u64),
    /// The slice's leading coefficient does not divide the whole slice.
    NonIntegralScalar { residue: u64 },
    /// Re-expanding the recovered exponents did not reproduce the input.
    Unsound { exponent: i64 },
    Series(SeriesError),
    Dissection(DissectionError),
}

impl fmt::Display for ProdmakeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProdmakeError::NotUnit => f.write_str("series must start 1 + O(q)"),
            ProdmakeError::NonIntegralExponent(n) => {
                write!(f, "exponent of (1 - q^{n}) is not an integer")
            }
            ProdmakeError::NonIntegralScalar { residue } => {
                write!(f, "slice {residue} is not an integer multiple of its leading coefficient")
            }
            ProdmakeError::Unsound { exponent } => {
                write!(f, "recovered product disagrees with the input at q^{exponent}")
            }
            ProdmakeError::Series(e) => write!(f, "{e}"),
            ProdmakeError::Dissection(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ProdmakeError {}

impl From<SeriesError> for ProdmakeError {
    fn from(e: SeriesError) -> Self {
        ProdmakeError::Series(e)
    }
}

impl From<DissectionError> for ProdmakeError {
    fn from(e: DissectionError) -> Self {
        ProdmakeError::Dissection(e)
    }
}

/// Exponents `a_n`, `1 <= n < order`, of an eta-product form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaExponents {
    // index 0 is unused and always zero
    exponents: Vec<BigInt>,
}

impl EtaExponents {
    pub fn from_vec(mut exponents: Vec<BigInt>) -> Self {
        if exponents.is_empty() {
            exponents.push(BigInt::zero());
        }
        exponents[0] = BigInt::zero();
        EtaExponents { exponents }
    }

    /// Exponents are known for `n < order()`.
    pub fn order(&self) -> u64 {
        self.exponents.len() as u64
    }

    pub fn get(&self, n: u64) -> Option<&BigInt> {
        if n == 0 {
            return None;
        }
        self.exponents.get(n as usize)
    }

    /// `(n, a_n)` for every nonzero exponent.
    pub fn nonzero(&self) -> impl Iterator<Item = (u64, &BigInt)> + '_ {
        self.exponents.iter().enumerate().skip(1).filter(|(_, a)| !a.is_zero()).map(|(n, a)| (n as u64, a))
    }

    /// All exponents as `i64`, when they fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.exponents.iter().map(ToPrimitive::to_i64).collect()
    }

    /// `prod (1 - q^n)^{a_n}` to order `order()`.
    pub fn expand(&self) -> Series {
        let len = self.exponents.len();
        let mut buf = vec![BigInt::zero(); len];
        buf[0] = BigInt::one();
        for (n, a) in self.nonzero() {
            multiply_binomial_power(&mut buf, n as usize, a);
        }
        Series::from_dense(0, buf, len as i64)
    }
}

/// `buf *= (1 - q^d)^e` via the binomial series of `(1 - x)^e`.
fn multiply_binomial_power(buf: &mut [BigInt], d: usize, e: &BigInt) {
    let len = buf.len();
    let terms = (len - 1) / d + 1;
    // c_k = coefficient of x^k in (1 - x)^e
    let mut c: Vec<BigInt> = Vec::with_capacity(terms);
    c.push(BigInt::one());
    for k in 1..terms {
        let kk = BigInt::from(k);
        let next = -(&c[k - 1] * (e - &kk + BigInt::one())) / &kk;
        if next.is_zero() && e.is_positive() {
            break;
        }
        c.push(next);
    }
    for i in (0..len).rev() {
        let mut acc = BigInt::zero();
        for (k, ck) in c.iter().enumerate() {
            if k * d > i {
                break;
            }
            if !ck.is_zero() {
                acc += ck * &buf[i - k * d];
            }
        }
        buf[i] = acc;
    }
}

/// Recovers the eta exponents of `f` below `min(n, f.order())`.
pub fn prodmake(f: &Series, n: i64) -> Result<EtaExponents, ProdmakeError> {
    if f.is_zero() || f.valuation() != 0 || !f.leading_coefficient().is_some_and(One::is_one) {
        return Err(ProdmakeError::NotUnit);
    }
    let n = n.min(f.order()).max(1);
    let f = f.truncate(n);
    let t = (-f.q_derivative()).mul_series(&f.invert()?);
    let len = n as usize;
    let mut a = vec![BigInt::zero(); len];
    // divisor_sum[m] accumulates sum_{d | m, d < m} d * a_d
    let mut divisor_sum = vec![BigInt::zero(); len];
    for m in 1..len {
        let numer = t.coefficient(m as i64)? - &divisor_sum[m];
        let (quo, rem) = numer.div_rem(&BigInt::from(m));
        if !rem.is_zero() {
            return Err(ProdmakeError::NonIntegralExponent(m as u64));
        }
        if !quo.is_zero() {
            let contribution = &quo * BigInt::from(m);
            let mut k = 2 * m;
            while k < len {
                divisor_sum[k] += &contribution;
                k += m;
            }
        }
        a[m] = quo;
    }
    let exps = EtaExponents::from_vec(a);
    let back = exps.expand();
    if let Some(e) = (0..n).find(|&e| back.coefficient(e).ok() != f.coefficient(e).ok()) {
        return Err(ProdmakeError::Unsound { exponent: e });
    }
    Ok(exps)
}

/// Residue pattern of eta exponents: `a_n = pattern[n mod modulus]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodView {
    pub modulus: u64,
    pub pattern: Vec<BigInt>,
    /// `(n, a_n)` for `n < modulus` where `a_n` departs from the pattern.
    pub leading_exceptions: Vec<(u64, BigInt)>,
}

/// One `(±q^offset; q^base)^exponent` factor of a grouped product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupedFactor {
    pub sign: Sign,
    pub offset: u64,
    pub exponent: BigInt,
}

impl PeriodView {
    /// The pattern as `(q^r; q^M)^{a_r}` factors, `r` in `1..=M`, nonzero only.
    pub fn unsigned_factors(&self) -> Vec<GroupedFactor> {
        (1..=self.modulus)
            .map(|r| GroupedFactor {
                sign: Sign::Plus,
                offset: r,
                exponent: self.pattern[(r % self.modulus) as usize].clone(),
            })
            .filter(|g| !g.exponent.is_zero())
            .collect()
    }

    /// Rewrites the pattern in `(±q^j; q^base)` factors for odd `base`, where
    /// the pattern period is `base` or `2 * base`. `(-q^j; q^base)` shows up as
    /// `-1` on `n ≡ j (mod base)` and `+1` on `n ≡ 2j (mod 2 base)`; for odd
    /// `base` this decomposition is unique.
    pub fn signed_factors(&self, base: u64) -> Option<Vec<GroupedFactor>> {
        if base == 0 || base.is_multiple_of(2) || (self.modulus != base && self.modulus != 2 * base) {
            return None;
        }
        let period = 2 * base;
        let at = |r: u64| self.pattern[(r % self.modulus) as usize].clone();
        let mut plus = vec![BigInt::zero(); base as usize + 1];
        let mut minus = vec![BigInt::zero(); base as usize + 1];
        let slot = |r: u64| if r.is_multiple_of(base) { base } else { r % base };
        for r in 0..period {
            if r % 2 == 1 {
                continue;
            }
            // r even, r + base odd, both ≡ r (mod base)
            let odd = (r + base) % period;
            let j = slot(r / 2);
            minus[j as usize] = at(r) - at(odd);
        }
        for r in (0..period).filter(|r| r % 2 == 1) {
            let u = slot(r);
            plus[u as usize] = at(r) + &minus[u as usize];
        }
        let mut out = Vec::new();
        for j in 1..=base {
            if !plus[j as usize].is_zero() {
                out.push(GroupedFactor { sign: Sign::Plus, offset: j, exponent: plus[j as usize].clone() });
            }
            if !minus[j as usize].is_zero() {
                out.push(GroupedFactor { sign: Sign::Minus, offset: j, exponent: minus[j as usize].clone() });
            }
        }
        Some(out)
    }
}

/// Emits the residue pattern mod `m` when `a_n` depends only on `n mod m`
/// for `m <= n < order - m`. Needs `order >= 3m`.
pub fn detect_period(e: &EtaExponents, m: u64) -> Option<PeriodView> {
    let n = e.order();
    if m == 0 || n < 3 * m {
        return None;
    }
    let pattern: Vec<BigInt> = (m..2 * m).map(|k| e.exponents[k as usize].clone()).collect();
    for k in m..n - m {
        if e.exponents[k as usize] != pattern[(k % m) as usize] {
            return None;
        }
    }
    let leading_exceptions = (1..m)
        .filter(|&k| e.exponents[k as usize] != pattern[k as usize])
        .map(|k| (k, e.exponents[k as usize].clone()))
        .collect();
    Some(PeriodView { modulus: m, pattern, leading_exceptions })
}

/// What a dissection slice looks like as `scalar * q^prefactor * product`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceGuess {
    pub residue: u64,
    /// Exponent of `q` in front of the product, in the original variable.
    pub prefactor: i64,
    pub scalar: BigInt,
    pub exponents: EtaExponents,
    pub period: Option<PeriodView>,
}

/// Conjectures a product form for every slice of the `m`-dissection of `f`.
///
/// Each nonzero slice is normalized by its leading term, mapped back to the
/// original variable (`q -> q^m`) and run through [`prodmake`] and
/// [`detect_period`] with the given period. Zero slices give `None`.
pub fn guess_dissection(
    f: &Series,
    m: u64,
    period: u64,
) -> Result<Vec<Option<SliceGuess>>, ProdmakeError> {
    let d = dissect(f, m)?;
    let mut out = Vec::with_capacity(m as usize);
    for (l, slice) in d.slices().iter().enumerate() {
        if slice.is_zero() {
            out.push(None);
            continue;
        }
        let v = slice.valuation();
        let scalar = slice.leading_coefficient().unwrap().clone();
        let scalar_series = Series::constant(scalar.clone(), slice.order());
        let normalized = slice
            .shift(-v)
            .div_exact(&scalar_series)
            .map_err(|_| ProdmakeError::NonIntegralScalar { residue: l as u64 })?;
        let lifted = normalized.substitute_power(m);
        let exponents = prodmake(&lifted, lifted.order())?;
        let period = detect_period(&exponents, period);
        out.push(Some(SliceGuess {
            residue: l as u64,
            prefactor: v * m as i64 + l as i64,
            scalar,
            exponents,
            period,
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qproducts::{euler, product_expand, PochFactor, QProduct};

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn partition_function_is_all_minus_one() {
        let f = euler(40).invert().unwrap();
        let e = prodmake(&f, 40).unwrap();
        assert!((1..40).all(|n| e.get(n) == Some(&BigInt::from(-1))));
        let p = detect_period(&e, 1).unwrap();
        assert_eq!(p.pattern, ints(&[-1]));
        assert!(p.leading_exceptions.is_empty());
    }

    #[test]
    fn one_minus_q() {
        let f = Series::make([(0, 1), (1, -1)], 20).unwrap();
        let e = prodmake(&f, 20).unwrap();
        assert_eq!(e.nonzero().collect::<Vec<_>>(), [(1, &BigInt::one())]);
    }

    #[test]
    fn rejects_non_unit_input() {
        let f = Series::make([(0, 2), (1, 1)], 10).unwrap();
        assert_eq!(prodmake(&f, 10), Err(ProdmakeError::NotUnit));
        let g = Series::make([(1, 1)], 10).unwrap();
        assert_eq!(prodmake(&g, 10), Err(ProdmakeError::NotUnit));
    }

    #[test]
    fn any_integer_series_with_constant_one_has_integer_exponents() {
        // 1 + 2q = (1-q)^-2 (1-q^2)^3 (1-q^3)^-2 (1-q^4)^3 ...
        let f = Series::make([(0, 1), (1, 2)], 12).unwrap();
        let e = prodmake(&f, 12).unwrap();
        let small = e.to_i64().unwrap();
        assert_eq!(&small[1..5], [-2, 3, -2, 3]);
        assert_eq!(detect_period(&e, 2), None);
    }

    #[test]
    fn expand_handles_large_exponents() {
        let e = EtaExponents::from_vec(ints(&[0, -7, 0, 12, 0, 0, 0, 0, 0, 0]));
        let direct = product_expand(
            &QProduct::from_factors([
                PochFactor::new(Sign::Plus, 1, 100, -7).unwrap(),
                PochFactor::new(Sign::Plus, 3, 100, 12).unwrap(),
            ]),
            10,
        );
        assert_eq!(e.expand(), direct);
    }

    #[test]
    fn signed_grouping_recovers_minus_factors() {
        let p = QProduct::from_matrix(
            &[(Sign::Minus, 5), (Sign::Minus, 10), (Sign::Minus, 25)],
            &[(Sign::Plus, 5), (Sign::Plus, 20)],
            25,
        )
        .unwrap();
        let f = product_expand(&p, 300);
        let e = prodmake(&f, 300).unwrap();
        let view = detect_period(&e, 50).unwrap();
        assert!(view.leading_exceptions.is_empty());
        let mut got = view.signed_factors(25).unwrap();
        got.sort();
        let one = BigInt::one();
        let mut want = alloc::vec![
            GroupedFactor { sign: Sign::Plus, offset: 5, exponent: -&one },
            GroupedFactor { sign: Sign::Plus, offset: 20, exponent: -&one },
            GroupedFactor { sign: Sign::Minus, offset: 5, exponent: one.clone() },
            GroupedFactor { sign: Sign::Minus, offset: 10, exponent: one.clone() },
            GroupedFactor { sign: Sign::Minus, offset: 25, exponent: one.clone() },
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(view.signed_factors(50).is_none());
    }

    #[test]
    fn non_periodic_gives_none() {
        let e = EtaExponents::from_vec(ints(&[0, 1, 0, 0, 2, 0, 0, 0, 0, 0, 0, 3, 0]));
        assert_eq!(detect_period(&e, 2), None);
        assert_eq!(detect_period(&e, 5), None);
    }
}
