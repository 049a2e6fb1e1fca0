//! Truncated Laurent series in `q` with arbitrary-precision integer coefficients.
//!
//! A [`Series`] knows the coefficients of `q^n` for every `n < order` and
//! nothing beyond. Every operation propagates the smallest order its operands
//! can justify, so a coefficient is never reported past the point where it is
//! actually determined.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{max, min};
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    DuplicateExponent(i64),
    ExponentBeyondOrder { exponent: i64, order: i64 },
    /// Inversion needs a leading coefficient of +1 or -1.
    NonUnitLeadingCoefficient(BigInt),
    /// Exact division produced a non-integral coefficient at this exponent.
    InexactDivision { exponent: i64 },
    DivisionByZero,
    OrderExceeded { exponent: i64, order: i64 },
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::DuplicateExponent(e) => write!(f, "duplicate exponent {e}"),
            SeriesError::ExponentBeyondOrder { exponent, order } => {
                write!(f, "exponent {exponent} is not below the order {order}")
            }
            SeriesError::NonUnitLeadingCoefficient(c) => {
                write!(f, "leading coefficient {c} is not a unit (must be +1 or -1)")
            }
            SeriesError::InexactDivision { exponent } => {
                write!(f, "quotient has a non-integral coefficient at q^{exponent}")
            }
            SeriesError::DivisionByZero => f.write_str("division by the zero series"),
            SeriesError::OrderExceeded { exponent, order } => {
                write!(f, "coefficient of q^{exponent} requested but the series is only known below q^{order}")
            }
        }
    }
}

impl core::error::Error for SeriesError {}

/// A truncated Laurent series `sum c_n q^n + O(q^order)`.
///
/// Coefficients are stored densely from the valuation up to `order - 1`.
/// The zero series stores nothing and reports its valuation as `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    valuation: i64,
    coeffs: Vec<BigInt>,
    order: i64,
}

impl Series {
    pub fn zero(order: i64) -> Self {
        Series { valuation: order, coeffs: Vec::new(), order }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(BigInt::one(), 0, order)
    }

    pub fn constant(c: impl Into<BigInt>, order: i64) -> Self {
        Self::monomial(c.into(), 0, order)
    }

    /// `c * q^exponent + O(q^order)`.
    pub fn monomial(c: impl Into<BigInt>, exponent: i64, order: i64) -> Self {
        let c = c.into();
        if c.is_zero() || exponent >= order {
            return Self::zero(order);
        }
        let mut coeffs = vec![BigInt::zero(); (order - exponent) as usize];
        coeffs[0] = c;
        Series { valuation: exponent, coeffs, order }
    }

    /// Builds a series from `(exponent, coefficient)` pairs.
    pub fn make<I, C>(pairs: I, order: i64) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let pairs: Vec<(i64, BigInt)> = pairs.into_iter().map(|(e, c)| (e, c.into())).collect();
        let mut seen: Vec<i64> = pairs.iter().map(|(e, _)| *e).collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(SeriesError::DuplicateExponent(w[0]));
        }
        if let Some(&e) = seen.iter().find(|&&e| e >= order) {
            return Err(SeriesError::ExponentBeyondOrder { exponent: e, order });
        }
        let Some(&start) = seen.first() else {
            return Ok(Self::zero(order));
        };
        let mut coeffs = vec![BigInt::zero(); (order - start) as usize];
        for (e, c) in pairs {
            coeffs[(e - start) as usize] = c;
        }
        Ok(Self::from_dense(start, coeffs, order))
    }

    /// Wraps dense coefficients for `q^start, q^(start+1), ...`, padding or cutting them
    /// to `order` and stripping leading zeros.
    pub fn from_dense(start: i64, mut coeffs: Vec<BigInt>, order: i64) -> Self {
        if order <= start {
            return Self::zero(order);
        }
        coeffs.resize((order - start) as usize, BigInt::zero());
        match coeffs.iter().position(|c| !c.is_zero()) {
            None => Self::zero(order),
            Some(lead) => {
                coeffs.drain(..lead);
                Series { valuation: start + lead as i64, coeffs, order }
            }
        }
    }

    /// Lowest exponent with a nonzero coefficient; `order` for the zero series.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.coeffs.first()
    }

    /// Dense coefficients starting at the valuation.
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Exact coefficient of `q^n`.
    pub fn coefficient(&self, n: i64) -> Result<BigInt, SeriesError> {
        if n >= self.order {
            return Err(SeriesError::OrderExceeded { exponent: n, order: self.order });
        }
        Ok(self.coeff_unchecked(n))
    }

    fn coeff_unchecked(&self, n: i64) -> BigInt {
        if n < self.valuation {
            BigInt::zero()
        } else {
            self.coeffs[(n - self.valuation) as usize].clone()
        }
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.valuation + i as i64, c))
    }

    /// Forgets everything from `q^order` on. Never raises the order.
    pub fn truncate(&self, order: i64) -> Series {
        if order >= self.order {
            return self.clone();
        }
        if order <= self.valuation {
            return Series::zero(order);
        }
        let keep = (order - self.valuation) as usize;
        Series { valuation: self.valuation, coeffs: self.coeffs[..keep].to_vec(), order }
    }

    pub fn scale(&self, c: &BigInt) -> Series {
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        Series::from_dense(self.valuation, coeffs, self.order)
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Series {
        Series { valuation: self.valuation + k, coeffs: self.coeffs.clone(), order: self.order + k }
    }

    /// The substitution `q -> q^m`.
    pub fn substitute_power(&self, m: u64) -> Series {
        assert!(m >= 1, "substitution power must be positive");
        let m = m as i64;
        let order = self.order * m;
        if self.is_zero() {
            return Series::zero(order);
        }
        let mut coeffs = vec![BigInt::zero(); (order - self.valuation * m) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * m as usize] = c.clone();
        }
        Series { valuation: self.valuation * m, coeffs, order }
    }

    /// The substitution `q -> -q`.
    pub fn negate_variable(&self) -> Series {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if (self.valuation + i as i64).is_odd() { -c } else { c.clone() })
            .collect();
        Series { valuation: self.valuation, coeffs, order: self.order }
    }

    /// `q * d/dq`: the coefficient of `q^n` is multiplied by `n`.
    pub fn q_derivative(&self) -> Series {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigInt::from(self.valuation + i as i64))
            .collect();
        Series::from_dense(self.valuation, coeffs, self.order)
    }

    pub fn add_series(&self, rhs: &Series) -> Series {
        self.combine(rhs, false)
    }

    pub fn sub_series(&self, rhs: &Series) -> Series {
        self.combine(rhs, true)
    }

    fn combine(&self, rhs: &Series, subtract: bool) -> Series {
        let order = min(self.order, rhs.order);
        let start = min(self.valuation, rhs.valuation);
        if start >= order {
            return Series::zero(order);
        }
        let mut coeffs = vec![BigInt::zero(); (order - start) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.valuation + i as i64;
            if e >= order {
                break;
            }
            coeffs[(e - start) as usize] = c.clone();
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            let e = rhs.valuation + i as i64;
            if e >= order {
                break;
            }
            let slot = &mut coeffs[(e - start) as usize];
            if subtract {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        Series::from_dense(start, coeffs, order)
    }

    pub fn mul_series(&self, rhs: &Series) -> Series {
        let order = min(self.order + rhs.valuation, rhs.order + self.valuation);
        if self.is_zero() || rhs.is_zero() {
            return Series::zero(order);
        }
        let start = self.valuation + rhs.valuation;
        let len = max(order - start, 0) as usize;
        Series::from_dense(start, convolve(&self.coeffs, &rhs.coeffs, len), order)
    }

    /// Multiplicative inverse; the leading coefficient must be +1 or -1.
    pub fn invert(&self) -> Result<Series, SeriesError> {
        let lead = self.leading_coefficient().ok_or(SeriesError::DivisionByZero)?;
        if !lead.abs().is_one() {
            return Err(SeriesError::NonUnitLeadingCoefficient(lead.clone()));
        }
        let len = self.coeffs.len();
        let quotient = divide_dense(&[BigInt::one()], &self.coeffs, len)
            .expect("division by a unit is always exact");
        let start = -self.valuation;
        Ok(Series::from_dense(start, quotient, start + len as i64))
    }

    /// `self / rhs` when the quotient has integer coefficients.
    ///
    /// Unit leading coefficients always succeed; otherwise every quotient
    /// coefficient must divide exactly or [`SeriesError::InexactDivision`] is returned.
    pub fn div_exact(&self, rhs: &Series) -> Result<Series, SeriesError> {
        if rhs.is_zero() {
            return Err(SeriesError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Series::zero(self.order - rhs.valuation));
        }
        let start = self.valuation - rhs.valuation;
        let len = min(self.coeffs.len(), rhs.coeffs.len());
        let quotient = divide_dense(&self.coeffs, &rhs.coeffs, len)
            .map_err(|k| SeriesError::InexactDivision { exponent: start + k as i64 })?;
        Ok(Series::from_dense(start, quotient, start + len as i64))
    }

    /// Integer power; negative exponents go through [`Series::invert`].
    pub fn pow(&self, e: i64) -> Result<Series, SeriesError> {
        if e < 0 {
            return self.invert()?.pow(-e);
        }
        if e == 0 {
            return Ok(Series::one(self.order - self.valuation));
        }
        let mut base = self.clone();
        let mut acc: Option<Series> = None;
        let mut e = e as u64;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul_series(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul_series(&base);
        }
        Ok(acc.unwrap())
    }
}

fn max_bits(xs: &[BigInt]) -> u64 {
    xs.iter().map(|x| x.bits()).max().unwrap_or(0)
}

/// Truncated product of two dense coefficient vectors, first `len` entries.
fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    if let Some(out) = convolve_i128(a, b, len) {
        return out;
    }
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let span = (len - i).min(b.len());
        for (j, bj) in b[..span].iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

// Fast path: when every partial sum provably fits in an i128.
fn convolve_i128(a: &[BigInt], b: &[BigInt], len: usize) -> Option<Vec<BigInt>> {
    let terms = a.len().min(b.len()).max(1) as u64;
    let headroom = 64 - u64::from(terms.leading_zeros());
    if max_bits(a) + max_bits(b) + headroom > 126 {
        return None;
    }
    let a: Vec<i128> = a.iter().map(|x| x.to_i128().unwrap()).collect();
    let b: Vec<i128> = b.iter().map(|x| x.to_i128().unwrap()).collect();
    let mut out = vec![0i128; len];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let span = (len - i).min(b.len());
        for (slot, &bj) in out[i..i + span].iter_mut().zip(&b[..span]) {
            *slot += ai * bj;
        }
    }
    Some(out.into_iter().map(BigInt::from).collect())
}

/// Long division of dense coefficient vectors: the first `len` coefficients of
/// `num / den`. `num` is zero-padded as needed; `den[0]` must be nonzero.
/// Returns the index of the first inexact quotient coefficient on failure.
fn divide_dense(num: &[BigInt], den: &[BigInt], len: usize) -> Result<Vec<BigInt>, usize> {
    if let Some(out) = divide_i128(num, den, len) {
        return out;
    }
    let lead = &den[0];
    let unit = lead.abs().is_one();
    let mut out: Vec<BigInt> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = num.get(k).cloned().unwrap_or_default();
        for i in 1..=k.min(den.len() - 1) {
            if !den[i].is_zero() && !out[k - i].is_zero() {
                acc -= &den[i] * &out[k - i];
            }
        }
        if unit {
            out.push(if lead.is_negative() { -acc } else { acc });
        } else {
            let (quo, rem) = acc.div_rem(lead);
            if !rem.is_zero() {
                return Err(k);
            }
            out.push(quo);
        }
    }
    Ok(out)
}

// Checked i128 attempt; `None` means an intermediate left the i128 range.
fn divide_i128(num: &[BigInt], den: &[BigInt], len: usize) -> Option<Result<Vec<BigInt>, usize>> {
    let num: Vec<i128> = num.iter().take(len).map(|x| x.to_i128()).collect::<Option<_>>()?;
    let den: Vec<i128> = den.iter().take(len).map(|x| x.to_i128()).collect::<Option<_>>()?;
    let lead = den[0];
    let mut out: Vec<i128> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = num.get(k).copied().unwrap_or(0);
        for i in 1..=k.min(den.len() - 1) {
            if den[i] != 0 && out[k - i] != 0 {
                acc = acc.checked_sub(den[i].checked_mul(out[k - i])?)?;
            }
        }
        if acc % lead != 0 {
            return Some(Err(k));
        }
        out.push(acc / lead);
    }
    Some(Ok(out.into_iter().map(BigInt::from).collect()))
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.add_series(rhs)
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, rhs: Series) -> Series {
        self.add_series(&rhs)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.sub_series(rhs)
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        self.sub_series(&rhs)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        self.mul_series(rhs)
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        self.mul_series(&rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            order: self.order,
        }
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        -&self
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let (neg, mag) = (c.is_negative(), c.abs());
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let unit = mag.is_one();
            match e {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    if e == 1 {
                        f.write_str("q")?;
                    } else {
                        write!(f, "q^{e}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "O(q^{})", self.order)
        } else {
            write!(f, " + O(q^{})", self.order)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(pairs: &[(i64, i64)], order: i64) -> Series {
        Series::make(pairs.iter().copied(), order).unwrap()
    }

    fn geometric(order: i64) -> Series {
        Series::make((0..order).map(|n| (n, 1)), order).unwrap()
    }

    #[test]
    fn make_normalizes() {
        let one = s(&[(0, 1)], 10);
        assert_eq!(one.valuation(), 0);
        assert_eq!(one.coefficient(0).unwrap(), BigInt::one());
        let zero = s(&[], 10);
        assert!(zero.is_zero());
        let laurent = s(&[(-1, 1), (0, 1)], 5);
        assert_eq!(laurent.valuation(), -1);
        assert_eq!(laurent.coefficient(4).unwrap(), BigInt::zero());
        assert_eq!(s(&[(0, 0), (2, 3)], 5).valuation(), 2);
    }

    #[test]
    fn make_rejects_duplicates_and_overflow() {
        assert_eq!(
            Series::make([(1, 1), (1, 2)], 5).unwrap_err(),
            SeriesError::DuplicateExponent(1)
        );
        assert!(matches!(
            Series::make([(5, 1)], 5).unwrap_err(),
            SeriesError::ExponentBeyondOrder { exponent: 5, order: 5 }
        ));
    }

    #[test]
    fn add_and_sub() {
        assert!((s(&[(0, 1)], 10) + s(&[(0, -1)], 10)).is_zero());
        assert_eq!(s(&[(1, 1)], 10) + s(&[(1, 1)], 10), s(&[(1, 2)], 10));
        let sum = s(&[(0, 1)], 4) + s(&[(0, 1)], 9);
        assert_eq!(sum.order(), 4);
    }

    #[test]
    fn mul_basics() {
        assert_eq!(s(&[(2, 1)], 20) * s(&[(3, 1)], 20), s(&[(5, 1)], 22));
        let p = s(&[(0, 1), (1, -1)], 30) * geometric(30);
        assert_eq!(p, Series::one(30));
    }

    #[test]
    fn mul_order_uses_valuations() {
        let a = s(&[(2, 1)], 10);
        let b = s(&[(-1, 1), (0, 3)], 10);
        let p = &a * &b;
        assert_eq!(p.order(), 9);
        assert_eq!(p.valuation(), 1);
    }

    #[test]
    fn invert_geometric() {
        let inv = s(&[(0, 1), (1, -1)], 12).invert().unwrap();
        assert_eq!(inv, geometric(12));
        let err = s(&[(0, 2), (1, 1)], 12).invert().unwrap_err();
        assert_eq!(err, SeriesError::NonUnitLeadingCoefficient(BigInt::from(2)));
    }

    #[test]
    fn invert_laurent() {
        // q - q^2 known below q^10 -> q^-1 (1 + q + ...) known below q^8
        let a = s(&[(1, 1), (2, -1)], 10);
        let inv = a.invert().unwrap();
        assert_eq!(inv.valuation(), -1);
        assert_eq!(inv.order(), 8);
        assert_eq!((&a * &inv).truncate(8), Series::one(8));
    }

    #[test]
    fn exact_division_with_non_unit_lead() {
        let den = s(&[(0, 2), (1, 2)], 10);
        let num = &den * &s(&[(0, 1), (3, -5)], 10);
        assert_eq!(num.div_exact(&den).unwrap(), s(&[(0, 1), (3, -5)], 10));
        let err = s(&[(0, 1)], 10).div_exact(&den).unwrap_err();
        assert_eq!(err, SeriesError::InexactDivision { exponent: 0 });
        assert_eq!(s(&[(0, 1)], 10).div_exact(&Series::zero(10)), Err(SeriesError::DivisionByZero));
    }

    #[test]
    fn substitution_shift_derivative() {
        assert_eq!(s(&[(0, 1), (1, 1)], 5).substitute_power(2), s(&[(0, 1), (2, 1)], 10));
        assert!(Series::zero(7).substitute_power(5).is_zero());
        assert_eq!(Series::one(10).shift(3), s(&[(3, 1)], 13));
        assert_eq!(s(&[(-1, 1)], 4).shift(1), s(&[(0, 1)], 5));
        assert!(Series::one(5).q_derivative().is_zero());
        assert_eq!(s(&[(3, 1)], 8).q_derivative(), s(&[(3, 3)], 8));
        let d = geometric(6).q_derivative();
        assert_eq!(d, Series::make((1..6).map(|n| (n, n)), 6).unwrap());
        assert_eq!(s(&[(1, 1), (2, 1)], 5).negate_variable(), s(&[(1, -1), (2, 1)], 5));
    }

    #[test]
    fn coefficient_beyond_order_errors() {
        let a = geometric(5);
        assert_eq!(a.coefficient(-3).unwrap(), BigInt::zero());
        assert_eq!(
            a.coefficient(5).unwrap_err(),
            SeriesError::OrderExceeded { exponent: 5, order: 5 }
        );
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let a = s(&[(0, 1), (1, -1), (2, 3)], 15);
        let cube = &(&a * &a) * &a;
        assert_eq!(a.pow(3).unwrap(), cube);
        assert_eq!(a.pow(-2).unwrap(), (&a * &a).invert().unwrap());
    }

    #[test]
    fn big_coefficients_take_the_slow_path() {
        let big = BigInt::from(1u64 << 62) * BigInt::from(1u64 << 62);
        let a = Series::from_dense(0, vec![BigInt::one(), big.clone()], 3);
        let sq = &a * &a;
        assert_eq!(sq.coefficient(2).unwrap(), &big * &big);
        let inv = a.invert().unwrap();
        assert_eq!(inv.coefficient(2).unwrap(), &big * &big);
    }

    #[test]
    fn display() {
        let a = s(&[(0, 1), (1, -1), (3, 2)], 6);
        assert_eq!(alloc::format!("{a}"), "1 - q + 2*q^3 + O(q^6)");
        assert_eq!(alloc::format!("{}", Series::zero(4)), "O(q^4)");
    }
}
