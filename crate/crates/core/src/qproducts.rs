//! q-Pochhammer products and the classical functions built from them.
//!
//! Every function here has two independent routes where one exists: the
//! Rogers–Ramanujan functions and the theta functions `phi`, `psi` are
//! available both from their defining sums and from their product forms, so
//! each side can serve as an oracle for the other.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::series::Series;

/// Sign of the Pochhammer argument: `Plus` is `(q^j; q^m)`, `Minus` is `(-q^j; q^m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductError {
    /// `(q^0; q^m)` vanishes and `(-q^0; q^m)` has constant term 2.
    ZeroOffset(Sign),
    ZeroModulus,
}

impl fmt::Display for ProductError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductError::ZeroOffset(Sign::Plus) => f.write_str("(q^0; q^m) is identically zero"),
            ProductError::ZeroOffset(Sign::Minus) => {
                f.write_str("(-q^0; q^m) has constant term 2 and is not a unit")
            }
            ProductError::ZeroModulus => f.write_str("Pochhammer modulus must be positive"),
        }
    }
}

impl core::error::Error for ProductError {}

/// `(±q^offset; q^modulus)_∞ ^ power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PochFactor {
    sign: Sign,
    offset: u64,
    modulus: u64,
    power: i64,
}

impl PochFactor {
    pub fn new(sign: Sign, offset: u64, modulus: u64, power: i64) -> Result<Self, ProductError> {
        if modulus == 0 {
            return Err(ProductError::ZeroModulus);
        }
        if offset == 0 {
            return Err(ProductError::ZeroOffset(sign));
        }
        Ok(PochFactor { sign, offset, modulus, power })
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn power(&self) -> i64 {
        self.power
    }

    fn apply(&self, buf: &mut [BigInt]) {
        let len = buf.len() as u64;
        let mut d = self.offset;
        while d < len {
            apply_binomial(buf, d as usize, self.sign, self.power);
            d += self.modulus;
        }
    }
}

/// Multiplies `buf` in place by `(1 - s*q^d)^e`, where `s = +1` for `Plus`.
fn apply_binomial(buf: &mut [BigInt], d: usize, sign: Sign, e: i64) {
    let len = buf.len();
    for _ in 0..e.unsigned_abs() {
        if e > 0 {
            for k in (d..len).rev() {
                let (lo, hi) = buf.split_at_mut(k);
                match sign {
                    Sign::Plus => hi[0] -= &lo[k - d],
                    Sign::Minus => hi[0] += &lo[k - d],
                }
            }
        } else {
            for k in d..len {
                let (lo, hi) = buf.split_at_mut(k);
                match sign {
                    Sign::Plus => hi[0] += &lo[k - d],
                    Sign::Minus => hi[0] -= &lo[k - d],
                }
            }
        }
    }
}

/// Finite list of Pochhammer factors, i.e. the matrix notation
/// `(A_1, ..., A_n; B_1, ..., B_m; q^M)_∞`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QProduct {
    factors: Vec<PochFactor>,
}

impl QProduct {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_factors(factors: impl IntoIterator<Item = PochFactor>) -> Self {
        QProduct { factors: factors.into_iter().collect() }
    }

    /// Numerator entries get power +1 and denominator entries -1, all over `q^modulus`.
    pub fn from_matrix(
        numerator: &[(Sign, u64)],
        denominator: &[(Sign, u64)],
        modulus: u64,
    ) -> Result<Self, ProductError> {
        let mut p = QProduct::new();
        for &(sign, j) in numerator {
            p.push(PochFactor::new(sign, j, modulus, 1)?);
        }
        for &(sign, j) in denominator {
            p.push(PochFactor::new(sign, j, modulus, -1)?);
        }
        Ok(p)
    }

    pub fn push(&mut self, f: PochFactor) {
        self.factors.push(f);
    }

    pub fn factors(&self) -> &[PochFactor] {
        &self.factors
    }

    /// Merges repeated `(sign, offset, modulus)` entries and drops zero powers.
    pub fn normalized(&self) -> QProduct {
        let mut fs = self.factors.clone();
        fs.sort_by_key(|f| (f.sign, f.offset, f.modulus));
        let mut out: Vec<PochFactor> = Vec::new();
        for f in fs {
            match out.last_mut() {
                Some(last)
                    if (last.sign, last.offset, last.modulus) == (f.sign, f.offset, f.modulus) =>
                {
                    last.power += f.power
                }
                _ => out.push(f),
            }
        }
        out.retain(|f| f.power != 0);
        QProduct { factors: out }
    }

    /// Exponents `a_n` with `self = prod (1 - q^n)^{a_n}`, for `1 <= n < limit`
    /// (index 0 unused). `(1 + q^n)` is read as `(1 - q^{2n}) / (1 - q^n)`.
    pub fn eta_exponents(&self, limit: u64) -> Vec<i64> {
        let mut a = vec![0i64; limit as usize];
        for f in &self.factors {
            let mut n = f.offset;
            while n < limit {
                match f.sign {
                    Sign::Plus => a[n as usize] += f.power,
                    Sign::Minus => {
                        a[n as usize] -= f.power;
                        if 2 * n < limit {
                            a[2 * n as usize] += f.power;
                        }
                    }
                }
                n += f.modulus;
            }
        }
        a
    }
}

/// Expansion of a single factor to order `n`.
pub fn poch_expand(f: &PochFactor, n: i64) -> Series {
    product_expand(&QProduct::from_factors([*f]), n)
}

/// Expansion of a whole product to order `n`. The empty product is 1.
pub fn product_expand(p: &QProduct, n: i64) -> Series {
    if n <= 0 {
        return Series::zero(n);
    }
    let mut buf = vec![BigInt::zero(); n as usize];
    buf[0] = BigInt::one();
    for f in &p.factors {
        f.apply(&mut buf);
    }
    Series::from_dense(0, buf, n)
}

/// `(q; q)_∞` truncated.
pub fn euler(n: i64) -> Series {
    poch(Sign::Plus, 1, 1, 1, n)
}

fn poch(sign: Sign, offset: u64, modulus: u64, power: i64, n: i64) -> Series {
    let f = PochFactor::new(sign, offset, modulus, power).expect("valid built-in factor");
    poch_expand(&f, n)
}

/// `sum_{k>=0} q^{k^2 + extra*k} / ((1-q)...(1-q^k))`, the shared shape of the
/// Rogers–Ramanujan sums.
fn rr_sum(extra: i64, n: i64) -> Series {
    if n <= 0 {
        return Series::zero(n);
    }
    let len = n as usize;
    let mut acc = vec![BigInt::zero(); len];
    // 1 / (q; q)_k, maintained incrementally
    let mut inv = vec![BigInt::zero(); len];
    inv[0] = BigInt::one();
    let mut k: i64 = 0;
    loop {
        let e = k * k + extra * k;
        if e >= n {
            break;
        }
        for (i, c) in inv[..len - e as usize].iter().enumerate() {
            acc[i + e as usize] += c;
        }
        k += 1;
        apply_binomial(&mut inv, k as usize, Sign::Plus, -1);
    }
    Series::from_dense(0, acc, n)
}

/// Rogers–Ramanujan `G`, sum side.
pub fn g_sum(n: i64) -> Series {
    rr_sum(0, n)
}

/// Rogers–Ramanujan `H`, sum side.
pub fn h_sum(n: i64) -> Series {
    rr_sum(1, n)
}

/// `1 / (q, q^4; q^5)_∞`.
pub fn g_product(n: i64) -> Series {
    product_expand(
        &QProduct::from_matrix(&[], &[(Sign::Plus, 1), (Sign::Plus, 4)], 5).unwrap(),
        n,
    )
}

/// `1 / (q^2, q^3; q^5)_∞`.
pub fn h_product(n: i64) -> Series {
    product_expand(
        &QProduct::from_matrix(&[], &[(Sign::Plus, 2), (Sign::Plus, 3)], 5).unwrap(),
        n,
    )
}

/// Rogers–Ramanujan continued fraction `R(q) = H(q)/G(q)` (without the `q^{1/5}`).
pub fn rr_continued_fraction(n: i64) -> Series {
    h_sum(n).div_exact(&g_sum(n)).expect("G has constant term 1")
}

/// `1 / R(q) = G(q)/H(q)`.
pub fn rr_continued_fraction_inverse(n: i64) -> Series {
    g_sum(n).div_exact(&h_sum(n)).expect("H has constant term 1")
}

/// `phi(±q) = sum_{k in Z} (±q)^{k^2}`.
pub fn phi(sign: Sign, n: i64) -> Series {
    let mut pairs: Vec<(i64, BigInt)> = vec![(0, BigInt::one())];
    let mut k: i64 = 1;
    while k * k < n {
        let c = match (sign, k % 2 == 1) {
            (Sign::Minus, true) => -2,
            _ => 2,
        };
        pairs.push((k * k, BigInt::from(c)));
        k += 1;
    }
    Series::make(pairs, n.max(1)).unwrap().truncate(n)
}

/// `(q^2;q^2)^5 / ((q;q)^2 (q^4;q^4)^2)` with `q -> -q` for the minus sign.
pub fn phi_product(sign: Sign, n: i64) -> Series {
    let p = QProduct::from_factors([
        PochFactor::new(Sign::Plus, 2, 2, 5).unwrap(),
        PochFactor::new(Sign::Plus, 1, 1, -2).unwrap(),
        PochFactor::new(Sign::Plus, 4, 4, -2).unwrap(),
    ]);
    let s = product_expand(&p, n);
    match sign {
        Sign::Plus => s,
        Sign::Minus => s.negate_variable(),
    }
}

/// `psi(q) = sum_{k>=0} q^{k(k+1)/2}`.
pub fn psi(n: i64) -> Series {
    let mut pairs = Vec::new();
    let mut k: i64 = 0;
    while k * (k + 1) / 2 < n {
        pairs.push((k * (k + 1) / 2, 1));
        k += 1;
    }
    Series::make(pairs, n.max(1)).unwrap().truncate(n)
}

/// `(q^2;q^2)^2 / (q;q)`.
pub fn psi_product(n: i64) -> Series {
    let p = QProduct::from_factors([
        PochFactor::new(Sign::Plus, 2, 2, 2).unwrap(),
        PochFactor::new(Sign::Plus, 1, 1, -1).unwrap(),
    ]);
    product_expand(&p, n)
}

/// Order needed at `q` so that substituting `q -> q^m` reaches order `n`.
pub(crate) fn base_order(n: i64, m: u64) -> i64 {
    let m = m as i64;
    (n + m - 1).div_euclid(m).max(1)
}

/// Ramanujan's parameter `k = q R(q) R(q^2)^2`.
pub fn ramanujan_k(n: i64) -> Series {
    let r = rr_continued_fraction(n);
    let r2 = r.truncate(base_order(n, 2)).substitute_power(2);
    (&r * &r2.pow(2).unwrap()).shift(1).truncate(n)
}
