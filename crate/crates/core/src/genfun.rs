//! Truncated power series with rational coefficients and the zero-cycle
//! counts on P^2 over F_q.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest truncation order accepted by the series routines.
pub const MAX_ORDER: usize = 64;
/// Largest q accepted by the series routines.
pub const MAX_SERIES_Q: u64 = 16;

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn q_pow(q: u64, e: u32) -> BigInt {
    BigInt::from(q).pow(e)
}

fn series_guard(q: u64, order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::guard("series order", order, MAX_ORDER));
    }
    if q > MAX_SERIES_Q {
        return Err(Error::guard("q in series", q, MAX_SERIES_Q));
    }
    Ok(())
}

/// A power series c_0 + c_1 t + ... + c_N t^N modulo t^(N+1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<BigRational>,
}

impl TruncSeries {
    pub fn zero(order: usize) -> Self {
        TruncSeries { coeffs: vec![BigRational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// Pads or truncates `coeffs` to length order + 1.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        TruncSeries { coeffs }
    }

    /// 1/(1 - a t^k).
    pub fn geometric(a: BigRational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        let mut power = BigRational::one();
        for i in (0..=order).step_by(k.max(1)) {
            s.coeffs[i] = power.clone();
            power *= &a;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::arg("exp needs a zero constant term"));
        }
        let n = self.order();
        let mut g = vec![BigRational::zero(); n + 1];
        g[0] = BigRational::one();
        for i in 1..=n {
            let mut acc = BigRational::zero();
            for k in 1..=i {
                if !self.coeffs[k].is_zero() {
                    acc += rat(k) * &self.coeffs[k] * &g[i - k];
                }
            }
            g[i] = acc / rat(i);
        }
        Ok(TruncSeries { coeffs: g })
    }

    /// Logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::arg("log needs constant term 1"));
        }
        let n = self.order();
        let mut g = vec![BigRational::zero(); n + 1];
        for i in 1..=n {
            let mut acc = BigRational::zero();
            for k in 1..i {
                acc += rat(k) * &g[k] * &self.coeffs[i - k];
            }
            g[i] = &self.coeffs[i] - acc / rat(i);
        }
        Ok(TruncSeries { coeffs: g })
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::arg("inverse needs a nonzero constant term"));
        }
        let n = self.order();
        let c0_inv = self.coeffs[0].recip();
        let mut g = vec![BigRational::zero(); n + 1];
        g[0] = c0_inv.clone();
        for i in 1..=n {
            let mut acc = BigRational::zero();
            for k in 1..=i {
                acc += &self.coeffs[k] * &g[i - k];
            }
            g[i] = -acc * &c0_inv;
        }
        Ok(TruncSeries { coeffs: g })
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, o: &TruncSeries) -> TruncSeries {
        let n = self.order().min(o.order());
        TruncSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect() }
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, o: &TruncSeries) -> TruncSeries {
        let n = self.order().min(o.order());
        TruncSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] - &o.coeffs[i]).collect() }
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, o: &TruncSeries) -> TruncSeries {
        let n = self.order().min(o.order());
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                out[i + j] += a * &o.coeffs[j];
            }
        }
        TruncSeries { coeffs: out }
    }
}

fn to_integers(s: &TruncSeries) -> Vec<BigInt> {
    assert!(s.is_integral(), "series coefficients failed to cancel to integers");
    s.coeffs.iter().map(|c| c.to_integer()).collect()
}

/// |P^2(F_{q^k})|.
pub fn p2_points(q: u64, k: u32) -> BigInt {
    q_pow(q, 2 * k) + q_pow(q, k) + 1
}

/// Z(P^2, t) = 1/((1 - t)(1 - q t)(1 - q^2 t)) to order N.
pub fn zeta_p2_series(q: u64, order: usize) -> Result<TruncSeries> {
    series_guard(q, order)?;
    let factors = [1u64, q, q * q].map(|a| TruncSeries::geometric(rat(a), 1, order));
    Ok(&(&factors[0] * &factors[1]) * &factors[2])
}

/// |Sym^m P^2(F_q)| for m = 0..=m_max.
pub fn sym_counts(q: u64, m_max: usize) -> Result<Vec<BigInt>> {
    Ok(to_integers(&zeta_p2_series(q, m_max)?))
}

/// The even/odd closed formula for the number of effective 0-cycles of degree m.
pub fn chen7_closed(q: u64, m: u32) -> BigRational {
    let k = m / 2;
    let qr = rat(q);
    let sum: BigInt = (0..k).map(|i| BigInt::from(i + 1) * (q_pow(q, 2 * (m - i)) + q_pow(q, 2 * i + 1))).sum();
    let head = (BigRational::one() + qr.recip()) * rat(sum);
    let tail = if m % 2 == 0 {
        BigRational::new(BigInt::from(m + 2), 2.into()) * rat(q_pow(q, m))
    } else {
        BigRational::new(BigInt::from(m + 1), 2.into()) * rat(q_pow(q, m - 1) * (q * q + q + 1))
    };
    head + tail
}

/// Series sum_k (t^k / k) |P^2(F_{q^k})| / (1 - q^k t^k), whose exponential
/// generates the point counts of the Hilbert schemes of points.
pub fn hilb_log_series(q: u64, order: usize) -> Result<TruncSeries> {
    series_guard(q, order)?;
    let mut coeffs = vec![BigRational::zero(); order + 1];
    for k in 1..=order {
        let nk = p2_points(q, k as u32);
        let mut j = 0u32;
        while k * (j as usize + 1) <= order {
            coeffs[k * (j as usize + 1)] += BigRational::new(&nk * q_pow(q, k as u32 * j), BigInt::from(k));
            j += 1;
        }
    }
    Ok(TruncSeries::from_coeffs(coeffs, order))
}

/// |Hilb^m P^2(F_q)| for m = 0..=m_max, from the exponential formula.
pub fn hilb_counts(q: u64, m_max: usize) -> Result<Vec<BigInt>> {
    let series = hilb_log_series(q, m_max)?.exp()?;
    Ok(to_integers(&series))
}

/// Coefficients (constant first) of the polynomial Q -> |Hilb^m P^2(F_Q)|,
/// from the cell decomposition prod_{j>=1} prod_{i=0..2} 1/(1 - Q^{i+j-1} t^j).
pub fn hilb_betti_polynomial(m: usize) -> Vec<BigInt> {
    // table[n][e]: coefficient of t^n Q^e.
    let mut table: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); 2 * m + 1]; m + 1];
    table[0][0] = BigInt::one();
    for j in 1..=m {
        for i in 0..3 {
            let a = i + j - 1;
            // Multiply in place by 1/(1 - Q^a t^j): x_n += Q^a x_{n-j}.
            for n in j..=m {
                for e in (a..=2 * m).rev() {
                    let add = table[n - j][e - a].clone();
                    if !add.is_zero() {
                        table[n][e] += add;
                    }
                }
            }
        }
    }
    let mut poly = table[m].clone();
    while poly.len() > 1 && poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    poly
}

pub fn eval_poly(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Decomposition |Sym^2| - |D| + |E| of |Hilb^2 P^2(F_q)|, with D the diagonal
/// and E the exceptional divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hilb2Decomposition {
    pub sym2: BigInt,
    pub diagonal: BigInt,
    pub exceptional: BigInt,
    pub hilb2: BigInt,
}

impl Hilb2Decomposition {
    pub fn holds(&self) -> bool {
        &self.sym2 - &self.diagonal + &self.exceptional == self.hilb2
    }
}

pub fn hilb2_decomposition(q: u64) -> Result<Hilb2Decomposition> {
    Ok(Hilb2Decomposition {
        sym2: sym_counts(q, 2)?.swap_remove(2),
        diagonal: p2_points(q, 1),
        exceptional: BigInt::from(q + 1) * p2_points(q, 1),
        hilb2: hilb_counts(q, 2)?.swap_remove(2),
    })
}

pub(crate) fn mobius(n: u64) -> i32 {
    let mut n = n;
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Number P_m of prime effective 0-cycles (closed points) of degree m on P^2,
/// for m = 1..=m_max (index 0 holds 0).
pub fn closed_point_counts(q: u64, m_max: u32) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero()];
    for m in 1..=m_max {
        let mut total = BigInt::zero();
        for d in 1..=m {
            if m % d == 0 {
                total += p2_points(q, m / d) * mobius(d as u64);
            }
        }
        let (quo, rem) = total.div_rem(&BigInt::from(m));
        assert!(rem.is_zero());
        out.push(quo);
    }
    out
}

/// The even/odd closed formula for prime 0-cycles, with a flag telling
/// whether it agrees with the exact count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chen8 {
    pub value: BigRational,
    pub valid: bool,
}

pub fn smallest_divisor(m: u32) -> u32 {
    (2..=m).find(|d| m % d == 0).unwrap_or(m)
}

pub fn chen8_closed(q: u64, m: u32) -> Result<Chen8> {
    if m < 2 {
        return Err(Error::arg("m must be at least 2"));
    }
    let top = if m % 2 == 0 {
        q_pow(q, 2 * m) - q_pow(q, m / 2)
    } else {
        let j = smallest_divisor(m);
        q_pow(q, 2 * m) + q_pow(q, m) - q_pow(q, 2 * m / j) - q_pow(q, m / j)
    };
    let value = BigRational::new(top, BigInt::from(m));
    let exact = closed_point_counts(q, m).swap_remove(m as usize);
    Ok(Chen8 { valid: value == rat(exact), value })
}

/// Proportion of prime 0-cycles and its normalised distance from the main term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chen1 {
    pub ratio: BigRational,
    /// |m ratio - (1 - 1/q - 1/q^2 + 1/q^3)| q^m.
    pub normalized_error: BigRational,
}

pub fn prime_proportion_constant(q: u64) -> BigRational {
    let x = BigRational::new(1.into(), BigInt::from(q));
    BigRational::one() - &x - &x * &x + x.pow(3)
}

pub fn chen1_ratio(q: u64, m: u32) -> Result<Chen1> {
    if m < 1 {
        return Err(Error::arg("m must be at least 1"));
    }
    let primes = closed_point_counts(q, m).swap_remove(m as usize);
    let sym = sym_counts(q, m as usize)?.swap_remove(m as usize);
    let ratio = BigRational::new(primes, sym);
    let dev = (rat(m) * &ratio - prime_proportion_constant(q)).abs() * rat(q_pow(q, m));
    Ok(Chen1 { ratio, normalized_error: dev })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn zeta_coefficients() {
        let z = zeta_p2_series(2, 3).unwrap();
        assert_eq!(z.coeffs(), &[r(1, 1), r(7, 1), r(35, 1), r(155, 1)]);
        assert_eq!(sym_counts(3, 1).unwrap()[1], BigInt::from(13));
        assert_eq!(sym_counts(3, 2).unwrap()[2], BigInt::from(130));
    }

    #[test]
    fn chen7_examples() {
        assert_eq!(chen7_closed(2, 2), r(35, 1));
        assert_eq!(chen7_closed(2, 3), r(155, 1));
        assert_eq!(chen7_closed(2, 1), r(7, 1));
    }

    #[test]
    fn hilbert_scheme_counts() {
        assert_eq!(hilb_counts(2, 2).unwrap(), ints(&[1, 7, 49]));
        assert_eq!(hilb_betti_polynomial(2), ints(&[1, 2, 3, 2, 1]));
        assert_eq!(hilb_betti_polynomial(1), ints(&[1, 1, 1]));
        let d = hilb2_decomposition(2).unwrap();
        assert_eq!((d.sym2.clone(), d.diagonal.clone(), d.exceptional.clone()), (35.into(), 7.into(), 21.into()));
        assert!(d.holds());
        let counts = hilb_counts(3, 8).unwrap();
        for (m, c) in counts.iter().enumerate() {
            assert_eq!(*c, eval_poly(&hilb_betti_polynomial(m), &BigInt::from(3)));
        }
    }

    #[test]
    fn closed_points() {
        assert_eq!(closed_point_counts(2, 3), ints(&[0, 7, 7, 22]));
    }

    #[test]
    fn chen8_examples() {
        assert_eq!(chen8_closed(2, 2).unwrap(), Chen8 { value: r(7, 1), valid: true });
        assert_eq!(chen8_closed(2, 4).unwrap(), Chen8 { value: r(63, 1), valid: true });
        // (2^12 - 2^3)/6 is not an integer; the exact count is 679.
        let c = chen8_closed(2, 6).unwrap();
        assert_eq!(c.value, r(4088, 6));
        assert!(!c.valid);
        assert_eq!(closed_point_counts(2, 6)[6], BigInt::from(679));
    }

    #[test]
    fn chen1_examples() {
        let c = chen1_ratio(2, 2).unwrap();
        assert_eq!(c.ratio, r(1, 5));
        assert_eq!(c.normalized_error, r(1, 10));
        let c = chen1_ratio(2, 3).unwrap();
        assert_eq!(c.ratio, r(22, 155));
        assert!(c.normalized_error < r(41, 100));
        let c = chen1_ratio(3, 2).unwrap();
        assert_eq!(c.ratio, r(39, 130));
    }

    #[test]
    fn series_algebra() {
        let s = TruncSeries::from_coeffs(vec![r(0, 1), r(1, 2), r(-3, 4), r(2, 1)], 5);
        assert_eq!(s.exp().unwrap().log().unwrap(), s);
        let one_plus = &TruncSeries::one(5) + &s;
        assert_eq!(&one_plus * &one_plus.inverse().unwrap(), TruncSeries::one(5));
        assert!(TruncSeries::one(3).exp().is_err());
        assert!(matches!(zeta_p2_series(2, 65), Err(Error::Guard { .. })));
    }
}
