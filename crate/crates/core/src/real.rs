//! Arbitrary-precision reals backed by `astro-float`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: usize = 60;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary precision used for `digits` decimal digits, with guard bits.
pub fn bits_for_digits(digits: usize) -> usize {
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
    bits.div_ceil(64) * 64
}

/// A real number at a fixed binary precision.
#[derive(Clone, Debug)]
pub struct Real {
    v: BigFloat,
    p: usize,
}

impl Real {
    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn from_int(n: &BigInt, p: usize) -> Real {
        let v = with_consts(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, p, RM, cc));
        Real { v, p }
    }

    pub fn from_i64(n: i64, p: usize) -> Real {
        Self::from_int(&BigInt::from(n), p)
    }

    pub fn from_rational(r: &BigRational, p: usize) -> Real {
        let num = Self::from_int(r.numer(), p);
        let den = Self::from_int(r.denom(), p);
        num.div(&den)
    }

    pub fn zero(p: usize) -> Real {
        Real { v: BigFloat::from_word(0, p), p }
    }

    pub fn one(p: usize) -> Real {
        Real { v: BigFloat::from_word(1, p), p }
    }

    fn wrap(&self, other: &Real, v: BigFloat) -> Real {
        Real { v, p: self.p.max(other.p) }
    }

    pub fn add(&self, o: &Real) -> Real {
        self.wrap(o, self.v.add(&o.v, self.p.max(o.p), RM))
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.wrap(o, self.v.sub(&o.v, self.p.max(o.p), RM))
    }

    pub fn mul(&self, o: &Real) -> Real {
        self.wrap(o, self.v.mul(&o.v, self.p.max(o.p), RM))
    }

    pub fn div(&self, o: &Real) -> Real {
        self.wrap(o, self.v.div(&o.v, self.p.max(o.p), RM))
    }

    pub fn mul_rational(&self, r: &BigRational) -> Real {
        self.mul(&Real::from_rational(r, self.p))
    }

    pub fn neg(&self) -> Real {
        Real { v: self.v.neg(), p: self.p }
    }

    pub fn abs(&self) -> Real {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn ln(&self) -> Real {
        let v = with_consts(|cc| self.v.ln(self.p, RM, cc));
        Real { v, p: self.p }
    }

    pub fn exp(&self) -> Real {
        let v = with_consts(|cc| self.v.exp(self.p, RM, cc));
        Real { v, p: self.p }
    }

    pub fn sqrt(&self) -> Real {
        Real { v: self.v.sqrt(self.p, RM), p: self.p }
    }

    pub fn powi(&self, n: usize) -> Real {
        Real { v: self.v.powi(n, self.p, RM), p: self.p }
    }

    pub fn pow(&self, e: &Real) -> Real {
        let v = with_consts(|cc| self.v.pow(&e.v, self.p.max(e.p), RM, cc));
        self.wrap(e, v)
    }

    /// Natural logarithm of a positive integer.
    pub fn ln_int(n: u64, p: usize) -> Real {
        Real::from_i64(n as i64, p).ln()
    }

    /// The exact binary rational held by this value.
    pub fn to_rational(&self) -> BigRational {
        let Some((words, _, sign, e, _)) = self.v.as_raw_parts() else {
            panic!("non-finite real");
        };
        let mut m = BigUint::zero();
        for &w in words.iter().rev() {
            m = (m << 64u32) + BigUint::from(w as u64);
        }
        if m.is_zero() {
            return BigRational::zero();
        }
        let shift = e as i64 - 64 * words.len() as i64;
        let mut num = BigInt::from(m);
        if sign == Sign::Neg {
            num = -num;
        }
        if shift >= 0 {
            BigRational::from_integer(num << shift as u64)
        } else {
            BigRational::new(num, BigInt::one() << (-shift) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.to_rational();
        ratio_to_f64(&r)
    }

    /// Fixed-point decimal with `digits` places after the point, rounded half away from zero.
    pub fn to_fixed(&self, digits: usize) -> String {
        fixed_decimal(&self.to_rational(), digits)
    }

    /// Decimal with `sig` significant digits.
    pub fn to_sig(&self, sig: usize) -> String {
        let r = self.to_rational();
        if r.is_zero() {
            return fixed_decimal(&r, sig.saturating_sub(1));
        }
        let mag = decimal_magnitude(&r);
        let places = (sig as i64 - 1 - mag).max(0) as usize;
        fixed_decimal(&r, places)
    }

    pub fn cmp_real(&self, o: &Real) -> Ordering {
        self.to_rational().cmp(&o.to_rational())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_real(other) == Ordering::Equal
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_real(other))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sig(f.precision().unwrap_or(20)))
    }
}

/// floor(log10 |r|) for nonzero r.
fn decimal_magnitude(r: &BigRational) -> i64 {
    let a = r.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    let approx = a.numer().bits() as i64 - a.denom().bits() as i64;
    let mut mag = (approx as f64 * std::f64::consts::LOG10_2).floor() as i64 - 1;
    let pow = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(BigInt::from(10).pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(10).pow((-k) as u32))
        }
    };
    let mut p = pow(mag);
    while p > a {
        mag -= 1;
        p = pow(mag);
    }
    while p.clone() * ten.clone() <= a {
        mag += 1;
        p = pow(mag);
    }
    mag
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    // Scale to keep 64 significant bits in the quotient.
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64 - 64;
    let (n, d) = if shift > 0 {
        (r.numer().clone(), r.denom().clone() << shift as u64)
    } else {
        (r.numer().clone() << (-shift) as u64, r.denom().clone())
    };
    let q = n.div_floor(&d).to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift as i32)
}

/// Fixed-point rendering of an exact rational, rounded half away from zero.
pub fn fixed_decimal(r: &BigRational, places: usize) -> String {
    let neg = r.is_negative();
    let scaled = r.abs() * BigRational::from_integer(BigInt::from(10).pow(places as u32));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let n = (scaled + half).floor().to_integer();
    let mut digits = n.to_string();
    if places > 0 {
        if digits.len() <= places {
            digits = "0".repeat(places + 1 - digits.len()) + &digits;
        }
        digits.insert(digits.len() - places, '.');
    }
    if neg && !n.is_zero() {
        digits.insert(0, '-');
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_round_trip() {
        let p = bits_for_digits(50);
        let x = Real::from_rational(&rat(3, 8), p);
        assert_eq!(x.to_rational(), rat(3, 8));
        assert_eq!(Real::from_i64(-12, p).to_rational(), rat(-12, 1));
        assert_eq!(x.to_fixed(4), "0.3750");
        assert!((Real::from_rational(&rat(1, 3), p).to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn logarithms() {
        let p = bits_for_digits(50);
        assert_eq!(Real::ln_int(3, p).to_fixed(20), "1.09861228866810969140");
        let e = Real::one(p).exp();
        assert_eq!(e.to_fixed(20), "2.71828182845904523536");
        assert_eq!(Real::from_i64(2, p).sqrt().to_sig(12), "1.41421356237");
    }

    #[test]
    fn fixed_rendering() {
        assert_eq!(fixed_decimal(&rat(-1, 3), 3), "-0.333");
        assert_eq!(fixed_decimal(&rat(2, 3), 0), "1");
        assert_eq!(fixed_decimal(&rat(21, 4), 2), "5.25");
        assert_eq!(Real::from_rational(&rat(7210, 1), 256).to_sig(6), "7210.00");
    }
}
