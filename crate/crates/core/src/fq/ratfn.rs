use std::fmt;

use crate::error::{Error, Result};
use crate::fq::{FieldSpec, Poly};

/// An element of F_q(t) as a reduced fraction with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFn { num, den: Poly::one() }
    }

    pub fn new(num: Poly, den: Poly, f: &FieldSpec) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den, f);
        let num = num.exact_div(&g, f).unwrap();
        let den = den.exact_div(&g, f).unwrap();
        let lc_inv = f.inv(den.leading()).unwrap();
        Ok(RatFn { num: num.scale(lc_inv, f), den: den.scale(lc_inv, f) })
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFn, f: &FieldSpec) -> RatFn {
        let num = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        Self::new(num, self.den.mul(&o.den, f), f).unwrap()
    }

    pub fn neg(&self, f: &FieldSpec) -> RatFn {
        RatFn { num: self.num.neg(f), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFn, f: &FieldSpec) -> RatFn {
        self.add(&o.neg(f), f)
    }

    pub fn mul(&self, o: &RatFn, f: &FieldSpec) -> RatFn {
        Self::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f).unwrap()
    }

    pub fn mul_poly(&self, o: &Poly, f: &FieldSpec) -> RatFn {
        Self::new(self.num.mul(o, f), self.den.clone(), f).unwrap()
    }

    pub fn inv(&self, f: &FieldSpec) -> Result<RatFn> {
        Self::new(self.den.clone(), self.num.clone(), f)
    }

    pub fn div(&self, o: &RatFn, f: &FieldSpec) -> Result<RatFn> {
        Ok(self.mul(&o.inv(f)?, f))
    }

    /// Valuation at the monic irreducible `p`.
    pub fn valuation(&self, p: &Poly, f: &FieldSpec) -> Result<i64> {
        let vn = self.num.valuation(p, f).ok_or(Error::ZeroValuation)?;
        let vd = self.den.valuation(p, f).unwrap();
        Ok(vn as i64 - vd as i64)
    }

    /// Valuation at infinity: deg den - deg num.
    pub fn valuation_inf(&self) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroValuation);
        }
        Ok(self.den.deg() - self.num.deg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_arithmetic() {
        let f = FieldSpec::new(3).unwrap();
        let t = Poly::t();
        let a = RatFn::new(t.clone(), Poly::from_coeffs(vec![1, 1]), &f).unwrap();
        let b = RatFn::new(Poly::one(), t.clone(), &f).unwrap();
        let s = a.add(&b, &f);
        // t/(t+1) + 1/t = (t^2 + t + 1)/(t^2 + t)
        assert_eq!(s.num(), &Poly::from_coeffs(vec![1, 1, 1]));
        assert_eq!(s.den(), &Poly::from_coeffs(vec![0, 1, 1]));
        assert_eq!(s.sub(&b, &f), a);
        assert_eq!(a.div(&a, &f).unwrap(), RatFn::one());
        assert_eq!(b.valuation(&t, &f), Ok(-1));
        assert_eq!(b.valuation_inf(), Ok(1));
        assert!(RatFn::new(t, Poly::zero(), &f).is_err());
    }
}
