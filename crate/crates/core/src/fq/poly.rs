use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::fq::{Elem, FieldSpec};

/// A dense polynomial in F_q[t], coefficients stored constant term first.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and `degree()` returns `None` for it. Arithmetic takes the
/// field as an explicit argument; a `Poly` does not know its field.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{self}]")
    }
}

/// Comma separated coefficients, constant term first; the zero polynomial is `0`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Ordered by degree (zero first), then lexicographically by the coefficient
/// sequence read from the constant term upwards.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1] }
    }

    /// The indeterminate t.
    pub fn t() -> Self {
        Poly { coeffs: vec![0, 1] }
    }

    pub fn constant(c: Elem) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: Elem, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// The polynomial whose coefficient vector (length `len`, constant term
    /// first) has index `idx` in lexicographic order; the constant term is the
    /// most significant digit.
    pub fn from_lex_index(mut idx: u64, q: u32, len: usize) -> Self {
        let mut coeffs = vec![0; len];
        for slot in coeffs.iter_mut().rev() {
            *slot = (idx % q as u64) as Elem;
            idx /= q as u64;
        }
        Self::from_coeffs(coeffs)
    }

    /// Monic polynomial of exact degree `d` with lexicographic index `idx` among
    /// the q^d monic polynomials of that degree.
    pub fn monic_from_lex_index(idx: u64, q: u32, d: usize) -> Self {
        let mut p = Self::from_lex_index(idx, q, d);
        p.coeffs.resize(d, 0);
        p.coeffs.push(1);
        p
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to -1.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn add(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self, f: &FieldSpec) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: Elem, f: &FieldSpec) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|&x| f.mul(x, c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly, f: &FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn square(&self, f: &FieldSpec) -> Poly {
        self.mul(self, f)
    }

    pub fn pow(&self, mut e: u32, f: &FieldSpec) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.square(f);
            }
        }
        acc
    }

    /// Multiplies by t^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Keeps the terms of degree below `k` (reduction modulo t^k).
    pub fn truncate(&self, k: usize) -> Poly {
        Self::from_coeffs(self.coeffs.iter().take(k).copied().collect())
    }

    /// Euclidean division: returns (quotient, remainder) with deg r < deg d.
    pub fn div_rem(&self, d: &Poly, f: &FieldSpec) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let lead_inv = f.inv(d.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[i - dd] = factor;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = f.sub(rem[idx], f.mul(factor, dc));
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, d: &Poly, f: &FieldSpec) -> Result<Poly> {
        Ok(self.div_rem(d, f)?.1)
    }

    /// Quotient of an exact division; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly, f: &FieldSpec) -> Option<Poly> {
        let (q, r) = self.div_rem(d, f).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Poly, f: &FieldSpec) -> bool {
        other.rem(self, f).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Splits off the leading coefficient: returns (lc, self / lc).
    pub fn monic_parts(&self, f: &FieldSpec) -> (Elem, Poly) {
        if self.is_zero() {
            return (0, Poly::zero());
        }
        let lc = self.leading();
        (lc, self.scale(f.inv(lc).unwrap(), f))
    }

    pub fn monic(&self, f: &FieldSpec) -> Poly {
        self.monic_parts(f).1
    }

    /// Monic greatest common divisor; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Extended Euclid: returns (g, s, u) with s*self + u*other = g, g monic.
    pub fn ext_gcd(&self, other: &Poly, f: &FieldSpec) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut u0, mut u1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (quo, rem) = r0.div_rem(&r1, f).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, rem);
            let s2 = s0.sub(&quo.mul(&s1, f), f);
            s0 = std::mem::replace(&mut s1, s2);
            let u2 = u0.sub(&quo.mul(&u1, f), f);
            u0 = std::mem::replace(&mut u1, u2);
        }
        if r0.is_zero() {
            return (r0, s0, u0);
        }
        let inv = f.inv(r0.leading()).unwrap();
        (r0.scale(inv, f), s0.scale(inv, f), u0.scale(inv, f))
    }

    /// Inverse of `self` modulo `m`, when they are coprime.
    pub fn inv_mod(&self, m: &Poly, f: &FieldSpec) -> Option<Poly> {
        let (g, s, _) = self.ext_gcd(m, f);
        g.is_one().then(|| s.rem(m, f).expect("nonzero modulus"))
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly, f: &FieldSpec) -> Poly {
        self.mul(other, f).rem(m, f).expect("nonzero modulus")
    }

    pub fn pow_mod(&self, e: &BigUint, m: &Poly, f: &FieldSpec) -> Poly {
        let mut acc = Poly::one().rem(m, f).expect("nonzero modulus");
        let base = self.rem(m, f).expect("nonzero modulus");
        for i in (0..e.bits()).rev() {
            acc = acc.mul_mod(&acc, m, f);
            if e.bit(i) {
                acc = acc.mul_mod(&base, m, f);
            }
        }
        acc
    }

    pub fn eval(&self, x: Elem, f: &FieldSpec) -> Elem {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self, f: &FieldSpec) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Multiplicity of the irreducible `p` in `self`; `None` for the zero polynomial.
    pub fn valuation(&self, p: &Poly, f: &FieldSpec) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let mut v = 0;
        let mut rest = self.clone();
        while let Some(quo) = rest.exact_div(p, f) {
            rest = quo;
            v += 1;
        }
        Some(v)
    }

    /// t^deg * self(1/t): coefficient sequence reversed over `deg + 1` slots.
    pub fn reversed(&self, deg: usize) -> Poly {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(deg + 1, 0);
        coeffs.reverse();
        Self::from_coeffs(coeffs)
    }

    /// Square root of a perfect square in F_q[t] (q odd), normalised to have a
    /// leading coefficient that is the field's canonical square root.
    pub fn sqrt(&self, f: &FieldSpec) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let d = self.degree().unwrap();
        if d % 2 == 1 {
            return None;
        }
        let h = d / 2;
        let lead = f.sqrt(self.leading())?;
        let two_lead_inv = f.inv(f.mul(f.from_int(2), lead))?;
        // Solve for the coefficients of r from the top down.
        let mut r = vec![0; h + 1];
        r[h] = lead;
        for k in (0..h).rev() {
            // coefficient of t^{h+k} in r^2 must equal self's.
            let mut acc = 0;
            for i in (k + 1)..=h {
                let j = h + k - i;
                if j > k && j <= h {
                    acc = f.add(acc, f.mul(r[i], r[j]));
                }
            }
            let target = f.sub(self.coeff(h + k), acc);
            r[k] = f.mul(target, two_lead_inv);
        }
        let root = Self::from_coeffs(r);
        (root.square(f) == *self).then_some(root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[u32]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }

    #[test]
    fn gcd_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        // gcd(t^2 + t, t) = t over F_2
        assert_eq!(p(&[0, 1, 1]).gcd(&p(&[0, 1]), &f2), p(&[0, 1]));
        let f3 = FieldSpec::new(3).unwrap();
        // gcd(a, 0) is a made monic
        assert_eq!(p(&[1, 2]).gcd(&Poly::zero(), &f3), p(&[2, 1]));
        assert!(Poly::zero().gcd(&Poly::zero(), &f3).is_zero());
    }

    #[test]
    fn remainder_example() {
        let f3 = FieldSpec::new(3).unwrap();
        // (t^2 + 1) mod (t + 1) = (-1)^2 + 1 = 2
        let r = p(&[1, 0, 1]).rem(&p(&[1, 1]), &f3).unwrap();
        assert_eq!(r, Poly::constant(2));
        assert_eq!(p(&[1, 0, 1]).div_rem(&Poly::zero(), &f3), Err(Error::DivisionByZero));
    }

    #[test]
    fn division_identity() {
        let f5 = FieldSpec::new(5).unwrap();
        let a = p(&[3, 1, 4, 1, 0, 2]);
        let b = p(&[2, 0, 3]);
        let (quo, rem) = a.div_rem(&b, &f5).unwrap();
        assert!(rem.deg() < b.deg());
        assert_eq!(quo.mul(&b, &f5).add(&rem, &f5), a);
    }

    #[test]
    fn ext_gcd_bezout() {
        let f3 = FieldSpec::new(3).unwrap();
        let a = p(&[1, 2, 0, 1]);
        let b = p(&[2, 1, 1]);
        let (g, s, u) = a.ext_gcd(&b, &f3);
        assert_eq!(s.mul(&a, &f3).add(&u.mul(&b, &f3), &f3), g);
        assert!(g.divides(&a, &f3) && g.divides(&b, &f3));
    }

    #[test]
    fn sqrt_of_squares() {
        let f5 = FieldSpec::new(5).unwrap();
        let r = p(&[1, 3, 2]);
        let sq = r.square(&f5);
        let root = sq.sqrt(&f5).unwrap();
        assert_eq!(root.square(&f5), sq);
        assert_eq!(p(&[0, 1]).sqrt(&f5), None);
        assert_eq!(p(&[2]).sqrt(&f5), None);
    }

    #[test]
    fn ordering_and_display() {
        let mut v = vec![p(&[1, 1]), p(&[0, 1]), p(&[1]), Poly::zero(), p(&[0, 0, 1])];
        v.sort();
        assert_eq!(v, vec![Poly::zero(), p(&[1]), p(&[0, 1]), p(&[1, 1]), p(&[0, 0, 1])]);
        assert_eq!(p(&[1, 0, 1]).to_string(), "1,0,1");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn lex_indices() {
        assert_eq!(Poly::from_lex_index(1, 3, 2), p(&[0, 1]));
        assert_eq!(Poly::from_lex_index(3, 3, 2), p(&[1]));
        assert_eq!(Poly::monic_from_lex_index(0, 3, 2), p(&[0, 0, 1]));
    }
}
