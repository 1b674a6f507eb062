//! Zeta values, Euler products of local densities and Peyre constants for
//! P^n and Hilb^m P^2 over function fields.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fq::count_irreducibles;
use crate::genfun::hilb_betti_polynomial;
use crate::ratpoints::schanuel_constant;
use crate::real::{bits_for_digits, Real};

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn q_pow(q: u64, e: i64) -> BigRational {
    rat(q).pow(e as i32)
}

/// Genus, class number and L-polynomial of a global function field with
/// constant field F_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalFieldParams {
    pub q: u64,
    pub g: u32,
    pub j: BigInt,
    /// Coefficients of L(u), constant term first.
    pub lpoly: Vec<BigInt>,
}

impl GlobalFieldParams {
    /// The rational function field F_q(t).
    pub fn rational(q: u64) -> Self {
        GlobalFieldParams { q, g: 0, j: BigInt::one(), lpoly: vec![BigInt::one()] }
    }

    /// Checks L(0) = 1, deg L = 2g and L(1) = J.
    pub fn check(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::arg("q must be at least 2"));
        }
        if self.lpoly.first() != Some(&BigInt::one()) {
            return Err(Error::arg("L-polynomial must have constant term 1"));
        }
        if self.lpoly.len() != 2 * self.g as usize + 1 {
            return Err(Error::arg(format!("L-polynomial of genus {} must have degree {}", self.g, 2 * self.g)));
        }
        let l1: BigInt = self.lpoly.iter().sum();
        if l1 != self.j {
            return Err(Error::arg(format!("L(1) = {l1} differs from J = {}", self.j)));
        }
        Ok(())
    }

    pub fn is_rational(&self) -> bool {
        self.g == 0
    }

    /// S_K(n+1, 1).
    pub fn schanuel(&self, n: u32) -> BigRational {
        crate::ratpoints::schanuel_constant_general(n, self.q, self.g, &self.j, &self.lpoly)
    }
}

/// zeta of F_q(t) at an integer s > 1: 1/((1 - q^{1-s})(1 - q^{-s})).
pub fn zeta_fqt(s: i64, q: u64) -> BigRational {
    let one = BigRational::one();
    ((&one - q_pow(q, 1 - s)) * (&one - q_pow(q, -s))).recip()
}

/// zeta of F_q(t) at a real s > 1.
pub fn zeta_fqt_real(s: &Real, q: u64) -> Real {
    let p = s.precision();
    let qr = Real::from_i64(q as i64, p);
    let one = Real::one(p);
    let a = one.sub(&qr.pow(&one.sub(s)));
    let b = one.sub(&qr.pow(&s.neg()));
    one.div(&a.mul(&b))
}

/// zeta_K(s) = L(q^{-s}) zeta_{F_q(t)}(s) for an integer s > 1.
pub fn zeta_k(s: i64, q: u64, lpoly: &[BigInt]) -> BigRational {
    let x = q_pow(q, -s);
    let l = lpoly.iter().rev().fold(BigRational::zero(), |acc, c| acc * &x + rat(c.clone()));
    l * zeta_fqt(s, q)
}

/// A polynomial with rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    pub fn from_ints(c: &[BigInt]) -> Self {
        RatPoly(c.iter().map(|x| rat(x.clone())).collect())
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly(out)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// Local density of Hilb^m P^2 at a place with residue field of order 1/x,
/// as the polynomial omega(x) = |Hilb^m P^2(F_{1/x})| x^{2m}, together with
/// the convergence factor (1 - x)^2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDensityModel {
    pub m: usize,
    pub omega: RatPoly,
}

impl LocalDensityModel {
    pub fn hilb(m: usize) -> Self {
        // |Hilb^m(F_Q)| = sum b_i Q^i, so omega(x) = sum b_i x^{2m-i}.
        let betti = hilb_betti_polynomial(m);
        let mut omega = vec![BigInt::zero(); 2 * m + 1];
        for (i, b) in betti.iter().enumerate() {
            omega[2 * m - i] = b.clone();
        }
        LocalDensityModel { m, omega: RatPoly::from_ints(&omega) }
    }

    /// (1 - x)^2 omega(x).
    pub fn local_factor(&self) -> RatPoly {
        let conv = RatPoly(vec![rat(1), rat(-2), rat(1)]);
        conv.mul(&self.omega)
    }

    /// omega(x) = 1 + 2x + O(x^2).
    pub fn has_expected_expansion(&self) -> bool {
        self.omega.coeff(0) == rat(1) && self.omega.coeff(1) == rat(2)
    }
}

/// A truncated Euler product over the places of F_q(t) of degree <= deg_cut,
/// stored as exact local factors with their multiplicities. Places of degree
/// d contribute N_q(d) finite places, plus the infinite place when d = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerProduct {
    pub q: u64,
    pub deg_cut: u32,
    /// (degree, number of places, local factor at x = q^{-degree}).
    pub factors: Vec<(u32, BigUint, BigRational)>,
    /// sum of |coefficients| of F(x) - 1, where F is the local factor polynomial.
    tail_constant: BigRational,
    /// lowest power of x in F(x) - 1.
    tail_order: u32,
}

/// Largest deg_cut accepted by Euler-product truncations.
pub const MAX_DEG_CUT: u32 = 40;

pub fn places_of_degree(q: u64, d: u32) -> BigUint {
    let n = count_irreducibles(q, d);
    if d == 1 {
        n + 1u32
    } else {
        n
    }
}

impl EulerProduct {
    /// Product of F(q^{-d}) over places of degree d <= deg_cut.
    pub fn new(q: u64, local: &RatPoly, deg_cut: u32) -> Result<Self> {
        if deg_cut == 0 {
            return Err(Error::arg("deg_cut must be at least 1"));
        }
        if deg_cut > MAX_DEG_CUT {
            return Err(Error::guard("deg_cut", deg_cut, MAX_DEG_CUT));
        }
        if local.coeff(0) != rat(1) {
            return Err(Error::arg("local factor must have constant term 1"));
        }
        let factors = (1..=deg_cut)
            .map(|d| (d, places_of_degree(q, d), local.eval(&q_pow(q, -(d as i64)))))
            .collect();
        let tail_order = (1..local.0.len()).find(|&i| !local.0[i].is_zero()).unwrap_or(local.0.len()) as u32;
        let tail_constant = local.0.iter().skip(1).map(|c| c.abs()).sum();
        Ok(EulerProduct { q, deg_cut, factors, tail_constant, tail_order })
    }

    /// Exact value; feasible only for small truncations.
    pub fn exact(&self) -> BigRational {
        self.factors
            .iter()
            .map(|(_, n, f)| f.pow(n.to_i32().expect("multiplicity fits in i32")))
            .fold(BigRational::one(), |a, b| a * b)
    }

    pub fn value(&self, p: usize) -> Real {
        self.factors.iter().fold(Real::one(p), |acc, (_, n, f)| {
            let n = n.to_usize().expect("multiplicity fits in usize");
            acc.mul(&Real::from_rational(f, p).powi(n))
        })
    }

    /// Bound on |log(full product) - log(truncated product)|.
    ///
    /// With F(x) = 1 + G(x), |G(x)| <= A x^r for x <= 1/q where A is the sum of
    /// the absolute coefficients. When A q^{-r(D+1)} <= 1/2 each omitted
    /// factor has |log F| <= 2 A x^r, and there are at most q^d/d places of
    /// degree d > 1.
    pub fn log_tail_bound(&self) -> Option<BigRational> {
        let d0 = self.deg_cut as i64 + 1;
        let r = self.tail_order as i64;
        if r == 0 {
            return None;
        }
        if r == 1 {
            // Divergent in general; no bound.
            return None;
        }
        let a = &self.tail_constant;
        if a * q_pow(self.q, -r * d0) > BigRational::new(1.into(), 2.into()) {
            return None;
        }
        // sum_{d>=D+1} (q^d/(D+1)) 2A q^{-rd} = 2A/(D+1) q^{(1-r)(D+1)} / (1 - q^{1-r})
        let two = rat(2);
        let ratio = q_pow(self.q, 1 - r);
        Some(&two * a / rat(d0) * q_pow(self.q, (1 - r) * d0) / (BigRational::one() - ratio))
    }

    /// Bound on |full product - truncated product|, at precision p.
    pub fn residual_bound(&self, p: usize) -> Option<Real> {
        let eps = Real::from_rational(&self.log_tail_bound()?, p);
        let v = self.value(p);
        Some(v.mul(&eps.exp().sub(&Real::one(p))))
    }

    /// Whether two truncations agree factor by factor, which implies equal products.
    pub fn same_factors(&self, other: &EulerProduct) -> bool {
        self.factors == other.factors
    }
}

/// Euler product of zeta_{F_q(t)}(s)^{-k}: local factor (1 - x^s)^k.
pub fn zeta_inverse_product(q: u64, s: u32, k: u32, deg_cut: u32) -> Result<EulerProduct> {
    let mut base = vec![BigRational::zero(); s as usize + 1];
    base[0] = rat(1);
    base[s as usize] = rat(-1);
    let base = RatPoly(base);
    let local = (1..k).fold(base.clone(), |acc, _| acc.mul(&base));
    EulerProduct::new(q, &local, deg_cut)
}

/// The Euler product of (1 - q_v^{-1})^2 omega_v for Hilb^m P^2 over F_q(t).
pub fn euler_product_density(q: u64, model: &LocalDensityModel, deg_cut: u32) -> Result<EulerProduct> {
    EulerProduct::new(q, &model.local_factor(), deg_cut)
}

/// alpha* of Hilb^m P^2 for the slope mu: mu/9.
pub fn alpha_star_hilbm(mu: &BigRational) -> Result<BigRational> {
    if !mu.is_positive() {
        return Err(Error::arg("mu must be positive"));
    }
    Ok(mu / rat(9))
}

/// Built-in slope table: mu = 1 for m = 2 and mu = r for m = (r+2 choose 2).
pub fn mu_for(m: u32) -> Option<BigRational> {
    if m == 2 {
        return Some(rat(1));
    }
    (1..=m).find(|r| (r + 2) * (r + 1) / 2 == m).map(rat)
}

/// A Peyre-type constant: `exact_prefactor / (ln q)^ln_power * euler`.
#[derive(Clone, Debug)]
pub struct PeyreValue {
    pub value: Real,
    pub residual_bound: Real,
    pub exact_prefactor: BigRational,
    pub ln_power: u32,
    /// Second reading of the constant where two are in use.
    pub derived_value: Option<Real>,
}

fn ln_q_pow(q: u64, k: u32, p: usize) -> Real {
    Real::ln_int(q, p).powi(k as usize)
}

/// c(P^n) = S_K(n+1,1)/((n+1) ln q).
pub fn peyre_constant_pn(n: u32, params: &GlobalFieldParams, digits: usize) -> Result<PeyreValue> {
    params.check()?;
    let p = bits_for_digits(digits);
    let pre = params.schanuel(n) / rat(n + 1);
    Ok(PeyreValue {
        value: Real::from_rational(&pre, p).div(&ln_q_pow(params.q, 1, p)),
        residual_bound: Real::zero(p),
        exact_prefactor: pre,
        ln_power: 1,
        derived_value: None,
    })
}

/// c(Hilb^2 P^2) = S_K(3,1)^2/(9 ln^2 q).
pub fn peyre_constant_hilb2(params: &GlobalFieldParams, digits: usize) -> Result<PeyreValue> {
    params.check()?;
    let p = bits_for_digits(digits);
    let s = params.schanuel(2);
    let pre = &s * &s / rat(9);
    Ok(PeyreValue {
        value: Real::from_rational(&pre, p).div(&ln_q_pow(params.q, 2, p)),
        residual_bound: Real::zero(p),
        exact_prefactor: pre,
        ln_power: 2,
        derived_value: None,
    })
}

fn require_rational(params: &GlobalFieldParams) -> Result<()> {
    if !params.is_rational() {
        return Err(Error::Unsupported("Euler products are only enumerated over F_q(t) (genus 0)".into()));
    }
    Ok(())
}

/// mu J^2 q^{2(m+1)(1-g)} / (9 (q-1)^2).
pub fn hilbm_prefactor(m: u32, mu: &BigRational, params: &GlobalFieldParams) -> BigRational {
    let j2 = rat(&params.j * &params.j);
    let qm1 = rat(params.q - 1);
    mu * j2 * q_pow(params.q, 2 * (m as i64 + 1) * (1 - params.g as i64)) / (rat(9) * &qm1 * &qm1)
}

/// c(Hilb^m P^2): the prefactor over ln^2 q times the truncated Euler product.
pub fn peyre_constant_hilbm(
    m: u32,
    mu: &BigRational,
    params: &GlobalFieldParams,
    deg_cut: u32,
    digits: usize,
) -> Result<PeyreValue> {
    params.check()?;
    require_rational(params)?;
    if m < 2 {
        return Err(Error::arg("m must be at least 2"));
    }
    alpha_star_hilbm(mu)?;
    let p = bits_for_digits(digits);
    let model = LocalDensityModel::hilb(m as usize);
    let euler = euler_product_density(params.q, &model, deg_cut)?;
    let pre = hilbm_prefactor(m, mu, params);
    let scale = Real::from_rational(&pre, p).div(&ln_q_pow(params.q, 2, p));
    let residual = euler.residual_bound(p).ok_or_else(|| Error::Unsupported("no tail bound at this deg_cut".into()))?;
    Ok(PeyreValue {
        value: scale.mul(&euler.value(p)),
        residual_bound: scale.mul(&residual),
        exact_prefactor: pre,
        ln_power: 2,
        derived_value: None,
    })
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// The limiting ratio constant c_m of prime to all effective 0-cycles.
///
/// m = 2 gives 2/3. For m >= 3, `value` is
/// mu 3^{m-2} zeta(3)^2 m!(m-1)!/S^{m-2} times the Euler product and
/// `derived_value` is the ratio of the irreducible main term
/// c(Hilb^m) ln^2 q to the total main term S^m/(3^m m!(m-1)!), which carries an
/// extra factor q^{2m-4}.
pub fn cm_constant(m: u32, mu: &BigRational, params: &GlobalFieldParams, deg_cut: u32, digits: usize) -> Result<PeyreValue> {
    params.check()?;
    require_rational(params)?;
    let p = bits_for_digits(digits);
    if m < 2 {
        return Err(Error::arg("m must be at least 2"));
    }
    if m == 2 {
        let c = BigRational::new(2.into(), 3.into());
        return Ok(PeyreValue {
            value: Real::from_rational(&c, p),
            residual_bound: Real::zero(p),
            exact_prefactor: c.clone(),
            ln_power: 0,
            derived_value: Some(Real::from_rational(&c, p)),
        });
    }
    alpha_star_hilbm(mu)?;
    let q = params.q;
    let s = schanuel_constant(2, q);
    let z3 = zeta_fqt(3, q);
    let pre = mu * rat(BigInt::from(3).pow(m - 2)) * &z3 * &z3 * rat(factorial(m) * factorial(m - 1)) / s.pow(m as i32 - 2);
    let model = LocalDensityModel::hilb(m as usize);
    let euler = euler_product_density(q, &model, deg_cut)?;
    let residual = euler.residual_bound(p).ok_or_else(|| Error::Unsupported("no tail bound at this deg_cut".into()))?;
    let ev = euler.value(p);
    let value = Real::from_rational(&pre, p).mul(&ev);
    // c(Hilb^m) ln^2 q * 3^m m!(m-1)!/S^m
    let derived_pre =
        hilbm_prefactor(m, mu, params) * rat(BigInt::from(3).pow(m) * factorial(m) * factorial(m - 1)) / s.pow(m as i32);
    Ok(PeyreValue {
        residual_bound: Real::from_rational(&pre, p).mul(&residual),
        value,
        exact_prefactor: pre,
        ln_power: 0,
        derived_value: Some(Real::from_rational(&derived_pre, p).mul(&ev)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_fqt(3, 3), r(243, 208));
        assert_eq!(zeta_fqt(3, 2), r(32, 21));
        let big = zeta_fqt(60, 3) - r(1, 1);
        assert!(big < r(1, 1_000_000_000));
        let p = bits_for_digits(40);
        let z = zeta_fqt_real(&Real::from_i64(3, p), 3);
        assert_eq!(z.to_fixed(30), Real::from_rational(&r(243, 208), p).to_fixed(30));
    }

    #[test]
    fn alpha_and_mu() {
        assert_eq!(alpha_star_hilbm(&mu_for(2).unwrap()).unwrap(), r(1, 9));
        assert_eq!(alpha_star_hilbm(&mu_for(6).unwrap()).unwrap(), r(2, 9));
        assert_eq!(alpha_star_hilbm(&mu_for(10).unwrap()).unwrap(), r(1, 3));
        assert_eq!(mu_for(3), Some(r(1, 1)));
        assert_eq!(mu_for(4), None);
    }

    #[test]
    fn densities() {
        for m in 2..=8 {
            assert!(LocalDensityModel::hilb(m).has_expected_expansion());
        }
        // (1-x)^2 (1+x+x^2)^2 = (1-x^3)^2
        let f = LocalDensityModel::hilb(2).local_factor();
        assert_eq!(f.0, vec![r(1, 1), r(0, 1), r(0, 1), r(-2, 1), r(0, 1), r(0, 1), r(1, 1)]);
    }

    #[test]
    fn constants() {
        let params = GlobalFieldParams::rational(3);
        let c = peyre_constant_pn(2, &params, 50).unwrap();
        assert_eq!(c.value.to_fixed(5), "3.50611");
        let c = peyre_constant_pn(1, &GlobalFieldParams::rational(2), 50).unwrap();
        assert_eq!(c.value.to_fixed(5), "1.08202");
        let c = peyre_constant_hilb2(&params, 50).unwrap();
        assert_eq!(c.value.to_fixed(4), "12.2928");
        assert_eq!(c.exact_prefactor * rat(9), r(104 * 104, 81));
        assert_eq!(cm_constant(2, &r(1, 1), &params, 4, 50).unwrap().exact_prefactor, r(2, 3));
    }

    #[test]
    fn lpoly_consistency() {
        let bad = GlobalFieldParams { q: 3, g: 1, j: BigInt::from(5), lpoly: vec![1.into(), 1.into(), 3.into()] };
        assert!(bad.check().is_ok());
        let bad = GlobalFieldParams { j: BigInt::from(4), ..bad };
        assert!(bad.check().is_err());
    }

    fn rat(n: i64) -> BigRational {
        super::rat(n)
    }
}
