//! Asymptotic sums, main-term bookkeeping and the ratio checks that compare
//! exact finite sums with their leading terms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratpoints::schanuel_constant;
use crate::real::{bits_for_digits, Real};

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn check_technical_params(t: u32, j: u32, m: u32) -> Result<()> {
    if !(t < m && 1 <= j && j < t) {
        return Err(Error::arg(format!("need t < m and 1 <= j < t, got t={t} j={j} m={m}")));
    }
    Ok(())
}

/// sum_{i=0}^{M} q^{(t-j)i/t} i^{m-t}, at `digits` decimal digits.
pub fn technical_sum(q: u64, t: u32, j: u32, m: u32, big_m: u64, digits: usize) -> Result<Real> {
    check_technical_params(t, j, m)?;
    let p = bits_for_digits(digits);
    let qr = Real::from_i64(q as i64, p);
    // q^{r/t} for r = 0..t-1.
    let roots: Vec<Real> = (0..t)
        .map(|r| qr.pow(&Real::from_rational(&BigRational::new(r.into(), t.into()), p)))
        .collect();
    let step = (t - j) as u64;
    let k = (m - t) as usize;
    let mut total = Real::zero(p);
    // Running integer power q^{floor(step i / t)}.
    let mut int_part = Real::one(p);
    let mut int_exp = 0u64;
    for i in 0..=big_m {
        let e = step * i;
        let whole = e / t as u64;
        while int_exp < whole {
            int_part = int_part.mul(&qr);
            int_exp += 1;
        }
        if i == 0 {
            // 0^{m-t} = 0 since m > t.
            continue;
        }
        let term = int_part.mul(&roots[(e % t as u64) as usize]).mul(&Real::from_i64(i as i64, p).powi(k));
        total = total.add(&term);
    }
    Ok(total)
}

/// Deviations of the technical sum from two candidate main terms, scaled by M:
/// dev(M) = |sum / main - 1| M.
#[derive(Clone, Debug)]
pub struct TechnicalCheck {
    pub big_m: u64,
    pub sum: Real,
    /// main term with constant 1/(lambda) + 1/2, lambda = ((t-j)/t) ln q.
    pub main: Real,
    pub dev: Real,
    /// main term with constant c/(c-1), c = q^{(t-j)/t}.
    pub main_geometric: Real,
    pub dev_geometric: Real,
}

pub fn technical_lemma_check(q: u64, t: u32, j: u32, m: u32, big_m: u64, digits: usize) -> Result<TechnicalCheck> {
    let sum = technical_sum(q, t, j, m, big_m, digits)?;
    let p = bits_for_digits(digits);
    let frac = Real::from_rational(&BigRational::new((t - j).into(), t.into()), p);
    let lambda = frac.mul(&Real::ln_int(q, p));
    let c = lambda.exp();
    let one = Real::one(p);
    let half = Real::from_rational(&BigRational::new(1.into(), 2.into()), p);
    let scale = lambda.mul(&Real::from_i64(big_m as i64, p)).exp().mul(&Real::from_i64(big_m as i64, p).powi((m - t) as usize));
    let main = one.div(&lambda).add(&half).mul(&scale);
    let main_geometric = c.div(&c.sub(&one)).mul(&scale);
    let mm = Real::from_i64(big_m as i64, p);
    let dev = sum.div(&main).sub(&one).abs().mul(&mm);
    let dev_geometric = sum.div(&main_geometric).sub(&one).abs().mul(&mm);
    Ok(TechnicalCheck { big_m, sum, main, dev, main_geometric, dev_geometric })
}

/// Largest ratio dev(2M)/dev(M) over consecutive entries of a doubling sequence.
pub fn worst_doubling_ratio(devs: &[Real]) -> Option<f64> {
    devs.windows(2)
        .map(|w| w[1].to_f64() / w[0].to_f64())
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))))
}

/// (1/k!) sum_{i=0}^{M} i (M-i)^k divided by M^{k+2}/(k+2)!, for odd k.
pub fn technical2_check(k: u32, big_m: u64) -> Result<BigRational> {
    if k % 2 == 0 {
        return Err(Error::arg("k must be odd"));
    }
    if big_m == 0 {
        return Err(Error::arg("M must be positive"));
    }
    let mm = BigInt::from(big_m);
    let sum: BigInt = (0..=big_m).map(|i| BigInt::from(i) * (&mm - i).pow(k)).sum();
    let lhs = BigRational::new(sum, factorial(k));
    let main = BigRational::new(mm.pow(k + 2), factorial(k + 2));
    Ok(lhs / main)
}

/// sum_{i=0}^{M} i^{rV-1} (M-i)^{rW-1} divided by M^{rV+rW-1}(rV-1)!(rW-1)!/(rV+rW-1)!,
/// with 0^0 = 1.
pub fn product_main_term_check(rv: u32, rw: u32, big_m: u64) -> Result<BigRational> {
    if !(rv >= rw && rw >= 1) {
        return Err(Error::arg("need rV >= rW >= 1"));
    }
    if big_m == 0 {
        return Err(Error::arg("M must be positive"));
    }
    let mm = BigInt::from(big_m);
    let sum: BigInt = (0..=big_m).map(|i| BigInt::from(i).pow(rv - 1) * (&mm - i).pow(rw - 1)).sum();
    let main = BigRational::new(mm.pow(rv + rw - 1) * factorial(rv - 1) * factorial(rw - 1), factorial(rv + rw - 1));
    Ok(rat(sum) / main)
}

/// First M0 in `ms` from which the ratios approach 1 monotonically.
pub fn monotone_from(ms: &[u64], ratios: &[BigRational]) -> Option<u64> {
    let one = BigRational::one();
    let dist: Vec<BigRational> = ratios.iter().map(|r| (r - &one).abs()).collect();
    (0..ms.len()).find(|&s| dist[s..].windows(2).all(|w| w[1] <= w[0])).map(|s| ms[s])
}

/// sum_{j=0}^{2k-1} C(2k-1, j)(-1)^j.
pub fn alternating_binomial_sum(k: u32) -> BigInt {
    (0..2 * k).map(|j| binomial(2 * k - 1, j) * if j % 2 == 0 { 1 } else { -1 }).sum()
}

/// A main term `coeff * (ln q)^ln_power * q^M * M^m_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainTerm {
    pub coeff: BigRational,
    pub ln_power: i32,
    pub m_power: u32,
}

impl MainTerm {
    pub fn zero(m_power: u32) -> Self {
        MainTerm { coeff: BigRational::zero(), ln_power: 0, m_power }
    }

    pub fn eval(&self, q: u64, big_m: u64, digits: usize) -> Real {
        let p = bits_for_digits(digits);
        let ln = Real::ln_int(q, p);
        let lnp = if self.ln_power >= 0 {
            ln.powi(self.ln_power as usize)
        } else {
            Real::one(p).div(&ln.powi((-self.ln_power) as usize))
        };
        let qm = Real::from_int(&BigInt::from(q).pow(big_m as u32), p);
        let mm = Real::from_i64(big_m as i64, p).powi(self.m_power as usize);
        Real::from_rational(&self.coeff, p).mul(&lnp).mul(&qm).mul(&mm)
    }

    /// Sum of two terms of the same shape.
    pub fn plus(&self, o: &MainTerm) -> Result<MainTerm> {
        if self.coeff.is_zero() {
            return Ok(o.clone());
        }
        if o.coeff.is_zero() {
            return Ok(self.clone());
        }
        if self.ln_power != o.ln_power || self.m_power != o.m_power {
            return Err(Error::arg("main terms of different shape"));
        }
        Ok(MainTerm { coeff: &self.coeff + &o.coeff, ..self.clone() })
    }
}

/// c (ln q)^r/(r-1)! q^M M^{r-1} for c = c_coeff/(ln q)^c_ln_power.
pub fn manin_main_term(c_coeff: &BigRational, c_ln_power: i32, r: u32) -> Result<MainTerm> {
    if r == 0 {
        return Err(Error::arg("rank must be positive"));
    }
    if !c_coeff.is_positive() {
        return Err(Error::arg("constant must be positive"));
    }
    Ok(MainTerm { coeff: c_coeff / rat(factorial(r - 1)), ln_power: r as i32 - c_ln_power, m_power: r - 1 })
}

/// Numerical c (ln q)^r/(r-1)! q^M M^{r-1}.
pub fn manin_main_term_real(c: &Real, r: u32, q: u64, big_m: u64) -> Result<Real> {
    if r == 0 {
        return Err(Error::arg("rank must be positive"));
    }
    let p = c.precision();
    let ln = Real::ln_int(q, p);
    let fact = Real::from_int(&factorial(r - 1), p);
    let qm = Real::from_int(&BigInt::from(q).pow(big_m as u32), p);
    let mm = Real::from_i64(big_m as i64, p).powi(r as usize - 1);
    Ok(c.mul(&ln.powi(r as usize)).div(&fact).mul(&qm).mul(&mm))
}

/// Rewrites a count C q^{3M} M^k, indexed by the exponent M of a height H,
/// in terms of the exponent M' = 3M of H^3 and averages it over all M'
/// (only one residue class mod 3 occurs): C/3^{k+1} q^{M'} M'^k.
pub fn reindex_cubed(term: &MainTerm) -> MainTerm {
    MainTerm { coeff: &term.coeff / rat(BigInt::from(3).pow(term.m_power + 1)), ..term.clone() }
}

/// Main terms for N_{Sym^m P^2} in the anticanonical height exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmMainTerms {
    pub m: u32,
    /// Points pi(v_1, ..., v_m) with distinct rational v_i.
    pub reducible: MainTerm,
    /// Full Galois orbits of degree-2 points (m = 2 only).
    pub irreducible: Option<MainTerm>,
    /// Points on the diagonal (lower order, m >= 3).
    pub diagonal: Option<MainTerm>,
    /// One conjugate pair plus m-2 rational points (lower order, m >= 3).
    pub one_pair: Option<MainTerm>,
    pub total: MainTerm,
}

/// Leading and subleading main terms for Sym^m P^2 over F_q(t).
pub fn symm_main_terms(q: u64, m: u32) -> Result<SymmMainTerms> {
    if m < 2 {
        return Err(Error::arg("m must be at least 2"));
    }
    let s = schanuel_constant(2, q);
    let three = BigInt::from(3);
    if m == 2 {
        // Ordered pairs: S^2 q^{3M} M; half of them are unordered reducible points.
        let irr = reindex_cubed(&MainTerm { coeff: &s * &s, ln_power: 0, m_power: 1 });
        let red = reindex_cubed(&MainTerm { coeff: &s * &s / rat(2), ln_power: 0, m_power: 1 });
        let total = irr.plus(&red)?;
        return Ok(SymmMainTerms { m, reducible: red, irreducible: Some(irr), diagonal: None, one_pair: None, total });
    }
    let sm = s.pow(m as i32);
    let red = MainTerm {
        coeff: &sm / rat(three.pow(m) * factorial(m) * factorial(m - 1)),
        ln_power: 0,
        m_power: m - 1,
    };
    let diag = MainTerm {
        coeff: rat(2) * s.pow(m as i32 - 1) / rat(three.pow(m - 1) * factorial(m) * factorial(m - 3)),
        ln_power: -2,
        m_power: m - 3,
    };
    let pair = MainTerm {
        coeff: rat(4) * &sm / rat(three.pow(m) * factorial(m) * factorial(m - 3)),
        ln_power: -2,
        m_power: m - 3,
    };
    Ok(SymmMainTerms { m, total: red.clone(), reducible: red, irreducible: None, diagonal: Some(diag), one_pair: Some(pair) })
}

/// (S/(3 ln q))^m (ln q)^m/(m-1)! / m!, the m-fold product of the P^2
/// constant taken through the Manin main term and divided by the orbit size.
pub fn product_constant(q: u64, m: u32) -> Result<MainTerm> {
    let s = schanuel_constant(2, q);
    let c = (&s / rat(3)).pow(m as i32);
    let term = manin_main_term(&c, m as i32, m)?;
    Ok(MainTerm { coeff: term.coeff / rat(factorial(m)), ..term })
}

/// The ordered convolution of m exact-height counts, (1/m!) S^m q^{3M} M^{m-1}/(m-1)!,
/// rewritten in the anticanonical exponent.
pub fn convolution_constant(q: u64, m: u32) -> MainTerm {
    let s = schanuel_constant(2, q);
    let raw = MainTerm { coeff: s.pow(m as i32) / rat(factorial(m) * factorial(m - 1)), ln_power: 0, m_power: m - 1 };
    reindex_cubed(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn technical_sum_examples() {
        let s = technical_sum(3, 2, 1, 3, 2, 50).unwrap();
        let expect = Real::from_i64(3, bits_for_digits(50)).sqrt().add(&Real::from_i64(6, bits_for_digits(50)));
        assert_eq!(s.to_fixed(45), expect.to_fixed(45));
        assert!(technical_sum(3, 2, 1, 3, 0, 50).unwrap().is_zero());
        let a = technical_sum(2, 2, 1, 4, 10, 50).unwrap();
        let b = technical_sum(2, 2, 1, 4, 10, 80).unwrap();
        assert_eq!(a.to_sig(40), b.to_sig(40));
        assert!(technical_sum(3, 3, 1, 3, 2, 50).is_err());
    }

    #[test]
    fn exact_ratio_examples() {
        assert_eq!(technical2_check(1, 10).unwrap(), r(99, 100));
        let k3 = technical2_check(3, 100).unwrap();
        assert!((k3 - r(1, 1)).abs() < r(2, 100));
        assert_eq!(product_main_term_check(1, 1, 7).unwrap(), r(8, 7));
        assert_eq!(product_main_term_check(2, 1, 7).unwrap(), r(8, 7));
        assert_eq!(product_main_term_check(2, 2, 100).unwrap(), r(9999, 10000));
        assert!(technical2_check(2, 10).is_err());
    }

    #[test]
    fn coefficient_bookkeeping() {
        let t = symm_main_terms(3, 2).unwrap();
        let s = schanuel_constant(2, 3);
        assert_eq!(t.irreducible.unwrap().coeff, &s * &s / rat(9));
        assert_eq!(t.reducible.coeff, &s * &s / rat(18));
        assert_eq!(t.total.coeff, &s * &s / rat(6));
        for m in 3..7 {
            let t = symm_main_terms(3, m).unwrap();
            assert_eq!(product_constant(3, m).unwrap(), t.total);
            assert_eq!(convolution_constant(3, m), t.total);
        }
        let t3 = symm_main_terms(3, 3).unwrap();
        assert_eq!(t3.total.coeff, s.pow(3) / rat(27 * 6 * 2));
        for k in 1..=8 {
            assert!(alternating_binomial_sum(k).is_zero());
        }
    }

    #[test]
    fn manin_terms() {
        let t = manin_main_term(&r(5, 1), 0, 1).unwrap();
        assert_eq!(t, MainTerm { coeff: r(5, 1), ln_power: 1, m_power: 0 });
        let p = bits_for_digits(30);
        let v = manin_main_term_real(&Real::one(p), 1, 3, 2).unwrap();
        assert_eq!(v.to_fixed(20), Real::ln_int(3, p).mul(&Real::from_i64(9, p)).to_fixed(20));
    }
}
