use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fq::{FieldSpec, Poly};

/// Largest number of monic polynomials of one degree the sieve will scan.
pub const MAX_SIEVE_SIZE: u64 = 10_000_000;

fn mobius(mut n: u64) -> i32 {
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

/// Number of monic irreducibles of degree `d` over F_q: (1/d) sum_{e|d} mu(e) q^{d/e}.
pub fn count_irreducibles(q: u64, d: u32) -> BigUint {
    assert!(d >= 1);
    let mut total = BigInt::zero();
    for e in 1..=d {
        if d % e == 0 {
            let term = BigInt::from(q).pow(d / e);
            total += term * mobius(e as u64);
        }
    }
    (total / BigInt::from(d)).to_biguint().expect("positive count")
}

fn lex_index(p: &Poly, q: u64, d: usize) -> usize {
    (0..d).fold(0u64, |acc, i| acc * q + p.coeff(i) as u64) as usize
}

/// Monic irreducibles of degree `d` over F_q in lexicographic order of their
/// coefficient sequences (constant term first). Results are cached per field.
pub fn irreducibles_of_degree(d: usize, f: &FieldSpec) -> Result<Arc<Vec<Poly>>> {
    if d == 0 {
        return Err(Error::arg("degree must be positive"));
    }
    if let Some(hit) = f.irreducible_cache().lock().unwrap().get(&d) {
        return Ok(hit.clone());
    }
    let q = f.q() as u64;
    let size = q.checked_pow(d as u32).filter(|&s| s <= MAX_SIEVE_SIZE);
    let size = size.ok_or_else(|| Error::guard("q^d in irreducible sieve", format!("{q}^{d}"), MAX_SIEVE_SIZE))?;
    let list: Vec<Poly> = if d == 1 {
        (0..q).map(|c| Poly::from_coeffs(vec![c as u32, 1])).collect()
    } else {
        // Mark every product a*b with a monic irreducible of degree i <= d/2.
        let mut reducible = vec![false; size as usize];
        for i in 1..=d / 2 {
            let small = irreducibles_of_degree(i, f)?;
            let rest = q.pow((d - i) as u32);
            for a in small.iter() {
                for idx in 0..rest {
                    let b = Poly::monic_from_lex_index(idx, q as u32, d - i);
                    reducible[lex_index(&a.mul(&b, f), q, d)] = true;
                }
            }
        }
        reducible
            .iter()
            .enumerate()
            .filter(|(_, &r)| !r)
            .map(|(idx, _)| Poly::monic_from_lex_index(idx as u64, q as u32, d))
            .collect()
    };
    let list = Arc::new(list);
    f.irreducible_cache().lock().unwrap().insert(d, list.clone());
    Ok(list)
}

/// t^(q^e) mod m, by repeated q-th powering.
fn frobenius_powers(m: &Poly, count: usize, f: &FieldSpec) -> Vec<Poly> {
    let q = BigUint::from(f.q());
    let mut out = Vec::with_capacity(count);
    let mut h = Poly::t().rem(m, f).unwrap();
    for _ in 0..count {
        h = h.pow_mod(&q, m, f);
        out.push(h.clone());
    }
    out
}

/// Whether a polynomial of positive degree is irreducible (Rabin's test).
pub fn is_irreducible(a: &Poly, f: &FieldSpec) -> bool {
    let Some(n) = a.degree() else { return false };
    if n == 0 {
        return false;
    }
    let m = a.monic(f);
    let frob = frobenius_powers(&m, n, f);
    if frob[n - 1] != Poly::t().rem(&m, f).unwrap() {
        return false;
    }
    (1..n).filter(|d| n % d == 0 && is_prime((n / d) as u64)).all(|d| {
        let h = frob[d - 1].sub(&Poly::t(), f);
        h.gcd(&m, f).is_one()
    })
}

fn is_prime(n: u64) -> bool {
    crate::fq::is_prime(n)
}

/// Splits a squarefree monic product of irreducibles of degree `d`.
fn equal_degree_split(g: &Poly, d: usize, f: &FieldSpec, out: &mut Vec<Poly>) {
    let n = g.degree().unwrap();
    if n == d {
        out.push(g.clone());
        return;
    }
    if !f.is_odd() || (f.q() as u64).pow(d as u32) <= 4096 {
        if let Ok(list) = irreducibles_of_degree(d, f) {
            let mut rest = g.clone();
            for p in list.iter() {
                if let Some(quo) = rest.exact_div(p, f) {
                    out.push(p.clone());
                    rest = quo;
                    if rest.is_one() {
                        return;
                    }
                }
            }
            return;
        }
    }
    // Cantor-Zassenhaus with a deterministic sequence of trial polynomials.
    let e = (BigUint::from(f.q()).pow(d as u32) - 1u32) / 2u32;
    let q = f.q() as u64;
    let mut seed: u64 = 1;
    loop {
        let trial = Poly::from_lex_index(seed, q as u32, n).add(&Poly::monomial(1, n.min(2 * d - 1)), f);
        seed += 1;
        let h = trial.pow_mod(&e, g, f).sub(&Poly::one(), f);
        let s = h.gcd(g, f);
        if let Some(sd) = s.degree() {
            if sd > 0 && sd < n {
                let other = g.exact_div(&s, f).unwrap();
                equal_degree_split(&s, d, f, out);
                equal_degree_split(&other, d, f, out);
                return;
            }
        }
    }
}

/// Factorisation of a nonzero polynomial: its leading coefficient and the
/// monic irreducible factors with multiplicities, sorted by the polynomial order.
pub fn factor(a: &Poly, f: &FieldSpec) -> Result<(u32, Vec<(Poly, u32)>)> {
    if a.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let (lc, mut rest) = a.monic_parts(f);
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    // Distinct-degree factorisation over the whole polynomial, peeling off
    // multiplicities as each irreducible is found.
    let mut d = 1;
    while let Some(n) = rest.degree() {
        if n == 0 {
            break;
        }
        if 2 * d > n {
            factors.push((rest.clone(), 1));
            break;
        }
        let h = frobenius_powers(&rest, d, f).pop().unwrap();
        let g = h.sub(&Poly::t(), f).gcd(&rest, f);
        if !g.is_one() {
            // g is the product of the distinct degree-d irreducible factors.
            let mut found = Vec::new();
            equal_degree_split(&g, d, f, &mut found);
            for p in found {
                let mut mult = 0;
                while let Some(quo) = rest.exact_div(&p, f) {
                    rest = quo;
                    mult += 1;
                }
                factors.push((p, mult));
            }
        }
        d += 1;
    }
    factors.sort();
    Ok((lc, factors))
}

/// Monic squarefree kernel: the product of the distinct monic irreducible factors.
pub fn squarefree_part(a: &Poly, f: &FieldSpec) -> Result<Poly> {
    let (_, factors) = factor(a, f)?;
    Ok(factors.iter().fold(Poly::one(), |acc, (p, _)| acc.mul(p, f)))
}

#[cfg(test)]
fn total_degree_identity(q: u64, m: u32) -> bool {
    let sum: BigUint = (1..=m)
        .filter(|d| m % d == 0)
        .map(|d| count_irreducibles(q, d) * d)
        .fold(BigUint::zero(), |a, b| a + b);
    sum == BigUint::from(q).pow(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[u32]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }

    #[test]
    fn small_lists() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(*irreducibles_of_degree(1, &f2).unwrap(), vec![p(&[0, 1]), p(&[1, 1])]);
        assert_eq!(*irreducibles_of_degree(2, &f2).unwrap(), vec![p(&[1, 1, 1])]);
        let f3 = FieldSpec::new(3).unwrap();
        assert_eq!(irreducibles_of_degree(2, &f3).unwrap().len(), 3);
    }

    #[test]
    fn sieve_matches_mobius_count() {
        for q in [2u64, 3, 5] {
            let f = FieldSpec::new(q).unwrap();
            for d in 1..=8usize {
                if q.pow(d as u32) > 400_000 {
                    continue;
                }
                let list = irreducibles_of_degree(d, &f).unwrap();
                assert_eq!(BigUint::from(list.len()), count_irreducibles(q, d as u32), "q={q} d={d}");
                assert!(list.windows(2).all(|w| w[0] < w[1]));
                assert!(list.iter().all(|p| is_irreducible(p, &f)));
            }
            for m in 1..=12 {
                assert!(total_degree_identity(q, m));
            }
        }
    }

    #[test]
    fn sieve_guard() {
        let f = FieldSpec::new(7).unwrap();
        assert!(matches!(irreducibles_of_degree(9, &f), Err(Error::Guard { .. })));
    }

    #[test]
    fn factor_round_trip() {
        for q in [2u64, 3, 4, 5, 9] {
            let f = FieldSpec::new(q).unwrap();
            let a = p(&[1, 1]).pow(3, &f).mul(&p(&[0, 1]), &f);
            let b = irreducibles_of_degree(3, &f).unwrap()[1].clone();
            let c = irreducibles_of_degree(2, &f).unwrap()[0].pow(2, &f);
            let poly = a.mul(&b, &f).mul(&c, &f);
            let (lc, fs) = factor(&poly, &f).unwrap();
            let back = fs.iter().fold(Poly::constant(lc), |acc, (p, e)| acc.mul(&p.pow(*e, &f), &f));
            assert_eq!(back, poly);
            assert!(fs.iter().all(|(p, _)| is_irreducible(p, &f)));
            assert_eq!(fs.iter().map(|(_, e)| e).sum::<u32>(), 1 + 3 + 1 + 2);
        }
    }
}
