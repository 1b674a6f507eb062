//! Points of P^n over F_q(t): canonical forms, heights and exact-height counts.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fq::{count_points_pn, irreducibles_of_degree, FieldSpec, Poly};

/// Largest number of coordinate tuples an exact-height scan may visit.
pub const MAX_SCAN: u64 = 1_000_000_000;

/// A point of P^n(F_q(t)) with coprime polynomial coordinates whose first
/// nonzero coordinate is monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<Poly>,
}

/// Coordinates separated by `/`, each as its coefficient list.
impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("/"))
    }
}

impl ProjPoint {
    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Exponent M of the height q^M.
    pub fn height_exponent(&self) -> u32 {
        self.coords.iter().map(|c| c.deg()).max().unwrap_or(0).max(0) as u32
    }

    pub fn height(&self, f: &FieldSpec) -> BigUint {
        BigUint::from(f.q()).pow(self.height_exponent())
    }

    /// Parses the `/`-separated form produced by `Display`.
    pub fn parse(s: &str, f: &FieldSpec) -> Result<Self> {
        let coords = s
            .split('/')
            .map(|part| {
                part.split(',')
                    .map(|c| {
                        let v: u32 = c.trim().parse().map_err(|_| Error::arg(format!("bad coefficient {c:?}")))?;
                        if v >= f.q() {
                            return Err(Error::arg(format!("coefficient {v} outside F_{}", f.q())));
                        }
                        Ok(v)
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Poly::from_coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        canonicalize(&coords, f)
    }
}

/// Gcd of a list of polynomials, stopping early once it reaches 1.
pub(crate) fn content(coords: &[Poly], f: &FieldSpec) -> Poly {
    let mut g = Poly::zero();
    for c in coords {
        g = g.gcd(c, f);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Scales by the inverse gcd and makes the first nonzero coordinate monic.
pub fn canonicalize(coords: &[Poly], f: &FieldSpec) -> Result<ProjPoint> {
    if coords.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroPoint);
    }
    let g = content(coords, f);
    let first = coords.iter().find(|c| !c.is_zero()).unwrap();
    let lc_inv = f.inv(first.leading()).unwrap();
    let coords = coords
        .iter()
        .map(|c| c.exact_div(&g, f).unwrap().scale(lc_inv, f))
        .collect();
    Ok(ProjPoint { coords })
}

/// Height exponent from the product over places of max_i |x_i|_v, for any
/// nonzero polynomial coordinates (not necessarily coprime).
pub fn height_by_places(coords: &[Poly], f: &FieldSpec) -> Result<i64> {
    if coords.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroPoint);
    }
    let max_deg = coords.iter().map(|c| c.deg()).max().unwrap();
    let mut exponent = max_deg;
    for d in 1..=max_deg.max(0) as usize {
        for p in irreducibles_of_degree(d, f)?.iter() {
            let min_v = coords.iter().filter_map(|c| c.valuation(p, f)).min().unwrap();
            exponent -= d as i64 * min_v as i64;
        }
    }
    Ok(exponent)
}

/// All polynomials of degree < `n` (`n = 0` gives just zero), in lexicographic order.
fn polys_below(n: usize, q: u32) -> Vec<Poly> {
    (0..(q as u64).pow(n as u32)).map(|i| Poly::from_lex_index(i, q, n)).collect()
}

struct Scan {
    n: usize,
    lower: Vec<Poly>,
    full: Vec<Poly>,
    top: Vec<Poly>,
}

fn scan_tables(n: usize, f: &FieldSpec, m: u32) -> Result<Scan> {
    let q = f.q() as u64;
    let size = (q as f64).powi(((n + 1) * (m as usize + 1)) as i32);
    if size > MAX_SCAN as f64 {
        return Err(Error::guard("q^((n+1)(M+1)) tuples", format!("{q}^{}", (n + 1) * (m as usize + 1)), MAX_SCAN));
    }
    let m = m as usize;
    let lower = polys_below(m, f.q());
    let full = polys_below(m + 1, f.q());
    let top = full.iter().filter(|p| p.deg() == m as i64).cloned().collect();
    Ok(Scan { n, lower, full, top })
}

impl Scan {
    /// Partitions: (pivot index, pivot polynomial).
    fn partitions(&self) -> Vec<(usize, usize)> {
        (0..=self.n).flat_map(|j| (0..self.top.len()).map(move |k| (j, k))).collect()
    }

    /// Visits every canonical point of the partition in lexicographic order.
    fn visit(&self, j: usize, k: usize, f: &FieldSpec, visit: &mut dyn FnMut(&[Poly])) {
        let pivot = &self.top[k];
        let mut tuple: Vec<Poly> = vec![Poly::zero(); self.n + 1];
        tuple[j] = pivot.clone();
        let prefix_len = j;
        let suffix_len = self.n - j;
        let prefix_count = (self.lower.len() as u64).pow(prefix_len as u32);
        let suffix_count = (self.full.len() as u64).pow(suffix_len as u32);
        for pi in 0..prefix_count {
            let mut rest = pi;
            for slot in (0..prefix_len).rev() {
                tuple[slot] = self.lower[(rest % self.lower.len() as u64) as usize].clone();
                rest /= self.lower.len() as u64;
            }
            let lead = tuple[..=j].iter().find(|c| !c.is_zero()).unwrap();
            if !lead.is_monic() {
                continue;
            }
            let g = content(&tuple[..=j], f);
            for si in 0..suffix_count {
                let mut rest = si;
                for slot in (j + 1..=self.n).rev() {
                    tuple[slot] = self.full[(rest % self.full.len() as u64) as usize].clone();
                    rest /= self.full.len() as u64;
                }
                let coprime = g.is_one() || content(&[&[g.clone()], &tuple[j + 1..]].concat(), f).is_one();
                if coprime {
                    visit(&tuple);
                }
            }
        }
    }
}

/// Calls `visit` on each canonical point of exact height q^M, partition by
/// partition, each partition in lexicographic order.
pub fn for_each_exact_height(n: usize, f: &FieldSpec, m: u32, mut visit: impl FnMut(&ProjPoint)) -> Result<()> {
    let scan = scan_tables(n, f, m)?;
    for (j, k) in scan.partitions() {
        scan.visit(j, k, f, &mut |coords| {
            visit(&ProjPoint { coords: coords.to_vec() });
        });
    }
    Ok(())
}

pub fn enumerate_exact_height(n: usize, f: &FieldSpec, m: u32) -> Result<Vec<ProjPoint>> {
    let mut out = Vec::new();
    for_each_exact_height(n, f, m, |p| out.push(p.clone()))?;
    Ok(out)
}

/// Number of points of exact height q^M, counted in parallel over partitions.
pub fn count_exact_height(n: usize, f: &FieldSpec, m: u32) -> Result<BigUint> {
    let scan = scan_tables(n, f, m)?;
    let total: u64 = scan
        .partitions()
        .into_par_iter()
        .map(|(j, k)| {
            let mut c = 0u64;
            scan.visit(j, k, f, &mut |_| c += 1);
            c
        })
        .sum();
    Ok(BigUint::from(total))
}

fn q_pow(q: u64, e: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(q)).pow(e as i32)
}

/// S(n+1, 1) for K = F_q(t): q^{n+1}(1 - q^{-n})(1 - q^{-n-1})/(q - 1).
pub fn schanuel_constant(n: u32, q: u64) -> BigRational {
    let one = BigRational::one();
    q_pow(q, n as i64 + 1) * (&one - q_pow(q, -(n as i64))) * (&one - q_pow(q, -(n as i64) - 1))
        / BigRational::from_integer(BigInt::from(q - 1))
}

/// S_K(n+1, 1) = q^{(1-g)(n+1)} J / ((q - 1) zeta_K(n+1)) for a function field
/// with constant field F_q, genus g, class number J and L-polynomial `lpoly`.
pub fn schanuel_constant_general(n: u32, q: u64, g: u32, j: &BigInt, lpoly: &[BigInt]) -> BigRational {
    let zeta = crate::peyre::zeta_k(n as i64 + 1, q, lpoly);
    q_pow(q, (1 - g as i64) * (n as i64 + 1)) * BigRational::from_integer(j.clone())
        / (BigRational::from_integer(BigInt::from(q - 1)) * zeta)
}

/// Predicted number of points of exact height q^N: |P^n(F_q)| for N = 0 and
/// S(n+1,1) q^{(n+1)N} otherwise.
pub fn exact_height_formula(n: u32, q: u64, big_n: u32) -> BigRational {
    if big_n == 0 {
        let f_points = (BigInt::from(q).pow(n + 1) - 1) / BigInt::from(q - 1);
        return BigRational::from_integer(f_points);
    }
    schanuel_constant(n, q) * q_pow(q, (n as i64 + 1) * big_n as i64)
}

/// A(N) by enumeration when the scan is within the guard, else by formula.
pub fn exact_height_count(n: u32, f: &FieldSpec, big_n: u32) -> BigRational {
    match count_exact_height(n as usize, f, big_n) {
        Ok(c) => BigRational::from_integer(c.into()),
        Err(_) => exact_height_formula(n, f.q() as u64, big_n),
    }
}

/// Convolution of exact-height counts and its closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCount {
    pub value: BigRational,
    pub closed_form: BigRational,
}

impl PairCount {
    pub fn matches(&self) -> bool {
        self.value == self.closed_form
    }
}

/// Half the number of ordered pairs (x, y) of points of P^2 with
/// H(x)H(y) = q^M, compared with its closed form.
pub fn count_reducible_pairs(f: &FieldSpec, m: u32) -> Result<PairCount> {
    if m == 0 {
        return Err(Error::arg("M must be at least 1"));
    }
    let a: Vec<BigRational> = (0..=m).map(|k| exact_height_count(2, f, k)).collect();
    let sum: BigRational = (0..=m as usize).map(|k| &a[k] * &a[m as usize - k]).sum();
    Ok(PairCount { value: sum / BigRational::from_integer(2.into()), closed_form: reducible_pairs_closed_form(f.q() as u64, m) })
}

/// (S^2/2) q^{3M} M + (q^2+1)/(2(q^2-1)) S^2 q^{3M}.
pub fn reducible_pairs_closed_form(q: u64, m: u32) -> BigRational {
    let s = schanuel_constant(2, q);
    let s2q = &s * &s * q_pow(q, 3 * m as i64);
    let qq = BigRational::from_integer(BigInt::from(q * q));
    let two = BigRational::from_integer(2.into());
    let one = BigRational::one();
    &s2q * BigRational::from_integer(m.into()) / &two + (&qq + &one) / (&two * (&qq - &one)) * s2q
}

/// Half the convolution of P^1 and P^2 exact-height counts, with the closed
/// form built from S(2,1) and S(3,1).
pub fn count_pairs_closed_subset(f: &FieldSpec, m: u32) -> Result<PairCount> {
    if m == 0 {
        return Err(Error::arg("M must be at least 1"));
    }
    let sum: BigRational = (0..=m).map(|k| exact_height_count(1, f, k) * exact_height_count(2, f, m - k)).sum();
    Ok(PairCount { value: sum / BigRational::from_integer(2.into()), closed_form: closed_subset_closed_form(f.q() as u64, m) })
}

pub fn closed_subset_closed_form(q: u64, m: u32) -> BigRational {
    let s2 = schanuel_constant(1, q);
    let s3 = schanuel_constant(2, q);
    let qb = BigRational::from_integer(BigInt::from(q));
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let q3m = q_pow(q, 3 * m as i64);
    let geometric: BigRational = (1..m as i64).map(|k| q_pow(q, -k)).sum();
    (&qb * &qb - &one) / (&two * (&qb - &one)) * &s3 * &q3m
        + &s2 * &s3 * &q3m * geometric / &two
        + (qb.pow(3) - &one) / (&two * (&qb - &one)) * &s2 * q_pow(q, 2 * m as i64)
}

/// |P^n(F_q)| as an exact count.
pub fn count_pn_fq(n: u32, f: &FieldSpec) -> BigUint {
    count_points_pn(n, f, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[u32]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn canonical_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        let f3 = FieldSpec::new(3).unwrap();
        assert_eq!(canonicalize(&[p(&[0, 1]), p(&[0, 0, 1])], &f2).unwrap().to_string(), "1/0,1");
        assert_eq!(canonicalize(&[p(&[2]), p(&[0, 2])], &f3).unwrap().to_string(), "1/0,1");
        assert_eq!(canonicalize(&[p(&[]), p(&[1, 1]), p(&[2, 2])], &f3).unwrap().to_string(), "0/1/2");
        assert_eq!(canonicalize(&[Poly::zero(), Poly::zero()], &f3), Err(Error::ZeroPoint));
    }

    #[test]
    fn height_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        let pt = canonicalize(&[p(&[1]), p(&[]), p(&[])], &f2).unwrap();
        assert_eq!(pt.height(&f2), BigUint::from(1u32));
        let pt = canonicalize(&[p(&[1]), p(&[0, 1])], &f2).unwrap();
        assert_eq!(pt.height(&f2), BigUint::from(2u32));
        let pt = canonicalize(&[p(&[1, 0, 1]), p(&[0, 1]), p(&[1])], &f2).unwrap();
        assert_eq!(pt.height(&f2), BigUint::from(4u32));
        assert_eq!(ProjPoint::parse("0,1/1/1,0,1", &f2).unwrap().to_string(), "0,1/1/1,0,1");
    }

    #[test]
    fn exact_height_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(count_exact_height(2, &f2, 1).unwrap(), BigUint::from(42u32));
        assert_eq!(count_exact_height(2, &f2, 0).unwrap(), BigUint::from(7u32));
        assert_eq!(count_exact_height(1, &f2, 1).unwrap(), BigUint::from(6u32));
        let pts = enumerate_exact_height(1, &f2, 1).unwrap();
        assert_eq!(pts.len(), 6);
        assert!(pts.iter().all(|pt| pt.height_exponent() == 1 && canonicalize(pt.coords(), &f2).unwrap() == *pt));
        let f97 = FieldSpec::new(97).unwrap();
        assert!(matches!(count_exact_height(5, &f97, 9), Err(Error::Guard { .. })));
    }

    #[test]
    fn schanuel_examples() {
        assert_eq!(schanuel_constant(2, 2), rat(21, 4));
        assert_eq!(schanuel_constant(1, 2), rat(3, 2));
        assert_eq!(schanuel_constant(2, 3), rat(104, 9));
        let one = [BigInt::one()];
        for q in [2u64, 3, 5] {
            for n in 1..4 {
                assert_eq!(schanuel_constant_general(n, q, 0, &BigInt::one(), &one), schanuel_constant(n, q));
            }
        }
    }

    #[test]
    fn pair_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        let pc = count_reducible_pairs(&f2, 2).unwrap();
        assert_eq!(pc.value, rat(3234, 1));
        assert!(pc.matches());
        assert_eq!(count_reducible_pairs(&f2, 1).unwrap().value, rat(294, 1));
        let f3 = FieldSpec::new(3).unwrap();
        assert!(count_reducible_pairs(&f3, 1).unwrap().matches());
    }

    #[test]
    fn closed_subset_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(count_pairs_closed_subset(&f2, 1).unwrap().value, rat(84, 1));
        // A_1(2) = S(2,1) q^4 = 24 points of P^1 of height 4.
        assert_eq!(exact_height_count(1, &f2, 2), rat(24, 1));
        let pc = count_pairs_closed_subset(&f2, 2).unwrap();
        assert_eq!(pc.value, rat(714, 1));
        assert!(pc.matches());
    }
}
