use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::fq::Poly;

/// An element of F_q, encoded as the integer sum c_i p^i of its coordinates in
/// the polynomial basis 1, a, a^2, ... over F_p.
pub type Elem = u32;

/// Largest field order for which element tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

/// The finite field F_q with q = p^k.
///
/// F_q is realised as F_p[a]/(f) where f is the lexicographically least monic
/// irreducible polynomial of degree k over F_p (coefficient sequences compared
/// from the constant term upwards). Cloning is cheap; the field shares its
/// tables and the cache of monic irreducibles over F_q.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    log: Vec<u32>,
    exp: Vec<u32>,
    irreducibles: Mutex<HashMap<usize, Arc<Vec<Poly>>>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus
    }
}

impl Eq for FieldSpec {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as p^k with p prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p, k))
}

// Dense polynomials over F_p used only while building the field tables.
fn fp_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for i in (k..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        for (j, &m) in modulus.iter().enumerate() {
            let idx = i - k + j;
            prod[idx] = (prod[idx] + (p as u64 - c) * m as u64) % p as u64;
        }
    }
    prod.truncate(k);
    prod.resize(k, 0);
    prod.into_iter().map(|c| c as u32).collect()
}

fn fp_has_factor_of_degree_at_most(f: &[u32], p: u32, max_deg: usize) -> bool {
    // Trial division of f (monic) by every monic polynomial of degree 1..=max_deg.
    for d in 1..=max_deg {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                g.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            g.push(1);
            if fp_rem(f, &g, p).iter().all(|&c| c == 0) {
                return true;
            }
        }
    }
    false
}

fn fp_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    // g monic
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    if r.len() <= dg {
        return f.to_vec();
    }
    for i in (dg..r.len()).rev() {
        let c = r[i] % p as u64;
        if c == 0 {
            continue;
        }
        for (j, &m) in g.iter().enumerate() {
            let idx = i - dg + j;
            r[idx] = (r[idx] + (p as u64 - c) * m as u64) % p as u64;
        }
    }
    r.truncate(dg);
    r.into_iter().map(|c| c as u32).collect()
}

impl FieldSpec {
    /// Builds F_q for a prime power `q`, with the canonical defining polynomial.
    pub fn new(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        if q > MAX_FIELD_ORDER {
            return Err(Error::guard("field order q", q, MAX_FIELD_ORDER));
        }
        let p = p as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            // Lexicographically least monic irreducible of degree k over F_p.
            let count = (p as u64).pow(k);
            (0..count)
                .map(|idx| {
                    let mut f = Vec::with_capacity(k as usize + 1);
                    let mut rest = idx;
                    let mut digits = vec![0u32; k as usize];
                    for slot in digits.iter_mut().rev() {
                        *slot = (rest % p as u64) as u32;
                        rest /= p as u64;
                    }
                    f.extend(digits);
                    f.push(1);
                    f
                })
                .find(|f| !fp_has_factor_of_degree_at_most(f, p, k as usize / 2))
                .expect("an irreducible polynomial of every degree exists")
        };
        Self::with_modulus(p, modulus)
    }

    /// Builds F_{p^k} from an explicit monic defining polynomial over F_p
    /// (coefficients from the constant term up). Irreducibility is checked.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let k = modulus.len().saturating_sub(1) as u32;
        if k == 0 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus must be monic over F_p of degree >= 1".into()));
        }
        if k > 1 && fp_has_factor_of_degree_at_most(&modulus, p, k as usize / 2) {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        let q64 = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if q64 > MAX_FIELD_ORDER {
            return Err(Error::guard("field order q", q64, MAX_FIELD_ORDER));
        }
        let q = q64 as u32;

        let to_digits = |x: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(k as usize);
            let mut r = x;
            for _ in 0..k {
                v.push(r % p);
                r /= p;
            }
            v
        };
        let from_digits = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let slow_mul = |a: u32, b: u32| -> u32 {
            if k == 1 {
                ((a as u64 * b as u64) % p as u64) as u32
            } else {
                from_digits(&fp_mulmod(&to_digits(a), &to_digits(b), &modulus, p))
            }
        };

        // Find a generator of the multiplicative group.
        let order = q - 1;
        let mut prime_factors = Vec::new();
        let mut rest = order;
        let mut d = 2;
        while d * d <= rest {
            if rest % d == 0 {
                prime_factors.push(d);
                while rest % d == 0 {
                    rest /= d;
                }
            }
            d += 1;
        }
        if rest > 1 {
            prime_factors.push(rest);
        }
        let slow_pow = |mut b: u32, mut e: u32| -> u32 {
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, b);
                }
                b = slow_mul(b, b);
                e >>= 1;
            }
            acc
        };
        let generator = (1..q)
            .find(|&g| prime_factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic");

        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x = slow_mul(x, generator);
        }

        Ok(FieldSpec {
            inner: Arc::new(Inner {
                p,
                k,
                q,
                modulus,
                log,
                exp,
                irreducibles: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn k(&self) -> u32 {
        self.inner.k
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Defining polynomial of F_q over F_p, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn is_odd(&self) -> bool {
        self.inner.p != 2
    }

    pub(crate) fn require_odd(&self) -> Result<()> {
        if self.is_odd() {
            Ok(())
        } else {
            Err(Error::EvenCharacteristic(self.q() as u64))
        }
    }

    /// Embeds an integer through the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.inner.p as i64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.inner.p;
        if self.inner.k == 1 {
            let s = a + b;
            if s >= p {
                s - p
            } else {
                s
            }
        } else {
            let (mut a, mut b) = (a, b);
            let mut out = 0;
            let mut place = 1;
            for _ in 0..self.inner.k {
                out += ((a % p + b % p) % p) * place;
                a /= p;
                b /= p;
                place *= p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.inner.p;
        if self.inner.k == 1 {
            if a == 0 {
                0
            } else {
                p - a
            }
        } else {
            let mut a = a;
            let mut out = 0;
            let mut place = 1;
            for _ in 0..self.inner.k {
                out += ((p - a % p) % p) * place;
                a /= p;
                place *= p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.inner.k == 1 {
            return ((a as u64 * b as u64) % self.inner.p as u64) as Elem;
        }
        let order = self.q() - 1;
        let l = self.inner.log[a as usize] + self.inner.log[b as usize];
        self.inner.exp[(l % order) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let order = self.q() - 1;
        let l = self.inner.log[a as usize];
        Some(self.inner.exp[((order - l) % order) as usize])
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q() - 1) as u64;
        let l = self.inner.log[a as usize] as u64;
        self.inner.exp[((l * (e % order)) % order) as usize]
    }

    /// Whether `a` is a square in F_q (zero counts as a square).
    pub fn is_square(&self, a: Elem) -> bool {
        a == 0 || !self.is_odd() || self.inner.log[a as usize] % 2 == 0
    }

    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return Some(0);
        }
        let order = self.q() - 1;
        let l = self.inner.log[a as usize];
        if self.is_odd() {
            (l % 2 == 0).then(|| self.inner.exp[(l / 2) as usize])
        } else {
            // Squaring is a bijection in characteristic 2.
            let half = if l % 2 == 0 { l / 2 } else { (l + order) / 2 };
            Some(self.inner.exp[half as usize])
        }
    }

    /// Least non-square by encoding (q odd).
    pub fn nonsquare(&self) -> Result<Elem> {
        self.require_odd()?;
        Ok((1..self.q()).find(|&a| !self.is_square(a)).expect("odd q has non-squares"))
    }

    /// Quadratic character of an element of F_q: 0, 1, or -1.
    pub fn legendre(&self, a: Elem) -> i8 {
        if a == 0 {
            0
        } else if self.is_square(a) {
            1
        } else {
            -1
        }
    }

    pub(crate) fn irreducible_cache(&self) -> &Mutex<HashMap<usize, Arc<Vec<Poly>>>> {
        &self.inner.irreducibles
    }
}
