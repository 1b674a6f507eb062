use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::fq::{FieldSpec, Poly};

fn residue_order(p: &Poly, f: &FieldSpec) -> BigUint {
    BigUint::from(f.q()).pow(p.degree().expect("nonzero modulus") as u32)
}

/// Quadratic character of `a` modulo the monic irreducible `p`, computed as
/// (a mod p)^((Q-1)/2) in the residue field of order Q = q^deg p.
pub fn quadratic_character(a: &Poly, p: &Poly, f: &FieldSpec) -> Result<i8> {
    f.require_odd()?;
    let r = a.rem(p, f)?;
    if r.is_zero() {
        return Ok(0);
    }
    let e = (residue_order(p, f) - 1u32) / 2u32;
    let s = r.pow_mod(&e, p, f);
    if s.is_one() {
        Ok(1)
    } else {
        debug_assert_eq!(s, Poly::constant(f.from_int(-1)));
        Ok(-1)
    }
}

/// A square root of `a` in F_q[t]/(p) (Tonelli-Shanks), or `None` if `a` is a
/// non-residue. The root returned is reduced modulo p.
pub fn residue_sqrt(a: &Poly, p: &Poly, f: &FieldSpec) -> Result<Option<Poly>> {
    f.require_odd()?;
    let a = a.rem(p, f)?;
    if a.is_zero() {
        return Ok(Some(Poly::zero()));
    }
    if quadratic_character(&a, p, f)? != 1 {
        return Ok(None);
    }
    let order = residue_order(p, f) - 1u32;
    let s = order.trailing_zeros().unwrap_or(0);
    let odd = &order >> s;
    // A non-residue: search the residue field in lexicographic order.
    let dp = p.degree().unwrap();
    let qu = f.q();
    let z = (1..)
        .map(|i| Poly::from_lex_index(i, qu, dp))
        .find(|c| quadratic_character(c, p, f) == Ok(-1))
        .expect("non-residues exist");
    let mut m = s;
    let mut c = z.pow_mod(&odd, p, f);
    let mut t = a.pow_mod(&odd, p, f);
    let mut r = a.pow_mod(&((&odd + 1u32) >> 1), p, f);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = tt.mul_mod(&tt, p, f);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = b.mul_mod(&b, p, f);
        }
        m = i;
        c = b.mul_mod(&b, p, f);
        t = t.mul_mod(&c, p, f);
        r = r.mul_mod(&b, p, f);
    }
    Ok(Some(r))
}

/// Lifts a square root of `d` modulo p (p not dividing d) to a root modulo p^k
/// by Newton iteration. Returns `None` when `d` is not a square modulo p.
pub fn hensel_sqrt(d: &Poly, p: &Poly, k: u32, f: &FieldSpec) -> Result<Option<Poly>> {
    if k == 0 {
        return Err(Error::arg("precision must be positive"));
    }
    let Some(mut r) = residue_sqrt(d, p, f)? else { return Ok(None) };
    if r.is_zero() {
        return Err(Error::arg("p divides d"));
    }
    let two = f.from_int(2);
    let mut prec = 1;
    while prec < k {
        prec = (2 * prec).min(k);
        let modulus = p.pow(prec, f);
        let err = r.square(f).sub(d, f);
        let deriv = r.scale(two, f);
        let inv = deriv.inv_mod(&modulus, f).expect("root is a unit");
        r = r.sub(&err.mul_mod(&inv, &modulus, f), f).rem(&modulus, f)?;
    }
    Ok(Some(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::irreducibles_of_degree;

    fn p(c: &[u32]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }

    #[test]
    fn character_examples() {
        let f3 = FieldSpec::new(3).unwrap();
        let t = p(&[0, 1]);
        assert_eq!(quadratic_character(&p(&[1, 1]), &t, &f3), Ok(1));
        assert_eq!(quadratic_character(&p(&[2, 1]), &t, &f3), Ok(-1));
        assert_eq!(quadratic_character(&t, &t, &f3), Ok(0));
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(quadratic_character(&t, &t, &f2), Err(Error::EvenCharacteristic(2)));
    }

    #[test]
    fn character_is_multiplicative() {
        let f = FieldSpec::new(5).unwrap();
        let places = irreducibles_of_degree(2, &f).unwrap();
        for pl in places.iter().take(4) {
            for i in 1..40u64 {
                for j in 1..10u64 {
                    let a = Poly::from_lex_index(i, 5, 3);
                    let b = Poly::from_lex_index(j * 7, 5, 3);
                    let (ca, cb) = (quadratic_character(&a, pl, &f).unwrap(), quadratic_character(&b, pl, &f).unwrap());
                    if ca != 0 && cb != 0 {
                        assert_eq!(quadratic_character(&a.mul(&b, &f), pl, &f).unwrap(), ca * cb);
                    }
                }
            }
        }
    }

    #[test]
    fn roots_and_lifts() {
        for q in [3u64, 5, 9, 25] {
            let f = FieldSpec::new(q).unwrap();
            for pl in irreducibles_of_degree(2, &f).unwrap().iter().take(3) {
                let d = p(&[2, 1, 1]);
                if pl.divides(&d, &f) {
                    continue;
                }
                if let Some(r) = residue_sqrt(&d, pl, &f).unwrap() {
                    assert_eq!(r.square(&f).rem(pl, &f).unwrap(), d.rem(pl, &f).unwrap());
                    let lifted = hensel_sqrt(&d, pl, 5, &f).unwrap().unwrap();
                    let modulus = pl.pow(5, &f);
                    assert!(lifted.square(&f).sub(&d, &f).rem(&modulus, &f).unwrap().is_zero());
                }
            }
        }
    }
}
