//! Arithmetic in F_q and F_q[t].
//!
//! Elements of F_q are `u32` codes interpreted through a [`FieldSpec`];
//! polynomials and rational functions carry no field pointer and take the
//! field as an argument.

mod field;
mod irreducible;
mod poly;
mod ratfn;
mod residue;

pub use field::{prime_power, Elem, FieldSpec, MAX_FIELD_ORDER};
pub use irreducible::{
    count_irreducibles, factor, irreducibles_of_degree, is_irreducible, squarefree_part, MAX_SIEVE_SIZE,
};
pub use poly::Poly;
pub use ratfn::RatFn;
pub use residue::{hensel_sqrt, quadratic_character, residue_sqrt};

pub(crate) use field::is_prime;

use num_bigint::BigUint;
use num_traits::One;

/// |P^n(F_{q^k})| = (q^{k(n+1)} - 1)/(q^k - 1).
pub fn count_points_pn(n: u32, f: &FieldSpec, k: u32) -> BigUint {
    let qk = BigUint::from(f.q()).pow(k);
    let mut total = BigUint::one();
    let mut power = BigUint::one();
    for _ in 0..n {
        power *= &qk;
        total += &power;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_plane_counts() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(count_points_pn(2, &f2, 1), BigUint::from(7u32));
        assert_eq!(count_points_pn(2, &f2, 2), BigUint::from(21u32));
        assert_eq!(count_points_pn(2, &f2, 3), BigUint::from(73u32));
        let f3 = FieldSpec::new(3).unwrap();
        assert_eq!(count_points_pn(1, &f3, 2), BigUint::from(10u32));
    }
}
