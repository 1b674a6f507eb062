//! Quadratic extensions L = F_q(t)(√D) for odd q: places, valuations, heights
//! of degree-2 points of P^2, and their enumeration by exact height.
//!
//! A Galois orbit {x, x̄} is identified with the symmetric form
//! y_ij = (x_i x̄_j + x_j x̄_i)/2, a point of P^5(F_q(t)) of rank 2. By Gauss's
//! lemma its height equals H₂(x)², so orbits of exact height are primitive
//! rank-2 forms of exact coefficient degree whose discriminant is not a square.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fq::{factor, hensel_sqrt, quadratic_character, Elem, FieldSpec, Poly, RatFn};
use crate::ratpoints::{canonicalize, schanuel_constant, ProjPoint};

/// Largest number of coefficient tuples the form scan will visit.
pub const MAX_FORM_SCAN: u64 = 200_000_000;
/// Largest number of coordinate tuples the presentation search will visit.
pub const MAX_PRESENTATION_SCAN: u64 = 50_000_000;

/// F_q(t)(√D) with D squarefree and not a square.
#[derive(Clone, Debug)]
pub struct QuadExt {
    f: FieldSpec,
    d: Poly,
}

impl QuadExt {
    pub fn new(f: &FieldSpec, d: Poly) -> Result<Self> {
        f.require_odd()?;
        if d.is_zero() {
            return Err(Error::arg("D must be nonzero"));
        }
        if d.degree() == Some(0) {
            if f.is_square(d.leading()) {
                return Err(Error::arg("D is a square"));
            }
        } else {
            let (_, fac) = factor(&d, f)?;
            if fac.iter().any(|(_, e)| *e > 1) {
                return Err(Error::arg(format!("D = {d} is not squarefree")));
            }
        }
        Ok(QuadExt { f: f.clone(), d })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.f
    }

    pub fn d(&self) -> &Poly {
        &self.d
    }

    /// The extension in the chart u = 1/t, for deg D even:
    /// D̃(u) = u^{deg D} D(1/u), so √D = u^{-deg D/2} √D̃.
    fn infinity_chart(&self) -> QuadExt {
        let n = self.d.degree().unwrap();
        QuadExt { f: self.f.clone(), d: self.d.reversed(n) }
    }

    /// Places above a finite place (monic irreducible `p`) or above ∞ (`None`).
    pub fn places_above(&self, p: Option<&Poly>) -> Result<Vec<PlaceQ>> {
        let (kind, base_deg) = splitting_type(p, self)?;
        let base = match p {
            Some(p) => Base::Finite(p.clone()),
            None => Base::Infinity,
        };
        let mk = |branch| PlaceQ::new(base.clone(), kind, base_deg, branch);
        Ok(match kind {
            SplitKind::Split => vec![mk(1), mk(-1)],
            _ => vec![mk(0)],
        })
    }
}

/// a + b√D with a, b ∈ F_q(t).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub a: RatFn,
    pub b: RatFn,
}

impl QuadElem {
    pub fn new(a: RatFn, b: RatFn) -> Self {
        QuadElem { a, b }
    }

    pub fn from_polys(a: Poly, b: Poly) -> Self {
        QuadElem { a: RatFn::from_poly(a), b: RatFn::from_poly(b) }
    }

    pub fn zero() -> Self {
        Self::from_polys(Poly::zero(), Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_polys(Poly::one(), Poly::zero())
    }

    pub fn sqrt_d() -> Self {
        Self::from_polys(Poly::zero(), Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conjugate(&self, l: &QuadExt) -> Self {
        QuadElem { a: self.a.clone(), b: self.b.neg(&l.f) }
    }

    pub fn norm(&self, l: &QuadExt) -> RatFn {
        let f = &l.f;
        self.a.mul(&self.a, f).sub(&self.b.mul(&self.b, f).mul_poly(&l.d, f), f)
    }

    pub fn trace(&self, l: &QuadExt) -> RatFn {
        self.a.add(&self.a, &l.f)
    }

    pub fn add(&self, o: &Self, l: &QuadExt) -> Self {
        QuadElem { a: self.a.add(&o.a, &l.f), b: self.b.add(&o.b, &l.f) }
    }

    pub fn sub(&self, o: &Self, l: &QuadExt) -> Self {
        QuadElem { a: self.a.sub(&o.a, &l.f), b: self.b.sub(&o.b, &l.f) }
    }

    pub fn mul(&self, o: &Self, l: &QuadExt) -> Self {
        let f = &l.f;
        let a = self.a.mul(&o.a, f).add(&self.b.mul(&o.b, f).mul_poly(&l.d, f), f);
        let b = self.a.mul(&o.b, f).add(&self.b.mul(&o.a, f), f);
        QuadElem { a, b }
    }

    pub fn inv(&self, l: &QuadExt) -> Result<Self> {
        let n = self.norm(l);
        let ni = n.inv(&l.f)?;
        let c = self.conjugate(l);
        Ok(QuadElem { a: c.a.mul(&ni, &l.f), b: c.b.mul(&ni, &l.f) })
    }

    /// Common monic denominator and the polynomial parts A, B with
    /// self = (A + B√D)/den.
    fn integral_parts(&self, f: &FieldSpec) -> (Poly, Poly, Poly) {
        let den = lcm(self.a.den(), self.b.den(), f);
        let a = self.a.num().mul(&den.exact_div(self.a.den(), f).unwrap(), f);
        let b = self.b.num().mul(&den.exact_div(self.b.den(), f).unwrap(), f);
        (a, b, den)
    }
}

fn lcm(x: &Poly, y: &Poly, f: &FieldSpec) -> Poly {
    x.mul(y, f).exact_div(&x.gcd(y, f), f).unwrap().monic(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Finite(Poly),
    Infinity,
}

/// A place of L. Split places carry a branch sign: the place where √D is
/// congruent to sign·r, r the deterministic Hensel lift of √D.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaceQ {
    pub base: Base,
    pub kind: SplitKind,
    pub e: u32,
    pub f: u32,
    pub deg: u32,
    pub branch: i8,
}

impl PlaceQ {
    fn new(base: Base, kind: SplitKind, base_deg: u32, branch: i8) -> Self {
        let (e, f) = match kind {
            SplitKind::Split => (1, 1),
            SplitKind::Inert => (1, 2),
            SplitKind::Ramified => (2, 1),
        };
        PlaceQ { base, kind, e, f, deg: f * base_deg, branch }
    }
}

/// Splitting behaviour of a place of F_q(t) in L, and the degree of that place.
pub fn splitting_type(p: Option<&Poly>, l: &QuadExt) -> Result<(SplitKind, u32)> {
    l.f.require_odd()?;
    match p {
        Some(p) => {
            let kind = match quadratic_character(&l.d, p, &l.f)? {
                0 => SplitKind::Ramified,
                1 => SplitKind::Split,
                _ => SplitKind::Inert,
            };
            Ok((kind, p.degree().ok_or(Error::arg("zero place"))? as u32))
        }
        None => {
            let n = l.d.degree().unwrap();
            let kind = if n % 2 == 1 {
                SplitKind::Ramified
            } else if l.f.is_square(l.d.leading()) {
                SplitKind::Split
            } else {
                SplitKind::Inert
            };
            Ok((kind, 1))
        }
    }
}

/// u^k as a rational function (k may be negative).
fn u_power(k: i64, f: &FieldSpec) -> RatFn {
    let m = Poly::monomial(1, k.unsigned_abs() as usize);
    if k >= 0 {
        RatFn::from_poly(m)
    } else {
        RatFn::new(Poly::one(), m, f).unwrap()
    }
}

/// g(1/u) for g ∈ F_q(t).
fn at_inverse(g: &RatFn, f: &FieldSpec) -> Result<RatFn> {
    if g.is_zero() {
        return Ok(RatFn::zero());
    }
    let (dn, dd) = (g.num().degree().unwrap(), g.den().degree().unwrap());
    let r = RatFn::new(g.num().reversed(dn), g.den().reversed(dd), f)?;
    Ok(r.mul(&u_power(dd as i64 - dn as i64, f), f))
}

fn require_nonzero(z: &QuadElem) -> Result<()> {
    if z.is_zero() {
        Err(Error::ZeroValuation)
    } else {
        Ok(())
    }
}

fn poly_val(x: &Poly, p: &Poly, f: &FieldSpec) -> Option<i64> {
    x.valuation(p, f).map(i64::from)
}

/// Normalized valuation w(z), surjective onto Z.
pub fn valuation(z: &QuadElem, w: &PlaceQ, l: &QuadExt) -> Result<i64> {
    require_nonzero(z)?;
    let f = &l.f;
    match (&w.base, w.kind) {
        (Base::Finite(p), SplitKind::Inert) => {
            let v = z.norm(l).valuation(p, f)?;
            assert!(v % 2 == 0, "odd norm valuation at an inert place");
            Ok(v / 2)
        }
        (Base::Finite(p), SplitKind::Ramified) => {
            let va = if z.a.is_zero() { i64::MAX } else { 2 * z.a.valuation(p, f)? };
            let vb = if z.b.is_zero() { i64::MAX } else { 2 * z.b.valuation(p, f)? + 1 };
            Ok(va.min(vb))
        }
        (Base::Finite(p), SplitKind::Split) => split_valuation(z, p, w.branch, l),
        (Base::Infinity, SplitKind::Inert) => {
            let v = z.norm(l).valuation_inf()?;
            assert!(v % 2 == 0, "odd norm valuation at an inert place");
            Ok(v / 2)
        }
        (Base::Infinity, SplitKind::Ramified) => {
            let n = l.d.deg();
            let va = if z.a.is_zero() { i64::MAX } else { 2 * z.a.valuation_inf()? };
            let vb = if z.b.is_zero() { i64::MAX } else { 2 * z.b.valuation_inf()? - n };
            Ok(va.min(vb))
        }
        (Base::Infinity, SplitKind::Split) => {
            let chart = l.infinity_chart();
            let h = l.d.deg() / 2;
            let a = at_inverse(&z.a, f)?;
            let b = at_inverse(&z.b, f)?.mul(&u_power(-h, f), f);
            split_valuation(&QuadElem::new(a, b), &Poly::t(), w.branch, &chart)
        }
    }
}

fn split_valuation(z: &QuadElem, p: &Poly, sign: i8, l: &QuadExt) -> Result<i64> {
    let f = &l.f;
    let (a, b, den) = z.integral_parts(f);
    let norm = a.square(f).sub(&b.square(f).mul(&l.d, f), f);
    let k = norm.valuation(p, f).ok_or(Error::ZeroValuation)? + 1;
    let r = hensel_sqrt(&l.d, p, k, f)?.ok_or(Error::arg("place does not split"))?;
    let r = if sign < 0 { r.neg(f) } else { r };
    let modulus = p.pow(k, f);
    let x = a.add(&b.mul(&r, f), f).rem(&modulus, f)?;
    let v = poly_val(&x, p, f).unwrap_or(k as i64);
    assert!(v < k as i64, "Hensel precision too low");
    Ok(v - poly_val(&den, p, f).unwrap())
}

/// Every place of L above the finite places dividing `support`, and above ∞.
fn places_over_support(support: &[Poly], l: &QuadExt) -> Result<Vec<PlaceQ>> {
    let mut bases = BTreeSet::new();
    for s in support {
        if s.degree().unwrap_or(0) > 0 {
            for (p, _) in factor(s, &l.f)?.1 {
                bases.insert(p);
            }
        }
    }
    let mut out = Vec::new();
    for p in &bases {
        out.extend(l.places_above(Some(p))?);
    }
    out.extend(l.places_above(None)?);
    Ok(out)
}

/// Σ_w w(z)·deg(w) over every place where z may have nonzero valuation.
pub fn degree_of_divisor(z: &QuadElem, l: &QuadExt) -> Result<i64> {
    require_nonzero(z)?;
    let (a, b, den) = z.integral_parts(&l.f);
    let n = a.square(&l.f).sub(&b.square(&l.f).mul(&l.d, &l.f), &l.f);
    let mut total = 0;
    for w in places_over_support(&[n, den], l)? {
        total += valuation(z, &w, l)? * w.deg as i64;
    }
    Ok(total)
}

/// A degree-2 point of P^2 with coordinates in L, kept canonical.
#[derive(Clone, Debug)]
pub struct DegreeTwoPoint {
    ext: QuadExt,
    coords: [QuadElem; 3],
    key: ProjPoint,
}

impl DegreeTwoPoint {
    /// Clears denominators, removes the polynomial content and scales the first
    /// nonzero coordinate to have a monic rational part (or monic √D part).
    pub fn new(ext: &QuadExt, coords: [QuadElem; 3]) -> Result<Self> {
        let f = &ext.f;
        if coords.iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroPoint);
        }
        let den = coords.iter().fold(Poly::one(), |acc, c| lcm(&acc, &lcm(c.a.den(), c.b.den(), f), f));
        let parts: Vec<(Poly, Poly)> = coords
            .iter()
            .map(|c| {
                let a = c.a.num().mul(&den.exact_div(c.a.den(), f).unwrap(), f);
                let b = c.b.num().mul(&den.exact_div(c.b.den(), f).unwrap(), f);
                (a, b)
            })
            .collect();
        let g = parts.iter().fold(Poly::zero(), |g, (a, b)| g.gcd(a, f).gcd(b, f));
        let (pa, pb) = parts.iter().find(|(a, b)| !a.is_zero() || !b.is_zero()).unwrap();
        let lead = if pa.is_zero() { pb.leading() } else { pa.leading() };
        let s = f.inv(lead).unwrap();
        let mk = |x: &Poly| RatFn::from_poly(x.exact_div(&g, f).unwrap().scale(s, f));
        let canon: Vec<QuadElem> = parts.iter().map(|(a, b)| QuadElem::new(mk(a), mk(b))).collect();
        let canon: [QuadElem; 3] = canon.try_into().unwrap();
        let key = orbit_key(ext, &canon)?;
        if form_rank(key.coords(), f) < 2 {
            return Err(Error::WrongDegree);
        }
        Ok(DegreeTwoPoint { ext: ext.clone(), coords: canon, key })
    }

    pub fn ext(&self) -> &QuadExt {
        &self.ext
    }

    pub fn coords(&self) -> &[QuadElem; 3] {
        &self.coords
    }

    pub fn key(&self) -> &ProjPoint {
        &self.key
    }

    pub fn conjugate(&self) -> Result<Self> {
        let c = self.coords.clone().map(|x| x.conjugate(&self.ext));
        Self::new(&self.ext, c)
    }

    /// Largest coefficient degree among the canonical coordinates.
    pub fn coord_degree(&self) -> i64 {
        self.coords.iter().flat_map(|c| [c.a.num().deg(), c.b.num().deg()]).max().unwrap()
    }
}

/// The symmetric form (x_i x̄_j + x_j x̄_i)/2 as a canonical point of P^5, in the
/// order y11, y12, y13, y22, y23, y33.
pub fn orbit_key(l: &QuadExt, coords: &[QuadElem; 3]) -> Result<ProjPoint> {
    let f = &l.f;
    let den = coords.iter().fold(Poly::one(), |acc, c| lcm(&acc, &lcm(c.a.den(), c.b.den(), f), f));
    let parts: Vec<(Poly, Poly)> = coords
        .iter()
        .map(|c| {
            (
                c.a.num().mul(&den.exact_div(c.a.den(), f).unwrap(), f),
                c.b.num().mul(&den.exact_div(c.b.den(), f).unwrap(), f),
            )
        })
        .collect();
    let entry = |i: usize, j: usize| {
        let (ai, bi) = &parts[i];
        let (aj, bj) = &parts[j];
        ai.mul(aj, f).sub(&bi.mul(bj, f).mul(&l.d, f), f)
    };
    let y = [entry(0, 0), entry(0, 1), entry(0, 2), entry(1, 1), entry(1, 2), entry(2, 2)];
    canonicalize(&y, f)
}

fn sym(y: &[Poly], i: usize, j: usize) -> &Poly {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    let idx = [[0, 1, 2], [1, 3, 4], [2, 4, 5]][i][j];
    &y[idx]
}

fn minor(y: &[Poly], r: [usize; 2], c: [usize; 2], f: &FieldSpec) -> Poly {
    sym(y, r[0], c[0]).mul(sym(y, r[1], c[1]), f).sub(&sym(y, r[0], c[1]).mul(sym(y, r[1], c[0]), f), f)
}

fn det3(y: &[Poly], f: &FieldSpec) -> Poly {
    let mut d = Poly::zero();
    for (j, c) in [[1, 2], [0, 2], [0, 1]].into_iter().enumerate() {
        let term = sym(y, 0, j).mul(&minor(y, [1, 2], c, f), f);
        d = if j == 1 { d.sub(&term, f) } else { d.add(&term, f) };
    }
    d
}

/// Rank of a symmetric 3x3 matrix given by its six upper entries.
pub fn form_rank(y: &[Poly], f: &FieldSpec) -> u32 {
    if y.iter().all(|c| c.is_zero()) {
        return 0;
    }
    if !det3(y, f).is_zero() {
        return 3;
    }
    let pairs = [[0, 1], [0, 2], [1, 2]];
    let any_minor = pairs.iter().any(|r| pairs.iter().any(|c| !minor(y, *r, *c, f).is_zero()));
    if any_minor {
        2
    } else {
        1
    }
}

/// D·c² = a with D squarefree (constant part 1 or the field's nonsquare).
fn square_class(a: &Poly, f: &FieldSpec) -> Result<(Poly, Poly)> {
    let (lc, fac) = factor(a, f)?;
    let mut d = Poly::one();
    let mut c = Poly::one();
    for (p, e) in fac {
        if e % 2 == 1 {
            d = d.mul(&p, f);
        }
        c = c.mul(&p.pow(e / 2, f), f);
    }
    let (unit, croot) = if f.is_square(lc) { (1, f.sqrt(lc).unwrap()) } else {
        let ns = f.nonsquare()?;
        (ns, f.sqrt(f.mul(lc, f.inv(ns).unwrap())).unwrap())
    };
    Ok((d.scale(unit, f), c.scale(croot, f)))
}

/// The orbit behind a primitive rank-2 form whose discriminant is not a square:
/// the extension and a point [y_kk : y_kj + c_j√D : ...] with k the first
/// nonzero diagonal entry.
pub fn point_from_form(y: &[Poly], f: &FieldSpec) -> Result<DegreeTwoPoint> {
    if form_rank(y, f) != 2 {
        return Err(Error::WrongDegree);
    }
    let k = (0..3).find(|&i| !sym(y, i, i).is_zero()).ok_or(Error::WrongDegree)?;
    let others: Vec<usize> = (0..3).filter(|&j| j != k).collect();
    // -minor_{kj} = D c_j^2.
    let neg_minor = |j: usize| minor(y, [k, j], [k, j], f).neg(f);
    let j0 = *others.iter().find(|&&j| !neg_minor(j).is_zero()).ok_or(Error::WrongDegree)?;
    let (d, c0) = square_class(&neg_minor(j0), f)?;
    let ext = QuadExt::new(f, d)?;
    let mut c = [Poly::zero(), Poly::zero(), Poly::zero()];
    c[j0] = c0.clone();
    for &j in &others {
        if j != j0 {
            // c_j0 c_j D = y_kj0 y_kj - y_kk y_j0j.
            let rhs = sym(y, k, j0).mul(sym(y, k, j), f).sub(&sym(y, k, k).mul(sym(y, j0, j), f), f);
            c[j] = rhs
                .exact_div(&c0.mul(&ext.d, f), f)
                .ok_or(Error::arg("form does not come from a quadratic point"))?;
        }
    }
    let coords: Vec<QuadElem> = (0..3)
        .map(|j| if j == k { QuadElem::from_polys(sym(y, k, k).clone(), Poly::zero()) } else { QuadElem::from_polys(sym(y, k, j).clone(), c[j].clone()) })
        .collect();
    DegreeTwoPoint::new(&ext, coords.try_into().unwrap())
}

/// m with H₂(x) = q^{m/2}, from the product over all places of L of
/// max_i |x_i|_w, |x|_w = q^{-w(x) deg w}.
pub fn height_degree2(pt: &DegreeTwoPoint) -> Result<u32> {
    let l = &pt.ext;
    let f = &l.f;
    let nonzero: Vec<&QuadElem> = pt.coords.iter().filter(|c| !c.is_zero()).collect();
    if form_rank(pt.key.coords(), f) < 2 {
        return Err(Error::WrongDegree);
    }
    let mut support = Vec::new();
    for z in &nonzero {
        let (a, b, den) = z.integral_parts(f);
        support.push(a.square(f).sub(&b.square(f).mul(&l.d, f), f));
        support.push(den);
    }
    let mut exponent = 0i64;
    for w in places_over_support(&support, l)? {
        let mut min = i64::MAX;
        for z in &nonzero {
            min = min.min(valuation(z, &w, l)?);
        }
        exponent -= min * w.deg as i64;
    }
    assert!(exponent >= 0, "negative height exponent");
    Ok(exponent as u32)
}

/// Search depth: (largest deg D, largest coordinate degree).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SearchBound {
    pub d_deg: u32,
    pub coord_deg: u32,
}

impl SearchBound {
    pub fn default_for(m: u32) -> Self {
        SearchBound { d_deg: 2 * m, coord_deg: 2 * m }
    }

    pub fn grown(self, by: u32) -> Self {
        SearchBound { d_deg: self.d_deg + by, coord_deg: self.coord_deg + by }
    }
}

/// Orbits of exact height found by one enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degree2Count {
    pub q: u32,
    pub m: u32,
    pub bound: SearchBound,
    /// Galois orbits {x, x̄} within `bound`.
    pub orbits: u64,
    /// Same count with both bound components increased by 2.
    pub orbits_grown: u64,
    pub stable: bool,
    /// Unordered pairs of distinct rational points with H(x)H(y) = q^M.
    pub split_pairs: u64,
    /// Rational points with H(x)^2 = q^M.
    pub rank_one: u64,
}

impl Degree2Count {
    /// Degree-2 points (two per orbit).
    pub fn points(&self) -> u64 {
        2 * self.orbits
    }

    /// points / (2 S^2 q^{3M} M).
    pub fn ratio(&self) -> BigRational {
        BigRational::from_integer(self.points().into()) / kt_main_term(self.q as u64, self.m)
    }
}

fn all_polys(q: u32, max_deg: u32) -> Vec<Poly> {
    let n = (q as u64).pow(max_deg + 1);
    (0..n).map(|i| Poly::from_lex_index(i, q, max_deg as usize + 1)).collect()
}

/// Every primitive symmetric form of exact coefficient degree `m` with
/// det = 0 and first nonzero entry monic, bucketed by rank and discriminant type.
/// `visit` receives the irreducible ones.
fn scan_forms<V>(f: &FieldSpec, m: u32, visit: V) -> Result<(u64, u64)>
where
    V: Fn(&[Poly]) + Sync,
{
    f.require_odd()?;
    let q = f.q();
    let per = (q as u64).pow(m + 1);
    let total = per.checked_pow(5).unwrap_or(u64::MAX);
    if total > MAX_FORM_SCAN {
        return Err(Error::guard("symmetric form scan", total, MAX_FORM_SCAN));
    }
    let polys = all_polys(q, m);
    let inv2 = f.inv(f.from_int(2)).unwrap();
    let counts: Vec<(u64, u64)> = polys
        .par_iter()
        .map(|a11| {
            let mut split = 0u64;
            let mut rank1 = 0u64;
            if !a11.is_zero() && !a11.is_monic() {
                return (0, 0);
            }
            let mut cand: Vec<Poly> = Vec::new();
            for a13 in &polys {
                for a22 in &polys {
                    for a23 in &polys {
                        for a33 in &polys {
                            cand.clear();
                            solve_y12(a11, a13, a22, a23, a33, &polys, inv2, m, f, &mut cand);
                            for y12 in &cand {
                                let y = [a11.clone(), y12.clone(), a13.clone(), a22.clone(), a23.clone(), a33.clone()];
                                match classify(&y, m, f) {
                                    Some(FormClass::Irreducible) => visit(&y),
                                    Some(FormClass::Split) => split += 1,
                                    Some(FormClass::RankOne) => rank1 += 1,
                                    None => {}
                                }
                            }
                        }
                    }
                }
            }
            (split, rank1)
        })
        .collect();
    Ok(counts.into_iter().fold((0, 0), |(a, b), (c, d)| (a + c, b + d)))
}

/// All y12 of degree <= m making det = 0, given the other five entries.
#[allow(clippy::too_many_arguments)]
fn solve_y12(a11: &Poly, a13: &Poly, a22: &Poly, a23: &Poly, a33: &Poly, polys: &[Poly], inv2: Elem, m: u32, f: &FieldSpec, out: &mut Vec<Poly>) {
    let fits = |p: &Poly| p.deg() <= m as i64;
    let p1323 = a13.mul(a23, f);
    if a33.is_zero() {
        // 2 a13 a23 y = a11 a23^2 + a22 a13^2.
        let rhs = a11.mul(&a23.square(f), f).add(&a22.mul(&a13.square(f), f), f);
        if p1323.is_zero() {
            if rhs.is_zero() {
                out.extend(polys.iter().cloned());
            }
        } else if let Some(y) = rhs.scale(inv2, f).exact_div(&p1323, f) {
            if fits(&y) {
                out.push(y);
            }
        }
        return;
    }
    let disc = a11.mul(a33, f).sub(&a13.square(f), f).mul(&a22.mul(a33, f).sub(&a23.square(f), f), f);
    let Some(s) = disc.sqrt(f) else { return };
    for root in [p1323.add(&s, f), p1323.sub(&s, f)] {
        if let Some(y) = root.exact_div(a33, f) {
            if fits(&y) && !out.contains(&y) {
                out.push(y);
            }
        }
    }
}

enum FormClass {
    Irreducible,
    Split,
    RankOne,
}

fn classify(y: &[Poly], m: u32, f: &FieldSpec) -> Option<FormClass> {
    if y.iter().map(|c| c.deg()).max().unwrap() != m as i64 {
        return None;
    }
    let first = y.iter().find(|c| !c.is_zero())?;
    if !first.is_monic() {
        return None;
    }
    let mut g = Poly::zero();
    for c in y {
        g = g.gcd(c, f);
        if g.is_one() {
            break;
        }
    }
    if !g.is_one() {
        return None;
    }
    match form_rank(y, f) {
        1 => Some(FormClass::RankOne),
        2 => {
            // A zero diagonal means every x_i x̄_i vanishes: never a conjugate pair.
            let principal = [[1, 2], [0, 2], [0, 1]].into_iter().map(|r| minor(y, r, r, f)).find(|m| !m.is_zero());
            match principal {
                Some(mi) if mi.neg(f).sqrt(f).is_none() => Some(FormClass::Irreducible),
                _ => Some(FormClass::Split),
            }
        }
        _ => None,
    }
}

/// Galois orbits of degree-2 points of P^2 with H₂(x)² = q^M, found as
/// primitive symmetric forms; each orbit is reconstructed as a point over its
/// own F_q(t)(√D) and kept when deg D and its coordinate degree fit `bound`.
pub fn enumerate_degree2(f: &FieldSpec, m: u32, bound: Option<SearchBound>) -> Result<Degree2Count> {
    if m == 0 {
        return Err(Error::arg("M must be at least 1"));
    }
    let bound = bound.unwrap_or(SearchBound::default_for(m));
    let grown = bound.grown(2);
    let hist = std::sync::Mutex::new(BTreeMap::<(i64, i64), u64>::new());
    let failure = std::sync::Mutex::new(None);
    let (split, rank1) = scan_forms(f, m, |y| match point_from_form(y, f) {
        Ok(pt) => {
            *hist.lock().unwrap().entry((pt.ext.d.deg(), pt.coord_degree())).or_default() += 1;
        }
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
        }
    })?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let hist = hist.into_inner().unwrap();
    let within = |b: SearchBound| {
        hist.iter()
            .filter(|((dd, cd), _)| *dd <= b.d_deg as i64 && *cd <= b.coord_deg as i64)
            .map(|(_, n)| n)
            .sum::<u64>()
    };
    let orbits = within(bound);
    let orbits_grown = within(grown);
    Ok(Degree2Count {
        q: f.q(),
        m,
        bound,
        orbits,
        orbits_grown,
        stable: orbits == orbits_grown,
        split_pairs: split,
        rank_one: rank1,
    })
}

/// Orbit keys of exact height M reached by points [x0 : x1 : x2] over
/// F_q(t)(√D), D monic squarefree times 1 or a fixed nonsquare with
/// deg D <= bound.d_deg, x0 ∈ F_q[t] monic or zero, and every polynomial part
/// of degree <= bound.coord_deg.
pub fn orbits_by_presentation(f: &FieldSpec, m: u32, bound: SearchBound) -> Result<BTreeSet<ProjPoint>> {
    f.require_odd()?;
    let q = f.q();
    let per = (q as u64).pow(bound.coord_deg + 1);
    let ds = discriminant_classes(f, bound.d_deg)?;
    let total = (ds.len() as u64).saturating_mul(per.saturating_pow(5));
    if total > MAX_PRESENTATION_SCAN {
        return Err(Error::guard("presentation scan", total, MAX_PRESENTATION_SCAN));
    }
    let polys = all_polys(q, bound.coord_deg);
    let monic: Vec<&Poly> = polys.iter().filter(|p| p.is_monic()).collect();
    let sets: Vec<BTreeSet<ProjPoint>> = ds
        .par_iter()
        .map(|d| {
            let ext = QuadExt { f: f.clone(), d: d.clone() };
            let mut keys = BTreeSet::new();
            let mut consider = |x: [QuadElem; 3]| {
                if let Ok(key) = orbit_key(&ext, &x) {
                    if key.height_exponent() == m && classify(key.coords(), m, f).is_some_and(|c| matches!(c, FormClass::Irreducible)) {
                        keys.insert(key);
                    }
                }
            };
            for a1 in &polys {
                for b1 in &polys {
                    let x1 = QuadElem::from_polys(a1.clone(), b1.clone());
                    for a2 in &polys {
                        for b2 in &polys {
                            let x2 = QuadElem::from_polys(a2.clone(), b2.clone());
                            for a0 in &monic {
                                consider([QuadElem::from_polys((*a0).clone(), Poly::zero()), x1.clone(), x2.clone()]);
                            }
                            if a1.is_monic() && b1.is_zero() {
                                consider([QuadElem::zero(), x1.clone(), x2.clone()]);
                            }
                        }
                    }
                }
            }
            keys
        })
        .collect();
    Ok(sets.into_iter().flatten().collect())
}

/// Monic squarefree D and D times the field's first nonsquare, deg D <= max_deg,
/// excluding the square D = 1.
pub fn discriminant_classes(f: &FieldSpec, max_deg: u32) -> Result<Vec<Poly>> {
    let ns = f.nonsquare()?;
    let mut out = vec![Poly::constant(ns)];
    for d in 1..=max_deg as usize {
        let n = (f.q() as u64).pow(d as u32);
        for i in 0..n {
            let p = Poly::monic_from_lex_index(i, f.q(), d);
            if factor(&p, f)?.1.iter().all(|(_, e)| *e == 1) {
                out.push(p.scale(ns, f));
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// 2 S^2 q^{3M} M with S = S(3,1).
pub fn kt_main_term(q: u64, m: u32) -> BigRational {
    let s = schanuel_constant(2, q);
    let q3m = BigRational::from_integer(BigInt::from(q).pow(3 * m));
    BigRational::from_integer(2.into()) * &s * &s * q3m * BigRational::from_integer(m.into())
}

/// Main-term bookkeeping for Sym^2 P^2 in the O(1)-height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hilb2Split {
    /// S^2 q^{3M} M, the orbit count predicted from the degree-2 point count.
    pub irreducible_main: BigRational,
    /// Half the ordered pairs (x, y) of rational points with H(x)H(y) = q^M.
    pub reducible: BigRational,
    /// (3/2) S^2 q^{3M} M.
    pub total_main: BigRational,
}

pub fn hilb2_split_counts(f: &FieldSpec, m: u32) -> Result<Hilb2Split> {
    let reducible = crate::ratpoints::count_reducible_pairs(f, m)?.value;
    let q = f.q() as u64;
    let half_kt = kt_main_term(q, m) / BigRational::from_integer(2.into());
    let total_main = &half_kt * BigRational::new(3.into(), 2.into());
    Ok(Hilb2Split { irreducible_main: half_kt, reducible, total_main })
}

/// Ratio as f64 for display.
pub fn ratio_f64(r: &BigRational) -> f64 {
    crate::real::ratio_to_f64(r)
}

/// Number of exact-height points of P^2 with H(x)^2 = q^M (0 for odd M).
pub fn rank_one_prediction(f: &FieldSpec, m: u32) -> Result<u64> {
    if m % 2 == 1 {
        return Ok(0);
    }
    let c: BigUint = crate::ratpoints::count_exact_height(2, f, m / 2)?;
    Ok(c.to_u64().unwrap_or(u64::MAX))
}

/// Unordered pairs of distinct rational points with H(x)H(y) = q^M.
pub fn split_pair_prediction(f: &FieldSpec, m: u32) -> Result<BigRational> {
    let half = crate::ratpoints::count_reducible_pairs(f, m)?.value;
    let diag = BigRational::from_integer(rank_one_prediction(f, m)?.into());
    let out = half - diag / BigRational::from_integer(2.into());
    debug_assert!(!out.is_zero() || m == 0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[u32]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }

    fn f3() -> FieldSpec {
        FieldSpec::new(3).unwrap()
    }

    fn sqrt_t_ext() -> QuadExt {
        QuadExt::new(&f3(), Poly::t()).unwrap()
    }

    #[test]
    fn splitting_examples() {
        let l = sqrt_t_ext();
        assert_eq!(splitting_type(Some(&Poly::t()), &l).unwrap().0, SplitKind::Ramified);
        assert_eq!(splitting_type(Some(&p(&[1, 1])), &l).unwrap().0, SplitKind::Inert);
        assert_eq!(splitting_type(Some(&p(&[2, 1])), &l).unwrap().0, SplitKind::Split);
        assert_eq!(splitting_type(None, &l).unwrap().0, SplitKind::Ramified);
        assert!(QuadExt::new(&FieldSpec::new(2).unwrap(), Poly::t()).is_err());
        assert!(QuadExt::new(&f3(), p(&[0, 0, 1])).is_err());
        assert!(QuadExt::new(&f3(), p(&[1])).is_err());
    }

    #[test]
    fn valuation_examples() {
        let l = sqrt_t_ext();
        let s = QuadElem::sqrt_d();
        let ram = &l.places_above(Some(&Poly::t())).unwrap()[0];
        assert_eq!(valuation(&s, ram, &l).unwrap(), 1);
        let inf = &l.places_above(None).unwrap()[0];
        assert_eq!(valuation(&s, inf, &l).unwrap(), -1);
        let z = QuadElem::from_polys(Poly::one(), Poly::one());
        let split = l.places_above(Some(&p(&[2, 1]))).unwrap();
        let mut vs: Vec<i64> = split.iter().map(|w| valuation(&z, w, &l).unwrap()).collect();
        vs.sort();
        assert_eq!(vs, vec![0, 1]);
        assert!(valuation(&QuadElem::zero(), inf, &l).is_err());
        assert_eq!(degree_of_divisor(&z, &l).unwrap(), 0);
    }

    #[test]
    fn split_infinity() {
        // D = t^2 + 2 over F_3: leading coefficient 1 is a square, so ∞ splits.
        let l = QuadExt::new(&f3(), p(&[2, 0, 1])).unwrap();
        let infs = l.places_above(None).unwrap();
        assert_eq!(infs.len(), 2);
        let z = QuadElem::from_polys(Poly::t(), Poly::one());
        let vs: Vec<i64> = infs.iter().map(|w| valuation(&z, w, &l).unwrap()).collect();
        // t + √D and t - √D = -2/(t + √D): valuations -1 and +1 in some order.
        assert_eq!(vs.iter().sum::<i64>(), -(z.norm(&l).num().deg()));
        assert_eq!(degree_of_divisor(&z, &l).unwrap(), 0);
    }

    #[test]
    fn height_examples() {
        let l = sqrt_t_ext();
        let pt = |x0: QuadElem| DegreeTwoPoint::new(&l, [x0, QuadElem::one(), QuadElem::zero()]).unwrap();
        let a = pt(QuadElem::sqrt_d());
        assert_eq!(height_degree2(&a).unwrap(), 1);
        let b = pt(QuadElem::from_polys(Poly::one(), Poly::one()));
        assert_eq!(height_degree2(&b).unwrap(), 1);
        let c = pt(QuadElem::from_polys(Poly::zero(), p(&[2])));
        assert_eq!(height_degree2(&c).unwrap(), 1);
        assert_eq!(a.key(), c.key());
        assert_eq!(a.key().height_exponent(), 1);
        let rational = DegreeTwoPoint::new(&l, [QuadElem::sqrt_d(), QuadElem::sqrt_d(), QuadElem::zero()]);
        assert!(matches!(rational, Err(Error::WrongDegree)));
    }

    #[test]
    fn form_round_trip() {
        let l = sqrt_t_ext();
        let x = [QuadElem::from_polys(Poly::one(), Poly::one()), QuadElem::from_polys(Poly::t(), Poly::zero()), QuadElem::sqrt_d()];
        let pt = DegreeTwoPoint::new(&l, x).unwrap();
        let back = point_from_form(pt.key().coords(), &f3()).unwrap();
        assert_eq!(back.key(), pt.key());
        assert_eq!(height_degree2(&back).unwrap(), pt.key().height_exponent());
        assert_eq!(height_degree2(&pt).unwrap(), pt.key().height_exponent());
    }

    #[test]
    fn kt_examples() {
        let s2 = BigRational::new(10816.into(), 81.into());
        assert_eq!(kt_main_term(3, 1), BigRational::from_integer(2.into()) * &s2 * BigRational::from_integer(27.into()));
        assert_eq!(kt_main_term(3, 2), BigRational::from_integer(4.into()) * &s2 * BigRational::from_integer(729.into()));
        assert!(kt_main_term(3, 0).is_zero());
        let h = hilb2_split_counts(&f3(), 1).unwrap();
        assert_eq!(h.irreducible_main, &s2 * BigRational::from_integer(27.into()));
    }

    #[test]
    fn small_enumeration_matches_presentations() {
        let f = f3();
        let c = enumerate_degree2(&f, 1, None).unwrap();
        assert!(c.stable);
        assert_eq!(BigRational::from_integer(c.split_pairs.into()), split_pair_prediction(&f, 1).unwrap());
        assert_eq!(c.rank_one, 0);
        let keys = orbits_by_presentation(&f, 1, SearchBound { d_deg: 2, coord_deg: 1 }).unwrap();
        assert_eq!(keys.len() as u64, c.orbits);
        let sqrt_t = DegreeTwoPoint::new(&sqrt_t_ext(), [QuadElem::sqrt_d(), QuadElem::one(), QuadElem::zero()]).unwrap();
        assert!(keys.contains(sqrt_t.key()));
    }
}
