//! Sparse integer-coefficient polynomials in the field parameters.
//!
//! These back the numerator/denominator pairs of function-field scalars.
//! In characteristic p every coefficient is kept reduced to 1..p-1, so the
//! same type serves Z[t1..ts] and Fp[t1..ts].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Field characteristic: zero or a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Char {
    Zero,
    P(u64),
}

impl Char {
    pub fn is_zero(self) -> bool {
        matches!(self, Char::Zero)
    }
    pub fn prime(self) -> Option<u64> {
        match self {
            Char::Zero => None,
            Char::P(p) => Some(p),
        }
    }
}

fn reduce_coeff(c: &BigInt, ch: Char) -> BigInt {
    match ch {
        Char::Zero => c.clone(),
        Char::P(p) => {
            let m = BigInt::from(p);
            let r = c.mod_floor(&m);
            r
        }
    }
}

/// exponent vector -> coefficient, no zero coefficients stored
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPoly {
    pub arity: usize,
    pub terms: BTreeMap<Vec<u32>, BigInt>,
}

impl ParamPoly {
    pub fn zero(arity: usize) -> Self {
        ParamPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: BigInt, ch: Char) -> Self {
        let mut poly = ParamPoly::zero(arity);
        let c = reduce_coeff(&c, ch);
        if !c.is_zero() {
            poly.terms.insert(vec![0; arity], c);
        }
        poly
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, BigInt::one(), Char::Zero)
    }

    /// single parameter, exponent 1
    pub fn var(arity: usize, idx: usize) -> Self {
        assert!(idx < arity);
        let mut exps = vec![0; arity];
        exps[idx] = 1;
        let mut poly = ParamPoly::zero(arity);
        poly.terms.insert(exps, BigInt::one());
        poly
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&vec![0u32; self.arity])
                .map_or(false, |c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().iter().all(|&e| e == 0))
    }

    fn insert_term(&mut self, exps: Vec<u32>, c: BigInt, ch: Char) {
        let c = reduce_coeff(&c, ch);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = reduce_coeff(&(o.get() + &c), ch);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &ParamPoly, ch: Char) -> ParamPoly {
        assert_eq!(self.arity, rhs.arity);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_term(e.clone(), c.clone(), ch);
        }
        out
    }

    pub fn neg(&self, ch: Char) -> ParamPoly {
        let mut out = ParamPoly::zero(self.arity);
        for (e, c) in &self.terms {
            out.insert_term(e.clone(), -c, ch);
        }
        out
    }

    pub fn sub(&self, rhs: &ParamPoly, ch: Char) -> ParamPoly {
        self.add(&rhs.neg(ch), ch)
    }

    pub fn mul(&self, rhs: &ParamPoly, ch: Char) -> ParamPoly {
        assert_eq!(self.arity, rhs.arity);
        let mut out = ParamPoly::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_term(e, ca * cb, ch);
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &BigInt, ch: Char) -> ParamPoly {
        let mut out = ParamPoly::zero(self.arity);
        for (e, a) in &self.terms {
            out.insert_term(e.clone(), a * c, ch);
        }
        out
    }

    pub fn pow(&self, n: u32, ch: Char) -> ParamPoly {
        let mut out = ParamPoly::one(self.arity);
        for _ in 0..n {
            out = out.mul(self, ch);
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|e| e[idx]).max().unwrap_or(0)
    }

    /// graded-lex maximal exponent vector
    pub fn leading_exponents(&self) -> Option<&Vec<u32>> {
        self.terms.keys().max_by(|a, b| grlex(a, b))
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.leading_exponents().map(|e| self.terms.get(e).unwrap())
    }

    /// map every exponent vector through f (used for root adjunction embeddings)
    pub fn map_exponents(&self, f: impl Fn(&[u32]) -> Vec<u32>) -> ParamPoly {
        let mut out = ParamPoly::zero(self.arity);
        for (e, c) in &self.terms {
            let e2 = f(e);
            assert_eq!(e2.len(), self.arity);
            let prev = out.terms.insert(e2, c.clone());
            assert!(prev.is_none(), "exponent map must be injective");
        }
        out
    }

    /// integer content (char 0); always positive, 0 for the zero polynomial
    pub fn int_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_int(&self, d: &BigInt) -> ParamPoly {
        let mut out = ParamPoly::zero(self.arity);
        for (e, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            assert!(r.is_zero(), "inexact integer division");
            out.terms.insert(e.clone(), q);
        }
        out
    }

    /// exact division; None if not divisible
    pub fn div_exact(&self, rhs: &ParamPoly, ch: Char) -> Option<ParamPoly> {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        assert_eq!(self.arity, rhs.arity);
        let mut rem = self.clone();
        let mut quo = ParamPoly::zero(self.arity);
        let lead_b = rhs.leading_exponents().unwrap().clone();
        let lc_b = rhs.terms[&lead_b].clone();
        while !rem.is_zero() {
            let lead_r = rem.leading_exponents().unwrap().clone();
            if !lead_b.iter().zip(&lead_r).all(|(b, r)| b <= r) {
                return None;
            }
            let e: Vec<u32> = lead_r.iter().zip(&lead_b).map(|(r, b)| r - b).collect();
            let lc_r = rem.terms[&lead_r].clone();
            let c = match ch {
                Char::Zero => {
                    let (q, r) = lc_r.div_rem(&lc_b);
                    if !r.is_zero() {
                        return None;
                    }
                    q
                }
                Char::P(p) => {
                    let inv = mod_inverse(&lc_b, p)?;
                    reduce_coeff(&(&lc_r * inv), ch)
                }
            };
            let mut t = ParamPoly::zero(self.arity);
            t.terms.insert(e, c);
            rem = rem.sub(&t.mul(rhs, ch), ch);
            quo = quo.add(&t, ch);
        }
        Some(quo)
    }

    /// content with respect to all but the given variable: gcd of the
    /// univariate-view coefficients
    fn content_wrt(&self, var: usize, ch: Char) -> ParamPoly {
        let view = self.univar_view(var);
        let mut g = ParamPoly::zero(self.arity);
        for c in view.values() {
            g = gcd_poly(&g, c, ch);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// view as univariate in `var`: degree -> coefficient poly (var-exponent zeroed)
    fn univar_view(&self, var: usize) -> BTreeMap<u32, ParamPoly> {
        let mut view: BTreeMap<u32, ParamPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let d = e[var];
            let mut e2 = e.clone();
            e2[var] = 0;
            view.entry(d)
                .or_insert_with(|| ParamPoly::zero(self.arity))
                .terms
                .insert(e2, c.clone());
        }
        view
    }

    fn from_univar_view(arity: usize, view: &BTreeMap<u32, ParamPoly>, var: usize, ch: Char) -> ParamPoly {
        let mut out = ParamPoly::zero(arity);
        for (d, c) in view {
            for (e, q) in &c.terms {
                let mut e2 = e.clone();
                e2[var] += d;
                out.insert_term(e2, q.clone(), ch);
            }
        }
        out
    }
}

pub fn grlex(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u64 = a.iter().map(|&x| x as u64).sum();
    let db: u64 = b.iter().map(|&x| x as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

pub fn mod_inverse(a: &BigInt, p: u64) -> Option<BigInt> {
    let m = BigInt::from(p);
    let a = a.mod_floor(&m);
    if a.is_zero() {
        return None;
    }
    Some(a.modpow(&BigInt::from(p - 2), &m))
}

/// pseudo-remainder of a by b in the main variable `var`:
/// lc(b)^(da-db+1) * a  reduced by b until degree drops below deg b
fn pseudo_rem(a: &ParamPoly, b: &ParamPoly, var: usize, ch: Char) -> ParamPoly {
    let arity = a.arity;
    let db = b.degree_in(var);
    let b_view = b.univar_view(var);
    let lc_b = b_view[&db].clone();
    let mut r = a.clone();
    loop {
        let dr = r.degree_in(var);
        if r.is_zero() || dr < db {
            return r;
        }
        let r_view = r.univar_view(var);
        let lc_r = r_view[&dr].clone();
        // r := lc_b * r - lc_r * x^(dr-db) * b
        let mut shift_b = BTreeMap::new();
        for (d, c) in &b_view {
            shift_b.insert(d + dr - db, c.mul(&lc_r, ch));
        }
        let shifted = ParamPoly::from_univar_view(arity, &shift_b, var, ch);
        r = r.mul(&lc_b, ch).sub(&shifted, ch);
        debug_assert!(r.is_zero() || r.degree_in(var) < dr);
    }
}

/// gcd in Z[t..] (char 0) or Fp[t..] (char p), deterministically normalized:
/// char 0 -> primitive with positive graded-lex leading coefficient,
/// char p -> graded-lex leading coefficient 1
pub fn gcd_poly(a: &ParamPoly, b: &ParamPoly, ch: Char) -> ParamPoly {
    assert_eq!(a.arity, b.arity);
    if a.is_zero() {
        return normalize_gcd(b.clone(), ch);
    }
    if b.is_zero() {
        return normalize_gcd(a.clone(), ch);
    }
    if a.is_constant() || b.is_constant() {
        return match ch {
            Char::Zero => {
                let g = a.int_content().gcd(&b.int_content());
                ParamPoly::constant(a.arity, g, ch)
            }
            Char::P(_) => ParamPoly::one(a.arity),
        };
    }
    // pick the main variable: lowest index occurring in either
    let var = (0..a.arity)
        .find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0)
        .unwrap();
    if a.degree_in(var) == 0 || b.degree_in(var) == 0 {
        // main variable missing from one side: gcd divides its content
        let (with_var, without) = if a.degree_in(var) == 0 { (b, a) } else { (a, b) };
        let cont = with_var.content_wrt(var, ch);
        return gcd_poly(&cont, without, ch);
    }
    let cont_a = a.content_wrt(var, ch);
    let cont_b = b.content_wrt(var, ch);
    let g_cont = gcd_poly(&cont_a, &cont_b, ch);
    let mut pa = a.div_exact(&cont_a, ch).expect("content divides");
    let mut pb = b.div_exact(&cont_b, ch).expect("content divides");
    if pa.degree_in(var) < pb.degree_in(var) {
        std::mem::swap(&mut pa, &mut pb);
    }
    // primitive PRS
    while !pb.is_zero() {
        let r = pseudo_rem(&pa, &pb, var, ch);
        pa = pb;
        pb = if r.is_zero() {
            r
        } else {
            let c = r.content_wrt(var, ch);
            r.div_exact(&c, ch).expect("content divides")
        };
    }
    let pp = {
        let c = pa.content_wrt(var, ch);
        pa.div_exact(&c, ch).expect("content divides")
    };
    normalize_gcd(g_cont.mul(&pp, ch), ch)
}

fn normalize_gcd(g: ParamPoly, ch: Char) -> ParamPoly {
    if g.is_zero() {
        return g;
    }
    match ch {
        Char::Zero => {
            let mut c = g.int_content();
            if g.leading_coeff().unwrap().is_negative() {
                c = -c;
            }
            g.div_int(&c)
        }
        Char::P(p) => {
            let lc = g.leading_coeff().unwrap().clone();
            let inv = mod_inverse(&lc, p).expect("nonzero leading coefficient");
            g.mul_scalar(&inv, ch)
        }
    }
}
