//! Point sampling over small finite fields: GF(p^j) arithmetic on
//! u64-encoded elements, brute-force enumeration of variety points with
//! Galois-orbit and cone-scaling dedup, and a truncated Hilbert-Samuel
//! engine for ideals translated to sampled points.

use std::collections::{BTreeMap, HashMap};

use crate::graded::{count_monomials_of_degree, monomials_of_degree};
use crate::intpoly::Char;
use crate::poly::{Poly, Ring};
use crate::{Error, Result};

/// One sampled closed point (a Galois-orbit representative).  Coordinates
/// are GF(p^level) elements encoded as base-p digit strings: the digit of
/// p^i is the coefficient of g^i for the canonical generator g.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScanPoint {
    pub level: u32,
    pub coords: Vec<u64>,
    pub in_stratum: bool,
}

// --- GF(p^j) ------------------------------------------------------------------

/// GF(p^j) modulo the lexicographically smallest irreducible monic
/// polynomial of degree j over the prime field.
pub(crate) struct Gf {
    pub p: u64,
    pub j: u32,
    q: u64,
    /// monic modulus, coefficients low to high
    modulus: Vec<u64>,
    mul_table: Option<Vec<u64>>,
    inv_table: Option<Vec<u64>>,
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod_p(mut a: u64, mut e: u64, p: u64) -> u64 {
    a %= p;
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    pow_mod_p(a, p - 2, p)
}

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (k, &y) in b.iter().enumerate() {
            prod[i + k] = (prod[i + k] + x * y) % p;
        }
    }
    let deg_m = m.len() - 1;
    for d in (deg_m..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for k in 0..deg_m {
            prod[d - deg_m + k] = (prod[d - deg_m + k] + c * (p - m[k] % p)) % p;
        }
    }
    poly_trim(&mut prod);
    prod
}

/// x^(p^e) mod m by repeated squaring
fn poly_frob_power(m: &[u64], p: u64, e: u32) -> Vec<u64> {
    let mut r = vec![0, 1];
    let exponent = p.pow(e);
    let mut x = r.clone();
    let mut rem = exponent;
    r = vec![1];
    while rem > 0 {
        if rem & 1 == 1 {
            r = poly_mulmod(&r, &x, m, p);
        }
        x = poly_mulmod(&x, &x, m, p);
        rem >>= 1;
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let lead_inv = inv_mod_p(*b.last().unwrap(), p);
        while a.len() >= b.len() && !a.is_empty() {
            let shift = a.len() - b.len();
            let f = a.last().unwrap() * lead_inv % p;
            if f != 0 {
                for (k, &bk) in b.iter().enumerate() {
                    a[shift + k] = (a[shift + k] + f * (p - bk % p)) % p;
                }
            }
            poly_trim(&mut a);
            if a.len() < b.len() {
                break;
            }
            if *a.last().unwrap() == 0 {
                poly_trim(&mut a);
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn poly_is_irreducible(m: &[u64], p: u64) -> bool {
    let j = (m.len() - 1) as u32;
    let x = vec![0u64, 1];
    // x^(p^j) must be the identity map on the residue ring
    if poly_frob_power(m, p, j) != x {
        return false;
    }
    // no factor of degree j/d for any prime d | j
    let mut rem = j;
    let mut d = 2;
    while d <= rem {
        if rem % d == 0 {
            let mut r = poly_frob_power(m, p, j / d);
            // r - x
            if r.len() < 2 {
                r.resize(2, 0);
            }
            r[1] = (r[1] + p - 1) % p;
            poly_trim(&mut r);
            let g = poly_gcd(&r, m, p);
            if g.len() > 1 {
                return false;
            }
            while rem % d == 0 {
                rem /= d;
            }
        }
        d += 1;
    }
    true
}

impl Gf {
    pub fn new(p: u64, j: u32) -> Result<Gf> {
        if !is_small_prime(p) {
            return Err(Error::Domain("characteristic must be a small prime".into()));
        }
        if j == 0 || j > 12 {
            return Err(Error::Domain("extension degree out of range".into()));
        }
        let q = p.checked_pow(j).filter(|&q| q <= 1_000_000_000).ok_or_else(|| {
            Error::Unsupported("field too large for point enumeration".into())
        })?;
        let modulus = if j == 1 {
            vec![0, 1]
        } else {
            let mut found = None;
            for low in 0..q {
                let mut m = decode_base(low, p, j as usize);
                m.push(1);
                if poly_is_irreducible(&m, p) {
                    found = Some(m);
                    break;
                }
            }
            found.expect("an irreducible polynomial of each degree exists")
        };
        let mut gf = Gf { p, j, q, modulus, mul_table: None, inv_table: None };
        if q <= 1024 {
            let mut mt = vec![0u64; (q * q) as usize];
            for a in 0..q {
                for b in a..q {
                    let v = gf.raw_mul(a, b);
                    mt[(a * q + b) as usize] = v;
                    mt[(b * q + a) as usize] = v;
                }
            }
            gf.mul_table = Some(mt);
            let mut it = vec![0u64; q as usize];
            for a in 1..q {
                it[a as usize] = gf.pow(a, q - 2);
            }
            gf.inv_table = Some(it);
        }
        Ok(gf)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    fn raw_mul(&self, a: u64, b: u64) -> u64 {
        if self.j == 1 {
            return a * b % self.p;
        }
        let av = decode_base(a, self.p, self.j as usize);
        let bv = decode_base(b, self.p, self.j as usize);
        let prod = poly_mulmod(&av, &bv, &self.modulus, self.p);
        encode_base(&prod, self.p)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.j == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b, mut out, mut scale) = (a, b, 0u64, 1u64);
        for _ in 0..self.j {
            out += (a % self.p + b % self.p) % self.p * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.j == 1 {
            return (self.p - a) % self.p;
        }
        let (mut a, mut out, mut scale) = (a, 0u64, 1u64);
        for _ in 0..self.j {
            out += (self.p - a % self.p) % self.p * scale;
            a /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match &self.mul_table {
            Some(t) => t[(a * self.q + b) as usize],
            None => self.raw_mul(a, b),
        }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        match &self.inv_table {
            Some(t) => t[a as usize],
            None => self.pow(a, self.q - 2),
        }
    }

    pub fn frob(&self, a: u64) -> u64 {
        self.pow(a, self.p)
    }
}

fn decode_base(mut v: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    for slot in out.iter_mut() {
        *slot = v % p;
        v /= p;
    }
    out
}

fn encode_base(v: &[u64], p: u64) -> u64 {
    let mut out = 0;
    for &d in v.iter().rev() {
        out = out * p + d;
    }
    out
}

// --- polynomials with GF coefficients -------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct GfPoly {
    /// sorted exponent vectors with nonzero encoded coefficients
    pub terms: Vec<(Vec<u32>, u64)>,
}

impl GfPoly {
    /// Conversion from an exact polynomial over a prime field; prime-field
    /// elements encode as themselves at every extension level.
    pub fn from_poly(f: &Poly) -> Result<GfPoly> {
        let mut terms = vec![];
        for (e, c) in f.terms() {
            let v = c.as_fp().ok_or_else(|| {
                Error::Unsupported("scan coefficients must lie in the prime field".into())
            })?;
            if v != 0 {
                terms.push((e.clone(), v));
            }
        }
        Ok(GfPoly { terms })
    }

    pub fn order(&self) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e.iter().sum()).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        let degs: Vec<u32> = self.terms.iter().map(|(e, _)| e.iter().sum()).collect();
        degs.windows(2).all(|w| w[0] == w[1])
    }

    pub fn eval(&self, gf: &Gf, point: &[u64]) -> u64 {
        let mut s = 0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 && t != 0 {
                    t = gf.mul(t, gf.pow(point[i], ei as u64));
                }
            }
            s = gf.add(s, t);
        }
        s
    }

    /// f(x + a), exact over GF
    pub fn translate(&self, gf: &Gf, point: &[u64]) -> GfPoly {
        let maxe = self
            .terms
            .iter()
            .flat_map(|(e, _)| e.iter())
            .copied()
            .max()
            .unwrap_or(0) as usize;
        let mut binom = vec![vec![0u64; maxe + 1]; maxe + 1];
        for i in 0..=maxe {
            binom[i][0] = 1;
            for k in 1..=i {
                binom[i][k] = (binom[i - 1][k - 1] + binom[i - 1][k]) % gf.p;
            }
        }
        let mut acc: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut partial: Vec<(Vec<u32>, u64)> = vec![(vec![], *c)];
            for (i, &ei) in e.iter().enumerate() {
                let ai = point[i];
                if ai == 0 {
                    for (exps, _) in partial.iter_mut() {
                        exps.push(ei);
                    }
                    continue;
                }
                let mut pw = vec![1u64; ei as usize + 1];
                for k in 1..=ei as usize {
                    pw[k] = gf.mul(pw[k - 1], ai);
                }
                let mut next = vec![];
                for (exps, coef) in &partial {
                    for k in 0..=ei as usize {
                        let b = binom[ei as usize][k];
                        if b == 0 {
                            continue;
                        }
                        let factor = gf.mul(gf.mul(*coef, b), pw[ei as usize - k]);
                        if factor == 0 {
                            continue;
                        }
                        let mut e2 = exps.clone();
                        e2.push(k as u32);
                        next.push((e2, factor));
                    }
                }
                partial = next;
            }
            for (exps, coef) in partial {
                let slot = acc.entry(exps).or_insert(0);
                *slot = gf.add(*slot, coef);
            }
        }
        GfPoly { terms: acc.into_iter().filter(|(_, c)| *c != 0).collect() }
    }
}

// --- truncated Hilbert-Samuel over GF -----------------------------------------

fn insert_row(gf: &Gf, basis: &mut Vec<(usize, Vec<u64>)>, mut row: Vec<u64>) {
    for (pc, pr) in basis.iter() {
        let f = row[*pc];
        if f != 0 {
            for c in *pc..row.len() {
                if pr[c] != 0 {
                    row[c] = gf.sub(row[c], gf.mul(f, pr[c]));
                }
            }
        }
    }
    let Some(lead) = row.iter().position(|&x| x != 0) else { return };
    let inv = gf.inv(row[lead]);
    for c in lead..row.len() {
        if row[c] != 0 {
            row[c] = gf.mul(inv, row[c]);
        }
    }
    basis.push((lead, row));
    basis.sort_by_key(|(c, _)| *c);
}

/// dim m^n/m^(n+1) of GF[x]/I at the origin for n <= bound; columns are
/// monomials by ascending degree, rows the generator multiples
pub(crate) fn gf_hs_origin(gf: &Gf, nvars: usize, gens: &[GfPoly], bound: u32) -> Vec<u64> {
    let mut cols: Vec<Vec<u32>> = vec![];
    let mut degree_of: Vec<u32> = vec![];
    for d in 0..=bound {
        for m in monomials_of_degree(nvars, d) {
            degree_of.push(d);
            cols.push(m);
        }
    }
    let index: HashMap<&Vec<u32>, usize> =
        cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let width = cols.len();
    let mut basis: Vec<(usize, Vec<u64>)> = vec![];
    for g in gens {
        let Some(ord) = g.order() else { continue };
        if ord > bound {
            continue;
        }
        for d in 0..=(bound - ord) {
            for m in monomials_of_degree(nvars, d) {
                let mut row = vec![0u64; width];
                let mut nonzero = false;
                for (e, c) in &g.terms {
                    let shifted: Vec<u32> = e.iter().zip(&m).map(|(a, b)| a + b).collect();
                    let deg: u32 = shifted.iter().sum();
                    if deg <= bound {
                        row[index[&shifted]] = *c;
                        nonzero = true;
                    }
                }
                if nonzero {
                    insert_row(gf, &mut basis, row);
                }
            }
        }
    }
    let mut pivots = vec![0u64; bound as usize + 1];
    for (c, _) in &basis {
        pivots[degree_of[*c] as usize] += 1;
    }
    (0..=bound)
        .map(|d| count_monomials_of_degree(nvars, d) - pivots[d as usize])
        .collect()
}

/// truncated HS agreement with staged early exit at shallow truncations
fn hs_prefix_matches(gf: &Gf, nvars: usize, gens: &[GfPoly], origin: &[u64], bound: u32) -> bool {
    for d in [2u32, 4, 8] {
        if d >= bound {
            break;
        }
        let hs = gf_hs_origin(gf, nvars, gens, d);
        if hs[..] != origin[..=d as usize] {
            return false;
        }
    }
    gf_hs_origin(gf, nvars, gens, bound) == origin
}

// --- variety scans --------------------------------------------------------------

pub(crate) struct VarietyScan {
    pub points: Vec<ScanPoint>,
    pub all_in_stratum: bool,
    pub origin_hs: Vec<u64>,
}

/// Enumerate the GF(p^j)-points of V(gens) for j up to max_level, dedup by
/// Galois orbit (and scaling, for cones), and compare each point's truncated
/// local HS with the origin's.
pub(crate) fn scan_variety(
    ring: &Ring,
    gens: &[Poly],
    max_level: u32,
    boxlim: Option<u64>,
    bound: u32,
) -> Result<VarietyScan> {
    let p = match (ring.field().characteristic(), ring.field().arity()) {
        (Char::P(p), 0) => p,
        _ => {
            return Err(Error::Unsupported(
                "point enumeration is only supported over prime finite fields".into(),
            ))
        }
    };
    if max_level == 0 {
        return Err(Error::Domain("the extension level must be at least 1".into()));
    }
    let n = ring.nvars();
    let base: Vec<GfPoly> = gens.iter().map(GfPoly::from_poly).collect::<Result<_>>()?;
    for (i, g) in base.iter().enumerate() {
        if g.terms.is_empty() {
            return Err(Error::Domain(format!("generator {} is zero", i + 1)));
        }
        if g.order() == Some(0) {
            return Err(Error::Domain("the origin is not on the variety".into()));
        }
    }
    let homogeneous = base.iter().all(|g| g.is_homogeneous());
    let mut points = vec![ScanPoint { level: 1, coords: vec![0; n], in_stratum: true }];
    let mut all_in = true;
    let mut origin_level1: Option<Vec<u64>> = None;
    for j in 1..=max_level {
        let gf = Gf::new(p, j)?;
        let limit = boxlim.map_or(gf.q(), |b| b.min(gf.q()));
        if limit == 0 {
            return Err(Error::Domain("empty coordinate box".into()));
        }
        let mut space: u128 = 1;
        for _ in 0..n {
            space = space.saturating_mul(limit as u128);
        }
        if space > 50_000_000 {
            return Err(Error::Unsupported(format!(
                "scan space of {space} points at level {j} is too large"
            )));
        }
        let origin_hs = gf_hs_origin(&gf, n, &base, bound);
        match &origin_level1 {
            None => origin_level1 = Some(origin_hs.clone()),
            Some(h) => {
                if *h != origin_hs {
                    return Err(Error::Domain(
                        "internal: origin HS values changed under base field extension".into(),
                    ));
                }
            }
        }
        let mut memo: HashMap<Vec<GfPoly>, bool> = HashMap::new();
        let mut coords = vec![0u64; n];
        loop {
            if visit_point(&gf, n, &base, homogeneous, j, &coords) {
                let translated: Vec<GfPoly> =
                    base.iter().map(|g| g.translate(&gf, &coords)).collect();
                let inside = *memo
                    .entry(translated)
                    .or_insert_with_key(|k| hs_prefix_matches(&gf, n, k, &origin_hs, bound));
                all_in &= inside;
                points.push(ScanPoint { level: j, coords: coords.clone(), in_stratum: inside });
            }
            let mut i = n;
            let mut done = true;
            while i > 0 {
                i -= 1;
                coords[i] += 1;
                if coords[i] < limit {
                    done = false;
                    break;
                }
                coords[i] = 0;
            }
            if done {
                break;
            }
        }
    }
    points.sort();
    Ok(VarietyScan {
        points,
        all_in_stratum: all_in,
        origin_hs: origin_level1.expect("at least one level scanned"),
    })
}

/// on-variety check plus dedup: skip the origin, non-representatives of
/// Galois orbits, points of a proper subfield, and (for cones) scalings
fn visit_point(gf: &Gf, n: usize, base: &[GfPoly], homogeneous: bool, j: u32, coords: &[u64]) -> bool {
    if coords.iter().all(|&c| c == 0) {
        return false;
    }
    if homogeneous {
        let first = coords.iter().find(|&&c| c != 0).unwrap();
        if *first != 1 {
            return false;
        }
    }
    if !base.iter().all(|g| g.eval(gf, coords) == 0) {
        return false;
    }
    let mut orbit_size = 1u32;
    let mut cur: Vec<u64> = coords.iter().map(|&c| gf.frob(c)).collect();
    while cur[..] != coords[..] {
        if cur[..] < coords[..] {
            return false;
        }
        cur = cur.iter().map(|&c| gf.frob(c)).collect();
        orbit_size += 1;
        assert!(orbit_size <= j, "Frobenius orbit exceeded the field degree");
    }
    let _ = n;
    orbit_size == j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::graded::hs_origin_truncated;

    #[test]
    fn test_gf4_arithmetic() {
        let gf = Gf::new(2, 2).unwrap();
        // modulus x^2 + x + 1; encoding: 2 = g, 3 = g + 1
        assert_eq!(gf.modulus, vec![1, 1, 1]);
        assert_eq!(gf.mul(2, 2), 3); // g^2 = g + 1
        assert_eq!(gf.mul(2, 3), 1); // g (g + 1) = g^2 + g = 1
        assert_eq!(gf.add(2, 3), 1);
        for a in 1..4 {
            assert_eq!(gf.mul(a, gf.inv(a)), 1);
        }
        assert_eq!(gf.frob(2), 3); // conjugate
        assert_eq!(gf.frob(gf.frob(2)), 2);
    }

    #[test]
    fn test_gf8_and_gf9_moduli() {
        let gf8 = Gf::new(2, 3).unwrap();
        assert_eq!(gf8.modulus, vec![1, 1, 0, 1]); // x^3 + x + 1
        let gf9 = Gf::new(3, 2).unwrap();
        assert_eq!(gf9.modulus, vec![1, 0, 1]); // x^2 + 1
        for a in 1..9 {
            assert_eq!(gf9.mul(a, gf9.inv(a)), 1);
            // Frobenius has order 2
            assert_eq!(gf9.frob(gf9.frob(a)), a);
        }
        // multiplicative order of the full group
        for a in 2..8 {
            assert_eq!(gf8.pow(a, 7), 1);
        }
    }

    #[test]
    fn test_gf_hs_matches_exact_engine_level_one() {
        for (p, exprs) in [
            (2u64, vec!["x*y"]),
            (2, vec!["x^2", "y^2"]),
            (3, vec!["x^2 + y*z"]),
            (3, vec!["x^3 - y^2*z"]),
        ] {
            let names = ["x", "y", "z"];
            let ring = Ring::new(Field::finite(p).unwrap(), &names).unwrap();
            let gens: Vec<Poly> =
                exprs.iter().map(|e| ring.parse_expr(e, 0, 0).unwrap()).collect();
            let exact = hs_origin_truncated(&ring, &gens, 6).unwrap();
            let gf = Gf::new(p, 1).unwrap();
            let gfgens: Vec<GfPoly> =
                gens.iter().map(|g| GfPoly::from_poly(g).unwrap()).collect();
            assert_eq!(gf_hs_origin(&gf, 3, &gfgens, 6), exact.values);
        }
    }

    #[test]
    fn test_gf_translate_matches_exact_engine() {
        let ring = Ring::new(Field::finite(5).unwrap(), &["x", "y"]).unwrap();
        let f = ring.parse_expr("x^3 + 2*x*y + y^2 + 4*y", 0, 0).unwrap();
        let gf = Gf::new(5, 1).unwrap();
        let gfp = GfPoly::from_poly(&f).unwrap();
        for a in 0..5u64 {
            for b in 0..5u64 {
                let point = vec![
                    ring.field().from_int(a as i64),
                    ring.field().from_int(b as i64),
                ];
                let images: Vec<Poly> = (0..2)
                    .map(|i| ring.var(i).add(&ring.constant(point[i].clone())))
                    .collect();
                let shifted = f.substitute(&ring, &images);
                let expected = GfPoly::from_poly(&shifted).unwrap();
                assert_eq!(gfp.translate(&gf, &[a, b]), expected);
            }
        }
    }

    #[test]
    fn test_origin_hs_stable_across_levels() {
        let ring = Ring::new(Field::finite(2).unwrap(), &["x", "y", "z"]).unwrap();
        let gens = vec![ring.parse_expr("x*y + z^2", 0, 0).unwrap()];
        let gfgens: Vec<GfPoly> =
            gens.iter().map(|g| GfPoly::from_poly(g).unwrap()).collect();
        let base = gf_hs_origin(&Gf::new(2, 1).unwrap(), 3, &gfgens, 5);
        for j in 2..=3 {
            assert_eq!(gf_hs_origin(&Gf::new(2, j).unwrap(), 3, &gfgens, 5), base);
        }
    }

    #[test]
    fn test_scan_crossing_lines_stratum_is_origin() {
        let ring = Ring::new(Field::finite(3).unwrap(), &["x", "y"]).unwrap();
        let gens = vec![ring.parse_expr("x*y", 0, 0).unwrap()];
        let scan = scan_variety(&ring, &gens, 1, None, 6).unwrap();
        assert!(!scan.all_in_stratum);
        let stratum: Vec<&ScanPoint> =
            scan.points.iter().filter(|pt| pt.in_stratum).collect();
        assert_eq!(stratum.len(), 1);
        assert_eq!(stratum[0].coords, vec![0, 0]);
        // scaled reps of the two lines are sampled
        assert!(scan.points.len() > 1);
    }

    #[test]
    fn test_scan_multiple_hyperplane_constant() {
        let ring = Ring::new(Field::finite(2).unwrap(), &["x", "y"]).unwrap();
        let gens = vec![ring.parse_expr("(x + y)^4", 0, 0).unwrap()];
        let scan = scan_variety(&ring, &gens, 2, None, 6).unwrap();
        assert!(scan.all_in_stratum);
        for pt in &scan.points {
            let gf = Gf::new(2, pt.level).unwrap();
            assert_eq!(gf.add(pt.coords[0], pt.coords[1]), 0);
        }
        // the level-2 representative (1, 1) is trivial; (1, g) is off the
        // variety, so only prime-field reps remain
        assert!(scan.points.iter().all(|pt| pt.in_stratum));
    }

    #[test]
    fn test_scan_hyperplane_all_regular() {
        let ring = Ring::new(Field::finite(2).unwrap(), &["x", "y", "z"]).unwrap();
        let gens = vec![ring.parse_expr("x", 0, 0).unwrap()];
        let scan = scan_variety(&ring, &gens, 2, None, 4).unwrap();
        assert!(scan.all_in_stratum);
        assert!(scan.points.len() > 3);
    }

    #[test]
    fn test_scan_rejects_rationals() {
        let ring = Ring::new(Field::rationals(), &["x", "y"]).unwrap();
        let gens = vec![ring.parse_expr("x*y", 0, 0).unwrap()];
        assert!(matches!(
            scan_variety(&ring, &gens, 1, None, 4),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn test_scan_galois_dedup_counts() {
        // the graph x = y^2 over GF(4): level 2 has the conjugate pair
        // (g + 1, g) and (g, g + 1); only the lex-min rep survives
        let ring = Ring::new(Field::finite(2).unwrap(), &["x", "y"]).unwrap();
        let gens = vec![ring.parse_expr("x - y^2", 0, 0).unwrap()];
        let scan = scan_variety(&ring, &gens, 2, None, 4).unwrap();
        let level2: Vec<_> = scan.points.iter().filter(|pt| pt.level == 2).collect();
        assert_eq!(level2.len(), 1);
        assert_eq!(level2[0].coords, vec![2, 3]);

        // for a cone the scaling dedup absorbs every level-2 point of a
        // rational line into its level-1 representative
        let cone = vec![ring.parse_expr("x", 0, 0).unwrap()];
        let cscan = scan_variety(&ring, &cone, 2, None, 3).unwrap();
        assert!(cscan.points.iter().all(|pt| pt.level == 1));
    }
}
