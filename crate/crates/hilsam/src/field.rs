//! Coefficient fields: Q, Fp, and fraction fields Fp(t1..ts) / Q(t1..ts).
//!
//! Function-field elements are kept in a canonical fraction form (coprime
//! numerator/denominator, fixed leading normalization) so equality is
//! syntactic. Parameters can carry a "perfection level": level l stands for
//! the p^l-th root of the original parameter, written t', t'', ...

use crate::intpoly::{gcd_poly, grlex, mod_inverse, Char, ParamPoly};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamInfo {
    pub name: String,
    pub level: u32,
}

impl ParamInfo {
    pub fn display_name(&self) -> String {
        let mut s = self.name.clone();
        for _ in 0..self.level {
            s.push('\'');
        }
        s
    }
}

#[derive(Debug, PartialEq, Eq)]
struct FieldInner {
    ch: Char,
    params: Vec<ParamInfo>,
}

/// Field descriptor. Cheap to clone; equality is structural.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Field {}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn rationals() -> Field {
        Field(Arc::new(FieldInner { ch: Char::Zero, params: vec![] }))
    }

    pub fn finite(p: u64) -> Result<Field> {
        if p >= 1 << 31 {
            return Err(Error::Domain(format!("prime {p} too large (need < 2^31)")));
        }
        if !is_small_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        Ok(Field(Arc::new(FieldInner { ch: Char::P(p), params: vec![] })))
    }

    /// Fraction field over Q (char 0) or Fp (char p) in the named parameters.
    pub fn fraction_field(ch: Char, names: &[&str]) -> Result<Field> {
        if names.is_empty() {
            return Err(Error::Domain("fraction field needs at least one parameter".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for n in names {
            if n.is_empty() || !n.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::Domain(format!("invalid parameter name `{n}`")));
            }
            if !seen.insert(*n) {
                return Err(Error::Domain(format!("duplicate parameter name `{n}`")));
            }
        }
        if let Char::P(p) = ch {
            if p >= 1 << 31 || !is_small_prime(p) {
                return Err(Error::Domain(format!("bad characteristic {p}")));
            }
        }
        Ok(Field(Arc::new(FieldInner {
            ch,
            params: names.iter().map(|n| ParamInfo { name: n.to_string(), level: 0 }).collect(),
        })))
    }

    pub fn characteristic(&self) -> Char {
        self.0.ch
    }

    pub fn params(&self) -> &[ParamInfo] {
        &self.0.params
    }

    pub fn arity(&self) -> usize {
        self.0.params.len()
    }

    fn make(ch: Char, params: Vec<ParamInfo>) -> Field {
        Field(Arc::new(FieldInner { ch, params }))
    }

    pub fn zero(&self) -> FieldElement {
        self.from_bigint(BigInt::zero())
    }

    pub fn one(&self) -> FieldElement {
        self.from_bigint(BigInt::one())
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(&self, n: BigInt) -> FieldElement {
        let repr = match (self.0.ch, self.arity()) {
            (Char::P(p), 0) => Repr::Fp(bigint_mod_u64(&n, p)),
            (Char::Zero, 0) => Repr::Rat(BigRational::from_integer(n)),
            (ch, s) => Repr::Frac {
                num: ParamPoly::constant(s, n, ch),
                den: ParamPoly::one(s),
            },
        };
        FieldElement { field: self.clone(), repr }
    }

    pub fn param(&self, name: &str) -> Result<FieldElement> {
        let idx = self
            .0
            .params
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        Ok(FieldElement {
            field: self.clone(),
            repr: Repr::Frac {
                num: ParamPoly::var(self.arity(), idx),
                den: ParamPoly::one(self.arity()),
            },
        })
    }

    /// Replace each parameter t by a p^e-th root t~ with t = t~^(p^e).
    pub fn adjoin_parameter_roots(&self, e: u32) -> Result<Field> {
        let p = self.0.ch.prime().ok_or_else(|| {
            Error::Domain("parameter roots require positive characteristic".into())
        })?;
        let _ = p;
        if self.arity() == 0 {
            return Err(Error::Domain("no parameters to adjoin roots of".into()));
        }
        let params = self
            .0
            .params
            .iter()
            .map(|q| ParamInfo { name: q.name.clone(), level: q.level + e })
            .collect();
        Ok(Field::make(self.0.ch, params))
    }

    /// Uniform level difference from self into target (same names, same char).
    pub fn level_step_to(&self, target: &Field) -> Result<u32> {
        if self.0.ch != target.0.ch || self.arity() != target.arity() {
            return Err(Error::Domain("incompatible fields".into()));
        }
        let mut step: Option<u32> = None;
        for (a, b) in self.0.params.iter().zip(&target.0.params) {
            if a.name != b.name || b.level < a.level {
                return Err(Error::Domain("incompatible parameter towers".into()));
            }
            let d = b.level - a.level;
            if *step.get_or_insert(d) != d {
                return Err(Error::Domain("non-uniform parameter tower".into()));
            }
        }
        Ok(step.unwrap_or(0))
    }

    /// Append fresh parameters (used to move free variables into the field).
    pub fn with_params_appended(&self, names: &[&str]) -> Result<Field> {
        let mut params = self.0.params.clone();
        for n in names {
            if params.iter().any(|p| p.name == *n) {
                return Err(Error::Domain(format!("parameter `{n}` already present")));
            }
            params.push(ParamInfo { name: n.to_string(), level: 0 });
        }
        Ok(Field::make(self.0.ch, params))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.ch {
            Char::Zero => write!(f, "Q")?,
            Char::P(p) => write!(f, "F{p}")?,
        }
        if !self.0.params.is_empty() {
            let names: Vec<String> = self.0.params.iter().map(|p| p.display_name()).collect();
            write!(f, "({})", names.join(","))?;
        }
        Ok(())
    }
}

fn bigint_mod_u64(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("reduced residue fits u64")
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Fp(u64),
    Rat(BigRational),
    Frac { num: ParamPoly, den: ParamPoly },
}

/// Element of a [`Field`], always held in canonical form.
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Field,
    repr: Repr,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.repr == other.repr
    }
}
impl Eq for FieldElement {}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Fp(v) => *v == 0,
            Repr::Rat(r) => r.is_zero(),
            Repr::Frac { num, .. } => num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Fp(v) => *v == 1,
            Repr::Rat(r) => r.is_one(),
            Repr::Frac { num, den } => num == den,
        }
    }

    fn check_same_field(&self, rhs: &FieldElement) {
        assert!(
            self.field == rhs.field,
            "field mismatch: {} vs {}",
            self.field,
            rhs.field
        );
    }

    fn frac_canonical(field: Field, num: ParamPoly, den: ParamPoly) -> FieldElement {
        let ch = field.characteristic();
        assert!(!den.is_zero(), "zero denominator escaped validation");
        if num.is_zero() {
            return FieldElement {
                field,
                repr: Repr::Frac { num, den: ParamPoly::one(den.arity) },
            };
        }
        let g = gcd_poly(&num, &den, ch);
        let mut num = num.div_exact(&g, ch).expect("gcd divides numerator");
        let mut den = den.div_exact(&g, ch).expect("gcd divides denominator");
        match ch {
            Char::Zero => {
                // contents are coprime after the gcd step; pin the sign
                if den.leading_coeff().unwrap().is_negative() {
                    num = num.mul_scalar(&BigInt::from(-1), ch);
                    den = den.mul_scalar(&BigInt::from(-1), ch);
                }
            }
            Char::P(p) => {
                let lc = den.leading_coeff().unwrap().clone();
                if !lc.is_one() {
                    let inv = mod_inverse(&lc, p).expect("nonzero leading coefficient");
                    num = num.mul_scalar(&inv, ch);
                    den = den.mul_scalar(&inv, ch);
                }
            }
        }
        FieldElement { field, repr: Repr::Frac { num, den } }
    }

    pub fn add(&self, rhs: &FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        let field = self.field.clone();
        let ch = field.characteristic();
        let repr = match (&self.repr, &rhs.repr) {
            (Repr::Fp(a), Repr::Fp(b)) => {
                let p = ch.prime().unwrap() as u128;
                Repr::Fp(((*a as u128 + *b as u128) % p) as u64)
            }
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a + b),
            (Repr::Frac { num: na, den: da }, Repr::Frac { num: nb, den: db }) => {
                let num = na.mul(db, ch).add(&nb.mul(da, ch), ch);
                let den = da.mul(db, ch);
                return FieldElement::frac_canonical(field, num, den);
            }
            _ => unreachable!("same field implies same representation"),
        };
        FieldElement { field, repr }
    }

    pub fn neg(&self) -> FieldElement {
        let field = self.field.clone();
        let ch = field.characteristic();
        let repr = match &self.repr {
            Repr::Fp(a) => {
                let p = ch.prime().unwrap();
                Repr::Fp(if *a == 0 { 0 } else { p - *a })
            }
            Repr::Rat(a) => Repr::Rat(-a),
            Repr::Frac { num, den } => Repr::Frac { num: num.neg(ch), den: den.clone() },
        };
        FieldElement { field, repr }
    }

    pub fn sub(&self, rhs: &FieldElement) -> FieldElement {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        let field = self.field.clone();
        let ch = field.characteristic();
        let repr = match (&self.repr, &rhs.repr) {
            (Repr::Fp(a), Repr::Fp(b)) => {
                let p = ch.prime().unwrap() as u128;
                Repr::Fp(((*a as u128 * *b as u128) % p) as u64)
            }
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a * b),
            (Repr::Frac { num: na, den: da }, Repr::Frac { num: nb, den: db }) => {
                return FieldElement::frac_canonical(field, na.mul(nb, ch), da.mul(db, ch));
            }
            _ => unreachable!("same field implies same representation"),
        };
        FieldElement { field, repr }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let field = self.field.clone();
        let ch = field.characteristic();
        Ok(match &self.repr {
            Repr::Fp(a) => {
                let p = ch.prime().unwrap();
                let inv = mod_inverse(&BigInt::from(*a), p).unwrap();
                FieldElement { field, repr: Repr::Fp(bigint_mod_u64(&inv, p)) }
            }
            Repr::Rat(a) => FieldElement { field, repr: Repr::Rat(a.recip()) },
            Repr::Frac { num, den } => {
                FieldElement::frac_canonical(field, den.clone(), num.clone())
            }
        })
    }

    pub fn div(&self, rhs: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, n: i64) -> Result<FieldElement> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut out = self.field.one();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// x -> x^p in characteristic p.
    pub fn frobenius(&self) -> FieldElement {
        let p = self
            .field
            .characteristic()
            .prime()
            .expect("frobenius requires positive characteristic");
        match &self.repr {
            Repr::Fp(_) => self.clone(),
            Repr::Frac { num, den } => {
                let scale =
                    |poly: &ParamPoly| poly.map_exponents(|e| e.iter().map(|&x| x * p as u32).collect());
                FieldElement {
                    field: self.field.clone(),
                    repr: Repr::Frac { num: scale(num), den: scale(den) },
                }
            }
            Repr::Rat(_) => unreachable!(),
        }
    }

    /// q-th root for q a power of the characteristic (q = 1 allowed anywhere).
    pub fn qth_power_root(&self, q: u64) -> Option<FieldElement> {
        if q == 1 {
            return Some(self.clone());
        }
        let p = self
            .field
            .characteristic()
            .prime()
            .expect("qth_power_root requires positive characteristic for q > 1");
        let mut qq = q;
        while qq > 1 {
            assert!(qq % p == 0, "q = {q} is not a power of the characteristic {p}");
            qq /= p;
        }
        match &self.repr {
            Repr::Fp(_) => Some(self.clone()), // Frobenius is the identity on Fp
            Repr::Frac { num, den } => {
                let unscale = |poly: &ParamPoly| -> Option<ParamPoly> {
                    for e in poly.terms.keys() {
                        if e.iter().any(|&x| x as u64 % q != 0) {
                            return None;
                        }
                    }
                    Some(poly.map_exponents(|e| e.iter().map(|&x| x / q as u32).collect()))
                };
                let num = unscale(num)?;
                let den = unscale(den)?;
                Some(FieldElement { field: self.field.clone(), repr: Repr::Frac { num, den } })
            }
            Repr::Rat(_) => unreachable!(),
        }
    }

    /// Write self = sum_r g_r^p * t^r over residue exponents 0 <= r < p.
    /// Only for characteristic p; the no-parameter case yields a single term.
    pub fn pth_root_components(&self) -> Vec<(Vec<u32>, FieldElement)> {
        let p = self
            .field
            .characteristic()
            .prime()
            .expect("pth_root_components requires positive characteristic");
        let ch = Char::P(p);
        match &self.repr {
            Repr::Fp(_) => vec![(vec![], self.clone())],
            Repr::Frac { num, den } => {
                if num.is_zero() {
                    return vec![];
                }
                // n/d = n * d^(p-1) / d^p and d^p is a p-th power termwise
                let n2 = num.mul(&den.pow(p as u32 - 1, ch), ch);
                let dd = den
                    .pow(p as u32, ch)
                    .map_exponents(|e| e.iter().map(|&x| x / p as u32).collect());
                let mut groups: BTreeMap<Vec<u32>, ParamPoly> = BTreeMap::new();
                for (e, c) in &n2.terms {
                    let r: Vec<u32> = e.iter().map(|&x| x % p as u32).collect();
                    let q: Vec<u32> = e.iter().map(|&x| x / p as u32).collect();
                    groups
                        .entry(r)
                        .or_insert_with(|| ParamPoly::zero(num.arity))
                        .terms
                        .insert(q, c.clone());
                }
                groups
                    .into_iter()
                    .map(|(r, g)| {
                        (r, FieldElement::frac_canonical(self.field.clone(), g, dd.clone()))
                    })
                    .collect()
            }
            Repr::Rat(_) => unreachable!(),
        }
    }

    /// Carry an element into the field with deeper parameter roots.
    pub fn embed_into(&self, target: &Field) -> Result<FieldElement> {
        let e = self.field.level_step_to(target)?;
        if e == 0 {
            return Ok(FieldElement { field: target.clone(), repr: self.repr.clone() });
        }
        let p = self.field.characteristic().prime().unwrap();
        let q = p.checked_pow(e).expect("root tower exponent overflow") as u32;
        match &self.repr {
            Repr::Frac { num, den } => {
                let scale = |poly: &ParamPoly| poly.map_exponents(|ex| ex.iter().map(|&x| x * q).collect());
                Ok(FieldElement {
                    field: target.clone(),
                    repr: Repr::Frac { num: scale(num), den: scale(den) },
                })
            }
            _ => Ok(FieldElement { field: target.clone(), repr: self.repr.clone() }),
        }
    }

    /// Expand an element of the root extension k' over the monomial basis
    /// {prod t~^r : 0 <= r < q} of k'/k, returning r -> coordinate in k.
    pub fn hull_expand(&self, base: &Field) -> Result<BTreeMap<Vec<u32>, FieldElement>> {
        let e = base.level_step_to(&self.field)?;
        if e == 0 {
            return Ok(BTreeMap::from([(
                vec![0; base.arity()],
                FieldElement { field: base.clone(), repr: self.repr.clone() },
            )]));
        }
        let p = base.characteristic().prime().unwrap();
        let q = p.checked_pow(e).expect("root tower exponent overflow") as u32;
        let ch = Char::P(p);
        match &self.repr {
            Repr::Frac { num, den } => {
                if num.is_zero() {
                    return Ok(BTreeMap::new());
                }
                let n2 = num.mul(&den.pow(q - 1, ch), ch);
                let dd = den.pow(q, ch).map_exponents(|ex| ex.iter().map(|&x| x / q).collect());
                let mut groups: BTreeMap<Vec<u32>, ParamPoly> = BTreeMap::new();
                for (ex, c) in &n2.terms {
                    let r: Vec<u32> = ex.iter().map(|&x| x % q).collect();
                    let w: Vec<u32> = ex.iter().map(|&x| x / q).collect();
                    groups
                        .entry(r)
                        .or_insert_with(|| ParamPoly::zero(num.arity))
                        .terms
                        .insert(w, c.clone());
                }
                Ok(groups
                    .into_iter()
                    .map(|(r, g)| (r, FieldElement::frac_canonical(base.clone(), g, dd.clone())))
                    .collect())
            }
            _ => Err(Error::Domain("hull expansion requires parameters".into())),
        }
    }

    /// Inject into a field with more parameters. `map[i]` is the index of the
    /// i-th old parameter inside the target.
    pub fn inject_params(&self, target: &Field, map: &[usize]) -> FieldElement {
        assert_eq!(self.field.characteristic(), target.characteristic());
        assert_eq!(map.len(), self.field.arity());
        let s2 = target.arity();
        let remap = |poly: &ParamPoly| -> ParamPoly {
            let mut out = ParamPoly::zero(s2);
            for (ex, c) in &poly.terms {
                let mut e2 = vec![0u32; s2];
                for (i, &x) in ex.iter().enumerate() {
                    e2[map[i]] = x;
                }
                out.terms.insert(e2, c.clone());
            }
            out
        };
        match &self.repr {
            Repr::Frac { num, den } => FieldElement {
                field: target.clone(),
                repr: Repr::Frac { num: remap(num), den: remap(den) },
            },
            Repr::Fp(v) => FieldElement {
                field: target.clone(),
                repr: if s2 == 0 {
                    Repr::Fp(*v)
                } else {
                    Repr::Frac {
                        num: ParamPoly::constant(s2, BigInt::from(*v), target.characteristic()),
                        den: ParamPoly::one(s2),
                    }
                },
            },
            Repr::Rat(r) => {
                if s2 == 0 {
                    FieldElement { field: target.clone(), repr: Repr::Rat(r.clone()) }
                } else {
                    FieldElement {
                        field: target.clone(),
                        repr: Repr::Frac {
                            num: ParamPoly::constant(s2, r.numer().clone(), Char::Zero),
                            den: ParamPoly::constant(s2, r.denom().clone(), Char::Zero),
                        },
                    }
                }
            }
        }
    }

    /// Monomial t^r in the parameters (used to reassemble hull expansions).
    pub fn param_monomial(field: &Field, exps: &[u32]) -> FieldElement {
        assert_eq!(exps.len(), field.arity());
        if field.arity() == 0 {
            return field.one();
        }
        let mut num = ParamPoly::zero(field.arity());
        num.terms.insert(exps.to_vec(), BigInt::one());
        FieldElement {
            field: field.clone(),
            repr: Repr::Frac { num, den: ParamPoly::one(field.arity()) },
        }
    }

    /// Value as u64 residue, for Fp elements only.
    pub fn as_fp(&self) -> Option<u64> {
        match &self.repr {
            Repr::Fp(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Total degree of the fraction (max of numerator/denominator), used by
    /// bounds; 0 for constants.
    pub fn param_degree(&self) -> u32 {
        match &self.repr {
            Repr::Frac { num, den } => num.total_degree().max(den.total_degree()),
            _ => 0,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Fp(v) => write!(f, "{v}"),
            Repr::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Repr::Frac { num, den } => {
                let ns = poly_string(num, self.field.params());
                if den.is_one() {
                    write!(f, "{ns}")
                } else {
                    let ds = poly_string(den, self.field.params());
                    let nw = if num.terms.len() > 1 { format!("({ns})") } else { ns };
                    let dw = if den.terms.len() > 1 { format!("({ds})") } else { ds };
                    write!(f, "{nw}/{dw}")
                }
            }
        }
    }
}

fn poly_string(poly: &ParamPoly, params: &[ParamInfo]) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let mut keys: Vec<&Vec<u32>> = poly.terms.keys().collect();
    keys.sort_by(|a, b| grlex(b, a));
    let mut out = String::new();
    for (i, e) in keys.iter().enumerate() {
        let c = &poly.terms[*e];
        let mut mon = String::new();
        for (j, &x) in e.iter().enumerate() {
            if x == 0 {
                continue;
            }
            if !mon.is_empty() {
                mon.push('*');
            }
            mon.push_str(&params[j].display_name());
            if x > 1 {
                mon.push_str(&format!("^{x}"));
            }
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mon.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mon);
        } else {
            out.push_str(&format!("{abs}*{mon}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_rational_canonical() {
        let q = Field::rationals();
        let x = q.from_int(2).div(&q.from_int(4)).unwrap();
        assert_eq!(x, q.from_int(1).div(&q.from_int(2)).unwrap());
        assert_eq!(x.to_string(), "1/2");
    }

    #[test]
    fn test_division_by_zero() {
        let q = Field::rationals();
        assert!(matches!(q.one().div(&q.zero()), Err(Error::DivisionByZero)));
        let f2t = Field::fraction_field(Char::P(2), &["t"]).unwrap();
        assert!(f2t.one().div(&f2t.zero()).is_err());
    }

    #[test]
    fn test_frac_canonical_char2() {
        // (t^2+t)/t = t+1 over F2(t)
        let k = Field::fraction_field(Char::P(2), &["t"]).unwrap();
        let t = k.param("t").unwrap();
        let num = t.mul(&t).add(&t);
        let x = num.div(&t).unwrap();
        assert_eq!(x, t.add(&k.one()));
        assert_eq!(x.to_string(), "t + 1");
    }

    #[test]
    fn test_frac_canonical_sign() {
        let k = Field::fraction_field(Char::Zero, &["t"]).unwrap();
        let t = k.param("t").unwrap();
        // 1/(-t) normalizes to -1/t
        let x = k.one().div(&t.neg()).unwrap();
        assert_eq!(x.to_string(), "-1/t");
        assert_eq!(x.mul(&t), k.from_int(-1));
    }

    #[test]
    fn test_fp_arithmetic() {
        let f5 = Field::finite(5).unwrap();
        let a = f5.from_int(3);
        let b = f5.from_int(4);
        assert_eq!(a.mul(&b), f5.from_int(2));
        assert_eq!(a.add(&b), f5.from_int(2));
        assert_eq!(a.inv().unwrap(), f5.from_int(2));
        assert!(Field::finite(6).is_err());
    }

    #[test]
    fn test_qth_power_root() {
        let k = Field::fraction_field(Char::P(2), &["t"]).unwrap();
        let t = k.param("t").unwrap();
        let t2 = t.mul(&t);
        assert_eq!(t2.qth_power_root(2), Some(t.clone()));
        assert_eq!(t.qth_power_root(2), None);
        assert_eq!(t.qth_power_root(1), Some(t.clone()));
        // rational functions: (t^2+1)/t^2 has the square root (t+1)/t in char 2
        let x = t2.add(&k.one()).div(&t2).unwrap();
        let r = x.qth_power_root(2).unwrap();
        assert_eq!(r, t.add(&k.one()).div(&t).unwrap());
    }

    #[test]
    fn test_adjoin_roots_and_embed() {
        let k = Field::fraction_field(Char::P(2), &["t"]).unwrap();
        let k2 = k.adjoin_parameter_roots(1).unwrap();
        assert_eq!(k2.to_string(), "F2(t')");
        let t = k.param("t").unwrap();
        let emb = t.embed_into(&k2).unwrap();
        // t = (t')^2 in the extension
        let tp = k2.param("t").unwrap();
        assert_eq!(emb, tp.mul(&tp));
        assert_eq!(emb.qth_power_root(2), Some(tp));
    }

    #[test]
    fn test_hull_expand_roundtrip() {
        let k = Field::fraction_field(Char::P(2), &["t"]).unwrap();
        let k2 = k.adjoin_parameter_roots(1).unwrap();
        let tp = k2.param("t").unwrap();
        // x = (1 + t' + t'^2) / (t'^3 + 1)
        let x = k2
            .one()
            .add(&tp)
            .add(&tp.mul(&tp))
            .div(&tp.pow(3).unwrap().add(&k2.one()))
            .unwrap();
        let coords = x.hull_expand(&k).unwrap();
        assert!(coords.len() <= 2);
        let mut back = k2.zero();
        for (r, c) in &coords {
            let mon = FieldElement::param_monomial(&k2, r);
            back = back.add(&c.embed_into(&k2).unwrap().mul(&mon));
        }
        assert_eq!(back, x);
    }

    #[test]
    fn test_pth_root_components_roundtrip() {
        let k = Field::fraction_field(Char::P(3), &["t", "u"]).unwrap();
        let t = k.param("t").unwrap();
        let u = k.param("u").unwrap();
        let x = t
            .pow(4)
            .unwrap()
            .add(&u.mul(&t))
            .add(&k.from_int(2))
            .div(&t.add(&u.pow(2).unwrap()))
            .unwrap();
        let comps = x.pth_root_components();
        let mut back = k.zero();
        for (r, g) in &comps {
            let mon = FieldElement::param_monomial(&k, r);
            back = back.add(&g.pow(3).unwrap().mul(&mon));
        }
        assert_eq!(back, x);
    }

    #[test]
    fn test_freshman_dream() {
        // (x+y)^p = x^p + y^p across representations
        let cases: Vec<(Field, Vec<FieldElement>)> = {
            let f3 = Field::finite(3).unwrap();
            let k = Field::fraction_field(Char::P(3), &["t"]).unwrap();
            let t = k.param("t").unwrap();
            let one = k.one();
            vec![
                (f3.clone(), vec![f3.from_int(1), f3.from_int(2)]),
                (
                    k.clone(),
                    vec![
                        t.clone(),
                        t.add(&one).div(&t).unwrap(),
                        t.mul(&t).add(&k.from_int(2)),
                    ],
                ),
            ]
        };
        for (_field, elts) in cases {
            for x in &elts {
                for y in &elts {
                    let lhs = x.add(y).pow(3).unwrap();
                    let rhs = x.pow(3).unwrap().add(&y.pow(3).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn test_field_axioms_small_sweep() {
        let k = Field::fraction_field(Char::P(2), &["t"]).unwrap();
        let t = k.param("t").unwrap();
        let pool = vec![
            k.zero(),
            k.one(),
            t.clone(),
            t.add(&k.one()),
            k.one().div(&t).unwrap(),
            t.mul(&t).add(&t).div(&t.add(&k.one())).unwrap(),
        ];
        for a in &pool {
            for b in &pool {
                for c in &pool {
                    let lhs = a.add(b).mul(c);
                    let rhs = a.mul(c).add(&b.mul(c));
                    assert_eq!(lhs, rhs);
                    assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
                }
                assert_eq!(a.add(b), b.add(a));
                assert_eq!(a.mul(b), b.mul(a));
            }
            if !a.is_zero() {
                assert!(a.mul(&a.inv().unwrap()).is_one());
            }
        }
    }

    #[test]
    fn test_param_display_levels() {
        let k = Field::fraction_field(Char::P(2), &["t"]).unwrap();
        let k4 = k.adjoin_parameter_roots(2).unwrap();
        assert_eq!(k4.params()[0].display_name(), "t''");
    }
}
