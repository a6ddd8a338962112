//! Multivariate polynomials over a coefficient [`Field`], with the divided
//! (Hasse) derivative calculus and additive-polynomial machinery.

use crate::field::{Field, FieldElement};
use crate::intpoly::{grlex, Char};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, PartialEq, Eq)]
struct RingInner {
    field: Field,
    vars: Vec<String>,
}

/// Ambient polynomial ring descriptor k[x1..xn]. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Ring {}

impl Ring {
    pub fn new(field: Field, vars: &[&str]) -> Result<Ring> {
        let mut seen = std::collections::BTreeSet::new();
        for v in vars {
            if v.is_empty() || !v.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::Domain(format!("invalid variable name `{v}`")));
            }
            if !seen.insert(*v) {
                return Err(Error::Domain(format!("duplicate variable name `{v}`")));
            }
            if field.params().iter().any(|p| p.name == *v) {
                return Err(Error::Domain(format!(
                    "variable `{v}` collides with a field parameter"
                )));
            }
        }
        Ok(Ring(Arc::new(RingInner {
            field,
            vars: vars.iter().map(|s| s.to_string()).collect(),
        })))
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn zero(&self) -> Poly {
        Poly { ring: self.clone(), terms: BTreeMap::new() }
    }

    pub fn one(&self) -> Poly {
        self.constant(self.0.field.one())
    }

    pub fn constant(&self, c: FieldElement) -> Poly {
        let mut poly = self.zero();
        if !c.is_zero() {
            poly.terms.insert(vec![0; self.nvars()], c);
        }
        poly
    }

    pub fn var(&self, idx: usize) -> Poly {
        assert!(idx < self.nvars());
        let mut e = vec![0; self.nvars()];
        e[idx] = 1;
        self.monomial(e, self.0.field.one())
    }

    pub fn monomial(&self, exps: Vec<u32>, c: FieldElement) -> Poly {
        assert_eq!(exps.len(), self.nvars());
        let mut poly = self.zero();
        if !c.is_zero() {
            poly.terms.insert(exps, c);
        }
        poly
    }

    /// Ring with extra variables appended (e.g. translation variables).
    pub fn extended(&self, extra: &[&str]) -> Result<Ring> {
        let mut vars: Vec<&str> = self.0.vars.iter().map(|s| s.as_str()).collect();
        for v in extra {
            vars.push(v);
        }
        Ring::new(self.0.field.clone(), &vars)
    }

    /// Parse an expression: integers, parameters, variables, + - * ^ ( ).
    /// No implicit multiplication. `col0` offsets reported columns.
    pub fn parse_expr(&self, text: &str, line: usize, col0: usize) -> Result<Poly> {
        let tokens = lex(text, line, col0)?;
        let mut parser = ExprParser { ring: self, tokens, pos: 0, line, col0 };
        let poly = parser.expr()?;
        parser.expect_end()?;
        Ok(poly)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.0.field, self.0.vars.join(","))
    }
}

/// Sparse multivariate polynomial; exponent vectors keyed in a BTreeMap,
/// no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl Poly {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> FieldElement {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| self.ring.field().zero())
    }

    fn insert_term(&mut self, exps: Vec<u32>, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        assert!(self.ring == rhs.ring, "ring mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.ring.zero();
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        assert!(self.ring == rhs.ring, "ring mismatch");
        let mut out = self.ring.zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_term(e, ca.mul(cb));
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &FieldElement) -> Poly {
        let mut out = self.ring.zero();
        for (e, a) in &self.terms {
            out.insert_term(e.clone(), a.mul(c));
        }
        out
    }

    pub fn mul_monomial(&self, exps: &[u32]) -> Poly {
        let mut out = self.ring.zero();
        for (e, c) in &self.terms {
            let e2: Vec<u32> = e.iter().zip(exps).map(|(a, b)| a + b).collect();
            out.terms.insert(e2, c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = self.ring.one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Order at the origin (minimal total degree); None for the zero polynomial.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    /// Order and the initial form (sum of minimal-degree terms).
    pub fn order_and_initial_form(&self) -> (Option<u32>, Poly) {
        match self.order() {
            None => (None, self.ring.zero()),
            Some(ord) => {
                let mut init = self.ring.zero();
                for (e, c) in &self.terms {
                    if e.iter().sum::<u32>() == ord {
                        init.terms.insert(e.clone(), c.clone());
                    }
                }
                (Some(ord), init)
            }
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Homogeneous component of the given degree.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        let mut out = self.ring.zero();
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == d {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Drop all terms of total degree greater than `d`.
    pub fn truncate_above(&self, d: u32) -> Poly {
        let mut out = self.ring.zero();
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() <= d {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    pub fn max_var_degree(&self, idx: usize) -> u32 {
        self.terms.keys().map(|e| e[idx]).max().unwrap_or(0)
    }

    pub fn involves_var(&self, idx: usize) -> bool {
        self.terms.keys().any(|e| e[idx] > 0)
    }

    /// Divided power (Hasse) derivative D_A: x^B -> C(B,A) x^(B-A).
    pub fn hasse_derivative(&self, a: &[u32]) -> Poly {
        assert_eq!(a.len(), self.ring.nvars());
        let field = self.ring.field().clone();
        let mut out = self.ring.zero();
        for (b, c) in &self.terms {
            if b.iter().zip(a).any(|(bi, ai)| bi < ai) {
                continue;
            }
            let mut coeff = c.clone();
            let mut skip = false;
            for (bi, ai) in b.iter().zip(a) {
                let bin = binomial_in_field(&field, *bi, *ai);
                if bin.is_zero() {
                    skip = true;
                    break;
                }
                coeff = coeff.mul(&bin);
            }
            if skip {
                continue;
            }
            let e: Vec<u32> = b.iter().zip(a).map(|(bi, ai)| bi - ai).collect();
            out.insert_term(e, coeff);
        }
        out
    }

    /// Substitute each variable by the given image polynomial (all in `target`).
    pub fn substitute(&self, target: &Ring, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.ring.nvars());
        for im in images {
            assert!(im.ring == *target, "image outside target ring");
        }
        let field_map = |c: &FieldElement| -> FieldElement {
            assert!(c.field() == target.field(), "substitution cannot change the field");
            c.clone()
        };
        let mut powers: Vec<Vec<Poly>> = vec![vec![]; images.len()];
        let mut out = target.zero();
        for (e, c) in &self.terms {
            let mut term = target.constant(field_map(c));
            for (i, &ex) in e.iter().enumerate() {
                if ex == 0 {
                    continue;
                }
                while powers[i].len() < ex as usize {
                    let next = match powers[i].last() {
                        None => images[i].clone(),
                        Some(prev) => prev.mul(&images[i]),
                    };
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][ex as usize - 1]);
            }
            out = out.add(&term);
        }
        out
    }

    /// f(X+T) for the selected variables: pairs (var index, fresh name).
    /// Returns the polynomial in the extended ring.
    pub fn taylor_translate(&self, pairs: &[(usize, &str)]) -> Result<Poly> {
        let fresh: Vec<&str> = pairs.iter().map(|(_, t)| *t).collect();
        let big = self.ring.extended(&fresh)?;
        let n = self.ring.nvars();
        let mut images: Vec<Poly> = (0..n).map(|i| big.var(i)).collect();
        for (k, (i, _)) in pairs.iter().enumerate() {
            images[*i] = big.var(*i).add(&big.var(n + k));
        }
        Ok(self.substitute(&big, &images))
    }

    /// Move the polynomial to a ring with the same variable names in a
    /// different order (or a superset of variables).
    pub fn rename_into(&self, target: &Ring) -> Result<Poly> {
        let map: Vec<usize> = self
            .ring
            .vars()
            .iter()
            .map(|v| {
                target
                    .var_index(v)
                    .ok_or_else(|| Error::Domain(format!("variable `{v}` missing in target ring")))
            })
            .collect::<Result<_>>()?;
        let mut out = target.zero();
        for (e, c) in &self.terms {
            let mut e2 = vec![0u32; target.nvars()];
            for (i, &x) in e.iter().enumerate() {
                e2[map[i]] = x;
            }
            assert!(c.field() == target.field());
            out.terms.insert(e2, c.clone());
        }
        Ok(out)
    }

    /// Coefficient vector on the monomial basis `basis` (all terms must be
    /// covered by the basis).
    pub fn to_vector(&self, basis_index: &BTreeMap<Vec<u32>, usize>) -> Vec<FieldElement> {
        let zero = self.ring.field().zero();
        let mut v = vec![zero; basis_index.len()];
        for (e, c) in &self.terms {
            let idx = *basis_index
                .get(e)
                .unwrap_or_else(|| panic!("monomial {e:?} outside basis"));
            v[idx] = c.clone();
        }
        v
    }

    pub fn from_vector(
        ring: &Ring,
        basis: &[Vec<u32>],
        coords: &[FieldElement],
    ) -> Poly {
        assert_eq!(basis.len(), coords.len());
        let mut out = ring.zero();
        for (e, c) in basis.iter().zip(coords) {
            if !c.is_zero() {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| grlex(b, a));
        let vars = self.ring.vars();
        for (i, e) in keys.iter().enumerate() {
            let c = &self.terms[*e];
            let mut mon = String::new();
            for (j, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if !mon.is_empty() {
                    mon.push('*');
                }
                mon.push_str(&vars[j]);
                if x > 1 {
                    mon.push_str(&format!("^{x}"));
                }
            }
            let cs = c.to_string();
            let (sign, body) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(" + ") && !rest.contains(" - ") => {
                    ("-", rest.to_string())
                }
                _ => ("+", cs),
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if sign == "-" { "-" } else { "+" })?;
            }
            let needs_parens = body.contains(" + ") || body.contains(" - ") || body.contains('/');
            let body_wrapped = if needs_parens { format!("({body})") } else { body };
            if mon.is_empty() {
                write!(f, "{body_wrapped}")?;
            } else if body_wrapped == "1" {
                write!(f, "{mon}")?;
            } else {
                write!(f, "{body_wrapped}*{mon}")?;
            }
        }
        Ok(())
    }
}

/// Binomial coefficient C(b, a) in the field (Lucas reduction in char p).
pub fn binomial_in_field(field: &Field, b: u32, a: u32) -> FieldElement {
    if a > b {
        return field.zero();
    }
    match field.characteristic() {
        Char::Zero => field.from_bigint(binomial_bigint(b, a)),
        Char::P(p) => {
            // Lucas: product of digitwise binomials base p
            let mut bb = b as u64;
            let mut aa = a as u64;
            let mut acc = BigInt::one();
            while aa > 0 || bb > 0 {
                let bd = (bb % p) as u32;
                let ad = (aa % p) as u32;
                if ad > bd {
                    return field.zero();
                }
                acc *= binomial_bigint(bd, ad);
                bb /= p;
                aa /= p;
            }
            field.from_bigint(acc)
        }
    }
}

fn binomial_bigint(b: u32, a: u32) -> BigInt {
    if a > b {
        return BigInt::zero();
    }
    let a = a.min(b - a);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..a {
        num *= BigInt::from(b - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Additive polynomial sum_j c_j X_j^q with q = 1 or a power of char p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditivePoly {
    pub ring: Ring,
    pub q: u64,
    pub coeffs: Vec<FieldElement>,
}

impl AdditivePoly {
    pub fn new(ring: Ring, q: u64, coeffs: Vec<FieldElement>) -> Result<AdditivePoly> {
        assert_eq!(coeffs.len(), ring.nvars());
        match ring.field().characteristic() {
            Char::Zero => {
                if q != 1 {
                    return Err(Error::Domain(
                        "additive degree must be 1 in characteristic 0".into(),
                    ));
                }
            }
            Char::P(p) => {
                let mut qq = q;
                while qq > 1 {
                    if qq % p != 0 {
                        return Err(Error::Domain(format!(
                            "additive degree {q} is not a power of {p}"
                        )));
                    }
                    qq /= p;
                }
            }
        }
        Ok(AdditivePoly { ring, q, coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn leading_var(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn to_poly(&self) -> Poly {
        let mut out = self.ring.zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0u32; self.ring.nvars()];
                e[j] = self.q as u32;
                out.insert_term(e, c.clone());
            }
        }
        out
    }

    /// Raise to the p^a-th power: multiplies the degree, powers coefficients.
    pub(crate) fn frobenius_power(&self, factor: u64) -> AdditivePoly {
        if factor == 1 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let mut x = c.clone();
                let p = self.ring.field().characteristic().prime().unwrap();
                let mut f = factor;
                while f > 1 {
                    x = x.frobenius();
                    f /= p;
                }
                x
            })
            .collect();
        AdditivePoly { ring: self.ring.clone(), q: self.q * factor, coeffs }
    }

    fn sub_scaled(&self, other: &AdditivePoly, c: &FieldElement) -> AdditivePoly {
        assert_eq!(self.q, other.q);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(&b.mul(c)))
            .collect();
        AdditivePoly { ring: self.ring.clone(), q: self.q, coeffs }
    }

    fn normalized(&self) -> AdditivePoly {
        let lead = self.leading_var().expect("normalize nonzero");
        let inv = self.coeffs[lead].inv().unwrap();
        let coeffs = self.coeffs.iter().map(|c| c.mul(&inv)).collect();
        AdditivePoly { ring: self.ring.clone(), q: self.q, coeffs }
    }
}

/// Triangular echelon basis of additive polynomials: distinct leading
/// variables, ascending degrees, each element supported on its leading
/// variable and variables later in the permuted order.
#[derive(Clone, Debug)]
pub struct TriangularBasis {
    pub ring: Ring,
    pub elements: Vec<AdditivePoly>,
    /// permuted variable order: leading variables first (matching `elements`),
    /// then the remaining variables ascending
    pub perm: Vec<usize>,
}

impl TriangularBasis {
    pub fn degrees(&self) -> Vec<u64> {
        self.elements.iter().map(|e| e.q).collect()
    }

    pub fn leads(&self) -> Vec<usize> {
        self.elements.iter().map(|e| e.leading_var().unwrap()).collect()
    }

    pub fn polys(&self) -> Vec<Poly> {
        self.elements.iter().map(|e| e.to_poly()).collect()
    }
}

/// Bring a family of additive polynomials into triangular echelon form.
/// The generated ideal is preserved.
pub fn additive_echelon(ring: &Ring, gens: &[AdditivePoly]) -> TriangularBasis {
    let mut basis: BTreeMap<usize, AdditivePoly> = BTreeMap::new();
    let mut queue: Vec<AdditivePoly> = gens.to_vec();
    let mut guard = 0usize;
    while let Some(mut cur) = queue.pop() {
        guard += 1;
        assert!(guard < 100_000, "additive echelon failed to stabilize");
        // eliminate coordinates controlled by existing leads of degree <= q
        loop {
            let mut changed = false;
            for j in 0..cur.coeffs.len() {
                if cur.coeffs[j].is_zero() {
                    continue;
                }
                if let Some(b) = basis.get(&j) {
                    if b.q <= cur.q {
                        let raised = b.frobenius_power(cur.q / b.q);
                        let c = cur.coeffs[j].clone();
                        cur = cur.sub_scaled(&raised, &c);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if cur.is_zero() {
            continue;
        }
        cur = cur.normalized();
        let lead = cur.leading_var().unwrap();
        match basis.get(&lead) {
            None => {
                basis.insert(lead, cur);
            }
            Some(old) => {
                // an entry of strictly larger degree gets displaced and
                // re-reduced against the new, smaller-degree element
                assert!(old.q > cur.q, "reduction should have consumed this");
                let displaced = basis.insert(lead, cur).unwrap();
                queue.push(displaced);
            }
        }
        // keep every element reduced against the whole current basis
        let keys: Vec<usize> = basis.keys().copied().collect();
        for k in keys {
            let elt = basis[&k].clone();
            let mut red = elt.clone();
            loop {
                let mut changed = false;
                for j in 0..red.coeffs.len() {
                    if j == k || red.coeffs[j].is_zero() {
                        continue;
                    }
                    if let Some(b) = basis.get(&j) {
                        if b.q <= red.q {
                            let raised = b.frobenius_power(red.q / b.q);
                            let c = red.coeffs[j].clone();
                            red = red.sub_scaled(&raised, &c);
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            if red.is_zero() || red.leading_var() != Some(k) {
                // lead moved: remove and reprocess
                basis.remove(&k);
                if !red.is_zero() {
                    queue.push(red);
                }
            } else if red != elt {
                basis.insert(k, red.normalized());
            }
        }
    }
    let mut elements: Vec<AdditivePoly> = basis.into_values().collect();
    elements.sort_by_key(|e| (e.q, e.leading_var().unwrap()));
    let leads: Vec<usize> = elements.iter().map(|e| e.leading_var().unwrap()).collect();
    let mut perm = leads.clone();
    for j in 0..ring.nvars() {
        if !perm.contains(&j) {
            perm.push(j);
        }
    }
    TriangularBasis { ring: ring.clone(), elements, perm }
}

/// Normal form of `f` modulo the triangular basis ideal, together with the
/// cofactors: f = reduced + sum_i cof_i * basis_i.
pub fn triangular_reduce(f: &Poly, basis: &TriangularBasis) -> (Poly, Vec<Poly>) {
    let ring = f.ring().clone();
    let mut rem = f.clone();
    let mut cofs: Vec<Poly> = basis.elements.iter().map(|_| ring.zero()).collect();
    let leads = basis.leads();
    let mut guard = 0usize;
    'outer: loop {
        guard += 1;
        assert!(guard < 1_000_000, "triangular reduction failed to terminate");
        for (i, elt) in basis.elements.iter().enumerate() {
            let lead = leads[i];
            let q = elt.q as u32;
            // grlex-largest reducible term for determinism
            let target = rem
                .terms
                .iter()
                .filter(|(e, _)| e[lead] >= q)
                .max_by(|a, b| grlex(a.0, b.0));
            if let Some((e, c)) = target {
                let mut shift = e.clone();
                shift[lead] -= q;
                let c = c.clone();
                let cof_term = ring.monomial(shift, c);
                rem = rem.sub(&cof_term.mul(&elt.to_poly()));
                cofs[i] = cofs[i].add(&cof_term);
                continue 'outer;
            }
        }
        break;
    }
    for (i, elt) in basis.elements.iter().enumerate() {
        let lead = leads[i];
        debug_assert!(rem.terms.keys().all(|e| e[lead] < elt.q as u32));
    }
    (rem, cofs)
}

// --- expression parsing -----------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>> {
    let mut out = vec![];
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i + 1;
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Int(s.parse().unwrap()), col));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Ident(s), col));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    ring: &'a Ring,
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    col0: usize,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn cur_col(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.col0 + 1 + self.tokens.last().map(|(_, c)| *c).unwrap_or(0))
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.cur_col(), msg: msg.into() }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| self.err("exponent out of range"))?;
                    Ok(base.pow(e))
                }
                _ => Err(self.err("expected a nonnegative integer exponent after `^`")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(self.ring.constant(self.ring.field().from_bigint(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(idx) = self.ring.var_index(&name) {
                    Ok(self.ring.var(idx))
                } else if self.ring.field().params().iter().any(|p| p.name == name) {
                    let c = self.ring.field().param(&name).unwrap();
                    Ok(self.ring.constant(c))
                } else {
                    self.pos -= 1;
                    Err(self.err(format!("unknown identifier `{name}`")))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.err("expected `)`")),
                }
            }
            _ => Err(self.err("expected a number, identifier or `(`")),
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        if self.pos < self.tokens.len() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}
