//! Projected polyhedra of generator systems, vertex solvability and
//! dissolution, the preparation loop, and blow-up chart transforms.
//!
//! A polyhedron here always means conv(points) + the nonnegative orthant,
//! generated by the finitely many points A/(nu_i - |B|) read off the
//! generators.  Vertices are certified both ways: a convex combination
//! below the point when it is not a vertex, a separating functional when
//! it is.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::{Field, FieldElement};
use crate::graded::{graded_membership_certificate, monomials_of_degree};
use crate::intpoly::Char;
use crate::linalg::solve as linear_solve;
use crate::poly::{Poly, Ring};
use crate::{Error, Result};

type Rat = BigRational;

// --- orthant polyhedra --------------------------------------------------------

enum HullDecision {
    /// convex weights on the other points witnessing containment
    Inside(Vec<Rat>),
    /// nonnegative functional c with c.p strictly below c.q for every other q
    Outside(Vec<Rat>),
}

/// Decide p in conv(others) + orthant by exact phase-1 simplex (Bland's
/// rule); both answers carry a certificate that the caller re-checks.
fn hull_decide(p: &[Rat], others: &[Vec<Rat>]) -> HullDecision {
    let e = p.len();
    let m = others.len();
    if m == 0 {
        return HullDecision::Outside(vec![Rat::one(); e]);
    }
    let rows = e + 1;
    let realcols = m + e;
    let total = realcols + rows;
    let mut t: Vec<Vec<Rat>> = vec![vec![Rat::zero(); total + 1]; rows];
    for j in 0..m {
        t[0][j] = Rat::one();
        for i in 0..e {
            t[1 + i][j] = others[j][i].clone();
        }
    }
    for i in 0..e {
        t[1 + i][m + i] = Rat::one();
    }
    for r in 0..rows {
        t[r][realcols + r] = Rat::one();
    }
    t[0][total] = Rat::one();
    for i in 0..e {
        t[1 + i][total] = p[i].clone();
    }
    let mut basis: Vec<usize> = (0..rows).map(|r| realcols + r).collect();
    loop {
        // entering column: smallest real j whose phase-1 reduced cost is
        // negative, i.e. the artificial rows sum positively
        let mut enter = None;
        for j in 0..realcols {
            if basis.contains(&j) {
                continue;
            }
            let mut s = Rat::zero();
            for r in 0..rows {
                if basis[r] >= realcols {
                    s += t[r][j].clone();
                }
            }
            if s > Rat::zero() {
                enter = Some(j);
                break;
            }
        }
        let Some(j) = enter else { break };
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..rows {
            if t[r][j] > Rat::zero() {
                let ratio = &t[r][total] / &t[r][j];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (r, _) = leave.expect("phase-1 objective is bounded");
        let piv = t[r][j].clone();
        for c in 0..=total {
            t[r][c] = &t[r][c] / &piv;
        }
        for rr in 0..rows {
            if rr != r && !t[rr][j].is_zero() {
                let f = t[rr][j].clone();
                for c in 0..=total {
                    let sub = &t[r][c] * &f;
                    t[rr][c] = &t[rr][c] - &sub;
                }
            }
        }
        basis[r] = j;
    }
    let mut objective = Rat::zero();
    for r in 0..rows {
        if basis[r] >= realcols {
            objective += t[r][total].clone();
        }
    }
    if objective.is_zero() {
        let mut lambda = vec![Rat::zero(); m];
        for r in 0..rows {
            if basis[r] < m {
                lambda[basis[r]] = t[r][total].clone();
            }
        }
        HullDecision::Inside(lambda)
    } else {
        // Farkas vector from the artificial columns (they carry B^{-1})
        let mut y = vec![Rat::zero(); rows];
        for (k, yk) in y.iter_mut().enumerate() {
            for r in 0..rows {
                if basis[r] >= realcols {
                    *yk += t[r][realcols + k].clone();
                }
            }
        }
        let c: Vec<Rat> = (0..e).map(|i| -y[1 + i].clone()).collect();
        HullDecision::Outside(c)
    }
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_inside(p: &[Rat], others: &[Vec<Rat>], lambda: &[Rat]) {
    assert_eq!(lambda.len(), others.len());
    let mut sum = Rat::zero();
    let mut combo = vec![Rat::zero(); p.len()];
    for (l, q) in lambda.iter().zip(others) {
        assert!(*l >= Rat::zero(), "negative weight");
        sum += l.clone();
        for i in 0..p.len() {
            combo[i] += l * &q[i];
        }
    }
    assert!(sum == Rat::one(), "weights do not sum to one");
    for i in 0..p.len() {
        assert!(combo[i] <= p[i], "combination not below the point");
    }
}

fn check_outside(p: &[Rat], others: &[Vec<Rat>], c: &[Rat]) {
    assert!(c.iter().all(|x| *x >= Rat::zero()), "separator leaves the orthant dual");
    let at_p = dot(c, p);
    for q in others {
        assert!(at_p < dot(c, q), "separator not strict");
    }
}

/// conv(points) + nonnegative orthant, with its canonical vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthantPolyhedron {
    dim: usize,
    points: Vec<Vec<Rat>>,
    vertices: Vec<Vec<Rat>>,
}

impl OrthantPolyhedron {
    pub fn new(dim: usize, pts: Vec<Vec<Rat>>) -> OrthantPolyhedron {
        for p in &pts {
            assert_eq!(p.len(), dim, "point dimension mismatch");
            assert!(p.iter().all(|x| *x >= Rat::zero()), "point outside the orthant");
        }
        let mut points = pts;
        points.sort();
        points.dedup();
        // a point weakly dominated by another generator is never a vertex
        let kept: Vec<Vec<Rat>> = points
            .iter()
            .filter(|p| {
                !points
                    .iter()
                    .any(|q| q != *p && q.iter().zip(p.iter()).all(|(a, b)| a <= b))
            })
            .cloned()
            .collect();
        let mut vertices = vec![];
        for (i, p) in kept.iter().enumerate() {
            let others: Vec<Vec<Rat>> =
                kept.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q.clone()).collect();
            match hull_decide(p, &others) {
                HullDecision::Inside(lambda) => check_inside(p, &others, &lambda),
                HullDecision::Outside(c) => {
                    check_outside(p, &others, &c);
                    vertices.push(p.clone());
                }
            }
        }
        OrthantPolyhedron { dim, points, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// generating points, deduplicated and sorted
    pub fn points(&self) -> &[Vec<Rat>] {
        &self.points
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        matches!(hull_decide(p, &self.points), HullDecision::Inside(_))
    }

    /// minimal coordinate sum over the polyhedron; None when empty
    pub fn delta(&self) -> Option<Rat> {
        self.vertices.iter().map(|v| v.iter().sum()).min()
    }

    /// vertices attaining delta
    pub fn first_face(&self) -> Vec<Vec<Rat>> {
        match self.delta() {
            None => vec![],
            Some(d) => self
                .vertices
                .iter()
                .filter(|v| v.iter().sum::<Rat>() == d)
                .cloned()
                .collect(),
        }
    }
}

pub fn delta_and_first_face(poly: &OrthantPolyhedron) -> (Option<Rat>, Vec<Vec<Rat>>) {
    (poly.delta(), poly.first_face())
}

// --- projected polyhedra of generator systems ---------------------------------

fn check_split(ring: &Ring, u: &[usize], y: &[usize]) -> Result<()> {
    let n = ring.nvars();
    let mut seen = vec![false; n];
    for &j in u.iter().chain(y.iter()) {
        if j >= n {
            return Err(Error::Domain("split variable index out of range".into()));
        }
        if seen[j] {
            return Err(Error::Domain(format!(
                "variable `{}` appears twice in the (u, y) split",
                ring.vars()[j]
            )));
        }
        seen[j] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::Domain("the (u, y) split must cover all variables".into()));
    }
    Ok(())
}

fn y_degree(e: &[u32], y: &[usize]) -> u32 {
    y.iter().map(|&j| e[j]).sum()
}

/// The polyhedron generated by the points A/(nu_i - |B|) over all terms
/// C u^A y^B of the generators with |B| below the order nu_i.
pub fn projected_polyhedron(
    ring: &Ring,
    gens: &[Poly],
    u: &[usize],
    y: &[usize],
) -> Result<OrthantPolyhedron> {
    check_split(ring, u, y)?;
    let mut pts = vec![];
    for (i, f) in gens.iter().enumerate() {
        if f.is_zero() {
            return Err(Error::Domain(format!("generator {} is zero", i + 1)));
        }
        let nu = f.order().unwrap();
        for (e, _) in f.terms() {
            let b = y_degree(e, y);
            if b < nu {
                let den = BigInt::from(nu - b);
                let pt: Vec<Rat> =
                    u.iter().map(|&j| Rat::new(BigInt::from(e[j]), den.clone())).collect();
                pts.push(pt);
            }
        }
    }
    Ok(OrthantPolyhedron::new(u.len(), pts))
}

/// Initial form of `f` at the vertex v: the pure-y terms of degree nu plus
/// every term projecting exactly onto v.
pub fn vertex_initial_form(f: &Poly, v: &[Rat], u: &[usize], y: &[usize]) -> Result<Poly> {
    let ring = f.ring().clone();
    check_split(&ring, u, y)?;
    assert_eq!(v.len(), u.len());
    if f.is_zero() {
        return Err(Error::Domain("zero generator has no initial form".into()));
    }
    let nu = f.order().unwrap();
    let mut out = ring.zero();
    let mut hits = false;
    for (e, c) in f.terms() {
        let b = y_degree(e, y);
        let keep = if b == nu {
            u.iter().all(|&j| e[j] == 0)
        } else if b < nu {
            let den = BigInt::from(nu - b);
            let m = u
                .iter()
                .zip(v)
                .all(|(&j, vk)| Rat::new(BigInt::from(e[j]), den.clone()) == *vk);
            hits |= m;
            m
        } else {
            false
        };
        if keep {
            out = out.add(&ring.monomial(e.clone(), c.clone()));
        }
    }
    if hits {
        let poly = projected_polyhedron(&ring, std::slice::from_ref(f), u, y)?;
        if !poly.vertices().contains(&v.to_vec()) {
            return Err(Error::Domain(
                "the point is on the generator's polyhedron but is not a vertex".into(),
            ));
        }
    }
    Ok(out)
}

// --- vertex solvability -------------------------------------------------------

/// All solutions x of x^m = c in the coefficient field, exact.  Roots over
/// parametrized fields are limited to characteristic-power degrees; large
/// prime fields are limited to exponents coprime to p-1.
fn all_mth_roots(field: &Field, c: &FieldElement, m: u32) -> Result<Vec<FieldElement>> {
    assert!(m >= 1);
    if m == 1 {
        return Ok(vec![c.clone()]);
    }
    if c.is_zero() {
        return Ok(vec![field.zero()]);
    }
    match field.characteristic() {
        Char::Zero => {
            if field.arity() > 0 {
                return Err(Error::Unsupported(
                    "root extraction over parametrized characteristic-zero fields".into(),
                ));
            }
            let r = c.as_rational().unwrap();
            let (num, den) = (r.numer(), r.denom());
            let rn = num.abs().nth_root(m);
            let rd = den.abs().nth_root(m);
            if rn.pow(m) != num.abs() || rd.pow(m) != den.abs() {
                return Ok(vec![]);
            }
            let root = field
                .from_bigint(rn)
                .div(&field.from_bigint(rd))
                .expect("denominator root is nonzero");
            if num.is_negative() {
                if m % 2 == 1 {
                    Ok(vec![root.neg()])
                } else {
                    Ok(vec![])
                }
            } else if m % 2 == 0 {
                Ok(vec![root.clone(), root.neg()])
            } else {
                Ok(vec![root])
            }
        }
        Char::P(p) => {
            let mut q: u64 = 1;
            let mut m0 = m as u64;
            while m0 % p == 0 {
                m0 /= p;
                q *= p;
            }
            let base = match c.qth_power_root(q) {
                None => return Ok(vec![]),
                Some(b) => b,
            };
            if m0 == 1 {
                return Ok(vec![base]);
            }
            if field.arity() > 0 {
                return Err(Error::Unsupported(
                    "root extraction over parametrized fields beyond characteristic powers"
                        .into(),
                ));
            }
            if p > (1 << 20) {
                return Err(Error::Unsupported(
                    "root extraction over large prime fields".into(),
                ));
            }
            let mut out = vec![];
            for x in 0..p {
                let cand = field.from_int(x as i64);
                if cand.pow(m0 as i64)? == base {
                    out.push(cand);
                }
            }
            Ok(out)
        }
    }
}

fn eval_at(eqs: &[Poly], lring: &Ring, values: &[FieldElement]) -> bool {
    let images: Vec<Poly> = values.iter().map(|v| lring.constant(v.clone())).collect();
    eqs.iter().all(|e| e.substitute(lring, &images).is_zero())
}

fn substitute_var(eqs: &[Poly], lring: &Ring, j: usize, val: &FieldElement) -> Vec<Poly> {
    let images: Vec<Poly> = (0..lring.nvars())
        .map(|k| if k == j { lring.constant(val.clone()) } else { lring.var(k) })
        .collect();
    eqs.iter().map(|e| e.substitute(lring, &images)).filter(|e| !e.is_zero()).collect()
}

/// Solve a coefficient-matching system for the translation vector.  Handles
/// linear layers, single-variable power equations (with root branching),
/// and characteristic-power images of linear forms; anything else is
/// reported as unsupported rather than guessed.
fn solve_lambda_system(
    lring: &Ring,
    eqs: &[Poly],
    depth: usize,
) -> Result<Option<Vec<FieldElement>>> {
    if depth > 64 {
        return Err(Error::Unsupported("vertex solvability recursion too deep".into()));
    }
    let field = lring.field().clone();
    let r = lring.nvars();
    let mut work: Vec<Poly> = eqs.iter().filter(|e| !e.is_zero()).cloned().collect();
    for e in &work {
        if e.total_degree() == Some(0) {
            return Ok(None);
        }
    }
    if work.is_empty() {
        return Ok(Some(vec![field.zero(); r]));
    }
    work.sort_by_key(|e| (e.total_degree().unwrap(), e.to_string()));

    let linear: Vec<&Poly> = work.iter().filter(|e| e.total_degree() == Some(1)).collect();
    if !linear.is_empty() {
        let mut rows = vec![];
        let mut rhs = vec![];
        for eq in &linear {
            let mut row = vec![field.zero(); r];
            let mut konst = field.zero();
            for (e, c) in eq.terms() {
                match e.iter().position(|&x| x > 0) {
                    None => konst = c.clone(),
                    Some(j) => row[j] = c.clone(),
                }
            }
            rows.push(row);
            rhs.push(konst.neg());
        }
        match linear_solve(&field, &rows, r, &rhs) {
            None => return Ok(None),
            Some((part, kernel)) => {
                if eval_at(&work, lring, &part) {
                    return Ok(Some(part));
                }
                if kernel.is_empty() {
                    // unique linear solution falsifies a nonlinear equation
                    return Ok(None);
                }
                return Err(Error::Unsupported(
                    "underdetermined linear layer with a nonlinear residual".into(),
                ));
            }
        }
    }

    // no linear equations: take the structurally simplest one
    let eq = work[0].clone();
    let nonconst: Vec<(Vec<u32>, FieldElement)> = eq
        .terms()
        .filter(|(e, _)| e.iter().any(|&x| x > 0))
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let konst = eq.coeff(&vec![0u32; r]);
    if nonconst.len() == 1 {
        let (e, c) = &nonconst[0];
        let support: Vec<usize> = (0..r).filter(|&j| e[j] > 0).collect();
        if support.len() == 1 {
            let j = support[0];
            let m = e[j];
            // c * l_j^m + konst = 0
            let target = konst.neg().div(c)?;
            for root in all_mth_roots(&field, &target, m)? {
                let rest = substitute_var(&work, lring, j, &root);
                if let Some(mut a) = solve_lambda_system(lring, &rest, depth + 1)? {
                    a[j] = root;
                    return Ok(Some(a));
                }
            }
            return Ok(None);
        }
        if konst.is_zero() {
            // a pure monomial vanishes iff one of its variables does
            for &j in &support {
                let rest = substitute_var(&work, lring, j, &field.zero());
                if let Some(a) = solve_lambda_system(lring, &rest, depth + 1)? {
                    return Ok(Some(a));
                }
            }
            return Ok(None);
        }
    }

    if let Char::P(p) = field.characteristic() {
        // try to recognize the equation as a p-power of a lower one
        let mut q: u64 = u64::MAX;
        for (e, _) in eq.terms() {
            for &x in e.iter().filter(|&&x| x > 0) {
                let mut pw: u64 = 1;
                let mut v = x as u64;
                while v % p == 0 {
                    v /= p;
                    pw *= p;
                }
                q = q.min(pw);
            }
        }
        if q > 1 && q < u64::MAX {
            let mut rootpoly = lring.zero();
            let mut ok = true;
            for (e, c) in eq.terms() {
                match c.qth_power_root(q) {
                    None => {
                        ok = false;
                        break;
                    }
                    Some(rc) => {
                        let re: Vec<u32> = e.iter().map(|&x| x / q as u32).collect();
                        rootpoly = rootpoly.add(&lring.monomial(re, rc));
                    }
                }
            }
            if ok {
                let mut rest: Vec<Poly> = work[1..].to_vec();
                rest.push(rootpoly);
                return solve_lambda_system(lring, &rest, depth + 1);
            }
        }
    }
    Err(Error::Unsupported(
        "solvability system outside the linear/binomial/power fragment".into(),
    ))
}

fn lambda_ring(field: &Field, r: usize) -> Ring {
    let mut prefix = String::from("l");
    loop {
        let owned: Vec<String> = (1..=r).map(|i| format!("{prefix}{i}")).collect();
        let names: Vec<&str> = owned.iter().map(|s| s.as_str()).collect();
        if let Ok(ring) = Ring::new(field.clone(), &names) {
            return ring;
        }
        prefix.push('l');
    }
}

fn integral_coords(v: &[Rat]) -> Option<Vec<u32>> {
    let mut out = vec![];
    for x in v {
        if !x.is_integer() {
            return None;
        }
        out.push(x.to_integer().to_u32()?);
    }
    Some(out)
}

/// Translation vector dissolving the vertex v, if one exists: lambda such
/// that the initial form of every generator at v equals its y-leading form
/// with y replaced by y - lambda u^v.  The dissolving substitution is then
/// y_j -> y_j + lambda_j u^v.
pub fn solve_vertex(
    ring: &Ring,
    gens: &[Poly],
    u: &[usize],
    y: &[usize],
    v: &[Rat],
) -> Result<Option<Vec<FieldElement>>> {
    check_split(ring, u, y)?;
    assert_eq!(v.len(), u.len());
    // a fractional vertex admits no polynomial translation u^v
    let vint = match integral_coords(v) {
        None => return Ok(None),
        Some(vi) => vi,
    };
    let field = ring.field().clone();
    let r = y.len();
    let lring = lambda_ring(&field, r);
    let mut eqs: Vec<Poly> = vec![];
    for f in gens {
        if f.is_zero() {
            return Err(Error::Domain("zero generator".into()));
        }
        let nu = f.order().unwrap();
        let mut lead = ring.zero();
        for (e, c) in f.terms() {
            let du: u32 = u.iter().map(|&j| e[j]).sum();
            if du == 0 && y_degree(e, y) == nu {
                lead = lead.add(&ring.monomial(e.clone(), c.clone()));
            }
        }
        let ini = vertex_initial_form(f, v, u, y)?;
        // images sending y_k to -l_k (u-variables never occur in lead)
        let mut images = vec![lring.zero(); ring.nvars()];
        for (k, &j) in y.iter().enumerate() {
            images[j] = lring.var(k).neg();
        }
        for b in 0..nu {
            for bexp in monomials_of_degree(r, b) {
                let mut a_full = vec![0u32; ring.nvars()];
                for (k, &j) in y.iter().enumerate() {
                    a_full[j] = bexp[k];
                }
                let der = lead.hasse_derivative(&a_full);
                let lhs = if der.is_zero() { lring.zero() } else { der.substitute(&lring, &images) };
                let mut mono = a_full;
                for (k, &j) in u.iter().enumerate() {
                    mono[j] = (nu - b)
                        .checked_mul(vint[k])
                        .ok_or_else(|| Error::Domain("vertex exponent overflow".into()))?;
                }
                let rhs = ini.coeff(&mono);
                let eq = lhs.sub(&lring.constant(rhs));
                if !eq.is_zero() {
                    eqs.push(eq);
                }
            }
        }
    }
    match solve_lambda_system(&lring, &eqs, 0)? {
        None => Ok(None),
        Some(lambda) => {
            debug_assert!(eval_at(&eqs, &lring, &lambda));
            Ok(Some(lambda))
        }
    }
}

// --- preparation --------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DissolutionStep {
    pub vertex: Vec<Rat>,
    pub lambda: Vec<FieldElement>,
}

#[derive(Clone, Debug)]
pub struct PreparedSystem {
    pub ring: Ring,
    pub gens: Vec<Poly>,
    pub u: Vec<usize>,
    pub y: Vec<usize>,
    pub polyhedron: OrthantPolyhedron,
    /// no solvable vertex remains
    pub prepared: bool,
    pub steps: Vec<DissolutionStep>,
}

/// Subtract from each generator the detected multiples of earlier ones:
/// whenever the initial form lies in the ideal of the earlier initial
/// forms, the certified cofactors are lifted and subtracted.  This is a
/// reduced normalization; it never rewrites earlier generators.
fn reduced_normalize(ring: &Ring, gens: Vec<Poly>) -> Result<Vec<Poly>> {
    let mut done: Vec<Poly> = vec![];
    for f in gens {
        let mut cur = f;
        let mut guard = 0;
        while !cur.is_zero() && !done.is_empty() {
            let (_, init) = cur.order_and_initial_form();
            let earlier: Vec<Poly> = done.iter().map(|g| g.order_and_initial_form().1).collect();
            match graded_membership_certificate(ring, &init, &earlier)? {
                None => break,
                Some(cofs) => {
                    for (h, g) in cofs.iter().zip(&done) {
                        if !h.is_zero() {
                            cur = cur.sub(&h.mul(g));
                        }
                    }
                }
            }
            guard += 1;
            if guard > 64 {
                // stability may genuinely require the completion; stop here
                break;
            }
        }
        if !cur.is_zero() {
            done.push(cur);
        }
    }
    Ok(done)
}

/// Dissolve solvable vertices (lexicographically smallest first) until none
/// remains or the step budget runs out.
pub fn prepare(
    ring: &Ring,
    gens_in: &[Poly],
    u: &[usize],
    y: &[usize],
    max_steps: usize,
) -> Result<PreparedSystem> {
    check_split(ring, u, y)?;
    for (i, f) in gens_in.iter().enumerate() {
        if f.is_zero() {
            return Err(Error::Domain(format!("generator {} is zero", i + 1)));
        }
    }
    let mut gens = reduced_normalize(ring, gens_in.to_vec())?;
    if gens.is_empty() {
        return Err(Error::Domain("all generators normalized to zero".into()));
    }
    let mut steps: Vec<DissolutionStep> = vec![];
    let mut polyhedron = projected_polyhedron(ring, &gens, u, y)?;
    let prepared = loop {
        let mut found = None;
        for v in polyhedron.vertices() {
            if let Some(lambda) = solve_vertex(ring, &gens, u, y, v)? {
                found = Some((v.clone(), lambda));
                break;
            }
        }
        let Some((v, lambda)) = found else { break true };
        if steps.len() >= max_steps {
            break false;
        }
        let vint = integral_coords(&v).expect("solvable vertex is integral");
        let mut uexp = vec![0u32; ring.nvars()];
        for (k, &j) in u.iter().enumerate() {
            uexp[j] = vint[k];
        }
        let images: Vec<Poly> = (0..ring.nvars())
            .map(|j| match y.iter().position(|&yy| yy == j) {
                Some(k) if !lambda[k].is_zero() => {
                    ring.var(j).add(&ring.monomial(uexp.clone(), lambda[k].clone()))
                }
                _ => ring.var(j),
            })
            .collect();
        gens = gens.iter().map(|f| f.substitute(ring, &images)).collect();
        gens = reduced_normalize(ring, gens)?;
        if gens.is_empty() {
            return Err(Error::Domain("all generators normalized to zero".into()));
        }
        steps.push(DissolutionStep { vertex: v, lambda });
        polyhedron = projected_polyhedron(ring, &gens, u, y)?;
    };
    Ok(PreparedSystem {
        ring: ring.clone(),
        gens,
        u: u.to_vec(),
        y: y.to_vec(),
        polyhedron,
        prepared,
        steps,
    })
}

// --- blow-up charts -----------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupChart {
    /// chart of the c-th u-variable; carries the delta - 1 law
    U(usize),
    /// chart of the c-th y-variable; the chart variable joins the u-block
    Y(usize),
}

#[derive(Clone, Debug)]
pub struct BlowupReport {
    pub chart: BlowupChart,
    pub gens: Vec<Poly>,
    pub u: Vec<usize>,
    pub y: Vec<usize>,
    pub polyhedron: OrthantPolyhedron,
    pub delta_old: Option<Rat>,
    /// smallest chart coordinate over the recomputed polyhedron (u-charts)
    pub min_first: Option<Rat>,
    /// the same quantity from the affine point map, computed independently
    pub affine_min_first: Option<Rat>,
    /// min_first == delta_old - 1 == affine_min_first (u-charts only)
    pub law_holds: Option<bool>,
    /// delta - 1 >= 1
    pub permissible: bool,
    pub division_exact: bool,
}

fn divide_var_power(f: &Poly, var: usize, k: u32) -> (Poly, bool) {
    let ring = f.ring().clone();
    if f.is_zero() {
        return (f.clone(), true);
    }
    let minexp = f.terms().map(|(e, _)| e[var]).min().unwrap();
    let m = minexp.min(k);
    let mut out = ring.zero();
    for (e, c) in f.terms() {
        let mut e2 = e.clone();
        e2[var] -= m;
        out = out.add(&ring.monomial(e2, c.clone()));
    }
    (out, minexp >= k)
}

/// the affine image of a polyhedron point in the chart-c plane: the chart
/// coordinate becomes the coordinate sum minus one, the rest are unchanged
pub(crate) fn affine_chart_image(p: &[Rat], c: usize) -> Vec<Rat> {
    let mut out = p.to_vec();
    out[c] = p.iter().sum::<Rat>() - Rat::one();
    out
}

/// One chart of the blow-up of the origin: substitute, take strict
/// transforms, recompute the polyhedron, and check the delta - 1 law
/// against the independent affine point map (u-charts of prepared systems).
pub fn blowup_chart_transform(sys: &PreparedSystem, chart: BlowupChart) -> Result<BlowupReport> {
    let ring = &sys.ring;
    let n = ring.nvars();
    let (w, newu, newy) = match chart {
        BlowupChart::U(c) => {
            if c >= sys.u.len() {
                return Err(Error::Domain("chart index out of range".into()));
            }
            if !sys.prepared {
                return Err(Error::Domain(
                    "the u-chart law requires a prepared system".into(),
                ));
            }
            (sys.u[c], sys.u.clone(), sys.y.clone())
        }
        BlowupChart::Y(c) => {
            if c >= sys.y.len() {
                return Err(Error::Domain("chart index out of range".into()));
            }
            let w = sys.y[c];
            let mut newu = sys.u.clone();
            newu.push(w);
            let newy: Vec<usize> = sys.y.iter().copied().filter(|&j| j != w).collect();
            (w, newu, newy)
        }
    };
    let images: Vec<Poly> = (0..n)
        .map(|j| if j == w { ring.var(j) } else { ring.var(j).mul(&ring.var(w)) })
        .collect();
    let mut gens = vec![];
    let mut division_exact = true;
    for f in &sys.gens {
        let nu = f.order().unwrap();
        let tf = f.substitute(ring, &images);
        let (df, exact) = divide_var_power(&tf, w, nu);
        division_exact &= exact;
        gens.push(df);
    }
    let polyhedron = projected_polyhedron(ring, &gens, &newu, &newy)?;
    let delta_old = sys.polyhedron.delta();
    let (min_first, affine_min_first, law_holds) = match chart {
        BlowupChart::U(c) => {
            let minf = polyhedron.points().iter().map(|p| p[c].clone()).min();
            let aff = sys
                .polyhedron
                .points()
                .iter()
                .map(|p| affine_chart_image(p, c)[c].clone())
                .min();
            let law = match (&delta_old, &minf, &aff) {
                (None, None, None) => true,
                (Some(d), Some(mf), Some(af)) => *mf == d - Rat::one() && af == mf,
                _ => false,
            };
            (minf, aff, Some(law))
        }
        BlowupChart::Y(_) => (None, None, None),
    };
    let permissible = match &delta_old {
        None => true,
        Some(d) => *d >= Rat::from_integer(BigInt::from(2)),
    };
    Ok(BlowupReport {
        chart,
        gens,
        u: newu,
        y: newy,
        polyhedron,
        delta_old,
        min_first,
        affine_min_first,
        law_holds,
        permissible,
        division_exact,
    })
}
