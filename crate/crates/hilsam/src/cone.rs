//! Ridge and directrix of a homogeneous cone.
//!
//! Both invariants are computed from the ideal of the translation-stabilizer
//! subgroup scheme: expand every generator at `X + T`, reduce the
//! X-coefficients modulo the graded pieces of the ideal, and keep the
//! surviving polynomials in the translation variables `T`.  The ridge is the
//! additive part of that ideal, kept as a triangular basis of additive
//! polynomials; the directrix is the smallest linear space of forms whose
//! subring generates the ideal, obtained from the reduced ridge after
//! adjoining enough parameter roots.

use std::collections::BTreeMap;

use crate::field::FieldElement;
use crate::graded::{column_index, graded_piece, monomials_of_degree};
use crate::intpoly::Char;
use crate::linalg::Subspace;
use crate::poly::{
    additive_echelon, triangular_reduce, AdditivePoly, Poly, Ring, TriangularBasis,
};
use crate::{Error, Result};

/// Echelon basis of additive polynomials cutting out the ridge, together
/// with the stabilizer generators it was distilled from.
#[derive(Clone, Debug)]
pub struct RidgeResult {
    pub basis: TriangularBasis,
    pub stabilizer: Vec<Poly>,
}

/// Echelon basis of the linear forms spanning the directrix space, in the
/// ambient ring; `dim` is the number of forms.
#[derive(Clone, Debug)]
pub struct DirectrixResult {
    pub forms: Vec<Poly>,
    pub dim: usize,
}

/// Ring of translation variables matching the ambient ring, over the same
/// field.  Uses S, T, U, V, W for up to five variables, numbered names
/// otherwise, stepping around collisions with parameter names.
pub fn translation_ring(ring: &Ring) -> Ring {
    let n = ring.nvars();
    let field = ring.field().clone();
    if n <= 5 {
        let names = ["S", "T", "U", "V", "W"];
        if let Ok(r) = Ring::new(field.clone(), &names[..n]) {
            return r;
        }
    }
    let mut prefix = String::from("S");
    loop {
        let owned: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        let names: Vec<&str> = owned.iter().map(|s| s.as_str()).collect();
        if let Ok(r) = Ring::new(field.clone(), &names) {
            return r;
        }
        prefix.push('S');
    }
}

/// Move a polynomial to a ring with the same number of variables, matching
/// variables by position.
pub(crate) fn transplant(f: &Poly, target: &Ring) -> Poly {
    assert_eq!(f.ring().nvars(), target.nvars());
    let mut out = target.zero();
    for (e, c) in f.terms() {
        out = out.add(&target.monomial(e.clone(), c.clone()));
    }
    out
}

pub(crate) fn linear_form_coeffs(f: &Poly) -> Vec<FieldElement> {
    let n = f.ring().nvars();
    (0..n)
        .map(|j| {
            let mut e = vec![0u32; n];
            e[j] = 1;
            f.coeff(&e)
        })
        .collect()
}

fn linear_form_from(ring: &Ring, coeffs: &[FieldElement]) -> Poly {
    let mut out = ring.zero();
    for (j, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            let mut e = vec![0u32; ring.nvars()];
            e[j] = 1;
            out = out.add(&ring.monomial(e, c.clone()));
        }
    }
    out
}

fn check_cone_input(gens: &[Poly]) -> Result<()> {
    for (i, g) in gens.iter().enumerate() {
        if !g.is_homogeneous() {
            return Err(Error::Domain(format!("generator {} is not homogeneous", i + 1)));
        }
        if g.total_degree() == Some(0) {
            return Err(Error::Domain(
                "a nonzero constant generator cuts out the empty cone".into(),
            ));
        }
    }
    Ok(())
}

/// Graded pieces of the ideal, with the matching monomial index, computed
/// once per degree.
struct PieceCache<'a> {
    ring: &'a Ring,
    gens: &'a [Poly],
    map: BTreeMap<u32, (Subspace, BTreeMap<Vec<u32>, usize>)>,
}

impl<'a> PieceCache<'a> {
    fn new(ring: &'a Ring, gens: &'a [Poly]) -> PieceCache<'a> {
        PieceCache { ring, gens, map: BTreeMap::new() }
    }

    fn get(&mut self, d: u32) -> &(Subspace, BTreeMap<Vec<u32>, usize>) {
        if !self.map.contains_key(&d) {
            let mons = monomials_of_degree(self.ring.nvars(), d);
            let idx = column_index(&mons);
            let piece = graded_piece(self.ring, self.gens, d);
            self.map.insert(d, (piece, idx));
        }
        &self.map[&d]
    }
}

/// The T-polynomials c_beta(T) of one generator: expand g(X+T) as
/// sum_A D_A g(X) T^A, reduce each Hasse derivative modulo the graded piece
/// of matching degree, and group the survivors by complement monomial beta.
fn stabilizer_parts(g: &Poly, tring: &Ring, cache: &mut PieceCache) -> Vec<Poly> {
    let n = g.ring().nvars();
    let ng = match g.total_degree() {
        None => return vec![],
        Some(d) => d,
    };
    let mut acc: BTreeMap<(u32, usize), Poly> = BTreeMap::new();
    for s in 1..=ng {
        let dp = ng - s;
        for a in monomials_of_degree(n, s) {
            let der = g.hasse_derivative(&a);
            if der.is_zero() {
                continue;
            }
            let (piece, idx) = cache.get(dp);
            let red = piece.reduce(&der.to_vector(idx));
            for (col, c) in red.iter().enumerate() {
                if !c.is_zero() {
                    let entry = acc.entry((dp, col)).or_insert_with(|| tring.zero());
                    *entry = entry.add(&tring.monomial(a.clone(), c.clone()));
                }
            }
        }
    }
    acc.into_values().filter(|p| !p.is_zero()).collect()
}

pub(crate) fn stabilizer_in(ring: &Ring, gens: &[Poly], tring: &Ring) -> Result<Vec<Poly>> {
    check_cone_input(gens)?;
    let mut cache = PieceCache::new(ring, gens);
    let mut out = vec![];
    for g in gens {
        out.extend(stabilizer_parts(g, tring, &mut cache));
    }
    Ok(out)
}

/// Generators of the ideal of the subgroup of translations preserving the
/// cone of `gens`, as homogeneous polynomials in translation variables.
pub fn stabilizer_generators(ring: &Ring, gens: &[Poly]) -> Result<Vec<Poly>> {
    let tring = translation_ring(ring);
    stabilizer_in(ring, gens, &tring)
}

/// Additive polynomials of degree q inside the ideal generated by the
/// stabilizer polynomials: the degree-q graded piece intersected with the
/// span of the T_i^q.
fn additive_candidates(tring: &Ring, stab: &[Poly], q: u64) -> Vec<AdditivePoly> {
    let n = tring.nvars();
    let mons = monomials_of_degree(n, q as u32);
    let idx = column_index(&mons);
    let piece = graded_piece(tring, stab, q as u32);
    if piece.dim() == 0 {
        return vec![];
    }
    let mut additive = Subspace::empty(tring.field().clone(), mons.len());
    let mut addcols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![0u32; n];
        e[i] = q as u32;
        let col = idx[&e];
        addcols.push(col);
        let mut v = vec![tring.field().zero(); mons.len()];
        v[col] = tring.field().one();
        additive.insert(v);
    }
    piece
        .intersect(&additive)
        .rows()
        .iter()
        .map(|row| {
            let coeffs = addcols.iter().map(|&c| row[c].clone()).collect();
            AdditivePoly::new(tring.clone(), q, coeffs).unwrap()
        })
        .collect()
}

fn first_unreduced(stab: &[Poly], basis: &TriangularBasis) -> Option<Poly> {
    stab.iter().find(|g| !triangular_reduce(g, basis).0.is_zero()).cloned()
}

/// Triangular additive basis of the ridge of the cone of `gens`.
///
/// Searches additive polynomials of p-power degree up to the maximal
/// generator degree (degree 1 only in characteristic 0) inside the
/// stabilizer ideal, echelonizes, and verifies that the stabilizer
/// generators all reduce to zero against the result; one extra Frobenius
/// degree step is tried before reporting failure.
pub fn ridge(ring: &Ring, gens: &[Poly]) -> Result<RidgeResult> {
    let tring = translation_ring(ring);
    let stabilizer = stabilizer_in(ring, gens, &tring)?;
    let maxdeg = gens.iter().filter_map(|g| g.total_degree()).max().unwrap_or(0).max(1);
    let mut qs: Vec<u64> = vec![1];
    if let Char::P(p) = ring.field().characteristic() {
        let mut q = p;
        while q <= maxdeg as u64 {
            qs.push(q);
            q *= p;
        }
    }
    let mut cands: Vec<AdditivePoly> = vec![];
    for &q in &qs {
        cands.extend(additive_candidates(&tring, &stabilizer, q));
    }
    let mut basis = additive_echelon(&tring, &cands);
    if let Some(bad) = first_unreduced(&stabilizer, &basis) {
        let still_bad = match ring.field().characteristic() {
            Char::Zero => Some(bad),
            Char::P(p) => {
                let last = *qs.last().unwrap();
                let next = if last == 1 { p } else { last * p };
                cands.extend(additive_candidates(&tring, &stabilizer, next));
                basis = additive_echelon(&tring, &cands);
                first_unreduced(&stabilizer, &basis)
            }
        };
        if let Some(bad) = still_bad {
            return Err(Error::Domain(format!(
                "ridge degree bound exhausted: stabilizer generator {bad} is not \
                 in the ideal of the additive polynomials found"
            )));
        }
    }
    Ok(RidgeResult { basis, stabilizer })
}

/// True iff translating along the subgroup cut out by `basis` maps the cone
/// of `gens` into itself: every X-coefficient of every g(X+T), reduced
/// modulo the graded pieces of the ideal and then by the basis, vanishes.
pub fn verify_translation_stability(
    ring: &Ring,
    gens: &[Poly],
    basis: &TriangularBasis,
) -> Result<bool> {
    check_cone_input(gens)?;
    assert_eq!(ring.nvars(), basis.ring.nvars());
    let mut cache = PieceCache::new(ring, gens);
    for g in gens {
        for c in stabilizer_parts(g, &basis.ring, &mut cache) {
            if !triangular_reduce(&c, basis).0.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Linear forms cutting out the reduced subscheme of the ridge, when that
/// subscheme is a linear space over the coefficient field.
///
/// Raises every basis element to the top degree q_e, echelonizes the
/// coefficient rows, and takes q_e-th roots coefficientwise; `None` when
/// some coefficient has no root in the field.
pub fn ridge_reduced_as_linear(basis: &TriangularBasis) -> Option<Vec<Poly>> {
    let tring = &basis.ring;
    let n = tring.nvars();
    if basis.elements.is_empty() {
        return Some(vec![]);
    }
    let qe = basis.elements.iter().map(|e| e.q).max().unwrap();
    let mut space = Subspace::empty(tring.field().clone(), n);
    for e in &basis.elements {
        space.insert(e.frobenius_power(qe / e.q).coeffs.clone());
    }
    let mut out = vec![];
    for row in space.rows() {
        let mut coeffs = Vec::with_capacity(n);
        for c in row {
            if c.is_zero() {
                coeffs.push(c.clone());
            } else {
                coeffs.push(c.qth_power_root(qe)?);
            }
        }
        out.push(linear_form_from(tring, &coeffs));
    }
    Some(out)
}

/// True iff the ideal of `gens` is generated by its intersection with the
/// subring generated by the given linear forms, checked degree by degree.
///
/// Membership of each generator in the subring alone would be too strict:
/// the ideal (x^2, x^3 + x^2 y) is generated by k[x]-elements even though
/// x^3 + x^2 y is not itself in k[x].
pub fn linear_subring_generates(ring: &Ring, gens: &[Poly], forms: &[Poly]) -> Result<bool> {
    check_cone_input(gens)?;
    for f in forms {
        if f.is_zero() || f.total_degree() != Some(1) || !f.is_homogeneous() {
            return Err(Error::Domain("subring test requires nonzero linear forms".into()));
        }
    }
    let n = ring.nvars();
    for g in gens {
        let d = match g.total_degree() {
            None => continue,
            Some(d) => d,
        };
        let mons_d = monomials_of_degree(n, d);
        let idx_d = column_index(&mons_d);
        let mut total = Subspace::empty(ring.field().clone(), mons_d.len());
        for dp in 1..=d {
            let mons_dp = monomials_of_degree(n, dp);
            let idx_dp = column_index(&mons_dp);
            let mut sym = Subspace::empty(ring.field().clone(), mons_dp.len());
            for m in monomials_of_degree(forms.len(), dp) {
                let mut prod = ring.one();
                for (i, &e) in m.iter().enumerate() {
                    if e > 0 {
                        prod = prod.mul(&forms[i].pow(e));
                    }
                }
                sym.insert(prod.to_vector(&idx_dp));
            }
            let inside = sym.intersect(&graded_piece(ring, gens, dp));
            for row in inside.rows() {
                let w = Poly::from_vector(ring, &mons_dp, row);
                for m in monomials_of_degree(n, d - dp) {
                    total.insert(w.mul_monomial(&m).to_vector(&idx_d));
                }
            }
        }
        if !total.contains(&g.to_vector(&idx_d)) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn embed_poly(g: &Poly, target: &Ring) -> Result<Poly> {
    let mut out = target.zero();
    for (e, c) in g.terms() {
        out = out.add(&target.monomial(e.clone(), c.embed_into(target.field())?));
    }
    Ok(out)
}

/// Smallest space of linear forms whose subring generates the ideal of
/// `gens`.
///
/// Over characteristic 0 or a field without parameters the reduced ridge is
/// already linear and is returned directly.  With parameters in
/// characteristic p, enough parameter roots are adjoined for the reduced
/// ridge to become linear over the extension, and the span of the
/// component vectors of those forms over the base field (the k-hull) is
/// returned; it is the smallest valid base-field space because any valid
/// space stays valid after base change and so contains the extension's
/// forms, hence their components.  The defining property is certified
/// degreewise on every run.
pub fn directrix(ring: &Ring, gens: &[Poly]) -> Result<DirectrixResult> {
    check_cone_input(gens)?;
    let n = ring.nvars();
    let field = ring.field();
    if gens.iter().all(|g| g.is_zero()) {
        return Ok(DirectrixResult { forms: vec![], dim: 0 });
    }
    let maxdeg = gens.iter().filter_map(|g| g.total_degree()).max().unwrap();
    let needs_descent =
        matches!(field.characteristic(), Char::P(_)) && field.arity() > 0 && maxdeg > 1;
    let forms: Vec<Poly> = if !needs_descent {
        let rid = ridge(ring, gens)?;
        let lin = ridge_reduced_as_linear(&rid.basis).ok_or_else(|| {
            Error::Domain(
                "internal: reduced ridge is not linear over a perfect coefficient field".into(),
            )
        })?;
        lin.iter().map(|f| transplant(f, ring)).collect()
    } else {
        let p = field.characteristic().prime().unwrap();
        let mut e = 0u32;
        while p.pow(e) < maxdeg as u64 {
            e += 1;
        }
        let mut attempt = 0;
        loop {
            attempt += 1;
            let kprime = field.adjoin_parameter_roots(e)?;
            let names: Vec<&str> = ring.vars().iter().map(|s| s.as_str()).collect();
            let rprime = Ring::new(kprime.clone(), &names)?;
            let gens2: Vec<Poly> =
                gens.iter().map(|g| embed_poly(g, &rprime)).collect::<Result<_>>()?;
            let rid = ridge(&rprime, &gens2)?;
            match ridge_reduced_as_linear(&rid.basis) {
                Some(lin) => {
                    let mut hull = Subspace::empty(field.clone(), n);
                    for form in &lin {
                        let coeffs = linear_form_coeffs(form);
                        let mut comps: BTreeMap<Vec<u32>, Vec<FieldElement>> = BTreeMap::new();
                        for (j, c) in coeffs.iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            for (r, comp) in c.hull_expand(field)? {
                                comps.entry(r).or_insert_with(|| vec![field.zero(); n])[j] = comp;
                            }
                        }
                        for (_, v) in comps {
                            hull.insert(v);
                        }
                    }
                    break hull.rows().iter().map(|row| linear_form_from(ring, row)).collect();
                }
                None if attempt == 1 => e += 1,
                None => {
                    return Err(Error::Domain(
                        "internal: ridge coefficients admit no roots after escalating the \
                         parameter-root tower"
                            .into(),
                    ))
                }
            }
        }
    };
    if !linear_subring_generates(ring, gens, &forms)? {
        return Err(Error::Domain("internal: directrix validity certificate failed".into()));
    }
    let dim = forms.len();
    Ok(DirectrixResult { forms, dim })
}

/// All nonzero Hasse derivatives D_A g with |A| < deg g, original
/// generators included (A = 0).  No radical is taken.
pub fn hs_stratum_derivative_ideal(ring: &Ring, gens: &[Poly]) -> Result<Vec<Poly>> {
    check_cone_input(gens)?;
    let n = ring.nvars();
    let mut out = vec![];
    for g in gens {
        let d = match g.total_degree() {
            None => continue,
            Some(d) => d,
        };
        for s in 0..d {
            for a in monomials_of_degree(n, s) {
                let der = g.hasse_derivative(&a);
                if !der.is_zero() {
                    out.push(der);
                }
            }
        }
    }
    Ok(out)
}
