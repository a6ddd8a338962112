//! Hilbert-Samuel computations: graded dimensions of homogeneous ideals,
//! local HS functions at arbitrary maximal ideals through truncated models,
//! HS at generic points of linear subvarieties, iteration, nu-star, and
//! graded membership.

use crate::field::{Field, FieldElement};
use crate::intpoly::Char;
use crate::linalg::{kernel_basis, rank, Subspace};
use crate::poly::{Poly, Ring};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Truncated Hilbert-Samuel function: values H(0..=trunc), with the number
/// of partial-sum iterations applied recorded in `shift`.
#[derive(Clone, Debug)]
pub struct HsFunction {
    pub values: Vec<u64>,
    pub trunc: u32,
    pub shift: u32,
    pub tag: Option<String>,
}

impl HsFunction {
    pub fn new(values: Vec<u64>, trunc: u32) -> HsFunction {
        assert_eq!(values.len(), trunc as usize + 1);
        HsFunction { values, trunc, shift: 0, tag: None }
    }

    pub fn tagged(mut self, tag: &str) -> HsFunction {
        self.tag = Some(tag.to_string());
        self
    }

    /// t-fold partial-sum transform H(n) -> sum_{m<=n} H(m).
    pub fn iterate(&self, t: u32) -> HsFunction {
        let mut values = self.values.clone();
        for _ in 0..t {
            let mut acc = 0u64;
            for v in values.iter_mut() {
                acc += *v;
                *v = acc;
            }
        }
        HsFunction {
            values,
            trunc: self.trunc,
            shift: self.shift + t,
            tag: self.tag.clone(),
        }
    }

    /// Pointwise equality on the overlap of the two truncations.
    pub fn agrees_with(&self, other: &HsFunction) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a == b)
    }

    /// True when self >= other pointwise on the overlap.
    pub fn dominates(&self, other: &HsFunction) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a >= b)
    }
}

// --- monomial bookkeeping ----------------------------------------------------

/// All exponent vectors of total degree d, first variable heaviest first.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    if nvars == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = vec![];
    for e in (0..=d).rev() {
        for rest in monomials_of_degree(nvars - 1, d - e) {
            let mut v = Vec::with_capacity(nvars);
            v.push(e);
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

pub fn count_monomials_of_degree(nvars: usize, d: u32) -> u64 {
    if nvars == 0 {
        return if d == 0 { 1 } else { 0 };
    }
    // C(nvars-1+d, d)
    let mut num: u64 = 1;
    for i in 0..(nvars as u64 - 1) {
        num = num
            .checked_mul(d as u64 + i + 1)
            .expect("monomial count overflow")
            / (i + 1);
    }
    num
}

fn ordered_columns(nvars: usize, bound: u32, ascending: bool) -> Vec<Vec<u32>> {
    let degs: Vec<u32> = if ascending {
        (0..=bound).collect()
    } else {
        (0..=bound).rev().collect()
    };
    let mut out = vec![];
    for d in degs {
        out.extend(monomials_of_degree(nvars, d));
    }
    out
}

pub(crate) fn column_index(cols: &[Vec<u32>]) -> BTreeMap<Vec<u32>, usize> {
    cols.iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect()
}

// --- graded pieces of homogeneous ideals -------------------------------------

fn check_homogeneous(gens: &[Poly]) -> Result<()> {
    for (i, g) in gens.iter().enumerate() {
        if !g.is_homogeneous() {
            return Err(Error::Domain(format!("generator {} is not homogeneous", i + 1)));
        }
    }
    Ok(())
}

/// Span of the degree-d piece of the homogeneous ideal, on the monomial
/// basis of degree d.
pub fn graded_piece(ring: &Ring, gens: &[Poly], d: u32) -> Subspace {
    let mons = monomials_of_degree(ring.nvars(), d);
    let index = column_index(&mons);
    let mut space = Subspace::empty(ring.field().clone(), mons.len());
    for g in gens {
        let dg = match g.total_degree() {
            None => continue,
            Some(x) => x,
        };
        if dg > d {
            continue;
        }
        for m in monomials_of_degree(ring.nvars(), d - dg) {
            space.insert(g.mul_monomial(&m).to_vector(&index));
        }
    }
    space
}

pub fn graded_component_dims(ring: &Ring, gens: &[Poly], bound: u32) -> Result<Vec<u64>> {
    check_homogeneous(gens)?;
    Ok((0..=bound)
        .map(|d| graded_piece(ring, gens, d).dim() as u64)
        .collect())
}

/// H^(0) of the cone S/I at the origin: dim S_d - dim I_d.
pub fn hs_cone_origin(ring: &Ring, gens: &[Poly], bound: u32) -> Result<HsFunction> {
    let dims = graded_component_dims(ring, gens, bound)?;
    let values = dims
        .iter()
        .enumerate()
        .map(|(d, &x)| count_monomials_of_degree(ring.nvars(), d as u32) - x)
        .collect();
    Ok(HsFunction::new(values, bound))
}

/// Degrees of a minimal homogeneous generating system, ascending.
pub fn nu_star_graded(ring: &Ring, gens: &[Poly], bound: u32) -> Result<Vec<u32>> {
    check_homogeneous(gens)?;
    let maxdeg = gens.iter().filter_map(|g| g.total_degree()).max().unwrap_or(0);
    if bound < maxdeg {
        return Err(Error::Domain(format!(
            "degree bound {bound} is below the maximal generator degree {maxdeg}"
        )));
    }
    let mut out = vec![];
    let mut prev: Option<Subspace> = None;
    for d in 0..=bound {
        let piece = graded_piece(ring, gens, d);
        let mut shifted = Subspace::empty(ring.field().clone(), piece.width());
        if let Some(prev) = &prev {
            let mons_prev = monomials_of_degree(ring.nvars(), d - 1);
            let index = column_index(&monomials_of_degree(ring.nvars(), d));
            for row in prev.rows() {
                let p = Poly::from_vector(ring, &mons_prev, row);
                for i in 0..ring.nvars() {
                    shifted.insert(p.mul(&ring.var(i)).to_vector(&index));
                }
            }
        }
        for _ in 0..(piece.dim() - shifted.dim()) {
            out.push(d);
        }
        prev = Some(piece);
    }
    Ok(out)
}

/// Membership of a homogeneous polynomial in a homogeneous ideal.
pub fn graded_membership(ring: &Ring, f: &Poly, gens: &[Poly]) -> Result<bool> {
    check_homogeneous(gens)?;
    if f.is_zero() {
        return Ok(true);
    }
    if !f.is_homogeneous() {
        return Err(Error::Domain("membership test requires a homogeneous polynomial".into()));
    }
    let d = f.total_degree().unwrap();
    let mons = monomials_of_degree(ring.nvars(), d);
    let index = column_index(&mons);
    Ok(graded_piece(ring, gens, d).contains(&f.to_vector(&index)))
}

/// Cofactors h_i with f = sum h_i * g_i, if f lies in the ideal
/// (homogeneous data; each h_i comes out homogeneous).
pub fn graded_membership_certificate(
    ring: &Ring,
    f: &Poly,
    gens: &[Poly],
) -> Result<Option<Vec<Poly>>> {
    check_homogeneous(gens)?;
    if f.is_zero() {
        return Ok(Some(vec![ring.zero(); gens.len()]));
    }
    if !f.is_homogeneous() {
        return Err(Error::Domain("membership test requires a homogeneous polynomial".into()));
    }
    let d = f.total_degree().unwrap();
    let mons = monomials_of_degree(ring.nvars(), d);
    let index = column_index(&mons);
    // unknowns: one coefficient per (generator, shifting monomial)
    let mut columns: Vec<Vec<FieldElement>> = vec![];
    let mut labels: Vec<(usize, Vec<u32>)> = vec![];
    for (i, g) in gens.iter().enumerate() {
        let dg = match g.total_degree() {
            None => continue,
            Some(x) => x,
        };
        if dg > d {
            continue;
        }
        for m in monomials_of_degree(ring.nvars(), d - dg) {
            columns.push(g.mul_monomial(&m).to_vector(&index));
            labels.push((i, m));
        }
    }
    let a_rows: Vec<Vec<FieldElement>> = (0..mons.len())
        .map(|r| columns.iter().map(|c| c[r].clone()).collect())
        .collect();
    let b = f.to_vector(&index);
    match crate::linalg::solve(ring.field(), &a_rows, columns.len(), &b) {
        None => Ok(None),
        Some((x, _)) => {
            let mut cofs = vec![ring.zero(); gens.len()];
            for (coef, (i, m)) in x.iter().zip(&labels) {
                if !coef.is_zero() {
                    cofs[*i] = cofs[*i].add(&ring.monomial(m.clone(), coef.clone()));
                }
            }
            Ok(Some(cofs))
        }
    }
}

// --- local HS at the origin (fast path) ---------------------------------------

/// H^(0)(n) = dim (m^n + I)/(m^(n+1) + I) at the origin m = (x_1..x_n),
/// for n <= bound, via a single echelon of the ideal image in k[x]/m^(bound+1).
///
/// Columns are ordered by ascending degree; a pivot in a degree-n column then
/// removes exactly one monomial from the degree-n layer of the quotient.
pub fn hs_origin_truncated(ring: &Ring, gens: &[Poly], bound: u32) -> Result<HsFunction> {
    let n = ring.nvars();
    let cols = ordered_columns(n, bound, true);
    if cols.len() > 60_000 {
        return Err(Error::Unsupported(format!(
            "truncated model with {} monomials is too large",
            cols.len()
        )));
    }
    let index = column_index(&cols);
    let degrees: Vec<u32> = cols.iter().map(|m| m.iter().sum()).collect();
    let mut span = Subspace::empty(ring.field().clone(), cols.len());
    for g in gens {
        let ord = match g.order() {
            None => continue,
            Some(o) => o,
        };
        if ord > bound {
            continue;
        }
        for d in 0..=(bound - ord) {
            for m in monomials_of_degree(n, d) {
                let prod = g.mul_monomial(&m).truncate_above(bound);
                if !prod.is_zero() {
                    span.insert(prod.to_vector(&index));
                }
            }
        }
    }
    let mut pivot_per_degree = vec![0u64; bound as usize + 1];
    for &p in span.pivots() {
        pivot_per_degree[degrees[p] as usize] += 1;
    }
    let values = (0..=bound)
        .map(|d| count_monomials_of_degree(n, d) - pivot_per_degree[d as usize])
        .collect();
    Ok(HsFunction::new(values, bound))
}

// --- rational point detection -------------------------------------------------

/// If every generator is affine-linear, decide the point exactly; returns
/// None when some generator has degree >= 2 (general machinery required).
fn detect_affine_point(ring: &Ring, mgens: &[Poly]) -> Result<Option<Vec<FieldElement>>> {
    let n = ring.nvars();
    let nonzero: Vec<&Poly> = mgens.iter().filter(|g| !g.is_zero()).collect();
    if nonzero
        .iter()
        .any(|g| g.total_degree().unwrap() > 1)
    {
        return Ok(None);
    }
    // columns: x_1 .. x_n, 1
    let mut space = Subspace::empty(ring.field().clone(), n + 1);
    for g in &nonzero {
        let mut v = vec![ring.field().zero(); n + 1];
        for (e, c) in g.terms() {
            match e.iter().position(|&x| x > 0) {
                Some(i) => v[i] = c.clone(),
                None => v[n] = c.clone(),
            }
        }
        space.insert(v);
    }
    if space.pivots().contains(&n) {
        return Err(Error::NotMaximal("the ideal contains a nonzero constant".into()));
    }
    if space.dim() < n {
        return Err(Error::NotMaximal(
            "affine-linear generators cut out a positive-dimensional locus".into(),
        ));
    }
    // pivots are exactly the n variable columns; each row reads x_i + c
    let mut point = vec![ring.field().zero(); n];
    for (row, &p) in space.rows().iter().zip(space.pivots()) {
        point[p] = row[n].neg();
    }
    Ok(Some(point))
}

fn translate_to_origin(ring: &Ring, gens: &[Poly], point: &[FieldElement]) -> Vec<Poly> {
    let images: Vec<Poly> = (0..ring.nvars())
        .map(|i| ring.var(i).add(&ring.constant(point[i].clone())))
        .collect();
    gens.iter().map(|g| g.substitute(ring, &images)).collect()
}

// --- certified zero-dimensional quotients --------------------------------------

type Mat = Vec<Vec<FieldElement>>;

fn mat_identity(field: &Field, n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { field.one() } else { field.zero() })
                .collect()
        })
        .collect()
}

fn mat_mul(field: &Field, a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![field.zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[k][j].is_zero() {
                    continue;
                }
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
            }
        }
    }
    out
}

fn mat_apply(field: &Field, a: &Mat, v: &[FieldElement]) -> Vec<FieldElement> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(field.zero(), |acc, (x, y)| acc.add(&x.mul(y)))
        })
        .collect()
}

/// Certified model of a zero-dimensional quotient k[x]/J: a monomial basis
/// (an order ideal) plus the multiplication matrices of the variables.
///
/// Certification is the border-basis criterion: the complement monomials of
/// the echelonized generator-multiple span form an order ideal containing 1,
/// the induced multiplication operators commute pairwise, and every input
/// generator projects to zero. Together these guarantee the model is exactly
/// k[x]/J, whatever J is.
pub(crate) struct CertifiedQuotient {
    pub ring: Ring,
    pub bound: u32,
    index: BTreeMap<Vec<u32>, usize>,
    span: Subspace,
    pub comp_mons: Vec<Vec<u32>>,
    comp_cols: Vec<usize>,
    comp_index: BTreeMap<Vec<u32>, usize>,
    pub tmats: Vec<Mat>,
}

impl CertifiedQuotient {
    pub fn dim(&self) -> usize {
        self.comp_mons.len()
    }

    /// Coordinates of f on the complement basis; requires deg f <= bound.
    pub fn nf_coords(&self, f: &Poly) -> Vec<FieldElement> {
        debug_assert!(f.total_degree().unwrap_or(0) <= self.bound);
        let reduced = self.span.reduce(&f.to_vector(&self.index));
        self.comp_cols.iter().map(|&c| reduced[c].clone()).collect()
    }

    pub fn comp_poly(&self, coords: &[FieldElement]) -> Poly {
        Poly::from_vector(&self.ring, &self.comp_mons, coords)
    }

    fn one_coords(&self) -> Vec<FieldElement> {
        let mut v = vec![self.ring.field().zero(); self.dim()];
        let idx = self.comp_index[&vec![0u32; self.ring.nvars()]];
        v[idx] = self.ring.field().one();
        v
    }

    /// Multiplication matrix of the monomial x^e, assembled from the
    /// variable matrices (no degree restriction).
    pub fn monomial_matrix(&self, e: &[u32], cache: &mut BTreeMap<Vec<u32>, Mat>) -> Mat {
        if let Some(m) = cache.get(e) {
            return m.clone();
        }
        let mat = match e.iter().position(|&x| x > 0) {
            None => mat_identity(self.ring.field(), self.dim()),
            Some(i) => {
                let mut e2 = e.to_vec();
                e2[i] -= 1;
                let prev = self.monomial_matrix(&e2, cache);
                mat_mul(self.ring.field(), &self.tmats[i], &prev)
            }
        };
        cache.insert(e.to_vec(), mat.clone());
        mat
    }

    /// Image of an arbitrary polynomial in the model (projection along J).
    pub fn project(&self, f: &Poly, cache: &mut BTreeMap<Vec<u32>, Mat>) -> Vec<FieldElement> {
        let field = self.ring.field().clone();
        let one = self.one_coords();
        let mut acc = vec![field.zero(); self.dim()];
        for (e, c) in f.terms() {
            let img = mat_apply(&field, &self.monomial_matrix(e, cache), &one);
            for (a, x) in acc.iter_mut().zip(&img) {
                *a = a.add(&c.mul(x));
            }
        }
        acc
    }
}

/// Build and certify the quotient model, escalating the working degree.
/// `slack` is the extra degree room the caller needs for later products
/// (normal forms of generator * basis-element stay inside the model).
pub(crate) fn certify_zero_dim_quotient(
    ring: &Ring,
    jgens: &[Poly],
    slack: u32,
    what: &str,
) -> Result<CertifiedQuotient> {
    let n = ring.nvars();
    let maxdeg = jgens.iter().filter_map(|g| g.total_degree()).max().unwrap_or(0);
    let b0 = maxdeg + slack + 1;
    let mut reason = String::new();
    for round in 0..5u32 {
        let bound = b0 + 2 * round;
        let cols = ordered_columns(n, bound, false);
        if cols.len() > 20_000 {
            return Err(Error::Unsupported(format!(
                "certified model for {what} needs {} monomials; too large",
                cols.len()
            )));
        }
        let index = column_index(&cols);
        let mut span = Subspace::empty(ring.field().clone(), cols.len());
        for g in jgens {
            let dg = match g.total_degree() {
                None => continue,
                Some(d) => d,
            };
            if dg > bound {
                continue;
            }
            for d in 0..=(bound - dg) {
                for m in monomials_of_degree(n, d) {
                    span.insert(g.mul_monomial(&m).to_vector(&index));
                }
            }
        }
        let comp_cols = span.free_columns();
        let comp_mons: Vec<Vec<u32>> = comp_cols.iter().map(|&c| cols[c].clone()).collect();
        let comp_index: BTreeMap<Vec<u32>, usize> = comp_mons
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        if !comp_index.contains_key(&vec![0u32; n]) {
            return Err(Error::NotMaximal(format!("{what}: the ideal contains a unit")));
        }
        let maxcomp: u32 = comp_mons.iter().map(|m| m.iter().sum()).max().unwrap_or(0);
        if maxcomp + slack.max(1) > bound {
            reason = format!("complement reaches degree {maxcomp} at working degree {bound}");
            continue;
        }
        // order ideal: every divisor of a complement monomial is one too
        let order_ideal = comp_mons.iter().all(|m| {
            (0..n).all(|i| {
                if m[i] == 0 {
                    return true;
                }
                let mut d = m.clone();
                d[i] -= 1;
                comp_index.contains_key(&d)
            })
        });
        if !order_ideal {
            reason = format!("complement is not an order ideal at working degree {bound}");
            continue;
        }
        let mut cq = CertifiedQuotient {
            ring: ring.clone(),
            bound,
            index,
            span,
            comp_mons,
            comp_cols,
            comp_index,
            tmats: vec![],
        };
        // variable multiplication matrices, columns = NF(x_i * b_j)
        let r = cq.dim();
        let field = ring.field().clone();
        for i in 0..n {
            let mut mat = vec![vec![field.zero(); r]; r];
            for (j, b) in cq.comp_mons.iter().enumerate() {
                let mut e = b.clone();
                e[i] += 1;
                let col = cq.nf_coords(&cq.ring.monomial(e, field.one()));
                for (rowi, x) in col.into_iter().enumerate() {
                    mat[rowi][j] = x;
                }
            }
            cq.tmats.push(mat);
        }
        let commute = (0..n).all(|i| {
            (i + 1..n).all(|j| {
                mat_mul(&field, &cq.tmats[i], &cq.tmats[j])
                    == mat_mul(&field, &cq.tmats[j], &cq.tmats[i])
            })
        });
        if !commute {
            reason = format!("multiplication operators do not commute at working degree {bound}");
            continue;
        }
        let mut cache = BTreeMap::new();
        let gens_vanish = jgens
            .iter()
            .all(|g| cq.project(g, &mut cache).iter().all(|c| c.is_zero()));
        if !gens_vanish {
            reason = format!("a generator has a nonzero normal form at working degree {bound}");
            continue;
        }
        return Ok(cq);
    }
    Err(Error::NotMaximal(format!(
        "could not certify the quotient model for {what}: {reason}"
    )))
}

// --- residue field verification ------------------------------------------------

/// Check that the certified quotient A = k[x]/M is a field, so that M is
/// maximal. Decisive in characteristic p over a prime field; decisive for
/// reducedness everywhere; purely inseparable extensions of parametrized
/// fields are certified positively, anything else is reported unsupported.
fn verify_field(cq: &CertifiedQuotient) -> Result<()> {
    let field = cq.ring.field().clone();
    let r = cq.dim();
    if r == 1 {
        return Ok(());
    }
    let mut cache: BTreeMap<Vec<u32>, Mat> = BTreeMap::new();
    match field.characteristic() {
        Char::Zero => {
            // trace form nondegenerate <=> reduced (perfect field)
            let mut gram = vec![vec![field.zero(); r]; r];
            for i in 0..r {
                for j in i..r {
                    let e: Vec<u32> = cq.comp_mons[i]
                        .iter()
                        .zip(&cq.comp_mons[j])
                        .map(|(a, b)| a + b)
                        .collect();
                    let m = cq.monomial_matrix(&e, &mut cache);
                    let mut tr = field.zero();
                    for d in 0..r {
                        tr = tr.add(&m[d][d]);
                    }
                    gram[i][j] = tr.clone();
                    gram[j][i] = tr;
                }
            }
            if rank(&field, &gram, r) < r {
                return Err(Error::NotMaximal(
                    "the quotient by the point ideal is not reduced".into(),
                ));
            }
            Err(Error::Unsupported(
                "maximality verification over a characteristic-zero field is only \
                 implemented for rational points and non-reduced rejections"
                    .into(),
            ))
        }
        Char::P(p) => {
            // columns F_j = image of b_j^p
            let one = cq.one_coords();
            let fcols: Vec<Vec<FieldElement>> = cq
                .comp_mons
                .iter()
                .map(|b| {
                    let e: Vec<u32> = b.iter().map(|x| x * p as u32).collect();
                    mat_apply(&field, &cq.monomial_matrix(&e, &mut cache), &one)
                })
                .collect();
            let frows: Vec<Vec<FieldElement>> = (0..r)
                .map(|i| fcols.iter().map(|c| c[i].clone()).collect())
                .collect();
            let vker = kernel_basis(&field, &frows, r);
            let s = field.arity();
            let reduced = if vker.is_empty() {
                true
            } else if s == 0 {
                false
            } else {
                // x = sum d_j b_j with x^p = 0 exists iff the kernel of the
                // coefficient matrix meets (k^p)^r; test by expanding over
                // the p-th power decomposition of k and intersecting spans.
                !kernel_meets_pth_powers(&field, &vker, r, p)
            };
            if !reduced {
                return Err(Error::NotMaximal(
                    "the quotient by the point ideal is not reduced".into(),
                ));
            }
            if s == 0 {
                // number of factors = dim of the Frobenius fixed space
                let mut fm = vec![vec![field.zero(); r]; r];
                for (j, col) in fcols.iter().enumerate() {
                    for i in 0..r {
                        fm[i][j] = col[i].clone();
                    }
                }
                for i in 0..r {
                    fm[i][i] = fm[i][i].sub(&field.one());
                }
                let fixed = kernel_basis(&field, &fm, r);
                if fixed.len() == 1 {
                    Ok(())
                } else {
                    Err(Error::NotMaximal(format!(
                        "the quotient splits into {} factors",
                        fixed.len()
                    )))
                }
            } else {
                // purely inseparable sufficient check: iterated Frobenius
                // spans shrink to the scalars
                let fmat: Mat = (0..r)
                    .map(|i| fcols.iter().map(|c| c[i].clone()).collect())
                    .collect();
                let mut v = Subspace::empty(field.clone(), r);
                for j in 0..r {
                    let mut u = vec![field.zero(); r];
                    u[j] = field.one();
                    v.insert(u);
                }
                let one_idx = cq.comp_index[&vec![0u32; cq.ring.nvars()]];
                for _ in 0..=r {
                    let rows: Vec<Vec<FieldElement>> = v
                        .rows()
                        .iter()
                        .map(|row| {
                            let powed: Vec<FieldElement> =
                                row.iter().map(|c| c.frobenius()).collect();
                            mat_apply(&field, &fmat, &powed)
                        })
                        .collect();
                    let next = Subspace::from_vectors(field.clone(), r, &rows);
                    let scalars_only = next.dim() <= 1
                        && next
                            .rows()
                            .iter()
                            .all(|row| {
                                row.iter().enumerate().all(|(i, c)| i == one_idx || c.is_zero())
                            });
                    if scalars_only {
                        return Ok(());
                    }
                    if next.dim() == v.dim() {
                        break;
                    }
                    v = next;
                }
                Err(Error::Unsupported(
                    "maximality verification over parametrized fields covers only purely \
                     inseparable residue extensions"
                        .into(),
                ))
            }
        }
    }
}

/// Does the k-span of `vker` contain a nonzero vector with all entries
/// p-th powers? Expand over the residue basis of k over k^p and intersect.
fn kernel_meets_pth_powers(
    field: &Field,
    vker: &[Vec<FieldElement>],
    width: usize,
    p: u64,
) -> bool {
    let s = field.arity();
    let residues = monomials_below(s, p as u32);
    let rcount = residues.len();
    let big_width = width * rcount;
    let res_index: BTreeMap<Vec<u32>, usize> = residues
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), i))
        .collect();
    let mut w = Subspace::empty(field.clone(), big_width);
    for v in vker {
        for res in &residues {
            let tmon = FieldElement::param_monomial(field, res);
            let mut big = vec![field.zero(); big_width];
            for (i, x) in v.iter().enumerate() {
                let scaled = x.mul(&tmon);
                for (rexp, root) in scaled.pth_root_components() {
                    big[i * rcount + res_index[&rexp]] = root;
                }
            }
            w.insert(big);
        }
    }
    let mut z = Subspace::empty(field.clone(), big_width);
    for i in 0..width {
        let mut u = vec![field.zero(); big_width];
        u[i * rcount + res_index[&vec![0u32; s]]] = field.one();
        z.insert(u);
    }
    let total = w.sum(&z).dim();
    w.dim() + z.dim() > total
}

/// All exponent vectors with every entry < p (residues of k over k^p).
fn monomials_below(arity: usize, p: u32) -> Vec<Vec<u32>> {
    if arity == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for rest in monomials_below(arity - 1, p) {
        for e in 0..p {
            let mut v = vec![e];
            v.extend(rest.clone());
            out.push(v);
        }
    }
    out
}

// --- local HS at a general maximal ideal ----------------------------------------

/// Truncated local algebra at a maximal ideal M: the certified model of
/// k[x]/M^(trunc+1), the image of the ideal, and the M-adic filtration.
pub struct TruncatedLocalAlgebra {
    pub ring: Ring,
    pub trunc: u32,
    pub residue_degree: usize,
    pub ideal_image: Subspace,
    pub filtration: Vec<Subspace>,
    pub hs: HsFunction,
}

fn products_of(ring: &Ring, gens: &[Poly], k: usize) -> Vec<Poly> {
    fn rec(ring: &Ring, gens: &[Poly], from: usize, k: usize, cur: &Poly, out: &mut Vec<Poly>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..gens.len() {
            rec(ring, gens, i, k - 1, &cur.mul(&gens[i]), out);
        }
    }
    let mut out = vec![];
    rec(ring, gens, 0, k, &ring.one(), &mut out);
    out
}

pub fn truncated_local_algebra(
    ring: &Ring,
    igens: &[Poly],
    mgens: &[Poly],
    bound: u32,
) -> Result<TruncatedLocalAlgebra> {
    let field = ring.field().clone();
    let mgens: Vec<Poly> = mgens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if mgens.is_empty() && ring.nvars() > 0 {
        return Err(Error::NotMaximal("the zero ideal is not maximal".into()));
    }
    // residue field first: certifies maximality and yields [kappa : k]
    let residue = certify_zero_dim_quotient(ring, &mgens, 1, "the residue field")?;
    verify_field(&residue)?;
    let r = residue.dim();

    // certified model of k[x]/M^(bound+1)
    let slack = igens
        .iter()
        .chain(mgens.iter())
        .filter_map(|g| g.total_degree())
        .max()
        .unwrap_or(1)
        .max(1);
    let jgens = products_of(ring, &mgens, bound as usize + 1);
    let cq = certify_zero_dim_quotient(ring, &jgens, slack, "the truncated local ring")?;
    let expected = (r as u64) * count_monomials_up_to(ring.nvars(), bound);
    if cq.dim() as u64 != expected {
        return Err(Error::Domain(format!(
            "internal: certified truncated model has dimension {} but the residue degree \
             predicts {}",
            cq.dim(),
            expected
        )));
    }

    let dim = cq.dim();
    // image of the ideal
    let mut ideal_image = Subspace::empty(field.clone(), dim);
    for f in igens {
        for b in &cq.comp_mons {
            let prod = f.mul_monomial(b);
            ideal_image.insert(cq.nf_coords(&prod));
        }
    }
    // M-adic layers: L_0 = everything, L_{n+1} = span of mgens * L_n
    let mut layer = Subspace::empty(field.clone(), dim);
    for j in 0..dim {
        let mut u = vec![field.zero(); dim];
        u[j] = field.one();
        layer.insert(u);
    }
    let mut filtration = vec![];
    let mut dims = vec![];
    for _ in 0..=(bound + 1) {
        let with_ideal = ideal_image.sum(&layer);
        dims.push(with_ideal.dim());
        filtration.push(with_ideal);
        let mut next = Subspace::empty(field.clone(), dim);
        for row in layer.rows() {
            let p = cq.comp_poly(row);
            for g in &mgens {
                next.insert(cq.nf_coords(&g.mul(&p)));
            }
        }
        layer = next;
    }
    let mut values = Vec::with_capacity(bound as usize + 1);
    for nidx in 0..=(bound as usize) {
        let diff = dims[nidx] - dims[nidx + 1];
        if diff % r != 0 {
            return Err(Error::Domain(format!(
                "internal: layer dimension {diff} is not divisible by the residue degree {r}"
            )));
        }
        values.push((diff / r) as u64);
    }
    Ok(TruncatedLocalAlgebra {
        ring: ring.clone(),
        trunc: bound,
        residue_degree: r,
        ideal_image,
        filtration,
        hs: HsFunction::new(values, bound),
    })
}

pub fn count_monomials_up_to(nvars: usize, bound: u32) -> u64 {
    (0..=bound).map(|d| count_monomials_of_degree(nvars, d)).sum()
}

/// Local Hilbert-Samuel function of k[x]/I at the maximal ideal M.
/// Rational points take the translated fast path; everything else goes
/// through the certified truncated model.
pub fn hs_local_truncated(
    ring: &Ring,
    igens: &[Poly],
    mgens: &[Poly],
    bound: u32,
) -> Result<HsFunction> {
    match detect_affine_point(ring, mgens)? {
        Some(point) => {
            let translated = translate_to_origin(ring, igens, &point);
            hs_origin_truncated(ring, &translated, bound)
        }
        None => Ok(truncated_local_algebra(ring, igens, mgens, bound)?.hs),
    }
}

// --- generic points of linear subvarieties ---------------------------------------

/// HS function of k[x]/I at the generic point of the linear subvariety
/// V(y-variables): coefficients move into k(free variables), and the local
/// ring at (y) over that fraction field is truncated at the origin.
pub fn hs_generic_point(
    ring: &Ring,
    igens: &[Poly],
    yvars: &[usize],
    bound: u32,
) -> Result<HsFunction> {
    let n = ring.nvars();
    let mut is_y = vec![false; n];
    for &i in yvars {
        if i >= n {
            return Err(Error::Domain(format!("variable index {i} out of range")));
        }
        if is_y[i] {
            return Err(Error::Domain("duplicate stratum variable".into()));
        }
        is_y[i] = true;
    }
    for (gi, g) in igens.iter().enumerate() {
        for (e, _) in g.terms() {
            let ydeg: u32 = (0..n).filter(|&i| is_y[i]).map(|i| e[i]).sum();
            if ydeg == 0 {
                return Err(Error::Domain(format!(
                    "generator {} does not vanish on the chosen linear stratum",
                    gi + 1
                )));
            }
        }
    }
    let wvars: Vec<usize> = (0..n).filter(|&i| !is_y[i]).collect();
    let wnames: Vec<&str> = wvars.iter().map(|&i| ring.vars()[i].as_str()).collect();
    let field2 = ring.field().with_params_appended(&wnames)?;
    let s = ring.field().arity();
    let inject_map: Vec<usize> = (0..s).collect();
    let ynames: Vec<&str> = yvars.iter().map(|&i| ring.vars()[i].as_str()).collect();
    let ring2 = Ring::new(field2.clone(), &ynames)?;
    let mut mapped = vec![];
    for g in igens {
        let mut out = ring2.zero();
        for (e, c) in g.terms() {
            let mut param_exps = vec![0u32; s + wvars.len()];
            for (slot, &i) in wvars.iter().enumerate() {
                param_exps[s + slot] = e[i];
            }
            let coeff = c
                .inject_params(&field2, &inject_map)
                .mul(&FieldElement::param_monomial(&field2, &param_exps));
            let yexps: Vec<u32> = yvars.iter().map(|&i| e[i]).collect();
            out = out.add(&ring2.monomial(yexps, coeff));
        }
        mapped.push(out);
    }
    let mut hs = hs_origin_truncated(&ring2, &mapped, bound)?;
    hs.tag = Some("generic point".into());
    Ok(hs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qring(vars: &[&str]) -> Ring {
        Ring::new(Field::rationals(), vars).unwrap()
    }

    fn parse(ring: &Ring, texts: &[&str]) -> Vec<Poly> {
        texts
            .iter()
            .map(|t| ring.parse_expr(t, 1, 0).unwrap())
            .collect()
    }

    #[test]
    fn test_graded_component_dims() {
        let r = qring(&["x", "y", "z"]);
        let gens = parse(&r, &["x^2", "y^2"]);
        let dims = graded_component_dims(&r, &gens, 4).unwrap();
        assert_eq!(dims[2], 2);
        assert_eq!(graded_component_dims(&r, &[], 3).unwrap(), vec![0, 0, 0, 0]);
        let r2 = qring(&["x", "y"]);
        let dims2 = graded_component_dims(&r2, &parse(&r2, &["x"]), 4).unwrap();
        assert_eq!(dims2, vec![0, 1, 2, 3, 4]);
        // non-homogeneous rejected
        assert!(graded_component_dims(&r2, &parse(&r2, &["x + x^2"]), 2).is_err());
    }

    #[test]
    fn test_hs_cone_origin() {
        let r2 = qring(&["x", "y"]);
        let h = hs_cone_origin(&r2, &[], 4).unwrap();
        assert_eq!(h.values, vec![1, 2, 3, 4, 5]);
        let r3 = qring(&["x", "y", "z"]);
        let h = hs_cone_origin(&r3, &parse(&r3, &["x^2", "y^2"]), 5).unwrap();
        assert_eq!(h.values, vec![1, 3, 4, 4, 4, 4]);
        let k = Field::fraction_field(Char::P(2), &["t"]).unwrap();
        let rt = Ring::new(k, &["X", "Y"]).unwrap();
        let gens = parse(&rt, &["X^2 + t*Y^2"]);
        let h = hs_cone_origin(&rt, &gens, 4).unwrap();
        assert_eq!(h.values, vec![1, 2, 2, 2, 2]);
    }

    #[test]
    fn test_hs_iterate() {
        let h = HsFunction::new(vec![1, 1, 1, 1, 0, 0], 5);
        let h1 = h.iterate(1);
        assert_eq!(h1.values, vec![1, 2, 3, 4, 4, 4]);
        assert_eq!(h1.shift, 1);
        assert_eq!(h.iterate(0).values, h.values);
        let g = HsFunction::new(vec![1, 3, 4, 4], 3);
        assert_eq!(g.iterate(1).values, vec![1, 4, 8, 12]);
        // composition law
        assert_eq!(h.iterate(3).values, h.iterate(1).iterate(2).values);
    }

    #[test]
    fn test_hs_origin_vs_cone_two_paths() {
        let r3 = qring(&["x", "y", "z"]);
        let gens = parse(&r3, &["x^2", "y^2"]);
        let a = hs_cone_origin(&r3, &gens, 5).unwrap();
        let b = hs_origin_truncated(&r3, &gens, 5).unwrap();
        let c = hs_local_truncated(&r3, &gens, &parse(&r3, &["x", "y", "z"]), 5).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.values, c.values);
    }

    #[test]
    fn test_hs_origin_nonhomogeneous_standard_example() {
        // initial ideal is (x1^2, x2^2)
        let r = qring(&["x1", "x2", "x3"]);
        let gens = parse(&r, &["x1^2 + x2*x3^2", "x2^2"]);
        let h = hs_origin_truncated(&r, &gens, 6).unwrap();
        assert_eq!(h.values, vec![1, 3, 4, 4, 4, 4, 4]);
    }

    #[test]
    fn test_hs_origin_unit_ideal() {
        let r = qring(&["x", "y"]);
        let gens = parse(&r, &["1 + x"]);
        let h = hs_origin_truncated(&r, &gens, 3).unwrap();
        assert_eq!(h.values, vec![0, 0, 0, 0]);
    }

    #[test]
    fn test_hs_origin_principal_with_lower_order_tail() {
        // x^2 + y^3: the localization sees in(I) = (x^2)
        let r = qring(&["x", "y"]);
        let gens = parse(&r, &["x^2 + y^3"]);
        let h = hs_origin_truncated(&r, &gens, 4).unwrap();
        assert_eq!(h.values, vec![1, 2, 2, 2, 2]);
    }

    #[test]
    fn test_hs_local_rational_point_translation() {
        // I = (y - x^2) at the point (1,1): smooth curve, H = (1,1,1,...)
        let r = qring(&["x", "y"]);
        let igens = parse(&r, &["y - x^2"]);
        let mgens = parse(&r, &["x - 1", "y - 1"]);
        let h = hs_local_truncated(&r, &igens, &mgens, 4).unwrap();
        assert_eq!(h.values, vec![1, 1, 1, 1, 1]);
        // regular ambient point
        let h0 = hs_local_truncated(&r, &[], &parse(&r, &["x", "y"]), 4).unwrap();
        assert_eq!(h0.values, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn test_hs_local_inseparable_point() {
        // I = (X^2 + tY^2) over F2(t) at M = (X^2 + t, Y - 1): a regular
        // point with inseparable residue field, H = (1,1,1,...)
        let k = Field::fraction_field(Char::P(2), &["t"]).unwrap();
        let r = Ring::new(k, &["X", "Y"]).unwrap();
        let igens = parse(&r, &["X^2 + t*Y^2"]);
        let mgens = parse(&r, &["X^2 + t", "Y - 1"]);
        let alg = truncated_local_algebra(&r, &igens, &mgens, 3).unwrap();
        assert_eq!(alg.residue_degree, 2);
        assert_eq!(alg.hs.values, vec![1, 1, 1, 1]);
        let h = hs_local_truncated(&r, &igens, &mgens, 3).unwrap();
        assert_eq!(h.values, vec![1, 1, 1, 1]);
    }

    #[test]
    fn test_hs_local_separable_extension_point() {
        // ambient plane over F2 at the F4-point (x^2+x+1, y)
        let k = Field::finite(2).unwrap();
        let r = Ring::new(k, &["x", "y"]).unwrap();
        let mgens = parse(&r, &["x^2 + x + 1", "y"]);
        let alg = truncated_local_algebra(&r, &[], &mgens, 3).unwrap();
        assert_eq!(alg.residue_degree, 2);
        assert_eq!(alg.hs.values, vec![1, 2, 3, 4]);
    }

    #[test]
    fn test_maximality_rejections() {
        let r = qring(&["x", "y"]);
        // positive-dimensional
        match hs_local_truncated(&r, &[], &parse(&r, &["x"]), 2) {
            Err(Error::NotMaximal(_)) => {}
            other => panic!("expected NotMaximal, got {other:?}"),
        }
        // contains a unit
        match hs_local_truncated(&r, &[], &parse(&r, &["x", "y", "x + 1"]), 2) {
            Err(Error::NotMaximal(_)) => {}
            other => panic!("expected NotMaximal, got {other:?}"),
        }
        // non-reduced, char 0
        match hs_local_truncated(&r, &[], &parse(&r, &["x^2", "y"]), 2) {
            Err(Error::NotMaximal(_)) => {}
            other => panic!("expected NotMaximal, got {other:?}"),
        }
        // non-reduced, char p
        let k5 = Field::finite(5).unwrap();
        let r5 = Ring::new(k5, &["x", "y"]).unwrap();
        let m5 = parse(&r5, &["x^2", "y - 1"]);
        match hs_local_truncated(&r5, &[], &m5, 2) {
            Err(Error::NotMaximal(_)) => {}
            other => panic!("expected NotMaximal, got {other:?}"),
        }
        // char 0, genuine field extension: honestly unsupported
        let m = parse(&r, &["x^2 - 2", "y"]);
        match hs_local_truncated(&r, &[], &m, 2) {
            Err(Error::Unsupported(_)) => {}
            other => panic!("expected Unsupported, got {other:?}"),
        }
        // char p, splits into two rational points
        let k3 = Field::finite(3).unwrap();
        let r3 = Ring::new(k3, &["x"]).unwrap();
        let m3 = parse(&r3, &["x^2 - 1"]);
        match hs_local_truncated(&r3, &[], &m3, 2) {
            Err(Error::NotMaximal(_)) => {}
            other => panic!("expected NotMaximal, got {other:?}"),
        }
    }

    #[test]
    fn test_hs_generic_point_examples() {
        let r = qring(&["x1", "x2", "x3"]);
        let gens = parse(&r, &["x1^2 + x2*x3^2", "x2^2"]);
        let h = hs_generic_point(&r, &gens, &[0, 1], 5).unwrap();
        assert_eq!(h.values, vec![1, 1, 1, 1, 0, 0]);

        let r2 = qring(&["x", "y", "z"]);
        let gens2 = parse(&r2, &["x^2", "y^2"]);
        let h2 = hs_generic_point(&r2, &gens2, &[0, 1], 4).unwrap();
        assert_eq!(h2.values, vec![1, 2, 1, 0, 0]);

        let h3 = hs_generic_point(&r2, &[], &[], 3).unwrap();
        assert_eq!(h3.values, vec![1, 0, 0, 0]);

        // a generator outside the stratum ideal is rejected
        assert!(hs_generic_point(&r2, &parse(&r2, &["x^2 + z^2"]), &[0, 1], 3).is_err());
    }

    #[test]
    fn test_nu_star() {
        let r = qring(&["x", "y"]);
        assert_eq!(nu_star_graded(&r, &parse(&r, &["x^2", "y^2"]), 5).unwrap(), vec![2, 2]);
        assert_eq!(nu_star_graded(&r, &parse(&r, &["x"]), 3).unwrap(), vec![1]);
        // presentation independence
        let a = nu_star_graded(&r, &parse(&r, &["x^2", "y^2", "x^2 + y^2"]), 6).unwrap();
        assert_eq!(a, vec![2, 2]);
        let b = nu_star_graded(
            &r,
            &parse(&r, &["x^2 + y^2", "x^2 - y^2", "x^3", "x^2*y"]),
            6,
        )
        .unwrap();
        assert_eq!(b, vec![2, 2]);
        // triangular additive family over F2: degrees are the q_i
        let k = Field::finite(2).unwrap();
        let rt = Ring::new(k, &["S", "T"]).unwrap();
        let gens = parse(&rt, &["S^2", "T^4"]);
        assert_eq!(nu_star_graded(&rt, &gens, 8).unwrap(), vec![2, 4]);
        // bound below max degree is refused
        assert!(nu_star_graded(&rt, &gens, 3).is_err());
    }

    #[test]
    fn test_graded_membership() {
        let r = qring(&["x", "y"]);
        let gens = parse(&r, &["x^2", "y^2"]);
        let f = r.parse_expr("x^2*y", 1, 0).unwrap();
        assert!(graded_membership(&r, &f, &gens).unwrap());
        let g = r.parse_expr("x*y", 1, 0).unwrap();
        assert!(!graded_membership(&r, &g, &gens).unwrap());
        assert!(graded_membership(&r, &r.zero(), &gens).unwrap());
        // certificate recomposes
        let cert = graded_membership_certificate(&r, &f, &gens).unwrap().unwrap();
        let mut acc = r.zero();
        for (h, g) in cert.iter().zip(&gens) {
            acc = acc.add(&h.mul(g));
        }
        assert_eq!(acc, f);
        assert!(graded_membership_certificate(&r, &g, &gens).unwrap().is_none());
    }

    #[test]
    fn test_semicontinuity_spot_check() {
        // quadric cone x^2 - yz over Q: the origin (vertex) dominates a
        // smooth point such as (0,1,0) pointwise at every common shift
        let r = qring(&["x", "y", "z"]);
        let gens = parse(&r, &["x^2 - y*z"]);
        let origin = hs_origin_truncated(&r, &gens, 4).unwrap();
        let mgens = parse(&r, &["x", "y - 1", "z"]);
        let smooth = hs_local_truncated(&r, &gens, &mgens, 4).unwrap();
        assert_eq!(origin.values, vec![1, 3, 5, 7, 9]);
        assert_eq!(smooth.values, vec![1, 2, 3, 4, 5]);
        assert!(origin.iterate(3).dominates(&smooth.iterate(3)));
    }
}
