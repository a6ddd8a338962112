//! Exact linear algebra over a coefficient [`Field`]: reduced echelon
//! subspaces, kernels, sums, intersections, and linear solving.
//!
//! Everything is deterministic; pivots are always the first nonzero column.

use crate::field::{Field, FieldElement};

/// Subspace of k^width held as a reduced row echelon basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: Field,
    width: usize,
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn empty(field: Field, width: usize) -> Subspace {
        Subspace { field, width, rows: vec![], pivots: vec![] }
    }

    pub fn from_vectors(field: Field, width: usize, vecs: &[Vec<FieldElement>]) -> Subspace {
        let mut s = Subspace::empty(field, width);
        for v in vecs {
            s.insert(v.clone());
        }
        s
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Normal form of `v` modulo the subspace (pivot coordinates cleared).
    pub fn reduce(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.width);
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let c = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                *o = o.sub(&r.mul(&c));
            }
        }
        out
    }

    /// Coefficients of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(v.len(), self.width);
        let mut out = v.to_vec();
        let mut coords = Vec::with_capacity(self.rows.len());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = out[p].clone();
            coords.push(c.clone());
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                *o = o.sub(&r.mul(&c));
            }
        }
        if out.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Insert a vector; returns true when the dimension grows.
    pub fn insert(&mut self, v: Vec<FieldElement>) -> bool {
        let mut v = self.reduce(&v);
        let lead = match v.iter().position(|x| !x.is_zero()) {
            None => return false,
            Some(l) => l,
        };
        let inv = v[lead].inv().expect("nonzero leading entry");
        for x in v.iter_mut() {
            *x = x.mul(&inv);
        }
        for row in self.rows.iter_mut() {
            if row[lead].is_zero() {
                continue;
            }
            let c = row[lead].clone();
            for (r, n) in row.iter_mut().zip(&v) {
                *r = r.sub(&n.mul(&c));
            }
        }
        let at = self.pivots.partition_point(|&p| p < lead);
        self.pivots.insert(at, lead);
        self.rows.insert(at, v);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.width, other.width);
        let mut s = self.clone();
        for row in &other.rows {
            s.insert(row.clone());
        }
        s
    }

    /// Zassenhaus intersection.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.width, other.width);
        let w = self.width;
        let zero = self.field.zero();
        let mut block = Subspace::empty(self.field.clone(), 2 * w);
        for row in &self.rows {
            let mut v = row.clone();
            v.extend(row.iter().cloned());
            block.insert(v);
        }
        for row in &other.rows {
            let mut v = row.clone();
            v.extend(std::iter::repeat(zero.clone()).take(w));
            block.insert(v);
        }
        let mut out = Subspace::empty(self.field.clone(), w);
        for (row, &p) in block.rows.iter().zip(&block.pivots) {
            if p >= w {
                out.insert(row[w..].to_vec());
            } else if row[..w].iter().all(|x| x.is_zero()) {
                out.insert(row[w..].to_vec());
            }
        }
        out
    }

    /// Column indices without a pivot (coordinates of a complement basis).
    pub fn free_columns(&self) -> Vec<usize> {
        let mut out = vec![];
        let mut it = self.pivots.iter().peekable();
        for j in 0..self.width {
            if it.peek() == Some(&&j) {
                it.next();
            } else {
                out.push(j);
            }
        }
        out
    }
}

/// Kernel of the linear map given by `rows` acting on k^width
/// (each row is one linear equation).
pub fn kernel_basis(field: &Field, rows: &[Vec<FieldElement>], width: usize) -> Vec<Vec<FieldElement>> {
    let space = Subspace::from_vectors(field.clone(), width, rows);
    let mut out = vec![];
    for free in space.free_columns() {
        let mut v = vec![field.zero(); width];
        v[free] = field.one();
        for (row, &p) in space.rows().iter().zip(space.pivots()) {
            v[p] = row[free].neg();
        }
        out.push(v);
    }
    out
}

/// Solve A x = b exactly. Returns None when inconsistent, otherwise a
/// particular solution together with a kernel basis (empty iff unique).
pub fn solve(
    field: &Field,
    a_rows: &[Vec<FieldElement>],
    width: usize,
    b: &[FieldElement],
) -> Option<(Vec<FieldElement>, Vec<Vec<FieldElement>>)> {
    assert_eq!(a_rows.len(), b.len());
    let mut aug = Subspace::empty(field.clone(), width + 1);
    for (row, rhs) in a_rows.iter().zip(b) {
        let mut v = row.clone();
        v.push(rhs.clone());
        aug.insert(v);
    }
    if aug.pivots().contains(&width) {
        return None;
    }
    let mut x = vec![field.zero(); width];
    for (row, &p) in aug.rows().iter().zip(aug.pivots()) {
        x[p] = row[width].clone();
    }
    let kernel = kernel_basis(field, a_rows, width);
    Some((x, kernel))
}

/// Rank of the matrix given by rows.
pub fn rank(field: &Field, rows: &[Vec<FieldElement>], width: usize) -> usize {
    Subspace::from_vectors(field.clone(), width, rows).dim()
}
