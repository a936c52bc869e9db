//! Exact linear algebra over the rationals.
//!
//! Everything here is arbitrary precision: vectors and matrices hold
//! [`BigRational`] entries and subspaces are stored in reduced row echelon
//! form, so two subspaces are equal exactly when their stored bases are.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Exact rational scalar.
pub type Scalar = BigRational;

/// Build a scalar from an integer.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Build a scalar `p/q`. Panics on `q == 0`.
pub fn ratio(p: i64, q: i64) -> Scalar {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Column vector in `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vector(Vec<Scalar>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![Scalar::zero(); n])
    }

    pub fn new(entries: Vec<Scalar>) -> Self {
        Vector(entries)
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        Vector(entries.iter().map(|&x| int(x)).collect())
    }

    /// Standard basis vector `e_i` in dimension `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Scalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.0
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    pub fn set(&mut self, i: usize, x: Scalar) {
        self.0[i] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Largest index carrying a nonzero coefficient.
    pub fn top_index(&self) -> Option<usize> {
        self.0.iter().rposition(|x| !x.is_zero())
    }

    /// Smallest index carrying a nonzero coefficient.
    pub fn leading_index(&self) -> Option<usize> {
        self.0.iter().position(|x| !x.is_zero())
    }

    /// Indices with nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.0[i].is_zero()).collect()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Vector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Vector) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Vector) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// `self += c * other`, in place.
    pub fn axpy(&mut self, c: &Scalar, other: &Vector) -> Result<()> {
        check_dim(self.dim(), other.dim())?;
        if c.is_zero() {
            return Ok(());
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
        Ok(())
    }

    /// Rescale so the coefficient at the top index is 1. Zero stays zero.
    pub fn normalized_at_top(&self) -> Self {
        match self.top_index() {
            Some(h) => {
                let inv = self.0[h].recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Rescale so the coefficient at the leading (lowest) index is 1.
    pub fn normalized_at_leading(&self) -> Self {
        match self.leading_index() {
            Some(h) => {
                let inv = self.0[h].recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Pad with zeros (or truncate) to dimension `n`.
    pub fn resized(&self, n: usize) -> Self {
        let mut e = self.0.clone();
        e.resize(n, Scalar::zero());
        Vector(e)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(scalar_to_f64).collect()
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Lossy conversion used only at the boundary to floating code.
pub fn scalar_to_f64(x: &Scalar) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to a bit-length split for huge numerators/denominators.
    let n = x.numer();
    let d = x.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let nf = (n.abs() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let df = (d >> shift_d as usize).to_f64().unwrap_or(1.0);
    let sign = if n.is_negative() { -1.0 } else { 1.0 };
    sign * nf / df * 2f64.powi((shift_n - shift_d) as i32)
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    /// Build from rows. All rows must share a length.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_dim(c, row.len())?;
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_row_vectors(vs: &[Vector], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(vs.len() * cols);
        for v in vs {
            check_dim(cols, v.dim())?;
            data.extend(v.entries().iter().cloned());
        }
        Ok(Matrix { rows: vs.len(), cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_col_vectors(vs: &[Vector], rows: usize) -> Result<Self> {
        Ok(Self::from_row_vectors(vs, rows)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector::new(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> Vector {
        Vector::new((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Self> {
        check_dim(self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        check_dim(self.cols, v.dim())?;
        let mut out = Vector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = Scalar::zero();
            for j in 0..self.cols {
                let a = self.get(i, j);
                let b = v.get(j);
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            out.set(i, acc);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Self> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// Non-negative integer power of a square matrix.
    pub fn pow(&self, e: usize) -> Result<Self> {
        check_dim(self.rows, self.cols)?;
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Image of the matrix applied to every basis vector of `s`.
    pub fn image_of(&self, s: &Subspace) -> Result<Subspace> {
        check_dim(self.cols, s.ambient_dim())?;
        let imgs = s.basis().iter().map(|b| self.mul_vec(b)).collect::<Result<Vec<_>>>()?;
        span(&imgs, self.rows)
    }
}

/// Reduced row echelon form and rank.
///
/// Pivots are normalised to 1 and every pivot column is zero outside its
/// pivot row. Zero rows sink to the bottom; the shape is preserved.
pub fn rref(m: &Matrix) -> (Matrix, usize) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a.get(r, c).recip();
        for j in c..cols {
            let idx = r * cols + j;
            if !a.data[idx].is_zero() {
                a.data[idx] = &a.data[idx] * &inv;
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in c..cols {
                let pr = a.data[r * cols + j].clone();
                if !pr.is_zero() {
                    a.data[i * cols + j] -= &f * pr;
                }
            }
        }
        r += 1;
    }
    (a, r)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1
}

/// Null space `{v : m v = 0}` as a subspace of `Q^cols`.
pub fn kernel(m: &Matrix) -> Subspace {
    let (r, rk) = rref(m);
    let cols = m.cols;
    let mut pivots = Vec::with_capacity(rk);
    for i in 0..rk {
        let c = (0..cols).find(|&j| !r.get(i, j).is_zero()).expect("nonzero pivot row");
        pivots.push(c);
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|j| !pivots.contains(j)) {
        let mut v = Vector::zeros(cols);
        v.set(free, Scalar::one());
        for (i, &pc) in pivots.iter().enumerate() {
            v.set(pc, -r.get(i, free).clone());
        }
        basis.push(v);
    }
    span(&basis, cols).expect("kernel vectors share the ambient dimension")
}

/// Span of a list of vectors in `Q^ambient_dim`.
pub fn span(vs: &[Vector], ambient_dim: usize) -> Result<Subspace> {
    if vs.is_empty() {
        return Ok(Subspace::zero(ambient_dim));
    }
    let m = Matrix::from_row_vectors(vs, ambient_dim)?;
    let (r, rk) = rref(&m);
    Ok(Subspace { ambient_dim, basis: (0..rk).map(|i| r.row(i)).collect() })
}

/// Subspace of `Q^n` held in canonical reduced row echelon form.
///
/// The zero subspace has an empty basis and keeps its ambient dimension,
/// so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::coordinate(ambient_dim, 0..ambient_dim)
    }

    /// Span of `e_i` for the given indices. Out-of-range indices are skipped.
    pub fn coordinate(ambient_dim: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut ids: Vec<usize> = idx.into_iter().filter(|&i| i < ambient_dim).collect();
        ids.sort_unstable();
        ids.dedup();
        Subspace { ambient_dim, basis: ids.into_iter().map(|i| Vector::basis(ambient_dim, i)).collect() }
    }

    /// `M_k = span{e_0, ..., e_k}`; `k = -1` gives the zero subspace.
    pub fn chain(ambient_dim: usize, k: i64) -> Self {
        if k < 0 {
            return Self::zero(ambient_dim);
        }
        Self::coordinate(ambient_dim, 0..=(k as usize))
    }

    /// Parse-and-canonicalise helper: span of the given rows.
    pub fn from_basis(ambient_dim: usize, vs: &[Vector]) -> Result<Self> {
        span(vs, ambient_dim)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical RREF basis.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn contains(&self, v: &Vector) -> Result<bool> {
        check_dim(self.ambient_dim, v.dim())?;
        let mut r = v.clone();
        for b in &self.basis {
            let p = b.leading_index().expect("basis vectors are nonzero");
            let c = r.get(p).clone();
            if !c.is_zero() {
                r.axpy(&-c, b)?;
            }
        }
        Ok(r.is_zero())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        check_dim(self.ambient_dim, other.ambient_dim)?;
        for b in &self.basis {
            if !other.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        check_dim(self.ambient_dim, other.ambient_dim)?;
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        span(&all, self.ambient_dim)
    }

    /// Intersection via the kernel of `[U | -W]`.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        check_dim(self.ambient_dim, other.ambient_dim)?;
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        let mut cols: Vec<Vector> = self.basis.clone();
        cols.extend(other.basis.iter().map(|w| w.scale(&int(-1))));
        let m = Matrix::from_col_vectors(&cols, self.ambient_dim)?;
        let k = kernel(&m);
        let mut vs = Vec::with_capacity(k.dim());
        for c in k.basis() {
            let mut v = Vector::zeros(self.ambient_dim);
            for i in 0..a {
                v.axpy(c.get(i), &self.basis[i])?;
            }
            vs.push(v);
        }
        span(&vs, self.ambient_dim)
    }

    /// Basis with pairwise distinct top indices, each vector scaled to 1
    /// at its top index and zero at every other top index. Sorted by top
    /// index ascending.
    pub fn top_basis(&self) -> Vec<Vector> {
        let n = self.ambient_dim;
        if self.basis.is_empty() {
            return Vec::new();
        }
        let rev: Vec<Vector> = self
            .basis
            .iter()
            .map(|v| Vector::new(v.entries().iter().rev().cloned().collect()))
            .collect();
        let m = Matrix::from_row_vectors(&rev, n).expect("basis dims agree");
        let (r, rk) = rref(&m);
        let mut out: Vec<Vector> = (0..rk)
            .map(|i| Vector::new(r.row(i).into_entries().into_iter().rev().collect()))
            .collect();
        out.sort_by_key(|v| v.top_index());
        out
    }

    /// Set of top indices realised by nonzero members, ascending.
    pub fn top_indices(&self) -> Vec<usize> {
        self.top_basis().iter().map(|v| v.top_index().expect("nonzero")).collect()
    }

    /// True when every basis vector is a standard basis vector.
    pub fn is_coordinate(&self) -> bool {
        self.basis.iter().all(|v| v.support().len() == 1)
    }

    /// Indices `i` with `e_i` in the basis (meaningful for coordinate subspaces).
    pub fn coordinate_support(&self) -> Vec<usize> {
        self.basis.iter().filter_map(Vector::leading_index).collect()
    }
}

/// True iff the parts are independent: the dimension of their sum equals
/// the sum of their dimensions.
pub fn is_direct_sum(parts: &[Subspace]) -> Result<bool> {
    let Some(first) = parts.first() else {
        return Ok(true);
    };
    let n = first.ambient_dim();
    let mut all = Vec::new();
    let mut total = 0;
    for p in parts {
        check_dim(n, p.ambient_dim())?;
        total += p.dim();
        all.extend(p.basis().iter().cloned());
    }
    Ok(span(&all, n)?.dim() == total)
}
