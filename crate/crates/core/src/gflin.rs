//! Dense linear algebra over a prime field F_p, plus graded vector spaces.
//!
//! Scalars are stored as `u32` residues in `0..p`. Every matrix carries its
//! field so that arithmetic never needs an ambient context.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub type Scalar = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("{0} is not a prime below 65536")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// The prime field F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
}

impl Field {
    pub fn new(p: u64) -> Result<Self, LinError> {
        if !(2..65536).contains(&p) || !is_prime(p) {
            return Err(LinError::NotPrime(p));
        }
        Ok(Field { p: p as u32 })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn reduce(&self, x: i64) -> Scalar {
        x.rem_euclid(self.p as i64) as Scalar
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        ((a as u64 * b as u64) % self.p as u64) as Scalar
    }

    pub fn pow(&self, a: Scalar, mut e: u64) -> Scalar {
        let mut base = a;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: Scalar) -> Scalar {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// Signed representative in `(-p/2, p/2]`, used for printing.
    pub fn signed(&self, a: Scalar) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        0..self.p
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// vectors

pub fn zero_vec(n: usize) -> Vec<Scalar> {
    vec![0; n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// `y += c * x`
pub fn axpy(f: Field, y: &mut [Scalar], c: Scalar, x: &[Scalar]) {
    if c == 0 {
        return;
    }
    for (a, &b) in y.iter_mut().zip(x) {
        if b != 0 {
            *a = f.add(*a, f.mul(c, b));
        }
    }
}

pub fn vec_add(f: Field, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    x.iter().zip(y).map(|(&a, &b)| f.add(a, b)).collect()
}

pub fn vec_sub(f: Field, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    x.iter().zip(y).map(|(&a, &b)| f.sub(a, b)).collect()
}

pub fn vec_scale(f: Field, c: Scalar, x: &[Scalar]) -> Vec<Scalar> {
    x.iter().map(|&a| f.mul(c, a)).collect()
}

// ---------------------------------------------------------------------------
// matrices

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(fm, "Mat {}x{} over F_{}", self.rows, self.cols, self.field.p)?;
        for r in 0..self.rows {
            writeln!(fm, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Result of row reduction.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Mat,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Mat { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows(field: Field, rows: &[Vec<i64>]) -> Result<Self, LinError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinError::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| field.reduce(x)).collect();
        Ok(Mat { field, rows: rows.len(), cols, data })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Mat::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let f = self.field;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let base = r * other.cols;
                for (c, &b) in orow.iter().enumerate() {
                    if b != 0 {
                        out.data[base + c] = f.add(out.data[base + c], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        let f = self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.add(a, b)).collect();
        Mat { data, ..*self }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference shape");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.sub(a, b)).collect();
        Mat { data, ..*self }
    }

    pub fn scale(&self, c: Scalar) -> Mat {
        let data = self.data.iter().map(|&a| self.field.mul(c, a)).collect();
        Mat { data, ..*self }
    }

    pub fn pow(&self, e: usize) -> Mat {
        assert_eq!(self.rows, self.cols, "power of a non-square matrix");
        let mut acc = Mat::identity(self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Columns `cols` of the matrix, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.field, self.rows, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for r in 0..self.rows {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.field, rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            m.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(r));
        }
        m
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hstack shape");
        let mut m = Mat::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c));
            }
        }
        m
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "vstack shape");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col));
            for c in col..m.cols {
                let v = m.get(row, c);
                m.set(row, c, f.mul(v, inv));
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Basis of the right null space `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let f = self.field;
        let rr = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (i, &c) in rr.pivots.iter().enumerate() {
            is_pivot[c] = Some(i);
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (i, &pc) in rr.pivots.iter().enumerate() {
                v[pc] = f.neg(rr.reduced.get(i, free));
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `M x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinError> {
        if b.len() != self.rows {
            return Err(LinError::Dimension(format!(
                "right-hand side has length {} but matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let aug = self.hstack(&Mat::from_columns(self.field, self.rows, &[b.to_vec()]));
        let rr = aug.rref();
        if rr.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (i, &pc) in rr.pivots.iter().enumerate() {
            x[pc] = rr.reduced.get(i, self.cols);
        }
        Ok(Some(x))
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let rr = self.hstack(&Mat::identity(self.field, n)).rref();
        if rr.pivots.len() < n || rr.pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(rr.reduced.select_columns(&cols))
    }
}

/// Rank, kernel basis and pivot columns of `m`.
pub fn rref(m: &Mat) -> (usize, Vec<Vec<Scalar>>, Vec<usize>) {
    let rr = m.rref();
    (rr.rank(), m.kernel(), rr.pivots)
}

pub fn solve(m: &Mat, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinError> {
    m.solve(b)
}

/// Basis of span(`vectors`) modulo span(`subspace_basis`) inside F_p^`ambient_dim`.
///
/// Representatives are chosen among the given vectors, in order.
pub fn subspace_quotient(
    field: Field,
    ambient_dim: usize,
    subspace_basis: &[Vec<Scalar>],
    vectors: &[Vec<Scalar>],
) -> (usize, Vec<Vec<Scalar>>) {
    let mut span = Echelon::new(field, ambient_dim);
    for v in subspace_basis {
        span.insert(v);
    }
    let mut reps = Vec::new();
    for v in vectors {
        if span.insert(v) {
            reps.push(v.clone());
        }
    }
    (reps.len(), reps)
}

/// Incrementally maintained echelon basis, for independence tests and spans.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    dim: usize,
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl Echelon {
    pub fn new(field: Field, dim: usize) -> Self {
        Echelon { field, dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let mut w = v.to_vec();
        for (pc, row) in &self.rows {
            let c = w[*pc];
            if c != 0 {
                axpy(f, &mut w, f.neg(c), row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Adds `v` to the span; returns whether it was independent.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length");
        let f = self.field;
        let mut w = self.reduce(v);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[pc]);
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pc];
            if c != 0 {
                axpy(f, row, f.neg(c), &w);
            }
        }
        self.rows.push((pc, w));
        true
    }

    pub fn basis(&self) -> Vec<Vec<Scalar>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }
}

/// Coordinates with respect to a fixed linearly independent family.
#[derive(Clone, Debug)]
pub struct Coordinates {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<Scalar>>,
    rows: Vec<usize>,
    inv: Mat,
}

impl Coordinates {
    /// Panics if the family is dependent.
    pub fn new(field: Field, ambient_dim: usize, basis: Vec<Vec<Scalar>>) -> Self {
        let k = basis.len();
        let b = Mat::from_columns(field, ambient_dim, &basis);
        let rows = b.transpose().rref().pivots;
        assert_eq!(rows.len(), k, "coordinate family is linearly dependent");
        let inv = b.select_rows(&rows).inverse().expect("pivot rows are invertible");
        Coordinates { field, ambient: ambient_dim, basis, rows, inv }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    /// Coordinates of `v`, or `None` if `v` is outside the span.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let sel: Vec<Scalar> = self.rows.iter().map(|&r| v[r]).collect();
        let c = self.inv.mul_vec(&sel);
        (self.combine(&c) == v).then_some(c)
    }

    pub fn combine(&self, c: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![0; self.ambient];
        for (ci, b) in c.iter().zip(&self.basis) {
            axpy(self.field, &mut out, *ci, b);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// graded spaces

/// A finite-dimensional graded vector space with a labelled homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedSpace {
    pub basis: Vec<(String, i64)>,
}

impl GradedSpace {
    pub fn new(basis: Vec<(String, i64)>) -> Result<Self, LinError> {
        let mut seen = std::collections::HashSet::new();
        for (l, _) in &basis {
            if !seen.insert(l.as_str()) {
                return Err(LinError::Dimension(format!("duplicate basis label {l}")));
            }
        }
        Ok(GradedSpace { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].1
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.iter().map(|b| b.1).collect()
    }

    /// Grading shift ⟨n⟩: every degree moves by `-n`.
    pub fn shift(&self, n: i64) -> GradedSpace {
        GradedSpace { basis: self.basis.iter().map(|(l, d)| (l.clone(), d - n)).collect() }
    }

    pub fn graded_dim(&self) -> BTreeMap<i64, i64> {
        graded_dim(self.basis.iter().map(|b| b.1))
    }
}

pub fn graded_dim(degrees: impl IntoIterator<Item = i64>) -> BTreeMap<i64, i64> {
    let mut m = BTreeMap::new();
    for d in degrees {
        *m.entry(d).or_insert(0) += 1;
    }
    m
}

/// Renders a Laurent polynomial in `q`, e.g. `1 + q^2 + 2q^4`.
pub fn format_qpoly(coeffs: &BTreeMap<i64, i64>) -> String {
    let mut parts = Vec::new();
    for (&e, &c) in coeffs {
        if c == 0 {
            continue;
        }
        let mono = match e {
            0 => String::new(),
            1 => "q".to_string(),
            _ => format!("q^{e}"),
        };
        let term = match (c, mono.is_empty()) {
            (_, true) => c.to_string(),
            (1, false) => mono,
            (-1, false) => format!("-{mono}"),
            _ => format!("{c}{mono}"),
        };
        parts.push(term);
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = parts[0].clone();
    for t in &parts[1..] {
        if let Some(rest) = t.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(t);
        }
    }
    s
}

/// A homogeneous linear map between graded spaces.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub matrix: Mat,
    pub degree: i64,
}

impl LinearMap {
    pub fn new(source: GradedSpace, target: GradedSpace, matrix: Mat, degree: i64) -> Result<Self, LinError> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(LinError::Dimension(format!(
                "matrix is {}x{} but spaces have dims {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source.dim(),
                target.dim()
            )));
        }
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                if matrix.get(i, j) != 0 && target.degree(i) != source.degree(j) + degree {
                    return Err(LinError::Dimension(format!(
                        "entry ({i},{j}) breaks homogeneity of degree {degree}"
                    )));
                }
            }
        }
        Ok(LinearMap { source, target, matrix, degree })
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &LinearMap) -> Result<LinearMap, LinError> {
        if first.target != self.source {
            return Err(LinError::Dimension("composition of non-matching spaces".into()));
        }
        Ok(LinearMap {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&first.matrix),
            degree: self.degree + first.degree,
        })
    }
}
