//! Finite-dimensional p-dg algebras with a declared idempotent decomposition,
//! and graded modules over H = k[∂]/(∂^p).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gflin::{
    axpy, is_zero_vec, unit_vec, vec_scale, vec_sub, Coordinates, Echelon, Field, GradedSpace, LinError,
    LinearMap, Mat, Scalar,
};

/// Unvalidated algebra data, as read from a file. Scalars are arbitrary
/// integers; they are reduced mod p during validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawAlgebra {
    pub p: u64,
    pub basis: Vec<(String, i64)>,
    pub unit: Vec<i64>,
    /// `(i, j, k, c)`: the product `b_i b_j` contains `c b_k`.
    pub mul: Vec<(usize, usize, usize, i64)>,
    /// `(i, k, c)`: `∂(b_i)` contains `c b_k`.
    pub diff: Vec<(usize, usize, i64)>,
    pub idempotents: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_radical: Option<Vec<Vec<i64>>>,
}

/// A failed algebra axiom, with the basis indices witnessing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Prime(u64),
    Shape(String),
    Grading { i: usize, j: usize, k: usize },
    DiffGrading { i: usize, k: usize },
    UnitDegree,
    Unit { i: usize },
    Associativity { i: usize, j: usize, k: usize },
    Leibniz { i: usize, j: usize },
    Nilpotency { i: usize },
    IdempotentProduct { i: usize, j: usize },
    IdempotentSum,
    IdempotentNotClosed { i: usize },
    IdempotentDegree { i: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Prime(p) => write!(f, "prime: {p} is not a supported prime"),
            Violation::Shape(s) => write!(f, "shape: {s}"),
            Violation::Grading { i, j, k } => {
                write!(f, "grading: b{i}*b{j} has a term b{k} of the wrong degree")
            }
            Violation::DiffGrading { i, k } => {
                write!(f, "grading: d(b{i}) has a term b{k} whose degree is not deg(b{i})+2")
            }
            Violation::UnitDegree => write!(f, "unit: the unit is not homogeneous of degree 0"),
            Violation::Unit { i } => write!(f, "unit: unit*b{i} or b{i}*unit differs from b{i}"),
            Violation::Associativity { i, j, k } => {
                write!(f, "associativity: (b{i} b{j}) b{k} != b{i} (b{j} b{k})")
            }
            Violation::Leibniz { i, j } => {
                write!(f, "leibniz: d(b{i} b{j}) != d(b{i}) b{j} + b{i} d(b{j})")
            }
            Violation::Nilpotency { i } => write!(f, "nilpotency: d^p(b{i}) != 0"),
            Violation::IdempotentProduct { i, j } => {
                write!(f, "idempotents: e{i} e{j} != delta_ij e{i}")
            }
            Violation::IdempotentSum => write!(f, "idempotents: the idempotents do not sum to the unit"),
            Violation::IdempotentNotClosed { i } => write!(f, "idempotents: d(e{i}) != 0"),
            Violation::IdempotentDegree { i } => write!(f, "idempotents: e{i} is not of degree 0"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unsupported shape: {0}")]
    Unsupported(String),
    #[error("declared radical rejected: {0}")]
    RadicalCertificate(String),
    #[error("invalid H-module: {0}")]
    InvalidModule(String),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// A validated finite-dimensional p-dg algebra.
#[derive(Clone, Debug)]
pub struct PdgAlgebra {
    field: Field,
    space: GradedSpace,
    unit: Vec<Scalar>,
    table: Vec<Vec<(usize, Scalar)>>,
    diff: Mat,
    idempotents: Vec<Vec<Scalar>>,
    declared_radical: Option<Vec<Vec<Scalar>>>,
}

/// Checks every axiom and returns the algebra or the full list of violations.
pub fn validate_algebra(raw: &RawAlgebra) -> Result<PdgAlgebra, Vec<Violation>> {
    let field = Field::new(raw.p).map_err(|_| vec![Violation::Prime(raw.p)])?;
    let n = raw.basis.len();
    let mut shape = Vec::new();
    let space = match GradedSpace::new(raw.basis.clone()) {
        Ok(s) => s,
        Err(e) => return Err(vec![Violation::Shape(e.to_string())]),
    };
    if raw.unit.len() != n {
        shape.push(Violation::Shape(format!("unit has length {} but basis has {}", raw.unit.len(), n)));
    }
    for (idx, &(i, j, k, _)) in raw.mul.iter().enumerate() {
        if i >= n || j >= n || k >= n {
            shape.push(Violation::Shape(format!("mul entry {idx} has an index out of range")));
        }
    }
    for (idx, &(i, k, _)) in raw.diff.iter().enumerate() {
        if i >= n || k >= n {
            shape.push(Violation::Shape(format!("diff entry {idx} has an index out of range")));
        }
    }
    for (idx, e) in raw.idempotents.iter().enumerate() {
        if e.len() != n {
            shape.push(Violation::Shape(format!("idempotent {} has the wrong length", idx + 1)));
        }
    }
    if let Some(rad) = &raw.declared_radical {
        if rad.iter().any(|v| v.len() != n) {
            shape.push(Violation::Shape("declared radical vector of the wrong length".into()));
        }
    }
    if raw.idempotents.is_empty() {
        shape.push(Violation::Shape("at least one idempotent is required".into()));
    }
    if !shape.is_empty() {
        return Err(shape);
    }

    let mut table = vec![Vec::new(); n * n];
    for &(i, j, k, c) in &raw.mul {
        let c = field.reduce(c);
        if c == 0 {
            continue;
        }
        let entry: &mut Vec<(usize, Scalar)> = &mut table[i * n + j];
        if let Some(e) = entry.iter_mut().find(|e| e.0 == k) {
            e.1 = field.add(e.1, c);
        } else {
            entry.push((k, c));
        }
    }
    for e in table.iter_mut() {
        e.retain(|t| t.1 != 0);
        e.sort();
    }
    let mut diff = Mat::zeros(field, n, n);
    for &(i, k, c) in &raw.diff {
        let v = field.add(diff.get(k, i), field.reduce(c));
        diff.set(k, i, v);
    }
    let red = |v: &Vec<i64>| v.iter().map(|&x| field.reduce(x)).collect::<Vec<_>>();
    let alg = PdgAlgebra {
        field,
        space,
        unit: red(&raw.unit),
        table,
        diff,
        idempotents: raw.idempotents.iter().map(red).collect(),
        declared_radical: raw.declared_radical.as_ref().map(|r| r.iter().map(red).collect()),
    };
    let violations = alg.violations();
    if violations.is_empty() {
        Ok(alg)
    } else {
        Err(violations)
    }
}

impl PdgAlgebra {
    /// Builds an algebra from already-reduced data and validates it.
    pub fn from_parts(
        field: Field,
        space: GradedSpace,
        unit: Vec<Scalar>,
        table: Vec<Vec<(usize, Scalar)>>,
        diff: Mat,
        idempotents: Vec<Vec<Scalar>>,
    ) -> Result<Self, Vec<Violation>> {
        let alg = PdgAlgebra { field, space, unit, table, diff, idempotents, declared_radical: None };
        let v = alg.violations();
        if v.is_empty() {
            Ok(alg)
        } else {
            Err(v)
        }
    }

    fn violations(&self) -> Vec<Violation> {
        let n = self.dim();
        let f = self.field;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for &(k, _) in &self.table[i * n + j] {
                    if self.degree(k) != self.degree(i) + self.degree(j) {
                        out.push(Violation::Grading { i, j, k });
                    }
                }
            }
            for k in 0..n {
                if self.diff.get(k, i) != 0 && self.degree(k) != self.degree(i) + 2 {
                    out.push(Violation::DiffGrading { i, k });
                }
            }
        }
        if self.homogeneous_degree(&self.unit).is_some_and(|d| d != 0) {
            out.push(Violation::UnitDegree);
        }
        for i in 0..n {
            let b = unit_vec(n, i);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                out.push(Violation::Unit { i });
            }
        }
        'assoc: for i in 0..n {
            for j in 0..n {
                let ij = self.mul_basis(i, j);
                for k in 0..n {
                    let left = self.mul(&ij, &unit_vec(n, k));
                    let right = self.mul(&unit_vec(n, i), &self.mul_basis(j, k));
                    if left != right {
                        out.push(Violation::Associativity { i, j, k });
                        if out.len() > 50 {
                            break 'assoc;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let (bi, bj) = (unit_vec(n, i), unit_vec(n, j));
                let lhs = self.diff(&self.mul(&bi, &bj));
                let mut rhs = self.mul(&self.diff(&bi), &bj);
                axpy(f, &mut rhs, 1, &self.mul(&bi, &self.diff(&bj)));
                if lhs != rhs {
                    out.push(Violation::Leibniz { i, j });
                }
            }
        }
        let dp = self.diff.pow(f.p() as usize);
        for i in 0..n {
            if dp.column(i).iter().any(|&x| x != 0) {
                out.push(Violation::Nilpotency { i });
            }
        }
        let r = self.idempotents.len();
        let mut sum = vec![0; n];
        for a in 0..r {
            let ea = &self.idempotents[a];
            axpy(f, &mut sum, 1, ea);
            if !is_zero_vec(&self.diff(ea)) {
                out.push(Violation::IdempotentNotClosed { i: a + 1 });
            }
            if !is_zero_vec(ea) && self.homogeneous_degree(ea) != Some(0) {
                out.push(Violation::IdempotentDegree { i: a + 1 });
            }
            for b in 0..r {
                let prod = self.mul(ea, &self.idempotents[b]);
                let expect = if a == b { ea.clone() } else { vec![0; n] };
                if prod != expect {
                    out.push(Violation::IdempotentProduct { i: a + 1, j: b + 1 });
                }
            }
        }
        if sum != self.unit {
            out.push(Violation::IdempotentSum);
        }
        out
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.space.degree(i)
    }

    pub fn label(&self, i: usize) -> &str {
        &self.space.basis[i].0
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn idempotents(&self) -> &[Vec<Scalar>] {
        &self.idempotents
    }

    pub fn num_idempotents(&self) -> usize {
        self.idempotents.len()
    }

    pub fn idempotent(&self, i: usize) -> &[Scalar] {
        &self.idempotents[i]
    }

    pub fn declared_radical(&self) -> Option<&[Vec<Scalar>]> {
        self.declared_radical.as_deref()
    }

    pub fn set_declared_radical(&mut self, rad: Option<Vec<Vec<Scalar>>>) {
        self.declared_radical = rad;
    }

    /// Matrix of ∂ (column `i` is ∂(b_i)).
    pub fn diff_matrix(&self) -> &Mat {
        &self.diff
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Scalar> {
        unit_vec(self.dim(), i)
    }

    pub fn zero(&self) -> Vec<Scalar> {
        vec![0; self.dim()]
    }

    fn mul_basis(&self, i: usize, j: usize) -> Vec<Scalar> {
        let mut v = vec![0; self.dim()];
        for &(k, c) in &self.table[i * self.dim() + j] {
            v[k] = c;
        }
        v
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let n = self.dim();
        let mut out = vec![0; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let c = f.mul(ai, bj);
                for &(k, t) in &self.table[i * n + j] {
                    out[k] = f.add(out[k], f.mul(c, t));
                }
            }
        }
        out
    }

    pub fn diff(&self, a: &[Scalar]) -> Vec<Scalar> {
        self.diff.mul_vec(a)
    }

    /// Degree of `v` if it is nonzero and homogeneous.
    pub fn homogeneous_degree(&self, v: &[Scalar]) -> Option<i64> {
        let mut deg = None;
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                match deg {
                    None => deg = Some(self.degree(i)),
                    Some(d) if d != self.degree(i) => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    /// Matrix of left multiplication by `a`.
    pub fn left_mult(&self, a: &[Scalar]) -> Mat {
        let n = self.dim();
        let cols: Vec<_> = (0..n).map(|j| self.mul(a, &self.basis_vec(j))).collect();
        Mat::from_columns(self.field, n, &cols)
    }

    pub fn right_mult(&self, a: &[Scalar]) -> Mat {
        let n = self.dim();
        let cols: Vec<_> = (0..n).map(|j| self.mul(&self.basis_vec(j), a)).collect();
        Mat::from_columns(self.field, n, &cols)
    }

    /// Human-readable element, e.g. `x^2 + 2x`.
    pub fn format_elem(&self, v: &[Scalar]) -> String {
        format_combination(self.field, v, |i| self.label(i).to_string())
    }

    /// A homogeneous basis of `e_k A e_l`, chosen among the products
    /// `e_k b_i e_l` of basis elements, ordered by basis index.
    pub fn piece(&self, k: usize, l: usize) -> Vec<(Vec<Scalar>, i64)> {
        let (ek, el) = (&self.idempotents[k], &self.idempotents[l]);
        let mut by_degree: BTreeMap<i64, Echelon> = BTreeMap::new();
        let mut out = Vec::new();
        for i in 0..self.dim() {
            let v = self.mul(&self.mul(ek, &self.basis_vec(i)), el);
            if is_zero_vec(&v) {
                continue;
            }
            let d = self.degree(i);
            let ech = by_degree.entry(d).or_insert_with(|| Echelon::new(self.field, self.dim()));
            if ech.insert(&v) {
                out.push((v, d));
            }
        }
        out
    }

    /// Homogeneous basis of the centre Z(A).
    pub fn center(&self) -> Vec<(Vec<Scalar>, i64)> {
        let n = self.dim();
        let f = self.field;
        let mut degrees: Vec<i64> = self.space.degrees();
        degrees.sort();
        degrees.dedup();
        let mut out = Vec::new();
        for d in degrees {
            let idx: Vec<usize> = (0..n).filter(|&i| self.degree(i) == d).collect();
            // rows: for each basis b_j, coordinates of [b_i, b_j]
            let mut rows = Vec::new();
            for j in 0..n {
                let bj = self.basis_vec(j);
                let cols: Vec<Vec<Scalar>> = idx
                    .iter()
                    .map(|&i| {
                        let bi = self.basis_vec(i);
                        vec_sub(f, &self.mul(&bi, &bj), &self.mul(&bj, &bi))
                    })
                    .collect();
                rows.push(Mat::from_columns(f, n, &cols));
            }
            let mut m = Mat::zeros(f, 0, idx.len());
            for r in rows {
                m = m.vstack(&r);
            }
            for k in m.kernel() {
                let mut v = vec![0; n];
                for (c, &i) in k.iter().zip(&idx) {
                    v[i] = *c;
                }
                out.push((v, d));
            }
        }
        out
    }

    /// Returns the raw form of this algebra.
    pub fn to_raw(&self) -> RawAlgebra {
        let n = self.dim();
        let mut mul = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for &(k, c) in &self.table[i * n + j] {
                    mul.push((i, j, k, c as i64));
                }
            }
        }
        let mut diff = Vec::new();
        for i in 0..n {
            for k in 0..n {
                let c = self.diff.get(k, i);
                if c != 0 {
                    diff.push((i, k, c as i64));
                }
            }
        }
        let wide = |v: &Vec<Scalar>| v.iter().map(|&x| x as i64).collect::<Vec<_>>();
        RawAlgebra {
            p: self.p() as u64,
            basis: self.space.basis.clone(),
            unit: wide(&self.unit),
            mul,
            diff,
            idempotents: self.idempotents.iter().map(wide).collect(),
            declared_radical: self.declared_radical.as_ref().map(|r| r.iter().map(wide).collect()),
        }
    }

    /// Tensor product A ⊗ B with ∂ = ∂⊗1 + 1⊗∂ and idempotents e_i ⊗ f_j.
    /// Basis element `(a, b)` has index `a * dim(B) + b`.
    pub fn tensor(&self, other: &PdgAlgebra) -> PdgAlgebra {
        assert_eq!(self.field, other.field, "tensor product over different fields");
        let f = self.field;
        let (n, m) = (self.dim(), other.dim());
        let mut basis = Vec::new();
        for a in 0..n {
            for b in 0..m {
                basis.push((
                    format!("{}|{}", self.label(a), other.label(b)),
                    self.degree(a) + other.degree(b),
                ));
            }
        }
        let mut table = vec![Vec::new(); n * m * n * m];
        for a1 in 0..n {
            for b1 in 0..m {
                for a2 in 0..n {
                    for b2 in 0..m {
                        let mut entry = Vec::new();
                        for &(ka, ca) in &self.table[a1 * n + a2] {
                            for &(kb, cb) in &other.table[b1 * m + b2] {
                                entry.push((ka * m + kb, f.mul(ca, cb)));
                            }
                        }
                        table[(a1 * m + b1) * n * m + a2 * m + b2] = entry;
                    }
                }
            }
        }
        let mut diff = Mat::zeros(f, n * m, n * m);
        for a in 0..n {
            for b in 0..m {
                let col = a * m + b;
                for ka in 0..n {
                    let c = self.diff.get(ka, a);
                    if c != 0 {
                        let r = ka * m + b;
                        diff.set(r, col, f.add(diff.get(r, col), c));
                    }
                }
                for kb in 0..m {
                    let c = other.diff.get(kb, b);
                    if c != 0 {
                        let r = a * m + kb;
                        diff.set(r, col, f.add(diff.get(r, col), c));
                    }
                }
            }
        }
        let kron = |x: &[Scalar], y: &[Scalar]| {
            let mut v = vec![0; n * m];
            for a in 0..n {
                for b in 0..m {
                    v[a * m + b] = f.mul(x[a], y[b]);
                }
            }
            v
        };
        let mut idempotents = Vec::new();
        for e in &self.idempotents {
            for g in &other.idempotents {
                idempotents.push(kron(e, g));
            }
        }
        PdgAlgebra {
            field: f,
            space: GradedSpace { basis },
            unit: kron(&self.unit, &other.unit),
            table,
            diff,
            idempotents,
            declared_radical: None,
        }
    }

    /// The same algebra with a different idempotent decomposition.
    pub fn with_idempotents(&self, idempotents: Vec<Vec<Scalar>>) -> Result<PdgAlgebra, Vec<Violation>> {
        let alg = PdgAlgebra { idempotents, declared_radical: None, ..self.clone() };
        let v = alg.violations();
        if v.is_empty() {
            Ok(alg)
        } else {
            Err(v)
        }
    }
}

/// Formats `Σ c_i label(i)` with signed coefficients.
pub fn format_combination(f: Field, v: &[Scalar], label: impl Fn(usize) -> String) -> String {
    let mut s = String::new();
    for (i, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sc = f.signed(c);
        let l = label(i);
        let mag = sc.unsigned_abs();
        let body = if mag == 1 { l } else { format!("{mag}{l}") };
        if s.is_empty() {
            if sc < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if sc < 0 { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

// ---------------------------------------------------------------------------
// radical and isomorphism classes

/// Jacobson radical with the result of the ∂-stability check.
#[derive(Clone, Debug)]
pub struct Radical {
    pub basis: Vec<Vec<Scalar>>,
    pub diff_stable: bool,
}

/// Default bound on the dimension of degree-0 hom pieces searched by `iso_classes`.
pub const ISO_SEARCH_BOUND: usize = 3;

/// Partition of the idempotents into isomorphism classes (0-based indices).
pub fn iso_classes(a: &PdgAlgebra) -> Result<Vec<Vec<usize>>, AlgebraError> {
    iso_classes_bounded(a, ISO_SEARCH_BOUND)
}

pub fn iso_classes_bounded(a: &PdgAlgebra, bound: usize) -> Result<Vec<Vec<usize>>, AlgebraError> {
    let r = a.num_idempotents();
    let mut class: Vec<usize> = (0..r).collect();
    for i in 0..r {
        for j in (i + 1)..r {
            if class[j] != j {
                continue;
            }
            if iso_witness(a, i, j, bound)?.is_some() {
                let ci = class[i];
                class[j] = ci;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, c) in class.into_iter().enumerate() {
        groups.entry(c).or_default().push(i);
    }
    Ok(groups.into_values().collect())
}

/// Degree-0 elements `x ∈ e_i A e_j`, `y ∈ e_j A e_i` with `xy = e_i`, `yx = e_j`.
pub fn iso_witness(
    a: &PdgAlgebra,
    i: usize,
    j: usize,
    bound: usize,
) -> Result<Option<(Vec<Scalar>, Vec<Scalar>)>, AlgebraError> {
    let f = a.field();
    let pij: Vec<_> = a.piece(i, j).into_iter().filter(|b| b.1 == 0).map(|b| b.0).collect();
    let pji: Vec<_> = a.piece(j, i).into_iter().filter(|b| b.1 == 0).map(|b| b.0).collect();
    if pij.is_empty() || pji.is_empty() {
        return Ok(None);
    }
    if pij.len() > bound {
        return Err(AlgebraError::Unsupported(format!(
            "degree-0 piece e{}Ae{} has dimension {} above the search bound {}",
            i + 1,
            j + 1,
            pij.len(),
            bound
        )));
    }
    let n = a.dim();
    let (ei, ej) = (a.idempotent(i).to_vec(), a.idempotent(j).to_vec());
    for coeffs in all_coefficient_vectors(f, pij.len()) {
        let mut x = vec![0; n];
        for (c, b) in coeffs.iter().zip(&pij) {
            axpy(f, &mut x, *c, b);
        }
        if is_zero_vec(&x) {
            continue;
        }
        // solve x y = e_i and y x = e_j for y in span(pji)
        let cols: Vec<Vec<Scalar>> = pji
            .iter()
            .map(|y| {
                let mut v = a.mul(&x, y);
                v.extend(a.mul(y, &x));
                v
            })
            .collect();
        let m = Mat::from_columns(f, 2 * n, &cols);
        let mut rhs = ei.clone();
        rhs.extend(ej.iter().copied());
        if let Some(sol) = m.solve(&rhs)? {
            let mut y = vec![0; n];
            for (c, b) in sol.iter().zip(&pji) {
                axpy(f, &mut y, *c, b);
            }
            return Ok(Some((x, y)));
        }
    }
    Ok(None)
}

pub(crate) fn all_coefficient_vectors(f: Field, n: usize) -> Vec<Vec<Scalar>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * f.p() as usize);
        for v in &out {
            for x in f.elements() {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Scalar `c` with `a - c·e` nilpotent, for `a` in the corner algebra `eAe`.
fn residue_scalar(alg: &PdgAlgebra, a: &[Scalar], e: &[Scalar], nil_index: usize) -> Option<Scalar> {
    let f = alg.field();
    f.elements().find(|&c| {
        let mut x = vec_sub(f, a, &vec_scale(f, c, e));
        for _ in 1..nil_index.max(1) {
            if is_zero_vec(&x) {
                break;
            }
            x = alg.mul(&x, &vec_sub(f, a, &vec_scale(f, c, e)));
        }
        is_zero_vec(&x)
    })
}

/// Radical of the corner algebra `e_i A e_i`, or `None` when it is not split local.
pub fn local_radical(alg: &PdgAlgebra, i: usize) -> Option<Vec<Vec<Scalar>>> {
    let f = alg.field();
    let e = alg.idempotent(i).to_vec();
    let piece = alg.piece(i, i);
    let dim = piece.len();
    let mut ech = Echelon::new(f, alg.dim());
    for (b, _) in &piece {
        let c = residue_scalar(alg, b, &e, dim + 1)?;
        ech.insert(&vec_sub(f, b, &vec_scale(f, c, &e)));
    }
    (ech.rank() + 1 == dim).then(|| ech.basis())
}

/// Jacobson radical: verified declared radical, or the native algorithm for
/// algebras whose corner algebras are split local.
pub fn radical(alg: &PdgAlgebra) -> Result<Radical, AlgebraError> {
    let basis = match alg.declared_radical() {
        Some(decl) => {
            verify_radical(alg, decl)?;
            let mut ech = Echelon::new(alg.field(), alg.dim());
            decl.iter().for_each(|v| {
                ech.insert(v);
            });
            ech.basis()
        }
        None => native_radical(alg)?,
    };
    let mut span = Echelon::new(alg.field(), alg.dim());
    basis.iter().for_each(|v| {
        span.insert(v);
    });
    let diff_stable = basis.iter().all(|v| span.contains(&alg.diff(v)));
    Ok(Radical { basis, diff_stable })
}

fn native_radical(alg: &PdgAlgebra) -> Result<Vec<Vec<Scalar>>, AlgebraError> {
    let classes = iso_classes(alg)?;
    let r = alg.num_idempotents();
    let mut class_of = vec![0; r];
    for (c, members) in classes.iter().enumerate() {
        for &m in members {
            class_of[m] = c;
        }
    }
    let mut local = Vec::with_capacity(r);
    for i in 0..r {
        let rad = local_radical(alg, i).ok_or_else(|| {
            AlgebraError::Unsupported(format!(
                "e{}Ae{} is not split local; declare the radical explicitly",
                i + 1,
                i + 1
            ))
        })?;
        local.push(rad);
    }
    let mut ech = Echelon::new(alg.field(), alg.dim());
    for i in 0..r {
        for j in 0..r {
            if i == j {
                local[i].iter().for_each(|v| {
                    ech.insert(v);
                });
            } else if class_of[i] != class_of[j] {
                alg.piece(i, j).iter().for_each(|(v, _)| {
                    ech.insert(v);
                });
            } else {
                let (x, _) = iso_witness(alg, i, j, usize::MAX)?
                    .ok_or_else(|| AlgebraError::Unsupported("iso class without witness".into()))?;
                for rj in &local[j] {
                    ech.insert(&alg.mul(&x, rj));
                }
            }
        }
    }
    Ok(ech.basis())
}

/// Checks that `decl` spans a nilpotent two-sided ideal whose quotient has
/// `dim e_i (A/N) e_j = 1` for isomorphic idempotents and 0 otherwise.
pub fn verify_radical(alg: &PdgAlgebra, decl: &[Vec<Scalar>]) -> Result<(), AlgebraError> {
    let f = alg.field();
    let n = alg.dim();
    let mut span = Echelon::new(f, n);
    decl.iter().for_each(|v| {
        span.insert(v);
    });
    let basis = span.basis();
    for (k, v) in basis.iter().enumerate() {
        for i in 0..n {
            let b = alg.basis_vec(i);
            if !span.contains(&alg.mul(v, &b)) || !span.contains(&alg.mul(&b, v)) {
                return Err(AlgebraError::RadicalCertificate(format!(
                    "not an ideal: radical vector {k} times basis element {} escapes",
                    alg.label(i)
                )));
            }
        }
    }
    let mut power = basis.clone();
    for _ in 0..=n {
        if power.is_empty() {
            break;
        }
        let mut next = Echelon::new(f, n);
        for x in &power {
            for y in &basis {
                next.insert(&alg.mul(x, y));
            }
        }
        power = next.basis();
    }
    if !power.is_empty() {
        return Err(AlgebraError::RadicalCertificate("not nilpotent: N^(dim+1) != 0".into()));
    }
    let classes = iso_classes(alg)?;
    let class_of = |i: usize| classes.iter().position(|c| c.contains(&i)).unwrap();
    for i in 0..alg.num_idempotents() {
        for j in 0..alg.num_idempotents() {
            let piece: Vec<_> = alg.piece(i, j).into_iter().map(|b| b.0).collect();
            let (qdim, _) = crate::gflin::subspace_quotient(f, n, &basis, &piece);
            let expect = usize::from(class_of(i) == class_of(j));
            if qdim != expect {
                return Err(AlgebraError::RadicalCertificate(format!(
                    "quotient not semisimple: e{}(A/N)e{} has dimension {qdim}, expected {expect}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// H-modules

/// A graded module over H = k[∂]/(∂^p) with ∂ of degree 2.
#[derive(Clone, Debug)]
pub struct HModuleData {
    pub space: GradedSpace,
    pub action: LinearMap,
    pub decomposition: Option<Vec<(usize, i64)>>,
}

impl HModuleData {
    pub fn new(space: GradedSpace, action: Mat) -> Result<Self, AlgebraError> {
        let action = LinearMap::new(space.clone(), space.clone(), action, 2)?;
        Ok(HModuleData { space, action, decomposition: None })
    }

    /// The indecomposable V_i⟨shift⟩: a chain `v, ∂v, …, ∂^i v` with `v` in degree `-shift`.
    pub fn indecomposable(field: Field, i: usize, shift: i64) -> Self {
        let basis = (0..=i).map(|j| (format!("d{j}v"), -shift + 2 * j as i64)).collect();
        let space = GradedSpace { basis };
        let mut m = Mat::zeros(field, i + 1, i + 1);
        for j in 0..i {
            m.set(j + 1, j, 1);
        }
        let action = LinearMap { source: space.clone(), target: space.clone(), matrix: m, degree: 2 };
        HModuleData { space, action, decomposition: Some(vec![(i, shift)]) }
    }

    /// Direct sum of indecomposables, with the decomposition recorded.
    pub fn from_decomposition(field: Field, parts: &[(usize, i64)]) -> Self {
        let mut basis = Vec::new();
        let total: usize = parts.iter().map(|(i, _)| i + 1).sum();
        let mut m = Mat::zeros(field, total, total);
        let mut off = 0;
        for (k, &(i, s)) in parts.iter().enumerate() {
            for j in 0..=i {
                basis.push((format!("c{k}d{j}"), -s + 2 * j as i64));
                if j < i {
                    m.set(off + j + 1, off + j, 1);
                }
            }
            off += i + 1;
        }
        let space = GradedSpace { basis };
        let action = LinearMap { source: space.clone(), target: space.clone(), matrix: m, degree: 2 };
        HModuleData { space, action, decomposition: Some(parts.to_vec()) }
    }

    /// The underlying graded space of a p-dg algebra as an H-module.
    pub fn from_algebra(alg: &PdgAlgebra) -> Self {
        let space = alg.space().clone();
        let action = LinearMap {
            source: space.clone(),
            target: space.clone(),
            matrix: alg.diff_matrix().clone(),
            degree: 2,
        };
        HModuleData { space, action, decomposition: None }
    }
}

/// Jordan type of ∂: one `(i, shift)` per chain of length `i + 1`, where the
/// chain's lowest-degree vector sits in degree `-shift`.
pub fn h_decompose(m: &HModuleData) -> Result<Vec<(usize, i64)>, AlgebraError> {
    let d = &m.action.matrix;
    let n = m.space.dim();
    let f = d.field();
    if n > 0 && !d.pow(n).is_zero() {
        return Err(AlgebraError::InvalidModule("the action of d is not nilpotent".into()));
    }
    if m.action.degree != 2 {
        return Err(AlgebraError::InvalidModule("the action must have degree 2".into()));
    }
    let p = f.p() as usize;
    if n > 0 && !d.pow(p).is_zero() {
        return Err(AlgebraError::InvalidModule("d^p != 0".into()));
    }
    let degrees = m.space.degrees();
    let powers: Vec<Mat> = (0..=p + 1).map(|k| d.pow(k)).collect();
    // rank of d^k restricted to degree `deg`
    let rank_at = |k: usize, deg: i64| -> usize {
        let cols: Vec<usize> = (0..n).filter(|&i| degrees[i] == deg).collect();
        if cols.is_empty() {
            0
        } else {
            powers[k].select_columns(&cols).rank()
        }
    };
    let mut distinct = degrees.clone();
    distinct.sort();
    distinct.dedup();
    let mut out = Vec::new();
    for &deg in &distinct {
        // at_least[k] = number of chains starting in `deg` of length ≥ k+1
        let at_least: Vec<usize> = (0..=p)
            .map(|k| rank_at(k, deg).saturating_sub(rank_at(k + 1, deg - 2)))
            .collect();
        for k in 0..p {
            let exact = at_least[k] - at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..exact {
                out.push((k, -deg));
            }
        }
    }
    Ok(out)
}

/// Builds the coordinate map of a subspace spanned by homogeneous vectors.
pub fn coordinates_of(alg: &PdgAlgebra, basis: &[(Vec<Scalar>, i64)]) -> Coordinates {
    Coordinates::new(alg.field(), alg.dim(), basis.iter().map(|b| b.0.clone()).collect())
}
