//! One-sided twisted complexes over a finite p-dg category.
//!
//! An object is a list of shifted generators `(object, shift)` together with a
//! strictly upper-triangular matrix `alpha`; entry `(k, l)` is a morphism from
//! generator `l` to generator `k`. An element of raw degree `d` in position
//! `(k, l)` has morphism-degree `d + shift_l - shift_k`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::category::PdgCategory;
use crate::gflin::{axpy, is_zero_vec, vec_add, vec_scale, vec_sub, Mat, Scalar};
use crate::homotopy::HomComplex;
use crate::pdgalg::{h_decompose, AlgebraError, HModuleData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistedError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("entry ({row},{col}) is not homogeneous of morphism-degree {expected}")]
    Degree { row: usize, col: usize, expected: i64 },
    #[error("invalid twisted object: {0}")]
    Invalid(TwistedViolation),
    #[error(transparent)]
    Module(#[from] AlgebraError),
}

/// Why a candidate twisted object fails validation (indices 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistedViolation {
    NotStrictlyUpper { row: usize, col: usize },
    WrongDegree { row: usize, col: usize },
    NotNilpotent { row: usize, col: usize },
}

impl fmt::Display for TwistedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwistedViolation::NotStrictlyUpper { row, col } => {
                write!(f, "alpha({}, {}) is nonzero on or below the diagonal", row + 1, col + 1)
            }
            TwistedViolation::WrongDegree { row, col } => {
                write!(f, "alpha({}, {}) is not homogeneous of morphism-degree 2", row + 1, col + 1)
            }
            TwistedViolation::NotNilpotent { row, col } => {
                write!(f, "c_p has a nonzero entry at ({}, {})", row + 1, col + 1)
            }
        }
    }
}

/// Matrix of morphisms; entry `(r, c)` lies in `Hom(src[c], tgt[r])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Scalar>>,
}

impl HomMatrix {
    pub fn zero(cat: &PdgCategory, tgt: &[(usize, i64)], src: &[(usize, i64)]) -> Self {
        let mut entries = Vec::with_capacity(tgt.len() * src.len());
        for &(t, _) in tgt {
            for &(s, _) in src {
                entries.push(cat.zero(t, s));
            }
        }
        HomMatrix { rows: tgt.len(), cols: src.len(), entries }
    }

    pub fn get(&self, r: usize, c: usize) -> &[Scalar] {
        &self.entries[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Vec<Scalar> {
        &mut self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Vec<Scalar>) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| is_zero_vec(e))
    }

    /// Entry `(r, c)` of the result is entry `(rows[r], cols[c])` of `self`.
    pub fn reindexed(&self, rows: &[usize], cols: &[usize]) -> HomMatrix {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                entries.push(self.get(r, c).to_vec());
            }
        }
        HomMatrix { rows: rows.len(), cols: cols.len(), entries }
    }

    pub fn add(&self, cat: &PdgCategory, other: &HomMatrix) -> HomMatrix {
        let f = cat.field();
        HomMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| vec_add(f, a, b)).collect(),
        }
    }

    pub fn sub(&self, cat: &PdgCategory, other: &HomMatrix) -> HomMatrix {
        let f = cat.field();
        HomMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| vec_sub(f, a, b)).collect(),
        }
    }

    pub fn scale(&self, cat: &PdgCategory, c: Scalar) -> HomMatrix {
        let f = cat.field();
        HomMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| vec_scale(f, c, a)).collect(),
        }
    }

    /// Matrix product `self · other` with `self: mid → tgt`, `other: src → mid`.
    pub fn mul(
        &self,
        cat: &PdgCategory,
        other: &HomMatrix,
        tgt: &[(usize, i64)],
        mid: &[(usize, i64)],
        src: &[(usize, i64)],
    ) -> HomMatrix {
        let f = cat.field();
        let mut out = HomMatrix::zero(cat, tgt, src);
        for (r, &(t, _)) in tgt.iter().enumerate() {
            for (c, &(s, _)) in src.iter().enumerate() {
                let mut acc = cat.zero(t, s);
                for (j, &(m, _)) in mid.iter().enumerate() {
                    let a = self.get(r, j);
                    let b = other.get(j, c);
                    if is_zero_vec(a) || is_zero_vec(b) {
                        continue;
                    }
                    axpy(f, &mut acc, 1, &cat.compose(t, m, s, a, b));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Entrywise differential.
    pub fn diff(&self, cat: &PdgCategory, tgt: &[(usize, i64)], src: &[(usize, i64)]) -> HomMatrix {
        let mut out = self.clone();
        for (r, &(t, _)) in tgt.iter().enumerate() {
            for (c, &(s, _)) in src.iter().enumerate() {
                out.set(r, c, cat.diff(t, s, self.get(r, c)));
            }
        }
        out
    }
}

/// An object of the bar category: shifted generators and a twist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedObject {
    pub gens: Vec<(usize, i64)>,
    pub alpha: HomMatrix,
}

impl TwistedObject {
    /// Generators with zero twist.
    pub fn from_gens(cat: &PdgCategory, gens: Vec<(usize, i64)>) -> Self {
        let alpha = HomMatrix::zero(cat, &gens, &gens);
        TwistedObject { gens, alpha }
    }

    pub fn single(cat: &PdgCategory, object: usize, shift: i64) -> Self {
        TwistedObject::from_gens(cat, vec![(object, shift)])
    }

    pub fn zero_object() -> Self {
        TwistedObject { gens: Vec::new(), alpha: HomMatrix { rows: 0, cols: 0, entries: Vec::new() } }
    }

    /// Builds and validates an object.
    pub fn new(cat: &PdgCategory, gens: Vec<(usize, i64)>, alpha: HomMatrix) -> Result<Self, TwistedError> {
        if alpha.rows != gens.len() || alpha.cols != gens.len() {
            return Err(TwistedError::Shape("alpha must be square of generator size".into()));
        }
        let x = TwistedObject { gens, alpha };
        validate_twisted(cat, &x).map_err(TwistedError::Invalid)?;
        Ok(x)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Morphism-degree of a raw-degree `d` entry at `(k, l)` of an endomorphism.
    pub fn entry_degree(&self, k: usize, l: usize, d: i64) -> i64 {
        d + self.gens[l].1 - self.gens[k].1
    }

    /// Grading shift ⟨n⟩ of every generator.
    pub fn shift(&self, n: i64) -> TwistedObject {
        TwistedObject {
            gens: self.gens.iter().map(|&(o, s)| (o, s + n)).collect(),
            alpha: self.alpha.clone(),
        }
    }

    pub fn describe(&self, cat: &PdgCategory) -> String {
        let parts: Vec<String> = self
            .gens
            .iter()
            .map(|&(o, s)| {
                if s == 0 {
                    cat.object_label(o).to_string()
                } else {
                    format!("{}<{}>", cat.object_label(o), s)
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Checks strict upper-triangularity, the degree-2 condition and `c_p = 0`
/// where `c_1 = alpha` and `c_{m+1} = ∂(c_m) + alpha·c_m`.
pub fn validate_twisted(cat: &PdgCategory, x: &TwistedObject) -> Result<(), TwistedViolation> {
    let n = x.len();
    for k in 0..n {
        for l in 0..n {
            let e = x.alpha.get(k, l);
            if is_zero_vec(e) {
                continue;
            }
            if k >= l {
                return Err(TwistedViolation::NotStrictlyUpper { row: k, col: l });
            }
            let (ok, ol) = (x.gens[k].0, x.gens[l].0);
            match cat.degree_of(ok, ol, e) {
                Some(d) if x.entry_degree(k, l, d) == 2 => {}
                _ => return Err(TwistedViolation::WrongDegree { row: k, col: l }),
            }
        }
    }
    let g = &x.gens;
    let mut c = x.alpha.clone();
    for _ in 1..cat.p() {
        c = c.diff(cat, g, g).add(cat, &x.alpha.mul(cat, &c, g, g, g));
    }
    for k in 0..n {
        for l in 0..n {
            if !is_zero_vec(c.get(k, l)) {
                return Err(TwistedViolation::NotNilpotent { row: k, col: l });
            }
        }
    }
    Ok(())
}

/// A homogeneous morphism of twisted objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedMorphism {
    pub source: TwistedObject,
    pub target: TwistedObject,
    pub degree: i64,
    pub entries: HomMatrix,
}

impl TwistedMorphism {
    pub fn new(
        cat: &PdgCategory,
        source: &TwistedObject,
        target: &TwistedObject,
        degree: i64,
        entries: HomMatrix,
    ) -> Result<Self, TwistedError> {
        if entries.rows != target.len() || entries.cols != source.len() {
            return Err(TwistedError::Shape(format!(
                "entries are {}x{} but objects have {} -> {} generators",
                entries.rows,
                entries.cols,
                source.len(),
                target.len()
            )));
        }
        for r in 0..target.len() {
            for c in 0..source.len() {
                let e = entries.get(r, c);
                if is_zero_vec(e) {
                    continue;
                }
                let ok = cat
                    .degree_of(target.gens[r].0, source.gens[c].0, e)
                    .is_some_and(|d| d + source.gens[c].1 - target.gens[r].1 == degree);
                if !ok {
                    return Err(TwistedError::Degree { row: r, col: c, expected: degree });
                }
            }
        }
        Ok(TwistedMorphism { source: source.clone(), target: target.clone(), degree, entries })
    }

    pub fn zero(cat: &PdgCategory, source: &TwistedObject, target: &TwistedObject, degree: i64) -> Self {
        TwistedMorphism {
            source: source.clone(),
            target: target.clone(),
            degree,
            entries: HomMatrix::zero(cat, &target.gens, &source.gens),
        }
    }

    pub fn identity(cat: &PdgCategory, x: &TwistedObject) -> Self {
        let mut m = TwistedMorphism::zero(cat, x, x, 0);
        for (i, &(o, _)) in x.gens.iter().enumerate() {
            m.entries.set(i, i, cat.identity(o).to_vec());
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_zero()
    }

    /// `self ∘ first`
    pub fn compose(&self, cat: &PdgCategory, first: &TwistedMorphism) -> TwistedMorphism {
        assert_eq!(first.target.gens, self.source.gens, "composition of non-matching morphisms");
        TwistedMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            degree: self.degree + first.degree,
            entries: self.entries.mul(cat, &first.entries, &self.target.gens, &self.source.gens, &first.source.gens),
        }
    }

    pub fn add(&self, cat: &PdgCategory, other: &TwistedMorphism) -> TwistedMorphism {
        assert_eq!(self.degree, other.degree, "sum of morphisms of different degrees");
        TwistedMorphism { entries: self.entries.add(cat, &other.entries), ..self.clone() }
    }

    pub fn sub(&self, cat: &PdgCategory, other: &TwistedMorphism) -> TwistedMorphism {
        assert_eq!(self.degree, other.degree, "difference of morphisms of different degrees");
        TwistedMorphism { entries: self.entries.sub(cat, &other.entries), ..self.clone() }
    }

    pub fn scale(&self, cat: &PdgCategory, c: Scalar) -> TwistedMorphism {
        TwistedMorphism { entries: self.entries.scale(cat, c), ..self.clone() }
    }

    pub fn describe(&self, cat: &PdgCategory) -> String {
        let mut rows = Vec::new();
        for r in 0..self.target.len() {
            let cells: Vec<String> = (0..self.source.len())
                .map(|c| cat.format(self.target.gens[r].0, self.source.gens[c].0, self.entries.get(r, c)))
                .collect();
            rows.push(format!("[{}]", cells.join(", ")));
        }
        rows.join("\n")
    }
}

/// The conjugated differential `∂γ + βγ − γα`.
pub fn morphism_diff(cat: &PdgCategory, g: &TwistedMorphism) -> TwistedMorphism {
    let (src, tgt) = (&g.source, &g.target);
    let d = g.entries.diff(cat, &tgt.gens, &src.gens);
    let bg = tgt.alpha.mul(cat, &g.entries, &tgt.gens, &tgt.gens, &src.gens);
    let ga = g.entries.mul(cat, &src.alpha, &tgt.gens, &src.gens, &src.gens);
    TwistedMorphism {
        source: src.clone(),
        target: tgt.clone(),
        degree: g.degree + 2,
        entries: d.add(cat, &bg).sub(cat, &ga),
    }
}

pub fn morphism_diff_pow(cat: &PdgCategory, g: &TwistedMorphism, k: usize) -> TwistedMorphism {
    let mut out = g.clone();
    for _ in 0..k {
        out = morphism_diff(cat, &out);
    }
    out
}

/// Generator list concatenation with block-diagonal twist.
pub fn direct_sum(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject) -> TwistedObject {
    let mut gens = x.gens.clone();
    gens.extend_from_slice(&y.gens);
    let mut alpha = HomMatrix::zero(cat, &gens, &gens);
    let nx = x.len();
    for k in 0..nx {
        for l in 0..nx {
            alpha.set(k, l, x.alpha.get(k, l).to_vec());
        }
    }
    for k in 0..y.len() {
        for l in 0..y.len() {
            alpha.set(nx + k, nx + l, y.alpha.get(k, l).to_vec());
        }
    }
    TwistedObject { gens, alpha }
}

pub fn direct_sum_all(cat: &PdgCategory, xs: &[TwistedObject]) -> TwistedObject {
    xs.iter().fold(TwistedObject::zero_object(), |acc, x| direct_sum(cat, &acc, x))
}

/// Canonical injection of the `which`-th summand (0 for `x`, 1 for `y`).
pub fn sum_injection(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject, which: usize) -> TwistedMorphism {
    let s = direct_sum(cat, x, y);
    let (part, off) = if which == 0 { (x, 0) } else { (y, x.len()) };
    let mut m = TwistedMorphism::zero(cat, part, &s, 0);
    for (i, &(o, _)) in part.gens.iter().enumerate() {
        m.entries.set(off + i, i, cat.identity(o).to_vec());
    }
    m
}

pub fn sum_projection(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject, which: usize) -> TwistedMorphism {
    let s = direct_sum(cat, x, y);
    let (part, off) = if which == 0 { (x, 0) } else { (y, x.len()) };
    let mut m = TwistedMorphism::zero(cat, &s, part, 0);
    for (i, &(o, _)) in part.gens.iter().enumerate() {
        m.entries.set(i, off + i, cat.identity(o).to_vec());
    }
    m
}

/// `X ⊗ V_i⟨s⟩`: generators `(m, j)` ordered with `m` outer, shift
/// `shift_m + s - 2(i - j)`, twist `alpha ⊗ I + id ⊗ J_i`.
pub fn tensor_indecomposable(cat: &PdgCategory, x: &TwistedObject, i: usize, s: i64) -> TwistedObject {
    let w = i + 1;
    let mut gens = Vec::with_capacity(x.len() * w);
    for &(o, sh) in &x.gens {
        for j in 0..w {
            gens.push((o, sh + s - 2 * (i as i64 - j as i64)));
        }
    }
    let mut alpha = HomMatrix::zero(cat, &gens, &gens);
    for k in 0..x.len() {
        for l in 0..x.len() {
            let e = x.alpha.get(k, l);
            if is_zero_vec(e) {
                continue;
            }
            for j in 0..w {
                alpha.set(k * w + j, l * w + j, e.to_vec());
            }
        }
        for j in 0..i {
            alpha.set(k * w + j, k * w + j + 1, cat.identity(x.gens[k].0).to_vec());
        }
    }
    TwistedObject { gens, alpha }
}

/// `X ⊗ V` for a graded H-module `V`, one block per indecomposable summand.
pub fn tensor_h(cat: &PdgCategory, x: &TwistedObject, v: &HModuleData) -> Result<TwistedObject, TwistedError> {
    let parts = match &v.decomposition {
        Some(d) => d.clone(),
        None => h_decompose(v)?,
    };
    let blocks: Vec<TwistedObject> = parts.iter().map(|&(i, s)| tensor_indecomposable(cat, x, i, s)).collect();
    Ok(direct_sum_all(cat, &blocks))
}

/// Outcome of the p-dg isomorphism search.
#[derive(Clone, Debug)]
pub enum IsoResult {
    Certificate { g: TwistedMorphism, inverse: TwistedMorphism },
    NotIsomorphic,
    Unknown,
}

impl IsoResult {
    pub fn is_certificate(&self) -> bool {
        matches!(self, IsoResult::Certificate { .. })
    }
}

/// Inverse of a degree-0 morphism, if any.
pub fn invert(cat: &PdgCategory, g: &TwistedMorphism) -> Option<TwistedMorphism> {
    let (x, y) = (&g.source, &g.target);
    let back = HomComplex::layout(cat, y, x);
    let idx = back.degree_indices(-g.degree);
    let id_x = TwistedMorphism::identity(cat, x);
    let target = HomComplex::layout(cat, x, x);
    let cols: Vec<Vec<Scalar>> = idx
        .iter()
        .map(|&b| {
            let h = back.basis_morphism(b);
            target.coords(&h.compose(cat, g))
        })
        .collect();
    let m = Mat::from_columns(cat.field(), target.dim(), &cols);
    let sol = m.solve(&target.coords(&id_x)).ok()??;
    let mut v = vec![0; back.dim()];
    for (c, &b) in sol.iter().zip(&idx) {
        v[b] = *c;
    }
    let h = back.morphism(&v, -g.degree);
    let gh = g.compose(cat, &h);
    (gh == TwistedMorphism::identity(cat, y)).then_some(h)
}

fn generator_multiset(cat: &PdgCategory, classes: &[usize], x: &TwistedObject) -> Option<Vec<(usize, i64)>> {
    if x.gens.iter().any(|&(o, _)| !cat.is_local(o)) {
        return None;
    }
    let mut v: Vec<(usize, i64)> = x.gens.iter().map(|&(o, s)| (classes[o], s)).collect();
    v.sort();
    Some(v)
}

/// Searches for a ∂-closed degree-0 isomorphism `X → Y`.
pub fn pdg_iso(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject, seed: u64, samples: usize) -> IsoResult {
    let classes = cat.object_classes(3);
    if let (Some(a), Some(b)) = (generator_multiset(cat, &classes, x), generator_multiset(cat, &classes, y)) {
        if a != b {
            return IsoResult::NotIsomorphic;
        }
    }
    let hc = HomComplex::new(cat, x, y);
    let closed = hc.cycles(0);
    let mut candidates: Vec<Vec<Scalar>> = closed.clone();
    let f = cat.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut v = vec![0; hc.dim()];
        for b in &closed {
            axpy(f, &mut v, rng.gen_range(0..f.p()), b);
        }
        candidates.push(v);
    }
    for v in candidates {
        if is_zero_vec(&v) && !x.is_empty() {
            continue;
        }
        let g = hc.morphism(&v, 0);
        if let Some(inverse) = invert(cat, &g) {
            return IsoResult::Certificate { g, inverse };
        }
    }
    IsoResult::Unknown
}
