//! Fantastic filtrations of twisted objects, subquotient idempotents with the
//! restricted differential, incremental splitting, and hom spaces between
//! presented modules `X → Y`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::category::PdgCategory;
use crate::gflin::{is_zero_vec, Echelon, GradedSpace, Mat, Scalar};
use crate::homotopy::{is_closed, HomComplex};
use crate::pdgalg::{PdgAlgebra, Violation};
use crate::twisted::{morphism_diff, TwistedMorphism, TwistedObject};

/// Splitting data `u_i: X → X_i`, `v_i: X_i → X` for a filtration of `X`.
#[derive(Clone, Debug)]
pub struct FantasticCertificate {
    pub object: TwistedObject,
    pub pieces: Vec<TwistedObject>,
    pub u: Vec<TwistedMorphism>,
    pub v: Vec<TwistedMorphism>,
}

/// First failed condition (pieces are 1-based in messages).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FantasticViolation {
    Shape(String),
    Orthogonality { i: usize, j: usize },
    Completeness,
    DiffSplitting { i: usize },
    Containment { i: usize },
}

impl fmt::Display for FantasticViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FantasticViolation::Shape(s) => write!(f, "shape: {s}"),
            FantasticViolation::Orthogonality { i, j } => write!(f, "u_{} v_{} is not {}", i + 1, j + 1, if i == j { "the identity" } else { "zero" }),
            FantasticViolation::Completeness => write!(f, "the sum of v_j u_j is not the identity"),
            FantasticViolation::DiffSplitting { i } => write!(f, "d(u_{0}) v_{0} is nonzero", i + 1),
            FantasticViolation::Containment { i } => write!(f, "the image of d(v_{0}) u_{0} is not contained in F_{1}", i + 1, i),
        }
    }
}

pub fn verify_fantastic(cat: &PdgCategory, cert: &FantasticCertificate) -> Result<(), FantasticViolation> {
    let m = cert.pieces.len();
    if cert.u.len() != m || cert.v.len() != m {
        return Err(FantasticViolation::Shape("need one u and one v per piece".into()));
    }
    for i in 0..m {
        let (u, v) = (&cert.u[i], &cert.v[i]);
        if u.source.gens != cert.object.gens || u.target.gens != cert.pieces[i].gens || v.source.gens != cert.pieces[i].gens || v.target.gens != cert.object.gens {
            return Err(FantasticViolation::Shape(format!("maps of piece {} do not match", i + 1)));
        }
    }
    for i in 0..m {
        for j in 0..m {
            let uv = cert.u[i].compose(cat, &cert.v[j]);
            let ok = if i == j { uv == TwistedMorphism::identity(cat, &cert.pieces[i]) } else { uv.is_zero() };
            if !ok {
                return Err(FantasticViolation::Orthogonality { i, j });
            }
        }
    }
    let id = TwistedMorphism::identity(cat, &cert.object);
    let mut sum = TwistedMorphism::zero(cat, &cert.object, &cert.object, 0);
    let projectors: Vec<TwistedMorphism> = (0..m).map(|j| cert.v[j].compose(cat, &cert.u[j])).collect();
    for pj in &projectors {
        sum = sum.add(cat, pj);
    }
    if sum != id {
        return Err(FantasticViolation::Completeness);
    }
    let mut below = TwistedMorphism::zero(cat, &cert.object, &cert.object, 0);
    for i in 0..m {
        if !morphism_diff(cat, &cert.u[i]).compose(cat, &cert.v[i]).is_zero() {
            return Err(FantasticViolation::DiffSplitting { i });
        }
        let t = morphism_diff(cat, &cert.v[i]).compose(cat, &cert.u[i]);
        // e_{<i} t = t iff the image of t lies in F_{i-1}
        let below_t = below.compose(cat, &t);
        if below_t != t {
            return Err(FantasticViolation::Containment { i });
        }
        below = below.add(cat, &projectors[i]);
    }
    Ok(())
}

/// The filtration by single generators, taken in the given order.
pub fn filtration_in_order(cat: &PdgCategory, x: &TwistedObject, order: &[usize]) -> FantasticCertificate {
    let mut pieces = Vec::new();
    let mut u = Vec::new();
    let mut v = Vec::new();
    for &k in order {
        let (o, s) = x.gens[k];
        let piece = TwistedObject::single(cat, o, s);
        let mut uk = TwistedMorphism::zero(cat, x, &piece, 0);
        uk.entries.set(0, k, cat.identity(o).to_vec());
        let mut vk = TwistedMorphism::zero(cat, &piece, x, 0);
        vk.entries.set(k, 0, cat.identity(o).to_vec());
        pieces.push(piece);
        u.push(uk);
        v.push(vk);
    }
    FantasticCertificate { object: x.clone(), pieces, u, v }
}

/// The generator-order filtration, which always verifies for a valid object.
pub fn canonical_filtration(cat: &PdgCategory, x: &TwistedObject) -> FantasticCertificate {
    let order: Vec<usize> = (0..x.len()).collect();
    filtration_in_order(cat, x, &order)
}

/// `End(X)` over all degrees as a p-dg algebra; basis as in `HomComplex`.
pub fn end_algebra(cat: &PdgCategory, x: &TwistedObject) -> Result<PdgAlgebra, Vec<Violation>> {
    let hc = HomComplex::new(cat, x, x);
    let n = hc.dim();
    let mut table = vec![Vec::new(); n * n];
    let basis: Vec<TwistedMorphism> = (0..n).map(|b| hc.basis_morphism(b)).collect();
    for i in 0..n {
        for j in 0..n {
            let prod = hc.coords(&basis[i].compose(cat, &basis[j]));
            table[i * n + j] = prod.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (k, c)).collect();
        }
    }
    let unit = hc.coords(&TwistedMorphism::identity(cat, x));
    PdgAlgebra::from_parts(cat.field(), hc.space.clone(), unit.clone(), table, hc.diff.matrix.clone(), vec![unit])
}

/// Which identity of a subquotient pair fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubquotientFailure {
    NotIdempotent,
    DominatingNotIdempotent,
    NotDominated,
    DominatingNotClosed,
    ComplementNotClosed,
}

/// Checks `e² = e`, `w² = w`, `we = ew = e`, `w∂(w) = 0`, `(w−e)∂(w−e) = 0`.
pub fn subquotient_failure(a: &PdgAlgebra, e: &[Scalar], w: &[Scalar]) -> Option<SubquotientFailure> {
    let f = a.field();
    if a.mul(e, e) != e {
        return Some(SubquotientFailure::NotIdempotent);
    }
    if a.mul(w, w) != w {
        return Some(SubquotientFailure::DominatingNotIdempotent);
    }
    if a.mul(w, e) != e || a.mul(e, w) != e {
        return Some(SubquotientFailure::NotDominated);
    }
    if !is_zero_vec(&a.mul(w, &a.diff(w))) {
        return Some(SubquotientFailure::DominatingNotClosed);
    }
    let c = crate::gflin::vec_sub(f, w, e);
    if !is_zero_vec(&a.mul(&c, &a.diff(&c))) {
        return Some(SubquotientFailure::ComplementNotClosed);
    }
    None
}

pub fn check_subquotient(a: &PdgAlgebra, e: &[Scalar], w: &[Scalar]) -> bool {
    subquotient_failure(a, e, w).is_none()
}

/// `∂•(fge) = f ∂(fge) e`.
pub fn restricted_diff(a: &PdgAlgebra, f: &[Scalar], g: &[Scalar], e: &[Scalar]) -> Vec<Scalar> {
    let fge = a.mul(&a.mul(f, g), e);
    a.mul(&a.mul(f, &a.diff(&fge)), e)
}

/// Homogeneous basis of `f A e` chosen among `f b_i e`.
pub fn corner_basis(a: &PdgAlgebra, f: &[Scalar], e: &[Scalar]) -> Vec<(Vec<Scalar>, i64)> {
    let mut by_degree: BTreeMap<i64, Echelon> = BTreeMap::new();
    let mut out = Vec::new();
    for i in 0..a.dim() {
        let v = a.mul(&a.mul(f, &a.basis_vec(i)), e);
        if is_zero_vec(&v) {
            continue;
        }
        let d = a.degree(i);
        let ech = by_degree.entry(d).or_insert_with(|| Echelon::new(a.field(), a.dim()));
        if ech.insert(&v) {
            out.push((v, d));
        }
    }
    out
}

/// Matrix of `∂•` on `f A e` in the basis of `corner_basis`.
pub fn restricted_diff_matrix(a: &PdgAlgebra, f: &[Scalar], e: &[Scalar]) -> Mat {
    let basis = corner_basis(a, f, e);
    let coords = crate::pdgalg::coordinates_of(a, &basis);
    let cols: Vec<Vec<Scalar>> = basis
        .iter()
        .map(|(b, _)| coords.coords(&restricted_diff(a, f, b, e)).expect("∂• preserves f A e"))
        .collect();
    Mat::from_columns(a.field(), basis.len(), &cols)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("pair {index} is not a subquotient idempotent: {failure:?}")]
    InvalidPair { index: usize, failure: SubquotientFailure },
    #[error("split algebra failed validation: {0}")]
    Invalid(String),
}

/// An algebra whose objects are the requested splittings `X_e` (after the
/// original idempotents when `keep_original`), with hom pieces `f A e` and
/// the restricted differential.
pub fn split_completion(
    a: &PdgAlgebra,
    pairs: &[(Vec<Scalar>, Vec<Scalar>)],
    keep_original: bool,
) -> Result<PdgAlgebra, SplitError> {
    let mut objs: Vec<Vec<Scalar>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    if keep_original {
        for i in 0..a.num_idempotents() {
            objs.push(a.idempotent(i).to_vec());
            labels.push(format!("e{}", i + 1));
        }
    }
    for (k, (e, w)) in pairs.iter().enumerate() {
        if let Some(failure) = subquotient_failure(a, e, w) {
            return Err(SplitError::InvalidPair { index: k + 1, failure });
        }
        objs.push(e.clone());
        labels.push(format!("X{}", k + 1));
    }
    let r = objs.len();
    // blocks[(b, a)] = basis of objs[b] A objs[a]
    let mut block_of = Vec::new();
    let mut elems = Vec::new();
    let mut basis = Vec::new();
    let mut offsets = vec![0; r * r];
    let mut coords = Vec::new();
    for b in 0..r {
        for s in 0..r {
            offsets[b * r + s] = elems.len();
            let piece = corner_basis(a, &objs[b], &objs[s]);
            coords.push(crate::pdgalg::coordinates_of(a, &piece));
            for (idx, (v, d)) in piece.into_iter().enumerate() {
                basis.push((format!("{}<-{}:{}", labels[b], labels[s], idx + 1), d));
                block_of.push((b, s));
                elems.push(v);
            }
        }
    }
    let n = elems.len();
    let f = a.field();
    let embed = |b: usize, s: usize, v: &[Scalar]| -> Vec<(usize, Scalar)> {
        let c = coords[b * r + s].coords(v).expect("product stays in its corner");
        c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (offsets[b * r + s] + i, x)).collect()
    };
    let mut table = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in 0..n {
            let (b, s) = block_of[i];
            let (d, t) = block_of[j];
            if s != d {
                continue;
            }
            table[i * n + j] = embed(b, t, &a.mul(&elems[i], &elems[j]));
        }
    }
    let mut diff = Mat::zeros(f, n, n);
    for i in 0..n {
        let (b, s) = block_of[i];
        let dx = a.mul(&a.mul(&objs[b], &a.diff(&elems[i])), &objs[s]);
        for (k, c) in embed(b, s, &dx) {
            diff.set(k, i, c);
        }
    }
    let mut unit = vec![0; n];
    let mut idempotents = Vec::new();
    for b in 0..r {
        let mut e = vec![0; n];
        for (k, c) in embed(b, b, &objs[b]) {
            e[k] = c;
            unit[k] = c;
        }
        idempotents.push(e);
    }
    PdgAlgebra::from_parts(f, GradedSpace { basis }, unit, table, diff, idempotents)
        .map_err(|v| SplitError::Invalid(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")))
}

/// A Z-morphism `f: X → Y` of degree 0, standing for its cokernel.
#[derive(Clone, Debug)]
pub struct PresentedModule {
    pub f: TwistedMorphism,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("presentation map must have degree 0 and be annihilated by the differential")]
    NotZMorphism,
}

impl PresentedModule {
    pub fn new(cat: &PdgCategory, f: TwistedMorphism) -> Result<Self, PresentationError> {
        if f.degree != 0 || !is_closed(cat, &f) {
            return Err(PresentationError::NotZMorphism);
        }
        Ok(PresentedModule { f })
    }

    /// `0 → Y`
    pub fn free(cat: &PdgCategory, y: &TwistedObject) -> Self {
        PresentedModule { f: TwistedMorphism::zero(cat, &TwistedObject::zero_object(), y, 0) }
    }
}

/// Per-degree data of a presented hom space. Coordinates are pairs
/// `(φ0, φ1)` concatenated.
#[derive(Clone, Debug)]
pub struct PresentedHomPiece {
    pub degree: i64,
    pub pairs: Vec<Vec<Scalar>>,
    pub relations: Vec<Vec<Scalar>>,
    pub representatives: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug)]
pub struct PresentedHom {
    pub h0: HomComplex,
    pub h1: HomComplex,
    pub pieces: Vec<PresentedHomPiece>,
}

impl PresentedHom {
    pub fn graded_dim(&self) -> BTreeMap<i64, i64> {
        self.pieces
            .iter()
            .filter(|p| !p.representatives.is_empty())
            .map(|p| (p.degree, p.representatives.len() as i64))
            .collect()
    }

    pub fn total_dim(&self) -> usize {
        self.pieces.iter().map(|p| p.representatives.len()).sum()
    }

    pub fn split(&self, v: &[Scalar], degree: i64) -> (TwistedMorphism, TwistedMorphism) {
        let n0 = self.h0.dim();
        (self.h0.morphism(&v[..n0], degree), self.h1.morphism(&v[n0..], degree))
    }

    pub fn join(&self, phi0: &TwistedMorphism, phi1: &TwistedMorphism) -> Vec<Scalar> {
        let mut v = self.h0.coords(phi0);
        v.extend(self.h1.coords(phi1));
        v
    }

    /// Componentwise differential.
    pub fn diff(&self, cat: &PdgCategory, v: &[Scalar], degree: i64) -> Vec<Scalar> {
        let (a, b) = self.split(v, degree);
        self.join(&morphism_diff(cat, &a), &morphism_diff(cat, &b))
    }

    fn piece(&self, degree: i64) -> Option<&PresentedHomPiece> {
        self.pieces.iter().find(|p| p.degree == degree)
    }

    /// Whether `v` lies in the relation subspace of its degree.
    pub fn is_relation(&self, cat: &PdgCategory, v: &[Scalar], degree: i64) -> bool {
        let Some(p) = self.piece(degree) else { return is_zero_vec(v) };
        let mut ech = Echelon::new(cat.field(), v.len());
        for r in &p.relations {
            ech.insert(r);
        }
        ech.contains(v)
    }
}

/// Pairs `(φ0, φ1)` with `φ1 f = f′ φ0`, modulo those with `φ1 = f′ η`.
pub fn presented_hom(cat: &PdgCategory, m: &PresentedModule, n: &PresentedModule) -> PresentedHom {
    let (f, g) = (&m.f, &n.f);
    let h0 = HomComplex::new(cat, &f.source, &g.source);
    let h1 = HomComplex::new(cat, &f.target, &g.target);
    let heta = HomComplex::new(cat, &f.target, &g.source);
    let hout = HomComplex::new(cat, &f.source, &g.target);
    let field = cat.field();
    let (n0, n1) = (h0.dim(), h1.dim());
    let mut degrees: Vec<i64> = h0.degrees();
    degrees.extend(h1.degrees());
    degrees.sort();
    degrees.dedup();
    let mut pieces = Vec::new();
    for d in degrees {
        let i0 = h0.degree_indices(d);
        let i1 = h1.degree_indices(d);
        // columns: φ0 basis then φ1 basis, mapped to φ1 f − f′ φ0
        let mut cols = Vec::new();
        for &b in &i0 {
            let c = hout.coords(&g.compose(cat, &h0.basis_morphism(b)));
            cols.push(c.iter().map(|&x| field.neg(x)).collect::<Vec<_>>());
        }
        for &b in &i1 {
            cols.push(hout.coords(&h1.basis_morphism(b).compose(cat, f)));
        }
        let mat = Mat::from_columns(field, hout.dim(), &cols);
        let full = |k: &[Scalar]| {
            let mut v = vec![0; n0 + n1];
            for (c, &b) in k[..i0.len()].iter().zip(&i0) {
                v[b] = *c;
            }
            for (c, &b) in k[i0.len()..].iter().zip(&i1) {
                v[n0 + b] = *c;
            }
            v
        };
        let pairs: Vec<Vec<Scalar>> = mat.kernel().iter().map(|k| full(k)).collect();
        // relations: pairs whose φ1 lies in f′·Hom(Y, X′) of degree d
        let image: Vec<Vec<Scalar>> = heta
            .degree_indices(d)
            .iter()
            .map(|&b| h1.coords(&g.compose(cat, &heta.basis_morphism(b))))
            .collect();
        let mut rel_cols: Vec<Vec<Scalar>> = pairs.iter().map(|p| p[n0..].to_vec()).collect();
        rel_cols.extend(image.iter().map(|v| v.iter().map(|&x| field.neg(x)).collect()));
        let rel_mat = Mat::from_columns(field, n1, &rel_cols);
        let mut rel_ech = Echelon::new(field, n0 + n1);
        for k in rel_mat.kernel() {
            let mut v = vec![0; n0 + n1];
            for (c, p) in k[..pairs.len()].iter().zip(&pairs) {
                crate::gflin::axpy(field, &mut v, *c, p);
            }
            rel_ech.insert(&v);
        }
        let relations = rel_ech.basis();
        let (_, representatives) = crate::gflin::subspace_quotient(field, n0 + n1, &relations, &pairs);
        pieces.push(PresentedHomPiece { degree: d, pairs, relations, representatives });
    }
    PresentedHom { h0, h1, pieces }
}
