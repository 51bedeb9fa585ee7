//! The 2-category of shifted identities and projective bimodules over a
//! family of p-dg algebras, one algebra per object.
//!
//! A 1-morphism `i → j` acts on right modules. `P(s,t)` (with `t` an
//! idempotent of the source algebra `A_i` and `s` one of the target `A_j`) is
//! the bimodule `A_i e_t ⊗ e_s A_j`, generated by `e_t ⊗ e_s`. A 2-morphism is
//! stored as the image of the generator of its source, so that
//!
//! * `Hom(P(s,t), P(u,v)) = e_t A_i e_v ⊗ e_u A_j e_s`,
//! * `Hom(P(s,t), Id) = e_t A e_s`,
//! * `Hom(Id, P(s,t))` is the space of central elements of `A e_t ⊗ e_s A`,
//! * `Hom(Id, Id) = Z(A)`.
//!
//! Each 1-hom category is a `PdgCategory` on the basic 1-morphisms; general
//! 1-morphisms are twisted objects over it.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::category::{AmbientBasis, PdgCategory};
use crate::gflin::{axpy, is_zero_vec, vec_add, Coordinates, Field, Mat, Scalar};
use crate::pdgalg::{coordinates_of, format_combination, iso_classes, AlgebraError, PdgAlgebra};
use crate::twisted::{HomMatrix, TwistedMorphism, TwistedObject};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BicatError {
    #[error("algebras must share the same prime")]
    FieldMismatch,
    #[error("the family is empty")]
    Empty,
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    #[error("unknown idempotent {0} (idempotents are numbered 1..={1})")]
    UnknownIdempotent(usize, usize),
    #[error("unknown object {0} (objects are numbered 1..={1})")]
    UnknownObject(usize, usize),
    #[error("End(Id({0})) = Z(A_{0}) is not local; restrict to a block of the algebra")]
    NonLocalIdentity(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A basic 1-morphism, with idempotent indices local to their algebras.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basic {
    Id,
    /// `s` in the target algebra, `t` in the source algebra
    P { s: usize, t: usize },
}

/// The 1-hom category `C(i, j)` on basic 1-morphisms.
#[derive(Clone, Debug)]
pub struct HomCategory {
    pub source: usize,
    pub target: usize,
    pub objects: Vec<Basic>,
    pub cat: PdgCategory,
}

impl HomCategory {
    pub fn index(&self, b: Basic) -> Option<usize> {
        self.objects.iter().position(|&o| o == b)
    }
}

/// A summand of a basic composite `M ∘ N`: its basic object in `C(i,k)`,
/// its shift and its generator as a pair `(n, m)` with `n ⊗ m`.
#[derive(Clone, Debug)]
pub(crate) struct Expansion {
    pub(crate) summands: Vec<(Basic, i64)>,
    pub(crate) gens: Vec<(Vec<Scalar>, Vec<Scalar>)>,
    /// ordered basis of the middle corner for `P ∘ P`
    middle: Option<(Vec<(Vec<Scalar>, i64)>, Coordinates)>,
}

/// The family `A_1, …, A_n` and its 1-hom categories (built on demand).
pub struct Bicategory {
    field: Field,
    algebras: Vec<PdgAlgebra>,
    offsets: Vec<usize>,
    homcats: Vec<OnceLock<HomCategory>>,
    module_cats: Vec<OnceLock<PdgCategory>>,
}

impl fmt::Debug for Bicategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bicategory").field("objects", &self.algebras.len()).finish()
    }
}

impl Bicategory {
    pub fn new(algebras: Vec<PdgAlgebra>) -> Result<Self, BicatError> {
        let first = algebras.first().ok_or(BicatError::Empty)?;
        let field = first.field();
        if algebras.iter().any(|a| a.field() != field) {
            return Err(BicatError::FieldMismatch);
        }
        let mut offsets = Vec::new();
        let mut acc = 0;
        for a in &algebras {
            offsets.push(acc);
            acc += a.num_idempotents();
        }
        let n = algebras.len();
        Ok(Bicategory {
            field,
            algebras,
            offsets,
            homcats: (0..n * n).map(|_| OnceLock::new()).collect(),
            module_cats: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn num_objects(&self) -> usize {
        self.algebras.len()
    }

    pub fn algebra(&self, i: usize) -> &PdgAlgebra {
        &self.algebras[i]
    }

    pub fn num_idempotents(&self) -> usize {
        self.offsets.last().unwrap() + self.algebras.last().unwrap().num_idempotents()
    }

    /// 1-based global number of a local idempotent.
    pub fn global(&self, obj: usize, local: usize) -> usize {
        self.offsets[obj] + local + 1
    }

    /// Object and local index of a 1-based global idempotent number.
    pub fn locate(&self, global: usize) -> Result<(usize, usize), BicatError> {
        let total = self.num_idempotents();
        if global == 0 || global > total {
            return Err(BicatError::UnknownIdempotent(global, total));
        }
        let g = global - 1;
        let obj = (0..self.num_objects()).rev().find(|&o| self.offsets[o] <= g).unwrap();
        Ok((obj, g - self.offsets[obj]))
    }

    pub fn check_object(&self, i: usize) -> Result<(), BicatError> {
        if i >= self.num_objects() {
            Err(BicatError::UnknownObject(i + 1, self.num_objects()))
        } else {
            Ok(())
        }
    }

    pub fn basic_label(&self, i: usize, j: usize, b: Basic) -> String {
        match b {
            Basic::Id => format!("Id({})", i + 1),
            Basic::P { s, t } => format!("P({},{})", self.global(j, s), self.global(i, t)),
        }
    }

    pub(crate) fn amb_dim(&self, i: usize, j: usize, b: Basic) -> usize {
        match b {
            Basic::Id => self.algebras[i].dim(),
            Basic::P { .. } => self.algebras[i].dim() * self.algebras[j].dim(),
        }
    }

    pub(crate) fn generator(&self, i: usize, j: usize, b: Basic) -> Vec<Scalar> {
        match b {
            Basic::Id => self.algebras[i].unit().to_vec(),
            Basic::P { s, t } => self.kron(i, j, self.algebras[i].idempotent(t), self.algebras[j].idempotent(s)),
        }
    }

    pub(crate) fn kron(&self, i: usize, j: usize, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let dj = self.algebras[j].dim();
        let mut v = vec![0; self.algebras[i].dim() * dj];
        for (a, &ca) in x.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (b, &cb) in y.iter().enumerate() {
                if cb != 0 {
                    v[a * dj + b] = f.add(v[a * dj + b], f.mul(ca, cb));
                }
            }
        }
        v
    }

    /// Nonzero terms `(a, b, c)` of an element `Σ c·(a ⊗ b)` of `A_i ⊗ A_j`.
    pub(crate) fn terms(&self, j: usize, v: &[Scalar]) -> Vec<(usize, usize, Scalar)> {
        let dj = self.algebras[j].dim();
        v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (k / dj, k % dj, c)).collect()
    }

    /// `x · v · y` for `v` in the ambient space of a basic object of `C(i,j)`.
    pub(crate) fn act(&self, i: usize, j: usize, b: Basic, x: &[Scalar], v: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        match b {
            Basic::Id => {
                let a = &self.algebras[i];
                a.mul(&a.mul(x, v), y)
            }
            Basic::P { .. } => {
                let (ai, aj) = (&self.algebras[i], &self.algebras[j]);
                let f = self.field;
                let mut out = vec![0; ai.dim() * aj.dim()];
                for (p, q, c) in self.terms(j, v) {
                    let l = ai.mul(x, &ai.basis_vec(p));
                    let r = aj.mul(&aj.basis_vec(q), y);
                    axpy(f, &mut out, c, &self.kron(i, j, &l, &r));
                }
                out
            }
        }
    }

    /// Evaluates the 2-morphism `psi: n_obj → l_obj` (given by `m_psi`) on an
    /// element `v` of `n_obj`.
    pub(crate) fn eval(&self, i: usize, j: usize, n_obj: Basic, l_obj: Basic, m_psi: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        match n_obj {
            Basic::Id => {
                let one = self.algebras[j].unit().to_vec();
                self.act(i, j, l_obj, v, m_psi, &one)
            }
            Basic::P { .. } => {
                let (ai, aj) = (&self.algebras[i], &self.algebras[j]);
                let mut out = vec![0; self.amb_dim(i, j, l_obj)];
                for (p, q, c) in self.terms(j, v) {
                    axpy(f, &mut out, c, &self.act(i, j, l_obj, &ai.basis_vec(p), m_psi, &aj.basis_vec(q)));
                }
                out
            }
        }
    }

    pub(crate) fn diff_amb(&self, i: usize, j: usize, b: Basic, v: &[Scalar]) -> Vec<Scalar> {
        match b {
            Basic::Id => self.algebras[i].diff(v),
            Basic::P { .. } => {
                let (ai, aj) = (&self.algebras[i], &self.algebras[j]);
                let f = self.field;
                let mut out = vec![0; ai.dim() * aj.dim()];
                for (p, q, c) in self.terms(j, v) {
                    let (bp, bq) = (ai.basis_vec(p), aj.basis_vec(q));
                    axpy(f, &mut out, c, &self.kron(i, j, &ai.diff(&bp), &bq));
                    axpy(f, &mut out, c, &self.kron(i, j, &bp, &aj.diff(&bq)));
                }
                out
            }
        }
    }

    fn format_amb(&self, i: usize, j: usize, b: Basic, v: &[Scalar]) -> String {
        match b {
            Basic::Id => self.algebras[i].format_elem(v),
            Basic::P { .. } => {
                let dj = self.algebras[j].dim();
                format_combination(self.field, v, |k| {
                    format!("{}⊗{}", self.algebras[i].label(k / dj), self.algebras[j].label(k % dj))
                })
            }
        }
    }

    /// Basis of `Hom(src, tgt)` in the ambient space of `tgt`.
    fn hom_basis(&self, i: usize, j: usize, src: Basic, tgt: Basic) -> Vec<(Vec<Scalar>, i64)> {
        let (ai, aj) = (&self.algebras[i], &self.algebras[j]);
        match (src, tgt) {
            (Basic::P { s, t }, Basic::P { s: u, t: v }) => {
                let mut out = Vec::new();
                for (x, dx) in ai.piece(t, v) {
                    for (y, dy) in aj.piece(u, s) {
                        out.push((self.kron(i, j, &x, &y), dx + dy));
                    }
                }
                out
            }
            (Basic::P { s, t }, Basic::Id) => ai.piece(t, s),
            (Basic::Id, Basic::Id) => ai.center(),
            (Basic::Id, Basic::P { s, t }) => self.central_elements(i, s, t),
        }
    }

    /// Homogeneous basis of `{m ∈ A e_t ⊗ e_s A : a m = m a for all a}`.
    fn central_elements(&self, i: usize, s: usize, t: usize) -> Vec<(Vec<Scalar>, i64)> {
        let a = &self.algebras[i];
        let f = self.field;
        let r = a.num_idempotents();
        let mut cands: BTreeMap<i64, Vec<Vec<Scalar>>> = BTreeMap::new();
        for k in 0..r {
            for (x, dx) in a.piece(k, t) {
                for k2 in 0..r {
                    for (y, dy) in a.piece(s, k2) {
                        cands.entry(dx + dy).or_default().push(self.kron(i, i, &x, &y));
                    }
                }
            }
        }
        let n2 = a.dim() * a.dim();
        let one = a.unit().to_vec();
        let mut out = Vec::new();
        for (d, cs) in cands {
            let mut m = Mat::zeros(f, 0, cs.len());
            for g in 0..a.dim() {
                let bg = a.basis_vec(g);
                let cols: Vec<Vec<Scalar>> = cs
                    .iter()
                    .map(|c| {
                        let l = self.act(i, i, Basic::P { s, t }, &bg, c, &one);
                        let rr = self.act(i, i, Basic::P { s, t }, &one, c, &bg);
                        crate::gflin::vec_sub(f, &l, &rr)
                    })
                    .collect();
                m = m.vstack(&Mat::from_columns(f, n2, &cols));
            }
            for k in m.kernel() {
                let mut v = vec![0; n2];
                for (c, cv) in k.iter().zip(&cs) {
                    axpy(f, &mut v, *c, cv);
                }
                out.push((v, d));
            }
        }
        out
    }

    fn build_homcat(&self, i: usize, j: usize) -> HomCategory {
        let mut objects = Vec::new();
        if i == j {
            objects.push(Basic::Id);
        }
        for s in 0..self.algebras[j].num_idempotents() {
            for t in 0..self.algebras[i].num_idempotents() {
                objects.push(Basic::P { s, t });
            }
        }
        let labels: Vec<String> = objects.iter().map(|&b| self.basic_label(i, j, b)).collect();
        let mut bases = Vec::new();
        for &tgt in &objects {
            for &src in &objects {
                let vectors = self
                    .hom_basis(i, j, src, tgt)
                    .into_iter()
                    .map(|(v, d)| {
                        let l = self.format_amb(i, j, tgt, &v);
                        (v, d, l)
                    })
                    .collect();
                bases.push(AmbientBasis { ambient_dim: self.amb_dim(i, j, tgt), vectors });
            }
        }
        let objs = objects.clone();
        let cat = PdgCategory::build(
            self.field,
            labels,
            bases,
            |k, m, _l, g, f| self.eval(i, j, objs[m], objs[k], g, f),
            |k, _l, v| self.diff_amb(i, j, objs[k], v),
            objects.iter().map(|&b| self.generator(i, j, b)).collect(),
        );
        HomCategory { source: i, target: j, objects, cat }
    }

    /// The 1-hom category `C(i, j)`.
    pub fn homcat(&self, i: usize, j: usize) -> &HomCategory {
        self.homcats[i * self.num_objects() + j].get_or_init(|| self.build_homcat(i, j))
    }

    /// The category of idempotents of `A_i`, on which the natural
    /// representation acts.
    pub fn module_cat(&self, i: usize) -> &PdgCategory {
        self.module_cats[i].get_or_init(|| PdgCategory::from_algebra(&self.algebras[i]))
    }

    pub(crate) fn expansion(&self, i: usize, j: usize, k: usize, m: Basic, n: Basic) -> Expansion {
        let (ai, aj, ak) = (&self.algebras[i], &self.algebras[j], &self.algebras[k]);
        match (m, n) {
            (Basic::Id, Basic::Id) => Expansion {
                summands: vec![(Basic::Id, 0)],
                gens: vec![(ai.unit().to_vec(), aj.unit().to_vec())],
                middle: None,
            },
            (Basic::Id, Basic::P { s: u, t: v }) => Expansion {
                summands: vec![(Basic::P { s: u, t: v }, 0)],
                gens: vec![(self.generator(i, j, n), aj.unit().to_vec())],
                middle: None,
            },
            (Basic::P { s, t }, Basic::Id) => Expansion {
                summands: vec![(Basic::P { s, t }, 0)],
                gens: vec![(ai.unit().to_vec(), self.generator(j, k, m))],
                middle: None,
            },
            (Basic::P { s, t }, Basic::P { s: u, t: v }) => {
                let mut piece = aj.piece(u, t);
                piece.sort_by_key(|(_, d)| std::cmp::Reverse(*d));
                let coords = coordinates_of(aj, &piece);
                let ng = self.generator(i, j, n);
                let mut summands = Vec::new();
                let mut gens = Vec::new();
                for (b, d) in &piece {
                    summands.push((Basic::P { s, t: v }, -d));
                    gens.push((ng.clone(), self.kron(j, k, b, ak.idempotent(s))));
                }
                Expansion { summands, gens, middle: Some((piece, coords)) }
            }
        }
    }

    /// `n ⊗ m` in normal form, split into components in the ambient spaces
    /// of the summands of `exp`.
    #[allow(clippy::too_many_arguments)]
    fn split_tensor(
        &self,
        i: usize,
        j: usize,
        k: usize,
        m_obj: Basic,
        n_obj: Basic,
        exp: &Expansion,
        n: &[Scalar],
        m: &[Scalar],
    ) -> Vec<Vec<Scalar>> {
        let f = self.field;
        let (ai, aj, ak) = (&self.algebras[i], &self.algebras[j], &self.algebras[k]);
        match (m_obj, n_obj) {
            (Basic::Id, Basic::Id) => vec![ai.mul(n, m)],
            (Basic::Id, Basic::P { .. }) => vec![self.act(i, j, n_obj, ai.unit(), n, m)],
            (Basic::P { .. }, Basic::Id) => vec![self.act(j, k, m_obj, n, m, ak.unit())],
            (Basic::P { .. }, Basic::P { .. }) => {
                let (piece, coords) = exp.middle.as_ref().unwrap();
                // group by the outer basis pair so each middle factor lies in its corner
                let mut mids: BTreeMap<(usize, usize), Vec<Scalar>> = BTreeMap::new();
                for (x, y, c1) in self.terms(j, n) {
                    for (z, w, c2) in self.terms(k, m) {
                        let mid = aj.mul(&aj.basis_vec(y), &aj.basis_vec(z));
                        if !is_zero_vec(&mid) {
                            axpy(f, mids.entry((x, w)).or_insert_with(|| vec![0; aj.dim()]), f.mul(c1, c2), &mid);
                        }
                    }
                }
                let mut out = vec![vec![0; ai.dim() * ak.dim()]; piece.len()];
                for ((x, w), mid) in mids {
                    let cs = coords.coords(&mid).expect("middle factor lies in its corner");
                    let xw = self.kron(i, k, &ai.basis_vec(x), &ak.basis_vec(w));
                    for (b, &cb) in cs.iter().enumerate() {
                        if cb != 0 {
                            axpy(f, &mut out[b], cb, &xw);
                        }
                    }
                }
                out
            }
        }
    }

    /// Horizontal composite `γ ∘₀ τ` of basic 2-morphisms `γ: m1 → m2` in
    /// `C(j,k)` and `τ: n1 → n2` in `C(i,j)`, as a matrix between expansions.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn hcompose_basic2(
        &self,
        i: usize,
        j: usize,
        k: usize,
        (m1, m2, gamma): (Basic, Basic, &[Scalar]),
        (n1, n2, tau): (Basic, Basic, &[Scalar]),
        e1: &Expansion,
        e2: &Expansion,
    ) -> Vec<Vec<Vec<Scalar>>> {
        let hc_jk = self.homcat(j, k);
        let hc_ij = self.homcat(i, j);
        let hc_ik = self.homcat(i, k);
        let g_amb = hc_jk.cat.to_ambient(hc_jk.index(m2).unwrap(), hc_jk.index(m1).unwrap(), gamma);
        let t_amb = hc_ij.cat.to_ambient(hc_ij.index(n2).unwrap(), hc_ij.index(n1).unwrap(), tau);
        let mut rows = vec![Vec::new(); e2.summands.len()];
        for (a, (n, m)) in e1.gens.iter().enumerate() {
            let n2v = self.eval(i, j, n1, n2, &t_amb, n);
            let m2v = self.eval(j, k, m1, m2, &g_amb, m);
            let comps = self.split_tensor(i, j, k, m2, n2, e2, &n2v, &m2v);
            let src = hc_ik.index(e1.summands[a].0).unwrap();
            for (b, comp) in comps.iter().enumerate() {
                let tgt = hc_ik.index(e2.summands[b].0).unwrap();
                let c = hc_ik.cat.from_ambient(tgt, src, comp).expect("horizontal composite lands in the hom space");
                rows[b].push(c);
            }
        }
        rows
    }

    /// Intrinsic twist of a basic composite: ∂ of each summand generator.
    fn intrinsic_twist(&self, i: usize, j: usize, k: usize, m: Basic, n: Basic, e: &Expansion) -> Vec<Vec<Vec<Scalar>>> {
        let hc_ik = self.homcat(i, k);
        let mut rows = vec![Vec::new(); e.summands.len()];
        for (a, (nv, mv)) in e.gens.iter().enumerate() {
            // ∂(n ⊗ m) = ∂n ⊗ m + n ⊗ ∂m
            let mut comps = self.split_tensor(i, j, k, m, n, e, &self.diff_amb(i, j, n, nv), mv);
            let more = self.split_tensor(i, j, k, m, n, e, nv, &self.diff_amb(j, k, m, mv));
            for (c, d) in comps.iter_mut().zip(more) {
                *c = vec_add(self.field, c, &d);
            }
            let src = hc_ik.index(e.summands[a].0).unwrap();
            for (b, comp) in comps.iter().enumerate() {
                let tgt = hc_ik.index(e.summands[b].0).unwrap();
                rows[b].push(hc_ik.cat.from_ambient(tgt, src, comp).expect("intrinsic twist lands in the hom space"));
            }
        }
        rows
    }
}

/// Where a summand came from: the summand positions it was composed of,
/// left to right, and the basis index chosen at each junction of two `P`s.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SummandKey {
    pub word: Vec<u32>,
    pub junctions: Vec<u32>,
}

/// A 1-morphism `source → target`: a twisted object over `C(source, target)`.
///
/// `keys` only decides the order of summands in composites and takes no
/// part in equality.
#[derive(Clone, Debug)]
pub struct OneMorphism {
    pub source: usize,
    pub target: usize,
    pub object: TwistedObject,
    pub keys: Vec<SummandKey>,
}

impl PartialEq for OneMorphism {
    fn eq(&self, other: &Self) -> bool {
        (self.source, self.target) == (other.source, other.target) && self.object == other.object
    }
}

impl Eq for OneMorphism {}

impl OneMorphism {
    /// Summands keyed by position.
    pub fn new(source: usize, target: usize, object: TwistedObject) -> Self {
        let keys = (0..object.len() as u32).map(|k| SummandKey { word: vec![k], junctions: Vec::new() }).collect();
        OneMorphism { source, target, object, keys }
    }

    pub fn zero(source: usize, target: usize) -> Self {
        OneMorphism::new(source, target, TwistedObject::zero_object())
    }

    pub fn identity(bc: &Bicategory, i: usize) -> Result<Self, BicatError> {
        bc.check_object(i)?;
        let hc = bc.homcat(i, i);
        Ok(OneMorphism::new(i, i, TwistedObject::single(&hc.cat, 0, 0)))
    }

    /// `P(s,t)` for 1-based global idempotents.
    pub fn proj(bc: &Bicategory, s: usize, t: usize) -> Result<Self, BicatError> {
        let (j, ls) = bc.locate(s)?;
        let (i, lt) = bc.locate(t)?;
        let hc = bc.homcat(i, j);
        let idx = hc.index(Basic::P { s: ls, t: lt }).unwrap();
        Ok(OneMorphism::new(i, j, TwistedObject::single(&hc.cat, idx, 0)))
    }

    pub fn shift(&self, n: i64) -> Self {
        OneMorphism { object: self.object.shift(n), ..self.clone() }
    }

    pub fn direct_sum(&self, bc: &Bicategory, other: &OneMorphism) -> Result<Self, BicatError> {
        if self.object.is_empty() {
            return Ok(other.clone());
        }
        if other.object.is_empty() {
            return Ok(self.clone());
        }
        if (self.source, self.target) != (other.source, other.target) {
            return Err(BicatError::ObjectMismatch(format!(
                "cannot add 1-morphisms {} -> {} and {} -> {}",
                self.source + 1,
                self.target + 1,
                other.source + 1,
                other.target + 1
            )));
        }
        let hc = bc.homcat(self.source, self.target);
        Ok(OneMorphism::new(self.source, self.target, crate::twisted::direct_sum(&hc.cat, &self.object, &other.object)))
    }

    pub fn basic(&self, bc: &Bicategory, k: usize) -> Basic {
        bc.homcat(self.source, self.target).objects[self.object.gens[k].0]
    }

    pub fn is_twisted(&self) -> bool {
        !self.object.alpha.is_zero()
    }

    /// Summands as `(basic, shift)`.
    pub fn summands(&self, bc: &Bicategory) -> Vec<(Basic, i64)> {
        (0..self.object.len()).map(|k| (self.basic(bc, k), self.object.gens[k].1)).collect()
    }

    /// e.g. `P(1,1)<2> + Id(1)`; twisted objects are marked.
    pub fn describe(&self, bc: &Bicategory) -> String {
        if self.object.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .summands(bc)
            .into_iter()
            .map(|(b, s)| {
                let l = bc.basic_label(self.source, self.target, b);
                if s == 0 {
                    l
                } else {
                    format!("{l}<{s}>")
                }
            })
            .collect();
        let body = parts.join(" + ");
        if self.is_twisted() {
            format!("[{body}; twisted]")
        } else {
            body
        }
    }

    pub fn category<'a>(&self, bc: &'a Bicategory) -> &'a PdgCategory {
        &bc.homcat(self.source, self.target).cat
    }
}

struct Layout {
    offsets: Vec<Vec<usize>>,
    exps: Vec<Vec<Expansion>>,
    gens: Vec<(usize, i64)>,
    keys: Vec<SummandKey>,
}

fn layout(bc: &Bicategory, m: &OneMorphism, n: &OneMorphism) -> Layout {
    let (i, j, k) = (n.source, n.target, m.target);
    let hc_ik = bc.homcat(i, k);
    let mut offsets = Vec::new();
    let mut exps = Vec::new();
    let mut gens = Vec::new();
    let mut keys = Vec::new();
    for a in 0..m.object.len() {
        let mut orow = Vec::new();
        let mut erow = Vec::new();
        for b in 0..n.object.len() {
            let e = bc.expansion(i, j, k, m.basic(bc, a), n.basic(bc, b));
            orow.push(gens.len());
            for (c, &(basic, sh)) in e.summands.iter().enumerate() {
                gens.push((hc_ik.index(basic).unwrap(), m.object.gens[a].1 + n.object.gens[b].1 + sh));
                let (km, kn) = (&m.keys[a], &n.keys[b]);
                let mut junctions = km.junctions.clone();
                if matches!((m.basic(bc, a), n.basic(bc, b)), (Basic::P { .. }, Basic::P { .. })) {
                    junctions.push(c as u32);
                }
                junctions.extend_from_slice(&kn.junctions);
                keys.push(SummandKey { word: [km.word.as_slice(), &kn.word].concat(), junctions });
            }
            erow.push(e);
        }
        offsets.push(orow);
        exps.push(erow);
    }
    Layout { offsets, exps, gens, keys }
}

/// The order in which composite summands are listed: smallest key first
/// among the summands whose twist predecessors are already placed. Words
/// and junction lists concatenate under composition, so the order does not
/// depend on how a triple composite is bracketed.
fn summand_order(keys: &[SummandKey], alpha: &HomMatrix) -> Vec<usize> {
    let n = keys.len();
    let mut indeg = vec![0usize; n];
    for r in 0..n {
        for c in 0..n {
            if r != c && !is_zero_vec(alpha.get(r, c)) {
                indeg[c] += 1;
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<(&SummandKey, usize)>> =
        (0..n).filter(|&c| indeg[c] == 0).map(|c| Reverse((&keys[c], c))).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, r))) = ready.pop() {
        order.push(r);
        for c in 0..n {
            if c != r && !is_zero_vec(alpha.get(r, c)) {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push(Reverse((&keys[c], c)));
                }
            }
        }
    }
    assert_eq!(order.len(), n, "composite twist is not nilpotent");
    order
}

fn place(target: &mut HomMatrix, r0: usize, c0: usize, block: Vec<Vec<Vec<Scalar>>>, f: Field) {
    for (r, row) in block.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            let cur = target.get(r0 + r, c0 + c).to_vec();
            target.set(r0 + r, c0 + c, vec_add(f, &cur, &v));
        }
    }
}

/// `M ∘ N` for `N: i → j`, `M: j → k`, with twist `α_M ∘₀ id + id ∘₀ α_N`
/// plus the twist of each basic composite.
///
/// A pair of basic summands `(m, n)` expands into one summand per basis
/// element `c` of the junction, and a composite of two plain 1-morphisms
/// lists them by `(m, n, c)`. Deeper composites compare the words of
/// summand positions first and the junction choices after, which keeps
/// composition strictly associative. A twist entry that would point
/// backwards moves its target later.
pub fn hcompose(bc: &Bicategory, m: &OneMorphism, n: &OneMorphism) -> Result<OneMorphism, BicatError> {
    Ok(hcompose_ordered(bc, m, n)?.0)
}

/// The composite and, for each of its summands, the position in the
/// lexicographic layout.
fn hcompose_ordered(bc: &Bicategory, m: &OneMorphism, n: &OneMorphism) -> Result<(OneMorphism, Vec<usize>), BicatError> {
    if m.source != n.target {
        return Err(BicatError::ObjectMismatch(format!(
            "cannot compose: {} ends at object {} but the next factor starts at {}",
            "the right factor",
            n.target + 1,
            m.source + 1
        )));
    }
    let (i, j, k) = (n.source, n.target, m.target);
    let f = bc.field;
    let lay = layout(bc, m, n);
    let hc_ik = bc.homcat(i, k);
    let mut alpha = HomMatrix::zero(&hc_ik.cat, &lay.gens, &lay.gens);
    let (nm, nn) = (m.object.len(), n.object.len());
    let hc_jk = bc.homcat(j, k);
    let hc_ij = bc.homcat(i, j);
    for a in 0..nm {
        for b in 0..nn {
            let (ma, nb) = (m.basic(bc, a), n.basic(bc, b));
            let e = &lay.exps[a][b];
            let o = lay.offsets[a][b];
            place(&mut alpha, o, o, bc.intrinsic_twist(i, j, k, ma, nb, e), f);
            // α_M ∘₀ id
            for a2 in 0..nm {
                let g = m.object.alpha.get(a, a2);
                if is_zero_vec(g) {
                    continue;
                }
                let id_n = hc_ij.cat.identity(n.object.gens[b].0).to_vec();
                let block = bc.hcompose_basic2(i, j, k, (m.basic(bc, a2), ma, g), (nb, nb, &id_n), &lay.exps[a2][b], e);
                place(&mut alpha, o, lay.offsets[a2][b], block, f);
            }
            // id ∘₀ α_N
            for b2 in 0..nn {
                let t = n.object.alpha.get(b, b2);
                if is_zero_vec(t) {
                    continue;
                }
                let id_m = hc_jk.cat.identity(m.object.gens[a].0).to_vec();
                let block = bc.hcompose_basic2(i, j, k, (ma, ma, &id_m), (n.basic(bc, b2), nb, t), &lay.exps[a][b2], e);
                place(&mut alpha, o, lay.offsets[a][b2], block, f);
            }
        }
    }
    let order = summand_order(&lay.keys, &alpha);
    let object = TwistedObject { gens: order.iter().map(|&r| lay.gens[r]).collect(), alpha: alpha.reindexed(&order, &order) };
    let keys = order.iter().map(|&r| lay.keys[r].clone()).collect();
    Ok((OneMorphism { source: i, target: k, object, keys }, order))
}

/// Horizontal composite `γ ∘₀ τ` of 2-morphisms `γ: M1 → M2`, `τ: N1 → N2`.
pub fn hcompose2(
    bc: &Bicategory,
    gamma: (&OneMorphism, &OneMorphism, &TwistedMorphism),
    tau: (&OneMorphism, &OneMorphism, &TwistedMorphism),
) -> Result<TwistedMorphism, BicatError> {
    let (m1, m2, g) = gamma;
    let (n1, n2, t) = tau;
    if m1.source != n1.target || m2.source != n2.target {
        return Err(BicatError::ObjectMismatch("horizontal composition of non-composable 2-morphisms".into()));
    }
    let (i, j, k) = (n1.source, n1.target, m1.target);
    let f = bc.field;
    let (src, src_order) = hcompose_ordered(bc, m1, n1)?;
    let (tgt, tgt_order) = hcompose_ordered(bc, m2, n2)?;
    let l1 = layout(bc, m1, n1);
    let l2 = layout(bc, m2, n2);
    let hc_ik = bc.homcat(i, k);
    let mut entries = HomMatrix::zero(&hc_ik.cat, &l2.gens, &l1.gens);
    for a2 in 0..m2.object.len() {
        for a1 in 0..m1.object.len() {
            let ge = g.entries.get(a2, a1);
            if is_zero_vec(ge) {
                continue;
            }
            for b2 in 0..n2.object.len() {
                for b1 in 0..n1.object.len() {
                    let te = t.entries.get(b2, b1);
                    if is_zero_vec(te) {
                        continue;
                    }
                    let block = bc.hcompose_basic2(
                        i,
                        j,
                        k,
                        (m1.basic(bc, a1), m2.basic(bc, a2), ge),
                        (n1.basic(bc, b1), n2.basic(bc, b2), te),
                        &l1.exps[a1][b1],
                        &l2.exps[a2][b2],
                    );
                    place(&mut entries, l2.offsets[a2][b2], l1.offsets[a1][b1], block, f);
                }
            }
        }
    }
    let entries = entries.reindexed(&tgt_order, &src_order);
    Ok(TwistedMorphism { source: src.object, target: tgt.object, degree: g.degree + t.degree, entries })
}

/// All matrix 2-morphisms `M → N` with the conjugated differential.
pub fn two_hom(bc: &Bicategory, m: &OneMorphism, n: &OneMorphism) -> Result<crate::homotopy::HomComplex, BicatError> {
    if (m.source, m.target) != (n.source, n.target) {
        return Err(BicatError::ObjectMismatch(format!(
            "2-morphisms need equal endpoints: {} -> {} versus {} -> {}",
            m.source + 1,
            m.target + 1,
            n.source + 1,
            n.target + 1
        )));
    }
    Ok(crate::homotopy::HomComplex::new(m.category(bc), &m.object, &n.object))
}

/// One k-indecomposable 1-morphism up to shift and isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Indecomposable {
    pub source: usize,
    pub target: usize,
    pub basic: Basic,
    pub label: String,
    /// other basic 1-morphisms isomorphic to this one
    pub aliases: Vec<String>,
}

/// Cells with their preorders; `geq_l[g][f]` means `G ≥_L F`.
#[derive(Clone, Debug)]
pub struct CellStructure {
    pub labels: Vec<String>,
    pub geq_l: Vec<Vec<bool>>,
    pub geq_r: Vec<Vec<bool>>,
    pub geq_j: Vec<Vec<bool>>,
    pub left_cells: Vec<Vec<usize>>,
    pub right_cells: Vec<Vec<usize>>,
    pub two_sided_cells: Vec<Vec<usize>>,
}

fn transitive_closure(mut r: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    let n = r.len();
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

fn classes_of(r: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = r.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for a in 0..n {
        if seen[a] {
            continue;
        }
        let cls: Vec<usize> = (0..n).filter(|&b| r[a][b] && r[b][a]).collect();
        for &b in &cls {
            seen[b] = true;
        }
        out.push(cls);
    }
    out
}

impl CellStructure {
    /// Closes the given relations and derives the cells.
    pub fn from_preorders(labels: Vec<String>, geq_l: Vec<Vec<bool>>, geq_r: Vec<Vec<bool>>) -> Self {
        let geq_l = transitive_closure(geq_l);
        let geq_r = transitive_closure(geq_r);
        let n = labels.len();
        let both: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| geq_l[a][b] || geq_r[a][b]).collect()).collect();
        let geq_j = transitive_closure(both);
        let left_cells = classes_of(&geq_l);
        let right_cells = classes_of(&geq_r);
        let two_sided_cells = classes_of(&geq_j);
        CellStructure { labels, geq_l, geq_r, geq_j, left_cells, right_cells, two_sided_cells }
    }

    pub fn left_cell_of(&self, a: usize) -> &[usize] {
        self.left_cells.iter().find(|c| c.contains(&a)).unwrap()
    }

    pub fn two_sided_cell_of(&self, a: usize) -> &[usize] {
        self.two_sided_cells.iter().find(|c| c.contains(&a)).unwrap()
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Whether `J ≥_J J'` for the two-sided cells containing `a` and `b`.
    pub fn j_geq(&self, a: usize, b: usize) -> bool {
        self.geq_j[a][b]
    }
}

/// Within each two-sided cell: left cells pairwise incomparable, right
/// cells pairwise incomparable, and every `L ∩ R` a single element.
pub fn strong_regularity(cs: &CellStructure) -> bool {
    for j in &cs.two_sided_cells {
        let lefts: Vec<&Vec<usize>> = cs.left_cells.iter().filter(|c| j.contains(&c[0])).collect();
        let rights: Vec<&Vec<usize>> = cs.right_cells.iter().filter(|c| j.contains(&c[0])).collect();
        for (x, l1) in lefts.iter().enumerate() {
            for l2 in lefts.iter().skip(x + 1) {
                if cs.geq_l[l1[0]][l2[0]] || cs.geq_l[l2[0]][l1[0]] {
                    return false;
                }
            }
        }
        for (x, r1) in rights.iter().enumerate() {
            for r2 in rights.iter().skip(x + 1) {
                if cs.geq_r[r1[0]][r2[0]] || cs.geq_r[r2[0]][r1[0]] {
                    return false;
                }
            }
        }
        for l in &lefts {
            for r in &rights {
                if l.iter().filter(|a| r.contains(a)).count() != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// k-indecomposable 1-morphisms up to isomorphism. Identities are included
/// when `with_identities`; a non-local `Z(A_i)` is then an error.
pub fn indecomposables(bc: &Bicategory, with_identities: bool) -> Result<Vec<Indecomposable>, BicatError> {
    let n = bc.num_objects();
    let classes: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let parts = iso_classes(bc.algebra(i))?;
            let mut rep = vec![0; bc.algebra(i).num_idempotents()];
            for p in parts {
                for &e in &p {
                    rep[e] = p[0];
                }
            }
            Ok(rep)
        })
        .collect::<Result<_, AlgebraError>>()?;
    let mut out: Vec<Indecomposable> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for s in 0..bc.algebra(j).num_idempotents() {
                for t in 0..bc.algebra(i).num_idempotents() {
                    let b = Basic::P { s, t };
                    let label = bc.basic_label(i, j, b);
                    if classes[j][s] == s && classes[i][t] == t {
                        out.push(Indecomposable { source: i, target: j, basic: b, label, aliases: Vec::new() });
                    } else {
                        let rep = bc.basic_label(i, j, Basic::P { s: classes[j][s], t: classes[i][t] });
                        out.iter_mut().find(|x| x.label == rep).unwrap().aliases.push(label);
                    }
                }
            }
        }
    }
    if with_identities {
        for i in 0..n {
            let hc = bc.homcat(i, i);
            if !hc.cat.is_local(0) {
                return Err(BicatError::NonLocalIdentity(i + 1));
            }
            let label = bc.basic_label(i, i, Basic::Id);
            let iso = (1..hc.objects.len()).find(|&o| hc.cat.find_iso(0, o, crate::pdgalg::ISO_SEARCH_BOUND).is_some());
            match iso {
                Some(o) => {
                    let Basic::P { s, t } = hc.objects[o] else { unreachable!() };
                    let rep = bc.basic_label(i, i, Basic::P { s: classes[i][s], t: classes[i][t] });
                    out.iter_mut().find(|x| x.label == rep).unwrap().aliases.push(label);
                }
                None => out.push(Indecomposable { source: i, target: i, basic: Basic::Id, label, aliases: Vec::new() }),
            }
        }
    }
    Ok(out)
}

/// Cells of `C_A` via the closed-form composition multiplicities.
pub fn compute_cells(bc: &Bicategory, with_identities: bool) -> Result<(Vec<Indecomposable>, CellStructure), BicatError> {
    let inds = indecomposables(bc, with_identities)?;
    let n = inds.len();
    // representative index of a basic 1-morphism
    let class_of = |i: usize, j: usize, b: Basic| -> Option<usize> {
        let l = bc.basic_label(i, j, b);
        inds.iter().position(|x| x.label == l || x.aliases.contains(&l))
    };
    let mut geq_l = vec![vec![false; n]; n];
    let mut geq_r = vec![vec![false; n]; n];
    for (fi, f) in inds.iter().enumerate() {
        for h in &inds {
            // H ∘ F
            if h.source == f.target {
                for (b, _) in bc.expansion(f.source, f.target, h.target, h.basic, f.basic).summands {
                    if let Some(g) = class_of(f.source, h.target, b) {
                        geq_l[g][fi] = true;
                    }
                }
            }
            // F ∘ H
            if f.source == h.target {
                for (b, _) in bc.expansion(h.source, h.target, f.target, f.basic, h.basic).summands {
                    if let Some(g) = class_of(h.source, f.target, b) {
                        geq_r[g][fi] = true;
                    }
                }
            }
        }
    }
    let labels = inds.iter().map(|x| x.label.clone()).collect();
    Ok((inds, CellStructure::from_preorders(labels, geq_l, geq_r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{self, KxDiff};
    use crate::pdgalg::validate_algebra;
    use crate::twisted::validate_twisted;

    fn kbc(diff: KxDiff) -> Bicategory {
        Bicategory::new(vec![validate_algebra(&builtin::kx_raw(3, 3, diff)).unwrap()]).unwrap()
    }

    #[test]
    fn hom_dimensions_over_k() {
        let bc = kbc(KxDiff::Square);
        let hc = bc.homcat(0, 0);
        assert_eq!(hc.objects, vec![Basic::Id, Basic::P { s: 0, t: 0 }]);
        assert_eq!(hc.cat.hom_dim(0, 0), 3);
        assert_eq!(hc.cat.hom_dim(0, 1), 3);
        assert_eq!(hc.cat.hom_dim(1, 1), 9);
        // central elements of K ⊗ K: the annihilator of x⊗1 - 1⊗x
        assert_eq!(hc.cat.hom_dim(1, 0), 3);
    }

    #[test]
    fn ff_expansion() {
        let bc = kbc(KxDiff::Square);
        let f = OneMorphism::proj(&bc, 1, 1).unwrap();
        let ff = hcompose(&bc, &f, &f).unwrap();
        let shifts: Vec<i64> = ff.object.gens.iter().map(|g| g.1).collect();
        assert_eq!(shifts, vec![-4, -2, 0]);
        let hc = bc.homcat(0, 0);
        assert!(validate_twisted(&hc.cat, &ff.object).is_ok());
        // ∂x = x² gives a single twist entry from the x-summand to the x²-summand
        assert_eq!(ff.object.alpha.get(0, 1), hc.cat.identity(1));
        assert!(is_zero_vec(ff.object.alpha.get(1, 2)));
    }

    #[test]
    fn unit_diff_square() {
        let a = validate_algebra(&builtin::kx_unit_diff_raw(3)).unwrap();
        let bc = Bicategory::new(vec![a]).unwrap();
        let f = OneMorphism::proj(&bc, 1, 1).unwrap();
        let ff = hcompose(&bc, &f, &f).unwrap();
        let shifts: Vec<i64> = ff.object.gens.iter().map(|g| g.1).collect();
        assert_eq!(shifts, vec![0, 2, 4]);
        let hc = bc.homcat(0, 0);
        let id = hc.cat.identity(1).to_vec();
        assert_eq!(ff.object.alpha.get(0, 1), id.as_slice());
        assert_eq!(ff.object.alpha.get(1, 2), crate::gflin::vec_scale(bc.field(), 2, &id).as_slice());
    }

    #[test]
    fn identity_is_unit_for_composition() {
        let bc = kbc(KxDiff::Square);
        let id = OneMorphism::identity(&bc, 0).unwrap();
        let f = OneMorphism::proj(&bc, 1, 1).unwrap().shift(2);
        assert_eq!(hcompose(&bc, &id, &f).unwrap(), f);
        assert_eq!(hcompose(&bc, &f, &id).unwrap(), f);
        assert_eq!(hcompose(&bc, &id, &id).unwrap(), id);
    }

    #[test]
    fn cells_of_k() {
        let bc = kbc(KxDiff::Square);
        let (inds, cs) = compute_cells(&bc, true).unwrap();
        assert_eq!(inds.len(), 2);
        assert_eq!(cs.two_sided_cells.len(), 2);
        let f = cs.find("P(1,1)").unwrap();
        let id = cs.find("Id(1)").unwrap();
        assert!(cs.j_geq(f, id));
        assert!(!cs.j_geq(id, f));
        assert!(strong_regularity(&cs));
    }

    #[test]
    fn semisimple_identity_is_projective() {
        let bc = Bicategory::new(vec![validate_algebra(&builtin::semisimple_raw(3, 1)).unwrap()]).unwrap();
        let (inds, cs) = compute_cells(&bc, true).unwrap();
        assert_eq!(inds.len(), 1);
        assert_eq!(inds[0].aliases, vec!["Id(1)".to_string()]);
        assert_eq!(cs.two_sided_cells.len(), 1);
    }

    #[test]
    fn two_idempotent_grid() {
        let bc = Bicategory::new(vec![validate_algebra(&builtin::semisimple_raw(3, 2)).unwrap()]).unwrap();
        assert_eq!(compute_cells(&bc, true).unwrap_err(), BicatError::NonLocalIdentity(1));
        let (inds, cs) = compute_cells(&bc, false).unwrap();
        assert_eq!(inds.len(), 4);
        assert_eq!(cs.left_cells.len(), 2);
        assert_eq!(cs.right_cells.len(), 2);
        assert_eq!(cs.two_sided_cells.len(), 1);
        assert!(strong_regularity(&cs));
        let l = cs.left_cell_of(cs.find("P(1,2)").unwrap());
        let mut members: Vec<&str> = l.iter().map(|&a| cs.labels[a].as_str()).collect();
        members.sort();
        assert_eq!(members, vec!["P(1,2)", "P(2,2)"]);
    }

    #[test]
    fn artificial_preorder_not_strongly_regular() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let all = vec![vec![true, true], vec![true, true]];
        let cs = CellStructure::from_preorders(labels, all.clone(), all);
        assert!(!strong_regularity(&cs));
    }

    fn end_basis(bc: &Bicategory, m: &OneMorphism) -> Vec<TwistedMorphism> {
        let hc = two_hom(bc, m, m).unwrap();
        (0..hc.dim()).map(|b| hc.basis_morphism(b)).collect()
    }

    #[test]
    fn interchange_law() {
        let bc = kbc(KxDiff::Square);
        let f = OneMorphism::proj(&bc, 1, 1).unwrap();
        let cat = f.category(&bc);
        let ends = end_basis(&bc, &f);
        let ff = hcompose(&bc, &f, &f).unwrap();
        let ffcat = ff.category(&bc);
        for (g1, g2) in [(0, 4), (1, 3), (2, 7), (5, 8)] {
            for (t1, t2) in [(0, 1), (3, 6), (8, 2)] {
                let (a1, a2, b1, b2) = (&ends[g1], &ends[g2], &ends[t1], &ends[t2]);
                let lhs = hcompose2(&bc, (&f, &f, a2), (&f, &f, b2))
                    .unwrap()
                    .compose(ffcat, &hcompose2(&bc, (&f, &f, a1), (&f, &f, b1)).unwrap());
                let rhs = hcompose2(&bc, (&f, &f, &a2.compose(cat, a1)), (&f, &f, &b2.compose(cat, b1))).unwrap();
                assert_eq!(lhs.entries, rhs.entries, "gamma {g1},{g2} tau {t1},{t2}");
            }
        }
    }

    #[test]
    fn leibniz_through_twisted_composite() {
        let bc = kbc(KxDiff::Square);
        let f = OneMorphism::proj(&bc, 1, 1).unwrap();
        let ff = hcompose(&bc, &f, &f).unwrap();
        let fcat = f.category(&bc);
        let ends = end_basis(&bc, &f);
        let endff = end_basis(&bc, &ff);
        for g in [0usize, 1, 4, 7] {
            for t in [2usize, 3, 5, 11, 20] {
                let (gm, tm) = (&ends[g], &endff[t]);
                let lhs = crate::twisted::morphism_diff(fcat, &hcompose2(&bc, (&f, &f, gm), (&ff, &ff, tm)).unwrap());
                let a = hcompose2(&bc, (&f, &f, &crate::twisted::morphism_diff(fcat, gm)), (&ff, &ff, tm)).unwrap();
                let b = hcompose2(&bc, (&f, &f, gm), (&ff, &ff, &crate::twisted::morphism_diff(fcat, tm))).unwrap();
                assert_eq!(lhs.entries, a.add(fcat, &b).entries);
            }
        }
    }

    #[test]
    fn triple_composite_is_associative_up_to_iso() {
        let bc = kbc(KxDiff::Square);
        let f = OneMorphism::proj(&bc, 1, 1).unwrap();
        let ff = hcompose(&bc, &f, &f).unwrap();
        let a = hcompose(&bc, &ff, &f).unwrap();
        let b = hcompose(&bc, &f, &ff).unwrap();
        let cat = f.category(&bc);
        assert!(validate_twisted(cat, &a.object).is_ok());
        assert!(validate_twisted(cat, &b.object).is_ok());
        assert!(crate::twisted::pdg_iso(cat, &a.object, &b.object, 7, 64).is_certificate());
    }
}
