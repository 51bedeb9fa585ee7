//! Hom complexes between twisted objects, null-homotopy, stable hom spaces,
//! cones and the shift Σ.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::category::PdgCategory;
use crate::gflin::{is_zero_vec, subspace_quotient, Echelon, GradedSpace, LinearMap, Mat, Scalar};
use crate::twisted::{morphism_diff, HomMatrix, TwistedMorphism, TwistedObject};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomotopyError {
    #[error("morphism is not a Z-morphism: its differential is nonzero")]
    NotClosed,
    #[error("morphism has degree {0}, expected 0")]
    NonzeroDegree(i64),
}

/// All matrix entries `X → Y` as one graded space, with the conjugated
/// differential as a degree-2 linear map.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub source: TwistedObject,
    pub target: TwistedObject,
    pub space: GradedSpace,
    pub diff: LinearMap,
    /// `(target generator, source generator, hom basis index)` per coordinate
    slots: Vec<(usize, usize, usize)>,
}

impl HomComplex {
    pub fn new(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject) -> Self {
        let mut hc = Self::layout(cat, x, y);
        let f = cat.field();
        let n_dim = hc.dim();
        // start of the run of slots for entry (n, m)
        let mut start = vec![0; y.len() * x.len()];
        for (pos, &(n, m, i)) in hc.slots.iter().enumerate() {
            if i == 0 {
                start[n * x.len() + m] = pos;
            }
        }
        let mut cols = Vec::with_capacity(n_dim);
        for &(n, m, i) in &hc.slots {
            // ∂γ + βγ − γα for γ the basis element i in entry (n, m)
            let (on, om) = (y.gens[n].0, x.gens[m].0);
            let mut unit = cat.zero(on, om);
            unit[i] = 1;
            let mut col = vec![0; n_dim];
            let s0 = start[n * x.len() + m];
            for (k, c) in cat.diff(on, om, &unit).into_iter().enumerate() {
                col[s0 + k] = f.add(col[s0 + k], c);
            }
            for n2 in 0..y.len() {
                let b = y.alpha.get(n2, n);
                if is_zero_vec(b) {
                    continue;
                }
                let v = cat.compose(y.gens[n2].0, on, om, b, &unit);
                let s0 = start[n2 * x.len() + m];
                for (k, c) in v.into_iter().enumerate() {
                    col[s0 + k] = f.add(col[s0 + k], c);
                }
            }
            for m2 in 0..x.len() {
                let a = x.alpha.get(m, m2);
                if is_zero_vec(a) {
                    continue;
                }
                let v = cat.compose(on, om, x.gens[m2].0, &unit, a);
                let s0 = start[n * x.len() + m2];
                for (k, c) in v.into_iter().enumerate() {
                    col[s0 + k] = f.sub(col[s0 + k], c);
                }
            }
            cols.push(col);
        }
        let matrix = Mat::from_columns(f, n_dim, &cols);
        hc.diff = LinearMap::new(hc.space.clone(), hc.space.clone(), matrix, 2).expect("conjugated differential has degree 2");
        hc
    }

    /// Slots and degrees only; the differential is left empty.
    pub fn layout(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject) -> Self {
        let mut slots = Vec::new();
        let mut basis = Vec::new();
        for (n, &(on, sn)) in y.gens.iter().enumerate() {
            for (m, &(om, sm)) in x.gens.iter().enumerate() {
                let h = cat.hom(on, om);
                for i in 0..h.dim() {
                    slots.push((n, m, i));
                    basis.push((format!("[{},{}]{}", n + 1, m + 1, h.labels[i]), h.degrees[i] + sm - sn));
                }
            }
        }
        let space = GradedSpace { basis };
        HomComplex {
            source: x.clone(),
            target: y.clone(),
            space: space.clone(),
            diff: LinearMap { source: space.clone(), target: space, matrix: Mat::zeros(cat.field(), 0, 0), degree: 2 },
            slots,
        }
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn degree(&self, b: usize) -> i64 {
        self.space.degree(b)
    }

    /// Degrees in which the complex is nonzero, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        let s: BTreeSet<i64> = self.space.degrees().into_iter().collect();
        s.into_iter().collect()
    }

    pub fn degree_indices(&self, d: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&b| self.degree(b) == d).collect()
    }

    /// Flattened coordinates of a morphism `X → Y`.
    pub fn coords(&self, g: &TwistedMorphism) -> Vec<Scalar> {
        self.slots
            .iter()
            .map(|&(n, m, i)| g.entries.get(n, m)[i])
            .collect()
    }

    /// The morphism with the given coordinates; `degree` is recorded as is.
    pub fn morphism(&self, v: &[Scalar], degree: i64) -> TwistedMorphism {
        let mut entries = HomMatrix {
            rows: self.target.len(),
            cols: self.source.len(),
            entries: Vec::with_capacity(self.target.len() * self.source.len()),
        };
        // entry sizes follow the slot layout: consecutive runs per (n, m)
        let mut pos = 0;
        for n in 0..self.target.len() {
            for m in 0..self.source.len() {
                let start = pos;
                while pos < self.slots.len() && self.slots[pos].0 == n && self.slots[pos].1 == m {
                    pos += 1;
                }
                entries.entries.push(v[start..pos].to_vec());
            }
        }
        TwistedMorphism { source: self.source.clone(), target: self.target.clone(), degree, entries }
    }

    pub fn basis_morphism(&self, b: usize) -> TwistedMorphism {
        let mut v = vec![0; self.dim()];
        v[b] = 1;
        self.morphism(&v, self.degree(b))
    }

    pub fn diff_pow(&self, k: usize) -> Mat {
        self.diff.matrix.pow(k)
    }

    /// Basis (in full coordinates) of the ∂-closed morphisms of degree `d`.
    pub fn cycles(&self, d: i64) -> Vec<Vec<Scalar>> {
        let idx = self.degree_indices(d);
        if idx.is_empty() {
            return Vec::new();
        }
        let sub = self.diff.matrix.select_columns(&idx);
        sub.kernel()
            .into_iter()
            .map(|k| {
                let mut v = vec![0; self.dim()];
                for (c, &b) in k.iter().zip(&idx) {
                    v[b] = *c;
                }
                v
            })
            .collect()
    }

    /// Spanning set of `∂^{p-1}` applied to degree `d - 2(p-1)`.
    pub fn boundaries(&self, d: i64, p: usize) -> Vec<Vec<Scalar>> {
        let idx = self.degree_indices(d - 2 * (p as i64 - 1));
        if idx.is_empty() {
            return Vec::new();
        }
        let dp = self.diff_pow(p - 1);
        let mut ech = Echelon::new(dp.field(), self.dim());
        for &b in &idx {
            ech.insert(&dp.column(b));
        }
        ech.basis()
    }
}

/// Stable hom space in one degree: cycles modulo `∂^{p-1}`-boundaries.
#[derive(Clone, Debug)]
pub struct StableHom {
    pub degree: i64,
    pub cycle_basis: Vec<Vec<Scalar>>,
    pub boundary_basis: Vec<Vec<Scalar>>,
    pub representatives: Vec<Vec<Scalar>>,
}

impl StableHom {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }
}

pub fn stable_hom_in(cat: &PdgCategory, hc: &HomComplex, d: i64) -> StableHom {
    let cycles = hc.cycles(d);
    let boundaries = hc.boundaries(d, cat.p() as usize);
    let (_, reps) = subspace_quotient(cat.field(), hc.dim(), &boundaries, &cycles);
    StableHom { degree: d, cycle_basis: cycles, boundary_basis: boundaries, representatives: reps }
}

pub fn stable_hom(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject, d: i64) -> StableHom {
    stable_hom_in(cat, &HomComplex::new(cat, x, y), d)
}

/// Stable homs in every degree where the hom complex is nonzero; only
/// nonzero pieces are kept.
pub fn stable_hom_all(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject) -> Vec<StableHom> {
    let hc = HomComplex::new(cat, x, y);
    hc.degrees()
        .into_iter()
        .map(|d| stable_hom_in(cat, &hc, d))
        .filter(|s| s.dim() > 0)
        .collect()
}

pub fn is_closed(cat: &PdgCategory, f: &TwistedMorphism) -> bool {
    morphism_diff(cat, f).is_zero()
}

/// Solves `∂^{p-1} g = f`; returns a witness `g` of degree `deg f + 2 - 2p`
/// when `f` is null-homotopic.
pub fn is_null_homotopic(cat: &PdgCategory, f: &TwistedMorphism) -> Result<Option<TwistedMorphism>, HomotopyError> {
    if !is_closed(cat, f) {
        return Err(HomotopyError::NotClosed);
    }
    let p = cat.p() as usize;
    let hc = HomComplex::new(cat, &f.source, &f.target);
    let gd = f.degree - 2 * (p as i64 - 1);
    let idx = hc.degree_indices(gd);
    let target = hc.coords(f);
    if idx.is_empty() {
        return Ok(is_zero_vec(&target).then(|| hc.morphism(&vec![0; hc.dim()], gd)));
    }
    let m = hc.diff_pow(p - 1).select_columns(&idx);
    Ok(m.solve(&target).expect("shapes agree").map(|sol| {
        let mut v = vec![0; hc.dim()];
        for (c, &b) in sol.iter().zip(&idx) {
            v[b] = *c;
        }
        hc.morphism(&v, gd)
    }))
}

/// `X ⊗ V_i⟨s⟩` with generators ordered block by block (`j` outer).
pub fn tensor_indecomposable_blocked(cat: &PdgCategory, x: &TwistedObject, i: usize, s: i64) -> TwistedObject {
    let n = x.len();
    let mut gens = Vec::with_capacity(n * (i + 1));
    for j in 0..=i {
        for &(o, sh) in &x.gens {
            gens.push((o, sh + s - 2 * (i as i64 - j as i64)));
        }
    }
    let mut alpha = HomMatrix::zero(cat, &gens, &gens);
    for j in 0..=i {
        for k in 0..n {
            for l in 0..n {
                alpha.set(j * n + k, j * n + l, x.alpha.get(k, l).to_vec());
            }
            if j < i {
                alpha.set(j * n + k, (j + 1) * n + k, cat.identity(x.gens[k].0).to_vec());
            }
        }
    }
    TwistedObject { gens, alpha }
}

/// `X ⊗ H⟨2p-2⟩` in block order: `X, X⟨2⟩, …, X⟨2p-2⟩`.
pub fn tensor_free(cat: &PdgCategory, x: &TwistedObject) -> TwistedObject {
    let p = cat.p() as usize;
    tensor_indecomposable_blocked(cat, x, p - 1, 2 * p as i64 - 2)
}

/// `id ⊗ ∂^{p-1}`: X into the first block of `X ⊗ H⟨2p-2⟩`.
pub fn free_inclusion(cat: &PdgCategory, x: &TwistedObject) -> TwistedMorphism {
    let xh = tensor_free(cat, x);
    let mut m = TwistedMorphism::zero(cat, x, &xh, 0);
    for (k, &(o, _)) in x.gens.iter().enumerate() {
        m.entries.set(k, k, cat.identity(o).to_vec());
    }
    m
}

/// ΣX = X ⊗ V_{p-2}⟨2p-2⟩, generators in the order of `tensor_h`.
pub fn sigma(cat: &PdgCategory, x: &TwistedObject) -> TwistedObject {
    let p = cat.p() as usize;
    crate::twisted::tensor_indecomposable(cat, x, p - 2, 2 * p as i64 - 2)
}

/// ΣX with generators in block order, as it appears inside the cone.
pub fn sigma_blocked(cat: &PdgCategory, x: &TwistedObject) -> TwistedObject {
    let p = cat.p() as usize;
    tensor_indecomposable_blocked(cat, x, p - 2, 2 * p as i64 - 2)
}

/// Solves for `h` of the given degree in `hc` subject to linear conditions
/// `conds(h) = rhs`; returns one solution and the dimension of the solution
/// space's ambiguity.
pub fn solve_in(
    cat: &PdgCategory,
    hc: &HomComplex,
    degree: i64,
    conds: impl Fn(&TwistedMorphism) -> Vec<Scalar>,
    rhs: &[Scalar],
) -> Option<(TwistedMorphism, usize)> {
    let idx = hc.degree_indices(degree);
    let cols: Vec<Vec<Scalar>> = idx.iter().map(|&b| conds(&hc.basis_morphism(b))).collect();
    let m = Mat::from_columns(cat.field(), rhs.len(), &cols);
    let sol = m.solve(rhs).expect("shapes agree")?;
    let mut v = vec![0; hc.dim()];
    for (c, &b) in sol.iter().zip(&idx) {
        v[b] = *c;
    }
    Some((hc.morphism(&v, degree), idx.len() - m.rank()))
}

/// Finds a Z-morphism `h: X⊗H⟨2p-2⟩ → Y` with `h ∘ ι = f`.
pub fn factor_through_free(cat: &PdgCategory, f: &TwistedMorphism) -> Option<TwistedMorphism> {
    let iota = free_inclusion(cat, &f.source);
    let hc = HomComplex::new(cat, &iota.target, &f.target);
    let target_hc = HomComplex::new(cat, &f.source, &f.target);
    let mut rhs = target_hc.coords(f);
    rhs.extend(vec![0; hc.dim()]);
    let cond = |h: &TwistedMorphism| {
        let mut v = target_hc.coords(&h.compose(cat, &iota));
        v.extend(hc.coords(&morphism_diff(cat, h)));
        v
    };
    solve_in(cat, &hc, f.degree, cond, &rhs).map(|(h, _)| h)
}

/// The cone of a Z-morphism `f: X → Y` with its structure maps.
#[derive(Clone, Debug)]
pub struct Cone {
    /// `Y ⊕ X⟨2⟩ ⊕ … ⊕ X⟨2p-2⟩`
    pub object: TwistedObject,
    /// `Y → C_f`
    pub v: TwistedMorphism,
    /// `C_f → ΣX`
    pub r: TwistedMorphism,
    /// `X⊗H⟨2p-2⟩ → C_f`
    pub u: TwistedMorphism,
    /// `X⊗H⟨2p-2⟩ → ΣX`
    pub q: TwistedMorphism,
    /// `X → X⊗H⟨2p-2⟩`
    pub iota: TwistedMorphism,
}

pub fn cone(cat: &PdgCategory, f: &TwistedMorphism) -> Result<Cone, HomotopyError> {
    if f.degree != 0 {
        return Err(HomotopyError::NonzeroDegree(f.degree));
    }
    if !is_closed(cat, f) {
        return Err(HomotopyError::NotClosed);
    }
    let (x, y) = (&f.source, &f.target);
    let (nx, ny) = (x.len(), y.len());
    let p = cat.p() as usize;
    let xh = tensor_free(cat, x);
    let sx = sigma_blocked(cat, x);

    let mut gens = y.gens.clone();
    gens.extend_from_slice(&sx.gens);
    let mut alpha = HomMatrix::zero(cat, &gens, &gens);
    for k in 0..ny {
        for l in 0..ny {
            alpha.set(k, l, y.alpha.get(k, l).to_vec());
        }
        for l in 0..nx {
            alpha.set(k, ny + l, f.entries.get(k, l).to_vec());
        }
    }
    for k in 0..sx.len() {
        for l in 0..sx.len() {
            alpha.set(ny + k, ny + l, sx.alpha.get(k, l).to_vec());
        }
    }
    let object = TwistedObject { gens, alpha };

    let mut v = TwistedMorphism::zero(cat, y, &object, 0);
    for (k, &(o, _)) in y.gens.iter().enumerate() {
        v.entries.set(k, k, cat.identity(o).to_vec());
    }
    let mut r = TwistedMorphism::zero(cat, &object, &sx, 0);
    let mut q = TwistedMorphism::zero(cat, &xh, &sx, 0);
    for (k, &(o, _)) in sx.gens.iter().enumerate() {
        r.entries.set(k, ny + k, cat.identity(o).to_vec());
        q.entries.set(k, nx + k, cat.identity(o).to_vec());
    }
    let mut u = TwistedMorphism::zero(cat, &xh, &object, 0);
    for k in 0..ny {
        for l in 0..nx {
            u.entries.set(k, l, f.entries.get(k, l).to_vec());
        }
    }
    for k in 0..nx * (p - 1) {
        u.entries.set(ny + k, nx + k, cat.identity(xh.gens[nx + k].0).to_vec());
    }
    let iota = free_inclusion(cat, x);
    Ok(Cone { object, v, r, u, q, iota })
}

/// Solves `ρ u = γ`, `ρ v = τ` for a degree-0 `ρ: C_f → Z`; returns one
/// solution and the dimension of the solution set's ambiguity.
pub fn cone_mediator(
    cat: &PdgCategory,
    c: &Cone,
    gamma: &TwistedMorphism,
    tau: &TwistedMorphism,
) -> Option<(TwistedMorphism, usize)> {
    let z = &gamma.target;
    let hc = HomComplex::new(cat, &c.object, z);
    let hu = HomComplex::new(cat, &c.u.source, z);
    let hv = HomComplex::new(cat, &c.v.source, z);
    let mut rhs = hu.coords(gamma);
    rhs.extend(hv.coords(tau));
    let cond = |rho: &TwistedMorphism| {
        let mut w = hu.coords(&rho.compose(cat, &c.u));
        w.extend(hv.coords(&rho.compose(cat, &c.v)));
        w
    };
    solve_in(cat, &hc, 0, cond, &rhs)
}
