//! Cell 2-representations of `C_A`, the natural representation, and
//! stable 2-hom spaces.
//!
//! For the left cell `L = {P(·,t)}` the 2-representation `R_L` is realized on
//! the generators `P(a,t)`, one per idempotent `a` of each algebra, and the
//! maximal ideal is `J = rad(e_t A_i e_t) ⊗ A_j` entrywise.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bicat::{hcompose2, two_hom, Basic, Bicategory, BicatError, OneMorphism};
use crate::category::PdgCategory;
use crate::gflin::{axpy, graded_dim, is_zero_vec, Coordinates, Echelon, Scalar};
use crate::homotopy::{stable_hom_all, HomComplex, StableHom};
use crate::pdgalg::{coordinates_of, format_combination, local_radical, radical, PdgAlgebra};
use crate::twisted::{HomMatrix, TwistedMorphism, TwistedObject};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CellRepError {
    #[error(transparent)]
    Bicat(#[from] BicatError),
    #[error("e{0}Ae{0} is not split local, so its radical is unavailable")]
    NotLocal(usize),
    #[error("the radical of e{0}Ae{0} is not ∂-stable")]
    RadicalNotStable(usize),
    #[error("{0}")]
    Algebra(String),
}

// ---------------------------------------------------------------------------
// natural representation

/// Generators of `X ⊗ M` for one generator `e_u` of `X` and one basic `M`.
struct ModuleExpansion {
    gens: Vec<(usize, i64)>,
    /// the generator as an element of `M` (ambient of the basic object)
    values: Vec<Vec<Scalar>>,
    coords: Option<Coordinates>,
}

fn module_expansion(bc: &Bicategory, i: usize, j: usize, b: Basic, u: usize) -> ModuleExpansion {
    let ai = bc.algebra(i);
    match b {
        Basic::Id => ModuleExpansion { gens: vec![(u, 0)], values: vec![ai.idempotent(u).to_vec()], coords: None },
        Basic::P { s, t } => {
            let mut piece = ai.piece(u, t);
            piece.sort_by_key(|(_, d)| std::cmp::Reverse(*d));
            let es = bc.algebra(j).idempotent(s).to_vec();
            ModuleExpansion {
                gens: piece.iter().map(|(_, d)| (s, -d)).collect(),
                values: piece.iter().map(|(v, _)| bc.kron(i, j, v, &es)).collect(),
                coords: Some(coordinates_of(ai, &piece)),
            }
        }
    }
}

/// Components of an element of `e_u A_i ⊗_{A_i} M` along the generators of
/// `exp`, as elements of `A_j`.
fn module_split(bc: &Bicategory, i: usize, j: usize, b: Basic, exp: &ModuleExpansion, val: &[Scalar]) -> Vec<Vec<Scalar>> {
    let f = bc.field();
    match b {
        Basic::Id => vec![val.to_vec()],
        Basic::P { .. } => {
            let (ai, aj) = (bc.algebra(i), bc.algebra(j));
            let coords = exp.coords.as_ref().unwrap();
            let mut by_right: BTreeMap<usize, Vec<Scalar>> = BTreeMap::new();
            for (p, q, c) in bc.terms(j, val) {
                axpy(f, by_right.entry(q).or_insert_with(|| vec![0; ai.dim()]), c, &ai.basis_vec(p));
            }
            let mut out = vec![vec![0; aj.dim()]; exp.gens.len()];
            for (q, left) in by_right {
                let cs = coords.coords(&left).expect("left factor lies in its corner");
                let bq = aj.basis_vec(q);
                for (g, &c) in cs.iter().enumerate() {
                    if c != 0 {
                        axpy(f, &mut out[g], c, &bq);
                    }
                }
            }
            out
        }
    }
}

/// Applies the 1-morphism `m: i → j` to a twisted object over the idempotent
/// category of `A_i`. Generators are ordered by `X`-generator, then
/// `M`-generator, then basis element of the corner (descending degree).
pub fn natural_rep_apply(bc: &Bicategory, m: &OneMorphism, x: &TwistedObject) -> TwistedObject {
    let (i, j) = (m.source, m.target);
    let f = bc.field();
    let cat_i = bc.module_cat(i);
    let cat_j = bc.module_cat(j);
    let hc = bc.homcat(i, j);
    let mut gens = Vec::new();
    let mut offsets = vec![vec![0; m.object.len()]; x.len()];
    let mut exps = Vec::new();
    for (k, &(u, sx)) in x.gens.iter().enumerate() {
        let mut row = Vec::new();
        for mm in 0..m.object.len() {
            let e = module_expansion(bc, i, j, m.basic(bc, mm), u);
            offsets[k][mm] = gens.len();
            gens.extend(e.gens.iter().map(|&(o, sh)| (o, sx + m.object.gens[mm].1 + sh)));
            row.push(e);
        }
        exps.push(row);
    }
    let mut alpha = HomMatrix::zero(cat_j, &gens, &gens);
    let put = |alpha: &mut HomMatrix, r0: usize, col: usize, comps: Vec<Vec<Scalar>>| {
        for (g, comp) in comps.into_iter().enumerate() {
            if is_zero_vec(&comp) {
                continue;
            }
            let (to, from) = (gens[r0 + g].0, gens[col].0);
            let c = cat_j.from_ambient(to, from, &comp).expect("action lands in the hom space");
            let cur = alpha.get(r0 + g, col).to_vec();
            alpha.set(r0 + g, col, crate::gflin::vec_add(f, &cur, &c));
        }
    };
    let one_j = bc.algebra(j).unit().to_vec();
    for k in 0..x.len() {
        for mm in 0..m.object.len() {
            let bm = m.basic(bc, mm);
            let e = &exps[k][mm];
            for (b, val) in e.values.iter().enumerate() {
                let col = offsets[k][mm] + b;
                let dv = bc.diff_amb(i, j, bm, val);
                put(&mut alpha, offsets[k][mm], col, module_split(bc, i, j, bm, e, &dv));
                for k2 in 0..x.len() {
                    let a = x.alpha.get(k2, k);
                    if is_zero_vec(a) {
                        continue;
                    }
                    let a_amb = cat_i.to_ambient(x.gens[k2].0, x.gens[k].0, a);
                    let v2 = bc.act(i, j, bm, &a_amb, val, &one_j);
                    put(&mut alpha, offsets[k2][mm], col, module_split(bc, i, j, bm, &exps[k2][mm], &v2));
                }
                for m2 in 0..m.object.len() {
                    let g = m.object.alpha.get(m2, mm);
                    if is_zero_vec(g) {
                        continue;
                    }
                    let b2 = m.basic(bc, m2);
                    let g_amb = hc.cat.to_ambient(m.object.gens[m2].0, m.object.gens[mm].0, g);
                    let v2 = bc.eval(i, j, bm, b2, &g_amb, val);
                    put(&mut alpha, offsets[k][m2], col, module_split(bc, i, j, b2, &exps[k][m2], &v2));
                }
            }
        }
    }
    TwistedObject { gens, alpha }
}

// ---------------------------------------------------------------------------
// cell 2-representation

#[derive(Clone, Debug)]
pub struct CellGenerator {
    pub object: usize,
    pub s: usize,
    pub label: String,
}

/// `Hom(P(from,t), P(to,t))` in `R_L` with its ideal and quotient.
#[derive(Clone, Debug)]
pub struct CellHom {
    pub from: usize,
    pub to: usize,
    pub dim: usize,
    /// ideal basis in hom coordinates, homogeneous
    pub ideal: Vec<(Vec<Scalar>, i64)>,
    /// quotient representatives among the hom basis vectors
    pub quotient: Vec<(Vec<Scalar>, i64)>,
}

impl CellHom {
    pub fn quotient_dims(&self) -> BTreeMap<i64, i64> {
        graded_dim(self.quotient.iter().map(|q| q.1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealChecks {
    pub diff_stable: bool,
    pub composition_stable: bool,
    pub action_stable: bool,
    pub identities_survive: bool,
}

impl IdealChecks {
    pub fn all(&self) -> bool {
        self.diff_stable && self.composition_stable && self.action_stable && self.identities_survive
    }
}

#[derive(Clone, Debug)]
pub struct CellRepData {
    pub label: String,
    pub source: usize,
    pub t: usize,
    pub generators: Vec<CellGenerator>,
    pub homs: Vec<CellHom>,
    /// homogeneous basis of `rad(e_t A_i e_t)`
    pub radical: Vec<Vec<Scalar>>,
    pub checks: IdealChecks,
}

impl CellRepData {
    pub fn hom(&self, from: usize, to: usize) -> Option<&CellHom> {
        self.homs.iter().find(|h| h.from == from && h.to == to)
    }
}

fn homogeneous_parts(alg: &PdgAlgebra, v: &[Scalar]) -> Vec<(Vec<Scalar>, i64)> {
    let mut parts: BTreeMap<i64, Vec<Scalar>> = BTreeMap::new();
    for (k, &c) in v.iter().enumerate() {
        if c != 0 {
            parts.entry(alg.degree(k)).or_insert_with(|| vec![0; v.len()])[k] = c;
        }
    }
    parts.into_iter().map(|(d, w)| (w, d)).collect()
}

fn generator_object(bc: &Bicategory, data: &CellRepData, g: usize) -> (usize, usize) {
    let gen = &data.generators[g];
    let hc = bc.homcat(data.source, gen.object);
    (gen.object, hc.index(Basic::P { s: gen.s, t: data.t }).unwrap())
}

fn in_span(field: crate::gflin::Field, dim: usize, basis: &[(Vec<Scalar>, i64)], v: &[Scalar]) -> bool {
    let mut e = Echelon::new(field, dim);
    for (b, _) in basis {
        e.insert(b);
    }
    e.contains(v)
}

/// Builds `R_L` and `J` for the left cell `{P(·,t)}` (`t` a 1-based global
/// idempotent number) and checks that `J` is a proper ∂-stable ideal.
pub fn build_cell_rep(bc: &Bicategory, t_global: usize) -> Result<CellRepData, CellRepError> {
    let (i, t) = bc.locate(t_global)?;
    let ai = bc.algebra(i);
    let rad = local_radical(ai, t).ok_or(CellRepError::NotLocal(t_global))?;
    let radical: Vec<Vec<Scalar>> = rad.iter().flat_map(|v| homogeneous_parts(ai, v)).map(|(v, _)| v).collect();
    let mut span = Echelon::new(bc.field(), ai.dim());
    radical.iter().for_each(|v| {
        span.insert(v);
    });
    if radical.iter().any(|v| !span.contains(&ai.diff(v))) {
        return Err(CellRepError::RadicalNotStable(t_global));
    }
    let radical = span.basis().into_iter().flat_map(|v| homogeneous_parts(ai, &v)).map(|(v, _)| v).collect::<Vec<_>>();
    let mut generators = Vec::new();
    for j in 0..bc.num_objects() {
        for s in 0..bc.algebra(j).num_idempotents() {
            generators.push(CellGenerator { object: j, s, label: bc.basic_label(i, j, Basic::P { s, t }) });
        }
    }
    let mut data = CellRepData {
        label: format!("L({t_global})"),
        source: i,
        t,
        generators,
        homs: Vec::new(),
        radical,
        checks: IdealChecks { diff_stable: true, composition_stable: true, action_stable: true, identities_survive: true },
    };
    for a in 0..data.generators.len() {
        for b in 0..data.generators.len() {
            let (j, oa) = generator_object(bc, &data, a);
            let (jb, ob) = generator_object(bc, &data, b);
            if j != jb {
                continue;
            }
            let cat = &bc.homcat(i, j).cat;
            let aj = bc.algebra(j);
            let (sa, sb) = (data.generators[a].s, data.generators[b].s);
            let mut ideal = Vec::new();
            for r in &data.radical {
                let dr = ai.homogeneous_degree(r).unwrap_or(0);
                for (y, dy) in aj.piece(sb, sa) {
                    let amb = bc.kron(i, j, r, &y);
                    let c = cat.from_ambient(ob, oa, &amb).expect("ideal element lies in the hom space");
                    ideal.push((c, dr + dy));
                }
            }
            let h = cat.hom(ob, oa);
            let mut quotient = Vec::new();
            let mut by_deg: BTreeMap<i64, Echelon> = BTreeMap::new();
            for (v, d) in &ideal {
                by_deg.entry(*d).or_insert_with(|| Echelon::new(bc.field(), h.dim())).insert(v);
            }
            for (k, &d) in h.degrees.iter().enumerate() {
                let mut e = vec![0; h.dim()];
                e[k] = 1;
                if by_deg.entry(d).or_insert_with(|| Echelon::new(bc.field(), h.dim())).insert(&e) {
                    quotient.push((e, d));
                }
            }
            data.homs.push(CellHom { from: a, to: b, dim: h.dim(), ideal, quotient });
        }
    }
    data.checks = check_ideal(bc, &data, &ideal_spaces(&data));
    Ok(data)
}

type IdealFamily = BTreeMap<(usize, usize), Vec<(Vec<Scalar>, i64)>>;

fn ideal_spaces(data: &CellRepData) -> IdealFamily {
    data.homs.iter().map(|h| ((h.from, h.to), h.ideal.clone())).collect()
}

fn one_morphism(bc: &Bicategory, i: usize, j: usize, b: Basic) -> OneMorphism {
    let hc = bc.homcat(i, j);
    OneMorphism::new(i, j, TwistedObject::single(&hc.cat, hc.index(b).unwrap(), 0))
}

fn single_morphism(cat: &PdgCategory, src: &OneMorphism, tgt: &OneMorphism, v: Vec<Scalar>, d: i64) -> TwistedMorphism {
    let mut entries = HomMatrix::zero(cat, &tgt.object.gens, &src.object.gens);
    entries.set(0, 0, v);
    TwistedMorphism { source: src.object.clone(), target: tgt.object.clone(), degree: d, entries }
}

/// The images of one ideal element under the closure operations: ∂,
/// composition with hom basis elements and whiskering by basic 1-morphisms.
fn closure_images(
    bc: &Bicategory,
    data: &CellRepData,
    (a, b): (usize, usize),
    v: &[Scalar],
    d: i64,
) -> Vec<((usize, usize), Vec<Scalar>, i64)> {
    let i = data.source;
    let (j, oa) = generator_object(bc, data, a);
    let (_, ob) = generator_object(bc, data, b);
    let cat = &bc.homcat(i, j).cat;
    let mut out = vec![((a, b), cat.diff(ob, oa, v), d + 2)];
    for c in 0..data.generators.len() {
        let (jc, oc) = generator_object(bc, data, c);
        if jc != j {
            continue;
        }
        // g ∘ v for g: b → c, and v ∘ g for g: c → a
        let hbc = cat.hom(oc, ob);
        for k in 0..hbc.dim() {
            let mut g = vec![0; hbc.dim()];
            g[k] = 1;
            out.push(((a, c), cat.compose(oc, ob, oa, &g, v), d + hbc.degrees[k]));
        }
        let hca = cat.hom(oa, oc);
        for k in 0..hca.dim() {
            let mut g = vec![0; hca.dim()];
            g[k] = 1;
            out.push(((c, b), cat.compose(ob, oa, oc, v, &g), d + hca.degrees[k]));
        }
    }
    // whiskering: id_H ∘₀ v for every basic H = P(x,y): j → j2
    let (sa, sb) = (data.generators[a].s, data.generators[b].s);
    let na = one_morphism(bc, i, j, Basic::P { s: sa, t: data.t });
    let nb = one_morphism(bc, i, j, Basic::P { s: sb, t: data.t });
    let tau = single_morphism(cat, &na, &nb, v.to_vec(), d);
    for j2 in 0..bc.num_objects() {
        for x in 0..bc.algebra(j2).num_idempotents() {
            for y in 0..bc.algebra(j).num_idempotents() {
                let h = one_morphism(bc, j, j2, Basic::P { s: x, t: y });
                let id_h = TwistedMorphism::identity(&bc.homcat(j, j2).cat, &h.object);
                let w = hcompose2(bc, (&h, &h, &id_h), (&na, &nb, &tau)).expect("composable");
                let gx = data.generators.iter().position(|g| g.object == j2 && g.s == x).unwrap();
                for r in 0..w.entries.rows {
                    for c in 0..w.entries.cols {
                        let e = w.entries.get(r, c);
                        if !is_zero_vec(e) {
                            let deg = d + w.source.gens[c].1 - w.target.gens[r].1;
                            out.push(((gx, gx), e.to_vec(), deg));
                        }
                    }
                }
            }
        }
    }
    out
}

fn check_ideal(bc: &Bicategory, data: &CellRepData, fam: &IdealFamily) -> IdealChecks {
    let f = bc.field();
    let mut checks = IdealChecks { diff_stable: true, composition_stable: true, action_stable: true, identities_survive: true };
    let dim_of = |key: &(usize, usize)| data.hom(key.0, key.1).map(|h| h.dim).unwrap_or(0);
    for (&key, basis) in fam {
        for (v, d) in basis {
            for (n, (k2, w, _)) in closure_images(bc, data, key, v, *d).into_iter().enumerate() {
                if is_zero_vec(&w) {
                    continue;
                }
                if !in_span(f, dim_of(&k2), &fam[&k2], &w) {
                    if n == 0 {
                        checks.diff_stable = false;
                    } else if k2.0 == key.0 || k2.1 == key.1 {
                        checks.composition_stable = false;
                    } else {
                        checks.action_stable = false;
                    }
                }
            }
        }
    }
    for g in 0..data.generators.len() {
        let (j, o) = generator_object(bc, data, g);
        let id = bc.homcat(data.source, j).cat.identity(o).to_vec();
        if in_span(f, id.len(), &fam[&(g, g)], &id) {
            checks.identities_survive = false;
        }
    }
    checks
}

/// Outcome of the brute-force maximality test.
#[derive(Clone, Debug)]
pub struct MaximalityReport {
    pub tested: usize,
    /// candidates whose generated ideal avoided every identity
    pub failures: Vec<String>,
}

impl MaximalityReport {
    pub fn is_maximal(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Adjoins each ∂-closed morphism outside `J` (hom basis cycles plus `samples`
/// random cycle combinations per piece) and closes under ∂, composition and
/// whiskering; every such enlargement must swallow some identity.
pub fn maximality_check(bc: &Bicategory, data: &CellRepData, seed: u64, samples: usize) -> MaximalityReport {
    let f = bc.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tested = 0;
    let mut failures = Vec::new();
    for h in &data.homs {
        let (j, oa) = generator_object(bc, data, h.from);
        let (_, ob) = generator_object(bc, data, h.to);
        let cat = &bc.homcat(data.source, j).cat;
        let hs = cat.hom(ob, oa);
        let dm = cat.diff_matrix(ob, oa);
        let degrees: std::collections::BTreeSet<i64> = hs.degrees.iter().copied().collect();
        for d in degrees {
            let idx = cat.basis_in_degree(ob, oa, d);
            let cyc: Vec<Vec<Scalar>> = dm
                .select_columns(&idx)
                .kernel()
                .into_iter()
                .map(|k| {
                    let mut v = vec![0; hs.dim()];
                    for (c, &b) in k.iter().zip(&idx) {
                        v[b] = *c;
                    }
                    v
                })
                .collect();
            let mut cands = cyc.clone();
            for _ in 0..samples {
                let mut v = vec![0; hs.dim()];
                for c in &cyc {
                    axpy(f, &mut v, rng.gen_range(0..f.p()), c);
                }
                cands.push(v);
            }
            for v in cands {
                if is_zero_vec(&v) || in_span(f, hs.dim(), &h.ideal, &v) {
                    continue;
                }
                tested += 1;
                if !closure_reaches_identity(bc, data, (h.from, h.to), &v, d) {
                    failures.push(format!(
                        "{} -> {}: {}",
                        data.generators[h.from].label,
                        data.generators[h.to].label,
                        cat.format(ob, oa, &v)
                    ));
                }
            }
        }
    }
    MaximalityReport { tested, failures }
}

fn closure_reaches_identity(bc: &Bicategory, data: &CellRepData, key: (usize, usize), v: &[Scalar], d: i64) -> bool {
    let f = bc.field();
    let mut spans: BTreeMap<(usize, usize), Echelon> = BTreeMap::new();
    let mut queue: Vec<((usize, usize), Vec<Scalar>, i64)> = Vec::new();
    for h in &data.homs {
        let mut e = Echelon::new(f, h.dim);
        for (w, dw) in &h.ideal {
            if e.insert(w) {
                queue.push(((h.from, h.to), w.clone(), *dw));
            }
        }
        spans.insert((h.from, h.to), e);
    }
    if spans.get_mut(&key).unwrap().insert(v) {
        queue.push((key, v.to_vec(), d));
    }
    while let Some((k, w, dw)) = queue.pop() {
        for (k2, w2, d2) in closure_images(bc, data, k, &w, dw) {
            if !is_zero_vec(&w2) && spans.get_mut(&k2).unwrap().insert(&w2) {
                queue.push((k2, w2, d2));
            }
        }
    }
    (0..data.generators.len()).any(|g| {
        let (j, o) = generator_object(bc, data, g);
        spans[&(g, g)].contains(bc.homcat(data.source, j).cat.identity(o))
    })
}

/// The identity cell `{Id(i)}`: its only generator has endomorphisms `Z(A_i)`
/// and the ideal is `Z(A_i) ∩ rad A_i`.
#[derive(Clone, Debug)]
pub struct IdentityCellRep {
    pub object: usize,
    pub center_dims: BTreeMap<i64, i64>,
    pub ideal_dims: BTreeMap<i64, i64>,
    pub quotient_dims: BTreeMap<i64, i64>,
}

pub fn build_identity_cell_rep(bc: &Bicategory, i: usize) -> Result<IdentityCellRep, CellRepError> {
    bc.check_object(i)?;
    let hc = bc.homcat(i, i);
    if !hc.cat.is_local(0) {
        return Err(BicatError::NonLocalIdentity(i + 1).into());
    }
    let a = bc.algebra(i);
    let rad = radical(a).map_err(|e| CellRepError::Algebra(e.to_string()))?;
    let mut rspan = Echelon::new(bc.field(), a.dim());
    rad.basis.iter().for_each(|v| {
        rspan.insert(v);
    });
    let center = a.center();
    let mut ideal_degrees = Vec::new();
    let mut quotient_degrees = Vec::new();
    // per degree: the part of the center inside the radical
    let mut by_deg: BTreeMap<i64, Vec<Vec<Scalar>>> = BTreeMap::new();
    for (v, d) in &center {
        by_deg.entry(*d).or_default().push(v.clone());
    }
    for (d, vs) in by_deg {
        // central elements of degree d that are independent modulo the radical
        let mut all = Echelon::new(bc.field(), a.dim());
        for r in rspan.basis() {
            all.insert(&r);
        }
        let outside = vs.iter().filter(|v| all.insert(v)).count();
        ideal_degrees.extend(std::iter::repeat_n(d, vs.len() - outside));
        quotient_degrees.extend(std::iter::repeat_n(d, outside));
    }
    Ok(IdentityCellRep {
        object: i,
        center_dims: graded_dim(center.iter().map(|c| c.1)),
        ideal_dims: graded_dim(ideal_degrees),
        quotient_dims: graded_dim(quotient_degrees),
    })
}

// ---------------------------------------------------------------------------
// comparison with the natural representation

#[derive(Clone, Debug)]
pub struct PairCheck {
    pub object: usize,
    pub from: String,
    pub to: String,
    pub cell_dims: BTreeMap<i64, i64>,
    pub natural_dims: BTreeMap<i64, i64>,
    /// the correspondence kills `J` and is bijective on the quotient
    pub bijective: bool,
    pub diff_match: bool,
    pub composition_match: bool,
}

impl PairCheck {
    pub fn ok(&self) -> bool {
        self.cell_dims == self.natural_dims && self.bijective && self.diff_match && self.composition_match
    }
}

#[derive(Clone, Debug)]
pub struct ActionCheck {
    pub functor: String,
    pub generator: String,
    pub cell: Vec<(usize, i64)>,
    pub natural: Vec<(usize, i64)>,
}

impl ActionCheck {
    pub fn ok(&self) -> bool {
        self.cell == self.natural
    }
}

#[derive(Clone, Debug)]
pub struct NaturalComparison {
    pub pairs: Vec<PairCheck>,
    pub actions: Vec<ActionCheck>,
}

impl NaturalComparison {
    pub fn mismatches(&self) -> usize {
        self.pairs.iter().filter(|p| !p.ok()).count() + self.actions.iter().filter(|a| !a.ok()).count()
    }
}

/// `a ⊗ b ↦ ε(a) b` from `Hom(P(s_a,t), P(s_b,t))` to `e_{s_b} A_j e_{s_a}`,
/// where `ε: e_t A e_t → k` is the residue map.
fn correspondence(bc: &Bicategory, data: &CellRepData, eps: &Coordinates, j: usize, amb: &[Scalar]) -> Vec<Scalar> {
    let f = bc.field();
    let (ai, aj) = (bc.algebra(data.source), bc.algebra(j));
    let mut by_right: BTreeMap<usize, Vec<Scalar>> = BTreeMap::new();
    for (p, q, c) in bc.terms(j, amb) {
        axpy(f, by_right.entry(q).or_insert_with(|| vec![0; ai.dim()]), c, &ai.basis_vec(p));
    }
    let mut out = vec![0; aj.dim()];
    for (q, left) in by_right {
        let c = eps.coords(&left).expect("left factor lies in e_t A e_t")[0];
        if c != 0 {
            axpy(f, &mut out, c, &aj.basis_vec(q));
        }
    }
    out
}

pub fn compare_with_natural(bc: &Bicategory, data: &CellRepData) -> NaturalComparison {
    let f = bc.field();
    let i = data.source;
    let ai = bc.algebra(i);
    let mut eps_basis = vec![ai.idempotent(data.t).to_vec()];
    eps_basis.extend(data.radical.iter().cloned());
    let eps = Coordinates::new(f, ai.dim(), eps_basis);
    let phi = |j: usize, a: usize, b: usize, v: &[Scalar]| -> Vec<Scalar> {
        let (_, oa) = generator_object(bc, data, a);
        let (_, ob) = generator_object(bc, data, b);
        let amb = bc.homcat(i, j).cat.to_ambient(ob, oa, v);
        let img = correspondence(bc, data, &eps, j, &amb);
        bc.module_cat(j)
            .from_ambient(data.generators[b].s, data.generators[a].s, &img)
            .expect("image lies in the corner")
    };
    let mut pairs = Vec::new();
    for h in &data.homs {
        let j = data.generators[h.from].object;
        let (sa, sb) = (data.generators[h.from].s, data.generators[h.to].s);
        let (_, oa) = generator_object(bc, data, h.from);
        let (_, ob) = generator_object(bc, data, h.to);
        let cat = &bc.homcat(i, j).cat;
        let ncat = bc.module_cat(j);
        let nd = ncat.hom_dim(sb, sa);
        // Φ vanishes on J and is injective on the quotient representatives
        let kills = h.ideal.iter().all(|(v, _)| is_zero_vec(&phi(j, h.from, h.to, v)));
        let mut img = Echelon::new(f, nd);
        let injective = h.quotient.iter().all(|(v, _)| img.insert(&phi(j, h.from, h.to, v)));
        let bijective = kills && injective && img.rank() == nd;
        let mut diff_match = true;
        for k in 0..h.dim {
            let mut v = vec![0; h.dim];
            v[k] = 1;
            let lhs = phi(j, h.from, h.to, &cat.diff(ob, oa, &v));
            let rhs = ncat.diff(sb, sa, &phi(j, h.from, h.to, &v));
            diff_match &= lhs == rhs;
        }
        let mut composition_match = true;
        for h2 in data.homs.iter().filter(|h2| h2.from == h.to) {
            let (_, oc) = generator_object(bc, data, h2.to);
            let sc = data.generators[h2.to].s;
            for k in 0..h.dim {
                for k2 in 0..h2.dim {
                    let mut v = vec![0; h.dim];
                    v[k] = 1;
                    let mut w = vec![0; h2.dim];
                    w[k2] = 1;
                    let lhs = phi(j, h.from, h2.to, &cat.compose(oc, ob, oa, &w, &v));
                    let rhs = ncat.compose(sc, sb, sa, &phi(j, h.to, h2.to, &w), &phi(j, h.from, h.to, &v));
                    composition_match &= lhs == rhs;
                }
            }
        }
        pairs.push(PairCheck {
            object: j,
            from: data.generators[h.from].label.clone(),
            to: data.generators[h.to].label.clone(),
            cell_dims: h.quotient_dims(),
            natural_dims: ncat.graded_dim(sb, sa),
            bijective,
            diff_match,
            composition_match,
        });
    }
    let mut actions = Vec::new();
    for (g, gen) in data.generators.iter().enumerate() {
        let j = gen.object;
        for j2 in 0..bc.num_objects() {
            for x in 0..bc.algebra(j2).num_idempotents() {
                for y in 0..bc.algebra(j).num_idempotents() {
                    let hb = Basic::P { s: x, t: y };
                    let mut cell: Vec<(usize, i64)> = bc
                        .expansion(i, j, j2, hb, Basic::P { s: gen.s, t: data.t })
                        .summands
                        .into_iter()
                        .map(|(b, sh)| match b {
                            Basic::P { s, .. } => (bc.global(j2, s), sh),
                            Basic::Id => unreachable!("projective composites are projective"),
                        })
                        .collect();
                    let mut natural: Vec<(usize, i64)> = module_expansion(bc, j, j2, hb, gen.s)
                        .gens
                        .into_iter()
                        .map(|(s, sh)| (bc.global(j2, s), sh))
                        .collect();
                    cell.sort();
                    natural.sort();
                    actions.push(ActionCheck {
                        functor: bc.basic_label(j, j2, hb),
                        generator: data.generators[g].label.clone(),
                        cell,
                        natural,
                    });
                }
            }
        }
    }
    NaturalComparison { pairs, actions }
}

// ---------------------------------------------------------------------------
// stable 2-homs

/// Stable 2-morphisms `M → N`: ∂-closed 2-morphisms modulo `∂^{p-1}`.
#[derive(Clone, Debug)]
pub struct StableTwoHom {
    pub complex: HomComplex,
    pub pieces: Vec<StableHom>,
}

impl StableTwoHom {
    pub fn total_dim(&self) -> usize {
        self.pieces.iter().map(|s| s.dim()).sum()
    }

    pub fn graded_dims(&self) -> BTreeMap<i64, i64> {
        self.pieces.iter().filter(|s| s.dim() > 0).map(|s| (s.degree, s.dim() as i64)).collect()
    }

    /// Representatives with their degrees.
    pub fn representatives(&self) -> Vec<(Vec<Scalar>, i64)> {
        self.pieces.iter().flat_map(|s| s.representatives.iter().map(move |r| (r.clone(), s.degree))).collect()
    }

    pub fn format(&self, field: crate::gflin::Field, v: &[Scalar]) -> String {
        let single = self.complex.source.len() == 1 && self.complex.target.len() == 1;
        format_combination(field, v, |k| {
            let l = &self.complex.space.basis[k].0;
            if single {
                l.splitn(2, ']').nth(1).unwrap_or(l).to_string()
            } else {
                l.clone()
            }
        })
    }
}

pub fn stable_two_hom(bc: &Bicategory, m: &OneMorphism, n: &OneMorphism) -> Result<StableTwoHom, BicatError> {
    let complex = two_hom(bc, m, n)?;
    let pieces = stable_hom_all(m.category(bc), &m.object, &n.object);
    Ok(StableTwoHom { complex, pieces })
}

/// A 2-morphism between basic 1-morphisms from an ambient representative.
pub fn basic_two_morphism(
    bc: &Bicategory,
    m: &OneMorphism,
    n: &OneMorphism,
    ambient: &[Scalar],
    degree: i64,
) -> Option<TwistedMorphism> {
    if m.object.len() != 1 || n.object.len() != 1 {
        return None;
    }
    let cat = m.category(bc);
    let v = cat.from_ambient(n.object.gens[0].0, m.object.gens[0].0, ambient)?;
    let raw = degree - m.object.gens[0].1 + n.object.gens[0].1;
    (cat.degree_of(n.object.gens[0].0, m.object.gens[0].0, &v).is_none_or(|d| d == raw))
        .then(|| single_morphism(cat, m, n, v, degree))
}
