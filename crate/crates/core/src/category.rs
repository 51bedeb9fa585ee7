//! Finite p-dg categories given by structure constants.
//!
//! Every hom space carries a homogeneous basis; elements are coordinate
//! vectors in that basis. Composition and the differential are tabulated
//! once at construction. Each hom space also remembers an embedding into an
//! ambient vector space (the algebra, or a tensor product of algebras) so
//! that concrete realizations can be recovered.

use std::collections::BTreeMap;

use crate::gflin::{axpy, is_zero_vec, vec_scale, vec_sub, Coordinates, Field, Mat, Scalar};
use crate::pdgalg::{all_coefficient_vectors, format_combination, PdgAlgebra};

/// One hom space `Hom(l, k)`: basis degrees, labels and its ambient embedding.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub degrees: Vec<i64>,
    pub labels: Vec<String>,
    pub embedding: Coordinates,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }
}

/// A basis element of a hom space given in ambient coordinates.
#[derive(Clone, Debug)]
pub struct AmbientBasis {
    pub ambient_dim: usize,
    pub vectors: Vec<(Vec<Scalar>, i64, String)>,
}

#[derive(Clone, Debug)]
pub struct PdgCategory {
    field: Field,
    objects: Vec<String>,
    homs: Vec<HomSpace>,
    diffs: Vec<Mat>,
    comp: Vec<Vec<Vec<(usize, Scalar)>>>,
    idents: Vec<Vec<Scalar>>,
}

impl PdgCategory {
    /// Tabulates a category from ambient data.
    ///
    /// `bases[k * n + l]` spans `Hom(l, k)`; `compose(k, m, l, g, f)` returns
    /// `g ∘ f` in the ambient space of `Hom(l, k)`; `diff(k, l, v)` returns
    /// ∂v in the same ambient space; `idents[k]` is the ambient identity.
    pub fn build(
        field: Field,
        objects: Vec<String>,
        bases: Vec<AmbientBasis>,
        compose: impl Fn(usize, usize, usize, &[Scalar], &[Scalar]) -> Vec<Scalar>,
        diff: impl Fn(usize, usize, &[Scalar]) -> Vec<Scalar>,
        idents: Vec<Vec<Scalar>>,
    ) -> Self {
        let n = objects.len();
        assert_eq!(bases.len(), n * n, "one basis per ordered pair of objects");
        let homs: Vec<HomSpace> = bases
            .into_iter()
            .map(|b| HomSpace {
                degrees: b.vectors.iter().map(|v| v.1).collect(),
                labels: b.vectors.iter().map(|v| v.2.clone()).collect(),
                embedding: Coordinates::new(field, b.ambient_dim, b.vectors.into_iter().map(|v| v.0).collect()),
            })
            .collect();
        let coords = |k: usize, l: usize, v: &[Scalar], what: &str| -> Vec<Scalar> {
            homs[k * n + l]
                .embedding
                .coords(v)
                .unwrap_or_else(|| panic!("{what} leaves Hom({}, {})", objects[l], objects[k]))
        };
        let mut diffs = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                let h = &homs[k * n + l];
                let cols: Vec<Vec<Scalar>> = h
                    .embedding
                    .basis()
                    .iter()
                    .map(|b| coords(k, l, &diff(k, l, b), "differential"))
                    .collect();
                diffs.push(Mat::from_columns(field, h.dim(), &cols));
            }
        }
        let mut comp = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for m in 0..n {
                for l in 0..n {
                    let g = &homs[k * n + m];
                    let f = &homs[m * n + l];
                    let mut table = Vec::with_capacity(g.dim() * f.dim());
                    for gb in g.embedding.basis() {
                        for fb in f.embedding.basis() {
                            let c = coords(k, l, &compose(k, m, l, gb, fb), "composition");
                            table.push(c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect());
                        }
                    }
                    comp.push(table);
                }
            }
        }
        let idents = idents.iter().enumerate().map(|(k, v)| coords(k, k, v, "identity")).collect();
        PdgCategory { field, objects, homs, diffs, comp, idents }
    }

    /// The category of an algebra: objects are the idempotents `e_k` and
    /// `Hom(e_l, e_k) = e_k A e_l`, with `g ∘ f = g·f`.
    pub fn from_algebra(alg: &PdgAlgebra) -> Self {
        let r = alg.num_idempotents();
        let objects = (1..=r).map(|i| format!("e{i}")).collect();
        let mut bases = Vec::new();
        for k in 0..r {
            for l in 0..r {
                let vectors = alg
                    .piece(k, l)
                    .into_iter()
                    .map(|(v, d)| {
                        let label = alg.format_elem(&v);
                        (v, d, label)
                    })
                    .collect();
                bases.push(AmbientBasis { ambient_dim: alg.dim(), vectors });
            }
        }
        PdgCategory::build(
            alg.field(),
            objects,
            bases,
            |_, _, _, g, f| alg.mul(g, f),
            |_, _, v| alg.diff(v),
            alg.idempotents().to_vec(),
        )
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object_label(&self, k: usize) -> &str {
        &self.objects[k]
    }

    pub fn hom(&self, k: usize, l: usize) -> &HomSpace {
        &self.homs[k * self.objects.len() + l]
    }

    pub fn hom_dim(&self, k: usize, l: usize) -> usize {
        self.hom(k, l).dim()
    }

    pub fn identity(&self, k: usize) -> &[Scalar] {
        &self.idents[k]
    }

    pub fn zero(&self, k: usize, l: usize) -> Vec<Scalar> {
        vec![0; self.hom_dim(k, l)]
    }

    /// Differential on `Hom(l, k)` as a matrix.
    pub fn diff_matrix(&self, k: usize, l: usize) -> &Mat {
        &self.diffs[k * self.objects.len() + l]
    }

    pub fn diff(&self, k: usize, l: usize, v: &[Scalar]) -> Vec<Scalar> {
        self.diff_matrix(k, l).mul_vec(v)
    }

    /// `g ∘ f` for `g: m → k`, `f: l → m`.
    pub fn compose(&self, k: usize, m: usize, l: usize, g: &[Scalar], f: &[Scalar]) -> Vec<Scalar> {
        let n = self.objects.len();
        let fd = self.hom_dim(m, l);
        let table = &self.comp[(k * n + m) * n + l];
        let fld = self.field;
        let mut out = vec![0; self.hom_dim(k, l)];
        for (i, &gi) in g.iter().enumerate() {
            if gi == 0 {
                continue;
            }
            for (j, &fj) in f.iter().enumerate() {
                if fj == 0 {
                    continue;
                }
                let c = fld.mul(gi, fj);
                for &(t, x) in &table[i * fd + j] {
                    out[t] = fld.add(out[t], fld.mul(c, x));
                }
            }
        }
        out
    }

    /// Degree of a homogeneous element, `None` for zero or inhomogeneous.
    pub fn degree_of(&self, k: usize, l: usize, v: &[Scalar]) -> Option<i64> {
        let h = self.hom(k, l);
        let mut deg = None;
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                match deg {
                    None => deg = Some(h.degrees[i]),
                    Some(d) if d != h.degrees[i] => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    pub fn to_ambient(&self, k: usize, l: usize, v: &[Scalar]) -> Vec<Scalar> {
        self.hom(k, l).embedding.combine(v)
    }

    pub fn from_ambient(&self, k: usize, l: usize, v: &[Scalar]) -> Option<Vec<Scalar>> {
        self.hom(k, l).embedding.coords(v)
    }

    pub fn format(&self, k: usize, l: usize, v: &[Scalar]) -> String {
        let h = self.hom(k, l);
        format_combination(self.field, v, |i| {
            let lab = &h.labels[i];
            if lab.contains(' ') {
                format!("({lab})")
            } else {
                lab.clone()
            }
        })
    }

    /// Indices of basis elements of `Hom(l, k)` in degree `d`.
    pub fn basis_in_degree(&self, k: usize, l: usize, d: i64) -> Vec<usize> {
        self.hom(k, l).degrees.iter().enumerate().filter(|(_, &x)| x == d).map(|(i, _)| i).collect()
    }

    /// Graded dimension of `Hom(l, k)`.
    pub fn graded_dim(&self, k: usize, l: usize) -> BTreeMap<i64, i64> {
        crate::gflin::graded_dim(self.hom(k, l).degrees.iter().copied())
    }

    /// Whether the degree-0 endomorphism algebra of `k` is split local.
    pub fn is_local(&self, k: usize) -> bool {
        let f = self.field;
        let basis = self.basis_in_degree(k, k, 0);
        let dim = self.hom_dim(k, k);
        let id = self.identity(k).to_vec();
        for &b in &basis {
            let mut bv = vec![0; dim];
            bv[b] = 1;
            let ok = f.elements().any(|c| {
                let y = vec_sub(f, &bv, &vec_scale(f, c, &id));
                let mut x = y.clone();
                for _ in 0..=basis.len() {
                    if is_zero_vec(&x) {
                        break;
                    }
                    x = self.compose(k, k, k, &x, &y);
                }
                is_zero_vec(&x)
            });
            if !ok {
                return false;
            }
        }
        !basis.is_empty()
    }

    /// Degree-0 isomorphism `x: l → k` with inverse, by search over `Hom_0(l, k)`
    /// (enumerated when its dimension is at most `bound`).
    pub fn find_iso(&self, k: usize, l: usize, bound: usize) -> Option<(Vec<Scalar>, Vec<Scalar>)> {
        let f = self.field;
        let fwd = self.basis_in_degree(k, l, 0);
        let back = self.basis_in_degree(l, k, 0);
        if fwd.is_empty() || back.is_empty() || fwd.len() > bound {
            return None;
        }
        let dkl = self.hom_dim(k, l);
        let dlk = self.hom_dim(l, k);
        for coeffs in all_coefficient_vectors(f, fwd.len()) {
            let mut x = vec![0; dkl];
            for (c, &b) in coeffs.iter().zip(&fwd) {
                x[b] = *c;
            }
            if is_zero_vec(&x) {
                continue;
            }
            let cols: Vec<Vec<Scalar>> = back
                .iter()
                .map(|&b| {
                    let mut y = vec![0; dlk];
                    y[b] = 1;
                    let mut v = self.compose(k, l, k, &x, &y);
                    v.extend(self.compose(l, k, l, &y, &x));
                    v
                })
                .collect();
            let rows = self.hom_dim(k, k) + self.hom_dim(l, l);
            let m = Mat::from_columns(f, rows, &cols);
            let mut rhs = self.identity(k).to_vec();
            rhs.extend_from_slice(self.identity(l));
            if let Ok(Some(sol)) = m.solve(&rhs) {
                let mut y = vec![0; dlk];
                for (c, &b) in sol.iter().zip(&back) {
                    axpy(f, &mut y, *c, &crate::gflin::unit_vec(dlk, b));
                }
                return Some((x, y));
            }
        }
        None
    }

    /// Partition of objects into isomorphism classes (degree-0 isomorphisms).
    pub fn object_classes(&self, bound: usize) -> Vec<usize> {
        let n = self.num_objects();
        let mut class: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if class[j] == j && class[i] == i && self.find_iso(i, j, bound).is_some() {
                    class[j] = i;
                }
            }
        }
        class
    }
}
