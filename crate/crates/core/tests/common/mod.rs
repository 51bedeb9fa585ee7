//! Independent oracles for the integration tests: plain mod-p linear algebra
//! on `u64`, algebras read straight from their structure constants, and
//! random generators for twisted objects and morphisms.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use pdgcat::category::PdgCategory;
use pdgcat::homotopy::HomComplex;
use pdgcat::twisted::{HomMatrix, TwistedMorphism, TwistedObject};
use pdgcat::RawAlgebra;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn golden(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "golden", name].iter().collect();
    std::fs::read_to_string(p).expect("golden file")
}

// linear algebra

pub fn inv(a: u64, p: u64) -> u64 {
    let mut r = 1;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Rank of a list of vectors.
pub fn rank(vectors: &[Vec<u64>], p: u64) -> usize {
    let mut rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.iter().map(|x| x % p).collect()).collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let iv = inv(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * iv % p;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for k in 0..cols {
                    rows[i][k] = (rows[i][k] + p * p - f * rows[r][k]) % p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Kernel of the map sending basis vector `i` to `images[i]`, as
/// coefficient vectors.
pub fn kernel(images: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = images.len();
    if n == 0 {
        return Vec::new();
    }
    let m = images[0].len();
    // rows = [image | identity]; reduce on the image columns
    let mut rows: Vec<Vec<u64>> = images
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut r: Vec<u64> = v.iter().map(|x| x % p).collect();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    let mut r = 0;
    for c in 0..m {
        let Some(piv) = (r..n).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let iv = inv(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * iv % p;
        }
        for i in 0..n {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for k in 0..m + n {
                    rows[i][k] = (rows[i][k] + p * p - f * rows[r][k]) % p;
                }
            }
        }
        r += 1;
    }
    rows[r..].iter().map(|row| row[m..].to_vec()).collect()
}

pub fn in_span(basis: &[Vec<u64>], v: &[u64], p: u64) -> bool {
    let mut with = basis.to_vec();
    with.push(v.to_vec());
    rank(&with, p) == rank(basis, p)
}

pub fn combine(vectors: &[Vec<u64>], coeffs: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0; vectors.first().map_or(0, |v| v.len())];
    for (v, &c) in vectors.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(v) {
            *o = (*o + c * x) % p;
        }
    }
    out
}

pub fn to_u64(v: &[u32]) -> Vec<u64> {
    v.iter().map(|&x| x as u64).collect()
}

// algebras from structure constants

#[derive(Clone, Debug)]
pub struct Alg {
    pub p: u64,
    pub dim: usize,
    pub deg: Vec<i64>,
    mul: Vec<Vec<u64>>,
    diff: Vec<Vec<u64>>,
    pub idempotents: Vec<Vec<u64>>,
}

fn red(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

impl Alg {
    pub fn from_raw(raw: &RawAlgebra) -> Self {
        let (p, n) = (raw.p, raw.basis.len());
        let mut mul = vec![vec![0; n]; n * n];
        for &(i, j, k, c) in &raw.mul {
            mul[i * n + j][k] = (mul[i * n + j][k] + red(c, p)) % p;
        }
        let mut diff = vec![vec![0; n]; n];
        for &(i, k, c) in &raw.diff {
            diff[i][k] = (diff[i][k] + red(c, p)) % p;
        }
        Alg {
            p,
            dim: n,
            deg: raw.basis.iter().map(|b| b.1).collect(),
            mul,
            diff,
            idempotents: raw.idempotents.iter().map(|e| e.iter().map(|&x| red(x, p)).collect()).collect(),
        }
    }

    pub fn basis(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.dim];
        for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, &y) in b.iter().enumerate().filter(|(_, y)| **y != 0) {
                for (k, &c) in self.mul[i * self.dim + j].iter().enumerate() {
                    out[k] = (out[k] + x * y % self.p * c) % self.p;
                }
            }
        }
        out
    }

    pub fn d(&self, a: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.dim];
        for (i, &x) in a.iter().enumerate() {
            for (k, &c) in self.diff[i].iter().enumerate() {
                out[k] = (out[k] + x * c) % self.p;
            }
        }
        out
    }

    /// Homogeneous spanning set of `e A f`, with degrees.
    pub fn corner(&self, e: &[u64], f: &[u64]) -> Vec<(Vec<u64>, i64)> {
        let mut out: Vec<(Vec<u64>, i64)> = Vec::new();
        for i in 0..self.dim {
            let v = self.mul(&self.mul(e, &self.basis(i)), f);
            if v.iter().any(|&x| x != 0) {
                out.push((v, self.deg[i]));
            }
        }
        out
    }

    /// Graded dimension of `e A f`.
    pub fn corner_dims(&self, e: &[u64], f: &[u64]) -> BTreeMap<i64, i64> {
        let spanning = self.corner(e, f);
        let mut by_deg: BTreeMap<i64, Vec<Vec<u64>>> = BTreeMap::new();
        for (v, d) in spanning {
            by_deg.entry(d).or_default().push(v);
        }
        by_deg.into_iter().map(|(d, vs)| (d, rank(&vs, self.p) as i64)).filter(|(_, n)| *n > 0).collect()
    }
}

/// Stable dimensions of a complex `(V, D)` inside an ambient space: `V` is
/// spanned by the homogeneous `space`, `D` has degree 2 and `D^p = 0` on `V`.
/// Returns, per degree, the dimension of `ker D / im D^{p-1}` together with
/// cycle and boundary spanning sets.
pub struct Stable {
    pub dims: BTreeMap<i64, usize>,
    pub cycles: BTreeMap<i64, Vec<Vec<u64>>>,
    pub boundaries: BTreeMap<i64, Vec<Vec<u64>>>,
}

pub fn stable(space: &[(Vec<u64>, i64)], d: impl Fn(&[u64]) -> Vec<u64>, p: u64) -> Stable {
    let mut by_deg: BTreeMap<i64, Vec<Vec<u64>>> = BTreeMap::new();
    for (v, g) in space {
        by_deg.entry(*g).or_default().push(v.clone());
    }
    let mut out = Stable { dims: BTreeMap::new(), cycles: BTreeMap::new(), boundaries: BTreeMap::new() };
    for (&g, vs) in &by_deg {
        let images: Vec<Vec<u64>> = vs.iter().map(|v| d(v)).collect();
        let cycles: Vec<Vec<u64>> = kernel(&images, p).iter().map(|c| combine(vs, c, p)).collect();
        let lower = by_deg.get(&(g - 2 * (p as i64 - 1))).cloned().unwrap_or_default();
        let boundaries: Vec<Vec<u64>> = lower
            .iter()
            .map(|v| {
                let mut w = v.clone();
                for _ in 0..p - 1 {
                    w = d(&w);
                }
                w
            })
            .collect();
        let (rz, rb) = (rank(&cycles, p), rank(&boundaries, p));
        let mut both = cycles.clone();
        both.extend(boundaries.iter().cloned());
        assert_eq!(rank(&both, p), rz, "boundaries are cycles");
        if rz > rb {
            out.dims.insert(g, rz - rb);
        }
        out.cycles.insert(g, cycles);
        out.boundaries.insert(g, boundaries);
    }
    out
}

/// Whether `reps` (homogeneous of degree `g`) is a basis of the stable space
/// in that degree.
pub fn is_stable_basis(st: &Stable, g: i64, reps: &[Vec<u64>], p: u64) -> bool {
    let cycles = st.cycles.get(&g).cloned().unwrap_or_default();
    let boundaries = st.boundaries.get(&g).cloned().unwrap_or_default();
    let n = st.dims.get(&g).copied().unwrap_or(0);
    if reps.len() != n || !reps.iter().all(|r| in_span(&cycles, r, p)) {
        return false;
    }
    let mut both = boundaries.clone();
    both.extend(reps.iter().cloned());
    rank(&both, p) == rank(&boundaries, p) + n
}

// random data

/// A random object with strictly upper-triangular twist entries of the
/// right degree, valid or not; about half of the entries are zero.
pub fn random_object(cat: &PdgCategory, rng: &mut ChaCha8Rng, max_gens: usize) -> TwistedObject {
    let n = rng.gen_range(1..=max_gens);
    let gens: Vec<(usize, i64)> =
        (0..n).map(|_| (rng.gen_range(0..cat.num_objects()), 2 * rng.gen_range(-2i64..=2))).collect();
    let mut alpha = HomMatrix::zero(cat, &gens, &gens);
    let p = cat.p();
    for k in 0..n {
        for l in k + 1..n {
            if rng.gen_bool(0.5) {
                continue;
            }
            let (ok, sk) = gens[k];
            let (ol, sl) = gens[l];
            let mut v = cat.zero(ok, ol);
            for b in cat.basis_in_degree(ok, ol, 2 + sk - sl) {
                v[b] = rng.gen_range(0..p);
            }
            alpha.set(k, l, v);
        }
    }
    TwistedObject { gens, alpha }
}

pub fn random_valid_object(cat: &PdgCategory, rng: &mut ChaCha8Rng, max_gens: usize) -> TwistedObject {
    loop {
        let x = random_object(cat, rng, max_gens);
        if pdgcat::twisted::validate_twisted(cat, &x).is_ok() {
            return x;
        }
    }
}

/// A random homogeneous morphism of the given degree.
pub fn random_morphism(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject, degree: i64, rng: &mut ChaCha8Rng) -> TwistedMorphism {
    let hc = HomComplex::new(cat, x, y);
    let mut v = vec![0; hc.dim()];
    for b in hc.degree_indices(degree) {
        v[b] = rng.gen_range(0..cat.p());
    }
    hc.morphism(&v, degree)
}

/// A random Z-morphism `X → Y` of degree 0.
pub fn random_z0(cat: &PdgCategory, x: &TwistedObject, y: &TwistedObject, rng: &mut ChaCha8Rng) -> TwistedMorphism {
    let hc = HomComplex::new(cat, x, y);
    let cycles = hc.cycles(0);
    let mut v = vec![0u32; hc.dim()];
    for c in &cycles {
        let a = rng.gen_range(0..cat.p());
        for (o, &x) in v.iter_mut().zip(c) {
            *o = ((*o as u64 + a as u64 * x as u64) % cat.p() as u64) as u32;
        }
    }
    hc.morphism(&v, 0)
}

/// The operator `∂ + α` on `⊕_k e_{o_k} A`, applied `p` times to a spanning
/// set: zero iff the twisted object is a p-dg module.
pub fn realized_p_nilpotent(alg: &Alg, cat: &PdgCategory, x: &TwistedObject) -> bool {
    let n = x.len();
    let p = alg.p;
    let entries: Vec<Vec<Vec<u64>>> = (0..n)
        .map(|k| (0..n).map(|l| to_u64(&cat.to_ambient(x.gens[k].0, x.gens[l].0, x.alpha.get(k, l)))).collect())
        .collect();
    let apply = |v: &[Vec<u64>]| -> Vec<Vec<u64>> {
        (0..n)
            .map(|k| {
                let mut out = alg.d(&v[k]);
                for l in 0..n {
                    let t = alg.mul(&entries[k][l], &v[l]);
                    for (o, y) in out.iter_mut().zip(t) {
                        *o = (*o + y) % p;
                    }
                }
                out
            })
            .collect()
    };
    for k in 0..n {
        let e = &alg.idempotents[x.gens[k].0];
        for i in 0..alg.dim {
            let mut v = vec![vec![0; alg.dim]; n];
            v[k] = alg.mul(e, &alg.basis(i));
            for _ in 0..p {
                v = apply(&v);
            }
            if v.iter().flatten().any(|&c| c != 0) {
                return false;
            }
        }
    }
    true
}
