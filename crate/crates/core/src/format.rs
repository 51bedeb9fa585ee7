//! The JSON input format: a family of algebras over one prime, plus optional
//! named twisted objects, morphisms between them, and named 1-morphisms.
//!
//! Basis indices inside algebras are 0-based (they index `basis`); object
//! numbers, idempotent numbers and matrix rows/columns are 1-based, matching
//! the expression language.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bicat::{hcompose, Basic, Bicategory, BicatError, OneMorphism};
use crate::builtin::{self, BuiltinError, KxDiff};
use crate::category::PdgCategory;
use crate::expr::{eval_expr, parse_expr};
use crate::gflin::{Field, Scalar};
use crate::pdgalg::{validate_algebra, RawAlgebra, Violation};
use crate::twisted::{HomMatrix, TwistedError, TwistedMorphism, TwistedObject};

/// One term of a sparse element: `[basis, coeff]`, or `[left, right, coeff]`
/// for an element of a tensor product `A_i ⊗ A_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Term {
    Tensor(usize, usize, i64),
    Single(usize, i64),
}

/// A matrix entry, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryData {
    pub row: usize,
    pub col: usize,
    pub value: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub basis: Vec<(String, i64)>,
    pub unit: Vec<i64>,
    #[serde(default)]
    pub mul: Vec<(usize, usize, usize, i64)>,
    #[serde(default)]
    pub diff: Vec<(usize, usize, i64)>,
    pub idempotents: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radical: Option<Vec<Vec<i64>>>,
}

/// A twisted object over the idempotents of one algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectEntry {
    pub name: String,
    #[serde(default = "one")]
    pub algebra: usize,
    /// `(idempotent, shift)`, idempotents numbered within the algebra
    pub gens: Vec<(usize, i64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub twist: Vec<EntryData>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismEntry {
    pub name: String,
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub degree: i64,
    #[serde(default)]
    pub entries: Vec<EntryData>,
}

/// A 1-morphism: an untwisted expression for its summands plus a twist
/// whose entries are bimodule elements (tensor terms for `P` targets).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneMorphismEntry {
    pub name: String,
    pub summands: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub twist: Vec<EntryData>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub p: u64,
    pub algebras: Vec<AlgebraEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<ObjectEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub morphisms: Vec<MorphismEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub one_morphisms: Vec<OneMorphismEntry>,
}

fn write_value(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let flat = v.to_string();
    let nested_containers = match v {
        Value::Array(xs) => xs.iter().any(|x| x.as_array().is_some_and(|a| a.iter().any(|y| y.is_array() || y.is_object()))),
        Value::Object(m) => m.values().any(|x| x.is_object()),
        _ => false,
    };
    if flat.len() + indent <= 96 && !nested_containers {
        // serde_json's compact form has no spaces after separators
        let mut spaced = String::with_capacity(flat.len());
        let (mut in_str, mut escaped) = (false, false);
        for c in flat.chars() {
            spaced.push(c);
            if in_str {
                match (escaped, c) {
                    (true, _) => escaped = false,
                    (false, '\\') => escaped = true,
                    (false, '"') => in_str = false,
                    _ => {}
                }
            } else if c == '"' {
                in_str = true;
            } else if c == ',' || c == ':' {
                spaced.push(' ');
            }
        }
        out.push_str(&spaced);
        return;
    }
    let pad = " ".repeat(indent + 2);
    match v {
        Value::Array(xs) => {
            out.push_str("[\n");
            for (k, x) in xs.iter().enumerate() {
                out.push_str(&pad);
                write_value(x, indent + 2, out);
                out.push_str(if k + 1 < xs.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push(']');
        }
        Value::Object(m) => {
            out.push_str("{\n");
            for (k, (key, x)) in m.iter().enumerate() {
                out.push_str(&format!("{pad}{}: ", Value::String(key.clone())));
                write_value(x, indent + 2, out);
                out.push_str(if k + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push('}');
        }
        _ => out.push_str(&flat),
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FileError {
    #[error("malformed file: {0}")]
    Json(String),
    #[error("algebra {index} fails validation: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Algebra { index: usize, violations: Vec<Violation> },
    #[error("{0}")]
    Invalid(String),
    #[error("`{name}`: {err}")]
    Twisted { name: String, err: TwistedError },
    #[error(transparent)]
    Bicat(#[from] BicatError),
}

impl AlgebraEntry {
    pub fn to_raw(&self, p: u64) -> RawAlgebra {
        RawAlgebra {
            p,
            basis: self.basis.clone(),
            unit: self.unit.clone(),
            mul: self.mul.clone(),
            diff: self.diff.clone(),
            idempotents: self.idempotents.clone(),
            declared_radical: self.radical.clone(),
        }
    }

    pub fn from_raw(raw: &RawAlgebra, name: Option<String>) -> Self {
        AlgebraEntry {
            name,
            basis: raw.basis.clone(),
            unit: raw.unit.clone(),
            mul: raw.mul.clone(),
            diff: raw.diff.clone(),
            idempotents: raw.idempotents.clone(),
            radical: raw.declared_radical.clone(),
        }
    }
}

impl AlgebraFile {
    pub fn from_json(text: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|e| FileError::Json(e.to_string()))
    }

    /// Pretty JSON, with short arrays and entry objects kept on one line.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("file data serializes");
        let mut out = String::new();
        write_value(&v, 0, &mut out);
        out
    }

    pub fn single(raw: &RawAlgebra, name: &str) -> Self {
        AlgebraFile {
            p: raw.p,
            algebras: vec![AlgebraEntry::from_raw(raw, Some(name.into()))],
            objects: Vec::new(),
            morphisms: Vec::new(),
            one_morphisms: Vec::new(),
        }
    }
}

/// A loaded and validated file.
#[derive(Debug)]
pub struct Loaded {
    pub file: AlgebraFile,
    pub bicat: Bicategory,
    /// name → (0-based algebra, object)
    pub objects: BTreeMap<String, (usize, TwistedObject)>,
    pub morphisms: BTreeMap<String, (usize, TwistedMorphism)>,
    pub one_morphisms: BTreeMap<String, OneMorphism>,
}

fn element(f: Field, dim: usize, terms: &[Term], what: &str) -> Result<Vec<Scalar>, FileError> {
    let mut v = vec![0; dim];
    for t in terms {
        match *t {
            Term::Single(k, c) if k < dim => v[k] = f.add(v[k], f.reduce(c)),
            _ => return Err(FileError::Invalid(format!("{what}: term {t:?} does not index the basis (dimension {dim})"))),
        }
    }
    Ok(v)
}

fn tensor_element(f: Field, d1: usize, d2: usize, terms: &[Term], what: &str) -> Result<Vec<Scalar>, FileError> {
    let mut v = vec![0; d1 * d2];
    for t in terms {
        match *t {
            Term::Tensor(a, b, c) if a < d1 && b < d2 => v[a * d2 + b] = f.add(v[a * d2 + b], f.reduce(c)),
            _ => {
                return Err(FileError::Invalid(format!(
                    "{what}: term {t:?} is not a tensor term [left, right, coeff] within {d1} x {d2}"
                )))
            }
        }
    }
    Ok(v)
}

fn entry_matrix(
    cat: &PdgCategory,
    tgt: &[(usize, i64)],
    src: &[(usize, i64)],
    entries: &[EntryData],
    what: &str,
    to_ambient: impl Fn(&EntryData, usize, usize) -> Result<Vec<Scalar>, FileError>,
) -> Result<HomMatrix, FileError> {
    let mut m = HomMatrix::zero(cat, tgt, src);
    for e in entries {
        if e.row == 0 || e.row > tgt.len() || e.col == 0 || e.col > src.len() {
            return Err(FileError::Invalid(format!(
                "{what}: entry ({}, {}) is outside the {}x{} matrix",
                e.row,
                e.col,
                tgt.len(),
                src.len()
            )));
        }
        let (r, c) = (e.row - 1, e.col - 1);
        let amb = to_ambient(e, tgt[r].0, src[c].0)?;
        let v = cat.from_ambient(tgt[r].0, src[c].0, &amb).ok_or_else(|| {
            FileError::Invalid(format!(
                "{what}: entry ({}, {}) does not lie in Hom({}, {})",
                e.row,
                e.col,
                cat.object_label(src[c].0),
                cat.object_label(tgt[r].0)
            ))
        })?;
        m.set(r, c, v);
    }
    Ok(m)
}

/// Parses, validates and resolves a file.
pub fn load(text: &str) -> Result<Loaded, FileError> {
    load_file(AlgebraFile::from_json(text)?)
}

pub fn load_file(file: AlgebraFile) -> Result<Loaded, FileError> {
    if file.algebras.is_empty() {
        return Err(FileError::Invalid("the file defines no algebras".into()));
    }
    let mut algs = Vec::new();
    for (k, a) in file.algebras.iter().enumerate() {
        algs.push(validate_algebra(&a.to_raw(file.p)).map_err(|violations| FileError::Algebra { index: k + 1, violations })?);
    }
    let f = algs[0].field();
    let bicat = Bicategory::new(algs)?;
    let mut objects = BTreeMap::new();
    for o in &file.objects {
        if o.algebra == 0 || o.algebra > bicat.num_objects() {
            return Err(FileError::Invalid(format!("object `{}`: no algebra {}", o.name, o.algebra)));
        }
        let ai = o.algebra - 1;
        let alg = bicat.algebra(ai);
        let cat = bicat.module_cat(ai);
        let mut gens = Vec::new();
        for &(e, s) in &o.gens {
            if e == 0 || e > alg.num_idempotents() {
                return Err(FileError::Invalid(format!("object `{}`: no idempotent {e} in algebra {}", o.name, o.algebra)));
            }
            gens.push((e - 1, s));
        }
        let what = format!("object `{}`", o.name);
        let alpha = entry_matrix(cat, &gens, &gens, &o.twist, &what, |e, _, _| element(f, alg.dim(), &e.value, &what))?;
        let x = TwistedObject::new(cat, gens, alpha).map_err(|err| FileError::Twisted { name: o.name.clone(), err })?;
        objects.insert(o.name.clone(), (ai, x));
    }
    let mut morphisms = BTreeMap::new();
    for m in &file.morphisms {
        let find = |n: &str| {
            objects
                .get(n)
                .cloned()
                .ok_or_else(|| FileError::Invalid(format!("morphism `{}`: unknown object `{n}`", m.name)))
        };
        let ((a1, x), (a2, y)) = (find(&m.source)?, find(&m.target)?);
        if a1 != a2 {
            return Err(FileError::Invalid(format!("morphism `{}`: objects over different algebras", m.name)));
        }
        let cat = bicat.module_cat(a1);
        let dim = bicat.algebra(a1).dim();
        let what = format!("morphism `{}`", m.name);
        let entries = entry_matrix(cat, &y.gens, &x.gens, &m.entries, &what, |e, _, _| element(f, dim, &e.value, &what))?;
        let g = TwistedMorphism::new(cat, &x, &y, m.degree, entries).map_err(|err| FileError::Twisted { name: m.name.clone(), err })?;
        morphisms.insert(m.name.clone(), (a1, g));
    }
    let mut one_morphisms: BTreeMap<String, OneMorphism> = BTreeMap::new();
    for om in &file.one_morphisms {
        let what = format!("1-morphism `{}`", om.name);
        let expr = parse_expr(&om.summands).map_err(|e| FileError::Invalid(format!("{what}: {e}")))?;
        let base = eval_expr(&bicat, &expr, &one_morphisms).map_err(|e| FileError::Invalid(format!("{what}: {e}")))?;
        if base.object.is_empty() {
            return Err(FileError::Invalid(format!("{what}: no summands")));
        }
        let (i, j) = (base.source, base.target);
        let hc = bicat.homcat(i, j);
        let (di, dj) = (bicat.algebra(i).dim(), bicat.algebra(j).dim());
        let gens = base.object.gens.clone();
        let mut alpha = base.object.alpha.clone();
        if !om.twist.is_empty() {
            let extra = entry_matrix(&hc.cat, &gens, &gens, &om.twist, &what, |e, tgt, _| match hc.objects[tgt] {
                Basic::Id => element(f, di, &e.value, &what),
                Basic::P { .. } => tensor_element(f, di, dj, &e.value, &what),
            })?;
            alpha = alpha.add(&hc.cat, &extra);
        }
        let object = TwistedObject::new(&hc.cat, gens, alpha).map_err(|err| FileError::Twisted { name: om.name.clone(), err })?;
        one_morphisms.insert(om.name.clone(), OneMorphism { source: i, target: j, object, keys: base.keys.clone() });
    }
    Ok(Loaded { file, bicat, objects, morphisms, one_morphisms })
}

fn terms_single(f: Field, v: &[Scalar]) -> Vec<Term> {
    v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| Term::Single(k, f.signed(c))).collect()
}

/// Serializes a 1-morphism with its twist.
pub fn one_morphism_entry(bc: &Bicategory, name: &str, m: &OneMorphism) -> OneMorphismEntry {
    let f = bc.field();
    let parts: Vec<String> = m
        .summands(bc)
        .into_iter()
        .map(|(b, s)| {
            let l = bc.basic_label(m.source, m.target, b);
            if s == 0 {
                l
            } else {
                format!("{l}<{s}>")
            }
        })
        .collect();
    let hc = bc.homcat(m.source, m.target);
    let dj = bc.algebra(m.target).dim();
    let mut twist = Vec::new();
    for r in 0..m.object.len() {
        for c in 0..m.object.len() {
            let e = m.object.alpha.get(r, c);
            if crate::gflin::is_zero_vec(e) {
                continue;
            }
            let amb = hc.cat.to_ambient(m.object.gens[r].0, m.object.gens[c].0, e);
            let value = match m.basic(bc, r) {
                Basic::Id => terms_single(f, &amb),
                Basic::P { .. } => amb
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(k, &x)| Term::Tensor(k / dj, k % dj, f.signed(x)))
                    .collect(),
            };
            twist.push(EntryData { row: r + 1, col: c + 1, value });
        }
    }
    OneMorphismEntry { name: name.into(), summands: parts.join(" + "), twist }
}

/// Flags of the built-in examples.
#[derive(Clone, Debug)]
pub struct ExampleFlags {
    pub p: u64,
    pub n: Option<usize>,
    pub diff: KxDiff,
    pub r: usize,
    pub lambda: usize,
}

impl Default for ExampleFlags {
    fn default() -> Self {
        ExampleFlags { p: 3, n: None, diff: KxDiff::Square, r: 2, lambda: 2 }
    }
}

pub const EXAMPLE_NAMES: [&str; 4] = ["kx", "kx-unit-diff", "semisimple", "coinvariant"];

fn object(name: &str, gens: Vec<(usize, i64)>, twist: Vec<EntryData>) -> ObjectEntry {
    ObjectEntry { name: name.into(), algebra: 1, gens, twist }
}

fn add_square(file: &mut AlgebraFile) -> Result<(), FileError> {
    let loaded = load_file(file.clone())?;
    let bc = &loaded.bicat;
    let f = OneMorphism::proj(bc, 1, 1)?;
    let ff = hcompose(bc, &f, &f)?;
    file.one_morphisms.push(OneMorphismEntry { name: "F".into(), summands: "P(1,1)".into(), twist: Vec::new() });
    file.one_morphisms.push(one_morphism_entry(bc, "F2", &ff));
    Ok(())
}

/// The built-in example files.
pub fn builtin_example(name: &str, flags: &ExampleFlags) -> Result<AlgebraFile, BuiltinError> {
    let p = flags.p;
    let bad = |e: FileError| BuiltinError::OutOfRange(e.to_string());
    match name {
        "kx" | "kx-unit-diff" => {
            let n = flags.n.unwrap_or(p as usize);
            if n == 0 || n as u64 > p {
                return Err(BuiltinError::OutOfRange(format!("--n {n}: need 1 <= n <= p = {p}")));
            }
            let unit_diff = name == "kx-unit-diff";
            let raw = if unit_diff { builtin::kx_unit_diff_n_raw(p, n) } else { builtin::kx_raw(p, n, flags.diff) };
            let mut file = AlgebraFile::single(&raw, if unit_diff { "k[x]/(x^n), deg x = -2" } else { "k[x]/(x^n), deg x = 2" });
            validate_algebra(&raw).map_err(|v| bad(FileError::Algebra { index: 1, violations: v }))?;
            file.objects.push(object("e", vec![(1, 0)], Vec::new()));
            if p >= 3 {
                let twist = (1..3).map(|c| EntryData { row: c, col: c + 1, value: vec![Term::Single(0, 1)] }).collect();
                file.objects.push(object("chain", vec![(1, 0), (1, 2), (1, 4)], twist));
            }
            if !unit_diff && n >= 2 {
                // x: e → e<2> and x²: e → e<4> whenever they are ∂-closed
                let closed_x = flags.diff == KxDiff::Zero;
                let closed_x2 = n <= 3 || flags.diff == KxDiff::Zero;
                for (k, nm, ok) in [(1usize, "x", closed_x), (2, "xsq", closed_x2)] {
                    if ok && k < n {
                        let tgt = format!("e{}", 2 * k);
                        file.objects.push(object(&tgt, vec![(1, 2 * k as i64)], Vec::new()));
                        file.morphisms.push(MorphismEntry {
                            name: nm.into(),
                            source: "e".into(),
                            target: tgt,
                            degree: 0,
                            entries: vec![EntryData { row: 1, col: 1, value: vec![Term::Single(k, 1)] }],
                        });
                    }
                }
            }
            add_square(&mut file).map_err(bad)?;
            Ok(file)
        }
        "semisimple" => {
            if flags.r == 0 {
                return Err(BuiltinError::OutOfRange("--r 0: need at least one factor".into()));
            }
            let raw = builtin::semisimple_raw(p, flags.r);
            let mut file = AlgebraFile::single(&raw, "F_p^r");
            file.objects.push(object("e1", vec![(1, 0)], Vec::new()));
            Ok(file)
        }
        "coinvariant" => {
            let fam = builtin::coinvariant_family(p, flags.lambda)?;
            Ok(AlgebraFile {
                p,
                algebras: fam
                    .iter()
                    .enumerate()
                    .map(|(j, r)| AlgebraEntry::from_raw(r, Some(format!("H_({j},{})", flags.lambda))))
                    .collect(),
                objects: Vec::new(),
                morphisms: Vec::new(),
                one_morphisms: Vec::new(),
            })
        }
        other => Err(BuiltinError::UnknownName(other.into())),
    }
}
