//! Command-line front end. `run_command` does all the work so tests can
//! drive it without spawning processes.

pub mod report;

use std::collections::BTreeMap;

use clap::{Parser, Subcommand, ValueEnum};
use pdgcat::bicat::{compute_cells, strong_regularity, Bicategory, OneMorphism};
use pdgcat::builtin::KxDiff;
use pdgcat::category::PdgCategory;
use pdgcat::cellrep::{
    build_cell_rep, build_identity_cell_rep, compare_with_natural, maximality_check, stable_two_hom,
};
use pdgcat::expr::{eval_expr, parse_expr};
use pdgcat::filtration::{canonical_filtration, verify_fantastic};
use pdgcat::format::{builtin_example, load, AlgebraFile, ExampleFlags, FileError, Loaded};
use pdgcat::gflin::{format_qpoly, graded_dim};
use pdgcat::homotopy::{cone, is_closed, stable_hom_all, HomComplex};
use pdgcat::pdgalg::{h_decompose, iso_classes, radical, Violation};
use pdgcat::twisted::{tensor_indecomposable, validate_twisted, TwistedObject};
use pdgcat::{HModuleData, PdgAlgebra, RawAlgebra};
use serde_json::json;

use report::{Report, Table};

/// Exit status and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "pdgcat", version, about = "Stable categories of p-dg algebras and their 2-categories of projective bimodules")]
struct Cli {
    /// Print reports as JSON instead of text tables
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the algebra axioms and every named object in FILE
    Validate { file: String },
    /// Jacobson radical, its ∂-stability, centre and idempotent classes
    Radical { file: String },
    /// Left, right and two-sided cells of the 2-category of projective bimodules
    Cells {
        file: String,
        /// Leave out identity 1-morphisms (needed when some centre is not local)
        #[arg(long)]
        projective_only: bool,
    },
    /// The cell 2-representation of a left cell, compared with the natural one
    Cellrep {
        file: String,
        /// `P(s,t)` or `t` for the left cell of all `P(-,t)`, or `Id(i)`
        #[arg(long)]
        cell: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// 2-morphism spaces between two 1-morphism expressions
    TwoHom {
        file: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Stable 2-morphisms (closed modulo null-homotopic)
        #[arg(long)]
        stable: bool,
        #[arg(long, allow_hyphen_values = true)]
        min_degree: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        max_degree: Option<i64>,
    },
    /// The cone of a named Z-morphism and its structure maps
    Cone {
        file: String,
        #[arg(long)]
        morphism: String,
    },
    /// X ⊗ V_i⟨s⟩ for a named object or a 1-morphism expression
    TensorH {
        file: String,
        #[arg(long)]
        object: String,
        #[arg(long)]
        vi: usize,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
    },
    /// The canonical fantastic filtration of a named object or 1-morphism
    Fantastic {
        file: String,
        #[arg(long)]
        object: String,
    },
    /// Print a built-in example file
    Example {
        #[arg(value_parser = ["kx", "kx-unit-diff", "semisimple", "coinvariant"])]
        name: String,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = DiffArg::Xsq)]
        diff: DiffArg,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        lambda: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DiffArg {
    Xsq,
    Zero,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure::Domain(e.to_string())
    }
}

type CmdResult = Result<Report, Failure>;

/// Runs one invocation; `args[0]` is the program name. `stdin` is read when
/// FILE is `-`.
pub fn run_command<S: AsRef<str>>(args: &[S], stdin: &str) -> Outcome {
    let cli = match Cli::try_parse_from(args.iter().map(|a| a.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    if let Command::Example { name, p, n, diff, r, lambda } = &cli.command {
        let flags = ExampleFlags {
            p: *p,
            n: *n,
            diff: match diff {
                DiffArg::Xsq => KxDiff::Square,
                DiffArg::Zero => KxDiff::Zero,
            },
            r: *r,
            lambda: *lambda,
        };
        return match builtin_example(name, &flags) {
            Ok(file) => Outcome { code: 0, stdout: file.to_json() + "\n", stderr: String::new() },
            Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
        };
    }
    let result = dispatch(&cli.command, stdin);
    match result {
        Ok(rep) => {
            let stdout = if cli.json { format!("{:#}\n", rep.to_json()) } else { rep.render() };
            Outcome { code: if rep.ok { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err(Failure::Usage(m)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {m}\n") },
        Err(Failure::Domain(m)) => {
            let stdout = if cli.json {
                format!("{:#}\n", json!({ "ok": false, "error": m }))
            } else {
                String::new()
            };
            Outcome { code: 1, stdout, stderr: format!("error: {m}\n") }
        }
    }
}

fn read_input(file: &str, stdin: &str) -> Result<String, Failure> {
    if file == "-" {
        Ok(stdin.to_string())
    } else {
        std::fs::read_to_string(file).map_err(|e| Failure::Usage(format!("cannot read {file}: {e}")))
    }
}

fn open(file: &str, stdin: &str) -> Result<Loaded, Failure> {
    Ok(load(&read_input(file, stdin)?)?)
}

fn dispatch(cmd: &Command, stdin: &str) -> CmdResult {
    match cmd {
        Command::Validate { file } => validate(&read_input(file, stdin)?),
        Command::Radical { file } => radical_report(&open(file, stdin)?),
        Command::Cells { file, projective_only } => cells(&open(file, stdin)?, *projective_only),
        Command::Cellrep { file, cell, samples, seed } => cellrep(&open(file, stdin)?, cell, *samples, *seed),
        Command::TwoHom { file, from, to, stable, min_degree, max_degree } => {
            two_hom(&open(file, stdin)?, from, to, *stable, (*min_degree, *max_degree))
        }
        Command::Cone { file, morphism } => cone_report(&open(file, stdin)?, morphism),
        Command::TensorH { file, object, vi, shift } => tensor_h(&open(file, stdin)?, object, *vi, *shift),
        Command::Fantastic { file, object } => fantastic(&open(file, stdin)?, object),
        Command::Example { .. } => unreachable!("handled before dispatch"),
    }
}

fn qpoly(degrees: impl IntoIterator<Item = i64>) -> String {
    format_qpoly(&graded_dim(degrees))
}

fn h_type(parts: &[(usize, i64)]) -> String {
    let mut count: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    for &p in parts {
        *count.entry(p).or_default() += 1;
    }
    let terms: Vec<String> = count
        .iter()
        .map(|(&(i, s), &c)| {
            let v = if s == 0 { format!("V{i}") } else { format!("V{i}<{s}>") };
            if c == 1 {
                v
            } else {
                format!("{c}{v}")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn witness(raw: &RawAlgebra, v: &Violation) -> String {
    let l = |i: &usize| raw.basis.get(*i).map_or_else(|| format!("#{i}"), |b| b.0.clone());
    match v {
        Violation::Grading { i, j, k } | Violation::Associativity { i, j, k } => {
            format!("b{i} = {}, b{j} = {}, b{k} = {}", l(i), l(j), l(k))
        }
        Violation::Leibniz { i, j } => format!("(b{i}, b{j}) = ({}, {})", l(i), l(j)),
        Violation::DiffGrading { i, k } => format!("b{i} = {}, b{k} = {}", l(i), l(k)),
        Violation::Unit { i } | Violation::Nilpotency { i } => format!("b{i} = {}", l(i)),
        Violation::IdempotentProduct { i, j } => format!("e{i}, e{j}"),
        Violation::IdempotentNotClosed { i } | Violation::IdempotentDegree { i } => format!("e{i}"),
        _ => String::new(),
    }
}

fn validate(text: &str) -> CmdResult {
    let file = AlgebraFile::from_json(text)?;
    let mut rep = Report::new("validate");
    rep.field("p", file.p);
    rep.field("algebras", file.algebras.len());
    match pdgcat::format::load_file(file.clone()) {
        Err(FileError::Algebra { index, violations }) => {
            rep.ok = false;
            rep.field("valid", false);
            rep.field("failing algebra", index);
            let raw = file.algebras[index - 1].to_raw(file.p);
            let mut t = Table::new("violations", &["violation", "witness"]);
            for v in &violations {
                t.row(vec![v.to_string(), witness(&raw, v)]);
            }
            rep.table(t);
            Ok(rep)
        }
        Err(e) => Err(e.into()),
        Ok(loaded) => {
            rep.field("valid", true);
            let mut t = Table::new("algebras", &["#", "name", "dim", "graded dim", "idempotents", "as H-module"]);
            for (k, a) in file.algebras.iter().enumerate() {
                let alg = loaded.bicat.algebra(k);
                let h = h_decompose(&HModuleData::from_algebra(alg)).map_err(|e| Failure::Domain(e.to_string()))?;
                t.row(vec![
                    (k + 1).to_string(),
                    a.name.clone().unwrap_or_default(),
                    alg.dim().to_string(),
                    qpoly(alg.space().degrees()),
                    alg.num_idempotents().to_string(),
                    h_type(&h),
                ]);
            }
            rep.table(t);
            let mut t = Table::new("named data", &["kind", "name", "value"]);
            for (name, (a, x)) in &loaded.objects {
                t.row(vec![format!("object over {}", a + 1), name.clone(), x.describe(loaded.bicat.module_cat(*a))]);
            }
            for (name, (a, g)) in &loaded.morphisms {
                let cat = loaded.bicat.module_cat(*a);
                let closed = if is_closed(cat, g) { "closed" } else { "not closed" };
                t.row(vec![
                    "morphism".into(),
                    name.clone(),
                    format!("{} -> {}, degree {}, {closed}", g.source.describe(cat), g.target.describe(cat), g.degree),
                ]);
            }
            for (name, m) in &loaded.one_morphisms {
                t.row(vec![format!("1-morphism {} -> {}", m.source + 1, m.target + 1), name.clone(), m.describe(&loaded.bicat)]);
            }
            rep.table(t);
            Ok(rep)
        }
    }
}

fn radical_report(l: &Loaded) -> CmdResult {
    let bc = &l.bicat;
    let mut rep = Report::new("radical");
    let mut t = Table::new("radicals", &["#", "dim", "graded dim", "d-stable", "centre", "idempotent classes"]);
    let mut bases = Table::new("radical bases", &["#", "element"]);
    for k in 0..bc.num_objects() {
        let alg: &PdgAlgebra = bc.algebra(k);
        let rad = radical(alg).map_err(|e| Failure::Domain(e.to_string()))?;
        let degs: Vec<i64> = rad.basis.iter().map(|v| alg.homogeneous_degree(v).unwrap_or(0)).collect();
        let classes = iso_classes(alg).map_err(|e| Failure::Domain(e.to_string()))?;
        let classes: Vec<String> = classes
            .iter()
            .map(|c| format!("{{{}}}", c.iter().map(|e| format!("e{}", e + 1)).collect::<Vec<_>>().join(", ")))
            .collect();
        t.row(vec![
            (k + 1).to_string(),
            rad.basis.len().to_string(),
            qpoly(degs),
            if rad.diff_stable { "yes" } else { "no" }.into(),
            qpoly(alg.center().iter().map(|c| c.1)),
            classes.join(" "),
        ]);
        for v in &rad.basis {
            bases.row(vec![(k + 1).to_string(), alg.format_elem(v)]);
        }
        if !rad.diff_stable {
            rep.ok = false;
        }
    }
    rep.table(t);
    rep.table(bases);
    Ok(rep)
}

fn labels(cs_labels: &[String], idx: &[usize]) -> String {
    idx.iter().map(|&a| cs_labels[a].as_str()).collect::<Vec<_>>().join(", ")
}

fn cells(l: &Loaded, projective_only: bool) -> CmdResult {
    let bc = &l.bicat;
    let (inds, cs) = match compute_cells(bc, !projective_only) {
        Ok(x) => x,
        Err(pdgcat::bicat::BicatError::NonLocalIdentity(i)) => {
            return Err(Failure::Domain(format!(
                "the centre of algebra {i} is not local, so Id({i}) is decomposable; \
                 split the algebra into blocks or pass --projective-only"
            )))
        }
        Err(e) => return Err(Failure::Domain(e.to_string())),
    };
    let mut rep = Report::new("cells");
    rep.field("objects", bc.num_objects());
    rep.field("identities included", !projective_only);
    rep.field("indecomposables", inds.len());
    rep.field("left cells", cs.left_cells.len());
    rep.field("right cells", cs.right_cells.len());
    rep.field("two-sided cells", cs.two_sided_cells.len());
    rep.field("strongly regular", strong_regularity(&cs));
    let mut t = Table::new("indecomposable 1-morphisms", &["label", "source", "target", "also"]);
    for x in &inds {
        t.row(vec![x.label.clone(), (x.source + 1).to_string(), (x.target + 1).to_string(), x.aliases.join(", ")]);
    }
    rep.table(t);
    let mut t = Table::new("cells", &["kind", "#", "members"]);
    for (kind, list) in [("left", &cs.left_cells), ("right", &cs.right_cells), ("two-sided", &cs.two_sided_cells)] {
        for (k, c) in list.iter().enumerate() {
            t.row(vec![kind.into(), (k + 1).to_string(), labels(&cs.labels, c)]);
        }
    }
    rep.table(t);
    let mut t = Table::new("two-sided order (strict)", &["greater", "smaller"]);
    let js = &cs.two_sided_cells;
    for (a, ca) in js.iter().enumerate() {
        for (b, cb) in js.iter().enumerate() {
            if a != b && cs.j_geq(ca[0], cb[0]) {
                t.row(vec![format!("J{} = {{{}}}", a + 1, labels(&cs.labels, ca)), format!("J{} = {{{}}}", b + 1, labels(&cs.labels, cb))]);
            }
        }
    }
    rep.table(t);
    Ok(rep)
}

enum CellChoice {
    Proj(usize),
    Id(usize),
}

fn parse_cell(bc: &Bicategory, text: &str) -> Result<CellChoice, Failure> {
    let s = text.trim();
    if let Ok(t) = s.parse::<usize>() {
        return Ok(CellChoice::Proj(t));
    }
    match parse_expr(s) {
        Ok(pdgcat::expr::Expr::P(_, t)) => Ok(CellChoice::Proj(t)),
        Ok(pdgcat::expr::Expr::Id(i)) => {
            bc.check_object(i - 1).map_err(|e| Failure::Domain(e.to_string()))?;
            Ok(CellChoice::Id(i))
        }
        _ => Err(Failure::Usage(format!("--cell {text:?}: expected `P(s,t)`, `t` or `Id(i)`"))),
    }
}

fn dims_row(d: &BTreeMap<i64, i64>) -> String {
    format_qpoly(d)
}

fn cellrep(l: &Loaded, cell: &str, samples: usize, seed: u64) -> CmdResult {
    let bc = &l.bicat;
    match parse_cell(bc, cell)? {
        CellChoice::Id(i) => {
            let r = build_identity_cell_rep(bc, i - 1).map_err(|e| Failure::Domain(e.to_string()))?;
            let mut rep = Report::new(format!("cell 2-representation of Id({i})"));
            rep.field("End(Id)", dims_row(&r.center_dims));
            rep.field("ideal", dims_row(&r.ideal_dims));
            rep.field("quotient", dims_row(&r.quotient_dims));
            Ok(rep)
        }
        CellChoice::Proj(tg) => {
            let data = build_cell_rep(bc, tg).map_err(|e| Failure::Domain(e.to_string()))?;
            let mut rep = Report::new(format!("cell 2-representation {}", data.label));
            rep.field("source object", data.source + 1);
            rep.field("generators", data.generators.iter().map(|g| g.label.clone()).collect::<Vec<_>>().join(", "));
            rep.field("radical of e_t A e_t", data.radical.len());
            let c = &data.checks;
            rep.field("ideal d-stable", c.diff_stable);
            rep.field("ideal closed under composition", c.composition_stable);
            rep.field("ideal closed under the action", c.action_stable);
            rep.field("identities survive", c.identities_survive);
            let max = maximality_check(bc, &data, seed, samples);
            rep.field("maximality samples", max.tested);
            rep.field("maximal", max.is_maximal());
            let cmp = compare_with_natural(bc, &data);
            rep.field("natural comparison mismatches", cmp.mismatches());
            let mut t = Table::new("hom spaces", &["from", "to", "dim", "ideal", "quotient"]);
            for h in &data.homs {
                t.row(vec![
                    data.generators[h.from].label.clone(),
                    data.generators[h.to].label.clone(),
                    h.dim.to_string(),
                    qpoly(h.ideal.iter().map(|x| x.1)),
                    dims_row(&h.quotient_dims()),
                ]);
            }
            rep.table(t);
            let mut t = Table::new("comparison with the natural representation", &["object", "from", "to", "cell", "natural", "bijective", "d", "composition"]);
            let yn = |b: bool| if b { "ok" } else { "MISMATCH" }.to_string();
            for pc in &cmp.pairs {
                t.row(vec![
                    (pc.object + 1).to_string(),
                    pc.from.clone(),
                    pc.to.clone(),
                    dims_row(&pc.cell_dims),
                    dims_row(&pc.natural_dims),
                    yn(pc.bijective),
                    yn(pc.diff_match),
                    yn(pc.composition_match),
                ]);
            }
            rep.table(t);
            let mut t = Table::new("action on generators", &["1-morphism", "generator", "cell", "natural", "match"]);
            let fmt = |v: &[(usize, i64)], cell: bool| {
                let terms: Vec<String> = v
                    .iter()
                    .map(|&(s, sh)| {
                        let g = if cell { format!("P({s},{tg})") } else { format!("e{s}") };
                        if sh == 0 {
                            g
                        } else {
                            format!("{g}<{sh}>")
                        }
                    })
                    .collect();
                if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join(" + ")
                }
            };
            for a in &cmp.actions {
                t.row(vec![a.functor.clone(), a.generator.clone(), fmt(&a.cell, true), fmt(&a.natural, false), yn(a.ok())]);
            }
            rep.table(t);
            for f in max.failures.iter().take(10) {
                rep.field("maximality failure", f.clone());
            }
            rep.ok = c.all() && max.is_maximal() && cmp.mismatches() == 0;
            Ok(rep)
        }
    }
}

fn one_morphism(l: &Loaded, text: &str, flag: &str) -> Result<OneMorphism, Failure> {
    let e = parse_expr(text).map_err(|e| Failure::Usage(format!("{flag} {text:?}: {e}")))?;
    eval_expr(&l.bicat, &e, &l.one_morphisms).map_err(|e| Failure::Domain(format!("{flag} {text:?}: {e}")))
}

fn two_hom(l: &Loaded, from: &str, to: &str, stable: bool, window: (Option<i64>, Option<i64>)) -> CmdResult {
    let bc = &l.bicat;
    let m = one_morphism(l, from, "--from")?;
    let n = one_morphism(l, to, "--to")?;
    if (m.source, m.target) != (n.source, n.target) {
        return Err(Failure::Domain(format!(
            "{from} is a 1-morphism {} -> {} but {to} is {} -> {}",
            m.source + 1,
            m.target + 1,
            n.source + 1,
            n.target + 1
        )));
    }
    let inside = |d: i64| window.0.is_none_or(|lo| d >= lo) && window.1.is_none_or(|hi| d <= hi);
    let mut rep = Report::new(if stable { "stable 2-morphisms" } else { "2-morphisms" });
    rep.field("from", m.describe(bc));
    rep.field("to", n.describe(bc));
    let sth = stable_two_hom(bc, &m, &n).map_err(|e| Failure::Domain(e.to_string()))?;
    let hc = &sth.complex;
    if stable {
        let pieces: Vec<_> = sth.pieces.iter().filter(|s| inside(s.degree)).collect();
        let total: usize = pieces.iter().map(|s| s.dim()).sum();
        rep.field("total dimension (all shifts)", total);
        rep.field("graded dimension", qpoly(pieces.iter().flat_map(|s| std::iter::repeat_n(s.degree, s.dim()))));
        let mut t = Table::new("representatives", &["degree", "representative"]);
        for s in &pieces {
            for r in &s.representatives {
                t.row(vec![s.degree.to_string(), sth.format(bc.field(), r)]);
            }
        }
        rep.table(t);
    } else {
        let degs: Vec<i64> = hc.degrees().into_iter().filter(|&d| inside(d)).collect();
        rep.field("dimension", degs.iter().map(|&d| hc.degree_indices(d).len()).sum::<usize>());
        rep.field("graded dimension", qpoly(hc.space.degrees().into_iter().filter(|&d| inside(d))));
        let mut t = Table::new("by degree", &["degree", "dim", "closed", "null-homotopic", "stable"]);
        for d in degs {
            let cyc = hc.cycles(d).len();
            let bnd = hc.boundaries(d, bc.field().p() as usize).len();
            t.row(vec![d.to_string(), hc.degree_indices(d).len().to_string(), cyc.to_string(), bnd.to_string(), (cyc - bnd).to_string()]);
        }
        rep.table(t);
    }
    Ok(rep)
}

/// A named object of some module category, or a 1-morphism expression.
struct Resolved<'a> {
    cat: &'a PdgCategory,
    object: TwistedObject,
    ends: Option<(usize, usize)>,
}

impl Resolved<'_> {
    fn describe(&self, bc: &Bicategory, x: &TwistedObject) -> String {
        match self.ends {
            Some((source, target)) => OneMorphism::new(source, target, x.clone()).describe(bc),
            None => x.describe(self.cat),
        }
    }
}

fn resolve<'a>(l: &'a Loaded, name: &str) -> Result<Resolved<'a>, Failure> {
    if let Some((a, x)) = l.objects.get(name) {
        return Ok(Resolved { cat: l.bicat.module_cat(*a), object: x.clone(), ends: None });
    }
    let m = one_morphism(l, name, "--object")?;
    let cat = m.category(&l.bicat);
    Ok(Resolved { cat, object: m.object, ends: Some((m.source, m.target)) })
}

fn stable_end_dim(cat: &PdgCategory, x: &TwistedObject) -> usize {
    stable_hom_all(cat, x, x).iter().map(|s| s.dim()).sum()
}

fn cone_report(l: &Loaded, name: &str) -> CmdResult {
    let (a, f) = l.morphisms.get(name).ok_or_else(|| Failure::Domain(format!("unknown morphism `{name}`")))?;
    let cat = l.bicat.module_cat(*a);
    let c = cone(cat, f).map_err(|e| Failure::Domain(format!("`{name}`: {e}")))?;
    let mut rep = Report::new(format!("cone of {name}"));
    rep.field("morphism", format!("{} -> {}", f.source.describe(cat), f.target.describe(cat)));
    rep.field("cone", c.object.describe(cat));
    let valid = validate_twisted(cat, &c.object);
    rep.field("valid twisted object", valid.is_ok());
    let mut t = Table::new("structure maps", &["map", "from", "to", "closed"]);
    for (nm, g) in [("v", &c.v), ("r", &c.r), ("u", &c.u), ("q", &c.q), ("iota", &c.iota)] {
        t.row(vec![nm.into(), g.source.describe(cat), g.target.describe(cat), if is_closed(cat, g) { "yes" } else { "no" }.to_string()]);
    }
    rep.table(t);
    let rv = c.r.compose(cat, &c.v).is_zero();
    let qi = c.q.compose(cat, &c.iota).is_zero();
    rep.field("r v = 0", rv);
    rep.field("q iota = 0", qi);
    let hc = HomComplex::new(cat, &c.object, &c.object);
    let end: BTreeMap<i64, i64> =
        stable_hom_all(cat, &c.object, &c.object).iter().map(|s| (s.degree, s.dim() as i64)).collect();
    rep.field("stable End(cone)", format_qpoly(&end));
    rep.field("End(cone) dimension", hc.dim());
    let closed = [&c.v, &c.r, &c.u, &c.q, &c.iota].iter().all(|g| is_closed(cat, g));
    rep.ok = valid.is_ok() && closed && rv && qi;
    Ok(rep)
}

fn tensor_h(l: &Loaded, name: &str, vi: usize, shift: i64) -> CmdResult {
    let r = resolve(l, name)?;
    let p = r.cat.p() as usize;
    if vi >= p {
        return Err(Failure::Usage(format!("--vi {vi}: need 0 <= i <= p-1 = {}", p - 1)));
    }
    let y = tensor_indecomposable(r.cat, &r.object, vi, shift);
    let mut rep = Report::new(format!("{name} tensor V{vi}<{shift}>"));
    rep.field("object", r.describe(&l.bicat, &r.object));
    rep.field("result", r.describe(&l.bicat, &y));
    rep.field("generators", y.len());
    let valid = validate_twisted(r.cat, &y);
    rep.field("valid twisted object", valid.is_ok());
    if let Err(v) = &valid {
        rep.field("violation", v.to_string());
    }
    rep.field("stable End dimension", stable_end_dim(r.cat, &y));
    rep.ok = valid.is_ok();
    Ok(rep)
}

fn fantastic(l: &Loaded, name: &str) -> CmdResult {
    let r = resolve(l, name)?;
    let cert = canonical_filtration(r.cat, &r.object);
    let check = verify_fantastic(r.cat, &cert);
    let mut rep = Report::new(format!("fantastic filtration of {name}"));
    rep.field("object", r.describe(&l.bicat, &r.object));
    rep.field("steps", cert.pieces.len());
    rep.field("verified", check.is_ok());
    if let Err(v) = &check {
        rep.field("violation", v.to_string());
    }
    let mut t = Table::new("subquotients", &["i", "piece"]);
    for (k, x) in cert.pieces.iter().enumerate() {
        t.row(vec![(k + 1).to_string(), r.describe(&l.bicat, x)]);
    }
    rep.table(t);
    rep.ok = check.is_ok();
    Ok(rep)
}
