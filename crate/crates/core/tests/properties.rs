mod common;

use common::*;
use pdgcat::bicat::{hcompose, Bicategory, OneMorphism};
use pdgcat::builtin::{coinvariant_family, kx_raw, KxDiff};
use pdgcat::expr::{parse_expr, Expr};
use pdgcat::format::{load, one_morphism_entry, AlgebraEntry, AlgebraFile};
use pdgcat::twisted::validate_twisted;
use pdgcat::{validate_algebra, Field, Mat, RawAlgebra};
use proptest::prelude::*;
use rand::Rng;

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (1usize..4).prop_map(Expr::Id),
        (1usize..4, 1usize..4).prop_map(|(s, t)| Expr::P(s, t)),
        "[a-z][a-z0-9_]{0,4}".prop_map(Expr::Name),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), -6i64..7).prop_map(|(e, n)| Expr::Shift(Box::new(e), n)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Compose(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Sum(Box::new(a), Box::new(b))),
        ]
    })
}

fn family(which: u8) -> Vec<RawAlgebra> {
    match which % 3 {
        0 => vec![kx_raw(3, 3, KxDiff::Square)],
        1 => vec![kx_raw(3, 3, KxDiff::Zero)],
        _ => coinvariant_family(3, 2).unwrap(),
    }
}

fn bicat(raws: &[RawAlgebra]) -> Bicategory {
    Bicategory::new(raws.iter().map(|r| validate_algebra(r).unwrap()).collect()).unwrap()
}

/// Sum of one or two shifted basic 1-morphisms, occasionally composed once more.
fn random_one(bc: &Bicategory, i: usize, j: usize, rng: &mut impl Rng, depth: u32) -> OneMorphism {
    let mut choices = Vec::new();
    if i == j {
        choices.push(OneMorphism::identity(bc, i).unwrap());
    }
    for s in 0..bc.algebra(j).num_idempotents() {
        for t in 0..bc.algebra(i).num_idempotents() {
            choices.push(OneMorphism::proj(bc, bc.global(j, s), bc.global(i, t)).unwrap());
        }
    }
    let mut out = OneMorphism::zero(i, j);
    for _ in 0..rng.gen_range(1..=2) {
        let b = choices[rng.gen_range(0..choices.len())].shift(2 * rng.gen_range(-1..=1));
        out = out.direct_sum(bc, &b).unwrap();
    }
    if depth > 0 && rng.gen_bool(0.5) {
        let k = rng.gen_range(0..bc.num_objects());
        let m = random_one(bc, k, j, rng, depth - 1);
        let c = hcompose(bc, &m, &random_one(bc, i, k, rng, depth - 1)).unwrap();
        if !c.object.is_empty() {
            return c;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parser_never_panics(text in "[ -~]{0,40}") {
        let _ = parse_expr(&text);
    }

    #[test]
    fn parser_never_panics_on_near_misses(text in "[IdP()0-9,+*<> -]{0,30}") {
        if let Err(e) = parse_expr(&text) {
            prop_assert!(e.pos <= text.len());
        }
    }

    #[test]
    fn printed_expressions_parse_back(e in expr_strategy()) {
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn rank_plus_nullity(rows in 1usize..7, cols in 1usize..7, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let f = Field::new(5).unwrap();
        let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..5)).collect()).collect();
        let m = Mat::from_rows(f, &data).unwrap();
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
        let b = m.mul_vec(&(0..cols).map(|_| rng.gen_range(0..5)).collect::<Vec<_>>());
        let x = m.solve(&b).unwrap().expect("b is in the image");
        prop_assert_eq!(m.mul_vec(&x), b);
    }

    #[test]
    fn hcompose_is_associative(which in any::<u8>(), seed in any::<u64>()) {
        let bc = bicat(&family(which));
        let mut rng = rng(seed);
        let n = bc.num_objects();
        let (i, j, k, l) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        // one factor may already be a composite; three of them get slow
        let deep = rng.gen_range(0..3);
        let a = random_one(&bc, k, l, &mut rng, (deep == 0) as u32);
        let b = random_one(&bc, j, k, &mut rng, (deep == 1) as u32);
        let c = random_one(&bc, i, j, &mut rng, (deep == 2) as u32);
        let left = hcompose(&bc, &hcompose(&bc, &a, &b).unwrap(), &c).unwrap();
        let right = hcompose(&bc, &a, &hcompose(&bc, &b, &c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert!(validate_twisted(left.category(&bc), &left.object).is_ok());
        let unit = OneMorphism::identity(&bc, i).unwrap();
        prop_assert_eq!(hcompose(&bc, &c, &unit).unwrap(), c);
    }

    #[test]
    fn one_morphisms_survive_the_file_format(which in any::<u8>(), seed in any::<u64>()) {
        let raws = family(which);
        let bc = bicat(&raws);
        let mut rng = rng(seed);
        let n = bc.num_objects();
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let m = random_one(&bc, i, j, &mut rng, 1);
        let file = AlgebraFile {
            p: 3,
            algebras: raws.iter().map(|r| AlgebraEntry::from_raw(r, None)).collect(),
            objects: vec![],
            morphisms: vec![],
            one_morphisms: vec![one_morphism_entry(&bc, "M", &m)],
        };
        let text = file.to_json();
        prop_assert_eq!(&AlgebraFile::from_json(&text).unwrap(), &file);
        let loaded = load(&text).unwrap();
        prop_assert_eq!(&loaded.one_morphisms["M"], &m);
    }
}
