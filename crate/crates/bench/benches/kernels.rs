use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pdgcat::bicat::{hcompose, Bicategory, OneMorphism};
use pdgcat::builtin::{coinvariant_family, kx_raw, KxDiff};
use pdgcat::cellrep::{build_cell_rep, stable_two_hom};
use pdgcat::{validate_algebra, Field, Mat, RawAlgebra};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bicat(raws: Vec<RawAlgebra>) -> Bicategory {
    Bicategory::new(raws.iter().map(|r| validate_algebra(r).unwrap()).collect()).unwrap()
}

fn rref(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows: Vec<Vec<i64>> = (0..60).map(|_| (0..60).map(|_| rng.gen_range(0..7)).collect()).collect();
    let m = Mat::from_rows(Field::new(7).unwrap(), &rows).unwrap();
    c.bench_function("rref 60x60 over F_7", |b| b.iter(|| black_box(&m).rref()));
}

fn two_homs(c: &mut Criterion) {
    let bc = bicat(vec![kx_raw(3, 3, KxDiff::Square)]);
    let f = OneMorphism::proj(&bc, 1, 1).unwrap();
    c.bench_function("stable End(F) over k[x]/(x^3)", |b| b.iter(|| stable_two_hom(&bc, &f, &f).unwrap()));
    let ff = hcompose(&bc, &f, &f).unwrap();
    c.bench_function("stable End(F^2) over k[x]/(x^3)", |b| b.iter(|| stable_two_hom(&bc, &ff, &ff).unwrap()));
}

fn composition(c: &mut Criterion) {
    let bc = bicat(vec![kx_raw(3, 3, KxDiff::Square)]);
    let f = OneMorphism::proj(&bc, 1, 1).unwrap();
    let ff = hcompose(&bc, &f, &f).unwrap();
    c.bench_function("hcompose F^2 * F^2", |b| b.iter(|| hcompose(&bc, black_box(&ff), black_box(&ff)).unwrap()));
}

fn cell_rep(c: &mut Criterion) {
    let bc = bicat(coinvariant_family(3, 2).unwrap());
    c.bench_function("cell 2-representation, coinvariant cell 2", |b| b.iter(|| build_cell_rep(&bc, 2).unwrap()));
}

criterion_group!(benches, rref, two_homs, composition, cell_rep);
criterion_main!(benches);
