//! Built-in example algebras.

use thiserror::Error;

use crate::pdgalg::RawAlgebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuiltinError {
    #[error("unknown example {0:?}; expected one of kx, kx-unit-diff, semisimple, coinvariant")]
    UnknownName(String),
    #[error("flag out of range: {0}")]
    OutOfRange(String),
}

/// Differential on k[x]/(x^n) with deg x = 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KxDiff {
    /// ∂(x) = x²
    Square,
    /// ∂ = 0
    Zero,
}

fn power_label(k: usize) -> String {
    match k {
        0 => "1".into(),
        1 => "x".into(),
        _ => format!("x^{k}"),
    }
}

fn truncated_polynomial(p: u64, n: usize, deg_x: i64) -> RawAlgebra {
    let basis = (0..n).map(|k| (power_label(k), deg_x * k as i64)).collect();
    let mut mul = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i + j < n {
                mul.push((i, j, i + j, 1));
            }
        }
    }
    let mut unit = vec![0; n];
    unit[0] = 1;
    RawAlgebra {
        p,
        basis,
        unit: unit.clone(),
        mul,
        diff: Vec::new(),
        idempotents: vec![unit],
        declared_radical: None,
    }
}

/// k[x]/(x^n) with deg x = 2.
pub fn kx_raw(p: u64, n: usize, diff: KxDiff) -> RawAlgebra {
    let mut raw = truncated_polynomial(p, n, 2);
    if diff == KxDiff::Square {
        // ∂(x^k) = k x^(k+1)
        raw.diff = (1..n.saturating_sub(1)).map(|k| (k, k + 1, k as i64)).collect();
    }
    raw
}

/// k[x]/(x^n) with deg x = -2 and ∂(x) = 1.
pub fn kx_unit_diff_n_raw(p: u64, n: usize) -> RawAlgebra {
    let mut raw = truncated_polynomial(p, n, -2);
    // ∂(x^k) = k x^(k-1)
    raw.diff = (1..n).map(|k| (k, k - 1, k as i64)).collect();
    raw
}

pub fn kx_unit_diff_raw(p: u64) -> RawAlgebra {
    kx_unit_diff_n_raw(p, p as usize)
}

/// F_p^r with its r coordinate idempotents.
pub fn semisimple_raw(p: u64, r: usize) -> RawAlgebra {
    let basis = (1..=r).map(|i| (format!("e{i}"), 0)).collect();
    let mul = (0..r).map(|i| (i, i, i, 1)).collect();
    let idempotents = (0..r)
        .map(|i| {
            let mut v = vec![0; r];
            v[i] = 1;
            v
        })
        .collect();
    RawAlgebra { p, basis, unit: vec![1; r], mul, diff: Vec::new(), idempotents, declared_radical: None }
}

fn matrix_units(p: u64, degrees: [i64; 4]) -> RawAlgebra {
    // basis E11, E12, E21, E22; E_ab E_cd = δ_bc E_ad
    let names = ["E11", "E12", "E21", "E22"];
    let idx = |a: usize, b: usize| a * 2 + b;
    let mut mul = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            for d in 0..2 {
                mul.push((idx(a, b), idx(b, d), idx(a, d), 1));
            }
        }
    }
    RawAlgebra {
        p,
        basis: names.iter().zip(degrees).map(|(n, d)| (n.to_string(), d)).collect(),
        unit: vec![1, 0, 0, 1],
        mul,
        diff: Vec::new(),
        idempotents: vec![vec![1, 0, 0, 0], vec![0, 0, 0, 1]],
        declared_radical: None,
    }
}

/// The 2×2 matrix algebra in degree 0 with ∂ = 0 and idempotents E11, E22.
pub fn matrix2_raw(p: u64) -> RawAlgebra {
    matrix_units(p, [0, 0, 0, 0])
}

/// The 2×2 matrix algebra with deg E12 = 2, deg E21 = -2, ∂ = [E12, -], and
/// only the unit declared as idempotent (E11 is not ∂-closed).
pub fn matrix2_graded_raw(p: u64) -> RawAlgebra {
    let mut raw = matrix_units(p, [0, 2, -2, 0]);
    // ∂E11 = -E12, ∂E22 = E12, ∂E21 = E11 - E22, ∂E12 = 0
    raw.diff = vec![(0, 1, -1), (3, 1, 1), (2, 0, 1), (2, 3, -1)];
    raw.idempotents = vec![vec![1, 0, 0, 1]];
    raw
}

/// The factors H_{j,λ} of the coinvariant family for λ ≤ 2.
pub fn coinvariant_family(p: u64, lambda: usize) -> Result<Vec<RawAlgebra>, BuiltinError> {
    if lambda > 2 {
        return Err(BuiltinError::OutOfRange(format!(
            "coinvariant --lambda {lambda}: factors H_(j,lambda) with 2 <= j <= lambda-2 or j = lambda-1 >= 2 \
             need a user-supplied differential; only lambda <= 2 is built in"
        )));
    }
    let mut out = Vec::new();
    for j in 0..=lambda {
        if j == 0 || j == lambda {
            out.push(semisimple_raw(p, 1));
        } else {
            out.push(kx_raw(p, lambda, KxDiff::Square));
        }
    }
    Ok(out)
}
