#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use sparsekit_core::constants::{check_condition, ConditionVariant, RipOptions, RipReport};
use sparsekit_core::seed;
use sparsekit_core::SensingMatrix;

/// Sylvester Hadamard matrix of order `n` (a power of two).
pub fn hadamard(n: usize) -> DMatrix<f64> {
    assert!(n.is_power_of_two());
    DMatrix::from_fn(n, n, |i, j| if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
}

/// `[I_n | H_n / sqrt n]` truncated to `p` columns, perturbed entrywise by
/// `noise * N(0,1)` and column-normalised.
pub fn hadamard_frame(n: usize, p: usize, noise: f64, seed_value: u64) -> SensingMatrix {
    assert!(p <= 2 * n);
    let h = hadamard(n) / (n as f64).sqrt();
    let mut rng = seed::rng(seed_value);
    let m = DMatrix::from_fn(n, p, |i, j| {
        let base = if j < n {
            if i == j { 1.0 } else { 0.0 }
        } else {
            h[(i, j - n)]
        };
        base + noise * rng.sample::<f64, _>(StandardNormal)
    });
    SensingMatrix::from_dmatrix(m).unwrap().column_normalize().unwrap()
}

/// A frame whose `delta_{ceil(1.5k)} + theta_{k, ceil(1.5k)} < 1` is
/// certified by exact enumeration, with its report.
pub fn certified_instance(k: usize, n: usize, p: usize, seed_value: u64) -> (SensingMatrix, RipReport) {
    let f = hadamard_frame(n, p, 1e-3, seed_value);
    let report = RipReport::for_conditions(&f, &[k], &[ConditionVariant::Rip15], &RipOptions::default()).unwrap();
    let c = check_condition(&report, k, ConditionVariant::Rip15).unwrap();
    assert!(c.certified_holds(), "instance not certified: {c:?}");
    (f, report)
}

pub fn l2_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
