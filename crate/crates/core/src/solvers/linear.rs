use super::lp::{solve_lp, LpProblem, Relation};
use super::{check_dims, Diagnostics, Program, RecoveryResult, SolveStatus, SolverOptions};
use crate::model::SensingMatrix;
use crate::{Error, Result};

/// `[1; 1]` objective over `(u, v)`.
fn split_problem(p: usize) -> LpProblem {
    LpProblem::new(vec![1.0; 2 * p])
}

/// Row `a` applied to `u - v`.
fn split_row(a: impl Iterator<Item = f64> + Clone) -> Vec<f64> {
    a.clone().chain(a.map(|v| -v)).collect()
}

fn finish(
    f: &SensingMatrix,
    y: &[f64],
    lp: &LpProblem,
    program: Program,
    opts: &SolverOptions,
) -> Result<RecoveryResult> {
    let p = f.p();
    let sol = solve_lp(lp, opts)?;
    let gamma: Vec<f64> = match sol.status {
        super::lp::LpStatus::Infeasible => vec![0.0; p],
        _ => (0..p).map(|j| sol.x[j] - sol.x[p + j]).collect(),
    };
    Ok(RecoveryResult::new(
        f,
        y,
        gamma,
        program,
        SolveStatus::from(sol.status),
        sol.iterations,
        Diagnostics {
            max_violation: Some(sol.max_violation),
            possibly_nonunique: sol.degenerate_optimum,
            ..Diagnostics::default()
        },
    ))
}

/// `min ||g||_1` subject to `F g = y`.
pub fn basis_pursuit(f: &SensingMatrix, y: &[f64], opts: &SolverOptions) -> Result<RecoveryResult> {
    check_dims(f, y)?;
    let mut lp = split_problem(f.p());
    for (i, &yi) in y.iter().enumerate() {
        lp.constrain(split_row(f.entries().row(i).iter().copied()), Relation::Eq, yi);
    }
    finish(f, y, &lp, Program::P, opts)
}

/// `min ||g||_1` subject to `||F^T (y - F g)||_inf <= lambda`. With
/// `lambda = 0` the constraints become the normal equations.
pub fn dantzig_selector(
    f: &SensingMatrix,
    y: &[f64],
    lambda: f64,
    opts: &SolverOptions,
) -> Result<RecoveryResult> {
    check_dims(f, y)?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
    }
    let gram = f.gram();
    let corr = f.apply_transpose(y);
    let mut lp = split_problem(f.p());
    for (i, &c) in corr.iter().enumerate() {
        let row = split_row(gram.row(i).iter().copied());
        if lambda == 0.0 {
            lp.constrain(row, Relation::Eq, c);
        } else {
            lp.constrain(row.clone(), Relation::Le, c + lambda);
            lp.constrain(row, Relation::Ge, c - lambda);
        }
    }
    finish(f, y, &lp, Program::Ds, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::model::{Amplitude, Ensemble, SparseSignal};

    #[test]
    fn identity_recovers_y() {
        let f = SensingMatrix::identity(4).unwrap();
        let y = [1.0, -2.0, 0.0, 0.5];
        let r = basis_pursuit(&f, &y, &SolverOptions::default()).unwrap();
        assert!(r.is_optimal());
        for (a, b) in r.gamma_hat.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = dantzig_selector(&f, &y, 0.0, &SolverOptions::default()).unwrap();
        for (a, b) in r.gamma_hat.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rhs() {
        let f = SensingMatrix::generate(5, 9, &Ensemble::Gaussian, true, 1).unwrap();
        let r = basis_pursuit(&f, &[0.0; 5], &SolverOptions::default()).unwrap();
        assert!(r.is_optimal());
        assert!(r.gamma_hat.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn ds_large_lambda_gives_zero() {
        let f = SensingMatrix::generate(6, 10, &Ensemble::Gaussian, true, 2).unwrap();
        let beta = SparseSignal::generate(10, 2, &Amplitude::Unit, 3).unwrap();
        let y = f.apply(beta.values());
        let lam = crate::linalg::norm_inf(&f.apply_transpose(&y));
        let r = dantzig_selector(&f, &y, lam, &SolverOptions::default()).unwrap();
        assert!(r.is_optimal());
        assert!(r.l1_norm < 1e-12);
    }

    #[test]
    fn bp_outside_span_is_infeasible() {
        let f = SensingMatrix::from_rows(2, 2, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        let r = basis_pursuit(&f, &[1.0, 1.0], &SolverOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn bp_recovers_sparse_signal() {
        let f = SensingMatrix::generate(20, 40, &Ensemble::Gaussian, true, 7).unwrap();
        let beta = SparseSignal::generate(40, 3, &Amplitude::Uniform { a: 1.0, b: 2.0 }, 11).unwrap();
        let y = f.apply(beta.values());
        let r = basis_pursuit(&f, &y, &SolverOptions::default()).unwrap();
        assert!(r.is_optimal());
        let err: Vec<f64> = r.gamma_hat.iter().zip(beta.values()).map(|(a, b)| a - b).collect();
        assert!(norm2(&err) < 1e-6, "error {}", norm2(&err));
        assert!(r.residual_l2 <= 1e-9 * (1.0 + norm2(&y)));
    }

    #[test]
    fn rejects_bad_input() {
        let f = SensingMatrix::identity(3).unwrap();
        assert!(basis_pursuit(&f, &[1.0], &SolverOptions::default()).is_err());
        assert!(dantzig_selector(&f, &[1.0; 3], -0.1, &SolverOptions::default()).is_err());
    }
}
