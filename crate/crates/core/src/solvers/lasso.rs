use nalgebra::{DMatrix, DVector};

use super::{check_dims, residual, Diagnostics, Program, RecoveryResult, SolveStatus, SolverOptions};
use crate::linalg::{dot, norm1};
use crate::model::SensingMatrix;
use crate::{Error, Result};

/// Sweeps between active-set polish attempts.
const POLISH_EVERY: usize = 10;
/// Ratio between consecutive multipliers on the continuation path.
const PATH_FACTOR: f64 = 0.5;

/// `||y - F g||_2^2 + rho ||g||_1`.
pub fn lasso_objective(f: &SensingMatrix, y: &[f64], gamma: &[f64], rho: f64) -> f64 {
    let r = residual(f, y, gamma);
    dot(&r, &r) + rho * norm1(gamma)
}

fn soft(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Largest violation of the subgradient conditions, in units of the
/// gradient `2 F^T r`.
pub(crate) fn stationarity(f: &SensingMatrix, y: &[f64], gamma: &[f64], rho: f64) -> f64 {
    let r = residual(f, y, gamma);
    let g = f.apply_transpose(&r);
    gamma
        .iter()
        .zip(&g)
        .map(|(&gj, &cj)| {
            let grad = 2.0 * cj;
            if gj != 0.0 {
                (grad - rho * gj.signum()).abs()
            } else {
                (grad.abs() - rho).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Gram system on a support: returns `(G_SS, F_S)`.
pub(crate) fn support_system(f: &SensingMatrix, support: &[usize]) -> (DMatrix<f64>, DMatrix<f64>) {
    let fs = f.entries().select_columns(support);
    (fs.transpose() * &fs, fs)
}

/// Solves `G_SS g_S = F_S^T y - (rho/2) s` and accepts the result when the
/// signs and the off-support conditions are consistent.
fn polish(f: &SensingMatrix, y: &[f64], gamma: &[f64], rho: f64) -> Option<Vec<f64>> {
    let support: Vec<usize> = (0..gamma.len()).filter(|&j| gamma[j] != 0.0).collect();
    if support.is_empty() {
        return None;
    }
    let (g, fs) = support_system(f, &support);
    let yv = DVector::from_column_slice(y);
    let signs = DVector::from_iterator(support.len(), support.iter().map(|&j| gamma[j].signum()));
    let rhs = fs.transpose() * yv - signs.scale(rho / 2.0);
    let sol = crate::linalg::solve(g, &rhs)?;
    let mut out = vec![0.0; gamma.len()];
    for (i, &j) in support.iter().enumerate() {
        if sol[i] == 0.0 || sol[i].signum() != signs[i] {
            return None;
        }
        out[j] = sol[i];
    }
    Some(out)
}

pub(crate) struct LassoFit {
    pub gamma: Vec<f64>,
    pub sweeps: usize,
    pub stationarity: f64,
}

/// Coordinate descent from `start`, with periodic exact polish.
pub(crate) fn lasso_fit(
    f: &SensingMatrix,
    y: &[f64],
    rho: f64,
    start: Option<&[f64]>,
    opts: &SolverOptions,
) -> LassoFit {
    let (n, p) = (f.n(), f.p());
    let a = f.entries();
    let sq: Vec<f64> = f.column_norms().iter().map(|c| c * c).collect();
    let mut gamma = start.map_or_else(|| vec![0.0; p], <[f64]>::to_vec);
    let mut r = residual(f, y, &gamma);
    // scale for the stationarity test
    let scale = 1.0 + 2.0 * crate::linalg::norm_inf(&f.apply_transpose(y));
    let tol = opts.optimality_tol * scale;
    let mut best = stationarity(f, y, &gamma, rho);
    if best <= tol {
        return LassoFit { gamma, sweeps: 0, stationarity: best };
    }
    let mut sweeps = 0;
    while sweeps < opts.max_iterations {
        sweeps += 1;
        for j in 0..p {
            if sq[j] == 0.0 {
                continue;
            }
            let col = a.column(j);
            let old = gamma[j];
            let c = (0..n).map(|i| col[i] * r[i]).sum::<f64>() + sq[j] * old;
            let new = soft(c, rho / 2.0) / sq[j];
            if new != old {
                let d = new - old;
                for i in 0..n {
                    r[i] -= d * col[i];
                }
                gamma[j] = new;
            }
        }
        if sweeps % POLISH_EVERY == 0 || sweeps == opts.max_iterations {
            if let Some(pol) = polish(f, y, &gamma, rho) {
                let s = stationarity(f, y, &pol, rho);
                if s <= tol {
                    return LassoFit { gamma: pol, sweeps, stationarity: s };
                }
            }
            best = stationarity(f, y, &gamma, rho);
            if best <= tol {
                break;
            }
            // resynchronise the running residual
            r = residual(f, y, &gamma);
        }
    }
    LassoFit { gamma, sweeps, stationarity: best }
}

/// `min ||y - F g||_2^2 + rho ||g||_1`.
pub fn lasso(f: &SensingMatrix, y: &[f64], rho: f64, opts: &SolverOptions) -> Result<RecoveryResult> {
    check_dims(f, y)?;
    opts.validate()?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    // Warm-started path from the smallest multiplier with a zero solution
    // down to `rho`; the sweep budget is shared by all stages.
    let rho_max = 2.0 * crate::linalg::norm_inf(&f.apply_transpose(y));
    let mut stage = rho_max;
    let mut start: Option<Vec<f64>> = None;
    let mut sweeps = 0;
    let fit = loop {
        stage = (stage * PATH_FACTOR).max(rho);
        let budget = SolverOptions {
            max_iterations: opts.max_iterations - sweeps,
            ..opts.clone()
        };
        let fit = lasso_fit(f, y, stage, start.as_deref(), &budget);
        sweeps += fit.sweeps;
        if stage == rho || sweeps >= opts.max_iterations {
            break fit;
        }
        start = Some(fit.gamma);
    };
    let fit = LassoFit {
        stationarity: stationarity(f, y, &fit.gamma, rho),
        sweeps,
        gamma: fit.gamma,
    };
    let scale = 1.0 + rho_max;
    let status = if fit.stationarity <= opts.optimality_tol * scale {
        SolveStatus::Optimal
    } else {
        SolveStatus::IterationLimit
    };
    Ok(RecoveryResult::new(
        f,
        y,
        fit.gamma,
        Program::Lasso,
        status,
        fit.sweeps,
        Diagnostics {
            stationarity: Some(fit.stationarity),
            ..Diagnostics::default()
        },
    ))
}
