use nalgebra::DVector;

use super::lasso::{lasso_fit, support_system};
use super::{basis_pursuit, check_dims, residual, Diagnostics, Program, RecoveryResult, SolveStatus, SolverOptions};
use crate::linalg::{dot, lstsq, norm1, norm2, norm_inf};
use crate::model::SensingMatrix;
use crate::{Error, Result};

const MAX_HALVINGS: usize = 400;
const MAX_BISECTIONS: usize = 200;

/// Weak-duality lower bound on the P1 optimum from the residual direction
/// `w = r / ||F^T r||_inf`.
fn dual_bound(f: &SensingMatrix, y: &[f64], r: &[f64], eta: f64) -> Option<f64> {
    let scale = norm_inf(&f.apply_transpose(r));
    if scale == 0.0 {
        return None;
    }
    Some((dot(r, y) - eta * norm2(r)) / scale)
}

/// On the support and signs of `gamma`, the point with `||y - F g|| = eta`
/// along the Lasso path is `g_S = a - (rho/2) b` where `G_SS a = F_S^T y`,
/// `G_SS b = s`. Returns it with its multiplier when all optimality
/// conditions check out.
fn kkt_polish(f: &SensingMatrix, y: &[f64], gamma: &[f64], eta: f64) -> Option<(Vec<f64>, f64)> {
    let support: Vec<usize> = (0..gamma.len()).filter(|&j| gamma[j] != 0.0).collect();
    if support.is_empty() {
        return None;
    }
    let (g, fs) = support_system(f, &support);
    let lu = g.lu();
    let yv = DVector::from_column_slice(y);
    let signs = DVector::from_iterator(support.len(), support.iter().map(|&j| gamma[j].signum()));
    let a = lu.solve(&(fs.transpose() * &yv))?;
    let b = lu.solve(&signs)?;
    let r0 = &yv - &fs * &a;
    let q = &fs * &b;
    let (r0sq, qsq) = (r0.norm_squared(), q.norm_squared());
    if qsq == 0.0 || r0sq > eta * eta {
        return None;
    }
    let rho = 2.0 * ((eta * eta - r0sq) / qsq).sqrt();
    if !(rho > 0.0) {
        return None;
    }
    let mut out = vec![0.0; gamma.len()];
    for (i, &j) in support.iter().enumerate() {
        let v = a[i] - rho / 2.0 * b[i];
        if v == 0.0 || v.signum() != signs[i] {
            return None;
        }
        out[j] = v;
    }
    let corr = f.apply_transpose(&residual(f, y, &out));
    let limit = rho * (1.0 + 1e-9) + 1e-12;
    if corr.iter().any(|c| 2.0 * c.abs() > limit) {
        return None;
    }
    Some((out, rho))
}

/// `min ||g||_1` subject to `||y - F g||_2 <= eta`.
///
/// `eta = 0` is delegated to basis pursuit. Otherwise the Lasso multiplier
/// is searched until the residual constraint is active and the exact KKT
/// point on the detected support is verified. If no exact point is found
/// the best feasible Lasso solution is returned with its duality gap.
pub fn l2_constrained_l1(
    f: &SensingMatrix,
    y: &[f64],
    eta: f64,
    opts: &SolverOptions,
) -> Result<RecoveryResult> {
    check_dims(f, y)?;
    opts.validate()?;
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("eta = {eta}")));
    }
    let p = f.p();
    let done = |gamma: Vec<f64>, status, iterations, diagnostics| {
        Ok(RecoveryResult::new(f, y, gamma, Program::P1, status, iterations, diagnostics))
    };
    if norm2(y) <= eta {
        return done(vec![0.0; p], SolveStatus::Optimal, 0, Diagnostics::default());
    }
    if eta == 0.0 {
        let mut r = basis_pursuit(f, y, opts)?;
        r.program = Program::P1;
        return Ok(r);
    }
    let ls = lstsq(f.entries(), &DVector::from_column_slice(y));
    if norm2(&residual(f, y, ls.as_slice())) > eta {
        return done(vec![0.0; p], SolveStatus::Infeasible, 0, Diagnostics::default());
    }

    let mut iterations = 0;
    let mut attempt = |rho: f64, warm: &[f64]| {
        let fit = lasso_fit(f, y, rho, Some(warm), opts);
        iterations += fit.sweeps;
        let polished = kkt_polish(f, y, &fit.gamma, eta);
        (fit.gamma, polished)
    };
    let exact = |gamma: Vec<f64>, rho: f64, iterations: usize| {
        let r = residual(f, y, &gamma);
        let gap = dual_bound(f, y, &r, eta).map(|d| norm1(&gamma) - d);
        done(
            gamma,
            SolveStatus::Optimal,
            iterations,
            Diagnostics {
                duality_gap: gap,
                multiplier: Some(rho),
                ..Diagnostics::default()
            },
        )
    };

    // At rho >= 2 ||F^T y||_inf the Lasso solution is zero, which violates
    // the constraint; the residual grows with rho.
    let mut hi = 2.0 * norm_inf(&f.apply_transpose(y));
    let mut warm = vec![0.0; p];
    let mut feasible: Option<(f64, Vec<f64>)> = None;
    let mut rho = hi;
    for _ in 0..MAX_HALVINGS {
        rho /= 2.0;
        let (gamma, polished) = attempt(rho, &warm);
        if let Some((g, m)) = polished {
            return exact(g, m, iterations);
        }
        if norm2(&residual(f, y, &gamma)) <= eta {
            feasible = Some((rho, gamma));
            break;
        }
        hi = rho;
        warm = gamma;
    }
    let Some((mut lo, mut best)) = feasible else {
        return done(warm, SolveStatus::IterationLimit, iterations, Diagnostics::default());
    };
    for _ in 0..MAX_BISECTIONS {
        if hi / lo <= 1.0 + 1e-14 {
            break;
        }
        let mid = (lo * hi).sqrt();
        let (gamma, polished) = attempt(mid, &best);
        if let Some((g, m)) = polished {
            return exact(g, m, iterations);
        }
        if norm2(&residual(f, y, &gamma)) <= eta {
            lo = mid;
            best = gamma;
        } else {
            hi = mid;
        }
    }

    let l1 = norm1(&best);
    let gap = dual_bound(f, y, &residual(f, y, &best), eta).map(|d| l1 - d);
    let status = match gap {
        Some(g) if g <= opts.optimality_tol * (1.0 + l1) => SolveStatus::Optimal,
        _ => SolveStatus::IterationLimit,
    };
    done(
        best,
        status,
        iterations,
        Diagnostics {
            duality_gap: gap,
            multiplier: Some(lo),
            ..Diagnostics::default()
        },
    )
}
