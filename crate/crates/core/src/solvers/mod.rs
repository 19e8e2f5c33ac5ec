//! The four l1 programs:
//!
//! | program | problem |
//! |---------|---------|
//! | `P`     | `min ||g||_1` s.t. `F g = y` |
//! | `P1`    | `min ||g||_1` s.t. `||y - F g||_2 <= eta` |
//! | `DS`    | `min ||g||_1` s.t. `||F^T (y - F g)||_inf <= lambda` |
//! | `Lasso` | `min ||y - F g||_2^2 + rho ||g||_1` (no 1/2 on the quadratic) |
//!
//! `P` and `DS` are linear programs over the split `g = u - v`, `u, v >= 0`
//! and go through [`lp::solve_lp`]. The Lasso uses cyclic coordinate descent
//! followed by an exact solve on the detected active set. `P1` is solved by
//! searching the Lasso multiplier until the residual constraint is active.

mod l2;
mod lasso;
mod linear;
pub mod lp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::linalg::{norm1, norm2, norm_inf};
use crate::model::SensingMatrix;
use crate::{Error, Result};

pub use l2::l2_constrained_l1;
pub use lasso::{lasso, lasso_objective};
pub use linear::{basis_pursuit, dantzig_selector};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Simplex pivots, or coordinate-descent sweeps.
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            max_iterations: 100_000,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.feasibility_tol > 0.0 && self.optimality_tol > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter("solver tolerances must be positive".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Program {
    P,
    P1,
    Ds,
    Lasso,
}

impl Program {
    pub const ALL: [Program; 4] = [Program::P, Program::P1, Program::Ds, Program::Lasso];

    pub fn id(self) -> &'static str {
        match self {
            Program::P => "p",
            Program::P1 => "p1",
            Program::Ds => "ds",
            Program::Lasso => "lasso",
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Program {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Program::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl From<lp::LpStatus> for SolveStatus {
    fn from(s: lp::LpStatus) -> Self {
        match s {
            lp::LpStatus::Optimal => SolveStatus::Optimal,
            lp::LpStatus::Infeasible => SolveStatus::Infeasible,
            lp::LpStatus::Unbounded => SolveStatus::Unbounded,
            lp::LpStatus::IterationLimit => SolveStatus::IterationLimit,
        }
    }
}

/// Solver-specific evidence attached to a result.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// LP constraint violation at the returned point.
    pub max_violation: Option<f64>,
    /// `||g||_1` minus a weak-duality lower bound (P1).
    pub duality_gap: Option<f64>,
    /// Largest violation of the coordinate subgradient conditions (Lasso).
    pub stationarity: Option<f64>,
    /// Lasso multiplier at which the P1 constraint is active.
    pub multiplier: Option<f64>,
    /// A zero reduced cost was seen at the optimum.
    pub possibly_nonunique: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryResult {
    pub gamma_hat: Vec<f64>,
    pub program: Program,
    pub l1_norm: f64,
    pub residual_l2: f64,
    pub residual_corr_inf: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub diagnostics: Diagnostics,
}

impl RecoveryResult {
    /// Norms and residuals are recomputed from `(F, y, gamma)`.
    pub(crate) fn new(
        f: &SensingMatrix,
        y: &[f64],
        gamma_hat: Vec<f64>,
        program: Program,
        status: SolveStatus,
        iterations: usize,
        diagnostics: Diagnostics,
    ) -> Self {
        let r = residual(f, y, &gamma_hat);
        RecoveryResult {
            l1_norm: norm1(&gamma_hat),
            residual_l2: norm2(&r),
            residual_corr_inf: norm_inf(&f.apply_transpose(&r)),
            gamma_hat,
            program,
            iterations,
            status,
            diagnostics,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn to_json(&self) -> SolveJson {
        SolveJson {
            program: self.program,
            gamma_hat: self.gamma_hat.clone(),
            l1_norm: self.l1_norm,
            residuals: Residuals {
                l2: self.residual_l2,
                corr_inf: self.residual_corr_inf,
            },
            status: self.status,
            iterations: self.iterations,
        }
    }
}

impl From<SolveJson> for RecoveryResult {
    /// Rebuilds a result from saved `solve` output. Diagnostics are not
    /// stored there and come back empty.
    fn from(json: SolveJson) -> Self {
        RecoveryResult {
            gamma_hat: json.gamma_hat,
            program: json.program,
            l1_norm: json.l1_norm,
            residual_l2: json.residuals.l2,
            residual_corr_inf: json.residuals.corr_inf,
            iterations: json.iterations,
            status: json.status,
            diagnostics: Diagnostics::default(),
        }
    }
}

/// `y - F g`.
pub fn residual(f: &SensingMatrix, y: &[f64], gamma: &[f64]) -> Vec<f64> {
    f.apply(gamma).iter().zip(y).map(|(a, b)| b - a).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub l2: f64,
    pub corr_inf: f64,
}

/// Output of the `solve` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveJson {
    pub program: Program,
    pub gamma_hat: Vec<f64>,
    pub l1_norm: f64,
    pub residuals: Residuals,
    pub status: SolveStatus,
    pub iterations: usize,
}

pub(crate) fn check_dims(f: &SensingMatrix, y: &[f64]) -> Result<()> {
    if y.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Gaussian-noise thresholds `(lambda_p, eps_n)`:
/// `lambda_p = sigma sqrt(2 ln p)` and
/// `eps_n = sigma sqrt(n + 2 sqrt(n ln n))`.
pub fn gaussian_thresholds(sigma: f64, n: usize, p: usize) -> Result<(f64, f64)> {
    if n < 2 || p < 2 {
        return Err(Error::InvalidDimension(format!("need n, p >= 2, got n={n}, p={p}")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma = {sigma}")));
    }
    let (n, p) = (n as f64, p as f64);
    let lambda = sigma * (2.0 * p.ln()).sqrt();
    let eps = sigma * (n + 2.0 * (n * n.ln()).sqrt()).sqrt();
    Ok((lambda, eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(gaussian_thresholds(0.0, 10, 10).unwrap(), (0.0, 0.0));
        let (l, _) = gaussian_thresholds(1.0, 2, 1024).unwrap();
        assert!((l - 3.723_297_411_059_034).abs() < 1e-12);
        let (_, e) = gaussian_thresholds(1.0, 100, 2).unwrap();
        // sqrt(100 + 2 sqrt(100 ln 100)), evaluated independently
        assert!((e - 11.954_886_888_874_647).abs() < 1e-12);
        assert!(gaussian_thresholds(1.0, 1, 5).is_err());
        assert!(gaussian_thresholds(1.0, 5, 1).is_err());
        assert!(gaussian_thresholds(-1.0, 5, 5).is_err());
    }

    #[test]
    fn program_ids() {
        for p in Program::ALL {
            assert_eq!(p.id().parse::<Program>().unwrap(), p);
        }
        assert!("q".parse::<Program>().is_err());
    }
}
