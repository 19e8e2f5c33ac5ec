use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::norm_inf;
use crate::model::SensingMatrix;
use crate::solvers::gaussian_thresholds;
use crate::{seed, Error, Result};

const CHUNK: usize = 1_000;
const MIN_TRIALS: usize = 1_000;

/// Empirical frequencies of the two Gaussian events against their lower
/// bounds `1 - 1/(2 sqrt(pi ln p))` and `1 - 1/n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub n: usize,
    pub p: usize,
    pub sigma: f64,
    pub trials: usize,
    pub lambda_p: f64,
    pub eps_n: f64,
    /// Frequency of `||F^T z||_inf <= lambda_p`.
    pub corr_frequency: f64,
    pub corr_bound: f64,
    pub corr_margin: f64,
    /// Two-sided union bound `1 - 1/sqrt(pi ln p)`.
    pub corr_union_bound: f64,
    pub corr_union_margin: f64,
    /// Frequency of `||z||_2 <= eps_n`.
    pub l2_frequency: f64,
    pub l2_bound: f64,
    pub l2_margin: f64,
}

impl TailReport {
    pub fn corr_ok(&self) -> bool {
        self.corr_frequency >= self.corr_bound - self.corr_margin
    }

    pub fn corr_union_ok(&self) -> bool {
        self.corr_frequency >= self.corr_union_bound - self.corr_union_margin
    }

    pub fn l2_ok(&self) -> bool {
        self.l2_frequency >= self.l2_bound - self.l2_margin
    }
}

/// Three binomial standard errors at success probability `q`.
fn margin(q: f64, trials: usize) -> f64 {
    3.0 * (q * (1.0 - q) / trials as f64).sqrt()
}

/// Draws `trials` vectors `z ~ N(0, sigma^2 I_n)` and counts both events.
/// Draws are split into fixed chunks with derived seeds, so the counts do
/// not depend on the thread count.
pub fn validate_tails(f: &SensingMatrix, sigma: f64, trials: usize, seed: u64) -> Result<TailReport> {
    if !f.unit_columns() {
        return Err(Error::NonUnitColumns);
    }
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let (n, p) = (f.n(), f.p());
    let (lambda_p, eps_n) = gaussian_thresholds(sigma, n, p)?;
    let chunks = trials.div_ceil(CHUNK);
    let (corr_hits, l2_hits) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed::rng(seed::derive(seed, &[c as u64]));
            let count = CHUNK.min(trials - c * CHUNK);
            let mut hits = (0usize, 0usize);
            let mut z = vec![0.0; n];
            for _ in 0..count {
                for v in z.iter_mut() {
                    *v = sigma * rng.sample::<f64, _>(StandardNormal);
                }
                if norm_inf(&f.apply_transpose(&z)) <= lambda_p {
                    hits.0 += 1;
                }
                if z.iter().map(|v| v * v).sum::<f64>().sqrt() <= eps_n {
                    hits.1 += 1;
                }
            }
            hits
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let corr_bound = 1.0 - 1.0 / (2.0 * (std::f64::consts::PI * (p as f64).ln()).sqrt());
    let corr_union_bound = 1.0 - 1.0 / (std::f64::consts::PI * (p as f64).ln()).sqrt();
    let l2_bound = 1.0 - 1.0 / n as f64;
    Ok(TailReport {
        n,
        p,
        sigma,
        trials,
        lambda_p,
        eps_n,
        corr_frequency: corr_hits as f64 / trials as f64,
        corr_bound,
        corr_margin: margin(corr_bound, trials),
        corr_union_bound,
        corr_union_margin: margin(corr_union_bound, trials),
        l2_frequency: l2_hits as f64 / trials as f64,
        l2_bound,
        l2_margin: margin(l2_bound, trials),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Ensemble;

    #[test]
    fn zero_sigma_always_inside() {
        let f = SensingMatrix::generate(5, 8, &Ensemble::Gaussian, true, 1).unwrap();
        let r = validate_tails(&f, 0.0, 1_000, 2).unwrap();
        assert_eq!((r.corr_frequency, r.l2_frequency), (1.0, 1.0));
    }

    #[test]
    fn bound_constant_pinned() {
        let f = SensingMatrix::generate(4, 200, &Ensemble::Gaussian, true, 1).unwrap();
        let r = validate_tails(&f, 1.0, 1_000, 2).unwrap();
        // 1 - 1/(2 sqrt(pi ln 200)), evaluated independently
        assert!((r.corr_bound - 0.877_446_397_044_116_6).abs() < 1e-12);
        assert_eq!(r.l2_bound, 0.75);
    }

    #[test]
    fn rejects_bad_input() {
        let raw = SensingMatrix::generate(4, 6, &Ensemble::Gaussian, false, 1).unwrap();
        assert!(matches!(validate_tails(&raw, 1.0, 1_000, 0), Err(Error::NonUnitColumns)));
        let f = raw.column_normalize().unwrap();
        assert!(validate_tails(&f, 1.0, 999, 0).is_err());
    }

    #[test]
    fn one_sided_bound_fails_for_orthonormal_columns() {
        // F^T z has independent N(0,1) entries, so the event has probability
        // (1 - 2Q(sqrt(2 ln p)))^p, about 0.797 at p = 200
        let f = SensingMatrix::identity(200).unwrap();
        let r = validate_tails(&f, 1.0, 20_000, 5).unwrap();
        assert!((r.corr_frequency - 0.797).abs() < 0.01, "{r:?}");
        assert!(!r.corr_ok());
        assert!(r.corr_union_ok());
    }

    #[test]
    fn frequencies_clear_bounds() {
        let f = SensingMatrix::generate(30, 60, &Ensemble::Gaussian, true, 4).unwrap();
        let a = validate_tails(&f, 1.0, 5_000, 9).unwrap();
        assert!(a.corr_union_ok() && a.l2_ok(), "{a:?}");
        assert_eq!(a, validate_tails(&f, 1.0, 5_000, 9).unwrap());
    }
}
