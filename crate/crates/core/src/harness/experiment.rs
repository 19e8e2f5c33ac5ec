use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::bounds::{certify, ConstantSet, NoiseParams, Theorem};
use crate::constants::{ConditionVariant, RipOptions, RipReport};
use crate::linalg::{norm1, norm2, norm_inf};
use crate::model::{observe, NoiseSpec, Observation, SensingMatrix, SparseSignal};
use crate::solvers::{
    basis_pursuit, dantzig_selector, gaussian_thresholds, l2_constrained_l1, lasso, Program,
    RecoveryResult, SolveStatus, SolverOptions,
};
use crate::{seed, Result};

/// A trial succeeds when `||gamma_hat - beta||_2` is at most this.
pub const SUCCESS_THRESHOLD: f64 = 1e-6;

const MATRIX_STREAM: u64 = 0x6d61_7472_6978;
const RIP_STREAM: u64 = 0x7269_70;
const LASSO_RHO_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateVerdict {
    pub theorem: Theorem,
    pub bound: f64,
    pub holds: bool,
    pub advisory: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub k: usize,
    pub regime: String,
    pub program: Program,
    pub trial: usize,
    pub seed: u64,
    pub observed_error: Option<f64>,
    pub l1_truth: f64,
    pub l1_estimate: Option<f64>,
    pub status: Option<SolveStatus>,
    /// Module error that stopped the trial, if any.
    pub error: Option<String>,
    pub certificates: Vec<CertificateVerdict>,
    /// Seconds spent solving and certifying.
    pub wall_time: f64,
}

impl TrialRecord {
    pub fn success(&self) -> bool {
        self.status == Some(SolveStatus::Optimal)
            && self.observed_error.is_some_and(|e| e <= SUCCESS_THRESHOLD)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub k: usize,
    pub regime: String,
    pub program: Program,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_error: Option<f64>,
    pub max_error: Option<f64>,
    /// Fraction of non-advisory certificates that held; `None` when no
    /// theorem applied.
    pub cert_pass_rate: Option<f64>,
    pub certificates: usize,
}

/// A trial that did not produce an optimal solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub k: usize,
    pub regime: String,
    pub program: Program,
    pub trial: usize,
    pub seed: u64,
    pub reason: String,
}

/// Aggregates only; wall times live in the trial records so that this table
/// is reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub matrix_id: String,
    pub seed: u64,
    pub cells: Vec<CellSummary>,
    pub failures: Vec<FailureRecord>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub table: ResultsTable,
    pub records: Vec<TrialRecord>,
    pub rip: Option<RipReport>,
}

/// Program parameters for one regime.
#[derive(Clone, Copy, Debug)]
struct Params {
    lambda: f64,
    eta: f64,
    rho: f64,
    /// Declared bound on `||z||_2`.
    eps: Option<f64>,
}

fn derive_params(cfg: &ExperimentConfig, f: &SensingMatrix, noise: &NoiseSpec) -> Result<Params> {
    let max_norm = f.column_norms().iter().copied().fold(0.0, f64::max);
    let (lambda, eta, eps) = match *noise {
        NoiseSpec::Noiseless => (0.0, 0.0, Some(0.0)),
        NoiseSpec::L2Bounded { epsilon } => (max_norm * epsilon, epsilon, Some(epsilon)),
        NoiseSpec::CorrelationBounded { lambda } => (lambda, lambda, None),
        NoiseSpec::Gaussian { sigma } => {
            let (l, e) = gaussian_thresholds(sigma, f.n().max(2), f.p().max(2))?;
            (l, e, None)
        }
    };
    let o = &cfg.parameters;
    let lambda = o.lambda.unwrap_or(lambda);
    Ok(Params {
        lambda,
        eta: o.eta.unwrap_or(eta),
        rho: o.rho.unwrap_or((2.0 * lambda).max(LASSO_RHO_FLOOR)),
        eps,
    })
}

fn solve(
    program: Program,
    f: &SensingMatrix,
    y: &[f64],
    params: &Params,
    opts: &SolverOptions,
) -> Result<RecoveryResult> {
    match program {
        Program::P => basis_pursuit(f, y, opts),
        Program::Ds => dantzig_selector(f, y, params.lambda, opts),
        Program::P1 => l2_constrained_l1(f, y, params.eta, opts),
        Program::Lasso => lasso(f, y, params.rho, opts),
    }
}

/// Noise parameters for `theorem` when it covers this trial, judged from the
/// realised noise.
fn applicable(
    theorem: Theorem,
    program: Program,
    noise: &NoiseSpec,
    obs: &Observation,
    f: &SensingMatrix,
    params: &Params,
) -> Option<NoiseParams> {
    if theorem.program() != program {
        return None;
    }
    let z = &obs.realized_noise;
    let z_l2 = norm2(z);
    let z_corr = norm_inf(&f.apply_transpose(z));
    let gaussian = match *noise {
        NoiseSpec::Gaussian { sigma } => gaussian_thresholds(sigma, f.n(), f.p()).ok().map(|t| (sigma, t)),
        _ => None,
    };
    match theorem {
        Theorem::BpNoiseless => (z_l2 == 0.0).then(NoiseParams::default),
        Theorem::DsBounded => (z_corr <= params.lambda).then(|| NoiseParams {
            lambda: Some(params.lambda),
            ..NoiseParams::default()
        }),
        Theorem::P1Bounded | Theorem::P1Coherence => {
            let eps = params.eps.or(gaussian.map(|(_, (_, e))| e))?;
            (z_l2 <= eps && eps <= params.eta).then(|| NoiseParams {
                eta: Some(params.eta),
                epsilon: Some(eps),
                ..NoiseParams::default()
            })
        }
        Theorem::DsGaussian => {
            let (sigma, (lambda_p, _)) = gaussian?;
            (params.lambda == lambda_p && z_corr <= lambda_p).then(|| NoiseParams {
                sigma: Some(sigma),
                p: Some(f.p()),
                ..NoiseParams::default()
            })
        }
        Theorem::P1Gaussian => {
            let (sigma, (_, eps_n)) = gaussian?;
            (params.eta == eps_n && z_l2 <= eps_n).then(|| NoiseParams {
                sigma: Some(sigma),
                n: Some(f.n()),
                ..NoiseParams::default()
            })
        }
    }
}

struct Instance<'a> {
    k: usize,
    noise: &'a NoiseSpec,
    params: Params,
    trial: usize,
    seed: u64,
}

fn run_instance(
    cfg: &ExperimentConfig,
    f: &SensingMatrix,
    inst: &Instance<'_>,
    constants: &BTreeMap<(Theorem, usize), ConstantSet>,
    opts: &SolverOptions,
) -> Vec<TrialRecord> {
    let regime = inst.noise.label();
    let blank = |program: Program, error: String| TrialRecord {
        k: inst.k,
        regime: regime.clone(),
        program,
        trial: inst.trial,
        seed: inst.seed,
        observed_error: None,
        l1_truth: 0.0,
        l1_estimate: None,
        status: None,
        error: Some(error),
        certificates: Vec::new(),
        wall_time: 0.0,
    };
    let setup = SparseSignal::generate(f.p(), inst.k, &cfg.signal.amplitude, seed::derive(inst.seed, &[0]))
        .and_then(|beta| Ok((observe(f, &beta, inst.noise, seed::derive(inst.seed, &[1]))?, beta)));
    let (obs, beta) = match setup {
        Ok(v) => v,
        Err(e) => return cfg.programs.iter().map(|&p| blank(p, e.to_string())).collect(),
    };
    cfg.programs
        .iter()
        .map(|&program| {
            let start = Instant::now();
            let result = match solve(program, f, &obs.y, &inst.params, opts) {
                Ok(r) => r,
                Err(e) => return blank(program, e.to_string()),
            };
            let diff: Vec<f64> = result.gamma_hat.iter().zip(beta.values()).map(|(a, b)| a - b).collect();
            let mut certificates = Vec::new();
            if result.is_optimal() {
                for &theorem in &cfg.theorems {
                    let Some(set) = constants.get(&(theorem, inst.k)) else { continue };
                    let Some(noise) = applicable(theorem, program, inst.noise, &obs, f, &inst.params) else {
                        continue;
                    };
                    if let Ok(cert) = certify(&result, &beta, set, &noise) {
                        certificates.push(CertificateVerdict {
                            theorem,
                            bound: cert.bound_value,
                            holds: cert.holds,
                            advisory: cert.advisory,
                        });
                    }
                }
            }
            TrialRecord {
                k: inst.k,
                regime: regime.clone(),
                program,
                trial: inst.trial,
                seed: inst.seed,
                observed_error: Some(norm2(&diff)),
                l1_truth: norm1(beta.values()),
                l1_estimate: Some(result.l1_norm),
                status: Some(result.status),
                error: None,
                certificates,
                wall_time: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

/// Constant sets for every requested theorem and sparsity level whose
/// constants can be computed. Theorems whose condition fails are kept, and
/// `certify` refuses them.
fn theorem_constants(
    cfg: &ExperimentConfig,
    f: &SensingMatrix,
) -> Result<(Option<RipReport>, BTreeMap<(Theorem, usize), ConstantSet>)> {
    let mut sets = BTreeMap::new();
    if cfg.theorems.is_empty() {
        return Ok((None, sets));
    }
    let opts = RipOptions {
        budget: cfg.constants.budget,
        mc_trials: cfg.constants.mc_trials,
        seed: seed::derive(cfg.seed, &[RIP_STREAM]),
    };
    let ks: Vec<usize> = cfg.signal.k.iter().copied().filter(|&k| k >= 1).collect();
    let report = RipReport::for_conditions(f, &ks, &[ConditionVariant::Rip15], &opts)?;
    for &theorem in &cfg.theorems {
        for &k in &ks {
            if let Ok(set) = ConstantSet::from_report(theorem, &report, k) {
                sets.insert((theorem, k), set);
            }
        }
    }
    Ok((Some(report), sets))
}

fn summarize(k: usize, regime: &str, program: Program, records: &[&TrialRecord]) -> CellSummary {
    let trials = records.len();
    let successes = records.iter().filter(|r| r.success()).count();
    let errors: Vec<f64> = records.iter().filter_map(|r| r.observed_error).collect();
    let certs: Vec<&CertificateVerdict> =
        records.iter().flat_map(|r| &r.certificates).filter(|c| !c.advisory).collect();
    CellSummary {
        k,
        regime: regime.to_string(),
        program,
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
        mean_error: (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64),
        max_error: errors.iter().copied().reduce(f64::max),
        cert_pass_rate: (!certs.is_empty())
            .then(|| certs.iter().filter(|c| c.holds).count() as f64 / certs.len() as f64),
        certificates: certs.len(),
    }
}

/// Runs every `(k, regime, trial)` instance through every program. The
/// instance seed is derived from the base seed and the instance's grid
/// position, so all programs see the same signal and noise and the thread
/// schedule cannot change any number.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let spec = &cfg.matrix;
    let f = SensingMatrix::generate(
        spec.n,
        spec.p,
        &spec.ensemble,
        spec.normalize,
        seed::derive(cfg.seed, &[MATRIX_STREAM]),
    )?;
    let (rip, constants) = theorem_constants(cfg, &f)?;
    let opts = SolverOptions::default();

    let mut instances = Vec::new();
    for (ki, &k) in cfg.signal.k.iter().enumerate() {
        for (ni, noise) in cfg.noise.iter().enumerate() {
            let params = derive_params(cfg, &f, noise)?;
            let cell = (ki * cfg.noise.len() + ni) as u64;
            for trial in 0..cfg.trials {
                instances.push(Instance {
                    k,
                    noise,
                    params,
                    trial,
                    seed: seed::derive(cfg.seed, &[cell, trial as u64]),
                });
            }
        }
    }
    let per_instance: Vec<Vec<TrialRecord>> = instances
        .par_iter()
        .map(|inst| run_instance(cfg, &f, inst, &constants, &opts))
        .collect();

    let mut records: Vec<TrialRecord> = per_instance.into_iter().flatten().collect();
    let program_rank = |p: Program| cfg.programs.iter().position(|&q| q == p).unwrap_or(usize::MAX);
    let regime_rank =
        |r: &str| cfg.noise.iter().position(|n| n.label() == r).unwrap_or(usize::MAX);
    let k_rank = |k: usize| cfg.signal.k.iter().position(|&q| q == k).unwrap_or(usize::MAX);
    records.sort_by_key(|r| (k_rank(r.k), regime_rank(&r.regime), program_rank(r.program), r.trial));

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for chunk in records.chunk_by(|a, b| (a.k, &a.regime, a.program) == (b.k, &b.regime, b.program)) {
        let first = &chunk[0];
        let refs: Vec<&TrialRecord> = chunk.iter().collect();
        cells.push(summarize(first.k, &first.regime, first.program, &refs));
        for r in chunk {
            let reason = match (&r.error, r.status) {
                (Some(e), _) => e.clone(),
                (None, Some(SolveStatus::Optimal)) => continue,
                (None, Some(s)) => format!("solver status {s:?}"),
                (None, None) => "no result".into(),
            };
            failures.push(FailureRecord {
                k: r.k,
                regime: r.regime.clone(),
                program: r.program,
                trial: r.trial,
                seed: r.seed,
                reason,
            });
        }
    }
    Ok(ExperimentOutput {
        table: ResultsTable { matrix_id: f.matrix_id(), seed: cfg.seed, cells, failures },
        records,
        rip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    #[test]
    fn orthonormal_noiseless_always_succeeds() {
        let cfg = config(
            r#"{
            "matrix": {"n": 6, "p": 6, "ensemble": "gaussian", "normalize": true},
            "signal": {"k": [1, 3, 6], "amplitude": {"uniform": {"a": 1.0, "b": 2.0}}},
            "noise": [{"regime": "noiseless"}],
            "programs": ["p", "ds", "p1"],
            "trials": 4, "seed": 3
        }"#,
        );
        // a square Gaussian matrix is invertible, so y determines beta
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.table.cells.len(), 9);
        for c in &out.table.cells {
            assert_eq!(c.success_rate, 1.0, "{c:?}");
        }
        assert!(out.table.failures.is_empty());
    }

    #[test]
    fn deterministic_and_certified() {
        let cfg = config(
            r#"{
            "matrix": {"n": 12, "p": 16},
            "signal": {"k": [1], "amplitude": "unit"},
            "noise": [{"regime": "noiseless"}, {"regime": "l2_bounded", "epsilon": 0.01}],
            "programs": ["p", "ds", "p1", "lasso"],
            "trials": 5, "seed": 11,
            "theorems": ["bp-noiseless", "ds-bounded", "p1-bounded", "p1-coherence"]
        }"#,
        );
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.table, b.table);
        let errs = |o: &ExperimentOutput| o.records.iter().map(|r| r.observed_error.map(f64::to_bits)).collect::<Vec<_>>();
        assert_eq!(errs(&a), errs(&b));
        for c in &a.table.cells {
            if let Some(rate) = c.cert_pass_rate {
                assert_eq!(rate, 1.0, "{c:?}");
            }
        }
    }
}
