//! Closed-form error-bound constants and recovery certificates.
//!
//! Every RIP-based constant is a function of `delta = delta_{ceil(1.5k)}` and
//! `theta = theta_{k, ceil(1.5k)}` through the common denominator
//! `D = 1 - delta - theta`; the constants exist only when `D > 0`. The
//! coherence route uses `t = kM` and needs `t < (2 + 2M) / (3 + sqrt 6)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::{ceil_frac, RipReport};
use crate::linalg::{norm1, norm2};
use crate::model::{best_k_term, SparseSignal};
use crate::solvers::{Program, RecoveryResult};
use crate::{Error, Result};

/// Slack on every bound comparison, absorbing solver tolerance.
pub const BOUND_SLACK: f64 = 1e-9;

const SQRT2: f64 = std::f64::consts::SQRT_2;
const SQRT3: f64 = 1.732_050_807_568_877_2;
const SQRT6: f64 = 2.449_489_742_783_178;

/// Ratio of the coherence sparsity threshold to the older
/// `(1 + M) / (4M)` threshold: `8 / (3 + sqrt 6)`.
pub const SUPPORT_ENLARGEMENT: f64 = 8.0 / (3.0 + SQRT6);

/// The recovery guarantees that carry an error bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// Basis pursuit, noiseless: `C0 k^{-1/2} ||beta_{-max(k)}||_1`.
    BpNoiseless,
    /// Dantzig selector with `||F^T z||_inf <= lambda`:
    /// `C1 sqrt(k) lambda + C2 k^{-1/2} ||beta_{-max(k)}||_1`.
    DsBounded,
    /// l2-constrained program with `||z||_2 <= eps <= eta`:
    /// `C (eta + eps) + D2 k^{-1/2} ||beta_{-max(k)}||_1`.
    P1Bounded,
    /// l2-constrained program under the coherence condition, k-sparse
    /// signals only: `C (eta + eps)` with `C` a function of `t = kM`.
    P1Coherence,
    /// Dantzig selector at `lambda_p` under Gaussian noise:
    /// `C1 sigma sqrt(k) sqrt(2 ln p) + C2 k^{-1/2} ||beta_{-max(k)}||_1`.
    DsGaussian,
    /// l2-constrained program at `eps_n` under Gaussian noise:
    /// `D1 sigma sqrt(n + 2 sqrt(n ln n)) + D2 k^{-1/2} ||beta_{-max(k)}||_1`.
    P1Gaussian,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::BpNoiseless,
        Theorem::DsBounded,
        Theorem::P1Bounded,
        Theorem::P1Coherence,
        Theorem::DsGaussian,
        Theorem::P1Gaussian,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::BpNoiseless => "bp-noiseless",
            Theorem::DsBounded => "ds-bounded",
            Theorem::P1Bounded => "p1-bounded",
            Theorem::P1Coherence => "p1-coherence",
            Theorem::DsGaussian => "ds-gaussian",
            Theorem::P1Gaussian => "p1-gaussian",
        }
    }

    /// The program whose output the bound is about.
    pub fn program(self) -> Program {
        match self {
            Theorem::BpNoiseless => Program::P,
            Theorem::DsBounded | Theorem::DsGaussian => Program::Ds,
            Theorem::P1Bounded | Theorem::P1Coherence | Theorem::P1Gaussian => Program::P1,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

impl Serialize for Theorem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for Theorem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantInputs {
    pub delta: f64,
    pub theta: f64,
    pub coherence: Option<f64>,
    pub k: usize,
    /// `kM`, coherence route only.
    pub t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantSet {
    pub theorem: Theorem,
    pub inputs: ConstantInputs,
    /// Named constants; empty when the condition fails.
    pub constants: BTreeMap<String, f64>,
    pub condition_ok: bool,
    /// All inputs came from full enumeration (or were supplied directly).
    pub exact: bool,
}

impl ConstantSet {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    fn require(&self, name: &str) -> Result<f64> {
        self.get(name)
            .ok_or_else(|| Error::InvalidParameter(format!("constant {name} missing for {}", self.theorem)))
    }

    /// Builds the constants from a computed report, using
    /// `delta_{ceil(1.5k)}`, `theta_{k, ceil(1.5k)}` and, for the coherence
    /// route, `M`.
    pub fn from_report(theorem: Theorem, report: &RipReport, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        if theorem == Theorem::P1Coherence {
            let m = report
                .coherence
                .ok_or_else(|| Error::IncompleteReport { missing: vec!["coherence".into()] })?;
            return theorem_constants(theorem, 0.0, 0.0, Some(m), k);
        }
        let k15 = ceil_frac(k, 3, 2);
        let delta = report.delta(k15);
        let theta = report.theta(k, k15);
        let mut missing = Vec::new();
        if delta.is_none() {
            missing.push(format!("delta_{k15}"));
        }
        if theta.is_none() {
            missing.push(format!("theta_{k}_{k15}"));
        }
        let (Some(delta), Some(theta)) = (delta, theta) else {
            return Err(Error::IncompleteReport { missing });
        };
        let mut set = theorem_constants(theorem, delta.value, theta.value, None, k)?;
        set.exact = delta.exact && theta.exact;
        Ok(set)
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v}")))
    }
}

/// Evaluates the constants of `theorem`. `delta` and `theta` are ignored on
/// the coherence route, which needs `m`.
pub fn theorem_constants(theorem: Theorem, delta: f64, theta: f64, m: Option<f64>, k: usize) -> Result<ConstantSet> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let mut constants = BTreeMap::new();
    if theorem == Theorem::P1Coherence {
        let m = m.ok_or_else(|| Error::InvalidParameter("coherence route needs M".into()))?;
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::InvalidParameter(format!("M = {m}")));
        }
        let t = k as f64 * m;
        let den = 2.0 + 2.0 * m - (3.0 + SQRT6) * t;
        let ok = den > 0.0;
        if ok {
            constants.insert("C".to_string(), SQRT2 * (2.0 + 3.0 * t - 2.0 * m) / den);
        }
        return Ok(ConstantSet {
            theorem,
            inputs: ConstantInputs { delta, theta, coherence: Some(m), k, t: Some(t) },
            constants,
            condition_ok: ok,
            exact: true,
        });
    }
    check_unit_interval("delta", delta)?;
    check_unit_interval("theta", theta)?;
    let d = 1.0 - delta - theta;
    let ok = d > 0.0;
    if ok {
        let c1 = 2.0 * SQRT3 / d;
        let c2 = 2.0 * SQRT2 * (1.0 - delta) / d;
        let d1 = 2.0 * SQRT2 * (1.0 + delta) / d;
        let d2 = 2.0 * SQRT2 * theta * (1.0 - delta) / d;
        let named: &[(&str, f64)] = match theorem {
            Theorem::BpNoiseless => &[("C0", c2)],
            Theorem::DsBounded | Theorem::DsGaussian => &[("C1", c1), ("C2", c2)],
            Theorem::P1Bounded => &[("C", d1 / 2.0), ("D2", d2)],
            Theorem::P1Gaussian => &[("D1", d1), ("D2", d2)],
            Theorem::P1Coherence => unreachable!(),
        };
        for (name, v) in named {
            constants.insert(name.to_string(), *v);
        }
    }
    Ok(ConstantSet {
        theorem,
        inputs: ConstantInputs { delta, theta, coherence: m, k, t: None },
        constants,
        condition_ok: ok,
        exact: true,
    })
}

/// Prior-work constants the bounds are compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `1 / sqrt(1 - M(4k - 1))`, provided `k <= (1 + M) / (4M)`.
    Coherence,
    /// `4 / (sqrt(3 - 3 delta_4k) - sqrt(1 + delta_3k))`, provided
    /// `delta_3k + 3 delta_4k < 2`.
    DeltaPair,
    /// `4 / (1 - delta_2k - theta_{k,2k})` for the Dantzig selector.
    DsRip,
    /// The same with `delta_k` in place of `delta_2k`, as originally printed.
    DsRipUncorrected,
}

impl Comparison {
    pub fn id(self) -> &'static str {
        match self {
            Comparison::Coherence => "coherence",
            Comparison::DeltaPair => "delta-pair",
            Comparison::DsRip => "ds-rip",
            Comparison::DsRipUncorrected => "ds-rip-uncorrected",
        }
    }
}

impl FromStr for Comparison {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Comparison::Coherence, Comparison::DeltaPair, Comparison::DsRip, Comparison::DsRipUncorrected]
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonInputs {
    pub coherence: Option<f64>,
    pub k: Option<usize>,
    pub delta_k: Option<f64>,
    pub delta_2k: Option<f64>,
    pub delta_3k: Option<f64>,
    pub delta_4k: Option<f64>,
    pub theta_k_2k: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConstant {
    pub source: Comparison,
    pub value: Option<f64>,
    pub condition_ok: bool,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("missing input {name}")))
}

pub fn comparison_constants(source: Comparison, inputs: &ComparisonInputs) -> Result<ComparisonConstant> {
    let value = match source {
        Comparison::Coherence => {
            let m = need(inputs.coherence, "coherence")?;
            let k = need(inputs.k, "k")? as f64;
            let inner = 1.0 - m * (4.0 * k - 1.0);
            let within = m == 0.0 || k <= (1.0 + m) / (4.0 * m);
            (within && inner > 0.0).then(|| 1.0 / inner.sqrt())
        }
        Comparison::DeltaPair => {
            let d3 = need(inputs.delta_3k, "delta_3k")?;
            let d4 = need(inputs.delta_4k, "delta_4k")?;
            let den = (3.0 - 3.0 * d4).max(0.0).sqrt() - (1.0 + d3).sqrt();
            (d3 + 3.0 * d4 < 2.0 && den > 0.0).then(|| 4.0 / den)
        }
        Comparison::DsRip | Comparison::DsRipUncorrected => {
            let delta = if source == Comparison::DsRip {
                need(inputs.delta_2k, "delta_2k")?
            } else {
                need(inputs.delta_k, "delta_k")?
            };
            let den = 1.0 - delta - need(inputs.theta_k_2k, "theta_k_2k")?;
            (den > 0.0).then(|| 4.0 / den)
        }
    };
    Ok(ComparisonConstant { source, value, condition_ok: value.is_some() })
}

/// Ratio of `(2 + 2M) / ((3 + sqrt 6) M)` to `(1 + M) / (4M)`.
pub fn support_enlargement_ratio(m: f64) -> f64 {
    crate::constants::mip_sparsity_threshold(m) / ((1.0 + m) / (4.0 * m))
}

/// The bounded-noise `C` evaluated at the coherence bounds
/// `delta <= (s - 1) M`, `theta <= sqrt(k s) M` with `s = 1.5k` (unrounded)
/// and `s = ceil(1.5k)`. The first matches the coherence-route constant;
/// the second is what composing the integer-index bounds gives.
pub fn coherence_composition(m: f64, k: usize) -> (Option<f64>, Option<f64>) {
    let compose = |s: f64| {
        let delta = (s - 1.0).max(0.0) * m;
        let theta = (k as f64 * s).sqrt() * m;
        let d = 1.0 - delta - theta;
        (d > 0.0).then(|| SQRT2 * (1.0 + delta) / d)
    };
    (compose(1.5 * k as f64), compose(ceil_frac(k, 3, 2) as f64))
}

/// Noise-level inputs to a certificate. Only the ones the theorem uses need
/// be present.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    pub eta: Option<f64>,
    pub sigma: Option<f64>,
    pub n: Option<usize>,
    pub p: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub theorem: Theorem,
    pub constants: BTreeMap<String, f64>,
    pub bound_value: f64,
    pub observed_error: f64,
    /// `k^{-1/2} ||beta_{-max(k)}||_1`.
    pub tail_term: f64,
    pub holds: bool,
    /// Some constant behind the bound is only a Monte Carlo lower bound.
    pub advisory: bool,
    pub inputs_digest: String,
}

/// The `verify` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub theorem: Theorem,
    pub bound: f64,
    pub error: f64,
    pub holds: bool,
    pub advisory: bool,
}

impl BoundCertificate {
    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            theorem: self.theorem,
            bound: self.bound_value,
            error: self.observed_error,
            holds: self.holds,
            advisory: self.advisory,
        }
    }
}

fn positive(v: Option<f64>, name: &str) -> Result<f64> {
    let v = need(v, name)?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v}")))
    }
}

/// Checks `||gamma_hat - beta||_2` against the theorem's bound. Refuses when
/// the theorem's condition does not hold or the result comes from a
/// different program.
pub fn certify(
    result: &RecoveryResult,
    truth: &SparseSignal,
    constants: &ConstantSet,
    noise: &NoiseParams,
) -> Result<BoundCertificate> {
    let theorem = constants.theorem;
    if !constants.condition_ok {
        return Err(Error::ConditionNotSatisfied(format!(
            "{theorem} condition fails for k = {}",
            constants.inputs.k
        )));
    }
    if result.program != theorem.program() {
        return Err(Error::InvalidParameter(format!(
            "{theorem} covers {} results, got {}",
            theorem.program(),
            result.program
        )));
    }
    if result.gamma_hat.len() != truth.p() {
        return Err(Error::DimensionMismatch { expected: truth.p(), found: result.gamma_hat.len() });
    }
    let k = constants.inputs.k;
    let (_, tail) = best_k_term(truth.values(), k)?;
    let tail_term = norm1(&tail) / (k as f64).sqrt();
    let sqrt_k = (k as f64).sqrt();

    let mut digest = vec![
        format!("k={k}"),
        format!("delta={}", constants.inputs.delta),
        format!("theta={}", constants.inputs.theta),
    ];
    if let Some(m) = constants.inputs.coherence {
        digest.push(format!("M={m}"));
    }
    digest.push(if constants.exact { "exact".into() } else { "monte-carlo".into() });

    let bound_value = match theorem {
        Theorem::BpNoiseless => constants.require("C0")? * tail_term,
        Theorem::DsBounded => {
            let lambda = positive(noise.lambda, "lambda")?;
            digest.push(format!("lambda={lambda}"));
            constants.require("C1")? * sqrt_k * lambda + constants.require("C2")? * tail_term
        }
        Theorem::P1Bounded | Theorem::P1Coherence => {
            let eta = positive(noise.eta, "eta")?;
            let eps = positive(noise.epsilon, "epsilon")?;
            digest.push(format!("eta={eta}"));
            digest.push(format!("epsilon={eps}"));
            let c = constants.require("C")?;
            if theorem == Theorem::P1Coherence {
                if truth.support().len() > k {
                    return Err(Error::ConditionNotSatisfied(format!(
                        "{theorem} covers only {k}-sparse signals"
                    )));
                }
                c * (eta + eps)
            } else {
                c * (eta + eps) + constants.require("D2")? * tail_term
            }
        }
        Theorem::DsGaussian => {
            let sigma = positive(noise.sigma, "sigma")?;
            let p = need(noise.p, "p")?;
            digest.push(format!("sigma={sigma}"));
            digest.push(format!("p={p}"));
            let lambda = sigma * (2.0 * (p as f64).ln()).sqrt();
            constants.require("C1")? * sqrt_k * lambda + constants.require("C2")? * tail_term
        }
        Theorem::P1Gaussian => {
            let sigma = positive(noise.sigma, "sigma")?;
            let n = need(noise.n, "n")? as f64;
            digest.push(format!("sigma={sigma}"));
            digest.push(format!("n={n}"));
            let eps = sigma * (n + 2.0 * (n * n.ln()).sqrt()).sqrt();
            constants.require("D1")? * eps + constants.require("D2")? * tail_term
        }
    };
    let diff: Vec<f64> = result.gamma_hat.iter().zip(truth.values()).map(|(a, b)| a - b).collect();
    let observed_error = norm2(&diff);
    Ok(BoundCertificate {
        theorem,
        constants: constants.constants.clone(),
        bound_value,
        observed_error,
        tail_term,
        holds: observed_error <= bound_value + BOUND_SLACK,
        advisory: !constants.exact,
        inputs_digest: digest.join(" "),
    })
}
