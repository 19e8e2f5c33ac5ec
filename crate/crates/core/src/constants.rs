//! Restricted isometry constants `delta_k`, restricted orthogonality
//! constants `theta_{k,k'}`, mutual coherence, and the recovery conditions
//! built from them.
//!
//! Exact values come from enumerating every support (or every disjoint
//! support pair) and taking extreme eigenvalues / singular values of the
//! corresponding Gram blocks. When the enumeration would exceed the budget,
//! a Monte Carlo maximum over random supports gives a lower bound instead.
//! Lower bounds can falsify a condition but never certify one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{spectral_norm, sym_eig_extremes};
use crate::model::SensingMatrix;
use crate::{seed, Error, Result};

/// Default number of support evaluations allowed for exact enumeration.
pub const DEFAULT_BUDGET: u64 = 200_000;

/// Values closer than this are treated as equal in monotonicity checks.
pub const SPECTRAL_TOL: f64 = 1e-10;

const SQRT2_MINUS_1: f64 = std::f64::consts::SQRT_2 - 1.0;

/// A constant together with whether it was obtained by full enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantValue {
    pub value: f64,
    pub exact: bool,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// `ceil(k * num / den)`, used for the fractional indices 1.5k, 1.75k, 2.5k.
pub fn ceil_frac(k: usize, num: usize, den: usize) -> usize {
    (k * num).div_ceil(den)
}

fn gram_block(gram: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| gram[(rows[i], cols[j])])
}

fn support_distortion(gram: &DMatrix<f64>, support: &[usize]) -> f64 {
    let (lo, hi) = sym_eig_extremes(gram_block(gram, support, support));
    (hi - 1.0).max(1.0 - lo).max(0.0)
}

fn pair_correlation(gram: &DMatrix<f64>, a: &[usize], b: &[usize]) -> f64 {
    spectral_norm(&gram_block(gram, a, b))
}

fn check_budget(required: u128, budget: u64) -> Result<()> {
    if required > budget as u128 {
        Err(Error::BudgetExceeded { required, budget })
    } else {
        Ok(())
    }
}

/// Exact `delta_k`: the largest deviation of a `k x k` Gram block's spectrum
/// from 1, over all supports of size `k`.
pub fn delta_exact(f: &SensingMatrix, k: usize, budget: u64) -> Result<ConstantValue> {
    let p = f.p();
    if k == 0 || k > p {
        return Err(Error::InvalidSparsity { k, p });
    }
    check_budget(binomial(p, k), budget)?;
    let gram = f.gram();
    let value = (0..p)
        .combinations(k)
        .par_bridge()
        .map(|t| support_distortion(&gram, &t))
        .reduce(|| 0.0, f64::max);
    Ok(ConstantValue { value, exact: true })
}

/// Exact `theta_{k,k'}`: the largest spectral norm of a cross-Gram block
/// `F_T^T F_T'` over disjoint supports with `|T| = k`, `|T'| = k'`.
pub fn theta_exact(f: &SensingMatrix, k: usize, kp: usize, budget: u64) -> Result<ConstantValue> {
    let p = f.p();
    if k == 0 || kp == 0 || k + kp > p {
        return Err(Error::InvalidSparsity { k: k + kp, p });
    }
    check_budget(binomial(p, k).saturating_mul(binomial(p - k, kp)), budget)?;
    let gram = f.gram();
    let value = (0..p)
        .combinations(k)
        .par_bridge()
        .map(|t| {
            let rest: Vec<usize> = (0..p).filter(|i| !t.contains(i)).collect();
            rest.into_iter()
                .combinations(kp)
                .map(|tp| pair_correlation(&gram, &t, &tp))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(ConstantValue { value, exact: true })
}

/// Monte Carlo lower bound: the maximum of the per-support quantity over
/// `trials` random supports. Estimates `delta_k` when `kp` is `None`, and
/// `theta_{k,kp}` otherwise. The first `m` supports drawn for a seed do not
/// depend on `trials`, so more trials never lowers the value.
pub fn delta_theta_mc_lower(
    f: &SensingMatrix,
    k: usize,
    kp: Option<usize>,
    trials: usize,
    seed: u64,
) -> Result<ConstantValue> {
    let p = f.p();
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let total = k + kp.unwrap_or(0);
    if k == 0 || kp == Some(0) || total > p {
        return Err(Error::InvalidSparsity { k: total, p });
    }
    let gram = f.gram();
    let mut rng = seed::rng(seed);
    let mut best = 0.0_f64;
    for _ in 0..trials {
        let idx = sample(&mut rng, p, total).into_vec();
        let v = match kp {
            None => support_distortion(&gram, &idx),
            Some(_) => pair_correlation(&gram, &idx[..k], &idx[k..]),
        };
        best = best.max(v);
    }
    Ok(ConstantValue {
        value: best,
        exact: false,
    })
}

/// Mutual coherence `M = max_{i != j} |<f_i, f_j>|`. Only defined for
/// unit-norm columns.
pub fn coherence(f: &SensingMatrix) -> Result<f64> {
    if !f.unit_columns() {
        return Err(Error::NonUnitColumns);
    }
    let gram = f.gram();
    let p = f.p();
    let mut m = 0.0_f64;
    for j in 0..p {
        for i in 0..j {
            m = m.max(gram[(i, j)].abs());
        }
    }
    Ok(m)
}

/// `sqrt(sum theta_i^2)`: the bound on `theta_{k, k_1 + ... + k_l}` from the
/// pieces `theta_{k, k_i}`. Passing `delta_{k + k_i}` values gives the
/// delta-only corollary.
pub fn theta_split_bound(thetas: &[f64]) -> Result<f64> {
    if let Some(bad) = thetas.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidParameter(format!("negative constant {bad}")));
    }
    Ok(thetas.iter().map(|t| t * t).sum::<f64>().sqrt())
}

/// Coherence-based bounds `((k-1) M, sqrt(k k') M)` on `delta_k` and
/// `theta_{k,k'}`.
pub fn mip_to_rip(m: f64, k: usize, kp: usize) -> Result<(f64, f64)> {
    if !(m >= 0.0) || k == 0 || kp == 0 {
        return Err(Error::InvalidParameter(format!("M={m}, k={k}, k'={kp}")));
    }
    Ok(((k - 1) as f64 * m, ((k * kp) as f64).sqrt() * m))
}

/// Largest sparsity admitted by the coherence condition: the supremum of
/// `(2 + 2M) / ((3 + sqrt 6) M)`.
pub fn mip_sparsity_threshold(m: f64) -> f64 {
    (2.0 + 2.0 * m) / ((3.0 + 6.0_f64.sqrt()) * m)
}

#[derive(Clone, Debug)]
pub struct RipOptions {
    pub budget: u64,
    /// Random supports per constant when enumeration is over budget.
    pub mc_trials: usize,
    pub seed: u64,
}

impl Default for RipOptions {
    fn default() -> Self {
        RipOptions {
            budget: DEFAULT_BUDGET,
            mc_trials: 2_000,
            seed: 0,
        }
    }
}

/// Tables of `delta_k` and `theta_{k,k'}` for one matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RipReport {
    pub matrix_id: String,
    pub delta: BTreeMap<usize, ConstantValue>,
    pub theta: BTreeMap<(usize, usize), ConstantValue>,
    pub coherence: Option<f64>,
    pub brute_force_limit: u64,
}

impl RipReport {
    pub fn empty(f: &SensingMatrix, budget: u64) -> Self {
        RipReport {
            matrix_id: f.matrix_id(),
            delta: BTreeMap::new(),
            theta: BTreeMap::new(),
            coherence: coherence(f).ok(),
            brute_force_limit: budget,
        }
    }

    /// Computes the requested constants, exactly where the budget allows and
    /// by Monte Carlo lower bound otherwise.
    pub fn compute(
        f: &SensingMatrix,
        deltas: &[usize],
        thetas: &[(usize, usize)],
        opts: &RipOptions,
    ) -> Result<Self> {
        let mut report = Self::empty(f, opts.budget);
        for &k in deltas {
            report.add_delta(f, k, opts)?;
        }
        for &(k, kp) in thetas {
            report.add_theta(f, k, kp, opts)?;
        }
        Ok(report)
    }

    /// Computes every constant needed to check `variants` at each `k`.
    /// Indices beyond `p` are skipped; the condition check then reports them
    /// as missing.
    pub fn for_conditions(
        f: &SensingMatrix,
        ks: &[usize],
        variants: &[ConditionVariant],
        opts: &RipOptions,
    ) -> Result<Self> {
        let mut report = Self::empty(f, opts.budget);
        let p = f.p();
        for &k in ks {
            for v in variants {
                let (ds, ts) = v.requirements(k);
                for d in ds.into_iter().filter(|&d| d >= 1 && d <= p) {
                    report.add_delta(f, d, opts)?;
                }
                for (a, b) in ts.into_iter().filter(|&(a, b)| a >= 1 && b >= 1 && a + b <= p) {
                    report.add_theta(f, a, b, opts)?;
                }
            }
        }
        Ok(report)
    }

    pub fn add_delta(&mut self, f: &SensingMatrix, k: usize, opts: &RipOptions) -> Result<()> {
        if self.delta.contains_key(&k) {
            return Ok(());
        }
        let v = match delta_exact(f, k, opts.budget) {
            Err(Error::BudgetExceeded { .. }) => delta_theta_mc_lower(
                f,
                k,
                None,
                opts.mc_trials,
                seed::derive(opts.seed, &[k as u64]),
            )?,
            other => other?,
        };
        self.delta.insert(k, v);
        Ok(())
    }

    pub fn add_theta(
        &mut self,
        f: &SensingMatrix,
        k: usize,
        kp: usize,
        opts: &RipOptions,
    ) -> Result<()> {
        if self.theta(k, kp).is_some() {
            return Ok(());
        }
        let v = match theta_exact(f, k, kp, opts.budget) {
            Err(Error::BudgetExceeded { .. }) => delta_theta_mc_lower(
                f,
                k,
                Some(kp),
                opts.mc_trials,
                seed::derive(opts.seed, &[k as u64, kp as u64]),
            )?,
            other => other?,
        };
        self.theta.insert((k, kp), v);
        Ok(())
    }

    pub fn delta(&self, k: usize) -> Option<ConstantValue> {
        self.delta.get(&k).copied()
    }

    /// Looks up `theta_{k,kp}`, falling back to `theta_{kp,k}`.
    pub fn theta(&self, k: usize, kp: usize) -> Option<ConstantValue> {
        self.theta
            .get(&(k, kp))
            .or_else(|| self.theta.get(&(kp, k)))
            .copied()
    }

    pub fn to_json(&self, conditions: &[ConditionReport]) -> ConstantsJson {
        ConstantsJson {
            matrix_id: self.matrix_id.clone(),
            brute_force_limit: Some(self.brute_force_limit),
            delta: self
                .delta
                .iter()
                .map(|(&k, v)| DeltaEntry {
                    k,
                    value: v.value,
                    exact: v.exact,
                })
                .collect(),
            theta: self
                .theta
                .iter()
                .map(|(&(k, kp), v)| ThetaEntry {
                    k,
                    kp,
                    value: v.value,
                    exact: v.exact,
                })
                .collect(),
            coherence: self.coherence,
            conditions: conditions.iter().map(ConditionJson::from).collect(),
        }
    }

    pub fn from_json(json: &ConstantsJson) -> Self {
        RipReport {
            matrix_id: json.matrix_id.clone(),
            delta: json
                .delta
                .iter()
                .map(|d| (d.k, ConstantValue { value: d.value, exact: d.exact }))
                .collect(),
            theta: json
                .theta
                .iter()
                .map(|t| ((t.k, t.kp), ConstantValue { value: t.value, exact: t.exact }))
                .collect(),
            coherence: json.coherence,
            brute_force_limit: json.brute_force_limit.unwrap_or(DEFAULT_BUDGET),
        }
    }
}

/// The recovery conditions that can be checked against a [`RipReport`].
/// Fractional indices are rounded up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionVariant {
    /// `delta_{1.5k} + theta_{k,1.5k} < 1`.
    Rip15,
    /// `delta_k + theta_{k,k} + theta_{k,2k} < 1`.
    ThreeTerm,
    /// `delta_{2k} + theta_{k,2k} < 1`.
    Rip2k,
    /// `delta_{2k} < sqrt(2) - 1`.
    Delta2k,
    /// `delta_{1.5k} + delta_{2.5k} < 1`.
    DeltaOnly,
    /// `delta_{1.75k} < sqrt(2) - 1`.
    Delta175,
    /// `delta_{1.75k} + theta_{k,1.75k} < 1`.
    Rip175,
    /// `k < (2 + 2M) / ((3 + sqrt 6) M)`.
    Mip,
}

impl ConditionVariant {
    pub const ALL: [ConditionVariant; 8] = [
        ConditionVariant::Rip15,
        ConditionVariant::ThreeTerm,
        ConditionVariant::Rip2k,
        ConditionVariant::Delta2k,
        ConditionVariant::DeltaOnly,
        ConditionVariant::Delta175,
        ConditionVariant::Rip175,
        ConditionVariant::Mip,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ConditionVariant::Rip15 => "rip_1.5k",
            ConditionVariant::ThreeTerm => "rip_three_term",
            ConditionVariant::Rip2k => "rip_2k",
            ConditionVariant::Delta2k => "delta_2k",
            ConditionVariant::DeltaOnly => "delta_1.5k_2.5k",
            ConditionVariant::Delta175 => "delta_1.75k",
            ConditionVariant::Rip175 => "rip_1.75k",
            ConditionVariant::Mip => "mip",
        }
    }

    /// `(delta indices, theta index pairs)` needed at sparsity `k`.
    pub fn requirements(self, k: usize) -> (Vec<usize>, Vec<(usize, usize)>) {
        let k15 = ceil_frac(k, 3, 2);
        let k175 = ceil_frac(k, 7, 4);
        match self {
            ConditionVariant::Rip15 => (vec![k15], vec![(k, k15)]),
            ConditionVariant::ThreeTerm => (vec![k], vec![(k, k), (k, 2 * k)]),
            ConditionVariant::Rip2k => (vec![2 * k], vec![(k, 2 * k)]),
            ConditionVariant::Delta2k => (vec![2 * k], vec![]),
            ConditionVariant::DeltaOnly => (vec![k15, ceil_frac(k, 5, 2)], vec![]),
            ConditionVariant::Delta175 => (vec![k175], vec![]),
            ConditionVariant::Rip175 => (vec![k175], vec![(k, k175)]),
            ConditionVariant::Mip => (vec![], vec![]),
        }
    }
}

impl fmt::Display for ConditionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ConditionVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConditionVariant::ALL
            .into_iter()
            .find(|v| v.id() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

impl Serialize for ConditionVariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for ConditionVariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Certified,
    NotCertified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub variant: ConditionVariant,
    pub k: usize,
    pub lhs_value: f64,
    pub threshold: f64,
    pub holds: bool,
    pub exactness: Exactness,
}

impl ConditionReport {
    /// The condition is proven: it holds on exact constants.
    pub fn certified_holds(&self) -> bool {
        self.holds && self.exactness == Exactness::Certified
    }

    /// The condition is disproven. Every variant's left side is increasing in
    /// the constants, so a lower bound at or above threshold is conclusive.
    pub fn falsified(&self) -> bool {
        !self.holds
    }
}

/// Evaluates `variant` at sparsity `k` using the constants in `report`.
pub fn check_condition(
    report: &RipReport,
    k: usize,
    variant: ConditionVariant,
) -> Result<ConditionReport> {
    if k == 0 {
        return Err(Error::InvalidSparsity { k, p: 0 });
    }
    if variant == ConditionVariant::Mip {
        let m = report.coherence.ok_or_else(|| Error::IncompleteReport {
            missing: vec!["coherence".into()],
        })?;
        let threshold = if m > 0.0 {
            mip_sparsity_threshold(m)
        } else {
            f64::INFINITY
        };
        let lhs = k as f64;
        return Ok(ConditionReport {
            variant,
            k,
            lhs_value: lhs,
            threshold,
            holds: lhs < threshold,
            exactness: Exactness::Certified,
        });
    }

    let (ds, ts) = variant.requirements(k);
    let mut missing = Vec::new();
    let mut values = Vec::new();
    for d in &ds {
        match report.delta(*d) {
            Some(v) => values.push(v),
            None => missing.push(format!("delta_{d}")),
        }
    }
    for (a, b) in &ts {
        match report.theta(*a, *b) {
            Some(v) => values.push(v),
            None => missing.push(format!("theta_{a}_{b}")),
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteReport { missing });
    }
    let lhs: f64 = values.iter().map(|v| v.value).sum();
    let threshold = match variant {
        ConditionVariant::Delta2k | ConditionVariant::Delta175 => SQRT2_MINUS_1,
        _ => 1.0,
    };
    let exact = values.iter().all(|v| v.exact);
    Ok(ConditionReport {
        variant,
        k,
        lhs_value: lhs,
        threshold,
        holds: lhs < threshold,
        exactness: if exact {
            Exactness::Certified
        } else {
            Exactness::NotCertified
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub k: usize,
    pub value: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub k: usize,
    pub kp: usize,
    pub value: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionJson {
    pub variant: ConditionVariant,
    pub k: usize,
    pub lhs: f64,
    /// `null` when the threshold is infinite (zero coherence).
    pub threshold: Option<f64>,
    pub holds: bool,
    pub certified: bool,
}

impl From<&ConditionReport> for ConditionJson {
    fn from(c: &ConditionReport) -> Self {
        ConditionJson {
            variant: c.variant,
            k: c.k,
            lhs: c.lhs_value,
            threshold: c.threshold.is_finite().then_some(c.threshold),
            holds: c.holds,
            certified: c.exactness == Exactness::Certified,
        }
    }
}

/// JSON form of a constants report, as written by the `constants` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsJson {
    pub matrix_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute_force_limit: Option<u64>,
    pub delta: Vec<DeltaEntry>,
    pub theta: Vec<ThetaEntry>,
    pub coherence: Option<f64>,
    #[serde(default)]
    pub conditions: Vec<ConditionJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Ensemble;

    fn orthonormal(n: usize, p: usize) -> SensingMatrix {
        SensingMatrix::from_dmatrix(DMatrix::identity(n, p)).unwrap()
    }

    fn duplicated() -> SensingMatrix {
        SensingMatrix::from_rows(2, 2, &[1.0, 1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(40, 9), 273_438_880);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(ceil_frac(1, 3, 2), 2);
        assert_eq!(ceil_frac(2, 3, 2), 3);
        assert_eq!(ceil_frac(3, 7, 4), 6);
        assert_eq!(ceil_frac(4, 7, 4), 7);
        assert_eq!(ceil_frac(3, 5, 2), 8);
    }

    #[test]
    fn orthonormal_constants_vanish() {
        let f = orthonormal(5, 5);
        for k in 1..=5 {
            assert!(delta_exact(&f, k, DEFAULT_BUDGET).unwrap().value < 1e-12);
        }
        for k in 1..=2 {
            for kp in 1..=3 {
                assert!(theta_exact(&f, k, kp, DEFAULT_BUDGET).unwrap().value < 1e-12);
            }
        }
        assert_eq!(coherence(&f).unwrap(), 0.0);
        let mc = delta_theta_mc_lower(&f, 2, None, 10, 1).unwrap();
        assert!(!mc.exact && mc.value < 1e-12);
    }

    #[test]
    fn duplicated_column() {
        let f = duplicated();
        let d = delta_exact(&f, 2, DEFAULT_BUDGET).unwrap();
        assert!(d.exact);
        assert!((d.value - 1.0).abs() < 1e-12);
        assert_eq!(coherence(&f).unwrap(), 1.0);
    }

    #[test]
    fn coherence_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = SensingMatrix::from_columns(&[vec![1.0, 0.0], vec![s, s]]).unwrap();
        assert!((coherence(&f).unwrap() - s).abs() < 1e-15);
        let g = SensingMatrix::from_rows(2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(coherence(&g), Err(Error::NonUnitColumns)));
    }

    #[test]
    fn theta_one_one_is_coherence() {
        let f = SensingMatrix::generate(6, 9, &Ensemble::Gaussian, true, 4).unwrap();
        let t = theta_exact(&f, 1, 1, DEFAULT_BUDGET).unwrap().value;
        assert!((t - coherence(&f).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let f = SensingMatrix::generate(6, 20, &Ensemble::Gaussian, true, 4).unwrap();
        assert!(matches!(
            delta_exact(&f, 5, 1000),
            Err(Error::BudgetExceeded { required: 15504, budget: 1000 })
        ));
        let opts = RipOptions {
            budget: 1000,
            mc_trials: 50,
            seed: 3,
        };
        let r = RipReport::compute(&f, &[2, 5], &[(2, 3)], &opts).unwrap();
        assert!(r.delta(2).unwrap().exact);
        assert!(!r.delta(5).unwrap().exact);
        assert!(!r.theta(3, 2).unwrap().exact);
    }

    #[test]
    fn mc_nondecreasing_in_trials() {
        let f = SensingMatrix::generate(6, 12, &Ensemble::Gaussian, true, 8).unwrap();
        let mut prev = 0.0;
        for trials in [1, 5, 20, 100, 400] {
            let v = delta_theta_mc_lower(&f, 3, None, trials, 42).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn mc_covering_all_supports_is_exact() {
        let f = SensingMatrix::generate(3, 5, &Ensemble::Gaussian, true, 2).unwrap();
        let exact = delta_exact(&f, 2, DEFAULT_BUDGET).unwrap().value;
        let mc = delta_theta_mc_lower(&f, 2, None, 2000, 5).unwrap().value;
        assert_eq!(exact, mc);
        let exact = theta_exact(&f, 1, 2, DEFAULT_BUDGET).unwrap().value;
        let mc = delta_theta_mc_lower(&f, 1, Some(2), 2000, 5).unwrap().value;
        assert_eq!(exact, mc);
    }

    #[test]
    fn split_bound_examples() {
        assert_eq!(theta_split_bound(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((theta_split_bound(&[0.3, 0.4]).unwrap() - 0.5).abs() < 1e-15);
        assert!((theta_split_bound(&[0.4, 0.4]).unwrap() - 0.565_685_424_949_238).abs() < 1e-12);
        assert!(theta_split_bound(&[0.1, -0.1]).is_err());
    }

    #[test]
    fn mip_to_rip_examples() {
        assert_eq!(mip_to_rip(0.0, 4, 2).unwrap(), (0.0, 0.0));
        let (d, t) = mip_to_rip(0.1, 3, 3).unwrap();
        assert!((d - 0.2).abs() < 1e-15 && (t - 0.3).abs() < 1e-15);
        assert!(mip_to_rip(-0.1, 1, 1).is_err());
    }

    #[test]
    fn conditions_on_orthonormal() {
        let f = orthonormal(10, 10);
        let r = RipReport::for_conditions(&f, &[1, 2, 3], &ConditionVariant::ALL, &RipOptions::default()).unwrap();
        for k in [1, 2, 3] {
            for v in ConditionVariant::ALL {
                let c = check_condition(&r, k, v).unwrap();
                assert!(c.certified_holds(), "{v} at k={k}: {c:?}");
                if v != ConditionVariant::Mip {
                    assert!(c.lhs_value < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rip2k_arithmetic() {
        let f = orthonormal(2, 3);
        let mut r = RipReport::empty(&f, DEFAULT_BUDGET);
        r.delta.insert(2, ConstantValue { value: 0.4, exact: true });
        r.theta.insert((1, 2), ConstantValue { value: 0.55, exact: true });
        let c = check_condition(&r, 1, ConditionVariant::Rip2k).unwrap();
        assert!((c.lhs_value - 0.95).abs() < 1e-15);
        assert!(c.certified_holds());
        r.theta.insert((1, 2), ConstantValue { value: 0.55, exact: false });
        let c = check_condition(&r, 1, ConditionVariant::Rip2k).unwrap();
        assert!(c.holds && c.exactness == Exactness::NotCertified);
    }

    #[test]
    fn mip_condition_threshold() {
        let f = orthonormal(2, 2);
        let mut r = RipReport::empty(&f, DEFAULT_BUDGET);
        r.coherence = Some(0.05);
        let c = check_condition(&r, 5, ConditionVariant::Mip).unwrap();
        // 2.1 / (0.05 (3 + sqrt 6)) to full precision
        assert!((c.threshold - 7.707_143_601_035_507).abs() < 1e-12, "{}", c.threshold);
        assert!(c.holds);
        assert!(!check_condition(&r, 8, ConditionVariant::Mip).unwrap().holds);
    }

    #[test]
    fn missing_constants_are_named() {
        let f = orthonormal(4, 4);
        let r = RipReport::empty(&f, DEFAULT_BUDGET);
        match check_condition(&r, 2, ConditionVariant::Rip15) {
            Err(Error::IncompleteReport { missing }) => {
                assert_eq!(missing, vec!["delta_3".to_string(), "theta_2_3".to_string()])
            }
            other => panic!("{other:?}"),
        }
        let g = SensingMatrix::from_rows(1, 2, &[2.0, 1.0]).unwrap();
        let r = RipReport::empty(&g, DEFAULT_BUDGET);
        assert!(matches!(
            check_condition(&r, 1, ConditionVariant::Mip),
            Err(Error::IncompleteReport { .. })
        ));
    }

    #[test]
    fn variant_ids_round_trip() {
        for v in ConditionVariant::ALL {
            assert_eq!(v.id().parse::<ConditionVariant>().unwrap(), v);
        }
        assert!("nope".parse::<ConditionVariant>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = SensingMatrix::generate(4, 6, &Ensemble::Gaussian, true, 1).unwrap();
        let r = RipReport::compute(&f, &[1, 2], &[(1, 2)], &RipOptions::default()).unwrap();
        let json = serde_json::to_string(&r.to_json(&[])).unwrap();
        let back = RipReport::from_json(&serde_json::from_str(&json).unwrap());
        assert_eq!(r, back);
    }
}
