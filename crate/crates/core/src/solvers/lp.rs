//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! The problem is rewritten in standard form `min c'x, Ax = b, x >= 0,
//! b >= 0` by shifting/splitting bounded and free variables and adding slack
//! columns. Linearly dependent equality rows are removed up front. Phase I
//! minimises the sum of artificial variables; artificials left in the basis
//! at zero are pivoted out or their rows dropped as redundant. Once an optimal basis is found the basic solution is recomputed
//! from the original standard-form columns by an LU solve, which removes the
//! drift accumulated by tableau updates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::SolverOptions;
use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
/// Relative size below which a leftover artificial row counts as redundant.
const DRIVE_OUT_TOL: f64 = 1e-7;
/// Pivots between full recomputations of the reduced costs.
const REPRICE_EVERY: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VarBounds {
    pub const NONNEGATIVE: VarBounds = VarBounds {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    pub const FREE: VarBounds = VarBounds {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };
}

/// `min objective . x` subject to linear constraints and variable bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
    pub bounds: Vec<VarBounds>,
}

impl LpProblem {
    /// All variables start nonnegative.
    pub fn new(objective: Vec<f64>) -> Self {
        let bounds = vec![VarBounds::NONNEGATIVE; objective.len()];
        LpProblem {
            objective,
            constraints: Vec::new(),
            bounds,
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(LinearConstraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn bound(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = VarBounds { lower, upper };
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let nv = self.num_vars();
        if self.bounds.len() != nv {
            return Err(Error::DimensionMismatch {
                expected: nv,
                found: self.bounds.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite objective".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != nv {
                return Err(Error::DimensionMismatch {
                    expected: nv,
                    found: c.coeffs.len(),
                });
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite entry in row {i}")));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan() || b.upper.is_nan() || b.lower > b.upper || b.lower == f64::INFINITY
                || b.upper == f64::NEG_INFINITY
            {
                return Err(Error::InvalidParameter(format!(
                    "bounds [{}, {}] on variable {j}",
                    b.lower, b.upper
                )));
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (b, &xj) in self.bounds.iter().zip(x) {
            worst = worst.max(b.lower - xj).max(xj - b.upper);
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub max_violation: f64,
    pub iterations: usize,
    /// Some nonbasic column has a zero reduced cost, so other optimal
    /// vertices may exist.
    pub degenerate_optimum: bool,
    /// Smallest reduced cost recomputed from the final basis.
    pub min_reduced_cost: f64,
}

/// How an original variable maps onto standard-form columns.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = shift + s`.
    Shift { col: usize, shift: f64 },
    /// `x = shift - s`.
    Reflect { col: usize, shift: f64 },
    /// `x = s_pos - s_neg`.
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    /// Row-major `m x ncols`, rhs already nonnegative.
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    ncols: usize,
    /// Per row, a column that can start in the basis (slack with +1).
    initial: Vec<Option<usize>>,
    /// Rows without a slack column.
    equality: Vec<bool>,
    maps: Vec<VarMap>,
}

fn standardize(lp: &LpProblem) -> StandardForm {
    let mut maps = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new();
    for b in &lp.bounds {
        let map = if b.lower.is_finite() {
            let col = ncols;
            ncols += 1;
            if b.upper.is_finite() {
                extra_rows.push((col, b.upper - b.lower));
            }
            VarMap::Shift {
                col,
                shift: b.lower,
            }
        } else if b.upper.is_finite() {
            let col = ncols;
            ncols += 1;
            VarMap::Reflect {
                col,
                shift: b.upper,
            }
        } else {
            ncols += 2;
            VarMap::Split {
                pos: ncols - 2,
                neg: ncols - 1,
            }
        };
        maps.push(map);
    }

    let mut c = vec![0.0; ncols];
    for (j, map) in maps.iter().enumerate() {
        let cj = lp.objective[j];
        match *map {
            VarMap::Shift { col, .. } => c[col] += cj,
            VarMap::Reflect { col, .. } => c[col] -= cj,
            VarMap::Split { pos, neg } => {
                c[pos] += cj;
                c[neg] -= cj;
            }
        }
    }

    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for con in &lp.constraints {
        let mut row = vec![0.0; ncols];
        let mut rhs = con.rhs;
        for (j, map) in maps.iter().enumerate() {
            let a = con.coeffs[j];
            if a == 0.0 {
                continue;
            }
            match *map {
                VarMap::Shift { col, shift } => {
                    row[col] += a;
                    rhs -= a * shift;
                }
                VarMap::Reflect { col, shift } => {
                    row[col] -= a;
                    rhs -= a * shift;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        rows.push((row, con.relation, rhs));
    }
    for (col, width) in extra_rows {
        let mut row = vec![0.0; ncols];
        row[col] = 1.0;
        rows.push((row, Relation::Le, width));
    }

    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let total = ncols + n_slack;
    let mut a = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    let mut initial = Vec::with_capacity(rows.len());
    let mut equality = Vec::with_capacity(rows.len());
    let mut slack = ncols;
    for (mut row, rel, mut rhs) in rows {
        row.resize(total, 0.0);
        let mut slack_col = None;
        match rel {
            Relation::Le => {
                row[slack] = 1.0;
                slack_col = Some(slack);
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -1.0;
                slack_col = Some(slack);
                slack += 1;
            }
            Relation::Eq => {}
        }
        if rhs < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
        }
        initial.push(slack_col.filter(|&s| row[s] == 1.0));
        equality.push(slack_col.is_none());
        a.push(row);
        b.push(rhs);
    }
    c.resize(total, 0.0);
    StandardForm {
        a,
        b,
        c,
        ncols: total,
        initial,
        equality,
        maps,
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Dense tableau. Columns `0..ncols` are standard-form columns; the
/// artificial columns follow.
struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
    total: usize,
    iterations: usize,
    /// Original row behind each artificial column.
    art_rows: Vec<usize>,
    /// Original rows dropped as redundant.
    dropped: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, q: usize, cost_row: &mut [f64], obj: &mut f64) {
        let piv = self.rows[r][q];
        let pivot_row: Vec<f64> = self.rows[r].iter().map(|v| v / piv).collect();
        let pivot_rhs = self.rhs[r] / piv;
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[q];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[q] = 0.0;
                self.rhs[i] -= factor * pivot_rhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -1e-11 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let factor = cost_row[q];
        if factor != 0.0 {
            for (v, p) in cost_row.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            cost_row[q] = 0.0;
            *obj += factor * pivot_rhs;
        }
        self.rows[r] = pivot_row;
        self.rows[r][q] = 1.0;
        self.rhs[r] = pivot_rhs;
        self.basis[r] = q;
        self.iterations += 1;
    }

    /// Reduced costs and objective for `cost` under the current basis.
    fn price(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let mut d = cost.to_vec();
        let mut obj = 0.0;
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = cost[bi];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(&self.rows[i]) {
                    *dj -= cb * a;
                }
                obj += cb * self.rhs[i];
            }
        }
        for &bi in &self.basis {
            d[bi] = 0.0;
        }
        (d, obj)
    }

    /// Runs Bland's rule on `cost` over columns `0..allowed`. With
    /// `bounded` set the objective is known to be bounded below, so a column
    /// with no admissible pivot is a rounding artefact and is skipped.
    fn run(
        &mut self,
        cost: &[f64],
        allowed: usize,
        bounded: bool,
        opts: &SolverOptions,
    ) -> (PhaseEnd, Vec<f64>, f64) {
        let (mut d, mut obj) = self.price(cost);
        let mut skip = vec![false; allowed];
        let mut since_price = 0;
        loop {
            if self.iterations >= opts.max_iterations {
                return (PhaseEnd::IterationLimit, d, obj);
            }
            if since_price >= REPRICE_EVERY {
                (d, obj) = self.price(cost);
                since_price = 0;
            }
            // Bland: lowest-index improving column.
            let Some(q) = (0..allowed).find(|&j| !skip[j] && d[j] < -opts.optimality_tol) else {
                let (fresh, fresh_obj) = self.price(cost);
                if since_price > 0 && (0..allowed).any(|j| !skip[j] && fresh[j] < -opts.optimality_tol) {
                    (d, obj) = (fresh, fresh_obj);
                    since_price = 0;
                    continue;
                }
                return (PhaseEnd::Optimal, fresh, fresh_obj);
            };
            let Some(r) = self.ratio_test(q) else {
                if since_price > 0 {
                    (d, obj) = self.price(cost);
                    since_price = 0;
                    continue;
                }
                if bounded {
                    skip[q] = true;
                    continue;
                }
                return (PhaseEnd::Unbounded, d, obj);
            };
            self.pivot(r, q, &mut d, &mut obj);
            since_price += 1;
        }
    }

    /// Leaving row for entering column `q`: minimum ratio, ties to the
    /// lowest basic index.
    fn ratio_test(&self, q: usize) -> Option<usize> {
        let mut leave: Option<(usize, f64)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let a = row[q];
            if a > PIVOT_TOL {
                let ratio = self.rhs[i] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie || tie && self.basis[i] < self.basis[r] {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        leave.map(|(r, _)| r)
    }
}

/// Solves `lp` by the two-phase simplex method.
pub fn solve_lp(lp: &LpProblem, opts: &SolverOptions) -> Result<LpSolution> {
    lp.validate()?;
    opts.validate()?;
    let sf = standardize(lp);
    let m = sf.a.len();
    let ncols = sf.ncols;

    let b_scale = sf.b.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let (dependent, consistent) = dependent_rows(&sf, opts.feasibility_tol * b_scale);

    // Artificial columns for rows without a ready slack.
    let mut art_rows = Vec::new();
    for (i, init) in sf.initial.iter().enumerate() {
        if init.is_none() && !dependent.contains(&i) {
            art_rows.push(i);
        }
    }
    let total = ncols + art_rows.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = ncols;
    for (i, row) in sf.a.iter().enumerate() {
        if dependent.contains(&i) {
            continue;
        }
        let mut r = row.clone();
        r.resize(total, 0.0);
        match sf.initial[i] {
            Some(s) => basis.push(s),
            None => {
                r[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(r);
        rhs.push(sf.b[i]);
    }
    let mut tab = Tableau {
        rows,
        rhs,
        basis,
        ncols,
        total,
        iterations: 0,
        art_rows,
        dropped: dependent,
    };
    if !consistent {
        return Ok(unfinished(lp, &sf, &tab, LpStatus::Infeasible));
    }

    if total > ncols {
        let mut phase1 = vec![0.0; total];
        phase1[ncols..].iter_mut().for_each(|c| *c = 1.0);
        let (end, _, infeas) = tab.run(&phase1, total, true, opts);
        match end {
            PhaseEnd::IterationLimit => return Ok(unfinished(lp, &sf, &tab, LpStatus::IterationLimit)),
            PhaseEnd::Unbounded => unreachable!("phase I objective is bounded below"),
            PhaseEnd::Optimal => {}
        }
        if infeas > opts.feasibility_tol * b_scale {
            return Ok(unfinished(lp, &sf, &tab, LpStatus::Infeasible));
        }
        drive_out_artificials(&mut tab);
    }

    let mut cost = sf.c.clone();
    cost.resize(total, 0.0);
    let (end, _, _) = tab.run(&cost, ncols, false, opts);
    let status = match end {
        PhaseEnd::Optimal => LpStatus::Optimal,
        PhaseEnd::Unbounded => LpStatus::Unbounded,
        PhaseEnd::IterationLimit => LpStatus::IterationLimit,
    };
    if status != LpStatus::Optimal {
        return Ok(unfinished(lp, &sf, &tab, status));
    }

    let std_x = refine(&sf, &tab).unwrap_or_else(|| basic_solution(&tab));
    let (min_rc, degenerate) = reduced_cost_check(&sf, &tab, opts);
    Ok(finish(lp, &sf, &std_x, LpStatus::Optimal, tab.iterations, degenerate, min_rc))
}

/// Equality rows that are linear combinations of earlier ones, found by
/// Gram-Schmidt with reorthogonalisation. The flag is false when a dependent
/// row's right-hand side disagrees with the same combination of the others.
fn dependent_rows(sf: &StandardForm, rhs_tol: f64) -> (Vec<usize>, bool) {
    const REL_TOL: f64 = 1e-9;
    let mut basis: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut dependent = Vec::new();
    let mut consistent = true;
    for (i, row) in sf.a.iter().enumerate() {
        if !sf.equality[i] {
            continue;
        }
        let norm0 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut r = row.clone();
        let mut rb = sf.b[i];
        for _ in 0..2 {
            for (q, qb) in &basis {
                let c: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                rb -= c * qb;
            }
        }
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= REL_TOL * norm0.max(f64::MIN_POSITIVE) {
            dependent.push(i);
            consistent &= rb.abs() <= rhs_tol;
        } else {
            r.iter_mut().for_each(|v| *v /= norm);
            basis.push((r, rb / norm));
        }
    }
    (dependent, consistent)
}

fn drive_out_artificials(tab: &mut Tableau) {
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= tab.ncols {
            // Entries at round-off level relative to the row mean the row is
            // numerically redundant; pivoting on them wrecks the tableau.
            let scale = tab.rows[r].iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            let tol = DRIVE_OUT_TOL * scale;
            let q = (0..tab.ncols)
                .filter(|&j| tab.rows[r][j].abs() > tol)
                .max_by(|&a, &b| tab.rows[r][a].abs().total_cmp(&tab.rows[r][b].abs()));
            match q {
                Some(q) => {
                    let mut dummy = vec![0.0; tab.total];
                    let mut obj = 0.0;
                    tab.pivot(r, q, &mut dummy, &mut obj);
                    tab.iterations -= 1;
                }
                None => {
                    // Redundant: the artificial's own row is a combination of
                    // the others.
                    let art = tab.basis[r] - tab.ncols;
                    tab.dropped.push(tab.art_rows[art]);
                    tab.rows.remove(r);
                    tab.rhs.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
}

fn basic_solution(tab: &Tableau) -> Vec<f64> {
    let mut x = vec![0.0; tab.ncols];
    for (i, &bi) in tab.basis.iter().enumerate() {
        if bi < tab.ncols {
            x[bi] = tab.rhs[i].max(0.0);
        }
    }
    x
}

/// Basis columns restricted to the original rows that survived phase I.
fn basis_matrix(sf: &StandardForm, tab: &Tableau) -> Option<(DMatrix<f64>, Vec<usize>)> {
    if tab.basis.iter().any(|&b| b >= tab.ncols) {
        return None;
    }
    let rows: Vec<usize> = (0..sf.a.len()).filter(|i| !tab.dropped.contains(i)).collect();
    if rows.len() != tab.basis.len() {
        return None;
    }
    let m = rows.len();
    let bm = DMatrix::from_fn(m, m, |i, j| sf.a[rows[i]][tab.basis[j]]);
    Some((bm, rows))
}

fn refine(sf: &StandardForm, tab: &Tableau) -> Option<Vec<f64>> {
    let (bm, rows) = basis_matrix(sf, tab)?;
    let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|&i| sf.b[i]));
    let xb = crate::linalg::solve(bm, &rhs)?;
    let scale = 1.0 + xb.amax();
    if xb.iter().any(|&v| v < -1e-9 * scale) {
        return None;
    }
    let mut x = vec![0.0; tab.ncols];
    for (j, &bj) in tab.basis.iter().enumerate() {
        x[bj] = xb[j].max(0.0);
    }
    // Reject if the recomputed point drifts from the tableau's.
    let drift = basic_solution(tab)
        .iter()
        .zip(&x)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    (drift <= 1e-6 * scale).then_some(x)
}

fn reduced_cost_check(sf: &StandardForm, tab: &Tableau, opts: &SolverOptions) -> (f64, bool) {
    let in_basis = |j: usize| tab.basis.contains(&j);
    let Some((bm, rows)) = basis_matrix(sf, tab) else {
        return (f64::NAN, false);
    };
    let cb = DVector::from_iterator(tab.basis.len(), tab.basis.iter().map(|&j| sf.c[j]));
    let Some(y) = crate::linalg::solve(bm.transpose(), &cb) else {
        return (f64::NAN, false);
    };
    let mut min_rc = f64::INFINITY;
    let mut degenerate = false;
    for j in (0..tab.ncols).filter(|&j| !in_basis(j)) {
        let d = sf.c[j] - rows.iter().enumerate().map(|(k, &i)| sf.a[i][j] * y[k]).sum::<f64>();
        min_rc = min_rc.min(d);
        if d.abs() <= opts.optimality_tol {
            degenerate = true;
        }
    }
    (min_rc, degenerate)
}

fn to_original(sf: &StandardForm, std_x: &[f64]) -> Vec<f64> {
    sf.maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, shift } => shift + std_x[col],
            VarMap::Reflect { col, shift } => shift - std_x[col],
            VarMap::Split { pos, neg } => std_x[pos] - std_x[neg],
        })
        .collect()
}

fn finish(
    lp: &LpProblem,
    sf: &StandardForm,
    std_x: &[f64],
    status: LpStatus,
    iterations: usize,
    degenerate_optimum: bool,
    min_reduced_cost: f64,
) -> LpSolution {
    let x = to_original(sf, std_x);
    let objective_value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpSolution {
        status,
        max_violation: lp.max_violation(&x),
        x,
        objective_value,
        iterations,
        degenerate_optimum,
        min_reduced_cost,
    }
}

fn unfinished(lp: &LpProblem, sf: &StandardForm, tab: &Tableau, status: LpStatus) -> LpSolution {
    let mut sol = finish(
        lp,
        sf,
        &basic_solution(tab),
        status,
        tab.iterations,
        false,
        f64::NAN,
    );
    if status == LpStatus::Unbounded {
        sol.objective_value = f64::NEG_INFINITY;
    }
    sol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn one_dimensional() {
        let mut lp = LpProblem::new(vec![1.0]);
        lp.bound(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.constrain(vec![1.0], Relation::Ge, 1.0);
        let s = solve_lp(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!((s.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dependent_equalities() {
        // Row 3 = row 1 + row 2.
        let mut lp = LpProblem::new(vec![1.0, 2.0, 3.0]);
        lp.constrain(vec![1.0, 1.0, 0.0], Relation::Eq, 1.0);
        lp.constrain(vec![0.0, 1.0, 1.0], Relation::Eq, 1.0);
        lp.constrain(vec![1.0, 2.0, 1.0], Relation::Eq, 2.0);
        let s = solve_lp(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-12, "{s:?}");
        assert!(s.max_violation < 1e-12);

        lp.constraints[2].rhs = 2.5;
        assert_eq!(solve_lp(&lp, &opts()).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn symmetric_vertex() {
        let mut lp = LpProblem::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Ge, 2.0);
        let s = solve_lp(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-12);
        assert!(s.degenerate_optimum);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LpProblem::new(vec![1.0]);
        lp.constrain(vec![1.0], Relation::Le, -1.0);
        assert_eq!(solve_lp(&lp, &opts()).unwrap().status, LpStatus::Infeasible);

        let mut lp = LpProblem::new(vec![-1.0, 0.0]);
        lp.constrain(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp, &opts()).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn bounds_and_equalities() {
        // min -x - 2y, x + y = 3, x in [0, 2], y in [-1, 1.5]
        let mut lp = LpProblem::new(vec![-1.0, -2.0]);
        lp.bound(0, 0.0, 2.0).bound(1, -1.0, 1.5);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 3.0);
        let s = solve_lp(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.5).abs() < 1e-12 && (s.x[1] - 1.5).abs() < 1e-12);
        assert!(s.max_violation <= 1e-12);

        // Upper-bounded only.
        let mut lp = LpProblem::new(vec![-1.0]);
        lp.bound(0, f64::NEG_INFINITY, 4.0);
        let s = solve_lp(&lp, &opts()).unwrap();
        assert!((s.x[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LpProblem::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 2.0], Relation::Eq, 2.0);
        lp.constrain(vec![2.0, 4.0], Relation::Eq, 4.0);
        let s = solve_lp(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_problem() {
        let mut lp = LpProblem::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0], Relation::Eq, 2.0);
        assert!(solve_lp(&lp, &opts()).is_err());
        let mut lp = LpProblem::new(vec![1.0]);
        lp.bound(0, 2.0, 1.0);
        assert!(solve_lp(&lp, &opts()).is_err());
    }

    #[test]
    fn iteration_limit() {
        let mut lp = LpProblem::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Ge, 2.0);
        let o = SolverOptions {
            max_iterations: 0,
            ..opts()
        };
        assert_eq!(solve_lp(&lp, &o).unwrap().status, LpStatus::IterationLimit);
    }
}
