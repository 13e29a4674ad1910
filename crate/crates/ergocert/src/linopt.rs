//! Dense LP feasibility (phase-I simplex, Bland's rule) and the
//! Metzler-specific stability primitives built on it.
//!
//! Strict inequalities never appear in the solver. They are removed exactly
//! via cone homogeneity: `∃v > 0 with vᵀM < 0` holds iff
//! `{v ≥ 1, Mᵀv ≤ -1}` is feasible, because any strict witness scales up
//! into that box. The Hurwitz test, the Perron-Frobenius bisection, and the
//! inverse-sign cross-check give three routes to the same stability decision.

use crate::mat::Mat;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicBool, Ordering};
use thiserror::Error;

/// Maximum scaled constraint violation accepted for a Feasible witness.
pub const TOL_FEAS: f64 = 1e-9;
/// Pivot magnitudes at or below this abort the solve as `Numerical`.
pub const PIVOT_MIN: f64 = 1e-12;
/// Absolute tolerance of the Perron-Frobenius bisection.
pub const PF_TOL: f64 = 1e-9;

const REDUCED_COST_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 50_000;

static DUMP: AtomicBool = AtomicBool::new(false);

/// Enable a one-line stderr dump per solve (problem size and outcome).
pub fn set_debug_dump(on: bool) {
    DUMP.store(on, Ordering::Relaxed);
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinoptError {
    #[error("input matrix is not Metzler")]
    NonMetzler,
    #[error("matrix is singular within pivot tolerance")]
    Singular,
    #[error("numerical failure in LP solve")]
    Numerical,
}

/// Find `x` with `eq_row · x = rhs` for all equalities, `le_row · x <= rhs`
/// for all inequalities, and `lo <= x <= hi` per variable (infinite bounds
/// allowed).
#[derive(Debug, Clone)]
pub struct LinearFeasibilityProblem {
    n: usize,
    equalities: Vec<(Vec<f64>, f64)>,
    inequalities: Vec<(Vec<f64>, f64)>,
    bounds: Vec<(f64, f64)>,
}

impl LinearFeasibilityProblem {
    pub fn new(n: usize) -> Self {
        LinearFeasibilityProblem {
            n,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        assert!(lo <= hi, "empty bound interval");
        self.bounds[var] = (lo, hi);
    }

    pub fn push_eq(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.n);
        debug_assert!(row.iter().all(|c| c.is_finite()) && rhs.is_finite());
        self.equalities.push((row, rhs));
    }

    /// `row · x <= rhs`.
    pub fn push_le(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.n);
        debug_assert!(row.iter().all(|c| c.is_finite()) && rhs.is_finite());
        self.inequalities.push((row, rhs));
    }

    /// `row · x >= rhs`.
    pub fn push_ge(&mut self, row: Vec<f64>, rhs: f64) {
        let neg: Vec<f64> = row.iter().map(|c| -c).collect();
        self.push_le(neg, -rhs);
    }

    /// Maximum scaled violation of `x` over all constraints and bounds.
    pub fn residual(&self, x: &[f64]) -> (f64, f64) {
        let mut eq_res = 0.0f64;
        let mut le_res = 0.0f64;
        for (row, rhs) in &self.equalities {
            let lhs: f64 = row.iter().zip(x).map(|(c, v)| c * v).sum();
            let scale = row.iter().fold(rhs.abs().max(1.0), |m, c| m.max(c.abs()));
            eq_res = eq_res.max((lhs - rhs).abs() / scale);
        }
        for (row, rhs) in &self.inequalities {
            let lhs: f64 = row.iter().zip(x).map(|(c, v)| c * v).sum();
            let scale = row.iter().fold(rhs.abs().max(1.0), |m, c| m.max(c.abs()));
            le_res = le_res.max((lhs - rhs).max(0.0) / scale);
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_finite() {
                le_res = le_res.max((lo - x[i]) / lo.abs().max(1.0));
            }
            if hi.is_finite() {
                le_res = le_res.max((x[i] - hi) / hi.abs().max(1.0));
            }
        }
        (eq_res, le_res.max(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeasibilityStatus {
    Feasible(Vec<f64>),
    Infeasible,
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// (max equality violation, max inequality violation), scaled per row.
    pub residuals: (f64, f64),
}

/// Transformation from an original variable to nonnegative simplex variables.
#[derive(Clone, Copy)]
enum VarMap {
    /// `x = lo + y`
    Shift { y: usize, lo: f64 },
    /// `x = hi - y`
    Flip { y: usize, hi: f64 },
    /// `x = y_plus - y_minus`
    Split { yp: usize, ym: usize },
}

fn recover_vars(maps: &[VarMap], y: &[f64]) -> Vec<f64> {
    maps.iter()
        .map(|m| match *m {
            VarMap::Shift { y: idx, lo } => lo + y[idx],
            VarMap::Flip { y: idx, hi } => hi - y[idx],
            VarMap::Split { yp, ym } => y[yp] - y[ym],
        })
        .collect()
}

/// Phase-I simplex with Bland's rule (smallest-index entering variable,
/// smallest-index tie break on the leaving variable), so cycling cannot
/// occur. Desk-scale instances only; the tableau is dense.
pub fn solve_feasibility(p: &LinearFeasibilityProblem) -> FeasibilityResult {
    let result = solve_inner(p);
    if DUMP.load(Ordering::Relaxed) {
        eprintln!(
            "[linopt] vars={} eq={} le={} -> {}",
            p.n,
            p.equalities.len(),
            p.inequalities.len(),
            match &result.status {
                FeasibilityStatus::Feasible(_) => "feasible",
                FeasibilityStatus::Infeasible => "infeasible",
                FeasibilityStatus::Numerical => "numerical",
            }
        );
    }
    result
}

fn solve_inner(p: &LinearFeasibilityProblem) -> FeasibilityResult {
    let mut maps = Vec::with_capacity(p.n);
    let mut ny = 0usize;
    for &(lo, hi) in &p.bounds {
        if lo.is_finite() {
            maps.push(VarMap::Shift { y: ny, lo });
            ny += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Flip { y: ny, hi });
            ny += 1;
        } else {
            maps.push(VarMap::Split { yp: ny, ym: ny + 1 });
            ny += 2;
        }
    }

    // Rows in y-space: (coeffs, rhs, is_eq).
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    {
        let mut convert = |row: &[f64], rhs: f64, is_eq: bool| {
            let mut y_row = vec![0.0; ny];
            let mut y_rhs = rhs;
            for (x_idx, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                match maps[x_idx] {
                    VarMap::Shift { y, lo } => {
                        y_row[y] += c;
                        y_rhs -= c * lo;
                    }
                    VarMap::Flip { y, hi } => {
                        y_row[y] -= c;
                        y_rhs -= c * hi;
                    }
                    VarMap::Split { yp, ym } => {
                        y_row[yp] += c;
                        y_row[ym] -= c;
                    }
                }
            }
            rows.push((y_row, y_rhs, is_eq));
        };
        for (row, rhs) in &p.equalities {
            convert(row, *rhs, true);
        }
        for (row, rhs) in &p.inequalities {
            convert(row, *rhs, false);
        }
        for (x_idx, &(lo, hi)) in p.bounds.iter().enumerate() {
            if lo.is_finite() && hi.is_finite() && hi > lo {
                let mut row = vec![0.0; p.n];
                row[x_idx] = 1.0;
                convert(&row, hi, false);
            }
        }
    }

    let m = rows.len();
    if m == 0 {
        let x = recover_vars(&maps, &vec![0.0; ny]);
        let residuals = p.residual(&x);
        return FeasibilityResult { status: FeasibilityStatus::Feasible(x), residuals };
    }

    // Tableau columns: y variables | slacks | artificials, then rhs.
    let n_slack = rows.iter().filter(|r| !r.2).count();
    let n_cols = ny + n_slack + m;
    let mut table = vec![vec![0.0f64; n_cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut obj = vec![0.0f64; n_cols + 1];
    let mut slack_at = ny;
    let mut n_art = 0usize;

    for (i, (row, rhs, is_eq)) in rows.iter().enumerate() {
        let neg = *rhs < 0.0;
        let sgn = if neg { -1.0 } else { 1.0 };
        for (j, &c) in row.iter().enumerate() {
            table[i][j] = sgn * c;
        }
        table[i][n_cols] = sgn * rhs;
        let mut needs_art = *is_eq;
        if !*is_eq {
            table[i][slack_at] = sgn;
            if neg {
                needs_art = true; // slack entered with -1, cannot start basic
            } else {
                basis[i] = slack_at;
            }
            slack_at += 1;
        }
        if needs_art {
            let art = ny + n_slack + n_art;
            n_art += 1;
            table[i][art] = 1.0;
            basis[i] = art;
            obj[art] = 1.0;
        }
    }

    // Reduced costs for the phase-I objective: subtract rows whose basic
    // variable is an artificial so all basics have zero reduced cost.
    for i in 0..m {
        if basis[i] >= ny + n_slack {
            for j in 0..=n_cols {
                obj[j] -= table[i][j];
            }
        }
    }

    let scale = rows.iter().fold(1.0f64, |s, r| s.max(r.1.abs()));
    let mut pivots = 0usize;
    loop {
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return numerical();
        }
        let entering = (0..n_cols).find(|&j| obj[j] < -REDUCED_COST_TOL);
        let Some(entering) = entering else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = table[i][entering];
            if a > PIVOT_MIN {
                let ratio = table[i][n_cols] / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        // The phase-I objective is bounded below by zero, so a column with
        // no usable pivot means the pivots degenerated below PIVOT_MIN.
        let Some((leave_row, _)) = leave else {
            return numerical();
        };
        let pivot = table[leave_row][entering];
        if pivot.abs() <= PIVOT_MIN {
            return numerical();
        }
        let inv = 1.0 / pivot;
        for j in 0..=n_cols {
            table[leave_row][j] *= inv;
        }
        for i in 0..m {
            if i == leave_row {
                continue;
            }
            let f = table[i][entering];
            if f == 0.0 {
                continue;
            }
            for j in 0..=n_cols {
                table[i][j] -= f * table[leave_row][j];
            }
        }
        let f = obj[entering];
        if f != 0.0 {
            for j in 0..=n_cols {
                obj[j] -= f * table[leave_row][j];
            }
        }
        basis[leave_row] = entering;
    }

    // Optimal phase-I value = total level of basic artificial variables.
    let art_level: f64 = (0..m).filter(|&i| basis[i] >= ny + n_slack).map(|i| table[i][n_cols]).sum();
    if art_level > TOL_FEAS * scale {
        return FeasibilityResult { status: FeasibilityStatus::Infeasible, residuals: (art_level, art_level) };
    }

    let mut y = vec![0.0; n_cols];
    for i in 0..m {
        y[basis[i]] = table[i][n_cols];
    }
    let x = recover_vars(&maps, &y);
    let residuals = p.residual(&x);
    if residuals.0.max(residuals.1) > TOL_FEAS.max(1e3 * f64::EPSILON * scale) {
        return FeasibilityResult { status: FeasibilityStatus::Numerical, residuals };
    }
    FeasibilityResult { status: FeasibilityStatus::Feasible(x), residuals }
}

fn numerical() -> FeasibilityResult {
    FeasibilityResult { status: FeasibilityStatus::Numerical, residuals: (f64::NAN, f64::NAN) }
}

/// Certificate fragment from the Metzler Hurwitz test.
#[derive(Debug, Clone, PartialEq)]
pub struct HurwitzCheck {
    pub hurwitz: bool,
    /// Positive vector with `vᵀM <= -1` entrywise when Hurwitz.
    pub v: Option<Vec<f64>>,
}

/// LP Hurwitz test for a Metzler matrix: `M` is Hurwitz iff
/// `{v >= 1, Mᵀ v <= -1}` is feasible (homogeneous reformulation of
/// `∃v > 0: vᵀM < 0`).
pub fn is_hurwitz_metzler(m: &Mat) -> Result<HurwitzCheck, LinoptError> {
    if !m.is_metzler(1e-9) {
        return Err(LinoptError::NonMetzler);
    }
    let d = m.rows();
    let mut p = LinearFeasibilityProblem::new(d);
    for i in 0..d {
        p.set_bounds(i, 1.0, f64::INFINITY);
    }
    for j in 0..d {
        // (vᵀM)_j <= -1
        p.push_le(m.col(j), -1.0);
    }
    match solve_feasibility(&p).status {
        FeasibilityStatus::Feasible(v) => Ok(HurwitzCheck { hurwitz: true, v: Some(v) }),
        FeasibilityStatus::Infeasible => Ok(HurwitzCheck { hurwitz: false, v: None }),
        FeasibilityStatus::Numerical => Err(LinoptError::Numerical),
    }
}

/// Perron-Frobenius (dominant real) eigenvalue of a Metzler matrix, located
/// by bisection on the shift `s`: `M - sI` is Hurwitz iff `s > λ_PF`.
/// Initial bracket from Gershgorin discs, widened by one.
pub fn pf_eigenvalue(m: &Mat) -> Result<f64, LinoptError> {
    if !m.is_metzler(1e-9) {
        return Err(LinoptError::NonMetzler);
    }
    let d = m.rows();
    if d == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d {
        let r: f64 = (0..d).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
        lo = lo.min(m[(i, i)] - r);
        hi = hi.max(m[(i, i)] + r);
    }
    lo -= 1.0;
    hi += 1.0;
    while hi - lo > PF_TOL {
        let mid = 0.5 * (lo + hi);
        if is_hurwitz_metzler(&m.shift_diag(mid))?.hurwitz {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cross-check from positive-systems theory: a Hurwitz Metzler matrix is
/// nonsingular with a nonpositive inverse. Inverts by Gaussian elimination
/// with partial pivoting and checks all entries `<= 1e-10`.
pub fn inverse_nonpositivity_check(m: &Mat) -> Result<bool, LinoptError> {
    let inv = m.invert().map_err(|_| LinoptError::Singular)?;
    for i in 0..inv.rows() {
        for j in 0..inv.cols() {
            if inv[(i, j)] > 1e-10 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contradictory_bounds_infeasible() {
        // x >= 1 and -x >= 0
        let mut p = LinearFeasibilityProblem::new(1);
        p.set_bounds(0, 1.0, f64::INFINITY);
        p.push_ge(vec![-1.0], 0.0);
        assert_eq!(solve_feasibility(&p).status, FeasibilityStatus::Infeasible);
    }

    #[test]
    fn simplex_on_simplex() {
        // x + y = 1, x >= 0, y >= 0
        let mut p = LinearFeasibilityProblem::new(2);
        p.set_bounds(0, 0.0, f64::INFINITY);
        p.set_bounds(1, 0.0, f64::INFINITY);
        p.push_eq(vec![1.0, 1.0], 1.0);
        let r = solve_feasibility(&p);
        match r.status {
            FeasibilityStatus::Feasible(x) => {
                assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
                assert!(x[0] >= -1e-12 && x[1] >= -1e-12);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn free_variables_split() {
        // x - y = -3 with free x, y <= 0
        let mut p = LinearFeasibilityProblem::new(2);
        p.set_bounds(1, f64::NEG_INFINITY, 0.0);
        p.push_eq(vec![1.0, -1.0], -3.0);
        let r = solve_feasibility(&p);
        match r.status {
            FeasibilityStatus::Feasible(x) => {
                assert!((x[0] - x[1] + 3.0).abs() < 1e-9);
                assert!(x[1] <= 1e-12);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn hurwitz_scalar() {
        let m = Mat::from_rows(&[vec![-1.0]]);
        let h = is_hurwitz_metzler(&m).unwrap();
        assert!(h.hurwitz);
        let v = h.v.unwrap();
        assert!(v[0] >= 1.0 - 1e-12);
        assert!(v[0] * -1.0 <= -1.0 + 1e-9);
    }

    #[test]
    fn hurwitz_rejects_paper_example() {
        let m = Mat::from_rows(&[vec![-2.0, 4.0], vec![4.0, -2.0]]);
        assert!(!is_hurwitz_metzler(&m).unwrap().hurwitz);
    }

    #[test]
    fn non_metzler_rejected() {
        let m = Mat::from_rows(&[vec![-1.0, -0.5], vec![0.0, -1.0]]);
        assert_eq!(is_hurwitz_metzler(&m), Err(LinoptError::NonMetzler));
    }

    #[test]
    fn pf_scalar_and_symmetric() {
        assert!((pf_eigenvalue(&Mat::from_rows(&[vec![-3.0]])).unwrap() + 3.0).abs() < 1e-8);
        // eigenvalues -6 and 2 by symmetry
        let m = Mat::from_rows(&[vec![-2.0, 4.0], vec![4.0, -2.0]]);
        assert!((pf_eigenvalue(&m).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn inverse_nonpositive_closed_form() {
        let m = Mat::from_rows(&[vec![-2.0, 1.0], vec![1.0, -2.0]]);
        assert!(inverse_nonpositivity_check(&m).unwrap());
        assert!(inverse_nonpositivity_check(&Mat::from_rows(&[vec![-1.0]])).unwrap());
    }
}
