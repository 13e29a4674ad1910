//! Multivariate polynomials over the conversion-rate variables: exact
//! symbolic determinants / adjugates of affine matrices and positivity
//! checking over a box.
//!
//! Representation is a dense exponent map (`exponent vector -> coefficient`);
//! variable counts are tiny (the number of conversion reactions), degrees are
//! bounded by the matrix dimension.

use crate::model::AffineMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Guard on symbolic determinant size (matrix dimension and variable count).
pub const MAX_DET_DIM: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("size guard exceeded: dimension {dim} or {nvars} variables beyond {MAX_DET_DIM}")]
    SizeGuard { dim: usize, nvars: usize },
    #[error("matrix must be square")]
    NotSquare,
}

/// A real-coefficient polynomial in an ordered variable list. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPoly {
    pub variables: Vec<String>,
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl MultiPoly {
    pub fn zero(variables: Vec<String>) -> Self {
        MultiPoly { variables, terms: BTreeMap::new() }
    }

    pub fn constant(variables: Vec<String>, c: f64) -> Self {
        let mut p = MultiPoly::zero(variables);
        if c != 0.0 {
            p.terms.insert(vec![0; p.variables.len()], c);
        }
        p
    }

    /// Monomial `c * variables[idx]`.
    pub fn variable(variables: Vec<String>, idx: usize, c: f64) -> Self {
        let mut p = MultiPoly::zero(variables);
        if c != 0.0 {
            let mut e = vec![0; p.variables.len()];
            e[idx] = 1;
            p.terms.insert(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn insert(&mut self, exp: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(exp);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get() + c;
                if v == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.variables, other.variables);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            variables: self.variables.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: f64) -> MultiPoly {
        if s == 0.0 {
            return MultiPoly::zero(self.variables.clone());
        }
        MultiPoly {
            variables: self.variables.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.variables, other.variables);
        let mut out = MultiPoly::zero(self.variables.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars());
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&p, &v)| v.powi(p as i32)).product::<f64>())
            .sum()
    }

    /// Interval-arithmetic enclosure of the polynomial's range over a box.
    pub fn eval_interval(&self, box_: &[(f64, f64)]) -> (f64, f64) {
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for (e, c) in &self.terms {
            let (mut mlo, mut mhi) = (1.0f64, 1.0f64);
            for (&p, &(xlo, xhi)) in e.iter().zip(box_) {
                if p == 0 {
                    continue;
                }
                let (plo, phi) = pow_interval(xlo, xhi, p);
                let candidates = [mlo * plo, mlo * phi, mhi * plo, mhi * phi];
                mlo = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
                mhi = candidates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            }
            if *c >= 0.0 {
                lo += c * mlo;
                hi += c * mhi;
            } else {
                lo += c * mhi;
                hi += c * mlo;
            }
        }
        (lo, hi)
    }
}

fn pow_interval(lo: f64, hi: f64, p: u32) -> (f64, f64) {
    let a = lo.powi(p as i32);
    let b = hi.powi(p as i32);
    if p % 2 == 1 || lo >= 0.0 {
        (a.min(b), a.max(b))
    } else if hi <= 0.0 {
        (b.min(a), b.max(a))
    } else {
        // even power across zero
        (0.0, a.max(b))
    }
}

/// Graded-lex pretty printing (total degree first, then lexicographic).
impl std::fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| a.cmp(b))
        });
        for (idx, e) in keys.iter().enumerate() {
            let c = self.terms[*e];
            if idx == 0 {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else if c < 0.0 {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mag = c.abs();
            let is_const = e.iter().all(|&p| p == 0);
            if (mag - 1.0).abs() > 1e-15 || is_const {
                write!(f, "{mag}")?;
                if !is_const {
                    f.write_str("*")?;
                }
            }
            let mut first = true;
            for (v, &p) in self.variables.iter().zip(e.iter()) {
                if p == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                if p == 1 {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{v}^{p}")?;
                }
            }
        }
        Ok(())
    }
}

/// Express an affine matrix over the listed variables as entrywise
/// polynomials (symbols not in `variables` must have been substituted away).
fn entry_polys(m: &AffineMatrix, variables: &[String]) -> Vec<Vec<MultiPoly>> {
    let vars: Vec<String> = variables.to_vec();
    let index: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let (c, coeffs) = m.entry(i, j);
                    let mut p = MultiPoly::constant(vars.clone(), c);
                    for (sym, coeff) in coeffs {
                        let idx = *index
                            .get(sym)
                            .unwrap_or_else(|| panic!("symbol `{sym}` not in variable list"));
                        p = p.add(&MultiPoly::variable(vars.clone(), idx, coeff));
                    }
                    p
                })
                .collect()
        })
        .collect()
}

/// Exact symbolic determinant of an affine matrix, by expansion over the
/// first remaining row with memoization on column subsets (2^d minors).
pub fn det_poly(m: &AffineMatrix, variables: &[String]) -> Result<MultiPoly, PolyError> {
    if m.rows() != m.cols() {
        return Err(PolyError::NotSquare);
    }
    let d = m.rows();
    if d > MAX_DET_DIM || variables.len() > MAX_DET_DIM {
        return Err(PolyError::SizeGuard { dim: d, nvars: variables.len() });
    }
    let entries = entry_polys(m, variables);
    Ok(det_of_entries(&entries, variables))
}

fn det_of_entries(entries: &[Vec<MultiPoly>], variables: &[String]) -> MultiPoly {
    let d = entries.len();
    if d == 0 {
        return MultiPoly::constant(variables.to_vec(), 1.0);
    }
    // memo[mask] = determinant of the submatrix on rows d-|mask|..d and the
    // column subset `mask`.
    let full: usize = (1 << d) - 1;
    let mut memo: Vec<Option<MultiPoly>> = vec![None; 1 << d];
    memo[0] = Some(MultiPoly::constant(variables.to_vec(), 1.0));
    fn rec(mask: usize, d: usize, entries: &[Vec<MultiPoly>], memo: &mut Vec<Option<MultiPoly>>, variables: &[String]) -> MultiPoly {
        if let Some(p) = &memo[mask] {
            return p.clone();
        }
        let size = mask.count_ones() as usize;
        let row = d - size;
        let mut acc = MultiPoly::zero(variables.to_vec());
        let mut sign = 1.0;
        for j in 0..d {
            if mask & (1 << j) == 0 {
                continue;
            }
            let e = &entries[row][j];
            if !e.is_zero() {
                let sub = rec(mask & !(1 << j), d, entries, memo, variables);
                acc = acc.add(&e.mul(&sub).scale(sign));
            }
            sign = -sign;
        }
        memo[mask] = Some(acc.clone());
        acc
    }
    rec(full, d, entries, &mut memo, variables)
}

/// Adjugate matrix as polynomials: `Adj(M)[j][i] = (-1)^{i+j} * minor_{ij}`,
/// satisfying `Adj(M) * M = det(M) * I` as a polynomial identity.
pub fn adjugate_poly(m: &AffineMatrix, variables: &[String]) -> Result<Vec<Vec<MultiPoly>>, PolyError> {
    if m.rows() != m.cols() {
        return Err(PolyError::NotSquare);
    }
    let d = m.rows();
    if d > MAX_DET_DIM || variables.len() > MAX_DET_DIM {
        return Err(PolyError::SizeGuard { dim: d, nvars: variables.len() });
    }
    let entries = entry_polys(m, variables);
    let mut adj = vec![vec![MultiPoly::zero(variables.to_vec()); d]; d];
    if d == 1 {
        adj[0][0] = MultiPoly::constant(variables.to_vec(), 1.0);
        return Ok(adj);
    }
    for i in 0..d {
        for j in 0..d {
            let minor: Vec<Vec<MultiPoly>> = (0..d)
                .filter(|&r| r != i)
                .map(|r| (0..d).filter(|&c| c != j).map(|c| entries[r][c].clone()).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[j][i] = det_of_entries(&minor, variables).scale(sign);
        }
    }
    Ok(adj)
}

/// Outcome of the box positivity check.
#[derive(Debug, Clone, PartialEq)]
pub enum BoxPositivity {
    /// Interval arithmetic certified `p > 0` on every sub-box; carries the
    /// certified minimum lower bound.
    Positive { certified_min: f64 },
    /// A concrete point in the box with `p(x) <= 0`.
    CounterexampleFound { point: Vec<f64>, value: f64 },
    /// Subdivision budget exhausted; carries the tightest lower bound seen.
    Unknown { best_lower_bound: f64 },
}

/// Budget for branch-and-bound subdivision.
pub const MAX_SUBDIVISIONS: usize = 100_000;

/// Decide positivity of `p` over a closed box by interval-arithmetic
/// branch-and-bound; a coarse grid plus coordinate descent hunts for
/// counterexamples first. Three-valued by design: `Unknown` is surfaced to
/// the caller, not silently coerced.
pub fn box_positivity(p: &MultiPoly, box_: &[(f64, f64)]) -> BoxPositivity {
    assert_eq!(box_.len(), p.nvars());
    assert!(box_.iter().all(|&(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi));
    let n = p.nvars();
    if n == 0 {
        let v = p.eval(&[]);
        return if v > 0.0 {
            BoxPositivity::Positive { certified_min: v }
        } else {
            BoxPositivity::CounterexampleFound { point: Vec::new(), value: v }
        };
    }

    // Counterexample hunt: grid capped at 4^n (or 2048 points), then a few
    // rounds of coordinate descent from the minimizer.
    if let Some((pt, val)) = grid_min(p, box_) {
        if val <= 0.0 {
            return BoxPositivity::CounterexampleFound { point: pt, value: val };
        }
        let (pt, val) = coordinate_descent(p, box_, pt, val);
        if val <= 0.0 {
            return BoxPositivity::CounterexampleFound { point: pt, value: val };
        }
    }

    // Branch and bound on the interval lower bound.
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(box_.to_vec());
    let mut best_lower = f64::INFINITY;
    let mut expansions = 0usize;
    while let Some(bx) = queue.pop_front() {
        let (lo, _) = p.eval_interval(&bx);
        if lo > 0.0 {
            best_lower = best_lower.min(lo);
            continue;
        }
        let mid: Vec<f64> = bx.iter().map(|&(a, b)| 0.5 * (a + b)).collect();
        let v = p.eval(&mid);
        if v <= 0.0 {
            return BoxPositivity::CounterexampleFound { point: mid, value: v };
        }
        expansions += 1;
        if expansions > MAX_SUBDIVISIONS {
            return BoxPositivity::Unknown { best_lower_bound: lo };
        }
        // split the widest dimension
        let (widest, _) = bx
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (i, b - a))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let (a, b) = bx[widest];
        if b - a < 1e-12 {
            // degenerate box that interval arithmetic cannot tighten
            return BoxPositivity::Unknown { best_lower_bound: lo };
        }
        let m = 0.5 * (a + b);
        let mut left = bx.clone();
        left[widest] = (a, m);
        let mut right = bx;
        right[widest] = (m, b);
        queue.push_back(left);
        queue.push_back(right);
    }
    BoxPositivity::Positive { certified_min: if best_lower.is_finite() { best_lower } else { 0.0 } }
}

fn grid_min(p: &MultiPoly, box_: &[(f64, f64)]) -> Option<(Vec<f64>, f64)> {
    let n = p.nvars();
    let per_dim = if n <= 5 { 4usize } else { 2usize };
    let total: usize = per_dim.checked_pow(n as u32)?.min(4096);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for flat in 0..total {
        let mut idx = flat;
        let mut pt = Vec::with_capacity(n);
        for &(lo, hi) in box_ {
            let k = idx % per_dim;
            idx /= per_dim;
            let t = if per_dim == 1 { 0.5 } else { k as f64 / (per_dim - 1) as f64 };
            pt.push(lo + t * (hi - lo));
        }
        let v = p.eval(&pt);
        if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
            best = Some((pt, v));
        }
    }
    best
}

fn coordinate_descent(p: &MultiPoly, box_: &[(f64, f64)], mut pt: Vec<f64>, mut val: f64) -> (Vec<f64>, f64) {
    for _round in 0..40 {
        let mut improved = false;
        for dim in 0..pt.len() {
            let (lo, hi) = box_[dim];
            let step = 0.25 * (hi - lo);
            if step == 0.0 {
                continue;
            }
            for scale in [1.0, 0.25, 0.0625] {
                for dir in [-1.0, 1.0] {
                    let cand = (pt[dim] + dir * scale * step).clamp(lo, hi);
                    if cand == pt[dim] {
                        continue;
                    }
                    let mut q = pt.clone();
                    q[dim] = cand;
                    let v = p.eval(&q);
                    if v < val {
                        pt = q;
                        val = v;
                        improved = true;
                    }
                }
            }
        }
        if !improved || val <= 0.0 {
            break;
        }
    }
    (pt, val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::Mat;
    use crate::model::AffineMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn det_single_variable() {
        // [[-x]] -> -x
        let mut m = AffineMatrix::zeros(1, 1);
        m.add_term("x", 0, 0, -1.0);
        let p = det_poly(&m, &vars(&["x"])).unwrap();
        assert_eq!(p.to_string(), "-x");
    }

    #[test]
    fn det_sir_reduced_cancellation() {
        // [[-(r2+a), b], [a, -(r3+b)]] with r2 = r3 = 1:
        // det = 1 + b + a  (the a*b terms cancel)
        let mut m = AffineMatrix::zeros(2, 2);
        m.constant[(0, 0)] = -1.0;
        m.constant[(1, 1)] = -1.0;
        m.add_term("a", 0, 0, -1.0);
        m.add_term("a", 1, 0, 1.0);
        m.add_term("b", 0, 1, 1.0);
        m.add_term("b", 1, 1, -1.0);
        let p = det_poly(&m, &vars(&["a", "b"])).unwrap();
        assert_eq!(p.eval(&[0.0, 0.0]), 1.0);
        assert_eq!(p.eval(&[2.0, 0.0]), 3.0);
        assert_eq!(p.eval(&[0.0, 5.0]), 6.0);
        assert_eq!(p.eval(&[2.0, 5.0]), 8.0); // no ab cross term
        assert_eq!(p.total_degree(), 1);
    }

    #[test]
    fn det_matches_numeric_on_random_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let names = vars(&["x", "y", "z"]);
        for _ in 0..100 {
            let mut m = AffineMatrix::zeros(4, 4);
            for i in 0..4 {
                for j in 0..4 {
                    m.constant[(i, j)] = rng.gen_range(-2.0..2.0);
                    for v in &names {
                        if rng.gen_bool(0.4) {
                            m.add_term(v, i, j, rng.gen_range(-1.0..1.0));
                        }
                    }
                }
            }
            let p = det_poly(&m, &names).unwrap();
            let sample: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..2.0)).collect();
            let values: BTreeMap<String, f64> =
                names.iter().cloned().zip(sample.iter().cloned()).collect();
            let num = m.eval(&values).det();
            let sym = p.eval(&sample);
            let scale = num.abs().max(1.0);
            assert!((num - sym).abs() / scale < 1e-8, "num {num} vs sym {sym}");
        }
    }

    #[test]
    fn det_triangular_is_diagonal_product() {
        let names = vars(&["x", "y"]);
        let mut m = AffineMatrix::zeros(3, 3);
        m.add_term("x", 0, 0, 1.0);
        m.add_term("y", 1, 1, -2.0);
        m.constant[(2, 2)] = 3.0;
        m.add_term("x", 0, 1, 5.0); // upper triangle only
        m.constant[(0, 2)] = 1.0;
        m.add_term("y", 1, 2, 2.0);
        let p = det_poly(&m, &names).unwrap();
        let q = MultiPoly::variable(names.clone(), 0, 1.0)
            .mul(&MultiPoly::variable(names.clone(), 1, -2.0))
            .scale(3.0);
        assert_eq!(p, q);
    }

    #[test]
    fn adjugate_2x2_closed_form() {
        let names = vars(&["a", "b", "c", "e"]);
        let mut m = AffineMatrix::zeros(2, 2);
        m.add_term("a", 0, 0, 1.0);
        m.add_term("b", 0, 1, 1.0);
        m.add_term("c", 1, 0, 1.0);
        m.add_term("e", 1, 1, 1.0);
        let adj = adjugate_poly(&m, &names).unwrap();
        assert_eq!(adj[0][0].to_string(), "e");
        assert_eq!(adj[0][1].to_string(), "-b");
        assert_eq!(adj[1][0].to_string(), "-c");
        assert_eq!(adj[1][1].to_string(), "a");
    }

    #[test]
    fn adjugate_identity_property() {
        // Adj(M) * M = det(M) * I at random samples.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let names = vars(&["x", "y"]);
        for _ in 0..50 {
            let d = 3;
            let mut m = AffineMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    m.constant[(i, j)] = rng.gen_range(-2.0..2.0);
                    if rng.gen_bool(0.5) {
                        m.add_term(&names[rng.gen_range(0..2)], i, j, rng.gen_range(-1.0..1.0));
                    }
                }
            }
            let adj = adjugate_poly(&m, &names).unwrap();
            let det = det_poly(&m, &names).unwrap();
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(0.5..1.5)).collect();
            let values: BTreeMap<String, f64> = names.iter().cloned().zip(x.iter().cloned()).collect();
            let m_num = m.eval(&values);
            let adj_num = Mat::from_rows(
                &adj.iter().map(|row| row.iter().map(|p| p.eval(&x)).collect()).collect::<Vec<_>>(),
            );
            let prod = adj_num.matmul(&m_num);
            let want = Mat::identity(d).scale(det.eval(&x));
            assert!(prod.max_abs_diff(&want) < 1e-8 * want.max_abs().max(1.0));
            let degree_ok = adj.iter().flatten().all(|p| p.total_degree() <= (d as u32) - 1);
            assert!(degree_ok);
        }
    }

    #[test]
    fn adjugate_of_identity() {
        let m = AffineMatrix { constant: Mat::identity(4), terms: BTreeMap::new() };
        let adj = adjugate_poly(&m, &[]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(adj[i][j].eval(&[]), want);
            }
        }
    }

    #[test]
    fn size_guard() {
        let m = AffineMatrix::zeros(9, 9);
        assert!(matches!(det_poly(&m, &[]), Err(PolyError::SizeGuard { .. })));
    }

    #[test]
    fn box_positivity_trivial_cases() {
        let names = vars(&["x"]);
        let p = MultiPoly::variable(names.clone(), 0, 1.0).add(&MultiPoly::constant(names.clone(), 1.0));
        assert!(matches!(box_positivity(&p, &[(0.0, 1.0)]), BoxPositivity::Positive { .. }));
        let q = MultiPoly::variable(names.clone(), 0, 1.0).sub(&MultiPoly::constant(names, 1.0));
        match box_positivity(&q, &[(0.0, 2.0)]) {
            BoxPositivity::CounterexampleFound { point, value } => {
                assert!(point[0] <= 1.0 + 1e-9);
                assert!(value <= 0.0);
            }
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn box_positivity_needs_subdivision() {
        // (x - 1)^2 + 0.01 is positive but a single interval evaluation of
        // x^2 - 2x + 1.01 over [0, 2] is inconclusive.
        let names = vars(&["x"]);
        let x = MultiPoly::variable(names.clone(), 0, 1.0);
        let p = x.mul(&x).sub(&x.scale(2.0)).add(&MultiPoly::constant(names, 1.01));
        match box_positivity(&p, &[(0.0, 2.0)]) {
            BoxPositivity::Positive { certified_min } => assert!(certified_min > 0.0),
            other => panic!("expected positive, got {other:?}"),
        }
    }

    #[test]
    fn box_positivity_sound_vs_grid_oracle() {
        // Soundness on random polynomials: never Positive when a dense grid
        // finds a nonpositive value.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let names = vars(&["x", "y"]);
        for _ in 0..100 {
            let mut p = MultiPoly::zero(names.clone());
            for _ in 0..6 {
                let e = vec![rng.gen_range(0..3u32), rng.gen_range(0..3u32)];
                p.insert(e, rng.gen_range(-1.0..1.5));
            }
            let bx = [(0.0, 2.0), (0.0, 2.0)];
            let verdict = box_positivity(&p, &bx);
            let mut grid_min = f64::INFINITY;
            for i in 0..=100 {
                for j in 0..=100 {
                    let pt = [2.0 * i as f64 / 100.0, 2.0 * j as f64 / 100.0];
                    grid_min = grid_min.min(p.eval(&pt));
                }
            }
            if grid_min <= 0.0 {
                assert!(
                    !matches!(verdict, BoxPositivity::Positive { .. }),
                    "claimed positive but grid found {grid_min}"
                );
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn ring_laws_at_random_points(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let names = vec!["x".to_string(), "y".to_string()];
            let mut mk = |rng: &mut ChaCha8Rng| {
                let mut p = MultiPoly::zero(names.clone());
                for _ in 0..4 {
                    p.insert(vec![rng.gen_range(0..3u32), rng.gen_range(0..3u32)], rng.gen_range(-2.0..2.0));
                }
                p
            };
            let p = mk(&mut rng);
            let q = mk(&mut rng);
            let x = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            let prod = p.mul(&q).eval(&x);
            let sum = p.add(&q).eval(&x);
            let scale = prod.abs().max(1.0);
            proptest::prop_assert!((prod - p.eval(&x) * q.eval(&x)).abs() / scale < 1e-10);
            let scale = sum.abs().max(1.0);
            proptest::prop_assert!((sum - (p.eval(&x) + q.eval(&x))).abs() / scale < 1e-10);
        }
    }
}
