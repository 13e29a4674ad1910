//! Affine symbolic matrices, the characteristic model `A(rho_u)` /
//! `b0(rho_0)`, sign patterns, and entrywise interval bounds.

use super::decompose::{FirstOrderClass, StoichiometricDecomposition};
use super::{ParameterDomain, ReactionNetwork};
use crate::mat::Mat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// A matrix of affine forms: `constant + Σ_sym sym * terms[sym]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMatrix {
    pub constant: Mat,
    pub terms: BTreeMap<String, Mat>,
}

impl AffineMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        AffineMatrix { constant: Mat::zeros(rows, cols), terms: BTreeMap::new() }
    }

    pub fn rows(&self) -> usize {
        self.constant.rows()
    }

    pub fn cols(&self) -> usize {
        self.constant.cols()
    }

    pub fn symbols(&self) -> Vec<&str> {
        self.terms.keys().map(String::as_str).collect()
    }

    pub fn add_term(&mut self, symbol: &str, i: usize, j: usize, coeff: f64) {
        let rows = self.rows();
        let cols = self.cols();
        let m = self.terms.entry(symbol.to_string()).or_insert_with(|| Mat::zeros(rows, cols));
        m[(i, j)] += coeff;
    }

    /// The affine form of entry `(i, j)` as (constant, per-symbol coefficients).
    pub fn entry(&self, i: usize, j: usize) -> (f64, Vec<(&str, f64)>) {
        let coeffs = self
            .terms
            .iter()
            .filter_map(|(s, m)| {
                let c = m[(i, j)];
                (c != 0.0).then_some((s.as_str(), c))
            })
            .collect();
        (self.constant[(i, j)], coeffs)
    }

    pub fn eval(&self, values: &BTreeMap<String, f64>) -> Mat {
        let mut out = self.constant.clone();
        for (sym, coeff) in &self.terms {
            let v = *values.get(sym).unwrap_or_else(|| panic!("missing value for symbol `{sym}`"));
            for i in 0..out.rows() {
                for j in 0..out.cols() {
                    out[(i, j)] += v * coeff[(i, j)];
                }
            }
        }
        out
    }

    /// Substitute some symbols by fixed values, folding them into the
    /// constant part; the rest stay symbolic.
    pub fn substitute(&self, values: &BTreeMap<String, f64>) -> AffineMatrix {
        let mut constant = self.constant.clone();
        let mut terms = BTreeMap::new();
        for (sym, coeff) in &self.terms {
            if let Some(v) = values.get(sym) {
                for i in 0..constant.rows() {
                    for j in 0..constant.cols() {
                        constant[(i, j)] += v * coeff[(i, j)];
                    }
                }
            } else {
                terms.insert(sym.clone(), coeff.clone());
            }
        }
        AffineMatrix { constant, terms }
    }

    /// Left-multiply each coefficient matrix by `m`.
    pub fn left_mul(&self, m: &Mat) -> AffineMatrix {
        AffineMatrix {
            constant: m.matmul(&self.constant),
            terms: self.terms.iter().map(|(s, t)| (s.clone(), m.matmul(t))).collect(),
        }
    }

    /// Keep only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> AffineMatrix {
        let pick = |m: &Mat| {
            let mut out = Mat::zeros(m.rows(), cols.len());
            for (jj, &j) in cols.iter().enumerate() {
                for i in 0..m.rows() {
                    out[(i, jj)] = m[(i, j)];
                }
            }
            out
        };
        AffineMatrix {
            constant: pick(&self.constant),
            terms: self.terms.iter().filter_map(|(s, t)| {
                let p = pick(t);
                (p.max_abs() != 0.0).then(|| (s.clone(), p))
            }).collect(),
        }
    }
}

/// A vector of affine forms (used for the offset vector `b0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineVector {
    pub constant: Vec<f64>,
    pub terms: BTreeMap<String, Vec<f64>>,
}

impl AffineVector {
    pub fn zeros(d: usize) -> Self {
        AffineVector { constant: vec![0.0; d], terms: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.constant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constant.is_empty()
    }

    pub fn eval(&self, values: &BTreeMap<String, f64>) -> Vec<f64> {
        let mut out = self.constant.clone();
        for (sym, coeff) in &self.terms {
            let v = *values.get(sym).unwrap_or_else(|| panic!("missing value for symbol `{sym}`"));
            for (o, c) in out.iter_mut().zip(coeff) {
                *o += v * c;
            }
        }
        out
    }

    /// Entrywise upper bound over the symbol box; errors on unbounded
    /// symbols. Coefficients of `b0` are nonnegative, so the upper bound
    /// sits at each symbol's upper endpoint.
    pub fn upper_bound(
        &self,
        domains: &BTreeMap<String, ParameterDomain>,
    ) -> Result<Vec<f64>, IntervalError> {
        let mut out = self.constant.clone();
        for (sym, coeff) in &self.terms {
            let dom = domains.get(sym).ok_or_else(|| IntervalError::MissingDomain { symbol: sym.clone() })?;
            let (lo, hi) = dom.bounds().ok_or_else(|| IntervalError::UnboundedSymbol { symbol: sym.clone() })?;
            for (o, c) in out.iter_mut().zip(coeff) {
                *o += if *c >= 0.0 { c * hi } else { c * lo };
            }
        }
        Ok(out)
    }
}

/// The characteristic matrix `A = S_u W(rho_u)` and offset vector
/// `b0 = S_0 w0(rho_0)` in affine symbolic form, plus the dg/ct/cv symbol
/// split. For any strictly positive assignment the evaluated `A` is Metzler
/// and `b0` is nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicModel {
    pub a: AffineMatrix,
    pub b0: AffineVector,
    pub dg_symbols: Vec<String>,
    pub ct_symbols: Vec<String>,
    pub cv_symbols: Vec<String>,
}

impl CharacteristicModel {
    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// Evaluate `A` at fixed values for every first-order symbol.
    pub fn eval_a(&self, values: &BTreeMap<String, f64>) -> Mat {
        self.a.eval(values)
    }
}

/// Build the characteristic model from a decomposition. One coefficient
/// matrix per first-order rate symbol (`zeta_k e_{reactant}ᵀ`), one
/// coefficient vector per zeroth-order symbol (`zeta_k`).
pub fn characteristic_model(dec: &StoichiometricDecomposition) -> CharacteristicModel {
    let d = dec.num_species;
    let mut a = AffineMatrix::zeros(d, d);
    let mut dg_symbols = Vec::new();
    let mut ct_symbols = Vec::new();
    let mut cv_symbols = Vec::new();
    for r in &dec.first_order {
        let z = dec.column(r.column);
        for i in 0..d {
            if z[i] != 0 {
                a.add_term(&r.symbol, i, r.reactant, z[i] as f64);
            }
        }
        match r.class {
            FirstOrderClass::Degradation => dg_symbols.push(r.symbol.clone()),
            FirstOrderClass::Catalytic => ct_symbols.push(r.symbol.clone()),
            FirstOrderClass::Conversion => cv_symbols.push(r.symbol.clone()),
        }
    }
    let mut b0 = AffineVector::zeros(d);
    for (sym, &col) in dec.w0.iter().zip(&dec.s0) {
        let z = dec.column(col);
        let coeff: Vec<f64> = z.iter().map(|&v| v as f64).collect();
        let entry = b0.terms.entry(sym.clone()).or_insert_with(|| vec![0.0; d]);
        for (e, c) in entry.iter_mut().zip(&coeff) {
            *e += c;
        }
    }
    CharacteristicModel { a, b0, dg_symbols, ct_symbols, cv_symbols }
}

/// Sign symbols: 0, ⊕, ⊖.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Zero,
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Zero => 0.0,
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Zero => "0",
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignMatrix {
    pub entries: Vec<Vec<Sign>>,
}

impl SignMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// The sgn(·) image as a real matrix with entries in {-1, 0, 1}.
    pub fn to_real(&self) -> Mat {
        Mat::from_rows(&self.entries.iter().map(|row| row.iter().map(|s| s.as_f64()).collect()).collect::<Vec<_>>())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SignError {
    /// Entries whose affine form mixes positive and negative coefficients
    /// (conversion + catalysis collision); the sign framework is not an
    /// exact model for such networks.
    #[error("indeterminate sign at entries {entries:?}: mixed-sign affine forms")]
    Indeterminate { entries: Vec<(usize, usize)> },
}

fn entry_sign(constant: f64, coeffs: &[(&str, f64)]) -> Result<Sign, ()> {
    let has_pos = constant > 0.0 || coeffs.iter().any(|&(_, c)| c > 0.0);
    let has_neg = constant < 0.0 || coeffs.iter().any(|&(_, c)| c < 0.0);
    match (has_pos, has_neg) {
        (false, false) => Ok(Sign::Zero),
        (true, false) => Ok(Sign::Plus),
        (false, true) => Ok(Sign::Minus),
        (true, true) => Err(()),
    }
}

/// Entrywise sign of the symbolic matrix with every symbol set positive.
/// Errors with the offending entry indices when any affine form mixes signs.
pub fn sign_pattern(model: &CharacteristicModel) -> Result<SignMatrix, SignError> {
    let (sm, mixed) = sign_pattern_resolved(model);
    if mixed.is_empty() {
        Ok(sm)
    } else {
        Err(SignError::Indeterminate { entries: mixed })
    }
}

/// As [`sign_pattern`], but mixed-sign entries are resolved to ⊖ (they are
/// generically nonzero; only the structural framework may use this) and
/// reported alongside.
pub fn sign_pattern_resolved(model: &CharacteristicModel) -> (SignMatrix, Vec<(usize, usize)>) {
    let d = model.dim();
    let mut entries = vec![vec![Sign::Zero; d]; d];
    let mut mixed = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let (c, coeffs) = model.a.entry(i, j);
            match entry_sign(c, &coeffs) {
                Ok(s) => entries[i][j] = s,
                Err(()) => {
                    entries[i][j] = Sign::Minus;
                    mixed.push((i, j));
                }
            }
        }
    }
    (SignMatrix { entries }, mixed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundSide {
    Lower,
    Upper,
}

/// A bound that sits on an open interval endpoint and is therefore not
/// attained by any admissible parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonAttainedBound {
    pub row: usize,
    pub col: usize,
    pub side: BoundSide,
    pub symbol: String,
}

/// Entrywise interval hull `[A^-, A^+]` of a symbolic matrix over the
/// parameter box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalMatrix {
    pub lower: Mat,
    pub upper: Mat,
    /// Bounds computed on the closure of half-open domains; each entry here
    /// flags a bound that no admissible parameter vector attains.
    pub warnings: Vec<NonAttainedBound>,
}

#[derive(Debug, Error, PartialEq)]
pub enum IntervalError {
    #[error("symbol `{symbol}` is unbounded; the interval framework needs bounds")]
    UnboundedSymbol { symbol: String },
    #[error("symbol `{symbol}` has no declared domain")]
    MissingDomain { symbol: String },
}

/// Entrywise min/max of each affine entry over the box. Each bound is
/// attained at a box vertex chosen coefficient-sign-wise; half-open
/// endpoints are used as-is (closure) and flagged.
pub fn interval_bounds(
    a: &AffineMatrix,
    domains: &BTreeMap<String, ParameterDomain>,
) -> Result<IntervalMatrix, IntervalError> {
    let rows = a.rows();
    let cols = a.cols();
    let mut lower = a.constant.clone();
    let mut upper = a.constant.clone();
    let mut warnings = Vec::new();
    for (sym, coeff) in &a.terms {
        let dom = domains.get(sym).ok_or_else(|| IntervalError::MissingDomain { symbol: sym.clone() })?;
        let (lo, hi) = dom.bounds().ok_or_else(|| IntervalError::UnboundedSymbol { symbol: sym.clone() })?;
        let (lo_closed, hi_closed) = match dom {
            ParameterDomain::Interval { lo_closed, hi_closed, .. } => (*lo_closed, *hi_closed),
            _ => (true, true),
        };
        for i in 0..rows {
            for j in 0..cols {
                let c = coeff[(i, j)];
                if c == 0.0 {
                    continue;
                }
                let (lo_val, lo_at_open, hi_val, hi_at_open) = if c > 0.0 {
                    (c * lo, !lo_closed, c * hi, !hi_closed)
                } else {
                    (c * hi, !hi_closed, c * lo, !lo_closed)
                };
                lower[(i, j)] += lo_val;
                upper[(i, j)] += hi_val;
                if lo_at_open {
                    warnings.push(NonAttainedBound { row: i, col: j, side: BoundSide::Lower, symbol: sym.clone() });
                }
                if hi_at_open {
                    warnings.push(NonAttainedBound { row: i, col: j, side: BoundSide::Upper, symbol: sym.clone() });
                }
            }
        }
    }
    debug_assert!(lower.le(&upper, 1e-12));
    Ok(IntervalMatrix { lower, upper, warnings })
}

/// Canonical model dump: species, S (row-major), block column-index lists,
/// and the affine `A` / `b0`.
pub fn model_dump(
    net: &ReactionNetwork,
    dec: &StoichiometricDecomposition,
    model: &CharacteristicModel,
) -> serde_json::Value {
    serde_json::json!({
        "species": net.species,
        "S": dec.s,
        "blocks": {
            "s0": dec.s0,
            "dg": dec.dg,
            "ct": dec.ct,
            "cv": dec.cv,
            "sb": dec.sb,
        },
        "A": {
            "constant": model.a.constant,
            "terms": model.a.terms,
        },
        "b0": {
            "constant": model.b0.constant,
            "terms": model.b0.terms,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{decompose, parse_network};

    fn ex82_text() -> &'static str {
        concat!(
            "X1 -> 0 @ dg1\nX2 -> 0 @ dg2\nX3 -> 0 @ dg3\nX4 -> 0 @ dg4\n",
            "X1 -> X1 + X2 @ ct1\nX1 -> X1 + X3 @ ct2\nX4 -> X4 + X1 @ ct3\nX3 -> 2X3 @ ct4\n",
            "X2 -> X4 @ cv1\nX3 -> X4 @ cv2\nX4 -> X3 @ cv3\n",
            "dg1 = 1.0\ndg2 = 1.0\ndg3 = 1.0\ndg4 = 1.0\n",
            "ct1 = 1.0\nct2 = 1.0\nct3 = 1.0\nct4 = 1.0\n",
            "cv1 = 1.0\ncv2 = 1.0\ncv3 = 1.0\n"
        )
    }

    #[test]
    fn birth_death_characteristic() {
        let net = parse_network("0 -> X1 @ kb\nX1 -> 0 @ kd\nkb = 2.0\nkd = 1.0").unwrap();
        let model = characteristic_model(&decompose(&net));
        let mut vals = BTreeMap::new();
        vals.insert("kd".to_string(), 1.0);
        let a = model.eval_a(&vals);
        assert_eq!(a[(0, 0)], -1.0);
        let mut bvals = BTreeMap::new();
        bvals.insert("kb".to_string(), 2.0);
        assert_eq!(model.b0.eval(&bvals), vec![2.0]);
    }

    #[test]
    fn ex82_matrix_at_ones() {
        // Hand evaluation of the 4-species example at rho = 1:
        // diagonal (-1, -2, -1, -2), entry (3,3) mixes -dg3 - cv2 + ct4.
        let net = parse_network(ex82_text()).unwrap();
        let model = characteristic_model(&decompose(&net));
        let ones: BTreeMap<String, f64> =
            model.a.symbols().iter().map(|s| (s.to_string(), 1.0)).collect();
        let a = model.eval_a(&ones);
        assert!(a.is_metzler(0.0));
        for (i, want) in [-1.0, -2.0, -1.0, -2.0].iter().enumerate() {
            assert_eq!(a[(i, i)], *want, "diagonal {i}");
        }
        assert_eq!(a[(1, 0)], 1.0);
        assert_eq!(a[(2, 0)], 1.0);
        assert_eq!(a[(0, 3)], 1.0);
        assert_eq!(a[(3, 1)], 1.0);
        assert_eq!(a[(3, 2)], 1.0);
        assert_eq!(a[(2, 3)], 1.0);
        assert_eq!(a[(0, 1)], 0.0);
    }

    #[test]
    fn ex82_sign_indeterminate_at_3_3() {
        let net = parse_network(ex82_text()).unwrap();
        let model = characteristic_model(&decompose(&net));
        let err = sign_pattern(&model).unwrap_err();
        assert_eq!(err, SignError::Indeterminate { entries: vec![(2, 2)] });
        let (resolved, mixed) = sign_pattern_resolved(&model);
        assert_eq!(mixed, vec![(2, 2)]);
        assert_eq!(resolved.entries[2][2], Sign::Minus);
    }

    #[test]
    fn birth_death_sign() {
        let net = parse_network("0 -> X1 @ kb\nX1 -> 0 @ kd\nkb = 2.0\nkd = 1.0").unwrap();
        let model = characteristic_model(&decompose(&net));
        let sm = sign_pattern(&model).unwrap();
        assert_eq!(sm.entries, vec![vec![Sign::Minus]]);
    }

    #[test]
    fn interval_bounds_scalar() {
        let net = parse_network("X1 -> 0 @ k\nk in [1, 2]").unwrap();
        let model = characteristic_model(&decompose(&net));
        let iv = interval_bounds(&model.a, &net.parameter_domains).unwrap();
        assert_eq!(iv.lower[(0, 0)], -2.0);
        assert_eq!(iv.upper[(0, 0)], -1.0);
        assert!(iv.warnings.is_empty());
    }

    #[test]
    fn interval_bounds_conversion_decouple() {
        // The two-species conversion family: off-diagonal and diagonal
        // occurrences of the same symbol bound independently.
        let net = parse_network(
            "X1 -> 0 @ r1\nX1 -> X2 @ r2\nX2 -> 0 @ r3\nX2 -> X1 @ r4\nr1 = 1.0\nr3 = 1.0\nr2 in [1, 3]\nr4 in [1, 3]",
        )
        .unwrap();
        let model = characteristic_model(&decompose(&net));
        let iv = interval_bounds(&model.a, &net.parameter_domains).unwrap();
        assert_eq!(iv.upper.to_rows(), vec![vec![-2.0, 3.0], vec![3.0, -2.0]]);
        assert_eq!(iv.lower.to_rows(), vec![vec![-4.0, 1.0], vec![1.0, -4.0]]);
    }

    #[test]
    fn half_open_bound_warns() {
        let net = parse_network("X1 -> 0 @ d1\nX1 -> X1 + X2 @ r1\nd1 = 1.0\nr1 in (0, 1]").unwrap();
        let model = characteristic_model(&decompose(&net));
        let iv = interval_bounds(&model.a, &net.parameter_domains).unwrap();
        assert_eq!(iv.lower[(1, 0)], 0.0);
        assert!(iv
            .warnings
            .iter()
            .any(|w| w.row == 1 && w.col == 0 && w.side == BoundSide::Lower && w.symbol == "r1"));
    }

    #[test]
    fn unbounded_symbol_rejected() {
        let net = parse_network("X1 -> 0 @ k\nk > 0").unwrap();
        let model = characteristic_model(&decompose(&net));
        let err = interval_bounds(&model.a, &net.parameter_domains).unwrap_err();
        assert!(matches!(err, IntervalError::UnboundedSymbol { .. }));
    }
}
