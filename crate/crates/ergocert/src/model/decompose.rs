//! Stoichiometric decomposition and reaction classification.
//!
//! Columns of `S` are split by reaction order into zeroth / first / second
//! order blocks, and first-order columns are further classified by the sign
//! pattern of the stoichiometric column alone:
//!
//! * degradation (`dg`): column ≤ 0,
//! * catalytic (`ct`): column ≥ 0,
//! * conversion (`cv`): column with both a negative and a positive entry.

use super::ReactionNetwork;
use crate::linopt::{solve_feasibility, FeasibilityStatus, LinearFeasibilityProblem};
use crate::mat::Mat;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FirstOrderClass {
    Degradation,
    Catalytic,
    Conversion,
}

/// A first-order reaction's propensity row: `rate * x[reactant]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderReaction {
    /// Column index in `S`.
    pub column: usize,
    pub symbol: String,
    pub reactant: usize,
    pub class: FirstOrderClass,
}

/// A second-order reaction's propensity: `rate * x_i * x_j` (or
/// `rate * x_i * (x_i - 1)` when `i == j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimolecularReaction {
    pub column: usize,
    pub symbol: String,
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoichiometricDecomposition {
    /// Full stoichiometry matrix, d x K, columns in source order.
    pub s: Vec<Vec<i64>>,
    /// Column index lists into `s`, source order within each block.
    pub s0: Vec<usize>,
    pub dg: Vec<usize>,
    pub ct: Vec<usize>,
    pub cv: Vec<usize>,
    pub sb: Vec<usize>,
    /// Zeroth-order rate symbols, aligned with `s0`.
    pub w0: Vec<String>,
    /// First-order propensity rows, aligned with `dg` ++ `ct` ++ `cv` when
    /// filtered by class; stored in source order.
    pub first_order: Vec<FirstOrderReaction>,
    pub bimolecular: Vec<BimolecularReaction>,
    pub num_species: usize,
}

impl StoichiometricDecomposition {
    pub fn column(&self, k: usize) -> Vec<i64> {
        (0..self.num_species).map(|i| self.s[i][k]).collect()
    }

    fn block(&self, cols: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.num_species, cols.len());
        for (jj, &k) in cols.iter().enumerate() {
            for i in 0..self.num_species {
                m[(i, jj)] = self.s[i][k] as f64;
            }
        }
        m
    }

    /// The `S_b` block (d x n_b).
    pub fn sb_matrix(&self) -> Mat {
        self.block(&self.sb)
    }

    /// The `S_ct` block (d x n_ct).
    pub fn sct_matrix(&self) -> Mat {
        self.block(&self.ct)
    }

    /// `W_ct` (n_ct x d): row per catalytic reaction with a single 1 in the
    /// reactant column, so that `diag(rho_ct) * W_ct * x` is the catalytic
    /// propensity vector.
    pub fn wct_matrix(&self) -> Mat {
        let ct: Vec<&FirstOrderReaction> =
            self.first_order.iter().filter(|r| r.class == FirstOrderClass::Catalytic).collect();
        let mut m = Mat::zeros(ct.len(), self.num_species);
        for (row, r) in ct.iter().enumerate() {
            m[(row, r.reactant)] = 1.0;
        }
        m
    }

    pub fn n0(&self) -> usize {
        self.s0.len()
    }

    pub fn nu(&self) -> usize {
        self.first_order.len()
    }

    pub fn nb(&self) -> usize {
        self.sb.len()
    }

    pub fn n_dg(&self) -> usize {
        self.dg.len()
    }

    pub fn n_ct(&self) -> usize {
        self.ct.len()
    }

    pub fn n_cv(&self) -> usize {
        self.cv.len()
    }
}

/// Build the stoichiometric decomposition. Classification is total: every
/// reaction lands in exactly one block.
pub fn decompose(net: &ReactionNetwork) -> StoichiometricDecomposition {
    let d = net.num_species();
    let k_total = net.reactions.len();
    let mut s = vec![vec![0i64; k_total]; d];
    let mut dec = StoichiometricDecomposition {
        s: Vec::new(),
        s0: Vec::new(),
        dg: Vec::new(),
        ct: Vec::new(),
        cv: Vec::new(),
        sb: Vec::new(),
        w0: Vec::new(),
        first_order: Vec::new(),
        bimolecular: Vec::new(),
        num_species: d,
    };

    for (k, r) in net.reactions.iter().enumerate() {
        let z = r.stoichiometry(d);
        for i in 0..d {
            s[i][k] = z[i];
        }
        match r.order() {
            0 => {
                dec.s0.push(k);
                dec.w0.push(r.rate.clone());
            }
            1 => {
                let reactant = r.reactants[0].0;
                let has_neg = z.iter().any(|&v| v < 0);
                let has_pos = z.iter().any(|&v| v > 0);
                let class = match (has_neg, has_pos) {
                    (true, false) => FirstOrderClass::Degradation,
                    (false, true) => FirstOrderClass::Catalytic,
                    (true, true) => FirstOrderClass::Conversion,
                    (false, false) => unreachable!("zero columns are rejected at parse time"),
                };
                match class {
                    FirstOrderClass::Degradation => dec.dg.push(k),
                    FirstOrderClass::Catalytic => dec.ct.push(k),
                    FirstOrderClass::Conversion => dec.cv.push(k),
                }
                dec.first_order.push(FirstOrderReaction { column: k, symbol: r.rate.clone(), reactant, class });
            }
            2 => {
                let (i, j) = match r.reactants.as_slice() {
                    [(i, 2)] => (*i, *i),
                    [(i, 1), (j, 1)] => (*i, *j),
                    _ => unreachable!("order-2 complexes have one of two shapes"),
                };
                dec.sb.push(k);
                dec.bimolecular.push(BimolecularReaction { column: k, symbol: r.rate.clone(), i, j });
            }
            _ => unreachable!("trimolecular complexes are rejected at parse time"),
        }
    }
    dec.s = s;
    dec
}

/// Openness test (no conserved nonnegative species combination).
///
/// A network is open iff the only `z >= 0` with `zᵀS = 0` is zero. Decided by
/// the LP `{zᵀS = 0, 0 <= z <= 1, sum z >= 1}`: a feasible point is a
/// conservation-law witness (any nonzero nonnegative kernel vector rescales
/// into this box), infeasibility means open.
pub fn is_open(dec: &StoichiometricDecomposition) -> (bool, Option<Vec<f64>>) {
    let d = dec.num_species;
    let k_total = dec.s.first().map_or(0, Vec::len);
    let mut p = LinearFeasibilityProblem::new(d);
    for i in 0..d {
        p.set_bounds(i, 0.0, 1.0);
    }
    for k in 0..k_total {
        let row: Vec<f64> = (0..d).map(|i| dec.s[i][k] as f64).collect();
        p.push_eq(row, 0.0);
    }
    // sum z >= 1  <=>  -sum z <= -1
    p.push_le(vec![-1.0; d], -1.0);
    match solve_feasibility(&p).status {
        FeasibilityStatus::Feasible(witness) => {
            let peak = witness.iter().cloned().fold(0.0f64, f64::max);
            let scaled = witness.iter().map(|z| z / peak).collect();
            (false, Some(scaled))
        }
        _ => (true, None),
    }
}

/// True iff the network has at least one conversion reaction. Exactness of
/// the interval (with closed domains) and sign frameworks hinges on this.
pub fn has_conversion(dec: &StoichiometricDecomposition) -> bool {
    dec.n_cv() > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_network;

    #[test]
    fn classification_by_column_sign() {
        let net = parse_network(
            "X1 -> 0 @ a\nX1 -> X1 + X2 @ b\nX2 -> X4 @ c\n0 -> X3 @ e\nX3 + X4 -> X3 @ f\n\
             a = 1.0\nb = 1.0\nc = 1.0\ne = 1.0\nf = 1.0",
        )
        .unwrap();
        let dec = decompose(&net);
        assert_eq!(dec.dg, vec![0]);
        assert_eq!(dec.ct, vec![1]);
        assert_eq!(dec.cv, vec![2]);
        assert_eq!(dec.s0, vec![3]);
        assert_eq!(dec.sb, vec![4]);
        // X2 -> X4 has column e_X4 - e_X2; X4 is interned before X3 here.
        assert_eq!(dec.column(2), vec![0, -1, 1, 0]);
    }

    #[test]
    fn birth_death_is_open() {
        let net = parse_network("0 -> X1 @ kb\nX1 -> 0 @ kd\nkb = 2.0\nkd = 1.0").unwrap();
        let (open, w) = is_open(&decompose(&net));
        assert!(open);
        assert!(w.is_none());
    }

    #[test]
    fn pure_conversion_pair_is_closed() {
        let net = parse_network("X1 -> X2 @ a\nX2 -> X1 @ b\na = 1.0\nb = 1.0").unwrap();
        let (open, w) = is_open(&decompose(&net));
        assert!(!open);
        let w = w.unwrap();
        assert!((w[0] - 1.0).abs() < 1e-9 && (w[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn conversion_detection() {
        let net = parse_network("0 -> X1 @ kb\nX1 -> 0 @ kd\nkb = 2.0\nkd = 1.0").unwrap();
        assert!(!has_conversion(&decompose(&net)));
        let net = parse_network("X1 -> X2 @ a\nX2 -> 0 @ b\na = 1.0\nb = 1.0").unwrap();
        assert!(has_conversion(&decompose(&net)));
    }
}
