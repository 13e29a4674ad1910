//! Reaction-network model: DSL parsing, stoichiometry, reaction
//! classification, and the characteristic matrix / offset vector.

mod affine;
mod decompose;
mod parse;

pub use affine::{
    characteristic_model, interval_bounds, model_dump, sign_pattern, sign_pattern_resolved,
    AffineMatrix, AffineVector, BoundSide, CharacteristicModel, IntervalMatrix, NonAttainedBound,
    Sign, SignError, SignMatrix,
};
pub use decompose::{decompose, has_conversion, is_open, StoichiometricDecomposition};
pub use parse::{parse_network, ParseError, ParseErrorKind};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Value domain of a single rate parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParameterDomain {
    /// A single known positive value.
    Fixed(f64),
    /// A bounded interval; the endpoint flags record whether each side is
    /// attained. Bounds are always computed on the closure.
    Interval { lo: f64, hi: f64, lo_closed: bool, hi_closed: bool },
    /// Any positive value (`symbol > 0` in the DSL).
    PositiveUnbounded,
}

impl ParameterDomain {
    /// Closed-hull bounds `[lo, hi]`; `None` for unbounded domains.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            ParameterDomain::Fixed(v) => Some((*v, *v)),
            ParameterDomain::Interval { lo, hi, .. } => Some((*lo, *hi)),
            ParameterDomain::PositiveUnbounded => None,
        }
    }

    pub fn fixed_value(&self) -> Option<f64> {
        match self {
            ParameterDomain::Fixed(v) => Some(*v),
            _ => None,
        }
    }

    /// Midpoint of the closed hull (the fixed value itself for `Fixed`).
    pub fn midpoint(&self) -> Option<f64> {
        self.bounds().map(|(lo, hi)| 0.5 * (lo + hi))
    }
}

/// A single reaction: reactant/product multisets over species indices plus a
/// rate symbol. Counts are per-species multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub reactants: Vec<(usize, u32)>,
    pub products: Vec<(usize, u32)>,
    pub rate: String,
}

impl Reaction {
    /// Total reactant multiplicity (reaction order).
    pub fn order(&self) -> u32 {
        self.reactants.iter().map(|(_, c)| c).sum()
    }

    /// Stoichiometric change vector over `d` species.
    pub fn stoichiometry(&self, d: usize) -> Vec<i64> {
        let mut z = vec![0i64; d];
        for &(i, c) in &self.products {
            z[i] += i64::from(c);
        }
        for &(i, c) in &self.reactants {
            z[i] -= i64::from(c);
        }
        z
    }
}

/// A validated mass-action reaction network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionNetwork {
    /// Species identifiers in source order; all matrices use this order.
    pub species: Vec<String>,
    pub reactions: Vec<Reaction>,
    pub parameter_domains: BTreeMap<String, ParameterDomain>,
}

impl ReactionNetwork {
    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    /// All rate parameters as fixed values; `Err` names the first symbol
    /// without a fixed domain.
    pub fn fixed_rates(&self) -> Result<BTreeMap<String, f64>, ModelError> {
        let mut out = BTreeMap::new();
        for (sym, dom) in &self.parameter_domains {
            match dom.fixed_value() {
                Some(v) => {
                    out.insert(sym.clone(), v);
                }
                None => return Err(ModelError::NotFixed { symbol: sym.clone() }),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parameter `{symbol}` is not a fixed value")]
    NotFixed { symbol: String },
    #[error("parameter `{symbol}` has no bounded domain")]
    Unbounded { symbol: String },
    #[error("unknown species `{name}`")]
    UnknownSpecies { name: String },
}
