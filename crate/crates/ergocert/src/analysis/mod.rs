//! The five certification frameworks (nominal, interval, robust, sign,
//! structural) for ergodicity, output-controllability, and antithetic
//! integral control, plus the independent certificate checker.
//!
//! Every `Holds` verdict carries the witness vectors and the evaluated test
//! matrices it was decided on, so [`verify::check_witness_algebra`] can
//! re-establish the claim with matrix-vector arithmetic alone.

pub mod interval;
pub mod nominal;
pub mod pipeline;
pub mod reduced;
pub mod robust;
pub mod sign;
pub mod structural;
pub mod verify;

pub use pipeline::{analyze, AnalysisEntry, AnalyzeRequest, FrameworkChoice};

use crate::linopt::LinoptError;
use crate::mat::Mat;
use crate::model::{AffineMatrix, IntervalError, NonAttainedBound, SignError};
use crate::poly::{MultiPoly, PolyError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Residual tolerance for certificate self-verification.
pub const VERIFY_TOL: f64 = 1e-8;
/// Strictness floor on the actuated component of controllability witnesses.
pub const W_ACT_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Framework {
    Nominal,
    Interval,
    Robust,
    Sign,
    Structural,
}

impl std::fmt::Display for Framework {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Framework::Nominal => "nominal",
            Framework::Interval => "interval",
            Framework::Robust => "robust",
            Framework::Sign => "sign",
            Framework::Structural => "structural",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    Ergodicity,
    ErgodicityBimolecular,
    OutputControllability,
    Aic,
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Property::Ergodicity => "ergodicity",
            Property::ErgodicityBimolecular => "ergodicity (bimolecular)",
            Property::OutputControllability => "output-controllability",
            Property::Aic => "antithetic integral control",
        })
    }
}

/// Why a property failed; carried inside `Verdict::Fails`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FailureWitness {
    /// The decisive test matrix is not Hurwitz.
    UnstableMatrix { pf_eigenvalue: f64 },
    /// A directed cycle in the relevant digraph (sign-pattern graph, or the
    /// catalytic-interaction graph in the structural framework).
    Cycle { nodes: Vec<usize> },
    /// A diagonal entry that is not negative where negativity is required.
    NonnegativeDiagonal { index: usize },
    /// A concrete parameter point falsifying the property.
    Point { assignment: Vec<(String, f64)>, value: f64 },
    /// No directed path from the actuated to the controlled species.
    NoPath { from: usize, to: usize },
    /// The controllability witness has a bad component (negative entry, or
    /// an actuated component at zero).
    WitnessComponent { index: usize, value: f64 },
    /// A decisive (two-directional) LP is infeasible.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails(FailureWitness),
    Unknown,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Fails(_) => f.write_str("fails"),
            Verdict::Unknown => f.write_str("unknown"),
        }
    }
}

/// Exactness and scope warnings attached to certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Caveat {
    /// The underlying theorem is sufficient-only; an infeasible condition
    /// yields `Unknown`, never `Fails`.
    SufficientOnly,
    /// State-space irreducibility was not asserted by the user; the verdict
    /// is conditional on it.
    IrreducibilityAssumed,
    /// A bound sits on an open interval endpoint and is not attained.
    NonAttainedBound(NonAttainedBound),
    /// Verdict concerns the conservation-reduced family obtained from the
    /// left annihilator of `S_b`.
    ReducedFamily,
    /// Set-point bound from vertex-plus-grid maximization; conservative,
    /// not exact.
    ConservativeSetpointBound,
    /// The robust set-point bound is evaluated per sample with the nominal
    /// formula; the family-level formula is not well-posed as printed.
    SetpointBoundPerSample,
    /// No finite set-point bound can be reported.
    SetpointBoundUnavailable { reason: String },
    /// A mixed-sign symbolic entry was resolved as nonzero (structural
    /// reading); the sign framework proper rejects such entries.
    MixedSignEntry { row: usize, col: usize },
    /// A grid sample failed the sufficient per-sample LP.
    GridSampleInfeasible { point: Vec<(String, f64)> },
    /// Vertex/grid enumeration was capped at a deterministic subset.
    EnumerationCapped,
    /// Two supposedly equivalent criteria disagreed numerically.
    CriteriaDisagree { detail: String },
    /// Outcome of the sub-properties when a bundled LP is infeasible.
    SubVerdicts { ergodicity: Option<bool>, output_controllability: Option<bool> },
    /// Structural fallback path (the single −1/+1 conversion-column
    /// hypothesis failed); verdict from the determinant coefficient test.
    StructuralFallback,
}

/// Antithetic integral controller interface: which species is actuated,
/// which is controlled, and the four controller rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSpec {
    pub actuated: usize,
    pub controlled: usize,
    pub mu: f64,
    pub theta: f64,
    pub eta: f64,
    pub k: f64,
}

impl ControlSpec {
    pub fn new(actuated: usize, controlled: usize, mu: f64, theta: f64, eta: f64, k: f64) -> Self {
        assert!(mu > 0.0 && theta > 0.0 && eta > 0.0 && k > 0.0, "controller rates must be positive");
        ControlSpec { actuated, controlled, mu, theta, eta, k }
    }

    /// A spec for analysis only; the controller rates are placeholders (the
    /// feasibility questions do not depend on them).
    pub fn analysis(actuated: usize, controlled: usize) -> Self {
        ControlSpec::new(actuated, controlled, 1.0, 1.0, 1.0, 1.0)
    }

    pub fn setpoint(&self) -> f64 {
        self.mu / self.theta
    }
}

/// A per-sample witness for family-level certificates: the LP witness at a
/// concrete parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleWitness {
    pub point: Vec<f64>,
    pub v: Vec<f64>,
}

/// A self-verifiable certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub framework: Framework,
    pub property: Property,
    pub verdict: Verdict,
    /// Positive stability witness (`v >= 1`, `vᵀA <= -1` on the test matrix).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v: Option<Vec<f64>>,
    /// Nonnegative controllability witness.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub w: Option<Vec<f64>>,
    /// Structural catalytic-graph witness (`v_dᵀ(sgn(N) - I) <= -1`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v_d: Option<Vec<f64>>,
    /// Shift making `A - mu I` Hurwitz in the controllability test.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mu_shift: Option<f64>,
    /// Decay rate used in the set-point bound.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    /// Sufficient lower threshold on mu/theta for guaranteed tracking.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub setpoint_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub actuated: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub controlled: Option<usize>,
    pub irreducibility_asserted: bool,
    pub caveats: Vec<Caveat>,
    /// Evaluated test matrices, keyed by role (`A`, `A_plus`, `A_minus`,
    /// `sgn_A`, `A_one`, `N`, `sgn_N`, `sb`, `annihilator`, ...).
    pub test_matrices: BTreeMap<String, Mat>,
    /// Affine family for robust certificates (symbolic in the conversion
    /// rates).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<AffineMatrix>,
    /// Conversion-rate box, aligned with `family`'s symbols.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cv_box: Option<Vec<(String, f64, f64)>>,
    /// Polynomial stability witness `v(rho_cv)` (adjugate construction).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_poly: Option<Vec<MultiPoly>>,
    /// Pretty-printed `witness_poly` for human readers.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_poly_text: Option<Vec<String>>,
    /// Per-sample LP witnesses for grid-checked family certificates.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sample_witnesses: Option<Vec<SampleWitness>>,
}

impl Certificate {
    pub fn new(framework: Framework, property: Property, verdict: Verdict) -> Self {
        Certificate {
            framework,
            property,
            verdict,
            v: None,
            w: None,
            v_d: None,
            mu_shift: None,
            alpha: None,
            setpoint_bound: None,
            actuated: None,
            controlled: None,
            irreducibility_asserted: false,
            caveats: Vec::new(),
            test_matrices: BTreeMap::new(),
            family: None,
            cv_box: None,
            witness_poly: None,
            witness_poly_text: None,
            sample_witnesses: None,
        }
    }

    pub fn with_matrix(mut self, name: &str, m: Mat) -> Self {
        self.test_matrices.insert(name.to_string(), m);
        self
    }

    pub fn caveat(mut self, c: Caveat) -> Self {
        self.caveats.push(c);
        self
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("network is not open: conservation-law witness over species z = {witness:?}")]
    NotOpen { witness: Vec<f64> },
    #[error(transparent)]
    Linopt(#[from] LinoptError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Sign(#[from] SignError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("operation requires a unimolecular network")]
    NotUnimolecular,
    #[error("framework requires fixed rate values; `{symbol}` is not fixed")]
    FixedRatesRequired { symbol: String },
    #[error("bimolecular network is not reducible for this framework: {reason}")]
    NotReducible { reason: String },
    #[error("matrix dimension problem: {0}")]
    Dimension(String),
    #[error("matrix unexpectedly singular")]
    Singular,
}
