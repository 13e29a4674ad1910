//! ergocert: certification toolkit for stochastic mass-action reaction
//! networks.
//!
//! Decides ergodicity, output-controllability, and antithetic-integral-
//! control applicability for networks whose rate parameters are fixed,
//! interval-bounded, or arbitrary positive. Every positive verdict carries a
//! linear-algebraic certificate that an independent checker re-verifies with
//! matrix-vector arithmetic alone, and closed-loop set-point tracking can be
//! validated by seeded stochastic simulation.
//!
//! Module map:
//! * [`model`] — reaction DSL, stoichiometry, characteristic matrix.
//! * [`linopt`] — LP feasibility plus Metzler stability primitives.
//! * [`poly`] — multivariate polynomial determinants and box positivity.
//! * [`analysis`] — the five certification frameworks.
//! * [`sim`] — Gillespie simulation, ensembles, moment ODE.
//! * [`cli`] — the `ergocert` command-line front end.

pub mod analysis;
pub mod cli;
pub mod exec;
pub mod linopt;
pub mod mat;
pub mod model;
pub mod poly;
pub mod report;
pub mod sim;
