//! Symplectic invariants of parabolic orbits and cuspidal tori.
//!
//! The crate works on a handful of concrete polynomial models of a
//! two-degree-of-freedom integrable system near a parabolic (cusp) orbit:
//!
//! * [`series`]: truncated power series and the fractional-index operator `φ_r`.
//! * [`specfun`]: Gamma, Gauss `₂F₁` and the closed forms of the basic periods.
//! * [`model`]: densities, fibration models, bifurcation diagrams and the
//!   parabolic-point checker.
//! * [`quadrature`]: Gelfand–Leray periods, areas and action variables.
//! * [`brieskorn`]: exact reduction of a density to `α(H) + β(H) y`.
//! * [`asymptotics`]: Puiseux and logarithmic coefficient extraction, and the
//!   saddle (node) model.
//! * [`equivalence`]: normalization of invariants and equivalence verdicts.
//! * [`flows`]: Hamiltonian flows on the 4-D phase space, period lattices and
//!   the fiberwise transport map.
//! * [`cli`]: the command-line front end used by the `cuspidal` binary.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod brieskorn;
pub mod cli;
pub mod equivalence;
mod error;
pub mod flows;
pub mod gk;
pub mod model;
pub mod ode;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod series;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{Density, FibrationModel, ModelKind};
pub use series::{PuiseuxTriple, TruncatedSeries};
