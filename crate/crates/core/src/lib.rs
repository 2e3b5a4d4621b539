//! Invariant measures and quasi-stationary distributions of subcritical
//! Bienaymé–Galton–Watson processes killed at 0.
//!
//! For offspring mean `m < 1` and `alpha < 1`, every `m^alpha`-invariant
//! measure has generating function
//!
//! ```text
//! G(z) = ∫_0^∞ (exp((H(z) - 1) x) - exp(-x)) x^{-alpha} Λ(dx)
//! ```
//!
//! where `H` is the generating function of the Yaglom limit and `Λ` is a
//! measure on `(0, ∞)` invariant under `x ↦ m x`. The crate builds these
//! measures numerically and checks each one against independent oracles.
//!
//! | module | contents |
//! |---|---|
//! | [`series`] | truncated power series arithmetic |
//! | [`branching`] | offspring laws, kernel, one-step simulation |
//! | [`yaglom`] | Yaglom limit `nu_min`, survival probabilities |
//! | [`selfsimilar`] | scale-invariant measures `Λ` and band integration |
//! | [`construct`] | invariant measures, QSDs, extremal and closed-form families |
//! | [`verify`] | residual checks, `Λ` recovery, Hoppe and Kesten–Spitzer maps |
//! | [`montecarlo`] | stochastic cross-checks and the subordinator sampler |
//! | [`cli`] | batch front end behind the `bgw-qsd` binary |

// `!(x < bound)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branching;
pub mod cli;
pub mod construct;
pub mod error;
pub mod io;
pub mod montecarlo;
mod quad;
pub mod report;
pub mod sampling;
pub mod selfsimilar;
pub mod series;
pub mod verify;
pub mod yaglom;

pub use branching::{OffspringDistribution, OffspringSpec, TransitionBlock};
pub use construct::{InvariantMeasure, MeasureSource};
pub use error::{Error, Result};
pub use report::VerificationReport;
pub use selfsimilar::{MeasureSpec, SelfSimilarMeasure};
pub use series::TruncatedSeries;
pub use yaglom::YaglomResult;
