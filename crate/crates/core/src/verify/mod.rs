//! Independent checks of constructed objects.
//!
//! Each check returns a [`VerificationReport`](crate::report::VerificationReport)
//! or plain data; none of them reuse the code path that built the object under test.

pub mod hoppe;
pub mod joffe;
pub mod kesten_spitzer;
pub mod recovery;
pub mod residual;

pub use hoppe::{hoppe_roundtrip, HoppeQ, HoppeReport};
pub use joffe::joffe_partial_sums;
pub use kesten_spitzer::{ks_convert, ks_invert, UnitMeasure};
pub use recovery::{recover_lambda, LogBins, RecoveredMeasure};
pub use residual::{eigen_residual, eigen_residual_with, functional_equation_residual, grid_up_to};
