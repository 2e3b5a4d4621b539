//! Invariant measures of the process that is not killed at 0, for `alpha < 0`:
//! `G(z) = ∫ (e^{(H(z)-1)x}) x^{-alpha} Λ(dx)` includes the state 0.

use bgw_qsd::construct::{closed_form_measure, true_invariant_measure, ClosedFormKind};
use bgw_qsd::verify::eigen_residual;
use bgw_qsd::{OffspringDistribution, SelfSimilarMeasure};

fn main() -> bgw_qsd::Result<()> {
    let dist = OffspringDistribution::pure_death(0.5)?;
    let m = dist.mean();
    for alpha in [-0.5, -1.0, -2.0] {
        let lambda = SelfSimilarMeasure::log_uniform(m, 1.0)?;
        let nu = true_invariant_measure(&dist, alpha, &lambda, 512, 1e-12)?;
        let closed = closed_form_measure(&dist, alpha, ClosedFormKind::TruePower, 512)?;
        let scale = ClosedFormKind::TruePower.log_uniform_weight(alpha);
        let diff = (0..=64).map(|k| (nu.get(k) * scale - closed.get(k)).abs() / closed.get(k).abs()).fold(0.0, f64::max);
        let r = eigen_residual(&nu, &dist, nu.lambda, 512, 128)?;
        println!(
            "alpha = {alpha}: lambda = {:.4}, nu(0) = {:.6}, nu(1) = {:.6}, rel. diff to (1 - H)^alpha {diff:.1e}, eigen {:.1e}",
            nu.lambda,
            nu.get(0),
            nu.get(1),
            r.residual
        );
    }
    Ok(())
}
