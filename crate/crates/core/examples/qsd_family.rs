//! The one-parameter family of QSDs `1 - (1 - H)^alpha`, built once from
//! the integral representation with `Λ = c dx/x` and once in closed form.

use bgw_qsd::construct::{closed_form_measure_from, invariant_measure_from, ClosedFormKind};
use bgw_qsd::selfsimilar::normalize_for_qsd;
use bgw_qsd::yaglom::yaglom_limit;
use bgw_qsd::{OffspringDistribution, SelfSimilarMeasure};

fn main() -> bgw_qsd::Result<()> {
    let dist = OffspringDistribution::geometric(0.25)?;
    let k = 128;
    let y = yaglom_limit(&dist, k, 1e-14, 10_000)?;
    for alpha in [0.3, 0.5, 0.8, 1.0] {
        let closed = closed_form_measure_from(&y, alpha, ClosedFormKind::QsdPower, k)?;
        let diff = if alpha < 1.0 {
            let lambda = normalize_for_qsd(&SelfSimilarMeasure::log_uniform(dist.mean(), 1.0)?, alpha)?;
            let integral = invariant_measure_from(&y, alpha, &lambda, k, 1e-12)?;
            (1..=k).map(|j| (integral.get(j) - closed.get(j)).abs()).fold(0.0, f64::max)
        } else {
            0.0
        };
        println!(
            "alpha = {alpha}: eigenvalue {:.6}, nu(1..4) = {:.6} {:.6} {:.6} {:.6}, mass up to K {:.6}, integral vs closed {diff:.1e}",
            closed.lambda,
            closed.get(1),
            closed.get(2),
            closed.get(3),
            closed.get(4),
            closed.total()
        );
    }
    Ok(())
}
