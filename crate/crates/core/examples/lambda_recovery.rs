//! Recovers `x^{-alpha} Λ(dx)` from a QSD through the rescaled measures
//! `μ_n(A) = m^{-alpha n} ν(p_n^{-1} A)`.

use bgw_qsd::construct::{closed_form_measure, ClosedFormKind};
use bgw_qsd::verify::{recover_lambda, LogBins};
use bgw_qsd::{OffspringDistribution, SelfSimilarMeasure};

fn main() -> bgw_qsd::Result<()> {
    let m: f64 = 0.5;
    let alpha = 0.5;
    let dist = OffspringDistribution::pure_death(m)?;
    let nu = closed_form_measure(&dist, alpha, ClosedFormKind::QsdPower, 1 << 18)?;
    let lambda = SelfSimilarMeasure::log_uniform(m, ClosedFormKind::QsdPower.log_uniform_weight(alpha))?;
    let bins = LogBins::new(m * m, 1.0 / (m * m), 8)?;
    for n in [4, 8, 12, 16] {
        let r = recover_lambda(&nu, alpha, &dist, n, &bins)?;
        let worst = r.relative_deviation(&lambda, alpha).into_iter().fold(0.0, f64::max);
        println!("n = {n:>2}: {:>7} lattice points, max per-bin deviation {worst:.2e}", r.lattice_points);
    }
    Ok(())
}
