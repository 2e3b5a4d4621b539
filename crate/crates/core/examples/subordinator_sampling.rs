//! Draws from a QSD as `Y_1 + ... + Y_N` with `Y_i ~ nu_min` and `N` the
//! first-jump law of a semi-stable subordinator, and compares with the
//! constructed pmf.

use bgw_qsd::construct::invariant_measure_from;
use bgw_qsd::montecarlo::{qsd_sampling_test, QsdSampler, SubordinatorSpec};
use bgw_qsd::yaglom::yaglom_limit;
use bgw_qsd::{OffspringDistribution, SelfSimilarMeasure};

fn main() -> bgw_qsd::Result<()> {
    let dist = OffspringDistribution::geometric(0.25)?;
    let alpha = 0.5;
    let y = yaglom_limit(&dist, 1024, 1e-14, 10_000)?;
    let atoms = SelfSimilarMeasure::atoms(dist.mean(), vec![(1.5, 1.0)])?;
    let spec = SubordinatorSpec::normalized(alpha, &atoms)?;
    println!("kappa(1) = {:.12}, semi-stability residual {:.1e}", spec.kappa_at_1(), spec.semi_stability_residual()?);
    let nu = invariant_measure_from(&y, alpha, spec.lambda().expect("jumps"), 1024, 1e-12)?;
    let sampler = QsdSampler::new(spec, &y.nu_min, 1024)?;
    let r = qsd_sampling_test(&sampler, &nu.nu[..64], 200_000, 1);
    println!("TV {:.4} (noise level {:.4}), chi2 {:.1} on {} dof", r.tv_distance, r.tv_noise, r.chi2_stat, r.chi2_dof);
    for k in 1..=5 {
        println!("k = {k}: empirical {:.5}, constructed {:.5}", r.empirical_pmf[k - 1], r.reference_pmf[k - 1]);
    }
    Ok(())
}
