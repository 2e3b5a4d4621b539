//! Residuals of `ν P = λ ν` and of `G(F(z)) - G(F(0)) = λ G(z)`.

use crate::branching::{OffspringDistribution, TransitionBlock};
use crate::construct::InvariantMeasure;
use crate::error::{Error, Result};
use crate::report::VerificationReport;

/// Largest grid point admitted by the functional-equation check.
pub const Z_MAX: f64 = 0.95;

/// `{step, 2 step, ...}` up to `z_max`.
pub fn grid_up_to(step: f64, z_max: f64) -> Vec<f64> {
    let n = (z_max / step + 1e-9).floor() as usize;
    (1..=n).map(|i| (i as f64 * step).min(z_max)).collect()
}

/// `sup_z |G(F(z)) - G(F(0)) - λ G(z)|`, or `sup_z |G(F(z)) - λ G(z)|` for
/// measures that include state 0.
///
/// The note `truncation_leak` bounds the omitted `sum_{k>K} ν(k) w^k` by
/// `ν(K) w^{K+1} / (1 - w)` with `w = max(z, F(z))`, which is valid when
/// `ν` is eventually nonincreasing.
pub fn functional_equation_residual(
    nu: &InvariantMeasure,
    dist: &OffspringDistribution,
    lambda: f64,
    zgrid: &[f64],
) -> Result<VerificationReport> {
    if zgrid.is_empty() || zgrid.iter().any(|&z| !(z > 0.0 && z <= Z_MAX + 1e-12)) {
        return Err(Error::InvalidSpec(format!("grid points must lie in (0, {Z_MAX}]")));
    }
    let g_f0 = if nu.includes_zero { 0.0 } else { nu.eval(dist.eval_pgf(0.0)) };
    let k = nu.order();
    let last = nu.get(k).abs();
    let mut details = Vec::with_capacity(zgrid.len());
    let mut leak: f64 = 0.0;
    for &z in zgrid {
        let fz = dist.eval_pgf(z);
        details.push((nu.eval(fz) - g_f0 - lambda * nu.eval(z)).abs());
        let w = z.max(fz);
        leak = leak.max(last * w.powi(k as i32 + 1) / (1.0 - w));
    }
    let residual = details.iter().copied().fold(0.0, f64::max);
    let name = if nu.includes_zero { "functional_equation_true" } else { "functional_equation" };
    Ok(VerificationReport::new(name, residual, 0.0).with_details(details).with_note("truncation_leak", leak))
}

/// L1 residual of `ν P - λ ν` over `j <= k_report`, normalised by
/// `max(1, sum_{j <= k_report} ν(j))`, with the kernel truncated at `k`.
///
/// Notes: `row_overflow` is `sum_i ν(i) overflow(i)`, the mass the truncated
/// rows send beyond `k`; `row_deficit` adds the mass sent to 0.
pub fn eigen_residual(
    nu: &InvariantMeasure,
    dist: &OffspringDistribution,
    lambda: f64,
    k: usize,
    k_report: usize,
) -> Result<VerificationReport> {
    eigen_residual_with(&TransitionBlock::new(dist, k), nu, lambda, k_report)
}

/// As [`eigen_residual`] with a prebuilt kernel block.
pub fn eigen_residual_with(
    block: &TransitionBlock,
    nu: &InvariantMeasure,
    lambda: f64,
    k_report: usize,
) -> Result<VerificationReport> {
    let k = block.truncation();
    if k_report == 0 || 2 * k_report > k {
        return Err(Error::InvalidSpec(format!("k_report = {k_report} must lie in [1, K/2] for K = {k}")));
    }
    let rows: Vec<f64> = (1..=k).map(|i| nu.get(i)).collect();
    let applied = block.left_apply(&rows);
    let mut details = Vec::with_capacity(k_report + 1);
    if nu.includes_zero {
        // state 0 is absorbing: (νP)(0) = ν(0) + sum_i ν(i) F(0)^i
        let into_zero: f64 = (1..=k).map(|i| rows[i - 1] * block.to_zero(i)).sum();
        details.push((nu.get(0) + into_zero - lambda * nu.get(0)).abs());
    }
    for j in 1..=k_report {
        details.push((applied[j - 1] - lambda * nu.get(j)).abs());
    }
    let mass: f64 = (nu.k_min..=k_report).map(|j| nu.get(j)).sum();
    let residual = details.iter().sum::<f64>() / mass.max(1.0);
    let overflow: f64 = (1..=k).map(|i| rows[i - 1] * block.overflow(i)).sum();
    let deficit: f64 = (1..=k).map(|i| rows[i - 1] * block.row_deficit(i)).sum();
    Ok(VerificationReport::new("eigen_residual", residual, 0.0)
        .with_details(details)
        .with_note("row_overflow", overflow)
        .with_note("row_deficit", deficit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{closed_form_measure_from, ClosedFormKind, MeasureSource};
    use crate::yaglom::{standard_grid, yaglom_limit};

    fn table(nu: Vec<f64>, k_min: usize, alpha: f64, lambda: f64) -> InvariantMeasure {
        InvariantMeasure {
            nu,
            k_min,
            alpha,
            lambda,
            includes_zero: k_min == 0,
            source: MeasureSource::Table,
            trunc_error_hint: 0.0,
        }
    }

    #[test]
    fn delta_one_is_exact_for_pure_death() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let mut v = vec![0.0; 64];
        v[0] = 1.0;
        let nu = table(v, 1, 1.0, 0.5);
        let r = eigen_residual(&nu, &d, 0.5, 64, 32).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn nu_min_geometric() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let y = yaglom_limit(&d, 512, 1e-14, 10_000).unwrap();
        let nu = closed_form_measure_from(&y, 1.0, ClosedFormKind::QsdPower, 512).unwrap();
        let r = eigen_residual(&nu, &d, d.mean(), 512, 128).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
        let fe = functional_equation_residual(&nu, &d, d.mean(), &standard_grid()).unwrap();
        assert!(fe.residual < 1e-9, "{fe:?}");
    }

    #[test]
    fn log_measure_and_wrong_lambda() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let y = yaglom_limit(&d, 2048, 1e-14, 10_000).unwrap();
        let nu = closed_form_measure_from(&y, 0.0, ClosedFormKind::Log, 2048).unwrap();
        let fe = functional_equation_residual(&nu, &d, 1.0, &standard_grid()).unwrap();
        assert!(fe.residual < 1e-8, "{fe:?}");
        let q = closed_form_measure_from(&y, 0.5, ClosedFormKind::QsdPower, 2048).unwrap();
        let bad = functional_equation_residual(&q, &d, q.lambda * 1.1, &standard_grid()).unwrap();
        assert!(bad.residual > 1e-2, "{bad:?}");
    }

    #[test]
    fn counting_measure_true_variant() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let nu = table(vec![1.0; 513], 0, -1.0, 2.0);
        let r = eigen_residual(&nu, &d, 2.0, 512, 128).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        assert_eq!(r.details.len(), 129);
        let fe = functional_equation_residual(&nu, &d, 2.0, &standard_grid()).unwrap();
        let leak = fe.note("truncation_leak").unwrap();
        assert!(fe.residual <= leak * (1.0 + 1e-6), "{fe:?}");
        let fe = functional_equation_residual(&nu, &d, 2.0, &grid_up_to(0.05, 0.9)).unwrap();
        assert!(fe.residual < 1e-8, "{fe:?}");
    }

    #[test]
    fn grid_is_validated() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let nu = table(vec![1.0], 1, 1.0, 0.5);
        assert!(functional_equation_residual(&nu, &d, 0.5, &[0.99]).is_err());
        assert!(eigen_residual(&nu, &d, 0.5, 8, 5).is_err());
        assert_eq!(grid_up_to(0.05, 0.95).len(), 19);
    }
}
