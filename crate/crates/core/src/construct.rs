//! λ-invariant measures, quasi-stationary distributions, true invariant
//! measures, closed-form families and the extremal measures `ν_t`.
//!
//! The integral route computes
//!
//! ```text
//! ν(k) = ∫ c_k(x) x^{-alpha} Λ(dx),   k >= 1
//! ```
//!
//! where `c_k(x)` is the compound Poisson pmf of a `Poisson(x)` number of
//! `nu_min` summands. The `e^{-x}` subtraction of the generating function
//! only touches `k = 0`, which the killed measures omit.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::branching::OffspringDistribution;
use crate::error::{Error, Result};
use crate::selfsimilar::{integrate_selfsimilar_vec, IntegrateOptions, MeasureSpec, SelfSimilarMeasure};
use crate::series::TruncatedSeries;
use crate::yaglom::{yaglom_limit, YaglomResult, DEFAULT_MAX_ITER};

/// Yaglom tolerance used when a construction computes `nu_min` itself.
pub const YAGLOM_TOL: f64 = 1e-14;

/// `nu_min` entries below this fraction of the largest are dropped from the
/// compound Poisson recursion.
const NU_TRIM: f64 = 1e-20;

/// Rescaling threshold of the compound Poisson recursion.
const RESCALE: f64 = 1e250;

/// Compound Poisson pmf evaluator for a fixed summand law.
#[derive(Debug, Clone)]
pub struct CompoundPoisson {
    /// `j nu(j)` for `j = 1..=J`, index `j - 1`.
    weights: Vec<f64>,
    unit: bool,
    ln_factorial: Vec<f64>,
}

impl CompoundPoisson {
    /// `nu[j - 1] = P(Y = j)`.
    pub fn new(nu: &[f64], k: usize) -> Self {
        let max = nu.iter().fold(0.0, |a: f64, &b| a.max(b));
        let len = nu.iter().rposition(|&v| v > NU_TRIM * max).map_or(0, |i| i + 1);
        let weights: Vec<f64> = nu[..len].iter().enumerate().map(|(i, &v)| (i + 1) as f64 * v).collect();
        let unit = len == 1 && nu[0] == 1.0;
        let ln_factorial = if unit { (0..=k).map(|i| ln_gamma(i as f64 + 1.0)).collect() } else { Vec::new() };
        Self { weights, unit, ln_factorial }
    }

    /// Writes `c_0..=c_K` into `out` (length `K + 1`).
    pub fn fill(&self, x: f64, out: &mut [f64]) {
        let k = out.len() - 1;
        if self.unit {
            self.fill_poisson(x, out);
            return;
        }
        out.iter_mut().for_each(|c| *c = 0.0);
        if self.weights.is_empty() {
            out[0] = (-x).exp();
            return;
        }
        // d_k = c_k e^{shift}; rescaled whenever it grows past RESCALE
        let mut shift = -x;
        out[0] = 1.0;
        for n in 1..=k {
            let upto = n.min(self.weights.len());
            let s: f64 = (1..=upto).map(|j| self.weights[j - 1] * out[n - j]).sum();
            out[n] = x / n as f64 * s;
            if out[n] > RESCALE {
                out[..=n].iter_mut().for_each(|c| *c /= RESCALE);
                shift += RESCALE.ln();
            }
        }
        for c in out.iter_mut() {
            *c = if *c > 0.0 { (c.ln() + shift).exp() } else { 0.0 };
        }
    }

    /// Plain Poisson, recursing outwards from the mode.
    fn fill_poisson(&self, x: f64, out: &mut [f64]) {
        let k = out.len() - 1;
        if x == 0.0 {
            out.iter_mut().for_each(|c| *c = 0.0);
            out[0] = 1.0;
            return;
        }
        let mode = (x.floor() as usize).min(k);
        let lx = x.ln();
        out[mode] = (-x + mode as f64 * lx - self.ln_factorial[mode]).exp();
        for n in mode + 1..=k {
            out[n] = out[n - 1] * x / n as f64;
        }
        for n in (0..mode).rev() {
            out[n] = out[n + 1] * (n + 1) as f64 / x;
        }
    }
}

/// `c_0..=c_K` for `S = Y_1 + ... + Y_N`, `N ~ Poisson(x)`, `Y ~ nu_min`
/// (`nu_min[j - 1] = P(Y = j)`).
pub fn compound_poisson_pmf(nu_min: &[f64], x: f64, k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    CompoundPoisson::new(nu_min, k).fill(x, &mut out);
    out
}

/// Closed-form families in terms of `1 - H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormKind {
    /// `1 - (1 - H)^alpha`, `alpha ∈ (0, 1]`.
    QsdPower,
    /// `-log(1 - H)`, `alpha = 0`.
    Log,
    /// `(1 - H)^alpha - 1`, `alpha < 0`.
    NegativePower,
    /// `(1 - H)^alpha` including `k = 0`, `alpha < 0`.
    TruePower,
}

impl ClosedFormKind {
    pub fn name(self) -> &'static str {
        match self {
            ClosedFormKind::QsdPower => "qsd_power",
            ClosedFormKind::Log => "log",
            ClosedFormKind::NegativePower => "negative_power",
            ClosedFormKind::TruePower => "true_power",
        }
    }

    /// The constant `c` for which the integral route with `Λ = c dx/x`
    /// reproduces this closed form.
    pub fn log_uniform_weight(self, alpha: f64) -> f64 {
        match self {
            ClosedFormKind::QsdPower => alpha / gamma(1.0 - alpha),
            ClosedFormKind::Log => 1.0,
            ClosedFormKind::NegativePower | ClosedFormKind::TruePower => 1.0 / gamma(-alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureSource {
    Integral { measure: MeasureSpec },
    ClosedForm { kind: ClosedFormKind },
    Extremal { t: f64 },
    /// Read back from a table.
    Table,
}

/// `ν(k)` for `k = k_min..=K` with eigenvalue `lambda = m^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantMeasure {
    pub nu: Vec<f64>,
    pub k_min: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub includes_zero: bool,
    pub source: MeasureSource,
    pub trunc_error_hint: f64,
}

impl InvariantMeasure {
    /// Largest index `K`.
    pub fn order(&self) -> usize {
        self.k_min + self.nu.len() - 1
    }

    /// `ν(k)`, zero outside the stored range.
    pub fn get(&self, k: usize) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        self.nu.get(k - self.k_min).copied().unwrap_or(0.0)
    }

    /// `ν(0..=K)` with `ν(0) = 0` for killed measures.
    pub fn dense(&self) -> Vec<f64> {
        (0..=self.order()).map(|k| self.get(k)).collect()
    }

    /// `G(z) = sum_k ν(k) z^k` by Horner.
    pub fn eval(&self, z: f64) -> f64 {
        let g = self.nu.iter().rev().fold(0.0, |acc, &v| acc * z + v);
        g * z.powi(self.k_min as i32)
    }

    /// `sum_{k <= n} ν(k)`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        (self.k_min..=n.min(self.order())).map(|k| self.get(k)).sum()
    }

    pub fn total(&self) -> f64 {
        self.nu.iter().sum()
    }

    /// Keeps `k <= order`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut out = self.clone();
        out.nu.truncate(order + 1 - self.k_min);
        out
    }
}

fn check_ratio(dist: &OffspringDistribution, lambda: &SelfSimilarMeasure) -> Result<()> {
    let m = dist.mean();
    if (lambda.m() - m).abs() > 1e-12 * m {
        return Err(Error::InvalidSpec(format!("measure ratio {} differs from the offspring mean {m}", lambda.m())));
    }
    Ok(())
}

fn yaglom_for(dist: &OffspringDistribution, k: usize) -> Result<YaglomResult> {
    yaglom_limit(dist, k.max(1), YAGLOM_TOL, DEFAULT_MAX_ITER)
}

/// `ν(k) = ∫ c_k(x) x^{-alpha} Λ(dx)` for `k = k0..=K`; returns the
/// coefficients and the largest relative tail estimate.
fn integral_route(
    yaglom: &YaglomResult,
    alpha: f64,
    lambda: &SelfSimilarMeasure,
    k: usize,
    k0: usize,
    rel_tol: f64,
) -> Result<(Vec<f64>, f64)> {
    let nu_min = &yaglom.nu_min[..k.min(yaglom.nu_min.len())];
    let cp = CompoundPoisson::new(nu_min, k);
    let f = |x: f64, out: &mut [f64]| {
        let mut buf = vec![0.0; k + 1];
        cp.fill(x, &mut buf);
        out.copy_from_slice(&buf[k0..]);
    };
    // every c_k peaks below x = k, since nu_min has mean at least 1
    let opts = IntegrateOptions::new(rel_tol).with_span(1.0, 2.0 * k as f64 + 16.0);
    let r = integrate_selfsimilar_vec(lambda, alpha, k + 1 - k0, f, &opts)?;
    let hint = r
        .values
        .iter()
        .zip(&r.tail_estimate)
        .map(|(v, t)| if *v != 0.0 { t / v.abs() } else { 0.0 })
        .fold(0.0, f64::max);
    Ok((r.values, hint))
}

/// The `m^alpha`-invariant measure with representing measure `Λ`.
pub fn invariant_measure(
    dist: &OffspringDistribution,
    alpha: f64,
    lambda: &SelfSimilarMeasure,
    k: usize,
    rel_tol: f64,
) -> Result<InvariantMeasure> {
    check_ratio(dist, lambda)?;
    if !(alpha < 1.0) {
        return Err(Error::OutOfRangeAlpha { alpha, range: "(-inf, 1)" });
    }
    invariant_measure_from(&yaglom_for(dist, k)?, alpha, lambda, k, rel_tol)
}

/// As [`invariant_measure`], reusing a computed Yaglom limit.
pub fn invariant_measure_from(
    yaglom: &YaglomResult,
    alpha: f64,
    lambda: &SelfSimilarMeasure,
    k: usize,
    rel_tol: f64,
) -> Result<InvariantMeasure> {
    if !(alpha < 1.0) {
        return Err(Error::OutOfRangeAlpha { alpha, range: "(-inf, 1)" });
    }
    if lambda.is_zero() {
        return Err(Error::ZeroMass);
    }
    let (nu, hint) = integral_route(yaglom, alpha, lambda, k, 1, rel_tol)?;
    Ok(InvariantMeasure {
        nu,
        k_min: 1,
        alpha,
        lambda: yaglom.m.powf(alpha),
        includes_zero: false,
        source: MeasureSource::Integral { measure: lambda.to_spec() },
        trunc_error_hint: hint,
    })
}

/// True (not killed) `m^alpha`-invariant measure, `alpha < 0`, including `k = 0`.
pub fn true_invariant_measure(
    dist: &OffspringDistribution,
    alpha: f64,
    lambda: &SelfSimilarMeasure,
    k: usize,
    rel_tol: f64,
) -> Result<InvariantMeasure> {
    check_ratio(dist, lambda)?;
    if !(alpha < 0.0) {
        return Err(Error::OutOfRangeAlpha { alpha, range: "(-inf, 0)" });
    }
    true_invariant_measure_from(&yaglom_for(dist, k)?, alpha, lambda, k, rel_tol)
}

pub fn true_invariant_measure_from(
    yaglom: &YaglomResult,
    alpha: f64,
    lambda: &SelfSimilarMeasure,
    k: usize,
    rel_tol: f64,
) -> Result<InvariantMeasure> {
    if !(alpha < 0.0) {
        return Err(Error::OutOfRangeAlpha { alpha, range: "(-inf, 0)" });
    }
    if lambda.is_zero() {
        return Err(Error::ZeroMass);
    }
    let (nu, hint) = integral_route(yaglom, alpha, lambda, k, 0, rel_tol)?;
    Ok(InvariantMeasure {
        nu,
        k_min: 0,
        alpha,
        lambda: yaglom.m.powf(alpha),
        includes_zero: true,
        source: MeasureSource::Integral { measure: lambda.to_spec() },
        trunc_error_hint: hint,
    })
}

/// Coefficients from series arithmetic on `1 - H`; `alpha = 1` with
/// `QsdPower` gives `nu_min` itself.
pub fn closed_form_measure(dist: &OffspringDistribution, alpha: f64, kind: ClosedFormKind, k: usize) -> Result<InvariantMeasure> {
    closed_form_measure_from(&yaglom_for(dist, k)?, alpha, kind, k)
}

pub fn closed_form_measure_from(yaglom: &YaglomResult, alpha: f64, kind: ClosedFormKind, k: usize) -> Result<InvariantMeasure> {
    let ok = match kind {
        ClosedFormKind::QsdPower => alpha > 0.0 && alpha <= 1.0,
        ClosedFormKind::Log => alpha == 0.0,
        ClosedFormKind::NegativePower | ClosedFormKind::TruePower => alpha < 0.0,
    };
    if !ok {
        return Err(Error::KindAlphaMismatch { kind: kind.name(), alpha });
    }
    let h = TruncatedSeries::from_coeffs(yaglom.h.coeffs(), k)?;
    let one_minus_h = &TruncatedSeries::one(k) - &h;
    let (coeffs, k_min) = match kind {
        ClosedFormKind::QsdPower if alpha == 1.0 => (h.into_coeffs(), 1),
        ClosedFormKind::QsdPower => (one_minus_h.powf(alpha)?.scale(-1.0).into_coeffs(), 1),
        ClosedFormKind::Log => (one_minus_h.ln()?.scale(-1.0).into_coeffs(), 1),
        ClosedFormKind::NegativePower => (one_minus_h.powf(alpha)?.into_coeffs(), 1),
        ClosedFormKind::TruePower => (one_minus_h.powf(alpha)?.into_coeffs(), 0),
    };
    let deficit = (1.0 - yaglom.nu_min.iter().sum::<f64>()).max(0.0);
    Ok(InvariantMeasure {
        nu: coeffs[k_min..].to_vec(),
        k_min,
        alpha,
        lambda: yaglom.m.powf(alpha),
        includes_zero: k_min == 0,
        source: MeasureSource::ClosedForm { kind },
        trunc_error_hint: deficit,
    })
}

/// `ν_t`: the invariant measure with `alpha = 0` and `Λ` a unit atom at `m^{-t}`.
pub fn extremal_invariant_measure(dist: &OffspringDistribution, t: f64, k: usize, rel_tol: f64) -> Result<InvariantMeasure> {
    extremal_invariant_measure_from(&yaglom_for(dist, k)?, t, k, rel_tol)
}

pub fn extremal_invariant_measure_from(yaglom: &YaglomResult, t: f64, k: usize, rel_tol: f64) -> Result<InvariantMeasure> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidSpec(format!("extremal index t = {t} not in [0, 1)")));
    }
    let m = yaglom.m;
    let lambda = SelfSimilarMeasure::atoms(m, vec![(m.powf(-t), 1.0)])?;
    let mut nu = invariant_measure_from(yaglom, 0.0, &lambda, k, rel_tol)?;
    nu.source = MeasureSource::Extremal { t };
    Ok(nu)
}

/// Law of the number of summands, `P(N = k) = ∫ e^{-x} x^k / k! x^{-alpha} Λ(dx)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NLaw {
    /// `P(N = k)` for `k = 1..=K`, index `k - 1`.
    pub pmf: Vec<f64>,
    pub alpha: f64,
    pub measure: MeasureSpec,
    /// `1 - sum pmf`.
    pub deficit: f64,
}

pub fn nlaw_pmf(alpha: f64, lambda: &SelfSimilarMeasure, k: usize, rel_tol: f64) -> Result<NLaw> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRangeAlpha { alpha, range: "(0, 1)" });
    }
    let cp = CompoundPoisson::new(&[1.0], k);
    let f = |x: f64, out: &mut [f64]| {
        let mut buf = vec![0.0; k + 1];
        cp.fill(x, &mut buf);
        out.copy_from_slice(&buf[1..]);
    };
    let opts = IntegrateOptions::new(rel_tol).with_span(1.0, 2.0 * k as f64 + 16.0);
    let pmf = integrate_selfsimilar_vec(lambda, alpha, k, f, &opts)?.values;
    let deficit = 1.0 - pmf.iter().sum::<f64>();
    Ok(NLaw { pmf, alpha, measure: lambda.to_spec(), deficit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfsimilar::normalize_for_qsd;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn unit_summands_give_poisson() {
        for x in [0.3, 7.5, 900.0] {
            let c = compound_poisson_pmf(&[1.0], x, 1200);
            for k in [0usize, 1, 5, 800, 1000] {
                let exact = (-x + k as f64 * f64::ln(x) - ln_gamma(k as f64 + 1.0)).exp();
                assert!((c[k] - exact).abs() <= 1e-11 * exact + 1e-300, "x {x} k {k}: {} vs {exact}", c[k]);
            }
        }
    }

    #[test]
    fn pmf_sums_to_one() {
        let nu: Vec<f64> = (1..=60).map(|k| 2.0 / 3.0 * (1.0f64 / 3.0).powi(k - 1)).collect();
        for x in [0.5, 20.0, 1500.0] {
            let c = compound_poisson_pmf(&nu, x, 6000);
            let s: f64 = c.iter().sum();
            assert!((s - 1.0).abs() < 1e-10, "x {x}: {s}");
            let mean: f64 = c.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
            assert!(rel(mean, 1.5 * x) < 1e-9);
        }
    }

    #[test]
    fn panjer_matches_series_exp() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let y = yaglom_limit(&d, 64, 1e-14, 10_000).unwrap();
        let x = 2.0;
        let c = compound_poisson_pmf(&y.nu_min, x, 64);
        let e = (&(&y.h - &TruncatedSeries::one(64)) * x).exp();
        for k in 0..=64 {
            assert!((c[k] - e.coeff(k)).abs() < 1e-15, "k {k}");
        }
    }

    #[test]
    fn pure_death_qsd_is_sibuya() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let l = normalize_for_qsd(&SelfSimilarMeasure::log_uniform(0.5, 1.0).unwrap(), 0.5).unwrap();
        let nu = invariant_measure(&d, 0.5, &l, 32, 1e-12).unwrap();
        assert!(rel(nu.get(1), 0.5) < 1e-10);
        assert!(rel(nu.get(2), 0.125) < 1e-10);
        assert!(rel(nu.get(3), 0.0625) < 1e-10);
        assert!((nu.lambda - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pure_death_alpha_zero_is_harmonic() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let l = SelfSimilarMeasure::log_uniform(0.5, 1.0).unwrap();
        let nu = invariant_measure(&d, 0.0, &l, 64, 1e-12).unwrap();
        for k in 1..=64 {
            assert!(rel(nu.get(k), 1.0 / k as f64) < 1e-10, "k {k}: {}", nu.get(k));
        }
    }

    #[test]
    fn integral_and_closed_form_agree_on_geometric() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let y = yaglom_limit(&d, 64, YAGLOM_TOL, 10_000).unwrap();
        for alpha in [0.3, 0.8] {
            let l = normalize_for_qsd(&SelfSimilarMeasure::log_uniform(d.mean(), 1.0).unwrap(), alpha).unwrap();
            let a = invariant_measure_from(&y, alpha, &l, 64, 1e-12).unwrap();
            let b = closed_form_measure_from(&y, alpha, ClosedFormKind::QsdPower, 64).unwrap();
            for k in 1..=64 {
                assert!(rel(a.get(k), b.get(k)) < 1e-9, "alpha {alpha} k {k}: {} vs {}", a.get(k), b.get(k));
            }
        }
    }

    #[test]
    fn compound_structure_matches_explicit_mixture() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let k = 48;
        let y = yaglom_limit(&d, k, YAGLOM_TOL, 10_000).unwrap();
        let alpha = 0.5;
        let l = SelfSimilarMeasure::atoms(d.mean(), vec![(1.4, 1.0)]).unwrap();
        let l = normalize_for_qsd(&l, alpha).unwrap();
        let nu = invariant_measure_from(&y, alpha, &l, k, 1e-12).unwrap();
        let n = nlaw_pmf(alpha, &l, k, 1e-12).unwrap();
        // sum_j P(N = j) nu_min^{*j}, by repeated convolution
        let mut power = vec![0.0; k + 1];
        power[0] = 1.0;
        let mut mix = vec![0.0; k + 1];
        for j in 1..=k {
            let mut next = vec![0.0; k + 1];
            for a in 0..=k {
                if power[a] == 0.0 {
                    continue;
                }
                for b in 1..=k - a {
                    next[a + b] += power[a] * y.nu_min[b - 1];
                }
            }
            power = next;
            for s in 0..=k {
                mix[s] += n.pmf[j - 1] * power[s];
            }
        }
        for s in 1..=k {
            assert!(rel(nu.get(s), mix[s]) < 1e-9, "k {s}: {} vs {}", nu.get(s), mix[s]);
        }
    }

    #[test]
    fn nlaw_of_pure_death_equals_measure() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let l = normalize_for_qsd(&SelfSimilarMeasure::atoms(0.5, vec![(1.2, 1.0)]).unwrap(), 0.4).unwrap();
        let nu = invariant_measure(&d, 0.4, &l, 40, 1e-12).unwrap();
        let n = nlaw_pmf(0.4, &l, 40, 1e-12).unwrap();
        assert_eq!(nu.nu, n.pmf);
        assert!(n.pmf.iter().all(|&p| p >= 0.0) && n.deficit >= 0.0);
    }

    #[test]
    fn sibuya_nlaw() {
        let l = normalize_for_qsd(&SelfSimilarMeasure::log_uniform(0.5, 1.0).unwrap(), 0.5).unwrap();
        let n = nlaw_pmf(0.5, &l, 16, 1e-12).unwrap();
        assert!(rel(n.pmf[0], 0.5) < 1e-10 && rel(n.pmf[1], 0.125) < 1e-10);
    }

    #[test]
    fn counting_measure_is_true_invariant() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let c = ClosedFormKind::TruePower.log_uniform_weight(-1.0);
        assert!((c - 1.0).abs() < 1e-14);
        let l = SelfSimilarMeasure::log_uniform(0.5, c).unwrap();
        let nu = true_invariant_measure(&d, -1.0, &l, 40, 1e-12).unwrap();
        assert!(nu.includes_zero && nu.k_min == 0);
        for k in 0..=40 {
            assert!(rel(nu.get(k), 1.0) < 1e-10, "k {k}: {}", nu.get(k));
        }
        // G(F(0)) = lambda G(0)
        let g_f0 = nu.eval(d.eval_pgf(0.0));
        assert!((g_f0 - nu.lambda * nu.get(0)).abs() < 1e-8, "{g_f0}");
    }

    #[test]
    fn alpha_ranges_are_enforced() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let l = SelfSimilarMeasure::log_uniform(0.5, 1.0).unwrap();
        assert!(matches!(true_invariant_measure(&d, 0.5, &l, 8, 1e-10), Err(Error::OutOfRangeAlpha { .. })));
        assert!(matches!(invariant_measure(&d, 1.5, &l, 8, 1e-10), Err(Error::OutOfRangeAlpha { .. })));
        assert!(matches!(invariant_measure(&d, 1.0, &l, 8, 1e-10), Err(Error::OutOfRangeAlpha { .. })));
        let wrong_m = SelfSimilarMeasure::log_uniform(0.4, 1.0).unwrap();
        assert!(matches!(invariant_measure(&d, 0.5, &wrong_m, 8, 1e-10), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn closed_forms() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let q = closed_form_measure(&d, 0.5, ClosedFormKind::QsdPower, 8).unwrap();
        assert!(rel(q.get(1), 0.5) < 1e-15 && rel(q.get(2), 0.125) < 1e-15);
        let h = closed_form_measure(&d, 0.0, ClosedFormKind::Log, 8).unwrap();
        for k in 1..=8 {
            assert!(rel(h.get(k), 1.0 / k as f64) < 1e-14);
        }
        let g = OffspringDistribution::geometric(0.25).unwrap();
        let y = yaglom_limit(&g, 32, YAGLOM_TOL, 10_000).unwrap();
        let one = closed_form_measure_from(&y, 1.0, ClosedFormKind::QsdPower, 32).unwrap();
        assert_eq!(one.nu, y.nu_min);
        for (kind, alpha) in [(ClosedFormKind::QsdPower, 0.0), (ClosedFormKind::Log, 0.5), (ClosedFormKind::NegativePower, 0.5)] {
            assert!(matches!(closed_form_measure_from(&y, alpha, kind, 8), Err(Error::KindAlphaMismatch { .. })));
        }
    }

    #[test]
    fn extremal_pure_death_band_sum() {
        let m: f64 = 0.5;
        let d = OffspringDistribution::pure_death(m).unwrap();
        let nu = extremal_invariant_measure(&d, 0.0, 24, 1e-12).unwrap();
        for k in 1..=24 {
            let exact: f64 = (-80..80)
                .map(|n| {
                    let x = m.powi(n);
                    (-x + k as f64 * x.ln() - ln_gamma(k as f64 + 1.0)).exp()
                })
                .sum();
            assert!(rel(nu.get(k), exact) < 1e-10, "k {k}");
        }
    }

    #[test]
    fn extremal_mixture_recovers_log_uniform() {
        // ν_t is 1-periodic and smooth in t, so the trapezoid rule converges fast
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let m = d.mean();
        let k = 24;
        let y = yaglom_limit(&d, k, YAGLOM_TOL, 10_000).unwrap();
        let n = 32;
        let mut mix = vec![0.0; k];
        for i in 0..n {
            let nu = extremal_invariant_measure_from(&y, i as f64 / n as f64, k, 1e-12).unwrap();
            for j in 0..k {
                mix[j] += nu.nu[j] * (1.0 / m).ln() / n as f64;
            }
        }
        let target = invariant_measure_from(&y, 0.0, &SelfSimilarMeasure::log_uniform(m, 1.0).unwrap(), k, 1e-12).unwrap();
        for j in 0..k {
            assert!(rel(mix[j], target.nu[j]) < 1e-9, "k {}", j + 1);
        }
    }

    #[test]
    fn qsd_tail_bound() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        for alpha in [0.3, 0.5, 0.8] {
            let beta = alpha - 0.1;
            let nu = closed_form_measure(&d, alpha, ClosedFormKind::QsdPower, 1 << 16).unwrap();
            let ratios: Vec<f64> = (1..=15)
                .map(|j| {
                    let x = 1usize << j;
                    (1.0 - nu.partial_sum(x - 1)) * (x as f64).powf(beta)
                })
                .collect();
            let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
            assert!(lo > 0.0 && hi.is_finite());
            assert!(ratios[14] <= ratios[6], "alpha {alpha}: {ratios:?}");
        }
    }
}
