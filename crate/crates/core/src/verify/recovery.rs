//! Empirical recovery of `x^{-alpha} Λ(dx)` from `ν` through the rescaled
//! measures `μ_n(A) = m^{-alpha n} ν(p_n^{-1} A)`.

use serde::Serialize;

use crate::branching::OffspringDistribution;
use crate::construct::InvariantMeasure;
use crate::error::{Error, Result};
use crate::selfsimilar::SelfSimilarMeasure;
use crate::yaglom::survival_probabilities;

/// Minimum number of lattice points `p_n k` inside the window.
pub const MIN_POINTS: usize = 10;

/// `count` bins with log-uniform edges on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogBins {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl LogBins {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite() && count > 0) {
            return Err(Error::InvalidSpec(format!("invalid bins [{lo}, {hi}) x {count}")));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn edges(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..=self.count).map(|i| (a + (b - a) * i as f64 / self.count as f64).exp()).collect()
    }

    pub fn index(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x < self.hi) {
            return None;
        }
        let f = (x / self.lo).ln() / (self.hi / self.lo).ln();
        Some(((f * self.count as f64) as usize).min(self.count - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveredMeasure {
    pub n: usize,
    pub p_n: f64,
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub lattice_points: usize,
}

impl RecoveredMeasure {
    /// `∫_bin x^{-alpha} Λ(dx)` for every bin.
    pub fn target(&self, lambda: &SelfSimilarMeasure, alpha: f64) -> Vec<f64> {
        self.edges.windows(2).map(|e| lambda.weighted_mass(alpha, e[0], e[1])).collect()
    }

    /// Per-bin `|μ_n - target| / target`.
    pub fn relative_deviation(&self, lambda: &SelfSimilarMeasure, alpha: f64) -> Vec<f64> {
        self.masses
            .iter()
            .zip(self.target(lambda, alpha))
            .map(|(m, t)| if t > 0.0 { (m - t).abs() / t } else if *m == 0.0 { 0.0 } else { f64::INFINITY })
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// Bins `μ_n = m^{-alpha n} sum_{k: p_n k ∈ bin} ν(k)`.
pub fn recover_lambda(
    nu: &InvariantMeasure,
    alpha: f64,
    dist: &OffspringDistribution,
    n: usize,
    bins: &LogBins,
) -> Result<RecoveredMeasure> {
    let p_n = survival_probabilities(dist, n)[n];
    let scale = dist.mean().powf(-alpha * n as f64);
    let k_lo = ((bins.lo / p_n).ceil() as usize).max(nu.k_min.max(1));
    let k_hi = ((bins.hi / p_n).ceil() as usize).min(nu.order() + 1);
    let mut masses = vec![0.0; bins.count];
    let mut points = 0;
    for k in k_lo..k_hi {
        if let Some(b) = bins.index(p_n * k as f64) {
            masses[b] += nu.get(k);
            points += 1;
        }
    }
    if points < MIN_POINTS {
        return Err(Error::InsufficientSupport { points });
    }
    masses.iter_mut().for_each(|m| *m *= scale);
    Ok(RecoveredMeasure { n, p_n, edges: bins.edges(), masses, lattice_points: points })
}
