//! Hoppe's correspondence between invariant measures and QSDs.
//!
//! `Q = log(1 - H) / log m` solves `Q(F(z)) = 1 + Q(z)`, and
//!
//! ```text
//! G_alpha(z) = ∫_0^z H'(w) m^{(alpha-1) Q(w)} dw / ∫_0^1 H'(w) m^{(alpha-1) Q(w)} dw
//! ```
//!
//! is the pgf of a QSD of eigenvalue `m^alpha`. Since `m^{Q} = 1 - H` the
//! integrand behaves like `(1 - w)^{alpha-1}` at `w = 1`; the substitution
//! `1 - w = t^{1/alpha}` removes the singularity, and `1 - G_alpha` is
//! computed as the complementary integral over `t ∈ [0, (1-z)^alpha]`.

use serde::Serialize;

use crate::branching::OffspringDistribution;
use crate::error::{Error, Result};
use crate::quad::{adaptive_scalar, GaussRule};
use crate::report::VerificationReport;
use crate::series::TruncatedSeries;
use crate::yaglom::{yaglom_limit, YaglomResult};

const QUAD_TOL: f64 = 1e-14;
const QUAD_DEPTH: usize = 14;

/// `Q` with `Q(0) = 0`, both as a truncated series and pointwise.
#[derive(Debug, Clone)]
pub struct HoppeQ {
    pub q: TruncatedSeries,
    yaglom: YaglomResult,
}

impl HoppeQ {
    pub fn new(yaglom: &YaglomResult) -> Result<Self> {
        let k = yaglom.order();
        let one_minus_h = &TruncatedSeries::one(k) - &yaglom.h;
        let q = one_minus_h.ln()?.scale(1.0 / yaglom.m.ln());
        Ok(Self { q, yaglom: yaglom.clone() })
    }

    /// `log(1 - H(z)) / log m` with `1 - H(z) = (1 - z) R_H(z)`.
    pub fn eval(&self, z: f64) -> f64 {
        (self.one_minus_h(z)).ln() / self.yaglom.m.ln()
    }

    fn one_minus_h(&self, z: f64) -> f64 {
        (1.0 - z) * self.yaglom.eval_survival_quotient(z)
    }

    /// `sup_z |Q(F(z)) - 1 - Q(z)|`.
    pub fn functional_residual(&self, dist: &OffspringDistribution, zgrid: &[f64]) -> f64 {
        zgrid.iter().map(|&z| (self.eval(dist.eval_pgf(z)) - 1.0 - self.eval(z)).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoppeReport {
    /// `sup |G_alpha - (1 - (1 - H)^alpha)|`.
    pub residual_g: f64,
    /// `sup |Q_back - Q|`.
    pub residual_q: f64,
    /// `sup |Q(F(z)) - 1 - Q(z)|`.
    pub residual_functional: f64,
    pub g_alpha: Vec<f64>,
    pub q_back: Vec<f64>,
}

impl HoppeReport {
    pub fn report(&self, tol: f64) -> VerificationReport {
        VerificationReport::new("hoppe_roundtrip", self.residual_g.max(self.residual_q), tol)
            .with_note("residual_g", self.residual_g)
            .with_note("residual_q", self.residual_q)
            .with_note("residual_functional", self.residual_functional)
    }
}

/// Builds `G_alpha` by quadrature, compares it with `1 - (1 - H)^alpha`, maps
/// it back to `Q` and compares with `log(1 - H) / log m`.
pub fn hoppe_roundtrip(dist: &OffspringDistribution, alpha: f64, k: usize, zgrid: &[f64]) -> Result<HoppeReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRangeAlpha { alpha, range: "(0, 1)" });
    }
    let yaglom = yaglom_limit(dist, k, 1e-14, 10_000)?;
    let hq = HoppeQ::new(&yaglom)?;
    let h_prime = yaglom.h.derivative();
    let rule = GaussRule::new(32);
    // integrand in t, w = 1 - t^{1/alpha}: H'(w) R_H(w)^{alpha-1} / alpha
    let integrand = |t: f64| {
        let w = 1.0 - t.powf(1.0 / alpha);
        h_prime.eval(w) * yaglom.eval_survival_quotient(w).powf(alpha - 1.0) / alpha
    };
    let (denominator, ok) = adaptive_scalar(&rule, 0.0, 1.0, integrand, QUAD_TOL, QUAD_DEPTH);
    if !ok {
        return Err(Error::QuadratureFailure { z: 1.0, reason: "normalising integral did not converge".into() });
    }
    let mut g_alpha = Vec::with_capacity(zgrid.len());
    let mut q_back = Vec::with_capacity(zgrid.len());
    let (mut residual_g, mut residual_q) = (0.0f64, 0.0f64);
    for &z in zgrid {
        let (tail, ok) = adaptive_scalar(&rule, 0.0, (1.0 - z).powf(alpha), integrand, QUAD_TOL, QUAD_DEPTH);
        if !ok {
            return Err(Error::QuadratureFailure {
                z,
                reason: format!("partial results: g_alpha = {g_alpha:?}, q_back = {q_back:?}"),
            });
        }
        let one_minus_g = tail / denominator;
        let g = 1.0 - one_minus_g;
        let exact = 1.0 - hq.one_minus_h(z).powf(alpha);
        residual_g = residual_g.max((g - exact).abs());
        let qb = one_minus_g.ln() / (alpha * yaglom.m.ln());
        residual_q = residual_q.max((qb - hq.eval(z)).abs());
        g_alpha.push(g);
        q_back.push(qb);
    }
    let residual_functional = hq.functional_residual(dist, zgrid);
    Ok(HoppeReport { residual_g, residual_q, residual_functional, g_alpha, q_back })
}
