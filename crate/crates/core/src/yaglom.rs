//! The Yaglom limit `nu_min`, survival probabilities, and the functional
//! identities satisfied by its generating function `H`.
//!
//! `F_n(0)` tends to 1, so forming `H_n = (F_n - F_n(0)) / (1 - F_n(0))`
//! directly loses all precision once `1 - F_n(0)` approaches machine epsilon.
//! Instead we write `F_n = q_n + p_n H_n` and re-centre `F` at `q_n`:
//!
//! ```text
//! F(q + p h) - F(q) = sum_{j>=1} c_j p^j h^j,   c_j = F^{(j)}(q) / j!
//! ```
//!
//! All `c_j` are sums of nonnegative terms, `p_{n+1} = sum_j c_j p^j`, and
//! `H_{n+1}` is `H_n` composed into the pgf with weights `c_j p^j / p_{n+1}`.

use crate::branching::OffspringDistribution;
use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::series::{Composition, TruncatedSeries};

pub const DEFAULT_ORDER: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Coefficients below this magnitude are flushed to zero between iterations.
const FLUSH: f64 = 1e-300;

/// `F_n` as a truncated series: `F_0 = z`, `F_{k+1} = F o F_k`.
pub fn iterate_pgf(dist: &OffspringDistribution, n: usize, order: usize) -> TruncatedSeries {
    let f = dist.pgf();
    let mut fn_ = TruncatedSeries::identity(order);
    for _ in 0..n {
        fn_ = TruncatedSeries::compose(&f, &fn_, Composition::PolynomialOuter).expect("polynomial outer");
    }
    fn_
}

/// Survival probabilities `p_0..=p_n`, `p_k = P_1(Z_k > 0)`, via
/// `p_{k+1} = p_k (1 - F(1 - p_k)) / p_k` evaluated without cancellation.
pub fn survival_probabilities(dist: &OffspringDistribution, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    for k in 0..n {
        let pk = p[k];
        p.push(pk * dist.eval_survival_quotient(1.0 - pk));
    }
    p
}

/// Taylor coefficients of `F` at `q`: `c_j = sum_{i>=j} C(i, j) p_i q^{i-j}`.
fn recentred_pgf(dist: &OffspringDistribution, q: f64) -> Vec<f64> {
    let pmf = dist.pmf();
    let d = pmf.len() - 1;
    let mut c = vec![0.0; d + 1];
    for (j, cj) in c.iter_mut().enumerate() {
        // C(i, j) q^{i-j} built incrementally in i
        let mut binom_pow = 1.0;
        let mut acc = 0.0;
        for (i, &p) in pmf.iter().enumerate().skip(j) {
            if i > j {
                binom_pow *= i as f64 / (i - j) as f64 * q;
            }
            acc += p * binom_pow;
        }
        *cj = acc;
    }
    c
}

#[derive(Debug, Clone)]
pub struct YaglomResult {
    /// Generating function of `nu_min`, order `K`, `H(0) = 0`.
    pub h: TruncatedSeries,
    /// `nu_min(k)` for `k = 1..=K` (index `k - 1`).
    pub nu_min: Vec<f64>,
    /// `p_n = 1 - F_n(0)` for `n = 0..=N`.
    pub p_seq: Vec<f64>,
    /// `p_{n+1} / p_n` for `n = 0..N`.
    pub ratio_seq: Vec<f64>,
    pub iterations: usize,
    pub sup_delta: f64,
    /// Offspring mean of the law this was computed for.
    pub m: f64,
}

impl YaglomResult {
    /// `q_n = F_n(0) = 1 - p_n`.
    pub fn q_seq(&self) -> Vec<f64> {
        self.p_seq.iter().map(|p| 1.0 - p).collect()
    }

    pub fn order(&self) -> usize {
        self.h.order()
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.h.eval(z)
    }

    /// Coefficients `r_j = sum_{i>j} nu_min(i)` of `(1 - H(z)) / (1 - z)`.
    /// The truncation deficit `1 - sum nu_min` is placed at `K + 1`.
    pub fn survival_quotient(&self) -> Vec<f64> {
        let k = self.nu_min.len();
        let deficit = (1.0 - self.nu_min.iter().sum::<f64>()).max(0.0);
        let mut r = vec![0.0; k + 1];
        r[k] = deficit;
        let mut acc = deficit;
        for j in (0..k).rev() {
            acc += self.nu_min[j];
            r[j] = acc;
        }
        r
    }

    /// `(1 - H(z)) / (1 - z)`, evaluated without cancellation near `z = 1`.
    pub fn eval_survival_quotient(&self, z: f64) -> f64 {
        self.survival_quotient().iter().rev().fold(0.0, |a, &r| a * z + r)
    }
}

/// Iterates the conditioned law until `sup_k |H_{n+1}(k) - H_n(k)| < tol`.
pub fn yaglom_limit(dist: &OffspringDistribution, order: usize, tol: f64, max_iter: usize) -> Result<YaglomResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidSpec(format!("tolerance must be positive, got {tol}")));
    }
    if order == 0 {
        return Err(Error::InvalidSpec("order must be at least 1".into()));
    }
    let mut h = TruncatedSeries::identity(order);
    let mut p_seq = vec![1.0];
    let mut ratio_seq = Vec::new();
    let mut sup_delta = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let p = *p_seq.last().unwrap();
        let c = recentred_pgf(dist, 1.0 - p);
        let mut weights = vec![0.0; c.len()];
        let mut pj = 1.0;
        for j in 1..c.len() {
            pj *= p;
            weights[j] = c[j] * pj;
        }
        let p_next: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= p_next);
        let phi = TruncatedSeries::from_coeffs(&weights, order)?;
        let mut next = TruncatedSeries::compose(&phi, &h, Composition::Formal)?;
        let flushed: Vec<f64> = next.coeffs().iter().map(|&x| if x.abs() < FLUSH { 0.0 } else { x }).collect();
        next = TruncatedSeries::new(flushed)?;
        sup_delta = next.coeffs().iter().zip(h.coeffs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ratio_seq.push(p_next / p);
        p_seq.push(p_next);
        h = next;
        iterations += 1;
        if sup_delta < tol {
            break;
        }
    }
    if sup_delta >= tol {
        return Err(Error::NoConvergence { iterations, sup_delta });
    }
    let nu_min = h.coeffs()[1..].to_vec();
    Ok(YaglomResult { h, nu_min, p_seq, ratio_seq, iterations, sup_delta, m: dist.mean() })
}

/// Residuals of the identities `H(F(z)) - H(F(0)) = m H(z)`,
/// `H(F(0)) = 1 - m` and `H(F(z)) - 1 = m (H(z) - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HIdentityResiduals {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub per_point: Vec<f64>,
}

impl HIdentityResiduals {
    pub fn reports(&self, grid_tol: f64, point_tol: f64) -> Vec<VerificationReport> {
        vec![
            VerificationReport::new("h_fixed_point", self.h1, grid_tol).with_details(self.per_point.clone()),
            VerificationReport::new("h_at_f0", self.h2, point_tol),
            VerificationReport::new("h_shifted", self.h3, grid_tol),
        ]
    }
}

pub fn h_identity_report(res: &YaglomResult, dist: &OffspringDistribution, zgrid: &[f64]) -> HIdentityResiduals {
    h_identity_residuals(&res.h, dist, zgrid)
}

/// Same residuals for an arbitrary candidate `H` (used for negative controls).
pub fn h_identity_residuals(h: &TruncatedSeries, dist: &OffspringDistribution, zgrid: &[f64]) -> HIdentityResiduals {
    let m = dist.mean();
    let h_f0 = h.eval(dist.eval_pgf(0.0));
    let mut per_point = Vec::with_capacity(zgrid.len());
    let mut h3: f64 = 0.0;
    for &z in zgrid {
        let hfz = h.eval(dist.eval_pgf(z));
        let hz = h.eval(z);
        per_point.push((hfz - h_f0 - m * hz).abs());
        h3 = h3.max((hfz - 1.0 - m * (hz - 1.0)).abs());
    }
    let h1 = per_point.iter().copied().fold(0.0, f64::max);
    HIdentityResiduals { h1, h2: (h_f0 - (1.0 - m)).abs(), h3, per_point }
}

/// `{0.05, 0.10, ..., 0.95}`.
pub fn standard_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeroth_iterate_is_identity() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        assert_eq!(iterate_pgf(&d, 0, 8), TruncatedSeries::identity(8));
    }

    #[test]
    fn pure_death_iterates_are_affine() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let f3 = iterate_pgf(&d, 3, 8);
        assert!((f3.coeff(0) - 0.875).abs() < 1e-16);
        assert!((f3.coeff(1) - 0.125).abs() < 1e-16);
        assert!(f3.coeffs()[2..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn survival_matches_series_iteration() {
        let d = OffspringDistribution::from_pmf(&[0.45, 0.3, 0.15, 0.1]).unwrap();
        let p = survival_probabilities(&d, 12);
        for (n, &pn) in p.iter().enumerate() {
            let fn0 = iterate_pgf(&d, n, 4).coeff(0);
            assert!((pn - (1.0 - fn0)).abs() < 1e-14);
        }
    }

    #[test]
    fn pure_death_yaglom_is_delta_one() {
        for order in [1, 8, 256] {
            let d = OffspringDistribution::pure_death(0.3).unwrap();
            let r = yaglom_limit(&d, order, 1e-12, 100).unwrap();
            assert_eq!(r.h, TruncatedSeries::identity(order));
            assert!(r.ratio_seq.iter().all(|x| (x - 0.3).abs() < 1e-15));
        }
    }

    #[test]
    fn geometric_yaglom_is_geometric() {
        // linear-fractional offspring: nu_min(k) = (2/3)(1/3)^{k-1} for b = 1/4
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let r = yaglom_limit(&d, 256, 1e-12, 10_000).unwrap();
        for k in 1..=40 {
            let expected = 2.0 / 3.0 * (1.0f64 / 3.0).powi(k - 1);
            assert!((r.nu_min[k as usize - 1] - expected).abs() < 1e-12, "k = {k}");
        }
        assert!((r.ratio_seq.last().unwrap() - d.mean()).abs() < 1e-6);
        assert!(r.p_seq.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn no_convergence_is_reported() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        match yaglom_limit(&d, 64, 1e-12, 3) {
            Err(Error::NoConvergence { iterations, sup_delta }) => {
                assert_eq!(iterations, 3);
                assert!(sup_delta >= 1e-12);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn identities_hold_and_detect_corruption() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let r = yaglom_limit(&d, 256, 1e-12, 10_000).unwrap();
        let res = h_identity_report(&r, &d, &standard_grid());
        assert!(res.h1 < 1e-9 && res.h3 < 1e-9 && res.h2 < 1e-10, "{res:?}");

        let mut c = r.h.coeffs().to_vec();
        c[1] += 0.05;
        let bad = TruncatedSeries::new(c).unwrap();
        let res = h_identity_residuals(&bad, &d, &standard_grid());
        assert!(res.h1 > 1e-3);
    }

    #[test]
    fn pure_death_identities_exact() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let r = yaglom_limit(&d, 16, 1e-12, 100).unwrap();
        let res = h_identity_report(&r, &d, &standard_grid());
        assert!(res.h1 < 1e-15 && res.h2 < 1e-15);
    }

    #[test]
    fn doubling_order_is_stable() {
        let d = OffspringDistribution::from_pmf(&[0.5, 0.25, 0.15, 0.1]).unwrap();
        let a = yaglom_limit(&d, 128, 1e-13, 10_000).unwrap();
        let b = yaglom_limit(&d, 256, 1e-13, 10_000).unwrap();
        for k in 0..32 {
            assert!((a.nu_min[k] - b.nu_min[k]).abs() < 1e-10);
        }
    }
}
