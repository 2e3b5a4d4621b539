//! Partial sums of `sum_n prod_{k<=n} (1 - η(q_k))`, where
//! `1 - F(z) = m (1 - z)(1 - η(z))` and `q_k = F_k(0)`.
//!
//! Divergence of the full series characterises recurrence of the Q-process.
//! A finite computation cannot certify divergence, so only the data is returned.

use crate::branching::OffspringDistribution;
use crate::yaglom::survival_probabilities;

/// `S_1..=S_n`. Uses `1 - η(q) = R_F(q) / m` with `R_F = (1 - F)/(1 - z)`
/// taken from the exact tail sums of the pmf.
pub fn joffe_partial_sums(dist: &OffspringDistribution, n: usize) -> Vec<f64> {
    let m = dist.mean();
    let p = survival_probabilities(dist, n);
    let mut out = Vec::with_capacity(n);
    let (mut prod, mut sum) = (1.0, 0.0);
    for pk in &p[1..] {
        prod *= dist.eval_survival_quotient(1.0 - pk) / m;
        sum += prod;
        out.push(sum);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_death_is_linear() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let s = joffe_partial_sums(&d, 50);
        for (i, v) in s.iter().enumerate() {
            assert!((v - (i + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_increments_positive_and_decreasing() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let s = joffe_partial_sums(&d, 200);
        assert!(s.windows(2).all(|w| w[1] >= w[0]));
        let inc: Vec<f64> = std::iter::once(s[0]).chain(s.windows(2).map(|w| w[1] - w[0])).collect();
        assert!(inc.iter().all(|&d| d > 0.0));
        assert!(inc.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
}
