//! Discrete sampling helpers shared by the simulation code.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::{Binomial, Poisson};

/// Sampler for a finite pmf `p_0..p_d` that can also draw sums of many
/// iid copies in `O(d)` via sequential conditional binomials.
#[derive(Debug, Clone)]
pub struct DiscreteSampler {
    pmf: Vec<f64>,
    suffix_mass: Vec<f64>,
    index: WeightedIndex<f64>,
}

/// Below this many summands a sum is drawn term by term.
const DIRECT_SUM_LIMIT: u64 = 64;

impl DiscreteSampler {
    /// `pmf` must be nonnegative with positive total mass; it is renormalised.
    pub fn new(pmf: &[f64]) -> Self {
        let total: f64 = pmf.iter().sum();
        let pmf: Vec<f64> = pmf.iter().map(|p| p / total).collect();
        let mut suffix_mass = vec![0.0; pmf.len() + 1];
        for k in (0..pmf.len()).rev() {
            suffix_mass[k] = suffix_mass[k + 1] + pmf[k];
        }
        let index = WeightedIndex::new(&pmf).expect("pmf with positive mass");
        Self { pmf, suffix_mass, index }
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.index.sample(rng) as u64
    }

    /// Sum of `n` iid draws.
    pub fn draw_sum<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> u64 {
        if n <= DIRECT_SUM_LIMIT {
            return (0..n).map(|_| self.draw(rng)).sum();
        }
        let mut remaining = n;
        let mut total: u64 = 0;
        for (k, &p) in self.pmf.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if p == 0.0 {
                continue;
            }
            let q = (p / self.suffix_mass[k]).min(1.0);
            let count = if q >= 1.0 {
                remaining
            } else {
                Binomial::new(remaining, q).expect("valid binomial").sample(rng)
            };
            total = total.saturating_add((k as u64).saturating_mul(count));
            remaining -= count;
        }
        total
    }
}

/// Poisson(`x`) conditioned on being at least `min` (`min` >= 1).
///
/// Small means use sequential inversion of the conditional law; large means
/// use rejection from the unconditioned law.
pub fn conditioned_poisson<R: Rng + ?Sized>(x: f64, min: u64, rng: &mut R) -> u64 {
    debug_assert!(min >= 1 && x > 0.0);
    if x < 1.0 && min == 1 {
        // P(N = k | N >= 1) = x^k / (k! (e^x - 1))
        let u: f64 = rng.random::<f64>() * x.exp_m1();
        let mut k = 1u64;
        let mut term = x;
        let mut acc = term;
        while acc < u {
            k += 1;
            term *= x / k as f64;
            acc += term;
            if term == 0.0 {
                break;
            }
        }
        return k;
    }
    let pois = Poisson::new(x).expect("positive poisson mean");
    loop {
        let n = pois.sample(rng) as u64;
        if n >= min {
            return n;
        }
    }
}
