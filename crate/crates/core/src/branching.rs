//! Offspring laws, the killed transition kernel and one-step simulation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::DiscreteSampler;
use crate::series::TruncatedSeries;

/// Tail mass at which infinite-support families are cut off.
pub const TAIL_CUTOFF: f64 = 1e-15;

/// Tolerance on `sum p_k = 1` for explicit pmfs.
const PMF_SUM_TOL: f64 = 1e-12;

/// JSON description of an offspring law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OffspringSpec {
    Pmf { p: Vec<f64> },
    PureDeath { m: f64 },
    Geometric { b: f64 },
}

/// A validated subcritical offspring law with finite support.
#[derive(Debug, Clone)]
pub struct OffspringDistribution {
    pmf: Vec<f64>,
    mean: f64,
    spec: OffspringSpec,
    sampler: DiscreteSampler,
}

impl OffspringDistribution {
    pub fn from_spec(spec: &OffspringSpec) -> Result<Self> {
        let pmf = match *spec {
            OffspringSpec::Pmf { ref p } => p.clone(),
            OffspringSpec::PureDeath { m } => {
                if !(m > 0.0 && m < 1.0) {
                    return Err(Error::NotSubcritical(m));
                }
                vec![1.0 - m, m]
            }
            OffspringSpec::Geometric { b } => {
                if !(b > 0.0 && b < 1.0) {
                    return Err(Error::InvalidPmf(format!("geometric parameter {b} not in (0, 1)")));
                }
                // p_k = (1-b) b^k, tail beyond d is b^{d+1}
                let mut p = Vec::new();
                let mut tail = 1.0;
                let mut k = 0;
                while tail > TAIL_CUTOFF {
                    p.push((1.0 - b) * b.powi(k));
                    tail *= b;
                    k += 1;
                }
                let total: f64 = p.iter().sum();
                p.iter_mut().for_each(|x| *x /= total);
                p
            }
        };
        Self::build(pmf, spec.clone())
    }

    /// Shorthand for an explicit pmf.
    pub fn from_pmf(p: &[f64]) -> Result<Self> {
        Self::from_spec(&OffspringSpec::Pmf { p: p.to_vec() })
    }

    pub fn pure_death(m: f64) -> Result<Self> {
        Self::from_spec(&OffspringSpec::PureDeath { m })
    }

    pub fn geometric(b: f64) -> Result<Self> {
        Self::from_spec(&OffspringSpec::Geometric { b })
    }

    fn build(mut pmf: Vec<f64>, spec: OffspringSpec) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::InvalidPmf("empty pmf".into()));
        }
        if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidPmf("entries must be finite and nonnegative".into()));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOL {
            return Err(Error::InvalidPmf(format!("entries sum to {total}")));
        }
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        if mean >= 1.0 {
            return Err(Error::NotSubcritical(mean));
        }
        if mean <= 0.0 {
            return Err(Error::InvalidPmf("offspring mean must be positive".into()));
        }
        let sampler = DiscreteSampler::new(&pmf);
        Ok(Self { pmf, mean, spec, sampler })
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Offspring mean `m`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Maximal litter size `d`.
    pub fn max_litter(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn spec(&self) -> &OffspringSpec {
        &self.spec
    }

    pub fn is_pure_death(&self) -> bool {
        self.pmf.len() == 2
    }

    /// The pgf `F` as an exact polynomial of degree `d`.
    pub fn pgf(&self) -> TruncatedSeries {
        TruncatedSeries::new(self.pmf.clone()).expect("validated pmf")
    }

    /// `F(z)` by Horner.
    pub fn eval_pgf(&self, z: f64) -> f64 {
        self.pmf.iter().rev().fold(0.0, |acc, &p| acc * z + p)
    }

    /// Coefficients of `(1 - F(z)) / (1 - z)`, i.e. the tail sums
    /// `r_k = sum_{i > k} p_i`. The division is exact for a pmf.
    pub fn survival_quotient(&self) -> Vec<f64> {
        let d = self.max_litter();
        let mut r = vec![0.0; d.max(1)];
        let mut acc = 0.0;
        for k in (0..d).rev() {
            acc += self.pmf[k + 1];
            r[k] = acc;
        }
        r
    }

    /// `(1 - F(z)) / (1 - z)`, evaluated without cancellation near `z = 1`.
    pub fn eval_survival_quotient(&self, z: f64) -> f64 {
        self.survival_quotient().iter().rev().fold(0.0, |acc, &r| acc * z + r)
    }

    /// Sum of `z` iid offspring counts; state 0 is absorbing.
    pub fn simulate_step<R: Rng + ?Sized>(&self, z: u64, rng: &mut R) -> u64 {
        if z == 0 {
            return 0;
        }
        self.sampler.draw_sum(z, rng)
    }
}

/// Free-function form of [`OffspringDistribution::simulate_step`].
pub fn simulate_step<R: Rng + ?Sized>(dist: &OffspringDistribution, z: u64, rng: &mut R) -> u64 {
    dist.simulate_step(z, rng)
}

/// One row of the killed kernel: `row[j-1] = P_{ij}` for `j = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    pub row: Vec<f64>,
    /// `P_{i0} = F(0)^i`.
    pub absorbed: f64,
    /// Mass sent beyond the truncation, `1 - sum(row) - absorbed`.
    pub overflow: f64,
}

pub fn transition_row(dist: &OffspringDistribution, i: usize, k: usize) -> TransitionRow {
    assert!(i >= 1 && k >= 1, "state and truncation must be positive");
    let f = dist.pgf().truncate(k);
    let pw = f.powi(i);
    row_from_power(&pw)
}

fn row_from_power(pw: &TruncatedSeries) -> TransitionRow {
    let row = pw.coeffs()[1..].to_vec();
    let absorbed = pw.coeff(0);
    let overflow = 1.0 - row.iter().sum::<f64>() - absorbed;
    TransitionRow { row, absorbed, overflow }
}

/// The kernel restricted to `{1..K} x {1..K}`, plus the column into 0.
#[derive(Debug, Clone)]
pub struct TransitionBlock {
    k: usize,
    entries: Vec<f64>,
    to_zero: Vec<f64>,
    overflow: Vec<f64>,
}

impl TransitionBlock {
    pub fn new(dist: &OffspringDistribution, k: usize) -> Self {
        assert!(k >= 1);
        let f = dist.pgf().truncate(k);
        let mut entries = Vec::with_capacity(k * k);
        let mut to_zero = Vec::with_capacity(k);
        let mut overflow = Vec::with_capacity(k);
        let mut pw = TruncatedSeries::one(k);
        for _ in 1..=k {
            pw = pw.mul(&f);
            let r = row_from_power(&pw);
            entries.extend_from_slice(&r.row);
            to_zero.push(r.absorbed);
            overflow.push(r.overflow.max(0.0));
        }
        Self { k, entries, to_zero, overflow }
    }

    pub fn truncation(&self) -> usize {
        self.k
    }

    /// `P_{ij}` for `i, j` in `1..=K`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1) * self.k + (j - 1)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[(i - 1) * self.k..i * self.k]
    }

    /// `P_{i0}`.
    pub fn to_zero(&self, i: usize) -> f64 {
        self.to_zero[i - 1]
    }

    /// Mass of row `i` leaving `{0..K}`.
    pub fn overflow(&self, i: usize) -> f64 {
        self.overflow[i - 1]
    }

    /// Mass of row `i` assigned to state 0 and to states beyond `K`.
    pub fn row_deficit(&self, i: usize) -> f64 {
        self.to_zero(i) + self.overflow(i)
    }

    /// `(nu P)(j)` for `j = 1..=K` given `nu(1..=K)` (`nu[i-1]`).
    pub fn left_apply(&self, nu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        for (i, &w) in nu.iter().enumerate().take(self.k) {
            if w == 0.0 {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.row(i + 1)) {
                *o += w * p;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_death_law() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        assert_eq!(d.pmf(), &[0.5, 0.5]);
        assert_eq!(d.mean(), 0.5);
    }

    #[test]
    fn geometric_is_truncated_and_renormalised() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        // truncation at tail mass 1e-15 shifts the mean by O(d * 1e-15)
        assert!((d.mean() - 1.0 / 3.0).abs() < 1e-13);
        assert!((d.pmf().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let expected_len = (TAIL_CUTOFF.ln() / 0.25f64.ln()).ceil() as usize;
        assert_eq!(d.pmf().len(), expected_len);
    }

    #[test]
    fn invalid_laws() {
        assert!(matches!(OffspringDistribution::from_pmf(&[0.2, 0.9]), Err(Error::InvalidPmf(_))));
        assert!(matches!(OffspringDistribution::from_pmf(&[0.5, -0.1, 0.6]), Err(Error::InvalidPmf(_))));
        assert!(matches!(OffspringDistribution::from_pmf(&[0.0, 1.0]), Err(Error::NotSubcritical(_))));
        assert!(matches!(OffspringDistribution::from_pmf(&[0.5, 0.0, 0.5]), Err(Error::NotSubcritical(_))));
        assert!(matches!(OffspringDistribution::pure_death(1.0), Err(Error::NotSubcritical(_))));
        assert!(matches!(OffspringDistribution::from_pmf(&[1.0]), Err(Error::InvalidPmf(_))));
    }

    #[test]
    fn spec_json_forms() {
        let s: OffspringSpec = serde_json::from_str(r#"{"type":"pure_death","m":0.5}"#).unwrap();
        assert_eq!(s, OffspringSpec::PureDeath { m: 0.5 });
        let s: OffspringSpec = serde_json::from_str(r#"{"type":"geometric","b":0.25}"#).unwrap();
        assert_eq!(s, OffspringSpec::Geometric { b: 0.25 });
        let s: OffspringSpec = serde_json::from_str(r#"{"type":"pmf","p":[0.6,0.3,0.1]}"#).unwrap();
        assert_eq!(s, OffspringSpec::Pmf { p: vec![0.6, 0.3, 0.1] });
        assert!(serde_json::from_str::<OffspringSpec>(r#"{"type":"pmf","p":[1.0],"x":1}"#).is_err());
    }

    #[test]
    fn pure_death_rows() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let r = transition_row(&d, 1, 4);
        assert_eq!(r.row, vec![0.5, 0.0, 0.0, 0.0]);
        assert_eq!(r.absorbed, 0.5);
        assert_eq!(r.overflow, 0.0);
        let r = transition_row(&d, 2, 4);
        assert_eq!(&r.row[..2], &[0.5, 0.25]);
        assert_eq!(r.absorbed, 0.25);
    }

    #[test]
    fn rows_match_brute_force_convolution() {
        let d = OffspringDistribution::from_pmf(&[0.4, 0.35, 0.15, 0.1]).unwrap();
        let k = 32;
        let block = TransitionBlock::new(&d, k);
        let mut conv = vec![1.0];
        for i in 1..=5 {
            let mut next = vec![0.0; conv.len() + d.pmf().len() - 1];
            for (a, &x) in conv.iter().enumerate() {
                for (b, &y) in d.pmf().iter().enumerate() {
                    next[a + b] += x * y;
                }
            }
            conv = next;
            for j in 1..=k {
                let expected = conv.get(j).copied().unwrap_or(0.0);
                assert!((block.get(i, j) - expected).abs() < 1e-12);
            }
            let row_sum: f64 = block.row(i).iter().sum();
            assert!((row_sum + block.row_deficit(i) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn absorption_is_permanent() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            assert_eq!(d.simulate_step(0, &mut rng), 0);
        }
    }

    #[test]
    fn pure_death_single_step_frequency() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let ones = (0..n).filter(|_| d.simulate_step(1, &mut rng) == 1).count() as f64 / n as f64;
        assert!((ones - 0.5).abs() < 0.002);
    }

    #[test]
    fn geometric_step_mean() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 1_000_000;
        let total: u64 = (0..n).map(|_| d.simulate_step(10, &mut rng)).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 10.0 / 3.0).abs() < 0.01);
    }
}
