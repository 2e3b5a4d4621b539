//! Stochastic cross-checks: the compound sampler for QSDs, one-step
//! quasi-stationarity and Yaglom convergence.
//!
//! All simulations are split into [`SHARDS`] shards. Shard `i` draws from
//! `ChaCha8Rng` seeded with the master seed on stream `i`, so results do not
//! depend on the number of worker threads.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Geometric;
use rayon::prelude::*;
use serde::Serialize;

use crate::branching::OffspringDistribution;
use crate::construct::nlaw_pmf;
use crate::error::{Error, Result};
use crate::sampling::{conditioned_poisson, DiscreteSampler};
use crate::selfsimilar::{integrate_selfsimilar, SelfSimilarMeasure};
use crate::yaglom::yaglom_limit;

pub const SHARDS: u64 = 64;
/// Tolerance on `κ(1) = 1`.
pub const KAPPA_TOL: f64 = 1e-8;
/// Tolerance on `κ(mθ) = m^α κ(θ)`.
pub const SEMI_STABLE_TOL: f64 = 1e-6;
/// Order of the `nu_min` table used as the Yaglom reference.
pub const YAGLOM_REFERENCE_ORDER: usize = 512;
/// Survival fractions below this are flagged in the report notes.
pub const LOW_SURVIVAL: f64 = 1e-4;
/// Poisson means above this are replaced by their rounded value.
const POISSON_CAP: f64 = 1e17;

/// The subordinator `S` with Laplace exponent
/// `κ(θ) = aθ + ∫ (1 - e^{-θx}) x^{-α} Λ(dx)`, normalised by `κ(1) = 1`.
#[derive(Debug, Clone)]
pub struct SubordinatorSpec {
    alpha: f64,
    lambda: Option<SelfSimilarMeasure>,
    drift: f64,
    kappa_at_1: f64,
}

impl SubordinatorSpec {
    /// Pure-jump case `α ∈ (0, 1)`; `lambda` must already satisfy `κ(1) = 1`.
    pub fn new(alpha: f64, lambda: SelfSimilarMeasure) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OutOfRangeAlpha { alpha, range: "(0, 1)" });
        }
        let mut spec = Self { alpha, lambda: Some(lambda), drift: 0.0, kappa_at_1: f64::NAN };
        spec.kappa_at_1 = spec.kappa(1.0)?;
        if (spec.kappa_at_1 - 1.0).abs() > KAPPA_TOL {
            return Err(Error::InvalidSpec(format!("kappa(1) = {} differs from 1", spec.kappa_at_1)));
        }
        let r = spec.semi_stability_residual()?;
        if r > SEMI_STABLE_TOL {
            return Err(Error::InvalidSpec(format!("kappa fails semi-stability by {r:e}")));
        }
        Ok(spec)
    }

    /// Rescales `lambda` to `κ(1) = 1` first.
    pub fn normalized(alpha: f64, lambda: &SelfSimilarMeasure) -> Result<Self> {
        Self::new(alpha, crate::selfsimilar::normalize_for_qsd(lambda, alpha)?)
    }

    /// `α = 1`: unit drift, no jumps.
    pub fn drift_only() -> Self {
        Self { alpha: 1.0, lambda: None, drift: 1.0, kappa_at_1: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> Option<&SelfSimilarMeasure> {
        self.lambda.as_ref()
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn kappa_at_1(&self) -> f64 {
        self.kappa_at_1
    }

    pub fn kappa(&self, theta: f64) -> Result<f64> {
        let jumps = match &self.lambda {
            Some(l) => integrate_selfsimilar(l, self.alpha, |x| -(-theta * x).exp_m1(), 1e-12)?.value,
            None => 0.0,
        };
        Ok(self.drift * theta + jumps)
    }

    /// `max |κ(mθ) - m^α κ(θ)| / κ(θ)` over `θ ∈ {1, m, m²}`.
    pub fn semi_stability_residual(&self) -> Result<f64> {
        let Some(l) = &self.lambda else { return Ok(0.0) };
        let m = l.m();
        let mut worst: f64 = 0.0;
        for theta in [1.0, m, m * m] {
            let k = self.kappa(theta)?;
            worst = worst.max((self.kappa(m * theta)? - m.powf(self.alpha) * k).abs() / k);
        }
        Ok(worst)
    }
}

/// Exponentially tilted copy of `Λ` on one band, `e^{β u} Λ(du)` with `u = log y ∈ [0, log(1/m))`.
#[derive(Debug, Clone)]
struct TiltedBand {
    beta: f64,
    /// `(lo, hi)` in `u`; atoms have `lo == hi`.
    pieces: Vec<(f64, f64)>,
    index: WeightedIndex<f64>,
    mass: f64,
}

impl TiltedBand {
    fn new(lambda: &SelfSimilarMeasure, beta: f64) -> Self {
        let period = lambda.period();
        let base = lambda.log_uniform_weight();
        let mut pieces = Vec::new();
        let mut weights = Vec::new();
        let mut cell = |lo: f64, hi: f64, w: f64| {
            if w > 0.0 {
                let x = beta * (hi - lo);
                let integral = if x.abs() < 1e-12 { hi - lo } else { (beta * lo).exp() * x.exp_m1() / beta };
                pieces.push((lo, hi));
                weights.push(w * integral);
            }
        };
        let cells = lambda.density();
        if cells.is_empty() {
            cell(0.0, period, base);
        } else {
            let width = period / cells.len() as f64;
            for (j, d) in cells.iter().enumerate() {
                cell(j as f64 * width, (j + 1) as f64 * width, base + d);
            }
        }
        for &(y, w) in lambda.atom_list() {
            let u = y.ln();
            pieces.push((u, u));
            weights.push(w * (beta * u).exp());
        }
        let mass = weights.iter().sum();
        let index = WeightedIndex::new(&weights).expect("nonzero measure");
        Self { beta, pieces, index, mass }
    }

    fn sample_y<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (lo, hi) = self.pieces[self.index.sample(rng)];
        if lo == hi {
            return lo.exp();
        }
        let u: f64 = rng.random();
        let x = self.beta * (hi - lo);
        let t = if x.abs() < 1e-12 { u * (hi - lo) } else { (u * x.exp_m1()).ln_1p() / self.beta };
        (lo + t).exp()
    }
}

/// Sampler for the probability law `(1 - e^{-x}) x^{-α} Λ(dx)`.
///
/// Proposal `min(x, 1) x^{-α} Λ(dx)`: bands with `x >= 1` carry geometric
/// weights `m^{nα}`, bands below carry `m^{k(1-α)}`; acceptance is at least
/// `1 - e^{-1}`.
#[derive(Debug, Clone)]
pub struct MixingLaw {
    m: f64,
    upper: TiltedBand,
    lower: TiltedBand,
    upper_bands: Geometric,
    lower_bands: Geometric,
    p_upper: f64,
}

impl MixingLaw {
    pub fn new(alpha: f64, lambda: &SelfSimilarMeasure) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OutOfRangeAlpha { alpha, range: "(0, 1)" });
        }
        if lambda.is_zero() {
            return Err(Error::ZeroMass);
        }
        let m = lambda.m();
        let upper = TiltedBand::new(lambda, -alpha);
        let lower = TiltedBand::new(lambda, 1.0 - alpha);
        let (ru, rl) = (m.powf(alpha), m.powf(1.0 - alpha));
        let mass_upper = upper.mass / (1.0 - ru);
        let mass_lower = lower.mass * rl / (1.0 - rl);
        let geometric = |r: f64| Geometric::new(1.0 - r).map_err(|e| Error::InvalidSpec(e.to_string()));
        Ok(Self {
            m,
            upper,
            lower,
            upper_bands: geometric(ru)?,
            lower_bands: geometric(rl)?,
            p_upper: mass_upper / (mass_upper + mass_lower),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let (x, accept) = if rng.random::<f64>() < self.p_upper {
                let n = self.upper_bands.sample(rng) as i32;
                let x = self.upper.sample_y(rng) * self.m.powi(-n);
                (x, -(-x).exp_m1())
            } else {
                let k = self.lower_bands.sample(rng) as i32 + 1;
                let x = self.lower.sample_y(rng) * self.m.powi(k);
                (x, -(-x).exp_m1() / x)
            };
            if rng.random::<f64>() < accept {
                return x;
            }
        }
    }

    /// `N ~ Poisson(x)` conditioned on `N >= 1`, `x` from the mixing law.
    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let x = self.sample(rng);
        if x > POISSON_CAP {
            x.round() as u64
        } else {
            conditioned_poisson(x, 1, rng)
        }
    }
}

/// Tables for drawing from the QSD `1 - (1 - G)` attached to a subordinator.
#[derive(Debug, Clone)]
pub struct QsdSampler {
    spec: SubordinatorSpec,
    summands: DiscreteSampler,
    jumps: Option<(DiscreteSampler, MixingLaw, usize)>,
    n_deficit: f64,
}

impl QsdSampler {
    /// `nu_min[k-1] = nu_min(k)`; `k` is the order of the table for `N`.
    pub fn new(spec: SubordinatorSpec, nu_min: &[f64], k: usize) -> Result<Self> {
        if nu_min.is_empty() || nu_min.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || nu_min.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidPmf("nu_min must be a nonnegative table with positive mass".into()));
        }
        let mut with_zero = vec![0.0];
        with_zero.extend_from_slice(nu_min);
        let summands = DiscreteSampler::new(&with_zero);
        let (jumps, n_deficit) = match spec.lambda() {
            None => (None, 0.0),
            Some(l) => {
                let law = nlaw_pmf(spec.alpha(), l, k, 1e-12)?;
                let deficit = law.deficit.max(0.0);
                // index 0 stands for "N > k"
                let mut table = vec![deficit];
                table.extend(law.pmf.iter().map(|p| p.max(0.0)));
                (Some((DiscreteSampler::new(&table), MixingLaw::new(spec.alpha(), l)?, k)), law.deficit)
            }
        };
        Ok(Self { spec, summands, jumps, n_deficit })
    }

    pub fn spec(&self) -> &SubordinatorSpec {
        &self.spec
    }

    /// `1 - sum_{k <= K} P(N = k)`, the mass sent to the exact tail sampler.
    pub fn n_deficit(&self) -> f64 {
        self.n_deficit
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let Some((table, law, k)) = &self.jumps else { return 1 };
        match table.draw(rng) {
            0 => loop {
                let n = law.sample_n(rng);
                if n > *k as u64 {
                    return n;
                }
            },
            n => n,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let n = self.sample_n(rng);
        self.summands.draw_sum(n, rng)
    }
}

/// One QSD draw: a sum of `N` iid `nu_min` variables, or a single one when `α = 1`.
pub fn sample_qsd<R: Rng + ?Sized>(sampler: &QsdSampler, rng: &mut R) -> u64 {
    sampler.sample(rng)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCReport {
    pub n_samples: u64,
    /// Frequencies of `k = 1..=K` (index `k - 1`).
    pub empirical_pmf: Vec<f64>,
    pub reference_pmf: Vec<f64>,
    /// Frequency of values above `K`.
    pub empirical_overflow: f64,
    pub reference_overflow: f64,
    pub tv_distance: f64,
    /// Expected TV distance from multinomial noise alone.
    pub tv_noise: f64,
    pub chi2_stat: f64,
    pub chi2_dof: usize,
    pub seed: u64,
    pub notes: Vec<(String, f64)>,
}

impl MCReport {
    fn new(counts: &[u64], reference: &[f64], seed: u64) -> Self {
        let k = reference.len();
        let n: u64 = counts.iter().sum();
        let nf = n.max(1) as f64;
        let empirical_pmf: Vec<f64> = counts[..k].iter().map(|&c| c as f64 / nf).collect();
        let empirical_overflow = counts[k] as f64 / nf;
        let reference_overflow = (1.0 - reference.iter().sum::<f64>()).max(0.0);
        let mut probs = reference.to_vec();
        probs.push(reference_overflow);
        let emp: Vec<f64> = empirical_pmf.iter().copied().chain([empirical_overflow]).collect();
        let tv_distance = (0.5 * emp.iter().zip(&probs).map(|(e, p)| (e - p).abs()).sum::<f64>()).min(1.0);
        // E|p̂ - p| ≈ sqrt(2 p (1 - p) / (π n))
        let tv_noise = 0.5 * probs.iter().map(|p| (2.0 * p * (1.0 - p) / (std::f64::consts::PI * nf)).sqrt()).sum::<f64>();
        let (chi2_stat, chi2_dof) = chi2(counts, &probs, nf);
        Self {
            n_samples: n,
            empirical_pmf,
            reference_pmf: reference.to_vec(),
            empirical_overflow,
            reference_overflow,
            tv_distance,
            tv_noise,
            chi2_stat,
            chi2_dof,
            seed,
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, name: &str, value: f64) -> Self {
        self.notes.push((name.to_string(), value));
        self
    }

    pub fn note(&self, name: &str) -> Option<f64> {
        self.notes.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Pearson statistic over cells with expected count >= 5; the rest are pooled.
fn chi2(counts: &[u64], probs: &[f64], n: f64) -> (f64, usize) {
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * n;
        if e >= 5.0 {
            stat += (c as f64 - e).powi(2) / e;
            cells += 1;
        } else {
            pooled_obs += c as f64;
            pooled_exp += e;
        }
    }
    if pooled_exp >= 5.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    (stat, cells.saturating_sub(1))
}

fn shard_sizes(n: u64) -> Vec<u64> {
    (0..SHARDS).map(|i| n / SHARDS + u64::from(i < n % SHARDS)).collect()
}

fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Histogram over `1..=k` plus overflow (index `k`); zeros are skipped and counted separately.
fn sharded_histogram<F>(n: u64, k: usize, seed: u64, draw: F) -> (Vec<u64>, u64)
where
    F: Fn(&mut ChaCha8Rng) -> u64 + Sync,
{
    let parts: Vec<(Vec<u64>, u64)> = shard_sizes(n)
        .into_par_iter()
        .enumerate()
        .map(|(i, size)| {
            let mut rng = shard_rng(seed, i as u64);
            let mut counts = vec![0u64; k + 1];
            let mut zeros = 0u64;
            for _ in 0..size {
                match draw(&mut rng) {
                    0 => zeros += 1,
                    v if v as usize > k => counts[k] += 1,
                    v => counts[v as usize - 1] += 1,
                }
            }
            (counts, zeros)
        })
        .collect();
    let mut counts = vec![0u64; k + 1];
    let mut zeros = 0;
    for (c, z) in parts {
        for (a, b) in counts.iter_mut().zip(c) {
            *a += b;
        }
        zeros += z;
    }
    (counts, zeros)
}

/// Draws `n_samples` QSD samples and compares them with `reference`
/// (`reference[k-1] = ν(k)`, a normalised QSD truncated at `K`).
pub fn qsd_sampling_test(sampler: &QsdSampler, reference: &[f64], n_samples: u64, seed: u64) -> MCReport {
    let (counts, _) = sharded_histogram(n_samples, reference.len(), seed, |rng| sampler.sample(rng));
    MCReport::new(&counts, reference, seed).with_note("n_deficit", sampler.n_deficit())
}

/// Draws `Z_0 ~ ν`, takes one step, keeps `Z_1 > 0`, and compares the
/// conditioned law with `ν` on `1..=k_report`.
///
/// `nu[k-1] = ν(k)` is renormalised on `1..=K`; the removed deficit is noted
/// as `renormalization`.
pub fn quasi_stationarity_test(
    dist: &OffspringDistribution,
    nu: &[f64],
    k_report: usize,
    n_samples: u64,
    seed: u64,
) -> Result<MCReport> {
    let total: f64 = nu.iter().sum();
    if nu.is_empty() || nu.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || total <= 0.0 {
        return Err(Error::InvalidPmf("nu must be a nonnegative table with positive mass".into()));
    }
    let k_report = k_report.clamp(1, nu.len());
    let mut with_zero = vec![0.0];
    with_zero.extend(nu.iter().map(|p| p / total));
    let start = DiscreteSampler::new(&with_zero);
    let reference: Vec<f64> = with_zero[1..=k_report].to_vec();
    let (counts, killed) = sharded_histogram(n_samples, k_report, seed, |rng| dist.simulate_step(start.draw(rng), rng));
    Ok(MCReport::new(&counts, &reference, seed)
        .with_note("renormalization", 1.0 - total)
        .with_note("killed_fraction", killed as f64 / n_samples.max(1) as f64))
}

/// Simulates `n_paths` paths from `Z_0 = 1` for `n` generations and compares
/// the survivors with `nu_min`.
///
/// Notes: `survival_fraction`, `p_n` and the binomial `survival_z` score;
/// `low_survival = 1` when the fraction is below [`LOW_SURVIVAL`].
pub fn yaglom_mc(dist: &OffspringDistribution, n: usize, n_paths: u64, seed: u64) -> Result<MCReport> {
    let yaglom = yaglom_limit(dist, YAGLOM_REFERENCE_ORDER, 1e-14, 100_000)?;
    let p_n = crate::yaglom::survival_probabilities(dist, n)[n];
    let (counts, _) = sharded_histogram(n_paths, YAGLOM_REFERENCE_ORDER, seed, |rng| {
        let mut z = 1u64;
        for _ in 0..n {
            z = dist.simulate_step(z, rng);
            if z == 0 {
                break;
            }
        }
        z
    });
    let survivors: u64 = counts.iter().sum();
    if survivors == 0 {
        return Err(Error::NoSurvivors { paths: n_paths });
    }
    let fraction = survivors as f64 / n_paths as f64;
    let sd = (p_n * (1.0 - p_n) / n_paths as f64).sqrt();
    let z = if sd > 0.0 { (fraction - p_n) / sd } else { 0.0 };
    Ok(MCReport::new(&counts, &yaglom.nu_min, seed)
        .with_note("survival_fraction", fraction)
        .with_note("p_n", p_n)
        .with_note("survival_z", z)
        .with_note("low_survival", f64::from(u8::from(fraction < LOW_SURVIVAL))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{closed_form_measure, ClosedFormKind};

    fn sibuya(alpha: f64, k: usize) -> Vec<f64> {
        let mut p = vec![alpha];
        for j in 1..k {
            p.push(p[j - 1] * (j as f64 - alpha) / (j + 1) as f64);
        }
        p
    }

    fn flat(m: f64, alpha: f64) -> SubordinatorSpec {
        SubordinatorSpec::normalized(alpha, &SelfSimilarMeasure::log_uniform(m, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn kappa_normalised_and_semi_stable() {
        let s = flat(0.5, 0.5);
        assert!((s.kappa_at_1() - 1.0).abs() < 1e-10);
        assert!(s.semi_stability_residual().unwrap() < 1e-9);
        let atoms = SelfSimilarMeasure::atoms(0.3, vec![(1.5, 1.0), (2.0, 0.5)]).unwrap();
        let s = SubordinatorSpec::normalized(0.4, &atoms).unwrap();
        assert!(s.semi_stability_residual().unwrap() < 1e-9);
    }

    #[test]
    fn unnormalised_measure_rejected() {
        let l = SelfSimilarMeasure::log_uniform(0.5, 1.0).unwrap();
        assert!(matches!(SubordinatorSpec::new(0.5, l), Err(Error::InvalidSpec(_))));
        assert_eq!(SubordinatorSpec::drift_only().kappa(2.0).unwrap(), 2.0);
    }

    #[test]
    fn mixing_law_reproduces_n_table() {
        let atoms = SelfSimilarMeasure::new(0.4, 0.3, vec![(1.7, 0.8)], vec![0.2, 1.0, 0.0]).unwrap();
        let spec = SubordinatorSpec::normalized(0.6, &atoms).unwrap();
        let l = spec.lambda().unwrap();
        let law = MixingLaw::new(0.6, l).unwrap();
        let table = nlaw_pmf(0.6, l, 16, 1e-12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 400_000;
        let mut counts = [0u64; 4];
        for _ in 0..n {
            let v = law.sample_n(&mut rng) as usize;
            if v <= 4 {
                counts[v - 1] += 1;
            }
        }
        for (c, p) in counts.iter().zip(&table.pmf) {
            let f = *c as f64 / n as f64;
            assert!((f - p).abs() < 5.0 * (p * (1.0 - p) / n as f64).sqrt(), "{f} vs {p}");
        }
    }

    #[test]
    fn pure_death_gives_sibuya() {
        let sampler = QsdSampler::new(flat(0.5, 0.5), &[1.0], 1024).unwrap();
        let r = qsd_sampling_test(&sampler, &sibuya(0.5, 256), 1_000_000, 11);
        assert!(r.tv_distance < 0.005, "{} (noise {})", r.tv_distance, r.tv_noise);
        assert!(r.tv_distance < 3.0 * r.tv_noise);
    }

    #[test]
    fn drift_case_is_nu_min() {
        let nu_min: Vec<f64> = (1..=40).map(|k| 0.6 * 0.4f64.powi(k - 1)).collect();
        let sampler = QsdSampler::new(SubordinatorSpec::drift_only(), &nu_min, 16).unwrap();
        let r = qsd_sampling_test(&sampler, &nu_min[..10], 200_000, 3);
        assert!(r.tv_distance < 3.0 * r.tv_noise, "{r:?}");
    }

    #[test]
    fn deterministic_in_seed() {
        let sampler = QsdSampler::new(flat(0.5, 0.3), &[1.0], 256).unwrap();
        let a = qsd_sampling_test(&sampler, &sibuya(0.3, 64), 20_000, 5);
        let b = qsd_sampling_test(&sampler, &sibuya(0.3, 64), 20_000, 5);
        assert_eq!(a, b);
        let c = qsd_sampling_test(&sampler, &sibuya(0.3, 64), 20_000, 6);
        assert_ne!(a.empirical_pmf, c.empirical_pmf);
    }

    #[test]
    fn one_step_pure_death() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let r = quasi_stationarity_test(&d, &[1.0], 1, 10_000, 1).unwrap();
        assert_eq!(r.tv_distance, 0.0);
        let nu = closed_form_measure(&d, 0.5, ClosedFormKind::QsdPower, 1 << 14).unwrap().dense();
        let r = quasi_stationarity_test(&d, &nu[1..], 256, 1_000_000, 2).unwrap();
        assert!(r.tv_distance < 0.02, "{}", r.tv_distance);
    }

    #[test]
    fn one_step_negative_control() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let r = quasi_stationarity_test(&d, &[0.1; 10], 10, 200_000, 4).unwrap();
        assert!(r.tv_distance > 0.05, "{}", r.tv_distance);
    }

    #[test]
    fn yaglom_pure_death_exact() {
        let d = OffspringDistribution::pure_death(0.5).unwrap();
        let r = yaglom_mc(&d, 6, 100_000, 9).unwrap();
        assert_eq!(r.tv_distance, 0.0);
        assert!(r.note("survival_z").unwrap().abs() < 5.0);
    }

    #[test]
    fn yaglom_geometric() {
        let d = OffspringDistribution::geometric(0.25).unwrap();
        let r = yaglom_mc(&d, 5, 2_000_000, 10).unwrap();
        assert!(r.tv_distance < 0.02, "{r:?}");
        assert!(r.note("survival_z").unwrap().abs() < 5.0);
    }

    #[test]
    fn no_survivors() {
        let d = OffspringDistribution::pure_death(0.1).unwrap();
        assert!(matches!(yaglom_mc(&d, 40, 1000, 1), Err(Error::NoSurvivors { paths: 1000 })));
    }
}
