//! Measures `Λ` on `(0, ∞)` with `Λ(A) = Λ(mA)`, and integrals against
//! `x^{-alpha} Λ(dx)`.
//!
//! A measure is stored on the fundamental domain `[1, 1/m)` and pushed to
//! band `n`, `[m^{-n}, m^{-n-1})`, by `y ↦ m^{-n} y`. The continuous part is
//! a density with respect to `dy / y`, so the constant density `c` is the
//! measure `c dx / x`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quad::{adaptive, GaussRule};

/// Default number of cells for piecewise-constant log-densities.
pub const DEFAULT_CELLS: usize = 64;
pub const DEFAULT_GL_ORDER: usize = 32;
pub const DEFAULT_MAX_DEPTH: usize = 10;
/// Bands a direction may use beyond the requested span before giving up.
pub const MAX_EXTRA_BANDS: usize = 64;

/// Relative contributions below this are treated as zero.
const FLOOR: f64 = 1e-300;

/// JSON description of a self-similar measure; `m` comes from the offspring law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// `c dx / x`.
    LogUniform { c: f64 },
    /// Atoms `(x, w)`, positions folded into `[1, 1/m)`.
    Atoms { atoms: Vec<(f64, f64)> },
    /// Equal-width cells in `log y` over `[1, 1/m)`, density per `dy / y`.
    LogDensity { cells: Vec<f64> },
    /// Sum of the three parts, as produced by arithmetic on measures.
    Combined {
        #[serde(default)]
        c: f64,
        #[serde(default)]
        atoms: Vec<(f64, f64)>,
        #[serde(default)]
        cells: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarMeasure {
    m: f64,
    log_uniform_weight: f64,
    atoms: Vec<(f64, f64)>,
    density: Vec<f64>,
}

impl SelfSimilarMeasure {
    pub fn new(m: f64, log_uniform_weight: f64, atoms: Vec<(f64, f64)>, density: Vec<f64>) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::InvalidSpec(format!("ratio m = {m} not in (0, 1)")));
        }
        if !(log_uniform_weight >= 0.0 && log_uniform_weight.is_finite()) {
            return Err(Error::InvalidSpec(format!("log-uniform weight {log_uniform_weight} must be finite and >= 0")));
        }
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidSpec("density cells must be finite and >= 0".into()));
        }
        let period = (1.0 / m).ln();
        let mut folded = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidSpec(format!("atom position {x} must be positive")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidSpec(format!("atom weight {w} must be positive")));
            }
            folded.push((fold(x, m, period), w));
        }
        Ok(Self { m, log_uniform_weight, atoms: folded, density })
    }

    /// `c dx / x`.
    pub fn log_uniform(m: f64, c: f64) -> Result<Self> {
        Self::new(m, c, Vec::new(), Vec::new())
    }

    pub fn atoms(m: f64, atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(m, 0.0, atoms, Vec::new())
    }

    pub fn log_density(m: f64, cells: Vec<f64>) -> Result<Self> {
        Self::new(m, 0.0, Vec::new(), cells)
    }

    pub fn from_spec(spec: &MeasureSpec, m: f64) -> Result<Self> {
        match spec {
            MeasureSpec::LogUniform { c } => Self::log_uniform(m, *c),
            MeasureSpec::Atoms { atoms } => Self::atoms(m, atoms.clone()),
            MeasureSpec::LogDensity { cells } => Self::log_density(m, cells.clone()),
            MeasureSpec::Combined { c, atoms, cells } => Self::new(m, *c, atoms.clone(), cells.clone()),
        }
    }

    pub fn to_spec(&self) -> MeasureSpec {
        match (self.log_uniform_weight != 0.0, !self.atoms.is_empty(), !self.density.is_empty()) {
            (_, false, false) => MeasureSpec::LogUniform { c: self.log_uniform_weight },
            (false, true, false) => MeasureSpec::Atoms { atoms: self.atoms.clone() },
            (false, false, true) => MeasureSpec::LogDensity { cells: self.density.clone() },
            _ => MeasureSpec::Combined {
                c: self.log_uniform_weight,
                atoms: self.atoms.clone(),
                cells: self.density.clone(),
            },
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// `log(1/m)`, the width of a band in `log x`.
    pub fn period(&self) -> f64 {
        (1.0 / self.m).ln()
    }

    pub fn log_uniform_weight(&self) -> f64 {
        self.log_uniform_weight
    }

    pub fn atom_list(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// `Λ([1, 1/m))`, equal to the mass of every band.
    pub fn band_mass(&self) -> f64 {
        let period = self.period();
        let cells = if self.density.is_empty() {
            0.0
        } else {
            self.density.iter().sum::<f64>() * period / self.density.len() as f64
        };
        self.log_uniform_weight * period + self.atoms.iter().map(|a| a.1).sum::<f64>() + cells
    }

    pub fn is_zero(&self) -> bool {
        self.band_mass() == 0.0
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidSpec(format!("scale factor {s} must be finite and >= 0")));
        }
        let atoms = if s == 0.0 { Vec::new() } else { self.atoms.iter().map(|&(x, w)| (x, w * s)).collect() };
        Ok(Self {
            m: self.m,
            log_uniform_weight: self.log_uniform_weight * s,
            atoms,
            density: self.density.iter().map(|d| d * s).collect(),
        })
    }

    /// `Λ_1 + Λ_2`; densities on different partitions are refined to a common one.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.m - other.m).abs() > 1e-15 * self.m {
            return Err(Error::InvalidSpec(format!("cannot add measures with ratios {} and {}", self.m, other.m)));
        }
        let density = match (self.density.len(), other.density.len()) {
            (0, _) => other.density.clone(),
            (_, 0) => self.density.clone(),
            (a, b) => {
                let n = lcm(a, b);
                (0..n).map(|i| self.density[i * a / n] + other.density[i * b / n]).collect()
            }
        };
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Ok(Self {
            m: self.m,
            log_uniform_weight: self.log_uniform_weight + other.log_uniform_weight,
            atoms,
            density,
        })
    }

    /// Runs `(u0, u1, weight)` in `u = log y` where the density is constant.
    fn runs(&self) -> Vec<(f64, f64, f64)> {
        let period = self.period();
        if self.density.is_empty() {
            if self.log_uniform_weight > 0.0 {
                return vec![(0.0, period, self.log_uniform_weight)];
            }
            return Vec::new();
        }
        let n = self.density.len();
        let h = period / n as f64;
        let mut runs: Vec<(f64, f64, f64)> = Vec::new();
        for (i, d) in self.density.iter().enumerate() {
            let w = d + self.log_uniform_weight;
            let (u0, u1) = (i as f64 * h, if i + 1 == n { period } else { (i + 1) as f64 * h });
            match runs.last_mut() {
                Some(last) if last.2 == w => last.1 = u1,
                _ => runs.push((u0, u1, w)),
            }
        }
        runs.retain(|r| r.2 > 0.0);
        runs
    }

    /// `∫_{[a, b)} x^{-alpha} Λ(dx)`, exact.
    pub fn weighted_mass(&self, alpha: f64, a: f64, b: f64) -> f64 {
        if !(b > a && a > 0.0) {
            return 0.0;
        }
        let period = self.period();
        let (la, lb) = (a.ln(), b.ln());
        // ∫ e^{-alpha v} dv over [v0, v1] ∩ [la, lb]
        let piece = |v0: f64, v1: f64| -> f64 {
            let (v0, v1) = (v0.max(la), v1.min(lb));
            if v1 <= v0 {
                return 0.0;
            }
            if alpha == 0.0 {
                v1 - v0
            } else {
                ((-alpha * v0).exp() - (-alpha * v1).exp()) / alpha
            }
        };
        let mut total = self.log_uniform_weight * piece(la, lb);
        let n_lo = (la / period).floor() as i64;
        let n_hi = (lb / period).floor() as i64;
        for n in n_lo..=n_hi {
            let shift = n as f64 * period;
            for &(y, w) in &self.atoms {
                let x = (y.ln() + shift).exp();
                if x >= a && x < b {
                    total += w * x.powf(-alpha);
                }
            }
            if !self.density.is_empty() {
                let h = period / self.density.len() as f64;
                for (i, d) in self.density.iter().enumerate() {
                    total += d * piece(shift + i as f64 * h, shift + (i + 1) as f64 * h);
                }
            }
        }
        total
    }
}

fn fold(x: f64, m: f64, period: f64) -> f64 {
    let n = (x.ln() / period).floor();
    let mut y = x * m.powf(n);
    // guard against rounding at band edges
    if y >= 1.0 / m {
        y *= m;
    }
    if y < 1.0 {
        y /= m;
    }
    y
}

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// Integration controls.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub gl_order: usize,
    pub max_depth: usize,
    /// Bands meeting `[lo, hi]` are always summed before the stopping test applies.
    pub span: (f64, f64),
}

impl IntegrateOptions {
    pub fn new(rel_tol: f64) -> Self {
        Self { rel_tol, gl_order: DEFAULT_GL_ORDER, max_depth: DEFAULT_MAX_DEPTH, span: (1.0, 1.0) }
    }

    pub fn with_span(mut self, lo: f64, hi: f64) -> Self {
        self.span = (lo, hi);
        self
    }

    pub fn with_gl_order(mut self, order: usize) -> Self {
        self.gl_order = order;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    /// Lowest and highest band index summed.
    pub bands_used: (i64, i64),
    /// Size of the last change of the extrapolated band sums.
    pub tail_estimate: f64,
    pub quadrature_converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecIntegralResult {
    pub values: Vec<f64>,
    pub bands_used: (i64, i64),
    pub tail_estimate: Vec<f64>,
    pub quadrature_converged: bool,
}

/// `∫ f(x) x^{-alpha} Λ(dx)`.
pub fn integrate_selfsimilar<F>(lambda: &SelfSimilarMeasure, alpha: f64, f: F, rel_tol: f64) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_selfsimilar_with(lambda, alpha, f, &IntegrateOptions::new(rel_tol))
}

pub fn integrate_selfsimilar_with<F>(lambda: &SelfSimilarMeasure, alpha: f64, f: F, opts: &IntegrateOptions) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    let g = |x: f64, v: &mut [f64]| v[0] = f(x);
    let r = integrate_selfsimilar_vec(lambda, alpha, 1, g, opts)?;
    Ok(IntegralResult {
        value: r.values[0],
        bands_used: r.bands_used,
        tail_estimate: r.tail_estimate[0],
        quadrature_converged: r.quadrature_converged,
    })
}

/// Band sums kept for extrapolation in each direction.
const WINDOW: usize = 7;

/// Wynn's epsilon algorithm on partial sums; returns the highest even column
/// that could be formed.
fn wynn(sums: &[f64]) -> f64 {
    let mut best = *sums.last().expect("nonempty");
    let mut prev = vec![0.0; sums.len() + 1];
    let mut cur = sums.to_vec();
    let mut col = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                return best;
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 {
            let v = *cur.last().expect("nonempty");
            if !v.is_finite() {
                return best;
            }
            best = v;
        }
    }
    best
}

/// Per-direction band accumulator. The remainder of each component is
/// extrapolated from the most recent band contributions while they decay.
struct Direction {
    name: &'static str,
    bands: Vec<Vec<f64>>,
    extrapolated: Vec<f64>,
    change: Vec<f64>,
    quiet: usize,
    done: bool,
}

impl Direction {
    fn new(name: &'static str, dim: usize) -> Self {
        Self { name, bands: Vec::new(), extrapolated: vec![0.0; dim], change: vec![0.0; dim], quiet: 0, done: false }
    }

    fn push(&mut self, b: Vec<f64>) {
        self.bands.push(b);
        let j = self.bands.len();
        let start = j.saturating_sub(WINDOW);
        let dim = self.extrapolated.len();
        for k in 0..dim {
            let head: f64 = self.bands[..start].iter().map(|b| b[k]).sum();
            let mut window = Vec::with_capacity(j - start);
            let mut acc = 0.0;
            for b in &self.bands[start..] {
                acc += b[k];
                window.push(acc);
            }
            let last = self.bands[j - 1][k];
            let decaying = j >= 2 && last.abs() < self.bands[j - 2][k].abs();
            let mut est = acc;
            if decaying && window.len() >= 3 {
                let w = wynn(&window);
                if (w - acc).abs() <= 1e4 * last.abs() {
                    est = w;
                }
            }
            let next = head + est;
            self.change[k] = next - self.extrapolated[k];
            self.extrapolated[k] = next;
        }
    }

    fn settled(&self, total: &[f64], rel_tol: f64) -> bool {
        self.change.iter().zip(total).all(|(d, t)| d.abs() <= rel_tol * t.abs() + FLOOR)
    }
}

/// Vector-valued `∫ f(x) x^{-alpha} Λ(dx)`; `f` writes `dim` components.
pub fn integrate_selfsimilar_vec<F>(
    lambda: &SelfSimilarMeasure,
    alpha: f64,
    dim: usize,
    f: F,
    opts: &IntegrateOptions,
) -> Result<VecIntegralResult>
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    if !alpha.is_finite() {
        return Err(Error::NonFinite("alpha"));
    }
    if !(opts.rel_tol > 0.0) {
        return Err(Error::InvalidSpec(format!("rel_tol must be positive, got {}", opts.rel_tol)));
    }
    let period = lambda.period();
    let rule = GaussRule::new(opts.gl_order);
    let runs = lambda.runs();
    let quad_tol = (opts.rel_tol * 0.1).max(1e-14);
    let mut converged = true;

    let mut band = |n: i64| -> Result<Vec<f64>> {
        let shift = n as f64 * period;
        let mut out = vec![0.0; dim];
        let mut buf = vec![0.0; dim];
        for &(y, w) in &lambda.atoms {
            let lx = y.ln() + shift;
            let x = lx.exp();
            f(x, &mut buf);
            let s = w * (-alpha * lx).exp();
            for k in 0..dim {
                out[k] += s * buf[k];
            }
        }
        for &(u0, u1, w) in &runs {
            let g = |u: f64, v: &mut [f64]| {
                let lx = u + shift;
                f(lx.exp(), v);
                let s = w * (-alpha * lx).exp();
                v.iter_mut().for_each(|x| *x *= s);
            };
            let r = adaptive(&rule, u0, u1, dim, &g, quad_tol, opts.max_depth);
            converged &= r.converged;
            for k in 0..dim {
                out[k] += r.value[k];
            }
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("band integral"));
        }
        Ok(out)
    };

    let center = band(0)?;
    let lo_req = (opts.span.0.min(1.0).ln() / period).floor() as i64;
    let hi_req = (opts.span.1.max(1.0).ln() / period).floor() as i64;
    let mut up = Direction::new("infinity", dim);
    let mut down = Direction::new("zero", dim);
    let (mut n_up, mut n_down) = (0i64, 0i64);
    let total = |up: &Direction, down: &Direction| -> Vec<f64> {
        (0..dim).map(|k| center[k] + up.extrapolated[k] + down.extrapolated[k]).collect()
    };

    while !(up.done && down.done) {
        for (dir, n, step) in [(&mut up, &mut n_up, 1i64), (&mut down, &mut n_down, -1i64)] {
            if !dir.done {
                *n += step;
                dir.push(band(*n)?);
            }
        }
        let t = total(&up, &down);
        for (dir, n, step, req) in [(&mut up, n_up, 1i64, hi_req), (&mut down, n_down, -1i64, lo_req)] {
            if dir.done {
                continue;
            }
            let beyond = if step > 0 { n > req } else { n < req };
            if !beyond {
                continue;
            }
            if dir.bands.len() >= 2 && dir.settled(&t, opts.rel_tol) {
                dir.quiet += 1;
            } else {
                dir.quiet = 0;
            }
            if dir.quiet >= 2 {
                dir.done = true;
            } else if (n - req).unsigned_abs() as usize >= MAX_EXTRA_BANDS {
                return Err(Error::BandSumDiverging { direction: dir.name, bands: MAX_EXTRA_BANDS });
            }
        }
    }

    let values = total(&up, &down);
    let tail_estimate = (0..dim).map(|k| up.change[k].abs() + down.change[k].abs()).collect();
    Ok(VecIntegralResult { values, bands_used: (n_down, n_up), tail_estimate, quadrature_converged: converged })
}

/// Quadrature against closed form for `∫ (e^{-ax} - e^{-x}) x^{-alpha-1} dx`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCheck {
    pub a: f64,
    pub alpha: f64,
    pub numeric: f64,
    pub closed_form: f64,
    pub rel_error: f64,
}

/// `Γ(-alpha)(a^alpha - 1)` for `alpha ≠ 0` and `-log a` for `alpha = 0`.
pub fn gamma_integral_closed_form(a: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        -a.ln()
    } else {
        gamma(-alpha) * (a.powf(alpha) - 1.0)
    }
}

pub fn gamma_integral_check(a: f64, alpha: f64, rel_tol: f64) -> Result<GammaCheck> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidSpec(format!("a = {a} not in (0, 1]")));
    }
    if !(alpha < 1.0) {
        return Err(Error::OutOfRangeAlpha { alpha, range: "(-inf, 1)" });
    }
    let lambda = SelfSimilarMeasure::log_uniform(0.5, 1.0)?;
    // dx/x carries the extra 1/x; e^{-ax} - e^{-x} = -e^{-ax} expm1(-(1-a)x) avoids cancellation
    let f = |x: f64| -(-a * x).exp() * (-(1.0 - a) * x).exp_m1();
    let numeric = integrate_selfsimilar(&lambda, alpha, f, rel_tol)?.value;
    let closed_form = gamma_integral_closed_form(a, alpha);
    let rel_error = if closed_form == 0.0 { numeric.abs() } else { ((numeric - closed_form) / closed_form).abs() };
    Ok(GammaCheck { a, alpha, numeric, closed_form, rel_error })
}

/// `∫ (1 - e^{-x}) x^{-alpha} Λ(dx)`.
pub fn qsd_mass(lambda: &SelfSimilarMeasure, alpha: f64, rel_tol: f64) -> Result<f64> {
    Ok(integrate_selfsimilar(lambda, alpha, |x| -(-x).exp_m1(), rel_tol)?.value)
}

/// `s Λ` with `s` chosen so that `∫ (1 - e^{-x}) x^{-alpha} s Λ(dx) = 1`.
pub fn normalize_for_qsd(lambda: &SelfSimilarMeasure, alpha: f64) -> Result<SelfSimilarMeasure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRangeAlpha { alpha, range: "(0, 1)" });
    }
    if lambda.is_zero() {
        return Err(Error::ZeroMass);
    }
    let mass = qsd_mass(lambda, alpha, 1e-13)?;
    lambda.scale(1.0 / mass)
}
