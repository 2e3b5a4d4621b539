//! Conversion between finite measures `c μ` on `[0, 1)` and self-similar
//! measures, by pushing forward along `t ↦ m^{-t}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selfsimilar::SelfSimilarMeasure;

/// A finite measure on `[0, 1)`: atoms plus a density in equal-width cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitMeasure {
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pub density: Vec<f64>,
}

impl UnitMeasure {
    pub fn dirac(t: f64) -> Self {
        Self { atoms: vec![(t, 1.0)], density: Vec::new() }
    }

    pub fn uniform() -> Self {
        Self { atoms: Vec::new(), density: vec![1.0] }
    }

    pub fn mass(&self) -> f64 {
        let cells = if self.density.is_empty() { 0.0 } else { self.density.iter().sum::<f64>() / self.density.len() as f64 };
        self.atoms.iter().map(|a| a.1).sum::<f64>() + cells
    }
}

/// `Λ` whose fundamental block is the push-forward of `c μ` by `t ↦ m^{-t}`.
pub fn ks_convert(mu: &UnitMeasure, c: f64, m: f64) -> Result<SelfSimilarMeasure> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidSpec(format!("total mass c = {c} must be finite and >= 0")));
    }
    if let Some(&(t, _)) = mu.atoms.iter().find(|a| !(0.0..1.0).contains(&a.0)) {
        return Err(Error::InvalidSpec(format!("atom at t = {t} outside [0, 1)")));
    }
    let period = (1.0 / m).ln();
    let atoms = mu.atoms.iter().filter(|a| a.1 * c > 0.0).map(|&(t, w)| (m.powf(-t), c * w)).collect();
    // dt = du / log(1/m) for u = log y
    let density = mu.density.iter().map(|g| c * g / period).collect();
    SelfSimilarMeasure::new(m, 0.0, atoms, density)
}

/// Inverse of [`ks_convert`]: the total mass `c` and the normalised `μ`.
pub fn ks_invert(lambda: &SelfSimilarMeasure) -> Result<(UnitMeasure, f64)> {
    let c = lambda.band_mass();
    if c == 0.0 {
        return Err(Error::ZeroMass);
    }
    let period = lambda.period();
    let atoms = lambda.atom_list().iter().map(|&(y, w)| (y.ln() / period, w / c)).collect();
    let base = lambda.log_uniform_weight();
    let density = if lambda.density().is_empty() {
        if base > 0.0 {
            vec![base * period / c]
        } else {
            Vec::new()
        }
    } else {
        lambda.density().iter().map(|d| (d + base) * period / c).collect()
    };
    Ok((UnitMeasure { atoms, density }, c))
}
