//! Composite Gauss–Legendre quadrature for vector-valued integrands.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;

/// Integrands with at least this many components evaluate nodes in parallel.
const PARALLEL_DIM: usize = 64;

/// Components smaller than this fraction of the largest one are resolved
/// only to that absolute level.
const SCALE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub(crate) struct GaussRule {
    pairs: Vec<(f64, f64)>,
}

impl GaussRule {
    pub(crate) fn new(order: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("positive order"));
        Self { pairs: rule.as_node_weight_pairs().to_vec() }
    }

    /// `∫_a^b f`, accumulating `dim` components in node order.
    pub(crate) fn apply<F>(&self, a: f64, b: f64, dim: usize, f: &F) -> Vec<f64>
    where
        F: Fn(f64, &mut [f64]) + Sync,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let eval = |&(x, w): &(f64, f64)| {
            let mut v = vec![0.0; dim];
            f(mid + half * x, &mut v);
            (w * half, v)
        };
        let values: Vec<(f64, Vec<f64>)> = if dim >= PARALLEL_DIM {
            self.pairs.par_iter().map(eval).collect()
        } else {
            self.pairs.iter().map(eval).collect()
        };
        let mut out = vec![0.0; dim];
        for (w, v) in values {
            for (o, x) in out.iter_mut().zip(v) {
                *o += w * x;
            }
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn apply_scalar<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        half * self.pairs.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Adaptive {
    pub(crate) value: Vec<f64>,
    pub(crate) converged: bool,

}

struct Panel {
    a: f64,
    b: f64,
    halves: [Vec<f64>; 2],
    value: Vec<f64>,
    err: Vec<f64>,
}

impl Panel {
    fn new<F>(rule: &GaussRule, a: f64, b: f64, whole: &[f64], dim: usize, f: &F) -> Self
    where
        F: Fn(f64, &mut [f64]) + Sync,
    {
        let mid = 0.5 * (a + b);
        let left = rule.apply(a, mid, dim, f);
        let right = rule.apply(mid, b, dim, f);
        let value: Vec<f64> = left.iter().zip(&right).map(|(l, r)| l + r).collect();
        let err = value.iter().zip(whole).map(|(v, w)| (v - w).abs()).collect();
        Self { a, b, halves: [left, right], value, err }
    }
}

/// Globally adaptive composite rule: the panel with the worst error relative
/// to the componentwise tolerance is bisected until the
/// summed error estimates meet it for every component, or until
/// `2^max_depth` panels exist.
pub(crate) fn adaptive<F>(rule: &GaussRule, a: f64, b: f64, dim: usize, f: &F, rel_tol: f64, max_depth: usize) -> Adaptive
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    let whole = rule.apply(a, b, dim, f);
    let mut panels = vec![Panel::new(rule, a, b, &whole, dim, f)];
    let max_panels = 1usize << max_depth.min(20);
    loop {
        let mut total = vec![0.0; dim];
        let mut err = vec![0.0; dim];
        for p in &panels {
            for k in 0..dim {
                total[k] += p.value[k];
                err[k] += p.err[k];
            }
        }
        let scale = total.iter().fold(0.0, |a: f64, t| a.max(t.abs()));
        let tol: Vec<f64> = total.iter().map(|t| rel_tol * (t.abs() + SCALE_FLOOR * scale) + 1e-300).collect();
        let ok = (0..dim).all(|k| err[k] <= tol[k]);
        if ok || panels.len() >= max_panels {
            return Adaptive { value: total, converged: ok };
        }
        let badness = |p: &Panel| (0..dim).map(|k| p.err[k] / tol[k]).fold(0.0, f64::max);
        let worst = (0..panels.len())
            .max_by(|&i, &j| badness(&panels[i]).total_cmp(&badness(&panels[j])))
            .expect("nonempty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        let [left, right] = p.halves;
        panels.push(Panel::new(rule, p.a, mid, &left, dim, f));
        panels.push(Panel::new(rule, mid, p.b, &right, dim, f));
    }
}

/// Scalar adaptive quadrature.
pub(crate) fn adaptive_scalar<F: Fn(f64) -> f64 + Sync>(rule: &GaussRule, a: f64, b: f64, f: F, rel_tol: f64, max_depth: usize) -> (f64, bool) {
    let g = |x: f64, v: &mut [f64]| v[0] = f(x);
    let r = adaptive(rule, a, b, 1, &g, rel_tol, max_depth);
    (r.value[0], r.converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let rule = GaussRule::new(32);
        let v = rule.apply_scalar(0.0, 2.0, |x| x.powi(63));
        assert!((v - 2f64.powi(64) / 64.0).abs() < 1e-12 * v);
    }

    #[test]
    fn adaptive_resolves_sharp_peak() {
        let rule = GaussRule::new(32);
        let s = 1e-3;
        let (v, ok) = adaptive_scalar(&rule, -1.0, 1.0, |x| (-(x - 0.3f64).powi(2) / (2.0 * s * s)).exp(), 1e-12, 20);
        assert!(ok);
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert!((v - exact).abs() < 1e-11 * exact);
    }
}
