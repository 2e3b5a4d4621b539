//! Truncated formal power series over `f64`.
//!
//! A [`TruncatedSeries`] of order `K` stores the coefficients `a_0..=a_K`
//! densely. Binary operations truncate to the smaller of the two orders.
//! Inner loops skip exact zeros, so sparse inputs such as `1 - z` or a
//! low-degree offspring polynomial cost `O(nnz * K)` rather than `O(K^2)`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

/// How [`TruncatedSeries::compose`] should treat its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composition {
    /// The outer series is an exact polynomial (no coefficients beyond its
    /// stored ones). The inner series may have any constant term.
    PolynomialOuter,
    /// Genuine formal composition; the inner constant term must be zero.
    Formal,
}

/// Elementary functions available through [`TruncatedSeries::elementary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Exp,
    Ln,
    Pow(f64),
}

impl TruncatedSeries {
    /// Builds a series of order `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSpec("a series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("series coefficients"));
        }
        Ok(Self { coeffs })
    }

    /// Pads with zeros or truncates `coeffs` to exactly `order + 1` entries.
    pub fn from_coeffs(coeffs: &[f64], order: usize) -> Result<Self> {
        let mut c = vec![0.0; order + 1];
        let n = coeffs.len().min(order + 1);
        c[..n].copy_from_slice(&coeffs[..n]);
        Self::new(c)
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![0.0; order + 1] }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(1.0, order)
    }

    /// The series `z`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = 1.0;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order + 1, 0.0);
        Self { coeffs: c }
    }

    /// Horner evaluation of the stored polynomial.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    /// Formal derivative; the result has order `K - 1` (order 0 stays 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
        Self { coeffs }
    }

    /// Index one past the last nonzero coefficient.
    fn effective_len(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1)
    }

    fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&k| self.coeffs[k] != 0.0).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|k| self.coeffs[k] + other.coeffs[k]).collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|k| self.coeffs[k] - other.coeffs[k]).collect();
        Self { coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        self.mul_to(other, order)
    }

    /// Cauchy product truncated to an explicit order.
    pub fn mul_to(&self, other: &Self, order: usize) -> Self {
        let mut out = vec![0.0; order + 1];
        // iterate over the sparser factor
        let (a, b) = if self.effective_len() <= other.effective_len() { (self, other) } else { (other, self) };
        let lb = b.effective_len();
        for i in a.support() {
            if i > order {
                break;
            }
            let ai = a.coeffs[i];
            let upto = lb.min(order + 1 - i);
            for (o, &bj) in out[i..i + upto].iter_mut().zip(&b.coeffs[..upto]) {
                *o += ai * bj;
            }
        }
        Self { coeffs: out }
    }

    /// Composition `outer(inner(z))` truncated to the inner order
    /// (formal mode: to the smaller of the two orders).
    pub fn compose(outer: &Self, inner: &Self, mode: Composition) -> Result<Self> {
        let order = match mode {
            Composition::PolynomialOuter => inner.order(),
            Composition::Formal => {
                if inner.coeffs[0] != 0.0 {
                    return Err(Error::FormalCompositionRequiresZeroConstant(inner.coeffs[0]));
                }
                outer.order().min(inner.order())
            }
        };
        let degree = match mode {
            Composition::PolynomialOuter => outer.effective_len().saturating_sub(1),
            // coefficients of outer beyond `order` cannot reach the result
            Composition::Formal => outer.effective_len().saturating_sub(1).min(order),
        };
        let mut acc = Self::constant(outer.coeff(degree), order);
        for j in (0..degree).rev() {
            acc = acc.mul_to(inner, order);
            acc.coeffs[0] += outer.coeffs[j];
        }
        Ok(acc)
    }

    pub fn elementary(&self, f: Elementary) -> Result<Self> {
        match f {
            Elementary::Exp => Ok(self.exp()),
            Elementary::Ln => self.ln(),
            Elementary::Pow(alpha) => self.powf(alpha),
        }
    }

    /// `exp(a)`, with the constant term factored out as `e^{a_0}`.
    pub fn exp(&self) -> Self {
        let n = self.coeffs.len();
        let a = &self.coeffs;
        let support: Vec<usize> = self.support().into_iter().filter(|&j| j > 0).collect();
        let mut b = vec![0.0; n];
        b[0] = 1.0;
        for k in 1..n {
            let mut s = 0.0;
            for &j in support.iter().take_while(|&&j| j <= k) {
                s += j as f64 * a[j] * b[k - j];
            }
            b[k] = s / k as f64;
        }
        let e0 = a[0].exp();
        for v in &mut b {
            *v *= e0;
        }
        Self { coeffs: b }
    }

    /// Natural logarithm of a series with positive constant term.
    pub fn ln(&self) -> Result<Self> {
        let a = &self.coeffs;
        let a0 = a[0];
        if a0 <= 0.0 {
            return Err(Error::NonPositiveConstantTerm { op: "ln", value: a0 });
        }
        let n = a.len();
        let support: Vec<usize> = self.support().into_iter().filter(|&j| j > 0).collect();
        let mut b = vec![0.0; n];
        b[0] = a0.ln();
        for k in 1..n {
            // k a_k = sum_{j=1}^{k} j b_j a_{k-j}  =>  solve for b_k
            let mut s = 0.0;
            for &i in support.iter().take_while(|&&i| i < k) {
                s += (k - i) as f64 * b[k - i] * a[i];
            }
            b[k] = (a[k] - s / k as f64) / a0;
        }
        Ok(Self { coeffs: b })
    }

    /// `a^alpha` for a series with positive constant term.
    pub fn powf(&self, alpha: f64) -> Result<Self> {
        let a = &self.coeffs;
        let a0 = a[0];
        if a0 <= 0.0 {
            return Err(Error::NonPositiveConstantTerm { op: "pow", value: a0 });
        }
        let n = a.len();
        let support: Vec<usize> = self.support().into_iter().filter(|&j| j > 0).collect();
        let mut b = vec![0.0; n];
        b[0] = a0.powf(alpha);
        for k in 1..n {
            let mut s = 0.0;
            for &j in support.iter().take_while(|&&j| j <= k) {
                s += ((alpha + 1.0) * j as f64 - k as f64) * a[j] * b[k - j];
            }
            b[k] = s / (k as f64 * a0);
        }
        Ok(Self { coeffs: b })
    }

    /// Integer power by repeated truncated multiplication.
    pub fn powi(&self, n: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::add(self, rhs)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::sub(self, rhs)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

impl Mul<f64> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: f64) -> TruncatedSeries {
        self.scale(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(-1.0)
    }
}
