//! Tail extrapolation for slowly converging ℓ² sums.
//!
//! In the limit-circle regime every solution of the Jacobi equation decays
//! like `a_n^{-1/2}`, so the tail of a sum such as `Σ p_n(z) p_n(0)` after
//! index `N` is, to leading order, proportional to the Carleman tail
//! `R(N) = Σ_{m ≥ N} 1/a_m`. With partial sums `S(N) = Σ_{m<N}` and
//! `S(2N)`, the unknown constant cancels:
//!
//! ```text
//! S(∞) ≈ S(2N) + κ (S(2N) - S(N)),    κ = R(2N) / (R(N) - R(2N))
//! ```
//!
//! and `κ = ρ/(1-ρ)` where `ρ` is the ratio of consecutive dyadic blocks of
//! `1/a_m`. For `a_n = (n+1)^2` this turns an `O(1/N)` truncation error into
//! `O(1/N²)`.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientModel;

/// How a vector beyond its stored length should be treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    /// Exactly zero past the stored entries.
    Finite,
    /// Truncation of an ℓ² vector whose tail decays like the solutions.
    SquareSummable,
}

/// Smallest length for which tail extrapolation is attempted.
pub const MIN_EXTRAPOLATION_LEN: usize = 64;

/// Extrapolation weight for partial sums at `N` and `2N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailRule {
    pub n: usize,
    pub kappa: f64,
}

impl TailRule {
    pub fn new(model: &CoefficientModel, n: usize) -> Self {
        let n = n.max(2);
        let extent = model.safe_extent();
        let rho = if 4 * n <= extent {
            let b1 = model.carleman_block(n);
            let b2 = model.carleman_block(2 * n);
            b2 / b1
        } else if 2 * n <= extent {
            let b0 = model.carleman_block(n / 2);
            let b1 = model.carleman_block(n);
            b1 / b0
        } else {
            0.0
        };
        let kappa = if rho.is_finite() && rho > 0.0 && rho < 1.0 { rho / (1.0 - rho) } else { 0.0 };
        Self { n, kappa }
    }

    /// `S(2N) + κ (S(2N) - S(N))`, with the size of the correction.
    pub fn extrapolate<T>(&self, s_n: T, s_2n: T) -> (T, T)
    where
        T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    {
        let correction = (s_2n - s_n) * self.kappa;
        (s_2n + correction, correction)
    }
}

/// Sum of `terms`, extrapolated past the end for square-summable input.
///
/// Returns the value and the magnitude of the tail correction applied.
pub fn sum_with_tail<T>(model: &CoefficientModel, terms: &[T], support: Support) -> (T, f64)
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> + Magnitude,
{
    let total = || terms.iter().fold(T::default(), |acc, &t| acc + t);
    if support == Support::Finite || terms.len() < MIN_EXTRAPOLATION_LEN {
        return (total(), 0.0);
    }
    let n = terms.len() / 2;
    let s_n = terms[..n].iter().fold(T::default(), |acc, &t| acc + t);
    let s_2n = terms[n..2 * n].iter().fold(s_n, |acc, &t| acc + t);
    let (value, corr) = TailRule::new(model, n).extrapolate(s_n, s_2n);
    (value, corr.magnitude())
}

/// Limit of a sequence whose distance to the limit behaves like the Carleman
/// tail, from its values at `N` and `2N` (`N = (len-1)/2`).
pub fn limit_with_tail<T>(model: &CoefficientModel, seq: &[T]) -> (T, f64)
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> + Magnitude,
{
    assert!(!seq.is_empty(), "empty sequence");
    if seq.len() < MIN_EXTRAPOLATION_LEN {
        return (seq[seq.len() - 1], 0.0);
    }
    let n = (seq.len() - 1) / 2;
    let (value, corr) = TailRule::new(model, n).extrapolate(seq[n], seq[2 * n]);
    (value, corr.magnitude())
}

pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for num_complex::Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basel_tail() {
        // Σ_{n≥0} 1/(n+1)^2 = π²/6, read off from 4096 terms.
        let model = CoefficientModel::power(2.0, 1).unwrap();
        let terms: Vec<f64> = (0..4096).map(|n| 1.0 / model.a(n)).collect();
        let (value, corr) = sum_with_tail(&model, &terms, Support::SquareSummable);
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        let raw: f64 = terms.iter().sum();
        assert!((raw - exact).abs() > 1e-4);
        assert!((value - exact).abs() < 1e-7, "{value} vs {exact}");
        assert!(corr > 1e-4);
    }

    #[test]
    fn finite_support_is_exact() {
        let model = CoefficientModel::power(2.0, 1).unwrap();
        let mut terms = vec![0.0; 200];
        terms[150] = 1.0;
        assert_eq!(sum_with_tail(&model, &terms, Support::Finite), (1.0, 0.0));
    }

    #[test]
    fn geometric_model_needs_no_correction() {
        let model = CoefficientModel::geometric(2.0).unwrap();
        let rule = TailRule::new(&model, 128);
        assert!(rule.kappa < 1e-30);
    }
}
