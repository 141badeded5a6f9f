//! The polynomial solutions `p_n(z)`, `q_n(z)` of the Jacobi equation
//!
//! ```text
//! a_{n-1} u_{n-1} + b_n u_n + a_n u_{n+1} = z u_n,    n ≥ 1,
//! ```
//!
//! fixed by `p_0 = 1, p_1 = (z - b_0)/a_0` and `q_0 = 0, q_1 = 1/a_0`, their
//! Wronskians, and the scalar products `⟨p(z), p(0)⟩`, `⟨p(z), q(0)⟩`,
//! `⟨q(z), p(0)⟩`, `⟨q(z), q(0)⟩` entering the Nevanlinna formulas.
//!
//! All scalar products use `⟨u, v⟩ = Σ u_n conj(v_n)`. Since `p_n(0)` and
//! `q_n(0)` are real, the conjugation is trivial for the products above.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientModel, LcModel};
use crate::error::{Error, Result};
use crate::series::TailRule;

/// Values `p_0..=p_N`, `q_0..=q_N` at a point `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTable {
    pub z: Complex64,
    pub n: usize,
    pub p: Vec<Complex64>,
    pub q: Vec<Complex64>,
    /// Share of `Σ (|p_n|² + |q_n|²)` carried by the last `⌈N/10⌉` entries.
    pub tail_indicator: f64,
}

/// Runs the three-term recurrence forward from the two seeds.
pub(crate) fn forward<T>(model: &CoefficientModel, z: T, seed: [T; 2], n: usize) -> Result<Vec<T>>
where
    T: Copy
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Mul<f64, Output = T>
        + std::ops::Div<f64, Output = T>
        + std::ops::Sub<f64, Output = T>
        + IsFinite,
{
    let mut u = Vec::with_capacity(n + 1);
    u.push(seed[0]);
    u.push(seed[1]);
    let mut a_prev = model.a(0);
    for k in 1..n {
        let a_k = model.a(k);
        let next = ((z - model.b(k)) * u[k] - u[k - 1] * a_prev) / a_k;
        if !next.finite() {
            return Err(Error::Overflow { index: k + 1 });
        }
        u.push(next);
        a_prev = a_k;
    }
    u.truncate(n + 1);
    Ok(u)
}

pub(crate) trait IsFinite {
    fn finite(&self) -> bool;
}

impl IsFinite for f64 {
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl IsFinite for Complex64 {
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

/// `p_0..=p_n` and `q_0..=q_n` at `z`.
pub fn eval_pq(model: &CoefficientModel, z: Complex64, n: usize) -> Result<PolyTable> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("polynomial table length N = {n} must be ≥ 2")));
    }
    model.require(n)?;
    let a0 = model.a(0);
    let p = forward(model, z, [Complex64::new(1.0, 0.0), (z - model.b(0)) / a0], n)?;
    let q = forward(model, z, [Complex64::new(0.0, 0.0), Complex64::new(1.0 / a0, 0.0)], n)?;
    let weights: Vec<f64> = p.iter().zip(&q).map(|(x, y)| x.norm_sqr() + y.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    let last = n.div_ceil(10);
    let tail: f64 = weights[n + 1 - last..].iter().sum();
    Ok(PolyTable {
        z,
        n,
        p,
        q,
        tail_indicator: tail / total,
    })
}

/// Real-axis version of [`eval_pq`], returning `(p, q)`.
pub fn eval_pq_real(model: &CoefficientModel, x: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    model.require(n)?;
    let a0 = model.a(0);
    let p = forward(model, x, [1.0, (x - model.b(0)) / a0], n)?;
    let q = forward(model, x, [0.0, 1.0 / a0], n)?;
    Ok((p, q))
}

/// The Wronskian `a_n (u_n v_{n+1} - u_{n+1} v_n)`.
pub fn wronskian(model: &CoefficientModel, u: &[Complex64], v: &[Complex64], n: usize) -> Result<Complex64> {
    let len = u.len().min(v.len());
    if n + 1 >= len {
        return Err(Error::InvalidParameter(format!(
            "Wronskian at n = {n} needs entries up to {}, have {len}",
            n + 1
        )));
    }
    Ok((u[n] * v[n + 1] - u[n + 1] * v[n]) * model.a(n))
}

impl PolyTable {
    /// `max_{n<N} |a_n (p_n q_{n+1} - p_{n+1} q_n) - 1|`.
    pub fn wronskian_deviation(&self, model: &CoefficientModel) -> f64 {
        (0..self.n)
            .map(|n| {
                let w = (self.p[n] * self.q[n + 1] - self.p[n + 1] * self.q[n]) * model.a(n);
                (w - 1.0).norm()
            })
            .fold(0.0, f64::max)
    }

    /// The rescaled sequences `√a_n p_n`, `√a_n q_n`, which stay of order one
    /// in the limit-circle regime.
    pub fn scaled(&self, model: &CoefficientModel) -> (Vec<Complex64>, Vec<Complex64>) {
        let s: Vec<f64> = (0..=self.n).map(|n| model.a(n).sqrt()).collect();
        (
            self.p.iter().zip(&s).map(|(v, w)| v * w).collect(),
            self.q.iter().zip(&s).map(|(v, w)| v * w).collect(),
        )
    }

    /// CSV rows `n, Re p_n, Im p_n, Re q_n, Im q_n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "re_p", "im_p", "re_q", "im_q"])?;
        for (n, (p, q)) in self.p.iter().zip(&self.q).enumerate() {
            w.write_record([
                n.to_string(),
                fmt_f64(p.re),
                fmt_f64(p.im),
                fmt_f64(q.re),
                fmt_f64(q.im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

/// `⟨p(z), p(0)⟩`, `⟨p(z), q(0)⟩`, `⟨q(z), p(0)⟩`, `⟨q(z), q(0)⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerProducts {
    pub z: Complex64,
    pub pp0: Complex64,
    pub pq0: Complex64,
    pub qp0: Complex64,
    pub qq0: Complex64,
    pub n_used: usize,
    pub tail_estimate: f64,
}

impl InnerProducts {
    fn max_norm(&self) -> f64 {
        [self.pp0, self.pq0, self.qp0, self.qq0]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn max_diff(&self, other: &Self) -> f64 {
        [
            self.pp0 - other.pp0,
            self.pq0 - other.pq0,
            self.qp0 - other.qp0,
            self.qq0 - other.qq0,
        ]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
    }
}

/// Real-axis scalar products together with `‖p(λ)‖²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealInnerProducts {
    pub x: f64,
    pub pp0: f64,
    pub pq0: f64,
    pub qp0: f64,
    pub qq0: f64,
    /// `Σ p_n(x)²`.
    pub p_norm_sq: f64,
}

/// Fixed-truncation evaluator: caches `p(0)`, `q(0)` to index `2N` and the
/// tail rule, so that repeated evaluations cost one recurrence each.
#[derive(Clone, Debug)]
pub struct InnerProductEvaluator<'m> {
    model: &'m CoefficientModel,
    n: usize,
    p0: Vec<f64>,
    q0: Vec<f64>,
    rule: TailRule,
}

impl<'m> InnerProductEvaluator<'m> {
    /// Uses the terms `0..2N`; `N` is capped so that `a_{2N}` stays finite.
    pub fn new(model: &'m LcModel, n: usize) -> Result<Self> {
        Self::with_model(model.model(), n)
    }

    pub(crate) fn with_model(model: &'m CoefficientModel, n: usize) -> Result<Self> {
        let n = Self::cap(model, n);
        let (p0, q0) = eval_pq_real(model, 0.0, 2 * n)?;
        let rule = TailRule::new(model, n);
        Ok(Self { model, n, p0, q0, rule })
    }

    /// Largest usable `N ≤ requested`.
    pub fn cap(model: &CoefficientModel, requested: usize) -> usize {
        let extent = model.safe_extent().saturating_sub(2);
        let n = requested.min(extent / 2);
        n.max(2)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> &'m CoefficientModel {
        self.model
    }

    pub fn p0(&self) -> &[f64] {
        &self.p0
    }

    pub fn q0(&self) -> &[f64] {
        &self.q0
    }

    pub fn rule(&self) -> TailRule {
        self.rule
    }

    pub fn at(&self, z: Complex64) -> Result<InnerProducts> {
        let t = eval_pq(self.model, z, 2 * self.n)?;
        Ok(self.products_of(&t))
    }

    pub(crate) fn products_of(&self, t: &PolyTable) -> InnerProducts {
        let n = self.n;
        let mut acc = [Complex64::new(0.0, 0.0); 4];
        let mut half = acc;
        for k in 0..2 * n {
            if k == n {
                half = acc;
            }
            acc[0] += t.p[k] * self.p0[k];
            acc[1] += t.p[k] * self.q0[k];
            acc[2] += t.q[k] * self.p0[k];
            acc[3] += t.q[k] * self.q0[k];
        }
        let mut out = [Complex64::new(0.0, 0.0); 4];
        let mut tail = 0.0f64;
        for i in 0..4 {
            let (v, c) = self.rule.extrapolate(half[i], acc[i]);
            out[i] = v;
            tail = tail.max(c.norm());
        }
        InnerProducts {
            z: t.z,
            pp0: out[0],
            pq0: out[1],
            qp0: out[2],
            qq0: out[3],
            n_used: 2 * n,
            tail_estimate: tail,
        }
    }

    pub fn at_real(&self, x: f64) -> Result<RealInnerProducts> {
        let n = self.n;
        let (p, q) = eval_pq_real(self.model, x, 2 * n)?;
        let mut acc = [0.0f64; 5];
        let mut half = acc;
        for k in 0..2 * n {
            if k == n {
                half = acc;
            }
            acc[0] += p[k] * self.p0[k];
            acc[1] += p[k] * self.q0[k];
            acc[2] += q[k] * self.p0[k];
            acc[3] += q[k] * self.q0[k];
            acc[4] += p[k] * p[k];
        }
        let v: Vec<f64> = (0..5).map(|i| self.rule.extrapolate(half[i], acc[i]).0).collect();
        Ok(RealInnerProducts {
            x,
            pp0: v[0],
            pq0: v[1],
            qp0: v[2],
            qq0: v[3],
            p_norm_sq: v[4],
        })
    }
}

/// Default truncation cap for [`inner_products`].
pub const DEFAULT_N_MAX: usize = 1 << 18;

/// Scalar products with adaptive truncation.
///
/// `N` is doubled from 256 until two successive tail-extrapolated estimates
/// agree to `tol` relative to the largest entry, or until `2N` would exceed
/// `n_max` (or the overflow-safe range of the model). In the latter case the
/// result is still accepted if the extrapolation correction itself is
/// below `tol`, which is the case for rapidly growing `a_n`.
pub fn inner_products(model: &LcModel, z: Complex64, tol: f64, n_max: usize) -> Result<InnerProducts> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let cap = InnerProductEvaluator::cap(model, n_max / 2);
    let mut n = 256.min(cap);
    let mut previous: Option<InnerProducts> = None;
    loop {
        let current = InnerProductEvaluator::new(model, n)?.at(z)?;
        let scale = current.max_norm().max(f64::MIN_POSITIVE);
        let change = match &previous {
            Some(prev) => current.max_diff(prev),
            None => current.tail_estimate,
        };
        let result = InnerProducts {
            tail_estimate: change,
            ..current
        };
        if change <= tol * scale {
            return Ok(result);
        }
        if 2 * n > cap {
            return Err(Error::TruncationNotConverged {
                n_max: result.n_used,
                tail: change / scale,
                partial: Box::new(result),
            });
        }
        previous = Some(current);
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model_a() -> CoefficientModel {
        CoefficientModel::power(2.0, 1).unwrap()
    }

    #[test]
    fn unrolled_recurrence_at_zero() {
        // At z = 0 the recurrence reads u_{n+1} = -a_{n-1} u_{n-1} / a_n:
        // p_2 = -1/4, p_4 = -9 p_2 / 16 = 9/64, q_3 = -4/9, q_5 = -16 q_3 / 25.
        let t = eval_pq(&model_a(), c(0.0, 0.0), 5).unwrap();
        let p: Vec<f64> = t.p.iter().map(|v| v.re).collect();
        let q: Vec<f64> = t.q.iter().map(|v| v.re).collect();
        let expect_p = [1.0, 0.0, -0.25, 0.0, 9.0 / 64.0, 0.0];
        let expect_q = [0.0, 1.0, 0.0, -4.0 / 9.0, 0.0, 64.0 / 225.0];
        for k in 0..6 {
            assert_relative_eq!(p[k], expect_p[k], epsilon = 1e-15);
            assert_relative_eq!(q[k], expect_q[k], epsilon = 1e-15);
        }
    }

    #[test]
    fn seeds() {
        let m = model_a().with_diagonal(crate::coefficients::Diagonal::ConstantBeta(0.5)).unwrap();
        let z = c(1.3, -0.4);
        let t = eval_pq(&m, z, 4).unwrap();
        assert_eq!(t.p[0], c(1.0, 0.0));
        assert_eq!(t.q[0], c(0.0, 0.0));
        assert_eq!(t.p[1], (z - m.b(0)) / m.a(0));
        assert_eq!(t.q[1], c(1.0 / m.a(0), 0.0));
        let t1 = eval_pq(&model_a(), c(1.0, 0.0), 2).unwrap();
        assert_eq!(t1.p[1], c(1.0, 0.0));
    }

    #[test]
    fn real_point_gives_real_table() {
        let t = eval_pq(&model_a(), c(2.5, 0.0), 300).unwrap();
        assert!(t.p.iter().chain(&t.q).all(|v| v.im == 0.0));
    }

    #[test]
    fn wronskian_values() {
        let m = model_a();
        let t = eval_pq(&m, c(0.3, 0.7), 50).unwrap();
        for n in [0, 7, 49] {
            assert_relative_eq!(wronskian(&m, &t.p, &t.q, n).unwrap().re, 1.0, epsilon = 1e-12);
            assert_eq!(wronskian(&m, &t.p, &t.p, n).unwrap(), c(0.0, 0.0));
        }
        let real = eval_pq(&m, c(1.5, 0.0), 20).unwrap();
        let conj = eval_pq(&m, c(1.5, -0.0), 20).unwrap();
        assert_eq!(wronskian(&m, &real.p, &conj.p, 5).unwrap().norm(), 0.0);
        assert!(wronskian(&m, &t.p, &t.q, 50).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        // Limit-point growth on a bounded Jacobi matrix far outside its spectrum.
        let m = CoefficientModel::tabulated(vec![1.0; 2000]).unwrap();
        match eval_pq(&m, c(1e6, 0.0), 1999) {
            Err(Error::Overflow { index }) => assert!(index > 2 && index < 1999),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tail_indicator_decays() {
        let m = model_a();
        let small = eval_pq(&m, c(0.0, 1.0), 100).unwrap().tail_indicator;
        let large = eval_pq(&m, c(0.0, 1.0), 10_000).unwrap().tail_indicator;
        assert!(large < small / 10.0, "{small} {large}");
    }

    #[test]
    fn inner_products_zero_point() {
        let lc = LcModel::new(model_a()).unwrap();
        let ip = inner_products(&lc, c(0.0, 0.0), 1e-10, DEFAULT_N_MAX).unwrap();
        assert!(ip.pp0.re >= 1.0 && ip.pp0.im == 0.0);
        assert!(ip.qq0.re > 0.0 && ip.qq0.im == 0.0);
        // p_n(0) q_n(0) vanishes termwise for b = 0 (opposite parities).
        assert!(ip.pq0.norm() < 1e-14);
    }

    #[test]
    fn inner_products_brute_force_oracle() {
        // Oracle: plain summation of 10^4 terms; differs from the
        // extrapolated value by the O(1/N) tail only.
        let lc = LcModel::new(model_a()).unwrap();
        let z = c(0.5, 1.0);
        let ip = inner_products(&lc, z, 1e-10, DEFAULT_N_MAX).unwrap();
        let n = 10_000;
        let t = eval_pq(&lc, z, n).unwrap();
        let t0 = eval_pq(&lc, c(0.0, 0.0), n).unwrap();
        let brute: Complex64 = (0..n).map(|k| t.p[k] * t0.p[k].conj()).sum();
        let tail = lc.carleman_tail(n);
        assert!((brute - ip.pp0).norm() < 10.0 * tail, "{brute} {}", ip.pp0);
        assert!((brute - ip.pp0).norm() > 1e-3 * tail);
    }

    #[test]
    fn inner_products_conjugation() {
        let lc = LcModel::new(model_a()).unwrap();
        let up = inner_products(&lc, c(0.0, 1.0), 1e-10, DEFAULT_N_MAX).unwrap();
        let down = inner_products(&lc, c(0.0, -1.0), 1e-10, DEFAULT_N_MAX).unwrap();
        for (x, y) in [(up.pp0, down.pp0), (up.pq0, down.pq0), (up.qp0, down.qp0), (up.qq0, down.qq0)] {
            assert!((x - y.conj()).norm() < 1e-14 * x.norm().max(1.0));
        }
    }

    #[test]
    fn truncation_not_converged() {
        let lc = LcModel::new(model_a()).unwrap();
        match inner_products(&lc, c(0.0, 1.0), 1e-14, 1024) {
            Err(Error::TruncationNotConverged { partial, .. }) => assert!(partial.pp0.norm() > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_export() {
        let t = eval_pq(&model_a(), c(0.0, 1.0), 3).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("n,re_p,im_p,re_q,im_q"));
    }
}
