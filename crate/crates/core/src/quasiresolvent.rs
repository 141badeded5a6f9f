//! The quasiresolvent
//!
//! ```text
//! (𝓡(z)h)_n = q_n(z) Σ_{m≤n} p_m(z) h_m + p_n(z) Σ_{m>n} q_m(z) h_m
//! ```
//!
//! a Hilbert–Schmidt operator with `(J_max - z) 𝓡(z) = I` for every complex
//! `z`. Application is `O(N)` through prefix sums `x_n` and suffix sums `y_n`;
//! the dense kernel is built only on request.

use num_complex::Complex64;
use serde::Serialize;

use crate::coefficients::{CoefficientModel, LcModel};
use crate::error::{Error, Result};
use crate::polynomials::{eval_pq, PolyTable};
use crate::series::{sum_with_tail, Support};

/// `𝓡(z)` truncated to indices `0..N`.
#[derive(Clone, Debug)]
pub struct QuasiResolvent<'m> {
    model: &'m CoefficientModel,
    z: Complex64,
    n: usize,
    p: Vec<Complex64>,
    q: Vec<Complex64>,
}

/// `((𝒥 - z) u)_n` for `n = 0..len-1`; the last entry of `u` only feeds
/// the row above it.
pub fn jacobi_minus_z(model: &CoefficientModel, u: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let len = u.len();
    if len < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(len - 1);
    out.push((model.b(0) - z) * u[0] + u[1] * model.a(0));
    let mut a_prev = model.a(0);
    for n in 1..len - 1 {
        let a_n = model.a(n);
        out.push(u[n - 1] * a_prev + (model.b(n) - z) * u[n] + u[n + 1] * a_n);
        a_prev = a_n;
    }
    out
}

impl<'m> QuasiResolvent<'m> {
    pub fn new(model: &'m LcModel, z: Complex64, n: usize) -> Result<Self> {
        let table = eval_pq(model, z, n.max(2))?;
        Ok(Self::from_table(model.model(), &table, n))
    }

    /// Builds from an existing table; uses its first `n` entries.
    pub fn from_table(model: &'m CoefficientModel, table: &PolyTable, n: usize) -> Self {
        let n = n.min(table.p.len());
        Self {
            model,
            z: table.z,
            n,
            p: table.p[..n].to_vec(),
            q: table.q[..n].to_vec(),
        }
    }

    /// The operator obtained by replacing `q` with `q + c p`, which equals
    /// `𝓡(z) + c ⟨·, p(z̄)⟩ p(z)`.
    pub fn with_tilt(&self, c: Complex64) -> Self {
        let q = self.q.iter().zip(&self.p).map(|(q, p)| q + c * p).collect();
        Self { q, ..self.clone() }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &[Complex64] {
        &self.p
    }

    pub fn q(&self) -> &[Complex64] {
        &self.q
    }

    /// Kernel entry `K_{nm}`.
    pub fn kernel(&self, n: usize, m: usize) -> Complex64 {
        if m <= n {
            self.q[n] * self.p[m]
        } else {
            self.p[n] * self.q[m]
        }
    }

    /// Dense `N × N` kernel, row-major.
    pub fn dense_kernel(&self) -> Vec<Complex64> {
        let n = self.n;
        (0..n * n).map(|k| self.kernel(k / n, k % n)).collect()
    }

    /// `𝓡(z) h` on indices `0..N`.
    ///
    /// With [`Support::Finite`] the suffix sums are exact. With
    /// [`Support::SquareSummable`] the total `Σ q_m h_m` is tail-extrapolated
    /// from the stored entries of `h`, which is then expected to be a
    /// truncation of an ℓ² vector with solution-like decay.
    pub fn apply(&self, h: &[Complex64], support: Support) -> Result<Vec<Complex64>> {
        if h.len() > self.n {
            return Err(Error::VectorTooLong {
                len: h.len(),
                max: self.n,
            });
        }
        let qh: Vec<Complex64> = h.iter().zip(&self.q).map(|(h, q)| q * h).collect();
        let (total, _) = sum_with_tail(self.model, &qh, support);
        let mut out = Vec::with_capacity(self.n);
        let mut x = Complex64::new(0.0, 0.0);
        let mut consumed = Complex64::new(0.0, 0.0);
        for k in 0..self.n {
            if k < h.len() {
                x += self.p[k] * h[k];
                consumed += qh[k];
            }
            let y = total - consumed;
            out.push(self.q[k] * x + self.p[k] * y);
        }
        Ok(out)
    }

    /// `max |((𝒥 - z) 𝓡(z) h)_n - h_n|` over `n < N - 1 - ⌈N/10⌉`.
    pub fn residual(&self, h: &[Complex64]) -> Result<f64> {
        let u = self.apply(h, Support::Finite)?;
        let image = jacobi_minus_z(self.model, &u, self.z);
        let upto = (self.n - 1).saturating_sub(self.n.div_ceil(10));
        Ok((0..upto)
            .map(|k| (image[k] - h.get(k).copied().unwrap_or_default()).norm())
            .fold(0.0, f64::max))
    }

    /// Like [`residual`](Self::residual), but each component is divided by
    /// the size of the terms entering row `n`,
    /// `|h_n| + a_{n-1}|u_{n-1}| + |b_n - z||u_n| + a_n|u_{n+1}|` with
    /// `u = 𝓡(z) h`. Meaningful when `a_n |u_n|` grows along the table.
    pub fn scaled_residual(&self, h: &[Complex64]) -> Result<f64> {
        let u = self.apply(h, Support::Finite)?;
        let image = jacobi_minus_z(self.model, &u, self.z);
        let upto = (self.n - 1).saturating_sub(self.n.div_ceil(10));
        let model = self.model;
        Ok((0..upto)
            .map(|k| {
                let hk = h.get(k).copied().unwrap_or_default();
                let mut scale = hk.norm() + (model.b(k) - self.z).norm() * u[k].norm() + model.a(k) * u[k + 1].norm();
                if k > 0 {
                    scale += model.a(k - 1) * u[k - 1].norm();
                }
                if scale > 0.0 {
                    (image[k] - hk).norm() / scale
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max))
    }

    /// Frobenius norm of the truncated kernel, in `O(N)`.
    pub fn hs_norm(&self) -> f64 {
        let n = self.n;
        let mut suffix = vec![0.0; n + 1];
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] + self.q[k].norm_sqr();
        }
        let mut prefix = 0.0;
        let mut total = 0.0;
        for k in 0..n {
            prefix += self.p[k].norm_sqr();
            total += self.q[k].norm_sqr() * prefix + self.p[k].norm_sqr() * suffix[k + 1];
        }
        total.sqrt()
    }

    /// Frobenius norms at `N/2` and `N`, flagging growth beyond `tol`
    /// relative to what the Carleman tail allows.
    pub fn hs_report(&self, tol: f64) -> HsReport {
        let half = Self {
            n: self.n / 2,
            p: self.p[..self.n / 2].to_vec(),
            q: self.q[..self.n / 2].to_vec(),
            ..self.clone()
        };
        let full = self.hs_norm();
        let coarse = half.hs_norm();
        let growth = if full > 0.0 { (full - coarse) / full } else { 0.0 };
        let allowance = tol + self.model.carleman_tail(self.n / 2);
        HsReport {
            value: full,
            half_value: coarse,
            relative_growth: growth,
            non_cauchy: growth > allowance,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HsReport {
    pub value: f64,
    pub half_value: f64,
    pub relative_growth: f64,
    /// Suspicious growth, as for a limit-point model.
    pub non_cauchy: bool,
}

/// The coefficient `Γ` in `u = Γ p(z) + 𝓡(z) h`, `h = (𝒥 - z) u`:
/// `Γ = u_0 - ⟨h, q(z̄)⟩`.
pub fn gamma_coefficient(model: &CoefficientModel, u: &[Complex64], z: Complex64, support: Support) -> Result<Complex64> {
    if u.len() < 3 {
        return Err(Error::InvalidParameter("vector needs at least three entries".into()));
    }
    let h = jacobi_minus_z(model, u, z);
    let table = eval_pq(model, z, h.len())?;
    // conj(q_n(z̄)) = q_n(z).
    let terms: Vec<Complex64> = h.iter().zip(&table.q).map(|(h, q)| h * q).collect();
    let (pairing, _) = sum_with_tail(model, &terms, support);
    Ok(u[0] - pairing)
}

/// Componentwise residuals of the decompositions of `p(z)` and `q(z)` at the
/// anchor point 0:
///
/// ```text
/// p(z) - (1 - z⟨p(z), q(0)⟩) p(0) - z 𝓡(0) p(z)
/// q(z) + z⟨q(z), q(0)⟩ p(0) - q(0) - z 𝓡(0) q(z)
/// ```
///
/// on indices `0..N/2`, using tables of length `2N` for the ℓ² sums.
pub fn lemma_residuals(model: &LcModel, z: Complex64, n: usize) -> Result<(f64, f64)> {
    let len = 2 * n;
    let at_z = eval_pq(model, z, len)?;
    let at_0 = eval_pq(model, Complex64::new(0.0, 0.0), len)?;
    let r0 = QuasiResolvent::from_table(model, &at_0, len);
    let pz = &at_z.p[..len];
    let qz = &at_z.q[..len];
    let rp = r0.apply(pz, Support::SquareSummable)?;
    let rq = r0.apply(qz, Support::SquareSummable)?;
    // (𝓡(0)h)_0 = ⟨h, q(0)⟩ for any h.
    let pq0 = rp[0];
    let qq0 = rq[0];
    let upto = n / 2;
    let res_p = (0..upto)
        .map(|k| (pz[k] - (1.0 - z * pq0) * at_0.p[k] - z * rp[k]).norm())
        .fold(0.0, f64::max);
    let res_q = (0..upto)
        .map(|k| (qz[k] + z * qq0 * at_0.p[k] - at_0.q[k] - z * rq[k]).norm())
        .fold(0.0, f64::max);
    Ok((res_p, res_q))
}
