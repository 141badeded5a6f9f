//! Jost solutions and boundary values at infinity.
//!
//! Under the limit-circle hypotheses the equation `𝒥u = zu` has solutions
//! `f±_n(z) ≈ a_n^{-1/2} e^{±iφ_n}` with `{f⁺, f⁻} = -2i α∞⁻¹ √(1-β∞²)`.
//! Writing `p = σ₊f⁺ + σ₋f⁻` and `q = τ₊f⁺ + τ₋f⁻`, every `u` in the maximal
//! domain behaves like `a_n^{-1/2}(s₊ e^{iφ_n} + s₋ e^{-iφ_n})`, and the
//! conditions `s₊ = ω s₋`, `|ω| = 1`, single out the self-adjoint
//! extensions `J_ω`.
//!
//! The coefficients are computed from Wronskians with the defining
//! decomposition, `σ₊ = {p, f⁻}/{f⁺, f⁻}` and `σ₋ = {p, f⁺}/{f⁻, f⁺}`. The
//! Wronskian of the polynomials then gives
//! `-2i α∞⁻¹ √(1-β∞²) (σ₊τ₋ - σ₋τ₊) = 1`.
//!
//! # Numerics
//!
//! `f±` are obtained by running the recurrence backwards from the
//! asymptotic form at `N` and `N+1`. The seed error is first order in
//! `δ(N) = Σ_{m≥N}(|k_m - 1| + |β_{m+1} - β_m|) + |z| Σ_{m≥N} 1/a_m`; two
//! seeds at `N` and `2N` are combined to cancel it. Any linear combination
//! of solutions is a solution, so the result is exact up to rounding apart
//! from the remaining `O(δ²)` seed error.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{AsymptoticLimits, CoefficientModel, LcModel};
use crate::error::{Error, Result};
use crate::extensions::{gamma_from_products, ExtensionParamT, SpectralConfig};
use crate::polynomials::{eval_pq, eval_pq_real, fmt_f64, inner_products, InnerProducts, PolyTable, DEFAULT_N_MAX};
use crate::roots::{self, ScanParams};
use crate::series::{limit_with_tail, sum_with_tail, Support, TailRule, MIN_EXTRAPOLATION_LEN};

/// Numerics for the Jost solutions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JostConfig {
    /// Seed index; chosen from the coefficient tails if `None`.
    pub n_start: Option<usize>,
    /// Target relative deviation of `{f⁺, f⁻}` from its closed form.
    pub tol: f64,
    /// Number of seed doublings allowed on quality failure.
    pub max_retries: u32,
    /// Largest seed index.
    pub n_cap: usize,
}

impl Default for JostConfig {
    fn default() -> Self {
        Self {
            n_start: None,
            tol: 1e-8,
            max_retries: 4,
            n_cap: 1 << 18,
        }
    }
}

impl JostConfig {
    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }
}

/// Coefficient arrays for repeated backward sweeps from one seed index.
struct Sweeper<'m> {
    model: &'m CoefficientModel,
    n0: usize,
    a: Vec<f64>,
    inv_a: Vec<f64>,
    b: Vec<f64>,
    /// Regularity and Carleman tails at `n0` and `2 n0`.
    tails: [(f64, f64); 2],
}

impl<'m> Sweeper<'m> {
    fn new(model: &'m CoefficientModel, n0: usize) -> Result<Self> {
        let len = 2 * n0 + 2;
        model.require(len - 1)?;
        let tail = |n: usize| (model.regularity_tail(n), model.carleman_tail(n));
        let a: Vec<f64> = (0..len).map(|n| model.a(n)).collect();
        Ok(Self {
            model,
            n0,
            inv_a: a.iter().map(|a| 1.0 / a).collect(),
            a,
            b: (0..len).map(|n| model.b(n)).collect(),
            tails: [tail(n0), tail(2 * n0)],
        })
    }

    /// Solution seeded with `a_n^{-1/2} e^{±iφ_n}` at `seed`, `seed + 1`, on
    /// indices `0..keep`.
    fn sweep(&self, z: Complex64, seed: usize, sign: f64, keep: usize) -> Result<Vec<Complex64>> {
        let (phi0, phi1) = self.model.phi_pair(seed);
        let mut hi = Complex64::from_polar(self.a[seed + 1].powf(-0.5), sign * phi1);
        let mut lo = Complex64::from_polar(self.a[seed].powf(-0.5), sign * phi0);
        let keep = keep.min(seed + 2);
        let mut u = vec![Complex64::new(0.0, 0.0); keep];
        let mut store = |n: usize, v: Complex64| {
            if n < keep {
                u[n] = v;
            }
        };
        store(seed + 1, hi);
        store(seed, lo);
        // Only indices below `keep` are stored; the rest are rolled.
        for n in (1..=seed).rev() {
            let next = ((z - self.b[n]) * lo - hi * self.a[n]) * self.inv_a[n - 1];
            hi = lo;
            lo = next;
            store(n - 1, lo);
        }
        if !(lo.re.is_finite() && lo.im.is_finite() && hi.re.is_finite() && hi.im.is_finite()) {
            let bad = u.iter().rposition(|v| !(v.re.is_finite() && v.im.is_finite())).unwrap_or(seed);
            return Err(Error::Overflow { index: bad });
        }
        Ok(u)
    }

    fn solve(&self, z: Complex64, sign: f64) -> Result<Vec<Complex64>> {
        let n0 = self.n0;
        let coarse = self.sweep(z, n0, sign, n0 + 2)?;
        let fine = self.sweep(z, 2 * n0, sign, n0 + 2)?;
        let delta = |(reg, carl): (f64, f64)| reg + z.norm() * carl;
        let r = delta(self.tails[0]) / delta(self.tails[1]);
        if !(r.is_finite() && r > 1.0) {
            return Ok(fine);
        }
        let w = 1.0 / (r - 1.0);
        Ok(fine.iter().zip(&coarse).map(|(f, c)| f + (f - c) * w).collect())
    }
}

/// `δ(N)`, the first-order size of the seed error at `N`.
fn seed_error(model: &CoefficientModel, z: Complex64, n: usize) -> f64 {
    model.regularity_tail(n) + z.norm() * model.carleman_tail(n)
}

/// Largest seed index usable with the model's coefficient range.
fn seed_cap(model: &CoefficientModel, cap: usize) -> usize {
    let extent = model.safe_extent();
    let by_extent = extent.saturating_sub(3) / 2;
    cap.min(by_extent)
}

/// Smallest power of two `N ≥ 64` with `δ(N)² ≤ tol`, within the cap.
fn initial_seed(model: &CoefficientModel, z: Complex64, tol: f64, cap: usize) -> usize {
    let mut n = 64usize.min(cap);
    while 2 * n <= cap && seed_error(model, z, n).powi(2) > tol {
        n *= 2;
    }
    n
}

/// `{u, v} = a_n (u_n v_{n+1} - u_{n+1} v_n)` at index `n`.
fn wronskian_at(a_n: f64, u: &[Complex64], v: &[Complex64], n: usize) -> Complex64 {
    (u[n] * v[n + 1] - u[n + 1] * v[n]) * a_n
}

/// Mean of `{u, v}` over the band and the largest relative departure.
fn band_wronskian(model: &CoefficientModel, u: &[Complex64], v: &[Complex64], band: (usize, usize)) -> (Complex64, f64) {
    let values: Vec<Complex64> = (band.0..=band.1).map(|n| wronskian_at(model.a(n), u, v, n)).collect();
    let mean = values.iter().sum::<Complex64>() / values.len() as f64;
    let spread = values.iter().map(|w| (w - mean).norm()).fold(0.0, f64::max);
    (mean, if mean.norm() > 0.0 { spread / mean.norm() } else { spread })
}

/// Interior band `[N/4, N/2]` for seed index `N`.
pub fn interior_band(n_start: usize) -> (usize, usize) {
    ((n_start / 4).max(1), (n_start / 2).max(2))
}

/// The Jost solutions at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JostData {
    pub z: Complex64,
    pub n_start: usize,
    /// `f⁺_n`, `n = 0..=n_start+1`.
    pub f_plus: Vec<Complex64>,
    pub f_minus: Vec<Complex64>,
    /// `{f⁺, f⁻}` averaged over the interior band.
    pub wronskian: Complex64,
    /// Closed form `-2i α∞⁻¹ √(1-β∞²)`.
    pub target: Complex64,
    /// Largest `|{f⁺, f⁻}_n - target| / |target|` over the band.
    pub wronskian_deviation: f64,
    pub retries: u32,
    /// Indices below `n_start` skipped in `φ` because `|β_m| > 1`.
    pub phase_skips: usize,
}

impl JostData {
    pub fn band(&self) -> (usize, usize) {
        interior_band(self.n_start)
    }

    /// Columns `n,re_f_plus,im_f_plus,re_f_minus,im_f_minus`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "re_f_plus", "im_f_plus", "re_f_minus", "im_f_minus"])?;
        for (n, (fp, fm)) in self.f_plus.iter().zip(&self.f_minus).enumerate() {
            w.write_record([n.to_string(), fmt_f64(fp.re), fmt_f64(fp.im), fmt_f64(fm.re), fmt_f64(fm.im)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Computes `f±(z)`, doubling the seed index until `{f⁺, f⁻}` matches its
/// closed form to `tol`.
pub fn jost_solutions(model: &LcModel, z: Complex64, cfg: &JostConfig) -> Result<JostData> {
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {} must be positive", cfg.tol)));
    }
    let limits = model.limits();
    check_hypotheses(&limits)?;
    let cap = seed_cap(model, cfg.n_cap);
    let mut n0 = match cfg.n_start {
        Some(n) => n.clamp(8, cap.max(8)),
        None => initial_seed(model, z, cfg.tol, cap),
    };
    let target = limits.jost_wronskian();
    let mut retries = 0;
    loop {
        let sweeper = Sweeper::new(model, n0)?;
        let f_plus = sweeper.solve(z, 1.0)?;
        let f_minus = sweeper.solve(z, -1.0)?;
        let band = interior_band(n0);
        let (wronskian, _) = band_wronskian(model, &f_plus, &f_minus, band);
        let deviation = (band.0..=band.1)
            .map(|n| (wronskian_at(model.a(n), &f_plus, &f_minus, n) - target).norm())
            .fold(0.0, f64::max)
            / target.norm();
        if deviation <= cfg.tol || retries >= cfg.max_retries || 2 * n0 > cap {
            if deviation > cfg.tol {
                return Err(Error::JostQuality { deviation, n_start: n0 });
            }
            return Ok(JostData {
                z,
                n_start: n0,
                f_plus,
                f_minus,
                wronskian,
                target,
                wronskian_deviation: deviation,
                retries,
                phase_skips: model.phase_skips(n0),
            });
        }
        n0 *= 2;
        retries += 1;
    }
}

fn check_hypotheses(limits: &AsymptoticLimits) -> Result<()> {
    if !(limits.beta_inf.abs() < 1.0) || !(limits.alpha_inf > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Jost asymptotics need |β∞| < 1 and α∞ > 0 (got β∞ = {}, α∞ = {})",
            limits.beta_inf, limits.alpha_inf
        )));
    }
    Ok(())
}

/// `σ±(z)`, `τ±(z)` with quality measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringCoeffs {
    pub z: Complex64,
    pub sigma_plus: Complex64,
    pub sigma_minus: Complex64,
    pub tau_plus: Complex64,
    pub tau_minus: Complex64,
    /// `{f⁺, f⁻}` closed form.
    pub jost_wronskian: Complex64,
    /// `|determinant - 1|`, see [`ScatteringCoeffs::determinant`].
    pub identity_residual: f64,
    /// Largest relative spread of the Wronskians over the band.
    pub band_spread: f64,
}

impl ScatteringCoeffs {
    /// `{f⁺, f⁻}(σ₊τ₋ - σ₋τ₊)`, which equals `{p, q} = 1`.
    pub fn determinant(&self) -> Complex64 {
        self.jost_wronskian * (self.sigma_plus * self.tau_minus - self.sigma_minus * self.tau_plus)
    }

    /// `|σ₊|² - |σ₋|²`.
    pub fn modulus_gap(&self) -> f64 {
        self.sigma_plus.norm_sqr() - self.sigma_minus.norm_sqr()
    }

    /// Columns `re_z,im_z,re_sigma_plus,...,identity_residual`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "re_z",
            "im_z",
            "re_sigma_plus",
            "im_sigma_plus",
            "re_sigma_minus",
            "im_sigma_minus",
            "re_tau_plus",
            "im_tau_plus",
            "re_tau_minus",
            "im_tau_minus",
            "identity_residual",
        ])?;
        let mut row = vec![fmt_f64(self.z.re), fmt_f64(self.z.im)];
        for c in [self.sigma_plus, self.sigma_minus, self.tau_plus, self.tau_minus] {
            row.push(fmt_f64(c.re));
            row.push(fmt_f64(c.im));
        }
        row.push(fmt_f64(self.identity_residual));
        w.write_record(&row)?;
        w.flush()?;
        Ok(())
    }
}

/// Wronskian formulas for `σ±`, `τ±`, averaged over the interior band.
///
/// `table` must reach index `N/2 + 1` of the seed index `N` and be
/// evaluated at the same `z`.
pub fn scattering_coeffs(model: &LcModel, jost: &JostData, table: &PolyTable, tol: f64) -> Result<ScatteringCoeffs> {
    if table.z != jost.z {
        return Err(Error::InvalidParameter("polynomial table and Jost data at different points".into()));
    }
    let band = jost.band();
    if table.p.len() < band.1 + 2 {
        return Err(Error::InvalidParameter(format!(
            "polynomial table of length {} does not cover the band up to {}",
            table.p.len(),
            band.1 + 1
        )));
    }
    let (p_fm, s1) = band_wronskian(model, &table.p, &jost.f_minus, band);
    let (p_fp, s2) = band_wronskian(model, &table.p, &jost.f_plus, band);
    let (q_fm, s3) = band_wronskian(model, &table.q, &jost.f_minus, band);
    let (q_fp, s4) = band_wronskian(model, &table.q, &jost.f_plus, band);
    let spread = s1.max(s2).max(s3).max(s4);
    if spread > tol {
        return Err(Error::BandSpread { spread });
    }
    let w = jost.target;
    let mut sc = ScatteringCoeffs {
        z: jost.z,
        sigma_plus: p_fm / w,
        sigma_minus: -p_fp / w,
        tau_plus: q_fm / w,
        tau_minus: -q_fp / w,
        jost_wronskian: w,
        identity_residual: 0.0,
        band_spread: spread,
    };
    sc.identity_residual = (sc.determinant() - 1.0).norm();
    Ok(sc)
}

/// Band spread allowed by [`scattering_at`].
pub const BAND_TOL: f64 = 1e-6;

/// Jost solutions, polynomials and coefficients at one point.
pub fn scattering_at(model: &LcModel, z: Complex64, cfg: &JostConfig) -> Result<(JostData, ScatteringCoeffs)> {
    let jost = jost_solutions(model, z, cfg)?;
    let table = eval_pq(model, z, jost.band().1 + 1)?;
    let sc = scattering_coeffs(model, &jost, &table, BAND_TOL)?;
    Ok((jost, sc))
}

/// Both sides of `|σ₊|² - |σ₋|² = Im z α∞ (1-β∞²)^{-1/2} Σ|p_n|²`, the sum
/// over `2n` terms with tail extrapolation.
pub fn modulus_identity(model: &LcModel, sc: &ScatteringCoeffs, n: usize) -> Result<(f64, f64)> {
    let table = eval_pq(model, sc.z, 2 * n)?;
    let terms: Vec<f64> = table.p[..2 * n].iter().map(|p| p.norm_sqr()).collect();
    let (norm_sq, _) = sum_with_tail(model, &terms, Support::SquareSummable);
    let limits = model.limits();
    Ok((sc.modulus_gap(), sc.z.im * limits.alpha_inf / limits.sin_theta() * norm_sq))
}

/// `s±(u)` together with the data of the decomposition
/// `u = Γ p(z) + 𝓡(z) h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub s_plus: Complex64,
    pub s_minus: Complex64,
    pub gamma: Complex64,
    /// `⟨h, p(z̄)⟩` with `h = (𝒥 - z) u`.
    pub pairing: Complex64,
}

/// The map `u ↦ (s₊(u), s₋(u))` evaluated through a point `z`.
#[derive(Clone, Debug)]
pub struct BoundaryMap<'m> {
    model: &'m LcModel,
    coeffs: ScatteringCoeffs,
}

impl<'m> BoundaryMap<'m> {
    pub fn new(model: &'m LcModel, z: Complex64, cfg: &JostConfig) -> Result<Self> {
        let (_, coeffs) = scattering_at(model, z, cfg)?;
        Ok(Self { model, coeffs })
    }

    pub fn from_coeffs(model: &'m LcModel, coeffs: ScatteringCoeffs) -> Self {
        Self { model, coeffs }
    }

    pub fn z(&self) -> Complex64 {
        self.coeffs.z
    }

    pub fn coeffs(&self) -> &ScatteringCoeffs {
        &self.coeffs
    }

    /// `s±(u)` for a finitely supported or tail-decaying `u`.
    pub fn apply(&self, u: &[Complex64], support: Support) -> Result<BoundaryData> {
        let model = self.model.model();
        let z = self.coeffs.z;
        let mut u = u.to_vec();
        if support == Support::Finite {
            u.extend([Complex64::new(0.0, 0.0); 2]);
        }
        if u.len() < 3 {
            return Err(Error::InvalidParameter("vector needs at least three entries".into()));
        }
        // Summation by parts: with h = (𝒥 - z) u and conj(q_n(z̄)) = q_n(z),
        // u_0 - Σ_{k≤m} h_k q_k = {u, q}_m and Σ_{k≤m} h_k p_k = -{u, p}_m.
        // The Wronskians avoid the cancellation in the sums when a_n grows fast.
        let terms = u.len() - 1;
        let table = eval_pq(model, z, terms + 1)?;
        let boundary = |v: &[Complex64]| {
            let at = |m: usize| wronskian_at(model.a(m), &u, v, m);
            if support == Support::Finite || terms < MIN_EXTRAPOLATION_LEN {
                at(terms - 1)
            } else {
                let n = terms / 2;
                TailRule::new(model, n).extrapolate(at(n - 1), at(2 * n - 1)).0
            }
        };
        let gamma = boundary(&table.q);
        let pairing = -boundary(&table.p);
        let c = &self.coeffs;
        Ok(BoundaryData {
            s_plus: gamma * c.sigma_plus + pairing * c.tau_plus,
            s_minus: gamma * c.sigma_minus + pairing * c.tau_minus,
            gamma,
            pairing,
        })
    }

    /// `γ_ω(z) = -(τ₊ - ωτ₋)/(σ₊ - ωσ₋)`.
    pub fn gamma_omega(&self, omega: ExtensionParamOmega) -> Result<Complex64> {
        gamma_omega_from(&self.coeffs, omega)
    }
}

/// `s±(u)` through the point `z`.
pub fn boundary_data(model: &LcModel, u: &[Complex64], z: Complex64, support: Support, cfg: &JostConfig) -> Result<BoundaryData> {
    BoundaryMap::new(model, z, cfg)?.apply(u, support)
}

/// A unimodular boundary parameter `ω = e^{iχ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParamOmega {
    omega: Complex64,
}

impl ExtensionParamOmega {
    /// Accepts `|ω| = 1` up to `1e-12` and renormalizes.
    pub fn new(omega: Complex64) -> Result<Self> {
        let r = omega.norm();
        if !((r - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidParameter(format!("|ω| = {r} is not 1")));
        }
        Ok(Self { omega: omega / r })
    }

    pub fn from_angle(chi: f64) -> Self {
        Self {
            omega: Complex64::from_polar(1.0, chi),
        }
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    /// `χ ∈ (-π, π]`.
    pub fn chi(&self) -> f64 {
        self.omega.arg()
    }
}

/// `γ_ω` from precomputed coefficients.
pub fn gamma_omega_from(c: &ScatteringCoeffs, omega: ExtensionParamOmega) -> Result<Complex64> {
    let w = omega.omega();
    let den = c.sigma_plus - w * c.sigma_minus;
    if den.norm() <= 1e-13 * (c.sigma_plus.norm() + c.sigma_minus.norm()) {
        return Err(Error::SpectralPoint { denominator: den });
    }
    Ok(-(c.tau_plus - w * c.tau_minus) / den)
}

/// `γ_ω(z)`, the rank-one coefficient of the resolvent of `J_ω`.
pub fn gamma_omega(model: &LcModel, z: Complex64, omega: ExtensionParamOmega, cfg: &JostConfig) -> Result<Complex64> {
    let (_, c) = scattering_at(model, z, cfg)?;
    gamma_omega_from(&c, omega)
}

/// `|1/t|` below which a fitted `t` is reported as `∞`.
pub const INFINITE_T: f64 = 1e-6;

/// The `t` with `γ_t = γ_ω`, fitted at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub omega: ExtensionParamOmega,
    pub anchor: Complex64,
    pub t: ExtensionParamT,
    /// Imaginary part of the fitted `t` (of `1/t` when `t = ∞`), zero in
    /// exact arithmetic.
    pub t_imag: f64,
    /// `t` obtained instead from `σ₊(0)`, `τ₊(0)` by matching the real
    /// spectra: `t = -Im(e^{-iχ/2} τ₊(0)) / Im(e^{-iχ/2} σ₊(0))`.
    pub t_from_spectrum: ExtensionParamT,
}

/// Solves `γ_t(z) = γ_ω(z)` for `t` at the anchor `z`.
pub fn calibrate_t(model: &LcModel, omega: ExtensionParamOmega, anchor: Complex64, cfg: &JostConfig) -> Result<Calibration> {
    let g = gamma_omega(model, anchor, omega, cfg)?;
    let ip = inner_products(model, anchor, 1e-12, DEFAULT_N_MAX).or_else(|e| match e {
        Error::TruncationNotConverged { partial, .. } => Ok(*partial),
        other => Err(other),
    })?;
    let z = anchor;
    let num = g * (1.0 - z * ip.pq0) - z * ip.qq0;
    let den = 1.0 + z * ip.qp0 + g * z * ip.pp0;
    // Fit on the projective line: near t = ∞ use 1/t.
    let (t, t_imag) = if den.norm() < num.norm() && (den / num).norm() <= INFINITE_T {
        (ExtensionParamT::Infinite, (den / num).im)
    } else {
        let t = num / den;
        (ExtensionParamT::Finite(t.re), t.im)
    };
    let (_, at_zero) = scattering_at(model, Complex64::new(0.0, 0.0), cfg)?;
    let rot = Complex64::from_polar(1.0, -omega.chi() / 2.0);
    let (a, b) = ((rot * at_zero.sigma_plus).im, (rot * at_zero.tau_plus).im);
    let t_from_spectrum = if a.abs() <= INFINITE_T * b.abs() {
        ExtensionParamT::Infinite
    } else {
        ExtensionParamT::Finite(-b / a)
    };
    Ok(Calibration {
        omega,
        anchor,
        t,
        t_imag,
        t_from_spectrum,
    })
}

/// `γ_t(z)` for a calibrated `t`, for comparison with `γ_ω(z)`.
pub fn gamma_t_at(model: &LcModel, z: Complex64, t: ExtensionParamT) -> Result<Complex64> {
    let ip: InnerProducts = inner_products(model, z, 1e-12, DEFAULT_N_MAX).or_else(|e| match e {
        Error::TruncationNotConverged { partial, .. } => Ok(*partial),
        other => Err(other),
    })?;
    gamma_from_products(&ip, t)
}

/// Both evaluations of the Green pairing
/// `lim a_n (u_{n+1} conj(v_n) - u_n conj(v_{n+1}))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenPairing {
    /// Limit of the sequence, tail-extrapolated.
    pub band_limit: Complex64,
    /// `2i α∞⁻¹ √(1-β∞²) (s₊(u) conj(s₊(v)) - s₋(u) conj(s₋(v)))`.
    pub boundary_formula: Complex64,
    /// `|band_limit - boundary_formula| / max(1, |band_limit|)`.
    pub deviation: f64,
}

/// The Green pairing of two maximal-domain vectors, computed from the
/// sequence and from the boundary values.
pub fn green_pairing(map: &BoundaryMap, u: &[Complex64], v: &[Complex64], support: Support) -> Result<GreenPairing> {
    let model = map.model.model();
    let len = u.len().min(v.len());
    if len < 2 {
        return Err(Error::InvalidParameter("vectors need at least two entries".into()));
    }
    let seq: Vec<Complex64> = (0..len - 1)
        .map(|n| (u[n + 1] * v[n].conj() - u[n] * v[n + 1].conj()) * model.a(n))
        .collect();
    let band_limit = match support {
        Support::Finite => {
            // Past the supports the sequence is zero.
            Complex64::new(0.0, 0.0)
        }
        Support::SquareSummable => limit_with_tail(model, &seq).0,
    };
    let su = map.apply(u, support)?;
    let sv = map.apply(v, support)?;
    let boundary_formula =
        -map.coeffs.jost_wronskian * (su.s_plus * sv.s_plus.conj() - su.s_minus * sv.s_minus.conj());
    let deviation = (band_limit - boundary_formula).norm() / band_limit.norm().max(1.0);
    Ok(GreenPairing {
        band_limit,
        boundary_formula,
        deviation,
    })
}

/// Eigenvalues of `J_ω` in a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaSpectrum {
    pub omega: ExtensionParamOmega,
    pub window: (f64, f64),
    pub eigenvalues: Vec<f64>,
    /// `|σ₊(λ) - ω σ₋(λ)|` at each eigenvalue.
    pub residuals: Vec<f64>,
    pub n_start: usize,
    pub warnings: Vec<String>,
}

/// `σ₊(λ)` on the real axis from `f⁻(λ)` alone, at a fixed seed index.
struct RealSigma<'m> {
    model: &'m LcModel,
    sweeper: Sweeper<'m>,
    n0: usize,
    target: Complex64,
}

impl<'m> RealSigma<'m> {
    fn new(model: &'m LcModel, n0: usize) -> Result<Self> {
        Ok(Self {
            model,
            sweeper: Sweeper::new(model, n0)?,
            n0,
            target: model.limits().jost_wronskian(),
        })
    }

    fn sigma_plus(&self, x: f64) -> Result<Complex64> {
        let fm = self.sweeper.solve(x.into(), -1.0)?;
        let band = interior_band(self.n0);
        let (p, _) = eval_pq_real(self.model, x, band.1 + 1)?;
        let p: Vec<Complex64> = p.into_iter().map(Complex64::from).collect();
        let (w, _) = band_wronskian(self.model, &p, &fm, band);
        Ok(w / self.target)
    }

    /// `(σ₊(λ), τ₊(λ))`.
    fn sigma_tau_plus(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let fm = self.sweeper.solve(x.into(), -1.0)?;
        let band = interior_band(self.n0);
        let (p, q) = eval_pq_real(self.model, x, band.1 + 1)?;
        let p: Vec<Complex64> = p.into_iter().map(Complex64::from).collect();
        let q: Vec<Complex64> = q.into_iter().map(Complex64::from).collect();
        let (ws, _) = band_wronskian(self.model, &p, &fm, band);
        let (wt, _) = band_wronskian(self.model, &q, &fm, band);
        Ok((ws / self.target, wt / self.target))
    }

    /// `Im(e^{-iχ/2} σ₊(λ))`, whose zeros are the eigenvalues of `J_ω`.
    fn secular(&self, x: f64, chi: f64) -> Result<f64> {
        Ok((Complex64::from_polar(1.0, -chi / 2.0) * self.sigma_plus(x)?).im)
    }
}

/// `N_t(λ)` and `D_t(λ)` on the real axis from boundary values at infinity.
///
/// Green's identity turns the scalar products of `p(λ)`, `q(λ)` with `p(0)`,
/// `q(0)` into limits of Wronskians, which depend on the solutions only
/// through their boundary values. Writing
///
/// ```text
/// σ₊(λ) = X σ₊(0) + Y τ₊(0),    τ₊(λ) = X' σ₊(0) + Y' τ₊(0)
/// ```
///
/// with real coefficients gives `1 - λ⟨p, q(0)⟩ = X`, `λ⟨p, p(0)⟩ = Y`,
/// `λ⟨q, q(0)⟩ = -X'` and `1 + λ⟨q, p(0)⟩ = Y'`. This avoids the slowly
/// converging sums.
///
/// The Jost sweep removes the first-order seed error only; the `δ(N)²` term
/// is extrapolated away from seeds `N/2` and `N`.
pub struct BoundarySecular<'m> {
    levels: [BoundaryLevel<'m>; 2],
    /// `1 / (r - 1)` with `r = (δ(N/2) / δ(N))²`, at the reach.
    weight: f64,
}

struct BoundaryLevel<'m> {
    sigma: RealSigma<'m>,
    sigma0: Complex64,
    tau0: Complex64,
}

impl<'m> BoundaryLevel<'m> {
    fn new(model: &'m LcModel, n0: usize) -> Result<Self> {
        let sigma = RealSigma::new(model, n0)?;
        let (sigma0, tau0) = sigma.sigma_tau_plus(0.0)?;
        if !((sigma0.conj() * tau0).im.abs() > 0.0) {
            return Err(Error::InvalidParameter("boundary values at 0 are degenerate".into()));
        }
        Ok(Self { sigma, sigma0, tau0 })
    }

    /// `[X, Y, X', Y']`.
    fn coordinates(&self, x: f64) -> Result<[f64; 4]> {
        let (s, t) = self.sigma.sigma_tau_plus(x)?;
        let det = (self.sigma0 * self.tau0.conj()).im;
        let split = |v: Complex64| ((v * self.tau0.conj()).im / det, (self.sigma0 * v.conj()).im / det);
        let (xs, ys) = split(s);
        let (xt, yt) = split(t);
        Ok([xs, ys, xt, yt])
    }
}

impl<'m> BoundarySecular<'m> {
    /// Seed index chosen so that `δ(N)² ≤ tol` at `|λ| = reach`.
    pub fn new(model: &'m LcModel, reach: f64, tol: f64) -> Result<Self> {
        check_hypotheses(&model.limits())?;
        let z = Complex64::from(reach.abs());
        let cap = seed_cap(model, JostConfig::default().n_cap);
        let n0 = initial_seed(model, z, tol, cap).max(128);
        let r = (seed_error(model, z, n0 / 2) / seed_error(model, z, n0)).powi(2);
        Ok(Self {
            levels: [BoundaryLevel::new(model, n0 / 2)?, BoundaryLevel::new(model, n0)?],
            weight: if r.is_finite() && r > 1.0 { 1.0 / (r - 1.0) } else { 0.0 },
        })
    }

    pub fn n_start(&self) -> usize {
        self.levels[1].sigma.n0
    }

    fn coordinates(&self, x: f64) -> Result<[f64; 4]> {
        let coarse = self.levels[0].coordinates(x)?;
        let fine = self.levels[1].coordinates(x)?;
        Ok(std::array::from_fn(|k| fine[k] + (fine[k] - coarse[k]) * self.weight))
    }

    /// `(N_t(λ), D_t(λ))`, with the same conventions as
    /// [`crate::extensions::Secular`].
    pub fn at(&self, x: f64, t: ExtensionParamT) -> Result<(f64, f64)> {
        let [xs, ys, xt, yt] = self.coordinates(x)?;
        Ok(match t {
            ExtensionParamT::Finite(t) => (-xt + yt * t, xs - t * ys),
            ExtensionParamT::Infinite => (-yt, ys),
        })
    }

    pub fn denominator(&self, x: f64, t: ExtensionParamT) -> Result<f64> {
        Ok(self.at(x, t)?.1)
    }

    /// Five-point derivative of `D_t`.
    pub fn denominator_derivative(&self, x: f64, t: ExtensionParamT) -> Result<f64> {
        let h = 1e-3 * (1.0 + x.abs()).sqrt();
        let d = |k: f64| self.denominator(x + k * h, t);
        Ok((-d(2.0)? + 8.0 * d(1.0)? - 8.0 * d(-1.0)? + d(-2.0)?) / (12.0 * h))
    }
}

/// Real roots of `σ₊(λ) - ω σ₋(λ)`.
///
/// On the real axis `σ₋ = conj(σ₊)`, so with `ω = e^{iχ}` the condition
/// reads `Im(e^{-iχ/2} σ₊(λ)) = 0`. The scan runs with a seed index chosen
/// for `√tol`, the refinement with one chosen for `tol`, both at the largest
/// `|λ|` of the window.
pub fn omega_eigenvalues(
    model: &LcModel,
    omega: ExtensionParamOmega,
    spectral: &SpectralConfig,
    jost: &JostConfig,
) -> Result<OmegaSpectrum> {
    check_hypotheses(&model.limits())?;
    let reach = Complex64::from(spectral.window.0.abs().max(spectral.window.1.abs()));
    let cap = seed_cap(model, jost.n_cap);
    let n_fine = jost.n_start.unwrap_or_else(|| initial_seed(model, reach, jost.tol, cap));
    let n_coarse = initial_seed(model, reach, jost.tol.sqrt(), cap).min(n_fine);
    let coarse = RealSigma::new(model, n_coarse)?;
    let fine = RealSigma::new(model, n_fine)?;
    let chi = omega.chi();
    let params = ScanParams {
        lo: spectral.window.0,
        hi: spectral.window.1,
        grid: spectral.grid,
        xtol: spectral.tol,
    };
    let scan = roots::scan(&params, |x| coarse.secular(x, chi), |x| fine.secular(x, chi))?;
    let w = omega.omega();
    let residuals = scan
        .roots
        .iter()
        .map(|&x| {
            let s = fine.sigma_plus(x)?;
            Ok((s - w * s.conj()).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(OmegaSpectrum {
        omega,
        window: spectral.window,
        eigenvalues: scan.roots,
        residuals,
        n_start: n_fine,
        warnings: scan.warnings,
    })
}

/// `(Re z, Im z, Re γ_ω, Im γ_ω)` rows for a list of points.
pub fn write_gamma_omega_grid<W: Write>(out: W, rows: &[(Complex64, Complex64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re_z", "im_z", "re_gamma", "im_gamma"])?;
    for (z, g) in rows {
        w.write_record([fmt_f64(z.re), fmt_f64(z.im), fmt_f64(g.re), fmt_f64(g.im)])?;
    }
    w.flush()?;
    Ok(())
}
