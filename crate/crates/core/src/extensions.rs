//! The self-adjoint extensions `J_t`, `t ∈ ℝ ∪ {∞}`, of the minimal operator,
//! anchored at the real point 0.
//!
//! With the scalar products `pp0 = ⟨p(z), p(0)⟩` etc. the resolvent reads
//! `R_t(z) h = γ_t(z) ⟨h, p(z̄)⟩ p(z) + 𝓡(z) h` where
//!
//! ```text
//! γ_t(z) = (z qq0 + (1 + z qp0) t) / (1 - z pq0 - z pp0 t),
//! γ_∞(z) = -(1 + z qp0) / (z pp0).
//! ```
//!
//! The spectrum of `J_t` is the zero set of the denominator. On the real
//! axis every quantity is real, so spectra come from a real sign-change scan.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coefficients::{CoefficientModel, LcModel};
use crate::error::{Error, Result};
use crate::jost::BoundarySecular;
use crate::polynomials::{eval_pq, fmt_f64, inner_products, InnerProductEvaluator, InnerProducts, DEFAULT_N_MAX};
use crate::quasiresolvent::QuasiResolvent;
use crate::roots::{self, ScanParams};
use crate::series::Support;

/// Tolerance used for `γ_t` when none is given.
pub const DEFAULT_GAMMA_TOL: f64 = 1e-10;

/// Extension parameter `t`; `∞` is its own variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtensionParamT {
    Finite(f64),
    Infinite,
}

impl ExtensionParamT {
    pub fn finite(t: f64) -> Result<Self> {
        if t.is_finite() {
            Ok(Self::Finite(t))
        } else {
            Err(Error::InvalidParameter(format!("extension parameter {t} is not a finite real; use Infinite")))
        }
    }
}

impl fmt::Display for ExtensionParamT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(t) => write!(f, "{t}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtensionParamT {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(Self::Infinite),
            other => {
                let t: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("cannot read extension parameter {other:?}")))?;
                Self::finite(t)
            }
        }
    }
}

impl Serialize for ExtensionParamT {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(t) => s.serialize_f64(*t),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtensionParamT {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(t) => Self::finite(t).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Numerator and denominator of `γ_t`.
fn fraction(z: Complex64, pp0: Complex64, pq0: Complex64, qp0: Complex64, qq0: Complex64, t: ExtensionParamT) -> (Complex64, Complex64) {
    match t {
        ExtensionParamT::Finite(t) => (z * qq0 + (1.0 + z * qp0) * t, 1.0 - z * pq0 - z * pp0 * t),
        ExtensionParamT::Infinite => (-(1.0 + z * qp0), z * pp0),
    }
}

/// `γ_t(z)` from precomputed scalar products.
pub fn gamma_from_products(ip: &InnerProducts, t: ExtensionParamT) -> Result<Complex64> {
    let (num, den) = fraction(ip.z, ip.pp0, ip.pq0, ip.qp0, ip.qq0, t);
    let scale = 1.0 + (ip.z * ip.pq0).norm() + (ip.z * ip.pp0).norm() * t_scale(t);
    if den.norm() <= 1e-13 * scale {
        return Err(Error::SpectralPoint { denominator: den });
    }
    Ok(num / den)
}

fn t_scale(t: ExtensionParamT) -> f64 {
    match t {
        ExtensionParamT::Finite(t) => t.abs(),
        ExtensionParamT::Infinite => 1.0,
    }
}

/// `γ_t(z) = ⟨R_t(z) e_0, e_0⟩`.
pub fn gamma_t(model: &LcModel, z: Complex64, t: ExtensionParamT, tol: f64) -> Result<Complex64> {
    let ip = inner_products(model, z, tol, DEFAULT_N_MAX)?;
    gamma_from_products(&ip, t)
}

/// `R_t(z) h` on indices `0..n`, for finitely supported `h`; `tol` is the
/// accuracy target for `γ_t(z)`.
pub fn resolvent_apply(
    model: &LcModel,
    z: Complex64,
    t: ExtensionParamT,
    h: &[Complex64],
    n: usize,
    tol: f64,
) -> Result<Vec<Complex64>> {
    let gamma = gamma_t(model, z, t, tol)?;
    let table = eval_pq(model, z, n.max(2))?;
    let qr = QuasiResolvent::from_table(model, &table, n);
    let mut out = qr.apply(h, Support::Finite)?;
    // ⟨h, p(z̄)⟩ = Σ h_m p_m(z).
    let c: Complex64 = h.iter().zip(&table.p).map(|(h, p)| h * p).sum();
    for (o, p) in out.iter_mut().zip(&table.p) {
        *o += gamma * c * p;
    }
    Ok(out)
}

/// Window and numerics for spectral scans.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub window: (f64, f64),
    pub grid: f64,
    /// Bisection tolerance on eigenvalue locations.
    pub tol: f64,
    /// Truncation `N` (sums over `2N` terms) of the coarse scan.
    pub scan_n: usize,
    /// Truncation `N` for refinement, residuals and masses.
    pub refine_n: usize,
    /// Relative tolerance for the two mass computations to agree.
    pub mass_tol: f64,
    /// Newton-polish each root with `D_t` from boundary values at infinity,
    /// which the truncated sums only approximate to about `|λ| / refine_n`.
    pub polish: bool,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            window: (-20.0, 20.0),
            grid: 0.05,
            tol: 1e-10,
            scan_n: 2048,
            refine_n: 16384,
            mass_tol: 1e-6,
            polish: true,
        }
    }
}

impl SpectralConfig {
    pub fn with_window(self, lo: f64, hi: f64) -> Self {
        Self { window: (lo, hi), ..self }
    }

    fn scan_params(&self) -> ScanParams {
        ScanParams {
            lo: self.window.0,
            hi: self.window.1,
            grid: self.grid,
            xtol: self.tol,
        }
    }
}

/// The real functions `D_t(λ)` and `N_t(λ)` at a fixed truncation.
#[derive(Clone, Debug)]
pub struct Secular<'m> {
    eval: InnerProductEvaluator<'m>,
    t: ExtensionParamT,
}

impl<'m> Secular<'m> {
    pub fn new(model: &'m LcModel, t: ExtensionParamT, n: usize) -> Result<Self> {
        Ok(Self {
            eval: InnerProductEvaluator::new(model, n)?,
            t,
        })
    }

    /// `(N_t(λ), D_t(λ))`.
    pub fn at(&self, x: f64) -> Result<(f64, f64)> {
        let r = self.eval.at_real(x)?;
        let (num, den) = fraction(
            Complex64::from(x),
            r.pp0.into(),
            r.pq0.into(),
            r.qp0.into(),
            r.qq0.into(),
            self.t,
        );
        Ok((num.re, den.re))
    }

    pub fn denominator(&self, x: f64) -> Result<f64> {
        Ok(self.at(x)?.1)
    }

    /// Five-point derivative of `D_t`.
    pub fn denominator_derivative(&self, x: f64) -> Result<f64> {
        let h = 1e-3 * (1.0 + x.abs()).sqrt();
        let d = |k: f64| self.denominator(x + k * h);
        Ok((-d(2.0)? + 8.0 * d(1.0)? - 8.0 * d(-1.0)? + d(-2.0)?) / (12.0 * h))
    }

    pub fn evaluator(&self) -> &InnerProductEvaluator<'m> {
        &self.eval
    }
}

/// Eigenvalues of `J_t` in a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub t: ExtensionParamT,
    pub window: (f64, f64),
    pub eigenvalues: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Real roots of `D_t` in the configured window.
pub fn eigenvalues(model: &LcModel, t: ExtensionParamT, cfg: &SpectralConfig) -> Result<Spectrum> {
    let fine = Secular::new(model, t, cfg.refine_n)?;
    Ok(locate(model, t, cfg, &fine)?.spectrum)
}

/// Seed accuracy `δ(N)²` for the polishing denominator.
const POLISH_SEED_TOL: f64 = 1e-10;

struct Located<'m> {
    spectrum: Spectrum,
    /// `|D_t|` at each root.
    residuals: Vec<f64>,
    /// The polishing evaluator, when polishing ran.
    exact: Option<BoundarySecular<'m>>,
}

/// Scans for roots and polishes them.
fn locate<'m>(model: &'m LcModel, t: ExtensionParamT, cfg: &SpectralConfig, fine: &Secular) -> Result<Located<'m>> {
    let coarse = Secular::new(model, t, cfg.scan_n)?;
    let scan = roots::scan(&cfg.scan_params(), |x| coarse.denominator(x), |x| fine.denominator(x))?;
    let mut warnings = scan.warnings;
    let mut roots = scan.roots;
    let reach = roots.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut exact = None;
    let residuals = if cfg.polish && !roots.is_empty() {
        let boundary = exact.insert(BoundarySecular::new(model, reach, POLISH_SEED_TOL)?);
        let mut residuals = Vec::with_capacity(roots.len());
        for x in roots.iter_mut() {
            let slope = fine.denominator_derivative(*x)?;
            let mut d = boundary.denominator(*x, t)?;
            for _ in 0..4 {
                let step = d / slope;
                if !(step.abs() < cfg.grid) {
                    warnings.push(format!("polishing the root near {x:.6} diverged; kept the scan value"));
                    break;
                }
                *x -= step;
                d = boundary.denominator(*x, t)?;
                if step.abs() <= cfg.tol {
                    break;
                }
            }
            residuals.push(d.abs());
        }
        residuals
    } else {
        roots.iter().map(|&x| fine.denominator(x).map(f64::abs)).collect::<Result<_>>()?
    };
    Ok(Located {
        spectrum: Spectrum {
            t,
            window: cfg.window,
            eigenvalues: roots,
            warnings,
        },
        residuals,
        exact,
    })
}

/// One atom of a spectral measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub lambda: f64,
    /// `1 / Σ p_n(λ)²`.
    pub mass: f64,
    /// `|D_t(λ)|`, from boundary values when polishing, otherwise at the
    /// refinement truncation.
    pub residual: f64,
    /// `-N_t(λ) / D_t'(λ)`, the residue of `-γ_t`.
    pub residue_mass: f64,
    /// `|mass - residue_mass| / mass`.
    pub mass_deviation: f64,
    /// `|N_t(λ)|`; a genuine pole has it bounded away from 0.
    pub numerator: f64,
    pub flagged: bool,
}

/// Atoms of the spectral measure of `J_t` on `e_0` inside a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub t: ExtensionParamT,
    pub window: (f64, f64),
    pub atoms: Vec<Atom>,
    pub warnings: Vec<String>,
}

impl SpectralMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `Σ m_k / (λ_k - z)`, the window part of the Cauchy–Stieltjes transform.
    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        self.atoms.iter().map(|a| a.mass / (a.lambda - z)).sum()
    }

    /// `Σ λ_k^n m_k`.
    pub fn moment(&self, n: u32) -> f64 {
        self.atoms.iter().map(|a| a.lambda.powi(n as i32) * a.mass).sum()
    }

    pub fn locations(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.lambda).collect()
    }

    /// The `k` atoms closest to 0, in increasing order of `|λ|`.
    pub fn nearest_zero(&self, k: usize) -> Vec<Atom> {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()));
        atoms.truncate(k);
        atoms
    }

    /// Columns `lambda,mass,residual,residue_mass,mass_deviation`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lambda", "mass", "residual", "residue_mass", "mass_deviation"])?;
        for a in &self.atoms {
            w.write_record([
                fmt_f64(a.lambda),
                fmt_f64(a.mass),
                fmt_f64(a.residual),
                fmt_f64(a.residue_mass),
                fmt_f64(a.mass_deviation),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Eigenvalues with masses computed from the eigenvector norm and,
/// independently, from the residue of `γ_t`.
pub fn spectral_measure(model: &LcModel, t: ExtensionParamT, cfg: &SpectralConfig) -> Result<SpectralMeasure> {
    let fine = Secular::new(model, t, cfg.refine_n)?;
    let Located {
        spectrum,
        residuals,
        exact,
    } = locate(model, t, cfg, &fine)?;
    let mut atoms = Vec::with_capacity(spectrum.eigenvalues.len());
    for (&lambda, &residual) in spectrum.eigenvalues.iter().zip(&residuals) {
        let r = fine.evaluator().at_real(lambda)?;
        let (num, slope) = match &exact {
            Some(b) => (b.at(lambda, t)?.0, b.denominator_derivative(lambda, t)?),
            None => (fine.at(lambda)?.0, fine.denominator_derivative(lambda)?),
        };
        let mass = 1.0 / r.p_norm_sq;
        let residue_mass = -num / slope;
        let mass_deviation = (mass - residue_mass).abs() / mass;
        atoms.push(Atom {
            lambda,
            mass,
            residual,
            residue_mass,
            mass_deviation,
            numerator: num.abs(),
            flagged: !(mass_deviation <= cfg.mass_tol),
        });
    }
    Ok(SpectralMeasure {
        t,
        window: cfg.window,
        atoms,
        warnings: spectrum.warnings,
    })
}

/// Moments `s_0..=s_{n_max}` of the spectral measure, `s_k = ⟨𝒥^k e_0, e_0⟩`,
/// from powers of the `N × N` truncation.
///
/// The computation is repeated at `2N`; any difference is reported as
/// contamination from the truncation boundary.
pub fn moments(model: &CoefficientModel, n_max: usize, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("truncation must be positive".into()));
    }
    model.require(2 * n)?;
    let coarse = truncated_moments(model, n_max, n);
    let fine = truncated_moments(model, n_max, 2 * n);
    for (k, (c, f)) in coarse.iter().zip(&fine).enumerate() {
        let scale = f.abs().max(1e-300);
        if (c - f).abs() > 1e-12 * scale {
            return Err(Error::Contamination {
                order: k,
                deviation: (c - f).abs() / scale,
            });
        }
    }
    Ok(coarse)
}

/// One moment computed two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub order: usize,
    /// From powers of the truncated matrix.
    pub matrix: f64,
    /// `Σ λ_k^n m_k` over the atoms in the window.
    pub measure: f64,
    pub scale: f64,
    /// `|matrix - measure| / scale`.
    pub relative: f64,
}

/// Compares `s_0..=s_{n_max}` of `measure` with the truncated-matrix moments
/// at size `n`.
///
/// Odd moments may vanish, so each order is measured against
/// `max(|s_k|, √(s_{k-1} s_{k+1}))`, the size Cauchy–Schwarz allows it.
pub fn compare_moments(model: &CoefficientModel, measure: &SpectralMeasure, n_max: usize, n: usize) -> Result<Vec<MomentComparison>> {
    let s = moments(model, n_max + 1, n)?;
    Ok((0..=n_max)
        .map(|k| {
            let mut scale = s[k].abs();
            if k >= 1 {
                scale = scale.max((s[k - 1] * s[k + 1]).abs().sqrt());
            }
            let scale = scale.max(f64::MIN_POSITIVE);
            let measured = measure.moment(k as u32);
            MomentComparison {
                order: k,
                matrix: s[k],
                measure: measured,
                scale,
                relative: (s[k] - measured).abs() / scale,
            }
        })
        .collect())
}

fn truncated_moments(model: &CoefficientModel, n_max: usize, n: usize) -> Vec<f64> {
    let a: Vec<f64> = (0..n).map(|k| model.a(k)).collect();
    let b: Vec<f64> = (0..n).map(|k| model.b(k)).collect();
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    let mut out = vec![1.0];
    for _ in 0..n_max {
        let mut w = vec![0.0; n];
        for k in 0..n {
            let mut s = b[k] * v[k];
            if k > 0 {
                s += a[k - 1] * v[k - 1];
            }
            if k + 1 < n {
                s += a[k] * v[k + 1];
            }
            w[k] = s;
        }
        v = w;
        out.push(v[0]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::coefficients::Diagonal;

    fn model_a() -> LcModel {
        LcModel::new(CoefficientModel::power(2.0, 1).unwrap()).unwrap()
    }

    #[test]
    fn param_parsing_and_serde() {
        assert_eq!("inf".parse::<ExtensionParamT>().unwrap(), ExtensionParamT::Infinite);
        assert_eq!("-2.5".parse::<ExtensionParamT>().unwrap(), ExtensionParamT::Finite(-2.5));
        assert!("abc".parse::<ExtensionParamT>().is_err());
        assert!(ExtensionParamT::finite(f64::INFINITY).is_err());
        let json = serde_json::to_string(&[ExtensionParamT::Finite(1.0), ExtensionParamT::Infinite]).unwrap();
        assert_eq!(json, r#"[1.0,"inf"]"#);
        let back: Vec<ExtensionParamT> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![ExtensionParamT::Finite(1.0), ExtensionParamT::Infinite]);
    }

    #[test]
    fn gamma_zero_formula() {
        let m = model_a();
        let z = c64(0.3, 0.8);
        let ip = inner_products(&m, z, 1e-10, DEFAULT_N_MAX).unwrap();
        let g = gamma_from_products(&ip, ExtensionParamT::Finite(0.0)).unwrap();
        assert!((g - z * ip.qq0 / (1.0 - z * ip.pq0)).norm() < 1e-15);
    }

    #[test]
    fn gamma_conjugate_symmetry_and_sign() {
        let m = model_a();
        let t = ExtensionParamT::Finite(1.0);
        let up = gamma_t(&m, c64(1.0, 1.0), t, 1e-10).unwrap();
        let down = gamma_t(&m, c64(1.0, -1.0), t, 1e-10).unwrap();
        assert!((up - down.conj()).norm() < 1e-10);
        for t in [-1.0, 0.0, 1.0].map(ExtensionParamT::Finite).into_iter().chain([ExtensionParamT::Infinite]) {
            assert!(gamma_t(&m, c64(0.0, 1.0), t, 1e-10).unwrap().im > 0.0);
        }
    }

    #[test]
    fn spectral_point_error() {
        let ip = InnerProducts {
            z: c64(1.0, 0.0),
            pp0: c64(0.0, 0.0),
            pq0: c64(1.0, 0.0),
            qp0: c64(0.0, 0.0),
            qq0: c64(0.0, 0.0),
            n_used: 0,
            tail_estimate: 0.0,
        };
        assert!(matches!(
            gamma_from_products(&ip, ExtensionParamT::Finite(0.0)),
            Err(Error::SpectralPoint { .. })
        ));
    }

    #[test]
    fn resolvent_e0_and_zero() {
        let m = model_a();
        let z = c64(0.0, 1.0);
        let t = ExtensionParamT::Finite(0.5);
        let out = resolvent_apply(&m, z, t, &[c64(1.0, 0.0)], 200, DEFAULT_GAMMA_TOL).unwrap();
        let g = gamma_t(&m, z, t, DEFAULT_GAMMA_TOL).unwrap();
        assert!((out[0] - g).norm() < 1e-14);
        let zero = resolvent_apply(&m, z, t, &[], 50, DEFAULT_GAMMA_TOL).unwrap();
        assert!(zero.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn resolvent_identity() {
        let m = model_a();
        let t = ExtensionParamT::Finite(0.0);
        let (z1, z2) = (c64(0.0, 1.0), c64(0.0, 2.0));
        let n = 4096;
        let e0 = [c64(1.0, 0.0)];
        let r1 = resolvent_apply(&m, z1, t, &e0, n, DEFAULT_GAMMA_TOL).unwrap();
        let r2 = resolvent_apply(&m, z2, t, &e0, n, DEFAULT_GAMMA_TOL).unwrap();
        // R_t(z₁) applied to the ℓ² vector R_t(z₂)e_0: rank-one part and
        // quasiresolvent part both need the full sums.
        let g1 = gamma_t(&m, z1, t, DEFAULT_GAMMA_TOL).unwrap();
        let tab = eval_pq(&m, z1, n).unwrap();
        let qr = QuasiResolvent::from_table(&m, &tab, n);
        let mut rr = qr.apply(&r2, Support::SquareSummable).unwrap();
        let terms: Vec<Complex64> = r2.iter().zip(&tab.p).map(|(h, p)| h * p).collect();
        let (c, _) = crate::series::sum_with_tail(&m, &terms, Support::SquareSummable);
        for (o, p) in rr.iter_mut().zip(&tab.p) {
            *o += g1 * c * p;
        }
        for k in 0..20 {
            let lhs = r1[k] - r2[k];
            let rhs = (z1 - z2) * rr[k];
            assert!((lhs - rhs).norm() < 1e-6, "{k}: {lhs} {rhs}");
        }
    }

    #[test]
    fn infinite_t_has_zero_eigenvalue() {
        let m = model_a();
        let cfg = SpectralConfig::default().with_window(-1.0, 1.0);
        let s = eigenvalues(&m, ExtensionParamT::Infinite, &cfg).unwrap();
        assert!(s.eigenvalues.iter().any(|x| x.abs() < 1e-10), "{s:?}");
    }

    #[test]
    fn masses_and_residues() {
        let m = model_a();
        let cfg = SpectralConfig::default().with_window(-10.0, 10.0);
        let mu = spectral_measure(&m, ExtensionParamT::Finite(0.0), &cfg).unwrap();
        assert_eq!(mu.atoms.len(), 4);
        for a in &mu.atoms {
            assert!(a.mass > 0.0 && a.residual < 1e-8 && !a.flagged, "{a:?}");
        }
        // Symmetric spectrum for a zero diagonal.
        assert!((mu.atoms[0].lambda + mu.atoms[3].lambda).abs() < 1e-8);
        assert!(mu.total_mass() <= 1.0 + 1e-9);
    }

    #[test]
    fn moments_closed_forms() {
        let m = CoefficientModel::power(2.0, 1).unwrap();
        let s = moments(&m, 6, 10).unwrap();
        assert_eq!(s[0], 1.0);
        assert_eq!(s[1], 0.0);
        assert_eq!(s[2], 1.0);
        assert_eq!(s[4], 17.0);
        assert_eq!(s[6], 1585.0);
        let c = m.clone().with_diagonal(Diagonal::ConstantBeta(0.5)).unwrap();
        let s = moments(&c, 2, 4).unwrap();
        let b0 = c.b(0);
        assert!((s[1] - b0).abs() < 1e-15);
        assert!((s[2] - (b0 * b0 + c.a(0).powi(2))).abs() < 1e-14);
        assert!(matches!(moments(&m, 12, 3), Err(Error::Contamination { .. })));
    }
}
