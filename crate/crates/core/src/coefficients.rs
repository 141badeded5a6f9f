//! Recurrence coefficients of the Jacobi matrix and their derived sequences.
//!
//! A model generates the off-diagonal entries `a_n > 0` and the diagonal
//! entries `b_n`. From them we derive
//!
//! ```text
//! β_n = -b_n / (2 √(a_{n-1} a_n))      (n ≥ 1)
//! α_n = √(a_{n+1} / a_n)
//! k_n = α_{n-1} / α_n = a_n / √(a_{n-1} a_{n+1})
//! θ_n = arccos β_n                     (only where |β_n| ≤ 1)
//! φ_n = Σ_{m<n} θ_m                    (sum over indices with |β_m| ≤ 1)
//! ```
//!
//! For `n = 0` there is no `a_{-1}`; we use `a_{-1} := a_0`, so that
//! `β_0 = -b_0 / (2 a_0)`. Constant-β models pick `b_0 = -2β a_0`, which
//! keeps `β_0 = β` and makes the phase exactly `φ_n = n·arccos β`.

use std::fmt;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest off-diagonal entry the numerical routines will touch.
///
/// Products such as `a_n p_n q_{n+1}` must stay finite; with `a_n ≤ 1e250`
/// the solutions are of size `a_n^{-1/2} ≥ 1e-125` and their products do
/// not underflow.
pub const A_MAX: f64 = 1e250;

/// Off-diagonal generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffDiagonal {
    /// `a_n = (n + shift)^p`.
    Power { p: f64, shift: u32 },
    /// `a_n = x^n`.
    Geometric { x: f64 },
    /// Explicit values `a_0, …, a_{len-1}`.
    Tabulated(Vec<f64>),
}

/// Diagonal generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagonal {
    Zero,
    /// `b_n` chosen so that `β_n = β` for every `n`.
    ConstantBeta(f64),
    Tabulated(Vec<f64>),
}

/// Regime of the Jacobi operator as inferred from finitely many coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "LC_candidate")]
    LcCandidate,
    #[serde(rename = "LP_carleman")]
    LpCarleman,
    #[serde(rename = "LP_large_beta")]
    LpLargeBeta,
    #[serde(rename = "critical")]
    Critical,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Classification {
    /// The serialized name, e.g. `LC_candidate`.
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LcCandidate => "LC_candidate",
            Self::LpCarleman => "LP_carleman",
            Self::LpLargeBeta => "LP_large_beta",
            Self::Critical => "critical",
            Self::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::LcCandidate => "LC_candidate",
            Classification::LpCarleman => "LP_carleman",
            Classification::LpLargeBeta => "LP_large_beta",
            Classification::Critical => "critical",
            Classification::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// A yes/no verdict with the fraction of supporting evidence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: bool,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub horizon: usize,
    pub carleman_sum_partial: f64,
    pub carleman_converged: bool,
    pub carleman_divergent: Verdict,
    pub beta_inf_estimate: f64,
    pub beta_spread: f64,
    pub alpha_inf_estimate: f64,
    pub alpha_spread: f64,
    pub k_regularity_sum: f64,
    pub k_regularity_cauchy: bool,
    pub beta_regularity_sum: f64,
    pub beta_regularity_cauchy: bool,
    /// Number of indices `n < horizon` with `|β_n| > 1`, skipped in `φ`.
    pub beta_excursions: usize,
    pub classification: Classification,
}

/// The derived quantities at a single index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedValues {
    pub n: usize,
    pub beta: f64,
    pub alpha: f64,
    /// `None` for `n = 0`.
    pub k: Option<f64>,
    /// `None` where `|β_n| > 1`.
    pub theta: Option<f64>,
    pub phi: f64,
}

/// Limits `α_∞`, `β_∞`; `exact` is false when they were estimated from a table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLimits {
    pub alpha_inf: f64,
    pub beta_inf: f64,
    pub exact: bool,
}

impl AsymptoticLimits {
    /// `√(1 - β_∞²)`.
    pub fn sin_theta(&self) -> f64 {
        (1.0 - self.beta_inf * self.beta_inf).sqrt()
    }

    /// The Wronskian `{f⁺, f⁻}` of the Jost solutions, `-2i α_∞⁻¹ √(1-β_∞²)`.
    pub fn jost_wronskian(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(0.0, -2.0 * self.sin_theta() / self.alpha_inf)
    }
}

/// Cumulative phase table, extended on demand.
#[derive(Debug, Default)]
struct PhaseCache {
    /// `phi[n] = φ_n`.
    phi: Vec<f64>,
    sum: f64,
    comp: f64,
    /// Indices `m` with `|β_m| > 1`, in increasing order.
    skipped: Vec<usize>,
}

pub struct CoefficientModel {
    off: OffDiagonal,
    diag: Diagonal,
    phase: RwLock<PhaseCache>,
}

impl Clone for CoefficientModel {
    fn clone(&self) -> Self {
        Self {
            off: self.off.clone(),
            diag: self.diag.clone(),
            phase: RwLock::new(PhaseCache::default()),
        }
    }
}

impl fmt::Debug for CoefficientModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientModel")
            .field("off", &Abbrev(&self.off))
            .field("diag", &self.diag_label())
            .finish()
    }
}

struct Abbrev<'a>(&'a OffDiagonal);

impl fmt::Debug for Abbrev<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            OffDiagonal::Tabulated(v) => write!(f, "Tabulated(len = {})", v.len()),
            other => write!(f, "{other:?}"),
        }
    }
}

impl PartialEq for CoefficientModel {
    fn eq(&self, other: &Self) -> bool {
        self.off == other.off && self.diag == other.diag
    }
}

impl CoefficientModel {
    /// `a_n = (n + shift)^p`, `b_n = 0`.
    pub fn power(p: f64, shift: u32) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("power exponent p = {p} must be > 0")));
        }
        if shift < 1 {
            return Err(Error::InvalidParameter("power shift must be ≥ 1 so that a_0 > 0".into()));
        }
        Ok(Self::from_parts(OffDiagonal::Power { p, shift }, Diagonal::Zero))
    }

    /// `a_n = x^n`, `b_n = 0`.
    pub fn geometric(x: f64) -> Result<Self> {
        if !(x > 1.0 && x.is_finite()) {
            return Err(Error::InvalidParameter(format!("geometric ratio x = {x} must be > 1")));
        }
        Ok(Self::from_parts(OffDiagonal::Geometric { x }, Diagonal::Zero))
    }

    /// Tabulated `a_n` with `b_n = 0`.
    pub fn tabulated(a: Vec<f64>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::InvalidParameter("a table needs at least two entries".into()));
        }
        if let Some((index, &value)) = a.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveCoefficient { index, value });
        }
        Ok(Self::from_parts(OffDiagonal::Tabulated(a), Diagonal::Zero))
    }

    /// Replaces the diagonal.
    pub fn with_diagonal(self, diag: Diagonal) -> Result<Self> {
        match &diag {
            Diagonal::Zero => {}
            Diagonal::ConstantBeta(beta) => {
                if !beta.is_finite() {
                    return Err(Error::InvalidParameter(format!("β = {beta} must be finite")));
                }
            }
            Diagonal::Tabulated(b) => {
                if let Some((i, v)) = b.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                    return Err(Error::InvalidParameter(format!("b_{i} = {v} is not a real number")));
                }
                if let OffDiagonal::Tabulated(a) = &self.off {
                    if b.len() < a.len() {
                        return Err(Error::InvalidParameter(format!(
                            "b table has {} entries but a table has {}",
                            b.len(),
                            a.len()
                        )));
                    }
                }
            }
        }
        Ok(Self::from_parts(self.off, diag))
    }

    fn from_parts(off: OffDiagonal, diag: Diagonal) -> Self {
        Self {
            off,
            diag,
            phase: RwLock::new(PhaseCache::default()),
        }
    }

    pub fn off_diagonal(&self) -> &OffDiagonal {
        &self.off
    }

    pub fn diagonal(&self) -> &Diagonal {
        &self.diag
    }

    fn diag_label(&self) -> String {
        match &self.diag {
            Diagonal::Zero => "zero".into(),
            Diagonal::ConstantBeta(b) => format!("constant_beta({b})"),
            Diagonal::Tabulated(v) => format!("tabulated(len = {})", v.len()),
        }
    }

    /// Largest queryable index, if the model is tabulated.
    pub fn max_index(&self) -> Option<usize> {
        let a_max = match &self.off {
            OffDiagonal::Tabulated(a) => Some(a.len() - 1),
            _ => None,
        };
        let b_max = match &self.diag {
            Diagonal::Tabulated(b) => Some(b.len() - 1),
            _ => None,
        };
        match (a_max, b_max) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    /// Rejects queries beyond the tabulated range.
    pub fn require(&self, index: usize) -> Result<()> {
        match self.max_index() {
            Some(max) if index > max => Err(Error::IndexBeyondTable { index, max }),
            _ => Ok(()),
        }
    }

    /// Number of leading indices where `a_n ≤ A_MAX` (and inside the table).
    pub fn safe_extent(&self) -> usize {
        let cap = 1usize << 40;
        let by_growth = match &self.off {
            OffDiagonal::Power { p, shift } => {
                let n = A_MAX.powf(1.0 / p) - f64::from(*shift);
                if n >= cap as f64 { cap } else { n.max(0.0) as usize }
            }
            OffDiagonal::Geometric { x } => (A_MAX.ln() / x.ln()).floor() as usize + 1,
            OffDiagonal::Tabulated(a) => a.iter().position(|&v| v > A_MAX).unwrap_or(a.len()),
        };
        match self.max_index() {
            Some(max) => by_growth.min(max + 1),
            None => by_growth,
        }
    }

    /// Off-diagonal entry `a_n`.
    ///
    /// Panics for tabulated models if `n` is beyond the table; callers check
    /// ranges with [`CoefficientModel::require`] first.
    #[inline]
    pub fn a(&self, n: usize) -> f64 {
        match &self.off {
            OffDiagonal::Power { p, shift } => {
                let base = n as f64 + f64::from(*shift);
                if p.fract() == 0.0 && *p <= 16.0 {
                    base.powi(*p as i32)
                } else {
                    base.powf(*p)
                }
            }
            OffDiagonal::Geometric { x } => x.powf(n as f64),
            OffDiagonal::Tabulated(a) => a[n],
        }
    }

    /// Diagonal entry `b_n`.
    #[inline]
    pub fn b(&self, n: usize) -> f64 {
        match &self.diag {
            Diagonal::Zero => 0.0,
            Diagonal::ConstantBeta(beta) => {
                let scale = if n == 0 { self.a(0) } else { (self.a(n - 1) * self.a(n)).sqrt() };
                -2.0 * beta * scale
            }
            Diagonal::Tabulated(b) => b[n],
        }
    }

    /// `β_n`; for `n = 0` with the convention `a_{-1} = a_0`.
    pub fn beta(&self, n: usize) -> f64 {
        if let Diagonal::ConstantBeta(beta) = self.diag {
            return beta;
        }
        let scale = if n == 0 { self.a(0) } else { (self.a(n - 1) * self.a(n)).sqrt() };
        -self.b(n) / (2.0 * scale)
    }

    /// `α_n = √(a_{n+1}/a_n)`.
    pub fn alpha(&self, n: usize) -> f64 {
        match self.off {
            OffDiagonal::Geometric { x } => x.sqrt(),
            _ => (self.a(n + 1) / self.a(n)).sqrt(),
        }
    }

    /// `k_n = a_n / √(a_{n-1} a_{n+1})` for `n ≥ 1`.
    pub fn k(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        Some(match self.off {
            OffDiagonal::Geometric { .. } => 1.0,
            _ => self.a(n) / (self.a(n - 1) * self.a(n + 1)).sqrt(),
        })
    }

    /// `θ_n = arccos β_n`, undefined when `|β_n| > 1`.
    pub fn theta(&self, n: usize) -> Option<f64> {
        let beta = self.beta(n);
        (beta.abs() <= 1.0).then(|| beta.acos())
    }

    /// `φ_n`, memoized.
    pub fn phi(&self, n: usize) -> f64 {
        self.extend_phase(n);
        self.phase.read().expect("phase cache poisoned").phi[n]
    }

    /// `(φ_n, φ_{n+1})` under a single lock.
    pub fn phi_pair(&self, n: usize) -> (f64, f64) {
        self.extend_phase(n + 1);
        let cache = self.phase.read().expect("phase cache poisoned");
        (cache.phi[n], cache.phi[n + 1])
    }

    /// Number of indices `m < n` skipped in `φ_n` because `|β_m| > 1`.
    pub fn phase_skips(&self, n: usize) -> usize {
        self.extend_phase(n);
        let cache = self.phase.read().expect("phase cache poisoned");
        cache.skipped.partition_point(|&m| m < n)
    }

    fn extend_phase(&self, n: usize) {
        {
            let cache = self.phase.read().expect("phase cache poisoned");
            if cache.phi.len() > n {
                return;
            }
        }
        let mut cache = self.phase.write().expect("phase cache poisoned");
        if cache.phi.is_empty() {
            cache.phi.push(0.0);
        }
        while cache.phi.len() <= n {
            let m = cache.phi.len() - 1;
            match self.theta(m) {
                // Neumaier summation keeps φ_n accurate to a few ulps of φ_n.
                Some(theta) => {
                    let t = cache.sum + theta;
                    if cache.sum.abs() >= theta.abs() {
                        cache.comp += (cache.sum - t) + theta;
                    } else {
                        cache.comp += (theta - t) + cache.sum;
                    }
                    cache.sum = t;
                }
                None => cache.skipped.push(m),
            }
            let value = cache.sum + cache.comp;
            cache.phi.push(value);
        }
    }

    pub fn derived(&self, n: usize) -> Result<DerivedValues> {
        self.require(n + 1)?;
        Ok(DerivedValues {
            n,
            beta: self.beta(n),
            alpha: self.alpha(n),
            k: self.k(n),
            theta: self.theta(n),
            phi: self.phi(n),
        })
    }

    /// `α_∞` and `β_∞`, exact for parametric generators.
    pub fn limits(&self) -> AsymptoticLimits {
        let alpha = match self.off {
            OffDiagonal::Power { .. } => Some(1.0),
            OffDiagonal::Geometric { x } => Some(x.sqrt()),
            OffDiagonal::Tabulated(_) => None,
        };
        let beta = match self.diag {
            Diagonal::Zero => Some(0.0),
            Diagonal::ConstantBeta(b) => Some(b),
            Diagonal::Tabulated(_) => None,
        };
        let horizon = self.safe_extent().saturating_sub(2).min(LIMIT_HORIZON);
        let alpha_inf = alpha.unwrap_or_else(|| tail_mean(horizon, |n| self.alpha(n)).0);
        let beta_inf = beta.unwrap_or_else(|| tail_mean(horizon, |n| self.beta(n.max(1))).0);
        AsymptoticLimits {
            alpha_inf,
            beta_inf,
            exact: alpha.is_some() && beta.is_some(),
        }
    }

    /// Estimate of `Σ_{m ≥ n} 1/a_m`.
    pub fn carleman_tail(&self, n: usize) -> f64 {
        dyadic_tail(self, n, |m| 1.0 / self.a(m))
    }

    /// Sum over one dyadic block `Σ_{n ≤ m < 2n} 1/a_m`.
    pub fn carleman_block(&self, n: usize) -> f64 {
        (n..2 * n).map(|m| 1.0 / self.a(m)).sum()
    }

    /// Estimate of `Σ_{m ≥ n} (|k_m - 1| + |β_{m+1} - β_m|)`.
    pub fn regularity_tail(&self, n: usize) -> f64 {
        let n = n.max(1);
        dyadic_tail(self, n, |m| {
            (self.k(m).unwrap_or(1.0) - 1.0).abs() + (self.beta(m + 1) - self.beta(m)).abs()
        })
    }
}

/// Largest index used to estimate `α∞`, `β∞` for tabulated models.
const LIMIT_HORIZON: usize = 1 << 16;

/// Geometric closure of dyadic block sums: `Σ_{m≥n} f(m) ≈ B/(1-ρ)` with
/// `B = Σ_{n≤m<2n} f(m)` and `ρ` the ratio of consecutive blocks.
fn dyadic_tail(model: &CoefficientModel, n: usize, f: impl Fn(usize) -> f64) -> f64 {
    let n = n.max(1);
    let extent = model.safe_extent();
    let block = |lo: usize| -> f64 { (lo..2 * lo).map(&f).sum() };
    // The `k_m` and `β_{m+1}` terms reach one index past the block.
    let (b_here, rho) = if 4 * n + 1 < extent {
        let b1 = block(n);
        let b2 = block(2 * n);
        (b1, if b1 > 0.0 { b2 / b1 } else { 0.0 })
    } else if 2 * n + 1 < extent && n >= 2 {
        let b0 = block(n / 2);
        let b1 = block(n);
        (b1, if b0 > 0.0 { b1 / b0 } else { 0.0 })
    } else {
        return 0.0;
    };
    if b_here == 0.0 {
        return 0.0;
    }
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    b_here / (1.0 - rho)
}

/// Mean and standard deviation over the last 10% of `0..horizon`.
fn tail_mean(horizon: usize, f: impl Fn(usize) -> f64) -> (f64, f64) {
    let horizon = horizon.max(2);
    let start = horizon - (horizon / 10).max(1);
    let values: Vec<f64> = (start..horizon).map(f).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}

/// Partial sum of `f(n)` over `n_lo..horizon`, and whether it is numerically
/// Cauchy: the last 10% of terms contribute less than `tol` of the total.
fn cauchy_sum(n_lo: usize, horizon: usize, tol: f64, f: impl Fn(usize) -> f64) -> (f64, bool) {
    let start = horizon - (horizon / 10).max(1);
    let mut total = 0.0;
    let mut last = 0.0;
    for n in n_lo..horizon {
        let v = f(n).abs();
        total += v;
        if n >= start {
            last += v;
        }
    }
    let cauchy = last <= tol * total || last < f64::EPSILON;
    (total, cauchy)
}

/// Classifies the operator regime from the coefficients up to `horizon`.
///
/// Convergence decisions are heuristics on finitely many terms; the report
/// carries the raw partial sums so callers can re-decide.
pub fn classify(model: &CoefficientModel, horizon: usize, tol: f64) -> Result<RegimeReport> {
    if horizon < 32 {
        return Err(Error::InvalidParameter(format!("classification horizon {horizon} must be ≥ 32")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    model.require(horizon + 1)?;
    let extent = model.safe_extent();
    let horizon = horizon.min(extent.saturating_sub(2)).max(2);

    let (carleman, carleman_converged) = cauchy_sum(0, horizon, tol, |n| 1.0 / model.a(n));

    // Dyadic blocks [2^j - 1, 2^{j+1} - 1) of the Carleman series.
    let mut blocks = Vec::new();
    let mut lo = 1usize;
    while 2 * lo <= horizon {
        blocks.push((lo - 1..2 * lo - 1).map(|n| 1.0 / model.a(n)).sum::<f64>());
        lo *= 2;
    }
    // A step is non-decaying if the block stays above `tol` and drops by
    // at most `tol`.
    let steps: Vec<bool> = blocks.windows(2).map(|w| w[1] > tol && w[1] >= w[0] - tol).collect();
    let recent = &steps[steps.len().saturating_sub(1)..];
    let divergent = !recent.is_empty() && recent.iter().all(|&s| s);
    let checked = &steps[steps.len().saturating_sub(4)..];
    let agreeing = checked.iter().filter(|&&s| s == divergent).count();
    let confidence = if checked.is_empty() { 0.0 } else { agreeing as f64 / checked.len() as f64 };

    let (beta_inf, beta_spread) = tail_mean(horizon, |n| model.beta(n.max(1)));
    let (alpha_inf, alpha_spread) = tail_mean(horizon, |n| model.alpha(n));
    let (k_sum, k_cauchy) = cauchy_sum(1, horizon, tol, |n| model.k(n).unwrap_or(1.0) - 1.0);
    let (beta_sum, beta_cauchy) = cauchy_sum(1, horizon, tol, |n| model.beta(n + 1) - model.beta(n));
    let beta_excursions = (0..horizon).filter(|&n| model.beta(n).abs() > 1.0).count();

    let beta_stable = beta_spread <= tol * beta_inf.abs().max(1.0);
    let alpha_stable = alpha_spread <= tol * alpha_inf.abs().max(1.0);
    let classification = if divergent {
        Classification::LpCarleman
    } else if beta_stable && beta_inf.abs() > 1.0 + tol {
        Classification::LpLargeBeta
    } else if beta_stable && (beta_inf.abs() - 1.0).abs() <= tol {
        Classification::Critical
    } else if carleman_converged
        && beta_stable
        && alpha_stable
        && beta_inf.abs() < 1.0
        && k_cauchy
        && beta_cauchy
    {
        Classification::LcCandidate
    } else {
        Classification::Inconclusive
    };

    Ok(RegimeReport {
        horizon,
        carleman_sum_partial: carleman,
        carleman_converged,
        carleman_divergent: Verdict { value: divergent, confidence },
        beta_inf_estimate: beta_inf,
        beta_spread,
        alpha_inf_estimate: alpha_inf,
        alpha_spread,
        k_regularity_sum: k_sum,
        k_regularity_cauchy: k_cauchy,
        beta_regularity_sum: beta_sum,
        beta_regularity_cauchy: beta_cauchy,
        beta_excursions,
        classification,
    })
}

/// A model certified as a limit-circle candidate, with its asymptotic limits.
///
/// Everything past the polynomial recurrence assumes the limit-circle regime
/// and the Jost hypotheses (`|β_∞| < 1`, summable regularity tails); this
/// type is the gate.
#[derive(Clone, Debug)]
pub struct LcModel {
    model: CoefficientModel,
    limits: AsymptoticLimits,
    report: RegimeReport,
}

impl LcModel {
    pub const DEFAULT_HORIZON: usize = 4096;
    pub const DEFAULT_TOL: f64 = 1e-3;

    pub fn new(model: CoefficientModel) -> Result<Self> {
        let horizon = match model.max_index() {
            Some(max) => Self::DEFAULT_HORIZON.min(max.saturating_sub(1)),
            None => Self::DEFAULT_HORIZON,
        };
        Self::with_horizon(model, horizon, Self::DEFAULT_TOL)
    }

    pub fn with_horizon(model: CoefficientModel, horizon: usize, tol: f64) -> Result<Self> {
        let report = classify(&model, horizon, tol)?;
        if report.classification != Classification::LcCandidate {
            return Err(Error::NotLimitCircle(report.classification));
        }
        let limits = model.limits();
        Ok(Self { model, limits, report })
    }

    pub fn limits(&self) -> AsymptoticLimits {
        self.limits
    }

    pub fn report(&self) -> &RegimeReport {
        &self.report
    }

    pub fn model(&self) -> &CoefficientModel {
        &self.model
    }
}

impl std::ops::Deref for LcModel {
    type Target = CoefficientModel;

    fn deref(&self) -> &CoefficientModel {
        &self.model
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn model_a() -> CoefficientModel {
        CoefficientModel::power(2.0, 1).unwrap()
    }

    #[test]
    fn power_model_values() {
        let m = model_a();
        let a: Vec<f64> = (0..4).map(|n| m.a(n)).collect();
        assert_eq!(a, vec![1.0, 4.0, 9.0, 16.0]);
        assert_eq!(m.b(3), 0.0);
    }

    #[test]
    fn geometric_model_values() {
        let m = CoefficientModel::geometric(2.0).unwrap();
        let a: Vec<f64> = (0..4).map(|n| m.a(n)).collect();
        assert_eq!(a, vec![1.0, 2.0, 4.0, 8.0]);
        assert_relative_eq!(m.limits().alpha_inf, 2f64.sqrt());
        for n in 1..50 {
            assert_eq!(m.k(n), Some(1.0));
        }
    }

    #[test]
    fn constant_beta_inverts_definition() {
        let m = model_a().with_diagonal(Diagonal::ConstantBeta(0.5)).unwrap();
        for n in 1..20 {
            let expected = -2.0 * 0.5 * (m.a(n - 1) * m.a(n)).sqrt();
            assert_relative_eq!(m.b(n), expected);
            let beta = -m.b(n) / (2.0 * (m.a(n - 1) * m.a(n)).sqrt());
            assert_relative_eq!(beta, 0.5, epsilon = 1e-15);
            assert_relative_eq!(m.theta(n).unwrap(), PI / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_diagonal_phases() {
        let m = model_a();
        for n in 1..200 {
            assert_eq!(m.beta(n), 0.0);
            assert_eq!(m.theta(n), Some(FRAC_PI_2));
            assert_relative_eq!(m.phi(n), n as f64 * FRAC_PI_2, max_relative = 1e-15);
        }
    }

    #[test]
    fn k_one_for_model_a() {
        assert_relative_eq!(model_a().k(1).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CoefficientModel::power(0.0, 1).is_err());
        assert!(CoefficientModel::power(2.0, 0).is_err());
        assert!(CoefficientModel::geometric(1.0).is_err());
        match CoefficientModel::tabulated(vec![1.0, 2.0, -3.0, 4.0]) {
            Err(Error::NonPositiveCoefficient { index, value }) => {
                assert_eq!(index, 2);
                assert_eq!(value, -3.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tabulated_rejects_out_of_range() {
        let m = CoefficientModel::tabulated((0..10).map(|n| (n as f64 + 1.0).powi(2)).collect()).unwrap();
        assert!(m.require(9).is_ok());
        assert!(matches!(m.require(10), Err(Error::IndexBeyondTable { index: 10, max: 9 })));
        assert!(matches!(classify(&m, 64, 1e-3), Err(Error::IndexBeyondTable { .. })));
    }

    #[test]
    fn phase_skips_large_beta() {
        let b = vec![0.0, -10.0, 0.0, 0.0, 0.0, 0.0];
        let m = CoefficientModel::tabulated(vec![1.0; 6])
            .unwrap()
            .with_diagonal(Diagonal::Tabulated(b))
            .unwrap();
        // β_1 = 5 is skipped.
        assert_eq!(m.theta(1), None);
        assert_eq!(m.phase_skips(4), 1);
        assert_relative_eq!(m.phi(4), 3.0 * FRAC_PI_2);
    }

    #[test]
    fn classify_examples() {
        let lc = classify(&model_a(), 1000, 1e-3).unwrap();
        assert_eq!(lc.classification, Classification::LcCandidate);

        let harmonic = CoefficientModel::power(1.0, 1).unwrap();
        let lp = classify(&harmonic, 1000, 1e-3).unwrap();
        assert_eq!(lp.classification, Classification::LpCarleman);
        assert!(lp.carleman_divergent.value);

        let big_beta = model_a().with_diagonal(Diagonal::ConstantBeta(1.5)).unwrap();
        let r = classify(&big_beta, 1000, 1e-3).unwrap();
        assert_eq!(r.classification, Classification::LpLargeBeta);

        let crit = model_a().with_diagonal(Diagonal::ConstantBeta(1.0)).unwrap();
        assert_eq!(classify(&crit, 1000, 1e-3).unwrap().classification, Classification::Critical);
    }

    #[test]
    fn classify_is_deterministic() {
        let m = CoefficientModel::geometric(2.0).unwrap();
        assert_eq!(classify(&m, 500, 1e-3).unwrap(), classify(&m, 500, 1e-3).unwrap());
    }

    #[test]
    fn carleman_tail_power_law() {
        // Σ_{m≥n} (m+1)^{-2} ≈ 1/(n + 1/2).
        let m = model_a();
        for n in [64usize, 1024, 8192] {
            let expected = 1.0 / (n as f64 + 0.5);
            assert_relative_eq!(m.carleman_tail(n), expected, max_relative = 2e-3);
        }
    }
}
