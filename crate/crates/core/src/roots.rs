//! Real root finding by grid scanning and bracketed refinement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Roots found in a window, with scan warnings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RootScan {
    pub roots: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Scan parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanParams {
    pub lo: f64,
    pub hi: f64,
    pub grid: f64,
    /// Absolute bisection tolerance on the root location.
    pub xtol: f64,
}

impl ScanParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidParameter(format!("window [{}, {}] is empty", self.lo, self.hi)));
        }
        if !(self.grid > 0.0) || !(self.xtol > 0.0) {
            return Err(Error::InvalidParameter("grid step and tolerance must be positive".into()));
        }
        Ok(())
    }

    fn nodes(&self) -> Vec<f64> {
        let steps = ((self.hi - self.lo) / self.grid).ceil() as usize;
        (0..=steps)
            .map(|i| if i == steps { self.hi } else { self.lo + i as f64 * self.grid })
            .collect()
    }
}

/// Finds the real roots of `fine` in the window.
///
/// `coarse` is a cheap approximation used for the sign-change scan; each
/// bracket is then bisected with `fine`. Both must be real-valued.
pub fn scan<C, F>(params: &ScanParams, coarse: C, fine: F) -> Result<RootScan>
where
    C: Fn(f64) -> Result<f64> + Sync,
    F: Fn(f64) -> Result<f64>,
{
    params.validate()?;
    let xs = params.nodes();
    let ys: Vec<f64> = xs.par_iter().map(|&x| coarse(x)).collect::<Result<_>>()?;
    let mut out = RootScan::default();

    let mut brackets = Vec::new();
    for i in 0..xs.len() {
        if ys[i] == 0.0 {
            brackets.push((xs[i], xs[i]));
            continue;
        }
        if i + 1 < xs.len() && ys[i + 1] != 0.0 && ys[i].signum() != ys[i + 1].signum() {
            brackets.push((xs[i], xs[i + 1]));
        }
        // A dip towards zero without a sign change may hide a pair of roots.
        if i >= 1 && i + 1 < xs.len() {
            let (l, m, r) = (ys[i - 1], ys[i], ys[i + 1]);
            if l.signum() == m.signum() && m.signum() == r.signum() && m.abs() < l.abs() && m.abs() < r.abs() {
                let depth = m.abs() / l.abs().min(r.abs());
                if depth < 0.25 {
                    out.warnings.push(format!(
                        "possible double root near {:.6}; refine the grid below {}",
                        xs[i],
                        params.grid / 2.0
                    ));
                }
            }
        }
    }

    for (a, b) in brackets {
        let root = if a == b {
            if fine(a)? == 0.0 {
                Some(a)
            } else {
                refine(&fine, a - params.grid / 2.0, a + params.grid / 2.0, params.xtol)?
            }
        } else {
            match refine(&fine, a, b, params.xtol)? {
                Some(x) => Some(x),
                None => refine(&fine, a - params.grid / 2.0, b + params.grid / 2.0, params.xtol)?,
            }
        };
        match root {
            Some(x) if x >= params.lo && x <= params.hi => {
                if out.roots.last().is_none_or(|&last| x - last > params.xtol) {
                    out.roots.push(x);
                }
            }
            Some(_) => {}
            None => out
                .warnings
                .push(format!("sign change in [{a:.6}, {b:.6}] lost after refinement")),
        }
    }
    Ok(out)
}

/// Bracketing refinement on `[a, b]` to width `xtol`; `None` if `f` does
/// not change sign there.
///
/// Regula falsi with the Illinois modification and a bisection fallback when
/// the bracket fails to halve. Once two successive estimates agree to `xtol`,
/// a probe one tolerance towards the far end closes the bracket, since the
/// secant steps tend to approach the root from one side only.
pub fn refine<F>(f: &F, a: f64, b: f64, xtol: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    // Side moved last: -1 for a, 1 for b.
    let mut last = 0i8;
    let mut width = b - a;
    let mut prev = f64::NAN;
    while b - a > xtol {
        let secant = b - fb * (b - a) / (fb - fa);
        let mut m = if secant > a && secant < b { secant } else { 0.5 * (a + b) };
        if (m - prev).abs() < xtol {
            // Probe past the estimate, away from the side it came from.
            let probe = if m - a < b - m { m + 0.5 * xtol } else { m - 0.5 * xtol };
            if probe > a && probe < b {
                m = probe;
            }
        }
        prev = m;
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(Some(m));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
            if last == -1 {
                fb *= 0.5;
            }
            last = -1;
        } else {
            b = m;
            fb = fm;
            if last == 1 {
                fa *= 0.5;
            }
            last = 1;
        }
        if b - a > 0.5 * width && b - a > xtol {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fmid = f(mid)?;
            if fmid == 0.0 {
                return Ok(Some(mid));
            }
            if fmid.signum() == fa.signum() {
                a = mid;
                fa = fmid;
            } else {
                b = mid;
                fb = fmid;
            }
            last = 0;
        }
        width = b - a;
    }
    Ok(Some(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lo: f64, hi: f64) -> ScanParams {
        ScanParams {
            lo,
            hi,
            grid: 0.05,
            xtol: 1e-12,
        }
    }

    #[test]
    fn finds_sine_roots() {
        let f = |x: f64| Ok(x.sin());
        let r = scan(&params(-7.0, 7.0), f, f).unwrap();
        let expected = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| k * std::f64::consts::PI);
        assert_eq!(r.roots.len(), 5);
        for (x, e) in r.roots.iter().zip(expected) {
            assert!((x - e).abs() < 1e-11);
        }
    }

    #[test]
    fn exact_zero_on_grid() {
        let f = |x: f64| Ok(x * (x - 1.0));
        let r = scan(&params(-1.0, 2.0), f, f).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!(r.roots[0].abs() < 1e-12 && (r.roots[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flags_near_double_root() {
        let f = |x: f64| Ok((x - 0.512).powi(2) + 1e-9);
        let r = scan(&params(0.0, 1.0), f, f).unwrap();
        assert!(r.roots.is_empty());
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn empty_window_rejected() {
        let f = |x: f64| Ok(x);
        assert!(scan(&params(1.0, 1.0), f, f).is_err());
    }
}
