//! Command-line front end and the `verify` identity suite.
//!
//! Every data record carries `schema: 1`. JSON-lines output writes one
//! object per line; CSV output writes one header row followed by data rows.
//! Run metadata (arguments, timing) goes to a `<out>.meta.json` sidecar so the
//! data files are byte-stable.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::coefficients::{classify, LcModel};
use crate::error::{Error, Result};
use crate::extensions::{
    compare_moments, eigenvalues, gamma_t, moments, spectral_measure, ExtensionParamT, SpectralConfig,
};
use crate::io::ModelDescriptor;
use crate::jost::{
    gamma_omega, green_pairing, modulus_identity, omega_eigenvalues, scattering_at, BoundaryMap, ExtensionParamOmega,
    JostConfig,
};
use crate::polynomials::{eval_pq, fmt_f64};
use crate::quasiresolvent::QuasiResolvent;
use crate::series::Support;

/// Version of the record layout written by every command.
pub const SCHEMA: u32 = 1;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "LCJ_THREADS";

/// Half-width of the window whose atoms enter the moment comparison.
pub const MOMENT_WINDOW: f64 = 100.0;

/// Highest moment order compared by `moments` and `verify`.
pub const MOMENT_ORDER: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    Polys,
    Gamma,
    Eigs,
    Measure,
    Moments,
    Jost,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    JsonLines,
    Csv,
}

/// A `RE,IM[;RE,IM...]` list of points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZList(pub Vec<Complex64>);

/// A `LO,HI` window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window(pub f64, pub f64);

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("`{s}`: expected RE,IM"))?;
    let re = re.trim().parse::<f64>().map_err(|e| format!("`{re}`: {e}"))?;
    let im = im.trim().parse::<f64>().map_err(|e| format!("`{im}`: {e}"))?;
    Ok(Complex64::new(re, im))
}

impl FromStr for ZList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let points = s
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(parse_complex)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if points.is_empty() {
            return Err("empty point list".into());
        }
        Ok(Self(points))
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let c = parse_complex(s)?;
        if !(c.re < c.im) {
            return Err(format!("window [{}, {}] is empty", c.re, c.im));
        }
        Ok(Self(c.re, c.im))
    }
}

/// One invocation of the tool.
#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "lc-jacobi", version, about = "Spectral toolkit for limit-circle Jacobi matrices")]
pub struct RunConfig {
    /// Model descriptor (TOML).
    #[arg(long = "model", value_name = "PATH")]
    pub model_path: PathBuf,

    #[arg(long, value_enum)]
    pub command: Command,

    /// Evaluation points, `RE,IM[;RE,IM...]`.
    #[arg(long = "z", value_name = "RE,IM[;RE,IM...]", allow_hyphen_values = true)]
    pub z_list: Option<ZList>,

    /// Real window for spectra and measures.
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    pub window: Option<Window>,

    /// Nevanlinna parameter, a real number or `inf`.
    #[arg(long, value_name = "VAL|inf", allow_hyphen_values = true, conflicts_with = "omega")]
    pub t: Option<ExtensionParamT>,

    /// Unimodular boundary parameter.
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true, value_parser = parse_complex)]
    pub omega: Option<Complex64>,

    /// Truncation size for polynomial tables, moments and the identity suite.
    #[arg(long = "N", value_name = "INT", default_value_t = 400)]
    pub n: usize,

    /// Root-location tolerance for spectra, accuracy target for γ and Jost data.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    /// Grid step of the spectral sign-change scan.
    #[arg(long, default_value_t = 0.05)]
    pub grid: f64,

    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json-lines")]
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("--tol must be positive".into()));
        }
        if !(self.grid > 0.0) {
            return Err(Error::InvalidParameter("--grid must be positive".into()));
        }
        if self.n < 8 {
            return Err(Error::InvalidParameter("--N must be at least 8".into()));
        }
        if self.t.is_some() && self.omega.is_some() {
            return Err(Error::InvalidParameter("give at most one of --t and --omega".into()));
        }
        Ok(())
    }

    fn window(&self) -> (f64, f64) {
        self.window.map_or((-20.0, 20.0), |w| (w.0, w.1))
    }

    fn spectral(&self) -> SpectralConfig {
        let (lo, hi) = self.window();
        SpectralConfig {
            grid: self.grid,
            tol: self.tol,
            ..SpectralConfig::default().with_window(lo, hi)
        }
    }

    fn jost(&self) -> JostConfig {
        JostConfig::default().with_tol(self.tol)
    }

    fn points(&self) -> Result<&[Complex64]> {
        self.z_list
            .as_ref()
            .map(|z| z.0.as_slice())
            .ok_or_else(|| Error::InvalidParameter(format!("{} requires --z", self.command.name())))
    }

    fn omega(&self) -> Result<Option<ExtensionParamOmega>> {
        self.omega.map(ExtensionParamOmega::new).transpose()
    }

    fn require_t(&self) -> Result<ExtensionParamT> {
        self.t
            .ok_or_else(|| Error::InvalidParameter(format!("{} requires --t", self.command.name())))
    }
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Polys => "polys",
            Command::Gamma => "gamma",
            Command::Eigs => "eigs",
            Command::Measure => "measure",
            Command::Moments => "moments",
            Command::Jost => "jost",
            Command::Verify => "verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Output stream in the configured format.
enum Sink<W: Write> {
    Json(W),
    Csv(csv::Writer<W>, bool),
}

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    payload: T,
}

impl<W: Write> Sink<W> {
    fn new(out: W, format: Format) -> Self {
        match format {
            Format::JsonLines => Sink::Json(out),
            Format::Csv => Sink::Csv(csv::Writer::from_writer(out), false),
        }
    }

    /// Writes a record; `header` and `row` describe it in CSV.
    fn write<T: Serialize>(&mut self, command: Command, payload: T, header: &[&str], row: Vec<String>) -> Result<()> {
        match self {
            Sink::Json(w) => {
                let record = Record {
                    schema: SCHEMA,
                    command: command.name(),
                    payload,
                };
                serde_json::to_writer(&mut *w, &record)?;
                w.write_all(b"\n")?;
            }
            Sink::Csv(w, started) => {
                if !*started {
                    let mut head = vec!["schema"];
                    head.extend_from_slice(header);
                    w.write_record(&head)?;
                    *started = true;
                }
                let mut full = vec![SCHEMA.to_string()];
                full.extend(row);
                w.write_record(&full)?;
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        match self {
            Sink::Json(mut w) => w.flush()?,
            Sink::Csv(mut w, _) => w.flush()?,
        }
        Ok(())
    }
}

fn c_cols(z: Complex64) -> [String; 2] {
    [fmt_f64(z.re), fmt_f64(z.im)]
}

fn row<const K: usize>(parts: impl IntoIterator<Item = [String; K]>) -> Vec<String> {
    parts.into_iter().flatten().collect()
}

/// Result of one identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub z: Option<Complex64>,
    /// Extension parameter the check ran at, if any.
    pub param: Option<String>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Error message when the check could not be evaluated.
    pub error: Option<String>,
}

impl Check {
    fn new(check: &str, z: Option<Complex64>, param: Option<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            z,
            param,
            residual,
            tolerance,
            pass: residual < tolerance,
            error: None,
        }
    }

    fn from_result(check: &str, z: Option<Complex64>, param: Option<String>, r: std::result::Result<f64, String>, tolerance: f64) -> Self {
        match r {
            Ok(residual) => Self::new(check, z, param, residual, tolerance),
            Err(e) => Self {
                error: Some(e),
                ..Self::new(check, z, param, f64::NAN, tolerance)
            },
        }
    }
}

/// Tolerances of the identity suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyTolerances {
    pub wronskian: f64,
    pub quasiresolvent: f64,
    pub gamma_symmetry: f64,
    pub jost: f64,
    pub green: f64,
    pub moments: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            wronskian: 1e-10,
            quasiresolvent: 1e-8,
            gamma_symmetry: 1e-10,
            jost: 1e-6,
            green: 1e-6,
            moments: 1e-3,
        }
    }
}

/// Settings of the identity suite.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub points: Vec<Complex64>,
    pub n: usize,
    /// Accuracy target for `γ_t` and the Jost solutions.
    pub tol: f64,
    pub grid: f64,
    pub tolerances: VerifyTolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            points: vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0)],
            n: 400,
            tol: 1e-8,
            grid: 0.05,
            tolerances: VerifyTolerances::default(),
        }
    }
}

/// A fixed finitely supported test vector of length `len`.
fn probe_vector(len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|n| Complex64::new(1.0 / (n as f64 + 1.0), if n % 2 == 0 { 0.5 } else { -0.25 } / (n as f64 + 2.0)))
        .collect()
}

/// Runs the identity suite: polynomial Wronskians, the quasiresolvent
/// residual, symmetry and sign of `γ_t`, the Jost Wronskian, the `σ/τ`
/// determinant and modulus identities, the Green pairing, and moment
/// invariance across `t ∈ {0, 1, ∞}`.
pub fn verify_suite(model: &LcModel, cfg: &VerifyConfig) -> Vec<Check> {
    let tol = cfg.tolerances;
    let ts = [ExtensionParamT::Finite(0.0), ExtensionParamT::Finite(1.0), ExtensionParamT::Infinite];
    let mut out = Vec::new();
    for &z in &cfg.points {
        let table = eval_pq(model, z, cfg.n);
        out.push(Check::from_result(
            "wronskian_pq",
            Some(z),
            None,
            table.as_ref().map(|t| t.wronskian_deviation(model)).map_err(clone_err),
            tol.wronskian,
        ));

        let residual = table.as_ref().map_err(clone_err).and_then(|t| {
            let r = QuasiResolvent::from_table(model, t, cfg.n);
            r.scaled_residual(&probe_vector(cfg.n / 4)).map_err(|e| e.to_string())
        });
        out.push(Check::from_result("quasiresolvent_residual", Some(z), None, residual, tol.quasiresolvent));

        for t in ts {
            let pair = gamma_t(model, z, t, cfg.tol).and_then(|g| Ok((g, gamma_t(model, z.conj(), t, cfg.tol)?)));
            let sym = pair.as_ref().map(|(g, gc)| (gc - g.conj()).norm() / g.norm().max(1.0)).map_err(clone_err);
            out.push(Check::from_result("gamma_symmetry", Some(z), Some(t.to_string()), sym, tol.gamma_symmetry));
            // Herglotz: Im γ_t has the sign of Im z. Residual is the wrong-sign part.
            let sign = pair
                .map(|(g, _)| (-g.im * z.im.signum()).max(0.0) + if g.im == 0.0 { 1.0 } else { 0.0 })
                .map_err(|e| e.to_string());
            out.push(Check::from_result("herglotz", Some(z), Some(t.to_string()), sign, 0.5));
        }

        match scattering_at(model, z, &JostConfig::default().with_tol(cfg.tol)) {
            Ok((jost, sc)) => {
                out.push(Check::new("jost_wronskian", Some(z), None, jost.wronskian_deviation, tol.jost));
                out.push(Check::new("scattering_determinant", Some(z), None, (sc.determinant() - 1.0).norm(), tol.jost));
                let modulus = modulus_identity(model, &sc, jost.n_start).map(|(l, r)| (l - r).abs() / r.abs().max(f64::MIN_POSITIVE));
                out.push(Check::from_result("modulus_identity", Some(z), None, modulus.map_err(|e| e.to_string()), tol.jost));
                let map = BoundaryMap::from_coeffs(model, sc);
                let pairing = eval_pq(model, z, jost.n_start).and_then(|t| green_pairing(&map, &t.p, &t.p, Support::SquareSummable));
                out.push(Check::from_result("green_pairing", Some(z), None, pairing.map(|g| g.deviation).map_err(|e| e.to_string()), tol.green));
            }
            Err(e) => {
                for name in ["jost_wronskian", "scattering_determinant", "modulus_identity", "green_pairing"] {
                    out.push(Check::from_result(name, Some(z), None, Err(clone_err(&e)), tol.jost));
                }
            }
        }
    }

    // Moment sums need 1e-3, well within the unpolished root accuracy.
    let spectral = SpectralConfig {
        grid: cfg.grid,
        polish: false,
        ..SpectralConfig::default().with_window(-MOMENT_WINDOW, MOMENT_WINDOW)
    };
    for t in ts {
        let worst = spectral_measure(model, t, &spectral)
            .and_then(|m| compare_moments(model, &m, MOMENT_ORDER, cfg.n))
            .map(|c| c.iter().map(|c| c.relative).fold(0.0, f64::max))
            .map_err(|e| e.to_string());
        out.push(Check::from_result("moment_invariance", None, Some(t.to_string()), worst, tol.moments));
    }
    out
}

fn clone_err(e: &Error) -> String {
    e.to_string()
}

/// Executes a parsed configuration, writing records to `out`. Returns
/// `false` when a `verify` check failed.
pub fn run_to<W: Write>(cfg: &RunConfig, out: W) -> Result<bool> {
    cfg.validate()?;
    let descriptor = ModelDescriptor::load(&cfg.model_path)?;
    let raw = descriptor.build()?;
    let mut sink = Sink::new(out, cfg.format);
    let cmd = cfg.command;
    let mut pass = true;

    // Classification works on any model; the rest require a limit-circle one.
    if cmd == Command::Classify {
        // `--tol` is an accuracy target; convergence is judged with the
        // threshold the limit-circle gate uses.
        let report = classify(&raw, cfg.n.max(32), LcModel::DEFAULT_TOL)?;
        let header = [
            "horizon",
            "classification",
            "carleman_sum_partial",
            "carleman_converged",
            "beta_inf_estimate",
            "alpha_inf_estimate",
            "beta_excursions",
        ];
        let r = vec![
            report.horizon.to_string(),
            report.classification.as_str().to_string(),
            fmt_f64(report.carleman_sum_partial),
            report.carleman_converged.to_string(),
            fmt_f64(report.beta_inf_estimate),
            fmt_f64(report.alpha_inf_estimate),
            report.beta_excursions.to_string(),
        ];
        sink.write(cmd, &report, &header, r)?;
        sink.finish()?;
        return Ok(true);
    }

    let model = LcModel::new(raw)?;
    match cmd {
        Command::Classify => unreachable!(),
        Command::Polys => {
            #[derive(Serialize)]
            struct Payload<'a> {
                z: Complex64,
                n: usize,
                p: &'a [Complex64],
                q: &'a [Complex64],
                tail_indicator: f64,
                wronskian_deviation: f64,
            }
            for &z in cfg.points()? {
                let table = eval_pq(&model, z, cfg.n)?;
                match &mut sink {
                    Sink::Json(_) => sink.write(
                        cmd,
                        Payload {
                            z,
                            n: table.n,
                            p: &table.p,
                            q: &table.q,
                            tail_indicator: table.tail_indicator,
                            wronskian_deviation: table.wronskian_deviation(&model),
                        },
                        &[],
                        vec![],
                    )?,
                    Sink::Csv(..) => {
                        for (n, (p, q)) in table.p.iter().zip(&table.q).enumerate() {
                            let mut r = row([c_cols(z)]);
                            r.push(n.to_string());
                            r.extend(row([c_cols(*p), c_cols(*q)]));
                            sink.write(cmd, (), &["re_z", "im_z", "n", "re_p", "im_p", "re_q", "im_q"], r)?;
                        }
                    }
                }
            }
        }
        Command::Gamma => {
            #[derive(Serialize)]
            struct Payload {
                z: Complex64,
                t: Option<ExtensionParamT>,
                omega: Option<ExtensionParamOmega>,
                gamma: Complex64,
            }
            let omega = cfg.omega()?;
            let t = if omega.is_none() { Some(cfg.require_t()?) } else { None };
            for &z in cfg.points()? {
                let gamma = match (t, omega) {
                    (Some(t), _) => gamma_t(&model, z, t, cfg.tol)?,
                    (None, Some(w)) => gamma_omega(&model, z, w, &cfg.jost())?,
                    (None, None) => unreachable!(),
                };
                let r = row([c_cols(z), c_cols(gamma)]);
                sink.write(cmd, Payload { z, t, omega, gamma }, &["re_z", "im_z", "re_gamma", "im_gamma"], r)?;
            }
        }
        Command::Eigs => {
            #[derive(Serialize)]
            struct Payload<'a> {
                t: Option<ExtensionParamT>,
                omega: Option<ExtensionParamOmega>,
                window: (f64, f64),
                k: usize,
                lambda: f64,
                warnings: &'a [String],
            }
            let spectral = cfg.spectral();
            let (t, omega, values, warnings) = match cfg.omega()? {
                Some(w) => {
                    let s = omega_eigenvalues(&model, w, &spectral, &cfg.jost())?;
                    (None, Some(w), s.eigenvalues, s.warnings)
                }
                None => {
                    let t = cfg.require_t()?;
                    let s = eigenvalues(&model, t, &spectral)?;
                    (Some(t), None, s.eigenvalues, s.warnings)
                }
            };
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            for (k, &lambda) in values.iter().enumerate() {
                let payload = Payload {
                    t,
                    omega,
                    window: spectral.window,
                    k,
                    lambda,
                    warnings: &warnings,
                };
                sink.write(cmd, payload, &["k", "lambda"], vec![k.to_string(), fmt_f64(lambda)])?;
            }
        }
        Command::Measure => {
            if cfg.omega.is_some() {
                return Err(Error::InvalidParameter("measure supports --t only".into()));
            }
            let m = spectral_measure(&model, cfg.require_t()?, &cfg.spectral())?;
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            match &mut sink {
                Sink::Json(_) => sink.write(cmd, &m, &[], vec![])?,
                Sink::Csv(..) => {
                    for a in &m.atoms {
                        let r = vec![
                            fmt_f64(a.lambda),
                            fmt_f64(a.mass),
                            fmt_f64(a.residual),
                            fmt_f64(a.residue_mass),
                            fmt_f64(a.mass_deviation),
                        ];
                        sink.write(cmd, (), &["lambda", "mass", "residual", "residue_mass", "mass_deviation"], r)?;
                    }
                }
            }
        }
        Command::Moments => {
            #[derive(Serialize)]
            struct Payload {
                order: usize,
                matrix: f64,
                t: Option<ExtensionParamT>,
                measure: Option<f64>,
                relative: Option<f64>,
            }
            let header = ["order", "matrix", "measure", "relative"];
            match cfg.t {
                None => {
                    for (order, s) in moments(&model, MOMENT_ORDER, cfg.n)?.into_iter().enumerate() {
                        let r = vec![order.to_string(), fmt_f64(s), String::new(), String::new()];
                        let payload = Payload {
                            order,
                            matrix: s,
                            t: None,
                            measure: None,
                            relative: None,
                        };
                        sink.write(cmd, payload, &header, r)?;
                    }
                }
                Some(t) => {
                    let m = spectral_measure(&model, t, &cfg.spectral())?;
                    for c in compare_moments(&model, &m, MOMENT_ORDER, cfg.n)? {
                        let r = vec![c.order.to_string(), fmt_f64(c.matrix), fmt_f64(c.measure), fmt_f64(c.relative)];
                        let payload = Payload {
                            order: c.order,
                            matrix: c.matrix,
                            t: Some(t),
                            measure: Some(c.measure),
                            relative: Some(c.relative),
                        };
                        sink.write(cmd, payload, &header, r)?;
                    }
                }
            }
        }
        Command::Jost => {
            #[derive(Serialize)]
            struct Payload {
                z: Complex64,
                n_start: usize,
                wronskian: Complex64,
                target: Complex64,
                wronskian_deviation: f64,
                sigma_plus: Complex64,
                sigma_minus: Complex64,
                tau_plus: Complex64,
                tau_minus: Complex64,
                determinant: Complex64,
                modulus_lhs: f64,
                modulus_rhs: f64,
            }
            let header = [
                "re_z",
                "im_z",
                "n_start",
                "re_wronskian",
                "im_wronskian",
                "wronskian_deviation",
                "re_sigma_plus",
                "im_sigma_plus",
                "re_sigma_minus",
                "im_sigma_minus",
                "re_tau_plus",
                "im_tau_plus",
                "re_tau_minus",
                "im_tau_minus",
                "re_determinant",
                "im_determinant",
                "modulus_lhs",
                "modulus_rhs",
            ];
            for &z in cfg.points()? {
                let (jost, sc) = scattering_at(&model, z, &cfg.jost())?;
                let (lhs, rhs) = modulus_identity(&model, &sc, jost.n_start)?;
                let p = Payload {
                    z,
                    n_start: jost.n_start,
                    wronskian: jost.wronskian,
                    target: jost.target,
                    wronskian_deviation: jost.wronskian_deviation,
                    sigma_plus: sc.sigma_plus,
                    sigma_minus: sc.sigma_minus,
                    tau_plus: sc.tau_plus,
                    tau_minus: sc.tau_minus,
                    determinant: sc.determinant(),
                    modulus_lhs: lhs,
                    modulus_rhs: rhs,
                };
                let mut r = row([c_cols(z)]);
                r.push(p.n_start.to_string());
                r.extend(row([c_cols(p.wronskian)]));
                r.push(fmt_f64(p.wronskian_deviation));
                r.extend(row([
                    c_cols(p.sigma_plus),
                    c_cols(p.sigma_minus),
                    c_cols(p.tau_plus),
                    c_cols(p.tau_minus),
                    c_cols(p.determinant),
                ]));
                r.extend([fmt_f64(lhs), fmt_f64(rhs)]);
                sink.write(cmd, p, &header, r)?;
            }
        }
        Command::Verify => {
            let vcfg = VerifyConfig {
                points: cfg.z_list.as_ref().map_or_else(|| VerifyConfig::default().points, |z| z.0.clone()),
                n: cfg.n,
                tol: cfg.tol,
                grid: cfg.grid,
                tolerances: VerifyTolerances::default(),
            };
            let header = ["check", "re_z", "im_z", "param", "residual", "tolerance", "pass"];
            for c in verify_suite(&model, &vcfg) {
                pass &= c.pass;
                let mut r = vec![c.check.clone()];
                r.extend(c.z.map_or([String::new(), String::new()], c_cols));
                r.push(c.param.clone().unwrap_or_default());
                r.extend([fmt_f64(c.residual), fmt_f64(c.tolerance), c.pass.to_string()]);
                sink.write(cmd, &c, &header, r)?;
            }
        }
    }
    sink.finish()?;
    Ok(pass)
}

/// Applies the thread count from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{THREADS_ENV}={value} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    threads: usize,
    started_unix_ms: u128,
    elapsed_ms: u128,
    status: &'a str,
}

/// Runs a configuration end to end; returns the process exit code:
/// 0 on success, 1 if a `verify` check failed, 2 on error.
pub fn run(cfg: &RunConfig) -> i32 {
    let started = std::time::SystemTime::now();
    let clock = std::time::Instant::now();
    let result = match &cfg.out {
        Some(path) => std::fs::File::create(path)
            .map_err(Error::from)
            .and_then(|f| run_to(cfg, std::io::BufWriter::new(f))),
        None => run_to(cfg, std::io::stdout().lock()),
    };
    let (code, status) = match &result {
        Ok(true) => (0, "ok".to_string()),
        Ok(false) => (1, "verify failed".to_string()),
        Err(e) => (2, e.to_string()),
    };
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    if let Some(path) = &cfg.out {
        let meta = Sidecar {
            schema: SCHEMA,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config: cfg,
            threads: rayon::current_num_threads(),
            started_unix_ms: started
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_millis()),
            elapsed_ms: clock.elapsed().as_millis(),
            status: &status,
        };
        let mut side = path.clone().into_os_string();
        side.push(".meta.json");
        let written = serde_json::to_vec_pretty(&meta)
            .map_err(Error::from)
            .and_then(|bytes| std::fs::write(&side, bytes).map_err(Error::from));
        if let Err(e) = written {
            eprintln!("error: sidecar: {e}");
            return 2;
        }
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let cfg = RunConfig::try_parse_from([
            "lc-jacobi",
            "--model",
            "a.toml",
            "--command",
            "eigs",
            "--window",
            "-1,1",
            "--t",
            "inf",
            "--z",
            "0,1;-1,2",
            "--N",
            "200",
        ])
        .unwrap();
        assert_eq!(cfg.command, Command::Eigs);
        assert_eq!(cfg.window, Some(Window(-1.0, 1.0)));
        assert_eq!(cfg.t, Some(ExtensionParamT::Infinite));
        assert_eq!(cfg.z_list.unwrap().0, vec![Complex64::new(0.0, 1.0), Complex64::new(-1.0, 2.0)]);
        assert_eq!(cfg.n, 200);
        assert_eq!(cfg.tol, 1e-8);
        assert_eq!(cfg.grid, 0.05);
        assert_eq!(cfg.format, Format::JsonLines);
    }

    #[test]
    fn rejects_bad_flags() {
        let base = ["lc-jacobi", "--model", "a.toml", "--command", "gamma"];
        let with = |extra: &[&str]| RunConfig::try_parse_from(base.iter().chain(extra.iter()));
        assert!(with(&["--window", "1,-1"]).is_err());
        assert!(with(&["--t", "0", "--omega", "1,0"]).is_err());
        assert!(with(&["--z", "1"]).is_err());
        assert!(with(&["--format", "xml"]).is_err());
    }
}
