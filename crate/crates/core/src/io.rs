//! Model descriptor files.
//!
//! A descriptor is a TOML document:
//!
//! ```toml
//! kind = "power"          # power | geometric | tabulated
//! p = 2.0                 # power: exponent, p > 0
//! shift = 1               # power: a_n = (n + shift)^p, shift >= 1 (default 1)
//! # x = 2.0               # geometric: a_n = x^n, x > 1
//! # table = "a.csv"       # tabulated: CSV of (index, value), relative to the file
//!
//! b_spec = "constant_beta" # zero | constant_beta | tabulated (default zero)
//! beta = 0.5               # constant_beta: b_n = -2 beta sqrt(a_{n-1} a_n)
//! # b_table = "b.csv"      # tabulated diagonal
//! ```
//!
//! Coefficient tables hold one `index,value` row per entry, indices
//! contiguous from 0; a non-numeric first row is taken as a header.

use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::coefficients::{CoefficientModel, Diagonal};
use crate::error::{Error, Result};

/// Off-diagonal family of a descriptor.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KindSpec {
    Power { p: f64, shift: u32 },
    Geometric { x: f64 },
    Tabulated { table: PathBuf },
}

/// Diagonal of a descriptor.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "b_spec", rename_all = "snake_case")]
pub enum BSpec {
    Zero,
    ConstantBeta { beta: f64 },
    Tabulated { b_table: PathBuf },
}

/// A parsed descriptor; table paths are already resolved against the file's
/// directory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelDescriptor {
    pub kind: KindSpec,
    pub b_spec: BSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    kind: Spanned<String>,
    p: Option<Spanned<f64>>,
    x: Option<Spanned<f64>>,
    shift: Option<Spanned<i64>>,
    table: Option<Spanned<String>>,
    b_spec: Option<Spanned<String>>,
    beta: Option<Spanned<f64>>,
    b_table: Option<Spanned<String>>,
}

struct Source<'a> {
    label: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn line_of(&self, offset: usize) -> usize {
        let end = offset.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    /// The key assigned on the line containing `offset`, if any.
    fn key_at(&self, offset: usize) -> String {
        let line = self.line_of(offset);
        self.text
            .lines()
            .nth(line - 1)
            .map(|l| match l.split_once('=') {
                Some((k, _)) => k.trim().to_string(),
                // A table header such as `[name]`.
                None => l.trim().trim_start_matches('[').trim_end_matches(']').trim().to_string(),
            })
            .unwrap_or_default()
    }

    fn error(&self, span: Range<usize>, field: &str, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.label.to_string(),
            line: self.line_of(span.start),
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn missing(&self, field: &str, kind: &Spanned<String>) -> Error {
        self.error(kind.span(), field, format!("required for kind `{}`", kind.get_ref()))
    }
}

impl ModelDescriptor {
    /// Reads and parses a descriptor file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, &path.display().to_string(), base)
    }

    /// Parses descriptor text; `label` names the source in errors and
    /// `base` anchors relative table paths.
    pub fn parse(text: &str, label: &str, base: &Path) -> Result<Self> {
        let src = Source { label, text };
        let raw: Raw = toml::from_str(text).map_err(|e| {
            let span = e.span().unwrap_or(0..0);
            let field = src.key_at(span.start);
            src.error(span, &field, e.message())
        })?;

        let kind = match raw.kind.get_ref().as_str() {
            "power" => {
                let p = raw.p.as_ref().ok_or_else(|| src.missing("p", &raw.kind))?;
                if !(*p.get_ref() > 0.0 && p.get_ref().is_finite()) {
                    return Err(src.error(p.span(), "p", "must be positive"));
                }
                let shift = match &raw.shift {
                    None => 1,
                    Some(s) => match u32::try_from(*s.get_ref()) {
                        Ok(v) if v >= 1 => v,
                        _ => return Err(src.error(s.span(), "shift", "must be an integer >= 1")),
                    },
                };
                KindSpec::Power { p: *p.get_ref(), shift }
            }
            "geometric" => {
                let x = raw.x.as_ref().ok_or_else(|| src.missing("x", &raw.kind))?;
                if !(*x.get_ref() > 1.0 && x.get_ref().is_finite()) {
                    return Err(src.error(x.span(), "x", "must exceed 1"));
                }
                KindSpec::Geometric { x: *x.get_ref() }
            }
            "tabulated" => {
                let t = raw.table.as_ref().ok_or_else(|| src.missing("table", &raw.kind))?;
                KindSpec::Tabulated {
                    table: base.join(t.get_ref()),
                }
            }
            other => {
                return Err(src.error(
                    raw.kind.span(),
                    "kind",
                    format!("unknown kind `{other}`; expected power, geometric or tabulated"),
                ))
            }
        };

        // Fields that belong to another kind are rejected rather than ignored.
        let stray = [
            ("p", raw.p.as_ref().map(|v| v.span()), matches!(kind, KindSpec::Power { .. })),
            ("shift", raw.shift.as_ref().map(|v| v.span()), matches!(kind, KindSpec::Power { .. })),
            ("x", raw.x.as_ref().map(|v| v.span()), matches!(kind, KindSpec::Geometric { .. })),
            ("table", raw.table.as_ref().map(|v| v.span()), matches!(kind, KindSpec::Tabulated { .. })),
        ];
        for (field, span, allowed) in stray {
            if let (Some(span), false) = (span, allowed) {
                return Err(src.error(span, field, format!("not used by kind `{}`", raw.kind.get_ref())));
            }
        }

        let b_name = raw.b_spec.as_ref().map(|s| s.get_ref().as_str()).unwrap_or("zero");
        let b_span = raw.b_spec.as_ref().map(|s| s.span()).unwrap_or(0..0);
        let b_spec = match b_name {
            "zero" => BSpec::Zero,
            "constant_beta" => {
                let beta = raw
                    .beta
                    .as_ref()
                    .ok_or_else(|| src.error(b_span.clone(), "beta", "required for b_spec `constant_beta`"))?;
                if !beta.get_ref().is_finite() {
                    return Err(src.error(beta.span(), "beta", "must be finite"));
                }
                BSpec::ConstantBeta { beta: *beta.get_ref() }
            }
            "tabulated" => {
                let t = raw
                    .b_table
                    .as_ref()
                    .ok_or_else(|| src.error(b_span.clone(), "b_table", "required for b_spec `tabulated`"))?;
                BSpec::Tabulated {
                    b_table: base.join(t.get_ref()),
                }
            }
            other => {
                return Err(src.error(
                    b_span,
                    "b_spec",
                    format!("unknown b_spec `{other}`; expected zero, constant_beta or tabulated"),
                ))
            }
        };
        if let (Some(beta), false) = (&raw.beta, matches!(b_spec, BSpec::ConstantBeta { .. })) {
            return Err(src.error(beta.span(), "beta", format!("not used by b_spec `{b_name}`")));
        }
        if let (Some(t), false) = (&raw.b_table, matches!(b_spec, BSpec::Tabulated { .. })) {
            return Err(src.error(t.span(), "b_table", format!("not used by b_spec `{b_name}`")));
        }
        Ok(Self { kind, b_spec })
    }

    /// Builds the coefficient model, reading any tables.
    pub fn build(&self) -> Result<CoefficientModel> {
        let model = match &self.kind {
            KindSpec::Power { p, shift } => CoefficientModel::power(*p, *shift)?,
            KindSpec::Geometric { x } => CoefficientModel::geometric(*x)?,
            KindSpec::Tabulated { table } => CoefficientModel::tabulated(read_table(table)?)?,
        };
        let diag = match &self.b_spec {
            BSpec::Zero => Diagonal::Zero,
            BSpec::ConstantBeta { beta } => Diagonal::ConstantBeta(*beta),
            BSpec::Tabulated { b_table } => Diagonal::Tabulated(read_table(b_table)?),
        };
        model.with_diagonal(diag)
    }
}

/// Loads a descriptor file and builds its model.
pub fn load_model(path: impl AsRef<Path>) -> Result<CoefficientModel> {
    ModelDescriptor::load(path)?.build()
}

/// Reads an `index,value` table with contiguous indices from 0.
pub fn read_table(path: &Path) -> Result<Vec<f64>> {
    let label = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        let err = |field: &str, message: String| Error::Parse {
            path: label.clone(),
            line,
            field: field.to_string(),
            message,
        };
        if record.len() != 2 {
            return Err(err("row", format!("expected 2 columns, found {}", record.len())));
        }
        let index = match record[0].parse::<usize>() {
            Ok(v) => v,
            // A non-numeric first row is a header.
            Err(_) if values.is_empty() && record[0].parse::<f64>().is_err() => continue,
            Err(_) => return Err(err("index", format!("`{}` is not a non-negative integer", &record[0]))),
        };
        if index != values.len() {
            return Err(err("index", format!("expected index {}, found {index}", values.len())));
        }
        let value = record[1]
            .parse::<f64>()
            .map_err(|_| err("value", format!("`{}` is not a number", &record[1])))?;
        if !value.is_finite() {
            return Err(err("value", format!("`{}` is not finite", &record[1])));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            path: label,
            line: 0,
            field: "table".into(),
            message: "no rows".into(),
        });
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ModelDescriptor> {
        ModelDescriptor::parse(text, "model.toml", Path::new("/data"))
    }

    fn parse_err(text: &str) -> (usize, String) {
        match parse(text) {
            Err(Error::Parse { line, field, .. }) => (line, field),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn power_with_constant_beta() {
        let d = parse("kind = \"power\"\np = 2\nshift = 1\nb_spec = \"constant_beta\"\nbeta = 0.5\n").unwrap();
        assert_eq!(d.kind, KindSpec::Power { p: 2.0, shift: 1 });
        assert_eq!(d.b_spec, BSpec::ConstantBeta { beta: 0.5 });
        let m = d.build().unwrap();
        assert_eq!(m.a(2), 9.0);
        assert!((m.beta(3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn defaults_and_paths() {
        let d = parse("kind = \"power\"\np = 1.5\n").unwrap();
        assert_eq!(d.kind, KindSpec::Power { p: 1.5, shift: 1 });
        assert_eq!(d.b_spec, BSpec::Zero);
        let d = parse("kind = \"tabulated\"\ntable = \"a.csv\"\n").unwrap();
        assert_eq!(
            d.kind,
            KindSpec::Tabulated {
                table: PathBuf::from("/data/a.csv")
            }
        );
    }

    #[test]
    fn errors_carry_line_and_field() {
        assert_eq!(parse_err("kind = \"power\"\np = -1\n"), (2, "p".into()));
        assert_eq!(parse_err("kind = \"power\"\n\np = \"two\"\n"), (3, "p".into()));
        assert_eq!(parse_err("kind = \"cubic\"\n"), (1, "kind".into()));
        assert_eq!(parse_err("kind = \"geometric\"\nx = 2\nshift = 1\n"), (3, "shift".into()));
        assert_eq!(parse_err("kind = \"geometric\"\nx = 2\ncolour = 1\n").1, "colour");
        assert_eq!(parse_err("kind = \"power\"\np = 2\nb_spec = \"constant_beta\"\n").1, "beta");
        assert_eq!(parse_err("kind = \"geometric\"\n").1, "x");
    }
}
