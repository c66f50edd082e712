//! Run configuration: one TOML file describes one variant instance.
//!
//! ```toml
//! variant = "RSK"          # RSK | BD | OSSQM (case-insensitive)
//! p = 2                    # order, at least 2
//! alpha = [1, "-1/2", "-1/2"]  # C_λ parameters, λ = p + 1
//! # F_expr = "n"           # instead of alpha: F as an expression in n
//! # lambda = 3             # optional; must equal p + 1
//! f = ["1", "n + 1"]       # RSK: f_1 … f_p
//! # g = "1"                # BD
//! # bd_unit = true         # BD with every f_i = 1 (needs a compatible F)
//! # f_p = "1"              # OSSQM
//! # eps = ["1"]            # BD: ε_2 … ε_p, OSSQM: ε_1 … ε_{p-1}
//! D = 40                   # Fock truncation per copy
//! mode = "float"           # float | exact
//! out = "artifacts"        # optional output directory (--out wins)
//!
//! [tolerance]
//! relation = 1e-9
//! equality = 1e-12
//! ```
//!
//! Numeric parameters are exact: integers or strings such as `"-1/2"` or
//! `"0.25"`. Bare floats are rejected so nothing is silently rounded.

use std::fmt;
use std::path::{Path, PathBuf};

use parasusy_core::verifier::variant_relations;
use parasusy_core::{
    parse_expression, Coefficients, Expr, Mode, Rational, StructureSpec, Tolerances, VariantConfig,
    VariantKind,
};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Syntax(String),
    #[error("at `{path}`: {message}")]
    Key { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// An exact number as written in the config.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactNumber(pub Rational);

impl<'de> Deserialize<'de> for ExactNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExactNumber;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a string holding an exact number such as \"-1/2\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExactNumber, E> {
                Ok(ExactNumber(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExactNumber, E> {
                Ok(ExactNumber(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExactNumber, E> {
                Err(E::custom(format!(
                    "float {v} is not exact; write it as a string, e.g. \"1/2\""
                )))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<ExactNumber, E> {
                let e = parse_expression(s).map_err(|err| E::custom(format!("`{s}`: {err}")))?;
                if !e.is_constant() {
                    return Err(E::custom(format!("`{s}` depends on n")));
                }
                e.eval(0)
                    .map(ExactNumber)
                    .map_err(|err| E::custom(format!("`{s}`: {err}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Float,
    Exact,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub relation: Option<f64>,
    pub equality: Option<f64>,
}

/// The file as written, before cross-field validation.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub variant: String,
    pub p: usize,
    pub lambda: Option<usize>,
    pub alpha: Option<Vec<ExactNumber>>,
    #[serde(rename = "F_expr")]
    pub f_expr: Option<String>,
    pub f: Option<Vec<String>>,
    pub g: Option<String>,
    pub f_p: Option<String>,
    #[serde(default)]
    pub eps: Vec<String>,
    #[serde(default)]
    pub bd_unit: bool,
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default)]
    pub tolerance: ToleranceConfig,
    pub out: Option<PathBuf>,
}

/// Either `alpha` or `F_expr`, kept as written for the report header.
#[derive(Clone, Debug)]
pub enum StructureSource {
    Alpha(Vec<Rational>),
    Expr(String),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub kind: VariantKind,
    pub p: usize,
    pub lambda: usize,
    pub structure_source: StructureSource,
    /// Coefficient expressions as written, by role (`f_1`, `g`, `eps_2`, ...).
    pub coefficient_sources: Vec<(String, String)>,
    pub dim: usize,
    pub mode: Mode,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub variant: VariantConfig,
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.into(),
        source,
    })?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let value: toml::Value =
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let raw: RawConfig = serde_path_to_error::deserialize(value).map_err(|e| ConfigError::Key {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    resolve(raw)
}

fn key_err(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Key {
        path: path.into(),
        message: message.into(),
    }
}

fn expression(path: &str, text: &str) -> Result<Expr, ConfigError> {
    parse_expression(text).map_err(|e| key_err(path, format!("`{text}`: {e}")))
}

fn expressions(key: &str, texts: &[String]) -> Result<Vec<Expr>, ConfigError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| expression(&format!("{key}[{i}]"), t))
        .collect()
}

fn forbid(present: bool, key: &str, kind: VariantKind) -> Result<(), ConfigError> {
    if present {
        return Err(key_err(key, format!("not used by {kind}")));
    }
    Ok(())
}

fn resolve(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let kind: VariantKind = raw
        .variant
        .parse()
        .map_err(|e: parasusy_core::VariantError| key_err("variant", e.to_string()))?;
    let p = raw.p;
    let lambda = raw.lambda.unwrap_or(p + 1);
    if lambda != p + 1 {
        return Err(key_err(
            "lambda",
            format!("lambda = {lambda}, but p = {p} requires lambda = {}", p + 1),
        ));
    }

    let (structure, structure_source) = match (raw.alpha, raw.f_expr) {
        (Some(alpha), None) => {
            let alpha: Vec<Rational> = alpha.into_iter().map(|a| a.0).collect();
            let spec = StructureSpec::clambda(lambda, alpha.clone())
                .map_err(|e| key_err("alpha", e.to_string()))?;
            (spec, StructureSource::Alpha(alpha))
        }
        (None, Some(text)) => {
            let expr = expression("F_expr", &text)?;
            (
                StructureSpec::UserExpr { expr, lambda },
                StructureSource::Expr(text),
            )
        }
        (Some(_), Some(_)) => {
            return Err(key_err("F_expr", "give either alpha or F_expr, not both"))
        }
        (None, None) => {
            return Err(ConfigError::Invalid(
                "missing structure function: set alpha or F_expr".into(),
            ))
        }
    };

    let mut sources = Vec::new();
    let coeffs = match kind {
        VariantKind::Rsk => {
            forbid(raw.g.is_some(), "g", kind)?;
            forbid(raw.f_p.is_some(), "f_p", kind)?;
            forbid(raw.bd_unit, "bd_unit", kind)?;
            forbid(!raw.eps.is_empty(), "eps", kind)?;
            let f = raw
                .f
                .ok_or_else(|| key_err("f", "RSK needs f = [f_1, ..., f_p]"))?;
            sources.extend(
                f.iter()
                    .enumerate()
                    .map(|(i, t)| (format!("f_{}", i + 1), t.clone())),
            );
            Coefficients::Rsk {
                f: expressions("f", &f)?,
            }
        }
        VariantKind::Bd => {
            forbid(raw.f.is_some(), "f", kind)?;
            forbid(raw.f_p.is_some(), "f_p", kind)?;
            if raw.bd_unit {
                forbid(raw.g.is_some(), "g", kind)?;
                forbid(!raw.eps.is_empty(), "eps", kind)?;
                sources.push(("f_i".into(), "1".into()));
                Coefficients::BdUnit
            } else {
                let g = raw
                    .g
                    .ok_or_else(|| key_err("g", "BD needs g (or bd_unit = true)"))?;
                sources.push(("g".into(), g.clone()));
                sources.extend(
                    raw.eps
                        .iter()
                        .enumerate()
                        .map(|(i, t)| (format!("eps_{}", i + 2), t.clone())),
                );
                Coefficients::Bd {
                    g: expression("g", &g)?,
                    signs: expressions("eps", &raw.eps)?,
                }
            }
        }
        VariantKind::Ossqm => {
            forbid(raw.f.is_some(), "f", kind)?;
            forbid(raw.g.is_some(), "g", kind)?;
            forbid(raw.bd_unit, "bd_unit", kind)?;
            let f_p = raw.f_p.ok_or_else(|| key_err("f_p", "OSSQM needs f_p"))?;
            sources.push(("f_p".into(), f_p.clone()));
            sources.extend(
                raw.eps
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (format!("eps_{}", i + 1), t.clone())),
            );
            Coefficients::Ossqm {
                f_p: expression("f_p", &f_p)?,
                signs: expressions("eps", &raw.eps)?,
            }
        }
    };

    if p >= 2 {
        let max_weight = variant_relations(kind, p)
            .iter()
            .map(|r| r.weight())
            .max()
            .unwrap_or(0);
        if raw.dim <= max_weight {
            return Err(key_err(
                "D",
                format!(
                    "D = {} must exceed the largest ladder weight {max_weight}",
                    raw.dim
                ),
            ));
        }
    }

    let defaults = Tolerances::default();
    let tolerances = Tolerances {
        relation: raw.tolerance.relation.unwrap_or(defaults.relation),
        equality: raw.tolerance.equality.unwrap_or(defaults.equality),
    };
    for (key, t) in [
        ("tolerance.relation", tolerances.relation),
        ("tolerance.equality", tolerances.equality),
    ] {
        if !(t.is_finite() && t >= 0.0) {
            return Err(key_err(key, format!("{t} is not a nonnegative number")));
        }
    }
    let mode = match raw.mode {
        ModeName::Float => Mode::Float,
        ModeName::Exact => Mode::Exact,
    };
    let variant = VariantConfig::new(p, structure, coeffs, raw.dim)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(RunConfig {
        kind,
        p,
        lambda,
        structure_source,
        coefficient_sources: sources,
        dim: raw.dim,
        mode,
        tolerances,
        out: raw.out,
        variant,
    })
}
