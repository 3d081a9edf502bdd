use std::fmt;
use std::str::FromStr;

use super::Functional;
use crate::error::{Error, Result};

/// Element selection as written on the command line: `cr`, `af3`, `gn:<γ>`,
/// `pn:<μ>` or `custom`.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementSpec {
    Cr,
    Af3,
    Gn(f64),
    Pn(f64),
    Custom([Functional; 3]),
}

impl ElementSpec {
    /// Parses one element name; `custom` takes its functionals from `custom`.
    pub fn parse(s: &str, custom: Option<&str>) -> Result<Self> {
        let s = s.trim();
        let param = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|p| p.is_finite())
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        match s.split_once(':') {
            None if s.eq_ignore_ascii_case("cr") => Ok(ElementSpec::Cr),
            None if s.eq_ignore_ascii_case("af3") => Ok(ElementSpec::Af3),
            None if s.eq_ignore_ascii_case("custom") => {
                let desc = custom.ok_or_else(|| {
                    Error::Config("element `custom` needs a functional description".into())
                })?;
                Ok(ElementSpec::Custom(parse_functionals(desc)?))
            }
            Some((kind, v)) if kind.eq_ignore_ascii_case("gn") => Ok(ElementSpec::Gn(param(v)?)),
            Some((kind, v)) if kind.eq_ignore_ascii_case("pn") => Ok(ElementSpec::Pn(param(v)?)),
            _ => Err(Error::UnknownElement(s.to_string())),
        }
    }

    /// Parses a comma-separated element list.
    pub fn parse_list(s: &str, custom: Option<&str>) -> Result<Vec<Self>> {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| Self::parse(t, custom))
            .collect()
    }
}

impl FromStr for ElementSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, None)
    }
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementSpec::Cr => f.write_str("cr"),
            ElementSpec::Af3 => f.write_str("af3"),
            ElementSpec::Gn(g) => write!(f, "gn:{g}"),
            ElementSpec::Pn(m) => write!(f, "pn:{m}"),
            ElementSpec::Custom(_) => f.write_str("custom"),
        }
    }
}

/// Parses a functional triple such as `midseg:2,median:1,vertex`.
///
/// Tokens are `vertex`, `edge`, `midseg:<γ>` and `median:<μ>`, separated by
/// `,`, `/` or `;`; token `j` defines the functional with index `j`. A single
/// token is used for all three indices.
pub fn parse_functionals(desc: &str) -> Result<[Functional; 3]> {
    let tokens: Vec<&str> = desc
        .split([',', '/', ';'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    let tokens = match tokens.len() {
        1 => vec![tokens[0]; 3],
        3 => tokens,
        n => {
            return Err(Error::Config(format!(
                "functional description needs 1 or 3 entries, got {n}"
            )))
        }
    };
    let parse = |j: usize, token: &str| -> Result<Functional> {
        let bad = || Error::Config(format!("invalid functional `{token}`"));
        let (kind, arg) = match token.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (token, None),
        };
        let p = || -> Result<f64> {
            arg.and_then(|a| a.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(bad)
        };
        match (kind.to_ascii_lowercase().as_str(), arg) {
            ("vertex", None) => Ok(Functional::VertexEval(j)),
            ("edge", None) => Ok(Functional::EdgeMean(j)),
            ("midseg" | "midsegment", Some(_)) => Ok(Functional::Midsegment { j, gamma: p()? }),
            ("median", Some(_)) => Ok(Functional::Median { j, mu: p()? }),
            _ => Err(bad()),
        }
    };
    Ok([
        parse(0, tokens[0])?,
        parse(1, tokens[1])?,
        parse(2, tokens[2])?,
    ])
}
