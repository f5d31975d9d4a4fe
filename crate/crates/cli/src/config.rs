//! Flat `key = value` settings merged from a config file and command-line
//! flags, with typed accessors that report the offending key.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Every key a config file may set. Flags use the same names with `-` for `_`.
pub const KEYS: &[&str] = &[
    "system",
    "scheme",
    "tau",
    "steps",
    "t_end",
    "ic",
    "energy",
    "closure",
    "sample_every",
    "output",
    "workers",
    "seed",
    "reference_tol",
    "d0",
    "direction",
    "tangent_deviation",
    "section",
    "t_max",
    "window",
    "c",
    "c_count",
    "observable",
    "det_method",
    "var",
    "start",
    "stop",
    "count",
    "unit",
    "indicator",
    "threshold",
    "taus",
    "table",
    "check",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut out = Self::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config("config", format!("line {}: expected key = value", n + 1))
            })?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::config(
                    &key,
                    format!(
                        "unknown key on line {}; valid keys: {}",
                        n + 1,
                        KEYS.join(", ")
                    ),
                ));
            }
            if out.values.contains_key(&key) {
                return Err(CliError::config(
                    &key,
                    format!("set twice (line {})", n + 1),
                ));
            }
            out.values.insert(key, value.trim().to_string());
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Overrides (or adds) a key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "unregistered key {key}");
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> CliResult<&str> {
        self.get(key)
            .ok_or_else(|| CliError::config(key, "required but not set"))
    }

    pub fn number(&self, key: &str) -> CliResult<Option<f64>> {
        self.get(key)
            .map(|v| parse_number(v).map_err(|m| CliError::config(key, m)))
            .transpose()
    }

    pub fn number_or(&self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn require_number(&self, key: &str) -> CliResult<f64> {
        self.number(key)?
            .ok_or_else(|| CliError::config(key, "required but not set"))
    }

    pub fn positive(&self, key: &str, default: Option<f64>) -> CliResult<f64> {
        let v = match default {
            Some(d) => self.number_or(key, d)?,
            None => self.require_number(key)?,
        };
        if !(v > 0.0) {
            return Err(CliError::config(key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    pub fn count(&self, key: &str) -> CliResult<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    CliError::config(key, format!("expected a non-negative integer, got `{v}`"))
                })
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(CliError::config(
                key,
                format!("expected true or false, got `{v}`"),
            )),
        }
    }

    /// Comma-separated numbers.
    pub fn numbers(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| parse_number(x).map_err(|m| CliError::config(key, m)))
                    .collect()
            })
            .transpose()
    }
}

/// Parses `12`, `-2.02`, `1e-8`, fractions `1/120`, and multiples of pi
/// (`pi`, `-pi`, `0.05pi`, `1/4pi`).
pub fn parse_number(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (body, scale) = match t.strip_suffix("pi") {
        Some(rest) => {
            let rest = rest.trim_end_matches('*').trim();
            match rest {
                "" | "+" => ("1", PI),
                "-" => ("-1", PI),
                r => (r, PI),
            }
        }
        None => (t, 1.0),
    };
    let value = match body.split_once('/') {
        Some((num, den)) => fraction(num.trim(), den.trim())
            .ok_or_else(|| format!("`{text}` is not a number or fraction"))?,
        None => body
            .parse::<f64>()
            .map_err(|_| format!("`{text}` is not a number or fraction"))?,
    };
    let out = value * scale;
    if !out.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(out)
}

/// Splits a plain decimal into an integer mantissa and a power-of-ten
/// exponent, when the mantissa is exactly representable.
fn decimal_parts(s: &str) -> Option<(f64, i32)> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(d) => (true, d),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mantissa: u64 = format!("{int}{frac}").parse().ok()?;
    if mantissa > (1u64 << 53) {
        return None;
    }
    let m = mantissa as f64;
    Some((if neg { -m } else { m }, -(frac.len() as i32)))
}

/// `num / den` with a single rounding when both are short decimals.
fn fraction(num: &str, den: &str) -> Option<f64> {
    if let (Some((a, ea)), Some((b, eb))) = (decimal_parts(num), decimal_parts(den)) {
        // a 10^ea / (b 10^eb): move the powers of ten onto whichever side keeps
        // the integer exact
        let shift = ea - eb;
        let (a, b) = if shift >= 0 {
            (a * 10f64.powi(shift), b)
        } else {
            (a, b * 10f64.powi(-shift))
        };
        if a.abs() <= (1u64 << 53) as f64 && b.abs() <= (1u64 << 53) as f64 && b != 0.0 {
            return Some(a / b);
        }
    }
    let a: f64 = num.parse().ok()?;
    let b: f64 = den.parse().ok()?;
    (b != 0.0).then(|| a / b)
}
