//! Scenario configuration: strict INI files with `[model]`, `[run]` and
//! `[tolerances]` sections, layered over built-in defaults and `--set` overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use fwlab_core::approx::{ApproxKind, ChainVariant, ResidualMetric, ScanKind};
use fwlab_core::{ModelSpec, PotentialExpr};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key '{section}.{key}'")]
    UnknownKey { section: String, key: String },
    #[error("duplicate key '{section}.{key}'")]
    DuplicateKey { section: String, key: String },
    #[error("invalid value for '{key}': {message}")]
    Value { key: String, message: String },
    #[error("override '{0}' is not of the form section.key=value")]
    Override(String),
    #[error("missing required key '{0}'")]
    Missing(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, ConfigError>;

const MODEL_KEYS: &[(&str, &str)] = &[
    ("dimension", "1"),
    ("points", "64"),
    ("length", "2*pi"),
    ("mass", "1"),
    ("charge", "1"),
    ("amplitude", "0.05"),
    ("potential", "cos(2*pi*x/L)"),
    ("convention", "auto"),
    ("wavenumber_scale", "1"),
    ("beta_scale", "1"),
    ("max_dim", "2048"),
];

const RUN_KEYS: &[(&str, &str)] = &[
    ("scan", ""),
    ("values", ""),
    ("kinds", "MHAM_D, CORRECTED, SERIES_PLAIN, SERIES_FULL"),
    ("metric", ""),
    ("window", ""),
    ("step", ""),
    ("chain_amplitudes", ""),
    ("chain_variant", "linear_exact"),
    ("order", "4"),
    ("fv_pairs", "1:2, 0.5:2"),
    ("fv_amplitudes", "0.0125, 0.025, 0.05, 0.1"),
    ("eigenpairs", "8"),
    ("probe_points", "50"),
    ("seed", "0"),
    ("output", ""),
    ("format", "csv"),
];

const TOLERANCE_KEYS: &[(&str, &str)] = &[
    ("unitarity", "1e-12"),
    ("pseudo_herm", "1e-12"),
    ("evenness", "1e-10"),
    ("lambda_sq", "1e-12"),
    ("spectrum_rel", "1e-10"),
    ("sandwich_rel", "1e-11"),
    ("gram_parity_rel", "1e-12"),
    ("free_limit", "1e-10"),
    ("hermiticity", "1e-10"),
    ("identity_3d", "1e-10"),
    ("amplitude_slope", "2"),
    ("slope_window", "0.1"),
    ("slope_gain", "0.9"),
    ("decay_exponent", "5"),
    ("ratio_low", "3.5"),
    ("ratio_high", "4.5"),
    ("similarity", "1e-12"),
    ("pseudo_herm_fv", "1e-13"),
    ("scale_bound", "1e-9"),
    ("second_order_slope", "2"),
    ("second_order_window", "0.2"),
];

fn section_keys(section: &str) -> Option<&'static [(&'static str, &'static str)]> {
    match section {
        "model" => Some(MODEL_KEYS),
        "run" => Some(RUN_KEYS),
        "tolerances" => Some(TOLERANCE_KEYS),
        _ => None,
    }
}

/// Raw `section.key → value` map after defaults, file and overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawConfig {
    values: BTreeMap<(String, String), String>,
}

impl Default for RawConfig {
    fn default() -> Self {
        let mut values = BTreeMap::new();
        for section in ["model", "run", "tolerances"] {
            for (k, v) in section_keys(section).unwrap() {
                values.insert((section.to_string(), k.to_string()), v.to_string());
            }
        }
        Self { values }
    }
}

impl RawConfig {
    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let known = section_keys(section).is_some_and(|keys| keys.iter().any(|(k, _)| *k == key));
        if !known {
            return Err(ConfigError::UnknownKey {
                section: section.into(),
                key: key.into(),
            });
        }
        self.values
            .insert((section.to_string(), key.to_string()), value.trim().to_string());
        Ok(())
    }

    /// Applies an INI document; keys may appear once per document.
    pub fn merge_ini(&mut self, text: &str) -> Result<()> {
        let mut section: Option<String> = None;
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                let name = name.trim();
                if section_keys(name).is_none() {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        message: format!("unknown section [{name}]"),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: "expected key = value".into(),
            })?;
            let sec = section.as_deref().ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: "key outside of a section".into(),
            })?;
            let key = key.trim();
            if seen.contains(&(sec.to_string(), key.to_string())) {
                return Err(ConfigError::DuplicateKey {
                    section: sec.into(),
                    key: key.into(),
                });
            }
            seen.push((sec.to_string(), key.to_string()));
            self.set(sec, key, value)?;
        }
        Ok(())
    }

    /// `section.key=value`.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| ConfigError::Override(spec.into()))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| ConfigError::Override(spec.into()))?;
        self.set(section, key, value)
    }

    pub fn get(&self, section: &str, key: &str) -> &str {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
            .unwrap_or("")
    }

    /// Every effective value, one `section.key = value` per line in key order.
    pub fn canonical(&self) -> String {
        self.values
            .iter()
            .map(|((s, k), v)| format!("{s}.{k} = {v}\n"))
            .collect()
    }

    /// Canonical text of the `[model]` section alone.
    pub fn canonical_model(&self) -> String {
        self.values
            .iter()
            .filter(|((s, _), _)| s == "model")
            .map(|((s, k), v)| format!("{s}.{k} = {v}\n"))
            .collect()
    }
}

fn value_error(key: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Value {
        key: key.into(),
        message: message.to_string(),
    }
}

/// Number or constant expression such as `2*pi`.
fn parse_real(key: &str, text: &str) -> Result<f64> {
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    let expr = PotentialExpr::parse(text).map_err(|e| value_error(key, e))?;
    expr.eval([0.0; 3], f64::NAN).map_err(|e| value_error(key, e))
}

fn parse_int<T: FromStr>(key: &str, text: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    text.parse::<T>().map_err(|e| value_error(key, e))
}

fn parse_list<T>(key: &str, text: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(key, s))
        .collect()
}

fn optional<T>(text: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
    if text.is_empty() {
        Ok(None)
    } else {
        f(text).map(Some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(value_error("run.format", format!("expected csv or json, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSection {
    pub spec: ModelSpec,
    /// Multiplier on `β` before transforming; anything but 1 breaks `β² = I`.
    pub beta_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub scan: Option<ScanKind>,
    pub values: Vec<f64>,
    pub kinds: Vec<ApproxKind>,
    pub metric: Option<ResidualMetric>,
    pub window: Option<usize>,
    pub step: Option<f64>,
    pub chain_amplitudes: Vec<f64>,
    pub chain_variant: ChainVariant,
    pub order: usize,
    pub fv_pairs: Vec<(f64, f64)>,
    pub fv_amplitudes: Vec<f64>,
    pub eigenpairs: usize,
    pub probe_points: usize,
    pub seed: u64,
    pub output: Option<String>,
    pub format: OutputFormat,
}

/// Thresholds used by verdicts, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    values: Vec<(&'static str, f64)>,
}

impl Tolerances {
    pub fn get(&self, key: &str) -> f64 {
        self.values
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| panic!("tolerance '{key}' is not declared"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.values.iter().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub raw: RawConfig,
    pub model: ModelSection,
    pub run: RunSection,
    pub tolerances: Tolerances,
}

impl ScenarioConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let m = |k: &str| raw.get("model", k).to_string();
        let dimension: usize = parse_int("model.dimension", &m("dimension"))?;
        let points: usize = parse_int("model.points", &m("points"))?;
        let length = parse_real("model.length", &m("length"))?;
        let mut spec = ModelSpec::new(dimension, points, length, &m("potential"))
            .map_err(|e| value_error("model", e))?
            .mass(parse_real("model.mass", &m("mass"))?)
            .charge(parse_real("model.charge", &m("charge"))?)
            .amplitude(parse_real("model.amplitude", &m("amplitude"))?)
            .wavenumber_scale(parse_real("model.wavenumber_scale", &m("wavenumber_scale"))?);
        spec.max_dim = parse_int("model.max_dim", &m("max_dim"))?;
        let convention = m("convention");
        let expected = if dimension == 3 { "four_component_3d" } else { "two_component_1d" };
        if convention != "auto" && convention != expected {
            return Err(value_error(
                "model.convention",
                format!("'{convention}' does not match dimension {dimension}"),
            ));
        }
        if !(spec.mass > 0.0 && spec.mass.is_finite()) {
            return Err(value_error("model.mass", "must be positive"));
        }
        let beta_scale = parse_real("model.beta_scale", &m("beta_scale"))?;

        let r = |k: &str| raw.get("run", k).to_string();
        let real = |key: &'static str| move |_: &str, s: &str| parse_real(key, s);
        let scan = optional(&r("scan"), |s| {
            s.parse::<ScanKind>().map_err(|e| value_error("run.scan", e))
        })?;
        let values = parse_list("run.values", &r("values"), real("run.values"))?;
        if !values.is_empty() {
            let up = values.windows(2).all(|w| w[1] > w[0]);
            let down = values.windows(2).all(|w| w[1] < w[0]);
            if !(up || down) {
                return Err(value_error("run.values", "scan values must be strictly monotone"));
            }
        }
        let kinds = parse_list("run.kinds", &r("kinds"), |key, s| {
            s.parse::<ApproxKind>().map_err(|e| value_error(key, e))
        })?;
        let metric = optional(&r("metric"), |s| {
            s.parse::<ResidualMetric>().map_err(|e| value_error("run.metric", e))
        })?;
        let window = optional(&r("window"), |s| parse_int("run.window", s))?;
        let step = optional(&r("step"), |s| parse_real("run.step", s))?;
        let chain_amplitudes =
            parse_list("run.chain_amplitudes", &r("chain_amplitudes"), real("run.chain_amplitudes"))?;
        let chain_variant = match r("chain_variant").as_str() {
            "linear_exact" => ChainVariant::LinearExact,
            "hbar2_truncated" => ChainVariant::Hbar2Truncated,
            other => {
                return Err(value_error(
                    "run.chain_variant",
                    format!("expected linear_exact or hbar2_truncated, got '{other}'"),
                ))
            }
        };
        let fv_pairs = parse_list("run.fv_pairs", &r("fv_pairs"), |key, s| {
            let (a, b) = s
                .split_once(':')
                .ok_or_else(|| value_error(key, format!("expected N1:N2, got '{s}'")))?;
            Ok((parse_real(key, a.trim())?, parse_real(key, b.trim())?))
        })?;
        let fv_amplitudes = parse_list("run.fv_amplitudes", &r("fv_amplitudes"), real("run.fv_amplitudes"))?;
        let run = RunSection {
            scan,
            values,
            kinds,
            metric,
            window,
            step,
            chain_amplitudes,
            chain_variant,
            order: parse_int("run.order", &r("order"))?,
            fv_pairs,
            fv_amplitudes,
            eigenpairs: parse_int("run.eigenpairs", &r("eigenpairs"))?,
            probe_points: parse_int("run.probe_points", &r("probe_points"))?,
            seed: parse_int("run.seed", &r("seed"))?,
            output: optional(&r("output"), |s| Ok(s.to_string()))?,
            format: r("format").parse()?,
        };

        let mut tol = Vec::new();
        for (key, _) in TOLERANCE_KEYS {
            let full = format!("tolerances.{key}");
            let v = parse_real(&full, raw.get("tolerances", key))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(value_error(&full, "tolerances must be positive"));
            }
            tol.push((*key, v));
        }
        Ok(Self {
            model: ModelSection { spec, beta_scale },
            run,
            tolerances: Tolerances { values: tol },
            raw,
        })
    }

    pub fn load(text: Option<&str>, overrides: &[String]) -> Result<Self> {
        let mut raw = RawConfig::default();
        if let Some(t) = text {
            raw.merge_ini(t)?;
        }
        for o in overrides {
            raw.apply_override(o)?;
        }
        Self::from_raw(raw)
    }
}
