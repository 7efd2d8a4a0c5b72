use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scenario::ScenarioParams;

/// Every key accepted in a scenario file or a `--set` override.
pub const KEYS: &[&str] = &[
    "lambda_bs",
    "eta1",
    "eta2",
    "d_critical",
    "speed",
    "m_group",
    "tau_db",
    "t_h",
    "mu",
    "t_interval",
    "s1",
    "s2",
    "trials",
    "coverage_trials",
    "seed",
    "window_radius",
    "step",
    "duration",
];

/// Flat `key=value` pairs, `#` comments and blank lines ignored.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{k}`", n + 1)));
        }
    }
    Ok(out)
}

fn float(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}` as a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("`{key}`: value must be finite")));
    }
    Ok(x)
}

fn integer<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}` as a non-negative integer")))
}

/// Builds validated params from key/value pairs. `lambda_bs` is mandatory;
/// `s1` defaults to `t_h` and `s2` to `0.01 t_interval` when omitted.
pub fn params_from_pairs(pairs: &BTreeMap<String, String>) -> Result<ScenarioParams> {
    if let Some(k) = pairs.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::Config(format!("unknown key `{k}`")));
    }
    let lambda = pairs
        .get("lambda_bs")
        .ok_or_else(|| Error::Config("lambda_bs required".into()))?;
    let mut p = ScenarioParams::with_density(float("lambda_bs", lambda)?);
    for (k, v) in pairs {
        set_field(&mut p, k, v)?;
    }
    if !pairs.contains_key("s1") {
        p.s1 = p.t_h;
    }
    if !pairs.contains_key("s2") {
        p.s2 = 0.01 * p.t_interval;
    }
    p.validate()?;
    Ok(p)
}

/// Assigns one field without validating the whole scenario.
pub fn set_field(p: &mut ScenarioParams, key: &str, v: &str) -> Result<()> {
    match key {
        "lambda_bs" => p.lambda_bs = float(key, v)?,
        "eta1" => p.eta1 = float(key, v)?,
        "eta2" => p.eta2 = float(key, v)?,
        "d_critical" => p.d_critical = float(key, v)?,
        "speed" => p.speed = float(key, v)?,
        "m_group" => p.m_group = integer(key, v)?,
        "tau_db" => p.tau_db = float(key, v)?,
        "t_h" => p.t_h = float(key, v)?,
        "mu" => p.mu = float(key, v)?,
        "t_interval" => p.t_interval = float(key, v)?,
        "s1" => p.s1 = float(key, v)?,
        "s2" => p.s2 = float(key, v)?,
        "trials" => p.trials = integer(key, v)?,
        "coverage_trials" => p.coverage_trials = integer(key, v)?,
        "seed" => p.seed = integer(key, v)?,
        "window_radius" => p.window_radius = Some(float(key, v)?),
        "step" => p.step = Some(float(key, v)?),
        "duration" => p.duration = Some(float(key, v)?),
        other => return Err(Error::Config(format!("unknown key `{other}`"))),
    }
    Ok(())
}

pub fn parse_config_str(text: &str) -> Result<ScenarioParams> {
    params_from_pairs(&parse_pairs(text)?)
}

/// Reads and validates a scenario file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ScenarioParams> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// Applies `UDNGC_SEED` (if set) on top of the configured seed.
pub fn apply_seed_override(p: &mut ScenarioParams, env_value: Option<&str>) -> Result<()> {
    if let Some(v) = env_value {
        p.seed = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("UDNGC_SEED: cannot parse `{v}` as an integer")))?;
    }
    Ok(())
}
