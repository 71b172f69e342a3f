//! JSON scenario files.
//!
//! Keys: `M`, `K`, `tau_c`, `tau_p`, `p_S`, `p_R`, `p_p`, `sigma_LI2`,
//! `beta_SR`, `beta_RD`, `relay_adc`, `dest_adc`. Powers are linear numbers
//! or strings with a `dB` suffix. ADCs are a bit count, `"perfect"`, or
//! `{"rho": x}`. `tau_c` defaults to 196, `tau_p` to `K`, betas to ones and
//! ADCs to perfect.

use std::path::Path;

use fdrelay::{db_to_linear, AdcModel, SystemConfig};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub const KEYS: [&str; 12] = [
    "M",
    "K",
    "tau_c",
    "tau_p",
    "p_S",
    "p_R",
    "p_p",
    "sigma_LI2",
    "beta_SR",
    "beta_RD",
    "relay_adc",
    "dest_adc",
];

const REQUIRED: [&str; 6] = ["M", "K", "p_S", "p_R", "p_p", "sigma_LI2"];

/// A parsed scenario before defaults that depend on `K` are filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub antennas: usize,
    pub pairs: usize,
    pub coherence_len: Option<usize>,
    pub pilot_len: Option<usize>,
    pub source_power: f64,
    pub relay_power: f64,
    pub pilot_power: f64,
    pub loop_interference: f64,
    pub beta_sr: Option<Vec<f64>>,
    pub beta_rd: Option<Vec<f64>>,
    pub relay_adc: AdcModel,
    pub dest_adc: AdcModel,
}

impl ScenarioSpec {
    pub fn from_value(value: &Value) -> CliResult<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| CliError::usage("configuration must be a JSON object"))?;
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::usage(format!("unknown configuration key `{k}`")));
        }
        if let Some(k) = REQUIRED.iter().find(|k| !map.contains_key(**k)) {
            return Err(CliError::usage(format!("missing required key `{k}`")));
        }
        Ok(Self {
            antennas: count(map, "M")?,
            pairs: count(map, "K")?,
            coherence_len: optional_count(map, "tau_c")?,
            pilot_len: optional_count(map, "tau_p")?,
            source_power: power_key(map, "p_S")?,
            relay_power: power_key(map, "p_R")?,
            pilot_power: power_key(map, "p_p")?,
            loop_interference: power_key(map, "sigma_LI2")?,
            beta_sr: betas(map, "beta_SR")?,
            beta_rd: betas(map, "beta_RD")?,
            relay_adc: map
                .get("relay_adc")
                .map_or(Ok(AdcModel::perfect()), |v| adc("relay_adc", v))?,
            dest_adc: map
                .get("dest_adc")
                .map_or(Ok(AdcModel::perfect()), |v| adc("dest_adc", v))?,
        })
    }

    /// Fills the `K`-dependent defaults and checks every invariant.
    pub fn to_config(&self) -> CliResult<SystemConfig> {
        let k = self.pairs;
        let cfg = SystemConfig {
            antennas: self.antennas,
            pairs: k,
            coherence_len: self
                .coherence_len
                .unwrap_or(SystemConfig::DEFAULT_COHERENCE_LEN),
            pilot_len: self.pilot_len.unwrap_or(k),
            source_power: self.source_power,
            relay_power: self.relay_power,
            pilot_power: self.pilot_power,
            loop_interference: self.loop_interference,
            beta_sr: self.beta_sr.clone().unwrap_or_else(|| vec![1.0; k]),
            beta_rd: self.beta_rd.clone().unwrap_or_else(|| vec![1.0; k]),
            relay_adc: self.relay_adc,
            dest_adc: self.dest_adc,
        };
        cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(cfg)
    }
}

/// Reads a JSON file into a value (not yet interpreted).
pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: invalid JSON: {e}", path.display())))
}

/// Parses and validates a scenario file.
pub fn parse_config(path: &Path) -> CliResult<SystemConfig> {
    ScenarioSpec::from_value(&read_json(path)?)?.to_config()
}

/// Overwrites keys of `base` with those of `over`.
pub fn merge(base: &mut Value, over: &Value) -> CliResult<()> {
    let (Some(b), Some(o)) = (base.as_object_mut(), over.as_object()) else {
        return Err(CliError::usage(
            "configuration overrides must be JSON objects",
        ));
    };
    for (k, v) in o {
        b.insert(k.clone(), v.clone());
    }
    Ok(())
}

/// Turns `key=value` assignments into a JSON object. Values that parse as JSON
/// are used as such; anything else is taken as a string (so `p_S=-10dB` works).
pub fn assignments(items: &[String]) -> CliResult<Value> {
    let mut map = Map::new();
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("expected key=value, got `{item}`")))?;
        let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        map.insert(k.trim().to_string(), v);
    }
    Ok(Value::Object(map))
}

/// Parses a power given as a linear number or as text with a `dB` suffix.
pub fn parse_power(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (number, is_db) = match t.strip_suffix("dB").or_else(|| t.strip_suffix("db")) {
        Some(rest) => (rest.trim(), true),
        None => (t, false),
    };
    let x: f64 = number
        .parse()
        .map_err(|_| format!("`{text}` is not a number or a dB value"))?;
    if !x.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(if is_db { db_to_linear(x) } else { x })
}

pub fn power_value(key: &str, v: &Value) -> CliResult<f64> {
    let p = match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| CliError::usage(format!("`{key}` is out of range")))?,
        Value::String(s) => parse_power(s).map_err(|e| CliError::usage(format!("`{key}`: {e}")))?,
        _ => {
            return Err(CliError::usage(format!(
                "`{key}` must be a number or a dB string"
            )))
        }
    };
    if p < 0.0 {
        return Err(CliError::usage(format!("`{key}` must be nonnegative")));
    }
    Ok(p)
}

/// Parses an ADC description: bit count, `"perfect"`/`"infinite"`, or `{"rho": x}`.
pub fn adc(key: &str, v: &Value) -> CliResult<AdcModel> {
    let bad = |detail: String| CliError::usage(format!("`{key}`: {detail}"));
    match v {
        Value::Number(n) => {
            let bits = n
                .as_i64()
                .ok_or_else(|| bad(format!("bit count must be an integer, got {n}")))?;
            let r = fdrelay::Resolution::from_bits(bits).map_err(|e| bad(e.to_string()))?;
            AdcModel::new(r).map_err(|e| bad(e.to_string()))
        }
        Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "perfect" | "infinite" | "inf" => Ok(AdcModel::perfect()),
            other => match other.parse::<i64>() {
                Ok(b) => adc(key, &Value::from(b)),
                Err(_) => Err(bad(format!("unknown ADC `{s}`"))),
            },
        },
        Value::Object(m) => match (m.get("rho"), m.get("bits")) {
            (Some(r), None) => {
                let rho = r
                    .as_f64()
                    .ok_or_else(|| bad("rho must be a number".into()))?;
                AdcModel::with_distortion(rho).map_err(|e| bad(e.to_string()))
            }
            (None, Some(b)) => adc(key, b),
            _ => Err(bad("expected exactly one of `rho` or `bits`".into())),
        },
        _ => Err(bad(
            "expected a bit count, \"perfect\" or {\"rho\": x}".into()
        )),
    }
}

fn count(map: &Map<String, Value>, key: &str) -> CliResult<usize> {
    let v = &map[key];
    v.as_u64()
        .filter(|&n| n > 0)
        .map(|n| n as usize)
        .ok_or_else(|| CliError::usage(format!("`{key}` must be a positive integer, got {v}")))
}

fn optional_count(map: &Map<String, Value>, key: &str) -> CliResult<Option<usize>> {
    if map.contains_key(key) {
        count(map, key).map(Some)
    } else {
        Ok(None)
    }
}

fn power_key(map: &Map<String, Value>, key: &str) -> CliResult<f64> {
    power_value(key, &map[key])
}

fn betas(map: &Map<String, Value>, key: &str) -> CliResult<Option<Vec<f64>>> {
    let Some(v) = map.get(key) else {
        return Ok(None);
    };
    let arr = v
        .as_array()
        .ok_or_else(|| CliError::usage(format!("`{key}` must be an array")))?;
    arr.iter()
        .map(|x| power_value(key, x))
        .collect::<CliResult<Vec<f64>>>()
        .map(Some)
}
