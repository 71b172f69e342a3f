//! Named sweeps, one per results figure (fig3 to fig10).
//!
//! Each preset is a base scenario, a swept axis and a list of labelled
//! series that override a few keys. User overrides are applied last, so any
//! field can be changed from the command line.

use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::spec::{merge, ScenarioSpec};
use crate::sweep::{parse_values, Axis, Coupling, Output, SweepSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub overrides: Value,
    /// Axis of this series when it differs from the preset's.
    pub axis: Option<Axis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub title: &'static str,
    pub base: Value,
    pub axis: Axis,
    pub values: String,
    pub outputs: Vec<Output>,
    pub target: Option<f64>,
    pub coupling: Coupling,
    pub series: Vec<Series>,
}

pub const NAMES: [&str; 8] = [
    "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
];

fn series(label: impl Into<String>, overrides: Value) -> Series {
    Series {
        label: label.into(),
        overrides,
        axis: None,
    }
}

fn db_range(lo: i32, hi: i32, step: usize) -> String {
    (lo..=hi)
        .step_by(step)
        .map(|d| format!("{d}dB"))
        .collect::<Vec<_>>()
        .join(",")
}

fn int_range(lo: usize, hi: usize, step: usize) -> String {
    (lo..=hi)
        .step_by(step)
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn adc_label(bits: &Value) -> String {
    match bits.as_u64() {
        Some(1) => "1-bit".into(),
        Some(b) => format!("{b}-bit"),
        None => "perfect".into(),
    }
}

/// The preset called `name`, if any.
pub fn preset(name: &str) -> Option<Preset> {
    let unit = json!({"K": 5, "p_S": "0dB", "p_p": "0dB", "p_R": "0dB", "sigma_LI2": "-10dB"});
    let p = match name {
        "fig3" => Preset {
            name: "fig3",
            title: "sum rate vs p_S, two-bit ADCs at relay and destinations, four array sizes",
            base: json!({"M": 64, "K": 5, "p_S": "0dB", "p_p": "10dB", "p_R": "10dB", "sigma_LI2": "0dB",
                         "relay_adc": 2, "dest_adc": 2}),
            axis: Axis::SourcePower,
            values: db_range(-10, 40, 5),
            outputs: vec![Output::Exact, Output::Approx, Output::Mc],
            target: None,
            coupling: Coupling::default(),
            series: [64, 128, 256, 512]
                .iter()
                .map(|m| series(format!("M={m}"), json!({ "M": m })))
                .collect(),
        },
        "fig4" => Preset {
            name: "fig4",
            title: "sum rate vs ADC bits, quantization at the relay only or at the destinations only (M = 128)",
            base: with(&unit, json!({"M": 128})),
            axis: Axis::RelayBits,
            values: int_range(1, 10, 1),
            outputs: vec![Output::Exact],
            target: None,
            coupling: Coupling::default(),
            series: vec![
                Series {
                    label: "relay quantized".into(),
                    overrides: json!({"dest_adc": "perfect"}),
                    axis: Some(Axis::RelayBits),
                },
                Series {
                    label: "destinations quantized".into(),
                    overrides: json!({"relay_adc": "perfect"}),
                    axis: Some(Axis::DestBits),
                },
            ],
        },
        "fig5" => Preset {
            name: "fig5",
            title: "sum rate vs M and its large-array limit, two-bit relay, destination bits varied",
            base: with(&unit, json!({"M": 64, "relay_adc": 2})),
            axis: Axis::Antennas,
            values: "16,32,64,128,256,512,1024,2048,4096,8192,16384".into(),
            outputs: vec![Output::Exact, Output::Limit],
            target: None,
            coupling: Coupling::default(),
            series: [1, 2, 3]
                .iter()
                .map(|b| series(format!("destination {b}-bit"), json!({ "dest_adc": b })))
                .collect(),
        },
        "fig6" => Preset {
            name: "fig6",
            title: "sum rate vs M with ideal destination ADCs, relay bits varied",
            base: with(&unit, json!({"M": 64, "dest_adc": "perfect"})),
            axis: Axis::Antennas,
            values: int_range(50, 500, 10),
            outputs: vec![Output::Exact],
            target: None,
            coupling: Coupling::default(),
            series: [json!(1), json!(2), json!(3), json!("perfect")]
                .iter()
                .map(|b| series(format!("relay {}", adc_label(b)), json!({ "relay_adc": b })))
                .collect(),
        },
        "fig7" => Preset {
            name: "fig7",
            title: "sum rate vs p_R at M = 64, two-bit destinations, relay ADC and loop level varied",
            base: json!({"M": 64, "K": 5, "p_S": "-10dB", "p_p": "-10dB", "p_R": "0dB", "sigma_LI2": "-20dB",
                         "dest_adc": 2}),
            axis: Axis::RelayPower,
            values: db_range(-20, 30, 1),
            outputs: vec![Output::Approx, Output::Exact],
            target: None,
            coupling: Coupling::default(),
            series: cross(&[json!(1), json!("perfect")], &[-20, -10], |a, s| {
                series(
                    format!("relay {}, sigma_LI2={s}dB", adc_label(a)),
                    json!({"relay_adc": a, "sigma_LI2": format!("{s}dB")}),
                )
            }),
        },
        "fig8" => Preset {
            name: "fig8",
            title: "source power needed for 5 bits/s/Hz vs M with p_R = K p_S",
            base: json!({"M": 64, "K": 5, "p_S": "0dB", "p_p": "0dB", "p_R": "0dB", "sigma_LI2": "-20dB"}),
            axis: Axis::Antennas,
            values: int_range(50, 500, 10),
            outputs: vec![Output::RequiredSourcePower],
            target: Some(5.0),
            coupling: Coupling::PerPair,
            series: cross(&[json!(1), json!(2), json!("perfect")], &[-20, 0], |a, s| {
                series(
                    format!("{} ADCs, sigma_LI2={s}dB", adc_label(a)),
                    json!({"relay_adc": a, "dest_adc": a, "sigma_LI2": format!("{s}dB")}),
                )
            }),
        },
        "fig9" => Preset {
            name: "fig9",
            title: "full vs half duplex over the loop interference level, two-bit ADCs",
            base: json!({"M": 100, "K": 5, "p_S": "-10dB", "p_p": "-10dB", "p_R": "-10dB", "sigma_LI2": "0dB",
                         "relay_adc": 2, "dest_adc": 2}),
            axis: Axis::LoopInterference,
            values: db_range(-10, 30, 1),
            outputs: vec![Output::Exact, Output::Approx, Output::HalfDuplex],
            target: None,
            coupling: Coupling::default(),
            series: [100, 200]
                .iter()
                .map(|m| series(format!("M={m}"), json!({ "M": m })))
                .collect(),
        },
        "fig10" => Preset {
            name: "fig10",
            title: "full vs half duplex over M at strong loop interference, two-bit vs ideal ADCs",
            base: json!({"M": 64, "K": 5, "p_S": "0dB", "p_p": "0dB", "p_R": "0dB", "sigma_LI2": "16dB"}),
            axis: Axis::Antennas,
            values: int_range(50, 400, 5),
            outputs: vec![Output::Exact, Output::Approx, Output::HalfDuplex],
            target: None,
            coupling: Coupling::default(),
            series: [json!(2), json!("perfect")]
                .iter()
                .map(|a| series(format!("{} ADCs", adc_label(a)), json!({"relay_adc": a, "dest_adc": a})))
                .collect(),
        },
        _ => return None,
    };
    Some(p)
}

fn with(base: &Value, extra: Value) -> Value {
    let mut v = base.clone();
    merge(&mut v, &extra).expect("objects");
    v
}

fn cross(adcs: &[Value], levels: &[i32], f: impl Fn(&Value, i32) -> Series) -> Vec<Series> {
    adcs.iter()
        .flat_map(|a| levels.iter().map(|&s| f(a, s)).collect::<Vec<_>>())
        .collect()
}

impl Preset {
    /// Base scenario of every series with `user` overrides applied, before
    /// the axis value is substituted.
    pub fn scenarios(&self, user: &Value) -> CliResult<Vec<(String, ScenarioSpec)>> {
        self.series
            .iter()
            .map(|s| {
                let mut v = self.base.clone();
                merge(&mut v, &s.overrides)?;
                merge(&mut v, user)?;
                Ok((s.label.clone(), ScenarioSpec::from_value(&v)?))
            })
            .collect()
    }

    /// Sweep specifications of every series.
    pub fn sweeps(&self, user: &Value) -> CliResult<Vec<(String, SweepSpec)>> {
        self.scenarios(user)?
            .into_iter()
            .zip(&self.series)
            .map(|((label, base), s)| {
                let axis = s.axis.unwrap_or(self.axis);
                let mut spec = SweepSpec::new(
                    base,
                    axis,
                    parse_values(axis, &self.values)?,
                    self.outputs.clone(),
                );
                spec.target = self.target;
                spec.coupling = self.coupling;
                Ok((label, spec))
            })
            .collect()
    }
}

/// All presets in figure order.
pub fn all() -> Vec<Preset> {
    NAMES.iter().filter_map(|n| preset(n)).collect()
}

pub fn lookup(name: &str) -> CliResult<Preset> {
    preset(name).ok_or_else(|| {
        CliError::usage(format!(
            "unknown preset `{name}` (expected one of {})",
            NAMES.join(", ")
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_series_parses() {
        for p in all() {
            let sweeps = p.sweeps(&json!({})).unwrap();
            assert_eq!(sweeps.len(), p.series.len(), "{}", p.name);
            for (label, s) in &sweeps {
                s.check(10_000)
                    .unwrap_or_else(|e| panic!("{} {label}: {e}", p.name));
                assert!(s.base.to_config().is_ok(), "{} {label}", p.name);
            }
        }
        assert_eq!(all().len(), NAMES.len());
    }

    #[test]
    fn labels_are_unique() {
        for p in all() {
            let mut labels: Vec<_> = p.series.iter().map(|s| &s.label).collect();
            labels.sort();
            labels.dedup();
            assert_eq!(labels.len(), p.series.len(), "{}", p.name);
        }
    }

    #[test]
    fn user_overrides_win() {
        let p = lookup("fig3").unwrap();
        let s = p.scenarios(&json!({"K": 3})).unwrap();
        assert!(s.iter().all(|(_, sc)| sc.pairs == 3));
        assert!(lookup("fig2").is_err());
    }
}
