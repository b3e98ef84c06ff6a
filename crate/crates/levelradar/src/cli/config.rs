//! Scenario configuration files: flat `key = value` text.
//!
//! `#` starts a comment anywhere on a line and blank lines are skipped.
//! Every file names a `kind`, either `static_fill` or `pour`, and may
//! override the radar and geometry defaults:
//!
//! ```text
//! kind = static_fill
//! num_antennas = 4          # radar keys, all optional
//! num_freq_points = 128
//! radar_height = 0.30       # geometry keys, optional
//! max_level = 0.12
//! snr_db = 20               # omit for a noiseless scene
//! levels = 0.0, 0.025, 0.05 # fill steps in meters, static_fill only
//! ```
//!
//! A pour describes trajectories as comma-separated `slot:value` knots and
//! may repeat `interferer` and `static_clutter` lines:
//!
//! ```text
//! kind = pour
//! num_slots = 60
//! level = 0:0, 5:0, 55:0.07, 59:0.07
//! interferer = label=gripper; magnitude=1.5; aoa=10:1.2566, 50:1.1868; tof=10:1.35e-9, 50:1.92e-9
//! static_clutter = label=desktop; magnitude=0.8; aoa=1.9199; tof=2.3e-9
//! ```
//!
//! Angles are radians, delays seconds, levels meters. Unknown keys, keys
//! from the wrong kind, and duplicate non-repeatable keys are rejected with
//! their line number. The random seed is not part of the file; it comes
//! from the command line so one config can drive many seeds.

use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;

use crate::beamforming::{default_aoa_range, default_tof_range};
use crate::error::{Error, Result};
use crate::geometry::{MountGeometry, SPEED_OF_LIGHT};
use crate::radar::{PathLabel, PropagationPath, RadarConfig};
use crate::scenario::{Interferer, PiecewiseLinear, ScenarioConfig};

/// What a config file asks to be simulated.
#[derive(Clone, Debug)]
pub enum ScenarioKind {
    /// Incremental fill: one frame per level step.
    StaticFill {
        /// Fill steps in meters.
        levels: Vec<f64>,
        /// Per-sample SNR in dB, `None` for a noiseless scene.
        snr_db: Option<f64>,
    },
    /// Continuous pour with trajectories, interferers, and clutter.
    Pour(Box<ScenarioConfig>),
}

/// A parsed config file: radar, geometry, and the scenario to run.
#[derive(Clone, Debug)]
pub struct SimConfig {
    /// Waveform and array parameters.
    pub radar: RadarConfig,
    /// Mount geometry.
    pub geometry: MountGeometry,
    /// The scenario.
    pub kind: ScenarioKind,
}

const SCALAR_KEYS: &[&str] = &[
    "kind",
    "carrier_frequency",
    "bandwidth",
    "num_antennas",
    "num_freq_points",
    "element_spacing",
    "radar_height",
    "max_level",
    "snr_db",
    "levels",
    "num_slots",
    "slot_duration",
    "surface_magnitude",
    "level",
];

const STATIC_FILL_KEYS: &[&str] = &[
    "kind",
    "carrier_frequency",
    "bandwidth",
    "num_antennas",
    "num_freq_points",
    "element_spacing",
    "radar_height",
    "max_level",
    "snr_db",
    "levels",
];

fn value_err(key: &str, line: usize, message: impl Into<String>) -> Error {
    Error::ConfigValue {
        key: key.to_string(),
        message: format!("line {line}: {}", message.into()),
    }
}

fn parse_f64(key: &str, line: usize, raw: &str) -> Result<f64> {
    raw.parse::<f64>()
        .map_err(|_| value_err(key, line, format!("expected a number, got `{raw}`")))
}

fn parse_usize(key: &str, line: usize, raw: &str) -> Result<usize> {
    raw.parse::<usize>()
        .map_err(|_| value_err(key, line, format!("expected a non-negative integer, got `{raw}`")))
}

fn parse_label(key: &str, line: usize, raw: &str) -> Result<PathLabel> {
    match raw {
        "liquid_surface" | "surface" => Ok(PathLabel::LiquidSurface),
        "gripper" => Ok(PathLabel::Gripper),
        "source_container" => Ok(PathLabel::SourceContainer),
        "desktop" => Ok(PathLabel::Desktop),
        "other" => Ok(PathLabel::Other),
        _ => Err(value_err(
            key,
            line,
            format!(
                "unknown label `{raw}` (expected liquid_surface, gripper, source_container, desktop, or other)"
            ),
        )),
    }
}

/// Comma-separated floats: `0.0, 0.025, 0.05`.
fn parse_float_list(key: &str, line: usize, raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|item| parse_f64(key, line, item.trim()))
        .collect()
}

/// Comma-separated `slot:value` knots: `0:0, 55:0.07`.
fn parse_knots(key: &str, line: usize, raw: &str) -> Result<PiecewiseLinear> {
    let mut knots = Vec::new();
    for item in raw.split(',') {
        let item = item.trim();
        let Some((slot, value)) = item.split_once(':') else {
            return Err(value_err(key, line, format!("expected `slot:value`, got `{item}`")));
        };
        knots.push((
            parse_f64(key, line, slot.trim())?,
            parse_f64(key, line, value.trim())?,
        ));
    }
    PiecewiseLinear::new(knots)
        .map_err(|e| value_err(key, line, e.to_string()))
}

/// Semicolon-separated `field=value` pairs inside one repeatable line.
fn parse_fields<'a>(key: &str, line: usize, raw: &'a str) -> Result<HashMap<&'a str, &'a str>> {
    let mut fields = HashMap::new();
    for part in raw.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((name, value)) = part.split_once('=') else {
            return Err(value_err(key, line, format!("expected `field=value`, got `{part}`")));
        };
        if fields.insert(name.trim(), value.trim()).is_some() {
            return Err(value_err(key, line, format!("duplicate field `{}`", name.trim())));
        }
    }
    Ok(fields)
}

fn require<'a>(
    fields: &HashMap<&str, &'a str>,
    key: &str,
    line: usize,
    name: &str,
) -> Result<&'a str> {
    fields
        .get(name)
        .copied()
        .ok_or_else(|| value_err(key, line, format!("missing field `{name}`")))
}

fn parse_interferer(line: usize, raw: &str) -> Result<Interferer> {
    const KEY: &str = "interferer";
    let fields = parse_fields(KEY, line, raw)?;
    for name in fields.keys() {
        if !["label", "magnitude", "aoa", "tof"].contains(name) {
            return Err(value_err(KEY, line, format!("unknown field `{name}`")));
        }
    }
    Ok(Interferer {
        label: parse_label(KEY, line, require(&fields, KEY, line, "label")?)?,
        magnitude: parse_f64(KEY, line, require(&fields, KEY, line, "magnitude")?)?,
        aoa: parse_knots(KEY, line, require(&fields, KEY, line, "aoa")?)?,
        tof: parse_knots(KEY, line, require(&fields, KEY, line, "tof")?)?,
    })
}

fn parse_clutter(line: usize, raw: &str) -> Result<PropagationPath> {
    const KEY: &str = "static_clutter";
    let fields = parse_fields(KEY, line, raw)?;
    for name in fields.keys() {
        if !["label", "magnitude", "aoa", "tof", "phase"].contains(name) {
            return Err(value_err(KEY, line, format!("unknown field `{name}`")));
        }
    }
    let magnitude = parse_f64(KEY, line, require(&fields, KEY, line, "magnitude")?)?;
    let phase = match fields.get("phase") {
        Some(raw) => parse_f64(KEY, line, raw)?,
        None => 0.0,
    };
    Ok(PropagationPath {
        label: parse_label(KEY, line, require(&fields, KEY, line, "label")?)?,
        aoa: parse_f64(KEY, line, require(&fields, KEY, line, "aoa")?)?,
        tof: parse_f64(KEY, line, require(&fields, KEY, line, "tof")?)?,
        attenuation: Complex64::from_polar(magnitude, phase),
    })
}

/// Parses config text into a [`SimConfig`].
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut scalars: HashMap<&str, (usize, &str)> = HashMap::new();
    let mut interferer_lines: Vec<(usize, &str)> = Vec::new();
    let mut clutter_lines: Vec<(usize, &str)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split_once('#').map_or(raw, |(code, _)| code).trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "interferer" => interferer_lines.push((line_no, value)),
            "static_clutter" => clutter_lines.push((line_no, value)),
            _ if SCALAR_KEYS.contains(&key) => {
                if scalars.insert(key, (line_no, value)).is_some() {
                    return Err(Error::ConfigSyntax {
                        line: line_no,
                        message: format!("duplicate key `{key}`"),
                    });
                }
            }
            _ => {
                return Err(Error::ConfigSyntax {
                    line: line_no,
                    message: format!("unknown key `{key}`"),
                });
            }
        }
    }

    let scalar_f64 = |key: &str, default: f64| -> Result<f64> {
        match scalars.get(key) {
            Some(&(line, raw)) => parse_f64(key, line, raw),
            None => Ok(default),
        }
    };
    let scalar_usize = |key: &str, default: usize| -> Result<usize> {
        match scalars.get(key) {
            Some(&(line, raw)) => parse_usize(key, line, raw),
            None => Ok(default),
        }
    };

    let carrier = scalar_f64("carrier_frequency", 61.8e9)?;
    let radar = RadarConfig {
        carrier_frequency: carrier,
        bandwidth: scalar_f64("bandwidth", 3.6e9)?,
        num_antennas: scalar_usize("num_antennas", 4)?,
        num_freq_points: scalar_usize("num_freq_points", 128)?,
        element_spacing: scalar_f64("element_spacing", SPEED_OF_LIGHT / (2.0 * carrier))?,
        noise_std: 0.0,
    };
    radar.validate()?;
    let geometry = MountGeometry::new(
        scalar_f64("radar_height", 0.30)?,
        scalar_f64("max_level", 0.12)?,
    )?;
    let snr_db = match scalars.get("snr_db") {
        Some(&(line, raw)) => Some(parse_f64("snr_db", line, raw)?),
        None => None,
    };

    let Some(&(kind_line, kind_raw)) = scalars.get("kind") else {
        return Err(Error::ConfigValue {
            key: "kind".into(),
            message: "required key is missing (static_fill or pour)".into(),
        });
    };

    let kind = match kind_raw {
        "static_fill" => {
            if let Some((line, key)) = scalars
                .iter()
                .filter(|&(key, _)| !STATIC_FILL_KEYS.contains(key))
                .map(|(key, &(line, _))| (line, *key))
                .min()
            {
                return Err(Error::ConfigSyntax {
                    line,
                    message: format!("`{key}` is only valid for kind = pour"),
                });
            }
            if let Some((line, _)) = interferer_lines.first().or(clutter_lines.first()) {
                return Err(Error::ConfigSyntax {
                    line: *line,
                    message: "interferer and static_clutter are only valid for kind = pour".into(),
                });
            }
            let Some(&(line, raw)) = scalars.get("levels") else {
                return Err(Error::ConfigValue {
                    key: "levels".into(),
                    message: "required for kind = static_fill".into(),
                });
            };
            let levels = parse_float_list("levels", line, raw)?;
            ScenarioKind::StaticFill { levels, snr_db }
        }
        "pour" => {
            if let Some(&(line, _)) = scalars.get("levels") {
                return Err(Error::ConfigSyntax {
                    line,
                    message: "`levels` is only valid for kind = static_fill; use `level` knots".into(),
                });
            }
            let Some(&(line, raw)) = scalars.get("level") else {
                return Err(Error::ConfigValue {
                    key: "level".into(),
                    message: "required for kind = pour (knot list, e.g. `0:0, 59:0.07`)".into(),
                });
            };
            let level = parse_knots("level", line, raw)?;
            let interferers = interferer_lines
                .iter()
                .map(|&(line, raw)| parse_interferer(line, raw))
                .collect::<Result<Vec<_>>>()?;
            let static_clutter = clutter_lines
                .iter()
                .map(|&(line, raw)| parse_clutter(line, raw))
                .collect::<Result<Vec<_>>>()?;
            ScenarioKind::Pour(Box::new(ScenarioConfig {
                geometry,
                num_slots: scalar_usize("num_slots", 60)?,
                slot_duration: scalar_f64("slot_duration", 0.1)?,
                level,
                interferers,
                surface_magnitude: scalar_f64("surface_magnitude", 1.0)?,
                static_clutter,
                snr_db,
                aoa_coverage: default_aoa_range(),
                tof_coverage: default_tof_range(&geometry),
            }))
        }
        other => {
            return Err(value_err(
                "kind",
                kind_line,
                format!("expected static_fill or pour, got `{other}`"),
            ));
        }
    };

    Ok(SimConfig { radar, geometry, kind })
}

/// Reads and parses the config file at `path`.
pub fn load_config(path: &Path) -> Result<SimConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
