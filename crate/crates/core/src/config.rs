//! Flat key-value configuration files.
//!
//! The format is line-oriented: `[section]` headers, `key = value` pairs,
//! `#` comments and blank lines. Numbers are plain decimal text. Every key is
//! optional and falls back to the library default; unknown sections or keys
//! are rejected with their line number.
//!
//! Sections and keys (defaults in parentheses):
//!
//! ```text
//! [aircraft] v_n_fps (134.5)  mass_slug (1.234)  gravity_fps2 (32.174)
//!            wing_area_ft2 (7.1)  cd0 (0.03)  k_induced (0.05)  rho_bar (4.5)
//!            cl_min (0.0)  cl_max (1.2)  cl_cruise (0.5)  p_min (0.0)
//!            p_max (1.0)  mu_max_deg (30)  p_rate_max (6.216)
//!            cl_rate_max (1.865)  mu_rate_max (1.085)
//! [wind]     kind (sinusoidal | constant | sinusoidal-stochastic)
//!            w_m_fps (15)  psi_w_deg (0)  omega_w_rad_per_ft (0.05)
//!            phase_deg (0)  ou_sigma_fps (0)  ou_tau_s (5)  seed (0)
//! [guidance] dt_update_s (4)  dv_max_fps (5)  dpsi_max_deg (30)
//!            fd_step_v (1e-4)  fd_step_psi (1e-4)  levenberg_lambda0 (1e-3)
//!            k_v (5)  k_psi (6)  k_gamma (5)
//! [scenario] kind (adjusted | reference | adjusted-airspeed-only)
//!            flight_time_s (1200)  sim_rate_hz (50)  initial_heading_deg (90)
//!            altitude_ft (15000)  output_rate_hz (1)  heading_step_deg (5)
//!            frequencies_rad_per_ft (0.005,0.01,0.02,0.035,0.05,0.08,0.12,0.2)
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

use crate::airframe::{AircraftParams, GuidanceConfig, NormalizationBasis};
use crate::dynamics::State;
use crate::scenario::{ScenarioKind, ScenarioSpec};
use crate::tracking::TrackingGains;
use crate::windfield::{WindFieldKind, WindFieldParams};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key [{section}] {key}")]
    UnknownKey {
        section: String,
        key: String,
        line: usize,
    },
    #[error("line {line}: key [{section}] {key}: {message}")]
    BadValue {
        section: String,
        key: String,
        line: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Parsed but untyped configuration: `(section, key) → (value, line)`.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<(String, String), (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return Err(ConfigError::Syntax {
                        line,
                        message: format!("unterminated section header `{content}`"),
                    });
                };
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let key = key.trim();
            if key.is_empty() || section.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    message: "keys must appear under a [section] header".into(),
                });
            }
            entries.insert(
                (section.clone(), key.to_string()),
                (value.trim().to_string(), line),
            );
        }
        Ok(Self { entries })
    }

    /// Applies a `section.key=value` override (CLI `--set`).
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ConfigError> {
        let err = |message: String| ConfigError::Syntax { line: 0, message };
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| err(format!("override `{spec}` is not `section.key=value`")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| err(format!("override key `{path}` is not `section.key`")))?;
        if section.is_empty() || key.is_empty() {
            return Err(err(format!("override key `{path}` is not `section.key`")));
        }
        self.entries.insert(
            (section.trim().to_string(), key.trim().to_string()),
            (value.trim().to_string(), 0),
        );
        Ok(())
    }
}

/// Tracks which raw entries were consumed so leftovers can be rejected.
struct Extractor<'a> {
    raw: &'a RawConfig,
    consumed: Vec<(String, String)>,
}

impl<'a> Extractor<'a> {
    fn new(raw: &'a RawConfig) -> Self {
        Self {
            raw,
            consumed: Vec::new(),
        }
    }

    fn fetch(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        let id = (section.to_string(), key.to_string());
        let found = self.raw.entries.get(&id).cloned();
        self.consumed.push(id);
        found
    }

    fn f64(&mut self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.fetch(section, key) {
            None => Ok(default),
            Some((value, line)) => value.parse::<f64>().map_err(|_| ConfigError::BadValue {
                section: section.into(),
                key: key.into(),
                line,
                message: format!("`{value}` is not a number"),
            }),
        }
    }

    fn u64(&mut self, section: &str, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.fetch(section, key) {
            None => Ok(default),
            Some((value, line)) => value.parse::<u64>().map_err(|_| ConfigError::BadValue {
                section: section.into(),
                key: key.into(),
                line,
                message: format!("`{value}` is not a non-negative integer"),
            }),
        }
    }

    fn f64_list(
        &mut self,
        section: &str,
        key: &str,
        default: &[f64],
    ) -> Result<Vec<f64>, ConfigError> {
        match self.fetch(section, key) {
            None => Ok(default.to_vec()),
            Some((value, line)) => value
                .split(',')
                .map(|item| {
                    item.trim().parse::<f64>().map_err(|_| ConfigError::BadValue {
                        section: section.into(),
                        key: key.into(),
                        line,
                        message: format!("`{}` is not a number", item.trim()),
                    })
                })
                .collect(),
        }
    }

    fn choice(
        &mut self,
        section: &str,
        key: &str,
        default: &str,
        allowed: &[&str],
    ) -> Result<String, ConfigError> {
        match self.fetch(section, key) {
            None => Ok(default.to_string()),
            Some((value, line)) => {
                if allowed.contains(&value.as_str()) {
                    Ok(value)
                } else {
                    Err(ConfigError::BadValue {
                        section: section.into(),
                        key: key.into(),
                        line,
                        message: format!("`{value}` is not one of {allowed:?}"),
                    })
                }
            }
        }
    }

    fn reject_unknown(self) -> Result<(), ConfigError> {
        for (id, (_, line)) in &self.raw.entries {
            if !self.consumed.contains(id) {
                return Err(ConfigError::UnknownKey {
                    section: id.0.clone(),
                    key: id.1.clone(),
                    line: *line,
                });
            }
        }
        Ok(())
    }
}

/// Fully typed run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub basis: NormalizationBasis,
    pub aircraft: AircraftParams,
    pub wind: WindFieldParams,
    pub guidance: GuidanceConfig,
    pub gains: TrackingGains,
    pub scenario_kind: ScenarioKind,
    pub flight_time_s: f64,
    pub sim_rate_hz: f64,
    pub initial_heading_rad: f64,
    pub altitude_ft: f64,
    pub output_rate_hz: Option<f64>,
    pub heading_step_rad: f64,
    pub frequencies_rad_per_ft: Vec<f64>,
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let mut x = Extractor::new(raw);
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());

        let basis = NormalizationBasis::new(
            x.f64("aircraft", "v_n_fps", 134.5)?,
            x.f64("aircraft", "mass_slug", 1.234)?,
            x.f64("aircraft", "gravity_fps2", 32.174)?,
            x.f64("aircraft", "wing_area_ft2", 7.1)?,
        )
        .map_err(|e| invalid(&e))?;

        let aircraft = AircraftParams::from_polar(
            x.f64("aircraft", "cd0", 0.03)?,
            x.f64("aircraft", "k_induced", 0.05)?,
            x.f64("aircraft", "rho_bar", 4.5)?,
            x.f64("aircraft", "cl_min", 0.0)?,
            x.f64("aircraft", "cl_max", 1.2)?,
            x.f64("aircraft", "cl_cruise", 0.5)?,
            x.f64("aircraft", "p_min", 0.0)?,
            x.f64("aircraft", "p_max", 1.0)?,
            x.f64("aircraft", "mu_max_deg", 30.0)?.to_radians(),
            x.f64("aircraft", "p_rate_max", 6.216)?,
            x.f64("aircraft", "cl_rate_max", 1.865)?,
            x.f64("aircraft", "mu_rate_max", 1.085)?,
        )
        .map_err(|e| invalid(&e))?;

        let wind_kind = match x
            .choice(
                "wind",
                "kind",
                "sinusoidal",
                &["constant", "sinusoidal", "sinusoidal-stochastic"],
            )?
            .as_str()
        {
            "constant" => WindFieldKind::Constant,
            "sinusoidal" => WindFieldKind::Sinusoidal,
            _ => WindFieldKind::SinusoidalStochastic,
        };
        let wind = WindFieldParams {
            kind: wind_kind,
            w_m_fps: x.f64("wind", "w_m_fps", 15.0)?,
            psi_w_rad: x.f64("wind", "psi_w_deg", 0.0)?.to_radians(),
            omega_w_rad_per_ft: x.f64("wind", "omega_w_rad_per_ft", 0.05)?,
            phase_rad: x.f64("wind", "phase_deg", 0.0)?.to_radians(),
            ou_sigma_fps: x.f64("wind", "ou_sigma_fps", 0.0)?,
            ou_tau_s: x.f64("wind", "ou_tau_s", 5.0)?,
            seed: x.u64("wind", "seed", 0)?,
        };

        let guidance = GuidanceConfig::from_physical(
            x.f64("guidance", "dt_update_s", 4.0)?,
            x.f64("guidance", "dv_max_fps", 5.0)?,
            x.f64("guidance", "dpsi_max_deg", 30.0)?.to_radians(),
            x.f64("guidance", "fd_step_v", 1e-4)?,
            x.f64("guidance", "fd_step_psi", 1e-4)?,
            x.f64("guidance", "levenberg_lambda0", 1e-3)?,
            &basis,
        )
        .map_err(|e| invalid(&e))?;

        let defaults = TrackingGains::default();
        let gains = TrackingGains {
            k_v: x.f64("guidance", "k_v", defaults.k_v)?,
            k_psi: x.f64("guidance", "k_psi", defaults.k_psi)?,
            k_gamma: x.f64("guidance", "k_gamma", defaults.k_gamma)?,
        };

        let scenario_kind = match x
            .choice(
                "scenario",
                "kind",
                "adjusted",
                &["reference", "adjusted", "adjusted-airspeed-only"],
            )?
            .as_str()
        {
            "reference" => ScenarioKind::Reference,
            "adjusted" => ScenarioKind::Adjusted,
            _ => ScenarioKind::AdjustedAirspeedOnly,
        };

        let config = Self {
            basis,
            aircraft,
            wind,
            guidance,
            gains,
            scenario_kind,
            flight_time_s: x.f64("scenario", "flight_time_s", 1200.0)?,
            sim_rate_hz: x.f64("scenario", "sim_rate_hz", 50.0)?,
            initial_heading_rad: x.f64("scenario", "initial_heading_deg", 90.0)?.to_radians(),
            altitude_ft: x.f64("scenario", "altitude_ft", 15_000.0)?,
            output_rate_hz: match x.f64("scenario", "output_rate_hz", 1.0)? {
                rate if rate > 0.0 => Some(rate),
                _ => None,
            },
            heading_step_rad: x.f64("scenario", "heading_step_deg", 5.0)?.to_radians(),
            frequencies_rad_per_ft: x.f64_list(
                "scenario",
                "frequencies_rad_per_ft",
                &[0.005, 0.01, 0.02, 0.035, 0.05, 0.08, 0.12, 0.2],
            )?,
        };
        x.reject_unknown()?;
        Ok(config)
    }

    pub fn defaults() -> Self {
        Self::from_raw(&RawConfig::default()).expect("library defaults are valid")
    }

    /// Builds the scenario spec this configuration describes.
    pub fn to_scenario_spec(&self) -> ScenarioSpec {
        let initial_state = State {
            v_bar: crate::guidance::reference_airspeed(&self.aircraft),
            psi: self.initial_heading_rad,
            gamma: 0.0,
            x_bar: 0.0,
            y_bar: 0.0,
            h_bar: self.basis.distance_to_normalized(self.altitude_ft),
        };
        ScenarioSpec {
            kind: self.scenario_kind,
            initial_state,
            flight_time_s: self.flight_time_s,
            sim_rate_hz: self.sim_rate_hz,
            guidance: self.guidance,
            wind: self.wind,
            gains: self.gains,
            aircraft: self.aircraft,
            basis: self.basis,
            output_rate_hz: self.output_rate_hz,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_yields_defaults() {
        let config = RunConfig::defaults();
        assert_eq!(config.sim_rate_hz, 50.0);
        assert_eq!(config.flight_time_s, 1200.0);
        assert_eq!(config.wind.kind, WindFieldKind::Sinusoidal);
        assert_eq!(config.frequencies_rad_per_ft.len(), 8);
    }

    #[test]
    fn parses_sections_comments_and_values() {
        let text = "\
# comment
[aircraft]
cd0 = 0.04   # inline comment

[wind]
kind = constant
w_m_fps = 8.5
";
        let raw = RawConfig::parse(text).unwrap();
        let config = RunConfig::from_raw(&raw).unwrap();
        assert_eq!(config.aircraft.cd0, 0.04);
        assert_eq!(config.wind.kind, WindFieldKind::Constant);
        assert_eq!(config.wind.w_m_fps, 8.5);
    }

    #[test]
    fn unknown_key_names_line() {
        let text = "[aircraft]\nnot_a_key = 1\n";
        let raw = RawConfig::parse(text).unwrap();
        let err = RunConfig::from_raw(&raw).unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                section: "aircraft".into(),
                key: "not_a_key".into(),
                line: 2
            }
        );
    }

    #[test]
    fn bad_number_names_key_and_line() {
        let text = "[wind]\nw_m_fps = fast\n";
        let raw = RawConfig::parse(text).unwrap();
        let err = RunConfig::from_raw(&raw).unwrap_err();
        assert!(matches!(err, ConfigError::BadValue { line: 2, .. }));
        assert!(err.to_string().contains("w_m_fps"));
    }

    #[test]
    fn key_outside_section_rejected() {
        let err = RawConfig::parse("cd0 = 0.04\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }));
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut raw = RawConfig::parse("[scenario]\nflight_time_s = 60\n").unwrap();
        raw.apply_override("scenario.flight_time_s=120").unwrap();
        raw.apply_override("wind.seed = 7").unwrap();
        let config = RunConfig::from_raw(&raw).unwrap();
        assert_eq!(config.flight_time_s, 120.0);
        assert_eq!(config.wind.seed, 7);
        assert!(raw.apply_override("no_dot=1").is_err());
    }

    #[test]
    fn choice_keys_validate() {
        let raw = RawConfig::parse("[scenario]\nkind = sideways\n").unwrap();
        assert!(RunConfig::from_raw(&raw).is_err());
    }
}
