//! Analysis configuration, loadable from TOML or JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detection::Scenario;
use crate::error::ConfigError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: Scenario,
    pub detection: DetectionConfig,
    pub scoring: ScoringConfig,
    pub report: ReportConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    /// Pairs farther apart than this are never examined, m.
    pub gating_radius: f64,
    /// Prediction horizon for THW, TTC and mTTCP, s.
    pub horizon: f64,
    pub drac_min: f64,
    /// Lateral offset up to which a road user counts as on another's path, m.
    pub follow_lateral_tolerance: f64,
    pub follow_heading_tolerance_deg: f64,
    pub beta_min_urban_deg: f64,
    pub beta_min_highway_deg: f64,
    /// Below this speed a road user is standing, m/s.
    pub standing_speed: f64,
    pub wp_min_duration: f64,
    /// Speed that proves the intention to move on after standing, m/s.
    pub wp_resume_speed: f64,
    pub direction_min_speed: f64,
    pub behavior_eps: f64,
    /// Clusters holding less than this share of a region's points are unusual.
    pub behavior_minor_share: f64,
    pub path_spacing: f64,
    pub conflict_raster: f64,
    /// Body radius of pedestrians and cyclists when sweeping their path, m.
    pub vru_body_radius: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            gating_radius: 75.0,
            horizon: 5.0,
            drac_min: 0.5,
            follow_lateral_tolerance: 1.0,
            follow_heading_tolerance_deg: 20.0,
            beta_min_urban_deg: 20.0,
            beta_min_highway_deg: 2.0,
            standing_speed: 0.5,
            wp_min_duration: 1.0,
            wp_resume_speed: 1.0,
            direction_min_speed: 1.0,
            behavior_eps: 0.7,
            behavior_minor_share: 0.1,
            path_spacing: 0.5,
            conflict_raster: 0.5,
            vru_body_radius: 0.5,
        }
    }
}

impl DetectionConfig {
    pub fn beta_min(&self, scenario: Scenario) -> f64 {
        match scenario {
            Scenario::Urban => self.beta_min_urban_deg,
            Scenario::Highway => self.beta_min_highway_deg,
        }
        .to_radians()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    /// Criticality factor for TTC and DRAC.
    pub kappa: f64,
    pub gamma_interaction: f64,
    pub gamma_anomaly: f64,
    /// Upper bound on a region context weight.
    pub context_weight_cap: f64,
    /// Metric values are floored here before taking reciprocals, s.
    pub metric_floor: f64,
    pub caps: ScoreCaps,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            kappa: 1.0,
            gamma_interaction: 5.0,
            gamma_anomaly: 0.1,
            context_weight_cap: 10.0,
            metric_floor: 1e-3,
            caps: ScoreCaps::default(),
        }
    }
}

/// Per-type score maxima. TTC and DRAC caps are multiplied by kappa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreCaps {
    pub thw: f64,
    pub dmttcp: f64,
    pub ttc: f64,
    pub drac: f64,
    pub wp: f64,
    pub lon_accel: f64,
    pub lat_accel: f64,
    pub sideslip: f64,
    pub yaw_rate: f64,
    pub velocity: f64,
    pub trajectory: f64,
    pub area_usage: f64,
    pub driving_direction: f64,
}

impl Default for ScoreCaps {
    // the yaw-rate cap is the tabulated 3.141, not pi
    #[allow(clippy::approx_constant)]
    fn default() -> Self {
        ScoreCaps {
            thw: 2.0,
            dmttcp: 4.0,
            ttc: 2.0,
            drac: 2.0,
            wp: 7.75,
            lon_accel: 10.0,
            lat_accel: 20.0,
            sideslip: 8.725,
            yaw_rate: 3.141,
            velocity: 10.0,
            trajectory: 10.0,
            area_usage: 5.0,
            driving_direction: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub heatmap_resolution: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { heatmap_resolution: 2.0 }
    }
}

impl Config {
    /// Read a config file; `.json` files are parsed as JSON, anything else
    /// as TOML. Missing keys take their defaults.
    pub fn load(path: impl AsRef<Path>) -> Result<Config, ConfigError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { file: path.to_path_buf(), source })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg: Config = if is_json {
            serde_json::from_str(&text)
                .map_err(|e| ConfigError::Parse { file: path.to_path_buf(), message: e.to_string() })?
        } else {
            toml::from_str(&text)
                .map_err(|e| ConfigError::Parse { file: path.to_path_buf(), message: e.to_string() })?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let d = &self.detection;
        let s = &self.scoring;
        let c = &s.caps;
        let positive = [
            ("detection.gating_radius", d.gating_radius),
            ("detection.horizon", d.horizon),
            ("detection.follow_lateral_tolerance", d.follow_lateral_tolerance),
            ("detection.follow_heading_tolerance_deg", d.follow_heading_tolerance_deg),
            ("detection.standing_speed", d.standing_speed),
            ("detection.wp_resume_speed", d.wp_resume_speed),
            ("detection.behavior_eps", d.behavior_eps),
            ("detection.path_spacing", d.path_spacing),
            ("detection.conflict_raster", d.conflict_raster),
            ("detection.vru_body_radius", d.vru_body_radius),
            ("scoring.metric_floor", s.metric_floor),
            ("scoring.context_weight_cap", s.context_weight_cap),
            ("report.heatmap_resolution", self.report.heatmap_resolution),
        ];
        let non_negative = [
            ("detection.drac_min", d.drac_min),
            ("detection.beta_min_urban_deg", d.beta_min_urban_deg),
            ("detection.beta_min_highway_deg", d.beta_min_highway_deg),
            ("detection.wp_min_duration", d.wp_min_duration),
            ("detection.direction_min_speed", d.direction_min_speed),
            ("detection.behavior_minor_share", d.behavior_minor_share),
            ("scoring.gamma_interaction", s.gamma_interaction),
            ("scoring.gamma_anomaly", s.gamma_anomaly),
            ("scoring.caps.thw", c.thw),
            ("scoring.caps.dmttcp", c.dmttcp),
            ("scoring.caps.ttc", c.ttc),
            ("scoring.caps.drac", c.drac),
            ("scoring.caps.wp", c.wp),
            ("scoring.caps.lon_accel", c.lon_accel),
            ("scoring.caps.lat_accel", c.lat_accel),
            ("scoring.caps.sideslip", c.sideslip),
            ("scoring.caps.yaw_rate", c.yaw_rate),
            ("scoring.caps.velocity", c.velocity),
            ("scoring.caps.trajectory", c.trajectory),
            ("scoring.caps.area_usage", c.area_usage),
            ("scoring.caps.driving_direction", c.driving_direction),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::Invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(s.kappa.is_finite() && s.kappa >= 1.0) {
            return Err(ConfigError::Invalid(format!("scoring.kappa must be at least 1, got {}", s.kappa)));
        }
        if d.wp_resume_speed < d.standing_speed {
            return Err(ConfigError::Invalid("detection.wp_resume_speed is below detection.standing_speed".into()));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
