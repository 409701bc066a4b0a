//! Experiment configuration file (TOML).
//!
//! Angles are written in degrees and leg numbers are 1-based, as on the
//! robot; everything is converted to radians and 0-based indices here.
//! Every key is optional and falls back to the library defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detector::DetectorConfig;
use crate::error::{Error, Result};
use crate::identifier::{GaConfig, PipelineSettings};
use crate::morphology::{MorphologyVector, RobotSpec};
use crate::scenarios::{RecordShape, Scenario};
use crate::signal::{CorruptionConfig, FilterConfig, RateJitter};
use crate::surrogate::{GaitParams, SurrogateModel, SurrogateParams, TerrainBias};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotSection {
    pub leg_count: usize,
    pub links_per_leg: Vec<usize>,
    pub link_lengths_m: Vec<Vec<f64>>,
    pub link_masses_kg: Vec<Vec<f64>>,
    pub body_mass_kg: f64,
    pub mount_angle_deg: Vec<f64>,
    pub mount_radius_m: f64,
}

impl Default for RobotSection {
    fn default() -> Self {
        let s = RobotSpec::default();
        RobotSection {
            leg_count: s.leg_count,
            links_per_leg: s.links_per_leg,
            link_lengths_m: s.link_lengths,
            link_masses_kg: s.link_masses,
            body_mass_kg: s.body_mass,
            mount_angle_deg: s.mount_angle.iter().map(|a| a.to_degrees()).collect(),
            mount_radius_m: s.mount_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitSection {
    pub period_s: f64,
    pub step_height_m: f64,
    pub stride_m: f64,
    pub duty: f64,
    pub group_a: Vec<usize>,
    pub group_b: Vec<usize>,
}

impl Default for GaitSection {
    fn default() -> Self {
        let g = GaitParams::default();
        let one_based = |v: &[usize]| v.iter().map(|i| i + 1).collect();
        GaitSection {
            period_s: g.period,
            step_height_m: g.step_height,
            stride_m: g.stride,
            duty: g.duty,
            group_a: one_based(&g.group_a),
            group_b: one_based(&g.group_b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaSection {
    pub pop_size: usize,
    pub generations: usize,
    pub cr: f64,
    pub mr: f64,
    /// One row per leg, or a single row used for every leg.
    pub p_table: Vec<Vec<f64>>,
    pub sim_time_s: f64,
    pub convergence_patience: Option<usize>,
    pub donor_per_gene: bool,
}

impl Default for GaSection {
    fn default() -> Self {
        let g = GaConfig::default();
        GaSection {
            pop_size: g.pop_size,
            generations: g.generations,
            cr: g.cr,
            mr: g.mr,
            p_table: vec![g.p_table[0].clone()],
            sim_time_s: g.sim_time,
            convergence_patience: g.convergence_patience,
            donor_per_gene: g.donor_per_gene,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSection {
    pub fc_hz: f64,
    pub pc: f64,
}

impl Default for FilterSection {
    fn default() -> Self {
        let f = FilterConfig::default();
        FilterSection {
            fc_hz: f.f_cutoff,
            pc: f.p_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub window_s: f64,
    pub step_s: f64,
    pub fluct_threshold_deg: f64,
    pub persistence_s: f64,
    pub motion_floor_deg: f64,
    /// Moving-average width applied before locating motion, seconds.
    pub motion_smoothing_s: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        let d = DetectorConfig::default();
        let p = PipelineSettings::default();
        DetectorSection {
            window_s: d.window,
            step_s: d.step,
            fluct_threshold_deg: d.fluct_threshold.to_degrees(),
            persistence_s: d.persistence,
            motion_floor_deg: d.motion_floor.to_degrees(),
            motion_smoothing_s: p.motion_smoothing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorruptionSection {
    /// Whether `scenario` corrupts its synthetic recording.
    pub enabled: bool,
    pub noise_sigma_deg: f64,
    pub drift_deg_per_s: f64,
    pub delay_s: f64,
    /// Re-time samples at random rates in `[rate_low_hz, rate_high_hz]`.
    pub jitter: bool,
    pub rate_low_hz: f64,
    pub rate_high_hz: f64,
}

impl Default for CorruptionSection {
    fn default() -> Self {
        let j = RateJitter::default();
        CorruptionSection {
            enabled: false,
            noise_sigma_deg: 1.0,
            drift_deg_per_s: 0.1,
            delay_s: 0.3,
            jitter: true,
            rate_low_hz: j.low_hz,
            rate_high_hz: j.high_hz,
        }
    }
}

/// The synthetic recording used by `simulate` and `scenario`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    /// A named damage scenario; overrides `morphology` when set.
    pub scenario: Option<String>,
    pub morphology: String,
    pub slope_deg: f64,
    pub heading_deg: f64,
    pub lead_in_s: f64,
    pub walk_s: f64,
    pub sample_interval_s: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let shape = RecordShape::default();
        ExperimentSection {
            scenario: None,
            morphology: "[111][111][111][111][111][111]".into(),
            slope_deg: 0.0,
            heading_deg: 0.0,
            lead_in_s: shape.lead_in,
            walk_s: shape.walk,
            sample_interval_s: shape.dt,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    /// Input trajectory, relative to the config file.
    pub input: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

/// A complete, serializable description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Points on the comparison grid.
    pub samples: usize,
    pub robot: RobotSection,
    pub gait: GaitSection,
    pub surrogate: SurrogateParams,
    pub ga: GaSection,
    pub filter: FilterSection,
    pub detector: DetectorSection,
    pub corruption: CorruptionSection,
    pub experiment: ExperimentSection,
    pub paths: PathsSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            samples: 1024,
            robot: RobotSection::default(),
            gait: GaitSection::default(),
            surrogate: SurrogateParams::default(),
            ga: GaSection::default(),
            filter: FilterSection::default(),
            detector: DetectorSection::default(),
            corruption: CorruptionSection::default(),
            experiment: ExperimentSection::default(),
            paths: PathsSection::default(),
        }
    }
}

fn zero_based(v: &[usize], what: &str) -> Result<Vec<usize>> {
    v.iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| Error::Config(format!("{what}: legs are numbered from 1")))
        })
        .collect()
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() as u64 + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.paths.input, &mut cfg.paths.output_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok((cfg, text))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.settings()?.validate()?;
        self.corruption_config()?.validate()?;
        self.experiment_morphology()?;
        self.record_shape()?;
        Ok(())
    }

    pub fn spec(&self) -> Result<RobotSpec> {
        let r = &self.robot;
        let spec = RobotSpec {
            leg_count: r.leg_count,
            links_per_leg: r.links_per_leg.clone(),
            link_lengths: r.link_lengths_m.clone(),
            link_masses: r.link_masses_kg.clone(),
            body_mass: r.body_mass_kg,
            mount_angle: r.mount_angle_deg.iter().map(|a| a.to_radians()).collect(),
            mount_radius: r.mount_radius_m,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gait(&self) -> Result<GaitParams> {
        let g = &self.gait;
        Ok(GaitParams {
            period: g.period_s,
            step_height: g.step_height_m,
            stride: g.stride_m,
            duty: g.duty,
            group_a: zero_based(&g.group_a, "gait.group_a")?,
            group_b: zero_based(&g.group_b, "gait.group_b")?,
        })
    }

    pub fn ga_config(&self, spec: &RobotSpec) -> Result<GaConfig> {
        let g = &self.ga;
        // A single row stands for every leg; its length must still match.
        let p_table = match g.p_table.len() {
            1 => vec![g.p_table[0].clone(); spec.leg_count],
            _ => g.p_table.clone(),
        };
        Ok(GaConfig {
            pop_size: g.pop_size,
            generations: g.generations,
            cr: g.cr,
            mr: g.mr,
            p_table,
            sim_time: g.sim_time_s,
            rng_seed: self.seed,
            convergence_patience: g.convergence_patience,
            donor_per_gene: g.donor_per_gene,
        })
    }

    pub fn detector_config(&self) -> DetectorConfig {
        let d = &self.detector;
        DetectorConfig {
            window: d.window_s,
            step: d.step_s,
            fluct_threshold: d.fluct_threshold_deg.to_radians(),
            persistence: d.persistence_s,
            motion_floor: d.motion_floor_deg.to_radians(),
        }
    }

    /// Everything the identification pipeline needs.
    pub fn settings(&self) -> Result<PipelineSettings> {
        let spec = self.spec()?;
        let settings = PipelineSettings {
            ga: self.ga_config(&spec)?,
            gait: self.gait()?,
            filter: FilterConfig {
                f_cutoff: self.filter.fc_hz,
                p_threshold: self.filter.pc,
                ..FilterConfig::default()
            },
            detector: self.detector_config(),
            model: SurrogateModel::new(self.surrogate.clone())?,
            samples: self.samples,
            motion_smoothing: self.detector.motion_smoothing_s,
            spec,
            ..PipelineSettings::default()
        };
        settings.validate()?;
        Ok(settings)
    }

    pub fn corruption_config(&self) -> Result<CorruptionConfig> {
        let c = &self.corruption;
        Ok(CorruptionConfig {
            noise_sigma: c.noise_sigma_deg.to_radians(),
            drift_rate: c.drift_deg_per_s.to_radians(),
            delay: c.delay_s,
            jitter: c.jitter.then_some(RateJitter {
                low_hz: c.rate_low_hz,
                high_hz: c.rate_high_hz,
            }),
            rng_seed: self.seed,
        })
    }

    pub fn experiment_morphology(&self) -> Result<MorphologyVector> {
        let spec = self.spec()?;
        match &self.experiment.scenario {
            Some(name) => Scenario::by_name(name)?.truth(&spec),
            None => MorphologyVector::parse_for(&self.experiment.morphology, &spec),
        }
    }

    pub fn terrain(&self) -> Option<TerrainBias> {
        let e = &self.experiment;
        (e.slope_deg != 0.0).then(|| TerrainBias {
            slope: e.slope_deg.to_radians(),
            heading: e.heading_deg.to_radians(),
        })
    }

    pub fn record_shape(&self) -> Result<RecordShape> {
        let e = &self.experiment;
        if !(e.sample_interval_s > 0.0 && e.lead_in_s >= 0.0 && e.walk_s > 0.0) {
            return Err(Error::Config(
                "experiment needs sample_interval_s > 0, lead_in_s >= 0 and walk_s > 0".into(),
            ));
        }
        Ok(RecordShape {
            lead_in: e.lead_in_s,
            walk: e.walk_s,
            dt: e.sample_interval_s,
        })
    }
}

/// Hex SHA-256 of the exact config text, embedded in every report.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = PipelineConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        let s = cfg.settings().unwrap();
        assert_eq!(s.spec, RobotSpec::default());
        assert_eq!(s.gait, GaitParams::default());
        assert_eq!(s.ga, GaConfig::default());
        assert_eq!(s.detector, DetectorConfig::default());
        assert_eq!(s.filter, FilterConfig::default());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = PipelineConfig { seed: 42, ..PipelineConfig::default() };
        cfg.experiment.morphology = "[100][111][111][100][111][111]".into();
        cfg.experiment.slope_deg = 7.0;
        let back = PipelineConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
        let t = back.terrain().unwrap();
        assert!((t.slope - 7f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn overrides_and_units() {
        let cfg = PipelineConfig::from_toml_str(
            "seed = 3\n[filter]\nfc_hz = 8.0\npc = 0.05\n[detector]\nfluct_threshold_deg = 4.0\n[gait]\ngroup_a = [2, 3, 6]\ngroup_b = [1, 4, 5]\n",
        )
        .unwrap();
        let s = cfg.settings().unwrap();
        assert_eq!(s.filter.f_cutoff, 8.0);
        assert_eq!(s.ga.rng_seed, 3);
        assert!((s.detector.fluct_threshold - 4f64.to_radians()).abs() < 1e-15);
        assert_eq!(s.gait.group_a, vec![1, 2, 5]);
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(
            PipelineConfig::from_toml_str("[filter]\nbogus = 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            PipelineConfig::from_toml_str("[ga]\npop_size = 7\n"),
            Err(Error::Config(_))
        ));
        assert!(PipelineConfig::from_toml_str("[gait]\ngroup_a = [0, 4, 5]\n").is_err());
        assert!(PipelineConfig::from_toml_str("[experiment]\nmorphology = \"[101]\"\n").is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        assert_eq!(config_hash("a"), config_hash("a"));
        assert_ne!(config_hash("a"), config_hash("b"));
        assert_eq!(config_hash("").len(), 64);
    }
}
