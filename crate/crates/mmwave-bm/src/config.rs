//! TOML configuration for the simulation entry points. Every section has
//! defaults matching the canonical study case, so an empty file is a valid
//! configuration.

use serde::{Deserialize, Serialize};

use crate::channel::LinkBudget;
use crate::engine::{build_study_case, ProtocolKind, TrackingSpec};
use crate::error::EngineError;
use crate::geometry::{Obstacle, Vec3};
use crate::learning::TrainConfig;
use crate::mobility::{MobilityModel, PredictorSpec, RegressorSpec};
use crate::protocols::FrameConfig;
use crate::scenario::{Area, BsSpec, GridSpec, IrsSpec, Scenario};

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BsSection {
    pub position: [f64; 3],
    pub array_elements: usize,
    pub boresight_azimuth: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrsSection {
    pub id: usize,
    pub position: [f64; 3],
    pub surface_normal_azimuth: f64,
    pub elements: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstacleSection {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

/// Explicit scenario description; omit the whole `[scenario]` section to use
/// the built-in study case.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSection {
    pub bs: BsSection,
    #[serde(default)]
    pub irs: Vec<IrsSection>,
    #[serde(default)]
    pub obstacle: Vec<ObstacleSection>,
    pub area: Area,
    pub ue_height: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSection {
    pub resolution: f64,
    pub holdout_fraction: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            resolution: 1.0,
            holdout_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainSection {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub momentum: f64,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            hidden: vec![64, 64],
            learning_rate: 0.05,
            epochs: 200,
            batch_size: 64,
            momentum: 0.9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSection {
    pub protocols: Vec<String>,
    pub user_counts: Vec<usize>,
    pub fanout: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            protocols: vec![
                "exhaustive".into(),
                "hierarchical".into(),
                "ml".into(),
            ],
            user_counts: vec![10, 25, 50, 100],
            fanout: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSection {
    ConstantVelocity { velocity: [f64; 3] },
    Waypoint { points: Vec<[f64; 3]>, speed: f64 },
    RandomWalk { step_std: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackingSection {
    pub start: [f64; 3],
    pub model: ModelSection,
    pub slots: u64,
    pub track_period: u64,
    /// `linear` or `regressor`.
    pub predictor: String,
}

impl Default for TrackingSection {
    fn default() -> Self {
        TrackingSection {
            start: [45.0, 5.0, 1.5],
            model: ModelSection::ConstantVelocity {
                velocity: [0.0, 10.0, 0.0],
            },
            slots: 90_000,
            track_period: 100,
            predictor: "linear".into(),
        }
    }
}

/// Root configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub scenario: Option<ScenarioSection>,
    #[serde(default)]
    pub link: Option<LinkBudget>,
    #[serde(default)]
    pub frame: Option<FrameConfig>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub tracking: TrackingSection,
}

fn default_seed() -> u64 {
    7
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            seed: default_seed(),
            scenario: None,
            link: None,
            frame: None,
            grid: GridSection::default(),
            train: TrainSection::default(),
            sweep: SweepSection::default(),
            tracking: TrackingSection::default(),
        }
    }
}

impl AppConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, EngineError> {
        let text = std::fs::read_to_string(path).map_err(|e| EngineError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, EngineError> {
        let cfg: AppConfig =
            toml::from_str(text).map_err(|e| EngineError::Config(e.to_string()))?;
        cfg.link().validate().map_err(EngineError::Channel)?;
        Ok(cfg)
    }

    /// The configured scenario, or the built-in study case when the
    /// `[scenario]` section is omitted.
    pub fn scenario(&self) -> Result<Scenario, EngineError> {
        match &self.scenario {
            None => build_study_case(),
            Some(sec) => {
                let irss = sec
                    .irs
                    .iter()
                    .map(|i| IrsSpec {
                        id: i.id,
                        position: v3(i.position),
                        surface_normal_azimuth: i.surface_normal_azimuth,
                        elements: i.elements,
                    })
                    .collect();
                let obstacles = sec
                    .obstacle
                    .iter()
                    .map(|o| Obstacle::new(v3(o.min), v3(o.max)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(EngineError::Scenario)?;
                Scenario::new(
                    BsSpec {
                        position: v3(sec.bs.position),
                        array_elements: sec.bs.array_elements,
                        boresight_azimuth: sec.bs.boresight_azimuth,
                    },
                    irss,
                    obstacles,
                    sec.area,
                    sec.ue_height,
                )
                .map_err(EngineError::Scenario)
            }
        }
    }

    pub fn link(&self) -> LinkBudget {
        self.link.clone().unwrap_or_default()
    }

    pub fn frame(&self) -> FrameConfig {
        self.frame.clone().unwrap_or_default()
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            resolution: self.grid.resolution,
            holdout_fraction: self.grid.holdout_fraction,
            seed: self.seed,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.train.learning_rate,
            epochs: self.train.epochs,
            batch_size: self.train.batch_size,
            seed: self.seed,
            momentum: self.train.momentum,
        }
    }

    pub fn protocols(&self) -> Result<Vec<ProtocolKind>, EngineError> {
        self.sweep
            .protocols
            .iter()
            .map(|p| {
                let mut kind: ProtocolKind = p.parse()?;
                if let ProtocolKind::Hierarchical { fanout } = &mut kind {
                    *fanout = self.sweep.fanout;
                }
                Ok(kind)
            })
            .collect()
    }

    pub fn tracking_spec(&self) -> Result<TrackingSpec, EngineError> {
        let model = match &self.tracking.model {
            ModelSection::ConstantVelocity { velocity } => MobilityModel::ConstantVelocity {
                velocity: v3(*velocity),
            },
            ModelSection::Waypoint { points, speed } => MobilityModel::Waypoint {
                points: points.iter().copied().map(v3).collect(),
                speed: *speed,
            },
            ModelSection::RandomWalk { step_std } => MobilityModel::RandomWalk {
                step_std: *step_std,
                seed: self.seed,
            },
        };
        let predictor = match self.tracking.predictor.as_str() {
            "linear" => PredictorSpec::LinearExtrapolation,
            "regressor" => PredictorSpec::OnlineRegressor(RegressorSpec {
                train: crate::learning::TrainConfig {
                    seed: self.seed,
                    ..RegressorSpec::default().train
                },
                ..RegressorSpec::default()
            }),
            other => {
                return Err(EngineError::Config(format!(
                    "unknown predictor `{other}` (expected `linear` or `regressor`)"
                )))
            }
        };
        Ok(TrackingSpec {
            start: v3(self.tracking.start),
            model,
            slots: self.tracking.slots,
            track_period: self.tracking.track_period,
            predictor,
        })
    }

    /// Canonical text echo of the effective configuration, embedded in
    /// reports for provenance.
    pub fn echo(&self) -> String {
        toml::to_string_pretty(self).unwrap_or_default()
    }
}
