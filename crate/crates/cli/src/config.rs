use serde::{Deserialize, Serialize};

use betaplane::interior::AssemblyOptions;
use betaplane::model::{CoriolisProfile, Grid, PhysicalScales, WindStress};
use betaplane::poincare::{Mode, RayOptions};
use betaplane::residual::StudyTemplate;
use betaplane::rossby::{RossbyParameters, WavePacket};
use betaplane::thermocline::ThermoclineSetup;

/// One experiment, selected by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunConfig {
    Stationary(StationaryConfig),
    ResidualStudy(ResidualStudyConfig),
    Rossby(RossbyConfig),
    PoincareRays(RaysConfig),
    Thermocline(ThermoclineConfig),
    Scales(ScalesConfig),
}

impl RunConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Stationary(_) => "stationary",
            Self::ResidualStudy(_) => "residual-study",
            Self::Rossby(_) => "rossby",
            Self::PoincareRays(_) => "poincare-rays",
            Self::Thermocline(_) => "thermocline",
            Self::Scales(_) => "scales",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryParameters {
    pub epsilon: f64,
    pub nu_h: f64,
    pub delta: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceSettings {
    pub base_step: f64,
    pub halvings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryConfig {
    pub coriolis: CoriolisProfile,
    pub stress: WindStress,
    pub grid: Grid,
    pub parameters: StationaryParameters,
    #[serde(default)]
    pub options: AssemblyOptions,
    /// Also report gradient norms of the layer.
    #[serde(default)]
    pub layer_gradients: bool,
    #[serde(default)]
    pub divergence: Option<DivergenceSettings>,
    #[serde(default = "yes")]
    pub write_fields: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualStudyConfig {
    pub template: StudyTemplate,
    pub epsilons: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RossbyConfig {
    pub params: RossbyParameters,
    pub grid: Grid,
    pub packet: WavePacket,
    /// Half-widths of the monitored region in units of the packet widths.
    pub reach: f64,
    pub times: Vec<f64>,
    #[serde(default = "yes")]
    pub write_fields: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub mode: Mode,
    pub y0: f64,
    pub xi0: f64,
    pub k3: i32,
    #[serde(default)]
    pub k: i32,
    #[serde(default = "unit")]
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampingSettings {
    pub nu_h: f64,
    pub epsilon: f64,
    /// Ratio bound used by the regime classifier.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaysConfig {
    pub rays: Vec<RaySpec>,
    pub duration: f64,
    #[serde(default)]
    pub options: RayOptions,
    /// Latitude band whose exit time is recorded.
    pub y_range: [f64; 2],
    /// Time window of the `|Ξ|` growth fit.
    pub fit_window: [f64; 2],
    #[serde(default)]
    pub damping: Option<DampingSettings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoclineConfig {
    pub setup: ThermoclineSetup,
    pub epsilons: Vec<f64>,
    #[serde(default = "yes")]
    pub write_fields: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalesConfig {
    pub scales: PhysicalScales,
}

fn yes() -> bool {
    true
}

fn unit() -> f64 {
    1.0
}
