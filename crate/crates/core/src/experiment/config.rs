use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grasp::{HandConfig, PlannerWeights};
use crate::integrators::StabilizerGains;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    SphereRingInside,
    SphereRingOutside,
    GraspCylinder,
    GraspEllipsoid,
}

impl Scenario {
    pub fn is_ring(self) -> bool {
        matches!(self, Scenario::SphereRingInside | Scenario::SphereRingOutside)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Geodesic,
    Collision,
    Primitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Resolution {
    Fine,
    Medium,
    Coarse,
}

impl Resolution {
    /// Icosphere subdivision level for the rolling sphere.
    pub fn sphere_subdivisions(self) -> u32 {
        match self {
            Resolution::Fine => 5,
            Resolution::Medium => 4,
            Resolution::Coarse => 3,
        }
    }

    /// Torus `(major, minor)` segment counts for the ring.
    pub fn ring_segments(self) -> (usize, usize) {
        match self {
            Resolution::Fine => (128, 64),
            Resolution::Medium => (64, 32),
            Resolution::Coarse => (32, 16),
        }
    }

    /// Radial and length segments of the grasped cylinder.
    pub fn cylinder_segments(self) -> (usize, usize) {
        match self {
            Resolution::Fine => (128, 64),
            Resolution::Medium => (64, 32),
            Resolution::Coarse => (32, 16),
        }
    }

    /// `(radial, cap rings)` of the fingertip capsules.
    pub fn capsule_segments(self) -> (usize, usize) {
        match self {
            Resolution::Fine => (64, 16),
            Resolution::Medium => (32, 8),
            Resolution::Coarse => (16, 4),
        }
    }
}

/// Everything that determines a run. Serialized into the run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub method: Method,
    pub resolution: Resolution,
    /// Step size in seconds.
    pub dt: f64,
    /// Simulated time in seconds.
    pub duration: f64,
    pub gains: StabilizerGains,
    pub weights: PlannerWeights,
    pub seed: u64,
    /// Ring tube diameter in mm.
    pub tube_diameter: f64,
    pub hand: HandConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::SphereRingInside,
            method: Method::Geodesic,
            resolution: Resolution::Fine,
            dt: 0.01,
            duration: 10.0,
            gains: StabilizerGains::default(),
            weights: PlannerWeights::default(),
            seed: 0,
            tube_diameter: 6.0,
            hand: HandConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return bad(format!("duration must be non-negative, got {}", self.duration));
        }
        if !(self.gains.k_omega >= 0.0 && self.gains.k_v >= 0.0) {
            return bad("stabilizer gains must be non-negative".into());
        }
        if !(self.weights.w_palm >= 0.0 && self.weights.w_smooth >= 0.0) {
            return bad("planner weights must be non-negative".into());
        }
        if !(self.tube_diameter > 0.0 && self.tube_diameter < 20.0) {
            return bad(format!("tube diameter must be in (0, 20) mm, got {}", self.tube_diameter));
        }
        if !self.scenario.is_ring() && self.method != Method::Geodesic {
            return bad("grasp scenarios are planned with the geodesic method only".into());
        }
        self.hand.validate()
    }

    /// Number of steps: `floor(duration / dt)`.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml_str(&text)
    }
}
