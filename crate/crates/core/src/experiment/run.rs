use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::config::{RunConfig, Scenario};
use super::metrics::MetricsRow;
use super::output;
use crate::error::{Error, Result};
use crate::se3::Pose;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub name: String,
    pub position: [f64; 3],
    /// Row-major rotation matrix.
    pub rotation: [[f64; 3]; 3],
}

impl PoseRecord {
    pub fn new(name: &str, pose: &Pose) -> Self {
        let r = &pose.rotation;
        Self {
            name: name.to_string(),
            position: [pose.translation.x, pose.translation.y, pose.translation.z],
            rotation: [
                [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactRecord {
    pub name: String,
    /// World contact point on body 0 (ring or object).
    pub point0: [f64; 3],
    /// World contact point on body 1 (sphere or fingertip).
    pub point1: [f64; 3],
}

impl ContactRecord {
    pub fn new(name: &str, p0: &Vector3<f64>, p1: &Vector3<f64>) -> Self {
        Self { name: name.to_string(), point0: [p0.x, p0.y, p0.z], point1: [p1.x, p1.y, p1.z] }
    }
}

/// Body poses and contact points at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub bodies: Vec<PoseRecord>,
    pub contacts: Vec<ContactRecord>,
}

/// Per-contact run statistics, all recomputable from the metrics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactSummary {
    pub name: String,
    pub final_total_geodesic: f64,
    pub max_abs_separation: f64,
    /// Mean of `180 − alignment` over all rows, degrees.
    pub mean_alignment_error: f64,
    pub max_alignment_error: f64,
    pub final_slippage: f64,
    pub max_abs_slippage: f64,
    pub max_sliding: f64,
}

impl ContactSummary {
    pub fn from_rows(name: &str, rows: &[MetricsRow]) -> Self {
        let max = |f: &dyn Fn(&MetricsRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
        let last = rows.last();
        Self {
            name: name.to_string(),
            final_total_geodesic: last.map_or(0.0, |r| r.total_geodesic),
            max_abs_separation: max(&|r| r.separation.abs()),
            mean_alignment_error: if rows.is_empty() {
                0.0
            } else {
                rows.iter().map(|r| r.alignment_error()).sum::<f64>() / rows.len() as f64
            },
            max_alignment_error: max(&|r| r.alignment_error()),
            final_slippage: last.map_or(0.0, |r| r.slippage),
            max_abs_slippage: max(&|r| r.slippage.abs()),
            max_sliding: max(&|r| r.sliding),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: RunConfig,
    /// Integration steps taken (rows per contact minus one).
    pub steps: usize,
    pub contacts: Vec<ContactSummary>,
}

/// Everything a run produces, before it is written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub config: RunConfig,
    pub contact_names: Vec<String>,
    /// One table per contact, one row per instant starting at t = 0.
    pub metrics: Vec<Vec<MetricsRow>>,
    pub trajectory: Vec<Sample>,
}

impl RunOutput {
    pub fn summary(&self) -> Summary {
        Summary {
            config: self.config.clone(),
            steps: self.metrics.first().map_or(0, |m| m.len().saturating_sub(1)),
            contacts: self
                .contact_names
                .iter()
                .zip(&self.metrics)
                .map(|(n, rows)| ContactSummary::from_rows(n, rows))
                .collect(),
        }
    }
}

/// Runs a scenario in memory.
pub fn simulate(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    match config.scenario {
        Scenario::SphereRingInside | Scenario::SphereRingOutside => super::ring::simulate_ring(config),
        Scenario::GraspCylinder | Scenario::GraspEllipsoid => super::grasp::simulate_grasp(config),
    }
}

/// Runs a scenario and writes its metrics CSV(s), `trajectory.json` and
/// `summary.json` into `out_dir`. Returns the written paths.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<(RunOutput, Vec<PathBuf>)> {
    let out = simulate(config)?;
    let paths = output::write_all(&out, out_dir).map_err(|e| Error::Config(format!("{}: {e}", out_dir.display())))?;
    Ok((out, paths))
}

/// Wraps an error with the step it happened at.
pub(crate) fn at_step(step: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Step { .. } => e,
        other => Error::Step { step, source: Box::new(other) },
    }
}
