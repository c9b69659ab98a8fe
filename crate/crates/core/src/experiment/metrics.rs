use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::integrators::ContactState;
use crate::mesh::{CollisionReport, CollisionStatus};
use crate::se3::Twist;

/// Contact-quality metrics of one contact at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    /// s
    pub t: f64,
    /// Signed mm: positive is a gap, negative the mean penetration depth.
    pub separation: f64,
    /// Angle between the world contact normals, degrees (180 is ideal).
    pub alignment: f64,
    /// Difference of the distances traveled by the contact on each body, mm.
    pub slippage: f64,
    /// Tangential relative speed at the contact, mm/s.
    pub sliding: f64,
    /// Mean of the distances traveled on the two bodies, mm.
    pub total_geodesic: f64,
    /// Midpoint of the two world contact points, mm.
    pub centroid: [f64; 3],
}

impl MetricsRow {
    pub const HEADER: [&'static str; 9] = [
        "t",
        "separation",
        "alignment",
        "slippage",
        "sliding",
        "total_geodesic",
        "centroid_x",
        "centroid_y",
        "centroid_z",
    ];

    /// Fields in header order.
    pub fn values(&self) -> [f64; 9] {
        [
            self.t,
            self.separation,
            self.alignment,
            self.slippage,
            self.sliding,
            self.total_geodesic,
            self.centroid[0],
            self.centroid[1],
            self.centroid[2],
        ]
    }

    /// Alignment error from the ideal 180°, degrees.
    pub fn alignment_error(&self) -> f64 {
        180.0 - self.alignment
    }
}

pub fn metric_separation(report: &CollisionReport) -> f64 {
    match report.status {
        CollisionStatus::Separated => report.distance_or_depth,
        CollisionStatus::Penetrating => {
            let n = report.penetration_points.len();
            if n == 0 {
                return -report.distance_or_depth;
            }
            -report.penetration_points.iter().map(|p| p.1).sum::<f64>() / n as f64
        }
    }
}

pub fn metric_alignment(state: &ContactState) -> f64 {
    state.alignment_deg().clamp(0.0, 180.0)
}

pub fn metric_slippage(state: &ContactState) -> f64 {
    state.accumulated_geodesic0 - state.accumulated_geodesic1
}

pub fn metric_sliding(v_l0l1: &Twist) -> f64 {
    v_l0l1.linear.xy().norm()
}

pub fn metric_total_geodesic(state: &ContactState) -> f64 {
    0.5 * (state.accumulated_geodesic0 + state.accumulated_geodesic1)
}

pub fn contact_centroid(state: &ContactState) -> Vector3<f64> {
    0.5 * (state.world_contact0().translation + state.world_contact1().translation)
}

/// All metrics of `state` at time `t`, given the collision report of the
/// current poses and the relative twist applied over the step that led here.
pub fn metrics_row(t: f64, state: &ContactState, report: &CollisionReport, v_l0l1: &Twist) -> MetricsRow {
    let c = contact_centroid(state);
    MetricsRow {
        t,
        separation: metric_separation(report),
        alignment: metric_alignment(state),
        slippage: metric_slippage(state),
        sliding: metric_sliding(v_l0l1),
        total_geodesic: metric_total_geodesic(state),
        centroid: [c.x, c.y, c.z],
    }
}
