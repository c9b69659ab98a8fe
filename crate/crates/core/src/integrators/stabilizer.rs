use serde::{Deserialize, Serialize};

use super::ContactState;
use crate::error::Result;
use crate::kinematics::{ideal_contact_pose, spin_of};
use crate::se3::{axis_angle_anti_align, exp_so3, log_map, Pose, Twist};

/// Gains of the contact stabilizer: the fraction of the angular and linear
/// contact error removed per step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilizerGains {
    pub k_omega: f64,
    pub k_v: f64,
}

impl Default for StabilizerGains {
    fn default() -> Self {
        Self { k_omega: 0.05, k_v: 0.05 }
    }
}

impl StabilizerGains {
    pub fn apply(&self, error: &Twist) -> Twist {
        Twist::new(error.angular * self.k_omega, error.linear * self.k_v)
    }
}

/// Twist in `C1` that carries contact frame 1 into ideal contact with frame 0,
/// aligning only the z-axes (the spin about the normal is left free).
pub fn contact_error_twist(state: &ContactState) -> Result<Twist> {
    let t = state.relative_contact_pose();
    let ideal = ideal_contact_pose(spin_of(&t.rotation));
    let error = t.inverse() * ideal;
    // z0 in C1 coordinates; rotate C1's own z onto −z0.
    let z0 = t.rotation.transpose().column(2).into_owned();
    let a = axis_angle_anti_align(&z0, &nalgebra::Vector3::z());
    log_map(&Pose::new(exp_so3(&a), error.translation))
}

/// Adds the gain-weighted stabilizing twist to the commanded twist.
pub fn stabilize(state: &ContactState, v_l0l1: &Twist, gains: &StabilizerGains) -> Result<Twist> {
    Ok(*v_l0l1 + gains.apply(&contact_error_twist(state)?))
}
