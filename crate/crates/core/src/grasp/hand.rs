use nalgebra::{Matrix3, SMatrix, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{make_capsule, ManifoldMesh};
use crate::se3::{adjoint, exp_so3, rot_z, Pose, Twist};

/// Number of hand velocity coordinates: palm body twist plus 4 × 3 joints.
pub const HAND_DOF: usize = 18;
pub const FINGERS: usize = 4;

/// One finger: a base frame on the palm and three revolute joints.
///
/// In the finger frame the finger hangs along −z. Joints apply in the order
/// MCP abduction, MCP flexion, IP flexion; the proximal link runs from the MCP
/// joint to the IP joint, and the distal capsule hangs from the IP joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingerConfig {
    pub name: String,
    /// MCP joint position in the palm frame, mm.
    pub base_position: [f64; 3],
    /// Rotation of the finger frame about the palm z-axis, degrees.
    pub base_yaw_deg: f64,
    pub abduction_axis: [f64; 3],
    pub flexion_axis: [f64; 3],
    pub ip_axis: [f64; 3],
}

/// Hand geometry, loaded from the `[hand]` table of a run config.
///
/// ```toml
/// [hand]
/// palm_position = [0.0, 0.0, 45.0]
/// proximal_length = 40.0
/// distal_length = 30.0
/// distal_diameter = 14.0
/// contact_polar_deg = 60.0
///
/// [[hand.fingers]]
/// name = "index"
/// base_position = [-22.0, 25.0, 0.0]
/// base_yaw_deg = 0.0
/// abduction_axis = [0.0, 1.0, 0.0]
/// flexion_axis = [-1.0, 0.0, 0.0]
/// ip_axis = [-1.0, 0.0, 0.0]
/// # ... three more fingers
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HandConfig {
    /// Rest position of the palm frame in the world, mm. The palm is axis-aligned at rest.
    pub palm_position: [f64; 3],
    pub proximal_length: f64,
    /// Overall capsule length including both caps, mm.
    pub distal_length: f64,
    pub distal_diameter: f64,
    /// Fingertips touch the object this far around from its top, degrees.
    pub contact_polar_deg: f64,
    pub fingers: Vec<FingerConfig>,
}

impl Default for HandConfig {
    fn default() -> Self {
        let finger = |name: &str, x: f64, y: f64, yaw: f64| FingerConfig {
            name: name.into(),
            base_position: [x, y, 0.0],
            base_yaw_deg: yaw,
            abduction_axis: [0.0, 1.0, 0.0],
            flexion_axis: [-1.0, 0.0, 0.0],
            ip_axis: [-1.0, 0.0, 0.0],
        };
        Self {
            palm_position: [0.0, 0.0, 45.0],
            proximal_length: 40.0,
            distal_length: 30.0,
            distal_diameter: 14.0,
            contact_polar_deg: 60.0,
            fingers: vec![
                finger("index", -22.0, 25.0, 0.0),
                finger("middle", 0.0, 25.0, 0.0),
                finger("ring", 22.0, 25.0, 0.0),
                finger("thumb", 0.0, -25.0, 180.0),
            ],
        }
    }
}

impl HandConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.fingers.len() != FINGERS {
            return bad(format!("hand needs exactly {FINGERS} fingers, got {}", self.fingers.len()));
        }
        if !(self.proximal_length > 0.0 && self.distal_diameter > 0.0) {
            return bad("link dimensions must be positive".into());
        }
        if !(self.distal_length >= self.distal_diameter) {
            return bad("distal capsule must be at least as long as it is wide".into());
        }
        for f in &self.fingers {
            for axis in [f.abduction_axis, f.flexion_axis, f.ip_axis] {
                if Vector3::from(axis).norm() < 1e-9 {
                    return bad(format!("finger {} has a zero joint axis", f.name));
                }
            }
        }
        Ok(())
    }

    /// Fingertip sphere center in the distal capsule frame.
    pub fn tip_center(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, -(0.5 * self.distal_length - 0.5 * self.distal_diameter))
    }
}

/// Hand configuration: palm pose and the 12 joint angles (finger-major).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandState {
    pub palm: Pose,
    pub joints: [f64; 3 * FINGERS],
}

impl HandState {
    /// Applies an 18-vector of palm body twist and joint rates for `dt`.
    pub fn advanced(&self, u_dot: &SMatrix<f64, HAND_DOF, 1>, dt: f64) -> Self {
        let palm_twist = Twist::from_vector(&u_dot.fixed_rows::<6>(0).into_owned());
        let mut joints = self.joints;
        for (j, q) in joints.iter_mut().enumerate() {
            *q += u_dot[6 + j] * dt;
        }
        Self { palm: crate::se3::rk4_pose_step(&self.palm, &palm_twist, dt), joints }
    }
}

/// World frames of one finger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerPoses {
    pub base: Pose,
    /// After abduction.
    pub abduction: Pose,
    /// Proximal link frame, after MCP flexion.
    pub proximal: Pose,
    /// IP joint frame, after IP flexion.
    pub ip: Pose,
    /// Distal capsule frame (capsule centered on its origin along z).
    pub distal: Pose,
}

#[derive(Debug, Clone)]
pub struct HandModel {
    pub config: HandConfig,
    pub distal_mesh: ManifoldMesh,
}

fn unit(a: [f64; 3]) -> Vector3<f64> {
    Vector3::from(a).normalize()
}

impl HandModel {
    pub fn new(config: HandConfig, capsule_segments: (usize, usize)) -> Result<Self> {
        config.validate()?;
        let distal_mesh =
            make_capsule(config.distal_length, config.distal_diameter, capsule_segments.0, capsule_segments.1)?;
        Ok(Self { config, distal_mesh })
    }

    pub fn rest_palm(&self) -> Pose {
        Pose::from_translation(Vector3::from(self.config.palm_position))
    }

    fn joint_axes(&self, k: usize) -> [Vector3<f64>; 3] {
        let f = &self.config.fingers[k];
        [unit(f.abduction_axis), unit(f.flexion_axis), unit(f.ip_axis)]
    }

    /// World frames of finger `k`.
    pub fn finger_poses(&self, palm: &Pose, joints: &[f64], k: usize) -> FingerPoses {
        let f = &self.config.fingers[k];
        let [a0, a1, a2] = self.joint_axes(k);
        let q = &joints[3 * k..3 * k + 3];
        let rot = |axis: &Vector3<f64>, angle: f64| Pose::from_rotation(exp_so3(&(axis * angle)));
        let base = *palm * Pose::new(rot_z(f.base_yaw_deg.to_radians()), Vector3::from(f.base_position));
        let abduction = base * rot(&a0, q[0]);
        let proximal = abduction * rot(&a1, q[1]);
        let ip =
            proximal * Pose::from_translation(Vector3::new(0.0, 0.0, -self.config.proximal_length)) * rot(&a2, q[2]);
        let distal = ip * Pose::from_translation(Vector3::new(0.0, 0.0, -0.5 * self.config.distal_length));
        FingerPoses { base, abduction, proximal, ip, distal }
    }

    pub fn forward_kinematics(&self, state: &HandState) -> Vec<FingerPoses> {
        (0..FINGERS).map(|k| self.finger_poses(&state.palm, &state.joints, k)).collect()
    }

    /// Forward kinematics from an 18-vector: palm exponential coordinates
    /// (relative to the rest palm) followed by the joint angles.
    pub fn forward_kinematics_vector(&self, u: &SMatrix<f64, HAND_DOF, 1>) -> (Pose, Vec<FingerPoses>) {
        let palm = self.rest_palm() * crate::se3::exp_map(&Twist::from_vector(&u.fixed_rows::<6>(0).into_owned()), 1.0);
        let mut joints = [0.0; 3 * FINGERS];
        for (j, q) in joints.iter_mut().enumerate() {
            *q = u[6 + j];
        }
        let state = HandState { palm, joints };
        (palm, self.forward_kinematics(&state))
    }

    /// Body Jacobian (6 × 18) of finger `k`'s distal frame with respect to
    /// the palm body twist and joint rates.
    pub fn distal_jacobian(&self, state: &HandState, k: usize) -> SMatrix<f64, 6, HAND_DOF> {
        let poses = self.finger_poses(&state.palm, &state.joints, k);
        let inv = poses.distal.inverse();
        let mut j = SMatrix::<f64, 6, HAND_DOF>::zeros();
        j.fixed_view_mut::<6, 6>(0, 0).copy_from(&adjoint(&(inv * state.palm)));
        let axes = self.joint_axes(k);
        for (i, frame) in [poses.abduction, poses.proximal, poses.ip].iter().enumerate() {
            let col = adjoint(&(inv * *frame)) * Vector6::new(axes[i].x, axes[i].y, axes[i].z, 0.0, 0.0, 0.0);
            j.set_column(6 + 3 * k + i, &col);
        }
        j
    }

    /// Joint angles of finger `k` that put its fingertip sphere center at the
    /// world point `target`, by damped least squares from `seed`.
    pub fn solve_fingertip(&self, palm: &Pose, k: usize, target: &Vector3<f64>, seed: [f64; 3]) -> Result<[f64; 3]> {
        let mut joints = [0.0; 3 * FINGERS];
        joints[3 * k..3 * k + 3].copy_from_slice(&seed);
        let tip = self.config.tip_center();
        let state = |joints: [f64; 3 * FINGERS]| HandState { palm: *palm, joints };
        for _ in 0..500 {
            let s = state(joints);
            let d = self.finger_poses(palm, &joints, k).distal;
            let err = target - d.transform_point(&tip);
            if err.norm() < 1e-12 {
                let mut q = [0.0; 3];
                q.copy_from_slice(&joints[3 * k..3 * k + 3]);
                return Ok(q);
            }
            // Point Jacobian in world coordinates from the body Jacobian.
            let jb = self.distal_jacobian(&s, k);
            let mut jp = Matrix3::zeros();
            for i in 0..3 {
                let col = jb.column(6 + 3 * k + i);
                let w = Vector3::new(col[0], col[1], col[2]);
                let v = Vector3::new(col[3], col[4], col[5]);
                jp.set_column(i, &(d.rotation * (v + w.cross(&tip))));
            }
            let lambda = 1e-6;
            let jt = jp.transpose();
            let dq = jt * (jp * jt + Matrix3::identity() * lambda).try_inverse().unwrap_or_else(Matrix3::zeros) * err;
            for i in 0..3 {
                joints[3 * k + i] += dq[i];
            }
        }
        Err(Error::Config(format!("fingertip of finger {k} cannot reach {target:?}")))
    }
}
