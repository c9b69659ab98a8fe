//! Multi-finger hand, contact Jacobians and the rolling-preferring velocity
//! planner for in-hand manipulation.

mod hand;
mod planner;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::integrators::ContactState;
use crate::kinematics::ContactFrame;
use crate::mesh::{make_cylinder, make_ellipsoid, ray_cast, ManifoldMesh};
use crate::se3::Pose;

pub use hand::{FingerConfig, FingerPoses, HandConfig, HandModel, HandState, FINGERS, HAND_DOF};
pub use planner::{contact_jacobians, plan_step, plan_step_toward, PlanResult, PlannerWeights};

/// Procedural grasp objects. Both have their long axis along body x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraspObject {
    Cylinder { diameter: f64, length: f64 },
    Ellipsoid { semi_axes: Vector3<f64> },
}

impl GraspObject {
    /// Half-extent along the long axis.
    pub fn half_length(&self) -> f64 {
        match *self {
            GraspObject::Cylinder { length, .. } => 0.5 * length,
            GraspObject::Ellipsoid { semi_axes } => semi_axes.x,
        }
    }

    /// `segments` is (radial, axial) for the cylinder; the ellipsoid uses
    /// `subdivisions`.
    pub fn mesh(&self, segments: (usize, usize), subdivisions: u32) -> Result<ManifoldMesh> {
        match *self {
            GraspObject::Cylinder { diameter, length } => {
                let m = make_cylinder(diameter, length, segments.0, segments.1)?;
                // Cyclic axis permutation: the generator's z becomes x.
                let vertices = m.vertices().iter().map(|v| Vector3::new(v.z, v.x, v.y)).collect();
                ManifoldMesh::new(vertices, m.faces().to_vec())
            }
            GraspObject::Ellipsoid { semi_axes } => make_ellipsoid(semi_axes, subdivisions),
        }
    }

    /// Point and outward normal of the analytic surface at axial position `x`,
    /// in the direction `(0, sin β, cos β)` around the long axis.
    pub fn surface_point(&self, x: f64, beta: f64) -> Result<(Vector3<f64>, Vector3<f64>)> {
        let e = Vector3::new(0.0, beta.sin(), beta.cos());
        match *self {
            GraspObject::Cylinder { diameter, length } => {
                if x.abs() > 0.5 * length {
                    return Err(Error::Config(format!("contact at x = {x} is off the cylinder")));
                }
                Ok((Vector3::new(x, 0.0, 0.0) + e * (0.5 * diameter), e))
            }
            GraspObject::Ellipsoid { semi_axes: s } => {
                let rest = 1.0 - (x / s.x).powi(2);
                if rest <= 0.0 {
                    return Err(Error::Config(format!("contact at x = {x} is off the ellipsoid")));
                }
                let t = (rest / ((e.y / s.y).powi(2) + (e.z / s.z).powi(2))).sqrt();
                let p = Vector3::new(x, t * e.y, t * e.z);
                let n = Vector3::new(p.x / (s.x * s.x), p.y / (s.y * s.y), p.z / (s.z * s.z)).normalize();
                Ok((p, n))
            }
        }
    }
}

/// Places every fingertip on the object and builds the contact states.
///
/// Finger `k` touches the object at the axial position of its base (scaled
/// to stay within 55% of the object's half-length), on the side of the palm
/// its base sits on, `contact_polar_deg` around from the top. Joint angles
/// come from fingertip inverse kinematics with the palm at rest.
pub fn initial_grasp(
    hand: &HandModel,
    object: &GraspObject,
    object_mesh: &ManifoldMesh,
    object_pose: &Pose,
) -> Result<(HandState, Vec<ContactState>)> {
    let cfg = &hand.config;
    let palm = hand.rest_palm();
    let reach = 0.55 * object.half_length();
    let widest = cfg.fingers.iter().map(|f| f.base_position[0].abs()).fold(0.0, f64::max);
    let scale = if widest > reach { reach / widest } else { 1.0 };
    let beta = cfg.contact_polar_deg.to_radians();
    let radius = 0.5 * cfg.distal_diameter;

    let mut joints = [0.0; 3 * FINGERS];
    let mut targets = Vec::with_capacity(FINGERS);
    for (k, f) in cfg.fingers.iter().enumerate() {
        let side = if f.base_position[1] >= 0.0 { 1.0 } else { -1.0 };
        let (p, n) = object.surface_point(f.base_position[0] * scale, side * beta)?;
        let (p, n) = (object_pose.transform_point(&p), object_pose.transform_vector(&n));
        let tip = p + n * radius;
        let q = hand.solve_fingertip(&palm, k, &tip, [0.0, -0.3, 1.9])?;
        joints[3 * k..3 * k + 3].copy_from_slice(&q);
        targets.push((p, n, tip));
    }
    let state = HandState { palm, joints };

    let mut contacts = Vec::with_capacity(FINGERS);
    for (k, (p, n, tip)) in targets.into_iter().enumerate() {
        let distal = hand.finger_poses(&palm, &joints, k).distal;
        let miss = || Error::Config(format!("finger {k} does not reach the object surface"));
        let (sp0, _) = ray_cast(object_mesh, object_pose, &(p + n), &-n).ok_or_else(miss)?;
        let (sp1, _) = ray_cast(&hand.distal_mesh, &distal, &tip, &-n).ok_or_else(miss)?;
        let hint = Vector3::x();
        let f0 = ContactFrame::on_mesh(object_mesh, sp0, &object_pose.inverse_transform_vector(&hint))?;
        let f1 = ContactFrame::on_mesh(&hand.distal_mesh, sp1, &distal.inverse_transform_vector(&hint))?;
        contacts.push(ContactState::new(*object_pose, distal, f0, f1));
    }
    Ok((state, contacts))
}
