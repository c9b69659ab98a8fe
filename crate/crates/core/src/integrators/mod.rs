//! Time integration of a single roll-slide contact between two bodies.
//!
//! Body 0 is the reference body: its pose and body twist are given. Body 1
//! is driven by the commanded roll-slide twist `V_L0L1`.

mod collision;
mod geodesic;
mod primitive;
mod stabilizer;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geodesic::tangent_basis;
use crate::kinematics::{ideal_contact_pose, ContactFrame, SurfaceLocation};
use crate::mesh::{ManifoldMesh, SurfacePoint};
use crate::se3::{Pose, Twist};

pub use collision::{collision_step, collision_step_with};
pub use geodesic::{advance_contact_frames, geodesic_step, solve_spin_psi, spin_objective, StepMode};
pub use primitive::{primitive_step, project_to_mesh};
pub use stabilizer::{contact_error_twist, stabilize, StabilizerGains};

/// Contact displacement below which a frame keeps its previous x-axis.
const MIN_DISPLACEMENT: f64 = 1e-9;

/// Meshes of the two bodies in contact.
#[derive(Debug, Clone, Copy)]
pub struct MeshPair<'a> {
    pub mesh0: &'a ManifoldMesh,
    pub mesh1: &'a ManifoldMesh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactState {
    pub frame0: ContactFrame,
    pub frame1: ContactFrame,
    pub pose0: Pose,
    pub pose1: Pose,
    /// Body twist of body 0, held constant over a step.
    pub twist0: Twist,
    /// Orientation body 1 would have if its angular velocity were integrated freely.
    pub shadow_rotation1: Matrix3<f64>,
    pub accumulated_geodesic0: f64,
    pub accumulated_geodesic1: f64,
    /// Number of geodesic traces that passed exactly through a mesh vertex.
    pub vertex_hits: usize,
}

impl ContactState {
    /// State whose body 1 pose satisfies the ideal contact constraint at spin `psi`.
    pub fn mated(pose0: Pose, frame0: ContactFrame, frame1: ContactFrame, psi: f64) -> Self {
        let pose1 = mate(&pose0, &frame0, &frame1, psi);
        Self::new(pose0, pose1, frame0, frame1)
    }

    pub fn new(pose0: Pose, pose1: Pose, frame0: ContactFrame, frame1: ContactFrame) -> Self {
        Self {
            frame0,
            frame1,
            pose0,
            pose1,
            twist0: Twist::zero(),
            shadow_rotation1: pose1.rotation,
            accumulated_geodesic0: 0.0,
            accumulated_geodesic1: 0.0,
            vertex_hits: 0,
        }
    }

    /// World pose of contact frame 0.
    pub fn world_contact0(&self) -> Pose {
        self.pose0 * self.frame0.pose()
    }

    pub fn world_contact1(&self) -> Pose {
        self.pose1 * self.frame1.pose()
    }

    /// `T_C0C1`.
    pub fn relative_contact_pose(&self) -> Pose {
        self.world_contact0().inverse() * self.world_contact1()
    }

    /// Distance between the two contact origins in the world.
    pub fn origin_gap(&self) -> f64 {
        (self.world_contact0().translation - self.world_contact1().translation).norm()
    }

    /// Angle (radians) by which the contact z-axes miss perfect anti-alignment.
    pub fn misalignment(&self) -> f64 {
        let z0 = self.world_contact0().rotation.column(2).into_owned();
        let z1 = self.world_contact1().rotation.column(2).into_owned();
        z0.angle(&-z1)
    }

    /// Angle between the world contact z-axes in degrees (180 is ideal).
    pub fn alignment_deg(&self) -> f64 {
        180.0 - self.misalignment().to_degrees()
    }
}

/// Pose of body 1 that puts its contact frame in ideal contact with frame 0.
pub fn mate(pose0: &Pose, frame0: &ContactFrame, frame1: &ContactFrame, psi: f64) -> Pose {
    *pose0 * frame0.pose() * ideal_contact_pose(psi) * frame1.pose().inverse()
}

/// Frame at `p` with the outward normal as z and x along the motion from `old`.
pub(crate) fn follow_frame(mesh: &ManifoldMesh, old: &ContactFrame, p: SurfacePoint) -> Result<ContactFrame> {
    let pos = mesh.position(&p);
    let disp = pos - old.position;
    let mut hints: Vec<Vector3<f64>> = Vec::with_capacity(3);
    if disp.norm() >= MIN_DISPLACEMENT {
        hints.push(disp);
    }
    hints.push(old.x());
    hints.push(old.y());
    for hint in hints {
        match tangent_basis(mesh, &p, &hint) {
            Ok((x, y, z)) => {
                return Ok(ContactFrame {
                    rotation: Matrix3::from_columns(&[x, y, z]),
                    position: pos,
                    location: SurfaceLocation::Mesh(p),
                })
            }
            Err(Error::DegenerateHint) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateHint)
}
