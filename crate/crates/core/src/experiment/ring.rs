//! Sphere rolling once around the 20 mm contact circle of a ring.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use super::config::{Method, RunConfig, Scenario};
use super::metrics::{metrics_row, MetricsRow};
use super::run::{at_step, ContactRecord, PoseRecord, RunOutput, Sample};
use crate::error::{Error, Result};
use crate::integrators::{
    collision_step_with, geodesic_step, primitive_step, solve_spin_psi, ContactState, MeshPair, StepMode,
};
use crate::kinematics::{spin_of, ContactFrame, ParametricSurface};
use crate::mesh::{
    collide_with, make_icosphere, make_ring, ray_cast, CollisionReport, InsideTest, ManifoldMesh, RingSide,
};
use crate::se3::{rot_z, Pose, Twist};

pub const CONTACT_CIRCLE_DIAMETER: f64 = 20.0;
pub const SPHERE_DIAMETER: f64 = 10.0;

/// Closed-form pure rolling of a sphere around the contact circle, with the
/// ring fixed and the sphere spinning only about the vertical axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingRolling {
    pub side: RingSide,
    pub contact_radius: f64,
    pub sphere_radius: f64,
    /// Time for one revolution of the contact, s.
    pub period: f64,
}

impl RingRolling {
    pub fn new(side: RingSide, period: f64) -> Self {
        Self { side, contact_radius: 0.5 * CONTACT_CIRCLE_DIAMETER, sphere_radius: 0.5 * SPHERE_DIAMETER, period }
    }

    /// Angular rate of the contact point around the ring axis.
    pub fn orbit_rate(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Distance of the sphere center from the ring axis.
    pub fn center_radius(&self) -> f64 {
        match self.side {
            RingSide::Inside => self.contact_radius - self.sphere_radius,
            RingSide::Outside => self.contact_radius + self.sphere_radius,
        }
    }

    /// World angular velocity of the sphere about the vertical axis that
    /// makes the contact point instantaneously at rest.
    pub fn spin_rate(&self) -> f64 {
        // Contact velocity: Ω·ρ_c θ̂ + ω ẑ × (±r r̂) = 0.
        let lever = self.contact_radius - self.center_radius();
        -self.orbit_rate() * self.center_radius() / lever
    }

    pub fn center(&self, t: f64) -> Vector3<f64> {
        let a = self.orbit_rate() * t;
        Vector3::new(a.cos(), a.sin(), 0.0) * self.center_radius()
    }

    pub fn rotation(&self, t: f64) -> Matrix3<f64> {
        rot_z(self.spin_rate() * t)
    }

    pub fn contact_point(&self, t: f64) -> Vector3<f64> {
        let a = self.orbit_rate() * t;
        Vector3::new(a.cos(), a.sin(), 0.0) * self.contact_radius
    }

    /// Distance traveled by the contact on the ring (equal on the sphere).
    pub fn path_length(&self, t: f64) -> f64 {
        self.contact_radius * self.orbit_rate() * t
    }
}

pub fn ring_side(scenario: Scenario) -> Result<RingSide> {
    match scenario {
        Scenario::SphereRingInside => Ok(RingSide::Inside),
        Scenario::SphereRingOutside => Ok(RingSide::Outside),
        _ => Err(Error::Config(format!("{scenario:?} is not a ring scenario"))),
    }
}

/// Meshes, analytic surfaces and initial contact states of a ring run.
#[derive(Debug, Clone)]
pub struct RingSetup {
    pub rolling: RingRolling,
    pub ring_mesh: ManifoldMesh,
    pub sphere_mesh: ManifoldMesh,
    pub ring_surface: ParametricSurface,
    pub sphere_surface: ParametricSurface,
    /// Initial state with contacts on the meshes.
    pub mesh_state: ContactState,
    /// Initial state with contacts on the analytic charts.
    pub chart_state: ContactState,
}

/// Spin that leaves the sphere unrotated at the start.
fn initial_psi(frame0: &ContactFrame, frame1: &ContactFrame) -> Result<f64> {
    let (a, b) = (frame0.rotation, frame1.rotation);
    solve_spin_psi(&Matrix3::identity(), &a, &b, spin_of(&(a.transpose() * b)), 1e-12, 100)
}

pub fn ring_setup(config: &RunConfig) -> Result<RingSetup> {
    let side = ring_side(config.scenario)?;
    let period = if config.duration > 0.0 { config.duration } else { 1.0 };
    let rolling = RingRolling::new(side, period);
    let (major_segments, minor_segments) = config.resolution.ring_segments();
    let ring_mesh = make_ring(CONTACT_CIRCLE_DIAMETER, config.tube_diameter, side, major_segments, minor_segments)?;
    let sphere_mesh = make_icosphere(SPHERE_DIAMETER, config.resolution.sphere_subdivisions())?;
    let major = side.major_radius(CONTACT_CIRCLE_DIAMETER, config.tube_diameter);
    let ring_surface = ParametricSurface::Torus { major, minor: 0.5 * config.tube_diameter };
    let sphere_surface = ParametricSurface::Sphere { radius: rolling.sphere_radius };

    // Ring normal at the start contact (10, 0, 0), and the sphere center.
    let n0 = match side {
        RingSide::Inside => -Vector3::x(),
        RingSide::Outside => Vector3::x(),
    };
    let center = rolling.center(0.0);
    let tangent = Vector3::y();
    let miss = || Error::Config("initial contact ray missed the mesh".into());
    let (sp0, _) = ray_cast(&ring_mesh, &Pose::identity(), &Vector3::new(major, 0.0, 0.0), &n0).ok_or_else(miss)?;
    let (sp1, _) = ray_cast(&sphere_mesh, &Pose::identity(), &Vector3::zeros(), &-n0).ok_or_else(miss)?;
    let f0 = ContactFrame::on_mesh(&ring_mesh, sp0, &tangent)?;
    let f1 = ContactFrame::on_mesh(&sphere_mesh, sp1, &tangent)?;
    let mesh_state = ContactState::mated(Pose::identity(), f0, f1, initial_psi(&f0, &f1)?);

    let ring_v = match side {
        RingSide::Inside => PI,
        RingSide::Outside => 0.0,
    };
    let sphere_v = match side {
        RingSide::Inside => 0.0,
        RingSide::Outside => PI,
    };
    let c0 = ContactFrame::on_surface(&ring_surface, 0.0, ring_v)?;
    let c1 = ContactFrame::on_surface(&sphere_surface, 0.0, sphere_v)?;
    let chart_state = ContactState::mated(Pose::identity(), c0, c1, initial_psi(&c0, &c1)?);
    debug_assert!((chart_state.pose1.translation - center).norm() < 1e-9);
    Ok(RingSetup { rolling, ring_mesh, sphere_mesh, ring_surface, sphere_surface, mesh_state, chart_state })
}

/// Prescribed roll-slide twist: the sphere's vertical spin seen from its
/// contact frame, with no linear part.
pub fn prescribed_twist(rolling: &RingRolling, state: &ContactState) -> Twist {
    let r = state.world_contact1().rotation;
    Twist::new(r.transpose() * Vector3::z() * rolling.spin_rate(), Vector3::zeros())
}

fn sample(t: f64, state: &ContactState) -> Sample {
    Sample {
        t,
        bodies: vec![PoseRecord::new("ring", &state.pose0), PoseRecord::new("sphere", &state.pose1)],
        contacts: vec![ContactRecord::new(
            "sphere",
            &state.world_contact0().translation,
            &state.world_contact1().translation,
        )],
    }
}

pub fn simulate_ring(config: &RunConfig) -> Result<RunOutput> {
    let setup = ring_setup(config)?;
    let meshes = MeshPair { mesh0: &setup.ring_mesh, mesh1: &setup.sphere_mesh };
    let inside = InsideTest::from_seed(config.seed);
    let report_of =
        |s: &ContactState| -> CollisionReport { collide_with(meshes.mesh0, &s.pose0, meshes.mesh1, &s.pose1, &inside) };
    let mut state = match config.method {
        Method::Primitive => setup.chart_state,
        _ => setup.mesh_state,
    };
    let steps = config.steps();
    let mut rows: Vec<MetricsRow> = Vec::with_capacity(steps + 1);
    let mut trajectory = Vec::with_capacity(steps + 1);
    rows.push(metrics_row(0.0, &state, &report_of(&state), &Twist::zero()));
    trajectory.push(sample(0.0, &state));
    for k in 0..steps {
        let t = (k + 1) as f64 * config.dt;
        let v = prescribed_twist(&setup.rolling, &state);
        let (next, report) = match config.method {
            Method::Geodesic => {
                let next = geodesic_step(meshes, &state, &v, config.dt, StepMode::ExactMate).map_err(at_step(k))?;
                let report = report_of(&next);
                (next, report)
            }
            Method::Collision => {
                collision_step_with(meshes, &state, &v, config.dt, &config.gains, &inside).map_err(at_step(k))?
            }
            Method::Primitive => {
                let next = primitive_step((&setup.ring_surface, &setup.sphere_surface), &state, &v, config.dt)
                    .map_err(at_step(k))?;
                let report = report_of(&next);
                (next, report)
            }
        };
        state = next;
        rows.push(metrics_row(t, &state, &report, &v));
        trajectory.push(sample(t, &state));
    }
    Ok(RunOutput { config: config.clone(), contact_names: vec!["sphere".into()], metrics: vec![rows], trajectory })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rolling_oracle_has_no_slip() {
        for side in [RingSide::Inside, RingSide::Outside] {
            let r = RingRolling::new(side, 10.0);
            for &t in &[0.0, 1.3, 7.9] {
                let h = 1e-5;
                let c_dot = (r.center(t + h) - r.center(t - h)) / (2.0 * h);
                let w_hat = (r.rotation(t + h) - r.rotation(t - h)) / (2.0 * h) * r.rotation(t).transpose();
                let w = Vector3::new(w_hat[(2, 1)], w_hat[(0, 2)], w_hat[(1, 0)]);
                let p = r.contact_point(t);
                let v = c_dot + w.cross(&(p - r.center(t)));
                assert!(v.norm() < 1e-8, "{side:?} t={t}: {}", v.norm());
                // Contact point is one sphere radius from the center.
                assert_relative_eq!((p - r.center(t)).norm(), 5.0, epsilon = 1e-12);
            }
            assert_relative_eq!(r.path_length(10.0), 20.0 * PI, epsilon = 1e-12);
        }
        assert_relative_eq!(RingRolling::new(RingSide::Inside, 10.0).spin_rate(), -0.2 * PI, epsilon = 1e-12);
        assert_relative_eq!(RingRolling::new(RingSide::Outside, 10.0).spin_rate(), 0.6 * PI, epsilon = 1e-12);
    }

    #[test]
    fn setups_start_in_ideal_contact() {
        for scenario in [Scenario::SphereRingInside, Scenario::SphereRingOutside] {
            let cfg = RunConfig { scenario, resolution: super::super::Resolution::Coarse, ..Default::default() };
            let s = ring_setup(&cfg).unwrap();
            for state in [s.mesh_state, s.chart_state] {
                assert!(state.origin_gap() < 1e-9);
                assert!(state.misalignment() < 1e-9);
                assert!((state.pose1.rotation - Matrix3::identity()).norm() < 1e-2);
            }
            assert!((s.chart_state.pose1.translation - s.rolling.center(0.0)).norm() < 1e-9);
        }
    }
}
