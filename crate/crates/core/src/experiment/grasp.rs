//! Four-finger hand rolling a procedural object about its long axis.

use nalgebra::{SMatrix, Vector3};

use super::config::{RunConfig, Scenario};
use super::metrics::{metrics_row, MetricsRow};
use super::run::{at_step, ContactRecord, PoseRecord, RunOutput, Sample};
use crate::error::{Error, Result};
use crate::grasp::{initial_grasp, plan_step_toward, GraspObject, HandModel, HandState, HAND_DOF};
use crate::integrators::{advance_contact_frames, contact_error_twist, ContactState, MeshPair};
use crate::mesh::{collide_with, InsideTest};
use crate::se3::{rk4_pose_step, Pose, Twist};

/// Object rotation rate about its long axis, rad/s.
pub const OBJECT_RATE: f64 = 0.1;

pub fn grasp_object(scenario: Scenario) -> Result<GraspObject> {
    match scenario {
        Scenario::GraspCylinder => Ok(GraspObject::Cylinder { diameter: 20.0, length: 80.0 }),
        Scenario::GraspEllipsoid => Ok(GraspObject::Ellipsoid { semi_axes: Vector3::new(15.0, 10.0, 10.0) }),
        _ => Err(Error::Config(format!("{scenario:?} is not a grasp scenario"))),
    }
}

/// Object body twist at time `t`: constant rotation, reversed at half time.
pub fn object_twist(t: f64, duration: f64) -> Twist {
    let sign = if t < 0.5 * duration - 1e-9 { 1.0 } else { -1.0 };
    Twist::new(Vector3::new(sign * OBJECT_RATE, 0.0, 0.0), Vector3::zeros())
}

fn sample(t: f64, hand: &HandModel, hs: &HandState, object: &Pose, contacts: &[ContactState]) -> Sample {
    let mut bodies = vec![PoseRecord::new("object", object), PoseRecord::new("palm", &hs.palm)];
    for (k, f) in hand.forward_kinematics(hs).iter().enumerate() {
        bodies.push(PoseRecord::new(&format!("{}_distal", hand.config.fingers[k].name), &f.distal));
    }
    let contacts = contacts
        .iter()
        .enumerate()
        .map(|(k, c)| {
            ContactRecord::new(
                &hand.config.fingers[k].name,
                &c.world_contact0().translation,
                &c.world_contact1().translation,
            )
        })
        .collect();
    Sample { t, bodies, contacts }
}

pub fn simulate_grasp(config: &RunConfig) -> Result<RunOutput> {
    let object = grasp_object(config.scenario)?;
    let res = config.resolution;
    let object_mesh = object.mesh(res.cylinder_segments(), res.sphere_subdivisions())?;
    let hand = HandModel::new(config.hand.clone(), res.capsule_segments())?;
    let mut object_pose = Pose::identity();
    let (mut hs, mut contacts) = initial_grasp(&hand, &object, &object_mesh, &object_pose)?;
    let meshes = MeshPair { mesh0: &object_mesh, mesh1: &hand.distal_mesh };
    let names: Vec<String> = hand.config.fingers.iter().map(|f| f.name.clone()).collect();

    let inside = InsideTest::from_seed(config.seed);
    let row = |t: f64, c: &ContactState, v: &Twist| -> MetricsRow {
        metrics_row(t, c, &collide_with(meshes.mesh0, &c.pose0, meshes.mesh1, &c.pose1, &inside), v)
    };
    let steps = config.steps();
    let mut metrics: Vec<Vec<MetricsRow>> = contacts.iter().map(|c| vec![row(0.0, c, &Twist::zero())]).collect();
    let mut trajectory = vec![sample(0.0, &hand, &hs, &object_pose, &contacts)];
    let mut u_prev = SMatrix::<f64, HAND_DOF, 1>::zeros();
    let dt = config.dt;

    for k in 0..steps {
        let t = k as f64 * dt;
        let twist_o = object_twist(t, config.duration);
        let targets = contacts
            .iter()
            .map(|c| Ok(config.gains.apply(&contact_error_twist(c)?).scaled(1.0 / dt)))
            .collect::<Result<Vec<_>>>()
            .map_err(at_step(k))?;
        for c in contacts.iter_mut() {
            c.twist0 = twist_o;
        }
        let plan = plan_step_toward(&hand, &hs, &twist_o, &contacts, &targets, &config.weights, &u_prev)
            .map_err(at_step(k))?;

        object_pose = rk4_pose_step(&object_pose, &twist_o, dt);
        hs = hs.advanced(&plan.u_dot, dt);
        let fingers = hand.forward_kinematics(&hs);
        for (i, c) in contacts.iter_mut().enumerate() {
            // Contacts follow the realized motion minus the stabilizing part,
            // which only moves the finger back onto them.
            let nominal = plan.contact_twists[i] - targets[i];
            let mut next = advance_contact_frames(meshes, c, &nominal, dt).map_err(at_step(k))?;
            next.pose0 = object_pose;
            next.pose1 = fingers[i].distal;
            next.shadow_rotation1 = next.pose1.rotation;
            *c = next;
        }
        u_prev = plan.u_dot;
        let t1 = (k + 1) as f64 * dt;
        for (i, c) in contacts.iter().enumerate() {
            metrics[i].push(row(t1, c, &plan.contact_twists[i]));
        }
        trajectory.push(sample(t1, &hand, &hs, &object_pose, &contacts));
    }
    Ok(RunOutput { config: config.clone(), contact_names: names, metrics, trajectory })
}
