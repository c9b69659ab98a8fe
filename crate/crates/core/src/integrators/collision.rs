use super::{follow_frame, stabilize, ContactState, MeshPair, StabilizerGains};
use crate::error::{Error, Result};
use crate::kinematics::solve_body1_twist;
use crate::mesh::{closest_point, collide_with, weighted_penetration_centroid, CollisionReport, InsideTest};
use crate::se3::{rk4_pose_step, Twist};

/// Integrates the bodies first, then relocates both contacts from a collision
/// query: closest points to the weighted penetration centroid when the meshes
/// overlap, mutual closest points otherwise.
///
/// Returns the new state together with the collision report it was built from.
pub fn collision_step(
    meshes: MeshPair<'_>,
    state: &ContactState,
    v_l0l1: &Twist,
    dt: f64,
    gains: &StabilizerGains,
) -> Result<(ContactState, CollisionReport)> {
    collision_step_with(meshes, state, v_l0l1, dt, gains, &InsideTest::default())
}

/// [`collision_step`] with an explicit set of inside-test ray directions.
pub fn collision_step_with(
    meshes: MeshPair<'_>,
    state: &ContactState,
    v_l0l1: &Twist,
    dt: f64,
    gains: &StabilizerGains,
    inside: &InsideTest,
) -> Result<(ContactState, CollisionReport)> {
    let corrected = stabilize(state, v_l0l1, gains)?;
    let commanded = *v_l0l1 + (corrected - *v_l0l1).scaled(1.0 / dt);
    let twist1 = solve_body1_twist(&commanded, &state.pose0, &state.twist0, &state.pose1, &state.frame1.pose());
    let mut next = *state;
    next.pose0 = rk4_pose_step(&state.pose0, &state.twist0, dt);
    next.pose1 = rk4_pose_step(&state.pose1, &twist1, dt);
    next.shadow_rotation1 = next.pose1.rotation;

    let report = collide_with(meshes.mesh0, &next.pose0, meshes.mesh1, &next.pose1, inside);
    let (p0, p1) = if report.is_penetrating() {
        let c = weighted_penetration_centroid(&report)?;
        (closest_point(meshes.mesh0, &next.pose0, &c).0, closest_point(meshes.mesh1, &next.pose1, &c).0)
    } else {
        (report.witness_a, report.witness_b)
    };
    next.frame0 = follow_frame(meshes.mesh0, &state.frame0, p0)?;
    next.frame1 = follow_frame(meshes.mesh1, &state.frame1, p1)?;
    let d0 = (next.frame0.position - state.frame0.position).norm();
    let d1 = (next.frame1.position - state.frame1.position).norm();
    if !(d0.is_finite() && d1.is_finite()) {
        return Err(Error::Config("collision step produced a non-finite contact".into()));
    }
    next.accumulated_geodesic0 += d0;
    next.accumulated_geodesic1 += d1;
    Ok((next, report))
}
