use nalgebra::Vector3;

use super::ContactState;
use crate::error::{Error, Result};
use crate::kinematics::{
    primitive_geometry, solve_body1_twist, solve_contact_rates, spin_of, ContactFrame, ParametricSurface,
};
use crate::mesh::{closest_point, ray_cast, ManifoldMesh, SurfacePoint};
use crate::se3::{exp_map, Pose, Twist};

/// Explicit Euler step on analytic charts: chart rates from the full induced
/// twist (torsion included), body poses by the exponential of their twists.
/// Nothing pulls the contacts back together, so discretization error drifts.
pub fn primitive_step(
    surfaces: (&ParametricSurface, &ParametricSurface),
    state: &ContactState,
    v_l0l1: &Twist,
    dt: f64,
) -> Result<ContactState> {
    let chart = |f: &ContactFrame| f.chart().ok_or_else(|| Error::Config("primitive step needs chart contacts".into()));
    let (u0, w0) = chart(&state.frame0)?;
    let (u1, w1) = chart(&state.frame1)?;
    let geom0 = primitive_geometry(surfaces.0, u0, w0)?;
    let geom1 = primitive_geometry(surfaces.1, u1, w1)?;
    let psi = spin_of(&state.relative_contact_pose().rotation);
    let rates = solve_contact_rates(v_l0l1, &geom0, &geom1, psi)?;
    let twist1 = solve_body1_twist(v_l0l1, &state.pose0, &state.twist0, &state.pose1, &state.frame1.pose());

    let mut next = *state;
    next.frame0 = ContactFrame::on_surface(surfaces.0, u0 + rates.g_dot0.x * dt, w0 + rates.g_dot0.y * dt)?;
    next.frame1 = ContactFrame::on_surface(surfaces.1, u1 + rates.g_dot1.x * dt, w1 + rates.g_dot1.y * dt)?;
    next.pose0 = state.pose0 * exp_map(&state.twist0, dt);
    next.pose1 = state.pose1 * exp_map(&twist1, dt);
    next.shadow_rotation1 = next.pose1.rotation;
    next.accumulated_geodesic0 += (geom0.m * rates.g_dot0).norm() * dt;
    next.accumulated_geodesic1 += (geom1.m * rates.g_dot1).norm() * dt;
    Ok(next)
}

/// Mesh point corresponding to chart point `(u, v)`: cast from just outside
/// the analytic surface along its inward normal, falling back to the closest
/// mesh point on a miss. `pose` places the mesh in the primitive's frame.
pub fn project_to_mesh(
    surface: &ParametricSurface,
    u: f64,
    v: f64,
    mesh: &ManifoldMesh,
    pose: &Pose,
) -> Result<SurfacePoint> {
    let d = surface.derivatives(u, v)?;
    let p = d.f;
    let n: Vector3<f64> = d.normal();
    let offset = mesh.mean_edge_length();
    let origin = p + n * offset;
    if let Some((sp, t)) = ray_cast(mesh, pose, &origin, &-n) {
        if t <= 3.0 * offset {
            return Ok(sp);
        }
    }
    Ok(closest_point(mesh, pose, &p).0)
}
