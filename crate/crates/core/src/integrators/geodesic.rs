use nalgebra::{Matrix3, Vector2};

use super::{follow_frame, mate, stabilize, ContactState, MeshPair, StabilizerGains};
use crate::error::{Error, Result};
use crate::geodesic::{trace_geodesic, TangentVector};
use crate::kinematics::{
    default_curvature_step, estimate_curvature, ideal_contact_pose, solve_body1_twist, solve_contact_velocities,
    ContactFrame,
};
use crate::mesh::ManifoldMesh;
use crate::se3::{log_so3, rk4_pose_step, rk4_rotation_step, Twist};

/// How body 1 is placed after the contacts have been advanced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    /// Place body 1 so the contacts coincide exactly, choosing the spin that
    /// best matches the freely integrated orientation.
    ExactMate,
    /// Integrate body 1's twist, corrected by the contact stabilizer.
    Stabilize(StabilizerGains),
}

const SPIN_TOL: f64 = 1e-10;
const SPIN_MAX_ITERS: usize = 50;

/// Advances contact frames and body 1 by one explicit step of length `dt`.
pub fn geodesic_step(
    meshes: MeshPair<'_>,
    state: &ContactState,
    v_l0l1: &Twist,
    dt: f64,
    mode: StepMode,
) -> Result<ContactState> {
    let commanded = match mode {
        StepMode::ExactMate => *v_l0l1,
        StepMode::Stabilize(gains) => {
            let corrected = stabilize(state, v_l0l1, &gains)?;
            *v_l0l1 + (corrected - *v_l0l1).scaled(1.0 / dt)
        }
    };

    let twist1 = solve_body1_twist(&commanded, &state.pose0, &state.twist0, &state.pose1, &state.frame1.pose());

    // The contacts follow the nominal twist; the stabilizer correction only
    // moves body 1 onto them.
    let mut next = advance_contact_frames(meshes, state, v_l0l1, dt)?;
    next.pose0 = rk4_pose_step(&state.pose0, &state.twist0, dt);
    let (frame0, frame1) = (next.frame0, next.frame1);

    match mode {
        StepMode::ExactMate => {
            next.shadow_rotation1 = rk4_rotation_step(&state.shadow_rotation1, &twist1.angular, dt);
            let a = next.pose0.rotation * frame0.rotation;
            let psi0 = crate::kinematics::spin_of(&(a.transpose() * state.pose1.rotation * frame1.rotation));
            let psi = solve_spin_psi(&next.shadow_rotation1, &a, &frame1.rotation, psi0, SPIN_TOL, SPIN_MAX_ITERS)?;
            next.pose1 = mate(&next.pose0, &frame0, &frame1, psi);
        }
        StepMode::Stabilize(_) => {
            next.pose1 = rk4_pose_step(&state.pose1, &twist1, dt);
            next.shadow_rotation1 = next.pose1.rotation;
        }
    }
    Ok(next)
}

/// Advances both contact frames along the geodesics implied by `v_l0l1`
/// over `dt`, leaving the body poses untouched.
pub fn advance_contact_frames(
    meshes: MeshPair<'_>,
    state: &ContactState,
    v_l0l1: &Twist,
    dt: f64,
) -> Result<ContactState> {
    let (g0, g1) = contact_rates(meshes, state, v_l0l1)?;
    let mut next = *state;
    let (frame0, len0, hits0) = advance_contact(meshes.mesh0, &state.frame0, &(g0 * dt))?;
    let (frame1, len1, hits1) = advance_contact(meshes.mesh1, &state.frame1, &(g1 * dt))?;
    next.frame0 = frame0;
    next.frame1 = frame1;
    next.accumulated_geodesic0 += len0;
    next.accumulated_geodesic1 += len1;
    next.vertex_hits += hits0 + hits1;
    Ok(next)
}

/// Geodesic-chart contact velocities at the current state.
pub(crate) fn contact_rates(
    meshes: MeshPair<'_>,
    state: &ContactState,
    v_l0l1: &Twist,
) -> Result<(Vector2<f64>, Vector2<f64>)> {
    if v_l0l1.to_vector().norm() == 0.0 {
        return Ok((Vector2::zeros(), Vector2::zeros()));
    }
    let k0 = estimate_curvature(meshes.mesh0, &state.frame0, default_curvature_step(meshes.mesh0))?;
    let k1 = estimate_curvature(meshes.mesh1, &state.frame1, default_curvature_step(meshes.mesh1))?;
    solve_contact_velocities(v_l0l1, &k0, &k1, &state.relative_contact_pose().rotation)
}

/// Traces the contact by chart displacement `dg` (in the frame's x/y axes) and
/// rebuilds its frame. Returns the new frame, traced length and vertex hits.
pub(crate) fn advance_contact(
    mesh: &ManifoldMesh,
    frame: &ContactFrame,
    dg: &Vector2<f64>,
) -> Result<(ContactFrame, f64, usize)> {
    let p = frame.surface_point().ok_or_else(|| Error::Config("geodesic step needs mesh contacts".into()))?;
    if dg.norm() == 0.0 {
        return Ok((*frame, 0.0, 0));
    }
    let d = frame.x() * dg.x + frame.y() * dg.y;
    let trace = trace_geodesic(mesh, &TangentVector::from_displacement(mesh, p, &d))?;
    let next = follow_frame(mesh, frame, trace.end)?;
    Ok((next, trace.length_traced, trace.vertex_hits))
}

/// Objective minimized by the spin solve: rotation angle between the mated
/// orientation `A·R_ideal(ψ)·Bᵀ` and the shadow orientation.
pub fn spin_objective(shadow: &Matrix3<f64>, a: &Matrix3<f64>, b: &Matrix3<f64>, psi: f64) -> f64 {
    let r = a * ideal_contact_pose(psi).rotation * b.transpose();
    match log_so3(&(r.transpose() * shadow)) {
        Ok(w) => w.norm(),
        Err(_) => std::f64::consts::PI,
    }
}

/// Spin angle ψ minimizing the angle between `A·R_ideal(ψ)·Bᵀ` and `shadow`,
/// where `A = R_WC0` and `B = R_B1C1`. Newton iteration from `psi0` on the
/// trace of the residual rotation, which is monotone in that angle.
pub fn solve_spin_psi(
    shadow: &Matrix3<f64>,
    a: &Matrix3<f64>,
    b: &Matrix3<f64>,
    psi0: f64,
    tol: f64,
    max_iters: usize,
) -> Result<f64> {
    // tr(R(ψ)ᵀ R') = α cos ψ + β sin ψ + γ
    let q = a.transpose() * shadow * b * Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, -1.0));
    let alpha = q[(0, 0)] + q[(1, 1)];
    let beta = q[(1, 0)] - q[(0, 1)];
    if alpha.hypot(beta) < 1e-14 {
        return Ok(psi0);
    }
    let mut psi = psi0;
    for _ in 0..max_iters {
        let (s, c) = psi.sin_cos();
        let g1 = -alpha * s + beta * c;
        let g2 = -alpha * c - beta * s;
        let step = if g2 < 0.0 {
            -g1 / g2
        } else {
            // Outside the concave basin: jump to the maximizer directly.
            wrap(beta.atan2(alpha) - psi)
        };
        psi += step;
        if step.abs() < tol {
            return Ok(wrap(psi));
        }
    }
    Err(Error::SpinIkDiverged { iterations: max_iters })
}

fn wrap(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = (a + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if r <= -std::f64::consts::PI {
        r + two_pi
    } else {
        r
    }
}
