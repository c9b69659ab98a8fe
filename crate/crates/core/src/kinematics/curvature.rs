use nalgebra::{Matrix2, Vector3};

use super::ContactFrame;
use crate::error::{Error, Result};
use crate::geodesic::{trace_geodesic, TangentVector};
use crate::mesh::ManifoldMesh;

/// Difference step used for curvature estimation on `mesh`.
pub fn default_curvature_step(mesh: &ManifoldMesh) -> f64 {
    (0.5 * mesh.mean_edge_length()).max(1e-3)
}

/// Shape operator at the frame origin, in the frame's (x̂, ŷ) basis.
///
/// Normals are sampled a geodesic distance `h` ahead and behind along each
/// axis; their central difference gives one column each. The result is
/// symmetrized.
pub fn estimate_curvature(mesh: &ManifoldMesh, frame: &ContactFrame, h: f64) -> Result<Matrix2<f64>> {
    let p = frame.surface_point().ok_or_else(|| Error::Config("curvature estimation needs a mesh contact".into()))?;
    let (x, y) = (frame.x(), frame.y());
    let normal_at = |d: Vector3<f64>| -> Result<Vector3<f64>> {
        let trace = trace_geodesic(mesh, &TangentVector::from_displacement(mesh, p, &(d * h)))?;
        mesh.interpolated_normal(&trace.end)
    };
    let mut k = Matrix2::zeros();
    for (j, axis) in [x, y].into_iter().enumerate() {
        let dn = (normal_at(axis)? - normal_at(-axis)?) / (2.0 * h);
        k[(0, j)] = dn.dot(&x);
        k[(1, j)] = dn.dot(&y);
    }
    Ok((k + k.transpose()) * 0.5)
}
