//! Mesh-mesh proximity: separation distance or sampled interpenetration.
//!
//! Penetration samples are mesh vertices lying inside the other body. Inside
//! status comes from ray parity for vertices near the other surface and is
//! propagated along edges elsewhere (an edge whose faces do not come near the
//! other surface cannot cross it).

use std::collections::VecDeque;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ManifoldMesh, SurfacePoint};
use crate::error::{Error, Result};
use crate::se3::Pose;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionStatus {
    Separated,
    Penetrating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionReport {
    pub status: CollisionStatus,
    /// Minimum distance when separated, maximum depth when penetrating (mm).
    pub distance_or_depth: f64,
    pub witness_a: SurfacePoint,
    pub witness_b: SurfacePoint,
    /// World-frame sample points and their depths (mm).
    pub penetration_points: Vec<(Vector3<f64>, f64)>,
}

impl CollisionReport {
    pub fn is_penetrating(&self) -> bool {
        self.status == CollisionStatus::Penetrating
    }
}

/// Ray directions used by the parity inside test, tried in order until one
/// produces no edge or vertex grazing.
#[derive(Debug, Clone)]
pub struct InsideTest {
    directions: Vec<Vector3<f64>>,
}

impl Default for InsideTest {
    fn default() -> Self {
        Self::from_seed(0)
    }
}

impl InsideTest {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_1a5e);
        let mut directions = vec![Vector3::new(0.5773, 0.5774, 0.5775).normalize()];
        while directions.len() < 8 {
            let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                directions.push(v / n);
            }
        }
        Self { directions }
    }

    /// Ray-parity test for a point in mesh-local coordinates.
    pub fn is_inside(&self, mesh: &ManifoldMesh, p: &Vector3<f64>) -> bool {
        let root = mesh.bvh().root_aabb();
        if !root.contains(p, 1e-9) {
            return false;
        }
        let mut hits = Vec::new();
        let mut fallback = false;
        for (i, dir) in self.directions.iter().enumerate() {
            mesh.bvh().ray_hits(mesh.vertices(), mesh.faces(), p, dir, &mut hits);
            let degenerate = hits.iter().any(|&(t, _, u, v)| t < 1e-12 || u < 1e-9 || v < 1e-9 || 1.0 - u - v < 1e-9);
            let odd = hits.len() % 2 == 1;
            if !degenerate {
                return odd;
            }
            if i == 0 {
                fallback = odd;
            }
        }
        fallback
    }
}

/// Closest point on `mesh` (placed at `pose`) to a world-frame query.
pub fn closest_point(mesh: &ManifoldMesh, pose: &Pose, query: &Vector3<f64>) -> (SurfacePoint, f64) {
    let q = pose.inverse_transform_point(query);
    let hit = mesh.bvh().closest_point(mesh.vertices(), mesh.faces(), &q);
    (SurfacePoint::clamped(hit.face, hit.barycentric), hit.value)
}

/// Nearest positive-`t` hit of a world-frame ray against `mesh` at `pose`.
pub fn ray_cast(
    mesh: &ManifoldMesh,
    pose: &Pose,
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
) -> Option<(SurfacePoint, f64)> {
    let o = pose.inverse_transform_point(origin);
    let d = pose.inverse_transform_vector(dir);
    mesh.bvh()
        .ray_cast(mesh.vertices(), mesh.faces(), &o, &d, 0.0)
        .map(|h| (SurfacePoint::clamped(h.face, h.barycentric), h.value))
}

pub fn collide(mesh_a: &ManifoldMesh, pose_a: &Pose, mesh_b: &ManifoldMesh, pose_b: &Pose) -> CollisionReport {
    collide_with(mesh_a, pose_a, mesh_b, pose_b, &InsideTest::default())
}

pub fn collide_with(
    mesh_a: &ManifoldMesh,
    pose_a: &Pose,
    mesh_b: &ManifoldMesh,
    pose_b: &Pose,
    inside: &InsideTest,
) -> CollisionReport {
    let b_in_a = pose_a.inverse() * *pose_b;
    let a_in_b = b_in_a.inverse();
    let vb_in_a: Vec<Vector3<f64>> = mesh_b.vertices().iter().map(|v| b_in_a.transform_point(v)).collect();
    let va_in_b: Vec<Vector3<f64>> = mesh_a.vertices().iter().map(|v| a_in_b.transform_point(v)).collect();

    let mut near_a = vec![false; mesh_a.num_vertices()];
    let mut near_b = vec![false; mesh_b.num_vertices()];
    mesh_a.bvh().overlapping_faces(mesh_b.bvh(), &b_in_a, 1e-9, |fa, fb| {
        for v in mesh_a.face(fa) {
            near_a[v] = true;
        }
        for v in mesh_b.face(fb) {
            near_b[v] = true;
        }
    });

    let inside_b = classify(mesh_b, &vb_in_a, &near_b, |p| inside.is_inside(mesh_a, p));
    let inside_a = classify(mesh_a, &va_in_b, &near_a, |p| inside.is_inside(mesh_b, p));

    // (world point, depth, which mesh the vertex belongs to, vertex, closest point on other)
    let mut samples: Vec<(Vector3<f64>, f64, bool, usize, SurfacePoint)> = Vec::new();
    for (v, &ins) in inside_b.iter().enumerate() {
        if ins {
            let hit = mesh_a.bvh().closest_point(mesh_a.vertices(), mesh_a.faces(), &vb_in_a[v]);
            if hit.value > 1e-12 {
                let sp = SurfacePoint::clamped(hit.face, hit.barycentric);
                samples.push((pose_b.transform_point(&mesh_b.vertex(v)), hit.value, false, v, sp));
            }
        }
    }
    for (v, &ins) in inside_a.iter().enumerate() {
        if ins {
            let hit = mesh_b.bvh().closest_point(mesh_b.vertices(), mesh_b.faces(), &va_in_b[v]);
            if hit.value > 1e-12 {
                let sp = SurfacePoint::clamped(hit.face, hit.barycentric);
                samples.push((pose_a.transform_point(&mesh_a.vertex(v)), hit.value, true, v, sp));
            }
        }
    }

    if samples.is_empty() {
        let (d, fa, wa, fb, wb) = mesh_a.bvh().min_distance(
            mesh_a.vertices(),
            mesh_a.faces(),
            mesh_b.bvh(),
            &vb_in_a,
            mesh_b.faces(),
            &b_in_a,
        );
        return CollisionReport {
            status: CollisionStatus::Separated,
            distance_or_depth: d,
            witness_a: SurfacePoint::clamped(fa, wa),
            witness_b: SurfacePoint::clamped(fb, wb),
            penetration_points: Vec::new(),
        };
    }

    let deepest = samples
        .iter()
        .enumerate()
        .max_by(|(i, x), (j, y)| x.1.partial_cmp(&y.1).unwrap().then(j.cmp(i)))
        .map(|(i, _)| i)
        .unwrap();
    let (_, depth, on_a, v, other) = samples[deepest];
    let (witness_a, witness_b) = if on_a { (mesh_a.vertex_point(v), other) } else { (other, mesh_b.vertex_point(v)) };
    CollisionReport {
        status: CollisionStatus::Penetrating,
        distance_or_depth: depth,
        witness_a,
        witness_b,
        penetration_points: samples.iter().map(|s| (s.0, s.1)).collect(),
    }
}

/// Inside status for every vertex of `mesh` given its positions in the other
/// body's frame.
fn classify(
    mesh: &ManifoldMesh,
    positions: &[Vector3<f64>],
    near: &[bool],
    test: impl Fn(&Vector3<f64>) -> bool,
) -> Vec<bool> {
    let n = mesh.num_vertices();
    let mut status: Vec<Option<bool>> = vec![None; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if near[v] {
            status[v] = Some(test(&positions[v]));
            queue.push_back(v);
        }
    }
    let mut seed = 0;
    loop {
        while let Some(v) = queue.pop_front() {
            let s = status[v];
            for h in mesh.outgoing_halfedges(v) {
                let w = mesh.head(h);
                if status[w].is_none() {
                    status[w] = s;
                    queue.push_back(w);
                }
            }
        }
        while seed < n && status[seed].is_some() {
            seed += 1;
        }
        if seed == n {
            break;
        }
        status[seed] = Some(test(&positions[seed]));
        queue.push_back(seed);
    }
    status.into_iter().map(|s| s.unwrap_or(false)).collect()
}

/// Depth-weighted average of the penetration samples.
pub fn weighted_penetration_centroid(report: &CollisionReport) -> Result<Vector3<f64>> {
    if report.status != CollisionStatus::Penetrating || report.penetration_points.is_empty() {
        return Err(Error::NotPenetrating);
    }
    let total: f64 = report.penetration_points.iter().map(|p| p.1).sum();
    let sum = report.penetration_points.iter().fold(Vector3::zeros(), |acc, (p, d)| acc + p * *d);
    Ok(sum / total)
}
