//! Closed manifold triangle meshes.
//!
//! Halfedge `3f + k` runs from `faces[f][k]` to `faces[f][(k + 1) % 3]`, so
//! `next` and `face` are implicit; only `twin` is stored.

mod bvh;
mod collision;
mod generators;
mod obj;
mod query;

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub use bvh::Bvh;
pub use collision::{
    closest_point, collide, collide_with, ray_cast, weighted_penetration_centroid, CollisionReport, CollisionStatus,
    InsideTest,
};
pub use generators::{
    make_box, make_capsule, make_cylinder, make_ellipsoid, make_icosphere, make_ring, make_torus, RingSide,
};
pub use obj::{load_obj, parse_obj, save_obj, write_obj};
pub use query::{closest_point_on_triangle, ray_triangle};

/// A point bound to a mesh face by barycentric coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub face: usize,
    pub barycentric: Vector3<f64>,
}

impl SurfacePoint {
    pub fn new(face: usize, barycentric: Vector3<f64>) -> Self {
        Self { face, barycentric }
    }

    /// Clamps to the triangle and renormalizes so the weights sum to one.
    pub fn clamped(face: usize, b: Vector3<f64>) -> Self {
        let mut b = b.map(|x| if x < 1e-12 { 0.0 } else { x });
        let s = b.sum();
        b /= s;
        Self::new(face, b)
    }

    /// Index `k` of the corner this point sits on, if any coordinate is ~1.
    pub fn corner(&self, tol: f64) -> Option<usize> {
        (0..3).find(|&k| self.barycentric[k] > 1.0 - tol)
    }
}

#[derive(Debug, Clone)]
pub struct ManifoldMesh {
    vertices: Vec<Vector3<f64>>,
    faces: Vec<[usize; 3]>,
    twin: Vec<usize>,
    vertex_halfedge: Vec<usize>,
    face_normals: Vec<Vector3<f64>>,
    face_areas: Vec<f64>,
    vertex_normals: Vec<Vector3<f64>>,
    bvh: Bvh,
    mean_edge_length: f64,
}

impl ManifoldMesh {
    /// Validates connectivity and builds normals and the BVH.
    pub fn new(vertices: Vec<Vector3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                if v >= vertices.len() {
                    return Err(Error::BadIndex { face: f, vertex: v });
                }
            }
        }

        let mut face_normals = Vec::with_capacity(faces.len());
        let mut face_areas = Vec::with_capacity(faces.len());
        for (f, face) in faces.iter().enumerate() {
            let [a, b, c] = face.map(|i| vertices[i]);
            let cross = (b - a).cross(&(c - a));
            let area = 0.5 * cross.norm();
            if !(area > 1e-12) {
                return Err(Error::DegenerateFace { face: f, area });
            }
            face_normals.push(cross / (2.0 * area));
            face_areas.push(area);
        }

        let mut edge_map: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3);
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let from = face[k];
                let to = face[(k + 1) % 3];
                if edge_map.insert((from, to), 3 * f + k).is_some() {
                    return Err(Error::NonManifoldEdge { face: f, from, to });
                }
            }
        }
        let mut twin = vec![usize::MAX; faces.len() * 3];
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let from = face[k];
                let to = face[(k + 1) % 3];
                match edge_map.get(&(to, from)) {
                    Some(&h) => twin[3 * f + k] = h,
                    None => return Err(Error::OpenBoundary { face: f, from, to }),
                }
            }
        }

        let mut vertex_halfedge = vec![usize::MAX; vertices.len()];
        let mut valence = vec![0usize; vertices.len()];
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                if vertex_halfedge[face[k]] == usize::MAX {
                    vertex_halfedge[face[k]] = 3 * f + k;
                }
                valence[face[k]] += 1;
            }
        }
        if let Some(v) = vertex_halfedge.iter().position(|&h| h == usize::MAX) {
            return Err(Error::IsolatedVertex { vertex: v });
        }

        let bvh = Bvh::build(&vertices, &faces);
        let mut mesh = Self {
            vertices,
            faces,
            twin,
            vertex_halfedge,
            face_normals,
            face_areas,
            vertex_normals: Vec::new(),
            bvh,
            mean_edge_length: 0.0,
        };

        for (v, &n) in valence.iter().enumerate() {
            if mesh.outgoing_halfedges(v).len() != n {
                return Err(Error::NonManifoldVertex { vertex: v });
            }
        }
        if mesh.signed_volume() < 0.0 {
            return Err(Error::InvertedOrientation);
        }
        mesh.vertex_normals = mesh.compute_vertex_normals();
        let total: f64 =
            (0..mesh.faces.len() * 3).map(|h| (mesh.vertices[mesh.head(h)] - mesh.vertices[mesh.tail(h)]).norm()).sum();
        mesh.mean_edge_length = total / (mesh.faces.len() * 3) as f64;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex(&self, v: usize) -> Vector3<f64> {
        self.vertices[v]
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    pub fn face_normal(&self, f: usize) -> Vector3<f64> {
        self.face_normals[f]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        self.face_areas[f]
    }

    pub fn vertex_normal(&self, v: usize) -> Vector3<f64> {
        self.vertex_normals[v]
    }

    pub fn vertex_normals(&self) -> &[Vector3<f64>] {
        &self.vertex_normals
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.faces.len() * 3 / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn mean_edge_length(&self) -> f64 {
        self.mean_edge_length
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    pub fn face_positions(&self, f: usize) -> [Vector3<f64>; 3] {
        self.faces[f].map(|i| self.vertices[i])
    }

    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    pub fn tail(&self, h: usize) -> usize {
        self.faces[h / 3][h % 3]
    }

    pub fn head(&self, h: usize) -> usize {
        self.faces[h / 3][(h % 3 + 1) % 3]
    }

    pub fn next(h: usize) -> usize {
        3 * (h / 3) + (h % 3 + 1) % 3
    }

    pub fn prev(h: usize) -> usize {
        3 * (h / 3) + (h % 3 + 2) % 3
    }

    /// Outgoing halfedges of `v` in counter-clockwise order about the outward normal.
    pub fn outgoing_halfedges(&self, v: usize) -> Vec<usize> {
        let start = self.vertex_halfedge[v];
        let mut out = vec![start];
        let mut h = start;
        loop {
            // Next CCW outgoing edge: prev(h) arrives at v; its twin leaves v.
            h = self.twin[Self::prev(h)];
            if h == start || out.len() > self.faces.len() * 3 {
                break;
            }
            out.push(h);
        }
        out
    }

    /// Interior angle of the corner at halfedge `h`'s tail in face `h / 3`.
    pub fn corner_angle(&self, h: usize) -> f64 {
        let v = self.vertices[self.tail(h)];
        let a = self.vertices[self.head(h)] - v;
        let b = self.vertices[self.tail(Self::prev(h))] - v;
        a.cross(&b).norm().atan2(a.dot(&b))
    }

    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }

    pub fn centroid(&self) -> Vector3<f64> {
        self.vertices.iter().sum::<Vector3<f64>>() / self.vertices.len() as f64
    }

    /// Angle-weighted average of incident face normals, normalized.
    fn compute_vertex_normals(&self) -> Vec<Vector3<f64>> {
        let mut normals = vec![Vector3::zeros(); self.vertices.len()];
        for h in 0..self.faces.len() * 3 {
            normals[self.tail(h)] += self.face_normals[h / 3] * self.corner_angle(h);
        }
        normals.iter().map(|n| n.normalize()).collect()
    }

    pub fn position(&self, p: &SurfacePoint) -> Vector3<f64> {
        let [a, b, c] = self.face_positions(p.face);
        a * p.barycentric.x + b * p.barycentric.y + c * p.barycentric.z
    }

    /// Barycentric interpolation of vertex normals, renormalized.
    pub fn interpolated_normal(&self, p: &SurfacePoint) -> Result<Vector3<f64>> {
        let [a, b, c] = self.faces[p.face].map(|i| self.vertex_normals[i]);
        let n = a * p.barycentric.x + b * p.barycentric.y + c * p.barycentric.z;
        let len = n.norm();
        if len < 1e-9 {
            return Err(Error::ZeroNormal { face: p.face });
        }
        Ok(n / len)
    }

    /// Surface point at vertex `v` (first incident face).
    pub fn vertex_point(&self, v: usize) -> SurfacePoint {
        let h = self.vertex_halfedge[v];
        let mut b = Vector3::zeros();
        b[h % 3] = 1.0;
        SurfacePoint::new(h / 3, b)
    }

    /// Barycentric coordinates of a point (assumed in the plane of face `f`).
    pub fn barycentric_of(&self, f: usize, p: &Vector3<f64>) -> Vector3<f64> {
        let [a, b, c] = self.face_positions(f);
        let n = self.face_normals[f];
        let area2 = 2.0 * self.face_areas[f];
        let wa = (b - p).cross(&(c - p)).dot(&n) / area2;
        let wb = (c - p).cross(&(a - p)).dot(&n) / area2;
        Vector3::new(wa, wb, 1.0 - wa - wb)
    }

    /// One-ring neighbor vertices of every vertex.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        (0..self.vertices.len())
            .map(|v| self.outgoing_halfedges(v).into_iter().map(|h| self.head(h)).collect())
            .collect()
    }

    pub fn bounding_radius(&self) -> f64 {
        let c = self.centroid();
        self.vertices.iter().map(|v| (v - c).norm()).fold(0.0, f64::max)
    }
}
