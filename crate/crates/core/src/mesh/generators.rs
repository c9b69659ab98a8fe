//! Procedural watertight meshes. Every generated vertex lies on the analytic
//! surface it samples.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::Vector3;

use super::ManifoldMesh;
use crate::error::{Error, Result};

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidResolution(format!("{name} must be positive, got {x}")))
    }
}

pub fn make_icosphere(diameter: f64, subdivisions: u32) -> Result<ManifoldMesh> {
    check_positive("diameter", diameter)?;
    if subdivisions > 7 {
        return Err(Error::InvalidResolution(format!("icosphere subdivisions {subdivisions} exceeds 7")));
    }
    let (vertices, faces) = unit_icosphere(subdivisions);
    let r = diameter * 0.5;
    let vertices = vertices.into_iter().map(|v| v * r).collect();
    ManifoldMesh::new(vertices, faces)
}

/// Axis-aligned ellipsoid with the given semi-axes, sampled from an icosphere.
pub fn make_ellipsoid(semi_axes: Vector3<f64>, subdivisions: u32) -> Result<ManifoldMesh> {
    for i in 0..3 {
        check_positive("semi-axis", semi_axes[i])?;
    }
    if subdivisions > 7 {
        return Err(Error::InvalidResolution(format!("ellipsoid subdivisions {subdivisions} exceeds 7")));
    }
    let (vertices, faces) = unit_icosphere(subdivisions);
    let vertices = vertices.into_iter().map(|v| v.component_mul(&semi_axes)).collect();
    ManifoldMesh::new(vertices, faces)
}

fn unit_icosphere(subdivisions: u32) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vector3<f64>> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vector3<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                vertices.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    (vertices, faces)
}

pub fn make_torus(
    major_radius: f64,
    tube_radius: f64,
    major_segments: usize,
    minor_segments: usize,
) -> Result<ManifoldMesh> {
    check_positive("major radius", major_radius)?;
    check_positive("tube radius", tube_radius)?;
    if tube_radius >= major_radius {
        return Err(Error::InvalidResolution(format!(
            "tube radius {tube_radius} must be below major radius {major_radius}"
        )));
    }
    if major_segments < 8 || minor_segments < 8 {
        return Err(Error::InvalidResolution(format!(
            "torus needs at least 8 segments each way, got {major_segments}x{minor_segments}"
        )));
    }
    let (m, n) = (major_segments, minor_segments);
    let mut vertices = Vec::with_capacity(m * n);
    for i in 0..m {
        let theta = 2.0 * PI * i as f64 / m as f64;
        for j in 0..n {
            let phi = 2.0 * PI * j as f64 / n as f64;
            let rho = major_radius + tube_radius * phi.cos();
            vertices.push(Vector3::new(rho * theta.cos(), rho * theta.sin(), tube_radius * phi.sin()));
        }
    }
    let idx = |i: usize, j: usize| (i % m) * n + (j % n);
    let mut faces = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    ManifoldMesh::new(vertices, faces)
}

/// Which side of the ring's tube the contact circle lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingSide {
    /// The contact circle is the torus' inner equator.
    Inside,
    /// The contact circle is the torus' outer equator.
    Outside,
}

impl RingSide {
    /// Major radius of a torus whose inner/outer equator has the given diameter.
    pub fn major_radius(self, contact_circle_diameter: f64, tube_diameter: f64) -> f64 {
        match self {
            RingSide::Inside => 0.5 * (contact_circle_diameter + tube_diameter),
            RingSide::Outside => 0.5 * (contact_circle_diameter - tube_diameter),
        }
    }
}

/// Torus whose inner (or outer) equator is a circle of `contact_circle_diameter`.
pub fn make_ring(
    contact_circle_diameter: f64,
    tube_diameter: f64,
    side: RingSide,
    major_segments: usize,
    minor_segments: usize,
) -> Result<ManifoldMesh> {
    check_positive("contact circle diameter", contact_circle_diameter)?;
    check_positive("tube diameter", tube_diameter)?;
    make_torus(
        side.major_radius(contact_circle_diameter, tube_diameter),
        0.5 * tube_diameter,
        major_segments,
        minor_segments,
    )
}

/// Surface of revolution about z from a bottom-to-top profile of `(ρ, z)`
/// rings, closed by a pole vertex at each end.
fn revolve(profile: &[(f64, f64)], bottom_z: f64, top_z: f64, segments: usize) -> Result<ManifoldMesh> {
    let n = segments;
    let mut vertices = vec![Vector3::new(0.0, 0.0, bottom_z)];
    for &(rho, z) in profile {
        for i in 0..n {
            let theta = 2.0 * PI * i as f64 / n as f64;
            vertices.push(Vector3::new(rho * theta.cos(), rho * theta.sin(), z));
        }
    }
    let top = vertices.len();
    vertices.push(Vector3::new(0.0, 0.0, top_z));
    let ring = |k: usize, i: usize| 1 + k * n + (i % n);
    let mut faces = Vec::new();
    for i in 0..n {
        faces.push([0, ring(0, i + 1), ring(0, i)]);
    }
    for k in 0..profile.len() - 1 {
        for i in 0..n {
            let (a, b, c, d) = (ring(k, i), ring(k, i + 1), ring(k + 1, i + 1), ring(k + 1, i));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    let last = profile.len() - 1;
    for i in 0..n {
        faces.push([top, ring(last, i), ring(last, i + 1)]);
    }
    ManifoldMesh::new(vertices, faces)
}

/// Closed cylinder along z, centered at the origin.
pub fn make_cylinder(
    diameter: f64,
    length: f64,
    radial_segments: usize,
    length_segments: usize,
) -> Result<ManifoldMesh> {
    check_positive("diameter", diameter)?;
    check_positive("length", length)?;
    if radial_segments < 3 || length_segments < 1 {
        return Err(Error::InvalidResolution(format!(
            "cylinder needs >= 3 radial and >= 1 length segments, got {radial_segments}x{length_segments}"
        )));
    }
    let r = diameter * 0.5;
    let profile: Vec<(f64, f64)> =
        (0..=length_segments).map(|k| (r, -0.5 * length + length * k as f64 / length_segments as f64)).collect();
    revolve(&profile, -0.5 * length, 0.5 * length, radial_segments)
}

/// Capsule along z with total length `length` (caps included), centered at the origin.
pub fn make_capsule(length: f64, diameter: f64, radial_segments: usize, cap_rings: usize) -> Result<ManifoldMesh> {
    check_positive("length", length)?;
    check_positive("diameter", diameter)?;
    let r = diameter * 0.5;
    if length < diameter {
        return Err(Error::InvalidResolution(format!(
            "capsule length {length} is shorter than its diameter {diameter}"
        )));
    }
    if radial_segments < 3 || cap_rings < 1 {
        return Err(Error::InvalidResolution(format!(
            "capsule needs >= 3 radial segments and >= 1 cap ring, got {radial_segments}x{cap_rings}"
        )));
    }
    let half_barrel = 0.5 * length - r;
    let mut profile = Vec::new();
    for k in 1..=cap_rings {
        let a = 0.5 * PI * k as f64 / cap_rings as f64;
        profile.push((r * a.sin(), -half_barrel - r * a.cos()));
    }
    if half_barrel > 1e-9 {
        let barrel_segments = ((2.0 * half_barrel) / (PI * r / (2.0 * cap_rings as f64))).ceil().max(1.0) as usize;
        for k in 1..barrel_segments {
            profile.push((r, -half_barrel + 2.0 * half_barrel * k as f64 / barrel_segments as f64));
        }
        for k in (1..=cap_rings).rev() {
            let a = 0.5 * PI * k as f64 / cap_rings as f64;
            profile.push((r * a.sin(), half_barrel + r * a.cos()));
        }
    } else {
        for k in (1..cap_rings).rev() {
            let a = 0.5 * PI * k as f64 / cap_rings as f64;
            profile.push((r * a.sin(), r * a.cos()));
        }
    }
    revolve(&profile, -0.5 * length, 0.5 * length, radial_segments)
}

/// Axis-aligned box centered at the origin; each face is an `n × n` grid.
pub fn make_box(size: Vector3<f64>, n: usize) -> Result<ManifoldMesh> {
    for i in 0..3 {
        check_positive("box size", size[i])?;
    }
    if n < 1 {
        return Err(Error::InvalidResolution("box needs at least one cell per face".into()));
    }
    let mut index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut vid = |c: [usize; 3], vertices: &mut Vec<Vector3<f64>>| -> usize {
        *index.entry(c).or_insert_with(|| {
            vertices.push(Vector3::new(
                size.x * (c[0] as f64 / n as f64 - 0.5),
                size.y * (c[1] as f64 / n as f64 - 0.5),
                size.z * (c[2] as f64 / n as f64 - 0.5),
            ));
            vertices.len() - 1
        })
    };
    // (fixed axis, fixed value, u axis, v axis) with u × v along the outward normal
    let sides = [(0, n, 1, 2), (0, 0, 2, 1), (1, n, 2, 0), (1, 0, 0, 2), (2, n, 0, 1), (2, 0, 1, 0)];
    let mut faces = Vec::new();
    for (axis, value, ua, va) in sides {
        for i in 0..n {
            for j in 0..n {
                let corner = |di: usize, dj: usize| {
                    let mut c = [0usize; 3];
                    c[axis] = value;
                    c[ua] = i + di;
                    c[va] = j + dj;
                    c
                };
                let a = vid(corner(0, 0), &mut vertices);
                let b = vid(corner(1, 0), &mut vertices);
                let c = vid(corner(1, 1), &mut vertices);
                let d = vid(corner(0, 1), &mut vertices);
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
    }
    ManifoldMesh::new(vertices, faces)
}
