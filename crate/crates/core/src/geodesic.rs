//! Straightest geodesics on triangle meshes.
//!
//! A path runs straight inside a face and is unfolded about the shared edge
//! when it leaves. Through a vertex it leaves at half the total vertex angle
//! from the incoming ray, which on a flat vertex is simply "straight on".

use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3};

use crate::error::{Error, Result};
use crate::mesh::{ManifoldMesh, SurfacePoint};

/// Barycentric coordinate below which a point counts as lying on an edge.
const SNAP: f64 = 1e-9;

/// A direction and arc length anchored on the surface. `dir` is expressed in
/// the basis of [`face_basis`] for `base.face`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: SurfacePoint,
    pub dir: Vector2<f64>,
    pub length: f64,
}

impl TangentVector {
    pub fn new(base: SurfacePoint, dir: Vector2<f64>, length: f64) -> Self {
        Self { base, dir, length }
    }

    /// Builds a tangent vector from a 3D displacement; its length becomes the arc length.
    pub fn from_displacement(mesh: &ManifoldMesh, base: SurfacePoint, displacement: &Vector3<f64>) -> Self {
        let (e1, e2, _) = face_basis(mesh, base.face);
        let length = displacement.norm();
        let planar = Vector2::new(displacement.dot(&e1), displacement.dot(&e2));
        let dir = if planar.norm() > 1e-300 { planar.normalize() } else { Vector2::new(1.0, 0.0) };
        Self { base, dir, length }
    }

    pub fn direction_3d(&self, mesh: &ManifoldMesh) -> Vector3<f64> {
        let (e1, e2, _) = face_basis(mesh, self.base.face);
        e1 * self.dir.x + e2 * self.dir.y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTrace {
    pub end: SurfacePoint,
    pub end_dir: Vector2<f64>,
    pub length_traced: f64,
    /// Halfedges crossed, in order, each as seen from the face being left.
    pub crossed_edges: Vec<usize>,
    pub vertex_hits: usize,
}

/// Orthonormal basis of face `f`: `e1` along its first edge, `e2 = n × e1`, and `n`.
pub fn face_basis(mesh: &ManifoldMesh, f: usize) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let [a, b, _] = mesh.face_positions(f);
    let n = mesh.face_normal(f);
    let e1 = (b - a).normalize();
    (e1, n.cross(&e1), n)
}

/// Contact-frame axes at `p`: `z` is the interpolated normal and `x` the hint
/// projected into the tangent plane.
pub fn tangent_basis(
    mesh: &ManifoldMesh,
    p: &SurfacePoint,
    x_hint: &Vector3<f64>,
) -> Result<(Vector3<f64>, Vector3<f64>, Vector3<f64>)> {
    let z = mesh.interpolated_normal(p)?;
    let hint_norm = x_hint.norm();
    if hint_norm == 0.0 {
        return Err(Error::DegenerateHint);
    }
    let t = x_hint - z * x_hint.dot(&z);
    if t.norm() <= hint_norm * 1e-6 {
        return Err(Error::DegenerateHint);
    }
    let x = t.normalize();
    Ok((x, z.cross(&x), z))
}

/// Direction in which barycentric coordinates change when moving along `d` in face `f`.
fn bary_rate(mesh: &ManifoldMesh, f: usize, d: &Vector3<f64>) -> Vector3<f64> {
    let [a, b, c] = mesh.face_positions(f);
    let (e1, e2) = (b - a, c - a);
    let (g11, g12, g22) = (e1.dot(&e1), e1.dot(&e2), e2.dot(&e2));
    let (r1, r2) = (e1.dot(d), e2.dot(d));
    let det = g11 * g22 - g12 * g12;
    let du = (g22 * r1 - g12 * r2) / det;
    let dw = (g11 * r2 - g12 * r1) / det;
    Vector3::new(-du - dw, du, dw)
}

struct Walker<'a> {
    mesh: &'a ManifoldMesh,
    face: usize,
    bary: Vector3<f64>,
    dir: Vector3<f64>,
    remaining: f64,
    traced: f64,
    crossed: Vec<usize>,
    vertex_hits: usize,
}

enum Leave {
    /// Reached the requested length inside the current face.
    Done,
    /// Crossing the edge opposite corner `k`.
    Edge(usize),
    /// Arrived at corner `k`.
    Vertex(usize),
}

impl<'a> Walker<'a> {
    fn advance(&mut self) -> Leave {
        let db = bary_rate(self.mesh, self.face, &self.dir);
        let scale = db.amax();
        let mut t_exit = f64::INFINITY;
        let mut exit = usize::MAX;
        for i in 0..3 {
            if db[i] < -1e-12 * scale {
                let t = (self.bary[i].max(0.0)) / -db[i];
                if t < t_exit {
                    t_exit = t;
                    exit = i;
                }
            }
        }
        if self.remaining <= t_exit {
            self.bary += db * self.remaining;
            self.traced += self.remaining;
            self.remaining = 0.0;
            let b = self.bary.map(|x| x.max(0.0));
            self.bary = b / b.sum();
            return Leave::Done;
        }
        let mut b = self.bary + db * t_exit;
        b[exit] = 0.0;
        b = b.map(|x| x.max(0.0));
        b /= b.sum();
        self.bary = b;
        self.traced += t_exit;
        self.remaining -= t_exit;
        let (j, k) = ((exit + 1) % 3, (exit + 2) % 3);
        if b[j] < SNAP {
            Leave::Vertex(k)
        } else if b[k] < SNAP {
            Leave::Vertex(j)
        } else {
            Leave::Edge(exit)
        }
    }

    /// Moves across the edge opposite corner `opposite`, unfolding the direction.
    fn cross_edge(&mut self, opposite: usize) {
        let mesh = self.mesh;
        let f = self.face;
        let h = 3 * f + (opposite + 1) % 3;
        let (tail, head) = (mesh.tail(h), mesh.head(h));
        let e = (mesh.vertex(head) - mesh.vertex(tail)).normalize();
        let n = mesh.face_normal(f);
        let (a, b) = (self.dir.dot(&e), self.dir.dot(&n.cross(&e)));
        let s = self.bary[(opposite + 2) % 3];

        let t = mesh.twin(h);
        let g = t / 3;
        let n2 = mesh.face_normal(g);
        let mut bary = Vector3::zeros();
        // The twin runs head -> tail.
        bary[t % 3] = s;
        bary[(t % 3 + 1) % 3] = 1.0 - s;
        let d = e * a + n2.cross(&e) * b;
        self.crossed.push(h);
        self.face = g;
        self.bary = bary;
        self.dir = (d - n2 * d.dot(&n2)).normalize();
    }

    /// Leaves vertex at corner `k` of the current face by the straightest rule.
    fn pass_vertex(&mut self, k: usize) -> Result<()> {
        let mesh = self.mesh;
        let v = mesh.faces()[self.face][k];
        self.vertex_hits += 1;
        let ring = mesh.outgoing_halfedges(v);
        let h_in = 3 * self.face + k;
        let start = ring.iter().position(|&h| h == h_in).ok_or(Error::StuckAtVertex { vertex: v })?;
        let angles: Vec<f64> = ring.iter().map(|&h| mesh.corner_angle(h)).collect();
        let total: f64 = angles.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::StuckAtVertex { vertex: v });
        }
        let p = mesh.vertex(v);
        let n = mesh.face_normal(self.face);
        let e0 = (mesh.vertex(mesh.head(h_in)) - p).normalize();
        let back = -self.dir;
        let theta_back = e0.cross(&back).dot(&n).atan2(e0.dot(&back)).clamp(0.0, angles[start]);
        let mut target = theta_back + 0.5 * total;
        if target >= total {
            target -= total;
        }
        let mut acc = 0.0;
        for step in 0..ring.len() {
            let idx = (start + step) % ring.len();
            if target <= acc + angles[idx] || step + 1 == ring.len() {
                let phi = (target - acc).clamp(0.0, angles[idx]);
                self.leave_vertex_in_wedge(ring[idx], phi);
                return Ok(());
            }
            acc += angles[idx];
        }
        Err(Error::StuckAtVertex { vertex: v })
    }

    /// Starts walking from the tail of `h` at angle `phi` from `h` inside face `h / 3`.
    fn leave_vertex_in_wedge(&mut self, h: usize, phi: f64) {
        let mesh = self.mesh;
        let f = h / 3;
        let p = mesh.vertex(mesh.tail(h));
        let n = mesh.face_normal(f);
        let e = (mesh.vertex(mesh.head(h)) - p).normalize();
        let mut bary = Vector3::zeros();
        bary[h % 3] = 1.0;
        self.face = f;
        self.bary = bary;
        self.dir = e * phi.cos() + n.cross(&e) * phi.sin();
    }

    /// Chooses the wedge for a start exactly on vertex `v`, matching polar
    /// angles in the vertex tangent plane to intrinsic angles.
    fn start_at_vertex(&mut self, v: usize, d: &Vector3<f64>) -> Result<()> {
        let mesh = self.mesh;
        let ring = mesh.outgoing_halfedges(v);
        let p = mesh.vertex(v);
        let nv = mesh.vertex_normal(v);
        let project = |w: Vector3<f64>| {
            let t = w - nv * w.dot(&nv);
            t / t.norm().max(1e-300)
        };
        let r0 = project(mesh.vertex(mesh.head(ring[0])) - p);
        let polar = |w: &Vector3<f64>| {
            let a = r0.cross(w).dot(&nv).atan2(r0.dot(w));
            if a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            }
        };
        let target = polar(&project(*d));
        let mut bounds: Vec<f64> = ring.iter().map(|&h| polar(&project(mesh.vertex(mesh.head(h)) - p))).collect();
        bounds[0] = 0.0;
        bounds.push(2.0 * PI);
        for i in 0..ring.len() {
            let (lo, hi) = (bounds[i], bounds[i + 1]);
            if target >= lo && target <= hi && hi > lo {
                let alpha = mesh.corner_angle(ring[i]);
                let phi = (target - lo) / (hi - lo) * alpha;
                self.leave_vertex_in_wedge(ring[i], phi);
                return Ok(());
            }
        }
        Err(Error::StuckAtVertex { vertex: v })
    }
}

/// Walks `start.length` along the surface from `start.base` in direction `start.dir`.
pub fn trace_geodesic(mesh: &ManifoldMesh, start: &TangentVector) -> Result<GeodesicTrace> {
    let d = start.direction_3d(mesh);
    let mut w = Walker {
        mesh,
        face: start.base.face,
        bary: start.base.barycentric,
        dir: d,
        remaining: start.length.max(0.0),
        traced: 0.0,
        crossed: Vec::new(),
        vertex_hits: 0,
    };
    if w.remaining == 0.0 {
        return Ok(GeodesicTrace {
            end: start.base,
            end_dir: start.dir,
            length_traced: 0.0,
            crossed_edges: Vec::new(),
            vertex_hits: 0,
        });
    }
    if let Some(k) = start.base.corner(SNAP) {
        let v = mesh.faces()[start.base.face][k];
        w.start_at_vertex(v, &d)?;
    }
    let budget = 64 + 16 * mesh.num_faces() + (start.length / mesh.mean_edge_length() * 64.0) as usize;
    let mut stalls = 0;
    for _ in 0..budget {
        let before = w.traced;
        match w.advance() {
            Leave::Done => {
                let (e1, e2, _) = face_basis(mesh, w.face);
                let end_dir = Vector2::new(w.dir.dot(&e1), w.dir.dot(&e2)).normalize();
                return Ok(GeodesicTrace {
                    end: SurfacePoint::new(w.face, w.bary),
                    end_dir,
                    length_traced: w.traced,
                    crossed_edges: w.crossed,
                    vertex_hits: w.vertex_hits,
                });
            }
            Leave::Edge(k) => w.cross_edge(k),
            Leave::Vertex(k) => {
                w.pass_vertex(k)?;
            }
        }
        if w.traced - before <= 0.0 {
            stalls += 1;
            if stalls > 3 * 64 {
                let v = mesh.faces()[w.face][w.bary.imax()];
                return Err(Error::StuckAtVertex { vertex: v });
            }
        } else {
            stalls = 0;
        }
    }
    let v = mesh.faces()[w.face][w.bary.imax()];
    Err(Error::StuckAtVertex { vertex: v })
}

/// Final direction of a trace in 3D, projected onto the tangent plane of the
/// interpolated normal at the end point.
pub fn transport_direction(mesh: &ManifoldMesh, trace: &GeodesicTrace) -> Result<Vector3<f64>> {
    let (e1, e2, _) = face_basis(mesh, trace.end.face);
    let d = e1 * trace.end_dir.x + e2 * trace.end_dir.y;
    let n = mesh.interpolated_normal(&trace.end)?;
    let t = d - n * d.dot(&n);
    if t.norm() < 1e-12 {
        return Ok(d);
    }
    Ok(t.normalize())
}
