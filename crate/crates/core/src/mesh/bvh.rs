//! Axis-aligned bounding volume hierarchy over mesh faces.

use nalgebra::{Matrix3, Vector3};

use super::query::{closest_point_on_triangle, ray_triangle, triangle_triangle_distance};
use crate::se3::Pose;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    fn empty() -> Self {
        Self { min: Vector3::repeat(f64::INFINITY), max: Vector3::repeat(f64::NEG_INFINITY) }
    }

    fn grow(&mut self, p: &Vector3<f64>) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    fn merge(&self, o: &Aabb) -> Aabb {
        Aabb { min: self.min.inf(&o.min), max: self.max.sup(&o.max) }
    }

    pub fn distance_sq(&self, p: &Vector3<f64>) -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let e = (self.min[i] - p[i]).max(0.0).max(p[i] - self.max[i]);
            d += e * e;
        }
        d
    }

    pub fn contains(&self, p: &Vector3<f64>, margin: f64) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] - margin && p[i] <= self.max[i] + margin)
    }

    fn box_distance_sq(&self, o: &Aabb) -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let e = (self.min[i] - o.max[i]).max(0.0).max(o.min[i] - self.max[i]);
            d += e * e;
        }
        d
    }

    /// Conservative box of this box after applying `pose`.
    fn transformed(&self, rotation: &Matrix3<f64>, translation: &Vector3<f64>) -> Aabb {
        let center = (self.min + self.max) * 0.5;
        let half = (self.max - self.min) * 0.5;
        let c = rotation * center + translation;
        let e = rotation.abs() * half;
        Aabb { min: c - e, max: c + e }
    }

    /// Slab test; returns the entry parameter if the ray hits within `[0, t_max]`.
    fn ray_entry(&self, origin: &Vector3<f64>, inv_dir: &Vector3<f64>, t_max: f64) -> Option<f64> {
        let mut t0: f64 = 0.0;
        let mut t1 = t_max;
        for i in 0..3 {
            let mut ta = (self.min[i] - origin[i]) * inv_dir[i];
            let mut tb = (self.max[i] - origin[i]) * inv_dir[i];
            if ta.is_nan() || tb.is_nan() {
                // origin on the slab boundary with a zero direction component
                if origin[i] < self.min[i] || origin[i] > self.max[i] {
                    return None;
                }
                continue;
            }
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 * (1.0 + 1e-12) + 1e-12 {
                return None;
            }
        }
        Some(t0)
    }
}

#[derive(Debug, Clone)]
struct Node {
    aabb: Aabb,
    /// Leaf: `count > 0`, faces `order[first..first + count]`.
    /// Interior: children at `first` and `first + 1`... stored explicitly.
    first: usize,
    count: usize,
    right: usize,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<usize>,
}

/// Nearest surface hit found by a query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceHit {
    pub face: usize,
    pub barycentric: Vector3<f64>,
    pub point: Vector3<f64>,
    /// Distance for closest-point queries, ray parameter for ray casts.
    pub value: f64,
}

impl Bvh {
    pub(crate) fn build(vertices: &[Vector3<f64>], faces: &[[usize; 3]]) -> Self {
        let boxes: Vec<Aabb> = faces
            .iter()
            .map(|f| {
                let mut b = Aabb::empty();
                for &i in f {
                    b.grow(&vertices[i]);
                }
                b
            })
            .collect();
        let centroids: Vec<Vector3<f64>> = boxes.iter().map(|b| (b.min + b.max) * 0.5).collect();
        let mut order: Vec<usize> = (0..faces.len()).collect();
        let mut nodes = Vec::with_capacity(2 * faces.len() / LEAF_SIZE + 1);
        Self::build_node(&mut nodes, &mut order, 0, faces.len(), &boxes, &centroids);
        Self { nodes, order }
    }

    fn build_node(
        nodes: &mut Vec<Node>,
        order: &mut [usize],
        first: usize,
        count: usize,
        boxes: &[Aabb],
        centroids: &[Vector3<f64>],
    ) -> usize {
        let slice = &mut order[first..first + count];
        let aabb = slice.iter().fold(Aabb::empty(), |acc, &f| acc.merge(&boxes[f]));
        let idx = nodes.len();
        nodes.push(Node { aabb, first, count, right: 0 });
        if count <= LEAF_SIZE {
            return idx;
        }
        let mut cbox = Aabb::empty();
        for &f in slice.iter() {
            cbox.grow(&centroids[f]);
        }
        let extent = cbox.max - cbox.min;
        let axis = extent.imax();
        let mid = count / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            centroids[a][axis].partial_cmp(&centroids[b][axis]).unwrap().then(a.cmp(&b))
        });
        let left = Self::build_node(nodes, order, first, mid, boxes, centroids);
        debug_assert_eq!(left, idx + 1);
        let right = Self::build_node(nodes, order, first + mid, count - mid, boxes, centroids);
        nodes[idx].count = 0;
        nodes[idx].right = right;
        idx
    }

    fn is_leaf(&self, n: usize) -> bool {
        self.nodes[n].count > 0
    }

    fn leaf_faces(&self, n: usize) -> &[usize] {
        let node = &self.nodes[n];
        &self.order[node.first..node.first + node.count]
    }

    fn children(&self, n: usize) -> (usize, usize) {
        (n + 1, self.nodes[n].right)
    }

    pub(crate) fn root_aabb(&self) -> Aabb {
        self.nodes[0].aabb
    }

    /// Globally closest point on the mesh to `q` (mesh-local coordinates).
    /// Exact ties resolve to the lowest face index.
    pub fn closest_point(&self, vertices: &[Vector3<f64>], faces: &[[usize; 3]], q: &Vector3<f64>) -> FaceHit {
        let mut best =
            FaceHit { face: usize::MAX, barycentric: Vector3::zeros(), point: Vector3::zeros(), value: f64::INFINITY };
        let mut best_sq = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            if self.nodes[n].aabb.distance_sq(q) > best_sq {
                continue;
            }
            if self.is_leaf(n) {
                for &f in self.leaf_faces(n) {
                    let [a, b, c] = faces[f].map(|i| vertices[i]);
                    let (p, bary) = closest_point_on_triangle(q, &a, &b, &c);
                    let d = (p - q).norm_squared();
                    if d < best_sq || (d == best_sq && f < best.face) {
                        best_sq = d;
                        best = FaceHit { face: f, barycentric: bary, point: p, value: 0.0 };
                    }
                }
            } else {
                let (l, r) = self.children(n);
                let dl = self.nodes[l].aabb.distance_sq(q);
                let dr = self.nodes[r].aabb.distance_sq(q);
                if dl < dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        best.value = best_sq.sqrt();
        best
    }

    /// Nearest hit with `t > t_min`; equal-`t` ties resolve to the lowest face index.
    pub fn ray_cast(
        &self,
        vertices: &[Vector3<f64>],
        faces: &[[usize; 3]],
        origin: &Vector3<f64>,
        dir: &Vector3<f64>,
        t_min: f64,
    ) -> Option<FaceHit> {
        let inv = dir.map(|x| 1.0 / x);
        let mut best: Option<FaceHit> = None;
        let mut best_t = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let limit = if best_t.is_finite() { best_t * (1.0 + 1e-9) + 1e-9 } else { f64::MAX };
            if self.nodes[n].aabb.ray_entry(origin, &inv, limit).is_none() {
                continue;
            }
            if self.is_leaf(n) {
                for &f in self.leaf_faces(n) {
                    let [a, b, c] = faces[f].map(|i| vertices[i]);
                    if let Some((t, u, v)) = ray_triangle(origin, dir, &a, &b, &c) {
                        if t <= t_min {
                            continue;
                        }
                        let better = match best {
                            None => true,
                            Some(h) => t < best_t - 1e-12 || ((t - best_t).abs() <= 1e-12 && f < h.face),
                        };
                        if better {
                            best_t = t;
                            let bary = Vector3::new(1.0 - u - v, u, v);
                            best = Some(FaceHit { face: f, barycentric: bary, point: origin + dir * t, value: t });
                        }
                    }
                }
            } else {
                let (l, r) = self.children(n);
                stack.push(r);
                stack.push(l);
            }
        }
        best
    }

    /// Every ray/face intersection with `t > 0`, as `(t, face, u, v)`.
    pub(crate) fn ray_hits(
        &self,
        vertices: &[Vector3<f64>],
        faces: &[[usize; 3]],
        origin: &Vector3<f64>,
        dir: &Vector3<f64>,
        out: &mut Vec<(f64, usize, f64, f64)>,
    ) {
        out.clear();
        let inv = dir.map(|x| 1.0 / x);
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            if self.nodes[n].aabb.ray_entry(origin, &inv, f64::MAX).is_none() {
                continue;
            }
            if self.is_leaf(n) {
                for &f in self.leaf_faces(n) {
                    let [a, b, c] = faces[f].map(|i| vertices[i]);
                    if let Some((t, u, v)) = ray_triangle(origin, dir, &a, &b, &c) {
                        if t > -1e-12 {
                            out.push((t, f, u, v));
                        }
                    }
                }
            } else {
                let (l, r) = self.children(n);
                stack.push(r);
                stack.push(l);
            }
        }
    }

    /// Pairs of faces `(fa, fb)` whose boxes overlap (inflated by `margin`),
    /// with `other` placed in this BVH's frame by `b_in_a`.
    pub(crate) fn overlapping_faces(
        &self,
        other: &Bvh,
        b_in_a: &Pose,
        margin: f64,
        mut visit: impl FnMut(usize, usize),
    ) {
        let mut stack = vec![(0usize, 0usize)];
        let m2 = margin * margin;
        while let Some((na, nb)) = stack.pop() {
            let ba = self.nodes[na].aabb;
            let bb = other.nodes[nb].aabb.transformed(&b_in_a.rotation, &b_in_a.translation);
            if ba.box_distance_sq(&bb) > m2 {
                continue;
            }
            match (self.is_leaf(na), other.is_leaf(nb)) {
                (true, true) => {
                    for &fa in self.leaf_faces(na) {
                        for &fb in other.leaf_faces(nb) {
                            visit(fa, fb);
                        }
                    }
                }
                (true, false) => {
                    let (l, r) = other.children(nb);
                    stack.push((na, l));
                    stack.push((na, r));
                }
                (false, true) => {
                    let (l, r) = self.children(na);
                    stack.push((l, nb));
                    stack.push((r, nb));
                }
                (false, false) => {
                    let ea = (ba.max - ba.min).norm_squared();
                    let eb = (bb.max - bb.min).norm_squared();
                    if ea >= eb {
                        let (l, r) = self.children(na);
                        stack.push((l, nb));
                        stack.push((r, nb));
                    } else {
                        let (l, r) = other.children(nb);
                        stack.push((na, l));
                        stack.push((na, r));
                    }
                }
            }
        }
    }

    /// Minimum distance between two meshes (triangles assumed not to intersect).
    /// Returns `(distance, face_a, bary_a, face_b, bary_b)`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn min_distance(
        &self,
        va: &[Vector3<f64>],
        fa: &[[usize; 3]],
        other: &Bvh,
        vb_in_a: &[Vector3<f64>],
        fb: &[[usize; 3]],
        b_in_a: &Pose,
    ) -> (f64, usize, Vector3<f64>, usize, Vector3<f64>) {
        let mut best = (f64::INFINITY, usize::MAX, Vector3::zeros(), usize::MAX, Vector3::zeros());
        let mut best_sq = f64::INFINITY;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((na, nb)) = stack.pop() {
            let ba = self.nodes[na].aabb;
            let bb = other.nodes[nb].aabb.transformed(&b_in_a.rotation, &b_in_a.translation);
            if ba.box_distance_sq(&bb) > best_sq {
                continue;
            }
            match (self.is_leaf(na), other.is_leaf(nb)) {
                (true, true) => {
                    for &i in self.leaf_faces(na) {
                        let ta = fa[i].map(|k| va[k]);
                        for &j in other.leaf_faces(nb) {
                            let tb = fb[j].map(|k| vb_in_a[k]);
                            let (d, wa, wb) = triangle_triangle_distance(&ta, &tb);
                            let d2 = d * d;
                            if d2 < best_sq || (d2 == best_sq && (i, j) < (best.1, best.3)) {
                                best_sq = d2;
                                best = (d, i, wa, j, wb);
                            }
                        }
                    }
                }
                (true, false) => {
                    let (l, r) = other.children(nb);
                    stack.push((na, l));
                    stack.push((na, r));
                }
                (false, true) => {
                    let (l, r) = self.children(na);
                    stack.push((l, nb));
                    stack.push((r, nb));
                }
                (false, false) => {
                    let ea = (ba.max - ba.min).norm_squared();
                    let eb = (bb.max - bb.min).norm_squared();
                    if ea >= eb {
                        let (l, r) = self.children(na);
                        stack.push((l, nb));
                        stack.push((r, nb));
                    } else {
                        let (l, r) = other.children(nb);
                        stack.push((na, l));
                        stack.push((na, r));
                    }
                }
            }
        }
        best
    }
}
