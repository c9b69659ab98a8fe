use nalgebra::Vector3;

/// Closest point on triangle `abc` to `p`, with its barycentric coordinates.
pub fn closest_point_on_triangle(
    p: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
) -> (Vector3<f64>, Vector3<f64>) {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (*a, Vector3::new(1.0, 0.0, 0.0));
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (*b, Vector3::new(0.0, 1.0, 0.0));
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, Vector3::new(1.0 - v, v, 0.0));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (*c, Vector3::new(0.0, 0.0, 1.0));
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, Vector3::new(1.0 - w, 0.0, w));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, Vector3::new(0.0, 1.0 - w, w));
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, Vector3::new(1.0 - v - w, v, w))
}

/// Möller-Trumbore intersection. Returns `(t, u, v)` with barycentric
/// weights `(1 − u − v, u, v)`, for any `t` (caller filters the sign).
pub fn ray_triangle(
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
) -> Option<(f64, f64, f64)> {
    let e1 = b - a;
    let e2 = c - a;
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    let scale = e1.norm() * e2.norm();
    if det.abs() <= 1e-14 * scale {
        return None;
    }
    let inv = 1.0 / det;
    let tvec = origin - a;
    let u = tvec.dot(&pvec) * inv;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    Some((e2.dot(&qvec) * inv, u, v))
}

/// Closest points between segments `p1q1` and `p2q2`: `(s, t, c1, c2)`.
pub(crate) fn closest_segment_segment(
    p1: &Vector3<f64>,
    q1: &Vector3<f64>,
    p2: &Vector3<f64>,
    q2: &Vector3<f64>,
) -> (f64, f64, Vector3<f64>, Vector3<f64>) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let (s, t);
    if a <= 1e-300 && e <= 1e-300 {
        return (0.0, 0.0, *p1, *p2);
    }
    if a <= 1e-300 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= 1e-300 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 1e-300 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (s, t, p1 + d1 * s, p2 + d2 * t)
}

/// Distance between two non-intersecting triangles with witness barycentrics.
pub(crate) fn triangle_triangle_distance(
    ta: &[Vector3<f64>; 3],
    tb: &[Vector3<f64>; 3],
) -> (f64, Vector3<f64>, Vector3<f64>) {
    let mut best = (f64::INFINITY, Vector3::zeros(), Vector3::zeros());
    for i in 0..3 {
        let (q, bary) = closest_point_on_triangle(&ta[i], &tb[0], &tb[1], &tb[2]);
        let d = (q - ta[i]).norm();
        if d < best.0 {
            let mut ba = Vector3::zeros();
            ba[i] = 1.0;
            best = (d, ba, bary);
        }
        let (q, bary) = closest_point_on_triangle(&tb[i], &ta[0], &ta[1], &ta[2]);
        let d = (q - tb[i]).norm();
        if d < best.0 {
            let mut bb = Vector3::zeros();
            bb[i] = 1.0;
            best = (d, bary, bb);
        }
    }
    for i in 0..3 {
        let (ia, ja) = (i, (i + 1) % 3);
        for j in 0..3 {
            let (ib, jb) = (j, (j + 1) % 3);
            let (s, t, ca, cb) = closest_segment_segment(&ta[ia], &ta[ja], &tb[ib], &tb[jb]);
            let d = (ca - cb).norm();
            if d < best.0 {
                let mut ba = Vector3::zeros();
                ba[ia] = 1.0 - s;
                ba[ja] = s;
                let mut bb = Vector3::zeros();
                bb[ib] = 1.0 - t;
                bb[jb] = t;
                best = (d, ba, bb);
            }
        }
    }
    best
}
