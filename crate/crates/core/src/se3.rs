//! Rigid-body math on SE(3).
//!
//! Twists are stacked `[angular; linear]` everywhere, including adjoints.
//! Units: radians, millimeters, seconds.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};

use crate::error::{Error, Result};

/// A rigid transform `x ↦ R x + p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

/// A body velocity `[ω; v]` in rad/s and mm/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Twist {
    pub angular: Vector3<f64>,
    pub linear: Vector3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self { rotation, translation }
    }

    pub fn identity() -> Self {
        Self::new(Matrix3::identity(), Vector3::zeros())
    }

    pub fn from_rotation(rotation: Matrix3<f64>) -> Self {
        Self::new(rotation, Vector3::zeros())
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self::new(Matrix3::identity(), translation)
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self::new(rt, -(rt * self.translation))
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn inverse_transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.transpose() * (p - self.translation)
    }

    pub fn inverse_transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.transpose() * v
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    pub fn from_homogeneous(m: &Matrix4<f64>) -> Self {
        Self::new(m.fixed_view::<3, 3>(0, 0).into_owned(), m.fixed_view::<3, 1>(0, 3).into_owned())
    }

    /// Same pose with the rotation replaced by its nearest orthonormal matrix.
    pub fn renormalized(&self) -> Self {
        Self::new(nearest_rotation(&self.rotation), self.translation)
    }
}

impl Mul for Pose {
    type Output = Pose;

    fn mul(self, rhs: Pose) -> Pose {
        Pose::new(self.rotation * rhs.rotation, self.rotation * rhs.translation + self.translation)
    }
}

impl Twist {
    pub fn new(angular: Vector3<f64>, linear: Vector3<f64>) -> Self {
        Self { angular, linear }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self::new(Vector3::new(v[0], v[1], v[2]), Vector3::new(v[3], v[4], v[5]))
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.angular.x, self.angular.y, self.angular.z, self.linear.x, self.linear.y, self.linear.z)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.angular * s, self.linear * s)
    }

    pub fn is_finite(&self) -> bool {
        self.angular.iter().chain(self.linear.iter()).all(|x| x.is_finite())
    }

    /// 4×4 matrix form `[ω̂ v; 0 0]`.
    pub fn hat(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&self.angular));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.linear);
        m
    }
}

impl Add for Twist {
    type Output = Twist;
    fn add(self, rhs: Twist) -> Twist {
        Twist::new(self.angular + rhs.angular, self.linear + rhs.linear)
    }
}

impl Sub for Twist {
    type Output = Twist;
    fn sub(self, rhs: Twist) -> Twist {
        Twist::new(self.angular - rhs.angular, self.linear - rhs.linear)
    }
}

impl Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist::new(-self.angular, -self.linear)
    }
}

pub fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Rotation by `angle` about the world z axis.
pub fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Coefficients (sin θ/θ, (1−cos θ)/θ², (θ−sin θ)/θ³) with series near zero.
fn exp_coefficients(theta: f64) -> (f64, f64, f64) {
    if theta < 1e-2 {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0)
    } else {
        let (s, c) = theta.sin_cos();
        let t2 = theta * theta;
        (s / theta, (1.0 - c) / t2, (theta - s) / (t2 * theta))
    }
}

/// Rodrigues' formula for `exp(ŵ)`.
pub fn exp_so3(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta = w.norm();
    let (a, b, _) = exp_coefficients(theta);
    let k = skew(w);
    Matrix3::identity() + k * a + k * k * b
}

/// Rotation vector of `r` (principal branch). Errors within 1e-6 of π.
pub fn log_so3(r: &Matrix3<f64>) -> Result<Vector3<f64>> {
    let cos_theta = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    if std::f64::consts::PI - theta < 1e-6 {
        return Err(Error::AngleNearPi { angle: theta });
    }
    let vee = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    if theta < 1e-4 {
        // θ/(2 sin θ) ≈ 1/2 + θ²/12
        return Ok(vee * (0.5 + theta * theta / 12.0));
    }
    if theta < 2.5 {
        return Ok(vee * (theta / (2.0 * theta.sin())));
    }
    // Near π the antisymmetric part is small; recover the axis from the
    // symmetric part and take the sign from the antisymmetric part.
    let sym = (r + r.transpose()) * 0.5 - Matrix3::identity() * cos_theta;
    let one_minus_c = 1.0 - cos_theta;
    let mut col = 0;
    for i in 1..3 {
        if sym[(i, i)] > sym[(col, col)] {
            col = i;
        }
    }
    let mut axis: Vector3<f64> = sym.column(col) / one_minus_c;
    axis /= axis.norm();
    if axis.dot(&vee) < 0.0 {
        axis = -axis;
    }
    Ok(axis * theta)
}

/// SE(3) exponential of `xi · dt`.
pub fn exp_map(xi: &Twist, dt: f64) -> Pose {
    let w = xi.angular * dt;
    let v = xi.linear * dt;
    let theta = w.norm();
    let (a, b, c) = exp_coefficients(theta);
    let k = skew(&w);
    let k2 = k * k;
    let rotation = Matrix3::identity() + k * a + k2 * b;
    let left_jacobian = Matrix3::identity() + k * b + k2 * c;
    Pose::new(rotation, left_jacobian * v)
}

/// SE(3) logarithm, principal branch.
pub fn log_map(t: &Pose) -> Result<Twist> {
    let w = log_so3(&t.rotation)?;
    let theta = w.norm();
    let k = skew(&w);
    // Inverse of the left Jacobian: I − ½ŵ + c ŵ².
    let c = if theta < 0.1 {
        let t2 = theta * theta;
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0 + t2 * t2 * t2 / 1209600.0
    } else {
        let (s, co) = theta.sin_cos();
        (1.0 - theta * s / (2.0 * (1.0 - co))) / (theta * theta)
    };
    let inv_left = Matrix3::identity() - k * 0.5 + k * k * c;
    Ok(Twist::new(w, inv_left * t.translation))
}

/// 6×6 adjoint `[R 0; p̂R R]` for `[ω; v]` twists.
pub fn adjoint(t: &Pose) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&t.rotation);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&t.rotation);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&(skew(&t.translation) * t.rotation));
    m
}

/// Applies `Ad_T` to a twist.
pub fn transform_twist(t: &Pose, xi: &Twist) -> Twist {
    let angular = t.rotation * xi.angular;
    let linear = t.rotation * xi.linear + t.translation.cross(&angular);
    Twist::new(angular, linear)
}

/// Nearest orthonormal matrix with determinant +1 (polar decomposition).
pub fn nearest_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        let mut d = Matrix3::identity();
        d[(2, 2)] = -1.0;
        r = u * d * v_t;
    }
    r
}

/// One classical RK4 step of `Ṫ = T·ξ̂` for a constant body twist, followed by
/// rotation renormalization.
pub fn rk4_pose_step(t: &Pose, body_twist: &Twist, dt: f64) -> Pose {
    let xi = body_twist.hat();
    let x = t.to_homogeneous();
    let f = |m: &Matrix4<f64>| m * xi;
    let k1 = f(&x);
    let k2 = f(&(x + k1 * (dt * 0.5)));
    let k3 = f(&(x + k2 * (dt * 0.5)));
    let k4 = f(&(x + k3 * dt));
    let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    Pose::from_homogeneous(&next).renormalized()
}

/// RK4 step of `Ṙ = R ω̂` for a constant body angular velocity.
pub fn rk4_rotation_step(r: &Matrix3<f64>, body_angular: &Vector3<f64>, dt: f64) -> Matrix3<f64> {
    let w = skew(body_angular);
    let k1 = r * w;
    let k2 = (r + k1 * (dt * 0.5)) * w;
    let k3 = (r + k2 * (dt * 0.5)) * w;
    let k4 = (r + k3 * dt) * w;
    nearest_rotation(&(r + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)))
}

/// Axis-angle vector `a` such that `exp(â) z1 = −z0`.
///
/// When `z1 == z0` the rotation is by π about the unit vector orthogonal to
/// `z0` with the largest |x| component (ties resolved toward +x, then +y).
pub fn axis_angle_anti_align(z0: &Vector3<f64>, z1: &Vector3<f64>) -> Vector3<f64> {
    let target = -z0;
    let axis = z1.cross(&target);
    let s = axis.norm();
    let c = z1.dot(&target);
    if s > 1e-12 {
        return axis * (s.atan2(c) / s);
    }
    if c > 0.0 {
        return Vector3::zeros();
    }
    perpendicular_axis(z0) * std::f64::consts::PI
}

fn perpendicular_axis(z: &Vector3<f64>) -> Vector3<f64> {
    for candidate in [Vector3::x(), Vector3::y(), Vector3::z()] {
        let p = candidate - z * candidate.dot(z);
        let n = p.norm();
        if n > 1e-9 {
            return p / n;
        }
    }
    unreachable!("z has unit length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_pose(rng: &mut ChaCha8Rng, max_angle: f64) -> Pose {
        let axis =
            Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).normalize();
        let angle = rng.gen_range(1e-3..max_angle);
        let p = Vector3::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        Pose::new(exp_so3(&(axis * angle)), p)
    }

    fn pose_diff(a: &Pose, b: &Pose) -> f64 {
        (a.rotation - b.rotation).amax().max((a.translation - b.translation).amax())
    }

    #[test]
    fn exp_of_zero_twist_is_identity() {
        assert_eq!(exp_map(&Twist::zero(), 3.7), Pose::identity());
    }

    #[test]
    fn exp_half_turn_about_z() {
        let t = exp_map(&Twist::new(Vector3::new(0.0, 0.0, PI), Vector3::zeros()), 1.0);
        assert!(pose_diff(&t, &Pose::from_rotation(rot_z(PI))) < 1e-12);
    }

    #[test]
    fn exp_matches_screw_closed_form() {
        // Screw about z through the point q = ω × v / |ω|² = (0, 1, 0), zero pitch.
        let xi = Twist::new(Vector3::new(0.0, 0.0, 1.0), Vector3::new(1.0, 0.0, 0.0));
        let theta = PI / 2.0;
        let t = exp_map(&xi, theta);
        let q = Vector3::new(0.0, 1.0, 0.0);
        let r = rot_z(theta);
        let expected = Pose::new(r, (Matrix3::identity() - r) * q);
        assert!(pose_diff(&t, &expected) < 1e-12);
        assert_relative_eq!(t.translation, Vector3::new(1.0, 1.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn log_of_identity_and_translation() {
        assert_eq!(log_map(&Pose::identity()).unwrap(), Twist::zero());
        let xi = log_map(&Pose::from_translation(Vector3::new(0.0, 0.0, 5.0))).unwrap();
        assert_eq!(xi.angular, Vector3::zeros());
        assert_relative_eq!(xi.linear, Vector3::new(0.0, 0.0, 5.0), epsilon = 1e-15);
    }

    #[test]
    fn log_rejects_half_turn() {
        let err = log_map(&Pose::from_rotation(rot_z(PI))).unwrap_err();
        assert!(matches!(err, Error::AngleNearPi { .. }));
    }

    #[test]
    fn exp_log_roundtrip_over_seeded_poses() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = random_pose(&mut rng, PI - 1e-3);
            let back = exp_map(&log_map(&p).unwrap(), 1.0);
            assert!(pose_diff(&p, &back) < 1e-9, "{}", pose_diff(&p, &back));
        }
    }

    #[test]
    fn adjoint_identity_and_pure_rotation() {
        assert_eq!(adjoint(&Pose::identity()), Matrix6::identity());
        let r = exp_so3(&Vector3::new(0.3, -0.2, 0.9));
        let ad = adjoint(&Pose::from_rotation(r));
        assert_eq!(ad.fixed_view::<3, 3>(0, 0).into_owned(), r);
        assert_eq!(ad.fixed_view::<3, 3>(3, 3).into_owned(), r);
        assert_eq!(ad.fixed_view::<3, 3>(3, 0).into_owned(), Matrix3::zeros());
        assert_eq!(ad.fixed_view::<3, 3>(0, 3).into_owned(), Matrix3::zeros());
    }

    #[test]
    fn adjoint_inverse_and_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_pose(&mut rng, 3.0);
            let b = random_pose(&mut rng, 3.0);
            let inv = adjoint(&a).try_inverse().unwrap();
            assert!((inv - adjoint(&a.inverse())).amax() < 1e-9);
            assert!((adjoint(&a) * adjoint(&a.inverse()) - Matrix6::identity()).amax() < 1e-9);
            assert!((adjoint(&(a * b)) - adjoint(&a) * adjoint(&b)).amax() < 1e-9);
        }
    }

    #[test]
    fn transform_twist_matches_adjoint_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_pose(&mut rng, 2.0);
        let xi = Twist::new(Vector3::new(0.1, 0.2, -0.3), Vector3::new(1.0, -2.0, 0.5));
        let a = transform_twist(&t, &xi).to_vector();
        let b = adjoint(&t) * xi.to_vector();
        assert!((a - b).amax() < 1e-12);
    }

    #[test]
    fn rk4_zero_twist_keeps_pose() {
        let p = Pose::new(exp_so3(&Vector3::new(0.1, 0.2, 0.3)), Vector3::new(1.0, 2.0, 3.0));
        assert!(pose_diff(&rk4_pose_step(&p, &Twist::zero(), 0.01), &p) < 1e-15);
    }

    #[test]
    fn rk4_closed_orbit_returns_to_start() {
        let w = 2.0 * PI;
        let n = 1000;
        let dt = 1.0 / n as f64;
        let xi = Twist::new(Vector3::new(0.0, 0.0, w), Vector3::zeros());
        let mut p = Pose::identity();
        for _ in 0..n {
            p = rk4_pose_step(&p, &xi, dt);
        }
        assert!((p.rotation - Matrix3::identity()).amax() < 1e-6);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let xi = Twist::new(Vector3::new(0.4, -0.7, 1.1), Vector3::new(3.0, 1.0, -2.0));
        let start = Pose::new(exp_so3(&Vector3::new(0.2, 0.1, 0.0)), Vector3::new(1.0, 0.0, 0.0));
        let err = |dt: f64| {
            let exact = start * exp_map(&xi, dt);
            pose_diff(&rk4_pose_step(&start, &xi, dt), &exact)
        };
        let e1 = err(0.1);
        let e2 = err(0.05);
        assert!(e1 / e2 >= 16.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn rk4_determinant_stays_one() {
        let xi = Twist::new(Vector3::new(0.3, -1.2, 0.8), Vector3::new(1.0, 1.0, 1.0));
        let mut p = Pose::identity();
        for _ in 0..100_000 {
            p = rk4_pose_step(&p, &xi, 0.01);
        }
        assert!((p.rotation.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn anti_align_cases() {
        let z = Vector3::z();
        assert_eq!(axis_angle_anti_align(&z, &-z), Vector3::zeros());

        let a = axis_angle_anti_align(&z, &z);
        assert_relative_eq!(a.norm(), PI, epsilon = 1e-12);
        assert!(a.dot(&z).abs() < 1e-12);
        assert_relative_eq!(a / PI, Vector3::x(), epsilon = 1e-12);

        let a = axis_angle_anti_align(&z, &Vector3::x());
        assert_relative_eq!(exp_so3(&a) * Vector3::x(), -z, epsilon = 1e-9);
    }

    #[test]
    fn anti_align_degenerate_axis_tie_break() {
        // z0 along x: every perpendicular has zero x component, so +y wins.
        let a = axis_angle_anti_align(&Vector3::x(), &Vector3::x());
        assert_relative_eq!(a / PI, Vector3::y(), epsilon = 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn anti_align_rotates_onto_target(
            a in proptest::array::uniform3(-1.0f64..1.0),
            b in proptest::array::uniform3(-1.0f64..1.0),
        ) {
            let z0 = Vector3::from(a);
            let z1 = Vector3::from(b);
            proptest::prop_assume!(z0.norm() > 1e-3 && z1.norm() > 1e-3);
            let z0 = z0.normalize();
            let z1 = z1.normalize();
            let r = exp_so3(&axis_angle_anti_align(&z0, &z1));
            proptest::prop_assert!((r * z1 + z0).norm() < 1e-9);
        }
    }
}
