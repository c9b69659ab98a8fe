//! Roll-slide contact kinematics between two rigid bodies.
//!
//! Twists are `[ω; v]`. A contact frame's z-axis is the outward surface
//! normal; at an ideal contact the two frames share an origin with opposite
//! z-axes, and their x/y axes differ by a reflection parameterized by the
//! spin angle ψ.

mod curvature;
mod primitive;

use nalgebra::{Matrix2, Matrix3, RowVector2, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geodesic::tangent_basis;
use crate::mesh::{ManifoldMesh, SurfacePoint};
use crate::se3::{transform_twist, Pose, Twist};

pub use curvature::{default_curvature_step, estimate_curvature};
pub use primitive::{primitive_geometry, ChartDerivatives, ParametricSurface};

/// Where a contact frame sits on its body's surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceLocation {
    Mesh(SurfacePoint),
    Chart { u: f64, v: f64 },
}

/// A surface-bound frame with the outward normal as z-axis, in body coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactFrame {
    pub rotation: Matrix3<f64>,
    pub position: Vector3<f64>,
    pub location: SurfaceLocation,
}

impl ContactFrame {
    /// Frame at `p` with the interpolated normal as z and `x_hint` projected as x.
    pub fn on_mesh(mesh: &ManifoldMesh, p: SurfacePoint, x_hint: &Vector3<f64>) -> Result<Self> {
        let (x, y, z) = tangent_basis(mesh, &p, x_hint)?;
        Ok(Self {
            rotation: Matrix3::from_columns(&[x, y, z]),
            position: mesh.position(&p),
            location: SurfaceLocation::Mesh(p),
        })
    }

    /// The chart frame of a primitive: x along `f_u`, z the outward normal.
    pub fn on_surface(surface: &ParametricSurface, u: f64, v: f64) -> Result<Self> {
        let d = surface.derivatives(u, v)?;
        Ok(Self { rotation: d.frame(), position: d.f, location: SurfaceLocation::Chart { u, v } })
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.rotation, self.position)
    }

    pub fn x(&self) -> Vector3<f64> {
        self.rotation.column(0).into()
    }

    pub fn y(&self) -> Vector3<f64> {
        self.rotation.column(1).into()
    }

    pub fn z(&self) -> Vector3<f64> {
        self.rotation.column(2).into()
    }

    pub fn surface_point(&self) -> Option<SurfacePoint> {
        match self.location {
            SurfaceLocation::Mesh(p) => Some(p),
            SurfaceLocation::Chart { .. } => None,
        }
    }

    pub fn chart(&self) -> Option<(f64, f64)> {
        match self.location {
            SurfaceLocation::Chart { u, v } => Some((u, v)),
            SurfaceLocation::Mesh(_) => None,
        }
    }
}

/// First- and second-order chart geometry at a point: `M` maps chart rates to
/// tangent velocity in the contact frame, `K` is the shape operator in that
/// frame and `T` the torsion form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceGeometry {
    pub m: Matrix2<f64>,
    pub k: Matrix2<f64>,
    pub t: RowVector2<f64>,
}

impl SurfaceGeometry {
    /// Geometry in the geodesic chart: unit metric, no torsion.
    pub fn geodesic(k: Matrix2<f64>) -> Self {
        Self { m: Matrix2::identity(), k, t: RowVector2::zeros() }
    }
}

/// Rotation by 90°: `E (a, b) = (−b, a)`.
pub fn rot90() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

/// Body twist of the contact frame induced by chart velocity `g_dot`.
pub fn induced_contact_twist(geom: &SurfaceGeometry, g_dot: &Vector2<f64>) -> Twist {
    let a = geom.m * g_dot;
    let w = rot90() * geom.k * a;
    Twist::new(Vector3::new(w.x, w.y, (geom.t * a)[0]), Vector3::new(a.x, a.y, 0.0))
}

/// Top-left block of the ideal contact rotation: a reflection by spin angle ψ.
pub fn spin_reflection(psi: f64) -> Matrix2<f64> {
    let (s, c) = psi.sin_cos();
    Matrix2::new(c, s, s, -c)
}

/// Ideal relative pose `T_C0C1`: coincident origins, anti-aligned z-axes.
pub fn ideal_contact_pose(psi: f64) -> Pose {
    let (s, c) = psi.sin_cos();
    Pose::from_rotation(Matrix3::new(c, s, 0.0, s, -c, 0.0, 0.0, 0.0, -1.0))
}

/// Spin angle of the ideal pose nearest to relative contact rotation `r`.
pub fn spin_of(r: &Matrix3<f64>) -> f64 {
    (0.5 * (r[(0, 1)] + r[(1, 0)])).atan2(0.5 * (r[(0, 0)] - r[(1, 1)]))
}

/// Cartesian roll-slide twist `V_L0L1` (body twist of `L1` relative to `L0`,
/// expressed in `L1`) from the world poses and body twists of both bodies.
pub fn relative_contact_twist(pose0: &Pose, twist0: &Twist, pose1: &Pose, twist1: &Twist, frame1: &Pose) -> Twist {
    let t_l1b1 = frame1.inverse();
    let t_l1b0 = t_l1b1 * pose1.inverse() * *pose0;
    transform_twist(&t_l1b1, twist1) - transform_twist(&t_l1b0, twist0)
}

/// Body twist of body 1 that realizes the roll-slide twist `v_l0l1`.
pub fn solve_body1_twist(v_l0l1: &Twist, pose0: &Pose, twist0: &Twist, pose1: &Pose, frame1: &Pose) -> Twist {
    let t_l1b0 = frame1.inverse() * pose1.inverse() * *pose0;
    transform_twist(frame1, &(*v_l0l1 + transform_twist(&t_l1b0, twist0)))
}

/// Solution of the governing equations for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactRates {
    pub g_dot0: Vector2<f64>,
    pub g_dot1: Vector2<f64>,
    /// Rate of the relative spin `ω_z` of `C1` about its z-axis relative to `C0`.
    pub spin_rate: f64,
    /// Normal separation speed left unexplained by the contact rates.
    pub separation_rate: f64,
}

/// Solves the tangential rows of the governing equations for chart rates on
/// both bodies, given each side's geometry and the spin angle.
pub fn solve_contact_rates(
    v_l0l1: &Twist,
    geom0: &SurfaceGeometry,
    geom1: &SurfaceGeometry,
    psi: f64,
) -> Result<ContactRates> {
    let r2 = spin_reflection(psi);
    let w = v_l0l1.angular.xy();
    let v = v_l0l1.linear.xy();
    let a = r2 * geom0.k * r2 + geom1.k;
    let sigma = a.singular_values().min();
    if !(sigma >= 1e-9) {
        return Err(Error::SingularRelativeCurvature { sigma });
    }
    // a1 = R2 a0 − v and (R2 K0 R2 + K1) R2 a0 = E ω + K1 v, with a_i = M_i ġ_i.
    let rhs = rot90() * w + geom1.k * v;
    let r2a0 = a.lu().solve(&rhs).ok_or(Error::SingularRelativeCurvature { sigma })?;
    let a0 = r2 * r2a0;
    let a1 = r2a0 - v;
    let inv = |m: &Matrix2<f64>| m.try_inverse().ok_or(Error::SingularRelativeCurvature { sigma: 0.0 });
    let g_dot0 = inv(&geom0.m)? * a0;
    let g_dot1 = inv(&geom1.m)? * a1;
    let spin_rate = v_l0l1.angular.z + (geom1.t * a1)[0] + (geom0.t * a0)[0];
    Ok(ContactRates { g_dot0, g_dot1, spin_rate, separation_rate: v_l0l1.linear.z })
}

/// Geodesic-chart contact velocities (unit metric, torsion and spin ignored).
/// `r_rel` is the relative contact rotation `R_C0C1`.
pub fn solve_contact_velocities(
    v_l0l1: &Twist,
    k0: &Matrix2<f64>,
    k1: &Matrix2<f64>,
    r_rel: &Matrix3<f64>,
) -> Result<(Vector2<f64>, Vector2<f64>)> {
    let rates =
        solve_contact_rates(v_l0l1, &SurfaceGeometry::geodesic(*k0), &SurfaceGeometry::geodesic(*k1), spin_of(r_rel))?;
    Ok((rates.g_dot0, rates.g_dot1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::{adjoint, exp_map};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pose(rng: &mut ChaCha8Rng) -> Pose {
        let xi = Twist::new(
            Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Vector3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
        );
        exp_map(&xi, 1.0)
    }

    fn random_twist(rng: &mut ChaCha8Rng) -> Twist {
        Twist::from_vector(&nalgebra::Vector6::from_fn(|_, _| rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn induced_twist_examples() {
        let sphere = SurfaceGeometry::geodesic(Matrix2::identity() * 0.2);
        assert_eq!(induced_contact_twist(&sphere, &Vector2::zeros()), Twist::zero());
        let t = induced_contact_twist(&sphere, &Vector2::new(1.0, 0.0));
        assert_relative_eq!(t.angular, Vector3::new(0.0, 0.2, 0.0), epsilon = 1e-15);
        assert_relative_eq!(t.linear, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        let plane = SurfaceGeometry::geodesic(Matrix2::zeros());
        let t = induced_contact_twist(&plane, &Vector2::new(0.3, -0.7));
        assert_eq!(t.angular, Vector3::zeros());
        assert_eq!(t.linear, Vector3::new(0.3, -0.7, 0.0));
    }

    #[test]
    fn ideal_pose_structure() {
        let p = ideal_contact_pose(0.0);
        assert_eq!(p.rotation, Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0));
        for psi in [-2.0, 0.3, std::f64::consts::FRAC_PI_2, 3.0] {
            let p = ideal_contact_pose(psi);
            assert_eq!(p.translation, Vector3::zeros());
            assert_relative_eq!(p.rotation * Vector3::z(), -Vector3::z(), epsilon = 1e-15);
            assert_relative_eq!(p.rotation.determinant(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(spin_of(&p.rotation), psi, epsilon = 1e-12);
        }
        // ψ = π/2: quarter turn composed with the reflection diag(1, −1).
        let q = ideal_contact_pose(std::f64::consts::FRAC_PI_2).rotation;
        let expected =
            crate::se3::rot_z(std::f64::consts::FRAC_PI_2) * Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0));
        assert_relative_eq!(q, expected, epsilon = 1e-15);
    }

    #[test]
    fn relative_twist_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (p0, p1, f1) = (random_pose(&mut rng), random_pose(&mut rng), random_pose(&mut rng));
        let z = Twist::zero();
        assert_eq!(relative_contact_twist(&p0, &z, &p1, &z, &f1), Twist::zero());
        // Body 1 rigidly attached to body 0.
        let v0 = random_twist(&mut rng);
        let v1 = transform_twist(&(p1.inverse() * p0), &v0);
        let rel = relative_contact_twist(&p0, &v0, &p1, &v1, &f1);
        assert!(rel.to_vector().norm() < 1e-12);
    }

    #[test]
    fn body1_twist_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let (p0, p1, f1) = (random_pose(&mut rng), random_pose(&mut rng), random_pose(&mut rng));
            let (v, v0) = (random_twist(&mut rng), random_twist(&mut rng));
            let v1 = solve_body1_twist(&v, &p0, &v0, &p1, &f1);
            let back = relative_contact_twist(&p0, &v0, &p1, &v1, &f1);
            assert!((back - v).to_vector().norm() < 1e-9);
        }
        let z = Twist::zero();
        let p = Pose::identity();
        assert_eq!(solve_body1_twist(&z, &p, &z, &p, &p), Twist::zero());
    }

    #[test]
    fn rolling_sphere_on_plane() {
        // Plane is body 0 at the origin; sphere (r = 5) is body 1 centered at z = 5.
        let r = 5.0;
        let w = 0.7;
        let p0 = Pose::identity();
        let p1 = Pose::from_translation(Vector3::new(0.0, 0.0, r));
        let frame1 = Pose::new(ideal_contact_pose(0.0).rotation, Vector3::new(0.0, 0.0, -r));
        // Roll about world −y with the contact point instantaneously at rest.
        let omega = Vector3::new(0.0, -w, 0.0);
        let v1 = Twist::new(omega, -omega.cross(&Vector3::new(0.0, 0.0, -r)));
        let rel = relative_contact_twist(&p0, &Twist::zero(), &p1, &v1, &frame1);
        assert_relative_eq!(rel.linear, Vector3::zeros(), epsilon = 1e-12);
        assert_relative_eq!(rel.angular, Vector3::new(0.0, w, 0.0), epsilon = 1e-12);

        let k_plane = Matrix2::zeros();
        let k_sphere = Matrix2::identity() / r;
        let (g0, g1) = solve_contact_velocities(&rel, &k_plane, &k_sphere, &frame1.rotation).unwrap();
        // The center moves with −ω × (r ẑ); the contact follows it along −x.
        assert_relative_eq!(g0, Vector2::new(-r * w, 0.0), epsilon = 1e-12);
        assert_relative_eq!(g0.norm(), g1.norm(), epsilon = 1e-12);
    }

    #[test]
    fn governing_equations_reassemble() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let sym = |rng: &mut ChaCha8Rng| {
                let (a, b, c) = (rng.gen_range(0.05..0.5), rng.gen_range(-0.1..0.1), rng.gen_range(0.05..0.5));
                Matrix2::new(a, b, b, c)
            };
            let (k0, k1) = (sym(&mut rng), sym(&mut rng));
            let psi = rng.gen_range(-3.0..3.0);
            let v = random_twist(&mut rng);
            let (g0, g1) = solve_contact_velocities(&v, &k0, &k1, &ideal_contact_pose(psi).rotation).unwrap();
            let t0 = induced_contact_twist(&SurfaceGeometry::geodesic(k0), &g0);
            let t1 = induced_contact_twist(&SurfaceGeometry::geodesic(k1), &g1);
            // V_L0L1 + V_B1C1 = Ad_{T_C1C0} V_B0C0 + V_C0C1 in the ω_xy and v_xy rows.
            let rhs = adjoint(&ideal_contact_pose(psi).inverse()) * t0.to_vector();
            let lhs = v.to_vector() + t1.to_vector();
            for row in [0, 1, 3, 4] {
                assert!((lhs[row] - rhs[row]).abs() < 1e-9, "row {row}");
            }
        }
    }

    #[test]
    fn zero_twist_and_flat_contact() {
        let k = Matrix2::identity() * 0.2;
        let (g0, g1) = solve_contact_velocities(&Twist::zero(), &k, &k, &ideal_contact_pose(0.4).rotation).unwrap();
        assert_eq!((g0, g1), (Vector2::zeros(), Vector2::zeros()));
        let roll = Twist::new(Vector3::new(0.0, 1.0, 0.0), Vector3::zeros());
        assert!(matches!(
            solve_contact_velocities(&roll, &Matrix2::zeros(), &Matrix2::zeros(), &Matrix3::identity()),
            Err(Error::SingularRelativeCurvature { .. })
        ));
    }
}
