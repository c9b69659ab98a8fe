use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, Matrix3, RowVector2, Vector3};

use super::SurfaceGeometry;
use crate::error::{Error, Result};

/// Analytic shapes with a closed-form chart `f(u, v)` whose normal `f_u × f_v`
/// points outward.
///
/// | kind | chart |
/// |---|---|
/// | `Sphere` | `r (cos u cos v, −cos u sin v, sin u)`, `u` latitude |
/// | `Hemisphere` | sphere chart restricted to `u ≥ 0` |
/// | `Ellipsoid` | `(a sin u, b cos u sin v, c cos u cos v)`; orthogonal when `b = c` |
/// | `Cylinder` | `(r cos u, r sin u, v)` |
/// | `Torus` | `((R + r cos v) cos u, (R + r cos v) sin u, r sin v)` |
/// | `Plane` | `(u, v, 0)` |
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParametricSurface {
    Sphere { radius: f64 },
    Hemisphere { radius: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
    Cylinder { radius: f64 },
    Torus { major: f64, minor: f64 },
    Plane,
}

/// Chart point with first and second partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartDerivatives {
    pub f: Vector3<f64>,
    pub fu: Vector3<f64>,
    pub fv: Vector3<f64>,
    pub fuu: Vector3<f64>,
    pub fuv: Vector3<f64>,
    pub fvv: Vector3<f64>,
}

impl ChartDerivatives {
    pub fn normal(&self) -> Vector3<f64> {
        self.fu.cross(&self.fv).normalize()
    }

    /// Columns `x = f_u/|f_u|`, `y = z × x`, `z` outward normal.
    pub fn frame(&self) -> Matrix3<f64> {
        let x = self.fu.normalize();
        let z = self.normal();
        Matrix3::from_columns(&[x, z.cross(&x), z])
    }

    /// `M`, `K` and `T` in the chart frame. For non-orthogonal charts `M` is
    /// the (upper-triangular) map from chart rates to frame velocity.
    pub fn geometry(&self) -> SurfaceGeometry {
        let n = self.fu.cross(&self.fv);
        let nn = n.norm();
        let z = n / nn;
        let nu = self.fuu.cross(&self.fv) + self.fu.cross(&self.fuv);
        let nv = self.fuv.cross(&self.fv) + self.fu.cross(&self.fvv);
        let zu = (nu - z * z.dot(&nu)) / nn;
        let zv = (nv - z * z.dot(&nv)) / nn;
        let lu = self.fu.norm();
        let x = self.fu / lu;
        let xu = (self.fuu - x * x.dot(&self.fuu)) / lu;
        let xv = (self.fuv - x * x.dot(&self.fuv)) / lu;
        let y = z.cross(&x);
        let m = Matrix2::new(x.dot(&self.fu), x.dot(&self.fv), y.dot(&self.fu), y.dot(&self.fv));
        let m_inv = m.try_inverse().unwrap_or_else(Matrix2::zeros);
        let k = Matrix2::new(x.dot(&zu), x.dot(&zv), y.dot(&zu), y.dot(&zv)) * m_inv;
        let t = RowVector2::new(y.dot(&xu), y.dot(&xv)) * m_inv;
        SurfaceGeometry { m, k, t }
    }
}

impl ParametricSurface {
    /// Embedding `f(u, v)` in body coordinates.
    pub fn point(&self, u: f64, v: f64) -> Vector3<f64> {
        self.raw_derivatives(u, v).f
    }

    /// Chart derivatives, failing near chart singularities or outside the domain.
    pub fn derivatives(&self, u: f64, v: f64) -> Result<ChartDerivatives> {
        let singular = Err(Error::ChartSingularity { u, v });
        match *self {
            ParametricSurface::Sphere { .. } | ParametricSurface::Ellipsoid { .. } => {
                if u.abs() > FRAC_PI_2 - 1e-6 {
                    return singular;
                }
            }
            ParametricSurface::Hemisphere { .. } => {
                if !(-1e-12..=FRAC_PI_2 - 1e-6).contains(&u) {
                    return singular;
                }
            }
            ParametricSurface::Torus { major, minor } => {
                if major + minor * v.cos() < 1e-9 {
                    return singular;
                }
            }
            ParametricSurface::Cylinder { .. } | ParametricSurface::Plane => {}
        }
        let d = self.raw_derivatives(u, v);
        if !(d.fu.cross(&d.fv).norm() > 1e-12) {
            return singular;
        }
        Ok(d)
    }

    fn raw_derivatives(&self, u: f64, v: f64) -> ChartDerivatives {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let v3 = Vector3::new;
        match *self {
            ParametricSurface::Sphere { radius: r } | ParametricSurface::Hemisphere { radius: r } => ChartDerivatives {
                f: v3(cu * cv, -cu * sv, su) * r,
                fu: v3(-su * cv, su * sv, cu) * r,
                fv: v3(-cu * sv, -cu * cv, 0.0) * r,
                fuu: v3(-cu * cv, cu * sv, -su) * r,
                fuv: v3(su * sv, su * cv, 0.0) * r,
                fvv: v3(-cu * cv, cu * sv, 0.0) * r,
            },
            ParametricSurface::Ellipsoid { a, b, c } => ChartDerivatives {
                f: v3(a * su, b * cu * sv, c * cu * cv),
                fu: v3(a * cu, -b * su * sv, -c * su * cv),
                fv: v3(0.0, b * cu * cv, -c * cu * sv),
                fuu: v3(-a * su, -b * cu * sv, -c * cu * cv),
                fuv: v3(0.0, -b * su * cv, c * su * sv),
                fvv: v3(0.0, -b * cu * sv, -c * cu * cv),
            },
            ParametricSurface::Cylinder { radius: r } => ChartDerivatives {
                f: v3(r * cu, r * su, v),
                fu: v3(-r * su, r * cu, 0.0),
                fv: v3(0.0, 0.0, 1.0),
                fuu: v3(-r * cu, -r * su, 0.0),
                fuv: Vector3::zeros(),
                fvv: Vector3::zeros(),
            },
            ParametricSurface::Torus { major, minor: r } => {
                let rho = major + r * cv;
                ChartDerivatives {
                    f: v3(rho * cu, rho * su, r * sv),
                    fu: v3(-rho * su, rho * cu, 0.0),
                    fv: v3(-r * sv * cu, -r * sv * su, r * cv),
                    fuu: v3(-rho * cu, -rho * su, 0.0),
                    fuv: v3(r * sv * su, -r * sv * cu, 0.0),
                    fvv: v3(-r * cv * cu, -r * cv * su, -r * sv),
                }
            }
            ParametricSurface::Plane => ChartDerivatives {
                f: v3(u, v, 0.0),
                fu: Vector3::x(),
                fv: Vector3::y(),
                fuu: Vector3::zeros(),
                fuv: Vector3::zeros(),
                fvv: Vector3::zeros(),
            },
        }
    }

    /// Outward unit normal at `(u, v)`.
    pub fn normal(&self, u: f64, v: f64) -> Result<Vector3<f64>> {
        Ok(self.derivatives(u, v)?.normal())
    }

    /// Chart coordinates of the surface point nearest (radially) to `p`.
    pub fn locate(&self, p: &Vector3<f64>) -> (f64, f64) {
        match *self {
            ParametricSurface::Sphere { .. } | ParametricSurface::Hemisphere { .. } => {
                let q = p.normalize();
                (q.z.clamp(-1.0, 1.0).asin(), (-q.y).atan2(q.x))
            }
            ParametricSurface::Ellipsoid { a, b, c } => {
                let q = Vector3::new(p.x / a, p.y / b, p.z / c).normalize();
                (q.x.clamp(-1.0, 1.0).asin(), q.y.atan2(q.z))
            }
            ParametricSurface::Cylinder { .. } => (p.y.atan2(p.x), p.z),
            ParametricSurface::Torus { major, .. } => {
                let rho = p.xy().norm();
                (p.y.atan2(p.x), p.z.atan2(rho - major))
            }
            ParametricSurface::Plane => (p.x, p.y),
        }
    }
}

/// Closed-form chart geometry at `(u, v)`.
pub fn primitive_geometry(surface: &ParametricSurface, u: f64, v: f64) -> Result<SurfaceGeometry> {
    Ok(surface.derivatives(u, v)?.geometry())
}
