//! Discrete shape-operator estimates against analytic principal curvatures.

use nalgebra::Vector3;
use rollslide::kinematics::{default_curvature_step, estimate_curvature, ContactFrame};
use rollslide::mesh::{closest_point, make_cylinder, make_icosphere, make_torus, ManifoldMesh};
use rollslide::se3::Pose;

fn report(name: &str, mesh: &ManifoldMesh, query: Vector3<f64>, hint: Vector3<f64>, expected: (f64, f64)) {
    let (p, _) = closest_point(mesh, &Pose::identity(), &query);
    let frame = ContactFrame::on_mesh(mesh, p, &hint).unwrap();
    let k = estimate_curvature(mesh, &frame, default_curvature_step(mesh)).unwrap();
    let e = k.symmetric_eigenvalues();
    let (lo, hi) = (e.min(), e.max());
    println!("{name:<22} estimated ({lo:+.4}, {hi:+.4})  analytic ({:+.4}, {:+.4})", expected.0, expected.1);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for level in [3, 4, 5] {
        let sphere = make_icosphere(10.0, level)?;
        report(&format!("sphere r=5 level {level}"), &sphere, Vector3::new(1.0, 2.0, 3.0), Vector3::x(), (0.2, 0.2));
    }
    let cylinder = make_cylinder(20.0, 80.0, 128, 64)?;
    report("cylinder r=10", &cylinder, Vector3::new(10.0, 0.0, 3.0), Vector3::z(), (0.0, 0.1));
    // Outer equator of a torus: 1/r around the tube, 1/(R + r) around the axis.
    let torus = make_torus(13.0, 3.0, 128, 64)?;
    report("torus outer equator", &torus, Vector3::new(16.0, 0.0, 0.0), Vector3::y(), (1.0 / 16.0, 1.0 / 3.0));
    Ok(())
}
