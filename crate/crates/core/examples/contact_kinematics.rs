//! Contact velocities of a sphere rolling and sliding on a plane, from the
//! curvature-based solve and from analytic primitives.

use nalgebra::{Matrix2, Matrix3, Vector3};
use rollslide::kinematics::{
    ideal_contact_pose, primitive_geometry, solve_contact_rates, solve_contact_velocities, ParametricSurface,
};
use rollslide::se3::Twist;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 5.0;
    let k_plane = Matrix2::zeros();
    let k_sphere = Matrix2::identity() / r;
    let rel: Matrix3<f64> = ideal_contact_pose(0.0).rotation;
    let cases = [
        ("roll about x", Twist::new(Vector3::new(1.0, 0.0, 0.0), Vector3::zeros())),
        ("roll about y", Twist::new(Vector3::new(0.0, 1.0, 0.0), Vector3::zeros())),
        ("slide along x", Twist::new(Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0))),
        ("spin about z", Twist::new(Vector3::new(0.0, 0.0, 1.0), Vector3::zeros())),
    ];
    println!("plane (body 0) / sphere r={r} (body 1), spin 0");
    for (name, v) in &cases {
        let (g0, g1) = solve_contact_velocities(v, &k_plane, &k_sphere, &rel)?;
        println!("{name:<14} plane {:>+8.4} {:>+8.4}   sphere {:>+8.4} {:>+8.4}", g0.x, g0.y, g1.x, g1.y);
    }

    let plane = primitive_geometry(&ParametricSurface::Plane, 0.0, 0.0)?;
    let sphere = primitive_geometry(&ParametricSurface::Sphere { radius: r }, 0.3, 0.0)?;
    let rates = solve_contact_rates(&cases[0].1, &plane, &sphere, 0.0)?;
    println!(
        "chart rates for '{}': plane {:?}, sphere {:?}, spin rate {:+.4}",
        cases[0].0,
        rates.g_dot0.as_slice(),
        rates.g_dot1.as_slice(),
        rates.spin_rate
    );
    Ok(())
}
