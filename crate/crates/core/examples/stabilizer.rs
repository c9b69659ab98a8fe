//! Contact stabilizer pulling a lifted, tipped sphere back onto a plane.

use nalgebra::Vector3;
use rollslide::integrators::{geodesic_step, ContactState, MeshPair, StabilizerGains, StepMode};
use rollslide::kinematics::ContactFrame;
use rollslide::mesh::{make_box, make_icosphere, ray_cast};
use rollslide::se3::{exp_so3, Pose, Twist};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sphere = make_icosphere(10.0, 4)?;
    let plane = make_box(Vector3::new(60.0, 60.0, 10.0), 24)?;
    let id = Pose::identity();
    let top = ray_cast(&plane, &id, &Vector3::new(0.0, 0.0, 20.0), &-Vector3::z()).unwrap().0;
    let bottom = ray_cast(&sphere, &id, &Vector3::new(0.0, 0.0, -20.0), &Vector3::z()).unwrap().0;
    let mut s = ContactState::mated(
        id,
        ContactFrame::on_mesh(&plane, top, &Vector3::x())?,
        ContactFrame::on_mesh(&sphere, bottom, &Vector3::x())?,
        0.0,
    );
    let c1 = s.world_contact1();
    let tilt = Pose::from_rotation(exp_so3(&Vector3::new(5f64.to_radians(), 0.0, 0.0)));
    s.pose1 = Pose::from_translation(Vector3::new(0.0, 0.0, 0.5)) * c1 * tilt * c1.inverse() * s.pose1;

    let meshes = MeshPair { mesh0: &plane, mesh1: &sphere };
    let mode = StepMode::Stabilize(StabilizerGains::default());
    for step in 0..=200 {
        if step % 25 == 0 {
            println!(
                "step {step:>3}: gap {:.3e} mm, misalignment {:.3e} deg",
                s.origin_gap(),
                s.misalignment().to_degrees()
            );
        }
        s = geodesic_step(meshes, &s, &Twist::zero(), 0.01, mode)?;
    }
    Ok(())
}
