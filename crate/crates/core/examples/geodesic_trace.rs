//! Straightest geodesics: a great circle on an icosphere and a straight line
//! across a box face.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rollslide::geodesic::{trace_geodesic, transport_direction, TangentVector};
use rollslide::mesh::{make_box, make_icosphere, ray_cast};
use rollslide::se3::Pose;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id = Pose::identity();
    for level in [3, 4, 5] {
        let sphere = make_icosphere(10.0, level)?;
        let (start, _) = ray_cast(&sphere, &id, &Vector3::new(20.0, 0.0, 0.0), &-Vector3::x()).unwrap();
        for (name, length) in [("half", PI * 5.0), ("full", 2.0 * PI * 5.0)] {
            let tv = TangentVector::from_displacement(&sphere, start, &(Vector3::new(0.0, 0.6, 0.8) * length));
            let trace = trace_geodesic(&sphere, &tv)?;
            let end = sphere.position(&trace.end);
            let target = if name == "half" { -sphere.position(&start) } else { sphere.position(&start) };
            println!(
                "level {level} {name:>4} circle: miss {:.4} mm, {} edges crossed, {} vertex hits",
                (end - target).norm(),
                trace.crossed_edges.len(),
                trace.vertex_hits
            );
        }
    }

    let slab = make_box(Vector3::new(40.0, 40.0, 10.0), 8)?;
    let (p, _) = ray_cast(&slab, &id, &Vector3::new(-12.5, 0.0, 20.0), &-Vector3::z()).unwrap();
    let tv = TangentVector::from_displacement(&slab, p, &Vector3::new(17.0, 0.0, 0.0));
    let trace = trace_geodesic(&slab, &tv)?;
    println!(
        "box top: end {:?}, direction {:?}, {} vertex hits",
        slab.position(&trace.end).as_slice(),
        transport_direction(&slab, &trace)?.as_slice(),
        trace.vertex_hits
    );
    Ok(())
}
