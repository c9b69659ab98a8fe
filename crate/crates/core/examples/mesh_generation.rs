//! Builds each procedural mesh, prints its size, and writes OBJ files.
//!
//! cargo run --example mesh_generation -- [out_dir]

use nalgebra::Vector3;
use rollslide::mesh::{
    make_box, make_capsule, make_cylinder, make_ellipsoid, make_icosphere, make_ring, save_obj, ManifoldMesh, RingSide,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out)?;
    let meshes: Vec<(&str, ManifoldMesh)> = vec![
        ("sphere", make_icosphere(10.0, 4)?),
        ("ring_inside", make_ring(20.0, 6.0, RingSide::Inside, 64, 32)?),
        ("ring_outside", make_ring(20.0, 6.0, RingSide::Outside, 64, 32)?),
        ("cylinder", make_cylinder(20.0, 80.0, 64, 32)?),
        ("capsule", make_capsule(30.0, 14.0, 32, 8)?),
        ("ellipsoid", make_ellipsoid(Vector3::new(15.0, 10.0, 10.0), 4)?),
        ("box", make_box(Vector3::new(40.0, 40.0, 10.0), 16)?),
    ];
    println!("{:<13} {:>8} {:>8} {:>5} {:>10}", "mesh", "vertices", "faces", "chi", "edge (mm)");
    for (name, mesh) in &meshes {
        println!(
            "{:<13} {:>8} {:>8} {:>5} {:>10.3}",
            name,
            mesh.num_vertices(),
            mesh.num_faces(),
            mesh.euler_characteristic(),
            mesh.mean_edge_length()
        );
        save_obj(mesh, out.join(format!("{name}.obj")))?;
    }
    println!("OBJ files in {}", out.display());
    Ok(())
}
