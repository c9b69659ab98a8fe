//! Full in-hand rolling run: the object turns about its axis for half the
//! run, then reverses, while the hand keeps all four contacts.
//!
//! cargo run --release --example grasp_run -- [cylinder|ellipsoid] [out_dir]

use rollslide::experiment::{run, Resolution, RunConfig, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let scenario = match args.next().as_deref() {
        Some("ellipsoid") => Scenario::GraspEllipsoid,
        _ => Scenario::GraspCylinder,
    };
    let out_dir = args.next().map(std::path::PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("grasp_run"));
    let cfg = RunConfig { scenario, resolution: Resolution::Medium, ..RunConfig::default() };
    let (out, paths) = run(&cfg, &out_dir)?;
    for c in out.summary().contacts {
        println!(
            "{:<7} total {:.3} mm, max |sep| {:.2e} mm, max sliding {:.2e} mm/s",
            c.name, c.final_total_geodesic, c.max_abs_separation, c.max_sliding
        );
    }
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}
