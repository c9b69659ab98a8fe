//! The three integrators side by side on the inside ring.
//!
//! cargo run --release --example baselines -- [fine|medium|coarse]

use std::f64::consts::PI;

use rollslide::experiment::{simulate, Method, Resolution, RunConfig, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let resolution = match std::env::args().nth(1).as_deref() {
        Some("fine") => Resolution::Fine,
        Some("medium") => Resolution::Medium,
        _ => Resolution::Coarse,
    };
    println!("{:<10} {:>12} {:>12} {:>14}", "method", "total (mm)", "|err| (mm)", "max |sep| (mm)");
    for method in [Method::Geodesic, Method::Collision, Method::Primitive] {
        let cfg = RunConfig { scenario: Scenario::SphereRingInside, method, resolution, ..RunConfig::default() };
        let s = simulate(&cfg)?.summary().contacts.remove(0);
        println!(
            "{:<10} {:>12.4} {:>12.4} {:>14.3e}",
            format!("{method:?}"),
            s.final_total_geodesic,
            (s.final_total_geodesic - 20.0 * PI).abs(),
            s.max_abs_separation
        );
    }
    Ok(())
}
