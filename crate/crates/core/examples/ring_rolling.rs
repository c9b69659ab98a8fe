//! A sphere rolling once around a ring, integrated by geodesic tracing.
//!
//! cargo run --release --example ring_rolling -- [fine|medium|coarse]

use std::f64::consts::PI;

use rollslide::experiment::{simulate, Method, Resolution, RunConfig, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let resolution = match std::env::args().nth(1).as_deref() {
        Some("fine") => Resolution::Fine,
        Some("coarse") => Resolution::Coarse,
        _ => Resolution::Medium,
    };
    for scenario in [Scenario::SphereRingInside, Scenario::SphereRingOutside] {
        let cfg = RunConfig { scenario, method: Method::Geodesic, resolution, ..RunConfig::default() };
        let out = simulate(&cfg)?;
        let s = &out.summary().contacts[0];
        println!(
            "{scenario:?} {resolution:?}: total {:.4} mm (20pi = {:.4}), max |sep| {:.2e} mm, final slippage {:.2e} mm",
            s.final_total_geodesic,
            20.0 * PI,
            s.max_abs_separation,
            s.final_slippage
        );
    }
    Ok(())
}
