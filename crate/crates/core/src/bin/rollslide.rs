use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;

use rollslide::experiment::{run, Method, Resolution, RunConfig, Scenario, Summary};
use rollslide::mesh::{
    make_box, make_capsule, make_cylinder, make_ellipsoid, make_icosphere, make_ring, save_obj, RingSide,
};
use rollslide::Error;

#[derive(Parser)]
#[command(name = "rollslide", version, about = "Roll-slide contact simulation on triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Shape {
    Sphere,
    RingInside,
    RingOutside,
    Cylinder,
    Capsule,
    Ellipsoid,
    Box,
}

#[derive(Subcommand)]
enum Command {
    /// Write a procedural mesh as OBJ.
    GenMesh {
        shape: Shape,
        #[arg(long, value_enum, default_value = "fine")]
        resolution: Resolution,
        /// Ring tube diameter, mm.
        #[arg(long, default_value_t = 6.0)]
        tube_diameter: f64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run one scenario and write metrics, trajectory and summary files.
    Run {
        /// TOML run config; command-line flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        scenario: Option<Scenario>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long, value_enum)]
        resolution: Option<Resolution>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tube_diameter: Option<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run (or load) several scenarios and print their summaries side by side.
    Compare {
        /// `scenario:method:resolution` to run, or a directory holding a
        /// previous run's summary.json.
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<String>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Where new runs are written, one subdirectory each.
        #[arg(long, default_value = "compare-out")]
        out_dir: PathBuf,
    },
}

/// 2 for bad input, 3 for anything that went wrong while integrating.
fn exit_status(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::InvalidResolution(_) => 2,
        _ => 3,
    }
}

fn gen_mesh(shape: Shape, res: Resolution, tube: f64, out: &Path) -> Result<(), Error> {
    let mesh = match shape {
        Shape::Sphere => make_icosphere(10.0, res.sphere_subdivisions())?,
        Shape::RingInside | Shape::RingOutside => {
            let side = if matches!(shape, Shape::RingInside) { RingSide::Inside } else { RingSide::Outside };
            let (a, b) = res.ring_segments();
            make_ring(20.0, tube, side, a, b)?
        }
        Shape::Cylinder => {
            let (a, b) = res.cylinder_segments();
            make_cylinder(20.0, 80.0, a, b)?
        }
        Shape::Capsule => {
            let (a, b) = res.capsule_segments();
            make_capsule(30.0, 14.0, a, b)?
        }
        Shape::Ellipsoid => make_ellipsoid(Vector3::new(15.0, 10.0, 10.0), res.sphere_subdivisions())?,
        Shape::Box => {
            let cells = match res {
                Resolution::Fine => 32,
                Resolution::Medium => 16,
                Resolution::Coarse => 8,
            };
            make_box(Vector3::new(40.0, 40.0, 10.0), cells)?
        }
    };
    save_obj(&mesh, out).map_err(|e| Error::Config(format!("{}: {e}", out.display())))?;
    println!("wrote {} ({} vertices, {} faces)", out.display(), mesh.num_vertices(), mesh.num_faces());
    Ok(())
}

fn parse_run_id(entry: &str) -> Result<(Scenario, Method, Resolution), Error> {
    let parts: Vec<&str> = entry.split(':').collect();
    let bad = || Error::Config(format!("run `{entry}` is not scenario:method:resolution"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok((
        Scenario::from_str(parts[0], true).map_err(|_| bad())?,
        Method::from_str(parts[1], true).map_err(|_| bad())?,
        Resolution::from_str(parts[2], true).map_err(|_| bad())?,
    ))
}

fn load_summary(dir: &Path) -> Result<Summary, Error> {
    let text = std::fs::read_to_string(dir.join("summary.json"))
        .map_err(|e| Error::Config(format!("{}: {e}", dir.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", dir.display())))
}

fn compare(entries: &[String], base: &RunConfig, out_dir: &Path) -> Result<(), Error> {
    enum Job {
        Load(PathBuf),
        Run(RunConfig, PathBuf),
    }
    let mut jobs = Vec::new();
    for entry in entries {
        let path = Path::new(entry);
        if path.is_dir() {
            jobs.push(Job::Load(path.to_path_buf()));
        } else {
            let (scenario, method, resolution) = parse_run_id(entry)?;
            let cfg = RunConfig { scenario, method, resolution, ..base.clone() };
            cfg.validate()?;
            jobs.push(Job::Run(cfg, out_dir.join(entry.replace(':', "_"))));
        }
    }
    let results: Vec<Result<Summary, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| {
                s.spawn(move || match job {
                    Job::Load(dir) => load_summary(dir),
                    Job::Run(cfg, dir) => run(cfg, dir).map(|(out, _)| out.summary()),
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
    });

    println!(
        "{:<44} {:>8} {:>14} {:>12} {:>12} {:>12} {:>12}",
        "run", "contact", "total_geo", "max|sep|", "mean_align", "|slip|max", "sliding_max"
    );
    let mut first_err = None;
    for (entry, r) in entries.iter().zip(results) {
        match r {
            Ok(summary) => {
                for c in &summary.contacts {
                    println!(
                        "{:<44} {:>8} {:>14.6} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
                        entry,
                        c.name,
                        c.final_total_geodesic,
                        c.max_abs_separation,
                        c.mean_alignment_error,
                        c.max_abs_slippage,
                        c.max_sliding
                    );
                }
            }
            Err(e) => {
                println!("{entry:<44} failed: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenMesh { shape, resolution, tube_diameter, out } => gen_mesh(shape, resolution, tube_diameter, &out),
        Command::Run { config, scenario, method, resolution, dt, duration, seed, tube_diameter, out_dir } => (|| {
            let mut cfg = match config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::default(),
            };
            cfg.scenario = scenario.unwrap_or(cfg.scenario);
            cfg.method = method.unwrap_or(cfg.method);
            cfg.resolution = resolution.unwrap_or(cfg.resolution);
            cfg.dt = dt.unwrap_or(cfg.dt);
            cfg.duration = duration.unwrap_or(cfg.duration);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.tube_diameter = tube_diameter.unwrap_or(cfg.tube_diameter);
            cfg.validate()?;
            let (out, paths) = run(&cfg, &out_dir)?;
            for p in paths {
                println!("wrote {}", p.display());
            }
            for c in out.summary().contacts {
                println!(
                    "{}: total geodesic {:.6} mm, max |separation| {:.3e} mm, mean alignment error {:.3e} deg",
                    c.name, c.final_total_geodesic, c.max_abs_separation, c.mean_alignment_error
                );
            }
            Ok(())
        })(
        ),
        Command::Compare { runs, dt, duration, seed, out_dir } => {
            let mut base = RunConfig::default();
            base.dt = dt.unwrap_or(base.dt);
            base.duration = duration.unwrap_or(base.duration);
            base.seed = seed.unwrap_or(base.seed);
            compare(&runs, &base, &out_dir)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_status(&e))
        }
    }
}
