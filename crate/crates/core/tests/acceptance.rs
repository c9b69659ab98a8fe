//! End-to-end acceptance checks.
//!
//! Prints one line per criterion and exits nonzero if any fails. Runs as a
//! plain binary (no libtest harness) so the lines always reach stdout.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SMatrix, Vector3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rollslide::experiment::{run, simulate, Method, Resolution, RunConfig, RunOutput, Scenario};
use rollslide::grasp::{
    contact_jacobians, initial_grasp, plan_step, GraspObject, HandConfig, HandModel, HandState, PlannerWeights,
    HAND_DOF,
};
use rollslide::integrators::{collision_step, geodesic_step, ContactState, MeshPair, StabilizerGains, StepMode};
use rollslide::kinematics::{default_curvature_step, estimate_curvature, ContactFrame};
use rollslide::mesh::{closest_point, make_box, make_icosphere, ray_cast};
use rollslide::se3::{adjoint, exp_map, exp_so3, log_map, Pose, Twist};

const TWENTY_PI: f64 = 20.0 * PI;

// 1
const GROUND_TRUTH_REL: f64 = 0.02;
const RUN_BUDGET: Duration = Duration::from_secs(60);
// 2
const COARSE_REL: f64 = 0.10;
// 3
const DRIFT_RATIO: f64 = 10.0;
// 4
const MAX_SEPARATION: f64 = 0.05;
const MAX_ALIGNMENT_ERR_DEG: f64 = 1.0;
const MAX_SLIPPAGE: f64 = 0.5;
// 5
const CURVATURE_REL: f64 = 0.05;
// 6
const ROUNDTRIP_TOL: f64 = 1e-9;
const ADJOINT_TOL: f64 = 1e-9;
const JACOBIAN_FD_TOL: f64 = 1e-5;
const KKT_TOL: f64 = 1e-9;
const PINV_TOL: f64 = 1e-8;
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
// 7
const STABILIZER_FRACTION: f64 = 0.01;
const STABILIZER_STEPS: usize = 200;
// 8
const MAX_STEADY_SLIDING: f64 = 1.0;
const MAX_GRASP_SEPARATION: f64 = 0.5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Key = (Scenario, Method, Resolution);
type Check = Box<dyn FnOnce(&mut Runs) -> Outcome>;

/// Runs each configuration once, timing it.
struct Runs {
    done: HashMap<Key, (RunOutput, Duration)>,
}

impl Runs {
    fn get(&mut self, scenario: Scenario, method: Method, resolution: Resolution) -> &(RunOutput, Duration) {
        self.done.entry((scenario, method, resolution)).or_insert_with(|| {
            let cfg = RunConfig { scenario, method, resolution, ..RunConfig::default() };
            let t = Instant::now();
            let out = simulate(&cfg).unwrap_or_else(|e| panic!("{scenario:?}/{method:?}/{resolution:?}: {e}"));
            (out, t.elapsed())
        })
    }

    fn total(&mut self, scenario: Scenario, method: Method, resolution: Resolution) -> f64 {
        self.get(scenario, method, resolution).0.metrics[0].last().unwrap().total_geodesic
    }

    fn max_separation(&mut self, scenario: Scenario, method: Method, resolution: Resolution) -> f64 {
        self.get(scenario, method, resolution).0.metrics[0].iter().map(|r| r.separation.abs()).fold(0.0, f64::max)
    }
}

const SIDES: [(Scenario, &str); 2] = [(Scenario::SphereRingInside, "inside"), (Scenario::SphereRingOutside, "outside")];

fn criterion_1(runs: &mut Runs) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for res in [Resolution::Fine, Resolution::Medium] {
        for (scenario, side) in SIDES {
            let total = runs.total(scenario, Method::Geodesic, res);
            let elapsed = runs.get(scenario, Method::Geodesic, res).1;
            let rel = (total - TWENTY_PI).abs() / TWENTY_PI;
            pass &= rel < GROUND_TRUTH_REL && elapsed < RUN_BUDGET;
            parts.push(format!("{res:?}/{side} {total:.4} mm ({:.3}%, {:.1} s)", 100.0 * rel, elapsed.as_secs_f64()));
        }
    }
    outcome(pass, parts.join("; "))
}

fn criterion_2(runs: &mut Runs) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (scenario, side) in SIDES {
        let geo = (runs.total(scenario, Method::Geodesic, Resolution::Coarse) - TWENTY_PI).abs();
        let col = (runs.total(scenario, Method::Collision, Resolution::Coarse) - TWENTY_PI).abs();
        pass &= col > geo && geo < COARSE_REL * TWENTY_PI;
        parts.push(format!("{side}: |collision - 20pi| {col:.3} vs |geodesic - 20pi| {geo:.3}"));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_3(runs: &mut Runs) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (scenario, side) in SIDES {
        let geo = runs.max_separation(scenario, Method::Geodesic, Resolution::Fine);
        let pri = runs.max_separation(scenario, Method::Primitive, Resolution::Fine);
        pass &= pri > DRIFT_RATIO * geo;
        parts.push(format!("{side}: primitive {pri:.3e} vs geodesic {geo:.3e} ({:.1}x)", pri / geo));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_4(runs: &mut Runs) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (scenario, side) in SIDES {
        let rows = &runs.get(scenario, Method::Geodesic, Resolution::Fine).0.metrics[0];
        let sep = rows.iter().map(|r| r.separation.abs()).fold(0.0, f64::max);
        let align = rows.iter().map(|r| r.alignment_error().abs()).fold(0.0, f64::max);
        let slip = rows.iter().map(|r| r.slippage.abs()).fold(0.0, f64::max);
        pass &= sep < MAX_SEPARATION && align < MAX_ALIGNMENT_ERR_DEG && slip < MAX_SLIPPAGE;
        parts.push(format!("{side}: max |sep| {sep:.2e} mm, max align err {align:.2e} deg, max |slip| {slip:.2e} mm"));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let queries: Vec<Vector3<f64>> = (0..40)
        .map(|_| Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .filter(|q: &Vector3<f64>| q.norm() > 0.1)
        .collect();
    let mut errors = Vec::new();
    let mut fine_worst = 0.0;
    for level in [3u32, 4, 5] {
        let mesh = make_icosphere(10.0, level).unwrap();
        let h = default_curvature_step(&mesh);
        let mut sum = 0.0;
        for q in &queries {
            let (p, _) = closest_point(&mesh, &Pose::identity(), &(q.normalize() * 5.0));
            let hint = q.cross(&Vector3::new(0.3, 0.5, 0.8));
            let frame = ContactFrame::on_mesh(&mesh, p, &hint).unwrap();
            let k = estimate_curvature(&mesh, &frame, h).unwrap();
            for e in k.symmetric_eigenvalues().iter() {
                let rel = (e - 0.2).abs() / 0.2;
                sum += rel;
                if level == 5 {
                    fine_worst = f64::max(fine_worst, rel);
                }
            }
        }
        errors.push(sum / (2 * queries.len()) as f64);
    }
    let monotone = errors[0] > errors[1] && errors[1] > errors[2];
    outcome(
        fine_worst < CURVATURE_REL && monotone,
        format!(
            "fine worst eigenvalue error {:.2}%; mean error coarse {:.3}% > medium {:.3}% > fine {:.3}%",
            100.0 * fine_worst,
            100.0 * errors[0],
            100.0 * errors[1],
            100.0 * errors[2]
        ),
    )
}

fn random_vec(rng: &mut ChaCha8Rng, s: f64) -> Vector3<f64> {
    Vector3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s))
}

fn random_pose(rng: &mut ChaCha8Rng) -> Pose {
    // Rotation angle at most 0.9·π keeps log on its principal branch.
    let w = random_vec(rng, 1.0);
    let w = w * (0.9 * PI * rng.gen_range(0.0..1.0) / w.norm());
    Pose::new(exp_so3(&w), random_vec(rng, 50.0))
}

fn pose_distance(a: &Pose, b: &Pose) -> f64 {
    (a.rotation - b.rotation).amax().max((a.translation - b.translation).amax())
}

/// The planner's KKT system rebuilt from the public Jacobians and solved
/// through an SVD pseudo-inverse.
fn pinv_plan(
    hand: &HandModel,
    state: &HandState,
    object: &Twist,
    contacts: &[ContactState],
    w: &PlannerWeights,
    prev: &SMatrix<f64, HAND_DOF, 1>,
) -> DVector<f64> {
    let (jh, jo) = contact_jacobians(hand, state, contacts);
    let drift = &jo * DVector::from_column_slice(object.to_vector().as_slice());
    let n = HAND_DOF;
    let c = contacts.len();
    let objective_rows: Vec<usize> = (0..c).flat_map(|i| [6 * i + 2, 6 * i + 3, 6 * i + 4]).collect();
    let constraint_rows: Vec<usize> = (0..c).map(|i| 6 * i + 5).collect();
    let a = jh.select_rows(objective_rows.iter());
    let b = -drift.select_rows(objective_rows.iter());
    let cm = jh.select_rows(constraint_rows.iter());
    let d = -drift.select_rows(constraint_rows.iter());
    let mut h = a.transpose() * &a + DMatrix::identity(n, n) * w.w_smooth;
    for k in 0..6 {
        h[(k, k)] += w.w_palm;
    }
    let g = a.transpose() * b + DVector::from_column_slice(prev.as_slice()) * w.w_smooth;
    let mut kkt = DMatrix::zeros(n + c, n + c);
    kkt.view_mut((0, 0), (n, n)).copy_from(&h);
    kkt.view_mut((0, n), (n, c)).copy_from(&cm.transpose());
    kkt.view_mut((n, 0), (c, n)).copy_from(&cm);
    let mut rhs = DVector::zeros(n + c);
    rhs.rows_mut(0, n).copy_from(&g);
    rhs.rows_mut(n, c).copy_from(&d);
    let sol = kkt.pseudo_inverse(1e-13).unwrap() * rhs;
    sol.rows(0, n).into_owned()
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    let mut roundtrip = 0.0f64;
    let mut adjoint_err = 0.0f64;
    for _ in 0..1000 {
        let t = random_pose(&mut rng);
        let xi = log_map(&t).unwrap();
        roundtrip = roundtrip.max(pose_distance(&exp_map(&xi, 1.0), &t));
        let back = log_map(&exp_map(&xi, 1.0)).unwrap();
        roundtrip = roundtrip.max((back.to_vector() - xi.to_vector()).amax());
        let u = random_pose(&mut rng);
        adjoint_err = adjoint_err.max((adjoint(&(t * u)) - adjoint(&t) * adjoint(&u)).amax());
        adjoint_err = adjoint_err.max((adjoint(&t.inverse()) * adjoint(&t) - nalgebra::Matrix6::identity()).amax());
    }

    let hand = HandModel::new(HandConfig::default(), (32, 8)).unwrap();
    let object = GraspObject::Cylinder { diameter: 20.0, length: 80.0 };
    let mesh = object.mesh((64, 32), 0).unwrap();
    let (state, contacts) = initial_grasp(&hand, &object, &mesh, &Pose::identity()).unwrap();

    // Jacobian columns against central differences of the relative contact pose.
    let (jh, jo) = contact_jacobians(&hand, &state, &contacts);
    let delta = 1e-6;
    let mut jac_err = 0.0f64;
    for (i, c) in contacts.iter().enumerate() {
        let relative = |s: &HandState, object: &Pose| {
            let distal = hand.finger_poses(&s.palm, &s.joints, i).distal;
            (*object * c.frame0.pose()).inverse() * distal * c.frame1.pose()
        };
        let base = relative(&state, &c.pose0);
        for col in 0..HAND_DOF + 6 {
            let eval = |s: f64| {
                if col < HAND_DOF {
                    let mut e = SMatrix::<f64, HAND_DOF, 1>::zeros();
                    e[col] = s;
                    relative(&state.advanced(&e, 1.0), &c.pose0)
                } else {
                    let mut e = Vector6::zeros();
                    e[col - HAND_DOF] = s;
                    relative(&state, &(c.pose0 * exp_map(&Twist::from_vector(&e), 1.0)))
                }
            };
            let fd = (log_map(&(base.inverse() * eval(delta))).unwrap().to_vector()
                - log_map(&(base.inverse() * eval(-delta))).unwrap().to_vector())
                / (2.0 * delta);
            let analytic: Vector6<f64> = if col < HAND_DOF {
                Vector6::from_iterator(jh.view((6 * i, col), (6, 1)).iter().copied())
            } else {
                Vector6::from_iterator(jo.view((6 * i, col - HAND_DOF), (6, 1)).iter().copied())
            };
            jac_err = jac_err.max((fd - analytic).amax());
        }
    }

    let mut kkt = 0.0f64;
    let mut pinv = 0.0f64;
    for _ in 0..20 {
        let twist = Twist::new(random_vec(&mut rng, 0.3), random_vec(&mut rng, 3.0));
        let prev = SMatrix::<f64, HAND_DOF, 1>::from_fn(|_, _| rng.gen_range(-0.2..0.2));
        let w = PlannerWeights::default();
        let count = rng.gen_range(1..=contacts.len());
        let subset = &contacts[..count];
        let r = plan_step(&hand, &state, &twist, subset, &w, &prev).unwrap();
        kkt = kkt.max(r.kkt_residual);
        for t in &r.contact_twists {
            kkt = kkt.max(t.linear.z.abs());
        }
        let oracle = pinv_plan(&hand, &state, &twist, subset, &w, &prev);
        pinv = pinv.max((DVector::from_column_slice(r.u_dot.as_slice()) - oracle).amax());
    }
    let elapsed = start.elapsed();
    let pass = roundtrip <= ROUNDTRIP_TOL
        && adjoint_err <= ADJOINT_TOL
        && jac_err <= JACOBIAN_FD_TOL
        && kkt <= KKT_TOL
        && pinv <= PINV_TOL
        && elapsed < ORACLE_BUDGET;
    outcome(
        pass,
        format!(
            "exp/log {roundtrip:.1e}, adjoint {adjoint_err:.1e}, jacobian fd {jac_err:.1e}, kkt {kkt:.1e}, pinv {pinv:.1e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Sphere on a box top, contact tipped 5° and lifted 0.5 mm.
fn perturbed_sphere_on_box(
    sphere: &rollslide::mesh::ManifoldMesh,
    plane: &rollslide::mesh::ManifoldMesh,
) -> ContactState {
    let id = Pose::identity();
    let top = ray_cast(plane, &id, &Vector3::new(0.3, -0.2, 20.0), &-Vector3::z()).unwrap().0;
    let frame0 = ContactFrame::on_mesh(plane, top, &Vector3::x()).unwrap();
    let bottom = ray_cast(sphere, &id, &Vector3::new(0.0, 0.0, -20.0), &Vector3::z()).unwrap().0;
    let frame1 = ContactFrame::on_mesh(sphere, bottom, &Vector3::x()).unwrap();
    let mut s = ContactState::mated(id, frame0, frame1, 0.0);
    let c1 = s.world_contact1();
    let tilt = Pose::from_rotation(exp_so3(&Vector3::new(5f64.to_radians(), 0.0, 0.0)));
    s.pose1 = Pose::from_translation(Vector3::new(0.0, 0.0, 0.5)) * c1 * tilt * c1.inverse() * s.pose1;
    s.shadow_rotation1 = s.pose1.rotation;
    s
}

fn criterion_7() -> Outcome {
    let sphere = make_icosphere(10.0, 4).unwrap();
    let plane = make_box(Vector3::new(60.0, 60.0, 10.0), 24).unwrap();
    let meshes = MeshPair { mesh0: &plane, mesh1: &sphere };
    let gains = StabilizerGains::default();
    let s0 = perturbed_sphere_on_box(&sphere, &plane);
    let (gap0, mis0) = (s0.origin_gap(), s0.misalignment());

    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["geodesic", "collision"] {
        let mut s = s0;
        let mut reached = None;
        for step in 1..=STABILIZER_STEPS {
            s = match name {
                "geodesic" => geodesic_step(meshes, &s, &Twist::zero(), 0.01, StepMode::Stabilize(gains)).unwrap(),
                _ => collision_step(meshes, &s, &Twist::zero(), 0.01, &gains).unwrap().0,
            };
            if reached.is_none()
                && s.origin_gap() < STABILIZER_FRACTION * gap0
                && s.misalignment() < STABILIZER_FRACTION * mis0
            {
                reached = Some(step);
            }
        }
        pass &= reached.is_some();
        parts.push(format!(
            "{name}: gap {:.1e}/{gap0:.2} mm, misalignment {:.1e}/{:.2} deg, below 1% at step {}",
            s.origin_gap(),
            s.misalignment().to_degrees(),
            mis0.to_degrees(),
            reached.map_or("never".to_string(), |k| k.to_string())
        ));
    }
    outcome(pass, format!("k = ({}, {}); {}", gains.k_omega, gains.k_v, parts.join("; ")))
}

fn criterion_8(runs: &mut Runs) -> Outcome {
    let out = &runs.get(Scenario::GraspCylinder, Method::Geodesic, Resolution::Fine).0;
    let half = 0.5 * out.config.duration;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, rows) in out.contact_names.iter().zip(&out.metrics) {
        // Steady state: after the first second and away from the reversal.
        let steady: Vec<f64> =
            rows.iter().filter(|r| (r.t >= 1.0 && r.t < half) || r.t >= half + 1.0).map(|r| r.sliding).collect();
        let steady_max = steady.iter().copied().fold(0.0, f64::max);
        let before: Vec<f64> = rows.iter().filter(|r| r.t >= 1.0 && r.t < half).map(|r| r.sliding).collect();
        let before_mean = before.iter().sum::<f64>() / before.len() as f64;
        let spike = rows.iter().filter(|r| r.t >= half && r.t < half + 0.2).map(|r| r.sliding).fold(0.0, f64::max);
        let sep = rows.iter().map(|r| r.separation.abs()).fold(0.0, f64::max);
        pass &= steady_max < MAX_STEADY_SLIDING && sep < MAX_GRASP_SEPARATION && spike > before_mean;
        parts.push(format!(
            "{name}: steady sliding <= {steady_max:.1e} mm/s, spike {spike:.1e} > mean {before_mean:.1e}, max |sep| {sep:.1e} mm"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let configs = [
        RunConfig {
            scenario: Scenario::SphereRingInside,
            method: Method::Collision,
            resolution: Resolution::Coarse,
            duration: 2.0,
            seed: 17,
            ..RunConfig::default()
        },
        RunConfig {
            scenario: Scenario::SphereRingOutside,
            method: Method::Geodesic,
            resolution: Resolution::Medium,
            duration: 2.0,
            seed: 3,
            ..RunConfig::default()
        },
        RunConfig {
            scenario: Scenario::GraspEllipsoid,
            resolution: Resolution::Coarse,
            duration: 1.0,
            seed: 5,
            ..RunConfig::default()
        },
    ];
    let mut pass = true;
    let mut files = 0;
    for cfg in &configs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let (_, pa) = run(cfg, a.path()).unwrap();
        let (_, pb) = run(cfg, b.path()).unwrap();
        pass &= pa.len() == pb.len();
        for (x, y) in pa.iter().zip(&pb) {
            pass &= x.file_name() == y.file_name() && std::fs::read(x).unwrap() == std::fs::read(y).unwrap();
            files += 1;
        }
    }
    outcome(pass, format!("{files} output files compared byte for byte across {} repeated runs", configs.len()))
}

fn main() {
    let mut runs = Runs { done: HashMap::new() };
    let checks: Vec<(&str, Check)> = vec![
        ("sphere-on-ring total distance", Box::new(criterion_1)),
        ("coarse resolution ordering", Box::new(criterion_2)),
        ("primitive baseline drift", Box::new(criterion_3)),
        ("ideal contact maintained", Box::new(criterion_4)),
        ("curvature estimate", Box::new(|_| criterion_5())),
        ("kinematics oracles", Box::new(|_| criterion_6())),
        ("stabilizer convergence", Box::new(|_| criterion_7())),
        ("grasp mostly rolls", Box::new(criterion_8)),
        ("determinism", Box::new(|_| criterion_9())),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.into_iter().enumerate() {
        let o = check(&mut runs);
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
