//! Four fingers on a cylinder: the initial grasp and one planner step for
//! an object rolling about its long axis.

use nalgebra::{SMatrix, Vector3};
use rollslide::grasp::{initial_grasp, plan_step, GraspObject, HandConfig, HandModel, PlannerWeights, HAND_DOF};
use rollslide::se3::{Pose, Twist};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hand = HandModel::new(HandConfig::default(), (32, 8))?;
    let object = GraspObject::Cylinder { diameter: 20.0, length: 80.0 };
    let mesh = object.mesh((64, 32), 0)?;
    let (state, contacts) = initial_grasp(&hand, &object, &mesh, &Pose::identity())?;
    for (f, c) in hand.config.fingers.iter().zip(&contacts) {
        println!("{:<7} gap {:.2e} mm, alignment {:.3} deg", f.name, c.origin_gap(), c.alignment_deg());
    }

    let twist = Twist::new(Vector3::new(0.1, 0.0, 0.0), Vector3::zeros());
    let r =
        plan_step(&hand, &state, &twist, &contacts, &PlannerWeights::default(), &SMatrix::<f64, HAND_DOF, 1>::zeros())?;
    println!("palm twist   {:?}", r.u_dot.fixed_rows::<6>(0).as_slice());
    for (k, f) in hand.config.fingers.iter().enumerate() {
        println!("{:<7} joint rates {:?}", f.name, r.u_dot.fixed_rows::<3>(6 + 3 * k).as_slice());
    }
    for (f, v) in hand.config.fingers.iter().zip(&r.contact_twists) {
        println!(
            "{:<7} roll ({:+.4}, {:+.4}) spin {:+.2e} slide {:.2e} normal {:+.1e}",
            f.name,
            v.angular.x,
            v.angular.y,
            v.angular.z,
            v.linear.xy().norm(),
            v.linear.z
        );
    }
    println!("kkt residual {:.1e}, objective {:.3e}", r.kkt_residual, r.objective);
    Ok(())
}
