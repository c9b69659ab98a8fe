use nalgebra::{DMatrix, DVector, SMatrix, Vector6};
use serde::{Deserialize, Serialize};

use super::hand::{HandModel, HandState, HAND_DOF};
use crate::error::{Error, Result};
use crate::integrators::ContactState;
use crate::se3::{adjoint, Twist};

/// Regularization weights of the grasp planner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerWeights {
    /// Penalty on palm body-twist magnitude.
    pub w_palm: f64,
    /// Penalty on the change of hand velocity since the previous step.
    pub w_smooth: f64,
}

impl Default for PlannerWeights {
    fn default() -> Self {
        Self { w_palm: 10.0, w_smooth: 1.0 }
    }
}

impl PlannerWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_palm >= 0.0 && self.w_smooth >= 0.0) || !self.w_palm.is_finite() || !self.w_smooth.is_finite() {
            return Err(Error::Config("planner weights must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// Stacked contact Jacobians: relative twists `V_L0L1` of every contact are
/// `J_H u̇_H + J_O u̇_O`, with `u̇_H` the palm body twist and joint rates and
/// `u̇_O` the object body twist. Contact `i` belongs to finger `i`; body 0 of
/// each contact is the object and body 1 the distal link.
pub fn contact_jacobians(
    hand: &HandModel,
    state: &HandState,
    contacts: &[ContactState],
) -> (DMatrix<f64>, DMatrix<f64>) {
    let c = contacts.len();
    let mut jh = DMatrix::zeros(6 * c, HAND_DOF);
    let mut jo = DMatrix::zeros(6 * c, 6);
    for (i, contact) in contacts.iter().enumerate() {
        let distal = hand.finger_poses(&state.palm, &state.joints, i).distal;
        let t_l1b1 = contact.frame1.pose().inverse();
        let t_l1b0 = t_l1b1 * distal.inverse() * contact.pose0;
        let link = hand.distal_jacobian(state, i);
        jh.view_mut((6 * i, 0), (6, HAND_DOF)).copy_from(&(adjoint(&t_l1b1) * link));
        jo.view_mut((6 * i, 0), (6, 6)).copy_from(&(-adjoint(&t_l1b0)));
    }
    (jh, jo)
}

/// Minimizes `½ xᵀ H x − gᵀ x` subject to `C x = d` through the KKT system.
/// Dependent constraint rows fall back to the least-squares, minimum-norm
/// solution. Returns the minimizer, the rank-deficiency flag and the KKT
/// residual (max-norm).
fn solve_kkt(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    cm: &DMatrix<f64>,
    d: &DVector<f64>,
) -> Result<(DVector<f64>, bool, f64)> {
    let (n, c) = (h.nrows(), cm.nrows());
    let dim = n + c;
    let mut kkt = DMatrix::zeros(dim, dim);
    kkt.view_mut((0, 0), (n, n)).copy_from(h);
    kkt.view_mut((0, n), (n, c)).copy_from(&cm.transpose());
    kkt.view_mut((n, 0), (c, n)).copy_from(cm);
    let mut rhs = DVector::zeros(dim);
    rhs.rows_mut(0, n).copy_from(g);
    rhs.rows_mut(n, c).copy_from(d);

    let sv = cm.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let deficient = c > n || sv.iter().any(|&s| s <= 1e-10 * smax.max(1.0));
    let lu = if deficient { None } else { kkt.clone().lu().solve(&rhs) };
    let (sol, deficient) = match lu {
        Some(s) => (s, false),
        None => {
            let pinv = kkt.clone().pseudo_inverse(1e-12).map_err(|e| Error::Config(e.to_string()))?;
            (pinv * &rhs, true)
        }
    };
    let residual = (&kkt * &sol - &rhs).amax();
    Ok((sol.rows(0, n).into_owned(), deficient, residual))
}

/// Planner output for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub u_dot: SMatrix<f64, HAND_DOF, 1>,
    /// Relative twist of each contact produced by `u_dot`.
    pub contact_twists: Vec<Twist>,
    /// The `v_z` rows were linearly dependent; the KKT system was solved in
    /// the least-squares sense with minimum-norm multipliers.
    pub rank_deficient: bool,
    /// Max-norm of the stationarity and feasibility residuals.
    pub kkt_residual: f64,
    pub objective: f64,
}

/// Rolling-preferring hand velocity: minimizes `ω_z² + v_x² + v_y²` over all
/// contacts plus the regularizers, subject to `v_z = 0` at every contact.
pub fn plan_step(
    hand: &HandModel,
    state: &HandState,
    object_twist: &Twist,
    contacts: &[ContactState],
    weights: &PlannerWeights,
    u_dot_prev: &SMatrix<f64, HAND_DOF, 1>,
) -> Result<PlanResult> {
    let targets = vec![Twist::zero(); contacts.len()];
    plan_step_toward(hand, state, object_twist, contacts, &targets, weights, u_dot_prev)
}

/// As [`plan_step`], but each contact's `(ω_z, v_x, v_y)` is pulled toward
/// and its `v_z` pinned to the matching components of `targets[i]`
/// (typically a stabilizer correction).
pub fn plan_step_toward(
    hand: &HandModel,
    state: &HandState,
    object_twist: &Twist,
    contacts: &[ContactState],
    targets: &[Twist],
    weights: &PlannerWeights,
    u_dot_prev: &SMatrix<f64, HAND_DOF, 1>,
) -> Result<PlanResult> {
    if contacts.is_empty() {
        return Err(Error::Config("planner needs at least one contact".into()));
    }
    if targets.len() != contacts.len() {
        return Err(Error::Config("one target twist per contact is required".into()));
    }
    weights.validate()?;
    let c = contacts.len();
    let (jh, jo) = contact_jacobians(hand, state, contacts);
    let drift = &jo * DVector::from_column_slice(object_twist.to_vector().as_slice());

    // Objective rows (ω_z, v_x, v_y) and constraint rows (v_z) of each contact.
    let n = HAND_DOF;
    let mut a = DMatrix::zeros(3 * c, n);
    let mut b = DVector::zeros(3 * c);
    let mut cm = DMatrix::zeros(c, n);
    let mut d = DVector::zeros(c);
    for i in 0..c {
        let t = targets[i].to_vector();
        for (k, row) in [2usize, 3, 4].iter().enumerate() {
            a.row_mut(3 * i + k).copy_from(&jh.row(6 * i + row));
            b[3 * i + k] = t[*row] - drift[6 * i + row];
        }
        cm.row_mut(i).copy_from(&jh.row(6 * i + 5));
        d[i] = t[5] - drift[6 * i + 5];
    }

    // ½ xᵀ H x − gᵀ x
    let mut h = a.transpose() * &a;
    let prev = DVector::from_column_slice(u_dot_prev.as_slice());
    let g = a.transpose() * &b + &prev * weights.w_smooth;
    for k in 0..n {
        h[(k, k)] += weights.w_smooth + if k < 6 { weights.w_palm } else { 0.0 };
    }

    let (x, rank_deficient, residual) = solve_kkt(&h, &g, &cm, &d)?;
    let r = &a * &x - &b;
    let palm = x.rows(0, 6).norm_squared();
    let objective = r.norm_squared() + weights.w_palm * palm + weights.w_smooth * (&x - &prev).norm_squared();

    let twists = &jh * &x + &drift;
    let contact_twists =
        (0..c).map(|i| Twist::from_vector(&Vector6::from_column_slice(twists.rows(6 * i, 6).as_slice()))).collect();
    Ok(PlanResult {
        u_dot: SMatrix::from_column_slice(x.as_slice()),
        contact_twists,
        rank_deficient,
        kkt_residual: residual,
        objective,
    })
}
