//! Projected-power objective and the single-update adjustment solver.
//!
//! From one in-situ wind sample the guidance law predicts the steady-state
//! power requirement one update interval ahead as a function of airspeed and
//! heading command increments, assuming the measured wind gradients stay
//! constant over the interval, and picks the increments minimizing it.
//!
//! The prediction chain is: trapezoidal position increment under the frozen
//! gradients → wind components propagated to the end of the interval → wind
//! rate resolved along the terminal airspeed axis → steady level power at the
//! adjusted airspeed. The solver differentiates this chain numerically,
//! takes regularized second-order steps, clamps them to the adjustment and
//! airspeed boxes, and never returns a step predicted to be worse than doing
//! nothing.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use thiserror::Error;

use crate::airframe::{AircraftParams, GuidanceConfig};
use crate::dynamics::State;
use crate::windfield::WindSample;

/// Below this magnitude the trapezoidal system denominator counts as
/// degenerate and the projection horizon must be shrunk.
pub const Q_LEVEL_EPSILON: f64 = 1e-9;

const LAMBDA_MAX: f64 = 1e6;
const MIN_EIG_THRESHOLD: f64 = 1e-8;
const MAX_REFINE_STEPS: usize = 40;

#[derive(Debug, Error, PartialEq)]
pub enum GuidanceError {
    #[error("airspeed must be positive, got {0}")]
    NonpositiveAirspeed(f64),
    #[error("projection horizon must be positive, got {0}")]
    NonpositiveHorizon(f64),
    #[error("degenerate projection horizon: |Q_level| = {q_level:e} below threshold")]
    DegenerateHorizon { q_level: f64 },
}

/// Zero-wind endurance airspeed: the stationary point of the level-flight
/// power model, `(K / (3 ρ̄² C_D0))^(1/4)`.
pub fn endurance_airspeed(params: &AircraftParams) -> f64 {
    (params.k_induced / (3.0 * params.rho_bar * params.rho_bar * params.cd0)).powf(0.25)
}

/// Endurance airspeed constrained to the flyable range. For polars whose
/// unconstrained optimum needs more lift than `cl_max` allows, this is the
/// stall-bounded minimum speed.
pub fn reference_airspeed(params: &AircraftParams) -> f64 {
    endurance_airspeed(params).clamp(params.v_bar_min, params.v_bar_max)
}

/// Steady level-flight power at airspeed `v_bar` under along-path wind rate
/// `w_v_rate`, with the lift coefficient at its level-trim value:
/// `P̄ = ρ̄V̄³C_D0 + K/(ρ̄V̄) + V̄·W̄_V'`.
pub fn steady_level_power(
    v_bar: f64,
    w_v_rate: f64,
    params: &AircraftParams,
) -> Result<f64, GuidanceError> {
    if !(v_bar > 0.0) {
        return Err(GuidanceError::NonpositiveAirspeed(v_bar));
    }
    Ok(params.rho_bar * v_bar.powi(3) * params.cd0
        + params.k_induced / (params.rho_bar * v_bar)
        + v_bar * w_v_rate)
}

/// State, wind measurement and projection horizon for one guidance update.
#[derive(Debug, Clone, Copy)]
pub struct ProjectedPowerInputs {
    pub state: State,
    pub wind: WindSample,
    /// Projection horizon Δt̄, normalized time.
    pub dt_bar: f64,
}

impl ProjectedPowerInputs {
    /// Validates the horizon, including the nonsingularity of the trapezoidal
    /// position system.
    pub fn new(state: State, wind: WindSample, dt_bar: f64) -> Result<Self, GuidanceError> {
        if !(dt_bar > 0.0) {
            return Err(GuidanceError::NonpositiveHorizon(dt_bar));
        }
        let inputs = Self {
            state,
            wind,
            dt_bar,
        };
        let q = inputs.q_level();
        if q.abs() < Q_LEVEL_EPSILON {
            return Err(GuidanceError::DegenerateHorizon { q_level: q });
        }
        Ok(inputs)
    }

    /// Determinant of the trapezoidal position system,
    /// `(2/Δt̄)² − (2/Δt̄)(∂W_x/∂x̄ + ∂W_y/∂ȳ) + (∂W_x/∂x̄·∂W_y/∂ȳ − ∂W_x/∂ȳ·∂W_y/∂x̄)`.
    pub fn q_level(&self) -> f64 {
        let r = 2.0 / self.dt_bar;
        let w = &self.wind;
        r * r - r * (w.dwx_dx + w.dwy_dy) + (w.dwx_dx * w.dwy_dy - w.dwx_dy * w.dwy_dx)
    }
}

/// Position change over the projection horizon for command increments
/// `(d_v, d_psi)`, from the trapezoidal rule applied to the level-flight
/// kinematics with wind components propagated under frozen gradients.
pub fn position_increment(
    inputs: &ProjectedPowerInputs,
    d_v: f64,
    d_psi: f64,
) -> Result<(f64, f64), GuidanceError> {
    let q = inputs.q_level();
    if q.abs() < Q_LEVEL_EPSILON {
        return Err(GuidanceError::DegenerateHorizon { q_level: q });
    }
    let w = &inputs.wind;
    let dt = inputs.dt_bar;
    let r = 2.0 / dt;
    let v0 = inputs.state.v_bar;
    let psi0 = inputs.state.psi;
    let v_c = v0 + d_v;
    let psi_c = psi0 + d_psi;
    let b1 = v0 * psi0.sin() + v_c * psi_c.sin() + 2.0 * w.w_x + w.dwx_dt * dt;
    let b2 = v0 * psi0.cos() + v_c * psi_c.cos() + 2.0 * w.w_y + w.dwy_dt * dt;
    let dx = ((r - w.dwy_dy) * b1 + w.dwx_dy * b2) / q;
    let dy = (w.dwy_dx * b1 + (r - w.dwx_dx) * b2) / q;
    Ok((dx, dy))
}

/// Along-path wind rate at the end of the projection horizon, evaluated at
/// the adjusted airspeed/heading with wind components propagated by the
/// constant-gradient model and gradients held at their measured values.
pub fn projected_wind_rate(
    inputs: &ProjectedPowerInputs,
    d_v: f64,
    d_psi: f64,
) -> Result<f64, GuidanceError> {
    let (dx, dy) = position_increment(inputs, d_v, d_psi)?;
    let w = &inputs.wind;
    let dt = inputs.dt_bar;
    let wx_end = w.w_x + w.dwx_dx * dx + w.dwx_dy * dy + w.dwx_dt * dt;
    let wy_end = w.w_y + w.dwy_dx * dx + w.dwy_dy * dy + w.dwy_dt * dt;
    let v = inputs.state.v_bar + d_v;
    let (sin_psi, cos_psi) = (inputs.state.psi + d_psi).sin_cos();
    Ok((w.dwx_dy + w.dwy_dx) * v * sin_psi * cos_psi
        + w.dwx_dx * v * sin_psi * sin_psi
        + w.dwy_dy * v * cos_psi * cos_psi
        + (wx_end * w.dwx_dx + wy_end * w.dwx_dy + w.dwx_dt) * sin_psi
        + (wx_end * w.dwy_dx + wy_end * w.dwy_dy + w.dwy_dt) * cos_psi)
}

/// The guidance objective: steady level power at the adjusted airspeed under
/// the projected wind rate.
///
/// The function is evaluated as the smooth formula for any positive adjusted
/// airspeed; the flyable box `[v_bar_min, v_bar_max]` is enforced by the
/// adjustment solver, which never returns a step leaving it.
pub fn projected_power(
    inputs: &ProjectedPowerInputs,
    d_v: f64,
    d_psi: f64,
    params: &AircraftParams,
) -> Result<f64, GuidanceError> {
    let rate = projected_wind_rate(inputs, d_v, d_psi)?;
    steady_level_power(inputs.state.v_bar + d_v, rate, params)
}

/// Solver output: the command increments plus diagnostics of the quadratic
/// model and the safeguards that fired.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjustment {
    pub d_v_bar: f64,
    pub d_psi: f64,
    /// Held at zero in level mode; carried for interface completeness.
    pub d_gamma: f64,
    /// Objective gradient at zero increments (γ entry unused).
    pub gradient: Vector3<f64>,
    /// Objective Hessian at zero increments (γ row/column unused).
    pub hessian: Matrix3<f64>,
    /// Levenberg regularization applied on the accepted step, 0 for a pure
    /// second-order step.
    pub lambda_used: f64,
    /// Per-component bound-hit flags (airspeed, heading, flight path).
    pub clamped: [bool; 3],
    /// Set when a non-finite objective forced the zero step.
    pub degenerate_objective: bool,
}

impl Adjustment {
    fn zero() -> Self {
        Self {
            d_v_bar: 0.0,
            d_psi: 0.0,
            d_gamma: 0.0,
            gradient: Vector3::zeros(),
            hessian: Matrix3::zeros(),
            lambda_used: 0.0,
            clamped: [false; 3],
            degenerate_objective: false,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    AirspeedHeading,
    AirspeedOnly,
}

/// Optimal level-flight adjustment of airspeed and heading commands.
pub fn optimal_adjustment(
    inputs: &ProjectedPowerInputs,
    config: &GuidanceConfig,
    params: &AircraftParams,
) -> Result<Adjustment, GuidanceError> {
    solve_adjustment(inputs, config, params, Mode::AirspeedHeading)
}

/// Airspeed-only variant: the heading increment is forced to zero and the
/// one-dimensional reduction is solved with the same safeguards.
pub fn optimal_airspeed_adjustment(
    inputs: &ProjectedPowerInputs,
    config: &GuidanceConfig,
    params: &AircraftParams,
) -> Result<Adjustment, GuidanceError> {
    solve_adjustment(inputs, config, params, Mode::AirspeedOnly)
}

struct Box2 {
    v_lo: f64,
    v_hi: f64,
    psi_lo: f64,
    psi_hi: f64,
}

impl Box2 {
    /// Intersection of the adjustment box with the flyable airspeed range.
    fn new(inputs: &ProjectedPowerInputs, config: &GuidanceConfig, params: &AircraftParams, mode: Mode) -> Self {
        let v0 = inputs.state.v_bar;
        let mut v_lo = (-config.dv_max).max(params.v_bar_min - v0);
        let mut v_hi = config.dv_max.min(params.v_bar_max - v0);
        if v_lo > v_hi {
            // Current airspeed so far outside the flyable range that no
            // admissible increment reaches it; pin the increment to zero.
            v_lo = 0.0;
            v_hi = 0.0;
        }
        let (psi_lo, psi_hi) = match mode {
            Mode::AirspeedHeading => (-config.dpsi_max, config.dpsi_max),
            Mode::AirspeedOnly => (0.0, 0.0),
        };
        Self {
            v_lo,
            v_hi,
            psi_lo,
            psi_hi,
        }
    }

    fn clamp(&self, d: Vector2<f64>) -> (Vector2<f64>, [bool; 2]) {
        let v = d.x.clamp(self.v_lo, self.v_hi);
        let psi = d.y.clamp(self.psi_lo, self.psi_hi);
        (Vector2::new(v, psi), [v != d.x, psi != d.y])
    }
}

/// Solves `(T2ᵀT2 + λI)·d = −T2ᵀ·T1`. `None` if the regularized normal
/// matrix is still numerically singular (only possible at λ = 0).
fn normal_equation_step(t1: &Vector2<f64>, t2: &Matrix2<f64>, lambda: f64) -> Option<Vector2<f64>> {
    let m = t2.transpose() * t2 + Matrix2::identity() * lambda;
    let rhs = -(t2.transpose() * t1);
    m.lu().solve(&rhs).map(|d| Vector2::new(d.x, d.y))
}

fn min_eigenvalue(t2: &Matrix2<f64>, mode: Mode) -> f64 {
    match mode {
        Mode::AirspeedOnly => t2[(0, 0)],
        Mode::AirspeedHeading => {
            let half_trace = 0.5 * (t2[(0, 0)] + t2[(1, 1)]);
            let half_gap = 0.5 * (t2[(0, 0)] - t2[(1, 1)]);
            // Symmetrized off-diagonal; FD cross terms are symmetric already.
            let off = 0.5 * (t2[(0, 1)] + t2[(1, 0)]);
            half_trace - (half_gap * half_gap + off * off).sqrt()
        }
    }
}

fn solve_adjustment(
    inputs: &ProjectedPowerInputs,
    config: &GuidanceConfig,
    params: &AircraftParams,
    mode: Mode,
) -> Result<Adjustment, GuidanceError> {
    // Surface the degenerate-horizon condition before any stencil work.
    let f0 = projected_power(inputs, 0.0, 0.0, params)?;

    let objective = |d: Vector2<f64>| -> Option<f64> {
        projected_power(inputs, d.x, d.y, params)
            .ok()
            .filter(|p| p.is_finite())
    };

    let mut out = Adjustment::zero();
    if !f0.is_finite() {
        out.degenerate_objective = true;
        return Ok(out);
    }

    let bounds = Box2::new(inputs, config, params, mode);
    let Some((t1, t2)) = fd_model(&objective, f0, config, mode) else {
        out.degenerate_objective = true;
        return Ok(out);
    };
    out.gradient[0] = t1.x;
    out.gradient[1] = t1.y;
    out.hessian[(0, 0)] = t2[(0, 0)];
    out.hessian[(0, 1)] = t2[(0, 1)];
    out.hessian[(1, 0)] = t2[(1, 0)];
    out.hessian[(1, 1)] = t2[(1, 1)];

    // Take safeguarded second-order steps, re-linearizing at each accepted
    // point, until the model stops improving the true objective. Every
    // candidate is clamped before evaluation, so the monotone-safety
    // guarantee survives refinement.
    let mut best = Vector2::zeros();
    let mut f_best = f0;
    let mut model = Some((t1, t2));
    for _ in 0..=MAX_REFINE_STEPS {
        let Some((t1_l, t2_l)) = model else { break };
        let local = |d: Vector2<f64>| objective(best + d);
        let local_bounds = Box2 {
            v_lo: bounds.v_lo - best.x,
            v_hi: bounds.v_hi - best.x,
            psi_lo: bounds.psi_lo - best.y,
            psi_hi: bounds.psi_hi - best.y,
        };
        let Some((step, f_cand, lambda)) =
            descend_once(&local, f_best, &t1_l, &t2_l, &local_bounds, config, mode)
        else {
            break;
        };
        best += step;
        f_best = f_cand;
        out.lambda_used = lambda;
        if step.norm() < 1e-12 {
            break;
        }
        model = fd_model(&|d: Vector2<f64>| objective(best + d), f_best, config, mode);
    }

    // Final acceptance: never predict worse than doing nothing.
    let (clamped_best, _) = bounds.clamp(best);
    match objective(clamped_best) {
        Some(f_final) if f_final <= f0 => {
            out.d_v_bar = clamped_best.x;
            out.d_psi = clamped_best.y;
            out.clamped = [
                at_bound(clamped_best.x, bounds.v_lo, bounds.v_hi),
                at_bound(clamped_best.y, bounds.psi_lo, bounds.psi_hi),
                false,
            ];
        }
        _ => {
            out.d_v_bar = 0.0;
            out.d_psi = 0.0;
            out.lambda_used = 0.0;
        }
    }
    Ok(out)
}

fn at_bound(value: f64, lo: f64, hi: f64) -> bool {
    lo != hi && (value == lo || value == hi)
}

/// Central-difference gradient and Hessian of `objective` around zero.
/// `None` if any stencil value is unavailable.
fn fd_model(
    objective: &impl Fn(Vector2<f64>) -> Option<f64>,
    f_center: f64,
    config: &GuidanceConfig,
    mode: Mode,
) -> Option<(Vector2<f64>, Matrix2<f64>)> {
    let hv = config.fd_step_v;
    let hp = config.fd_step_psi;
    let at = |dv: f64, dpsi: f64| objective(Vector2::new(dv, dpsi));

    let f_pv = at(hv, 0.0)?;
    let f_mv = at(-hv, 0.0)?;
    let g_v = (f_pv - f_mv) / (2.0 * hv);
    let h_vv = (f_pv - 2.0 * f_center + f_mv) / (hv * hv);

    if mode == Mode::AirspeedOnly {
        return Some((
            Vector2::new(g_v, 0.0),
            Matrix2::new(h_vv, 0.0, 0.0, 0.0),
        ));
    }

    let f_pp = at(0.0, hp)?;
    let f_mp = at(0.0, -hp)?;
    let g_p = (f_pp - f_mp) / (2.0 * hp);
    let h_pp = (f_pp - 2.0 * f_center + f_mp) / (hp * hp);

    let f_pvpp = at(hv, hp)?;
    let f_pvmp = at(hv, -hp)?;
    let f_mvpp = at(-hv, hp)?;
    let f_mvmp = at(-hv, -hp)?;
    let h_vp = (f_pvpp - f_pvmp - f_mvpp + f_mvmp) / (4.0 * hv * hp);

    Some((
        Vector2::new(g_v, g_p),
        Matrix2::new(h_vv, h_vp, h_vp, h_pp),
    ))
}

/// One safeguarded second-order step: a plain normal-equation step when the
/// Hessian is safely positive definite, otherwise a Levenberg ladder doubling
/// λ until the clamped step strictly decreases the objective. `None` when no
/// improving step exists (the ladder topped out at λ > 1e6).
fn descend_once(
    objective: &impl Fn(Vector2<f64>) -> Option<f64>,
    f_current: f64,
    t1: &Vector2<f64>,
    t2: &Matrix2<f64>,
    bounds: &Box2,
    config: &GuidanceConfig,
    mode: Mode,
) -> Option<(Vector2<f64>, f64, f64)> {
    let improvement_floor = 1e-15 * f_current.abs().max(1.0);
    if min_eigenvalue(t2, mode) >= MIN_EIG_THRESHOLD {
        if let Some(step) = normal_equation_step(t1, t2, 0.0) {
            let (clamped, _) = bounds.clamp(step);
            if let Some(f_cand) = objective(clamped) {
                if f_cand < f_current - improvement_floor {
                    return Some((clamped, f_cand, 0.0));
                }
            }
        }
    }
    let mut lambda = config.levenberg_lambda0;
    while lambda <= LAMBDA_MAX {
        if let Some(step) = normal_equation_step(t1, t2, lambda) {
            let (clamped, _) = bounds.clamp(step);
            if let Some(f_cand) = objective(clamped) {
                if f_cand < f_current - improvement_floor {
                    return Some((clamped, f_cand, lambda));
                }
            }
        }
        lambda *= 2.0;
    }
    None
}
