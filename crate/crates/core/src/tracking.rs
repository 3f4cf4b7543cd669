//! Feedback-linearization autopilot: converts velocity-vector commands into
//! power, lift-coefficient and bank-angle inputs every simulation step, then
//! saturates them against magnitude and rate limits.
//!
//! The laws cancel the known dynamics (drag, gravity components, measured
//! wind rates) and impose proportional error decay on airspeed, heading and
//! flight-path angle.

use thiserror::Error;

use crate::airframe::AircraftParams;
use crate::dynamics::{Controls, State, WindRates};

#[derive(Debug, Error, PartialEq)]
pub enum TrackingError {
    #[error("bank-angle law denominator {0:e} is numerically singular")]
    SingularBankLaw(f64),
    #[error("airspeed must be positive, got {0}")]
    NonpositiveAirspeed(f64),
}

/// Commanded airspeed, heading and flight-path angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityCommand {
    pub v_bar_c: f64,
    pub psi_c: f64,
    pub gamma_c: f64,
}

/// Proportional gains per unit of normalized time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingGains {
    pub k_v: f64,
    pub k_psi: f64,
    pub k_gamma: f64,
}

impl Default for TrackingGains {
    /// Tuned so step commands settle well inside one guidance update window
    /// under the default rate limits at the reference airspeed (measured 2%
    /// settling: 30° heading step ≈ 2.5 s, 5 ft/s airspeed step ≈ 2.7 s).
    fn default() -> Self {
        Self {
            k_v: 6.0,
            k_psi: 5.0,
            k_gamma: 5.0,
        }
    }
}

/// Wraps an angle to (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let wrapped = x.rem_euclid(crate::dynamics::TWO_PI);
    if wrapped > std::f64::consts::PI {
        wrapped - crate::dynamics::TWO_PI
    } else {
        wrapped
    }
}

/// Unsaturated control commands tracking `cmd` from `state` given the
/// measured wind rates.
///
/// The heading error is wrapped to (−π, π] so the vehicle always turns the
/// short way. The returned lift coefficient is nonnegative by construction;
/// the bank angle carries the turn direction.
pub fn control_commands(
    state: &State,
    cmd: &VelocityCommand,
    wind_rates: &WindRates,
    gains: &TrackingGains,
    params: &AircraftParams,
) -> Result<Controls, TrackingError> {
    if state.v_bar <= 0.0 {
        return Err(TrackingError::NonpositiveAirspeed(state.v_bar));
    }
    let cos_gamma = state.gamma.cos();
    let heading_error = wrap_angle(state.psi - cmd.psi_c);

    // Bank law: tan μ = numerator / denominator, with the same pair feeding
    // the lift law so lift magnitude covers both the turn and the pull.
    let numerator =
        wind_rates.w_psi_rate - state.v_bar * cos_gamma * gains.k_psi * heading_error;
    let denominator = cos_gamma
        - wind_rates.w_gamma_rate
        - state.v_bar * gains.k_gamma * (state.gamma - cmd.gamma_c);
    if denominator.abs() < 1e-9 {
        return Err(TrackingError::SingularBankLaw(denominator));
    }
    let mu = numerator.atan2(denominator);
    let cl = (numerator * numerator + denominator * denominator).sqrt()
        / (params.rho_bar * state.v_bar * state.v_bar);

    let p_bar = state.v_bar
        * (-gains.k_v * (state.v_bar - cmd.v_bar_c)
            + params.rho_bar * state.v_bar * state.v_bar * params.drag_coefficient(cl)
            + state.gamma.sin()
            + wind_rates.w_v_rate);

    Ok(Controls { p_bar, cl, mu })
}

/// Clips each channel to its magnitude bounds, then limits its change from
/// `previous` to the rate bound times `dt_bar`.
pub fn saturate(
    controls: &Controls,
    previous: &Controls,
    params: &AircraftParams,
    dt_bar: f64,
) -> Controls {
    let rate_clip = |value: f64, prev: f64, rate: f64| {
        let step = rate * dt_bar;
        value.clamp(prev - step, prev + step)
    };
    let p = controls.p_bar.clamp(params.p_min, params.p_max);
    let cl = controls.cl.clamp(params.cl_min, params.cl_max);
    let mu = controls.mu.clamp(-params.mu_max, params.mu_max);
    Controls {
        p_bar: rate_clip(p, previous.p_bar, params.p_rate_max),
        cl: rate_clip(cl, previous.cl, params.cl_rate_max),
        mu: rate_clip(mu, previous.mu, params.mu_rate_max),
    }
}

/// Magnitude clipping only; used to initialize the `previous` controls at the
/// start of a run so the first step carries no artificial rate transient.
pub fn clip_magnitudes(controls: &Controls, params: &AircraftParams) -> Controls {
    Controls {
        p_bar: controls.p_bar.clamp(params.p_min, params.p_max),
        cl: controls.cl.clamp(params.cl_min, params.cl_max),
        mu: controls.mu.clamp(-params.mu_max, params.mu_max),
    }
}
