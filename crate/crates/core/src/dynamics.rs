//! Normalized 3D point-mass equations of motion and fixed-step integration.
//!
//! States evolve in normalized time. Wind enters the dynamic equations
//! through the along-path component rates resolved into airspeed/heading/
//! flight-path axes, and the kinematic equations through the raw components.

use thiserror::Error;

use crate::airframe::AircraftParams;
use crate::windfield::{WindField, WindSample};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("singular state: v_bar = {v_bar}, gamma = {gamma} rad")]
    SingularState { v_bar: f64, gamma: f64 },
}

/// Normalized kinematic/dynamic state of the point-mass vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    /// Normalized airspeed, > 0.
    pub v_bar: f64,
    /// Heading angle, rad, wrapped to [0, 2π) at step boundaries.
    pub psi: f64,
    /// Flight-path angle, rad, |γ| < π/2.
    pub gamma: f64,
    pub x_bar: f64,
    pub y_bar: f64,
    pub h_bar: f64,
}

impl State {
    /// Euler-advances every field by `h` times the given rates. Used for the
    /// integrator sub-stages; heading is not wrapped here.
    fn advanced(&self, rates: &StateRates, h: f64) -> State {
        State {
            v_bar: self.v_bar + h * rates.v_bar_dot,
            psi: self.psi + h * rates.psi_dot,
            gamma: self.gamma + h * rates.gamma_dot,
            x_bar: self.x_bar + h * rates.x_bar_dot,
            y_bar: self.y_bar + h * rates.y_bar_dot,
            h_bar: self.h_bar + h * rates.h_bar_dot,
        }
    }

    pub fn wrap_heading(mut self) -> State {
        self.psi = self.psi.rem_euclid(TWO_PI);
        self
    }
}

/// Control inputs: normalized power, lift coefficient, bank angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    pub p_bar: f64,
    pub cl: f64,
    /// Bank angle, rad.
    pub mu: f64,
}

impl Controls {
    /// Wings-level steady trim at `v_bar` in zero wind: lift balances weight,
    /// power balances drag.
    pub fn level_trim(v_bar: f64, params: &AircraftParams) -> Controls {
        let cl = params.level_trim_cl(v_bar);
        Controls {
            p_bar: params.rho_bar * v_bar.powi(3) * params.drag_coefficient(cl),
            cl,
            mu: 0.0,
        }
    }
}

/// Time derivatives of every [`State`] field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRates {
    pub v_bar_dot: f64,
    pub psi_dot: f64,
    pub gamma_dot: f64,
    pub x_bar_dot: f64,
    pub y_bar_dot: f64,
    pub h_bar_dot: f64,
}

/// Wind component rates resolved into the velocity axes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WindRates {
    pub w_v_rate: f64,
    pub w_psi_rate: f64,
    pub w_gamma_rate: f64,
}

/// Resolves the along-path component rates `(W̄_x', W̄_y', W̄_h')` carried by
/// `wind` into airspeed/heading/flight-path axes.
pub fn wind_rates(state: &State, wind: &WindSample) -> WindRates {
    let (sin_psi, cos_psi) = state.psi.sin_cos();
    let (sin_gamma, cos_gamma) = state.gamma.sin_cos();
    WindRates {
        w_v_rate: wind.w_x_rate * cos_gamma * sin_psi
            + wind.w_y_rate * cos_gamma * cos_psi
            + wind.w_h_rate * sin_gamma,
        w_psi_rate: wind.w_x_rate * cos_psi - wind.w_y_rate * sin_psi,
        w_gamma_rate: wind.w_x_rate * sin_gamma * sin_psi
            + wind.w_y_rate * sin_gamma * cos_psi
            - wind.w_h_rate * cos_gamma,
    }
}

/// Evaluates the normalized equations of motion. `wind` must carry total
/// along-path rates (built by [`WindField::advect`]).
pub fn state_derivative(
    state: &State,
    controls: &Controls,
    wind: &WindSample,
    params: &AircraftParams,
) -> Result<StateRates, DynamicsError> {
    let cos_gamma = state.gamma.cos();
    if state.v_bar <= 0.0 || cos_gamma.abs() < 1e-12 {
        return Err(DynamicsError::SingularState {
            v_bar: state.v_bar,
            gamma: state.gamma,
        });
    }
    let rates = wind_rates(state, wind);
    let (sin_psi, cos_psi) = state.psi.sin_cos();
    let sin_gamma = state.gamma.sin();
    let drag = params.rho_bar * state.v_bar * state.v_bar * params.drag_coefficient(controls.cl);
    let lift_term = params.rho_bar * state.v_bar * controls.cl;
    Ok(StateRates {
        v_bar_dot: controls.p_bar / state.v_bar - drag - sin_gamma - rates.w_v_rate,
        psi_dot: lift_term / cos_gamma * controls.mu.sin()
            - rates.w_psi_rate / (state.v_bar * cos_gamma),
        gamma_dot: lift_term * controls.mu.cos() - cos_gamma / state.v_bar
            + rates.w_gamma_rate / state.v_bar,
        x_bar_dot: state.v_bar * cos_gamma * sin_psi + wind.w_x,
        y_bar_dot: state.v_bar * cos_gamma * cos_psi + wind.w_y,
        h_bar_dot: state.v_bar * sin_gamma + wind.w_h,
    })
}

/// Classical fourth-order Runge–Kutta step of length `dt_bar` starting at
/// `t_bar`. Controls are held constant; wind is re-sampled at every sub-stage
/// position and time. The returned heading is wrapped to [0, 2π).
pub fn step(
    state: &State,
    controls: &Controls,
    field: &WindField,
    params: &AircraftParams,
    t_bar: f64,
    dt_bar: f64,
) -> Result<State, DynamicsError> {
    let eval = |s: &State, t: f64| {
        let wind = field.advect(s, t);
        state_derivative(s, controls, &wind, params)
    };
    let half = 0.5 * dt_bar;
    let k1 = eval(state, t_bar)?;
    let k2 = eval(&state.advanced(&k1, half), t_bar + half)?;
    let k3 = eval(&state.advanced(&k2, half), t_bar + half)?;
    let k4 = eval(&state.advanced(&k3, dt_bar), t_bar + dt_bar)?;
    let sixth = dt_bar / 6.0;
    let next = State {
        v_bar: state.v_bar
            + sixth * (k1.v_bar_dot + 2.0 * k2.v_bar_dot + 2.0 * k3.v_bar_dot + k4.v_bar_dot),
        psi: state.psi
            + sixth * (k1.psi_dot + 2.0 * k2.psi_dot + 2.0 * k3.psi_dot + k4.psi_dot),
        gamma: state.gamma
            + sixth * (k1.gamma_dot + 2.0 * k2.gamma_dot + 2.0 * k3.gamma_dot + k4.gamma_dot),
        x_bar: state.x_bar
            + sixth * (k1.x_bar_dot + 2.0 * k2.x_bar_dot + 2.0 * k3.x_bar_dot + k4.x_bar_dot),
        y_bar: state.y_bar
            + sixth * (k1.y_bar_dot + 2.0 * k2.y_bar_dot + 2.0 * k3.y_bar_dot + k4.y_bar_dot),
        h_bar: state.h_bar
            + sixth * (k1.h_bar_dot + 2.0 * k2.h_bar_dot + 2.0 * k3.h_bar_dot + k4.h_bar_dot),
    };
    Ok(next.wrap_heading())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::windfield::WindFieldParams;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn params() -> AircraftParams {
        AircraftParams::default()
    }

    fn level_state(v_bar: f64, psi: f64) -> State {
        State {
            v_bar,
            psi,
            gamma: 0.0,
            x_bar: 0.0,
            y_bar: 0.0,
            h_bar: 26.0,
        }
    }

    #[test]
    fn wind_rates_zero_input_zero_output() {
        let state = level_state(0.6, 1.0);
        let rates = wind_rates(&state, &WindSample::default());
        assert_eq!(rates, WindRates::default());
    }

    #[test]
    fn wind_rates_axis_cases() {
        // γ=0, Ψ=π/2, only W̄_x' = a: everything lands in the airspeed axis.
        let a = 0.37;
        let state = level_state(0.6, FRAC_PI_2);
        let wind = WindSample {
            w_x_rate: a,
            ..WindSample::default()
        };
        let r = wind_rates(&state, &wind);
        assert_relative_eq!(r.w_v_rate, a, max_relative = 1e-15);
        assert!(r.w_psi_rate.abs() < 1e-16);
        assert!(r.w_gamma_rate.abs() < 1e-16);

        // γ=0, Ψ=0, only W̄_y' = b: along-track, so no heading-axis part.
        let b = -0.21;
        let state = level_state(0.6, 0.0);
        let wind = WindSample {
            w_y_rate: b,
            ..WindSample::default()
        };
        let r = wind_rates(&state, &wind);
        assert_relative_eq!(r.w_v_rate, b, max_relative = 1e-15);
        assert!(r.w_psi_rate.abs() < 1e-16);
        assert!(r.w_gamma_rate.abs() < 1e-16);

        // Same rate seen from Ψ=π/2: now fully a heading-axis crosswind rate.
        let state = level_state(0.6, FRAC_PI_2);
        let r = wind_rates(&state, &wind);
        assert!(r.w_v_rate.abs() < 1e-16);
        assert_relative_eq!(r.w_psi_rate, -b, max_relative = 1e-15);
    }

    #[test]
    fn trim_controls_balance_all_dynamic_rates() {
        let p = params();
        let state = level_state(0.6, 1.3);
        let controls = Controls::level_trim(0.6, &p);
        let rates = state_derivative(&state, &controls, &WindSample::default(), &p).unwrap();
        assert!(rates.v_bar_dot.abs() < 1e-14);
        assert!(rates.psi_dot.abs() < 1e-14);
        assert!(rates.gamma_dot.abs() < 1e-14);
    }

    #[test]
    fn kinematics_along_east_heading() {
        let p = params();
        let state = level_state(1.0, FRAC_PI_2);
        let controls = Controls::level_trim(1.0, &p);
        let rates = state_derivative(&state, &controls, &WindSample::default(), &p).unwrap();
        assert_relative_eq!(rates.x_bar_dot, 1.0, max_relative = 1e-15);
        assert!(rates.y_bar_dot.abs() < 1e-15);
        assert!(rates.h_bar_dot.abs() < 1e-15);
    }

    #[test]
    fn airspeed_axis_wind_rate_enters_with_opposite_sign() {
        // At trim, adding W̄_V' = c must give V̄' = -c exactly.
        let p = params();
        let c = 0.123;
        let state = level_state(0.6, FRAC_PI_2);
        let controls = Controls::level_trim(0.6, &p);
        let wind = WindSample {
            w_x_rate: c, // resolves fully into the airspeed axis at Ψ=π/2, γ=0
            ..WindSample::default()
        };
        let rates = state_derivative(&state, &controls, &wind, &p).unwrap();
        assert_relative_eq!(rates.v_bar_dot, -c, epsilon = 1e-14);
    }

    #[test]
    fn singular_states_are_rejected() {
        let p = params();
        let controls = Controls::level_trim(0.6, &p);
        let mut state = level_state(0.0, 0.0);
        assert!(matches!(
            state_derivative(&state, &controls, &WindSample::default(), &p),
            Err(DynamicsError::SingularState { .. })
        ));
        state.v_bar = 0.6;
        state.gamma = FRAC_PI_2;
        assert!(matches!(
            state_derivative(&state, &controls, &WindSample::default(), &p),
            Err(DynamicsError::SingularState { .. })
        ));
    }

    #[test]
    fn trim_step_preserves_state_and_advances_position() {
        let p = params();
        let field = WindField::zero();
        let state = level_state(0.6, 1.0);
        let controls = Controls::level_trim(0.6, &p);
        let dt = 0.02 * 32.174 / 134.5;
        let next = step(&state, &controls, &field, &p, 0.0, dt).unwrap();
        assert!((next.v_bar - state.v_bar).abs() < 1e-10);
        assert!((next.psi - state.psi).abs() < 1e-10);
        assert!((next.gamma - state.gamma).abs() < 1e-10);
        assert_relative_eq!(
            next.x_bar,
            state.x_bar + state.v_bar * dt * state.psi.sin(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            next.y_bar,
            state.y_bar + state.v_bar * dt * state.psi.cos(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn constant_wind_advects_position() {
        let p = params();
        let w = 8.0;
        let wind_params = WindFieldParams::constant(w, FRAC_PI_2); // pure +x wind
        let field =
            WindField::make_constant(&wind_params, &crate::airframe::NormalizationBasis::default())
                .unwrap();
        let state = level_state(0.6, FRAC_PI_2);
        let controls = Controls::level_trim(0.6, &p);
        let dt = 0.01;
        let next = step(&state, &controls, &field, &p, 0.0, dt).unwrap();
        let w_bar = w / 134.5;
        assert_relative_eq!(
            next.x_bar - state.x_bar,
            (state.v_bar + w_bar) * dt,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rk4_observed_order_is_at_least_3_8() {
        // Integrate a smooth wind field with fixed controls over a fixed
        // horizon at dt, dt/2 and a dt/16 reference; the error ratio between
        // the two coarse runs gives the observed convergence order.
        let p = params();
        let wind_params = WindFieldParams::sinusoidal(15.0, 0.8, 0.02);
        let field = WindField::make_sinusoidal(
            &wind_params,
            &crate::airframe::NormalizationBasis::default(),
        )
        .unwrap();
        let start = level_state(0.6, 0.9);
        let controls = Controls::level_trim(0.6, &p);
        let horizon = 0.48;

        let integrate = |n: usize| {
            let dt = horizon / n as f64;
            let mut s = start;
            let mut t = 0.0;
            for _ in 0..n {
                s = step(&s, &controls, &field, &p, t, dt).unwrap();
                t += dt;
            }
            s
        };

        let coarse = integrate(8);
        let medium = integrate(16);
        let reference = integrate(128);
        let err = |s: &State| {
            ((s.v_bar - reference.v_bar).powi(2)
                + (s.psi - reference.psi).powi(2)
                + (s.gamma - reference.gamma).powi(2)
                + (s.x_bar - reference.x_bar).powi(2)
                + (s.y_bar - reference.y_bar).powi(2))
            .sqrt()
        };
        let ratio = err(&coarse) / err(&medium);
        let order = ratio.log2();
        assert!(order >= 3.8, "observed order {order}, ratio {ratio}");
    }

    #[test]
    fn heading_wraps_at_step_boundary() {
        let p = params();
        let field = WindField::zero();
        let mut state = level_state(0.6, TWO_PI - 1e-4);
        // Bank slightly so the heading crosses 2π during the step.
        let mut controls = Controls::level_trim(0.6, &p);
        controls.mu = 0.2;
        state = step(&state, &controls, &field, &p, 0.0, 0.01).unwrap();
        assert!(state.psi >= 0.0 && state.psi < TWO_PI);
        assert!(state.psi < 0.01);
    }

    proptest! {
        /// The axis resolution is linear in the component rates.
        #[test]
        fn wind_rates_superposition(
            psi in 0.0f64..6.28,
            gamma in -0.5f64..0.5,
            ax in -1.0f64..1.0,
            ay in -1.0f64..1.0,
            ah in -1.0f64..1.0,
            bx in -1.0f64..1.0,
            by in -1.0f64..1.0,
            bh in -1.0f64..1.0,
        ) {
            let state = State { v_bar: 0.6, psi, gamma, x_bar: 0.0, y_bar: 0.0, h_bar: 0.0 };
            let wind = |x: f64, y: f64, h: f64| WindSample {
                w_x_rate: x,
                w_y_rate: y,
                w_h_rate: h,
                ..WindSample::default()
            };
            let a = wind_rates(&state, &wind(ax, ay, ah));
            let b = wind_rates(&state, &wind(bx, by, bh));
            let sum = wind_rates(&state, &wind(ax + bx, ay + by, ah + bh));
            prop_assert!((sum.w_v_rate - (a.w_v_rate + b.w_v_rate)).abs() < 1e-12);
            prop_assert!((sum.w_psi_rate - (a.w_psi_rate + b.w_psi_rate)).abs() < 1e-12);
            prop_assert!((sum.w_gamma_rate - (a.w_gamma_rate + b.w_gamma_rate)).abs() < 1e-12);
        }
    }
}
