//! Parametric wind fields: components, spatial gradients, time partials and
//! along-trajectory total rates.
//!
//! The deterministic field is a horizontal plane wave aligned with the wind
//! direction: `(W_x, W_y) = W_m(s)·(sin Ψ_w, cos Ψ_w)` with
//! `W_m(s) = w_m·sin(ω̄_w·s + φ)` and `s = x̄·sin Ψ_w + ȳ·cos Ψ_w`. Its spatial
//! frequency is the single knob swept by the evaluation scenarios. Vertical
//! wind is identically zero. An optional Ornstein–Uhlenbeck layer perturbs the
//! horizontal components, reproducibly from a seed, stepping on the
//! simulation clock.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::airframe::NormalizationBasis;
use crate::dynamics::State;

#[derive(Debug, Error, PartialEq)]
pub enum WindFieldError {
    #[error("{name} must be non-negative and finite, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("ou_tau must be positive when a stochastic layer is enabled, got {0}")]
    BadTau(f64),
}

/// In-situ wind measurement at one point: components, the nine spatial
/// partials, three time partials and (when produced by [`WindField::advect`])
/// the total along-path rates. All normalized.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WindSample {
    pub w_x: f64,
    pub w_y: f64,
    pub w_h: f64,
    pub dwx_dx: f64,
    pub dwx_dy: f64,
    pub dwx_dh: f64,
    pub dwy_dx: f64,
    pub dwy_dy: f64,
    pub dwy_dh: f64,
    pub dwh_dx: f64,
    pub dwh_dy: f64,
    pub dwh_dh: f64,
    pub dwx_dt: f64,
    pub dwy_dt: f64,
    pub dwh_dt: f64,
    /// Total along-path component rates; zero until filled by `advect`.
    pub w_x_rate: f64,
    pub w_y_rate: f64,
    pub w_h_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindFieldKind {
    Constant,
    Sinusoidal,
    SinusoidalStochastic,
}

/// Physical-unit field description, normalized on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindFieldParams {
    pub kind: WindFieldKind,
    /// Wind magnitude amplitude, ft/s.
    pub w_m_fps: f64,
    /// Wind direction, rad.
    pub psi_w_rad: f64,
    /// Spatial frequency, rad/ft.
    pub omega_w_rad_per_ft: f64,
    /// Phase offset, rad. π/2 turns the ω = 0 sinusoid into a uniform field.
    pub phase_rad: f64,
    /// OU perturbation standard deviation, ft/s.
    pub ou_sigma_fps: f64,
    /// OU correlation time, s.
    pub ou_tau_s: f64,
    pub seed: u64,
}

impl WindFieldParams {
    pub fn constant(w_m_fps: f64, psi_w_rad: f64) -> Self {
        Self {
            kind: WindFieldKind::Constant,
            w_m_fps,
            psi_w_rad,
            omega_w_rad_per_ft: 0.0,
            phase_rad: 0.0,
            ou_sigma_fps: 0.0,
            ou_tau_s: 1.0,
            seed: 0,
        }
    }

    pub fn sinusoidal(w_m_fps: f64, psi_w_rad: f64, omega_w_rad_per_ft: f64) -> Self {
        Self {
            kind: WindFieldKind::Sinusoidal,
            w_m_fps,
            psi_w_rad,
            omega_w_rad_per_ft,
            phase_rad: 0.0,
            ou_sigma_fps: 0.0,
            ou_tau_s: 1.0,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<(), WindFieldError> {
        for (name, value) in [
            ("w_m_fps", self.w_m_fps.abs()),
            ("omega_w_rad_per_ft", self.omega_w_rad_per_ft),
            ("ou_sigma_fps", self.ou_sigma_fps),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(WindFieldError::Negative { name, value });
            }
        }
        if self.ou_sigma_fps > 0.0 && !(self.ou_tau_s > 0.0 && self.ou_tau_s.is_finite()) {
            return Err(WindFieldError::BadTau(self.ou_tau_s));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum FieldForm {
    Constant {
        w_x: f64,
        w_y: f64,
    },
    Sinusoidal {
        /// Normalized amplitude w̄_m.
        amp: f64,
        dir_sin: f64,
        dir_cos: f64,
        /// Normalized spatial frequency ω̄_w.
        omega: f64,
        phase: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct OuLayer {
    /// Normalized stationary standard deviation.
    sigma: f64,
    /// Normalized correlation time.
    tau: f64,
    rng: ChaCha8Rng,
    z_x: f64,
    z_y: f64,
}

impl OuLayer {
    fn new(sigma: f64, tau: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Start from the stationary distribution.
        let n_x: f64 = StandardNormal.sample(&mut rng);
        let n_y: f64 = StandardNormal.sample(&mut rng);
        Self {
            sigma,
            tau,
            rng,
            z_x: sigma * n_x,
            z_y: sigma * n_y,
        }
    }

    /// Exact discretization of dZ = −Z/τ dt + σ√(2/τ) dB over one tick.
    fn tick(&mut self, dt_bar: f64) {
        let alpha = (-dt_bar / self.tau).exp();
        let scale = self.sigma * (1.0 - alpha * alpha).sqrt();
        let n_x: f64 = StandardNormal.sample(&mut self.rng);
        let n_y: f64 = StandardNormal.sample(&mut self.rng);
        self.z_x = alpha * self.z_x + scale * n_x;
        self.z_y = alpha * self.z_y + scale * n_y;
    }
}

/// A queryable wind field. Deterministic forms are pure; the stochastic layer
/// owns its RNG stream and is advanced explicitly with [`WindField::tick`],
/// holding its perturbation constant between ticks (including integrator
/// sub-stages). One instance per trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct WindField {
    form: FieldForm,
    ou: Option<OuLayer>,
}

impl WindField {
    pub fn zero() -> Self {
        Self {
            form: FieldForm::Constant { w_x: 0.0, w_y: 0.0 },
            ou: None,
        }
    }

    /// Uniform horizontal wind of magnitude `w_m` toward `psi_w`.
    pub fn make_constant(
        params: &WindFieldParams,
        basis: &NormalizationBasis,
    ) -> Result<Self, WindFieldError> {
        params.validate()?;
        let amp = basis.speed_to_normalized(params.w_m_fps);
        Ok(Self {
            form: FieldForm::Constant {
                w_x: amp * params.psi_w_rad.sin(),
                w_y: amp * params.psi_w_rad.cos(),
            },
            ou: None,
        })
    }

    /// Horizontal plane wave aligned with `psi_w`, frozen in time.
    pub fn make_sinusoidal(
        params: &WindFieldParams,
        basis: &NormalizationBasis,
    ) -> Result<Self, WindFieldError> {
        params.validate()?;
        Ok(Self {
            form: FieldForm::Sinusoidal {
                amp: basis.speed_to_normalized(params.w_m_fps),
                dir_sin: params.psi_w_rad.sin(),
                dir_cos: params.psi_w_rad.cos(),
                omega: basis.spatial_frequency_to_normalized(params.omega_w_rad_per_ft),
                phase: params.phase_rad,
            },
            ou: None,
        })
    }

    /// Adds a seeded OU perturbation to the horizontal components of `base`.
    /// The perturbation leaves spatial partials untouched; its deterministic
    /// drift −Z/τ̄ is reported as the time partial.
    pub fn make_stochastic_layer(
        base: WindField,
        params: &WindFieldParams,
        basis: &NormalizationBasis,
    ) -> Result<Self, WindFieldError> {
        params.validate()?;
        let sigma = basis.speed_to_normalized(params.ou_sigma_fps);
        let tau = basis.time_to_normalized(params.ou_tau_s);
        Ok(Self {
            form: base.form,
            ou: if sigma > 0.0 {
                Some(OuLayer::new(sigma, tau, params.seed))
            } else {
                None
            },
        })
    }

    /// Builds the field selected by `params.kind`.
    pub fn from_params(
        params: &WindFieldParams,
        basis: &NormalizationBasis,
    ) -> Result<Self, WindFieldError> {
        match params.kind {
            WindFieldKind::Constant => Self::make_constant(params, basis),
            WindFieldKind::Sinusoidal => Self::make_sinusoidal(params, basis),
            WindFieldKind::SinusoidalStochastic => {
                let base = Self::make_sinusoidal(params, basis)?;
                Self::make_stochastic_layer(base, params, basis)
            }
        }
    }

    /// Advances the stochastic layer by one simulation step. No-op for
    /// deterministic fields.
    pub fn tick(&mut self, dt_bar: f64) {
        if let Some(ou) = self.ou.as_mut() {
            ou.tick(dt_bar);
        }
    }

    /// Components, spatial partials and time partials at a point. Total rates
    /// are left zero; use [`WindField::advect`] for those.
    pub fn sample(&self, x_bar: f64, y_bar: f64, h_bar: f64, _t_bar: f64) -> WindSample {
        let _ = h_bar; // provided fields are horizontal and altitude-independent
        let mut out = WindSample::default();
        match &self.form {
            FieldForm::Constant { w_x, w_y } => {
                out.w_x = *w_x;
                out.w_y = *w_y;
            }
            FieldForm::Sinusoidal {
                amp,
                dir_sin,
                dir_cos,
                omega,
                phase,
            } => {
                let s = x_bar * dir_sin + y_bar * dir_cos;
                let theta = omega * s + phase;
                let magnitude = amp * theta.sin();
                let slope = amp * omega * theta.cos();
                out.w_x = magnitude * dir_sin;
                out.w_y = magnitude * dir_cos;
                out.dwx_dx = slope * dir_sin * dir_sin;
                out.dwx_dy = slope * dir_cos * dir_sin;
                out.dwy_dx = slope * dir_sin * dir_cos;
                out.dwy_dy = slope * dir_cos * dir_cos;
            }
        }
        if let Some(ou) = &self.ou {
            out.w_x += ou.z_x;
            out.w_y += ou.z_y;
            out.dwx_dt += -ou.z_x / ou.tau;
            out.dwy_dt += -ou.z_y / ou.tau;
        }
        out
    }

    /// Samples at the state's position and fills the total along-path rates
    /// `W̄' = Σ_q (∂W/∂q)·q̇ + ∂W/∂t̄`, with the kinematic rates evaluated from
    /// this sample's own components.
    pub fn advect(&self, state: &State, t_bar: f64) -> WindSample {
        let mut sample = self.sample(state.x_bar, state.y_bar, state.h_bar, t_bar);
        let cos_gamma = state.gamma.cos();
        let x_dot = state.v_bar * cos_gamma * state.psi.sin() + sample.w_x;
        let y_dot = state.v_bar * cos_gamma * state.psi.cos() + sample.w_y;
        let h_dot = state.v_bar * state.gamma.sin() + sample.w_h;
        sample.w_x_rate =
            sample.dwx_dx * x_dot + sample.dwx_dy * y_dot + sample.dwx_dh * h_dot + sample.dwx_dt;
        sample.w_y_rate =
            sample.dwy_dx * x_dot + sample.dwy_dy * y_dot + sample.dwy_dh * h_dot + sample.dwy_dt;
        sample.w_h_rate =
            sample.dwh_dx * x_dot + sample.dwh_dy * y_dot + sample.dwh_dh * h_dot + sample.dwh_dt;
        sample
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn basis() -> NormalizationBasis {
        NormalizationBasis::default()
    }

    /// Central finite differences of the sampled components, step `h`.
    fn fd_partials(field: &WindField, x: f64, y: f64, h_bar: f64, step: f64) -> [f64; 4] {
        let wxp = field.sample(x + step, y, h_bar, 0.0);
        let wxm = field.sample(x - step, y, h_bar, 0.0);
        let wyp = field.sample(x, y + step, h_bar, 0.0);
        let wym = field.sample(x, y - step, h_bar, 0.0);
        [
            (wxp.w_x - wxm.w_x) / (2.0 * step),
            (wyp.w_x - wym.w_x) / (2.0 * step),
            (wxp.w_y - wxm.w_y) / (2.0 * step),
            (wyp.w_y - wym.w_y) / (2.0 * step),
        ]
    }

    #[test]
    fn constant_field_has_zero_partials() {
        let params = WindFieldParams::constant(10.0, 0.7);
        let field = WindField::make_constant(&params, &basis()).unwrap();
        let s = field.sample(3.0, -2.0, 26.0, 1.0);
        assert_relative_eq!(s.w_x, 10.0 / 134.5 * 0.7f64.sin(), max_relative = 1e-14);
        assert_relative_eq!(s.w_y, 10.0 / 134.5 * 0.7f64.cos(), max_relative = 1e-14);
        assert_eq!(s.w_h, 0.0);
        assert_eq!(
            [s.dwx_dx, s.dwx_dy, s.dwy_dx, s.dwy_dy, s.dwx_dt, s.dwy_dt],
            [0.0; 6]
        );
    }

    #[test]
    fn sinusoidal_phase_zero_and_quarter() {
        let psi_w = 1.1;
        let params = WindFieldParams::sinusoidal(15.0, psi_w, 0.05);
        let field = WindField::make_sinusoidal(&params, &basis()).unwrap();
        let amp = 15.0 / 134.5;
        let omega = basis().spatial_frequency_to_normalized(0.05);

        // At the origin the phase is zero: components vanish, the magnitude
        // slope along the wave axis is maximal.
        let s0 = field.sample(0.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(s0.w_x, 0.0, epsilon = 1e-14);
        assert_relative_eq!(
            s0.dwx_dx,
            amp * omega * psi_w.sin() * psi_w.sin(),
            max_relative = 1e-12
        );

        // A quarter period along the axis puts the magnitude at its crest.
        let quarter = std::f64::consts::FRAC_PI_2 / omega;
        let sq = field.sample(quarter * psi_w.sin(), quarter * psi_w.cos(), 0.0, 0.0);
        assert_relative_eq!(sq.w_x, amp * psi_w.sin(), max_relative = 1e-12);
        assert!(sq.dwx_dx.abs() < 1e-12);

        // Closed-form partials agree with central differences. The step is
        // sized so FD truncation (∝ (ω̄·step)²) sits well below the tolerance.
        let s = field.sample(0.3, 0.4, 0.0, 0.0);
        let fd = fd_partials(&field, 0.3, 0.4, 0.0, 1e-6);
        for (got, want) in fd.iter().zip([s.dwx_dx, s.dwx_dy, s.dwy_dx, s.dwy_dy]) {
            assert_relative_eq!(*got, want, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn omega_zero_with_quarter_phase_is_uniform() {
        let mut params = WindFieldParams::sinusoidal(12.0, 0.4, 0.0);
        params.phase_rad = std::f64::consts::FRAC_PI_2;
        let field = WindField::make_sinusoidal(&params, &basis()).unwrap();
        let a = field.sample(0.0, 0.0, 0.0, 0.0);
        let b = field.sample(100.0, -50.0, 3.0, 7.0);
        assert_eq!(a, b);
        assert_relative_eq!(a.w_x, 12.0 / 134.5 * 0.4f64.sin(), max_relative = 1e-14);
    }

    #[test]
    fn zero_amplitude_is_zero_field() {
        let params = WindFieldParams::sinusoidal(0.0, 0.4, 0.05);
        let field = WindField::make_sinusoidal(&params, &basis()).unwrap();
        let s = field.sample(5.0, 5.0, 0.0, 0.0);
        assert_eq!(s, WindSample::default());
    }

    #[test]
    fn normalized_frequency_matches_unit_conversion() {
        // 0.05 rad/ft scaled by v_n²/g.
        let b = basis();
        let omega = b.spatial_frequency_to_normalized(0.05);
        assert_relative_eq!(omega, 0.05 * 134.5 * 134.5 / 32.174, max_relative = 1e-12);
        assert!((omega - 28.1).abs() < 0.05);
    }

    #[test]
    fn advect_constant_field_rates_vanish() {
        let params = WindFieldParams::constant(20.0, 2.0);
        let field = WindField::make_constant(&params, &basis()).unwrap();
        let state = State {
            v_bar: 0.6,
            psi: 1.0,
            gamma: 0.0,
            x_bar: 4.0,
            y_bar: 5.0,
            h_bar: 26.0,
        };
        let s = field.advect(&state, 0.0);
        assert_eq!([s.w_x_rate, s.w_y_rate, s.w_h_rate], [0.0; 3]);
    }

    #[test]
    fn advect_single_axis_field() {
        // Wave axis along x̄ only: rate reduces to (∂W_x/∂x̄)(V̄ + W_x).
        let params = WindFieldParams::sinusoidal(15.0, std::f64::consts::FRAC_PI_2, 0.02);
        let field = WindField::make_sinusoidal(&params, &basis()).unwrap();
        let state = State {
            v_bar: 0.5,
            psi: std::f64::consts::FRAC_PI_2,
            gamma: 0.0,
            x_bar: 0.3,
            y_bar: 9.0,
            h_bar: 0.0,
        };
        let s = field.advect(&state, 0.0);
        assert_relative_eq!(
            s.w_x_rate,
            s.dwx_dx * (state.v_bar + s.w_x),
            max_relative = 1e-12
        );
        assert!(s.w_y_rate.abs() < 1e-15);
    }

    #[test]
    fn advect_matches_trajectory_finite_difference() {
        // Integrate the drifting-position kinematics accurately, sample the
        // field at 50 Hz along the path, and difference consecutive samples
        // against the analytic total rate.
        let params = WindFieldParams::sinusoidal(15.0, 0.9, 0.01);
        let field = WindField::make_sinusoidal(&params, &basis()).unwrap();
        let dt = 0.02 * 32.174 / 134.5;
        let (v_bar, psi): (f64, f64) = (0.55, 0.7);
        let deriv = |x: f64, y: f64| {
            let s = field.sample(x, y, 26.0, 0.0);
            (v_bar * psi.sin() + s.w_x, v_bar * psi.cos() + s.w_y)
        };
        let mut state = State {
            v_bar,
            psi,
            gamma: 0.0,
            x_bar: 0.0,
            y_bar: 0.0,
            h_bar: 26.0,
        };
        let mut history: Vec<WindSample> = Vec::new();
        for _ in 0..200 {
            history.push(field.advect(&state, 0.0));
            // RK4 on the 2D position so path error stays far below the
            // central-difference truncation under test.
            let (k1x, k1y) = deriv(state.x_bar, state.y_bar);
            let (k2x, k2y) = deriv(state.x_bar + 0.5 * dt * k1x, state.y_bar + 0.5 * dt * k1y);
            let (k3x, k3y) = deriv(state.x_bar + 0.5 * dt * k2x, state.y_bar + 0.5 * dt * k2y);
            let (k4x, k4y) = deriv(state.x_bar + dt * k3x, state.y_bar + dt * k3y);
            state.x_bar += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            state.y_bar += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        }
        for k in 1..history.len() - 1 {
            let fd_x = (history[k + 1].w_x - history[k - 1].w_x) / (2.0 * dt);
            let fd_y = (history[k + 1].w_y - history[k - 1].w_y) / (2.0 * dt);
            assert!((fd_x - history[k].w_x_rate).abs() < 1e-4);
            assert!((fd_y - history[k].w_y_rate).abs() < 1e-4);
        }
    }

    #[test]
    fn stochastic_layer_with_zero_sigma_is_identity() {
        let mut params = WindFieldParams::sinusoidal(15.0, 0.3, 0.05);
        params.ou_sigma_fps = 0.0;
        params.ou_tau_s = 2.0;
        let base = WindField::make_sinusoidal(&params, &basis()).unwrap();
        let mut layered =
            WindField::make_stochastic_layer(base.clone(), &params, &basis()).unwrap();
        layered.tick(0.01);
        layered.tick(0.01);
        assert_eq!(
            base.sample(1.0, 2.0, 0.0, 0.0),
            layered.sample(1.0, 2.0, 0.0, 0.0)
        );
    }

    #[test]
    fn stochastic_layer_is_reproducible() {
        let mut params = WindFieldParams::sinusoidal(15.0, 0.3, 0.05);
        params.kind = WindFieldKind::SinusoidalStochastic;
        params.ou_sigma_fps = 3.0;
        params.ou_tau_s = 2.0;
        params.seed = 42;
        let mut a = WindField::from_params(&params, &basis()).unwrap();
        let mut b = WindField::from_params(&params, &basis()).unwrap();
        for _ in 0..100 {
            a.tick(0.005);
            b.tick(0.005);
            let sa = a.sample(0.0, 0.0, 0.0, 0.0);
            let sb = b.sample(0.0, 0.0, 0.0, 0.0);
            assert_eq!(sa, sb);
        }
    }

    #[test]
    fn stochastic_layer_spatial_partials_unchanged_and_drift_reported() {
        let mut params = WindFieldParams::sinusoidal(15.0, 0.3, 0.05);
        params.kind = WindFieldKind::SinusoidalStochastic;
        params.ou_sigma_fps = 3.0;
        params.ou_tau_s = 2.0;
        params.seed = 7;
        let base = WindField::make_sinusoidal(&params, &basis()).unwrap();
        let layered = WindField::from_params(&params, &basis()).unwrap();
        let sb = base.sample(1.0, 2.0, 0.0, 0.0);
        let sl = layered.sample(1.0, 2.0, 0.0, 0.0);
        assert_eq!(sb.dwx_dx, sl.dwx_dx);
        assert_eq!(sb.dwy_dy, sl.dwy_dy);
        let z_x = sl.w_x - sb.w_x;
        let tau = basis().time_to_normalized(2.0);
        assert_relative_eq!(sl.dwx_dt, -z_x / tau, max_relative = 1e-12);
    }

    #[test]
    fn ou_long_run_standard_deviation_matches_sigma() {
        let mut params = WindFieldParams::sinusoidal(0.0, 0.0, 0.0);
        params.kind = WindFieldKind::SinusoidalStochastic;
        params.ou_sigma_fps = 4.0;
        params.ou_tau_s = 2.0;
        params.seed = 2024;
        let mut field = WindField::from_params(&params, &basis()).unwrap();
        let dt = 0.02 * 32.174 / 134.5;
        let n = 200_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            field.tick(dt);
            let z = field.sample(0.0, 0.0, 0.0, 0.0).w_x;
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let std = (sum_sq / n as f64 - mean * mean).sqrt();
        let sigma = 4.0 / 134.5;
        assert!(
            (std - sigma).abs() < 0.05 * sigma,
            "std {std} vs sigma {sigma}"
        );
    }

    #[test]
    fn invalid_params_rejected() {
        let mut params = WindFieldParams::sinusoidal(15.0, 0.0, -0.01);
        assert!(WindField::make_sinusoidal(&params, &basis()).is_err());
        params.omega_w_rad_per_ft = 0.05;
        params.ou_sigma_fps = 1.0;
        params.ou_tau_s = 0.0;
        assert!(
            WindField::make_stochastic_layer(WindField::zero(), &params, &basis()).is_err()
        );
    }

    proptest! {
        /// Analytic spatial partials match central finite differences at
        /// randomized points and field parameters.
        #[test]
        fn gradients_match_finite_differences(
            x in -10.0f64..10.0,
            y in -10.0f64..10.0,
            psi_w in 0.0f64..6.28,
            omega_w in 0.001f64..0.2,
            w_m in 1.0f64..30.0,
        ) {
            let params = WindFieldParams::sinusoidal(w_m, psi_w, omega_w);
            let field = WindField::make_sinusoidal(&params, &basis()).unwrap();
            let s = field.sample(x, y, 0.0, 0.0);
            let fd = fd_partials(&field, x, y, 0.0, 1e-5);
            let scale = (w_m / 134.5)
                * basis().spatial_frequency_to_normalized(omega_w);
            for (got, want) in fd.iter().zip([s.dwx_dx, s.dwx_dy, s.dwy_dx, s.dwy_dy]) {
                prop_assert!(
                    (got - want).abs() <= 1e-6 * scale.max(1e-9),
                    "fd {got} analytic {want} scale {scale}"
                );
            }
        }
    }
}
