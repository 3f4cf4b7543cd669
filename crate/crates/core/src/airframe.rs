//! Aircraft parameters, normalization conventions and shared constraint sets.
//!
//! Everything downstream works in dimensionless quantities. The scalings are
//! fixed by a characteristic speed `v_n` and gravity `g`:
//!
//! | quantity        | scale          |
//! |-----------------|----------------|
//! | speed           | `v_n`          |
//! | time            | `v_n / g`      |
//! | distance        | `v_n² / g`     |
//! | specific power  | `g · v_n`      |
//! | rate (1/s)      | `g / v_n`      |
//! | spatial freq    | `g / v_n²`     |
//!
//! This is the unique dimensionless family under which the point-mass
//! equations of motion in [`crate::dynamics`] carry unit coefficients on the
//! `sin γ` / `cos γ` terms, with `ρ̄ = ρ·S·v_n²/(2·m·g)`.

use thiserror::Error;

use crate::dynamics::State;

#[derive(Debug, Error, PartialEq)]
pub enum AirframeError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} is not finite")]
    NonFinite { name: &'static str },
    #[error("airspeed bounds collapsed: v_bar_min {v_min} >= v_bar_max {v_max}")]
    AirspeedBounds { v_min: f64, v_max: f64 },
}

fn require_positive(name: &'static str, value: f64) -> Result<f64, AirframeError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(AirframeError::NonPositive { name, value })
    }
}

/// Characteristic quantities fixing the dimensionless scalings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationBasis {
    /// Characteristic speed, ft/s. Conventionally the maximum flight speed.
    pub v_n: f64,
    /// Vehicle mass, slug.
    pub mass: f64,
    /// Gravitational acceleration, ft/s².
    pub gravity: f64,
    /// Reference wing area, ft².
    pub wing_area: f64,
}

impl NormalizationBasis {
    pub fn new(v_n: f64, mass: f64, gravity: f64, wing_area: f64) -> Result<Self, AirframeError> {
        Ok(Self {
            v_n: require_positive("v_n", v_n)?,
            mass: require_positive("mass", mass)?,
            gravity: require_positive("gravity", gravity)?,
            wing_area: require_positive("wing_area", wing_area)?,
        })
    }

    /// Seconds of physical time per unit of normalized time.
    pub fn time_scale_s(&self) -> f64 {
        self.v_n / self.gravity
    }

    /// Feet of physical distance per unit of normalized distance.
    pub fn distance_scale_ft(&self) -> f64 {
        self.v_n * self.v_n / self.gravity
    }

    pub fn speed_to_normalized(&self, v_fps: f64) -> f64 {
        v_fps / self.v_n
    }

    pub fn speed_from_normalized(&self, v_bar: f64) -> f64 {
        v_bar * self.v_n
    }

    pub fn time_to_normalized(&self, t_s: f64) -> f64 {
        t_s / self.time_scale_s()
    }

    pub fn time_from_normalized(&self, t_bar: f64) -> f64 {
        t_bar * self.time_scale_s()
    }

    pub fn distance_to_normalized(&self, d_ft: f64) -> f64 {
        d_ft / self.distance_scale_ft()
    }

    pub fn distance_from_normalized(&self, d_bar: f64) -> f64 {
        d_bar * self.distance_scale_ft()
    }

    /// Power in ft·lb/s to normalized specific power (divide by `m·g·v_n`).
    pub fn power_to_normalized(&self, p: f64) -> f64 {
        p / (self.mass * self.gravity * self.v_n)
    }

    pub fn power_from_normalized(&self, p_bar: f64) -> f64 {
        p_bar * self.mass * self.gravity * self.v_n
    }

    /// Rate in 1/s to per-unit-normalized-time.
    pub fn rate_to_normalized(&self, r_per_s: f64) -> f64 {
        r_per_s * self.time_scale_s()
    }

    pub fn rate_from_normalized(&self, r_bar: f64) -> f64 {
        r_bar / self.time_scale_s()
    }

    /// Spatial frequency in rad/ft to rad per unit normalized distance.
    pub fn spatial_frequency_to_normalized(&self, w_rad_per_ft: f64) -> f64 {
        w_rad_per_ft * self.distance_scale_ft()
    }

    pub fn spatial_frequency_from_normalized(&self, w_bar: f64) -> f64 {
        w_bar / self.distance_scale_ft()
    }
}

impl Default for NormalizationBasis {
    /// ScanEagle-like basis: `v_n` = 134.5 ft/s (max flight speed),
    /// standard gravity, nominal mass and wing area.
    fn default() -> Self {
        Self {
            v_n: 134.5,
            mass: 1.234,
            gravity: 32.174,
            wing_area: 7.1,
        }
    }
}

/// Drag polar, density factor and control/airspeed bounds.
///
/// All fields are dimensionless; angles in radians. Rate bounds are per unit
/// of normalized time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AircraftParams {
    /// Zero-lift drag coefficient.
    pub cd0: f64,
    /// Induced-drag factor K.
    pub k_induced: f64,
    /// Normalized air density ρ̄ = ρ·S·v_n²/(2·m·g).
    pub rho_bar: f64,
    pub cl_min: f64,
    pub cl_max: f64,
    /// Typical cruise lift coefficient (sets the upper airspeed bound).
    pub cl_cruise: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Bank-angle bound, rad.
    pub mu_max: f64,
    /// Normalized power rate bound.
    pub p_rate_max: f64,
    /// Normalized lift-coefficient rate bound.
    pub cl_rate_max: f64,
    /// Normalized bank rate bound.
    pub mu_rate_max: f64,
    /// Normalized airspeed lower bound (stall), `1.0/sqrt(ρ̄·cl_max)`.
    pub v_bar_min: f64,
    /// Normalized airspeed upper bound, `1.5/sqrt(ρ̄·cl_cruise)`.
    pub v_bar_max: f64,
}

impl AircraftParams {
    /// Builds the parameter set, deriving the airspeed bounds from the
    /// stall/cruise rule. Fails if any positivity or ordering invariant is
    /// violated.
    #[allow(clippy::too_many_arguments)]
    pub fn from_polar(
        cd0: f64,
        k_induced: f64,
        rho_bar: f64,
        cl_min: f64,
        cl_max: f64,
        cl_cruise: f64,
        p_min: f64,
        p_max: f64,
        mu_max: f64,
        p_rate_max: f64,
        cl_rate_max: f64,
        mu_rate_max: f64,
    ) -> Result<Self, AirframeError> {
        require_positive("cd0", cd0)?;
        require_positive("k_induced", k_induced)?;
        require_positive("rho_bar", rho_bar)?;
        require_positive("cl_max", cl_max)?;
        require_positive("cl_cruise", cl_cruise)?;
        require_positive("p_rate_max", p_rate_max)?;
        require_positive("cl_rate_max", cl_rate_max)?;
        require_positive("mu_rate_max", mu_rate_max)?;
        require_positive("mu_max", mu_max)?;
        if !cl_min.is_finite() || !p_min.is_finite() || !p_max.is_finite() {
            return Err(AirframeError::NonFinite { name: "bounds" });
        }
        let v_bar_min = 1.0 / (rho_bar * cl_max).sqrt();
        let v_bar_max = 1.5 / (rho_bar * cl_cruise).sqrt();
        if v_bar_min >= v_bar_max {
            return Err(AirframeError::AirspeedBounds {
                v_min: v_bar_min,
                v_max: v_bar_max,
            });
        }
        Ok(Self {
            cd0,
            k_induced,
            rho_bar,
            cl_min,
            cl_max,
            cl_cruise,
            p_min,
            p_max,
            mu_max,
            p_rate_max,
            cl_rate_max,
            mu_rate_max,
            v_bar_min,
            v_bar_max,
        })
    }

    /// Drag coefficient at a given lift coefficient.
    pub fn drag_coefficient(&self, cl: f64) -> f64 {
        self.cd0 + self.k_induced * cl * cl
    }

    /// Lift coefficient holding level flight at `v_bar` with wings level.
    pub fn level_trim_cl(&self, v_bar: f64) -> f64 {
        1.0 / (self.rho_bar * v_bar * v_bar)
    }
}

impl Default for AircraftParams {
    /// ScanEagle-like defaults.
    ///
    /// `rho_bar` = 4.5 makes the upper airspeed bound exactly 1.0, i.e. the
    /// commanded speed ceiling coincides with the characteristic speed.
    ///
    /// The normalized control-rate bounds (6.216, 1.865, 1.085) are mutually
    /// consistent with full-power-range/s, 0.3/s lift-coefficient, and
    /// 10°/s bank rates for a 200 ft/s basis speed; under the default
    /// 134.5 ft/s basis they correspond to roughly 1.49× those physical
    /// rates (the bank bound, e.g., is 14.9°/s).
    fn default() -> Self {
        Self::from_polar(
            0.03,             // cd0
            0.05,             // k_induced
            4.5,              // rho_bar
            0.0,              // cl_min
            1.2,              // cl_max
            0.5,              // cl_cruise
            0.0,              // p_min
            1.0,              // p_max
            30f64.to_radians(), // mu_max
            6.216,            // p_rate_max
            1.865,            // cl_rate_max
            1.085,            // mu_rate_max
        )
        .expect("default aircraft parameters are valid")
    }
}

/// Adjustment-solver settings. Stored normalized; constructed from physical
/// units through a [`NormalizationBasis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceConfig {
    /// Adjustment period (= projection horizon Δt̄), normalized time.
    pub dt_update: f64,
    /// Airspeed adjustment bound, normalized.
    pub dv_max: f64,
    /// Heading adjustment bound, rad.
    pub dpsi_max: f64,
    /// Finite-difference step for the airspeed direction, normalized.
    pub fd_step_v: f64,
    /// Finite-difference step for the heading direction, rad.
    pub fd_step_psi: f64,
    /// Initial Levenberg regularization.
    pub levenberg_lambda0: f64,
}

impl GuidanceConfig {
    pub fn from_physical(
        dt_update_s: f64,
        dv_max_fps: f64,
        dpsi_max_rad: f64,
        fd_step_v: f64,
        fd_step_psi: f64,
        levenberg_lambda0: f64,
        basis: &NormalizationBasis,
    ) -> Result<Self, AirframeError> {
        require_positive("dt_update", dt_update_s)?;
        require_positive("dv_max", dv_max_fps)?;
        require_positive("dpsi_max", dpsi_max_rad)?;
        require_positive("fd_step_v", fd_step_v)?;
        require_positive("fd_step_psi", fd_step_psi)?;
        require_positive("levenberg_lambda0", levenberg_lambda0)?;
        let dv_max = basis.speed_to_normalized(dv_max_fps);
        if fd_step_v >= dv_max {
            return Err(AirframeError::NonPositive {
                name: "fd_step_v must be smaller than dv_max",
                value: fd_step_v,
            });
        }
        if fd_step_psi >= dpsi_max_rad {
            return Err(AirframeError::NonPositive {
                name: "fd_step_psi must be smaller than dpsi_max",
                value: fd_step_psi,
            });
        }
        Ok(Self {
            dt_update: basis.time_to_normalized(dt_update_s),
            dv_max,
            dpsi_max: dpsi_max_rad,
            fd_step_v,
            fd_step_psi,
            levenberg_lambda0,
        })
    }

    /// 4 s updates, 5 ft/s and 30° adjustment bounds.
    pub fn default_for(basis: &NormalizationBasis) -> Self {
        Self::from_physical(
            4.0,
            5.0,
            30f64.to_radians(),
            1e-4,
            1e-4,
            1e-3,
            basis,
        )
        .expect("default guidance configuration is valid")
    }
}

/// Kinematic state in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalState {
    pub v_fps: f64,
    pub psi_rad: f64,
    pub gamma_rad: f64,
    pub x_ft: f64,
    pub y_ft: f64,
    pub h_ft: f64,
}

/// Scales a physical state into the dimensionless state used by the
/// simulation. Rejects non-finite inputs.
pub fn normalize_state(
    physical: &PhysicalState,
    basis: &NormalizationBasis,
) -> Result<State, AirframeError> {
    for (name, value) in [
        ("v_fps", physical.v_fps),
        ("psi_rad", physical.psi_rad),
        ("gamma_rad", physical.gamma_rad),
        ("x_ft", physical.x_ft),
        ("y_ft", physical.y_ft),
        ("h_ft", physical.h_ft),
    ] {
        if !value.is_finite() {
            return Err(AirframeError::NonFinite { name });
        }
    }
    Ok(State {
        v_bar: basis.speed_to_normalized(physical.v_fps),
        psi: physical.psi_rad,
        gamma: physical.gamma_rad,
        x_bar: basis.distance_to_normalized(physical.x_ft),
        y_bar: basis.distance_to_normalized(physical.y_ft),
        h_bar: basis.distance_to_normalized(physical.h_ft),
    })
}

/// Exact inverse of [`normalize_state`].
pub fn denormalize_state(state: &State, basis: &NormalizationBasis) -> PhysicalState {
    PhysicalState {
        v_fps: basis.speed_from_normalized(state.v_bar),
        psi_rad: state.psi,
        gamma_rad: state.gamma,
        x_ft: basis.distance_from_normalized(state.x_bar),
        y_ft: basis.distance_from_normalized(state.y_bar),
        h_ft: basis.distance_from_normalized(state.h_bar),
    }
}
