//! Point-mass UAV simulation with real-time wind-energy-harvesting guidance.
//!
//! The library simulates a fixed-wing UAV in level flight through a parametric
//! wind field and periodically adjusts its airspeed/heading commands from
//! purely local wind measurements, so that the projected power requirement one
//! update interval ahead is minimized. A feedback-linearization autopilot
//! tracks the commands between updates, and batch scenario runners quantify
//! the power savings against a fixed-command reference flight.
//!
//! Modules follow the data flow:
//!
//! * [`airframe`] — aircraft parameters, normalization conventions, bounds
//! * [`windfield`] — wind components, gradients and along-path rates
//! * [`dynamics`] — normalized point-mass equations of motion, RK4 stepping
//! * [`guidance`] — projected-power objective and the adjustment solver
//! * [`tracking`] — feedback-linearization control laws plus saturation
//! * [`scenario`] — full flights, heading/frequency sweeps, benefit measures
//! * [`config`] — flat key-value configuration files shared by the CLI
//!
//! All simulation-facing quantities are dimensionless: speeds divided by the
//! characteristic speed `v_n`, times by `v_n/g`, distances by `v_n²/g` and
//! specific power by `g·v_n` (see [`airframe::NormalizationBasis`]).

pub mod airframe;
pub mod config;
pub mod dynamics;
pub mod guidance;
pub mod scenario;
pub mod tracking;
pub mod windfield;

pub use airframe::{
    denormalize_state, normalize_state, AircraftParams, GuidanceConfig, NormalizationBasis,
    PhysicalState,
};
pub use dynamics::{state_derivative, step, wind_rates, Controls, State, StateRates, WindRates};
pub use guidance::{
    endurance_airspeed, optimal_adjustment, optimal_airspeed_adjustment, projected_power,
    reference_airspeed, steady_level_power, Adjustment, ProjectedPowerInputs,
};
pub use config::{ConfigError, RawConfig, RunConfig};
pub use scenario::{
    benefit, frequency_sweep, heading_sweep, run, FrequencyPoint, HeadingSweep, RunMetrics,
    ScenarioKind, ScenarioSpec, TrajectorySample,
};
pub use tracking::{control_commands, saturate, TrackingGains, VelocityCommand};
pub use windfield::{WindField, WindFieldKind, WindFieldParams, WindSample};
