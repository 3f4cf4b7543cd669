//! Complete flights under the reference and adjusted guidance strategies,
//! the power/benefit performance measures, and heading/frequency sweeps.
//!
//! A run integrates the closed-loop vehicle at the simulation rate. The
//! reference strategy holds its commands fixed for the whole flight; the
//! adjusted strategies re-solve the projected-power problem from the current
//! in-situ wind sample at every guidance update and re-base the commands on
//! the current state. Sweep elements are independent runs executed in
//! parallel and aggregated in deterministic order.

use rayon::prelude::*;
use thiserror::Error;

use crate::airframe::{AircraftParams, GuidanceConfig, NormalizationBasis};
use crate::dynamics::{self, Controls, DynamicsError, State};
use crate::guidance::{self, GuidanceError, ProjectedPowerInputs};
use crate::tracking::{self, TrackingGains, VelocityCommand};
use crate::windfield::{WindField, WindFieldError, WindFieldParams, WindSample};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("wind field: {0}")]
    WindField(#[from] WindFieldError),
    #[error("run aborted at step {step} (t = {t_s:.3} s): {cause}")]
    Aborted {
        step: usize,
        t_s: f64,
        cause: ModuleError,
    },
    #[error("benefit undefined: reference average power {0} is not positive")]
    BenefitUndefined(f64),
    #[error("heading increment {0} rad does not divide a full circle")]
    BadHeadingIncrement(f64),
}

/// Cause of an aborted run.
#[derive(Debug, Error)]
pub enum ModuleError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Guidance(#[from] GuidanceError),
    #[error("airspeed collapsed to {0}")]
    AirspeedCollapsed(f64),
}

/// Which guidance strategy flies the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Fixed commands: constrained endurance airspeed, initial heading.
    Reference,
    /// Airspeed and heading commands re-solved every update period.
    Adjusted,
    /// Airspeed command re-solved; heading command held at the initial value.
    AdjustedAirspeedOnly,
}

/// Everything needed to reproduce one flight.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub initial_state: State,
    pub flight_time_s: f64,
    pub sim_rate_hz: f64,
    pub guidance: GuidanceConfig,
    pub wind: WindFieldParams,
    pub gains: TrackingGains,
    pub aircraft: AircraftParams,
    pub basis: NormalizationBasis,
    /// Trajectory recording rate; `None` disables recording (sweeps).
    pub output_rate_hz: Option<f64>,
}

impl ScenarioSpec {
    /// A spec with library defaults: 20 min flight at 50 Hz, 4 s updates,
    /// level start at the constrained endurance airspeed, 15,000 ft.
    pub fn with_defaults(kind: ScenarioKind, wind: WindFieldParams) -> Self {
        let basis = NormalizationBasis::default();
        let aircraft = AircraftParams::default();
        let initial_state = State {
            v_bar: guidance::reference_airspeed(&aircraft),
            psi: std::f64::consts::FRAC_PI_2,
            gamma: 0.0,
            x_bar: 0.0,
            y_bar: 0.0,
            h_bar: basis.distance_to_normalized(15_000.0),
        };
        Self {
            kind,
            initial_state,
            flight_time_s: 1200.0,
            sim_rate_hz: 50.0,
            guidance: GuidanceConfig::default_for(&basis),
            wind,
            gains: TrackingGains::default(),
            aircraft,
            basis,
            output_rate_hz: None,
        }
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.flight_time_s > 0.0) {
            return Err(ScenarioError::InvalidSpec(format!(
                "flight_time_s must be positive, got {}",
                self.flight_time_s
            )));
        }
        if !(self.sim_rate_hz > 0.0) {
            return Err(ScenarioError::InvalidSpec(format!(
                "sim_rate_hz must be positive, got {}",
                self.sim_rate_hz
            )));
        }
        let steps_per_update = self.guidance_steps_per_update();
        let dt_update_s = self.basis.time_from_normalized(self.guidance.dt_update);
        let exact = dt_update_s * self.sim_rate_hz;
        if (exact - steps_per_update as f64).abs() > 1e-9 {
            return Err(ScenarioError::InvalidSpec(format!(
                "guidance period {dt_update_s} s is not an integer multiple of \
                 the {} Hz simulation step",
                self.sim_rate_hz
            )));
        }
        if !(self.initial_state.v_bar > 0.0) {
            return Err(ScenarioError::InvalidSpec(
                "initial airspeed must be positive".into(),
            ));
        }
        Ok(())
    }

    fn guidance_steps_per_update(&self) -> usize {
        let dt_update_s = self.basis.time_from_normalized(self.guidance.dt_update);
        (dt_update_s * self.sim_rate_hz).round().max(1.0) as usize
    }
}

/// One decimated record of the closed-loop trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySample {
    pub t_s: f64,
    pub state: State,
    pub controls: Controls,
    pub wind: WindSample,
    /// Instantaneous normalized power drawn (the saturated power control).
    pub p_bar: f64,
}

/// Performance measures of one run or one sweep.
#[derive(Debug, Clone, Default)]
pub struct RunMetrics {
    /// Trapezoidal time average of the instantaneous power.
    pub p_bar_avg: f64,
    /// Mean of `p_bar_avg` over the initial-heading ensemble (sweeps only).
    pub p_bar_heading_avg: Option<f64>,
    /// Relative benefit versus a reference run, when one was computed.
    pub benefit: Option<f64>,
    /// Sampled states/controls for output; empty when recording is off.
    pub trajectory: Vec<TrajectorySample>,
    /// Largest observed per-step control rates (power, lift, bank), for
    /// verifying the saturation limits independently of the limiter.
    pub max_control_rates: [f64; 3],
}

/// Flies one complete scenario.
pub fn run(spec: &ScenarioSpec) -> Result<RunMetrics, ScenarioError> {
    spec.validate()?;
    let basis = &spec.basis;
    let params = &spec.aircraft;
    let dt_bar = basis.time_to_normalized(1.0 / spec.sim_rate_hz);
    let n_steps = (spec.flight_time_s * spec.sim_rate_hz).round() as usize;
    let steps_per_update = spec.guidance_steps_per_update();
    let output_every = spec
        .output_rate_hz
        .map(|rate| ((spec.sim_rate_hz / rate).round() as usize).max(1));

    let mut field = WindField::from_params(&spec.wind, basis)?;
    let mut state = spec.initial_state;
    let mut cmd = VelocityCommand {
        v_bar_c: guidance::reference_airspeed(params),
        psi_c: spec.initial_state.psi,
        gamma_c: 0.0,
    };

    let abort = |step: usize, cause: ModuleError| ScenarioError::Aborted {
        step,
        t_s: step as f64 / spec.sim_rate_hz,
        cause,
    };

    // Initialize the previous controls from the initial command so the first
    // step carries no artificial rate transient.
    let first_wind = field.advect(&state, 0.0);
    let first_rates = dynamics::wind_rates(&state, &first_wind);
    let mut previous = tracking::clip_magnitudes(
        &tracking::control_commands(&state, &cmd, &first_rates, &spec.gains, params)
            .unwrap_or(Controls {
                p_bar: 0.0,
                cl: params.level_trim_cl(state.v_bar).clamp(params.cl_min, params.cl_max),
                mu: 0.0,
            }),
        params,
    );

    let mut powers = Vec::with_capacity(n_steps);
    let mut trajectory = Vec::new();
    let mut max_rates = [0.0f64; 3];

    for step_idx in 0..n_steps {
        let t_bar = step_idx as f64 * dt_bar;
        let wind = field.advect(&state, t_bar);

        if spec.kind != ScenarioKind::Reference && step_idx % steps_per_update == 0 {
            if state.v_bar <= 0.0 {
                return Err(abort(step_idx, ModuleError::AirspeedCollapsed(state.v_bar)));
            }
            let inputs = ProjectedPowerInputs::new(state, wind, spec.guidance.dt_update)
                .map_err(|e| abort(step_idx, e.into()))?;
            let adjustment = match spec.kind {
                ScenarioKind::Adjusted => {
                    guidance::optimal_adjustment(&inputs, &spec.guidance, params)
                }
                ScenarioKind::AdjustedAirspeedOnly => {
                    guidance::optimal_airspeed_adjustment(&inputs, &spec.guidance, params)
                }
                ScenarioKind::Reference => unreachable!(),
            }
            .map_err(|e| abort(step_idx, e.into()))?;
            cmd.v_bar_c = state.v_bar + adjustment.d_v_bar;
            if spec.kind == ScenarioKind::Adjusted {
                cmd.psi_c = state.psi + adjustment.d_psi;
            }
        }

        let wind_rates = dynamics::wind_rates(&state, &wind);
        let controls = match tracking::control_commands(
            &state,
            &cmd,
            &wind_rates,
            &spec.gains,
            params,
        ) {
            Ok(commanded) => tracking::saturate(&commanded, &previous, params, dt_bar),
            // Transient singular bank law: hold the previous controls.
            Err(tracking::TrackingError::SingularBankLaw(_)) => previous,
            Err(tracking::TrackingError::NonpositiveAirspeed(v)) => {
                return Err(abort(step_idx, ModuleError::AirspeedCollapsed(v)));
            }
        };

        max_rates[0] = max_rates[0].max((controls.p_bar - previous.p_bar).abs() / dt_bar);
        max_rates[1] = max_rates[1].max((controls.cl - previous.cl).abs() / dt_bar);
        max_rates[2] = max_rates[2].max((controls.mu - previous.mu).abs() / dt_bar);

        if let Some(every) = output_every {
            if step_idx % every == 0 {
                trajectory.push(TrajectorySample {
                    t_s: step_idx as f64 / spec.sim_rate_hz,
                    state,
                    controls,
                    wind,
                    p_bar: controls.p_bar,
                });
            }
        }
        powers.push(controls.p_bar);

        state = dynamics::step(&state, &controls, &field, params, t_bar, dt_bar)
            .map_err(|e| abort(step_idx, e.into()))?;
        field.tick(dt_bar);
        previous = controls;
    }

    Ok(RunMetrics {
        p_bar_avg: trapezoid_average(&powers),
        p_bar_heading_avg: None,
        benefit: None,
        trajectory,
        max_control_rates: max_rates,
    })
}

/// Trapezoidal average of uniformly spaced samples; exact for constants.
fn trapezoid_average(samples: &[f64]) -> f64 {
    match samples.len() {
        0 => 0.0,
        1 => samples[0],
        n => {
            let interior: f64 = samples[1..n - 1].iter().sum();
            (0.5 * (samples[0] + samples[n - 1]) + interior) / (n - 1) as f64
        }
    }
}

/// Result of a heading sweep: per-heading averages plus the ensemble mean.
#[derive(Debug, Clone)]
pub struct HeadingSweep {
    /// Initial headings, rad.
    pub headings: Vec<f64>,
    /// Per-heading time-averaged power, same order as `headings`.
    pub per_heading_avg: Vec<f64>,
    pub metrics: RunMetrics,
}

/// Runs the scenario from every initial heading in `{0, d_psi0, …, 2π − d_psi0}`
/// and averages the per-run power. Runs execute in parallel; aggregation
/// order is the heading order.
pub fn heading_sweep(spec: &ScenarioSpec, d_psi0: f64) -> Result<HeadingSweep, ScenarioError> {
    if !(d_psi0 > 0.0) {
        return Err(ScenarioError::BadHeadingIncrement(d_psi0));
    }
    let count_exact = dynamics::TWO_PI / d_psi0;
    let count = count_exact.round() as usize;
    if count == 0 || (count as f64 * d_psi0 - dynamics::TWO_PI).abs() > 1e-9 {
        return Err(ScenarioError::BadHeadingIncrement(d_psi0));
    }
    let headings: Vec<f64> = (0..count).map(|i| i as f64 * d_psi0).collect();
    let results: Result<Vec<RunMetrics>, ScenarioError> = headings
        .par_iter()
        .map(|&psi0| {
            let mut run_spec = spec.clone();
            run_spec.initial_state.psi = psi0;
            run_spec.output_rate_hz = None;
            run(&run_spec)
        })
        .collect();
    let results = results?;
    let per_heading_avg: Vec<f64> = results.iter().map(|m| m.p_bar_avg).collect();
    let mean = per_heading_avg.iter().sum::<f64>() / count as f64;
    let mut max_rates = [0.0f64; 3];
    for m in &results {
        for (slot, value) in max_rates.iter_mut().zip(m.max_control_rates) {
            *slot = slot.max(value);
        }
    }
    Ok(HeadingSweep {
        headings,
        per_heading_avg,
        metrics: RunMetrics {
            p_bar_avg: mean,
            p_bar_heading_avg: Some(mean),
            benefit: None,
            trajectory: Vec::new(),
            max_control_rates: max_rates,
        },
    })
}

/// Relative benefit of `candidate` over `reference`:
/// `(P̄⁰ − P̄ⁱ) / P̄⁰` on the heading-averaged power when present, otherwise on
/// the single-run averages.
pub fn benefit(reference: &RunMetrics, candidate: &RunMetrics) -> Result<f64, ScenarioError> {
    let ref_avg = reference.p_bar_heading_avg.unwrap_or(reference.p_bar_avg);
    let cand_avg = candidate.p_bar_heading_avg.unwrap_or(candidate.p_bar_avg);
    if !(ref_avg > 0.0) {
        return Err(ScenarioError::BenefitUndefined(ref_avg));
    }
    Ok((ref_avg - cand_avg) / ref_avg)
}

/// One row of the frequency-sweep table.
#[derive(Debug, Clone)]
pub struct FrequencyPoint {
    pub omega_w_rad_per_ft: f64,
    /// Heading-averaged power of the reference strategy.
    pub reference_avg: Option<f64>,
    /// Heading-averaged power of the adjusted strategy.
    pub candidate_avg: Option<f64>,
    pub benefit: Option<f64>,
    /// Failure description when this frequency could not be evaluated.
    pub error: Option<String>,
}

/// Sweeps the wind spatial frequency: for each ω runs a full heading sweep of
/// both the reference strategy and `spec.kind`, tabulating the benefit in
/// ascending ω order. Per-frequency failures are recorded as gaps.
pub fn frequency_sweep(
    spec: &ScenarioSpec,
    omegas: &[f64],
    d_psi0: f64,
) -> Vec<FrequencyPoint> {
    let mut sorted: Vec<f64> = omegas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("frequencies must be comparable"));
    sorted
        .iter()
        .map(|&omega| {
            let mut wind = spec.wind;
            wind.omega_w_rad_per_ft = omega;
            let mut ref_spec = spec.clone();
            ref_spec.kind = ScenarioKind::Reference;
            ref_spec.wind = wind;
            let mut adj_spec = spec.clone();
            adj_spec.wind = wind;
            let outcome = heading_sweep(&ref_spec, d_psi0).and_then(|ref_sweep| {
                let adj_sweep = heading_sweep(&adj_spec, d_psi0)?;
                let b = benefit(&ref_sweep.metrics, &adj_sweep.metrics)?;
                Ok((ref_sweep, adj_sweep, b))
            });
            match outcome {
                Ok((ref_sweep, adj_sweep, b)) => FrequencyPoint {
                    omega_w_rad_per_ft: omega,
                    reference_avg: ref_sweep.metrics.p_bar_heading_avg,
                    candidate_avg: adj_sweep.metrics.p_bar_heading_avg,
                    benefit: Some(b),
                    error: None,
                },
                Err(e) => FrequencyPoint {
                    omega_w_rad_per_ft: omega,
                    reference_avg: None,
                    candidate_avg: None,
                    benefit: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}
