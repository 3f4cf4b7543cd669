//! Per-update diagnostics of one adjusted flight against its reference.

use windguide::airframe::GuidanceConfig;
use windguide::dynamics::{self, Controls};
use windguide::guidance::{self, ProjectedPowerInputs};
use windguide::scenario::{run, ScenarioKind, ScenarioSpec};
use windguide::tracking::{self, TrackingGains, VelocityCommand};
use windguide::windfield::{WindField, WindFieldParams};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let omega: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.005);
    let w_m: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let flight: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(120.0);

    let wind = WindFieldParams::sinusoidal(w_m, 0.0, omega);
    let heading_deg: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(30.0);
    let mut spec = ScenarioSpec::with_defaults(ScenarioKind::Adjusted, wind);
    spec.flight_time_s = flight;
    spec.initial_state.psi = heading_deg.to_radians();

    let mut ref_spec = spec.clone();
    ref_spec.kind = ScenarioKind::Reference;
    let ref_metrics = run(&ref_spec).unwrap();
    println!("reference avg power: {:.6}", ref_metrics.p_bar_avg);

    // Re-run the adjusted scenario by hand with prints.
    let basis = spec.basis;
    let p = spec.aircraft;
    let gains = TrackingGains::default();
    let cfg = GuidanceConfig::default_for(&basis);
    let dt = basis.time_to_normalized(1.0 / spec.sim_rate_hz);
    let n_steps = (spec.flight_time_s * spec.sim_rate_hz) as usize;
    let mut field = WindField::from_params(&spec.wind, &basis).unwrap();
    let mut state = spec.initial_state;
    let mut cmd = VelocityCommand {
        v_bar_c: guidance::reference_airspeed(&p),
        psi_c: state.psi,
        gamma_c: 0.0,
    };
    let mut previous = Controls {
        p_bar: 0.04,
        cl: 1.2,
        mu: 0.0,
    };
    let mut interval_power = 0.0;
    let mut interval_count = 0;
    let mut last_report: Option<(f64, f64, f64, f64)> = None;
    let mut total_power = 0.0;

    for k in 0..n_steps {
        let t = k as f64 * dt;
        let wind_sample = field.advect(&state, t);
        if k % 200 == 0 {
            if let Some((pred_adj, pred_zero, dv, dpsi)) = last_report.take() {
                println!(
                    "    realized avg over interval: {:.6}  (predicted adj {:.6} zero {:.6}, dv {:+.4} dpsi {:+.3})",
                    interval_power / interval_count.max(1) as f64,
                    pred_adj,
                    pred_zero,
                    dv,
                    dpsi
                );
            }
            interval_power = 0.0;
            interval_count = 0;
            let inputs = ProjectedPowerInputs::new(state, wind_sample, cfg.dt_update).unwrap();
            let adj = guidance::optimal_adjustment(&inputs, &cfg, &p).unwrap();
            let rates = dynamics::wind_rates(&state, &wind_sample);
            let pred_zero = guidance::projected_power(&inputs, 0.0, 0.0, &p).unwrap();
            let pred_adj =
                guidance::projected_power(&inputs, adj.d_v_bar, adj.d_psi, &p).unwrap();
            println!(
                "t {:6.1}s psi {:5.1}deg v {:.4} Wv' {:+.4} | dv {:+.4} dpsi {:+6.1}deg clamp {:?} lambda {:.1e}",
                k as f64 / spec.sim_rate_hz,
                state.psi.to_degrees(),
                state.v_bar,
                rates.w_v_rate,
                adj.d_v_bar,
                adj.d_psi.to_degrees(),
                adj.clamped,
                adj.lambda_used,
            );
            cmd.v_bar_c = state.v_bar + adj.d_v_bar;
            cmd.psi_c = state.psi + adj.d_psi;
            last_report = Some((pred_adj, pred_zero, adj.d_v_bar, adj.d_psi));
        }
        let rates = dynamics::wind_rates(&state, &wind_sample);
        let controls = match tracking::control_commands(&state, &cmd, &rates, &gains, &p) {
            Ok(c) => tracking::saturate(&c, &previous, &p, dt),
            Err(_) => previous,
        };
        interval_power += controls.p_bar;
        total_power += controls.p_bar;
        interval_count += 1;
        state = dynamics::step(&state, &controls, &field, &p, t, dt).unwrap();
        field.tick(dt);
        previous = controls;
    }
    println!("adjusted avg power: {:.6}", total_power / n_steps as f64);
    println!(
        "zero-wind steady power at reference speed: {:.6}",
        guidance::steady_level_power(guidance::reference_airspeed(&p), 0.0, &p).unwrap()
    );
}
