//! Gain-tuning scratch harness: prints 2% settling times for heading and
//! airspeed step commands across gains and operating speeds.

use windguide::airframe::AircraftParams;
use windguide::dynamics::{step, wind_rates, State};
use windguide::tracking::{clip_magnitudes, control_commands, saturate, wrap_angle, TrackingGains, VelocityCommand};
use windguide::windfield::WindField;

fn settle_time(
    v0: f64,
    psi0: f64,
    cmd: VelocityCommand,
    gains: &TrackingGains,
    err_of: impl Fn(&State) -> f64,
    band: f64,
    horizon_steps: usize,
) -> Option<f64> {
    let p = AircraftParams::default();
    let field = WindField::zero();
    let dt = 0.02 * 32.174 / 134.5;
    let mut state = State {
        v_bar: v0,
        psi: psi0,
        gamma: 0.0,
        x_bar: 0.0,
        y_bar: 0.0,
        h_bar: 26.0,
    };
    let mut previous = clip_magnitudes(
        &control_commands(&state, &cmd, &Default::default(), gains, &p).unwrap(),
        &p,
    );
    let mut settled_at: Option<usize> = None;
    let mut t = 0.0;
    for k in 0..horizon_steps {
        let wind = field.advect(&state, t);
        let rates = wind_rates(&state, &wind);
        let commanded = control_commands(&state, &cmd, &rates, gains, &p).unwrap_or(previous);
        let controls = saturate(&commanded, &previous, &p, dt);
        state = step(&state, &controls, &field, &p, t, dt).unwrap();
        previous = controls;
        t += dt;
        if err_of(&state).abs() <= band {
            if settled_at.is_none() {
                settled_at = Some(k);
            }
        } else {
            settled_at = None;
        }
    }
    settled_at.map(|k| k as f64 * 0.02)
}

fn main() {
    let step_rad = 30f64.to_radians();
    let dv = 5.0 / 134.5;
    println!("heading 30deg step, 2% band:");
    for &v0 in &[0.4303, 0.46, 0.5, 0.55, 0.6, 0.7, 0.8, 0.95] {
        for &k_psi in &[3.6, 3.8, 4.0, 4.2, 4.4, 4.6, 4.8, 5.0, 5.2] {
            let gains = TrackingGains {
                k_psi,
                ..TrackingGains::default()
            };
            let cmd = VelocityCommand {
                v_bar_c: v0,
                psi_c: 1.0 + step_rad,
                gamma_c: 0.0,
            };
            let t = settle_time(
                v0,
                1.0,
                cmd,
                &gains,
                |s| wrap_angle(s.psi - cmd.psi_c),
                0.02 * step_rad,
                1500,
            );
            print!("  v={v0:.3} k_psi={k_psi:.1}: {:?}", t.map(|x| (x * 100.0).round() / 100.0));
        }
        println!();
    }
    println!("airspeed 5 ft/s step, 2% band:");
    for &v0 in &[0.4303, 0.6, 0.8] {
        for &k_v in &[2.0, 3.0, 4.0, 5.0, 6.0, 8.0] {
            let gains = TrackingGains {
                k_v,
                ..TrackingGains::default()
            };
            let cmd = VelocityCommand {
                v_bar_c: v0 + dv,
                psi_c: 1.0,
                gamma_c: 0.0,
            };
            let t = settle_time(
                v0,
                1.0,
                cmd,
                &gains,
                |s| s.v_bar - cmd.v_bar_c,
                0.02 * dv,
                1500,
            );
            print!("  v={v0:.3} k_v={k_v:.1}: {:?}", t.map(|x| (x * 100.0).round() / 100.0));
        }
        println!();
    }
}
