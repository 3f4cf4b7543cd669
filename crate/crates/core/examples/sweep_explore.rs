//! Frequency-sweep exploration: benefit curves for candidate wind-amplitude
//! defaults, at reduced fidelity for speed.

use windguide::scenario::{frequency_sweep, ScenarioKind, ScenarioSpec};
use windguide::windfield::WindFieldParams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let flight_time: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(300.0);
    let heading_step_deg: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(15.0);
    let omegas = [0.002, 0.005, 0.01, 0.02, 0.035, 0.05, 0.08, 0.12, 0.2];

    for w_m in [5.0, 10.0, 15.0, 20.0] {
        let wind = WindFieldParams::sinusoidal(w_m, 0.0, 0.05);
        let mut spec = ScenarioSpec::with_defaults(ScenarioKind::Adjusted, wind);
        spec.flight_time_s = flight_time;
        let table = frequency_sweep(&spec, &omegas, heading_step_deg.to_radians());
        println!("w_m = {w_m} ft/s  (flight {flight_time} s, heading step {heading_step_deg} deg)");
        for point in &table {
            match (point.benefit, &point.error) {
                (Some(b), _) => println!(
                    "  omega {:7.3} rad/ft  ref {:.6}  adj {:.6}  benefit {:+.3}%",
                    point.omega_w_rad_per_ft,
                    point.reference_avg.unwrap(),
                    point.candidate_avg.unwrap(),
                    100.0 * b
                ),
                (None, Some(e)) => {
                    println!("  omega {:7.3} rad/ft  ERROR {e}", point.omega_w_rad_per_ft)
                }
                _ => {}
            }
        }
    }
}
