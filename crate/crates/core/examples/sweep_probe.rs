// Scratch probe for tuning the default sweep configuration. Prints the
// per-record integrals, impulse fractions, and the fitted exponent.

use becrad::experiments::{run_scaling_sweep, ScalingSweepConfig};
use becrad::PhysicalParams;
use std::time::Instant;

fn main() {
    let cfg = ScalingSweepConfig::default();
    let params = PhysicalParams::default();
    let start = Instant::now();
    let result = run_scaling_sweep(&cfg, &params).unwrap();
    let elapsed = start.elapsed();
    for r in &result.records {
        println!(
            "sigma {:7.3}  n {:6}  steps {:6}  i_hydro {:.6e}  i_inc {:.6e}  impulse {:+.6e} ({:.3}% of p)  drift {:.2e}  viol {:?}",
            r.sigma,
            r.n_points,
            r.n_steps,
            r.i_hydro,
            r.i_incoherent,
            r.impulse,
            100.0 * r.impulse.abs() / (params.mass * cfg.drift_velocity),
            r.norm_drift,
            r.violations
        );
    }
    println!(
        "exponent {:.4}  inc spread {:.4}%  impulse spread {:.4}%  elapsed {:.1?}",
        result.fitted_exponent,
        100.0 * result.incoherent_spread,
        100.0 * result.impulse_spread,
        elapsed
    );
    for pair in result.records.windows(2) {
        println!(
            "  ratio i_hydro({:.2})/i_hydro({:.2}) = {:.4}",
            pair[1].sigma,
            pair[0].sigma,
            pair[1].i_hydro / pair[0].i_hydro
        );
    }
}
