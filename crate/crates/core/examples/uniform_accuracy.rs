//! Fixed time step across the kinetic-to-diffusive range of ε.

use std::f64::consts::PI;
use std::time::Instant;

use lfp_ap::equilibrium::build_equilibrium;
use lfp_ap::fracops::ResolventQuadrature;
use lfp_ap::metrics::{weighted_error, NormSpec};
use lfp_ap::oracle::{exact_field, limit_field, InitialData, RhoProfile, VelocityProfile};
use lfp_ap::scheme::{decompose_initial, recompose_f, SimParams, Stepper};
use lfp_ap::{FracOrder, GridSpec};

fn main() -> lfp_ap::Result<()> {
    let s = FracOrder::new(0.5)?;
    let dt = 2e-3;
    let t_final = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let grid = GridSpec::new(2.0 * PI, 32, 400.0, 4096)?;
    let eq = build_equilibrium(&grid, s)?;
    let norm = NormSpec::weighted(2.0);
    for eps in [0.8, 0.2, 0.05, 0.0125, 1e-3] {
        let clock = Instant::now();
        let init = InitialData::new(RhoProfile::Gaussian { mass: 1.0, center: PI, width: 0.5 }, VelocityProfile::Equilibrium, eps, s)?;
        let p = SimParams::new(s, eps, dt, t_final, 0.1, grid)?;
        let stepper = Stepper::new(p, ResolventQuadrature::default())?;
        let mut st = decompose_initial(&init, &p);
        for _ in 0..p.n_steps() {
            st = stepper.step(&st);
        }
        let f = recompose_f(&st, &p);
        let e_exact = weighted_error(&f, &exact_field(t_final, &init, &grid), norm, &eq, &grid)?;
        let e_limit = weighted_error(&f, &limit_field(t_final, &init, &grid), norm, &eq, &grid)?;
        println!(
            "eps = {eps:<7} regime {:<8} gamma = {:<9.3} error vs exact {e_exact:.4e}  vs limit {e_limit:.4e}  ({:.1?})",
            stepper.policy.regime.to_string(),
            stepper.policy.gamma,
            clock.elapsed()
        );
    }
    Ok(())
}
