//! Time-step refinement in the kinetic regime against the exact solution.

use std::f64::consts::PI;
use std::time::Instant;

use lfp_ap::equilibrium::build_equilibrium;
use lfp_ap::fracops::ResolventQuadrature;
use lfp_ap::metrics::{observed_order, weighted_error, NormSpec};
use lfp_ap::oracle::{exact_field, InitialData, RhoProfile, VelocityProfile};
use lfp_ap::scheme::{decompose_initial, recompose_f, SimParams, Stepper};
use lfp_ap::{FracOrder, GridSpec};

fn main() -> lfp_ap::Result<()> {
    let s = FracOrder::new(0.5)?;
    let eps = 0.8;
    let grid = GridSpec::new(2.0 * PI, 32, 400.0, 4096)?;
    let eq = build_equilibrium(&grid, s)?;
    let init = InitialData::new(RhoProfile::Gaussian { mass: 1.0, center: PI, width: 0.5 }, VelocityProfile::Equilibrium, eps, s)?;
    let t_final = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let reference = exact_field(t_final, &init, &grid);
    let mut pairs = Vec::new();
    for dt in [4e-3, 2e-3, 1e-3, 5e-4] {
        let clock = Instant::now();
        let p = SimParams::new(s, eps, dt, t_final, 0.1, grid)?;
        let stepper = Stepper::new(p, ResolventQuadrature::default())?;
        let mut st = decompose_initial(&init, &p);
        for _ in 0..p.n_steps() {
            st = stepper.step(&st);
        }
        let f = recompose_f(&st, &p);
        let err = weighted_error(&f, &reference, NormSpec::weighted(2.0), &eq, &grid)?;
        let l2 = weighted_error(&f, &reference, NormSpec::l2(), &eq, &grid)?;
        println!("dt = {dt:.1e}  gamma = {:.2}  weighted error = {err:.4e}  l2 = {l2:.4e}  ({:.1?})", stepper.policy.gamma, clock.elapsed());
        pairs.push((dt, err));
    }
    let fit = observed_order(&pairs)?;
    println!("observed order {:.3} (max fit deviation {:.1}%)", fit.slope, 100.0 * fit.residual);
    Ok(())
}
