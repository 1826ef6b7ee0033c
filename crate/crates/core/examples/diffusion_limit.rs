//! Diffusive regime at a fixed, coarse time step: the micro part vanishes
//! with ε and the scheme tracks the limit `ρ(t) M`.

use std::f64::consts::PI;

use lfp_ap::equilibrium::build_equilibrium;
use lfp_ap::fracops::ResolventQuadrature;
use lfp_ap::metrics::{weighted_error, NormSpec};
use lfp_ap::oracle::{limit_field, InitialData, RhoProfile, VelocityProfile};
use lfp_ap::scheme::{decompose_initial, recompose_f, SimParams, Stepper};
use lfp_ap::{FracOrder, GridSpec};

fn main() -> lfp_ap::Result<()> {
    let s = FracOrder::new(0.5)?;
    let dt = 1e-2;
    let grid = GridSpec::new(2.0 * PI, 32, 400.0, 4096)?;
    let eq = build_equilibrium(&grid, s)?;
    for eps in [1e-3, 1e-4, 1e-5] {
        let init = InitialData::new(RhoProfile::Gaussian { mass: 1.0, center: PI, width: 0.5 }, VelocityProfile::Equilibrium, eps, s)?;
        let p = SimParams::new(s, eps, dt, 1.0, 0.1, grid)?;
        let stepper = Stepper::new(p, ResolventQuadrature::default())?;
        let mut st = decompose_initial(&init, &p);
        let m0 = st.mass(&grid);
        for _ in 0..p.n_steps() {
            st = stepper.step(&st);
        }
        let g = (st.g_hat.l2_norm_sq() * grid.dk() / (2.0 * PI) / grid.lx).sqrt();
        let f = recompose_f(&st, &p);
        let e = weighted_error(&f, &limit_field(1.0, &init, &grid), NormSpec::weighted(2.0), &eq, &grid)?;
        println!(
            "eps = {eps:<7} regime {:<8} |g| = {g:.3e}  error vs limit {e:.3e}  mass drift {:.1e}",
            stepper.policy.regime.to_string(),
            (st.mass(&grid) - m0).abs() / m0
        );
    }
    Ok(())
}
