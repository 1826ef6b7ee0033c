//! Size of the transport correction `g^{n+1} - g^{n+1/2}` on the step that
//! lands at t = 0.2, for halving Δt.

use std::f64::consts::PI;

use lfp_ap::fracops::ResolventQuadrature;
use lfp_ap::oracle::{InitialData, RhoProfile, VelocityProfile};
use lfp_ap::scheme::{decompose_initial, splitting_defect, SimParams, Stepper};
use lfp_ap::{FracOrder, GridSpec};

fn main() -> lfp_ap::Result<()> {
    let s = FracOrder::new(0.5)?;
    let eps = 0.8;
    let grid = GridSpec::new(2.0 * PI, 32, 400.0, 4096)?;
    let init = InitialData::new(RhoProfile::Gaussian { mass: 1.0, center: PI, width: 0.5 }, VelocityProfile::Equilibrium, eps, s)?;
    let mut prev = None;
    for dt in [8e-3, 4e-3, 2e-3, 1e-3] {
        let p = SimParams::new(s, eps, dt, 0.2, 0.1, grid)?;
        let stepper = Stepper::new(p, ResolventQuadrature::default())?;
        let mut st = decompose_initial(&init, &p);
        for _ in 0..p.n_steps() - 1 {
            st = stepper.step(&st);
        }
        let (next, half) = stepper.step_with_half(&st);
        let d0 = splitting_defect(&next.g_hat, &half, &p, 0.0)?;
        let d1 = splitting_defect(&next.g_hat, &half, &p, 0.4)?;
        let ratio = prev.map(|q: f64| format!("{:.3}", q / d0)).unwrap_or_default();
        println!("dt = {dt:<6} defect m=0 {d0:.4e}  m=0.4 {d1:.4e}  ratio {ratio}");
        prev = Some(d0);
    }
    Ok(())
}
