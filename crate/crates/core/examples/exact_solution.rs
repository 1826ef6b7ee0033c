//! Exact Fourier solution against its diffusion limit: the continuous gap
//! `‖f^ε(t) - ρ(t) M‖` as ε shrinks. For s = 1/2 the two agree exactly where
//! `k` and `εξ` share a sign, so the point value is taken at `k < 0`.

use std::f64::consts::PI;

use lfp_ap::metrics::observed_order;
use lfp_ap::oracle::{continuous_gap_norm, exact_lfp_hat, limit_state_hat, InitialData, RhoProfile, VelocityProfile};
use lfp_ap::{FracOrder, GridSpec};

fn main() -> lfp_ap::Result<()> {
    let s = FracOrder::new(0.5)?;
    let grid = GridSpec::new(2.0 * PI, 64, 400.0, 4096)?;
    let rho = RhoProfile::Gaussian { mass: 1.0, center: PI, width: 0.5 };
    let eps = [0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625];
    let mut pairs = Vec::new();
    for &e in &eps {
        let init = InitialData::new(rho, VelocityProfile::Equilibrium, e, s)?;
        let gap = continuous_gap_norm(1.0, &init, &grid)?;
        let f = exact_lfp_hat(1.0, 1.0, -0.5, &init);
        let l = limit_state_hat(1.0, 1.0, -0.5, &init);
        println!("eps = {e:<8} gap {gap:.4e}   f(1, xi=1, k=-1/2) = {:.6} {:+.6}i  limit {:.6} {:+.6}i", f.re, f.im, l.re, l.im);
        pairs.push((e, gap));
    }
    let fit = observed_order(&pairs[..4])?;
    println!("slope over the first four: {:.3} (residual {:.3})", fit.slope, fit.residual);
    let fit = observed_order(&pairs)?;
    println!("slope over all: {:.3}", fit.slope);
    Ok(())
}
