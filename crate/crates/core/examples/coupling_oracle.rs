//! Closed-form coupling spectrum against the direct singular-integral
//! quadrature, and the ε-scaling of its `L²_{M^{-1}}` norm.

use std::f64::consts::PI;

use lfp_ap::coupling::{coupling_scaling_probe, quadrature_discrepancy};
use lfp_ap::equilibrium::build_equilibrium;
use lfp_ap::grid::x_modes;
use lfp_ap::oracle::RhoProfile;
use lfp_ap::{FracOrder, GridSpec};

fn main() -> lfp_ap::Result<()> {
    let grid = GridSpec::new(2.0 * PI, 32, 400.0, 4096)?;
    let rho = RhoProfile::Gaussian { mass: 1.0, center: PI, width: 0.5 };
    let h_hat: Vec<_> = x_modes(&grid).iter().map(|&xi| rho.hat(xi)).collect();
    for s in [0.5, 0.75] {
        let s = FracOrder::new(s)?;
        let eq = build_equilibrium(&grid, s)?;
        let t = std::time::Instant::now();
        let d = quadrature_discrepancy(&h_hat, 0.1, &grid, s, &eq)?;
        println!("s = {:.2}: quadrature vs closed form, relative L2(1/M) = {d:.3e} ({:.1?})", s.get(), t.elapsed());
        let eps = [0.4, 0.2, 0.1, 0.05];
        let (slope, norms) = coupling_scaling_probe(&h_hat, &grid, s, &eq, &eps)?;
        for (e, n) in eps.iter().zip(&norms) {
            println!("  eps = {e:<5} |I|_(1/M) = {n:.4e}");
        }
        println!("  fitted slope {slope:.3}");
    }
    Ok(())
}
