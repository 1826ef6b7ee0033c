//! The equilibrium lies in the kernel of the Lévy-Fokker-Planck operator, so
//! the resolvent maps `M̂` to `M̂ / λ`. Also applies the resolvent to a
//! Gaussian and checks the residual of `(λ - L̂) ĝ = ŝ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use lfp_ap::equilibrium::equilibrium_hat;
use lfp_ap::fracops::{lfp_apply, Resolvent, ResolventQuadrature};
use lfp_ap::{FracOrder, GridSpec};

fn main() -> lfp_ap::Result<()> {
    let grid = GridSpec::new(2.0 * PI, 8, 128.0 * PI, 4096)?;
    let k = grid.k_modes();
    for s in [0.25, 0.5, 0.75] {
        let s = FracOrder::new(s)?;
        let mh: Vec<Complex64> = k.iter().map(|&k| Complex64::new(equilibrium_hat(k, s), 0.0)).collect();
        let src: Vec<Complex64> = k.iter().map(|&k| Complex64::new((-k * k).exp(), 0.0)).collect();
        for lambda in [0.5, 1.0, 10.0] {
            let r = Resolvent::new(&grid, s, lambda, ResolventQuadrature::default())?;
            let out = r.apply(&mh)?;
            let kernel = out.iter().zip(&mh).map(|(a, b)| (a - b / lambda).norm() / (b.re / lambda)).fold(0.0, f64::max);
            let g = r.apply(&src)?;
            let lg = lfp_apply(&g, &grid, s)?;
            // the k = 0 cusp of |k|^{2s} defeats finite differences nearby
            let resid = g
                .iter()
                .zip(&lg)
                .zip(&src)
                .zip(&k)
                .filter(|(_, k)| k.abs() >= 1.0)
                .map(|(((g, l), f), _)| (lambda * g - l - f).norm())
                .fold(0.0, f64::max);
            println!(
                "s = {:.2} lambda = {lambda:<4} kernel identity {kernel:.2e}  residual on |k| >= 1 {resid:.2e}  band {} entries",
                s.get(),
                r.nnz()
            );
        }
    }
    Ok(())
}
