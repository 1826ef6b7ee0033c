//! Tabulate the equilibrium for a few orders and write the s = 1/2 table.

use std::f64::consts::PI;

use lfp_ap::equilibrium::{build_equilibrium, derivative_ratio_check, tail_slope};
use lfp_ap::{FracOrder, GridSpec};

fn main() -> lfp_ap::Result<()> {
    let grid = GridSpec::new(2.0 * PI, 8, 400.0, 4096)?;
    for s in [0.25, 0.5, 0.75] {
        let t = build_equilibrium(&grid, FracOrder::new(s)?)?;
        println!(
            "s = {s:<4} mass {:.6}  tail estimate {:.2e}  tail slope {:.3} (expect {:.2})  |M'|/M {:.4}  |M''|/M {:.4}",
            t.discrete_mass(),
            t.tail_mass_estimate(),
            tail_slope(&t),
            -1.0 - 2.0 * s,
            derivative_ratio_check(&t, 1)?,
            derivative_ratio_check(&t, 2)?,
        );
    }
    let t = build_equilibrium(&grid, FracOrder::new(0.5)?)?;
    let dir = std::env::temp_dir();
    t.write_csv(&dir.join("equilibrium_v.csv"), &dir.join("equilibrium_k.csv"))?;
    println!("wrote {}", dir.join("equilibrium_v.csv").display());
    Ok(())
}
