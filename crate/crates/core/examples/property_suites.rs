//! Run the property suites, then again with a corrupted equilibrium to show
//! which of them catch it.

use lfp_ap::harness::{run_properties, Fault, SweepConfig};

fn main() -> lfp_ap::Result<()> {
    let cfg = SweepConfig::from_toml_str("[grid]\nnx = 32\n", &[])?;
    for fault in [None, Some(Fault::NegatedEquilibrium)] {
        println!("fault: {fault:?}");
        let report = run_properties(&cfg, fault)?;
        for s in &report.suites {
            println!("  {:<14} {}  {}", s.name, if s.passed { "pass" } else { "FAIL" }, s.message);
        }
    }
    Ok(())
}
