//! A small (ε, Δt) sweep written as CSV and JSON. Pass a TOML file to
//! replace the built-in configuration.

use lfp_ap::harness::{run_sweep, write_summary, write_sweep_csv, Summary, SweepConfig};

const CONFIG: &str = r#"
eps = [0.8, 0.6]
dt = [4e-3, 2e-3, 1e-3]
t_final = 0.3

[grid]
nx = 32

[output]
time_series = true
"#;

fn main() -> lfp_ap::Result<()> {
    let mut cfg = match std::env::args().nth(1) {
        Some(path) => SweepConfig::from_path(Some(path.as_ref()), &[])?,
        None => SweepConfig::from_toml_str(CONFIG, &[])?,
    };
    cfg.output.dir = std::env::temp_dir().join("lfp_sweep");
    std::fs::create_dir_all(&cfg.output.dir)?;
    let report = run_sweep(&cfg, 0)?;
    write_sweep_csv(&report.records, &cfg.output.dir.join("sweep.csv"))?;
    let summary = Summary {
        config: &cfg,
        order_dt: Some(&report.order_dt),
        slope_eps: Some(&report.slope_eps),
        uniformity: report.uniformity,
        failures: report.failures(),
        suites: None,
    };
    write_summary(&summary, &cfg.output.dir.join("summary.json"))?;
    for r in &report.records {
        println!("eps = {:<4} dt = {:<6} {:<3} err {:.3e}  {}", r.eps, r.dt, r.regime, r.err_oracle.unwrap_or(f64::NAN), r.status);
    }
    println!("orders in dt: {:?}", report.order_dt);
    println!("results in {}", cfg.output.dir.display());
    Ok(())
}
