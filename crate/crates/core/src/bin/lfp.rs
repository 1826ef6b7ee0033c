use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lfp_ap::equilibrium::build_equilibrium;
use lfp_ap::harness::{run_cell, run_properties, run_sweep, write_series, write_summary, write_sweep_csv, Summary, SweepConfig};
use lfp_ap::Error;

#[derive(Parser)]
#[command(name = "lfp", version, about = "Micro-macro solver for the scaled Levy-Fokker-Planck equation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps, 0 for all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Seed for the randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Config override `key=value`, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// One cell: the first eps and dt of the config.
    Run,
    /// Every (eps, dt) cell.
    Sweep,
    /// The property suites.
    Check,
    /// Tabulate the equilibrium and its transform.
    Equilibrium,
}

fn load(common: &Common) -> lfp_ap::Result<SweepConfig> {
    let mut cfg = SweepConfig::from_path(common.config.as_deref(), &common.set)?;
    if let Some(out) = &common.out {
        cfg.output.dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> lfp_ap::Result<bool> {
    let cfg = load(&cli.common)?;
    let dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&dir)?;
    match cli.cmd {
        Cmd::Run => {
            let (eps, dt) = (cfg.eps[0], cfg.dt[0]);
            let eq = build_equilibrium(&cfg.grid, cfg.order()?)?;
            let out = run_cell(&cfg, eps, dt, &eq)?;
            write_sweep_csv(std::slice::from_ref(&out.record), &dir.join("sweep.csv"))?;
            write_series(&out.series, &dir.join("series_0.csv"))?;
            if cfg.output.checkpoint {
                out.state.write_checkpoint(&dir.join("checkpoint_0.csv"))?;
            }
            let r = &out.record;
            println!(
                "eps={} dt={} regime={} gamma={:.4} err_oracle={:.3e} err_limit={:.3e} mass_drift={:.1e} runtime={:.1}s",
                eps,
                dt,
                r.regime,
                r.gamma.unwrap_or(f64::NAN),
                r.err_oracle.unwrap_or(f64::NAN),
                r.err_limit.unwrap_or(f64::NAN),
                r.mass_drift.unwrap_or(f64::NAN),
                r.runtime_s
            );
            Ok(true)
        }
        Cmd::Sweep => {
            let report = run_sweep(&cfg, cli.common.jobs)?;
            write_sweep_csv(&report.records, &dir.join("sweep.csv"))?;
            let summary = Summary {
                config: &cfg,
                order_dt: Some(&report.order_dt),
                slope_eps: Some(&report.slope_eps),
                uniformity: report.uniformity,
                failures: report.failures(),
                suites: None,
            };
            write_summary(&summary, &dir.join("summary.json"))?;
            for r in &report.records {
                println!(
                    "eps={:<10} dt={:<8} {:<8} err_oracle={:<10} {}",
                    r.eps,
                    r.dt,
                    r.regime,
                    r.err_oracle.map(|e| format!("{e:.3e}")).unwrap_or_default(),
                    r.status
                );
            }
            for (eps, order) in &report.order_dt {
                println!("order in dt at eps={eps}: {order:.3}");
            }
            Ok(report.failures() == 0)
        }
        Cmd::Check => {
            let report = run_properties(&cfg, None)?;
            for s in &report.suites {
                println!("{} {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.message);
            }
            let summary = Summary {
                config: &cfg,
                order_dt: None,
                slope_eps: None,
                uniformity: None,
                failures: report.suites.iter().filter(|s| !s.passed).count(),
                suites: Some(&report.suites),
            };
            write_summary(&summary, &dir.join("summary.json"))?;
            Ok(report.all_passed())
        }
        Cmd::Equilibrium => {
            let table = build_equilibrium(&cfg.grid, cfg.order()?)?;
            table.write_csv(&dir.join("equilibrium_v.csv"), &dir.join("equilibrium_k.csv"))?;
            println!(
                "s={} mass={:.12} tail_mass={:.3e} tail_constant={:.6} (analytic {:.6})",
                cfg.s,
                table.discrete_mass(),
                table.tail_mass_estimate(),
                table.tail_constant,
                table.analytic_tail_constant()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
