//! Acceptance criteria A1-A9. Each test prints one `A<n> PASS|FAIL` line.
//!
//! Run with `cargo test --test acceptance`; extra arguments select criteria
//! by id (`cargo test --test acceptance -- A6 A9`). Criteria run one at a
//! time so the reported runtimes are not shared; the time-stepping runs of
//! A2-A4 are cached and reused by A5. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use lfp_ap::coupling::{coupling_scaling_probe, quadrature_discrepancy};
use lfp_ap::equilibrium::{build_equilibrium, derivative_ratio_check, equilibrium_hat};
use lfp_ap::fracops::{lfp_resolvent, ResolventQuadrature};
use lfp_ap::grid::x_modes;
use lfp_ap::harness::{run_cell, run_sweep, ErrorRecord, SweepConfig};
use lfp_ap::metrics::{observed_order, weighted_error};
use lfp_ap::oracle::{continuous_gap_norm, elementary_inequality_suite, exponent_gap_probe, InitialData, RhoProfile, VelocityProfile};
use lfp_ap::scheme::{decompose_initial, recompose_f, SchemeState, Stepper};
use lfp_ap::{FracOrder, GridSpec, SpectralField};

fn grid() -> GridSpec {
    GridSpec::new(2.0 * PI, 32, 400.0, 4096).unwrap()
}

fn half() -> FracOrder {
    FracOrder::new(0.5).unwrap()
}

fn gaussian() -> RhoProfile {
    RhoProfile::Gaussian { mass: 1.0, center: PI, width: 0.5 }
}

fn config(eps: &[f64], dt: &[f64]) -> SweepConfig {
    let c = SweepConfig {
        s: 0.5,
        beta: 0.1,
        b: Some(2.0),
        t_final: 1.0,
        grid: grid(),
        eps: eps.to_vec(),
        dt: dt.to_vec(),
        ..Default::default()
    };
    c.validate().unwrap();
    c
}

fn report(id: &str, pass: bool, elapsed: Duration, limit: Duration, detail: String) -> bool {
    let ok = pass && elapsed <= limit;
    println!("{id} {}: {detail}; runtime {:.1}s (limit {}s)", if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64(), limit.as_secs());
    ok
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

struct Gap {
    eps: Vec<f64>,
    gaps: Vec<f64>,
}

fn a1_gaps() -> &'static Gap {
    static GAP: OnceLock<Gap> = OnceLock::new();
    GAP.get_or_init(|| {
        let eps = vec![0.2, 0.1, 0.05, 0.025];
        let gaps = eps
            .iter()
            .map(|&e| {
                let init = InitialData::new(gaussian(), VelocityProfile::Equilibrium, e, half()).unwrap();
                continuous_gap_norm(1.0, &init, &grid()).unwrap()
            })
            .collect();
        Gap { eps, gaps }
    })
}

fn a1_limit_rate() -> bool {
    let clock = Instant::now();
    let gap = a1_gaps();
    let pairs: Vec<(f64, f64)> = gap.eps.iter().copied().zip(gap.gaps.iter().copied()).collect();
    let fit = observed_order(&pairs).unwrap();
    let pass = (0.35..=0.65).contains(&fit.slope) && fit.residual <= 0.2;
    let pass = report(
        "A1",
        pass,
        clock.elapsed(),
        Duration::from_secs(60),
        format!("gaps [{}], slope {:.3} (need [0.35, 0.65]), residual {:.3} (need <= 0.2)", fmt_list(&gap.gaps), fit.slope, fit.residual),
    );
    pass
}

struct Timed<T> {
    value: T,
    elapsed: Duration,
}

fn timed<T>(f: impl FnOnce() -> T) -> Timed<T> {
    let clock = Instant::now();
    let value = f();
    Timed { value, elapsed: clock.elapsed() }
}

fn a2_runs() -> &'static Timed<Vec<ErrorRecord>> {
    static RUNS: OnceLock<Timed<Vec<ErrorRecord>>> = OnceLock::new();
    RUNS.get_or_init(|| timed(|| run_sweep(&config(&[0.8], &[4e-3, 2e-3, 1e-3, 5e-4]), 0).unwrap().records))
}

fn a3_runs() -> &'static Timed<Vec<ErrorRecord>> {
    static RUNS: OnceLock<Timed<Vec<ErrorRecord>>> = OnceLock::new();
    RUNS.get_or_init(|| timed(|| run_sweep(&config(&[0.8, 0.2, 0.05, 0.0125, 1e-3], &[2e-3]), 0).unwrap().records))
}

struct LimitRun {
    eps: f64,
    regime: String,
    gamma: f64,
    g_l2: f64,
    g_weighted: f64,
    mass_drift: f64,
}

fn a4_runs() -> &'static Timed<Vec<LimitRun>> {
    static RUNS: OnceLock<Timed<Vec<LimitRun>>> = OnceLock::new();
    RUNS.get_or_init(|| {
        timed(|| {
            let two_s = half().two_s();
            let eps: Vec<f64> = [1e-3f64, 1e-4, 1e-5].iter().map(|e2s| e2s.powf(1.0 / two_s)).collect();
            let cfg = config(&eps, &[1e-2]);
            let eq = build_equilibrium(&cfg.grid, half()).unwrap();
            eps.par_iter()
                .map(|&e| {
                    let out = run_cell(&cfg, e, 1e-2, &eq).unwrap();
                    let f = recompose_f(&out.state, &out.params);
                    let macro_only = SchemeState {
                        g_hat: SpectralField::zeros(&cfg.grid, out.state.g_hat.rep),
                        ..out.state.clone()
                    };
                    let fm = recompose_f(&macro_only, &out.params);
                    let g = &out.state.g_hat;
                    let g_l2 = (g.l2_norm_sq() * cfg.grid.dk() / (2.0 * PI) / cfg.grid.lx).sqrt();
                    LimitRun {
                        eps: e,
                        regime: out.record.regime.clone(),
                        gamma: out.record.gamma.unwrap(),
                        g_l2,
                        g_weighted: weighted_error(&f, &fm, cfg.norm_spec(), &eq, &cfg.grid).unwrap(),
                        mass_drift: out.record.mass_drift.unwrap(),
                    }
                })
                .collect()
        })
    })
}

fn errors(records: &[ErrorRecord]) -> Vec<f64> {
    records.iter().map(|r| r.err_oracle.unwrap_or(f64::NAN)).collect()
}

fn a2_regime_one_consistency() -> bool {
    let runs = a2_runs();
    let recs = &runs.value;
    assert!(recs.iter().all(|r| r.ok()), "failed cells");
    assert!(recs.iter().all(|r| r.regime == "I"));
    let e = errors(recs);
    let monotone = e.windows(2).all(|w| w[1] < w[0]);
    let pairs: Vec<(f64, f64)> = recs.iter().map(|r| (r.dt, r.err_oracle.unwrap())).collect();
    let fit = observed_order(&pairs).unwrap();
    let pass = monotone && fit.slope >= 0.25;
    let pass = report(
        "A2",
        pass,
        runs.elapsed,
        Duration::from_secs(600),
        format!("errors [{}], monotone {monotone}, order {:.3} (need >= 0.25)", fmt_list(&e), fit.slope),
    );
    pass
}

fn a3_uniform_accuracy() -> bool {
    let runs = a3_runs();
    let recs = &runs.value;
    assert!(recs.iter().all(|r| r.ok()), "failed cells");
    let e = errors(recs);
    let growth = recs.iter().map(|r| r.norm_growth.unwrap()).fold(0.0, f64::max);
    let max = e.iter().copied().fold(0.0, f64::max);
    let min = e.iter().copied().fold(f64::INFINITY, f64::min);
    let regimes: Vec<&str> = recs.iter().map(|r| r.regime.as_str()).collect();
    let limits: Vec<f64> = recs.iter().map(|r| r.err_limit.unwrap()).collect();
    let pass = growth <= 2.0 && max <= 5.0 * min;
    let pass = report(
        "A3",
        pass,
        runs.elapsed,
        Duration::from_secs(600),
        format!(
            "regimes {regimes:?}, errors vs exact [{}], vs limit [{}], max/min {:.1} (need <= 5), norm growth {growth:.3} (need <= 2)",
            fmt_list(&e),
            fmt_list(&limits),
            max / min
        ),
    );
    pass
}

fn a4_discrete_diffusion_limit() -> bool {
    let runs = a4_runs();
    let gap = a1_gaps();
    // C from gap ≈ C ε^s with the exponent fixed at s
    let log_c = gap.eps.iter().zip(&gap.gaps).map(|(e, g)| g.ln() - 0.5 * e.ln()).sum::<f64>() / gap.eps.len() as f64;
    let c = log_c.exp();
    let r = &runs.value;
    let regimes_ok = r.iter().all(|x| x.regime == "II_small" && (x.gamma - 3f64.sqrt()).abs() < 1e-12);
    let decreasing = r.windows(2).all(|w| w[1].g_l2 < w[0].g_l2);
    let bounds: Vec<f64> = r.iter().map(|x| 2.0 * c * x.eps.sqrt()).collect();
    let within = r.iter().zip(&bounds).all(|(x, b)| x.g_weighted <= *b);
    let pass = regimes_ok && decreasing && within;
    let pass = report(
        "A4",
        pass,
        runs.elapsed,
        Duration::from_secs(300),
        format!(
            "L2 of g [{}] decreasing {decreasing}; weighted micro part [{}] vs bounds 2C eps^s [{}] (C = {c:.4})",
            fmt_list(&r.iter().map(|x| x.g_l2).collect::<Vec<_>>()),
            fmt_list(&r.iter().map(|x| x.g_weighted).collect::<Vec<_>>()),
            fmt_list(&bounds)
        ),
    );
    pass
}

fn a5_mass_conservation() -> bool {
    let clock = Instant::now();
    let mut drifts: Vec<f64> = a2_runs().value.iter().chain(&a3_runs().value).map(|r| r.mass_drift.unwrap()).collect();
    drifts.extend(a4_runs().value.iter().map(|x| x.mass_drift));
    let worst = drifts.iter().copied().fold(0.0, f64::max);
    let pass = worst <= 1e-8;
    let pass = report(
        "A5",
        pass,
        clock.elapsed(),
        Duration::from_secs(1800),
        format!("{} runs, worst relative mass drift {worst:.2e} (need <= 1e-8)", drifts.len()),
    );
    pass
}

fn a6_resolvent_kernel_identity() -> bool {
    let clock = Instant::now();
    let g = grid();
    let mut worst: f64 = 0.0;
    for s in [0.25, 0.5, 0.75] {
        let so = FracOrder::new(s).unwrap();
        let mh: Vec<Complex64> = g.k_modes().iter().map(|&k| Complex64::new(equilibrium_hat(k, so), 0.0)).collect();
        for lambda in [0.5, 1.0, 10.0] {
            let out = lfp_resolvent(&mh, lambda, &g, so, ResolventQuadrature::default()).unwrap();
            let err = out.iter().zip(&mh).map(|(a, b)| (a - b / lambda).norm() / (b.re / lambda)).fold(0.0, f64::max);
            worst = worst.max(err);
        }
    }
    let pass = worst <= 1e-8;
    report("A6", pass, clock.elapsed(), Duration::from_secs(10), format!("worst relative sup error {worst:.2e} (need <= 1e-8)"));
    pass
}

fn a7_equilibrium_closed_form() -> bool {
    let clock = Instant::now();
    let g = grid();
    let t = build_equilibrium(&g, half()).unwrap();
    let sup = g
        .v_nodes()
        .iter()
        .zip(&t.m_values)
        .filter(|(v, _)| v.abs() <= g.lv / 4.0)
        .map(|(v, m)| (m - 1.0 / (PI * (1.0 + v * v))).abs())
        .fold(0.0, f64::max);
    let ratio = derivative_ratio_check(&t, 1).unwrap();
    let pass = sup <= 1e-6 && (ratio - 1.0).abs() <= 1e-3;
    let pass = report(
        "A7",
        pass,
        clock.elapsed(),
        Duration::from_secs(10),
        format!("sup error vs Cauchy {sup:.2e} (need <= 1e-6), derivative ratio {ratio:.6} (need 1 +- 1e-3)"),
    );
    pass
}

fn a8_probe_suites() -> bool {
    let clock = Instant::now();
    let violations = elementary_inequality_suite(100_000, 0).unwrap();
    let gap_slope = exponent_gap_probe(1.0, 1.0, half(), 1.0, &[0.4, 0.2, 0.1, 0.05]).unwrap().slope.unwrap_or(f64::NAN);
    let g = grid();
    let h_hat: Vec<Complex64> = x_modes(&g).iter().map(|&x| gaussian().hat(x)).collect();
    let mut slopes = Vec::new();
    let mut discrepancy = f64::NAN;
    for s in [0.5, 0.75] {
        let so = FracOrder::new(s).unwrap();
        let eq = build_equilibrium(&g, so).unwrap();
        let (slope, _) = coupling_scaling_probe(&h_hat, &g, so, &eq, &[0.4, 0.2, 0.1, 0.05]).unwrap();
        slopes.push((s, slope));
        if s == 0.5 {
            discrepancy = quadrature_discrepancy(&h_hat, 0.1, &g, so, &eq).unwrap();
        }
    }
    let slopes_ok = slopes.iter().all(|(s, sl)| (sl - s).abs() <= 0.15);
    let pass = violations == 0 && gap_slope >= 0.35 && slopes_ok && discrepancy <= 3e-2;
    let pass = report(
        "A8",
        pass,
        clock.elapsed(),
        Duration::from_secs(120),
        format!(
            "inequality violations {violations}, exponent gap slope {gap_slope:.3}, coupling slopes {}, quadrature discrepancy {discrepancy:.2e}",
            slopes.iter().map(|(s, sl)| format!("s={s}: {sl:.3}")).collect::<Vec<_>>().join(", ")
        ),
    );
    pass
}

/// Defect of the step that lands on `t_probe`.
fn defect_at(dt: f64, t_probe: f64) -> f64 {
    let cfg = config(&[0.8], &[dt]);
    let p = cfg.params(0.8, dt).unwrap();
    let init = cfg.initial_data(0.8).unwrap();
    let stepper = Stepper::new(p, cfg.quadrature).unwrap();
    let mut st = decompose_initial(&init, &p);
    let n = (t_probe / dt).round() as usize;
    for _ in 0..n - 1 {
        st = stepper.step(&st);
    }
    let (next, half) = stepper.step_with_half(&st);
    lfp_ap::scheme::splitting_defect(&next.g_hat, &half, &p, 0.0).unwrap()
}

fn a9_splitting_defect_scaling() -> bool {
    let clock = Instant::now();
    let dts = [4e-3, 2e-3];
    let d: Vec<f64> = dts.par_iter().map(|&dt| defect_at(dt, 0.2)).collect();
    let ratio = d[0] / d[1];
    let pass = (1.6..=2.4).contains(&ratio);
    let pass = report(
        "A9",
        pass,
        clock.elapsed(),
        Duration::from_secs(120),
        format!("defects [{}] at t = 0.2, ratio {ratio:.3} (need [1.6, 2.4])", fmt_list(&d)),
    );
    pass
}

fn main() -> std::process::ExitCode {
    let criteria: [(&str, fn() -> bool); 9] = [
        ("A1", a1_limit_rate),
        ("A2", a2_regime_one_consistency),
        ("A3", a3_uniform_accuracy),
        ("A4", a4_discrete_diffusion_limit),
        ("A5", a5_mass_conservation),
        ("A6", a6_resolvent_kernel_identity),
        ("A7", a7_equilibrium_closed_form),
        ("A8", a8_probe_suites),
        ("A9", a9_splitting_defect_scaling),
    ];
    // cargo passes libtest flags such as --nocapture; only bare ids select
    let wanted: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).map(|a| a.to_uppercase()).collect();
    let mut failed = Vec::new();
    for (id, run) in criteria {
        if !wanted.is_empty() && !wanted.iter().any(|w| w == id) {
            continue;
        }
        let ok = std::panic::catch_unwind(run).unwrap_or_else(|_| {
            println!("{id} FAIL: panicked");
            false
        });
        if !ok {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria pass");
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failing {}", failed.join(", "));
        std::process::ExitCode::FAILURE
    }
}
