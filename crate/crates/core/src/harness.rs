//! Experiment configuration, single runs, (ε, Δt) sweeps, property suites
//! and report files.
//!
//! Configuration is TOML; every key has a default. Example:
//!
//! ```toml
//! s = 0.5
//! beta = 0.1
//! eps = [0.8, 0.4]
//! dt = [4e-3, 2e-3, 1e-3]
//! t_final = 1.0
//!
//! [grid]
//! nx = 32
//!
//! [initial.rho]
//! kind = "gaussian"
//! mass = 1.0
//! center = 3.141592653589793
//! width = 0.5
//! ```
//!
//! Report files written under the output directory:
//!
//! * `sweep.csv`: one row per cell with columns
//!   `s, eps, dt, regime, gamma, b, err_oracle, err_limit, order_dt, runtime_s`
//!   followed by `norm, mass_drift, norm_growth, status`. Failed cells keep
//!   their row with `status = failed: <reason>` and empty numbers.
//! * `summary.json`: fitted orders, the uniformity statistic and suite verdicts.
//! * `series_<i>.csv` (optional): `t, mass, h_l2, g_l2, f_l2` per step of cell `i`.
//! * `checkpoint_<i>.csv` (optional): the final state as
//!   `xi_index, k_index, re, im`, where `k_index = -1` rows hold `ĥ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{coupling_scaling_probe, quadrature_discrepancy};
use crate::equilibrium::{build_equilibrium, derivative_ratio_check, EquilibriumTable};
use crate::error::{Error, Result};
use crate::fracops::{commutator_probe, frac_heat_multiplier, lfp_resolvent, Resolvent, ResolventQuadrature};
use crate::grid::{x_modes, GridSpec, SpectralField};
use crate::metrics::{observed_order, weighted_error, NormKind, NormSpec};
use crate::oracle::{
    elementary_inequality_suite, exact_field, exponent_gap_probe, limit_field, InitialData, RhoProfile, VelocityProfile,
};
use crate::order::FracOrder;
use crate::scheme::{decompose_initial, default_t0, recompose_f, select_gamma, SchemeState, SimParams, Stepper};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub rho: RhoProfile,
    pub chi: VelocityProfile,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            rho: RhoProfile::Gaussian { mass: 1.0, center: PI, width: 0.5 },
            chi: VelocityProfile::Equilibrium,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub time_series: bool,
    pub checkpoint: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), time_series: false, checkpoint: false }
    }
}

/// Property suites known to [`run_properties`].
pub const SUITES: [&str; 7] = [
    "inequalities",
    "exponent_gap",
    "m_decay",
    "normalization",
    "coupling",
    "commutator",
    "resolvent",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub s: f64,
    pub beta: f64,
    /// Norm weight exponent; `1 + 2s` when absent.
    pub b: Option<f64>,
    pub eps: Vec<f64>,
    pub dt: Vec<f64>,
    pub t_final: f64,
    /// Assessment start; `max(0.1, n₀Δt)` per cell when absent.
    pub t0: Option<f64>,
    pub lambda2: f64,
    pub norm: NormKind,
    pub grid: GridSpec,
    pub initial: InitialConfig,
    pub quadrature: ResolventQuadrature,
    pub output: OutputConfig,
    pub suites: Vec<String>,
    pub inequality_samples: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            s: 0.5,
            beta: 0.1,
            b: None,
            eps: vec![0.8, 0.4, 0.2, 0.1],
            dt: vec![4e-3, 2e-3, 1e-3, 5e-4],
            t_final: 1.0,
            t0: None,
            lambda2: 5.0,
            norm: NormKind::WeightedMinv,
            grid: GridSpec::default(),
            initial: InitialConfig::default(),
            quadrature: ResolventQuadrature::default(),
            output: OutputConfig::default(),
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            inequality_samples: 100_000,
            seed: 0,
        }
    }
}

impl SweepConfig {
    /// Parse TOML text, then apply `key=value` overrides (dotted keys reach
    /// into tables, values use TOML syntax).
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: SweepConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml_str(&text, overrides)
    }

    pub fn order(&self) -> Result<FracOrder> {
        FracOrder::new(self.s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn b(&self) -> f64 {
        self.b.unwrap_or(1.0 + 2.0 * self.s)
    }

    pub fn norm_spec(&self) -> NormSpec {
        NormSpec { kind: self.norm, b: self.b() }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        self.order()?;
        if self.eps.is_empty() || self.dt.is_empty() {
            return cfg("eps and dt lists must be nonempty".into());
        }
        self.grid.validate().map_err(|e| Error::Config(e.to_string()))?;
        for &eps in &self.eps {
            for &dt in &self.dt {
                let p = self.params(eps, dt).map_err(|e| Error::Config(format!("cell (eps = {eps}, dt = {dt}): {e}")))?;
                select_gamma(&p).map_err(|e| Error::Config(format!("cell (eps = {eps}, dt = {dt}): {e}")))?;
            }
        }
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return cfg(format!("unknown suite '{s}'"));
            }
        }
        Ok(())
    }

    /// Parameters of one cell.
    pub fn params(&self, eps: f64, dt: f64) -> Result<SimParams> {
        let p = SimParams {
            s: self.order()?,
            eps,
            dt,
            t_final: self.t_final,
            beta: self.beta,
            b: self.b(),
            d: self.grid.d,
            grid: self.grid,
            t0: self.t0.unwrap_or_else(|| default_t0(dt)),
            lambda2: self.lambda2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn initial_data(&self, eps: f64) -> Result<InitialData> {
        InitialData::new(self.initial.rho, self.initial.chi, eps, self.order()?)
    }

    /// All `(ε, Δt)` cells in row-major order (ε outer).
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.eps.iter().flat_map(|&e| self.dt.iter().map(move |&d| (e, d))).collect()
    }
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{item}' is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::Config(format!("empty key in '{item}'")))?;
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("'{p}' in '{key}' is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// One sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub s: f64,
    pub eps: f64,
    pub dt: f64,
    pub regime: String,
    pub gamma: Option<f64>,
    pub b: f64,
    pub err_oracle: Option<f64>,
    pub err_limit: Option<f64>,
    pub order_dt: Option<f64>,
    pub runtime_s: f64,
    pub norm: NormKind,
    /// `max_n |mass_n - mass_0| / mass_0`.
    pub mass_drift: Option<f64>,
    /// `max_n ‖f^n‖ / ‖f^0‖` in `L²_{x,v}`.
    pub norm_growth: Option<f64>,
    pub status: String,
}

impl ErrorRecord {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Per-step diagnostics of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub mass: f64,
    pub h_l2: f64,
    pub g_l2: f64,
    pub f_l2: f64,
}

/// Everything a single run produces.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: ErrorRecord,
    pub series: Vec<SeriesRow>,
    pub state: SchemeState,
    pub params: SimParams,
}

fn lattice_l2(f: &SpectralField, grid: &GridSpec) -> f64 {
    (f.l2_norm_sq() * grid.dk() / (2.0 * PI) / grid.lx).sqrt()
}

fn h_l2(h: &[num_complex::Complex64], grid: &GridSpec) -> f64 {
    (h.iter().map(|z| z.norm_sqr()).sum::<f64>() / grid.lx).sqrt()
}

/// Step one cell to `T` and measure it against the exact and limit solutions.
pub fn run_cell(cfg: &SweepConfig, eps: f64, dt: f64, eq: &EquilibriumTable) -> Result<RunOutcome> {
    let clock = Instant::now();
    let p = cfg.params(eps, dt)?;
    let init = cfg.initial_data(eps)?;
    let stepper = Stepper::new(p, cfg.quadrature)?;
    let grid = p.grid;
    let mut st = decompose_initial(&init, &p);
    let m0 = st.mass(&grid);
    let f0 = lattice_l2(&recompose_f(&st, &p), &grid);
    let mut series = vec![SeriesRow { t: 0.0, mass: m0, h_l2: h_l2(&st.h_hat, &grid), g_l2: lattice_l2(&st.g_hat, &grid), f_l2: f0 }];
    let mut drift: f64 = 0.0;
    let mut growth: f64 = 1.0;
    for _ in 0..p.n_steps() {
        st = stepper.step(&st);
        let mass = st.mass(&grid);
        let fl2 = lattice_l2(&recompose_f(&st, &p), &grid);
        if !fl2.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite state at step {}", st.n)));
        }
        drift = drift.max((mass - m0).abs() / m0.abs());
        growth = growth.max(fl2 / f0);
        series.push(SeriesRow { t: st.t, mass, h_l2: h_l2(&st.h_hat, &grid), g_l2: lattice_l2(&st.g_hat, &grid), f_l2: fl2 });
    }
    let f = recompose_f(&st, &p);
    let spec = cfg.norm_spec();
    let err_oracle = weighted_error(&f, &exact_field(st.t, &init, &grid), spec, eq, &grid)?;
    let err_limit = weighted_error(&f, &limit_field(st.t, &init, &grid), spec, eq, &grid)?;
    let record = ErrorRecord {
        s: cfg.s,
        eps,
        dt,
        regime: stepper.policy.regime.to_string(),
        gamma: Some(stepper.policy.gamma),
        b: cfg.b(),
        err_oracle: Some(err_oracle),
        err_limit: Some(err_limit),
        order_dt: None,
        runtime_s: clock.elapsed().as_secs_f64(),
        norm: cfg.norm,
        mass_drift: Some(drift),
        norm_growth: Some(growth),
        status: "ok".into(),
    };
    Ok(RunOutcome { record, series, state: st, params: p })
}

fn failed_record(cfg: &SweepConfig, eps: f64, dt: f64, err: &Error, runtime: f64) -> ErrorRecord {
    let regime = cfg
        .params(eps, dt)
        .and_then(|p| select_gamma(&p))
        .map(|g| g.regime.to_string())
        .unwrap_or_else(|_| "unclassified".into());
    ErrorRecord {
        s: cfg.s,
        eps,
        dt,
        regime,
        gamma: None,
        b: cfg.b(),
        err_oracle: None,
        err_limit: None,
        order_dt: None,
        runtime_s: runtime,
        norm: cfg.norm,
        mass_drift: None,
        norm_growth: None,
        status: format!("failed: {err}"),
    }
}

/// [`run_cell`] with failures turned into records.
pub fn run_single(cfg: &SweepConfig, eps: f64, dt: f64, eq: &EquilibriumTable) -> (ErrorRecord, Option<RunOutcome>) {
    let clock = Instant::now();
    match run_cell(cfg, eps, dt, eq) {
        Ok(out) => (out.record.clone(), Some(out)),
        Err(e) => {
            log::warn!("cell (eps = {eps}, dt = {dt}) failed: {e}");
            (failed_record(cfg, eps, dt, &e, clock.elapsed().as_secs_f64()), None)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub records: Vec<ErrorRecord>,
    /// Order in Δt of `err_oracle`, per ε.
    pub order_dt: BTreeMap<String, f64>,
    /// Slope in ε of `err_oracle`, per Δt.
    pub slope_eps: BTreeMap<String, f64>,
    /// `max_ε` of `err_oracle` at the finest Δt.
    pub uniformity: Option<f64>,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.ok()).count()
    }
}

/// Run every cell on a pool of `jobs` workers (0 = all cores); results keep
/// the config order whatever the scheduling.
pub fn run_sweep(cfg: &SweepConfig, jobs: usize) -> Result<SweepReport> {
    cfg.validate()?;
    let eq = build_equilibrium(&cfg.grid, cfg.order()?)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let outcomes: Vec<(ErrorRecord, Option<RunOutcome>)> =
        pool.install(|| cfg.cells().par_iter().map(|&(e, d)| run_single(cfg, e, d, &eq)).collect());
    let out_dir = &cfg.output.dir;
    if cfg.output.time_series || cfg.output.checkpoint {
        std::fs::create_dir_all(out_dir)?;
    }
    let mut records = Vec::with_capacity(outcomes.len());
    for (i, (rec, out)) in outcomes.into_iter().enumerate() {
        if let Some(out) = out {
            if cfg.output.time_series {
                write_series(&out.series, &out_dir.join(format!("series_{i}.csv")))?;
            }
            if cfg.output.checkpoint {
                out.state.write_checkpoint(&out_dir.join(format!("checkpoint_{i}.csv")))?;
            }
        }
        records.push(rec);
    }
    Ok(summarise(cfg, records))
}

fn summarise(cfg: &SweepConfig, mut records: Vec<ErrorRecord>) -> SweepReport {
    let mut order_dt = BTreeMap::new();
    for &eps in &cfg.eps {
        let pairs: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.eps == eps)
            .filter_map(|r| r.err_oracle.map(|e| (r.dt, e)))
            .collect();
        if let Ok(fit) = observed_order(&pairs) {
            order_dt.insert(format!("{eps}"), fit.slope);
            for r in records.iter_mut().filter(|r| r.eps == eps && r.ok()) {
                r.order_dt = Some(fit.slope);
            }
        }
    }
    let mut slope_eps = BTreeMap::new();
    for &dt in &cfg.dt {
        let pairs: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.dt == dt)
            .filter_map(|r| r.err_oracle.map(|e| (r.eps, e)))
            .collect();
        if let Ok(fit) = observed_order(&pairs) {
            slope_eps.insert(format!("{dt}"), fit.slope);
        }
    }
    let finest = cfg.dt.iter().copied().fold(f64::INFINITY, f64::min);
    let uniformity = records
        .iter()
        .filter(|r| r.dt == finest)
        .filter_map(|r| r.err_oracle)
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.max(e))));
    SweepReport { records, order_dt, slope_eps, uniformity }
}

/// Write the sweep table.
pub fn write_sweep_csv(records: &[ErrorRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "s", "eps", "dt", "regime", "gamma", "b", "err_oracle", "err_limit", "order_dt", "runtime_s", "norm", "mass_drift",
        "norm_growth", "status",
    ])?;
    let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in records {
        w.write_record([
            format!("{}", r.s),
            format!("{:e}", r.eps),
            format!("{:e}", r.dt),
            r.regime.clone(),
            num(r.gamma),
            format!("{}", r.b),
            num(r.err_oracle),
            num(r.err_limit),
            num(r.order_dt),
            format!("{:.3}", r.runtime_s),
            r.norm.to_string(),
            num(r.mass_drift),
            num(r.norm_growth),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series(series: &[SeriesRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in series {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Verdict of one property suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub values: BTreeMap<String, f64>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suites: Vec<SuiteResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn get(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// Faults that [`run_properties`] can inject to show the suites bite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Negate the sampled equilibrium before the equilibrium suites.
    NegatedEquilibrium,
}

struct Suite {
    name: &'static str,
    values: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, values: BTreeMap::new(), failures: Vec::new() }
    }

    fn record(&mut self, key: impl Into<String>, value: f64) {
        self.values.insert(key.into(), value);
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name.into(),
            passed: self.failures.is_empty(),
            message: if self.failures.is_empty() { "ok".into() } else { self.failures.join("; ") },
            values: self.values,
        }
    }

    fn from_error(name: &'static str, e: Error) -> SuiteResult {
        SuiteResult { name: name.into(), passed: false, values: BTreeMap::new(), message: e.to_string() }
    }
}

/// Run the suites named in `cfg.suites`, serially.
pub fn run_properties(cfg: &SweepConfig, fault: Option<Fault>) -> Result<SuiteReport> {
    let s = cfg.order()?;
    let mut table = build_equilibrium(&cfg.grid, s)?;
    if fault == Some(Fault::NegatedEquilibrium) {
        table.m_values.iter_mut().for_each(|m| *m = -*m);
    }
    let mut suites = Vec::new();
    for name in &cfg.suites {
        let result = match name.as_str() {
            "inequalities" => suite_inequalities(cfg),
            "exponent_gap" => suite_exponent_gap(),
            "m_decay" => suite_m_decay(cfg, &table),
            "normalization" => suite_normalization(&table),
            "coupling" => suite_coupling(cfg),
            "commutator" => suite_commutator(),
            "resolvent" => suite_resolvent(cfg),
            other => return Err(Error::Config(format!("unknown suite '{other}'"))),
        };
        let result = result.unwrap_or_else(|e| Suite::from_error(static_name(name), e));
        log::info!("suite {}: {}", result.name, if result.passed { "pass" } else { "FAIL" });
        suites.push(result);
    }
    Ok(SuiteReport { suites })
}

fn static_name(name: &str) -> &'static str {
    SUITES.iter().find(|s| **s == name).copied().unwrap_or("unknown")
}

fn suite_inequalities(cfg: &SweepConfig) -> Result<SuiteResult> {
    let mut suite = Suite::new("inequalities");
    let v = elementary_inequality_suite(cfg.inequality_samples, cfg.seed)?;
    suite.record("samples", cfg.inequality_samples as f64);
    suite.record("violations", v as f64);
    suite.require(v == 0, format!("{v} violations"));
    Ok(suite.finish())
}

fn suite_exponent_gap() -> Result<SuiteResult> {
    let mut suite = Suite::new("exponent_gap");
    let s = FracOrder::new(0.5)?;
    let fit = exponent_gap_probe(1.0, 1.0, s, 1.0, &[0.4, 0.2, 0.1, 0.05])?;
    let slope = fit.slope.unwrap_or(f64::NAN);
    suite.record("slope", slope);
    suite.require(slope >= 0.35, format!("slope {slope:.3} < 0.35"));
    Ok(suite.finish())
}

fn suite_m_decay(cfg: &SweepConfig, table: &EquilibriumTable) -> Result<SuiteResult> {
    let mut suite = Suite::new("m_decay");
    let min = table.m_values.iter().copied().fold(f64::INFINITY, f64::min);
    suite.record("min_m", min);
    suite.require(min > 0.0, format!("equilibrium not positive (min {min:e})"));
    let mut finer = cfg.grid;
    finer.nv *= 2;
    let fine = build_equilibrium(&finer, table.s)?;
    for m in [1, 2] {
        let r = derivative_ratio_check(table, m)?;
        let rf = derivative_ratio_check(&fine, m)?;
        suite.record(format!("ratio_m{m}"), r);
        suite.record(format!("ratio_m{m}_fine"), rf);
        suite.require(r.is_finite() && r > 0.0, format!("ratio m={m} not finite and positive"));
        suite.require((r - rf).abs() <= 0.05 * rf, format!("ratio m={m} unstable under refinement ({r} vs {rf})"));
    }
    let r1 = suite.values["ratio_m1"];
    suite.require(r1 < 10.0, format!("ratio m=1 = {r1} exceeds 10"));
    Ok(suite.finish())
}

fn suite_normalization(table: &EquilibriumTable) -> Result<SuiteResult> {
    let mut suite = Suite::new("normalization");
    let mass = table.discrete_mass();
    let tau = table.tail_mass_estimate();
    suite.record("mass", mass);
    suite.record("tau_tail", tau);
    suite.record("tail_constant", table.tail_constant);
    suite.require(mass <= 1.0 + 1e-12 && mass >= 1.0 - 2.0 * tau, format!("mass {mass} outside [1 - 2 tau, 1]"));
    let m_hat0 = table.m_hat[table.grid.k_zero()];
    suite.require((m_hat0 - 1.0).abs() < 1e-15, "M_hat(0) != 1");
    let n = table.m_values.len();
    suite.require((1..n / 2).all(|i| table.m_values[i] == table.m_values[n - i]), "equilibrium not even");
    Ok(suite.finish())
}

fn suite_coupling(cfg: &SweepConfig) -> Result<SuiteResult> {
    let mut suite = Suite::new("coupling");
    let mut grid = cfg.grid;
    grid.nx = grid.nx.min(32);
    let rho = RhoProfile::Gaussian { mass: 1.0, center: PI, width: 0.5 };
    let h_hat: Vec<_> = x_modes(&grid).iter().map(|&x| rho.hat(x)).collect();
    for s in [0.5, 0.75] {
        let so = FracOrder::new(s)?;
        let eq = build_equilibrium(&grid, so)?;
        let (slope, _) = coupling_scaling_probe(&h_hat, &grid, so, &eq, &[0.4, 0.2, 0.1, 0.05])?;
        suite.record(format!("slope_s{s}"), slope);
        suite.require((slope - s).abs() <= 0.15, format!("slope {slope:.3} not within s = {s} +- 0.15"));
        if s == 0.5 {
            let d = quadrature_discrepancy(&h_hat, 0.1, &grid, so, &eq)?;
            suite.record("quadrature_discrepancy", d);
            suite.require(d <= 3e-2, format!("closed form vs quadrature {d:.3e} > 3e-2"));
        }
    }
    Ok(suite.finish())
}

fn suite_commutator() -> Result<SuiteResult> {
    let mut suite = Suite::new("commutator");
    let s = FracOrder::new(0.5)?;
    let mut ratios = Vec::new();
    for nv in [1024, 2048] {
        let g = GridSpec::new(2.0 * PI, 8, 60.0, nv)?;
        let f: Vec<f64> = g.v_nodes().iter().map(|x| (-x * x).exp()).collect();
        ratios.push(commutator_probe(&f, 1.0, &g, s)?);
    }
    suite.record("ratio", ratios[0]);
    suite.record("ratio_fine", ratios[1]);
    suite.require(ratios[0].is_finite(), "commutator ratio not finite");
    suite.require((ratios[0] - ratios[1]).abs() <= 0.1 * ratios[1], "commutator ratio unstable under refinement");
    Ok(suite.finish())
}

fn suite_resolvent(cfg: &SweepConfig) -> Result<SuiteResult> {
    let mut suite = Suite::new("resolvent");
    let grid = cfg.grid;
    let mut worst: f64 = 0.0;
    for s in [0.25, 0.5, 0.75] {
        let so = FracOrder::new(s)?;
        let mh: Vec<num_complex::Complex64> = grid
            .k_modes()
            .iter()
            .map(|&k| num_complex::Complex64::new(crate::equilibrium::equilibrium_hat(k, so), 0.0))
            .collect();
        for lambda in [0.5, 1.0, 10.0] {
            let out = lfp_resolvent(&mh, lambda, &grid, so, cfg.quadrature)?;
            let err = out.iter().zip(&mh).map(|(a, b)| (a - b / lambda).norm() / (b.re / lambda)).fold(0.0, f64::max);
            worst = worst.max(err);
        }
    }
    suite.record("kernel_identity_error", worst);
    suite.require(worst <= 1e-8, format!("kernel identity error {worst:e} > 1e-8"));
    let s = cfg.order()?;
    let xi = x_modes(&grid);
    let ones = vec![num_complex::Complex64::new(1.0, 0.0); xi.len()];
    let heat = frac_heat_multiplier(&ones, &xi, 1e-2, s)?;
    suite.require(heat.iter().all(|m| m.re > 0.0 && m.re <= 1.0), "heat multiplier outside (0, 1]");
    // the half-step shift in use for the first configured cell
    let p = cfg.params(cfg.eps[0], cfg.dt[0])?;
    let pol = select_gamma(&p)?;
    let r = Resolvent::new(&grid, s, pol.alpha + pol.gamma, cfg.quadrature)?;
    suite.record("band_nnz", r.nnz() as f64);
    Ok(suite.finish())
}

/// Summary written next to the sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub config: &'a SweepConfig,
    pub order_dt: Option<&'a BTreeMap<String, f64>>,
    pub slope_eps: Option<&'a BTreeMap<String, f64>>,
    pub uniformity: Option<f64>,
    pub failures: usize,
    pub suites: Option<&'a [SuiteResult]>,
}

pub fn write_summary(summary: &Summary<'_>, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(f, summary)?;
    Ok(())
}
