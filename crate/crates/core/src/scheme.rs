//! Asymptotic-preserving micro–macro time stepper.
//!
//! The state is `f = η M + g` with `η(x, v) = h(x + εv)`. One step advances
//!
//! 1. `h^{n+1} = (1 + Δt (-Δ_x)^s)^{-1} h^n`,
//! 2. `(α + γ - L^s) g^{n+1/2} = α g^n - I(η^{n+1}, M)`,
//! 3. `(α - γ + εv ∂_x) g^{n+1} = α g^{n+1/2}`,
//!
//! with `α = ε^{2s}/Δt`. Step 2 is solved per x-mode in velocity-Fourier
//! variables, step 3 per x-mode in physical velocity.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::coupling_kernel_over_equilibrium;
use crate::equilibrium::equilibrium_hat;
use crate::error::{Error, Result};
use crate::fracops::{frac_heat_multiplier, Resolvent, ResolventQuadrature};
use crate::grid::{x_modes, GridSpec, PeriodicTransform, SpectralField, VelocityRep};
use crate::oracle::InitialData;
use crate::order::FracOrder;

/// Scalar model and discretisation parameters of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub s: FracOrder,
    pub eps: f64,
    pub dt: f64,
    pub t_final: f64,
    pub beta: f64,
    /// Weight exponent of the error norm.
    pub b: f64,
    pub d: usize,
    pub grid: GridSpec,
    /// Start of the window in which errors are assessed.
    pub t0: f64,
    /// Slack constant of the Regime I bound on `γ`.
    pub lambda2: f64,
}

impl SimParams {
    /// Parameters with `b = 1 + 2s`, `λ2 = 5` and `t0` from [`default_t0`].
    pub fn new(s: FracOrder, eps: f64, dt: f64, t_final: f64, beta: f64, grid: GridSpec) -> Result<Self> {
        let p = Self {
            s,
            eps,
            dt,
            t_final,
            beta,
            b: 1.0 + s.two_s(),
            d: grid.d,
            grid,
            t0: default_t0(dt),
            lambda2: 5.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let s = self.s.get();
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps = {} must be positive", self.eps));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.beta > 0.0 && self.beta < 1.0 / (6.0 * s)) {
            return bad(format!("beta = {} outside (0, 1/(6s))", self.beta));
        }
        let d = self.d as f64;
        let b_hi = (d + 2.0 * s).min(0.5 * d + 3.0 * s);
        if !(self.b > 1.0 && self.b <= b_hi + 1e-12) {
            return bad(format!("b = {} outside (1, {b_hi}]", self.b));
        }
        if !(self.t0 > 0.0 && self.t_final >= self.t0) {
            return bad(format!("need T >= t0 > 0, got T = {}, t0 = {}", self.t_final, self.t0));
        }
        if !(self.lambda2 > 4.0) {
            return bad(format!("lambda2 = {} must exceed 4", self.lambda2));
        }
        if self.d != 1 {
            return bad("the stepper is implemented for d = 1".into());
        }
        Ok(())
    }

    /// `α = ε^{2s} / Δt`.
    pub fn alpha(&self) -> f64 {
        self.eps.powf(self.s.two_s()) / self.dt
    }

    /// Number of steps to reach `T` (rounded to the nearest integer).
    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// `max(0.1, n₀ Δt)` with the initial-layer length `n₀ = log Δt / log ½`.
pub fn default_t0(dt: f64) -> f64 {
    let n0 = (dt.ln() / 0.5f64.ln()).ceil().max(0.0);
    (n0 * dt).max(0.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `ε^{2s} ≥ Δt^{2sβ}`.
    RegimeI,
    /// `ε^{2s} < Δt`.
    RegimeIISmall,
    /// `Δt ≤ ε^{2s} < Δt^{2sβ}`.
    RegimeIIMid,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::RegimeI => "I",
            Regime::RegimeIISmall => "II_small",
            Regime::RegimeIIMid => "II_mid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPolicy {
    pub regime: Regime,
    pub gamma: f64,
    pub alpha: f64,
    pub lambda2: f64,
}

/// Classify the regime and pick the stabilisation constant `γ`.
pub fn select_gamma(p: &SimParams) -> Result<GammaPolicy> {
    let two_s = p.s.two_s();
    let e2s = p.eps.powf(two_s);
    let alpha = p.alpha();
    let (regime, gamma) = if e2s >= p.dt.powf(two_s * p.beta) {
        let upper = (((p.lambda2 - 4.0) / p.lambda2).sqrt() * alpha).min(4.0);
        if upper <= 2.0 {
            return Err(Error::InfeasibleGamma { upper, alpha });
        }
        (Regime::RegimeI, upper.min(2.5))
    } else if e2s < p.dt {
        (Regime::RegimeIISmall, 3f64.sqrt())
    } else {
        (Regime::RegimeIIMid, 3f64.sqrt() * p.dt.powf(two_s * p.beta - 1.0))
    };
    if gamma == alpha {
        return Err(Error::SingularTransport(alpha));
    }
    Ok(GammaPolicy { regime, gamma, alpha, lambda2: p.lambda2 })
}

/// Macro coefficients `ĥ(ξ)` and micro coefficients `ĝ(ξ, k)` at step `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    pub h_hat: Vec<Complex64>,
    pub g_hat: SpectralField,
    pub n: usize,
    pub t: f64,
}

impl SchemeState {
    /// `ĥ(0) + ĝ(0, 0)`, the total mass over one period.
    pub fn mass(&self, grid: &GridSpec) -> f64 {
        self.h_hat[grid.x_zero()].re + self.g_hat.at(grid.x_zero(), grid.k_zero()).re
    }

    /// Dump as CSV rows `(xi_index, k_index, re, im)`. Rows with
    /// `k_index = -1` hold `ĥ`; the others hold `ĝ`.
    pub fn write_checkpoint(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "xi_index,k_index,re,im")?;
        for (j, h) in self.h_hat.iter().enumerate() {
            writeln!(w, "{j},-1,{:e},{:e}", h.re, h.im)?;
        }
        for (j, row) in self.g_hat.rows().enumerate() {
            for (m, z) in row.iter().enumerate() {
                writeln!(w, "{j},{m},{:e},{:e}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// `ĥ⁰ = ρ̂_in`, `ĝ⁰(ξ, k) = ρ̂_in(ξ) [χ̂(k) - M̂(k - εξ)]`.
pub fn decompose_initial(init: &InitialData, p: &SimParams) -> SchemeState {
    let grid = &p.grid;
    let xi = x_modes(grid);
    let k = grid.k_modes();
    let h_hat: Vec<Complex64> = xi.iter().map(|&x| init.rho.hat(x)).collect();
    let mut g_hat = SpectralField::zeros(grid, VelocityRep::Fourier);
    for ((row, &x), h) in g_hat.rows_mut().zip(&xi).zip(&h_hat) {
        for (z, &km) in row.iter_mut().zip(&k) {
            *z = h * (init.chi.hat(km, init.s) - equilibrium_hat(km - p.eps * x, init.s));
        }
    }
    SchemeState { h_hat, g_hat, n: 0, t: 0.0 }
}

/// `f̂(ξ, k) = ĥ(ξ) M̂(k - εξ) + ĝ(ξ, k)`.
pub fn recompose_f(state: &SchemeState, p: &SimParams) -> SpectralField {
    let grid = &p.grid;
    let xi = x_modes(grid);
    let k = grid.k_modes();
    let mut f = state.g_hat.clone();
    for ((row, &x), h) in f.rows_mut().zip(&xi).zip(&state.h_hat) {
        for (z, &km) in row.iter_mut().zip(&k) {
            *z += h * equilibrium_hat(km - p.eps * x, p.s);
        }
    }
    f
}

/// `ĥ^{n+1}(ξ) = ĥ^n(ξ) / (1 + Δt |ξ|^{2s})`.
pub fn step_eta(h_hat: &[Complex64], p: &SimParams) -> Result<Vec<Complex64>> {
    frac_heat_multiplier(h_hat, &x_modes(&p.grid), p.dt, p.s)
}

/// Transport solve `(α - γ + iεξv) g^{n+1} = α g^{n+1/2}` on every x-mode.
pub fn step_g_transport(g_half: &SpectralField, policy: &GammaPolicy, p: &SimParams) -> Result<SpectralField> {
    TransportSolver::new(policy, p)?.apply(g_half)
}

struct TransportSolver {
    tv: PeriodicTransform,
    /// `α / (α - γ + iεξv)` per (x-mode, v-node).
    multipliers: Vec<Complex64>,
    zero_row: usize,
    nv: usize,
}

impl TransportSolver {
    fn new(policy: &GammaPolicy, p: &SimParams) -> Result<Self> {
        let (alpha, gamma) = (policy.alpha, policy.gamma);
        if alpha == gamma {
            return Err(Error::SingularTransport(alpha));
        }
        let grid = &p.grid;
        let v = grid.v_nodes();
        let multipliers = x_modes(grid)
            .iter()
            .flat_map(|&x| v.iter().map(move |&vn| alpha / Complex64::new(alpha - gamma, p.eps * x * vn)))
            .collect();
        Ok(Self { tv: PeriodicTransform::velocity(grid), multipliers, zero_row: grid.x_zero(), nv: grid.nv })
    }

    fn apply(&self, g: &SpectralField) -> Result<SpectralField> {
        if g.rep != VelocityRep::Fourier || g.nv != self.nv {
            return Err(Error::InvalidGrid("transport expects v-Fourier coefficients".into()));
        }
        let mut out = g.clone();
        self.apply_in_place(&mut out);
        Ok(out)
    }

    fn apply_in_place(&self, g: &mut SpectralField) {
        let nv = self.nv;
        g.data.par_chunks_exact_mut(nv).enumerate().for_each(|(j, row)| {
            let mult = &self.multipliers[j * nv..(j + 1) * nv];
            if j == self.zero_row {
                let c = mult[0];
                row.iter_mut().for_each(|z| *z *= c);
                return;
            }
            self.tv.inverse_in_place(row);
            row.iter_mut().zip(mult).for_each(|(z, m)| *z *= m);
            self.tv.forward_in_place(row);
        });
    }
}

/// Everything the stepper reuses across steps for one parameter set.
pub struct Stepper {
    pub params: SimParams,
    pub policy: GammaPolicy,
    resolvent: Resolvent,
    /// `(α + γ - L̂)^{-1}` applied to `Î / ĥ`, per x-mode.
    coupling_response: SpectralField,
    heat: Vec<f64>,
    transport: TransportSolver,
}

impl Stepper {
    pub fn new(params: SimParams, quad: ResolventQuadrature) -> Result<Self> {
        params.validate()?;
        let policy = select_gamma(&params)?;
        Self::with_policy(params, policy, quad)
    }

    pub fn with_policy(params: SimParams, policy: GammaPolicy, quad: ResolventQuadrature) -> Result<Self> {
        let grid = params.grid;
        let s = params.s;
        let lambda = policy.alpha + policy.gamma;
        let resolvent = Resolvent::new(&grid, s, lambda, quad)?;
        let xi = x_modes(&grid);
        let k = grid.k_modes();
        let mut coupling_response = SpectralField::zeros(&grid, VelocityRep::Fourier);
        let eps = params.eps;
        coupling_response
            .data
            .par_chunks_exact_mut(grid.nv)
            .zip(xi.par_iter())
            .for_each(|(row, &x)| {
                let a = eps * x;
                if a == 0.0 {
                    return;
                }
                for (z, &km) in row.iter_mut().zip(&k) {
                    let q = |kappa: f64| coupling_kernel_over_equilibrium(kappa, a, s);
                    *z = Complex64::new(resolvent.apply_analytic(km, q, Some(a)), 0.0);
                }
            });
        let heat = xi.iter().map(|&x| 1.0 / (1.0 + params.dt * s.symbol(x))).collect();
        let transport = TransportSolver::new(&policy, &params)?;
        Ok(Self { params, policy, resolvent, coupling_response, heat, transport })
    }

    /// The half-step `(α + γ - L^s) g^{n+1/2} = α g^n - I(η^{n+1}, M)`.
    pub fn g_half(&self, g: &SpectralField, h_next: &[Complex64]) -> SpectralField {
        let nv = g.nv;
        let alpha = self.policy.alpha;
        let mut out = SpectralField { nx: g.nx, nv, rep: VelocityRep::Fourier, data: vec![Complex64::new(0.0, 0.0); g.data.len()] };
        out.data
            .par_chunks_exact_mut(nv)
            .zip(g.data.par_chunks_exact(nv))
            .enumerate()
            .for_each(|(j, (o, src))| {
                self.resolvent.apply_into(src, o);
                let jr = self.coupling_response.row(j);
                let h = h_next[j];
                for (z, r) in o.iter_mut().zip(jr) {
                    *z = *z * alpha - r * h;
                }
            });
        out
    }

    /// One full step; also returns `ĝ^{n+1/2}`.
    pub fn step_with_half(&self, state: &SchemeState) -> (SchemeState, SpectralField) {
        let h_next: Vec<Complex64> = state.h_hat.iter().zip(&self.heat).map(|(h, m)| h * m).collect();
        let half = self.g_half(&state.g_hat, &h_next);
        let mut g_next = half.clone();
        self.transport.apply_in_place(&mut g_next);
        let next = SchemeState { h_hat: h_next, g_hat: g_next, n: state.n + 1, t: (state.n + 1) as f64 * self.params.dt };
        (next, half)
    }

    pub fn step(&self, state: &SchemeState) -> SchemeState {
        self.step_with_half(state).0
    }

    pub fn resolvent(&self) -> &Resolvent {
        &self.resolvent
    }
}

/// `‖⟨v⟩^m (g^{n+1} - g^{n+1/2})‖_{L²_{x,v}}` over one period.
pub fn splitting_defect(g_next: &SpectralField, g_half: &SpectralField, p: &SimParams, m: f64) -> Result<f64> {
    let d = p.d as f64;
    if !(m < p.s.get() + 0.5 * d) {
        return Err(Error::InvalidParameter(format!("weight power m = {m} must be below s + d/2")));
    }
    if g_next.data.len() != g_half.data.len() {
        return Err(Error::LengthMismatch { expected: g_half.data.len(), got: g_next.data.len() });
    }
    let grid = &p.grid;
    let tv = PeriodicTransform::velocity(grid);
    let w: Vec<f64> = grid.v_nodes().iter().map(|v| (1.0 + v * v).powf(m)).collect();
    let total: f64 = g_next
        .data
        .par_chunks_exact(grid.nv)
        .zip(g_half.data.par_chunks_exact(grid.nv))
        .map(|(a, b)| {
            let mut buf: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            tv.inverse_in_place(&mut buf);
            buf.iter().zip(&w).map(|(z, wi)| wi * z.norm_sqr()).sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok((total * grid.dv() / grid.lx).sqrt())
}
