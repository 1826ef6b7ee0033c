//! Exact Fourier-space solutions of the scaled LFP equation and its
//! fractional diffusion limit, plus probes of the supporting inequalities.
//!
//! Along the characteristics `k(w) = εξ + (k - εξ) e^{-w}` the transformed
//! equation is a pure damping, so
//! `f̂(t, ξ, k) = f̂_in(ξ, εξ + e^{-T}(k - εξ)) exp(-∫_0^T |k(w)|^{2s} dw)`
//! with `T = t / ε^{2s}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::equilibrium_hat;
use crate::error::{Error, Result};
use crate::grid::{x_modes, GridSpec, SpectralField, VelocityRep};
use crate::metrics::least_squares;
use crate::order::FracOrder;
use crate::quad::{adaptive, GaussLegendre};

/// Macro initial density `ρ_in(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhoProfile {
    /// `mass · N(center, width²)`, periodised.
    Gaussian { mass: f64, center: f64, width: f64 },
    /// Uniform density of total mass `mass` over one period.
    Constant { mass: f64 },
}

impl RhoProfile {
    /// `ρ̂_in(ξ) = ∫_0^{Lx} ρ_in(x) e^{-iξx} dx` at a lattice mode.
    pub fn hat(&self, xi: f64) -> Complex64 {
        match *self {
            RhoProfile::Gaussian { mass, center, width } => {
                Complex64::from_polar(mass * (-0.5 * xi * xi * width * width).exp(), -xi * center)
            }
            RhoProfile::Constant { mass } => {
                if xi == 0.0 {
                    Complex64::new(mass, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            RhoProfile::Gaussian { mass, .. } | RhoProfile::Constant { mass } => mass,
        }
    }
}

/// Velocity profile `χ(v)` of separable initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VelocityProfile {
    Equilibrium,
    /// Unit-mass Gaussian of standard deviation `width`.
    Gaussian { width: f64 },
}

impl VelocityProfile {
    pub fn hat(&self, k: f64, s: FracOrder) -> f64 {
        match *self {
            VelocityProfile::Equilibrium => equilibrium_hat(k, s),
            VelocityProfile::Gaussian { width } => (-0.5 * k * k * width * width).exp(),
        }
    }
}

/// Separable initial data `f_in(x, v) = ρ_in(x) χ(v)` with the model
/// parameters it is evolved under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub rho: RhoProfile,
    pub chi: VelocityProfile,
    pub eps: f64,
    pub s: FracOrder,
}

impl InitialData {
    pub fn new(rho: RhoProfile, chi: VelocityProfile, eps: f64, s: FracOrder) -> Result<Self> {
        if !(rho.mass() > 0.0) {
            return Err(Error::InvalidParameter("initial mass must be positive".into()));
        }
        if !(eps >= 0.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} must be nonnegative")));
        }
        if let VelocityProfile::Gaussian { width } = chi {
            if !(width > 0.0) {
                return Err(Error::InvalidParameter("velocity width must be positive".into()));
            }
        }
        Ok(Self { rho, chi, eps, s })
    }

    /// `f̂_in(ξ, k) = ρ̂_in(ξ) χ̂(k)`.
    pub fn f_hat(&self, xi: f64, k: f64) -> Complex64 {
        self.rho.hat(xi) * self.chi.hat(k, self.s)
    }
}

/// `∫_0^T |εξ + (k - εξ) e^{-w}|^{2s} dw` with `T = t / ε^{2s}`.
pub fn exponent_integral(xi: f64, k: f64, eps: f64, s: FracOrder, t: f64) -> f64 {
    exponent_integral_with(xi, k, eps, s, t, 40)
}

pub(crate) fn exponent_integral_with(xi: f64, k: f64, eps: f64, s: FracOrder, t: f64, depth: usize) -> f64 {
    let two_s = s.two_s();
    let big_t = t / eps.powf(two_s);
    let a = eps * xi;
    let b = k - a;
    if a == 0.0 {
        return s.symbol(k) / two_s * (-(-two_s * big_t).exp_m1());
    }
    let base = s.symbol(a);
    if b == 0.0 {
        return base * big_t;
    }
    let lo = (-big_t).exp();
    let f = |u: f64| (s.symbol(u * b + a) - base) / u;
    let rule = GaussLegendre::new(10);
    let tol = 1e-14 * (1.0 + base * big_t + s.symbol(k));
    let cusp = -a / b;
    let rest = if cusp > lo && cusp < 1.0 {
        adaptive(&rule, &f, lo, cusp, tol, depth) + adaptive(&rule, &f, cusp, 1.0, tol, depth)
    } else {
        adaptive(&rule, &f, lo, 1.0, tol, depth)
    };
    base * big_t + rest
}

/// Exact solution `f̂(t, ξ, k)` of the scaled kinetic equation.
pub fn exact_lfp_hat(t: f64, xi: f64, k: f64, init: &InitialData) -> Complex64 {
    let eps = init.eps;
    if eps == 0.0 {
        return limit_state_hat(t, xi, k, init);
    }
    let a = eps * xi;
    let big_t = t / eps.powf(init.s.two_s());
    let foot = a + (-big_t).exp() * (k - a);
    init.f_hat(xi, foot) * (-exponent_integral(xi, k, eps, init.s, t)).exp()
}

/// `ρ̂(t, ξ) M̂(k) = f̂_in(ξ, 0) e^{-|ξ|^{2s} t} M̂(k)`.
pub fn limit_state_hat(t: f64, xi: f64, k: f64, init: &InitialData) -> Complex64 {
    init.f_hat(xi, 0.0) * (-init.s.symbol(xi) * t).exp() * equilibrium_hat(k, init.s)
}

/// [`exact_lfp_hat`] on the full (ξ, k) lattice of `grid`.
pub fn exact_field(t: f64, init: &InitialData, grid: &GridSpec) -> SpectralField {
    lattice_field(grid, |xi, k| exact_lfp_hat(t, xi, k, init))
}

/// [`limit_state_hat`] on the full (ξ, k) lattice of `grid`.
pub fn limit_field(t: f64, init: &InitialData, grid: &GridSpec) -> SpectralField {
    lattice_field(grid, |xi, k| limit_state_hat(t, xi, k, init))
}

fn lattice_field<F: Fn(f64, f64) -> Complex64 + Sync>(grid: &GridSpec, f: F) -> SpectralField {
    let xi = x_modes(grid);
    let k = grid.k_modes();
    let mut out = SpectralField::zeros(grid, VelocityRep::Fourier);
    out.data.par_chunks_exact_mut(grid.nv).zip(xi.par_iter()).for_each(|(row, &x)| {
        for (z, &km) in row.iter_mut().zip(&k) {
            *z = f(x, km);
        }
    });
    out
}

/// `‖f^ε(t) - ρ(t) M‖_{L²_{x,v}}` over one x-period, by Parseval on the
/// (ξ, k) lattice of `grid`.
pub fn continuous_gap_norm(t: f64, init: &InitialData, grid: &GridSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
    }
    if init.eps == 0.0 {
        return Ok(0.0);
    }
    let k = grid.k_modes();
    let total: f64 = x_modes(grid)
        .par_iter()
        .map(|&xi| {
            if init.rho.hat(xi).norm() < 1e-300 {
                return 0.0;
            }
            k.iter()
                .map(|&km| (exact_lfp_hat(t, xi, km, init) - limit_state_hat(t, xi, km, init)).norm_sqr())
                .sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok((total * grid.dk() / (2.0 * PI) / grid.lx).sqrt())
}

/// Counts violations of `(a+b)^s ≤ a^s + b^s` and
/// `|(a+b)^{2s} - a^{2s} - b^{2s}| ≤ 2 a^s b^s` over random samples.
pub fn elementary_inequality_suite(n_samples: usize, seed: u64) -> Result<usize> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("inequality suite needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..n_samples {
        let a: f64 = rng.gen_range(0.0..1e3);
        let b: f64 = rng.gen_range(0.0..1e3);
        let s: f64 = rng.gen_range(f64::EPSILON..1.0);
        if !elementary_inequalities_hold(a, b, s) {
            violations += 1;
        }
    }
    Ok(violations)
}

/// Both inequalities at one sample; the slack is relative to the magnitudes
/// involved so that rounding near the equality case `s → 1` is not counted.
pub fn elementary_inequalities_hold(a: f64, b: f64, s: f64) -> bool {
    let slack1 = 1e-12 * (1.0 + (a + b).powf(s));
    let first = (a + b).powf(s) <= a.powf(s) + b.powf(s) + slack1;
    let lhs = ((a + b).powf(2.0 * s) - a.powf(2.0 * s) - b.powf(2.0 * s)).abs();
    let slack2 = 1e-12 * (1.0 + (a + b).powf(2.0 * s));
    first && lhs <= 2.0 * a.powf(s) * b.powf(s) + slack2
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapFit {
    /// `None` when fewer than two points survive.
    pub slope: Option<f64>,
    /// `(ε, gap)` pairs used in the fit.
    pub points: Vec<(f64, f64)>,
    /// `ε` values whose gap fell below `1e-13`.
    pub skipped: Vec<f64>,
}

/// `|exponent - (|ξ|^{2s} t + |k|^{2s}/(2s))|` at one `ε`.
pub fn exponent_gap(xi: f64, k: f64, s: FracOrder, t: f64, eps: f64) -> f64 {
    (exponent_integral(xi, k, eps, s, t) - (s.symbol(xi) * t + s.symbol(k) / s.two_s())).abs()
}

/// Log-log slope of the exponent gap against `ε`.
pub fn exponent_gap_probe(xi: f64, k: f64, s: FracOrder, t: f64, eps_list: &[f64]) -> Result<GapFit> {
    if eps_list.len() < 2 {
        return Err(Error::InsufficientData("need at least two eps values".into()));
    }
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &e in eps_list {
        let gap = exponent_gap(xi, k, s, t, e);
        if gap < 1e-13 {
            skipped.push(e);
        } else {
            points.push((e, gap));
        }
    }
    let slope = (points.len() >= 2).then(|| {
        let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
        least_squares(&xs, &ys).0
    });
    Ok(GapFit { slope, points, skipped })
}
