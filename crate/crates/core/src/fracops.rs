//! Fractional Laplacian (multiplier and singular-integral forms), the LFP
//! operator in velocity-Fourier variables, its resolvent, and the fractional
//! heat multiplier.
//!
//! In Fourier variables `L̂ = -k ∂_k - |k|^{2s}`, which annihilates `M̂`. The
//! resolvent `(λ - L̂)^{-1}` is integrated along the backward characteristics
//! `k ↦ k e^{-τ}`. Writing `ŝ = M̂ q` the integral becomes
//!
//! `ĝ(k) = M̂(k) ∫_0^∞ e^{-λτ} q(k e^{-τ}) dτ`,
//!
//! so the `M̂` factors never have to be resolved by the quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::{lagrange4, GridSpec};
use crate::order::FracOrder;
use crate::quad::{graded_breaks, GaussLegendre};

/// `C_{s,d} = 4^s Γ(d/2 + s) / (π^{d/2} |Γ(-s)|)`.
pub fn normalization_constant(s: f64, d: usize) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidOrder(s));
    }
    let d = d as f64;
    Ok(4f64.powf(s) * gamma(0.5 * d + s) / (PI.powf(0.5 * d) * gamma(-s).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracParams {
    pub s: FracOrder,
    pub d: usize,
    pub c_sd: f64,
}

impl FracParams {
    pub fn new(s: FracOrder, d: usize) -> Result<Self> {
        Ok(Self { s, d, c_sd: normalization_constant(s.get(), d)? })
    }
}

/// Multiply each coefficient by `|k|^{2s}`.
pub fn frac_laplacian_multiplier(coeffs: &[Complex64], modes: &[f64], s: FracOrder) -> Result<Vec<Complex64>> {
    if coeffs.len() != modes.len() {
        return Err(Error::LengthMismatch { expected: modes.len(), got: coeffs.len() });
    }
    Ok(coeffs.iter().zip(modes).map(|(c, &k)| c * s.symbol(k)).collect())
}

/// `(-Δ_v)^s f` on the velocity nodes from the singular integral.
///
/// Off-diagonal cells use the midpoint rule, the central cell its second-order
/// Taylor term, and `f` is taken as zero outside the box.
pub fn frac_laplacian_quadrature(f: &[f64], grid: &GridSpec, s: FracOrder) -> Result<Vec<f64>> {
    let n = grid.nv;
    if f.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: f.len() });
    }
    let fmax = f.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if fmax > 0.0 && (f[0].abs().max(f[n - 1].abs()) > 1e-6 * fmax) {
        log::warn!("input does not decay at the velocity boundary; far-field closure is inaccurate");
    }
    let c = normalization_constant(s.get(), grid.d)?;
    let h = grid.dv();
    let two_s = s.two_s();
    let kernel: Vec<f64> = (0..n).map(|m| if m == 0 { 0.0 } else { h * (m as f64 * h).powf(-1.0 - two_s) }).collect();
    let half = 0.5 * h;
    let central = 2.0 * half.powf(2.0 - two_s) / (2.0 - two_s);
    let out = (0..n)
        .map(|i| {
            let fi = f[i];
            let mut acc = 0.0;
            for (j, fj) in f.iter().enumerate() {
                acc += (fi - fj) * kernel[i.abs_diff(j)];
            }
            let f2 = if i == 0 || i == n - 1 { 0.0 } else { (f[i + 1] - 2.0 * fi + f[i - 1]) / (h * h) };
            acc -= 0.5 * f2 * central;
            let dl = (i as f64 + 0.5) * h;
            let dr = ((n - 1 - i) as f64 + 0.5) * h;
            acc += fi / two_s * (dl.powf(-two_s) + dr.powf(-two_s));
            c * acc
        })
        .collect();
    Ok(out)
}

/// Weights of the derivative at `x` of the quartic through nodes `0..5`.
fn quartic_derivative_weights(x: f64) -> [f64; 5] {
    let mut w = [0.0; 5];
    for (i, wi) in w.iter_mut().enumerate() {
        let denom: f64 = (0..5).filter(|&j| j != i).map(|j| i as f64 - j as f64).product();
        let mut sum = 0.0;
        for m in (0..5).filter(|&m| m != i) {
            sum += (0..5).filter(|&j| j != i && j != m).map(|j| x - j as f64).product::<f64>();
        }
        *wi = sum / denom;
    }
    w
}

/// `L̂ ĝ = -k ∂_k ĝ - |k|^{2s} ĝ` with fourth-order differences in `k` whose
/// stencils never straddle `k = 0`.
pub fn lfp_apply(coeffs: &[Complex64], grid: &GridSpec, s: FracOrder) -> Result<Vec<Complex64>> {
    let n = grid.nv;
    if coeffs.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: coeffs.len() });
    }
    let z = grid.k_zero();
    let dk = grid.dk();
    let k = grid.k_modes();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        if i == z {
            continue;
        }
        // the side of k = 0 containing i, as an inclusive index range
        let (lo, hi) = if i > z { (z, n - 1) } else { (0, z) };
        let start = i.saturating_sub(2).clamp(lo, hi - 4);
        let w = quartic_derivative_weights((i - start) as f64);
        let d: Complex64 = coeffs[start..start + 5].iter().zip(w).map(|(c, wi)| c * wi).sum::<Complex64>() / dk;
        out[i] = -k[i] * d - coeffs[i] * s.symbol(k[i]);
    }
    Ok(out)
}

/// Quadrature controls for the characteristic integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResolventQuadrature {
    /// Truncation of the τ half-line; `None` selects `33/λ`.
    pub tau_max: Option<f64>,
    /// Panels are no wider than `τ_max / n_panels` (and never wider than 1/2).
    pub n_panels: usize,
    pub points_per_panel: usize,
}

impl Default for ResolventQuadrature {
    fn default() -> Self {
        Self { tau_max: None, n_panels: 40, points_per_panel: 8 }
    }
}

impl ResolventQuadrature {
    pub fn tau_max(&self, lambda: f64) -> f64 {
        self.tau_max.unwrap_or(33.0 / lambda)
    }

    fn check(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveShift(lambda));
        }
        let t = self.tau_max(lambda);
        if !(t > 0.0) || (-lambda * t).exp() > 1e-14 {
            return Err(Error::InvalidParameter(format!("tau_max = {t} too short for lambda = {lambda}")));
        }
        if self.n_panels == 0 || self.points_per_panel == 0 {
            return Err(Error::InvalidParameter("empty resolvent quadrature".into()));
        }
        Ok(t)
    }

    fn max_width(&self, tau_max: f64) -> f64 {
        (tau_max / self.n_panels as f64).min(0.5)
    }
}

/// Banded matrix of `(λ - L̂)^{-1}` on the k-grid for one `λ`.
///
/// Row `i` couples to the contiguous columns `start[i] .. start[i] + len[i]`.
#[derive(Debug, Clone)]
pub struct Resolvent {
    pub lambda: f64,
    pub s: FracOrder,
    grid: GridSpec,
    quad: ResolventQuadrature,
    tau_max: f64,
    start: Vec<usize>,
    offset: Vec<usize>,
    weights: Vec<f64>,
}

impl Resolvent {
    pub fn new(grid: &GridSpec, s: FracOrder, lambda: f64, quad: ResolventQuadrature) -> Result<Self> {
        grid.validate()?;
        let tau_max = quad.check(lambda)?;
        let rule = GaussLegendre::new(quad.points_per_panel);
        let n = grid.nv;
        let z = grid.k_zero();
        let k = grid.k_modes();
        let mut start = Vec::with_capacity(n);
        let mut offset = Vec::with_capacity(n + 1);
        let mut weights = Vec::new();
        let width = quad.max_width(tau_max);
        let cells = cell_moments(n / 2 + 1, lambda, width, &rule);
        for i in 0..n {
            offset.push(weights.len());
            if i == z {
                start.push(z);
                weights.push(1.0 / lambda);
                continue;
            }
            let (dist, top, sign) = if i > z { (i - z, n - 1 - z, 1isize) } else { (z - i, z, -1isize) };
            let (lo, w) = half_line_row(dist, top, lambda, tau_max, width, &rule, &cells);
            // column of relative index r is z + sign * r
            let mh_i = s.symbol(k[i]);
            let cols: Vec<(usize, f64)> = w
                .iter()
                .enumerate()
                .map(|(r, &wr)| {
                    let col = (z as isize + sign * (lo + r) as isize) as usize;
                    (col, wr * ((s.symbol(k[col]) - mh_i) / s.two_s()).exp())
                })
                .collect();
            if sign > 0 {
                start.push(cols[0].0);
                weights.extend(cols.iter().map(|c| c.1));
            } else {
                start.push(cols[cols.len() - 1].0);
                weights.extend(cols.iter().rev().map(|c| c.1));
            }
        }
        offset.push(weights.len());
        Ok(Self { lambda, s, grid: *grid, quad, tau_max, start, offset, weights })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    /// Stored weights; a measure of the per-row band width.
    pub fn nnz(&self) -> usize {
        self.weights.len()
    }

    /// `ĝ = (λ - L̂)^{-1} ŝ` for a source on the k-grid.
    pub fn apply(&self, src: &[Complex64]) -> Result<Vec<Complex64>> {
        if src.len() != self.grid.nv {
            return Err(Error::LengthMismatch { expected: self.grid.nv, got: src.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
        self.apply_into(src, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_into(&self, src: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let w = &self.weights[self.offset[i]..self.offset[i + 1]];
            let x = &src[self.start[i]..self.start[i] + w.len()];
            let mut re = 0.0;
            let mut im = 0.0;
            for (wi, xi) in w.iter().zip(x) {
                re += wi * xi.re;
                im += wi * xi.im;
            }
            *o = Complex64::new(re, im);
        }
    }

    /// Resolvent of a source known in closed form as `ŝ(κ) = M̂(κ) q(κ)`,
    /// evaluated at `k` without interpolation. `cusp` marks a `κ` where `q`
    /// is only Hölder continuous; the τ panels are graded toward it.
    pub fn apply_analytic<F: Fn(f64) -> f64>(&self, k: f64, q: F, cusp: Option<f64>) -> f64 {
        if k == 0.0 {
            return q(0.0) / self.lambda;
        }
        let rule = GaussLegendre::new(self.quad.points_per_panel);
        let mut breaks = vec![0.0, self.tau_max];
        let mut star = f64::NAN;
        if let Some(c) = cusp {
            if c != 0.0 && c.signum() == k.signum() && c.abs() < k.abs() {
                let t = (k / c).ln();
                if t < self.tau_max {
                    breaks.insert(1, t);
                    star = t;
                }
            }
        }
        let width = self.quad.max_width(self.tau_max);
        let lambda = self.lambda;
        let f = |tau: f64| (-lambda * tau).exp() * q(k * (-tau).exp());
        let mut acc = 0.0;
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let sub = ((b - a) / width).ceil().max(1.0) as usize;
            let h = (b - a) / sub as f64;
            for p in 0..sub {
                let pa = a + p as f64 * h;
                let pb = if p + 1 == sub { b } else { pa + h };
                if pa == star || pb == star {
                    for w in graded_breaks(pa, pb, 12, 0.25).windows(2) {
                        acc += rule.integrate(w[0], w[1], f);
                    }
                } else {
                    acc += rule.integrate(pa, pb, f);
                }
            }
        }
        acc * (-self.s.symbol(k) / self.s.two_s()).exp()
    }
}

/// `∫ (x / (j+1))^λ ℓ_m(x - j + 1) dτ` over cell `[j, j+1]` in
/// `x = n e^{-τ}`. Independent of the row `n` up to the factor
/// `((j+1)/n)^λ`, so shared by all rows.
fn cell_moments(n_cells: usize, lambda: f64, width: f64, rule: &GaussLegendre) -> Vec<[f64; 4]> {
    let mut out = vec![[0.0; 4]; n_cells];
    for (j, row) in out.iter_mut().enumerate().skip(1) {
        let len = ((j + 1) as f64 / j as f64).ln();
        let sub = (len / width).ceil().max(1.0) as usize;
        let h = len / sub as f64;
        for p in 0..sub {
            rule.for_each_node(p as f64 * h, (p + 1) as f64 * h, |u, wt| {
                let x = (j + 1) as f64 * (-u).exp();
                let l = lagrange4(x - (j - 1) as f64);
                let e = wt * (-lambda * u).exp();
                for (m, lm) in l.iter().enumerate() {
                    row[m] += e * lm;
                }
            });
        }
    }
    out
}

/// Weights on relative nodes `lo, lo + 1, …` (distance from `k = 0` in grid
/// steps) for the row at distance `dist`, one side of `k = 0` with nodes
/// `0..=top` available. These act on `q = ŝ/M̂`.
fn half_line_row(
    dist: usize,
    top: usize,
    lambda: f64,
    tau_max: f64,
    width: f64,
    rule: &GaussLegendre,
    cells: &[[f64; 4]],
) -> (usize, Vec<f64>) {
    let nf = dist as f64;
    let mut acc = vec![0.0; top + 1];
    let mut lowest = dist;
    // cells [j, j+1] for j = dist-1 down to 1
    for j in (1..dist).rev() {
        let ta = (nf / (j + 1) as f64).ln();
        if ta >= tau_max {
            break;
        }
        let tb = (nf / j as f64).ln();
        let base = (j - 1).min(top - 3);
        lowest = lowest.min(base);
        if tb <= tau_max && base == j - 1 {
            let scale = (-lambda * ta).exp();
            for (m, c) in cells[j].iter().enumerate() {
                acc[base + m] += scale * c;
            }
            continue;
        }
        let tb = tb.min(tau_max);
        let sub = ((tb - ta) / width).ceil().max(1.0) as usize;
        let h = (tb - ta) / sub as f64;
        for p in 0..sub {
            let (pa, pb) = (ta + p as f64 * h, ta + (p + 1) as f64 * h);
            rule.for_each_node(pa, pb, |tau, wt| {
                let x = nf * (-tau).exp() - base as f64;
                let l = lagrange4(x);
                let e = wt * (-lambda * tau).exp();
                for (m, lm) in l.iter().enumerate() {
                    acc[base + m] += e * lm;
                }
            });
        }
    }
    // first cell [0, 1]: q is a cubic in x = u/Δk, integrated exactly
    let t1 = nf.ln();
    if t1 < tau_max {
        let xb = nf * (-tau_max).exp();
        let scale = nf.powf(-lambda);
        let coeffs = lagrange_monomials();
        for (m, poly) in coeffs.iter().enumerate() {
            let mut v = 0.0;
            for (p, c) in poly.iter().enumerate() {
                let e = lambda + p as f64;
                v += c * (1.0 - xb.powf(e)) / e;
            }
            acc[m] += scale * v;
        }
        lowest = 0;
    }
    let hi = acc.iter().rposition(|&w| w != 0.0).unwrap_or(dist).max(dist);
    (lowest, acc[lowest..=hi].to_vec())
}

/// Monomial coefficients of the cubic Lagrange basis on nodes `0..4`.
fn lagrange_monomials() -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for j in (0..4).filter(|&j| j != i) {
            let mut next = vec![0.0; poly.len() + 1];
            for (p, c) in poly.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= c * j as f64;
            }
            poly = next;
            denom *= i as f64 - j as f64;
        }
        for (p, c) in poly.iter().enumerate() {
            row[p] = c / denom;
        }
    }
    out
}

/// One-shot `(λ - L̂)^{-1} ŝ`. Build a [`Resolvent`] when `λ` is reused.
pub fn lfp_resolvent(
    src: &[Complex64],
    lambda: f64,
    grid: &GridSpec,
    s: FracOrder,
    quad: ResolventQuadrature,
) -> Result<Vec<Complex64>> {
    Resolvent::new(grid, s, lambda, quad)?.apply(src)
}

/// Multiply each coefficient by `1 / (1 + Δt |ξ|^{2s})`.
pub fn frac_heat_multiplier(h: &[Complex64], modes: &[f64], dt: f64, s: FracOrder) -> Result<Vec<Complex64>> {
    if h.len() != modes.len() {
        return Err(Error::LengthMismatch { expected: modes.len(), got: h.len() });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    Ok(h.iter().zip(modes).map(|(c, &xi)| c / (1.0 + dt * s.symbol(xi))).collect())
}

/// `‖[⟨v⟩^p, (-Δ)^s] ḡ‖ / (‖⟨v⟩^p ḡ‖ + ‖⟨v⟩^{p-1} ∂_v ḡ‖)` in `L²_v`.
pub fn commutator_probe(g: &[f64], p: f64, grid: &GridSpec, s: FracOrder) -> Result<f64> {
    let d = grid.d as f64;
    if !(p > -s.two_s() && p < 0.5 * d + s.two_s()) {
        return Err(Error::InvalidParameter(format!("weight power p = {p} out of range")));
    }
    if g.len() != grid.nv {
        return Err(Error::LengthMismatch { expected: grid.nv, got: g.len() });
    }
    if g.iter().all(|&x| x == 0.0) || p == 0.0 {
        return Ok(0.0);
    }
    let v = grid.v_nodes();
    let h = grid.dv();
    let wp: Vec<f64> = v.iter().map(|x| (1.0 + x * x).powf(0.5 * p)).collect();
    let weighted: Vec<f64> = g.iter().zip(&wp).map(|(a, b)| a * b).collect();
    let lap_g = frac_laplacian_quadrature(g, grid, s)?;
    let lap_wg = frac_laplacian_quadrature(&weighted, grid, s)?;
    let norm = |f: &mut dyn Iterator<Item = f64>| (h * f.map(|x| x * x).sum::<f64>()).sqrt();
    let comm = norm(&mut wp.iter().zip(&lap_g).zip(&lap_wg).map(|((w, a), b)| w * a - b));
    let n = g.len();
    let dg = (0..n).map(|i| {
        let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
        (g[b] - g[a]) / ((b - a) as f64 * h) * (1.0 + v[i] * v[i]).powf(0.5 * (p - 1.0))
    });
    let denom = norm(&mut weighted.iter().copied()) + norm(&mut dg.into_iter());
    Ok(comm / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{build_equilibrium, equilibrium_hat};
    use crate::grid::{Direction, PeriodicTransform};

    fn order(s: f64) -> FracOrder {
        FracOrder::new(s).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn normalization_constants() {
        assert!((normalization_constant(0.5, 1).unwrap() - 1.0 / PI).abs() < 1e-12);
        let quarter = 1.0 / (2.0 * (2.0 * PI).sqrt());
        assert!((normalization_constant(0.25, 1).unwrap() - quarter).abs() < 1e-12);
        assert!(normalization_constant(0.0, 1).is_err());
        assert!(normalization_constant(1.0, 1).is_err());
        for s in [0.1, 0.3, 0.7, 0.9] {
            assert!(normalization_constant(s, 1).unwrap() > 0.0);
        }
    }

    #[test]
    fn multiplier_examples() {
        let out = frac_laplacian_multiplier(&[c(1.0)], &[2.0], order(0.75)).unwrap();
        assert!((out[0].re - 2f64.powf(1.5)).abs() < 1e-14);
        let out = frac_laplacian_multiplier(&[c(1.0); 4], &[-2.0, -1.0, 0.0, 1.0], order(0.5)).unwrap();
        let got: Vec<f64> = out.iter().map(|z| z.re).collect();
        assert_eq!(got, vec![2.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn quadrature_matches_multiplier_route() {
        let g = GridSpec::new(2.0 * PI, 8, 400.0, 4096).unwrap();
        let s = order(0.5);
        let v = g.v_nodes();
        let f: Vec<f64> = v.iter().map(|x| (-x * x).exp()).collect();
        let quad = frac_laplacian_quadrature(&f, &g, s).unwrap();
        let t = PeriodicTransform::velocity(&g);
        let fc: Vec<Complex64> = f.iter().map(|&x| c(x)).collect();
        let hat = t.apply(&fc, Direction::Forward).unwrap();
        let lap = frac_laplacian_multiplier(&hat, &g.k_modes(), s).unwrap();
        let spec = t.apply(&lap, Direction::Inverse).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..g.nv {
            if v[i].abs() <= g.lv / 4.0 {
                num += (quad[i] - spec[i].re).powi(2);
                den += spec[i].re.powi(2);
            }
        }
        assert!((num / den).sqrt() < 1e-3, "{}", (num / den).sqrt());
        assert!(frac_laplacian_quadrature(&vec![0.0; g.nv], &g, s).unwrap().iter().all(|&x| x == 0.0));
        assert!(frac_laplacian_quadrature(&f[1..], &g, s).is_err());
    }

    #[test]
    fn quadrature_annihilates_equilibrium_drift() {
        let g = GridSpec::default();
        for s in [0.5, 0.75] {
            let s = order(s);
            let eq = build_equilibrium(&g, s).unwrap();
            let lap = frac_laplacian_quadrature(&eq.m_values, &g, s).unwrap();
            let v = g.v_nodes();
            let h = g.dv();
            let n = g.nv;
            let vm: Vec<f64> = v.iter().zip(&eq.m_values).map(|(a, b)| a * b).collect();
            let drift: Vec<f64> = (0..n)
                .map(|i| {
                    let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                    (vm[b] - vm[a]) / ((b - a) as f64 * h)
                })
                .collect();
            let num: f64 = lap.iter().zip(&drift).map(|(a, b)| (a - b).powi(2)).sum();
            let den: f64 = drift.iter().map(|b| b * b).sum();
            assert!((num / den).sqrt() < 1e-2, "{}", (num / den).sqrt());
        }
    }

    fn fine_k_grid() -> GridSpec {
        // Δk = 1/64 puts k = 1 on a node
        GridSpec::new(2.0 * PI, 8, 128.0 * PI, 4096).unwrap()
    }

    #[test]
    fn lfp_apply_examples() {
        let g = fine_k_grid();
        let s = order(0.5);
        let k = g.k_modes();
        let mh: Vec<Complex64> = k.iter().map(|&x| c(equilibrium_hat(x, s))).collect();
        let out = lfp_apply(&mh, &g, s).unwrap();
        assert!(out.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-6);
        let gauss: Vec<Complex64> = k.iter().map(|&x| c((-x * x).exp())).collect();
        let out = lfp_apply(&gauss, &g, s).unwrap();
        let i = g.k_zero() + 64;
        assert!((k[i] - 1.0).abs() < 1e-14);
        assert!((out[i].re - (-1f64).exp()).abs() < 1e-4);
        assert_eq!(out[g.k_zero()], c(0.0));
    }

    fn smooth_source(g: &GridSpec) -> Vec<Complex64> {
        g.k_modes()
            .iter()
            .map(|&k| Complex64::new((-k * k).exp() * (1.0 + 0.3 * k), 0.2 * k * (-0.5 * k * k).exp()))
            .collect()
    }

    #[test]
    fn resolvent_kernel_identity() {
        let g = GridSpec::default();
        for s in [0.25, 0.5, 0.75] {
            let s = order(s);
            let mh: Vec<Complex64> = g.k_modes().iter().map(|&k| c(equilibrium_hat(k, s))).collect();
            for lambda in [0.5, 1.0, 10.0] {
                let out = lfp_resolvent(&mh, lambda, &g, s, ResolventQuadrature::default()).unwrap();
                let err = out
                    .iter()
                    .zip(&mh)
                    .map(|(a, b)| (a - b / lambda).norm() / (b.re / lambda))
                    .fold(0.0, f64::max);
                assert!(err < 1e-8, "s={s:?} lambda={lambda}: {err:e}");
            }
        }
    }

    #[test]
    fn resolvent_zero_mode_and_errors() {
        let g = GridSpec::new(2.0 * PI, 8, 100.0, 256).unwrap();
        let mut src = vec![c(0.0); g.nv];
        src[g.k_zero()] = c(1.0);
        let out = lfp_resolvent(&src, 4.0, &g, order(0.5), ResolventQuadrature::default()).unwrap();
        assert_eq!(out[g.k_zero()], c(0.25));
        assert!(matches!(
            lfp_resolvent(&src, 0.0, &g, order(0.5), ResolventQuadrature::default()),
            Err(Error::NonPositiveShift(_))
        ));
        let short = ResolventQuadrature { tau_max: Some(1.0), ..Default::default() };
        assert!(lfp_resolvent(&src, 1.0, &g, order(0.5), short).is_err());
    }

    #[test]
    fn resolvent_residual() {
        let g = fine_k_grid();
        let s = order(0.5);
        let src = smooth_source(&g);
        let lambda = 1.0;
        let out = lfp_resolvent(&src, lambda, &g, s, ResolventQuadrature::default()).unwrap();
        let l = lfp_apply(&out, &g, s).unwrap();
        let num: f64 = out.iter().zip(&l).zip(&src).map(|((gk, lk), sk)| (gk * lambda - lk - sk).norm_sqr()).sum();
        let den: f64 = src.iter().map(|z| z.norm_sqr()).sum();
        assert!((num / den).sqrt() < 1e-3, "{}", (num / den).sqrt());
    }

    #[test]
    fn resolvent_panel_doubling() {
        let g = GridSpec::default();
        let s = order(0.5);
        let mh: Vec<Complex64> = g.k_modes().iter().map(|&k| c(equilibrium_hat(k, s))).collect();
        let src = smooth_source(&g);
        for lambda in [0.5, 3.0] {
            let a = Resolvent::new(&g, s, lambda, ResolventQuadrature::default()).unwrap();
            let b = Resolvent::new(&g, s, lambda, ResolventQuadrature { n_panels: 80, ..Default::default() }).unwrap();
            for input in [&mh, &src] {
                let (x, y) = (a.apply(input).unwrap(), b.apply(input).unwrap());
                let d = x.iter().zip(&y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
                assert!(d < 1e-8, "{d:e}");
            }
        }
    }

    #[test]
    fn analytic_route_matches_banded_route() {
        let g = fine_k_grid();
        let s = order(0.5);
        let r = Resolvent::new(&g, s, 2.0, ResolventQuadrature::default()).unwrap();
        let q = |k: f64| (-k * k).exp() / equilibrium_hat(k, s);
        let src: Vec<Complex64> = g.k_modes().iter().map(|&k| c((-k * k).exp())).collect();
        let banded = r.apply(&src).unwrap();
        for i in [g.k_zero(), g.k_zero() + 3, g.k_zero() + 64, g.k_zero() - 100] {
            let k = g.k_modes()[i];
            let a = r.apply_analytic(k, q, None);
            assert!((a - banded[i].re).abs() < 1e-8 * a.abs(), "k={k}: {a} vs {}", banded[i].re);
        }
        // a cusp in q is integrated accurately when flagged
        let cusp = |k: f64| (k - 0.5f64).abs().sqrt();
        let with = r.apply_analytic(1.0, cusp, Some(0.5));
        let reference = {
            let rr = Resolvent::new(&g, s, 2.0, ResolventQuadrature { n_panels: 4000, ..Default::default() }).unwrap();
            rr.apply_analytic(1.0, cusp, Some(0.5))
        };
        assert!((with - reference).abs() < 1e-10);
    }

    #[test]
    fn heat_multiplier() {
        let s = order(0.5);
        let out = frac_heat_multiplier(&[c(1.0), c(1.0)], &[0.0, 4.0], 0.1, s).unwrap();
        assert_eq!(out[0], c(1.0));
        assert!((out[1].re - 1.0 / 1.4).abs() < 1e-15);
        let modes: Vec<f64> = (-8..8).map(|j| j as f64).collect();
        let h: Vec<Complex64> = modes.iter().map(|&x| Complex64::new(1.0 + x, -x)).collect();
        let twice = frac_heat_multiplier(&frac_heat_multiplier(&h, &modes, 0.3, s).unwrap(), &modes, 0.3, s).unwrap();
        for ((a, b), &x) in twice.iter().zip(&h).zip(&modes) {
            let m = 1.0 / (1.0 + 0.3 * s.symbol(x));
            assert!((a - b * m * m).norm() <= 1e-15 * b.norm());
        }
    }

    #[test]
    fn commutator_examples() {
        let s = order(0.5);
        let g1 = GridSpec::new(2.0 * PI, 8, 60.0, 1024).unwrap();
        let f = |g: &GridSpec| g.v_nodes().iter().map(|x| (-x * x).exp()).collect::<Vec<_>>();
        assert_eq!(commutator_probe(&vec![0.0; 1024], 1.0, &g1, s).unwrap(), 0.0);
        assert_eq!(commutator_probe(&f(&g1), 0.0, &g1, s).unwrap(), 0.0);
        let g2 = GridSpec::new(2.0 * PI, 8, 60.0, 2048).unwrap();
        let a = commutator_probe(&f(&g1), 1.0, &g1, s).unwrap();
        let b = commutator_probe(&f(&g2), 1.0, &g2, s).unwrap();
        assert!(a.is_finite() && a > 0.0 && (a - b).abs() <= 0.1 * b, "{a} {b}");
        assert!(commutator_probe(&f(&g1), 2.0, &g1, s).is_err());
    }
}
