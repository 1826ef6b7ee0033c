//! The heavy-tailed equilibrium `M(v)` with `M̂(k) = exp(-|k|^{2s}/(2s))`.
//!
//! The v-samples are produced by the discrete inverse transform of `M̂` on the
//! k-grid. That transform returns the periodisation `Σ_j M(v + j Lv)`, so the
//! image copies are removed again using the algebraic tail expansion of the
//! symmetric stable density. The remaining table is the restriction of the
//! whole-line density to the box.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, PeriodicTransform};
use crate::order::FracOrder;

/// Largest negative value tolerated (and clamped) in the sampled density.
pub const NEGATIVITY_FLOOR: f64 = -1e-12;

/// Number of image copies summed term by term before the zeta remainder.
const EXPLICIT_IMAGES: usize = 256;

/// `M̂(k) = exp(-|k|^{2s} / (2s))`.
#[inline]
pub fn equilibrium_hat(k: f64, s: FracOrder) -> f64 {
    (-s.symbol(k) / s.two_s()).exp()
}

/// Equilibrium sampled on both grids, plus tail diagnostics.
#[derive(Debug, Clone)]
pub struct EquilibriumTable {
    pub s: FracOrder,
    pub d: usize,
    pub grid: GridSpec,
    /// `M(v_n)` on the velocity nodes.
    pub m_values: Vec<f64>,
    /// `M̂(k_m)` on the k-grid.
    pub m_hat: Vec<f64>,
    /// Fitted `C` in `M(v) ≈ C / |v|^{1+2s}` over the outer tenth of the box.
    pub tail_constant: f64,
}

impl EquilibriumTable {
    /// `Δv Σ M(v_n)`.
    pub fn discrete_mass(&self) -> f64 {
        self.grid.dv() * self.m_values.iter().sum::<f64>()
    }

    /// Estimated mass of `M` outside the box, `2C / (2s (Lv/2)^{2s})`.
    pub fn tail_mass_estimate(&self) -> f64 {
        let s = self.s.get();
        2.0 * self.tail_constant / (2.0 * s * (0.5 * self.grid.lv).powf(2.0 * s))
    }

    /// Leading coefficient of the stable-law tail expansion.
    pub fn analytic_tail_constant(&self) -> f64 {
        tail_coefficient(self.s, 1)
    }

    /// Write `(v, M)` and `(k, M̂)` tables as CSV.
    pub fn write_csv(&self, v_path: &Path, k_path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct VRow {
            v: f64,
            m: f64,
        }
        #[derive(Serialize)]
        struct KRow {
            k: f64,
            m_hat: f64,
        }
        let mut w = csv::Writer::from_path(v_path)?;
        for (v, m) in self.grid.v_nodes().into_iter().zip(&self.m_values) {
            w.serialize(VRow { v, m: *m })?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(k_path)?;
        for (k, m) in self.grid.k_modes().into_iter().zip(&self.m_hat) {
            w.serialize(KRow { k, m_hat: *m })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sample `M` and `M̂` on `grid`.
pub fn build_equilibrium(grid: &GridSpec, s: FracOrder) -> Result<EquilibriumTable> {
    grid.validate()?;
    let m_hat: Vec<f64> = grid.k_modes().iter().map(|&k| equilibrium_hat(k, s)).collect();
    let mut m_values = derivative_samples(grid, s, &m_hat, 0);

    let v = grid.v_nodes();
    for (n, val) in m_values.iter_mut().enumerate() {
        if *val < NEGATIVITY_FLOOR {
            return Err(Error::NegativeEquilibrium { v: v[n], value: *val });
        }
    }
    let floor = m_values
        .iter()
        .copied()
        .filter(|&x| x > 0.0)
        .fold(f64::INFINITY, f64::min);
    for val in m_values.iter_mut() {
        if *val <= 0.0 {
            *val = floor;
        }
    }

    let tail_constant = fit_tail_constant(&v, &m_values, s);
    Ok(EquilibriumTable {
        s,
        d: grid.d,
        grid: *grid,
        m_values,
        m_hat,
        tail_constant,
    })
}

/// `max_v |∂_v^m M| / M` over the grid, by spectral differentiation.
pub fn derivative_ratio_check(table: &EquilibriumTable, m: usize) -> Result<f64> {
    if m > 2 {
        return Err(Error::InvalidParameter(format!("derivative order {m} > 2")));
    }
    if m == 0 {
        return Ok(1.0);
    }
    let deriv = derivative_samples(&table.grid, table.s, &table.m_hat, m);
    Ok(deriv
        .iter()
        .zip(&table.m_values)
        .map(|(d, mv)| d.abs() / mv)
        .fold(0.0, f64::max))
}

/// Least-squares slope of `log M` against `log |v|` on `[Lv/20, Lv/2)`.
pub fn tail_slope(table: &EquilibriumTable) -> f64 {
    let lo = table.grid.lv / 20.0;
    let (xs, ys): (Vec<f64>, Vec<f64>) = table
        .grid
        .v_nodes()
        .iter()
        .zip(&table.m_values)
        .filter(|(v, _)| v.abs() >= lo)
        .map(|(v, m)| (v.abs().ln(), m.ln()))
        .unzip();
    crate::metrics::least_squares(&xs, &ys).0
}

/// `∂_v^order M` on the velocity nodes: periodised inverse transform of
/// `(ik)^order M̂`, minus the image copies.
fn derivative_samples(grid: &GridSpec, s: FracOrder, m_hat: &[f64], order: usize) -> Vec<f64> {
    let t = PeriodicTransform::velocity(grid);
    let mut buf: Vec<Complex64> = grid
        .k_modes()
        .iter()
        .zip(m_hat)
        .map(|(&k, &mh)| Complex64::new(0.0, k).powu(order as u32) * mh)
        .collect();
    if order % 2 == 1 {
        // the unpaired -k_max mode would break oddness
        buf[0] = Complex64::new(0.0, 0.0);
    }
    t.inverse_in_place(&mut buf);
    let v = grid.v_nodes();
    let series = TailSeries::new(s);
    let mut out: Vec<f64> = buf
        .iter()
        .zip(&v)
        .map(|(z, &vn)| z.re - image_sum(&series, vn, grid.lv, s, order))
        .collect();
    symmetrise(&mut out, if order.is_multiple_of(2) { 1.0 } else { -1.0 });
    out
}

/// Force `f(v_n) = parity · f(v_{N-n})`; node 0 (`v = -Lv/2`) has no mirror.
fn symmetrise(f: &mut [f64], parity: f64) {
    let n = f.len();
    for i in 1..n / 2 {
        let avg = 0.5 * (f[i] + parity * f[n - i]);
        f[i] = avg;
        f[n - i] = parity * avg;
    }
    if parity < 0.0 {
        f[n / 2] = 0.0;
    }
}

fn fit_tail_constant(v: &[f64], m: &[f64], s: FracOrder) -> f64 {
    let vmax = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let p = 1.0 + s.two_s();
    // least squares of a constant: the sample mean
    let (sum, count) = v
        .iter()
        .zip(m)
        .filter(|(x, _)| x.abs() >= 0.9 * vmax)
        .fold((0.0, 0usize), |(acc, c), (x, mv)| (acc + mv * x.abs().powf(p), c + 1));
    sum / count.max(1) as f64
}

/// Coefficient `a_j` of `|x|^{-(2sj+1)}` in the large-|x| expansion
/// `M(x) ~ Σ_j a_j |x|^{-(2sj+1)}`.
pub(crate) fn tail_coefficient(s: FracOrder, j: usize) -> f64 {
    let s = s.get();
    let jf = j as f64;
    let mag = (ln_gamma(2.0 * s * jf + 1.0) - ln_gamma(jf + 1.0) - jf * (2.0 * s).ln()).exp();
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    sign * mag * (PI * s * jf).sin() / PI
}

/// `D^r |x|^{-q} = (-sgn x)^r (q)_r |x|^{-q-r}`.
#[inline]
fn power_derivative(x: f64, q: f64, r: usize) -> f64 {
    let ax = x.abs();
    let mut rising = 1.0;
    for i in 0..r {
        rising *= q + i as f64;
    }
    let sign = if r % 2 == 1 { -x.signum() } else { 1.0 };
    sign * rising * ax.powf(-q - r as f64)
}

/// Coefficients `(a_j, 2sj + 1)` of the tail expansion.
pub(crate) struct TailSeries {
    terms: Vec<(f64, f64)>,
}

impl TailSeries {
    pub(crate) fn new(s: FracOrder) -> Self {
        let terms = (1..=40)
            .map(|j| (tail_coefficient(s, j), s.two_s() * j as f64 + 1.0))
            .collect();
        Self { terms }
    }

    /// `D^r` of the expansion at `x`, truncated at its smallest term.
    pub(crate) fn eval(&self, x: f64, r: usize) -> f64 {
        let mut total = 0.0;
        let mut prev = f64::INFINITY;
        for &(a, q) in &self.terms {
            if a == 0.0 {
                continue;
            }
            let term = a * power_derivative(x, q, r);
            let mag = term.abs();
            if mag > prev {
                break;
            }
            total += term;
            if mag < 1e-18 * total.abs() {
                break;
            }
            prev = mag;
        }
        total
    }
}

/// `Σ_{j≠0} D^r M(v + j L)` for `|v| ≤ L/2`.
fn image_sum(series: &TailSeries, v: f64, l: f64, s: FracOrder, r: usize) -> f64 {
    let mut total = 0.0;
    for j in 1..=EXPLICIT_IMAGES {
        let shift = j as f64 * l;
        total += series.eval(v + shift, r) + series.eval(v - shift, r);
    }
    // remainder: leading term only, summed with the Hurwitz zeta function
    let c = tail_coefficient(s, 1);
    let q = 1.0 + s.two_s();
    let a_plus = (EXPLICIT_IMAGES + 1) as f64 + v / l;
    let a_minus = (EXPLICIT_IMAGES + 1) as f64 - v / l;
    let rising: f64 = (0..r).map(|i| q + i as f64).product();
    let qr = q + r as f64;
    let zp = hurwitz_zeta(qr, a_plus);
    let zm = hurwitz_zeta(qr, a_minus);
    // v + jL > 0 gives (-1)^r, v - jL < 0 gives (+1)^r
    let signed = if r % 2 == 1 { zm - zp } else { zp + zm };
    total + c * rising * l.powf(-qr) * signed
}

/// Hurwitz zeta `Σ_{n≥0} (n + a)^{-p}` for `p > 1` and large `a`, by
/// Euler–Maclaurin with four Bernoulli corrections.
pub(crate) fn hurwitz_zeta(p: f64, a: f64) -> f64 {
    let direct = 8usize;
    let mut sum: f64 = (0..direct).map(|n| (a + n as f64).powf(-p)).sum();
    let x = a + direct as f64;
    sum += x.powf(1.0 - p) / (p - 1.0) + 0.5 * x.powf(-p);
    const B: [f64; 4] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
    let mut rising = p; // p (p+1) ... (p + 2k - 2)
    let mut fact = 2.0; // (2k)!
    for (k, b) in B.iter().enumerate() {
        let kk = k + 1;
        sum += b / fact * rising * x.powf(-p - (2 * kk - 1) as f64);
        rising *= (p + (2 * kk - 1) as f64) * (p + (2 * kk) as f64);
        fact *= ((2 * kk + 1) * (2 * kk + 2)) as f64;
    }
    sum
}
