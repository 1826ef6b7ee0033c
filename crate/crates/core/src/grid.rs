//! Grids, Fourier conventions and discrete transforms.
//!
//! Coefficients use the continuum normalisation
//! `ĝ(k) ≈ ∫ g(v) e^{-ikv} dv` with inverse `g(v) = (2π)^{-1} ∫ ĝ(k) e^{ikv} dk`.
//! Mode lists are stored in natural order `-N/2, …, N/2 - 1`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic phase-space grid: `x ∈ [0, Lx)` and `v ∈ [-Lv/2, Lv/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    #[serde(default = "default_dim")]
    pub d: usize,
    pub lx: f64,
    pub nx: usize,
    pub lv: f64,
    pub nv: usize,
}

fn default_dim() -> usize {
    1
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            d: 1,
            lx: 2.0 * std::f64::consts::PI,
            nx: 64,
            lv: 400.0,
            nv: 4096,
        }
    }
}

impl GridSpec {
    pub fn new(lx: f64, nx: usize, lv: f64, nv: usize) -> Result<Self> {
        let g = Self { d: 1, lx, nx, lv, nv };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d != 1 {
            return Err(Error::InvalidGrid(format!("only d = 1 is implemented, got d = {}", self.d)));
        }
        for (name, n) in [("nx", self.nx), ("nv", self.nv)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!("{name} = {n} must be a power of two >= 8")));
            }
        }
        if !(self.lx > 0.0 && self.lx.is_finite() && self.lv > 0.0 && self.lv.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "domain lengths must be positive, got lx = {}, lv = {}",
                self.lx, self.lv
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    #[inline]
    pub fn dv(&self) -> f64 {
        self.lv / self.nv as f64
    }

    #[inline]
    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lv
    }

    /// Index of the `ξ = 0` / `k = 0` entry in natural order.
    #[inline]
    pub fn x_zero(&self) -> usize {
        self.nx / 2
    }

    #[inline]
    pub fn k_zero(&self) -> usize {
        self.nv / 2
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| i as f64 * self.dx()).collect()
    }

    pub fn v_nodes(&self) -> Vec<f64> {
        let dv = self.dv();
        (0..self.nv).map(|n| -0.5 * self.lv + n as f64 * dv).collect()
    }

    pub fn k_modes(&self) -> Vec<f64> {
        let dk = self.dk();
        let half = (self.nv / 2) as i64;
        (0..self.nv as i64).map(|m| (m - half) as f64 * dk).collect()
    }

    /// Largest `|k|` covered by the interpolation domain.
    pub fn k_max(&self) -> f64 {
        (self.nv / 2) as f64 * self.dk()
    }
}

/// x-modes `ξ_j = 2πj/Lx`, `j = -Nx/2 … Nx/2 - 1`.
pub fn x_modes(grid: &GridSpec) -> Vec<f64> {
    let half = (grid.nx / 2) as i64;
    let scale = 2.0 * std::f64::consts::PI / grid.lx;
    (0..grid.nx as i64).map(|j| (j - half) as f64 * scale).collect()
}

/// Which velocity representation a field currently holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VelocityRep {
    Physical,
    Fourier,
}

/// Micro unknown on the (x-mode, velocity axis) lattice, row-major in x-mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub nx: usize,
    pub nv: usize,
    pub rep: VelocityRep,
    pub data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &GridSpec, rep: VelocityRep) -> Self {
        Self {
            nx: grid.nx,
            nv: grid.nv,
            rep,
            data: vec![Complex64::new(0.0, 0.0); grid.nx * grid.nv],
        }
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.nv..(j + 1) * self.nv]
    }

    #[inline]
    pub fn row_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.nv..(j + 1) * self.nv]
    }

    #[inline]
    pub fn at(&self, j: usize, m: usize) -> Complex64 {
        self.data[j * self.nv + m]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, Complex64> {
        self.data.chunks_exact(self.nv)
    }

    pub fn rows_mut(&mut self) -> std::slice::ChunksExactMut<'_, Complex64> {
        self.data.chunks_exact_mut(self.nv)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Direction of a velocity transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Physical samples to continuum-normalised coefficients.
    Forward,
    /// Coefficients back to physical samples.
    Inverse,
}

/// Continuum-normalised transform on a periodic axis of length `length`
/// whose first node sits at `origin`.
#[derive(Clone)]
pub struct PeriodicTransform {
    n: usize,
    length: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    phase: Vec<Complex64>,
}

impl std::fmt::Debug for PeriodicTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicTransform")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PeriodicTransform {
    pub fn new(n: usize, length: f64, origin: f64) -> Self {
        let mut planner = FftPlanner::new();
        let half = (n / 2) as i64;
        let phase = (0..n as i64)
            .map(|i| {
                let k = 2.0 * std::f64::consts::PI * (i - half) as f64 / length;
                Complex64::from_polar(1.0, -k * origin)
            })
            .collect();
        Self {
            n,
            length,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            phase,
        }
    }

    /// Velocity transform for `grid` (nodes start at `-Lv/2`).
    pub fn velocity(grid: &GridSpec) -> Self {
        Self::new(grid.nv, grid.lv, -0.5 * grid.lv)
    }

    /// Spatial transform for `grid` (nodes start at 0).
    pub fn spatial(grid: &GridSpec) -> Self {
        Self::new(grid.nx, grid.lx, 0.0)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Physical samples → coefficients, in place. Output in natural mode order.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.fwd.process(buf);
        buf.rotate_left(self.n / 2);
        let h = self.length / self.n as f64;
        for (b, p) in buf.iter_mut().zip(&self.phase) {
            *b *= p * h;
        }
    }

    /// Coefficients (natural order) → physical samples, in place.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        let scale = 1.0 / self.length;
        for (b, p) in buf.iter_mut().zip(&self.phase) {
            *b *= p.conj() * scale;
        }
        buf.rotate_right(self.n / 2);
        self.inv.process(buf);
    }

    pub fn apply(&self, input: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
        if input.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: input.len() });
        }
        let mut buf = input.to_vec();
        match direction {
            Direction::Forward => self.forward_in_place(&mut buf),
            Direction::Inverse => self.inverse_in_place(&mut buf),
        }
        Ok(buf)
    }
}

/// One-shot velocity transform. Prefer [`PeriodicTransform::velocity`] in loops.
pub fn v_fourier(samples: &[Complex64], grid: &GridSpec, direction: Direction) -> Result<Vec<Complex64>> {
    PeriodicTransform::velocity(grid).apply(samples, direction)
}

/// Cubic (4-point Lagrange) interpolation of a k-grid spectrum at `k_star`.
/// Values outside the grid are zero.
pub fn sample_spectrum(coeffs: &[Complex64], grid: &GridSpec, k_star: f64) -> Complex64 {
    let n = coeffs.len();
    debug_assert_eq!(n, grid.nv);
    let dk = grid.dk();
    let pos = k_star / dk + (n / 2) as f64;
    if !pos.is_finite() || pos < 0.0 || pos > (n - 1) as f64 {
        return Complex64::new(0.0, 0.0);
    }
    let cell = (pos.floor() as usize).min(n - 2);
    let start = cell.saturating_sub(1).min(n - 4);
    let x = pos - start as f64;
    let w = lagrange4(x);
    coeffs[start..start + 4]
        .iter()
        .zip(w)
        .map(|(c, wi)| c * wi)
        .sum()
}

/// Cubic Lagrange weights on nodes `0, 1, 2, 3` evaluated at `x`.
#[inline]
pub(crate) fn lagrange4(x: f64) -> [f64; 4] {
    let (a, b, c, d) = (x, x - 1.0, x - 2.0, x - 3.0);
    [
        -b * c * d / 6.0,
        a * c * d / 2.0,
        -a * b * d / 2.0,
        a * b * c / 6.0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn x_modes_examples() {
        let g = GridSpec { d: 1, lx: 2.0 * std::f64::consts::PI, nx: 4, lv: 1.0, nv: 8 };
        let m = x_modes(&g);
        for (a, b) in m.iter().zip([-2.0, -1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let g = GridSpec { lx: 1.0, nx: 2, ..g };
        let m = x_modes(&g);
        assert!((m[0] + 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(m[1], 0.0);
        let g = GridSpec { lx: 2.0 * std::f64::consts::PI, nx: 8, ..g };
        let m = x_modes(&g);
        assert_eq!(m.iter().filter(|&&v| v == 0.0).count(), 1);
        for (j, v) in m.iter().enumerate() {
            assert!((v - (j as f64 - 4.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1.0, 6, 1.0, 8).is_err());
        assert!(GridSpec::new(1.0, 8, -1.0, 8).is_err());
        assert!(GridSpec::new(1.0, 8, 1.0, 12).is_err());
        assert!(GridSpec::new(1.0, 8, 1.0, 16).is_ok());
    }

    #[test]
    fn constant_transforms_to_period_length() {
        let g = GridSpec::new(1.0, 8, 10.0, 64).unwrap();
        let out = v_fourier(&vec![c(1.0); 64], &g, Direction::Forward).unwrap();
        for (m, v) in out.iter().enumerate() {
            if m == g.k_zero() {
                assert!((v.re - 10.0).abs() < 1e-12 && v.im.abs() < 1e-12);
            } else {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let g = GridSpec::new(1.0, 8, 37.0, 256).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<Complex64> = (0..256).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let t = PeriodicTransform::velocity(&g);
        let y = t.apply(&t.apply(&x, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        let z = t.apply(&t.apply(&x, Direction::Inverse).unwrap(), Direction::Forward).unwrap();
        let nx: f64 = x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for w in [&y, &z] {
            let e: f64 = x.iter().zip(w.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(e / nx < 1e-12, "roundtrip error {e}");
        }
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = GridSpec::new(1.0, 8, 40.0, 512).unwrap();
        let v = g.v_nodes();
        let samples: Vec<Complex64> = v.iter().map(|&v| c((-0.5 * v * v).exp())).collect();
        let out = v_fourier(&samples, &g, Direction::Forward).unwrap();
        let ks = g.k_modes();
        for (k, val) in ks.iter().zip(&out) {
            if k.abs() < 10.0 {
                let exact = (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * k * k).exp();
                assert!((val - c(exact)).norm() < 1e-8, "k = {k}");
            }
        }
    }

    #[test]
    fn parseval_and_linearity() {
        let g = GridSpec::new(1.0, 8, 23.0, 128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: Vec<Complex64> = (0..128).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let b: Vec<Complex64> = (0..128).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let t = PeriodicTransform::velocity(&g);
        let fa = t.apply(&a, Direction::Forward).unwrap();
        let fb = t.apply(&b, Direction::Forward).unwrap();
        let lhs: f64 = fa.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dk() / (2.0 * std::f64::consts::PI);
        let rhs: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dv();
        assert!((lhs - rhs).abs() / rhs < 1e-10);

        let (p, q) = (Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
        let comb: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| p * x + q * y).collect();
        let fc = t.apply(&comb, Direction::Forward).unwrap();
        let scale: f64 = fc.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for ((x, y), z) in fa.iter().zip(&fb).zip(&fc) {
            assert!((p * x + q * y - z).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let g = GridSpec::new(1.0, 8, 1.0, 16).unwrap();
        assert!(matches!(
            v_fourier(&[c(1.0); 8], &g, Direction::Forward),
            Err(Error::LengthMismatch { expected: 16, got: 8 })
        ));
    }

    #[test]
    fn spectrum_sampling() {
        let g = GridSpec::new(1.0, 8, 20.0, 64).unwrap();
        let ks = g.k_modes();
        let lin: Vec<Complex64> = ks.iter().map(|&k| c(k)).collect();
        assert_eq!(sample_spectrum(&lin, &g, ks[40]), lin[40]);
        assert_eq!(sample_spectrum(&lin, &g, 2.0 * g.k_max()), c(0.0));
        let z = sample_spectrum(&lin, &g, 0.5 * g.dk());
        assert!((z.re - 0.5 * g.dk()).abs() < 1e-12);
        let cubic: Vec<Complex64> = ks.iter().map(|&k| c(k * k * k - k)).collect();
        let kk = 1.37;
        assert!((sample_spectrum(&cubic, &g, kk).re - (kk * kk * kk - kk)).abs() < 1e-10);
    }
}
