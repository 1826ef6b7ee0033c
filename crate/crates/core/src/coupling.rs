//! The micro–macro coupling `I(η, M)` for `η(x, v) = h(x + εv)`.
//!
//! In (ξ, k) variables it is the closed form
//! `Î(ξ, k) = ĥ(ξ) [|k|^{2s} - |εξ|^{2s} - |k - εξ|^{2s}] M̂(k - εξ)`;
//! a direct singular-integral quadrature is kept as an independent check.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::equilibrium::{equilibrium_hat, tail_coefficient, EquilibriumTable, TailSeries};
use crate::error::{Error, Result};
use crate::fracops::normalization_constant;
use crate::grid::{x_modes, GridSpec, PeriodicTransform, SpectralField, VelocityRep};
use crate::metrics::least_squares;
use crate::order::FracOrder;

/// `|k|^{2s} - |a|^{2s} - |k - a|^{2s}`.
#[inline]
pub fn coupling_bracket(k: f64, a: f64, s: FracOrder) -> f64 {
    s.symbol(k) - s.symbol(a) - s.symbol(k - a)
}

/// `Î(ξ, k) / ĥ(ξ)` with `a = εξ`.
#[inline]
pub fn coupling_kernel(k: f64, a: f64, s: FracOrder) -> f64 {
    coupling_bracket(k, a, s) * equilibrium_hat(k - a, s)
}

/// `Î / (ĥ M̂(k))`, the form consumed by the resolvent.
#[inline]
pub fn coupling_kernel_over_equilibrium(k: f64, a: f64, s: FracOrder) -> f64 {
    coupling_bracket(k, a, s) * ((s.symbol(k) - s.symbol(k - a)) / s.two_s()).exp()
}

#[derive(Debug, Clone)]
pub struct CouplingSpectrum {
    /// `Î(ξ_j, k_m)` in v-Fourier representation.
    pub values: SpectralField,
    pub eps: f64,
    pub s: FracOrder,
}

/// Closed-form coupling spectrum for macro coefficients `ĥ(ξ_j)`.
pub fn coupling_hat(h_hat: &[Complex64], eps: f64, grid: &GridSpec, s: FracOrder) -> Result<CouplingSpectrum> {
    if h_hat.len() != grid.nx {
        return Err(Error::LengthMismatch { expected: grid.nx, got: h_hat.len() });
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be nonnegative")));
    }
    let xi = x_modes(grid);
    let k = grid.k_modes();
    let mut values = SpectralField::zeros(grid, VelocityRep::Fourier);
    for ((row, &x), h) in values.rows_mut().zip(&xi).zip(h_hat) {
        let a = eps * x;
        for (z, &km) in row.iter_mut().zip(&k) {
            let v = h * coupling_kernel(km, a, s);
            let bound = 2.0 * h.norm() * s.symbol(a).sqrt() * s.symbol(km - a).sqrt() * equilibrium_hat(km - a, s);
            if v.norm() > bound + 1e-12 {
                return Err(Error::InvalidParameter(format!("coupling bound violated at xi = {x}, k = {km}")));
            }
            *z = v;
        }
    }
    Ok(CouplingSpectrum { values, eps, s })
}

/// Extra periods of the velocity box added on each side of the quadrature.
const QUAD_EXTENSION: usize = 3;

/// `I(η, M)(x_i, v_n)` by direct quadrature of
/// `C_{s,d} ∫ (η(v) - η(w)) (M(w) - M(v)) / |v - w|^{1+2s} dw`.
///
/// `h` holds samples on the x-nodes; `η` is evaluated off-grid through the
/// trigonometric interpolant. The `w` nodes extend the velocity grid by
/// three box lengths on each side, with `M` continued by its tail expansion;
/// beyond that `η(w)` is replaced by its mean. Row-major output, one row per
/// x-node.
pub fn coupling_quadrature(h: &[f64], eps: f64, grid: &GridSpec, s: FracOrder, eq: &EquilibriumTable) -> Result<Vec<f64>> {
    if h.len() != grid.nx {
        return Err(Error::LengthMismatch { expected: grid.nx, got: h.len() });
    }
    let nv = grid.nv;
    let c = normalization_constant(s.get(), grid.d)?;
    let tx = PeriodicTransform::spatial(grid);
    let h_hat = tx.apply(&h.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(), crate::grid::Direction::Forward)?;
    let xi = x_modes(grid);
    let mean = h_hat[grid.x_zero()].re / grid.lx;
    let dv = grid.dv();
    let two_s = s.two_s();

    let pad = QUAD_EXTENSION * nv;
    let nw = nv + 2 * pad;
    let w0 = -0.5 * grid.lv - (pad as f64) * dv;
    let w: Vec<f64> = (0..nw).map(|i| w0 + i as f64 * dv).collect();
    let tail = TailSeries::new(s);
    let m: Vec<f64> = (0..nw)
        .map(|i| if i >= pad && i < pad + nv { eq.m_values[i - pad] } else { tail.eval(w[i], 0) })
        .collect();
    // e^{iξ ε w} for every extended node
    let phases: Vec<Complex64> = w
        .iter()
        .flat_map(|&wi| xi.iter().map(move |&x| Complex64::from_polar(1.0, x * eps * wi)))
        .collect();

    let kernel: Vec<f64> = (0..nw).map(|j| if j == 0 { 0.0 } else { dv * (j as f64 * dv).powf(-1.0 - two_s) }).collect();
    let half = 0.5 * dv;
    let central = 2.0 * half.powf(2.0 - two_s) / (2.0 - two_s);
    let slope = |f: &[f64], i: usize| (f[i + 1] - f[i - 1]) / (2.0 * dv);
    let rows: Vec<Vec<f64>> = grid
        .x_nodes()
        .par_iter()
        .map(|&x| {
            let hx: Vec<Complex64> = h_hat.iter().zip(&xi).map(|(hh, &xx)| hh * Complex64::from_polar(1.0 / grid.lx, xx * x)).collect();
            let eta: Vec<f64> = phases
                .chunks_exact(xi.len())
                .map(|ph| ph.iter().zip(&hx).map(|(p, q)| (p * q).re).sum())
                .collect();
            (pad..pad + nv)
                .map(|i| {
                    let mut acc = 0.0;
                    for j in 0..nw {
                        acc += (eta[i] - eta[j]) * (m[j] - m[i]) * kernel[i.abs_diff(j)];
                    }
                    acc -= slope(&eta, i) * slope(&m, i) * central;
                    // beyond the extension h(x + εw) runs through whole periods
                    let far = if eps == 0.0 { eta[i] } else { mean };
                    let dl = (i as f64 + 0.5) * dv;
                    let dr = ((nw - 1 - i) as f64 + 0.5) * dv;
                    acc -= (eta[i] - far) * m[i] / two_s * (dl.powf(-two_s) + dr.powf(-two_s));
                    c * acc
                })
                .collect()
        })
        .collect();
    Ok(rows.concat())
}

/// Images summed explicitly when periodising the coupling tail.
const COUPLING_IMAGES: usize = 256;

/// The closed-form coupling in (ξ, physical v) on the velocity box.
///
/// The discrete inverse transform returns the periodisation in `v`; the image
/// copies are removed with the leading tail
/// `I_ξ(v) ≈ -2s a_1 ĥ(ξ) (M̂(εξ) - e^{iεξv}) |v|^{-1-2s}`.
pub fn coupling_physical(h_hat: &[Complex64], eps: f64, grid: &GridSpec, s: FracOrder) -> Result<SpectralField> {
    let tv = PeriodicTransform::velocity(grid);
    let mut field = coupling_hat(h_hat, eps, grid, s)?.values;
    let a1 = tail_coefficient(s, 1);
    let v = grid.v_nodes();
    let xi = x_modes(grid);
    let p = 1.0 + s.two_s();
    let l = grid.lv;
    for ((row, &x), h) in field.rows_mut().zip(&xi).zip(h_hat) {
        tv.inverse_in_place(row);
        let a = eps * x;
        if a == 0.0 {
            continue;
        }
        let amp = -s.two_s() * a1 * h;
        let mh = equilibrium_hat(a, s);
        for (z, &vn) in row.iter_mut().zip(&v) {
            let mut img = Complex64::new(0.0, 0.0);
            for j in 1..=COUPLING_IMAGES {
                for u in [vn + j as f64 * l, vn - j as f64 * l] {
                    img += (Complex64::new(mh, 0.0) - Complex64::from_polar(1.0, a * u)) * u.abs().powf(-p);
                }
            }
            *z -= amp * img;
        }
    }
    field.rep = VelocityRep::Physical;
    Ok(field)
}

/// Relative `L²_{M^{-1}}` distance between [`coupling_quadrature`] and the
/// inverse-transformed [`coupling_hat`] for macro coefficients `ĥ`.
pub fn quadrature_discrepancy(h_hat: &[Complex64], eps: f64, grid: &GridSpec, s: FracOrder, eq: &EquilibriumTable) -> Result<f64> {
    let tx = PeriodicTransform::spatial(grid);
    let h: Vec<f64> = tx.apply(h_hat, crate::grid::Direction::Inverse)?.iter().map(|z| z.re).collect();
    let quad = coupling_quadrature(&h, eps, grid, s, eq)?;
    let closed = coupling_physical(h_hat, eps, grid, s)?;
    let (nx, nv) = (grid.nx, grid.nv);
    let (mut num, mut den) = (0.0, 0.0);
    let mut col = vec![Complex64::new(0.0, 0.0); nx];
    for n in 0..nv {
        for (i, c) in col.iter_mut().enumerate() {
            *c = Complex64::new(quad[i * nv + n], 0.0);
        }
        tx.forward_in_place(&mut col);
        let w = 1.0 / eq.m_values[n];
        for (j, c) in col.iter().enumerate() {
            let r = closed.at(j, n);
            num += w * (c - r).norm_sqr();
            den += w * r.norm_sqr();
        }
    }
    if !(den > 0.0) {
        return Err(Error::InsufficientData("closed-form coupling vanishes".into()));
    }
    Ok((num / den).sqrt())
}

/// `‖I(η, M)‖_{M^{-1}}` per `ε` and the log-log slope against `ε`.
pub fn coupling_scaling_probe(
    h_hat: &[Complex64],
    grid: &GridSpec,
    s: FracOrder,
    eq: &EquilibriumTable,
    eps_list: &[f64],
) -> Result<(f64, Vec<f64>)> {
    if eps_list.len() < 3 {
        return Err(Error::InsufficientData(format!("{} eps values, need at least 3", eps_list.len())));
    }
    let norms = eps_list
        .iter()
        .map(|&e| {
            let f = coupling_physical(h_hat, e, grid, s)?;
            let sum: f64 = f
                .rows()
                .map(|row| row.iter().zip(&eq.m_values).map(|(z, m)| z.norm_sqr() / m).sum::<f64>())
                .sum();
            Ok((sum * grid.dv() / grid.lx).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    if norms.iter().any(|&n| !(n > 0.0)) {
        return Err(Error::InsufficientData("coupling norm vanishes; slope undefined".into()));
    }
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    Ok((least_squares(&xs, &ys).0, norms))
}
