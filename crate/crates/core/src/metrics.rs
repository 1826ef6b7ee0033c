//! Error norms in the mixed (x-mode, physical v) representation and
//! convergence-order fitting.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::EquilibriumTable;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, PeriodicTransform, SpectralField, VelocityRep};
use crate::order::FracOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Plain `L²_{x,v}`.
    L2Xv,
    /// `L²` with weight `1/M`.
    L2Minv,
    /// `L²` with weight `⟨v⟩^{-2b}/M`.
    WeightedMinv,
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormKind::L2Xv => "l2_xv",
            NormKind::L2Minv => "l2_minv",
            NormKind::WeightedMinv => "weighted_minv",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub kind: NormKind,
    /// Weight exponent; read only for [`NormKind::WeightedMinv`].
    pub b: f64,
}

impl NormSpec {
    pub fn l2() -> Self {
        Self { kind: NormKind::L2Xv, b: 0.0 }
    }

    pub fn m_inv() -> Self {
        Self { kind: NormKind::L2Minv, b: 0.0 }
    }

    pub fn weighted(b: f64) -> Self {
        Self { kind: NormKind::WeightedMinv, b }
    }

    /// Weighted norms need `b ∈ (1, d + 2s]`.
    pub fn validate(&self, s: FracOrder, d: usize) -> Result<()> {
        if self.kind == NormKind::WeightedMinv {
            let hi = d as f64 + s.two_s();
            if !(self.b > 1.0 && self.b <= hi + 1e-12) {
                return Err(Error::InvalidParameter(format!("weight exponent b = {} outside (1, {hi}]", self.b)));
            }
        }
        Ok(())
    }

    /// Pointwise v-weights for this norm.
    pub fn weights(&self, eq: &EquilibriumTable) -> Vec<f64> {
        let v = eq.grid.v_nodes();
        v.iter()
            .zip(&eq.m_values)
            .map(|(&v, &m)| match self.kind {
                NormKind::L2Xv => 1.0,
                NormKind::L2Minv => 1.0 / m,
                NormKind::WeightedMinv => (1.0 + v * v).powf(-self.b) / m,
            })
            .collect()
    }
}

/// Norm of `f̂_num - f̂_ref`; both fields hold v-Fourier coefficients on the
/// full (ξ, k) lattice. The x direction is handled by Parseval, so the result
/// is the norm over one period.
pub fn weighted_error(
    num: &SpectralField,
    reference: &SpectralField,
    spec: NormSpec,
    eq: &EquilibriumTable,
    grid: &GridSpec,
) -> Result<f64> {
    if num.data.len() != reference.data.len() {
        return Err(Error::LengthMismatch { expected: reference.data.len(), got: num.data.len() });
    }
    if num.nv != grid.nv || num.nx != grid.nx || num.rep != VelocityRep::Fourier || reference.rep != VelocityRep::Fourier {
        return Err(Error::InvalidGrid("error norm expects v-Fourier fields on the run grid".into()));
    }
    spec.validate(eq.s, grid.d)?;
    let w = spec.weights(eq);
    let t = PeriodicTransform::velocity(grid);
    let mut total = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.nv];
    for (a, b) in num.rows().zip(reference.rows()) {
        for ((o, x), y) in buf.iter_mut().zip(a).zip(b) {
            *o = x - y;
        }
        t.inverse_in_place(&mut buf);
        total += buf.iter().zip(&w).map(|(z, wi)| wi * z.norm_sqr()).sum::<f64>();
    }
    Ok((total * grid.dv() / grid.lx).sqrt())
}

/// Same norm as [`weighted_error`] for a single field.
pub fn field_norm(f: &SpectralField, spec: NormSpec, eq: &EquilibriumTable, grid: &GridSpec) -> Result<f64> {
    let zero = SpectralField::zeros(grid, VelocityRep::Fourier);
    weighted_error(f, &zero, spec, eq, grid)
}

/// Least-squares line `y = slope x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderFit {
    pub slope: f64,
    /// Max relative deviation `|e_i - fit_i| / fit_i`.
    pub residual: f64,
    /// Parameters whose error was not positive.
    pub dropped: Vec<f64>,
}

/// Log-log slope of error against parameter.
pub fn observed_order(pairs: &[(f64, f64)]) -> Result<OrderFit> {
    if pairs.len() < 3 {
        return Err(Error::InsufficientData(format!("{} points, need at least 3", pairs.len())));
    }
    let mut dropped = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(p, e) in pairs {
        if p <= 0.0 || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("parameter {p} must be positive")));
        }
        if e > 0.0 && e.is_finite() {
            xs.push(p.ln());
            ys.push(e.ln());
        } else {
            log::warn!("dropping non-positive error {e} at parameter {p}");
            dropped.push(p);
        }
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData("fewer than 2 positive errors".into()));
    }
    let (slope, intercept) = least_squares(&xs, &ys);
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((y - slope * x - intercept).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(OrderFit { slope, residual, dropped })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaReport {
    pub zeta: f64,
    /// Largest admissible `β` for `b = 1 + 2s`, `d = 1`.
    pub beta0: f64,
    pub beta_in_range: bool,
}

/// Predicted time order `ζ(s, β)` in Regime I.
pub fn zeta_reference(s: FracOrder, beta: f64, b: f64) -> Result<ZetaReport> {
    let sv = s.get();
    let d = 1.0;
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be positive")));
    }
    if !(b > 1.0 && b <= d + s.two_s() + 1e-12) {
        return Err(Error::InvalidParameter(format!("weight exponent b = {b} outside (1, {}]", d + s.two_s())));
    }
    let (zeta, beta0) = if sv > 0.5 {
        (
            4.0 * sv / (3.0 + 4.0 * sv) - 2.0 * beta * (13.0 * sv - 2.0 + 16.0 * sv * sv) / (3.0 + 4.0 * sv),
            1.0 / (2.0 * sv + (d + 4.0) * (12.0 * sv - 2.0)),
        )
    } else {
        (
            2.0 * sv / (1.0 + 3.0 * sv) - beta * (3.0 + 9.0 * sv + 4.0 * sv * sv) / (1.0 + 3.0 * sv),
            sv / ((1.0 + 3.0 * sv) * (d + 4.0) + 2.0 * sv * sv),
        )
    };
    if zeta <= 0.0 {
        return Err(Error::InvalidParameter(format!("beta = {beta} gives nonpositive order {zeta}")));
    }
    Ok(ZetaReport { zeta, beta0, beta_in_range: beta < beta0 })
}
