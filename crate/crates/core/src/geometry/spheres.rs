//! Mean curvature of the coordinate spheres `{s = const}` (`sinh s = r`)
//! and the extraction of the mass-aspect function from its large-sphere
//! expansion
//!
//! ```text
//! Θ(s, θ) = (n-1) coth s - 2^{n-1} e^{-ns} μ(θ) + o(e^{-ns}).
//! ```

use serde::Serialize;

use super::{ChartPoint, MetricSource};
use crate::error::{Error, Result};
use crate::numerics;
use crate::polycos::PolyCos;

/// Mean curvature of the coordinate sphere at parameter `s`, as a function
/// of latitude, for the outward unit normal:
/// `Θ = (B_r/B + (n-2) C_r/C) / (2 √A)`.
pub fn mean_curvature<S: MetricSource + ?Sized>(source: &S, s: f64, theta: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sphere parameter must be positive, got {s}"
        )));
    }
    let r = s.sinh();
    let jet = source.jet(&ChartPoint::new(r, theta)?)?;
    if !jet.positive_definite() {
        return Err(Error::DegenerateMetric { r, theta });
    }
    let m = source.dimension() as f64 - 2.0;
    Ok((jet.tt.dr / jet.tt.v + m * jet.ww.dr / jet.ww.v) / (2.0 * jet.rr.v.sqrt()))
}

/// Θ sampled over a latitude grid.
pub fn mean_curvature_samples<S: MetricSource + ?Sized>(
    source: &S,
    s: f64,
    theta_grid: &[f64],
) -> Result<Vec<f64>> {
    theta_grid
        .iter()
        .map(|&t| mean_curvature(source, s, t))
        .collect()
}

/// Result of extracting the mass-aspect function from the mean-curvature
/// expansion and fitting it against `u_0`.
#[derive(Debug, Clone, Serialize)]
pub struct MassAspectFit {
    pub theta_grid: Vec<f64>,
    /// extrapolated μ(θ)
    pub mu: Vec<f64>,
    /// fitted proportionality constant in μ ≈ κ u_0
    pub kappa: f64,
    /// relative L² residual of the proportionality fit
    pub fit_residual: f64,
    /// set when the residual exceeds the caller's threshold
    pub flagged: bool,
}

/// Extracts `μ(θ) = -2^{1-n} e^{ns} (Θ - (n-1) coth s)` on the sphere grid,
/// removes the leading `e^{-2s}` contamination by a least-squares
/// extrapolation over `s_grid` (a Richardson step when only two spheres are
/// given), and fits the result against the seed polynomial `u0`.
pub fn mass_aspect_extract<S: MetricSource + ?Sized>(
    source: &S,
    u0: &PolyCos,
    s_grid: &[f64],
    theta_grid: &[f64],
    residual_threshold: f64,
) -> Result<MassAspectFit> {
    if s_grid.len() < 2 {
        return Err(Error::InvalidParameter(
            "mass-aspect extraction needs at least two sphere radii".into(),
        ));
    }
    if !s_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::RadiiNotIncreasing);
    }
    let n = source.dimension() as f64;
    let prefactor = -(2.0f64).powf(1.0 - n);

    // raw μ estimates per (s, θ)
    let design: Vec<Vec<f64>> = s_grid
        .iter()
        .map(|&s| vec![1.0, (-2.0 * s).exp()])
        .collect();
    let mut mu = Vec::with_capacity(theta_grid.len());
    for &theta in theta_grid {
        let samples: Vec<f64> = s_grid
            .iter()
            .map(|&s| {
                source
                    .mean_curvature_deviation(s, theta)
                    .map(|dev| prefactor * (n * s).exp() * dev)
            })
            .collect::<Result<_>>()?;
        let coeffs = numerics::linear_least_squares(&design, &samples)?;
        mu.push(coeffs[0]);
    }

    // proportionality fit μ ≈ κ u_0
    let u0_vals: Vec<f64> = theta_grid.iter().map(|&t| u0.eval(t)).collect();
    let uu: f64 = u0_vals.iter().map(|v| v * v).sum();
    let kappa = if uu > 0.0 {
        mu.iter().zip(&u0_vals).map(|(m, v)| m * v).sum::<f64>() / uu
    } else {
        0.0
    };
    let mm: f64 = mu.iter().map(|m| m * m).sum();
    let rr: f64 = mu
        .iter()
        .zip(&u0_vals)
        .map(|(m, v)| (m - kappa * v) * (m - kappa * v))
        .sum();
    let fit_residual = if mm > 0.0 { (rr / mm).sqrt() } else { 0.0 };
    Ok(MassAspectFit {
        theta_grid: theta_grid.to_vec(),
        mu,
        kappa,
        fit_residual,
        flagged: fit_residual > residual_threshold,
    })
}
