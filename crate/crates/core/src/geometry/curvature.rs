//! Scalar curvature of the warped-product metrics, assembled from metric
//! component jets over the 2D `(r, θ)` base:
//!
//! ```text
//! R = R̂ - 2m (Δ̂f)/f + m(m-1)(1 - |∇̂f|²)/f²,    f = √C,  m = n-2,
//! ```
//!
//! with `R̂`, `Δ̂`, `∇̂` taken in the base metric `A dr² + B dθ²`. This route
//! never touches the conformal/Yamabe identity, so it stays an independent
//! check on the constructed metrics. A values-only finite-difference variant
//! cross-checks the analytic jets themselves.

use super::{ChartPoint, MetricJet, MetricSource};
use crate::error::{Error, Result};
use crate::numerics::Cutoff;

/// Scalar curvature at a point from the analytic component jets.
pub fn scalar_curvature<S: MetricSource + ?Sized>(source: &S, point: &ChartPoint) -> Result<f64> {
    let jet = source.jet(point)?;
    scalar_curvature_from_jet(&jet)
}

pub(crate) fn scalar_curvature_from_jet(jet: &MetricJet) -> Result<f64> {
    if !jet.positive_definite() {
        return Err(Error::DegenerateMetric {
            r: jet.r,
            theta: jet.theta,
        });
    }
    let m = jet.n as f64 - 2.0;
    let (a, b, c) = (jet.rr, jet.tt, jet.ww);

    // Gaussian curvature of the diagonal 2D base A dr² + B dθ²:
    // K = -(1/(2s)) [ ∂_r(B_r/s) + ∂_θ(A_θ/s) ],   s = √(AB)
    let s = (a.v * b.v).sqrt();
    let s_r = (a.dr * b.v + a.v * b.dr) / (2.0 * s);
    let s_t = (a.dt * b.v + a.v * b.dt) / (2.0 * s);
    let term_r = b.drr / s - b.dr * s_r / (s * s);
    let term_t = a.dtt / s - a.dt * s_t / (s * s);
    let base_r = -(term_r + term_t) / s; // R̂ = 2K

    // warping function f = √C
    let f = c.v.sqrt();
    let f_r = c.dr / (2.0 * f);
    let f_t = c.dt / (2.0 * f);
    let f_rr = c.drr / (2.0 * f) - c.dr * c.dr / (4.0 * c.v * f);
    let f_tt = c.dtt / (2.0 * f) - c.dt * c.dt / (4.0 * c.v * f);

    // base Christoffels for the diagonal metric
    let g_rrr = a.dr / (2.0 * a.v);
    let g_trr = -a.dt / (2.0 * b.v);
    let g_rtt = -b.dr / (2.0 * a.v);
    let g_ttt = b.dt / (2.0 * b.v);

    let lap_f = (f_rr - g_rrr * f_r - g_trr * f_t) / a.v + (f_tt - g_rtt * f_r - g_ttt * f_t) / b.v;
    let grad_f_sq = f_r * f_r / a.v + f_t * f_t / b.v;

    Ok(base_r - 2.0 * m * lap_f / f + m * (m - 1.0) * (1.0 - grad_f_sq) / c.v)
}

/// Scalar curvature with every derivative taken by central differences of
/// the metric component values; the independent oracle for the analytic
/// jets. Step `h` is the radial step (the spec of the chart suggests
/// `h = r · 1e-4`); the angular step is the fixed dimensionless analogue.
pub fn scalar_curvature_fd<S: MetricSource + ?Sized>(source: &S, point: &ChartPoint, h: f64) -> Result<f64> {
    let (r, theta) = (point.r(), point.theta());
    let ht = 1e-4;
    if r - 2.0 * h <= 0.0 || theta - 2.0 * ht < 0.0 || theta + 2.0 * ht > std::f64::consts::PI {
        return Err(Error::StencilOutsideDomain { r, theta, h });
    }
    let val = |r: f64, t: f64| -> Result<[f64; 3]> {
        let (a, b, c) = source.values(&ChartPoint::new(r, t)?)?;
        Ok([a, b, c])
    };
    let center = val(r, theta)?;
    let rp = val(r + h, theta)?;
    let rm = val(r - h, theta)?;
    let tp = val(r, theta + ht)?;
    let tm = val(r, theta - ht)?;

    let jet_of = |idx: usize| super::Jet2 {
        v: center[idx],
        dr: (rp[idx] - rm[idx]) / (2.0 * h),
        dt: (tp[idx] - tm[idx]) / (2.0 * ht),
        drr: (rp[idx] - 2.0 * center[idx] + rm[idx]) / (h * h),
        drt: 0.0,
        dtt: (tp[idx] - 2.0 * center[idx] + tm[idx]) / (ht * ht),
    };
    let jet = MetricJet {
        n: source.dimension(),
        r,
        theta,
        rr: jet_of(0),
        tt: jet_of(1),
        ww: jet_of(2),
    };
    scalar_curvature_from_jet(&jet)
}

/// Maximum deviation of the scalar curvature of the cutoff interpolation
/// `(1-χ) g_A + χ g_B` from `-n(n-1)` over a sample grid.
pub fn interpolation_residual<A: MetricSource, B: MetricSource>(
    a: A,
    b: B,
    cutoff: Cutoff,
    r_samples: &[f64],
    theta_samples: &[f64],
) -> Result<f64> {
    let n = a.dimension();
    let mix = super::Interpolated::new(a, b, cutoff)?;
    let target = -(n as f64) * (n as f64 - 1.0);
    let mut worst = 0.0f64;
    for &r in r_samples {
        for &theta in theta_samples {
            let point = ChartPoint::new(r, theta)?;
            let res = scalar_curvature(&mix, &point)? - target;
            worst = worst.max(res.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Conformal, Hyperbolic, Kottler};
    use crate::rational::rat_i64;
    use crate::series::solve_up_to;

    fn grid() -> Vec<ChartPoint> {
        let mut pts = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                let r = 2.0 + 20.0 * i as f64 / 7.0;
                let theta = 0.3 + (std::f64::consts::PI - 0.6) * j as f64 / 7.0;
                pts.push(ChartPoint::new(r, theta).unwrap());
            }
        }
        pts
    }

    #[test]
    fn hyperbolic_curvature_is_minus_n_n_minus_1() {
        for n in [3i64, 4, 5, 7] {
            let src = Hyperbolic::new(n).unwrap();
            let target = -(n as f64) * (n as f64 - 1.0);
            for p in grid() {
                let r = scalar_curvature(&src, &p).unwrap();
                assert!(
                    (r - target).abs() < 1e-11,
                    "n = {n}: R = {r} at (r, θ) = ({}, {})",
                    p.r(),
                    p.theta()
                );
            }
        }
    }

    #[test]
    fn kottler_curvature_is_constant_for_any_mass() {
        for n in [3i64, 4, 5] {
            for mass in [-1.0, -0.1, 0.3] {
                let src = Kottler::new(n, mass).unwrap();
                let target = -(n as f64) * (n as f64 - 1.0);
                for p in grid() {
                    let r = scalar_curvature(&src, &p).unwrap();
                    assert!(
                        (r - target).abs() < 1e-9 * target.abs(),
                        "n = {n}, m = {mass}: R = {r}"
                    );
                }
            }
        }
    }

    #[test]
    fn fd_oracle_agrees_with_analytic_jets() {
        let sol = solve_up_to(3, rat_i64(1), rat_i64(1), 10).unwrap();
        let conformal = Conformal::new(&sol).unwrap();
        let kottler = Kottler::new(3, -1.0).unwrap();
        let sources: [&dyn MetricSource; 2] = [&kottler, &conformal];
        for src in sources {
            for p in [
                ChartPoint::new(5.0, 1.0).unwrap(),
                ChartPoint::new(12.0, 2.0).unwrap(),
                ChartPoint::new(30.0, 0.7).unwrap(),
            ] {
                let h = p.r() * 1e-4;
                let exact = scalar_curvature(src, &p).unwrap();
                let fd = scalar_curvature_fd(src, &p, h).unwrap();
                assert!(
                    (exact - fd).abs() < 2e-4 * exact.abs(),
                    "{}: {exact} vs {fd}",
                    src.label()
                );
            }
        }
    }

    #[test]
    fn conformal_curvature_approaches_constant_at_large_r() {
        let sol = solve_up_to(3, rat_i64(1), rat_i64(1), 12).unwrap();
        let src = Conformal::new(&sol).unwrap();
        let p = ChartPoint::new(60.0, 1.2).unwrap();
        let r = scalar_curvature(&src, &p).unwrap();
        assert!((r + 6.0).abs() < 1e-8, "R = {r}");
    }

    #[test]
    fn identical_interpolation_inputs_give_tiny_residual() {
        let cutoff = Cutoff::new(6.0, 9.0).unwrap();
        let rs: Vec<f64> = (0..20).map(|i| 4.0 + i as f64).collect();
        let ts: Vec<f64> = (1..10).map(|j| j as f64 * std::f64::consts::PI / 10.0).collect();
        let dev = interpolation_residual(
            Hyperbolic::new(3).unwrap(),
            Hyperbolic::new(3).unwrap(),
            cutoff,
            &rs,
            &ts,
        )
        .unwrap();
        assert!(dev < 1e-10, "deviation {dev}");
    }

    #[test]
    fn kottler_interpolation_residual_shrinks_with_mass() {
        let rs: Vec<f64> = (0..24).map(|i| 4.0 + 8.0 * i as f64 / 23.0).collect();
        let ts: Vec<f64> = (1..8).map(|j| j as f64 * std::f64::consts::PI / 8.0).collect();
        let mut prev = f64::INFINITY;
        for mass in [-0.1, -0.01, -0.001] {
            let dev = interpolation_residual(
                Hyperbolic::new(3).unwrap(),
                Kottler::new(3, mass).unwrap(),
                Cutoff::new(5.0, 10.0).unwrap(),
                &rs,
                &ts,
            )
            .unwrap();
            assert!(dev < prev, "m = {mass}: {dev} !< {prev}");
            assert!(dev > 0.0);
            prev = dev;
        }
    }

    #[test]
    fn chi_zero_reproduces_first_metric_residual() {
        // cutoff far beyond the sample range: χ ≡ 0 there
        let rs: Vec<f64> = (0..10).map(|i| 3.0 + i as f64).collect();
        let ts = [1.0, 2.0];
        let dev = interpolation_residual(
            Hyperbolic::new(3).unwrap(),
            Kottler::new(3, -1.0).unwrap(),
            Cutoff::new(1e6, 2e6).unwrap(),
            &rs,
            &ts,
        )
        .unwrap();
        assert!(dev < 1e-10, "deviation {dev}");
    }
}
