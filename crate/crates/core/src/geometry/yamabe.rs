//! Residual of the Yamabe equation
//! `Δ_b u = (n(n-2)/4)(u^{(n+2)/(n-2)} - u)` for truncated series solutions.
//!
//! The Laplacian side is evaluated by exact term-wise differentiation of the
//! truncated series. At truncation order K all matched orders cancel and the
//! residual is dominated by the first omitted order `r^{-(n+K+1)}`, which
//! quickly sinks below what f64 cancellation can resolve; when the Yamabe
//! exponent is an integer (n ∈ {3, 4, 6}) the residual is therefore also
//! available in exact rational arithmetic at rational sample points.

use num_traits::{One, Signed, Zero};

use super::{ChartPoint, VALIDITY_THRESHOLD};
use crate::error::{Error, Result};
use crate::numerics;
use crate::rational::{self, Rational};
use crate::series::{SeriesEvaluator, SeriesSolution};

/// Floating-point residual evaluator for a fixed solution.
pub struct YamabeResidual {
    evaluator: SeriesEvaluator,
    n: i64,
}

impl YamabeResidual {
    pub fn new(sol: &SeriesSolution) -> Result<Self> {
        Ok(YamabeResidual {
            evaluator: SeriesEvaluator::new(sol)?,
            n: sol.dimension(),
        })
    }

    pub fn evaluator(&self) -> &SeriesEvaluator {
        &self.evaluator
    }

    /// `|Δ_b u - (n(n-2)/4)(u^{(n+2)/(n-2)} - u)|` at a point.
    pub fn residual(&self, point: &ChartPoint) -> Result<f64> {
        let (r, theta) = (point.r(), point.theta());
        let tail = self.evaluator.tail(r, theta);
        let u = 1.0 + tail;
        if u <= VALIDITY_THRESHOLD {
            return Err(Error::OutsideValidity {
                r,
                theta,
                u,
                threshold: VALIDITY_THRESHOLD,
            });
        }
        let n = self.n as f64;
        let q = (n + 2.0) / (n - 2.0);
        let lap = self.evaluator.laplacian(r, theta);
        // u^q - u = (u^q - 1) - (u - 1), both small near infinity
        let pow_m1 = (q * tail.ln_1p()).exp_m1();
        let rhs = 0.25 * n * (n - 2.0) * (pow_m1 - tail);
        Ok((lap - rhs).abs())
    }
}

/// One-off floating-point residual.
pub fn yamabe_residual(sol: &SeriesSolution, point: &ChartPoint) -> Result<f64> {
    YamabeResidual::new(sol)?.residual(point)
}

/// Exact residual at rational `r` and `x = cos θ`, for dimensions with an
/// integer Yamabe exponent (n ∈ {3, 4, 6}). This is the form in which the
/// truncation-decay law is measurable arbitrarily far below the f64
/// cancellation floor.
pub fn yamabe_residual_exact(sol: &SeriesSolution, r: &Rational, x: &Rational) -> Result<Rational> {
    let n = sol.dimension();
    if (n + 2) % (n - 2) != 0 {
        return Err(Error::InvalidParameter(format!(
            "exact residual needs an integer Yamabe exponent; (n+2)/(n-2) is fractional for n = {n}"
        )));
    }
    let q = (n + 2) / (n - 2);
    if !r.is_positive() {
        return Err(Error::InvalidParameter(
            "exact residual needs r > 0".into(),
        ));
    }

    let rinv = r.recip();
    let rinv2 = &rinv * &rinv;
    // Δ_b applied to u_k r^{-e} with e = n+k:
    //   e(e+1-n) u_k r^{-e} + [e(e-n+2) u_k + A_n[u_k]] r^{-e-2}
    let mut low = Rational::zero(); // Σ ... r^{-(n+k)} part, Horner in 1/r
    let mut high = Rational::zero(); // Σ ... r^{-(n+k+2)} part
    for (k, u_k) in sol.coefficients().iter().enumerate().rev() {
        let v = u_k.eval_x_exact(x);
        let ang = u_k.angular_op(n)?.eval_x_exact(x);
        let e = n + k as i64;
        low = low * &rinv + &v * rational::rat_i64(e * (e + 1 - n));
        high = high * &rinv + v * rational::rat_i64(e * (e - n + 2)) + ang;
    }
    // scale by r^{-n} (and r^{-n-2} for the second block)
    let mut scale = Rational::one();
    for _ in 0..n {
        scale *= &rinv;
    }
    let lap = &low * &scale + high * &scale * rinv2;

    let u = sol.eval_u_exact(r, x);
    let mut u_pow = Rational::one();
    for _ in 0..q {
        u_pow *= &u;
    }
    let rhs = rational::rat(n * (n - 2), 4) * (u_pow - u);
    Ok((lap - rhs).abs())
}

/// Log-log slope of the exact residual against `r` over the given radii,
/// at fixed rational `x = cos θ`.
pub fn residual_loglog_slope_exact(
    sol: &SeriesSolution,
    radii: &[Rational],
    x: &Rational,
) -> Result<f64> {
    if radii.len() < 2 {
        return Err(Error::InvalidParameter(
            "slope fit needs at least two radii".into(),
        ));
    }
    let mut ln_r = Vec::with_capacity(radii.len());
    let mut ln_res = Vec::with_capacity(radii.len());
    for r in radii {
        let res = yamabe_residual_exact(sol, r, x)?;
        if res.is_zero() {
            return Err(Error::InvalidParameter(
                "residual vanished exactly; nothing to fit".into(),
            ));
        }
        ln_r.push(rational::ln_abs(r));
        ln_res.push(rational::ln_abs(&res));
    }
    let (slope, _) = numerics::fit_line(&ln_r, &ln_res)?;
    Ok(slope)
}

/// `Δ_b u` by centered finite differences of the evaluated series tail,
/// the independent oracle for the analytic term-wise Laplacian.
pub fn fd_laplacian_oracle(
    evaluator: &SeriesEvaluator,
    point: &ChartPoint,
    h: f64,
) -> Result<f64> {
    let (r, theta) = (point.r(), point.theta());
    let ht = h / r; // dimensionless angular step of comparable size
    if r - h <= 0.0 || theta - ht < 0.0 || theta + ht > std::f64::consts::PI {
        return Err(Error::StencilOutsideDomain { r, theta, h });
    }
    let n = evaluator.dimension() as f64;
    let w = |r: f64, t: f64| evaluator.tail(r, t);
    let w0 = w(r, theta);
    let wrp = w(r + h, theta);
    let wrm = w(r - h, theta);
    let wtp = w(r, theta + ht);
    let wtm = w(r, theta - ht);
    let d_r = (wrp - wrm) / (2.0 * h);
    let d_rr = (wrp - 2.0 * w0 + wrm) / (h * h);
    let d_t = (wtp - wtm) / (2.0 * ht);
    let d_tt = (wtp - 2.0 * w0 + wtm) / (ht * ht);
    let cot = theta.cos() / theta.sin();
    Ok((1.0 + r * r) * d_rr
        + (n - 1.0 + n * r * r) / r * d_r
        + (d_tt + (n - 2.0) * cot * d_t) / (r * r))
}
