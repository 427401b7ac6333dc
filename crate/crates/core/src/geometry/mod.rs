//! Coordinate charts, metric 2-jets and the metric sources the diagnostics
//! run on: the hyperbolic background, the conformally deformed series
//! metric, the Kottler family, and cutoff interpolations between sources.
//!
//! All sources are warped-product metrics on the `(r, θ)` chart,
//!
//! ```text
//! g = A(r,θ) dr² + B(r,θ) dθ² + C(r,θ) σ_{n-2}
//! ```
//!
//! with `σ_{n-2}` the round metric on the unit `(n-2)`-sphere, so a metric
//! sample is three component functions with their first and second partial
//! derivatives.

mod curvature;
mod spheres;
mod yamabe;

pub use curvature::{interpolation_residual, scalar_curvature, scalar_curvature_fd};
pub use spheres::{mass_aspect_extract, mean_curvature, mean_curvature_samples, MassAspectFit};
pub use yamabe::{
    fd_laplacian_oracle, residual_loglog_slope_exact, yamabe_residual, yamabe_residual_exact,
    YamabeResidual,
};

use crate::error::{Error, Result};
use crate::numerics::Cutoff;
use crate::series::{SeriesEvaluator, SeriesSolution};

/// Points with `eval_u` at or below this are outside the region where the
/// truncated series is trusted.
pub const VALIDITY_THRESHOLD: f64 = 0.5;

/// A point of the `(r, θ)` chart with its companion radial coordinates:
/// `ρ` with `1/r = sinh ρ` and `s` with `sinh s = r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    r: f64,
    theta: f64,
}

impl ChartPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radial coordinate must be positive and finite, got {r}"
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "latitude must lie in [0, π], got {theta}"
            )));
        }
        Ok(ChartPoint { r, theta })
    }

    /// From the defining-function coordinate `ρ` (`1/r = sinh ρ`).
    pub fn from_rho(rho: f64, theta: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "defining coordinate must be positive, got {rho}"
            )));
        }
        Self::new(1.0 / rho.sinh(), theta)
    }

    /// From the geodesic-style coordinate `s` (`sinh s = r`).
    pub fn from_s(s: f64, theta: f64) -> Result<Self> {
        Self::new(s.sinh(), theta)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn rho(&self) -> f64 {
        (1.0 / self.r).asinh()
    }

    pub fn s(&self) -> f64 {
        self.r.asinh()
    }
}

/// Value and partial derivatives (through second order) of one scalar
/// component function on the `(r, θ)` chart.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub dr: f64,
    pub dt: f64,
    pub drr: f64,
    pub drt: f64,
    pub dtt: f64,
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Jet2 {
            v,
            ..Default::default()
        }
    }

    pub fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            dr: self.dr + o.dr,
            dt: self.dt + o.dt,
            drr: self.drr + o.drr,
            drt: self.drt + o.drt,
            dtt: self.dtt + o.dtt,
        }
    }

    pub fn sub(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v - o.v,
            dr: self.dr - o.dr,
            dt: self.dt - o.dt,
            drr: self.drr - o.drr,
            drt: self.drt - o.drt,
            dtt: self.dtt - o.dtt,
        }
    }

    /// Leibniz product of two jets.
    pub fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            dr: self.dr * o.v + self.v * o.dr,
            dt: self.dt * o.v + self.v * o.dt,
            drr: self.drr * o.v + 2.0 * self.dr * o.dr + self.v * o.drr,
            drt: self.drt * o.v + self.dr * o.dt + self.dt * o.dr + self.v * o.drt,
            dtt: self.dtt * o.v + 2.0 * self.dt * o.dt + self.v * o.dtt,
        }
    }
}

/// Metric components and derivatives at one chart point.
#[derive(Debug, Clone, Copy)]
pub struct MetricJet {
    pub n: i64,
    pub r: f64,
    pub theta: f64,
    /// g_rr
    pub rr: Jet2,
    /// g_θθ
    pub tt: Jet2,
    /// round-sphere block factor (coefficient of σ_{n-2})
    pub ww: Jet2,
}

impl MetricJet {
    pub fn positive_definite(&self) -> bool {
        self.rr.v > 0.0 && self.tt.v > 0.0 && self.ww.v > 0.0
    }

    /// Components of `g - b` relative to the hyperbolic background at the
    /// same point (used by the flux machinery).
    pub fn deviation_from_hyperbolic(&self) -> (Jet2, Jet2, Jet2) {
        let b = hyperbolic_jet(self.n, self.r, self.theta);
        (
            self.rr.sub(b.rr),
            self.tt.sub(b.tt),
            self.ww.sub(b.ww),
        )
    }
}

/// A metric the diagnostics can sample.
pub trait MetricSource {
    fn dimension(&self) -> i64;

    fn jet(&self, point: &ChartPoint) -> Result<MetricJet>;

    fn label(&self) -> String;

    /// Component values only (the independent finite-difference curvature
    /// oracle samples through this, never through the derivative fields).
    fn values(&self, point: &ChartPoint) -> Result<(f64, f64, f64)> {
        let j = self.jet(point)?;
        Ok((j.rr.v, j.tt.v, j.ww.v))
    }

    /// `Θ(s, θ) - (n-1) coth s`, the deviation of the coordinate-sphere mean
    /// curvature from its hyperbolic value. The default evaluates the two
    /// terms separately and subtracts; sources for which the deviation is
    /// exponentially small override it with a cancellation-free form.
    fn mean_curvature_deviation(&self, s: f64, theta: f64) -> Result<f64> {
        let n = self.dimension() as f64;
        let theta_v = mean_curvature(self, s, theta)?;
        Ok(theta_v - (n - 1.0) * (1.0 / s.tanh()))
    }
}

fn hyperbolic_component_jets(r: f64, theta: f64) -> (Jet2, Jet2, Jet2) {
    let opp = 1.0 + r * r;
    let a = 1.0 / opp;
    let rr = Jet2 {
        v: a,
        dr: -2.0 * r * a * a,
        drr: -2.0 * a * a + 8.0 * r * r * a * a * a,
        ..Default::default()
    };
    let tt = Jet2 {
        v: r * r,
        dr: 2.0 * r,
        drr: 2.0,
        ..Default::default()
    };
    let (sin, cos) = theta.sin_cos();
    let sin2 = sin * sin;
    let ww = Jet2 {
        v: r * r * sin2,
        dr: 2.0 * r * sin2,
        drr: 2.0 * sin2,
        dt: r * r * 2.0 * sin * cos,
        drt: 4.0 * r * sin * cos,
        dtt: r * r * 2.0 * (cos * cos - sin2),
    };
    (rr, tt, ww)
}

fn hyperbolic_jet(n: i64, r: f64, theta: f64) -> MetricJet {
    let (rr, tt, ww) = hyperbolic_component_jets(r, theta);
    MetricJet {
        n,
        r,
        theta,
        rr,
        tt,
        ww,
    }
}

/// The hyperbolic background `b = dr²/(1+r²) + r²(dθ² + sin²θ σ_{n-2})`.
#[derive(Debug, Clone, Copy)]
pub struct Hyperbolic {
    pub n: i64,
}

impl Hyperbolic {
    pub fn new(n: i64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Hyperbolic { n })
    }
}

impl MetricSource for Hyperbolic {
    fn dimension(&self) -> i64 {
        self.n
    }

    fn jet(&self, point: &ChartPoint) -> Result<MetricJet> {
        Ok(hyperbolic_jet(self.n, point.r(), point.theta()))
    }

    fn label(&self) -> String {
        format!("hyperbolic(n={})", self.n)
    }

    fn mean_curvature_deviation(&self, _s: f64, _theta: f64) -> Result<f64> {
        Ok(0.0)
    }
}

/// Kottler metric `dr²/(1 - 2m/r^{n-2} + r²) + r²(dθ² + sin²θ σ_{n-2})`;
/// the hyperbolic metric for `m = 0`.
#[derive(Debug, Clone, Copy)]
pub struct Kottler {
    pub n: i64,
    pub mass: f64,
}

impl Kottler {
    pub fn new(n: i64, mass: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Kottler { n, mass })
    }

    /// `1 - 2m/r^{n-2} + r²` and its first two radial derivatives.
    fn lapse(&self, r: f64) -> (f64, f64, f64) {
        let p = self.n as f64 - 2.0;
        let m = self.mass;
        let v = 1.0 - 2.0 * m * r.powf(-p) + r * r;
        let d1 = 2.0 * m * p * r.powf(-p - 1.0) + 2.0 * r;
        let d2 = -2.0 * m * p * (p + 1.0) * r.powf(-p - 2.0) + 2.0;
        (v, d1, d2)
    }
}

impl MetricSource for Kottler {
    fn dimension(&self) -> i64 {
        self.n
    }

    fn jet(&self, point: &ChartPoint) -> Result<MetricJet> {
        let r = point.r();
        if self.mass == 0.0 {
            // the component functions coincide with the hyperbolic ones;
            // share the assembly so the agreement is bit-exact
            return Ok(hyperbolic_jet(self.n, r, point.theta()));
        }
        let (l, l1, l2) = self.lapse(r);
        if l <= 0.0 {
            return Err(Error::InsideHorizon { r, lapse: l });
        }
        let mut jet = hyperbolic_jet(self.n, r, point.theta());
        let inv = 1.0 / l;
        jet.rr = Jet2 {
            v: inv,
            dr: -l1 * inv * inv,
            drr: (-l2 + 2.0 * l1 * l1 * inv) * inv * inv,
            ..Default::default()
        };
        Ok(jet)
    }

    fn label(&self) -> String {
        format!("kottler(n={}, m={})", self.n, self.mass)
    }

    fn mean_curvature_deviation(&self, s: f64, theta: f64) -> Result<f64> {
        let r = s.sinh();
        let _ = theta;
        let (l, _, _) = self.lapse(r);
        if l <= 0.0 {
            return Err(Error::InsideHorizon { r, lapse: l });
        }
        let n = self.n as f64;
        let hyp = 1.0 + r * r;
        // (n-1)(√l - √(1+r²))/r without cancellation
        let diff = -2.0 * self.mass * r.powf(2.0 - n);
        Ok((n - 1.0) * diff / (r * (l.sqrt() + hyp.sqrt())))
    }
}

/// The constructed metric `g = u^{4/(n-2)} b` for a truncated series
/// solution, valid where the truncated `u` stays above
/// [`VALIDITY_THRESHOLD`].
pub struct Conformal {
    evaluator: SeriesEvaluator,
    n: i64,
    exponent: f64,
}

impl Conformal {
    pub fn new(sol: &SeriesSolution) -> Result<Self> {
        Ok(Conformal {
            evaluator: SeriesEvaluator::new(sol)?,
            n: sol.dimension(),
            exponent: 4.0 / (sol.dimension() as f64 - 2.0),
        })
    }

    pub fn evaluator(&self) -> &SeriesEvaluator {
        &self.evaluator
    }

    /// 2-jet of the conformal factor `U = u^{4/(n-2)}`.
    fn factor_jet(&self, r: f64, theta: f64) -> Result<Jet2> {
        let jet = self.evaluator.jet(r, theta);
        if jet.u <= VALIDITY_THRESHOLD {
            return Err(Error::OutsideValidity {
                r,
                theta,
                u: jet.u,
                threshold: VALIDITY_THRESHOLD,
            });
        }
        let c = self.exponent;
        let u = jet.u;
        let ucm1 = u.powf(c - 1.0);
        let ucm2 = u.powf(c - 2.0);
        Ok(Jet2 {
            v: u.powf(c),
            dr: c * ucm1 * jet.u_r,
            dt: c * ucm1 * jet.u_t,
            drr: c * (c - 1.0) * ucm2 * jet.u_r * jet.u_r + c * ucm1 * jet.u_rr,
            drt: c * (c - 1.0) * ucm2 * jet.u_r * jet.u_t + c * ucm1 * jet.u_rt,
            dtt: c * (c - 1.0) * ucm2 * jet.u_t * jet.u_t + c * ucm1 * jet.u_tt,
        })
    }

    /// `(U - 1, ∂_r(U - 1), ∂_θ(U - 1))` through `ln1p`/`expm1`, for the
    /// flux paths where the `O(r^{-n})` tail of `U - 1` must survive
    /// floating point.
    pub fn factor_tail_jet(&self, r: f64, theta: f64) -> Result<(f64, f64, f64)> {
        let jet = self.evaluator.jet(r, theta);
        if jet.u <= VALIDITY_THRESHOLD {
            return Err(Error::OutsideValidity {
                r,
                theta,
                u: jet.u,
                threshold: VALIDITY_THRESHOLD,
            });
        }
        let tail = jet.u - 1.0;
        let c = self.exponent;
        let u_m1 = (c * tail.ln_1p()).exp_m1();
        let u_pow = 1.0 + u_m1; // u^c
        let dr = c * u_pow * jet.u_r / jet.u;
        let dt = c * u_pow * jet.u_t / jet.u;
        Ok((u_m1, dr, dt))
    }
}

impl MetricSource for Conformal {
    fn dimension(&self) -> i64 {
        self.n
    }

    fn jet(&self, point: &ChartPoint) -> Result<MetricJet> {
        let (r, theta) = (point.r(), point.theta());
        let factor = self.factor_jet(r, theta)?;
        let base = hyperbolic_jet(self.n, r, theta);
        Ok(MetricJet {
            n: self.n,
            r,
            theta,
            rr: factor.mul(base.rr),
            tt: factor.mul(base.tt),
            ww: factor.mul(base.ww),
        })
    }

    fn label(&self) -> String {
        format!("conformal(n={}, K={})", self.n, self.evaluator.truncation_order())
    }

    fn mean_curvature_deviation(&self, s: f64, theta: f64) -> Result<f64> {
        let r = s.sinh();
        let jet = self.evaluator.jet(r, theta);
        if jet.u <= VALIDITY_THRESHOLD {
            return Err(Error::OutsideValidity {
                r,
                theta,
                u: jet.u,
                threshold: VALIDITY_THRESHOLD,
            });
        }
        let n = self.n as f64;
        let c = self.exponent;
        let tail = jet.u - 1.0;
        // 1/√U - 1 = expm1(-(c/2) ln1p(tail))
        let inv_sqrt_m1 = (-(0.5 * c) * tail.ln_1p()).exp_m1();
        // U_r/(2 U^{3/2}) = (c/2) u_r u^{-1 - c/2}
        let second = 0.5 * c * jet.u_r * jet.u.powf(-1.0 - 0.5 * c);
        let hyp = (1.0 + r * r).sqrt();
        Ok((n - 1.0) * hyp * (inv_sqrt_m1 / r + second))
    }
}

/// Cutoff interpolation `(1-χ) g_A + χ g_B` on a shared chart.
pub struct Interpolated<A, B> {
    pub a: A,
    pub b: B,
    pub cutoff: Cutoff,
}

impl<A: MetricSource, B: MetricSource> Interpolated<A, B> {
    pub fn new(a: A, b: B, cutoff: Cutoff) -> Result<Self> {
        if a.dimension() != b.dimension() {
            return Err(Error::InvalidParameter(format!(
                "cannot interpolate metrics of dimensions {} and {}",
                a.dimension(),
                b.dimension()
            )));
        }
        Ok(Interpolated { a, b, cutoff })
    }
}

impl<A: MetricSource, B: MetricSource> MetricSource for Interpolated<A, B> {
    fn dimension(&self) -> i64 {
        self.a.dimension()
    }

    fn jet(&self, point: &ChartPoint) -> Result<MetricJet> {
        let ja = self.a.jet(point)?;
        let jb = self.b.jet(point)?;
        let (chi, d1, d2) = self.cutoff.jet(point.r());
        let chi_jet = Jet2 {
            v: chi,
            dr: d1,
            drr: d2,
            ..Default::default()
        };
        let mix = |xa: Jet2, xb: Jet2| xa.add(chi_jet.mul(xb.sub(xa)));
        Ok(MetricJet {
            n: ja.n,
            r: point.r(),
            theta: point.theta(),
            rr: mix(ja.rr, jb.rr),
            tt: mix(ja.tt, jb.tt),
            ww: mix(ja.ww, jb.ww),
        })
    }

    fn label(&self) -> String {
        format!(
            "interpolated({} -> {}, annulus [{}, {}])",
            self.a.label(),
            self.b.label(),
            self.cutoff.r1,
            self.cutoff.r2
        )
    }
}

/// Hyperbolic metric components at a point.
pub fn hyperbolic_metric(point: &ChartPoint, n: i64) -> Result<MetricJet> {
    Hyperbolic::new(n).map(|h| hyperbolic_jet(h.n, point.r(), point.theta()))
}

/// Kottler metric components at a point (errors inside the horizon region).
pub fn kottler_metric(mass: f64, n: i64, point: &ChartPoint) -> Result<MetricJet> {
    Kottler::new(n, mass)?.jet(point)
}

/// Conformal metric components at a point.
pub fn conformal_metric(sol: &SeriesSolution, point: &ChartPoint) -> Result<MetricJet> {
    Conformal::new(sol)?.jet(point)
}
