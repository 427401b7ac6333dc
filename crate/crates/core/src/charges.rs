//! Flux-integral charges relative to the hyperbolic background: static
//! KIDs, the adjoint linearized-scalar-curvature operator
//! `L_b* f = -(Δ_b f) b + Hess_b f - f Ric_b`, the flux density
//! `U(V, e) = V (div e - d tr e) - ι_{∇V} e + (tr e) dV` (all computed
//! relative to `b`), sphere integrals at finite radius, and their
//! extrapolated limits assembled into an energy-momentum vector.
//!
//! Everything is specialized to axisymmetric, diagonal deviations
//! `e = P dr² + Q dθ² + W σ_{n-2}` with `P, Q, W` functions of `(r, θ)`:
//! that covers the conformal series metrics and the Kottler family. The
//! transverse KIDs `x^i = r sin θ Ω_i(φ)` carry a first spherical harmonic
//! `Ω_i` of the `(n-2)`-sphere; their flux factorizes through
//! `∫ Ω_i dσ = 0`, which is evaluated by quadrature rather than assumed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, Conformal, Kottler, MetricSource};
use crate::minkowski::EMVector;
use crate::numerics;

/// Hyperbolic-background quantities shared by the tensor calculus here.
#[derive(Debug, Clone, Copy)]
struct Background {
    r: f64,
    theta: f64,
    /// 1 + r²
    opp: f64,
    sin: f64,
    cos: f64,
}

impl Background {
    fn at(point: &ChartPoint) -> Self {
        let (sin, cos) = point.theta().sin_cos();
        Background {
            r: point.r(),
            theta: point.theta(),
            opp: 1.0 + point.r() * point.r(),
            sin,
            cos,
        }
    }
}

/// Value and first derivatives of one scalar component on the chart.
#[derive(Debug, Clone, Copy, Default)]
pub struct Jet1 {
    pub v: f64,
    pub dr: f64,
    pub dt: f64,
}

/// Components of an axisymmetric diagonal 2-tensor deviation
/// `e = P dr² + Q dθ² + W σ_{n-2}` with first derivatives.
#[derive(Debug, Clone, Copy)]
pub struct TensorJet {
    pub p: Jet1,
    pub q: Jet1,
    pub w: Jet1,
}

/// A symmetric-2-tensor field the flux machinery can sample.
pub trait TensorField {
    fn dimension(&self) -> i64;
    fn components(&self, point: &ChartPoint) -> Result<TensorJet>;
}

/// The deviation `e = Φ*g - b` of the conformal series metric, with
/// analytic derivatives arranged so the `O(r^{-n})` tail survives floating
/// point: `e = (U - 1) b` where `U - 1` goes through `ln1p`/`expm1`.
pub struct ConformalDeviation<'a> {
    metric: &'a Conformal,
}

impl<'a> ConformalDeviation<'a> {
    pub fn new(metric: &'a Conformal) -> Self {
        ConformalDeviation { metric }
    }
}

impl TensorField for ConformalDeviation<'_> {
    fn dimension(&self) -> i64 {
        self.metric.dimension()
    }

    fn components(&self, point: &ChartPoint) -> Result<TensorJet> {
        let bg = Background::at(point);
        let (psi, dpsi_r, dpsi_t) = self.metric.factor_tail_jet(point.r(), point.theta())?;
        // e = ψ b with ψ = U - 1
        let f = 1.0 / bg.opp;
        let f_r = -2.0 * bg.r * f * f;
        let g = bg.r * bg.r;
        let wb = g * bg.sin * bg.sin;
        Ok(TensorJet {
            p: Jet1 {
                v: psi * f,
                dr: dpsi_r * f + psi * f_r,
                dt: dpsi_t * f,
            },
            q: Jet1 {
                v: psi * g,
                dr: dpsi_r * g + psi * 2.0 * bg.r,
                dt: dpsi_t * g,
            },
            w: Jet1 {
                v: psi * wb,
                dr: dpsi_r * wb + psi * 2.0 * bg.r * bg.sin * bg.sin,
                dt: dpsi_t * wb + psi * g * 2.0 * bg.sin * bg.cos,
            },
        })
    }
}

/// The deviation of the Kottler metric from the background: only the radial
/// component differs, `P = 2m r^{2-n} / (L (1+r²))` in cancellation-free
/// form with `L = 1 - 2m/r^{n-2} + r²`.
pub struct KottlerDeviation {
    pub kottler: Kottler,
}

impl TensorField for KottlerDeviation {
    fn dimension(&self) -> i64 {
        self.kottler.n
    }

    fn components(&self, point: &ChartPoint) -> Result<TensorJet> {
        let r = point.r();
        let n = self.kottler.n as f64;
        let m = self.kottler.mass;
        let opp = 1.0 + r * r;
        let l = 1.0 - 2.0 * m * r.powf(2.0 - n) + r * r;
        if l <= 0.0 {
            return Err(Error::InsideHorizon { r, lapse: l });
        }
        let l_r = 2.0 * m * (n - 2.0) * r.powf(1.0 - n) + 2.0 * r;
        let num = 2.0 * m * r.powf(2.0 - n);
        let num_r = 2.0 * m * (2.0 - n) * r.powf(1.0 - n);
        let den = l * opp;
        let den_r = l_r * opp + l * 2.0 * r;
        Ok(TensorJet {
            p: Jet1 {
                v: num / den,
                dr: (num_r * den - num * den_r) / (den * den),
                dt: 0.0,
            },
            q: Jet1::default(),
            w: Jet1::default(),
        })
    }
}

/// `e = ψ(r, θ) b` for a caller-supplied scalar jet; the closed-form
/// identity `U(V, ψ b) = (n-1)(ψ dV - V dψ)` makes this the independent
/// oracle for the component formulas.
pub struct ScaledBackground<F: Fn(&ChartPoint) -> Jet1> {
    pub n: i64,
    pub psi: F,
}

impl<F: Fn(&ChartPoint) -> Jet1> TensorField for ScaledBackground<F> {
    fn dimension(&self) -> i64 {
        self.n
    }

    fn components(&self, point: &ChartPoint) -> Result<TensorJet> {
        let bg = Background::at(point);
        let psi = (self.psi)(point);
        let f = 1.0 / bg.opp;
        let g = bg.r * bg.r;
        let wb = g * bg.sin * bg.sin;
        Ok(TensorJet {
            p: Jet1 {
                v: psi.v * f,
                dr: psi.dr * f + psi.v * (-2.0 * bg.r * f * f),
                dt: psi.dt * f,
            },
            q: Jet1 {
                v: psi.v * g,
                dr: psi.dr * g + psi.v * 2.0 * bg.r,
                dt: psi.dt * g,
            },
            w: Jet1 {
                v: psi.v * wb,
                dr: psi.dr * wb + psi.v * 2.0 * bg.r * bg.sin * bg.sin,
                dt: psi.dt * wb + psi.v * g * 2.0 * bg.sin * bg.cos,
            },
        })
    }
}

/// Scalar part of a static KID `V = f(r, θ) Ω(φ)` with closed-form
/// derivatives; `transverse` marks a first spherical harmonic `Ω` on the
/// `(n-2)`-sphere (axisymmetric KIDs have `Ω = 1`).
#[derive(Debug, Clone, Copy)]
pub struct ScalarJet {
    pub f: f64,
    pub f_r: f64,
    pub f_t: f64,
    pub f_rr: f64,
    pub f_rt: f64,
    pub f_tt: f64,
    pub transverse: bool,
}

impl ScalarJet {
    /// The constant function 1 (not a KID; plumbing input for the
    /// formula-collapse checks).
    pub fn unit() -> Self {
        ScalarJet {
            f: 1.0,
            f_r: 0.0,
            f_t: 0.0,
            f_rr: 0.0,
            f_rt: 0.0,
            f_tt: 0.0,
            transverse: false,
        }
    }
}

/// One element of the static KID basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kid {
    /// `V_(0) = √(1+r²)`
    TimeTranslation,
    /// `V_(i) = x^i = r sin θ Ω_i(φ)`, `1 <= i <= n-1`
    Transverse(usize),
    /// `V_(n) = x^n = r cos θ`
    AxialTranslation,
}

impl Kid {
    pub fn name(&self) -> String {
        match self {
            Kid::TimeTranslation => "V_(0)".into(),
            Kid::Transverse(i) => format!("V_({i})"),
            Kid::AxialTranslation => "V_(n)".into(),
        }
    }

    /// Value of the latitude part `f(r, θ)`.
    pub fn value(&self, point: &ChartPoint) -> f64 {
        self.scalar_jet(point).f
    }

    pub fn is_transverse(&self) -> bool {
        matches!(self, Kid::Transverse(_))
    }

    pub fn scalar_jet(&self, point: &ChartPoint) -> ScalarJet {
        let r = point.r();
        let (sin, cos) = point.theta().sin_cos();
        match self {
            Kid::TimeTranslation => {
                let v = (1.0 + r * r).sqrt();
                ScalarJet {
                    f: v,
                    f_r: r / v,
                    f_t: 0.0,
                    f_rr: 1.0 / (v * v * v),
                    f_rt: 0.0,
                    f_tt: 0.0,
                    transverse: false,
                }
            }
            Kid::AxialTranslation => ScalarJet {
                f: r * cos,
                f_r: cos,
                f_t: -r * sin,
                f_rr: 0.0,
                f_rt: -sin,
                f_tt: -r * cos,
                transverse: false,
            },
            Kid::Transverse(_) => ScalarJet {
                f: r * sin,
                f_r: sin,
                f_t: r * cos,
                f_rr: 0.0,
                f_rt: cos,
                f_tt: -r * sin,
                transverse: true,
            },
        }
    }
}

/// The `(n+1)`-element basis of static KIDs, ordered by the component of
/// the energy-momentum vector each one measures.
pub fn kid_basis(n: i64) -> Result<Vec<Kid>> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    let mut out = vec![Kid::TimeTranslation];
    for i in 1..n as usize {
        out.push(Kid::Transverse(i));
    }
    out.push(Kid::AxialTranslation);
    Ok(out)
}

/// Orthonormal-frame components of `L_b* V` for `V = f Ω`. The harmonic
/// factors are reported with their sup norms absorbed (|Ω| <= 1 and the
/// frame-normalized |∇Ω| <= 1), so `max_abs` bounds the tensor sup norm.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LstarFrame {
    pub rr: f64,
    pub rt: f64,
    pub tt: f64,
    /// coefficient of the (r, sphere) block, ∝ ∇Ω
    pub r_sphere: f64,
    /// coefficient of the (θ, sphere) block, ∝ ∇Ω
    pub t_sphere: f64,
    /// isotropic σ_ab part, ∝ Ω
    pub sphere_iso: f64,
}

impl LstarFrame {
    pub fn max_abs(&self) -> f64 {
        [
            self.rr,
            self.rt,
            self.tt,
            self.r_sphere,
            self.t_sphere,
            self.sphere_iso,
        ]
        .into_iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// `L_b* V = -(Δ_b V) b + Hess_b V - V Ric_b` on the hyperbolic background
/// (`Ric_b = -(n-1) b`), for a scalar with closed-form second derivatives.
pub fn lstar_from_jet(jet: &ScalarJet, point: &ChartPoint, n: i64) -> Result<LstarFrame> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    let bg = Background::at(point);
    let (r, opp, sin, cos) = (bg.r, bg.opp, bg.sin, bg.cos);
    if sin <= 1e-12 {
        return Err(Error::DegenerateMetric { r, theta: bg.theta });
    }
    let m = n as f64 - 2.0;
    let f_metric = 1.0 / opp;
    let g_metric = r * r;
    let w_metric = g_metric * sin * sin;

    // Hessian of f Ω on the background chart (Hess_σ Ω = -Ω σ for first
    // harmonics; the Ω factors are carried symbolically)
    let h_rr = jet.f_rr + (r / opp) * jet.f_r;
    let h_rt = jet.f_rt - jet.f_t / r;
    let h_tt = jet.f_tt + r * opp * jet.f_r;
    // the mixed sphere blocks are proportional to ∇Ω, which vanishes for
    // the axisymmetric members (Ω = 1)
    let (h_ra, h_ta) = if jet.transverse {
        (jet.f_r - jet.f / r, jet.f_t - (cos / sin) * jet.f)
    } else {
        (0.0, 0.0)
    };
    let harmonic = if jet.transverse { jet.f } else { 0.0 };
    let h_sphere = -harmonic + r * opp * sin * sin * jet.f_r + sin * cos * jet.f_t;

    let laplacian = opp * h_rr + h_tt / g_metric + m * h_sphere / w_metric;
    // -(ΔV) b + Hess V + (n-1) V b, in frame components
    let diag = -laplacian + (n as f64 - 1.0) * jet.f;
    Ok(LstarFrame {
        rr: diag + h_rr / f_metric,
        rt: h_rt / (f_metric * g_metric).sqrt(),
        tt: diag + h_tt / g_metric,
        r_sphere: h_ra / (f_metric * w_metric).sqrt(),
        t_sphere: h_ta / (g_metric * w_metric).sqrt(),
        sphere_iso: diag + h_sphere / w_metric,
    })
}

/// `L_b*` applied to a basis KID.
pub fn lstar(kid: &Kid, point: &ChartPoint, n: i64) -> Result<LstarFrame> {
    lstar_from_jet(&kid.scalar_jet(point), point, n)
}

/// The `(r, θ)` components of the flux density `U(V, e)` for an
/// axisymmetric diagonal deviation and a basis KID. A transverse KID's
/// harmonic factor is left symbolic; it multiplies both components.
pub fn flux_density(kid: &Kid, e: &TensorJet, point: &ChartPoint, n: i64) -> Result<(f64, f64)> {
    let jet = kid.scalar_jet(point);
    flux_density_from_jet(&jet, e, point, n)
}

pub fn flux_density_from_jet(
    v: &ScalarJet,
    e: &TensorJet,
    point: &ChartPoint,
    n: i64,
) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    let bg = Background::at(point);
    let (r, opp, sin, cos) = (bg.r, bg.opp, bg.sin, bg.cos);
    if sin <= 1e-12 {
        return Err(Error::DegenerateMetric { r, theta: bg.theta });
    }
    let m = n as f64 - 2.0;
    let r2 = r * r;
    let sin2 = sin * sin;
    let cot = cos / sin;

    let (p, q, w) = (&e.p, &e.q, &e.w);

    // tr e = (1+r²) P + Q/r² + m W/(r² sin²θ) and its gradient
    let tr = opp * p.v + q.v / r2 + m * w.v / (r2 * sin2);
    let tr_r = 2.0 * r * p.v + opp * p.dr + q.dr / r2 - 2.0 * q.v / (r2 * r)
        + m * (w.dr / (r2 * sin2) - 2.0 * w.v / (r2 * r * sin2));
    let tr_t = opp * p.dt + q.dt / r2 + m * (w.dt - 2.0 * cot * w.v) / (r2 * sin2);

    // (div e)_r and (div e)_θ on the hyperbolic background
    let div_r = opp * p.dr + 2.0 * r * p.v + (n as f64 - 1.0) * opp * p.v / r
        - q.v / (r2 * r)
        - m * w.v / (r2 * r * sin2);
    let div_t = q.dt / r2 + m * cot * q.v / r2 - m * cot * w.v / (r2 * sin2);

    // U = V (div e - d tr e) - ι_{∇V} e + (tr e) dV
    let u_r = v.f * (div_r - tr_r) - opp * v.f_r * p.v + tr * v.f_r;
    let u_t = v.f * (div_t - tr_t) - (v.f_t / r2) * q.v + tr * v.f_t;
    Ok((u_r, u_t))
}

/// Volume of the unit d-sphere `S^d`.
pub fn unit_sphere_volume(d: i64) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI * unit_sphere_volume(d - 2) / (d as f64 - 1.0),
    }
}

/// `∫_{S^{n-2}} Ω dσ` for a first spherical harmonic, by quadrature
/// (vanishes by parity; the quadrature verifies rather than assumes it).
fn harmonic_integral(n: i64, order: usize) -> f64 {
    if n == 3 {
        // S^1: ∫_0^{2π} cos φ dφ
        numerics::gl_integrate(&|phi: f64| phi.cos(), 0.0, 2.0 * std::f64::consts::PI, order)
    } else {
        // S^{n-2}: Vol(S^{n-3}) ∫_0^π cos ψ sin^{n-3}ψ dψ
        unit_sphere_volume(n - 3)
            * numerics::gl_integrate(
                &|psi: f64| psi.cos() * psi.sin().powi((n - 3) as i32),
                0.0,
                std::f64::consts::PI,
                order,
            )
    }
}

/// Quadrature controls for the sphere integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub start_order: usize,
    pub rel_tol: f64,
    pub max_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            start_order: 16,
            rel_tol: 1e-10,
            max_order: 1 << 12,
        }
    }
}

/// Flux integral `∫_{r=R} U(V, e)(ν_r) dS_r` over the coordinate sphere:
/// `ν_r = √(1+R²) ∂_r` is the unit normal and `dS_r = R^{n-1} sin^{n-2}θ
/// dθ dσ_{n-2}` the measure induced by `b`. The latitude integral runs
/// through Gauss-Legendre with order doubling until the relative change
/// drops below tolerance.
pub fn flux_integral<E: TensorField + ?Sized>(
    e: &E,
    kid: &Kid,
    radius: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let n = e.dimension();
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "flux radius must be positive, got {radius}"
        )));
    }
    let normal = (1.0 + radius * radius).sqrt();
    let measure = radius.powi((n - 1) as i32);
    let integrand = |theta: f64| -> f64 {
        let result = ChartPoint::new(radius, theta)
            .and_then(|point| {
                e.components(&point)
                    .and_then(|tensor| flux_density(kid, &tensor, &point, n))
            })
            .map(|(u_r, _)| u_r);
        match result {
            Ok(u_r) => u_r * normal * measure * theta.sin().powi((n - 2) as i32),
            Err(_) => f64::NAN,
        }
    };
    // scale for the absolute convergence escape: integrals that vanish by
    // parity still have an O(1) unsigned mass
    let unsigned_mass = numerics::gl_integrate(
        &|theta: f64| integrand(theta).abs(),
        0.0,
        std::f64::consts::PI,
        quad.start_order,
    );
    let abs_tol = quad.rel_tol * (unsigned_mass.abs() + 1e-30);
    let (theta_part, order) = numerics::gl_integrate_adaptive(
        &integrand,
        0.0,
        std::f64::consts::PI,
        quad.start_order,
        quad.rel_tol,
        abs_tol,
        quad.max_order,
    )?;
    if !theta_part.is_finite() {
        return Err(Error::InvalidParameter(
            "flux integrand left its validity region".into(),
        ));
    }
    let sphere_factor = if kid.is_transverse() {
        harmonic_integral(n, order.min(1 << 10))
    } else {
        unit_sphere_volume(n - 2)
    };
    Ok(theta_part * sphere_factor)
}

/// Per-KID flux values over a radius ladder with the extrapolated limit.
#[derive(Debug, Clone, Serialize)]
pub struct FluxReport {
    pub kid: String,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub limit: f64,
    pub fit_residual: f64,
}

/// Runs the whole KID basis over the radius ladder, extrapolates each flux
/// by the `a + b/R + c/R²` fit, and assembles the energy-momentum vector.
pub fn em_from_flux<E: TensorField + ?Sized>(
    e: &E,
    radii: &[f64],
    quad: &QuadratureSpec,
) -> Result<(EMVector, Vec<FluxReport>)> {
    if radii.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "extrapolation needs at least 5 radii, got {}",
            radii.len()
        )));
    }
    if !radii.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::RadiiNotIncreasing);
    }
    let n = e.dimension();
    let basis = kid_basis(n)?;
    let mut components = Vec::with_capacity(basis.len());
    let mut reports = Vec::with_capacity(basis.len());
    for kid in &basis {
        let values: Vec<f64> = radii
            .iter()
            .map(|&r| flux_integral(e, kid, r, quad))
            .collect::<Result<_>>()?;
        let (limit, fit_residual) = numerics::extrapolate_inverse_powers(radii, &values)?;
        let scale = values
            .iter()
            .fold(limit.abs(), |m, v| m.max(v.abs()))
            .max(1e-12);
        if fit_residual > 0.1 * scale {
            return Err(Error::ExtrapolationUnstable(format!(
                "flux fit residual {fit_residual} for {} is large against scale {scale}",
                kid.name()
            )));
        }
        components.push(limit);
        reports.push(FluxReport {
            kid: kid.name(),
            radii: radii.to_vec(),
            values,
            limit,
            fit_residual,
        });
    }
    Ok((EMVector::new(components)?, reports))
}

/// Deviation field for any metric source, by subtracting the background
/// jet. Fine at moderate radii; the dedicated deviations above keep their
/// accuracy much further out.
pub struct GenericDeviation<'a, S: MetricSource + ?Sized> {
    pub source: &'a S,
}

impl<S: MetricSource + ?Sized> TensorField for GenericDeviation<'_, S> {
    fn dimension(&self) -> i64 {
        self.source.dimension()
    }

    fn components(&self, point: &ChartPoint) -> Result<TensorJet> {
        let jet = self.source.jet(point)?;
        let (rr, tt, ww) = jet.deviation_from_hyperbolic();
        let to1 = |j: crate::geometry::Jet2| Jet1 {
            v: j.v,
            dr: j.dr,
            dt: j.dt,
        };
        Ok(TensorJet {
            p: to1(rr),
            q: to1(tt),
            w: to1(ww),
        })
    }
}

/// The zero deviation (g = b exactly).
pub struct ZeroDeviation {
    pub n: i64,
}

impl TensorField for ZeroDeviation {
    fn dimension(&self) -> i64 {
        self.n
    }

    fn components(&self, _point: &ChartPoint) -> Result<TensorJet> {
        Ok(TensorJet {
            p: Jet1::default(),
            q: Jet1::default(),
            w: Jet1::default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{classify, CausalClass, DEFAULT_CLASSIFY_TOL};
    use crate::rational::rat_i64;
    use crate::series::solve_up_to;

    fn grid_points() -> Vec<ChartPoint> {
        let mut pts = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                let r = 2.0 + 98.0 * i as f64 / 19.0;
                let theta = 0.15 + (std::f64::consts::PI - 0.3) * j as f64 / 19.0;
                pts.push(ChartPoint::new(r, theta).unwrap());
            }
        }
        pts
    }

    #[test]
    fn kid_basis_examples() {
        for n in [3i64, 4, 5] {
            let basis = kid_basis(n).unwrap();
            assert_eq!(basis.len(), n as usize + 1);
        }
        let time = Kid::TimeTranslation;
        assert!((time.value(&ChartPoint::new(1e-12, 1.0).unwrap()) - 1.0).abs() < 1e-9);
        let axial = Kid::AxialTranslation;
        assert!(axial
            .value(&ChartPoint::new(5.0, std::f64::consts::FRAC_PI_2).unwrap())
            .abs()
            < 1e-15);
        assert!(kid_basis(2).is_err());
    }

    #[test]
    fn kids_lie_in_the_kernel_of_lstar() {
        for n in [3i64, 4, 5] {
            for kid in kid_basis(n).unwrap() {
                let mut worst = 0.0f64;
                for p in grid_points() {
                    let frame = lstar(&kid, &p, n).unwrap();
                    worst = worst.max(frame.max_abs());
                }
                assert!(
                    worst < 1e-10,
                    "n = {n}, {}: max |L*V| = {worst:e}",
                    kid.name()
                );
            }
        }
    }

    #[test]
    fn lstar_of_constant_reproduces_ricci() {
        // f ≡ 1: L*1 = -Ric_b = (n-1) b
        for n in [3i64, 5] {
            for p in [
                ChartPoint::new(2.0, 1.0).unwrap(),
                ChartPoint::new(50.0, 2.5).unwrap(),
            ] {
                let frame = lstar_from_jet(&ScalarJet::unit(), &p, n).unwrap();
                let expect = n as f64 - 1.0;
                assert!((frame.rr - expect).abs() < 1e-12);
                assert!((frame.tt - expect).abs() < 1e-12);
                assert!((frame.sphere_iso - expect).abs() < 1e-12);
                assert!(frame.rt.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flux_density_vanishes_on_zero_tensor() {
        let zero = TensorJet {
            p: Jet1::default(),
            q: Jet1::default(),
            w: Jet1::default(),
        };
        let p = ChartPoint::new(7.0, 1.2).unwrap();
        for kid in kid_basis(3).unwrap() {
            let (u_r, u_t) = flux_density(&kid, &zero, &p, 3).unwrap();
            assert_eq!((u_r, u_t), (0.0, 0.0));
        }
    }

    #[test]
    fn flux_density_matches_scaled_background_identity() {
        // e = ψ b: U(V, ψb) = (n-1)(ψ dV - V dψ)
        for n in [3i64, 4, 6] {
            let field = ScaledBackground {
                n,
                psi: |pt: &ChartPoint| {
                    let (r, t) = (pt.r(), pt.theta());
                    Jet1 {
                        v: (2.0 + t.cos()) / (r * r * r),
                        dr: -3.0 * (2.0 + t.cos()) / (r * r * r * r),
                        dt: -t.sin() / (r * r * r),
                    }
                },
            };
            for kid in [
                Kid::TimeTranslation,
                Kid::AxialTranslation,
                Kid::Transverse(1),
            ] {
                for point in [
                    ChartPoint::new(3.0, 0.8).unwrap(),
                    ChartPoint::new(11.0, 2.1).unwrap(),
                ] {
                    let e = field.components(&point).unwrap();
                    let (u_r, u_t) = flux_density(&kid, &e, &point, n).unwrap();
                    let v = kid.scalar_jet(&point);
                    let psi = (field.psi)(&point);
                    let expect_r = (n as f64 - 1.0) * (psi.v * v.f_r - v.f * psi.dr);
                    let expect_t = (n as f64 - 1.0) * (psi.v * v.f_t - v.f * psi.dt);
                    let scale = expect_r.abs().max(expect_t.abs()).max(1.0);
                    assert!(
                        (u_r - expect_r).abs() < 1e-12 * scale,
                        "{}: U_r {u_r} vs {expect_r}",
                        kid.name()
                    );
                    assert!(
                        (u_t - expect_t).abs() < 1e-12 * scale,
                        "{}: U_t {u_t} vs {expect_t}",
                        kid.name()
                    );
                }
            }
        }
    }

    #[test]
    fn flux_density_with_unit_v_collapses_to_divergence_terms() {
        // V ≡ 1 (not a KID): U = div e - d tr e; on e = ψ b that is (1-n) dψ
        let n = 3i64;
        let field = ScaledBackground {
            n,
            psi: |pt: &ChartPoint| {
                let r = pt.r();
                Jet1 {
                    v: 1.0 / r,
                    dr: -1.0 / (r * r),
                    dt: 0.0,
                }
            },
        };
        let point = ChartPoint::new(4.0, 1.0).unwrap();
        let e = field.components(&point).unwrap();
        let (u_r, u_t) = flux_density_from_jet(&ScalarJet::unit(), &e, &point, n).unwrap();
        let expect_r = (1.0 - n as f64) * (-1.0 / 16.0);
        assert!((u_r - expect_r).abs() < 1e-14);
        assert!(u_t.abs() < 1e-14);
    }

    #[test]
    fn zero_deviation_has_zero_flux() {
        let e = ZeroDeviation { n: 3 };
        let quad = QuadratureSpec::default();
        for kid in kid_basis(3).unwrap() {
            let f = flux_integral(&e, &kid, 20.0, &quad).unwrap();
            assert_eq!(f, 0.0);
        }
        let radii = [10.0, 15.0, 20.0, 30.0, 45.0];
        let (p, reports) = em_from_flux(&e, &radii, &quad).unwrap();
        assert!(p.components().iter().all(|&c| c == 0.0));
        assert_eq!(reports.len(), 4);
    }

    #[test]
    fn kottler_flux_is_negative_for_negative_mass() {
        let e = KottlerDeviation {
            kottler: Kottler::new(3, -1.0).unwrap(),
        };
        let quad = QuadratureSpec::default();
        for radius in [10.0, 20.0, 50.0, 100.0] {
            let f = flux_integral(&e, &Kid::TimeTranslation, radius, &quad).unwrap();
            assert!(f < 0.0, "flux {f} at R = {radius}");
        }
    }

    #[test]
    fn kottler_em_is_timelike_past_for_negative_mass() {
        let e = KottlerDeviation {
            kottler: Kottler::new(3, -1.0).unwrap(),
        };
        let radii = [40.0, 60.0, 90.0, 130.0, 200.0, 300.0];
        let (p, reports) = em_from_flux(&e, &radii, &QuadratureSpec::default()).unwrap();
        assert_eq!(classify(&p, DEFAULT_CLASSIFY_TOL), CausalClass::TimelikePast);
        // spatial fluxes vanish for the radial metric
        for rep in &reports[1..] {
            assert!(
                rep.limit.abs() < 1e-8 * reports[0].limit.abs(),
                "{}: limit {}",
                rep.kid,
                rep.limit
            );
        }
        // the limit matches the closed-form value 16 π m for n = 3 (the
        // corrections are even in 1/R, so the pinned {1, 1/R, 1/R²} fit
        // basis leaves a few-1e-6 leakage at these radii)
        let expect = -16.0 * std::f64::consts::PI;
        assert!(
            (reports[0].limit / expect - 1.0).abs() < 1e-5,
            "limit {} vs {expect}",
            reports[0].limit
        );
    }

    #[test]
    fn constructed_metric_flux_matches_moment_direction() {
        let quad = QuadratureSpec::default();
        let radii = [30.0, 40.0, 55.0, 75.0, 100.0, 140.0];
        let mut lambda_hats = Vec::new();
        for (beta, gamma) in [(2i64, 1i64), (1, 0), (1, 3)] {
            let sol = solve_up_to(3, rat_i64(beta), rat_i64(gamma), 12).unwrap();
            let metric = Conformal::new(&sol).unwrap();
            let e = ConformalDeviation::new(&metric);
            let (p, reports) = em_from_flux(&e, &radii, &quad).unwrap();

            // transverse components vanish by axisymmetry
            for rep in &reports[1..3] {
                assert!(
                    rep.limit.abs() < 1e-7 * reports[0].limit.abs().max(1.0),
                    "{}: {}",
                    rep.kid,
                    rep.limit
                );
            }

            // ratio p_n/p_0 = (2γ/3)/(2β) = γ/(3β)
            let ratio = p.components()[3] / p.components()[0];
            let expect = gamma as f64 / (3.0 * beta as f64);
            if gamma == 0 {
                assert!(ratio.abs() < 1e-6, "ratio {ratio}");
            } else {
                assert!(
                    (ratio - expect).abs() < 1e-3 * expect.abs(),
                    "(β,γ)=({beta},{gamma}): ratio {ratio} vs {expect}"
                );
            }

            // λ̂ = flux p_0 over moment p_0 (= 2β for λ = 1)
            lambda_hats.push(p.components()[0] / (2.0 * beta as f64));
        }
        let mean: f64 = lambda_hats.iter().sum::<f64>() / lambda_hats.len() as f64;
        assert!(mean > 0.0);
        for lh in &lambda_hats {
            assert!((lh / mean - 1.0).abs() < 0.01, "λ̂ spread: {lambda_hats:?}");
        }
    }

    #[test]
    fn flux_limit_is_stable_under_dropping_smallest_radius() {
        let sol = solve_up_to(3, rat_i64(2), rat_i64(1), 12).unwrap();
        let metric = Conformal::new(&sol).unwrap();
        let e = ConformalDeviation::new(&metric);
        let quad = QuadratureSpec::default();
        let radii = [30.0, 40.0, 55.0, 75.0, 100.0, 140.0];
        let (p_full, _) = em_from_flux(&e, &radii, &quad).unwrap();
        let (p_drop, _) = em_from_flux(&e, &radii[1..], &quad).unwrap();
        let shift = (p_full.components()[0] - p_drop.components()[0]).abs()
            / p_full.components()[0].abs();
        assert!(shift < 1e-3, "limit shifted by {shift}");
    }

    #[test]
    fn successive_flux_values_differ_by_inverse_radius_scale() {
        let sol = solve_up_to(3, rat_i64(1), rat_i64(1), 12).unwrap();
        let metric = Conformal::new(&sol).unwrap();
        let e = ConformalDeviation::new(&metric);
        let quad = QuadratureSpec::default();
        let radii = [20.0, 40.0, 80.0, 160.0];
        let values: Vec<f64> = radii
            .iter()
            .map(|&r| flux_integral(&e, &Kid::TimeTranslation, r, &quad).unwrap())
            .collect();
        let limit = values[3];
        // the leading correction is O(R^{-2}); doubling R must shrink the
        // gap to the limit decisively
        let g1 = (values[0] - limit).abs();
        let g2 = (values[1] - limit).abs();
        assert!(g2 < g1 * 0.5, "gaps {g1} {g2}");
    }

    #[test]
    fn generic_deviation_agrees_with_dedicated_conformal_field() {
        let sol = solve_up_to(3, rat_i64(1), rat_i64(2), 10).unwrap();
        let metric = Conformal::new(&sol).unwrap();
        let dedicated = ConformalDeviation::new(&metric);
        let generic = GenericDeviation { source: &metric };
        let quad = QuadratureSpec::default();
        for radius in [8.0, 15.0] {
            let a = flux_integral(&dedicated, &Kid::TimeTranslation, radius, &quad).unwrap();
            let b = flux_integral(&generic, &Kid::TimeTranslation, radius, &quad).unwrap();
            assert!((a - b).abs() < 1e-6 * a.abs(), "R = {radius}: {a} vs {b}");
        }
    }

    #[test]
    fn em_from_flux_validates_radii() {
        let e = ZeroDeviation { n: 3 };
        let quad = QuadratureSpec::default();
        assert!(matches!(
            em_from_flux(&e, &[10.0, 20.0], &quad),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            em_from_flux(&e, &[10.0, 20.0, 15.0, 30.0, 40.0], &quad),
            Err(Error::RadiiNotIncreasing)
        ));
    }

    #[test]
    fn sphere_volumes() {
        assert!((unit_sphere_volume(1) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_sphere_volume(2) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
        let s3 = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        assert!((unit_sphere_volume(3) - s3).abs() < 1e-13);
    }
}
