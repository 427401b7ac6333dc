//! Order-by-order solution of the Yamabe equation on the hyperbolic
//! background for conformal factors of the form
//! `u = 1 + Σ_{k>=0} u_k(θ) r^{-(n+k)}`, with `u_0 = β + γ cos θ`.
//!
//! Matching powers of `1/r` in `Δ_b u = (n(n-2)/4)(u^{(n+2)/(n-2)} - u)`
//! gives, for every k >= 0,
//!
//! ```text
//! (k+1)(k+n) u_k + k(k+n-2) u_{k-2} + A_n[u_{k-2}] = (n(n-2)/4)(v_k - u_k)
//! ```
//!
//! with `u_{-1} = u_{-2} = 0`, `A_n[v] = v'' + (n-2)(cos θ/sin θ) v'`, and
//! `v_k` the matching coefficient of `u^{(n+2)/(n-2)}`. Splitting off the
//! linear part of `v_k` leaves the solvable form
//!
//! ```text
//! k(k+n+1) u_k = (n(n-2)/4) P_k - k(k+n-2) u_{k-2} - A_n[u_{k-2}]
//! ```
//!
//! where `P_k` collects the genuinely nonlinear products
//! `Σ_{p>=2, (p-1)n<=k} C((n+2)/(n-2), p) Σ_{l_1+..+l_p = k-(p-1)n} u_{l_1}..u_{l_p}`.
//! The divisor `k(k+n+1)` is strictly positive for k >= 1, so every order is
//! determined; k = 1 forces `u_1 = 0`.
//!
//! Everything here is exact: coefficients are rational polynomials in
//! `x = cos θ` and each order can be re-verified as an identity
//! ([`verify_order`]) through a code path that does not share the solver's
//! series convolution.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycos::PolyCos;
use crate::rational::{self, Rational};

/// Supported truncation envelope. Coefficient bit-length grows linearly in
/// k, so exact solves stay practical up to a couple hundred orders.
pub const MAX_TRUNCATION: usize = 200;

/// Truncated series solution `u = 1 + Σ_{k=0}^{K} u_k(θ) r^{-(n+k)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSolution {
    n: i64,
    beta: Rational,
    gamma: Rational,
    coefficients: Vec<PolyCos>,
}

impl SeriesSolution {
    /// Assembles a solution object from raw parts (used by deserialization
    /// and by mutation tests; no claim that the coefficients actually solve
    /// the recursion).
    pub fn from_parts(
        n: i64,
        beta: Rational,
        gamma: Rational,
        coefficients: Vec<PolyCos>,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter(
                "a solution stores at least u_0".into(),
            ));
        }
        Ok(SeriesSolution {
            n,
            beta,
            gamma,
            coefficients,
        })
    }

    pub fn dimension(&self) -> i64 {
        self.n
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// Truncation order K.
    pub fn truncation_order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[PolyCos] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> Result<&PolyCos> {
        self.coefficients
            .get(k)
            .ok_or(Error::MissingCoefficient(k, self.coefficients.len() - 1))
    }

    /// Returns a copy with `u_k` replaced by `u_k + 1` (mutation testing).
    pub fn perturbed(&self, k: usize) -> Result<Self> {
        let mut out = self.clone();
        let uk = out
            .coefficients
            .get_mut(k)
            .ok_or(Error::MissingCoefficient(k, self.coefficients.len() - 1))?;
        *uk = uk.add(&PolyCos::constant(Rational::one()));
        Ok(out)
    }

    /// `u(r, θ)` in floating point.
    pub fn eval_u(&self, r: f64, theta: f64) -> f64 {
        1.0 + self.eval_tail(r, theta)
    }

    /// `u(r, θ) - 1`, summed highest order first. Keeping the constant out
    /// of the sum preserves the small tail against roundoff.
    pub fn eval_tail(&self, r: f64, theta: f64) -> f64 {
        let x = theta.cos();
        let rinv = 1.0 / r;
        let mut acc = 0.0;
        for u_k in self.coefficients.iter().rev() {
            acc = acc * rinv + u_k.eval_x(x);
        }
        acc * rinv.powi(self.n as i32)
    }

    /// Exact evaluation of `u` at rational `r` and `x = cos θ`.
    pub fn eval_u_exact(&self, r: &Rational, x: &Rational) -> Rational {
        let rinv = r.recip();
        let mut acc = Rational::zero();
        for u_k in self.coefficients.iter().rev() {
            acc = acc * &rinv + u_k.eval_x_exact(x);
        }
        let mut scale = Rational::one();
        for _ in 0..self.n {
            scale *= &rinv;
        }
        Rational::one() + acc * scale
    }
}

/// JSON layout: `{n, beta, gamma, K, coefficients}` with exact rational
/// strings throughout.
#[derive(Serialize, Deserialize)]
struct SolutionJson {
    n: i64,
    beta: String,
    gamma: String,
    #[serde(rename = "K")]
    k: usize,
    coefficients: Vec<PolyCos>,
}

impl Serialize for SeriesSolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SolutionJson {
            n: self.n,
            beta: rational::format_rational(&self.beta),
            gamma: rational::format_rational(&self.gamma),
            k: self.truncation_order(),
            coefficients: self.coefficients.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeriesSolution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = SolutionJson::deserialize(d)?;
        if raw.coefficients.len() != raw.k + 1 {
            return Err(D::Error::custom(format!(
                "K = {} but {} coefficients stored",
                raw.k,
                raw.coefficients.len()
            )));
        }
        let beta = rational::parse_rational(&raw.beta).map_err(DeError::custom)?;
        let gamma = rational::parse_rational(&raw.gamma).map_err(DeError::custom)?;
        SeriesSolution::from_parts(raw.n, beta, gamma, raw.coefficients).map_err(DeError::custom)
    }
}

/// Generalized binomial coefficient with exponent `(n+2)/(n-2)`, exactly.
pub fn gen_binomial(n: i64, p: i64) -> Result<Rational> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    if p < 0 {
        return Err(Error::InvalidParameter(format!(
            "binomial order must be >= 0, got {p}"
        )));
    }
    let q = rational::rat(n + 2, n - 2);
    let mut out = Rational::one();
    for j in 0..p {
        out *= (&q - rational::rat_i64(j)) / rational::rat_i64(j + 1);
    }
    Ok(out)
}

/// `n(n-2)/4` as a rational.
fn yamabe_constant(n: i64) -> Rational {
    rational::rat(n * (n - 2), 4)
}

/// Incremental solver state: computed coefficients plus the cached
/// truncated powers `S(t)^p` of `S(t) = Σ_k u_k t^k` that feed `P_k`.
///
/// Row p holds coefficients of `S^p`; entry (p, j) only ever involves
/// `u_0..u_j` with `j <= k - n` at the time order k is assembled, so cached
/// entries never go stale as new orders arrive.
struct Solver {
    n: i64,
    coefficients: Vec<PolyCos>,
    /// power_rows[p-2] = coefficients of S^{p}, extended lazily.
    power_rows: Vec<Vec<PolyCos>>,
    /// gen_binomial(n, p) for p = row index + 2.
    binomials: Vec<Rational>,
}

impl Solver {
    fn new(n: i64, u0: PolyCos) -> Self {
        Solver {
            n,
            coefficients: vec![u0],
            power_rows: Vec::new(),
            binomials: Vec::new(),
        }
    }

    fn from_existing(sol: &SeriesSolution, up_to: usize) -> Self {
        Solver {
            n: sol.n,
            coefficients: sol.coefficients[..=up_to.min(sol.truncation_order())].to_vec(),
            power_rows: Vec::new(),
            binomials: Vec::new(),
        }
    }

    /// Ensures row p of the power cache holds entries `0..=j`.
    fn ensure_power_row(&mut self, p: usize, j: usize) {
        if p <= 1 {
            return;
        }
        self.ensure_power_row(p - 1, j);
        while self.power_rows.len() < p - 1 {
            self.power_rows.push(Vec::new());
        }
        while self.power_rows[p - 2].len() <= j {
            let m = self.power_rows[p - 2].len();
            let mut acc = crate::polycos::RawPoly::zero();
            for i in 0..=m {
                let lower = if p == 2 {
                    &self.coefficients[m - i]
                } else {
                    &self.power_rows[p - 3][m - i]
                };
                acc.add_product(lower, &self.coefficients[i]);
            }
            let entry = acc.into_poly();
            self.power_rows[p - 2].push(entry);
        }
    }

    /// Coefficient j of `S^p` (p >= 1), extending caches as required.
    fn power_entry(&mut self, p: usize, j: usize) -> PolyCos {
        if p == 1 {
            return self.coefficients[j].clone();
        }
        self.ensure_power_row(p, j);
        self.power_rows[p - 2][j].clone()
    }

    fn binomial(&mut self, p: usize) -> Rational {
        while self.binomials.len() < p - 1 {
            let next_p = self.binomials.len() as i64 + 2;
            self.binomials
                .push(gen_binomial(self.n, next_p).expect("validated n"));
        }
        self.binomials[p - 2].clone()
    }

    /// `P_k` from the cached powers; requires `u_0..u_{k-n}` (all below k).
    fn p_k(&mut self, k: usize) -> PolyCos {
        let n = self.n as usize;
        let mut acc = PolyCos::zero();
        let mut p = 2;
        while (p - 1) * n <= k {
            let j = k - (p - 1) * n;
            let c = self.binomial(p);
            let entry = self.power_entry(p, j);
            if !entry.is_zero() {
                acc = acc.add(&entry.scale(&c));
            }
            p += 1;
        }
        acc
    }

    /// Solves order k >= 1:
    /// `u_k = [ (n(n-2)/4) P_k - k(k+n-2) u_{k-2} - A_n[u_{k-2}] ] / (k(k+n+1))`.
    fn step(&mut self) -> Result<PolyCos> {
        let k = self.coefficients.len();
        let n = self.n;
        let p_k = self.p_k(k);
        let mut rhs = p_k.scale(&yamabe_constant(n));
        if k >= 2 {
            let prev = &self.coefficients[k - 2];
            let lower = prev.scale(&rational::rat_i64(k as i64 * (k as i64 + n - 2)));
            rhs = rhs.sub(&lower).sub(&prev.angular_op(n)?);
        }
        let divisor = rational::rat_i64(k as i64 * (k as i64 + n + 1));
        let u_k = rhs.scale(&divisor.recip());
        self.coefficients.push(u_k.clone());
        Ok(u_k)
    }
}

/// Computes `P_k(u_0, .., u_{k-1})` for an existing solution via the cached
/// truncated-power route. Zero whenever k < n (the index set is empty).
pub fn compute_pk(sol: &SeriesSolution, k: usize) -> Result<PolyCos> {
    let needed = k.saturating_sub(sol.n as usize);
    if k > 0 && needed + 1 > sol.coefficients.len() {
        return Err(Error::MissingCoefficient(needed, sol.truncation_order()));
    }
    let mut solver = Solver::from_existing(sol, needed);
    Ok(solver.p_k(k))
}

/// Solves order k from `u_0..u_{k-1}` of an existing solution.
pub fn solve_coefficient(sol: &SeriesSolution, k: usize) -> Result<PolyCos> {
    if k == 0 {
        return sol.coefficient(0).cloned();
    }
    if k > sol.truncation_order() + 1 {
        return Err(Error::MissingCoefficient(k - 1, sol.truncation_order()));
    }
    let mut solver = Solver::from_existing(sol, k - 1);
    solver.step()
}

/// Runs the recursion up to order K with `u_0 = beta + gamma cos θ`.
pub fn solve_up_to(n: i64, beta: Rational, gamma: Rational, k_max: usize) -> Result<SeriesSolution> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    if k_max > MAX_TRUNCATION {
        return Err(Error::TruncationTooLarge(k_max, MAX_TRUNCATION));
    }
    let u0 = PolyCos::linear(beta.clone(), gamma.clone());
    let mut solver = Solver::new(n, u0);
    for _ in 1..=k_max {
        solver.step()?;
    }
    Ok(SeriesSolution {
        n,
        beta,
        gamma,
        coefficients: solver.coefficients,
    })
}

/// Exact report for one order of the matched-coefficient identity.
#[derive(Debug, Clone, Serialize)]
pub struct OrderReport {
    pub k: usize,
    pub lhs: PolyCos,
    pub rhs: PolyCos,
    pub exact_match: bool,
}

/// Re-derives `v_k` by direct binomial expansion of `(1 + s)^{(n+2)/(n-2)}`
/// composed with the truncated series — a route that does not share the
/// solver's lazy power cache — and checks the order-k identity exactly.
pub struct OrderVerifier<'a> {
    sol: &'a SeriesSolution,
    /// rows[p-1] = coefficients of S^p, p = 1.., full truncated products.
    rows: Vec<Vec<PolyCos>>,
}

impl<'a> OrderVerifier<'a> {
    pub fn new(sol: &'a SeriesSolution) -> Self {
        OrderVerifier {
            sol,
            rows: vec![sol.coefficients.clone()],
        }
    }

    fn row(&mut self, p: usize) -> &[PolyCos] {
        let k_max = self.sol.truncation_order();
        let n = self.sol.n as usize;
        while self.rows.len() < p {
            let p_new = self.rows.len() + 1;
            // entries beyond K - (p-1)n never feed any v_k with k <= K
            let len = k_max.saturating_sub((p_new - 1) * n) + 1;
            let prev = &self.rows[p_new - 2];
            let base = &self.rows[0];
            let mut next = Vec::with_capacity(len);
            for m in 0..len {
                let mut acc = crate::polycos::RawPoly::zero();
                for i in 0..=m {
                    acc.add_product(&prev[m - i], &base[i]);
                }
                next.push(acc.into_poly());
            }
            self.rows.push(next);
        }
        &self.rows[p - 1]
    }

    /// `v_k`: the order-k coefficient of `u^{(n+2)/(n-2)} - 1`.
    pub fn v_k(&mut self, k: usize) -> Result<PolyCos> {
        let n = self.sol.n;
        let q = gen_binomial(n, 1)?; // (n+2)/(n-2)
        let mut acc = self.sol.coefficient(k)?.scale(&q);
        let mut p = 2usize;
        while (p - 1) * (n as usize) <= k {
            let j = k - (p - 1) * n as usize;
            let c = gen_binomial(n, p as i64)?;
            let entry = &self.row(p)[j];
            if !entry.is_zero() {
                acc = acc.add(&entry.scale(&c));
            }
            p += 1;
        }
        Ok(acc)
    }

    /// Checks `(k+1)(k+n) u_k + k(k+n-2) u_{k-2} + A_n[u_{k-2}]
    ///          = (n(n-2)/4)(v_k - u_k)` exactly.
    pub fn verify_order(&mut self, k: usize) -> Result<OrderReport> {
        let n = self.sol.n;
        let u_k = self.sol.coefficient(k)?;
        let mut lhs = u_k.scale(&rational::rat_i64((k as i64 + 1) * (k as i64 + n)));
        if k >= 2 {
            let prev = self.sol.coefficient(k - 2)?;
            lhs = lhs
                .add(&prev.scale(&rational::rat_i64(k as i64 * (k as i64 + n - 2))))
                .add(&prev.angular_op(n)?);
        }
        let v_k = self.v_k(k)?;
        let rhs = v_k.sub(u_k).scale(&yamabe_constant(n));
        let exact_match = lhs == rhs;
        Ok(OrderReport {
            k,
            lhs,
            rhs,
            exact_match,
        })
    }
}

/// One-off order check; builds a fresh verifier.
pub fn verify_order(sol: &SeriesSolution, k: usize) -> Result<OrderReport> {
    OrderVerifier::new(sol).verify_order(k)
}

/// Verifies every order up to K, reusing one verifier.
pub fn verify_all_orders(sol: &SeriesSolution) -> Result<Vec<OrderReport>> {
    let mut verifier = OrderVerifier::new(sol);
    (0..=sol.truncation_order())
        .map(|k| verifier.verify_order(k))
        .collect()
}

/// Largest estimate `α̂ = max_{1<=k<=K} (|u_k|_1 (k+1)²)^{1/k}` together with
/// the per-order sequence; the empirical growth-rate witness.
pub fn alpha_hat_sequence(sol: &SeriesSolution) -> Vec<f64> {
    let mut out = Vec::new();
    let mut best = 0.0f64;
    for (k, u_k) in sol.coefficients.iter().enumerate().skip(1) {
        if !u_k.is_zero() {
            let norm = u_k.one_norm();
            let kp1 = rational::rat_i64(k as i64 + 1);
            let val = (rational::ln_abs(&(norm * &kp1 * &kp1)) / k as f64).exp();
            best = best.max(val);
        }
        out.push(best);
    }
    out
}

/// Floating-point evaluation tables for a solution: per-order f64
/// coefficient arrays for `u_k`, `u_k'` and `u_k''` in `x`, so grid scans
/// and quadrature do not re-convert exact rationals at every sample.
pub struct SeriesEvaluator {
    n: i64,
    /// coeffs[k] = f64 coefficients of u_k(x)
    coeffs: Vec<Vec<f64>>,
    dcoeffs: Vec<Vec<f64>>,
    ddcoeffs: Vec<Vec<f64>>,
    /// f64 coefficients of A_n[u_k](x)
    angular: Vec<Vec<f64>>,
}

fn poly_to_f64(p: &PolyCos) -> Vec<f64> {
    p.coeffs().iter().map(rational::to_f64).collect()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// The value and first/second partial derivatives of `u` at a point.
#[derive(Debug, Clone, Copy)]
pub struct UJet {
    pub u: f64,
    pub u_r: f64,
    pub u_t: f64,
    pub u_rr: f64,
    pub u_rt: f64,
    pub u_tt: f64,
}

impl SeriesEvaluator {
    pub fn new(sol: &SeriesSolution) -> Result<Self> {
        let coeffs: Vec<Vec<f64>> = sol.coefficients.iter().map(poly_to_f64).collect();
        let dcoeffs = sol
            .coefficients
            .iter()
            .map(|p| poly_to_f64(&p.derivative_x()))
            .collect();
        let ddcoeffs = sol
            .coefficients
            .iter()
            .map(|p| poly_to_f64(&p.derivative_x().derivative_x()))
            .collect();
        let angular = sol
            .coefficients
            .iter()
            .map(|p| p.angular_op(sol.n).map(|a| poly_to_f64(&a)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesEvaluator {
            n: sol.n,
            coeffs,
            dcoeffs,
            ddcoeffs,
            angular,
        })
    }

    pub fn dimension(&self) -> i64 {
        self.n
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `u - 1`.
    pub fn tail(&self, r: f64, theta: f64) -> f64 {
        let x = theta.cos();
        let rinv = 1.0 / r;
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * rinv + horner(c, x);
        }
        acc * rinv.powi(self.n as i32)
    }

    pub fn u(&self, r: f64, theta: f64) -> f64 {
        1.0 + self.tail(r, theta)
    }

    /// Full 2-jet of `u` by term-wise differentiation of the series.
    pub fn jet(&self, r: f64, theta: f64) -> UJet {
        let x = theta.cos();
        let sin = theta.sin();
        let rinv = 1.0 / r;
        let n = self.n as f64;
        let (mut tail, mut s_r, mut s_rr, mut dx, mut dx_r, mut ddx) =
            (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            let e = n + k as f64;
            let v = horner(c, x);
            let dv = horner(&self.dcoeffs[k], x);
            let ddv = horner(&self.ddcoeffs[k], x);
            tail = tail * rinv + v;
            s_r = s_r * rinv + e * v;
            s_rr = s_rr * rinv + e * (e + 1.0) * v;
            dx = dx * rinv + dv;
            dx_r = dx_r * rinv + e * dv;
            ddx = ddx * rinv + ddv;
        }
        let scale = rinv.powi(self.n as i32);
        let u = 1.0 + tail * scale;
        let u_r = -s_r * scale * rinv;
        let u_rr = s_rr * scale * rinv * rinv;
        // d/dθ = -sin θ d/dx;  d²/dθ² = -cos θ d/dx + sin²θ d²/dx²
        let u_t = -sin * dx * scale;
        let u_rt = sin * dx_r * scale * rinv;
        let u_tt = (-x * dx + sin * sin * ddx) * scale;
        UJet {
            u,
            u_r,
            u_t,
            u_rr,
            u_rt,
            u_tt,
        }
    }

    /// Term-wise analytic `Δ_b u` using the split
    /// `(1+r²) u_rr + ((n-1+n r²)/r) u_r + r^{-2} A_n[u]`.
    pub fn laplacian(&self, r: f64, theta: f64) -> f64 {
        let x = theta.cos();
        let rinv = 1.0 / r;
        let n = self.n as f64;
        let (mut rad, mut ang) = (0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            let e = n + k as f64;
            let v = horner(c, x);
            // radial part of the operator applied to v r^{-e}:
            // [ (1+r²) e(e+1) r^{-e-2} - (n-1+n r²) e r^{-e-2} ] v
            // = [ e(e+1) - n e ] v r^{-e} + [ e(e+1) - (n-1) e ] v r^{-e-2}
            // accumulated as two Horner passes sharing the same r power.
            rad = rad * rinv + e * (e + 1.0 - n) * v;
            ang = ang * rinv + (e * (e + 1.0 - (n - 1.0))) * v + horner(&self.angular[k], x);
        }
        let scale = rinv.powi(self.n as i32);
        rad * scale + ang * scale * rinv * rinv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_i64};

    fn solve(n: i64, beta: (i64, i64), gamma: (i64, i64), k: usize) -> SeriesSolution {
        solve_up_to(n, rat(beta.0, beta.1), rat(gamma.0, gamma.1), k).unwrap()
    }

    #[test]
    fn gen_binomial_examples() {
        assert_eq!(gen_binomial(3, 0).unwrap(), rat_i64(1));
        assert_eq!(gen_binomial(3, 2).unwrap(), rat_i64(10));
        assert_eq!(gen_binomial(4, 1).unwrap(), rat_i64(3));
        // integer exponent truncates: (n+2)/(n-2) = 5 for n = 3
        assert_eq!(gen_binomial(3, 6).unwrap(), rat_i64(0));
        assert!(gen_binomial(2, 1).is_err());
        assert!(gen_binomial(3, -1).is_err());
    }

    #[test]
    fn first_order_vanishes() {
        for n in [3, 4, 5, 7] {
            let sol = solve(n, (1, 1), (1, 1), 1);
            assert!(sol.coefficient(1).unwrap().is_zero());
        }
        let sol = solve(3, (1, 1), (0, 1), 1);
        assert_eq!(sol.coefficient(0).unwrap(), &PolyCos::constant(rat_i64(1)));
        assert!(sol.coefficient(1).unwrap().is_zero());
    }

    #[test]
    fn zero_seed_stays_zero() {
        let sol = solve(3, (0, 1), (0, 1), 50);
        for k in 0..=50 {
            assert!(sol.coefficient(k).unwrap().is_zero(), "u_{k} nonzero");
        }
    }

    /// Second order by independent hand reduction of the k = 2 identity:
    /// 12 u_2 + 6 u_0 + A_3[u_0] = 0 (P_2 vanishes for n = 3), so
    /// u_2 = -(6β + 4γx)/12.
    #[test]
    fn second_order_matches_hand_reduction() {
        let sol = solve(3, (1, 1), (1, 1), 2);
        let expect = PolyCos::linear(rat(-1, 2), rat(-1, 3));
        assert_eq!(sol.coefficient(2).unwrap(), &expect);

        let sol = solve(3, (0, 1), (0, 1), 2);
        assert!(sol.coefficient(2).unwrap().is_zero());

        // generic parameters
        let sol = solve_up_to(3, rat(2, 1), rat(-3, 1), 2).unwrap();
        let expect = PolyCos::linear(rat(-2 * 6, 12), rat(3 * 4, 12));
        assert_eq!(sol.coefficient(2).unwrap(), &expect);
    }

    #[test]
    fn third_order_matches_pk_reduction() {
        // n = 3, k = 3: P_3 = 10 u_0², so u_3 = (3/4)(10 u_0²)/21 = (5/14) u_0².
        let sol = solve(3, (1, 1), (1, 1), 3);
        let u0 = PolyCos::linear(rat_i64(1), rat_i64(1));
        let expect = u0.mul(&u0).scale(&rat(5, 14));
        assert_eq!(sol.coefficient(3).unwrap(), &expect);
    }

    #[test]
    fn pk_examples() {
        let sol = solve(3, (1, 1), (1, 1), 6);
        for n in [3i64, 4, 5] {
            let s = solve(n, (1, 1), (1, 1), 2);
            assert!(compute_pk(&s, (n - 1) as usize).unwrap().is_zero());
        }
        let u0 = PolyCos::linear(rat_i64(1), rat_i64(1));
        assert_eq!(compute_pk(&sol, 3).unwrap(), u0.mul(&u0).scale(&rat_i64(10)));
        assert!(compute_pk(&sol, 4).unwrap().is_zero());
    }

    /// Brute-force composition enumeration: the exponential-time oracle for
    /// the cached-power route, valid for small k.
    fn pk_brute_force(sol: &SeriesSolution, k: usize) -> PolyCos {
        let n = sol.dimension() as usize;
        let mut acc = PolyCos::zero();
        let mut p = 2usize;
        while (p - 1) * n <= k {
            let l = k - (p - 1) * n;
            let mut sum = PolyCos::zero();
            let mut parts = vec![0usize; p];
            enumerate_compositions(l, p, &mut parts, 0, &mut |parts| {
                let mut prod = PolyCos::constant(Rational::one());
                for &li in parts {
                    prod = prod.mul_naive(sol.coefficient(li).unwrap());
                }
                sum = sum.add(&prod);
            });
            acc = acc.add(&sum.scale(&gen_binomial(sol.dimension(), p as i64).unwrap()));
            p += 1;
        }
        acc
    }

    fn enumerate_compositions(
        rest: usize,
        slots: usize,
        parts: &mut Vec<usize>,
        idx: usize,
        f: &mut impl FnMut(&[usize]),
    ) {
        if idx == slots - 1 {
            parts[idx] = rest;
            f(parts);
            return;
        }
        for v in 0..=rest {
            parts[idx] = v;
            enumerate_compositions(rest - v, slots, parts, idx + 1, f);
        }
    }

    #[test]
    fn pk_matches_brute_force_enumeration() {
        for n in [3i64, 4, 5] {
            let sol = solve(n, (1, 1), (1, 2), 12);
            for k in 0..=12usize {
                let fast = compute_pk(&sol, k).unwrap();
                let slow = pk_brute_force(&sol, k);
                assert_eq!(fast, slow, "P_k mismatch at n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn solve_coefficient_is_consistent_with_solve_up_to() {
        let sol = solve(4, (2, 1), (-1, 1), 10);
        for k in 1..=10 {
            let short =
                SeriesSolution::from_parts(4, rat_i64(2), rat_i64(-1), sol.coefficients()[..k].to_vec())
                    .unwrap();
            assert_eq!(&solve_coefficient(&short, k).unwrap(), sol.coefficient(k).unwrap());
        }
    }

    #[test]
    fn degree_bound_holds() {
        let sol = solve(3, (1, 1), (1, 1), 30);
        for k in 1..=30 {
            assert!(
                sol.coefficient(k).unwrap().degree() <= k as i64 - 1,
                "degree bound violated at k = {k}"
            );
        }
    }

    #[test]
    fn radial_seed_stays_radial() {
        let sol = solve(5, (3, 2), (0, 1), 25);
        for k in 0..=25 {
            assert!(sol.coefficient(k).unwrap().degree() <= 0);
        }
    }

    #[test]
    fn orders_verify_and_mutations_fail() {
        for n in [3i64, 5] {
            let sol = solve(n, (1, 1), (2, 1), 12);
            let reports = verify_all_orders(&sol).unwrap();
            assert!(reports.iter().all(|r| r.exact_match));

            // k = 0: w_0 = n u_0 against v_0 = ((n+2)/(n-2)) u_0
            let r0 = &reports[0];
            assert_eq!(r0.lhs, sol.coefficient(0).unwrap().scale(&rat_i64(n)));
            // k = 1 is the forced-vanishing order: both sides zero
            assert!(reports[1].lhs.is_zero() && reports[1].rhs.is_zero());

            for k in [1usize, 2, 7, 12] {
                let bad = sol.perturbed(k).unwrap();
                assert!(
                    !verify_order(&bad, k).unwrap().exact_match,
                    "mutation at k = {k} not detected"
                );
            }
            // u_0 is the free coefficient: order 0 holds for any u_0, and a
            // perturbation there surfaces at the first order that consumes it.
            let bad = sol.perturbed(0).unwrap();
            assert!(verify_order(&bad, 0).unwrap().exact_match);
            assert!(!verify_order(&bad, 2).unwrap().exact_match);
        }
    }

    #[test]
    fn eval_u_examples() {
        let zero = solve(3, (0, 1), (0, 1), 5);
        assert_eq!(zero.eval_u(7.3, 1.1), 1.0);

        let sol = solve(3, (1, 1), (0, 1), 0);
        let got = sol.eval_u(10.0, std::f64::consts::FRAC_PI_2);
        assert!((got - (1.0 + 1e-3)).abs() < 1e-15);

        // r = 10, θ = 0: 1 + 2e-3 + u_2(1) e-5 with u_2(1) = -5/6
        let sol = solve(3, (1, 1), (1, 1), 2);
        let got = sol.eval_u(10.0, 0.0);
        let expect = 1.0 + 2e-3 - (5.0 / 6.0) * 1e-5;
        assert!((got - expect).abs() < 1e-14, "got {got}, expect {expect}");

        // exact evaluation agrees
        let exact = sol.eval_u_exact(&rat_i64(10), &rat_i64(1));
        assert_eq!(exact, rat(1, 1) + rat(2, 1000) - rat(5, 6) * rat(1, 100_000));
    }

    #[test]
    fn alpha_hat_is_monotone_in_k() {
        let sol = solve(3, (1, 1), (1, 1), 40);
        let seq = alpha_hat_sequence(&sol);
        for w in seq.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(seq.last().unwrap().is_finite());

        let zero = solve(3, (0, 1), (0, 1), 10);
        assert!(alpha_hat_sequence(&zero).iter().all(|&a| a == 0.0));
    }

    #[test]
    fn solution_serde_round_trip_lossless() {
        let sol = solve(4, (7, 3), (-2, 5), 8);
        let json = serde_json::to_string(&sol).unwrap();
        let back: SeriesSolution = serde_json::from_str(&json).unwrap();
        assert_eq!(sol, back);
        // field order pinned for byte-identical artifacts
        assert!(json.starts_with(r#"{"n":4,"beta":"7/3","gamma":"-2/5","K":8,"coefficients":"#));
    }

    #[test]
    fn envelope_and_dimension_guards() {
        assert!(matches!(
            solve_up_to(2, rat_i64(1), rat_i64(0), 3),
            Err(Error::InvalidDimension(2))
        ));
        assert!(matches!(
            solve_up_to(3, rat_i64(1), rat_i64(0), MAX_TRUNCATION + 1),
            Err(Error::TruncationTooLarge(..))
        ));
    }

    #[test]
    fn evaluator_jet_matches_finite_differences() {
        let sol = solve(3, (1, 1), (1, 1), 8);
        let ev = SeriesEvaluator::new(&sol).unwrap();
        let (r, t) = (9.0, 1.2);
        let jet = ev.jet(r, t);
        let h = 1e-4;
        let u = |r: f64, t: f64| sol.eval_u(r, t);
        assert!((jet.u - u(r, t)).abs() < 1e-14);
        assert!((jet.u_r - (u(r + h, t) - u(r - h, t)) / (2.0 * h)).abs() < 1e-9);
        assert!((jet.u_t - (u(r, t + h) - u(r, t - h)) / (2.0 * h)).abs() < 1e-9);
        assert!((jet.u_rr - (u(r + h, t) - 2.0 * u(r, t) + u(r - h, t)) / (h * h)).abs() < 1e-7);
        assert!((jet.u_tt - (u(r, t + h) - 2.0 * u(r, t) + u(r, t - h)) / (h * h)).abs() < 1e-7);
        let mixed = (u(r + h, t + h) - u(r + h, t - h) - u(r - h, t + h) + u(r - h, t - h))
            / (4.0 * h * h);
        assert!((jet.u_rt - mixed).abs() < 1e-8);
    }
}
