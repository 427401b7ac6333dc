//! Shared numerical machinery: Gauss-Legendre quadrature with an
//! order-doubling convergence check, small dense least-squares fits, and the
//! quintic cutoff used by the interpolation diagnostics.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre polynomial, seeded with the Chebyshev
/// angle estimate; plenty for the orders used here (<= 2^12).
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        weights[i] = w;
        nodes[n - 1 - i] = x.abs();
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// ∫_a^b f dx with a fixed-order Gauss-Legendre rule.
pub fn gl_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * f(mid + hw * x))
        .sum::<f64>()
        * hw
}

/// ∫_a^b f dx, doubling the order until the change between successive
/// rules drops below `rel_tol` relative to the value, or below `abs_tol`
/// outright. The absolute escape matters for integrals that vanish by
/// parity, where no relative criterion can ever be met. Returns the value
/// and the order that achieved it.
pub fn gl_integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    start_order: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_order: usize,
) -> Result<(f64, usize)> {
    let mut order = start_order.max(2);
    let mut prev = gl_integrate(f, a, b, order);
    loop {
        let next_order = order * 2;
        if next_order > max_order {
            return Err(Error::QuadratureNotConverged {
                order,
                rel_change: f64::NAN,
            });
        }
        let next = gl_integrate(f, a, b, next_order);
        let scale = next.abs().max(prev.abs()).max(1e-300);
        let change = (next - prev).abs();
        if change < rel_tol * scale || change <= abs_tol {
            return Ok((next, next_order));
        }
        prev = next;
        order = next_order;
    }
}

/// Least squares fit of `y ≈ Σ_j c_j φ_j(x)` by normal equations with
/// partial pivoting; fine for the handful of basis functions used here.
pub fn linear_least_squares(design: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let rows = design.len();
    if rows == 0 || rows != y.len() {
        return Err(Error::InvalidParameter(
            "least squares needs matching, nonempty rows".into(),
        ));
    }
    let cols = design[0].len();
    if rows < cols {
        return Err(Error::InvalidParameter(format!(
            "least squares underdetermined: {rows} rows, {cols} unknowns"
        )));
    }
    let mut ata = vec![vec![0.0; cols]; cols];
    let mut aty = vec![0.0; cols];
    for (row, &yi) in design.iter().zip(y) {
        for j in 0..cols {
            aty[j] += row[j] * yi;
            for k in 0..cols {
                ata[j][k] += row[j] * row[k];
            }
        }
    }
    solve_dense(&mut ata, &mut aty)?;
    Ok(aty)
}

fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<()> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::InvalidParameter(
                "singular normal equations in least squares".into(),
            ));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in (col + 1)..n {
            s -= a[col][k] * b[k];
        }
        b[col] = s / a[col][col];
    }
    Ok(())
}

/// Slope and intercept of the best line through `(x, y)` pairs.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let design: Vec<Vec<f64>> = x.iter().map(|&xi| vec![1.0, xi]).collect();
    let c = linear_least_squares(&design, y)?;
    Ok((c[1], c[0]))
}

/// Fit `y ≈ a + b/x + c/x²` and return `(a, fit_rms)`; the extrapolation
/// used for flux limits.
pub fn extrapolate_inverse_powers(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let design: Vec<Vec<f64>> = x
        .iter()
        .map(|&xi| vec![1.0, 1.0 / xi, 1.0 / (xi * xi)])
        .collect();
    let c = linear_least_squares(&design, y)?;
    let mut rss = 0.0;
    for (row, &yi) in design.iter().zip(y) {
        let fit: f64 = row.iter().zip(&c).map(|(a, b)| a * b).sum();
        rss += (yi - fit) * (yi - fit);
    }
    Ok((c[0], (rss / y.len() as f64).sqrt()))
}

/// Quintic smoothstep cutoff on `[r1, r2]`: 0 below, 1 above, C² across.
#[derive(Debug, Clone, Copy)]
pub struct Cutoff {
    pub r1: f64,
    pub r2: f64,
}

impl Cutoff {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1.is_finite() && r2.is_finite() && r1 < r2) {
            return Err(Error::InvalidParameter(format!(
                "cutoff annulus needs r1 < r2, got [{r1}, {r2}]"
            )));
        }
        Ok(Cutoff { r1, r2 })
    }

    /// (χ, χ', χ'') at r.
    pub fn jet(&self, r: f64) -> (f64, f64, f64) {
        let w = self.r2 - self.r1;
        let t = (r - self.r1) / w;
        if t <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        if t >= 1.0 {
            return (1.0, 0.0, 0.0);
        }
        let chi = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        let d1 = 30.0 * t * t * (1.0 - t) * (1.0 - t) / w;
        let d2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (w * w);
        (chi, d1, d2)
    }
}
