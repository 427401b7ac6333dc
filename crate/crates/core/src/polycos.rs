//! Polynomials in the variable `x = cos θ` with exact rational coefficients,
//! together with the angular differential operators acting on them.
//!
//! For `v = Σ_i v_i x^i` the two operators used by the series recursion are
//! purely algebraic in `x`:
//!
//! * `(cos θ / sin θ) dv/dθ  =  Σ_i (-i) v_i x^i`
//! * `d²v/dθ²               =  Σ_i v_i (-i x^i + i(i-1)(1 - x²) x^{i-2})`
//!
//! so nothing singular happens at the poles `sin θ = 0`.

use num_traits::{Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use num_bigint::BigInt;
use num_integer::Integer;

/// Dense polynomial in `x = cos θ` over exact rationals.
///
/// Invariant: `coeffs` never ends with a zero; the zero polynomial is the
/// empty vector and has degree -1 by convention.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyCos {
    coeffs: Vec<Rational>,
}

impl PolyCos {
    pub fn zero() -> Self {
        PolyCos { coeffs: Vec::new() }
    }

    /// Builds from low-to-high coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyCos { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `beta + gamma x`.
    pub fn linear(beta: Rational, gamma: Rational) -> Self {
        Self::new(vec![beta, gamma])
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &PolyCos) -> PolyCos {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        PolyCos::new(out)
    }

    pub fn sub(&self, other: &PolyCos) -> PolyCos {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        PolyCos::new(out)
    }

    pub fn neg(&self) -> PolyCos {
        PolyCos {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyCos {
        if c.is_zero() {
            return PolyCos::zero();
        }
        PolyCos {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact product.
    ///
    /// The convolution runs on scaled integer coefficients over a common
    /// denominator, deferring all gcd reduction to one pass over the output;
    /// per-term `Ratio` products would reduce after every multiplication.
    pub fn mul(&self, other: &PolyCos) -> PolyCos {
        if self.is_zero() || other.is_zero() {
            return PolyCos::zero();
        }
        let (na, da) = scaled_integer_coeffs(&self.coeffs);
        let (nb, db) = scaled_integer_coeffs(&other.coeffs);
        let mut conv = vec![BigInt::zero(); na.len() + nb.len() - 1];
        for (i, a) in na.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in nb.iter().enumerate() {
                if !b.is_zero() {
                    conv[i + j] += a * b;
                }
            }
        }
        let den = da * db;
        PolyCos::new(
            conv.into_iter()
                .map(|n| Rational::new(n, den.clone()))
                .collect(),
        )
    }

    /// Reference product with plain coefficient arithmetic. Kept as an
    /// independent code path for the order-verification route and as a test
    /// oracle for `mul`.
    pub fn mul_naive(&self, other: &PolyCos) -> PolyCos {
        if self.is_zero() || other.is_zero() {
            return PolyCos::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyCos::new(out)
    }

    /// `(cos θ / sin θ) dv/dθ` in the x-representation: `Σ_i (-i) v_i x^i`.
    pub fn cot_derivative(&self) -> PolyCos {
        PolyCos::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * rational::rat_i64(-(i as i64)))
                .collect(),
        )
    }

    /// `d²v/dθ²` in the x-representation:
    /// `Σ_i v_i (-i x^i + i(i-1)(1 - x²) x^{i-2})`.
    pub fn second_theta_derivative(&self) -> PolyCos {
        let n = self.coeffs.len();
        if n == 0 {
            return PolyCos::zero();
        }
        let mut out = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() || i == 0 {
                continue;
            }
            let i_r = rational::rat_i64(i as i64);
            // -i x^i
            out[i] -= c * &i_r;
            if i >= 2 {
                let ii1 = &i_r * rational::rat_i64(i as i64 - 1);
                // + i(i-1) x^{i-2}
                out[i - 2] += c * &ii1;
                // - i(i-1) x^i
                out[i] -= c * &ii1;
            }
        }
        PolyCos::new(out)
    }

    /// Angular operator `A_n[v] = v'' + (n-2)(cos θ / sin θ) v'` (θ-derivatives).
    pub fn angular_op(&self, n: i64) -> Result<PolyCos> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        let cot = self.cot_derivative().scale(&rational::rat_i64(n - 2));
        Ok(self.second_theta_derivative().add(&cot))
    }

    /// `|v|_1 = Σ_i |v_i|`, exactly.
    pub fn one_norm(&self) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, c| acc + c.abs())
    }

    /// Horner evaluation at `x = cos θ`.
    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_x(theta.cos())
    }

    /// Horner evaluation at a given `x`.
    pub fn eval_x(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rational::to_f64(c))
    }

    /// Exact evaluation at rational `x`.
    pub fn eval_x_exact(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// d/dx, as a polynomial in x.
    pub fn derivative_x(&self) -> PolyCos {
        if self.coeffs.len() <= 1 {
            return PolyCos::zero();
        }
        PolyCos::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rational::rat_i64(i as i64 + 1))
                .collect(),
        )
    }
}

/// Scales rational coefficients to integers over their common denominator
/// (lcm), returning `(numerators, denominator)`.
fn scaled_integer_coeffs(coeffs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::from(1);
    for c in coeffs {
        den = den.lcm(c.denom());
    }
    let nums = coeffs
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    (nums, den)
}

/// Accumulator for sums of polynomial products with deferred normalization:
/// integer numerators over one running denominator, reduced to canonical
/// rationals only when the sum is complete. This is the kernel behind the
/// series convolutions, where reducing after every term would drown the
/// solve in gcd work.
#[derive(Debug, Clone)]
pub struct RawPoly {
    nums: Vec<BigInt>,
    den: BigInt,
}

impl RawPoly {
    pub fn zero() -> Self {
        RawPoly {
            nums: Vec::new(),
            den: BigInt::from(1),
        }
    }

    /// Adds `a * b` to the accumulator.
    pub fn add_product(&mut self, a: &PolyCos, b: &PolyCos) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let (na, da) = scaled_integer_coeffs(&a.coeffs);
        let (nb, db) = scaled_integer_coeffs(&b.coeffs);
        let mut conv = vec![BigInt::zero(); na.len() + nb.len() - 1];
        for (i, ai) in na.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in nb.iter().enumerate() {
                if !bj.is_zero() {
                    conv[i + j] += ai * bj;
                }
            }
        }
        self.merge(conv, da * db);
    }

    fn merge(&mut self, nums: Vec<BigInt>, den: BigInt) {
        if self.nums.is_empty() {
            self.nums = nums;
            self.den = den;
            return;
        }
        let g = self.den.gcd(&den);
        let scale_self = &den / &g;
        let scale_new = &self.den / &g;
        if self.nums.len() < nums.len() {
            self.nums.resize(nums.len(), BigInt::zero());
        }
        for v in self.nums.iter_mut() {
            *v *= &scale_self;
        }
        for (i, v) in nums.into_iter().enumerate() {
            self.nums[i] += v * &scale_new;
        }
        self.den *= scale_self;
    }

    /// Normalizes into a canonical polynomial (one gcd per coefficient).
    pub fn into_poly(self) -> PolyCos {
        let den = self.den;
        PolyCos::new(
            self.nums
                .into_iter()
                .map(|n| Rational::new(n, den.clone()))
                .collect(),
        )
    }
}

impl Serialize for PolyCos {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coeffs.iter().map(rational::format_rational).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyCos {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        let coeffs = strings
            .iter()
            .map(|s| rational::parse_rational(s).map_err(|e| D::Error::custom(e.to_string())))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(PolyCos::new(coeffs))
    }
}
