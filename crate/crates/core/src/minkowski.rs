//! Energy-momentum vectors in `R^{1,n}` with the Minkowski form of
//! signature `(+,-,...,-)`: the moment-based vector of an axisymmetric
//! mass aspect, causal classification, the `O(1,n)` action (axis boosts and
//! spatial rotations), and realization of an arbitrary target vector.

use num_traits::{Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polycos::PolyCos;
use crate::rational::{self, Rational};
use crate::series::SeriesSolution;

/// Causal character under `η(p, p) = p_0² - Σ p_i²`, with direction from
/// the sign of `p_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalClass {
    Zero,
    TimelikeFuture,
    TimelikePast,
    Null,
    Spacelike,
}

impl std::fmt::Display for CausalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CausalClass::Zero => "ZERO",
            CausalClass::TimelikeFuture => "TIMELIKE_FUTURE",
            CausalClass::TimelikePast => "TIMELIKE_PAST",
            CausalClass::Null => "NULL",
            CausalClass::Spacelike => "SPACELIKE",
        };
        f.write_str(s)
    }
}

/// `(n+1)`-vector `(p_0, p_1, .., p_n)` over `R^{1,n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EMVector {
    components: Vec<f64>,
}

impl EMVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::InvalidParameter(
                "an energy-momentum vector needs a time and at least one spatial component".into(),
            ));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "energy-momentum components must be finite".into(),
            ));
        }
        Ok(EMVector { components })
    }

    pub fn zero(n: usize) -> Self {
        EMVector {
            components: vec![0.0; n + 1],
        }
    }

    /// Spatial dimension n.
    pub fn spatial_dim(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn time_component(&self) -> f64 {
        self.components[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.components[1..]
    }

    /// `η(p, p) = p_0² - Σ p_i²`.
    pub fn eta_norm(&self) -> f64 {
        let t = self.components[0];
        t * t - self.spatial().iter().map(|x| x * x).sum::<f64>()
    }

    /// Euclidean norm squared of all components (used for tolerance scaling).
    pub fn euclid_norm_sq(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum()
    }
}

impl Serialize for EMVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.components.iter().map(|c| format!("{c}")).collect();
        strings.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EMVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        let components = strings
            .iter()
            .map(|s| s.parse::<f64>().map_err(DeError::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        EMVector::new(components).map_err(DeError::custom)
    }
}

/// Exact sphere moments of an axisymmetric mass aspect `u_0(x)`, `x = cos θ`:
/// `(∫_0^π u_0 sin θ dθ, ∫_0^π u_0 sin θ cos θ dθ)`
/// = `(∫_{-1}^{1} u_0 dx, ∫_{-1}^{1} x u_0 dx)`.
pub fn moments(u0: &PolyCos) -> (Rational, Rational) {
    let mut m0 = Rational::zero();
    let mut m1 = Rational::zero();
    for (i, c) in u0.coeffs().iter().enumerate() {
        // ∫_{-1}^{1} x^m dx = 2/(m+1) for even m, else 0
        if i % 2 == 0 {
            m0 += c * rational::rat(2, i as i64 + 1);
        } else {
            m1 += c * rational::rat(2, i as i64 + 2);
        }
    }
    (m0, m1)
}

/// Moment-based energy-momentum vector
/// `p = λ (I_0, 0, .., 0, I_1)` for the solution's `u_0`.
pub fn em_vector(sol: &SeriesSolution, lambda: f64) -> Result<EMVector> {
    let exact = em_vector_exact(sol)?;
    let mut components: Vec<f64> = exact.iter().map(rational::to_f64).collect();
    for c in components.iter_mut() {
        *c *= lambda;
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    EMVector::new(components)
}

/// The same vector with exact rational entries and λ = 1.
pub fn em_vector_exact(sol: &SeriesSolution) -> Result<Vec<Rational>> {
    let u0 = sol.coefficient(0)?;
    let n = sol.dimension() as usize;
    let (m0, m1) = moments(u0);
    let mut v = vec![Rational::zero(); n + 1];
    v[0] = m0;
    v[n] = m1;
    Ok(v)
}

/// Exact causal classification of a rational vector (tolerance-free).
pub fn classify_exact(components: &[Rational]) -> CausalClass {
    if components.iter().all(Zero::is_zero) {
        return CausalClass::Zero;
    }
    let eta = &components[0] * &components[0]
        - components[1..]
            .iter()
            .fold(Rational::zero(), |acc, c| acc + c * c);
    if eta.is_zero() {
        CausalClass::Null
    } else if eta.is_positive() {
        if components[0].is_positive() {
            CausalClass::TimelikeFuture
        } else {
            CausalClass::TimelikePast
        }
    } else {
        CausalClass::Spacelike
    }
}

/// Tolerance-based classification:
/// ZERO if every |component| <= tol·scale, NULL if |η| <= tol·‖p‖², then by
/// the signs of η and p_0.
pub fn classify(p: &EMVector, tol: f64) -> CausalClass {
    let scale = p.euclid_norm_sq().sqrt();
    if p.components().iter().all(|c| c.abs() <= tol * scale.max(1.0)) || scale == 0.0 {
        return CausalClass::Zero;
    }
    let eta = p.eta_norm();
    if eta.abs() <= tol * p.euclid_norm_sq() {
        return CausalClass::Null;
    }
    if eta > 0.0 {
        if p.time_component() > 0.0 {
            CausalClass::TimelikeFuture
        } else {
            CausalClass::TimelikePast
        }
    } else {
        CausalClass::Spacelike
    }
}

/// Default relative tolerance for NULL/ZERO detection on floating input.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Hyperbolic rotation by `rapidity` in the `(0, axis)` plane, `1 <= axis <= n`.
pub fn boost(p: &EMVector, rapidity: f64, axis: usize) -> Result<EMVector> {
    if axis == 0 || axis > p.spatial_dim() {
        return Err(Error::InvalidParameter(format!(
            "boost axis must be in 1..={}, got {axis}",
            p.spatial_dim()
        )));
    }
    let mut c = p.components().to_vec();
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    let (t, s) = (c[0], c[axis]);
    c[0] = ch * t + sh * s;
    c[axis] = sh * t + ch * s;
    EMVector::new(c)
}

/// Square orthogonal map on the spatial part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialRotation {
    /// row-major n×n matrix
    pub matrix: Vec<Vec<f64>>,
}

impl SpatialRotation {
    pub fn identity(n: usize) -> Self {
        let mut matrix = vec![vec![0.0; n]; n];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        SpatialRotation { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Max deviation of `RᵀR` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.matrix[k][i] * self.matrix[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Proper rotation taking unit vector `from` to unit vector `to`,
    /// acting in their 2-plane and fixing its orthogonal complement.
    pub fn from_to(from: &[f64], to: &[f64]) -> Result<Self> {
        let n = from.len();
        if n != to.len() || n == 0 {
            return Err(Error::InvalidParameter("dimension mismatch".into()));
        }
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm(from) - 1.0).abs() > 1e-9 || (norm(to) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "rotation endpoints must be unit vectors".into(),
            ));
        }
        let c: f64 = from.iter().zip(to).map(|(a, b)| a * b).sum();
        // component of `to` orthogonal to `from`
        let mut w: Vec<f64> = to.iter().zip(from).map(|(t, f)| t - c * f).collect();
        let wn = norm(&w);
        let mut rot = Self::identity(n);
        if wn < 1e-12 {
            if c > 0.0 {
                return Ok(rot); // already aligned
            }
            // антipodal: rotate by π in the plane of `from` and any
            // orthogonal direction
            let mut v = vec![0.0; n];
            let k = (0..n)
                .min_by(|&i, &j| from[i].abs().total_cmp(&from[j].abs()))
                .unwrap();
            v[k] = 1.0;
            let d: f64 = v.iter().zip(from).map(|(a, b)| a * b).sum();
            for (vi, fi) in v.iter_mut().zip(from) {
                *vi -= d * fi;
            }
            let vn = norm(&v);
            for vi in v.iter_mut() {
                *vi /= vn;
            }
            for i in 0..n {
                for j in 0..n {
                    rot.matrix[i][j] += -2.0 * (from[i] * from[j] + v[i] * v[j]);
                }
            }
            return Ok(rot);
        }
        for wi in w.iter_mut() {
            *wi /= wn;
        }
        let s = wn; // sin of the rotation angle, since |to|=1 and w ⟂ from
        for i in 0..n {
            for j in 0..n {
                rot.matrix[i][j] += (c - 1.0) * (from[i] * from[j] + w[i] * w[j])
                    + s * (w[i] * from[j] - from[i] * w[j]);
            }
        }
        Ok(rot)
    }
}

/// Applies an orthogonal spatial map, leaving `p_0` unchanged.
pub fn rotate(p: &EMVector, rotation: &SpatialRotation, tol: f64) -> Result<EMVector> {
    if rotation.dim() != p.spatial_dim() {
        return Err(Error::InvalidParameter(format!(
            "rotation is {}-dimensional but the spatial part is {}-dimensional",
            rotation.dim(),
            p.spatial_dim()
        )));
    }
    let defect = rotation.orthogonality_defect();
    if defect > tol {
        return Err(Error::NotOrthogonal(defect));
    }
    let mut c = vec![p.time_component()];
    c.extend(rotation.apply(p.spatial()));
    EMVector::new(c)
}

/// Parameters and isometry realizing a target energy-momentum vector.
#[derive(Debug, Clone, Serialize)]
pub struct Realization {
    pub beta: f64,
    pub gamma: f64,
    pub rotation: SpatialRotation,
}

/// Inverts the moment formula: finds `(β, γ)` and a spatial rotation `R`
/// such that `R · (λ·2β, 0, .., 0, λ·2γ/3)` reproduces `target`.
pub fn realize_target(target: &EMVector, lambda: f64) -> Result<Realization> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let n = target.spatial_dim();
    let beta = target.time_component() / (2.0 * lambda);
    let spatial = target.spatial();
    let spatial_norm = spatial.iter().map(|x| x * x).sum::<f64>().sqrt();
    let gamma = 3.0 * spatial_norm / (2.0 * lambda);
    let rotation = if spatial_norm == 0.0 {
        SpatialRotation::identity(n)
    } else {
        let mut e_n = vec![0.0; n];
        e_n[n - 1] = 1.0;
        let dir: Vec<f64> = spatial.iter().map(|x| x / spatial_norm).collect();
        SpatialRotation::from_to(&e_n, &dir)?
    };
    Ok(Realization {
        beta,
        gamma,
        rotation,
    })
}

/// The vector a realization reconstructs (for round-trip checks).
pub fn realization_vector(real: &Realization, n: usize, lambda: f64) -> Result<EMVector> {
    let mut base = vec![0.0; n + 1];
    base[0] = lambda * 2.0 * real.beta;
    base[n] = lambda * 2.0 * real.gamma / 3.0;
    let p = EMVector::new(base)?;
    rotate(&p, &real.rotation, 1e-9)
}
