//! Closed-form exponential `exp(J·v) = Σ_k c_k(V, invariants) Σ^k` with
//! `Σ = J·v / V`.
//!
//! The coefficients are Lagrange-Sylvester interpolants over the distinct
//! eigenvalues `±i√y_j` (and 0 for odd n). Near multiple roots those
//! interpolants divide by tiny root differences, so such inputs are routed to
//! the companion-matrix exponential instead.

use nalgebra::DMatrix;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::basis::{assemble, matrix_rows, norm, AlgebraVector};
use crate::error::{Error, Result};
use crate::invariants::{compute_invariants, region_contains, InvariantSet, REGION_TOL};
use crate::oracle::{coefficients_oracle, expm_taylor_ss, SERIES_TOL};
use crate::roots::{elementary_symmetric, spectral_roots, RootSet, DEFAULT_DELTA};

/// Below this norm the exponential is returned as the identity.
pub const ZERO_NORM: f64 = 1e-14;

/// Environment variable overriding the degeneracy threshold.
pub const DELTA_ENV: &str = "SON_EXPM_DEG_THRESHOLD";

#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

impl RotationMatrix {
    pub fn identity(n: usize) -> Self {
        Self { n, matrix: DMatrix::identity(n, n) }
    }

    /// `‖RᵀR - I‖_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.matrix)
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.clone().determinant()
    }
}

impl Serialize for RotationMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RotationMatrix", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("R", &matrix_rows(&self.matrix))?;
        st.end()
    }
}

pub fn orthogonality_residual(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    (m.transpose() * m - DMatrix::<f64>::identity(n, n)).norm()
}

/// Coefficients of `Σ⁰, …, Σⁿ⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientVector {
    pub n: usize,
    pub c: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(c: Vec<f64>) -> Self {
        Self { n: c.len(), c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed-form coefficients.
    Closed,
    /// Companion route taken automatically for a degenerate spectrum.
    Fallback,
    /// Dense Taylor scaling-and-squaring on `J·v`.
    Taylor,
    /// Companion route requested explicitly.
    Companion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpmOptions {
    pub delta: f64,
}

impl Default for ExpmOptions {
    fn default() -> Self {
        Self { delta: DEFAULT_DELTA }
    }
}

impl ExpmOptions {
    /// Defaults, with `delta` read from `SON_EXPM_DEG_THRESHOLD` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(DELTA_ENV) {
            Ok(s) => {
                let delta: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::Domain(format!("{DELTA_ENV} must be a number, got {s:?}")))?;
                if !(delta.is_finite() && delta >= 0.0) {
                    return Err(Error::Domain(format!("{DELTA_ENV} must be non-negative")));
                }
                Ok(Self { delta })
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

/// Result of an exponential together with what produced it.
#[derive(Debug, Clone, Serialize)]
pub struct Expm {
    pub rotation: RotationMatrix,
    pub method: Method,
    /// `None` for `V ≈ 0` and for the dense Taylor route.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roots: Option<RootSet>,
}

impl Expm {
    pub fn degenerate(&self) -> bool {
        self.roots.as_ref().is_some_and(|r| r.degenerate)
    }
}

pub fn expm_so(av: &AlgebraVector) -> Result<RotationMatrix> {
    Ok(expm_so_with(av, &ExpmOptions::default())?.rotation)
}

/// Closed form, switching to the companion route for degenerate spectra.
pub fn expm_so_with(av: &AlgebraVector, opts: &ExpmOptions) -> Result<Expm> {
    let n = av.n();
    let v = norm(av);
    if v < ZERO_NORM {
        return Ok(identity_result(n, Method::Closed));
    }
    let sigma = assemble(av).into_matrix() / v;
    let inv = compute_invariants(av)?;
    let (coefficients, method, roots) = match spectral_roots(&inv, opts.delta) {
        Ok(rs) if rs.degenerate => (coefficients_fallback(n, v, &inv), Method::Fallback, Some(rs)),
        Ok(rs) => (coefficients(n, v, &inv, &rs)?, Method::Closed, Some(rs)),
        // the invariants come from an actual matrix, so a solver failure
        // inside the region can only be rounding next to a multiple root
        Err(_) if region_contains(&inv, REGION_TOL) => {
            (coefficients_fallback(n, v, &inv), Method::Fallback, None)
        }
        Err(e) => return Err(e),
    };
    let rotation = RotationMatrix { n, matrix: reconstruct(&coefficients, &sigma) };
    Ok(Expm { rotation, method, coefficients: Some(coefficients), invariants: Some(inv), roots })
}

/// Exponential by an explicitly chosen route. `Closed` may still report
/// `Fallback`.
pub fn evaluate(av: &AlgebraVector, method: Method, opts: &ExpmOptions) -> Result<Expm> {
    match method {
        Method::Closed | Method::Fallback => expm_so_with(av, opts),
        Method::Taylor => {
            let m = expm_taylor_ss(assemble(av).as_matrix(), SERIES_TOL);
            Ok(Expm {
                rotation: RotationMatrix { n: av.n(), matrix: m },
                method,
                coefficients: None,
                invariants: None,
                roots: None,
            })
        }
        Method::Companion => {
            let n = av.n();
            let v = norm(av);
            if v < ZERO_NORM {
                return Ok(identity_result(n, method));
            }
            let sigma = assemble(av).into_matrix() / v;
            let inv = compute_invariants(av)?;
            let c = coefficients_fallback(n, v, &inv);
            let rotation = RotationMatrix { n, matrix: reconstruct(&c, &sigma) };
            Ok(Expm { rotation, method, coefficients: Some(c), invariants: Some(inv), roots: None })
        }
    }
}

fn identity_result(n: usize, method: Method) -> Expm {
    let mut c = vec![0.0; n];
    c[0] = 1.0;
    Expm {
        rotation: RotationMatrix::identity(n),
        method,
        coefficients: Some(CoefficientVector::new(c)),
        invariants: None,
        roots: None,
    }
}

/// `Σ_k c_k Σ^k`.
pub fn reconstruct(c: &CoefficientVector, sigma: &DMatrix<f64>) -> DMatrix<f64> {
    let n = sigma.nrows();
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut r = &power * c.c[0];
    for &ck in &c.c[1..] {
        power = &power * sigma;
        r += &power * ck;
    }
    r
}

/// Companion matrix of the characteristic polynomial, acting on coefficient
/// vectors: multiplying `Σ_k c_k Σ^k` by `Σ` maps `c` to `Mₙ c`.
pub fn iteration_matrix(n: usize, inv: &InvariantSet) -> DMatrix<f64> {
    let e = inv.reduced_coefficients();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n - 1 {
        m[(k + 1, k)] = 1.0;
    }
    for (i, ek) in e.iter().enumerate() {
        m[(n - 2 * (i + 1), n - 1)] = -ek;
    }
    m
}

/// Companion-route coefficients used for degenerate spectra.
pub fn coefficients_fallback(n: usize, v_norm: f64, inv: &InvariantSet) -> CoefficientVector {
    coefficients_oracle(n, v_norm, inv)
}

/// Closed-form coefficients from a non-degenerate root set.
pub fn coefficients(n: usize, v_norm: f64, inv: &InvariantSet, rs: &RootSet) -> Result<CoefficientVector> {
    if inv.n != n || rs.n != n {
        return Err(Error::Consistency(format!(
            "dimension mismatch: n = {n}, invariants for {}, roots for {}",
            inv.n, rs.n
        )));
    }
    if rs.degenerate {
        return Err(Error::Consistency("closed-form coefficients need a non-degenerate root set".into()));
    }
    let c = match n {
        2 => vec![v_norm.cos(), v_norm.sin()],
        3 => vec![1.0, v_norm.sin(), 1.0 - v_norm.cos()],
        4 => coefficients_so4(v_norm, rs.roots[1]),
        5 => coefficients_so5(v_norm, rs.roots[0], rs.roots[1]),
        6 | 8 => coefficients_even(n, v_norm, &rs.roots),
        7 | 9 => coefficients_odd(n, v_norm, &rs.roots),
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    Ok(CoefficientVector::new(c))
}

/// Roots `{1 - z, z}`.
fn coefficients_so4(v: f64, z: f64) -> Vec<f64> {
    let (a, b) = (z.sqrt(), (1.0 - z).sqrt());
    let (sa, ca) = (v * a).sin_cos();
    let (sb, cb) = (v * b).sin_cos();
    let d = 1.0 / (1.0 - 2.0 * z);
    vec![
        d * ((1.0 - z) * ca - z * cb),
        d * ((1.0 - z) / a * sa - z / b * sb),
        d * (ca - cb),
        d * (sa / a - sb / b),
    ]
}

/// Roots `{cos²θ, sin²θ}`. With `y1 + y2 = 1` the `Σ²` coefficient
/// `1/y2 - 1/y1 + (y2/y1) cos - (y1/y2) cos` regroups into versines.
fn coefficients_so5(v: f64, y1: f64, y2: f64) -> Vec<f64> {
    let (s, c) = (y2.sqrt(), y1.sqrt());
    let (sin_s, sin_c) = ((v * s).sin(), (v * c).sin());
    let (vs, vc) = (one_minus_cos_over(v, y2), one_minus_cos_over(v, y1));
    let d = 1.0 / (y1 - y2);
    vec![
        1.0,
        d * (y1 / s * sin_s - y2 / c * sin_c),
        d * (y1 * vs - y2 * vc),
        d * (sin_s / s - sin_c / c),
        d * (vs - vc),
    ]
}

/// `Π_{k≠j} (y_j - y_k)` and the elementary symmetric values of the other
/// roots, with `e'_0 = 1` first.
fn lagrange_parts(ys: &[f64], j: usize) -> (f64, Vec<f64>) {
    let others: Vec<f64> = ys.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &y)| y).collect();
    let denom = others.iter().map(|yk| ys[j] - yk).product();
    let mut e = vec![1.0];
    e.extend(elementary_symmetric(&others));
    (denom, e)
}

/// n = 6, 8.
fn coefficients_even(n: usize, v: f64, ys: &[f64]) -> Vec<f64> {
    let m = ys.len();
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let mut c = vec![0.0; n];
    for (j, &y) in ys.iter().enumerate() {
        let (denom, e) = lagrange_parts(ys, j);
        let w = sign / denom;
        let r = y.sqrt();
        let (sin, cos) = (v * r).sin_cos();
        for i in 0..m {
            let b = w * e[m - 1 - i];
            c[2 * i] += b * cos;
            c[2 * i + 1] += b * sin / r;
        }
    }
    c
}

/// `(1 - cos(V√y)) / y` without the cancellation at small `V√y`.
fn one_minus_cos_over(v: f64, y: f64) -> f64 {
    let h = (0.5 * v * y.sqrt()).sin();
    2.0 * h * h / y
}

/// n = 7, 9. The zero eigenvalue is an extra interpolation node; folding its
/// block into the root terms leaves `sinc` on the odd powers and
/// `(1 - cos)/y` on the even ones, so nothing divides by a small root.
fn coefficients_odd(n: usize, v: f64, ys: &[f64]) -> Vec<f64> {
    let m = ys.len();
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let mut c = vec![0.0; n];
    c[0] = 1.0;
    for (j, &y) in ys.iter().enumerate() {
        let (denom, e) = lagrange_parts(ys, j);
        let w = sign / denom;
        let r = y.sqrt();
        let sinc = (v * r).sin() / r;
        let versine = one_minus_cos_over(v, y);
        for i in 0..m {
            let b = w * e[m - 1 - i];
            c[2 * i + 1] += b * sinc;
            c[2 * i + 2] += b * versine;
        }
    }
    c
}
