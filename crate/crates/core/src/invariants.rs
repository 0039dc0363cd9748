//! Scalar invariants of the normalized algebra element `Σ = J·v / V` and the
//! regions they are confined to.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{assemble, norm, AlgebraVector, SkewMatrix};
use crate::error::{Error, Result};

/// Default additive tolerance for region membership.
pub const REGION_TOL: f64 = 1e-10;

/// Normalized invariants of an so(n) element. Fields that carry no
/// information for a given `n` are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantSet {
    pub n: usize,
    #[serde(rename = "V")]
    pub v_norm: f64,
    /// `tr Σ⁴`, n ≥ 4.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    /// `tr Σ⁶`, n ≥ 7.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    /// `det Σ`, even n ≥ 4.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// `tr Σ⁸`, n = 9.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    /// `(1 - ζ)/6 - ξ/4`, n = 7.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta7: Option<f64>,
    /// `1/24 - (ξ + χ)/8 + ξ²/32 - ζ/6`, n = 9.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta9: Option<f64>,
}

fn require(value: Option<f64>, name: &'static str) -> f64 {
    value.unwrap_or_else(|| panic!("invariant {name} not populated for this dimension"))
}

impl InvariantSet {
    pub fn xi(&self) -> f64 {
        require(self.xi, "xi")
    }

    pub fn zeta(&self) -> f64 {
        require(self.zeta, "zeta")
    }

    pub fn eta(&self) -> f64 {
        require(self.eta, "eta")
    }

    pub fn eta7(&self) -> f64 {
        require(self.eta7, "eta7")
    }

    pub fn eta9(&self) -> f64 {
        require(self.eta9, "eta9")
    }

    /// Number of nonnegative roots `y_j` of the reduced polynomial.
    pub fn root_count(&self) -> usize {
        self.n / 2
    }

    /// Elementary symmetric values `e_1..e_m` of the roots `y_j`, read off
    /// the characteristic polynomial: `P̃(y) = Σ_k (-1)^k e_k y^(m-k)` with
    /// `e_0 = 1` omitted and `e_1 = 1`.
    pub fn reduced_coefficients(&self) -> Vec<f64> {
        match self.n {
            2 | 3 => vec![1.0],
            4 => vec![1.0, self.eta()],
            5 => vec![1.0, 0.5 - self.xi() / 4.0],
            6 => vec![1.0, 0.5 - self.xi() / 4.0, self.eta()],
            7 => vec![1.0, 0.5 - self.xi() / 4.0, self.eta7()],
            8 => vec![1.0, 0.5 - self.xi() / 4.0, cubic_term(self.xi(), self.zeta()), self.eta()],
            9 => vec![1.0, 0.5 - self.xi() / 4.0, cubic_term(self.xi(), self.zeta()), self.eta9()],
            n => unreachable!("dimension {n} validated on construction"),
        }
    }

    /// Coefficients of `det(xI - Σ)`, ascending in `x` (length `n + 1`).
    pub fn characteristic_polynomial(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        out[self.n] = 1.0;
        for (k, e) in self.reduced_coefficients().into_iter().enumerate() {
            out[self.n - 2 * (k + 1)] = e;
        }
        out
    }
}

/// `(1 - ζ)/6 - ξ/4`: the third elementary symmetric value of the roots once
/// the trace normalization is fixed.
pub fn cubic_term(xi: f64, zeta: f64) -> f64 {
    (1.0 - zeta) / 6.0 - xi / 4.0
}

/// Evaluates `P̃(y)` for reduced coefficients `e_1..e_m`.
pub fn reduced_polynomial(e: &[f64], y: f64) -> f64 {
    let mut acc = 1.0;
    let mut sign = -1.0;
    for &ek in e {
        acc = acc * y + sign * ek;
        sign = -sign;
    }
    acc
}

/// Derivative `P̃'(y)`.
pub fn reduced_polynomial_derivative(e: &[f64], y: f64) -> f64 {
    let m = e.len();
    let mut acc = m as f64;
    let mut sign = -1.0;
    for (k, &ek) in e[..m - 1].iter().enumerate() {
        acc = acc * y + sign * ek * (m - 1 - k) as f64;
        sign = -sign;
    }
    acc
}

/// `Σ = J·v / V` together with `V`.
pub fn normalized(av: &AlgebraVector) -> Result<(f64, DMatrix<f64>)> {
    let v = norm(av);
    if v == 0.0 {
        return Err(Error::DegenerateInput);
    }
    Ok((v, assemble(av).into_matrix() / v))
}

pub fn compute_invariants(av: &AlgebraVector) -> Result<InvariantSet> {
    let sum_sq: f64 = av.coefficients().iter().map(|x| x * x).sum();
    if sum_sq == 0.0 {
        return Err(Error::DegenerateInput);
    }
    Ok(invariants_of_matrix(assemble(av).as_matrix(), sum_sq))
}

/// Invariants of `m / ‖v‖` for `m = J·v` with `sum_sq = Σv²`. Traces are
/// divided by powers of `sum_sq` rather than formed from the rounded `Σ`,
/// so exactly representable inputs keep exact invariants.
pub fn invariants_of_matrix(m: &DMatrix<f64>, sum_sq: f64) -> InvariantSet {
    // power-of-two rescaling is exact and keeps the powers in range
    let scale = 2f64.powi(-(0.5 * sum_sq.log2()).round() as i32);
    let v_norm = sum_sq.sqrt();
    invariants_core(v_norm, &(m * scale), sum_sq * scale * scale)
}

/// Invariants of an already normalized antisymmetric `sigma`.
pub fn invariants_of_normalized(v_norm: f64, sigma: &DMatrix<f64>) -> InvariantSet {
    invariants_core(v_norm, sigma, 1.0)
}

fn invariants_core(v_norm: f64, sigma: &DMatrix<f64>, w: f64) -> InvariantSet {
    let n = sigma.nrows();
    let mut set = InvariantSet {
        n,
        v_norm,
        xi: None,
        zeta: None,
        eta: None,
        chi: None,
        eta7: None,
        eta9: None,
    };
    if n < 4 {
        return set;
    }
    let s2 = symmetric_product(sigma, sigma, -1.0);
    let w2 = w * w;
    let xi = s2.norm_squared() / w2;
    set.xi = Some(xi);
    if n.is_multiple_of(2) {
        let pf = pfaffian_unchecked(sigma.clone());
        set.eta = Some(pf * pf / w.powi(n as i32 / 2));
    }
    if n >= 7 {
        let s4 = symmetric_product(&s2, &s2, 1.0);
        // tr(S²·S⁴) as a Frobenius inner product of two symmetric matrices
        let zeta = s2.dot(&s4) / (w2 * w);
        set.zeta = Some(zeta);
        match n {
            7 => set.eta7 = Some(cubic_term(xi, zeta)),
            9 => {
                let chi = s4.norm_squared() / (w2 * w2);
                set.chi = Some(chi);
                set.eta9 = Some(1.0 / 24.0 - (xi + chi) / 8.0 + xi * xi / 32.0 - zeta / 6.0);
            }
            _ => {}
        }
    }
    set
}

/// `a·b` symmetrized; `sign` is `-1` when `b = a` is antisymmetric so that
/// `a·a = -aᵀa`.
fn symmetric_product(a: &DMatrix<f64>, b: &DMatrix<f64>, sign: f64) -> DMatrix<f64> {
    let p = if sign < 0.0 { -(a.transpose() * b) } else { a * b };
    (&p + p.transpose()) * 0.5
}

/// Pfaffian by skew-symmetric Gaussian elimination with row/column pivoting.
pub fn pfaffian(m: &SkewMatrix) -> Result<f64> {
    let n = m.n();
    if n % 2 == 1 {
        return Err(Error::Domain(format!("Pfaffian undefined for odd dimension {n}")));
    }
    Ok(pfaffian_unchecked(m.as_matrix().clone()))
}

fn pfaffian_unchecked(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        for j in (k + 2)..n {
            if a[(k, j)].abs() > a[(k, kp)].abs() {
                kp = j;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        if pivot == 0.0 {
            return 0.0;
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<f64> = ((k + 2)..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<f64> = ((k + 2)..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in ((k + 2)..n).enumerate() {
                for (jj, j) in ((k + 2)..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

pub fn region_so4(eta: f64, tol: f64) -> bool {
    eta >= -tol && eta <= 0.25 + tol
}

pub fn region_so5(xi: f64, tol: f64) -> bool {
    xi >= 1.0 - tol && xi <= 2.0 + tol
}

/// Three nonnegative roots for `y³ - y² + (1/2 - ξ/4) y - q`.
fn cubic_region(xi: f64, q: f64, tol: f64) -> bool {
    let lhs = (3.0 * xi - 2.0).powi(3);
    let rhs = (9.0 * xi + 108.0 * q - 10.0).powi(2);
    q >= -tol && lhs - rhs >= -tol
}

pub fn region_so6(xi: f64, eta: f64, tol: f64) -> bool {
    xi >= 2.0 / 3.0 - tol && xi <= 2.0 + tol && eta <= 1.0 / 27.0 + tol && cubic_region(xi, eta, tol)
}

pub fn region_so7(xi: f64, zeta: f64, tol: f64) -> bool {
    let lhs = (3.0 * xi - 2.0).powi(3);
    let rhs = 4.0 * (4.0 - 9.0 * (xi + zeta)).powi(2);
    cubic_term(xi, zeta) >= -tol
        && lhs - rhs >= -tol
        && zeta >= -2.0 - tol
        && zeta <= -2.0 / 9.0 + tol
}

/// Cubic resolvent `R₃(Θ)` of the quartic with constant term `q`.
pub fn resolvent(xi: f64, zeta: f64, q: f64, theta: f64) -> f64 {
    let c2 = 1.0 - 2.0 * xi;
    let c1 = 5.0 / 3.0 - 64.0 * q - 4.0 * xi + xi * xi - 8.0 * zeta / 3.0;
    let c0 = -(3.0 * xi + 4.0 * zeta - 1.0).powi(2) / 9.0;
    ((theta + c2) * theta + c1) * theta + c0
}

/// Radicand `192q + 8ζ + 8ξ + ξ² - 4` of the resolvent's trigonometric form.
pub fn resolvent_radicand(xi: f64, zeta: f64, q: f64) -> f64 {
    192.0 * q + 8.0 * zeta + 8.0 * xi + xi * xi - 4.0
}

/// Resolvent extrema `Θ±` must be nonnegative and bracket a sign change.
pub fn region_quartic(xi: f64, zeta: f64, q: f64, tol: f64) -> bool {
    let d = resolvent_radicand(xi, zeta, q);
    if d < -tol {
        return false;
    }
    let r = d.max(0.0).sqrt();
    let plus = (2.0 * xi - 1.0 + r) / 3.0;
    let minus = (2.0 * xi - 1.0 - r) / 3.0;
    plus >= -tol
        && minus >= -tol
        && resolvent(xi, zeta, q, plus) * resolvent(xi, zeta, q, minus) <= tol
}

/// Checks every per-dimension inequality within the additive `tol`.
pub fn region_contains(inv: &InvariantSet, tol: f64) -> bool {
    match inv.n {
        2 | 3 => true,
        4 => region_so4(inv.eta(), tol),
        5 => region_so5(inv.xi(), tol),
        6 => region_so6(inv.xi(), inv.eta(), tol),
        7 => region_so7(inv.xi(), inv.zeta(), tol),
        8 => region_quartic(inv.xi(), inv.zeta(), inv.eta(), tol),
        9 => inv.eta9() >= -tol && region_quartic(inv.xi(), inv.zeta(), inv.eta9(), tol),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaEstimate {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

pub const MIN_AREA_SAMPLES: u64 = 10_000;

/// Hit-or-miss estimate of the allowed invariant region's area: the
/// `(ξ, η)` plane for n = 6, the `(ξ, ζ)` plane for n = 7.
pub fn region_area_mc(n: usize, samples: u64, seed: u64) -> Result<AreaEstimate> {
    if samples < MIN_AREA_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_AREA_SAMPLES} samples, got {samples}"
        )));
    }
    let (lo, hi) = match n {
        6 => (0.0, 1.0 / 27.0),
        7 => (-2.0, -2.0 / 9.0),
        _ => return Err(Error::Domain(format!("region area defined for n = 6, 7 only, got {n}"))),
    };
    let (xi_lo, xi_hi) = (2.0 / 3.0, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let xi = rng.gen_range(xi_lo..xi_hi);
        let other = rng.gen_range(lo..hi);
        let inside = if n == 6 { region_so6(xi, other, 0.0) } else { region_so7(xi, other, 0.0) };
        hits += inside as u64;
    }
    let box_area = (xi_hi - xi_lo) * (hi - lo);
    let p = hits as f64 / samples as f64;
    Ok(AreaEstimate {
        n,
        estimate: box_area * p,
        stderr: box_area * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    })
}
