//! Roots `y_j ≥ 0` of the reduced characteristic polynomial in `y = -x²`.
//!
//! Each family has its own closed form: a quadratic for n = 4, 5, the
//! trigonometric (trisection) solution of the cubic for n = 6, 7 and Euler's
//! resolvent-cubic construction of the quartic for n = 8, 9. Roots are
//! finished with a few guarded Newton steps on the reduced polynomial, which
//! restores the digits the arccos formulas lose next to multiple roots.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{
    cubic_term, reduced_polynomial, reduced_polynomial_derivative, resolvent_radicand,
    InvariantSet, REGION_TOL,
};

/// Degeneracy threshold on root gaps, the smallest root and root separation.
pub const DEFAULT_DELTA: f64 = 1e-5;

/// Base clamping window for arccos arguments.
pub const ACOS_WINDOW: f64 = 1e-9;

/// Roots in `[-NEG_ROOT_TOL, 0)` are set to zero.
pub const NEG_ROOT_TOL: f64 = 1e-10;

/// Largest accepted `|P̃(y_j)|` for the quartic sign assignment.
pub const QUARTIC_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub n: usize,
    /// Descending.
    pub roots: Vec<f64>,
    /// Trisection angle (n = 6..9).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
    /// Half-angle parameter with `ξ = 1 + cos²2θ` (n = 5).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub degenerate: bool,
    /// Smallest pairwise difference; `None` for a single root.
    pub min_gap: Option<f64>,
    pub min_root: f64,
    /// `min_j Π_{k≠j} |y_j - y_k|`, counting the zero eigenvalue of odd n as
    /// an extra node. This is the denominator the closed-form coefficients
    /// divide by.
    pub min_separation: f64,
}

impl RootSet {
    /// Sorts `roots` descending and classifies with the default threshold.
    pub fn from_roots(n: usize, mut roots: Vec<f64>, psi: Option<f64>, theta: Option<f64>) -> Self {
        roots.sort_by(|a, b| b.total_cmp(a));
        let rs = RootSet {
            n,
            roots,
            psi,
            theta,
            degenerate: false,
            min_gap: None,
            min_root: 0.0,
            min_separation: 0.0,
        };
        degeneracy_classify(rs, DEFAULT_DELTA)
    }

    /// Elementary symmetric values `e_1..e_m` of the roots.
    pub fn elementary_symmetric(&self) -> Vec<f64> {
        elementary_symmetric(&self.roots)
    }
}

/// `e_1..e_m` of `ys`.
pub fn elementary_symmetric(ys: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; ys.len() + 1];
    e[0] = 1.0;
    for (count, &y) in ys.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            e[k] += e[k - 1] * y;
        }
    }
    e.remove(0);
    e
}

/// Fills `min_gap`, `min_root`, `min_separation` and the `degenerate` flag.
pub fn degeneracy_classify(mut rs: RootSet, delta: f64) -> RootSet {
    let ys = &rs.roots;
    let mut min_gap: Option<f64> = None;
    for (i, a) in ys.iter().enumerate() {
        for b in &ys[i + 1..] {
            let g = (a - b).abs();
            min_gap = Some(min_gap.map_or(g, |m: f64| m.min(g)));
        }
    }
    let min_root = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let odd = rs.n % 2 == 1;
    let mut min_sep = f64::INFINITY;
    for (j, &yj) in ys.iter().enumerate() {
        let mut p: f64 = ys
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &yk)| (yj - yk).abs())
            .product();
        if odd {
            p *= yj.abs();
        }
        min_sep = min_sep.min(p);
    }
    if odd {
        min_sep = min_sep.min(ys.iter().map(|y| y.abs()).product());
    }
    rs.min_gap = min_gap;
    rs.min_root = min_root;
    rs.min_separation = min_sep;
    rs.degenerate = min_gap.is_some_and(|g| g < delta) || min_root < delta || min_sep < delta;
    rs
}

/// Newton refinement that only accepts steps lowering `|P̃|`.
fn polish(e: &[f64], mut y: f64) -> f64 {
    let mut p = reduced_polynomial(e, y);
    for _ in 0..64 {
        if p == 0.0 {
            break;
        }
        let dp = reduced_polynomial_derivative(e, y);
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let next = y - p / dp;
        let pn = reduced_polynomial(e, next);
        if pn.abs().partial_cmp(&p.abs()) != Some(std::cmp::Ordering::Less) {
            break;
        }
        y = next;
        p = pn;
    }
    y
}

fn clamp_roots(ys: &mut [f64]) -> Result<()> {
    for y in ys.iter_mut() {
        if *y < -NEG_ROOT_TOL {
            return Err(Error::InvariantViolation { name: "root", value: *y });
        }
        *y = y.max(0.0);
    }
    Ok(())
}

/// `num / denom` checked against `[-1, 1]`. The window grows with the
/// rounding error the quotient can carry when `denom` is tiny (close to a
/// multiple root), so genuine inputs are clamped rather than rejected.
fn acos_argument(num: f64, num_scale: f64, denom: f64, denom_rel_err: f64) -> Result<f64> {
    if denom.is_nan() || denom <= 0.0 {
        return Ok(1.0);
    }
    let arg = num / denom;
    let window = ACOS_WINDOW + 8.0 * f64::EPSILON * (num_scale / denom + arg.abs() * denom_rel_err);
    if !arg.is_finite() || arg.abs() > 1.0 + window {
        return Err(Error::InvariantViolation { name: "arccos argument", value: arg });
    }
    Ok(arg.clamp(-1.0, 1.0))
}

pub fn roots_trivial(n: usize) -> RootSet {
    RootSet::from_roots(n, vec![1.0], None, None)
}

/// n = 4: roots `{1 - z, z}` with `η = z(1 - z)`, `0 ≤ z ≤ 1/2`.
pub fn roots_so4(eta: f64) -> Result<RootSet> {
    if !(-REGION_TOL..=0.25 + REGION_TOL).contains(&eta) {
        return Err(Error::InvariantViolation { name: "eta", value: eta });
    }
    let disc = (1.0 - 4.0 * eta).max(0.0).sqrt();
    // (1 - √(1-4η))/2 without the cancellation at small η
    let z = (2.0 * eta / (1.0 + disc)).clamp(0.0, 0.5);
    Ok(RootSet::from_roots(4, vec![1.0 - z, z], None, None))
}

/// n = 5: roots `{cos²θ, sin²θ}` with `θ = ½ arccos √(ξ - 1)`.
pub fn roots_so5(xi: f64) -> Result<RootSet> {
    if !(1.0 - REGION_TOL..=2.0 + REGION_TOL).contains(&xi) {
        return Err(Error::InvariantViolation { name: "xi", value: xi });
    }
    let c = (xi - 1.0).clamp(0.0, 1.0).sqrt();
    let theta = 0.5 * c.acos();
    Ok(RootSet::from_roots(5, vec![0.5 * (1.0 + c), 0.5 * (1.0 - c)], None, Some(theta)))
}

/// n = 6 (`q = η`) and n = 7 (`q = η₇`): three roots of
/// `y³ - y² + (1/2 - ξ/4) y - q` by trisection.
pub fn roots_cubic_trig(n: usize, xi: f64, q: f64) -> Result<RootSet> {
    if q < -REGION_TOL {
        return Err(Error::InvariantViolation { name: if n == 7 { "eta7" } else { "eta" }, value: q });
    }
    let s2 = 3.0 * xi - 2.0;
    if s2 < -REGION_TOL {
        return Err(Error::InvariantViolation { name: "3xi-2", value: s2 });
    }
    let s2 = s2.max(0.0);
    let num = 9.0 * xi + 108.0 * q - 10.0;
    let scale = 9.0 * xi.abs() + 108.0 * q.abs() + 10.0;
    let rel = if s2 > 0.0 { 1.5 * (3.0 * xi.abs() + 2.0) / s2 } else { 0.0 };
    let arg = acos_argument(num, scale, s2 * s2.sqrt(), rel)?;
    let psi = arg.acos() / 3.0;
    let s = s2.sqrt();
    let (sin, cos) = psi.sin_cos();
    let r3 = 3f64.sqrt();
    let e = [1.0, 0.5 - xi / 4.0, q];
    let mut ys = vec![
        (1.0 + s * cos) / 3.0,
        (2.0 + s * (r3 * sin - cos)) / 6.0,
        (2.0 - s * (r3 * sin + cos)) / 6.0,
    ];
    ys.iter_mut().for_each(|y| *y = polish(&e, *y));
    clamp_roots(&mut ys)?;
    Ok(RootSet::from_roots(n, ys, Some(psi), None))
}

/// n = 8 (`q = η`) and n = 9 (`q = η₉`): four roots of
/// `y⁴ - y³ + (1/2 - ξ/4) y² + ((ζ-1)/6 + ξ/4) y + q` from the three roots
/// `Θ` of the resolvent cubic.
pub fn roots_quartic_resolvent(n: usize, xi: f64, zeta: f64, q: f64) -> Result<RootSet> {
    let d = resolvent_radicand(xi, zeta, q);
    if d < -REGION_TOL {
        return Err(Error::InvariantViolation { name: "resolvent radicand", value: d });
    }
    let d = d.max(0.0);
    let num = 8.0 * (1.0 - 36.0 * q - 3.0 * zeta + 3.0 * zeta * zeta) - xi.powi(3)
        + 42.0 * xi * xi
        + 12.0 * xi * (5.0 * zeta + 48.0 * q - 3.0);
    let scale = 8.0 * (1.0 + 36.0 * q.abs() + 3.0 * zeta.abs() + 3.0 * zeta * zeta)
        + xi.abs().powi(3)
        + 42.0 * xi * xi
        + 12.0 * xi.abs() * (5.0 * zeta.abs() + 48.0 * q.abs() + 3.0);
    let d_scale = 192.0 * q.abs() + 8.0 * zeta.abs() + 8.0 * xi.abs() + xi * xi + 4.0;
    let rel = if d > 0.0 { 1.5 * d_scale / d } else { 0.0 };
    let arg = acos_argument(num, scale, d * d.sqrt(), rel)?;
    let psi = arg.acos() / 3.0;
    let r = d.sqrt();
    let thetas: [f64; 3] = [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0]
        .map(|shift| ((2.0 * xi - 1.0 + 2.0 * r * (psi + shift).cos()) / 3.0).max(0.0));
    let roots_of_theta = thetas.map(f64::sqrt);

    let target = 1.0 / 3.0 - xi - 4.0 * zeta / 3.0;
    let smallest = (0..3)
        .min_by(|&a, &b| roots_of_theta[a].total_cmp(&roots_of_theta[b]))
        .unwrap_or(0);
    // trial order: no negation, the smallest root negated, then each other
    let mut trials: Vec<Option<usize>> = vec![None, Some(smallest)];
    trials.extend((0..3).filter(|&k| k != smallest).map(Some));
    if target < 0.0 {
        trials.swap(0, 1);
    }

    let e = [1.0, 0.5 - xi / 4.0, cubic_term(xi, zeta), q];
    let mut last_residuals = Vec::new();
    for negate in trials {
        let mut t = roots_of_theta;
        if let Some(k) = negate {
            t[k] = -t[k];
        }
        if (t[0] * t[1] * t[2] - target).abs() > 1e-6 * target.abs().max(1.0) {
            continue;
        }
        let mut ys = vec![
            0.25 * (1.0 + t[0] + (t[1] + t[2])),
            0.25 * (1.0 + t[0] - (t[1] + t[2])),
            0.25 * (1.0 - t[0] + (t[1] - t[2])),
            0.25 * (1.0 - t[0] - (t[1] - t[2])),
        ];
        ys.iter_mut().for_each(|y| *y = polish(&e, *y));
        let residuals: Vec<f64> = ys.iter().map(|&y| reduced_polynomial(&e, y).abs()).collect();
        let valid = ys.iter().all(|&y| y >= -NEG_ROOT_TOL)
            && residuals.iter().all(|&r| r <= QUARTIC_RESIDUAL_TOL);
        if valid {
            clamp_roots(&mut ys)?;
            return Ok(RootSet::from_roots(n, ys, Some(psi), None));
        }
        last_residuals = residuals;
    }
    Err(Error::NumericalFailure { residuals: last_residuals })
}

/// Roots for the dimension and invariants in `inv`, classified with `delta`.
pub fn spectral_roots(inv: &InvariantSet, delta: f64) -> Result<RootSet> {
    let rs = match inv.n {
        2 | 3 => roots_trivial(inv.n),
        4 => roots_so4(inv.eta())?,
        5 => roots_so5(inv.xi())?,
        6 => roots_cubic_trig(6, inv.xi(), inv.eta())?,
        7 => roots_cubic_trig(7, inv.xi(), inv.eta7())?,
        8 => roots_quartic_resolvent(8, inv.xi(), inv.zeta(), inv.eta())?,
        9 => roots_quartic_resolvent(9, inv.xi(), inv.zeta(), inv.eta9())?,
        n => return Err(Error::UnsupportedDimension(n)),
    };
    Ok(degeneracy_classify(rs, delta))
}
