//! Maximal-torus angles `φ_j = V√y_j` and the trace identities they give.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::basis::{norm, AlgebraVector};
use crate::error::Result;
use crate::expm::ZERO_NORM;
use crate::invariants::compute_invariants;
use crate::roots::{spectral_roots, DEFAULT_DELTA};

/// Rotation angles of the conjugacy class, descending and unreduced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusAngles {
    pub n: usize,
    #[serde(rename = "V")]
    pub v_norm: f64,
    pub phi: Vec<f64>,
}

impl TorusAngles {
    /// Angles reduced into `[0, 2π)`; the order is kept.
    pub fn folded(&self) -> Vec<f64> {
        self.phi.iter().map(|p| p.rem_euclid(TAU)).collect()
    }

    /// `2Σcos φ_j`, plus 1 for odd n.
    pub fn trace(&self) -> f64 {
        let s: f64 = self.phi.iter().map(|p| 2.0 * p.cos()).sum();
        if self.n % 2 == 1 {
            1.0 + s
        } else {
            s
        }
    }
}

pub fn torus_angles(av: &AlgebraVector) -> Result<TorusAngles> {
    let n = av.n();
    let v = norm(av);
    let count = n / 2;
    if v < ZERO_NORM {
        return Ok(TorusAngles { n, v_norm: v, phi: vec![0.0; count] });
    }
    let phi = if n <= 3 {
        vec![v]
    } else {
        let rs = spectral_roots(&compute_invariants(av)?, DEFAULT_DELTA)?;
        rs.roots.iter().map(|y| v * y.sqrt()).collect()
    };
    Ok(TorusAngles { n, v_norm: v, phi })
}

/// Trace of `exp(J·v)` from the torus angles alone.
pub fn trace_closed_form(av: &AlgebraVector) -> Result<f64> {
    Ok(torus_angles(av)?.trace())
}

/// `2Σφ⁴ - (Σφ²)²`, which vanishes exactly when `φ₁ = ±φ₂ ± φ₃` for three
/// angles.
pub fn angle_quartic_form(phi: &[f64]) -> f64 {
    let s2: f64 = phi.iter().map(|p| p * p).sum();
    let s4: f64 = phi.iter().map(|p| p.powi(4)).sum();
    2.0 * s4 - s2 * s2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expm::expm_so;
    use crate::sample::{SampleMode, Sampler};

    #[test]
    fn so3_angle_is_norm() {
        for av in Sampler::new(3, 1, SampleMode::Gaussian).unwrap().take(20) {
            let t = torus_angles(&av).unwrap();
            assert_eq!(t.phi, vec![norm(&av)]);
        }
    }

    #[test]
    fn so4_self_dual_example() {
        let av = AlgebraVector::new(4, vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let t = torus_angles(&av).unwrap();
        assert!(t.phi.iter().all(|p| (p - 1.0).abs() <= 1e-12), "{:?}", t.phi);
    }

    #[test]
    fn zero_vector() {
        for n in 2..=9 {
            let av = AlgebraVector::zeros(n).unwrap();
            let t = torus_angles(&av).unwrap();
            assert!(t.phi.iter().all(|&p| p == 0.0));
            assert_eq!(trace_closed_form(&av).unwrap(), n as f64);
        }
    }

    #[test]
    fn trace_matches_matrix_and_squares_sum_to_norm() {
        for n in 2..=9 {
            for av in Sampler::new(n, 40 + n as u64, SampleMode::Ball(4.0 * std::f64::consts::PI)).unwrap().take(200) {
                let t = torus_angles(&av).unwrap();
                let r = expm_so(&av).unwrap();
                assert!((t.trace() - r.matrix.trace()).abs() <= 1e-9, "n={n}");
                let s2: f64 = t.phi.iter().map(|p| p * p).sum();
                assert!((s2 - t.v_norm * t.v_norm).abs() <= 1e-10 * t.v_norm * t.v_norm);
                assert!(t.phi.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn angle_products() {
        for n in [4, 5, 6, 7] {
            for av in Sampler::new(n, 3, SampleMode::Gaussian).unwrap().take(200) {
                let t = torus_angles(&av).unwrap();
                let inv = compute_invariants(&av).unwrap();
                let v = t.v_norm;
                let prod: f64 = t.phi.iter().product();
                let expected = match n {
                    4 => inv.eta().sqrt() * v * v,
                    5 => (2.0 - inv.xi()).max(0.0).sqrt() * v * v / 2.0,
                    6 => inv.eta().max(0.0).sqrt() * v.powi(3),
                    _ => inv.eta7().max(0.0).sqrt() * v.powi(3),
                };
                assert!((prod - expected).abs() <= 1e-9 * v.powi(t.phi.len() as i32).max(1.0), "n={n}");
            }
        }
    }

    #[test]
    fn folding_keeps_angles_in_range() {
        let t = TorusAngles { n: 4, v_norm: 10.0, phi: vec![8.0, 6.0] };
        let f = t.folded();
        assert!((f[0] - (8.0 - TAU)).abs() < 1e-15 && f[1] == 6.0);
    }
}
