//! Reference exponentials that do not go through the closed-form formulas:
//! a dense Taylor scaling-and-squaring on the n×n matrix, and the
//! companion (iteration) matrix route for the power-basis coefficients.

use nalgebra::DMatrix;

use crate::expm::{iteration_matrix, CoefficientVector};
use crate::invariants::InvariantSet;

/// Default absolute cutoff on the 1-norm of the next series term.
pub const SERIES_TOL: f64 = 1e-18;

const MAX_TERMS: usize = 200;

pub fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(m)`: scale until `‖m‖₁ / 2^s ≤ 1/2`, sum the Taylor series until the
/// next term's 1-norm drops below `tol`, then square `s` times.
pub fn expm_taylor_ss(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let mut squarings = 0u32;
    let mut scaled_norm = norm1(m);
    while scaled_norm > 0.5 {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    let a = m / 2f64.powi(squarings as i32);
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..MAX_TERMS {
        term = &term * &a / k as f64;
        sum += &term;
        if norm1(&term) < tol {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// First column of `exp(V·Mₙ)`: the coefficients of `Σ⁰..Σⁿ⁻¹`.
pub fn coefficients_oracle(n: usize, v_norm: f64, inv: &InvariantSet) -> CoefficientVector {
    let m = iteration_matrix(n, inv) * v_norm;
    let e = expm_taylor_ss(&m, SERIES_TOL);
    CoefficientVector::new(e.column(0).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{assemble, norm};
    use crate::expm::{orthogonality_residual, reconstruct};
    use crate::invariants::{compute_invariants, normalized};
    use crate::sample::{SampleMode, Sampler};
    use std::f64::consts::PI;

    #[test]
    fn zero_matrix_gives_identity() {
        let e = expm_taylor_ss(&DMatrix::zeros(4, 4), SERIES_TOL);
        assert_eq!(e, DMatrix::identity(4, 4));
    }

    #[test]
    fn planar_rotation_by_pi() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, PI, -PI, 0.0]);
        let e = expm_taylor_ss(&m, SERIES_TOL);
        assert!((e + DMatrix::identity(2, 2)).abs().max() <= 1e-12);
    }

    #[test]
    fn nilpotent_series_terminates() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 0.3, -0.2, 0.0, 0.0, 0.1, 0.0, 0.0, 0.0]);
        let expected = DMatrix::identity(3, 3) + &m + &m * &m * 0.5;
        assert!((expm_taylor_ss(&m, SERIES_TOL) - expected).abs().max() <= 1e-15);
    }

    #[test]
    fn inverse_pair() {
        for n in 2..=9 {
            for av in Sampler::new(n, 3, SampleMode::Ball(4.0 * PI)).unwrap().take(50) {
                let m = assemble(&av).into_matrix();
                let p = expm_taylor_ss(&m, SERIES_TOL) * expm_taylor_ss(&(-&m), SERIES_TOL);
                assert!((p - DMatrix::identity(n, n)).norm() <= 1e-11);
            }
        }
    }

    #[test]
    fn skew_input_gives_orthogonal_output() {
        for av in Sampler::new(9, 4, SampleMode::Ball(4.0 * PI)).unwrap().take(50) {
            let e = expm_taylor_ss(&assemble(&av).into_matrix(), SERIES_TOL);
            assert!(orthogonality_residual(&e) <= 1e-12);
        }
    }

    #[test]
    fn companion_coefficients_for_so2_so3() {
        for &v in &[0.1, 1.0, 2.5, 7.0] {
            let inv2 = compute_invariants(&crate::basis::AlgebraVector::new(2, vec![v]).unwrap()).unwrap();
            let c = coefficients_oracle(2, v, &inv2);
            assert!((c.c[0] - v.cos()).abs() <= 1e-12 && (c.c[1] - v.sin()).abs() <= 1e-12);
            let inv3 = compute_invariants(&crate::basis::AlgebraVector::new(3, vec![v, 0.0, 0.0]).unwrap()).unwrap();
            let c = coefficients_oracle(3, v, &inv3);
            let expected = [1.0, v.sin(), 1.0 - v.cos()];
            for (a, b) in c.c.iter().zip(expected) {
                assert!((a - b).abs() <= 1e-12, "{:?}", c.c);
            }
        }
    }

    #[test]
    fn oracles_agree() {
        for n in 2..=9 {
            for av in Sampler::new(n, 21, SampleMode::Ball(4.0 * PI)).unwrap().take(100) {
                let (v, sigma) = normalized(&av).unwrap();
                let inv = compute_invariants(&av).unwrap();
                let c = coefficients_oracle(n, v, &inv);
                let r = reconstruct(&c, &sigma);
                assert!(orthogonality_residual(&r) <= 1e-10);
                let t = expm_taylor_ss(&assemble(&av).into_matrix(), SERIES_TOL);
                assert!((r - t).norm() <= 1e-10, "n={n} V={}", norm(&av));
            }
        }
    }
}
