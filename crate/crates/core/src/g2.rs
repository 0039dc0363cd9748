//! The exceptional group G2 as the automorphism group of the octonions,
//! embedded in SO(7), and its 14-dimensional Lie algebra g₂ ⊂ so(7).

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{assemble, norm, AlgebraVector};
use crate::error::{Error, Result};
use crate::expm::{coefficients, coefficients_fallback, reconstruct, Expm, ExpmOptions, Method, RotationMatrix, ZERO_NORM};
use crate::invariants::compute_invariants;
use crate::roots::{degeneracy_classify, RootSet};

/// Length of a g₂ parameter vector.
pub const G2_DIM: usize = 14;

/// Tolerance on `tr Σ⁴ = 1` and on the `ζ` interval for embedded inputs.
pub const G2_TOL: f64 = 1e-10;

/// Octonion triples `(j, k, l)` (1-based) with `f_jkl = +1`.
pub const OCTONION_TRIPLES: [[usize; 3]; 7] =
    [[1, 2, 3], [1, 4, 5], [1, 7, 6], [2, 4, 6], [2, 5, 7], [3, 4, 7], [3, 6, 5]];

/// Totally antisymmetric structure constants `f[j][k][l]`, 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub f: [[[i8; 7]; 7]; 7],
}

impl StructureConstants {
    /// Entry for 1-based indices.
    pub fn get(&self, j: usize, k: usize, l: usize) -> i8 {
        self.f[j - 1][k - 1][l - 1]
    }

    fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        (0..343).filter_map(move |idx| {
            let (j, k, l) = (idx / 49, idx / 7 % 7, idx % 7);
            let v = self.f[j][k][l];
            (v != 0).then_some((j, k, l, v as f64))
        })
    }
}

pub fn structure_constants() -> &'static StructureConstants {
    static TABLE: OnceLock<StructureConstants> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut f = [[[0i8; 7]; 7]; 7];
        for t in OCTONION_TRIPLES {
            let [a, b, c] = t.map(|i| i - 1);
            for (p, sign) in [([a, b, c], 1), ([b, c, a], 1), ([c, a, b], 1), ([b, a, c], -1), ([a, c, b], -1), ([c, b, a], -1)] {
                f[p[0]][p[1]][p[2]] = sign;
            }
        }
        StructureConstants { f }
    })
}

/// The 14 free parameters of a g₂ element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct G2Vector {
    w: [f64; G2_DIM],
}

impl G2Vector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.len() != G2_DIM {
            return Err(Error::LengthMismatch { n: 7, expected: G2_DIM, got: w.len() });
        }
        if let Some(i) = w.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let mut a = [0.0; G2_DIM];
        a.copy_from_slice(&w);
        Ok(Self { w: a })
    }

    pub fn w(&self) -> &[f64; G2_DIM] {
        &self.w
    }
}

impl TryFrom<Vec<f64>> for G2Vector {
    type Error = Error;

    fn try_from(w: Vec<f64>) -> Result<Self> {
        Self::new(w)
    }
}

impl From<G2Vector> for Vec<f64> {
    fn from(g: G2Vector) -> Self {
        g.w.to_vec()
    }
}

/// so(7) coefficients of a g₂ element. Seven components come from half sums
/// and differences of the `w` pairs `(w_i, w_{i+7})`, the remaining seven
/// from the linear constraints.
pub fn embed_g2(g: &G2Vector) -> AlgebraVector {
    let w = |i: usize| g.w[i - 1];
    let mut v = [0.0; 22];
    v[1] = (w(1) + w(8)) / 2.0;
    v[18] = (w(1) - w(8)) / 2.0;
    v[2] = (w(2) + w(9)) / 2.0;
    v[17] = (w(9) - w(2)) / 2.0;
    v[3] = (w(3) + w(10)) / 2.0;
    v[11] = (w(10) - w(3)) / 2.0;
    v[4] = (w(4) + w(11)) / 2.0;
    v[10] = (w(4) - w(11)) / 2.0;
    v[5] = (w(5) + w(12)) / 2.0;
    v[9] = (w(12) - w(5)) / 2.0;
    v[6] = (w(6) + w(13)) / 2.0;
    v[8] = (w(6) - w(13)) / 2.0;
    v[7] = (w(7) + w(14)) / 2.0;
    v[16] = (w(7) - w(14)) / 2.0;

    v[12] = v[5] - v[9];
    v[13] = v[6] + v[8];
    v[14] = v[11] - v[3];
    v[15] = -v[4] - v[10];
    v[19] = v[1] + v[18];
    v[20] = v[2] - v[17];
    v[21] = v[7] + v[16];
    AlgebraVector::new(7, v[1..].to_vec()).expect("embedding of finite parameters")
}

/// Largest `|Σ_m (T_jm f_mkl + T_km f_mlj + T_lm f_mjk)|` over all `(j,k,l)`
/// with `T = J·v`; zero exactly on g₂.
pub fn check_algebra_constraint(av: &AlgebraVector) -> Result<f64> {
    if av.n() != 7 {
        return Err(Error::Domain(format!("the g2 constraint is defined on so(7), got so({})", av.n())));
    }
    Ok(constraint_residuals(assemble(av).as_matrix()).iter().fold(0.0, |m, r| m.max(r.abs())))
}

/// All 343 left-hand sides, flattened in `(j, k, l)` order.
pub fn constraint_residuals(t: &DMatrix<f64>) -> Vec<f64> {
    let f = &structure_constants().f;
    let mut out = Vec::with_capacity(343);
    for j in 0..7 {
        for k in 0..7 {
            for l in 0..7 {
                let mut s = 0.0;
                for m in 0..7 {
                    s += t[(j, m)] * f[m][k][l] as f64
                        + t[(k, m)] * f[m][l][j] as f64
                        + t[(l, m)] * f[m][j][k] as f64;
                }
                out.push(s);
            }
        }
    }
    out
}

/// Largest `|Σ S_jm S_kn S_lo f_mno - f_jkl|`.
pub fn check_automorphism(s: &RotationMatrix) -> Result<f64> {
    if s.n != 7 {
        return Err(Error::Domain(format!("automorphism check needs a 7x7 matrix, got {0}x{0}", s.n)));
    }
    let sc = structure_constants();
    let mut t = [[[0.0f64; 7]; 7]; 7];
    for (m, nn, o, fv) in sc.nonzero() {
        for (j, tj) in t.iter_mut().enumerate() {
            let a = s.matrix[(j, m)] * fv;
            for (k, tjk) in tj.iter_mut().enumerate() {
                let b = a * s.matrix[(k, nn)];
                for (l, x) in tjk.iter_mut().enumerate() {
                    *x += b * s.matrix[(l, o)];
                }
            }
        }
    }
    let worst = t
        .iter()
        .flatten()
        .flatten()
        .zip(sc.f.iter().flatten().flatten())
        .fold(0.0f64, |w, (x, &f)| w.max((x - f as f64).abs()));
    Ok(worst)
}

/// `8 cos(φ₂/2) cos(φ₃/2) cos((φ₂+φ₃)/2) - 1`, the trace of a G2 rotation
/// with torus angles `(φ₂ + φ₃, φ₂, φ₃)`.
pub fn g2_trace(phi2: f64, phi3: f64) -> f64 {
    8.0 * (phi2 / 2.0).cos() * (phi3 / 2.0).cos() * ((phi2 + phi3) / 2.0).cos() - 1.0
}

/// Roots for `ξ = 1`: a one-parameter family in `ζ ∈ [-11/18, -1/2]`.
pub fn g2_roots(zeta: f64) -> Result<RootSet> {
    if !(-11.0 / 18.0 - G2_TOL..=-0.5 + G2_TOL).contains(&zeta) {
        return Err(Error::Consistency(format!("zeta = {zeta} outside [-11/18, -1/2] for a g2 element")));
    }
    let psi = (-10.0 - 18.0 * zeta).clamp(-1.0, 1.0).acos() / 3.0;
    let (sin, cos) = psi.sin_cos();
    let r3 = 3f64.sqrt();
    let ys = vec![(1.0 + cos) / 3.0, (2.0 + r3 * sin - cos) / 6.0, ((2.0 - r3 * sin - cos) / 6.0).max(0.0)];
    Ok(RootSet::from_roots(7, ys, Some(psi), None))
}

pub fn expm_g2(g: &G2Vector) -> Result<RotationMatrix> {
    Ok(expm_g2_with(g, &ExpmOptions::default())?.rotation)
}

/// G2 exponential through the one-parameter root family.
pub fn expm_g2_with(g: &G2Vector, opts: &ExpmOptions) -> Result<Expm> {
    let av = embed_g2(g);
    let v = norm(&av);
    if v < ZERO_NORM {
        return Ok(Expm {
            rotation: RotationMatrix::identity(7),
            method: Method::Closed,
            coefficients: None,
            invariants: None,
            roots: None,
        });
    }
    let sigma = assemble(&av).into_matrix() / v;
    let mut inv = compute_invariants(&av)?;
    let xi = inv.xi();
    if (xi - 1.0).abs() > G2_TOL {
        return Err(Error::Consistency(format!("embedded element has tr S^4 = {xi}, expected 1")));
    }
    let zeta = inv.zeta();
    let rs = degeneracy_classify(g2_roots(zeta)?, opts.delta);
    inv.xi = Some(1.0);
    inv.eta7 = Some(-(1.0 + 2.0 * zeta) / 12.0);
    let (c, method) = if rs.degenerate {
        (coefficients_fallback(7, v, &inv), Method::Fallback)
    } else {
        (coefficients(7, v, &inv, &rs)?, Method::Closed)
    };
    let rotation = RotationMatrix { n: 7, matrix: reconstruct(&c, &sigma) };
    Ok(Expm { rotation, method, coefficients: Some(c), invariants: Some(inv), roots: Some(rs) })
}

/// Numerical rank of the 343 constraint equations as a linear map on so(7).
pub fn constraint_rank(tol: f64) -> usize {
    let mut a = DMatrix::<f64>::zeros(343, 21);
    for col in 0..21 {
        let e = AlgebraVector::unit(7, col).expect("index in range");
        let r = constraint_residuals(assemble(&e).as_matrix());
        a.set_column(col, &nalgebra::DVector::from_vec(r));
    }
    let sv = a.singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > tol * top).count()
}
