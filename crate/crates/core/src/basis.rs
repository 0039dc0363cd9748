//! Generator basis of so(n) and the coefficient-vector / matrix correspondence.
//!
//! Generators are enumerated over index pairs `(i, j)` with `i < j` in
//! row-major order, so the strict upper triangle of `J·v` reads `v` left to
//! right, top to bottom. Indices are 0-based throughout this crate: the
//! generator usually written `J_1` is `generator(n, 0)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 9;

/// Number of generators of so(n), `n(n-1)/2`.
pub const fn algebra_dim(n: usize) -> usize {
    n * (n - 1) / 2
}

pub fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// Matrix position `(i, j)`, `i < j`, of generator `a`.
pub fn pair_of_index(n: usize, a: usize) -> Result<(usize, usize)> {
    check_dim(n)?;
    let dim = algebra_dim(n);
    if a >= dim {
        return Err(Error::IndexOutOfRange { n, index: a, dim });
    }
    let mut rest = a;
    for i in 0..n {
        let row_len = n - 1 - i;
        if rest < row_len {
            return Ok((i, i + 1 + rest));
        }
        rest -= row_len;
    }
    unreachable!("index {a} validated against dimension {dim}")
}

/// Inverse of [`pair_of_index`]. Requires `i < j < n`.
pub fn index_of_pair(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    // rows 0..i contribute (n-1) + (n-2) + ... + (n-i) entries
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Coefficients of an so(n) element in the generator basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAlgebraVector")]
pub struct AlgebraVector {
    n: usize,
    v: Vec<f64>,
}

#[derive(Deserialize)]
struct RawAlgebraVector {
    n: usize,
    v: Vec<f64>,
}

impl TryFrom<RawAlgebraVector> for AlgebraVector {
    type Error = Error;

    fn try_from(raw: RawAlgebraVector) -> Result<Self> {
        AlgebraVector::new(raw.n, raw.v)
    }
}

impl AlgebraVector {
    pub fn new(n: usize, v: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        let expected = algebra_dim(n);
        if v.len() != expected {
            return Err(Error::LengthMismatch { n, expected, got: v.len() });
        }
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { n, v })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { n, v: vec![0.0; algebra_dim(n)] })
    }

    /// Unit coefficient vector selecting generator `a`.
    pub fn unit(n: usize, a: usize) -> Result<Self> {
        let mut out = Self::zeros(n)?;
        let dim = out.v.len();
        *out.v.get_mut(a).ok_or(Error::IndexOutOfRange { n, index: a, dim })? = 1.0;
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.v
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.v
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n: self.n, v: self.v.iter().map(|x| x * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|&x| x == 0.0)
    }
}

/// Dense antisymmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix(DMatrix<f64>);

/// Largest tolerated `|M + M^T|` entry when adopting an external matrix.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

impl SkewMatrix {
    /// Adopts `m` after checking it is square, of supported size and
    /// antisymmetric within [`ANTISYMMETRY_TOL`].
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n || check_dim(n).is_err() {
            return Err(Error::Shape { n, rows: m.nrows(), cols: m.ncols() });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("matrix has non-finite entries".into()));
        }
        let asym = max_asymmetry(&m);
        if asym > ANTISYMMETRY_TOL {
            return Err(Error::NotAntisymmetric { max_asymmetry: asym });
        }
        Ok(Self(m))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.0)
    }
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] + m[(j, i)]).abs());
        }
    }
    worst
}

/// Row-major nested representation used in JSON output.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::Shape { n, rows: n, cols: bad.len() });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Generator `J_a`: `+1` at `(i, j)`, `-1` at `(j, i)`.
pub fn generator(n: usize, a: usize) -> Result<SkewMatrix> {
    let (i, j) = pair_of_index(n, a)?;
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    Ok(SkewMatrix(m))
}

/// `J·v = Σ_a v_a J_a`. Both triangles are written explicitly.
pub fn assemble(av: &AlgebraVector) -> SkewMatrix {
    let n = av.n;
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let x = av.v[k];
            m[(i, j)] = x;
            m[(j, i)] = -x;
            k += 1;
        }
    }
    SkewMatrix(m)
}

/// Reads the strict upper triangle row-major.
pub fn decompose(m: &SkewMatrix) -> AlgebraVector {
    let n = m.n();
    let mut v = Vec::with_capacity(algebra_dim(n));
    for i in 0..n {
        for j in (i + 1)..n {
            v.push(m.0[(i, j)]);
        }
    }
    AlgebraVector { n, v }
}

/// Euclidean norm `V = |v|`.
pub fn norm(av: &AlgebraVector) -> f64 {
    av.v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
