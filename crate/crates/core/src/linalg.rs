//! Dense complex matrices, tolerance policy, inertia and the time propagator.

use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;

/// A square, finite, dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds an `n x n` matrix from row-major entries.
    pub fn from_row_slice(n: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_real_rows(n: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_slice(n, &c)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[Complex64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&c)
    }

    /// Dimension `n`.
    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    /// Row-major entries.
    pub fn row_major(&self) -> Vec<Complex64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    /// `-i * self`, the generator `A` of `x' = A x` for a Hamiltonian `H`.
    pub fn generator(&self) -> Self {
        Self(self.0.map(|z| Complex64::new(z.im, -z.re)))
    }

}

impl Deref for ComplexMatrix {
    type Target = DMatrix<Complex64>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl TryFrom<DMatrix<Complex64>> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: DMatrix<Complex64>) -> Result<Self> {
        Self::new(m)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

/// Relative threshold plus absolute floor used for every numerical equality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs_floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs_floor: 1e-14,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs_floor: f64) -> Result<Self> {
        if !(rel > 0.0 && rel.is_finite()) {
            return Err(Error::InvalidTolerance(format!("rel must be positive, got {rel}")));
        }
        if !(abs_floor >= 0.0 && abs_floor.is_finite()) {
            return Err(Error::InvalidTolerance(format!(
                "abs_floor must be nonnegative, got {abs_floor}"
            )));
        }
        Ok(Self { rel, abs_floor })
    }

    pub fn with_rel(rel: f64) -> Result<Self> {
        Self::new(rel, Self::default().abs_floor)
    }

    /// Radius within which computed eigenvalues are treated as one eigenvalue, and
    /// below which an imaginary part counts as zero. Scales as `sqrt(rel)` because a
    /// defective eigenvalue of index `m` splits like `eps^(1/m)`.
    pub fn cluster_radius(&self, norm: f64) -> f64 {
        (self.rel.sqrt() * norm).max(self.abs_floor)
    }

    /// Zero threshold for quantities of magnitude `scale`.
    pub fn zero_band(&self, scale: f64) -> f64 {
        (self.rel * scale).max(self.abs_floor)
    }
}

/// `num / scale`, defined as zero when the numerator vanishes.
pub(crate) fn scaled(num: f64, scale: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / scale.max(f64::MIN_POSITIVE)
    }
}

/// Counts of positive, negative and zero eigenvalues of a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Inertia {
    pub p: usize,
    pub q: usize,
    pub z: usize,
}

impl Inertia {
    pub fn n(&self) -> usize {
        self.p + self.q + self.z
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.p, self.q, self.z)
    }
}

/// `||M - M†||_F / max(1, ||M||_F)`.
pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    let skew = (m.as_matrix() - m.as_matrix().adjoint()).norm();
    scaled(skew, m.frobenius().max(1.0))
}

/// Ascending eigenvalues of the Hermitian part `(M + M†)/2`.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    hermitian_eigen(&((m + m.adjoint()) * Complex64::new(0.5, 0.0))).0
}

const JACOBI_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Returns ascending eigenvalues and the matching orthonormal eigenvectors as
/// columns. Only the Hermitian part of the input is meaningful.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let scale = a.norm();
    for _ in 0..JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= f64::EPSILON * scale * 1e-3 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // phase so that the (p, q) entry becomes real and positive
                let phase = apq / mag;
                for k in 0..n {
                    a[(k, q)] *= phase.conj();
                    v[(k, q)] *= phase.conj();
                }
                for k in 0..n {
                    a[(q, k)] *= phase;
                }
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = kp * c - kq * s;
                    a[(k, q)] = kp * s + kq * c;
                    let (vp, vq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vp * c - vq * s;
                    v[(k, q)] = vp * s + vq * c;
                }
                for k in 0..n {
                    let (pk, qk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = pk * c - qk * s;
                    a[(q, k)] = pk * s + qk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = idx.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
    (values, vectors)
}

/// Singular value decomposition `M = U Σ V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Descending singular values, one per column.
    pub values: Vec<f64>,
    /// Right singular vectors as columns, `cols x cols`, ordered like `values`.
    pub v: DMatrix<Complex64>,
}

impl Svd {
    /// Orthonormal basis of the span of the right singular vectors `start..`.
    pub fn trailing(&self, start: usize) -> DMatrix<Complex64> {
        self.v.columns(start, self.v.ncols() - start).into_owned()
    }

    pub fn leading(&self, count: usize) -> DMatrix<Complex64> {
        self.v.columns(0, count).into_owned()
    }
}

/// One-sided (Hestenes) Jacobi SVD. Singular values are returned for every
/// column (`cols` of them, trailing ones zero when `cols > rows`), with the full
/// orthonormal set of right singular vectors.
pub fn svd(m: &DMatrix<Complex64>) -> Svd {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<Complex64>::identity(cols, cols);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for k in 0..rows {
                    alpha += a[(k, p)].norm_sqr();
                    beta += a[(k, q)].norm_sqr();
                    gamma += a[(k, p)].conj() * a[(k, q)];
                }
                let mag = gamma.norm();
                if mag == 0.0 || mag <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / mag;
                let zeta = (beta - alpha) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let xp = a[(k, p)];
                    let yq = a[(k, q)] * phase.conj();
                    a[(k, p)] = xp * c - yq * s;
                    a[(k, q)] = xp * s + yq * c;
                }
                for k in 0..cols {
                    let xp = v[(k, p)];
                    let yq = v[(k, q)] * phase.conj();
                    v[(k, p)] = xp * c - yq * s;
                    v[(k, q)] = xp * s + yq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut idx: Vec<usize> = (0..cols).collect();
    idx.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    Svd {
        values: idx.iter().map(|&i| norms[i]).collect(),
        v: DMatrix::from_fn(cols, cols, |r, c| v[(r, idx[c])]),
    }
}

pub fn inertia(g: &ComplexMatrix, tol: &Tolerance) -> Result<Inertia> {
    let residual = hermitian_residual(g);
    if residual > tol.rel {
        return Err(Error::NotHermitian { residual });
    }
    let band = tol.zero_band(g.frobenius());
    let mut out = Inertia { p: 0, q: 0, z: 0 };
    for ev in hermitian_eigenvalues(g.as_matrix()) {
        if ev > band {
            out.p += 1;
        } else if ev < -band {
            out.q += 1;
        } else {
            out.z += 1;
        }
    }
    Ok(out)
}

/// Smallest and largest singular values.
pub fn singular_range(m: &DMatrix<Complex64>) -> (f64, f64) {
    let sv = svd(m).values;
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(0.0);
    (min, max)
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let (min, max) = singular_range(m);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `exp(t A) x0`.
pub fn evolve(a: &ComplexMatrix, x0: &CVector, t: f64) -> Result<CVector> {
    if x0.len() != a.n() {
        return Err(Error::Dimension {
            expected: a.n(),
            found: x0.len(),
        });
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    Ok(propagator(a, t) * x0)
}

/// `exp(t A)` by scaling and squaring.
pub fn propagator(a: &ComplexMatrix, t: f64) -> DMatrix<Complex64> {
    (a.as_matrix() * Complex64::new(t, 0.0)).exp()
}
