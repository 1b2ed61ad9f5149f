//! Seeded random matrix generators for property suites and CLI demos.
//!
//! Every generator takes an explicit RNG so ensembles are reproducible from a seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

pub fn random_complex<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn random_real<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| Complex64::new(normal(rng), 0.0))
}

pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let m = random_complex(n, rng);
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Orthonormalizes the columns of a square matrix, fixing the phase of `R`'s
/// diagonal so the result is Haar-distributed.
fn orthonormalize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..q.nrows() {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    orthonormalize(random_complex(n, rng))
}

/// Random real orthogonal matrix, stored as complex.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    orthonormalize(random_real(n, rng)).map(|z| Complex64::new(z.re, 0.0))
}

/// Random real symmetric involution `O diag(±1) Oᵀ`.
pub fn random_involution<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let o = random_orthogonal(n, rng);
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let p = &o * d * o.transpose();
    // exactly real symmetric after this
    let sym = (&p + p.transpose()) * Complex64::new(0.5, 0.0);
    sym.map(|z| Complex64::new(z.re, 0.0))
}

/// Random complex transform `U diag(s) V†` with singular values log-uniform in
/// `[1, max_cond]`, so its 2-norm condition number is at most `max_cond`.
pub fn random_transform<R: Rng>(n: usize, max_cond: f64, rng: &mut R) -> DMatrix<Complex64> {
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let log_max = max_cond.max(1.0).ln();
    let s = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new((rng.gen::<f64>() * log_max).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    u * s * v.adjoint()
}

/// Block-diagonal matrix of upper Jordan blocks, in the order given.
pub fn jordan_matrix(blocks: &[(Complex64, usize)]) -> DMatrix<Complex64> {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut j = DMatrix::zeros(n, n);
    let mut off = 0;
    for &(lambda, m) in blocks {
        for k in 0..m {
            j[(off + k, off + k)] = lambda;
            if k + 1 < m {
                j[(off + k, off + k + 1)] = Complex64::new(1.0, 0.0);
            }
        }
        off += m;
    }
    j
}

/// `Q⁻¹ J Q`.
pub fn similarity(j: &DMatrix<Complex64>, q: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let q_inv = q.clone().try_inverse().expect("transform must be invertible");
    q_inv * j * q
}

/// A known Jordan structure hidden behind a random transform.
#[derive(Debug, Clone)]
pub struct JordanInstance {
    pub h: ComplexMatrix,
    /// `(eigenvalue, block size)` as constructed, one entry per block.
    pub blocks: Vec<(Complex64, usize)>,
}

/// Random block structure of total size `n` on well-separated lattice eigenvalues
/// with block sizes up to `max_block`, conjugated by a random transform with
/// condition number at most `max_cond`.
pub fn random_jordan_instance<R: Rng>(
    n: usize,
    max_block: usize,
    max_cond: f64,
    rng: &mut R,
) -> JordanInstance {
    let mut lattice: Vec<Complex64> = (-2..=2)
        .flat_map(|a| (-2..=2).map(move |b| Complex64::new(a as f64, b as f64)))
        .collect();
    lattice.shuffle(rng);
    let mut blocks = Vec::new();
    let mut left = n;
    let mut eigenvalues = lattice.into_iter();
    while left > 0 {
        let lambda = eigenvalues.next().expect("lattice has 25 points");
        let mut total = rng.gen_range(1..=left.min(max_block + 1));
        left -= total;
        while total > 0 {
            let m = rng.gen_range(1..=total.min(max_block));
            blocks.push((lambda, m));
            total -= m;
        }
    }
    let q = random_transform(n, max_cond, rng);
    let h = ComplexMatrix::new(similarity(&jordan_matrix(&blocks), &q))
        .expect("finite by construction");
    JordanInstance { h, blocks }
}

/// Real matrix with a random, deliberately defective Jordan structure: real
/// eigenvalues with blocks `J_m(a)` and complex pairs in real Jordan form, the
/// first block always of size two or more, conjugated by a random real orthogonal
/// matrix. Returns the matrix and the constructed `(eigenvalue, size)` blocks.
pub fn random_defective_real<R: Rng>(
    n: usize,
    rng: &mut R,
) -> (DMatrix<Complex64>, Vec<(Complex64, usize)>) {
    assert!(n >= 2, "a defective structure needs n >= 2");
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut blocks = Vec::new();
    let mut used: Vec<(i32, i32)> = Vec::new();
    let mut fresh = |rng: &mut R, complex: bool| loop {
        let a = rng.gen_range(-3..=3);
        let b = if complex { rng.gen_range(1..=2) } else { 0 };
        if !used.contains(&(a, b)) {
            used.push((a, b));
            return (a as f64, b as f64);
        }
    };
    let one = Complex64::new(1.0, 0.0);
    let mut off = 0;
    while off < n {
        let left = n - off;
        let first = off == 0;
        let complex = if first {
            left >= 4 && rng.gen_bool(0.4)
        } else {
            left >= 2 && rng.gen_bool(0.4)
        };
        if complex {
            // pair of size-l blocks occupying 2l rows
            let l = if first { 2 } else { rng.gen_range(1..=(left / 2).min(2)) };
            let (a, b) = fresh(rng, true);
            for k in 0..l {
                let r = off + 2 * k;
                m[(r, r)] = Complex64::new(a, 0.0);
                m[(r + 1, r + 1)] = Complex64::new(a, 0.0);
                m[(r, r + 1)] = Complex64::new(b, 0.0);
                m[(r + 1, r)] = Complex64::new(-b, 0.0);
                if k + 1 < l {
                    m[(r, r + 2)] = one;
                    m[(r + 1, r + 3)] = one;
                }
            }
            blocks.push((Complex64::new(a, b), l));
            blocks.push((Complex64::new(a, -b), l));
            off += 2 * l;
        } else {
            let lo = if first { 2 } else { 1 };
            let size = rng.gen_range(lo..=left.min(3).max(lo));
            let (a, _) = fresh(rng, false);
            for k in 0..size {
                m[(off + k, off + k)] = Complex64::new(a, 0.0);
                if k + 1 < size {
                    m[(off + k, off + k + 1)] = one;
                }
            }
            blocks.push((Complex64::new(a, 0.0), size));
            off += size;
        }
    }
    let o = random_orthogonal(n, rng);
    let h = &o * m * o.transpose();
    (h.map(|z| Complex64::new(z.re, 0.0)), blocks)
}

/// `W M W†` with `W = (I + iP)/√2`; for real `M` and a real symmetric involution
/// `P` the result satisfies `P H̄ P = H` and keeps the Jordan structure of `M`.
pub fn pt_rotate(m: &DMatrix<Complex64>, p: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let w = (DMatrix::<Complex64>::identity(n, n) + p * Complex64::new(0.0, 1.0))
        * Complex64::new(s, 0.0);
    &w * m * w.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::condition_number;

    #[test]
    fn involution_is_real_symmetric_involutive() {
        let mut r = rng(3);
        for n in 1..6 {
            let p = random_involution(n, &mut r);
            assert!(p.iter().all(|z| z.im == 0.0));
            assert!((&p - p.transpose()).norm() == 0.0);
            assert!((&p * &p - DMatrix::identity(n, n)).norm() < 1e-12);
        }
    }

    #[test]
    fn transform_condition_bounded() {
        let mut r = rng(11);
        for _ in 0..20 {
            let q = random_transform(6, 100.0, &mut r);
            assert!(condition_number(&q) <= 100.0 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn defective_real_has_a_large_block() {
        let mut r = rng(5);
        for n in 2..=8 {
            for _ in 0..10 {
                let (h, blocks) = random_defective_real(n, &mut r);
                assert_eq!(blocks.iter().map(|b| b.1).sum::<usize>(), n);
                assert!(blocks.iter().any(|b| b.1 >= 2), "{blocks:?}");
                assert!(h.iter().all(|z| z.im == 0.0));
            }
        }
    }

    #[test]
    fn pt_rotation_is_pt_symmetric() {
        let mut r = rng(8);
        let p = random_involution(4, &mut r);
        let m = random_real(4, &mut r);
        let h = pt_rotate(&m, &p);
        let lhs = &p * h.map(|z| z.conj());
        assert!((lhs - &h * &p).norm() < 1e-12);
    }
}
