//! Closed-form two-layer Kelvin–Helmholtz Hamiltonian, its metric and eigensystem.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krein::ParameterFamily;
use crate::linalg::{ComplexMatrix, Tolerance};

/// Wavenumber, layer velocities, layer densities and gravity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KHParameters {
    pub k: f64,
    pub u10: f64,
    pub u20: f64,
    pub rho10: f64,
    pub rho20: f64,
    pub g: f64,
}

impl KHParameters {
    pub fn new(k: f64, u10: f64, u20: f64, rho10: f64, rho20: f64, g: f64) -> Result<Self> {
        let p = Self {
            k,
            u10,
            u20,
            rho10,
            rho20,
            g,
        };
        p.validate()?;
        Ok(p)
    }

    /// `k = 1, g = 3, ρ10 = 2, ρ20 = 3, u10 = 1` at the given `u20`.
    pub fn standard(u20: f64) -> Self {
        Self {
            k: 1.0,
            u10: 1.0,
            u20,
            rho10: 2.0,
            rho20: 3.0,
            g: 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("k", self.k),
            ("u10", self.u10),
            ("u20", self.u20),
            ("rho10", self.rho10),
            ("rho20", self.rho20),
            ("g", self.g),
        ];
        if let Some((name, v)) = named.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
        }
        if self.k == 0.0 {
            return Err(Error::InvalidParameter("k must be nonzero".into()));
        }
        if !(self.rho10 > 0.0 && self.rho20 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "densities must be positive, got rho10 = {}, rho20 = {}",
                self.rho10, self.rho20
            )));
        }
        Ok(())
    }

    fn total_density(&self) -> f64 {
        self.rho10 + self.rho20
    }

    /// The lower-right metric entry `τ`.
    pub fn tau(&self) -> f64 {
        let du = self.u10 - self.u20;
        (self.k.abs() * du * du * self.rho20 - self.g * (self.rho20 - self.rho10)) / self.total_density()
    }

    /// The discriminant `Δ`.
    pub fn delta(&self) -> f64 {
        let du = self.u10 - self.u20;
        -self.k.abs() * self.g * (self.rho10 * self.rho10 - self.rho20 * self.rho20)
            - self.k * self.k * self.rho10 * self.rho20 * du * du
    }

    fn delta_scale(&self) -> f64 {
        let du = self.u10 - self.u20;
        (self.k.abs() * self.g * (self.rho10 * self.rho10 - self.rho20 * self.rho20)).abs()
            + self.k * self.k * self.rho10 * self.rho20 * du * du
    }

    fn tau_scale(&self) -> f64 {
        let du = self.u10 - self.u20;
        (self.k.abs() * du * du * self.rho20 + (self.g * (self.rho20 - self.rho10)).abs())
            / self.total_density()
    }
}

pub fn kh_hamiltonian(p: &KHParameters) -> Result<ComplexMatrix> {
    p.validate()?;
    let s = p.total_density();
    let h11 = -p.k * (-p.u10 * p.rho10 - 2.0 * p.u20 * p.rho20 + p.u10 * p.rho20) / s;
    ComplexMatrix::from_row_slice(
        2,
        &[
            Complex64::new(h11, 0.0),
            Complex64::new(0.0, -p.tau()),
            Complex64::new(0.0, -p.k.abs()),
            Complex64::new(p.k * p.u10, 0.0),
        ],
    )
}

#[derive(Debug, Clone)]
pub struct KHMetric {
    /// `diag(-|k|, τ)`.
    pub matrix: ComplexMatrix,
    pub tau: f64,
    /// `τ` vanishes within tolerance, so the matrix is not a valid metric.
    pub singular: bool,
}

pub fn kh_metric(p: &KHParameters) -> Result<KHMetric> {
    p.validate()?;
    let tau = p.tau();
    let singular = tau.abs() <= Tolerance::default().zero_band(p.tau_scale());
    Ok(KHMetric {
        matrix: ComplexMatrix::from_real_diagonal(&[-p.k.abs(), tau])?,
        tau,
        singular,
    })
}

/// Eigenvalues and eigenvectors in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct KHEigensystem {
    pub delta: f64,
    pub a1: Complex64,
    pub a2: Complex64,
    /// Eigenvectors with second component 1, not normalized.
    pub phi1: [Complex64; 2],
    pub phi2: [Complex64; 2],
    pub tau: f64,
    /// `Δ` vanished within tolerance: the two eigenpairs coincide and `H` is defective.
    pub exceptional: bool,
    /// Largest of the scaled trace, determinant and eigenvector residuals.
    pub residual: f64,
}

pub fn kh_eigensystem(p: &KHParameters) -> Result<KHEigensystem> {
    p.validate()?;
    let tol = Tolerance::default();
    let s = p.total_density();
    let mut delta = p.delta();
    let exceptional = delta.abs() <= tol.zero_band(p.delta_scale());
    if exceptional {
        delta = 0.0;
    }
    let root = Complex64::new(delta, 0.0).sqrt();
    let mean = Complex64::new(p.k * (p.rho10 * p.u10 + p.rho20 * p.u20), 0.0);
    let a1 = (mean - root) / s;
    let a2 = (mean + root) / s;
    // Row two of H gives the first component i(a - k u10)/|k|.
    let i = Complex64::new(0.0, 1.0);
    let shift = Complex64::new(0.0, -p.k * p.rho20 * (p.u10 - p.u20));
    let denom = p.k.abs() * s;
    let one = Complex64::new(1.0, 0.0);
    let phi1 = [(shift - i * root) / denom, one];
    let phi2 = [(shift + i * root) / denom, one];

    let h = kh_hamiltonian(p)?;
    let norm = h.frobenius();
    let trace = h[(0, 0)] + h[(1, 1)];
    let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
    let mut residual = ((a1 + a2) - trace).norm() / norm.max(f64::MIN_POSITIVE);
    residual = residual.max((a1 * a2 - det).norm() / (norm * norm).max(f64::MIN_POSITIVE));
    for (a, phi) in [(a1, &phi1), (a2, &phi2)] {
        let r0 = h[(0, 0)] * phi[0] + h[(0, 1)] * phi[1] - a * phi[0];
        let r1 = h[(1, 0)] * phi[0] + h[(1, 1)] * phi[1] - a * phi[1];
        let phi_norm = (phi[0].norm_sqr() + phi[1].norm_sqr()).sqrt();
        residual = residual.max((r0.norm_sqr() + r1.norm_sqr()).sqrt() / (norm * phi_norm));
    }
    Ok(KHEigensystem {
        delta,
        a1,
        a2,
        phi1,
        phi2,
        tau: p.tau(),
        exceptional,
        residual,
    })
}

/// `u20` closed-form root(s) of `Δ = 0`, when they exist.
pub fn kh_breaking_points(p: &KHParameters) -> Option<(f64, f64)> {
    let radicand = -p.g * (p.rho10 * p.rho10 - p.rho20 * p.rho20) * p.k.abs()
        / (p.k * p.k * p.rho10 * p.rho20);
    if radicand > 0.0 {
        let r = radicand.sqrt();
        Some((p.u10 - r, p.u10 + r))
    } else {
        None
    }
}

/// The family `u20 -> (H, G)` with every other parameter held fixed.
#[derive(Debug, Clone, Copy)]
pub struct KhFamily {
    pub fixed: KHParameters,
}

impl KhFamily {
    /// `fixed.u20` is ignored.
    pub fn new(fixed: KHParameters) -> Result<Self> {
        fixed.validate()?;
        Ok(Self { fixed })
    }

    pub fn at(&self, u20: f64) -> KHParameters {
        KHParameters { u20, ..self.fixed }
    }
}

impl ParameterFamily for KhFamily {
    fn hamiltonian(&self, u20: f64) -> Result<ComplexMatrix> {
        kh_hamiltonian(&self.at(u20))
    }

    fn metric(&self, u20: f64) -> Result<ComplexMatrix> {
        Ok(kh_metric(&self.at(u20))?.matrix)
    }
}
