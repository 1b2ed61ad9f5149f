//! PT-symmetry and pseudo-Hermiticity: checks, metric construction from the
//! Jordan form, the G-Hamiltonian split and the generalized parity solver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::ensemble;
use crate::error::{Error, Result};
use crate::jordan::{jordan_decompose, jordan_structure, JordanDecomposition, StructureSignature};
use crate::linalg::{
    condition_number, hermitian_eigenvalues, hermitian_residual, inertia, scaled, svd,
    ComplexMatrix, Inertia, Tolerance,
};

fn same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::Dimension {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtReport {
    /// `P² = I` within tolerance.
    pub parity_ok: bool,
    /// `‖P² − I‖_F / max(1, ‖P‖_F²)`.
    pub parity_residual: f64,
    /// `‖P H̄ − H P‖_F / max(1, ‖P‖_F ‖H‖_F)`.
    pub commutation_residual: f64,
    pub is_pt_symmetric: bool,
}

pub fn check_pt(h: &ComplexMatrix, p: &ComplexMatrix, tol: &Tolerance) -> Result<PtReport> {
    same_dim(h, p)?;
    let n = h.n();
    let pm = p.as_matrix();
    let parity_residual = scaled(
        (pm * pm - DMatrix::<Complex64>::identity(n, n)).norm(),
        (p.frobenius() * p.frobenius()).max(1.0),
    );
    let commutation_residual = scaled(
        (pm * h.conjugate().as_matrix() - h.as_matrix() * pm).norm(),
        (p.frobenius() * h.frobenius()).max(1.0),
    );
    let parity_ok = parity_residual <= tol.rel;
    Ok(PtReport {
        parity_ok,
        parity_residual,
        commutation_residual,
        is_pt_symmetric: parity_ok && commutation_residual <= tol.rel,
    })
}

/// Random `H` with `P H̄ = H P`: draws `H0` and returns `(H0 + P H̄0 P)/2`.
/// `P` must be real, symmetric and involutive.
pub fn random_pt_hamiltonian(n: usize, p: &ComplexMatrix, seed: u64) -> Result<ComplexMatrix> {
    if p.n() != n {
        return Err(Error::Dimension {
            expected: n,
            found: p.n(),
        });
    }
    let tol = Tolerance::default();
    let pm = p.as_matrix();
    let imag = pm.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > tol.rel * p.frobenius().max(1.0) {
        return Err(Error::Precondition(format!("P is not real (max |Im| = {imag:.3e})")));
    }
    let asym = scaled((pm - pm.transpose()).norm(), p.frobenius().max(1.0));
    if asym > tol.rel {
        return Err(Error::Precondition(format!("P is not symmetric (residual {asym:.3e})")));
    }
    let report = check_pt(&ComplexMatrix::identity(n), p, &tol)?;
    if !report.parity_ok {
        return Err(Error::Precondition(format!(
            "P is not an involution (residual {:.3e})",
            report.parity_residual
        )));
    }
    let mut rng = ensemble::rng(seed);
    let h0 = ensemble::random_complex(n, &mut rng);
    let h = (&h0 + pm * h0.map(|z| z.conj()) * pm) * Complex64::new(0.5, 0.0);
    ComplexMatrix::new(h)
}

/// A verified metric: `G` Hermitian, nonsingular, with `H† G = G H`.
#[derive(Debug, Clone)]
pub struct MetricCertificate {
    pub g: ComplexMatrix,
    /// `‖H† G − G H‖_F / (‖H‖_F ‖G‖_F)`.
    pub residual: f64,
    pub inertia: Inertia,
    /// Smallest `|eigenvalue|` of `G`.
    pub min_abs_eig: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PseudoGate {
    NotHermitian,
    Singular,
    Residual,
}

/// Which gate of the pseudo-Hermiticity check failed, with every measured value.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoFailure {
    pub gate: PseudoGate,
    pub hermitian_residual: f64,
    pub min_abs_eig: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub enum PseudoCheck {
    Certified(MetricCertificate),
    Failed(PseudoFailure),
}

impl PseudoCheck {
    pub fn is_certified(&self) -> bool {
        matches!(self, PseudoCheck::Certified(_))
    }

    pub fn certificate(&self) -> Option<&MetricCertificate> {
        match self {
            PseudoCheck::Certified(c) => Some(c),
            PseudoCheck::Failed(_) => None,
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            PseudoCheck::Certified(c) => c.residual,
            PseudoCheck::Failed(f) => f.residual,
        }
    }
}

/// `‖H† G − G H‖_F / (‖H‖_F ‖G‖_F)`.
pub fn pseudo_residual(h: &ComplexMatrix, g: &ComplexMatrix) -> f64 {
    let hm = h.as_matrix();
    let gm = g.as_matrix();
    scaled(
        (hm.adjoint() * gm - gm * hm).norm(),
        h.frobenius() * g.frobenius(),
    )
}

fn min_abs_eigenvalue(g: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(g.as_matrix())
        .into_iter()
        .map(f64::abs)
        .fold(f64::INFINITY, f64::min)
}

pub fn check_pseudo_with(h: &ComplexMatrix, g: &ComplexMatrix, tol: &Tolerance) -> Result<PseudoCheck> {
    same_dim(h, g)?;
    let herm = hermitian_residual(g);
    let min_abs_eig = min_abs_eigenvalue(g);
    let residual = pseudo_residual(h, g);
    let gate = if herm > tol.rel {
        Some(PseudoGate::NotHermitian)
    } else if min_abs_eig <= tol.zero_band(g.frobenius()) {
        Some(PseudoGate::Singular)
    } else if residual > tol.rel {
        Some(PseudoGate::Residual)
    } else {
        None
    };
    Ok(match gate {
        Some(gate) => PseudoCheck::Failed(PseudoFailure {
            gate,
            hermitian_residual: herm,
            min_abs_eig,
            residual,
        }),
        None => PseudoCheck::Certified(MetricCertificate {
            g: g.clone(),
            residual,
            inertia: inertia(g, tol)?,
            min_abs_eig,
        }),
    })
}

/// Outcome of comparing the Jordan structure of `H` with that of `H̄`.
#[derive(Debug, Clone)]
pub struct ConjugateSimilarity {
    pub similar: bool,
    /// `(block index, partner block index)` in the signature's canonical order.
    pub pairing: Vec<(usize, usize)>,
    /// Eigenvalues with no conjugate partner.
    pub unmatched: Vec<Complex64>,
    /// Partnered eigenvalues whose block sizes disagree: `(λ, sizes, conjugate sizes)`.
    pub size_mismatches: Vec<(Complex64, Vec<usize>, Vec<usize>)>,
    pub signature: StructureSignature,
}

fn conjugate_pairing(signature: StructureSignature) -> ConjugateSimilarity {
    let mut pairing = Vec::new();
    let mut unmatched = Vec::new();
    let mut size_mismatches = Vec::new();
    for (i, cluster) in signature.clusters.iter().enumerate() {
        match cluster.conjugate {
            Some(k) => {
                if signature.blocks[i].sizes == signature.blocks[k].sizes {
                    pairing.push((i, k));
                } else if i < k {
                    size_mismatches.push((
                        signature.blocks[i].eigenvalue,
                        signature.blocks[i].sizes.clone(),
                        signature.blocks[k].sizes.clone(),
                    ));
                }
            }
            None => unmatched.push(cluster.center),
        }
    }
    ConjugateSimilarity {
        similar: unmatched.is_empty() && size_mismatches.is_empty(),
        pairing,
        unmatched,
        size_mismatches,
        signature,
    }
}

/// Whether `H` is similar to `H̄`: every eigenvalue has a conjugate partner with
/// the same Jordan block sizes.
pub fn similar_to_conjugate(h: &ComplexMatrix, tol: &Tolerance) -> Result<ConjugateSimilarity> {
    Ok(conjugate_pairing(jordan_structure(h, tol)?))
}

/// One diagonal block of the exchange metric `G'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricUnit {
    /// A single Jordan block of a real eigenvalue.
    Real { eigenvalue: f64, size: usize },
    /// `J_l(a+bi) ⊕ J_l(a−bi)`; `eigenvalue` is the `+b` member.
    ConjugatePair { eigenvalue: Complex64, size: usize },
}

impl MetricUnit {
    pub fn dim(&self) -> usize {
        match *self {
            MetricUnit::Real { size, .. } => size,
            MetricUnit::ConjugatePair { size, .. } => 2 * size,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstructedMetric {
    pub certificate: MetricCertificate,
    /// `G' = Diag(G'_1, ..., G'_k)` of anti-diagonal exchange blocks, in unit order.
    pub exchange: ComplexMatrix,
    pub units: Vec<MetricUnit>,
    /// Rows of `Q` reordered so the units are contiguous; `G = Q'† G' Q'`.
    pub q: ComplexMatrix,
    pub decomposition: JordanDecomposition,
}

fn exchange_matrix(dims: &[usize]) -> DMatrix<Complex64> {
    let n: usize = dims.iter().sum();
    let mut g = DMatrix::zeros(n, n);
    let mut off = 0;
    for &d in dims {
        for k in 0..d {
            g[(off + k, off + d - 1 - k)] = Complex64::new(1.0, 0.0);
        }
        off += d;
    }
    g
}

/// Builds a metric from the Jordan form: each real Jordan block and each
/// conjugate pair of equal-size blocks gets an exchange block, and
/// `G = Q† G' Q`. The result is verified before it is returned.
pub fn construct_metric(h: &ComplexMatrix, tol: &Tolerance) -> Result<ConstructedMetric> {
    let d = jordan_decompose(h, tol)?;
    let sim = conjugate_pairing(crate::jordan::structure_signature(&d));
    if !sim.unmatched.is_empty() {
        return Err(Error::NotSimilarToConjugate {
            unmatched: sim.unmatched,
        });
    }
    if let Some((eigenvalue, sizes, conjugate_sizes)) = sim.size_mismatches.into_iter().next() {
        return Err(Error::PairingMismatch {
            eigenvalue,
            sizes,
            conjugate_sizes,
        });
    }

    // column offset of every block of every cluster in J
    let mut offsets: Vec<Vec<usize>> = Vec::with_capacity(d.blocks.len());
    let mut off = 0;
    for b in &d.blocks {
        let mut o = Vec::with_capacity(b.sizes.len());
        for &m in &b.sizes {
            o.push(off);
            off += m;
        }
        offsets.push(o);
    }

    let mut perm: Vec<usize> = Vec::with_capacity(h.n());
    let mut units = Vec::new();
    for (i, b) in d.blocks.iter().enumerate() {
        let partner = d.clusters[i].conjugate.expect("pairing verified");
        if partner == i {
            for (t, &m) in b.sizes.iter().enumerate() {
                perm.extend(offsets[i][t]..offsets[i][t] + m);
                units.push(MetricUnit::Real {
                    eigenvalue: b.eigenvalue.re,
                    size: m,
                });
            }
        } else if partner > i {
            for (t, &l) in b.sizes.iter().enumerate() {
                perm.extend(offsets[i][t]..offsets[i][t] + l);
                perm.extend(offsets[partner][t]..offsets[partner][t] + l);
                units.push(MetricUnit::ConjugatePair {
                    eigenvalue: b.eigenvalue,
                    size: l,
                });
            }
        }
    }

    let n = h.n();
    let qm = d.q.as_matrix();
    let q_perm = DMatrix::from_fn(n, n, |r, c| qm[(perm[r], c)]);
    let dims: Vec<usize> = units.iter().map(MetricUnit::dim).collect();
    let exchange = exchange_matrix(&dims);
    let g = q_perm.adjoint() * &exchange * &q_perm;
    let g = ComplexMatrix::new((&g + g.adjoint()) * Complex64::new(0.5, 0.0))?;

    match check_pseudo_with(h, &g, tol)? {
        PseudoCheck::Certified(certificate) => Ok(ConstructedMetric {
            certificate,
            exchange: ComplexMatrix::new(exchange)?,
            units,
            q: ComplexMatrix::new(q_perm)?,
            decomposition: d,
        }),
        PseudoCheck::Failed(f) => Err(Error::IllConditioned {
            reason: format!("{:?} gate", f.gate),
            residual: f.residual,
            cond_q: d.cond_q,
        }),
    }
}

/// `S = −i G A` with `A = −i H`, and whether it is Hermitian.
#[derive(Debug, Clone)]
pub struct GHamiltonianSplit {
    pub s: ComplexMatrix,
    /// `‖S − S†‖_F / max(1, ‖S‖_F)`.
    pub hermitian_residual: f64,
    /// `‖S − S†‖_F / (‖G‖_F ‖H‖_F)`, on the same scale as the pseudo-Hermiticity residual.
    pub scaled_residual: f64,
    pub s_is_hermitian: bool,
    /// Verdict of [`check_pseudo_with`] on the same pair.
    pub pseudo_hermitian: bool,
    /// The two verdicts agree.
    pub consistent: bool,
}

pub fn g_hamiltonian_split(
    h: &ComplexMatrix,
    g: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<GHamiltonianSplit> {
    same_dim(h, g)?;
    let herm = hermitian_residual(g);
    if herm > tol.rel {
        return Err(Error::NotHermitian { residual: herm });
    }
    if min_abs_eigenvalue(g) <= tol.zero_band(g.frobenius()) {
        return Err(Error::SingularMetric);
    }
    let a = h.generator();
    let s = (g.as_matrix() * a.as_matrix()) * Complex64::new(0.0, -1.0);
    let s = ComplexMatrix::new(s)?;
    let skew = (s.as_matrix() - s.as_matrix().adjoint()).norm();
    let scaled_residual = scaled(skew, g.frobenius() * h.frobenius());
    let s_is_hermitian = scaled_residual <= tol.rel;
    let pseudo_hermitian = check_pseudo_with(h, g, tol)?.is_certified();
    Ok(GHamiltonianSplit {
        hermitian_residual: hermitian_residual(&s),
        s,
        scaled_residual,
        s_is_hermitian,
        pseudo_hermitian,
        consistent: s_is_hermitian == pseudo_hermitian,
    })
}

/// A nonsingular solution of `H P = P H̄`; `P² = I` is not required.
#[derive(Debug, Clone)]
pub struct ParityWitness {
    pub p: ComplexMatrix,
    /// `‖H P − P H̄‖_F / (‖H‖_F ‖P‖_F)`.
    pub residual: f64,
    pub cond: f64,
    /// Dimension of the solution space.
    pub nullity: usize,
}

const PARITY_ATTEMPTS: usize = 32;
const PARITY_SEED: u64 = 0x9a71;

/// Solves `H P − P H̄ = 0` through the nullspace of `I ⊗ H − H̄ᵀ ⊗ I` and returns
/// the best-conditioned of a fixed budget of random nullspace combinations.
pub fn find_generalized_parity(h: &ComplexMatrix, tol: &Tolerance) -> Result<Option<ParityWitness>> {
    let n = h.n();
    let hm = h.as_matrix();
    let hbar_t = hm.map(|z| z.conj()).transpose();
    let nn = n * n;
    // column-major vec: vec(H P) = (I ⊗ H) vec P, vec(P H̄) = (H̄ᵀ ⊗ I) vec P
    let op = DMatrix::from_fn(nn, nn, |r, c| {
        let (ri, rj) = (r % n, r / n);
        let (ci, cj) = (c % n, c / n);
        let mut v = Complex64::new(0.0, 0.0);
        if rj == cj {
            v += hm[(ri, ci)];
        }
        if ri == ci {
            v -= hbar_t[(rj, cj)];
        }
        v
    });
    let d = svd(&op);
    let band = tol.zero_band(d.values[0].max(h.frobenius()));
    let rank = d.values.iter().filter(|&&s| s > band).count();
    let nullity = nn - rank;
    if nullity == 0 {
        return Ok(None);
    }
    let basis = d.trailing(rank);
    let mut rng = ensemble::rng(PARITY_SEED);
    let mut best: Option<(f64, DMatrix<Complex64>)> = None;
    let attempts = if nullity == 1 { 1 } else { PARITY_ATTEMPTS };
    for _ in 0..attempts {
        let coeff = DVector::from_fn(nullity, |_, _| ensemble::complex_normal(&mut rng));
        let vec_p = &basis * coeff;
        let p = DMatrix::from_column_slice(n, n, vec_p.as_slice());
        let cond = condition_number(&p);
        if best.as_ref().is_none_or(|(c, _)| cond < *c) {
            best = Some((cond, p));
        }
    }
    let (cond, p) = best.expect("at least one attempt");
    if !cond.is_finite() || 1.0 / cond <= tol.rel {
        return Ok(None);
    }
    let p = &p * Complex64::new((n as f64).sqrt() / p.norm(), 0.0);
    let residual = scaled(
        (hm * &p - &p * hm.map(|z| z.conj())).norm(),
        h.frobenius() * p.norm(),
    );
    if residual > tol.rel {
        return Ok(None);
    }
    Ok(Some(ParityWitness {
        p: ComplexMatrix::new(p)?,
        residual,
        cond,
        nullity,
    }))
}
