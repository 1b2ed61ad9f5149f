//! Krein products, eigenvalue kinds, strong stability, and collision tracking
//! across one-parameter families.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jordan::{cluster_values, schur_eigenvalues, Cluster};
use crate::linalg::{hermitian_eigen, inertia, svd, CVector, ComplexMatrix, Inertia, Tolerance};
use crate::metric::{check_pseudo_with, PseudoCheck};

/// `x† G y`.
pub fn krein_product(x: &CVector, y: &CVector, g: &ComplexMatrix) -> Result<Complex64> {
    for v in [x, y] {
        if v.len() != g.n() {
            return Err(Error::Dimension {
                expected: g.n(),
                found: v.len(),
            });
        }
    }
    Ok(x.dotc(&(g.as_matrix() * y)))
}

/// The action `x† G x`, real for Hermitian `G`. Fails if the imaginary part exceeds
/// `rel · ‖G‖_F ‖x‖²`.
pub fn krein_action(x: &CVector, g: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    let z = krein_product(x, x, g)?;
    let band = tol.zero_band(g.frobenius() * x.norm_squared());
    if z.im.abs() > band {
        return Err(Error::Precondition(format!(
            "Krein action has imaginary part {:.3e}; G is not Hermitian",
            z.im
        )));
    }
    Ok(z.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KreinKind {
    /// Every eigenmode has positive action.
    First,
    /// Every eigenmode has negative action.
    Second,
    /// A zero-action eigenmode exists, or the actions have both signs.
    Mixed,
    /// Not real.
    ComplexPair,
}

impl KreinKind {
    pub fn is_definite(self) -> bool {
        matches!(self, KreinKind::First | KreinKind::Second)
    }

    pub fn label(self) -> &'static str {
        match self {
            KreinKind::First => "first",
            KreinKind::Second => "second",
            KreinKind::Mixed => "mixed",
            KreinKind::ComplexPair => "complex-pair",
        }
    }

    /// First and second swapped, as under `G -> -G`.
    pub fn flipped(self) -> KreinKind {
        match self {
            KreinKind::First => KreinKind::Second,
            KreinKind::Second => KreinKind::First,
            other => other,
        }
    }
}

impl std::fmt::Display for KreinKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KreinClassification {
    pub eigenvalue: Complex64,
    pub alg_mult: usize,
    pub geo_mult: usize,
    pub kind: KreinKind,
    /// Spectrum of the Gram matrix `V† G V` on the eigenspace, ascending. Empty for
    /// complex pairs.
    pub gram_eigenvalues: Vec<f64>,
    /// Some Gram eigenvalue fell inside the zero band.
    pub ambiguous: bool,
    /// Index of the conjugate partner in the returned list.
    pub conjugate: Option<usize>,
}

fn require_certified(h: &ComplexMatrix, g: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    match check_pseudo_with(h, g, tol)? {
        PseudoCheck::Certified(_) => Ok(()),
        PseudoCheck::Failed(f) => Err(Error::Precondition(format!(
            "(H, G) is not certified pseudo-Hermitian: {:?} gate (hermitian residual {:.3e}, \
             min |eig G| {:.3e}, residual {:.3e})",
            f.gate, f.hermitian_residual, f.min_abs_eig, f.residual
        ))),
    }
}

/// Orthonormal basis of the kernel of `H - λI`, at most `max_dim` wide and never empty.
fn eigenspace(h: &ComplexMatrix, lambda: Complex64, max_dim: usize, tol: &Tolerance) -> DMatrix<Complex64> {
    let n = h.n();
    let shifted = h.as_matrix() - DMatrix::<Complex64>::identity(n, n) * lambda;
    let dec = svd(&shifted);
    let sigma_max = dec.values.first().copied().unwrap_or(0.0);
    let band = tol.zero_band(sigma_max.max(h.frobenius()));
    let nullity = dec
        .values
        .iter()
        .filter(|&&s| s <= band)
        .count()
        .clamp(1, max_dim.max(1));
    dec.trailing(n - nullity)
}

fn classify_clusters(
    h: &ComplexMatrix,
    g: &ComplexMatrix,
    clusters: &[Cluster],
    tol: &Tolerance,
) -> Vec<KreinClassification> {
    let band = tol.zero_band(g.frobenius());
    clusters
        .iter()
        .map(|c| {
            let v = eigenspace(h, c.center, c.multiplicity, tol);
            let geo_mult = v.ncols();
            if !c.is_real {
                return KreinClassification {
                    eigenvalue: c.center,
                    alg_mult: c.multiplicity,
                    geo_mult,
                    kind: KreinKind::ComplexPair,
                    gram_eigenvalues: Vec::new(),
                    ambiguous: false,
                    conjugate: c.conjugate,
                };
            }
            let gram = v.adjoint() * g.as_matrix() * &v;
            let (mu, _) = hermitian_eigen(&((&gram + gram.adjoint()) * Complex64::new(0.5, 0.0)));
            let lo = mu.first().copied().unwrap_or(0.0);
            let hi = mu.last().copied().unwrap_or(0.0);
            let kind = if lo > band {
                KreinKind::First
            } else if hi < -band {
                KreinKind::Second
            } else {
                KreinKind::Mixed
            };
            let ambiguous = mu.iter().any(|m| m.abs() <= band);
            KreinClassification {
                eigenvalue: c.center,
                alg_mult: c.multiplicity,
                geo_mult,
                kind,
                gram_eigenvalues: mu,
                ambiguous,
                conjugate: c.conjugate,
            }
        })
        .collect()
}

fn clusters_of(h: &ComplexMatrix, tol: &Tolerance) -> Result<(Vec<Complex64>, Vec<Cluster>)> {
    let eig = schur_eigenvalues(h)?;
    let clusters = cluster_values(&eig, tol.cluster_radius(h.frobenius()));
    Ok((eig, clusters))
}

/// Kind of every eigenvalue cluster of a certified pair `(H, G)`, in canonical order:
/// real eigenvalues ascending, then conjugate pairs.
pub fn classify_eigenvalues(
    h: &ComplexMatrix,
    g: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Vec<KreinClassification>> {
    require_certified(h, g, tol)?;
    let (_, clusters) = clusters_of(h, tol)?;
    Ok(classify_clusters(h, g, &clusters, tol))
}

#[derive(Debug, Clone, PartialEq)]
pub enum KindCount {
    /// All eigenvalues real and definite; counts are weighted by algebraic multiplicity.
    Applicable {
        n_first: usize,
        n_second: usize,
        inertia: Inertia,
        /// `(n_first, n_second) == (inertia.p, inertia.q)`.
        consistent: bool,
    },
    /// A mixed or complex eigenvalue is present.
    NotApplicable,
}

pub fn count_kinds(
    classifications: &[KreinClassification],
    g: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<KindCount> {
    if !classifications.iter().all(|c| c.kind.is_definite()) {
        return Ok(KindCount::NotApplicable);
    }
    let count = |kind| {
        classifications
            .iter()
            .filter(|c| c.kind == kind)
            .map(|c| c.alg_mult)
            .sum::<usize>()
    };
    let n_first = count(KreinKind::First);
    let n_second = count(KreinKind::Second);
    let inertia = inertia(g, tol)?;
    Ok(KindCount::Applicable {
        n_first,
        n_second,
        inertia,
        consistent: (n_first, n_second) == (inertia.p, inertia.q),
    })
}

/// Every eigenvalue real and of definite kind.
pub fn strong_stability(h: &ComplexMatrix, g: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(classify_eigenvalues(h, g, tol)?
        .iter()
        .all(|c| c.kind.is_definite()))
}

/// A one-parameter family of Hamiltonians with matching metrics.
pub trait ParameterFamily {
    fn hamiltonian(&self, p: f64) -> Result<ComplexMatrix>;
    fn metric(&self, p: f64) -> Result<ComplexMatrix>;
}

/// Family built from two closures.
pub struct FnFamily<H, G> {
    pub h: H,
    pub g: G,
}

impl<H, G> ParameterFamily for FnFamily<H, G>
where
    H: Fn(f64) -> Result<ComplexMatrix>,
    G: Fn(f64) -> Result<ComplexMatrix>,
{
    fn hamiltonian(&self, p: f64) -> Result<ComplexMatrix> {
        (self.h)(p)
    }

    fn metric(&self, p: f64) -> Result<ComplexMatrix> {
        (self.g)(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionEvent {
    pub parameter_value: f64,
    pub colliding_eigenvalue: Complex64,
    /// Kinds of the two colliding eigenvalues on the real side.
    pub kinds_before: (KreinKind, KreinKind),
    /// Whether the parameter was refined by bisection.
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub parameter_grid: Vec<f64>,
    /// Per grid point, `n` eigenvalues with kinds. Index `i` follows one continuous
    /// trajectory across the grid.
    pub trajectories: Vec<Vec<(Complex64, KreinKind)>>,
    pub collisions: Vec<CollisionEvent>,
}

fn certified_pair<F: ParameterFamily + ?Sized>(
    family: &F,
    p: f64,
    tol: &Tolerance,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let fail = |reason: String| Error::CertificationFailed { parameter: p, reason };
    let h = family.hamiltonian(p).map_err(|e| fail(e.to_string()))?;
    let g = family.metric(p).map_err(|e| fail(e.to_string()))?;
    require_certified(&h, &g, tol).map_err(|e| fail(e.to_string()))?;
    Ok((h, g))
}

/// Eigenvalues with the kind of their cluster; imaginary parts of real clusters zeroed.
fn labeled_spectrum(
    h: &ComplexMatrix,
    g: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<(Vec<(Complex64, KreinKind)>, bool)> {
    let (eig, clusters) = clusters_of(h, tol)?;
    let classes = classify_clusters(h, g, &clusters, tol);
    let broken = clusters.iter().any(|c| !c.is_real);
    let labeled = eig
        .iter()
        .map(|&z| {
            let (k, _) = clusters
                .iter()
                .enumerate()
                .map(|(k, c)| (k, (c.center - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("at least one cluster");
            let z = if clusters[k].is_real { Complex64::new(z.re, 0.0) } else { z };
            (z, classes[k].kind)
        })
        .collect();
    Ok((labeled, broken))
}

/// Whether any eigenvalue of the family at `p` is non-real.
fn is_broken<F: ParameterFamily + ?Sized>(family: &F, p: f64, tol: &Tolerance) -> Result<bool> {
    let h = family
        .hamiltonian(p)
        .map_err(|e| Error::CertificationFailed {
            parameter: p,
            reason: e.to_string(),
        })?;
    Ok(clusters_of(&h, tol)?.1.iter().any(|c| !c.is_real))
}

/// Minimal total distance assignment: `perm[i]` is the index in `to` matched with
/// `from[i]`. Exact by subset dynamic programming for `n <= 16`, greedy above.
pub fn match_eigenvalues(from: &[Complex64], to: &[Complex64]) -> Vec<usize> {
    let n = from.len();
    assert_eq!(n, to.len(), "spectra must have equal length");
    let cost = |i: usize, j: usize| (from[i] - to[j]).norm();
    if n > 16 {
        let mut used = vec![false; n];
        return (0..n)
            .map(|i| {
                let j = (0..n)
                    .filter(|&j| !used[j])
                    .min_by(|&a, &b| cost(i, a).total_cmp(&cost(i, b)))
                    .expect("free column");
                used[j] = true;
                j
            })
            .collect();
    }
    // best[mask]: least cost of matching from[0..popcount(mask)] onto the set `mask`
    let size = 1usize << n;
    let mut best = vec![f64::INFINITY; size];
    let mut choice = vec![usize::MAX; size];
    best[0] = 0.0;
    for mask in 0..size {
        if !best[mask].is_finite() {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let c = best[mask] + cost(i, j);
                if c < best[next] {
                    best[next] = c;
                    choice[next] = j;
                }
            }
        }
    }
    let mut perm = vec![0; n];
    let mut mask = size - 1;
    for i in (0..n).rev() {
        let j = choice[mask];
        perm[i] = j;
        mask &= !(1 << j);
    }
    perm
}

fn uniform_grid(p_min: f64, p_max: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                p_max
            } else {
                p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn bisection_accuracy(p_lo: f64, p_hi: f64) -> f64 {
    1e-10 * p_lo.abs().max(p_hi.abs()).max(1.0)
}

/// Bisects between a parameter with real spectrum and one with a non-real
/// eigenvalue. Returns `(real side, broken side)` after refinement.
fn bisect<F: ParameterFamily + ?Sized>(
    family: &F,
    mut real: f64,
    mut broken: f64,
    tol: &Tolerance,
) -> Result<(f64, f64)> {
    let accuracy = bisection_accuracy(real, broken);
    while (broken - real).abs() > accuracy {
        let mid = 0.5 * (real + broken);
        if mid == real || mid == broken {
            break;
        }
        if is_broken(family, mid, tol)? {
            broken = mid;
        } else {
            real = mid;
        }
    }
    Ok((real, broken))
}

/// Parameter in `[p_lo, p_hi]` where an eigenvalue leaves the real axis, to accuracy
/// `1e-10 · max(1, |p_hi|)`. The spectrum must be real at `p_lo` and not at `p_hi`.
pub fn locate_collision<F: ParameterFamily + ?Sized>(
    family: &F,
    p_lo: f64,
    p_hi: f64,
    tol: &Tolerance,
) -> Result<f64> {
    let not_bracketing = Error::NotBracketing { lo: p_lo, hi: p_hi };
    if !(p_lo.is_finite() && p_hi.is_finite() && p_lo < p_hi) {
        return Err(not_bracketing);
    }
    if is_broken(family, p_lo, tol)? || !is_broken(family, p_hi, tol)? {
        return Err(not_bracketing);
    }
    let (real, broken) = bisect(family, p_lo, p_hi, tol)?;
    Ok(0.5 * (real + broken))
}

fn closest_pair(spectrum: &[(Complex64, KreinKind)]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..spectrum.len() {
        for j in (i + 1)..spectrum.len() {
            let d = (spectrum[i].0 - spectrum[j].0).norm();
            if best.is_none_or(|b| d < b.2) {
                best = Some((i, j, d));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Evaluates eigenvalues and kinds on a uniform grid of `steps` points over
/// `[p_min, p_max]`, tracks trajectories by optimal matching, and records a
/// collision wherever the spectrum turns from real to non-real or back.
pub fn sweep<F: ParameterFamily + ?Sized>(
    family: &F,
    p_min: f64,
    p_max: f64,
    steps: usize,
    tol: &Tolerance,
) -> Result<SweepReport> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("sweep needs at least 2 steps, got {steps}")));
    }
    if !(p_min.is_finite() && p_max.is_finite() && p_min < p_max) {
        return Err(Error::InvalidParameter(format!(
            "sweep range [{p_min}, {p_max}] must be finite and increasing"
        )));
    }
    let grid = uniform_grid(p_min, p_max, steps);
    let mut trajectories: Vec<Vec<(Complex64, KreinKind)>> = Vec::with_capacity(steps);
    let mut broken = Vec::with_capacity(steps);
    for &p in &grid {
        let (h, g) = certified_pair(family, p, tol)?;
        let (mut spectrum, b) = labeled_spectrum(&h, &g, tol)?;
        match trajectories.last() {
            Some(prev) => {
                let from: Vec<Complex64> = prev.iter().map(|e| e.0).collect();
                let to: Vec<Complex64> = spectrum.iter().map(|e| e.0).collect();
                let perm = match_eigenvalues(&from, &to);
                spectrum = perm.iter().map(|&j| spectrum[j]).collect();
            }
            None => spectrum.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im))),
        }
        trajectories.push(spectrum);
        broken.push(b);
    }

    let mut collisions = Vec::new();
    for i in 0..steps - 1 {
        if broken[i] == broken[i + 1] {
            continue;
        }
        let (real_idx, broken_idx) = if broken[i + 1] { (i, i + 1) } else { (i + 1, i) };
        let before = &trajectories[real_idx];
        let after = &trajectories[broken_idx];
        // trajectories that leave the real axis, with their kinds on the real side
        let leaving: Vec<usize> = (0..before.len())
            .filter(|&t| after[t].1 == KreinKind::ComplexPair)
            .collect();
        let kinds_before = match leaving.as_slice() {
            [a, b, ..] => (before[*a].1, before[*b].1),
            [a] => (before[*a].1, before[*a].1),
            [] => (KreinKind::Mixed, KreinKind::Mixed),
        };
        let (real_side, broken_side, refined) =
            match bisect(family, grid[real_idx], grid[broken_idx], tol) {
                Ok((r, b)) => (r, b, true),
                Err(_) => (grid[real_idx], grid[broken_idx], false),
            };
        let (h, g) = certified_pair(family, real_side, tol)?;
        let (spectrum, _) = labeled_spectrum(&h, &g, tol)?;
        let colliding_eigenvalue = closest_pair(&spectrum)
            .map(|(a, b)| (spectrum[a].0 + spectrum[b].0) * 0.5)
            .unwrap_or(spectrum[0].0);
        collisions.push(CollisionEvent {
            parameter_value: 0.5 * (real_side + broken_side),
            colliding_eigenvalue,
            kinds_before,
            refined,
        });
    }
    Ok(SweepReport {
        parameter_grid: grid,
        trajectories,
        collisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kh::{kh_eigensystem, kh_hamiltonian, kh_metric, KHParameters, KhFamily};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn exchange() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn nilpotent() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(2, &[0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    fn kh_pair(u20: f64) -> (ComplexMatrix, ComplexMatrix) {
        let p = KHParameters::standard(u20);
        (kh_hamiltonian(&p).unwrap(), kh_metric(&p).unwrap().matrix)
    }

    #[test]
    fn product_examples() {
        let e1 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(krein_product(&e1, &e1, &exchange()).unwrap(), c(0.0, 0.0));
        let g = ComplexMatrix::from_real_diagonal(&[-1.0, 5.0]).unwrap();
        assert_eq!(krein_action(&e1, &g, &tol()).unwrap(), -1.0);
        let short = CVector::from_vec(vec![c(1.0, 0.0)]);
        assert!(matches!(krein_product(&short, &e1, &g), Err(Error::Dimension { .. })));
    }

    #[test]
    fn kh_eigenvector_actions() {
        let p = KHParameters::standard(2.3);
        let e = kh_eigensystem(&p).unwrap();
        let g = kh_metric(&p).unwrap().matrix;
        let a1 = krein_action(&CVector::from_column_slice(&e.phi1), &g, &tol()).unwrap();
        let a2 = krein_action(&CVector::from_column_slice(&e.phi2), &g, &tol()).unwrap();
        assert!(a1 > 0.0, "{a1}");
        assert!(a2 < 0.0, "{a2}");
    }

    #[test]
    fn classify_identity_metric() {
        let h = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]).unwrap();
        let cls = classify_eigenvalues(&h, &ComplexMatrix::identity(2), &tol()).unwrap();
        assert_eq!(cls.len(), 2);
        assert!(cls.iter().all(|c| c.kind == KreinKind::First));
    }

    #[test]
    fn classify_zero_action_mode() {
        let cls = classify_eigenvalues(&nilpotent(), &exchange(), &tol()).unwrap();
        assert_eq!(cls.len(), 1);
        assert_eq!(cls[0].eigenvalue, c(0.0, 0.0));
        assert_eq!((cls[0].alg_mult, cls[0].geo_mult), (2, 1));
        assert_eq!(cls[0].kind, KreinKind::Mixed);
        assert!(cls[0].ambiguous);
    }

    #[test]
    fn classify_kh_real_side() {
        let (h, g) = kh_pair(2.3);
        let cls = classify_eigenvalues(&h, &g, &tol()).unwrap();
        let kinds: Vec<KreinKind> = cls.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, vec![KreinKind::First, KreinKind::Second]);
        assert_relative_eq!(cls[0].eigenvalue.re, 1.33909, epsilon = 1e-5);
    }

    #[test]
    fn classify_requires_certification() {
        let h = ComplexMatrix::from_real_rows(2, &[1.0, 1.0, 0.0, 2.0]).unwrap();
        assert!(matches!(
            classify_eigenvalues(&h, &ComplexMatrix::identity(2), &tol()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn counting_examples() {
        let h = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]).unwrap();
        let g = ComplexMatrix::identity(2);
        let cls = classify_eigenvalues(&h, &g, &tol()).unwrap();
        match count_kinds(&cls, &g, &tol()).unwrap() {
            KindCount::Applicable { n_first, n_second, inertia, consistent } => {
                assert_eq!((n_first, n_second), (2, 0));
                assert_eq!(inertia, Inertia { p: 2, q: 0, z: 0 });
                assert!(consistent);
            }
            other => panic!("{other:?}"),
        }

        let (h, g) = kh_pair(2.3);
        let cls = classify_eigenvalues(&h, &g, &tol()).unwrap();
        assert_eq!(
            count_kinds(&cls, &g, &tol()).unwrap(),
            KindCount::Applicable {
                n_first: 1,
                n_second: 1,
                inertia: Inertia { p: 1, q: 1, z: 0 },
                consistent: true
            }
        );

        let cls = classify_eigenvalues(&nilpotent(), &exchange(), &tol()).unwrap();
        assert_eq!(count_kinds(&cls, &exchange(), &tol()).unwrap(), KindCount::NotApplicable);
    }

    #[test]
    fn stability_examples() {
        let h = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]).unwrap();
        assert!(strong_stability(&h, &ComplexMatrix::identity(2), &tol()).unwrap());
        let (h, g) = kh_pair(2.7);
        assert!(!strong_stability(&h, &g, &tol()).unwrap());
        assert!(!strong_stability(&nilpotent(), &exchange(), &tol()).unwrap());
    }

    #[test]
    fn kh_sweep_finds_one_collision() {
        let family = KhFamily::new(KHParameters::standard(0.0)).unwrap();
        let report = sweep(&family, 2.3, 2.7, 81, &tol()).unwrap();
        assert_eq!(report.parameter_grid.len(), 81);
        assert!(report.trajectories.iter().all(|t| t.len() == 2));
        assert_eq!(report.collisions.len(), 1);
        let event = &report.collisions[0];
        assert!((event.parameter_value - (1.0 + 2.5f64.sqrt())).abs() < 1e-6, "{event:?}");
        assert!(event.refined);
        let mut kinds = [event.kinds_before.0, event.kinds_before.1];
        kinds.sort_by_key(|k| k.label());
        assert_eq!(kinds, [KreinKind::First, KreinKind::Second]);
        assert_relative_eq!(event.colliding_eigenvalue.re, 1.94868, epsilon = 1e-4);
    }

    #[test]
    fn kh_sweep_stable_regime() {
        let family = KhFamily::new(KHParameters::standard(0.0)).unwrap();
        let report = sweep(&family, 1.0, 1.4, 9, &tol()).unwrap();
        assert!(report.collisions.is_empty());
        assert!(report.trajectories.iter().flatten().all(|e| e.0.im == 0.0));
    }

    #[test]
    fn constant_family_has_no_events() {
        let family = FnFamily {
            h: |_| ComplexMatrix::from_real_diagonal(&[1.0, 2.0]),
            g: |_| Ok(ComplexMatrix::identity(2)),
        };
        let report = sweep(&family, 0.0, 1.0, 5, &tol()).unwrap();
        assert!(report.collisions.is_empty());
        assert!(sweep(&family, 0.0, 1.0, 1, &tol()).is_err());
    }

    #[test]
    fn sweep_names_failing_parameter() {
        let family = FnFamily {
            h: |_| ComplexMatrix::from_real_diagonal(&[1.0, 2.0]),
            g: |p: f64| ComplexMatrix::from_real_diagonal(&[1.0, 0.5 - p]),
        };
        match sweep(&family, 0.0, 1.0, 3, &tol()) {
            Err(Error::CertificationFailed { parameter, .. }) => assert_eq!(parameter, 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn locate_examples() {
        let family = KhFamily::new(KHParameters::standard(0.0)).unwrap();
        let expected = 1.0 + 2.5f64.sqrt();
        let wide = locate_collision(&family, 2.3, 2.7, &tol()).unwrap();
        let narrow = locate_collision(&family, 2.5, 2.6, &tol()).unwrap();
        assert!((wide - expected).abs() < 1e-6, "{wide}");
        assert!((narrow - expected).abs() < 1e-6, "{narrow}");
        assert!(matches!(
            locate_collision(&family, 2.7, 2.3, &tol()),
            Err(Error::NotBracketing { .. })
        ));
        assert!(locate_collision(&family, 2.3, 2.4, &tol()).is_err());
    }

    #[test]
    fn matching_is_optimal() {
        let from = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
        let to = [c(2.1, 0.0), c(0.1, 0.0), c(0.9, 0.0)];
        assert_eq!(match_eigenvalues(&from, &to), vec![1, 2, 0]);
    }
}
