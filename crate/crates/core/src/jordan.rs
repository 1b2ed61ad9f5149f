//! Numerical Jordan decomposition `H = Q⁻¹ J Q` by the rank-staircase method.
//!
//! Computed eigenvalues are grouped into clusters of radius `sqrt(rel)·‖H‖`, block
//! sizes per cluster come from the ranks of `(H - λI)^k`, and Jordan chains are
//! built top-down from the nested kernels of those powers. Everything is ordered
//! canonically so identical input yields identical `J`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{condition_number, scaled, svd, ComplexMatrix, Tolerance};

/// A group of computed eigenvalues treated as one mathematical eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Mean of the members; imaginary part snapped to zero when `is_real`.
    pub center: Complex64,
    pub multiplicity: usize,
    pub is_real: bool,
    /// Index of the conjugate partner cluster in the canonical list, if any.
    /// Real clusters are their own partner.
    pub conjugate: Option<usize>,
}

/// One eigenvalue with its Jordan block sizes (descending).
#[derive(Debug, Clone, PartialEq)]
pub struct JordanBlockSpec {
    pub eigenvalue: Complex64,
    pub sizes: Vec<usize>,
}

impl JordanBlockSpec {
    pub fn multiplicity(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn geometric_multiplicity(&self) -> usize {
        self.sizes.len()
    }
}

#[derive(Debug, Clone)]
pub struct JordanDecomposition {
    pub blocks: Vec<JordanBlockSpec>,
    pub clusters: Vec<Cluster>,
    pub q: ComplexMatrix,
    pub j: ComplexMatrix,
    /// `‖QH − JQ‖_F / ‖H‖_F`.
    pub residual: f64,
    pub cond_q: f64,
    pub cluster_radius: f64,
}

/// Block data with the transform stripped, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureSignature {
    pub blocks: Vec<JordanBlockSpec>,
    pub clusters: Vec<Cluster>,
    pub cluster_radius: f64,
}

impl StructureSignature {
    /// Signature of `H̄`: every eigenvalue conjugated, re-sorted canonically.
    pub fn conjugated(&self) -> StructureSignature {
        let mut blocks: Vec<JordanBlockSpec> = self
            .blocks
            .iter()
            .map(|b| JordanBlockSpec {
                eigenvalue: b.eigenvalue.conj(),
                sizes: b.sizes.clone(),
            })
            .collect();
        let mut clusters: Vec<Cluster> = self
            .clusters
            .iter()
            .map(|c| Cluster {
                center: c.center.conj(),
                ..c.clone()
            })
            .collect();
        let order = canonical_permutation(&clusters, self.cluster_radius);
        blocks = order.iter().map(|&i| blocks[i].clone()).collect();
        let inverse = invert(&order);
        clusters = order
            .iter()
            .map(|&i| {
                let mut c = clusters[i].clone();
                c.conjugate = c.conjugate.map(|k| inverse[k]);
                c
            })
            .collect();
        StructureSignature {
            blocks,
            clusters,
            cluster_radius: self.cluster_radius,
        }
    }

    /// Equality up to the eigenvalue tolerance.
    pub fn approx_eq(&self, other: &StructureSignature) -> bool {
        let radius = self.cluster_radius.max(other.cluster_radius);
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.sizes == b.sizes && (a.eigenvalue - b.eigenvalue).norm() <= radius)
    }
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (pos, &i) in perm.iter().enumerate() {
        inv[i] = pos;
    }
    inv
}

pub(crate) fn schur_eigenvalues(h: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.n();
    let triangular = (0..n).all(|c| ((c + 1)..n).all(|r| h[(r, c)] == Complex64::new(0.0, 0.0)));
    if triangular {
        return Ok((0..n).map(|i| h[(i, i)]).collect());
    }
    let max_iter = 1000 * n.max(10);
    if let Some(schur) = Schur::try_new(h.as_matrix().clone(), f64::EPSILON, max_iter) {
        let (_, t) = schur.unpack();
        return Ok((0..n).map(|i| t[(i, i)]).collect());
    }
    // The shifted QR iteration can stall on highly structured (defective) input;
    // a fixed-seed unitary similarity breaks the structure without moving the spectrum.
    let mut rng = crate::ensemble::rng(0x5eed);
    for _ in 0..4 {
        let u = crate::ensemble::random_unitary(n, &mut rng);
        let rotated = u.adjoint() * h.as_matrix() * &u;
        if let Some(schur) = Schur::try_new(rotated, f64::EPSILON, max_iter) {
            let (_, t) = schur.unpack();
            return Ok((0..n).map(|i| t[(i, i)]).collect());
        }
    }
    Err(Error::NonConvergence(format!(
        "Schur iteration did not converge (n = {n})"
    )))
}

/// Eigenvalues of `H` from the complex Schur form, in no particular order.
pub fn eigenvalues(h: &ComplexMatrix) -> Result<Vec<Complex64>> {
    schur_eigenvalues(h)
}

/// Canonical ordering of clusters: real ones ascending, then complex groups by
/// `(re, |im|)` with the `+im` member of each conjugate pair first. Returns the
/// permutation (new position -> old index).
fn canonical_permutation(clusters: &[Cluster], radius: f64) -> Vec<usize> {
    let mut real: Vec<usize> = (0..clusters.len()).filter(|&i| clusters[i].is_real).collect();
    real.sort_by(|&a, &b| {
        clusters[a]
            .center
            .re
            .total_cmp(&clusters[b].center.re)
    });

    // (key_re, key_abs_im, members in output order)
    let mut groups: Vec<(f64, f64, Vec<usize>)> = Vec::new();
    let mut taken = vec![false; clusters.len()];
    let mut complex: Vec<usize> = (0..clusters.len()).filter(|&i| !clusters[i].is_real).collect();
    complex.sort_by(|&a, &b| cmp_complex(clusters[a].center, clusters[b].center));
    for &i in &complex {
        if taken[i] || clusters[i].center.im < 0.0 {
            continue;
        }
        taken[i] = true;
        let zi = clusters[i].center;
        let partner = complex
            .iter()
            .copied()
            .filter(|&k| !taken[k] && clusters[k].center.im < 0.0)
            .map(|k| (k, (clusters[k].center - zi.conj()).norm()))
            .filter(|&(_, d)| d <= radius)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match partner {
            Some((k, _)) => {
                taken[k] = true;
                let zk = clusters[k].center;
                groups.push((
                    0.5 * (zi.re + zk.re),
                    0.5 * (zi.im.abs() + zk.im.abs()),
                    vec![i, k],
                ));
            }
            None => groups.push((zi.re, zi.im.abs(), vec![i])),
        }
    }
    for &i in &complex {
        if !taken[i] {
            taken[i] = true;
            let z = clusters[i].center;
            groups.push((z.re, z.im.abs(), vec![i]));
        }
    }
    groups.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then_with(|| {
                // lone +im before lone -im at equal keys
                let sa = clusters[a.2[0]].center.im;
                let sb = clusters[b.2[0]].center.im;
                sb.total_cmp(&sa)
            })
    });
    real.into_iter()
        .chain(groups.into_iter().flat_map(|g| g.2))
        .collect()
}

fn cmp_complex(a: Complex64, b: Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(b.im.total_cmp(&a.im))
}

/// Groups the eigenvalues of `H` into clusters of radius `tol.cluster_radius(‖H‖_F)`
/// (single linkage), returned in canonical order with conjugate partners linked.
pub fn eigen_cluster(h: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<Cluster>> {
    let radius = tol.cluster_radius(h.frobenius());
    let eig = schur_eigenvalues(h)?;
    Ok(cluster_values(&eig, radius))
}

pub(crate) fn cluster_values(eig: &[Complex64], radius: f64) -> Vec<Cluster> {
    let n = eig.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eig[i] - eig[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<Complex64>> = Vec::new();
    for (i, &z) in eig.iter().enumerate() {
        let r = find(&mut parent, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => members[k].push(z),
            None => {
                roots.push(r);
                members.push(vec![z]);
            }
        }
    }
    let mut clusters: Vec<Cluster> = members
        .into_iter()
        .map(|m| {
            let sum: Complex64 = m.iter().sum();
            let mut center = sum / m.len() as f64;
            let is_real = center.im.abs() <= radius;
            if is_real {
                center.im = 0.0;
            }
            Cluster {
                center,
                multiplicity: m.len(),
                is_real,
                conjugate: None,
            }
        })
        .collect();
    let order = canonical_permutation(&clusters, radius);
    clusters = order.iter().map(|&i| clusters[i].clone()).collect();
    link_conjugates(&mut clusters, radius);
    clusters
}

fn link_conjugates(clusters: &mut [Cluster], radius: f64) {
    let mut taken = vec![false; clusters.len()];
    for i in 0..clusters.len() {
        if clusters[i].is_real {
            clusters[i].conjugate = Some(i);
            taken[i] = true;
        }
    }
    for i in 0..clusters.len() {
        if taken[i] {
            continue;
        }
        let target = clusters[i].center.conj();
        let best = (0..clusters.len())
            .filter(|&k| k != i && !taken[k])
            .map(|k| (k, (clusters[k].center - target).norm()))
            .filter(|&(_, d)| d <= radius)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((k, _)) = best {
            clusters[i].conjugate = Some(k);
            clusters[k].conjugate = Some(i);
            taken[i] = true;
            taken[k] = true;
        }
    }
}

/// Rank with singular values at or below `rel * scale` counted as zero.
fn numerical_rank(sv: &[f64], scale: f64, tol: &Tolerance) -> usize {
    let band = tol.zero_band(scale);
    sv.iter().filter(|&&s| s > band).count()
}

/// Rank staircase data for one cluster.
struct Staircase {
    /// `ranks[k] = rank((H - λI)^k)`, `ranks[0] = n`.
    ranks: Vec<usize>,
    /// Orthonormal kernel bases of `(H - λI)^k`, `kernels[0]` empty.
    kernels: Vec<DMatrix<Complex64>>,
}

impl Staircase {
    /// Block sizes, descending.
    fn sizes(&self) -> Vec<usize> {
        let p = self.ranks.len() - 1;
        let weyr = |k: usize| -> usize {
            if k > p {
                0
            } else {
                self.ranks[k - 1] - self.ranks[k]
            }
        };
        let mut sizes = Vec::new();
        for s in (1..=p).rev() {
            for _ in 0..(weyr(s) - weyr(s + 1)) {
                sizes.push(s);
            }
        }
        sizes
    }
}

fn staircase(
    h: &ComplexMatrix,
    lambda: Complex64,
    multiplicity: usize,
    tol: &Tolerance,
) -> Result<Staircase> {
    let n = h.n();
    let shifted = h.as_matrix() - DMatrix::<Complex64>::identity(n, n) * lambda;
    let target = n - multiplicity;
    let mut ranks = vec![n];
    let mut kernels = vec![DMatrix::zeros(n, 0)];
    let mut power = DMatrix::<Complex64>::identity(n, n);
    let inconsistent = |ranks: &[usize]| Error::StaircaseInconsistent {
        eigenvalue: lambda,
        multiplicity,
        ranks: ranks.to_vec(),
    };
    // ‖N‖^k bounds σ_max(N^k); once N^k is numerically zero its own σ_max is noise
    let shifted_norm = shifted.norm();
    let mut scale = 1.0;
    for _ in 0..multiplicity {
        power = &shifted * power;
        scale *= shifted_norm;
        let d = svd(&power);
        let r = numerical_rank(&d.values, scale, tol);
        let prev = *ranks.last().unwrap();
        let prev_drop = if ranks.len() >= 2 {
            ranks[ranks.len() - 2] - prev
        } else {
            usize::MAX
        };
        ranks.push(r);
        if r >= prev || r < target || prev - r > prev_drop {
            return Err(inconsistent(&ranks));
        }
        kernels.push(d.trailing(r));
        if r == target {
            return Ok(Staircase { ranks, kernels });
        }
    }
    Err(inconsistent(&ranks))
}

/// Orthonormal basis for the column span of `m`, keeping the `dim` leading
/// directions (right singular vectors of `m†`).
fn leading_span(m: &DMatrix<Complex64>, dim: usize) -> DMatrix<Complex64> {
    if dim == 0 || m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    svd(&m.adjoint()).leading(dim)
}

fn hcat(parts: &[&DMatrix<Complex64>], rows: usize) -> DMatrix<Complex64> {
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut off = 0;
    for p in parts {
        out.columns_mut(off, p.ncols()).copy_from(*p);
        off += p.ncols();
    }
    out
}

/// Jordan chains for one cluster as columns `[N^{s-1}x, ..., Nx, x]` per block,
/// blocks in descending size.
fn chains(h: &ComplexMatrix, lambda: Complex64, stair: &Staircase) -> DMatrix<Complex64> {
    let n = h.n();
    let shifted = h.as_matrix() - DMatrix::<Complex64>::identity(n, n) * lambda;
    let sizes = stair.sizes();
    let p = stair.ranks.len() - 1;
    // (top vector, chain length)
    let mut tops: Vec<(nalgebra::DVector<Complex64>, usize)> = Vec::new();
    for s in (1..=p).rev() {
        let count = sizes.iter().filter(|&&x| x == s).count();
        if count == 0 {
            continue;
        }
        // level-s vectors of longer chains
        let mut lifted = DMatrix::zeros(n, tops.len());
        for (c, (x, t)) in tops.iter().enumerate() {
            let mut y = x.clone();
            for _ in 0..(t - s) {
                y = &shifted * y;
            }
            lifted.set_column(c, &y);
        }
        let below = &stair.kernels[s - 1];
        let occupied = hcat(&[below, &lifted], n);
        let basis = leading_span(&occupied, occupied.ncols());
        let kernel = &stair.kernels[s];
        let complement = kernel - &basis * (basis.adjoint() * kernel);
        let new_tops = leading_span(&complement, count);
        for c in 0..count {
            tops.push((new_tops.column(c).into_owned(), s));
        }
    }
    let mut v = DMatrix::zeros(n, 0);
    for (x, s) in &tops {
        let mut chain = DMatrix::zeros(n, *s);
        let mut y = x.clone();
        for col in (0..*s).rev() {
            chain.set_column(col, &y);
            y = &shifted * y;
        }
        v = hcat(&[&v, &chain], n);
    }
    v
}

struct Structure {
    clusters: Vec<Cluster>,
    blocks: Vec<JordanBlockSpec>,
    stairs: Vec<Staircase>,
    radius: f64,
}

fn structure(h: &ComplexMatrix, tol: &Tolerance) -> Result<Structure> {
    let radius = tol.cluster_radius(h.frobenius());
    let clusters = cluster_values(&schur_eigenvalues(h)?, radius);
    let mut blocks = Vec::with_capacity(clusters.len());
    let mut stairs = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let stair = staircase(h, c.center, c.multiplicity, tol)?;
        blocks.push(JordanBlockSpec {
            eigenvalue: c.center,
            sizes: stair.sizes(),
        });
        stairs.push(stair);
    }
    Ok(Structure {
        clusters,
        blocks,
        stairs,
        radius,
    })
}

/// Block structure only, without assembling the transform.
pub fn jordan_structure(h: &ComplexMatrix, tol: &Tolerance) -> Result<StructureSignature> {
    let s = structure(h, tol)?;
    Ok(StructureSignature {
        blocks: s.blocks,
        clusters: s.clusters,
        cluster_radius: s.radius,
    })
}

pub fn jordan_decompose(h: &ComplexMatrix, tol: &Tolerance) -> Result<JordanDecomposition> {
    let s = structure(h, tol)?;
    let n = h.n();
    let mut v = DMatrix::zeros(n, 0);
    for (c, stair) in s.clusters.iter().zip(&s.stairs) {
        v = hcat(&[&v, &chains(h, c.center, stair)], n);
    }
    let cond_q = condition_number(&v);
    let q = v.clone().try_inverse().ok_or_else(|| Error::IllConditioned {
        reason: "generalized eigenvector matrix is singular".into(),
        residual: f64::INFINITY,
        cond_q,
    })?;
    let flat: Vec<(Complex64, usize)> = s
        .blocks
        .iter()
        .flat_map(|b| b.sizes.iter().map(move |&m| (b.eigenvalue, m)))
        .collect();
    let j = crate::ensemble::jordan_matrix(&flat);
    let residual = scaled((&q * h.as_matrix() - &j * &q).norm(), h.frobenius());
    Ok(JordanDecomposition {
        blocks: s.blocks,
        clusters: s.clusters,
        q: ComplexMatrix::new(q)?,
        j: ComplexMatrix::new(j)?,
        residual,
        cond_q,
        cluster_radius: s.radius,
    })
}

pub fn structure_signature(d: &JordanDecomposition) -> StructureSignature {
    StructureSignature {
        blocks: d.blocks.clone(),
        clusters: d.clusters.clone(),
        cluster_radius: d.cluster_radius,
    }
}
