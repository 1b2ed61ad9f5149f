use pseudoherm::ensemble;
use pseudoherm::jordan::eigenvalues;
use pseudoherm::linalg::{evolve, hermitian_residual, CVector};
use pseudoherm::metric::{
    check_pseudo_with, construct_metric, find_generalized_parity, g_hamiltonian_split, random_pt_hamiltonian,
    similar_to_conjugate,
};
use pseudoherm::krein::krein_product;
use pseudoherm::{Complex64, ComplexMatrix, Error, Tolerance};

fn pt_case(seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    let n = 2 + (seed as usize % 7);
    let mut rng = ensemble::rng(seed);
    let p = ensemble::random_involution(n, &mut rng);
    let h = if seed.is_multiple_of(5) {
        let (m, _) = ensemble::random_defective_real(n, &mut rng);
        ComplexMatrix::new(ensemble::pt_rotate(&m, &p)).unwrap()
    } else {
        random_pt_hamiltonian(n, &ComplexMatrix::new(p.clone()).unwrap(), seed).unwrap()
    };
    (h, ComplexMatrix::new(p).unwrap())
}

#[test]
fn pt_symmetric_hamiltonians_get_metrics() {
    let tol = Tolerance::default();
    for seed in 1..=80 {
        let (h, p) = pt_case(seed);
        assert!(pseudoherm::metric::check_pt(&h, &p, &tol).unwrap().is_pt_symmetric, "seed {seed}");
        let built = construct_metric(&h, &tol).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let cert = &built.certificate;
        assert!(hermitian_residual(&cert.g) <= tol.rel);
        assert!(cert.min_abs_eig > 1e-10 * cert.g.frobenius());
        assert!(cert.residual <= 1e-8, "seed {seed}: {}", cert.residual);
    }
}

/// Largest distance from an eigenvalue to the nearest conjugate of another, matched greedily.
fn conjugation_defect(eig: &[Complex64]) -> f64 {
    let mut free: Vec<Complex64> = eig.iter().map(|z| z.conj()).collect();
    let mut worst: f64 = 0.0;
    for z in eig {
        let (k, d) = free
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (z - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(d);
        free.swap_remove(k);
    }
    worst
}

#[test]
fn certified_spectra_are_conjugation_symmetric() {
    for seed in 1..=40 {
        let (h, _) = pt_case(seed);
        if seed % 5 == 0 {
            continue; // defective eigenvalues split like eps^(1/m)
        }
        let eig = eigenvalues(&h).unwrap();
        assert!(conjugation_defect(&eig) <= 1e-8, "seed {seed}");
    }
}

fn theorem_one_pair(seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    let n = 2 + (seed as usize % 5);
    let mut rng = ensemble::rng(seed);
    let g = ensemble::random_hermitian(n, &mut rng);
    let h = if seed.is_multiple_of(2) {
        let s = ensemble::random_hermitian(n, &mut rng);
        g.clone().try_inverse().unwrap() * s
    } else {
        ensemble::random_complex(n, &mut rng)
    };
    (ComplexMatrix::new(h).unwrap(), ComplexMatrix::new(g).unwrap())
}

#[test]
fn split_agrees_with_pseudo_check() {
    let tol = Tolerance::default();
    for seed in 0..100 {
        let (h, g) = theorem_one_pair(seed);
        let split = g_hamiltonian_split(&h, &g, &tol).unwrap();
        assert!(split.consistent, "seed {seed}");
        assert_eq!(split.s_is_hermitian, seed % 2 == 0, "seed {seed}");
    }
}

#[test]
fn asymmetric_spectra_have_no_metric() {
    let tol = Tolerance::default();
    for seed in 0..60 {
        let n = 2 + (seed as usize % 6);
        let h = ComplexMatrix::new(ensemble::random_complex(n, &mut ensemble::rng(seed))).unwrap();
        assert!(!similar_to_conjugate(&h, &tol).unwrap().similar);
        assert!(matches!(construct_metric(&h, &tol), Err(Error::NotSimilarToConjugate { .. })));
    }
}

#[test]
fn krein_product_is_conserved() {
    let tol = Tolerance::default();
    for seed in 0..40 {
        let (h, g) = theorem_one_pair(2 * seed);
        assert!(check_pseudo_with(&h, &g, &tol).unwrap().is_certified());
        let mut rng = ensemble::rng(9000 + seed);
        let x0 = CVector::from_fn(h.n(), |_, _| ensemble::complex_normal(&mut rng));
        let before = krein_product(&x0, &x0, &g).unwrap().re;
        let a = h.generator();
        for t in [0.1, 1.0] {
            let x = evolve(&a, &x0, t).unwrap();
            let after = krein_product(&x, &x, &g).unwrap().re;
            assert!((after - before).abs() <= 1e-8 * (1.0 + before.abs()), "seed {seed}, t {t}");
        }
    }
}

#[test]
fn pseudo_hermitian_implies_generalized_parity() {
    let tol = Tolerance::default();
    for seed in 1..=20 {
        let (h, _) = pt_case(seed);
        if seed % 5 == 0 {
            continue;
        }
        let w = find_generalized_parity(&h, &tol).unwrap().expect("a parity exists");
        assert!(w.residual <= tol.rel, "seed {seed}");
    }
}
