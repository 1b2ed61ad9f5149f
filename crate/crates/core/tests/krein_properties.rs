use pseudoherm::ensemble;
use pseudoherm::kh::{KHParameters, KhFamily};
use pseudoherm::krein::{classify_eigenvalues, count_kinds, strong_stability, sweep, FnFamily, KindCount, KreinKind};
use pseudoherm::{Complex64, ComplexMatrix, Tolerance};

/// `(G⁻¹ S, G)` for random Hermitian `S` and `G`.
fn random_pair(n: usize, seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = ensemble::rng(seed);
    let g = ensemble::random_hermitian(n, &mut rng);
    let s = ensemble::random_hermitian(n, &mut rng);
    let h = g.clone().try_inverse().unwrap() * s;
    (ComplexMatrix::new(h).unwrap(), ComplexMatrix::new(g).unwrap())
}

fn scaled(g: &ComplexMatrix, c: f64) -> ComplexMatrix {
    ComplexMatrix::new(g.as_matrix() * Complex64::new(c, 0.0)).unwrap()
}

#[test]
fn kinds_scale_and_flip_with_metric() {
    let tol = Tolerance::default();
    for seed in 0..60 {
        let (h, g) = random_pair(2 + (seed as usize % 4), seed);
        let base: Vec<KreinKind> = classify_eigenvalues(&h, &g, &tol).unwrap().iter().map(|c| c.kind).collect();
        for c in [0.01, 3.0, 250.0] {
            let kinds: Vec<KreinKind> =
                classify_eigenvalues(&h, &scaled(&g, c), &tol).unwrap().iter().map(|c| c.kind).collect();
            assert_eq!(kinds, base, "seed {seed}, c {c}");
        }
        let flipped: Vec<KreinKind> =
            classify_eigenvalues(&h, &scaled(&g, -1.0), &tol).unwrap().iter().map(|c| c.kind).collect();
        let expected: Vec<KreinKind> = base.iter().map(|k| k.flipped()).collect();
        assert_eq!(flipped, expected, "seed {seed}");
    }
}

#[test]
fn counting_matches_inertia() {
    let tol = Tolerance::default();
    let mut checked = 0;
    let mut seed = 0;
    while checked < 50 {
        seed += 1;
        let (h, g) = random_pair(2 + (seed as usize % 3), seed);
        let cls = classify_eigenvalues(&h, &g, &tol).unwrap();
        if let KindCount::Applicable { consistent, .. } = count_kinds(&cls, &g, &tol).unwrap() {
            assert!(consistent, "seed {seed}");
            checked += 1;
        }
    }
}

#[test]
fn stable_point_gives_quiet_constant_sweep() {
    let tol = Tolerance::default();
    for seed in 0..40 {
        let (h, g) = random_pair(3, 1000 + seed);
        if !strong_stability(&h, &g, &tol).unwrap() {
            continue;
        }
        let family = FnFamily {
            h: |_| Ok(h.clone()),
            g: |_| Ok(g.clone()),
        };
        assert!(sweep(&family, 0.0, 1.0, 4, &tol).unwrap().collisions.is_empty());
    }
}

#[test]
fn kinds_persist_between_events() {
    let family = KhFamily::new(KHParameters::standard(0.0)).unwrap();
    let report = sweep(&family, 2.3, 2.7, 81, &Tolerance::default()).unwrap();
    let event = report.collisions[0].parameter_value;
    for w in 0..report.parameter_grid.len() - 1 {
        let (p0, p1) = (report.parameter_grid[w], report.parameter_grid[w + 1]);
        if p0 <= event && event <= p1 {
            continue;
        }
        for t in 0..2 {
            assert_eq!(report.trajectories[w][t].1, report.trajectories[w + 1][t].1, "step {w}");
        }
    }
}

#[test]
fn same_sign_modes_pass_without_breaking() {
    // Two first-kind eigenvalues cross at p = 0 without leaving the real axis.
    let family = FnFamily {
        h: |p: f64| ComplexMatrix::from_real_diagonal(&[p, -p]),
        g: |_| Ok(ComplexMatrix::identity(2)),
    };
    let report = sweep(&family, -1.0, 1.0, 8, &Tolerance::default()).unwrap();
    assert!(report.collisions.is_empty());
}
