use pseudoherm::kh::{kh_breaking_points, kh_eigensystem, kh_hamiltonian, kh_metric, KHParameters, KhFamily};
use pseudoherm::krein::{classify_eigenvalues, locate_collision, strong_stability, KreinKind};
use pseudoherm::metric::pseudo_residual;
use pseudoherm::{jordan, Complex64, Tolerance};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = KHParameters> {
    let nonzero = (0.01f64..10.0, any::<bool>()).prop_map(|(x, s)| if s { x } else { -x });
    (nonzero, -10.0f64..10.0, -10.0f64..10.0, 0.01f64..10.0, 0.01f64..10.0, -10.0f64..10.0)
        .prop_map(|(k, u10, u20, r1, r2, g)| KHParameters::new(k, u10, u20, r1, r2, g).unwrap())
}

fn pair_distance(a: [Complex64; 2], b: &[Complex64]) -> f64 {
    let straight = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    let crossed = (a[0] - b[1]).norm().max((a[1] - b[0]).norm());
    straight.min(crossed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn closed_form_matches_direct_solve(p in params()) {
        let e = kh_eigensystem(&p).unwrap();
        let h = kh_hamiltonian(&p).unwrap();
        let direct = jordan::eigenvalues(&h).unwrap();
        prop_assert!(pair_distance([e.a1, e.a2], &direct) <= 1e-10 * h.frobenius());
        if e.delta > 0.0 {
            prop_assert!(e.a1.re <= e.a2.re);
            prop_assert_eq!(e.a1.im, 0.0);
        } else if e.delta < 0.0 {
            prop_assert_eq!(e.a2, e.a1.conj());
        }
    }

    #[test]
    fn eigenvector_residual(p in params()) {
        let e = kh_eigensystem(&p).unwrap();
        prop_assert!(e.residual <= 1e-9, "{}", e.residual);
    }

    #[test]
    fn metric_intertwines(p in params()) {
        let h = kh_hamiltonian(&p).unwrap();
        let g = kh_metric(&p).unwrap().matrix;
        prop_assert!(pseudo_residual(&h, &g) <= 1e-12);
    }

    #[test]
    fn metric_ignores_sign_of_k(p in params()) {
        let q = KHParameters { k: -p.k, ..p };
        prop_assert_eq!(kh_metric(&p).unwrap().matrix, kh_metric(&q).unwrap().matrix);
    }
}

#[test]
fn breaking_point_matches_bisection() {
    let fixed = KHParameters::standard(0.0);
    let (_, upper) = kh_breaking_points(&fixed).unwrap();
    let family = KhFamily::new(fixed).unwrap();
    let located = locate_collision(&family, 2.3, 2.7, &Tolerance::default()).unwrap();
    assert!((located - upper).abs() < 1e-6, "{located} vs {upper}");
}

#[test]
fn figure_panels() {
    let tol = Tolerance::default();
    let at = |u20: f64| {
        let p = KHParameters::standard(u20);
        (kh_hamiltonian(&p).unwrap(), kh_metric(&p).unwrap().matrix)
    };
    let (h, g) = at(2.3);
    assert!(strong_stability(&h, &g, &tol).unwrap());
    let kinds: Vec<_> = classify_eigenvalues(&h, &g, &tol).unwrap().iter().map(|c| c.kind).collect();
    assert_eq!(kinds, vec![KreinKind::First, KreinKind::Second]);

    let (h, g) = at(1.0 + 2.5f64.sqrt());
    let cls = classify_eigenvalues(&h, &g, &tol).unwrap();
    assert_eq!(cls.len(), 1, "{cls:?}");
    assert_eq!(cls[0].alg_mult, 2);
    assert_eq!(cls[0].eigenvalue.im, 0.0);

    let (h, g) = at(2.7);
    assert!(!strong_stability(&h, &g, &tol).unwrap());
}
