use pseudoherm::ensemble;
use pseudoherm::jordan::jordan_decompose;
use pseudoherm::{Complex64, Tolerance};

fn sorted_blocks(blocks: impl Iterator<Item = (Complex64, usize)>) -> Vec<(i64, i64, usize)> {
    let mut v: Vec<(i64, i64, usize)> = blocks
        .map(|(z, m)| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64, m))
        .collect();
    v.sort();
    v
}

#[test]
fn recovers_constructed_structure() {
    let tol = Tolerance::default();
    for seed in 0..100u64 {
        let mut rng = ensemble::rng(seed);
        let n = 2 + (seed as usize % 7);
        let inst = ensemble::random_jordan_instance(n, 3, 100.0, &mut rng);
        let d = jordan_decompose(&inst.h, &tol).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let got = d.blocks.iter().flat_map(|b| b.sizes.iter().map(move |&m| (b.eigenvalue, m)));
        assert_eq!(sorted_blocks(got), sorted_blocks(inst.blocks.iter().copied()), "seed {seed}");
        for b in &d.blocks {
            let nearest = Complex64::new(b.eigenvalue.re.round(), b.eigenvalue.im.round());
            assert!((b.eigenvalue - nearest).norm() <= 1e-6);
        }
        assert!(d.residual <= 1e-8);
    }
}
