//! Randomized invariants for the information primitives and the
//! maximization engine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relaycap::{maximize_box, JointPmf, OptimizerConfig};

fn random_pmf(rng: &mut ChaCha8Rng) -> JointPmf {
    let sizes = [
        rng.random_range(2..=4usize),
        rng.random_range(2..=4usize),
        rng.random_range(2..=4usize),
    ];
    let atoms: usize = sizes.iter().product();
    let mut probs: Vec<f64> = (0..atoms)
        .map(|_| -(rng.random::<f64>().max(f64::MIN_POSITIVE)).ln())
        .collect();
    let sum: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= sum;
    }
    JointPmf::new(
        vec![("x", sizes[0]), ("y", sizes[1]), ("z", sizes[2])],
        probs,
    )
    .unwrap()
}

#[test]
fn mi_symmetry_and_alphabet_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let pmf = random_pmf(&mut rng);
        let xy = pmf.mutual_information(&["x"], &["y", "z"]).unwrap().bits();
        let yx = pmf.mutual_information(&["y", "z"], &["x"]).unwrap().bits();
        assert!((xy - yx).abs() < 1e-12);
        assert!(xy >= 0.0);
        let nx = pmf.cardinality("x").unwrap();
        let ny = pmf.cardinality("y").unwrap() * pmf.cardinality("z").unwrap();
        let cap = (nx as f64).log2().min((ny as f64).log2());
        assert!(xy <= cap + 1e-12);
    }
}

#[test]
fn mi_chain_rule() {
    // I(X; Y, Z) = I(X; Y) + I(X; Z | Y)
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let pmf = random_pmf(&mut rng);
        let joint = pmf.mutual_information(&["x"], &["y", "z"]).unwrap().bits();
        let split = pmf.mutual_information(&["x"], &["y"]).unwrap().bits()
            + pmf
                .conditional_mutual_information(&["x"], &["z"], &["y"])
                .unwrap()
                .bits();
        assert!((joint - split).abs() < 1e-10, "{joint} vs {split}");
    }
}

#[test]
fn optimizer_dominates_dense_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cfg = OptimizerConfig::default();
    for case in 0..10 {
        let a = rng.random_range(0.5..6.0);
        let b = rng.random_range(0.5..6.0);
        let c = rng.random_range(-1.0..1.0);
        if case % 2 == 0 {
            let f = |x: &[f64]| (a * x[0]).sin() + c * x[0];
            let m = maximize_box(f, &[(0.0, 2.0)], &cfg).unwrap();
            let mut best = f64::NEG_INFINITY;
            for i in 0..200_001 {
                let x = 2.0 * i as f64 / 200_000.0;
                best = best.max(f(&[x]));
            }
            assert!(m.value >= best - 1e-8, "case {case}: {} vs {best}", m.value);
        } else {
            let f = |x: &[f64]| (a * x[0]).sin() * (b * x[1]).cos() + c * x[0] * x[1];
            let m = maximize_box(f, &[(0.0, 2.0), (0.0, 2.0)], &cfg).unwrap();
            let mut best = f64::NEG_INFINITY;
            for i in 0..1001 {
                for j in 0..1001 {
                    let x = [2.0 * i as f64 / 1000.0, 2.0 * j as f64 / 1000.0];
                    best = best.max(f(&x));
                }
            }
            assert!(m.value >= best - 1e-8, "case {case}: {} vs {best}", m.value);
        }
    }
}
