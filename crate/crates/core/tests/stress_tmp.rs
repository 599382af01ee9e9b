//! throwaway stress run (deleted before finalizing)
mod common;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symfold_core::rational::{one, rat, Rat};
use symfold_core::*;

#[test]
#[ignore]
fn stress_decompose_many_seeds() {
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15));
        for i in 0..40 {
            let budget = match i % 4 {
                0 => rat(63, 64),
                1 => rat(1, 64),
                2 => rat(31, 32),
                _ => rat(1, 2),
            };
            let (space, x) = random_trace_zero(&mut rng, 12, &budget);
            let d = three_symmetric(&space, &x).unwrap_or_else(|e| panic!("seed {seed} i {i}: {e}"));
            assert!(d.report.is_empty(), "seed {seed} i {i}: {:?}", d.report.failures);
        }
        // full support through stabilization
        let (space, x) = random_full_support_trace_zero(&mut rng, 9);
        let d = stabilize_decompose(&space, &x).unwrap();
        assert!(d.report.is_empty(), "seed {seed}: {:?}", d.report.failures);
    }
}

#[test]
#[ignore]
fn stress_local_folding_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    for i in 0..400 {
        // many duplicate values to exercise tie grouping
        let steps = rng.gen_range(1..=20usize);
        let masses = rand_masses(&mut rng, steps, &rat(1, 6));
        let atoms: Vec<(Rat, Rat)> = masses
            .into_iter()
            .map(|m| (rat(rng.gen_range(1..=3), rng.gen_range(1..=2)), m))
            .collect();
        let space = CellSpace::new(one()).unwrap();
        let (space, _, x) = from_atoms(&space, &atoms).unwrap();
        let qx = quasitrace(&space, &x).unwrap();
        let dq = rat(rng.gen_range(1..=10), 64);
        let beta = &qx / &dq;
        let (space, r, q) = carve_projection(&space, &support(&x), &dq);
        let x = r.apply_element(&x).unwrap();
        let p = Projection::full(&space);
        let (s2, r2, phi) = local_folding(&space, &x, &q, &beta, &p).unwrap();
        assert!(validate_folding(&s2, &phi).unwrap().is_empty(), "i {i}");
        assert_eq!(phi.folded_x().unwrap(), r2.apply_element(&x).unwrap(), "i {i}");
    }
}

#[test]
#[ignore]
fn stress_small_packing_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(991);
    for i in 0..400 {
        let (space, x) = random_step_element(&mut rng, 10, &rat(9, 16));
        let sup = support(&x);
        let p = sup.complement(&space);
        let dp = p.dimension(&space).unwrap();
        // tiny Q forces many blocks
        let dq = &dp * &rat(1, rng.gen_range(2..=64));
        let (space, r, q) = carve_projection(&space, &sup, &dq);
        let x = r.apply_element(&x).unwrap();
        let p = r.apply_projection(&p).unwrap();
        let (s2, r2, pack) = small_packing(&space, &x, &p, &q).unwrap();
        let x2 = r2.apply_element(&x).unwrap();
        let mut rhs = linear_combine(&one(), &pack.a1, &one(), &pack.a2).unwrap();
        rhs = linear_combine(&one(), &rhs, &-one(), &pack.b1).unwrap();
        rhs = linear_combine(&one(), &rhs, &-one(), &pack.b2).unwrap();
        rhs = linear_combine(&one(), &rhs, &one(), &pack.y).unwrap();
        assert_eq!(rhs, x2, "i {i}");
        assert!(equivalent(&s2, &pack.a1, &s2, &pack.b1).unwrap(), "i {i}");
        assert!(equivalent(&s2, &pack.a2, &s2, &pack.b2).unwrap(), "i {i}");
    }
}
