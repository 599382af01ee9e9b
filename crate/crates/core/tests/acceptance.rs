//! Acceptance suite: nine exact-identity criteria, each with a pinned
//! runtime budget, printed one pass/fail line per criterion. Every exact
//! moment computed along the way is logged and replayed against an
//! independent floating-point quadrature in the final criterion.

mod common;

use common::{
    carve_projection, close_to, float_moment, place_atoms, rand_masses, rand_rat,
    random_full_support_trace_zero, random_step_element, random_trace_zero,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};
use symfold_core::rational::{one, pow, rat, rat_int, Rat};
use symfold_core::*;

// the glob brings in the crate's Result alias; tests use the std one
use std::result::Result;

struct MomentLog {
    entries: Vec<(SpectralDistribution, u32, Rat)>,
}

impl MomentLog {
    fn new() -> Self {
        MomentLog { entries: Vec::new() }
    }

    fn push(&mut self, d: SpectralDistribution, k: u32, exact: Rat) {
        self.entries.push((d, k, exact));
    }
}

struct Criterion {
    name: &'static str,
    budget: Duration,
}

type CriterionBody = Box<dyn FnOnce(&mut MomentLog) -> Result<(), String>>;

fn run(
    c: Criterion,
    log: &mut MomentLog,
    body: impl FnOnce(&mut MomentLog) -> Result<(), String>,
) -> Result<(), String> {
    let start = Instant::now();
    let outcome = body(log);
    let elapsed = start.elapsed();
    let within = elapsed <= c.budget;
    match (&outcome, within) {
        (Ok(()), true) => {
            println!("PASS  {:<28} ({:?} <= {:?})", c.name, elapsed, c.budget);
            Ok(())
        }
        (Ok(()), false) => {
            println!("FAIL  {:<28} overran the budget: {:?} > {:?}", c.name, elapsed, c.budget);
            Err(format!("{}: runtime {:?} exceeded {:?}", c.name, elapsed, c.budget))
        }
        (Err(msg), _) => {
            println!("FAIL  {:<28} {}", c.name, msg);
            Err(format!("{}: {}", c.name, msg))
        }
    }
}

/// 1. Mediator moments: q(M^k) = 1/(k+1) for k = 1..20.
fn criterion_mediator(log: &mut MomentLog) -> Result<(), String> {
    let space = CellSpace::new(one()).map_err(|e| e.to_string())?;
    let m = mediator(&space, &Projection::full(&space)).map_err(|e| e.to_string())?;
    let d = distribution(&space, &m).map_err(|e| e.to_string())?;
    for k in 1..=20u32 {
        let got = moment(&space, &m, k).map_err(|e| e.to_string())?;
        let want = rat(1, i64::from(k) + 1);
        if got != want {
            return Err(format!("q(M^{k}) = {got}, expected {want}"));
        }
        log.push(d.clone(), k, got);
    }
    Ok(())
}

/// 2. The gamma-folding moment identities over 50 seeded instances.
fn criterion_gamma(log: &mut MomentLog) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f01);
    for instance in 0..50 {
        // dims p, q with 2p + 2q <= 1; type condition beta = alpha p / q
        let p_dim = rat(rng.gen_range(1..=8), 64);
        let q_dim = rat(rng.gen_range(1..=8), 64);
        let alpha = {
            let n = rng.gen_range(1..=6);
            let d = rng.gen_range(1..=4);
            rat(n, d)
        };
        let beta = &alpha * &p_dim / &q_dim;
        let space = CellSpace::new(one()).map_err(|e| e.to_string())?;
        let none = Projection::empty(0);
        let (space, _, p1) = carve_projection(&space, &none, &p_dim);
        let (space, r, p2) = carve_projection(&space, &p1, &q_dim);
        let p1 = r.apply_projection(&p1).unwrap();
        let used = p1.join(&p2);
        let (space, r, p3) = carve_projection(&space, &used, &p_dim);
        let p1 = r.apply_projection(&p1).unwrap();
        let p2 = r.apply_projection(&p2).unwrap();
        let used = p1.join(&p2).join(&p3);
        let (space, r, p4) = carve_projection(&space, &used, &q_dim);
        let p1 = r.apply_projection(&p1).unwrap();
        let p2 = r.apply_projection(&p2).unwrap();
        let p3 = r.apply_projection(&p3).unwrap();
        let pi = Superprojection::new(&space, p1, p2, p3, p4).map_err(|e| e.to_string())?;
        let phi = gamma_folding(&space, &pi, &alpha, &beta).map_err(|e| e.to_string())?;
        let report = validate_folding(&space, &phi).map_err(|e| e.to_string())?;
        if !report.is_empty() {
            return Err(format!("instance {instance}: validation failed: {:?}", report.violations));
        }
        let a_dim = q_dim.clone(); // D(P2)
        let b_dim = p_dim.clone(); // D(P1)
        let lambda = &a_dim / &alpha;
        let ab = &alpha + &beta;
        for k in 1..=12u32 {
            let kp1 = rat_int(i64::from(k) + 1);
            let want_av = &lambda * &pow(&ab, k + 1) / &kp1;
            let sign = if k % 2 == 0 { rat_int(1) } else { rat_int(-1) };
            let want_bw = sign * (pow(&alpha, k) * &a_dim + pow(&beta, k) * &b_dim) / &kp1;
            for (member, want) in [
                (&phi.a_list()[0], &want_av),
                (&phi.b_list()[0], &want_av),
                (&phi.a_list()[1], &want_bw),
                (&phi.b_list()[1], &want_bw),
            ] {
                let got = moment(&space, member, k).map_err(|e| e.to_string())?;
                if got != *want {
                    return Err(format!(
                        "instance {instance}, k={k}: moment {got}, expected {want}"
                    ));
                }
                log.push(distribution(&space, member).unwrap(), k, got);
            }
        }
    }
    Ok(())
}

/// 3. Moment-quantile identity over 100 seeded step elements.
fn criterion_moment_quantile(log: &mut MomentLog) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f03);
    for instance in 0..100 {
        let (space, x) = random_step_element(&mut rng, 32, &rat(63, 64));
        let w = quantile(&space, &x).map_err(|e| e.to_string())?;
        let d = distribution(&space, &x).unwrap();
        for k in 1..=10u32 {
            let lhs = moment(&space, &x, k).map_err(|e| e.to_string())?;
            let rhs = quantile_moment(&w, k).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!(
                    "instance {instance}, k={k}: moment {lhs} != quantile moment {rhs}"
                ));
            }
            log.push(d.clone(), k, lhs);
        }
    }
    Ok(())
}

fn random_step_fn(rng: &mut impl Rng, pieces: usize) -> StepFunction {
    let count = rng.gen_range(1..=pieces);
    let masses = rand_masses(rng, count, &one());
    let mut spans = Vec::new();
    let mut cursor = rat_int(0);
    for m in &masses {
        spans.push((cursor.clone(), &cursor + m, rand_rat(rng, 6, 4, false)));
        cursor += m;
    }
    // pad with zero to cover [0, 1]
    if cursor < one() {
        spans.push((cursor, one(), rat_int(0)));
    }
    StepFunction::from_spans(spans).unwrap()
}

/// 4. Riemann calculus laws over 100 seeded instances.
fn criterion_calculus(log: &mut MomentLog) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f04);
    for instance in 0..100 {
        let f = random_step_fn(&mut rng, 6);
        let g = random_step_fn(&mut rng, 6);
        let alpha = rand_rat(&mut rng, 5, 3, false);
        // a randomly pre-cut space so scales differ between instances
        let space = CellSpace::new(one()).unwrap();
        let cut = rat(rng.gen_range(1..=63), 64);
        let (space, _) = space.split_mass(space.cell_ids().next().unwrap(), &cut).unwrap();
        let cells: Vec<_> = space.cell_ids().collect();
        let scale = make_scale(&space, &cells, Projection::empty(space.version())).unwrap();

        let (s1, _, sc1, ef) = riemann_integral(&space, &scale, &f).map_err(|e| e.to_string())?;
        let (s2, r2, sc2, eg) = riemann_integral(&s1, &sc1, &g).map_err(|e| e.to_string())?;
        let ef2 = r2.apply_element(&ef).unwrap();
        let (s3, r3, sc3, esum) =
            riemann_integral(&s2, &sc2, &f.add(&g).unwrap()).map_err(|e| e.to_string())?;
        let combined = linear_combine(
            &one(),
            &r3.apply_element(&ef2).unwrap(),
            &one(),
            &r3.apply_element(&eg).unwrap(),
        )
        .unwrap();
        if combined != esum {
            return Err(format!("instance {instance}: additivity failed"));
        }
        // homogeneity
        let (s4, r4, _, escaled) =
            riemann_integral(&s3, &sc3, &f.scale_values(&alpha)).map_err(|e| e.to_string())?;
        let ef4 = r4.apply_element(&r3.apply_element(&ef2).unwrap()).unwrap();
        if element::scale_element(&alpha, &ef4) != escaled {
            return Err(format!("instance {instance}: homogeneity failed"));
        }
        // power identity via moments
        let d = distribution(&s4, &ef4).unwrap();
        for k in 1..=8u32 {
            let lhs = moment(&s4, &ef4, k).unwrap();
            let rhs = f.pow_values(k).integral();
            if lhs != rhs {
                return Err(format!("instance {instance}, k={k}: power identity failed"));
            }
            log.push(d.clone(), k, lhs);
        }
        // norm bound
        if sup_norm(&ef4) > f.sup_abs() {
            return Err(format!("instance {instance}: norm bound failed"));
        }
        // a.e. insensitivity: redundant breakpoints change nothing
        let mut rebroken_spans = Vec::new();
        for (w, v) in f.breaks().windows(2).zip(f.values()) {
            let mid = (&w[0] + &w[1]) / rat_int(2);
            rebroken_spans.push((w[0].clone(), mid.clone(), v.clone()));
            rebroken_spans.push((mid, w[1].clone(), v.clone()));
        }
        let rebroken = StepFunction::from_spans(rebroken_spans).unwrap();
        let (_, _, _, ea) = riemann_integral(&space, &scale, &f).unwrap();
        let (_, _, _, eb) = riemann_integral(&space, &scale, &rebroken).unwrap();
        if ea != eb {
            return Err(format!("instance {instance}: a.e. insensitivity failed"));
        }
        // Darboux bounds against a random partition bracket the integral
        // and their traces are the scalar Darboux sums
        let mut partition = vec![rat_int(0), one()];
        for _ in 0..rng.gen_range(0..4) {
            partition.push(rat(rng.gen_range(1..=31), 32));
        }
        partition.sort();
        partition.dedup();
        let (sd, _, _, lo, hi) = darboux_bounds(&space, &scale, &f, &partition).unwrap();
        let q_lo = quasitrace(&sd, &lo).unwrap();
        let q_hi = quasitrace(&sd, &hi).unwrap();
        let exact = f.integral();
        if !(q_lo <= exact && exact <= q_hi) {
            return Err(format!("instance {instance}: Darboux bracket failed"));
        }
        let mut scalar_lo = rat_int(0);
        let mut scalar_hi = rat_int(0);
        for w in partition.windows(2) {
            let (inf, sup) = f.inf_sup_on(&w[0], &w[1]);
            scalar_lo += inf * (&w[1] - &w[0]);
            scalar_hi += sup * (&w[1] - &w[0]);
        }
        if q_lo != scalar_lo || q_hi != scalar_hi {
            return Err(format!("instance {instance}: Darboux traces differ from scalar sums"));
        }
    }
    Ok(())
}

/// 5. Local Folding over 50 seeded instances, up to 64 quantile steps.
fn criterion_local_folding(log: &mut MomentLog) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f05);
    for instance in 0..50 {
        let steps = rng.gen_range(1..=64usize);
        let masses = rand_masses(&mut rng, steps, &rat(1, 5));
        let atoms: Vec<(Rat, Rat)> = masses
            .into_iter()
            .map(|m| {
                let v = rat(rng.gen_range(1..=12), rng.gen_range(1..=4));
                (v, m)
            })
            .collect();
        let space = CellSpace::new(one()).unwrap();
        let (space, _, x) = from_atoms(&space, &atoms).unwrap();
        let qx = quasitrace(&space, &x).unwrap();
        let dq = rat(rng.gen_range(1..=12), 64);
        let beta = &qx / &dq;
        let (space, r, q) = carve_projection(&space, &support(&x), &dq);
        let x = r.apply_element(&x).unwrap();
        let p = Projection::full(&space);
        let (s2, r2, phi) =
            local_folding(&space, &x, &q, &beta, &p).map_err(|e| e.to_string())?;
        let report = validate_folding(&s2, &phi).map_err(|e| e.to_string())?;
        if !report.is_empty() {
            return Err(format!("instance {instance}: {:?}", report.violations));
        }
        let x2 = r2.apply_element(&x).unwrap();
        let q2 = r2.apply_projection(&q).unwrap();
        let p2 = r2.apply_projection(&p).unwrap();
        if phi.folded_x().unwrap() != x2 {
            return Err(format!("instance {instance}: A+B != X"));
        }
        if phi.folded_y().unwrap() != element::scale_element(&beta, &q2.to_element()) {
            return Err(format!("instance {instance}: V+W != beta*Q"));
        }
        if !phi.support().is_sub_of(&p2) {
            return Err(format!("instance {instance}: support escapes P"));
        }
        for k in 1..=4u32 {
            for member in phi.a_list().iter().chain(phi.b_list()) {
                let got = moment(&s2, member, k).unwrap();
                log.push(distribution(&s2, member).unwrap(), k, got);
            }
        }
    }
    Ok(())
}

/// 6. Small Packing conditions (i)-(vii) over 50 seeded instances.
fn criterion_small_packing(log: &mut MomentLog) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f06);
    for instance in 0..50 {
        let (space, x) = random_step_element(&mut rng, 12, &rat(1, 2));
        let sup = support(&x);
        let p = sup.complement(&space);
        let dq = {
            let dp = p.dimension(&space).unwrap();
            &dp * &rat(rng.gen_range(1..=8), 32)
        };
        let (space, r, q) = carve_projection(&space, &sup, &dq);
        let x = r.apply_element(&x).unwrap();
        let p = r.apply_projection(&p).unwrap();
        let (s2, r2, pack) = small_packing(&space, &x, &p, &q).map_err(|e| e.to_string())?;
        let x2 = r2.apply_element(&x).unwrap();
        let p2 = r2.apply_projection(&p).unwrap();
        let q2 = r2.apply_projection(&q).unwrap();
        // (vii)
        let mut rhs = linear_combine(&one(), &pack.a1, &one(), &pack.a2).unwrap();
        rhs = linear_combine(&one(), &rhs, &rat_int(-1), &pack.b1).unwrap();
        rhs = linear_combine(&one(), &rhs, &rat_int(-1), &pack.b2).unwrap();
        rhs = linear_combine(&one(), &rhs, &one(), &pack.y).unwrap();
        if rhs != x2 {
            return Err(format!("instance {instance}: reconstruction identity failed"));
        }
        // (ii)
        for (a, b) in [
            (&pack.a1, &pack.a2),
            (&pack.b1, &pack.b2),
            (&pack.a1, &pack.b1),
            (&pack.a2, &pack.b2),
        ] {
            if !orthogonal(a, b).unwrap() {
                return Err(format!("instance {instance}: orthogonality failed"));
            }
        }
        // (iii)
        if !equivalent(&s2, &pack.a1, &s2, &pack.b1).unwrap()
            || !equivalent(&s2, &pack.a2, &s2, &pack.b2).unwrap()
        {
            return Err(format!("instance {instance}: equivalence failed"));
        }
        // (iv)
        for e in [&pack.a1, &pack.a2, &pack.b1] {
            if !support(e).is_orthogonal_to(&p2) {
                return Err(format!("instance {instance}: A1/A2/B1 not orthogonal to P"));
            }
        }
        // (v) Y is a step element under Q
        if !pack.y.is_step() || !support(&pack.y).is_sub_of(&q2) {
            return Err(format!("instance {instance}: Y escapes Q"));
        }
        // (vi) B2 P = Y
        let b2_under_p = Element::from_pairs(
            s2.version(),
            pack.b2
                .coeffs()
                .filter(|(id, _)| p2.contains(*id))
                .map(|(id, pr)| (id, pr.clone()))
                .collect(),
        );
        if b2_under_p != pack.y {
            return Err(format!("instance {instance}: B2 under P is not Y"));
        }
        for k in 1..=4u32 {
            let got = moment(&s2, &pack.a1, k).unwrap();
            log.push(distribution(&s2, &pack.a1).unwrap(), k, got);
        }
    }
    Ok(())
}

/// 7. Decomposition end to end: 100 seeded trace-zero inputs with support
///    at most 63/64, plus 10 full-support inputs through stabilization.
fn criterion_decompose(log: &mut MomentLog) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f07);
    for instance in 0..100 {
        // occasionally push the support close to the 63/64 cap
        let budget = if instance % 25 == 25 - 1 { rat(63, 64) } else { rat(3, 4) };
        let (space, x) = random_trace_zero(&mut rng, 10, &budget);
        let d = three_symmetric(&space, &x).map_err(|e| e.to_string())?;
        if !d.report.is_empty() {
            return Err(format!("instance {instance}: {:?}", d.report.failures));
        }
        let check = verify_decomposition(&d.space, &d.input, &d.summands).unwrap();
        if !check.is_empty() {
            return Err(format!("instance {instance}: re-verification failed"));
        }
        let kmax = 2 * (distribution(&d.space, &d.input).unwrap().atom_count() as u32) + 1;
        for (i, s) in d.summands.iter().enumerate() {
            let dd = distribution(&d.space, s).unwrap();
            let mut sample = vec![1u32, 3, kmax];
            sample.dedup();
            for k in sample {
                let got = moment(&d.space, s, k).unwrap();
                if !got.is_zero() {
                    return Err(format!("instance {instance}: summand {i} odd moment {k} != 0"));
                }
                log.push(dd.clone(), k, got);
            }
        }
    }
    for instance in 0..10 {
        let (space, x) = random_full_support_trace_zero(&mut rng, 8);
        let d = stabilize_decompose(&space, &x).map_err(|e| e.to_string())?;
        if !d.report.is_empty() {
            return Err(format!("full-support instance {instance}: {:?}", d.report.failures));
        }
    }
    Ok(())
}

/// 8. The predicate characterizations: equivalence iff matching moments,
///    symmetry iff vanishing odd moments, and orthogonal cancellation.
fn criterion_predicates(_log: &mut MomentLog) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f08);
    // equivalence vs moments, 200 pairs
    for instance in 0..200 {
        let equal = instance % 2 == 0;
        let count = rng.gen_range(1..=6usize);
        let masses = rand_masses(&mut rng, count, &rat(1, 2));
        let atoms: Vec<(Rat, Rat)> = masses
            .iter()
            .map(|m| (rand_rat(&mut rng, 6, 4, false), m.clone()))
            .collect();
        let space = CellSpace::new(one()).unwrap();
        let (s1, _, a) = from_atoms(&space, &atoms).unwrap();
        let b_atoms: Vec<(Rat, Rat)> = if equal {
            // the same distribution, split and reversed
            let mut halves: Vec<(Rat, Rat)> = atoms
                .iter()
                .flat_map(|(v, m)| {
                    let h = m / rat_int(2);
                    [(v.clone(), h.clone()), (v.clone(), h)]
                })
                .collect();
            halves.reverse();
            halves
        } else {
            let mut t = atoms.clone();
            let (v, m) = t.pop().unwrap();
            t.push((v + rat(1, 7), m));
            t
        };
        let fresh = CellSpace::new(one()).unwrap();
        let (s2, _, b) = place_atoms(&fresh, &Projection::empty(0), &b_atoms);
        let ekv = equivalent(&s1, &a, &s2, &b).unwrap();
        let da = distribution(&s1, &a).unwrap();
        let db = distribution(&s2, &b).unwrap();
        let bound = 2 * ((da.atom_count() + db.atom_count()) as u32);
        let mut moments_agree = true;
        for k in 1..=bound {
            if dist_moment(&da, k).unwrap() != dist_moment(&db, k).unwrap() {
                moments_agree = false;
                break;
            }
        }
        if ekv != moments_agree {
            return Err(format!("pair {instance}: equivalence/moment mismatch"));
        }
        if equal && !ekv {
            return Err(format!("pair {instance}: equal-distribution pair not equivalent"));
        }
    }
    // symmetry vs odd moments
    for instance in 0..200 {
        let symmetric = instance % 2 == 0;
        let count = rng.gen_range(1..=4usize);
        let masses = rand_masses(&mut rng, count, &rat(1, 4));
        let mut atoms: Vec<(Rat, Rat)> = Vec::new();
        for m in &masses {
            let v = rand_rat(&mut rng, 6, 4, true);
            atoms.push((v.clone(), m.clone()));
            if symmetric {
                atoms.push((-v, m.clone()));
            }
        }
        let space = CellSpace::new(one()).unwrap();
        let (s1, _, a) = from_atoms(&space, &atoms).unwrap();
        let d = distribution(&s1, &a).unwrap();
        let kmax = 2 * (d.atom_count() as u32) + 1;
        let mut odd_vanish = true;
        let mut k = 1;
        while k <= kmax {
            if !dist_moment(&d, k).unwrap().is_zero() {
                odd_vanish = false;
                break;
            }
            k += 2;
        }
        if is_spectrally_symmetric(&s1, &a).unwrap() != odd_vanish {
            return Err(format!("symmetry pair {instance}: predicate/moment mismatch"));
        }
        if symmetric && !odd_vanish {
            return Err(format!("symmetry pair {instance}: constructed symmetric input failed"));
        }
    }
    // orthogonal cancellation on 100 quadruples
    for instance in 0..100 {
        let equal = instance % 2 == 0;
        let count = rng.gen_range(1..=3usize);
        let a_masses = rand_masses(&mut rng, count, &rat(1, 8));
        let a_atoms: Vec<(Rat, Rat)> = a_masses
            .iter()
            .map(|m| (rand_rat(&mut rng, 5, 3, true), m.clone()))
            .collect();
        let b_masses = rand_masses(&mut rng, count, &rat(1, 8));
        let b_atoms: Vec<(Rat, Rat)> = b_masses
            .iter()
            .map(|m| (rand_rat(&mut rng, 5, 3, true), m.clone()))
            .collect();
        let space = CellSpace::new(one()).unwrap();
        let (s1, _, a1) = from_atoms(&space, &a_atoms).unwrap();
        let (s2, r2, a2) = place_atoms(&s1, &support(&a1), &a_atoms);
        let a1 = r2.apply_element(&a1).unwrap();
        let used = support(&a1).join(&support(&a2));
        let (s3, r3, b1) = place_atoms(&s2, &used, &b_atoms);
        let a1 = r3.apply_element(&a1).unwrap();
        let a2 = r3.apply_element(&a2).unwrap();
        let used = r3.apply_projection(&used).unwrap().join(&support(&b1));
        let b2_atoms: Vec<(Rat, Rat)> = if equal {
            b_atoms.clone()
        } else {
            let mut t = b_atoms.clone();
            let (v, m) = t.pop().unwrap();
            t.push((v + rat(2, 9), m));
            t
        };
        let (s4, r4, b2) = place_atoms(&s3, &used, &b2_atoms);
        let a1 = r4.apply_element(&a1).unwrap();
        let a2 = r4.apply_element(&a2).unwrap();
        let b1 = r4.apply_element(&b1).unwrap();
        let lhs = equivalent(&s4, &b1, &s4, &b2).unwrap();
        let x1 = linear_combine(&one(), &a1, &one(), &b1).unwrap();
        let x2 = linear_combine(&one(), &a2, &one(), &b2).unwrap();
        let rhs = equivalent(&s4, &x1, &s4, &x2).unwrap();
        if lhs != rhs {
            return Err(format!("cancellation quadruple {instance}: iff failed"));
        }
        if equal != lhs {
            return Err(format!("cancellation quadruple {instance}: expected {equal}"));
        }
    }
    Ok(())
}

/// 9. Float cross-check of every logged exact moment.
fn criterion_float_oracle(log: &mut MomentLog) -> Result<(), String> {
    if log.entries.is_empty() {
        return Err("no moments were logged".to_string());
    }
    let count = log.entries.len();
    for (d, k, exact) in &log.entries {
        let (approx, scale) = float_moment(d, *k);
        if !close_to(exact, approx, scale) {
            return Err(format!(
                "k={k}: exact {} vs float {approx}",
                symfold_core::rational::render(exact)
            ));
        }
    }
    println!("      float oracle replayed {count} moments");
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let mut log = MomentLog::new();
    let mut failures = Vec::new();
    let checks: Vec<(Criterion, CriterionBody)> = vec![
        (
            Criterion { name: "1 mediator moments", budget: Duration::from_millis(100) },
            Box::new(criterion_mediator),
        ),
        (
            Criterion { name: "2 gamma folding identities", budget: Duration::from_secs(1) },
            Box::new(criterion_gamma),
        ),
        (
            Criterion { name: "3 moment-quantile identity", budget: Duration::from_secs(2) },
            Box::new(criterion_moment_quantile),
        ),
        (
            Criterion { name: "4 riemann calculus laws", budget: Duration::from_secs(2) },
            Box::new(criterion_calculus),
        ),
        (
            Criterion { name: "5 local folding", budget: Duration::from_secs(5) },
            Box::new(criterion_local_folding),
        ),
        (
            Criterion { name: "6 small packing", budget: Duration::from_secs(5) },
            Box::new(criterion_small_packing),
        ),
        (
            Criterion { name: "7 three-way decomposition", budget: Duration::from_secs(10) },
            Box::new(criterion_decompose),
        ),
        (
            Criterion { name: "8 predicate characterizations", budget: Duration::from_secs(2) },
            Box::new(criterion_predicates),
        ),
        (
            Criterion { name: "9 float oracle cross-check", budget: Duration::from_secs(5) },
            Box::new(criterion_float_oracle),
        ),
    ];
    for (criterion, body) in checks {
        if let Err(msg) = run(criterion, &mut log, body) {
            failures.push(msg);
        }
    }
    assert!(failures.is_empty(), "acceptance failures:\n{}", failures.join("\n"));
}
