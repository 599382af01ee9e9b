//! Shared helpers for the integration suites: independent floating-point
//! oracles and seeded random instance generators. Nothing here calls
//! back into the exact code paths it is used to check.

#![allow(dead_code)]

use num_traits::Zero;
use rand::Rng;
use symfold_core::rational::{self, rat, Rat};
use symfold_core::{
    from_atoms, CellSpace, Element, Projection, Refinement, Refiner, SpectralDistribution,
};

/// Adaptive composite Simpson quadrature, refined until two successive
/// levels agree to ~1e-13 relative.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let eval = |n: usize| -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let x = a + h * i as f64;
            acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    };
    let mut n = 64;
    let mut prev = eval(n);
    loop {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).abs() <= 1e-13 * prev.abs().max(1.0) || n >= (1 << 16) {
            return cur;
        }
        prev = cur;
    }
}

/// Independent floating-point moment of a distribution: direct atom
/// summation plus numeric quadrature over each density piece. Returns
/// the signed value together with the summation scale (the total of the
/// term magnitudes), which bounds the conditioning of the sum.
pub fn float_moment(d: &SpectralDistribution, k: u32) -> (f64, f64) {
    let mut acc = 0.0;
    let mut scale = 0.0;
    for (v, m) in d.atoms() {
        let term = rational::to_f64(v).powi(k as i32) * rational::to_f64(m);
        acc += term;
        scale += term.abs();
    }
    for (lo, hi, h) in d.density() {
        let term = rational::to_f64(h)
            * simpson(|t| t.powi(k as i32), rational::to_f64(lo), rational::to_f64(hi));
        acc += term;
        scale += term.abs();
    }
    (acc, scale)
}

/// Agreement within relative 1e-9, measured against the conditioning of
/// the computation (cancellation in the exact sum is not penalized
/// beyond what f64 can resolve).
pub fn close_to(exact: &Rat, float: f64, scale: f64) -> bool {
    let e = rational::to_f64(exact);
    (e - float).abs() <= 1e-9 * e.abs().max(scale).max(1.0)
}

/// A random rational `num/den` with `num` in `[-max_num, max_num]`,
/// nonzero when `nonzero` is set.
pub fn rand_rat(rng: &mut impl Rng, max_num: i64, max_den: i64, nonzero: bool) -> Rat {
    loop {
        let num = rng.gen_range(-max_num..=max_num);
        if nonzero && num == 0 {
            continue;
        }
        let den = rng.gen_range(1..=max_den);
        return rat(num, den);
    }
}

/// Random positive masses summing exactly to `budget * used/16` for a
/// random `used` in `1..=16`.
pub fn rand_masses(rng: &mut impl Rng, count: usize, budget: &Rat) -> Vec<Rat> {
    let used = rat(rng.gen_range(1..=16), 16);
    let weights: Vec<i64> = (0..count).map(|_| rng.gen_range(1..=16)).collect();
    let total: i64 = weights.iter().sum();
    weights
        .iter()
        .map(|w| budget * &used * rat(*w, total))
        .collect()
}

/// A random step element with at most `max_atoms` distinct values and
/// support dimension at most `budget`, on a fresh unit space.
pub fn random_step_element(
    rng: &mut impl Rng,
    max_atoms: usize,
    budget: &Rat,
) -> (CellSpace, Element) {
    let count = rng.gen_range(1..=max_atoms);
    let masses = rand_masses(rng, count, budget);
    let atoms: Vec<(Rat, Rat)> = masses
        .into_iter()
        .map(|m| (rand_rat(rng, 8, 8, true), m))
        .collect();
    let space = CellSpace::new(rational::one()).unwrap();
    let (space, _, x) = from_atoms(&space, &atoms).unwrap();
    (space, x)
}

/// A random trace-zero step element: the last atom balances the trace.
/// The support dimension never exceeds `budget`.
pub fn random_trace_zero(
    rng: &mut impl Rng,
    max_atoms: usize,
    budget: &Rat,
) -> (CellSpace, Element) {
    loop {
        let count = rng.gen_range(2..=max_atoms.max(2));
        let masses = rand_masses(rng, count, budget);
        let mut atoms: Vec<(Rat, Rat)> = masses[..count - 1]
            .iter()
            .map(|m| (rand_rat(rng, 8, 8, true), m.clone()))
            .collect();
        let trace: Rat = atoms.iter().map(|(v, m)| v * m).sum();
        let balance = -trace / &masses[count - 1];
        atoms.push((balance, masses[count - 1].clone()));
        let space = CellSpace::new(rational::one()).unwrap();
        let (space, _, x) = from_atoms(&space, &atoms).unwrap();
        if symfold_core::quasitrace(&space, &x).unwrap().is_zero() {
            return (space, x);
        }
    }
}

/// A random trace-zero step element with full support (every cell
/// carries a nonzero value).
pub fn random_full_support_trace_zero(rng: &mut impl Rng, max_atoms: usize) -> (CellSpace, Element) {
    loop {
        let count = rng.gen_range(2..=max_atoms.max(2));
        let weights: Vec<i64> = (0..count).map(|_| rng.gen_range(1..=16)).collect();
        let total: i64 = weights.iter().sum();
        let masses: Vec<Rat> = weights.iter().map(|w| rat(*w, total)).collect();
        let mut atoms: Vec<(Rat, Rat)> = masses[..count - 1]
            .iter()
            .map(|m| (rand_rat(rng, 8, 8, true), m.clone()))
            .collect();
        let trace: Rat = atoms.iter().map(|(v, m)| v * m).sum();
        let balance = -trace / &masses[count - 1];
        if balance.is_zero() {
            continue;
        }
        atoms.push((balance, masses[count - 1].clone()));
        let space = CellSpace::new(rational::one()).unwrap();
        let (space, _, x) = from_atoms(&space, &atoms).unwrap();
        let support = symfold_core::support(&x);
        if support.dimension(&space).unwrap() == rational::one()
            && symfold_core::quasitrace(&space, &x).unwrap().is_zero()
        {
            return (space, x);
        }
    }
}

/// Places atoms into cells outside `avoid`, walking the space in order.
/// Returns the refined space, the refinement and the new element.
pub fn place_atoms(
    space: &CellSpace,
    avoid: &Projection,
    atoms: &[(Rat, Rat)],
) -> (CellSpace, Refinement, Element) {
    let mut rf = Refiner::new(space.clone());
    let mut queue: Vec<_> = space
        .cell_ids()
        .filter(|id| !avoid.contains(*id))
        .collect();
    queue.reverse();
    let mut pairs = Vec::new();
    for (value, mass) in atoms {
        let mut need = mass.clone();
        while !need.is_zero() {
            let cell = *queue.last().expect("not enough free mass for placement");
            let have = rf.space().mass_of(cell).unwrap().clone();
            if have <= need {
                pairs.push((cell, (value.clone(), Rat::zero())));
                need -= have;
                queue.pop();
            } else {
                let (left, right) = rf.take_mass(cell, &need).unwrap();
                pairs.push((left, (value.clone(), Rat::zero())));
                *queue.last_mut().unwrap() = right.unwrap();
                need = Rat::zero();
            }
        }
    }
    let (new_space, refinement) = rf.finish();
    let v = new_space.version();
    (new_space, refinement, Element::from_pairs(v, pairs))
}

/// Carves a projection of the given dimension from the cells outside
/// `avoid`, in space order.
pub fn carve_projection(
    space: &CellSpace,
    avoid: &Projection,
    dim: &Rat,
) -> (CellSpace, Refinement, Projection) {
    let (new_space, refinement, marker) =
        place_atoms(space, avoid, &[(rational::one(), dim.clone())]);
    let proj = Projection::try_from_element(&marker).unwrap();
    (new_space, refinement, proj)
}
