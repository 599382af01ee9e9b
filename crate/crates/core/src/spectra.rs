//! Scalar spectral measures, quantile functions, and the equivalence and
//! symmetry predicates.
//!
//! A distribution is a canonical mixture of rational atoms and a
//! piecewise-constant density. Canonical form makes equality decidable:
//! atoms sorted by value, density pieces re-broken on the union grid of
//! endpoints and merged when contiguous with equal height. Equivalence of
//! elements is structural equality of canonical forms — the model's exact
//! rendering of approximate unitary equivalence.

use crate::cellspace::CellSpace;
use crate::element::Element;
use crate::error::CalcError;
use crate::rational::{self, pow, Rat};
use crate::Result;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Canonical mixture of atoms and a piecewise-constant density.
///
/// Invariants: atom values strictly increasing with positive masses;
/// density pieces `(lo, hi, height)` with `lo < hi`, `height > 0`,
/// non-overlapping, sorted, and maximal (no two contiguous pieces share a
/// height). Total mass (atoms plus density area) equals the owning
/// space's total mass exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralDistribution {
    total_mass: Rat,
    atoms: Vec<(Rat, Rat)>,
    density: Vec<(Rat, Rat, Rat)>,
}

impl SpectralDistribution {
    /// Builds the canonical form from raw atom and density contributions.
    pub fn canonical(
        total_mass: Rat,
        raw_atoms: Vec<(Rat, Rat)>,
        raw_density: Vec<(Rat, Rat, Rat)>,
    ) -> Self {
        let mut atom_map: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (v, m) in raw_atoms {
            if !m.is_zero() {
                *atom_map.entry(v).or_insert_with(Rat::zero) += m;
            }
        }
        atom_map.retain(|_, m| !m.is_zero());

        // Sweep the union grid of endpoints, accumulating heights.
        let mut events: Vec<(Rat, Rat)> = Vec::new(); // (position, height delta)
        for (lo, hi, h) in raw_density {
            if h.is_zero() || lo >= hi {
                continue;
            }
            events.push((lo, h.clone()));
            events.push((hi, -h));
        }
        events.sort_by(|a, b| a.0.cmp(&b.0));
        let mut density: Vec<(Rat, Rat, Rat)> = Vec::new();
        let mut height = Rat::zero();
        let mut i = 0;
        while i < events.len() {
            let pos = events[i].0.clone();
            while i < events.len() && events[i].0 == pos {
                height += &events[i].1;
                i += 1;
            }
            let next = if i < events.len() { Some(events[i].0.clone()) } else { None };
            if let Some(next_pos) = next {
                if !height.is_zero() {
                    match density.last_mut() {
                        Some((_, prev_hi, prev_h)) if *prev_hi == pos && *prev_h == height => {
                            *prev_hi = next_pos;
                        }
                        _ => density.push((pos, next_pos, height.clone())),
                    }
                }
            }
        }
        SpectralDistribution {
            total_mass,
            atoms: atom_map.into_iter().collect(),
            density,
        }
    }

    pub fn total_mass(&self) -> &Rat {
        &self.total_mass
    }

    pub fn atoms(&self) -> &[(Rat, Rat)] {
        &self.atoms
    }

    pub fn density(&self) -> &[(Rat, Rat, Rat)] {
        &self.density
    }

    /// Mass carried by the atoms plus the density area; equals the total
    /// mass by construction for distributions of elements.
    pub fn mass(&self) -> Rat {
        let mut m: Rat = self.atoms.iter().map(|(_, w)| w.clone()).sum();
        for (lo, hi, h) in &self.density {
            m += h * &(hi - lo);
        }
        m
    }

    /// Pushforward under `t -> -t`.
    pub fn mirror(&self) -> SpectralDistribution {
        let atoms = self.atoms.iter().rev().map(|(v, m)| (-v, m.clone())).collect();
        let density = self.density.iter().rev().map(|(lo, hi, h)| (-hi, -lo, h.clone())).collect();
        SpectralDistribution { total_mass: self.total_mass.clone(), atoms, density }
    }

    /// Smallest spectrum point (atoms and density support included).
    pub fn min_value(&self) -> Rat {
        let mut best: Option<Rat> = None;
        if let Some((v, _)) = self.atoms.first() {
            best = Some(v.clone());
        }
        if let Some((lo, _, _)) = self.density.first() {
            best = Some(match best {
                Some(b) => b.min(lo.clone()),
                None => lo.clone(),
            });
        }
        best.unwrap_or_else(Rat::zero)
    }

    pub fn max_value(&self) -> Rat {
        let mut best: Option<Rat> = None;
        if let Some((v, _)) = self.atoms.last() {
            best = Some(v.clone());
        }
        if let Some((_, hi, _)) = self.density.last() {
            best = Some(match best {
                Some(b) => b.max(hi.clone()),
                None => hi.clone(),
            });
        }
        best.unwrap_or_else(Rat::zero)
    }

    /// Number of atoms (sets the finite moment bounds used by the
    /// predicate checks).
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }
}

/// The scalar spectral measure of an element: each constant cell
/// contributes an atom, each genuinely affine cell a uniform density over
/// its value range; absent mass lands in an atom at zero.
pub fn distribution(space: &CellSpace, a: &Element) -> Result<SpectralDistribution> {
    a.check_space(space)?;
    let mut atoms = Vec::new();
    let mut density = Vec::new();
    let mut covered = Rat::zero();
    for (id, (pa, pb)) in a.coeffs() {
        let m = space.mass_of(id)?;
        covered += m;
        if pb.is_zero() {
            atoms.push((pa.clone(), m.clone()));
        } else {
            let end = pa + pb;
            let (lo, hi) = if *pb > Rat::zero() { (pa.clone(), end) } else { (end, pa.clone()) };
            let h = m / &(&hi - &lo);
            density.push((lo, hi, h));
        }
    }
    let residual = space.total_mass() - &covered;
    if !residual.is_zero() {
        atoms.push((Rat::zero(), residual));
    }
    Ok(SpectralDistribution::canonical(space.total_mass().clone(), atoms, density))
}

/// Exact k-th moment of a distribution: `Σ v^k m` over atoms plus
/// `Σ h (r^{k+1} - l^{k+1})/(k+1)` over density pieces.
pub fn dist_moment(d: &SpectralDistribution, k: u32) -> Result<Rat> {
    if k == 0 {
        return Err(CalcError::ZeroMomentOrder);
    }
    let mut q = Rat::zero();
    for (v, m) in &d.atoms {
        q += pow(v, k) * m;
    }
    let kp1 = rational::rat_int(i64::from(k) + 1);
    for (lo, hi, h) in &d.density {
        q += h * &((pow(hi, k + 1) - pow(lo, k + 1)) / &kp1);
    }
    Ok(q)
}

/// The model's exact form of approximate unitary equivalence: identical
/// canonical spectral distributions. Elements may live on different
/// spaces of equal total mass.
pub fn equivalent(
    space_a: &CellSpace,
    a: &Element,
    space_b: &CellSpace,
    b: &Element,
) -> Result<bool> {
    if space_a.total_mass() != space_b.total_mass() {
        return Err(CalcError::TotalMassMismatch {
            left: rational::render(space_a.total_mass()),
            right: rational::render(space_b.total_mass()),
        });
    }
    Ok(distribution(space_a, a)? == distribution(space_b, b)?)
}

/// True iff the distribution equals its pushforward under `t -> -t`.
pub fn is_spectrally_symmetric(space: &CellSpace, a: &Element) -> Result<bool> {
    let d = distribution(space, a)?;
    Ok(d == d.mirror())
}

/// One piece of a quantile function over a half-open mass interval
/// `(t_lo, t_hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantilePiece {
    pub t_lo: Rat,
    pub t_hi: Rat,
    /// value at the left edge (limit from the right at `t_lo`)
    pub v_lo: Rat,
    /// value at `t_hi`; equal to `v_lo` on constant pieces
    pub v_hi: Rat,
}

impl QuantilePiece {
    pub fn is_constant(&self) -> bool {
        self.v_lo == self.v_hi
    }
}

/// The lower quantile function of a distribution: non-decreasing,
/// left-continuous, `ω(0)` the minimum of the spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantileFunction {
    total_mass: Rat,
    value_at_zero: Rat,
    pieces: Vec<QuantilePiece>,
}

impl QuantileFunction {
    pub fn total_mass(&self) -> &Rat {
        &self.total_mass
    }

    pub fn value_at_zero(&self) -> &Rat {
        &self.value_at_zero
    }

    pub fn pieces(&self) -> &[QuantilePiece] {
        &self.pieces
    }

    /// ω(t) for t in (0, total]; ω(0) is the stored left endpoint value.
    pub fn value_at(&self, t: &Rat) -> Rat {
        if t.is_zero() {
            return self.value_at_zero.clone();
        }
        for p in &self.pieces {
            if *t > p.t_lo && *t <= p.t_hi {
                if p.is_constant() {
                    return p.v_lo.clone();
                }
                let span = &p.t_hi - &p.t_lo;
                let frac = (t - &p.t_lo) / span;
                return &p.v_lo + &((&p.v_hi - &p.v_lo) * frac);
            }
        }
        self.pieces.last().map(|p| p.v_hi.clone()).unwrap_or_else(Rat::zero)
    }

    pub fn max_value(&self) -> Rat {
        self.pieces.last().map(|p| p.v_hi.clone()).unwrap_or_else(|| self.value_at_zero.clone())
    }

    /// Step-function view when every piece is constant (quantiles of step
    /// elements). Returns breakpoints/values over `[0, total]`.
    pub fn to_step(&self) -> Option<crate::scales::StepFunction> {
        if self.pieces.iter().any(|p| !p.is_constant()) {
            return None;
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| (p.t_lo.clone(), p.t_hi.clone(), p.v_lo.clone()))
            .collect::<Vec<_>>();
        crate::scales::StepFunction::from_spans(pieces).ok()
    }
}

/// Quantile of a distribution; exposed for reuse by the verifier.
pub fn quantile_of_distribution(d: &SpectralDistribution) -> QuantileFunction {
    // Slice density pieces at atom values so segments never straddle an
    // atom, then walk segments in value order, accumulating mass.
    #[derive(Debug)]
    enum Seg {
        Atom(Rat, Rat),
        Dens(Rat, Rat, Rat),
    }
    let mut segs: Vec<Seg> = Vec::new();
    for (v, m) in &d.atoms {
        segs.push(Seg::Atom(v.clone(), m.clone()));
    }
    for (lo, hi, h) in &d.density {
        let mut cuts: Vec<Rat> = d
            .atoms
            .iter()
            .map(|(v, _)| v.clone())
            .filter(|v| v > lo && v < hi)
            .collect();
        cuts.push(hi.clone());
        let mut cur = lo.clone();
        for c in cuts {
            if c > cur {
                segs.push(Seg::Dens(cur.clone(), c.clone(), h.clone()));
                cur = c;
            }
        }
    }
    segs.sort_by(|x, y| {
        let kx = match x {
            Seg::Atom(v, _) => (v.clone(), 0u8),
            Seg::Dens(lo, _, _) => (lo.clone(), 1u8),
        };
        let ky = match y {
            Seg::Atom(v, _) => (v.clone(), 0u8),
            Seg::Dens(lo, _, _) => (lo.clone(), 1u8),
        };
        kx.cmp(&ky)
    });
    let mut pieces = Vec::new();
    let mut t = Rat::zero();
    for seg in segs {
        match seg {
            Seg::Atom(v, m) => {
                let t_hi = &t + &m;
                pieces.push(QuantilePiece { t_lo: t, t_hi: t_hi.clone(), v_lo: v.clone(), v_hi: v });
                t = t_hi;
            }
            Seg::Dens(lo, hi, h) => {
                let m = &h * &(&hi - &lo);
                let t_hi = &t + &m;
                pieces.push(QuantilePiece { t_lo: t, t_hi: t_hi.clone(), v_lo: lo, v_hi: hi });
                t = t_hi;
            }
        }
    }
    let value_at_zero = d.min_value();
    QuantileFunction { total_mass: d.total_mass.clone(), value_at_zero, pieces }
}

/// The lower quantile of `distribution(a)`.
pub fn quantile(space: &CellSpace, a: &Element) -> Result<QuantileFunction> {
    Ok(quantile_of_distribution(&distribution(space, a)?))
}

/// Exact `∫ ω(t)^k dt` over the piecewise representation.
pub fn quantile_moment(w: &QuantileFunction, k: u32) -> Result<Rat> {
    if k == 0 {
        return Err(CalcError::ZeroMomentOrder);
    }
    let kp1 = rational::rat_int(i64::from(k) + 1);
    let mut q = Rat::zero();
    for p in &w.pieces {
        let len = &p.t_hi - &p.t_lo;
        if p.is_constant() {
            q += pow(&p.v_lo, k) * &len;
        } else {
            let num = pow(&p.v_hi, k + 1) - pow(&p.v_lo, k + 1);
            q += len * &(num / &(&kp1 * &(&p.v_hi - &p.v_lo)));
        }
    }
    Ok(q)
}
