//! Self-adjoint elements of the model algebra.
//!
//! An [`Element`] assigns to each cell an affine function `a + b*u` of the
//! cell's uniform coordinate `u`; absent cells carry the value 0. The
//! degree-one restriction is closed under every construction in this
//! crate, and powers are integrated analytically inside [`moment`], so no
//! higher-degree representation is ever needed. Products of elements are
//! not provided; orthogonality is a predicate.

use crate::cellspace::{CellId, CellSpace, Refinement, Refiner};
use crate::error::CalcError;
use crate::rational::{self, pow, Rat};
use crate::Result;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

/// A self-adjoint element: per-cell affine coefficients, tagged with the
/// space version it lives on. Zero pairs are normalized away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    version: u64,
    coeffs: BTreeMap<CellId, (Rat, Rat)>,
}

impl Element {
    pub fn zero(version: u64) -> Self {
        Element { version, coeffs: BTreeMap::new() }
    }

    pub fn from_pairs(version: u64, pairs: Vec<(CellId, (Rat, Rat))>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (id, (a, b)) in pairs {
            if !(a.is_zero() && b.is_zero()) {
                coeffs.insert(id, (a, b));
            }
        }
        Element { version, coeffs }
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every cell value is constant (no coordinate term).
    pub fn is_step(&self) -> bool {
        self.coeffs.values().all(|(_, b)| b.is_zero())
    }

    /// First cell carrying a coordinate term, if any.
    pub fn non_step_cell(&self) -> Option<CellId> {
        self.coeffs.iter().find(|(_, (_, b))| !b.is_zero()).map(|(id, _)| *id)
    }

    /// The affine pair on a cell; `(0, 0)` when absent.
    pub fn pair(&self, id: CellId) -> (Rat, Rat) {
        self.coeffs.get(&id).cloned().unwrap_or((Rat::zero(), Rat::zero()))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (CellId, &(Rat, Rat))> {
        self.coeffs.iter().map(|(id, p)| (*id, p))
    }

    pub fn support_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.coeffs.keys().copied()
    }

    pub(crate) fn check_space(&self, space: &CellSpace) -> Result<()> {
        if self.version != space.version() {
            return Err(CalcError::VersionMismatch {
                expected: space.version(),
                found: self.version,
            });
        }
        Ok(())
    }
}

/// A projection: the indicator of a set of cells. Equivalent to an
/// [`Element`] whose pairs are all `(1, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    version: u64,
    cells: BTreeSet<CellId>,
}

impl Projection {
    pub fn empty(version: u64) -> Self {
        Projection { version, cells: BTreeSet::new() }
    }

    pub fn from_cells(version: u64, cells: impl IntoIterator<Item = CellId>) -> Self {
        Projection { version, cells: cells.into_iter().collect() }
    }

    /// The full projection: every cell of the space.
    pub fn full(space: &CellSpace) -> Self {
        Projection { version: space.version(), cells: space.cell_ids().collect() }
    }

    /// Interprets an element as a projection; fails on any pair other
    /// than `(1, 0)`.
    pub fn try_from_element(e: &Element) -> Result<Self> {
        let mut cells = BTreeSet::new();
        for (id, (a, b)) in e.coeffs() {
            if !b.is_zero() || *a != rational::one() {
                return Err(CalcError::NotAProjection(id));
            }
            cells.insert(id);
        }
        Ok(Projection { version: e.version(), cells })
    }

    pub fn to_element(&self) -> Element {
        Element {
            version: self.version,
            coeffs: self
                .cells
                .iter()
                .map(|id| (*id, (rational::one(), Rat::zero())))
                .collect(),
        }
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.cells.iter().copied()
    }

    pub fn cell_set(&self) -> &BTreeSet<CellId> {
        &self.cells
    }

    pub fn contains(&self, id: CellId) -> bool {
        self.cells.contains(&id)
    }

    pub fn is_sub_of(&self, other: &Projection) -> bool {
        self.cells.is_subset(&other.cells)
    }

    pub fn is_orthogonal_to(&self, other: &Projection) -> bool {
        self.cells.is_disjoint(&other.cells)
    }

    /// Union of orthogonal projections.
    pub fn join(&self, other: &Projection) -> Projection {
        debug_assert_eq!(self.version, other.version);
        Projection {
            version: self.version,
            cells: self.cells.union(&other.cells).copied().collect(),
        }
    }

    pub fn minus(&self, other: &Projection) -> Projection {
        Projection {
            version: self.version,
            cells: self.cells.difference(&other.cells).copied().collect(),
        }
    }

    /// Complement within the space.
    pub fn complement(&self, space: &CellSpace) -> Projection {
        Projection {
            version: self.version,
            cells: space.cell_ids().filter(|id| !self.cells.contains(id)).collect(),
        }
    }

    /// The dimension function D: total mass of the covered cells.
    pub fn dimension(&self, space: &CellSpace) -> Result<Rat> {
        let mut d = Rat::zero();
        for id in &self.cells {
            d += space.mass_of(*id)?;
        }
        Ok(d)
    }

    pub(crate) fn check_space(&self, space: &CellSpace) -> Result<()> {
        if self.version != space.version() {
            return Err(CalcError::VersionMismatch {
                expected: space.version(),
                found: self.version,
            });
        }
        Ok(())
    }
}

impl Refinement {
    /// Remaps an element across this refinement; exact distribution
    /// preservation is the substrate's defining invariant.
    pub fn apply_element(&self, e: &Element) -> Result<Element> {
        self.check_source(e.version())?;
        let mut coeffs = self.replay_pairs(e.coeffs.clone());
        coeffs.retain(|_, (a, b)| !(a.is_zero() && b.is_zero()));
        Ok(Element { version: self.to_version(), coeffs })
    }

    pub fn apply_projection(&self, p: &Projection) -> Result<Projection> {
        self.check_source(p.version())?;
        Ok(Projection { version: self.to_version(), cells: self.replay_set(p.cells.clone()) })
    }
}

/// Ingests step-spectral data: refines the space so each atom occupies
/// dedicated cells and returns the resulting step element. Atoms with
/// equal values are merged; zero values are dropped (their mass stays in
/// the residual zero region). Allocation is deterministic: merged atoms
/// sorted by value ascending, laid out across the cells in space order.
pub fn from_atoms(
    space: &CellSpace,
    atoms: &[(Rat, Rat)],
) -> Result<(CellSpace, Refinement, Element)> {
    let mut merged: BTreeMap<Rat, Rat> = BTreeMap::new();
    let mut used = Rat::zero();
    for (value, mass) in atoms {
        if *mass <= Rat::zero() {
            return Err(CalcError::NonPositiveAtomMass(rational::render(mass)));
        }
        used += mass;
        if !value.is_zero() {
            *merged.entry(value.clone()).or_insert_with(Rat::zero) += mass;
        }
    }
    if used > *space.total_mass() {
        return Err(CalcError::MassesExceedTotal {
            got: rational::render(&used),
            total: rational::render(space.total_mass()),
        });
    }
    let mut rf = Refiner::new(space.clone());
    let mut queue: Vec<CellId> = rf.space().cell_ids().collect();
    queue.reverse(); // pop from the front cheaply
    let mut pairs = Vec::new();
    for (value, mut need) in merged {
        while !need.is_zero() {
            let cell = *queue.last().expect("masses fit by the precondition");
            let have = rf.space().mass_of(cell)?.clone();
            if have <= need {
                pairs.push((cell, (value.clone(), Rat::zero())));
                need -= have;
                queue.pop();
            } else {
                let (left, right) = rf.take_mass(cell, &need)?;
                pairs.push((left, (value.clone(), Rat::zero())));
                *queue.last_mut().unwrap() = right.expect("partial take leaves a remainder");
                need = Rat::zero();
            }
        }
    }
    let (space, refinement) = rf.finish();
    let element = Element::from_pairs(space.version(), pairs);
    Ok((space, refinement, element))
}

/// `alpha*A + beta*B`, on a common space version.
pub fn linear_combine(alpha: &Rat, a: &Element, beta: &Rat, b: &Element) -> Result<Element> {
    if a.version() != b.version() {
        return Err(CalcError::VersionMismatch { expected: a.version(), found: b.version() });
    }
    let mut out: BTreeMap<CellId, (Rat, Rat)> = BTreeMap::new();
    for (id, (pa, pb)) in a.coeffs() {
        let e = out.entry(id).or_insert((Rat::zero(), Rat::zero()));
        e.0 += alpha * pa;
        e.1 += alpha * pb;
    }
    for (id, (pa, pb)) in b.coeffs() {
        let e = out.entry(id).or_insert((Rat::zero(), Rat::zero()));
        e.0 += beta * pa;
        e.1 += beta * pb;
    }
    out.retain(|_, (x, y)| !(x.is_zero() && y.is_zero()));
    Ok(Element { version: a.version(), coeffs: out })
}

pub fn add(a: &Element, b: &Element) -> Result<Element> {
    linear_combine(&rational::one(), a, &rational::one(), b)
}

pub fn sub(a: &Element, b: &Element) -> Result<Element> {
    linear_combine(&rational::one(), a, &-rational::one(), b)
}

pub fn neg(a: &Element) -> Element {
    let coeffs = a.coeffs.iter().map(|(id, (x, y))| (*id, (-x, -y))).collect();
    Element { version: a.version, coeffs }
}

pub fn scale_element(alpha: &Rat, a: &Element) -> Element {
    if alpha.is_zero() {
        return Element::zero(a.version);
    }
    let coeffs = a.coeffs.iter().map(|(id, (x, y))| (*id, (alpha * x, alpha * y))).collect();
    Element { version: a.version, coeffs }
}

/// The quasitrace: sum over cells of `m*(a + b/2)`, the first moment.
pub fn quasitrace(space: &CellSpace, a: &Element) -> Result<Rat> {
    a.check_space(space)?;
    let half = rational::rat(1, 2);
    let mut q = Rat::zero();
    for (id, (pa, pb)) in a.coeffs() {
        q += space.mass_of(id)? * &(pa + pb * &half);
    }
    Ok(q)
}

/// Exact k-th moment: per cell `m * I_k(a, b)` with
/// `I_k(a,b) = ((a+b)^{k+1} - a^{k+1}) / ((k+1) b)` for `b != 0`,
/// else `a^k`.
pub fn moment(space: &CellSpace, a: &Element, k: u32) -> Result<Rat> {
    a.check_space(space)?;
    if k == 0 {
        return Err(CalcError::ZeroMomentOrder);
    }
    let mut q = Rat::zero();
    for (id, (pa, pb)) in a.coeffs() {
        q += space.mass_of(id)? * &affine_power_integral(pa, pb, k);
    }
    Ok(q)
}

/// `∫_0^1 (a + b u)^k du`, exactly.
pub fn affine_power_integral(a: &Rat, b: &Rat, k: u32) -> Rat {
    if b.is_zero() {
        pow(a, k)
    } else {
        let hi = pow(&(a + b), k + 1);
        let lo = pow(a, k + 1);
        (hi - lo) / (rational::rat_int(i64::from(k) + 1) * b)
    }
}

/// Splits any cell whose affine value changes sign in the interior and
/// returns the nonnegative parts `(A+, A-)` with `A = A+ - A-`,
/// `A+ ⟂ A-`.
pub fn pos_neg_parts(
    space: &CellSpace,
    a: &Element,
) -> Result<(CellSpace, Refinement, Element, Element)> {
    a.check_space(space)?;
    let mut rf = Refiner::new(space.clone());
    // coordinate-split every sign-straddling cell at u* = -a/b
    for (id, (pa, pb)) in a.coeffs() {
        if !pb.is_zero() {
            let u_star = -(pa / pb);
            if u_star > Rat::zero() && u_star < rational::one() {
                rf.split_coord(id, &u_star)?;
            }
        }
    }
    let (new_space, refinement) = rf.finish();
    let moved = refinement.apply_element(a)?;
    let mut pos = Vec::new();
    let mut negv = Vec::new();
    for (id, (pa, pb)) in moved.coeffs() {
        let lo = pa.clone().min(pa + pb);
        let hi = pa.clone().max(pa + pb);
        if lo >= Rat::zero() {
            pos.push((id, (pa.clone(), pb.clone())));
        } else if hi <= Rat::zero() {
            negv.push((id, (-pa, -pb)));
        } else {
            unreachable!("interior sign changes were split away");
        }
    }
    let v = new_space.version();
    Ok((new_space, refinement, Element::from_pairs(v, pos), Element::from_pairs(v, negv)))
}

/// The support projection: indicator of every cell carrying a nonzero
/// pair. An affine value with `b != 0` is nonzero almost everywhere on
/// its cell, so the whole cell belongs to the support.
pub fn support(a: &Element) -> Projection {
    Projection { version: a.version(), cells: a.coeffs.keys().copied().collect() }
}

/// True iff no cell carries nonzero pairs for both elements (the model
/// form of `AB = BA = 0`).
pub fn orthogonal(a: &Element, b: &Element) -> Result<bool> {
    if a.version() != b.version() {
        return Err(CalcError::VersionMismatch { expected: a.version(), found: b.version() });
    }
    Ok(a.coeffs.keys().all(|id| !b.coeffs.contains_key(id)))
}

/// Essential supremum norm, from the affine endpoint values.
pub fn sup_norm(a: &Element) -> Rat {
    use num_traits::Signed;
    let mut best = Rat::zero();
    for (_, (pa, pb)) in a.coeffs() {
        let end = pa + pb;
        let m = pa.abs().max(end.abs());
        if m > best {
            best = m;
        }
    }
    best
}

/// Copies a step element under a target projection: the result has the
/// same spectral distribution and support inside `target`. Realized by
/// mass-splitting the target's cells (in space order) to mirror the
/// element's value/mass profile, values ascending.
pub fn copy_onto(
    space: &CellSpace,
    a: &Element,
    target: &Projection,
) -> Result<(CellSpace, Refinement, Element)> {
    a.check_space(space)?;
    target.check_space(space)?;
    if let Some(cell) = a.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    let sup = support(a);
    if let Some(shared) = sup.cells().find(|id| target.contains(*id)) {
        return Err(CalcError::TargetNotOrthogonal(shared));
    }
    let needed = sup.dimension(space)?;
    let available = target.dimension(space)?;
    if available < needed {
        return Err(CalcError::TargetTooSmall {
            needed: rational::render(&needed),
            available: rational::render(&available),
        });
    }
    // value/mass profile, ascending
    let mut profile: BTreeMap<Rat, Rat> = BTreeMap::new();
    for (id, (pa, _)) in a.coeffs() {
        *profile.entry(pa.clone()).or_insert_with(Rat::zero) += space.mass_of(id)?;
    }
    let mut rf = Refiner::new(space.clone());
    let mut queue: Vec<CellId> = space
        .cell_ids()
        .filter(|id| target.contains(*id))
        .collect();
    queue.reverse();
    let mut pairs = Vec::new();
    for (value, mut need) in profile {
        while !need.is_zero() {
            let cell = *queue.last().expect("dimension check guarantees room");
            let have = rf.space().mass_of(cell)?.clone();
            if have <= need {
                pairs.push((cell, (value.clone(), Rat::zero())));
                need -= have;
                queue.pop();
            } else {
                let (left, right) = rf.take_mass(cell, &need)?;
                pairs.push((left, (value.clone(), Rat::zero())));
                *queue.last_mut().unwrap() = right.unwrap();
                need = Rat::zero();
            }
        }
    }
    let (new_space, refinement) = rf.finish();
    let v = new_space.version();
    Ok((new_space, refinement, Element::from_pairs(v, pairs)))
}

/// Functional calculus on the step subalgebra: applies a scalar map to
/// the element's value on every cell of the space, including the
/// implicit zero region (maps with `f(0) != 0` act there too).
pub fn map_step_values(
    space: &CellSpace,
    a: &Element,
    f: impl Fn(&Rat) -> Rat,
) -> Result<Element> {
    a.check_space(space)?;
    if let Some(cell) = a.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    let pairs = space
        .cell_ids()
        .map(|id| (id, (f(&a.pair(id).0), Rat::zero())))
        .collect();
    Ok(Element::from_pairs(a.version(), pairs))
}
