//! Versioned finite measure-space substrate.
//!
//! A [`CellSpace`] is an immutable, ordered partition of a measure space
//! into cells of positive rational mass. Refining operations (mass splits
//! and coordinate splits) never mutate a space; they return a fresh space
//! together with a [`Refinement`] that remaps any dependent data from the
//! old version to the new one, preserving spectral distributions exactly.
//! A refinement is a replayable log of split steps, so composing long
//! split chains stays linear.

use crate::error::CalcError;
use crate::rational::{self, Rat};
use crate::Result;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Stable cell identifier. Fresh ids are drawn from a per-space counter
/// and never reused, so a cell id means the same region in every version
/// that contains it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub u64);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// How a cell came to be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lineage {
    Root,
    /// Left/right child of a mass split of `parent` at ratio `r`.
    MassSplit { parent: CellId, r: Rat, right: bool },
    /// Left/right child of a coordinate split of `parent` at `t`.
    CoordSplit { parent: CellId, t: Rat, right: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub id: CellId,
    pub mass: Rat,
    pub lineage: Lineage,
}

/// An immutable, versioned partition. Cell order is significant and
/// deterministic: split children replace their parent in place, left
/// child first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSpace {
    version: u64,
    total_mass: Rat,
    order: Vec<CellId>,
    info: BTreeMap<CellId, Cell>,
    next_id: u64,
}

impl CellSpace {
    /// A single root cell carrying the whole mass; version 0.
    pub fn new(total_mass: Rat) -> Result<Self> {
        if total_mass <= Rat::zero() {
            return Err(CalcError::NonPositiveMass(rational::render(&total_mass)));
        }
        let root = Cell { id: CellId(0), mass: total_mass.clone(), lineage: Lineage::Root };
        let mut info = BTreeMap::new();
        info.insert(CellId(0), root);
        Ok(CellSpace { version: 0, total_mass, order: vec![CellId(0)], info, next_id: 1 })
    }

    /// Rebuilds a space from serialized data; lineage is not recorded.
    pub fn from_parts(version: u64, total_mass: Rat, cells: Vec<(CellId, Rat)>) -> Result<Self> {
        if total_mass <= Rat::zero() {
            return Err(CalcError::NonPositiveMass(rational::render(&total_mass)));
        }
        let mut info = BTreeMap::new();
        let mut order = Vec::with_capacity(cells.len());
        let mut sum = Rat::zero();
        let mut next_id = 0;
        for (id, mass) in cells {
            if mass <= Rat::zero() {
                return Err(CalcError::NonPositiveMass(rational::render(&mass)));
            }
            sum += &mass;
            next_id = next_id.max(id.0 + 1);
            order.push(id);
            if info.insert(id, Cell { id, mass, lineage: Lineage::Root }).is_some() {
                return Err(CalcError::UnknownCell(id));
            }
        }
        if sum != total_mass {
            return Err(CalcError::MassesExceedTotal {
                got: rational::render(&sum),
                total: rational::render(&total_mass),
            });
        }
        Ok(CellSpace { version, total_mass, order, info, next_id })
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn total_mass(&self) -> &Rat {
        &self.total_mass
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.order.iter().map(|id| &self.info[id])
    }

    pub fn cell_count(&self) -> usize {
        self.order.len()
    }

    pub fn contains(&self, id: CellId) -> bool {
        self.info.contains_key(&id)
    }

    pub fn mass_of(&self, id: CellId) -> Result<&Rat> {
        self.info.get(&id).map(|c| &c.mass).ok_or(CalcError::UnknownCell(id))
    }

    pub fn cell(&self, id: CellId) -> Result<&Cell> {
        self.info.get(&id).ok_or(CalcError::UnknownCell(id))
    }

    /// Ids in space order.
    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> + '_ {
        self.order.iter().copied()
    }

    fn split_in_place(&mut self, id: CellId, param: &Rat, coord: bool) -> Result<SplitStep> {
        if !self.info.contains_key(&id) {
            return Err(CalcError::UnknownCell(id));
        }
        if *param <= Rat::zero() || *param >= Rat::one() {
            return Err(CalcError::SplitOutOfRange(rational::render(param)));
        }
        let pos = self.order.iter().position(|c| *c == id).expect("ordered cell present");
        let parent = self.info.remove(&id).expect("checked above");
        let left_id = CellId(self.next_id);
        let right_id = CellId(self.next_id + 1);
        self.next_id += 2;
        let left_mass = &parent.mass * param;
        let right_mass = &parent.mass - &left_mass;
        let (left_lineage, right_lineage) = if coord {
            (
                Lineage::CoordSplit { parent: id, t: param.clone(), right: false },
                Lineage::CoordSplit { parent: id, t: param.clone(), right: true },
            )
        } else {
            (
                Lineage::MassSplit { parent: id, r: param.clone(), right: false },
                Lineage::MassSplit { parent: id, r: param.clone(), right: true },
            )
        };
        self.info.insert(left_id, Cell { id: left_id, mass: left_mass, lineage: left_lineage });
        self.info.insert(right_id, Cell { id: right_id, mass: right_mass, lineage: right_lineage });
        self.order[pos] = left_id;
        self.order.insert(pos + 1, right_id);
        self.version += 1;
        Ok(SplitStep { cell: id, left: left_id, right: right_id, param: param.clone(), coord })
    }

    fn split(&self, id: CellId, param: &Rat, coord: bool) -> Result<(CellSpace, Refinement)> {
        let mut space = self.clone();
        let step = space.split_in_place(id, param, coord)?;
        let refinement = Refinement {
            from_version: self.version,
            to_version: space.version,
            log: vec![step],
        };
        Ok((space, refinement))
    }

    /// Replaces `cell` by two children of masses `r*m` and `(1-r)*m`.
    /// Element values duplicate onto both children.
    pub fn split_mass(&self, cell: CellId, r: &Rat) -> Result<(CellSpace, Refinement)> {
        self.split(cell, r, false)
    }

    /// Replaces `cell` by two children covering the coordinate ranges
    /// `[0,t)` and `[t,1)` of the parent; an affine value `a + b*u`
    /// remaps to `(a, b*t)` on the left and `(a + b*t, b*(1-t))` on the
    /// right, which leaves distributions unchanged.
    pub fn split_coord(&self, cell: CellId, t: &Rat) -> Result<(CellSpace, Refinement)> {
        self.split(cell, t, true)
    }

    #[cfg(test)]
    pub(crate) fn mass_sum(&self) -> Rat {
        self.cells().map(|c| c.mass.clone()).sum()
    }
}

/// One recorded split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitStep {
    pub cell: CellId,
    pub left: CellId,
    pub right: CellId,
    pub param: Rat,
    pub coord: bool,
}

/// Maps data from one space version to a later one by replaying the
/// split log. Cells without a split pass through unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    from_version: u64,
    to_version: u64,
    log: Vec<SplitStep>,
}

impl Refinement {
    pub fn identity(version: u64) -> Self {
        Refinement { from_version: version, to_version: version, log: Vec::new() }
    }

    pub fn from_version(&self) -> u64 {
        self.from_version
    }

    pub fn to_version(&self) -> u64 {
        self.to_version
    }

    pub fn steps(&self) -> &[SplitStep] {
        &self.log
    }

    /// Sequential composition `self` then `next`.
    pub fn then(&self, next: &Refinement) -> Refinement {
        assert_eq!(
            self.to_version, next.from_version,
            "refinements compose only along matching versions"
        );
        let mut log = self.log.clone();
        log.extend(next.log.iter().cloned());
        Refinement { from_version: self.from_version, to_version: next.to_version, log }
    }

    pub(crate) fn check_source(&self, version: u64) -> Result<()> {
        if version != self.from_version {
            return Err(CalcError::RefinementVersionMismatch {
                expected: self.from_version,
                found: version,
            });
        }
        Ok(())
    }

    /// Replays the log over a coefficient map.
    pub(crate) fn replay_pairs(
        &self,
        mut coeffs: BTreeMap<CellId, (Rat, Rat)>,
    ) -> BTreeMap<CellId, (Rat, Rat)> {
        for step in &self.log {
            if let Some((a, b)) = coeffs.remove(&step.cell) {
                if step.coord {
                    let bl = &b * &step.param;
                    let ar = &a + &bl;
                    let br = &b - &bl;
                    coeffs.insert(step.left, (a, bl));
                    coeffs.insert(step.right, (ar, br));
                } else {
                    coeffs.insert(step.left, (a.clone(), b.clone()));
                    coeffs.insert(step.right, (a, b));
                }
            }
        }
        coeffs
    }

    /// Replays the log over a cell set (both children inherit
    /// membership).
    pub(crate) fn replay_set(
        &self,
        mut cells: std::collections::BTreeSet<CellId>,
    ) -> std::collections::BTreeSet<CellId> {
        for step in &self.log {
            if cells.remove(&step.cell) {
                cells.insert(step.left);
                cells.insert(step.right);
            }
        }
        cells
    }

    /// The ordered descendants of each id in `run`, concatenated in run
    /// order (children replace their parent in place, left first).
    pub(crate) fn replay_run(&self, run: &[CellId]) -> Vec<CellId> {
        let mut slots: Vec<Vec<CellId>> = run.iter().map(|id| vec![*id]).collect();
        let mut locate: BTreeMap<CellId, usize> = run
            .iter()
            .enumerate()
            .map(|(slot, id)| (*id, slot))
            .collect();
        for step in &self.log {
            if let Some(slot) = locate.remove(&step.cell) {
                let vec = &mut slots[slot];
                let pos = vec.iter().position(|c| *c == step.cell).expect("tracked leaf");
                vec[pos] = step.left;
                vec.insert(pos + 1, step.right);
                locate.insert(step.left, slot);
                locate.insert(step.right, slot);
            }
        }
        slots.into_iter().flatten().collect()
    }

}

/// Accumulates a chain of splits over a working copy of a space,
/// exposing the current space and the cumulative refinement.
pub struct Refiner {
    space: CellSpace,
    from_version: u64,
    log: Vec<SplitStep>,
}

impl Refiner {
    pub fn new(space: CellSpace) -> Self {
        let from_version = space.version();
        Refiner { space, from_version, log: Vec::new() }
    }

    pub fn space(&self) -> &CellSpace {
        &self.space
    }

    pub fn refinement(&self) -> Refinement {
        Refinement {
            from_version: self.from_version,
            to_version: self.space.version(),
            log: self.log.clone(),
        }
    }

    pub fn split_mass(&mut self, cell: CellId, r: &Rat) -> Result<(CellId, CellId)> {
        let step = self.space.split_in_place(cell, r, false)?;
        let out = (step.left, step.right);
        self.log.push(step);
        Ok(out)
    }

    pub fn split_coord(&mut self, cell: CellId, t: &Rat) -> Result<(CellId, CellId)> {
        let step = self.space.split_in_place(cell, t, true)?;
        let out = (step.left, step.right);
        self.log.push(step);
        Ok(out)
    }

    /// Splits `cell` so the left child has exactly `mass`; returns
    /// `(left, Some(right))`, or `(cell, None)` if the whole cell is taken.
    pub fn take_mass(&mut self, cell: CellId, mass: &Rat) -> Result<(CellId, Option<CellId>)> {
        let have = self.space.mass_of(cell)?.clone();
        if *mass == have {
            Ok((cell, None))
        } else {
            let r = mass / &have;
            let (l, rr) = self.split_mass(cell, &r)?;
            Ok((l, Some(rr)))
        }
    }

    pub fn finish(self) -> (CellSpace, Refinement) {
        let refinement = Refinement {
            from_version: self.from_version,
            to_version: self.space.version(),
            log: self.log,
        };
        (self.space, refinement)
    }
}
