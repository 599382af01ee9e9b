//! Scales of projections and the Riemann integral calculus.
//!
//! A [`Scale`] realizes `t -> E(t)` with `D(E(t)) = t` as an ordered run
//! of cells sitting on top of an initial ("base") projection. Evaluation
//! and integration are lazy: interior points split the straddling cell by
//! mass and hand back the refinement. All integrands are step functions,
//! so every Darboux net in sight stabilizes after finitely many
//! refinements and the calculus is exact.

use crate::cellspace::{CellId, CellSpace, Refinement, Refiner};
use crate::element::{Element, Projection};
use crate::error::CalcError;
use crate::rational::{self, Rat};
use crate::Result;
use num_traits::Zero;
use std::collections::BTreeSet;

/// A real step function on a closed interval. Pieces are half-open
/// `[c_i, c_{i+1})`, with the function taking the last piece's value at
/// the right endpoint of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFunction {
    /// strictly increasing; first = domain lo, last = domain hi
    breaks: Vec<Rat>,
    /// one value per piece; `values.len() == breaks.len() - 1`
    values: Vec<Rat>,
}

impl StepFunction {
    pub fn constant(lo: Rat, hi: Rat, value: Rat) -> Result<Self> {
        if lo > hi {
            return Err(CalcError::BadStepFunction);
        }
        if lo == hi {
            return Ok(StepFunction { breaks: vec![lo], values: vec![] });
        }
        Ok(StepFunction { breaks: vec![lo, hi], values: vec![value] })
    }

    /// From contiguous `(lo, hi, value)` spans.
    pub fn from_spans(spans: Vec<(Rat, Rat, Rat)>) -> Result<Self> {
        if spans.is_empty() {
            return Err(CalcError::BadStepFunction);
        }
        let mut breaks = vec![spans[0].0.clone()];
        let mut values = Vec::new();
        for (lo, hi, v) in spans {
            if lo != *breaks.last().unwrap() || hi <= lo {
                return Err(CalcError::BadStepFunction);
            }
            breaks.push(hi);
            values.push(v);
        }
        Ok(StepFunction { breaks, values })
    }

    pub fn from_breaks(breaks: Vec<Rat>, values: Vec<Rat>) -> Result<Self> {
        if breaks.len() != values.len() + 1 || breaks.is_empty() {
            return Err(CalcError::BadStepFunction);
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CalcError::BadStepFunction);
        }
        Ok(StepFunction { breaks, values })
    }

    pub fn lo(&self) -> &Rat {
        self.breaks.first().unwrap()
    }

    pub fn hi(&self) -> &Rat {
        self.breaks.last().unwrap()
    }

    pub fn breaks(&self) -> &[Rat] {
        &self.breaks
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn is_empty_domain(&self) -> bool {
        self.values.is_empty()
    }

    /// Merges adjacent pieces with equal values. Two step functions that
    /// agree almost everywhere have identical canonical forms.
    pub fn canonical(&self) -> StepFunction {
        if self.values.is_empty() {
            return self.clone();
        }
        let mut breaks = vec![self.breaks[0].clone()];
        let mut values: Vec<Rat> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            if values.last() == Some(v) {
                *breaks.last_mut().unwrap() = self.breaks[i + 1].clone();
            } else {
                values.push(v.clone());
                breaks.push(self.breaks[i + 1].clone());
            }
        }
        StepFunction { breaks, values }
    }

    pub fn value_at(&self, t: &Rat) -> Rat {
        assert!(t >= self.lo() && t <= self.hi(), "point outside the domain");
        if self.values.is_empty() {
            return Rat::zero();
        }
        if t == self.hi() {
            return self.values.last().unwrap().clone();
        }
        let mut idx = 0;
        for i in 0..self.values.len() {
            if *t >= self.breaks[i] && *t < self.breaks[i + 1] {
                idx = i;
                break;
            }
        }
        self.values[idx].clone()
    }

    /// Minimum and maximum over the closed interval `[l, h]` of the
    /// domain.
    pub fn inf_sup_on(&self, l: &Rat, h: &Rat) -> (Rat, Rat) {
        assert!(l >= self.lo() && h <= self.hi() && l <= h);
        let mut lo: Option<Rat> = None;
        let mut hi: Option<Rat> = None;
        for i in 0..self.values.len() {
            // piece [breaks[i], breaks[i+1]) meets [l, h]?
            if self.breaks[i] <= *h && self.breaks[i + 1] > *l {
                let v = &self.values[i];
                lo = Some(match lo {
                    Some(x) => x.min(v.clone()),
                    None => v.clone(),
                });
                hi = Some(match hi {
                    Some(x) => x.max(v.clone()),
                    None => v.clone(),
                });
            }
        }
        let v = self.value_at(h);
        let lo = lo.map(|x| x.min(v.clone())).unwrap_or_else(|| v.clone());
        let hi = hi.map(|x| x.max(v.clone())).unwrap_or(v);
        (lo, hi)
    }

    /// The translation map: shifts the domain by `s`, values unchanged.
    pub fn translate(&self, s: &Rat) -> StepFunction {
        StepFunction {
            breaks: self.breaks.iter().map(|b| b + s).collect(),
            values: self.values.clone(),
        }
    }

    /// Restriction to `[l, h]` inside the domain.
    pub fn restrict(&self, l: &Rat, h: &Rat) -> Result<StepFunction> {
        if l < self.lo() || h > self.hi() || l > h {
            return Err(CalcError::BadStepFunction);
        }
        if l == h {
            return Ok(StepFunction { breaks: vec![l.clone()], values: vec![] });
        }
        let mut breaks = vec![l.clone()];
        let mut values = Vec::new();
        for i in 0..self.values.len() {
            let plo = self.breaks[i].clone().max(l.clone());
            let phi = self.breaks[i + 1].clone().min(h.clone());
            if plo < phi {
                breaks.push(phi);
                values.push(self.values[i].clone());
            }
        }
        Ok(StepFunction { breaks, values })
    }

    /// Extends by zero onto `[l, h] ⊇ domain`.
    pub fn extend_zero(&self, l: &Rat, h: &Rat) -> Result<StepFunction> {
        if l > self.lo() || h < self.hi() {
            return Err(CalcError::BadStepFunction);
        }
        let mut breaks = Vec::new();
        let mut values = Vec::new();
        if l < self.lo() {
            breaks.push(l.clone());
            values.push(Rat::zero());
        }
        breaks.extend(self.breaks.iter().cloned());
        if breaks.is_empty() {
            breaks.push(self.lo().clone());
        }
        values.extend(self.values.iter().cloned());
        if h > self.hi() {
            breaks.push(h.clone());
            values.push(Rat::zero());
        }
        // a zero-length domain extended on both sides collapses cleanly
        let breaks: Vec<Rat> = {
            let mut out: Vec<Rat> = Vec::new();
            for b in breaks {
                if out.last() != Some(&b) {
                    out.push(b);
                }
            }
            out
        };
        StepFunction::from_breaks(breaks, values)
    }

    /// Pointwise sum on a common domain; breakpoint grids are merged in
    /// one linear pass.
    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        if self.lo() != other.lo() || self.hi() != other.hi() {
            return Err(CalcError::StepDomainMismatch);
        }
        if self.values.is_empty() {
            return Ok(other.clone());
        }
        if other.values.is_empty() {
            return Ok(self.clone());
        }
        let mut breaks = vec![self.breaks[0].clone()];
        let mut values = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.values.len() && j < other.values.len() {
            values.push(&self.values[i] + &other.values[j]);
            let (si, sj) = (&self.breaks[i + 1], &other.breaks[j + 1]);
            let next = if si <= sj { si.clone() } else { sj.clone() };
            if *si == next {
                i += 1;
            }
            if *sj == next {
                j += 1;
            }
            breaks.push(next);
        }
        StepFunction::from_breaks(breaks, values)
    }

    pub fn scale_values(&self, alpha: &Rat) -> StepFunction {
        StepFunction {
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn map_values(&self, f: impl Fn(&Rat) -> Rat) -> StepFunction {
        StepFunction { breaks: self.breaks.clone(), values: self.values.iter().map(f).collect() }
    }

    pub fn pow_values(&self, k: u32) -> StepFunction {
        self.map_values(|v| rational::pow(v, k))
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// Exact scalar integral over the domain.
    pub fn integral(&self) -> Rat {
        let mut q = Rat::zero();
        for i in 0..self.values.len() {
            q += &self.values[i] * &(&self.breaks[i + 1] - &self.breaks[i]);
        }
        q
    }

    pub fn sup_abs(&self) -> Rat {
        use num_traits::Signed;
        self.values.iter().map(|v| v.abs()).max().unwrap_or_else(Rat::zero)
    }
}

/// A scale of projections: `E(t) = base ∪ (prefix of the run)`, with the
/// dimension parameter `t` running over `[t0, t1]`. The `unit` field is
/// the absolute mass of one dimension unit; it is 1 for ambient scales
/// and changes only under [`rescale_dims`], which relabels between
/// dimensions measured in a compression and in the ambient algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scale {
    version: u64,
    base: Projection,
    run: Vec<CellId>,
    t0: Rat,
    unit: Rat,
}

impl Scale {
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn t0(&self) -> &Rat {
        &self.t0
    }

    pub fn t1(&self, space: &CellSpace) -> Result<Rat> {
        Ok(&self.t0 + &(self.run_mass(space)? / &self.unit))
    }

    pub fn unit(&self) -> &Rat {
        &self.unit
    }

    pub fn run(&self) -> &[CellId] {
        &self.run
    }

    pub fn base(&self) -> &Projection {
        &self.base
    }

    fn run_mass(&self, space: &CellSpace) -> Result<Rat> {
        let mut m = Rat::zero();
        for id in &self.run {
            m += space.mass_of(*id)?;
        }
        Ok(m)
    }

    /// Measure: the length of the dimension range.
    pub fn measure(&self, space: &CellSpace) -> Result<Rat> {
        Ok(self.run_mass(space)? / &self.unit)
    }

    /// Width `w(E)`: terminal minus initial projection = indicator of the
    /// run.
    pub fn width(&self) -> Projection {
        Projection::from_cells(self.version, self.run.iter().copied())
    }

    pub fn initial(&self) -> Projection {
        self.base.clone()
    }

    pub fn terminal(&self) -> Projection {
        self.base.join(&self.width())
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
    pub fn apply_scale(&self, s: &Scale) -> Result<Scale> {
        self.check_source(s.version)?;
        let base = self.apply_projection(&s.base)?;
        let run = self.replay_run(&s.run);
        Ok(Scale { version: self.to_version(), base, run, t0: s.t0.clone(), unit: s.unit.clone() })
    }
}

/// Builds a scale from an ordered run of cells on top of an initial
/// projection. The dimension range starts at `t0 = D(base)`.
pub fn make_scale(space: &CellSpace, cells: &[CellId], base: Projection) -> Result<Scale> {
    base.check_space(space)?;
    let mut seen = BTreeSet::new();
    for id in cells {
        if !space.contains(*id) {
            return Err(CalcError::UnknownCell(*id));
        }
        if !seen.insert(*id) {
            return Err(CalcError::DuplicateScaleCell(*id));
        }
        if base.contains(*id) {
            return Err(CalcError::ScaleBaseOverlapsRun(*id));
        }
    }
    let t0 = base.dimension(space)?;
    let mut total = t0.clone();
    for id in cells {
        total += space.mass_of(*id)?;
    }
    if total > *space.total_mass() {
        return Err(CalcError::ScaleTooLong {
            got: rational::render(&total),
            total: rational::render(space.total_mass()),
        });
    }
    Ok(Scale {
        version: space.version(),
        base,
        run: cells.to_vec(),
        t0,
        unit: rational::one(),
    })
}

/// A full scale over `[0, total]` whose run lists every cell of the space
/// sorted by the element's value ascending (zero-value mass included),
/// ties broken by cell id. It contains every spectral projection
/// `e_{(-inf,λ)}(A)` and `e_{(-inf,λ]}(A)` as a prefix.
pub fn spectral_scale(space: &CellSpace, a: &Element) -> Result<Scale> {
    a.check_space(space)?;
    if let Some(cell) = a.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    let mut cells: Vec<CellId> = space.cell_ids().collect();
    cells.sort_by(|x, y| {
        let vx = a.pair(*x).0;
        let vy = a.pair(*y).0;
        vx.cmp(&vy).then(x.cmp(y))
    });
    make_scale(space, &cells, Projection::empty(space.version()))
}

/// The support scale of a step element: a scale over `[0, D(s(A))]`
/// whose terminal projection is the support and whose run lists the
/// support cells by value ascending. Together with the step profile it
/// realizes `A = ∫ f dE` with `f` non-decreasing.
pub fn support_scale(space: &CellSpace, a: &Element) -> Result<(Scale, StepFunction)> {
    a.check_space(space)?;
    if let Some(cell) = a.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    let mut cells: Vec<CellId> = a.support_cells().collect();
    cells.sort_by(|x, y| {
        let vx = a.pair(*x).0;
        let vy = a.pair(*y).0;
        vx.cmp(&vy).then(x.cmp(y))
    });
    let scale = make_scale(space, &cells, Projection::empty(space.version()))?;
    let mut spans = Vec::new();
    let mut t = Rat::zero();
    for id in &cells {
        let m = space.mass_of(*id)?;
        spans.push((t.clone(), &t + m, a.pair(*id).0));
        t += m;
    }
    let profile = if spans.is_empty() {
        StepFunction { breaks: vec![Rat::zero()], values: vec![] }
    } else {
        StepFunction::from_spans(spans)?.canonical()
    };
    Ok((scale, profile))
}

/// Splits the run so that consecutive spans of the given dimension
/// lengths map onto disjoint consecutive groups of cells. Returns the
/// groups; the scale is updated in place to the refined run.
fn allocate_spans(
    rf: &mut Refiner,
    scale: &mut Scale,
    span_lens: &[Rat],
) -> Result<Vec<Vec<CellId>>> {
    let mut groups: Vec<Vec<CellId>> = Vec::with_capacity(span_lens.len());
    let mut new_run: Vec<CellId> = Vec::with_capacity(scale.run.len());
    let mut pending: Vec<CellId> = scale.run.iter().rev().copied().collect();
    for len in span_lens {
        let mut need = len * &scale.unit; // absolute mass
        let mut group = Vec::new();
        while !need.is_zero() {
            let cell = *pending.last().expect("spans exceed the run");
            let have = rf.space().mass_of(cell)?.clone();
            if have <= need {
                group.push(cell);
                new_run.push(cell);
                need -= have;
                pending.pop();
            } else {
                let (left, right) = rf.take_mass(cell, &need)?;
                group.push(left);
                new_run.push(left);
                *pending.last_mut().unwrap() = right.expect("partial take leaves a remainder");
                need = Rat::zero();
            }
        }
        groups.push(group);
    }
    while let Some(cell) = pending.pop() {
        new_run.push(cell);
    }
    scale.run = new_run;
    scale.version = rf.space().version();
    scale.base = Projection::from_cells(scale.version, scale.base.cells());
    Ok(groups)
}

/// Splits the run at every interior point of `points` (dimension units),
/// so later integrals against functions breaking only at these points
/// refine nothing further.
pub(crate) fn presplit(
    rf: &mut Refiner,
    scale: &mut Scale,
    points: &BTreeSet<Rat>,
) -> Result<()> {
    let t1 = scale.t1(rf.space())?;
    let mut spans = Vec::new();
    let mut prev = scale.t0().clone();
    for p in points {
        if *p > prev && *p < t1 {
            spans.push(p - &prev);
            prev = p.clone();
        }
    }
    if t1 > prev {
        spans.push(&t1 - &prev);
    }
    allocate_spans(rf, scale, &spans)?;
    Ok(())
}

/// Internal integral against a scale slice: integrand domain must sit
/// inside the dimension range; the scale is refined in place.
pub(crate) fn integrate_in(
    rf: &mut Refiner,
    scale: &mut Scale,
    f: &StepFunction,
) -> Result<Element> {
    let t1 = scale.t1(rf.space())?;
    if *f.lo() < scale.t0 || *f.hi() > t1 {
        return Err(CalcError::DomainMismatch {
            flo: rational::render(f.lo()),
            fhi: rational::render(f.hi()),
            lo: rational::render(&scale.t0),
            hi: rational::render(&t1),
        });
    }
    let full = f.extend_zero(&scale.t0, &t1)?.canonical();
    if full.is_empty_domain() {
        return Ok(Element::zero(rf.space().version()));
    }
    let span_lens: Vec<Rat> = full
        .breaks
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .collect();
    let groups = allocate_spans(rf, scale, &span_lens)?;
    let mut pairs = Vec::new();
    for (group, v) in groups.iter().zip(full.values.iter()) {
        if v.is_zero() {
            continue;
        }
        for id in group {
            pairs.push((*id, (v.clone(), Rat::zero())));
        }
    }
    Ok(Element::from_pairs(rf.space().version(), pairs))
}

/// The Riemann integral `∫ f dE` for a step integrand whose domain equals
/// the scale's dimension range. The result is the step element
/// `Σ value · (E(r) − E(l))`; its trace is the scalar `∫ f(t) dt` and its
/// support sits under the width of the scale.
pub fn riemann_integral(
    space: &CellSpace,
    scale: &Scale,
    f: &StepFunction,
) -> Result<(CellSpace, Refinement, Scale, Element)> {
    scale.check_space(space)?;
    let t1 = scale.t1(space)?;
    if *f.lo() != scale.t0 || *f.hi() != t1 {
        return Err(CalcError::DomainMismatch {
            flo: rational::render(f.lo()),
            fhi: rational::render(f.hi()),
            lo: rational::render(&scale.t0),
            hi: rational::render(&t1),
        });
    }
    riemann_integral_over(space, scale, f)
}

/// Sub-interval integral `∫_{l}^{h} f dE` with `[l, h] ⊆ [t0, t1]`:
/// the integrand is extended by zero across the rest of the range.
pub fn riemann_integral_over(
    space: &CellSpace,
    scale: &Scale,
    f: &StepFunction,
) -> Result<(CellSpace, Refinement, Scale, Element)> {
    scale.check_space(space)?;
    let mut rf = Refiner::new(space.clone());
    let mut working = scale.clone();
    let element = integrate_in(&mut rf, &mut working, f)?;
    let (new_space, refinement) = rf.finish();
    Ok((new_space, refinement, working, element))
}

/// Evaluates the scale at `t`, splitting the straddling cell if `t` is
/// interior to one. Returns the refined space, the remapped scale and the
/// projection `E(t)` with `D(E(t)) = t` (for ambient scales).
pub fn eval(
    space: &CellSpace,
    scale: &Scale,
    t: &Rat,
) -> Result<(CellSpace, Refinement, Scale, Projection)> {
    scale.check_space(space)?;
    let t1 = scale.t1(space)?;
    if *t < scale.t0 || *t > t1 {
        return Err(CalcError::EvalOutOfRange {
            t: rational::render(t),
            lo: rational::render(&scale.t0),
            hi: rational::render(&t1),
        });
    }
    let mut rf = Refiner::new(space.clone());
    let mut working = scale.clone();
    let prefix_len = t - &scale.t0;
    let groups = allocate_spans(&mut rf, &mut working, &[prefix_len])?;
    let proj = working.base.join(&Projection::from_cells(working.version(), groups[0].iter().copied()));
    let (new_space, refinement) = rf.finish();
    Ok((new_space, refinement, working, proj))
}

/// Lower and upper Darboux sums against a partition of the dimension
/// range. Their traces are the scalar Darboux sums of `f`.
pub fn darboux_bounds(
    space: &CellSpace,
    scale: &Scale,
    f: &StepFunction,
    partition: &[Rat],
) -> Result<(CellSpace, Refinement, Scale, Element, Element)> {
    scale.check_space(space)?;
    let t1 = scale.t1(space)?;
    if partition.len() < 2
        || partition[0] != scale.t0
        || *partition.last().unwrap() != t1
        || partition.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(CalcError::PartitionOutsideRange);
    }
    if *f.lo() != scale.t0 || *f.hi() != t1 {
        return Err(CalcError::DomainMismatch {
            flo: rational::render(f.lo()),
            fhi: rational::render(f.hi()),
            lo: rational::render(&scale.t0),
            hi: rational::render(&t1),
        });
    }
    let mut rf = Refiner::new(space.clone());
    let mut working = scale.clone();
    let span_lens: Vec<Rat> = partition.windows(2).map(|w| &w[1] - &w[0]).collect();
    let groups = allocate_spans(&mut rf, &mut working, &span_lens)?;
    let mut lower_pairs = Vec::new();
    let mut upper_pairs = Vec::new();
    for (i, group) in groups.iter().enumerate() {
        let (inf, sup) = f.inf_sup_on(&partition[i], &partition[i + 1]);
        for id in group {
            if !inf.is_zero() {
                lower_pairs.push((*id, (inf.clone(), Rat::zero())));
            }
            if !sup.is_zero() {
                upper_pairs.push((*id, (sup.clone(), Rat::zero())));
            }
        }
    }
    let (new_space, refinement) = rf.finish();
    let v = new_space.version();
    Ok((
        new_space,
        refinement,
        working,
        Element::from_pairs(v, lower_pairs),
        Element::from_pairs(v, upper_pairs),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

/// Translates a scale: down by a subprojection of the initial projection
/// (dimension range shifts down by `D(P)`), or up by a projection
/// orthogonal to the terminal one (range shifts up). Satisfies
/// `∫ f dE = ∫ Λ_{∓δ} f d(E ∓ P)` exactly.
pub fn translate(
    space: &CellSpace,
    scale: &Scale,
    direction: Direction,
    p: &Projection,
) -> Result<Scale> {
    scale.check_space(space)?;
    p.check_space(space)?;
    let delta = p.dimension(space)? / &scale.unit;
    match direction {
        Direction::Down => {
            if !p.is_sub_of(&scale.base) {
                return Err(CalcError::TranslateNotUnderBase);
            }
            Ok(Scale {
                version: scale.version,
                base: scale.base.minus(p),
                run: scale.run.clone(),
                t0: &scale.t0 - &delta,
                unit: scale.unit.clone(),
            })
        }
        Direction::Up => {
            if !p.is_orthogonal_to(&scale.terminal()) {
                return Err(CalcError::TranslateNotOrthogonal);
            }
            Ok(Scale {
                version: scale.version,
                base: scale.base.join(p),
                run: scale.run.clone(),
                t0: &scale.t0 + &delta,
                unit: scale.unit.clone(),
            })
        }
    }
}

/// Concatenation: first's run followed by second's, normalized to start
/// at 0. Requires orthogonal widths and equal units.
pub fn concat(space: &CellSpace, first: &Scale, second: &Scale) -> Result<Scale> {
    first.check_space(space)?;
    second.check_space(space)?;
    if first.unit != second.unit {
        return Err(CalcError::NonPositiveRescale(rational::render(&second.unit)));
    }
    let w1: BTreeSet<CellId> = first.run.iter().copied().collect();
    if let Some(shared) = second.run.iter().find(|id| w1.contains(id)) {
        return Err(CalcError::WidthsNotOrthogonal(*shared));
    }
    let mut run = first.run.clone();
    run.extend(second.run.iter().copied());
    Ok(Scale {
        version: first.version,
        base: Projection::empty(first.version),
        run,
        t0: Rat::zero(),
        unit: first.unit.clone(),
    })
}

/// Relabels the dimension bookkeeping by `λ > 0`: a scale over `[a, b]`
/// measured in a compression of dimension `λ` becomes a scale over
/// `[λa, λb]` in the ambient algebra. The change of variables
/// `∫_{λa}^{λb} f(t) dE^P(t) = ∫_a^b f(λt) dE(t)` holds exactly.
pub fn rescale_dims(scale: &Scale, lambda: &Rat) -> Result<Scale> {
    if *lambda <= Rat::zero() {
        return Err(CalcError::NonPositiveRescale(rational::render(lambda)));
    }
    Ok(Scale {
        version: scale.version,
        base: scale.base.clone(),
        run: scale.run.clone(),
        t0: &scale.t0 * lambda,
        unit: &scale.unit / lambda,
    })
}
