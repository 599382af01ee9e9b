//! Foldings: mediators, superprojections, the explicit 2-folding built
//! from mediators, the Local Folding construction, and Small Packing.
//!
//! Construction notes. Local Folding is computed in closed form at the
//! partition whose pieces are exactly the quantile steps of the input:
//! for a step element, refining a step's interval further leaves both
//! Darboux sums unchanged (the infimum is the same on both halves), so
//! the refinement net stabilizes there and no limit argument is needed.
//! The per-step gamma pieces have identical canonical distributions on
//! the two sides (a uniform layer of height `ℓ/β` over `[0, α+β]`, and
//! its mirror), so validation passes by structural equality.

use crate::cellspace::{CellId, CellSpace, Refinement, Refiner};
use crate::element::{add, neg, quasitrace, support, sup_norm, Element, Projection};
use crate::error::CalcError;
use crate::rational::{self, Rat};
use crate::scales::{concat, integrate_in, make_scale, presplit, support_scale, StepFunction};
use crate::Result;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeSet;

/// A k-folding: two families `(A_1..A_k; B_1..B_k)` with `A_i ⟂ B_j`,
/// `A_i ~ B_i`, all on one space version. "Φ is a folding of X as Y"
/// means `ΣA_i = X` and `ΣB_i = Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Folding {
    version: u64,
    a_list: Vec<Element>,
    b_list: Vec<Element>,
}

impl Folding {
    pub fn new(version: u64, a_list: Vec<Element>, b_list: Vec<Element>) -> Result<Self> {
        if a_list.len() != b_list.len() {
            return Err(CalcError::FoldingArityMismatch(a_list.len(), b_list.len()));
        }
        for m in a_list.iter().chain(b_list.iter()) {
            if m.version() != version {
                return Err(CalcError::VersionMismatch { expected: version, found: m.version() });
            }
        }
        Ok(Folding { version, a_list, b_list })
    }

    pub fn zero(version: u64, k: usize) -> Self {
        Folding {
            version,
            a_list: (0..k).map(|_| Element::zero(version)).collect(),
            b_list: (0..k).map(|_| Element::zero(version)).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.a_list.len()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn a_list(&self) -> &[Element] {
        &self.a_list
    }

    pub fn b_list(&self) -> &[Element] {
        &self.b_list
    }

    /// `ΣA_i` — the element this folding folds.
    pub fn folded_x(&self) -> Result<Element> {
        let mut x = Element::zero(self.version);
        for m in &self.a_list {
            x = add(&x, m)?;
        }
        Ok(x)
    }

    /// `ΣB_i` — the element it is folded as.
    pub fn folded_y(&self) -> Result<Element> {
        let mut y = Element::zero(self.version);
        for m in &self.b_list {
            y = add(&y, m)?;
        }
        Ok(y)
    }

    /// Join of all member supports.
    pub fn support(&self) -> Projection {
        let mut p = Projection::empty(self.version);
        for m in self.a_list.iter().chain(self.b_list.iter()) {
            p = p.join(&support(m));
        }
        p
    }

    /// `‖Φ‖`: the maximum of the member norms.
    pub fn norm(&self) -> Rat {
        self.a_list
            .iter()
            .chain(self.b_list.iter())
            .map(sup_norm)
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn negate(&self) -> Folding {
        Folding {
            version: self.version,
            a_list: self.a_list.iter().map(neg).collect(),
            b_list: self.b_list.iter().map(neg).collect(),
        }
    }

    pub fn remap(&self, refinement: &Refinement) -> Result<Folding> {
        Ok(Folding {
            version: refinement.to_version(),
            a_list: self.a_list.iter().map(|m| refinement.apply_element(m)).collect::<Result<_>>()?,
            b_list: self.b_list.iter().map(|m| refinement.apply_element(m)).collect::<Result<_>>()?,
        })
    }
}

/// Four pairwise-orthogonal projections `(P1, P2; P3, P4)` with
/// `D(P1) = D(P3)` and `D(P2) = D(P4)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superprojection {
    pub p1: Projection,
    pub p2: Projection,
    pub p3: Projection,
    pub p4: Projection,
}

impl Superprojection {
    pub fn new(
        space: &CellSpace,
        p1: Projection,
        p2: Projection,
        p3: Projection,
        p4: Projection,
    ) -> Result<Self> {
        let all = [&p1, &p2, &p3, &p4];
        for p in all {
            p.check_space(space)?;
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                if let Some(shared) = all[i].cells().find(|c| all[j].contains(*c)) {
                    return Err(CalcError::SuperprojectionOverlap(shared));
                }
            }
        }
        if p1.dimension(space)? != p3.dimension(space)?
            || p2.dimension(space)? != p4.dimension(space)?
        {
            return Err(CalcError::SuperprojectionUnbalanced);
        }
        Ok(Superprojection { p1, p2, p3, p4 })
    }
}

/// The mediator of a projection: the coordinate element `u` on every
/// covered cell. Its distribution in the compression is uniform on
/// `[0, 1]`; against any step element under the projection the product
/// trace factorizes, which is the thickness property of the step
/// subalgebra.
pub fn mediator(space: &CellSpace, p: &Projection) -> Result<Element> {
    p.check_space(space)?;
    Ok(Element::from_pairs(
        space.version(),
        p.cells().map(|id| (id, (Rat::zero(), rational::one()))).collect(),
    ))
}

/// `q(B·M^k)` for a step element under `p` and the `p`-mediator `M`:
/// per cell `m · b · 1/(k+1)`, exactly `q(B)/(k+1)`.
pub fn mediator_product_trace(
    space: &CellSpace,
    b: &Element,
    p: &Projection,
    k: u32,
) -> Result<Rat> {
    b.check_space(space)?;
    if let Some(cell) = b.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    if let Some(outside) = b.support_cells().find(|c| !p.contains(*c)) {
        return Err(CalcError::NotUnderP(outside));
    }
    let kp1 = rational::rat_int(i64::from(k) + 1);
    let mut q = Rat::zero();
    for (id, (value, _)) in b.coeffs() {
        q += space.mass_of(id)? * value / &kp1;
    }
    Ok(q)
}

/// The explicit 2-folding of `α·P1` as `β·P2` built from the four
/// member mediators:
/// `A = α P1 + β M1 + α M4`, `B = -β M1 - α M4`,
/// `V = β P2 + α M2 + β M3`, `W = -β M3 - α M2`.
/// Requires the type condition `α·D(P1) = β·D(P2)` and non-degenerate
/// members.
pub fn gamma_folding(
    space: &CellSpace,
    pi: &Superprojection,
    alpha: &Rat,
    beta: &Rat,
) -> Result<Folding> {
    for (i, p) in [&pi.p1, &pi.p2, &pi.p3, &pi.p4].into_iter().enumerate() {
        p.check_space(space)?;
        if p.is_zero() {
            return Err(CalcError::DegenerateProjection(i + 1));
        }
    }
    let lhs = alpha * &pi.p1.dimension(space)?;
    let rhs = beta * &pi.p2.dimension(space)?;
    if lhs != rhs {
        return Err(CalcError::TypeConditionViolated {
            lhs: rational::render(&lhs),
            rhs: rational::render(&rhs),
        });
    }
    let v = space.version();
    let layer = |cells: &Projection, a: &Rat, b: &Rat| -> Vec<(CellId, (Rat, Rat))> {
        cells.cells().map(|id| (id, (a.clone(), b.clone()))).collect()
    };
    let mut a_pairs = layer(&pi.p1, alpha, beta);
    a_pairs.extend(layer(&pi.p4, &Rat::zero(), alpha));
    let mut b_pairs = layer(&pi.p1, &Rat::zero(), &-beta.clone());
    b_pairs.extend(layer(&pi.p4, &Rat::zero(), &-alpha.clone()));
    let mut v_pairs = layer(&pi.p2, beta, alpha);
    v_pairs.extend(layer(&pi.p3, &Rat::zero(), beta));
    let mut w_pairs = layer(&pi.p3, &Rat::zero(), &-beta.clone());
    w_pairs.extend(layer(&pi.p2, &Rat::zero(), &-alpha.clone()));
    Folding::new(
        v,
        vec![Element::from_pairs(v, a_pairs), Element::from_pairs(v, b_pairs)],
        vec![Element::from_pairs(v, v_pairs), Element::from_pairs(v, w_pairs)],
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FoldingViolation {
    /// member tagged with a different space version
    VersionMismatch { side: char, index: usize, found: u64 },
    /// `A_i` and `B_j` share support cells
    NotOrthogonal { i: usize, j: usize, cell: CellId },
    /// `A_i` and `B_i` have different canonical distributions
    NotEquivalent { i: usize },
}

impl std::fmt::Display for FoldingViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FoldingViolation::VersionMismatch { side, index, found } => {
                write!(f, "member {side}{index} tagged with version {found}")
            }
            FoldingViolation::NotOrthogonal { i, j, cell } => {
                write!(f, "A{i} and B{j} overlap at cell {cell}")
            }
            FoldingViolation::NotEquivalent { i } => {
                write!(f, "A{i} and B{i} are not equivalent")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FoldingReport {
    pub violations: Vec<FoldingViolation>,
}

impl FoldingReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the defining clauses of a folding; every failure is a report
/// entry, never an error.
pub fn validate_folding(space: &CellSpace, phi: &Folding) -> Result<FoldingReport> {
    let mut report = FoldingReport::default();
    for (index, m) in phi.a_list.iter().enumerate() {
        if m.version() != space.version() {
            report.violations.push(FoldingViolation::VersionMismatch {
                side: 'A',
                index: index + 1,
                found: m.version(),
            });
        }
    }
    for (index, m) in phi.b_list.iter().enumerate() {
        if m.version() != space.version() {
            report.violations.push(FoldingViolation::VersionMismatch {
                side: 'B',
                index: index + 1,
                found: m.version(),
            });
        }
    }
    if !report.is_empty() {
        return Ok(report);
    }
    for (i, a) in phi.a_list.iter().enumerate() {
        for (j, b) in phi.b_list.iter().enumerate() {
            if let Some(cell) = a.support_cells().find(|c| support(b).contains(*c)) {
                report.violations.push(FoldingViolation::NotOrthogonal {
                    i: i + 1,
                    j: j + 1,
                    cell,
                });
            }
        }
    }
    for i in 0..phi.k() {
        let da = crate::spectra::distribution(space, &phi.a_list[i])?;
        let db = crate::spectra::distribution(space, &phi.b_list[i])?;
        if da != db {
            report.violations.push(FoldingViolation::NotEquivalent { i: i + 1 });
        }
    }
    Ok(report)
}

/// Componentwise sum of foldings with pairwise orthogonal supports.
pub fn folding_sum(space: &CellSpace, foldings: &[Folding]) -> Result<Folding> {
    assert!(!foldings.is_empty(), "folding_sum needs at least one folding");
    let k = foldings[0].k();
    for phi in foldings {
        if phi.k() != k {
            return Err(CalcError::FoldingArityMismatch(k, phi.k()));
        }
        phi.folded_x()?; // version consistency inside each folding
    }
    for i in 0..foldings.len() {
        for j in (i + 1)..foldings.len() {
            let si = foldings[i].support();
            let sj = foldings[j].support();
            let shared = si.cells().find(|c| sj.contains(*c));
            if let Some(cell) = shared {
                return Err(CalcError::FoldingSupportsOverlap(cell));
            }
        }
    }
    let v = space.version();
    let mut a_list = Vec::with_capacity(k);
    let mut b_list = Vec::with_capacity(k);
    for idx in 0..k {
        let mut a = Element::zero(v);
        let mut b = Element::zero(v);
        for phi in foldings {
            a = add(&a, &phi.a_list[idx])?;
            b = add(&b, &phi.b_list[idx])?;
        }
        a_list.push(a);
        b_list.push(b);
    }
    Folding::new(v, a_list, b_list)
}

/// Pool of cells for deterministic carving, lowest id first.
fn pool_of(cells: impl IntoIterator<Item = CellId>) -> Vec<CellId> {
    let sorted: BTreeSet<CellId> = cells.into_iter().collect();
    let mut pool: Vec<CellId> = sorted.into_iter().collect();
    pool.reverse(); // stack: pop() yields the lowest id
    pool
}

/// Takes cells totaling exactly `need` from the pool, splitting the last
/// one if necessary.
fn carve(rf: &mut Refiner, pool: &mut Vec<CellId>, need: &Rat) -> Result<Vec<CellId>> {
    let mut out = Vec::new();
    let mut need = need.clone();
    while !need.is_zero() {
        let cell = *pool.last().expect("carve pool exhausted");
        let have = rf.space().mass_of(cell)?.clone();
        if have <= need {
            out.push(cell);
            pool.pop();
            need -= have;
        } else {
            let (left, right) = rf.take_mass(cell, &need)?;
            out.push(left);
            *pool.last_mut().unwrap() = right.expect("partial take leaves a remainder");
            need = Rat::zero();
        }
    }
    Ok(out)
}

/// The Local Folding construction: for a positive step element `X`
/// under `P` with `X ⟂ Q ≤ P`, `q(X) = β·D(Q)` and
/// `D(P) ≥ 2[D(s(X)) + D(Q)]`, produces a validated 2-folding of `X` as
/// `β·Q` supported under `P`.
///
/// Mirror regions `S'` and `Q'` are carved from `P`'s free cells in
/// lowest-id order; each quantile step `J` of `X` (value `α_J`, length
/// `ℓ_J`) receives slices `Q_J ≤ Q` and `Q'_J ≤ Q'` with
/// `α_J ℓ_J = β D(Q_J)`, allocated greedily left to right. The step
/// budget `Σ α_J ℓ_J = q(X) = β D(Q)` consumes `Q` exactly.
pub fn local_folding(
    space: &CellSpace,
    x: &Element,
    q: &Projection,
    beta: &Rat,
    p: &Projection,
) -> Result<(CellSpace, Refinement, Folding)> {
    x.check_space(space)?;
    q.check_space(space)?;
    p.check_space(space)?;
    if let Some(cell) = x.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    if let Some((cell, _)) = x.coeffs().find(|(_, (a, _))| *a < Rat::zero()) {
        return Err(CalcError::NotPositive(cell));
    }
    if let Some(cell) = x.support_cells().find(|c| !p.contains(*c)) {
        return Err(CalcError::NotUnderP(cell));
    }
    if let Some(cell) = q.cells().find(|c| !p.contains(*c)) {
        return Err(CalcError::QNotUnderP(cell));
    }
    if let Some(cell) = x.support_cells().find(|c| q.contains(*c)) {
        return Err(CalcError::XNotOrthogonalToQ(cell));
    }
    if *beta <= Rat::zero() {
        return Err(CalcError::NonPositiveBeta(rational::render(beta)));
    }
    let qx = quasitrace(space, x)?;
    let bq = beta * &q.dimension(space)?;
    if qx != bq {
        return Err(CalcError::TraceConditionViolated {
            qx: rational::render(&qx),
            bq: rational::render(&bq),
        });
    }
    let s = support(x);
    let delta = s.dimension(space)?;
    let dq = q.dimension(space)?;
    let dp = p.dimension(space)?;
    let needed = rational::rat_int(2) * (&delta + &dq);
    if dp < needed {
        return Err(CalcError::RoomConditionViolated {
            dp: rational::render(&dp),
            needed: rational::render(&needed),
        });
    }

    let mut rf = Refiner::new(space.clone());
    let mut free = pool_of(p.cells().filter(|c| !s.contains(*c) && !q.contains(*c)));
    let s_mirror = carve(&mut rf, &mut free, &delta)?;
    let q_mirror = carve(&mut rf, &mut free, &dq)?;

    // quantile steps of X: ascending values, ties by id
    let mut cells: Vec<CellId> = x.support_cells().collect();
    cells.sort_by(|a, b| x.pair(*a).0.cmp(&x.pair(*b).0).then(a.cmp(b)));
    let mut steps: Vec<(Rat, Vec<CellId>, Rat)> = Vec::new();
    for id in cells {
        let value = x.pair(id).0;
        let mass = rf.space().mass_of(id)?.clone();
        match steps.last_mut() {
            Some((v, group, len)) if *v == value => {
                group.push(id);
                *len += mass;
            }
            _ => steps.push((value, vec![id], mass)),
        }
    }

    let mut s_mirror_pool = pool_of(s_mirror);
    let mut q_pool = pool_of(q.cells());
    let mut q_mirror_pool = pool_of(q_mirror);
    let mut a_pairs = Vec::new();
    let mut b_pairs = Vec::new();
    let mut v_pairs = Vec::new();
    let mut w_pairs = Vec::new();
    let mut allocated = Rat::zero();
    for (alpha, e_cells, len) in &steps {
        let e_mirror = carve(&mut rf, &mut s_mirror_pool, len)?;
        let dq_j = alpha * len / beta;
        let q_j = carve(&mut rf, &mut q_pool, &dq_j)?;
        let q_j_mirror = carve(&mut rf, &mut q_mirror_pool, &dq_j)?;
        allocated += &dq_j;
        for id in e_cells {
            a_pairs.push((*id, (alpha.clone(), beta.clone())));
            b_pairs.push((*id, (Rat::zero(), -beta.clone())));
        }
        for id in &q_j_mirror {
            a_pairs.push((*id, (Rat::zero(), alpha.clone())));
            b_pairs.push((*id, (Rat::zero(), -alpha.clone())));
        }
        for id in &q_j {
            v_pairs.push((*id, (beta.clone(), alpha.clone())));
            w_pairs.push((*id, (Rat::zero(), -alpha.clone())));
        }
        for id in &e_mirror {
            v_pairs.push((*id, (Rat::zero(), beta.clone())));
            w_pairs.push((*id, (Rat::zero(), -beta.clone())));
        }
    }
    // allocation conservation: the step budget consumes Q exactly
    debug_assert!(q_pool.is_empty() || allocated == dq);
    if allocated != dq {
        return Err(CalcError::InternalVerification(format!(
            "local folding allocated {} of Q, expected {}",
            rational::render(&allocated),
            rational::render(&dq)
        )));
    }
    let (new_space, refinement) = rf.finish();
    let v = new_space.version();
    let phi = Folding::new(
        v,
        vec![Element::from_pairs(v, a_pairs), Element::from_pairs(v, b_pairs)],
        vec![Element::from_pairs(v, v_pairs), Element::from_pairs(v, w_pairs)],
    )?;
    Ok((new_space, refinement, phi))
}

/// Output of [`small_packing`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallPacking {
    pub a1: Element,
    pub a2: Element,
    pub b1: Element,
    pub b2: Element,
    pub y: Element,
    /// number of blocks `2n` used by the construction (0 for `X = 0`)
    pub blocks: usize,
    pub alpha: Rat,
}

/// The Small Packing construction: for a step element `X ⟂ P` and a
/// non-zero `Q ≤ P`, returns `(A1, A2, B1, B2, Y)` with
/// `X = A1 + A2 - B1 - B2 + Y`, `A1,A2,B1 ⟂ P`, `Y` supported under `Q`,
/// `A1 ~ B1`, `A2 ~ B2`, and the listed orthogonality pattern.
///
/// The scale is the support scale of `X` followed by a dimension-α slice
/// of `Q`; block restrictions `f_k` feed the recursion
/// `g_1 = f_1`, `g_k = f_k + Λ_α g_{k-1}`, and the block integrals
/// `V_k = ∫ g_k dE`, `W_k = ∫ Λ_α g_k dE` assemble the five outputs.
pub fn small_packing(
    space: &CellSpace,
    x: &Element,
    p: &Projection,
    q: &Projection,
) -> Result<(CellSpace, Refinement, SmallPacking)> {
    x.check_space(space)?;
    p.check_space(space)?;
    q.check_space(space)?;
    if let Some(cell) = x.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    if let Some(cell) = x.support_cells().find(|c| p.contains(*c)) {
        return Err(CalcError::PackingNotOrthogonal(cell));
    }
    if q.is_zero() {
        return Err(CalcError::PackingZeroQ);
    }
    if let Some(cell) = q.cells().find(|c| !p.contains(*c)) {
        return Err(CalcError::QNotUnderP(cell));
    }
    if x.is_zero() {
        let v = space.version();
        return Ok((
            space.clone(),
            Refinement::identity(v),
            SmallPacking {
                a1: Element::zero(v),
                a2: Element::zero(v),
                b1: Element::zero(v),
                b2: Element::zero(v),
                y: Element::zero(v),
                blocks: 0,
                alpha: Rat::zero(),
            },
        ));
    }

    let delta_x = support(x).dimension(space)?;
    let dq = q.dimension(space)?;
    // smallest n >= 1 with 2n*D(Q) >= D(s(X))
    let ratio = &delta_x / &(rational::rat_int(2) * &dq);
    let n: u64 = rational::ceil_to_int(&ratio).max(BigInt::from(1)).to_u64().expect("block count fits u64");
    let two_n = 2 * n as usize;
    let alpha = &delta_x / &rational::rat_int(2 * n as i64);

    let (fscale, f) = support_scale(space, x)?;
    let mut rf = Refiner::new(space.clone());
    let mut q_cells = pool_of(q.cells());
    let slice = carve(&mut rf, &mut q_cells, &alpha)?;
    let fscale = rf.refinement().apply_scale(&fscale)?;
    let gscale = make_scale(rf.space(), &slice, Projection::empty(rf.space().version()))?;
    let mut scale = concat(rf.space(), &fscale, &gscale)?;

    // pre-split the scale at every point any block integral will touch:
    // the α-translates of f's breakpoints plus the block boundaries
    let end = &alpha * &rational::rat_int(2 * n as i64 + 1);
    let mut points: BTreeSet<Rat> = BTreeSet::new();
    for j in 0..=(two_n as i64 + 1) {
        let shift = &alpha * &rational::rat_int(j);
        for b in f.breaks() {
            let t = b + &shift;
            if t <= end {
                points.insert(t);
            }
        }
        if shift <= end {
            points.insert(shift);
        }
    }
    presplit(&mut rf, &mut scale, &points)?;

    // block restrictions and the overlay recursion
    let mut v_elems: Vec<Element> = Vec::with_capacity(two_n);
    let mut w_elems: Vec<Element> = Vec::with_capacity(two_n);
    let mut g_prev: Option<StepFunction> = None;
    for k in 1..=two_n {
        let lo = &alpha * &rational::rat_int(k as i64 - 1);
        let hi = &alpha * &rational::rat_int(k as i64);
        let f_k = f.restrict(&lo, &hi)?;
        let g_k = match &g_prev {
            None => f_k,
            Some(g) => f_k.add(&g.translate(&alpha))?,
        };
        let v_k = integrate_in(&mut rf, &mut scale, &g_k)?;
        let w_k = integrate_in(&mut rf, &mut scale, &g_k.translate(&alpha))?;
        v_elems.push(v_k);
        w_elems.push(w_k);
        g_prev = Some(g_k);
    }
    let (new_space, refinement) = rf.finish();
    let v = new_space.version();
    debug_assert!(v_elems.iter().chain(w_elems.iter()).all(|e| e.version() == v));

    let mut a1 = Element::zero(v);
    let mut a2 = Element::zero(v);
    let mut b1 = Element::zero(v);
    let mut b2 = Element::zero(v);
    for k in 1..=two_n {
        if k % 2 == 1 {
            a1 = add(&a1, &v_elems[k - 1])?;
            b1 = add(&b1, &w_elems[k - 1])?;
        } else {
            a2 = add(&a2, &v_elems[k - 1])?;
            b2 = add(&b2, &w_elems[k - 1])?;
        }
    }
    let y = w_elems[two_n - 1].clone();
    Ok((
        new_space,
        refinement,
        SmallPacking { a1, a2, b1, b2, y, blocks: two_n, alpha },
    ))
}
