//! End-to-end pipelines: fold a trace-zero element as a spectrally
//! symmetric one, split it into three commuting symmetric summands, and
//! stabilize full-support inputs by a mass-doubling embedding. A
//! construction-independent verifier re-checks every claim from the data
//! alone.

use crate::cellspace::{CellId, CellSpace, Refinement, Refiner};
use crate::element::{
    add, from_atoms, quasitrace, sub, support, Element, Projection,
};
use crate::error::CalcError;
use crate::folding::{folding_sum, local_folding, Folding};
use crate::rational::{self, Rat};
use crate::spectra::{dist_moment, distribution, is_spectrally_symmetric};
use crate::Result;
use num_traits::Zero;
use std::collections::BTreeSet;

/// Pieces recorded along the decomposition, all living on the final
/// space. The packing identity `X = A1 + A2 - B1 - B2 + Y` and the fold
/// identity `Y = (Y1 - S1) + (Y2 - S2) + S` both hold exactly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub packing: Option<PackingPieces>,
    pub fold: Option<FoldPieces>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingPieces {
    pub a1: Element,
    pub a2: Element,
    pub b1: Element,
    pub b2: Element,
    pub y: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPieces {
    pub y1: Element,
    pub y2: Element,
    pub s1: Element,
    pub s2: Element,
    pub s: Element,
}

/// A verified three-way decomposition: `input = x1 + x2 + x3` with each
/// summand spectrally symmetric, all on one common space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub space: CellSpace,
    pub input: Element,
    pub summands: [Element; 3],
    pub provenance: Provenance,
    pub report: DecompReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompFailure {
    /// a summand is tagged with a different space version than the input
    VersionMismatch { index: usize, found: u64 },
    /// the summands do not reconstruct the input cellwise
    SumMismatch,
    /// a summand's distribution differs from its mirror
    NotSymmetric { index: usize },
    /// an odd moment of a summand fails to vanish
    OddMomentNonzero { index: usize, k: u32, value: String },
}

impl std::fmt::Display for DecompFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecompFailure::VersionMismatch { index, found } => {
                write!(f, "summand {index} lives on version {found}")
            }
            DecompFailure::SumMismatch => write!(f, "summands do not add up to the input"),
            DecompFailure::NotSymmetric { index } => {
                write!(f, "summand {index} is not spectrally symmetric")
            }
            DecompFailure::OddMomentNonzero { index, k, value } => {
                write!(f, "summand {index} has odd moment k={k} equal to {value}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecompReport {
    pub failures: Vec<DecompFailure>,
}

impl DecompReport {
    pub fn is_empty(&self) -> bool {
        self.failures.is_empty()
    }
}

fn pool_of(cells: impl IntoIterator<Item = CellId>) -> Vec<CellId> {
    let sorted: BTreeSet<CellId> = cells.into_iter().collect();
    let mut pool: Vec<CellId> = sorted.into_iter().collect();
    pool.reverse();
    pool
}

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

/// Splits a step element into its positive-cell and negative-cell parts
/// (no coordinate splits needed).
fn step_parts(x: &Element) -> (Element, Element) {
    let mut pos = Vec::new();
    let mut negv = Vec::new();
    for (id, (a, b)) in x.coeffs() {
        debug_assert!(b.is_zero());
        if *a > Rat::zero() {
            pos.push((id, (a.clone(), Rat::zero())));
        } else {
            negv.push((id, (-a, Rat::zero())));
        }
    }
    (Element::from_pairs(x.version(), pos), Element::from_pairs(x.version(), negv))
}

/// Folds a trace-zero step element as a spectrally symmetric one
/// inside an ambient projection: produces a symmetric step element `S`
/// and a 2-folding of `X` as `S`, both supported under `ambient`.
///
/// Layout: with `E1 = s(X+)`, `E2 = s(X-)`, the free region of the
/// ambient is carved (lowest id first) into mirrors `E3 ~ E1`,
/// `E4 ~ E2` and four projections `Q1..Q4` of equal dimension
/// `δ = (D(ambient) - 2 D(E1) - 2 D(E2)) / 4`; with `β = q(X+)/δ` the
/// positive part folds as `β·Q1` inside `P1 = E1+E3+Q1+Q2`, the negative
/// part as `β·Q3` inside `P2 = E2+E4+Q3+Q4`, and `S = β·Q1 − β·Q3`.
pub fn fold_as_symmetric_within(
    space: &CellSpace,
    x: &Element,
    ambient: &Projection,
) -> Result<(CellSpace, Refinement, Element, Folding)> {
    x.check_space(space)?;
    ambient.check_space(space)?;
    if let Some(cell) = x.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    if let Some(cell) = x.support_cells().find(|c| !ambient.contains(*c)) {
        return Err(CalcError::NotUnderP(cell));
    }
    let qx = quasitrace(space, x)?;
    if !qx.is_zero() {
        return Err(CalcError::TraceNonzero(rational::render(&qx)));
    }
    let m_amb = ambient.dimension(space)?;
    let d_support = support(x).dimension(space)?;
    let bound = &m_amb / &rational::rat_int(2);
    if d_support >= bound {
        return Err(CalcError::SupportTooLarge {
            got: rational::render(&d_support),
            bound: rational::render(&bound),
        });
    }
    if x.is_zero() {
        let v = space.version();
        return Ok((
            space.clone(),
            Refinement::identity(v),
            Element::zero(v),
            Folding::zero(v, 2),
        ));
    }

    let (x_pos, x_neg) = step_parts(x);
    let e1 = support(&x_pos);
    let e2 = support(&x_neg);
    let d1 = e1.dimension(space)?;
    let d2 = e2.dimension(space)?;
    let delta = (&m_amb - &(rational::rat_int(2) * &(&d1 + &d2))) / &rational::rat_int(4);
    let beta = quasitrace(space, &x_pos)? / &delta;

    let mut rf = Refiner::new(space.clone());
    let sup = support(x);
    let mut free = pool_of(ambient.cells().filter(|c| !sup.contains(*c)));
    let e3 = carve(&mut rf, &mut free, &d1)?;
    let e4 = carve(&mut rf, &mut free, &d2)?;
    let q1 = carve(&mut rf, &mut free, &delta)?;
    let q2 = carve(&mut rf, &mut free, &delta)?;
    let q3 = carve(&mut rf, &mut free, &delta)?;
    let q4 = carve(&mut rf, &mut free, &delta)?;
    let (s1_space, carve_ref) = rf.finish();
    let v1 = s1_space.version();
    let x_pos = carve_ref.apply_element(&x_pos)?;
    let x_neg = carve_ref.apply_element(&x_neg)?;
    let e1 = carve_ref.apply_projection(&e1)?;
    let e2 = carve_ref.apply_projection(&e2)?;
    let e3 = Projection::from_cells(v1, e3);
    let e4 = Projection::from_cells(v1, e4);
    let q1 = Projection::from_cells(v1, q1);
    let q2 = Projection::from_cells(v1, q2);
    let q3 = Projection::from_cells(v1, q3);
    let q4 = Projection::from_cells(v1, q4);
    let p1 = e1.join(&e3).join(&q1).join(&q2);
    let p2 = e2.join(&e4).join(&q3).join(&q4);

    let (s2_space, fold_pos_ref, phi_pos) = local_folding(&s1_space, &x_pos, &q1, &beta, &p1)?;
    let x_neg = fold_pos_ref.apply_element(&x_neg)?;
    let q3 = fold_pos_ref.apply_projection(&q3)?;
    let q1 = fold_pos_ref.apply_projection(&q1)?;
    let p2 = fold_pos_ref.apply_projection(&p2)?;
    let (s3_space, fold_neg_ref, gamma) = local_folding(&s2_space, &x_neg, &q3, &beta, &p2)?;
    let phi_pos = phi_pos.remap(&fold_neg_ref)?;
    let phi_neg = gamma.negate();
    let phi = folding_sum(&s3_space, &[phi_pos, phi_neg])?;
    let q1 = fold_neg_ref.apply_projection(&q1)?;
    let q3 = fold_neg_ref.apply_projection(&q3)?;
    let s_elem = {
        let plus = crate::element::scale_element(&beta, &q1.to_element());
        let minus = crate::element::scale_element(&beta, &q3.to_element());
        sub(&plus, &minus)?
    };
    let total_ref = carve_ref.then(&fold_pos_ref).then(&fold_neg_ref);
    Ok((s3_space, total_ref, s_elem, phi))
}

/// Folds `X` as a spectrally symmetric element over the whole space
/// (requires `q(X) = 0` and `D(s(X)) <` half the total mass).
pub fn fold_as_symmetric(
    space: &CellSpace,
    x: &Element,
) -> Result<(CellSpace, Refinement, Element, Folding)> {
    fold_as_symmetric_within(space, x, &Projection::full(space))
}

/// Explicit cell budget for the decomposition pipeline: exceeding it is
/// a bug, not an input problem.
fn cell_budget(input_cells: usize, blocks: usize) -> usize {
    64 + 8 * (input_cells + 4) * (blocks + 4)
}

/// Decomposes a trace-zero step element without full support into three
/// commuting spectrally symmetric summands.
///
/// Pipeline: `P = I - s(X)`; `Q ≤ P` with `D(Q) = D(P)/4`; small packing
/// of `X` against `(P, Q)` leaves a remainder `Y` under `Q` with
/// `q(Y) = 0`; folding `Y` as a symmetric `S` inside `P` yields
/// `X1 = (A1-B1)+(Y1-S1)`, `X2 = (A2-B2)+S`, `X3 = Y2-S2`.
///
/// ```
/// use symfold_core::rational::{one, rat};
/// use symfold_core::{from_atoms, is_spectrally_symmetric, three_symmetric, CellSpace};
///
/// let space = CellSpace::new(one()).unwrap();
/// let (space, _, x) =
///     from_atoms(&space, &[(rat(3, 1), rat(1, 8)), (rat(-1, 1), rat(3, 8))]).unwrap();
/// let d = three_symmetric(&space, &x).unwrap();
/// assert!(d.report.is_empty());
/// for summand in &d.summands {
///     assert!(is_spectrally_symmetric(&d.space, summand).unwrap());
/// }
/// ```
pub fn three_symmetric(space: &CellSpace, x: &Element) -> Result<Decomposition> {
    x.check_space(space)?;
    if let Some(cell) = x.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    let qx = quasitrace(space, x)?;
    if !qx.is_zero() {
        return Err(CalcError::TraceNonzero(rational::render(&qx)));
    }
    let sup = support(x);
    if sup.dimension(space)? >= *space.total_mass() {
        return Err(CalcError::FullSupport);
    }
    if x.is_zero() {
        let v = space.version();
        let zero = Element::zero(v);
        return Ok(Decomposition {
            space: space.clone(),
            input: zero.clone(),
            summands: [zero.clone(), zero.clone(), zero],
            provenance: Provenance::default(),
            report: DecompReport::default(),
        });
    }
    let input_cells = space.cell_count();

    let p = sup.complement(space);
    let dq = p.dimension(space)? / &rational::rat_int(4);
    let mut rf = Refiner::new(space.clone());
    let mut pool = pool_of(p.cells());
    let q_cells = carve(&mut rf, &mut pool, &dq)?;
    let (s1_space, carve_ref) = rf.finish();
    let x1v = carve_ref.apply_element(x)?;
    let p1v = carve_ref.apply_projection(&p)?;
    let q = Projection::from_cells(s1_space.version(), q_cells);

    let (s2_space, pack_ref, pack) = crate::folding::small_packing(&s1_space, &x1v, &p1v, &q)?;
    let x2v = pack_ref.apply_element(&x1v)?;
    let p2v = pack_ref.apply_projection(&p1v)?;
    let qy = quasitrace(&s2_space, &pack.y)?;
    if !qy.is_zero() {
        return Err(CalcError::InternalVerification(format!(
            "packing remainder has trace {}",
            rational::render(&qy)
        )));
    }

    let (s3_space, fold_ref, s_elem, phi) =
        fold_as_symmetric_within(&s2_space, &pack.y, &p2v)?;
    let x3v = fold_ref.apply_element(&x2v)?;
    let a1 = fold_ref.apply_element(&pack.a1)?;
    let a2 = fold_ref.apply_element(&pack.a2)?;
    let b1 = fold_ref.apply_element(&pack.b1)?;
    let b2 = fold_ref.apply_element(&pack.b2)?;
    let y = fold_ref.apply_element(&pack.y)?;
    let y1 = phi.a_list()[0].clone();
    let y2 = phi.a_list()[1].clone();
    let s1 = phi.b_list()[0].clone();
    let s2 = phi.b_list()[1].clone();

    let x_1 = add(&sub(&a1, &b1)?, &sub(&y1, &s1)?)?;
    let x_2 = add(&sub(&a2, &b2)?, &s_elem)?;
    let x_3 = sub(&y2, &s2)?;

    let budget = cell_budget(input_cells, pack.blocks + 1);
    if s3_space.cell_count() > budget {
        return Err(CalcError::CostBoundExceeded {
            got: s3_space.cell_count(),
            bound: budget,
        });
    }

    let summands = [x_1, x_2, x_3];
    let report = verify_decomposition(&s3_space, &x3v, &summands)?;
    Ok(Decomposition {
        space: s3_space,
        input: x3v,
        summands,
        provenance: Provenance {
            packing: Some(PackingPieces { a1, a2, b1, b2, y }),
            fold: Some(FoldPieces { y1, y2, s1, s2, s: s_elem }),
        },
        report,
    })
}

/// Stabilized decomposition for inputs whose support may be full: embeds
/// `X` into a doubled space (every atom's mass halved, a fresh zero
/// region of half the total mass) and decomposes the embedding. The
/// summands sum to the embedded element.
pub fn stabilize_decompose(space: &CellSpace, x: &Element) -> Result<Decomposition> {
    x.check_space(space)?;
    if let Some(cell) = x.non_step_cell() {
        return Err(CalcError::NotStep(cell));
    }
    let qx = quasitrace(space, x)?;
    if !qx.is_zero() {
        return Err(CalcError::TraceNonzero(rational::render(&qx)));
    }
    let (embedded_space, embedded) = embed_halved(space, x)?;
    three_symmetric(&embedded_space, &embedded)
}

/// The corner embedding rendered distributionally: a fresh space of the
/// same total mass carrying half of the element's distribution plus an
/// extra zero atom of half the total mass. `q` of the embedding is half
/// the original trace.
pub fn embed_halved(space: &CellSpace, x: &Element) -> Result<(CellSpace, Element)> {
    let d = distribution(space, x)?;
    let half = rational::rat(1, 2);
    let atoms: Vec<(Rat, Rat)> = d
        .atoms()
        .iter()
        .filter(|(v, _)| !v.is_zero())
        .map(|(v, m)| (v.clone(), m * &half))
        .collect();
    let fresh = CellSpace::new(space.total_mass().clone())?;
    let (new_space, _, embedded) = from_atoms(&fresh, &atoms)?;
    Ok((new_space, embedded))
}

/// Re-checks a decomposition from the data alone: common-space
/// representability, exact cellwise sum, the distribution-mirror
/// symmetry of each summand (this is the exact certificate), and an
/// odd-moment cross-check up to `k = 2·(input atom count) + 1`.
/// Order-independent in the summands.
pub fn verify_decomposition(
    space: &CellSpace,
    x: &Element,
    summands: &[Element; 3],
) -> Result<DecompReport> {
    let mut report = DecompReport::default();
    for (i, s) in summands.iter().enumerate() {
        if s.version() != x.version() || s.version() != space.version() {
            report
                .failures
                .push(DecompFailure::VersionMismatch { index: i + 1, found: s.version() });
        }
    }
    if !report.is_empty() {
        return Ok(report);
    }
    let mut total = Element::zero(x.version());
    for s in summands {
        total = add(&total, s)?;
    }
    if total != *x {
        report.failures.push(DecompFailure::SumMismatch);
    }
    let kmax = 2 * (distribution(space, x)?.atom_count() as u32) + 1;
    for (i, s) in summands.iter().enumerate() {
        if !is_spectrally_symmetric(space, s)? {
            report.failures.push(DecompFailure::NotSymmetric { index: i + 1 });
        }
        // independent cross-check through odd moments
        let d = distribution(space, s)?;
        let mut k = 1;
        while k <= kmax {
            let m = dist_moment(&d, k)?;
            if !m.is_zero() {
                report.failures.push(DecompFailure::OddMomentNonzero {
                    index: i + 1,
                    k,
                    value: rational::render(&m),
                });
                break;
            }
            k += 2;
        }
    }
    Ok(report)
}
