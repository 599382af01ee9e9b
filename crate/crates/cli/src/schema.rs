//! JSON schema of the CLI: rationals travel as `"p/q"` strings (plain
//! integers accepted on input), spaces and elements as per-cell tables.
//! All structures round-trip exactly.

use serde::{Deserialize, Serialize};
use symfold_core::rational::{self, Rat};
use symfold_core::{CellId, CellSpace, Element, SpectralDistribution};

/// Input file for `decompose` and `moments`: a list of atoms on the unit
/// mass space, plus the stabilize flag.
#[derive(Debug, Deserialize)]
pub struct AtomsFile {
    pub atoms: Vec<AtomIn>,
    #[serde(default)]
    pub stabilize: bool,
}

#[derive(Debug, Deserialize)]
pub struct AtomIn {
    pub value: serde_json::Value,
    pub mass: serde_json::Value,
}

/// Input file for `fold-local`.
#[derive(Debug, Deserialize)]
pub struct FoldLocalFile {
    pub atoms: Vec<AtomIn>,
    pub q_dim: serde_json::Value,
    #[serde(default)]
    pub beta: Option<serde_json::Value>,
}

/// Accepts `"p/q"`, `"p"`, or a JSON integer.
pub fn rat_from_json(v: &serde_json::Value) -> Option<Rat> {
    match v {
        serde_json::Value::String(s) => rational::parse(s),
        serde_json::Value::Number(n) => n.as_i64().map(rational::rat_int),
        _ => None,
    }
}

pub fn atoms_from_file(file: &[AtomIn]) -> Option<Vec<(Rat, Rat)>> {
    file.iter()
        .map(|a| Some((rat_from_json(&a.value)?, rat_from_json(&a.mass)?)))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpaceDto {
    pub version: u64,
    pub total_mass: String,
    pub cells: Vec<CellDto>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CellDto {
    pub id: u64,
    pub mass: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ElementDto {
    pub version: u64,
    pub coeffs: Vec<CoeffDto>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CoeffDto {
    pub cell: u64,
    pub a: String,
    pub b: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DistributionDto {
    pub atoms: Vec<DistAtomDto>,
    pub density: Vec<DensityDto>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DistAtomDto {
    pub value: String,
    pub mass: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DensityDto {
    pub lo: String,
    pub hi: String,
    pub height: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MomentRowDto {
    pub k: u32,
    pub value: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SummandDto {
    pub element: ElementDto,
    pub distribution: DistributionDto,
    pub symmetric: bool,
    pub odd_moments: Vec<MomentRowDto>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerificationDto {
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabeledElementDto {
    pub label: String,
    pub element: ElementDto,
}

/// The decomposition report file: enough data to re-verify from scratch
/// plus human-oriented detail tables.
#[derive(Debug, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub command: String,
    pub stabilized: bool,
    pub moment_order: u32,
    pub space: SpaceDto,
    pub input: ElementDto,
    pub summands: Vec<SummandDto>,
    pub sum_check: bool,
    pub verification: VerificationDto,
    pub provenance: Vec<LabeledElementDto>,
}

/// A step function as a sorted breakpoint list: `values[i]` holds on
/// `[breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Serialize, Deserialize)]
pub struct StepFunctionDto {
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
}

pub fn step_function_to_dto(f: &symfold_core::StepFunction) -> StepFunctionDto {
    StepFunctionDto {
        breakpoints: f.breaks().iter().map(rational::render).collect(),
        values: f.values().iter().map(rational::render).collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct FoldingDto {
    pub a_members: Vec<ElementDto>,
    pub b_members: Vec<ElementDto>,
    pub folded_x: ElementDto,
    pub folded_y: ElementDto,
    pub norm: String,
    pub validation: VerificationDto,
}

pub fn space_to_dto(space: &CellSpace) -> SpaceDto {
    SpaceDto {
        version: space.version(),
        total_mass: rational::render(space.total_mass()),
        cells: space
            .cells()
            .map(|c| CellDto { id: c.id.0, mass: rational::render(&c.mass) })
            .collect(),
    }
}

pub fn space_from_dto(dto: &SpaceDto) -> Option<CellSpace> {
    let total = rational::parse(&dto.total_mass)?;
    let cells = dto
        .cells
        .iter()
        .map(|c| Some((CellId(c.id), rational::parse(&c.mass)?)))
        .collect::<Option<Vec<_>>>()?;
    CellSpace::from_parts(dto.version, total, cells).ok()
}

pub fn element_to_dto(e: &Element) -> ElementDto {
    ElementDto {
        version: e.version(),
        coeffs: e
            .coeffs()
            .map(|(id, (a, b))| CoeffDto {
                cell: id.0,
                a: rational::render(a),
                b: rational::render(b),
            })
            .collect(),
    }
}

pub fn element_from_dto(dto: &ElementDto) -> Option<Element> {
    let pairs = dto
        .coeffs
        .iter()
        .map(|c| Some((CellId(c.cell), (rational::parse(&c.a)?, rational::parse(&c.b)?))))
        .collect::<Option<Vec<_>>>()?;
    Some(Element::from_pairs(dto.version, pairs))
}

pub fn distribution_to_dto(d: &SpectralDistribution) -> DistributionDto {
    DistributionDto {
        atoms: d
            .atoms()
            .iter()
            .map(|(v, m)| DistAtomDto { value: rational::render(v), mass: rational::render(m) })
            .collect(),
        density: d
            .density()
            .iter()
            .map(|(lo, hi, h)| DensityDto {
                lo: rational::render(lo),
                hi: rational::render(hi),
                height: rational::render(h),
            })
            .collect(),
    }
}
