//! The five job runners. Each returns a process exit code:
//! 0 success, 1 verification failures (verify only), 2 malformed input,
//! 3 precondition violation, 4 internal verification failure.

use crate::schema::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fs;
use std::path::Path;
use symfold_core::rational::{self, one, pow, rat, rat_int, Rat};
use symfold_core::*;

// the glob brings in the crate's Result alias; these runners use std's
use std::result::Result;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_MALFORMED: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

fn classify(e: &CalcError) -> u8 {
    use CalcError::*;
    match e {
        NonPositiveMass(_) | NonPositiveAtomMass(_) | MassesExceedTotal { .. }
        | UnknownCell(_) | VersionMismatch { .. } | NotAProjection(_) | BadStepFunction => {
            EXIT_MALFORMED
        }
        TraceNonzero(_) | FullSupport | SupportTooLarge { .. } | NotPositive(_)
        | TraceConditionViolated { .. } | RoomConditionViolated { .. } | NonPositiveBeta(_)
        | XNotOrthogonalToQ(_) | QNotUnderP(_) | NotUnderP(_) | PackingZeroQ
        | PackingNotOrthogonal(_) | NotStep(_) => EXIT_PRECONDITION,
        _ => EXIT_INTERNAL,
    }
}

fn fail(code: u8, msg: impl AsRef<str>) -> u8 {
    eprintln!("symfold: {}", msg.as_ref());
    code
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), u8> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| fail(EXIT_INTERNAL, e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| fail(EXIT_INTERNAL, format!("writing {}: {e}", path.display())))
}

fn read_atoms_file(path: &Path) -> Result<(Vec<(Rat, Rat)>, bool), u8> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_MALFORMED, format!("reading {}: {e}", path.display())))?;
    let file: AtomsFile = serde_json::from_str(&text)
        .map_err(|e| fail(EXIT_MALFORMED, format!("parsing {}: {e}", path.display())))?;
    let atoms = atoms_from_file(&file.atoms)
        .ok_or_else(|| fail(EXIT_MALFORMED, "atoms must be rationals like \"3/4\" or integers"))?;
    for (_, m) in &atoms {
        if *m <= rat_int(0) {
            return Err(fail(EXIT_MALFORMED, "atom masses must be strictly positive"));
        }
    }
    let total: Rat = atoms.iter().map(|(_, m)| m.clone()).sum();
    if total > one() {
        return Err(fail(EXIT_MALFORMED, format!("atom masses sum to {} > 1", rational::render(&total))));
    }
    Ok((atoms, file.stabilize))
}

fn ingest(atoms: &[(Rat, Rat)]) -> Result<(CellSpace, Element), u8> {
    let space = CellSpace::new(one()).map_err(|e| fail(classify(&e), e.to_string()))?;
    let (space, _, x) = from_atoms(&space, atoms).map_err(|e| fail(classify(&e), e.to_string()))?;
    Ok((space, x))
}

fn failures_to_dto(report: &DecompReport) -> VerificationDto {
    VerificationDto {
        passed: report.is_empty(),
        failures: report.failures.iter().map(|f| f.to_string()).collect(),
    }
}

fn summand_dto(space: &CellSpace, s: &Element, order: u32) -> Result<SummandDto, u8> {
    let d = distribution(space, s).map_err(|e| fail(classify(&e), e.to_string()))?;
    let symmetric =
        is_spectrally_symmetric(space, s).map_err(|e| fail(classify(&e), e.to_string()))?;
    let mut odd_moments = Vec::new();
    let mut k = 1;
    while k <= order {
        let m = dist_moment(&d, k).map_err(|e| fail(classify(&e), e.to_string()))?;
        odd_moments.push(MomentRowDto { k, value: rational::render(&m) });
        k += 2;
    }
    Ok(SummandDto {
        element: element_to_dto(s),
        distribution: distribution_to_dto(&d),
        symmetric,
        odd_moments,
    })
}

pub fn run_decompose(input: &Path, output: &Path, order: u32) -> u8 {
    let (atoms, stabilize) = match read_atoms_file(input) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let (space, x) = match ingest(&atoms) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let result = if stabilize {
        stabilize_decompose(&space, &x)
    } else {
        three_symmetric(&space, &x)
    };
    let d = match result {
        Ok(d) => d,
        Err(e) => return fail(classify(&e), e.to_string()),
    };
    let mut summands = Vec::new();
    for s in &d.summands {
        match summand_dto(&d.space, s, order) {
            Ok(dto) => summands.push(dto),
            Err(code) => return code,
        }
    }
    let sum = d
        .summands
        .iter()
        .try_fold(Element::zero(d.input.version()), |acc, e| {
            linear_combine(&one(), &acc, &one(), e)
        })
        .expect("summands share the final version");
    let mut provenance = Vec::new();
    if let Some(p) = &d.provenance.packing {
        for (label, e) in
            [("packing.a1", &p.a1), ("packing.a2", &p.a2), ("packing.b1", &p.b1), ("packing.b2", &p.b2), ("packing.y", &p.y)]
        {
            provenance.push(LabeledElementDto { label: label.to_string(), element: element_to_dto(e) });
        }
    }
    if let Some(f) = &d.provenance.fold {
        for (label, e) in
            [("fold.y1", &f.y1), ("fold.y2", &f.y2), ("fold.s1", &f.s1), ("fold.s2", &f.s2), ("fold.s", &f.s)]
        {
            provenance.push(LabeledElementDto { label: label.to_string(), element: element_to_dto(e) });
        }
    }
    let report = DecompositionFile {
        command: "decompose".to_string(),
        stabilized: stabilize,
        moment_order: order,
        space: space_to_dto(&d.space),
        input: element_to_dto(&d.input),
        summands,
        sum_check: sum == d.input,
        verification: failures_to_dto(&d.report),
        provenance,
    };
    if let Err(code) = write_json(output, &report) {
        return code;
    }
    if !d.report.is_empty() || !report.sum_check {
        return fail(EXIT_INTERNAL, "construction produced a failing verification report (bug)");
    }
    EXIT_OK
}

pub fn run_verify(input: &Path, output: Option<&Path>) -> u8 {
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_MALFORMED, format!("reading {}: {e}", input.display())),
    };
    let file: DecompositionFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_MALFORMED, format!("parsing {}: {e}", input.display())),
    };
    let Some(space) = space_from_dto(&file.space) else {
        return fail(EXIT_MALFORMED, "invalid space table");
    };
    let Some(x) = element_from_dto(&file.input) else {
        return fail(EXIT_MALFORMED, "invalid input element");
    };
    if file.summands.len() != 3 {
        return fail(EXIT_MALFORMED, "expected exactly three summands");
    }
    let mut summands = Vec::new();
    for s in &file.summands {
        let Some(e) = element_from_dto(&s.element) else {
            return fail(EXIT_MALFORMED, "invalid summand element");
        };
        summands.push(e);
    }
    let summands: [Element; 3] = summands.try_into().expect("length checked");
    let report = match verify_decomposition(&space, &x, &summands) {
        Ok(r) => r,
        Err(e) => return fail(classify(&e), e.to_string()),
    };
    let dto = failures_to_dto(&report);
    if let Some(path) = output {
        if let Err(code) = write_json(path, &dto) {
            return code;
        }
    }
    if report.is_empty() {
        println!("verification passed");
        EXIT_OK
    } else {
        for f in &report.failures {
            eprintln!("verification failure: {f}");
        }
        EXIT_VERIFY_FAILED
    }
}

pub fn run_moments(
    input: Option<&Path>,
    order: u32,
    output: &Path,
    quantile_output: Option<&Path>,
    demo_mediator: bool,
) -> u8 {
    let (space, x) = if demo_mediator {
        let space = match CellSpace::new(one()) {
            Ok(s) => s,
            Err(e) => return fail(classify(&e), e.to_string()),
        };
        let m = mediator(&space, &Projection::full(&space)).expect("full projection is valid");
        (space, m)
    } else {
        let Some(path) = input else {
            return fail(EXIT_MALFORMED, "moments needs --input or --demo-mediator");
        };
        let (atoms, _) = match read_atoms_file(path) {
            Ok(v) => v,
            Err(code) => return code,
        };
        match ingest(&atoms) {
            Ok(v) => v,
            Err(code) => return code,
        }
    };
    let w = match quantile(&space, &x) {
        Ok(w) => w,
        Err(e) => return fail(classify(&e), e.to_string()),
    };
    let symmetric = match is_spectrally_symmetric(&space, &x) {
        Ok(b) => b,
        Err(e) => return fail(classify(&e), e.to_string()),
    };
    let trace = quasitrace(&space, &x).expect("versions agree");
    let mut table = String::new();
    table.push_str(&format!("# symmetric={symmetric}\n"));
    table.push_str(&format!("# trace={}\n", rational::render(&trace)));
    table.push_str("k,moment,quantile_moment\n");
    for k in 1..=order {
        let lhs = moment(&space, &x, k).expect("k >= 1");
        let rhs = quantile_moment(&w, k).expect("k >= 1");
        if lhs != rhs {
            return fail(EXIT_INTERNAL, format!("moment mismatch at k={k} (bug)"));
        }
        table.push_str(&format!("{k},{},{}\n", rational::render(&lhs), rational::render(&rhs)));
    }
    if let Err(e) = fs::write(output, table) {
        return fail(EXIT_INTERNAL, format!("writing {}: {e}", output.display()));
    }
    if let Some(qpath) = quantile_output {
        let mut csv = String::from("t,omega,t_float,omega_float\n");
        let mut push_row = |t: &Rat, v: &Rat| {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                rational::render(t),
                rational::render(v),
                rational::to_f64(t),
                rational::to_f64(v)
            ));
        };
        push_row(&rat_int(0), w.value_at_zero());
        for p in w.pieces() {
            push_row(&p.t_lo, &p.v_lo);
            push_row(&p.t_hi, &p.v_hi);
        }
        if let Err(e) = fs::write(qpath, csv) {
            return fail(EXIT_INTERNAL, format!("writing {}: {e}", qpath.display()));
        }
    }
    EXIT_OK
}

fn folding_to_dto(space: &CellSpace, phi: &Folding) -> Result<FoldingDto, u8> {
    let report = validate_folding(space, phi).map_err(|e| fail(classify(&e), e.to_string()))?;
    Ok(FoldingDto {
        a_members: phi.a_list().iter().map(element_to_dto).collect(),
        b_members: phi.b_list().iter().map(element_to_dto).collect(),
        folded_x: element_to_dto(&phi.folded_x().expect("consistent folding")),
        folded_y: element_to_dto(&phi.folded_y().expect("consistent folding")),
        norm: rational::render(&phi.norm()),
        validation: VerificationDto {
            passed: report.is_empty(),
            failures: report.violations.iter().map(|v| v.to_string()).collect(),
        },
    })
}

#[derive(Serialize)]
struct FoldLocalReport {
    command: String,
    beta: String,
    q_dim: String,
    space: SpaceDto,
    x: ElementDto,
    /// the non-decreasing step profile the construction folds
    x_quantile: StepFunctionDto,
    folding: FoldingDto,
}

pub fn run_fold_local(input: &Path, output: &Path) -> u8 {
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_MALFORMED, format!("reading {}: {e}", input.display())),
    };
    let file: FoldLocalFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_MALFORMED, format!("parsing {}: {e}", input.display())),
    };
    let Some(atoms) = atoms_from_file(&file.atoms) else {
        return fail(EXIT_MALFORMED, "atoms must be rationals like \"3/4\" or integers");
    };
    let Some(q_dim) = rat_from_json(&file.q_dim) else {
        return fail(EXIT_MALFORMED, "q_dim must be a rational");
    };
    if q_dim <= rat_int(0) {
        return fail(EXIT_MALFORMED, "q_dim must be strictly positive");
    }
    let (space, x) = match ingest(&atoms) {
        Ok(v) => v,
        Err(code) => return code,
    };
    // carve Q from the complement of the support
    let sup = support(&x);
    let free_dim = match sup.complement(&space).dimension(&space) {
        Ok(d) => d,
        Err(e) => return fail(classify(&e), e.to_string()),
    };
    if q_dim > free_dim {
        return fail(EXIT_PRECONDITION, "q_dim exceeds the free mass outside the support");
    }
    let mut rf = Refiner::new(space.clone());
    let mut q_cells = Vec::new();
    let mut need = q_dim.clone();
    for id in space.cell_ids().filter(|c| !sup.contains(*c)) {
        if need == rat_int(0) {
            break;
        }
        let have = rf.space().mass_of(id).expect("live cell").clone();
        if have <= need {
            q_cells.push(id);
            need -= have;
        } else {
            let (left, _) = rf.take_mass(id, &need).expect("interior take");
            q_cells.push(left);
            need = rat_int(0);
        }
    }
    let (space, refinement) = rf.finish();
    let x = refinement.apply_element(&x).expect("same base version");
    let q = Projection::from_cells(space.version(), q_cells);
    let beta = match &file.beta {
        Some(v) => match rat_from_json(v) {
            Some(b) => b,
            None => return fail(EXIT_MALFORMED, "beta must be a rational"),
        },
        None => {
            let qx = quasitrace(&space, &x).expect("versions agree");
            &qx / &q_dim
        }
    };
    let p = Projection::full(&space);
    let (s2, _, phi) = match local_folding(&space, &x, &q, &beta, &p) {
        Ok(v) => v,
        Err(e) => return fail(classify(&e), e.to_string()),
    };
    let folding = match folding_to_dto(&s2, &phi) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let passed = folding.validation.passed;
    let x_final = phi.folded_x().expect("consistent folding");
    let x_quantile = match scales::support_scale(&s2, &x_final) {
        Ok((_, profile)) => step_function_to_dto(&profile),
        Err(e) => return fail(classify(&e), e.to_string()),
    };
    let report = FoldLocalReport {
        command: "fold-local".to_string(),
        beta: rational::render(&beta),
        q_dim: rational::render(&q_dim),
        space: space_to_dto(&s2),
        x: element_to_dto(&x_final),
        x_quantile,
        folding,
    };
    if let Err(code) = write_json(output, &report) {
        return code;
    }
    if !passed {
        return fail(EXIT_INTERNAL, "constructed folding failed validation (bug)");
    }
    EXIT_OK
}

#[derive(Serialize)]
struct GammaReport {
    command: String,
    seed: u64,
    alpha: String,
    beta: String,
    dims: Vec<String>,
    space: SpaceDto,
    folding: FoldingDto,
    moments: Vec<GammaMomentRow>,
}

#[derive(Serialize)]
struct GammaMomentRow {
    k: u32,
    a_moment: String,
    closed_form_av: String,
    b_moment: String,
    closed_form_bw: String,
}

pub fn run_demo_gamma(seed: u64, output: &Path) -> u8 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_dim = rat(rng.gen_range(1..=8), 64);
    let q_dim = rat(rng.gen_range(1..=8), 64);
    let alpha = rat(rng.gen_range(1..=6), rng.gen_range(1..=4));
    let beta = &alpha * &p_dim / &q_dim;
    let space = CellSpace::new(one()).expect("unit space");
    let mut rf = Refiner::new(space);
    let mut cells = Vec::new();
    let mut cursor = rf.space().cell_ids().next().expect("root");
    for dim in [&p_dim, &q_dim, &p_dim, &q_dim] {
        let (left, right) = rf.take_mass(cursor, dim).expect("fits in the unit space");
        cells.push(left);
        cursor = right.expect("strictly interior");
    }
    let (space, _) = rf.finish();
    let projs: Vec<Projection> = cells
        .into_iter()
        .map(|c| Projection::from_cells(space.version(), [c]))
        .collect();
    let pi = Superprojection::new(&space, projs[0].clone(), projs[1].clone(), projs[2].clone(), projs[3].clone())
        .expect("orthogonal by construction");
    let phi = match gamma_folding(&space, &pi, &alpha, &beta) {
        Ok(p) => p,
        Err(e) => return fail(classify(&e), e.to_string()),
    };
    let lambda = &q_dim / &alpha;
    let ab = &alpha + &beta;
    let mut rows = Vec::new();
    for k in 1..=12u32 {
        let kp1 = rat_int(i64::from(k) + 1);
        let want_av = &lambda * &pow(&ab, k + 1) / &kp1;
        let sign = if k % 2 == 0 { rat_int(1) } else { rat_int(-1) };
        let want_bw = sign * (pow(&alpha, k) * &q_dim + pow(&beta, k) * &p_dim) / &kp1;
        let got_a = moment(&space, &phi.a_list()[0], k).expect("k >= 1");
        let got_b = moment(&space, &phi.a_list()[1], k).expect("k >= 1");
        if got_a != want_av || got_b != want_bw {
            return fail(EXIT_INTERNAL, format!("gamma moment mismatch at k={k} (bug)"));
        }
        rows.push(GammaMomentRow {
            k,
            a_moment: rational::render(&got_a),
            closed_form_av: rational::render(&want_av),
            b_moment: rational::render(&got_b),
            closed_form_bw: rational::render(&want_bw),
        });
    }
    let folding = match folding_to_dto(&space, &phi) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let passed = folding.validation.passed;
    let report = GammaReport {
        command: "demo-gamma".to_string(),
        seed,
        alpha: rational::render(&alpha),
        beta: rational::render(&beta),
        dims: [&p_dim, &q_dim, &p_dim, &q_dim].iter().map(|d| rational::render(d)).collect(),
        space: space_to_dto(&space),
        folding,
        moments: rows,
    };
    if let Err(code) = write_json(output, &report) {
        return code;
    }
    if !passed {
        return fail(EXIT_INTERNAL, "gamma folding failed validation (bug)");
    }
    EXIT_OK
}
