//! Command dispatch: one verification pipeline per subcommand.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Subcommand;
use gcstar::algebra::c_star_spectrum;
use gcstar::bundle::{counterexample_demo, finite_double_dual_check, verify_phi_iso_up_to, DemoRow};
use gcstar::crossed::{
    crossed_spectrum, invariant_ideal_sequence, unitary_action_check, validate_action, ActionIssue, DynamicalSystem,
    FiberedAlgebra, UnitaryBundleAction,
};
use gcstar::groupoid::{orbit_structure, structural_queries, validate, AxiomViolation, StructuralError};
use gcstar::groups::abelian_groups_of_order;
use gcstar::induction::{
    dual_bundle, induce_character, morita_bimodule_check, scalar_rep_residual, stone_von_neumann_check,
    verify_crossed_main_theorem, verify_scalar_main_theorem, GroupoidEquivalence, QuotientSection,
};
use gcstar::report::{BlockRow, Check, Report};
use gcstar::star_algebra::commutant_dimension;
use gcstar::{ElemId, Error, FiniteGroupoid, NumericOptions};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::build::{build_constructor, build_group, build_groupoid, build_system, resolve_table, RawSystem};
use crate::dot::export_dot;
use crate::error::{CliError, Context};
use crate::spec::{parse_spec, GroupoidSpec, SpecDocument};

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Check the groupoid axioms (and the action axioms of a dynamical system).
    Validate { spec: PathBuf },
    /// Sizes, units, orbits, isotropy and structural flags.
    Describe { spec: PathBuf },
    /// Wedderburn blocks of C*(G), or of the crossed product for a dynamical system.
    Spectrum { spec: PathBuf },
    /// Induce a character of the isotropy group at a unit.
    Induce {
        spec: PathBuf,
        #[arg(long)]
        unit: String,
        /// Index of the character in the dual of the isotropy group.
        #[arg(long, default_value_t = 0)]
        character: usize,
    },
    /// Dual orbits of the isotropy against the spectrum of C*(G).
    VerifyMainTheorem { spec: PathBuf },
    /// Orbits of fiber irreps against the spectrum of the crossed product.
    VerifyCrossed { spec: PathBuf },
    /// Bimodule checks for G and a subgroupoid H linked through s^-1(H0).
    MoritaCheck {
        spec: PathBuf,
        /// Use the isotropy group at this unit as H.
        #[arg(long, conflicts_with = "elements")]
        unit: Option<String>,
        /// Use these elements as H.
        #[arg(long, num_args = 1..)]
        elements: Option<Vec<String>>,
    },
    /// Blocks of the crossed product by left translation.
    StoneVonNeumann { spec: PathBuf },
    /// Exact sequence for an invariant set of units.
    InvariantIdeal {
        spec: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        subset: Vec<String>,
    },
    /// Unitary action on a group bundle against the trivial action.
    UnitaryCheck { spec: PathBuf },
    /// Convergent image sequence with an escaping preimage.
    Counterexample {
        /// Optional bundle-demo spec.
        spec: Option<PathBuf>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Finite double duals, for a group spec or every abelian group of an order.
    DoubleDual {
        spec: Option<PathBuf>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Graphviz text of units, orbit relation and orbit clusters.
    Dot { spec: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Describe { .. } => "describe",
            Command::Spectrum { .. } => "spectrum",
            Command::Induce { .. } => "induce",
            Command::VerifyMainTheorem { .. } => "verify-main-theorem",
            Command::VerifyCrossed { .. } => "verify-crossed",
            Command::MoritaCheck { .. } => "morita-check",
            Command::StoneVonNeumann { .. } => "stone-von-neumann",
            Command::InvariantIdeal { .. } => "invariant-ideal",
            Command::UnitaryCheck { .. } => "unitary-check",
            Command::Counterexample { .. } => "counterexample",
            Command::DoubleDual { .. } => "double-dual",
            Command::Dot { .. } => "dot",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Flags {
    pub tol: f64,
    pub seed: Option<u64>,
    pub timing: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Flags { tol: 1e-9, seed: None, timing: false }
    }
}

impl Flags {
    /// Clustering at `tol`, assertions at `10 tol`.
    pub fn options(&self) -> NumericOptions {
        let mut o = NumericOptions::default();
        o.tol = self.tol;
        o.assert_tol = 10.0 * self.tol;
        if let Some(s) = self.seed {
            o = o.with_seed(s);
        }
        o
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CliReport {
    #[serde(flatten)]
    pub report: Report,
    pub details: Value,
}

impl CliReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

#[derive(Clone, Debug)]
pub struct Output {
    pub report: CliReport,
    /// Counterexample rows, written as the CSV table.
    pub rows: Option<Vec<DemoRow>>,
    /// DOT text replaces the report.
    pub dot: Option<String>,
}

struct Input {
    doc: Option<SpecDocument>,
    digest: String,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..16])
}

fn load(path: Option<&Path>) -> Result<Input, CliError> {
    match path {
        None => Ok(Input { doc: None, digest: digest(b"") }),
        Some(p) => {
            let doc = parse_spec(p)?;
            let digest = digest(doc.to_canonical_json().as_bytes());
            Ok(Input { doc: Some(doc), digest })
        }
    }
}

fn incompatible(command: &str, doc: &SpecDocument) -> CliError {
    CliError::Usage(format!("{command} does not accept a {} spec", doc.kind()))
}

fn groupoid_of(command: &str, doc: &SpecDocument) -> Result<FiniteGroupoid, CliError> {
    match doc.groupoid() {
        Some(spec) => build_groupoid(&spec, ""),
        None => Err(incompatible(command, doc)),
    }
}

/// Dynamical systems as given; bare groupoids with scalar fibers.
fn system_of(command: &str, doc: &SpecDocument) -> Result<DynamicalSystem, CliError> {
    match doc {
        SpecDocument::DynamicalSystem(s) => build_system(s)?.into_system(),
        _ => Ok(DynamicalSystem::scalar(groupoid_of(command, doc)?)),
    }
}

fn unit_named(g: &FiniteGroupoid, name: &str) -> Result<ElemId, CliError> {
    match g.find(name) {
        Some(u) if g.is_unit(u) => Ok(u),
        Some(_) => Err(CliError::Usage(format!("{name:?} is not a unit"))),
        None => Err(CliError::Usage(format!("no element named {name:?}"))),
    }
}

fn element_named(g: &FiniteGroupoid, name: &str) -> Result<ElemId, CliError> {
    g.find(name).ok_or_else(|| CliError::Usage(format!("no element named {name:?}")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

struct Outcome {
    checks: Vec<Check>,
    blocks: Vec<BlockRow>,
    details: Value,
    rows: Option<Vec<DemoRow>>,
    dot: Option<String>,
}

impl Outcome {
    fn new(checks: Vec<Check>, details: Value) -> Self {
        Outcome { checks, blocks: Vec::new(), details, rows: None, dot: None }
    }

    fn with_blocks(mut self, blocks: Vec<BlockRow>) -> Self {
        self.blocks = blocks;
        self
    }
}

pub fn run(command: &Command, flags: &Flags) -> Result<Output, CliError> {
    if !(flags.tol.is_finite() && flags.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", flags.tol)));
    }
    let name = command.name();
    let spec_path = match command {
        Command::Counterexample { spec, .. } | Command::DoubleDual { spec, .. } => spec.as_deref(),
        Command::Validate { spec }
        | Command::Describe { spec }
        | Command::Spectrum { spec }
        | Command::Induce { spec, .. }
        | Command::VerifyMainTheorem { spec }
        | Command::VerifyCrossed { spec }
        | Command::MoritaCheck { spec, .. }
        | Command::StoneVonNeumann { spec }
        | Command::InvariantIdeal { spec, .. }
        | Command::UnitaryCheck { spec }
        | Command::Dot { spec } => Some(spec.as_path()),
    };
    let input = load(spec_path)?;
    let opts = flags.options();
    let start = Instant::now();
    let out = match (command, &input.doc) {
        (Command::Counterexample { n_max, .. }, doc) => counterexample(name, doc.as_ref(), *n_max)?,
        (Command::DoubleDual { order, .. }, doc) => double_dual(name, doc.as_ref(), *order)?,
        (_, None) => unreachable!("every other command takes a spec"),
        (Command::Validate { .. }, Some(doc)) => validate_cmd(name, doc, &opts)?,
        (Command::Describe { .. }, Some(doc)) => describe(name, doc)?,
        (Command::Spectrum { .. }, Some(doc)) => spectrum(name, doc, &opts)?,
        (Command::Induce { unit, character, .. }, Some(doc)) => induce(name, doc, unit, *character, &opts)?,
        (Command::VerifyMainTheorem { .. }, Some(doc)) => {
            let g = groupoid_of(name, doc)?;
            let r = verify_scalar_main_theorem(&g, &opts).context(name)?;
            Outcome::new(r.checks.clone(), to_value(&r)).with_blocks(scalar_blocks(&g, &opts)?)
        }
        (Command::VerifyCrossed { .. }, Some(doc)) => {
            let sys = system_of(name, doc)?;
            let r = verify_crossed_main_theorem(&sys, &opts).context(name)?;
            Outcome::new(r.checks.clone(), to_value(&r)).with_blocks(crossed_blocks(&sys, &opts)?)
        }
        (Command::MoritaCheck { unit, elements, .. }, Some(doc)) => {
            morita(name, doc, unit.as_deref(), elements.as_deref(), &opts)?
        }
        (Command::StoneVonNeumann { .. }, Some(doc)) => {
            let g = groupoid_of(name, doc)?;
            let r = stone_von_neumann_check(&g, &opts).context(name)?;
            Outcome::new(r.checks.clone(), to_value(&r))
        }
        (Command::InvariantIdeal { subset, .. }, Some(doc)) => invariant_ideal(name, doc, subset, &opts)?,
        (Command::UnitaryCheck { .. }, Some(doc)) => unitary(name, doc, &opts)?,
        (Command::Dot { .. }, Some(doc)) => {
            let g = match doc {
                SpecDocument::DynamicalSystem(s) => build_groupoid(&s.groupoid, "/groupoid")?,
                _ => groupoid_of(name, doc)?,
            };
            let mut o = Outcome::new(Vec::new(), Value::Null);
            o.dot = Some(export_dot(&g));
            o
        }
    };
    let timing_ms = flags.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let report = Report {
        pipeline: name.to_string(),
        input_digest: input.digest,
        checks: out.checks,
        blocks: out.blocks,
        timing_ms,
    };
    Ok(Output { report: CliReport { report, details: out.details }, rows: out.rows, dot: out.dot })
}

fn scalar_blocks(g: &FiniteGroupoid, opts: &NumericOptions) -> Result<Vec<BlockRow>, CliError> {
    let spec = c_star_spectrum(g, opts).context("spectrum")?;
    Ok(spec.blocks.iter().map(|b| BlockRow { orbit: b.orbit, dim: b.dim, multiplicity: b.multiplicity }).collect())
}

fn crossed_blocks(sys: &DynamicalSystem, opts: &NumericOptions) -> Result<Vec<BlockRow>, CliError> {
    let spec = crossed_spectrum(sys, opts).context("crossed spectrum")?;
    Ok(spec.blocks.iter().map(|b| BlockRow { orbit: b.orbit, dim: b.dim, multiplicity: b.multiplicity }).collect())
}

const AXIOMS: [&str; 9] = [
    "unit",
    "endpoint",
    "composability",
    "product-endpoints",
    "involution",
    "inverse-product",
    "unit-identity",
    "cancellation",
    "associativity",
];

fn named(names: &[String], ids: &[ElemId]) -> String {
    let parts: Vec<&str> = ids.iter().map(|&i| names.get(i).map_or("?", String::as_str)).collect();
    format!("({})", parts.join(", "))
}

fn witness_list(items: Vec<String>) -> String {
    let total = items.len();
    let mut shown: Vec<String> = items.into_iter().take(3).collect();
    if total > 3 {
        shown.push(format!("{} more", total - 3));
    }
    shown.join("; ")
}

fn axiom_checks(names: &[String], structural: &[StructuralError], violations: &[AxiomViolation]) -> Vec<Check> {
    let mut checks = vec![Check::new("table structure", structural.is_empty(), || {
        witness_list(
            structural
                .iter()
                .map(|e| match e {
                    StructuralError::ConflictingProduct { left, right } => {
                        format!("conflicting products for {}", named(names, &[*left, *right]))
                    }
                    other => format!("{other:?}"),
                })
                .collect(),
        )
    })];
    for kind in AXIOMS {
        let bad: Vec<&AxiomViolation> = violations.iter().filter(|v| v.kind() == kind).collect();
        checks.push(Check::new(format!("axiom {kind}"), bad.is_empty(), || {
            witness_list(
                bad.iter()
                    .map(|v| match v {
                        AxiomViolation::Composability { left, right, defined } => format!(
                            "{} {}",
                            named(names, &[*left, *right]),
                            if *defined { "has a product but is not composable" } else { "is composable but has no product" }
                        ),
                        v => named(names, &v.elements()),
                    })
                    .collect(),
            )
        }));
    }
    checks
}

/// Axiom checks of a groupoid spec, plus the groupoid when they pass.
fn groupoid_checks(spec: &GroupoidSpec, ptr: &str) -> Result<(Vec<Check>, Option<FiniteGroupoid>), CliError> {
    match spec {
        GroupoidSpec::GroupoidTable(t) => {
            let resolved = resolve_table(t, ptr)?;
            let report = validate(&resolved.table);
            let checks = axiom_checks(&resolved.table.names, &report.structural, &report.violations);
            let g = if report.is_valid() { Some(build_groupoid(spec, ptr)?) } else { None };
            Ok((checks, g))
        }
        GroupoidSpec::Constructor(c) => {
            let g = build_constructor(c, ptr)?;
            let report = validate(&g.table());
            Ok((axiom_checks(g.names(), &report.structural, &report.violations), Some(g)))
        }
    }
}

fn action_issue(g: &FiniteGroupoid, issue: &ActionIssue) -> String {
    match issue {
        ActionIssue::Shape { element } => format!("wrong shape at {}", g.name(*element)),
        ActionIssue::DimensionMismatch { element, range_dim, source_dim } => {
            format!("{}: range fiber {range_dim} vs source fiber {source_dim}", g.name(*element))
        }
        ActionIssue::NotUnitary { element, residual } => format!("{} not unitary ({residual:.2e})", g.name(*element)),
        ActionIssue::UnitNotIdentity { unit, residual } => format!("{} not the identity ({residual:.2e})", g.name(*unit)),
        ActionIssue::Functoriality { left, right, residual } => {
            format!("alpha fails on ({}, {}) ({residual:.2e})", g.name(*left), g.name(*right))
        }
    }
}

fn validate_cmd(command: &str, doc: &SpecDocument, opts: &NumericOptions) -> Result<Outcome, CliError> {
    match doc {
        SpecDocument::BundleDemo(_) => Err(incompatible(command, doc)),
        SpecDocument::DynamicalSystem(s) => {
            let (mut checks, g) = groupoid_checks(&s.groupoid, "/groupoid")?;
            if g.is_some() {
                let RawSystem { groupoid, dims, unitaries } = build_system(s)?;
                let report = validate_action(&groupoid, &FiberedAlgebra { dims }, &unitaries, opts.assert_tol);
                checks.push(Check::new("action axioms", report.is_valid(), || {
                    witness_list(report.issues.iter().map(|i| action_issue(&groupoid, i)).collect())
                }));
            }
            Ok(Outcome::new(checks, Value::Null))
        }
        _ => {
            let spec = doc.groupoid().expect("groupoid kinds");
            let (checks, g) = groupoid_checks(&spec, "")?;
            let details = g.map_or(Value::Null, |g| json!({ "elements": g.len(), "units": g.units().len() }));
            Ok(Outcome::new(checks, details))
        }
    }
}

fn describe(command: &str, doc: &SpecDocument) -> Result<Outcome, CliError> {
    let (g, fibers) = match doc {
        SpecDocument::DynamicalSystem(s) => {
            let raw = build_system(s)?;
            let fibers: Vec<Value> = raw
                .groupoid
                .units()
                .iter()
                .map(|&u| json!({ "unit": raw.groupoid.name(u), "dim": raw.dims[raw.groupoid.unit_pos(u)] }))
                .collect();
            (raw.groupoid, Some(fibers))
        }
        _ => (groupoid_of(command, doc)?, None),
    };
    let orbits: Vec<Vec<&str>> =
        orbit_structure(&g).orbits.iter().map(|o| o.iter().map(|&u| g.name(u)).collect()).collect();
    let isotropy: Vec<Value> = g
        .units()
        .iter()
        .map(|&u| json!({ "unit": g.name(u), "order": g.isotropy(u).len(), "weight": g.weight(u) }))
        .collect();
    let mut details = json!({
        "elements": g.len(),
        "units": g.units().iter().map(|&u| g.name(u)).collect::<Vec<_>>(),
        "orbits": orbits,
        "isotropy": isotropy,
        "flags": structural_queries(&g),
        "digest": g.digest(),
    });
    if let Some(f) = fibers {
        details["fibers"] = Value::Array(f);
    }
    Ok(Outcome::new(Vec::new(), details))
}

fn spectrum(command: &str, doc: &SpecDocument, opts: &NumericOptions) -> Result<Outcome, CliError> {
    let (algebra_dim, blocks, units): (usize, Vec<BlockRow>, Vec<Vec<String>>) = match doc {
        SpecDocument::DynamicalSystem(_) => {
            let sys = system_of(command, doc)?;
            let g = sys.groupoid();
            let orbits = orbit_structure(g).orbits;
            let blocks = crossed_blocks(&sys, opts)?;
            let units = blocks.iter().map(|b| orbits[b.orbit].iter().map(|&u| g.name(u).to_string()).collect()).collect();
            (sys.crossed_dim(), blocks, units)
        }
        _ => {
            let g = groupoid_of(command, doc)?;
            let orbits = orbit_structure(&g).orbits;
            let blocks = scalar_blocks(&g, opts)?;
            let units = blocks.iter().map(|b| orbits[b.orbit].iter().map(|&u| g.name(u).to_string()).collect()).collect();
            (g.len(), blocks, units)
        }
    };
    let sum: usize = blocks.iter().map(|b| b.dim * b.dim).sum();
    let checks = vec![Check::new("sum of squared block dimensions equals the algebra dimension", sum == algebra_dim, || {
        format!("{sum} != {algebra_dim}")
    })];
    let details = json!({ "algebra_dim": algebra_dim, "orbit_units": units });
    Ok(Outcome::new(checks, details).with_blocks(blocks))
}

fn induce(command: &str, doc: &SpecDocument, unit: &str, k: usize, opts: &NumericOptions) -> Result<Outcome, CliError> {
    let g = groupoid_of(command, doc)?;
    let u = unit_named(&g, unit)?;
    let dual = dual_bundle(&g).context("dual of the isotropy")?;
    let at_unit = &dual.by_unit[g.unit_pos(u)];
    let &index = at_unit.get(k).ok_or_else(|| {
        CliError::Usage(format!("the isotropy at {unit} has {} characters, index {k} requested", at_unit.len()))
    })?;
    let omega = &dual.characters[index];
    let rep = induce_character(&g, omega, &QuotientSection::minimal(&g, u)).context("induction")?;
    let residual = scalar_rep_residual(&g, &rep, opts).context("representation check")?;
    let commutant = commutant_dimension(&rep, opts);
    let orbit = orbit_structure(&g);
    let orbit_size = orbit.orbits[orbit.orbit_of(&g, u)].len();
    let checks = vec![
        Check::residual("representation of C*(G)", residual, opts.assert_tol),
        Check::new("irreducible", commutant == 1, || format!("commutant dimension {commutant}")).with_value(commutant as f64),
        Check::new("dimension equals orbit size", rep.dim == orbit_size, || format!("{} != {orbit_size}", rep.dim)),
    ];
    let details = json!({
        "unit": unit,
        "character": k,
        "turns": omega.character.turns,
        "exponent": omega.character.exponent,
        "representation": rep,
    });
    Ok(Outcome::new(checks, details))
}

fn morita(
    command: &str,
    doc: &SpecDocument,
    unit: Option<&str>,
    elements: Option<&[String]>,
    opts: &NumericOptions,
) -> Result<Outcome, CliError> {
    let g = groupoid_of(command, doc)?;
    let h_elems: Vec<ElemId> = match (unit, elements) {
        (_, Some(names)) => names.iter().map(|n| element_named(&g, n)).collect::<Result<_, _>>()?,
        (Some(u), None) => g.isotropy(unit_named(&g, u)?),
        (None, None) => g.isotropy(g.units()[0]),
    };
    let h_names: Vec<&str> = h_elems.iter().map(|&x| g.name(x)).collect();
    match GroupoidEquivalence::from_subgroupoid(&g, &h_elems) {
        Ok((h, x)) => {
            let r = morita_bimodule_check(&g, &h, &x, opts).context(command)?;
            let mut details = to_value(&r);
            details["subgroupoid"] = json!(h_names);
            Ok(Outcome::new(r.checks.clone(), details))
        }
        Err(Error::InvalidEquivalence(why)) => Ok(Outcome::new(
            vec![Check::new("equivalence axioms", false, || why)],
            json!({ "subgroupoid": h_names }),
        )),
        Err(e) => Err(CliError::Core { context: command.into(), source: e }),
    }
}

fn invariant_ideal(command: &str, doc: &SpecDocument, subset: &[String], opts: &NumericOptions) -> Result<Outcome, CliError> {
    let sys = system_of(command, doc)?;
    let g = sys.groupoid();
    let units: Vec<ElemId> = subset.iter().map(|n| unit_named(g, n)).collect::<Result<_, _>>()?;
    let r = match invariant_ideal_sequence(&sys, &units, opts) {
        Ok(r) => r,
        Err(Error::NotInvariant { element }) => {
            return Ok(Outcome::new(
                vec![Check::new("subset is invariant", false, || {
                    format!("{} joins the subset to its complement", g.name(element))
                })],
                json!({ "subset": subset }),
            ))
        }
        Err(e) => return Err(CliError::Core { context: command.into(), source: e }),
    };
    let checks = vec![
        Check::new("subset is invariant", true, String::new),
        Check::residual("ideal", r.ideal_residual, opts.assert_tol),
        Check::residual("restriction is a *-homomorphism", r.restriction_residual, opts.assert_tol),
        Check::new("dimensions add up", r.additive, || {
            format!("{} + {} != {}", r.dim_ideal, r.dim_quotient, r.dim_total)
        }),
        Check::new("kernel of restriction is the ideal", r.kernel_matches, || "kernel differs".into()),
        Check::new("restriction is onto", r.surjective, || "image is too small".into()),
    ];
    Ok(Outcome::new(checks, to_value(&r)))
}

fn unitary(command: &str, doc: &SpecDocument, opts: &NumericOptions) -> Result<Outcome, CliError> {
    let SpecDocument::DynamicalSystem(s) = doc else { return Err(incompatible(command, doc)) };
    let raw = build_system(s)?;
    if !structural_queries(&raw.groupoid).is_group_bundle {
        return Err(CliError::Usage(format!("{command} needs a dynamical system over a group bundle")));
    }
    let action = match UnitaryBundleAction::new(raw.groupoid, raw.dims, raw.unitaries) {
        Ok(a) => a,
        Err(Error::InvalidAction(why)) => {
            return Ok(Outcome::new(vec![Check::new("strictly multiplicative unitaries", false, || why)], Value::Null))
        }
        Err(e) => return Err(CliError::Core { context: command.into(), source: e }),
    };
    let r = unitary_action_check(&action, opts).context(command)?;
    let checks = r
        .fibers
        .iter()
        .map(|f| {
            Check::new(format!("fiber {}", f.unit), f.passed, || {
                format!(
                    "hom residual {:.2e}, star residual {:.2e}, rank {}/{}, blocks {:?} vs {:?}",
                    f.hom_residual, f.star_residual, f.rank, f.expected_rank, f.twisted_dims, f.tensor_dims
                )
            })
        })
        .collect();
    Ok(Outcome::new(checks, to_value(&r)))
}

const DEFAULT_N_MAX: usize = 20;
const DEFAULT_PHI_UP_TO: u32 = 10;

fn counterexample(command: &str, doc: Option<&SpecDocument>, n_max: Option<usize>) -> Result<Outcome, CliError> {
    let demo_spec = match doc {
        None => Default::default(),
        Some(SpecDocument::BundleDemo(d)) => d.clone(),
        Some(other) => return Err(incompatible(command, other)),
    };
    let n = n_max.or(demo_spec.n_max).unwrap_or(DEFAULT_N_MAX);
    let up_to = demo_spec.phi_up_to.unwrap_or(DEFAULT_PHI_UP_TO);
    let demo = counterexample_demo(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let phi = verify_phi_iso_up_to(up_to, gcstar::Exec::default()).context("fiber isomorphisms")?;
    let mut checks = vec![
        Check::new("image sequence converges", demo.image.is_convergent(), || format!("{:?}", demo.image.verdict)),
        Check::new("preimage sequence escapes", demo.preimage.is_escaping(), || {
            format!("{:?}", demo.preimage.verdict)
        }),
    ];
    checks.extend(phi.fibers.iter().map(|f| {
        Check::new(format!("fiber {} isomorphism", f.n), f.bijective && f.multiplicative_failures == 0, || {
            format!("bijective {}, {} multiplicative failures, first {:?}", f.bijective, f.multiplicative_failures, f.witness)
        })
    }));
    let details = json!({ "n_max": n, "phi_up_to": up_to, "demo": demo, "phi": phi });
    let mut o = Outcome::new(checks, details);
    o.rows = Some(demo.rows);
    Ok(o)
}

fn double_dual(command: &str, doc: Option<&SpecDocument>, order: Option<usize>) -> Result<Outcome, CliError> {
    let groups = match (doc, order) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either a group spec or --order, not both".into())),
        (None, None) => return Err(CliError::Usage("double-dual needs a group spec or --order".into())),
        (None, Some(n)) => abelian_groups_of_order(n)
            .context("abelian groups")?
            .into_iter()
            .map(|(factors, g)| (format!("Z{factors:?}"), g))
            .collect::<Vec<_>>(),
        (Some(d), None) => {
            let SpecDocument::Constructor(c) = d else { return Err(incompatible(command, d)) };
            let g = build_group(c, "")?.ok_or_else(|| CliError::Usage(format!("{command} needs a group constructor")))?;
            vec![(format!("group of order {}", g.order()), g)]
        }
    };
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for (label, g) in &groups {
        let r = finite_double_dual_check(g).context(format!("{command} on {label}"))?;
        checks.push(Check::new(format!("double dual of {label}"), r.passed, || {
            format!("homomorphism {}, injective {}, onto {}", r.homomorphism, r.injective, r.onto_double_dual)
        }));
        reports.push(json!({ "group": label, "report": r }));
    }
    Ok(Outcome::new(checks, Value::Array(reports)))
}
