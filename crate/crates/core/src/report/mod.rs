//! Run configuration, report assembly and deterministic emission.

mod scenario_file;

pub use scenario_file::{ScenarioFile, DEFAULT_SAMPLES, DEFAULT_SEED};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::actions::{verify_moment_map, MomentMapReport};
use crate::catalog::{
    by_name, deformation_hypotheses_hold, deformation_invariant, maurer_cartan_vanishes,
    AlphaResult, CatalogCase, CatalogError, Expected, CASE_NAMES,
};
use crate::exterior::DeformationBivector;
use crate::linalg::{RANK_TOL, VALIDITY_TOL};
use crate::reduction::{
    closure_test, quotient_bihermitian, quotient_frames, sample_level_set, verify_type_formula,
    ClosureReport, FormulaReport, LevelPoint, ReductionError, Scenario, TypeTable,
};
use crate::structure::StructureRecipe;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SCENARIO: i32 = 3;
pub const EXIT_INDETERMINATE: i32 = 4;

/// Bracket pairs drawn per closure family.
pub const CLOSURE_PAIRS: usize = 4;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("unsupported output format {0:?}")]
    Format(String),
}

impl ReportError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Config(_) | ReportError::Format(_) => EXIT_CONFIG,
            ReportError::Scenario(_) => EXIT_SCENARIO,
        }
    }
}

impl From<CatalogError> for ReportError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Unknown(_) | CatalogError::Parameters(_) => {
                ReportError::Config(e.to_string())
            }
            _ => ReportError::Scenario(e.to_string()),
        }
    }
}

impl From<ReductionError> for ReportError {
    fn from(e: ReductionError) -> Self {
        ReportError::Scenario(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Deform,
    Reduce,
    Sweep,
    Catalog,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Deform => "deform",
            Command::Reduce => "reduce",
            Command::Sweep => "sweep",
            Command::Catalog => "catalog",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = ReportError;
    fn from_str(s: &str) -> Result<Self, ReportError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(ReportError::Format(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Source {
    Case(String),
    ScenarioFile(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub source: Option<Source>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Overrides the validity tolerance.
    pub tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, source: Option<Source>) -> Self {
        RunConfig {
            command,
            source,
            samples: None,
            seed: None,
            tol: None,
            format: Format::Json,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        if self.command != Command::Catalog && self.source.is_none() {
            return Err(ReportError::Config(format!(
                "{} needs --case or --scenario",
                self.command.name()
            )));
        }
        if self.samples == Some(0) {
            return Err(ReportError::Config("--samples must be positive".into()));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(ReportError::Config(format!(
                    "--tol must be a positive number, got {t}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub rank: f64,
    pub validity: f64,
    pub moment: f64,
    pub closure: f64,
    pub bihermitian: f64,
    pub metric_positive: f64,
    pub distinct: f64,
    pub freeness: f64,
}

impl Tolerances {
    fn with_validity(tol: Option<f64>) -> Self {
        Tolerances {
            rank: RANK_TOL,
            validity: tol.unwrap_or(VALIDITY_TOL),
            moment: 1e-9,
            closure: 1e-9,
            bihermitian: 1e-9,
            metric_positive: 1e-10,
            distinct: crate::reduction::DISTINCT_TOL,
            freeness: 1e-8,
        }
    }
}

const CONVENTIONS: [&str; 8] = [
    "real coordinates ordered (x1, y1, ..., xn, yn) with z = x + i y",
    "pairing <X + a, Y + b> = (a(Y) + b(X)) / 2",
    "symplectic structure [[0, -w^-1], [w, 0]]; complex structure diag(-J, J^T)",
    "B-transform [[1, 0], [B, 1]] acting on (X, a)",
    "Kahler form sum dy ^ dx; circle moment map sum w |z|^2 / 2",
    "type = complex codimension of the tangent projection of the +i eigenbundle",
    "metric G = -J1 J2; J+ and J- read off the graphs of G = +1 and G = -1",
    "singular values at or below rank tolerance times the largest count as zero",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub source: Option<Source>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub conventions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseInfo {
    pub name: String,
    pub doc: String,
    pub complex_dimension: usize,
    pub group_dimension: usize,
    pub structure: String,
    pub scale: Option<String>,
    pub alpha: Option<AlphaResult>,
    pub expected: Option<Expected>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationRow {
    pub point_id: usize,
    pub stratum: String,
    pub max_residual: f64,
    pub min_eigenvalue: f64,
    /// Same for the B-transformed structure used for the quotient, when it differs.
    pub reduction_max_residual: Option<f64>,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationSection {
    pub rows: Vec<ValidationRow>,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeformationSection {
    pub scale: String,
    pub maurer_cartan_vanishes: bool,
    pub hypotheses_hold: bool,
    pub invariant: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StratumCheck {
    pub stratum: String,
    pub expected: (usize, usize),
    pub computed: Vec<(usize, usize)>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedSection {
    pub upstairs: Vec<StratumCheck>,
    pub quotient: Vec<StratumCheck>,
    pub distinct_expected: Option<bool>,
    pub distinct_computed: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiHermitianRow {
    pub point_id: usize,
    pub stratum: String,
    pub metric_min_eigenvalue: f64,
    pub max_square_residual: f64,
    pub max_orthogonality_residual: f64,
    pub distinct: bool,
    pub type_j2: usize,
    pub even_type: bool,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiHermitianSection {
    pub rows: Vec<BiHermitianRow>,
    /// Distinctness when it agrees at every generic row.
    pub generic_distinct: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub doc: String,
    pub complex_dimension: usize,
    pub group_dimension: usize,
    pub expected: Expected,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub header: Header,
    pub case: Option<CaseInfo>,
    pub catalog: Option<Vec<CatalogEntry>>,
    pub validation: Option<ValidationSection>,
    pub deformation: Option<DeformationSection>,
    pub moment_map: Option<MomentMapReport>,
    pub type_table: Option<TypeTable>,
    pub expected: Option<ExpectedSection>,
    pub formula: Option<FormulaReport>,
    pub closure: Option<ClosureReport>,
    pub bihermitian: Option<BiHermitianSection>,
    pub verdicts: BTreeMap<String, bool>,
    pub indeterminate: bool,
    pub pass: bool,
}

impl ReportDocument {
    pub fn exit_code(&self) -> i32 {
        if self.indeterminate {
            EXIT_INDETERMINATE
        } else if self.pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    fn finish(&mut self) {
        let mut v = BTreeMap::new();
        if let Some(s) = &self.validation {
            v.insert("validation".into(), s.pass);
        }
        if let Some(s) = &self.deformation {
            v.insert("deformation".into(), s.pass);
        }
        if let Some(s) = &self.moment_map {
            v.insert("moment_map".into(), s.pass);
        }
        if let Some(t) = &self.type_table {
            v.insert(
                "type_table".into(),
                !t.rows.is_empty() && t.failures.is_empty(),
            );
        }
        if let Some(s) = &self.expected {
            v.insert("expected".into(), s.pass);
        }
        if let Some(s) = &self.formula {
            v.insert("formula".into(), s.pass);
        }
        if let Some(s) = &self.closure {
            v.insert("closure".into(), s.pass);
        }
        if let Some(s) = &self.bihermitian {
            v.insert("bihermitian".into(), s.pass);
        }
        if let Some(c) = &self.catalog {
            v.insert("catalog".into(), !c.is_empty());
        }
        self.indeterminate = self
            .type_table
            .as_ref()
            .is_some_and(|t| t.has_indeterminate());
        self.pass = !v.is_empty() && v.values().all(|&b| b);
        self.verdicts = v;
    }
}

struct Loaded {
    scenario: Scenario,
    case: Option<CatalogCase>,
}

fn load(config: &RunConfig) -> Result<Loaded, ReportError> {
    let mut loaded = match config.source.as_ref() {
        Some(Source::Case(name)) => {
            let case = by_name(name)?;
            Loaded {
                scenario: case.scenario.clone(),
                case: Some(case),
            }
        }
        Some(Source::ScenarioFile(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ReportError::Config(format!("cannot read {}: {e}", path.display())))?;
            Loaded {
                scenario: ScenarioFile::parse(&text)?.build()?,
                case: None,
            }
        }
        None => return Err(ReportError::Config("no case or scenario given".into())),
    };
    if let Some(n) = config.samples {
        loaded.scenario.samples = n;
    }
    if let Some(s) = config.seed {
        loaded.scenario.seed = s;
    }
    Ok(loaded)
}

fn deformation_of(loaded: &Loaded) -> Option<(DeformationBivector, String)> {
    match &loaded.scenario.structure {
        StructureRecipe::Deformed { eps, t } => Some((eps.clone(), t.to_string())),
        _ => None,
    }
}

fn case_info(loaded: &Loaded) -> CaseInfo {
    let s = &loaded.scenario;
    let c = loaded.case.as_ref();
    CaseInfo {
        name: s.name.clone(),
        doc: c.map(|c| c.doc.clone()).unwrap_or_default(),
        complex_dimension: s.n(),
        group_dimension: s.action.dim(),
        structure: s.structure.label().to_string(),
        scale: c.and_then(|c| c.scale.as_ref().map(|r| r.to_string())),
        alpha: c.and_then(|c| c.alpha.clone()),
        expected: c.map(|c| c.expected.clone()),
    }
}

fn validation(scenario: &Scenario, points: &[LevelPoint], tol: f64) -> ValidationSection {
    let reduction = (!scenario.moment.is_real()).then(|| scenario.reduction_structure());
    let rows: Vec<ValidationRow> = points
        .iter()
        .map(|p| {
            let main = scenario.structure.pair_at(&p.z);
            let red = reduction.as_ref().map(|r| r.pair_at(&p.z));
            let mut row = ValidationRow {
                point_id: p.id,
                stratum: p.stratum.clone(),
                max_residual: f64::INFINITY,
                min_eigenvalue: 0.0,
                reduction_max_residual: None,
                error: None,
                pass: false,
            };
            match main {
                Ok(pair) => {
                    let r = pair.residuals();
                    row.max_residual = r.max_residual();
                    row.min_eigenvalue = r.min_eigenvalue;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            match red {
                Some(Ok(pair)) => {
                    row.reduction_max_residual = Some(pair.residuals().max_residual())
                }
                Some(Err(e)) => row.error = Some(e.to_string()),
                None => {}
            }
            row.pass = row.error.is_none()
                && row.max_residual < tol
                && row.min_eigenvalue > 0.0
                && row.reduction_max_residual.is_none_or(|r| r < tol);
            row
        })
        .collect();
    let max_residual = rows
        .iter()
        .map(|r| r.max_residual.max(r.reduction_max_residual.unwrap_or(0.0)))
        .fold(0.0, f64::max);
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    ValidationSection {
        rows,
        max_residual,
        pass,
    }
}

fn moment_section(scenario: &Scenario, points: &[LevelPoint], tol: f64) -> MomentMapReport {
    let zs: Vec<Vec<_>> = points.iter().map(|p| p.z.clone()).collect();
    let structure = &scenario.structure;
    verify_moment_map(
        |z| structure.pair_at(z).map(|p| p.j1().clone()),
        &scenario.action,
        &scenario.moment,
        &zs,
        tol,
    )
}

fn check_strata(
    expected: &BTreeMap<String, (usize, usize)>,
    computed: &BTreeMap<String, BTreeSet<(usize, usize)>>,
) -> Vec<StratumCheck> {
    expected
        .iter()
        .map(|(label, &e)| {
            let got: Vec<(usize, usize)> = computed
                .get(label)
                .map(|s| s.iter().cloned().collect())
                .unwrap_or_default();
            StratumCheck {
                stratum: label.clone(),
                expected: e,
                pass: got == vec![e],
                computed: got,
            }
        })
        .collect()
}

fn bihermitian(
    frames: &[Result<crate::reduction::QuotientFrame, ReductionError>],
    tol: &Tolerances,
) -> BiHermitianSection {
    let mut rows = Vec::new();
    for f in frames.iter().flatten() {
        let row = match quotient_bihermitian(f) {
            Ok(b) => {
                let r = b.residuals;
                let sq = r.jplus_square.max(r.jminus_square);
                let orth = r.jplus_orthogonality.max(r.jminus_orthogonality);
                BiHermitianRow {
                    point_id: b.point_id,
                    stratum: b.stratum,
                    metric_min_eigenvalue: r.metric_min_eigenvalue,
                    max_square_residual: sq,
                    max_orthogonality_residual: orth,
                    distinct: b.distinct,
                    type_j2: b.type_j2,
                    even_type: b.even_type,
                    error: None,
                    pass: r.metric_min_eigenvalue > tol.metric_positive
                        && sq < tol.bihermitian
                        && orth < tol.bihermitian,
                }
            }
            Err(e) => BiHermitianRow {
                point_id: f.point.id,
                stratum: f.point.stratum.clone(),
                metric_min_eigenvalue: 0.0,
                max_square_residual: f64::INFINITY,
                max_orthogonality_residual: f64::INFINITY,
                distinct: false,
                type_j2: f.type_j2,
                even_type: f.type_j2 % 2 == 0,
                error: Some(e.to_string()),
                pass: false,
            },
        };
        rows.push(row);
    }
    let generic: BTreeSet<bool> = rows
        .iter()
        .filter(|r| r.stratum == "generic" && r.error.is_none())
        .map(|r| r.distinct)
        .collect();
    let generic_distinct = if generic.len() == 1 {
        generic.into_iter().next()
    } else {
        None
    };
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    BiHermitianSection {
        rows,
        generic_distinct,
        pass,
    }
}

fn expected_section(
    expected: &Expected,
    table: &TypeTable,
    bh: Option<&BiHermitianSection>,
) -> ExpectedSection {
    let upstairs = check_strata(&expected.upstairs, &table.upstairs_strata());
    let quotient = check_strata(&expected.quotient, &table.strata());
    let distinct_computed = bh.and_then(|b| b.generic_distinct);
    let distinct_ok = match (expected.distinct, bh) {
        (Some(e), Some(_)) => distinct_computed == Some(e),
        _ => true,
    };
    let pass = upstairs.iter().chain(&quotient).all(|c| c.pass) && distinct_ok;
    ExpectedSection {
        upstairs,
        quotient,
        distinct_expected: expected.distinct,
        distinct_computed,
        pass,
    }
}

fn catalog_listing() -> Result<Vec<CatalogEntry>, ReportError> {
    CASE_NAMES
        .iter()
        .map(|name| {
            let c = by_name(name)?;
            Ok(CatalogEntry {
                name: c.name.clone(),
                doc: c.doc.clone(),
                complex_dimension: c.scenario.n(),
                group_dimension: c.scenario.action.dim(),
                expected: c.expected.clone(),
            })
        })
        .collect()
}

/// Executes the stages implied by the command and assembles the report.
pub fn run(config: &RunConfig) -> Result<ReportDocument, ReportError> {
    config.validate()?;
    let tol = Tolerances::with_validity(config.tol);
    let mut doc = ReportDocument {
        header: Header {
            tool: "gkw".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: config.command,
            source: config.source.clone(),
            samples: config.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: config.seed.unwrap_or(DEFAULT_SEED),
            tolerances: tol.clone(),
            conventions: CONVENTIONS.iter().map(|s| s.to_string()).collect(),
        },
        case: None,
        catalog: None,
        validation: None,
        deformation: None,
        moment_map: None,
        type_table: None,
        expected: None,
        formula: None,
        closure: None,
        bihermitian: None,
        verdicts: BTreeMap::new(),
        indeterminate: false,
        pass: false,
    };
    if config.command == Command::Catalog {
        doc.catalog = Some(catalog_listing()?);
        doc.finish();
        return Ok(doc);
    }

    let loaded = load(config)?;
    let scenario = &loaded.scenario;
    doc.header.samples = scenario.samples;
    doc.header.seed = scenario.seed;
    doc.case = Some(case_info(&loaded));

    let set = sample_level_set(scenario, scenario.samples, scenario.seed)?;
    let points = &set.points;
    let cmd = config.command;

    if matches!(cmd, Command::Verify | Command::Deform | Command::Sweep) {
        doc.validation = Some(validation(scenario, points, tol.validity));
    }
    if matches!(cmd, Command::Deform | Command::Sweep) {
        match deformation_of(&loaded) {
            Some((eps, scale)) => {
                let mc = maurer_cartan_vanishes(&eps)?;
                let hyp = deformation_hypotheses_hold(&eps);
                let inv = deformation_invariant(&eps, &scenario.action);
                doc.deformation = Some(DeformationSection {
                    scale,
                    maurer_cartan_vanishes: mc,
                    hypotheses_hold: hyp,
                    invariant: inv,
                    pass: mc && hyp && inv,
                });
            }
            None if cmd == Command::Deform => {
                return Err(ReportError::Config(format!(
                    "{} carries no deformation",
                    scenario.name
                )));
            }
            None => {}
        }
    }
    if matches!(cmd, Command::Verify | Command::Sweep) {
        doc.moment_map = Some(moment_section(scenario, points, tol.validity));
    }
    if matches!(cmd, Command::Verify | Command::Reduce | Command::Sweep) {
        let frames = quotient_frames(scenario, points);
        let mut table = TypeTable::from_frames(&scenario.name, points, &frames);
        table.attempts = set.attempts;
        table.rejected = set.rejected.clone();
        let bh = bihermitian(&frames, &tol);
        if cmd != Command::Verify {
            doc.formula = Some(verify_type_formula(&table));
        }
        if let Some(c) = &loaded.case {
            let mut e = expected_section(&c.expected, &table, Some(&bh));
            if cmd == Command::Verify {
                e.upstairs.clear();
                e.quotient.clear();
                e.pass = e
                    .distinct_expected
                    .is_none_or(|d| e.distinct_computed == Some(d));
            }
            doc.expected = Some(e);
        }
        if cmd != Command::Verify {
            doc.type_table = Some(table);
        }
        doc.bihermitian = Some(bh);
    }
    if cmd == Command::Sweep {
        doc.closure = Some(closure_test(
            scenario,
            CLOSURE_PAIRS,
            scenario.seed,
            points,
            tol.closure,
        ));
    }
    doc.finish();
    Ok(doc)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "point_id,stratum,type_j1,type_j2,dim_k_cap_piL2";

fn yes(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn text_summary(r: &ReportDocument) -> String {
    let mut s = String::new();
    let h = &r.header;
    let _ = writeln!(s, "{} {} {}", h.tool, h.version, h.command.name());
    let _ = writeln!(
        s,
        "samples {} seed {} validity tolerance {:e} rank tolerance {:e}",
        h.samples, h.seed, h.tolerances.validity, h.tolerances.rank
    );
    if let Some(c) = &r.case {
        let _ = writeln!(
            s,
            "case {} (C^{}, group dimension {}, {} structure)",
            c.name, c.complex_dimension, c.group_dimension, c.structure
        );
        if !c.doc.is_empty() {
            let _ = writeln!(s, "  {}", c.doc);
        }
        if let Some(t) = &c.scale {
            let _ = writeln!(s, "  deformation scale {t}");
        }
    }
    if let Some(list) = &r.catalog {
        for e in list {
            let _ = writeln!(s, "{:<16} C^{:<2} {}", e.name, e.complex_dimension, e.doc);
        }
    }
    if let Some(v) = &r.validation {
        let _ = writeln!(
            s,
            "validation: {} points, max residual {:.3e}",
            v.rows.len(),
            v.max_residual
        );
    }
    if let Some(d) = &r.deformation {
        let _ = writeln!(
            s,
            "deformation: scale {}, Maurer-Cartan {}, hypotheses {}, invariant {}",
            d.scale, d.maurer_cartan_vanishes, d.hypotheses_hold, d.invariant
        );
    }
    if let Some(m) = &r.moment_map {
        let _ = writeln!(
            s,
            "moment map: {} checks, max membership residual {:.3e}",
            m.rows.len(),
            m.max_membership_residual
        );
    }
    if let Some(t) = &r.type_table {
        let _ = writeln!(
            s,
            "type table: {} rows, {} failures, {} attempts",
            t.rows.len(),
            t.failures.len(),
            t.attempts
        );
        let up = t.upstairs_strata();
        for (label, q) in t.strata() {
            let _ = writeln!(
                s,
                "  {label:<12} upstairs {:?} quotient {:?}",
                up.get(&label).cloned().unwrap_or_default(),
                q
            );
        }
        for f in &t.failures {
            let _ = writeln!(
                s,
                "  point {} ({}) failed: {}",
                f.point_id, f.stratum, f.error
            );
        }
    }
    if let Some(e) = &r.expected {
        for c in e
            .upstairs
            .iter()
            .map(|c| ("upstairs", c))
            .chain(e.quotient.iter().map(|c| ("quotient", c)))
        {
            let _ = writeln!(
                s,
                "  expected {} {} {:?}, computed {:?}: {}",
                c.0,
                c.1.stratum,
                c.1.expected,
                c.1.computed,
                yes(c.1.pass)
            );
        }
        if let Some(d) = e.distinct_expected {
            let _ = writeln!(
                s,
                "  expected distinct {d}, computed {:?}",
                e.distinct_computed
            );
        }
    }
    if let Some(f) = &r.formula {
        let _ = writeln!(
            s,
            "type formula: {}/{} rows agree",
            f.rows.iter().filter(|x| x.pass).count(),
            f.rows.len()
        );
    }
    if let Some(c) = &r.closure {
        let _ = writeln!(
            s,
            "closure: {} brackets, max pointwise residual {:.3e}",
            c.rows.len(),
            c.max_pointwise_residual
        );
    }
    if let Some(b) = &r.bihermitian {
        let min_eig = b
            .rows
            .iter()
            .map(|x| x.metric_min_eigenvalue)
            .fold(f64::INFINITY, f64::min);
        let _ = writeln!(
            s,
            "bi-Hermitian: {} points, min metric eigenvalue {:.3e}, generic distinct {:?}",
            b.rows.len(),
            min_eig,
            b.generic_distinct
        );
    }
    for (k, v) in &r.verdicts {
        let _ = writeln!(s, "{k:<12} {}", yes(*v));
    }
    if r.indeterminate {
        let _ = writeln!(s, "some rank decisions are indeterminate");
    }
    let _ = writeln!(s, "overall {}", yes(r.pass));
    s
}

/// Serializes the report; equal reports give equal bytes.
pub fn emit(report: &ReportDocument, format: Format) -> Result<Vec<u8>, ReportError> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(report)
                .map_err(|e| ReportError::Format(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            if let Some(t) = &report.type_table {
                for r in &t.rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        r.point_id,
                        csv_field(&r.stratum),
                        r.type_j1,
                        r.type_j2,
                        r.dim_k_cap_pil2
                    );
                }
            }
            Ok(s.into_bytes())
        }
        Format::Text => Ok(text_summary(report).into_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_checks_map_to_exit_codes() {
        let c = RunConfig::new(Command::Reduce, None);
        assert_eq!(run(&c).unwrap_err().exit_code(), EXIT_CONFIG);
        let mut c = RunConfig::new(Command::Reduce, Some(Source::Case("cpn-2".into())));
        c.tol = Some(-1.0);
        assert_eq!(run(&c).unwrap_err().exit_code(), EXIT_CONFIG);
        let c = RunConfig::new(Command::Reduce, Some(Source::Case("no-such-case".into())));
        assert_eq!(run(&c).unwrap_err().exit_code(), EXIT_CONFIG);
        assert_eq!(
            "xml".parse::<Format>().unwrap_err().exit_code(),
            EXIT_CONFIG
        );
    }

    #[test]
    fn kahler_baseline_verifies_without_distinct_structures() {
        let mut c = RunConfig::new(Command::Verify, Some(Source::Case("kahler-c3".into())));
        c.samples = Some(6);
        let r = run(&c).unwrap();
        assert!(r.pass, "{:?}", r.verdicts);
        assert_eq!(
            r.bihermitian.as_ref().unwrap().generic_distinct,
            Some(false)
        );
        assert_eq!(r.exit_code(), EXIT_PASS);
    }

    #[test]
    fn csv_has_fixed_header_and_one_line_per_row() {
        let mut c = RunConfig::new(Command::Reduce, Some(Source::Case("kahler-c3".into())));
        c.samples = Some(5);
        let r = run(&c).unwrap();
        let text = String::from_utf8(emit(&r, Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + r.type_table.as_ref().unwrap().rows.len());
    }
}
