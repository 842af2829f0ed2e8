//! Scenario files: one JSON document naming a domain, a resolution, the
//! order and exponents, one task with its payload, a seed and an output path.
//!
//! Parsing validates everything up front and reports every problem it finds
//! rather than stopping at the first.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::axioms::verify_capacity_axioms;
use crate::capacity::{CapacitySolver, SolverOptions};
use crate::error::{Error, Result};
use crate::exponent::{ExponentField, ExponentSpec, PairExponentSpec};
use crate::function::{FunctionValues, GridFunction};
use crate::grid::{Domain, Grid, SetMask};
use crate::modular::{check_order, SobolevModular};
use crate::report::{ReportBody, RunReport, TaskResult, TaskTiming, Timing, Verdict};
use crate::trace::{boundary_polarity_check, quasi_convergence_certificate, removable_set_check};

/// Largest number of cells a scenario may request. The pair weights are
/// stored densely, so memory grows with the square of this.
pub const MAX_CELLS: usize = 4096;
/// Largest number of randomly drawn sets.
pub const MAX_RANDOM_SETS: usize = 256;
/// Largest number of functions in a certificate sequence.
pub const MAX_SEQUENCE: usize = 64;

const KEYS: [&str; 9] = [
    "domain",
    "resolution",
    "s",
    "q",
    "p",
    "task",
    "payload",
    "seed",
    "output",
];
const TASKS: [&str; 7] = [
    "modular",
    "norm",
    "capacity",
    "axioms",
    "certificate",
    "boundary",
    "removability",
];

#[derive(Clone, Debug)]
pub enum CertificateSource {
    /// `u_i = (1 - 8^-i) u` for `i = 1..=length`, with `u` rescaled to
    /// Sobolev norm at most one.
    Scaled {
        function: GridFunction,
        length: usize,
    },
    Sequence(Vec<GridFunction>),
}

#[derive(Clone, Debug)]
pub enum Task {
    Modular {
        function: GridFunction,
    },
    Norm {
        function: GridFunction,
    },
    Capacity {
        set: SetMask,
        /// Use the one-ring hull of the set instead of the set itself.
        hull: bool,
        initial: Option<GridFunction>,
        options: SolverOptions,
    },
    Axioms {
        sets: Vec<SetMask>,
        random_sets: usize,
        options: SolverOptions,
    },
    Certificate {
        source: CertificateSource,
        tail_start: usize,
        options: SolverOptions,
    },
    Boundary {
        resolutions: Vec<usize>,
        options: SolverOptions,
    },
    Removability {
        removed: SetMask,
        tests: Vec<SetMask>,
        random_tests: usize,
        tolerance: f64,
        options: SolverOptions,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Modular { .. } => "modular",
            Task::Norm { .. } => "norm",
            Task::Capacity { .. } => "capacity",
            Task::Axioms { .. } => "axioms",
            Task::Certificate { .. } => "certificate",
            Task::Boundary { .. } => "boundary",
            Task::Removability { .. } => "removability",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub domain: Domain,
    pub resolution: [usize; 2],
    pub s: f64,
    pub q: ExponentSpec,
    pub p: PairExponentSpec,
    pub task: Task,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// SHA-256 of the scenario text, hex encoded.
    pub hash: String,
    pub grid: Arc<Grid>,
    pub field: ExponentField,
}

pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario_str(&text)
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::Validation(vec![format!("not valid JSON: {e}")]))?;
    let Value::Object(obj) = root else {
        return Err(Error::Validation(vec![
            "scenario must be a JSON object".into()
        ]));
    };
    let mut v = Validator::default();
    for key in obj.keys() {
        if !KEYS.contains(&key.as_str()) {
            v.push(format!("{key}: unknown field"));
        }
    }

    let domain: Option<Domain> = v.required(&obj, "domain");
    let resolution = match obj.get("resolution") {
        None => v.fail("resolution: missing field"),
        Some(val) => v.field::<Resolution>("resolution", val),
    };
    let s = match obj.get("s") {
        None => v.fail("s: missing field"),
        Some(val) => v.field::<f64>("s", val).and_then(|s| match check_order(s) {
            Ok(()) => Some(s),
            Err(_) => v.fail(format!("s: must lie strictly between 0 and 1, got {s}")),
        }),
    };
    let q = match obj.get("q") {
        None => v.fail("q: missing field"),
        Some(val) => v.field::<ExponentSpec>("q", &shorthand(val)),
    };
    let p = match obj.get("p") {
        None => v.fail("p: missing field"),
        Some(val) => v.field::<PairExponentSpec>("p", &shorthand(val)),
    };
    let task_name = match obj.get("task") {
        None => v.fail("task: missing field"),
        Some(Value::String(t)) if TASKS.contains(&t.as_str()) => Some(t.clone()),
        Some(other) => v.fail(format!(
            "task: expected one of {}, got {other}",
            TASKS.join(", ")
        )),
    };
    let seed = match obj.get("seed") {
        None => Some(0),
        Some(val) => v.field::<u64>("seed", val),
    };
    let output = match obj.get("output") {
        None | Some(Value::Null) => Some(None),
        Some(val) => v.field::<PathBuf>("output", val).map(Some),
    };

    let mut grid = None;
    if let (Some(domain), Some(res)) = (&domain, &resolution) {
        let res = res.expand(domain.dim());
        let cells = res[..domain.dim()]
            .iter()
            .fold(1usize, |acc, &n| acc.saturating_mul(n));
        if cells > MAX_CELLS {
            v.push(format!(
                "resolution: {cells} cells exceed the limit of {MAX_CELLS}"
            ));
        } else {
            match Grid::build(domain, res) {
                Ok(g) => grid = Some(g),
                Err(e) => v.push(format!("resolution: {e}")),
            }
        }
    }
    let mut field = None;
    if let (Some(g), Some(q), Some(p)) = (&grid, &q, &p) {
        match ExponentField::new(g, q.clone(), p.clone()) {
            Ok(f) => field = Some(f),
            Err(e) => v.push(format!("q/p: {e}")),
        }
    }

    let payload = obj
        .get("payload")
        .cloned()
        .unwrap_or(Value::Object(Map::new()));
    let task = match (&task_name, &grid) {
        (Some(name), Some(g)) => parse_task(&mut v, name, &payload, g, domain.as_ref()),
        _ => None,
    };

    if !v.errors.is_empty() {
        return Err(Error::Validation(v.errors));
    }
    match (domain, resolution, s, q, p, task, seed, output, grid, field) {
        (
            Some(domain),
            Some(resolution),
            Some(s),
            Some(q),
            Some(p),
            Some(task),
            Some(seed),
            Some(output),
            Some(grid),
            Some(field),
        ) => Ok(Scenario {
            resolution: resolution.expand(domain.dim()),
            domain,
            s,
            q,
            p,
            task,
            seed,
            output,
            hash,
            grid,
            field,
        }),
        _ => Err(Error::Validation(vec!["incomplete scenario".into()])),
    }
}

/// Bare numbers and strings stand for constant and expression exponents.
fn shorthand(val: &Value) -> Value {
    match val {
        Value::Number(_) => json!({ "constant": val }),
        Value::String(_) => json!({ "expr": val }),
        other => other.clone(),
    }
}

#[derive(Default)]
struct Validator {
    errors: Vec<String>,
}

impl Validator {
    fn push(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    fn fail<T>(&mut self, msg: impl Into<String>) -> Option<T> {
        self.push(msg);
        None
    }

    fn field<T: DeserializeOwned>(&mut self, name: &str, val: &Value) -> Option<T> {
        match T::deserialize(val) {
            Ok(t) => Some(t),
            Err(e) => self.fail(format!("{name}: {e}")),
        }
    }

    fn required<T: DeserializeOwned>(&mut self, obj: &Map<String, Value>, name: &str) -> Option<T> {
        match obj.get(name) {
            None => self.fail(format!("{name}: missing field")),
            Some(val) => self.field(name, val),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
enum Resolution {
    Uniform(usize),
    PerAxis([usize; 2]),
}

impl Resolution {
    fn expand(self, dim: usize) -> [usize; 2] {
        match self {
            Resolution::Uniform(n) if dim == 1 => [n, 1],
            Resolution::Uniform(n) => [n, n],
            Resolution::PerAxis(r) => r,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum FunctionSpec {
    Expr(String),
    Constant(f64),
    Values(FunctionValues),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Selection {
    List(Vec<usize>),
    Keyword(String),
}

impl Default for Selection {
    fn default() -> Self {
        Selection::List(Vec::new())
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskSpec {
    #[serde(default)]
    cells: Selection,
    #[serde(default)]
    boundary: Selection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionPayload {
    function: FunctionSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CapacityPayload {
    set: MaskSpec,
    #[serde(default)]
    hull: bool,
    #[serde(default)]
    initial: Option<FunctionSpec>,
    #[serde(default)]
    solver: SolverOptions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AxiomsPayload {
    #[serde(default)]
    sets: Vec<MaskSpec>,
    #[serde(default)]
    random_sets: usize,
    #[serde(default)]
    solver: SolverOptions,
}

fn default_length() -> usize {
    4
}

fn default_tail_start() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificatePayload {
    #[serde(default)]
    function: Option<FunctionSpec>,
    #[serde(default = "default_length")]
    length: usize,
    #[serde(default)]
    sequence: Option<Vec<FunctionSpec>>,
    #[serde(default = "default_tail_start")]
    tail_start: usize,
    #[serde(default)]
    solver: SolverOptions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryPayload {
    #[serde(default)]
    resolutions: Option<Vec<usize>>,
    #[serde(default)]
    solver: SolverOptions,
}

fn default_tolerance() -> f64 {
    1e-6
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RemovabilityPayload {
    #[serde(default)]
    removed: MaskSpec,
    #[serde(default)]
    tests: Vec<MaskSpec>,
    #[serde(default)]
    random_tests: usize,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default)]
    solver: SolverOptions,
}

fn options(v: &mut Validator, o: SolverOptions) -> Option<SolverOptions> {
    match o.validate() {
        Ok(()) => Some(o),
        Err(e) => v.fail(format!("payload.solver: {e}")),
    }
}

fn function(
    v: &mut Validator,
    at: &str,
    spec: &FunctionSpec,
    grid: &Arc<Grid>,
) -> Option<GridFunction> {
    let made = match spec {
        FunctionSpec::Expr(src) => GridFunction::from_expr(grid, src),
        FunctionSpec::Constant(c) if c.is_finite() => Ok(GridFunction::constant(grid, *c)),
        FunctionSpec::Constant(_) => Err(Error::NonFinite("constant function")),
        FunctionSpec::Values(vals) => {
            GridFunction::new(grid, vals.cells.clone(), vals.boundary.clone())
        }
    };
    made.map_err(|e| v.push(format!("{at}: {e}"))).ok()
}

fn selection(v: &mut Validator, at: &str, sel: &Selection, len: usize) -> Option<Vec<usize>> {
    match sel {
        Selection::List(idx) => match idx.iter().find(|&&i| i >= len) {
            Some(i) => v.fail(format!("{at}: index {i} out of range (grid has {len})")),
            None => Some(idx.clone()),
        },
        Selection::Keyword(w) if w == "all" => Some((0..len).collect()),
        Selection::Keyword(w) => v.fail(format!(
            "{at}: expected an index list or \"all\", got {w:?}"
        )),
    }
}

fn mask(v: &mut Validator, at: &str, spec: &MaskSpec, grid: &Grid) -> Option<SetMask> {
    let cells = selection(v, &format!("{at}.cells"), &spec.cells, grid.num_cells());
    let boundary = selection(
        v,
        &format!("{at}.boundary"),
        &spec.boundary,
        grid.num_boundary(),
    );
    SetMask::from_indices(grid, &cells?, &boundary?).ok()
}

fn masks(v: &mut Validator, at: &str, specs: &[MaskSpec], grid: &Grid) -> Option<Vec<SetMask>> {
    let out: Vec<Option<SetMask>> = specs
        .iter()
        .enumerate()
        .map(|(k, m)| mask(v, &format!("{at}[{k}]"), m, grid))
        .collect();
    out.into_iter().collect()
}

fn payload<T: DeserializeOwned>(v: &mut Validator, payload: &Value) -> Option<T> {
    v.field("payload", payload)
}

fn random_count(v: &mut Validator, at: &str, n: usize) -> Option<usize> {
    if n > MAX_RANDOM_SETS {
        v.fail(format!(
            "{at}: at most {MAX_RANDOM_SETS} random sets, got {n}"
        ))
    } else {
        Some(n)
    }
}

fn parse_task(
    v: &mut Validator,
    name: &str,
    raw: &Value,
    grid: &Arc<Grid>,
    domain: Option<&Domain>,
) -> Option<Task> {
    match name {
        "modular" | "norm" => {
            let pl: FunctionPayload = payload(v, raw)?;
            let function = function(v, "payload.function", &pl.function, grid)?;
            Some(if name == "modular" {
                Task::Modular { function }
            } else {
                Task::Norm { function }
            })
        }
        "capacity" => {
            let pl: CapacityPayload = payload(v, raw)?;
            let set = mask(v, "payload.set", &pl.set, grid);
            let initial = match &pl.initial {
                Some(spec) => Some(Some(function(v, "payload.initial", spec, grid)?)),
                None => Some(None),
            };
            let options = options(v, pl.solver);
            Some(Task::Capacity {
                set: set?,
                hull: pl.hull,
                initial: initial?,
                options: options?,
            })
        }
        "axioms" => {
            let pl: AxiomsPayload = payload(v, raw)?;
            let sets = masks(v, "payload.sets", &pl.sets, grid);
            let random_sets = random_count(v, "payload.random_sets", pl.random_sets);
            if pl.sets.len() + pl.random_sets < 2 {
                v.push("payload: the axiom suite needs at least two sets");
            }
            let options = options(v, pl.solver);
            Some(Task::Axioms {
                sets: sets?,
                random_sets: random_sets?,
                options: options?,
            })
        }
        "certificate" => {
            let pl: CertificatePayload = payload(v, raw)?;
            let source = match (&pl.function, &pl.sequence) {
                (Some(f), None) => {
                    if !(2..=MAX_SEQUENCE).contains(&pl.length) {
                        return v.fail(format!(
                            "payload.length: must lie in 2..={MAX_SEQUENCE}, got {}",
                            pl.length
                        ));
                    }
                    if pl.tail_start == 0 || pl.tail_start >= pl.length {
                        return v.fail(format!(
                            "payload.tail_start: must lie in 1..{}, got {}",
                            pl.length, pl.tail_start
                        ));
                    }
                    CertificateSource::Scaled {
                        function: function(v, "payload.function", f, grid)?,
                        length: pl.length,
                    }
                }
                (None, Some(seq)) => {
                    if !(2..=MAX_SEQUENCE).contains(&seq.len()) {
                        return v.fail(format!(
                            "payload.sequence: needs 2..={MAX_SEQUENCE} functions, got {}",
                            seq.len()
                        ));
                    }
                    if pl.tail_start == 0 || pl.tail_start >= seq.len() {
                        return v.fail(format!(
                            "payload.tail_start: must lie in 1..{}, got {}",
                            seq.len(),
                            pl.tail_start
                        ));
                    }
                    let fs: Vec<Option<GridFunction>> = seq
                        .iter()
                        .enumerate()
                        .map(|(k, f)| function(v, &format!("payload.sequence[{k}]"), f, grid))
                        .collect();
                    CertificateSource::Sequence(fs.into_iter().collect::<Option<Vec<_>>>()?)
                }
                _ => return v.fail("payload: give exactly one of function and sequence"),
            };
            let options = options(v, pl.solver)?;
            Some(Task::Certificate {
                source,
                tail_start: pl.tail_start,
                options,
            })
        }
        "boundary" => {
            let pl: BoundaryPayload = payload(v, raw)?;
            let dim = grid.dim();
            let base = grid.resolution()[0];
            let resolutions = pl
                .resolutions
                .unwrap_or_else(|| vec![base, 2 * base, 4 * base]);
            if resolutions.len() < 3 {
                v.push("payload.resolutions: a refinement series needs at least three resolutions");
            }
            for &n in &resolutions {
                let cells = n.checked_pow(dim as u32).unwrap_or(usize::MAX);
                if n < 2 || cells > MAX_CELLS {
                    v.push(format!(
                        "payload.resolutions: {n} is outside 2..=(cells at most {MAX_CELLS})"
                    ));
                } else if let Some(d) = domain {
                    let res = if dim == 1 { [n, 1] } else { [n, n] };
                    if let Err(e) = Grid::build(d, res) {
                        v.push(format!("payload.resolutions: {e}"));
                    }
                }
            }
            let options = options(v, pl.solver)?;
            Some(Task::Boundary {
                resolutions,
                options,
            })
        }
        "removability" => {
            let pl: RemovabilityPayload = payload(v, raw)?;
            let removed = mask(v, "payload.removed", &pl.removed, grid);
            if let Some(r) = &removed {
                if r.num_boundary() > 0 {
                    v.push("payload.removed: may contain cells only");
                }
            }
            let tests = masks(v, "payload.tests", &pl.tests, grid);
            if let (Some(r), Some(ts)) = (&removed, &tests) {
                for (k, t) in ts.iter().enumerate() {
                    if t.intersection(r).num_cells() > 0 {
                        v.push(format!("payload.tests[{k}]: intersects the removed set"));
                    }
                }
            }
            let random_tests = random_count(v, "payload.random_tests", pl.random_tests);
            if !(pl.tolerance >= 0.0) {
                v.push(format!(
                    "payload.tolerance: must be nonnegative, got {}",
                    pl.tolerance
                ));
            }
            let options = options(v, pl.solver);
            Some(Task::Removability {
                removed: removed?,
                tests: tests?,
                random_tests: random_tests?,
                tolerance: pl.tolerance,
                options: options?,
            })
        }
        _ => None,
    }
}

/// A random subset of the closed domain: each cell and boundary node is
/// included independently with probability 0.3, avoiding `exclude`.
pub fn random_mask(grid: &Grid, rng: &mut ChaCha8Rng, exclude: &SetMask) -> SetMask {
    let mut m = grid.empty_mask();
    for i in 0..grid.num_cells() {
        if rng.gen_bool(0.3) && !exclude.has_cell(i) {
            m.set_cell(i, true);
        }
    }
    for i in 0..grid.num_boundary() {
        if rng.gen_bool(0.3) && !exclude.has_boundary(i) {
            m.set_boundary(i, true);
        }
    }
    m
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report data serializes")
}

fn mask_values(sets: &[SetMask]) -> Value {
    Value::Array(sets.iter().map(|m| to_value(&m.to_indices())).collect())
}

fn failure(task: &str, err: &Error) -> TaskResult {
    let (verdict, data) = match err {
        Error::NotConverged(best) => (Verdict::Fail, to_value(&best.to_record())),
        Error::CertificateInapplicable {
            index,
            gap,
            threshold,
        } => (
            Verdict::Inapplicable,
            json!({ "index": index, "gap": gap, "threshold": threshold }),
        ),
        _ => (Verdict::Fail, Value::Null),
    };
    TaskResult {
        task: task.to_string(),
        verdict,
        message: Some(err.to_string()),
        data,
        series: Vec::new(),
    }
}

fn execute(sc: &Scenario) -> Result<TaskResult> {
    let grid = &sc.grid;
    let field = &sc.field;
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let pass = |data: Value| TaskResult {
        task: sc.task.name().to_string(),
        verdict: Verdict::Pass,
        message: None,
        data,
        series: Vec::new(),
    };
    match &sc.task {
        Task::Modular { function } => {
            let m = SobolevModular::new(grid, field, sc.s)?;
            Ok(pass(to_value(&m.evaluate(function)?)))
        }
        Task::Norm { function } => {
            let m = SobolevModular::new(grid, field, sc.s)?;
            let lux = m.luxembourg_norm(function)?;
            let semi = m.gagliardo_seminorm(function)?;
            let modular = m.modular_norm(function)?;
            Ok(pass(json!({
                "luxembourg": lux,
                "seminorm": semi,
                "sobolev": lux.value + semi.value,
                "modular": modular,
            })))
        }
        Task::Capacity {
            set,
            hull,
            initial,
            options,
        } => {
            let solver = CapacitySolver::new(grid, field, sc.s, options.clone())?;
            let target = if *hull {
                grid.open_neighborhood(set)?
            } else {
                set.clone()
            };
            let r = match initial {
                Some(u) => solver.capacity_relative_open_from(&target, u)?,
                None => solver.capacity_relative_open(&target)?,
            };
            Ok(pass(to_value(&r.to_record())))
        }
        Task::Axioms {
            sets,
            random_sets,
            options,
        } => {
            let solver = CapacitySolver::new(grid, field, sc.s, options.clone())?;
            let none = grid.empty_mask();
            let mut family = sets.clone();
            family.extend((0..*random_sets).map(|_| random_mask(grid, &mut rng, &none)));
            let report = verify_capacity_axioms(&solver, &family)?;
            let mut r = pass(json!({ "sets": mask_values(&family), "report": report }));
            if !report.all_passed {
                r.verdict = Verdict::Fail;
            }
            Ok(r)
        }
        Task::Certificate {
            source,
            tail_start,
            options,
        } => {
            let solver = CapacitySolver::new(grid, field, sc.s, options.clone())?;
            let sequence = match source {
                CertificateSource::Sequence(seq) => seq.clone(),
                CertificateSource::Scaled { function, length } => {
                    let norm = solver.modular().sobolev_norm(function)?;
                    let base = function.scaled(1.0 / norm.max(1.0));
                    (1..=*length)
                        .map(|i| base.scaled(1.0 - 8f64.powi(-(i as i32))))
                        .collect()
                }
            };
            let cert = quasi_convergence_certificate(&solver, &sequence, *tail_start)?;
            let mut r = pass(to_value(&cert));
            if !cert.verdict {
                r.verdict = Verdict::Fail;
            }
            Ok(r)
        }
        Task::Boundary {
            resolutions,
            options,
        } => {
            let report =
                boundary_polarity_check(&sc.domain, resolutions, &sc.q, &sc.p, sc.s, options)?;
            let mut r = pass(to_value(&report));
            r.series = report.series;
            Ok(r)
        }
        Task::Removability {
            removed,
            tests,
            random_tests,
            tolerance,
            options,
        } => {
            let mut family = tests.clone();
            family.extend((0..*random_tests).map(|_| random_mask(grid, &mut rng, removed)));
            let report = removable_set_check(field, sc.s, options, removed, &family, *tolerance)?;
            Ok(pass(
                json!({ "tests": mask_values(&family), "report": report }),
            ))
        }
    }
}

/// Runs the scenario's task. Task errors become a failed or inapplicable
/// entry in the report rather than an error.
pub fn run_scenario(sc: &Scenario) -> RunReport {
    let start = Instant::now();
    let result = execute(sc).unwrap_or_else(|e| failure(sc.task.name(), &e));
    let seconds = start.elapsed().as_secs_f64();
    RunReport {
        deterministic: ReportBody {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario_hash: sc.hash.clone(),
            seed: sc.seed,
            results: vec![result],
        },
        timing: Timing {
            tasks: vec![TaskTiming {
                task: sc.task.name().to_string(),
                seconds,
            }],
        },
    }
}
