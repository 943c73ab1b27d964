//! Model catalogue and the experiment pipeline behind the command-line front end.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::bounds::{
    bound_report, bounds_csv, corner_ratio_lower_bound_3d, heuristic_bracket_2d, lower_bound_open_2d,
    lower_bound_periodic_2d, upper_bound_open_2d, upper_bound_periodic_2d, upper_bound_periodic_3d, EntropyBound,
    SlabRadius,
};
use crate::constraint::{hard_square_system, load_system, monomer_dimer_system, Boundary, ConstraintSystem};
use crate::error::{Error, Result};
use crate::numeric::format_float;
use crate::one_vertex::{build_one_vertex_2d, build_one_vertex_3d};
use crate::operator::{Operator, SparseMatrix};
use crate::oracle::{identities_for_system, IdentityCheck};
use crate::spectral::{perron_radius, IterationConfig, SpectralEstimate};
use crate::transfer::{build_row_transfer_2d, build_slab_transfer_3d, BoundaryDescriptor};

/// A built-in constraint system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuiltinModel {
    pub name: &'static str,
    pub d: usize,
    pub k: usize,
    pub summary: &'static str,
}

const BUILTINS: [BuiltinModel; 5] = [
    BuiltinModel { name: "hard-square", d: 2, k: 2, summary: "hard squares, no two adjacent 1s" },
    BuiltinModel { name: "hard-square-3d", d: 3, k: 2, summary: "hard cubes on the cubic lattice" },
    BuiltinModel { name: "monomer-dimer-1d", d: 1, k: 3, summary: "monomers and dimers on a line" },
    BuiltinModel { name: "monomer-dimer-2d", d: 2, k: 5, summary: "monomers and dominoes" },
    BuiltinModel { name: "monomer-dimer-3d", d: 3, k: 7, summary: "monomers and dimers in three dimensions" },
];

pub fn builtin_models() -> &'static [BuiltinModel] {
    &BUILTINS
}

/// One line per built-in model, then the file loader; the order never changes.
pub fn list_models() -> String {
    let mut out = String::new();
    for m in &BUILTINS {
        let title = match m.name {
            "hard-square" => "hard-square (k=2)".to_string(),
            "hard-square-3d" => "hard-square-3d (k=2)".to_string(),
            _ => format!("monomer-dimer d={} (k={})", m.d, m.k),
        };
        out.push_str(&format!("{title:<26} --model {:<18} d={}  {}\n", m.name, m.d, m.summary));
    }
    out.push_str(&format!("{:<26} --model-file PATH          any k, d from the file\n", "file"));
    out
}

/// A built-in name or a system file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    Builtin(String),
    File(PathBuf),
}

impl ModelSpec {
    pub fn load(&self) -> Result<ConstraintSystem> {
        match self {
            ModelSpec::File(p) => load_system(p),
            ModelSpec::Builtin(name) => match name.as_str() {
                "hard-square" => hard_square_system(2),
                "hard-square-3d" => hard_square_system(3),
                "monomer-dimer-1d" => monomer_dimer_system(1, true),
                "monomer-dimer-2d" => monomer_dimer_system(2, true),
                "monomer-dimer-3d" => monomer_dimer_system(3, true),
                other => {
                    let names: Vec<&str> = BUILTINS.iter().map(|m| m.name).collect();
                    Err(Error::InvalidArgument(format!("unknown model `{other}`; built-in models: {}", names.join(", "))))
                }
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            ModelSpec::Builtin(name) => name.clone(),
            ModelSpec::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpKind {
    Standard,
    Periodic,
    OneVertex,
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(OpKind::Standard),
            "periodic" => Ok(OpKind::Periodic),
            "one-vertex" => Ok(OpKind::OneVertex),
            _ => Err(Error::InvalidArgument(format!("unknown operator kind `{s}` (standard, periodic, one-vertex)"))),
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Standard => "standard",
            OpKind::Periodic => "periodic",
            OpKind::OneVertex => "one-vertex",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Spectrum,
    Sweep,
    Bounds,
    OracleCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}` (csv, json)"))),
        }
    }
}

/// Inclusive list of sizes: `7`, `2..12` or `3,5,9`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeList(pub Vec<usize>);

impl FromStr for SizeList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("`{s}` is not a size, range `a..b` or list `a,b,c`"));
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let sizes = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad());
            }
            (a..=b).collect()
        } else {
            s.split(',').map(parse).collect::<Result<Vec<_>>>()?
        };
        Ok(SizeList(sizes))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub task: Task,
    pub op: OpKind,
    /// 2-D width.
    pub n: Option<SizeList>,
    /// 3-D slab sides.
    pub n1: Option<SizeList>,
    pub n2: Option<SizeList>,
    /// One boundary per transverse axis; defaults follow `op`.
    pub boundary: Option<BoundaryDescriptor>,
    pub iteration: IterationConfig,
    /// Largest size used by `bounds` and `oracle-check`.
    pub max_n: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// Fill the `seconds` column; off by default so that results are reproducible byte for byte.
    pub record_time: bool,
}

impl ExperimentConfig {
    pub fn new(model: ModelSpec, task: Task) -> Self {
        Self {
            model,
            task,
            op: OpKind::Standard,
            n: None,
            n1: None,
            n2: None,
            boundary: None,
            iteration: IterationConfig::default(),
            max_n: 14,
            format: OutputFormat::Csv,
            out: None,
            record_time: false,
        }
    }
}

/// One spectral run in the fixed result schema.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub model: String,
    pub op_kind: OpKind,
    pub geometry: String,
    pub boundary: String,
    pub precision: u32,
    pub value: String,
    pub cw_lower: String,
    pub cw_upper: String,
    pub iterations: u64,
    pub seconds: Option<f64>,
    #[serde(skip)]
    pub estimate: Option<SpectralEstimate>,
}

pub const RESULT_COLUMNS: [&str; 10] =
    ["model", "op_kind", "geometry", "boundary", "precision", "value", "cw_lower", "cw_upper", "iterations", "seconds"];

pub fn rows_csv(rows: &[ResultRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULT_COLUMNS).unwrap();
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.op_kind.to_string(),
            r.geometry.clone(),
            r.boundary.clone(),
            r.precision.to_string(),
            r.value.clone(),
            r.cw_lower.clone(),
            r.cw_upper.clone(),
            r.iterations.to_string(),
            r.seconds.map(|s| format!("{s:.3}")).unwrap_or_default(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

/// What an experiment produced.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    /// The result document, as written to `--out` or meant for standard output.
    pub document: String,
    pub rows: Vec<ResultRow>,
    pub bounds: Vec<EntropyBound>,
    pub identities: Vec<IdentityCheck>,
    /// False when some spectral run stopped before its enclosure met the tolerance.
    pub converged: bool,
    /// False when some counting identity failed.
    pub identities_hold: bool,
}

/// Geometry of one operator.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Geometry {
    Row(usize),
    Slab(usize, usize),
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Row(n) => write!(f, "n={n}"),
            Geometry::Slab(a, b) => write!(f, "n1={a} n2={b}"),
        }
    }
}

fn sizes(list: &Option<SizeList>, what: &str) -> Result<Vec<usize>> {
    let v = list.as_ref().map(|l| l.0.clone()).ok_or_else(|| Error::InvalidArgument(format!("--{what} is required")))?;
    if v.is_empty() || v.contains(&0) {
        return Err(Error::InvalidArgument(format!("--{what} sizes must be positive")));
    }
    Ok(v)
}

fn geometries(cfg: &ExperimentConfig, d: usize) -> Result<Vec<Geometry>> {
    match d {
        2 => {
            if cfg.n1.is_some() || cfg.n2.is_some() {
                return Err(Error::InvalidArgument("a 2-D model takes --n, not --n1/--n2".into()));
            }
            Ok(sizes(&cfg.n, "n")?.into_iter().map(Geometry::Row).collect())
        }
        3 => {
            if cfg.n.is_some() {
                return Err(Error::InvalidArgument("a 3-D model takes --n1 and --n2, not --n".into()));
            }
            let (a, b) = (sizes(&cfg.n1, "n1")?, sizes(&cfg.n2, "n2")?);
            Ok(a.iter().flat_map(|&x| b.iter().map(move |&y| Geometry::Slab(x, y))).collect())
        }
        _ => Err(Error::InvalidArgument(format!("transfer operators need a 2-D or 3-D model, this one has d = {d}"))),
    }
}

fn boundary_for(cfg: &ExperimentConfig, d: usize) -> Result<BoundaryDescriptor> {
    let axes = d - 1;
    let default = match cfg.op {
        OpKind::Periodic => Boundary::Periodic,
        _ => Boundary::Open,
    };
    match &cfg.boundary {
        None => Ok(BoundaryDescriptor::new(vec![default; axes])),
        Some(b) if cfg.op == OpKind::OneVertex => Err(Error::InvalidArgument(format!(
            "one-vertex operators have no transverse boundary (got --boundary {b})"
        ))),
        Some(b) if b.axes().len() == 1 && axes == 2 => Ok(BoundaryDescriptor::new(vec![b.axes()[0]; 2])),
        Some(b) if b.axes().len() != axes => Err(Error::InvalidArgument(format!(
            "--boundary needs {axes} value(s) for a {d}-D model, got {}",
            b.axes().len()
        ))),
        Some(b) => {
            if cfg.op == OpKind::Periodic && b.axes().iter().any(|&x| x != Boundary::Periodic) {
                return Err(Error::InvalidArgument("--op periodic conflicts with an open --boundary".into()));
            }
            Ok(b.clone())
        }
    }
}

fn run_one(sys: &ConstraintSystem, cfg: &ExperimentConfig, geometry: &Geometry, bc: &BoundaryDescriptor) -> Result<ResultRow> {
    let started = Instant::now();
    let est = match (geometry, cfg.op) {
        (Geometry::Row(n), OpKind::OneVertex) => measure(&build_one_vertex_2d(sys, *n)?, cfg)?,
        (Geometry::Slab(a, b), OpKind::OneVertex) => measure(&build_one_vertex_3d(sys, *a, *b)?, cfg)?,
        (Geometry::Row(n), _) => measure(&build_row_transfer_2d(sys, *n, bc.axes()[0])?, cfg)?,
        (Geometry::Slab(a, b), _) => measure(&build_slab_transfer_3d(sys, *a, *b, bc)?, cfg)?,
    };
    let seconds = started.elapsed().as_secs_f64();
    log::info!("{geometry} {}: {} iterations, converged {}, {seconds:.2}s", cfg.op, est.iterations, est.converged);
    let digits = cfg.iteration.precision_digits as usize;
    Ok(ResultRow {
        model: cfg.model.label(),
        op_kind: cfg.op,
        geometry: geometry.to_string(),
        boundary: if cfg.op == OpKind::OneVertex { "slanted".into() } else { bc.to_string() },
        precision: cfg.iteration.precision_digits,
        value: format_float(&est.value, digits),
        cw_lower: format_float(&est.cw_lower, digits),
        cw_upper: format_float(&est.cw_upper, digits),
        iterations: est.iterations,
        seconds: cfg.record_time.then_some(seconds),
        estimate: Some(est),
    })
}

fn measure<O: Operator>(op: &O, cfg: &ExperimentConfig) -> Result<SpectralEstimate> {
    let m = op.dim();
    // two working vectors of MPFR numbers dominate memory
    let limb_bytes = (cfg.iteration.bits() as usize).div_ceil(64) * 8 + 32;
    log::info!("{}: {m} states, about {} MiB of iteration vectors", op.descriptor(), (2 * m * limb_bytes) >> 20);
    perron_radius(op, &cfg.iteration)
}

fn radius<O: Operator>(op: &O, cfg: &IterationConfig) -> Result<SpectralEstimate> {
    let est = perron_radius(op, cfg)?;
    if !est.converged {
        return Err(Error::NotConverged(format!("{} after {} iterations", op.descriptor(), est.iterations)));
    }
    Ok(est)
}

/// Runs the configured task and writes its document to `cfg.out` when set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.iteration.validate()?;
    if cfg.task != Task::Spectrum && cfg.iteration.checkpoint.is_some() {
        return Err(Error::InvalidArgument("checkpoints apply to a single spectrum run".into()));
    }
    let sys = cfg.model.load()?;
    let mut outcome = ExperimentOutcome {
        document: String::new(),
        rows: Vec::new(),
        bounds: Vec::new(),
        identities: Vec::new(),
        converged: true,
        identities_hold: true,
    };
    match cfg.task {
        Task::Spectrum | Task::Sweep => {
            let geoms = geometries(cfg, sys.d())?;
            if cfg.task == Task::Spectrum && geoms.len() != 1 {
                return Err(Error::InvalidArgument("spectrum takes a single size; use sweep for ranges".into()));
            }
            let bc = boundary_for(cfg, sys.d())?;
            for g in &geoms {
                let row = run_one(&sys, cfg, g, &bc)?;
                outcome.converged &= row.estimate.as_ref().is_some_and(|e| e.converged);
                outcome.rows.push(row);
            }
            outcome.document = match cfg.format {
                OutputFormat::Csv => rows_csv(&outcome.rows),
                OutputFormat::Json => serde_json::to_string_pretty(&outcome.rows).expect("rows serialize") + "\n",
            };
        }
        Task::Bounds => {
            outcome.bounds = match sys.d() {
                2 => bounds_2d(&sys, cfg)?,
                3 => bounds_3d(&sys, cfg)?,
                d => return Err(Error::InvalidArgument(format!("bounds need a 2-D or 3-D model, got d = {d}"))),
            };
            outcome.document = match cfg.format {
                OutputFormat::Csv => bounds_csv(&outcome.bounds),
                OutputFormat::Json => bound_report(&outcome.bounds).to_json() + "\n",
            };
        }
        Task::OracleCheck => {
            outcome.identities = identities_for_system(&cfg.model.label(), &sys, cfg.max_n)?;
            outcome.identities_hold = outcome.identities.iter().all(|c| c.holds);
            outcome.document = match cfg.format {
                OutputFormat::Csv => identities_csv(&outcome.identities),
                OutputFormat::Json => serde_json::to_string_pretty(&outcome.identities).expect("checks serialize") + "\n",
            };
        }
    }
    if let Some(path) = &cfg.out {
        write_atomically(path, &outcome.document)?;
    }
    Ok(outcome)
}

fn identities_csv(checks: &[IdentityCheck]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["status", "identity", "lhs", "relation", "rhs"]).unwrap();
    for c in checks {
        let status = if c.holds { "pass" } else { "FAIL" };
        w.write_record([status, &c.name, &c.lhs, c.relation, &c.rhs]).unwrap();
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

fn write_atomically(path: &Path, text: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Every rigorous 2-D bound from radii of sizes up to `max_n`, plus the heuristic
/// bracket from one-vertex radii when `--n` lists their sizes.
fn bounds_2d(sys: &ConstraintSystem, cfg: &ExperimentConfig) -> Result<Vec<EntropyBound>> {
    if !sys.is_isotropic() || !sys.is_symmetric() {
        return Err(Error::InvalidArgument("2-D bounds need an isotropic symmetric system".into()));
    }
    let max_n = cfg.max_n.max(1);
    let it = &cfg.iteration;
    let graph = radius(&SparseMatrix::from_rows(
        (0..sys.k()).map(|a| (0..sys.k()).filter(|&b| sys.axis(0).has_edge(a, b)).collect()).collect(),
    )?, it)?;
    let mut open = vec![graph.clone()];
    let mut per = vec![graph];
    for n in 1..=max_n {
        open.push(radius(&build_row_transfer_2d(sys, n, Boundary::Open)?, it)?);
        per.push(radius(&build_row_transfer_2d(sys, n, Boundary::Periodic)?, it)?);
    }
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push(upper_bound_open_2d(&open[n], n)?);
        if n % 2 == 0 {
            out.push(upper_bound_periodic_2d(&per[n], n)?);
        }
    }
    for q in 0..max_n {
        for p in 1..=max_n {
            if p + 2 * q < max_n {
                out.push(lower_bound_open_2d(&open[p + 2 * q + 1], &open[2 * q + 1], p, q)?);
            }
            if p + 2 * q <= max_n {
                out.push(lower_bound_periodic_2d(&per[p + 2 * q], &per[2 * q], p, q)?);
            }
        }
    }
    if let Some(list) = &cfg.n {
        let mut values = Vec::new();
        for &n in &list.0 {
            values.push((n, radius(&build_one_vertex_2d(sys, n)?, it)?.value));
        }
        let report = heuristic_bracket_2d(&values);
        match report.bracket {
            Some((lo, hi)) => out.extend([lo, hi]),
            None => log::warn!("no heuristic bracket: {}", report.violation.as_deref().unwrap_or("need even and odd sizes")),
        }
    }
    Ok(out)
}

/// The periodic upper bound for every even torus within `--n1 x --n2`, and the
/// conditional corner ratio at the smallest listed slab.
fn bounds_3d(sys: &ConstraintSystem, cfg: &ExperimentConfig) -> Result<Vec<EntropyBound>> {
    let (a, b) = (sizes(&cfg.n1, "n1")?, sizes(&cfg.n2, "n2")?);
    let it = &cfg.iteration;
    let mut out = Vec::new();
    let per = BoundaryDescriptor::slab(Boundary::Periodic, Boundary::Periodic);
    for &x in a.iter().filter(|x| *x % 2 == 0) {
        for &y in b.iter().filter(|y| *y % 2 == 0) {
            out.push(upper_bound_periodic_3d(&radius(&build_slab_transfer_3d(sys, x, y, &per)?, it)?, x, y)?);
        }
    }
    let (m1, m2) = (a.iter().min().copied().unwrap_or(1), b.iter().min().copied().unwrap_or(1));
    let open = BoundaryDescriptor::slab(Boundary::Open, Boundary::Open);
    let corners = [(m1, m2), (m1 + 1, m2), (m1, m2 + 1), (m1 + 1, m2 + 1)];
    let mut ests = Vec::with_capacity(4);
    for (x, y) in corners {
        ests.push(radius(&build_slab_transfer_3d(sys, x, y, &open)?, it)?);
    }
    let radii = [0, 1, 2, 3].map(|i| SlabRadius { n1: corners[i].0, n2: corners[i].1, estimate: &ests[i] });
    out.push(corner_ratio_lower_bound_3d(radii)?);
    Ok(out)
}

/// Process exit status for a failed experiment: 2 for configuration errors, 3 when a
/// size guard refused, 4 when an iteration did not converge.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::CapacityExceeded { .. } | Error::WorkLimitExceeded { .. } => 3,
        Error::NotConverged(_) | Error::NonFinite { .. } => 4,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_lists() {
        assert_eq!("7".parse::<SizeList>().unwrap().0, vec![7]);
        assert_eq!("2..5".parse::<SizeList>().unwrap().0, vec![2, 3, 4, 5]);
        assert_eq!("3,5".parse::<SizeList>().unwrap().0, vec![3, 5]);
        assert!("5..2".parse::<SizeList>().is_err());
        assert!("x".parse::<SizeList>().is_err());
    }

    #[test]
    fn model_list_is_stable() {
        let a = list_models();
        assert_eq!(a, list_models());
        assert!(a.contains("hard-square (k=2)"));
        assert!(a.contains("monomer-dimer d=2 (k=5)"));
    }

    #[test]
    fn spectrum_rows_and_errors() {
        let mut cfg = ExperimentConfig::new(ModelSpec::Builtin("hard-square".into()), Task::Sweep);
        cfg.n = Some("2..3".parse().unwrap());
        cfg.iteration = IterationConfig::with_precision(20);
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.rows.len(), 2);
        assert!(out.document.starts_with("model,op_kind,geometry"));
        assert!(out.rows[0].value.starts_with("2.414213562373095"));

        cfg.model = ModelSpec::Builtin("nope".into());
        assert_eq!(exit_code(&run_experiment(&cfg).unwrap_err()), 2);
        cfg.model = ModelSpec::Builtin("hard-square-3d".into());
        assert_eq!(exit_code(&run_experiment(&cfg).unwrap_err()), 2);
    }
}
