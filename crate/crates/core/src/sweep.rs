//! `(T, ω)` sweeps driven by a JSON run configuration.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "model": { "kind": "heisenberg", "J": 0.5 },
//!   "drive": { "coupling": "sz1", "xi": 0.05, "delta": 0.2 },
//!   "grid": { "T": { "start": 0.1, "stop": 2.0, "step": 0.05 }, "omega": [0.3, 0.5] },
//!   "outputs": ["lqu_closed", "lqu_pipeline"],
//!   "output": { "path": "out.csv", "format": "csv" }
//! }
//! ```
//!
//! A custom model replaces the Heisenberg block with
//! `{ "kind": "custom", "h0": <matrix or path>, "d1": 2, "d2": 2 }` and the
//! coupling with `{ "matrix": <matrix or path> }`. Relative paths resolve
//! against the config file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{LquError, Result};
use crate::heisenberg::{
    closed_form_concurrence, closed_form_lqu, critical_temperatures, HeisenbergParams, HeisenbergPipeline,
};
use crate::linalg::max_abs;
use crate::linear_response::{lqu_driven, DriveSpec, DrivenRoute, NamedCoupling};
use crate::lqu::LquResult;
use crate::par::{self, Execution};
use crate::state::{boltzmann_weights, eig_hermitian, Hamiltonian, SpectralData};
use crate::su_algebra::{build_generators, GeneratorSet};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_DELTA: f64 = 0.2;
/// Closed form and pipeline must agree to this in `compare` runs.
pub const COMPARE_TOL: f64 = 1e-8;

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub model: ModelConfig,
    pub drive: DriveConfig,
    pub grid: GridConfig,
    pub outputs: Vec<Quantity>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelConfig {
    Heisenberg {
        #[serde(rename = "J")]
        j: f64,
    },
    Custom {
        h0: MatrixSource,
        d1: usize,
        d2: usize,
    },
}

/// Inline matrix or a path to a matrix JSON file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Path(PathBuf),
    Inline(Value),
}

impl MatrixSource {
    fn load(&self, base: &Path) -> Result<crate::linalg::CMatrix> {
        match self {
            MatrixSource::Path(p) => crate::io::read_matrix(&base.join(p)),
            MatrixSource::Inline(v) => crate::io::matrix_from_value(v),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub coupling: CouplingConfig,
    #[serde(default)]
    pub xi: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CouplingConfig {
    Named(String),
    Matrix { matrix: MatrixSource },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "T")]
    pub t: Axis,
    pub omega: Axis,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Axis {
    /// Grid values; ranges include `stop` when it lies on the lattice.
    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        let v = match self {
            Axis::List(v) => v.clone(),
            Axis::Range { start, stop, step } => {
                if !(step.is_finite() && *step > 0.0) {
                    return Err(LquError::InvalidConfig(format!(
                        "{name} range step must be > 0, got {step}"
                    )));
                }
                if !(start.is_finite() && stop.is_finite()) || stop < start {
                    return Err(LquError::InvalidConfig(format!(
                        "{name} range needs finite start <= stop, got [{start}, {stop}]"
                    )));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..n).map(|k| start + k as f64 * step).collect()
            }
        };
        if v.is_empty() {
            return Err(LquError::InvalidConfig(format!("{name} grid is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(LquError::InvalidConfig(format!("{name} grid has non-finite values")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    LquClosed,
    LquPipeline,
    Concurrence,
    Tc,
    WEigenvalues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = LquError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(LquError::InvalidConfig(format!(
                "unknown format '{other}', expected csv or json"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text)?;
        cfg.base_dir = base_dir.into();
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = crate::io::read_file(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, base)
    }

    /// Output path resolved against the config directory.
    pub fn output_path(&self) -> Option<PathBuf> {
        self.output.as_ref()?.path.as_ref().map(|p| self.base_dir.join(p))
    }

    pub fn format(&self) -> Format {
        self.output.as_ref().map(|o| o.format).unwrap_or_default()
    }
}

enum Model {
    Heisenberg(HeisenbergPipeline),
    Custom { h0_spectrum: SpectralData },
}

/// A validated config with every matrix loaded and diagonalized.
pub struct PreparedRun {
    model: Model,
    coupling: Hamiltonian,
    generators: GeneratorSet,
    xi: f64,
    delta: f64,
    t: Vec<f64>,
    omega: Vec<f64>,
    outputs: Vec<Quantity>,
}

impl PreparedRun {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        if cfg.schema != SCHEMA_VERSION {
            return Err(LquError::InvalidConfig(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                cfg.schema
            )));
        }
        let mut outputs = cfg.outputs.clone();
        outputs.sort();
        outputs.dedup();
        if outputs.is_empty() {
            return Err(LquError::InvalidConfig("no output quantities requested".into()));
        }
        let t = cfg.grid.t.values("T")?;
        let omega = cfg.grid.omega.values("omega")?;
        if let Some(bad) = t.iter().find(|x| **x <= 0.0) {
            return Err(LquError::InvalidConfig(format!("temperatures must be > 0, got {bad}")));
        }
        if let Some(bad) = omega.iter().find(|x| **x < 0.0) {
            return Err(LquError::InvalidConfig(format!("frequencies must be >= 0, got {bad}")));
        }
        if !cfg.drive.xi.is_finite() {
            return Err(LquError::InvalidConfig(format!(
                "xi must be finite, got {}",
                cfg.drive.xi
            )));
        }
        if !(cfg.drive.delta.is_finite() && cfg.drive.delta > 0.0) {
            return Err(LquError::InvalidConfig(format!(
                "delta must be > 0, got {}",
                cfg.drive.delta
            )));
        }

        let (model, d1, d2) = match &cfg.model {
            ModelConfig::Heisenberg { j } => {
                if !(j.is_finite() && *j > 0.0) {
                    return Err(LquError::InvalidConfig(format!("J must be > 0, got {j}")));
                }
                (Model::Heisenberg(HeisenbergPipeline::new(*j)?), 2, 2)
            }
            ModelConfig::Custom { h0, d1, d2 } => {
                let h0 = Hamiltonian::new(h0.load(&cfg.base_dir)?, *d1, *d2)?;
                let closed_only = [Quantity::LquClosed, Quantity::Concurrence, Quantity::Tc];
                if let Some(q) = outputs.iter().find(|q| closed_only.contains(q)) {
                    return Err(LquError::InvalidConfig(format!(
                        "{} is only available for the heisenberg model",
                        column_name(*q)
                    )));
                }
                let h0_spectrum = eig_hermitian(h0.data())?;
                (Model::Custom { h0_spectrum }, *d1, *d2)
            }
        };

        let coupling = match &cfg.drive.coupling {
            CouplingConfig::Named(name) => {
                let named: NamedCoupling = name.parse()?;
                if (d1, d2) != (2, 2) {
                    return Err(LquError::InvalidConfig(format!(
                        "named coupling '{name}' needs a two-qubit model, got {d1}x{d2}"
                    )));
                }
                named.operator()
            }
            CouplingConfig::Matrix { matrix } => Hamiltonian::new(matrix.load(&cfg.base_dir)?, d1, d2)?,
        };
        if let Model::Heisenberg(_) = model {
            if outputs
                .iter()
                .any(|q| matches!(q, Quantity::LquClosed | Quantity::Concurrence))
                && !matches!(&cfg.drive.coupling, CouplingConfig::Named(_))
                && cfg.drive.xi != 0.0
            {
                return Err(LquError::InvalidConfig(
                    "closed forms assume a local Pauli coupling (sx1 ... sz2)".into(),
                ));
            }
        }

        Ok(Self {
            model,
            coupling,
            generators: build_generators(d1)?,
            xi: cfg.drive.xi,
            delta: cfg.drive.delta,
            t,
            omega,
            outputs,
        })
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["T".to_string(), "omega".to_string()];
        for q in &self.outputs {
            match q {
                Quantity::Tc => cols.extend(["tc0".to_string(), "tc1".to_string()]),
                Quantity::WEigenvalues => {
                    cols.extend((0..self.generators.len()).map(|k| format!("w_eig_{k}")));
                }
                other => cols.push(column_name(*other).to_string()),
            }
        }
        cols.push("flags".to_string());
        cols
    }

    /// Grid points in T-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.t
            .iter()
            .flat_map(|&t| self.omega.iter().map(move |&w| (t, w)))
            .collect()
    }

    fn pipeline(&self, t: f64, omega: f64, route: DrivenRoute) -> Result<LquResult> {
        let drive = DriveSpec::new(self.coupling.clone(), self.xi, omega, self.delta)?;
        match &self.model {
            Model::Heisenberg(p) => lqu_driven(&p.h0_spectrum, &p.weights(t)?, &drive, &self.generators, route),
            Model::Custom { h0_spectrum } => {
                let (weights, _) = boltzmann_weights(&h0_spectrum.eigenvalues, 1.0 / t)?;
                lqu_driven(h0_spectrum, &weights, &drive, &self.generators, route)
            }
        }
    }

    fn heisenberg_params(&self, t: f64, omega: f64) -> Option<HeisenbergParams> {
        match &self.model {
            Model::Heisenberg(p) => Some(HeisenbergParams {
                j: p.j,
                t,
                xi: self.xi,
                delta: self.delta,
                omega,
            }),
            Model::Custom { .. } => None,
        }
    }

    fn evaluate(&self, t: f64, omega: f64, compare_routes: bool) -> Result<PointResult> {
        let wants = |q: Quantity| self.outputs.contains(&q);
        let hp = self.heisenberg_params(t, omega);
        let pipeline = if wants(Quantity::LquPipeline) || wants(Quantity::WEigenvalues) || compare_routes {
            Some(self.pipeline(t, omega, DrivenRoute::Direct)?)
        } else {
            None
        };
        let route_gap = if compare_routes {
            let other = self.pipeline(t, omega, DrivenRoute::ViaPerturbation)?;
            let direct = pipeline.as_ref().expect("computed above");
            Some(max_abs(&(&direct.w.w1 - &other.w.w1)).max((direct.value - other.value).abs()))
        } else {
            None
        };

        let mut values = Vec::new();
        let mut closed = None;
        for q in &self.outputs {
            match q {
                Quantity::LquClosed => {
                    let v = closed_form_lqu(hp.as_ref().expect("validated"));
                    closed = Some(v);
                    values.push(v);
                }
                Quantity::LquPipeline => values.push(pipeline.as_ref().expect("computed").value),
                Quantity::Concurrence => values.push(closed_form_concurrence(hp.as_ref().expect("validated"))),
                Quantity::Tc => {
                    let tc = critical_temperatures(hp.as_ref().expect("validated"));
                    values.extend([tc.tc0, tc.tc1]);
                }
                Quantity::WEigenvalues => values.extend(&pipeline.as_ref().expect("computed").eigenvalues),
            }
        }
        let flags = pipeline
            .as_ref()
            .map(|r| r.warnings.iter().map(|w| w.tag().to_string()).collect())
            .unwrap_or_default();
        let gap = match (closed, pipeline.as_ref()) {
            (Some(c), Some(p)) if wants(Quantity::LquPipeline) => Some((c - p.value).abs()),
            _ => None,
        };
        Ok(PointResult {
            row: SweepRow {
                t,
                omega,
                values,
                flags,
            },
            closed_vs_pipeline: gap,
            route_gap,
        })
    }
}

fn column_name(q: Quantity) -> &'static str {
    match q {
        Quantity::LquClosed => "lqu_closed",
        Quantity::LquPipeline => "lqu_pipeline",
        Quantity::Concurrence => "concurrence",
        Quantity::Tc => "tc",
        Quantity::WEigenvalues => "w_eigenvalues",
    }
}

struct PointResult {
    row: SweepRow,
    closed_vs_pipeline: Option<f64>,
    route_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub omega: f64,
    pub values: Vec<f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub flagged_rows: usize,
    /// `max |closed − pipeline|` when both were requested.
    pub max_closed_vs_pipeline: Option<f64>,
    /// Largest `w¹` or LQU difference between the two driven assemblies.
    pub max_route_discrepancy: Option<f64>,
}

impl Summary {
    pub fn max_discrepancy(&self) -> Option<f64> {
        match (self.max_closed_vs_pipeline, self.max_route_discrepancy) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn report(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3e}"));
        format!(
            "rows: {}\nflagged rows: {}\nmax |closed - pipeline|: {}\nmax route discrepancy: {}\n",
            self.rows,
            self.flagged_rows,
            fmt(self.max_closed_vs_pipeline),
            fmt(self.max_route_discrepancy)
        )
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub table: SweepTable,
    pub summary: Summary,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub execution: Execution,
    /// Also assemble `w¹` through `ρ₁` and report the difference.
    pub compare_routes: bool,
}

fn fold_max(acc: Option<f64>, v: Option<f64>) -> Option<f64> {
    match (acc, v) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

pub fn run_prepared(prep: &PreparedRun, opts: RunOptions) -> Result<SweepOutput> {
    let points = prep.points();
    let results = par::map(&points, opts.execution, |&(t, w)| {
        prep.evaluate(t, w, opts.compare_routes)
    })?;
    let mut rows = Vec::with_capacity(results.len());
    let mut summary = Summary::default();
    for r in results {
        let r = r?;
        summary.max_closed_vs_pipeline = fold_max(summary.max_closed_vs_pipeline, r.closed_vs_pipeline);
        summary.max_route_discrepancy = fold_max(summary.max_route_discrepancy, r.route_gap);
        if !r.row.flags.is_empty() {
            summary.flagged_rows += 1;
        }
        rows.push(r.row);
    }
    summary.rows = rows.len();
    Ok(SweepOutput {
        table: SweepTable {
            columns: prep.columns(),
            rows,
        },
        summary,
    })
}

pub fn run(cfg: &RunConfig, opts: RunOptions) -> Result<SweepOutput> {
    run_prepared(&PreparedRun::new(cfg)?, opts)
}

/// Fixed 17-significant-digit formatting so output is byte-reproducible.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            let mut rec = vec![format_float(row.t), format_float(row.omega)];
            rec.extend(row.values.iter().map(|v| format_float(*v)));
            rec.push(row.flags.join(","));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| LquError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn to_json(&self, summary: &Summary) -> Result<String> {
        let doc = serde_json::json!({ "columns": self.columns, "rows": self.rows, "summary": summary });
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn render(&self, summary: &Summary, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(summary),
        }
    }

    /// Column index by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a named quantity column, one per row.
    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column(name)?;
        if idx < 2 || idx + 1 == self.columns.len() {
            return None;
        }
        Some(self.rows.iter().map(|r| r.values[idx - 2]).collect())
    }
}
