use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use lqu_core::entanglement::{concurrence_wootters, concurrence_x_matrix};
use lqu_core::heisenberg::{
    bisect_critical_temperature, closed_form_concurrence, closed_form_concurrence_raw, closed_form_lqu_result,
    critical_temperatures, x_state, HeisenbergParams, HeisenbergPipeline,
};
use lqu_core::io::read_matrix;
use lqu_core::linear_response::{lqu_driven, DriveSpec, DrivenRoute, NamedCoupling};
use lqu_core::par::Execution;
use lqu_core::random::{random_density_matrix, random_x_state, rng};
use lqu_core::state::{eig_hermitian, thermal_state, DensityMatrix, Hamiltonian, PerturbationMatrix};
use lqu_core::sweep::{self, Format, PreparedRun, Quantity, RunConfig, RunOptions, COMPARE_TOL, DEFAULT_DELTA};
use lqu_core::{build_generators, lqu_exact, lqu_perturbative, LquError, LquResult};

use crate::report::{emit, Report};
use crate::{Cli, Command, GlobalOpts, OutputFormat};

#[derive(Debug)]
pub enum CliError {
    /// Flag combinations clap cannot express.
    Usage(String),
    Input(LquError),
    CompareFailed {
        discrepancy: f64,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CompareFailed { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Input(e) => write!(f, "{e}"),
            CliError::CompareFailed { discrepancy } => {
                write!(
                    f,
                    "max discrepancy {discrepancy:.3e} exceeds tolerance {COMPARE_TOL:.0e}"
                )
            }
        }
    }
}

impl From<LquError> for CliError {
    fn from(e: LquError) -> Self {
        CliError::Input(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GeneratorsArgs {
    #[arg(long)]
    pub d: usize,
    /// Only report residuals; fails with exit 3 if they exceed 1e-12.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LquStaticArgs {
    /// State (or ρ₀ with --rho1) as a matrix JSON file.
    #[arg(long, conflicts_with = "random")]
    pub rho: Option<PathBuf>,
    /// Use a random state drawn with --seed instead of --rho.
    #[arg(long)]
    pub random: bool,
    /// First-order perturbation; switches to the perturbative evaluation.
    #[arg(long, requires = "epsilon")]
    pub rho1: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub d1: usize,
    /// Defaults to dim / d1.
    #[arg(long)]
    pub d2: Option<usize>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LquDrivenArgs {
    /// Unperturbed Hamiltonian as a matrix JSON file.
    #[arg(long)]
    pub h0: PathBuf,
    /// Named two-qubit coupling (sx1 .. sz2) or a matrix JSON file.
    #[arg(long)]
    pub coupling: String,
    #[arg(long, default_value_t = 2)]
    pub d1: usize,
    #[arg(long)]
    pub d2: Option<usize>,
    #[arg(long = "T")]
    pub t: f64,
    #[arg(long)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0)]
    pub xi: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = RouteArg::Direct)]
    pub route: RouteArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Direct,
    ViaPerturbation,
}

impl From<RouteArg> for DrivenRoute {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Direct => DrivenRoute::Direct,
            RouteArg::ViaPerturbation => DrivenRoute::ViaPerturbation,
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct HeisenbergArgs {
    #[arg(long = "J")]
    pub j: f64,
    #[arg(long = "T")]
    pub t: f64,
    #[arg(long, default_value_t = 0.0)]
    pub xi: f64,
    /// Required when --xi is nonzero.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = HeisenbergQuantity::Lqu)]
    pub quantity: HeisenbergQuantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeisenbergQuantity {
    /// Closed-form LQU.
    Lqu,
    /// LQU through the general driven pipeline.
    LquPipeline,
    Concurrence,
    Tc,
    /// The closed-form `w` and its eigenvalues.
    W,
    XState,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConcurrenceArgs {
    /// Two-qubit state as a matrix JSON file.
    #[arg(long, required_unless_present = "random_x", conflicts_with = "random_x")]
    pub rho: Option<PathBuf>,
    /// Compare Wootters and X-state formulas on N random X states.
    #[arg(long)]
    pub random_x: Option<usize>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
}

pub fn dispatch(cli: &Cli) -> CliResult {
    let g = &cli.global;
    match &cli.command {
        Command::Generators(a) => generators(g, a),
        Command::LquStatic(a) => lqu_static(g, a),
        Command::LquDriven(a) => lqu_driven_cmd(g, a),
        Command::Heisenberg(a) => heisenberg(g, a),
        Command::Concurrence(a) => concurrence(g, a),
        Command::Compare(a) => run_config(g, a, true),
        Command::Run(a) => run_config(g, a, false),
    }
}

fn finish(g: &GlobalOpts, report: &Report) -> CliResult {
    emit(&report.render(g.format), g.output.as_deref())
}

fn split_dims(dim: usize, d1: usize, d2: Option<usize>) -> CliResult<(usize, usize)> {
    if d1 == 0 {
        return Err(LquError::InvalidDimension("d1 must be positive".into()).into());
    }
    let d2 = d2.unwrap_or(dim / d1);
    if d1 * d2 != dim {
        return Err(LquError::InvalidDimension(format!("{dim}x{dim} matrix does not split as {d1} x {d2}")).into());
    }
    Ok((d1, d2))
}

fn load_state(path: &Path, d1: usize, d2: Option<usize>) -> CliResult<DensityMatrix> {
    let m = read_matrix(path)?;
    let (d1, d2) = split_dims(m.nrows(), d1, d2)?;
    Ok(DensityMatrix::validated(m, d1, d2)?)
}

fn push_lqu(report: &mut Report, r: &LquResult) {
    report
        .number("lqu", r.value)
        .text("mode", r.mode.as_str())
        .list("w_eigenvalues", &r.eigenvalues);
    let tags: Vec<&str> = r.warnings.iter().map(|w| w.tag()).collect();
    report.text("flags", tags.join(","));
}

fn generators(g: &GlobalOpts, a: &GeneratorsArgs) -> CliResult {
    let gen = build_generators(a.d)?;
    let product = gen.product_rule_residual();
    let norm = gen.normalization_residual();
    let mut report = Report::default();
    report
        .integer("d", a.d)
        .integer("count", gen.len())
        .number("product_rule_residual", product)
        .number("normalization_residual", norm);
    if a.check {
        let ok = product < 1e-12 && norm < 1e-12;
        report.text("check", if ok { "pass" } else { "fail" });
        finish(g, &report)?;
        if !ok {
            return Err(LquError::Domain(format!("generator residuals too large: {product:.3e}, {norm:.3e}")).into());
        }
        return Ok(());
    }
    for (k, m) in gen.generators().iter().enumerate() {
        report.matrix(&format!("T{}", k + 1), m);
    }
    finish(g, &report)
}

fn lqu_static(g: &GlobalOpts, a: &LquStaticArgs) -> CliResult {
    let state = match (&a.rho, a.random) {
        (Some(p), _) => load_state(p, a.d1, a.d2)?,
        (None, true) => {
            let d2 = a.d2.unwrap_or(2);
            random_density_matrix(a.d1, d2, &mut rng(g.seed))
        }
        (None, false) => return Err(CliError::Usage("lqu-static needs --rho or --random".into())),
    };
    let gen = build_generators(state.d1())?;
    let result = match (&a.rho1, a.epsilon) {
        (Some(p), Some(eps)) => {
            let rho1 = PerturbationMatrix::new(read_matrix(p)?, eps, state.d1(), state.d2())?;
            let spec = eig_hermitian(state.data())?;
            lqu_perturbative(&spec, &rho1, &gen)?
        }
        _ => lqu_exact(&state, &gen)?,
    };
    let mut report = Report::default();
    push_lqu(&mut report, &result);
    finish(g, &report)
}

fn load_coupling(spec: &str, d1: usize, d2: usize) -> CliResult<Hamiltonian> {
    if let Ok(named) = spec.parse::<NamedCoupling>() {
        if (d1, d2) != (2, 2) {
            return Err(LquError::InvalidDimension(format!("coupling '{spec}' needs a 2x2 system")).into());
        }
        return Ok(named.operator());
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(LquError::InvalidConfig(format!(
            "coupling '{spec}' is neither a named coupling nor an existing file"
        ))
        .into());
    }
    Ok(Hamiltonian::new(read_matrix(path)?, d1, d2)?)
}

fn lqu_driven_cmd(g: &GlobalOpts, a: &LquDrivenArgs) -> CliResult {
    if !(a.t.is_finite() && a.t > 0.0) {
        return Err(LquError::Domain(format!("T must be > 0, got {}", a.t)).into());
    }
    let m = read_matrix(&a.h0)?;
    let (d1, d2) = split_dims(m.nrows(), a.d1, a.d2)?;
    let h0 = Hamiltonian::new(m, d1, d2)?;
    let coupling = load_coupling(&a.coupling, d1, d2)?;
    let drive = DriveSpec::new(coupling, a.xi, a.omega, a.delta)?;
    let th = thermal_state(&h0, 1.0 / a.t)?;
    let gen = build_generators(d1)?;
    let result = lqu_driven(&th.h0_spectrum, &th.weights, &drive, &gen, a.route.into())?;
    let mut report = Report::default();
    push_lqu(&mut report, &result);
    finish(g, &report)
}

fn heisenberg(g: &GlobalOpts, a: &HeisenbergArgs) -> CliResult {
    let omega = match a.omega {
        Some(w) => w,
        None if a.xi == 0.0 => 0.0,
        None => return Err(CliError::Usage("--omega is required when --xi is nonzero".into())),
    };
    let p = HeisenbergParams::new(a.j, a.t, a.xi, a.delta, omega)?;
    let mut report = Report::default();
    match a.quantity {
        HeisenbergQuantity::Lqu => push_lqu(&mut report, &closed_form_lqu_result(&p)?),
        HeisenbergQuantity::LquPipeline => {
            let pipe = HeisenbergPipeline::new(p.j)?;
            let gen = build_generators(2)?;
            let r = pipe.lqu(&p, &NamedCoupling::Sz1.operator(), &gen, DrivenRoute::Direct)?;
            push_lqu(&mut report, &r);
        }
        HeisenbergQuantity::Concurrence => {
            report
                .number("concurrence", closed_form_concurrence(&p))
                .number("concurrence_raw", closed_form_concurrence_raw(&p));
        }
        HeisenbergQuantity::Tc => {
            let tc = critical_temperatures(&p);
            report
                .number("tc0", tc.tc0)
                .number("tc1", tc.tc1)
                .number("tc_bisection", bisect_critical_temperature(&p)?);
        }
        HeisenbergQuantity::W => {
            let r = closed_form_lqu_result(&p)?;
            report
                .matrix("w", &r.w.hermitian_total())
                .list("w_eigenvalues", &r.eigenvalues);
        }
        HeisenbergQuantity::XState => {
            let x = x_state(&p);
            report.matrix("rho", &x.to_matrix()).number("trace", x.trace());
        }
    }
    finish(g, &report)
}

fn concurrence(g: &GlobalOpts, a: &ConcurrenceArgs) -> CliResult {
    let mut report = Report::default();
    if let Some(path) = &a.rho {
        let state = load_state(path, 2, Some(2))?;
        let w = concurrence_wootters(&state)?;
        report.number("concurrence", w.value).number("concurrence_raw", w.raw);
        // the X-state formula is only reported when it applies
        if let Ok(x) = concurrence_x_matrix(&state) {
            report.number("concurrence_x_state", x.value);
        }
        return finish(g, &report);
    }
    let n = a.random_x.unwrap_or(0);
    let mut r = rng(g.seed);
    let mut max_gap = 0.0f64;
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let st = random_x_state(&mut r);
        let w = concurrence_wootters(&st)?;
        let x = concurrence_x_matrix(&st)?;
        max_gap = max_gap.max((w.value - x.value).abs());
        values.push(w.value);
    }
    report
        .integer("samples", n)
        .number("max_wootters_vs_x_state", max_gap)
        .list("concurrence", &values);
    finish(g, &report)
}

fn sweep_format(g: &GlobalOpts, cfg: &RunConfig) -> Format {
    match g.format {
        Some(OutputFormat::Csv) => Format::Csv,
        Some(OutputFormat::Json) => Format::Json,
        None => cfg.format(),
    }
}

fn run_config(g: &GlobalOpts, a: &ConfigArgs, compare: bool) -> CliResult {
    let mut cfg = RunConfig::from_path(&a.config)?;
    if compare && matches!(cfg.model, sweep::ModelConfig::Heisenberg { .. }) {
        for q in [Quantity::LquClosed, Quantity::LquPipeline] {
            if !cfg.outputs.contains(&q) {
                cfg.outputs.push(q);
            }
        }
    }
    let prep = PreparedRun::new(&cfg)?;
    let opts = RunOptions {
        execution: Execution::from_workers(g.workers),
        compare_routes: compare,
    };
    let out = sweep::run_prepared(&prep, opts)?;
    let text = out.table.render(&out.summary, sweep_format(g, &cfg))?;
    let path = g.output.clone().or_else(|| cfg.output_path());
    emit(&text, path.as_deref())?;
    eprint!("{}", out.summary.report());
    if compare {
        let discrepancy = out.summary.max_discrepancy().unwrap_or(0.0);
        if discrepancy.is_nan() || discrepancy > COMPARE_TOL {
            return Err(CliError::CompareFailed { discrepancy });
        }
    }
    Ok(())
}
