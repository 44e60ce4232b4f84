mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pelastica::curve::{self, ClosureResult, Trace};
use pelastica::lorentz::minkowski_inner;
use pelastica::quadrature::QuadratureConfig;
use pelastica::verify::{self, VerificationReport};
use pelastica::{scalar, ElasticaError, ElasticaParams, SpaceForm};

use svg::Polyline;

#[derive(Parser, Debug)]
#[command(name = "pelastica", version, about = "Closed p-elastic curves in the hyperbolic plane and de Sitter 2-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Curvature extrema beta < alpha, the maximiser kappa_c and the window edge a_*.
    Roots(RootsArgs),
    /// Solve the closure condition for (n, m).
    Close(CloseArgs),
    /// Sample a curve as CSV, JSON or SVG.
    Trace(TraceArgs),
    /// Tabulate the angular progression and the energy across the window.
    Scan(ScanArgs),
    /// Closed (n, m) curves for a list of exponents.
    Evolve(EvolveArgs),
    /// Run the residual checks and oracles on one curve.
    Verify(VerifyArgs),
    /// The constant-curvature solution.
    Circle(CircleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Space {
    H2,
    H12,
}

impl From<Space> for SpaceForm {
    fn from(s: Space) -> Self {
        match s {
            Space::H2 => SpaceForm::Hyperbolic,
            Space::H12 => SpaceForm::DeSitter,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug)]
struct Quad {
    /// Gauss-Legendre nodes per panel on the first pass.
    #[arg(long, env = "PELASTICA_NODES")]
    nodes: Option<usize>,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, env = "PELASTICA_TOL")]
    tol: Option<f64>,
}

impl Quad {
    fn config(&self) -> Result<QuadratureConfig, Failure> {
        let mut cfg = QuadratureConfig::default();
        if let Some(n) = self.nodes {
            cfg.base_nodes = n;
        }
        if let Some(t) = self.tol {
            cfg.rel_tol = t;
        }
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct Curve {
    #[arg(long, value_enum)]
    space: Space,
    #[arg(long, allow_hyphen_values = true)]
    p: f64,
}

#[derive(Args, Debug)]
struct Out {
    /// Output file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RootsArgs {
    #[command(flatten)]
    curve: Curve,
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    out: Out,
    #[command(flatten)]
    quad: Quad,
}

#[derive(Args, Debug)]
struct CloseArgs {
    #[command(flatten)]
    curve: Curve,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    out: Out,
    #[command(flatten)]
    quad: Quad,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["a", "n"])))]
struct TraceArgs {
    #[command(flatten)]
    curve: Curve,
    /// Integration constant; traces `--periods` curvature periods.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["n", "m"])]
    a: Option<f64>,
    #[arg(long, default_value_t = 1, requires = "a")]
    periods: u32,
    /// Winding number of the closed curve.
    #[arg(long, requires = "m")]
    n: Option<u32>,
    /// Lobe count of the closed curve.
    #[arg(long, requires = "n")]
    m: Option<u32>,
    /// Samples per half-period.
    #[arg(long, default_value_t = curve::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    out: Out,
    #[command(flatten)]
    quad: Quad,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    curve: Curve,
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Periods over which the energy column is integrated.
    #[arg(long, default_value_t = 1)]
    energy_periods: u32,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    out: Out,
    #[command(flatten)]
    quad: Quad,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[arg(long, value_enum)]
    space: Space,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    /// Comma-separated exponents.
    #[arg(long = "p-list", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    p_list: Vec<f64>,
    #[arg(long, default_value_t = curve::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    out: Out,
    /// Also write every sample as an (p, s, x, y, z) point cloud on the quadric.
    #[arg(long)]
    quadric_out: Option<PathBuf>,
    #[command(flatten)]
    quad: Quad,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "h2")]
    space: Space,
    #[arg(long, allow_hyphen_values = true, default_value_t = 2.0)]
    p: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    a: f64,
    #[arg(long, default_value_t = curve::DEFAULT_SAMPLES)]
    samples: usize,
    /// Scale the curvature by 1.01 before the profile checks; they must then fail.
    #[arg(long)]
    perturb: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    out: Out,
    #[command(flatten)]
    quad: Quad,
}

#[derive(Args, Debug)]
struct CircleArgs {
    #[command(flatten)]
    curve: Curve,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    out: Out,
}

#[derive(Debug)]
enum Failure {
    Io(std::io::Error),
    Usage(String),
    Domain(String),
    Convergence(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 3,
            Failure::Convergence(_) => 4,
            Failure::Check(_) => 5,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(e) => write!(f, "io error: {e}"),
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Domain(m) | Failure::Convergence(m) => write!(f, "{m}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<ElasticaError> for Failure {
    fn from(e: ElasticaError) -> Self {
        let msg = e.to_string();
        match e {
            ElasticaError::InadmissibleExponent { .. } | ElasticaError::ClosureWindow { .. } => Failure::Usage(msg),
            _ if e.is_convergence() => Failure::Convergence(msg),
            _ => Failure::Domain(msg),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn unsupported(cmd: &str, f: Format) -> Failure {
    Failure::Usage(format!("{cmd} does not support --format {f:?}").to_lowercase())
}

fn params(space: Space, p: f64, a: f64) -> Result<ElasticaParams, Failure> {
    Ok(ElasticaParams::new(space.into(), p, a)?)
}

#[derive(Serialize)]
struct RootsOut {
    space: SpaceForm,
    p: f64,
    a: f64,
    a_star: f64,
    beta: f64,
    alpha: f64,
    kappa_c: f64,
}

fn cmd_roots(args: &RootsArgs) -> CmdResult {
    args.quad.config()?;
    let pr = params(args.curve.space, args.curve.p, args.a)?;
    let r = scalar::solve_roots(&pr, scalar::DEFAULT_ROOT_TOL)?;
    let o = RootsOut { space: pr.space(), p: pr.p(), a: pr.a(), a_star: pr.a_star(), beta: r.beta, alpha: r.alpha, kappa_c: r.kappa_c };
    let bytes = match args.format {
        Format::Json => output::json(&o)?,
        Format::Csv => output::csv_rows([&o])?,
        Format::Text => format!(
            "beta    = {}\nalpha   = {}\nkappa_c = {}\na_star  = {}\n",
            o.beta, o.alpha, o.kappa_c, o.a_star
        )
        .into_bytes(),
        f => return Err(unsupported("roots", f)),
    };
    output::emit(args.out.out.as_deref(), &bytes)?;
    Ok(())
}

const DEFECT_LIMIT: f64 = 1e-6;

fn closure_text(c: &ClosureResult) -> String {
    format!(
        "space = {}\np = {}\nq = {}/{}\na_q = {}\nlambda = {}\ntarget = {}\nclosure_defect = {:e}\niterations = {}\nmonotone_samples = {}\nreduced_confidence = {}\n",
        c.space, c.p, c.n, c.m, c.a_q, c.lambda_at_aq, c.target, c.closure_defect, c.iterations, c.monotone_samples, c.reduced_confidence
    )
}

fn check_defect(c: &ClosureResult) -> CmdResult {
    if c.closure_defect < DEFECT_LIMIT {
        Ok(())
    } else {
        Err(Failure::Check(format!("closure defect {:e} for p = {}, q = {}/{}", c.closure_defect, c.p, c.n, c.m)))
    }
}

fn cmd_close(args: &CloseArgs) -> CmdResult {
    let cfg = args.quad.config()?;
    let c = curve::solve_closure(args.curve.p, args.curve.space.into(), args.n, args.m, &cfg)?;
    let bytes = match args.format {
        Format::Json => output::json(&c)?,
        Format::Csv => output::csv_rows([&c])?,
        Format::Text => closure_text(&c).into_bytes(),
        f => return Err(unsupported("close", f)),
    };
    output::emit(args.out.out.as_deref(), &bytes)?;
    check_defect(&c)
}

#[derive(Serialize)]
struct SampleRow {
    s: f64,
    kappa: f64,
    kappa_prime: f64,
    theta: f64,
    x: f64,
    y: f64,
    z: f64,
}

fn sample_rows(tr: &Trace) -> impl Iterator<Item = SampleRow> + '_ {
    tr.samples.iter().map(|c| SampleRow {
        s: c.s,
        kappa: c.kappa,
        kappa_prime: c.kappa_prime,
        theta: c.theta,
        x: c.gamma.x,
        y: c.gamma.y,
        z: c.gamma.z,
    })
}

#[derive(Serialize)]
struct TraceJson<'a> {
    closure: Option<&'a ClosureResult>,
    trace: &'a Trace,
}

fn cmd_trace(args: &TraceArgs) -> CmdResult {
    let cfg = args.quad.config()?;
    let space: SpaceForm = args.curve.space.into();
    let (closure, tr) = match (args.a, args.n, args.m) {
        (Some(a), _, _) => (None, curve::trace(&params(args.curve.space, args.curve.p, a)?, args.periods, args.samples, &cfg)?),
        (None, Some(n), Some(m)) => {
            let (c, t) = curve::close_and_trace(args.curve.p, space, n, m, args.samples, &cfg)?;
            (Some(c), t)
        }
        _ => return Err(Failure::Usage("give either --a or both --n and --m".into())),
    };
    let bytes = match args.format {
        Format::Csv => output::csv_rows(sample_rows(&tr))?,
        Format::Json => output::json(&TraceJson { closure: closure.as_ref(), trace: &tr })?,
        Format::Svg => {
            let label = match &closure {
                Some(c) => format!("p = {}, q = {}/{}", c.p, c.n, c.m),
                None => format!("p = {}, a = {}", tr.params.p(), tr.params.a()),
            };
            let line = Polyline { label: label.clone(), points: tr.samples.iter().map(|c| c.gamma).collect() };
            svg::render(space, &format!("{} {label}", space.display_name()), &[line])?.into_bytes()
        }
        f => return Err(unsupported("trace", f)),
    };
    output::emit(args.out.out.as_deref(), &bytes)?;
    let q = verify::quadric_residual(&tr);
    if !q.passed {
        return Err(Failure::Check(format!("quadric residual {:e}", q.max_residual)));
    }
    match &closure {
        Some(c) => check_defect(c),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct ScanCsvRow {
    a: f64,
    fraction: f64,
    lambda: f64,
    decreasing: Option<bool>,
    closed_form: Option<f64>,
    energy: f64,
}

#[derive(Serialize)]
struct ScanJson<'a> {
    table: &'a verify::ScanTable,
    energy_periods: u32,
    energy: Vec<f64>,
}

fn cmd_scan(args: &ScanArgs) -> CmdResult {
    let cfg = args.quad.config()?;
    let space: SpaceForm = args.curve.space.into();
    space.check_exponent(args.curve.p)?;
    if args.grid < 16 {
        return Err(Failure::Usage(format!("--grid must be at least 16, got {}", args.grid)));
    }
    let table = verify::monotonicity_scan(args.curve.p, space, args.grid, &cfg)?;
    let fractions: Vec<f64> = table.rows.iter().map(|r| r.fraction).collect();
    let energy: Vec<f64> =
        verify::energy_scan(args.curve.p, space, args.energy_periods, &fractions, &cfg)?.into_iter().map(|(_, e)| e).collect();
    let bytes = match args.format {
        Format::Csv => output::csv_rows(table.rows.iter().zip(&energy).map(|(r, &e)| ScanCsvRow {
            a: r.a,
            fraction: r.fraction,
            lambda: r.lambda,
            decreasing: r.decreasing,
            closed_form: r.closed_form,
            energy: e,
        }))?,
        Format::Json => output::json(&ScanJson { table: &table, energy_periods: args.energy_periods, energy })?,
        f => return Err(unsupported("scan", f)),
    };
    output::emit(args.out.out.as_deref(), &bytes)?;
    if !table.strictly_decreasing {
        eprintln!("note: the scan is not strictly decreasing for p = {}", args.curve.p);
    }
    Ok(())
}

#[derive(Serialize)]
struct EvolveMember {
    closure: ClosureResult,
    planar_extent: f64,
    model_extent: f64,
}

#[derive(Serialize)]
struct EvolveJson {
    space: SpaceForm,
    n: u32,
    m: u32,
    members: Vec<EvolveMember>,
    /// Extent in the quadric for ℍ², in the punctured disk for ℍ²₁.
    extents_increasing: bool,
}

#[derive(Serialize)]
struct CloudRow {
    p: f64,
    s: f64,
    x: f64,
    y: f64,
    z: f64,
    level: f64,
}

fn cmd_evolve(args: &EvolveArgs) -> CmdResult {
    let cfg = args.quad.config()?;
    let space: SpaceForm = args.space.into();
    curve::check_closure_window(args.n, args.m)?;
    let results = curve::family_evolution(space, args.n, args.m, &args.p_list, args.samples, &cfg);
    let mut family = Vec::with_capacity(results.len());
    for r in results {
        family.push(r?);
    }
    let mut members = Vec::new();
    for (c, tr) in &family {
        members.push(EvolveMember { closure: *c, planar_extent: tr.max_planar_radius(), model_extent: tr.max_model_radius()? });
    }
    let extent = |e: &EvolveMember| match space {
        SpaceForm::Hyperbolic => e.planar_extent,
        SpaceForm::DeSitter => e.model_extent,
    };
    let extents_increasing = members.windows(2).all(|w| extent(&w[1]) > extent(&w[0]));
    let summary = EvolveJson { space, n: args.n, m: args.m, members, extents_increasing };
    let bytes = match args.format {
        Format::Json => output::json(&summary)?,
        Format::Csv => output::csv_rows(summary.members.iter().map(|e| {
            (e.closure.p, e.closure.a_q, e.closure.closure_defect, e.planar_extent, e.model_extent)
        }))
        .map(|b| [b"p,a_q,closure_defect,planar_extent,model_extent\n".as_slice(), &b].concat())?,
        Format::Svg => {
            let lines: Vec<Polyline> = family
                .iter()
                .map(|(c, tr)| Polyline { label: format!("p = {}", c.p), points: tr.samples.iter().map(|s| s.gamma).collect() })
                .collect();
            svg::render(space, &format!("{} family q = {}/{}", space.display_name(), args.n, args.m), &lines)?.into_bytes()
        }
        f => return Err(unsupported("evolve", f)),
    };
    output::emit(args.out.out.as_deref(), &bytes)?;
    if let Some(path) = &args.quadric_out {
        let rows = family.iter().flat_map(|(c, tr)| {
            tr.samples.iter().map(move |s| CloudRow {
                p: c.p,
                s: s.s,
                x: s.gamma.x,
                y: s.gamma.y,
                z: s.gamma.z,
                level: minkowski_inner(s.gamma, s.gamma),
            })
        });
        output::emit(Some(path), &output::csv_rows(rows)?)?;
    }
    for (c, _) in &family {
        check_defect(c)?;
    }
    Ok(())
}

fn report_table(reports: &[VerificationReport]) -> String {
    let mut s = format!("{:<34} {:>14} {:>10}  result\n", "check", "residual", "threshold");
    for r in reports {
        s += &format!(
            "{:<34} {:>14.3e} {:>10.1e}  {}\n",
            r.check_name,
            r.max_residual,
            r.threshold,
            if r.passed { "pass" } else { "FAIL" }
        );
        if let Some(v) = r.metadata.get("variant") {
            s += &format!("    cross product variant: {v}\n");
        }
    }
    s
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    params: ElasticaParams,
    perturbed: bool,
    all_passed: bool,
    reports: &'a [VerificationReport],
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let cfg = args.quad.config()?;
    let pr = params(args.space, args.p, args.a)?;
    let opts = verify::SuiteOptions { samples: args.samples, perturb: args.perturb };
    let reports = verify::run_suite(&pr, opts, &cfg)?;
    let all_passed = reports.iter().all(|r| r.passed);
    let bytes = match args.format {
        Format::Text => report_table(&reports).into_bytes(),
        Format::Json => output::json(&VerifyJson { params: pr, perturbed: args.perturb, all_passed, reports: &reports })?,
        Format::Csv => output::csv_rows(reports.iter().map(|r| (&r.check_name, r.max_residual, r.threshold, r.passed)))
            .map(|b| [b"check_name,max_residual,threshold,passed\n".as_slice(), &b].concat())?,
        f => return Err(unsupported("verify", f)),
    };
    output::emit(args.out.out.as_deref(), &bytes)?;
    if all_passed {
        Ok(())
    } else {
        let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.check_name.as_str()).collect();
        Err(Failure::Check(failed.join(", ")))
    }
}

#[derive(Serialize)]
struct CircleOut {
    circle: curve::CircleData,
    length: f64,
    a_star: f64,
    energy_per_turn: f64,
    el_residual: f64,
}

fn cmd_circle(args: &CircleArgs) -> CmdResult {
    let space: SpaceForm = args.curve.space.into();
    let c = curve::circle(args.curve.p, space)?;
    let el = verify::el_residual_raw(&verify::circle_profile(&c, 64), c.p, space)?;
    let o = CircleOut {
        circle: c,
        length: c.length(),
        a_star: scalar::a_star(c.p, space)?,
        energy_per_turn: c.kappa.powf(c.p) * c.length(),
        el_residual: el.max_residual,
    };
    let bytes = match args.format {
        Format::Json => output::json(&o)?,
        Format::Text => format!(
            "kappa = {}\nradius = {}\nheight = {}\nlength = {}\na_star = {}\nel_residual = {:e}\n",
            c.kappa, c.radius_l3, c.height_z, o.length, o.a_star, o.el_residual
        )
        .into_bytes(),
        f => return Err(unsupported("circle", f)),
    };
    output::emit(args.out.out.as_deref(), &bytes)?;
    if el.passed {
        Ok(())
    } else {
        Err(Failure::Check(format!("circle EL residual {:e}", el.max_residual)))
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Roots(a) => cmd_roots(a),
        Command::Close(a) => cmd_close(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Circle(a) => cmd_circle(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pelastica: {e}");
            ExitCode::from(e.code())
        }
    }
}
