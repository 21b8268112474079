use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dicke::eigensolve::{converge_cutoff, ground_state, CutoffPolicy, GroundState};
use dicke::export::{ground_state_to_json, load_ground_state};
use dicke::husimi::{grid_from_fn, husimi_grid, Axis, HusimiField, Slice};
use dicke::model::{ModelParams, Sector};
use dicke::quadrature::{
    QuadratureSpec, DEFAULT_ALPHA_POINTS, DEFAULT_PHI_POINTS, DEFAULT_REL_TOL, DEFAULT_THETA_POINTS,
};
use dicke::sweep::{csv_header, csv_line, wehrl_sweep, LambdaRange, SweepMethod, SweepSettings};
use dicke::variational::{
    equilibrium_minimize, equilibrium_paper, husimi_variational, CatState, Equilibrium, EquilibriumSource,
};
use dicke::zeros::{conformal_grid, fringe_lines, write_curves_csv, Curve, ZGrid, ZeroSurface};
use dicke::{Error, Result};

/// Environment variable overriding the largest photon cutoff tried.
const MAX_CUTOFF_ENV: &str = "DICKE_MAX_CUTOFF";

#[derive(Parser)]
#[command(
    name = "dicke",
    version,
    about = "Phase-space analysis of the Dicke model ground state"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Diagonalize and write the ground state as JSON.
    Ground(GroundArgs),
    /// Husimi distribution on a two-dimensional slice.
    Husimi(HusimiArgs),
    /// Wehrl entropy scan over the coupling.
    Wehrl(WehrlArgs),
    /// Images of a z grid on one zero surface of the cat Husimi distribution.
    Zeros(ZerosArgs),
    /// Dark-fringe lines of the cat Husimi distribution.
    Fringes(FringeArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long)]
    j: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    omega0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.omega, self.omega0, self.lambda, self.j)
    }
}

#[derive(Args, Clone)]
struct CutoffArgs {
    /// Fixed photon cutoff; converged by doubling when omitted.
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    e_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    w_tol: f64,
}

impl CutoffArgs {
    fn policy(&self) -> Result<CutoffPolicy> {
        let mut policy = CutoffPolicy {
            e_tol: self.e_tol,
            w_tol: self.w_tol,
            ..CutoffPolicy::default()
        };
        if let Ok(v) = std::env::var(MAX_CUTOFF_ENV) {
            policy.ceiling = v
                .trim()
                .parse()
                .map_err(|_| Error::Validation(format!("{MAX_CUTOFF_ENV} must be a positive integer, got {v:?}")))?;
        }
        Ok(policy)
    }

    fn solve(&self, p: &ModelParams) -> Result<GroundState> {
        let policy = self.policy()?;
        match self.cutoff {
            Some(n_c) if n_c > policy.ceiling => Err(Error::Validation(format!(
                "cutoff {n_c} exceeds the ceiling {}",
                policy.ceiling
            ))),
            Some(n_c) => ground_state(p, n_c, Sector::Even),
            None => converge_cutoff(p, &policy),
        }
    }
}

#[derive(Args, Clone)]
struct QuadArgs {
    #[arg(long, default_value_t = DEFAULT_ALPHA_POINTS)]
    alpha_points: usize,
    #[arg(long, default_value_t = DEFAULT_THETA_POINTS)]
    theta_points: usize,
    #[arg(long, default_value_t = DEFAULT_PHI_POINTS)]
    phi_points: usize,
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    rel_tol: f64,
    #[arg(long, default_value_t = 3)]
    max_doublings: usize,
}

impl QuadArgs {
    fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            max_doublings: self.max_doublings,
            ..QuadratureSpec::default()
                .with_points(self.alpha_points, self.theta_points, self.phi_points)
                .with_rel_tol(self.rel_tol)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceArg {
    Minimizer,
    Paper,
}

impl SourceArg {
    fn equilibrium(self, p: &ModelParams) -> Result<Equilibrium> {
        match self {
            SourceArg::Minimizer => equilibrium_minimize(p),
            SourceArg::Paper => Ok(equilibrium_paper(p)),
        }
    }

    fn source(self) -> EquilibriumSource {
        match self {
            SourceArg::Minimizer => EquilibriumSource::Minimizer,
            SourceArg::Paper => EquilibriumSource::PaperFormula,
        }
    }
}

#[derive(Args)]
struct GroundArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    cutoff: CutoffArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HusimiMethod {
    Exact,
    Variational,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SliceArg {
    Position,
    Momentum,
}

#[derive(Args)]
struct HusimiArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    cutoff: CutoffArgs,
    #[arg(long, value_enum, default_value_t = HusimiMethod::Exact)]
    method: HusimiMethod,
    #[arg(long, value_enum, default_value_t = SliceArg::Position)]
    slice: SliceArg,
    /// Ground-state JSON to use instead of diagonalizing.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SourceArg::Minimizer)]
    equilibrium: SourceArg,
    /// Half-width of the α axis (default: packet centre + 3, at least 4).
    #[arg(long)]
    alpha_range: Option<f64>,
    /// Half-width of the z axis.
    #[arg(long, default_value_t = 2.0)]
    z_range: f64,
    #[arg(long, default_value_t = 101)]
    points: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WehrlMethod {
    Both,
    Exact,
    Variational,
}

#[derive(Args)]
struct WehrlArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    cutoff: CutoffArgs,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long)]
    lambda_from: f64,
    #[arg(long)]
    lambda_to: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = WehrlMethod::Both)]
    method: WehrlMethod,
    #[arg(long, value_enum, default_value_t = SourceArg::Minimizer)]
    equilibrium: SourceArg,
}

#[derive(Args)]
struct ZerosArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Branch label of the zero surface.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    l: i64,
    #[arg(long, value_enum, default_value_t = SourceArg::Minimizer)]
    equilibrium: SourceArg,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    re_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    re_max: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    im_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    im_max: f64,
    #[arg(long, default_value_t = 21)]
    lines: usize,
    #[arg(long, default_value_t = 201)]
    samples: usize,
}

#[derive(Args)]
struct FringeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
    l_from: i64,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    l_to: i64,
    #[arg(long, value_enum, default_value_t = SourceArg::Minimizer)]
    equilibrium: SourceArg,
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_ground(cli: &Cli, args: &GroundArgs) -> Result<()> {
    let p = args.model.params()?;
    let g = args.cutoff.solve(&p)?;
    let obs = g.observables();
    let summary = format!(
        "energy = {}\nn_c = {}\n<a+a> = {}\n<J_z> = {}\n<Pi> = {:+.12}",
        g.energy(),
        g.cutoff(),
        obs.mean_photons,
        obs.mean_jz,
        obs.parity
    );
    let json = ground_state_to_json(&g)?;
    match &cli.out {
        Some(path) => {
            std::fs::write(path, json + "\n")?;
            println!("{summary}");
        }
        None => {
            println!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FieldJson<'a> {
    axis1: &'a [f64],
    axis2: &'a [f64],
    psi: Vec<&'a [f64]>,
}

fn cmd_husimi(cli: &Cli, args: &HusimiArgs) -> Result<()> {
    let p = match &args.state {
        Some(path) => *load_ground_state(path)?.params(),
        None => args.model.params()?,
    };
    let eq = args.equilibrium.equilibrium(&p)?;
    let half = args.alpha_range.unwrap_or((eq.alpha_e.abs() + 3.0).max(4.0));
    if !(half > 0.0 && args.z_range > 0.0) || args.points < 2 {
        return Err(Error::Validation(
            "axis ranges must be positive with >= 2 points".into(),
        ));
    }
    let slice = match args.slice {
        SliceArg::Position => Slice::Position,
        SliceArg::Momentum => Slice::Momentum,
    };
    let ax = Axis::new(-half, half, args.points);
    let az = Axis::new(-args.z_range, args.z_range, args.points);
    let field: HusimiField = match args.method {
        HusimiMethod::Exact => {
            let g = match &args.state {
                Some(path) => load_ground_state(path)?,
                None => args.cutoff.solve(&p)?,
            };
            husimi_grid(&g, slice, ax, az)?
        }
        HusimiMethod::Variational => {
            let cat = CatState::even(&eq)?;
            grid_from_fn(|pt| husimi_variational(&cat, pt), slice, ax, az)?
        }
    };
    let mut out = open_output(&cli.out)?;
    match cli.format {
        Format::Csv => field.write_csv(&mut out)?,
        Format::Json => write_json(
            &FieldJson {
                axis1: &field.axis1,
                axis2: &field.axis2,
                psi: field.values.chunks(field.axis2.len()).collect(),
            },
            &mut out,
        )?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_wehrl(cli: &Cli, args: &WehrlArgs) -> Result<()> {
    let base = args.model.params()?;
    let range = LambdaRange::new(args.lambda_from, args.lambda_to, args.steps)?;
    let method = match args.method {
        WehrlMethod::Both => SweepMethod::Both,
        WehrlMethod::Exact => SweepMethod::Exact,
        WehrlMethod::Variational => SweepMethod::Variational,
    };
    let settings = SweepSettings {
        cutoff: args.cutoff.policy()?,
        quadrature: args.quad.spec(),
        source: args.equilibrium.source(),
    };
    settings.quadrature.validate()?;
    let mut out = open_output(&cli.out)?;
    match cli.format {
        Format::Csv => {
            writeln!(out, "{}", csv_header(method))?;
            wehrl_sweep(&base, &range, method, &settings, |r| {
                writeln!(out, "{}", csv_line(r, method))?;
                out.flush()?;
                Ok(())
            })?;
        }
        Format::Json => {
            let mut rows = Vec::new();
            wehrl_sweep(&base, &range, method, &settings, |r| {
                rows.push(*r);
                Ok(())
            })?;
            write_json(&rows, &mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CurveJson {
    family: &'static str,
    line_id: usize,
    re_alpha: Vec<f64>,
    im_alpha: Vec<f64>,
    re_z: Vec<f64>,
    im_z: Vec<f64>,
}

impl From<&Curve> for CurveJson {
    fn from(c: &Curve) -> Self {
        Self {
            family: c.family.as_str(),
            line_id: c.line_id,
            re_alpha: c.points.iter().map(|p| p.alpha.re).collect(),
            im_alpha: c.points.iter().map(|p| p.alpha.im).collect(),
            re_z: c.points.iter().map(|p| p.z.re).collect(),
            im_z: c.points.iter().map(|p| p.z.im).collect(),
        }
    }
}

fn cmd_zeros(cli: &Cli, args: &ZerosArgs) -> Result<()> {
    let p = args.model.params()?;
    let eq = args.equilibrium.equilibrium(&p)?;
    let surface = ZeroSurface::new(eq, args.l)?;
    let grid = ZGrid {
        re_min: args.re_min,
        re_max: args.re_max,
        im_min: args.im_min,
        im_max: args.im_max,
        lines: args.lines,
        samples: args.samples,
    };
    let curves = conformal_grid(&surface, &grid)?;
    let mut out = open_output(&cli.out)?;
    match cli.format {
        Format::Csv => write_curves_csv(&curves, &mut out)?,
        Format::Json => write_json(&curves.iter().map(CurveJson::from).collect::<Vec<_>>(), &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_fringes(cli: &Cli, args: &FringeArgs) -> Result<()> {
    let p = args.model.params()?;
    if args.l_to < args.l_from {
        return Err(Error::Validation("l_to must be >= l_from".into()));
    }
    let eq = args.equilibrium.equilibrium(&p)?;
    let lines = (args.l_from..=args.l_to)
        .map(|l| fringe_lines(&eq, p.spin, l))
        .collect::<Result<Vec<_>>>()?;
    let mut out = open_output(&cli.out)?;
    match cli.format {
        Format::Json => write_json(&lines, &mut out)?,
        Format::Csv => {
            writeln!(out, "l,slope,intercept_position,intercept_momentum")?;
            for f in &lines {
                writeln!(
                    out,
                    "{},{},{},{}",
                    f.l,
                    dicke::export::fmt_f64(f.slope),
                    dicke::export::fmt_f64(f.intercept_position),
                    dicke::export::fmt_f64(f.intercept_momentum)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Validation("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Validation(e.to_string()))?;
    }
    match &cli.command {
        Command::Ground(a) => cmd_ground(cli, a),
        Command::Husimi(a) => cmd_husimi(cli, a),
        Command::Wehrl(a) => cmd_wehrl(cli, a),
        Command::Zeros(a) => cmd_zeros(cli, a),
        Command::Fringes(a) => cmd_fringes(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
