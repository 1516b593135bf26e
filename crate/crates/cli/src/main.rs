//! `whorl` — phase portraits, equilibrium reports, trajectories, and
//! orientation images for planar polynomial vector fields.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 field parse error,
//! 3 numerical failure.

mod support;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use whorl_core::{
    compute_portrait, default_whorl_seeds, find_equilibria, integrate_adaptive,
    orientation_field, render_svg, whorl_family, write_csv, write_pgm, EquilibriumReport,
    FieldError, IntegratorConfig, ParamBinding, PlanarField, PortraitSpec, SvgStyle,
    Termination, TimeSpan,
};

use support::{
    bold, format_complex, parse_grid, parse_seed_strategy, parse_window, write_atomic,
};

#[derive(Debug)]
enum CliError {
    Usage(String),
    FieldParse(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::FieldParse(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::FieldParse(m) | CliError::Numerical(m) => m,
        }
    }
}

const DEFAULT_PORTRAIT_WINDOW: &str = "-1.6,1.6,-1.2,1.2";
const DEFAULT_EQUILIBRIA_WINDOW: &str = "-2,2,-2,2";

#[derive(Parser)]
#[command(
    name = "whorl",
    version,
    about = "Phase portraits and orientation fields of planar polynomial systems",
    long_about = "Phase portraits and orientation fields of planar polynomial systems.\n\
        \n\
        Fields come from a preset class (--class), the whorl family parameter\n\
        (--theta), or explicit components (--px / --py with optional --param\n\
        NAME=VALUE). Component expressions accept + - * ^ over numbers, x, y,\n\
        and declared parameters; multiplication is explicit (write 2*x, not 2x),\n\
        exponents are nonnegative integers, and unary minus applies to a whole\n\
        factor, so -x^2 reads as -(x^2).\n\
        \n\
        Exit codes: 0 success, 1 usage or I/O error, 2 field parse error,\n\
        3 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate and classify all equilibria in a window
    Equilibria(EquilibriaArgs),
    /// Trace a phase portrait and write it as SVG
    Portrait(PortraitArgs),
    /// Sample a ridge-orientation grid and write it as PGM or CSV
    Orientation(OrientationArgs),
    /// Integrate one trajectory and write it as CSV
    Trajectory(TrajectoryArgs),
    /// Write an SVG portrait for each theta in a range
    Sweep(SweepArgs),
}

/// The four preset portrait classes and their theta values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetClass {
    /// theta = 0: nested closed ridges
    Concentric,
    /// theta = 0.2: outward spiral, upper-right / lower-left connections
    SpiralUrLl,
    /// theta = -0.2: mirrored spiral, lower-right / upper-left connections
    SpiralLrUl,
    /// theta = 0.9: "S"-shaped core
    CompositeS,
}

impl PresetClass {
    fn theta(self) -> f64 {
        match self {
            PresetClass::Concentric => 0.0,
            PresetClass::SpiralUrLl => 0.2,
            PresetClass::SpiralLrUl => -0.2,
            PresetClass::CompositeS => 0.9,
        }
    }
}

#[derive(Args)]
struct FieldArgs {
    /// Preset portrait class
    #[arg(long, value_enum)]
    class: Option<PresetClass>,
    /// Whorl-family parameter theta
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Expression for x' (requires --py)
    #[arg(long, requires = "py", allow_hyphen_values = true)]
    px: Option<String>,
    /// Expression for y' (requires --px)
    #[arg(long, requires = "px", allow_hyphen_values = true)]
    py: Option<String>,
    /// Parameter binding NAME=VALUE for --px/--py (repeatable)
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

impl FieldArgs {
    fn resolve(&self) -> Result<PlanarField, CliError> {
        let sources =
            self.class.is_some() as u8 + self.theta.is_some() as u8 + self.px.is_some() as u8;
        if sources != 1 {
            return Err(CliError::Usage(
                "exactly one field source is required: --class, --theta, or --px/--py"
                    .to_string(),
            ));
        }
        if self.px.is_none() && !self.params.is_empty() {
            return Err(CliError::Usage(
                "--param only applies to --px/--py fields".to_string(),
            ));
        }
        if let Some(class) = self.class {
            return Ok(whorl_family(class.theta()));
        }
        if let Some(theta) = self.theta {
            if !theta.is_finite() {
                return Err(CliError::Usage("--theta must be finite".to_string()));
            }
            return Ok(whorl_family(theta));
        }
        let (px, py) = (self.px.as_ref().unwrap(), self.py.as_ref().unwrap());
        let mut bindings = Vec::new();
        for raw in &self.params {
            let (name, value) = raw.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("--param expects NAME=VALUE (got `{raw}`)"))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                CliError::Usage(format!("--param {name}: bad value `{value}`"))
            })?;
            bindings.push(ParamBinding::new(name.trim(), value));
        }
        PlanarField::from_exprs(px, py, &bindings).map_err(|e| match e {
            FieldError::Expr(e) => CliError::FieldParse(e.to_string()),
            FieldError::ZeroField => {
                CliError::FieldParse("field components are identically zero".to_string())
            }
        })
    }
}

#[derive(Args)]
struct EquilibriaArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Search window x0,x1,y0,y1
    #[arg(long, default_value = DEFAULT_EQUILIBRIA_WINDOW, allow_hyphen_values = true)]
    window: String,
    /// Residual tolerance for accepted roots
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct PortraitArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Plot window x0,x1,y0,y1
    #[arg(long, default_value = DEFAULT_PORTRAIT_WINDOW, allow_hyphen_values = true)]
    window: String,
    /// Seed strategy (repeatable): grid:NXxNY, ring:CX,CY:R1;R2:COUNT,
    /// or explicit:X,Y;X,Y. Default: four rings of 8 plus a 6x4 grid.
    #[arg(long = "seeds")]
    seeds: Vec<String>,
    /// Forward integration horizon per seed
    #[arg(long = "t-max", default_value_t = 40.0)]
    t_max: f64,
    /// Backward integration horizon per seed
    #[arg(long = "t-back", default_value_t = 40.0)]
    t_back: f64,
    /// Also trace separatrices from every cusp
    #[arg(long)]
    separatrices: bool,
    /// Relative integration tolerance
    #[arg(long = "rel-tol", default_value_t = 1e-9)]
    rel_tol: f64,
    /// Absolute integration tolerance
    #[arg(long = "abs-tol", default_value_t = 1e-12)]
    abs_tol: f64,
    /// Canvas size in pixels, WxH
    #[arg(long, default_value = "800x600")]
    canvas: String,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OrientationArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Sample window x0,x1,y0,y1
    #[arg(long, default_value = DEFAULT_PORTRAIT_WINDOW, allow_hyphen_values = true)]
    window: String,
    /// Grid resolution WxH
    #[arg(long, default_value = "64x48")]
    grid: String,
    /// Output path; .pgm writes binary PGM, .csv a grid of angles
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, allow_hyphen_values = true)]
    x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    y0: f64,
    /// Integration horizon
    #[arg(long = "t-max", default_value_t = 30.0)]
    t_max: f64,
    /// Integrate backward in time
    #[arg(long)]
    backward: bool,
    /// Relative integration tolerance
    #[arg(long = "rel-tol", default_value_t = 1e-9)]
    rel_tol: f64,
    /// Absolute integration tolerance
    #[arg(long = "abs-tol", default_value_t = 1e-12)]
    abs_tol: f64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// First theta value
    #[arg(long = "theta-from", allow_hyphen_values = true)]
    theta_from: f64,
    /// Last theta value
    #[arg(long = "theta-to", allow_hyphen_values = true)]
    theta_to: f64,
    /// Number of portraits to write
    #[arg(long)]
    steps: usize,
    /// Plot window x0,x1,y0,y1
    #[arg(long, default_value = DEFAULT_PORTRAIT_WINDOW, allow_hyphen_values = true)]
    window: String,
    /// Also trace separatrices from every cusp
    #[arg(long)]
    separatrices: bool,
    /// Forward integration horizon per seed
    #[arg(long = "t-max", default_value_t = 40.0)]
    t_max: f64,
    /// Backward integration horizon per seed
    #[arg(long = "t-back", default_value_t = 40.0)]
    t_back: f64,
    /// Output directory for sweep_NNNN.svg files
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Equilibria(args) => run_equilibria(args),
        Command::Portrait(args) => run_portrait(args),
        Command::Orientation(args) => run_orientation(args),
        Command::Trajectory(args) => run_trajectory(args),
        Command::Sweep(args) => run_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("whorl: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run_equilibria(args: EquilibriaArgs) -> Result<(), CliError> {
    let field = args.field.resolve()?;
    let window = parse_window(&args.window)?;
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(CliError::Usage("--tol must be positive".to_string()));
    }
    let search = find_equilibria(&field, &window, args.tol);
    for stall in &search.stalls {
        eprintln!(
            "whorl: Newton stalled from candidate ({:.6}, {:.6})",
            stall[0], stall[1]
        );
    }
    let reports: Vec<EquilibriumReport> = search
        .points
        .iter()
        .map(|p| whorl_core::classify(&field, *p))
        .collect();
    print_equilibria_table(&reports);
    Ok(())
}

fn print_equilibria_table(reports: &[EquilibriumReport]) {
    println!(
        "{}",
        bold(&format!(
            "{:>14} {:>14}  {:<24} {:<44} {}",
            "x", "y", "kind", "eigenvalues", "normal form"
        ))
    );
    if reports.is_empty() {
        println!("(no equilibria found)");
        return;
    }
    for r in reports {
        let eig = format!(
            "{}, {}",
            format_complex(r.eigenvalues[0].re, r.eigenvalues[0].im),
            format_complex(r.eigenvalues[1].re, r.eigenvalues[1].im)
        );
        let nf = match &r.normal_form {
            Some(nf) => nf.to_string(),
            None => "-".to_string(),
        };
        println!(
            "{:>14.9} {:>14.9}  {:<24} {:<44} {}",
            r.location[0],
            r.location[1],
            r.kind.to_string(),
            eig,
            nf
        );
        if let Some(diag) = &r.diagnostic {
            println!("{:>14} note: {diag}", "");
        }
    }
}

fn integrator_config(rel_tol: f64, abs_tol: f64) -> Result<IntegratorConfig, CliError> {
    if !(rel_tol > 0.0 && abs_tol > 0.0 && rel_tol.is_finite() && abs_tol.is_finite()) {
        return Err(CliError::Usage(
            "integration tolerances must be positive".to_string(),
        ));
    }
    Ok(IntegratorConfig {
        rel_tol,
        abs_tol,
        ..IntegratorConfig::default()
    })
}

fn build_portrait_spec(
    field: PlanarField,
    window: &str,
    seeds: &[String],
    t_max: f64,
    t_back: f64,
    separatrices: bool,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<PortraitSpec, CliError> {
    let window = parse_window(window)?;
    if !(t_max >= 0.0 && t_back >= 0.0) {
        return Err(CliError::Usage(
            "integration horizons must be nonnegative".to_string(),
        ));
    }
    let seeds = if seeds.is_empty() {
        default_whorl_seeds()
    } else {
        seeds
            .iter()
            .map(|s| parse_seed_strategy(s))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(PortraitSpec {
        field,
        window,
        seeds,
        t_span: TimeSpan::new(t_max, t_back),
        integrator: integrator_config(rel_tol, abs_tol)?,
        include_separatrices: separatrices,
    })
}

fn svg_style(canvas: &str) -> Result<SvgStyle, CliError> {
    let (w, h) = parse_grid(canvas)
        .map_err(|_| CliError::Usage(format!("--canvas expects WxH (got `{canvas}`)")))?;
    Ok(SvgStyle {
        canvas_width: w as u32,
        canvas_height: h as u32,
        ..SvgStyle::default()
    })
}

fn run_portrait(args: PortraitArgs) -> Result<(), CliError> {
    let field = args.field.resolve()?;
    let spec = build_portrait_spec(
        field,
        &args.window,
        &args.seeds,
        args.t_max,
        args.t_back,
        args.separatrices,
        args.rel_tol,
        args.abs_tol,
    )?;
    let style = svg_style(&args.canvas)?;
    let portrait = compute_portrait(&spec);
    let svg = render_svg(&portrait, &style);
    write_atomic(&args.out, svg.as_bytes())
}

fn run_orientation(args: OrientationArgs) -> Result<(), CliError> {
    let field = args.field.resolve()?;
    let window = parse_window(&args.window)?;
    let (w, h) = parse_grid(&args.grid)?;
    let of = orientation_field(&field, &window, w, h);
    let ext = args
        .out
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("pgm") => write_atomic(&args.out, &write_pgm(&of)),
        Some("csv") => {
            let mut text = String::new();
            for iy in 0..of.height() {
                for ix in 0..of.width() {
                    if ix > 0 {
                        text.push(',');
                    }
                    match of.angle(ix, iy) {
                        Some(a) => text.push_str(&format!("{a}")),
                        None => text.push_str("nan"),
                    }
                }
                text.push('\n');
            }
            write_atomic(&args.out, text.as_bytes())
        }
        _ => Err(CliError::Usage(
            "orientation output must end in .pgm or .csv".to_string(),
        )),
    }
}

fn run_trajectory(args: TrajectoryArgs) -> Result<(), CliError> {
    let field = args.field.resolve()?;
    if !(args.t_max > 0.0 && args.t_max.is_finite()) {
        return Err(CliError::Usage("--t-max must be positive".to_string()));
    }
    if !(args.x0.is_finite() && args.y0.is_finite()) {
        return Err(CliError::Usage("start point must be finite".to_string()));
    }
    let config = integrator_config(args.rel_tol, args.abs_tol)?;
    let horizon = if args.backward { -args.t_max } else { args.t_max };
    let traj = integrate_adaptive(&field, [args.x0, args.y0], &config, horizon);
    if traj.termination == Termination::StepUnderflow {
        return Err(CliError::Numerical(format!(
            "integration lost step control after {} samples",
            traj.len()
        )));
    }
    write_atomic(&args.out, write_csv(&traj).as_bytes())
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".to_string()));
    }
    if !(args.theta_from.is_finite() && args.theta_to.is_finite()) {
        return Err(CliError::Usage("sweep range must be finite".to_string()));
    }
    std::fs::create_dir_all(&args.out_dir).map_err(|e| {
        CliError::Usage(format!(
            "cannot create {}: {e}",
            args.out_dir.display()
        ))
    })?;
    let style = SvgStyle::default();
    for i in 0..args.steps {
        let theta = if args.steps == 1 {
            args.theta_from
        } else {
            args.theta_from
                + i as f64 * (args.theta_to - args.theta_from) / (args.steps - 1) as f64
        };
        let spec = build_portrait_spec(
            whorl_family(theta),
            &args.window,
            &[],
            args.t_max,
            args.t_back,
            args.separatrices,
            1e-9,
            1e-12,
        )?;
        let portrait = compute_portrait(&spec);
        let svg = render_svg(&portrait, &style);
        let path: &Path = &args.out_dir.join(format!("sweep_{i:04}.svg"));
        write_atomic(path, svg.as_bytes())?;
    }
    Ok(())
}
