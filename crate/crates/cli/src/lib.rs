//! Command-line front end: argument parsing, command dispatch and exit codes.
//!
//! [`run`] never touches the process; it returns the exit code and the text for
//! stdout and stderr so the binary stays a thin wrapper and tests can call it
//! directly.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 quadrature did not
//! converge, 3 a `check` property failed.

mod check;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use casimir_core::greens::{region_matrix, GreensQuery};
use casimir_core::io::{
    emit_result, emit_sweep_csv, parse_stack, to_json, Format, IoError, Method, ResultReport,
    StackConfig, SweepRequest, SweepRow, SweepScale, PRESSURE_SIGN_CONVENTION,
};
use casimir_core::quadrature::{
    default_spec_for, energy_per_area, pressure_on_plate, pressure_three_plates_stress,
    pressure_two_plates_stress, sweep_gap, QuadratureSpec,
};
use casimir_core::scattering::{chain_diagrams, composite, delta_chain, CompositeCoefficients};
use casimir_core::{Coefficients, Error, Mode, SpectralPoint, Stack};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: String) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "casimir",
    version,
    about = "Casimir energies, pressures and Green's functions for stacks of δ-function plates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy per unit area of the stack.
    Energy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Pressure on one plate (+ = pushed toward larger z).
    Pressure {
        #[command(flatten)]
        common: Common,
        /// Plate index, starting at 1.
        #[arg(long)]
        plate: usize,
        /// Use the closed stress-tensor formula (2 or 3 ideal or vacuum plates, last plate).
        #[arg(long)]
        stress: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Energy and gap pressure while one gap is varied; CSV on stdout.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Gap index I (between plates I and I+1); plates above it move rigidly.
        #[arg(long)]
        gap: usize,
        /// First gap width.
        #[arg(long)]
        from: f64,
        /// Last gap width (included exactly).
        #[arg(long)]
        to: f64,
        /// Number of widths, endpoints included.
        #[arg(long)]
        points: usize,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
    },
    /// Per-plate and composite reflection/transmission at one spectral point.
    Coeffs {
        /// Stack file (JSON).
        #[arg(long)]
        stack: PathBuf,
        #[command(flatten)]
        point: Point,
    },
    /// Chain expansion of the multiple-scattering parameter for n plates.
    Diagram {
        /// Number of plates (at least 2).
        #[arg(long)]
        n: usize,
        /// Also print every Δ factor as a loop formula.
        #[arg(long)]
        expand: bool,
    },
    /// Green's function g(z, z') and the region containing (z, z').
    Greens {
        /// Stack file (JSON, at most 3 plates).
        #[arg(long)]
        stack: PathBuf,
        /// Polarization.
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[command(flatten)]
        point: Point,
        /// Observation point (not on a plate).
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
        /// Source point (not on a plate).
        #[arg(long, allow_hyphen_values = true)]
        zprime: f64,
    },
    /// Invariant checks on a stack; exit 3 if any fails.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Stack file (JSON).
    #[arg(long)]
    stack: PathBuf,
    /// Relative quadrature tolerance (default 1e-9 for ideal/vacuum plates, 1e-7 otherwise).
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Run quadrature on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct Point {
    /// Imaginary frequency ζ ≥ 0.
    #[arg(long)]
    zeta: f64,
    /// Transverse wavenumber k⊥ ≥ 0 (κ² = ζ² + k⊥² must be positive).
    #[arg(long)]
    kperp: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "H")]
    H,
    #[value(name = "E")]
    E,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::H => Mode::H,
            ModeArg::E => Mode::E,
        }
    }
}

/// Failure of a command, already classified by exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::QuadratureNotConverged { .. } => EXIT_NOT_CONVERGED,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CommandResult = std::result::Result<String, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(stdout) => Outcome::ok(stdout),
        Err(Failure { code: EXIT_CHECK_FAILED, message }) => Outcome {
            code: EXIT_CHECK_FAILED,
            stdout: message,
            stderr: "error: at least one check failed\n".into(),
        },
        Err(f) => Outcome::fail(f.code, f.message),
    }
}

fn dispatch(command: Command) -> CommandResult {
    match command {
        Command::Energy { common, format } => energy(&common, format),
        Command::Pressure {
            common,
            plate,
            stress,
            format,
        } => pressure(&common, plate, stress, format),
        Command::Sweep {
            common,
            gap,
            from,
            to,
            points,
            log,
        } => {
            let request = SweepRequest {
                gap_index: gap,
                from,
                to,
                points,
                scale: if log { SweepScale::Log } else { SweepScale::Linear },
            };
            sweep(&common, &request)
        }
        Command::Coeffs { stack, point } => coeffs(&stack, &point),
        Command::Diagram { n, expand } => diagram(n, expand),
        Command::Greens {
            stack,
            mode,
            point,
            z,
            zprime,
        } => greens(&stack, mode.into(), &point, z, zprime),
        Command::Check { common } => {
            let (_, stack) = load(&common.stack)?;
            let spec = quadrature_spec(&common, &stack)?;
            let report = check::run_checks(&stack, &spec);
            if report.all_passed() {
                Ok(report.render())
            } else {
                Err(Failure {
                    code: EXIT_CHECK_FAILED,
                    message: report.render(),
                })
            }
        }
    }
}

fn load(path: &Path) -> std::result::Result<(StackConfig, Stack), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let config = parse_stack(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let stack = config.to_stack()?;
    Ok((config, stack))
}

fn quadrature_spec(common: &Common, stack: &Stack) -> std::result::Result<QuadratureSpec, Failure> {
    let mut spec = default_spec_for(stack);
    if let Some(tol) = common.rel_tol {
        spec = spec.with_rel_tol(tol);
    }
    if common.sequential {
        spec = spec.sequential();
    }
    spec.validate()?;
    Ok(spec)
}

fn energy(common: &Common, format: OutputFormat) -> CommandResult {
    let (config, stack) = load(&common.stack)?;
    let spec = quadrature_spec(common, &stack)?;
    let result = energy_per_area(&stack, &spec)?;
    Ok(emit_result(&ResultReport::energy(&result, config, spec), format.into()))
}

fn pressure(common: &Common, plate: usize, stress: bool, format: OutputFormat) -> CommandResult {
    let (config, stack) = load(&common.stack)?;
    stack.check_index(plate)?;
    let spec = quadrature_spec(common, &stack)?;
    let (result, method) = if stress {
        let n = stack.len();
        if plate != n {
            return Err(input_error(format!(
                "the stress-tensor formula gives the pressure on the last plate ({n}), not plate {plate}"
            )));
        }
        let result = match n {
            2 => pressure_two_plates_stress(&stack, &spec)?,
            3 => pressure_three_plates_stress(&stack, &spec)?,
            _ => {
                return Err(input_error(format!(
                    "the stress-tensor formula needs 2 or 3 plates, got {n}"
                )))
            }
        };
        (result, Method::StressTensor)
    } else {
        (pressure_on_plate(&stack, plate, &spec)?, Method::EnergyDerivative)
    };
    let report = ResultReport::pressure(&result, plate, method, config, spec);
    let body = emit_result(&report, format.into());
    Ok(match format {
        OutputFormat::Json => body,
        OutputFormat::Csv => format!("# {PRESSURE_SIGN_CONVENTION}\n{body}"),
    })
}

fn sweep(common: &Common, request: &SweepRequest) -> CommandResult {
    let (_, stack) = load(&common.stack)?;
    let widths = request.widths()?;
    stack.gap(request.gap_index)?;
    let spec = quadrature_spec(common, &stack)?;
    let points = sweep_gap(&stack, request.gap_index, &widths, &spec)?;
    let rows: Vec<SweepRow> = points.iter().map(SweepRow::from).collect();
    Ok(emit_sweep_csv(&rows))
}

fn spectral_point(point: &Point) -> std::result::Result<SpectralPoint, Failure> {
    Ok(SpectralPoint::new(point.zeta, point.kperp)?)
}

#[derive(Serialize)]
struct ModeCoefficients {
    mode: &'static str,
    plates: Vec<Coefficients>,
    composite: CompositeCoefficients,
    /// Δ from the chain expansion.
    delta_chain: f64,
}

#[derive(Serialize)]
struct CoefficientReport {
    zeta: f64,
    kperp: f64,
    kappa: f64,
    modes: Vec<ModeCoefficients>,
    input: StackConfig,
}

fn coeffs(path: &Path, point: &Point) -> CommandResult {
    let (config, stack) = load(path)?;
    let sp = spectral_point(point)?;
    let modes = Mode::BOTH
        .into_iter()
        .map(|mode| -> std::result::Result<ModeCoefficients, Failure> {
            Ok(ModeCoefficients {
                mode: mode.label(),
                plates: stack.coefficients(mode, &sp)?,
                composite: composite(&stack, mode, &sp)?,
                delta_chain: if stack.len() >= 2 {
                    delta_chain(&stack, mode, &sp)?
                } else {
                    1.0
                },
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(to_json(&CoefficientReport {
        zeta: sp.zeta(),
        kperp: sp.kperp(),
        kappa: sp.kappa(),
        modes,
        input: config,
    }))
}

fn diagram(n: usize, expand: bool) -> CommandResult {
    let chains = chain_diagrams(n)?;
    let mut out = String::new();
    for chain in &chains {
        let labels: Vec<String> = chain.iter().map(|f| f.label()).collect();
        out.push_str(&labels.join("·"));
        out.push('\n');
        if expand {
            for factor in chain {
                out.push_str("    ");
                out.push_str(&factor.expansion());
                out.push('\n');
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct GreensReport {
    mode: &'static str,
    zeta: f64,
    kperp: f64,
    z: f64,
    zprime: f64,
    region: [usize; 2],
    value: f64,
    input: StackConfig,
}

fn greens(path: &Path, mode: Mode, point: &Point, z: f64, zprime: f64) -> CommandResult {
    let (config, stack) = load(path)?;
    let sp = spectral_point(point)?;
    let query = GreensQuery { z, zprime, mode, sp };
    let matrix = region_matrix(&stack, query.mode, &query.sp)?;
    let (i, j) = matrix.region(z, zprime)?;
    let value = matrix.green(z, zprime)?;
    Ok(to_json(&GreensReport {
        mode: mode.label(),
        zeta: sp.zeta(),
        kperp: sp.kperp(),
        z,
        zprime,
        region: [i, j],
        value,
        input: config,
    }))
}
