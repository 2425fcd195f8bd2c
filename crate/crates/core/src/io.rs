//! JSON stack configurations, JSON result reports and CSV sweep tables.
//!
//! Every floating-point number is written with 17 significant digits, enough to
//! read back the identical double.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optics::{Plate, PlateKind};
use crate::quadrature::{EnergyResult, IntegrationPath, QuadratureSpec, SweepPoint};
use crate::scattering::Stack;

/// Rejected stack configuration; each violated rule has its own message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("stack has no plates")]
    NoPlates,
    #[error("plate {plate}: give either \"ideal\" or \"lambda_e\"/\"lambda_g\", not both")]
    MixedKinds { plate: usize },
    #[error("plate {plate}: needs either \"ideal\" or both \"lambda_e\" and \"lambda_g\"")]
    MissingKind { plate: usize },
    #[error("plate {plate}: \"{missing}\" is missing (both couplings are required)")]
    MissingCoupling { plate: usize, missing: &'static str },
    #[error("plate {plate}: {field} must be finite, got {value}")]
    NonFinite {
        plate: usize,
        field: &'static str,
        value: f64,
    },
    #[error("plate {plate}: {field} must be non-negative, got {value}")]
    NegativeCoupling {
        plate: usize,
        field: &'static str,
        value: f64,
    },
    #[error("plate {plate}: unknown ideal kind \"{kind}\" (expected \"perfect_e\" or \"perfect_m\")")]
    UnknownIdeal { plate: usize, kind: String },
    #[error("plates {first} and {second} share position {position}")]
    DuplicatePosition {
        first: usize,
        second: usize,
        position: f64,
    },
    #[error("plate {second} at {position} lies below plate {first} at {previous}; positions must increase")]
    NonIncreasing {
        first: usize,
        second: usize,
        previous: f64,
        position: f64,
    },
}

/// Errors from parsing or validating interchange files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid stack configuration: {0}")]
    Validation(#[from] ValidationError),
    #[error("invalid sweep request: {0}")]
    Sweep(String),
    #[error("invalid CSV: {0}")]
    Csv(String),
    #[error("{0}")]
    Unrepresentable(String),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message
        let message = match message.rfind(" at line ") {
            Some(idx) => message[..idx].to_string(),
            None => message,
        };
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

/// One plate as written in a stack file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateConfig {
    pub position: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<String>,
}

/// Stack file: an optional unit annotation and the plates in increasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_label: Option<String>,
    pub plates: Vec<PlateConfig>,
}

impl PlateConfig {
    fn kind(&self, plate: usize) -> Result<PlateKind, ValidationError> {
        let finite = |field: &'static str, value: f64| {
            if value.is_finite() {
                Ok(())
            } else {
                Err(ValidationError::NonFinite { plate, field, value })
            }
        };
        finite("position", self.position)?;
        match (&self.ideal, self.lambda_e, self.lambda_g) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(ValidationError::MixedKinds { plate }),
            (Some(kind), None, None) => match kind.as_str() {
                "perfect_e" => Ok(PlateKind::PerfectE),
                "perfect_m" => Ok(PlateKind::PerfectM),
                other => Err(ValidationError::UnknownIdeal {
                    plate,
                    kind: other.to_string(),
                }),
            },
            (None, None, None) => Err(ValidationError::MissingKind { plate }),
            (None, Some(_), None) => Err(ValidationError::MissingCoupling {
                plate,
                missing: "lambda_g",
            }),
            (None, None, Some(_)) => Err(ValidationError::MissingCoupling {
                plate,
                missing: "lambda_e",
            }),
            (None, Some(lambda_e), Some(lambda_g)) => {
                for (field, value) in [("lambda_e", lambda_e), ("lambda_g", lambda_g)] {
                    finite(field, value)?;
                    if value < 0.0 {
                        return Err(ValidationError::NegativeCoupling { plate, field, value });
                    }
                }
                Ok(PlateKind::Magnetodielectric { lambda_e, lambda_g })
            }
        }
    }
}

impl StackConfig {
    /// Checks every rule; the first violation is reported.
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.plates.is_empty() {
            return Err(ValidationError::NoPlates);
        }
        for (idx, plate) in self.plates.iter().enumerate() {
            plate.kind(idx + 1)?;
        }
        for (idx, pair) in self.plates.windows(2).enumerate() {
            let (previous, position) = (pair[0].position, pair[1].position);
            if position == previous {
                return Err(ValidationError::DuplicatePosition {
                    first: idx + 1,
                    second: idx + 2,
                    position,
                });
            }
            if position < previous {
                return Err(ValidationError::NonIncreasing {
                    first: idx + 1,
                    second: idx + 2,
                    previous,
                    position,
                });
            }
        }
        Ok(())
    }

    pub fn to_stack(&self) -> Result<Stack, IoError> {
        self.validate()?;
        let plates = self
            .plates
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                let kind = p.kind(idx + 1)?;
                Plate::with_kind(p.position, kind).map_err(|e| IoError::Unrepresentable(e.to_string()))
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Stack::new(plates).map_err(|e| IoError::Unrepresentable(e.to_string()))
    }

    /// Configuration describing `stack`; dispersive plates have no file form.
    pub fn from_stack(stack: &Stack, unit_label: Option<String>) -> Result<Self, IoError> {
        let plates = stack
            .plates()
            .iter()
            .map(|p| {
                let (lambda_e, lambda_g, ideal) = match p.kind() {
                    PlateKind::Magnetodielectric { lambda_e, lambda_g } => {
                        (Some(*lambda_e), Some(*lambda_g), None)
                    }
                    PlateKind::PerfectE => (None, None, Some("perfect_e".to_string())),
                    PlateKind::PerfectM => (None, None, Some("perfect_m".to_string())),
                    PlateKind::Dispersive(_) => {
                        return Err(IoError::Unrepresentable(
                            "dispersive plates cannot be written to a stack file".into(),
                        ))
                    }
                };
                Ok(PlateConfig {
                    position: p.position(),
                    lambda_e,
                    lambda_g,
                    ideal,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(Self { unit_label, plates })
    }
}

/// Parses and validates a stack file. Unsorted plates are rejected, not sorted.
pub fn parse_stack(text: &str) -> Result<StackConfig, IoError> {
    let config: StackConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}

/// JSON formatter that writes doubles with 17 significant digits and otherwise
/// indents like `serde_json`'s pretty printer.
struct SignificantDigits<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for SignificantDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{:.16e}", value + 0.0)
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        write!(writer, "{:.16e}", f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-significant-digit numbers and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let formatter = SignificantDigits(serde_json::ser::PrettyFormatter::with_indent(b"  "));
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value
        .serialize(&mut ser)
        .expect("serializing plain data into memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// `+ 0.0` folds `-0` into `0` so exact zeros print without a sign.
fn number(value: f64) -> String {
    format!("{:.16e}", value + 0.0)
}

/// What a report's value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    EnergyPerArea,
    Pressure,
}

/// How a pressure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SpectralIntegral,
    EnergyDerivative,
    StressTensor,
}

/// Sign convention stated with every pressure.
pub const PRESSURE_SIGN_CONVENTION: &str = "+ = pushed toward larger z";

/// A quadrature result together with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultReport {
    pub quantity: Quantity,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_convention: Option<String>,
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub path: IntegrationPath,
    pub input: StackConfig,
    pub quadrature: QuadratureSpec,
}

impl ResultReport {
    pub fn energy(result: &EnergyResult, input: StackConfig, quadrature: QuadratureSpec) -> Self {
        Self {
            quantity: Quantity::EnergyPerArea,
            method: Method::SpectralIntegral,
            plate: None,
            sign_convention: None,
            value: result.value,
            error_estimate: result.error_estimate,
            evaluations: result.evaluations,
            path: result.path,
            input,
            quadrature,
        }
    }

    pub fn pressure(
        result: &EnergyResult,
        plate: usize,
        method: Method,
        input: StackConfig,
        quadrature: QuadratureSpec,
    ) -> Self {
        Self {
            quantity: Quantity::Pressure,
            method,
            plate: Some(plate),
            sign_convention: Some(PRESSURE_SIGN_CONVENTION.to_string()),
            value: result.value,
            error_estimate: result.error_estimate,
            evaluations: result.evaluations,
            path: result.path,
            input,
            quadrature,
        }
    }
}

/// Output format for single results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Renders a report as pretty JSON or as a one-row CSV table.
pub fn emit_result(report: &ResultReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => format!(
            "quantity,plate,value,error_estimate,evaluations,path\n{},{},{},{},{},{}\n",
            match report.quantity {
                Quantity::EnergyPerArea => "energy_per_area",
                Quantity::Pressure => "pressure",
            },
            report.plate.map(|p| p.to_string()).unwrap_or_default(),
            number(report.value),
            number(report.error_estimate),
            report.evaluations,
            report.path.label(),
        ),
    }
}

/// Reads a report written by [`emit_result`] in JSON form.
pub fn parse_result(text: &str) -> Result<ResultReport, IoError> {
    Ok(serde_json::from_str(text)?)
}

/// Spacing of sweep points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    #[default]
    Linear,
    Log,
}

/// Widths for gap `gap_index` (between plates `gap_index` and `gap_index + 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRequest {
    pub gap_index: usize,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub scale: SweepScale,
}

impl SweepRequest {
    pub fn validate(&self) -> Result<(), IoError> {
        if self.gap_index == 0 {
            return Err(IoError::Sweep("gap index starts at 1".into()));
        }
        if !(self.from > 0.0 && self.from.is_finite()) {
            return Err(IoError::Sweep(format!("from must be positive, got {}", self.from)));
        }
        if !(self.to > self.from && self.to.is_finite()) {
            return Err(IoError::Sweep(format!(
                "to must exceed from ({}), got {}",
                self.from, self.to
            )));
        }
        if self.points < 2 {
            return Err(IoError::Sweep(format!("need at least 2 points, got {}", self.points)));
        }
        Ok(())
    }

    /// Sample widths from `from` to `to` inclusive.
    pub fn widths(&self) -> Result<Vec<f64>, IoError> {
        self.validate()?;
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    return self.to;
                }
                let f = k as f64 / last;
                match self.scale {
                    SweepScale::Linear => self.from + f * (self.to - self.from),
                    SweepScale::Log => (self.from.ln() + f * (self.to / self.from).ln()).exp(),
                }
            })
            .collect())
    }
}

/// One CSV row of a sweep. `error_estimate` is the larger of the energy and
/// pressure estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gap: f64,
    pub energy_per_area: f64,
    pub pressure: f64,
    pub error_estimate: f64,
}

impl From<&SweepPoint> for SweepRow {
    fn from(p: &SweepPoint) -> Self {
        Self {
            gap: p.gap,
            energy_per_area: p.energy.value,
            pressure: p.pressure.value,
            error_estimate: p.energy.error_estimate.max(p.pressure.error_estimate),
        }
    }
}

pub const SWEEP_HEADER: [&str; 4] = ["gap", "energy_per_area", "pressure", "error_estimate"];

/// Sweep table with header row and LF line endings.
pub fn emit_sweep_csv(rows: &[SweepRow]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer
        .write_record(SWEEP_HEADER)
        .expect("writing to memory cannot fail");
    for row in rows {
        writer
            .write_record([
                number(row.gap),
                number(row.energy_per_area),
                number(row.pressure),
                number(row.error_estimate),
            ])
            .expect("writing to memory cannot fail");
    }
    let bytes = writer.into_inner().expect("flushing to memory cannot fail");
    String::from_utf8(bytes).expect("CSV of ASCII numbers is UTF-8")
}

/// Reads a table written by [`emit_sweep_csv`].
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, IoError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| IoError::Csv(e.to_string()))?;
    if headers.iter().ne(SWEEP_HEADER) {
        return Err(IoError::Csv(format!("unexpected header {headers:?}")));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(|e| IoError::Csv(e.to_string())))
        .collect()
}
