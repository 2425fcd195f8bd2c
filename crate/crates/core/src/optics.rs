//! Single-plate optics: reflection and transmission of a δ-function plate
//! for the two scalar polarizations, evaluated on the imaginary frequency axis.
//!
//! A magnetodielectric plate with transverse couplings `λe`, `λg` at
//! Euclidean frequency `ζ` and decay constant `κ = sqrt(k⊥² + ζ²)` has
//!
//! ```text
//! r_H = -λg ζ² / (λg ζ² + 2κ) + λe κ / (λe κ + 2)
//! t_H = 1 - λg ζ² / (λg ζ² + 2κ) - λe κ / (λe κ + 2)
//! ```
//!
//! and the TE (`E`) coefficients follow by exchanging `λe` and `λg`.
//! Natural units (ħ = c = 1) are used throughout.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polarization of the scalar Green's function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    /// Transverse magnetic.
    H,
    /// Transverse electric.
    E,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::H, Mode::E];

    pub fn label(self) -> &'static str {
        match self {
            Mode::H => "H",
            Mode::E => "E",
        }
    }

    /// The opposite polarization.
    pub fn other(self) -> Mode {
        match self {
            Mode::H => Mode::E,
            Mode::E => Mode::H,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A point on the Euclidean spectral domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    zeta: f64,
    kperp: f64,
    kappa: f64,
}

impl SpectralPoint {
    pub fn new(zeta: f64, kperp: f64) -> Result<Self> {
        if !(zeta.is_finite() && kperp.is_finite()) || zeta < 0.0 || kperp < 0.0 {
            return Err(Error::InvalidSpectralPoint(format!(
                "zeta = {zeta}, kperp = {kperp}; both must be finite and non-negative"
            )));
        }
        Ok(Self {
            zeta,
            kperp,
            kappa: zeta.hypot(kperp),
        })
    }

    /// Builds a point from `ζ` and `κ` directly; the quadrature layer works in
    /// these variables.
    pub fn from_zeta_kappa(zeta: f64, kappa: f64) -> Result<Self> {
        if !(zeta.is_finite() && kappa.is_finite()) || zeta < 0.0 || kappa < zeta {
            return Err(Error::InvalidSpectralPoint(format!(
                "zeta = {zeta}, kappa = {kappa}; need 0 <= zeta <= kappa"
            )));
        }
        let kperp = ((kappa - zeta) * (kappa + zeta)).sqrt();
        Ok(Self { zeta, kperp, kappa })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn kperp(&self) -> f64 {
        self.kperp
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Round-trip propagation factor `e^{-κ l}` over a distance `l`.
    pub fn propagator(&self, length: f64) -> f64 {
        (-self.kappa * length).exp()
    }
}

/// Frequency-dependent couplings evaluated at imaginary frequency `iζ`.
///
/// Returns `(λe, λg)`. Implementations must return finite, non-negative values.
pub trait PlateResponse: Send + Sync + fmt::Debug {
    fn couplings(&self, zeta: f64) -> (f64, f64);
}

/// Material description of a plate.
#[derive(Debug, Clone)]
pub enum PlateKind {
    Magnetodielectric { lambda_e: f64, lambda_g: f64 },
    /// λe → ∞, λg = 0.
    PerfectE,
    /// λg → ∞, λe = 0.
    PerfectM,
    Dispersive(Arc<dyn PlateResponse>),
}

impl PartialEq for PlateKind {
    fn eq(&self, other: &Self) -> bool {
        use PlateKind::*;
        match (self, other) {
            (
                Magnetodielectric { lambda_e, lambda_g },
                Magnetodielectric {
                    lambda_e: e2,
                    lambda_g: g2,
                },
            ) => lambda_e == e2 && lambda_g == g2,
            (PerfectE, PerfectE) | (PerfectM, PerfectM) => true,
            (Dispersive(a), Dispersive(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// One δ-function plate at `z = position`.
#[derive(Debug, Clone, PartialEq)]
pub struct Plate {
    position: f64,
    kind: PlateKind,
}

fn check_coupling(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidPlate(format!(
            "{name} must be finite and non-negative, got {value}"
        )));
    }
    Ok(())
}

impl Plate {
    pub fn magnetodielectric(position: f64, lambda_e: f64, lambda_g: f64) -> Result<Self> {
        check_coupling("lambda_e", lambda_e)?;
        check_coupling("lambda_g", lambda_g)?;
        Self::with_kind(position, PlateKind::Magnetodielectric { lambda_e, lambda_g })
    }

    pub fn perfect_e(position: f64) -> Result<Self> {
        Self::with_kind(position, PlateKind::PerfectE)
    }

    pub fn perfect_m(position: f64) -> Result<Self> {
        Self::with_kind(position, PlateKind::PerfectM)
    }

    /// Transparent plate (`λe = λg = 0`).
    pub fn vacuum(position: f64) -> Result<Self> {
        Self::magnetodielectric(position, 0.0, 0.0)
    }

    pub fn dispersive(position: f64, response: Arc<dyn PlateResponse>) -> Result<Self> {
        Self::with_kind(position, PlateKind::Dispersive(response))
    }

    pub fn with_kind(position: f64, kind: PlateKind) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::InvalidPlate(format!(
                "position must be finite, got {position}"
            )));
        }
        if let PlateKind::Magnetodielectric { lambda_e, lambda_g } = kind {
            check_coupling("lambda_e", lambda_e)?;
            check_coupling("lambda_g", lambda_g)?;
        }
        Ok(Self { position, kind })
    }

    pub fn position(&self) -> f64 {
        self.position
    }

    pub fn kind(&self) -> &PlateKind {
        &self.kind
    }

    /// Same plate moved to a new position.
    pub fn at(&self, position: f64) -> Result<Self> {
        Self::with_kind(position, self.kind.clone())
    }

    /// Same plate with the electric and magnetic couplings exchanged.
    ///
    /// Dispersive plates are wrapped so that the exchange happens at evaluation time.
    pub fn swapped(&self) -> Self {
        let kind = match &self.kind {
            PlateKind::Magnetodielectric { lambda_e, lambda_g } => PlateKind::Magnetodielectric {
                lambda_e: *lambda_g,
                lambda_g: *lambda_e,
            },
            PlateKind::PerfectE => PlateKind::PerfectM,
            PlateKind::PerfectM => PlateKind::PerfectE,
            PlateKind::Dispersive(inner) => {
                PlateKind::Dispersive(Arc::new(SwappedResponse(inner.clone())))
            }
        };
        Self {
            position: self.position,
            kind,
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self.kind, PlateKind::PerfectE | PlateKind::PerfectM)
    }

    /// True when the coefficients depend on `κ` alone (ideal or transparent plates).
    pub fn is_kappa_only(&self) -> bool {
        match self.kind {
            PlateKind::PerfectE | PlateKind::PerfectM => true,
            PlateKind::Magnetodielectric { lambda_e, lambda_g } => {
                lambda_e == 0.0 && lambda_g == 0.0
            }
            PlateKind::Dispersive(_) => false,
        }
    }

    /// Couplings `(λe, λg)` at imaginary frequency `iζ`; `None` for ideal plates.
    pub fn couplings(&self, zeta: f64) -> Result<Option<(f64, f64)>> {
        match &self.kind {
            PlateKind::Magnetodielectric { lambda_e, lambda_g } => Ok(Some((*lambda_e, *lambda_g))),
            PlateKind::PerfectE | PlateKind::PerfectM => Ok(None),
            PlateKind::Dispersive(response) => {
                let (le, lg) = response.couplings(zeta);
                check_coupling("lambda_e(zeta)", le)?;
                check_coupling("lambda_g(zeta)", lg)?;
                Ok(Some((le, lg)))
            }
        }
    }
}

#[derive(Debug)]
struct SwappedResponse(Arc<dyn PlateResponse>);

impl PlateResponse for SwappedResponse {
    fn couplings(&self, zeta: f64) -> (f64, f64) {
        let (le, lg) = self.0.couplings(zeta);
        (lg, le)
    }
}

/// Reflection and transmission amplitude of one plate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub r: f64,
    pub t: f64,
}

impl Coefficients {
    pub const VACUUM: Coefficients = Coefficients { r: 0.0, t: 1.0 };
}

/// `r` and `t` of a magnetodielectric plate for mode H; mode E swaps the couplings.
fn magnetodielectric(lambda_e: f64, lambda_g: f64, mode: Mode, sp: &SpectralPoint) -> Coefficients {
    let (le, lg) = match mode {
        Mode::H => (lambda_e, lambda_g),
        Mode::E => (lambda_g, lambda_e),
    };
    let zeta2 = sp.zeta * sp.zeta;
    let kappa = sp.kappa;
    let magnetic = lg * zeta2 / (lg * zeta2 + 2.0 * kappa);
    let electric = le * kappa / (le * kappa + 2.0);
    Coefficients {
        r: electric - magnetic,
        t: 1.0 - magnetic - electric,
    }
}

/// Coefficients of `plate` for `mode` at `sp`.
pub fn coefficients(plate: &Plate, mode: Mode, sp: &SpectralPoint) -> Result<Coefficients> {
    if !(sp.kappa > 0.0) {
        return Err(Error::NonPositiveKappa(sp.kappa));
    }
    let c = match (&plate.kind, mode) {
        (PlateKind::PerfectE, Mode::H) | (PlateKind::PerfectM, Mode::E) => {
            Coefficients { r: 1.0, t: 0.0 }
        }
        (PlateKind::PerfectE, Mode::E) | (PlateKind::PerfectM, Mode::H) => {
            Coefficients { r: -1.0, t: 0.0 }
        }
        (PlateKind::Magnetodielectric { lambda_e, lambda_g }, _) => {
            magnetodielectric(*lambda_e, *lambda_g, mode, sp)
        }
        (PlateKind::Dispersive(_), _) => {
            let (le, lg) = plate
                .couplings(sp.zeta)?
                .expect("dispersive plates always report couplings");
            magnetodielectric(le, lg, mode, sp)
        }
    };
    Ok(c)
}
