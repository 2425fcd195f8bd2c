//! Energies per unit area and pressures from the multiple-scattering parameter.
//!
//! The spectral measure `(1/2) ∫dζ/2π ∫d²k⊥/(2π)²` over the even integrand
//! `ln Δ^H + ln Δ^E` reduces, with `κ² = k⊥² + ζ²` and `ζ = κ s`, to
//!
//! ```text
//! E/A = 1/(4π²) ∫₀^∞ dκ κ² ∫₀¹ ds [ln Δ^H + ln Δ^E](ζ = κ s, κ)
//! ```
//!
//! When every plate has κ-only coefficients the inner integral is trivial and the
//! one-dimensional form `1/(4π²) ∫ κ² [ln Δ^H + ln Δ^E] dκ` is used instead.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::integrate::{adaptive, integrate_semi_infinite_fallible, Integral, QuadratureSpec};
use crate::error::{Error, Result};
use crate::optics::{Mode, SpectralPoint};
use crate::scattering::{composite, fold_with_log, gap_derivatives_from, Stack};

/// Which reduction of the spectral measure was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegrationPath {
    KappaOnly1D,
    General2D,
}

impl IntegrationPath {
    pub fn label(self) -> &'static str {
        match self {
            IntegrationPath::KappaOnly1D => "KappaOnly1D",
            IntegrationPath::General2D => "General2D",
        }
    }
}

/// Quadrature outcome for an energy per area (unit⁻³) or a pressure (unit⁻⁴).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub path: IntegrationPath,
}

/// Pressures carry the same bookkeeping as energies.
pub type PressureResult = EnergyResult;

const MEASURE: f64 = 1.0 / (4.0 * PI * PI);

/// Inner ζ integrals are solved this much tighter than the outer κ integral.
const INNER_TOLERANCE_FACTOR: f64 = 1e-2;

/// Tightest inner tolerance requested; below it cancellation between the two
/// polarizations can push the Kronrod roundoff floor above the target.
const INNER_TOLERANCE_FLOOR: f64 = 1e-10;

/// Default tolerances for a stack: `1e-9` when the one-dimensional path applies,
/// `1e-7` otherwise.
pub fn default_spec_for(stack: &Stack) -> QuadratureSpec {
    if stack.is_kappa_only() {
        QuadratureSpec::default()
    } else {
        QuadratureSpec::general_default()
    }
}

/// `∫₀^∞ dκ κ² K(κ)` where `K` is the ζ-average of `kernel` (or `kernel` itself on
/// the κ-only path).
pub(crate) fn spectral_integral<F>(
    kernel: F,
    kappa_only: bool,
    length_scale: f64,
    spec: &QuadratureSpec,
) -> Result<(Integral, IntegrationPath)>
where
    F: Fn(&SpectralPoint) -> Result<f64> + Sync,
{
    spec.validate()?;
    if !(length_scale > 0.0 && length_scale.is_finite()) {
        return Err(Error::InvalidStack(format!(
            "length scale must be positive, got {length_scale}"
        )));
    }
    let outer = QuadratureSpec {
        scale: 1.0 / length_scale,
        ..spec.clone()
    };

    if kappa_only && !spec.force_general {
        let integral = integrate_semi_infinite_fallible(
            |kappa| {
                let sp = SpectralPoint::from_zeta_kappa(0.0, kappa)?;
                Ok(kappa * kappa * kernel(&sp)?)
            },
            0.0,
            &outer,
        )?;
        return Ok((integral, IntegrationPath::KappaOnly1D));
    }

    let inner_spec = QuadratureSpec {
        rel_tol: (spec.rel_tol * INNER_TOLERANCE_FACTOR).max(INNER_TOLERANCE_FLOOR),
        abs_tol: 0.0,
        parallel: false,
        ..spec.clone()
    };
    let inner_evaluations = AtomicUsize::new(0);
    let mut integral = integrate_semi_infinite_fallible(
        |kappa| {
            let inner = adaptive(
                &|s: f64| kernel(&SpectralPoint::from_zeta_kappa(kappa * s, kappa)?),
                0.0,
                1.0,
                &inner_spec,
            )?;
            inner_evaluations.fetch_add(inner.evaluations, Ordering::Relaxed);
            Ok(kappa * kappa * inner.value)
        },
        0.0,
        &outer,
    )?;
    integral.evaluations = inner_evaluations.into_inner();
    integral.error += inner_spec.rel_tol * integral.value.abs();
    Ok((integral, IntegrationPath::General2D))
}

fn scaled(integral: Integral, path: IntegrationPath, factor: f64) -> EnergyResult {
    EnergyResult {
        value: factor * integral.value,
        error_estimate: factor.abs() * integral.error,
        evaluations: integral.evaluations,
        path,
    }
}

fn require_pair(stack: &Stack) -> Result<f64> {
    if stack.len() < 2 {
        return Err(Error::TooFewPlates(stack.len()));
    }
    Ok(stack.min_gap().expect("at least two plates"))
}

/// Casimir energy per unit area of the whole stack.
pub fn energy_per_area(stack: &Stack, spec: &QuadratureSpec) -> Result<EnergyResult> {
    let min_gap = require_pair(stack)?;
    let positions = stack.positions();
    let kernel = |sp: &SpectralPoint| -> Result<f64> {
        let mut total = 0.0;
        for mode in Mode::BOTH {
            let coeffs = stack.coefficients(mode, sp)?;
            total += fold_with_log(&coeffs, &positions, sp)?.1;
        }
        Ok(total)
    };
    let (integral, path) = spectral_integral(kernel, stack.is_kappa_only(), min_gap, spec)?;
    Ok(scaled(integral, path, MEASURE))
}

/// Interaction energy per area between two bodies whose facing plates are `gap` apart.
pub fn interaction_energy(
    left: &Stack,
    right: &Stack,
    gap: f64,
    spec: &QuadratureSpec,
) -> Result<EnergyResult> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::InvalidStack(format!("gap must be positive, got {gap}")));
    }
    let scale = [left.min_gap(), right.min_gap(), Some(gap)]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);
    let kernel = |sp: &SpectralPoint| -> Result<f64> {
        let u = sp.propagator(gap);
        let mut total = 0.0;
        for mode in Mode::BOTH {
            let l = composite(left, mode, sp)?;
            let r = composite(right, mode, sp)?;
            let round_trip = l.r_right * u * r.r_left * u;
            if !(round_trip < 1.0) {
                return Err(Error::DegenerateCavity(1.0 - round_trip));
            }
            total += (-round_trip).ln_1p();
        }
        Ok(total)
    };
    let kappa_only = left.is_kappa_only() && right.is_kappa_only();
    let (integral, path) = spectral_integral(kernel, kappa_only, scale, spec)?;
    Ok(scaled(integral, path, MEASURE))
}

/// `∫ κ² Σ_modes ∂ln Δ/∂l_g` for one gap (1-based `g`).
fn gap_derivative_integral(
    stack: &Stack,
    g: usize,
    spec: &QuadratureSpec,
) -> Result<(Integral, IntegrationPath)> {
    let min_gap = require_pair(stack)?;
    let positions = stack.positions();
    let kernel = |sp: &SpectralPoint| -> Result<f64> {
        let mut total = 0.0;
        for mode in Mode::BOTH {
            let coeffs = stack.coefficients(mode, sp)?;
            total += gap_derivatives_from(&coeffs, &positions, sp)?[g - 1];
        }
        Ok(total)
    };
    spectral_integral(kernel, stack.is_kappa_only(), min_gap, spec)
}

/// Generalized pressure conjugate to gap `g`: `-∂(E/A)/∂l_g` with all other gaps
/// held fixed. Negative values mean the gap wants to shrink.
pub fn gap_pressure(stack: &Stack, g: usize, spec: &QuadratureSpec) -> Result<PressureResult> {
    stack.gap(g)?;
    let (integral, path) = gap_derivative_integral(stack, g, spec)?;
    Ok(scaled(integral, path, -MEASURE))
}

/// Pressure on plate `i`, `-∂(E/A)/∂a_i`. Positive values push the plate toward
/// larger `z`.
///
/// Only the two gaps adjacent to the plate depend on its position; their
/// contributions are integrated separately so that a vanishing net pressure is
/// still resolved to relative accuracy.
pub fn pressure_on_plate(stack: &Stack, i: usize, spec: &QuadratureSpec) -> Result<PressureResult> {
    stack.check_index(i)?;
    require_pair(stack)?;
    let n = stack.len();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut path = if stack.is_kappa_only() && !spec.force_general {
        IntegrationPath::KappaOnly1D
    } else {
        IntegrationPath::General2D
    };
    // ∂a_i l_{i-1} = +1, ∂a_i l_i = -1
    for (g, sign) in [(i.wrapping_sub(1), 1.0), (i, -1.0)] {
        if g == 0 || g >= n {
            continue;
        }
        let (integral, p) = gap_derivative_integral(stack, g, spec)?;
        value += sign * integral.value;
        error += integral.error;
        evaluations += integral.evaluations;
        path = p;
    }
    Ok(EnergyResult {
        value: -MEASURE * value,
        error_estimate: MEASURE * error,
        evaluations,
        path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::Plate;

    fn pe_stack(n: usize, gap: f64) -> Stack {
        Stack::uniform(&Plate::perfect_e(0.0).unwrap(), n, 0.0, gap).unwrap()
    }

    const TWO_PLATE_ENERGY: f64 = -PI * PI / 720.0;

    #[test]
    fn perfect_conductors_unit_gap() {
        let e = energy_per_area(&pe_stack(2, 1.0), &QuadratureSpec::default()).unwrap();
        assert_eq!(e.path, IntegrationPath::KappaOnly1D);
        assert!((e.value / TWO_PLATE_ENERGY - 1.0).abs() < 1e-10, "{}", e.value);
        assert!(e.error_estimate >= 0.0);
    }

    #[test]
    fn vacuum_plates_have_no_energy() {
        let s = Stack::uniform(&Plate::vacuum(0.0).unwrap(), 2, 0.0, 1.0).unwrap();
        let e = energy_per_area(&s, &QuadratureSpec::default()).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn single_plate_is_rejected() {
        assert_eq!(
            energy_per_area(&pe_stack(1, 1.0), &QuadratureSpec::default()),
            Err(Error::TooFewPlates(1))
        );
    }

    #[test]
    fn two_plate_pressure_and_symmetric_middle() {
        let spec = QuadratureSpec::default();
        let p = pressure_on_plate(&pe_stack(2, 1.0), 2, &spec).unwrap();
        assert!((p.value / (-PI * PI / 240.0) - 1.0).abs() < 1e-10);
        let p1 = pressure_on_plate(&pe_stack(2, 1.0), 1, &spec).unwrap();
        assert!((p1.value + p.value).abs() < 1e-14);

        let m = pressure_on_plate(&pe_stack(3, 1.0), 2, &spec).unwrap();
        assert!(m.value.abs() < 1e-14, "{}", m.value);
        let outer = pressure_on_plate(&pe_stack(3, 1.0), 3, &spec).unwrap();
        assert!((outer.value - p.value).abs() < 1e-12);
    }

    #[test]
    fn general_path_agrees_on_ideal_stack() {
        let s = Stack::new(vec![
            Plate::perfect_e(0.0).unwrap(),
            Plate::vacuum(0.5).unwrap(),
            Plate::perfect_m(1.3).unwrap(),
        ])
        .unwrap();
        let one = energy_per_area(&s, &QuadratureSpec::default()).unwrap();
        let two = energy_per_area(
            &s,
            &QuadratureSpec {
                force_general: true,
                ..QuadratureSpec::default()
            },
        )
        .unwrap();
        assert_eq!(two.path, IntegrationPath::General2D);
        assert!((one.value / two.value - 1.0).abs() < 1e-8);
        // PerfectE facing PerfectM repels
        assert!(one.value > 0.0);
    }

    #[test]
    fn gap_pressure_for_two_plates_is_plate_pressure() {
        let s = pe_stack(2, 0.7);
        let spec = QuadratureSpec::default();
        let g = gap_pressure(&s, 1, &spec).unwrap();
        let p = pressure_on_plate(&s, 2, &spec).unwrap();
        assert!((g.value - p.value).abs() < 1e-12 * p.value.abs());
        assert!(gap_pressure(&s, 2, &spec).is_err());
    }
}
