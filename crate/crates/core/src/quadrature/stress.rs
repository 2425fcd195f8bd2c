//! Closed-form stress-tensor pressures for two and three plates with κ-only
//! coefficients, written term by term as single κ integrals.

use std::f64::consts::PI;

use super::energy::{EnergyResult, IntegrationPath, PressureResult};
use super::integrate::{integrate_semi_infinite_fallible, QuadratureSpec};
use crate::error::{Error, Result};
use crate::optics::{Mode, SpectralPoint};
use crate::scattering::Stack;

fn require_kappa_only(stack: &Stack, n: usize) -> Result<()> {
    if stack.len() != n {
        return Err(Error::InvalidStack(format!(
            "stress formula needs exactly {n} plates, got {}",
            stack.len()
        )));
    }
    if !stack.is_kappa_only() {
        return Err(Error::RequiresKappaOnly);
    }
    Ok(())
}

fn integrate<F>(kernel: F, min_gap: f64, spec: &QuadratureSpec) -> Result<PressureResult>
where
    F: Fn(&SpectralPoint) -> Result<f64> + Sync,
{
    let spec = QuadratureSpec {
        scale: 1.0 / min_gap,
        ..spec.clone()
    };
    let integral = integrate_semi_infinite_fallible(
        |kappa| {
            let sp = SpectralPoint::from_zeta_kappa(0.0, kappa)?;
            Ok(kappa.powi(3) * kernel(&sp)?)
        },
        0.0,
        &spec,
    )?;
    let factor = 1.0 / (2.0 * PI * PI);
    Ok(EnergyResult {
        value: -factor * integral.value,
        error_estimate: factor * integral.error,
        evaluations: integral.evaluations,
        path: IntegrationPath::KappaOnly1D,
    })
}

/// Pressure on plate 2 of a two-plate stack:
/// `-(1/2π²) ∫ κ³ dκ Σ_modes r1 r2 e^{-2κa} / Δ12`.
pub fn pressure_two_plates_stress(stack: &Stack, spec: &QuadratureSpec) -> Result<PressureResult> {
    require_kappa_only(stack, 2)?;
    let a = stack.gap(1)?;
    let kernel = |sp: &SpectralPoint| -> Result<f64> {
        let mut total = 0.0;
        for mode in Mode::BOTH {
            let c = stack.coefficients(mode, sp)?;
            let loop_ = c[0].r * c[1].r * sp.propagator(2.0 * a);
            total += loop_ / (1.0 - loop_);
        }
        Ok(total)
    };
    integrate(kernel, a, spec)
}

/// Pressure on plate 3 of a three-plate stack with gaps `a = a2 - a1`, `b = a3 - a2`:
///
/// ```text
/// -(1/2π²) ∫ κ³ dκ Σ_modes [ r2 r3 e^{-2κb} Δ12 + r1 t2² r3 e^{-2κa} e^{-2κb} ] / Δ123
/// ```
pub fn pressure_three_plates_stress(stack: &Stack, spec: &QuadratureSpec) -> Result<PressureResult> {
    require_kappa_only(stack, 3)?;
    let a = stack.gap(1)?;
    let b = stack.gap(2)?;
    let kernel = |sp: &SpectralPoint| -> Result<f64> {
        let ea = sp.propagator(2.0 * a);
        let eb = sp.propagator(2.0 * b);
        let mut total = 0.0;
        for mode in Mode::BOTH {
            let c = stack.coefficients(mode, sp)?;
            let (r1, r2, t2, r3) = (c[0].r, c[1].r, c[1].t, c[2].r);
            let delta12 = 1.0 - r1 * r2 * ea;
            let delta23 = 1.0 - r2 * r3 * eb;
            let far = r1 * t2 * t2 * r3 * ea * eb;
            let delta123 = delta12 * delta23 - far;
            total += r2 * r3 * eb * delta12 / delta123 + far / delta123;
        }
        Ok(total)
    };
    integrate(kernel, a.min(b), spec)
}
