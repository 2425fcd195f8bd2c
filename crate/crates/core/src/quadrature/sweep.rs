//! Energy and gap pressure along a sequence of widths for one gap.

use serde::{Deserialize, Serialize};

use super::energy::{energy_per_area, gap_pressure, EnergyResult, PressureResult};
use super::integrate::QuadratureSpec;
use crate::error::Result;
use crate::exec;
use crate::scattering::Stack;

/// One sample of a gap sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub gap: f64,
    pub energy: EnergyResult,
    /// `-∂(E/A)/∂l` for the swept gap.
    pub pressure: PressureResult,
}

/// Evaluates energy per area and gap pressure with gap `g` set to each width.
///
/// The plates above the gap move rigidly, so every other gap keeps its width.
/// Points are independent and run in parallel when `spec.parallel` is set; the
/// output order follows `widths`.
pub fn sweep_gap(
    stack: &Stack,
    g: usize,
    widths: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<SweepPoint>> {
    stack.gap(g)?;
    spec.validate()?;
    exec::map(widths, spec.parallel, |&width| {
        let shifted = stack.with_gap(g, width)?;
        Ok(SweepPoint {
            gap: width,
            energy: energy_per_area(&shifted, spec)?,
            pressure: gap_pressure(&shifted, g, spec)?,
        })
    })
    .into_iter()
    .collect()
}
