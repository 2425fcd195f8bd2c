//! Composite reflection/transmission of multi-plate bodies, built by folding
//! two-body cavity combinations.
//!
//! Joining a left body and a right body across a vacuum gap with
//! `u = e^{-κ·gap}` produces the cavity factor
//! `Δ_pair = 1 - R^<_left u R^>_right u`, and the multiple-scattering parameter of
//! the joined body is `Δ_left · Δ_right · Δ_pair`. Folding plate by plate therefore
//! yields `Δ_{1⋯N}` as a product of positive cavity factors, which is the
//! evaluation the quadrature layer relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{Coefficients, Mode, SpectralPoint};

use super::Stack;

/// Optical response of a body made of one or more plates.
///
/// `r_left` is the reflection for a wave arriving from the left, referenced to the
/// leftmost plate plane; `r_right` is for a wave arriving from the right,
/// referenced to the rightmost plate plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositeCoefficients {
    pub r_left: f64,
    pub r_right: f64,
    pub t: f64,
    pub delta: f64,
}

impl From<Coefficients> for CompositeCoefficients {
    fn from(c: Coefficients) -> Self {
        Self {
            r_left: c.r,
            r_right: c.r,
            t: c.t,
            delta: 1.0,
        }
    }
}

/// Cavity factor between two bodies separated by a vacuum gap.
pub fn cavity_factor(left_r_right: f64, right_r_left: f64, gap: f64, sp: &SpectralPoint) -> f64 {
    let u = sp.propagator(gap);
    1.0 - left_r_right * u * right_r_left * u
}

/// Joins `left` and `right` across a vacuum gap of width `gap`.
pub fn combine(
    left: &CompositeCoefficients,
    right: &CompositeCoefficients,
    gap: f64,
    sp: &SpectralPoint,
) -> Result<CompositeCoefficients> {
    if !(gap > 0.0) {
        return Err(Error::InvalidStack(format!("gap must be positive, got {gap}")));
    }
    Ok(combine_unchecked(left, right, sp.propagator(gap))?.0)
}

/// Combination with a precomputed propagator; also returns `Δ_pair`.
fn combine_unchecked(
    left: &CompositeCoefficients,
    right: &CompositeCoefficients,
    u: f64,
) -> Result<(CompositeCoefficients, f64)> {
    let round_trip = left.r_right * u * right.r_left * u;
    let pair = 1.0 - round_trip;
    if !(pair > 0.0) {
        return Err(Error::DegenerateCavity(pair));
    }
    let joined = CompositeCoefficients {
        r_right: right.r_right + right.t * u * left.r_right * u * right.t / pair,
        r_left: left.r_left + left.t * u * right.r_left * u * left.t / pair,
        t: left.t * u * right.t / pair,
        delta: left.delta * right.delta * pair,
    };
    Ok((joined, round_trip))
}

/// Left fold over per-plate coefficients; also returns `ln Δ` accumulated as a sum
/// of `ln(1 - round trip)` terms.
pub(crate) fn fold_with_log(
    coeffs: &[Coefficients],
    positions: &[f64],
    sp: &SpectralPoint,
) -> Result<(CompositeCoefficients, f64)> {
    let mut acc = CompositeCoefficients::from(coeffs[0]);
    let mut log_delta = 0.0;
    for i in 1..coeffs.len() {
        let u = sp.propagator(positions[i] - positions[i - 1]);
        let (next, round_trip) = combine_unchecked(&acc, &coeffs[i].into(), u)?;
        log_delta += (-round_trip).ln_1p();
        acc = next;
    }
    Ok((acc, log_delta))
}

/// Composite coefficients of the whole stack (left fold).
pub fn composite(stack: &Stack, mode: Mode, sp: &SpectralPoint) -> Result<CompositeCoefficients> {
    let coeffs = stack.coefficients(mode, sp)?;
    Ok(fold_with_log(&coeffs, &stack.positions(), sp)?.0)
}

/// Composite coefficients built from the right end; same `t` and `delta` as
/// [`composite`].
pub fn composite_right_fold(
    stack: &Stack,
    mode: Mode,
    sp: &SpectralPoint,
) -> Result<CompositeCoefficients> {
    let coeffs = stack.coefficients(mode, sp)?;
    let positions = stack.positions();
    let n = coeffs.len();
    let mut acc = CompositeCoefficients::from(coeffs[n - 1]);
    for i in (0..n - 1).rev() {
        let u = sp.propagator(positions[i + 1] - positions[i]);
        acc = combine_unchecked(&coeffs[i].into(), &acc, u)?.0;
    }
    Ok(acc)
}

/// `ln Δ_{1⋯N}` via the factorized product.
pub fn log_delta(stack: &Stack, mode: Mode, sp: &SpectralPoint) -> Result<f64> {
    let coeffs = stack.coefficients(mode, sp)?;
    Ok(fold_with_log(&coeffs, &stack.positions(), sp)?.1)
}

/// `∂ ln Δ / ∂ l_g` for every gap `g = 1..N-1`, in gap order.
///
/// Splitting at gap `g` isolates its width: the left and right bodies do not depend
/// on it, so `∂_l ln Δ = 2κ x / (1 - x)` with `x = R^<_left R^>_right e^{-2κl}`.
pub fn log_delta_gap_derivatives(
    stack: &Stack,
    mode: Mode,
    sp: &SpectralPoint,
) -> Result<Vec<f64>> {
    let coeffs = stack.coefficients(mode, sp)?;
    gap_derivatives_from(&coeffs, &stack.positions(), sp)
}

pub(crate) fn gap_derivatives_from(
    coeffs: &[Coefficients],
    positions: &[f64],
    sp: &SpectralPoint,
) -> Result<Vec<f64>> {
    let n = coeffs.len();
    if n < 2 {
        return Ok(Vec::new());
    }
    let propagators: Vec<f64> = positions
        .windows(2)
        .map(|w| sp.propagator(w[1] - w[0]))
        .collect();

    // prefix[g]: plates 0..=g; suffix[g]: plates g..n-1 (0-based)
    let mut prefix = Vec::with_capacity(n);
    prefix.push(CompositeCoefficients::from(coeffs[0]));
    for i in 1..n {
        let next = combine_unchecked(&prefix[i - 1], &coeffs[i].into(), propagators[i - 1])?.0;
        prefix.push(next);
    }
    let mut suffix = vec![CompositeCoefficients::from(coeffs[n - 1]); n];
    for i in (0..n - 1).rev() {
        suffix[i] = combine_unchecked(&coeffs[i].into(), &suffix[i + 1], propagators[i])?.0;
    }

    let kappa = sp.kappa();
    Ok((0..n - 1)
        .map(|g| {
            let u = propagators[g];
            let x = prefix[g].r_right * suffix[g + 1].r_left * u * u;
            2.0 * kappa * x / (1.0 - x)
        })
        .collect())
}
