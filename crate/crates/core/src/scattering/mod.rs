//! Multiple-scattering parameters for plate stacks.
//!
//! Two independent routes to `Δ_{1⋯N}` live here: the partition expansion over
//! index chains ([`delta_chain`]) and the factorized cavity product obtained by
//! folding composite coefficients ([`composite`]). They must agree for every stack,
//! which makes each one the oracle of the other.

mod chain;
mod composite;
mod stack;

pub use chain::{
    chain_diagrams, delta_chain, delta_far, delta_nn, enumerate_chains, eval_chain, loop_terms,
    Amplitude, Chain, ChainFactor, LoopTerm,
};
pub use composite::{
    cavity_factor, combine, composite, composite_right_fold, log_delta,
    log_delta_gap_derivatives, CompositeCoefficients,
};
pub use stack::Stack;

pub(crate) use composite::{fold_with_log, gap_derivatives_from};

use crate::error::Result;
use crate::optics::{Mode, SpectralPoint};

/// Right-hand side of the factorization identity at split `i` (plates `1..=i` |
/// `i+1..=N`): `Δ_{1..i} · Δ_{i+1..N} · (1 - R^<_{1..i} e^{-κl} R^>_{i+1..N} e^{-κl})`.
pub fn factorized_delta(stack: &Stack, split: usize, mode: Mode, sp: &SpectralPoint) -> Result<f64> {
    let gap = stack.gap(split)?;
    let left = stack.sub(1, split)?;
    let right = stack.sub(split + 1, stack.len())?;
    let delta_of = |s: &Stack| -> Result<f64> {
        if s.len() < 2 {
            Ok(1.0)
        } else {
            delta_chain(s, mode, sp)
        }
    };
    let l = composite(&left, mode, sp)?;
    let r = composite(&right, mode, sp)?;
    Ok(delta_of(&left)? * delta_of(&right)? * cavity_factor(l.r_right, r.r_left, gap, sp))
}
