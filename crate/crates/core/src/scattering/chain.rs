//! Partition expansion of the multiple-scattering parameter.
//!
//! `Δ_{1⋯N}` is a sum over every increasing index chain `1 = i0 < i1 < ... < im = N`
//! of the product of pair factors `Δ_{i_k i_{k+1}}`. Adjacent pairs contribute the
//! round trip `1 - r_i e^{-κl} r_{i+1} e^{-κl}`; non-adjacent pairs contribute the
//! loop `-r_i (Π t_m²) r_k e^{-2κ(a_k - a_i)}` that threads every plate in between.

use std::fmt;

use crate::error::{Error, Result};
use crate::optics::{Coefficients, Mode, SpectralPoint};

use super::Stack;

/// All increasing chains from plate 1 to plate `n`, in lexicographic order.
///
/// There are `2^{n-2}` of them, one per subset of the interior plates.
pub fn enumerate_chains(n: usize) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(Error::TooSmall { min: 2, got: n });
    }
    let mut out = Vec::with_capacity(1 << (n - 2));
    let mut current = vec![1];
    extend_chains(n, &mut current, &mut out);
    Ok(out)
}

fn extend_chains(n: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *current.last().expect("chain starts at 1");
    if last == n {
        out.push(current.clone());
        return;
    }
    for next in last + 1..=n {
        current.push(next);
        extend_chains(n, current, out);
        current.pop();
    }
}

fn check_pair(stack: &Stack, i: usize, k: usize) -> Result<()> {
    stack.check_index(i)?;
    stack.check_index(k)?;
    Ok(())
}

/// Adjacent round trip `Δ_{i,i+1}` from precomputed coefficients (0-based `i`).
pub(crate) fn pair_nn(coeffs: &[Coefficients], positions: &[f64], sp: &SpectralPoint, i: usize) -> f64 {
    let u = sp.propagator(positions[i + 1] - positions[i]);
    1.0 - coeffs[i].r * u * coeffs[i + 1].r * u
}

/// Non-adjacent loop `Δ_{ik}` from precomputed coefficients (0-based indices).
pub(crate) fn pair_far(
    coeffs: &[Coefficients],
    positions: &[f64],
    sp: &SpectralPoint,
    i: usize,
    k: usize,
) -> f64 {
    let through: f64 = coeffs[i + 1..k].iter().map(|c| c.t * c.t).product();
    -coeffs[i].r * through * coeffs[k].r * sp.propagator(2.0 * (positions[k] - positions[i]))
}

/// Nearest-neighbour factor `Δ_{i,i+1}` (1-based `i`).
pub fn delta_nn(stack: &Stack, i: usize, mode: Mode, sp: &SpectralPoint) -> Result<f64> {
    if i == 0 || i >= stack.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: stack.len().saturating_sub(1),
        });
    }
    let left = crate::optics::coefficients(stack.plate(i)?, mode, sp)?;
    let right = crate::optics::coefficients(stack.plate(i + 1)?, mode, sp)?;
    let u = sp.propagator(stack.gap(i)?);
    Ok(1.0 - left.r * u * right.r * u)
}

/// Far loop `Δ_{ik}` for `k ≥ i + 2` (1-based), sign included.
pub fn delta_far(stack: &Stack, i: usize, k: usize, mode: Mode, sp: &SpectralPoint) -> Result<f64> {
    check_pair(stack, i, k)?;
    if k < i + 2 {
        return Err(Error::NotNonAdjacent { i, k });
    }
    let coeffs = stack.sub(i, k)?.coefficients(mode, sp)?;
    let positions = stack.sub(i, k)?.positions();
    Ok(pair_far(&coeffs, &positions, sp, 0, k - i))
}

/// `Δ_{12⋯N}` summed literally over [`enumerate_chains`].
///
/// This is the cross-check route; [`super::composite`] gives the same number as a
/// product of cavity factors and is the one the quadrature layer uses.
pub fn delta_chain(stack: &Stack, mode: Mode, sp: &SpectralPoint) -> Result<f64> {
    let n = stack.len();
    let chains = enumerate_chains(n)?;
    let coeffs = stack.coefficients(mode, sp)?;
    let positions = stack.positions();

    // pair[i][k] for 0-based i < k
    let mut pair = vec![vec![0.0; n]; n];
    for (i, row) in pair.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate().skip(i + 1) {
            *entry = if k == i + 1 {
                pair_nn(&coeffs, &positions, sp, i)
            } else {
                pair_far(&coeffs, &positions, sp, i, k)
            };
        }
    }

    Ok(chains
        .iter()
        .map(|chain| {
            chain
                .windows(2)
                .map(|w| pair[w[0] - 1][w[1] - 1])
                .product::<f64>()
        })
        .sum())
}

/// Symbolic single-plate amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Amplitude {
    Reflection(usize),
    Transmission(usize),
}

impl Amplitude {
    pub fn plate(self) -> usize {
        match self {
            Amplitude::Reflection(i) | Amplitude::Transmission(i) => i,
        }
    }

    /// Numeric value given the coefficients of plates `1..=N` in order.
    pub fn eval(self, coeffs: &[Coefficients]) -> f64 {
        match self {
            Amplitude::Reflection(i) => coeffs[i - 1].r,
            Amplitude::Transmission(i) => coeffs[i - 1].t,
        }
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Amplitude::Reflection(i) => write!(f, "r{i}"),
            Amplitude::Transmission(i) => write!(f, "t{i}"),
        }
    }
}

/// One closed scattering loop: `sign × Π factors × e^{-κ·pathlength}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopTerm {
    /// Plates the loop touches, increasing.
    pub indices: Vec<usize>,
    pub factors: Vec<Amplitude>,
    pub sign: f64,
    pub pathlength: f64,
}

impl LoopTerm {
    /// Signed product of the amplitude factors.
    pub fn amplitude(&self, coeffs: &[Coefficients]) -> f64 {
        self.sign * self.factors.iter().map(|a| a.eval(coeffs)).product::<f64>()
    }

    pub fn value(&self, coeffs: &[Coefficients], sp: &SpectralPoint) -> f64 {
        self.amplitude(coeffs) * sp.propagator(self.pathlength)
    }
}

/// Pair factor `Δ_{ik}` of a chain in symbolic form.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainFactor {
    pub first: usize,
    pub last: usize,
    /// Adjacent pairs carry the unscattered `1`.
    pub includes_unity: bool,
    pub term: LoopTerm,
}

impl ChainFactor {
    pub fn eval(&self, coeffs: &[Coefficients], sp: &SpectralPoint) -> f64 {
        let unity = if self.includes_unity { 1.0 } else { 0.0 };
        unity + self.term.value(coeffs, sp)
    }

    /// Label such as `Δ24`; indices above 9 are comma separated (`Δ9,10`).
    pub fn label(&self) -> String {
        if self.first < 10 && self.last < 10 {
            format!("Δ{}{}", self.first, self.last)
        } else {
            format!("Δ{},{}", self.first, self.last)
        }
    }

    /// Expanded form, e.g. `Δ13 = -r1·t2·t2·r3·e^{-2κ(a3-a1)}`.
    pub fn expansion(&self) -> String {
        let product = self
            .term
            .factors
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("·");
        let exp = format!("e^{{-2κ(a{}-a{})}}", self.last, self.first);
        if self.includes_unity {
            format!("{} = 1 - {product}·{exp}", self.label())
        } else {
            format!("{} = -{product}·{exp}", self.label())
        }
    }
}

/// One summand of the partition expansion.
pub type Chain = Vec<ChainFactor>;

fn factor_for(positions: &[f64], i: usize, k: usize) -> ChainFactor {
    let mut factors = vec![Amplitude::Reflection(i)];
    for m in i + 1..k {
        factors.push(Amplitude::Transmission(m));
        factors.push(Amplitude::Transmission(m));
    }
    factors.push(Amplitude::Reflection(k));
    ChainFactor {
        first: i,
        last: k,
        includes_unity: k == i + 1,
        term: LoopTerm {
            indices: (i..=k).collect(),
            factors,
            sign: -1.0,
            pathlength: 2.0 * (positions[k - 1] - positions[i - 1]),
        },
    }
}

/// Symbolic loop factors for every chain of the stack, in chain order.
///
/// The mode only selects which coefficients a later evaluation should use; the
/// symbolic structure is the same for both polarizations.
pub fn loop_terms(stack: &Stack, _mode: Mode) -> Result<Vec<Chain>> {
    let positions = stack.positions();
    Ok(enumerate_chains(stack.len())?
        .into_iter()
        .map(|chain| {
            chain
                .windows(2)
                .map(|w| factor_for(&positions, w[0], w[1]))
                .collect()
        })
        .collect())
}

/// Symbolic chains for `n` plates without positions (pathlengths are zero).
pub fn chain_diagrams(n: usize) -> Result<Vec<Chain>> {
    let positions = vec![0.0; n];
    Ok(enumerate_chains(n)?
        .into_iter()
        .map(|chain| {
            chain
                .windows(2)
                .map(|w| factor_for(&positions, w[0], w[1]))
                .collect()
        })
        .collect())
}

/// Evaluates one symbolic chain.
pub fn eval_chain(chain: &[ChainFactor], coeffs: &[Coefficients], sp: &SpectralPoint) -> f64 {
    chain.iter().map(|f| f.eval(coeffs, sp)).product()
}
