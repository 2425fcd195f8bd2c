//! Reduced Green's functions `g^H`, `g^E` of one to three plates in region-matrix
//! form, with finite-difference checks of the defining equation and of the
//! δ-plate jump conditions.
//!
//! With `N` plates the line splits into slabs `0..=N`; slab `s` holds the points
//! with exactly `s` plates below them. A query `(z, z′)` lies in region `(i, j)`
//! with `i = N + 1 - s(z′)` and `j = s(z) + 1`, and
//!
//! ```text
//! g = δ_{s(z), s(z′)} e^{-κ|z-z′|}/2κ + (1/2κ) Σ_{p,q} A_p B^{ij}_{pq} C_q
//! ```
//!
//! where `A_p = e^{-κ|z′-a_p|}` carries the source to the plate `p` it first hits,
//! `C_q = e^{-κ|z-a_q|}` carries the wave from the plate `q` that last scatters it
//! to the observer, and `B^{ij}_{pq}` sums every scattering path in between. Each
//! `B` entry is a list of [`PathTerm`]s over the common denominator `Δ_{1⋯N}`.
//!
//! Every entry follows one rule. If source and observer share slab `k`, the left
//! body `1..k` and right body `k+1..N` contribute a reflection numerator `ρ` when
//! the path visits them and their own `Δ` otherwise. If they sit in different
//! slabs, the body in between contributes its transmission numerator
//! `t·e^{-κl}·t⋯` and the outer bodies again contribute `ρ` or `Δ`. Reflection
//! numerators expand as `ρ^>_{1..n} = Σ_m (Π_{j>m} t_j² e^{-2κl_j}) r_m Δ_{1..m}`
//! (and mirrored for incidence from the left).

use std::fmt;

use crate::error::{Error, Result};
use crate::optics::{Coefficients, Mode, Plate, PlateKind, SpectralPoint};
use crate::scattering::{delta_chain, Amplitude, Stack};

/// Largest stack with closed-form region matrices.
pub const MAX_PLATES: usize = 3;

/// Evaluation point of `g^{mode}(z, z′)` at one spectral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensQuery {
    pub z: f64,
    pub zprime: f64,
    pub mode: Mode,
    pub sp: SpectralPoint,
}

/// One step of a scattering path: a plate amplitude or a traversal of gap `g`
/// (between plates `g` and `g + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathStep {
    Amplitude(Amplitude),
    Gap(usize),
}

/// Product of path steps and sub-body factors `Δ_{first⋯last}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathTerm {
    pub steps: Vec<PathStep>,
    pub deltas: Vec<(usize, usize)>,
}

impl PathTerm {
    fn unit() -> Self {
        Self {
            steps: Vec::new(),
            deltas: Vec::new(),
        }
    }

    fn then(&self, other: &PathTerm) -> Self {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        let mut deltas = self.deltas.clone();
        deltas.extend_from_slice(&other.deltas);
        Self { steps, deltas }
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = Amplitude> + '_ {
        self.steps.iter().filter_map(|s| match s {
            PathStep::Amplitude(a) => Some(*a),
            PathStep::Gap(_) => None,
        })
    }

    pub fn gaps(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().filter_map(|s| match s {
            PathStep::Gap(g) => Some(*g),
            PathStep::Amplitude(_) => None,
        })
    }

    /// Total vacuum distance travelled between plates.
    pub fn pathlength(&self, positions: &[f64]) -> f64 {
        self.gaps().map(|g| positions[g] - positions[g - 1]).sum()
    }

    /// Order-independent form used to compare paths as multisets.
    pub fn signature(&self) -> (Vec<PathStep>, Vec<(usize, usize)>) {
        let mut steps = self.steps.clone();
        steps.sort();
        let mut deltas = self.deltas.clone();
        deltas.sort();
        (steps, deltas)
    }
}

impl fmt::Display for PathTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| match s {
                PathStep::Amplitude(a) => a.to_string(),
                PathStep::Gap(g) => format!("e^{{-κ(a{}-a{g})}}", g + 1),
            })
            .collect();
        parts.extend(self.deltas.iter().map(|(a, b)| format!("Δ{a}{b}")));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

/// Paths from source plate `source_plate` to observer plate `observer_plate`.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub source_plate: usize,
    pub observer_plate: usize,
    pub terms: Vec<PathTerm>,
}

/// Block `B_{ij}`: one component per (source plate, observer plate) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionEntry {
    pub source_slab: usize,
    pub observer_slab: usize,
    pub components: Vec<Component>,
}

/// Symbolic `B` matrix of a stack, evaluated on demand at one spectral point.
#[derive(Debug, Clone)]
pub struct RegionMatrix {
    n: usize,
    mode: Mode,
    sp: SpectralPoint,
    coeffs: Vec<Coefficients>,
    positions: Vec<f64>,
    /// `sub_deltas[first-1][last-1] = Δ_{first⋯last}`, 1 when `first >= last`.
    sub_deltas: Vec<Vec<f64>>,
    entries: Vec<Vec<RegionEntry>>,
}

fn product(a: &[PathTerm], b: &[PathTerm]) -> Vec<PathTerm> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.then(y))).collect()
}

fn gap(g: usize) -> Vec<PathTerm> {
    vec![PathTerm {
        steps: vec![PathStep::Gap(g)],
        deltas: Vec::new(),
    }]
}

/// `Δ` of plates `first..=last`; the unit term for bodies of fewer than two plates.
fn body_delta(first: usize, last: usize) -> Vec<PathTerm> {
    let mut t = PathTerm::unit();
    if last > first {
        t.deltas.push((first, last));
    }
    vec![t]
}

/// Reflection numerator of plates `first..=last` for a wave arriving from the right.
fn reflect_from_right(first: usize, last: usize) -> Vec<PathTerm> {
    (first..=last)
        .rev()
        .map(|m| {
            let mut steps = Vec::new();
            for j in (m + 1..=last).rev() {
                steps.push(PathStep::Amplitude(Amplitude::Transmission(j)));
                steps.push(PathStep::Gap(j - 1));
            }
            steps.push(PathStep::Amplitude(Amplitude::Reflection(m)));
            for j in m + 1..=last {
                steps.push(PathStep::Gap(j - 1));
                steps.push(PathStep::Amplitude(Amplitude::Transmission(j)));
            }
            let deltas = if m > first { vec![(first, m)] } else { Vec::new() };
            PathTerm { steps, deltas }
        })
        .collect()
}

/// Reflection numerator of plates `first..=last` for a wave arriving from the left.
fn reflect_from_left(first: usize, last: usize) -> Vec<PathTerm> {
    (first..=last)
        .map(|m| {
            let mut steps = Vec::new();
            for j in first..m {
                steps.push(PathStep::Amplitude(Amplitude::Transmission(j)));
                steps.push(PathStep::Gap(j));
            }
            steps.push(PathStep::Amplitude(Amplitude::Reflection(m)));
            for j in (first..m).rev() {
                steps.push(PathStep::Gap(j));
                steps.push(PathStep::Amplitude(Amplitude::Transmission(j)));
            }
            let deltas = if m < last { vec![(m, last)] } else { Vec::new() };
            PathTerm { steps, deltas }
        })
        .collect()
}

/// Transmission numerator of plates `first..=last`, traversed left to right.
fn transmit_rightward(first: usize, last: usize) -> Vec<PathTerm> {
    let mut steps = vec![PathStep::Amplitude(Amplitude::Transmission(first))];
    for j in first + 1..=last {
        steps.push(PathStep::Gap(j - 1));
        steps.push(PathStep::Amplitude(Amplitude::Transmission(j)));
    }
    vec![PathTerm {
        steps,
        deltas: Vec::new(),
    }]
}

fn transmit_leftward(first: usize, last: usize) -> Vec<PathTerm> {
    let mut steps = vec![PathStep::Amplitude(Amplitude::Transmission(last))];
    for j in (first..last).rev() {
        steps.push(PathStep::Gap(j));
        steps.push(PathStep::Amplitude(Amplitude::Transmission(j)));
    }
    vec![PathTerm {
        steps,
        deltas: Vec::new(),
    }]
}

fn component(p: usize, q: usize, terms: Vec<PathTerm>) -> Component {
    Component {
        source_plate: p,
        observer_plate: q,
        terms,
    }
}

/// Source-side and observer-side factors are listed left plate first for the
/// source and right plate first for the observer.
fn build_entry(n: usize, sigma: usize, o: usize) -> RegionEntry {
    let mut components = Vec::new();
    if sigma == o {
        let k = sigma;
        if k >= 1 {
            let rho_left = reflect_from_right(1, k);
            if k < n {
                let via = product(&product(&rho_left, &gap(k)), &reflect_from_left(k + 1, n));
                components.push(component(k, k + 1, via));
            }
            components.push(component(k, k, product(&rho_left, &body_delta(k + 1, n))));
        }
        if k < n {
            let rho_right = reflect_from_left(k + 1, n);
            components.push(component(k + 1, k + 1, product(&rho_right, &body_delta(1, k))));
            if k >= 1 {
                let via = product(&product(&rho_right, &gap(k)), &reflect_from_right(1, k));
                components.push(component(k + 1, k, via));
            }
        }
    } else {
        let (sources, through, observers) = if sigma > o {
            let mut sources = vec![(sigma, body_delta(sigma + 1, n))];
            if sigma < n {
                sources.push((sigma + 1, product(&reflect_from_left(sigma + 1, n), &gap(sigma))));
            }
            let mut observers = vec![(o + 1, body_delta(1, o))];
            if o >= 1 {
                observers.push((o, product(&gap(o), &reflect_from_right(1, o))));
            }
            (sources, transmit_leftward(o + 1, sigma), observers)
        } else {
            let mut sources = Vec::new();
            if sigma >= 1 {
                sources.push((sigma, product(&reflect_from_right(1, sigma), &gap(sigma))));
            }
            sources.push((sigma + 1, body_delta(1, sigma)));
            let mut observers = Vec::new();
            if o < n {
                observers.push((o + 1, product(&gap(o), &reflect_from_left(o + 1, n))));
            }
            observers.push((o, body_delta(o + 1, n)));
            (sources, transmit_rightward(sigma + 1, o), observers)
        };
        for (p, src) in &sources {
            let head = product(src, &through);
            for (q, obs) in &observers {
                components.push(component(*p, *q, product(&head, obs)));
            }
        }
    }
    RegionEntry {
        source_slab: sigma,
        observer_slab: o,
        components,
    }
}

impl RegionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn spectral_point(&self) -> &SpectralPoint {
        &self.sp
    }

    /// Block `B_{ij}`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> Result<&RegionEntry> {
        let size = self.n + 1;
        for index in [i, j] {
            if index == 0 || index > size {
                return Err(Error::IndexOutOfRange { index, max: size });
            }
        }
        Ok(&self.entries[i - 1][j - 1])
    }

    /// Common denominator `Δ_{1⋯N}`.
    pub fn denominator(&self) -> f64 {
        self.sub_deltas[0][self.n - 1]
    }

    /// Numerator value of one path term (without the outer exponentials).
    pub fn term_value(&self, term: &PathTerm) -> f64 {
        let amplitude: f64 = term.amplitudes().map(|a| a.eval(&self.coeffs)).product();
        let deltas: f64 = term
            .deltas
            .iter()
            .map(|&(a, b)| self.sub_deltas[a - 1][b - 1])
            .product();
        amplitude * deltas * self.sp.propagator(term.pathlength(&self.positions))
    }

    /// `B_{pq}` of one component.
    pub fn component_value(&self, c: &Component) -> f64 {
        c.terms.iter().map(|t| self.term_value(t)).sum::<f64>() / self.denominator()
    }

    /// Value of a block with a single component (the outer rows and columns).
    pub fn scalar(&self, i: usize, j: usize) -> Result<Option<f64>> {
        let entry = self.entry(i, j)?;
        Ok(match entry.components.as_slice() {
            [only] => Some(self.component_value(only)),
            _ => None,
        })
    }

    /// `B_{1,N+1}`: reflection for a wave arriving from the right.
    pub fn reflection_right(&self) -> f64 {
        self.component_value(&self.entries[0][self.n].components[0])
    }

    /// `B_{N+1,1}`: reflection for a wave arriving from the left.
    pub fn reflection_left(&self) -> f64 {
        self.component_value(&self.entries[self.n][0].components[0])
    }

    /// `B_{11}` (equal to `B_{N+1,N+1}`): transmission through the stack.
    pub fn transmission(&self) -> f64 {
        self.component_value(&self.entries[0][0].components[0])
    }

    fn slab(&self, z: f64) -> Result<usize> {
        if !z.is_finite() || self.positions.contains(&z) {
            return Err(Error::OnPlatePlane(z));
        }
        Ok(self.positions.iter().filter(|&&a| a < z).count())
    }

    /// Region label `(i, j)` of a query point.
    pub fn region(&self, z: f64, zprime: f64) -> Result<(usize, usize)> {
        Ok((self.n + 1 - self.slab(zprime)?, self.slab(z)? + 1))
    }

    /// `g(z, z′)` at the matrix's spectral point and mode.
    pub fn green(&self, z: f64, zprime: f64) -> Result<f64> {
        let (i, j) = self.region(z, zprime)?;
        let entry = &self.entries[i - 1][j - 1];
        let kappa = self.sp.kappa();
        let delta = self.denominator();
        let mut scattered = 0.0;
        for c in &entry.components {
            let outer = (zprime - self.positions[c.source_plate - 1]).abs()
                + (z - self.positions[c.observer_plate - 1]).abs();
            for term in &c.terms {
                let amplitude: f64 = term.amplitudes().map(|a| a.eval(&self.coeffs)).product();
                let deltas: f64 = term
                    .deltas
                    .iter()
                    .map(|&(a, b)| self.sub_deltas[a - 1][b - 1])
                    .product();
                let length = outer + term.pathlength(&self.positions);
                scattered += amplitude * deltas * (-kappa * length).exp();
            }
        }
        let free = if entry.source_slab == entry.observer_slab {
            (-kappa * (z - zprime).abs()).exp()
        } else {
            0.0
        };
        Ok((free + scattered / delta) / (2.0 * kappa))
    }
}

/// Region matrix of a stack of one to three plates.
pub fn region_matrix(stack: &Stack, mode: Mode, sp: &SpectralPoint) -> Result<RegionMatrix> {
    let n = stack.len();
    if n == 0 || n > MAX_PLATES {
        return Err(Error::UnsupportedN(n));
    }
    let coeffs = stack.coefficients(mode, sp)?;
    let mut sub_deltas = vec![vec![1.0; n]; n];
    for first in 1..=n {
        for last in first + 1..=n {
            let delta = delta_chain(&stack.sub(first, last)?, mode, sp)?;
            if !(delta > 0.0) {
                return Err(Error::DegenerateCavity(delta));
            }
            sub_deltas[first - 1][last - 1] = delta;
        }
    }
    let entries = (1..=n + 1)
        .map(|i| (1..=n + 1).map(|j| build_entry(n, n + 1 - i, j - 1)).collect())
        .collect();
    Ok(RegionMatrix {
        n,
        mode,
        sp: *sp,
        coeffs,
        positions: stack.positions(),
        sub_deltas,
        entries,
    })
}

/// `g^{N,mode}(z, z′)`.
pub fn greens_value(stack: &Stack, q: &GreensQuery) -> Result<f64> {
    region_matrix(stack, q.mode, &q.sp)?.green(q.z, q.zprime)
}

/// Region label `(i, j)` containing the query.
pub fn region_of(stack: &Stack, z: f64, zprime: f64) -> Result<(usize, usize)> {
    let n = stack.len();
    if n == 0 || n > MAX_PLATES {
        return Err(Error::UnsupportedN(n));
    }
    let positions = stack.positions();
    let slab = |x: f64| -> Result<usize> {
        if !x.is_finite() || positions.contains(&x) {
            return Err(Error::OnPlatePlane(x));
        }
        Ok(positions.iter().filter(|&&a| a < x).count())
    };
    Ok((n + 1 - slab(zprime)?, slab(z)? + 1))
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidStep(h))
    }
}

/// `true` if the closed interval `[lo, hi]` contains a plate or the source.
fn straddles(positions: &[f64], zprime: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&zprime) || positions.iter().any(|a| (lo..=hi).contains(a))
}

/// Absolute central-difference residual of `(-∂²_z + κ²) g` at `q.z`.
pub fn check_ode_residual(stack: &Stack, q: &GreensQuery, h: f64) -> Result<f64> {
    check_step(h)?;
    let matrix = region_matrix(stack, q.mode, &q.sp)?;
    if straddles(&matrix.positions, q.zprime, q.z - h, q.z + h) {
        return Err(Error::StraddlesPlateOrSource(q.z));
    }
    let g0 = matrix.green(q.z, q.zprime)?;
    let gp = matrix.green(q.z + h, q.zprime)?;
    let gm = matrix.green(q.z - h, q.zprime)?;
    let kappa = q.sp.kappa();
    Ok((-(gp - 2.0 * g0 + gm) / (h * h) + kappa * kappa * g0).abs())
}

/// One-sided extrapolation used for the limits `g(a_i ± 0)` and `∂g(a_i ± 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JumpStencil {
    /// Two points: `g ≈ g(h)`, `∂g ≈ (g(2h) - g(h))/h`; residuals fall as `O(h)`.
    FirstOrder,
    /// Three points: quadratic extrapolation; derivative residuals fall as `O(h²)`.
    #[default]
    SecondOrder,
}

impl JumpStencil {
    fn points(self) -> usize {
        match self {
            JumpStencil::FirstOrder => 2,
            JumpStencil::SecondOrder => 3,
        }
    }

    /// `(value, derivative along +z)` at the plate from samples at distances
    /// `h, 2h, 3h` on the side `sign`.
    fn limits(self, g: &[f64], h: f64, sign: f64) -> (f64, f64) {
        match self {
            JumpStencil::FirstOrder => (g[0], sign * (g[1] - g[0]) / h),
            JumpStencil::SecondOrder => (
                3.0 * g[0] - 3.0 * g[1] + g[2],
                sign * (-5.0 * g[0] + 8.0 * g[1] - 3.0 * g[2]) / (2.0 * h),
            ),
        }
    }
}

/// Residuals of the value-jump and derivative-jump relations at one plate, with
/// the convergence order observed between steps `h` and `h/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCheck {
    pub value_residual: f64,
    pub derivative_residual: f64,
    /// `None` when a residual is already at rounding level.
    pub value_order: Option<f64>,
    pub derivative_order: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Coupling {
    Finite(f64),
    Infinite,
}

/// Couplings entering the value jump and the derivative jump for `mode`.
fn jump_couplings(plate: &Plate, mode: Mode, zeta: f64) -> Result<(Coupling, Coupling)> {
    let (value, derivative) = match (plate.kind(), mode) {
        (PlateKind::PerfectE, Mode::H) | (PlateKind::PerfectM, Mode::E) => {
            (Coupling::Infinite, Coupling::Finite(0.0))
        }
        (PlateKind::PerfectE, Mode::E) | (PlateKind::PerfectM, Mode::H) => {
            (Coupling::Finite(0.0), Coupling::Infinite)
        }
        _ => {
            let (le, lg) = plate
                .couplings(zeta)?
                .ok_or_else(|| Error::InvalidPlate("missing couplings".into()))?;
            match mode {
                Mode::H => (Coupling::Finite(le), Coupling::Finite(zeta * zeta * lg)),
                Mode::E => (Coupling::Finite(lg), Coupling::Finite(zeta * zeta * le)),
            }
        }
    };
    Ok((value, derivative))
}

fn jump_residuals(
    matrix: &RegionMatrix,
    a: f64,
    zprime: f64,
    couplings: (Coupling, Coupling),
    h: f64,
    stencil: JumpStencil,
) -> Result<(f64, f64, f64)> {
    let m = stencil.points();
    let sample = |sign: f64| -> Result<Vec<f64>> {
        (1..=m)
            .map(|k| matrix.green(a + sign * k as f64 * h, zprime))
            .collect()
    };
    let above = sample(1.0)?;
    let below = sample(-1.0)?;
    let (g_plus, d_plus) = stencil.limits(&above, h, 1.0);
    let (g_minus, d_minus) = stencil.limits(&below, h, -1.0);

    let value_residual = match couplings.0 {
        Coupling::Finite(c) => (g_plus - g_minus) - 0.5 * c * (d_plus + d_minus),
        Coupling::Infinite => d_plus + d_minus,
    };
    let derivative_residual = match couplings.1 {
        Coupling::Finite(c) => (d_plus - d_minus) - 0.5 * c * (g_plus + g_minus),
        Coupling::Infinite => g_plus + g_minus,
    };
    let scale = above.iter().chain(&below).fold(0.0f64, |s, g| s.max(g.abs()));
    Ok((value_residual.abs(), derivative_residual.abs(), scale))
}

/// Jump-condition residuals at plate `i` with the default stencil.
pub fn check_jump_conditions(
    stack: &Stack,
    i: usize,
    zprime: f64,
    mode: Mode,
    sp: &SpectralPoint,
    h: f64,
) -> Result<JumpCheck> {
    check_jump_conditions_with(stack, i, zprime, mode, sp, h, JumpStencil::default())
}

/// Jump-condition residuals at plate `i`.
///
/// For mode H the value of `g` jumps by `(λe/2)(∂g₊ + ∂g₋)` and its derivative by
/// `ζ²(λg/2)(g₊ + g₋)`; mode E exchanges the couplings. Ideal plates use the
/// limiting forms (`∂g₊ + ∂g₋ = 0` or `g₊ + g₋ = 0`).
pub fn check_jump_conditions_with(
    stack: &Stack,
    i: usize,
    zprime: f64,
    mode: Mode,
    sp: &SpectralPoint,
    h: f64,
    stencil: JumpStencil,
) -> Result<JumpCheck> {
    check_step(h)?;
    stack.check_index(i)?;
    let matrix = region_matrix(stack, mode, sp)?;
    matrix.slab(zprime)?;
    let a = matrix.positions[i - 1];
    let reach = stencil.points() as f64 * h;
    let neighbours: Vec<f64> = matrix
        .positions
        .iter()
        .copied()
        .filter(|&x| x != a)
        .collect();
    if straddles(&neighbours, zprime, a - reach, a + reach) {
        return Err(Error::StraddlesPlateOrSource(a));
    }
    let couplings = jump_couplings(stack.plate(i)?, mode, sp.zeta())?;
    let (value_residual, derivative_residual, scale) =
        jump_residuals(&matrix, a, zprime, couplings, h, stencil)?;
    let (value_half, derivative_half, _) =
        jump_residuals(&matrix, a, zprime, couplings, 0.5 * h, stencil)?;

    let kappa = sp.kappa();
    let floor = 256.0 * f64::EPSILON * scale * (1.0 + kappa) / (0.5 * h);
    let order = |coarse: f64, fine: f64| {
        (coarse > floor && fine > floor).then(|| (coarse / fine).log2())
    };
    Ok(JumpCheck {
        value_residual,
        derivative_residual,
        value_order: order(value_residual, value_half),
        derivative_order: order(derivative_residual, derivative_half),
    })
}
