//! Globally adaptive Gauss–Kronrod (10/21) quadrature with open nodes only.
//!
//! Semi-infinite ranges are mapped onto `(0, 1)` first. Refinement proceeds in
//! rounds: every panel whose error exceeds its fair share of the tolerance is
//! bisected, the new panels are evaluated (in parallel when enabled), and the
//! total is re-summed pairwise in panel order. The result is therefore the same
//! whatever the thread count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;

/// Variable substitution used to map `[lower, ∞)` onto `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Substitution {
    /// `x = lower - scale · ln u`
    ExpMap,
    /// `x = lower + scale · u / (1 - u)`
    RationalMap,
}

/// Tolerances, budget and mapping for the quadrature routines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of panels in one adaptive integral.
    pub max_subdivisions: usize,
    pub substitution: Substitution,
    /// Length of the mapping in units of the integration variable; the energy
    /// routines replace it by `1 / min_gap`.
    pub scale: f64,
    /// Evaluate panels on the rayon pool (no effect without the `parallel` feature).
    pub parallel: bool,
    /// Use the general (ζ, κ) integral even when every plate is κ-only.
    pub force_general: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_subdivisions: 2000,
            substitution: Substitution::ExpMap,
            scale: 1.0,
            parallel: true,
            force_general: false,
        }
    }
}

impl QuadratureSpec {
    /// Defaults for the two-dimensional (ζ, κ) integrals.
    pub fn general_default() -> Self {
        Self {
            rel_tol: 1e-7,
            ..Self::default()
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidQuadratureSpec(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::InvalidQuadratureSpec(format!(
                "abs_tol must be non-negative, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidQuadratureSpec(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidQuadratureSpec(format!(
                "scale must be positive and finite, got {}",
                self.scale
            )));
        }
        Ok(())
    }
}

/// Value of a definite integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// 21-point Kronrod abscissae (non-negative half) with the embedded 10-point
// Gauss rule on the odd entries.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_613,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// One Gauss–Kronrod 21 panel with the usual QUADPACK error rescaling.
fn gk21<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteIntegrand(x))
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, error })
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub(crate) fn adaptive<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    let mut panels = vec![gk21(f, a, b)?];
    let mut evaluations = 21;

    loop {
        let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
        let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
        let value = exec::pairwise_sum(&values);
        let error = exec::pairwise_sum(&errors);
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= tol {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(Error::QuadratureNotConverged {
                estimate: value,
                error,
                evaluations,
            });
        }

        // Split every panel above its share of the tolerance, worst first, within budget.
        let share = tol / panels.len() as f64;
        let mut order: Vec<usize> = (0..panels.len()).filter(|&i| panels[i].error > share).collect();
        order.sort_by(|&i, &j| panels[j].error.total_cmp(&panels[i].error).then(i.cmp(&j)));
        let budget = spec.max_subdivisions - panels.len();
        order.truncate(budget.max(1));
        order.sort_unstable();

        let halves: Vec<(f64, f64)> = order
            .iter()
            .flat_map(|&i| {
                let p = panels[i];
                let mid = 0.5 * (p.a + p.b);
                [(p.a, mid), (mid, p.b)]
            })
            .collect();
        let fresh = exec::map(&halves, spec.parallel, |&(lo, hi)| gk21(f, lo, hi));
        evaluations += 21 * fresh.len();
        let mut fresh = fresh.into_iter();

        let mut next = Vec::with_capacity(panels.len() + order.len());
        let mut split = order.iter().peekable();
        for (i, p) in panels.iter().enumerate() {
            if split.peek() == Some(&&i) {
                split.next();
                next.push(fresh.next().expect("two halves per split")?);
                next.push(fresh.next().expect("two halves per split")?);
            } else {
                next.push(*p);
            }
        }
        panels = next;
    }
}

/// `∫_lower^∞ f(x) dx` after mapping to `(0, 1)`; `f` is never evaluated at `lower`.
pub fn integrate_semi_infinite<F>(f: F, lower: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_semi_infinite_fallible(|x| Ok(f(x)), lower, spec)
}

pub(crate) fn integrate_semi_infinite_fallible<F>(
    f: F,
    lower: f64,
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    if !lower.is_finite() {
        return Err(Error::InvalidQuadratureSpec(format!(
            "lower limit must be finite, got {lower}"
        )));
    }
    let scale = spec.scale;
    match spec.substitution {
        Substitution::ExpMap => {
            let g = |u: f64| -> Result<f64> {
                let x = lower - scale * u.ln();
                let y = f(x)?;
                Ok(if y == 0.0 { 0.0 } else { y * scale / u })
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
        Substitution::RationalMap => {
            let g = |u: f64| -> Result<f64> {
                let w = 1.0 - u;
                let x = lower + scale * u / w;
                let y = f(x)?;
                Ok(if y == 0.0 { 0.0 } else { y * scale / (w * w) })
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn single_panel_is_exact_for_polynomials() {
        // Kronrod 21 integrates degree 31 exactly.
        let p = gk21(&|x: f64| Ok(x.powi(20) - 3.0 * x.powi(7) + 1.0), -1.0, 2.0).unwrap();
        let exact = (2f64.powi(21) + 1.0) / 21.0 - 3.0 * (2f64.powi(8) - 1.0) / 8.0 + 3.0;
        assert!((p.value - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn exponential_decay() {
        for sub in [Substitution::ExpMap, Substitution::RationalMap] {
            let s = QuadratureSpec {
                substitution: sub,
                ..spec()
            };
            let r = integrate_semi_infinite(|x| (-x).exp(), 0.0, &s).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9, "{sub:?}: {}", r.value);
            assert!(r.error >= 0.0);
        }
    }

    #[test]
    fn perfect_conductor_energy_kernel() {
        // ∫ x² ln(1 - e^{-2x}) dx = -π⁴/360
        let r = integrate_semi_infinite(|x| x * x * (-(-2.0 * x).exp()).ln_1p(), 0.0, &spec()).unwrap();
        let exact = -PI.powi(4) / 360.0;
        assert!((r.value - exact).abs() < 1e-9 * exact.abs(), "{}", r.value);
    }

    #[test]
    fn perfect_conductor_force_kernel() {
        // ∫ x³ e^{-2x} / (1 - e^{-2x}) dx = π⁴/240
        let r = integrate_semi_infinite(
            |x| {
                let e = (-2.0 * x).exp();
                x.powi(3) * e / (1.0 - e)
            },
            0.0,
            &spec(),
        )
        .unwrap();
        let exact = PI.powi(4) / 240.0;
        assert!((r.value - exact).abs() < 1e-9 * exact, "{}", r.value);
    }

    #[test]
    fn shifted_lower_limit() {
        let r = integrate_semi_infinite(|x| (-2.0 * x).exp(), 1.5, &spec()).unwrap();
        let exact = 0.5 * (-3.0f64).exp();
        assert!((r.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn zero_integrand_converges_immediately() {
        let r = integrate_semi_infinite(|_| 0.0, 0.0, &spec()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.evaluations, 21);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let s = QuadratureSpec {
            max_subdivisions: 1,
            rel_tol: 1e-14,
            ..spec()
        };
        match integrate_semi_infinite(|x| x.sqrt() * (-x).exp(), 0.0, &s) {
            Err(Error::QuadratureNotConverged { estimate, .. }) => {
                assert!((estimate - PI.sqrt() / 2.0).abs() < 1e-2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = integrate_semi_infinite(|x| if x < 1.0 { f64::NAN } else { 0.0 }, 0.0, &spec());
        assert!(matches!(r, Err(Error::NonFiniteIntegrand(_))));
    }

    #[test]
    fn invalid_specs() {
        for bad in [
            QuadratureSpec { rel_tol: 0.0, ..spec() },
            QuadratureSpec { abs_tol: -1.0, ..spec() },
            QuadratureSpec { max_subdivisions: 0, ..spec() },
            QuadratureSpec { scale: f64::INFINITY, ..spec() },
        ] {
            assert!(integrate_semi_infinite(|x| (-x).exp(), 0.0, &bad).is_err());
        }
    }

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let f = |x: f64| x.powi(3) * (-x).exp() * (3.0 * x).sin().powi(2);
        let a = integrate_semi_infinite(f, 0.0, &spec().with_rel_tol(1e-12)).unwrap();
        let b = integrate_semi_infinite(f, 0.0, &spec().with_rel_tol(1e-12).sequential()).unwrap();
        assert_eq!(a, b);
    }
}
