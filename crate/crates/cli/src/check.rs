//! Invariant suite behind the `check` command.

use casimir_core::greens::{region_matrix, MAX_PLATES};
use casimir_core::quadrature::{energy_per_area, pressure_on_plate, QuadratureSpec};
use casimir_core::scattering::{delta_chain, factorized_delta};
use casimir_core::{Mode, Result, SpectralPoint, Stack};

const FACTORIZATION_TOL: f64 = 1e-12;
const FORCE_ENERGY_TOL: f64 = 1e-6;
const RECIPROCITY_TOL: f64 = 1e-12;

pub(crate) struct CheckLine {
    name: &'static str,
    /// `None` when the property does not apply to this stack.
    passed: Option<bool>,
    detail: String,
}

pub(crate) struct CheckReport {
    lines: Vec<CheckLine>,
}

impl CheckReport {
    pub(crate) fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed != Some(false))
    }

    pub(crate) fn render(&self) -> String {
        self.lines
            .iter()
            .map(|l| {
                let status = match l.passed {
                    Some(true) => "PASS",
                    Some(false) => "FAIL",
                    None => "SKIP",
                };
                format!("{status} {}: {}\n", l.name, l.detail)
            })
            .collect()
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Spectral points spread around the inverse of the smallest gap.
fn grid(stack: &Stack) -> Vec<SpectralPoint> {
    let unit = stack.min_gap().map_or(1.0, |g| 1.0 / g);
    let mut points = Vec::new();
    for zeta in [0.0, 0.3, 1.7] {
        for kperp in [0.2, 1.0, 3.0] {
            points.push(SpectralPoint::new(zeta * unit, kperp * unit).expect("positive kappa"));
        }
    }
    points
}

fn line(name: &'static str, outcome: Result<(bool, String)>) -> CheckLine {
    match outcome {
        Ok((passed, detail)) => CheckLine {
            name,
            passed: Some(passed),
            detail,
        },
        Err(e) => CheckLine {
            name,
            passed: Some(false),
            detail: format!("evaluation failed: {e}"),
        },
    }
}

fn factorization(stack: &Stack) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for sp in grid(stack) {
        for mode in Mode::BOTH {
            let whole = delta_chain(stack, mode, &sp)?;
            for split in 1..stack.len() {
                worst = worst.max(relative(whole, factorized_delta(stack, split, mode, &sp)?));
                count += 1;
            }
        }
    }
    Ok((
        worst <= FACTORIZATION_TOL,
        format!("max relative deviation {worst:.3e} over {count} splits (tolerance {FACTORIZATION_TOL:e})"),
    ))
}

fn force_energy(stack: &Stack, spec: &QuadratureSpec) -> Result<(bool, String)> {
    let min_gap = stack.min_gap().expect("two or more plates");
    let h = 1e-4 * min_gap;
    let energy = energy_per_area(stack, spec)?.value;
    let scale_floor = energy.abs() / min_gap;
    let mut worst = 0.0f64;
    for i in 1..=stack.len() {
        let pressure = pressure_on_plate(stack, i, spec)?.value;
        let up = energy_per_area(&stack.with_plate_shifted(i, h)?, spec)?.value;
        let down = energy_per_area(&stack.with_plate_shifted(i, -h)?, spec)?.value;
        let fd = -(up - down) / (2.0 * h);
        worst = worst.max((pressure - fd).abs() / pressure.abs().max(scale_floor));
    }
    Ok((
        worst <= FORCE_ENERGY_TOL,
        format!(
            "max relative deviation {worst:.3e} over {} plates, step {h:.3e} (tolerance {FORCE_ENERGY_TOL:e})",
            stack.len()
        ),
    ))
}

fn mode_swap(stack: &Stack, spec: &QuadratureSpec) -> Result<(bool, String)> {
    let swapped = stack.swapped();
    let mut exact = true;
    for sp in grid(stack) {
        exact &= stack.coefficients(Mode::E, &sp)? == swapped.coefficients(Mode::H, &sp)?;
        exact &= stack.coefficients(Mode::H, &sp)? == swapped.coefficients(Mode::E, &sp)?;
    }
    let mut detail = format!("coefficients {}", if exact { "identical" } else { "differ" });
    if stack.len() >= 2 {
        let a = energy_per_area(stack, spec)?.value;
        let b = energy_per_area(&swapped, spec)?.value;
        exact &= a == b;
        detail.push_str(&format!("; energies {a:.16e} and {b:.16e}"));
    }
    Ok((exact, detail))
}

fn slab_points(stack: &Stack) -> Vec<f64> {
    let a = stack.positions();
    let n = a.len();
    let outer = stack.min_gap().unwrap_or(1.0);
    let mut points = vec![a[0] - 0.7 * outer, a[0] - 0.2 * outer];
    for s in 1..n {
        let w = a[s] - a[s - 1];
        points.push(a[s - 1] + 0.3 * w);
        points.push(a[s - 1] + 0.8 * w);
    }
    points.push(a[n - 1] + 0.25 * outer);
    points.push(a[n - 1] + 0.9 * outer);
    points
}

fn reciprocity(stack: &Stack) -> Result<(bool, String)> {
    let points = slab_points(stack);
    let mut worst = 0.0f64;
    for sp in grid(stack) {
        for mode in Mode::BOTH {
            let m = region_matrix(stack, mode, &sp)?;
            for &z in &points {
                for &zp in &points {
                    worst = worst.max(relative(m.green(z, zp)?, m.green(zp, z)?));
                }
            }
        }
    }
    Ok((
        worst <= RECIPROCITY_TOL,
        format!("max relative asymmetry {worst:.3e} (tolerance {RECIPROCITY_TOL:e})"),
    ))
}

pub(crate) fn run_checks(stack: &Stack, spec: &QuadratureSpec) -> CheckReport {
    let n = stack.len();
    let skip = |name, why: &str| CheckLine {
        name,
        passed: None,
        detail: why.to_string(),
    };
    let mut lines = Vec::new();
    if n >= 2 {
        lines.push(line("factorization", factorization(stack)));
        lines.push(line("force-energy", force_energy(stack, spec)));
    } else {
        lines.push(skip("factorization", "needs at least two plates"));
        lines.push(skip("force-energy", "needs at least two plates"));
    }
    lines.push(line("mode-swap", mode_swap(stack, spec)));
    if n <= MAX_PLATES {
        lines.push(line("reciprocity", reciprocity(stack)));
    } else {
        lines.push(skip("reciprocity", "closed-form Green's functions exist for at most 3 plates"));
    }
    CheckReport { lines }
}
