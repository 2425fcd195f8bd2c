use casimir_core::greens::region_matrix;
use casimir_core::scattering::{combine, composite, composite_right_fold, delta_chain, factorized_delta};
use casimir_core::{coefficients, CompositeCoefficients, Mode, Plate, SpectralPoint, Stack};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn plate_kind() -> impl Strategy<Value = (u8, f64, f64)> {
    (0u8..4, 0.0..10.0f64, 0.0..10.0f64)
}

fn build(kinds: &[(u8, f64, f64)], gaps: &[f64]) -> Stack {
    let mut z = 0.0;
    let plates = kinds
        .iter()
        .enumerate()
        .map(|(k, &(kind, le, lg))| {
            if k > 0 {
                z += gaps[k - 1];
            }
            match kind {
                0 => Plate::perfect_e(z),
                1 => Plate::perfect_m(z),
                _ => Plate::magnetodielectric(z, le, lg),
            }
            .unwrap()
        })
        .collect();
    Stack::new(plates).unwrap()
}

fn stack(max_n: usize) -> impl Strategy<Value = Stack> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(plate_kind(), n),
                prop::collection::vec(0.1..5.0f64, n.saturating_sub(1)),
            )
        })
        .prop_map(|(kinds, gaps)| build(&kinds, &gaps))
}

fn spectral_point() -> impl Strategy<Value = SpectralPoint> {
    (0.0..5.0f64, 0.01..5.0f64).prop_map(|(zeta, extra)| SpectralPoint::from_zeta_kappa(zeta, zeta + extra).unwrap())
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::H), Just(Mode::E)]
}

proptest! {
    #[test]
    fn factorization_holds_at_every_split(s in stack(7), sp in spectral_point(), m in mode()) {
        prop_assume!(s.len() >= 2);
        let whole = delta_chain(&s, m, &sp).unwrap();
        prop_assert!(rel(whole, composite(&s, m, &sp).unwrap().delta) <= 1e-12);
        for split in 1..s.len() {
            prop_assert!(rel(whole, factorized_delta(&s, split, m, &sp).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn mode_swap_is_exact(s in stack(5), sp in spectral_point()) {
        let swapped = s.swapped();
        for m in Mode::BOTH {
            prop_assert_eq!(s.coefficients(m, &sp).unwrap(), swapped.coefficients(m.other(), &sp).unwrap());
            prop_assert_eq!(composite(&s, m, &sp).unwrap(), composite(&swapped, m.other(), &sp).unwrap());
        }
    }

    #[test]
    fn plates_and_composites_are_passive(s in stack(6), sp in spectral_point(), m in mode()) {
        for c in s.coefficients(m, &sp).unwrap() {
            prop_assert!(c.r * c.r + c.t * c.t <= 1.0 + 1e-12);
        }
        let c = composite(&s, m, &sp).unwrap();
        prop_assert!(c.r_left.abs() <= 1.0 + 1e-12);
        prop_assert!(c.r_right.abs() <= 1.0 + 1e-12);
        prop_assert!(c.t.abs() <= 1.0 + 1e-12);
        prop_assert!(c.delta > 0.0);
    }

    #[test]
    fn electric_stacks_have_delta_at_most_one(
        couplings in prop::collection::vec(0.0..10.0f64, 2..7),
        gaps in prop::collection::vec(0.1..5.0f64, 6),
        sp in spectral_point(),
        m in mode(),
    ) {
        let kinds: Vec<_> = couplings.iter().map(|&le| (2u8, le, 0.0)).collect();
        let s = build(&kinds, &gaps);
        prop_assert!(delta_chain(&s, m, &sp).unwrap() <= 1.0 + 1e-15);
    }

    #[test]
    fn fold_order_does_not_matter(s in stack(6), sp in spectral_point(), m in mode()) {
        prop_assume!(s.len() >= 2);
        let left = composite(&s, m, &sp).unwrap();
        let right = composite_right_fold(&s, m, &sp).unwrap();
        // |r|, |t| ≤ 1, so absolute differences are the meaningful measure
        prop_assert!((left.r_left - right.r_left).abs() <= 1e-12);
        prop_assert!((left.r_right - right.r_right).abs() <= 1e-12);
        prop_assert!((left.t - right.t).abs() <= 1e-12);
        prop_assert!(rel(left.delta, right.delta) <= 1e-12);
    }

    #[test]
    fn electric_plate_satisfies_r_plus_t_equal_one(le in 0.0..100.0f64, sp in spectral_point()) {
        let plate = Plate::magnetodielectric(0.0, le, 0.0).unwrap();
        let c = coefficients(&plate, Mode::H, &sp).unwrap();
        prop_assert!((c.r + c.t - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn single_plate_composite_is_the_plate(kind in plate_kind(), sp in spectral_point(), m in mode()) {
        let s = build(&[kind], &[]);
        let c = composite(&s, m, &sp).unwrap();
        prop_assert_eq!(c, CompositeCoefficients::from(s.coefficients(m, &sp).unwrap()[0]));
    }

    #[test]
    fn vacuum_plate_only_propagates(kind in plate_kind(), sp in spectral_point(), m in mode(), gap in 0.1..5.0f64) {
        let c = composite(&build(&[kind], &[]), m, &sp).unwrap();
        let vacuum = CompositeCoefficients::from(coefficients(&Plate::vacuum(gap).unwrap(), m, &sp).unwrap());
        let joined = combine(&c, &vacuum, gap, &sp).unwrap();
        prop_assert!((joined.t - c.t * sp.propagator(gap)).abs() <= 1e-15);
        prop_assert_eq!(joined.r_left, c.r_left);
        prop_assert_eq!(joined.delta, 1.0);
    }

    #[test]
    fn greens_function_is_reciprocal(
        s in stack(3),
        sp in spectral_point(),
        m in mode(),
        fz in 0.05..0.95f64,
        fzp in 0.05..0.95f64,
        below in 0.1..2.0f64,
        above in 0.1..2.0f64,
    ) {
        let a = s.positions();
        let n = a.len();
        let mut points = vec![a[0] - below, a[n - 1] + above];
        for w in a.windows(2) {
            points.push(w[0] + fz * (w[1] - w[0]));
            points.push(w[0] + fzp * (w[1] - w[0]));
        }
        let g = region_matrix(&s, m, &sp).unwrap();
        for &z in &points {
            for &zp in &points {
                prop_assert!(rel(g.green(z, zp).unwrap(), g.green(zp, z).unwrap()) <= 1e-12);
            }
        }
    }
}
