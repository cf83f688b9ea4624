use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stochastic_channel::dirichlet::{dirichlet_lift, lift_norm_ratio, BoundaryDatum};
use stochastic_channel::spectral::{
    bilinear_b, divergence, from_streamfunction, leray_project, ChannelGrid, ScalarField, StokesStepper, TimeScheme, VelocityField,
};
use stochastic_channel::testing::{random_smooth_field, random_solenoidal, FieldRecipe};

fn grid() -> ChannelGrid {
    ChannelGrid::with_dims(16, 33, 1.0).unwrap()
}

fn diff(a: &VelocityField, b: &VelocityField) -> f64 {
    (a - b).l2_norm() / a.l2_norm().max(b.l2_norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_smooth_field(&g, &mut rng, 5, 6);
        let h = random_smooth_field(&g, &mut rng, 5, 6);
        let lhs = leray_project(&(&f.scale(a) + &h.scale(b)));
        let rhs = &leray_project(&f).scale(a) + &leray_project(&h).scale(b);
        prop_assert!(diff(&lhs, &rhs) < 1e-12);
        prop_assert!(divergence(&lhs).l2_norm() < 1e-8 * lhs.l2_norm().max(1.0));
    }

    #[test]
    fn bilinear_term_is_bilinear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_solenoidal(&g, &mut rng, FieldRecipe::default());
        let v = random_solenoidal(&g, &mut rng, FieldRecipe::default());
        let w = random_solenoidal(&g, &mut rng, FieldRecipe::default());
        let lhs = bilinear_b(&(&u.scale(a) + &w), &v);
        let rhs = &bilinear_b(&u, &v).scale(a) + &bilinear_b(&w, &v);
        prop_assert!(diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn stokes_step_is_linear_hermitian_and_no_slip(seed in any::<u64>(), dt in 1e-4f64..1e-1) {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_solenoidal(&g, &mut rng, FieldRecipe::no_slip());
        let f = random_smooth_field(&g, &mut rng, 4, 5);
        let s = StokesStepper::new(&g, dt, TimeScheme::CrankNicolson).unwrap();
        let out = s.step(&v, Some(&f));
        prop_assert_eq!(out.hermitian_defect(), 0.0);
        prop_assert!(out.wall_values() < 1e-10);
        prop_assert!(divergence(&out).l2_norm() < 1e-8);
        let sum = s.step(&(&v + &v), Some(&f.scale(2.0)));
        prop_assert!(diff(&sum, &out.scale(2.0)) < 1e-12);
    }

    #[test]
    fn lift_has_the_right_traces(seed in any::<u64>(), n in 1i64..7) {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_smooth_field(&g, &mut rng, 1, 1).mode1(1)[0];
        let datum = BoundaryDatum::single_mode(n, c);
        let u = dirichlet_lift(&datum, &g).unwrap();
        let top = g.n_z() - 1;
        let slot = g.slot(n);
        prop_assert!((u.mode1(slot)[top] - c).norm() < 1e-12 * c.norm().max(1.0));
        prop_assert!(u.mode2(slot)[top].norm() < 1e-12);
        prop_assert!(u.mode1(slot)[0].norm() < 1e-12 && u.mode2(slot)[0].norm() < 1e-12);
        prop_assert!(divergence(&u).l2_norm() < 1e-8 * u.l2_norm().max(1.0));
    }
}

#[test]
fn half_steps_agree_to_second_order() {
    // One step of size dt vs two of size dt/2: the gap shrinks like dt².
    let g = ChannelGrid::with_dims(16, 33, 1.0).unwrap();
    let pi = std::f64::consts::PI;
    let psi = ScalarField::from_fn(&g, |x, z| x.cos() * (pi * z).sin().powi(4));
    let v = &from_streamfunction(&psi) + &VelocityField::from_fn(&g, |_, z| (pi * z).sin(), |_, _| 0.0);
    let gap = |dt: f64| {
        let full = StokesStepper::new(&g, dt, TimeScheme::ImplicitEuler).unwrap();
        let half = StokesStepper::new(&g, dt / 2.0, TimeScheme::ImplicitEuler).unwrap();
        (&full.step(&v, None) - &half.step(&half.step(&v, None), None)).l2_norm()
    };
    let gaps: Vec<f64> = [4e-4, 2e-4, 1e-4].iter().map(|&dt| gap(dt)).collect();
    for w in gaps.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "gaps {gaps:?}");
    }
}

#[test]
fn lift_ratio_is_bounded_over_modes() {
    let g = ChannelGrid::with_dims(256, 65, 1.0).unwrap();
    let ratios: Vec<f64> = (1..=64)
        .map(|n| lift_norm_ratio(&BoundaryDatum::single_mode(n, Complex64::new(1.0, 0.0)), &g).unwrap())
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(ratios.iter().all(|r| r.is_finite()));
    // the ratio settles: the top quarter of the sweep varies by under 5%
    let tail = &ratios[48..];
    let (tlo, thi) = tail.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(thi / tlo < 1.05, "tail {tlo}..{thi}");
    assert!(hi / lo < 3.0, "sweep {lo}..{hi}");
    let doubled = BoundaryDatum::single_mode(7, Complex64::new(2.0, 0.0));
    assert!((lift_norm_ratio(&doubled, &g).unwrap() - ratios[6]).abs() < 1e-12 * ratios[6]);
}
