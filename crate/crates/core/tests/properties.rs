use std::f64::consts::{FRAC_PI_4, PI};

use proptest::prelude::*;
use spinorlz::crossing::{self, ParabolicParams};
use spinorlz::interferometer::{self, InterferometerConfig};
use spinorlz::{lift, lift_diagonal_phase, Complex64, TwoLevelPropagator};

fn su2(a: [f64; 4]) -> Option<TwoLevelPropagator> {
    let n = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n > 1e-3).then(|| TwoLevelPropagator::new(Complex64::new(a[0] / n, a[1] / n), Complex64::new(a[2] / n, a[3] / n)).unwrap())
}

proptest! {
    #[test]
    fn lift_is_unitary_with_unit_rows(a in prop::array::uniform4(-1.0f64..1.0), levels in 2usize..9) {
        prop_assume!(su2(a).is_some());
        let m = lift(&su2(a).unwrap(), levels).unwrap();
        prop_assert!(m.unitarity_defect() < 1e-11);
        for row in m.populations() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn end_to_end_probability_is_power_of_two_level(a in prop::array::uniform4(-1.0f64..1.0), levels in 2usize..8) {
        prop_assume!(su2(a).is_some());
        let p = su2(a).unwrap();
        let m = lift(&p, levels).unwrap();
        let expected = p.beta.norm_sqr().powi(levels as i32 - 1);
        prop_assert!((m[(levels - 1, 0)].norm_sqr() - expected).abs() < 1e-12);
    }

    #[test]
    fn diagonal_phase_lifts_like_su2(sigma in -40.0f64..40.0, levels in 2usize..7) {
        let half = Complex64::from_polar(1.0, -sigma / 2.0);
        let p = TwoLevelPropagator::new(half, Complex64::new(0.0, 0.0)).unwrap();
        prop_assert!(lift_diagonal_phase(sigma, levels).unwrap().max_abs_diff(&lift(&p, levels).unwrap()) < 1e-12);
    }

    #[test]
    fn double_crossing_closed_form_matches_composition(r in 0.0f64..1.0, phi in 0.0f64..FRAC_PI_4, sigma in -60.0f64..60.0) {
        let a = crossing::compose_double_crossing(r, phi, sigma);
        let b = crossing::double_crossing_closed_form(r, phi, sigma);
        prop_assert!(a.matrix().max_abs_diff(&b.matrix()) < 1e-12);
        let p = crossing::transition_prob_closed_form(r, phi, sigma);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((p - b.transition_probability()).abs() < 1e-12);
    }

    #[test]
    fn spin_one_probability_is_square_of_two_level(eps in 0.1f64..10.0, mu in 0.5f64..20.0) {
        let p = ParabolicParams::new(eps, mu).unwrap();
        let p2 = crossing::transition_prob_2level(&p).unwrap();
        prop_assert!((crossing::transition_prob_1_to_3(&p).unwrap() - p2 * p2).abs() < 1e-12);
    }

    #[test]
    fn interferometer_population_is_probability(
        r in 0.01f64..0.99, phi in 0.0f64..FRAC_PI_4, sigma in -50.0f64..50.0,
        t1 in -PI..PI, tm in -PI..PI,
    ) {
        let c = InterferometerConfig::new(r, phi, sigma, t1, tm).unwrap();
        let p = interferometer::population_1_to_m1(&c).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        let u = interferometer::total_propagator(&c).unwrap();
        prop_assert!(u.unitarity_defect() < 1e-12);
        prop_assert!((u[(2, 0)].norm_sqr() - p).abs() < 1e-12);
    }

    #[test]
    fn stokes_phase_stays_in_range(lambda in 0.0f64..100.0) {
        let phi = crossing::lz_phase(lambda).unwrap();
        prop_assert!(phi > 0.0 && phi <= FRAC_PI_4 + 1e-15);
    }
}
