use halfwave::analysis::random_field;
use halfwave::spectral::{
    cubic_term, half_wave_propagator, hs_inner, hs_norm, hs_norm_sq, project_neg, project_nonneg,
    SobolevIndex,
};
use halfwave::szego::{make_params, FamilyBranch, SzegoParams};
use halfwave::SpectralField;
use num_complex::Complex64;
use proptest::prelude::*;

fn field(k: usize, seed: u64) -> SpectralField {
    random_field(k, 0.3, seed, 0)
}

fn gap(a: &SpectralField, b: &SpectralField) -> f64 {
    let k = a.max_mode().max(b.max_mode()) as i64;
    (-k..=k)
        .map(|m| (a.get(m) - b.get(m)).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projectors_split_the_field(k in 1usize..40, seed in any::<u64>()) {
        let f = field(k, seed);
        let (p, n) = (project_nonneg(&f), project_neg(&f));
        prop_assert_eq!(&(&p + &n), &f);
        prop_assert_eq!(&project_nonneg(&p), &p);
        prop_assert!(hs_inner(&p, &n, SobolevIndex::of(0.7)).norm() == 0.0);
    }

    #[test]
    fn propagator_is_a_unitary_group(k in 1usize..40, seed in any::<u64>(), t in -5.0f64..5.0, r in -5.0f64..5.0) {
        let f = field(k, seed);
        let sg = SobolevIndex::of(0.4);
        let ft = half_wave_propagator(&f, t);
        prop_assert!((hs_norm(&ft, sg) - hs_norm(&f, sg)).abs() <= 1e-13 * hs_norm(&f, sg));
        let two = half_wave_propagator(&ft, r);
        let once = half_wave_propagator(&f, t + r);
        prop_assert!(gap(&two, &once) <= 1e-13);
    }

    #[test]
    fn grid_round_trip(k in 1usize..60, seed in any::<u64>(), pad in 0usize..50) {
        let f = field(k, seed);
        let n = 2 * k + 1 + pad;
        let back = SpectralField::from_grid(f.to_grid(n), k);
        prop_assert!(gap(&back, &f) <= 1e-14);
    }

    #[test]
    fn norms_increase_with_regularity(k in 1usize..40, seed in any::<u64>(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let f = field(k, seed);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(hs_norm_sq(&f, SobolevIndex::of(lo)) <= hs_norm_sq(&f, SobolevIndex::of(hi)) * (1.0 + 1e-15));
    }

    #[test]
    fn csv_round_trip_is_exact(k in 1usize..30, seed in any::<u64>()) {
        let f = field(k, seed);
        let back = SpectralField::from_csv(f.to_csv().as_bytes()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn params_json_round_trip(eps in 1e-6f64..0.9, s in 0.01f64..0.49, second in any::<bool>()) {
        let branch = if second { FamilyBranch::Second } else { FamilyBranch::First };
        let p = make_params(eps, s, branch).unwrap();
        let back = SzegoParams::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn cubic_term_matches_direct_convolution() {
    let k = 6usize;
    let (u, v, w) = (field(k, 1), field(k, 2), field(k, 3));
    let got = cubic_term(&u, &v, &w);
    let ki = k as i64;
    for m in -ki..=ki {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in -ki..=ki {
            for b in -ki..=ki {
                // u_a conj(v_b) w_c with a - b + c = m
                let c = m - a + b;
                acc += u.get(a) * v.get(b).conj() * w.get(c);
            }
        }
        assert!((got.get(m) - acc).norm() < 1e-13, "mode {m}");
    }
}
