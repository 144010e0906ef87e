use halfwave::evolve::{
    evolve, step_half_wave, ConservedSnapshot, Equation, EvolverConfig, Scheme,
};
use halfwave::spectral::{half_wave_propagator, hs_norm, SobolevIndex};
use halfwave::szego::{make_params, szego_coeffs, FamilyBranch};
use halfwave::SpectralField;
use num_complex::Complex64;

fn family_data(eps: f64, s: f64) -> (SpectralField, usize) {
    let params = make_params(eps, s, FamilyBranch::First).unwrap();
    let k = params.required_modes();
    (szego_coeffs(&params, 0.0, k).unwrap(), k)
}

fn half_wave_at(u0: &SpectralField, dt: f64, t_end: f64) -> SpectralField {
    let cfg = EvolverConfig {
        record_every: usize::MAX >> 1,
        ..EvolverConfig::new(u0.max_mode(), dt, t_end, Scheme::StrangSplit)
    };
    evolve(u0, cfg, Equation::HalfWave).unwrap().final_state
}

#[test]
fn strang_splitting_is_second_order() {
    let (u0, _) = family_data(0.25, 0.3);
    let reference = half_wave_at(&u0, 1.25e-4, 0.5);
    let err = |dt: f64| {
        hs_norm(
            &(&half_wave_at(&u0, dt, 0.5) - &reference),
            SobolevIndex::L2,
        )
    };
    let (e1, e2) = (err(1e-2), err(5e-3));
    let ratio = e1 / e2;
    assert!(
        (ratio - 4.0).abs() < 0.3,
        "Richardson ratio {ratio} ({e1:e}, {e2:e})"
    );
}

#[test]
fn half_wave_energy_drift_is_small() {
    let (u0, k) = family_data(0.25, 0.3);
    let cfg = EvolverConfig {
        record_every: 20,
        ..EvolverConfig::new(k, 1e-3, 1.0, Scheme::StrangSplit)
    };
    let traj = evolve(&u0, cfg, Equation::HalfWave).unwrap();
    let e0 = traj.snapshots[0].hw_energy;
    let p0 = traj.snapshots[0].momentum;
    for s in &traj.snapshots {
        assert!(
            (s.hw_energy - e0).abs() <= 1e-6 * e0,
            "energy drift at t={}",
            s.t
        );
        assert!(s.mass >= 0.0);
        // data supported on k >= 0 keeps momentum close to the mass-like sum
        assert!(s.momentum.is_finite() && p0 > 0.0);
    }
}

#[test]
fn szego_conserves_momentum_and_energy() {
    let (v0, k) = family_data(0.25, 0.3);
    let run = |dt: f64| {
        let cfg = EvolverConfig {
            record_every: 50,
            ..EvolverConfig::new(k, dt, 1.0, Scheme::Rk4Spectral)
        };
        let traj = evolve(&v0, cfg, Equation::Szego).unwrap();
        let first = traj.snapshots[0];
        let last = *traj.snapshots.last().unwrap();
        assert_eq!(last.t, 1.0);
        (
            (last.momentum - first.momentum).abs() / first.momentum,
            (last.szego_energy - first.szego_energy).abs() / first.szego_energy,
            (last.mass - first.mass).abs() / first.mass,
        )
    };
    let coarse = run(2e-2);
    let fine = run(1e-2);
    for (c, f) in [(coarse.0, fine.0), (coarse.1, fine.1), (coarse.2, fine.2)] {
        assert!(c < 1e-5 && c / f > 10.0, "{coarse:?} {fine:?}");
    }
    let production = run(1e-3);
    assert!(
        production.0.max(production.1).max(production.2) < 1e-9,
        "{production:?}"
    );
}

#[test]
fn tiny_data_follows_the_free_flow() {
    let (u0, k) = family_data(0.25, 0.3);
    let u0 = u0.scale(Complex64::new(1e-6, 0.0));
    let cfg = EvolverConfig {
        record_every: 1,
        ..EvolverConfig::new(k, 1e-2, 1.0, Scheme::StrangSplit)
    };
    let mut integ = halfwave::evolve::Integrator::new(&u0, cfg, Equation::HalfWave).unwrap();
    while let Some(t) = integ.advance().unwrap() {
        let free = half_wave_propagator(&u0, t);
        let gap = integ
            .state()
            .coeffs()
            .iter()
            .zip(free.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-12, "t={t}: {gap:e}");
    }
}

#[test]
fn forward_then_backward_returns() {
    let (u0, _) = family_data(0.25, 0.3);
    let mut u = u0.clone();
    for _ in 0..10 {
        u = step_half_wave(&u, 1e-3);
    }
    for _ in 0..10 {
        u = step_half_wave(&u, -1e-3);
    }
    let gap = hs_norm(&(&u - &u0), SobolevIndex::L2) / hs_norm(&u0, SobolevIndex::L2);
    assert!(gap <= 1e-12, "{gap:e}");
}

#[test]
fn snapshots_match_the_series() {
    let (u0, k) = family_data(0.25, 0.3);
    let cfg = EvolverConfig {
        record_every: 3,
        ..EvolverConfig::new(k, 0.01, 0.1, Scheme::StrangSplit)
    };
    let traj = evolve(&u0, cfg, Equation::HalfWave).unwrap();
    assert_eq!(traj.series.names(), ["mass", "momentum", "energy"]);
    assert_eq!(traj.series.times(), &[0.0, 0.03, 0.06, 0.09, 0.1]);
    let last = ConservedSnapshot::of(0.1, &traj.final_state);
    assert_eq!(traj.series.last("energy").unwrap(), last.hw_energy);
}
