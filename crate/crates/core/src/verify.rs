//! The acceptance suite: each criterion is a set of measured quantities with
//! a threshold and a direction. Failures are data; nothing here panics on a
//! failed check.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    duhamel_field, duhamel_quadrature, gronwall_extremal, interpolation_probe, lambda_raw,
    negative_part_bruteforce, negative_part_closed, product_probe, random_field, unit_grid,
    vest_bounds, QKind, QProbe, ScalingFit, RESONANCE_SEAM,
};
use crate::error::Result;
use crate::evolve::{evolve, Equation, EvolverConfig, Integrator, Scheme};
use crate::experiments::{run_approximation, run_smoothing, smoothing_eps_list, ExperimentConfig};
use crate::quadrature::adaptive_gk;
use crate::spectral::{hs_norm, SobolevIndex, SpectralField};
use crate::szego::{
    initial_distance_closed, make_params, pair_geometry, pair_hs_inner_closed, separation_time,
    szego_coeffs, FamilyBranch,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub id: String,
    pub criterion: u8,
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl CheckRow {
    fn new(id: &str, name: &str, measured: f64, bound: Bound, threshold: f64) -> CheckRow {
        let criterion = id
            .trim_end_matches(|c: char| c.is_ascii_alphabetic())
            .parse()
            .expect("numeric criterion id");
        let mut row = CheckRow {
            id: id.into(),
            criterion,
            name: name.into(),
            measured,
            threshold,
            bound,
            pass: false,
        };
        row.judge();
        row
    }

    fn judge(&mut self) {
        // NaN never passes
        self.pass = match self.bound {
            Bound::AtMost => self.measured <= self.threshold,
            Bound::AtLeast => self.measured >= self.threshold,
        };
    }

    fn failed(id: &str, name: &str, err: &str) -> CheckRow {
        let mut row = CheckRow::new(id, name, f64::NAN, Bound::AtMost, 0.0);
        row.name = format!("{name} [error: {err}]");
        row
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub criteria: Vec<u8>,
    /// `(row id, threshold)` replacing the built-in threshold.
    pub overrides: Vec<(String, f64)>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            criteria: (1..=10).collect(),
            overrides: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifySummary {
    pub rows: Vec<CheckRow>,
    /// Wall-clock seconds per criterion, in run order.
    pub timings: Vec<(u8, f64)>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn criterion_rows(&self, criterion: u8) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(move |r| r.criterion == criterion)
    }

    pub fn criterion_passed(&self, criterion: u8) -> bool {
        self.criterion_rows(criterion).all(|r| r.pass)
    }

    /// Tab-separated `id, name, measured, bound, threshold, verdict`; no
    /// timings, so two runs with the same seed give identical text.
    pub fn to_text(&self) -> String {
        let mut out = String::from("id\tname\tmeasured\tbound\tthreshold\tverdict\n");
        for r in &self.rows {
            let bound = match r.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{:.6e}\t{}\t{:.6e}\t{}",
                r.id,
                r.name,
                r.measured,
                bound,
                r.threshold,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            out,
            "overall\t{}",
            if self.passed() { "pass" } else { "FAIL" }
        );
        out
    }
}

pub fn run_verify(opts: &VerifyOptions) -> VerifySummary {
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for &c in &opts.criteria {
        let started = Instant::now();
        let mut got = check(c, opts.seed);
        for row in got.iter_mut() {
            if let Some((_, t)) = opts.overrides.iter().find(|(id, _)| *id == row.id) {
                row.threshold = *t;
                row.judge();
            }
        }
        rows.extend(got);
        timings.push((c, started.elapsed().as_secs_f64()));
    }
    VerifySummary { rows, timings }
}

/// Rows of one criterion; unknown ids give no rows.
pub fn check(criterion: u8, seed: u64) -> Vec<CheckRow> {
    let name = |c: u8| match c {
        1 => "projection identity",
        2 => "oscillatory factor oracle",
        3 => "smoothing scaling",
        4 => "profile bounds",
        5 => "Szego solver",
        6 => "half-wave splitting",
        7 => "closed-form separation",
        8 => "PDE instability transfer",
        9 => "Gronwall window",
        10 => "inequality probes",
        _ => "",
    };
    let result = match criterion {
        1 => check_projection(seed),
        2 => check_lambda(seed),
        3 => check_smoothing(),
        4 => check_vest(),
        5 => check_szego_solver(),
        6 => check_half_wave(seed),
        7 => check_separation(),
        8 => check_transfer(seed),
        9 => check_gronwall(),
        10 => check_probes(seed),
        _ => return Vec::new(),
    };
    result.unwrap_or_else(|e| {
        vec![CheckRow::failed(
            &criterion.to_string(),
            name(criterion),
            &e.to_string(),
        )]
    })
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn max_gap(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest ratio between consecutive entries; `< 1` means strictly
/// decreasing.
fn max_step_ratio(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(f64::NEG_INFINITY, f64::max)
}

fn check_projection(seed: u64) -> Result<Vec<CheckRow>> {
    let mut r = rng(seed, 1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = Complex64::from_polar(
            r.gen_range(0.1..1.0),
            r.gen_range(0.0..std::f64::consts::TAU),
        );
        let pole = Complex64::from_polar(
            r.gen_range(0.0..=0.95),
            r.gen_range(0.0..std::f64::consts::TAU),
        );
        let closed = negative_part_closed(a, pole, 1024)?;
        let brute = negative_part_bruteforce(a, pole, 1024)?;
        worst = worst.max(max_gap(&closed, &brute));
    }
    Ok(vec![CheckRow::new(
        "1",
        "max coefficient gap closed vs brute force, K=1024",
        worst,
        Bound::AtMost,
        1e-10,
    )])
}

fn lambda_oracle(t: f64, big_omega: f64) -> Complex64 {
    adaptive_gk(
        |tau| Complex64::from_polar(1.0, -tau * big_omega),
        0.0,
        t,
        1e-14,
        0.0,
    )
}

fn check_lambda(seed: u64) -> Result<Vec<CheckRow>> {
    let mut r = rng(seed, 2);
    let mut cases = Vec::with_capacity(100);
    for i in 0..100 {
        let t: f64 = r.gen_range(0.01..=1.0);
        let sign = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let x = match i % 4 {
            // straddling the Taylor threshold
            0 => RESONANCE_SEAM * (1.0 + r.gen_range(-1e-3..1e-3)),
            1 => 10f64.powf(r.gen_range(-14.0..-6.0)),
            2 => 10f64.powf(r.gen_range(-6.0..0.0)),
            _ => 10f64.powf(r.gen_range(0.0..3.5)),
        };
        cases.push((t, sign * x / t));
    }
    let mut worst = 0.0f64;
    for &(t, om) in &cases {
        let exact = lambda_oracle(t, om);
        worst = worst.max((lambda_raw(t, om) - exact).norm() / exact.norm());
    }
    let mut jump = 0.0f64;
    for &t in &[0.05, 0.3, 1.0] {
        for sign in [1.0, -1.0] {
            let below = lambda_raw(t, sign * RESONANCE_SEAM * (1.0 - 1e-9) / t);
            let above = lambda_raw(t, sign * RESONANCE_SEAM * (1.0 + 1e-9) / t);
            jump = jump.max((above - below).norm() / below.norm());
        }
    }
    Ok(vec![
        CheckRow::new(
            "2a",
            "max rel. error vs adaptive quadrature",
            worst,
            Bound::AtMost,
            1e-9,
        ),
        CheckRow::new(
            "2b",
            "rel. jump across the Taylor threshold",
            jump,
            Bound::AtMost,
            1e-9,
        ),
    ])
}

fn check_smoothing() -> Result<Vec<CheckRow>> {
    let (s, sigma) = (0.4, 0.6);
    let rep = run_smoothing(s, sigma, &smoothing_eps_list(), 257)?;
    let params = make_params(0.1, s, FamilyBranch::First)?;
    let k = params.required_modes();
    let hsig = SobolevIndex::new(sigma)?;
    let closed = hs_norm(&duhamel_field(&params, 0.5, k), hsig);
    let quad = hs_norm(&duhamel_quadrature(&params, 0.5, k, 4096)?, hsig);
    Ok(vec![
        CheckRow::new(
            "3a",
            "fitted slope of sup_t |W|_{H^0.6}, s=0.4",
            rep.fit.slope,
            Bound::AtLeast,
            rep.predicted_exponent - 0.1,
        ),
        CheckRow::new(
            "3b",
            "Simpson vs closed-form norm, eps=0.1 t=0.5",
            (quad - closed).abs() / closed,
            Bound::AtMost,
            1e-6,
        ),
    ])
}

fn check_vest() -> Result<Vec<CheckRow>> {
    let s = 0.3;
    let eps_list: Vec<f64> = (0..7).map(|j| 10f64.powf(-1.0 - 0.5 * j as f64)).collect();
    let grid = unit_grid(2);
    let mut linf = Vec::new();
    let mut h1 = Vec::new();
    for &eps in &eps_list {
        let params = make_params(eps, s, FamilyBranch::First)?;
        let b = vest_bounds(&params, SobolevIndex::of(1.0), &grid)?;
        linf.push((eps, b.linf));
        h1.push((eps, b.hsig));
    }
    let f_inf = ScalingFit::fit(linf)?;
    let f_h1 = ScalingFit::fit(h1)?;
    Ok(vec![
        CheckRow::new(
            "4a",
            "|slope of sup-norm - (s-1/2)|, s=0.3",
            (f_inf.slope - (s - 0.5)).abs(),
            Bound::AtMost,
            0.05,
        ),
        CheckRow::new(
            "4b",
            "|slope of H^1 norm - (s-1)|, s=0.3",
            (f_h1.slope - (s - 1.0)).abs(),
            Bound::AtMost,
            0.05,
        ),
    ])
}

/// `sup_t ‖V_num − V_exact‖_{H^{1/2}}` for the Szegő traveling wave.
pub fn szego_oracle_error(eps: f64, s: f64, max_mode: usize, dt: f64, t_end: f64) -> Result<f64> {
    let params = make_params(eps, s, FamilyBranch::First)?;
    let half = SobolevIndex::of(0.5);
    let v0 = szego_coeffs(&params, 0.0, max_mode)?;
    let cfg = EvolverConfig::new(max_mode, dt, t_end, Scheme::Rk4Spectral);
    let mut integ = Integrator::new(&v0, cfg, Equation::Szego)?;
    let mut worst = 0.0f64;
    while let Some(t) = integ.advance()? {
        let exact = szego_coeffs(&params, t, max_mode)?;
        worst = worst.max(hs_norm(&(integ.state() - &exact), half));
    }
    Ok(worst)
}

fn check_szego_solver() -> Result<Vec<CheckRow>> {
    let (eps, s) = (0.25, 0.3);
    // the 1e-16 tail rule asks for one mode more than 256 here
    let k = make_params(eps, s, FamilyBranch::First)?
        .required_modes()
        .max(256);
    let coarse = szego_oracle_error(eps, s, k, 1e-3, 1.0)?;
    let fine = szego_oracle_error(eps, s, k, 5e-4, 1.0)?;
    Ok(vec![
        CheckRow::new(
            "5a",
            "sup_t H^1/2 error, dt=1e-3",
            coarse,
            Bound::AtMost,
            1e-6,
        ),
        CheckRow::new(
            "5b",
            "error ratio under dt halving",
            coarse / fine,
            Bound::AtLeast,
            3.5,
        ),
    ])
}

/// Seeded trigonometric polynomial with analytic decay `e^{-|k|/2}`.
pub fn generic_field(max_mode: usize, seed: u64, index: u64) -> SpectralField {
    random_field(max_mode, 0.0, seed, index).map_modes(|k, z| z * (-0.5 * k.abs() as f64).exp())
}

fn check_half_wave(seed: u64) -> Result<Vec<CheckRow>> {
    let (amp, k) = (Complex64::new(1.0, 0.0), 3i64);
    let u0 = SpectralField::mode(8, k, amp);
    let traj = evolve(
        &u0,
        EvolverConfig::new(8, 1e-3, 1.0, Scheme::StrangSplit),
        Equation::HalfWave,
    )?;
    let lambda = k.unsigned_abs() as f64 + amp.norm_sqr();
    let exact = SpectralField::mode(8, k, amp * Complex64::from_polar(1.0, -lambda));
    let pointwise = (&traj.final_state - &exact).grid_sup(64);

    let mut drift = 0.0f64;
    for i in 0..3 {
        let u = generic_field(128, seed, i);
        let cfg = EvolverConfig {
            record_every: 10,
            ..EvolverConfig::new(128, 1e-3, 1.0, Scheme::StrangSplit)
        };
        let traj = evolve(&u, cfg, Equation::HalfWave)?;
        let m0 = traj.snapshots[0].mass;
        for snap in &traj.snapshots {
            drift = drift.max((snap.mass - m0).abs() / m0);
        }
    }
    Ok(vec![
        CheckRow::new(
            "6a",
            "plane wave pointwise error at t=1",
            pointwise,
            Bound::AtMost,
            1e-12,
        ),
        CheckRow::new(
            "6b",
            "rel. mass drift on generic data",
            drift,
            Bound::AtMost,
            1e-12,
        ),
    ])
}

/// Closed-form separation quantities for one ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationPoint {
    pub eps: f64,
    pub t_sep: f64,
    pub d0: f64,
    pub d_sep: f64,
    /// `|⟨V⁽¹⁾, V⁽²⁾⟩_{H^s}` at `t_ε` over its value at `0`.
    pub cross_ratio: f64,
}

pub fn separation_point(eps: f64, s: f64) -> Result<SeparationPoint> {
    let t_sep = separation_time(eps, s)?;
    let at0 = pair_geometry(eps, s, 0.0)?;
    let at = pair_geometry(eps, s, t_sep)?;
    Ok(SeparationPoint {
        eps,
        t_sep,
        d0: initial_distance_closed(eps, s)?,
        d_sep: at.distance,
        cross_ratio: at.cross.norm() / at0.cross.norm(),
    })
}

/// Log-log slope of `t ↦ |⟨V⁽¹⁾(t), V⁽²⁾(t)⟩_{H^s}|` over `[10 t₀, 100 t₀]`,
/// `t₀ = ε / |c₁ − c₂|`.
pub fn cross_decay_slope(eps: f64, s: f64) -> Result<ScalingFit> {
    let a = make_params(eps, s, FamilyBranch::First)?;
    let b = make_params(eps, s, FamilyBranch::Second)?;
    let t0 = eps / (a.c - b.c).abs();
    let pts = (0..=20)
        .map(|j| {
            let t = t0 * 10f64.powf(1.0 + j as f64 / 20.0);
            pair_hs_inner_closed(&a, &b, t, s).map(|z| (t, z.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    ScalingFit::fit(pts)
}

fn check_separation() -> Result<Vec<CheckRow>> {
    let s = 0.4;
    let pts = (1..=6)
        .map(|j| separation_point(10f64.powi(-j), s))
        .collect::<Result<Vec<_>>>()?;
    let d0: Vec<f64> = pts.iter().map(|p| p.d0).collect();
    let sep_gain = pts
        .iter()
        .filter(|p| p.eps <= 1e-3 * (1.0 + 1e-12))
        .map(|p| p.d_sep / p.d0)
        .fold(f64::INFINITY, f64::min);
    let cross = pts.iter().map(|p| p.cross_ratio).fold(0.0, f64::max);
    let decay = cross_decay_slope(1e-4, s)?;
    Ok(vec![
        CheckRow::new(
            "7a",
            "max d0(eps_{j+1})/d0(eps_j)",
            max_step_ratio(&d0),
            Bound::AtMost,
            1.0 - 1e-12,
        ),
        CheckRow::new(
            "7b",
            "min d_sep/d0 over eps <= 1e-3",
            sep_gain,
            Bound::AtLeast,
            3.0,
        ),
        CheckRow::new(
            "7c",
            "max |cross(t_eps)|/|cross(0)|",
            cross,
            Bound::AtMost,
            1.0 - 1e-12,
        ),
        CheckRow::new(
            "7d",
            "|cross-term decay slope + (1+2s)|, eps=1e-4",
            (decay.slope + 1.0 + 2.0 * s).abs(),
            Bound::AtMost,
            0.1,
        ),
    ])
}

fn check_transfer(seed: u64) -> Result<Vec<CheckRow>> {
    let cfg = ExperimentConfig {
        eps_list: vec![0.1, 0.05, 0.025],
        seed,
        ..ExperimentConfig::new(0.4)
    };
    let rep = run_approximation(&cfg)?;
    let rows = &rep.report.rows;
    let failures = rows.iter().filter(|r| r.failure.is_some()).count();
    let transfer = rows
        .iter()
        .map(|r| r.relative_transfer())
        .fold(0.0, f64::max);
    let triangle = rows.iter().filter(|r| !r.triangle_holds()).count() + failures;
    let e1: Vec<f64> = rows.iter().map(|r| r.approx_err[0]).collect();
    let e2: Vec<f64> = rows.iter().map(|r| r.approx_err[1]).collect();
    let slope = rep.fits[0].as_ref().map_or(f64::NAN, |f| f.slope);
    Ok(vec![
        CheckRow::new(
            "8a",
            "max |d_num - d_closed|/d_closed",
            transfer,
            Bound::AtMost,
            0.2,
        ),
        CheckRow::new(
            "8b",
            "rows violating the triangle bound",
            triangle as f64,
            Bound::AtMost,
            0.0,
        ),
        CheckRow::new(
            "8c",
            "max consecutive ratio of approximation sups",
            max_step_ratio(&e1).max(max_step_ratio(&e2)),
            Bound::AtMost,
            1.0 - 1e-12,
        ),
        CheckRow::new(
            "8d",
            "fitted approximation slope, first branch",
            slope,
            Bound::AtLeast,
            rep.predicted_exponent - 0.1,
        ),
    ])
}

fn check_gronwall() -> Result<Vec<CheckRow>> {
    let run = gronwall_extremal(1.0, 1.0, 1e-3, 1.0)?;
    let sweep = (2..=8)
        .map(|j| gronwall_extremal(1.0, 1.0, 10f64.powi(-j), 1.0).map(|r| r.max_ratio))
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        CheckRow::new(
            "9a",
            "max_ratio, eps=1e-3",
            run.max_ratio,
            Bound::AtMost,
            1.0 - 1e-12,
        ),
        CheckRow::new(
            "9b",
            "|max_ratio - 0.4377|",
            (run.max_ratio - 0.4377).abs(),
            Bound::AtMost,
            1e-3,
        ),
        CheckRow::new(
            "9c",
            "max consecutive ratio along eps=1e-2..1e-8",
            max_step_ratio(&sweep),
            Bound::AtMost,
            1.0 - 1e-12,
        ),
    ])
}

/// Maxima of every probe ratio over `count` seeded inputs of degree
/// `max_mode`, in the order interpolation, product, Q1–Q3 (`H^σ` then `L²`).
pub fn probe_maxima(
    max_mode: usize,
    count: u64,
    seed: u64,
    probe: &QProbe,
    sigma: SobolevIndex,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0f64; 8];
    for i in 0..count {
        let f = random_field(max_mode, sigma.value(), seed, i);
        let g = random_field(max_mode, sigma.value(), seed, count + i);
        let mut vals = vec![
            interpolation_probe(&f, sigma)?,
            product_probe(&f, &g, sigma)?,
        ];
        for which in [QKind::Q1, QKind::Q2, QKind::Q3] {
            let q = probe.eval(&f, which)?;
            vals.push(q.h_sigma);
            vals.push(q.l2);
        }
        for (m, v) in out.iter_mut().zip(vals) {
            *m = if v.is_nan() { f64::NAN } else { m.max(v) };
        }
    }
    Ok(out)
}

fn check_probes(seed: u64) -> Result<Vec<CheckRow>> {
    let params = make_params(0.05, 0.4, FamilyBranch::First)?;
    let sigma = SobolevIndex::new(crate::experiments::default_sigma(0.4))?;
    let probe = QProbe::new(&params, sigma, 512)?;
    let lo = probe_maxima(256, 1000, seed, &probe, sigma)?;
    let hi = probe_maxima(512, 1000, seed, &probe, sigma)?;
    let non_finite = lo.iter().chain(&hi).filter(|v| !v.is_finite()).count();
    let growth = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| b / a - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);

    let lambda = 3.7;
    let mut drift = 0.0f64;
    for i in 0..50 {
        let f = random_field(256, sigma.value(), seed, i);
        let g = random_field(256, sigma.value(), seed, 1000 + i);
        let (fs, gs) = (
            f.scale(Complex64::new(lambda, 0.0)),
            g.scale(Complex64::new(0.0, 1.0 / lambda)),
        );
        let mut pairs = vec![
            (
                interpolation_probe(&f, sigma)?,
                interpolation_probe(&fs, sigma)?,
            ),
            (
                product_probe(&f, &g, sigma)?,
                product_probe(&fs, &gs, sigma)?,
            ),
        ];
        for which in [QKind::Q1, QKind::Q2, QKind::Q3] {
            let (a, b) = (probe.eval(&f, which)?, probe.eval(&fs, which)?);
            pairs.push((a.h_sigma, b.h_sigma));
            pairs.push((a.l2, b.l2));
        }
        for (a, b) in pairs {
            drift = drift.max((a - b).abs() / a);
        }
    }
    Ok(vec![
        CheckRow::new(
            "10a",
            "non-finite probe maxima",
            non_finite as f64,
            Bound::AtMost,
            0.0,
        ),
        CheckRow::new(
            "10b",
            "max growth of probe maxima, degree 256 -> 512",
            growth,
            Bound::AtMost,
            0.05,
        ),
        CheckRow::new(
            "10c",
            "max rel. change of ratios under scaling",
            drift,
            Bound::AtMost,
            1e-12,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_judge_both_directions() {
        assert!(CheckRow::new("1", "x", 0.5, Bound::AtMost, 1.0).pass);
        assert!(!CheckRow::new("1", "x", 1.5, Bound::AtMost, 1.0).pass);
        assert!(CheckRow::new("3a", "x", 1.5, Bound::AtLeast, 1.0).pass);
        assert!(!CheckRow::new("10b", "x", f64::NAN, Bound::AtLeast, 1.0).pass);
        assert_eq!(
            CheckRow::new("10b", "x", 0.0, Bound::AtMost, 1.0).criterion,
            10
        );
    }

    #[test]
    fn overridden_threshold_fails() {
        let opts = VerifyOptions {
            criteria: vec![1],
            overrides: vec![("1".into(), 0.0)],
            ..Default::default()
        };
        let sum = run_verify(&opts);
        assert!(!sum.passed());
        assert!(sum.to_text().ends_with("overall\tFAIL\n"));
    }

    #[test]
    fn step_ratio() {
        assert!(max_step_ratio(&[3.0, 2.0, 1.0]) < 1.0);
        assert!(max_step_ratio(&[3.0, 3.0]) >= 1.0);
    }
}
