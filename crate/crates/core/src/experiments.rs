//! Sweeps over ε that run the half-wave flow from the two traveling-wave
//! branches, compare against the shifted Szegő profiles and the closed-form
//! distances, and write reproducible CSV/JSON outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use crate::analysis::{duhamel_negative_norm, unit_grid, ScalingFit};
use crate::error::{Error, Result};
use crate::evolve::{default_dt, Equation, EvolverConfig, Integrator, Scheme};
use crate::series::NormSeries;
use crate::spectral::{geometric_tail_bound, hs_norm, modes_for_eps, SobolevIndex, SpectralField};
use crate::szego::{
    make_params, pair_geometry, separation_time, shifted_coeffs, sig17, szego_coeffs, FamilyBranch,
    SzegoParams,
};

/// Largest mode count run without `force_large`; matches ε = 0.0125.
pub const LARGE_MODES: usize = 5895;
/// Refuse runs whose working set would exceed this many bytes.
pub const MEMORY_LIMIT: usize = 4 << 30;

/// `σ = min(0.75, (1/(4s) + 1/2)/2)`, centred in `(1/2, 1/(4s))`.
pub fn default_sigma(s: f64) -> f64 {
    (0.5 * (1.0 / (4.0 * s) + 0.5)).min(0.75)
}

pub fn default_eps_list() -> Vec<f64> {
    vec![0.1, 0.05, 0.025, 0.0125]
}

/// `2^-2, …, 2^-14`
pub fn smoothing_eps_list() -> Vec<f64> {
    (2..=14).map(|j| 2f64.powi(-j)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub s: f64,
    pub eps_list: Vec<f64>,
    pub sigma: f64,
    /// Overrides the per-ε mode policy when set.
    pub max_mode: Option<usize>,
    /// Overrides the default step policy when set.
    pub dt: Option<f64>,
    /// Minimum number of recorded samples per run.
    pub t_samples: usize,
    pub seed: u64,
    pub force_large: bool,
}

impl ExperimentConfig {
    pub fn new(s: f64) -> Self {
        ExperimentConfig {
            s,
            eps_list: default_eps_list(),
            sigma: default_sigma(s),
            max_mode: None,
            dt: None,
            t_samples: 512,
            seed: 0,
            force_large: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.s > 0.25 && self.s < 0.5) {
            return bad(format!("s must lie in (1/4, 1/2), got {}", self.s));
        }
        if self.eps_list.is_empty() {
            return bad("eps list is empty".into());
        }
        if self.eps_list.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad("every eps must lie in (0,1)".into());
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps list must be strictly decreasing".into());
        }
        if !(self.sigma > 0.5 && self.sigma < 1.0 / (4.0 * self.s)) {
            return bad(format!(
                "sigma must lie in (1/2, 1/(4s)) = (0.5, {}), got {}",
                1.0 / (4.0 * self.s),
                self.sigma
            ));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        if self.t_samples == 0 {
            return bad("t_samples must be >= 1".into());
        }
        Ok(())
    }

    pub fn modes_for(&self, eps: f64) -> usize {
        self.max_mode.unwrap_or_else(|| modes_for_eps(eps))
    }

    /// Checks the resolution of the smallest ε against the size limits.
    pub fn check_size(&self) -> Result<()> {
        let eps_min = *self.eps_list.last().expect("validated");
        let k = self.modes_for(eps_min);
        let bytes = estimated_bytes(k);
        if bytes > MEMORY_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "eps = {eps_min} needs K = {k} (~{} MiB), above the {} MiB limit",
                bytes >> 20,
                MEMORY_LIMIT >> 20
            )));
        }
        if k > LARGE_MODES && !self.force_large {
            return Err(Error::InvalidParameter(format!(
                "eps = {eps_min} needs K = {k} modes (~{} MiB, ~{:.0} s per run); pass --force-large to run it",
                bytes >> 20,
                estimated_seconds(k, separation_time(eps_min, self.s)?)
            )));
        }
        Ok(())
    }
}

fn estimated_bytes(k: usize) -> usize {
    // two states, two profiles, padded grids and FFT scratch
    40 * 16 * (2 * k + 1)
}

fn estimated_seconds(k: usize, t_end: f64) -> f64 {
    2.0 * (t_end / 1e-3) * 6e-8 * (8 * k) as f64 * ((8 * k) as f64).log2()
}

/// One ε of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub eps: f64,
    pub params: [SzegoParams; 2],
    pub max_mode: usize,
    pub dt: f64,
    pub record_every: usize,
    pub t_sep: f64,
    /// `‖u⁽¹⁾(0) − u⁽²⁾(0)‖_{H^s}`
    pub d0: f64,
    /// Closed-form Szegő distance at `t_ε`.
    pub d_sep_closed: f64,
    /// Half-wave distance at `t_ε`.
    pub d_sep_numeric: f64,
    /// `sup_t ‖u⁽ʲ⁾ − v⁽ʲ⁾‖_{H^s}` over the recorded grid.
    pub approx_err: [f64; 2],
    /// Largest relative mass drift over both branches.
    pub mass_drift: f64,
    /// `sup_t h_ε(t)` for the first branch.
    pub h_sup: f64,
    /// `h_sup / ε^{s-1/4}`
    pub h_ratio: f64,
    /// `max_t ‖w‖_{H^s} / (‖w‖_{L²}^{1-s/σ} ‖w‖_{H^σ}^{s/σ})`
    pub interp_max: f64,
    /// Largest `|û(k)|` over `|k| ≥ 0.9K` relative to `max_k |û(k)|`, over
    /// both final states; a resolution diagnostic.
    pub spectral_tail: f64,
    /// Wall-clock time; kept out of the CSV to keep it reproducible.
    pub runtime_sec: f64,
    pub failure: Option<String>,
}

impl ReportRow {
    /// `|d_num − d_closed| ≤ err₁ + err₂`
    pub fn triangle_holds(&self) -> bool {
        (self.d_sep_numeric - self.d_sep_closed).abs() <= self.approx_err[0] + self.approx_err[1]
    }

    pub fn relative_transfer(&self) -> f64 {
        (self.d_sep_numeric - self.d_sep_closed).abs() / self.d_sep_closed
    }
}

/// Rows sorted by ε descending, with their time series.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub s: f64,
    pub sigma: f64,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    pub series: Vec<NormSeries>,
}

const SERIES_NAMES: [&str; 11] = [
    "d_numeric",
    "d_szego",
    "approx_err_1",
    "approx_err_2",
    "w_l2",
    "w_hsigma",
    "w_hs",
    "h_eps",
    "mass_1",
    "mass_2",
    "energy_1",
];

/// Evolves the two initial data `α_j/(1 − p e^{ix})` under the half-wave
/// flow to `t_ε` in lockstep.
pub fn run_pair(
    first: &SzegoParams,
    second: &SzegoParams,
    cfg: &ExperimentConfig,
) -> Result<(ReportRow, NormSeries)> {
    let started = Instant::now();
    let eps = first.eps;
    let s = cfg.s;
    let hs = SobolevIndex::new(s)?;
    let hsig = SobolevIndex::new(cfg.sigma)?;
    let k = cfg.modes_for(eps);
    let t_sep = separation_time(eps, s)?;
    let u1 = szego_coeffs(first, 0.0, k)?;
    let u2 = szego_coeffs(second, 0.0, k)?;
    let dt = cfg
        .dt
        .unwrap_or_else(|| default_dt(&u1).min(default_dt(&u2)))
        .min(t_sep);
    let mut evo = EvolverConfig::new(k, dt, t_sep, Scheme::StrangSplit);
    evo.record_every = (evo.step_count() / cfg.t_samples).max(1);
    let mut a = Integrator::new(&u1, evo, Equation::HalfWave)?;
    let mut b = Integrator::new(&u2, evo, Equation::HalfWave)?;

    let d0 = hs_norm(&(&u1 - &u2), hs);
    let d_sep_closed = if first.alpha == second.alpha {
        0.0
    } else {
        pair_geometry(eps, s, t_sep)?.distance
    };
    let mut row = ReportRow {
        eps,
        params: [*first, *second],
        max_mode: k,
        dt,
        record_every: evo.record_every,
        t_sep,
        d0,
        d_sep_closed,
        d_sep_numeric: f64::NAN,
        approx_err: [0.0; 2],
        mass_drift: 0.0,
        h_sup: 0.0,
        h_ratio: f64::NAN,
        interp_max: 0.0,
        spectral_tail: f64::NAN,
        runtime_sec: 0.0,
        failure: None,
    };
    let mut series = NormSeries::new(SERIES_NAMES);
    let mass0 = [mass(&u1), mass(&u2)];
    let theta = s / cfg.sigma;

    let mut record =
        |t: f64, x: &SpectralField, y: &SpectralField, row: &mut ReportRow| -> Result<()> {
            let v1 = shifted_coeffs(first, t, k)?;
            let v2 = shifted_coeffs(second, t, k)?;
            let w = x - &v1;
            let e1 = hs_norm(&w, hs);
            let e2 = hs_norm(&(y - &v2), hs);
            let (wl2, wsig) = (hs_norm(&w, SobolevIndex::L2), hs_norm(&w, hsig));
            let h = eps.powf(-s) * wl2 + eps.powf(cfg.sigma - s) * wsig;
            if wl2 > 0.0 {
                let interp = e1 / (wl2.powf(1.0 - theta) * wsig.powf(theta));
                row.interp_max = row.interp_max.max(interp);
            }
            let (m1, m2) = (mass(x), mass(y));
            row.approx_err[0] = row.approx_err[0].max(e1);
            row.approx_err[1] = row.approx_err[1].max(e2);
            row.h_sup = row.h_sup.max(h);
            row.mass_drift = row
                .mass_drift
                .max((m1 - mass0[0]).abs() / mass0[0])
                .max((m2 - mass0[1]).abs() / mass0[1]);
            let d = hs_norm(&(x - y), hs);
            let energy = crate::evolve::ConservedSnapshot::of(t, x).hw_energy;
            series.push(
                t,
                vec![
                    d,
                    hs_norm(&(&v1 - &v2), hs),
                    e1,
                    e2,
                    wl2,
                    wsig,
                    e1,
                    h,
                    m1,
                    m2,
                    energy,
                ],
            );
            Ok(())
        };

    record(0.0, a.state(), b.state(), &mut row)?;
    loop {
        let step = a.advance().and_then(|t| b.advance().map(|_| t));
        match step {
            Ok(Some(t)) => {
                if a.should_record() {
                    record(t, a.state(), b.state(), &mut row)?;
                }
            }
            Ok(None) => break,
            Err(e @ Error::BlowUp { .. }) => {
                row.failure = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if row.failure.is_none() {
        row.d_sep_numeric = hs_norm(&(a.state() - b.state()), hs);
        row.spectral_tail = spectral_tail(a.state()).max(spectral_tail(b.state()));
        row.h_ratio = row.h_sup / eps.powf(s - 0.25);
    }
    row.runtime_sec = started.elapsed().as_secs_f64();
    Ok((row, series))
}

/// Largest `|û(k)|` over `|k| ≥ 0.9K`, relative to the largest coefficient.
pub fn spectral_tail(u: &SpectralField) -> f64 {
    let edge = (0.9 * u.max_mode() as f64).ceil() as i64;
    let peak = u.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tail = u
        .modes()
        .filter(|(k, _)| k.abs() >= edge)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        0.0
    } else {
        tail / peak
    }
}

fn mass(u: &SpectralField) -> f64 {
    hs_norm(u, SobolevIndex::L2).powi(2)
}

fn sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    cfg.check_size()?;
    let runs: Vec<Result<(ReportRow, NormSeries)>> = cfg
        .eps_list
        .par_iter()
        .map(|&eps| {
            let first = make_params(eps, cfg.s, FamilyBranch::First)?;
            let second = make_params(eps, cfg.s, FamilyBranch::Second)?;
            run_pair(&first, &second, cfg)
        })
        .collect();
    let mut rows = Vec::with_capacity(runs.len());
    let mut series = Vec::with_capacity(runs.len());
    for r in runs {
        let (row, s) = r?;
        rows.push(row);
        series.push(s);
    }
    Ok(ExperimentReport {
        s: cfg.s,
        sigma: cfg.sigma,
        seed: cfg.seed,
        rows,
        series,
    })
}

/// Both branches under the half-wave flow to `t_ε` for every ε.
pub fn run_instability(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    sweep(cfg)
}

/// Approximation errors per ε with log-log fits; rows with ε ≥ 0.5 are
/// reported but kept out of the fits.
#[derive(Debug, Clone)]
pub struct ApproximationReport {
    pub report: ExperimentReport,
    /// Fits of `approx_err_1` and `approx_err_2` against ε.
    pub fits: [Option<ScalingFit>; 2],
    /// `(4s − 1)/4`
    pub predicted_exponent: f64,
}

pub const APPROX_FIT_MAX_EPS: f64 = 0.5;

pub fn run_approximation(cfg: &ExperimentConfig) -> Result<ApproximationReport> {
    let report = sweep(cfg)?;
    let fit = |j: usize| {
        let pts: Vec<(f64, f64)> = report
            .rows
            .iter()
            .filter(|r| r.eps < APPROX_FIT_MAX_EPS && r.failure.is_none())
            .map(|r| (r.eps, r.approx_err[j]))
            .collect();
        ScalingFit::fit(pts).ok()
    };
    Ok(ApproximationReport {
        fits: [fit(0), fit(1)],
        predicted_exponent: (4.0 * cfg.s - 1.0) / 4.0,
        report,
    })
}

/// `h_ε` along each run, compared with `ε^{s-1/4}`.
#[derive(Debug, Clone)]
pub struct BootstrapReport {
    pub report: ExperimentReport,
    /// `max h_ratio / min h_ratio` over the sweep.
    pub ratio_spread: f64,
    /// Largest interpolation quotient over all runs; `<= 1` up to rounding.
    pub interp_max: f64,
}

/// Slack allowed on the pointwise interpolation inequality.
pub const INTERP_SLACK: f64 = 1e-10;

impl BootstrapReport {
    pub fn interpolation_holds(&self) -> bool {
        self.interp_max <= 1.0 + INTERP_SLACK
    }

    pub fn ratio_stable(&self) -> bool {
        self.ratio_spread <= 2.0
    }
}

pub fn run_bootstrap_diagnostic(cfg: &ExperimentConfig) -> Result<BootstrapReport> {
    let report = sweep(cfg)?;
    let ratios: Vec<f64> = report
        .rows
        .iter()
        .map(|r| r.h_ratio)
        .filter(|r| r.is_finite())
        .collect();
    let hi = ratios.iter().cloned().fold(f64::NAN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::NAN, f64::min);
    Ok(BootstrapReport {
        ratio_spread: hi / lo,
        interp_max: report.rows.iter().map(|r| r.interp_max).fold(0.0, f64::max),
        report,
    })
}

/// `sup_t ‖W(t)‖_{H^σ}` over `t ∈ [0,1]` for each ε.
#[derive(Debug, Clone)]
pub struct SmoothingReport {
    pub s: f64,
    pub sigma: f64,
    /// `(ε, K, sup-norm)`
    pub rows: Vec<(f64, usize, f64)>,
    pub fit: ScalingFit,
    /// `(3s − 1/2) + σ(2s − 1)`
    pub predicted_exponent: f64,
}

pub fn run_smoothing(
    s: f64,
    sigma: f64,
    eps_list: &[f64],
    t_samples: usize,
) -> Result<SmoothingReport> {
    let hsig = SobolevIndex::new(sigma)?;
    let grid = unit_grid(t_samples.max(2));
    let rows: Vec<Result<(f64, usize, f64)>> = eps_list
        .par_iter()
        .map(|&eps| {
            let params = make_params(eps, s, FamilyBranch::First)?;
            let k = params.required_modes();
            let norm = duhamel_negative_norm(&params, hsig, &grid, k)?;
            Ok((eps, k, norm.sup_norm))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let fit = ScalingFit::fit(rows.iter().map(|r| (r.0, r.2)).collect())?;
    Ok(SmoothingReport {
        s,
        sigma,
        rows,
        fit,
        predicted_exponent: (3.0 * s - 0.5) + sigma * (2.0 * s - 1.0),
    })
}

/// One line of a probe CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub eps: f64,
    pub s: f64,
    pub sigma: f64,
    pub quantity: String,
    pub value: f64,
    pub predicted_exponent: f64,
    pub fitted_slope: f64,
    pub r2: f64,
}

pub const PROBE_HEADER: &str = "eps,s,sigma,quantity,value,predicted_exponent,fitted_slope,r2";

pub fn probe_csv(rows: &[ProbeRow]) -> String {
    let mut out = String::from(PROBE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{},{:e},{:e},{:e},{:e}",
            r.eps, r.s, r.sigma, r.quantity, r.value, r.predicted_exponent, r.fitted_slope, r.r2
        );
    }
    out
}

impl SmoothingReport {
    pub fn probe_rows(&self) -> Vec<ProbeRow> {
        self.rows
            .iter()
            .map(|&(eps, _, value)| ProbeRow {
                eps,
                s: self.s,
                sigma: self.sigma,
                quantity: "duhamel_hsigma".into(),
                value,
                predicted_exponent: self.predicted_exponent,
                fitted_slope: self.fit.slope,
                r2: self.fit.r2,
            })
            .collect()
    }
}

impl ApproximationReport {
    pub fn probe_rows(&self) -> Vec<ProbeRow> {
        let mut out = Vec::new();
        for (j, fit) in self.fits.iter().enumerate() {
            let (slope, r2) = fit
                .as_ref()
                .map_or((f64::NAN, f64::NAN), |f| (f.slope, f.r2));
            for r in &self.report.rows {
                out.push(ProbeRow {
                    eps: r.eps,
                    s: self.report.s,
                    sigma: self.report.sigma,
                    quantity: format!("approx_err_{}", j + 1),
                    value: r.approx_err[j],
                    predicted_exponent: self.predicted_exponent,
                    fitted_slope: slope,
                    r2,
                });
            }
        }
        out
    }
}

impl BootstrapReport {
    pub fn probe_rows(&self) -> Vec<ProbeRow> {
        self.report
            .rows
            .iter()
            .flat_map(|r| {
                let base = ProbeRow {
                    eps: r.eps,
                    s: self.report.s,
                    sigma: self.report.sigma,
                    quantity: String::new(),
                    value: 0.0,
                    predicted_exponent: self.report.s - 0.25,
                    fitted_slope: f64::NAN,
                    r2: f64::NAN,
                };
                [
                    ProbeRow {
                        quantity: "h_sup".into(),
                        value: r.h_sup,
                        ..base.clone()
                    },
                    ProbeRow {
                        quantity: "h_ratio".into(),
                        value: r.h_ratio,
                        ..base
                    },
                ]
            })
            .collect()
    }
}

pub const REPORT_HEADER: &str = "eps,s,sigma,alpha_1,alpha_2,p,omega_1,c_1,omega_2,c_2,delta,\
max_mode,dt,t_sep,d0,d_sep_closed,d_sep_numeric,approx_err_1,approx_err_2,mass_drift,\
h_sup,h_ratio,spectral_tail,status";

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            let [a, b] = &r.params;
            let fields = [
                r.eps, self.s, self.sigma, a.alpha, b.alpha, a.p, a.omega, a.c, b.omega, b.c,
                b.delta,
            ];
            for f in fields {
                let _ = write!(out, "{},", sig17(f));
            }
            let _ = write!(out, "{},", r.max_mode);
            for f in [
                r.dt,
                r.t_sep,
                r.d0,
                r.d_sep_closed,
                r.d_sep_numeric,
                r.approx_err[0],
                r.approx_err[1],
                r.mass_drift,
                r.h_sup,
                r.h_ratio,
                r.spectral_tail,
            ] {
                let _ = write!(out, "{f:e},");
            }
            let status = match &r.failure {
                None => "ok".to_string(),
                Some(msg) => format!("\"{}\"", msg.replace('"', "'")),
            };
            let _ = writeln!(out, "{status}");
        }
        out
    }

    /// Run metadata: versions, seed, thread count, resolution, tail bounds
    /// and timings.
    pub fn meta_json(&self) -> String {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "eps": r.eps,
                    "max_mode": r.max_mode,
                    "dt": r.dt,
                    "record_every": r.record_every,
                    "t_sep": r.t_sep,
                    "tail_bound": geometric_tail_bound(r.params[0].p, r.max_mode),
                    "spectral_tail": r.spectral_tail,
                    "runtime_sec": r.runtime_sec,
                })
            })
            .collect();
        let meta = json!({
            "crate": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "threads": rayon::current_num_threads(),
            "s": self.s,
            "sigma": self.sigma,
            "scheme": "strang-split, dealiased",
            "sup_over_time": "maximum over the recorded grid; under-estimates the true supremum",
            "runs": rows,
        });
        serde_json::to_string_pretty(&meta).expect("serializable metadata")
    }

    /// Writes `report.csv`, `series_<eps>.csv` and `meta.json` into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.csv"), self.to_csv())?;
        for (row, series) in self.rows.iter().zip(&self.series) {
            fs::write(dir.join(format!("series_{}.csv", row.eps)), series.to_csv())?;
        }
        fs::write(dir.join("meta.json"), self.meta_json())?;
        Ok(())
    }
}

/// Parses a `report.csv` back into its Szegő parameters, re-validating each
/// row.
pub fn read_report_params(text: &str) -> Result<Vec<[SzegoParams; 2]>> {
    let mut lines = text.lines();
    if lines.next() != Some(REPORT_HEADER) {
        return Err(Error::Parse("unexpected report header".into()));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 11 {
            return Err(Error::Parse(format!("row {}: too few columns", i + 1)));
        }
        let num = |j: usize| -> Result<f64> {
            cols[j]
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad number {:?}", i + 1, cols[j])))
        };
        let (eps, s, p, delta) = (num(0)?, num(1)?, num(5)?, num(10)?);
        let first = SzegoParams {
            eps,
            s,
            branch: FamilyBranch::First,
            alpha: num(3)?,
            p,
            omega: num(6)?,
            c: num(7)?,
            delta: 0.0,
        };
        let second = SzegoParams {
            eps,
            s,
            branch: FamilyBranch::Second,
            alpha: num(4)?,
            p,
            omega: num(8)?,
            c: num(9)?,
            delta,
        };
        first.validate()?;
        second.validate()?;
        out.push([first, second]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::szego::initial_distance_closed;

    #[test]
    fn default_sigma_is_centred() {
        assert!((default_sigma(0.4) - 0.5625).abs() < 1e-15);
        assert!((default_sigma(0.26) - 0.730_769_230_769_230_8).abs() < 1e-15);
        let s = 0.3;
        let sg = default_sigma(s);
        assert!(sg > 0.5 && sg < 1.0 / (4.0 * s));
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(0.4);
        assert!(cfg.validate().is_ok());
        cfg.eps_list = vec![0.05, 0.1];
        assert!(cfg.validate().is_err());
        cfg.eps_list = vec![];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::new(0.2);
        assert!(cfg.validate().is_err());
        cfg.s = 0.4;
        cfg.sigma = 0.7;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::new(0.4);
        cfg.eps_list = vec![0.1, 0.001];
        assert!(
            matches!(cfg.check_size(), Err(Error::InvalidParameter(m)) if m.contains("force-large"))
        );
        cfg.force_large = true;
        assert!(cfg.check_size().is_ok());
    }

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            eps_list: vec![0.25],
            t_samples: 16,
            ..ExperimentConfig::new(0.4)
        }
    }

    #[test]
    fn identical_branches_stay_together() {
        let cfg = tiny_config();
        let p = make_params(0.25, 0.4, FamilyBranch::First).unwrap();
        let (row, series) = run_pair(&p, &p, &cfg).unwrap();
        assert_eq!(row.d0, 0.0);
        assert_eq!(row.d_sep_numeric, 0.0);
        assert!(series.sup("d_numeric").unwrap() <= 1e-8);
        assert_eq!(series.column("approx_err_1").unwrap()[0], 0.0);
        assert_eq!(series.column("h_eps").unwrap()[0], 0.0);
    }

    #[test]
    fn row_invariants_on_a_small_sweep() {
        let cfg = tiny_config();
        let rep = run_instability(&cfg).unwrap();
        let row = &rep.rows[0];
        assert!(row.failure.is_none());
        assert!(row.triangle_holds());
        assert!((row.d0 - initial_distance_closed(0.25, 0.4).unwrap()).abs() < 1e-12);
        assert!(row.mass_drift < 1e-12);
        assert!(row.interp_max <= 1.0 + INTERP_SLACK);
        assert!(rep.series[0].len() >= cfg.t_samples);
        let last_t = *rep.series[0].times().last().unwrap();
        assert_eq!(last_t, row.t_sep);

        let parsed = read_report_params(&rep.to_csv()).unwrap();
        assert_eq!(parsed[0][0].alpha, row.params[0].alpha);
        assert_eq!(parsed[0][1].delta, row.params[1].delta);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = tiny_config();
        let a = run_instability(&cfg).unwrap();
        let b = run_instability(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.series[0].to_csv(), b.series[0].to_csv());
    }

    #[test]
    fn probe_csv_layout() {
        let rows = vec![ProbeRow {
            eps: 0.5,
            s: 0.4,
            sigma: 0.6,
            quantity: "q".into(),
            value: 2.0,
            predicted_exponent: 0.58,
            fitted_slope: 0.5,
            r2: 1.0,
        }];
        assert_eq!(
            probe_csv(&rows),
            "eps,s,sigma,quantity,value,predicted_exponent,fitted_slope,r2\n5e-1,4e-1,6e-1,q,2e0,5.8e-1,5e-1,1e0\n"
        );
    }
}
