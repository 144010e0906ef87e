//! Time integrators for the half-wave equation `(i∂_t - |D|)u = |u|²u` and
//! the Szegő equation `i∂_t V = P_{≥0}(|V|²V)`.
//!
//! The half-wave flow uses Strang splitting whose two sub-flows are solved
//! exactly: the linear part is diagonal in Fourier space and the nonlinear
//! part `i∂_t u = |u|²u` keeps `|u|` fixed pointwise, so it is a pointwise
//! phase rotation on the collocation grid. The Szegő flow has no linear
//! part and is integrated with classical RK4 on the projected cubic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::NormSeries;
use crate::spectral::{
    cubic_term, dealias_len, hs_norm, project_nonneg, SobolevIndex, SpectralField,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    StrangSplit,
    Rk4Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    HalfWave,
    Szego,
}

impl Equation {
    pub fn default_scheme(self) -> Scheme {
        match self {
            Equation::HalfWave => Scheme::StrangSplit,
            Equation::Szego => Scheme::Rk4Spectral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolverConfig {
    pub max_mode: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub dealias: bool,
    pub record_every: usize,
}

impl EvolverConfig {
    pub fn new(max_mode: usize, dt: f64, t_end: f64, scheme: Scheme) -> Self {
        EvolverConfig {
            max_mode,
            dt,
            t_end,
            scheme,
            dealias: true,
            record_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_mode < 1 {
            return Err(Error::InvalidParameter("max_mode must be >= 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.t_end > 0.0 && self.t_end.is_finite())
        {
            return Err(Error::InvalidParameter(
                "dt and t_end must be positive".into(),
            ));
        }
        if self.dt > self.t_end {
            return Err(Error::InvalidParameter(format!(
                "dt = {} exceeds t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of steps, the last one shortened to land on `t_end`.
    pub fn step_count(&self) -> usize {
        let n = (self.t_end / self.dt).ceil() as usize;
        // absorb representation noise such as 1.0 / 1e-3 = 1000.0000000000001
        if n > 1 && (self.t_end - (n - 1) as f64 * self.dt) <= 1e-9 * self.dt {
            n - 1
        } else {
            n.max(1)
        }
    }

    /// Time stamp after `step` steps.
    pub fn time_at(&self, step: usize) -> f64 {
        if step >= self.step_count() {
            self.t_end
        } else {
            step as f64 * self.dt
        }
    }
}

/// Default step: `min(1e-3, 0.05 / ‖u0‖_∞²)`, keeping the nonlinear phase
/// per step below 0.05 rad.
pub fn default_dt(u0: &SpectralField) -> f64 {
    let sup = u0.sup_norm();
    if sup == 0.0 {
        1e-3
    } else {
        (0.05 / (sup * sup)).min(1e-3)
    }
}

/// Conserved quantities at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedSnapshot {
    pub t: f64,
    /// `Σ |û(k)|²`
    pub mass: f64,
    /// `Σ k |û(k)|²`
    pub momentum: f64,
    /// `½ Σ |k||û(k)|² + ¼ (1/2π)∫|u|⁴`
    pub hw_energy: f64,
    /// `¼ (1/2π)∫|u|⁴`
    pub szego_energy: f64,
}

impl ConservedSnapshot {
    pub fn of(t: f64, u: &SpectralField) -> ConservedSnapshot {
        let mut mass = 0.0;
        let mut momentum = 0.0;
        let mut kinetic = 0.0;
        for (k, c) in u.modes() {
            let a = c.norm_sqr();
            mass += a;
            momentum += k as f64 * a;
            kinetic += k.unsigned_abs() as f64 * a;
        }
        let n = dealias_len(u.max_mode());
        let quartic = u
            .to_grid(n)
            .iter()
            .map(|z| z.norm_sqr().powi(2))
            .sum::<f64>()
            / n as f64;
        ConservedSnapshot {
            t,
            mass,
            momentum,
            hw_energy: 0.5 * kinetic + 0.25 * quartic,
            szego_energy: 0.25 * quartic,
        }
    }

    pub fn energy(&self, equation: Equation) -> f64 {
        match equation {
            Equation::HalfWave => self.hw_energy,
            Equation::Szego => self.szego_energy,
        }
    }
}

fn linear_half_step(u: &SpectralField, tau: f64) -> SpectralField {
    crate::spectral::half_wave_propagator(u, tau)
}

fn nonlinear_phase(u: &SpectralField, dt: f64, grid: usize) -> Result<SpectralField> {
    let mut g = u.to_grid(grid);
    for z in g.iter_mut() {
        *z *= Complex64::from_polar(1.0, -dt * z.norm_sqr());
    }
    let out = SpectralField::from_grid_checked(g, u.max_mode())?;
    Ok(out)
}

fn strang(u: &SpectralField, dt: f64, grid: usize) -> Result<SpectralField> {
    let half = linear_half_step(u, 0.5 * dt);
    let nl = nonlinear_phase(&half, dt, grid)?;
    Ok(linear_half_step(&nl, 0.5 * dt))
}

fn half_wave_grid(max_mode: usize, dealias: bool) -> usize {
    if dealias {
        dealias_len(max_mode)
    } else {
        2 * max_mode + 1
    }
}

/// One Strang step of the half-wave flow on the dealiased grid. A negative
/// `dt` steps backward.
pub fn step_half_wave(u: &SpectralField, dt: f64) -> SpectralField {
    strang(u, dt, half_wave_grid(u.max_mode(), true)).expect("finite half-wave step")
}

fn szego_rhs(v: &SpectralField) -> Result<SpectralField> {
    Ok(project_nonneg(&cubic_term(v, v, v)).scale(Complex64::new(0.0, -1.0)))
}

fn axpy(v: &SpectralField, a: f64, k: &SpectralField) -> SpectralField {
    let coeffs = v
        .coeffs()
        .iter()
        .zip(k.coeffs())
        .map(|(x, y)| x + y * a)
        .collect();
    SpectralField::new(v.max_mode(), coeffs).expect("finite RK stage")
}

fn rk4(v: &SpectralField, dt: f64) -> Result<SpectralField> {
    let k1 = szego_rhs(v)?;
    let k2 = szego_rhs(&axpy(v, 0.5 * dt, &k1))?;
    let k3 = szego_rhs(&axpy(v, 0.5 * dt, &k2))?;
    let k4 = szego_rhs(&axpy(v, dt, &k3))?;
    let coeffs = v
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x + (k1.coeffs()[i] + k2.coeffs()[i] * 2.0 + k3.coeffs()[i] * 2.0 + k4.coeffs()[i])
                * (dt / 6.0)
        })
        .collect();
    SpectralField::new(v.max_mode(), coeffs)
}

/// Negative-mode content tolerated in Szegő data.
pub const HOLOMORPHIC_TOL: f64 = 1e-12;

/// One RK4 step of the Szegő flow.
pub fn step_szego(v: &SpectralField, dt: f64) -> Result<SpectralField> {
    let neg = v.negative_content();
    if neg > HOLOMORPHIC_TOL {
        return Err(Error::NotHolomorphic(neg));
    }
    rk4(&project_nonneg(v), dt)
}

/// Step-by-step driver; use [`evolve`] for a full run.
pub struct Integrator {
    cfg: EvolverConfig,
    equation: Equation,
    state: SpectralField,
    step: usize,
    steps: usize,
    grid: usize,
    initial_l2: f64,
}

/// Factor over the initial L² norm that trips the blow-up guard.
pub const BLOW_UP_FACTOR: f64 = 1e6;

impl Integrator {
    pub fn new(u0: &SpectralField, cfg: EvolverConfig, equation: Equation) -> Result<Integrator> {
        cfg.validate()?;
        let state = u0.embed(cfg.max_mode);
        if equation == Equation::Szego {
            let neg = state.negative_content();
            if neg > HOLOMORPHIC_TOL {
                return Err(Error::NotHolomorphic(neg));
            }
        }
        Ok(Integrator {
            steps: cfg.step_count(),
            grid: half_wave_grid(cfg.max_mode, cfg.dealias),
            initial_l2: hs_norm(&state, SobolevIndex::L2),
            cfg,
            equation,
            state,
            step: 0,
        })
    }

    pub fn state(&self) -> &SpectralField {
        &self.state
    }

    pub fn into_state(self) -> SpectralField {
        self.state
    }

    pub fn time(&self) -> f64 {
        if self.step == 0 {
            0.0
        } else {
            self.cfg.time_at(self.step)
        }
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn total_steps(&self) -> usize {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.steps
    }

    /// Whether the current state is a recording point.
    pub fn should_record(&self) -> bool {
        self.step.is_multiple_of(self.cfg.record_every) || self.is_done()
    }

    /// Advances one step; returns the new time, or `None` once `t_end` has
    /// been reached.
    pub fn advance(&mut self) -> Result<Option<f64>> {
        if self.is_done() {
            return Ok(None);
        }
        let t0 = self.time();
        let t1 = self.cfg.time_at(self.step + 1);
        let dt = t1 - t0;
        let next = match (self.equation, self.cfg.scheme) {
            (Equation::HalfWave, Scheme::StrangSplit) => strang(&self.state, dt, self.grid),
            (Equation::Szego, Scheme::Rk4Spectral) => rk4(&self.state, dt),
            (Equation::HalfWave, Scheme::Rk4Spectral) => Err(Error::InvalidParameter(
                "RK4 is only wired for the Szego equation".into(),
            )),
            (Equation::Szego, Scheme::StrangSplit) => Err(Error::InvalidParameter(
                "the Szego equation has no linear part to split".into(),
            )),
        };
        let next = next.map_err(|e| match e {
            Error::NonFinite(_) => Error::BlowUp {
                t: t1,
                norm: f64::INFINITY,
                initial: self.initial_l2,
            },
            other => other,
        })?;
        let l2 = hs_norm(&next, SobolevIndex::L2);
        if !l2.is_finite() || l2 > BLOW_UP_FACTOR * self.initial_l2.max(f64::MIN_POSITIVE) {
            return Err(Error::BlowUp {
                t: t1,
                norm: l2,
                initial: self.initial_l2,
            });
        }
        self.state = next;
        self.step += 1;
        Ok(Some(t1))
    }
}

/// Output of [`evolve`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: SpectralField,
    pub series: NormSeries,
    pub snapshots: Vec<ConservedSnapshot>,
}

/// Runs `u0` to `cfg.t_end`, recording conserved quantities every
/// `cfg.record_every` steps (and at the final time).
pub fn evolve(u0: &SpectralField, cfg: EvolverConfig, equation: Equation) -> Result<Trajectory> {
    let mut integ = Integrator::new(u0, cfg, equation)?;
    let mut series = NormSeries::new(["mass", "momentum", "energy"]);
    let mut snapshots = Vec::new();
    let mut record = |integ: &Integrator| {
        let snap = ConservedSnapshot::of(integ.time(), integ.state());
        series.push(
            snap.t,
            vec![snap.mass, snap.momentum, snap.energy(equation)],
        );
        snapshots.push(snap);
    };
    record(&integ);
    while integ.advance()?.is_some() {
        if integ.should_record() {
            record(&integ);
        }
    }
    Ok(Trajectory {
        final_state: integ.into_state(),
        series,
        snapshots,
    })
}
