//! Closed-form and brute-force realizations of the smoothing and a-priori
//! estimates, together with the probes that turn `≲` statements into
//! measurable ratios and log-log slopes.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::series::NormSeries;
use crate::spectral::{
    cubic_term, dealias_len, fft_len, full_cubic, full_product, hs_norm, project_neg, tail_modes,
    SobolevIndex, SpectralField, TAIL_TOL,
};
use crate::szego::{shifted_coeffs, Neumaier, SzegoParams};

/// Phase of the oscillatory Duhamel factor for mode `k`:
/// `Ω = ω - k(2 + c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscPhase {
    pub t: f64,
    pub k: u64,
    pub omega: f64,
    pub c: f64,
}

impl OscPhase {
    pub fn big_omega(&self) -> f64 {
        self.omega - self.k as f64 * (2.0 + self.c)
    }

    /// `ω̃ = ω / (2 + c)`, the real-valued resonant mode.
    pub fn resonant_mode(omega: f64, c: f64) -> f64 {
        omega / (2.0 + c)
    }

    /// `N = [ω / (2 + c)]`
    pub fn resonant_index(omega: f64, c: f64) -> u64 {
        Self::resonant_mode(omega, c).floor() as u64
    }
}

/// `|Ω| t` below which Λ switches to its Taylor expansion.
pub const RESONANCE_SEAM: f64 = 1e-8;

/// `Λ = ∫₀^t e^{-iτΩ} dτ`
pub fn lambda_osc(phase: OscPhase) -> Complex64 {
    lambda_raw(phase.t, phase.big_omega())
}

/// [`lambda_osc`] in terms of the phase rate directly.
pub fn lambda_raw(t: f64, big_omega: f64) -> Complex64 {
    let x = big_omega * t;
    if x.abs() < RESONANCE_SEAM {
        t * Complex64::new(1.0 - x * x / 6.0, -0.5 * x)
    } else {
        // (1 - e^{-ix}) / (iΩ) without the cancellation in 1 - e^{-ix}
        let half = (0.5 * x).sin();
        Complex64::new(x.sin(), -2.0 * half * half) / big_omega
    }
}

/// `|Λ|² = (2 sin(Ωt/2) / Ω)²`
fn lambda_norm_sqr(t: f64, big_omega: f64) -> f64 {
    let x = big_omega * t;
    if x.abs() < RESONANCE_SEAM {
        lambda_raw(t, big_omega).norm_sqr()
    } else {
        let r = 2.0 * (0.5 * x).sin() / big_omega;
        r * r
    }
}

/// Least-squares fit of `ln(value)` against `ln(eps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl ScalingFit {
    pub fn fit(points: Vec<(f64, f64)>) -> Result<ScalingFit> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "scaling fit needs at least two points".into(),
            ));
        }
        if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
            return Err(Error::InvalidParameter(
                "scaling fit needs strictly positive abscissae and values".into(),
            ));
        }
        let n = points.len() as f64;
        let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(Error::InvalidParameter(
                "scaling fit needs distinct abscissae".into(),
            ));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r2 = if syy == 0.0 {
            1.0
        } else {
            (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
        };
        Ok(ScalingFit {
            points,
            slope,
            intercept,
            r2,
        })
    }
}

fn check_pole(p: f64) -> Result<()> {
    if p.is_nan() || p >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "pole modulus must be < 1, got {p}"
        )));
    }
    Ok(())
}

fn check_pole_modes(p: f64, max_mode: usize) -> Result<()> {
    check_pole(p)?;
    if p > 0.0 {
        let required = tail_modes(p);
        if max_mode < required {
            return Err(Error::TailBound {
                given: max_mode,
                required,
            });
        }
    }
    Ok(())
}

/// Negative-frequency part of `v|v|²` for `v = A/(1 - P e^{ix})`:
/// coefficient `A α² conj(P)^k / (1 - p²)²` at mode `-k`, `k >= 1`.
pub fn negative_part_closed(
    a: Complex64,
    pole: Complex64,
    max_mode: usize,
) -> Result<SpectralField> {
    let p = pole.norm();
    check_pole_modes(p, max_mode)?;
    let alpha2 = a.norm_sqr();
    let one_minus = 1.0 - p * p;
    let pref = a * alpha2 / (one_minus * one_minus);
    let pc = pole.conj();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * max_mode + 1];
    let mut power = Complex64::new(1.0, 0.0);
    for k in 1..=max_mode {
        power *= pc;
        coeffs[max_mode - k] = pref * power;
    }
    SpectralField::new(max_mode, coeffs)
}

/// Same quantity by building `v` as a truncated series and projecting the
/// dealiased cubic product.
pub fn negative_part_bruteforce(
    a: Complex64,
    pole: Complex64,
    max_mode: usize,
) -> Result<SpectralField> {
    check_pole_modes(pole.norm(), max_mode)?;
    let lnp = pole.norm().ln();
    let arg = pole.arg();
    let v = SpectralField::from_fn(max_mode, |k| {
        if k < 0 {
            Complex64::new(0.0, 0.0)
        } else if k == 0 {
            a
        } else {
            a * Complex64::from_polar((k as f64 * lnp).exp(), k as f64 * arg)
        }
    });
    Ok(project_neg(&cubic_term(&v, &v, &v)))
}

fn check_duhamel_regime(s: f64, sigma: f64) -> Result<()> {
    let a = (0.0..0.5).contains(&sigma) && s > 0.0 && s < 0.5;
    let b = sigma >= 0.5 && sigma < 1.0 / (4.0 * s) && s > 0.25 && s < 0.5;
    if a || b {
        Ok(())
    } else {
        Err(Error::Regime(format!(
            "(s, sigma) = ({s}, {sigma}) lies outside sigma in [0,1/2) or sigma in [1/2, 1/(4s)) with s in (1/4,1/2)"
        )))
    }
}

fn check_unit_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::InvalidParameter(
            "time grid must be nonempty and inside [0,1]".into(),
        ));
    }
    Ok(())
}

/// Uniform grid `j/(n-1)`, `j = 0..n`, on `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..n).map(|j| j as f64 / (n - 1) as f64).collect(),
    }
}

/// `Ŵ(t, k) = α³/(1-p²)² p^k Λ(t, k, ω, c)` at mode `-k`, `k = 1..=K`.
pub fn duhamel_field(params: &SzegoParams, t: f64, max_mode: usize) -> SpectralField {
    let pref = params.alpha.powi(3) / (params.eps * params.eps);
    let lnp = params.p.ln();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * max_mode + 1];
    for k in 1..=max_mode {
        let phase = OscPhase {
            t,
            k: k as u64,
            omega: params.omega,
            c: params.c,
        };
        coeffs[max_mode - k] = pref * (k as f64 * lnp).exp() * lambda_osc(phase);
    }
    SpectralField::new(max_mode, coeffs).expect("finite Duhamel coefficients")
}

/// Outcome of a Duhamel smoothing evaluation.
#[derive(Debug, Clone)]
pub struct DuhamelNorm {
    pub sup_norm: f64,
    pub per_t: NormSeries,
    pub max_mode: usize,
    /// `ω̃`, logged only.
    pub resonant_mode: f64,
    /// `N = [ω̃]`, logged only.
    pub resonant_index: u64,
}

/// `sup_t ‖Ŵ(t,·)‖_{H^σ}` over `t_grid`.
pub fn duhamel_negative_norm(
    params: &SzegoParams,
    sigma: SobolevIndex,
    t_grid: &[f64],
    max_mode: usize,
) -> Result<DuhamelNorm> {
    check_duhamel_regime(params.s, sigma.value())?;
    check_unit_grid(t_grid)?;
    let pref = params.alpha.powi(3) / (params.eps * params.eps);
    let lnp = params.p.ln();
    // weight_k = (1+k²)^σ p^{2k}
    let weights: Vec<f64> = (1..=max_mode)
        .map(|k| sigma.weight(k as i64) * (2.0 * k as f64 * lnp).exp())
        .collect();
    let mut per_t = NormSeries::new(["duhamel_hsigma"]);
    let mut sup = 0.0f64;
    for &t in t_grid {
        let mut acc = Neumaier::default();
        for (i, w) in weights.iter().enumerate() {
            let k = (i + 1) as f64;
            acc.add(w * lambda_norm_sqr(t, params.omega - k * (2.0 + params.c)));
        }
        let norm = pref * acc.total().max(0.0).sqrt();
        sup = sup.max(norm);
        per_t.push(t, vec![norm]);
    }
    Ok(DuhamelNorm {
        sup_norm: sup,
        per_t,
        max_mode,
        resonant_mode: OscPhase::resonant_mode(params.omega, params.c),
        resonant_index: OscPhase::resonant_index(params.omega, params.c),
    })
}

/// `Ŵ(t)` by composite Simpson quadrature of `τ ↦ U(-τ) P_{<0}(|v(τ)|² v(τ))`
/// with `v` generated from its Fourier series at every node.
pub fn duhamel_quadrature(
    params: &SzegoParams,
    t: f64,
    max_mode: usize,
    panels: usize,
) -> Result<SpectralField> {
    let n = panels.max(2) + panels % 2;
    let h = t / n as f64;
    let mut acc = vec![Complex64::new(0.0, 0.0); 2 * max_mode + 1];
    for i in 0..=n {
        let tau = i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let v = shifted_coeffs(params, tau, max_mode)?;
        let forcing = project_neg(&cubic_term(&v, &v, &v));
        for (slot, (k, c)) in acc.iter_mut().zip(forcing.modes()) {
            *slot += c * Complex64::from_polar(w, tau * k.unsigned_abs() as f64);
        }
    }
    let scale = h / 3.0;
    SpectralField::new(max_mode, acc.into_iter().map(|c| c * scale).collect())
}

/// A-priori bounds of the comparison profile `v_ε` over a time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VestBounds {
    pub linf: f64,
    pub hsig: f64,
}

pub fn vest_bounds(
    params: &SzegoParams,
    sigma: SobolevIndex,
    t_grid: &[f64],
) -> Result<VestBounds> {
    if sigma.value() > 1.0 {
        return Err(Error::InvalidParameter("sigma must lie in [0,1]".into()));
    }
    check_unit_grid(t_grid)?;
    let k = params.required_modes();
    let n = fft_len(4 * (2 * k + 1));
    let mut out = VestBounds {
        linf: 0.0,
        hsig: 0.0,
    };
    for &t in t_grid {
        let v = shifted_coeffs(params, t, k)?;
        out.linf = out.linf.max(v.grid_sup(n));
        out.hsig = out.hsig.max(hs_norm(&v, sigma));
    }
    Ok(out)
}

/// `Σ_{k>=0} (1-ε)^k k^{2σ}` over `k = 0..=K`; errors when the neglected
/// tail exceeds `1e-16` of the total.
pub fn geometric_moment(eps: f64, sigma: f64, max_mode: usize) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) || !(0.0..=1.0).contains(&sigma) {
        return Err(Error::InvalidParameter(format!(
            "need eps in (0,1) and sigma in [0,1], got eps={eps}, sigma={sigma}"
        )));
    }
    let lnr = (1.0 - eps).ln();
    let term = |k: u64| -> f64 {
        let kf = k as f64;
        let pow = if k == 0 {
            if sigma == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            kf.powf(2.0 * sigma)
        };
        pow * (kf * lnr).exp()
    };
    let tail_after = |k: u64, last: f64| -> f64 {
        let kf = k.max(1) as f64;
        let q = (1.0 - eps) * ((kf + 1.0) / kf).powf(2.0 * sigma);
        if q >= 1.0 {
            f64::INFINITY
        } else {
            last * q / (1.0 - q)
        }
    };
    let mut acc = Neumaier::default();
    for k in 0..=max_mode as u64 {
        acc.add(term(k));
    }
    let total = acc.total();
    if tail_after(max_mode as u64, term(max_mode as u64)) <= TAIL_TOL * total {
        return Ok(total);
    }
    let mut k = max_mode as u64;
    let mut running = total;
    loop {
        k += 1;
        let t = term(k);
        running += t;
        if tail_after(k, t) <= TAIL_TOL * running {
            return Err(Error::TailBound {
                given: max_mode,
                required: k as usize,
            });
        }
    }
}

fn check_probe_sigma(sigma: SobolevIndex) -> Result<()> {
    if sigma.value() <= 0.5 {
        return Err(Error::InvalidParameter(format!(
            "probe needs sigma > 1/2, got {}",
            sigma.value()
        )));
    }
    Ok(())
}

/// `‖f‖_{L∞} / (‖f‖_{L²}^{1-1/(2σ)} ‖f‖_{H^σ}^{1/(2σ)})`
pub fn interpolation_probe(f: &SpectralField, sigma: SobolevIndex) -> Result<f64> {
    check_probe_sigma(sigma)?;
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "interpolation probe of the zero field".into(),
        ));
    }
    let th = 1.0 / (2.0 * sigma.value());
    let linf = f.sup_norm();
    let l2 = hs_norm(f, SobolevIndex::L2);
    let hs = hs_norm(f, sigma);
    Ok(linf / (l2.powf(1.0 - th) * hs.powf(th)))
}

/// `‖fg‖_{H^σ} / (‖f‖_{H^σ}‖g‖_{L∞} + ‖g‖_{H^σ}‖f‖_{L∞})`
pub fn product_probe(f: &SpectralField, g: &SpectralField, sigma: SobolevIndex) -> Result<f64> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::InvalidParameter(
            "product probe needs two nonzero fields".into(),
        ));
    }
    let lhs = hs_norm(&full_product(f, g), sigma);
    let rhs = hs_norm(f, sigma) * g.sup_norm() + hs_norm(g, sigma) * f.sup_norm();
    Ok(lhs / rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QKind {
    /// Terms linear in `w`.
    Q1,
    /// Terms quadratic in `w`.
    Q2,
    /// The cubic term `w² w̄`.
    Q3,
}

/// Left-to-right ratios of a perturbation lemma, in its `H^σ` and `L²` forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QRatios {
    pub h_sigma: f64,
    pub l2: f64,
}

impl QRatios {
    pub fn max(&self) -> f64 {
        self.h_sigma.max(self.l2)
    }
}

/// Reusable evaluator for [`q_lemma_probe`]: holds `v_ε(0)` on a grid
/// wide enough for perturbations up to a given mode count.
pub struct QProbe {
    eps: f64,
    s: f64,
    sigma: SobolevIndex,
    w_modes: usize,
    max_mode: usize,
    grid: usize,
    v: SpectralField,
    v_grid: Vec<Complex64>,
}

impl QProbe {
    pub fn new(params: &SzegoParams, sigma: SobolevIndex, w_modes: usize) -> Result<QProbe> {
        check_probe_sigma(sigma)?;
        if !(params.s > 0.25 && params.s < 0.5) {
            return Err(Error::Regime(format!(
                "q-lemma probes need s in (1/4,1/2), got {}",
                params.s
            )));
        }
        let kv = params.required_modes();
        // products of three factors with at most two copies of v
        let max_mode = kv + 2 * w_modes.max(1);
        let grid = dealias_len(max_mode);
        let v = shifted_coeffs(params, 0.0, kv)?;
        Ok(QProbe {
            eps: params.eps,
            s: params.s,
            sigma,
            w_modes: w_modes.max(1),
            max_mode,
            grid,
            v_grid: v.to_grid(grid),
            v,
        })
    }

    fn norms(&self, prod: Vec<Complex64>) -> (f64, f64) {
        let f = SpectralField::from_grid(prod, self.max_mode);
        (hs_norm(&f, self.sigma), hs_norm(&f, SobolevIndex::L2))
    }

    pub fn eval(&self, w: &SpectralField, which: QKind) -> Result<QRatios> {
        if w.is_zero() {
            return Ok(QRatios {
                h_sigma: 0.0,
                l2: 0.0,
            });
        }
        if w.max_mode() > self.w_modes {
            return q_lemma_direct(w, self, which);
        }
        let wg = w.embed(self.max_mode).to_grid(self.grid);
        let v = &self.v_grid;
        let sg = self.sigma.value();
        let eps = self.eps;
        let s = self.s;
        let wl2 = hs_norm(w, SobolevIndex::L2);
        let whs = hs_norm(w, self.sigma);
        let th = 1.0 / (2.0 * sg);
        let zip3 = |f: &dyn Fn(Complex64, Complex64) -> Complex64| -> Vec<Complex64> {
            wg.iter().zip(v).map(|(a, b)| f(*a, *b)).collect()
        };
        let (lhs_h, lhs_l) = match which {
            QKind::Q1 => {
                let a = self.norms(zip3(&|w, v| w * v * v.conj()));
                let b = self.norms(zip3(&|w, v| w.conj() * v * v));
                (a.0 + b.0, a.1 + b.1)
            }
            QKind::Q2 => {
                let a = self.norms(zip3(&|w, v| w * w * v.conj()));
                let b = self.norms(zip3(&|w, v| w * w.conj() * v));
                (a.0 + b.0, a.1 + 2.0 * b.1)
            }
            QKind::Q3 => self.norms(zip3(&|w, _| w * w * w.conj())),
        };
        let (rhs_h, rhs_l) = q_rhs(which, eps, s, sg, th, wl2, whs);
        Ok(QRatios {
            h_sigma: lhs_h / rhs_h,
            l2: lhs_l / rhs_l,
        })
    }
}

fn q_rhs(which: QKind, eps: f64, s: f64, sg: f64, th: f64, wl2: f64, whs: f64) -> (f64, f64) {
    match which {
        QKind::Q1 => (
            eps.powf(2.0 * (s - 0.5)) * whs
                + eps.powf(2.0 * s - sg - 0.5) * wl2.powf(1.0 - th) * whs.powf(th),
            eps.powf(2.0 * s - 1.0) * wl2
                + eps.powf(2.0 * s - 0.5) * wl2.powf(1.0 - th) * whs.powf(th),
        ),
        QKind::Q2 => (
            eps.powf(s - 0.5) * whs.powf(1.0 + th) * wl2.powf(1.0 - th)
                + eps.powf(s - sg) * whs.powf(1.0 / sg) * wl2.powf(2.0 - 1.0 / sg),
            eps.powf(s - 0.5) * wl2.powf(2.0 - th) * whs.powf(th)
                + eps.powf(s) * wl2.powf(2.0 - 1.0 / sg) * whs.powf(1.0 / sg),
        ),
        QKind::Q3 => (
            wl2.powf(2.0 - 1.0 / sg) * whs.powf(1.0 + 1.0 / sg),
            wl2.powf(3.0 - 1.0 / sg) * whs.powf(1.0 / sg),
        ),
    }
}

fn q_lemma_direct(w: &SpectralField, probe: &QProbe, which: QKind) -> Result<QRatios> {
    let v = &probe.v;
    let norms = |f: SpectralField| (hs_norm(&f, probe.sigma), hs_norm(&f, SobolevIndex::L2));
    let (lhs_h, lhs_l) = match which {
        QKind::Q1 => {
            let a = norms(full_cubic(w, v, v));
            let b = norms(full_cubic(v, w, v));
            (a.0 + b.0, a.1 + b.1)
        }
        QKind::Q2 => {
            let a = norms(full_cubic(w, v, w));
            let b = norms(full_cubic(w, w, v));
            (a.0 + b.0, a.1 + 2.0 * b.1)
        }
        QKind::Q3 => norms(full_cubic(w, w, w)),
    };
    let sg = probe.sigma.value();
    let (rhs_h, rhs_l) = q_rhs(
        which,
        probe.eps,
        probe.s,
        sg,
        1.0 / (2.0 * sg),
        hs_norm(w, SobolevIndex::L2),
        hs_norm(w, probe.sigma),
    );
    Ok(QRatios {
        h_sigma: lhs_h / rhs_h,
        l2: lhs_l / rhs_l,
    })
}

/// Ratio of a perturbation lemma's left side to its right side (constant 1),
/// with `v_ε` taken at `t = 0`.
pub fn q_lemma_probe(
    w: &SpectralField,
    params: &SzegoParams,
    sigma: SobolevIndex,
    which: QKind,
) -> Result<QRatios> {
    QProbe::new(params, sigma, w.max_mode())?.eval(w, which)
}

/// Seeded random trigonometric polynomial on `-K..=K` with i.i.d. complex
/// Gaussian coefficients of variance `(1+k²)^{-σ-0.6}`.
///
/// Each `(seed, index)` pair has its own stream and modes are drawn in the
/// order `0, 1, -1, 2, -2, …`, so the field of degree `K` is a truncation of
/// the field of any larger degree.
pub fn random_field(max_mode: usize, sigma: f64, seed: u64, index: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * max_mode + 1];
    let draw = |k: i64, rng: &mut ChaCha8Rng| {
        let var = (1.0 + (k * k) as f64).powf(-sigma - 0.6);
        let sd = (0.5 * var).sqrt();
        Complex64::new(sd * std.sample(rng), sd * std.sample(rng))
    };
    coeffs[max_mode] = draw(0, &mut rng);
    for k in 1..=max_mode as i64 {
        coeffs[max_mode + k as usize] = draw(k, &mut rng);
        coeffs[max_mode - k as usize] = draw(-k, &mut rng);
    }
    SpectralField::new(max_mode, coeffs).expect("finite random coefficients")
}

/// Outcome of [`gronwall_extremal`].
#[derive(Debug, Clone)]
pub struct GronwallRun {
    pub max_ratio: f64,
    pub window_end: f64,
    pub series: NormSeries,
}

/// Number of uniform RK4 steps on the Gronwall window.
pub const GRONWALL_STEPS: usize = 10_000;

/// Integrates the equality case `g' = C g / ε`, `g(0) = A ε^θ` on
/// `[0, ε |ln ε|^{1/2}]` and reports `max g(t) / ε^{θ/2}`.
pub fn gronwall_extremal(theta: f64, c: f64, eps: f64, a: f64) -> Result<GronwallRun> {
    let ok = theta > 0.0 && c >= 0.0 && a > 0.0 && eps > 0.0 && eps < 1.0;
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "need theta > 0, C >= 0, A > 0, eps in (0,1); got theta={theta}, C={c}, A={a}, eps={eps}"
        )));
    }
    let log_eps = eps.ln().abs();
    let smallness = a * eps.powf(theta / 2.0) * (c * c * log_eps.sqrt()).exp();
    if smallness >= 1.0 {
        return Err(Error::Regime(format!(
            "A eps^(theta/2) exp(C^2 |ln eps|^(1/2)) = {smallness:.4} >= 1"
        )));
    }
    let window_end = eps * log_eps.sqrt();
    let h = window_end / GRONWALL_STEPS as f64;
    let rate = c / eps;
    let scale = eps.powf(theta / 2.0);
    let mut g = a * eps.powf(theta);
    let mut series = NormSeries::new(["g", "ratio"]);
    let record_every = GRONWALL_STEPS / 100;
    series.push(0.0, vec![g, g / scale]);
    let mut max_ratio = g / scale;
    for step in 1..=GRONWALL_STEPS {
        let k1 = rate * g;
        let k2 = rate * (g + 0.5 * h * k1);
        let k3 = rate * (g + 0.5 * h * k2);
        let k4 = rate * (g + h * k3);
        g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        max_ratio = max_ratio.max(g / scale);
        if step % record_every == 0 {
            series.push(step as f64 * h, vec![g, g / scale]);
        }
    }
    Ok(GronwallRun {
        max_ratio,
        window_end,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_gk;
    use crate::szego::{make_params, FamilyBranch};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn negative_part_examples() {
        assert!(negative_part_closed(c(1.0, 0.0), c(0.0, 0.0), 8)
            .unwrap()
            .is_zero());
        let f = negative_part_bruteforce(c(1.0, 0.0), c(0.0, 0.0), 8).unwrap();
        assert!(f.coeffs().iter().all(|z| z.norm() < 1e-15));

        let f = negative_part_closed(c(1.0, 0.0), c(0.5, 0.0), 60).unwrap();
        assert!((f.get(-1) - c(8.0 / 9.0, 0.0)).norm() < 1e-15);
        assert_eq!(f.get(0), c(0.0, 0.0));
        let g = negative_part_bruteforce(c(1.0, 0.0), c(0.5, 0.0), 60).unwrap();
        assert!((g.get(-1) - c(8.0 / 9.0, 0.0)).norm() < 1e-13);

        let rot = Complex64::from_polar(1.0, 0.7);
        let h = negative_part_closed(rot, c(0.5, 0.0), 60).unwrap();
        for (a, b) in h.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b * rot).norm() < 1e-15);
        }

        assert!(negative_part_closed(c(1.0, 0.0), c(1.0, 0.0), 8).is_err());
        assert!(matches!(
            negative_part_closed(c(1.0, 0.0), c(0.9, 0.0), 10),
            Err(Error::TailBound { .. })
        ));
    }

    #[test]
    fn negative_part_closed_matches_bruteforce() {
        let a = c(1.0, 1.0);
        let pole = Complex64::from_polar(0.9, 0.3);
        let closed = negative_part_closed(a, pole, 1024).unwrap();
        let brute = negative_part_bruteforce(a, pole, 1024).unwrap();
        let gap = closed
            .coeffs()
            .iter()
            .zip(brute.coeffs())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-10, "gap {gap}");

        // geometric decay with ratio |P|
        let pts: Vec<(f64, f64)> = (1..=50).map(|k| (k as f64, brute.get(-k).norm())).collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
        let slope = pts
            .iter()
            .map(|p| (p.0 - mx) * (p.1.ln() - my))
            .sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 0.9f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn lambda_examples() {
        let z = lambda_raw(2.5, 0.0);
        assert_eq!(z, c(2.5, 0.0));
        let z = lambda_raw(1.0, PI);
        let want = c(0.0, -2.0 / PI); // 2/(iπ)
        assert!((z - want).norm() < 1e-15);

        let phase = OscPhase {
            t: 0.5,
            k: 3,
            omega: 7.0,
            c: 0.25,
        };
        assert_eq!(phase.big_omega(), 7.0 - 3.0 * 2.25);
        assert_eq!(lambda_osc(phase), lambda_raw(0.5, phase.big_omega()));
        assert_eq!(OscPhase::resonant_index(10.0, 0.5), 4);
    }

    #[test]
    fn lambda_continuous_across_seam() {
        let t = 0.8;
        let below = RESONANCE_SEAM * (1.0 - 1e-9) / t;
        let above = RESONANCE_SEAM * (1.0 + 1e-9) / t;
        let (zb, za) = (lambda_raw(t, below), lambda_raw(t, above));
        assert!((zb - za).norm() <= 1e-9 * t);
        for om in [below, above, 3e-9, 5e-7] {
            let q = adaptive_gk(
                |tau| Complex64::from_polar(1.0, -tau * om),
                0.0,
                t,
                1e-14,
                0.0,
            );
            assert!((lambda_raw(t, om) - q).norm() <= 1e-13 * q.norm());
        }
    }

    #[test]
    fn duhamel_support_and_trivial_limit() {
        let params = make_params(0.2, 0.4, FamilyBranch::First).unwrap();
        let k = params.required_modes();
        let w = duhamel_field(&params, 0.7, k);
        assert!(w
            .modes()
            .filter(|(m, _)| *m >= 0)
            .all(|(_, z)| z == c(0.0, 0.0)));

        let sigma = SobolevIndex::of(0.6);
        let grid = [0.3, 0.7];
        let res = duhamel_negative_norm(&params, sigma, &grid, k).unwrap();
        let direct = hs_norm(&duhamel_field(&params, 0.7, k), sigma);
        let from_series = res.per_t.column("duhamel_hsigma").unwrap()[1];
        assert!((direct - from_series).abs() <= 1e-12 * direct);

        let tiny = SzegoParams::from_amplitude(1e-9, params.p, 0.4).unwrap();
        let res = duhamel_negative_norm(&tiny, sigma, &grid, k).unwrap();
        assert!(res.sup_norm < 1e-20);
    }

    #[test]
    fn duhamel_regimes() {
        let sigma = SobolevIndex::of(0.6);
        let grid = unit_grid(4);
        let ok = make_params(0.2, 0.4, FamilyBranch::First).unwrap();
        assert!(duhamel_negative_norm(&ok, sigma, &grid, 100).is_ok());
        // 1/(4s) = 0.625 < 0.7
        assert!(matches!(
            duhamel_negative_norm(&ok, SobolevIndex::of(0.7), &grid, 100),
            Err(Error::Regime(_))
        ));
        let low_s = make_params(0.2, 0.2, FamilyBranch::First).unwrap();
        assert!(duhamel_negative_norm(&low_s, SobolevIndex::of(0.3), &grid, 100).is_ok());
        assert!(duhamel_negative_norm(&low_s, sigma, &grid, 100).is_err());
        assert!(duhamel_negative_norm(&ok, sigma, &[1.5], 100).is_err());
    }

    #[test]
    fn duhamel_matches_simpson_quadrature() {
        let params = make_params(0.1, 0.4, FamilyBranch::First).unwrap();
        let k = params.required_modes();
        let sigma = SobolevIndex::of(0.6);
        let quad = duhamel_quadrature(&params, 0.5, k, 4096).unwrap();
        let closed = duhamel_negative_norm(&params, sigma, &[0.5], k)
            .unwrap()
            .sup_norm;
        let q = hs_norm(&quad, sigma);
        assert!((q - closed).abs() <= 1e-6 * closed, "{q} vs {closed}");
    }

    #[test]
    fn vest_peak_at_origin() {
        let params = make_params(0.05, 0.3, FamilyBranch::First).unwrap();
        let b = vest_bounds(&params, SobolevIndex::of(1.0), &[0.0]).unwrap();
        let peak = params.alpha / (1.0 - params.p);
        assert!((b.linf - peak).abs() <= 1e-12 * peak);
        assert!(vest_bounds(&params, SobolevIndex::of(1.5), &[0.0]).is_err());
    }

    #[test]
    fn geometric_moment_examples() {
        for eps in [0.3, 0.05, 1e-3] {
            let k = crate::spectral::modes_for_eps(eps);
            let m = geometric_moment(eps, 0.0, k).unwrap();
            assert!((m * eps - 1.0).abs() < 1e-12);
        }
        let eps = 0.01;
        let mut prev = 0.0;
        for sigma in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let m = geometric_moment(eps, sigma, 20_000).unwrap();
            assert!(m > prev);
            prev = m;
        }
        assert!(matches!(
            geometric_moment(eps, 1.0, 100),
            Err(Error::TailBound { given: 100, .. })
        ));
    }

    #[test]
    fn probe_examples() {
        let one = SpectralField::mode(4, 0, c(1.0, 0.0));
        assert!((interpolation_probe(&one, SobolevIndex::of(1.0)).unwrap() - 1.0).abs() < 1e-14);
        for n in [1i64, 5, 40] {
            let f = SpectralField::mode(n as usize, n, c(1.0, 0.0));
            let r = interpolation_probe(&f, SobolevIndex::of(1.0)).unwrap();
            let want = (1.0 + (n * n) as f64).powf(-0.25);
            assert!((r - want).abs() < 1e-12 && r <= 1.0);
        }
        assert!(interpolation_probe(&SpectralField::zeros(3), SobolevIndex::of(1.0)).is_err());
        assert!(interpolation_probe(&one, SobolevIndex::of(0.5)).is_err());

        assert!((product_probe(&one, &one, SobolevIndex::of(0.7)).unwrap() - 0.5).abs() < 1e-14);
        let e1 = SpectralField::mode(1, 1, c(1.0, 0.0));
        let em1 = SpectralField::mode(1, -1, c(1.0, 0.0));
        let r = product_probe(&e1, &em1, SobolevIndex::of(1.0)).unwrap();
        assert!((r - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!(product_probe(
            &SpectralField::zeros(2),
            &SpectralField::zeros(2),
            SobolevIndex::of(1.0)
        )
        .is_err());
    }

    #[test]
    fn q_lemma_examples() {
        let params = make_params(0.1, 0.4, FamilyBranch::First).unwrap();
        let sigma = SobolevIndex::of(1.0);
        let zero = SpectralField::zeros(8);
        for which in [QKind::Q1, QKind::Q2, QKind::Q3] {
            let r = q_lemma_probe(&zero, &params, sigma, which).unwrap();
            assert_eq!(r.max(), 0.0);
        }
        let e1 = SpectralField::mode(8, 1, c(1.0, 0.0));
        let r = q_lemma_probe(&e1, &params, sigma, QKind::Q3).unwrap();
        // |w|²w = e^{ix}: H¹ norm √2 against 1·(√2)²; L² norm 1 against √2
        assert!((r.h_sigma - 2f64.sqrt() / 2.0).abs() < 1e-13);
        assert!((r.l2 - 1.0 / 2f64.sqrt()).abs() < 1e-13);

        // the grid evaluator and untruncated products agree
        let w = random_field(16, 0.75, 0, 3);
        let probe = QProbe::new(&params, SobolevIndex::of(0.75), 16).unwrap();
        for which in [QKind::Q1, QKind::Q2, QKind::Q3] {
            let a = probe.eval(&w, which).unwrap();
            let b = q_lemma_direct(&w, &probe, which).unwrap();
            assert!((a.h_sigma - b.h_sigma).abs() < 1e-10 * b.h_sigma);
            assert!((a.l2 - b.l2).abs() < 1e-10 * b.l2);
        }
        let low = make_params(0.1, 0.2, FamilyBranch::First).unwrap();
        assert!(q_lemma_probe(&e1, &low, sigma, QKind::Q1).is_err());
    }

    #[test]
    fn random_fields_nest() {
        let small = random_field(8, 0.75, 4, 9);
        let big = random_field(20, 0.75, 4, 9);
        assert_eq!(big.embed(8), small);
        assert_ne!(random_field(8, 0.75, 4, 10), small);
    }

    #[test]
    fn gronwall_examples() {
        let run = gronwall_extremal(1.0, 0.0, 1e-3, 1.0).unwrap();
        assert!((run.max_ratio - 1e-3f64.sqrt()).abs() < 1e-15);

        let eps = 1e-3f64;
        let run = gronwall_extremal(1.0, 1.0, eps, 1.0).unwrap();
        let closed = eps * eps.ln().abs().sqrt().exp() / eps.sqrt();
        assert!((run.max_ratio - closed).abs() < 1e-10 * closed);
        assert!((run.max_ratio - 0.4377).abs() < 1e-3);

        let mut prev = f64::INFINITY;
        for e in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8] {
            let r = gronwall_extremal(1.0, 1.0, e, 1.0).unwrap().max_ratio;
            assert!(r < prev);
            prev = r;
        }
        assert!(matches!(
            gronwall_extremal(1.0, 3.0, 1e-3, 1.0),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn scaling_fit_recovers_power_law() {
        let pts: Vec<_> = [0.1, 0.05, 0.01, 0.001]
            .iter()
            .map(|&e: &f64| (e, 3.0 * e.powf(0.58)))
            .collect();
        let fit = ScalingFit::fit(pts).unwrap();
        assert!((fit.slope - 0.58).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(ScalingFit::fit(vec![(0.1, 1.0)]).is_err());
        assert!(ScalingFit::fit(vec![(0.1, 1.0), (0.2, 0.0)]).is_err());
    }
}
