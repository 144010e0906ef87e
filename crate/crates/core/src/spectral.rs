//! Fourier-side representation of 2π-periodic functions.
//!
//! A [`SpectralField`] stores the coefficients `f̂(k)` for `k = -K..=K`,
//! negative modes first. Sobolev norms use the weight `(1 + k²)^σ` at every
//! mode, including `k = 0`.
//!
//! Pointwise products are evaluated on a zero-padded collocation grid of at
//! least `2(2K+1)` points, which is enough for a cubic product of three
//! degree-`K` trigonometric polynomials to be free of aliasing on the kept
//! modes.

use std::cell::RefCell;
use std::fmt::Write as _;
use std::io::BufRead;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative magnitude below which a geometric tail is treated as zero.
pub const TAIL_TOL: f64 = 1e-16;

/// Regularity exponent σ ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub const L2: SobolevIndex = SobolevIndex(0.0);

    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_finite() && sigma >= 0.0 {
            Ok(SobolevIndex(sigma))
        } else {
            Err(Error::InvalidParameter(format!(
                "Sobolev index must be finite and >= 0, got {sigma}"
            )))
        }
    }

    /// Panicking constructor for literals known to be valid.
    pub fn of(sigma: f64) -> Self {
        Self::new(sigma).expect("invalid Sobolev index")
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `(1 + k²)^σ`
    #[inline]
    pub fn weight(self, k: i64) -> f64 {
        if self.0 == 0.0 {
            1.0
        } else {
            (1.0 + (k as f64) * (k as f64)).powf(self.0)
        }
    }
}

/// Fourier coefficients on modes `-K..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    coeffs: Vec<Complex64>,
    max_mode: usize,
}

impl SpectralField {
    pub fn new(max_mode: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = 2 * max_mode + 1;
        if coeffs.len() != expected {
            return Err(Error::Length {
                got: coeffs.len(),
                expected,
            });
        }
        if let Some(i) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite(i as i64 - max_mode as i64));
        }
        Ok(SpectralField { coeffs, max_mode })
    }

    pub fn zeros(max_mode: usize) -> Self {
        SpectralField {
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * max_mode + 1],
            max_mode,
        }
    }

    /// Builds a field from a per-mode generator. Panics if the generator
    /// produces a non-finite value.
    pub fn from_fn(max_mode: usize, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let k = max_mode as i64;
        let coeffs: Vec<_> = (-k..=k).map(&mut f).collect();
        Self::new(max_mode, coeffs).expect("generator produced a non-finite coefficient")
    }

    /// Single Fourier mode `amp · e^{ikx}`.
    pub fn mode(max_mode: usize, k: i64, amp: Complex64) -> Self {
        assert!(k.unsigned_abs() as usize <= max_mode, "mode outside -K..=K");
        let mut f = Self::zeros(max_mode);
        f.coeffs[(k + max_mode as i64) as usize] = amp;
        f
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Iterator over `(k, f̂(k))`, `k` ascending.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k0 = -(self.max_mode as i64);
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (k0 + i as i64, *c))
    }

    /// Coefficient at mode `k`; zero outside `-K..=K`.
    pub fn get(&self, k: i64) -> Complex64 {
        let idx = k + self.max_mode as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Zero-pads (or truncates) to a new mode count.
    pub fn embed(&self, max_mode: usize) -> SpectralField {
        if max_mode == self.max_mode {
            return self.clone();
        }
        SpectralField::from_fn(max_mode, |k| self.get(k))
    }

    pub fn map_modes(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> SpectralField {
        let coeffs = self.modes().map(|(k, c)| f(k, c)).collect();
        SpectralField::new(self.max_mode, coeffs).expect("mode map produced a non-finite value")
    }

    pub fn scale(&self, factor: Complex64) -> SpectralField {
        self.map_modes(|_, c| c * factor)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Largest coefficient modulus over `k < 0`.
    pub fn negative_content(&self) -> f64 {
        self.coeffs[..self.max_mode]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Values at `x_j = 2πj/n`, `j = 0..n`; requires `n >= 2K+1`.
    pub fn to_grid(&self, n: usize) -> Vec<Complex64> {
        assert!(n > 2 * self.max_mode, "grid too coarse for the mode count");
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in self.modes() {
            buf[k.rem_euclid(n as i64) as usize] = c;
        }
        let (_, inv) = plans(n);
        inv.process(&mut buf);
        buf
    }

    /// Inverse of [`to_grid`](Self::to_grid): keeps modes `-K..=K` of the
    /// grid function's discrete Fourier transform.
    pub fn from_grid(values: Vec<Complex64>, max_mode: usize) -> SpectralField {
        Self::from_grid_checked(values, max_mode).expect("non-finite grid values")
    }

    /// [`from_grid`](Self::from_grid) that reports non-finite input as an
    /// error instead of panicking.
    pub fn from_grid_checked(mut values: Vec<Complex64>, max_mode: usize) -> Result<SpectralField> {
        let n = values.len();
        assert!(n > 2 * max_mode, "grid too coarse for the mode count");
        let (fwd, _) = plans(n);
        fwd.process(&mut values);
        let scale = 1.0 / n as f64;
        let k = max_mode as i64;
        let coeffs = (-k..=k)
            .map(|m| values[m.rem_euclid(n as i64) as usize] * scale)
            .collect();
        SpectralField::new(max_mode, coeffs)
    }

    /// Maximum modulus over an `n`-point collocation grid.
    pub fn grid_sup(&self, n: usize) -> f64 {
        self.to_grid(n).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `‖f‖_{L∞}` sampled on the `4(2K+1)`-point grid.
    pub fn sup_norm(&self) -> f64 {
        self.grid_sup(fft_len(4 * (2 * self.max_mode + 1)))
    }

    /// CSV dump with header `k,re,im`, one row per mode, `k` ascending.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * self.coeffs.len() + 16);
        out.push_str("k,re,im\n");
        for (k, c) in self.modes() {
            let _ = writeln!(out, "{k},{:e},{:e}", c.re, c.im);
        }
        out
    }

    /// Parses the `k,re,im` dump. Rows must cover a symmetric range
    /// `-K..=K` with `k` ascending.
    pub fn from_csv(reader: impl BufRead) -> Result<SpectralField> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty field dump".into()))??;
        if header.trim() != "k,re,im" {
            return Err(Error::Parse(format!("unexpected header {header:?}")));
        }
        let mut ks = Vec::new();
        let mut coeffs = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = |what: &str| {
                parts
                    .next()
                    .ok_or_else(|| Error::Parse(format!("row {}: missing {what}", lineno + 2)))
            };
            let k: i64 = next("k")?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))?;
            let re: f64 = next("re")?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))?;
            let im: f64 = next("im")?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))?;
            ks.push(k);
            coeffs.push(Complex64::new(re, im));
        }
        if coeffs.len() % 2 == 0 {
            return Err(Error::Parse("mode count must be odd (2K+1)".into()));
        }
        let max_mode = coeffs.len() / 2;
        let k0 = -(max_mode as i64);
        if ks.iter().enumerate().any(|(i, &k)| k != k0 + i as i64) {
            return Err(Error::Parse("modes must run -K..=K ascending".into()));
        }
        SpectralField::new(max_mode, coeffs)
    }
}

fn binary<F: Fn(Complex64, Complex64) -> Complex64>(
    a: &SpectralField,
    b: &SpectralField,
    op: F,
) -> SpectralField {
    let k = a.max_mode.max(b.max_mode);
    SpectralField::from_fn(k, |m| op(a.get(m), b.get(m)))
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        binary(self, rhs, |x, y| x + y)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        binary(self, rhs, |x, y| x - y)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.map_modes(|_, c| c * rhs)
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> Plans {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Smallest `2^a 3^b 5^c` that is `>= min`.
pub fn fft_len(min: usize) -> usize {
    let mut best = usize::MAX;
    let mut p2 = 1usize;
    while p2 < 2 * min.max(1) {
        let mut p3 = p2;
        while p3 < 2 * min.max(1) {
            let mut p5 = p3;
            while p5 < min {
                p5 *= 5;
            }
            best = best.min(p5);
            p3 *= 3;
        }
        p2 *= 2;
    }
    best
}

/// Collocation grid size used for cubic products on `K` modes.
pub fn dealias_len(max_mode: usize) -> usize {
    fft_len(2 * (2 * max_mode + 1))
}

/// Mode count for a one-pole profile with pole radius `p`: the smallest `K`
/// with `p^K <= 1e-16`.
pub fn tail_modes(p: f64) -> usize {
    if p <= 0.0 {
        return 1;
    }
    let k = (TAIL_TOL.ln() / p.ln()).ceil();
    (k as usize).max(1)
}

/// Mode policy for the ε-families: `K = ceil(2·16·ln 10 / ε)`, which gives
/// `(1-ε)^{K/2} <= 1e-16`.
pub fn modes_for_eps(eps: f64) -> usize {
    ((2.0 * 16.0 * std::f64::consts::LN_10) / eps).ceil() as usize
}

/// Upper bound on the tail `Σ_{k>K} p^k` relative to the head term.
pub fn geometric_tail_bound(p: f64, max_mode: usize) -> f64 {
    p.powi(max_mode as i32 + 1) / (1.0 - p)
}

/// `‖f‖_{H^σ}² = Σ_k (1+k²)^σ |f̂(k)|²`
pub fn hs_norm_sq(f: &SpectralField, sigma: SobolevIndex) -> f64 {
    f.modes().map(|(k, c)| sigma.weight(k) * c.norm_sqr()).sum()
}

pub fn hs_norm(f: &SpectralField, sigma: SobolevIndex) -> f64 {
    hs_norm_sq(f, sigma).sqrt()
}

/// `Σ_k (1+k²)^σ f̂(k) conj(ĝ(k))`, embedding both into the larger `K`.
pub fn hs_inner(f: &SpectralField, g: &SpectralField, sigma: SobolevIndex) -> Complex64 {
    let k = f.max_mode.max(g.max_mode) as i64;
    (-k..=k)
        .map(|m| sigma.weight(m) * f.get(m) * g.get(m).conj())
        .sum()
}

/// Szegő projector: keeps `k >= 0`.
pub fn project_nonneg(f: &SpectralField) -> SpectralField {
    f.map_modes(|k, c| if k >= 0 { c } else { Complex64::new(0.0, 0.0) })
}

/// Complementary projector: keeps `k < 0`.
pub fn project_neg(f: &SpectralField) -> SpectralField {
    f.map_modes(|k, c| if k < 0 { c } else { Complex64::new(0.0, 0.0) })
}

/// Free half-wave flow `e^{-it|D|}`.
pub fn half_wave_propagator(f: &SpectralField, t: f64) -> SpectralField {
    f.map_modes(|k, c| c * Complex64::from_polar(1.0, -t * k.unsigned_abs() as f64))
}

/// Coefficients of `u · conj(v) · w` on the common mode range, computed on a
/// dealiased grid and truncated back to `-K..=K`.
pub fn cubic_term(u: &SpectralField, v: &SpectralField, w: &SpectralField) -> SpectralField {
    let k = u.max_mode.max(v.max_mode).max(w.max_mode);
    let n = dealias_len(k);
    let ug = u.to_grid(n);
    let vg = if std::ptr::eq(u, v) {
        ug.clone()
    } else {
        v.to_grid(n)
    };
    let wg = if std::ptr::eq(u, w) {
        ug.clone()
    } else if std::ptr::eq(v, w) {
        vg.clone()
    } else {
        w.to_grid(n)
    };
    let prod: Vec<_> = ug
        .iter()
        .zip(&vg)
        .zip(&wg)
        .map(|((a, b), c)| a * b.conj() * c)
        .collect();
    SpectralField::from_grid(prod, k)
}

/// `|u|²u`, truncated to the modes of `u`.
pub fn cubic_self(u: &SpectralField) -> SpectralField {
    cubic_term(u, u, u)
}

/// Untruncated `u · conj(v) · w`: inputs are embedded into `3K` first.
pub fn full_cubic(u: &SpectralField, v: &SpectralField, w: &SpectralField) -> SpectralField {
    let k = 3 * u.max_mode.max(v.max_mode).max(w.max_mode);
    cubic_term(&u.embed(k), &v.embed(k), &w.embed(k))
}

/// Untruncated product `f · g` on modes `-2K..=2K`.
pub fn full_product(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let k = 2 * f.max_mode.max(g.max_mode);
    let n = fft_len(2 * k + 1);
    let fg = f.embed(k).to_grid(n);
    let gg = g.embed(k).to_grid(n);
    let prod = fg.iter().zip(&gg).map(|(a, b)| a * b).collect();
    SpectralField::from_grid(prod, k)
}
