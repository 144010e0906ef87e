//! One-pole traveling waves of the cubic Szegő equation and their
//! ε-parametrized families.
//!
//! `V(t,x) = e^{-iωt} α / (1 - p e^{-ict} e^{ix})` with `ω = α²/(1-p²)²` and
//! `c = α²/(1-p²)`. For a target regularity `s`, the two families use
//! `p = √(1-ε)` and `α₁ = ε^{s+1/2}`, `α₂ = α₁ (1 + |ln ε|^{-1/4})`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{tail_modes, SobolevIndex, SpectralField, TAIL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyBranch {
    /// `α = ε^{s+1/2}`
    First,
    /// `α = ε^{s+1/2}(1 + δ(ε))`
    Second,
}

impl FamilyBranch {
    pub fn index(self) -> u8 {
        match self {
            FamilyBranch::First => 1,
            FamilyBranch::Second => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzegoParams {
    pub eps: f64,
    pub s: f64,
    pub branch: FamilyBranch,
    pub alpha: f64,
    pub p: f64,
    pub omega: f64,
    pub c: f64,
    pub delta: f64,
}

/// `δ(ε) = |ln ε|^{-1/4}`
pub fn delta_of(eps: f64) -> f64 {
    eps.ln().abs().powf(-0.25)
}

fn check_eps_s(eps: f64, s: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0,1), got {eps}"
        )));
    }
    if !(s > 0.0 && s < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "s must lie in (0,1/2), got {s}"
        )));
    }
    Ok(())
}

pub fn make_params(eps: f64, s: f64, branch: FamilyBranch) -> Result<SzegoParams> {
    check_eps_s(eps, s)?;
    let delta = match branch {
        FamilyBranch::First => 0.0,
        FamilyBranch::Second => delta_of(eps),
    };
    let alpha = eps.powf(s + 0.5) * (1.0 + delta);
    Ok(SzegoParams::assemble(eps, s, branch, alpha, delta))
}

impl SzegoParams {
    fn assemble(eps: f64, s: f64, branch: FamilyBranch, alpha: f64, delta: f64) -> Self {
        // 1 - p² is carried as eps itself, never recomputed from p.
        let a2 = alpha * alpha;
        SzegoParams {
            eps,
            s,
            branch,
            alpha,
            p: (1.0 - eps).sqrt(),
            omega: a2 / (eps * eps),
            c: a2 / eps,
            delta,
        }
    }

    /// Traveling wave with an arbitrary amplitude and pole radius; `s` is
    /// only carried along as metadata.
    pub fn from_amplitude(alpha: f64, p: f64, s: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) || !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need alpha > 0 and p in (0,1), got alpha={alpha}, p={p}"
            )));
        }
        let eps = 1.0 - p * p;
        let mut out = Self::assemble(eps, s, FamilyBranch::First, alpha, 0.0);
        out.p = p;
        Ok(out)
    }

    /// Re-checks the type invariants, e.g. after loading from disk.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("SzegoParams: {what}")));
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps outside (0,1)");
        }
        let ok = self.alpha > 0.0 && self.alpha.is_finite() && self.delta >= 0.0;
        if !ok {
            return bad("alpha must be positive and delta nonnegative");
        }
        if ((self.p * self.p) - (1.0 - self.eps)).abs() > 4.0 * f64::EPSILON {
            return bad("p² != 1 - eps");
        }
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-14 * b.abs();
        let a2 = self.alpha * self.alpha;
        if !rel(self.omega, a2 / (self.eps * self.eps)) || !rel(self.c, a2 / self.eps) {
            return bad("omega/c inconsistent with alpha and p");
        }
        if !rel(self.omega, self.c / self.eps) {
            return bad("omega != c/(1-p²)");
        }
        Ok(())
    }

    /// Smallest mode count meeting the `p^K <= 1e-16` tail bound.
    pub fn required_modes(&self) -> usize {
        tail_modes(self.p)
    }

    fn check_modes(&self, max_mode: usize) -> Result<()> {
        let required = self.required_modes();
        if max_mode < required {
            Err(Error::TailBound {
                given: max_mode,
                required,
            })
        } else {
            Ok(())
        }
    }

    /// JSON object with keys `eps,s,branch,alpha,p,omega,c,delta`; reals
    /// carry 17 significant digits, `branch` is 1 or 2.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"eps\":{},\"s\":{},\"branch\":{},\"alpha\":{},\"p\":{},\"omega\":{},\"c\":{},\"delta\":{}}}",
            sig17(self.eps),
            sig17(self.s),
            self.branch.index(),
            sig17(self.alpha),
            sig17(self.p),
            sig17(self.omega),
            sig17(self.c),
            sig17(self.delta),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            eps: f64,
            s: f64,
            branch: u8,
            alpha: f64,
            p: f64,
            omega: f64,
            c: f64,
            delta: f64,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let branch = match raw.branch {
            1 => FamilyBranch::First,
            2 => FamilyBranch::Second,
            b => return Err(Error::Parse(format!("branch must be 1 or 2, got {b}"))),
        };
        let out = SzegoParams {
            eps: raw.eps,
            s: raw.s,
            branch,
            alpha: raw.alpha,
            p: raw.p,
            omega: raw.omega,
            c: raw.c,
            delta: raw.delta,
        };
        out.validate()?;
        Ok(out)
    }
}

/// 17 significant digits in scientific notation.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn family_field(
    params: &SzegoParams,
    t: f64,
    max_mode: usize,
    speed: f64,
) -> Result<SpectralField> {
    params.check_modes(max_mode)?;
    let lnp = params.p.ln();
    let wt = params.omega * t;
    Ok(SpectralField::from_fn(max_mode, |k| {
        if k < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            let kf = k as f64;
            Complex64::from_polar(params.alpha * (kf * lnp).exp(), -(wt + speed * kf * t))
        }
    }))
}

/// Fourier coefficients of the Szegő traveling wave at time `t`:
/// `α e^{-iωt} p^k e^{-ickt}` for `k >= 0`.
pub fn szego_coeffs(params: &SzegoParams, t: f64, max_mode: usize) -> Result<SpectralField> {
    family_field(params, t, max_mode, params.c)
}

/// The half-wave comparison profile `v(t,x) = V(t, x - t)`:
/// `α e^{-iωt} p^k e^{-i(1+c)kt}`.
pub fn shifted_coeffs(params: &SzegoParams, t: f64, max_mode: usize) -> Result<SpectralField> {
    family_field(params, t, max_mode, 1.0 + params.c)
}

/// Result of a truncated series together with a bound on the dropped tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// `Σ_{k>=0} (1+k²)^s r^k e^{-iθk}`, stopped once the (eventually
/// decreasing) summand drops below `1e-16` of the running sum of moduli.
pub fn weighted_geometric_sum(s: f64, r: f64, theta: f64) -> SeriesSum {
    assert!((0.0..1.0).contains(&r), "ratio must lie in [0,1)");
    let sigma = SobolevIndex::of(s);
    let lnr = r.ln();
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    let mut abs_sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut k: u64 = 0;
    loop {
        let kf = k as f64;
        let term = sigma.weight(k as i64) * (kf * lnr).exp();
        let z = Complex64::from_polar(term, -theta * kf);
        re.add(z.re);
        im.add(z.im);
        abs_sum += term;
        if term < prev && term <= TAIL_TOL * abs_sum {
            // later ratios are bounded by the current one
            let q = r * ((1.0 + (kf + 1.0).powi(2)) / (1.0 + kf * kf)).powf(s);
            let tail_bound = term * q / (1.0 - q);
            return SeriesSum {
                value: Complex64::new(re.total(), im.total()),
                tail_bound,
                terms: k as usize + 1,
            };
        }
        prev = term;
        k += 1;
    }
}

/// `⟨V_A(t), V_B(t)⟩_{H^s}` in closed form.
pub fn pair_hs_inner_closed(a: &SzegoParams, b: &SzegoParams, t: f64, s: f64) -> Result<Complex64> {
    if a.eps != b.eps {
        return Err(Error::InvalidParameter(format!(
            "inner product needs a shared eps, got {} and {}",
            a.eps, b.eps
        )));
    }
    let sum = weighted_geometric_sum(s, 1.0 - a.eps, (a.c - b.c) * t);
    let phase = Complex64::from_polar(a.alpha * b.alpha, -(a.omega - b.omega) * t);
    Ok(phase * sum.value)
}

/// `t_ε = ε^{1-2s} |ln ε|^{1/2}`
pub fn separation_time(eps: f64, s: f64) -> Result<f64> {
    check_eps_s(eps, s)?;
    Ok(eps.powf(1.0 - 2.0 * s) * eps.ln().abs().sqrt())
}

/// `‖V⁽¹⁾(0) - V⁽²⁾(0)‖_{H^s} = |α₁ - α₂| (Σ (1+k²)^s (1-ε)^k)^{1/2}`
pub fn initial_distance_closed(eps: f64, s: f64) -> Result<f64> {
    let a = make_params(eps, s, FamilyBranch::First)?;
    let b = make_params(eps, s, FamilyBranch::Second)?;
    let sum = weighted_geometric_sum(s, 1.0 - eps, 0.0);
    Ok((a.alpha - b.alpha).abs() * sum.value.re.sqrt())
}

/// Closed-form H^s geometry of the two families at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    pub norm_first: f64,
    pub norm_second: f64,
    pub cross: Complex64,
    pub distance: f64,
}

pub fn pair_geometry(eps: f64, s: f64, t: f64) -> Result<PairGeometry> {
    let a = make_params(eps, s, FamilyBranch::First)?;
    let b = make_params(eps, s, FamilyBranch::Second)?;
    let base = weighted_geometric_sum(s, 1.0 - eps, 0.0).value.re;
    let n1 = a.alpha * a.alpha * base;
    let n2 = b.alpha * b.alpha * base;
    let cross = pair_hs_inner_closed(&a, &b, t, s)?;
    let d2 = (n1 + n2 - 2.0 * cross.re).max(0.0);
    Ok(PairGeometry {
        norm_first: n1.sqrt(),
        norm_second: n2.sqrt(),
        cross,
        distance: d2.sqrt(),
    })
}

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
