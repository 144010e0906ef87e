//! Reference quadratures used as independent oracles for the closed forms.

use std::collections::BinaryHeap;

use num_complex::Complex64;

/// Composite Simpson rule on `panels` panels (rounded up to even).
pub fn simpson<T, F>(f: F, a: f64, b: f64, panels: usize) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
    F: Fn(f64) -> T,
{
    let n = panels.max(2) + panels % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc + f(a + i as f64 * h) * w;
    }
    acc * (h / 3.0)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

struct Part {
    lo: f64,
    hi: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Part {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Part {}

impl PartialOrd for Part {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Part {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn part(f: &impl Fn(f64) -> Complex64, lo: f64, hi: f64) -> Part {
    let (value, err) = gk15(f, lo, hi);
    Part { lo, hi, value, err }
}

/// Globally adaptive 15-point Gauss–Kronrod integration of a complex
/// integrand, bisecting the interval with the largest error estimate until
/// the summed estimate falls below `rel_tol · |I|` (or `abs_floor`).
pub fn adaptive_gk(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Complex64 {
    let mut heap = BinaryHeap::new();
    let first = part(&f, a, b);
    let (mut total, mut err) = (first.value, first.err);
    heap.push(first);
    for iter in 1..200_000usize {
        if err <= (rel_tol * total.norm()).max(abs_floor) {
            return total;
        }
        let worst = heap.pop().expect("non-empty partition");
        let mid = 0.5 * (worst.lo + worst.hi);
        let (l, r) = (part(&f, worst.lo, mid), part(&f, mid, worst.hi));
        total += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
        // running sums drift, so refresh them from scratch now and then
        if iter % 256 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.err).sum();
        }
    }
    heap.iter().map(|p| p.value).sum()
}
