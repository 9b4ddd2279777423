//! Adaptive Gauss–Kronrod (7/15) quadrature for real and complex integrands.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values the rule can integrate.
pub trait QValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn modulus(&self) -> f64;
}

impl QValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl QValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-10, abs_tol: 0.0, max_subdivisions: 2000 }
    }
}

impl QuadOptions {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Self {
        QuadOptions { rel_tol, abs_tol, max_subdivisions }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    /// Integral of |f|, useful as a scale for absolute floors.
    pub abs_value: f64,
    pub evaluations: usize,
    pub intervals: usize,
    pub converged: bool,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    abs_value: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel: (value, error estimate, integral of |f|).
pub fn gk15<T: QValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = fc.modulus() * WGK[7];
    let mut fv = [T::zero(); 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        abs_k += (f1.modulus() + f2.modulus()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).modulus();
    for j in 0..7 {
        asc += WGK[j] * ((fv[2 * j] - mean).modulus() + (fv[2 * j + 1] - mean).modulus());
    }
    let asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).modulus();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let abs_val = abs_k * half.abs();
    if abs_val > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_val);
    }
    (kronrod * half, err, abs_val)
}

/// Globally adaptive bisection on the panel with the largest error estimate.
pub fn integrate<T: QValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64, opts: &QuadOptions) -> QuadResult<T> {
    if a == b {
        return QuadResult {
            value: T::zero(),
            error: 0.0,
            abs_value: 0.0,
            evaluations: 0,
            intervals: 0,
            converged: true,
        };
    }
    let (v, e, av) = gk15(&f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e, abs_value: av });
    let mut total = v;
    let mut total_err = e;
    let mut converged = false;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.modulus());
        if total_err <= target {
            converged = true;
            break;
        }
        if heap.len() >= opts.max_subdivisions.max(1) {
            break;
        }
        let seg = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // cannot split further; keep it and give up
            heap.push(seg);
            break;
        }
        let (v1, e1, a1) = gk15(&f, seg.a, mid);
        let (v2, e2, a2) = gk15(&f, mid, seg.b);
        evaluations += 30;
        total = total - seg.value + v1 + v2;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1, abs_value: a1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2, abs_value: a2 });
    }
    // re-sum to shed drift from the running updates
    let mut value = T::zero();
    let mut error = 0.0;
    let mut abs_value = 0.0;
    let intervals = heap.len();
    for s in heap.into_iter() {
        value = value + s.value;
        error += s.error;
        abs_value += s.abs_value;
    }
    QuadResult { value, error, abs_value, evaluations, intervals, converged }
}

/// Two-point Gauss–Legendre on [a, b]; exact for cubics.
pub fn gauss_legendre2<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let d = h / 3f64.sqrt();
    h * (f(c - d) + f(c + d))
}
