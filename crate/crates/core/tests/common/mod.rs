#![allow(dead_code)]

use dofwave::kernel::Model;
use dofwave::{Measure, SymbolPair};
use num_complex::Complex64;

pub fn atoms(pairs: &[(f64, f64)]) -> Measure {
    Measure::from_atoms(pairs).unwrap()
}

pub fn pair(sigma: &[(f64, f64)], eps: &[(f64, f64)]) -> SymbolPair {
    SymbolPair::new(atoms(sigma), atoms(eps))
}

pub fn model(sigma: &[(f64, f64)], eps: &[(f64, f64)]) -> Model {
    Model::new(pair(sigma, eps)).unwrap()
}

/// σ = δ + ½δ(· − ½), ε = δ + δ(· − ½): τ = ½, ρ = 1.
pub fn frac_zener() -> Model {
    model(&[(0.0, 1.0), (0.5, 0.5)], &[(0.0, 1.0), (0.5, 1.0)])
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * b.abs() + floor
}

pub fn heat_kernel(x: f64, t: f64, d: f64) -> f64 {
    (-x * x / (4.0 * d * t)).exp() / (4.0 * std::f64::consts::PI * d * t).sqrt()
}

/// ∫_0^t of the heat kernel.
pub fn heat_step(x: f64, t: f64, d: f64) -> f64 {
    let ax = x.abs();
    (t / (std::f64::consts::PI * d)).sqrt() * (-x * x / (4.0 * d * t)).exp()
        - ax / (2.0 * d) * statrs::function::erf::erfc(ax / (2.0 * (d * t).sqrt()))
}

/// Modified Bessel I_n by its power series (fine for moderate arguments).
pub fn bessel_i(n: u32, z: f64) -> f64 {
    let h = 0.5 * z;
    let mut term = h.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    let h2 = h * h;
    for k in 1..400 {
        term *= h2 / (k as f64 * (k + n) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Regular part of the Maxwell kernel (σ = a0 + a1·s, ε = b1·s), from the
/// telegraph equation u_tt + γu_t = c²u_xx.
pub fn maxwell_kernel(x: f64, t: f64, a0: f64, a1: f64, b1: f64) -> f64 {
    let g = a0 / a1;
    let c = (b1 / a1).sqrt();
    let r = (c * c * t * t - x * x).sqrt();
    let z = g / (2.0 * c) * r;
    (-g * t / 2.0).exp() / (2.0 * c) * (g / 2.0 * bessel_i(0, z) + g * c * t / (2.0 * r) * bessel_i(1, z))
}

/// Regular part of the Zener kernel (σ = a0 + a1·s, ε = b0 + b1·s): the
/// leading s^0, s^{-1}, s^{-2} terms of ½Ψe^{−|x|sΨ} are inverted in closed
/// form and the O(s^{-3}) remainder along Re s = a by brute quadrature.
pub fn zener_kernel(x: f64, t: f64, a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    let ax = x.abs();
    let (big_a, big_b) = (a0 / a1, b0 / b1);
    let k = (a1 / b1).sqrt();
    let g = big_a - big_b;
    let d2 = -big_b * g / 2.0 - g * g / 8.0;
    let d3 = big_b * big_b * g / 2.0 + big_b * g * g / 4.0 + g * g * g / 16.0;
    let e = -k * ax;
    let c1 = g / 2.0 + e * d2;
    let c2 = d2 + e * d3 + e * e * d2 * d2 / 2.0 + g / 2.0 * e * d2;
    let lag = t - k * ax;
    let pre = 0.5 * k * (-k * ax * g / 2.0).exp();
    let closed = pre * (c1 + c2 * lag);
    let a = 1.0;
    let f = |y: f64| {
        let s = Complex64::new(a, y);
        let psi = (k * k * (s + big_a) / (s + big_b)).sqrt();
        let full = 0.5 * psi * (t * s - ax * s * psi).exp();
        let lead = pre * (lag * s).exp() * (1.0 + c1 / s + c2 / (s * s));
        (full - lead).re
    };
    // panels of at most one period, finer near the origin; the remainder is O(y^{-3})
    let period = 2.0 * std::f64::consts::PI / lag;
    let mut sum = 0.0;
    let mut lo = 0.0;
    while lo < 4e4 {
        let w = period.min((0.02 * a).max(lo / 20.0));
        sum += gl(&f, lo, lo + w);
        lo += w;
    }
    closed + sum / std::f64::consts::PI
}

/// n-point Gauss–Legendre nodes and weights on [−1, 1], by Newton's method
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

thread_local! {
    static GL20: Vec<(f64, f64)> = gauss_legendre(20);
}

/// 20-point Gauss–Legendre on [a, b].
pub fn gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL20.with(|r| r.iter().map(|&(x, w)| w * f(m + h * x)).sum::<f64>() * h)
}
