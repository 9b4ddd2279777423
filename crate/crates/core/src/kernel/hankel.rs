//! K inside the cone as an integral along the negative real axis (both cut sides
//! folded into one real integral by conjugate symmetry):
//!
//!   K(x, t) = −(1/2π) ∫_0^∞ Im[Ψ(qe^{iπ}) e^{|x|qΨ(qe^{iπ})}] e^{−qt} dq.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{check_point, KernelOptions, Model, CONE_MARGIN};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::symbol::{psi_eval, PolarComplex};
use crate::thermo::ClassTag;

const MAX_PANELS: usize = 400;
const TAIL_REL: f64 = 1e-16;

fn psi_upper(model: &Model, q: f64) -> Result<Complex64> {
    psi_eval(&model.pair, PolarComplex::new(q, PI)?)
}

pub fn kernel_hankel(model: &Model, x: f64, t: f64) -> Result<(f64, f64)> {
    kernel_hankel_with(model, x, t, &KernelOptions::default())
}

/// Inside-cone Hankel integral for non-classical models. x = 0 is accepted
/// (the integral is continuous there); the Bromwich form is not.
pub fn kernel_hankel_with(model: &Model, x: f64, t: f64, opts: &KernelOptions) -> Result<(f64, f64)> {
    check_point(x, t)?;
    model.require_admissible()?;
    if model.is_classical() {
        return Err(Error::ClassicalModelBranch);
    }
    if model.class.exceptional {
        return Err(Error::ExceptionalModel);
    }
    let c = model.front_speed();
    if c.is_finite() && x.abs() > (1.0 - CONE_MARGIN) * c * t {
        return Err(Error::OutsideCone { x, t, c });
    }
    proper(model, x.abs(), t, opts)
}

/// Integral over a list of abutting panels [q_j, 2q_j] after the first block,
/// stopping once the integrand envelope makes the remainder negligible.
fn doubling_tail<G, E>(g: G, envelope: E, start: f64, running: f64, opts: &QuadOptions) -> (f64, f64)
where
    G: Fn(f64) -> f64,
    E: Fn(f64) -> f64,
{
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut lo = start;
    for _ in 0..MAX_PANELS {
        let bound = envelope(lo) * lo;
        if !(bound > TAIL_REL * (running + sum).abs()) || bound < 1e-300 {
            break;
        }
        let r = integrate(&g, lo, 2.0 * lo, opts);
        sum += r.value;
        err += r.error;
        lo *= 2.0;
    }
    (sum, err)
}

pub(crate) fn proper(model: &Model, ax: f64, t: f64, opts: &KernelOptions) -> Result<(f64, f64)> {
    let k = model.consts.k;
    let scale = 1.0 / (t - k * ax);
    let failed = std::cell::Cell::new(false);
    let g = |q: f64| -> f64 {
        match psi_upper(model, q) {
            Ok(p) => (p * (q * (ax * p - t)).exp()).im,
            Err(_) => {
                failed.set(true);
                0.0
            }
        }
    };
    let envelope = |q: f64| match psi_upper(model, q) {
        Ok(p) => p.norm() * (q * (ax * p.re - t)).exp(),
        Err(_) => 0.0,
    };
    let qo = opts.quad();
    let head = integrate(|u: f64| g(scale * u * u) * 2.0 * scale * u, 0.0, 1.0, &qo);
    let (tail, tail_err) = doubling_tail(g, envelope, scale, head.value, &qo);
    if failed.get() {
        return Err(Error::DivisionByZero);
    }
    let value = -(head.value + tail) / (2.0 * PI);
    Ok((value, (head.error + tail_err) / (2.0 * PI)))
}

/// Largest exponent q(|x|Re Ψ − t) met along the cut; large values mean the
/// Hankel integrand is huge and K comes out of catastrophic cancellation.
pub(crate) fn ill_conditioned(model: &Model, ax: f64, t: f64) -> bool {
    let scale = 1.0 / (t - model.consts.k * ax);
    (-64..=32).any(|j| {
        let q = scale * 10f64.powf(j as f64 / 8.0);
        psi_upper(model, q).is_ok_and(|p| q * (ax * p.re - t) > 25.0)
    })
}

pub fn kernel_hankel_classical(model: &Model, x: f64, t: f64) -> Result<(f64, f64)> {
    kernel_hankel_classical_with(model, x, t, &KernelOptions::default())
}

pub fn kernel_hankel_classical_with(model: &Model, x: f64, t: f64, opts: &KernelOptions) -> Result<(f64, f64)> {
    check_point(x, t)?;
    model.require_admissible()?;
    if !model.is_classical() {
        return Err(Error::NotClassical);
    }
    let c = model.front_speed();
    if c.is_finite() && x.abs() >= c * t {
        return Err(Error::OutsideCone { x, t, c });
    }
    classical(model, x.abs(), t, opts)
}

/// Classical models: on the imaginary segments of the cut Ψ(qe^{iπ}) = −i r(q),
/// so the integrand is r cos(|x| q r) e^{−qt}/(2π) over the segments between
/// the branch points.
pub(crate) fn classical(model: &Model, ax: f64, t: f64, opts: &KernelOptions) -> Result<(f64, f64)> {
    let s = &model.pair.mu_sigma;
    let e = &model.pair.mu_eps;
    let (a0, a1) = (s.atom_weight_at(0.0), s.atom_weight_at(1.0));
    let (b0, b1) = (e.atom_weight_at(0.0), e.atom_weight_at(1.0));
    let qo = opts.quad();
    let damp = |q: f64| (-q * t).exp() / (2.0 * PI);
    let (value, err) = match model.class.tag {
        ClassTag::Hooke => (0.0, 0.0),
        ClassTag::Newton => {
            let r = |q: f64| (a0 / (b1 * q)).sqrt();
            let h = |q: f64| r(q) * (ax * q * r(q)).cos() * damp(q);
            let scale = 1.0 / t;
            let head = integrate(|u: f64| h(scale * u * u) * 2.0 * scale * u, 0.0, 1.0, &qo);
            let env = |q: f64| r(q) * (-q * t).exp();
            let (tail, te) = doubling_tail(h, env, scale, head.value, &qo);
            (head.value + tail, head.error + te)
        }
        ClassTag::Maxwell => {
            let ap = a0 / a1;
            let half = (0.5 * ap).sqrt();
            // q = u² near 0, q = A − w² near A
            let lower = integrate(
                |u: f64| {
                    let q = u * u;
                    let r = (a1 * (ap - q) / (b1 * q)).sqrt();
                    2.0 * u * r * (ax * q * r).cos() * damp(q)
                },
                0.0,
                half,
                &qo,
            );
            let upper = integrate(
                |w: f64| {
                    let q = ap - w * w;
                    let r = w * (a1 / (b1 * q)).sqrt();
                    2.0 * w * r * (ax * q * r).cos() * damp(q)
                },
                0.0,
                half,
                &qo,
            );
            (lower.value + upper.value, lower.error + upper.error)
        }
        ClassTag::Voigt | ClassTag::Zener => {
            let coef = Coefficients { a0, a1, b0, b1 };
            keyhole(&coef, model.class.tag == ClassTag::Zener, ax, t, &qo)
        }
        ClassTag::ClassicalInadmissible | ClassTag::ProperFractional => {
            return Err(Error::Unsupported("no classical branch structure".into()))
        }
    };
    Ok((value, err))
}

#[derive(Debug, Clone, Copy)]
struct Coefficients {
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
}

impl Coefficients {
    fn psi(&self, s: Complex64) -> Complex64 {
        ((self.a0 + self.a1 * s) / (self.b0 + self.b1 * s)).sqrt()
    }
}

/// Voigt and Zener: Ψ has a pole-type branch point at −B = −b₀/b₁ where
/// e^{−|x|sΨ} is essentially singular, so for x ≠ 0 the keyhole around −B does
/// not shrink away. The contour is the cut from B + ρ outwards plus a full circle
/// of radius ρ about −B; for Zener a circle reaching past −A carries everything.
fn keyhole(c: &Coefficients, zener: bool, ax: f64, t: f64, qo: &QuadOptions) -> (f64, f64) {
    let bp = c.b0 / c.b1;
    let ap = if zener { c.a0 / c.a1 } else { f64::INFINITY };
    let amp = if zener { 0.0 } else { (c.a0 / c.b1).sqrt() };
    let damp = |q: f64| (-q * t).exp() / (2.0 * PI);
    let rho = if ax == 0.0 { 0.0 } else { keyhole_radius(c, ap - bp, ax, t) };

    let mut value = 0.0;
    let mut err = 0.0;
    if rho > 0.0 {
        // (1/π)∫_0^π Re[½Ψ e^{ts − |x|sΨ} ρe^{iφ}] dφ, s = −B + ρe^{iφ}
        let f = |phi: f64| {
            let e = Complex64::from_polar(rho, phi);
            let s = e - bp;
            let p = c.psi(s);
            (0.5 * p * (t * s - ax * s * p).exp() * e).re / PI
        };
        let r = integrate(f, 0.0, PI, qo);
        value += r.value;
        err += r.error;
    }
    if bp + rho >= ap {
        return (value, err);
    }
    // the cut (B + ρ, A): q = B + v² near B, where r = √(a₁(A − q)/(b₁ v²))
    let r_of = |q: f64| {
        if zener {
            (c.a1 * (ap - q) / (c.b1 * (q - bp))).sqrt()
        } else {
            amp / (q - bp).sqrt()
        }
    };
    let h = |q: f64| r_of(q) * (ax * q * r_of(q)).cos() * damp(q);
    let g = |v: f64| {
        let q = bp + v * v;
        let rv = if zener { (c.a1 * (ap - q) / c.b1).sqrt() } else { amp };
        2.0 * rv * (ax * q * rv / v).cos() * damp(q)
    };
    if zener {
        let mid = 0.5 * (bp + rho + ap);
        let lower = integrate(g, rho.sqrt(), (mid - bp).sqrt(), qo);
        let upper = integrate(
            |w: f64| {
                let q = ap - w * w;
                let r = w * (c.a1 / (c.b1 * (q - bp))).sqrt();
                2.0 * w * r * (ax * q * r).cos() * damp(q)
            },
            0.0,
            (ap - mid).sqrt(),
            qo,
        );
        value += lower.value + upper.value;
        err += lower.error + upper.error;
    } else {
        let v_end = rho.sqrt() + (1.0 / t).sqrt();
        let head = integrate(g, rho.sqrt(), v_end, qo);
        let start = bp + v_end * v_end;
        let env = |q: f64| r_of(q) * (-q * t).exp();
        let (tail, te) = doubling_tail(h, env, start, value + head.value, qo);
        value += head.value + tail;
        err += head.error + te;
    }
    (value, err)
}

/// Radius of the circle about −B with the smallest peak of Re(ts − |x|sΨ),
/// which keeps the cancellation in the circle integral mild.
fn keyhole_radius(c: &Coefficients, gap: f64, ax: f64, t: f64) -> f64 {
    let bp = c.b0 / c.b1;
    let scale = if bp > 0.0 { bp } else { 1.0 / t };
    let peak = |rho: f64| {
        (0..=32)
            .map(|j| {
                let s = Complex64::from_polar(rho, PI * j as f64 / 32.0) - bp;
                let p = c.psi(s);
                (t * s - ax * s * p).re
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = (f64::INFINITY, scale);
    for j in -40..=40 {
        let rho = scale * 2f64.powf(j as f64 / 4.0);
        // keep the circle clear of the zero of Ψ at −A
        if gap.is_finite() && (rho / gap - 1.0).abs() < 0.02 {
            continue;
        }
        let e = peak(rho);
        if e < best.0 {
            best = (e, rho);
        }
    }
    best.1
}
