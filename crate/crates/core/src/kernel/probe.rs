//! Weak velocities: the rescaled profile λ ↦ t·K(λt, t) tested against a bump,
//! and its centroid over (0, c).

use std::cell::RefCell;

use super::{kernel_value, KernelOptions, Model};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

const OUTER: QuadOptions = QuadOptions { rel_tol: 1e-7, abs_tol: 1e-13, max_subdivisions: 400 };
/// closest approach to the front, relative to c
const FRONT_GAP: f64 = 1e-10;

/// Quartic-exponential bump, 1 at the center and C^∞ flat at center ± width.
pub fn bump(lambda: f64, center: f64, width: f64) -> f64 {
    let u = (lambda - center) / width;
    let u4 = u.powi(4);
    if u4 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u4)).exp()
    }
}

fn check_model(model: &Model) -> Result<()> {
    model.require_admissible()?;
    if model.class.exceptional {
        return Err(Error::ExceptionalModel);
    }
    if model.is_classical() {
        return Err(Error::Unsupported("weak velocity probes need a proper fractional model".into()));
    }
    Ok(())
}

/// ∫_lo^hi w(λ)·t·K(λt, t) dλ over 0 ≤ lo < hi ≤ c. The part near a finite
/// front is integrated in ln(c − λ), where the profile piles up for small t.
fn profile_integral<W: Fn(f64) -> f64>(model: &Model, t: f64, lo: f64, hi: f64, weight: W) -> Result<f64> {
    let opts = KernelOptions::default();
    let c = model.front_speed();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let profile = |lambda: f64| -> f64 {
        match kernel_value(model, lambda * t, t, &opts) {
            Ok(k) => t * k.value * weight(lambda),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let mut total = 0.0;
    let split = if c.is_finite() && hi >= c { lo.max(0.5 * c) } else { hi };
    if split > lo {
        total += integrate(profile, lo, split, &OUTER).value;
    }
    if split < hi {
        let (s_lo, s_hi) = ((FRONT_GAP * c).ln(), (c - split).ln());
        if s_hi > s_lo {
            total += integrate(
                |s: f64| {
                    let d = s.exp();
                    profile(c - d) * d
                },
                s_lo,
                s_hi,
                &OUTER,
            )
            .value;
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(total)
}

/// ∫ t·K(λt, t) φ(λ) dλ with φ the bump of the given center and width.
pub fn weak_velocity_probe(model: &Model, t: f64, center: f64, width: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidPoint(format!("t = {t} must be positive")));
    }
    if !(center.is_finite() && width.is_finite() && width > 0.0) {
        return Err(Error::InvalidPoint(format!("bump center {center}, width {width}")));
    }
    check_model(model)?;
    let c = model.front_speed();
    let lo = (center - width).max(0.0);
    let hi = (center + width).min(c);
    if hi <= lo {
        return Ok(0.0);
    }
    profile_integral(model, t, lo, hi, |l| bump(l, center, width))
}

/// Centroid ∫ λ 𝔎 dλ / ∫ 𝔎 dλ of the rescaled profile over (0, c).
pub fn weak_velocity_centroid(model: &Model, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidPoint(format!("t = {t} must be positive")));
    }
    check_model(model)?;
    let c = model.front_speed();
    if !c.is_finite() {
        return Err(Error::Unsupported("the centroid needs a finite front speed".into()));
    }
    let mass = profile_integral(model, t, 0.0, c, |_| 1.0)?;
    let moment = profile_integral(model, t, 0.0, c, |l| l)?;
    if mass == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(moment / mass)
}
