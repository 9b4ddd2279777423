//! K as an inverse Laplace transform along Re s = a:
//!
//!   K(x, t) = (1/2π) ∫_0^∞ Re[Ψ(s) e^{−|x|sΨ(s) + ts}] dy,  s = a + iy.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{check_point, KernelOptions, Model};
use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::symbol::{psi_eval, PolarComplex};

/// Give up once the integrand has not decayed by this height.
pub const MAX_HEIGHT: f64 = 1e10;
const PERIODS_PER_PANEL: f64 = 16.0;
const MAX_PANELS: usize = 2_000_000;

pub fn kernel_bromwich(model: &Model, x: f64, t: f64, a: f64) -> Result<(f64, f64)> {
    kernel_bromwich_with(model, x, t, a, &KernelOptions::default())
}

pub fn kernel_bromwich_with(model: &Model, x: f64, t: f64, a: f64, opts: &KernelOptions) -> Result<(f64, f64)> {
    check_point(x, t)?;
    if x == 0.0 {
        return Err(Error::InvalidPoint("the Bromwich integral needs x != 0".into()));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidPoint(format!("abscissa a = {a} must be positive")));
    }
    model.require_admissible()?;
    if model.class.exceptional {
        return Err(Error::ExceptionalModel);
    }
    integrate_line(model, x.abs(), t, a, opts)
}

pub(crate) fn integrate_line(model: &Model, ax: f64, t: f64, a: f64, opts: &KernelOptions) -> Result<(f64, f64)> {
    let psi = |y: f64| -> Result<(Complex64, Complex64)> {
        let s = Complex64::new(a, y);
        let p = psi_eval(&model.pair, PolarComplex::from_complex(s)?)?;
        Ok((s, p))
    };
    let failed = std::cell::Cell::new(false);
    let f = |y: f64| -> f64 {
        match psi(y) {
            Ok((s, p)) => (p * (t * s - ax * s * p).exp()).re,
            Err(_) => {
                failed.set(true);
                0.0
            }
        }
    };
    let envelope = |y: f64| -> Result<f64> {
        let (s, p) = psi(y)?;
        Ok(p.norm() * (t * s - ax * s * p).re.exp())
    };
    // local angular frequency of the integrand in y
    let frequency = |y: f64| -> Result<f64> {
        let (_, p) = psi(y)?;
        Ok((t - ax * p.re).abs() + ax * p.im.abs() + 1e-300)
    };

    let qo = opts.quad();
    let base = 2.0 * PI / (t + ax * psi(0.0)?.1.norm() + a);
    let mut lo = 0.0;
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut quiet = 0;
    for _ in 0..MAX_PANELS {
        let width = (PERIODS_PER_PANEL * 2.0 * PI / frequency(lo)?).min(lo.max(base));
        let hi = lo + width;
        let r = integrate(f, lo, hi, &qo);
        if failed.get() {
            return Err(Error::DivisionByZero);
        }
        sum += r.value;
        err += r.error;
        lo = hi;
        // stretched-exponential decay: the remainder is at most about envelope·y
        let tail = envelope(lo)? * lo;
        let target = opts.abs_tol.max(opts.rel_tol * sum.abs());
        if tail < 0.1 * target {
            quiet += 1;
            if quiet >= 2 {
                return Ok((sum / (2.0 * PI), (err + tail) / (2.0 * PI)));
            }
        } else {
            quiet = 0;
        }
        if lo > MAX_HEIGHT {
            break;
        }
    }
    Err(Error::TruncationFailure { y: lo })
}
