//! The step response S = ∫ K dt and the Cauchy problem
//! u = K ∗ (u₀ δ(t) + v₀ H(t)).

use rayon::prelude::*;
use std::cell::RefCell;

use super::{check_grid, check_point, is_hooke, kernel_grid, kernel_value, KernelGrid, KernelOptions, Model, CONE_MARGIN};
use crate::error::{Error, Result};
use crate::quad::integrate;

pub fn step_response_s(model: &Model, x: f64, t: f64) -> Result<f64> {
    Ok(step_response(model, x, t, &KernelOptions::default())?.0)
}

/// S(x, t) = ∫_0^t K(x, u) du, with its quadrature error estimate.
pub fn step_response(model: &Model, x: f64, t: f64, opts: &KernelOptions) -> Result<(f64, f64)> {
    check_point(x, t)?;
    model.require_admissible()?;
    let ax = x.abs();
    let c = model.front_speed();
    if is_hooke(model) {
        let jump = 0.5 * model.consts.k;
        return Ok((if ax < c * t { jump } else { 0.0 }, 0.0));
    }
    if model.class.exceptional {
        return Err(Error::ExceptionalModel);
    }
    let start = if c.is_finite() {
        if model.is_classical() {
            ax / c
        } else {
            ax / (c * (1.0 - CONE_MARGIN))
        }
    } else {
        0.0
    };
    if t <= start {
        return Ok((0.0, 0.0));
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // u = start + (t − start)v² absorbs a u^{-1/2} singularity at u = 0 (x = 0)
    let span = t - start;
    let f = |v: f64| -> f64 {
        let u = start + span * v * v;
        match kernel_value(model, ax, u, opts) {
            Ok(k) => k.value * 2.0 * span * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let r = integrate(f, 0.0, 1.0, &opts.quad());
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((r.value, r.error))
}

/// Initial data sampled on the solver's x-grid. Empty vectors mean zero data.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CauchyData {
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    /// point mass of initial displacement at this position
    pub delta_at: Option<f64>,
}

const NEGLIGIBLE: f64 = 1e-10;

pub fn cauchy_solve(model: &Model, data: &CauchyData, xs: &[f64], ts: &[f64]) -> Result<KernelGrid> {
    cauchy_solve_with(model, data, xs, ts, &KernelOptions::default())
}

pub fn cauchy_solve_with(
    model: &Model,
    data: &CauchyData,
    xs: &[f64],
    ts: &[f64],
    opts: &KernelOptions,
) -> Result<KernelGrid> {
    check_grid(xs, ts)?;
    model.require_admissible()?;
    let n = xs.len();
    for (name, v) in [("u0", &data.u0), ("v0", &data.v0)] {
        if !v.is_empty() && v.len() != n {
            return Err(Error::InvalidGrid(format!("{name} has {} samples for {n} grid points", v.len())));
        }
    }
    if n < 2 {
        return Err(Error::InvalidGrid("the x-grid needs at least two points".into()));
    }
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if xs.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidGrid("the x-grid must be uniform".into()));
    }
    let span = xs[n - 1] - xs[0];
    let nt = ts.len();
    let mut grid = kernel_grid(model, xs, ts, opts)?;
    let has_u0 = data.u0.iter().any(|v| *v != 0.0);
    let has_v0 = data.v0.iter().any(|v| *v != 0.0);
    let mut u = vec![0.0; n * nt];

    if is_hooke(model) {
        if data.delta_at.is_some() {
            return Err(Error::Unsupported("a point mass travels as a delta in the Hooke model".into()));
        }
        let c = model.front_speed();
        let interp = |v: &[f64], x: f64| -> f64 {
            if v.is_empty() || x < xs[0] || x > xs[n - 1] {
                return 0.0;
            }
            let p = ((x - xs[0]) / h).min((n - 1) as f64);
            let i = (p.floor() as usize).min(n - 2);
            let w = p - i as f64;
            v[i] * (1.0 - w) + v[i + 1] * w
        };
        // running trapezoid integral of v0
        let mut cum = vec![0.0; n];
        if has_v0 {
            for i in 1..n {
                cum[i] = cum[i - 1] + 0.5 * h * (data.v0[i - 1] + data.v0[i]);
            }
        }
        let total = cum[n - 1];
        let cum_at = |x: f64| -> f64 {
            if x <= xs[0] {
                0.0
            } else if x >= xs[n - 1] {
                total
            } else {
                interp(&cum, x)
            }
        };
        for i in 0..n {
            for (j, &t) in ts.iter().enumerate() {
                let (l, r) = (xs[i] - c * t, xs[i] + c * t);
                let mut val = 0.5 * (interp(&data.u0, l) + interp(&data.u0, r));
                if has_v0 {
                    val += (cum_at(r) - cum_at(l)) / (2.0 * c);
                }
                u[i * nt + j] = val;
            }
        }
        grid.truncated = c * ts[nt - 1] >= span;
        grid.u = Some(u);
        return Ok(grid);
    }

    // kernel and step response at every grid offset k·h, per time
    let offsets: Vec<(usize, usize)> = (0..n).flat_map(|k| (0..nt).map(move |j| (k, j))).collect();
    let kd: Vec<f64> = if has_u0 {
        offsets
            .par_iter()
            .map(|&(k, j)| kernel_value(model, k as f64 * h, ts[j], opts).map(|v| v.value))
            .collect::<Result<_>>()?
    } else {
        vec![0.0; n * nt]
    };
    let sd: Vec<f64> = if has_v0 {
        offsets
            .par_iter()
            .map(|&(k, j)| step_response(model, k as f64 * h, ts[j], opts).map(|v| v.0))
            .collect::<Result<_>>()?
    } else {
        vec![0.0; n * nt]
    };
    let weight = |m: usize| if m == 0 || m + 1 == n { 0.5 * h } else { h };
    for i in 0..n {
        for j in 0..nt {
            let mut val = 0.0;
            for m in 0..n {
                let k = i.abs_diff(m);
                if has_u0 {
                    val += weight(m) * kd[k * nt + j] * data.u0[m];
                }
                if has_v0 {
                    val += weight(m) * sd[k * nt + j] * data.v0[m];
                }
            }
            u[i * nt + j] = val;
        }
    }
    let reaches_edge = |d: &[f64]| {
        (0..nt).any(|j| {
            let peak = (0..n).map(|k| d[k * nt + j].abs()).fold(0.0, f64::max);
            d[(n - 1) * nt + j].abs() > NEGLIGIBLE * peak
        })
    };
    let mut truncated = (has_u0 && reaches_edge(&kd)) || (has_v0 && reaches_edge(&sd));

    if let Some(x0) = data.delta_at {
        let points: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..nt).map(move |j| (i, j))).collect();
        let vals: Vec<f64> = points
            .par_iter()
            .map(|&(i, j)| kernel_value(model, xs[i] - x0, ts[j], opts).map(|v| v.value))
            .collect::<Result<_>>()?;
        truncated |= (0..nt).any(|j| {
            let peak = (0..n).map(|i| vals[i * nt + j].abs()).fold(0.0, f64::max);
            vals[j].abs().max(vals[(n - 1) * nt + j].abs()) > NEGLIGIBLE * peak
        });
        for (p, v) in vals.into_iter().enumerate() {
            u[p] += v;
        }
    }
    grid.u = Some(u);
    grid.truncated = truncated;
    Ok(grid)
}
