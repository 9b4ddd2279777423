//! Fundamental solution K = ∂_t S of the distributed-order wave equation and
//! the quantities built from it.

mod bromwich;
mod cauchy;
mod hankel;
mod probe;

pub use bromwich::{kernel_bromwich, kernel_bromwich_with};
pub use cauchy::{cauchy_solve, cauchy_solve_with, step_response, step_response_s, CauchyData};
pub use hankel::{kernel_hankel, kernel_hankel_classical, kernel_hankel_classical_with, kernel_hankel_with};
pub use probe::{bump, weak_velocity_centroid, weak_velocity_probe};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{constants, MaterialConstants};
use crate::error::{Error, Result};
use crate::quad::QuadOptions;
use crate::symbol::SymbolPair;
use crate::thermo::{check_restriction, classify, ClassTag, ModelClass, RestrictionReport};

/// Points with |x| > (1 − CONE_MARGIN)·c·t are left to the Bromwich integral.
pub const CONE_MARGIN: f64 = 1e-6;

/// A validated constitutive pair with its derived data.
#[derive(Debug, Clone, Serialize)]
pub struct Model {
    pub pair: SymbolPair,
    pub class: ModelClass,
    pub consts: MaterialConstants,
    pub restriction: RestrictionReport,
    pub forced: bool,
}

impl Model {
    /// Refuses pairs that violate the thermodynamic restriction.
    pub fn new(pair: SymbolPair) -> Result<Model> {
        let m = Model::build(pair, false)?;
        if !m.restriction.satisfied {
            return Err(Error::NotAdmissible);
        }
        Ok(m)
    }

    /// Accepts inadmissible pairs; results carry no guarantee.
    pub fn new_forced(pair: SymbolPair) -> Result<Model> {
        Model::build(pair, true)
    }

    fn build(pair: SymbolPair, forced: bool) -> Result<Model> {
        let restriction = check_restriction(&pair);
        let class = classify(&pair);
        let consts = constants(&pair)?;
        Ok(Model { pair, class, consts, restriction, forced })
    }

    pub fn admissible(&self) -> bool {
        self.restriction.satisfied
    }

    pub(crate) fn require_admissible(&self) -> Result<()> {
        if self.restriction.satisfied || self.forced {
            Ok(())
        } else {
            Err(Error::NotAdmissible)
        }
    }

    pub fn is_classical(&self) -> bool {
        self.class.tag.is_classical()
    }

    /// Wave-front speed c = 1/√τ (∞ when τ = 0).
    pub fn front_speed(&self) -> f64 {
        self.consts.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Hankel,
    Bromwich,
    Zero,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Hankel => "hankel",
            Method::Bromwich => "bromwich",
            Method::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions { rel_tol: 1e-8, abs_tol: 1e-14, max_subdivisions: 2000 }
    }
}

impl KernelOptions {
    pub(crate) fn quad(&self) -> QuadOptions {
        QuadOptions::new(self.rel_tol, self.abs_tol, self.max_subdivisions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub est_error: f64,
    pub method: Method,
}

pub(crate) fn check_point(x: f64, t: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::InvalidPoint(format!("x = {x}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidPoint(format!("t = {t} must be positive")));
    }
    Ok(())
}

/// K(x, t) by whichever representation suits the point: zero outside the
/// cone, the Hankel integral inside it, the Bromwich line near the front or
/// where the Hankel integrand would overflow into cancellation.
pub fn kernel_value(model: &Model, x: f64, t: f64, opts: &KernelOptions) -> Result<KernelValue> {
    check_point(x, t)?;
    model.require_admissible()?;
    let ax = x.abs();
    let c = model.front_speed();
    if c.is_finite() && ax >= c * t {
        return Ok(KernelValue { value: 0.0, est_error: 0.0, method: Method::Zero });
    }
    if model.is_classical() {
        let (value, est_error) = hankel::classical(model, ax, t, opts)?;
        return Ok(KernelValue { value, est_error, method: Method::Hankel });
    }
    if model.class.exceptional {
        return Err(Error::ExceptionalModel);
    }
    let near_front = c.is_finite() && ax > (1.0 - CONE_MARGIN) * c * t;
    let ill = ax > 0.0 && hankel::ill_conditioned(model, ax, t);
    if ax > 0.0 && (near_front || ill) {
        match bromwich::integrate_line(model, ax, t, 1.0 / t, opts) {
            Ok((value, est_error)) => return Ok(KernelValue { value, est_error, method: Method::Bromwich }),
            // at small t the line integrand decays too slowly near the front;
            // the cut integral is still sound there unless it is ill-conditioned
            Err(Error::TruncationFailure { .. }) if !ill => {}
            Err(e) => return Err(e),
        }
    }
    let (value, est_error) = hankel::proper(model, ax, t, opts)?;
    Ok(KernelValue { value, est_error, method: Method::Hankel })
}

/// K sampled on a rectangular grid, stored row-major with x outer and t inner.
#[derive(Debug, Clone, Serialize)]
pub struct KernelGrid {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
    pub est_error: Vec<f64>,
    pub methods: Vec<Method>,
    /// Cauchy solution on the same grid, when one was requested.
    pub u: Option<Vec<f64>>,
    /// Set when the kernel support reaches past the x-grid.
    pub truncated: bool,
}

impl KernelGrid {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ts.len() + j
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.index(i, j)]
    }
}

pub(crate) fn check_grid(xs: &[f64], ts: &[f64]) -> Result<()> {
    if xs.is_empty() || ts.is_empty() {
        return Err(Error::InvalidGrid("empty axis".into()));
    }
    if xs.iter().chain(ts).any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("non-finite coordinate".into()));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) || ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("axes must be strictly ascending".into()));
    }
    if ts[0] <= 0.0 {
        return Err(Error::InvalidGrid("times must be positive".into()));
    }
    Ok(())
}

pub fn kernel_grid(model: &Model, xs: &[f64], ts: &[f64], opts: &KernelOptions) -> Result<KernelGrid> {
    check_grid(xs, ts)?;
    let points: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();
    let vals: Vec<KernelValue> =
        points.par_iter().map(|&(x, t)| kernel_value(model, x, t, opts)).collect::<Result<_>>()?;
    Ok(KernelGrid {
        xs: xs.to_vec(),
        ts: ts.to_vec(),
        values: vals.iter().map(|v| v.value).collect(),
        est_error: vals.iter().map(|v| v.est_error).collect(),
        methods: vals.iter().map(|v| v.method).collect(),
        u: None,
        truncated: false,
    })
}

pub(crate) fn is_hooke(model: &Model) -> bool {
    model.class.tag == ClassTag::Hooke
}
