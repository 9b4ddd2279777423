//! Material constants (τ, ρ, wave speeds, compliances) and regularity descriptors.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measures::{Density, Measure};
use crate::symbol::SymbolPair;
use crate::thermo::classify;

/// Writes non-finite values as the strings "inf" / "-inf" / "nan".
pub fn serialize_extended<S: Serializer>(x: &f64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        ser.serialize_f64(*x)
    } else if x.is_nan() {
        ser.serialize_str("nan")
    } else if *x > 0.0 {
        ser.serialize_str("inf")
    } else {
        ser.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaterialConstants {
    #[serde(rename = "M_sigma")]
    pub top_sigma: f64,
    #[serde(rename = "M_eps")]
    pub top_eps: f64,
    pub m_sigma: f64,
    pub m_eps: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub tau: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub rho: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub k: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub c: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub v_i: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub v_e: f64,
    #[serde(rename = "J_g", serialize_with = "serialize_extended")]
    pub j_g: f64,
    #[serde(rename = "J_e", serialize_with = "serialize_extended")]
    pub j_e: f64,
    #[serde(rename = "G_g", serialize_with = "serialize_extended")]
    pub g_g: f64,
    #[serde(rename = "G_e", serialize_with = "serialize_extended")]
    pub g_e: f64,
}

/// F(x) = μ_σ([x, M]) / μ_ε([x, M]).
pub fn tail_ratio_f(pair: &SymbolPair, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInterval { lo: x, hi: 1.0 });
    }
    let num = pair.mu_sigma.closed_mass(x, 1.0);
    let den = pair.mu_eps.closed_mass(x, 1.0);
    match (num > 0.0, den > 0.0) {
        (false, false) => Err(Error::IndeterminateRatio),
        (true, false) => Ok(f64::INFINITY),
        _ => Ok(num / den),
    }
}

const F_LIMIT_MAX_LEVEL: i32 = 40;
const F_LIMIT_STEP: f64 = 1e-10;

/// τ = lim Φ_σ/Φ_ε as |s| → ∞, read off the measures near the top of their supports.
pub fn limit_tau(pair: &SymbolPair) -> Result<f64> {
    let (s, e) = (&pair.mu_sigma, &pair.mu_eps);
    let top_s = s.support_bounds().1;
    let top_e = e.support_bounds().1;
    if top_s < top_e {
        return Ok(0.0);
    }
    if top_s > top_e {
        return Ok(f64::INFINITY);
    }
    let top = top_s;
    let (atom_s, atom_e) = (s.atom_weight_at(top), e.atom_weight_at(top));
    if atom_e > 0.0 {
        return Ok(atom_s / atom_e);
    }
    if atom_s > 0.0 {
        return Ok(f64::INFINITY);
    }
    let lead_s = s.density_leading(top);
    let lead_e = e.density_leading(top);
    if let (Some((_, ks)), Some((_, ke))) = (lead_s, lead_e) {
        if ks > ke {
            return Ok(0.0);
        }
        if ks < ke {
            return Ok(f64::INFINITY);
        }
    }
    match f_limit(pair, top) {
        Ok(v) => Ok(v),
        Err(err) => match (lead_s, lead_e) {
            // slow (sub-linear) approach of F; the leading coefficients decide
            (Some((cs, _)), Some((ce, _))) => Ok(cs / ce),
            _ => Err(err),
        },
    }
}

fn f_limit(pair: &SymbolPair, top: f64) -> Result<f64> {
    let mut prev: Option<f64> = None;
    for j in 1..=F_LIMIT_MAX_LEVEL {
        let x = top - 2f64.powi(-j);
        if x < 0.0 {
            continue;
        }
        let cur = tail_ratio_f(pair, x)?;
        if let Some(p) = prev {
            if cur.is_infinite() && p.is_infinite() {
                return Ok(cur);
            }
            if (cur - p).abs() < F_LIMIT_STEP * cur.abs().max(1.0) {
                return Ok(cur);
            }
        }
        prev = Some(cur);
    }
    let last = tail_ratio_f(pair, top - 2f64.powi(-F_LIMIT_MAX_LEVEL))?;
    let previous = tail_ratio_f(pair, top - 2f64.powi(1 - F_LIMIT_MAX_LEVEL))?;
    Err(Error::ConvergenceFailure { last, previous })
}

/// ρ = lim Φ_σ/Φ_ε as s → 0, i.e. 1/τ̃ for the reflected pair. The top-limit
/// is taken with the roles kept (σ over ε) so atom ratios come out exactly.
pub fn limit_rho(pair: &SymbolPair) -> Result<f64> {
    limit_tau(&SymbolPair::new(pair.mu_sigma.reflect(), pair.mu_eps.reflect()))
}

fn inv(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

pub fn constants(pair: &SymbolPair) -> Result<MaterialConstants> {
    let (m_sigma, top_sigma) = pair.mu_sigma.support_bounds();
    let (m_eps, top_eps) = pair.mu_eps.support_bounds();
    let tau = limit_tau(pair)?;
    let rho = limit_rho(pair)?;
    let k = tau.sqrt();
    Ok(MaterialConstants {
        top_sigma,
        top_eps,
        m_sigma,
        m_eps,
        tau,
        rho,
        k,
        c: inv(k),
        v_i: inv(k),
        v_e: inv(rho.sqrt()),
        j_g: tau,
        j_e: rho,
        g_g: inv(tau),
        g_e: inv(rho),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecayKind {
    PowerDecay,
    LogDecay,
    Exceptional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub eta: Option<f64>,
    pub gevrey_beta: Option<f64>,
    pub kind: DecayKind,
}

impl SmoothnessReport {
    fn power(eta: Option<f64>) -> SmoothnessReport {
        SmoothnessReport { eta, gevrey_beta: eta.map(|e| 1.0 / (1.0 + e)), kind: DecayKind::PowerDecay }
    }
}

/// Decay exponent η of Im Ψ(a + iy) where it is known in closed form.
pub fn smoothness(pair: &SymbolPair) -> SmoothnessReport {
    if classify(pair).exceptional {
        return SmoothnessReport { eta: None, gevrey_beta: None, kind: DecayKind::Exceptional };
    }
    let (s, e) = (&pair.mu_sigma, &pair.mu_eps);
    if let ([Density::Exponential { .. }], [Density::Exponential { .. }]) = (s.densities(), e.densities()) {
        if s.atoms().is_empty() && e.atoms().is_empty() {
            return SmoothnessReport { eta: None, gevrey_beta: None, kind: DecayKind::LogDecay };
        }
    }
    if s.is_atomic() && e.is_atomic() {
        return SmoothnessReport::power(atom_eta(s, e));
    }
    SmoothnessReport::power(None)
}

fn atom_eta(s: &Measure, e: &Measure) -> Option<f64> {
    let mut grid: Vec<f64> = s.atoms().iter().chain(e.atoms()).map(|a| a.alpha).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let n = grid.len() - 1;
    let top = grid[n];
    let (an, bn) = (s.atom_weight_at(top), e.atom_weight_at(top));
    if an > 0.0 && bn > 0.0 {
        // highest order where the weight ratio departs from τ = a_n/b_n
        let m = (0..n).rev().find(|&i| {
            let (ai, bi) = (s.atom_weight_at(grid[i]), e.atom_weight_at(grid[i]));
            (ai * bn - an * bi).abs() > 1e-12 * (ai * bn + an * bi)
        })?;
        return Some(-(top - grid[m]));
    }
    if an == 0.0 && bn > 0.0 {
        let m = (0..n).rev().find(|&i| s.atom_weight_at(grid[i]) > 0.0)?;
        return Some(-(top - grid[m]) / 2.0);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(p: &[(f64, f64)]) -> Measure {
        Measure::from_atoms(p).unwrap()
    }

    fn zener() -> SymbolPair {
        SymbolPair::new(atoms(&[(0.0, 1.0), (0.5, 0.5)]), atoms(&[(0.0, 1.0), (0.5, 1.0)]))
    }

    fn exp_pair() -> SymbolPair {
        let m = |b: f64| Measure::from_density(Density::Exponential { base: b, scale: 1.0 }).unwrap();
        SymbolPair::new(m(0.5), m(1.0))
    }

    #[test]
    fn tail_ratio_examples() {
        let z = zener();
        assert_eq!(tail_ratio_f(&z, 0.25).unwrap(), 0.5);
        assert_eq!(tail_ratio_f(&z, 0.0).unwrap(), 0.75);
        let same = SymbolPair::new(atoms(&[(0.2, 3.0)]), atoms(&[(0.2, 3.0)]));
        assert_eq!(tail_ratio_f(&same, 0.1).unwrap(), 1.0);
        assert_eq!(tail_ratio_f(&same, 0.5), Err(Error::IndeterminateRatio));
    }

    #[test]
    fn tau_examples() {
        let lfm = SymbolPair::new(atoms(&[(0.1, 2.0), (0.7, 0.3)]), atoms(&[(0.1, 1.0), (0.7, 0.6)]));
        assert_eq!(limit_tau(&lfm).unwrap(), 0.5);
        assert!((limit_tau(&exp_pair()).unwrap() - 0.5).abs() < 1e-9);
        let lower = SymbolPair::new(atoms(&[(0.3, 1.0)]), atoms(&[(0.3, 1.0), (0.9, 1.0)]));
        assert_eq!(limit_tau(&lower).unwrap(), 0.0);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(limit_rho(&zener()).unwrap(), 1.0);
        assert!((limit_rho(&exp_pair()).unwrap() - 1.0).abs() < 1e-9);
        let newton = SymbolPair::new(atoms(&[(0.0, 1.0)]), atoms(&[(1.0, 1.0)]));
        assert_eq!(limit_rho(&newton).unwrap(), f64::INFINITY);
    }

    #[test]
    fn constants_examples() {
        let hooke = SymbolPair::new(atoms(&[(0.0, 2.0)]), atoms(&[(0.0, 8.0)]));
        let c = constants(&hooke).unwrap();
        assert_eq!((c.tau, c.rho, c.c, c.v_i, c.v_e), (0.25, 0.25, 2.0, 2.0, 2.0));
        let c = constants(&zener()).unwrap();
        assert_eq!((c.tau, c.rho), (0.5, 1.0));
        assert!((c.c - 2f64.sqrt()).abs() < 1e-15 && (c.v_e - 1.0).abs() < 1e-15);
        assert_eq!((c.j_g, c.j_e, c.g_g, c.g_e), (0.5, 1.0, 2.0, 1.0));
        let c = constants(&exp_pair()).unwrap();
        assert!((c.v_i - 2f64.sqrt()).abs() < 1e-8 && (c.v_e - 1.0).abs() < 1e-8);
    }

    #[test]
    fn infinite_values_serialize_as_strings() {
        let newton = SymbolPair::new(atoms(&[(0.0, 1.0)]), atoms(&[(1.0, 1.0)]));
        let v = serde_json::to_value(constants(&newton).unwrap()).unwrap();
        assert_eq!(v["rho"], "inf");
        assert_eq!(v["c"], "inf");
        assert_eq!(v["v_e"], 0.0);
        assert_eq!(v["tau"], 0.0);
    }

    #[test]
    fn smoothness_examples() {
        let r = smoothness(&SymbolPair::new(atoms(&[(0.0, 1.0), (0.5, 2.0)]), atoms(&[(0.0, 1.0), (0.5, 3.0)])));
        assert_eq!(r.eta, Some(-0.5));
        assert_eq!(r.gevrey_beta, Some(2.0));
        let r = smoothness(&SymbolPair::new(atoms(&[(0.0, 1.0)]), atoms(&[(0.0, 1.0), (0.5, 1.0)])));
        assert_eq!(r.eta, Some(-0.25));
        assert!((r.gevrey_beta.unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(smoothness(&exp_pair()).kind, DecayKind::LogDecay);
        let maxwell = SymbolPair::new(atoms(&[(0.0, 1.0), (1.0, 1.0)]), atoms(&[(1.0, 1.0)]));
        assert_eq!(smoothness(&maxwell).kind, DecayKind::Exceptional);
    }
}
