//! The symbols Φ(s) = ∫ s^α dμ(α) and Ψ = √(Φ_σ/Φ_ε) on the slit plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measures::{Density, Measure};
use crate::quad::{integrate, QuadOptions};

/// s = R·e^{iθ} with θ ∈ [−π, π]; θ = π and θ = −π are the two sides of the cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarComplex {
    r: f64,
    theta: f64,
}

impl PolarComplex {
    pub fn new(r: f64, theta: f64) -> Result<PolarComplex> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidPoint(format!("modulus {r} must be positive")));
        }
        if !(theta.is_finite() && theta.abs() <= PI) {
            return Err(Error::InvalidPoint(format!("argument {theta} outside [-pi, pi]")));
        }
        Ok(PolarComplex { r, theta })
    }

    /// Principal-argument polar form of a non-zero complex number.
    pub fn from_complex(z: Complex64) -> Result<PolarComplex> {
        PolarComplex::new(z.norm(), z.arg())
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// ln R + iθ, continued to both sides of the cut.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.r.ln(), self.theta)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolPair {
    pub mu_sigma: Measure,
    pub mu_eps: Measure,
}

impl SymbolPair {
    pub fn new(mu_sigma: Measure, mu_eps: Measure) -> SymbolPair {
        SymbolPair { mu_sigma, mu_eps }
    }

    /// The reflected pair μ̃_σ(A) = μ_ε(1 − A), μ̃_ε(A) = μ_σ(1 − A).
    pub fn reflect(&self) -> SymbolPair {
        SymbolPair { mu_sigma: self.mu_eps.reflect(), mu_eps: self.mu_sigma.reflect() }
    }
}

const PHI_REL_TOL: f64 = 1e-10;
const PHI_MAX_SUBDIVISIONS: usize = 2000;

pub fn phi_eval(mu: &Measure, s: PolarComplex) -> Complex64 {
    let l = s.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    for a in mu.atoms() {
        sum += a.weight * (a.alpha * l).exp();
    }
    for d in mu.densities() {
        sum += density_phi(d, l, s.r());
    }
    sum
}

fn exp_m1_over(w: Complex64) -> Complex64 {
    // (e^w − 1)/w without cancellation
    if w.norm() < 1e-6 {
        return 1.0 + w / 2.0 + w * w / 6.0 + w * w * w / 24.0;
    }
    let (a, b) = (w.re, w.im);
    let half = (0.5 * b).sin();
    let em1 = Complex64::new(a.exp_m1() * b.cos() - 2.0 * half * half, a.exp() * b.sin());
    em1 / w
}

fn density_phi(d: &Density, l: Complex64, r: f64) -> Complex64 {
    let opts = |scale: f64| QuadOptions::new(PHI_REL_TOL, 1e-16 * scale, PHI_MAX_SUBDIVISIONS);
    match d {
        Density::Exponential { base, scale } => *scale * exp_m1_over(base.ln() + l),
        Density::Power { end, kappa, scale } => {
            // ∫_0^end (end−α)^κ e^{αL} dα = e^{end·L} ∫_0^end v^κ e^{−vL} dv
            let bound = d.total_mass() * r.max(1.0).powf(*end);
            let inner = power_moment(*kappa, *end, -l, opts(bound));
            *scale * (*end * l).exp() * inner
        }
        Density::RisingPower { start, kappa, scale } => {
            let bound = d.total_mass() * r.max(1.0);
            let inner = power_moment(*kappa, 1.0 - start, l, opts(bound));
            *scale * (*start * l).exp() * inner
        }
        Density::Table { breakpoints, .. } => {
            let bound = d.total_mass() * r.max(1.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for w in breakpoints.windows(2) {
                let res = integrate(|a: f64| d.value(a) * (a * l).exp(), w[0], w[1], &opts(bound));
                sum += res.value;
            }
            sum
        }
    }
}

/// ∫_0^len v^κ e^{vz} dv; for κ < 0 the substitution u = v^{κ+1} removes the endpoint singularity.
fn power_moment(kappa: f64, len: f64, z: Complex64, opts: QuadOptions) -> Complex64 {
    if kappa < 0.0 {
        let p = kappa + 1.0;
        let res = integrate(|u: f64| (u.powf(1.0 / p) * z).exp(), 0.0, len.powf(p), &opts);
        res.value / p
    } else {
        integrate(|v: f64| v.powf(kappa) * (v * z).exp(), 0.0, len, &opts).value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiBounds {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub ok: bool,
}

/// cos(|θ|/2)·min(1, R)·μ([0,1]) ≤ |Φ(s)| ≤ max(1, R)·μ([0,1]) off the cut.
pub fn phi_bounds_check(mu: &Measure, s: PolarComplex) -> Result<PhiBounds> {
    if s.theta().abs() >= PI {
        return Err(Error::OnBranchCut);
    }
    let mass = mu.total_mass();
    let lower = (0.5 * s.theta().abs()).cos() * s.r().min(1.0) * mass;
    let upper = s.r().max(1.0) * mass;
    let value = phi_eval(mu, s).norm();
    let slack = 1e-12 * upper;
    Ok(PhiBounds { lower, value, upper, ok: lower - slack <= value && value <= upper + slack })
}

pub fn psi_eval(pair: &SymbolPair, s: PolarComplex) -> Result<Complex64> {
    let num = phi_eval(&pair.mu_sigma, s);
    let den = phi_eval(&pair.mu_eps, s);
    psi_from_parts(num, den, s)
}

pub(crate) fn psi_from_parts(num: Complex64, den: Complex64, s: PolarComplex) -> Result<Complex64> {
    if den.norm() < 1e-300 {
        return Err(Error::DivisionByZero);
    }
    let ratio = num / den;
    // On the cut a (numerically) negative ratio takes the root continued from θ.
    if s.theta().abs() == PI && ratio.re < 0.0 && ratio.im.abs() <= 1e-13 * ratio.norm() {
        let root = (-ratio.re).sqrt();
        return Ok(Complex64::new(0.0, -s.theta().signum() * root));
    }
    Ok(ratio.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeadKind {
    AtomLead,
    PowerLead { kappa: f64 },
    ExpLead,
    GenericSubpolynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptotic {
    pub top: f64,
    pub atom_mass: f64,
    pub kind: LeadKind,
}

/// Leading large-|s| behaviour of Φ.
pub fn phi_asymptotic(mu: &Measure) -> Asymptotic {
    let (_, top) = mu.support_bounds();
    let atom_mass = mu.atom_weight_at(top);
    if atom_mass > 0.0 {
        return Asymptotic { top, atom_mass, kind: LeadKind::AtomLead };
    }
    let Some((_, kappa)) = mu.density_leading(top) else {
        return Asymptotic { top, atom_mass, kind: LeadKind::GenericSubpolynomial };
    };
    let leaders: Vec<&Density> = mu
        .densities()
        .iter()
        .filter(|d| d.support().1 == top && d.leading().1 == kappa)
        .collect();
    let kind = if leaders.iter().all(|d| matches!(d, Density::Power { .. })) {
        LeadKind::PowerLead { kappa }
    } else if leaders.iter().all(|d| matches!(d, Density::Exponential { .. })) {
        LeadKind::ExpLead
    } else {
        LeadKind::GenericSubpolynomial
    };
    Asymptotic { top, atom_mass, kind }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Atom;

    fn pc(r: f64, t: f64) -> PolarComplex {
        PolarComplex::new(r, t).unwrap()
    }

    #[test]
    fn rejects_bad_points() {
        assert!(PolarComplex::new(0.0, 0.0).is_err());
        assert!(PolarComplex::new(1.0, 3.2).is_err());
        assert!(PolarComplex::new(1.0, -PI).is_ok());
    }

    #[test]
    fn atom_examples() {
        let z = phi_eval(&Measure::delta(0.0, 1.0).unwrap(), pc(7.0, 1.0));
        assert_eq!(z, Complex64::new(1.0, 0.0));
        let z = phi_eval(&Measure::delta(1.0, 1.0).unwrap(), pc(2.0, PI / 2.0));
        assert!((z - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        let z = phi_eval(&Measure::delta(0.5, 1.0).unwrap(), pc(1.0, PI));
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let z = phi_eval(&Measure::delta(0.5, 1.0).unwrap(), pc(1.0, -PI));
        assert!((z - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn exponential_closed_form_and_series() {
        let m = Measure::from_density(Density::Exponential { base: 1.0, scale: 1.0 }).unwrap();
        let z = phi_eval(&m, pc(2.0, 0.0));
        assert!((z.re - 1.0 / 2f64.ln()).abs() < 1e-14 && z.im.abs() < 1e-15);
        // b·s = 1 is a removable singularity
        let m = Measure::from_density(Density::Exponential { base: 2.0, scale: 3.0 }).unwrap();
        let z = phi_eval(&m, pc(0.5, 0.0));
        assert!((z.re - 3.0).abs() < 1e-14);
        let near = phi_eval(&m, pc(0.5 * (1.0 + 2e-6), 0.0));
        assert!((near.re - 3.0).abs() < 1e-5);
    }

    #[test]
    fn power_and_table_match_atom_limits() {
        // ∫_0^1 s^α dα = (s−1)/ln s with constant density
        let p = Measure::from_density(Density::Power { end: 1.0, kappa: 0.0, scale: 1.0 }).unwrap();
        let t = Measure::from_density(Density::Table { breakpoints: vec![0.0, 1.0], values: vec![1.0, 1.0] }).unwrap();
        let s = pc(3.0, 2.0);
        let exact = (s.to_complex() - 1.0) / s.ln();
        assert!((phi_eval(&p, s) - exact).norm() < 1e-10 * exact.norm());
        assert!((phi_eval(&t, s) - exact).norm() < 1e-10 * exact.norm());
    }

    #[test]
    fn singular_power_density() {
        // ∫_0^1 (1−α)^{-1/2} dα = 2 at s = 1
        let p = Measure::from_density(Density::Power { end: 1.0, kappa: -0.5, scale: 1.0 }).unwrap();
        let z = phi_eval(&p, pc(1.0, 0.0));
        assert!((z.re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bounds_examples() {
        let b = phi_bounds_check(&Measure::delta(0.0, 1.0).unwrap(), pc(5.0, 0.0)).unwrap();
        assert_eq!((b.lower, b.value, b.upper, b.ok), (1.0, 1.0, 5.0, true));
        let b = phi_bounds_check(&Measure::delta(1.0, 1.0).unwrap(), pc(0.5, PI / 2.0)).unwrap();
        assert!((b.lower - 0.5 * (PI / 4.0).cos()).abs() < 1e-15);
        assert!((b.value - 0.5).abs() < 1e-15 && b.upper == 1.0 && b.ok);
        assert_eq!(phi_bounds_check(&Measure::delta(1.0, 1.0).unwrap(), pc(1.0, PI)), Err(Error::OnBranchCut));
    }

    #[test]
    fn psi_examples() {
        let hooke = SymbolPair::new(Measure::delta(0.0, 2.0).unwrap(), Measure::delta(0.0, 8.0).unwrap());
        for &(r, t) in &[(1.0, 0.0), (3.0, PI), (0.1, -PI), (5.0, 1.0)] {
            assert!((psi_eval(&hooke, pc(r, t)).unwrap() - 0.5).norm() < 1e-15);
        }
        let voigt = SymbolPair::new(
            Measure::delta(0.0, 1.0).unwrap(),
            Measure::from_atoms(&[(0.0, 1.0), (1.0, 1.0)]).unwrap(),
        );
        assert!((psi_eval(&voigt, pc(1.0, 0.0)).unwrap().re - 0.5f64.sqrt()).abs() < 1e-15);
        let zener = SymbolPair::new(
            Measure::from_atoms(&[(0.0, 1.0), (0.5, 0.5)]).unwrap(),
            Measure::from_atoms(&[(0.0, 1.0), (0.5, 1.0)]).unwrap(),
        );
        let v = psi_eval(&zener, pc(1e8, 0.0)).unwrap();
        assert!((v.re - 0.5f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn cut_sides_are_conjugate() {
        let newton = SymbolPair::new(Measure::delta(0.0, 1.0).unwrap(), Measure::delta(1.0, 2.0).unwrap());
        let up = psi_eval(&newton, pc(2.0, PI)).unwrap();
        let down = psi_eval(&newton, pc(2.0, -PI)).unwrap();
        assert!((up - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((down - up.conj()).norm() < 1e-15);
    }

    #[test]
    fn asymptotic_kinds() {
        let a = phi_asymptotic(&Measure::delta(0.7, 2.0).unwrap());
        assert_eq!(a, Asymptotic { top: 0.7, atom_mass: 2.0, kind: LeadKind::AtomLead });
        let e = phi_asymptotic(&Measure::from_density(Density::Exponential { base: 0.3, scale: 1.0 }).unwrap());
        assert_eq!(e.kind, LeadKind::ExpLead);
        assert_eq!(e.top, 1.0);
        let p = phi_asymptotic(&Measure::from_density(Density::Power { end: 1.0, kappa: 0.5, scale: 1.0 }).unwrap());
        assert_eq!(p.kind, LeadKind::PowerLead { kappa: 0.5 });
        let mixed = Measure::new(
            vec![Atom { alpha: 0.2, weight: 1.0 }],
            vec![
                Density::Exponential { base: 2.0, scale: 1.0 },
                Density::Power { end: 1.0, kappa: 0.5, scale: 1.0 },
            ],
        )
        .unwrap();
        assert_eq!(phi_asymptotic(&mixed).kind, LeadKind::ExpLead);
        let t = Measure::from_density(Density::Table { breakpoints: vec![0.0, 1.0], values: vec![1.0, 1.0] }).unwrap();
        assert_eq!(phi_asymptotic(&t).kind, LeadKind::GenericSubpolynomial);
    }
}
