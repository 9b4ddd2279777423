//! The thermodynamic restriction, storage/loss moduli and model classification.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::measures::{Density, Measure};
use crate::symbol::{phi_eval, PolarComplex, SymbolPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckMode {
    ExactAtoms,
    ExactDensityRatio,
    SampledRectangles,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn half_open(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi, lo_closed: true, hi_closed: false }
    }

    pub fn point(x: f64) -> Interval {
        Interval::closed(x, x)
    }

    fn mass(&self, mu: &Measure) -> f64 {
        mu.mass_unchecked(self.lo, self.hi, self.lo_closed, self.hi_closed)
    }
}

/// A rectangle A × B (A the α-side, B the β-side) with its ν-mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    pub alpha: Interval,
    pub beta: Interval,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictionReport {
    pub satisfied: bool,
    pub mode: CheckMode,
    pub witness: Option<Rectangle>,
    pub rectangles_checked: u64,
}

/// ν(A × B) = μ_ε(A)μ_σ(B) − μ_σ(A)μ_ε(B).
pub fn nu_rect(pair: &SymbolPair, a: &Interval, b: &Interval) -> f64 {
    a.mass(&pair.mu_eps) * b.mass(&pair.mu_sigma) - a.mass(&pair.mu_sigma) * b.mass(&pair.mu_eps)
}

const NU_REL_TOL: f64 = 1e-12;

fn negative(eps_a: f64, sig_b: f64, sig_a: f64, eps_b: f64) -> Option<f64> {
    let plus = eps_a * sig_b;
    let minus = sig_a * eps_b;
    let nu = plus - minus;
    (nu < -NU_REL_TOL * (plus + minus)).then_some(nu)
}

pub fn check_restriction(pair: &SymbolPair) -> RestrictionReport {
    let (s, e) = (&pair.mu_sigma, &pair.mu_eps);
    if s.is_atomic() && e.is_atomic() {
        return check_atom_pairs(pair);
    }
    if s.is_absolutely_continuous() && e.is_absolutely_continuous() {
        return check_density_ratio(pair);
    }
    let atoms = check_atom_pairs(pair);
    if !atoms.satisfied {
        return RestrictionReport { mode: CheckMode::SampledRectangles, ..atoms };
    }
    let mut rects = check_rectangles(pair, DYADIC_LEVELS);
    rects.rectangles_checked += atoms.rectangles_checked;
    rects
}

/// Exact test over all pairs of atom locations α > β.
fn check_atom_pairs(pair: &SymbolPair) -> RestrictionReport {
    let mut points: Vec<f64> =
        pair.mu_sigma.atoms().iter().chain(pair.mu_eps.atoms()).map(|a| a.alpha).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let sig: Vec<f64> = points.iter().map(|&p| pair.mu_sigma.atom_weight_at(p)).collect();
    let eps: Vec<f64> = points.iter().map(|&p| pair.mu_eps.atom_weight_at(p)).collect();
    let mut checked = 0;
    for i in 0..points.len() {
        for j in 0..i {
            checked += 1;
            if let Some(nu) = negative(eps[i], sig[j], sig[i], eps[j]) {
                return RestrictionReport {
                    satisfied: false,
                    mode: CheckMode::ExactAtoms,
                    witness: Some(Rectangle { alpha: Interval::point(points[i]), beta: Interval::point(points[j]), nu }),
                    rectangles_checked: checked,
                };
            }
        }
    }
    RestrictionReport { satisfied: true, mode: CheckMode::ExactAtoms, witness: None, rectangles_checked: checked }
}

pub const DYADIC_LEVELS: u32 = 12;

/// ν on every pair of distinct dyadic cells at levels 1..=`levels`; cells are
/// half-open except the last, which is closed.
pub fn check_rectangles(pair: &SymbolPair, levels: u32) -> RestrictionReport {
    let n = 1usize << levels;
    let cell = |i: usize, count: usize| {
        let h = 1.0 / count as f64;
        let hi = if i + 1 == count { 1.0 } else { (i + 1) as f64 * h };
        Interval { lo: i as f64 * h, hi, lo_closed: true, hi_closed: i + 1 == count }
    };
    let mut sig: Vec<f64> = (0..n).map(|i| cell(i, n).mass(&pair.mu_sigma)).collect();
    let mut eps: Vec<f64> = (0..n).map(|i| cell(i, n).mass(&pair.mu_eps)).collect();
    let mut levels_masses = Vec::new();
    for _ in 0..levels {
        levels_masses.push((sig.clone(), eps.clone()));
        sig = sig.chunks(2).map(|c| c[0] + c[1]).collect();
        eps = eps.chunks(2).map(|c| c[0] + c[1]).collect();
    }
    let mut checked = 0;
    // coarse levels first so the witness is as large as possible
    for (sig, eps) in levels_masses.iter().rev() {
        let count = sig.len();
        for i in 0..count {
            if eps[i] == 0.0 && sig[i] == 0.0 {
                checked += i as u64;
                continue;
            }
            for j in 0..i {
                checked += 1;
                if let Some(nu) = negative(eps[i], sig[j], sig[i], eps[j]) {
                    return RestrictionReport {
                        satisfied: false,
                        mode: CheckMode::SampledRectangles,
                        witness: Some(Rectangle { alpha: cell(i, count), beta: cell(j, count), nu }),
                        rectangles_checked: checked,
                    };
                }
            }
        }
    }
    RestrictionReport { satisfied: true, mode: CheckMode::SampledRectangles, witness: None, rectangles_checked: checked }
}

const RATIO_SAMPLES: usize = 10_000;

/// Pure densities f (σ) and g (ε): (T) holds iff f/g is non-increasing (a/0 = ∞).
fn check_density_ratio(pair: &SymbolPair) -> RestrictionReport {
    let (s, e) = (&pair.mu_sigma, &pair.mu_eps);
    if let ([Density::Exponential { base: a, .. }], [Density::Exponential { base: b, .. }]) =
        (s.densities(), e.densities())
    {
        let ok = *a <= *b * (1.0 + NU_REL_TOL);
        let witness = (!ok).then(|| {
            let (hi, lo) = (Interval::closed(0.5, 1.0), Interval::closed(0.0, 0.5));
            Rectangle { alpha: hi, beta: lo, nu: nu_rect(pair, &hi, &lo) }
        });
        return RestrictionReport { satisfied: ok, mode: CheckMode::ExactDensityRatio, witness, rectangles_checked: 1 };
    }

    let mut xs: Vec<f64> = (0..RATIO_SAMPLES).map(|k| (k as f64 + 0.5) / RATIO_SAMPLES as f64).collect();
    for d in s.densities().iter().chain(e.densities()) {
        match d {
            Density::Table { breakpoints, .. } => xs.extend(breakpoints),
            _ => {
                let (lo, hi) = d.support();
                xs.extend([lo, hi]);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut prev: Option<(f64, f64)> = None;
    let mut checked = 0;
    for &x in &xs {
        let (f, g) = (s.density_value(x), e.density_value(x));
        if !(f > 0.0 || g > 0.0) || (f.is_infinite() && g.is_infinite()) {
            continue;
        }
        let ratio = if g > 0.0 { f / g } else { f64::INFINITY };
        checked += 1;
        if let Some((px, pr)) = prev {
            let increased = if pr.is_infinite() { false } else { ratio > pr * (1.0 + 1e-10) };
            if increased {
                if let Some(w) = local_witness(pair, px, x) {
                    return RestrictionReport {
                        satisfied: false,
                        mode: CheckMode::ExactDensityRatio,
                        witness: Some(w),
                        rectangles_checked: checked,
                    };
                }
            }
        }
        prev = Some((x, ratio));
    }
    let rect = check_rectangles(pair, DYADIC_LEVELS);
    RestrictionReport {
        satisfied: rect.satisfied,
        mode: CheckMode::ExactDensityRatio,
        witness: rect.witness,
        rectangles_checked: checked + rect.rectangles_checked,
    }
}

/// Small rectangles around a sampled increase of f/g at β = lower < α = upper.
fn local_witness(pair: &SymbolPair, lower: f64, upper: f64) -> Option<Rectangle> {
    let gap = upper - lower;
    for k in 1..=6 {
        let d = gap / 2f64.powi(k);
        let a = Interval::closed(upper, (upper + d).min(1.0));
        let b = Interval::closed((lower - d).max(0.0), lower);
        let (a, b) = if a.hi > a.lo { (a, b) } else { (Interval::closed(upper - d, upper), b) };
        let nu = nu_rect(pair, &a, &b);
        if nu < 0.0 {
            return Some(Rectangle { alpha: a, beta: b, nu });
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moduli {
    pub omega: f64,
    pub storage: f64,
    pub loss: f64,
}

/// Ê(ω) = Φ_ε(iω)/Φ_σ(iω).
pub fn moduli(pair: &SymbolPair, omega: f64) -> Moduli {
    let s = PolarComplex::new(omega, FRAC_PI_2).expect("omega must be positive");
    let e: Complex64 = phi_eval(&pair.mu_eps, s) / phi_eval(&pair.mu_sigma, s);
    Moduli { omega, storage: e.re, loss: e.im }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassTag {
    ProperFractional,
    Hooke,
    Newton,
    Voigt,
    Maxwell,
    Zener,
    /// supported on {0, 1} but matching none of the admissible classical patterns
    ClassicalInadmissible,
}

impl ClassTag {
    pub fn is_classical(&self) -> bool {
        !matches!(self, ClassTag::ProperFractional)
    }
}

/// μ_σ = a·δ + τ·λ, μ_ε = b·δ + λ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalParams {
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    /// absent when the pair is a multiple of a single atom at 0
    pub lambda: Option<Measure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelClass {
    pub tag: ClassTag,
    pub exceptional: bool,
    pub exceptional_params: Option<ExceptionalParams>,
}

pub fn classify(pair: &SymbolPair) -> ModelClass {
    let tag = classical_tag(pair);
    let params = exceptional_params(pair);
    ModelClass { tag, exceptional: params.is_some(), exceptional_params: params }
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * x.abs().max(y.abs())
}

fn classical_tag(pair: &SymbolPair) -> ClassTag {
    let (s, e) = (&pair.mu_sigma, &pair.mu_eps);
    let on_ends = |m: &Measure| m.is_atomic() && m.atoms().iter().all(|a| a.alpha == 0.0 || a.alpha == 1.0);
    if !(on_ends(s) && on_ends(e)) {
        return ClassTag::ProperFractional;
    }
    let (a0, a1) = (s.atom_weight_at(0.0), s.atom_weight_at(1.0));
    let (b0, b1) = (e.atom_weight_at(0.0), e.atom_weight_at(1.0));
    let proportional = (a0 > 0.0) == (b0 > 0.0) && (a1 > 0.0) == (b1 > 0.0) && close(a0 * b1, a1 * b0);
    if proportional {
        return ClassTag::Hooke;
    }
    match (a0 > 0.0, a1 > 0.0, b0 > 0.0, b1 > 0.0) {
        (true, false, false, true) => ClassTag::Newton,
        (true, false, true, true) => ClassTag::Voigt,
        (true, true, false, true) => ClassTag::Maxwell,
        (true, true, true, true) if a0 * b1 > a1 * b0 => ClassTag::Zener,
        _ => ClassTag::ClassicalInadmissible,
    }
}

const MATCH_SAMPLES: usize = 1000;

/// Whether `x` equals `tau`·`y` as measures (atoms exactly located, weights and
/// density values within the matching tolerance).
fn is_multiple(x: &Measure, y: &Measure, tau: f64) -> bool {
    if x.atoms().len() != y.atoms().len() {
        return false;
    }
    for (p, q) in x.atoms().iter().zip(y.atoms()) {
        if p.alpha != q.alpha || !close(p.weight, tau * q.weight) {
            return false;
        }
    }
    if x.densities().is_empty() != y.densities().is_empty() {
        return false;
    }
    if x.densities().is_empty() {
        return true;
    }
    let tiny = 1e-12 * x.total_mass();
    (0..=MATCH_SAMPLES).all(|k| {
        let a = k as f64 / MATCH_SAMPLES as f64;
        let (f, g) = (x.density_value(a), tau * y.density_value(a));
        (f.is_infinite() && g.is_infinite()) || (f - g).abs() <= 1e-12 * f.abs().max(g.abs()) + tiny * 1e-4
    }) && (1..=64).all(|k| {
        let (lo, hi) = ((k - 1) as f64 / 64.0, k as f64 / 64.0);
        let (f, g) = (x.closed_mass(lo, hi), tau * y.closed_mass(lo, hi));
        (f - g).abs() <= 1e-12 * f.max(g) + tiny * 1e-4
    })
}

fn without_origin_atom(m: &Measure) -> Option<Measure> {
    let atoms = m.atoms().iter().filter(|a| a.alpha != 0.0).copied().collect();
    Measure::new(atoms, m.densities().to_vec()).ok()
}

fn exceptional_params(pair: &SymbolPair) -> Option<ExceptionalParams> {
    let (s, e) = (&pair.mu_sigma, &pair.mu_eps);
    let a = s.atom_weight_at(0.0);
    let b = e.atom_weight_at(0.0);
    let rest_s = without_origin_atom(s);
    let rest_e = without_origin_atom(e);
    match (rest_s, rest_e) {
        (None, None) => {
            // both are multiples of δ at 0
            Some(ExceptionalParams { a, b, tau: a / b, lambda: None })
        }
        (Some(ls), Some(le)) => {
            let tau = ls.total_mass() / le.total_mass();
            if !is_multiple(&ls, &le, tau) {
                return None;
            }
            // μ_σ = τ·μ_ε as a whole is degenerate for any support
            if close(a, tau * b) || (a == 0.0 && b == 0.0) {
                return Some(ExceptionalParams { a, b, tau, lambda: Some(le) });
            }
            let top = le.support_bounds().1;
            let admissible = a > 0.0 && (b == 0.0 || a / b >= tau * (1.0 - 1e-12));
            (top == 1.0 && admissible).then_some(ExceptionalParams { a, b, tau, lambda: Some(le) })
        }
        _ => None,
    }
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

    #[test]
    fn restriction_examples() {
        let r = check_restriction(&zener());
        assert!(r.satisfied);
        assert_eq!(r.mode, CheckMode::ExactAtoms);

        let bad = SymbolPair::new(atoms(&[(0.2, 1.0), (0.6, 1.0)]), atoms(&[(0.4, 1.0), (0.8, 1.0)]));
        let r = check_restriction(&bad);
        assert!(!r.satisfied);
        let w = r.witness.unwrap();
        assert!(w.nu < 0.0);
        assert!(w.alpha.lo > w.beta.hi);
        assert!((nu_rect(&bad, &w.alpha, &w.beta) - w.nu).abs() < 1e-15);

        let m = Measure::new(
            vec![crate::Atom { alpha: 0.3, weight: 1.0 }],
            vec![Density::Exponential { base: 2.0, scale: 1.0 }],
        )
        .unwrap();
        let same = SymbolPair::new(m.clone(), m);
        let r = check_restriction(&same);
        assert!(r.satisfied);
        assert_eq!(r.mode, CheckMode::SampledRectangles);

        let exp = |b: f64| Measure::from_density(Density::Exponential { base: b, scale: 1.0 }).unwrap();
        let r = check_restriction(&SymbolPair::new(exp(0.5), exp(1.0)));
        assert!(r.satisfied);
        assert_eq!(r.mode, CheckMode::ExactDensityRatio);
        let r = check_restriction(&SymbolPair::new(exp(1.0), exp(0.5)));
        assert!(!r.satisfied && r.witness.unwrap().nu < 0.0);
    }

    #[test]
    fn density_ratio_violation_has_witness() {
        // f/g increases: σ grows faster than ε
        let s = Measure::from_density(Density::Power { end: 1.0, kappa: -0.5, scale: 1.0 }).unwrap();
        let e = Measure::from_density(Density::Exponential { base: 1.0, scale: 1.0 }).unwrap();
        let r = check_restriction(&SymbolPair::new(s.clone(), e.clone()));
        assert!(!r.satisfied);
        assert!(r.witness.unwrap().nu < 0.0);
        let r = check_restriction(&SymbolPair::new(e, s));
        assert!(r.satisfied);
    }

    #[test]
    fn mixed_violation_found_by_rectangles() {
        let s = Measure::new(vec![crate::Atom { alpha: 0.9, weight: 1.0 }], vec![]).unwrap();
        let e = Measure::new(vec![], vec![Density::Table { breakpoints: vec![0.0, 0.5], values: vec![1.0, 1.0] }])
            .unwrap();
        let r = check_restriction(&SymbolPair::new(s, e));
        assert!(!r.satisfied);
        assert_eq!(r.mode, CheckMode::SampledRectangles);
        assert!(r.witness.unwrap().nu < 0.0);
    }

    #[test]
    fn moduli_examples() {
        let hooke = SymbolPair::new(atoms(&[(0.0, 1.0)]), atoms(&[(0.0, 1.0)]));
        let m = moduli(&hooke, 3.0);
        assert_eq!((m.storage, m.loss), (1.0, 0.0));
        let newton = SymbolPair::new(atoms(&[(0.0, 1.0)]), atoms(&[(1.0, 1.0)]));
        let m = moduli(&newton, 2.5);
        assert!(m.storage.abs() < 1e-15 && (m.loss - 2.5).abs() < 1e-15);
    }

    #[test]
    fn classification_table() {
        let c = |s: &[(f64, f64)], e: &[(f64, f64)]| classify(&SymbolPair::new(atoms(s), atoms(e)));
        assert_eq!(c(&[(0.0, 2.0)], &[(0.0, 1.0)]).tag, ClassTag::Hooke);
        assert_eq!(c(&[(0.0, 1.0)], &[(1.0, 1.0)]).tag, ClassTag::Newton);
        assert_eq!(c(&[(0.0, 1.0)], &[(0.0, 1.0), (1.0, 1.0)]).tag, ClassTag::Voigt);
        assert_eq!(c(&[(0.0, 1.0), (1.0, 1.0)], &[(1.0, 1.0)]).tag, ClassTag::Maxwell);
        assert_eq!(c(&[(0.0, 1.0), (1.0, 0.5)], &[(0.0, 1.0), (1.0, 1.0)]).tag, ClassTag::Zener);
        assert_eq!(c(&[(0.0, 1.0), (1.0, 2.0)], &[(0.0, 1.0), (1.0, 1.0)]).tag, ClassTag::ClassicalInadmissible);
        assert_eq!(c(&[(0.0, 1.0), (1.0, 2.0)], &[(0.0, 1.0), (1.0, 2.0)]).tag, ClassTag::Hooke);
        let z = classify(&zener());
        assert_eq!(z.tag, ClassTag::ProperFractional);
        assert!(!z.exceptional);
    }

    #[test]
    fn exceptional_detection() {
        let c = |s: &[(f64, f64)], e: &[(f64, f64)]| classify(&SymbolPair::new(atoms(s), atoms(e)));
        // Hooke, Maxwell and Zener are exceptional; Newton and Voigt are not
        assert!(c(&[(0.0, 2.0)], &[(0.0, 1.0)]).exceptional);
        assert!(c(&[(0.0, 1.0), (1.0, 1.0)], &[(1.0, 1.0)]).exceptional);
        let z = c(&[(0.0, 1.0), (1.0, 0.5)], &[(0.0, 1.0), (1.0, 1.0)]);
        assert!(z.exceptional);
        let p = z.exceptional_params.unwrap();
        assert_eq!((p.a, p.b, p.tau), (1.0, 1.0, 0.5));
        assert!(!c(&[(0.0, 1.0)], &[(1.0, 1.0)]).exceptional);
        assert!(!c(&[(0.0, 1.0)], &[(0.0, 1.0), (1.0, 1.0)]).exceptional);
        // fractional family with λ = δ(·−1) + δ(·−0.4)
        let ex = c(&[(0.0, 3.0), (0.4, 0.5), (1.0, 1.0)], &[(0.0, 1.0), (0.4, 0.25), (1.0, 0.5)]);
        assert!(ex.exceptional);
        assert_eq!(ex.tag, ClassTag::ProperFractional);
        // common part tops out below 1
        assert!(!c(&[(0.0, 3.0), (0.4, 0.5)], &[(0.0, 1.0), (0.4, 0.25)]).exceptional);
        // densities: σ = δ + 0.5·e^α, ε = e^α
        let s = Measure::new(
            vec![crate::Atom { alpha: 0.0, weight: 1.0 }],
            vec![Density::Exponential { base: std::f64::consts::E, scale: 0.5 }],
        )
        .unwrap();
        let e = Measure::from_density(Density::Exponential { base: std::f64::consts::E, scale: 1.0 }).unwrap();
        let r = classify(&SymbolPair::new(s, e));
        assert!(r.exceptional);
        assert!((r.exceptional_params.unwrap().tau - 0.5).abs() < 1e-14);
    }

    #[test]
    fn nu_is_antisymmetric() {
        let p = zener();
        let a = Interval::closed(0.3, 0.7);
        let b = Interval::half_open(0.0, 0.2);
        assert_eq!(nu_rect(&p, &a, &b), -nu_rect(&p, &b, &a));
    }
}
