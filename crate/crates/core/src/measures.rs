//! Positive Radon measures on [0, 1]: finitely many atoms plus parametric densities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::gauss_legendre2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub alpha: f64,
    pub weight: f64,
}

/// Absolutely continuous components.
///
/// `RisingPower` is the mirror image of `Power`; it appears when a measure is
/// reflected through α ↦ 1 − α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    /// α ↦ scale·base^α on [0, 1]
    Exponential { base: f64, scale: f64 },
    /// α ↦ scale·(end − α)^kappa on [0, end]
    Power { end: f64, kappa: f64, scale: f64 },
    /// α ↦ scale·(α − start)^kappa on [start, 1]
    RisingPower { start: f64, kappa: f64, scale: f64 },
    /// piecewise-linear interpolation, zero outside the breakpoints
    Table { breakpoints: Vec<f64>, values: Vec<f64> },
}

fn finite_pos(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl Density {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidMeasure(m.to_string()));
        match self {
            Density::Exponential { base, scale } => {
                if !finite_pos(*base) {
                    return bad("exponential base must be positive");
                }
                if !finite_pos(*scale) {
                    return bad("exponential scale must be positive");
                }
            }
            Density::Power { end, kappa, scale } => {
                if !(end.is_finite() && *end > 0.0 && *end <= 1.0) {
                    return bad("power end must lie in (0, 1]");
                }
                if !(kappa.is_finite() && *kappa > -1.0) {
                    return bad("power kappa must exceed -1");
                }
                if !finite_pos(*scale) {
                    return bad("power scale must be positive");
                }
            }
            Density::RisingPower { start, kappa, scale } => {
                if !(start.is_finite() && *start >= 0.0 && *start < 1.0) {
                    return bad("rising power start must lie in [0, 1)");
                }
                if !(kappa.is_finite() && *kappa > -1.0) {
                    return bad("rising power kappa must exceed -1");
                }
                if !finite_pos(*scale) {
                    return bad("rising power scale must be positive");
                }
            }
            Density::Table { breakpoints, values } => {
                if breakpoints.len() < 2 {
                    return bad("table needs at least two breakpoints");
                }
                if breakpoints.len() != values.len() {
                    return bad("table breakpoints and values differ in length");
                }
                if breakpoints.iter().any(|b| !(b.is_finite() && (0.0..=1.0).contains(b))) {
                    return bad("table breakpoints must lie in [0, 1]");
                }
                if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("table breakpoints must be strictly ascending");
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return bad("table values must be non-negative");
                }
            }
        }
        Ok(())
    }

    fn is_null(&self) -> bool {
        match self {
            Density::Table { values, .. } => values.iter().all(|v| *v == 0.0),
            _ => false,
        }
    }

    /// Pointwise value; zero off the support.
    pub fn value(&self, alpha: f64) -> f64 {
        match self {
            Density::Exponential { base, scale } => {
                if (0.0..=1.0).contains(&alpha) {
                    scale * base.powf(alpha)
                } else {
                    0.0
                }
            }
            Density::Power { end, kappa, scale } => {
                if (0.0..=*end).contains(&alpha) {
                    scale * (end - alpha).powf(*kappa)
                } else {
                    0.0
                }
            }
            Density::RisingPower { start, kappa, scale } => {
                if (*start..=1.0).contains(&alpha) {
                    scale * (alpha - start).powf(*kappa)
                } else {
                    0.0
                }
            }
            Density::Table { breakpoints, values } => table_value(breakpoints, values, alpha),
        }
    }

    /// Mass of [lo, hi] (endpoints are Lebesgue-null).
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        match self {
            Density::Exponential { base, scale } => {
                let (lo, hi) = (lo.max(0.0), hi.min(1.0));
                if hi <= lo {
                    return 0.0;
                }
                let lb = base.ln();
                if lb == 0.0 {
                    scale * (hi - lo)
                } else {
                    scale * base.powf(lo) * ((hi - lo) * lb).exp_m1() / lb
                }
            }
            Density::Power { end, kappa, scale } => {
                let (lo, hi) = (lo.clamp(0.0, *end), hi.clamp(0.0, *end));
                let p = kappa + 1.0;
                scale * ((end - lo).powf(p) - (end - hi).powf(p)) / p
            }
            Density::RisingPower { start, kappa, scale } => {
                let (lo, hi) = (lo.clamp(*start, 1.0), hi.clamp(*start, 1.0));
                let p = kappa + 1.0;
                scale * ((hi - start).powf(p) - (lo - start).powf(p)) / p
            }
            Density::Table { breakpoints, values } => {
                let mut m = 0.0;
                for i in 0..breakpoints.len() - 1 {
                    let a = breakpoints[i].max(lo);
                    let b = breakpoints[i + 1].min(hi);
                    if b > a {
                        m += gauss_legendre2(|x| table_value(breakpoints, values, x), a, b);
                    }
                }
                m
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mass(0.0, 1.0)
    }

    /// Closed support (m, M); table margins where the interpolant vanishes are trimmed.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Density::Exponential { .. } => (0.0, 1.0),
            Density::Power { end, .. } => (0.0, *end),
            Density::RisingPower { start, .. } => (*start, 1.0),
            Density::Table { breakpoints, values } => {
                let n = values.len();
                let first = values.iter().position(|v| *v > 0.0).unwrap_or(0);
                let last = values.iter().rposition(|v| *v > 0.0).unwrap_or(n - 1);
                let lo = if first > 0 { breakpoints[first - 1] } else { breakpoints[0] };
                let hi = if last + 1 < n { breakpoints[last + 1] } else { breakpoints[n - 1] };
                (lo, hi)
            }
        }
    }

    /// Behaviour f(α) ≈ coef·(M − α)^kappa as α ↑ M, with M the top of the support.
    pub fn leading(&self) -> (f64, f64) {
        match self {
            Density::Exponential { base, scale } => (scale * base, 0.0),
            Density::Power { kappa, scale, .. } => (*scale, *kappa),
            Density::RisingPower { start, kappa, scale } => (scale * (1.0 - start).powf(*kappa), 0.0),
            Density::Table { breakpoints, values } => {
                let n = values.len();
                let last = values.iter().rposition(|v| *v > 0.0).unwrap_or(n - 1);
                if last + 1 == n {
                    (values[n - 1], 0.0)
                } else {
                    (values[last] / (breakpoints[last + 1] - breakpoints[last]), 1.0)
                }
            }
        }
    }

    /// Image under α ↦ 1 − α.
    pub fn reflect(&self) -> Density {
        match self {
            Density::Exponential { base, scale } => Density::Exponential { base: 1.0 / base, scale: scale * base },
            Density::Power { end, kappa, scale } => {
                Density::RisingPower { start: 1.0 - end, kappa: *kappa, scale: *scale }
            }
            Density::RisingPower { start, kappa, scale } => {
                Density::Power { end: 1.0 - start, kappa: *kappa, scale: *scale }
            }
            Density::Table { breakpoints, values } => Density::Table {
                breakpoints: breakpoints.iter().rev().map(|b| 1.0 - b).collect(),
                values: values.iter().rev().copied().collect(),
            },
        }
    }
}

fn table_value(bp: &[f64], vals: &[f64], x: f64) -> f64 {
    let n = bp.len();
    if x < bp[0] || x > bp[n - 1] {
        return 0.0;
    }
    // first breakpoint strictly above x
    let i = bp.partition_point(|b| *b <= x);
    if i == 0 {
        return vals[0];
    }
    if i == n {
        return vals[n - 1];
    }
    let w = (x - bp[i - 1]) / (bp[i] - bp[i - 1]);
    vals[i - 1] + w * (vals[i] - vals[i - 1])
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct MeasureSpec {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    densities: Vec<Density>,
}

/// A non-zero positive measure on [0, 1]. Atoms are sorted with distinct orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec", into = "MeasureSpec")]
pub struct Measure {
    atoms: Vec<Atom>,
    densities: Vec<Density>,
}

impl TryFrom<MeasureSpec> for Measure {
    type Error = Error;
    fn try_from(spec: MeasureSpec) -> Result<Self> {
        Measure::new(spec.atoms, spec.densities)
    }
}

impl From<Measure> for MeasureSpec {
    fn from(m: Measure) -> Self {
        MeasureSpec { atoms: m.atoms, densities: m.densities }
    }
}

impl Measure {
    pub fn new(atoms: Vec<Atom>, densities: Vec<Density>) -> Result<Measure> {
        for a in &atoms {
            if !(a.alpha.is_finite() && (0.0..=1.0).contains(&a.alpha)) {
                return Err(Error::InvalidMeasure(format!("atom order {} outside [0, 1]", a.alpha)));
            }
            if !(a.weight.is_finite() && a.weight >= 0.0) {
                return Err(Error::InvalidMeasure(format!("atom weight {} is negative", a.weight)));
            }
        }
        for d in &densities {
            d.validate()?;
        }
        let mut atoms: Vec<Atom> = atoms.into_iter().filter(|a| a.weight > 0.0).collect();
        atoms.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.alpha == a.alpha => last.weight += a.weight,
                _ => merged.push(a),
            }
        }
        let densities: Vec<Density> = densities.into_iter().filter(|d| !d.is_null()).collect();
        if merged.is_empty() && densities.is_empty() {
            return Err(Error::ZeroMeasure);
        }
        Ok(Measure { atoms: merged, densities })
    }

    /// Purely atomic measure from (order, weight) pairs.
    pub fn from_atoms(pairs: &[(f64, f64)]) -> Result<Measure> {
        Measure::new(pairs.iter().map(|&(alpha, weight)| Atom { alpha, weight }).collect(), vec![])
    }

    pub fn delta(alpha: f64, weight: f64) -> Result<Measure> {
        Measure::from_atoms(&[(alpha, weight)])
    }

    pub fn from_density(d: Density) -> Result<Measure> {
        Measure::new(vec![], vec![d])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn densities(&self) -> &[Density] {
        &self.densities
    }

    pub fn is_atomic(&self) -> bool {
        self.densities.is_empty()
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>()
            + self.densities.iter().map(Density::total_mass).sum::<f64>()
    }

    pub fn interval_mass(&self, lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi || lo < 0.0 || hi > 1.0 {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(self.mass_unchecked(lo, hi, lo_closed, hi_closed))
    }

    pub(crate) fn mass_unchecked(&self, lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| {
                let above = if lo_closed { a.alpha >= lo } else { a.alpha > lo };
                let below = if hi_closed { a.alpha <= hi } else { a.alpha < hi };
                above && below
            })
            .map(|a| a.weight)
            .sum();
        atoms + self.densities.iter().map(|d| d.mass(lo, hi)).sum::<f64>()
    }

    /// Closed-interval mass μ([lo, hi]).
    pub fn closed_mass(&self, lo: f64, hi: f64) -> f64 {
        self.mass_unchecked(lo, hi, true, true)
    }

    pub fn support_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for a in &self.atoms {
            lo = lo.min(a.alpha);
            hi = hi.max(a.alpha);
        }
        for d in &self.densities {
            let (a, b) = d.support();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    pub fn atom_weight_at(&self, point: f64) -> f64 {
        self.atoms.iter().find(|a| a.alpha == point).map_or(0.0, |a| a.weight)
    }

    /// Sum of the density components at α.
    pub fn density_value(&self, alpha: f64) -> f64 {
        self.densities.iter().map(|d| d.value(alpha)).sum()
    }

    /// Image measure under α ↦ 1 − α.
    pub fn reflect(&self) -> Measure {
        let atoms = self.atoms.iter().map(|a| Atom { alpha: 1.0 - a.alpha, weight: a.weight }).collect();
        let densities = self.densities.iter().map(Density::reflect).collect();
        Measure::new(atoms, densities).expect("reflection preserves validity")
    }

    /// Dominant density behaviour at the top M of the support: the summed
    /// coefficient over components reaching M with the smallest exponent.
    pub fn density_leading(&self, top: f64) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for d in &self.densities {
            if d.support().1 != top {
                continue;
            }
            let (c, k) = d.leading();
            best = match best {
                None => Some((c, k)),
                Some((_, bk)) if k < bk => Some((c, k)),
                Some((bc, bk)) if k == bk => Some((bc + c, bk)),
                other => other,
            };
        }
        best
    }
}
