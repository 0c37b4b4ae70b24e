//! Centroaffine invariants of a lattice surface.
//!
//! At every site the surface obeys the three structure recurrences
//!
//! ```text
//! r11 - r1 = alpha (r1 - r) + beta (r12 - r1)
//! r12      = a r + b (r1 - r) + c (r2 - r)
//! r22 - r2 = gamma (r2 - r) + delta (r12 - r2)
//! ```
//!
//! and each coefficient is a ratio of determinants of lattice points, hence
//! unchanged by any nondegenerate linear map of R^3.

use std::collections::BTreeMap;

use crate::error::{Assumption, Error, Result};
use crate::geometry::det3;
use crate::lattice::{LatticeWindow, Rect, Site};
use crate::scalar::{div, Scalar, Tolerance};

/// The seven structure coefficients at one site.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
    pub delta: S,
}

impl<S: Scalar> CoefficientSet<S> {
    pub fn new(a: S, b: S, c: S, alpha: S, beta: S, gamma: S, delta: S) -> Self {
        CoefficientSet {
            a,
            b,
            c,
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    /// Convenience constructor from `(numerator, denominator)` pairs in the
    /// order `a, b, c, alpha, beta, gamma, delta`.
    pub fn from_ratios(v: [(i64, i64); 7]) -> Self {
        let f = |k: usize| S::from_ratio(v[k].0, v[k].1);
        CoefficientSet::new(f(0), f(1), f(2), f(3), f(4), f(5), f(6))
    }

    /// `d = a - b - c`.
    pub fn d(&self) -> S {
        self.a.clone() - self.b.clone() - self.c.clone()
    }

    pub fn values(&self) -> [&S; 7] {
        [
            &self.a,
            &self.b,
            &self.c,
            &self.alpha,
            &self.beta,
            &self.gamma,
            &self.delta,
        ]
    }

    pub fn values_mut(&mut self) -> [&mut S; 7] {
        [
            &mut self.a,
            &mut self.b,
            &mut self.c,
            &mut self.alpha,
            &mut self.beta,
            &mut self.gamma,
            &mut self.delta,
        ]
    }

    pub const NAMES: [&'static str; 7] = ["a", "b", "c", "alpha", "beta", "gamma", "delta"];

    /// Clauses of the standing assumption `d != 0, bc != 0, a != 1` that fail.
    pub fn assumption_violations(&self, tol: &Tolerance) -> Vec<Assumption> {
        let mut out = Vec::new();
        let scale = self.a.to_f64().abs() + self.b.to_f64().abs() + self.c.to_f64().abs();
        if tol.is_zero(&self.d(), scale) {
            out.push(Assumption::DNonZero);
        }
        if tol.is_zero(&self.b, 0.0) {
            out.push(Assumption::BNonZero);
        }
        if tol.is_zero(&self.c, 0.0) {
            out.push(Assumption::CNonZero);
        }
        if tol.eq(&self.a, &S::one()) {
            out.push(Assumption::ANotOne);
        }
        out
    }

    pub fn check_assumptions(&self, site: Option<Site>, tol: &Tolerance) -> Result<()> {
        match self.assumption_violations(tol).first() {
            Some(&clause) => Err(Error::AssumptionViolated { clause, site }),
            None => Ok(()),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        self.values()
            .iter()
            .zip(other.values())
            .all(|(x, y)| tol.eq(*x, y))
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> CoefficientSet<T> {
        let v = self.values();
        CoefficientSet::new(f(v[0]), f(v[1]), f(v[2]), f(v[3]), f(v[4]), f(v[5]), f(v[6]))
    }
}

/// Anything that can hand out a coefficient set per site.
///
/// A bare [`CoefficientSet`] is the constant field.
pub trait CoefficientSource<S> {
    fn coefficients_at(&self, site: Site) -> Option<&CoefficientSet<S>>;

    fn require(&self, site: Site, needed: Site) -> Result<&CoefficientSet<S>> {
        self.coefficients_at(needed)
            .ok_or(Error::MissingStencil { site, needed })
    }
}

impl<S> CoefficientSource<S> for CoefficientSet<S> {
    fn coefficients_at(&self, _site: Site) -> Option<&CoefficientSet<S>> {
        Some(self)
    }
}

/// Coefficient sets over (a subset of) an index rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField<S> {
    rect: Rect,
    sets: BTreeMap<Site, CoefficientSet<S>>,
}

impl<S: Scalar> CoefficientField<S> {
    pub fn new(rect: Rect, sets: BTreeMap<Site, CoefficientSet<S>>) -> Result<Self> {
        if let Some(s) = sets.keys().find(|s| !rect.contains(**s)) {
            return Err(Error::InvalidWindow(format!("coefficient site {s} outside {rect}")));
        }
        Ok(CoefficientField { rect, sets })
    }

    /// The same set at every site of `rect`.
    pub fn constant(rect: Rect, set: &CoefficientSet<S>) -> Self {
        CoefficientField {
            rect,
            sets: rect.sites().map(|s| (s, set.clone())).collect(),
        }
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn get(&self, s: Site) -> Option<&CoefficientSet<S>> {
        self.sets.get(&s)
    }

    pub fn get_mut(&mut self, s: Site) -> Option<&mut CoefficientSet<S>> {
        self.sets.get_mut(&s)
    }

    /// Row-major iteration.
    pub fn iter(&self) -> impl Iterator<Item = (&Site, &CoefficientSet<S>)> {
        self.sets.iter()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `Some(set)` when every site carries the same set.
    pub fn as_constant(&self, tol: &Tolerance) -> Option<&CoefficientSet<S>> {
        let first = self.sets.values().next()?;
        self.sets
            .values()
            .all(|s| s.approx_eq(first, tol))
            .then_some(first)
    }
}

impl<S: Scalar> CoefficientSource<S> for CoefficientField<S> {
    fn coefficients_at(&self, site: Site) -> Option<&CoefficientSet<S>> {
        self.sets.get(&site)
    }
}

fn ratio<S: Scalar>(num: S, den: &S, what: &str, site: Site) -> Result<S> {
    div(num, den.clone(), what, Some(site))
}

/// `(a, b, c)` from `r, r1, r2, r12`.
pub fn extract_abc<S: Scalar>(w: &LatticeWindow<S>, site: Site) -> Result<(S, S, S)> {
    let r = w.at(site, 0, 0)?;
    let r1 = w.at(site, 1, 0)?;
    let r2 = w.at(site, 0, 1)?;
    let r12 = w.at(site, 1, 1)?;
    let den = det3(r, r1, r2);
    let what = "det[r, r1, r2]";
    // det[r12, r1, r2] / det[r, r1, r2] is the coefficient of r once r12 is
    // expanded in the basis (r, r1, r2), i.e. d = a - b - c.
    let d = ratio(det3(r12, r1, r2), &den, what, site)?;
    let b = ratio(det3(r, r12, r2), &den, what, site)?;
    let c = ratio(det3(r, r1, r12), &den, what, site)?;
    let a = d + b.clone() + c.clone();
    Ok((a, b, c))
}

/// `(alpha, beta)` from `r, r1, r11, r12`.
pub fn extract_alpha_beta<S: Scalar>(w: &LatticeWindow<S>, site: Site) -> Result<(S, S)> {
    let r = w.at(site, 0, 0)?;
    let r1 = w.at(site, 1, 0)?;
    let r11 = w.at(site, 2, 0)?;
    let r12 = w.at(site, 1, 1)?;
    let den = det3(r, r1, r12);
    let what = "det[r, r1, r12]";
    let alpha = ratio(det3(r1, r11, r12), &den, what, site)?;
    let beta = ratio(det3(r, r1, r11), &den, what, site)?;
    Ok((alpha, beta))
}

/// `(gamma, delta)` from `r, r2, r22, r12`.
pub fn extract_gamma_delta<S: Scalar>(w: &LatticeWindow<S>, site: Site) -> Result<(S, S)> {
    let r = w.at(site, 0, 0)?;
    let r2 = w.at(site, 0, 1)?;
    let r22 = w.at(site, 0, 2)?;
    let r12 = w.at(site, 1, 1)?;
    let den = det3(r, r2, r12);
    let what = "det[r, r2, r12]";
    let gamma = ratio(det3(r2, r22, r12), &den, what, site)?;
    let delta = ratio(det3(r, r2, r22), &den, what, site)?;
    Ok((gamma, delta))
}

pub fn extract_set<S: Scalar>(w: &LatticeWindow<S>, site: Site) -> Result<CoefficientSet<S>> {
    let (a, b, c) = extract_abc(w, site)?;
    let (alpha, beta) = extract_alpha_beta(w, site)?;
    let (gamma, delta) = extract_gamma_delta(w, site)?;
    Ok(CoefficientSet::new(a, b, c, alpha, beta, gamma, delta))
}

/// Max-abs residuals of the three structure recurrences after substituting `set`.
pub fn reconstruction_residuals<S: Scalar>(
    w: &LatticeWindow<S>,
    site: Site,
    set: &CoefficientSet<S>,
) -> Result<[S; 3]> {
    let r = w.at(site, 0, 0)?;
    let r1 = w.at(site, 1, 0)?;
    let r2 = w.at(site, 0, 1)?;
    let r12 = w.at(site, 1, 1)?;
    let r11 = w.at(site, 2, 0)?;
    let r22 = w.at(site, 0, 2)?;
    let first = &(r11 - r1) - &(&(r1 - r).scale(&set.alpha) + &(r12 - r1).scale(&set.beta));
    let middle = r12
        - &(&r.scale(&set.a) + &(&(r1 - r).scale(&set.b) + &(r2 - r).scale(&set.c)));
    let last = &(r22 - r2) - &(&(r2 - r).scale(&set.gamma) + &(r12 - r2).scale(&set.delta));
    Ok([first.norm_inf(), middle.norm_inf(), last.norm_inf()])
}

/// An assumption clause failing at a site of an extracted field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldWarning {
    pub site: Site,
    pub clause: Assumption,
}

#[derive(Clone, Debug)]
pub struct Extraction<S> {
    pub field: CoefficientField<S>,
    /// Per-site residuals of the three recurrences, row-major.
    pub residuals: BTreeMap<Site, [S; 3]>,
    pub warnings: Vec<FieldWarning>,
}

impl<S: Scalar> Extraction<S> {
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .values()
            .flatten()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

/// Coefficients at every site whose full stencil (`r` up to `r11`, `r22`) lies in the window.
pub fn extract_field<S: Scalar>(w: &LatticeWindow<S>, tol: &Tolerance) -> Result<Extraction<S>> {
    let rect = w
        .rect()
        .shrink(0, 2, 0, 2)
        .ok_or_else(|| Error::InvalidWindow(format!("{} is smaller than 3x3", w.rect())))?;
    let mut sets = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    let mut warnings = Vec::new();
    for site in rect.sites() {
        let set = extract_set(w, site)?;
        residuals.insert(site, reconstruction_residuals(w, site, &set)?);
        warnings.extend(
            set.assumption_violations(tol)
                .into_iter()
                .map(|clause| FieldWarning { site, clause }),
        );
        sets.insert(site, set);
    }
    Ok(Extraction {
        field: CoefficientField::new(rect, sets)?,
        residuals,
        warnings,
    })
}

/// Oriented cone volume `V(i,j) = det[r, r1, r2] / 6`.
pub fn triangle_volume<S: Scalar>(w: &LatticeWindow<S>, site: Site) -> Result<S> {
    let r = w.at(site, 0, 0)?;
    let r1 = w.at(site, 1, 0)?;
    let r2 = w.at(site, 0, 1)?;
    Ok(det3(r, r1, r2) / S::from_i64(6))
}
