//! Integrability of coefficient data.
//!
//! Six scalar conditions tie the coefficients at a site to those at the
//! neighbouring sites `(.)1`, `(.)2` and `(.)12`. They are equivalent to the
//! zero-curvature identity `A(m,n) B(m+1,n) = B(m,n) A(m,n+1)` of the
//! transition matrices. For constant coefficients they collapse to
//! `-alpha b = -gamma c = a - b - c = bc (beta delta - 1)`.

use std::collections::BTreeMap;

use crate::error::{Assumption, Error, Result};
use crate::invariants::{CoefficientSet, CoefficientSource};
use crate::lattice::{Rect, Site};
use crate::scalar::{div, Scalar, Tolerance};
use crate::synthesis::transition_matrices;

/// Signed residuals (LHS - RHS) of the six compatibility equations at one site.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatResiduals<S> {
    pub r_alpha: S,
    pub r_gamma: S,
    pub r_ratio: S,
    pub r_a12: S,
    pub r_beta: S,
    pub r_delta: S,
    /// The auxiliary quantity `K` entering the `a12` equation.
    pub k_value: S,
    scales: [f64; 6],
}

impl<S: Scalar> CompatResiduals<S> {
    pub const NAMES: [&'static str; 6] = ["r_alpha", "r_gamma", "r_ratio", "r_a12", "r_beta", "r_delta"];

    pub fn residuals(&self) -> [&S; 6] {
        [
            &self.r_alpha,
            &self.r_gamma,
            &self.r_ratio,
            &self.r_a12,
            &self.r_beta,
            &self.r_delta,
        ]
    }

    pub fn is_compatible(&self, tol: &Tolerance) -> bool {
        self.residuals()
            .iter()
            .zip(self.scales)
            .all(|(r, s)| tol.is_zero(*r, s))
    }

    /// Names of the equations whose residual is nonzero.
    pub fn failing(&self, tol: &Tolerance) -> Vec<&'static str> {
        self.residuals()
            .iter()
            .zip(self.scales)
            .zip(Self::NAMES)
            .filter(|((r, s), _)| !tol.is_zero(**r, *s))
            .map(|(_, n)| n)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.residuals()
            .iter()
            .map(|r| r.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

struct Eqs<S> {
    site: Site,
    values: Vec<S>,
    scales: Vec<f64>,
}

impl<S: Scalar> Eqs<S> {
    fn push(&mut self, lhs: S, rhs: S) {
        self.scales.push(lhs.to_f64().abs().max(rhs.to_f64().abs()));
        self.values.push(lhs - rhs);
    }

    fn div(&self, num: S, den: S, what: &str) -> Result<S> {
        div(num, den, what, Some(self.site))
    }
}

/// Evaluates the six compatibility equations at `site`.
///
/// Every denominator is checked before use; nothing is cleared.
pub fn scalar_residuals<S: Scalar>(
    src: &impl CoefficientSource<S>,
    site: Site,
) -> Result<CompatResiduals<S>> {
    let s = src.require(site, site)?;
    let s1 = src.require(site, site.shift(1, 0))?;
    let s2 = src.require(site, site.shift(0, 1))?;
    let s12 = src.require(site, site.shift(1, 1))?;
    let one = S::one;

    let (a, b, c) = (s.a.clone(), s.b.clone(), s.c.clone());
    let (a1, b1, c1) = (s1.a.clone(), s1.b.clone(), s1.c.clone());
    let (a2, b2, c2) = (s2.a.clone(), s2.b.clone(), s2.c.clone());
    let (a12, b12, c12) = (s12.a.clone(), s12.b.clone(), s12.c.clone());
    let d = s.d();
    let d1 = s1.d();
    let d2 = s2.d();

    let mut eq = Eqs {
        site,
        values: Vec::with_capacity(6),
        scales: Vec::with_capacity(6),
    };

    // alpha = (1 - a1) d / ((a - 1) b1)
    let rhs = eq.div(
        (one() - a1.clone()) * d.clone(),
        (a.clone() - one()) * b1.clone(),
        "(a - 1) b1",
    )?;
    eq.push(s.alpha.clone(), rhs);

    // gamma = (1 - a2) d / ((a - 1) c2)
    let rhs = eq.div(
        (one() - a2.clone()) * d.clone(),
        (a.clone() - one()) * c2.clone(),
        "(a - 1) c2",
    )?;
    eq.push(s.gamma.clone(), rhs);

    // c / b = c12 d2 / (b12 d1)
    let lhs = eq.div(c.clone(), b.clone(), "b")?;
    let rhs = eq.div(c12.clone() * d2.clone(), b12.clone() * d1.clone(), "b12 (a1 - b1 - c1)")?;
    eq.push(lhs, rhs);

    // K, computed as one quotient
    let k_num = ((a.clone() - one()) * b1.clone() * s.beta.clone()
        + (a1.clone() - c1.clone()) * (one() - a.clone())
        - (one() - a1.clone()) * (a.clone() - c.clone()))
        * (c2.clone() * s.delta.clone() * (a.clone() - one())
            + (a2.clone() - one()) * (a.clone() - b.clone())
            - (a.clone() - one()) * (a2.clone() - b2.clone()));
    let k_den = b.clone() * c.clone() * (a2.clone() - one()) * (a1.clone() - one());
    let k = eq.div(k_num, k_den, "b c (a2 - 1)(a1 - 1)")?;

    // (1 - a12) / b12 = (a2 - 1)(a1 - 1) c / ((a - 1) d2) * (1 - K)
    let lhs = eq.div(one() - a12, b12, "b12")?;
    let rhs = eq.div(
        (a2.clone() - one()) * (a1.clone() - one()) * c.clone(),
        (a.clone() - one()) * d2,
        "(a - 1)(a2 - b2 - c2)",
    )? * (one() - k.clone());
    eq.push(lhs, rhs);

    // (a2 - 1) b beta2 + (a - 1)(a1 - c1) = (a - 1) b1 beta + (a1 - 1)(a - c)
    eq.push(
        (a2.clone() - one()) * b.clone() * s2.beta.clone()
            + (a.clone() - one()) * (a1.clone() - c1.clone()),
        (a.clone() - one()) * b1.clone() * s.beta.clone() + (a1.clone() - one()) * (a.clone() - c.clone()),
    );

    // (a1 - 1) c delta1 + (a - 1)(a2 - b2) = (a - 1) c2 delta + (a2 - 1)(a - b)
    eq.push(
        (a1.clone() - one()) * c.clone() * s1.delta.clone() + (a.clone() - one()) * (a2.clone() - b2),
        (a.clone() - one()) * c2 * s.delta.clone() + (a2 - one()) * (a - b),
    );

    let mut v = eq.values.into_iter();
    let mut next = || v.next().expect("six equations");
    Ok(CompatResiduals {
        r_alpha: next(),
        r_gamma: next(),
        r_ratio: next(),
        r_a12: next(),
        r_beta: next(),
        r_delta: next(),
        k_value: k,
        scales: eq.scales.try_into().expect("six scales"),
    })
}

/// Max-abs entry of `A(m,n) B(m+1,n) - B(m,n) A(m,n+1)`.
pub fn matrix_residual<S: Scalar>(src: &impl CoefficientSource<S>, site: Site) -> Result<S> {
    Ok(matrix_residual_scaled(src, site)?.0)
}

/// The residual together with the magnitude of the products (for float comparisons).
pub fn matrix_residual_scaled<S: Scalar>(
    src: &impl CoefficientSource<S>,
    site: Site,
) -> Result<(S, f64)> {
    let here = transition_matrices(src.require(site, site)?);
    let right = transition_matrices(src.require(site, site.shift(1, 0))?);
    let up = transition_matrices(src.require(site, site.shift(0, 1))?);
    let ab = here.a.mul(&right.b);
    let ba = here.b.mul(&up.a);
    let scale = ab.max_abs().to_f64().max(ba.max_abs().to_f64());
    Ok((ab.sub(&ba).max_abs(), scale))
}

/// Sites of `rect` at which the full four-site compatibility stencil is available.
pub fn compat_sites(rect: Rect) -> impl Iterator<Item = Site> {
    let inner = rect.shrink(0, 1, 0, 1);
    inner.into_iter().flat_map(|r| r.sites().collect::<Vec<_>>())
}

/// Residual table over every site where the stencil exists.
pub fn field_residuals<S: Scalar>(
    src: &impl CoefficientSource<S>,
    rect: Rect,
) -> Result<BTreeMap<Site, (CompatResiduals<S>, S)>> {
    let mut out = BTreeMap::new();
    for site in compat_sites(rect) {
        let present = [(0, 0), (1, 0), (0, 1), (1, 1)]
            .iter()
            .all(|&(di, dj)| src.coefficients_at(site.shift(di, dj)).is_some());
        if !present {
            continue;
        }
        let scalar = scalar_residuals(src, site)?;
        let matrix = matrix_residual(src, site)?;
        out.insert(site, (scalar, matrix));
    }
    Ok(out)
}

/// The compatible constant set with the given `b, c, beta, delta`:
/// `a = b + c + bc(beta delta - 1)`, `alpha = c(1 - beta delta)`, `gamma = b(1 - beta delta)`.
pub fn constant_family<S: Scalar>(b: S, c: S, beta: S, delta: S) -> Result<CoefficientSet<S>> {
    let violated = |clause| Err(Error::AssumptionViolated { clause, site: None });
    if b.is_zero() {
        return violated(Assumption::BNonZero);
    }
    if c.is_zero() {
        return violated(Assumption::CNonZero);
    }
    let bd = beta.clone() * delta.clone();
    if bd == S::one() {
        return violated(Assumption::DNonZero);
    }
    let d = b.clone() * c.clone() * (bd.clone() - S::one());
    let a = b.clone() + c.clone() + d;
    if a == S::one() {
        return violated(Assumption::ANotOne);
    }
    let alpha = c.clone() * (S::one() - bd.clone());
    let gamma = b.clone() * (S::one() - bd);
    Ok(CoefficientSet::new(a, b, c, alpha, beta, gamma, delta))
}

/// Residuals of the three equalities `-alpha b = d`, `-gamma c = d`, `d = bc(beta delta - 1)`.
pub fn constant_residuals<S: Scalar>(s: &CoefficientSet<S>) -> [S; 3] {
    let d = s.d();
    [
        -(s.alpha.clone() * s.b.clone()) - d.clone(),
        -(s.gamma.clone() * s.c.clone()) - d.clone(),
        d - s.b.clone() * s.c.clone() * (s.beta.clone() * s.delta.clone() - S::one()),
    ]
}

pub fn is_constant_compatible<S: Scalar>(s: &CoefficientSet<S>, tol: &Tolerance) -> bool {
    let scale = s.values().iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    constant_residuals(s)
        .iter()
        .all(|r| tol.is_zero(r, scale * scale * scale))
}

/// Affine-sphere subfamily: `b = c` and `a - b - c = -1`.
pub fn is_affine_sphere<S: Scalar>(s: &CoefficientSet<S>, tol: &Tolerance) -> bool {
    tol.eq(&s.b, &s.c) && tol.eq(&s.d(), &-S::one())
}

/// Discrete Tzitzeica data `(H, A, B)` on lattice sites.
#[derive(Clone, Debug, PartialEq)]
pub struct TzitzeicaSample<S> {
    pub h: S,
    pub a: S,
    pub b: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TzitzeicaData<S> {
    rect: Rect,
    samples: BTreeMap<Site, TzitzeicaSample<S>>,
}

impl<S: Scalar> TzitzeicaData<S> {
    pub fn new(rect: Rect, samples: BTreeMap<Site, TzitzeicaSample<S>>) -> Result<Self> {
        if let Some(s) = samples.keys().find(|s| !rect.contains(**s)) {
            return Err(Error::InvalidWindow(format!("sample site {s} outside {rect}")));
        }
        Ok(TzitzeicaData { rect, samples })
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn get(&self, s: Site) -> Option<&TzitzeicaSample<S>> {
        self.samples.get(&s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Site, &TzitzeicaSample<S>)> {
        self.samples.iter()
    }

    fn require(&self, site: Site, di: i64, dj: i64) -> Result<&TzitzeicaSample<S>> {
        let needed = site.shift(di, dj);
        self.get(needed).ok_or(Error::MissingStencil { site, needed })
    }
}

/// Coefficients of the affine sphere governed by `(H, A, B)`:
/// `b = c = H`, `a = 2H - 1`, `alpha = (H1 - 1)/(H1 (H - 1))`, `beta = A/(H - 1)`,
/// `gamma = (H2 - 1)/(H2 (H - 1))`, `delta = B/(H - 1)`.
pub fn tzitzeica_to_centroaffine<S: Scalar>(
    t: &TzitzeicaData<S>,
    site: Site,
) -> Result<CoefficientSet<S>> {
    let here = t.require(site, 0, 0)?;
    let h1 = t.require(site, 1, 0)?.h.clone();
    let h2 = t.require(site, 0, 1)?.h.clone();
    let h = here.h.clone();
    if h.is_zero() {
        return Err(Error::zero_den("H", Some(site)));
    }
    let hm1 = h.clone() - S::one();
    let at = Some(site);
    let alpha = div(h1.clone() - S::one(), h1 * hm1.clone(), "H1 (H - 1)", at)?;
    let gamma = div(h2.clone() - S::one(), h2 * hm1.clone(), "H2 (H - 1)", at)?;
    let beta = div(here.a.clone(), hm1.clone(), "H - 1", at)?;
    let delta = div(here.b.clone(), hm1, "H - 1", at)?;
    let a = h.clone() + h.clone() - S::one();
    Ok(CoefficientSet::new(a, h.clone(), h, alpha, beta, gamma, delta))
}

/// Residuals `(A2 - (H1/H) A, B1 - (H2/H) B, H12 - H(H-1)/(H^2(H1+H2-H1H2) - H + A B H1 H2))`.
pub fn tzitzeica_residuals<S: Scalar>(t: &TzitzeicaData<S>, site: Site) -> Result<(S, S, S)> {
    let here = t.require(site, 0, 0)?;
    let s1 = t.require(site, 1, 0)?;
    let s2 = t.require(site, 0, 1)?;
    let s12 = t.require(site, 1, 1)?;
    let at = Some(site);
    let (h, h1, h2) = (here.h.clone(), s1.h.clone(), s2.h.clone());
    let r_a = s2.a.clone() - div(h1.clone(), h.clone(), "H", at)? * here.a.clone();
    let r_b = s1.b.clone() - div(h2.clone(), h.clone(), "H", at)? * here.b.clone();
    let den = h.square() * (h1.clone() + h2.clone() - h1.clone() * h2.clone()) - h.clone()
        + here.a.clone() * here.b.clone() * h1 * h2;
    let h12 = div(h.clone() * (h - S::one()), den, "H^2(H1+H2-H1H2) - H + A B H1 H2", at)?;
    let r_h = s12.h.clone() - h12;
    Ok((r_a, r_b, r_h))
}
