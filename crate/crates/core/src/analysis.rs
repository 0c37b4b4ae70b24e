//! Laplacian, harmonicity, local convexity and star volumes.

use std::cmp::Ordering;
use std::fmt;

use crate::compat::constant_residuals;
use crate::error::{Error, Result};
use crate::geometry::{det3, det3_scale, Point3};
use crate::invariants::{extract_abc, extract_field, CoefficientSet, CoefficientSource};
use crate::lattice::{LatticeWindow, Site};
use crate::scalar::{div, Scalar, Tolerance};
use crate::synthesis::{synthesize, CoefficientInput, Frame};

/// The six neighbours of the combinatorial Laplacian, as offsets.
pub const LAPLACIAN_RING: [(i64, i64); 6] = [(-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0)];

/// `6 r - r(i-1,j) - r(i-1,j+1) - r(i,j-1) - r(i,j+1) - r(i+1,j-1) - r(i+1,j)`.
pub fn laplacian<S: Scalar>(w: &LatticeWindow<S>, site: Site) -> Result<Point3<S>> {
    let r = w.at(site, 0, 0)?;
    let mut acc = r.scale(&S::from_i64(6));
    for (di, dj) in LAPLACIAN_RING {
        acc = &acc - w.at(site, di, dj)?;
    }
    Ok(acc)
}

fn stencil_scale<S: Scalar>(w: &LatticeWindow<S>, site: Site) -> f64 {
    let mut m = 0.0_f64;
    for (di, dj) in LAPLACIAN_RING.iter().chain(&[(0, 0)]) {
        if let Some(p) = w.get(site.shift(*di, *dj)) {
            m = m.max(p.norm_inf().to_f64());
        }
    }
    6.0 * m
}

fn is_zero_vec<S: Scalar>(v: &Point3<S>, scale: f64, tol: &Tolerance) -> bool {
    v.coords().iter().all(|c| tol.is_zero(*c, scale))
}

/// `Some(s)` when `lap = s r` componentwise.
pub fn proportionality<S: Scalar>(lap: &Point3<S>, r: &Point3<S>, tol: &Tolerance) -> Option<S> {
    let k = (0..3).max_by(|&x, &y| {
        r.coord(x)
            .abs()
            .partial_cmp(&r.coord(y).abs())
            .unwrap_or(Ordering::Equal)
    })?;
    if r.coord(k).is_zero() {
        return None;
    }
    let s = lap.coord(k).clone() / r.coord(k).clone();
    let scale = lap.norm_inf().to_f64() + s.to_f64().abs() * r.norm_inf().to_f64();
    let residual = lap - &r.scale(&s);
    is_zero_vec(&residual, scale, tol).then_some(s)
}

fn interior<S: Scalar>(w: &LatticeWindow<S>) -> Result<Vec<Site>> {
    let inner = w
        .rect()
        .shrink(1, 1, 1, 1)
        .ok_or_else(|| Error::InvalidWindow(format!("{} has no interior site", w.rect())))?;
    Ok(inner.sites().collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicCheck<S> {
    pub harmonic: bool,
    /// Largest `|Δr|` component over the interior.
    pub max_residual: S,
}

/// `Δr = 0` at every interior site.
pub fn harmonic_check<S: Scalar>(w: &LatticeWindow<S>, tol: &Tolerance) -> Result<HarmonicCheck<S>> {
    let mut harmonic = true;
    let mut max_residual = S::zero();
    for site in interior(w)? {
        let lap = laplacian(w, site)?;
        harmonic &= is_zero_vec(&lap, stencil_scale(w, site), tol);
        let n = lap.norm_inf();
        if n > max_residual {
            max_residual = n;
        }
    }
    Ok(HarmonicCheck {
        harmonic,
        max_residual,
    })
}

/// The common `s` with `Δr = s r` at every interior site, if there is one.
pub fn eigen_scalar<S: Scalar>(w: &LatticeWindow<S>, tol: &Tolerance) -> Result<Option<S>> {
    let mut common: Option<S> = None;
    for site in interior(w)? {
        let lap = laplacian(w, site)?;
        let Some(s) = proportionality(&lap, w.at(site, 0, 0)?, tol) else {
            return Ok(None);
        };
        match &common {
            None => common = Some(s),
            Some(c) if tol.eq(c, &s) => {}
            Some(_) => return Ok(None),
        }
    }
    Ok(common)
}

/// Residuals (LHS - RHS) of the three constant-coefficient harmonicity equations.
pub fn harmonic_constant_residuals<S: Scalar>(s: &CoefficientSet<S>) -> Result<[S; 3]> {
    let one = S::one;
    let inv = |x: &S, what| div(one(), x.clone(), what, None);
    let (al, be, ga, de) = (&s.alpha, &s.beta, &s.gamma, &s.delta);
    let b_over_c = div(s.b.clone(), s.c.clone(), "c", None)?;
    let c_over_b = div(s.c.clone(), s.b.clone(), "b", None)?;
    let inv_a = inv(al, "alpha")?;
    let inv_g = inv(ga, "gamma")?;

    let first = (one() + al.clone() - be.clone()) * (inv_a.clone() + b_over_c.clone())
        + (one() + ga.clone() - de.clone()) * (inv_g.clone() + c_over_b.clone())
        - c_over_b
        - b_over_c
        - S::from_i64(6);
    let second = de.clone() * inv_g.clone() * (one() + al.clone())
        - (inv_a.clone() * (one() + ga.clone()) - inv(&s.b, "b")? - one());
    let third = be.clone() * inv_a * (one() + ga.clone())
        - (inv_g * (one() + al.clone()) - inv(&s.c, "c")? - one());
    Ok([first, second, third])
}

/// Harmonicity of a constant-coefficient surface from its coefficients alone.
///
/// For compatible sets the answer is cross-checked against the Laplacian of the
/// canonical seven-point stencil; a disagreement is an error.
pub fn harmonic_constant_check<S: Scalar>(s: &CoefficientSet<S>, tol: &Tolerance) -> Result<bool> {
    let res = harmonic_constant_residuals(s)?;
    let scale = s.values().iter().map(|v| v.to_f64().abs()).fold(1.0, f64::max);
    let by_formula = res.iter().all(|r| tol.is_zero(r, scale * scale));

    let compatible = s.assumption_violations(tol).is_empty()
        && constant_residuals(s)
            .iter()
            .all(|r| tol.is_zero(r, scale.powi(3)));
    if compatible {
        let rect = crate::lattice::Rect::new(-1, 1, -1, 1)?;
        let w = synthesize(
            &CoefficientInput::Constant(s.clone()),
            rect,
            &Frame::canonical(),
            tol,
        )?;
        let lap = laplacian(&w, Site::ORIGIN)?;
        let by_stencil = is_zero_vec(&lap, stencil_scale(&w, Site::ORIGIN), tol);
        if by_stencil != by_formula {
            return Err(Error::CrossCheck(format!(
                "harmonicity formulas give {by_formula}, canonical stencil gives {by_stencil} (Δr(0,0) = {:?})",
                lap.to_f64()
            )));
        }
    }
    Ok(by_formula)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Convexity {
    ConvexStrict,
    ConvexDegenerate,
    NonConvex,
    UndecidableBoundary,
}

impl Convexity {
    pub fn as_str(self) -> &'static str {
        match self {
            Convexity::ConvexStrict => "convex_strict",
            Convexity::ConvexDegenerate => "convex_degenerate",
            Convexity::NonConvex => "non_convex",
            Convexity::UndecidableBoundary => "undecidable_boundary",
        }
    }

    pub fn is_convex(self) -> bool {
        matches!(self, Convexity::ConvexStrict | Convexity::ConvexDegenerate)
    }
}

impl fmt::Display for Convexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Second-ring points tested for convexity, in report order.
pub const CONVEXITY_RING: [(&str, i64, i64); 8] = [
    ("r1bar1bar", -2, 0),
    ("r1bar2bar", -1, -1),
    ("r2bar2bar", 0, -2),
    ("r12bar", 1, -1),
    ("r1bar2", -1, 1),
    ("r11", 2, 0),
    ("r12", 1, 1),
    ("r22", 0, 2),
];

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityResult<S> {
    pub class: Convexity,
    /// `det[r1 - r, r2 - r, X - r]` for `X` in [`CONVEXITY_RING`] order; `None` on the boundary.
    pub determinants: Option<[S; 8]>,
}

/// Classifies the site by the signs of the eight second-ring determinants,
/// measured against the sign of the `r12` determinant.
pub fn convexity_at<S: Scalar>(w: &LatticeWindow<S>, site: Site, tol: &Tolerance) -> ConvexityResult<S> {
    let undecidable = ConvexityResult {
        class: Convexity::UndecidableBoundary,
        determinants: None,
    };
    let (Some(r), Some(r1), Some(r2)) = (w.get(site), w.get(site.shift(1, 0)), w.get(site.shift(0, 1))) else {
        return undecidable;
    };
    let e1 = r1 - r;
    let e2 = r2 - r;
    let mut dets = Vec::with_capacity(8);
    let mut signs = Vec::with_capacity(8);
    for (_, di, dj) in CONVEXITY_RING {
        let Some(x) = w.get(site.shift(di, dj)) else {
            return undecidable;
        };
        let v = x - r;
        let d = det3(&e1, &e2, &v);
        signs.push(tol.sign(&d, det3_scale(&e1, &e2, &v)));
        dets.push(d);
    }
    let reference = match signs[6] {
        Ordering::Equal => signs.iter().copied().find(|s| *s != Ordering::Equal),
        s => Some(s),
    };
    let class = match reference {
        None => Convexity::NonConvex,
        Some(refs) => {
            if signs.iter().any(|s| *s == refs.reverse()) {
                Convexity::NonConvex
            } else if signs.iter().all(|s| *s == refs) {
                Convexity::ConvexStrict
            } else {
                Convexity::ConvexDegenerate
            }
        }
    };
    ConvexityResult {
        class,
        determinants: Some(dets.try_into().expect("eight determinants")),
    }
}

/// The eight coefficient inequalities for convexity at `site`:
/// `delta >= 0`, `beta >= 0`, `c_1bar (a_1bar - 1)(a - 1) < 0`, `b_2bar (a_2bar - 1)(a - 1) < 0`,
/// `delta_2bar2bar / gamma_2bar2bar >= 0`, `beta_1bar1bar / alpha_1bar1bar >= 0`,
/// `gamma_1bar2bar < 0`, `alpha_1bar2bar < 0`.
pub fn convexity_conditions<S: Scalar>(
    f: &impl CoefficientSource<S>,
    site: Site,
    tol: &Tolerance,
) -> Result<[bool; 8]> {
    let here = f.require(site, site)?;
    let s1b = f.require(site, site.shift(-1, 0))?;
    let s2b = f.require(site, site.shift(0, -1))?;
    let s11 = f.require(site, site.shift(-2, 0))?;
    let s22 = f.require(site, site.shift(0, -2))?;
    let s12 = f.require(site, site.shift(-1, -1))?;
    let at = Some(site);
    let one = S::one;
    let sign = |x: &S, scale: f64| tol.sign(x, scale);
    let mag = |xs: &[&S]| xs.iter().map(|x| x.to_f64().abs()).fold(1.0, |a, b| a * (1.0 + b));

    let nonneg = |x: &S| sign(x, 0.0) != Ordering::Less;
    let neg = |x: &S, scale: f64| sign(x, scale) == Ordering::Less;

    let am1 = here.a.clone() - one();
    let p3 = s1b.c.clone() * (s1b.a.clone() - one()) * am1.clone();
    let p4 = s2b.b.clone() * (s2b.a.clone() - one()) * am1;
    let q5 = div(s22.delta.clone(), s22.gamma.clone(), "gamma_2bar2bar", at)?;
    let q6 = div(s11.beta.clone(), s11.alpha.clone(), "alpha_1bar1bar", at)?;
    Ok([
        nonneg(&here.delta),
        nonneg(&here.beta),
        neg(&p3, mag(&[&s1b.c, &s1b.a, &here.a])),
        neg(&p4, mag(&[&s2b.b, &s2b.a, &here.a])),
        nonneg(&q5),
        nonneg(&q6),
        neg(&s12.gamma, 0.0),
        neg(&s12.alpha, 0.0),
    ])
}

pub fn convexity_from_coefficients<S: Scalar>(
    f: &impl CoefficientSource<S>,
    site: Site,
    tol: &Tolerance,
) -> Result<bool> {
    Ok(convexity_conditions(f, site, tol)?.iter().all(|&c| c))
}

/// Convexity everywhere for constant coefficients: `alpha = c < 0`, `gamma = b < 0`,
/// `beta = delta = 0`, `a = b + c - bc`.
pub fn constant_convex_check<S: Scalar>(s: &CoefficientSet<S>, tol: &Tolerance) -> bool {
    let lt0 = |x: &S| tol.sign(x, 0.0) == Ordering::Less;
    tol.eq(&s.alpha, &s.c)
        && lt0(&s.c)
        && tol.eq(&s.gamma, &s.b)
        && lt0(&s.b)
        && tol.is_zero(&s.beta, 0.0)
        && tol.is_zero(&s.delta, 0.0)
        && tol.eq(&s.a, &(s.b.clone() + s.c.clone() - s.b.clone() * s.c.clone()))
}

/// Cone volumes of the six triangles around a vertex, summed.
#[derive(Clone, Debug, PartialEq)]
pub struct StarVolumes<S> {
    pub star_volume: S,
    pub star_volume_direct: S,
    pub tangent_star_volume: S,
    pub tangent_star_volume_direct: S,
}

fn cone<S: Scalar>(p: &Point3<S>, q: &Point3<S>, r: &Point3<S>) -> S {
    det3(p, q, r) / S::from_i64(6)
}

/// Star and tangent-star volumes at `site`, each by closed form and by direct summation.
pub fn star_volumes<S: Scalar>(w: &LatticeWindow<S>, site: Site, tol: &Tolerance) -> Result<StarVolumes<S>> {
    let g = |di, dj| w.at(site, di, dj);
    let (r, r1, r2) = (g(0, 0)?, g(1, 0)?, g(0, 1)?);
    let (r1b, r2b) = (g(-1, 0)?, g(0, -1)?);
    let (r1b2, r12b, r1b2b) = (g(-1, 1)?, g(1, -1)?, g(-1, -1)?);

    let vol = |s: Site| crate::invariants::triangle_volume(w, s);
    let (sw, s1b, s2b) = (site.shift(-1, -1), site.shift(-1, 0), site.shift(0, -1));
    let d_of = |s: Site| -> Result<S> {
        let (a, b, c) = extract_abc(w, s)?;
        Ok(a - b - c)
    };
    let (_, _, c1b) = extract_abc(w, s1b)?;
    let (_, b2b, _) = extract_abc(w, s2b)?;
    let (v_sw, v_1b, v_2b, v_0) = (vol(sw)?, vol(s1b)?, vol(s2b)?, vol(site)?);
    let (d_sw, d_1b, d_2b) = (d_of(sw)?, d_of(s1b)?, d_of(s2b)?);

    let star = -(d_sw.clone() * v_sw.clone())
        + (S::one() - d_1b) * v_1b.clone()
        + (S::one() - d_2b) * v_2b.clone()
        + v_0.clone();
    let tangent = -(d_sw * v_sw) + c1b * v_1b + b2b * v_2b + v_0;

    let star_direct = cone(r, r1, r2)
        + cone(r2b, r, r1b)
        + cone(r1b, r, r1b2)
        + cone(r, r2, r1b2)
        + cone(r2b, r12b, r)
        + cone(r12b, r1, r);
    let tangent_direct = cone(r2b, r, r1b) + cone(r1b, r, r2) + cone(r, r1, r2) + cone(r2b, r1, r);

    let scale = [r, r1, r2, r1b, r2b, r1b2, r12b, r1b2b]
        .iter()
        .map(|p| p.norm_inf().to_f64())
        .fold(0.0, f64::max)
        .powi(3);
    for (name, closed, direct) in [("star", &star, &star_direct), ("tangent star", &tangent, &tangent_direct)] {
        if !tol.is_zero(&(closed.clone() - direct.clone()), scale) {
            return Err(Error::CrossCheck(format!(
                "{name} volume at {site}: closed form {} != direct sum {}",
                closed.to_decimal(12),
                direct.to_decimal(12)
            )));
        }
    }
    Ok(StarVolumes {
        star_volume: star,
        star_volume_direct: star_direct,
        tangent_star_volume: tangent,
        tangent_star_volume_direct: tangent_direct,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiteAnalysis<S> {
    pub site: Site,
    pub laplacian: Point3<S>,
    pub harmonic_residual: S,
    pub eigen_s: Option<S>,
    pub convexity: Convexity,
    pub star_volume: S,
    pub tangent_star_volume: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisSummary<S> {
    pub harmonic: bool,
    pub eigen_s: Option<S>,
    pub convex_everywhere: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport<S> {
    pub sites: Vec<SiteAnalysis<S>>,
    pub summary: AnalysisSummary<S>,
    /// Disagreements between the coefficient and determinant convexity tests.
    pub diagnostics: Vec<String>,
}

/// Per-site analysis over every site with a full one-ring, plus the window summary.
pub fn analyze<S: Scalar>(w: &LatticeWindow<S>, tol: &Tolerance) -> Result<AnalysisReport<S>> {
    let field = extract_field(w, tol).ok().map(|e| e.field);
    let mut sites = Vec::new();
    let mut diagnostics = Vec::new();
    for site in interior(w)? {
        let lap = laplacian(w, site)?;
        let vols = star_volumes(w, site, tol)?;
        let conv = convexity_at(w, site, tol);
        if let (Some(f), true) = (&field, conv.class != Convexity::UndecidableBoundary) {
            match convexity_conditions(f, site, tol) {
                Ok(conds) => {
                    let by_coeffs = conds.iter().all(|&c| c);
                    if by_coeffs != conv.class.is_convex() {
                        diagnostics.push(format!(
                            "convexity at {site}: determinants give {}, coefficient conditions give {by_coeffs} ({conds:?})",
                            conv.class
                        ));
                    }
                }
                Err(Error::MissingStencil { .. }) => {}
                Err(e) => diagnostics.push(format!("convexity conditions at {site}: {e}")),
            }
        }
        sites.push(SiteAnalysis {
            site,
            harmonic_residual: lap.norm_inf(),
            eigen_s: proportionality(&lap, w.at(site, 0, 0)?, tol),
            laplacian: lap,
            convexity: conv.class,
            star_volume: vols.star_volume,
            tangent_star_volume: vols.tangent_star_volume,
        });
    }
    let harmonic = harmonic_check(w, tol)?.harmonic;
    let eigen_s = eigen_scalar(w, tol)?;
    let decidable: Vec<_> = sites
        .iter()
        .filter(|s| s.convexity != Convexity::UndecidableBoundary)
        .collect();
    let convex_everywhere = !decidable.is_empty() && decidable.iter().all(|s| s.convexity.is_convex());
    Ok(AnalysisReport {
        sites,
        summary: AnalysisSummary {
            harmonic,
            eigen_s,
            convex_everywhere,
        },
        diagnostics,
    })
}
