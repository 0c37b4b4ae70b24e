//! Lattice sites, index rectangles and dense point windows over Z^2.
//!
//! Shifts follow the usual subscript convention: subscript 1 is `+1` in the
//! first index, subscript 2 is `+1` in the second index, and an overbar is `-1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{det3, det3_scale, Point3};
use crate::scalar::{Scalar, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub i: i64,
    pub j: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { i: 0, j: 0 };

    pub const fn new(i: i64, j: i64) -> Self {
        Site { i, j }
    }

    pub const fn shift(self, di: i64, dj: i64) -> Self {
        Site {
            i: self.i + di,
            j: self.j + dj,
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Inclusive index rectangle `[imin, imax] x [jmin, jmax]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    pub imin: i64,
    pub imax: i64,
    pub jmin: i64,
    pub jmax: i64,
}

impl Rect {
    pub fn new(imin: i64, imax: i64, jmin: i64, jmax: i64) -> Result<Self> {
        if imax < imin || jmax < jmin {
            return Err(Error::InvalidWindow(format!(
                "empty rectangle [{imin},{imax}]x[{jmin},{jmax}]"
            )));
        }
        Ok(Rect {
            imin,
            imax,
            jmin,
            jmax,
        })
    }

    pub fn contains(&self, s: Site) -> bool {
        (self.imin..=self.imax).contains(&s.i) && (self.jmin..=self.jmax).contains(&s.j)
    }

    /// Number of distinct first indices.
    pub fn rows(&self) -> usize {
        (self.imax - self.imin + 1) as usize
    }

    /// Number of distinct second indices.
    pub fn cols(&self) -> usize {
        (self.jmax - self.jmin + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major position of `s` (first index outer).
    pub fn offset(&self, s: Site) -> Option<usize> {
        self.contains(s)
            .then(|| ((s.i - self.imin) as usize) * self.cols() + (s.j - self.jmin) as usize)
    }

    /// All sites in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (self.imin..=self.imax).flat_map(move |i| (self.jmin..=self.jmax).map(move |j| Site::new(i, j)))
    }

    /// Shrinks by the given margins; `None` if nothing is left.
    pub fn shrink(&self, lo_i: i64, hi_i: i64, lo_j: i64, hi_j: i64) -> Option<Rect> {
        Rect::new(self.imin + lo_i, self.imax - hi_i, self.jmin + lo_j, self.jmax - hi_j).ok()
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.imin, self.imax, self.jmin, self.jmax)
    }
}

/// A finite rectangular patch of a lattice surface, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeWindow<S> {
    rect: Rect,
    points: Vec<Point3<S>>,
}

impl<S: Scalar> LatticeWindow<S> {
    fn check_rect(rect: &Rect) -> Result<()> {
        if rect.imax < rect.imin + 1 || rect.jmax < rect.jmin + 1 {
            return Err(Error::InvalidWindow(format!(
                "{rect} must contain at least one cell"
            )));
        }
        Ok(())
    }

    pub fn from_fn(rect: Rect, mut f: impl FnMut(Site) -> Point3<S>) -> Result<Self> {
        Self::check_rect(&rect)?;
        let points = rect.sites().map(&mut f).collect();
        Ok(LatticeWindow { rect, points })
    }

    /// Builds a window from explicit `(site, point)` pairs; every site of the
    /// rectangle must be given exactly once.
    pub fn from_points(rect: Rect, entries: impl IntoIterator<Item = (Site, Point3<S>)>) -> Result<Self> {
        Self::check_rect(&rect)?;
        let mut slots: Vec<Option<Point3<S>>> = vec![None; rect.len()];
        for (site, p) in entries {
            let k = rect
                .offset(site)
                .ok_or_else(|| Error::InvalidWindow(format!("point {site} outside {rect}")))?;
            if !p.coords().iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite(format!("point {site}")));
            }
            if slots[k].replace(p).is_some() {
                return Err(Error::InvalidWindow(format!("duplicate point {site}")));
            }
        }
        let mut points = Vec::with_capacity(slots.len());
        for (site, slot) in rect.sites().zip(slots) {
            points.push(slot.ok_or_else(|| Error::InvalidWindow(format!("missing point {site}")))?);
        }
        Ok(LatticeWindow { rect, points })
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn get(&self, s: Site) -> Option<&Point3<S>> {
        self.rect.offset(s).map(|k| &self.points[k])
    }

    /// Point at `site + (di, dj)`, or `MissingStencil` naming `site`.
    pub fn at(&self, site: Site, di: i64, dj: i64) -> Result<&Point3<S>> {
        let needed = site.shift(di, dj);
        self.get(needed)
            .ok_or(Error::MissingStencil { site, needed })
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, &Point3<S>)> {
        self.rect.sites().zip(self.points.iter())
    }

    pub fn points(&self) -> &[Point3<S>] {
        &self.points
    }

    pub fn map_points(&self, f: impl Fn(&Point3<S>) -> Point3<S>) -> Self {
        LatticeWindow {
            rect: self.rect,
            points: self.points.iter().map(f).collect(),
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LatticeWindow<T> {
        LatticeWindow {
            rect: self.rect,
            points: self.points.iter().map(|p| p.convert(&f)).collect(),
        }
    }

    /// Sub-window over `rect` (must be inside this window).
    pub fn restrict(&self, rect: Rect) -> Result<Self> {
        if !self.rect.contains(Site::new(rect.imin, rect.jmin))
            || !self.rect.contains(Site::new(rect.imax, rect.jmax))
        {
            return Err(Error::InvalidWindow(format!("{rect} not inside {}", self.rect)));
        }
        LatticeWindow::from_fn(rect, |s| self.get(s).cloned().expect("inside"))
    }
}

/// Which condition of the surface definition a site violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    /// (a): `r`, its four axis neighbours are not coplanar.
    NotCoplanar,
    /// (b): the plane through `r` and its neighbours passes through the origin.
    PlaneThroughOrigin,
    /// (c): `r` and two adjacent axis neighbours are collinear.
    Collinear,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::NotCoplanar => "condition (a): star not coplanar",
            Violation::PlaneThroughOrigin => "condition (b): tangent plane contains the origin",
            Violation::Collinear => "condition (c): adjacent triple collinear",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiteViolation<S> {
    pub site: Site,
    pub kind: Violation,
    /// Human-readable name of the offending determinant.
    pub determinant: &'static str,
    pub value: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport<S> {
    /// Sites where all five star points exist and were checked.
    pub checked: Vec<Site>,
    pub violations: Vec<SiteViolation<S>>,
}

impl<S: Scalar> ValidationReport<S> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn site_ok(&self, s: Site) -> bool {
        self.checked.contains(&s) && !self.violations.iter().any(|v| v.site == s)
    }
}

fn collinear<S: Scalar>(p: &Point3<S>, q: &Point3<S>, r: &Point3<S>, tol: &Tolerance) -> bool {
    let u = q - p;
    let v = r - p;
    let cross = [
        u.y.clone() * v.z.clone() - u.z.clone() * v.y.clone(),
        u.z.clone() * v.x.clone() - u.x.clone() * v.z.clone(),
        u.x.clone() * v.y.clone() - u.y.clone() * v.x.clone(),
    ];
    let scale = u.norm_inf().to_f64() * v.norm_inf().to_f64();
    cross.iter().all(|c| tol.is_zero(c, scale))
}

/// Checks the surface conditions at every site whose four axis neighbours lie in the window.
pub fn validate_window<S: Scalar>(w: &LatticeWindow<S>, tol: &Tolerance) -> ValidationReport<S> {
    let mut report = ValidationReport {
        checked: Vec::new(),
        violations: Vec::new(),
    };
    let Some(inner) = w.rect().shrink(1, 1, 1, 1) else {
        return report;
    };
    for site in inner.sites() {
        let g = |di, dj| w.get(site.shift(di, dj)).expect("interior stencil");
        let (r, r1, r2, r1b, r2b) = (g(0, 0), g(1, 0), g(0, 1), g(-1, 0), g(0, -1));
        report.checked.push(site);
        let mut push = |kind, determinant, value| {
            report.violations.push(SiteViolation {
                site,
                kind,
                determinant,
                value,
            })
        };

        let e1 = r1 - r;
        let e2 = r2 - r;
        for (name, other) in [
            ("det[r1-r, r2-r, r-r1bar]", r - r1b),
            ("det[r1-r, r2-r, r-r2bar]", r - r2b),
        ] {
            let v = det3(&e1, &e2, &other);
            if !tol.is_zero(&v, det3_scale(&e1, &e2, &other)) {
                push(Violation::NotCoplanar, name, v);
            }
        }

        for (name, a, b) in [
            ("det[r1, r2, r]", r1, r2),
            ("det[r1bar, r2bar, r]", r1b, r2b),
            ("det[r1, r2bar, r]", r1, r2b),
            ("det[r1bar, r2, r]", r1b, r2),
        ] {
            let v = det3(a, b, r);
            if tol.is_zero(&v, det3_scale(a, b, r)) {
                let kind = if collinear(r, a, b, tol) {
                    Violation::Collinear
                } else {
                    Violation::PlaneThroughOrigin
                };
                push(kind, name, v);
            }
        }
    }
    report
}
