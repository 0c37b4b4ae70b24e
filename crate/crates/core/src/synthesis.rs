//! Frame transport and lattice synthesis from coefficient data.
//!
//! The frame `F(m,n) = [r(m,n), r(m+1,n), r(m,n+1)]` moves by right
//! multiplication: `F(m+1,n) = F(m,n) A(m,n)` and `F(m,n+1) = F(m,n) B(m,n)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::compat::{constant_residuals, scalar_residuals};
use crate::error::{Error, Result};
use crate::geometry::{det3, Mat3, Point3};
use crate::invariants::{CoefficientField, CoefficientSet, CoefficientSource};
use crate::lattice::{LatticeWindow, Rect, Site};
use crate::scalar::{Scalar, Tolerance};

/// The transition matrices `A`, `B` at one site.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionPair<S> {
    pub a: Mat3<S>,
    pub b: Mat3<S>,
}

/// ```text
///     | 0  beta d - alpha             d |        | 0  d  delta d - gamma           |
/// A = | 1  1 + alpha + b beta - beta  b |    B = | 0  b  b delta                   |
///     | 0  c beta                     c |        | 1  c  1 + gamma + c delta - delta |
/// ```
pub fn transition_matrices<S: Scalar>(s: &CoefficientSet<S>) -> TransitionPair<S> {
    let d = s.d();
    let (z, o) = (S::zero(), S::one());
    let a = Mat3::new([
        [z.clone(), s.beta.clone() * d.clone() - s.alpha.clone(), d.clone()],
        [
            o.clone(),
            o.clone() + s.alpha.clone() + s.b.clone() * s.beta.clone() - s.beta.clone(),
            s.b.clone(),
        ],
        [z.clone(), s.c.clone() * s.beta.clone(), s.c.clone()],
    ]);
    let b = Mat3::new([
        [z.clone(), d.clone(), s.delta.clone() * d - s.gamma.clone()],
        [z.clone(), s.b.clone(), s.b.clone() * s.delta.clone()],
        [
            o.clone(),
            s.c.clone(),
            o + s.gamma.clone() + s.c.clone() * s.delta.clone() - s.delta.clone(),
        ],
    ]);
    TransitionPair { a, b }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    PlusE1,
    MinusE1,
    PlusE2,
    MinusE2,
}

impl Step {
    pub fn offset(self) -> (i64, i64) {
        match self {
            Step::PlusE1 => (1, 0),
            Step::MinusE1 => (-1, 0),
            Step::PlusE2 => (0, 1),
            Step::MinusE2 => (0, -1),
        }
    }
}

/// `[r(m,n), r(m+1,n), r(m,n+1)]` anchored at `(m,n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<S> {
    pub columns: [Point3<S>; 3],
    pub anchor: Site,
}

impl<S: Scalar> Frame<S> {
    pub fn new(columns: [Point3<S>; 3], anchor: Site) -> Result<Self> {
        let f = Frame { columns, anchor };
        if f.det().is_zero() {
            return Err(Error::DegenerateFrame(anchor));
        }
        Ok(f)
    }

    /// `r(0,0) = e1, r(1,0) = e2, r(0,1) = e3`.
    pub fn canonical() -> Self {
        Frame {
            columns: [Point3::basis(0), Point3::basis(1), Point3::basis(2)],
            anchor: Site::ORIGIN,
        }
    }

    pub fn det(&self) -> S {
        det3(&self.columns[0], &self.columns[1], &self.columns[2])
    }

    pub fn matrix(&self) -> Mat3<S> {
        Mat3::from_columns([&self.columns[0], &self.columns[1], &self.columns[2]])
    }

    fn from_matrix(m: &Mat3<S>, anchor: Site) -> Self {
        Frame {
            columns: [m.column(0), m.column(1), m.column(2)],
            anchor,
        }
    }

    /// The three points with their lattice sites.
    pub fn sites(&self) -> [(Site, &Point3<S>); 3] {
        [
            (self.anchor, &self.columns[0]),
            (self.anchor.shift(1, 0), &self.columns[1]),
            (self.anchor.shift(0, 1), &self.columns[2]),
        ]
    }

    /// Applies the linear map `p` to every column.
    pub fn transform(&self, p: &Mat3<S>) -> Self {
        Frame {
            columns: self.columns.clone().map(|c| p.mul_point(&c)),
            anchor: self.anchor,
        }
    }
}

/// One step of frame transport. Forward steps use the matrix at the current
/// anchor, backward steps the inverse of the matrix at the target anchor.
pub fn propagate_frame<S: Scalar>(
    f: &Frame<S>,
    step: Step,
    src: &impl CoefficientSource<S>,
) -> Result<Frame<S>> {
    let (di, dj) = step.offset();
    let target = f.anchor.shift(di, dj);
    let (which, at) = match step {
        Step::PlusE1 => ('A', f.anchor),
        Step::PlusE2 => ('B', f.anchor),
        Step::MinusE1 => ('A', target),
        Step::MinusE2 => ('B', target),
    };
    let pair = transition_matrices(src.require(f.anchor, at)?);
    let m = if which == 'A' { pair.a } else { pair.b };
    let singular = || Error::SingularTransition { which, site: at };
    if m.det().is_zero() {
        return Err(singular());
    }
    let m = match step {
        Step::PlusE1 | Step::PlusE2 => m,
        Step::MinusE1 | Step::MinusE2 => m.inverse().ok_or_else(singular)?,
    };
    Ok(Frame::from_matrix(&f.matrix().mul(&m), target))
}

/// Transports `f` along a sequence of unit steps.
pub fn propagate_path<S: Scalar>(
    f: &Frame<S>,
    steps: &[Step],
    src: &impl CoefficientSource<S>,
) -> Result<Frame<S>> {
    steps
        .iter()
        .try_fold(f.clone(), |acc, &s| propagate_frame(&acc, s, src))
}

/// Coefficient input for synthesis: one set everywhere, or a field.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientInput<S> {
    Constant(CoefficientSet<S>),
    Field(CoefficientField<S>),
}

impl<S: Scalar> CoefficientSource<S> for CoefficientInput<S> {
    fn coefficients_at(&self, site: Site) -> Option<&CoefficientSet<S>> {
        match self {
            CoefficientInput::Constant(s) => Some(s),
            CoefficientInput::Field(f) => f.coefficients_at(site),
        }
    }
}

fn describe<S: Scalar>(names: &[&str], values: &[S]) -> String {
    names
        .iter()
        .zip(values)
        .map(|(n, v)| format!("{n}={}", v.to_decimal(12)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn precheck<S: Scalar>(input: &CoefficientInput<S>, tol: &Tolerance) -> Result<()> {
    match input {
        CoefficientInput::Constant(s) => {
            s.check_assumptions(None, tol)?;
            let scale = s.values().iter().map(|v| v.to_f64().abs()).fold(1.0, f64::max);
            let res = constant_residuals(s);
            let bad: Vec<usize> = (0..3)
                .filter(|&k| !tol.is_zero(&res[k], scale.powi(3)))
                .collect();
            if !bad.is_empty() {
                let names = ["-alpha b - d", "-gamma c - d", "d - bc(beta delta - 1)"];
                let picked: Vec<&str> = bad.iter().map(|&k| names[k]).collect();
                let vals: Vec<S> = bad.iter().map(|&k| res[k].clone()).collect();
                return Err(Error::IncompatibleField {
                    site: Site::ORIGIN,
                    detail: describe(&picked, &vals),
                });
            }
            Ok(())
        }
        CoefficientInput::Field(f) => {
            for (site, set) in f.iter() {
                set.check_assumptions(Some(*site), tol)?;
            }
            for (site, _) in f.iter() {
                let stencil = [(1, 0), (0, 1), (1, 1)]
                    .iter()
                    .all(|&(di, dj)| f.get(site.shift(di, dj)).is_some());
                if !stencil {
                    continue;
                }
                let r = scalar_residuals(f, *site)?;
                let failing = r.failing(tol);
                if !failing.is_empty() {
                    let vals: Vec<S> = r
                        .residuals()
                        .iter()
                        .zip(crate::compat::CompatResiduals::<S>::NAMES)
                        .filter(|(_, n)| failing.contains(n))
                        .map(|(v, _)| (*v).clone())
                        .collect();
                    return Err(Error::IncompatibleField {
                        site: *site,
                        detail: describe(&failing, &vals),
                    });
                }
            }
            Ok(())
        }
    }
}

struct Store<'a, S> {
    points: BTreeMap<Site, Point3<S>>,
    tol: &'a Tolerance,
}

impl<S: Scalar> Store<'_, S> {
    fn record(&mut self, f: &Frame<S>) -> Result<()> {
        for (site, p) in f.sites() {
            match self.points.get(&site) {
                None => {
                    self.points.insert(site, p.clone());
                }
                Some(old) => {
                    let same = if S::EXACT { old == p } else { old.approx_eq(p, self.tol) };
                    if !same {
                        return Err(Error::IncompatibleField {
                            site,
                            detail: format!(
                                "frame overlap mismatch at anchor {}: stored {:?}, transported {:?}",
                                f.anchor,
                                old.to_f64(),
                                p.to_f64()
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Generates every point of `rect` from `initial`.
///
/// The row through the initial anchor is marched first (`+e1` then `-e1`), then
/// every column of that row in `+e2` and `-e2`. Each point is stored once and
/// all later frame columns are compared against it.
pub fn synthesize<S: Scalar>(
    input: &CoefficientInput<S>,
    rect: Rect,
    initial: &Frame<S>,
    tol: &Tolerance,
) -> Result<LatticeWindow<S>> {
    let o = initial.anchor;
    for s in [o, o.shift(1, 0), o.shift(0, 1)] {
        if !rect.contains(s) {
            return Err(Error::InvalidWindow(format!(
                "{rect} must contain {s} of the initial frame"
            )));
        }
    }
    if initial.det().is_zero() {
        return Err(Error::DegenerateFrame(o));
    }
    precheck(input, tol)?;

    let mut store = Store {
        points: BTreeMap::new(),
        tol,
    };
    store.record(initial)?;
    let mut row = BTreeMap::new();
    row.insert(o.i, initial.clone());
    let mut f = initial.clone();
    for _ in o.i..rect.imax {
        f = propagate_frame(&f, Step::PlusE1, input)?;
        store.record(&f)?;
        row.insert(f.anchor.i, f.clone());
    }
    let mut f = initial.clone();
    for _ in rect.imin..o.i {
        f = propagate_frame(&f, Step::MinusE1, input)?;
        store.record(&f)?;
        row.insert(f.anchor.i, f.clone());
    }
    for start in row.values() {
        let mut f = start.clone();
        for _ in o.j..rect.jmax {
            f = propagate_frame(&f, Step::PlusE2, input)?;
            store.record(&f)?;
        }
        let mut f = start.clone();
        for _ in rect.jmin..o.j {
            f = propagate_frame(&f, Step::MinusE2, input)?;
            store.record(&f)?;
        }
    }
    let points = store.points;
    LatticeWindow::from_fn(rect, |s| points.get(&s).cloned().expect("every site visited"))
}

/// Named constant-coefficient surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleName {
    Example1,
    Example2,
    Example3D0,
    Example3D1,
    Example3Dm1,
    Convex6,
}

impl ExampleName {
    pub const ALL: [ExampleName; 6] = [
        ExampleName::Example1,
        ExampleName::Example2,
        ExampleName::Example3D0,
        ExampleName::Example3D1,
        ExampleName::Example3Dm1,
        ExampleName::Convex6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::Example1 => "example1",
            ExampleName::Example2 => "example2",
            ExampleName::Example3D0 => "example3_d0",
            ExampleName::Example3D1 => "example3_d1",
            ExampleName::Example3Dm1 => "example3_dm1",
            ExampleName::Convex6 => "convex6",
        }
    }

    /// `(a, b, c, alpha, beta, gamma, delta)` as exact ratios.
    pub fn ratios(self) -> [(i64, i64); 7] {
        let tetra = |delta: i64| [(-3, 1), (-1, 1), (-1, 1), (-1, 1), (0, 1), (-1, 1), (delta, 1)];
        match self {
            ExampleName::Example1 => [(3, 4), (1, 2), (1, 2), (1, 2), (0, 1), (1, 2), (0, 1)],
            ExampleName::Example2 => [(-1, 3), (1, 3), (-1, 3), (1, 1), (2, 1), (-1, 1), (2, 1)],
            ExampleName::Example3D0 => tetra(0),
            ExampleName::Example3D1 => tetra(1),
            ExampleName::Example3Dm1 => tetra(-1),
            ExampleName::Convex6 => [(-5, 1), (-1, 1), (-2, 1), (-2, 1), (0, 1), (-1, 1), (0, 1)],
        }
    }

    pub fn coefficients<S: Scalar>(self) -> CoefficientSet<S> {
        CoefficientSet::from_ratios(self.ratios())
    }

    pub fn default_window(self) -> Rect {
        let r = |lo, hi| Rect::new(lo, hi, lo, hi).expect("non-empty");
        match self {
            ExampleName::Example1 | ExampleName::Convex6 => r(-2, 2),
            ExampleName::Example2 => r(-1, 2),
            ExampleName::Example3D0 | ExampleName::Example3D1 | ExampleName::Example3Dm1 => r(-1, 1),
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExampleName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ExampleName::ALL.iter().map(|e| e.as_str()).collect();
                Error::Parse(format!("unknown example `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// The named set and its default window synthesized from the canonical frame.
pub fn generate_example<S: Scalar>(name: ExampleName) -> Result<(CoefficientSet<S>, LatticeWindow<S>)> {
    generate_example_in(name, name.default_window())
}

pub fn generate_example_in<S: Scalar>(
    name: ExampleName,
    rect: Rect,
) -> Result<(CoefficientSet<S>, LatticeWindow<S>)> {
    let set = name.coefficients::<S>();
    let w = synthesize(
        &CoefficientInput::Constant(set.clone()),
        rect,
        &Frame::canonical(),
        &Tolerance::default(),
    )?;
    Ok((set, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn p(x: i64, y: i64, z: i64) -> Point3<Q> {
        Point3::from_i64(x, y, z)
    }

    fn m(rows: [[i64; 3]; 3]) -> Mat3<Q> {
        Mat3::from_fn(|r, c| Q::from_i64(rows[r][c]))
    }

    #[test]
    fn example3_transition_matrix() {
        let s: CoefficientSet<Q> = ExampleName::Example3D0.coefficients();
        let t = transition_matrices(&s);
        assert_eq!(t.a, m([[0, 1, -1], [1, 0, -1], [0, 0, -1]]));
        assert_eq!(t.a.det(), s.c.clone() * s.alpha.clone());
        assert_eq!(t.b.det(), s.b.clone() * s.gamma.clone());
    }

    #[test]
    fn example1_determinants() {
        let s: CoefficientSet<Q> = ExampleName::Example1.coefficients();
        let t = transition_matrices(&s);
        assert_eq!(t.a.det(), Q::from_ratio(1, 4));
        assert_eq!(t.b.det(), Q::from_ratio(1, 4));
        assert_eq!(t.a.column(0), Point3::basis(1));
        assert_eq!(t.b.column(0), Point3::basis(2));
    }

    #[test]
    fn backward_step_reaches_example2_point() {
        let s: CoefficientSet<Q> = ExampleName::Example2.coefficients();
        let f = propagate_frame(&Frame::canonical(), Step::MinusE1, &s).unwrap();
        assert_eq!(f.anchor, Site::new(-1, 0));
        assert_eq!(f.columns[0], p(0, -1, 2));
        assert_eq!(f.columns[1], p(1, 0, 0));
        let back = propagate_frame(&f, Step::PlusE1, &s).unwrap();
        assert_eq!(back, Frame::canonical());
    }

    #[test]
    fn tetrahedron_is_periodic_in_first_direction() {
        let s: CoefficientSet<Q> = ExampleName::Example3D0.coefficients();
        let f = propagate_path(&Frame::canonical(), &[Step::PlusE1, Step::PlusE1], &s).unwrap();
        assert_eq!(f.columns[0], p(1, 0, 0));
    }

    #[test]
    fn singular_transition_is_reported() {
        let mut s: CoefficientSet<Q> = ExampleName::Example1.coefficients();
        s.alpha = Q::from_i64(0);
        match propagate_frame(&Frame::canonical(), Step::PlusE1, &s) {
            Err(Error::SingularTransition { which: 'A', .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn example2_points() {
        let (_, w) = generate_example::<Q>(ExampleName::Example2).unwrap();
        assert_eq!(w.rect().len(), 16);
        for ((i, j), pt) in [
            ((-1, 1), p(1, 1, -5)),
            ((0, -1), p(2, -2, 1)),
            ((1, -1), p(3, 1, 1)),
            ((-1, 0), p(0, -1, 2)),
            ((-1, -1), p(-1, -1, -1)),
        ] {
            assert_eq!(w.get(Site::new(i, j)), Some(&pt), "r({i},{j})");
        }
    }

    #[test]
    fn tetrahedron_has_four_points() {
        let (_, w) = generate_example::<Q>(ExampleName::Example3D0).unwrap();
        let mut distinct: Vec<&Point3<Q>> = Vec::new();
        for (_, pt) in w.iter() {
            if !distinct.contains(&pt) {
                distinct.push(pt);
            }
        }
        assert_eq!(distinct.len(), 4);
        assert_eq!(w.get(Site::new(1, 1)), Some(&p(-1, -1, -1)));
    }

    #[test]
    fn convex6_has_ten_points() {
        let (_, w) = generate_example::<Q>(ExampleName::Convex6).unwrap();
        let mut distinct: Vec<&Point3<Q>> = Vec::new();
        for (_, pt) in w.iter() {
            if !distinct.contains(&pt) {
                distinct.push(pt);
            }
        }
        assert_eq!(w.rect().len(), 25);
        assert_eq!(distinct.len(), 10);
    }

    #[test]
    fn incompatible_constant_set_is_rejected() {
        let mut s: CoefficientSet<Q> = ExampleName::Example1.coefficients();
        s.alpha = Q::from_ratio(3, 5);
        let r = synthesize(
            &CoefficientInput::Constant(s),
            Rect::new(0, 2, 0, 2).unwrap(),
            &Frame::canonical(),
            &Tolerance::default(),
        );
        assert!(matches!(r, Err(Error::IncompatibleField { .. })));
    }

    #[test]
    fn incompatible_field_is_rejected() {
        let rect = Rect::new(0, 2, 0, 2).unwrap();
        let mut f = CoefficientField::constant(rect, &ExampleName::Example1.coefficients::<Q>());
        f.get_mut(Site::new(1, 1)).unwrap().a = Q::from_ratio(85, 100);
        let r = synthesize(&CoefficientInput::Field(f), rect, &Frame::canonical(), &Tolerance::default());
        assert!(matches!(r, Err(Error::IncompatibleField { .. })), "{r:?}");
    }

    #[test]
    fn window_must_contain_initial_frame() {
        let s: CoefficientSet<Q> = ExampleName::Example1.coefficients();
        let r = synthesize(
            &CoefficientInput::Constant(s),
            Rect::new(1, 3, 0, 2).unwrap(),
            &Frame::canonical(),
            &Tolerance::default(),
        );
        assert!(matches!(r, Err(Error::InvalidWindow(_))));
    }

    #[test]
    fn example_names_parse() {
        for e in ExampleName::ALL {
            assert_eq!(e.as_str().parse::<ExampleName>().unwrap(), e);
        }
        assert!("example4".parse::<ExampleName>().is_err());
    }
}
