//! 3-vectors, 3x3 matrices and the determinant kernel.

use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};

/// A position vector in R^3.
#[derive(Clone, Debug, PartialEq)]
pub struct Point3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Point3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Point3 { x, y, z }
    }

    /// Like [`Point3::new`] but rejects NaN and infinities.
    pub fn try_new(x: S, y: S, z: S) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Point3 { x, y, z })
        } else {
            Err(Error::NonFinite(format!("({x:?}, {y:?}, {z:?})")))
        }
    }

    pub fn from_i64(x: i64, y: i64, z: i64) -> Self {
        Point3::new(S::from_i64(x), S::from_i64(y), S::from_i64(z))
    }

    pub fn zero() -> Self {
        Point3::new(S::zero(), S::zero(), S::zero())
    }

    /// Standard basis vector `e_{k+1}`.
    pub fn basis(k: usize) -> Self {
        let mut p = Self::zero();
        *p.coord_mut(k) = S::one();
        p
    }

    pub fn coord(&self, k: usize) -> &S {
        match k {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("coordinate index {k} out of range"),
        }
    }

    pub fn coord_mut(&mut self, k: usize) -> &mut S {
        match k {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("coordinate index {k} out of range"),
        }
    }

    pub fn coords(&self) -> [&S; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn scale(&self, t: &S) -> Self {
        Point3::new(
            self.x.clone() * t.clone(),
            self.y.clone() * t.clone(),
            self.z.clone() * t.clone(),
        )
    }

    /// Max-abs (infinity) norm; stays exact on the rational backend.
    pub fn norm_inf(&self) -> S {
        let mut m = self.x.abs();
        for c in [&self.y, &self.z] {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        let scale = self.norm_inf().to_f64().max(other.norm_inf().to_f64());
        (self - other)
            .coords()
            .iter()
            .all(|c| tol.is_zero(*c, scale))
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.x.to_f64(), self.y.to_f64(), self.z.to_f64()]
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Point3<T> {
        Point3::new(f(&self.x), f(&self.y), f(&self.z))
    }
}

impl<S: Scalar> Add for &Point3<S> {
    type Output = Point3<S>;
    fn add(self, o: &Point3<S>) -> Point3<S> {
        Point3::new(
            self.x.clone() + o.x.clone(),
            self.y.clone() + o.y.clone(),
            self.z.clone() + o.z.clone(),
        )
    }
}

impl<S: Scalar> Sub for &Point3<S> {
    type Output = Point3<S>;
    fn sub(self, o: &Point3<S>) -> Point3<S> {
        Point3::new(
            self.x.clone() - o.x.clone(),
            self.y.clone() - o.y.clone(),
            self.z.clone() - o.z.clone(),
        )
    }
}

impl<S: Scalar> Add for Point3<S> {
    type Output = Point3<S>;
    fn add(self, o: Point3<S>) -> Point3<S> {
        &self + &o
    }
}

impl<S: Scalar> Sub for Point3<S> {
    type Output = Point3<S>;
    fn sub(self, o: Point3<S>) -> Point3<S> {
        &self - &o
    }
}

impl<S: Scalar> Neg for &Point3<S> {
    type Output = Point3<S>;
    fn neg(self) -> Point3<S> {
        Point3::new(-self.x.clone(), -self.y.clone(), -self.z.clone())
    }
}

/// Determinant of the 3x3 array whose columns are `v1, v2, v3`.
pub fn det3<S: Scalar>(v1: &Point3<S>, v2: &Point3<S>, v3: &Point3<S>) -> S {
    let m1 = v2.y.clone() * v3.z.clone() - v2.z.clone() * v3.y.clone();
    let m2 = v2.x.clone() * v3.z.clone() - v2.z.clone() * v3.x.clone();
    let m3 = v2.x.clone() * v3.y.clone() - v2.y.clone() * v3.x.clone();
    v1.x.clone() * m1 - v1.y.clone() * m2 + v1.z.clone() * m3
}

/// Hadamard bound `|v1| |v2| |v3|` (Euclidean), used as the float scale of a determinant.
pub fn det3_scale<S: Scalar>(v1: &Point3<S>, v2: &Point3<S>, v3: &Point3<S>) -> f64 {
    let n = |v: &Point3<S>| {
        let [x, y, z] = v.to_f64();
        (x * x + y * y + z * z).sqrt()
    };
    n(v1) * n(v2) * n(v3)
}

/// Row-major 3x3 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat3<S> {
    pub m: [[S; 3]; 3],
}

impl<S: Scalar> Mat3<S> {
    pub fn new(m: [[S; 3]; 3]) -> Self {
        Mat3 { m }
    }

    pub fn identity() -> Self {
        Mat3::from_fn(|r, c| if r == c { S::one() } else { S::zero() })
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> S) -> Self {
        Mat3 {
            m: std::array::from_fn(|r| std::array::from_fn(|c| f(r, c))),
        }
    }

    pub fn from_columns(c: [&Point3<S>; 3]) -> Self {
        Mat3::from_fn(|r, k| c[k].coord(r).clone())
    }

    pub fn column(&self, k: usize) -> Point3<S> {
        Point3::new(self.m[0][k].clone(), self.m[1][k].clone(), self.m[2][k].clone())
    }

    pub fn det(&self) -> S {
        det3(&self.column(0), &self.column(1), &self.column(2))
    }

    pub fn mul(&self, o: &Mat3<S>) -> Mat3<S> {
        Mat3::from_fn(|r, c| {
            (0..3).fold(S::zero(), |acc, k| {
                acc + self.m[r][k].clone() * o.m[k][c].clone()
            })
        })
    }

    pub fn mul_point(&self, p: &Point3<S>) -> Point3<S> {
        let row = |r: usize| {
            self.m[r][0].clone() * p.x.clone()
                + self.m[r][1].clone() * p.y.clone()
                + self.m[r][2].clone() * p.z.clone()
        };
        Point3::new(row(0), row(1), row(2))
    }

    pub fn sub(&self, o: &Mat3<S>) -> Mat3<S> {
        Mat3::from_fn(|r, c| self.m[r][c].clone() - o.m[r][c].clone())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> S {
        let mut best = S::zero();
        for row in &self.m {
            for v in row {
                let a = v.abs();
                if a > best {
                    best = a;
                }
            }
        }
        best
    }

    /// Inverse via the adjugate; `None` when the determinant is exactly zero.
    pub fn inverse(&self) -> Option<Mat3<S>> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let m = &self.m;
        let cof = |r: usize, c: usize| {
            let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
            let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
            m[r1][c1].clone() * m[r2][c2].clone() - m[r1][c2].clone() * m[r2][c1].clone()
        };
        // inverse = adj / det, adj[r][c] = cofactor[c][r]
        let inv = Mat3::from_fn(|r, c| cof(c, r) / det.clone());
        if inv.m.iter().flatten().all(|v| v.is_finite()) {
            Some(inv)
        } else {
            None
        }
    }

    pub fn pow(&self, n: u32) -> Mat3<S> {
        (0..n).fold(Mat3::identity(), |acc, _| acc.mul(self))
    }
}
