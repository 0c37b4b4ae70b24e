//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use calat::compat::{TzitzeicaData, TzitzeicaSample};
use calat::{
    constant_family, CoefficientField, CoefficientSet, LatticeWindow, Mat3, Point3, Rational, Rect,
    Scalar, Site,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Q = Rational;

pub fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform rational `k/den` in `[lo, hi]`.
pub fn rational_in(rng: &mut impl Rng, lo: i64, hi: i64, den: i64) -> Q {
    q(rng.gen_range(lo * den..=hi * den), den)
}

/// A compatible constant set with `b, c` in `[-3,3] \ {0}` and `beta, delta` in `[-2,2]`,
/// redrawn until `beta delta != 1` and `a != 1`.
pub fn random_family(rng: &mut impl Rng) -> CoefficientSet<Q> {
    loop {
        let b = rational_in(rng, -3, 3, 4);
        let c = rational_in(rng, -3, 3, 4);
        let beta = rational_in(rng, -2, 2, 4);
        let delta = rational_in(rng, -2, 2, 4);
        if let Ok(s) = constant_family(b, c, beta, delta) {
            return s;
        }
    }
}

pub fn families(n: usize, seed: u64) -> Vec<CoefficientSet<Q>> {
    let mut r = rng(seed);
    (0..n).map(|_| random_family(&mut r)).collect()
}

/// Leibniz-formula determinant, independent of the library's cofactor kernel.
pub fn leibniz_det(m: &[[Q; 3]; 3]) -> Q {
    const PERMS: [([usize; 3], i64); 6] = [
        ([0, 1, 2], 1),
        ([1, 2, 0], 1),
        ([2, 0, 1], 1),
        ([0, 2, 1], -1),
        ([2, 1, 0], -1),
        ([1, 0, 2], -1),
    ];
    let mut acc = q(0, 1);
    for (p, sign) in PERMS {
        let term = m[0][p[0]].clone() * m[1][p[1]].clone() * m[2][p[2]].clone();
        acc += Q::from_i64(sign) * term;
    }
    acc
}

pub fn leibniz_det_cols(u: &Point3<Q>, v: &Point3<Q>, w: &Point3<Q>) -> Q {
    let m = [
        [u.x.clone(), v.x.clone(), w.x.clone()],
        [u.y.clone(), v.y.clone(), w.y.clone()],
        [u.z.clone(), v.z.clone(), w.z.clone()],
    ];
    leibniz_det(&m)
}

/// Matrix product by explicit triple loop.
pub fn matmul(a: &Mat3<Q>, b: &Mat3<Q>) -> [[Q; 3]; 3] {
    std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            (0..3).fold(q(0, 1), |s, k| s + a.m[r][k].clone() * b.m[k][c].clone())
        })
    })
}

/// A random integer matrix with entries in `[-5, 5]` and nonzero determinant.
pub fn random_map(rng: &mut impl Rng) -> Mat3<Q> {
    loop {
        let m = Mat3::new(std::array::from_fn(|_| std::array::from_fn(|_| Q::from_i64(rng.gen_range(-5..=5)))));
        if !leibniz_det(&m.m).is_zero() {
            return m;
        }
    }
}

fn cross(a: &Point3<Q>, b: &Point3<Q>) -> Point3<Q> {
    Point3::new(
        a.y.clone() * b.z.clone() - a.z.clone() * b.y.clone(),
        a.z.clone() * b.x.clone() - a.x.clone() * b.z.clone(),
        a.x.clone() * b.y.clone() - a.y.clone() * b.x.clone(),
    )
}

fn dot(a: &Point3<Q>, b: &Point3<Q>) -> Q {
    a.x.clone() * b.x.clone() + a.y.clone() * b.y.clone() + a.z.clone() * b.z.clone()
}

fn random_point(rng: &mut impl Rng) -> Point3<Q> {
    Point3::new(
        q(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
        q(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
        q(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
    )
}

fn argmax_abs(v: &Point3<Q>) -> usize {
    (0..3)
        .max_by(|&a, &b| v.coord(a).abs().partial_cmp(&v.coord(b).abs()).unwrap())
        .unwrap()
}

/// A random lattice on `[0,n] x [0,n]` in which every star is coplanar, with
/// non-constant coefficients. `None` for an unlucky degenerate draw.
///
/// Row `j = 0` is free; each later point is constrained to the tangent plane of
/// `(i, j-1)` and to that of `(i-1, j)` whenever three of their points exist.
pub fn asymptotic_net(rng: &mut impl Rng, n: i64) -> Option<LatticeWindow<Q>> {
    let mut r: BTreeMap<(i64, i64), Point3<Q>> = BTreeMap::new();
    for i in 0..=n {
        r.insert((i, 0), random_point(rng));
    }
    for j in 1..=n {
        for i in 0..=n {
            let mut planes = Vec::new();
            let mut plane_of = |pts: Vec<Option<&Point3<Q>>>| {
                let pts: Vec<&Point3<Q>> = pts.into_iter().flatten().collect();
                if pts.len() >= 3 {
                    let nrm = cross(&(pts[1] - pts[0]), &(pts[2] - pts[0]));
                    planes.push((nrm, pts[0].clone()));
                }
            };
            plane_of(vec![r.get(&(i, j - 1)), r.get(&(i - 1, j - 1)), r.get(&(i + 1, j - 1)), r.get(&(i, j - 2))]);
            plane_of(vec![r.get(&(i - 1, j)), r.get(&(i - 1, j - 1)), r.get(&(i - 2, j))]);
            let mut x = random_point(rng);
            match planes.len() {
                0 => {}
                1 => {
                    let (nrm, p) = &planes[0];
                    if nrm.is_zero() {
                        return None;
                    }
                    let k = argmax_abs(nrm);
                    let shift = (dot(nrm, &x) - dot(nrm, p)) / nrm.coord(k).clone();
                    *x.coord_mut(k) = x.coord(k).clone() - shift;
                }
                _ => {
                    let (n1, p1) = &planes[0];
                    let (n2, p2) = &planes[1];
                    let dir = cross(n1, n2);
                    if dir.is_zero() {
                        return None;
                    }
                    let k = argmax_abs(&dir);
                    let o: Vec<usize> = (0..3).filter(|&t| t != k).collect();
                    let (a00, a01) = (n1.coord(o[0]).clone(), n1.coord(o[1]).clone());
                    let (a10, a11) = (n2.coord(o[0]).clone(), n2.coord(o[1]).clone());
                    let r0 = dot(n1, p1) - n1.coord(k).clone() * x.coord(k).clone();
                    let r1 = dot(n2, p2) - n2.coord(k).clone() * x.coord(k).clone();
                    let dd = a00.clone() * a11.clone() - a01.clone() * a10.clone();
                    if dd.is_zero() {
                        return None;
                    }
                    *x.coord_mut(o[0]) = (r0.clone() * a11 - a01 * r1.clone()) / dd.clone();
                    *x.coord_mut(o[1]) = (a00 * r1 - a10 * r0) / dd;
                }
            }
            r.insert((i, j), x);
        }
    }
    let rect = Rect::new(0, n, 0, n).unwrap();
    LatticeWindow::from_points(rect, r.into_iter().map(|((i, j), p)| (Site::new(i, j), p))).ok()
}

/// Discrete Tzitzeica data on `[0,n] x [0,n]` transported by its own recursions from
/// random boundary values. `None` if a denominator vanished.
pub fn tzitzeica_grid(rng: &mut impl Rng, n: i64) -> Option<TzitzeicaData<Q>> {
    let hs = [-3, -2, 2, 3, 5];
    let mut h: BTreeMap<(i64, i64), Q> = BTreeMap::new();
    let mut a: BTreeMap<(i64, i64), Q> = BTreeMap::new();
    let mut b: BTreeMap<(i64, i64), Q> = BTreeMap::new();
    let pick_h = |rng: &mut dyn rand::RngCore| q(hs[rng.gen_range(0..hs.len())], rng.gen_range(1..=3));
    for i in 0..=n + 1 {
        h.insert((i, 0), pick_h(rng));
        a.insert((i, 0), q(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
    }
    for j in 1..=n + 1 {
        h.insert((0, j), pick_h(rng));
    }
    for j in 0..=n + 1 {
        b.insert((0, j), q(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
    }
    for s in 0..=2 * n {
        for i in 0..=n {
            let j = s - i;
            if j < 0 || j > n {
                continue;
            }
            if !a.contains_key(&(i, j)) && j > 0 {
                let den = h[&(i, j - 1)].clone();
                if den.is_zero() {
                    return None;
                }
                let v = h[&(i + 1, j - 1)].clone() / den * a[&(i, j - 1)].clone();
                a.insert((i, j), v);
            }
            if !b.contains_key(&(i, j)) && i > 0 {
                let den = h[&(i - 1, j)].clone();
                if den.is_zero() {
                    return None;
                }
                let v = h[&(i - 1, j + 1)].clone() / den * b[&(i - 1, j)].clone();
                b.insert((i, j), v);
            }
            if !h.contains_key(&(i + 1, j + 1)) {
                let (h0, h1, h2) = (h[&(i, j)].clone(), h[&(i + 1, j)].clone(), h[&(i, j + 1)].clone());
                let den = h0.clone() * h0.clone() * (h1.clone() + h2.clone() - h1.clone() * h2.clone()) - h0.clone()
                    + a[&(i, j)].clone() * b[&(i, j)].clone() * h1 * h2;
                if den.is_zero() {
                    return None;
                }
                let v = h0.clone() * (h0 - q(1, 1)) / den;
                if v.is_zero() || v == q(1, 1) {
                    return None;
                }
                h.insert((i + 1, j + 1), v);
            }
        }
    }
    let rect = Rect::new(0, n, 0, n).unwrap();
    let mut samples = BTreeMap::new();
    for site in rect.sites() {
        let k = (site.i, site.j);
        if let (Some(hv), Some(av), Some(bv)) = (h.get(&k), a.get(&k), b.get(&k)) {
            samples.insert(
                site,
                TzitzeicaSample {
                    h: hv.clone(),
                    a: av.clone(),
                    b: bv.clone(),
                },
            );
        }
    }
    TzitzeicaData::new(rect, samples).ok()
}

/// Coefficients at every site of `rect` where the conversion succeeds.
pub fn tzitzeica_field(t: &TzitzeicaData<Q>, rect: Rect) -> Option<CoefficientField<Q>> {
    let mut sets = BTreeMap::new();
    for site in rect.sites() {
        sets.insert(site, calat::tzitzeica_to_centroaffine(t, site).ok()?);
    }
    CoefficientField::new(rect, sets).ok()
}

/// Applies `p` to every point.
pub fn transform(w: &LatticeWindow<Q>, p: &Mat3<Q>) -> LatticeWindow<Q> {
    w.map_points(|x| p.mul_point(x))
}

/// Distinct point values of a window.
pub fn distinct_points(w: &LatticeWindow<Q>) -> usize {
    let mut seen: Vec<&Point3<Q>> = Vec::new();
    for (_, p) in w.iter() {
        if !seen.contains(&p) {
            seen.push(p);
        }
    }
    seen.len()
}
