//! OBJ and OFF mesh export.
//!
//! Vertices are numbered row-major (first index outer). Every cell
//! `(i,j)-(i+1,j+1)` contributes the two counter-clockwise triangles
//! `(r, r1, r2)` and `(r1, r12, r2)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{LatticeWindow, Rect, Site};
use crate::scalar::Scalar;

/// Oriented triangles of the lattice triangulation as 0-based vertex indices.
pub fn faces(rect: Rect) -> Vec<[usize; 3]> {
    let idx = |i, j| rect.offset(Site::new(i, j)).expect("inside rect");
    let mut out = Vec::with_capacity(2 * (rect.rows() - 1) * (rect.cols() - 1));
    for i in rect.imin..rect.imax {
        for j in rect.jmin..rect.jmax {
            out.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
            out.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    out
}

/// Shortest decimal that parses back to the same `f64`.
fn shortest(x: f64) -> String {
    let s = format!("{x}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn to_obj<S: Scalar>(w: &LatticeWindow<S>) -> String {
    let rect = w.rect();
    let mut out = String::new();
    let _ = writeln!(out, "# calat lattice mesh {rect}");
    let _ = writeln!(out, "# {} vertices, row-major in (i,j)", rect.len());
    for (k, (s, _)) in w.iter().enumerate() {
        let _ = writeln!(out, "# v {} = r({},{})", k + 1, s.i, s.j);
    }
    for (_, p) in w.iter() {
        let [x, y, z] = p.to_f64();
        let _ = writeln!(out, "v {} {} {}", shortest(x), shortest(y), shortest(z));
    }
    for [a, b, c] in faces(rect) {
        let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    out
}

/// OFF with coordinates as fixed-point decimals of `digits` fractional digits.
pub fn to_off<S: Scalar>(w: &LatticeWindow<S>, digits: usize) -> String {
    let rect = w.rect();
    let f = faces(rect);
    let mut out = String::from("OFF\n");
    let _ = writeln!(out, "# calat lattice mesh {rect}, row-major in (i,j)");
    let _ = writeln!(out, "{} {} 0", rect.len(), f.len());
    for (_, p) in w.iter() {
        let c: Vec<String> = p.coords().iter().map(|c| c.to_decimal(digits)).collect();
        let _ = writeln!(out, "{}", c.join(" "));
    }
    for [a, b, c] in f {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    out
}

/// Vertex coordinates of an OBJ file, in file order.
pub fn read_obj_vertices(text: &str) -> Result<Vec<[f64; 3]>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        if it.next() != Some("v") {
            continue;
        }
        let bad = || Error::Parse(format!("line {}: malformed vertex `{line}`", n + 1));
        let mut xyz = [0.0; 3];
        for c in &mut xyz {
            *c = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        }
        out.push(xyz);
    }
    Ok(out)
}

/// Face triples (1-based) of an OBJ file.
pub fn read_obj_faces(text: &str) -> Result<Vec<[usize; 3]>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        if it.next() != Some("f") {
            continue;
        }
        let bad = || Error::Parse(format!("line {}: malformed face `{line}`", n + 1));
        let mut f = [0usize; 3];
        for c in &mut f {
            *c = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        }
        out.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::scalar::Rational;
    use crate::synthesis::{generate_example, ExampleName};

    #[test]
    fn three_by_three_counts() {
        let rect = Rect::new(0, 2, 0, 2).unwrap();
        let w = LatticeWindow::<Rational>::from_fn(rect, |s| Point3::from_i64(s.i, s.j, 1)).unwrap();
        let obj = to_obj(&w);
        assert_eq!(read_obj_vertices(&obj).unwrap().len(), 9);
        assert_eq!(read_obj_faces(&obj).unwrap().len(), 8);
        assert_eq!(read_obj_faces(&obj).unwrap()[0], [1, 4, 2]);
    }

    #[test]
    fn example2_mesh() {
        let (_, w) = generate_example::<Rational>(ExampleName::Example2).unwrap();
        let obj = to_obj(&w);
        let v = read_obj_vertices(&obj).unwrap();
        assert_eq!(v.len(), 16);
        assert_eq!(read_obj_faces(&obj).unwrap().len(), 18);
        for ((_, p), q) in w.iter().zip(&v) {
            assert_eq!(p.to_f64(), *q);
        }
        assert!(obj.contains("# v 1 = r(-1,-1)"));
    }

    #[test]
    fn faces_are_counter_clockwise_in_parameter_plane() {
        let rect = Rect::new(-1, 1, 0, 2).unwrap();
        let sites: Vec<Site> = rect.sites().collect();
        for [a, b, c] in faces(rect) {
            let (p, q, r) = (sites[a], sites[b], sites[c]);
            let cross = (q.i - p.i) * (r.j - p.j) - (q.j - p.j) * (r.i - p.i);
            assert_eq!(cross, 1);
        }
    }

    #[test]
    fn off_uses_fixed_digits() {
        let (_, w) = generate_example::<Rational>(ExampleName::Example1).unwrap();
        let off = to_off(&w, 4);
        assert!(off.starts_with("OFF\n"));
        assert!(off.contains("25 32 0"));
        assert!(off.lines().any(|l| l == "1.0000 0.0000 0.0000"));
    }

    #[test]
    fn shortest_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-12, 12345.678] {
            assert_eq!(shortest(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(shortest(-0.0), "0");
    }
}
