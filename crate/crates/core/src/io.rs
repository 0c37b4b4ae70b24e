//! JSON formats for lattices, coefficient data, residual tables and reports.
//!
//! Rational scalars are written as `"p/q"` strings, floats as JSON numbers. Key
//! order is fixed so output is byte-stable.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::analysis::AnalysisReport;
use crate::compat::{CompatResiduals, TzitzeicaData, TzitzeicaSample};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::invariants::{CoefficientField, CoefficientSet, FieldWarning};
use crate::lattice::{LatticeWindow, Rect, Site};
use crate::scalar::Scalar;
use crate::synthesis::{CoefficientInput, Frame};

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("{ctx}: missing key `{key}`")))
}

fn as_object<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Parse(format!("{ctx}: expected an object")))
}

fn as_array<'a>(v: &'a Value, ctx: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{ctx}: expected an array")))
}

fn int(obj: &Map<String, Value>, key: &str, ctx: &str) -> Result<i64> {
    field(obj, key, ctx)?
        .as_i64()
        .ok_or_else(|| Error::Parse(format!("{ctx}: `{key}` must be an integer")))
}

fn scalar<S: Scalar>(obj: &Map<String, Value>, key: &str, ctx: &str) -> Result<S> {
    let v = S::from_json(field(obj, key, ctx)?)
        .map_err(|e| Error::Parse(format!("{ctx}: `{key}`: {e}")))?;
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("{ctx}: `{key}`")));
    }
    Ok(v)
}

fn rect_from(obj: &Map<String, Value>, ctx: &str) -> Result<Rect> {
    Rect::new(
        int(obj, "imin", ctx)?,
        int(obj, "imax", ctx)?,
        int(obj, "jmin", ctx)?,
        int(obj, "jmax", ctx)?,
    )
}

fn rect_json(r: Rect) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("imin".into(), r.imin.into());
    m.insert("imax".into(), r.imax.into());
    m.insert("jmin".into(), r.jmin.into());
    m.insert("jmax".into(), r.jmax.into());
    m
}

fn site_of(obj: &Map<String, Value>, ctx: &str) -> Result<Site> {
    Ok(Site::new(int(obj, "i", ctx)?, int(obj, "j", ctx)?))
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn point_json<S: Scalar>(p: &Point3<S>) -> Value {
    Value::Array(p.coords().iter().map(|c| c.to_json()).collect())
}

pub fn lattice_to_json<S: Scalar>(w: &LatticeWindow<S>) -> Value {
    let mut m = rect_json(w.rect());
    let points: Vec<Value> = w
        .iter()
        .map(|(s, p)| json!({"i": s.i, "j": s.j, "xyz": point_json(p)}))
        .collect();
    m.insert("points".into(), Value::Array(points));
    Value::Object(m)
}

pub fn lattice_from_value<S: Scalar>(v: &Value) -> Result<LatticeWindow<S>> {
    let obj = as_object(v, "lattice")?;
    let rect = rect_from(obj, "lattice")?;
    let mut entries = Vec::new();
    for (k, e) in as_array(field(obj, "points", "lattice")?, "lattice.points")?.iter().enumerate() {
        let ctx = format!("points[{k}]");
        let o = as_object(e, &ctx)?;
        let site = site_of(o, &ctx)?;
        let xyz = as_array(field(o, "xyz", &ctx)?, &ctx)?;
        if xyz.len() != 3 {
            return Err(Error::Parse(format!("{ctx}: `xyz` needs 3 entries, got {}", xyz.len())));
        }
        let c = |n: usize| S::from_json(&xyz[n]).map_err(|e| Error::Parse(format!("{ctx}: {e}")));
        entries.push((site, Point3::try_new(c(0)?, c(1)?, c(2)?)?));
    }
    LatticeWindow::from_points(rect, entries)
}

pub fn lattice_from_json<S: Scalar>(text: &str) -> Result<LatticeWindow<S>> {
    lattice_from_value(&parse_value(text)?)
}

fn set_entries<S: Scalar>(s: &CoefficientSet<S>, m: &mut Map<String, Value>) {
    for (name, v) in CoefficientSet::<S>::NAMES.iter().zip(s.values()) {
        m.insert((*name).into(), v.to_json());
    }
}

pub fn set_to_json<S: Scalar>(s: &CoefficientSet<S>) -> Value {
    let mut m = Map::new();
    set_entries(s, &mut m);
    Value::Object(m)
}

fn set_from_object<S: Scalar>(o: &Map<String, Value>, ctx: &str) -> Result<CoefficientSet<S>> {
    let g = |k| scalar::<S>(o, k, ctx);
    Ok(CoefficientSet::new(
        g("a")?,
        g("b")?,
        g("c")?,
        g("alpha")?,
        g("beta")?,
        g("gamma")?,
        g("delta")?,
    ))
}

pub fn set_from_value<S: Scalar>(v: &Value) -> Result<CoefficientSet<S>> {
    set_from_object(as_object(v, "coefficient set")?, "coefficient set")
}

pub fn field_to_json<S: Scalar>(f: &CoefficientField<S>, warnings: &[FieldWarning]) -> Value {
    let mut m = rect_json(f.rect());
    let sets: Vec<Value> = f
        .iter()
        .map(|(site, s)| {
            let mut e = Map::new();
            e.insert("i".into(), site.i.into());
            e.insert("j".into(), site.j.into());
            set_entries(s, &mut e);
            Value::Object(e)
        })
        .collect();
    m.insert("sets".into(), Value::Array(sets));
    let w: Vec<Value> = warnings
        .iter()
        .map(|w| json!({"i": w.site.i, "j": w.site.j, "clause": w.clause.to_string()}))
        .collect();
    m.insert("warnings".into(), Value::Array(w));
    Value::Object(m)
}

pub fn field_from_value<S: Scalar>(v: &Value) -> Result<CoefficientField<S>> {
    let obj = as_object(v, "coefficient field")?;
    let rect = rect_from(obj, "coefficient field")?;
    let mut sets = BTreeMap::new();
    for (k, e) in as_array(field(obj, "sets", "coefficient field")?, "sets")?.iter().enumerate() {
        let ctx = format!("sets[{k}]");
        let o = as_object(e, &ctx)?;
        let site = site_of(o, &ctx)?;
        if sets.insert(site, set_from_object(o, &ctx)?).is_some() {
            return Err(Error::Parse(format!("{ctx}: duplicate site {site}")));
        }
    }
    CoefficientField::new(rect, sets)
}

/// A set object, or a field object (recognised by its `sets` key).
pub fn coefficients_from_value<S: Scalar>(v: &Value) -> Result<CoefficientInput<S>> {
    let obj = as_object(v, "coefficients")?;
    if obj.contains_key("sets") {
        Ok(CoefficientInput::Field(field_from_value(v)?))
    } else {
        Ok(CoefficientInput::Constant(set_from_value(v)?))
    }
}

pub fn coefficients_from_json<S: Scalar>(text: &str) -> Result<CoefficientInput<S>> {
    coefficients_from_value(&parse_value(text)?)
}

pub fn tzitzeica_to_json<S: Scalar>(t: &TzitzeicaData<S>) -> Value {
    let mut m = rect_json(t.rect());
    let sets: Vec<Value> = t
        .iter()
        .map(|(s, x)| json!({"i": s.i, "j": s.j, "H": x.h.to_json(), "A": x.a.to_json(), "B": x.b.to_json()}))
        .collect();
    m.insert("sets".into(), Value::Array(sets));
    Value::Object(m)
}

pub fn tzitzeica_from_json<S: Scalar>(text: &str) -> Result<TzitzeicaData<S>> {
    let v = parse_value(text)?;
    let obj = as_object(&v, "tzitzeica data")?;
    let rect = rect_from(obj, "tzitzeica data")?;
    let mut samples = BTreeMap::new();
    for (k, e) in as_array(field(obj, "sets", "tzitzeica data")?, "sets")?.iter().enumerate() {
        let ctx = format!("sets[{k}]");
        let o = as_object(e, &ctx)?;
        let sample = TzitzeicaSample {
            h: scalar(o, "H", &ctx)?,
            a: scalar(o, "A", &ctx)?,
            b: scalar(o, "B", &ctx)?,
        };
        samples.insert(site_of(o, &ctx)?, sample);
    }
    TzitzeicaData::new(rect, samples)
}

/// One row of a compatibility table.
#[derive(Clone, Debug)]
pub struct CompatRow<S> {
    pub site: Site,
    pub residuals: CompatResiduals<S>,
    pub matrix_residual: S,
    pub compatible: bool,
}

pub fn compat_table_to_json<S: Scalar>(rows: &[CompatRow<S>]) -> Value {
    let entries: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("i".into(), r.site.i.into());
            m.insert("j".into(), r.site.j.into());
            for (name, v) in CompatResiduals::<S>::NAMES.iter().zip(r.residuals.residuals()) {
                m.insert((*name).into(), v.to_json());
            }
            m.insert("k_value".into(), r.residuals.k_value.to_json());
            m.insert("matrix_residual".into(), r.matrix_residual.to_json());
            m.insert("compatible".into(), r.compatible.into());
            Value::Object(m)
        })
        .collect();
    json!({
        "compatible": rows.iter().all(|r| r.compatible),
        "sites": entries,
    })
}

pub fn report_to_json<S: Scalar>(r: &AnalysisReport<S>) -> Value {
    let sites: Vec<Value> = r
        .sites
        .iter()
        .map(|s| {
            let mut m = Map::new();
            m.insert("i".into(), s.site.i.into());
            m.insert("j".into(), s.site.j.into());
            m.insert("laplacian".into(), point_json(&s.laplacian));
            m.insert("harmonic_residual".into(), s.harmonic_residual.to_json());
            if let Some(e) = &s.eigen_s {
                m.insert("eigen_s".into(), e.to_json());
            }
            m.insert("convexity".into(), s.convexity.as_str().into());
            m.insert("star_volume".into(), s.star_volume.to_json());
            m.insert("tangent_star_volume".into(), s.tangent_star_volume.to_json());
            Value::Object(m)
        })
        .collect();
    let mut summary = Map::new();
    summary.insert("harmonic".into(), r.summary.harmonic.into());
    if let Some(e) = &r.summary.eigen_s {
        summary.insert("eigen_s".into(), e.to_json());
    }
    summary.insert("convex_everywhere".into(), r.summary.convex_everywhere.into());
    json!({
        "sites": sites,
        "summary": Value::Object(summary),
        "diagnostics": r.diagnostics,
    })
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn report_to_csv<S: Scalar>(r: &AnalysisReport<S>) -> String {
    let mut out = String::from(
        "i,j,laplacian_x,laplacian_y,laplacian_z,harmonic_residual,eigen_s,convexity,star_volume,tangent_star_volume\n",
    );
    for s in &r.sites {
        let mut cells = vec![s.site.i.to_string(), s.site.j.to_string()];
        cells.extend(s.laplacian.coords().iter().map(|c| csv_cell(&c.to_json())));
        cells.push(csv_cell(&s.harmonic_residual.to_json()));
        cells.push(s.eigen_s.as_ref().map(|e| csv_cell(&e.to_json())).unwrap_or_default());
        cells.push(s.convexity.as_str().into());
        cells.push(csv_cell(&s.star_volume.to_json()));
        cells.push(csv_cell(&s.tangent_star_volume.to_json()));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Synthesis configuration: coefficients, window and initial frame.
#[derive(Clone, Debug)]
pub struct SynthConfig<S> {
    pub coefficients: CoefficientInput<S>,
    pub window: Option<Rect>,
    pub frame: Frame<S>,
}

/// Parses a synthesis config. A string `coefficients` entry is a path, resolved
/// relative to `base`.
pub fn synth_config_from_json<S: Scalar>(text: &str, base: &Path) -> Result<SynthConfig<S>> {
    let v = parse_value(text)?;
    let obj = as_object(&v, "config")?;
    let coefficients = match field(obj, "coefficients", "config")? {
        Value::String(p) => {
            let mut path = PathBuf::from(p);
            if path.is_relative() {
                path = base.join(path);
            }
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            coefficients_from_json(&text)?
        }
        other => coefficients_from_value(other)?,
    };
    let window = match obj.get("window") {
        None => None,
        Some(w) => {
            let a = as_array(w, "config.window")?;
            let ints: Option<Vec<i64>> = a.iter().map(|x| x.as_i64()).collect();
            match ints.as_deref() {
                Some(&[imin, imax, jmin, jmax]) => Some(Rect::new(imin, imax, jmin, jmax)?),
                _ => return Err(Error::Parse("config.window: expected [imin, imax, jmin, jmax]".into())),
            }
        }
    };
    let frame = match obj.get("frame") {
        None => Frame::canonical(),
        Some(Value::String(s)) if s == "canonical" => Frame::canonical(),
        Some(Value::Array(a)) if a.len() == 9 => {
            let vals = a
                .iter()
                .map(S::from_json)
                .collect::<Result<Vec<S>>>()?;
            let col = |k: usize| Point3::try_new(vals[3 * k].clone(), vals[3 * k + 1].clone(), vals[3 * k + 2].clone());
            Frame::new([col(0)?, col(1)?, col(2)?], Site::ORIGIN)?
        }
        Some(_) => {
            return Err(Error::Parse(
                "config.frame: expected \"canonical\" or 9 scalars (r(0,0), r(1,0), r(0,1))".into(),
            ))
        }
    };
    Ok(SynthConfig {
        coefficients,
        window,
        frame,
    })
}
