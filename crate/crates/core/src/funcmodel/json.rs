//! JSON form of FunctionSpec with path-annotated schema violations.

use serde_json::{json, Map, Value};

use super::{Concavity, Family, FunctionSpec, GridProfile, Polytope};
use crate::error::{Error, Result, Violation};

struct Ctx {
    violations: Vec<Violation>,
}

impl Ctx {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.violations.push(Violation { path: path.to_string(), message: message.into() });
    }

    fn number(&mut self, obj: &Map<String, Value>, base: &str, key: &str) -> Option<f64> {
        let path = format!("{base}/{key}");
        match obj.get(key) {
            None => {
                self.push(&path, "missing required field");
                None
            }
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Some(x),
                _ => {
                    self.push(&path, "expected a number");
                    None
                }
            },
        }
    }

    fn vector(&mut self, obj: &Map<String, Value>, base: &str, key: &str) -> Option<Vec<f64>> {
        let path = format!("{base}/{key}");
        match obj.get(key) {
            None => {
                self.push(&path, "missing required field");
                None
            }
            Some(v) => self.vector_value(v, &path),
        }
    }

    fn vector_value(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let Some(arr) = v.as_array() else {
            self.push(path, "expected an array of numbers");
            return None;
        };
        let mut out = Vec::with_capacity(arr.len());
        for (i, x) in arr.iter().enumerate() {
            match x.as_f64() {
                Some(x) if x.is_finite() => out.push(x),
                _ => {
                    self.push(&format!("{path}/{i}"), "expected a number");
                    return None;
                }
            }
        }
        Some(out)
    }

    fn only_fields(&mut self, obj: &Map<String, Value>, base: &str, allowed: &[&str]) {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                self.push(&format!("{base}/{k}"), "unknown field");
            }
        }
    }
}

pub fn parse_str(text: &str) -> Result<FunctionSpec> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        Error::Schema(vec![Violation { path: String::new(), message: format!("malformed JSON: {e}") }])
    })?;
    parse_value(&value)
}

pub fn parse_value(value: &Value) -> Result<FunctionSpec> {
    let mut ctx = Ctx { violations: Vec::new() };
    match parse_at(&mut ctx, value, "") {
        Some(spec) if ctx.violations.is_empty() => Ok(spec),
        _ => Err(Error::Schema(ctx.violations)),
    }
}

fn parse_at(ctx: &mut Ctx, value: &Value, base: &str) -> Option<FunctionSpec> {
    let Some(obj) = value.as_object() else {
        ctx.push(base, "expected an object");
        return None;
    };
    ctx.only_fields(obj, base, &["dimension", "class", "family"]);
    let dim_path = format!("{base}/dimension");
    let dimension = match obj.get("dimension") {
        None => {
            ctx.push(&dim_path, "missing required field");
            None
        }
        Some(v) => match v.as_u64() {
            Some(d) if (1..=3).contains(&d) => Some(d as usize),
            _ => {
                ctx.push(&dim_path, "expected an integer between 1 and 3");
                None
            }
        },
    };
    let class_path = format!("{base}/class");
    let class = match obj.get("class") {
        None => {
            ctx.push(&class_path, "missing required field");
            None
        }
        Some(Value::String(s)) if s == "log" => Some(Concavity::LogConcave),
        Some(Value::Object(m)) => {
            ctx.only_fields(m, &class_path, &["s"]);
            ctx.number(m, &class_path, "s").and_then(|s| {
                if s > 0.0 {
                    Some(Concavity::SConcave(s))
                } else {
                    ctx.push(&format!("{class_path}/s"), "must be positive");
                    None
                }
            })
        }
        Some(_) => {
            ctx.push(&class_path, "expected \"log\" or {\"s\": number}");
            None
        }
    };
    let fam_path = format!("{base}/family");
    let family = match obj.get("family") {
        None => {
            ctx.push(&fam_path, "missing required field");
            None
        }
        Some(v) => parse_family(ctx, v, &fam_path),
    };
    let (dimension, class, family) = (dimension?, class?, family?);
    match FunctionSpec::new(dimension, class, family) {
        Ok(spec) => Some(spec),
        Err(e) => {
            ctx.push(&fam_path, e.to_string());
            None
        }
    }
}

fn parse_family(ctx: &mut Ctx, value: &Value, base: &str) -> Option<Family> {
    let Some(obj) = value.as_object() else {
        ctx.push(base, "expected an object");
        return None;
    };
    let kind = match obj.get("kind").and_then(|k| k.as_str()) {
        Some(k) => k,
        None => {
            ctx.push(&format!("{base}/kind"), "missing or non-string kind");
            return None;
        }
    };
    match kind {
        "ball_indicator" => {
            ctx.only_fields(obj, base, &["kind", "center", "radius"]);
            let center = ctx.vector(obj, base, "center");
            let radius = ctx.number(obj, base, "radius");
            Some(Family::BallIndicator { center: center?, radius: radius? })
        }
        "polytope_indicator" => {
            ctx.only_fields(obj, base, &["kind", "vertices"]);
            let path = format!("{base}/vertices");
            let Some(arr) = obj.get("vertices").and_then(|v| v.as_array()) else {
                ctx.push(&path, "expected an array of vertices");
                return None;
            };
            let mut verts = Vec::new();
            for (i, v) in arr.iter().enumerate() {
                verts.push(ctx.vector_value(v, &format!("{path}/{i}"))?);
            }
            match Polytope::new(verts) {
                Some(p) => Some(Family::PolytopeIndicator(p)),
                None => {
                    ctx.push(&path, "vertices must span a full-dimensional hull (d <= 3)");
                    None
                }
            }
        }
        "hhat_power" => {
            ctx.only_fields(obj, base, &["kind", "s_exponent"]);
            Some(Family::HhatPower { s_exponent: ctx.number(obj, base, "s_exponent")? })
        }
        "gaussian" => {
            ctx.only_fields(obj, base, &["kind", "center", "sigma"]);
            let center = ctx.vector(obj, base, "center");
            let sigma = ctx.number(obj, base, "sigma");
            Some(Family::Gaussian { center: center?, sigma: sigma? })
        }
        "exp_neg_norm" => {
            ctx.only_fields(obj, base, &["kind", "scale"]);
            Some(Family::ExpNegNorm { scale: ctx.number(obj, base, "scale")? })
        }
        "grid_profile" => {
            ctx.only_fields(obj, base, &["kind", "origin", "spacing", "values"]);
            let origin = ctx.vector(obj, base, "origin")?;
            let spacing_path = format!("{base}/spacing");
            let spacing = match obj.get("spacing") {
                Some(Value::Number(n)) => vec![n.as_f64()?; origin.len()],
                Some(v) => ctx.vector_value(v, &spacing_path)?,
                None => {
                    ctx.push(&spacing_path, "missing required field");
                    return None;
                }
            };
            let values_path = format!("{base}/values");
            let Some(values) = obj.get("values") else {
                ctx.push(&values_path, "missing required field");
                return None;
            };
            let mut shape = Vec::new();
            let mut flat = Vec::new();
            flatten(ctx, values, &values_path, 0, &mut shape, &mut flat)?;
            match GridProfile::new(origin, spacing, shape, flat) {
                Ok(g) => Some(Family::GridProfile(g)),
                Err(e) => {
                    ctx.push(base, e);
                    None
                }
            }
        }
        "shifted" => {
            ctx.only_fields(obj, base, &["kind", "inner", "offset"]);
            let offset = ctx.vector(obj, base, "offset");
            let inner_path = format!("{base}/inner");
            let inner = match obj.get("inner") {
                Some(v) => parse_at(ctx, v, &inner_path),
                None => {
                    ctx.push(&inner_path, "missing required field");
                    None
                }
            };
            Some(Family::Shifted { inner: Box::new(inner?), offset: offset? })
        }
        "s_approx" => {
            ctx.only_fields(obj, base, &["kind", "inner", "s"]);
            let s = ctx.number(obj, base, "s");
            let inner_path = format!("{base}/inner");
            let inner = match obj.get("inner") {
                Some(v) => parse_at(ctx, v, &inner_path),
                None => {
                    ctx.push(&inner_path, "missing required field");
                    None
                }
            };
            Some(Family::SApprox { inner: Box::new(inner?), s: s? })
        }
        other => {
            ctx.push(&format!("{base}/kind"), format!("unknown family kind {other:?}"));
            None
        }
    }
}

/// Row-major flattening of a nested array, recording the shape.
fn flatten(
    ctx: &mut Ctx,
    v: &Value,
    path: &str,
    depth: usize,
    shape: &mut Vec<usize>,
    out: &mut Vec<f64>,
) -> Option<()> {
    match v {
        Value::Array(items) => {
            if shape.len() == depth {
                shape.push(items.len());
            } else if shape[depth] != items.len() {
                ctx.push(path, "ragged values array");
                return None;
            }
            for (i, item) in items.iter().enumerate() {
                flatten(ctx, item, &format!("{path}/{i}"), depth + 1, shape, out)?;
            }
            Some(())
        }
        Value::Number(n) if depth == shape.len() && depth > 0 => {
            out.push(n.as_f64()?);
            Some(())
        }
        _ => {
            ctx.push(path, "expected nested arrays of numbers");
            None
        }
    }
}

fn nest(values: &[f64], shape: &[usize]) -> Value {
    if shape.len() == 1 {
        return json!(values);
    }
    let stride: usize = shape[1..].iter().product();
    Value::Array(
        (0..shape[0])
            .map(|i| nest(&values[i * stride..(i + 1) * stride], &shape[1..]))
            .collect(),
    )
}

pub fn to_value(spec: &FunctionSpec) -> Value {
    let class = match spec.class {
        Concavity::SConcave(s) => json!({ "s": s }),
        Concavity::LogConcave => json!("log"),
    };
    let family = match &spec.family {
        Family::BallIndicator { center, radius } => {
            json!({"kind": "ball_indicator", "center": center, "radius": radius})
        }
        Family::PolytopeIndicator(p) => json!({"kind": "polytope_indicator", "vertices": p.vertices()}),
        Family::HhatPower { s_exponent } => json!({"kind": "hhat_power", "s_exponent": s_exponent}),
        Family::Gaussian { center, sigma } => {
            json!({"kind": "gaussian", "center": center, "sigma": sigma})
        }
        Family::ExpNegNorm { scale } => json!({"kind": "exp_neg_norm", "scale": scale}),
        Family::GridProfile(g) => json!({
            "kind": "grid_profile",
            "origin": g.origin(),
            "spacing": g.spacing(),
            "values": nest(g.values(), g.shape()),
        }),
        Family::Shifted { inner, offset } => {
            json!({"kind": "shifted", "inner": to_value(inner), "offset": offset})
        }
        Family::SApprox { inner, s } => json!({"kind": "s_approx", "inner": to_value(inner), "s": s}),
    };
    json!({"dimension": spec.dimension, "class": class, "family": family})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_hhat() {
        let s = parse_str(r#"{"dimension":1,"class":{"s":2},"family":{"kind":"hhat_power","s_exponent":2}}"#)
            .unwrap();
        assert_eq!(s.family(), &Family::HhatPower { s_exponent: 2.0 });
        assert_eq!(s.class(), Concavity::SConcave(2.0));
    }

    #[test]
    fn missing_dimension_reports_path() {
        let err = parse_str(r#"{"class":"log","family":{"kind":"gaussian","center":[0],"sigma":1}}"#)
            .unwrap_err();
        match err {
            Error::Schema(v) => assert!(v.iter().any(|v| v.path == "/dimension"), "{v:?}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn parses_gaussian_any_key_order() {
        let s = parse_str(r#"{"class":"log","family":{"kind":"gaussian","center":[0],"sigma":1},"dimension":1}"#)
            .unwrap();
        assert_eq!(s.family_name(), "gaussian");
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = parse_str(
            r#"{"dimension":1,"class":"log","family":{"kind":"exp_neg_norm","scale":1,"extra":2}}"#,
        )
        .unwrap_err();
        match err {
            Error::Schema(v) => assert_eq!(v[0].path, "/family/extra"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn round_trip() {
        let texts = [
            r#"{"dimension":2,"class":{"s":1},"family":{"kind":"polytope_indicator","vertices":[[0,0],[1,0],[0,1]]}}"#,
            r#"{"dimension":2,"class":"log","family":{"kind":"grid_profile","origin":[0,0],"spacing":[0.5,0.5],"values":[[1,2],[3,4]]}}"#,
            r#"{"dimension":1,"class":{"s":3},"family":{"kind":"s_approx","s":3,"inner":{"dimension":1,"class":"log","family":{"kind":"gaussian","center":[0.5],"sigma":2}}}}"#,
            r#"{"dimension":1,"class":{"s":1},"family":{"kind":"shifted","offset":[1],"inner":{"dimension":1,"class":{"s":1},"family":{"kind":"ball_indicator","center":[0],"radius":1}}}}"#,
        ];
        for t in texts {
            let s = parse_str(t).unwrap();
            let again = parse_value(&to_value(&s)).unwrap();
            assert_eq!(s, again);
        }
    }

    #[test]
    fn grid_nested_values_row_major() {
        let s = parse_str(r#"{"dimension":2,"class":{"s":1},"family":{"kind":"grid_profile","origin":[0,0],"spacing":1,"values":[[1,2,3],[4,5,6]]}}"#)
            .unwrap();
        // node (1, 2) is at x = (1, 2)
        assert!((s.evaluate(&[1.0, 2.0]).unwrap() - 6.0).abs() < 1e-12);
        assert!((s.evaluate(&[0.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
    }
}
