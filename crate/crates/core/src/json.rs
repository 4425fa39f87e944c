//! JSON encodings of supernumbers, points, functions, superfields and dual maps.
//!
//! Scalars are written as decimal or `p/q` strings; numbers are accepted on input.

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::characterize::DualMap;
use crate::error::{Error, Result};
use crate::fixtures::{Fixture, Subject};
use crate::gindex::{GIndex, OddMulti, Sign};
use crate::scalar::{Exact, Scalar};
use crate::smoothfn::{AnalyticKind, AnalyticMap, PolyMap, SmoothMap, SupernumberValuedMap};
use crate::superfield::Superfield;
use crate::superspace::SuperPoint;
use crate::supernumber::{Skeleton, Supernumber};

fn parse_err(what: &str, detail: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{what}: {detail}"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| parse_err(what, format!("missing field \"{key}\"")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| parse_err(what, "expected an object"))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(what, "expected an array"))
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| parse_err(what, "expected a non-negative integer"))
}

fn scalar_text(v: Option<&Value>, what: &str) -> Result<String> {
    match v {
        None | Some(Value::Null) => Ok("0".into()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        Some(other) => Err(parse_err(what, format!("expected a number or string, got {other}"))),
    }
}

fn parse_scalar<S: Scalar>(obj: &Map<String, Value>, what: &str) -> Result<S> {
    S::parse(&scalar_text(obj.get("re"), what)?, &scalar_text(obj.get("im"), what)?)
}

fn scalar_fields<S: Scalar>(c: &S) -> (String, String) {
    c.format()
}

fn gens_of(v: &Value, what: &str) -> Result<GIndex> {
    let (sign, blade) = signed_gens_of(v, what)?;
    if sign.is_minus() {
        return Err(parse_err(what, format!("generators must be listed in increasing order, got {v}")));
    }
    Ok(blade)
}

/// A product `σ_{g_1}σ_{g_2}⋯` in any order, as a sign and a canonical blade.
fn signed_gens_of(v: &Value, what: &str) -> Result<(Sign, GIndex)> {
    let mut gens = as_array(v, what)?
        .iter()
        .map(|g| as_u64(g, what).map(|g| g as u32))
        .collect::<Result<Vec<_>>>()?;
    let inversions = gens.iter().enumerate().map(|(k, a)| gens[k + 1..].iter().filter(|b| *b < a).count()).sum::<usize>();
    gens.sort_unstable();
    if gens.windows(2).any(|w| w[0] == w[1]) {
        return Err(parse_err(what, format!("generator repeated in {v}")));
    }
    Ok((Sign::from_parity(inversions % 2 == 1), GIndex::from_gens(&gens)?))
}

fn skeleton_of(obj: &Map<String, Value>, default: Option<Skeleton>, what: &str) -> Result<Skeleton> {
    match (obj.get("L"), default) {
        (Some(l), _) => {
            let l = as_u64(l, what)? as u32;
            let d = match obj.get("D") {
                Some(d) => as_u64(d, what)? as u32,
                None => l,
            };
            Skeleton::new(l, d)
        }
        (None, Some(sk)) => Ok(sk),
        (None, None) => Err(parse_err(what, "missing field \"L\"")),
    }
}

impl<S: Scalar> Serialize for Supernumber<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        struct Terms<'a, S>(&'a Supernumber<S>);
        struct Term<'a, S>(GIndex, &'a S);
        impl<S: Scalar> Serialize for Term<'_, S> {
            fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
                let (re, im) = scalar_fields(self.1);
                let mut st = s.serialize_struct("Term", 3)?;
                st.serialize_field("gens", &self.0)?;
                st.serialize_field("re", &re)?;
                st.serialize_field("im", &im)?;
                st.end()
            }
        }
        impl<S: Scalar> Serialize for Terms<'_, S> {
            fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
                s.collect_seq(self.0.terms().map(|(i, c)| Term(*i, c)))
            }
        }
        let sk = self.skeleton();
        let mut st = s.serialize_struct("Supernumber", 3)?;
        st.serialize_field("L", &sk.l())?;
        st.serialize_field("D", &sk.d())?;
        st.serialize_field("terms", &Terms(self))?;
        st.end()
    }
}

impl<S: Scalar> Serialize for SuperPoint<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let sk = self.skeleton();
        let mut st = s.serialize_map(Some(6))?;
        st.serialize_entry("m", &self.m())?;
        st.serialize_entry("n", &self.n())?;
        st.serialize_entry("L", &sk.l())?;
        st.serialize_entry("D", &sk.d())?;
        st.serialize_entry("even", self.even())?;
        st.serialize_entry("odd", self.odd())?;
        st.end()
    }
}

/// `{"L": 2, "D": 2, "terms": [{"gens": [1, 2], "re": "3", "im": "0"}]}`.
/// `L` and `D` may be omitted when `default` supplies a skeleton.
pub fn supernumber_from_value<S: Scalar>(v: &Value, default: Option<Skeleton>) -> Result<Supernumber<S>> {
    let what = "supernumber";
    if v.is_number() || v.is_string() {
        let sk = default.ok_or_else(|| parse_err(what, "a bare scalar needs a known skeleton"))?;
        let c = S::parse(&scalar_text(Some(v), what)?, "0")?;
        return Ok(Supernumber::scalar(sk, c));
    }
    let obj = as_object(v, what)?;
    let sk = skeleton_of(obj, default, what)?;
    let mut terms = Vec::new();
    for t in as_array(field(obj, "terms", what)?, what)? {
        let t = as_object(t, "term")?;
        let (sign, gens) = signed_gens_of(field(t, "gens", "term")?, "term")?;
        terms.push((gens, sign.apply(parse_scalar::<S>(t, "term")?)));
    }
    let out = Supernumber::from_terms(sk, terms.iter().cloned())?;
    for (i, _) in &terms {
        if !sk.admits(*i) {
            return Err(Error::Skeleton(format!("blade {i} does not fit skeleton {sk}")));
        }
    }
    Ok(out)
}

pub fn supernumber_to_value<S: Scalar>(x: &Supernumber<S>) -> Value {
    serde_json::to_value(x).expect("supernumbers serialize")
}

/// `{"m": 1, "n": 1, "L": 3, "D": 3, "even": [...], "odd": [...]}`.
pub fn point_from_value<S: Scalar>(v: &Value) -> Result<SuperPoint<S>> {
    let what = "point";
    let obj = as_object(v, what)?;
    let sk = skeleton_of(obj, None, what)?;
    let slots = |key: &str| -> Result<Vec<Supernumber<S>>> {
        match obj.get(key) {
            None => Ok(Vec::new()),
            Some(arr) => as_array(arr, what)?
                .iter()
                .map(|x| supernumber_from_value(x, Some(sk)))
                .collect(),
        }
    };
    let even = slots("even")?;
    let odd = slots("odd")?;
    for (key, got) in [("m", even.len()), ("n", odd.len())] {
        if let Some(want) = obj.get(key) {
            if as_u64(want, what)? as usize != got {
                return Err(parse_err(what, format!("\"{key}\" is {want} but {got} slots were given")));
            }
        }
    }
    SuperPoint::new(sk, even, odd)
}

pub fn point_to_value<S: Scalar>(x: &SuperPoint<S>) -> Value {
    serde_json::to_value(x).expect("points serialize")
}

fn exact_of(v: Option<&Value>, what: &str) -> Result<Exact> {
    match v {
        Some(Value::Object(o)) => parse_scalar::<Exact>(o, what),
        other => Exact::parse(&scalar_text(other, what)?, "0"),
    }
}

fn exact_to_value(c: &Exact) -> Value {
    let (re, im) = c.format();
    if im == "0" {
        Value::String(re)
    } else {
        json!({"re": re, "im": im})
    }
}

/// Smooth function descriptions:
/// `{"kind": "poly", "arity": 1, "terms": [{"exps": [3], "re": "1"}]}` or
/// `{"kind": "analytic", "fn": "exp", "coeffs": ["1"], "offset": "0"}`.
/// `"exp-affine"` is accepted as an alias of an `exp` analytic map.
pub fn smooth_from_value(v: &Value) -> Result<SmoothMap> {
    let what = "function";
    let obj = as_object(v, what)?;
    let kind = field(obj, "kind", what)?.as_str().ok_or_else(|| parse_err(what, "\"kind\" must be a string"))?;
    match kind {
        "poly" => {
            let arity = as_u64(field(obj, "arity", what)?, what)? as usize;
            let mut terms = Vec::new();
            for t in as_array(field(obj, "terms", what)?, what)? {
                let t = as_object(t, "monomial")?;
                let exps = as_array(field(t, "exps", "monomial")?, "monomial")?
                    .iter()
                    .map(|e| as_u64(e, "monomial").map(|e| e as u32))
                    .collect::<Result<Vec<_>>>()?;
                terms.push((exps, parse_scalar::<Exact>(t, "monomial")?));
            }
            Ok(SmoothMap::Poly(PolyMap::from_terms(arity, terms)?))
        }
        "analytic" | "exp-affine" => {
            let name = match obj.get("fn") {
                Some(Value::String(s)) => s.as_str(),
                None if kind == "exp-affine" => "exp",
                _ => return Err(parse_err(what, "missing function name \"fn\"")),
            };
            let k = AnalyticKind::from_name(name).ok_or_else(|| parse_err(what, format!("unknown function \"{name}\"")))?;
            let coeffs = as_array(field(obj, "coeffs", what)?, what)?
                .iter()
                .map(|c| exact_of(Some(c), what))
                .collect::<Result<Vec<_>>>()?;
            let mut f = AnalyticMap::new(k, coeffs, exact_of(obj.get("offset"), what)?);
            if let Some(s) = obj.get("scale") {
                f.scale = exact_of(Some(s), what)?;
            }
            if let Some(o) = obj.get("order") {
                f.order = as_u64(o, what)? as u32;
            }
            Ok(SmoothMap::Analytic(f))
        }
        other => Err(parse_err(what, format!("unknown kind \"{other}\""))),
    }
}

pub fn smooth_to_value(f: &SmoothMap) -> Result<Value> {
    match f {
        SmoothMap::Poly(p) => {
            let terms: Vec<Value> = p
                .terms()
                .map(|(e, c)| {
                    let (re, im) = c.format();
                    json!({"exps": e, "re": re, "im": im})
                })
                .collect();
            Ok(json!({"kind": "poly", "arity": p.arity(), "terms": terms}))
        }
        SmoothMap::Analytic(a) => Ok(json!({
            "kind": "analytic",
            "fn": a.kind.name(),
            "coeffs": a.coeffs.iter().map(exact_to_value).collect::<Vec<_>>(),
            "offset": exact_to_value(&a.offset),
            "order": a.order,
            "scale": exact_to_value(&a.scale),
        })),
        SmoothMap::Custom(_) => Err(Error::Parse("user-supplied functions have no JSON form".into())),
    }
}

/// Either a scalar function description or
/// `{"kind": "supernumber-valued", "arity": 1, "components": [{"gens": [1], "fn": {...}}]}`.
pub fn valued_from_value(v: &Value) -> Result<SupernumberValuedMap> {
    let what = "supernumber-valued function";
    let obj = as_object(v, what)?;
    if obj.get("kind").and_then(Value::as_str) != Some("supernumber-valued") {
        return Ok(SupernumberValuedMap::scalar(smooth_from_value(v)?));
    }
    let arity = as_u64(field(obj, "arity", what)?, what)? as usize;
    let mut comps = Vec::new();
    for c in as_array(field(obj, "components", what)?, what)? {
        let c = as_object(c, "component")?;
        comps.push((gens_of(field(c, "gens", "component")?, "component")?, smooth_from_value(field(c, "fn", "component")?)?));
    }
    Ok(SupernumberValuedMap::new(arity, comps)?)
}

pub fn valued_to_value(f: &SupernumberValuedMap) -> Result<Value> {
    let comps: Vec<(&GIndex, &SmoothMap)> = f.components().collect();
    if comps.len() == 1 && comps[0].0.is_empty() {
        return smooth_to_value(comps[0].1);
    }
    let comps = comps
        .into_iter()
        .map(|(i, g)| Ok(json!({"gens": i, "fn": smooth_to_value(g)?})))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({"kind": "supernumber-valued", "arity": f.arity(), "components": comps}))
}

/// `{"m": 1, "n": 2, "coeffs": [{"a": [1, 1], "fn": {...}}]}`.
pub fn superfield_from_value(v: &Value) -> Result<Superfield> {
    let what = "superfield";
    let obj = as_object(v, what)?;
    let m = as_u64(field(obj, "m", what)?, what)? as usize;
    let n = as_u64(field(obj, "n", what)?, what)? as usize;
    let mut coeffs = Vec::new();
    for c in as_array(field(obj, "coeffs", what)?, what)? {
        let c = as_object(c, "coefficient")?;
        let a: OddMulti = serde_json::from_value(field(c, "a", "coefficient")?.clone())
            .map_err(|e| parse_err("coefficient", e))?;
        coeffs.push((a, valued_from_value(field(c, "fn", "coefficient")?)?));
    }
    Superfield::new(m, n, coeffs)
}

pub fn superfield_to_value(u: &Superfield) -> Result<Value> {
    let coeffs = u
        .coeffs()
        .map(|(a, f)| Ok(json!({"a": a, "fn": valued_to_value(f)?})))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({"m": u.m(), "n": u.n(), "coeffs": coeffs}))
}

/// A superfield (optionally tagged `"kind": "superfield"`) or
/// `{"kind": "blackbox", "name": "body-coordinate", ...}`.
pub fn subject_from_value(v: &Value) -> Result<Subject> {
    let obj = as_object(v, "function")?;
    match obj.get("kind").and_then(Value::as_str) {
        Some("blackbox") => {
            let mut inner = obj.clone();
            inner.remove("kind");
            let defaults = match inner.get("name").and_then(Value::as_str) {
                Some("body-coordinate") => Some(Fixture::body_coordinate()),
                Some("soul-killing") => Some(Fixture::soul_killing()),
                Some("coordinate-swap") => Some(Fixture::coordinate_swap()),
                Some("projectable-probe") => Some(Fixture::projectable_probe()),
                _ => None,
            };
            if let Some(d) = defaults {
                if let Value::Object(base) = serde_json::to_value(d).expect("fixtures serialize") {
                    for (k, val) in base {
                        inner.entry(k).or_insert(val);
                    }
                }
            }
            let f: Fixture = serde_json::from_value(Value::Object(inner)).map_err(|e| parse_err("blackbox", e))?;
            f.validate()?;
            Ok(Subject::Fixture(f))
        }
        Some("superfield") | None => Ok(Subject::Superfield(superfield_from_value(v)?)),
        Some(other) => Err(parse_err("function", format!("unknown kind \"{other}\""))),
    }
}

/// `{"kind": "right-multiply", "u": supernumber}`,
/// `{"kind": "basis-table", "images": [{"blade": [1], "value": supernumber}]}` or
/// `{"kind": "masuda"}`.
pub fn dual_map_from_value(v: &Value, sk: Skeleton) -> Result<DualMap> {
    let what = "dual map";
    let obj = as_object(v, what)?;
    match field(obj, "kind", what)?.as_str() {
        Some("right-multiply") => Ok(DualMap::RightMultiply(supernumber_from_value(field(obj, "u", what)?, Some(sk))?)),
        Some("basis-table") => {
            let mut images = BTreeMap::new();
            for e in as_array(field(obj, "images", what)?, what)? {
                let e = as_object(e, "image")?;
                let blade = gens_of(field(e, "blade", "image")?, "image")?;
                if blade.is_even() {
                    return Err(parse_err("image", format!("blade {blade} is not odd")));
                }
                images.insert(blade, supernumber_from_value(field(e, "value", "image")?, Some(sk))?);
            }
            Ok(DualMap::BasisTable(images))
        }
        Some("masuda") => Ok(DualMap::masuda()),
        _ => Err(parse_err(what, "\"kind\" must be right-multiply, basis-table or masuda")),
    }
}

/// Parses JSON text, reporting line and column on failure.
pub fn parse_text(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("{what}: line {}, column {}: {e}", e.line(), e.column())))
}

/// Deterministic pretty JSON.
pub fn to_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}
