//! JSON interchange for tuples, pencils, combinations and decompositions.
//!
//! A tuple is `{"g", "n", "field", "matrices"}` where `matrices` is a list of
//! `n x n` matrices given as row lists; each entry is `[re]` or `[re, im]`
//! (a bare number is accepted as well). A pencil is `{"A": tuple}`.
//! Floats are written in shortest round-trip form.

use serde_json::{json, Map, Value};

use crate::dilation::Decomposition;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::oracles::{SearchReport, Witness};
use crate::pencil::LinearPencil;
use crate::tol::Tolerances;
use crate::tuples::{Field, MatrixConvexCombination, MatrixTuple};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn num(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| parse_err(format!("{what}: expected a number, got {v}")))
}

fn entry(v: &Value) -> Result<C64> {
    match v {
        Value::Number(_) => Ok(C64::new(num(v, "entry")?, 0.0)),
        Value::Array(a) => match a.as_slice() {
            [re] => Ok(C64::new(num(re, "entry")?, 0.0)),
            [re, im] => Ok(C64::new(num(re, "entry")?, num(im, "entry")?)),
            _ => Err(parse_err(format!("entry must be [re] or [re, im], got {v}"))),
        },
        _ => Err(parse_err(format!("entry must be [re] or [re, im], got {v}"))),
    }
}

/// Rectangular matrix from a list of rows.
pub fn matrix_from_value(v: &Value) -> Result<CMat> {
    let rows = v.as_array().ok_or_else(|| parse_err("matrix must be a list of rows"))?;
    let ncols = match rows.first() {
        Some(r) => r.as_array().ok_or_else(|| parse_err("matrix row must be a list"))?.len(),
        None => 0,
    };
    let mut m = CMat::zeros(rows.len(), ncols);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| parse_err("matrix row must be a list"))?;
        if r.len() != ncols {
            return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {ncols}", r.len())));
        }
        for (j, e) in r.iter().enumerate() {
            m[(i, j)] = entry(e)?;
        }
    }
    Ok(m)
}

pub fn matrix_to_value(m: &CMat, complex: bool) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| {
            let row: Vec<Value> = (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    if complex { json!([z.re, z.im]) } else { json!([z.re]) }
                })
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

fn matrix_is_complex(m: &CMat) -> bool {
    m.iter().any(|z| z.im != 0.0)
}

pub fn tuple_to_value(x: &MatrixTuple) -> Value {
    let complex = x.field() == Field::Complex;
    json!({
        "g": x.g(),
        "n": x.n(),
        "field": x.field(),
        "matrices": x.matrices().iter().map(|m| matrix_to_value(m, complex)).collect::<Vec<_>>(),
    })
}

/// Parses a tuple. `field` defaults to real unless some entry has a nonzero
/// imaginary part; `g` and `n` are checked when present and required for
/// the empty tuple.
pub fn tuple_from_value(v: &Value, tol: &Tolerances) -> Result<MatrixTuple> {
    let obj = v.as_object().ok_or_else(|| parse_err("tuple must be a JSON object"))?;
    let mats_v = obj
        .get("matrices")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("tuple needs a \"matrices\" list"))?;
    let mats = mats_v.iter().map(matrix_from_value).collect::<Result<Vec<_>>>()?;
    let usize_field = |key: &str| -> Result<Option<usize>> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(x) => x.as_u64().map(|u| Some(u as usize)).ok_or_else(|| parse_err(format!("\"{key}\" must be a nonnegative integer"))),
        }
    };
    let g = usize_field("g")?;
    let n = usize_field("n")?;
    if let Some(g) = g {
        if g != mats.len() {
            return Err(Error::DimensionMismatch(format!("\"g\" is {g} but {} matrices were given", mats.len())));
        }
    }
    let n = match (n, mats.first()) {
        (Some(n), _) => n,
        (None, Some(m)) => m.nrows(),
        (None, None) => return Err(parse_err("empty tuple needs \"n\"")),
    };
    for (j, m) in mats.iter().enumerate() {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!("matrix {j} is {}x{}, not square", m.nrows(), m.ncols())));
        }
    }
    let field = match obj.get("field") {
        None | Some(Value::Null) => {
            if mats.iter().any(matrix_is_complex) { Field::Complex } else { Field::Real }
        }
        Some(f) => serde_json::from_value(f.clone()).map_err(|_| parse_err(format!("unknown field {f}")))?,
    };
    if mats.is_empty() {
        return Err(Error::DimensionMismatch("tuple needs g >= 1 matrices".into()));
    }
    MatrixTuple::with_tolerance(field, n, mats, tol)
}

pub fn parse_tuple(s: &str, tol: &Tolerances) -> Result<MatrixTuple> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))?;
    tuple_from_value(&v, tol)
}

pub fn pencil_to_value(p: &LinearPencil) -> Value {
    json!({ "A": tuple_to_value(p.coefficients()) })
}

/// Accepts `{"A": tuple}` or a bare tuple.
pub fn pencil_from_value(v: &Value, tol: &Tolerances) -> Result<LinearPencil> {
    let t = v.get("A").unwrap_or(v);
    LinearPencil::new(tuple_from_value(t, tol)?)
}

pub fn parse_pencil(s: &str, tol: &Tolerances) -> Result<LinearPencil> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))?;
    pencil_from_value(&v, tol)
}

/// `{"n", "terms": [{"gamma", "point"}]}`.
pub fn combination_to_value(comb: &MatrixConvexCombination) -> Value {
    let terms: Vec<Value> = comb
        .terms()
        .iter()
        .map(|(gm, p)| json!({ "gamma": matrix_to_value(gm, matrix_is_complex(gm)), "point": tuple_to_value(p) }))
        .collect();
    json!({ "n": comb.target_dim(), "terms": terms })
}

pub fn combination_from_value(v: &Value, tol: &Tolerances) -> Result<MatrixConvexCombination> {
    let terms_v = v.get("terms").and_then(Value::as_array).ok_or_else(|| parse_err("combination needs \"terms\""))?;
    let mut terms = Vec::with_capacity(terms_v.len());
    for t in terms_v {
        let gm = matrix_from_value(t.get("gamma").ok_or_else(|| parse_err("term needs \"gamma\""))?)?;
        let p = tuple_from_value(t.get("point").ok_or_else(|| parse_err("term needs \"point\""))?, tol)?;
        terms.push((gm, p));
    }
    let n = match v.get("n").and_then(Value::as_u64) {
        Some(n) => n as usize,
        None => terms.first().map(|(gm, _)| gm.ncols()).ok_or_else(|| parse_err("empty combination needs \"n\""))?,
    };
    MatrixConvexCombination::new(terms, n)
}

pub fn decomposition_to_value(d: &Decomposition) -> Value {
    let mut m = Map::new();
    m.insert("summands".into(), d.summands.iter().map(tuple_to_value).collect());
    m.insert("gammas".into(), d.gammas.iter().map(|gm| matrix_to_value(gm, matrix_is_complex(gm))).collect());
    m.insert("sizes".into(), d.summands.iter().map(|s| s.n()).collect());
    m.insert("total_size".into(), d.total_size.into());
    m.insert("steps".into(), d.steps.into());
    m.insert("subspace_dims".into(), d.subspace_dims().into());
    m.insert("dilations".into(), serde_json::to_value(&d.dilation_trace).unwrap_or(Value::Null));
    m.insert("residual".into(), json!(d.residual));
    Value::Object(m)
}

/// `{"found", "label", "trials", "best_violation", "witness"}`; `label` is
/// `"evidence"` when nothing was found.
pub fn search_report_to_value(r: &SearchReport) -> Value {
    let witness = match &r.witness {
        None => Value::Null,
        Some(Witness::Dilation { beta, psi, point }) => json!({
            "kind": "dilation",
            "beta": beta.iter().map(|b| matrix_to_value(b, matrix_is_complex(b))).collect::<Vec<_>>(),
            "psi": psi,
            "point": tuple_to_value(point),
        }),
        Some(Witness::Combination(comb)) => json!({ "kind": "combination", "combination": combination_to_value(comb) }),
    };
    json!({
        "found": r.found,
        "label": if r.found { "witness" } else { "evidence" },
        "trials": r.trials,
        "best_violation": r.best_violation,
        "witness": witness,
    })
}
