//! Resolution of `--set` and `--point` arguments.

use std::path::Path;

use freespec::examples::{parse_named, pauli_pair, NamedSpectrahedron};
use freespec::json::{pencil_from_value, tuple_from_value};
use freespec::random::{self, Placement};
use freespec::{LinearPencil, MatrixTuple, Tolerances};
use serde_json::Value;

use crate::Failure;

pub struct SetSource {
    pub name: String,
    pub pencil: LinearPencil,
    pub named: Option<NamedSpectrahedron>,
}

pub fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: invalid JSON: {e}", path.display())))
}

pub fn resolve_set(arg: Option<&str>, tol: &Tolerances) -> Result<SetSource, Failure> {
    let arg = arg.ok_or_else(|| Failure::Usage("--set is required".into()))?;
    let path = Path::new(arg);
    if path.is_file() {
        let pencil = pencil_from_value(&read_json(path)?, tol)?;
        return Ok(SetSource { name: arg.to_string(), pencil, named: None });
    }
    let named = parse_named(arg).map_err(|e| Failure::Usage(format!("--set {arg}: {e}")))?;
    Ok(SetSource { name: named.name.clone(), pencil: named.pencil.clone(), named: Some(named) })
}

/// Points named by `--point`; a file holding a JSON array is a batch.
pub struct PointSource {
    pub points: Vec<MatrixTuple>,
    pub batch: bool,
}

fn level(arg: &str, s: &str) -> Result<usize, Failure> {
    s.parse().map_err(|_| Failure::Usage(format!("--point {arg}: expected a level after ':'")))
}

pub fn resolve_points(
    arg: Option<&str>,
    set: Option<&SetSource>,
    seed: u64,
    count: usize,
    tol: &Tolerances,
) -> Result<PointSource, Failure> {
    let arg = arg.ok_or_else(|| Failure::Usage("--point is required".into()))?;
    let path = Path::new(arg);
    if path.is_file() {
        return match read_json(path)? {
            Value::Array(items) => Ok(PointSource {
                points: items.iter().map(|v| tuple_from_value(v, tol)).collect::<Result<_, _>>()?,
                batch: true,
            }),
            v => Ok(PointSource { points: vec![tuple_from_value(&v, tol)?], batch: false }),
        };
    }
    let need_set = || set.ok_or_else(|| Failure::Usage(format!("--point {arg} needs --set")));
    let (kind, rest) = arg.split_once(':').unwrap_or((arg, ""));
    let points = match kind {
        "pauli" if rest.is_empty() => vec![pauli_pair(); count],
        "zero" => {
            let s = need_set()?;
            vec![MatrixTuple::zeros(s.pencil.field(), s.pencil.g(), level(arg, rest)?); count]
        }
        "random" | "boundary" | "interior" => {
            let s = need_set()?;
            let n = level(arg, rest)?;
            if n == 0 {
                return Err(Failure::Usage("random points need level n >= 1".into()));
            }
            if !s.pencil.is_bounded_level1() {
                return Err(Failure::Lib(freespec::Error::UnboundedDomain));
            }
            let place = match kind {
                "boundary" => Placement::Boundary,
                "interior" => Placement::Interior,
                _ => Placement::Mixed,
            };
            (0..count)
                .map(|i| {
                    let mut rng = random::rng(random::derive_seed(seed, i as u64));
                    random::point(&mut rng, &s.pencil, n, s.pencil.field(), place)
                })
                .collect()
        }
        _ => return Err(Failure::Usage(format!("--point {arg}: not a file or a known point (pauli, zero:n, random:n, boundary:n, interior:n)"))),
    };
    Ok(PointSource { points, batch: count > 1 })
}
