//! Parsing of simplex and function arguments.
//!
//! A simplex is a JSON file (`{"vertices": [[..], ..]}`) or a preset:
//! `unit:N` for the standard `N`-simplex, `interval:A,B` for `[A, B]`.
//!
//! A function is an inline shorthand, inline JSON, or a JSON file:
//!
//! | shorthand        | function                                   |
//! |------------------|--------------------------------------------|
//! | `pyramid:A,F`    | pyramid with apex value `A`, face value `F` |
//! | `indicator`      | 1 at the vertices, 0 elsewhere              |
//! | `const:C`        | the constant `C`                            |
//! | `clamped:A`      | clamped pyramid at level `A` in (0, 1), unit integral |
//! | `{..}` / `path`  | a `FunctionSpec` document                  |

use std::fs;
use std::path::Path;

use hermite_simplex::{ClampedPyramid, FunctionSpec, Pyramid, Simplex, SimplexDoc};

#[derive(Debug, Clone)]
pub struct SimplexArg(pub Simplex);

pub fn parse_simplex(arg: &str) -> Result<SimplexArg, String> {
    if let Some(dim) = arg.strip_prefix("unit:") {
        let dim: usize = dim.trim().parse().map_err(|_| format!("bad dimension in `{arg}`"))?;
        return Simplex::unit(dim).map(SimplexArg).map_err(|e| e.to_string());
    }
    if let Some(ends) = arg.strip_prefix("interval:") {
        let [a, b] = numbers::<2>(ends).ok_or_else(|| format!("expected interval:A,B, got `{arg}`"))?;
        return Simplex::interval(a, b).map(SimplexArg).map_err(|e| e.to_string());
    }
    let text = read(arg)?;
    let doc: SimplexDoc = serde_json::from_str(&text).map_err(|e| format!("{arg}: {e}"))?;
    Simplex::from_doc(doc).map(SimplexArg).map_err(|e| format!("{arg}: {e}"))
}

/// A function argument; `clamped:A` needs the simplex to be normalized.
#[derive(Debug, Clone)]
pub enum FunctionArg {
    Spec(FunctionSpec),
    Clamped(f64),
}

impl FunctionArg {
    pub fn resolve(&self, simplex: &Simplex) -> Result<FunctionSpec, String> {
        match self {
            FunctionArg::Spec(f) => Ok(f.clone()),
            FunctionArg::Clamped(a) => ClampedPyramid::normalized(simplex, *a)
                .map(FunctionSpec::ClampedPyramid)
                .map_err(|e| e.to_string()),
        }
    }
}

pub fn parse_function(arg: &str) -> Result<FunctionArg, String> {
    let arg = arg.trim();
    if arg == "indicator" {
        return Ok(FunctionArg::Spec(FunctionSpec::Indicator(hermite_simplex::VertexIndicator {
            value_at_vertices: 1.0,
            value_elsewhere: 0.0,
        })));
    }
    if let Some(rest) = arg.strip_prefix("pyramid:") {
        let [apex, face] = numbers::<2>(rest).ok_or_else(|| format!("expected pyramid:APEX,FACE, got `{arg}`"))?;
        return Ok(FunctionArg::Spec(FunctionSpec::Pyramid(Pyramid::new(apex, face))));
    }
    if let Some(rest) = arg.strip_prefix("const:") {
        let [c] = numbers::<1>(rest).ok_or_else(|| format!("expected const:C, got `{arg}`"))?;
        return Ok(FunctionArg::Spec(FunctionSpec::constant(c)));
    }
    if let Some(rest) = arg.strip_prefix("clamped:") {
        let [a] = numbers::<1>(rest).ok_or_else(|| format!("expected clamped:A, got `{arg}`"))?;
        if !(a > 0.0 && a < 1.0) {
            return Err(format!("clamped level must lie in (0, 1), got {a}"));
        }
        return Ok(FunctionArg::Clamped(a));
    }
    let text = if arg.starts_with('{') { arg.to_string() } else { read(arg)? };
    serde_json::from_str(&text).map(FunctionArg::Spec).map_err(|e| format!("function spec: {e}"))
}

pub fn parse_expression(arg: &str) -> Result<FunctionArg, String> {
    FunctionSpec::expression(arg).map(FunctionArg::Spec).map_err(|e| e.to_string())
}

#[derive(Debug, Clone)]
pub struct Dims(pub Vec<usize>);

/// Accepts `A..B` (inclusive), `A,B,C` or a single `A`.
pub fn parse_dims(arg: &str) -> Result<Dims, String> {
    let bad = || format!("expected dimensions like 1..5, 2,3 or 4, got `{arg}`");
    let dims: Vec<usize> = if let Some((a, b)) = arg.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        arg.split(',').map(|d| d.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if dims.is_empty() || dims.contains(&0) {
        return Err(bad());
    }
    Ok(Dims(dims))
}

fn numbers<const N: usize>(list: &str) -> Option<[f64; N]> {
    let values: Vec<f64> = list.split(',').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?;
    values.try_into().ok()
}

fn read(path: &str) -> Result<String, String> {
    if !Path::new(path).is_file() {
        return Err(format!("no such file: {path}"));
    }
    fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}
