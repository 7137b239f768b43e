//! Report documents and their stable JSON encoding.
//!
//! Every document carries the inputs and the configuration that produced it.
//! Floats are written with 17 significant digits in scientific notation, so
//! the text is a pure function of the values: equal inputs give identical
//! bytes, and parsing a document and writing it again reproduces it.

use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::bounds::{BoundsReport, FejerReport};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::integration::{Backend, BackendKind, IntegralResult, QuadratureConfig, Refinement};
use crate::simplex::{Simplex, SimplexDoc};

/// The settings a result depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub backend: BackendKind,
    pub requested_backend: Backend,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub mc_samples: usize,
    pub seed: u64,
    pub refinement: Refinement,
}

impl Provenance {
    pub fn new(backend: BackendKind, cfg: &QuadratureConfig) -> Self {
        Self {
            tool: concat!("hermite-simplex ", env!("CARGO_PKG_VERSION")).to_string(),
            backend,
            requested_backend: cfg.backend,
            abs_tol: cfg.abs_tol,
            rel_tol: cfg.rel_tol,
            max_depth: cfg.max_depth,
            mc_samples: cfg.mc_samples,
            seed: cfg.seed,
            refinement: cfg.refinement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsDocument {
    pub simplex: SimplexDoc,
    pub function: FunctionSpec,
    pub provenance: Provenance,
    pub report: BoundsReport,
}

impl BoundsDocument {
    pub fn new(simplex: &Simplex, function: &FunctionSpec, cfg: &QuadratureConfig, report: BoundsReport) -> Self {
        Self {
            simplex: simplex.to_doc(),
            function: function.clone(),
            provenance: Provenance::new(report.backend(), cfg),
            report,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerDocument {
    pub simplex: SimplexDoc,
    pub function: FunctionSpec,
    pub weight: FunctionSpec,
    pub provenance: Provenance,
    /// The `a` found by the no-uniform-constant search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    pub report: FejerReport,
}

impl FejerDocument {
    pub fn new(
        simplex: &Simplex,
        function: &FunctionSpec,
        weight: &FunctionSpec,
        cfg: &QuadratureConfig,
        report: FejerReport,
    ) -> Self {
        Self {
            simplex: simplex.to_doc(),
            function: function.clone(),
            weight: weight.clone(),
            provenance: Provenance::new(report.backend, cfg),
            a: None,
            constant: None,
            report,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralDocument {
    pub simplex: SimplexDoc,
    pub function: FunctionSpec,
    pub provenance: Provenance,
    /// Certified or three-sigma half-width of `result`.
    pub uncertainty: f64,
    pub result: IntegralResult,
}

impl IntegralDocument {
    pub fn new(simplex: &Simplex, function: &FunctionSpec, cfg: &QuadratureConfig, result: IntegralResult) -> Self {
        Self {
            simplex: simplex.to_doc(),
            function: function.clone(),
            provenance: Provenance::new(result.backend(), cfg),
            uncertainty: result.uncertainty(),
            result,
        }
    }
}

/// Pretty-printed JSON with every `f64` as `{:.16e}` (non-finite values
/// become `null`).
#[derive(Default)]
pub struct StableFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for StableFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes `value` with [`StableFormatter`], ending with a newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, StableFormatter::default());
    value.serialize(&mut ser).map_err(|e| Error::Serialization(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
}
