//! Seeded random instances and the batch verifier built on them.
//!
//! Instance `i` of a corpus draws everything from stream `i` of the corpus
//! seed, so rows are reproducible one by one and independent of the thread
//! count.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{compute_lr, fejer_lr, make_sharpness_witness, BoundsReport, FejerReport, Verdict};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::integration::{BackendKind, QuadratureConfig};
use crate::polynomial::BaryPolynomial;
use crate::sampling::stream_rng;
use crate::simplex::{factorial, Simplex};

/// Header of the CSV produced by [`write_csv`] for [`CorpusRow`]s.
pub const CSV_HEADER: &str = "dim,instance,L,R,nR,slack,backend,verdict";

const FEJER_STREAM_OFFSET: u64 = 1 << 40;

/// A simplex with vertices uniform in `[-1, 1]^dim`, redrawn until its
/// volume is at least a thousandth of the unit simplex's.
pub fn random_simplex(rng: &mut ChaCha8Rng, dim: usize) -> Simplex {
    let floor = 1e-3 / factorial(dim);
    loop {
        let vertices = (0..=dim).map(|_| (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
        if let Ok(s) = Simplex::new(vertices) {
            if s.volume() >= floor {
                return s;
            }
        }
    }
}

/// `xi^T B B^T xi / arity + c . xi + c0` with standard normal `B` and
/// uniform `c`, `c0`; convex because `xi` is affine in `x`.
pub fn random_convex_quadratic(rng: &mut ChaCha8Rng, arity: usize) -> BaryPolynomial {
    let b: Vec<Vec<f64>> = (0..arity).map(|_| (0..arity).map(|_| rng.sample(StandardNormal)).collect()).collect();
    let mut terms = Vec::new();
    for i in 0..arity {
        for j in i..arity {
            let dot: f64 = b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum::<f64>() / arity as f64;
            let mut exps = vec![0; arity];
            exps[i] += 1;
            exps[j] += 1;
            terms.push((if i == j { dot } else { 2.0 * dot }, exps));
        }
    }
    for i in 0..arity {
        let mut exps = vec![0; arity];
        exps[i] = 1;
        terms.push((rng.random_range(-1.0..=1.0), exps));
    }
    terms.push((rng.random_range(-1.0..=1.0), vec![0; arity]));
    BaryPolynomial::from_terms(arity, terms).expect("finite coefficients of the right arity")
}

/// A cyclically symmetric weight: a random nonnegative combination of
/// monomials of degree at most 2, averaged over the cyclic group. It is
/// nonnegative on the simplex because every `xi_j` is.
pub fn random_symmetric_weight(rng: &mut ChaCha8Rng, arity: usize) -> BaryPolynomial {
    let mut terms = vec![(rng.random_range(0.0..1.0), vec![0; arity])];
    for i in 0..arity {
        for j in i..arity {
            let mut exps = vec![0; arity];
            exps[i] += 1;
            exps[j] += 1;
            terms.push((rng.random_range(0.0..1.0), exps));
        }
    }
    BaryPolynomial::from_terms(arity, terms).expect("finite coefficients of the right arity").symmetrized()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusConfig {
    /// Dimensions assigned to instances in round-robin order.
    pub dims: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    /// Append one equality-case row per dimension.
    pub include_witnesses: bool,
}

impl CorpusConfig {
    pub fn new(dims: Vec<usize>, count: usize, seed: u64) -> Self {
        Self { dims, count, seed, include_witnesses: false }
    }

    fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidParameter("corpus dimensions must be a nonempty list of positive integers".into()));
        }
        Ok(())
    }

    pub fn dim_of(&self, index: usize) -> usize {
        self.dims[index % self.dims.len()]
    }
}

/// Simplex and convex quadratic of instance `index`.
pub fn corpus_instance(cfg: &CorpusConfig, index: usize) -> (Simplex, FunctionSpec) {
    let dim = cfg.dim_of(index);
    let mut rng = stream_rng(cfg.seed, index as u64);
    let s = random_simplex(&mut rng, dim);
    let f = random_convex_quadratic(&mut rng, dim + 1);
    (s, FunctionSpec::Polynomial(f))
}

/// Simplex, symmetrized convex quadratic and symmetric weight of weighted
/// instance `index`.
pub fn fejer_instance(cfg: &CorpusConfig, index: usize) -> (Simplex, FunctionSpec, FunctionSpec) {
    let dim = cfg.dim_of(index);
    let mut rng = stream_rng(cfg.seed, FEJER_STREAM_OFFSET + index as u64);
    let s = random_simplex(&mut rng, dim);
    let f = random_convex_quadratic(&mut rng, dim + 1).symmetrized();
    let g = random_symmetric_weight(&mut rng, dim + 1);
    (s, FunctionSpec::Polynomial(f), FunctionSpec::Polynomial(g))
}

/// One line of the corpus CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub dim: usize,
    /// Instance index, or `witness` for equality-case rows.
    pub instance: String,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "nR")]
    pub n_r: f64,
    pub slack: f64,
    pub backend: BackendKind,
    pub verdict: Verdict,
}

impl CorpusRow {
    fn from_report(instance: String, report: &BoundsReport, verdict: Verdict) -> Self {
        Self {
            dim: report.n,
            instance,
            l: report.l,
            r: report.r,
            n_r: report.n_r,
            slack: report.slack,
            backend: report.backend(),
            verdict,
        }
    }
}

/// Checks `0 <= L <= nR` (and `L <= R` for intervals) on every instance,
/// plus the equality case per dimension when requested.
pub fn run_corpus(cfg: &CorpusConfig, quad: &QuadratureConfig) -> Result<Vec<CorpusRow>> {
    cfg.validate()?;
    let mut rows: Vec<CorpusRow> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let (s, f) = corpus_instance(cfg, i);
            let report = compute_lr(&s, &f, quad)?;
            let verdict = Verdict::from_bool(report.passes());
            Ok(CorpusRow::from_report(i.to_string(), &report, verdict))
        })
        .collect::<Result<_>>()?;
    if cfg.include_witnesses {
        let mut dims = cfg.dims.clone();
        dims.sort_unstable();
        dims.dedup();
        for dim in dims {
            let (_, report) = make_sharpness_witness(&Simplex::unit(dim)?);
            let tight = report.slack.abs() <= 1e-12 * report.l.abs().max(1.0);
            let verdict = Verdict::from_bool(report.passes() && tight);
            rows.push(CorpusRow::from_report("witness".into(), &report, verdict));
        }
    }
    Ok(rows)
}

/// Weighted verdicts on `cfg.count` weighted instances, in instance order.
pub fn run_fejer_corpus(cfg: &CorpusConfig, quad: &QuadratureConfig) -> Result<Vec<FejerReport>> {
    cfg.validate()?;
    (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let (s, f, g) = fejer_instance(cfg, i);
            fejer_lr(&s, &f, &g, quad)
        })
        .collect()
}

/// Writes rows with the [`CSV_HEADER`] header.
pub fn write_csv<W: std::io::Write>(rows: &[CorpusRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(',')).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))
}
