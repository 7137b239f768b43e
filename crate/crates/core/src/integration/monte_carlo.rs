//! Seeded Monte Carlo integration.
//!
//! Samples are drawn in fixed-size chunks, each from its own ChaCha stream,
//! and chunk statistics are merged in chunk order. The result is therefore
//! identical for any thread count.

use rayon::prelude::*;

use super::{IntegralKind, IntegralResult, QuadratureConfig};
use crate::error::Result;
use crate::function::{EvalContext, FunctionSpec};
use crate::sampling::{stream_rng, uniform_barycentric};
use crate::simplex::Simplex;

const CHUNK: usize = 4096;

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Self {
            count,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * w,
        }
    }
}

/// Estimates `int_T f` (or `int_T f g` when `g` is given) from
/// `cfg.mc_samples` uniform samples seeded by `cfg.seed`.
pub fn integrate_monte_carlo(
    simplex: &Simplex,
    f: &FunctionSpec,
    g: Option<&FunctionSpec>,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    cfg.validate()?;
    let fc = EvalContext::new(simplex, f)?;
    let gc = g.map(|g| EvalContext::new(simplex, g)).transpose()?;
    let n = cfg.mc_samples;
    let chunks = n.div_ceil(CHUNK);
    let arity = simplex.dim() + 1;

    let stats: Vec<Welford> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(cfg.seed, chunk as u64);
            let mut xi = vec![0.0; arity];
            let mut acc = Welford::default();
            let len = CHUNK.min(n - chunk * CHUNK);
            for _ in 0..len {
                uniform_barycentric(&mut rng, &mut xi);
                let mut v = fc.evaluate_coords(&xi)?;
                if let Some(gc) = &gc {
                    v *= gc.evaluate_coords(&xi)?;
                }
                acc.push(v);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let total = stats.into_iter().fold(Welford::default(), Welford::merge);

    let volume = simplex.volume();
    let variance = total.m2 / (total.count - 1) as f64;
    let per_eval = if g.is_some() { 2 } else { 1 };
    Ok(IntegralResult {
        value: volume * total.mean,
        kind: IntegralKind::MonteCarlo {
            stderr: volume * (variance / total.count as f64).sqrt(),
            samples: n,
            seed: cfg.seed,
        },
        evaluations: per_eval * n as u64,
        converged: true,
    })
}
