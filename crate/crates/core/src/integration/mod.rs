//! Integration over a simplex.
//!
//! Three backends are provided:
//!
//! * [`exact`]: closed forms for barycentric polynomials, pyramids and
//!   functions of the minimum barycentric coordinate, plus products of these.
//! * [`bracket`]: a certified enclosure for convex integrands, refining the
//!   two-sided mean-value bound cell by cell.
//! * [`monte_carlo`]: seeded uniform sampling, used for everything else.
//!
//! [`integrate`] and [`integrate_product`] pick the tightest applicable one
//! unless [`QuadratureConfig::backend`] says otherwise.

pub mod bracket;
pub mod exact;
pub mod monte_carlo;
pub mod radial;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::simplex::Simplex;

pub use bracket::{integrate_bracketed, integrate_bracketed_observed, RefinementStep};
pub use exact::{
    exact_integral, exact_product_integral, integrate_monomial, integrate_monomial_capped, integrate_polynomial,
    integrate_pyramid, DEFAULT_DEGREE_CAP,
};
pub use monte_carlo::integrate_monte_carlo;

/// How an [`IntegralResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IntegralKind {
    Exact,
    /// Certified enclosure `lo <= integral <= hi`.
    Bracket { lo: f64, hi: f64 },
    MonteCarlo { stderr: f64, samples: usize, seed: u64 },
}

/// A raw (not volume-normalized) integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub kind: IntegralKind,
    pub evaluations: u64,
    /// False when a bracket stopped at `max_depth` or `max_cells` before
    /// reaching the requested tolerance.
    pub converged: bool,
}

impl IntegralResult {
    pub fn exact(value: f64) -> Self {
        Self { value, kind: IntegralKind::Exact, evaluations: 0, converged: true }
    }

    /// Certified (bracket) or statistical (three standard errors) half-width.
    pub fn uncertainty(&self) -> f64 {
        match self.kind {
            IntegralKind::Exact => 0.0,
            IntegralKind::Bracket { lo, hi } => 0.5 * (hi - lo),
            IntegralKind::MonteCarlo { stderr, .. } => 3.0 * stderr,
        }
    }

    pub fn backend(&self) -> BackendKind {
        match self.kind {
            IntegralKind::Exact => BackendKind::Exact,
            IntegralKind::Bracket { .. } => BackendKind::Bracket,
            IntegralKind::MonteCarlo { .. } => BackendKind::MonteCarlo,
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.value *= factor;
        self.kind = match self.kind {
            IntegralKind::Exact => IntegralKind::Exact,
            IntegralKind::Bracket { lo, hi } => {
                let (a, b) = (lo * factor, hi * factor);
                IntegralKind::Bracket { lo: a.min(b), hi: a.max(b) }
            }
            IntegralKind::MonteCarlo { stderr, samples, seed } => {
                IntegralKind::MonteCarlo { stderr: stderr * factor.abs(), samples, seed }
            }
        };
        self
    }
}

/// The backend that produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Exact,
    Bracket,
    MonteCarlo,
}

impl BackendKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::Exact => "exact",
            BackendKind::Bracket => "bracket",
            BackendKind::MonteCarlo => "monte_carlo",
        }
    }

    /// The weaker of two backends, for reports that combine several integrals.
    pub fn weakest(self, other: Self) -> Self {
        fn rank(b: BackendKind) -> u8 {
            match b {
                BackendKind::Exact => 0,
                BackendKind::Bracket => 1,
                BackendKind::MonteCarlo => 2,
            }
        }
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

/// Backend selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Exact, then bracketed, then Monte Carlo.
    #[default]
    Auto,
    Exact,
    Bracket,
    MonteCarlo,
}

/// Cell splitting rule for the bracketing integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    /// Bisect the longest edge (two children, diameters shrink).
    #[default]
    LongestEdge,
    /// Star the cell from its barycenter (`n + 1` children).
    Barycentric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub mc_samples: usize,
    pub seed: u64,
    pub backend: Backend,
    pub refinement: Refinement,
    /// Upper bound on live bracket cells.
    pub max_cells: usize,
    /// Largest total degree accepted by the exact monomial rule.
    pub degree_cap: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_depth: 40,
            mc_samples: 100_000,
            seed: 0,
            backend: Backend::Auto,
            refinement: Refinement::LongestEdge,
            max_cells: 1 << 22,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

impl QuadratureConfig {
    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.mc_samples = samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.abs_tol) || !finite_nonneg(self.rel_tol) || self.abs_tol + self.rel_tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be nonnegative and not both zero (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.mc_samples < 2 {
            return Err(Error::InvalidConfig("mc_samples must be at least 2".into()));
        }
        if self.max_cells == 0 {
            return Err(Error::InvalidConfig("max_cells must be positive".into()));
        }
        Ok(())
    }
}

/// Integrates `f` over `simplex` with the configured backend.
pub fn integrate(simplex: &Simplex, f: &FunctionSpec, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    f.validate(simplex.dim())?;
    match cfg.backend {
        Backend::Exact => exact_integral(simplex, f, cfg.degree_cap),
        Backend::Bracket => integrate_bracketed(simplex, f, cfg),
        Backend::MonteCarlo => integrate_monte_carlo(simplex, f, None, cfg),
        Backend::Auto => match exact_integral(simplex, f, cfg.degree_cap) {
            Ok(r) => Ok(r),
            Err(Error::NotExact(_)) => match integrate_bracketed(simplex, f, cfg) {
                Err(Error::ConvexityViolationDetected { .. }) => integrate_monte_carlo(simplex, f, None, cfg),
                other => other,
            },
            Err(e) => Err(e),
        },
    }
}

/// Integrates `f * g` over `simplex`. The bracketing backend does not apply
/// to products.
pub fn integrate_product(
    simplex: &Simplex,
    f: &FunctionSpec,
    g: &FunctionSpec,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    cfg.validate()?;
    f.validate(simplex.dim())?;
    g.validate(simplex.dim())?;
    match cfg.backend {
        Backend::Exact => exact_product_integral(simplex, &[f, g], cfg.degree_cap),
        Backend::MonteCarlo => integrate_monte_carlo(simplex, f, Some(g), cfg),
        Backend::Bracket => {
            Err(Error::InvalidConfig("the bracketing backend needs a single convex integrand".into()))
        }
        Backend::Auto => match exact_product_integral(simplex, &[f, g], cfg.degree_cap) {
            Err(Error::NotExact(_)) => integrate_monte_carlo(simplex, f, Some(g), cfg),
            other => other,
        },
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Pyramid;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e-16, 1e-16, -1.0].into_iter().collect();
        assert_eq!(s.value(), 2e-16);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let bad = QuadratureConfig { abs_tol: 0.0, rel_tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig { abs_tol: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(QuadratureConfig::default().with_samples(1).validate().is_err());
    }

    #[test]
    fn auto_prefers_exact_then_bracket_then_mc() {
        let s = Simplex::unit(2).unwrap();
        let cfg = QuadratureConfig::default();
        let pyr = FunctionSpec::Pyramid(Pyramid::unit());
        assert_eq!(integrate(&s, &pyr, &cfg).unwrap().backend(), BackendKind::Exact);

        let convex = FunctionSpec::expression("exp(x1 + x2)").unwrap();
        assert_eq!(integrate(&s, &convex, &cfg).unwrap().backend(), BackendKind::Bracket);

        let concave = FunctionSpec::expression("-exp(x1 + 2*x2)").unwrap();
        assert_eq!(integrate(&s, &concave, &cfg).unwrap().backend(), BackendKind::MonteCarlo);
    }

    #[test]
    fn forced_exact_reports_not_exact() {
        let s = Simplex::unit(2).unwrap();
        let cfg = QuadratureConfig::default().with_backend(Backend::Exact);
        let f = FunctionSpec::expression("abs(x1 - x2)").unwrap();
        assert!(matches!(integrate(&s, &f, &cfg), Err(Error::NotExact(_))));
    }

    #[test]
    fn product_rejects_bracket_backend() {
        let s = Simplex::unit(1).unwrap();
        let f = FunctionSpec::constant(1.0);
        let cfg = QuadratureConfig::default().with_backend(Backend::Bracket);
        assert!(integrate_product(&s, &f, &f, &cfg).is_err());
    }
}
