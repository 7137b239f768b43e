//! Hermite–Hadamard gaps and their verdicts.
//!
//! For convex `f` on an `n`-simplex `T` with barycenter `b` and vertex mean
//! `M`, the gaps
//!
//! ```text
//! L = (1/|T|) int_T f - f(b)      R = M - (1/|T|) int_T f
//! ```
//!
//! satisfy `0 <= L <= n R`, and the unit pyramid attains `L = n R`. With a
//! nonnegative cyclically invariant weight `g` the weighted gaps
//! `Lg = int f g - f(b) int g` and `Rg = M int g - int f g` are nonnegative
//! and obey
//!
//! ```text
//! 0 <= Delta alpha <= Rg        0 <= Lg <= Delta (int g - alpha)
//! ```
//!
//! with `Delta = M - f(b)` and `alpha = int g (n+1) min_j xi_j`. No constant
//! bounds `Lg / Rg` uniformly in `g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{make_fejer_counterexample, EvalContext, FunctionSpec, Pyramid};
use crate::integration::{
    exact_integral, integrate, integrate_monte_carlo, integrate_product, Backend,
    BackendKind, IntegralResult, QuadratureConfig,
};
use crate::sampling::{stream_rng, uniform_barycentric};
use crate::simplex::{permute_into, Simplex};

/// Absolute slack added to every verdict tolerance.
pub const VERDICT_SLACK: f64 = 1e-10;

/// Weight values below this are rejected as negative.
pub const NEGATIVE_WEIGHT_TOLERANCE: f64 = 1e-9;

/// Points sampled when checking that a weight is cyclically invariant.
pub const SYMMETRY_SAMPLES: usize = 64;

const WEIGHT_SAMPLES: usize = 256;
const SPOT_CHECK_SEED: u64 = 0x9E37_79B9_7F4A_7C15;
const SEARCH_STEPS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    pub fn and(self, other: Verdict) -> Verdict {
        Verdict::from_bool(self.is_pass() && other.is_pass())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// Unweighted gaps of one function on one simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "nR")]
    pub n_r: f64,
    /// `(1/|T|) int_T f`.
    pub mean_value: f64,
    pub f_at_barycenter: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub volume: f64,
    pub integral: IntegralResult,
    /// Allowed violation of each inequality: normalized integration
    /// uncertainty plus [`VERDICT_SLACK`].
    pub tolerance: f64,
    /// `nR - L`.
    pub slack: f64,
    /// `0 <= L <= nR`.
    pub verdict_hh: Verdict,
    /// `L <= R`, reported for intervals only.
    pub verdict_1d: Option<Verdict>,
}

impl BoundsReport {
    pub fn backend(&self) -> BackendKind {
        self.integral.backend()
    }

    /// True when every reported verdict passes.
    pub fn passes(&self) -> bool {
        self.verdict_hh.is_pass() && self.verdict_1d.map_or(true, Verdict::is_pass)
    }
}

/// Computes `L`, `R` and their verdicts for `f` on `simplex`.
pub fn compute_lr(simplex: &Simplex, f: &FunctionSpec, cfg: &QuadratureConfig) -> Result<BoundsReport> {
    let ctx = EvalContext::new(simplex, f)?;
    let integral = integrate(simplex, f, cfg)?;
    let volume = simplex.volume();
    let n = simplex.dim();
    let mean_value = integral.value / volume;
    let f_at_barycenter = ctx.at_barycenter()?;
    let m = ctx.vertex_mean()?;
    let l = mean_value - f_at_barycenter;
    let r = m - mean_value;
    let n_r = n as f64 * r;
    let tolerance = integral.uncertainty() / volume + VERDICT_SLACK;
    let mut report = BoundsReport {
        n,
        l,
        r,
        n_r,
        mean_value,
        f_at_barycenter,
        m,
        volume,
        integral,
        tolerance,
        slack: n_r - l,
        verdict_hh: Verdict::Fail,
        verdict_1d: None,
    };
    report.verdict_hh = verify_refinement(&report);
    report.verdict_1d = verify_one_dimensional(&report);
    Ok(report)
}

/// `L >= -tol` and `nR - L >= -tol`.
pub fn verify_refinement(report: &BoundsReport) -> Verdict {
    let tol = report.tolerance;
    Verdict::from_bool(report.l >= -tol && report.n_r - report.l >= -tol)
}

/// For `n = 1`, the stronger `L <= R`; `None` in higher dimensions.
pub fn verify_one_dimensional(report: &BoundsReport) -> Option<Verdict> {
    (report.n == 1).then(|| Verdict::from_bool(report.r - report.l >= -report.tolerance))
}

/// The unit pyramid on `simplex` and its report, for which `L = nR`.
pub fn make_sharpness_witness(simplex: &Simplex) -> (FunctionSpec, BoundsReport) {
    let f = FunctionSpec::Pyramid(Pyramid::unit());
    let cfg = QuadratureConfig::default().with_backend(Backend::Exact);
    let report = compute_lr(simplex, &f, &cfg).expect("the pyramid integral is exact");
    (f, report)
}

/// Weighted gaps of `f` against the weight `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerReport {
    pub n: usize,
    #[serde(rename = "Lg")]
    pub lg: f64,
    #[serde(rename = "Rg")]
    pub rg: f64,
    /// `M - f(b)`.
    #[serde(rename = "Delta")]
    pub delta: f64,
    /// `int_T g (n+1) min_j xi_j`.
    pub alpha: f64,
    pub int_g: f64,
    pub int_fg: f64,
    pub f_at_barycenter: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// The weakest backend among the three integrals.
    pub backend: BackendKind,
    pub tolerance: f64,
    /// Set when `g` was seen to change under a cyclic shift.
    pub symmetry_warning: Option<String>,
    /// `Lg >= 0` and `Rg >= 0`.
    pub verdict_thm3: Verdict,
    /// `0 <= Delta alpha <= Rg`.
    #[serde(rename = "verdict_ineq_R")]
    pub verdict_ineq_r: Verdict,
    /// `0 <= Lg <= Delta (int g - alpha)`.
    #[serde(rename = "verdict_ineq_L")]
    pub verdict_ineq_l: Verdict,
}

impl FejerReport {
    pub fn passes(&self) -> bool {
        self.verdict_thm3.is_pass() && self.verdict_ineq_r.is_pass() && self.verdict_ineq_l.is_pass()
    }
}

/// Integrates a function that need not be convex: exact when possible,
/// otherwise Monte Carlo. The bracketing backend would not be certified.
fn integrate_weight(simplex: &Simplex, h: &FunctionSpec, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    match cfg.backend {
        Backend::Auto => match exact_integral(simplex, h, cfg.degree_cap) {
            Err(Error::NotExact(_)) => integrate_monte_carlo(simplex, h, None, cfg),
            other => other,
        },
        Backend::Bracket => {
            Err(Error::InvalidConfig("the bracketing backend does not apply to weights".into()))
        }
        _ => integrate(simplex, h, cfg),
    }
}

/// Rejects weights that are negative at a vertex, the barycenter or a
/// random sample point.
fn check_nonnegative(ctx: &EvalContext<'_>, seed: u64) -> Result<()> {
    let s = ctx.simplex();
    let mut points: Vec<Vec<f64>> = (0..=s.dim()).map(|i| s.vertex_point(i).into_coords()).collect();
    points.push(s.barycenter_point().into_coords());
    let mut rng = stream_rng(seed ^ SPOT_CHECK_SEED, 0);
    for _ in 0..WEIGHT_SAMPLES {
        let mut xi = vec![0.0; s.dim() + 1];
        uniform_barycentric(&mut rng, &mut xi);
        points.push(xi);
    }
    for xi in &points {
        let value = ctx.evaluate_coords(xi)?;
        if value < -NEGATIVE_WEIGHT_TOLERANCE {
            return Err(Error::NegativeWeight { value });
        }
    }
    Ok(())
}

/// Compares `g(sigma^k x)` with `g(x)` at random points for every shift.
fn symmetry_warning(ctx: &EvalContext<'_>, seed: u64) -> Result<Option<String>> {
    let arity = ctx.simplex().dim() + 1;
    let mut rng = stream_rng(seed ^ SPOT_CHECK_SEED, 1);
    let mut xi = vec![0.0; arity];
    let mut moved = vec![0.0; arity];
    let mut worst: f64 = 0.0;
    for _ in 0..SYMMETRY_SAMPLES {
        uniform_barycentric(&mut rng, &mut xi);
        let base = ctx.evaluate_coords(&xi)?;
        for k in 1..arity {
            permute_into(k, &xi, &mut moved);
            let diff = (ctx.evaluate_coords(&moved)? - base).abs() / (1.0 + base.abs());
            worst = worst.max(diff);
        }
    }
    Ok((worst > 1e-9).then(|| {
        format!("weight is not invariant under cyclic shifts (relative difference {worst:.3e} at sampled points)")
    }))
}

/// Computes the weighted gaps of `f` against `g` and all three verdicts.
pub fn fejer_lr(simplex: &Simplex, f: &FunctionSpec, g: &FunctionSpec, cfg: &QuadratureConfig) -> Result<FejerReport> {
    cfg.validate()?;
    let fc = EvalContext::new(simplex, f)?;
    let gc = EvalContext::new(simplex, g)?;
    check_nonnegative(&gc, cfg.seed)?;
    let symmetry_warning = symmetry_warning(&gc, cfg.seed)?;

    let weight_cfg = QuadratureConfig { backend: Backend::Auto, ..*cfg };
    let weight_cfg = if cfg.backend == Backend::Bracket { &weight_cfg } else { cfg };
    let int_fg = integrate_product(simplex, f, g, weight_cfg)?;
    let int_g = integrate_weight(simplex, g, weight_cfg)?;
    let alpha = integrate_weight(simplex, &FunctionSpec::min_coord_weight(g.clone()), weight_cfg)?;

    let f_at_barycenter = fc.at_barycenter()?;
    let m = fc.vertex_mean()?;
    let delta = m - f_at_barycenter;
    let lg = int_fg.value - f_at_barycenter * int_g.value;
    let rg = m * int_g.value - int_fg.value;
    let tolerance = int_fg.uncertainty()
        + f_at_barycenter.abs().max(m.abs()) * int_g.uncertainty()
        + delta.abs() * (int_g.uncertainty() + alpha.uncertainty())
        + VERDICT_SLACK;
    let backend = int_fg.backend().weakest(int_g.backend()).weakest(alpha.backend());

    let mut report = FejerReport {
        n: simplex.dim(),
        lg,
        rg,
        delta,
        alpha: alpha.value,
        int_g: int_g.value,
        int_fg: int_fg.value,
        f_at_barycenter,
        m,
        backend,
        tolerance,
        symmetry_warning,
        verdict_thm3: Verdict::Fail,
        verdict_ineq_r: Verdict::Fail,
        verdict_ineq_l: Verdict::Fail,
    };
    let (thm3, ineq_r, ineq_l) = verify_fejer_bounds(&report);
    report.verdict_thm3 = thm3;
    report.verdict_ineq_r = ineq_r;
    report.verdict_ineq_l = ineq_l;
    Ok(report)
}

/// The three weighted verdicts: nonnegativity of both gaps, the chain for
/// `Rg` and the chain for `Lg`.
pub fn verify_fejer_bounds(report: &FejerReport) -> (Verdict, Verdict, Verdict) {
    let tol = report.tolerance;
    let lower_moment = report.delta * report.alpha;
    let upper_moment = report.delta * (report.int_g - report.alpha);
    let thm3 = Verdict::from_bool(report.lg >= -tol && report.rg >= -tol);
    let ineq_r = Verdict::from_bool(lower_moment >= -tol && lower_moment <= report.rg + tol);
    let ineq_l = Verdict::from_bool(report.lg >= -tol && report.lg <= upper_moment + tol);
    (thm3, ineq_r, ineq_l)
}

/// Finds `a` for which the unit pyramid `F` and the normalized clamped
/// weight `g = alpha max{F - a, 0}` give `Lg > bound Rg`.
///
/// Tries `a = 1 - 2^-k` for `k = 1, 2, ..`; as `a -> 1` the weight moves to
/// the boundary, `Lg -> 1` and `Rg -> 0`.
pub fn demonstrate_no_uniform_fejer_constant(
    simplex: &Simplex,
    bound: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, FejerReport)> {
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Error::InvalidParameter(format!("the constant must be positive and finite, got {bound}")));
    }
    for k in 1..=SEARCH_STEPS {
        let a = 1.0 - 0.5f64.powi(k as i32);
        let (f, g) = make_fejer_counterexample(simplex, a)?;
        let report = fejer_lr(simplex, &f, &g, cfg)?;
        if report.lg > bound * report.rg {
            return Ok((a, report));
        }
    }
    Err(Error::SearchExhausted { target: bound, steps: SEARCH_STEPS })
}
