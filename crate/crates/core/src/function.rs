//! Functions on a simplex, evaluated in barycentric coordinates.
//!
//! Besides user polynomials and expressions, [`FunctionSpec`] carries the
//! extremal constructions of the refinement argument: the cyclic average of a
//! function ([`symmetrize`]), the pyramid through `(b, f(b))` and the vertex
//! average `M` ([`make_pyramid`]), and the clamped pyramid weight used to show
//! that the weighted refinement has no uniform constant
//! ([`make_fejer_counterexample`]).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expression::Expression;
use crate::polynomial::BaryPolynomial;
use crate::sampling::{stream_rng, uniform_barycentric};
use crate::simplex::{min_coord, permute_into, BarycentricPoint, Simplex};

/// Coordinates at or above `1 - VERTEX_TOLERANCE` mark a vertex.
pub const VERTEX_TOLERANCE: f64 = 1e-12;

/// `(n+1) min_j xi_j * apex + (1 - (n+1) min_j xi_j) * face`.
///
/// Its graph is the lateral surface of the pyramid with apex `(b, apex)` over
/// the base `(T, face)`; it is convex iff `apex <= face`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pyramid {
    pub apex_value: f64,
    pub face_value: f64,
}

impl Pyramid {
    pub fn new(apex_value: f64, face_value: f64) -> Self {
        Self { apex_value, face_value }
    }

    /// The unit pyramid: 0 at the barycenter, 1 on the boundary.
    pub fn unit() -> Self {
        Self::new(0.0, 1.0)
    }

    pub fn is_convex(&self) -> bool {
        self.apex_value <= self.face_value
    }
}

/// `value_at_vertices` at the vertices, `value_elsewhere` everywhere else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexIndicator {
    pub value_at_vertices: f64,
    pub value_elsewhere: f64,
}

/// `alpha * max{G(x) - a, 0}` where `G` is the unit pyramid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClampedPyramid {
    pub a: f64,
    pub alpha: f64,
}

impl ClampedPyramid {
    pub fn new(a: f64, alpha: f64) -> Result<Self> {
        let c = Self { a, alpha };
        c.validate()?;
        Ok(c)
    }

    /// The member of the family with unit integral over `simplex`.
    pub fn normalized(simplex: &Simplex, a: f64) -> Result<Self> {
        check_level(a)?;
        let mass = clamped_pyramid_mass(simplex.dim(), a) * simplex.volume();
        Self::new(a, 1.0 / mass)
    }

    fn validate(&self) -> Result<()> {
        check_level(self.a)?;
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha = {} must be positive", self.alpha)));
        }
        Ok(())
    }
}

fn check_level(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("clamp level a = {a} must lie in (0, 1)")))
    }
}

/// `(1/|T|) * integral over T of max{G - a, 0}` for the unit pyramid `G` in
/// dimension `dim`.
///
/// `G` takes the value `w` on a level set of volume density `n w^(n-1) |T|`,
/// so the mean is `int_a^1 (w - a) n w^(n-1) dw`. Expanding around `w = a`
/// keeps every term positive, which matters as `a -> 1`.
pub fn clamped_pyramid_mass(dim: usize, a: f64) -> f64 {
    let n = dim as i32;
    let c = 1.0 - a;
    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 0..n {
        // C(n-1, k) a^(n-1-k) * n * c^(k+2) / (k+2)
        total += binom * a.powi(n - 1 - k) * f64::from(n) * c.powi(k + 2) / f64::from(k + 2);
        binom = binom * f64::from(n - 1 - k) / f64::from(k + 1);
    }
    total
}

/// A function on a simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Polynomial(BaryPolynomial),
    Pyramid(Pyramid),
    Indicator(VertexIndicator),
    /// `inner(x) * (n+1) * min_j xi_j`.
    MinCoordWeight { inner: Box<FunctionSpec> },
    ClampedPyramid(ClampedPyramid),
    /// `(1/(n+1)) sum_k inner(sigma^k x)` over the canonical cycle.
    Symmetrized { inner: Box<FunctionSpec> },
    Expression(Expression),
    Constant { value: f64 },
    Sum { terms: Vec<FunctionSpec> },
    Scale { factor: f64, inner: Box<FunctionSpec> },
}

impl FunctionSpec {
    pub fn constant(value: f64) -> Self {
        FunctionSpec::Constant { value }
    }

    pub fn expression(source: &str) -> Result<Self> {
        Ok(FunctionSpec::Expression(Expression::parse(source)?))
    }

    pub fn min_coord_weight(inner: FunctionSpec) -> Self {
        FunctionSpec::MinCoordWeight { inner: Box::new(inner) }
    }

    pub fn scaled(self, factor: f64) -> Self {
        FunctionSpec::Scale { factor, inner: Box::new(self) }
    }

    /// Checks that the function can be evaluated on a simplex of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            FunctionSpec::Polynomial(p) => {
                if p.arity() != dim + 1 {
                    return Err(Error::DimensionMismatch { expected: dim + 1, found: p.arity() });
                }
            }
            FunctionSpec::Expression(e) => {
                if e.variable_count() > dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: e.variable_count() });
                }
            }
            FunctionSpec::ClampedPyramid(c) => c.validate()?,
            FunctionSpec::MinCoordWeight { inner }
            | FunctionSpec::Symmetrized { inner }
            | FunctionSpec::Scale { inner, .. } => inner.validate(dim)?,
            FunctionSpec::Sum { terms } => {
                for t in terms {
                    t.validate(dim)?;
                }
            }
            FunctionSpec::Pyramid(_) | FunctionSpec::Indicator(_) | FunctionSpec::Constant { .. } => {}
        }
        Ok(())
    }

    /// Human-readable notes about inputs that break the convexity hypothesis.
    pub fn convexity_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_warnings(&mut out);
        out
    }

    fn collect_warnings(&self, out: &mut Vec<String>) {
        match self {
            FunctionSpec::Pyramid(p) if !p.is_convex() => out.push(format!(
                "pyramid apex {} exceeds face value {}; the function is concave",
                p.apex_value, p.face_value
            )),
            FunctionSpec::Indicator(v) if v.value_at_vertices < v.value_elsewhere => out.push(format!(
                "indicator vertex value {} is below {}; the function is not convex",
                v.value_at_vertices, v.value_elsewhere
            )),
            FunctionSpec::Symmetrized { inner } | FunctionSpec::Scale { inner, .. } => inner.collect_warnings(out),
            FunctionSpec::Sum { terms } => terms.iter().for_each(|t| t.collect_warnings(out)),
            _ => {}
        }
    }

    /// The function as an explicit barycentric polynomial on `simplex`, when it is one.
    pub fn as_polynomial(&self, simplex: &Simplex) -> Option<BaryPolynomial> {
        let arity = simplex.dim() + 1;
        match self {
            FunctionSpec::Polynomial(p) => (p.arity() == arity).then(|| p.clone()),
            FunctionSpec::Expression(e) => e.to_polynomial(simplex),
            FunctionSpec::Constant { value } => Some(BaryPolynomial::constant(arity, *value)),
            FunctionSpec::Symmetrized { inner } => Some(inner.as_polynomial(simplex)?.symmetrized()),
            FunctionSpec::Scale { factor, inner } => Some(inner.as_polynomial(simplex)?.scale(*factor)),
            FunctionSpec::Sum { terms } => terms
                .iter()
                .try_fold(BaryPolynomial::zero(arity), |acc, t| Some(&acc + &t.as_polynomial(simplex)?)),
            FunctionSpec::Pyramid(_)
            | FunctionSpec::Indicator(_)
            | FunctionSpec::MinCoordWeight { .. }
            | FunctionSpec::ClampedPyramid(_) => None,
        }
    }

    /// Evaluates at barycentric coordinates `xi` of `simplex`.
    pub(crate) fn eval_coords(&self, simplex: &Simplex, xi: &[f64]) -> Result<f64> {
        let order = xi.len() as f64;
        Ok(match self {
            FunctionSpec::Polynomial(p) => p.eval(xi),
            FunctionSpec::Pyramid(p) => {
                let u = order * min_coord(xi);
                u * p.apex_value + (1.0 - u) * p.face_value
            }
            FunctionSpec::Indicator(v) => {
                if xi.iter().any(|&c| c >= 1.0 - VERTEX_TOLERANCE) {
                    v.value_at_vertices
                } else {
                    v.value_elsewhere
                }
            }
            FunctionSpec::MinCoordWeight { inner } => inner.eval_coords(simplex, xi)? * order * min_coord(xi),
            FunctionSpec::ClampedPyramid(c) => {
                let w = 1.0 - order * min_coord(xi);
                c.alpha * (w - c.a).max(0.0)
            }
            FunctionSpec::Symmetrized { inner } => {
                let mut moved = vec![0.0; xi.len()];
                let mut total = 0.0;
                for k in 0..xi.len() {
                    permute_into(k, xi, &mut moved);
                    total += inner.eval_coords(simplex, &moved)?;
                }
                total / order
            }
            FunctionSpec::Expression(e) => {
                let mut x = vec![0.0; simplex.dim()];
                simplex.to_cartesian_into(xi, &mut x);
                e.eval(&x)?
            }
            FunctionSpec::Constant { value } => *value,
            FunctionSpec::Sum { terms } => {
                let mut total = 0.0;
                for t in terms {
                    total += t.eval_coords(simplex, xi)?;
                }
                total
            }
            FunctionSpec::Scale { factor, inner } => factor * inner.eval_coords(simplex, xi)?,
        })
    }
}

/// A function bound to the simplex it lives on.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    simplex: &'a Simplex,
    function: &'a FunctionSpec,
}

impl<'a> EvalContext<'a> {
    pub fn new(simplex: &'a Simplex, function: &'a FunctionSpec) -> Result<Self> {
        function.validate(simplex.dim())?;
        Ok(Self { simplex, function })
    }

    pub fn simplex(&self) -> &'a Simplex {
        self.simplex
    }

    pub fn function(&self) -> &'a FunctionSpec {
        self.function
    }

    pub fn evaluate(&self, x: &BarycentricPoint) -> Result<f64> {
        self.evaluate_coords(x.coords())
    }

    pub fn evaluate_coords(&self, xi: &[f64]) -> Result<f64> {
        let arity = self.simplex.dim() + 1;
        if xi.len() != arity {
            return Err(Error::DimensionMismatch { expected: arity, found: xi.len() });
        }
        let v = self.function.eval_coords(self.simplex, xi)?;
        if v.is_nan() {
            return Err(Error::ExpressionEval("function evaluated to NaN".into()));
        }
        Ok(v)
    }

    /// Evaluates at a Cartesian point of the simplex.
    pub fn evaluate_cartesian(&self, p: &[f64]) -> Result<f64> {
        let loc = self.simplex.to_barycentric(p)?;
        self.evaluate_coords(loc.point.coords())
    }

    /// `f(b)`.
    pub fn at_barycenter(&self) -> Result<f64> {
        self.evaluate(&self.simplex.barycenter_point())
    }

    /// `M = (f(v_0) + ... + f(v_n)) / (n+1)`.
    pub fn vertex_mean(&self) -> Result<f64> {
        let n = self.simplex.dim();
        let mut total = 0.0;
        for i in 0..=n {
            total += self.evaluate(&self.simplex.vertex_point(i))?;
        }
        Ok(total / (n + 1) as f64)
    }
}

/// Wraps `f` in its cyclic average `F(x) = (1/(n+1)) sum_k f(sigma^k x)`.
///
/// For polynomial input, [`FunctionSpec::as_polynomial`] on the result gives
/// the expanded average.
pub fn symmetrize(f: &FunctionSpec) -> FunctionSpec {
    FunctionSpec::Symmetrized { inner: Box::new(f.clone()) }
}

/// The pyramid with apex `f(b)` and face value `M` for `f` on `simplex`.
pub fn make_pyramid(simplex: &Simplex, f: &FunctionSpec) -> Result<FunctionSpec> {
    let ctx = EvalContext::new(simplex, f)?;
    Ok(FunctionSpec::Pyramid(Pyramid::new(ctx.at_barycenter()?, ctx.vertex_mean()?)))
}

/// 1 at the vertices, 0 elsewhere. Convex, with integral 0.
pub fn make_vertex_indicator(_simplex: &Simplex) -> FunctionSpec {
    FunctionSpec::Indicator(VertexIndicator { value_at_vertices: 1.0, value_elsewhere: 0.0 })
}

/// `F` = the unit pyramid and `g = alpha max{F - a, 0}` normalized to unit
/// integral over `simplex`.
pub fn make_fejer_counterexample(simplex: &Simplex, a: f64) -> Result<(FunctionSpec, FunctionSpec)> {
    let weight = ClampedPyramid::normalized(simplex, a)?;
    Ok((FunctionSpec::Pyramid(Pyramid::unit()), FunctionSpec::ClampedPyramid(weight)))
}

/// Outcome of [`check_convexity_sampled`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub samples: usize,
    pub seed: u64,
    /// Largest observed `f(t x + (1-t) y) - (t f(x) + (1-t) f(y))`, floored at 0.
    pub worst_violation: f64,
    /// Largest `|f|` seen at any sampled point.
    pub scale: f64,
    pub plausibly_convex: bool,
    /// Index of the sample that attained `worst_violation`, if positive.
    pub worst_sample: Option<usize>,
}

/// The random triple used by sample `index` of the convexity check.
pub fn convexity_sample(arity: usize, seed: u64, index: usize) -> (BarycentricPoint, BarycentricPoint, f64) {
    let mut rng = stream_rng(seed, index as u64);
    let mut x = vec![0.0; arity];
    let mut y = vec![0.0; arity];
    uniform_barycentric(&mut rng, &mut x);
    uniform_barycentric(&mut rng, &mut y);
    let t: f64 = rand::Rng::random_range(&mut rng, f64::EPSILON..1.0);
    (BarycentricPoint::new_unchecked(x), BarycentricPoint::new_unchecked(y), t)
}

/// Spot-checks the convexity inequality on `samples` random chords.
pub fn check_convexity_sampled(ctx: &EvalContext<'_>, samples: usize, seed: u64) -> Result<ConvexityReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let arity = ctx.simplex().dim() + 1;
    let per_sample: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (x, y, t) = convexity_sample(arity, seed, i);
            let fx = ctx.evaluate(&x)?;
            let fy = ctx.evaluate(&y)?;
            let fm = ctx.evaluate(&x.lerp(&y, t))?;
            let violation = fm - (t * fx + (1.0 - t) * fy);
            Ok((violation, fx.abs().max(fy.abs()).max(fm.abs())))
        })
        .collect::<Result<_>>()?;

    let mut worst_violation = 0.0;
    let mut worst_sample = None;
    let mut scale = 0.0_f64;
    for (i, (violation, magnitude)) in per_sample.into_iter().enumerate() {
        scale = scale.max(magnitude);
        if violation > worst_violation {
            worst_violation = violation;
            worst_sample = Some(i);
        }
    }
    Ok(ConvexityReport {
        samples,
        seed,
        worst_violation,
        scale,
        plausibly_convex: worst_violation <= 1e-9 * (1.0 + scale),
        worst_sample,
    })
}
