//! Closed-form integrals.
//!
//! Monomials use `int_T prod xi_i^a_i dx = |T| n! prod a_i! / (n + sum a_i)!`,
//! evaluated as `|T| / multinomial(n + sum a; n, a_0, .., a_n)` with the
//! multinomial computed exactly in big integers.
//!
//! Beyond polynomials, two families integrate exactly:
//!
//! * functions of `min_j xi_j` alone (pyramids, clamped pyramids), through the
//!   one-dimensional density in [`super::radial`];
//! * functions that are a polynomial on each child of the barycentric
//!   subdivision. The child that replaces `v_i` by the barycenter is exactly
//!   the region where `xi_i` is the minimum coordinate, so `min_j xi_j`, and
//!   with it any pyramid, is polynomial there.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::radial::RadialFunction;
use super::{CompensatedSum, IntegralResult};
use crate::error::{Error, Result};
use crate::function::{FunctionSpec, Pyramid};
use crate::polynomial::BaryPolynomial;
use crate::simplex::Simplex;

pub const DEFAULT_DEGREE_CAP: u32 = 60;

/// Mean value of `prod xi_i^a_i` over any simplex of dimension `exps.len() - 1`.
fn monomial_mean(exps: &[u32], cap: u32) -> Result<f64> {
    let degree: u32 = exps.iter().sum();
    if degree > cap {
        return Err(Error::Overflow { degree, cap });
    }
    if degree == 0 {
        return Ok(1.0);
    }
    // multinomial = prod_i C(n + a_0 + .. + a_i, a_i), built incrementally.
    let mut total = (exps.len() - 1) as u64;
    let mut multinomial = BigUint::one();
    for &a in exps {
        for j in 1..=u64::from(a) {
            total += 1;
            multinomial *= total;
            multinomial /= j;
        }
    }
    Ok(1.0 / multinomial.to_f64().unwrap_or(f64::INFINITY))
}

/// `int_T prod xi_i^exponents[i] dx` with the default degree cap.
pub fn integrate_monomial(simplex: &Simplex, exponents: &[u32]) -> Result<IntegralResult> {
    integrate_monomial_capped(simplex, exponents, DEFAULT_DEGREE_CAP)
}

pub fn integrate_monomial_capped(simplex: &Simplex, exponents: &[u32], cap: u32) -> Result<IntegralResult> {
    let arity = simplex.dim() + 1;
    if exponents.len() != arity {
        return Err(Error::DimensionMismatch { expected: arity, found: exponents.len() });
    }
    Ok(IntegralResult::exact(simplex.volume() * monomial_mean(exponents, cap)?))
}

fn polynomial_mean(p: &BaryPolynomial, cap: u32) -> Result<f64> {
    let mut sum = CompensatedSum::default();
    for (exps, c) in p.terms() {
        sum.add(c * monomial_mean(exps, cap)?);
    }
    Ok(sum.value())
}

/// Exact integral of a barycentric polynomial.
pub fn integrate_polynomial(simplex: &Simplex, p: &BaryPolynomial) -> Result<IntegralResult> {
    let arity = simplex.dim() + 1;
    if p.arity() != arity {
        return Err(Error::DimensionMismatch { expected: arity, found: p.arity() });
    }
    Ok(IntegralResult::exact(simplex.volume() * polynomial_mean(p, DEFAULT_DEGREE_CAP)?))
}

/// `|T| (n/(n+1) face + 1/(n+1) apex)`: the volume under the lateral surface.
pub fn integrate_pyramid(simplex: &Simplex, p: &Pyramid) -> IntegralResult {
    let n = simplex.dim() as f64;
    IntegralResult::exact(simplex.volume() * (n * p.face_value + p.apex_value) / (n + 1.0))
}

/// Intermediate representation for exact integration.
#[derive(Debug, Clone)]
enum ExactForm {
    Poly(BaryPolynomial),
    /// One polynomial per child of the barycentric subdivision: entry `i`
    /// holds on the region where `xi_i` is the minimum coordinate.
    Pieces(Vec<BaryPolynomial>),
    Radial(RadialFunction),
}

impl ExactForm {
    fn of(f: &FunctionSpec, s: &Simplex) -> Option<Self> {
        let arity = s.dim() + 1;
        Some(match f {
            FunctionSpec::Polynomial(_) | FunctionSpec::Expression(_) | FunctionSpec::Constant { .. } => {
                ExactForm::Poly(f.as_polynomial(s)?)
            }
            FunctionSpec::Pyramid(p) => ExactForm::Radial(RadialFunction::pyramid(p.apex_value, p.face_value)),
            // The vertices have measure zero.
            FunctionSpec::Indicator(v) => ExactForm::Poly(BaryPolynomial::constant(arity, v.value_elsewhere)),
            FunctionSpec::ClampedPyramid(c) => ExactForm::Radial(RadialFunction::clamped(c.a, c.alpha)),
            FunctionSpec::MinCoordWeight { inner } => {
                ExactForm::of(inner, s)?.mul(&ExactForm::Radial(RadialFunction::min_coord_weight()), arity)?
            }
            FunctionSpec::Symmetrized { inner } => ExactForm::of(inner, s)?.symmetrized(),
            FunctionSpec::Scale { factor, inner } => ExactForm::of(inner, s)?.scale(*factor),
            FunctionSpec::Sum { terms } => {
                let mut acc = ExactForm::Poly(BaryPolynomial::zero(arity));
                for t in terms {
                    acc = acc.add(&ExactForm::of(t, s)?, arity)?;
                }
                acc
            }
        })
    }

    fn scale(self, factor: f64) -> Self {
        match self {
            ExactForm::Poly(p) => ExactForm::Poly(p.scale(factor)),
            ExactForm::Pieces(ps) => ExactForm::Pieces(ps.iter().map(|p| p.scale(factor)).collect()),
            ExactForm::Radial(r) => ExactForm::Radial(r.scale(factor)),
        }
    }

    fn constant_value(&self) -> Option<f64> {
        match self {
            ExactForm::Poly(p) if p.degree() == 0 => Some(p.terms().next().map_or(0.0, |(_, c)| c)),
            ExactForm::Radial(r) => r.constant_value(),
            _ => None,
        }
    }

    fn into_pieces(self, arity: usize) -> Option<Vec<BaryPolynomial>> {
        match self {
            ExactForm::Poly(p) => Some(vec![p; arity]),
            ExactForm::Pieces(ps) => Some(ps),
            ExactForm::Radial(r) => {
                let coeffs = r.as_global_polynomial()?;
                Some(
                    (0..arity)
                        .map(|i| {
                            // w = 1 - (n+1) xi_i where xi_i is the minimum.
                            let mut lin = vec![0.0; arity];
                            lin[i] = -(arity as f64);
                            let w = &BaryPolynomial::constant(arity, 1.0) + &BaryPolynomial::linear(&lin);
                            coeffs.iter().enumerate().fold(BaryPolynomial::zero(arity), |acc, (k, c)| {
                                &acc + &w.pow(k as u32).scale(*c)
                            })
                        })
                        .collect(),
                )
            }
        }
    }

    fn combine(
        &self,
        other: &Self,
        arity: usize,
        poly: impl Fn(&BaryPolynomial, &BaryPolynomial) -> BaryPolynomial,
        radial: impl Fn(&RadialFunction, &RadialFunction) -> RadialFunction,
    ) -> Option<Self> {
        match (self, other) {
            (ExactForm::Poly(a), ExactForm::Poly(b)) => return Some(ExactForm::Poly(poly(a, b))),
            (ExactForm::Radial(a), ExactForm::Radial(b)) => return Some(ExactForm::Radial(radial(a, b))),
            (ExactForm::Radial(a), b) | (b, ExactForm::Radial(a)) => {
                if let Some(c) = b.constant_value() {
                    return Some(ExactForm::Radial(radial(a, &RadialFunction::constant(c))));
                }
            }
            _ => {}
        }
        let lhs = self.clone().into_pieces(arity)?;
        let rhs = other.clone().into_pieces(arity)?;
        Some(ExactForm::Pieces(lhs.iter().zip(&rhs).map(|(a, b)| poly(a, b)).collect()))
    }

    fn add(&self, other: &Self, arity: usize) -> Option<Self> {
        self.combine(other, arity, |a, b| a + b, RadialFunction::add)
    }

    fn mul(&self, other: &Self, arity: usize) -> Option<Self> {
        self.combine(other, arity, |a, b| a * b, RadialFunction::mul)
    }

    fn symmetrized(self) -> Self {
        match self {
            ExactForm::Poly(p) => ExactForm::Poly(p.symmetrized()),
            ExactForm::Radial(r) => ExactForm::Radial(r),
            ExactForm::Pieces(ps) => {
                // On the region where xi_i is minimal, sigma^k(x) has its minimum
                // in slot i - k, so f(sigma^k x) = p_{i-k}(sigma^k x).
                let m = ps.len();
                let pieces = (0..m)
                    .map(|i| {
                        let total = (0..m).fold(BaryPolynomial::zero(m), |acc, k| {
                            &acc + &ps[(i + m - k) % m].permuted(k)
                        });
                        total.scale(1.0 / m as f64)
                    })
                    .collect();
                ExactForm::Pieces(pieces)
            }
        }
    }

    fn mean(&self, dim: usize, cap: u32) -> Result<f64> {
        match self {
            ExactForm::Poly(p) => polynomial_mean(p, cap),
            ExactForm::Radial(r) => Ok(r.mean(dim)),
            ExactForm::Pieces(ps) => {
                let m = dim + 1;
                let mut sum = CompensatedSum::default();
                for (i, p) in ps.iter().enumerate() {
                    sum.add(polynomial_mean(&p.substitute(&child_map(m, i))?, cap)?);
                }
                Ok(sum.value() / m as f64)
            }
        }
    }
}

/// Parent coordinates as a linear function of the coordinates of child `i`
/// (vertex `i` replaced by the barycenter): `xi = A eta`.
fn child_map(m: usize, child: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|j| {
            (0..m)
                .map(|l| {
                    if l == child {
                        1.0 / m as f64
                    } else if l == j {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn describe(f: &FunctionSpec) -> String {
    match f {
        FunctionSpec::MinCoordWeight { inner } => format!("min-coordinate weight of {}", describe(inner)),
        FunctionSpec::Expression(e) => format!("expression `{}`", e.source()),
        other => serde_json::to_string(other).unwrap_or_else(|_| format!("{other:?}")),
    }
}

/// Exact integral of `f`, or [`Error::NotExact`] when no closed form applies.
pub fn exact_integral(simplex: &Simplex, f: &FunctionSpec, cap: u32) -> Result<IntegralResult> {
    exact_product_integral(simplex, &[f], cap)
}

/// Exact integral of the product of `factors`.
pub fn exact_product_integral(simplex: &Simplex, factors: &[&FunctionSpec], cap: u32) -> Result<IntegralResult> {
    let arity = simplex.dim() + 1;
    let mut form = ExactForm::Poly(BaryPolynomial::constant(arity, 1.0));
    for f in factors {
        f.validate(simplex.dim())?;
        let next = ExactForm::of(f, simplex).ok_or_else(|| Error::NotExact(describe(f)))?;
        form = form.mul(&next, arity).ok_or_else(|| {
            Error::NotExact(format!(
                "product of {}",
                factors.iter().map(|f| describe(f)).collect::<Vec<_>>().join(" and ")
            ))
        })?;
    }
    Ok(IntegralResult::exact(simplex.volume() * form.mean(simplex.dim(), cap)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{ClampedPyramid, VertexIndicator};

    fn poly(arity: usize, terms: &[(f64, &[u32])]) -> BaryPolynomial {
        BaryPolynomial::from_terms(arity, terms.iter().map(|(c, e)| (*c, e.to_vec()))).unwrap()
    }

    /// Iterated composite Simpson rule on the unit triangle.
    fn triangle_oracle(f: impl Fn(f64, f64) -> f64) -> f64 {
        let n = 400;
        let simpson = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| {
            let h = (b - a) / n as f64;
            let mut s = g(a) + g(b);
            for k in 1..n {
                s += g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        simpson(&|x| simpson(&|y| f(x, y), 0.0, 1.0 - x), 0.0, 1.0)
    }

    #[test]
    fn monomials_on_unit_triangle() {
        let s = Simplex::unit(2).unwrap();
        assert_eq!(integrate_monomial(&s, &[0, 0, 0]).unwrap().value, 0.5);
        let x2 = integrate_monomial(&s, &[0, 2, 0]).unwrap().value;
        assert!((x2 - 1.0 / 12.0).abs() < 1e-16);
        assert!((x2 - triangle_oracle(|x, _| x * x)).abs() < 1e-12);
        let mixed = integrate_monomial(&s, &[1, 2, 3]).unwrap().value;
        assert!((mixed - triangle_oracle(|x, y| (1.0 - x - y) * x * x * y.powi(3))).abs() < 1e-12);
    }

    #[test]
    fn linear_monomial_is_volume_share() {
        let s = Simplex::new(vec![
            vec![0.3, -1.2, 0.5],
            vec![2.0, 0.1, -0.4],
            vec![-0.7, 1.5, 0.9],
            vec![0.4, 0.2, 2.2],
        ])
        .unwrap();
        for i in 0..4 {
            let mut e = vec![0; 4];
            e[i] = 1;
            let v = integrate_monomial(&s, &e).unwrap().value;
            assert!((v - s.volume() / 4.0).abs() <= 1e-15 * s.volume());
        }
    }

    #[test]
    fn high_degree_is_exact_and_capped() {
        let s = Simplex::unit(1).unwrap();
        // int_0^1 (1-x)^10 x^10 dx = 10! 10! / 21!
        let v = integrate_monomial(&s, &[10, 10]).unwrap().value;
        let expected = 1.0 / (21.0 * 184_756.0);
        assert!((v - expected).abs() <= 1e-15 * expected);
        assert!(matches!(integrate_monomial(&s, &[40, 21]), Err(Error::Overflow { degree: 61, cap: 60 })));
        assert!(integrate_monomial(&s, &[1, 2, 3]).is_err());
    }

    #[test]
    fn polynomial_examples() {
        let s = Simplex::unit(2).unwrap();
        let f = poly(3, &[(1.0, &[0, 2, 0]), (1.0, &[0, 0, 2])]);
        assert!((integrate_polynomial(&s, &f).unwrap().value - 1.0 / 6.0).abs() < 1e-16);

        let affine = poly(3, &[(2.0, &[1, 0, 0]), (-1.0, &[0, 1, 0]), (5.0, &[0, 0, 1])]);
        assert!((integrate_polynomial(&s, &affine).unwrap().value - 0.5 * 6.0 / 3.0).abs() < 1e-15);

        let sq = poly(3, &[(1.0, &[2, 0, 0])]);
        let a = integrate_polynomial(&s, &sq).unwrap().value;
        let b = integrate_polynomial(&s, &sq.symmetrized()).unwrap().value;
        assert!((a - b).abs() < 1e-16);
    }

    #[test]
    fn pyramid_examples() {
        let s = Simplex::unit(2).unwrap();
        assert!((integrate_pyramid(&s, &Pyramid::unit()).value - 1.0 / 3.0).abs() < 1e-16);
        assert!((integrate_pyramid(&s, &Pyramid::new(4.0, 4.0)).value - 2.0).abs() < 1e-15);
        let interval = Simplex::interval(-1.0, 1.0).unwrap();
        assert_eq!(integrate_pyramid(&interval, &Pyramid::unit()).value, 1.0);
    }

    #[test]
    fn piecewise_route_reproduces_pyramid_formula() {
        // Multiplying by sum_j xi_j (= 1 on T) forces the per-child route.
        for n in 1..5 {
            let s = Simplex::unit(n).unwrap();
            let m = n + 1;
            let ones = BaryPolynomial::linear(&vec![1.0; m]);
            let pyr = FunctionSpec::Pyramid(Pyramid::new(0.25, 1.5));
            let v = exact_product_integral(&s, &[&pyr, &FunctionSpec::Polynomial(ones)], 60).unwrap().value;
            let expected = integrate_pyramid(&s, &Pyramid::new(0.25, 1.5)).value;
            assert!((v - expected).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn min_coordinate_moment_of_one() {
        // int (n+1) min xi = |T| / (n+1)
        for n in 1..6 {
            let s = Simplex::unit(n).unwrap();
            let w = FunctionSpec::min_coord_weight(FunctionSpec::constant(1.0));
            let v = exact_integral(&s, &w, 60).unwrap().value;
            assert!((v - s.volume() / (n + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn min_coordinate_moment_of_square_on_interval() {
        // int_{-1}^{1} x^2 (1 - |x|) dx = 1/6, with x = xi_1 - xi_0.
        let s = Simplex::interval(-1.0, 1.0).unwrap();
        let g = FunctionSpec::expression("x1^2").unwrap();
        let v = exact_integral(&s, &FunctionSpec::min_coord_weight(g), 60).unwrap().value;
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn min_coordinate_moment_on_triangle_matches_oracle() {
        let s = Simplex::unit(2).unwrap();
        let g = FunctionSpec::expression("x1^2 + 3*x1*x2").unwrap();
        let v = exact_integral(&s, &FunctionSpec::min_coord_weight(g), 60).unwrap().value;
        // The integrand has kinks, so the oracle only converges to ~1e-7.
        let oracle = triangle_oracle(|x, y| (x * x + 3.0 * x * y) * 3.0 * x.min(y).min(1.0 - x - y));
        assert!((v - oracle).abs() < 1e-6, "{v} vs {oracle}");
    }

    #[test]
    fn symmetrized_pieces_preserve_integral() {
        let s = Simplex::unit(3).unwrap();
        let f = FunctionSpec::min_coord_weight(FunctionSpec::Polynomial(poly(4, &[(1.0, &[2, 1, 0, 0])])));
        let sym = FunctionSpec::Symmetrized { inner: Box::new(f.clone()) };
        let a = exact_integral(&s, &f, 60).unwrap().value;
        let b = exact_integral(&s, &sym, 60).unwrap().value;
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn indicator_integrates_to_elsewhere_value() {
        let s = Simplex::unit(2).unwrap();
        let f = FunctionSpec::Indicator(VertexIndicator { value_at_vertices: 1.0, value_elsewhere: 0.0 });
        assert_eq!(exact_integral(&s, &f, 60).unwrap().value, 0.0);
    }

    #[test]
    fn clamped_times_polynomial_is_not_exact() {
        let s = Simplex::unit(2).unwrap();
        let g = FunctionSpec::ClampedPyramid(ClampedPyramid::new(0.5, 1.0).unwrap());
        let f = FunctionSpec::expression("x1").unwrap();
        assert!(matches!(exact_product_integral(&s, &[&f, &g], 60), Err(Error::NotExact(_))));
        let c = FunctionSpec::constant(2.0);
        assert!(exact_product_integral(&s, &[&c, &g], 60).is_ok());
    }

    #[test]
    fn non_polynomial_expression_is_not_exact() {
        let s = Simplex::unit(2).unwrap();
        let f = FunctionSpec::expression("abs(x1)").unwrap();
        assert!(matches!(exact_integral(&s, &f, 60), Err(Error::NotExact(_))));
    }
}
