use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A polynomial in the barycentric coordinates `xi_0, ..., xi_n`.
///
/// Terms are kept in a sparse map from exponent vectors to coefficients;
/// zero coefficients are dropped.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "PolynomialDoc", into = "PolynomialDoc")]
pub struct BaryPolynomial {
    arity: usize,
    terms: BTreeMap<Vec<u32>, f64>,
    /// Flattened copy of `terms` for evaluation, built on first use.
    flat: OnceLock<FlatTerms>,
}

#[derive(Debug, Clone, Default)]
struct FlatTerms {
    coeffs: Vec<f64>,
    /// `factors[ends[k-1]..ends[k]]` are the `(coordinate, exponent)` pairs of term `k`.
    ends: Vec<usize>,
    factors: Vec<(usize, i32)>,
}

impl FlatTerms {
    fn new(terms: &BTreeMap<Vec<u32>, f64>) -> Self {
        let mut flat = Self::default();
        for (exps, &c) in terms {
            flat.coeffs.push(c);
            flat.factors.extend(exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(j, &e)| (j, e as i32)));
            flat.ends.push(flat.factors.len());
        }
        flat
    }
}

impl PartialEq for BaryPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.terms == other.terms
    }
}

impl fmt::Debug for BaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaryPolynomial").field("arity", &self.arity).field("terms", &self.terms).finish()
    }
}

/// One `coefficient * prod xi_j^exponents[j]` term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialDoc {
    /// Number of barycentric coordinates; inferred from the terms when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    pub terms: Vec<Term>,
}

impl BaryPolynomial {
    pub fn zero(arity: usize) -> Self {
        Self { arity, terms: BTreeMap::new(), flat: OnceLock::new() }
    }

    pub fn constant(arity: usize, value: f64) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(value, vec![0; arity]);
        p
    }

    /// The coordinate `xi_j`.
    pub fn coordinate(arity: usize, j: usize) -> Self {
        let mut exps = vec![0; arity];
        exps[j] = 1;
        let mut p = Self::zero(arity);
        p.add_term(1.0, exps);
        p
    }

    /// `sum_j coeffs[j] xi_j`.
    pub fn linear(coeffs: &[f64]) -> Self {
        let arity = coeffs.len();
        let mut p = Self::zero(arity);
        for (j, &c) in coeffs.iter().enumerate() {
            let mut exps = vec![0; arity];
            exps[j] = 1;
            p.add_term(c, exps);
        }
        p
    }

    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Vec<u32>)>,
    {
        let mut p = Self::zero(arity);
        for (c, exps) in terms {
            if exps.len() != arity {
                return Err(Error::DimensionMismatch { expected: arity, found: exps.len() });
            }
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite coefficient {c}")));
            }
            p.add_term(c, exps);
        }
        Ok(p)
    }

    fn add_term(&mut self, c: f64, exps: Vec<u32>) {
        if c == 0.0 {
            return;
        }
        self.flat = OnceLock::new();
        match self.terms.entry(exps) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == 0.0 {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Evaluates at the given barycentric coordinates.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        let flat = self.flat.get_or_init(|| FlatTerms::new(&self.terms));
        let mut start = 0;
        let mut total = 0.0;
        for (&c, &end) in flat.coeffs.iter().zip(&flat.ends) {
            let term = flat.factors[start..end].iter().fold(c, |acc, &(j, e)| acc * xi[j].powi(e));
            total += term;
            start = end;
        }
        total
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            out.add_term(c * factor, e.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.arity, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `p o sigma^shift`, i.e. `x -> p(sigma^shift(x))` for the canonical cycle.
    pub fn permuted(&self, shift: usize) -> Self {
        let m = self.arity;
        let mut out = Self::zero(m);
        for (e, c) in &self.terms {
            let mut moved = vec![0; m];
            for (j, &ej) in e.iter().enumerate() {
                moved[(j + shift) % m] = ej;
            }
            out.add_term(*c, moved);
        }
        out
    }

    /// The cyclic average `(1/(n+1)) sum_k p o sigma^k`, expanded.
    pub fn symmetrized(&self) -> Self {
        let m = self.arity;
        let mut out = Self::zero(m);
        for k in 0..m {
            out = &out + &self.permuted(k);
        }
        out.scale(1.0 / m as f64)
    }

    /// Substitutes `xi_j = sum_l map[j][l] eta_l`, returning a polynomial in `eta`.
    pub fn substitute(&self, map: &[Vec<f64>]) -> Result<Self> {
        if map.len() != self.arity {
            return Err(Error::DimensionMismatch { expected: self.arity, found: map.len() });
        }
        let out_arity = map.first().map_or(0, Vec::len);
        let linear: Vec<Self> = map.iter().map(|row| Self::linear(row)).collect();
        let mut out = Self::zero(out_arity);
        // Powers are cached per coordinate since terms share them heavily.
        let mut powers: Vec<Vec<Self>> = linear.iter().map(|l| vec![Self::constant(out_arity, 1.0), l.clone()]).collect();
        for (e, c) in &self.terms {
            let mut acc = Self::constant(out_arity, *c);
            for (j, &ej) in e.iter().enumerate() {
                if ej == 0 {
                    continue;
                }
                while powers[j].len() <= ej as usize {
                    let next = powers[j].last().unwrap() * &linear[j];
                    powers[j].push(next);
                }
                acc = &acc * &powers[j][ej as usize];
            }
            out = &out + &acc;
        }
        Ok(out)
    }
}

impl Add for &BaryPolynomial {
    type Output = BaryPolynomial;
    fn add(self, rhs: &BaryPolynomial) -> BaryPolynomial {
        assert_eq!(self.arity, rhs.arity, "polynomial arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*c, e.clone());
        }
        out
    }
}

impl Sub for &BaryPolynomial {
    type Output = BaryPolynomial;
    fn sub(self, rhs: &BaryPolynomial) -> BaryPolynomial {
        self + &rhs.scale(-1.0)
    }
}

impl Neg for &BaryPolynomial {
    type Output = BaryPolynomial;
    fn neg(self) -> BaryPolynomial {
        self.scale(-1.0)
    }
}

impl Mul for &BaryPolynomial {
    type Output = BaryPolynomial;
    fn mul(self, rhs: &BaryPolynomial) -> BaryPolynomial {
        assert_eq!(self.arity, rhs.arity, "polynomial arity mismatch");
        let mut out = BaryPolynomial::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(ca * cb, e);
            }
        }
        out
    }
}

impl TryFrom<PolynomialDoc> for BaryPolynomial {
    type Error = Error;
    fn try_from(doc: PolynomialDoc) -> Result<Self> {
        let arity = match (doc.arity, doc.terms.first()) {
            (Some(a), _) => a,
            (None, Some(t)) => t.exponents.len(),
            (None, None) => {
                return Err(Error::InvalidParameter("polynomial without terms needs an explicit arity".into()))
            }
        };
        Self::from_terms(arity, doc.terms.into_iter().map(|t| (t.coefficient, t.exponents)))
    }
}

impl From<BaryPolynomial> for PolynomialDoc {
    fn from(p: BaryPolynomial) -> Self {
        let arity = p.terms.is_empty().then_some(p.arity);
        let terms = p.terms.into_iter().map(|(exponents, coefficient)| Term { coefficient, exponents }).collect();
        PolynomialDoc { arity, terms }
    }
}
