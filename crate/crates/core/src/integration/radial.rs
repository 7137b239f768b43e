//! Functions of the minimum barycentric coordinate.
//!
//! With `w = 1 - (n+1) min_j xi_j` (0 at the barycenter, 1 on the boundary),
//! the set `{w <= s}` is a copy of `T` scaled by `s` about the barycenter, so
//! `w` has volume density `n s^(n-1) |T|` on `[0, 1]`. A function of `w`
//! alone therefore integrates as a one-dimensional weighted integral.
//!
//! Pieces store their polynomial in the local variable `t = w - lo`; keeping
//! the expansion point at the left end of each piece avoids cancellation when
//! a piece is very short (the clamped pyramid near `a = 1`).

use super::CompensatedSum;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RadialPiece {
    pub lo: f64,
    pub hi: f64,
    /// Coefficients of `sum_k c_k (w - lo)^k`.
    pub coeffs: Vec<f64>,
}

/// A piecewise polynomial in `w` on a partition of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RadialFunction {
    pub pieces: Vec<RadialPiece>,
}

impl RadialFunction {
    pub fn constant(value: f64) -> Self {
        Self { pieces: vec![RadialPiece { lo: 0.0, hi: 1.0, coeffs: vec![value] }] }
    }

    /// `u apex + (1 - u) face` with `u = 1 - w`.
    pub fn pyramid(apex: f64, face: f64) -> Self {
        Self { pieces: vec![RadialPiece { lo: 0.0, hi: 1.0, coeffs: vec![apex, face - apex] }] }
    }

    /// `(n+1) min_j xi_j = 1 - w`.
    pub fn min_coord_weight() -> Self {
        Self::pyramid(1.0, 0.0)
    }

    /// `alpha max{w - a, 0}`.
    pub fn clamped(a: f64, alpha: f64) -> Self {
        Self {
            pieces: vec![
                RadialPiece { lo: 0.0, hi: a, coeffs: vec![0.0] },
                RadialPiece { lo: a, hi: 1.0, coeffs: vec![0.0, alpha] },
            ],
        }
    }

    /// Coefficients in `w` when the function is one polynomial on `[0, 1]`.
    pub fn as_global_polynomial(&self) -> Option<&[f64]> {
        match self.pieces.as_slice() {
            [p] if p.lo == 0.0 && p.hi == 1.0 => Some(&p.coeffs),
            _ => None,
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.as_global_polynomial()? {
            [c] => Some(*c),
            _ => None,
        }
    }

    #[cfg(test)]
    pub fn eval(&self, w: f64) -> f64 {
        let piece = self
            .pieces
            .iter()
            .find(|p| w <= p.hi)
            .unwrap_or_else(|| self.pieces.last().unwrap());
        horner(&piece.coeffs, w - piece.lo)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| RadialPiece { lo: p.lo, hi: p.hi, coeffs: p.coeffs.iter().map(|c| c * factor).collect() })
            .collect();
        Self { pieces }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| {
            let mut out = vec![0.0; a.len().max(b.len())];
            for (i, c) in a.iter().enumerate() {
                out[i] += c;
            }
            for (i, c) in b.iter().enumerate() {
                out[i] += c;
            }
            out
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, poly_mul)
    }

    fn combine(&self, other: &Self, op: impl Fn(&[f64], &[f64]) -> Vec<f64>) -> Self {
        let mut cuts: Vec<f64> = self.pieces.iter().chain(&other.pieces).flat_map(|p| [p.lo, p.hi]).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let pieces = cuts
            .windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let a = self.restricted(lo);
                let b = other.restricted(lo);
                RadialPiece { lo, hi, coeffs: op(&a, &b) }
            })
            .collect();
        Self { pieces }
    }

    /// Coefficients of the piece covering `[lo, ..)`, re-expanded about `lo`.
    fn restricted(&self, lo: f64) -> Vec<f64> {
        let piece = self.pieces.iter().rev().find(|p| p.lo <= lo).unwrap_or(&self.pieces[0]);
        taylor_shift(&piece.coeffs, lo - piece.lo)
    }

    /// `(1/|T|) * integral over T` in dimension `dim`.
    pub fn mean(&self, dim: usize) -> f64 {
        let n = dim as i32;
        let mut total = CompensatedSum::default();
        for p in &self.pieces {
            let h = p.hi - p.lo;
            if h <= 0.0 {
                continue;
            }
            // n (lo + t)^(n-1), expanded in t.
            let mut density = vec![0.0; dim];
            let mut binom = 1.0;
            for (k, d) in density.iter_mut().enumerate() {
                let k = k as i32;
                *d = f64::from(n) * binom * p.lo.powi(n - 1 - k);
                binom = binom * f64::from(n - 1 - k) / f64::from(k + 1);
            }
            let integrand = poly_mul(&p.coeffs, &density);
            for (k, c) in integrand.iter().enumerate() {
                total.add(c * h.powi(k as i32 + 1) / (k + 1) as f64);
            }
        }
        total.value()
    }
}

#[cfg(test)]
fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `p(t + delta)` given those of `p(t)`.
fn taylor_shift(coeffs: &[f64], delta: f64) -> Vec<f64> {
    if delta == 0.0 {
        return coeffs.to_vec();
    }
    let mut c = coeffs.to_vec();
    let len = c.len();
    for i in 0..len {
        for j in (i..len - 1).rev() {
            c[j] += delta * c[j + 1];
        }
    }
    c
}
