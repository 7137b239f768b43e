//! Certified enclosure of the integral of a convex function.
//!
//! On every cell `C` a convex `f` satisfies
//! `|C| f(b_C) <= int_C f <= |C| (f(v_0) + .. + f(v_n)) / (n+1)`,
//! so summing over a partition of `T` brackets the integral. The cell with
//! the widest bracket is split until the total width meets the tolerance.
//! Both bounds improve monotonically under either splitting rule when `f`
//! is convex; a cell whose lower bound exceeds its upper bound proves that
//! `f` is not.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{CompensatedSum, IntegralKind, IntegralResult, QuadratureConfig, Refinement};
use crate::error::{Error, Result};
use crate::function::{EvalContext, FunctionSpec};
use crate::simplex::Simplex;

/// Snapshot of the global bracket after a refinement step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementStep {
    /// Number of cells split so far.
    pub step: usize,
    pub cells: usize,
    pub lower: f64,
    pub upper: f64,
    pub depth: u32,
}

impl RefinementStep {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Shared vertex storage: barycentric and Cartesian coordinates plus `f`.
struct VertexPool {
    arity: usize,
    dim: usize,
    bary: Vec<f64>,
    cart: Vec<f64>,
    values: Vec<f64>,
}

impl VertexPool {
    fn push(&mut self, bary: &[f64], cart: &[f64], value: f64) -> u32 {
        self.bary.extend_from_slice(bary);
        self.cart.extend_from_slice(cart);
        self.values.push(value);
        (self.values.len() - 1) as u32
    }

    fn bary(&self, v: u32) -> &[f64] {
        let i = v as usize * self.arity;
        &self.bary[i..i + self.arity]
    }

    fn cart(&self, v: u32) -> &[f64] {
        let i = v as usize * self.dim;
        &self.cart[i..i + self.dim]
    }
}

#[derive(Debug, Clone)]
struct Cell {
    id: u64,
    volume: f64,
    lower: f64,
    upper: f64,
    depth: u32,
    center_value: f64,
}

#[derive(Debug, PartialEq)]
struct Entry {
    gap: f64,
    id: u64,
    slot: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Widest gap first; among equal gaps the earliest cell.
        self.gap.total_cmp(&other.gap).then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Refiner<'a> {
    ctx: EvalContext<'a>,
    pool: VertexPool,
    // Cell vertex indices, `arity` per slot.
    verts: Vec<u32>,
    cells: Vec<Option<Cell>>,
    free: Vec<usize>,
    next_id: u64,
    evaluations: u64,
    lower: CompensatedSum,
    upper: CompensatedSum,
    live: usize,
    // Scratch buffers reused across splits.
    parent: Vec<u32>,
    bary_buf: Vec<f64>,
    cart_buf: Vec<f64>,
}

impl<'a> Refiner<'a> {
    fn new(ctx: EvalContext<'a>) -> Result<Self> {
        let s = ctx.simplex();
        let (dim, arity) = (s.dim(), s.dim() + 1);
        let mut pool =
            VertexPool { arity, dim, bary: Vec::new(), cart: Vec::new(), values: Vec::new() };
        let mut verts = Vec::with_capacity(arity);
        let mut evaluations = 0;
        for i in 0..arity {
            let p = s.vertex_point(i);
            let value = ctx.evaluate(&p)?;
            evaluations += 1;
            verts.push(pool.push(p.coords(), s.vertex(i), value));
        }
        Ok(Self {
            ctx,
            pool,
            verts,
            cells: Vec::new(),
            free: Vec::new(),
            next_id: 0,
            evaluations,
            lower: CompensatedSum::default(),
            upper: CompensatedSum::default(),
            live: 0,
            parent: Vec::with_capacity(arity),
            bary_buf: vec![0.0; arity],
            cart_buf: vec![0.0; dim],
        })
    }

    fn cell_vertices(&self, slot: usize) -> &[u32] {
        let m = self.pool.arity;
        &self.verts[slot * m..(slot + 1) * m]
    }

    /// Stores a cell whose vertex indices already sit in `slot`.
    fn finish_cell(&mut self, slot: usize, volume: f64, depth: u32) -> Result<Entry> {
        let m = self.pool.arity;
        let mut center = std::mem::take(&mut self.bary_buf);
        center.fill(0.0);
        let mut vertex_sum = 0.0;
        for &v in &self.verts[slot * m..(slot + 1) * m] {
            for (c, x) in center.iter_mut().zip(self.pool.bary(v)) {
                *c += x;
            }
            vertex_sum += self.pool.values[v as usize];
        }
        center.iter_mut().for_each(|c| *c /= m as f64);
        let center_value = self.ctx.evaluate_coords(&center);
        self.bary_buf = center;
        let center_value = center_value?;
        self.evaluations += 1;

        let lower = volume * center_value;
        let upper = volume * vertex_sum / m as f64;
        let slack = 1e-12 * (lower.abs() + upper.abs()) + f64::MIN_POSITIVE;
        if lower > upper + slack {
            return Err(Error::ConvexityViolationDetected { lower, upper });
        }
        let id = self.next_id;
        self.next_id += 1;
        self.lower.add(lower);
        self.upper.add(upper);
        self.live += 1;
        self.cells[slot] = Some(Cell { id, volume, lower, upper, depth, center_value });
        Ok(Entry { gap: upper - lower, id, slot })
    }

    fn root(&mut self) -> Result<Entry> {
        let vertices = std::mem::take(&mut self.verts);
        let slot = self.allocate_with(&vertices, 0, vertices[0]);
        self.finish_cell(slot, self.ctx.simplex().volume(), 0)
    }

    /// Replaces the cell in `slot` by its children, returning their heap
    /// entries through `out`.
    fn split(&mut self, slot: usize, rule: Refinement, out: &mut Vec<Entry>) -> Result<()> {
        let cell = self.cells[slot].take().expect("live cell");
        self.lower.add(-cell.lower);
        self.upper.add(-cell.upper);
        self.live -= 1;
        let m = self.pool.arity;
        let mut parent = std::mem::take(&mut self.parent);
        parent.clear();
        parent.extend_from_slice(self.cell_vertices(slot));
        self.free.push(slot);
        let depth = cell.depth + 1;

        let result = match rule {
            Refinement::LongestEdge => {
                let (mut a, mut b, mut longest) = (0, 1, -1.0);
                for i in 0..m {
                    for j in (i + 1)..m {
                        let d: f64 = self
                            .pool
                            .cart(parent[i])
                            .iter()
                            .zip(self.pool.cart(parent[j]))
                            .map(|(x, y)| (x - y) * (x - y))
                            .sum();
                        if d > longest {
                            (a, b, longest) = (i, j, d);
                        }
                    }
                }
                self.midpoint(parent[a], parent[b]).and_then(|mid| {
                    for replaced in [a, b] {
                        let s = self.allocate_with(&parent, replaced, mid);
                        out.push(self.finish_cell(s, 0.5 * cell.volume, depth)?);
                    }
                    Ok(())
                })
            }
            Refinement::Barycentric => {
                let mut bary = std::mem::take(&mut self.bary_buf);
                let mut cart = std::mem::take(&mut self.cart_buf);
                bary.fill(0.0);
                cart.fill(0.0);
                for &v in &parent {
                    bary.iter_mut().zip(self.pool.bary(v)).for_each(|(c, x)| *c += x / m as f64);
                    cart.iter_mut().zip(self.pool.cart(v)).for_each(|(c, x)| *c += x / m as f64);
                }
                let center = self.pool.push(&bary, &cart, cell.center_value);
                self.bary_buf = bary;
                self.cart_buf = cart;
                (0..m).try_for_each(|replaced| {
                    let s = self.allocate_with(&parent, replaced, center);
                    out.push(self.finish_cell(s, cell.volume / m as f64, depth)?);
                    Ok(())
                })
            }
        };
        self.parent = parent;
        result
    }

    /// Adds the midpoint of two pool vertices, evaluating `f` there.
    fn midpoint(&mut self, a: u32, b: u32) -> Result<u32> {
        let mut bary = std::mem::take(&mut self.bary_buf);
        let mut cart = std::mem::take(&mut self.cart_buf);
        for (k, c) in bary.iter_mut().enumerate() {
            *c = 0.5 * (self.pool.bary(a)[k] + self.pool.bary(b)[k]);
        }
        for (k, c) in cart.iter_mut().enumerate() {
            *c = 0.5 * (self.pool.cart(a)[k] + self.pool.cart(b)[k]);
        }
        let value = self.ctx.evaluate_coords(&bary);
        let id = value.map(|v| self.pool.push(&bary, &cart, v));
        self.bary_buf = bary;
        self.cart_buf = cart;
        self.evaluations += 1;
        id
    }

    /// A slot holding `parent` with vertex `replaced` swapped for `vertex`.
    fn allocate_with(&mut self, parent: &[u32], replaced: usize, vertex: u32) -> usize {
        let m = self.pool.arity;
        let slot = match self.free.pop() {
            Some(slot) => {
                self.verts[slot * m..(slot + 1) * m].copy_from_slice(parent);
                slot
            }
            None => {
                self.verts.extend_from_slice(parent);
                self.cells.push(None);
                self.cells.len() - 1
            }
        };
        self.verts[slot * m + replaced] = vertex;
        slot
    }

    fn snapshot(&self, step: usize, depth: u32) -> RefinementStep {
        RefinementStep { step, cells: self.live, lower: self.lower.value(), upper: self.upper.value(), depth }
    }

    /// Exact leaf sums in cell-creation order.
    fn final_bracket(&self) -> (f64, f64) {
        let mut leaves: Vec<&Cell> = self.cells.iter().flatten().collect();
        leaves.sort_by_key(|c| c.id);
        let lower: CompensatedSum = leaves.iter().map(|c| c.lower).collect();
        let upper: CompensatedSum = leaves.iter().map(|c| c.upper).collect();
        (lower.value(), upper.value())
    }
}

/// Brackets `int_T f` for convex `f` by adaptive refinement.
///
/// Returns a result with `converged == false` when `max_depth` or
/// `max_cells` stops the refinement first; the bracket is still valid.
pub fn integrate_bracketed(simplex: &Simplex, f: &FunctionSpec, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    integrate_bracketed_observed(simplex, f, cfg, |_| {})
}

/// [`integrate_bracketed`], reporting the global bracket after every split.
pub fn integrate_bracketed_observed(
    simplex: &Simplex,
    f: &FunctionSpec,
    cfg: &QuadratureConfig,
    mut observer: impl FnMut(&RefinementStep),
) -> Result<IntegralResult> {
    cfg.validate()?;
    let ctx = EvalContext::new(simplex, f)?;
    let mut refiner = Refiner::new(ctx)?;
    let mut heap = BinaryHeap::new();
    heap.push(refiner.root()?);

    let mut children = Vec::new();
    let mut step = 0;
    let mut deepest = 0;
    observer(&refiner.snapshot(step, deepest));
    let converged = loop {
        let (lower, upper) = (refiner.lower.value(), refiner.upper.value());
        let estimate = 0.5 * (lower + upper);
        if upper - lower <= cfg.abs_tol + cfg.rel_tol * estimate.abs() {
            break true;
        }
        let Some(entry) = heap.pop() else { break false };
        let depth = refiner.cells[entry.slot].as_ref().map_or(0, |c| c.depth);
        if depth >= cfg.max_depth {
            // Frozen leaf: stays in the sum, never split again.
            continue;
        }
        if refiner.live >= cfg.max_cells {
            break false;
        }
        refiner.split(entry.slot, cfg.refinement, &mut children)?;
        heap.extend(children.drain(..));
        step += 1;
        deepest = deepest.max(depth + 1);
        observer(&refiner.snapshot(step, deepest));
    };

    let (lo, hi) = refiner.final_bracket();
    let (lo, hi) = (lo.min(hi), hi.max(lo));
    Ok(IntegralResult {
        value: 0.5 * (lo + hi),
        kind: IntegralKind::Bracket { lo, hi },
        evaluations: refiner.evaluations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Pyramid;
    use crate::integration::exact::integrate_pyramid;

    fn bounds(r: &IntegralResult) -> (f64, f64) {
        match r.kind {
            IntegralKind::Bracket { lo, hi } => (lo, hi),
            _ => panic!("not a bracket"),
        }
    }

    #[test]
    fn sum_of_squares_on_triangle() {
        let s = Simplex::unit(2).unwrap();
        let f = FunctionSpec::expression("x1^2 + x2^2").unwrap();
        let cfg = QuadratureConfig { abs_tol: 1e-6, rel_tol: 0.0, ..Default::default() };
        let r = integrate_bracketed(&s, &f, &cfg).unwrap();
        let (lo, hi) = bounds(&r);
        assert!(r.converged);
        assert!(lo <= 1.0 / 6.0 && 1.0 / 6.0 <= hi, "[{lo}, {hi}]");
        assert!(hi - lo <= 1e-6);
        assert_eq!(r.value, 0.5 * (lo + hi));
    }

    #[test]
    fn affine_closes_at_the_root() {
        let s = Simplex::new(vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.2, 0.0], vec![0.1, 1.0, 0.3], vec![0.0, 0.4, 2.0]])
            .unwrap();
        let f = FunctionSpec::expression("3*x1 - x2 + 0.5*x3 + 2").unwrap();
        let mut steps = 0;
        let r = integrate_bracketed_observed(&s, &f, &QuadratureConfig::default(), |st| steps = st.step).unwrap();
        let (lo, hi) = bounds(&r);
        assert!(hi - lo <= 1e-12);
        assert_eq!(steps, 0);
    }

    #[test]
    fn pyramid_is_enclosed() {
        for rule in [Refinement::LongestEdge, Refinement::Barycentric] {
            let s = Simplex::unit(2).unwrap();
            let f = FunctionSpec::Pyramid(Pyramid::unit());
            let exact = integrate_pyramid(&s, &Pyramid::unit()).value;
            let cfg = QuadratureConfig { abs_tol: 1e-4, rel_tol: 0.0, refinement: rule, ..Default::default() };
            let r = integrate_bracketed_observed(&s, &f, &cfg, |st| {
                assert!(st.lower - 1e-12 <= exact && exact <= st.upper + 1e-12, "{rule:?} {st:?}");
            })
            .unwrap();
            let (lo, hi) = bounds(&r);
            assert!(lo - 1e-12 <= exact && exact <= hi + 1e-12);
        }
    }

    #[test]
    fn barycentric_split_is_exact_for_the_pyramid() {
        // The pyramid is affine on each barycentric child.
        let s = Simplex::unit(3).unwrap();
        let f = FunctionSpec::Pyramid(Pyramid::unit());
        let cfg = QuadratureConfig { refinement: Refinement::Barycentric, ..Default::default() };
        let mut steps = 0;
        let r = integrate_bracketed_observed(&s, &f, &cfg, |st| steps = st.step).unwrap();
        assert_eq!(steps, 1);
        assert!((r.value - 0.75 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn concave_input_is_detected() {
        let s = Simplex::unit(2).unwrap();
        let f = FunctionSpec::expression("-(x1^2 + x2^2)").unwrap();
        let err = integrate_bracketed(&s, &f, &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, Error::ConvexityViolationDetected { .. }));
    }

    #[test]
    fn depth_cap_reports_not_converged() {
        let s = Simplex::unit(2).unwrap();
        let f = FunctionSpec::expression("x1^2").unwrap();
        let cfg = QuadratureConfig { abs_tol: 1e-12, rel_tol: 0.0, max_depth: 3, ..Default::default() };
        let r = integrate_bracketed(&s, &f, &cfg).unwrap();
        assert!(!r.converged);
        let (lo, hi) = bounds(&r);
        assert!(lo <= 1.0 / 12.0 && 1.0 / 12.0 <= hi);
    }

    #[test]
    fn cell_cap_reports_not_converged() {
        let s = Simplex::unit(2).unwrap();
        let f = FunctionSpec::expression("x1^2").unwrap();
        let cfg = QuadratureConfig { abs_tol: 1e-12, rel_tol: 0.0, max_cells: 50, ..Default::default() };
        let r = integrate_bracketed(&s, &f, &cfg).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn gap_never_grows() {
        let s = Simplex::new(vec![vec![0.0, 0.0], vec![2.0, 0.3], vec![0.4, 1.5]]).unwrap();
        let f = FunctionSpec::expression("exp(x1 - x2) + x2^2").unwrap();
        let cfg = QuadratureConfig { abs_tol: 1e-5, rel_tol: 0.0, ..Default::default() };
        let mut last = f64::INFINITY;
        integrate_bracketed_observed(&s, &f, &cfg, |st| {
            assert!(st.gap() <= last + 1e-14 * last.abs().min(1.0), "{} > {last}", st.gap());
            last = st.gap();
        })
        .unwrap();
    }

    #[test]
    fn equal_gaps_split_in_creation_order() {
        let a = Entry { gap: 1.0, id: 3, slot: 0 };
        let b = Entry { gap: 1.0, id: 5, slot: 1 };
        let mut heap = BinaryHeap::from(vec![b, a]);
        assert_eq!(heap.pop().unwrap().id, 3);
    }
}
