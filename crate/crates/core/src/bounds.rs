//! Certified per-coordinate bounds on the optimum of the modified problem,
//! computed from the old solution, its cached statistics, and the edited
//! cells only.
//!
//! The work is split into three steps:
//!
//! 1. [`update_delta_stats`] refreshes the cached dot products, norms and
//!    sign-split column sums of every touched row and column. Only the cells
//!    of the modification set are read.
//! 2. [`compute_gap`] evaluates the duality gap of the *new* problem at the
//!    *old* solution pair from those refreshed quantities.
//! 3. [`Bounds`] turns the gap into two solution spheres, one around the old
//!    dual vector (the loss is `1/gamma`-smooth, so the new dual is
//!    `gamma/n`-strongly concave) and one around the old primal vector (the
//!    penalty is `lambda`-strongly convex). Extremes of a linear function over
//!    a sphere are closed form (see [`sphere_extremes`]), which gives the
//!    intervals.
//!
//! Intervals of coordinates whose statistics did not change only depend on
//! cached values and the two radii. They are evaluated lazily, so the whole
//! path costs O(|M|) plus whatever the caller chooses to materialize.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{scaled_range, Interval, Loss, Objective, Penalty};
use crate::partial::CheckSolution;
use crate::scalar::Scalar;
use crate::solver::{CachedStats, PrimalDualSolution};
use crate::sparse::OverlayView;

/// Refreshed statistics of a touched row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowDelta<F> {
    /// `z~_i^T w`
    pub score: F,
    /// `||x~_i||_2`
    pub norm: F,
}

/// Refreshed statistics of a touched column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColDelta<F> {
    /// `z~_j^T alpha` (unscaled)
    pub dual: F,
    /// `||x~_j||_2`
    pub norm: F,
    pub neg_sum: F,
    pub pos_sum: F,
}

/// Cached statistics of the rows and columns touched by a modification set,
/// updated to the modified data.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeltaStats<F> {
    pub rows: BTreeMap<usize, RowDelta<F>>,
    pub cols: BTreeMap<usize, ColDelta<F>>,
    touched: usize,
}

impl<F: Scalar> DeltaStats<F> {
    pub fn empty() -> Self {
        Self {
            rows: BTreeMap::new(),
            cols: BTreeMap::new(),
            touched: 0,
        }
    }

    /// Number of stored entries read while building these statistics.
    pub fn touched(&self) -> usize {
        self.touched
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() && self.cols.is_empty()
    }
}

struct Acc<F> {
    dot: F,
    sq: F,
    neg: F,
    pos: F,
}

/// Updates the cached statistics of every touched row and column with a
/// single pass over the edited cells.
///
/// For an edit `x_ij -> x~_ij` with `dz = y_i (x~_ij - x_ij)`:
/// the row score gains `w_j dz`, the column dual gains `alpha_i dz`, squared
/// norms gain `x~_ij^2 - x_ij^2`, and the sign-split column sums swap the old
/// signed entry for the new one.
pub fn update_delta_stats<F: Scalar>(
    cached: &CachedStats<F>,
    view: &OverlayView<'_, F>,
    solution: &PrimalDualSolution<F>,
) -> Result<DeltaStats<F>> {
    check_dims(cached, solution, view.n(), view.d())?;
    let base = view.base();
    let mods = view.delta();
    mods.validate(view.n(), view.d())?;

    let zero = F::zero();
    let mut touched = 0usize;
    let mut rows: BTreeMap<usize, Acc<F>> = BTreeMap::new();
    let mut cols: BTreeMap<usize, Acc<F>> = BTreeMap::new();
    for (i, j, new) in mods.iter() {
        let old = base.get(i, j);
        touched += 2;
        let y = base.label(i);
        let (z_old, z_new) = (y * old, y * new);
        let dz = z_new - z_old;
        let dsq = new * new - old * old;

        let row = rows.entry(i).or_insert_with(|| {
            touched += 1;
            let norm = cached.row_norms[i];
            Acc {
                dot: cached.row_scores[i],
                sq: norm * norm,
                neg: zero,
                pos: zero,
            }
        });
        row.dot += solution.w[j] * dz;
        row.sq += dsq;

        let col = cols.entry(j).or_insert_with(|| {
            touched += 1;
            let norm = cached.col_norms[j];
            Acc {
                dot: cached.col_duals[j],
                sq: norm * norm,
                neg: cached.col_neg_sums[j],
                pos: cached.col_pos_sums[j],
            }
        });
        col.dot += solution.alpha[i] * dz;
        col.sq += dsq;
        if z_old < zero {
            col.neg -= z_old;
        } else {
            col.pos -= z_old;
        }
        if z_new < zero {
            col.neg += z_new;
        } else {
            col.pos += z_new;
        }
    }

    // Round-off can push a squared norm slightly below zero.
    let root = |sq: F| sq.max(zero).sqrt();
    Ok(DeltaStats {
        rows: rows
            .into_iter()
            .map(|(i, a)| {
                (
                    i,
                    RowDelta {
                        score: a.dot,
                        norm: root(a.sq),
                    },
                )
            })
            .collect(),
        cols: cols
            .into_iter()
            .map(|(j, a)| {
                (
                    j,
                    ColDelta {
                        dual: a.dot,
                        norm: root(a.sq),
                        neg_sum: a.neg,
                        pos_sum: a.pos,
                    },
                )
            })
            .collect(),
        touched,
    })
}

fn check_dims<F: Scalar>(cached: &CachedStats<F>, sol: &PrimalDualSolution<F>, n: usize, d: usize) -> Result<()> {
    for (what, expected, found) in [
        ("cached row statistics", n, cached.n()),
        ("cached column statistics", d, cached.d()),
        ("dual vector", n, sol.alpha.len()),
        ("primal vector", d, sol.w.len()),
    ] {
        if expected != found {
            return Err(Error::DimensionMismatch {
                what,
                expected,
                found,
            });
        }
    }
    Ok(())
}

/// Duality gap of the modified problem at a primal-dual pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEvaluation<F> {
    /// Gap clamped at zero; this value drives the radii.
    pub value: F,
    /// Gap before clamping.
    pub raw: F,
    /// Entries read to evaluate it.
    pub touched: usize,
}

/// `P~(w) - D~(alpha)` at the old pair:
///
/// ```text
/// 1/n sum_{i in M_i} [phi(z~_i^T w) - phi(z_i^T w)]
///   + sum_{j in M_j} [psi*_j(z~_j^T alpha / n) - psi*_j(z_j^T alpha / n)]
///   + residual gap of the old pair
/// ```
pub fn compute_gap<F: Scalar>(
    cached: &CachedStats<F>,
    delta: &DeltaStats<F>,
    obj: &Objective<F>,
) -> GapEvaluation<F> {
    let n = cached.n();
    let mut touched = 0usize;
    let mut loss_change = F::zero();
    for (&i, row) in &delta.rows {
        touched += 1;
        loss_change += obj.loss.value(row.score) - obj.loss.value(cached.row_scores[i]);
    }
    let mut conj_change = F::zero();
    if n > 0 {
        let nf = F::from_usize(n).unwrap();
        for (&j, col) in &delta.cols {
            touched += 1;
            conj_change += obj.penalty.conjugate_component(col.dual / nf)
                - obj.penalty.conjugate_component(cached.col_duals[j] / nf);
        }
        loss_change /= nf;
    }
    let raw = loss_change + conj_change + cached.residual_gap;
    GapEvaluation {
        value: raw.max(F::zero()),
        raw,
        touched,
    }
}

/// Which solution sphere produced an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCase {
    /// Dual sphere, needs a smooth loss.
    Dual,
    /// Primal sphere, needs a strongly convex penalty.
    Primal,
    /// Intersection of both.
    Combined,
}

/// Radii of the two solution spheres for a given gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radii<F> {
    /// `sqrt(2 G / lambda)`
    pub primal: F,
    /// `sqrt(2 n G / gamma)`
    pub dual: F,
}

impl<F: Scalar> Radii<F> {
    pub fn new(gap: F, obj: &Objective<F>, n: usize) -> Self {
        let two = F::lit(2.0);
        let gap = gap.max(F::zero());
        let n = F::from_usize(n).unwrap();
        Self {
            primal: (two * gap / obj.lambda()).sqrt(),
            dual: (two * n * gap / obj.gamma()).sqrt(),
        }
    }
}

/// `[eta^T c - r ||eta||, eta^T c + r ||eta||]`: the range of `eta^T q` over
/// the ball `||q - c|| <= r`.
pub fn sphere_extremes<F: Scalar>(eta: &[F], center: &[F], radius: F) -> Interval<F> {
    assert_eq!(eta.len(), center.len(), "vector lengths");
    let dot: F = eta.iter().zip(center).map(|(&a, &b)| a * b).sum();
    let norm = eta.iter().map(|&a| a * a).sum::<F>().sqrt();
    Interval::new(dot - radius * norm, dot + radius * norm)
}

const INTERSECTION_SLACK: f64 = 1e-9;

/// Intersects two intervals that should both contain the same point.
/// A gap above 1e-9 (relative to magnitude) is a bug; smaller gaps from
/// rounding collapse to the midpoint.
pub(crate) fn intersect_checked<F: Scalar>(a: &Interval<F>, b: &Interval<F>, what: &str, index: usize) -> Result<Interval<F>> {
    let out = a.intersect(b);
    if out.lo <= out.hi {
        return Ok(out);
    }
    let scale = F::one().max(out.lo.abs()).max(out.hi.abs());
    if out.lo - out.hi > F::lit(INTERSECTION_SLACK) * scale {
        return Err(Error::Inconsistent(format!(
            "{what} {index}: intervals [{}, {}] and [{}, {}] are disjoint",
            a.lo, a.hi, b.lo, b.hi
        )));
    }
    let mid = (out.lo + out.hi) / F::lit(2.0);
    Ok(Interval::point(mid))
}

/// Current centers of both spheres: the old solution, overlaid with the
/// refreshed statistics of touched coordinates and, after partial
/// optimization, with the check solution.
#[derive(Debug, Clone, Copy)]
pub struct CenterView<'a, F> {
    cached: &'a CachedStats<F>,
    solution: &'a PrimalDualSolution<F>,
    delta: &'a DeltaStats<F>,
    check: Option<&'a CheckSolution<F>>,
}

impl<'a, F: Scalar> CenterView<'a, F> {
    pub fn new(
        cached: &'a CachedStats<F>,
        solution: &'a PrimalDualSolution<F>,
        delta: &'a DeltaStats<F>,
        check: Option<&'a CheckSolution<F>>,
    ) -> Result<Self> {
        check_dims(cached, solution, cached.n(), cached.d())?;
        Ok(Self {
            cached,
            solution,
            delta,
            check,
        })
    }

    /// Same view with the centers moved to a check solution.
    pub fn with_check(self, check: &'a CheckSolution<F>) -> Self {
        Self {
            check: Some(check),
            ..self
        }
    }

    pub fn cached(&self) -> &'a CachedStats<F> {
        self.cached
    }

    pub fn solution(&self) -> &'a PrimalDualSolution<F> {
        self.solution
    }

    pub fn delta(&self) -> &'a DeltaStats<F> {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.cached.n()
    }

    pub fn d(&self) -> usize {
        self.cached.d()
    }

    #[inline]
    pub fn w(&self, j: usize) -> F {
        self.check
            .and_then(|c| c.w.get(&j).copied())
            .unwrap_or(self.solution.w[j])
    }

    #[inline]
    pub fn alpha(&self, i: usize) -> F {
        self.check
            .and_then(|c| c.alpha.get(&i).copied())
            .unwrap_or(self.solution.alpha[i])
    }

    #[inline]
    pub fn row_score(&self, i: usize) -> F {
        if let Some(s) = self.check.and_then(|c| c.row_scores.get(&i)) {
            return *s;
        }
        self.delta
            .rows
            .get(&i)
            .map_or(self.cached.row_scores[i], |r| r.score)
    }

    #[inline]
    pub fn row_norm(&self, i: usize) -> F {
        self.delta
            .rows
            .get(&i)
            .map_or(self.cached.row_norms[i], |r| r.norm)
    }

    #[inline]
    pub fn col_dual(&self, j: usize) -> F {
        if let Some(s) = self.check.and_then(|c| c.col_duals.get(&j)) {
            return *s;
        }
        self.delta
            .cols
            .get(&j)
            .map_or(self.cached.col_duals[j], |c| c.dual)
    }

    #[inline]
    pub fn col_norm(&self, j: usize) -> F {
        self.delta
            .cols
            .get(&j)
            .map_or(self.cached.col_norms[j], |c| c.norm)
    }

    /// Range of `1/n z~_j^T a` over the dual box.
    #[inline]
    pub fn col_range(&self, j: usize) -> Interval<F> {
        let (neg, pos) = self.delta.cols.get(&j).map_or(
            (self.cached.col_neg_sums[j], self.cached.col_pos_sums[j]),
            |c| (c.neg_sum, c.pos_sum),
        );
        scaled_range(neg, pos, self.n())
    }

    /// Columns whose center or radius inputs differ from the cached ones.
    pub fn touched_cols(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.delta.cols.keys().copied().collect();
        if let Some(c) = self.check {
            out.extend(c.w.keys().copied());
            out.extend(c.col_duals.keys().copied());
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Rows whose center or radius inputs differ from the cached ones.
    pub fn touched_rows(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.delta.rows.keys().copied().collect();
        if let Some(c) = self.check {
            out.extend(c.alpha.keys().copied());
            out.extend(c.row_scores.keys().copied());
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Lazily evaluated bounds on every `w~*_j` and `alpha~*_i`.
///
/// A `Bounds` built from a check solution keeps a reference to the bounds of
/// the old pair and reports the intersection, so refining never widens an
/// interval.
#[derive(Debug, Clone, Copy)]
pub struct Bounds<'a, F> {
    view: CenterView<'a, F>,
    obj: &'a Objective<F>,
    gap: F,
    radii: Radii<F>,
    prior: Option<&'a Bounds<'a, F>>,
}

impl<'a, F: Scalar> Bounds<'a, F> {
    /// Bounds around the old solution for a gap from [`compute_gap`].
    pub fn new(
        cached: &'a CachedStats<F>,
        solution: &'a PrimalDualSolution<F>,
        delta: &'a DeltaStats<F>,
        gap: F,
        obj: &'a Objective<F>,
    ) -> Result<Self> {
        let view = CenterView::new(cached, solution, delta, None)?;
        Ok(Self::from_view(view, gap, obj, None))
    }

    pub(crate) fn from_view(view: CenterView<'a, F>, gap: F, obj: &'a Objective<F>, prior: Option<&'a Bounds<'a, F>>) -> Self {
        let gap = gap.max(F::zero());
        Self {
            radii: Radii::new(gap, obj, view.n()),
            view,
            obj,
            gap,
            prior,
        }
    }

    pub fn gap(&self) -> F {
        self.gap
    }

    pub fn radii(&self) -> Radii<F> {
        self.radii
    }

    pub fn view(&self) -> &CenterView<'a, F> {
        &self.view
    }

    pub fn objective(&self) -> &'a Objective<F> {
        self.obj
    }

    pub fn n(&self) -> usize {
        self.view.n()
    }

    pub fn d(&self) -> usize {
        self.view.d()
    }

    /// Dual-sphere bound on `w~*_j`: the range of `1/n z~_j^T a` over the
    /// dual sphere, clipped to its range over the dual box, pushed through
    /// the monotone map `d psi*_j`.
    pub fn w_dual(&self, j: usize) -> Interval<F> {
        let n = self.n();
        let inner = if n == 0 {
            Interval::point(F::zero())
        } else {
            let nf = F::from_usize(n).unwrap();
            let center = self.view.col_dual(j) / nf;
            let spread = self.view.col_norm(j) * self.radii.dual / nf;
            Interval::new(center - spread, center + spread).clip(&self.view.col_range(j))
        };
        let pen = &self.obj.penalty;
        Interval::new(pen.conjugate_subgradient(inner.lo).lo, pen.conjugate_subgradient(inner.hi).hi)
    }

    /// Primal-sphere bound on `w~*_j`.
    pub fn w_primal(&self, j: usize) -> Interval<F> {
        let w = self.view.w(j);
        Interval::new(w - self.radii.primal, w + self.radii.primal)
    }

    /// Dual-sphere bound on `alpha~*_i`, clipped to the dual box.
    pub fn alpha_dual(&self, i: usize) -> Interval<F> {
        let a = self.view.alpha(i);
        Interval::new(a - self.radii.dual, a + self.radii.dual).clip(&self.obj.loss.dual_range())
    }

    /// Primal-sphere bound on `alpha~*_i`: the margin `z~_i^T w` ranges over
    /// `score -/+ ||x~_i|| r`, and `alpha = -phi'(margin)` is nonincreasing in
    /// the margin, so the upper margin gives the lower bound.
    pub fn alpha_primal(&self, i: usize) -> Interval<F> {
        let score = self.view.row_score(i);
        let spread = self.view.row_norm(i) * self.radii.primal;
        let loss = &self.obj.loss;
        let lo = -loss.subgradient(score + spread).hi;
        let hi = -loss.subgradient(score - spread).lo;
        Interval::new(lo, hi).clip(&loss.dual_range())
    }

    /// Lower bound on the margin `z~_i^T w~*` from the primal sphere.
    pub fn margin_lower(&self, i: usize) -> F {
        self.view.row_score(i) - self.view.row_norm(i) * self.radii.primal
    }

    fn w_own(&self, j: usize, case: BoundCase) -> Result<Interval<F>> {
        match case {
            BoundCase::Dual => Ok(self.w_dual(j)),
            BoundCase::Primal => Ok(self.w_primal(j)),
            BoundCase::Combined => intersect_checked(&self.w_primal(j), &self.w_dual(j), "w", j),
        }
    }

    fn alpha_own(&self, i: usize, case: BoundCase) -> Result<Interval<F>> {
        match case {
            BoundCase::Dual => Ok(self.alpha_dual(i)),
            BoundCase::Primal => Ok(self.alpha_primal(i)),
            BoundCase::Combined => {
                intersect_checked(&self.alpha_primal(i), &self.alpha_dual(i), "alpha", i)
            }
        }
    }

    /// Interval for `w~*_j` under `case`.
    pub fn w_bound(&self, j: usize, case: BoundCase) -> Result<Interval<F>> {
        let own = self.w_own(j, case)?;
        match self.prior {
            Some(p) => intersect_checked(&own, &p.w_bound(j, case)?, "w", j),
            None => Ok(own),
        }
    }

    /// Interval for `alpha~*_i` under `case`.
    pub fn alpha_bound(&self, i: usize, case: BoundCase) -> Result<Interval<F>> {
        let own = self.alpha_own(i, case)?;
        match self.prior {
            Some(p) => intersect_checked(&own, &p.alpha_bound(i, case)?, "alpha", i),
            None => Ok(own),
        }
    }

    pub fn w_bounds(&self, case: BoundCase) -> Result<Vec<Interval<F>>> {
        (0..self.d()).map(|j| self.w_bound(j, case)).collect()
    }

    pub fn alpha_bounds(&self, case: BoundCase) -> Result<Vec<Interval<F>>> {
        (0..self.n()).map(|i| self.alpha_bound(i, case)).collect()
    }

    /// Coordinates whose intervals are not determined by cached values and
    /// the radii alone.
    pub fn touched_cols(&self) -> Vec<usize> {
        let mut out = self.view.touched_cols();
        if let Some(p) = self.prior {
            out.extend(p.touched_cols());
            out.sort_unstable();
            out.dedup();
        }
        out
    }

    pub fn touched_rows(&self) -> Vec<usize> {
        let mut out = self.view.touched_rows();
        if let Some(p) = self.prior {
            out.extend(p.touched_rows());
            out.sort_unstable();
            out.dedup();
        }
        out
    }

    /// Every interval, O(n + d).
    pub fn report(&self, case: BoundCase) -> Result<BoundsReport<F>> {
        Ok(BoundsReport {
            case,
            gap: self.gap,
            radii: self.radii,
            w_bounds: self.w_bounds(case)?,
            alpha_bounds: self.alpha_bounds(case)?,
        })
    }

    /// Intervals of touched coordinates only, plus the radii from which any
    /// other coordinate follows in O(1).
    pub fn sparse_report(&self, case: BoundCase) -> Result<SparseBoundsReport<F>> {
        let w_bounds = self
            .touched_cols()
            .into_iter()
            .map(|j| Ok((j, self.w_bound(j, case)?)))
            .collect::<Result<_>>()?;
        let alpha_bounds = self
            .touched_rows()
            .into_iter()
            .map(|i| Ok((i, self.alpha_bound(i, case)?)))
            .collect::<Result<_>>()?;
        Ok(SparseBoundsReport {
            case,
            gap: self.gap,
            radii: self.radii,
            n: self.n(),
            d: self.d(),
            w_bounds,
            alpha_bounds,
        })
    }
}

/// Intervals for all coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct BoundsReport<F: Scalar> {
    pub case: BoundCase,
    pub gap: F,
    pub radii: Radii<F>,
    pub w_bounds: Vec<Interval<F>>,
    pub alpha_bounds: Vec<Interval<F>>,
}

/// Intervals for touched coordinates only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct SparseBoundsReport<F: Scalar> {
    pub case: BoundCase,
    pub gap: F,
    pub radii: Radii<F>,
    pub n: usize,
    pub d: usize,
    pub w_bounds: Vec<(usize, Interval<F>)>,
    pub alpha_bounds: Vec<(usize, Interval<F>)>,
}

impl<F: Scalar> SparseBoundsReport<F> {
    /// Fills in untouched coordinates from the cached statistics of the old
    /// solution.
    pub fn expand(&self, cached: &CachedStats<F>, solution: &PrimalDualSolution<F>, obj: &Objective<F>) -> Result<BoundsReport<F>> {
        if cached.n() != self.n || cached.d() != self.d {
            return Err(Error::DimensionMismatch {
                what: "cached statistics for sparse report",
                expected: self.n,
                found: cached.n(),
            });
        }
        let empty = DeltaStats::empty();
        let bounds = Bounds::new(cached, solution, &empty, self.gap, obj)?;
        let mut full = bounds.report(self.case)?;
        for &(j, iv) in &self.w_bounds {
            full.w_bounds[j] = iv;
        }
        for &(i, iv) in &self.alpha_bounds {
            full.alpha_bounds[i] = iv;
        }
        full.radii = self.radii;
        Ok(full)
    }
}

/// JSON document holding either report form, tagged by `"form"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", bound = "F: Scalar")]
pub enum BoundsDocument<F: Scalar> {
    Full(BoundsReport<F>),
    Sparse(SparseBoundsReport<F>),
}

/// Full report from the dual sphere.
pub fn bounds_case_i<F: Scalar>(
    gap: F,
    delta: &DeltaStats<F>,
    cached: &CachedStats<F>,
    solution: &PrimalDualSolution<F>,
    obj: &Objective<F>,
) -> Result<BoundsReport<F>> {
    Bounds::new(cached, solution, delta, gap, obj)?.report(BoundCase::Dual)
}

/// Full report from the primal sphere.
pub fn bounds_case_ii<F: Scalar>(
    gap: F,
    delta: &DeltaStats<F>,
    cached: &CachedStats<F>,
    solution: &PrimalDualSolution<F>,
    obj: &Objective<F>,
) -> Result<BoundsReport<F>> {
    Bounds::new(cached, solution, delta, gap, obj)?.report(BoundCase::Primal)
}

/// Coordinate-wise intersection of a dual-sphere and a primal-sphere report.
pub fn bounds_case_iii<F: Scalar>(dual: &BoundsReport<F>, primal: &BoundsReport<F>) -> Result<BoundsReport<F>> {
    if dual.w_bounds.len() != primal.w_bounds.len() || dual.alpha_bounds.len() != primal.alpha_bounds.len() {
        return Err(Error::DimensionMismatch {
            what: "bounds reports",
            expected: dual.w_bounds.len(),
            found: primal.w_bounds.len(),
        });
    }
    let w_bounds = dual
        .w_bounds
        .iter()
        .zip(&primal.w_bounds)
        .enumerate()
        .map(|(j, (a, b))| intersect_checked(a, b, "w", j))
        .collect::<Result<_>>()?;
    let alpha_bounds = dual
        .alpha_bounds
        .iter()
        .zip(&primal.alpha_bounds)
        .enumerate()
        .map(|(i, (a, b))| intersect_checked(a, b, "alpha", i))
        .collect::<Result<_>>()?;
    Ok(BoundsReport {
        case: BoundCase::Combined,
        gap: dual.gap.max(primal.gap),
        radii: Radii {
            primal: primal.radii.primal,
            dual: dual.radii.dual,
        },
        w_bounds,
        alpha_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{ModificationSet, SparseDataset};

    fn setup() -> (SparseDataset<f64>, PrimalDualSolution<f64>) {
        let ds = SparseDataset::from_rows(
            2,
            vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 2.0)], vec![(1, 1.0)]],
            vec![1, 1, -1],
        )
        .unwrap();
        let sol = PrimalDualSolution {
            w: vec![1.0, 2.0],
            alpha: vec![0.5, 0.25, 1.0],
            residual_gap: 0.0,
        };
        (ds, sol)
    }

    #[test]
    fn empty_modification_touches_nothing() {
        let (ds, sol) = setup();
        let cached = crate::solver::build_cached_stats(&ds, &sol);
        let m = ModificationSet::default();
        let view = OverlayView::new(&ds, &m).unwrap();
        let delta = update_delta_stats(&cached, &view, &sol).unwrap();
        assert!(delta.is_empty());
        assert_eq!(delta.touched(), 0);
        let obj = Objective::new(0.5, 1.0).unwrap();
        assert_eq!(compute_gap(&cached, &delta, &obj).value, 0.0);
    }

    #[test]
    fn row_score_displacement() {
        let (ds, sol) = setup();
        let cached = crate::solver::build_cached_stats(&ds, &sol);
        assert_eq!(cached.row_scores[0], 3.0);
        let m = ModificationSet::new(vec![(0, 0, 0.5)]);
        let view = OverlayView::new(&ds, &m).unwrap();
        let delta = update_delta_stats(&cached, &view, &sol).unwrap();
        assert_eq!(delta.rows[&0].score, 2.5);
        assert_eq!(delta.touched(), 4);
    }

    #[test]
    fn column_norm_update_sign() {
        // Column 0 holds 1 and 2, so ||x_0||^2 = 5; editing 2 -> 1 gives 2.
        let (ds, sol) = setup();
        let cached = crate::solver::build_cached_stats(&ds, &sol);
        let m = ModificationSet::new(vec![(1, 0, 1.0)]);
        let view = OverlayView::new(&ds, &m).unwrap();
        let delta = update_delta_stats(&cached, &view, &sol).unwrap();
        assert!((delta.cols[&0].norm.powi(2) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sign_split_sums_follow_edit() {
        let (ds, sol) = setup();
        let cached = crate::solver::build_cached_stats(&ds, &sol);
        // z_{2,1} = -1; flipping x to -3 makes it +3.
        let m = ModificationSet::new(vec![(2, 1, -3.0)]);
        let view = OverlayView::new(&ds, &m).unwrap();
        let delta = update_delta_stats(&cached, &view, &sol).unwrap();
        assert_eq!(delta.cols[&1].neg_sum, 0.0);
        assert_eq!(delta.cols[&1].pos_sum, 4.0);
    }

    #[test]
    fn zero_gap_collapses_intervals() {
        let (ds, sol) = setup();
        let cached = crate::solver::build_cached_stats(&ds, &sol);
        let delta = DeltaStats::empty();
        let obj = Objective::new(0.5, 1.0).unwrap();
        let b = Bounds::new(&cached, &sol, &delta, 0.0, &obj).unwrap();
        for j in 0..2 {
            assert_eq!(b.w_primal(j), Interval::point(sol.w[j]));
            let expected = cached.col_duals[j] / 3.0;
            assert!((b.w_dual(j).lo - expected).abs() < 1e-15);
            assert_eq!(b.w_dual(j).lo, b.w_dual(j).hi);
        }
        for i in 0..3 {
            assert_eq!(b.alpha_dual(i), Interval::point(sol.alpha[i]));
            let a = obj.loss.dual_from_margin(cached.row_scores[i]);
            assert_eq!(b.alpha_primal(i), Interval::point(a));
        }
    }

    #[test]
    fn ball_extremes_closed_form() {
        let iv = sphere_extremes(&[3.0, 4.0], &[1.0, 0.0], 2.0);
        assert_eq!(iv, Interval::new(-7.0, 13.0));
    }

    #[test]
    fn combined_intersection() {
        let a = BoundsReport {
            case: BoundCase::Dual,
            gap: 1.0,
            radii: Radii { primal: 1.0, dual: 1.0 },
            w_bounds: vec![Interval::new(0.0, 2.0)],
            alpha_bounds: vec![Interval::new(0.0, 1.0)],
        };
        let b = BoundsReport {
            w_bounds: vec![Interval::new(1.0, 3.0)],
            alpha_bounds: vec![Interval::new(0.5, 0.7)],
            case: BoundCase::Primal,
            ..a.clone()
        };
        let c = bounds_case_iii(&a, &b).unwrap();
        assert_eq!(c.w_bounds[0], Interval::new(1.0, 2.0));
        assert_eq!(c.alpha_bounds[0], Interval::new(0.5, 0.7));
        let same = bounds_case_iii(&a, &a).unwrap();
        assert_eq!(same.w_bounds, a.w_bounds);

        let disjoint = BoundsReport {
            w_bounds: vec![Interval::new(5.0, 6.0)],
            ..b
        };
        assert!(matches!(bounds_case_iii(&a, &disjoint), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn high_score_gives_zero_alpha() {
        let (ds, mut sol) = setup();
        sol.w = vec![10.0, 10.0];
        let cached = crate::solver::build_cached_stats(&ds, &sol);
        let obj = Objective::new(0.5, 1.0).unwrap();
        let delta = DeltaStats::empty();
        // Row 0 margin 20, norm sqrt 2, radius sqrt(2 * 0.5) = 1.
        let b = Bounds::new(&cached, &sol, &delta, 0.5, &obj).unwrap();
        assert_eq!(b.alpha_primal(0), Interval::point(0.0));
    }

    #[test]
    fn document_json_is_tagged() {
        let r = BoundsReport {
            case: BoundCase::Combined,
            gap: 0.0,
            radii: Radii { primal: 0.0, dual: 0.0 },
            w_bounds: vec![Interval::point(1.0)],
            alpha_bounds: vec![],
        };
        let json = serde_json::to_string(&BoundsDocument::Full(r.clone())).unwrap();
        assert!(json.starts_with(r#"{"form":"full","case":"combined""#), "{json}");
        let back: BoundsDocument<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, BoundsDocument::Full(r));
    }
}
