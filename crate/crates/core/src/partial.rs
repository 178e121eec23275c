//! Partial optimization of the modified problem over the coordinates touched
//! by a modification set.
//!
//! Optimizing any subset of primal coordinates can only lower `P~`, and any
//! subset of dual coordinates can only raise `D~`, so the gap at the
//! resulting check pair is no larger than at the old pair and every bound
//! tightens. Both passes keep the work proportional to the nonzeros of the
//! touched columns or rows.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{Bounds, DeltaStats};
use crate::error::{Error, Result};
use crate::objective::{Loss, Objective};
use crate::scalar::{clamp, Scalar};
use crate::solver::{CachedStats, PrimalDualSolution};
use crate::sparse::{ModificationSet, OverlayView};

/// Shape of a modification, which fixes the coordinates worth re-optimizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Scattered cells.
    Spot,
    /// Whole rows.
    Instance,
    /// Whole columns.
    Feature,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Spot, Scenario::Instance, Scenario::Feature];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Spot => "spot",
            Scenario::Instance => "instance",
            Scenario::Feature => "feature",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spot" => Ok(Scenario::Spot),
            "instance" => Ok(Scenario::Instance),
            "feature" => Ok(Scenario::Feature),
            other => Err(Error::InvalidArgument(format!(
                "unknown scenario `{other}` (expected spot, instance or feature)"
            ))),
        }
    }
}

/// Sweep budget of a partial optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_passes: usize,
    /// Stop once a full sweep improves the objective by less than this.
    pub progress_tol: f64,
}

impl Budget {
    pub const DEFAULT_PASSES: usize = 20;

    /// Default budget relative to the size of the objective being improved.
    pub fn relative_to(scale: f64) -> Self {
        Self {
            max_passes: Self::DEFAULT_PASSES,
            progress_tol: 1e-10 * (1.0 + scale.abs()),
        }
    }
}

/// Which coordinates to re-optimize, and for how long.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialPlan {
    pub scenario: Scenario,
    pub max_passes: usize,
    pub progress_tol: f64,
}

impl PartialPlan {
    pub fn new(scenario: Scenario, budget: Budget) -> Self {
        Self {
            scenario,
            max_passes: budget.max_passes,
            progress_tol: budget.progress_tol,
        }
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_passes: self.max_passes,
            progress_tol: self.progress_tol,
        }
    }

    /// `(J, I)`: spot uses both touched sets, instance only the rows,
    /// feature only the columns.
    pub fn coordinates<F: Scalar>(&self, mods: &ModificationSet<F>) -> (Vec<usize>, Vec<usize>) {
        match self.scenario {
            Scenario::Spot => (mods.touched_cols(), mods.touched_rows()),
            Scenario::Instance => (Vec::new(), mods.touched_rows()),
            Scenario::Feature => (mods.touched_cols(), Vec::new()),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A partially re-optimized pair, stored sparsely: only coordinates in
/// `J`/`I` and statistics that those coordinates feed into are kept.
/// Everything else equals the old solution.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSolution<F> {
    /// `w_check_j` for `j in J`.
    pub w: BTreeMap<usize, F>,
    /// `alpha_check_i` for `i in I`.
    pub alpha: BTreeMap<usize, F>,
    /// `z~_i^T w_check` for every row with a nonzero in a column of `J`.
    pub row_scores: BTreeMap<usize, F>,
    /// `z~_j^T alpha_check` for every column with a nonzero in a row of `I`.
    pub col_duals: BTreeMap<usize, F>,
    /// `P~(w_check) - P~(w) <= 0`
    pub primal_delta: F,
    /// `D~(alpha_check) - D~(alpha) >= 0`
    pub dual_delta: F,
    pub primal_passes: usize,
    pub dual_passes: usize,
}

impl<F: Scalar> CheckSolution<F> {
    pub fn empty() -> Self {
        Self {
            w: BTreeMap::new(),
            alpha: BTreeMap::new(),
            row_scores: BTreeMap::new(),
            col_duals: BTreeMap::new(),
            primal_delta: F::zero(),
            dual_delta: F::zero(),
            primal_passes: 0,
            dual_passes: 0,
        }
    }

    /// `|primal_delta| + dual_delta`.
    pub fn improvement(&self) -> F {
        self.dual_delta - self.primal_delta
    }

    /// Full primal vector.
    pub fn w_check(&self, old: &[F]) -> Vec<F> {
        let mut w = old.to_vec();
        for (&j, &v) in &self.w {
            w[j] = v;
        }
        w
    }

    /// Full dual vector.
    pub fn alpha_check(&self, old: &[F]) -> Vec<F> {
        let mut a = old.to_vec();
        for (&i, &v) in &self.alpha {
            a[i] = v;
        }
        a
    }

    /// Combines a primal-only and a dual-only result.
    pub fn merge(primal: Self, dual: Self) -> Self {
        Self {
            w: primal.w,
            row_scores: primal.row_scores,
            primal_delta: primal.primal_delta,
            primal_passes: primal.primal_passes,
            alpha: dual.alpha,
            col_duals: dual.col_duals,
            dual_delta: dual.dual_delta,
            dual_passes: dual.dual_passes,
        }
    }
}

fn check_inputs<F: Scalar>(
    view: &OverlayView<'_, F>,
    solution: &PrimalDualSolution<F>,
    cached: &CachedStats<F>,
) -> Result<()> {
    let (n, d) = (view.n(), view.d());
    for (what, expected, found) in [
        ("dual vector", n, solution.alpha.len()),
        ("primal vector", d, solution.w.len()),
        ("cached row statistics", n, cached.n()),
        ("cached column statistics", d, cached.d()),
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

fn sorted_unique(idx: &[usize], bound: usize, what: &str) -> Result<Vec<usize>> {
    let mut out = idx.to_vec();
    out.sort_unstable();
    out.dedup();
    if let Some(&last) = out.last() {
        if last >= bound {
            return Err(Error::InvalidArgument(format!(
                "{what} index {last} out of range (size {bound})"
            )));
        }
    }
    Ok(out)
}

/// Cyclic coordinate descent on `P~` over `w_j, j in J`, all other
/// coordinates frozen. Each step is an exact one-dimensional minimization.
pub fn partial_primal_optimize<F: Scalar>(
    view: &OverlayView<'_, F>,
    obj: &Objective<F>,
    solution: &PrimalDualSolution<F>,
    cached: &CachedStats<F>,
    delta: &DeltaStats<F>,
    cols: &[usize],
    budget: &Budget,
) -> Result<CheckSolution<F>> {
    if cols.is_empty() {
        return Err(Error::InvalidArgument("empty primal coordinate set".into()));
    }
    check_inputs(view, solution, cached)?;
    let cols = sorted_unique(cols, view.d(), "column")?;
    let n = view.n();
    let nf = F::from_usize(n.max(1)).unwrap();
    let lambda = obj.lambda();
    let half = F::lit(0.5);

    // Rows reached by the chosen columns get a slot in a dense score buffer.
    let mut slot_of: HashMap<usize, usize> = HashMap::new();
    let mut rows: Vec<usize> = Vec::new();
    let mut entries: Vec<Vec<(usize, F)>> = Vec::with_capacity(cols.len());
    for &j in &cols {
        let col = view
            .col(j)
            .map(|(i, v)| {
                let slot = *slot_of.entry(i).or_insert_with(|| {
                    rows.push(i);
                    rows.len() - 1
                });
                (slot, view.label(i) * v)
            })
            .collect();
        entries.push(col);
    }
    let mut scores: Vec<F> = rows
        .iter()
        .map(|&i| delta.rows.get(&i).map_or(cached.row_scores[i], |r| r.score))
        .collect();
    let mut w: Vec<F> = cols.iter().map(|&j| solution.w[j]).collect();

    let tol = F::lit(budget.progress_tol);
    let mut total = F::zero();
    let mut passes = 0;
    let mut work: Vec<(F, F)> = Vec::new();
    while passes < budget.max_passes {
        passes += 1;
        let mut sweep_gain = F::zero();
        for (k, col) in entries.iter().enumerate() {
            work.clear();
            work.extend(col.iter().map(|&(slot, z)| (z, scores[slot])));
            let t = minimize_coordinate(&work, w[k], obj, nf);
            if t == F::zero() {
                continue;
            }
            let loss_change: F = work
                .iter()
                .map(|&(z, s)| obj.loss.value(s + t * z) - obj.loss.value(s))
                .sum();
            let w_new = w[k] + t;
            let change = loss_change / nf + half * lambda * (w_new * w_new - w[k] * w[k]);
            if change >= F::zero() {
                continue;
            }
            w[k] = w_new;
            for &(slot, z) in col {
                scores[slot] += t * z;
            }
            total += change;
            sweep_gain -= change;
        }
        if sweep_gain < tol {
            break;
        }
    }

    let mut out = CheckSolution::empty();
    out.w = cols.iter().copied().zip(w).collect();
    out.row_scores = rows.into_iter().zip(scores).collect();
    out.primal_delta = total;
    out.primal_passes = passes;
    Ok(out)
}

/// Exact minimizer offset `t` of
/// `f(t) = 1/n sum phi(s + t z) + lambda/2 (w0 + t)^2`
/// over the pairs `(z, s)` of one column.
///
/// `f'` is continuous, nondecreasing and piecewise linear with knots where a
/// margin crosses `1 - gamma` or `1`. A binary search over the sorted knots
/// finds the linear piece holding the root, which is then solved exactly.
pub(crate) fn minimize_coordinate<F: Scalar>(pairs: &[(F, F)], w0: F, obj: &Objective<F>, nf: F) -> F {
    let one = F::one();
    let gamma = obj.gamma();
    let lambda = obj.lambda();
    let slope = |t: F| -> F {
        let g: F = pairs
            .iter()
            .map(|&(z, s)| z * obj.loss.derivative(s + t * z))
            .sum();
        g / nf + lambda * (w0 + t)
    };
    let curvature = |t: F| -> F {
        let q: F = pairs
            .iter()
            .filter(|&&(z, s)| {
                let r = s + t * z;
                r > one - gamma && r < one
            })
            .map(|&(z, _)| z * z)
            .sum();
        lambda + q / (nf * gamma)
    };

    let mut knots: Vec<F> = Vec::with_capacity(2 * pairs.len());
    for &(z, s) in pairs {
        if z != F::zero() {
            knots.push((one - gamma - s) / z);
            knots.push((one - s) / z);
        }
    }
    knots.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite knots"));
    knots.dedup();

    let (anchor, probe) = if knots.is_empty() {
        (F::zero(), F::zero())
    } else {
        let below = knots.partition_point(|&t| slope(t) <= F::zero());
        if below == 0 {
            (knots[0], knots[0] - one)
        } else if below == knots.len() {
            let last = knots[below - 1];
            (last, last + one)
        } else {
            let (a, b) = (knots[below - 1], knots[below]);
            (a, a + (b - a) * F::lit(0.5))
        }
    };
    let g = slope(anchor);
    if g == F::zero() {
        return anchor;
    }
    let t = anchor - g / curvature(probe);
    if t.is_finite() {
        t
    } else {
        F::zero()
    }
}

/// Cyclic dual coordinate ascent on `D~` over `alpha_i, i in I`, using the
/// same clipped closed-form step as the full solver.
pub fn partial_dual_optimize<F: Scalar>(
    view: &OverlayView<'_, F>,
    obj: &Objective<F>,
    solution: &PrimalDualSolution<F>,
    cached: &CachedStats<F>,
    delta: &DeltaStats<F>,
    rows: &[usize],
    budget: &Budget,
) -> Result<CheckSolution<F>> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("empty dual coordinate set".into()));
    }
    check_inputs(view, solution, cached)?;
    let rows = sorted_unique(rows, view.n(), "row")?;
    let nf = F::from_usize(view.n()).unwrap();
    let lambda = obj.lambda();
    let gamma = obj.gamma();
    let (zero, one, half) = (F::zero(), F::one(), F::lit(0.5));
    let scale = one / (nf * lambda);

    let mut slot_of: HashMap<usize, usize> = HashMap::new();
    let mut cols: Vec<usize> = Vec::new();
    let mut entries: Vec<Vec<(usize, F)>> = Vec::with_capacity(rows.len());
    let mut sq_norms: Vec<F> = Vec::with_capacity(rows.len());
    for &i in &rows {
        let y = view.label(i);
        let mut sq = zero;
        let row = view
            .row(i)
            .map(|(j, v)| {
                sq += v * v;
                let slot = *slot_of.entry(j).or_insert_with(|| {
                    cols.push(j);
                    cols.len() - 1
                });
                (slot, y * v)
            })
            .collect();
        entries.push(row);
        sq_norms.push(sq);
    }
    // Unscaled dots z~_j^T alpha.
    let mut dots: Vec<F> = cols
        .iter()
        .map(|&j| delta.cols.get(&j).map_or(cached.col_duals[j], |c| c.dual))
        .collect();
    let mut alpha: Vec<F> = rows.iter().map(|&i| solution.alpha[i]).collect();

    let tol = F::lit(budget.progress_tol);
    let mut total = zero;
    let mut passes = 0;
    while passes < budget.max_passes {
        passes += 1;
        let mut sweep_gain = zero;
        for (k, row) in entries.iter().enumerate() {
            let a = alpha[k];
            let margin = row.iter().map(|&(slot, z)| z * dots[slot]).sum::<F>() * scale;
            let step = (one - margin - gamma * a) / (gamma + sq_norms[k] * scale);
            let a_new = clamp(a + step, zero, one);
            let da = a_new - a;
            if da == zero {
                continue;
            }
            // -1/n [phi*(-a') - phi*(-a)] - sum_j [(v_j')^2 - v_j^2] / (2 lambda)
            let loss_part = (da - half * gamma * (a_new * a_new - a * a)) / nf;
            let quad: F = row
                .iter()
                .map(|&(slot, z)| da * z * (dots[slot] + dots[slot] + da * z))
                .sum();
            let change = loss_part - quad * half * scale / nf;
            if change <= zero {
                continue;
            }
            alpha[k] = a_new;
            for &(slot, z) in row {
                dots[slot] += da * z;
            }
            total += change;
            sweep_gain += change;
        }
        if sweep_gain < tol {
            break;
        }
    }

    let mut out = CheckSolution::empty();
    out.alpha = rows.into_iter().zip(alpha).collect();
    out.col_duals = cols.into_iter().zip(dots).collect();
    out.dual_delta = total;
    out.dual_passes = passes;
    Ok(out)
}

/// Runs the plan: the primal pass over `J` first, then the dual pass over
/// `I`, each against the old counterpart.
pub fn run_partial<F: Scalar>(
    plan: &PartialPlan,
    view: &OverlayView<'_, F>,
    obj: &Objective<F>,
    solution: &PrimalDualSolution<F>,
    cached: &CachedStats<F>,
    delta: &DeltaStats<F>,
) -> Result<CheckSolution<F>> {
    let (cols, rows) = plan.coordinates(view.delta());
    let budget = plan.budget();
    let primal = if cols.is_empty() {
        CheckSolution::empty()
    } else {
        partial_primal_optimize(view, obj, solution, cached, delta, &cols, &budget)?
    };
    let dual = if rows.is_empty() {
        CheckSolution::empty()
    } else {
        partial_dual_optimize(view, obj, solution, cached, delta, &rows, &budget)?
    };
    Ok(CheckSolution::merge(primal, dual))
}

/// Bounds around the check pair. The gap follows from the telescoped
/// objective changes; every interval is intersected with the corresponding
/// interval of `original`, so none can widen.
pub fn tightened_bounds<'a, F: Scalar>(check: &'a CheckSolution<F>, original: &'a Bounds<'a, F>) -> Result<Bounds<'a, F>> {
    let before = original.gap();
    let after = before + check.primal_delta - check.dual_delta;
    if after > before + F::lit(1e-12) {
        return Err(Error::Inconsistent(format!(
            "partial optimization raised the gap from {before} to {after}"
        )));
    }
    let view = original.view().with_check(check);
    Ok(Bounds::from_view(view, after.max(F::zero()), original.objective(), Some(original)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_json_round_trip() {
        let plan = PartialPlan::new(Scenario::Instance, Budget::relative_to(2.0));
        let json = plan.to_json().unwrap();
        assert!(json.contains(r#""scenario":"instance""#));
        assert!(json.contains(r#""max_passes":20"#));
        assert_eq!(PartialPlan::from_json(&json).unwrap(), plan);
        assert!((plan.progress_tol - 3e-10).abs() < 1e-24);
    }

    #[test]
    fn plan_coordinates() {
        let m = ModificationSet::new(vec![(3, 1, 0.5), (0, 2, 1.0)]);
        let spot = PartialPlan::new(Scenario::Spot, Budget::relative_to(0.0));
        assert_eq!(spot.coordinates(&m), (vec![1, 2], vec![0, 3]));
        let inst = PartialPlan { scenario: Scenario::Instance, ..spot };
        assert_eq!(inst.coordinates(&m), (vec![], vec![0, 3]));
        let feat = PartialPlan { scenario: Scenario::Feature, ..spot };
        assert_eq!(feat.coordinates(&m), (vec![1, 2], vec![]));
    }

    #[test]
    fn scenario_parse() {
        assert_eq!("feature".parse::<Scenario>().unwrap(), Scenario::Feature);
        assert!("cells".parse::<Scenario>().is_err());
    }

    fn brute_min(pairs: &[(f64, f64)], w0: f64, obj: &Objective<f64>, n: f64) -> f64 {
        let f = |t: f64| {
            pairs.iter().map(|&(z, s)| obj.loss.value(s + t * z)).sum::<f64>() / n + 0.5 * obj.lambda() * (w0 + t).powi(2)
        };
        let (mut a, mut b) = (-50.0, 50.0);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..300 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn coordinate_step_matches_golden_section() {
        let obj = Objective::new(0.5, 0.1).unwrap();
        let cases: Vec<(Vec<(f64, f64)>, f64)> = vec![
            (vec![(1.0, 0.2), (-0.5, 0.9), (0.3, 1.4)], 0.3),
            (vec![(2.0, -1.0)], -2.0),
            (vec![(0.7, 0.8), (0.7, 0.85), (-1.2, 0.1), (0.4, 3.0)], 1.0),
            (vec![], 0.7),
        ];
        for (pairs, w0) in cases {
            let t = minimize_coordinate(&pairs, w0, &obj, 4.0);
            let b = brute_min(&pairs, w0, &obj, 4.0);
            assert!((t - b).abs() < 1e-8, "{t} vs {b}");
        }
    }
}
