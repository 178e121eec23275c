//! Experiment harness: synthetic data, modification generation, one trial
//! per (scenario, magnitude, lambda, seed), and CSV/JSON tables.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::bounds::{compute_gap, update_delta_stats, BoundCase, Bounds, DeltaStats, GapEvaluation};
use crate::decision::{classify, param_change_upper, screen_with_bounds, should_retrain, RetrainPolicy};
use crate::error::{Error, Result};
use crate::objective::{Interval, Objective};
use crate::partial::{run_partial, tightened_bounds, Budget, CheckSolution, PartialPlan, Scenario};
use crate::solver::{train, train_warm, CachedStats, PrimalDualSolution, TrainOptions, TrainOutput};
use crate::sparse::{normalize_rows, parse_libsvm, split_train_test, ModificationSet, OverlayView, SparseDataset};

/// `synthetic:n,d,density[,seed]`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    pub density: f64,
    pub seed: u64,
}

impl FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_prefix("synthetic:").ok_or_else(|| {
            Error::InvalidArgument(format!("`{s}` is not of the form synthetic:n,d,density[,seed]"))
        })?;
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(Error::InvalidArgument(format!(
                "`{s}` is not of the form synthetic:n,d,density[,seed]"
            )));
        }
        let bad = |what: &str| Error::InvalidArgument(format!("invalid {what} in `{s}`"));
        let n = parts[0].parse().map_err(|_| bad("n"))?;
        let d = parts[1].parse().map_err(|_| bad("d"))?;
        let density: f64 = parts[2].parse().map_err(|_| bad("density"))?;
        let seed = match parts.get(3) {
            Some(p) => p.parse().map_err(|_| bad("seed"))?,
            None => 0,
        };
        if !(density > 0.0 && density <= 1.0) {
            return Err(bad("density"));
        }
        Ok(Self { n, d, density, seed })
    }
}

impl SyntheticSpec {
    /// Features uniform in `[0, 1]` on a Bernoulli(density) mask, labels
    /// from a random hyperplane with 10% flipped, rows scaled to unit norm.
    pub fn generate(&self) -> Result<SparseDataset<f64>> {
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidArgument(format!("density {} not in (0, 1]", self.density)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let w_true: Vec<f64> = (0..self.d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        // Gap between consecutive nonzeros of the flattened mask.
        let skip = Geometric::new(self.density).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let total = self.n as u64 * self.d as u64;
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n];
        let mut cell = skip.sample(&mut rng);
        while cell < total {
            let (i, j) = ((cell / self.d as u64) as usize, (cell % self.d as u64) as usize);
            let v: f64 = rng.gen();
            if v != 0.0 {
                rows[i].push((j, v));
            }
            cell = cell.saturating_add(1).saturating_add(skip.sample(&mut rng));
        }
        let labels = rows
            .iter()
            .map(|row| {
                let score: f64 = row.iter().map(|&(j, v)| v * w_true[j]).sum();
                let y: i8 = if score >= 0.0 { 1 } else { -1 };
                if rng.gen_bool(0.1) {
                    -y
                } else {
                    y
                }
            })
            .collect();
        let ds = SparseDataset::from_rows(self.d, rows, labels)?;
        Ok(normalize_rows(&ds))
    }
}

/// Where the data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Synthetic(SyntheticSpec),
    Libsvm(PathBuf),
}

impl FromStr for DataSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.starts_with("synthetic:") {
            Ok(DataSource::Synthetic(s.parse()?))
        } else {
            Ok(DataSource::Libsvm(PathBuf::from(s)))
        }
    }
}

impl DataSource {
    /// Loads the data; LIBSVM files are row-normalized when `normalize`.
    pub fn load(&self, normalize: bool) -> Result<SparseDataset<f64>> {
        match self {
            DataSource::Synthetic(spec) => spec.generate(),
            DataSource::Libsvm(path) => {
                let ds = parse_libsvm(BufReader::new(File::open(path)?))?;
                Ok(if normalize { normalize_rows(&ds) } else { ds })
            }
        }
    }
}

/// Draws a modification set. New values are uniform between the smallest
/// and largest stored value of the cell's column.
///
/// * spot: `magnitude` distinct cells out of all `n d`;
/// * instance: `magnitude` distinct rows, every stored cell of each;
/// * feature: `magnitude` distinct columns, every stored cell of each.
pub fn generate_modifications(
    ds: &SparseDataset<f64>,
    scenario: Scenario,
    magnitude: usize,
    seed: u64,
) -> Result<ModificationSet<f64>> {
    let (n, d) = (ds.n(), ds.d());
    let limit = match scenario {
        Scenario::Spot => n.saturating_mul(d),
        Scenario::Instance => n,
        Scenario::Feature => d,
    };
    if magnitude > limit {
        return Err(Error::InvalidArgument(format!(
            "{scenario} magnitude {magnitude} exceeds the available {limit}"
        )));
    }
    let ranges = ds.col_value_ranges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng, j: usize| {
        let (lo, hi) = ranges[j];
        if lo < hi {
            rng.gen_range(lo..=hi)
        } else {
            lo
        }
    };
    let mut edits = Vec::new();
    match scenario {
        Scenario::Spot => {
            let mut cells = sample(&mut rng, limit, magnitude).into_vec();
            cells.sort_unstable();
            for c in cells {
                let (i, j) = (c / d, c % d);
                edits.push((i, j, draw(&mut rng, j)));
            }
        }
        Scenario::Instance => {
            let mut rows = sample(&mut rng, n, magnitude).into_vec();
            rows.sort_unstable();
            for i in rows {
                for (j, _) in ds.row_iter(i) {
                    edits.push((i, j, draw(&mut rng, j)));
                }
            }
        }
        Scenario::Feature => {
            let mut cols = sample(&mut rng, d, magnitude).into_vec();
            cols.sort_unstable();
            for j in cols {
                for (i, _) in ds.col_iter(j) {
                    edits.push((i, j, draw(&mut rng, j)));
                }
            }
        }
    }
    Ok(ModificationSet::new(edits))
}

/// Grid and settings of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: DataSource,
    pub normalize: bool,
    pub train_fraction: f64,
    pub split_seed: u64,
    pub lambdas: Vec<f64>,
    pub gamma: f64,
    pub scenarios: Vec<Scenario>,
    pub magnitudes: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Relative duality-gap tolerance of every training run.
    pub tolerance: f64,
    pub theta: f64,
    /// Measure wall-clock times; when off all time fields are zero and the
    /// output is fully reproducible.
    pub timing: bool,
    pub timing_repeats: usize,
}

impl ExperimentConfig {
    pub const DEFAULT_LAMBDAS: [f64; 4] = [0.001, 0.01, 0.1, 1.0];
    pub const DEFAULT_GAMMA: f64 = 0.5;

    pub fn new(data: DataSource) -> Self {
        Self {
            data,
            normalize: true,
            train_fraction: 0.8,
            split_seed: 0,
            lambdas: Self::DEFAULT_LAMBDAS.to_vec(),
            gamma: Self::DEFAULT_GAMMA,
            scenarios: vec![Scenario::Spot],
            magnitudes: vec![10],
            seeds: (1..=10).collect(),
            tolerance: 1e-9,
            theta: 1.0,
            timing: true,
            timing_repeats: 3,
        }
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub scenario: Scenario,
    pub magnitude: usize,
    pub lambda: f64,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub d: usize,
    pub modified_cells: usize,
    pub touched_entries: usize,
    pub converged: bool,
    pub gap: f64,
    pub determination_rate: f64,
    pub drift_upper: f64,
    pub retrain_triggered: bool,
    pub screened: usize,
    pub gap_tightened: f64,
    pub determination_rate_tightened: f64,
    pub drift_upper_tightened: f64,
    pub screened_tightened: usize,
    pub true_drift: f64,
    pub oracle_gap: f64,
    pub contradictions: usize,
    pub bound_time: f64,
    pub tighten_time: f64,
    pub retrain_time: f64,
    pub time_ratio: f64,
}

/// Everything a trial needs that does not depend on the modification.
#[derive(Debug, Clone)]
pub struct TrialContext {
    pub train: SparseDataset<f64>,
    pub test: SparseDataset<f64>,
    pub objective: Objective<f64>,
    pub baseline: TrainOutput<f64>,
    pub tolerance: f64,
    pub policy: RetrainPolicy,
    pub timing: bool,
    pub timing_repeats: usize,
}

impl TrialContext {
    /// Trains the baseline on `train`.
    pub fn new(
        train_set: SparseDataset<f64>,
        test: SparseDataset<f64>,
        objective: Objective<f64>,
        tolerance: f64,
        theta: f64,
    ) -> Result<Self> {
        let opts = TrainOptions {
            tolerance,
            ..TrainOptions::default()
        };
        let baseline = train(&train_set, &objective, &opts)?;
        Ok(Self {
            train: train_set,
            test,
            objective,
            baseline,
            tolerance,
            policy: RetrainPolicy::new(theta)?,
            timing: true,
            timing_repeats: 3,
        })
    }
}

/// Minimum wall time over `repeats` runs of `f`, or one untimed run.
fn timed<T>(enabled: bool, repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    if !enabled {
        return Ok((f()?, 0.0));
    }
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let v = f()?;
        best = best.min(start.elapsed().as_secs_f64());
        out = Some(v);
    }
    Ok((out.expect("at least one run"), best))
}

/// The local part of the bound computation: refreshed statistics and the
/// gap, both O(|M|).
pub fn bound_path(
    cached: &CachedStats<f64>,
    view: &OverlayView<'_, f64>,
    solution: &PrimalDualSolution<f64>,
    obj: &Objective<f64>,
) -> Result<(DeltaStats<f64>, GapEvaluation<f64>)> {
    let delta = update_delta_stats(cached, view, solution)?;
    let gap = compute_gap(cached, &delta, obj);
    Ok((delta, gap))
}

struct Decisions {
    determined: usize,
    drift: f64,
    screened: Vec<usize>,
    labels: Vec<Option<i8>>,
    score_ranges: Vec<Interval<f64>>,
}

fn decide(bounds: &Bounds<'_, f64>, w_bounds: &[Interval<f64>], w_hat: &[f64], test: &SparseDataset<f64>) -> Result<Decisions> {
    let mut labels = Vec::with_capacity(test.n());
    let mut score_ranges = Vec::with_capacity(test.n());
    let mut determined = 0;
    let mut x = Vec::new();
    for i in 0..test.n() {
        x.clear();
        x.extend(test.row_iter(i));
        let v = classify(&x, w_bounds)?;
        if v.label.is_determined() {
            determined += 1;
        }
        labels.push(v.label.sign());
        score_ranges.push(v.score);
    }
    Ok(Decisions {
        determined,
        drift: param_change_upper(w_hat, w_bounds)?,
        screened: screen_with_bounds(bounds),
        labels,
        score_ranges,
    })
}

/// Decisions that the retrained solution proves wrong. The retrained pair
/// is itself approximate, so only contradictions that hold for every point
/// of its own certified sphere count.
fn contradictions(
    dec: &Decisions,
    test: &SparseDataset<f64>,
    modified: &SparseDataset<f64>,
    oracle_w: &[f64],
    oracle_radius: f64,
    true_drift: f64,
    obj: &Objective<f64>,
) -> usize {
    let mut count = 0;
    for (i, label) in dec.labels.iter().enumerate() {
        let Some(sign) = label else { continue };
        let score: f64 = test.row_iter(i).map(|(j, v)| v * oracle_w[j]).sum();
        let spread = test.row_sq_norm(i).sqrt() * oracle_radius;
        let wrong = if *sign > 0 {
            score + spread < 0.0
        } else {
            score - spread > 0.0
        };
        count += usize::from(wrong);
    }
    if dec.drift < true_drift - oracle_radius {
        count += 1;
    }
    for &i in &dec.screened {
        let margin_hi = modified.row_dot_signed(i, oracle_w) + modified.row_sq_norm(i).sqrt() * oracle_radius;
        if obj.loss.dual_from_margin(margin_hi) > 1e-9 {
            count += 1;
        }
    }
    count
}

/// Runs one trial against a trained baseline.
pub fn run_trial(ctx: &TrialContext, scenario: Scenario, magnitude: usize, seed: u64) -> Result<TrialResult> {
    let obj = &ctx.objective;
    let base = &ctx.baseline;
    let (sol, cached) = (&base.solution, &base.stats);
    let mods = generate_modifications(&ctx.train, scenario, magnitude, seed)?;
    let view = OverlayView::new(&ctx.train, &mods)?;

    // Refreshed statistics, gap, and every case-(iii) interval of w plus
    // the touched dual coordinates.
    let ((delta, gap), bound_time) = timed(ctx.timing, ctx.timing_repeats, || {
        let (delta, gap) = bound_path(cached, &view, sol, obj)?;
        let bounds = Bounds::new(cached, sol, &delta, gap.value, obj)?;
        let w_bounds = bounds.w_bounds(BoundCase::Combined)?;
        let _ = bounds.sparse_report(BoundCase::Combined)?;
        std::hint::black_box(&w_bounds);
        Ok((delta, gap))
    })?;
    let bounds = Bounds::new(cached, sol, &delta, gap.value, obj)?;
    let w_bounds = bounds.w_bounds(BoundCase::Combined)?;
    let before = decide(&bounds, &w_bounds, &sol.w, &ctx.test)?;

    let plan = PartialPlan::new(scenario, Budget::relative_to(gap.value));
    let (check, tighten_time) = timed(ctx.timing, ctx.timing_repeats, || -> Result<CheckSolution<f64>> {
        if mods.is_empty() {
            return Ok(CheckSolution::empty());
        }
        run_partial(&plan, &view, obj, sol, cached, &delta)
    })?;
    let tight = tightened_bounds(&check, &bounds)?;
    let w_tight = tight.w_bounds(BoundCase::Combined)?;
    let after = decide(&tight, &w_tight, &sol.w, &ctx.test)?;

    let modified = view.materialize();
    let opts = TrainOptions {
        tolerance: ctx.tolerance,
        ..TrainOptions::default()
    };
    let (oracle, retrain_time) = timed(ctx.timing, ctx.timing_repeats, || {
        train_warm(&modified, obj, &opts, Some(&sol.alpha))
    })?;
    let oracle_gap = oracle.solution.residual_gap;
    let oracle_radius = (2.0 * oracle_gap / obj.lambda()).sqrt();
    let true_drift = sol
        .w
        .iter()
        .zip(&oracle.solution.w)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let bad = contradictions(&before, &ctx.test, &modified, &oracle.solution.w, oracle_radius, true_drift, obj)
        + contradictions(&after, &ctx.test, &modified, &oracle.solution.w, oracle_radius, true_drift, obj);

    let n_test = ctx.test.n();
    let rate = |k: usize| if n_test == 0 { 1.0 } else { k as f64 / n_test as f64 };
    debug_assert_eq!(before.score_ranges.len(), n_test);
    Ok(TrialResult {
        scenario,
        magnitude,
        lambda: obj.lambda(),
        seed,
        n_train: ctx.train.n(),
        n_test,
        d: ctx.train.d(),
        modified_cells: mods.len(),
        touched_entries: delta.touched() + gap.touched,
        converged: base.converged && oracle.converged,
        gap: gap.value,
        determination_rate: rate(before.determined),
        drift_upper: before.drift,
        retrain_triggered: should_retrain(&ctx.policy, before.drift),
        screened: before.screened.len(),
        gap_tightened: tight.gap(),
        determination_rate_tightened: rate(after.determined),
        drift_upper_tightened: after.drift,
        screened_tightened: after.screened.len(),
        true_drift,
        oracle_gap,
        contradictions: bad,
        bound_time,
        tighten_time,
        retrain_time,
        time_ratio: if retrain_time > 0.0 { bound_time / retrain_time } else { 0.0 },
    })
}

/// Runs the whole grid. Baselines are trained once per lambda.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    if cfg.lambdas.is_empty() || cfg.scenarios.is_empty() || cfg.magnitudes.is_empty() || cfg.seeds.is_empty() {
        return Err(Error::InvalidArgument("empty experiment grid".into()));
    }
    let ds = cfg.data.load(cfg.normalize)?;
    let (train_set, test) = split_train_test(&ds, cfg.train_fraction, cfg.split_seed)?;
    let mut out = Vec::new();
    for &lambda in &cfg.lambdas {
        let obj = Objective::new(cfg.gamma, lambda)?;
        let mut ctx = TrialContext::new(train_set.clone(), test.clone(), obj, cfg.tolerance, cfg.theta)?;
        ctx.timing = cfg.timing;
        ctx.timing_repeats = cfg.timing_repeats;
        for &scenario in &cfg.scenarios {
            for &magnitude in &cfg.magnitudes {
                for &seed in &cfg.seeds {
                    out.push(run_trial(&ctx, scenario, magnitude, seed)?);
                }
            }
        }
    }
    Ok(out)
}

/// Mean, minimum and maximum of one metric over a group of trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { mean, min, max }
    }
}

/// Aggregate of the converged trials sharing a (scenario, magnitude, lambda).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub scenario: Scenario,
    pub magnitude: usize,
    pub lambda: f64,
    pub trials: usize,
    pub excluded: usize,
    pub metrics: BTreeMap<String, Summary>,
}

fn metric_values(r: &TrialResult) -> [(&'static str, f64); 13] {
    [
        ("gap", r.gap),
        ("determination_rate", r.determination_rate),
        ("determination_rate_tightened", r.determination_rate_tightened),
        ("drift_upper", r.drift_upper),
        ("drift_upper_tightened", r.drift_upper_tightened),
        ("true_drift", r.true_drift),
        ("screened", r.screened as f64),
        ("screened_tightened", r.screened_tightened as f64),
        ("contradictions", r.contradictions as f64),
        ("bound_time", r.bound_time),
        ("tighten_time", r.tighten_time),
        ("retrain_time", r.retrain_time),
        ("time_ratio", r.time_ratio),
    ]
}

/// Groups trials by (scenario, magnitude, lambda); non-converged trials are
/// counted but left out of the statistics.
pub fn aggregate(results: &[TrialResult]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(Scenario, usize, u64), Vec<&TrialResult>> = BTreeMap::new();
    for r in results {
        groups
            .entry((r.scenario, r.magnitude, r.lambda.to_bits()))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((scenario, magnitude, bits), trials)| {
            let kept: Vec<&TrialResult> = trials.iter().copied().filter(|r| r.converged).collect();
            let mut metrics = BTreeMap::new();
            if !kept.is_empty() {
                let rows: Vec<_> = kept.iter().map(|r| metric_values(r)).collect();
                for k in 0..rows[0].len() {
                    let vals: Vec<f64> = rows.iter().map(|row| row[k].1).collect();
                    metrics.insert(rows[0][k].0.to_string(), Summary::of(&vals));
                }
            }
            Aggregate {
                scenario,
                magnitude,
                lambda: f64::from_bits(bits),
                trials: kept.len(),
                excluded: trials.len() - kept.len(),
                metrics,
            }
        })
        .collect()
}

/// Writes `trials.csv` and `aggregates.json` into `dir`.
pub fn emit_tables(results: &[TrialResult], dir: &Path) -> Result<()> {
    if results.is_empty() {
        return Err(Error::InvalidArgument("no trial results to write".into()));
    }
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("trials.csv"))?;
    for r in results {
        w.serialize(r)?;
    }
    w.flush()?;
    let json = serde_json::to_string_pretty(&aggregate(results))?;
    std::fs::write(dir.join("aggregates.json"), json + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_spec_parsing() {
        let s: SyntheticSpec = "synthetic:100,20,0.1".parse().unwrap();
        assert_eq!((s.n, s.d, s.density, s.seed), (100, 20, 0.1, 0));
        let s: SyntheticSpec = "synthetic:5,5,1,7".parse().unwrap();
        assert_eq!(s.seed, 7);
        assert!("synthetic:5,5".parse::<SyntheticSpec>().is_err());
        assert!("synthetic:5,5,0".parse::<SyntheticSpec>().is_err());
        assert!(matches!("data/a.txt".parse::<DataSource>().unwrap(), DataSource::Libsvm(_)));
    }

    #[test]
    fn synthetic_is_deterministic_and_dense_enough() {
        let spec = SyntheticSpec { n: 300, d: 40, density: 0.2, seed: 3 };
        let a = spec.generate().unwrap();
        assert_eq!(a, spec.generate().unwrap());
        let frac = a.nnz() as f64 / (300.0 * 40.0);
        assert!((frac - 0.2).abs() < 0.03, "{frac}");
        assert!(a.labels().contains(&1) && a.labels().contains(&-1));
    }

    #[test]
    fn modification_shapes() {
        let ds = SyntheticSpec { n: 30, d: 10, density: 0.5, seed: 1 }.generate().unwrap();
        assert!(generate_modifications(&ds, Scenario::Spot, 0, 1).unwrap().is_empty());
        let spot = generate_modifications(&ds, Scenario::Spot, 12, 1).unwrap();
        assert_eq!(spot.len(), 12);
        let inst = generate_modifications(&ds, Scenario::Instance, 1, 2).unwrap();
        let row = inst.touched_rows()[0];
        assert_eq!(inst.touched_rows().len(), 1);
        assert_eq!(inst.len(), ds.row(row).0.len());
        let feat = generate_modifications(&ds, Scenario::Feature, 2, 2).unwrap();
        assert_eq!(feat.touched_cols().len(), 2);
        assert!(generate_modifications(&ds, Scenario::Feature, 11, 0).is_err());
        assert_eq!(spot, generate_modifications(&ds, Scenario::Spot, 12, 1).unwrap());
    }

    #[test]
    fn summary_mean() {
        let s = Summary::of(&[0.5, 1.0]);
        assert_eq!((s.mean, s.min, s.max), (0.75, 0.5, 1.0));
    }
}
