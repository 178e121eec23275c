//! Dual coordinate ascent for the smoothed-hinge SVM, primal/dual objective
//! evaluation, and the O(n + d) statistics cached alongside a solution.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{sign_split_sums, Extended, Loss, Objective, Penalty};
use crate::scalar::{clamp, Scalar};
use crate::sparse::SparseDataset;

/// Primal-dual pair `(w, alpha)` with the duality gap it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualSolution<F> {
    pub w: Vec<F>,
    pub alpha: Vec<F>,
    /// `P(w) - D(alpha)` on the training data.
    pub residual_gap: F,
}

impl<F: Scalar> PrimalDualSolution<F> {
    /// The all-zero pair for an `n x d` problem, gap unknown (set to zero).
    pub fn zeros(n: usize, d: usize) -> Self {
        Self {
            w: vec![F::zero(); d],
            alpha: vec![F::zero(); n],
            residual_gap: F::zero(),
        }
    }
}

/// Solution statistics kept in memory between sessions: O(n + d) scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedStats<F> {
    /// `z_i^T w` per row.
    pub row_scores: Vec<F>,
    /// `||x_i||_2` per row.
    pub row_norms: Vec<F>,
    /// `z_j^T alpha` per column (not scaled by `1/n`).
    pub col_duals: Vec<F>,
    /// `||x_j||_2` per column.
    pub col_norms: Vec<F>,
    /// Sum of the negative entries of signed column `z_j`.
    pub col_neg_sums: Vec<F>,
    /// Sum of the positive entries of signed column `z_j`.
    pub col_pos_sums: Vec<F>,
    pub residual_gap: F,
}

impl<F: Scalar> CachedStats<F> {
    pub fn n(&self) -> usize {
        self.row_scores.len()
    }

    pub fn d(&self) -> usize {
        self.col_duals.len()
    }
}

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    /// Stop once `P - D <= tolerance * max(1, |P|)`.
    pub tolerance: f64,
    pub max_epochs: usize,
    /// `None` sweeps coordinates in fixed cyclic order; `Some(seed)` reshuffles
    /// the order every epoch with a seeded generator.
    pub shuffle_seed: Option<u64>,
    /// Record `(P, D)` after every epoch.
    pub record_history: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_epochs: 10_000,
            shuffle_seed: None,
            record_history: false,
        }
    }
}

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainOutput<F> {
    pub solution: PrimalDualSolution<F>,
    pub stats: CachedStats<F>,
    pub converged: bool,
    pub epochs: usize,
    /// `(primal, dual)` objective after each epoch, when requested.
    pub history: Vec<(F, F)>,
}

/// `1/n sum_i phi(z_i^T w) + psi(w)`. For `n = 0` this is `psi(w)` alone.
pub fn primal_objective<F: Scalar>(ds: &SparseDataset<F>, obj: &Objective<F>, w: &[F]) -> F {
    assert_eq!(w.len(), ds.d(), "primal vector length");
    let reg = obj.penalty.value(w);
    if ds.n() == 0 {
        return reg;
    }
    let loss: F = (0..ds.n()).map(|i| obj.loss.value(ds.row_dot_signed(i, w))).sum();
    loss / F::from_usize(ds.n()).unwrap() + reg
}

/// `-1/n sum_i phi*(-alpha_i) - psi*(1/n Z^T alpha)`, infeasible when some
/// `alpha_i` leaves `[0, 1]`.
pub fn dual_objective<F: Scalar>(ds: &SparseDataset<F>, obj: &Objective<F>, alpha: &[F]) -> Extended<F> {
    assert_eq!(alpha.len(), ds.n(), "dual vector length");
    let n = ds.n();
    if n == 0 {
        return Extended::Finite(F::zero());
    }
    let nf = F::from_usize(n).unwrap();
    let mut conj = F::zero();
    for &a in alpha {
        match obj.loss.conjugate(-a) {
            Extended::Finite(v) => conj += v,
            Extended::Infeasible => return Extended::Infeasible,
        }
    }
    let reg: F = (0..ds.d())
        .map(|j| obj.penalty.conjugate_component(ds.col_dot_signed(j, alpha) / nf))
        .sum();
    Extended::Finite(-conj / nf - reg)
}

/// `w = (n lambda)^-1 Z^T alpha`.
pub fn primal_from_dual<F: Scalar>(ds: &SparseDataset<F>, obj: &Objective<F>, alpha: &[F]) -> Vec<F> {
    if ds.n() == 0 {
        return vec![F::zero(); ds.d()];
    }
    let scale = F::one() / (F::from_usize(ds.n()).unwrap() * obj.lambda());
    (0..ds.d()).map(|j| ds.col_dot_signed(j, alpha) * scale).collect()
}

/// Computes every cached statistic from scratch, one O(nnz) pass per array.
pub fn build_cached_stats<F: Scalar>(ds: &SparseDataset<F>, sol: &PrimalDualSolution<F>) -> CachedStats<F> {
    assert_eq!(sol.w.len(), ds.d(), "primal vector length");
    assert_eq!(sol.alpha.len(), ds.n(), "dual vector length");
    let row_scores = (0..ds.n()).map(|i| ds.row_dot_signed(i, &sol.w)).collect();
    let row_norms = (0..ds.n()).map(|i| ds.row_sq_norm(i).sqrt()).collect();
    let col_duals = (0..ds.d()).map(|j| ds.col_dot_signed(j, &sol.alpha)).collect();
    let col_norms = (0..ds.d()).map(|j| ds.col_sq_norm(j).sqrt()).collect();
    let (col_neg_sums, col_pos_sums) = (0..ds.d())
        .map(|j| sign_split_sums(ds.col_iter(j).map(|(i, v)| ds.label(i) * v)))
        .unzip();
    CachedStats {
        row_scores,
        row_norms,
        col_duals,
        col_norms,
        col_neg_sums,
        col_pos_sums,
        residual_gap: sol.residual_gap,
    }
}

/// Trains from `alpha = 0`.
pub fn train<F: Scalar>(ds: &SparseDataset<F>, obj: &Objective<F>, opts: &TrainOptions) -> Result<TrainOutput<F>> {
    train_warm(ds, obj, opts, None)
}

/// Trains by cyclic dual coordinate ascent, optionally warm-started from a
/// dual vector (clipped into the dual box).
///
/// Each step maximizes the dual exactly in one coordinate:
/// `delta = (1 - z_i^T w - gamma a_i) / (gamma + ||x_i||^2 / (n lambda))`,
/// clipped so that `a_i` stays in `[0, 1]`, with `w` kept equal to
/// `(n lambda)^-1 Z^T alpha`.
pub fn train_warm<F: Scalar>(
    ds: &SparseDataset<F>,
    obj: &Objective<F>,
    opts: &TrainOptions,
    warm_alpha: Option<&[F]>,
) -> Result<TrainOutput<F>> {
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tolerance
        )));
    }
    let n = ds.n();
    let (zero, one) = (F::zero(), F::one());
    let mut alpha = match warm_alpha {
        Some(a) => {
            if a.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "warm-start dual vector",
                    expected: n,
                    found: a.len(),
                });
            }
            a.iter().map(|&x| clamp(x, zero, one)).collect()
        }
        None => vec![zero; n],
    };
    let mut w = primal_from_dual(ds, obj, &alpha);

    let gamma = obj.gamma();
    let tol = F::lit(opts.tolerance);
    let mut history = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = opts.shuffle_seed.map(ChaCha8Rng::seed_from_u64);

    let (mut primal, mut gap) = objective_pair(ds, obj, &w, &alpha, &mut history, opts.record_history);
    let mut converged = gap <= tol * primal.abs().max(one);
    let mut epochs = 0;

    if n > 0 && !converged {
        let scale = one / (F::from_usize(n).unwrap() * obj.lambda());
        let curvature: Vec<F> = (0..n).map(|i| gamma + ds.row_sq_norm(i) * scale).collect();
        while epochs < opts.max_epochs {
            if let Some(rng) = rng.as_mut() {
                order.shuffle(rng);
            }
            for &i in &order {
                let y = ds.label(i);
                let (idx, val) = ds.row(i);
                let margin = y * idx.iter().zip(val).map(|(&j, &v)| v * w[j]).sum::<F>();
                let step = (one - margin - gamma * alpha[i]) / curvature[i];
                let updated = clamp(alpha[i] + step, zero, one);
                let delta = updated - alpha[i];
                if delta != zero {
                    alpha[i] = updated;
                    let coef = delta * y * scale;
                    for (&j, &v) in idx.iter().zip(val) {
                        w[j] += coef * v;
                    }
                }
            }
            epochs += 1;
            // Re-derive w from alpha so the KKT link holds to rounding.
            w = primal_from_dual(ds, obj, &alpha);
            (primal, gap) = objective_pair(ds, obj, &w, &alpha, &mut history, opts.record_history);
            if gap <= tol * primal.abs().max(one) {
                converged = true;
                break;
            }
        }
    }

    let solution = PrimalDualSolution {
        w,
        alpha,
        residual_gap: gap.max(zero),
    };
    let stats = build_cached_stats(ds, &solution);
    Ok(TrainOutput {
        solution,
        stats,
        converged,
        epochs,
        history,
    })
}

fn objective_pair<F: Scalar>(
    ds: &SparseDataset<F>,
    obj: &Objective<F>,
    w: &[F],
    alpha: &[F],
    history: &mut Vec<(F, F)>,
    record: bool,
) -> (F, F) {
    let p = primal_objective(ds, obj, w);
    let d = dual_objective(ds, obj, alpha)
        .finite()
        .expect("iterates stay in the dual box");
    if record {
        history.push((p, d));
    }
    (p, p - d)
}

/// On-disk form of a solution and its cached statistics (`version` 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct StatsFile<F> {
    pub version: u32,
    pub w: Vec<F>,
    pub alpha: Vec<F>,
    pub residual_gap: F,
    pub row_scores: Vec<F>,
    pub row_norms: Vec<F>,
    pub col_duals: Vec<F>,
    pub col_norms: Vec<F>,
    pub col_neg_sums: Vec<F>,
    pub col_pos_sums: Vec<F>,
}

impl<F: Scalar> StatsFile<F> {
    pub const VERSION: u32 = 1;

    pub fn new(sol: &PrimalDualSolution<F>, stats: &CachedStats<F>) -> Self {
        Self {
            version: Self::VERSION,
            w: sol.w.clone(),
            alpha: sol.alpha.clone(),
            residual_gap: sol.residual_gap,
            row_scores: stats.row_scores.clone(),
            row_norms: stats.row_norms.clone(),
            col_duals: stats.col_duals.clone(),
            col_norms: stats.col_norms.clone(),
            col_neg_sums: stats.col_neg_sums.clone(),
            col_pos_sums: stats.col_pos_sums.clone(),
        }
    }

    pub fn into_parts(self) -> Result<(PrimalDualSolution<F>, CachedStats<F>)> {
        if self.version != Self::VERSION {
            return Err(Error::UnsupportedVersion(self.version));
        }
        let (n, d) = (self.alpha.len(), self.w.len());
        for (what, len, want) in [
            ("row_scores", self.row_scores.len(), n),
            ("row_norms", self.row_norms.len(), n),
            ("col_duals", self.col_duals.len(), d),
            ("col_norms", self.col_norms.len(), d),
            ("col_neg_sums", self.col_neg_sums.len(), d),
            ("col_pos_sums", self.col_pos_sums.len(), d),
        ] {
            if len != want {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: want,
                    found: len,
                });
            }
        }
        let sol = PrimalDualSolution {
            w: self.w,
            alpha: self.alpha,
            residual_gap: self.residual_gap,
        };
        let stats = CachedStats {
            row_scores: self.row_scores,
            row_norms: self.row_norms,
            col_duals: self.col_duals,
            col_norms: self.col_norms,
            col_neg_sums: self.col_neg_sums,
            col_pos_sums: self.col_pos_sums,
            residual_gap: self.residual_gap,
        };
        Ok((sol, stats))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
