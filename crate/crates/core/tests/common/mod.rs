//! Dense reference implementations used as test oracles. Nothing here calls
//! the bound or gap code under test.
#![allow(dead_code)]

pub mod checks;

use incbound::experiment::SyntheticSpec;
use incbound::{train, train_warm, Dataset, Interval, TrainOptions};
use nalgebra::{DMatrix, DVector};

pub fn phi(r: f64, g: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else if r <= 1.0 - g {
        1.0 - r - g / 2.0
    } else {
        (1.0 - r).powi(2) / (2.0 * g)
    }
}

pub fn dphi(r: f64, g: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else if r <= 1.0 - g {
        -1.0
    } else {
        (r - 1.0) / g
    }
}

/// `phi*(u)`, `None` outside `[-1, 0]`.
pub fn phi_conj(u: f64, g: f64) -> Option<f64> {
    (-1.0..=0.0).contains(&u).then(|| u + g * u * u / 2.0)
}

/// Signed dense copy `Z = diag(y) X`.
#[derive(Debug, Clone)]
pub struct Dense {
    pub n: usize,
    pub d: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dense {
    pub fn of(ds: &Dataset) -> Self {
        let mut x = vec![vec![0.0; ds.d()]; ds.n()];
        for (i, row) in ds.to_rows().into_iter().enumerate() {
            for (j, v) in row {
                x[i][j] = v;
            }
        }
        let y = ds.labels().iter().map(|&l| f64::from(l)).collect();
        Self {
            n: ds.n(),
            d: ds.d(),
            x,
            y,
        }
    }

    pub fn z(&self, i: usize, j: usize) -> f64 {
        self.y[i] * self.x[i][j]
    }

    pub fn margin(&self, i: usize, w: &[f64]) -> f64 {
        (0..self.d).map(|j| self.z(i, j) * w[j]).sum()
    }

    pub fn col_dot(&self, j: usize, a: &[f64]) -> f64 {
        (0..self.n).map(|i| self.z(i, j) * a[i]).sum()
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        self.x[i].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn col_norm(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self.x[i][j].powi(2)).sum::<f64>().sqrt()
    }

    /// `(sum of negative z_ij, sum of positive z_ij)` over column `j`.
    pub fn col_sign_sums(&self, j: usize) -> (f64, f64) {
        let mut neg = 0.0;
        let mut pos = 0.0;
        for i in 0..self.n {
            let z = self.z(i, j);
            if z < 0.0 {
                neg += z;
            } else {
                pos += z;
            }
        }
        (neg, pos)
    }

    pub fn primal(&self, lam: f64, g: f64, w: &[f64]) -> f64 {
        let loss: f64 = (0..self.n).map(|i| phi(self.margin(i, w), g)).sum();
        let n = self.n.max(1) as f64;
        loss / n + lam / 2.0 * w.iter().map(|v| v * v).sum::<f64>()
    }

    /// `1/n sum(a - g a^2 / 2) - ||Z^T a||^2 / (2 lam n^2)`
    pub fn dual(&self, lam: f64, g: f64, a: &[f64]) -> f64 {
        let n = self.n as f64;
        let lin: f64 = a.iter().map(|&ai| ai - g * ai * ai / 2.0).sum::<f64>() / n;
        let quad: f64 = (0..self.d).map(|j| self.col_dot(j, a).powi(2)).sum();
        lin - quad / (2.0 * lam * n * n)
    }

    pub fn w_of_alpha(&self, lam: f64, a: &[f64]) -> Vec<f64> {
        let s = 1.0 / (self.n as f64 * lam);
        (0..self.d).map(|j| self.col_dot(j, a) * s).collect()
    }

    fn gradient(&self, lam: f64, g: f64, w: &[f64]) -> Vec<f64> {
        let n = self.n as f64;
        let mut grad: Vec<f64> = w.iter().map(|v| lam * v).collect();
        for i in 0..self.n {
            let d = dphi(self.margin(i, w), g);
            if d != 0.0 {
                for (j, gj) in grad.iter_mut().enumerate() {
                    *gj += self.z(i, j) * d / n;
                }
            }
        }
        grad
    }
}

/// Exact optimum of a small problem.
#[derive(Debug, Clone)]
pub struct Exact {
    pub w: Vec<f64>,
    pub alpha: Vec<f64>,
    /// `P(w) - D(alpha)` evaluated by the dense oracle.
    pub gap: f64,
}

/// Solves to machine precision: coordinate ascent to get close, then damped
/// Newton steps on the piecewise-quadratic primal.
pub fn exact_solution(ds: &Dataset, lam: f64, g: f64) -> Exact {
    let obj = incbound::Objective::new(g, lam).unwrap();
    let opts = TrainOptions {
        tolerance: 1e-13,
        max_epochs: 200_000,
        ..TrainOptions::default()
    };
    let start = train(ds, &obj, &opts).unwrap();
    let dense = Dense::of(ds);
    let (n, d) = (dense.n as f64, dense.d);
    let mut w = start.solution.w.clone();
    for _ in 0..200 {
        let grad = dense.gradient(lam, g, &w);
        if grad.iter().all(|v| v.abs() < 1e-17) {
            break;
        }
        let mut h = DMatrix::<f64>::identity(d, d) * lam;
        for i in 0..dense.n {
            let m = dense.margin(i, &w);
            if m > 1.0 - g && m < 1.0 {
                let z = DVector::from_iterator(d, (0..d).map(|j| dense.z(i, j)));
                h += &z * z.transpose() / (n * g);
            }
        }
        let step = h.cholesky().expect("positive definite").solve(&DVector::from_vec(grad));
        let p0 = dense.primal(lam, g, &w);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-12 {
            let cand: Vec<f64> = w.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            if dense.primal(lam, g, &cand) <= p0 {
                moved = cand != w;
                w = cand;
                break;
            }
            t /= 2.0;
        }
        if !moved {
            break;
        }
    }
    let alpha: Vec<f64> = (0..dense.n).map(|i| -dphi(dense.margin(i, &w), g)).collect();
    let gap = dense.primal(lam, g, &w) - dense.dual(lam, g, &alpha);
    Exact { w, alpha, gap }
}

/// Warm-started library retrain, for cases too large for the dense oracle.
pub fn retrain(ds: &Dataset, lam: f64, g: f64, alpha: &[f64], tol: f64) -> incbound::TrainOutput {
    let obj = incbound::Objective::new(g, lam).unwrap();
    let opts = TrainOptions {
        tolerance: tol,
        max_epochs: 1_000_000,
        ..TrainOptions::default()
    };
    train_warm(ds, &obj, &opts, Some(alpha)).unwrap()
}

pub fn synthetic(n: usize, d: usize, density: f64, seed: u64) -> Dataset {
    SyntheticSpec { n, d, density, seed }.generate().unwrap()
}

pub fn contains(iv: &Interval<f64>, x: f64, slack: f64) -> bool {
    iv.lo - slack <= x && x <= iv.hi + slack
}

pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(a.abs()) + abs
}

/// A trained baseline plus a modification drawn from it.
pub struct Trial {
    pub train: Dataset,
    pub modified: Dataset,
    pub mods: incbound::Modifications,
    pub lambda: f64,
    pub gamma: f64,
    pub base: incbound::TrainOutput,
}

pub const GAMMA: f64 = 0.5;

/// Synthetic problem of the given shape with a random modification.
/// Magnitudes beyond the number of rows or columns are capped.
pub fn trial(
    shape: (usize, usize, f64),
    seed: u64,
    scenario: incbound::Scenario,
    magnitude: usize,
    lambda: f64,
) -> Trial {
    let (n, d, density) = shape;
    let train_set = synthetic(n, d, density, seed);
    let cap = match scenario {
        incbound::Scenario::Spot => n * d,
        incbound::Scenario::Instance => n,
        incbound::Scenario::Feature => d,
    };
    let mods = incbound::experiment::generate_modifications(&train_set, scenario, magnitude.min(cap), seed ^ 0x5eed)
        .unwrap();
    let modified = incbound::apply_modifications(&train_set, &mods).unwrap();
    let obj = incbound::Objective::new(GAMMA, lambda).unwrap();
    let opts = TrainOptions {
        tolerance: 1e-10,
        max_epochs: 200_000,
        ..TrainOptions::default()
    };
    let base = train(&train_set, &obj, &opts).unwrap();
    Trial {
        train: train_set,
        modified,
        mods,
        lambda,
        gamma: GAMMA,
        base,
    }
}

impl Trial {
    pub fn objective(&self) -> incbound::Objective {
        incbound::Objective::new(self.gamma, self.lambda).unwrap()
    }
}
