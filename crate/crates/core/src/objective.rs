//! Loss and penalty functions of the regularized ERM problem
//!
//! ```text
//! P(w) = 1/n sum_i phi(z_i^T w) + psi(w)
//! D(a) = -1/n sum_i phi*(-a_i) - psi*(1/n Z^T a)
//! ```
//!
//! The shipped instance is the smoothed hinge loss with an L2 penalty. The
//! loss is `1/gamma`-smooth and the penalty `lambda`-strongly convex, so both
//! the primal and the dual solution spheres are available.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Closed interval `[lo, hi]`. Serializes as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    from = "[F; 2]",
    into = "[F; 2]",
    bound(serialize = "F: Copy + Serialize", deserialize = "F: Copy + Deserialize<'de>")
)]
pub struct Interval<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Copy> From<[F; 2]> for Interval<F> {
    fn from([lo, hi]: [F; 2]) -> Self {
        Self { lo, hi }
    }
}

impl<F: Copy> From<Interval<F>> for [F; 2] {
    fn from(iv: Interval<F>) -> Self {
        [iv.lo, iv.hi]
    }
}

impl<F: Scalar> Interval<F> {
    pub fn new(lo: F, hi: F) -> Self {
        Self { lo, hi }
    }

    pub fn point(x: F) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> F {
        self.hi - self.lo
    }

    pub fn contains(&self, x: F, slack: F) -> bool {
        self.lo - slack <= x && x <= self.hi + slack
    }

    /// True when `self` lies inside `outer` up to `slack`.
    pub fn within(&self, outer: &Self, slack: F) -> bool {
        self.lo >= outer.lo - slack && self.hi <= outer.hi + slack
    }

    /// Raw intersection; may be empty (`lo > hi`).
    pub fn intersect(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    pub fn clip(&self, range: &Self) -> Self {
        Self {
            lo: self.lo.max(range.lo).min(range.hi),
            hi: self.hi.min(range.hi).max(range.lo),
        }
    }
}

/// A value of an extended-real convex function: finite or outside its domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended<F> {
    Finite(F),
    Infeasible,
}

impl<F: Scalar> Extended<F> {
    pub fn finite(self) -> Option<F> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infeasible => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Extended::Infeasible)
    }
}

/// Scalar loss `phi` on the margin `z_i^T w`.
pub trait Loss<F: Scalar> {
    fn value(&self, r: F) -> F;
    /// `phi*(u)`.
    fn conjugate(&self, u: F) -> Extended<F>;
    fn subgradient(&self, r: F) -> Interval<F>;
    /// Feasible range of a single dual coordinate, `{a : -a in dom phi*}`.
    fn dual_range(&self) -> Interval<F>;
    /// `gamma` when the loss is `1/gamma`-smooth.
    fn smoothness(&self) -> Option<F>;
}

/// Decomposable penalty `psi(w) = sum_j psi_j(w_j)`.
pub trait Penalty<F: Scalar> {
    fn component(&self, w: F) -> F;
    fn subgradient_component(&self, w: F) -> Interval<F>;
    fn conjugate_component(&self, v: F) -> F;
    fn conjugate_subgradient(&self, v: F) -> Interval<F>;
    /// `lambda` when the penalty is `lambda`-strongly convex.
    fn strong_convexity(&self) -> Option<F>;

    fn value(&self, w: &[F]) -> F {
        w.iter().map(|&x| self.component(x)).sum()
    }

    fn conjugate(&self, v: &[F]) -> F {
        v.iter().map(|&x| self.conjugate_component(x)).sum()
    }
}

/// Smoothed hinge loss with smoothing width `gamma > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedHinge<F> {
    pub gamma: F,
}

impl<F: Scalar> SmoothedHinge<F> {
    pub fn new(gamma: F) -> Result<Self> {
        if !(gamma > F::zero() && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    /// `phi'(r)`; the loss is differentiable everywhere.
    #[inline]
    pub fn derivative(&self, r: F) -> F {
        let one = F::one();
        if r > one {
            F::zero()
        } else if r < one - self.gamma {
            -one
        } else {
            -(one - r) / self.gamma
        }
    }

    /// Dual coordinate implied by a margin, `-phi'(r)`, in `[0, 1]`.
    #[inline]
    pub fn dual_from_margin(&self, r: F) -> F {
        -self.derivative(r)
    }
}

impl<F: Scalar> Loss<F> for SmoothedHinge<F> {
    #[inline]
    fn value(&self, r: F) -> F {
        let one = F::one();
        let half = F::lit(0.5);
        if r > one {
            F::zero()
        } else if r < one - self.gamma {
            one - r - half * self.gamma
        } else {
            // Quadratic branch owns the closed middle interval [1 - gamma, 1].
            (one - r) * (one - r) / (F::lit(2.0) * self.gamma)
        }
    }

    #[inline]
    fn conjugate(&self, u: F) -> Extended<F> {
        if u < -F::one() || u > F::zero() {
            Extended::Infeasible
        } else {
            Extended::Finite(u + F::lit(0.5) * self.gamma * u * u)
        }
    }

    fn subgradient(&self, r: F) -> Interval<F> {
        Interval::point(self.derivative(r))
    }

    fn dual_range(&self) -> Interval<F> {
        Interval::new(F::zero(), F::one())
    }

    fn smoothness(&self) -> Option<F> {
        Some(self.gamma)
    }
}

/// `psi(w) = lambda/2 ||w||^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Penalty<F> {
    pub lambda: F,
}

impl<F: Scalar> L2Penalty<F> {
    pub fn new(lambda: F) -> Result<Self> {
        if !(lambda > F::zero() && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { lambda })
    }
}

impl<F: Scalar> Penalty<F> for L2Penalty<F> {
    #[inline]
    fn component(&self, w: F) -> F {
        F::lit(0.5) * self.lambda * w * w
    }

    fn subgradient_component(&self, w: F) -> Interval<F> {
        Interval::point(self.lambda * w)
    }

    #[inline]
    fn conjugate_component(&self, v: F) -> F {
        v * v / (F::lit(2.0) * self.lambda)
    }

    fn conjugate_subgradient(&self, v: F) -> Interval<F> {
        Interval::point(v / self.lambda)
    }

    fn strong_convexity(&self) -> Option<F> {
        Some(self.lambda)
    }
}

/// Smoothed-hinge loss paired with an L2 penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective<F> {
    pub loss: SmoothedHinge<F>,
    pub penalty: L2Penalty<F>,
}

impl<F: Scalar> Objective<F> {
    pub fn new(gamma: F, lambda: F) -> Result<Self> {
        Ok(Self {
            loss: SmoothedHinge::new(gamma)?,
            penalty: L2Penalty::new(lambda)?,
        })
    }

    #[inline]
    pub fn gamma(&self) -> F {
        self.loss.gamma
    }

    #[inline]
    pub fn lambda(&self) -> F {
        self.penalty.lambda
    }

    pub fn config(&self) -> ObjectiveConfig {
        ObjectiveConfig {
            loss: "smoothed_hinge".into(),
            gamma: self.gamma().as_f64(),
            penalty: "l2".into(),
            lambda: self.lambda().as_f64(),
        }
    }

    pub fn from_config(cfg: &ObjectiveConfig) -> Result<Self> {
        if cfg.loss != "smoothed_hinge" {
            return Err(Error::InvalidArgument(format!("unsupported loss `{}`", cfg.loss)));
        }
        if cfg.penalty != "l2" {
            return Err(Error::InvalidArgument(format!(
                "unsupported penalty `{}`",
                cfg.penalty
            )));
        }
        Self::new(F::lit(cfg.gamma), F::lit(cfg.lambda))
    }
}

/// JSON form: `{"loss": "smoothed_hinge", "gamma": .., "penalty": "l2", "lambda": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub loss: String,
    pub gamma: f64,
    pub penalty: String,
    pub lambda: f64,
}

/// Extremes of `1/n z^T a` over the dual box `a in [0, 1]^n`: the scaled sums
/// of the negative and of the positive entries of `z`.
pub fn dual_domain_column_range<F: Scalar, I: IntoIterator<Item = F>>(column: I, n: usize) -> Interval<F> {
    let (neg, pos) = sign_split_sums(column);
    scaled_range(neg, pos, n)
}

/// `(sum of negative entries, sum of positive entries)`.
pub fn sign_split_sums<F: Scalar, I: IntoIterator<Item = F>>(values: I) -> (F, F) {
    values.into_iter().fold((F::zero(), F::zero()), |(neg, pos), z| {
        if z < F::zero() {
            (neg + z, pos)
        } else {
            (neg, pos + z)
        }
    })
}

pub(crate) fn scaled_range<F: Scalar>(neg: F, pos: F, n: usize) -> Interval<F> {
    if n == 0 {
        return Interval::point(F::zero());
    }
    let n = F::from_usize(n).unwrap();
    Interval::new(neg / n, pos / n)
}
