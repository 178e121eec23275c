//! Decisions that can be certified from bounds alone: test labels,
//! parameter drift (and whether to retrain), and non-support rows.

use serde::ser::{Serialize, Serializer};
use serde::Deserialize;

use crate::bounds::{Bounds, DeltaStats, Radii};
use crate::error::{Error, Result};
use crate::objective::{Interval, Objective};
use crate::scalar::Scalar;
use crate::solver::CachedStats;

/// Range of `x^T w` over the box `w_j in [L_j, U_j]`. Each coordinate picks
/// the corner that minimizes (maximizes) its term, so both ends are attained.
pub fn score_bounds<F: Scalar>(x: &[(usize, F)], w_bounds: &[Interval<F>]) -> Result<Interval<F>> {
    let mut lo = F::zero();
    let mut hi = F::zero();
    for &(j, v) in x {
        let b = w_bounds.get(j).ok_or(Error::DimensionMismatch {
            what: "feature index of test point",
            expected: w_bounds.len(),
            found: j + 1,
        })?;
        if v >= F::zero() {
            lo += v * b.lo;
            hi += v * b.hi;
        } else {
            lo += v * b.hi;
            hi += v * b.lo;
        }
    }
    Ok(Interval::new(lo, hi))
}

/// Certified class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
    Unknown,
}

impl Label {
    /// `Some(+1 | -1)` when determined.
    pub fn sign(self) -> Option<i8> {
        match self {
            Label::Positive => Some(1),
            Label::Negative => Some(-1),
            Label::Unknown => None,
        }
    }

    pub fn is_determined(self) -> bool {
        self != Label::Unknown
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.sign() {
            Some(v) => s.serialize_i8(v),
            None => s.serialize_str("unknown"),
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(1) => Ok(Label::Positive),
            Repr::Int(-1) => Ok(Label::Negative),
            Repr::Text(t) if t == "unknown" => Ok(Label::Unknown),
            _ => Err(serde::de::Error::custom("label must be 1, -1 or \"unknown\"")),
        }
    }
}

/// A label together with the score interval that decided it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict<F> {
    pub label: Label,
    pub score: Interval<F>,
}

impl<F: Scalar> Verdict<F> {
    pub fn from_interval(score: Interval<F>) -> Self {
        let label = if score.hi < F::zero() {
            Label::Negative
        } else if score.lo >= F::zero() {
            Label::Positive
        } else {
            Label::Unknown
        };
        Self { label, score }
    }

    /// `{"index": .., "label": 1 | -1 | "unknown", "L": .., "U": ..}`
    pub fn json_line(&self, index: usize) -> Result<String> {
        Ok(serde_json::to_string(&VerdictLine {
            index,
            label: self.label,
            lower: self.score.lo,
            upper: self.score.hi,
        })?)
    }
}

/// One line of verdict output.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct VerdictLine<F> {
    pub index: usize,
    pub label: Label,
    #[serde(rename = "L")]
    pub lower: F,
    #[serde(rename = "U")]
    pub upper: F,
}

/// `-1` if `U < 0`, `+1` if `L >= 0`, unknown otherwise.
pub fn classify<F: Scalar>(x: &[(usize, F)], w_bounds: &[Interval<F>]) -> Result<Verdict<F>> {
    Ok(Verdict::from_interval(score_bounds(x, w_bounds)?))
}

/// Upper bound on `||w - w~||_2` over the box:
/// `sqrt(sum_j max(w_j - L_j, U_j - w_j, 0)^2)`.
pub fn param_change_upper<F: Scalar>(w_hat: &[F], w_bounds: &[Interval<F>]) -> Result<F> {
    if w_hat.len() != w_bounds.len() {
        return Err(Error::DimensionMismatch {
            what: "bounds for primal vector",
            expected: w_hat.len(),
            found: w_bounds.len(),
        });
    }
    let sum: F = w_hat
        .iter()
        .zip(w_bounds)
        .map(|(&w, b)| {
            let t = (w - b.lo).max(b.hi - w).max(F::zero());
            t * t
        })
        .sum();
    Ok(sum.sqrt())
}

/// Drift tolerance `theta > 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, Deserialize)]
pub struct RetrainPolicy {
    pub theta: f64,
}

impl RetrainPolicy {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidArgument(format!("theta must be positive, got {theta}")));
        }
        Ok(Self { theta })
    }
}

/// Retrain iff the drift bound reaches `theta`.
pub fn should_retrain(policy: &RetrainPolicy, drift_upper: f64) -> bool {
    drift_upper >= policy.theta
}

/// Rows certified to be non-support vectors of the modified problem: those
/// whose lowest possible margin over the primal sphere still exceeds 1.
pub fn screen_samples<F: Scalar>(delta: &DeltaStats<F>, cached: &CachedStats<F>, gap: F, obj: &Objective<F>) -> Vec<usize> {
    let r = Radii::new(gap, obj, cached.n()).primal;
    (0..cached.n())
        .filter(|&i| {
            let (score, norm) = delta
                .rows
                .get(&i)
                .map_or((cached.row_scores[i], cached.row_norms[i]), |row| (row.score, row.norm));
            score - norm * r > F::one()
        })
        .collect()
}

/// [`screen_samples`] around whatever centers `bounds` uses, including a
/// check solution.
pub fn screen_with_bounds<F: Scalar>(bounds: &Bounds<'_, F>) -> Vec<usize> {
    (0..bounds.n())
        .filter(|&i| bounds.margin_lower(i) > F::one())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi)
    }

    #[test]
    fn score_bounds_example() {
        let b = [iv(-1.0, 1.0), iv(0.0, 2.0)];
        assert_eq!(score_bounds(&[(0, 1.0), (1, -1.0)], &b).unwrap(), iv(-3.0, 1.0));
        assert!(score_bounds(&[(2, 1.0)], &b).is_err());
    }

    #[test]
    fn classify_branches() {
        assert_eq!(Verdict::from_interval(iv(-3.0, -1.0)).label, Label::Negative);
        assert_eq!(Verdict::from_interval(iv(0.0, 2.0)).label, Label::Positive);
        assert_eq!(Verdict::from_interval(iv(-1.0, 1.0)).label, Label::Unknown);
        assert_eq!(Verdict::from_interval(iv(-1.0, 0.0)).label, Label::Unknown);
    }

    #[test]
    fn drift_example() {
        let d = param_change_upper(&[0.0, 0.0], &[iv(-1.0, 3.0), iv(-2.0, 1.0)]).unwrap();
        assert!((d - 13f64.sqrt()).abs() < 1e-15);
        assert_eq!(param_change_upper(&[1.0], &[iv(1.0, 1.0)]).unwrap(), 0.0);
    }

    #[test]
    fn retrain_threshold() {
        let p = RetrainPolicy::new(1.0).unwrap();
        assert!(!should_retrain(&p, 0.5));
        assert!(should_retrain(&p, 1.0));
        assert!(should_retrain(&p, 2.0));
        assert!(RetrainPolicy::new(0.0).is_err());
    }

    #[test]
    fn verdict_lines() {
        let v = Verdict::from_interval(iv(0.5, 1.5));
        assert_eq!(v.json_line(3).unwrap(), r#"{"index":3,"label":1,"L":0.5,"U":1.5}"#);
        let u = Verdict::from_interval(iv(-0.5, 1.5));
        let line = u.json_line(0).unwrap();
        assert_eq!(line, r#"{"index":0,"label":"unknown","L":-0.5,"U":1.5}"#);
        let back: VerdictLine<f64> = serde_json::from_str(&line).unwrap();
        assert_eq!(back.label, Label::Unknown);
    }
}
