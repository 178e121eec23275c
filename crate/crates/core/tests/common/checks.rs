//! Randomized checks of the convex-analysis facts the bounds rely on. Each
//! returns the number of cases checked or a description of the first failure.

use incbound::{sphere_extremes, Loss, Objective, Penalty, Radii, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{exact_solution, trial, Dense};

type Outcome = Result<usize, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_objective(r: &mut ChaCha8Rng) -> Objective {
    Objective::new(r.gen_range(0.05..2.0), r.gen_range(1e-3..2.0)).unwrap()
}

/// `phi(r) + phi*(u) >= r u`, with equality at `u = phi'(r)`; likewise for
/// each penalty component.
pub fn fenchel_young(cases: usize) -> Outcome {
    let mut r = rng(11);
    for k in 0..cases {
        let obj = random_objective(&mut r);
        let m: f64 = r.gen_range(-4.0..4.0);
        let u: f64 = r.gen_range(-1.0..=0.0);
        let lhs = obj.loss.value(m) + obj.loss.conjugate(u).finite().unwrap();
        if lhs < m * u - 1e-12 {
            return Err(format!("case {k}: loss inequality fails at r={m}, u={u}"));
        }
        let g = obj.loss.subgradient(m).lo;
        let eq = obj.loss.value(m) + obj.loss.conjugate(g).finite().unwrap() - m * g;
        if eq.abs() > 1e-12 {
            return Err(format!("case {k}: loss equality off by {eq} at r={m}"));
        }
        let w: f64 = r.gen_range(-5.0..5.0);
        let v: f64 = r.gen_range(-5.0..5.0);
        let pen = &obj.penalty;
        if pen.component(w) + pen.conjugate_component(v) < w * v - 1e-12 {
            return Err(format!("case {k}: penalty inequality fails"));
        }
        let s = pen.subgradient_component(w).lo;
        let eq = pen.component(w) + pen.conjugate_component(s) - w * s;
        if eq.abs() > 1e-10 * (1.0 + s.abs() * w.abs()) {
            return Err(format!("case {k}: penalty equality off by {eq}"));
        }
    }
    Ok(cases)
}

/// Conjugates agree with `sup_x (u x - f(x))` over a fine grid within 1e-4,
/// and points outside the loss conjugate's domain have unbounded grid sups.
pub fn conjugacy_by_grid(cases: usize) -> Outcome {
    let mut r = rng(12);
    let grid: Vec<f64> = (0..=12_000).map(|k| -6.0 + k as f64 * 1e-3).collect();
    for k in 0..cases {
        let obj = random_objective(&mut r);
        let u: f64 = r.gen_range(-1.0..=0.0);
        let sup = grid.iter().map(|&x| u * x - obj.loss.value(x)).fold(f64::NEG_INFINITY, f64::max);
        let conj = obj.loss.conjugate(u).finite().unwrap();
        if (sup - conj).abs() > 1e-4 {
            return Err(format!("case {k}: loss conjugate {conj} vs grid {sup} at u={u}"));
        }
        let outside = if r.gen_bool(0.5) { r.gen_range(0.05..1.0) } else { r.gen_range(-2.0..-1.05) };
        let wide = (0..=20_000).map(|k| -1000.0 + k as f64 * 0.1);
        let sup_out = wide.map(|x| outside * x - obj.loss.value(x)).fold(f64::NEG_INFINITY, f64::max);
        if !obj.loss.conjugate(outside).is_infeasible() || sup_out < 10.0 {
            return Err(format!("case {k}: u={outside} should be outside the domain"));
        }
        let v: f64 = r.gen_range(-0.5..0.5);
        let lam = obj.lambda();
        // The maximizer v / lambda lies inside the grid for these ranges.
        let centre = v / lam;
        let sup = (0..=4000)
            .map(|k| centre - 2.0 + k as f64 * 1e-3)
            .map(|x| v * x - obj.penalty.component(x))
            .fold(f64::NEG_INFINITY, f64::max);
        let conj = obj.penalty.conjugate_component(v);
        if (sup - conj).abs() > 1e-4 {
            return Err(format!("case {k}: penalty conjugate {conj} vs grid {sup}"));
        }
    }
    Ok(cases)
}

/// The loss gradient is `1/gamma`-Lipschitz (and the quadratic upper bound
/// holds); the penalty is `lambda`-strongly convex.
pub fn smoothness_and_strong_convexity(cases: usize) -> Outcome {
    let mut r = rng(13);
    for k in 0..cases {
        let obj = random_objective(&mut r);
        let g = obj.loss.smoothness().unwrap();
        let a: f64 = r.gen_range(-3.0..3.0);
        let b: f64 = r.gen_range(-3.0..3.0);
        let (da, db) = (obj.loss.subgradient(a).lo, obj.loss.subgradient(b).lo);
        if (da - db).abs() > (a - b).abs() / g + 1e-12 {
            return Err(format!("case {k}: gradient not 1/gamma-Lipschitz at {a}, {b}"));
        }
        let upper = obj.loss.value(a) + da * (b - a) + (b - a).powi(2) / (2.0 * g);
        if obj.loss.value(b) > upper + 1e-12 {
            return Err(format!("case {k}: quadratic upper bound fails"));
        }
        let lam = obj.penalty.strong_convexity().unwrap();
        let d = r.gen_range(1..6);
        let x: Vec<f64> = (0..d).map(|_| r.gen_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| r.gen_range(-3.0..3.0)).collect();
        let lin: f64 = x
            .iter()
            .zip(&y)
            .map(|(&xi, &yi)| obj.penalty.subgradient_component(xi).lo * (yi - xi))
            .sum();
        let dist2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
        let lower = obj.penalty.value(&x) + lin + lam / 2.0 * dist2;
        if obj.penalty.value(&y) < lower - 1e-10 {
            return Err(format!("case {k}: strong convexity fails"));
        }
    }
    Ok(cases)
}

/// The closed form for the range of `eta^T q` over a ball against sampled
/// points of the ball, and the explicit extreme points.
pub fn sphere_linear_bound(cases: usize) -> Outcome {
    let mut r = rng(14);
    for k in 0..cases {
        let p = r.gen_range(1..7);
        let eta: Vec<f64> = (0..p).map(|_| r.gen_range(-2.0..2.0)).collect();
        let c: Vec<f64> = (0..p).map(|_| r.gen_range(-2.0..2.0)).collect();
        let rad: f64 = r.gen_range(0.0..3.0);
        let iv = sphere_extremes(&eta, &c, rad);
        let norm = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
        for _ in 0..50 {
            let dir: Vec<f64> = (0..p).map(|_| r.gen_range(-1.0..1.0)).collect();
            let dn = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            let scale = rad * r.gen_range(0.0..=1.0f64).powf(1.0 / p as f64) / dn;
            let s: f64 = eta.iter().zip(&c).zip(&dir).map(|((e, ci), di)| e * (ci + scale * di)).sum();
            if s < iv.lo - 1e-12 || s > iv.hi + 1e-12 {
                return Err(format!("case {k}: sampled value {s} outside {iv:?}"));
            }
        }
        if norm > 0.0 {
            let at = |sign: f64| -> f64 {
                eta.iter().zip(&c).map(|(e, ci)| e * (ci + sign * rad * e / norm)).sum()
            };
            if (at(1.0) - iv.hi).abs() > 1e-6 || (at(-1.0) - iv.lo).abs() > 1e-6 {
                return Err(format!("case {k}: extreme points miss the closed form"));
            }
        }
        if p == 2 {
            // Dense sweep of the circle.
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for t in 0..100_000 {
                let th = t as f64 * std::f64::consts::TAU / 100_000.0;
                let s = eta[0] * (c[0] + rad * th.cos()) + eta[1] * (c[1] + rad * th.sin());
                lo = lo.min(s);
                hi = hi.max(s);
            }
            if (lo - iv.lo).abs() > 1e-6 || (hi - iv.hi).abs() > 1e-6 {
                return Err(format!("case {k}: circle sweep [{lo}, {hi}] vs {iv:?}"));
            }
        }
    }
    Ok(cases)
}

/// The exact optimum of a modified problem lies in both solution spheres
/// around any feasible old pair, with the radii built from the gap of that
/// pair.
pub fn solution_spheres(cases: usize) -> Outcome {
    let mut r = rng(15);
    for k in 0..cases {
        let lambda = [0.001, 0.01, 0.1, 1.0][k % 4];
        let scenario = Scenario::ALL[k % 3];
        let t = trial((25, 6, 0.4), 10_000 + k as u64, scenario, r.gen_range(1..8), lambda);
        let dense = Dense::of(&t.modified);
        let exact = exact_solution(&t.modified, lambda, t.gamma);
        if exact.gap.abs() > 1e-12 {
            return Err(format!("case {k}: oracle gap {}", exact.gap));
        }
        // Alternate between the trained pair and an arbitrary feasible pair.
        let (w, a) = if k % 2 == 0 {
            (t.base.solution.w.clone(), t.base.solution.alpha.clone())
        } else {
            (
                (0..dense.d).map(|_| r.gen_range(-2.0..2.0)).collect(),
                (0..dense.n).map(|_| r.gen_range(0.0..=1.0)).collect(),
            )
        };
        let gap = dense.primal(lambda, t.gamma, &w) - dense.dual(lambda, t.gamma, &a);
        let radii = Radii::new(gap, &t.objective(), dense.n);
        let dw = w.iter().zip(&exact.w).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let da = a.iter().zip(&exact.alpha).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        if dw > radii.primal + 1e-9 || da > radii.dual + 1e-9 {
            return Err(format!(
                "case {k}: distances ({dw}, {da}) exceed radii ({}, {})",
                radii.primal, radii.dual
            ));
        }
    }
    Ok(cases)
}
