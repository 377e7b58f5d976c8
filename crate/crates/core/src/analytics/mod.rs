//! Closed-form competitiveness bounds, the mixture objectives, and the
//! optimizers that recover the best parameters.

mod optimize;
mod poisson;

pub use optimize::{maximize_box, optimize_scalar, GRID_POINTS};
pub use poisson::{poisson_at_least, poisson_below, poisson_cdf, poisson_pmf, poisson_split};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::labeling::{in_language, Language};

/// Root tolerance for the crossover equations.
pub const BISECTION_TOL: f64 = 1e-10;
/// Golden-section tolerance used when recovering optimal sample sizes.
pub const SCALAR_TOL: f64 = 1e-10;
/// Open interval used for `p` searches.
pub const P_RANGE: (f64, f64) = (1e-6, 1.0 - 1e-6);

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("p = {p} outside (0,1)"));
    }
    Ok(())
}

fn check_r(r: usize) -> Result<()> {
    if r == 0 {
        return invalid("rank must be at least 1");
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return invalid(format!("epsilon = {eps} outside [0,1]"));
    }
    Ok(())
}

/// `(1 - 1/r)^r`.
fn shrink(r: usize) -> f64 {
    let r = r as f64;
    (1.0 - 1.0 / r).powf(r)
}

/// Exact competitiveness of greedy-improving on rank-`r` uniform matroids.
pub fn c_uniform(r: usize, p: f64) -> Result<f64> {
    check_r(r)?;
    check_p(p)?;
    if r == 1 {
        return Ok(-p * p.ln());
    }
    let s = shrink(r);
    let lam = r as f64 * (1.0 / p).ln();
    let lam1 = (r - 1) as f64 * (1.0 / p).ln();
    let k = (1.0 - s) / s;
    Ok(k * p + poisson_below(lam, r as u64)? - p / s * poisson_below(lam1, r as u64)?)
}

/// Lower bound for greedy-improving on rank-`r` laminar matroids.
pub fn a_laminar(r: usize, p: f64) -> Result<f64> {
    check_r(r)?;
    check_p(p)?;
    if r == 1 {
        return Ok(-p * p.ln());
    }
    let s = shrink(r);
    let lam = r as f64 * (1.0 / p).ln();
    let lam1 = (r - 1) as f64 * (1.0 / p).ln();
    let r64 = r as u64;
    Ok(-2.0 * p
        + (2.0 + p.ln()) * poisson_below(lam, r64 - 1)?
        + 2.0 * poisson_pmf(lam, r64 - 1)?
        + p / s * poisson_at_least(lam1, r64)?)
}

/// `p(1 - p)`.
pub fn basic_bound(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(p * (1.0 - p))
}

/// `p(1 - p^2)/4 - p ln(p)/2`.
pub fn generation_bound(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(0.25 * p * (1.0 - p * p) - 0.5 * p * p.ln())
}

/// Where the two rank-2 integrands cross: the root `q > p` of
/// `ε (q - p + p ln(q/p)) = p ln(q/p)`. `None` when the root is at least 1.
/// For `ε >= 1/2` there is no root above `p` and `p` itself is returned.
pub fn rank2_crossover(p: f64, eps: f64) -> Result<Option<f64>> {
    check_p(p)?;
    check_eps(eps)?;
    if eps >= 0.5 {
        return Ok(Some(p));
    }
    let h = |q: f64| eps * (q - p + p * (q / p).ln()) - p * (q / p).ln();
    if eps == 0.0 {
        return Ok(None);
    }
    // h is convex with h(p) = 0 and its minimum at p(1 - ε)/ε.
    let mut lo = p * (1.0 - eps) / eps;
    if lo >= 1.0 || h(1.0) <= 0.0 {
        return Ok(None);
    }
    let mut hi = 1.0;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Value of the rank-2 mixture bound with the crossover placed at `q`.
fn rank2_value(p: f64, eps: f64, q: Option<f64>) -> f64 {
    let greedy = p * (2.0 - 2.0 * p + p * p.ln());
    match q {
        None => (1.0 - eps) * greedy - eps * p * p.ln(),
        Some(q) => {
            let pq = p * p / q;
            (1.0 - eps) * (greedy + pq * (1.0 - q) * (1.0 - p.ln()) + pq * q.ln())
                + eps * (pq * (1.0 - q) + p * (q / p).ln())
        }
    }
}

/// Lower bound for the rank-2 mixture with sample `p` and bias `ε`.
pub fn rank2_mixture_bound(p: f64, eps: f64) -> Result<f64> {
    let q = rank2_crossover(p, eps)?;
    Ok(rank2_value(p, eps, q))
}

/// `R(q) = (q - ln q - 1) / (q - ln q - 1 + 1/q)`.
pub fn graphic_ratio(q: f64) -> f64 {
    let a = q - q.ln() - 1.0;
    a / (a + 1.0 / q)
}

/// `q` in `[1/2, 1]` with `R(q) = ε`, or `None` when `ε > R(1/2)`.
pub fn graphic_crossover(eps: f64) -> Result<Option<f64>> {
    check_eps(eps)?;
    if eps > graphic_ratio(0.5) {
        return Ok(None);
    }
    // R decreases on [1/2, 1] from R(1/2) to 0.
    let (mut lo, mut hi) = (0.5, 1.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if graphic_ratio(mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn graphic_tail(x: f64) -> f64 {
    1.5 - x - 0.5 * x * x + x * x.ln()
}

fn graphic_value(p: f64, eps: f64, q: Option<f64>) -> f64 {
    match q {
        Some(q) if p < q => {
            p * eps * (q / p).ln() + (1.0 - eps) * (q - p) * p + p * (1.0 - eps) * graphic_tail(q)
        }
        _ => p * (1.0 - eps) * graphic_tail(p),
    }
}

/// Lower bound for the graphic mixture; needs `p >= 1/2`.
pub fn graphic_mixture_bound(p: f64, eps: f64) -> Result<f64> {
    check_p(p)?;
    if p < 0.5 {
        return invalid(format!("the graphic mixture bound needs p >= 1/2, got {p}"));
    }
    let q = graphic_crossover(eps)?;
    Ok(graphic_value(p, eps, q))
}

/// `(p - p^q)/(q - 1)`, or `-p ln p` for `q = 1`.
pub fn forbidden_bound(q: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    match q {
        0 => invalid("q must be at least 1"),
        1 => Ok(-p * p.ln()),
        _ => Ok((p - p.powi(q as i32)) / (q as f64 - 1.0)),
    }
}

/// Best sample size and value of the `q`-forbidden bound, found numerically.
pub fn forbidden_optimum(q: usize) -> Result<(f64, f64)> {
    forbidden_bound(q, 0.5)?;
    optimize_scalar(
        |p| forbidden_bound(q, p).unwrap_or(f64::NAN),
        P_RANGE.0,
        P_RANGE.1,
        SCALAR_TOL,
    )
}

/// Best sample size for a one-parameter family.
pub fn best_p(f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    optimize_scalar(|p| f(p).unwrap_or(f64::NAN), P_RANGE.0, P_RANGE.1, SCALAR_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixtureTarget {
    Rank2,
    Graphic,
    /// Graphic with `ε > R(1/2)`, where the bound no longer depends on a
    /// crossover; reported as the supremum at `ε = R(1/2)`.
    GraphicAboveThreshold,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixtureOptimum {
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub epsilon: f64,
    pub value: f64,
}

const BOX_SIDE: usize = 41;
const BOX_ROUNDS: usize = 60;

/// Maximizes a mixture bound with `ε` tied to the crossover point `q`.
pub fn optimize_mixture(target: MixtureTarget) -> Result<MixtureOptimum> {
    match target {
        MixtureTarget::Rank2 => {
            let eps_of = |p: f64, q: f64| {
                let l = p * (q / p).ln();
                l / (q - p + l)
            };
            // q = p + s(1 - p) keeps the search on a box.
            let f = |p: f64, s: f64| {
                let q = p + s * (1.0 - p);
                if q <= p {
                    return rank2_value(p, 0.5, Some(p));
                }
                rank2_value(p, eps_of(p, q), Some(q))
            };
            let ((p, s), value) = maximize_box(f, P_RANGE, (0.0, 1.0), BOX_SIDE, BOX_ROUNDS)?;
            let q = p + s * (1.0 - p);
            Ok(MixtureOptimum {
                p,
                q: Some(q),
                epsilon: eps_of(p, q),
                value,
            })
        }
        MixtureTarget::Graphic => {
            let f = |p: f64, s: f64| {
                let q = p + s * (1.0 - p);
                graphic_value(p, graphic_ratio(q), Some(q))
            };
            let ((p, s), value) =
                maximize_box(f, (0.5, P_RANGE.1), (0.0, 1.0), BOX_SIDE, BOX_ROUNDS)?;
            let q = p + s * (1.0 - p);
            Ok(MixtureOptimum {
                p,
                q: Some(q),
                epsilon: graphic_ratio(q),
                value,
            })
        }
        MixtureTarget::GraphicAboveThreshold => {
            let eps = graphic_ratio(0.5);
            let (p, value) =
                optimize_scalar(|p| graphic_value(p, eps, None), 0.5, P_RANGE.1, SCALAR_TOL)?;
            Ok(MixtureOptimum {
                p,
                q: None,
                epsilon: eps,
                value,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub prob: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Frequency with which a random improving word on `[a,b]` (length
/// `Poisson(r ln(b/a))`, uniform symbols in `[r]`) lies in `lang`.
pub fn language_prob_mc(
    lang: Language,
    r: usize,
    a: f64,
    b: f64,
    samples: u64,
    rng: &mut impl Rng,
) -> Result<McEstimate> {
    check_r(r)?;
    if samples == 0 {
        return invalid("need at least one sample");
    }
    if !(0.0 < a && a < b && b <= 1.0) {
        return invalid(format!("need 0 < a < b <= 1, got a = {a}, b = {b}"));
    }
    let rate = r as f64 * (b / a).ln();
    let len = Poisson::new(rate).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut word = Vec::new();
    let mut hits = 0u64;
    for _ in 0..samples {
        let k = len.sample(rng) as usize;
        word.clear();
        word.extend((0..k).map(|_| rng.random_range(1..=r as u32)));
        if in_language(&word, lang)? {
            hits += 1;
        }
    }
    let prob = hits as f64 / samples as f64;
    Ok(McEstimate {
        prob,
        stderr: (prob * (1.0 - prob) / samples as f64).sqrt(),
        samples,
    })
}
