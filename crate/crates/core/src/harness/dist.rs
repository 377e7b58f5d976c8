use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::analytics::poisson_pmf;
use crate::arrival::{augment_with, improving_stats, sample_arrivals, AugmentOptions, ImprovingTrace};
use crate::error::{invalid, Error, Result};
use crate::matroid::MatroidInstance;
use crate::rng::trial_rng;

/// Smallest expected count per chi-square bin.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistConfig {
    /// Truncation point of the augmentation; the improving process is exact
    /// on `[trunc, 1]`.
    pub trunc: f64,
    /// Right end for `S(b)`.
    pub b: f64,
    /// Intervals `[a, b)` whose counts are compared with Poisson laws.
    pub intervals: Vec<(f64, f64)>,
    /// Two disjoint intervals whose counts are tested for correlation.
    pub pair: ((f64, f64), (f64, f64)),
    /// Significance level used for `passed`.
    pub alpha: f64,
}

impl Default for DistConfig {
    fn default() -> Self {
        DistConfig {
            trunc: 0.05,
            b: 1.0,
            intervals: vec![(0.5, 1.0), (0.25, 0.5), (0.1, 1.0)],
            pair: ((0.25, 0.5), (0.5, 1.0)),
            alpha: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub b: f64,
    /// Samples with `S(b) >= trunc`; the test is conditional on that event.
    pub samples: u64,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub a: f64,
    pub b: f64,
    pub rate: f64,
    pub bins: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub mean: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IndependenceResult {
    pub first: (f64, f64),
    pub second: (f64, f64),
    pub rho: f64,
    /// `3 / sqrt(trials)`.
    pub threshold: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistReport {
    pub rank: usize,
    pub trials: u64,
    pub seed: u64,
    pub ks: KsResult,
    pub chi_square: Vec<ChiSquareResult>,
    pub independence: IndependenceResult,
    pub passed: bool,
}

/// Kolmogorov distribution tail `Q(λ) = 2 Σ (-1)^(k-1) exp(-2 k² λ²)`.
pub fn kolmogorov_pvalue(n: u64, d: f64) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sided KS distance between a sample and a continuous CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

fn chi_square(counts: &[usize], rate: f64, a: f64, b: f64) -> Result<ChiSquareResult> {
    let trials = counts.len() as f64;
    let top = counts.iter().copied().max().unwrap_or(0);
    let mut observed = vec![0u64; top + 1];
    for &c in counts {
        observed[c] += 1;
    }
    // Expected counts up to the largest observed value; the last bin takes
    // the whole upper tail.
    let mut expected = Vec::with_capacity(top + 1);
    let mut below = 0.0;
    for k in 0..=top {
        let e = if k == top { 1.0 - below } else { poisson_pmf(rate, k as u64)? };
        below += e;
        expected.push(e * trials);
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for (o, e) in observed.iter().zip(&expected) {
        cur.0 += *o as f64;
        cur.1 += e;
        if cur.1 >= MIN_EXPECTED {
            bins.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.1 > 0.0 || cur.0 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => bins.push(cur),
        }
    }
    if bins.len() < 2 {
        return invalid(format!("too few trials for a chi-square test on [{a}, {b})"));
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Evaluation(e.to_string()))?;
    Ok(ChiSquareResult {
        a,
        b,
        rate,
        bins: bins.len(),
        statistic,
        dof,
        p_value: 1.0 - dist.cdf(statistic),
        mean: counts.iter().sum::<usize>() as f64 / trials,
    })
}

fn pearson(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<usize>() as f64 / n;
    let my = y.iter().sum::<usize>() as f64 / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a as f64 - mx, b as f64 - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

struct TrialStats {
    last: Option<f64>,
    counts: Vec<usize>,
    pair: (usize, usize),
}

/// Checks the Poisson structure of improving times on the augmented
/// instance: the law of `S(b)`, Poisson counts on intervals, and the lack
/// of correlation between counts on disjoint intervals.
pub fn distribution_tests(
    inst: &MatroidInstance,
    trials: u64,
    seed: u64,
    cfg: &DistConfig,
) -> Result<DistReport> {
    if trials < 2 {
        return invalid("need at least two trials");
    }
    if !(cfg.trunc > 0.0 && cfg.trunc < cfg.b && cfg.b <= 1.0) {
        return invalid(format!("need 0 < trunc < b <= 1, got {} and {}", cfg.trunc, cfg.b));
    }
    let (p1, p2) = cfg.pair;
    for &(a, b) in cfg.intervals.iter().chain([&p1, &p2]) {
        if !(cfg.trunc <= a && a < b && b <= 1.0) {
            return invalid(format!("interval [{a}, {b}) must lie in [{}, 1]", cfg.trunc));
        }
    }
    if p1.1 > p2.0 && p2.1 > p1.0 {
        return invalid("the correlation intervals overlap");
    }
    let opts = AugmentOptions::auto(cfg.trunc);
    let one = |trial: u64| -> Result<(usize, TrialStats)> {
        let mut rng = trial_rng(seed, trial);
        let aug = augment_with(inst, &opts, &mut rng)?;
        let sample = sample_arrivals(inst, &mut rng);
        let trace = if inst.is_graphic() {
            ImprovingTrace::build(&aug, &sample)?
        } else {
            ImprovingTrace::build_plain(&aug, &sample)?
        };
        let count = |(a, b): (f64, f64)| improving_stats(&trace, a, b).map(|s| s.count);
        Ok((
            trace.rank(),
            TrialStats {
                last: improving_stats(&trace, 0.0, cfg.b)?.last_before_b,
                counts: cfg.intervals.iter().map(|&iv| count(iv)).collect::<Result<_>>()?,
                pair: (count(p1)?, count(p2)?),
            },
        ))
    };
    let all: Vec<(usize, TrialStats)> = (0..trials).into_par_iter().map(one).collect::<Result<_>>()?;
    let rank = all[0].0;
    let r = rank as i32;

    let floor = (cfg.trunc / cfg.b).powi(r);
    let mut tail: Vec<f64> = all
        .iter()
        .filter_map(|(_, s)| s.last)
        .filter(|&x| x >= cfg.trunc)
        .collect();
    if tail.is_empty() {
        return invalid("no trial has S(b) above the truncation point");
    }
    let d = ks_statistic(&mut tail, |x| ((x / cfg.b).powi(r) - floor) / (1.0 - floor));
    let ks = KsResult {
        b: cfg.b,
        samples: tail.len() as u64,
        statistic: d,
        p_value: kolmogorov_pvalue(tail.len() as u64, d),
    };

    let mut chi_square = Vec::new();
    for (i, &(a, b)) in cfg.intervals.iter().enumerate() {
        let counts: Vec<usize> = all.iter().map(|(_, s)| s.counts[i]).collect();
        chi_square.push(chi_square_for(&counts, rank, a, b)?);
    }

    let xs: Vec<usize> = all.iter().map(|(_, s)| s.pair.0).collect();
    let ys: Vec<usize> = all.iter().map(|(_, s)| s.pair.1).collect();
    let rho = pearson(&xs, &ys);
    let sn = (trials as f64).sqrt();
    let normal = Normal::new(0.0, 1.0).map_err(|e| Error::Evaluation(e.to_string()))?;
    let independence = IndependenceResult {
        first: p1,
        second: p2,
        rho,
        threshold: 3.0 / sn,
        p_value: 2.0 * (1.0 - normal.cdf(rho.abs() * sn)),
    };

    let passed = ks.p_value > cfg.alpha
        && chi_square.iter().all(|c| c.p_value > cfg.alpha)
        && independence.p_value > cfg.alpha
        && rho.abs() < independence.threshold;
    Ok(DistReport {
        rank,
        trials,
        seed,
        ks,
        chi_square,
        independence,
        passed,
    })
}

fn chi_square_for(counts: &[usize], rank: usize, a: f64, b: f64) -> Result<ChiSquareResult> {
    chi_square(counts, rank as f64 * (b / a).ln(), a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;
    use rand_distr::{Distribution, Poisson};

    #[test]
    fn kolmogorov_reference_values() {
        // Q(1.0) = 0.27, Q(1.36) ≈ 0.0494 for large n.
        assert!((kolmogorov_pvalue(1_000_000, 1.0 / 1000.0) - 0.27).abs() < 1e-3);
        assert!((kolmogorov_pvalue(1_000_000, 1.36 / 1000.0) - 0.0494).abs() < 1e-3);
        assert_eq!(kolmogorov_pvalue(100, 0.0), 1.0);
    }

    #[test]
    fn ks_accepts_uniforms_and_rejects_squares() {
        let mut rng = seeded(1);
        let mut u: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let d = ks_statistic(&mut u, |x| x);
        assert!(kolmogorov_pvalue(20_000, d) > 0.01);
        let mut sq: Vec<f64> = u.iter().map(|x| x * x).collect();
        let d = ks_statistic(&mut sq, |x| x);
        assert!(kolmogorov_pvalue(20_000, d) < 1e-6);
    }

    #[test]
    fn chi_square_accepts_poisson_and_rejects_shifted() {
        let mut rng = seeded(2);
        let pois = Poisson::new(2.0).unwrap();
        let xs: Vec<usize> = (0..20_000).map(|_| pois.sample(&mut rng) as usize).collect();
        assert!(chi_square(&xs, 2.0, 0.5, 1.0).unwrap().p_value > 0.01);
        assert!(chi_square(&xs, 2.3, 0.5, 1.0).unwrap().p_value < 1e-6);
    }

    #[test]
    fn uniform_instance_passes() {
        let inst = MatroidInstance::uniform(6, 3).unwrap();
        let rep = distribution_tests(&inst, 20_000, 4, &DistConfig::default()).unwrap();
        assert_eq!(rep.rank, 3);
        assert!(rep.passed, "{rep:?}");
    }
}
