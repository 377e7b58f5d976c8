//! Monte Carlo competitiveness estimates, the exact enumeration oracle for
//! small instances, and goodness-of-fit tests for the improving process.

mod dist;
mod oracle;

pub use dist::{
    distribution_tests, kolmogorov_pvalue, ks_statistic, ChiSquareResult, DistConfig, DistReport,
    IndependenceResult, KsResult,
};
pub use oracle::{canonical_times, exact_oracle, ExactResult, ExactStat, ORACLE_MAX_ELEMENTS};

use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{Algorithm, RunConfig};
use crate::arrival::{augment_with, sample_arrivals, AugmentMode, AugmentOptions};
use crate::error::{invalid, Result};
use crate::matroid::MatroidInstance;
use crate::rng::trial_rng;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateConfig {
    pub algorithm: Algorithm,
    pub run: RunConfig,
    pub augment: AugmentOptions,
    pub trials: u64,
    pub seed: u64,
}

impl EstimateConfig {
    /// Auto augmentation truncated at `run.p`.
    pub fn new(algorithm: Algorithm, run: RunConfig, trials: u64, seed: u64) -> Self {
        EstimateConfig {
            algorithm,
            run,
            augment: AugmentOptions::auto(run.p),
            trials,
            seed,
        }
    }

    pub fn with_augment(mut self, mode: AugmentMode) -> Self {
        self.augment.mode = mode;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ElementStat {
    pub element_id: usize,
    pub hits: u64,
    pub trials: u64,
    pub freq: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl ElementStat {
    pub fn new(element_id: usize, hits: u64, trials: u64) -> Self {
        let (ci_lo, ci_hi) = wilson(hits, trials);
        ElementStat {
            element_id,
            hits,
            trials,
            freq: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 },
            ci_lo,
            ci_hi,
        }
    }

    /// Standard error of the frequency.
    pub fn stderr(&self) -> f64 {
        (self.freq * (1.0 - self.freq) / self.trials as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportConfig {
    pub algorithm: Algorithm,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub trials: u64,
    pub augmentation: AugmentMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompetitivenessReport {
    pub config: ReportConfig,
    /// One entry per element of `OPT(E)`, by id.
    pub per_element: Vec<ElementStat>,
    /// The entry with the smallest frequency (lowest id on ties).
    pub min: ElementStat,
}

impl CompetitivenessReport {
    pub fn min_frequency(&self) -> f64 {
        self.min.freq
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("element_id,hits,trials,freq,ci_lo,ci_hi\n");
        for e in &self.per_element {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.element_id, e.hits, e.trials, e.freq, e.ci_lo, e.ci_hi
            ));
        }
        s
    }
}

/// Runs `cfg.trials` independent trials, each with fresh arrivals and a
/// fresh augmentation, and counts how often each optimal element is kept.
/// Trial `i` uses stream `i` of `cfg.seed`, so the report does not depend on
/// the thread count.
pub fn estimate(inst: &MatroidInstance, cfg: &EstimateConfig) -> Result<CompetitivenessReport> {
    if cfg.trials == 0 {
        return invalid("need at least one trial");
    }
    cfg.run.check()?;
    if !cfg.algorithm.supports(inst.kind()) {
        return invalid(format!(
            "{} does not run on {} instances",
            cfg.algorithm,
            inst.kind().name()
        ));
    }
    let opt: Vec<usize> = inst.opt().iter().collect();
    let one = |trial: u64| -> Result<Vec<u64>> {
        let mut rng = trial_rng(cfg.seed, trial);
        let aug = augment_with(inst, &cfg.augment, &mut rng)?;
        let sample = sample_arrivals(inst, &mut rng);
        let out = cfg.algorithm.run(&aug, &sample, &cfg.run, &mut rng)?;
        Ok(opt.iter().map(|&e| u64::from(out.selected.contains(e))).collect())
    };
    let hits = (0..cfg.trials)
        .into_par_iter()
        .map(one)
        .try_reduce(
            || vec![0; opt.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let per_element: Vec<ElementStat> = opt
        .iter()
        .zip(&hits)
        .map(|(&e, &h)| ElementStat::new(e, h, cfg.trials))
        .collect();
    let min = per_element
        .iter()
        .copied()
        .reduce(|a, b| if b.freq < a.freq { b } else { a })
        .unwrap_or_else(|| ElementStat::new(0, 0, cfg.trials));
    Ok(CompetitivenessReport {
        config: ReportConfig {
            algorithm: cfg.algorithm,
            p: cfg.run.p,
            epsilon: cfg.algorithm.is_mixture().then_some(cfg.run.epsilon),
            seed: cfg.seed,
            trials: cfg.trials,
            augmentation: cfg.augment.mode,
        },
        per_element,
        min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_gen::random_graph;
    use crate::rng::seeded;

    #[test]
    fn wilson_brackets_the_estimate() {
        let (lo, hi) = wilson(30, 100);
        assert!(lo < 0.3 && 0.3 < hi);
        assert!((lo - 0.2189).abs() < 1e-4 && (hi - 0.3958).abs() < 1e-4);
        assert!(wilson(0, 10).0.abs() < 1e-15);
        assert!((wilson(10, 10).1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_element_late_arrival() {
        let inst = MatroidInstance::uniform(1, 1).unwrap();
        let cfg = EstimateConfig::new(Algorithm::Greedy, RunConfig::new(1e-12), 1, 0)
            .with_augment(AugmentMode::Off);
        let rep = estimate(&inst, &cfg).unwrap();
        assert_eq!(rep.min.freq, 1.0);
    }

    #[test]
    fn zero_trials_is_an_error() {
        let inst = MatroidInstance::uniform(3, 1).unwrap();
        let cfg = EstimateConfig::new(Algorithm::Greedy, RunConfig::new(0.5), 0, 0);
        assert!(estimate(&inst, &cfg).is_err());
        let cfg = EstimateConfig::new(Algorithm::Basic, RunConfig::new(0.5), 10, 0);
        assert!(estimate(&inst, &cfg).is_err());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let inst = random_graph(6, 10, false, 0.0, &mut seeded(3)).unwrap();
        let cfg = EstimateConfig::new(Algorithm::MixtureGraphic, RunConfig::mixture(0.5, 0.3), 3000, 17);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate(&inst, &cfg).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for e in &a.per_element {
            assert!(e.hits <= e.trials && e.ci_lo <= e.freq && e.freq <= e.ci_hi);
        }
    }

    #[test]
    fn classical_secretary() {
        let inst = MatroidInstance::uniform(300, 1).unwrap();
        let cfg = EstimateConfig::new(Algorithm::Greedy, RunConfig::new(1.0 / std::f64::consts::E), 20_000, 1);
        let rep = estimate(&inst, &cfg).unwrap();
        assert!((rep.min.freq - 0.3679).abs() < 0.02, "{}", rep.min.freq);
        assert!(rep.to_csv().starts_with("element_id,hits,trials,freq,ci_lo,ci_hi\n0,"));
    }
}
