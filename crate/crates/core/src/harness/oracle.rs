use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{Algorithm, RunConfig};
use crate::arrival::{augment_with, ArrivalSample, AugmentMode, AugmentOptions};
use crate::error::{contract, invalid, Error, Result};
use crate::matroid::MatroidInstance;
use crate::rng::seeded;

/// Largest ground set, dummies included, that the oracle enumerates.
pub const ORACLE_MAX_ELEMENTS: usize = 8;
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactStat {
    pub element_id: usize,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactResult {
    /// Selection probability of each element of `OPT(E)`.
    pub per_element: Vec<ExactStat>,
    pub augmentation: AugmentMode,
    pub dummies: usize,
    /// Arrival orders of the real elements.
    pub orders: u64,
    /// Distinct (order, cut, coin) cases evaluated.
    pub cases: u64,
    pub total_weight: f64,
}

impl ExactResult {
    pub fn probability(&self, e: usize) -> Option<f64> {
        self.per_element
            .iter()
            .find(|s| s.element_id == e)
            .map(|s| s.probability)
    }
}

/// Arrival times realizing `order` with the first `cut` elements before `p`.
pub fn canonical_times(order: &[usize], cut: usize, p: f64) -> Vec<f64> {
    let n = order.len();
    let mut times = vec![0.0; n];
    for (i, &e) in order.iter().enumerate() {
        times[e] = if i < cut {
            p * (i + 1) as f64 / (cut + 1) as f64
        } else {
            p + (1.0 - p) * (i - cut + 1) as f64 / (n - cut + 1) as f64
        };
    }
    times
}

fn binomial_weights(n: usize, p: f64) -> Vec<f64> {
    let mut c = 1.0;
    (0..=n)
        .map(|k| {
            if k > 0 {
                c = c * (n - k + 1) as f64 / k as f64;
            }
            c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
        })
        .collect()
}

/// Exact selection probabilities by enumerating every arrival order of the
/// real elements, every cut (how many arrive before `p`), and both mixture
/// coins. Only deterministic augmentation (off or pinned) is allowed.
pub fn exact_oracle(
    inst: &MatroidInstance,
    alg: Algorithm,
    cfg: &RunConfig,
    mode: AugmentMode,
) -> Result<ExactResult> {
    cfg.check()?;
    if mode == AugmentMode::Auto {
        return Err(Error::Refused(
            "random augmentation cannot be enumerated; use off or pinned".into(),
        ));
    }
    if !alg.supports(inst.kind()) {
        return invalid(format!("{alg} does not run on {} instances", inst.kind().name()));
    }
    let aug = augment_with(inst, &AugmentOptions::mode(mode, cfg.p), &mut seeded(0))?;
    let n = inst.n();
    if aug.len() > ORACLE_MAX_ELEMENTS {
        return Err(Error::Refused(format!(
            "{} elements including dummies; the oracle stops at {ORACLE_MAX_ELEMENTS}",
            aug.len()
        )));
    }
    let opt: Vec<usize> = inst.opt().iter().collect();
    let coins: Vec<(Option<bool>, f64)> = if alg.is_mixture() {
        vec![(Some(false), 1.0 - cfg.epsilon), (Some(true), cfg.epsilon)]
    } else {
        vec![(None, 1.0)]
    };
    let cut_w = binomial_weights(n, cfg.p);
    let orders: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let order_w = 1.0 / orders.len() as f64;
    let one = |order: &Vec<usize>| -> Result<(Vec<f64>, f64)> {
        let mut acc = vec![0.0; opt.len()];
        let mut total = 0.0;
        for (cut, &cw) in cut_w.iter().enumerate() {
            let sample = ArrivalSample::from_times(canonical_times(order, cut, cfg.p))?;
            for &(coin, kw) in &coins {
                let w = order_w * cw * kw;
                total += w;
                if w == 0.0 {
                    continue;
                }
                let run = RunConfig { coin, ..*cfg };
                let out = alg.run(&aug, &sample, &run, &mut seeded(0))?;
                for (a, &e) in acc.iter_mut().zip(&opt) {
                    if out.selected.contains(e) {
                        *a += w;
                    }
                }
            }
        }
        Ok((acc, total))
    };
    let (acc, total) = orders.par_iter().map(one).try_reduce(
        || (vec![0.0; opt.len()], 0.0),
        |(mut a, ta), (b, tb)| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            Ok((a, ta + tb))
        },
    )?;
    if (total - 1.0).abs() > WEIGHT_TOL {
        return contract(format!("case weights sum to {total}"));
    }
    Ok(ExactResult {
        per_element: opt
            .iter()
            .zip(acc)
            .map(|(&element_id, probability)| ExactStat {
                element_id,
                probability,
            })
            .collect(),
        augmentation: mode,
        dummies: aug.dummies().len(),
        orders: orders.len() as u64,
        cases: (orders.len() * cut_w.len() * coins.len()) as u64,
        total_weight: total,
    })
}
