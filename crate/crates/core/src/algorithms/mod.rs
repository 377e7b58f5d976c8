//! The online selection rules. Each one reads an improving trace of an
//! augmented instance and reports the real elements it accepts.

mod digraph;

pub use digraph::{AuxArc, AuxDigraph};

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arrival::{ArrivalSample, AugmentedInstance, ImprovingTrace};
use crate::error::{contract, invalid, Error, Result};
use crate::matroid::{Builder, ElementSet, Ground, MatroidKind};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Sample fraction: arrivals before `p` are only observed.
    pub p: f64,
    /// Probability of the alternative branch of a mixture.
    pub epsilon: f64,
    /// Pre-drawn mixture coin; `true` runs the alternative branch.
    pub coin: Option<bool>,
}

impl RunConfig {
    pub fn new(p: f64) -> Self {
        RunConfig {
            p,
            epsilon: 0.0,
            coin: None,
        }
    }

    pub fn mixture(p: f64, epsilon: f64) -> Self {
        RunConfig {
            p,
            epsilon,
            coin: None,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return invalid(format!("sample fraction p = {} outside (0,1)", self.p));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return invalid(format!("epsilon = {} outside [0,1]", self.epsilon));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    ObliviousPartition,
    MixtureRank2,
    Basic,
    Generation,
    ObliviousGraphic,
    MixtureGraphic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Greedy,
        Algorithm::ObliviousPartition,
        Algorithm::MixtureRank2,
        Algorithm::Basic,
        Algorithm::Generation,
        Algorithm::ObliviousGraphic,
        Algorithm::MixtureGraphic,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::ObliviousPartition => "oblivious-partition",
            Algorithm::MixtureRank2 => "mixture-rank2",
            Algorithm::Basic => "basic",
            Algorithm::Generation => "generation",
            Algorithm::ObliviousGraphic => "oblivious-graphic",
            Algorithm::MixtureGraphic => "mixture-graphic",
        }
    }

    pub fn is_mixture(self) -> bool {
        matches!(self, Algorithm::MixtureRank2 | Algorithm::MixtureGraphic)
    }

    pub fn needs_graph(self) -> bool {
        matches!(
            self,
            Algorithm::Basic
                | Algorithm::Generation
                | Algorithm::ObliviousGraphic
                | Algorithm::MixtureGraphic
        )
    }

    /// Whether the rule is defined on instances of this kind.
    pub fn supports(self, kind: &MatroidKind) -> bool {
        match self {
            Algorithm::Greedy => true,
            Algorithm::ObliviousPartition | Algorithm::MixtureRank2 => matches!(
                kind,
                MatroidKind::Rank2 { .. } | MatroidKind::Uniform { rank: 2 }
            ),
            _ => matches!(kind, MatroidKind::Graphic { .. }),
        }
    }

    /// Draws the mixture coin, or returns `None` for plain rules.
    pub fn draw_coin(self, cfg: &RunConfig, rng: &mut impl Rng) -> Option<bool> {
        self.is_mixture()
            .then(|| cfg.coin.unwrap_or_else(|| rng.random_bool(cfg.epsilon)))
    }

    /// Builds the trace and runs the rule. Mixture coins come from `cfg.coin`
    /// or else from `rng`.
    pub fn run(
        self,
        aug: &AugmentedInstance<'_>,
        sample: &ArrivalSample,
        cfg: &RunConfig,
        rng: &mut impl Rng,
    ) -> Result<RunOutcome> {
        let coin = self.draw_coin(cfg, rng);
        let trace = if self.needs_graph() {
            ImprovingTrace::build(aug, sample)?
        } else {
            ImprovingTrace::build_plain(aug, sample)?
        };
        self.run_on_trace(aug, &trace, &RunConfig { coin, ..*cfg })
    }

    /// Runs the rule on a prepared trace. Mixtures need `cfg.coin`.
    pub fn run_on_trace(
        self,
        aug: &AugmentedInstance<'_>,
        trace: &ImprovingTrace,
        cfg: &RunConfig,
    ) -> Result<RunOutcome> {
        cfg.check()?;
        if !self.supports(aug.base().kind()) {
            return invalid(format!(
                "{} does not run on {} instances",
                self.id(),
                aug.base().kind().name()
            ));
        }
        let (alg, branch) = match self {
            Algorithm::MixtureRank2 | Algorithm::MixtureGraphic => {
                let Some(coin) = cfg.coin else {
                    return contract("mixture run without a coin");
                };
                let sub = match (self, coin) {
                    (Algorithm::MixtureRank2, true) => Algorithm::ObliviousPartition,
                    (Algorithm::MixtureRank2, false) => Algorithm::Greedy,
                    (_, true) => Algorithm::ObliviousGraphic,
                    (_, false) => Algorithm::Generation,
                };
                (sub, Some(sub))
            }
            _ => (self, None),
        };
        let mut out = match alg {
            Algorithm::Greedy => greedy_improving(aug, trace, cfg.p),
            Algorithm::ObliviousPartition => oblivious_partition(aug, trace, cfg.p),
            Algorithm::Basic => aux_rule(aug, trace, cfg.p, false),
            Algorithm::Generation => aux_rule(aug, trace, cfg.p, true),
            Algorithm::ObliviousGraphic => oblivious_graphic(aug, trace, cfg.p),
            Algorithm::MixtureRank2 | Algorithm::MixtureGraphic => unreachable!(),
        }?;
        out.branch = branch;
        Ok(out)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .map_or_else(|| invalid(format!("unknown algorithm \"{s}\"")), Ok)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunOutcome {
    /// Accepted real elements.
    pub selected: ElementSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux: Option<AuxDigraph>,
    /// The rule a mixture delegated to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Algorithm>,
}

fn real_only(g: &Ground<'_>, picked: impl IntoIterator<Item = usize>) -> ElementSet {
    let n = g.n_real();
    picked.into_iter().filter(|&e| e < n && !g.is_dummy(e)).collect()
}

/// Accepts every improving arrival in `[p,1]` that keeps the running
/// selection independent. Dummies take capacity but are not reported.
pub fn greedy_improving(
    aug: &AugmentedInstance<'_>,
    trace: &ImprovingTrace,
    p: f64,
) -> Result<RunOutcome> {
    let g = aug.ground();
    let mut b = Builder::new(g);
    let recs = &trace.records()[trace.first_at_or_after(p)..];
    let picked: Vec<usize> = recs
        .iter()
        .map(|r| r.elem)
        .filter(|&e| b.try_insert(e))
        .collect();
    Ok(RunOutcome {
        selected: real_only(&g, picked),
        ..Default::default()
    })
}

/// With `OPT(E_p) = {g1, g2}`, takes the first improving arrival parallel to
/// `g1` and the first one not parallel to it.
pub fn oblivious_partition(
    aug: &AugmentedInstance<'_>,
    trace: &ImprovingTrace,
    p: f64,
) -> Result<RunOutcome> {
    let g = aug.ground();
    let sample_opt = trace.opt_at(p);
    if sample_opt.len() < 2 {
        return contract(format!(
            "OPT(E_p) has {} element(s); the instance needs augmenting",
            sample_opt.len()
        ));
    }
    let g1 = sample_opt[0];
    let (mut f1, mut f2) = (None, None);
    for r in &trace.records()[trace.first_at_or_after(p)..] {
        if g.parallel(r.elem, g1) {
            f1.get_or_insert(r.elem);
        } else {
            f2.get_or_insert(r.elem);
        }
        if f1.is_some() && f2.is_some() {
            break;
        }
    }
    Ok(RunOutcome {
        selected: real_only(&g, f1.into_iter().chain(f2)),
        ..Default::default()
    })
}

/// The auxiliary-digraph rules. `generation = false` accepts arcs whose
/// tail has in-degree 0; `true` accepts every real arc of generation other
/// than 1 and checks that against the branch conditions.
fn aux_rule(
    aug: &AugmentedInstance<'_>,
    trace: &ImprovingTrace,
    p: f64,
    generation: bool,
) -> Result<RunOutcome> {
    let g = aug.ground();
    let Some(w) = aug.root() else {
        return contract("auxiliary-digraph rules need a rooted instance");
    };
    let mut aux = AuxDigraph::new(aug.vertices(), w);
    let mut picked = Vec::new();
    for r in &trace.records()[trace.first_at_or_after(p)..] {
        let Some((u, v)) = r.arc else {
            return contract(format!("improving edge {} has no orientation", r.elem));
        };
        let tail_parent = aux.parent_arc(u).copied();
        let Some(arc) = aux.insert(u, v, r.elem, r.t) else {
            continue;
        };
        let real = !g.is_dummy(r.elem);
        let accept = if !generation {
            tail_parent.is_none()
        } else {
            let by_branch = u != w
                && match tail_parent {
                    None => true,
                    Some(f) => f.tail == w || f.tail_had_parent,
                };
            if real && by_branch != (arc.generation != 1) {
                return contract(format!(
                    "branch rule and generation disagree on edge {} (generation {})",
                    r.elem, arc.generation
                ));
            }
            by_branch
        };
        if accept {
            picked.push(r.elem);
        }
    }
    Ok(RunOutcome {
        selected: real_only(&g, picked),
        aux: Some(aux),
        branch: None,
    })
}

/// Accepts improving arrivals in `[p,1]` parallel to a member of
/// `OPT(E_p)` while the selection stays a forest.
pub fn oblivious_graphic(
    aug: &AugmentedInstance<'_>,
    trace: &ImprovingTrace,
    p: f64,
) -> Result<RunOutcome> {
    let g = aug.ground();
    let pair = |e: usize| g.ends(e).map(|(u, v)| (u.min(v), u.max(v)));
    let pairs: HashSet<(usize, usize)> = trace.opt_at(p).iter().filter_map(|&e| pair(e)).collect();
    let mut b = Builder::new(g);
    let picked: Vec<usize> = trace.records()[trace.first_at_or_after(p)..]
        .iter()
        .map(|r| r.elem)
        .filter(|&e| pair(e).is_some_and(|k| pairs.contains(&k)) && b.try_insert(e))
        .collect();
    Ok(RunOutcome {
        selected: real_only(&g, picked),
        ..Default::default()
    })
}

pub fn basic_graphic(
    aug: &AugmentedInstance<'_>,
    trace: &ImprovingTrace,
    p: f64,
) -> Result<RunOutcome> {
    aux_rule(aug, trace, p, false)
}

pub fn generation_graphic(
    aug: &AugmentedInstance<'_>,
    trace: &ImprovingTrace,
    p: f64,
) -> Result<RunOutcome> {
    aux_rule(aug, trace, p, true)
}
