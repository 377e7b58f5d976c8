use rayon::prelude::*;
use serde::Serialize;

use super::{improving_word, Language, SchemeKind};
use crate::algorithms::{Algorithm, RunConfig};
use crate::arrival::{augment_with, sample_arrivals, AugmentOptions, ImprovingTrace};
use crate::error::{invalid, Error, Result};
use crate::matroid::{MatroidInstance, MatroidKind};
use crate::rng::trial_rng;

/// The (algorithm, scheme, language) triples whose implication is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Greedy with `e*`-first labels on uniform matroids; an equivalence.
    Uniform,
    /// Greedy with chain labels on laminar families.
    Laminar,
    /// Basic with the head/tail labels.
    Basic,
    /// Generation with the three pinned labels, simple graphs only.
    Generation,
}

impl Pairing {
    /// Looks up the compatibility table.
    pub fn resolve(alg: Algorithm, scheme: SchemeKind, lang: Language) -> Result<Self> {
        Ok(match (alg, scheme, lang) {
            (Algorithm::Greedy, SchemeKind::Induced, Language::Uniform { .. }) => Pairing::Uniform,
            (Algorithm::Greedy, SchemeKind::Chain, Language::Laminar { .. }) => Pairing::Laminar,
            (Algorithm::Basic, SchemeKind::Lambda0, Language::Basic) => Pairing::Basic,
            (Algorithm::Generation, SchemeKind::Lambda1, Language::Generation) => {
                Pairing::Generation
            }
            _ => {
                return invalid(format!(
                    "no implication is known for ({}, {}, {})",
                    alg.id(),
                    scheme.id(),
                    lang.name()
                ))
            }
        })
    }

    pub fn algorithm(self) -> Algorithm {
        match self {
            Pairing::Uniform | Pairing::Laminar => Algorithm::Greedy,
            Pairing::Basic => Algorithm::Basic,
            Pairing::Generation => Algorithm::Generation,
        }
    }

    pub fn scheme(self) -> SchemeKind {
        match self {
            Pairing::Uniform => SchemeKind::Induced,
            Pairing::Laminar => SchemeKind::Chain,
            Pairing::Basic => SchemeKind::Lambda0,
            Pairing::Generation => SchemeKind::Lambda1,
        }
    }

    pub fn language(self, r: usize) -> Language {
        match self {
            Pairing::Uniform => Language::Uniform { r },
            Pairing::Laminar => Language::Laminar { r },
            Pairing::Basic => Language::Basic,
            Pairing::Generation => Language::Generation,
        }
    }

    fn accepts(self, inst: &MatroidInstance) -> Result<()> {
        let ok = match (self, inst.kind()) {
            (Pairing::Uniform, MatroidKind::Uniform { .. }) => true,
            (Pairing::Laminar, k) => !matches!(k, MatroidKind::Graphic { .. }),
            (Pairing::Basic, MatroidKind::Graphic { .. }) => true,
            (Pairing::Generation, MatroidKind::Graphic { .. }) => {
                if !inst.is_simple_graph() {
                    return Err(Error::Refused(
                        "the generation implication is only claimed for simple graphs".into(),
                    ));
                }
                true
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!(
                "{self:?} pairing does not apply to {} instances",
                inst.kind().name()
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub trials: u64,
    pub p: f64,
    pub seed: u64,
    pub augment: AugmentOptions,
}

impl VerifyConfig {
    pub fn new(trials: u64, p: f64, seed: u64) -> Self {
        VerifyConfig {
            trials,
            p,
            seed,
            augment: AugmentOptions::auto(p),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub trials: u64,
    /// Word in the language but `e*` not selected.
    pub violations: u64,
    /// `e*` selected with the word outside the language (uniform only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converse_violations: Option<u64>,
    /// The word has a 1 exactly when `t*` lies in `[p,1]`, and the first 1
    /// is the label of `e*`; counts trials where that fails.
    pub label_violations: u64,
    pub word_in_lang: u64,
    pub selected: u64,
}

impl VerifyReport {
    fn merge(mut self, o: VerifyReport) -> Self {
        self.trials += o.trials;
        self.violations += o.violations;
        self.converse_violations = match (self.converse_violations, o.converse_violations) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0) + b.unwrap_or(0)),
        };
        self.label_violations += o.label_violations;
        self.word_in_lang += o.word_in_lang;
        self.selected += o.selected;
        self
    }
}

/// Paired trials: one augmentation and arrival sample feed both the rule
/// and the word extraction.
pub fn verify_implication(
    inst: &MatroidInstance,
    pairing: Pairing,
    star: usize,
    cfg: &VerifyConfig,
) -> Result<VerifyReport> {
    pairing.accepts(inst)?;
    let run_cfg = RunConfig::new(cfg.p);
    run_cfg.check()?;
    let scheme = pairing.scheme().scheme(star);
    let alg = pairing.algorithm();
    let lang = pairing.language(inst.rank());
    let one = |trial: u64| -> Result<VerifyReport> {
        let mut rng = trial_rng(cfg.seed, trial);
        let aug = augment_with(inst, &cfg.augment, &mut rng)?;
        let sample = sample_arrivals(inst, &mut rng);
        let trace = if inst.is_graphic() {
            ImprovingTrace::build(&aug, &sample)?
        } else {
            ImprovingTrace::build_plain(&aug, &sample)?
        };
        let out = alg.run_on_trace(&aug, &trace, &run_cfg)?;
        let word = improving_word(&aug, &trace, &scheme, cfg.p, 1.0)?;
        let in_lang = word.contains(lang)?;
        let selected = out.selected.contains(star);
        let t_star = sample.time(star);
        let lo = trace.first_at_or_after(cfg.p);
        let star_pos = trace
            .position_of(star)
            .filter(|&i| i >= lo)
            .map(|i| trace.records()[lo..].len() - 1 - (i - lo));
        let first_one = word.symbols.iter().position(|&s| s == 1);
        let label_ok = (t_star >= cfg.p) == first_one.is_some() && first_one == star_pos;
        Ok(VerifyReport {
            trials: 1,
            violations: u64::from(in_lang && !selected),
            converse_violations: (pairing == Pairing::Uniform)
                .then_some(u64::from(selected && !in_lang)),
            label_violations: u64::from(!label_ok),
            word_in_lang: u64::from(in_lang),
            selected: u64::from(selected),
        })
    };
    (0..cfg.trials)
        .into_par_iter()
        .map(one)
        .try_reduce(VerifyReport::default, |a, b| Ok(a.merge(b)))
}
