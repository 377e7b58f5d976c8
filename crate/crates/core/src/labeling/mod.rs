//! Post-hoc labels on improving traces, improving words, and the fixed
//! languages they are tested against.

mod language;
mod verify;

pub use language::{in_language, well_indexed_suffix, Language};
pub use verify::{verify_implication, Pairing, VerifyConfig, VerifyReport};

use serde::{Deserialize, Serialize};

use crate::arrival::{AugmentedInstance, ImprovingTrace};
use crate::error::{contract, invalid, Error, Result};
use crate::matroid::{Ground, MatroidInstance, MatroidKind, ValueOrder};

#[derive(Clone, Debug, PartialEq)]
pub enum LabelScheme {
    /// Relative rank under a total order of the real elements; dummies
    /// follow in id order.
    Induced(ValueOrder),
    /// `e*` first, then the value order.
    StarFirst(usize),
    /// Induced by the chain order of `e*`.
    Chain(usize),
    /// Head and tail of `e*` pinned to labels 1 and 2 before `t*`.
    Lambda0(usize),
    /// As `Lambda0`, plus label 3 for the edge into `w*_s`.
    Lambda1(usize),
}

/// Scheme families addressable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Induced,
    Chain,
    Lambda0,
    Lambda1,
}

impl SchemeKind {
    pub fn scheme(self, star: usize) -> LabelScheme {
        match self {
            SchemeKind::Induced => LabelScheme::StarFirst(star),
            SchemeKind::Chain => LabelScheme::Chain(star),
            SchemeKind::Lambda0 => LabelScheme::Lambda0(star),
            SchemeKind::Lambda1 => LabelScheme::Lambda1(star),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            SchemeKind::Induced => "induced",
            SchemeKind::Chain => "chain",
            SchemeKind::Lambda0 => "lambda0",
            SchemeKind::Lambda1 => "lambda1",
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SchemeKind::Induced,
            SchemeKind::Chain,
            SchemeKind::Lambda0,
            SchemeKind::Lambda1,
        ]
        .into_iter()
        .find(|k| k.id() == s)
        .map_or_else(|| invalid(format!("unknown labeling scheme \"{s}\"")), Ok)
    }
}

/// Order of the labels that no scheme pins down.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Tiebreak {
    #[default]
    Ascending,
    Descending,
}

/// Labels of the improving times in `[a,b]`, latest first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImprovingWord {
    pub symbols: Vec<u32>,
    pub r: usize,
    pub a: f64,
    pub b: f64,
}

impl ImprovingWord {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, lang: Language) -> Result<bool> {
        in_language(&self.symbols, lang)
    }
}

impl std::fmt::Display for ImprovingWord {
    /// Digits run together for `r <= 9`, comma separated otherwise.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sep = if self.r > 9 { "," } else { "" };
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// The laminar sets containing `e`, smallest first. Uniform and rank-2
/// instances are read as the laminar families they are.
fn chain_sets(inst: &MatroidInstance, e: usize) -> Result<Vec<Vec<usize>>> {
    let all: Vec<usize> = (0..inst.n()).collect();
    let mut chain = match inst.kind() {
        MatroidKind::Uniform { .. } => vec![all],
        MatroidKind::Rank2 { classes } => {
            let c = classes.iter().find(|c| c.contains(&e)).cloned().unwrap_or_default();
            vec![c, all]
        }
        MatroidKind::Laminar { sets } => sets
            .iter()
            .filter(|s| s.members.contains(&e))
            .map(|s| s.members.clone())
            .collect(),
        MatroidKind::Graphic { .. } => {
            return invalid("chain orders are defined for laminar families only")
        }
    };
    chain.sort_by_key(Vec::len);
    Ok(chain)
}

/// Index of the smallest chain set holding each real element; elements
/// outside every chain set get `chain.len()`.
fn chain_levels(inst: &MatroidInstance, chain: &[Vec<usize>]) -> Vec<usize> {
    let mut level = vec![chain.len(); inst.n()];
    for (i, s) in chain.iter().enumerate().rev() {
        for &x in s {
            level[x] = i;
        }
    }
    level
}

fn check_star(inst: &MatroidInstance, star: usize) -> Result<()> {
    if star >= inst.n() {
        return invalid(format!("element {star} out of range (n = {})", inst.n()));
    }
    if !inst.opt().contains(star) {
        return contract(format!("element {star} is not in OPT(E)"));
    }
    Ok(())
}

/// `e*` first, then the members of `C_1`, then `C_2 \ C_1`, and so on; ties
/// by id.
pub fn chain_order(inst: &MatroidInstance, star: usize) -> Result<Vec<usize>> {
    check_star(inst, star)?;
    let level = chain_levels(inst, &chain_sets(inst, star)?);
    let mut rest: Vec<usize> = (0..inst.n()).filter(|&x| x != star).collect();
    rest.sort_by_key(|&x| (level[x], x));
    rest.insert(0, star);
    Ok(rest)
}

/// Checks that `order` starts with `e*` and that every chain set's members
/// come before everything outside it.
pub fn is_chain_order(inst: &MatroidInstance, star: usize, order: &[usize]) -> Result<bool> {
    let chain = chain_sets(inst, star)?;
    if order.first() != Some(&star) {
        return Ok(false);
    }
    Ok(chain.iter().all(|c| {
        let first_out = order.iter().position(|x| !c.contains(x)).unwrap_or(order.len());
        order[first_out..].iter().all(|x| !c.contains(x))
    }))
}

enum Keyed {
    Induced(ValueOrder),
    StarFirst(usize),
    Chain { star: usize, level: Vec<usize> },
}

impl Keyed {
    fn key(&self, g: &Ground<'_>, x: usize) -> (usize, usize) {
        let n = g.n_real();
        match self {
            Keyed::Induced(pi) => {
                if x < n && !g.is_dummy(x) {
                    (0, pi.position(x))
                } else {
                    (1, x)
                }
            }
            Keyed::StarFirst(s) => {
                if x == *s {
                    (0, 0)
                } else {
                    (1, g.key(x))
                }
            }
            Keyed::Chain { star, level } => {
                let rep = g.rep(x);
                if x == *star {
                    (0, 0)
                } else if rep == *star {
                    (1, x)
                } else {
                    (2 + level.get(rep).copied().unwrap_or(level.len()), x)
                }
            }
        }
    }

    fn label(&self, g: &Ground<'_>, opt: &[usize], e: usize) -> u32 {
        let k = self.key(g, e);
        1 + opt.iter().filter(|&&x| self.key(g, x) < k).count() as u32
    }
}

pub fn improving_word(
    aug: &AugmentedInstance<'_>,
    trace: &ImprovingTrace,
    scheme: &LabelScheme,
    a: f64,
    b: f64,
) -> Result<ImprovingWord> {
    improving_word_with(aug, trace, scheme, a, b, Tiebreak::Ascending)
}

/// Like [`improving_word`] with an explicit order for the free labels of
/// `Lambda0` and `Lambda1`.
pub fn improving_word_with(
    aug: &AugmentedInstance<'_>,
    trace: &ImprovingTrace,
    scheme: &LabelScheme,
    a: f64,
    b: f64,
    tiebreak: Tiebreak,
) -> Result<ImprovingWord> {
    if !(0.0 < a && a < b && b <= 1.0) {
        return invalid(format!("need 0 < a < b <= 1, got a = {a}, b = {b}"));
    }
    let inst = aug.base();
    let g = aug.ground();
    let lo = trace.first_at_or_after(a);
    let hi = trace.records().partition_point(|r| r.t <= b);
    let mut word = ImprovingWord {
        symbols: Vec::with_capacity(hi.saturating_sub(lo)),
        r: trace.rank(),
        a,
        b,
    };
    let keyed = match scheme {
        LabelScheme::Induced(pi) => {
            if pi.len() != inst.n() {
                return invalid("induced order must rank every real element");
            }
            Keyed::Induced(pi.clone())
        }
        LabelScheme::StarFirst(s) => {
            check_star(inst, *s)?;
            Keyed::StarFirst(*s)
        }
        LabelScheme::Chain(s) => {
            check_star(inst, *s)?;
            let level = chain_levels(inst, &chain_sets(inst, *s)?);
            Keyed::Chain { star: *s, level }
        }
        LabelScheme::Lambda0(s) | LabelScheme::Lambda1(s) => {
            check_star(inst, *s)?;
            let lambda1 = matches!(scheme, LabelScheme::Lambda1(_));
            let labels = lambda_labels(aug, trace, *s, lambda1, tiebreak, lo..hi)?;
            word.symbols = labels.into_iter().rev().collect();
            return Ok(word);
        }
    };
    for i in (lo..hi).rev() {
        let r = &trace.records()[i];
        word.symbols.push(keyed.label(&g, trace.opt_after(i), r.elem));
    }
    Ok(word)
}

/// Labels for records in `range`, in trace order.
fn lambda_labels(
    aug: &AugmentedInstance<'_>,
    trace: &ImprovingTrace,
    star: usize,
    lambda1: bool,
    tiebreak: Tiebreak,
    range: std::ops::Range<usize>,
) -> Result<Vec<u32>> {
    let g = aug.ground();
    let Some(w) = aug.root() else {
        return contract("dynamic labels need a rooted graphic instance");
    };
    if !trace.is_empty() && trace.arborescence(0).is_none() {
        return contract("dynamic labels need a trace with orientations");
    }
    let Some(star_idx) = trace.position_of(star) else {
        return contract(format!("optimal element {star} never became improving"));
    };
    let after = Keyed::StarFirst(star);
    let recs = trace.records();
    if range.start >= star_idx {
        return Ok(range.map(|i| after.label(&g, trace.opt_after(i), recs[i].elem)).collect());
    }
    let Some((u_star, v_star)) = recs[star_idx].arc else {
        return contract(format!("element {star} has no orientation"));
    };
    let fallback = if lambda1 {
        let w0 = (0..aug.vertices()).find(|&v| v != w && v != u_star && v != v_star);
        match w0 {
            Some(v) => Some(v),
            None => return invalid("the third pinned label needs at least three vertices"),
        }
    } else {
        None
    };
    // Earliest later record whose arc points into u*.
    let mut next_into_u = vec![None; recs.len()];
    let mut seen = None;
    for i in (0..recs.len()).rev() {
        next_into_u[i] = seen;
        if recs[i].arc.is_some_and(|(_, h)| h == u_star) {
            seen = Some(i);
        }
    }
    let mut out = Vec::with_capacity(range.len());
    for i in range {
        let e = recs[i].elem;
        let opt = trace.opt_after(i);
        if i >= star_idx {
            out.push(after.label(&g, opt, e));
            continue;
        }
        let arb = trace.arborescence(i).expect("checked above");
        let mut heads = vec![v_star, u_star];
        if let Some(w0) = fallback {
            let w_s = next_into_u[i]
                .and_then(|j| recs[j].arc)
                .map(|(t, _)| t)
                .filter(|&t| t != w && t != v_star)
                .unwrap_or(w0);
            heads.push(w_s);
        }
        let pinned: Vec<Option<usize>> = heads.iter().map(|&h| arb[h].map(|(_, f)| f)).collect();
        if let Some(k) = pinned.iter().position(|&f| f == Some(e)) {
            out.push(k as u32 + 1);
            continue;
        }
        let below = opt
            .iter()
            .filter(|&&x| !pinned.contains(&Some(x)))
            .filter(|&&x| match tiebreak {
                Tiebreak::Ascending => x < e,
                Tiebreak::Descending => x > e,
            })
            .count();
        out.push((heads.len() + 1 + below) as u32);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrival::ArrivalSample;
    use crate::matroid::LaminarSet;

    fn lam(n: usize, sets: Vec<(Vec<usize>, usize)>, order: Vec<usize>) -> MatroidInstance {
        let sets = sets
            .into_iter()
            .map(|(members, cap)| LaminarSet { members, cap })
            .collect();
        MatroidInstance::new(n, MatroidKind::Laminar { sets }, ValueOrder::new(order).unwrap()).unwrap()
    }

    /// g, d, f, h = 0, 1, 2, 3 arriving in that order; `{f, h}` holds one
    /// element and h beats f, so h evicts f.
    #[test]
    fn four_arrival_word() {
        let inst = lam(4, vec![(vec![0, 1, 2, 3], 3), (vec![2, 3], 1)], vec![3, 2, 0, 1]);
        let aug = AugmentedInstance::plain(&inst);
        let s = ArrivalSample::from_times(vec![0.2, 0.4, 0.6, 0.8]).unwrap();
        let tr = ImprovingTrace::build(&aug, &s).unwrap();
        let word = |ranking: Vec<usize>| {
            let pi = LabelScheme::Induced(ValueOrder::new(ranking).unwrap());
            improving_word(&aug, &tr, &pi, 0.1, 1.0).unwrap().to_string()
        };
        // f > g > d > h
        assert_eq!(word(vec![2, 0, 1, 3]), "3121");
        // f > g > h > d
        assert_eq!(word(vec![2, 0, 3, 1]), "2121");
    }

    #[test]
    fn no_improving_times_give_empty_word() {
        let inst = MatroidInstance::uniform(2, 1).unwrap();
        let aug = AugmentedInstance::plain(&inst);
        let s = ArrivalSample::from_times(vec![0.1, 0.2]).unwrap();
        let tr = ImprovingTrace::build(&aug, &s).unwrap();
        let w = improving_word(&aug, &tr, &LabelScheme::StarFirst(0), 0.5, 1.0).unwrap();
        assert!(w.is_empty());
        assert!(improving_word(&aug, &tr, &LabelScheme::StarFirst(0), 0.0, 1.0).is_err());
        assert!(improving_word(&aug, &tr, &LabelScheme::StarFirst(1), 0.5, 1.0).is_err());
    }

    #[test]
    fn chain_order_two_levels() {
        let inst = lam(
            5,
            vec![(vec![0, 1], 1), (vec![0, 1, 2, 3], 2), (vec![0, 1, 2, 3, 4], 3)],
            vec![0, 2, 4, 1, 3],
        );
        let order = chain_order(&inst, 0).unwrap();
        assert_eq!(order, vec![0, 1, 2, 3, 4]);
        assert!(is_chain_order(&inst, 0, &order).unwrap());
        assert!(!is_chain_order(&inst, 0, &[0, 2, 1, 3, 4]).unwrap());
        let uni = MatroidInstance::uniform(3, 2).unwrap();
        assert_eq!(chain_order(&uni, 1).unwrap()[0], 1);
        assert!(matches!(chain_order(&inst, 3), Err(Error::Contract(_))));
    }

    #[test]
    fn dump_uses_commas_past_nine() {
        let mut w = ImprovingWord {
            symbols: vec![3, 1, 10],
            r: 12,
            a: 0.5,
            b: 1.0,
        };
        assert_eq!(w.to_string(), "3,1,10");
        w.r = 3;
        w.symbols = vec![3, 1, 2];
        assert_eq!(w.to_string(), "312");
    }
}
