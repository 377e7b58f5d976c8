use serde::Serialize;

use super::{Builder, MatroidInstance, MatroidKind};

/// A broken invariant found by [`MatroidInstance::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub detail: String,
}

impl Violation {
    fn new(rule: &'static str, detail: impl Into<String>) -> Self {
        Violation {
            rule,
            detail: detail.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

/// Largest ground set for which the axioms are checked exhaustively.
pub const AXIOM_CHECK_LIMIT: usize = 10;

pub(super) fn validate(m: &MatroidInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    match m.kind() {
        MatroidKind::Uniform { rank } => {
            if *rank == 0 {
                out.push(Violation::new("loop", "rank 0 makes every element a loop"));
            }
        }
        MatroidKind::Laminar { sets } => {
            for (i, s) in sets.iter().enumerate() {
                if s.cap == 0 {
                    out.push(Violation::new("cap", format!("set {i} has cap 0")));
                }
                let mut sorted = s.members.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    out.push(Violation::new("duplicate", format!("set {i} repeats a member")));
                }
            }
            for i in 0..sets.len() {
                for j in i + 1..sets.len() {
                    let a = &sets[i].members;
                    let b = &sets[j].members;
                    let common = a.iter().filter(|e| b.contains(e)).count();
                    if common > 0 && common < a.len() && common < b.len() {
                        out.push(Violation::new(
                            "laminar",
                            format!("sets {i} and {j} cross"),
                        ));
                    }
                }
            }
        }
        MatroidKind::Rank2 { classes } => {
            let mut seen = vec![0usize; m.n()];
            for (i, c) in classes.iter().enumerate() {
                if c.is_empty() {
                    out.push(Violation::new("partition", format!("class {i} is empty")));
                }
                for &e in c {
                    seen[e] += 1;
                }
            }
            for (e, &k) in seen.iter().enumerate() {
                if k != 1 {
                    out.push(Violation::new(
                        "partition",
                        format!("element {e} lies in {k} classes"),
                    ));
                }
            }
            if classes.iter().filter(|c| !c.is_empty()).count() < 2 {
                out.push(Violation::new("rank", "a rank-2 instance needs two classes"));
            }
        }
        MatroidKind::Graphic { edges, root, .. } => {
            for (i, &(u, v)) in edges.iter().enumerate() {
                if u == v {
                    out.push(Violation::new("loop", format!("edge {i} is a self-loop")));
                }
            }
            if let Some(w) = root {
                let is_dummy = |e: usize| edges[e].0 == *w || edges[e].1 == *w;
                let ranking = m.order().ranking();
                if let Some(first) = ranking.iter().position(|&e| is_dummy(e)) {
                    if ranking[first..].iter().any(|&e| !is_dummy(e)) {
                        out.push(Violation::new(
                            "order",
                            "root edges must rank below every other edge",
                        ));
                    }
                }
            }
        }
    }
    if m.n() > 0 && m.rank() == 0 {
        out.push(Violation::new("rank", "instance rank is 0"));
    }
    if out.is_empty() && m.n() <= AXIOM_CHECK_LIMIT {
        let all: Vec<usize> = (0..m.n()).collect();
        out.extend(check_axioms(m, &all));
    }
    out
}

/// Exhaustive check of (I1)-(I3) on the restriction to `subset`
/// (at most [`AXIOM_CHECK_LIMIT`] elements).
pub fn check_axioms(m: &MatroidInstance, subset: &[usize]) -> Vec<Violation> {
    assert!(subset.len() <= AXIOM_CHECK_LIMIT, "axiom check is exponential");
    let k = subset.len();
    let mut b = Builder::new(m.ground());
    let indep: Vec<bool> = (0u32..1 << k)
        .map(|mask| {
            b.clear();
            (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .all(|i| b.try_insert(subset[i]))
        })
        .collect();
    let mut out = Vec::new();
    if !indep[0] {
        out.push(Violation::new("I1", "empty set is dependent"));
    }
    for mask in 0..indep.len() {
        if !indep[mask] {
            continue;
        }
        for i in 0..k {
            if mask >> i & 1 == 1 && !indep[mask & !(1 << i)] {
                out.push(Violation::new(
                    "I2",
                    format!("independent mask {mask:#b} has a dependent subset"),
                ));
            }
        }
    }
    for x in 0..indep.len() {
        if !indep[x] {
            continue;
        }
        for y in 0..indep.len() {
            if !indep[y] || (y as u32).count_ones() <= (x as u32).count_ones() {
                continue;
            }
            let extendable = (0..k).any(|i| y >> i & 1 == 1 && x >> i & 1 == 0 && indep[x | 1 << i]);
            if !extendable {
                out.push(Violation::new(
                    "I3",
                    format!("mask {x:#b} cannot be extended from {y:#b}"),
                ));
            }
        }
    }
    out
}
