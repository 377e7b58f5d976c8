//! Matroid representations, independence and rank oracles, the greedy
//! optimum and the improving-element test.
//!
//! Four kinds are supported. Uniform, laminar and rank-2 matroids share a
//! capacity representation internally (a laminar family of capped sets);
//! graphic matroids use endpoint pairs and union-find.

mod ground;
mod json;
mod validate;

pub use ground::{arborescence, Builder, Dummy, DummyStyle, Ground, OptTracker};
pub use validate::{check_axioms, Violation, AXIOM_CHECK_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One element of a ground set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element {
    pub id: usize,
    pub is_dummy: bool,
}

/// A set of element ids, kept sorted and free of duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct ElementSet(Vec<usize>);

impl ElementSet {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ElementSet(v)
    }

    pub fn empty() -> Self {
        ElementSet(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Returns false if `e` was already present.
    pub fn insert(&mut self, e: usize) -> bool {
        match self.0.binary_search(&e) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, e);
                true
            }
        }
    }

    pub fn remove(&mut self, e: usize) -> bool {
        match self.0.binary_search(&e) {
            Ok(i) => {
                self.0.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn with(&self, e: usize) -> Self {
        let mut s = self.clone();
        s.insert(e);
        s
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }
}

impl From<Vec<usize>> for ElementSet {
    fn from(v: Vec<usize>) -> Self {
        ElementSet::new(v)
    }
}

impl From<ElementSet> for Vec<usize> {
    fn from(s: ElementSet) -> Self {
        s.0
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ElementSet::new(iter)
    }
}

/// Strict ranking of the ground set; position 0 is the best element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueOrder {
    ranking: Vec<usize>,
    position: Vec<usize>,
}

impl ValueOrder {
    pub fn new(ranking: Vec<usize>) -> Result<Self> {
        let n = ranking.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &e) in ranking.iter().enumerate() {
            if e >= n {
                return invalid(format!("order mentions element {e} but n = {n}"));
            }
            if position[e] != usize::MAX {
                return invalid(format!("order lists element {e} twice"));
            }
            position[e] = pos;
        }
        Ok(ValueOrder { ranking, position })
    }

    pub fn identity(n: usize) -> Self {
        ValueOrder {
            ranking: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    /// Larger weight ranks higher; equal weights go to the lower id first.
    pub fn from_weights(weights: &[f64]) -> Self {
        let mut ranking: Vec<usize> = (0..weights.len()).collect();
        ranking.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        ValueOrder::new(ranking).expect("sorted ids form a permutation")
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn position(&self, e: usize) -> usize {
        self.position[e]
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    /// `a ≻ b`.
    pub fn better(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaminarSet {
    pub members: Vec<usize>,
    pub cap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatroidKind {
    Uniform {
        rank: usize,
    },
    Laminar {
        sets: Vec<LaminarSet>,
    },
    Rank2 {
        classes: Vec<Vec<usize>>,
    },
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
        /// Root vertex when the graph already carries root edges.
        root: Option<usize>,
    },
}

impl MatroidKind {
    pub fn name(&self) -> &'static str {
        match self {
            MatroidKind::Uniform { .. } => "uniform",
            MatroidKind::Laminar { .. } => "laminar",
            MatroidKind::Rank2 { .. } => "rank2",
            MatroidKind::Graphic { .. } => "graphic",
        }
    }
}

/// Derived lookup tables shared by all oracles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Structure {
    Capacity {
        member_of: Vec<Vec<u32>>,
        caps: Vec<usize>,
        /// A set containing every element, when the kind has one.
        universal: Option<usize>,
    },
    Graph {
        ends: Vec<(usize, usize)>,
        vertices: usize,
        root: Option<usize>,
    },
}

/// An immutable matroid with a value order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "json::InstanceJson", into = "json::InstanceJson")]
pub struct MatroidInstance {
    n: usize,
    kind: MatroidKind,
    order: ValueOrder,
    structure: Structure,
    rank: usize,
}

impl MatroidInstance {
    /// Checks ids and the order. Structural invariants (laminarity, caps,
    /// loops) are reported by [`MatroidInstance::validate`] instead.
    pub fn new(n: usize, kind: MatroidKind, order: ValueOrder) -> Result<Self> {
        if order.len() != n {
            return invalid(format!("order has {} entries, n = {n}", order.len()));
        }
        let structure = match &kind {
            MatroidKind::Uniform { rank } => Structure::Capacity {
                member_of: vec![vec![0]; n],
                caps: vec![*rank],
                universal: Some(0),
            },
            MatroidKind::Laminar { sets } => {
                let mut member_of = vec![Vec::new(); n];
                for (i, s) in sets.iter().enumerate() {
                    for &e in &s.members {
                        if e >= n {
                            return invalid(format!("laminar set {i} mentions element {e}"));
                        }
                        if !member_of[e].contains(&(i as u32)) {
                            member_of[e].push(i as u32);
                        }
                    }
                }
                Structure::Capacity {
                    member_of,
                    caps: sets.iter().map(|s| s.cap).collect(),
                    universal: None,
                }
            }
            MatroidKind::Rank2 { classes } => {
                let k = classes.len();
                let mut member_of = vec![Vec::new(); n];
                for (i, c) in classes.iter().enumerate() {
                    for &e in c {
                        if e >= n {
                            return invalid(format!("class {i} mentions element {e}"));
                        }
                        if !member_of[e].contains(&(i as u32)) {
                            member_of[e].push(i as u32);
                        }
                    }
                }
                for m in &mut member_of {
                    m.push(k as u32);
                }
                let mut caps = vec![1; k];
                caps.push(2);
                Structure::Capacity {
                    member_of,
                    caps,
                    universal: Some(k),
                }
            }
            MatroidKind::Graphic {
                vertices,
                edges,
                root,
            } => {
                if edges.len() != n {
                    return invalid(format!("{} edges given, n = {n}", edges.len()));
                }
                for (i, &(u, v)) in edges.iter().enumerate() {
                    if u >= *vertices || v >= *vertices {
                        return invalid(format!("edge {i} = ({u},{v}) outside {vertices} vertices"));
                    }
                }
                if let Some(w) = root {
                    if w >= vertices {
                        return invalid(format!("root {w} outside {vertices} vertices"));
                    }
                }
                Structure::Graph {
                    ends: edges.clone(),
                    vertices: *vertices,
                    root: *root,
                }
            }
        };
        let mut inst = MatroidInstance {
            n,
            kind,
            order,
            structure,
            rank: 0,
        };
        let all: Vec<usize> = (0..n).collect();
        inst.rank = inst.rank_unchecked(&all);
        Ok(inst)
    }

    pub fn uniform(n: usize, rank: usize) -> Result<Self> {
        Self::new(n, MatroidKind::Uniform { rank }, ValueOrder::identity(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    pub fn order(&self) -> &ValueOrder {
        &self.order
    }

    /// Rank of the whole ground set.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub(crate) fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn is_graphic(&self) -> bool {
        matches!(self.kind, MatroidKind::Graphic { .. })
    }

    /// Vertex count for graphic instances.
    pub fn vertices(&self) -> Option<usize> {
        match self.kind {
            MatroidKind::Graphic { vertices, .. } => Some(vertices),
            _ => None,
        }
    }

    pub fn ends(&self, e: usize) -> Option<(usize, usize)> {
        match &self.kind {
            MatroidKind::Graphic { edges, .. } => edges.get(e).copied(),
            _ => None,
        }
    }

    /// Edges incident to a declared root are dummies.
    pub fn element(&self, id: usize) -> Result<Element> {
        self.check_id(id)?;
        let is_dummy = match &self.kind {
            MatroidKind::Graphic {
                edges,
                root: Some(w),
                ..
            } => edges[id].0 == *w || edges[id].1 == *w,
            _ => false,
        };
        Ok(Element { id, is_dummy })
    }

    /// The parallel class of `e` for rank-2 instances.
    pub fn class_of(&self, e: usize) -> Option<usize> {
        match &self.kind {
            MatroidKind::Rank2 { classes } => classes.iter().position(|c| c.contains(&e)),
            _ => None,
        }
    }

    /// True when no two edges share an endpoint pair (graphic only).
    pub fn is_simple_graph(&self) -> bool {
        match &self.kind {
            MatroidKind::Graphic { edges, .. } => {
                let mut pairs: Vec<(usize, usize)> =
                    edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
                pairs.sort_unstable();
                pairs.windows(2).all(|w| w[0] != w[1])
            }
            _ => false,
        }
    }

    fn check_id(&self, e: usize) -> Result<()> {
        if e >= self.n {
            return invalid(format!("element {e} out of range (n = {})", self.n));
        }
        Ok(())
    }

    fn check_set(&self, s: &ElementSet) -> Result<()> {
        s.iter().try_for_each(|e| self.check_id(e))
    }

    pub fn ground(&self) -> Ground<'_> {
        Ground::plain(self)
    }

    fn rank_unchecked(&self, s: &[usize]) -> usize {
        let g = self.ground();
        let mut b = Builder::new(g);
        s.iter().filter(|&&e| b.try_insert(e)).count()
    }

    pub fn is_independent(&self, s: &ElementSet) -> Result<bool> {
        self.check_set(s)?;
        let mut b = Builder::new(self.ground());
        Ok(s.iter().all(|e| b.try_insert(e)))
    }

    pub fn rank_of(&self, s: &ElementSet) -> Result<usize> {
        self.check_set(s)?;
        Ok(self.rank_unchecked(s.as_slice()))
    }

    /// The lexicographically maximal independent subset of `s`.
    pub fn opt_greedy(&self, s: &ElementSet) -> Result<ElementSet> {
        self.check_set(s)?;
        let mut sorted: Vec<usize> = s.iter().collect();
        sorted.sort_unstable_by_key(|&e| self.order.position(e));
        let mut b = Builder::new(self.ground());
        Ok(sorted.into_iter().filter(|&e| b.try_insert(e)).collect())
    }

    /// `OPT(E)`.
    pub fn opt(&self) -> ElementSet {
        self.opt_greedy(&ElementSet::new(0..self.n))
            .expect("full ground set is valid")
    }

    pub fn is_improving(&self, arrived: &ElementSet, e: usize) -> Result<bool> {
        self.check_id(e)?;
        if arrived.contains(e) {
            return invalid(format!("element {e} has already arrived"));
        }
        Ok(self.opt_greedy(&arrived.with(e))?.contains(e))
    }

    pub fn are_parallel(&self, e: usize, f: usize) -> Result<bool> {
        self.check_id(e)?;
        self.check_id(f)?;
        if e == f {
            return invalid("parallelism needs two distinct elements");
        }
        Ok(match &self.kind {
            MatroidKind::Rank2 { .. } => match (self.class_of(e), self.class_of(f)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
            MatroidKind::Graphic { edges, .. } => {
                let (a, b) = (edges[e], edges[f]);
                (a.0.min(a.1), a.0.max(a.1)) == (b.0.min(b.1), b.0.max(b.1)) && a.0 != a.1
            }
            _ => {
                self.rank_unchecked(&[e]) == 1
                    && self.rank_unchecked(&[f]) == 1
                    && self.rank_unchecked(&[e, f]) == 1
            }
        })
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate::validate(self)
    }
}
