//! Constructors for the tight laminar instance and the random families used
//! by the test suites.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matroid::{LaminarSet, MatroidInstance, MatroidKind, ValueOrder};
use crate::rng::seeded;

/// Number of extra parallel copies given to a duplicated optimal edge.
pub const PARALLEL_COPIES: usize = 3;
/// Redraws allowed before a tie in sampled weights is reported.
const MAX_REDRAWS: usize = 1000;
/// Attempts at finding a fresh endpoint pair for a simple graph.
const MAX_PAIR_ATTEMPTS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    TightLaminar {
        q: usize,
        r: usize,
    },
    Uniform {
        n: usize,
        r: usize,
    },
    RandomLaminar {
        n: usize,
        depth: usize,
        branching: usize,
    },
    Rank2 {
        class_sizes: Vec<usize>,
    },
    Graph {
        vertices: usize,
        edges: usize,
        simple: bool,
        parallel_bias: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<MatroidInstance> {
        let mut rng = seeded(self.seed);
        match &self.family {
            Family::TightLaminar { q, r } => tight_laminar(*q, *r, &mut rng),
            Family::Uniform { n, r } => uniform_instance(*n, *r),
            Family::RandomLaminar {
                n,
                depth,
                branching,
            } => random_laminar(*n, *depth, *branching, &mut rng),
            Family::Rank2 { class_sizes } => random_rank2(class_sizes, &mut rng),
            Family::Graph {
                vertices,
                edges,
                simple,
                parallel_bias,
            } => random_graph(*vertices, *edges, *simple, *parallel_bias, &mut rng),
        }
    }
}

fn random_order(n: usize, rng: &mut impl Rng) -> ValueOrder {
    let mut ranking: Vec<usize> = (0..n).collect();
    ranking.shuffle(rng);
    ValueOrder::new(ranking).expect("a shuffled range is a permutation")
}

/// Blocks `F_1..F_r` of `q` elements each; `E_i = F_1 ∪ … ∪ F_i` has cap
/// `i`, and weights of `F_i` are uniform on `[r-i, r-i+1]`.
pub fn tight_laminar(q: usize, r: usize, rng: &mut impl Rng) -> Result<MatroidInstance> {
    if q == 0 || r == 0 {
        return invalid("tight instance needs q >= 1 and r >= 1");
    }
    let n = q * r;
    let block = |e: usize| e / q;
    let mut weights = vec![0.0; n];
    let mut tries = 0;
    loop {
        for (e, w) in weights.iter_mut().enumerate() {
            let lo = (r - 1 - block(e)) as f64;
            *w = rng.random_range(lo..lo + 1.0);
        }
        let mut sorted = weights.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).all(|w| w[0] < w[1]) {
            break;
        }
        tries += 1;
        if tries == MAX_REDRAWS {
            return Err(Error::Generation("weights keep colliding".into()));
        }
    }
    let sets = (1..=r)
        .map(|i| LaminarSet {
            members: (0..i * q).collect(),
            cap: i,
        })
        .collect();
    MatroidInstance::new(n, MatroidKind::Laminar { sets }, ValueOrder::from_weights(&weights))
}

/// `U(n, r)` with the identity order.
pub fn uniform_instance(n: usize, r: usize) -> Result<MatroidInstance> {
    if n == 0 || r == 0 {
        return invalid("uniform instance needs n >= 1 and r >= 1");
    }
    MatroidInstance::uniform(n, r)
}

/// Rank-2 instance whose classes have the given sizes; ids are dealt to
/// classes at random and the value order is random.
pub fn random_rank2(class_sizes: &[usize], rng: &mut impl Rng) -> Result<MatroidInstance> {
    if class_sizes.len() < 2 || class_sizes.contains(&0) {
        return invalid("rank-2 instance needs at least two non-empty classes");
    }
    let n: usize = class_sizes.iter().sum();
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut classes = Vec::with_capacity(class_sizes.len());
    let mut rest = &ids[..];
    for &s in class_sizes {
        let (head, tail) = rest.split_at(s);
        let mut c = head.to_vec();
        c.sort_unstable();
        classes.push(c);
        rest = tail;
    }
    MatroidInstance::new(n, MatroidKind::Rank2 { classes }, random_order(n, rng))
}

/// Random laminar family of the given depth: every set splits its members
/// into up to `branching` children, leaving some elements directly in the
/// parent. Caps are at most the set size and strictly below the rank the
/// children already allow, whenever that rank exceeds 1.
pub fn random_laminar(
    n: usize,
    depth: usize,
    branching: usize,
    rng: &mut impl Rng,
) -> Result<MatroidInstance> {
    if n == 0 || depth == 0 || branching == 0 {
        return invalid("random laminar instance needs positive n, depth and branching");
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut sets = Vec::new();
    build_laminar(&ids, depth, branching, rng, &mut sets);
    MatroidInstance::new(n, MatroidKind::Laminar { sets }, random_order(n, rng))
}

/// Adds the set on `members` and its subtree; returns the set's rank.
fn build_laminar(
    members: &[usize],
    depth: usize,
    branching: usize,
    rng: &mut impl Rng,
    out: &mut Vec<LaminarSet>,
) -> usize {
    let mut free_rank = members.len();
    if depth > 1 && members.len() >= 2 {
        // Children take contiguous chunks; the last chunk stays in the parent.
        let k = branching.min(members.len() - 1);
        let mut cuts: Vec<usize> = (0..k).map(|_| rng.random_range(1..members.len())).collect();
        cuts.push(0);
        cuts.push(members.len());
        cuts.sort_unstable();
        cuts.dedup();
        free_rank = 0;
        let chunks: Vec<&[usize]> = cuts.windows(2).map(|w| &members[w[0]..w[1]]).collect();
        let (kids, spare) = chunks.split_at(chunks.len() - 1);
        for chunk in kids {
            free_rank += build_laminar(chunk, depth - 1, branching, rng, out);
        }
        free_rank += spare[0].len();
    }
    let top = free_rank.min(members.len());
    let cap = if top <= 1 { 1 } else { rng.random_range(1..top) };
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    out.push(LaminarSet {
        members: sorted,
        cap,
    });
    cap
}

/// Connected graph on `vertices` vertices with `edges` random edges (a random
/// spanning tree plus extra edges), random value order. With
/// `parallel_bias > 0` each optimal edge is, with that probability, given
/// [`PARALLEL_COPIES`] parallel copies ranked just below it.
pub fn random_graph(
    vertices: usize,
    edges: usize,
    simple: bool,
    parallel_bias: f64,
    rng: &mut impl Rng,
) -> Result<MatroidInstance> {
    if vertices < 3 {
        return invalid("random graph needs at least 3 vertices");
    }
    if edges < vertices - 1 {
        return invalid(format!(
            "{edges} edges cannot connect {vertices} vertices"
        ));
    }
    if simple && edges > vertices * (vertices - 1) / 2 {
        return invalid(format!("a simple graph on {vertices} vertices has at most {} edges", vertices * (vertices - 1) / 2));
    }
    if !(0.0..=1.0).contains(&parallel_bias) {
        return invalid(format!("parallel bias {parallel_bias} outside [0,1]"));
    }
    if simple && parallel_bias > 0.0 {
        return invalid("parallel copies are not allowed in a simple graph");
    }
    let mut perm: Vec<usize> = (0..vertices).collect();
    perm.shuffle(rng);
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    let mut seen = std::collections::HashSet::new();
    let mut list = Vec::with_capacity(edges);
    for i in 1..vertices {
        let j = rng.random_range(0..i);
        let (u, v) = (perm[i], perm[j]);
        seen.insert(key(u, v));
        list.push((u, v));
    }
    let mut attempts = 0;
    while list.len() < edges {
        let u = rng.random_range(0..vertices);
        let v = rng.random_range(0..vertices);
        if u == v || (simple && seen.contains(&key(u, v))) {
            attempts += 1;
            if attempts == MAX_PAIR_ATTEMPTS {
                return Err(Error::Generation("could not place the requested edges".into()));
            }
            continue;
        }
        seen.insert(key(u, v));
        list.push((u, v));
    }
    list.shuffle(rng);
    let order = random_order(edges, rng);
    let base = MatroidInstance::new(
        edges,
        MatroidKind::Graphic {
            vertices,
            edges: list.clone(),
            root: None,
        },
        order.clone(),
    )?;
    if parallel_bias == 0.0 {
        return Ok(base);
    }
    let opt = base.opt();
    let mut ranking = Vec::with_capacity(edges);
    for &e in order.ranking() {
        ranking.push(e);
        if opt.contains(e) && rng.random_bool(parallel_bias) {
            for _ in 0..PARALLEL_COPIES {
                ranking.push(list.len());
                list.push(list[e]);
            }
        }
    }
    let n = list.len();
    MatroidInstance::new(
        n,
        MatroidKind::Graphic {
            vertices,
            edges: list,
            root: None,
        },
        ValueOrder::new(ranking)?,
    )
}
