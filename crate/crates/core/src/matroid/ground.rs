//! A view of an instance plus optional dummy elements, and the incremental
//! independence machinery built on top of it.
//!
//! Real elements keep ids `0..n`; dummy `i` gets id `n + i` and ranks below
//! every real element, dummies among themselves in list order.

use serde::{Deserialize, Serialize};

use super::{MatroidInstance, Structure};

/// How dummy elements attach to the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DummyStyle {
    /// Fresh elements of a uniform matroid.
    Extension,
    /// Parallel copies of a base element (`target` is an element id).
    Parallel,
    /// Edges from the root to vertex `target`.
    Root,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dummy {
    /// Copied element (parallel style), vertex (root style), unused otherwise.
    pub target: usize,
    /// Creation index among the dummies of the same target.
    pub copy: usize,
    pub time: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct Ground<'a> {
    inst: &'a MatroidInstance,
    dummies: &'a [Dummy],
    style: Option<DummyStyle>,
    root: Option<usize>,
    vertices: usize,
    rank: usize,
}

impl<'a> Ground<'a> {
    pub fn plain(inst: &'a MatroidInstance) -> Self {
        let (root, vertices) = match inst.structure() {
            Structure::Graph { root, vertices, .. } => (*root, *vertices),
            _ => (None, 0),
        };
        Ground {
            inst,
            dummies: &[],
            style: None,
            root,
            vertices,
            rank: inst.rank(),
        }
    }

    /// `root`/`vertices` describe the augmented graph for root-style dummies.
    pub fn augmented(
        inst: &'a MatroidInstance,
        dummies: &'a [Dummy],
        style: DummyStyle,
        root: Option<usize>,
        vertices: usize,
    ) -> Self {
        let mut g = Ground {
            inst,
            dummies,
            style: Some(style),
            root,
            vertices,
            rank: 0,
        };
        let mut b = Builder::new(g);
        g.rank = (0..g.len()).filter(|&e| b.try_insert(e)).count();
        g
    }

    pub fn instance(&self) -> &'a MatroidInstance {
        self.inst
    }

    pub fn n_real(&self) -> usize {
        self.inst.n()
    }

    pub fn len(&self) -> usize {
        self.inst.n() + self.dummies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dummies(&self) -> &'a [Dummy] {
        self.dummies
    }

    pub fn style(&self) -> Option<DummyStyle> {
        self.style
    }

    /// Rank of everything in the view.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    /// Vertex count including the root.
    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn is_dummy(&self, e: usize) -> bool {
        if e >= self.inst.n() {
            return true;
        }
        match (self.root, self.inst.ends(e)) {
            (Some(w), Some((u, v))) => u == w || v == w,
            _ => false,
        }
    }

    /// Value rank: smaller is better.
    #[inline]
    pub fn key(&self, e: usize) -> usize {
        let n = self.inst.n();
        if e < n {
            self.inst.order().position(e)
        } else {
            e
        }
    }

    /// The real element whose structure `e` shares.
    pub fn rep(&self, e: usize) -> usize {
        let n = self.inst.n();
        if e >= n && self.style == Some(DummyStyle::Parallel) {
            self.dummies[e - n].target
        } else {
            e
        }
    }

    pub fn ends(&self, e: usize) -> Option<(usize, usize)> {
        let n = self.inst.n();
        if e < n {
            return self.inst.ends(e);
        }
        match self.style {
            Some(DummyStyle::Root) => Some((self.root?, self.dummies[e - n].target)),
            Some(DummyStyle::Parallel) => self.inst.ends(self.dummies[e - n].target),
            _ => None,
        }
    }

    /// Parallelism inside the view. Copies are parallel to their target.
    pub fn parallel(&self, e: usize, f: usize) -> bool {
        if e == f {
            return false;
        }
        if self.inst.is_graphic() {
            return match (self.ends(e), self.ends(f)) {
                (Some(a), Some(b)) => {
                    a.0 != a.1 && (a.0.min(a.1), a.0.max(a.1)) == (b.0.min(b.1), b.0.max(b.1))
                }
                _ => false,
            };
        }
        let mut b = Builder::new(*self);
        b.try_insert(e) && !b.try_insert(f)
    }

    fn counter_len(&self) -> usize {
        match self.inst.structure() {
            Structure::Capacity { caps, .. } => {
                caps.len()
                    + if self.style == Some(DummyStyle::Parallel) {
                        self.inst.n()
                    } else {
                        0
                    }
            }
            Structure::Graph { .. } => 0,
        }
    }

    /// Calls `f(counter, cap)` for each capped set containing `e`; stops
    /// early when `f` returns false and reports whether it ran to the end.
    #[inline]
    fn all_sets(&self, e: usize, mut f: impl FnMut(usize, usize) -> bool) -> bool {
        let Structure::Capacity {
            member_of,
            caps,
            universal,
        } = self.inst.structure()
        else {
            return true;
        };
        let n = self.inst.n();
        let base = caps.len();
        match self.style {
            Some(DummyStyle::Extension) if e >= n => {
                let u = universal.expect("extension dummies need a universal set");
                f(u, caps[u])
            }
            Some(DummyStyle::Parallel) => {
                let rep = self.rep(e);
                member_of[rep]
                    .iter()
                    .all(|&s| f(s as usize, caps[s as usize]))
                    && f(base + rep, 1)
            }
            _ => member_of[e].iter().all(|&s| f(s as usize, caps[s as usize])),
        }
    }
}

/// Incrementally grown independent set with O(touched) reset.
#[derive(Clone, Debug)]
pub struct Builder<'a> {
    g: Ground<'a>,
    counts: Vec<u32>,
    parent: Vec<u32>,
    touched: Vec<u32>,
    size: usize,
}

impl<'a> Builder<'a> {
    pub fn new(g: Ground<'a>) -> Self {
        let counts = vec![0; g.counter_len()];
        let parent = (0..g.vertices as u32).collect();
        Builder {
            g,
            counts,
            parent,
            touched: Vec::new(),
            size: 0,
        }
    }

    pub fn ground(&self) -> &Ground<'a> {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    /// Would `e` keep the set independent? Does not modify the set.
    pub fn can_insert(&mut self, e: usize) -> bool {
        if let Some((u, v)) = self.g.ends(e) {
            return u != v && self.find(u as u32) != self.find(v as u32);
        }
        let counts = &self.counts;
        self.g.all_sets(e, |s, cap| (counts[s] as usize) < cap)
    }

    /// Adds `e` if the result stays independent.
    pub fn try_insert(&mut self, e: usize) -> bool {
        if let Some((u, v)) = self.g.ends(e) {
            if u == v {
                return false;
            }
            let (ru, rv) = (self.find(u as u32), self.find(v as u32));
            if ru == rv {
                return false;
            }
            self.parent[ru as usize] = rv;
            self.touched.push(ru);
            self.size += 1;
            return true;
        }
        if !self.can_insert(e) {
            return false;
        }
        let (counts, touched) = (&mut self.counts, &mut self.touched);
        self.g.all_sets(e, |s, _| {
            counts[s] += 1;
            touched.push(s as u32);
            true
        });
        self.size += 1;
        true
    }

    pub fn clear(&mut self) {
        if self.g.inst.is_graphic() {
            // Path halving only rewires vertices that already lost root
            // status through a union, so the touched list covers them.
            for &v in &self.touched {
                self.parent[v as usize] = v;
            }
        } else {
            for &s in &self.touched {
                self.counts[s as usize] = 0;
            }
        }
        self.touched.clear();
        self.size = 0;
    }
}

/// Running optimum `OPT(E_t)` of the arrivals seen so far.
#[derive(Clone, Debug)]
pub struct OptTracker<'a> {
    builder: Builder<'a>,
    opt: Vec<usize>,
    scratch: Vec<usize>,
}

impl<'a> OptTracker<'a> {
    pub fn new(g: Ground<'a>) -> Self {
        OptTracker {
            builder: Builder::new(g),
            opt: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// Current optimum, best element first.
    pub fn opt(&self) -> &[usize] {
        &self.opt
    }

    pub fn ground(&self) -> &Ground<'a> {
        self.builder.ground()
    }

    /// Presents an arrival. Returns `None` when `e` is not improving and
    /// `Some(removed)` otherwise, where `removed` is the element it evicts.
    pub fn offer(&mut self, e: usize) -> Option<Option<usize>> {
        let g = *self.builder.ground();
        let ke = g.key(e);
        if self.opt.len() == g.rank() && self.opt.last().is_some_and(|&l| g.key(l) < ke) {
            return None;
        }
        self.builder.clear();
        self.scratch.clear();
        let mut placed = false;
        let mut removed = None;
        for i in 0..self.opt.len() {
            let x = self.opt[i];
            if !placed && ke < g.key(x) {
                if !self.builder.try_insert(e) {
                    return None;
                }
                self.scratch.push(e);
                placed = true;
            }
            if self.builder.try_insert(x) {
                self.scratch.push(x);
            } else {
                debug_assert!(removed.is_none(), "a single arrival evicts at most one element");
                removed = Some(x);
            }
        }
        if !placed {
            if !self.builder.try_insert(e) {
                return None;
            }
            self.scratch.push(e);
        }
        std::mem::swap(&mut self.opt, &mut self.scratch);
        Some(removed)
    }
}

/// Orients the forest `opt` away from `root`. Entry `v` holds the parent
/// vertex and the edge into `v`, or `None` for the root and for vertices
/// not connected to it.
pub fn arborescence(g: &Ground<'_>, opt: &[usize], root: usize) -> Vec<Option<(usize, usize)>> {
    let nv = g.vertices();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for &e in opt {
        if let Some((u, v)) = g.ends(e) {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
    }
    let mut parent = vec![None; nv];
    let mut seen = vec![false; nv];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for &(v, e) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, e));
                stack.push(v);
            }
        }
    }
    parent
}
