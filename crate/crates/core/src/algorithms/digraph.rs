use serde::Serialize;

/// One arc of the auxiliary digraph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AuxArc {
    pub tail: usize,
    pub head: usize,
    pub elem: usize,
    pub time: f64,
    pub generation: u32,
    /// Whether the tail already had an incoming arc when this arc was added.
    pub tail_had_parent: bool,
}

/// Digraph on the vertices of the augmented graph with in-degree at most one.
#[derive(Clone, Debug, Default, Serialize)]
pub struct AuxDigraph {
    arcs: Vec<AuxArc>,
    #[serde(skip)]
    parent: Vec<Option<u32>>,
    #[serde(skip)]
    root: usize,
}

impl AuxDigraph {
    pub fn new(vertices: usize, root: usize) -> Self {
        AuxDigraph {
            arcs: Vec::new(),
            parent: vec![None; vertices],
            root,
        }
    }

    pub fn arcs(&self) -> &[AuxArc] {
        &self.arcs
    }

    pub fn in_degree(&self, v: usize) -> usize {
        usize::from(self.parent[v].is_some())
    }

    /// The arc pointing into `v`.
    pub fn parent_arc(&self, v: usize) -> Option<&AuxArc> {
        self.parent[v].map(|i| &self.arcs[i as usize])
    }

    /// Adds `(tail, head)` unless `head` already has an incoming arc, and
    /// returns the new arc. Arcs out of the root are dummies of generation 1.
    pub fn insert(&mut self, tail: usize, head: usize, elem: usize, time: f64) -> Option<&AuxArc> {
        if self.parent[head].is_some() {
            return None;
        }
        let generation = if tail == self.root {
            1
        } else {
            match self.parent_arc(tail) {
                None => 0,
                Some(f) => f.generation + 1,
            }
        };
        let idx = self.arcs.len();
        self.arcs.push(AuxArc {
            tail,
            head,
            elem,
            time,
            generation,
            tail_had_parent: self.parent[tail].is_some(),
        });
        self.parent[head] = Some(idx as u32);
        self.arcs.last()
    }

    /// True when the arcs of generation other than 1 contain no directed
    /// cycle. In-degree at most one means every cycle is found by walking
    /// parent arcs.
    pub fn gen_not_one_is_acyclic(&self) -> bool {
        let nv = self.parent.len();
        let keep = |v: usize| -> Option<usize> {
            let a = self.parent_arc(v)?;
            (a.generation != 1).then_some(a.tail)
        };
        // 0 = unvisited, 1 = on current walk, 2 = done
        let mut state = vec![0u8; nv];
        for start in 0..nv {
            let mut path = Vec::new();
            let mut v = start;
            loop {
                match state[v] {
                    1 => return false,
                    2 => break,
                    _ => {}
                }
                state[v] = 1;
                path.push(v);
                match keep(v) {
                    Some(u) => v = u,
                    None => break,
                }
            }
            for u in path {
                state[u] = 2;
            }
        }
        true
    }
}
