//! Continuous arrival times, augmentation with dummy elements, and the
//! improving trace of a replay.

mod trace;

pub use trace::{improving_stats, ImprovingStats, ImprovingTrace, TraceRecord};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matroid::{Dummy, DummyStyle, Ground, MatroidInstance, MatroidKind};

/// Per-target cap on generated copies.
pub const MAX_COPIES: usize = 10_000;

/// Arrival times of the real elements, indexed by id, all in (0,1) and
/// pairwise distinct.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrivalSample {
    times: Vec<f64>,
}

impl ArrivalSample {
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if let Some(t) = times.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return invalid(format!("arrival time {t} outside (0,1)"));
        }
        let mut sorted = times.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid("arrival times must be distinct");
        }
        Ok(ArrivalSample { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, e: usize) -> f64 {
        self.times[e]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Uniform draw from the open interval (0,1).
pub(crate) fn open_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let t: f64 = rng.random();
        if t > 0.0 {
            return t;
        }
    }
}

/// I.i.d. uniform arrival times; exact collisions are re-drawn.
pub fn sample_arrivals(inst: &MatroidInstance, rng: &mut impl Rng) -> ArrivalSample {
    let mut times: Vec<f64> = (0..inst.n()).map(|_| open_unit(rng)).collect();
    loop {
        let mut idx: Vec<usize> = (0..times.len()).collect();
        idx.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let clash: Vec<usize> = idx
            .windows(2)
            .filter(|w| times[w[0]] == times[w[1]])
            .map(|w| w[1])
            .collect();
        if clash.is_empty() {
            return ArrivalSample { times };
        }
        for e in clash {
            times[e] = open_unit(rng);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentMode {
    /// No dummies.
    Off,
    /// Random truncated copies, exact on `[trunc, 1]`.
    Auto,
    /// One dummy per target, arriving at time 0.
    Pinned,
}

impl std::str::FromStr for AugmentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(AugmentMode::Off),
            "auto" => Ok(AugmentMode::Auto),
            "pinned" => Ok(AugmentMode::Pinned),
            _ => invalid(format!("unknown augmentation mode \"{s}\"")),
        }
    }
}

impl std::fmt::Display for AugmentMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AugmentMode::Off => "off",
            AugmentMode::Auto => "auto",
            AugmentMode::Pinned => "pinned",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugmentOptions {
    pub mode: AugmentMode,
    /// Copies stop once one lands in `[0, trunc)`.
    pub trunc: f64,
    /// Lower bound on copies per target (oversampling).
    pub min_copies: usize,
}

impl AugmentOptions {
    pub fn auto(trunc: f64) -> Self {
        AugmentOptions {
            mode: AugmentMode::Auto,
            trunc,
            min_copies: 0,
        }
    }

    pub fn mode(mode: AugmentMode, trunc: f64) -> Self {
        AugmentOptions {
            mode,
            trunc,
            min_copies: 0,
        }
    }
}

/// An instance together with its dummy elements.
#[derive(Clone, Debug)]
pub struct AugmentedInstance<'a> {
    base: &'a MatroidInstance,
    mode: AugmentMode,
    style: Option<DummyStyle>,
    dummies: Vec<Dummy>,
    root: Option<usize>,
    vertices: usize,
}

impl<'a> AugmentedInstance<'a> {
    /// The instance as given, without dummies.
    pub fn plain(base: &'a MatroidInstance) -> Self {
        let (root, vertices) = match base.kind() {
            MatroidKind::Graphic { vertices, root, .. } => (*root, *vertices),
            _ => (None, 0),
        };
        AugmentedInstance {
            base,
            mode: AugmentMode::Off,
            style: None,
            dummies: Vec::new(),
            root,
            vertices,
        }
    }

    pub fn base(&self) -> &'a MatroidInstance {
        self.base
    }

    pub fn mode(&self) -> AugmentMode {
        self.mode
    }

    pub fn style(&self) -> Option<DummyStyle> {
        self.style
    }

    pub fn dummies(&self) -> &[Dummy] {
        &self.dummies
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    /// Vertex count including the root (graphic only).
    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.base.n() + self.dummies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ground(&self) -> Ground<'_> {
        match self.style {
            None => Ground::plain(self.base),
            Some(style) => {
                Ground::augmented(self.base, &self.dummies, style, self.root, self.vertices)
            }
        }
    }

    pub fn is_dummy(&self, e: usize) -> bool {
        self.ground().is_dummy(e)
    }

    /// Real and dummy arrivals in time order (ties broken by id).
    pub fn replay(&self, sample: &ArrivalSample) -> Result<Vec<(f64, usize)>> {
        if sample.len() != self.base.n() {
            return invalid(format!(
                "sample has {} times for {} elements",
                sample.len(),
                self.base.n()
            ));
        }
        let n = self.base.n();
        let mut out: Vec<(f64, usize)> = sample.times().iter().copied().zip(0..).collect();
        out.extend(self.dummies.iter().enumerate().map(|(i, d)| (d.time, n + i)));
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(out)
    }
}

/// Truncated augmentation at `p` (mode auto).
pub fn augment<'a>(
    inst: &'a MatroidInstance,
    p: f64,
    rng: &mut impl Rng,
) -> Result<AugmentedInstance<'a>> {
    augment_with(inst, &AugmentOptions::auto(p), rng)
}

pub fn augment_with<'a>(
    inst: &'a MatroidInstance,
    opts: &AugmentOptions,
    rng: &mut impl Rng,
) -> Result<AugmentedInstance<'a>> {
    let mut aug = AugmentedInstance::plain(inst);
    if opts.mode == AugmentMode::Off {
        return Ok(aug);
    }
    if opts.mode == AugmentMode::Auto && !(opts.trunc > 0.0 && opts.trunc < 1.0) {
        return invalid(format!("truncation point {} outside (0,1)", opts.trunc));
    }
    aug.mode = opts.mode;
    let pinned = opts.mode == AugmentMode::Pinned;
    let mut copies_of = |target: usize, dummies: &mut Vec<Dummy>| -> Result<()> {
        if pinned {
            dummies.push(Dummy {
                target,
                copy: 0,
                time: 0.0,
            });
            return Ok(());
        }
        let mut landed = false;
        let mut copy = 0;
        while !landed || copy < opts.min_copies {
            if copy >= MAX_COPIES.max(opts.min_copies) {
                return Err(Error::Generation(format!(
                    "no copy of target {target} landed in [0, {}) after {copy} draws",
                    opts.trunc
                )));
            }
            let time = open_unit(rng);
            landed |= time < opts.trunc;
            dummies.push(Dummy { target, copy, time });
            copy += 1;
        }
        Ok(())
    };
    let mut dummies = Vec::new();
    match inst.kind() {
        MatroidKind::Uniform { rank } => {
            aug.style = Some(DummyStyle::Extension);
            if pinned {
                for c in 0..*rank {
                    dummies.push(Dummy {
                        target: 0,
                        copy: c,
                        time: 0.0,
                    });
                }
            } else {
                // Fresh elements until `rank` of them arrive before `trunc`.
                let mut landed = 0;
                let want = opts.min_copies * rank;
                while landed < *rank || dummies.len() < want {
                    if dummies.len() >= MAX_COPIES.max(want) * rank.max(&1) {
                        return Err(Error::Generation("extension dummies never landed".into()));
                    }
                    let time = open_unit(rng);
                    if time < opts.trunc {
                        landed += 1;
                    }
                    dummies.push(Dummy {
                        target: 0,
                        copy: dummies.len(),
                        time,
                    });
                }
            }
        }
        MatroidKind::Laminar { .. } | MatroidKind::Rank2 { .. } => {
            aug.style = Some(DummyStyle::Parallel);
            let mut basis: Vec<usize> = inst.opt().iter().collect();
            basis.sort_by_key(|&e| inst.order().position(e));
            for b in basis {
                copies_of(b, &mut dummies)?;
            }
        }
        MatroidKind::Graphic { vertices, root, .. } => {
            aug.style = Some(DummyStyle::Root);
            let (w, nv) = match root {
                Some(w) => (*w, *vertices),
                None => (*vertices, vertices + 1),
            };
            aug.root = Some(w);
            aug.vertices = nv;
            for v in (0..nv).filter(|&v| v != w) {
                copies_of(v, &mut dummies)?;
            }
        }
    }
    aug.dummies = dummies;
    Ok(aug)
}
