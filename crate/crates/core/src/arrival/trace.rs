use serde::Serialize;

use super::{ArrivalSample, AugmentedInstance};
use crate::error::{invalid, Error, Result};
use crate::matroid::{arborescence, OptTracker};

/// One improving time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub elem: usize,
    /// Element evicted from the optimum by this arrival.
    pub removed: Option<usize>,
    /// Orientation (tail, head) in the canonical arborescence after arrival.
    pub arc: Option<(usize, usize)>,
    opt: (u32, u32),
    arb: Option<u32>,
}

/// Improving times of one replay in increasing time order.
#[derive(Clone, Debug, Default)]
pub struct ImprovingTrace {
    records: Vec<TraceRecord>,
    opt_data: Vec<usize>,
    arb_data: Vec<Option<(usize, usize)>>,
    vertices: usize,
    rank: usize,
}

impl ImprovingTrace {
    /// Replays `sample` on `aug`. Graphic instances need a root (augment
    /// first) so that orientations exist.
    pub fn build(aug: &AugmentedInstance<'_>, sample: &ArrivalSample) -> Result<Self> {
        if aug.base().is_graphic() && aug.root().is_none() {
            return Err(Error::Contract(
                "graphic traces need a root; augment the instance first".into(),
            ));
        }
        Self::replay(aug, sample, true)
    }

    /// Like [`ImprovingTrace::build`] but without orientations.
    pub fn build_plain(aug: &AugmentedInstance<'_>, sample: &ArrivalSample) -> Result<Self> {
        Self::replay(aug, sample, false)
    }

    fn replay(aug: &AugmentedInstance<'_>, sample: &ArrivalSample, orient: bool) -> Result<Self> {
        let arrivals = aug.replay(sample)?;
        let g = aug.ground();
        let root = if orient && aug.base().is_graphic() {
            aug.root()
        } else {
            None
        };
        let mut tracker = OptTracker::new(g);
        let mut trace = ImprovingTrace {
            vertices: g.vertices(),
            rank: g.rank(),
            ..Default::default()
        };
        for (t, e) in arrivals {
            let Some(removed) = tracker.offer(e) else {
                continue;
            };
            let start = trace.opt_data.len() as u32;
            trace.opt_data.extend_from_slice(tracker.opt());
            let mut rec = TraceRecord {
                t,
                elem: e,
                removed,
                arc: None,
                opt: (start, trace.opt_data.len() as u32),
                arb: None,
            };
            if let Some(w) = root {
                let arb = arborescence(&g, tracker.opt(), w);
                let (u, v) = g.ends(e).expect("graphic element has ends");
                rec.arc = if arb[v] == Some((u, e)) {
                    Some((u, v))
                } else if arb[u] == Some((v, e)) {
                    Some((v, u))
                } else {
                    None
                };
                rec.arb = Some(trace.arb_data.len() as u32);
                trace.arb_data.extend_from_slice(&arb);
            }
            trace.records.push(rec);
        }
        Ok(trace)
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Rank of the replayed ground set.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `OPT(E_t^+)` after record `i`, best element first.
    pub fn opt_after(&self, i: usize) -> &[usize] {
        let (a, b) = self.records[i].opt;
        &self.opt_data[a as usize..b as usize]
    }

    /// `OPT(E_t)` just before record `i`.
    pub fn opt_before(&self, i: usize) -> &[usize] {
        if i == 0 {
            &[]
        } else {
            self.opt_after(i - 1)
        }
    }

    /// Optimum of everything that arrived before time `t`.
    pub fn opt_at(&self, t: f64) -> &[usize] {
        let k = self.records.partition_point(|r| r.t < t);
        self.opt_before(k)
    }

    /// Parent (vertex, edge) per vertex after record `i`.
    pub fn arborescence(&self, i: usize) -> Option<&[Option<(usize, usize)>]> {
        let start = self.records[i].arb? as usize;
        Some(&self.arb_data[start..start + self.vertices])
    }

    /// Index of the record of `elem`, if it was improving.
    pub fn position_of(&self, elem: usize) -> Option<usize> {
        self.records.iter().position(|r| r.elem == elem)
    }

    /// Index of the first record with time at least `t`.
    pub fn first_at_or_after(&self, t: f64) -> usize {
        self.records.partition_point(|r| r.t < t)
    }

    /// JSON lines, one object `{t, elem, opt, arc?}` per improving time.
    pub fn to_json_lines(&self) -> String {
        #[derive(Serialize)]
        struct Line {
            t: f64,
            elem: usize,
            opt: Vec<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            arc: Option<[usize; 2]>,
        }
        let mut out = String::new();
        for (i, r) in self.records.iter().enumerate() {
            let mut opt = self.opt_after(i).to_vec();
            opt.sort_unstable();
            let line = Line {
                t: r.t,
                elem: r.elem,
                opt,
                arc: r.arc.map(|(u, v)| [u, v]),
            };
            out.push_str(&serde_json::to_string(&line).expect("plain data serializes"));
            out.push('\n');
        }
        out
    }
}

/// `S(b)` and `N[a,b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImprovingStats {
    /// Last improving time in `[0,b)`; absent when there is none.
    pub last_before_b: Option<f64>,
    pub count: usize,
}

pub fn improving_stats(trace: &ImprovingTrace, a: f64, b: f64) -> Result<ImprovingStats> {
    if !(0.0 <= a && a < b && b <= 1.0) {
        return invalid(format!("need 0 <= a < b <= 1, got a = {a}, b = {b}"));
    }
    let recs = trace.records();
    let below_b = recs.partition_point(|r| r.t < b);
    let below_a = recs.partition_point(|r| r.t < a);
    Ok(ImprovingStats {
        last_before_b: below_b.checked_sub(1).map(|i| recs[i].t),
        count: below_b - below_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrival::{augment_with, AugmentMode, AugmentOptions};
    use crate::matroid::{ElementSet, MatroidInstance, MatroidKind, ValueOrder};
    use crate::rng::seeded;

    #[test]
    fn single_element_is_improving() {
        let inst = MatroidInstance::uniform(1, 1).unwrap();
        let s = ArrivalSample::from_times(vec![0.4]).unwrap();
        let tr = ImprovingTrace::build(&AugmentedInstance::plain(&inst), &s).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.opt_after(0), &[0]);
    }

    #[test]
    fn stats_count_and_sentinel() {
        let inst = MatroidInstance::uniform(2, 2).unwrap();
        let s = ArrivalSample::from_times(vec![0.2, 0.6]).unwrap();
        let tr = ImprovingTrace::build(&AugmentedInstance::plain(&inst), &s).unwrap();
        let st = improving_stats(&tr, 0.5, 1.0).unwrap();
        assert_eq!(st.count, 1);
        assert_eq!(st.last_before_b, Some(0.6));
        let empty = ImprovingTrace::default();
        let st = improving_stats(&empty, 0.1, 0.9).unwrap();
        assert_eq!((st.count, st.last_before_b), (0, None));
        assert!(improving_stats(&empty, 0.5, 0.5).is_err());
    }

    #[test]
    fn graphic_trace_needs_a_root() {
        let inst = MatroidInstance::new(
            1,
            MatroidKind::Graphic {
                vertices: 2,
                edges: vec![(0, 1)],
                root: None,
            },
            ValueOrder::identity(1),
        )
        .unwrap();
        let s = ArrivalSample::from_times(vec![0.5]).unwrap();
        let err = ImprovingTrace::build(&AugmentedInstance::plain(&inst), &s).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        assert_eq!(ImprovingTrace::build_plain(&AugmentedInstance::plain(&inst), &s).unwrap().len(), 1);
    }

    /// Four vertices a..d (0..3) and pinned root edges. Arrivals e, f, g, h, i
    /// with e ≻ g ≻ h ≻ i ≻ f: e = ab, f = cd, g = bc, h = ad, i = bd.
    fn swap_scenario() -> (MatroidInstance, ArrivalSample) {
        let edges = vec![(0, 1), (2, 3), (1, 2), (0, 3), (1, 3)];
        let order = ValueOrder::new(vec![0, 2, 3, 4, 1]).unwrap();
        let inst = MatroidInstance::new(
            5,
            MatroidKind::Graphic {
                vertices: 4,
                edges,
                root: None,
            },
            order,
        )
        .unwrap();
        let s = ArrivalSample::from_times(vec![0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        (inst, s)
    }

    #[test]
    fn swap_scenario_improving_set() {
        let (inst, s) = swap_scenario();
        let aug = augment_with(&inst, &AugmentOptions::mode(AugmentMode::Pinned, 0.5), &mut seeded(0))
            .unwrap();
        let tr = ImprovingTrace::build(&aug, &s).unwrap();
        let real: Vec<usize> = tr.records().iter().map(|r| r.elem).filter(|&e| e < 5).collect();
        assert_eq!(real, vec![0, 1, 2, 3]);
        // h (3) evicts f (1).
        let h = tr.position_of(3).unwrap();
        assert_eq!(tr.records()[h].removed, Some(1));
        // Pinned dummies all arrive first, so the optimum stays connected.
        for i in 0..tr.len() {
            let arb = tr.arborescence(i).unwrap();
            assert_eq!(arb.iter().filter(|p| p.is_some()).count(), tr.opt_after(i).len());
            assert!(arb[4].is_none());
            let (u, v) = tr.records()[i].arc.unwrap();
            assert_eq!(arb[v].unwrap().0, u);
        }
        let opt: ElementSet = tr.opt_after(tr.len() - 1).iter().copied().collect();
        assert!(aug.ground().rank() == opt.len());
    }
}
