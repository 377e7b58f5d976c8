use itertools::Itertools;
use proptest::prelude::*;

use msp_core::algorithms::{Algorithm, AuxDigraph, RunConfig};
use msp_core::analytics::{a_laminar, c_uniform, poisson_split};
use msp_core::arrival::{augment_with, sample_arrivals, AugmentMode, AugmentOptions, ImprovingTrace};
use msp_core::harness::wilson;
use msp_core::instance_gen::{random_graph, random_laminar, random_rank2, tight_laminar, uniform_instance};
use msp_core::labeling::{in_language, Language};
use msp_core::rng::seeded;
use msp_core::{ElementSet, MatroidInstance};

/// A small instance from one of the generator families.
fn instance(family: u8, size: usize, seed: u64) -> MatroidInstance {
    let mut rng = seeded(seed);
    match family % 5 {
        0 => uniform_instance(size, 1 + (seed as usize) % size).unwrap(),
        1 => random_laminar(size, 3, 2, &mut rng).unwrap(),
        2 => {
            let a = 1 + size / 3;
            random_rank2(&[a, size - a], &mut rng).unwrap()
        }
        3 => random_graph(3 + size / 3, size.max(2 + size / 3), false, 0.0, &mut rng).unwrap(),
        _ => tight_laminar(2, 1 + size / 3, &mut rng).unwrap(),
    }
}

fn arb_instance() -> impl Strategy<Value = MatroidInstance> {
    (0u8..5, 3usize..=8, any::<u64>()).prop_map(|(f, n, s)| instance(f, n, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_instances_validate(inst in arb_instance()) {
        prop_assert!(inst.validate().is_empty(), "{:?}", inst.validate());
    }

    /// OPT beats every basis position by position in the value order.
    #[test]
    fn opt_dominates_every_basis(inst in arb_instance()) {
        let opt = inst.opt();
        prop_assert_eq!(opt.len(), inst.rank());
        prop_assert!(inst.is_independent(&opt).unwrap());
        let key = |s: &[usize]| {
            let mut v: Vec<usize> = s.iter().map(|&e| inst.order().position(e)).collect();
            v.sort_unstable();
            v
        };
        let best = key(opt.as_slice());
        for basis in (0..inst.n()).combinations(inst.rank()) {
            let set = ElementSet::new(basis.iter().copied());
            if inst.is_independent(&set).unwrap() {
                let k = key(&basis);
                prop_assert!(best.iter().zip(&k).all(|(a, b)| a <= b));
            }
        }
    }

    /// The trace's running optimum matches greedy on the arrived set.
    #[test]
    fn trace_tracks_the_running_optimum(inst in arb_instance(), seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let sample = sample_arrivals(&inst, &mut rng);
        let aug = augment_with(&inst, &AugmentOptions::mode(AugmentMode::Off, 0.5), &mut rng).unwrap();
        let trace = ImprovingTrace::build_plain(&aug, &sample).unwrap();
        for (i, rec) in trace.records().iter().enumerate() {
            let arrived: ElementSet = (0..inst.n()).filter(|&e| sample.time(e) <= rec.t).collect();
            let mut want: Vec<usize> = inst.opt_greedy(&arrived).unwrap().into();
            let mut got = trace.opt_after(i).to_vec();
            want.sort_unstable();
            got.sort_unstable();
            prop_assert_eq!(got, want);
        }
    }

    /// With augmentation truncated at `p`, the optimum is a full basis from
    /// time `p` on.
    #[test]
    fn augmentation_fills_the_rank(inst in arb_instance(), seed in any::<u64>(), p in 0.1f64..0.9) {
        let mut rng = seeded(seed);
        let aug = augment_with(&inst, &AugmentOptions::auto(p), &mut rng).unwrap();
        let sample = sample_arrivals(&inst, &mut rng);
        let trace = if inst.is_graphic() {
            ImprovingTrace::build(&aug, &sample).unwrap()
        } else {
            ImprovingTrace::build_plain(&aug, &sample).unwrap()
        };
        prop_assert_eq!(trace.opt_at(p).len(), trace.rank());
    }

    /// Every rule keeps an independent set of improving elements that
    /// arrived after `p`.
    #[test]
    fn outputs_are_independent_improving_and_late(
        inst in arb_instance(),
        seed in any::<u64>(),
        p in 0.05f64..0.95,
        eps in 0.0f64..=1.0,
    ) {
        for alg in Algorithm::ALL {
            if !alg.supports(inst.kind()) {
                continue;
            }
            let mut rng = seeded(seed);
            let aug = augment_with(&inst, &AugmentOptions::auto(p), &mut rng).unwrap();
            let sample = sample_arrivals(&inst, &mut rng);
            let out = alg.run(&aug, &sample, &RunConfig::mixture(p, eps), &mut rng).unwrap();
            prop_assert!(inst.is_independent(&out.selected).unwrap(), "{alg}");
            for e in out.selected.iter() {
                let t = sample.time(e);
                prop_assert!(t >= p, "{alg} kept {e} at {t}");
                let before: ElementSet = (0..inst.n()).filter(|&f| sample.time(f) < t).collect();
                prop_assert!(inst.is_improving(&before, e).unwrap(), "{alg} kept non-improving {e}");
            }
        }
    }

    #[test]
    fn language_inclusions(word in prop::collection::vec(1u32..=4, 0..10)) {
        let r = 4;
        let lam = in_language(&word, Language::Laminar { r }).unwrap();
        let uni = in_language(&word, Language::Uniform { r }).unwrap();
        prop_assert!(!lam || uni);
        let basic = in_language(&word, Language::Basic).unwrap();
        let gen = in_language(&word, Language::Generation).unwrap();
        prop_assert!(!basic || gen);
        prop_assert_eq!(basic, in_language(&word, Language::Forbidden { q: 2 }).unwrap());
        for q in 2..=4 {
            let tight = in_language(&word, Language::Forbidden { q }).unwrap();
            let loose = in_language(&word, Language::Forbidden { q: q - 1 }).unwrap();
            prop_assert!(!tight || loose);
        }
        let ones = word.iter().filter(|&&s| s == 1).count();
        prop_assert_eq!(ones == 1, in_language(&word, Language::Forbidden { q: 1 }).unwrap());
    }

    /// Arcs whose generation is not 1 never close a cycle.
    #[test]
    fn aux_generations_stay_acyclic(arcs in prop::collection::vec((0usize..7, 1usize..7), 1..30)) {
        let mut d = AuxDigraph::new(7, 0);
        for (i, (tail, head)) in arcs.into_iter().enumerate() {
            if tail != head {
                d.insert(tail, head, i, i as f64);
            }
        }
        prop_assert!(d.gen_not_one_is_acyclic());
        prop_assert!((0..7).all(|v| d.in_degree(v) <= 1));
    }

    #[test]
    fn poisson_split_is_a_partition(rate in 0.0f64..400.0, k in 0u64..600) {
        let (lo, hi) = poisson_split(rate, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!((lo + hi - 1.0).abs() < 1e-12);
    }

    /// Uniform matroids are laminar, so the uniform guarantee dominates.
    #[test]
    fn uniform_beats_laminar(r in 1usize..40, p in 0.01f64..0.99) {
        prop_assert!(c_uniform(r, p).unwrap() >= a_laminar(r, p).unwrap() - 1e-12);
    }

    #[test]
    fn wilson_contains_the_frequency(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let hits = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson(hits, trials);
        let f = hits as f64 / trials as f64;
        prop_assert!(lo <= f + 1e-12 && f <= hi + 1e-12);
        prop_assert!(0.0 <= lo && hi <= 1.0);
    }
}
