//! Cross-module invariants checked exhaustively on small instance
//! families: EEF canonicalization preserves gain and the collected set,
//! the matching optimum equals brute force, the optimum is monotone under
//! deletion removal, no algorithm beats the optimum, and the memoryless
//! algorithms' distributions depend only on the pending configuration.

use whacamole_core::algorithms::{
    algorithm_by_name, deterministic_battery, Greedy, OnlineAlgorithm, RMix, UniRand,
};
use whacamole_core::eef::{canonicalize_eef, check_eef};
use whacamole_core::model::{Flavor, Instance, InstanceBuilder, ItemIx, Schedule};
use whacamole_core::opt::{optimal_gain_bruteforce, optimal_gain_matching, optimal_gain_value};
use whacamole_core::sim::{gain, rng_from_seed, simulate, SeenItem, StepView};

/// Decremental queue with the given weights (queue order) and cumulative
/// deletion cutoffs per later step.
fn decremental_queue(weights: &[f64], cutoffs: &[usize]) -> Instance {
    let mut b = InstanceBuilder::new(Flavor::DecrementalQueue);
    b.step();
    let mut prev: Option<String> = None;
    for (i, &w) in weights.iter().enumerate() {
        let label = format!("q{i}");
        b.insert(&label, w, prev.as_deref());
        prev = Some(label);
    }
    let mut deleted = 0usize;
    for &c in cutoffs {
        b.step();
        while deleted < c {
            b.delete(&format!("q{deleted}"));
            deleted += 1;
        }
    }
    b.build().unwrap()
}

/// Nondecreasing cutoff sequences of length `steps` bounded by n.
fn cutoff_sequences(n: usize, steps: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..steps {
        let mut next = Vec::new();
        for seq in &out {
            let lo = seq.last().copied().unwrap_or(0);
            for c in lo..=n {
                let mut s = seq.clone();
                s.push(c);
                next.push(s);
            }
        }
        out = next;
    }
    out
}

/// All valid schedules: per step, any active not-yet-picked item or PASS.
fn all_schedules(instance: &Instance) -> Vec<Schedule> {
    let n = instance.num_items();
    let steps = instance.num_steps();
    let mut ins = vec![usize::MAX; n];
    let mut del = vec![steps; n];
    for (t, s) in instance.steps.iter().enumerate() {
        for &(ix, _) in &s.inserts {
            ins[ix.i()] = t;
        }
        for &ix in &s.deletes {
            del[ix.i()] = t;
        }
    }
    let mut out = Vec::new();
    let mut picks: Vec<Option<ItemIx>> = Vec::new();
    fn rec(
        t: usize,
        steps: usize,
        n: usize,
        ins: &[usize],
        del: &[usize],
        taken: &mut Vec<bool>,
        picks: &mut Vec<Option<ItemIx>>,
        out: &mut Vec<Schedule>,
    ) {
        if t == steps {
            out.push(Schedule {
                picks: picks.clone(),
            });
            return;
        }
        picks.push(None);
        rec(t + 1, steps, n, ins, del, taken, picks, out);
        picks.pop();
        for i in 0..n {
            if !taken[i] && ins[i] <= t && t < del[i] {
                taken[i] = true;
                picks.push(Some(ItemIx(i as u32)));
                rec(t + 1, steps, n, ins, del, taken, picks, out);
                picks.pop();
                taken[i] = false;
            }
        }
    }
    let mut taken = vec![false; n];
    rec(0, steps, n, &ins, &del, &mut taken, &mut picks, &mut out);
    out
}

fn collected_set(s: &Schedule) -> Vec<ItemIx> {
    let mut v: Vec<ItemIx> = s.picks.iter().filter_map(|p| *p).collect();
    v.sort();
    v
}

#[test]
fn eef_canonicalization_exhaustive_on_decremental_queues() {
    let weights = [0.25, 0.5, 0.625, 0.75, 1.0];
    let mut instances = 0usize;
    let mut schedules = 0usize;
    for n in 1..=5usize {
        for steps in 1..=5usize {
            for cutoffs in cutoff_sequences(n, steps - 1) {
                let instance = decremental_queue(&weights[..n], &cutoffs);
                instances += 1;
                for s in all_schedules(&instance) {
                    schedules += 1;
                    let canon = canonicalize_eef(&instance, &s).unwrap();
                    assert_eq!(
                        gain(&instance, &canon).unwrap(),
                        gain(&instance, &s).unwrap()
                    );
                    assert_eq!(collected_set(&canon), collected_set(&s));
                    assert!(check_eef(&instance, &canon).unwrap());
                    if check_eef(&instance, &s).unwrap() {
                        assert_eq!(canon, s, "EEF schedules are fixed points");
                    }
                }
            }
        }
    }
    println!("eef exhaustive: {instances} instances, {schedules} schedules");
    assert!(schedules > 50_000);
}

#[test]
fn eef_canonicalization_on_dynamic_queues_with_middle_inserts() {
    // Two initial items; a third arrives at step 2 at every legal anchor,
    // with every prefix deletion pattern in between.
    let mut cases = 0usize;
    for anchor in [None, Some("a"), Some("b")] {
        for cut1 in 0..=2usize {
            let mut b = InstanceBuilder::new(Flavor::DynamicQueue);
            b.step().insert("a", 0.5, None).insert("b", 1.0, Some("a"));
            b.step();
            for d in 0..cut1 {
                b.delete(["a", "b"][d]);
            }
            // The anchor must still be active.
            let anchor_ok = match anchor {
                None => true,
                Some("a") => cut1 == 0,
                Some("b") => cut1 <= 1,
                _ => unreachable!(),
            };
            if !anchor_ok {
                continue;
            }
            b.insert("c", 0.75, anchor);
            b.step();
            let instance = match b.build() {
                Ok(i) => i,
                Err(_) => continue,
            };
            for s in all_schedules(&instance) {
                cases += 1;
                let canon = canonicalize_eef(&instance, &s).unwrap();
                assert_eq!(
                    gain(&instance, &canon).unwrap(),
                    gain(&instance, &s).unwrap()
                );
                assert_eq!(collected_set(&canon), collected_set(&s));
                assert!(check_eef(&instance, &canon).unwrap());
            }
        }
    }
    assert!(cases > 0);
}

#[test]
fn matching_equals_bruteforce_on_queue_family() {
    let weights = [0.25, 0.5, 0.75, 1.0];
    for n in 1..=4usize {
        for steps in 1..=4usize {
            for cutoffs in cutoff_sequences(n, steps - 1) {
                let instance = decremental_queue(&weights[..n], &cutoffs);
                let (m, schedule) = optimal_gain_matching(&instance).unwrap();
                let bf = optimal_gain_bruteforce(&instance).unwrap();
                assert_eq!(m, bf, "{:?}", cutoffs);
                assert_eq!(gain(&instance, &schedule).unwrap(), m);
                assert!(check_eef(&instance, &schedule).unwrap());
            }
        }
    }
}

#[test]
fn matching_equals_bruteforce_on_random_sets() {
    use rand::Rng;
    let mut rng = rng_from_seed(42);
    for _ in 0..400 {
        let n = rng.gen_range(1..=6usize);
        let steps = rng.gen_range(1..=6usize);
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        let mut alive: Vec<(String, usize)> = Vec::new();
        for t in 0..steps {
            b.step();
            if t == 0 || rng.gen_bool(0.7) {
                let burst = rng.gen_range(if t == 0 { 1..=n } else { 0..=2 });
                for _ in 0..burst {
                    if alive.len() < n {
                        let label = format!("i{}", alive.len() + t * 10);
                        // Dyadic weights keep every sum exact in f64.
                        let w = rng.gen_range(1..=32) as f64 / 32.0;
                        b.insert(&label, w, None);
                        alive.push((label, t));
                    }
                }
            }
            if t > 0 && !alive.is_empty() && rng.gen_bool(0.4) {
                let k = rng.gen_range(0..alive.len());
                let (label, _) = alive.remove(k);
                b.delete(&label);
            }
        }
        let instance = b.build().unwrap();
        if instance.num_items() > 8 {
            continue;
        }
        let m = optimal_gain_value(&instance).unwrap();
        let bf = optimal_gain_bruteforce(&instance).unwrap();
        assert_eq!(m, bf);
    }
}

#[test]
fn optimum_is_monotone_under_deletion_removal() {
    let weights = [0.25, 0.5, 0.75, 1.0];
    for cutoffs in cutoff_sequences(4, 3) {
        let instance = decremental_queue(&weights, &cutoffs);
        let base = optimal_gain_value(&instance).unwrap();
        for t in 0..instance.num_steps() {
            if instance.steps[t].deletes.is_empty() {
                continue;
            }
            let mut relaxed = instance.clone();
            relaxed.steps[t].deletes.clear();
            for later in relaxed.steps.iter_mut().skip(t + 1) {
                later.deletes.clear();
            }
            // Dropping a deletion (and its successors, to stay decremental-
            // consistent) never decreases the optimum.
            relaxed.validate().unwrap();
            let value = optimal_gain_value(&relaxed).unwrap();
            assert!(value >= base - 1e-12, "{value} < {base}");
        }
    }
}

#[test]
fn no_algorithm_beats_the_optimum() {
    let weights = [0.25, 0.5, 0.625, 1.0];
    for cutoffs in cutoff_sequences(4, 2) {
        let instance = decremental_queue(&weights, &cutoffs);
        let opt = optimal_gain_value(&instance).unwrap();
        for name in [
            "greedy",
            "unirand",
            "decque-efh",
            "fifoque-eh",
            "mark-and-pick",
            "rmix",
            "const-first",
            "const-last",
        ] {
            let mut alg = algorithm_by_name(name).unwrap();
            for seed in 0..3 {
                let (_, g) = simulate(&instance, alg.as_mut(), seed).unwrap();
                assert!(g <= opt + 1e-12, "{name}: {g} > {opt}");
            }
        }
    }
}

#[test]
fn battery_respects_optimum_on_two_item_games() {
    for mut alg in deterministic_battery() {
        let r = whacamole_core::adversaries::lb_two_item_set_game(alg.as_mut()).unwrap();
        let t = r.transcript.unwrap();
        let opt = optimal_gain_value(&t.instance).unwrap();
        assert!(r.adv_gain <= opt + 1e-12);
        assert!(r.alg_gain <= opt + 1e-12);
    }
}

/// Builds a view over the given pending weights (queue order), surrounded
/// by junk items that are deleted or already collected.
fn view_items(pending: &[f64], junk: &[(f64, bool)]) -> (Vec<SeenItem>, Vec<u32>) {
    let mut seen = Vec::new();
    let mut queue = Vec::new();
    for &(w, active) in junk {
        seen.push(SeenItem {
            key: seen.len() as u64,
            weight: w,
            active,
            pending: false,
        });
        if active {
            queue.push((seen.len() - 1) as u32);
        }
    }
    for &w in pending {
        seen.push(SeenItem {
            key: seen.len() as u64,
            weight: w,
            active: true,
            pending: true,
        });
        queue.push((seen.len() - 1) as u32);
    }
    (seen, queue)
}

#[test]
fn memoryless_distributions_ignore_history() {
    use rand::Rng;
    let mut rng = rng_from_seed(7);
    for _ in 0..200 {
        let k = rng.gen_range(1..=6usize);
        let mut pending: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..2.0)).collect();
        pending.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let junk_count = rng.gen_range(0..4usize);
        let junk: Vec<(f64, bool)> = (0..junk_count)
            .map(|_| (rng.gen_range(0.1..3.0), rng.gen_bool(0.5)))
            .collect();
        let (seen_a, queue_a) = view_items(&pending, &[]);
        let (seen_b, queue_b) = view_items(&pending, &junk);
        let va = StepView {
            flavor: Flavor::DynamicQueue,
            step: 0,
            seen: &seen_a,
            queue: &queue_a,
        };
        let vb = StepView {
            flavor: Flavor::DynamicQueue,
            step: 9,
            seen: &seen_b,
            queue: &queue_b,
        };
        for alg in [
            Box::new(Greedy) as Box<dyn OnlineAlgorithm>,
            Box::new(UniRand),
            Box::new(RMix),
        ] {
            assert!(alg.memoryless());
            let da = dist_by_pending(&va, alg.distribution(&va).unwrap());
            let db = dist_by_pending(&vb, alg.distribution(&vb).unwrap());
            assert_eq!(da.len(), db.len(), "{}", alg.name());
            for (pa, pb) in da.iter().zip(db.iter()) {
                assert!((pa - pb).abs() < 1e-12, "{}", alg.name());
            }
        }
    }
}

/// Probability per pending position (queue order).
fn dist_by_pending(view: &StepView, dist: Vec<(usize, f64)>) -> Vec<f64> {
    let pending: Vec<usize> = view.pending().map(|(i, _)| i).collect();
    pending
        .iter()
        .map(|i| {
            dist.iter()
                .find(|(j, _)| j == i)
                .map(|(_, p)| *p)
                .unwrap_or(0.0)
        })
        .collect()
}

#[test]
fn rmix_empirical_matches_reported_distribution() {
    let pending = [0.4, 0.9, 0.7, 1.0];
    let (seen, queue) = view_items(&pending, &[]);
    let view = StepView {
        flavor: Flavor::DynamicQueue,
        step: 0,
        seen: &seen,
        queue: &queue,
    };
    let reported = dist_by_pending(&view, RMix.distribution(&view).unwrap());
    let trials = 200_000usize;
    let mut counts = vec![0usize; pending.len()];
    let mut rng = rng_from_seed(5);
    let mut alg = RMix;
    for _ in 0..trials {
        let pick = alg.pick(&view, &mut rng).unwrap().unwrap();
        counts[pick] += 1;
        // view rows are immutable here, so the pick does not consume items
    }
    for (i, &c) in counts.iter().enumerate() {
        let p = reported[i];
        let sigma = (p * (1.0 - p) / trials as f64).sqrt().max(1e-6);
        let freq = c as f64 / trials as f64;
        assert!(
            (freq - p).abs() <= 4.0 * sigma,
            "slot {i}: freq {freq} vs reported {p}"
        );
    }
}

#[test]
fn schedule_json_round_trip() {
    let instance = decremental_queue(&[0.25, 0.5, 1.0], &[1, 3]);
    let (_, schedule) = optimal_gain_matching(&instance).unwrap();
    let json = schedule.to_json(&instance);
    let back = Schedule::from_json(&json, &instance).unwrap();
    assert_eq!(schedule, back);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        /// Instances survive a JSON round trip byte-identically.
        #[test]
        fn instance_json_round_trip(
            n in 1usize..=6,
            steps in 1usize..=5,
            cuts in proptest::collection::vec(0usize..=6, 0..5),
            raw_weights in proptest::collection::vec(1u32..=32, 6),
        ) {
            let weights: Vec<f64> = raw_weights.iter().map(|&w| w as f64 / 32.0).collect();
            let mut cutoffs: Vec<usize> = cuts.iter().take(steps - 1).map(|&c| c.min(n)).collect();
            cutoffs.sort_unstable();
            let instance = decremental_queue(&weights[..n], &cutoffs);
            let json = instance.to_json();
            let back = Instance::from_json(&json).unwrap();
            prop_assert_eq!(json, back.to_json());
        }

        /// Canonicalization preserves gain on arbitrary valid schedules.
        #[test]
        fn canonicalize_preserves_gain(
            n in 1usize..=6,
            max_steps in 1usize..=5,
            cuts in proptest::collection::vec(0usize..=6, 0..5),
            raw_weights in proptest::collection::vec(1u32..=32, 6),
            choices in proptest::collection::vec(0usize..=6, 5),
        ) {
            let weights: Vec<f64> = raw_weights.iter().map(|&w| w as f64 / 32.0).collect();
            let mut cutoffs: Vec<usize> = cuts.iter().take(max_steps - 1).map(|&c| c.min(n)).collect();
            cutoffs.sort_unstable();
            let steps = cutoffs.len() + 1;
            let instance = decremental_queue(&weights[..n], &cutoffs);
            // Interpret choices as a schedule: pick the c-th available item.
            let mut taken = vec![false; n];
            let mut picks = Vec::new();
            for t in 0..steps {
                let avail: Vec<usize> = (0..n)
                    .filter(|&i| !taken[i] && t < cutoff_at(&cutoffs, i, steps))
                    .collect();
                let c = choices[t];
                if c == 0 || avail.is_empty() {
                    picks.push(None);
                } else {
                    let i = avail[(c - 1) % avail.len()];
                    taken[i] = true;
                    picks.push(Some(ItemIx(i as u32)));
                }
            }
            let schedule = Schedule { picks };
            let g = gain(&instance, &schedule).unwrap();
            let canon = canonicalize_eef(&instance, &schedule).unwrap();
            prop_assert_eq!(gain(&instance, &canon).unwrap(), g);
            prop_assert!(check_eef(&instance, &canon).unwrap());
        }
    }

    /// First step at which item i is no longer active.
    fn cutoff_at(cutoffs: &[usize], item: usize, steps: usize) -> usize {
        for (k, &c) in cutoffs.iter().enumerate() {
            if item < c {
                return k + 1;
            }
        }
        steps
    }
}
