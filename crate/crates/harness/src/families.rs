//! Exhaustive instance families swept by the acceptance criteria. All
//! weights come from caller-supplied grids; dyadic grids keep every gain
//! sum exact in f64 so the two optimum routes can be compared with plain
//! equality.

use whacamole_core::model::{Flavor, Instance, InstanceBuilder};

/// Every dynamic-set instance with n <= max_items, s <= max_steps, where
/// each item independently gets a weight from the grid, an arrival step,
/// and a deletion step (or none).
pub fn dynamic_set_instances(
    max_items: usize,
    max_steps: usize,
    weights: Vec<f64>,
) -> impl Iterator<Item = Instance> {
    (1..=max_items).flat_map(move |n| {
        let weights = weights.clone();
        (1..=max_steps).flat_map(move |s| {
            // Per-item configurations: (weight, arrival, deletion).
            let mut configs: Vec<(f64, usize, Option<usize>)> = Vec::new();
            for &w in &weights {
                for ins in 0..s {
                    configs.push((w, ins, None));
                    for del in ins + 1..s {
                        configs.push((w, ins, Some(del)));
                    }
                }
            }
            let total = (configs.len() as u64).pow(n as u32);
            (0..total).map(move |mut idx| {
                let mut items = Vec::with_capacity(n);
                for _ in 0..n {
                    items.push(configs[(idx % configs.len() as u64) as usize]);
                    idx /= configs.len() as u64;
                }
                let mut b = InstanceBuilder::new(Flavor::DynamicSet);
                for t in 0..s {
                    b.step();
                    for (i, &(w, ins, _)) in items.iter().enumerate() {
                        if ins == t {
                            b.insert(&format!("i{i}"), w, None);
                        }
                    }
                    for (i, &(_, _, del)) in items.iter().enumerate() {
                        if del == Some(t) {
                            b.delete(&format!("i{i}"));
                        }
                    }
                }
                b.build().expect("family instances are well-formed")
            })
        })
    })
}

/// Nondecreasing cutoff sequences of the given length, bounded by n.
fn cutoff_sequences(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
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

pub fn decremental_queue_from_parts(weights: &[f64], cutoffs: &[usize]) -> Instance {
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
    b.build().expect("family instances are well-formed")
}

/// Every decremental queue with n <= max_items, s <= max_steps: each queue
/// position takes any grid weight; prefix deletions follow every
/// nondecreasing cutoff sequence.
pub fn decremental_queue_instances(
    max_items: usize,
    max_steps: usize,
    weights: Vec<f64>,
) -> impl Iterator<Item = Instance> {
    (1..=max_items).flat_map(move |n| {
        let weights = weights.clone();
        (1..=max_steps).flat_map(move |s| {
            let cutoffs = cutoff_sequences(n, s - 1);
            let weights = weights.clone();
            let total = (weights.len() as u64).pow(n as u32);
            (0..total).flat_map(move |mut idx| {
                let mut ws = Vec::with_capacity(n);
                for _ in 0..n {
                    ws.push(weights[(idx % weights.len() as u64) as usize]);
                    idx /= weights.len() as u64;
                }
                cutoffs
                    .clone()
                    .into_iter()
                    .map(move |cut| decremental_queue_from_parts(&ws, &cut))
            })
        })
    })
}

/// Event skeleton for a FIFO instance: per step, how many items arrive at
/// the tail and how large a prefix then expires.
fn fifo_structures(n: usize, steps: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut cur: Vec<(usize, usize)> = Vec::new();
    fn rec(
        t: usize,
        steps: usize,
        remaining: usize,
        len: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if t == steps {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for ins in 0..=remaining {
            // Deleting on the final step is pointless; skip it to keep the
            // family lean.
            let max_del = if t + 1 == steps { 0 } else { len + ins };
            for del in 0..=max_del {
                cur.push((ins, del));
                rec(t + 1, steps, remaining - ins, len + ins - del, cur, out);
                cur.pop();
            }
        }
    }
    rec(0, steps, n, 0, &mut cur, &mut out);
    out
}

/// Every FIFO queue with exactly max_items items and s <= max_steps,
/// over all tail-arrival/prefix-expiry skeletons and grid weightings.
pub fn fifo_queue_instances(
    max_items: usize,
    max_steps: usize,
    weights: Vec<f64>,
) -> impl Iterator<Item = Instance> {
    (1..=max_items).flat_map(move |n| {
        let weights = weights.clone();
        (1..=max_steps).flat_map(move |s| {
            let structures = fifo_structures(n, s);
            let weights = weights.clone();
            let total = (weights.len() as u64).pow(n as u32);
            structures.into_iter().flat_map(move |st| {
                let weights = weights.clone();
                (0..total).map(move |mut idx| {
                    let mut ws = Vec::with_capacity(n);
                    for _ in 0..n {
                        ws.push(weights[(idx % weights.len() as u64) as usize]);
                        idx /= weights.len() as u64;
                    }
                    let mut b = InstanceBuilder::new(Flavor::FifoQueue);
                    let mut arrived = 0usize;
                    let mut queue: Vec<String> = Vec::new();
                    for &(ins, del) in &st {
                        b.step();
                        for _ in 0..ins {
                            let label = format!("q{arrived}");
                            b.insert(&label, ws[arrived], queue.last().map(|s| s.as_str()));
                            queue.push(label);
                            arrived += 1;
                        }
                        for label in queue.drain(..del) {
                            b.delete(&label);
                        }
                    }
                    b.build().expect("family instances are well-formed")
                })
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use whacamole_core::model::validate_instance;

    #[test]
    fn family_sizes_are_as_expected() {
        let sets = dynamic_set_instances(2, 2, vec![1.0, 2.0]).count();
        // s=1: 2 configs/item -> n=1: 2, n=2: 4; s=2: 6 configs -> 6, 36.
        assert_eq!(sets, 2 + 4 + 6 + 36);
        let queues = decremental_queue_instances(2, 2, vec![1.0, 2.0]).count();
        // (n=1,s=1):2, (n=1,s=2):2*2, (n=2,s=1):4, (n=2,s=2):4*3.
        assert_eq!(queues, 2 + 4 + 4 + 12);
    }

    #[test]
    fn all_families_validate() {
        for inst in dynamic_set_instances(3, 3, vec![1.0, 2.0]) {
            validate_instance(&inst).unwrap();
        }
        for inst in decremental_queue_instances(3, 3, vec![0.5, 1.0]) {
            let r = validate_instance(&inst).unwrap();
            assert!(r.is_decremental && r.prefix_deletes_only);
        }
        for inst in fifo_queue_instances(3, 3, vec![0.5, 1.0]) {
            let r = validate_instance(&inst).unwrap();
            assert!(r.fifo_insertions);
        }
    }

    #[test]
    fn fifo_structures_cover_the_tight_shape() {
        // Four tail arrivals at step 1, prefix expiries of 1 after steps 1
        // and 2: the shape of the first tight instance.
        let st = fifo_structures(4, 4);
        assert!(st.contains(&vec![(4, 0), (0, 1), (0, 1), (0, 0)]));
    }
}
