//! Instance generators: seeded random families for every flavor and the
//! named tight instances used by the upper-bound sharpness checks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use whacamole_core::algorithms::PHI;
use whacamole_core::error::{Error, Result};
use whacamole_core::model::{Flavor, Instance, InstanceBuilder};
use whacamole_core::sim::rng_from_seed;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum WeightDist {
    Uniform { lo: f64, hi: f64 },
    Grid(Vec<f64>),
    Integers { lo: u32, hi: u32 },
}

impl WeightDist {
    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            WeightDist::Uniform { lo, hi } => rng.gen_range(*lo..*hi),
            WeightDist::Grid(values) => values[rng.gen_range(0..values.len())],
            WeightDist::Integers { lo, hi } => rng.gen_range(*lo..=*hi) as f64,
        }
    }

    /// Smallest sample at least `floor`, for monotone instances.
    fn sample_at_least(&self, floor: f64, rng: &mut impl Rng) -> f64 {
        match self {
            WeightDist::Uniform { lo, hi } => {
                let lo = lo.max(floor).min(*hi);
                if lo >= *hi {
                    *hi
                } else {
                    rng.gen_range(lo..*hi)
                }
            }
            WeightDist::Grid(values) => {
                let ok: Vec<f64> = values.iter().copied().filter(|&v| v >= floor).collect();
                if ok.is_empty() {
                    *values
                        .iter()
                        .max_by(|a, b| a.partial_cmp(b).unwrap())
                        .unwrap()
                } else {
                    ok[rng.gen_range(0..ok.len())]
                }
            }
            WeightDist::Integers { lo, hi } => {
                let lo = (*lo).max(floor.ceil() as u32).min(*hi);
                rng.gen_range(lo..=*hi) as f64
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            WeightDist::Uniform { lo, hi } => {
                lo.is_finite() && hi.is_finite() && 0.0 <= *lo && lo < hi
            }
            WeightDist::Grid(values) => {
                !values.is_empty() && values.iter().all(|v| v.is_finite() && *v >= 0.0)
            }
            WeightDist::Integers { lo, hi } => lo <= hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadConfig(format!("bad weight distribution {self:?}")))
        }
    }
}

/// Flavor-respecting random instance, deterministic in the seed. For
/// dynamic queues `monotone` places each insertion at the position matching
/// its weight rank and draws weights above everything already deleted, so
/// the nondecreasing-weights flag holds throughout.
pub fn random_instance(
    flavor: Flavor,
    n: usize,
    steps: usize,
    dist: &WeightDist,
    seed: u64,
    monotone: bool,
) -> Result<Instance> {
    if n < 1 || steps < 1 {
        return Err(Error::BadConfig("need n >= 1 and steps >= 1".into()));
    }
    if monotone && flavor != Flavor::DynamicQueue {
        return Err(Error::BadConfig(
            "the monotone flag applies to dynamic queues".into(),
        ));
    }
    dist.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut b = InstanceBuilder::new(flavor);

    // Arrival step per item: front-loaded for decremental flavors.
    let mut arrivals: Vec<usize> = (0..n)
        .map(|i| {
            if flavor.is_decremental() || i == 0 {
                0
            } else {
                rng.gen_range(0..steps)
            }
        })
        .collect();
    arrivals.sort_unstable();

    // Queue state mirrored locally: labels front-to-back with weights.
    let mut queue: Vec<(String, f64)> = Vec::new();
    let mut next_item = 0usize;
    let mut max_deleted = 0.0f64;
    for t in 0..steps {
        b.step();
        while next_item < n && arrivals[next_item] == t {
            let label = format!("i{next_item:03}");
            let (weight, pos) = if monotone {
                let w = dist.sample_at_least(max_deleted, &mut rng);
                let pos = queue.iter().take_while(|(_, qw)| *qw <= w).count();
                (w, pos)
            } else {
                let w = dist.sample(&mut rng);
                let pos = match flavor {
                    Flavor::FifoQueue => queue.len(),
                    Flavor::DynamicQueue => rng.gen_range(0..=queue.len()),
                    // Set and decremental flavors append in arrival order.
                    _ => queue.len(),
                };
                (w, pos)
            };
            if pos == 0 {
                b.insert(&label, weight, None);
            } else {
                let after = queue[pos - 1].0.clone();
                b.insert(&label, weight, Some(&after));
            }
            queue.insert(pos, (label, weight));
            next_item += 1;
        }
        // Deletions: queues drop a random prefix, sets a random subset.
        if t + 1 < steps && !queue.is_empty() && rng.gen_bool(0.5) {
            if flavor.is_queue() {
                let k = rng.gen_range(0..=queue.len());
                for (label, w) in queue.drain(..k) {
                    b.delete(&label);
                    if monotone {
                        max_deleted = max_deleted.max(w);
                    }
                }
            } else {
                let mut i = 0;
                while i < queue.len() {
                    if rng.gen_bool(0.3) {
                        let (label, _) = queue.remove(i);
                        b.delete(&label);
                    } else {
                        i += 1;
                    }
                }
            }
        }
    }
    b.build()
}

/// The handful of instances the tightness checks are built around.
pub fn named_instance(name: &str, epsilon: f64) -> Result<Instance> {
    match name {
        "fifo_tight_1" => {
            let beta = 2.0 / 3.0;
            let mut b = InstanceBuilder::new(Flavor::FifoQueue);
            b.step()
                .insert("a", beta - epsilon, None)
                .insert("b", beta - epsilon, Some("a"))
                .insert("c", beta, Some("b"))
                .insert("d", 1.0, Some("c"));
            b.step().delete("a");
            b.step().delete("b");
            b.step();
            b.build()
        }
        "fifo_tight_2" => {
            let beta = 2.0 / 3.0;
            let mut b = InstanceBuilder::new(Flavor::FifoQueue);
            b.step()
                .insert("a", beta, None)
                .insert("b", 1.0 - epsilon, Some("a"))
                .insert("c", 1.0 - epsilon, Some("b"))
                .insert("d", 1.0, Some("c"));
            b.step();
            b.step().delete("a").delete("b").delete("c");
            b.build()
        }
        "set_two_item" => {
            let mut b = InstanceBuilder::new(Flavor::DynamicSet);
            b.step().insert("a", 1.0, None).insert("b", 1.0, Some("a"));
            b.step();
            b.build()
        }
        "queue_phi" => {
            let mut b = InstanceBuilder::new(Flavor::DecrementalQueue);
            b.step().insert("a", 1.0, None).insert("b", PHI, Some("a"));
            b.step();
            b.build()
        }
        other => Err(Error::UnknownName(format!("named instance {other:?}"))),
    }
}

pub const NAMED_INSTANCES: &[&str] =
    &["fifo_tight_1", "fifo_tight_2", "set_two_item", "queue_phi"];
