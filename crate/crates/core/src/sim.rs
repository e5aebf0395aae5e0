//! Online simulation loop: reveals each step's pre-phase events to the
//! algorithm, asks for one pick, and accounts gains. Picks must be pending
//! (active and not previously collected); violations are errors, never
//! silently repaired.

use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::model::{Flavor, Instance, ItemIx, Schedule, StepOps};

pub type GameRng = rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> GameRng {
    GameRng::seed_from_u64(seed)
}

/// SplitMix64 step; used to derive independent per-trial seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One revealed item as an algorithm sees it.
#[derive(Clone, Copy, Debug)]
pub struct SeenItem {
    /// Stable identity for tie-breaking: the (weight, key) order is a
    /// strict total order ("heaviest" is unique).
    pub key: u64,
    pub weight: f64,
    pub active: bool,
    /// Active and not collected by the observing algorithm.
    pub pending: bool,
}

/// Observable state handed to an algorithm each step.
pub struct StepView<'a> {
    pub flavor: Flavor,
    /// 0-based step index.
    pub step: usize,
    /// Every item revealed so far, in reveal order; indices are stable
    /// across steps of one game.
    pub seen: &'a [SeenItem],
    /// Indices into `seen` of the active items, front to back in queue
    /// order (insertion order for unordered sets).
    pub queue: &'a [u32],
}

impl<'a> StepView<'a> {
    pub fn pending(&self) -> impl Iterator<Item = (usize, &SeenItem)> + '_ {
        self.queue
            .iter()
            .map(move |&q| (q as usize, &self.seen[q as usize]))
            .filter(|(_, it)| it.pending)
    }

    pub fn pending_count(&self) -> usize {
        self.pending().count()
    }

    /// Maximum-weight pending item under the strict (weight, key) order.
    pub fn heaviest_pending(&self) -> Option<usize> {
        self.pending()
            .max_by(|a, b| cmp_weight_key(a.1, b.1))
            .map(|(i, _)| i)
    }

    pub fn is_pending(&self, seen_ix: usize) -> bool {
        self.seen.get(seen_ix).map_or(false, |it| it.pending)
    }
}

pub fn cmp_weight_key(a: &SeenItem, b: &SeenItem) -> std::cmp::Ordering {
    a.weight
        .partial_cmp(&b.weight)
        .expect("weights are finite")
        .then(a.key.cmp(&b.key))
}

/// Replay state of one instance: queue order, activity, and one observer's
/// collected set.
pub struct World<'a> {
    pub instance: &'a Instance,
    step: usize,
    active: Vec<bool>,
    inserted: Vec<bool>,
    collected: Vec<bool>,
    /// Active items in queue order.
    order: Vec<ItemIx>,
    /// Items in reveal order, parallel to `rows`.
    seen: Vec<ItemIx>,
    seen_pos: Vec<Option<u32>>,
    rows: Vec<SeenItem>,
    queue_rows: Vec<u32>,
}

impl<'a> World<'a> {
    pub fn new(instance: &'a Instance) -> World<'a> {
        let n = instance.num_items();
        World {
            instance,
            step: 0,
            active: vec![false; n],
            inserted: vec![false; n],
            collected: vec![false; n],
            order: Vec::with_capacity(n),
            seen: Vec::with_capacity(n),
            seen_pos: vec![None; n],
            rows: Vec::with_capacity(n),
            queue_rows: Vec::new(),
        }
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    /// Applies step `t`'s pre-phase events. Steps must be advanced in order.
    pub fn begin_step(&mut self, t: usize) {
        assert_eq!(t, self.step, "steps advance one at a time");
        let ops: &StepOps = &self.instance.steps[t];
        for &(ix, anchor) in &ops.inserts {
            let pos = match anchor {
                crate::model::Anchor::Front => 0,
                crate::model::Anchor::After(a) => {
                    self.order.iter().position(|&o| o == a).expect("validated anchor") + 1
                }
            };
            self.order.insert(pos, ix);
            self.active[ix.i()] = true;
            self.inserted[ix.i()] = true;
            self.seen_pos[ix.i()] = Some(self.seen.len() as u32);
            self.seen.push(ix);
            self.rows.push(SeenItem {
                key: self.instance.items[ix.i()].tie_rank,
                weight: self.instance.weight(ix),
                active: true,
                pending: true,
            });
        }
        for &ix in &ops.deletes {
            self.active[ix.i()] = false;
            let row = self.seen_pos[ix.i()].expect("validated delete") as usize;
            self.rows[row].active = false;
            self.rows[row].pending = false;
        }
        self.order.retain(|&o| self.active[o.i()]);
        self.queue_rows.clear();
        for &ix in &self.order {
            self.queue_rows
                .push(self.seen_pos[ix.i()].expect("active items are seen"));
        }
        self.step = t + 1;
    }

    pub fn view(&self) -> StepView<'_> {
        StepView {
            flavor: self.instance.flavor,
            step: self.step.saturating_sub(1),
            seen: &self.rows,
            queue: &self.queue_rows,
        }
    }

    pub fn item_at_row(&self, row: usize) -> ItemIx {
        self.seen[row]
    }

    pub fn is_active(&self, ix: ItemIx) -> bool {
        self.active[ix.i()]
    }

    pub fn is_collected(&self, ix: ItemIx) -> bool {
        self.collected[ix.i()]
    }

    /// Records the observer's pick for the current step.
    pub fn collect(&mut self, ix: ItemIx) -> Result<f64> {
        let step = self.step - 1;
        if !self.inserted[ix.i()] || !self.active[ix.i()] {
            return Err(Error::InvalidPick {
                step: step + 1,
                what: format!("{:?} is not active", self.instance.label(ix)),
            });
        }
        if self.collected[ix.i()] {
            return Err(Error::InvalidPick {
                step: step + 1,
                what: format!("{:?} was already collected", self.instance.label(ix)),
            });
        }
        self.collected[ix.i()] = true;
        let row = self.seen_pos[ix.i()].unwrap() as usize;
        self.rows[row].pending = false;
        Ok(self.instance.weight(ix))
    }
}

/// Total weight collected by a schedule. PASS steps contribute zero.
pub fn gain(instance: &Instance, schedule: &Schedule) -> Result<f64> {
    if schedule.picks.len() > instance.num_steps() {
        return Err(Error::InvalidPick {
            step: instance.num_steps() + 1,
            what: "schedule longer than instance".into(),
        });
    }
    let mut world = World::new(instance);
    let mut total = 0.0;
    for (t, pick) in schedule.picks.iter().enumerate() {
        world.begin_step(t);
        if let Some(ix) = pick {
            total += world.collect(*ix)?;
        }
    }
    Ok(total)
}

/// Runs `alg` on `instance`: per step, pre-phase events are revealed, then
/// the algorithm makes one pick. Deterministic in (instance, alg, seed).
pub fn simulate(
    instance: &Instance,
    alg: &mut dyn crate::algorithms::OnlineAlgorithm,
    seed: u64,
) -> Result<(Schedule, f64)> {
    instance.validate()?;
    alg.reset();
    let mut rng = rng_from_seed(seed);
    let mut world = World::new(instance);
    let mut picks = Vec::with_capacity(instance.num_steps());
    let mut total = 0.0;
    for t in 0..instance.num_steps() {
        world.begin_step(t);
        let choice = {
            let view = world.view();
            alg.pick(&view, &mut rng)?
        };
        match choice {
            None => picks.push(None),
            Some(row) => {
                if row >= world.rows.len() || !world.rows[row].pending {
                    return Err(Error::InvalidPick {
                        step: t + 1,
                        what: format!("algorithm {} returned a non-pending row", alg.name()),
                    });
                }
                let ix = world.item_at_row(row);
                total += world.collect(ix)?;
                picks.push(Some(ix));
            }
        }
    }
    Ok((Schedule { picks }, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Greedy;
    use crate::model::{Flavor, InstanceBuilder};

    fn two_items() -> Instance {
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        b.step().insert("a", 1.0, None).insert("b", 1.0, Some("a"));
        b.step();
        b.build().unwrap()
    }

    #[test]
    fn all_pass_gains_zero() {
        let instance = two_items();
        let schedule = Schedule::empty(2);
        assert_eq!(gain(&instance, &schedule).unwrap(), 0.0);
    }

    #[test]
    fn collecting_both_items_gains_two() {
        let instance = two_items();
        let a = instance.ix_of("a").unwrap();
        let b = instance.ix_of("b").unwrap();
        let schedule = Schedule {
            picks: vec![Some(a), Some(b)],
        };
        assert_eq!(gain(&instance, &schedule).unwrap(), 2.0);
    }

    #[test]
    fn pick_after_deletion_is_invalid() {
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        b.step().insert("a", 1.0, None);
        b.step().delete("a");
        let instance = b.build().unwrap();
        let a = instance.ix_of("a").unwrap();
        let schedule = Schedule {
            picks: vec![None, Some(a)],
        };
        assert!(matches!(
            gain(&instance, &schedule),
            Err(Error::InvalidPick { step: 2, .. })
        ));
    }

    #[test]
    fn double_pick_is_invalid() {
        let instance = two_items();
        let a = instance.ix_of("a").unwrap();
        let schedule = Schedule {
            picks: vec![Some(a), Some(a)],
        };
        assert!(matches!(
            gain(&instance, &schedule),
            Err(Error::InvalidPick { .. })
        ));
    }

    #[test]
    fn greedy_takes_heavier_item() {
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        b.step().insert("a", 1.0, None).insert("b", 2.0, Some("a"));
        let instance = b.build().unwrap();
        let (schedule, total) = simulate(&instance, &mut Greedy, 0).unwrap();
        assert_eq!(total, 2.0);
        assert_eq!(schedule.picks[0], instance.ix_of("b"));
    }

    #[test]
    fn zero_steps_gains_zero() {
        let instance = Instance {
            flavor: Flavor::DynamicSet,
            items: vec![],
            steps: vec![],
        };
        let (schedule, total) = simulate(&instance, &mut Greedy, 0).unwrap();
        assert_eq!(total, 0.0);
        assert!(schedule.picks.is_empty());
    }

    #[test]
    fn greedy_breaks_ties_by_label_rank() {
        let instance = two_items();
        let (schedule, _) = simulate(&instance, &mut Greedy, 0).unwrap();
        // Equal weights: the lexicographically larger label wins.
        assert_eq!(schedule.picks[0], instance.ix_of("b"));
    }
}
