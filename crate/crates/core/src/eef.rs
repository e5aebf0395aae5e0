//! Earliest-Expiration-First property over queue schedules: whenever two
//! collected items are simultaneously active at a pick, the one earlier in
//! the queue must be collected first. Optimal queue schedules can be
//! reordered into this form without changing the collected set or gain.

use crate::error::{Error, Result};
use crate::model::{Anchor, Instance, ItemIx, Schedule};

fn require_queue(instance: &Instance) -> Result<()> {
    if !instance.flavor.is_queue() {
        return Err(Error::WrongFlavor {
            expected: "a queue flavor",
            got: instance.flavor.name(),
        });
    }
    Ok(())
}

/// Global queue positions for all items ever inserted. Deleted items keep
/// their slots; an insertion at FRONT of an empty queue lands after every
/// previously deleted item (expired items precede later arrivals).
fn master_order(instance: &Instance) -> Vec<u32> {
    let n = instance.num_items();
    let mut master: Vec<ItemIx> = Vec::with_capacity(n);
    let mut active = vec![false; n];
    for step in &instance.steps {
        for &(ix, anchor) in &step.inserts {
            let pos = match anchor {
                Anchor::After(a) => master.iter().position(|&m| m == a).unwrap() + 1,
                Anchor::Front => master
                    .iter()
                    .position(|&m| active[m.i()])
                    .unwrap_or(master.len()),
            };
            master.insert(pos, ix);
            active[ix.i()] = true;
        }
        for &ix in &step.deletes {
            active[ix.i()] = false;
        }
    }
    let mut pos = vec![0u32; n];
    for (p, &ix) in master.iter().enumerate() {
        pos[ix.i()] = p as u32;
    }
    pos
}

/// Active step ranges: item i is active at steps [ins[i], del[i]).
fn activity(instance: &Instance) -> (Vec<usize>, Vec<usize>) {
    let n = instance.num_items();
    let horizon = instance.num_steps();
    let mut ins = vec![usize::MAX; n];
    let mut del = vec![horizon; n];
    for (t, step) in instance.steps.iter().enumerate() {
        for &(ix, _) in &step.inserts {
            ins[ix.i()] = t;
        }
        for &ix in &step.deletes {
            del[ix.i()] = t;
        }
    }
    (ins, del)
}

/// True iff no pick has a queue-predecessor, active at the pick step, that
/// the schedule collects later.
pub fn check_eef(instance: &Instance, schedule: &Schedule) -> Result<bool> {
    require_queue(instance)?;
    let pos = master_order(instance);
    let (ins, del) = activity(instance);
    let mut picked_at = vec![usize::MAX; instance.num_items()];
    for (t, pick) in schedule.picks.iter().enumerate() {
        if let Some(ix) = pick {
            picked_at[ix.i()] = t;
        }
    }
    for (t, pick) in schedule.picks.iter().enumerate() {
        let p = match pick {
            Some(p) => *p,
            None => continue,
        };
        for q in 0..instance.num_items() {
            let active_at_t = ins[q] <= t && t < del[q];
            if active_at_t && pos[q] < pos[p.i()] && picked_at[q] != usize::MAX && picked_at[q] > t
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Kuhn matching: can `items` be assigned injectively to `steps` with item
/// i only on steps in [ins[i], del[i])?
fn matchable(items: &[ItemIx], steps: &[usize], ins: &[usize], del: &[usize]) -> bool {
    let mut step_of: Vec<Option<usize>> = vec![None; steps.len()];

    fn try_assign(
        it: usize,
        items: &[ItemIx],
        steps: &[usize],
        ins: &[usize],
        del: &[usize],
        visited: &mut [bool],
        step_of: &mut [Option<usize>],
    ) -> bool {
        let ix = items[it];
        for (s, &t) in steps.iter().enumerate() {
            if visited[s] || !(ins[ix.i()] <= t && t < del[ix.i()]) {
                continue;
            }
            visited[s] = true;
            let free = match step_of[s] {
                None => true,
                Some(other) => try_assign(other, items, steps, ins, del, visited, step_of),
            };
            if free {
                step_of[s] = Some(it);
                return true;
            }
        }
        false
    }

    for it in 0..items.len() {
        let mut visited = vec![false; steps.len()];
        if !try_assign(it, items, steps, ins, del, &mut visited, &mut step_of) {
            return false;
        }
    }
    true
}

/// Reassigns the collected items to the same pick steps so that check_eef
/// holds: at each pick step, take the master-earliest remaining item that is
/// active there and leaves the rest still assignable. Gain and collected
/// set are unchanged; an already-EEF schedule is a fixed point.
pub fn canonicalize_eef(instance: &Instance, schedule: &Schedule) -> Result<Schedule> {
    require_queue(instance)?;
    // Surface invalid schedules before reordering.
    crate::sim::gain(instance, schedule)?;
    let pos = master_order(instance);
    let (ins, del) = activity(instance);

    let steps: Vec<usize> = schedule
        .picks
        .iter()
        .enumerate()
        .filter_map(|(t, p)| p.map(|_| t))
        .collect();
    let mut remaining: Vec<ItemIx> = schedule.picks.iter().filter_map(|p| *p).collect();
    remaining.sort_by_key(|&ix| pos[ix.i()]);

    let mut picks = vec![None; schedule.picks.len()];
    for (si, &t) in steps.iter().enumerate() {
        let mut chosen = None;
        for (ri, &ix) in remaining.iter().enumerate() {
            if !(ins[ix.i()] <= t && t < del[ix.i()]) {
                continue;
            }
            let rest: Vec<ItemIx> = remaining
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != ri)
                .map(|(_, &x)| x)
                .collect();
            if matchable(&rest, &steps[si + 1..], &ins, &del) {
                chosen = Some(ri);
                break;
            }
        }
        let ri = chosen.expect("a valid schedule stays assignable");
        picks[t] = Some(remaining.remove(ri));
    }
    Ok(Schedule { picks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Flavor, InstanceBuilder};
    use crate::sim::gain;

    fn queue3() -> Instance {
        let mut b = InstanceBuilder::new(Flavor::DecrementalQueue);
        b.step()
            .insert("a", 1.0, None)
            .insert("b", 2.0, Some("a"))
            .insert("c", 3.0, Some("b"));
        b.step();
        b.step();
        b.build().unwrap()
    }

    fn picks(instance: &Instance, labels: &[&str]) -> Schedule {
        Schedule {
            picks: labels
                .iter()
                .map(|l| {
                    if l.is_empty() {
                        None
                    } else {
                        Some(instance.ix_of(l).unwrap())
                    }
                })
                .collect(),
        }
    }

    #[test]
    fn queue_order_collection_is_eef() {
        let q = queue3();
        assert!(check_eef(&q, &picks(&q, &["a", "b", "c"])).unwrap());
    }

    #[test]
    fn reverse_order_violates_eef() {
        let q = queue3();
        assert!(!check_eef(&q, &picks(&q, &["b", "a", ""])).unwrap());
    }

    #[test]
    fn single_pick_is_vacuously_eef() {
        let q = queue3();
        assert!(check_eef(&q, &picks(&q, &["", "b", ""])).unwrap());
    }

    #[test]
    fn sets_are_wrong_flavor() {
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        b.step().insert("a", 1.0, None);
        let instance = b.build().unwrap();
        assert!(matches!(
            check_eef(&instance, &Schedule::empty(1)),
            Err(Error::WrongFlavor { .. })
        ));
    }

    #[test]
    fn canonicalize_swaps_reversed_pair() {
        let q = queue3();
        let s = picks(&q, &["b", "a", ""]);
        let canon = canonicalize_eef(&q, &s).unwrap();
        assert_eq!(canon, picks(&q, &["a", "b", ""]));
        assert_eq!(gain(&q, &canon).unwrap(), gain(&q, &s).unwrap());
        assert!(check_eef(&q, &canon).unwrap());
    }

    #[test]
    fn canonicalize_is_identity_on_eef_input() {
        let q = queue3();
        let s = picks(&q, &["a", "c", ""]);
        assert!(check_eef(&q, &s).unwrap());
        assert_eq!(canonicalize_eef(&q, &s).unwrap(), s);
    }

    #[test]
    fn canonicalize_keeps_single_survivor() {
        // Both items die after step 1, so only one pick exists and it stays.
        let mut b = InstanceBuilder::new(Flavor::DecrementalQueue);
        b.step()
            .insert("a", 1.0, None)
            .insert("b", 2.0, Some("a"));
        b.step().delete("a").delete("b");
        let q = b.build().unwrap();
        let s = picks(&q, &["b", ""]);
        let canon = canonicalize_eef(&q, &s).unwrap();
        assert_eq!(canon, s);
        assert!(check_eef(&q, &canon).unwrap());
    }

    #[test]
    fn late_front_insert_is_globally_after_deleted_items() {
        // b is collected at step 1 and deleted; c then arrives at the front
        // of the empty queue. Collecting c later must not count as an EEF
        // violation even though c anchors at FRONT.
        let mut b = InstanceBuilder::new(Flavor::DynamicQueue);
        b.step().insert("b", 2.0, None);
        b.step().delete("b");
        b.step().insert("c", 1.0, None);
        let q = b.build().unwrap();
        let s = picks(&q, &["b", "", "c"]);
        assert!(check_eef(&q, &s).unwrap());
        assert_eq!(canonicalize_eef(&q, &s).unwrap(), s);
    }
}
