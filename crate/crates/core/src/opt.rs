//! Offline optimum: the instance becomes a bipartite graph between items
//! and time steps (an edge of weight w_i wherever item i is active), and a
//! maximum-weight matching is an optimal collection sequence. A guarded
//! brute-force enumeration serves as the independent oracle.

use crate::error::{Error, Result};
use crate::model::{Instance, ItemIx, Schedule};

/// Item-vs-step availability: item i is active at steps [ins[i], del[i]).
#[derive(Clone, Debug)]
pub struct AvailabilityGraph {
    pub num_steps: usize,
    pub weights: Vec<f64>,
    pub ins: Vec<usize>,
    pub del: Vec<usize>,
}

impl AvailabilityGraph {
    pub fn new(instance: &Instance) -> AvailabilityGraph {
        let n = instance.num_items();
        let mut ins = vec![usize::MAX; n];
        let mut del = vec![instance.num_steps(); n];
        for (t, step) in instance.steps.iter().enumerate() {
            for &(ix, _) in &step.inserts {
                ins[ix.i()] = t;
            }
            for &ix in &step.deletes {
                del[ix.i()] = t;
            }
        }
        AvailabilityGraph {
            num_steps: instance.num_steps(),
            weights: instance.items.iter().map(|m| m.weight).collect(),
            ins,
            del,
        }
    }

    pub fn edge(&self, item: usize, step: usize) -> bool {
        self.ins[item] <= step && step < self.del[item]
    }
}

/// Minimum-cost perfect assignment on a square matrix (Jonker-Volgenant
/// style shortest augmenting paths with potentials). Returns the column
/// matched to each row.
pub fn hungarian_min_cost(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based sentinels; p[j] is the row matched to column j.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            col_of_row[p[j] - 1] = j - 1;
        }
    }
    col_of_row
}

/// Sum of weights over a collected set in catalog order, so equal sets sum
/// identically regardless of how the matching found them.
fn canonical_sum(weights: &[f64], set: &mut Vec<usize>) -> f64 {
    set.sort_unstable();
    set.iter().map(|&i| weights[i]).sum()
}

/// The optimal collected set (item indices), restricted to steps
/// `from_step..` and to items outside `banned`.
fn optimal_set(av: &AvailabilityGraph, from_step: usize, banned: u128) -> Vec<usize> {
    let items: Vec<usize> = (0..av.weights.len())
        .filter(|&i| banned & (1u128 << i) == 0 && av.del[i] > from_step && av.ins[i] != usize::MAX)
        .collect();
    let steps: Vec<usize> = (from_step..av.num_steps).collect();
    let m = items.len().max(steps.len());
    if m == 0 {
        return Vec::new();
    }
    let mut cost = vec![vec![0.0f64; m]; m];
    for (r, row) in cost.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            if r < steps.len() && c < items.len() && av.edge(items[c], steps[r]) {
                *cell = -av.weights[items[c]];
            }
        }
    }
    let col_of_row = hungarian_min_cost(&cost);
    let mut out = Vec::new();
    for (r, &c) in col_of_row.iter().enumerate() {
        if r < steps.len() && c < items.len() && av.edge(items[c], steps[r]) {
            out.push(items[c]);
        }
    }
    out
}

/// Optimal gain only (one matching solve).
pub fn optimal_gain_value(instance: &Instance) -> Result<f64> {
    if instance.num_items() > 120 {
        return Err(Error::TooLarge(format!(
            "{} items exceeds the matching size guard",
            instance.num_items()
        )));
    }
    let av = AvailabilityGraph::new(instance);
    let mut set = optimal_set(&av, 0, 0);
    Ok(canonical_sum(&av.weights, &mut set))
}

/// Optimal gain and a schedule attaining it. Ties among maximum matchings
/// are broken by preferring lexicographically earliest picks step by step
/// (PASS last); queue-flavor schedules are then EEF-canonicalized.
pub fn optimal_gain_matching(instance: &Instance) -> Result<(f64, Schedule)> {
    instance.validate()?;
    let av = AvailabilityGraph::new(instance);
    let mut first = optimal_set(&av, 0, 0);
    let target = canonical_sum(&av.weights, &mut first);
    // Tolerance is for tie-breaking among equal-value sets only; the
    // reported gain is the matching value itself.
    let tol = 1e-9 * (1.0 + target.abs());

    let mut picks: Vec<Option<ItemIx>> = Vec::with_capacity(av.num_steps);
    let mut collected: u128 = 0;
    let mut collected_list: Vec<usize> = Vec::new();
    for t in 0..av.num_steps {
        let mut candidates: Vec<usize> = (0..av.weights.len())
            .filter(|&i| collected & (1u128 << i) == 0 && av.edge(i, t))
            .collect();
        candidates.sort_by_key(|&i| instance.items[i].tie_rank);
        let mut chosen = None;
        for &c in &candidates {
            let mut set = optimal_set(&av, t + 1, collected | (1u128 << c));
            set.push(c);
            set.extend_from_slice(&collected_list);
            if canonical_sum(&av.weights, &mut set) >= target - tol {
                chosen = Some(c);
                break;
            }
        }
        match chosen {
            Some(c) => {
                collected |= 1u128 << c;
                collected_list.push(c);
                picks.push(Some(ItemIx(c as u32)));
            }
            None => picks.push(None),
        }
    }
    let mut schedule = Schedule { picks };
    let gain_check = crate::sim::gain(instance, &schedule)?;
    debug_assert!((gain_check - target).abs() <= tol, "lex fix lost value");
    if instance.flavor.is_queue() {
        schedule = crate::eef::canonicalize_eef(instance, &schedule)?;
    }
    Ok((target, schedule))
}

/// Exact maximum by exhaustive enumeration over per-step choices
/// (memoized on the collected set), guarded to at most 8 items and 8
/// steps. Independent of the matching path.
pub fn optimal_gain_bruteforce(instance: &Instance) -> Result<f64> {
    let n = instance.num_items();
    let t_max = instance.num_steps();
    if n > 8 || t_max > 8 {
        return Err(Error::TooLarge(format!(
            "brute force guard: {n} items, {t_max} steps"
        )));
    }
    let av = AvailabilityGraph::new(instance);
    let mut memo = vec![f64::NAN; (t_max + 1) << n];

    fn best(av: &AvailabilityGraph, t: usize, mask: usize, n: usize, memo: &mut [f64]) -> f64 {
        if t == av.num_steps {
            return 0.0;
        }
        let slot = (t << n) | mask;
        if !memo[slot].is_nan() {
            return memo[slot];
        }
        let mut value = best(av, t + 1, mask, n, memo); // PASS
        for i in 0..n {
            if mask & (1 << i) == 0 && av.edge(i, t) {
                let v = av.weights[i] + best(av, t + 1, mask | (1 << i), n, memo);
                if v > value {
                    value = v;
                }
            }
        }
        memo[slot] = value;
        value
    }

    Ok(best(&av, 0, 0, n, &mut memo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Flavor, InstanceBuilder};

    #[test]
    fn hungarian_agrees_with_permutation_search() {
        use rand::Rng;
        let mut rng = crate::sim::rng_from_seed(7);
        for n in 1..=5usize {
            for _ in 0..40 {
                let cost: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect())
                    .collect();
                let assign = hungarian_min_cost(&cost);
                let got: f64 = assign.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
                let mut best = f64::INFINITY;
                let mut perm: Vec<usize> = (0..n).collect();
                permute(&mut perm, 0, &cost, &mut best);
                assert!((got - best).abs() < 1e-9, "n={n} got={got} best={best}");
            }
        }

        fn permute(perm: &mut Vec<usize>, k: usize, cost: &[Vec<f64>], best: &mut f64) {
            if k == perm.len() {
                let v: f64 = perm.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
                if v < *best {
                    *best = v;
                }
                return;
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                permute(perm, k + 1, cost, best);
                perm.swap(k, i);
            }
        }
    }

    #[test]
    fn short_lived_heavy_item_first() {
        // b is active only at step 1, a spans both steps: take b then a.
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        b.step().insert("a", 1.0, None).insert("b", 2.0, Some("a"));
        b.step().delete("b");
        let instance = b.build().unwrap();
        assert_eq!(optimal_gain_bruteforce(&instance).unwrap(), 3.0);
        let (gain, schedule) = optimal_gain_matching(&instance).unwrap();
        assert_eq!(gain, 3.0);
        assert_eq!(schedule.picks[0], instance.ix_of("b"));
        assert_eq!(schedule.picks[1], instance.ix_of("a"));
    }

    #[test]
    fn empty_instance_has_zero_gain() {
        let instance = crate::model::Instance {
            flavor: Flavor::DynamicSet,
            items: vec![],
            steps: vec![],
        };
        let (gain, schedule) = optimal_gain_matching(&instance).unwrap();
        assert_eq!(gain, 0.0);
        assert!(schedule.picks.is_empty());
    }

    #[test]
    fn single_item_brute_force() {
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        b.step().insert("a", 2.5, None);
        let instance = b.build().unwrap();
        assert_eq!(optimal_gain_bruteforce(&instance).unwrap(), 2.5);
    }

    #[test]
    fn two_items_one_step_takes_max() {
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        b.step().insert("a", 1.0, None).insert("b", 4.0, Some("a"));
        let instance = b.build().unwrap();
        assert_eq!(optimal_gain_bruteforce(&instance).unwrap(), 4.0);
        assert_eq!(optimal_gain_value(&instance).unwrap(), 4.0);
    }

    #[test]
    fn brute_force_guard_rejects_large() {
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        b.step();
        for i in 0..9 {
            b.insert(&format!("i{i}"), 1.0, None);
        }
        let instance = b.build().unwrap();
        assert!(matches!(
            optimal_gain_bruteforce(&instance),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn third_route_check_on_tiny_instance() {
        // Independent of both solvers: enumerate schedules directly.
        let mut b = InstanceBuilder::new(Flavor::DynamicSet);
        b.step()
            .insert("a", 1.25, None)
            .insert("b", 2.5, Some("a"));
        b.step().delete("a");
        let instance = b.build().unwrap();
        let mut best = 0.0f64;
        for p1 in [None, instance.ix_of("a"), instance.ix_of("b")] {
            for p2 in [None, instance.ix_of("a"), instance.ix_of("b")] {
                let s = Schedule { picks: vec![p1, p2] };
                if let Ok(g) = crate::sim::gain(&instance, &s) {
                    best = best.max(g);
                }
            }
        }
        assert_eq!(best, optimal_gain_bruteforce(&instance).unwrap());
        assert_eq!(best, optimal_gain_value(&instance).unwrap());
    }
}
