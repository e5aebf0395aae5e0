//! The online collection algorithms behind one trait: Greedy, UniRand,
//! DecQueEFH, FIFOQueEH, MarkAndPick, RMix, plus the two constant-index
//! strategies used as lower-bound foils.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::{cmp_weight_key, GameRng, StepView};

/// The golden ratio, MarkAndPick's threshold divisor.
pub const PHI: f64 = 1.618033988749894848;

/// e/(e-1), the tight randomized bound for uniform decremental sets.
pub fn e_over_e_minus_1() -> f64 {
    std::f64::consts::E / (std::f64::consts::E - 1.0)
}

pub trait OnlineAlgorithm: Send {
    fn name(&self) -> &'static str;

    /// Clears per-game state before a new simulation.
    fn reset(&mut self) {}

    /// Returns the index (into `view.seen`) of a pending item, or None for
    /// PASS. A returned item must be pending.
    fn pick(&mut self, view: &StepView, rng: &mut GameRng) -> Result<Option<usize>>;

    /// Full pick distribution for the current state, as (seen index,
    /// probability) pairs over pending items. None when unsupported.
    fn distribution(&self, view: &StepView) -> Option<Vec<(usize, f64)>> {
        let _ = view;
        None
    }

    /// True when the pick distribution is a pure function of the pending
    /// configuration (weights, in queue order), with no game memory.
    fn memoryless(&self) -> bool {
        false
    }

    fn clone_box(&self) -> Box<dyn OnlineAlgorithm>;
}

fn earliest_pending_at_least(view: &StepView, threshold: f64) -> Option<usize> {
    view.pending().find(|(_, it)| it.weight >= threshold).map(|(i, _)| i)
}

// ---------------------------------------------------------------------------
// Greedy: collect the maximum-weight pending item.

#[derive(Clone, Default)]
pub struct Greedy;

impl OnlineAlgorithm for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn pick(&mut self, view: &StepView, _rng: &mut GameRng) -> Result<Option<usize>> {
        Ok(view.heaviest_pending())
    }

    fn distribution(&self, view: &StepView) -> Option<Vec<(usize, f64)>> {
        Some(view.heaviest_pending().map(|i| (i, 1.0)).into_iter().collect())
    }

    fn memoryless(&self) -> bool {
        true
    }

    fn clone_box(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

// ---------------------------------------------------------------------------
// UniRand: collect one of the pending items with equal probability.

#[derive(Clone, Default)]
pub struct UniRand;

impl OnlineAlgorithm for UniRand {
    fn name(&self) -> &'static str {
        "unirand"
    }

    fn pick(&mut self, view: &StepView, rng: &mut GameRng) -> Result<Option<usize>> {
        let pending: Vec<usize> = view.pending().map(|(i, _)| i).collect();
        if pending.is_empty() {
            return Ok(None);
        }
        Ok(Some(pending[rng.gen_range(0..pending.len())]))
    }

    fn distribution(&self, view: &StepView) -> Option<Vec<(usize, f64)>> {
        let pending: Vec<usize> = view.pending().map(|(i, _)| i).collect();
        let p = 1.0 / pending.len().max(1) as f64;
        Some(pending.into_iter().map(|i| (i, p)).collect())
    }

    fn memoryless(&self) -> bool {
        true
    }

    fn clone_box(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

// ---------------------------------------------------------------------------
// Constant-index strategies: always the first (or last) pending item in
// queue order; for unordered sets, in (weight, key) order.

#[derive(Clone)]
pub struct ConstIndex {
    pub last: bool,
}

impl ConstIndex {
    pub fn first() -> ConstIndex {
        ConstIndex { last: false }
    }

    pub fn last() -> ConstIndex {
        ConstIndex { last: true }
    }
}

impl OnlineAlgorithm for ConstIndex {
    fn name(&self) -> &'static str {
        if self.last {
            "const-last"
        } else {
            "const-first"
        }
    }

    fn pick(&mut self, view: &StepView, _rng: &mut GameRng) -> Result<Option<usize>> {
        let choice = if view.flavor.is_queue() {
            if self.last {
                view.pending().last().map(|(i, _)| i)
            } else {
                view.pending().next().map(|(i, _)| i)
            }
        } else if self.last {
            view.pending().max_by(|a, b| cmp_weight_key(a.1, b.1)).map(|(i, _)| i)
        } else {
            view.pending().min_by(|a, b| cmp_weight_key(a.1, b.1)).map(|(i, _)| i)
        };
        Ok(choice)
    }

    fn distribution(&self, view: &StepView) -> Option<Vec<(usize, f64)>> {
        let mut me = self.clone();
        let pick = me
            .pick(view, &mut crate::sim::rng_from_seed(0))
            .expect("const index cannot fail");
        Some(pick.map(|i| (i, 1.0)).into_iter().collect())
    }

    fn memoryless(&self) -> bool {
        true
    }

    fn clone_box(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

// ---------------------------------------------------------------------------
// DecQueEFH: stage machine for decremental queues, ratio 2(sqrt(13)-1)/3.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecQueEFHParams {
    pub beta: f64,
    pub xi: f64,
}

impl Default for DecQueEFHParams {
    fn default() -> Self {
        let s = 13f64.sqrt();
        DecQueEFHParams {
            beta: (s + 1.0) / 8.0,
            xi: (s + 1.0) / 6.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    E,
    F,
    H,
}

/// Stage machine: (E) capture the heaviest pending item h and collect the
/// earliest pending e with w_e >= beta*w_h; (F) if h is still pending
/// collect the earliest f with w_f >= xi*w_h, else restart the stage within
/// the same step; (H) collect h itself if still pending, else restart.
#[derive(Clone)]
pub struct DecQueEFH {
    pub params: DecQueEFHParams,
    phase: Phase,
    stage_heavy: Option<(u64, f64)>,
}

impl DecQueEFH {
    pub fn new(params: DecQueEFHParams) -> DecQueEFH {
        DecQueEFH {
            params,
            phase: Phase::E,
            stage_heavy: None,
        }
    }
}

impl Default for DecQueEFH {
    fn default() -> Self {
        DecQueEFH::new(DecQueEFHParams::default())
    }
}

fn find_pending_key(view: &StepView, key: u64) -> Option<usize> {
    view.pending().find(|(_, it)| it.key == key).map(|(i, _)| i)
}

impl OnlineAlgorithm for DecQueEFH {
    fn name(&self) -> &'static str {
        "decque-efh"
    }

    fn reset(&mut self) {
        self.phase = Phase::E;
        self.stage_heavy = None;
    }

    fn pick(&mut self, view: &StepView, _rng: &mut GameRng) -> Result<Option<usize>> {
        // A stage restart re-enters (E) within the same step, so at most one
        // extra iteration happens before a pick (or PASS) is produced.
        for _ in 0..2 {
            match self.phase {
                Phase::E => {
                    let h = match view.heaviest_pending() {
                        // PASS stands in for collecting a virtual 0-weight
                        // item and advances the phase identically.
                        None => {
                            self.stage_heavy = None;
                            self.phase = Phase::F;
                            return Ok(None);
                        }
                        Some(h) => h,
                    };
                    let hw = view.seen[h].weight;
                    self.stage_heavy = Some((view.seen[h].key, hw));
                    let e = earliest_pending_at_least(view, self.params.beta * hw);
                    assert!(e.is_some(), "h itself meets the beta threshold");
                    self.phase = Phase::F;
                    return Ok(e);
                }
                Phase::F => {
                    // stage_heavy is None when (E) found nothing pending;
                    // the virtual weight-0 h is never pending.
                    let live = self
                        .stage_heavy
                        .filter(|&(key, _)| find_pending_key(view, key).is_some());
                    match live {
                        None => {
                            self.phase = Phase::E;
                            continue;
                        }
                        Some((_, hw)) => {
                            let f = earliest_pending_at_least(view, self.params.xi * hw);
                            assert!(f.is_some(), "h itself meets the xi threshold");
                            self.phase = Phase::H;
                            return Ok(f);
                        }
                    }
                }
                Phase::H => {
                    let live = self
                        .stage_heavy
                        .and_then(|(key, _)| find_pending_key(view, key));
                    match live {
                        None => {
                            self.phase = Phase::E;
                            continue;
                        }
                        Some(h) => {
                            self.phase = Phase::E;
                            self.stage_heavy = None;
                            return Ok(Some(h));
                        }
                    }
                }
            }
        }
        unreachable!("phase (E) always produces a pick or PASS");
    }

    fn clone_box(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

// ---------------------------------------------------------------------------
// FIFOQueEH: 1.8-competitive for FIFO queues at alpha = 3/4, beta = 2/3.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FIFOQueEHParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for FIFOQueEHParams {
    fn default() -> Self {
        FIFOQueEHParams {
            alpha: 3.0 / 4.0,
            beta: 2.0 / 3.0,
        }
    }
}

/// Tracks h', the heaviest pending item of the previous step (initially a
/// virtual weight-0 item, which is never pending). When h' is gone or the
/// current heaviest h outweighs it by 1/alpha, collect the earliest pending
/// item above beta*w_h; otherwise collect h'.
#[derive(Clone)]
pub struct FIFOQueEH {
    pub params: FIFOQueEHParams,
    prev_heavy: Option<(u64, f64)>,
}

impl FIFOQueEH {
    pub fn new(params: FIFOQueEHParams) -> FIFOQueEH {
        FIFOQueEH {
            params,
            prev_heavy: None,
        }
    }
}

impl Default for FIFOQueEH {
    fn default() -> Self {
        FIFOQueEH::new(FIFOQueEHParams::default())
    }
}

impl OnlineAlgorithm for FIFOQueEH {
    fn name(&self) -> &'static str {
        "fifoque-eh"
    }

    fn reset(&mut self) {
        self.prev_heavy = None;
    }

    fn pick(&mut self, view: &StepView, _rng: &mut GameRng) -> Result<Option<usize>> {
        let h = match view.heaviest_pending() {
            None => {
                self.prev_heavy = None;
                return Ok(None);
            }
            Some(h) => h,
        };
        let hw = view.seen[h].weight;
        let hprime = self
            .prev_heavy
            .and_then(|(key, w)| find_pending_key(view, key).map(|i| (i, w)));
        let pick = match hprime {
            Some((i, w)) if self.params.alpha * hw < w => i,
            _ => {
                let e = earliest_pending_at_least(view, self.params.beta * hw);
                assert!(e.is_some(), "h itself meets the beta threshold");
                e.unwrap()
            }
        };
        // h' becomes this step's heaviest pending item, captured before the
        // collection; collecting h = h' makes it non-pending next step.
        self.prev_heavy = Some((view.seen[h].key, hw));
        Ok(Some(pick))
    }

    fn clone_box(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

// ---------------------------------------------------------------------------
// MarkAndPick: phi-competitive for dynamic queues with non-decreasing
// weights.

/// Marks are never removed and survive deletions: the marked target h is
/// the heaviest unmarked item among all items ever revealed, active or not.
#[derive(Clone, Default)]
pub struct MarkAndPick {
    marked: HashSet<u64>,
}

impl MarkAndPick {
    pub fn new() -> MarkAndPick {
        MarkAndPick::default()
    }

    pub fn marked(&self) -> &HashSet<u64> {
        &self.marked
    }
}

impl OnlineAlgorithm for MarkAndPick {
    fn name(&self) -> &'static str {
        "mark-and-pick"
    }

    fn reset(&mut self) {
        self.marked.clear();
    }

    fn pick(&mut self, view: &StepView, _rng: &mut GameRng) -> Result<Option<usize>> {
        if view.pending().next().is_none() {
            // "if there is no pending item then wait" -- no marking either.
            return Ok(None);
        }
        let h = view
            .seen
            .iter()
            .enumerate()
            .filter(|(_, it)| !self.marked.contains(&it.key))
            .max_by(|a, b| cmp_weight_key(a.1, b.1));
        let (h, hit) = h.expect("collections never outnumber revealed items");
        let _ = h;
        self.marked.insert(hit.key);
        let threshold = hit.weight / PHI;
        match earliest_pending_at_least(view, threshold) {
            Some(i) => Ok(Some(i)),
            None => Err(Error::NoEligiblePick {
                step: view.step + 1,
                threshold,
            }),
        }
    }

    fn clone_box(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

// ---------------------------------------------------------------------------
// RMix: draw x uniform on [0,1), collect the earliest pending item with
// weight at least e^{-x} times the heaviest pending weight.

#[derive(Clone, Default)]
pub struct RMix;

impl OnlineAlgorithm for RMix {
    fn name(&self) -> &'static str {
        "rmix"
    }

    fn pick(&mut self, view: &StepView, rng: &mut GameRng) -> Result<Option<usize>> {
        let h = match view.heaviest_pending() {
            None => return Ok(None),
            Some(h) => h,
        };
        let x: f64 = rng.gen();
        let threshold = (-x).exp() * view.seen[h].weight;
        let e = earliest_pending_at_least(view, threshold);
        assert!(e.is_some(), "h itself meets every e^{{-x}} threshold");
        Ok(e)
    }

    /// Only queue-prefix maxima can be picked: item i is chosen exactly when
    /// e^{-x} w_h lands in (max_{j<i} w_j, w_i], an interval in x of length
    /// ln(w_i / max_{j<i} w_j) clipped to [0,1).
    fn distribution(&self, view: &StepView) -> Option<Vec<(usize, f64)>> {
        let h = view.heaviest_pending()?;
        let hw = view.seen[h].weight;
        let mut out = Vec::new();
        let mut best_so_far = f64::NEG_INFINITY;
        for (i, it) in view.pending() {
            if it.weight > best_so_far {
                // x-interval where this item is the earliest above threshold.
                let lo = (hw / it.weight).ln().max(0.0);
                let hi = if best_so_far <= 0.0 {
                    1.0
                } else {
                    (hw / best_so_far).ln().min(1.0)
                };
                if hi > lo {
                    out.push((i, hi - lo));
                }
                best_so_far = it.weight;
            }
        }
        Some(out)
    }

    fn memoryless(&self) -> bool {
        true
    }

    fn clone_box(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

// ---------------------------------------------------------------------------

/// Looks up an algorithm by its CLI name.
pub fn algorithm_by_name(name: &str) -> Result<Box<dyn OnlineAlgorithm>> {
    match name {
        "greedy" => Ok(Box::new(Greedy)),
        "unirand" => Ok(Box::new(UniRand)),
        "decque-efh" => Ok(Box::new(DecQueEFH::default())),
        "fifoque-eh" => Ok(Box::new(FIFOQueEH::default())),
        "mark-and-pick" => Ok(Box::new(MarkAndPick::new())),
        "rmix" => Ok(Box::new(RMix)),
        "const-first" => Ok(Box::new(ConstIndex::first())),
        "const-last" => Ok(Box::new(ConstIndex::last())),
        other => Err(Error::UnknownName(format!("algorithm {other:?}"))),
    }
}

pub const ALGORITHM_NAMES: &[&str] = &[
    "greedy",
    "unirand",
    "decque-efh",
    "fifoque-eh",
    "mark-and-pick",
    "rmix",
    "const-first",
    "const-last",
];

/// The deterministic algorithms run against every lower-bound game.
pub fn deterministic_battery() -> Vec<Box<dyn OnlineAlgorithm>> {
    vec![
        Box::new(Greedy),
        Box::new(DecQueEFH::default()),
        Box::new(FIFOQueEH::default()),
        Box::new(MarkAndPick::new()),
        Box::new(ConstIndex::first()),
        Box::new(ConstIndex::last()),
    ]
}
