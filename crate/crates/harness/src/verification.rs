//! The acceptance gate: every checkable claim, implemented as one
//! criterion function with its tolerance pinned here. `whacamole verify`
//! and the acceptance test suite both run these.

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use whacamole_core::adversaries::{
    lb_decremental_queue_game, lb_memoryless_queue_game, lb_phi_queue_game, lb_two_item_set_game,
    yao_uniform_process,
};
use whacamole_core::algorithms::{self, algorithm_by_name, DecQueEFH, Greedy, UniRand, PHI};
use whacamole_core::analysis::{
    check_e_bounds, check_lb_inequalities, dominates, e_enclosure, e_table, expected_gain,
    lb_randomized_queue_pressure, randomized_queue_bound, randomized_queue_bound_exact, sharp,
    solve_lb_sequence, verify_strategy_lemmas, DominanceSet, Strategy,
};
use whacamole_core::error::Result;
use whacamole_core::model::{Flavor, Instance};
use whacamole_core::opt::{optimal_gain_bruteforce, optimal_gain_matching, optimal_gain_value};
use whacamole_core::sim::{derive_seed, gain, simulate};

use crate::families;
use crate::gen::{named_instance, random_instance, WeightDist};

/// Tolerances and pinned constants, one place only.
pub mod tolerances {
    /// Additive slack on competitive-ratio ceilings (f64 division noise).
    pub const RATIO_SLACK: f64 = 1e-9;
    /// Slack on the phi lower-bound games.
    pub const PHI_GAME_SLACK: f64 = 1e-12;
    /// Slack on the solved decremental-queue game bound.
    pub const LB_GAME_SLACK: f64 = 1e-6;
    /// Probability-vector normalization slack.
    pub const DIST_SLACK: f64 = 1e-12;
    /// The named tight instances run at epsilon = 1e-3; their ratio claims
    /// degrade linearly, bounded by 5 epsilon.
    pub const TIGHT_EPSILON: f64 = 1e-3;
    pub const TIGHT_SLACK: f64 = 5e-3;
    /// |R(10^6) - e/(e-1)| bound for the randomized queue constant.
    pub const LIMIT_SLACK: f64 = 1e-5;
    /// Memoryless game distance from 2 at n = 100, T = 10^6.
    pub const MEMORYLESS_SLACK: f64 = 1e-2;
    /// DecQueEFH ratio ceiling 2(sqrt(13)-1)/3.
    pub fn decque_ratio() -> f64 {
        2.0 * (13f64.sqrt() - 1.0) / 3.0
    }
    /// Dyadic 4-value grid bracketing beta and xi; sums stay exact in f64.
    pub const DECQUE_GRID: [f64; 4] = [0.25, 0.59375, 0.78125, 1.0];
    /// Dyadic 4-value grid bracketing beta = 2/3; sums stay exact in f64.
    pub const FIFO_GRID: [f64; 4] = [0.65625, 0.671875, 0.75, 1.0];
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub claim: String,
    pub measured: String,
    pub pass: bool,
    pub details: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {} claim[{}] measured[{}] {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.claim,
            self.measured,
            self.details
        )
    }
}

fn battery_names() -> Vec<&'static str> {
    vec![
        "greedy",
        "decque-efh",
        "fifoque-eh",
        "mark-and-pick",
        "const-first",
        "const-last",
    ]
}

/// Worst opt/alg ratio of `alg_name` over an instance iterator, in
/// parallel. Returns (count, worst ratio).
fn worst_ratio_over<I>(instances: I, alg_name: &str) -> Result<(u64, f64)>
where
    I: Iterator<Item = Instance> + Send,
{
    instances
        .par_bridge()
        .map(|inst| -> Result<(u64, f64)> {
            let mut alg = algorithm_by_name(alg_name)?;
            let (_, g) = simulate(&inst, alg.as_mut(), 0)?;
            let opt = optimal_gain_value(&inst)?;
            Ok((1, whacamole_core::adversaries::ratio_of(opt, g)))
        })
        .try_reduce(
            || (0u64, f64::NEG_INFINITY),
            |a, b| Ok((a.0 + b.0, a.1.max(b.1))),
        )
}

/// Worst ratio over `count` random instances built from the derived seeds.
fn worst_ratio_random<B>(count: u64, build: B, alg_name: &str) -> Result<(u64, f64)>
where
    B: Fn(u64) -> Result<Instance> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| -> Result<(u64, f64)> {
            let inst = build(i)?;
            let mut alg = algorithm_by_name(alg_name)?;
            let (_, g) = simulate(&inst, alg.as_mut(), 0)?;
            let opt = optimal_gain_value(&inst)?;
            Ok((1, whacamole_core::adversaries::ratio_of(opt, g)))
        })
        .try_reduce(
            || (0u64, f64::NEG_INFINITY),
            |a, b| Ok((a.0 + b.0, a.1.max(b.1))),
        )
}

// ---------------------------------------------------------------------------

/// Criterion 1: Greedy is 2-competitive on exhaustive dynamic sets and the
/// two-item game pins the ratio at exactly 2.
pub fn criterion_1() -> CriterionResult {
    let run = || -> Result<(u64, f64, f64)> {
        let (count, worst) = worst_ratio_over(
            families::dynamic_set_instances(4, 4, vec![1.0, 2.0, 3.0]),
            "greedy",
        )?;
        let game = lb_two_item_set_game(&mut Greedy)?;
        Ok((count, worst, game.ratio))
    };
    match run() {
        Ok((count, worst, game_ratio)) => CriterionResult {
            id: 1,
            name: "greedy-two-competitive",
            claim: "worst ratio <= 2 exactly; game ratio = 2 exactly".into(),
            measured: format!("worst {worst:.12}, game {game_ratio}"),
            pass: worst <= 2.0 && game_ratio == 2.0,
            details: format!("{count} exhaustive instances"),
        },
        Err(e) => fail(1, "greedy-two-competitive", e),
    }
}

/// Criterion 2: the phi queue game forces ratio >= phi on the whole
/// deterministic battery.
pub fn criterion_2() -> CriterionResult {
    let run = || -> Result<(f64, String)> {
        let mut min_ratio = f64::INFINITY;
        let mut detail = String::new();
        for name in battery_names() {
            let mut alg = algorithm_by_name(name)?;
            let r = lb_phi_queue_game(alg.as_mut())?;
            min_ratio = min_ratio.min(r.ratio);
            detail.push_str(&format!("{name}:{:.9} ", r.ratio));
        }
        Ok((min_ratio, detail))
    };
    match run() {
        Ok((min_ratio, detail)) => CriterionResult {
            id: 2,
            name: "phi-queue-lower-bound",
            claim: format!("every battery ratio >= {:.12}", PHI - tolerances::PHI_GAME_SLACK),
            measured: format!("min ratio {min_ratio:.12}"),
            pass: min_ratio >= PHI - tolerances::PHI_GAME_SLACK,
            details: detail,
        },
        Err(e) => fail(2, "phi-queue-lower-bound", e),
    }
}

/// Criterion 3: the solved lower-bound sequences match the published
/// constants, grow monotonically, and the n = 3 game forces the battery.
pub fn criterion_3() -> CriterionResult {
    let run = || -> Result<(bool, String, String)> {
        let seq3 = solve_lb_sequence(3)?;
        let seq5 = solve_lb_sequence(5)?;
        let mut ok = (1.6328..=1.6330).contains(&seq3.r)
            && (0.6123..=0.6124).contains(&seq3.z(2))
            && (1.6360..=1.6375).contains(&seq5.r)
            && check_lb_inequalities(&seq3)
            && check_lb_inequalities(&seq5);
        let mut rs = Vec::new();
        let mut prev = 0.0f64;
        for n in 3..=12 {
            let seq = solve_lb_sequence(n)?;
            ok &= seq.r >= prev - 1e-12 && seq.r < 1.6379 && check_lb_inequalities(&seq);
            prev = seq.r;
            rs.push(format!("R({n})={:.7}", seq.r));
        }
        let mut min_game = f64::INFINITY;
        let mut games = String::new();
        for name in battery_names() {
            let mut alg = algorithm_by_name(name)?;
            let r = lb_decremental_queue_game(alg.as_mut(), &seq3)?;
            min_game = min_game.min(r.ratio);
            games.push_str(&format!("{name}:{:.6} ", r.ratio));
        }
        ok &= min_game >= 1.6329 - tolerances::LB_GAME_SLACK;
        Ok((
            ok,
            format!(
                "R(3)={:.6} z2={:.6} R(5)={:.6} min game {:.6}",
                seq3.r,
                seq3.z(2),
                seq5.r,
                min_game
            ),
            format!("{} | games {}", rs.join(" "), games),
        ))
    };
    match run() {
        Ok((pass, measured, details)) => CriterionResult {
            id: 3,
            name: "decremental-queue-lb",
            claim: "R(3) in [1.6328,1.6330], z2 in [0.6123,0.6124], R(5) in [1.6360,1.6375], \
                    R nondecreasing < 1.6379, game >= 1.6329-1e-6"
                .into(),
            measured,
            pass,
            details,
        },
        Err(e) => fail(3, "decremental-queue-lb", e),
    }
}

/// Criterion 4: DecQueEFH stays within 2(sqrt(13)-1)/3 on the exhaustive
/// decremental family and 10^5 random decremental queues.
pub fn criterion_4() -> CriterionResult {
    let bound = tolerances::decque_ratio() + tolerances::RATIO_SLACK;
    let run = || -> Result<(u64, f64, f64)> {
        let (count, worst_ex) = worst_ratio_over(
            families::decremental_queue_instances(6, 6, tolerances::DECQUE_GRID.to_vec()),
            "decque-efh",
        )?;
        let dist = WeightDist::Uniform { lo: 0.05, hi: 1.0 };
        let (_, worst_rand) = worst_ratio_random(
            100_000,
            |i| {
                let seed = derive_seed(0xc4, i);
                let n = 1 + (derive_seed(seed, 1) % 8) as usize;
                let steps = 1 + (derive_seed(seed, 2) % 8) as usize;
                random_instance(Flavor::DecrementalQueue, n, steps, &dist, seed, false)
            },
            "decque-efh",
        )?;
        Ok((count, worst_ex, worst_rand))
    };
    match run() {
        Ok((count, worst_ex, worst_rand)) => CriterionResult {
            id: 4,
            name: "decque-efh-upper-bound",
            claim: format!("worst ratio <= {bound:.9}"),
            measured: format!("exhaustive {worst_ex:.9}, random {worst_rand:.9}"),
            pass: worst_ex <= bound && worst_rand <= bound,
            details: format!("{count} exhaustive + 100000 random instances"),
        },
        Err(e) => fail(4, "decque-efh-upper-bound", e),
    }
}

/// Criterion 5: FIFOQueEH stays within 1.8 everywhere and the named tight
/// instances reach it.
pub fn criterion_5() -> CriterionResult {
    let bound = 1.8 + tolerances::RATIO_SLACK;
    let run = || -> Result<(u64, f64, f64, f64, f64)> {
        let (count, worst_ex) = worst_ratio_over(
            families::fifo_queue_instances(4, 4, tolerances::FIFO_GRID.to_vec()),
            "fifoque-eh",
        )?;
        let dist = WeightDist::Uniform { lo: 0.05, hi: 1.0 };
        let (_, worst_rand) = worst_ratio_random(
            100_000,
            |i| {
                let seed = derive_seed(0xf1f0, i);
                let n = 1 + (derive_seed(seed, 1) % 8) as usize;
                let steps = 1 + (derive_seed(seed, 2) % 8) as usize;
                random_instance(Flavor::FifoQueue, n, steps, &dist, seed, false)
            },
            "fifoque-eh",
        )?;
        let mut tight = [0.0f64; 2];
        for (k, name) in ["fifo_tight_1", "fifo_tight_2"].iter().enumerate() {
            let inst = named_instance(name, tolerances::TIGHT_EPSILON)?;
            let mut alg = algorithm_by_name("fifoque-eh")?;
            let (_, g) = simulate(&inst, alg.as_mut(), 0)?;
            let opt = optimal_gain_value(&inst)?;
            tight[k] = opt / g;
        }
        Ok((count, worst_ex, worst_rand, tight[0], tight[1]))
    };
    match run() {
        Ok((count, worst_ex, worst_rand, t1, t2)) => CriterionResult {
            id: 5,
            name: "fifoque-eh-1.8",
            claim: format!(
                "worst <= {bound:.9}; tight instances >= {:.4}",
                1.8 - tolerances::TIGHT_SLACK
            ),
            measured: format!(
                "exhaustive {worst_ex:.9}, random {worst_rand:.9}, tight {t1:.6}/{t2:.6}"
            ),
            pass: worst_ex <= bound
                && worst_rand <= bound
                && t1 >= 1.8 - tolerances::TIGHT_SLACK
                && t2 >= 1.8 - tolerances::TIGHT_SLACK
                && t1 <= bound
                && t2 <= bound,
            details: format!("{count} exhaustive + 100000 random instances"),
        },
        Err(e) => fail(5, "fifoque-eh-1.8", e),
    }
}

/// Criterion 6: MarkAndPick stays within phi on random monotone dynamic
/// queues with arbitrary-position insertions.
pub fn criterion_6() -> CriterionResult {
    let bound = PHI + tolerances::RATIO_SLACK;
    let run = || -> Result<(u64, f64)> {
        let dist = WeightDist::Uniform { lo: 0.05, hi: 1.0 };
        worst_ratio_random(
            100_000,
            |i| {
                let seed = derive_seed(0x3a9c, i);
                let n = 1 + (derive_seed(seed, 1) % 8) as usize;
                let steps = 1 + (derive_seed(seed, 2) % 8) as usize;
                let inst =
                    random_instance(Flavor::DynamicQueue, n, steps, &dist, seed, true)?;
                debug_assert!(inst.validate()?.nondecreasing_weights);
                Ok(inst)
            },
            "mark-and-pick",
        )
    };
    match run() {
        Ok((count, worst)) => CriterionResult {
            id: 6,
            name: "mark-and-pick-phi",
            claim: format!("worst ratio <= {bound:.12}"),
            measured: format!("worst {worst:.12}"),
            pass: worst <= bound,
            details: format!("{count} random monotone instances"),
        },
        Err(e) => fail(6, "mark-and-pick-phi", e),
    }
}

/// Criterion 7: the E table obeys both closed-form bounds, UniRand matches
/// E(30,30) against the random take-and-delete process, and n/E(n,n) stays
/// below e/(e-1).
pub fn criterion_7() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let table = e_table(50);
        let bounds_ok = check_e_bounds(&table);
        // n/E(n,n) < e/(e-1)  <=>  e_hi (n - E) < n with outward rounding;
        // E(n,n)/n >= 1 - (1-1/n)^n is the exact lower bound of the table
        // check specialized to a = p = n.
        let (_, e_hi) = e_enclosure();
        let mut ladder_ok = true;
        for n in 1..=50usize {
            let e_nn = table.get(n, n);
            let n_rat = BigRational::from_integer(n.into());
            let gap = &n_rat - e_nn;
            if &e_hi * gap >= n_rat {
                ladder_ok = false;
            }
            let mut pow = BigRational::one();
            let ratio = BigRational::new((n as i64 - 1).into(), (n as i64).into());
            for _ in 0..n {
                pow *= &ratio;
            }
            if e_nn / BigRational::from_integer(n.into())
                < BigRational::one() - pow
            {
                ladder_ok = false;
            }
        }
        let est = yao_uniform_process(&mut UniRand, 30, 100_000, 0x9a00)?;
        let exact = table.get_f64(30, 30);
        let diff = (est.mean - exact).abs();
        let yao_ok = diff <= 3.0 * est.stderr;
        Ok((
            bounds_ok && ladder_ok && yao_ok,
            format!(
                "bounds {bounds_ok}, ladder {ladder_ok}, yao mean {:.5} vs exact {:.5} (3sigma {:.5})",
                est.mean,
                exact,
                3.0 * est.stderr
            ),
        ))
    };
    match run() {
        Ok((pass, measured)) => CriterionResult {
            id: 7,
            name: "uniform-decremental-e-table",
            claim: "e_table(50) within both bounds; UniRand within 3 sigma of E(30,30); \
                    n/E(n,n) < e/(e-1) for n <= 50"
                .into(),
            measured,
            pass,
            details: String::new(),
        },
        Err(e) => fail(7, "uniform-decremental-e-table", e),
    }
}

/// Criterion 8: the strategy lemma suite is counterexample-free at
/// a_max = 5 and the natural strategy reproduces the E table exactly.
pub fn criterion_8() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let report = verify_strategy_lemmas(5)?;
        let table = e_table(8);
        let mut natural_ok = true;
        for a in 1..=8usize {
            if &expected_gain(&Strategy::natural(a), a, a)? != table.get(a, a) {
                natural_ok = false;
            }
        }
        Ok((
            report.ok() && natural_ok,
            format!(
                "{} strategies, {} monotone, {} inversion, {} k-strategy checks, {} counterexamples; natural==table {}",
                report.strategies_checked,
                report.monotone_pairs,
                report.inversion_pairs,
                report.k_strategy_pairs,
                report.counterexamples.len(),
                natural_ok
            ),
        ))
    };
    match run() {
        Ok((pass, measured)) => CriterionResult {
            id: 8,
            name: "strategy-lemma-suite",
            claim: "zero counterexamples at a_max = 5; (td)^a equals E(a,a) for a <= 8".into(),
            measured,
            pass,
            details: String::new(),
        },
        Err(e) => fail(8, "strategy-lemma-suite", e),
    }
}

/// Literal recursive definition, kept independent of the library path.
fn dom_recursive(x: &[f64], y: &[f64]) -> bool {
    // slices descending
    if y.is_empty() {
        return true;
    }
    if x.is_empty() || x[0] < y[0] {
        return false;
    }
    dom_recursive(&x[1..], &y[1..])
}

/// Value-nondecreasing injection existence via augmenting paths.
fn dom_injection(x: &[f64], y: &[f64]) -> bool {
    let mut matched: Vec<Option<usize>> = vec![None; x.len()];
    fn assign(
        yi: usize,
        y: &[f64],
        x: &[f64],
        seen: &mut [bool],
        matched: &mut [Option<usize>],
    ) -> bool {
        for (xi, &xv) in x.iter().enumerate() {
            if seen[xi] || xv < y[yi] {
                continue;
            }
            seen[xi] = true;
            let free = match matched[xi] {
                None => true,
                Some(other) => assign(other, y, x, seen, matched),
            };
            if free {
                matched[xi] = Some(yi);
                return true;
            }
        }
        false
    }
    for yi in 0..y.len() {
        let mut seen = vec![false; x.len()];
        if !assign(yi, y, x, &mut seen, &mut matched) {
            return false;
        }
    }
    true
}

fn subset_values(mask: u32) -> Vec<f64> {
    let mut v: Vec<f64> = (0..6)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| (i + 1) as f64)
        .collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Criterion 9: the three dominance characterizations agree on every
/// ordered subset pair of {1..6}, and the update lemma holds exhaustively.
pub fn criterion_9() -> CriterionResult {
    let mut agree = true;
    let mut updates = true;
    let mut pairs = 0u64;
    let mut update_checks = 0u64;
    for xm in 0u32..64 {
        for ym in 0u32..64 {
            pairs += 1;
            let xv = subset_values(xm);
            let yv = subset_values(ym);
            let x = DominanceSet::new(xv.clone());
            let y = DominanceSet::new(yv.clone());
            let via_lib = dominates(&x, &y, 1.0);
            let via_rec = dom_recursive(&xv, &yv);
            let via_inj = dom_injection(&xv, &yv);
            // sharp characterization: check at every value of either set.
            let via_sharp = xv
                .iter()
                .chain(yv.iter())
                .all(|&u| sharp(u, &x) >= sharp(u, &y));
            if via_lib != via_rec || via_lib != via_inj || via_lib != via_sharp {
                agree = false;
            }
            if !via_lib || ym == 0 {
                continue;
            }
            // Update lemma, given X >= Y != empty.
            update_checks += 1;
            let drop_min = |v: &[f64]| -> Vec<f64> {
                let mut v = v.to_vec();
                v.pop();
                v
            };
            if !dom_recursive(&drop_min(&xv), &drop_min(&yv)) {
                updates = false;
            }
            for &shared in xv.iter().filter(|v| yv.contains(v)) {
                let rm = |v: &[f64]| -> Vec<f64> {
                    v.iter().copied().filter(|&w| w != shared).collect()
                };
                if !dom_recursive(&rm(&xv), &rm(&yv)) {
                    updates = false;
                }
            }
            for y_new in 1..=6 {
                let yf = y_new as f64;
                if yv.contains(&yf) {
                    continue;
                }
                for x_new in 1..=6 {
                    let xf = x_new as f64;
                    if xv.contains(&xf) {
                        continue;
                    }
                    let max_below: Option<f64> = (1..=6)
                        .map(|z| z as f64)
                        .filter(|z| !xv.contains(z) && *z <= yf)
                        .fold(None, |m, z| Some(m.map_or(z, |mv: f64| mv.max(z))));
                    let eligible = xf >= yf || Some(xf) == max_below;
                    if !eligible {
                        continue;
                    }
                    let mut x2 = xv.clone();
                    x2.push(xf);
                    x2.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    let mut y2 = yv.clone();
                    y2.push(yf);
                    y2.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    if !dom_recursive(&x2, &y2) {
                        updates = false;
                    }
                }
            }
        }
    }
    CriterionResult {
        id: 9,
        name: "dominance-suite",
        claim: "three characterizations agree on all subset pairs of {1..6}; update rules hold"
            .into(),
        measured: format!("agreement {agree}, updates {updates}"),
        pass: agree && updates,
        details: format!("{pairs} ordered pairs, {update_checks} dominated pairs updated"),
    }
}

/// Criterion 10: the randomized queue bound's mixture is a distribution,
/// R(1) = 4/3 exactly, R is monotone, R(10^6) approaches e/(e-1), and the
/// pressure ratio never falls below R(n).
pub fn criterion_10() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let (_, _, r1, v1) = randomized_queue_bound_exact(1)?;
        let exact_ok = r1 == BigRational::new(4.into(), 3.into())
            && v1.iter().sum::<BigRational>() == BigRational::one();
        let mut monotone_ok = true;
        let mut sums_ok = true;
        let mut prev = 0.0;
        for n in 1..=100usize {
            let b = randomized_queue_bound(n);
            let sum: f64 = b.v.iter().sum();
            sums_ok &= (sum - 1.0).abs() <= tolerances::DIST_SLACK
                && b.v.iter().all(|&v| v >= 0.0);
            monotone_ok &= b.r >= prev - 1e-15;
            prev = b.r;
        }
        let big = randomized_queue_bound(1_000_000);
        let limit = algorithms::e_over_e_minus_1();
        let limit_ok = (big.r - limit).abs() < tolerances::LIMIT_SLACK;

        let n = 20usize;
        let floor = randomized_queue_bound(n).r - tolerances::DIST_SLACK;
        let mut pressure_ok = true;
        let mut min_pressure = f64::INFINITY;
        let mut rng = whacamole_core::sim::rng_from_seed(0x10aa);
        use rand::Rng;
        for trial in 0..1000 {
            let q: Vec<f64> = if trial <= n {
                // Point masses first, then random mixtures.
                (0..=n).map(|j| if j == trial { 1.0 } else { 0.0 }).collect()
            } else {
                let raw: Vec<f64> = (0..=n).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
                let total: f64 = raw.iter().sum();
                raw.iter().map(|r| r / total).collect()
            };
            let (_, ratio) = lb_randomized_queue_pressure(&q, n)?;
            min_pressure = min_pressure.min(ratio);
            pressure_ok &= ratio >= floor;
        }
        Ok((
            exact_ok && monotone_ok && sums_ok && limit_ok && pressure_ok,
            format!(
                "R(1)=4/3 {exact_ok}, monotone {monotone_ok}, sums {sums_ok}, R(1e6)={:.7} (limit {:.7}), min pressure {:.9} vs floor {:.9}",
                big.r, limit, min_pressure, floor
            ),
        ))
    };
    match run() {
        Ok((pass, measured)) => CriterionResult {
            id: 10,
            name: "randomized-queue-bound",
            claim: "mixture sums to 1; R(1) = 4/3 exactly; R monotone; |R(1e6)-e/(e-1)| < 1e-5; \
                    pressure >= R(20)-1e-12 on 1000 vectors"
                .into(),
            measured,
            pass,
            details: String::new(),
        },
        Err(e) => fail(10, "randomized-queue-bound", e),
    }
}

/// Criterion 11: the matching optimum equals brute force on the exhaustive
/// families of criteria 1 and 4(a); sampled instances also exercise the
/// full schedule path.
pub fn criterion_11() -> CriterionResult {
    let check = |inst: &Instance, idx: u64| -> Result<bool> {
        let m = optimal_gain_value(inst)?;
        let bf = optimal_gain_bruteforce(inst)?;
        if m != bf {
            return Ok(false);
        }
        if idx % 5000 == 0 {
            let (g, schedule) = optimal_gain_matching(inst)?;
            if g != bf || gain(inst, &schedule)? != g {
                return Ok(false);
            }
            if inst.flavor.is_queue() && !whacamole_core::eef::check_eef(inst, &schedule)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let run = || -> Result<(u64, u64)> {
        let sets = families::dynamic_set_instances(4, 4, vec![1.0, 2.0, 3.0]);
        let a = sets
            .enumerate()
            .par_bridge()
            .map(|(i, inst)| -> Result<(u64, u64)> {
                let ok = check(&inst, i as u64)?;
                Ok((1, ok as u64))
            })
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
        let queues =
            families::decremental_queue_instances(6, 6, tolerances::DECQUE_GRID.to_vec());
        let b = queues
            .enumerate()
            .par_bridge()
            .map(|(i, inst)| -> Result<(u64, u64)> {
                let ok = check(&inst, i as u64)?;
                Ok((1, ok as u64))
            })
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
        Ok((a.0 + b.0, a.1 + b.1))
    };
    match run() {
        Ok((total, ok)) => CriterionResult {
            id: 11,
            name: "matching-equals-bruteforce",
            claim: "optimal_gain_matching == optimal_gain_bruteforce exactly".into(),
            measured: format!("{ok}/{total} instances agree"),
            pass: total == ok,
            details: String::new(),
        },
        Err(e) => fail(11, "matching-equals-bruteforce", e),
    }
}

/// Criterion 12: the memoryless queue game against Greedy at n = 100,
/// T = 10^6 sits within 1e-2 of ratio 2 and matches the closed form.
pub fn criterion_12() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let (n, t) = (100usize, 1_000_000usize);
        let r = lb_memoryless_queue_game(&mut Greedy, n, t)?;
        let k = r.probed_index.unwrap_or(usize::MAX);
        let nf = n as f64;
        let tf = t as f64;
        let closed = tf * (2.0 + (2.0 * k as f64 - 1.0) / nf)
            / (tf * (1.0 + k as f64 / nf) + 2.0 * (nf + 1.0));
        let reported = r.closed_form_ratio.unwrap_or(f64::NAN);
        let ok = k == n
            && (r.ratio - 2.0).abs() <= tolerances::MEMORYLESS_SLACK
            && (closed - 2.0).abs() <= tolerances::MEMORYLESS_SLACK
            && (reported - closed).abs() <= 1e-15;
        Ok((
            ok,
            format!("k={k}, realized {:.6}, closed form {closed:.6}", r.ratio),
        ))
    };
    match run() {
        Ok((pass, measured)) => CriterionResult {
            id: 12,
            name: "memoryless-queue-lb",
            claim: "k = n = 100; realized and closed-form ratios within 1e-2 of 2".into(),
            measured,
            pass,
            details: String::new(),
        },
        Err(e) => fail(12, "memoryless-queue-lb", e),
    }
}

fn fail(id: usize, name: &'static str, e: whacamole_core::Error) -> CriterionResult {
    CriterionResult {
        id,
        name,
        claim: String::new(),
        measured: format!("error: {e}"),
        pass: false,
        details: String::new(),
    }
}

pub fn run_criterion(id: usize) -> Option<CriterionResult> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(),
        _ => return None,
    })
}

/// Runs every acceptance criterion (or the selected subset).
pub fn verify_all(only: Option<&[usize]>) -> Vec<CriterionResult> {
    let ids: Vec<usize> = match only {
        Some(ids) => ids.to_vec(),
        None => (1..=12).collect(),
    };
    ids.into_iter().filter_map(run_criterion).collect()
}

// Used by criterion 8's guard; referenced here so the mutation check in
// verify's docs stays honest.
#[allow(dead_code)]
fn decque_with_perturbed_beta() -> DecQueEFH {
    let mut p = algorithms::DecQueEFHParams::default();
    p.beta = 0.5;
    DecQueEFH::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass() {
        for id in [2, 8, 9] {
            let r = run_criterion(id).unwrap();
            assert!(r.pass, "{}", r.line());
        }
    }

    #[test]
    fn perturbed_decque_beta_breaks_the_bound() {
        // Sanity for the verify gate: with beta forced to 0.5 the stage
        // machine accepts items in [0.5, 0.5757) w_h that the real
        // parameterization rejects, and some instance exceeds
        // 2(sqrt(13)-1)/3. The grid needs a value inside that window.
        let bound = tolerances::decque_ratio() + tolerances::RATIO_SLACK;
        let grid = vec![0.25, 0.53125, 0.78125, 1.0];
        let mut worst = f64::NEG_INFINITY;
        let mut worst_good = f64::NEG_INFINITY;
        for inst in families::decremental_queue_instances(4, 4, grid) {
            let mut alg = decque_with_perturbed_beta();
            let (_, g) = simulate(&inst, &mut alg, 0).unwrap();
            let opt = optimal_gain_value(&inst).unwrap();
            worst = worst.max(whacamole_core::adversaries::ratio_of(opt, g));
            let mut good = DecQueEFH::default();
            let (_, g) = simulate(&inst, &mut good, 0).unwrap();
            worst_good = worst_good.max(whacamole_core::adversaries::ratio_of(opt, g));
        }
        assert!(
            worst > bound,
            "perturbed beta should break the bound, got {worst}"
        );
        assert!(
            worst_good <= bound,
            "the real parameters must hold on the same family, got {worst_good}"
        );
    }
}
