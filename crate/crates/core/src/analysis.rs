//! Exact combinatorial analysis of the uniform decremental game and the
//! queue lower-bound constructions: the E(a,p) recurrence in exact
//! rationals, {t,d}* adversary strategy evaluation, the set-dominance
//! relation, the deterministic-queue lower-bound system, and the
//! randomized-queue bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------------------
// E(a,p): expected number of items a deterministic always-collecting
// algorithm gets in the uniform take-and-delete process, with a active and
// p pending.

#[derive(Clone, Debug)]
pub struct ETable {
    pub a_max: usize,
    /// e[a][p] for 0 <= p <= a <= a_max.
    e: Vec<Vec<BigRational>>,
}

impl ETable {
    pub fn get(&self, a: usize, p: usize) -> &BigRational {
        &self.e[a][p]
    }

    pub fn get_f64(&self, a: usize, p: usize) -> f64 {
        self.e[a][p].to_f64().expect("table entries are finite")
    }
}

/// E(a,0) = 0, E(a,1) = 1, and for p >= 2:
/// E(a,p) = ((a-p+1)/a) E(a-1,p-1) + ((p-1)/a) E(a-1,p-2) + 1.
pub fn e_table(a_max: usize) -> ETable {
    assert!(a_max >= 1);
    let mut e: Vec<Vec<BigRational>> = Vec::with_capacity(a_max + 1);
    e.push(vec![BigRational::zero()]);
    for a in 1..=a_max {
        let mut row = Vec::with_capacity(a + 1);
        row.push(BigRational::zero());
        row.push(BigRational::one());
        for p in 2..=a {
            let a_r = rat(a as i64, 1);
            let val = rat((a - p + 1) as i64, 1) / &a_r * &e[a - 1][p - 1]
                + rat((p - 1) as i64, 1) / &a_r * &e[a - 1][p - 2]
                + BigRational::one();
            row.push(val);
        }
        e.push(row);
    }
    ETable { a_max, e }
}

/// Truncated Taylor sum of exp(x) for rational x >= 0; a lower bound on
/// exp(x), so 1/taylor is an upper bound on exp(-x).
fn exp_taylor_lower(x: &BigRational, terms: u32) -> BigRational {
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    for k in 1..=terms {
        term = term * x / rat(k as i64, 1);
        sum += &term;
    }
    sum
}

/// Checks a(1-(1-1/a)^p) <= E(a,p) <= (a+1)(1-e^{-p/a}) + 1 for all table
/// entries. The lower bound is evaluated exactly; the upper bound uses an
/// outward-rounded rational bound on e^{-p/a}.
pub fn check_e_bounds(table: &ETable) -> bool {
    for a in 1..=table.a_max {
        for p in 0..=a {
            let e = table.get(a, p);
            let ratio = rat((a - 1) as i64, a as i64);
            let mut pow = BigRational::one();
            for _ in 0..p {
                pow *= &ratio;
            }
            let lower = rat(a as i64, 1) * (BigRational::one() - pow);
            if e < &lower {
                return false;
            }
            // exp(-p/a) <= 1/taylor(p/a), so the true upper bound is at
            // least (a+1)(1 - 1/taylor) + 1.
            let x = rat(p as i64, a as i64);
            let taylor = exp_taylor_lower(&x, 30);
            let upper_lower_bound = rat((a + 1) as i64, 1)
                * (BigRational::one() - BigRational::one() / taylor)
                + BigRational::one();
            if e > &upper_lower_bound {
                return false;
            }
        }
    }
    true
}

/// Rational interval [lo, hi] enclosing Euler's number.
pub fn e_enclosure() -> (BigRational, BigRational) {
    let terms = 30u32;
    let lo = exp_taylor_lower(&BigRational::one(), terms);
    let mut fact = BigInt::one();
    for k in 1..=(terms + 1) {
        fact *= BigInt::from(k);
    }
    let hi = &lo + BigRational::new(BigInt::from(3), fact);
    (lo, hi)
}

// ---------------------------------------------------------------------------
// Adversary strategies over elementary steps: t = both players collect one
// item, d = the adversary deletes one item.

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ElemOp {
    Take,
    Delete,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Strategy(pub Vec<ElemOp>);

impl Strategy {
    pub fn parse(word: &str) -> Result<Strategy> {
        let mut ops = Vec::with_capacity(word.len());
        for ch in word.chars() {
            match ch {
                't' => ops.push(ElemOp::Take),
                'd' => ops.push(ElemOp::Delete),
                other => {
                    return Err(Error::Infeasible(format!(
                        "strategy letter {other:?} (want t or d)"
                    )))
                }
            }
        }
        Ok(Strategy(ops))
    }

    pub fn word(&self) -> String {
        self.0
            .iter()
            .map(|op| match op {
                ElemOp::Take => 't',
                ElemOp::Delete => 'd',
            })
            .collect()
    }

    /// Repeats of "td", the natural k-strategy.
    pub fn natural(k: usize) -> Strategy {
        let mut ops = Vec::with_capacity(2 * k);
        for _ in 0..k {
            ops.push(ElemOp::Take);
            ops.push(ElemOp::Delete);
        }
        Strategy(ops)
    }

    pub fn take_count(&self) -> usize {
        self.0.iter().filter(|&&op| op == ElemOp::Take).count()
    }

    pub fn delete_count(&self) -> usize {
        self.0.len() - self.take_count()
    }

    /// Feasible for a active items: exactly a deletes, and no suffix has
    /// more takes than deletes.
    pub fn feasible_for(&self, a: usize) -> bool {
        if self.delete_count() != a {
            return false;
        }
        let mut takes = 0usize;
        let mut deletes = 0usize;
        for op in self.0.iter().rev() {
            match op {
                ElemOp::Take => takes += 1,
                ElemOp::Delete => deletes += 1,
            }
            if takes > deletes {
                return false;
            }
        }
        true
    }
}

/// Exact E_{a,p}[S]: expected gain of a uniformly-pending always-collecting
/// algorithm from configuration (a, p) against strategy S. A take collects
/// one pending item if any; a delete removes a uniformly-positioned active
/// item (pending with probability p/a).
///
/// Only the delete count must match a (each delete then sees a nonempty
/// set); words violating the suffix condition are still evaluable, they
/// just do not correspond to realizable adversary gains.
pub fn expected_gain(s: &Strategy, a: usize, p: usize) -> Result<BigRational> {
    if a > 12 {
        return Err(Error::TooLarge(format!("a = {a} exceeds the a <= 12 guard")));
    }
    if p > a {
        return Err(Error::Infeasible(format!("p = {p} pending among a = {a} active")));
    }
    if s.delete_count() != a {
        return Err(Error::Infeasible(format!(
            "{:?} has {} deletes for a = {a}",
            s.word(),
            s.delete_count()
        )));
    }
    // probs[q] = probability that q items are pending.
    let mut probs = vec![BigRational::zero(); p + 1];
    probs[p] = BigRational::one();
    let mut active = a;
    let mut gain = BigRational::zero();
    for op in &s.0 {
        match op {
            ElemOp::Take => {
                for q in 1..probs.len() {
                    let moved = std::mem::replace(&mut probs[q], BigRational::zero());
                    gain += &moved;
                    probs[q - 1] += moved;
                }
            }
            ElemOp::Delete => {
                let a_r = rat(active as i64, 1);
                let mut next = vec![BigRational::zero(); probs.len()];
                for q in 0..probs.len() {
                    if probs[q].is_zero() {
                        continue;
                    }
                    let hit = rat(q as i64, 1) / &a_r;
                    if q > 0 {
                        next[q - 1] += &probs[q] * &hit;
                    }
                    next[q] += &probs[q] * (BigRational::one() - hit);
                }
                probs = next;
                active -= 1;
            }
        }
    }
    Ok(gain)
}

/// All feasible strategy words for a active items.
pub fn feasible_strategies(a: usize) -> Vec<Strategy> {
    let mut out = Vec::new();
    let mut word = Vec::new();
    // Build from the right so the suffix condition is a running check.
    fn extend(word: &mut Vec<ElemOp>, takes: usize, deletes: usize, a: usize, out: &mut Vec<Strategy>) {
        if deletes == a {
            if takes <= deletes {
                let mut ops = word.clone();
                ops.reverse();
                out.push(Strategy(ops));
            }
            if takes >= a {
                return;
            }
        }
        if deletes < a {
            word.push(ElemOp::Delete);
            extend(word, takes, deletes + 1, a, out);
            word.pop();
        }
        if takes < deletes && takes < a {
            word.push(ElemOp::Take);
            extend(word, takes + 1, deletes, a, out);
            word.pop();
        }
    }
    // Right-to-left: every suffix (= prefix of the reversed word) must keep
    // takes <= deletes, hence the takes < deletes guard before pushing Take.
    extend(&mut word, 0, 0, a, &mut out);
    out
}

#[derive(Clone, Debug, Default)]
pub struct StrategyLemmaReport {
    pub strategies_checked: usize,
    pub monotone_pairs: usize,
    pub inversion_pairs: usize,
    pub k_strategy_pairs: usize,
    pub counterexamples: Vec<String>,
}

impl StrategyLemmaReport {
    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Exhaustive check of the three strategy lemmas up to a_max: E is
/// monotone in p, swapping "td" to "dt" never helps the adversary, and
/// every k-strategy from (a,a) gains at least E_{k,k}[(td)^k].
pub fn verify_strategy_lemmas(a_max: usize) -> Result<StrategyLemmaReport> {
    if a_max > 6 {
        return Err(Error::TooLarge(format!("a_max = {a_max} exceeds the a_max <= 6 guard")));
    }
    let mut report = StrategyLemmaReport::default();
    for a in 1..=a_max {
        let strategies = feasible_strategies(a);
        report.strategies_checked += strategies.len();
        for s in &strategies {
            let gains: Vec<BigRational> = (0..=a)
                .map(|p| expected_gain(s, a, p).expect("feasible"))
                .collect();
            for p in 0..a {
                report.monotone_pairs += 1;
                if gains[p + 1] < gains[p] {
                    report.counterexamples.push(format!(
                        "monotone: E_{{{a},{}}}[{}] < E_{{{a},{}}}[{}]",
                        p + 1,
                        s.word(),
                        p,
                        s.word()
                    ));
                }
            }
            for i in 0..s.0.len().saturating_sub(1) {
                if s.0[i] == ElemOp::Take && s.0[i + 1] == ElemOp::Delete {
                    let mut swapped = s.clone();
                    swapped.0.swap(i, i + 1);
                    if !swapped.feasible_for(a) {
                        continue;
                    }
                    for p in 0..=a {
                        report.inversion_pairs += 1;
                        let other = expected_gain(&swapped, a, p).expect("feasible");
                        if gains[p] < other {
                            report.counterexamples.push(format!(
                                "td-inversion: E_{{{a},{p}}}[{}] < E_{{{a},{p}}}[{}]",
                                s.word(),
                                swapped.word()
                            ));
                        }
                    }
                }
            }
            let k = s.take_count();
            let natural = expected_gain(&Strategy::natural(k), k, k).expect("natural feasible");
            report.k_strategy_pairs += 1;
            if gains[a] < natural {
                report.counterexamples.push(format!(
                    "k-strategy: E_{{{a},{a}}}[{}] < E_{{{k},{k}}}[(td)^{k}]",
                    s.word()
                ));
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Set dominance: X dominates Y when Y is empty, or max X >= max Y and the
// remainders dominate. Values within a set are distinct.

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceSet {
    /// Strictly descending.
    values: Vec<f64>,
}

impl DominanceSet {
    pub fn new(mut values: Vec<f64>) -> DominanceSet {
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite values"));
        values.dedup();
        DominanceSet { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Recursive definition of X >= scale*Y.
pub fn dominates(x: &DominanceSet, y: &DominanceSet, scale: f64) -> bool {
    let xs = &x.values;
    let ys = &y.values;
    // Walk both descending lists; each y needs its own x >= scale*y.
    if ys.len() > xs.len() {
        return false;
    }
    for (xv, yv) in xs.iter().zip(ys.iter()) {
        if *xv < scale * *yv {
            return false;
        }
    }
    true
}

/// Number of elements of T that are >= u.
pub fn sharp(u: f64, t: &DominanceSet) -> usize {
    t.values.iter().filter(|&&v| v >= u).count()
}

// ---------------------------------------------------------------------------
// Deterministic queue lower bound: the 2n-item sequence and the paper's
// inequality system, equalized and solved by bisection on R.

/// A solved lower-bound sequence: weights z_1 > z_2 > ... > z_{2n-2} >
/// z_{2n} (there is no item 2n-1), all below the unit item, ordered in the
/// queue as z_2, z_4, ..., z_{2n}, z_{2n-3}, ..., z_3, z_1, 1.
#[derive(Clone, Debug)]
pub struct LBSequence {
    pub n: usize,
    /// z_1, z_2, ..., z_{2n-2}, z_{2n} in index order (length 2n-1).
    pub z: Vec<f64>,
    pub r: f64,
}

impl LBSequence {
    /// Weight of z_i for i in 1..=2n (i = 2n-1 does not exist).
    pub fn z(&self, i: usize) -> f64 {
        assert!(i >= 1 && i != 2 * self.n - 1 && i <= 2 * self.n);
        if i == 2 * self.n {
            self.z[2 * self.n - 2]
        } else {
            self.z[i - 1]
        }
    }

    /// Item indices (1..=2n, skipping 2n-1) in queue order, lightest first
    /// among evens then odds descending, unit item last as index 0.
    pub fn queue_item_order(&self) -> Vec<usize> {
        let n = self.n;
        let mut order: Vec<usize> = (1..n).map(|i| 2 * i).collect();
        order.push(2 * n);
        for i in (1..=(n - 1)).rev() {
            order.push(2 * i - 1);
        }
        order.push(0); // the unit item
        order
    }

    pub fn weight_of(&self, idx: usize) -> f64 {
        if idx == 0 {
            1.0
        } else {
            self.z(idx)
        }
    }
}

/// Adversary gain of ending (1) at branch j: 1 + sum of the first 2j+1
/// z's; at j = n-1 the sum runs over every z item.
fn lb_rhs_odd(n: usize, z: &[f64], r: f64, j: usize) -> (f64, f64) {
    let alg: f64 = 1.0 + (1..=j).map(|i| z[2 * i - 2]).sum::<f64>();
    let adv: f64 = if j == n - 1 {
        1.0 + z.iter().sum::<f64>()
    } else {
        1.0 + z[..2 * j + 1].iter().sum::<f64>()
    };
    (r * alg, adv)
}

/// Ending (2) at branch j: the algorithm additionally holds z_{2j+2}
/// (z_{2n} at the last branch); the adversary takes the j+1 heaviest.
fn lb_rhs_even(n: usize, z: &[f64], r: f64, j: usize) -> (f64, f64) {
    let even = if j == n - 1 { z[2 * n - 2] } else { z[2 * j + 1] };
    let alg: f64 = even + (1..=j).map(|i| z[2 * i - 2]).sum::<f64>();
    let adv: f64 = 1.0 + z[..j].iter().sum::<f64>();
    (r * alg, adv)
}

/// Back-substitutes the equalized system for a trial R, returning the z
/// vector and the closure residual of the final odd equation.
fn lb_backsolve(n: usize, r: f64) -> (Vec<f64>, f64) {
    let mut z = vec![0.0f64; 2 * n - 1];
    // Odd equation at j gives z_{2j+1}; even equation at j gives z_{2j+2}.
    z[0] = r - 1.0; // j = 0 odd: R*1 = 1 + z_1
    z[1] = 1.0 / r; // j = 0 even: R*z_2 = 1
    for j in 1..n {
        if j < n - 1 {
            // R*(1 + sum odd z) = 1 + z_1 + ... + z_{2j+1}
            let alg: f64 = 1.0 + (1..=j).map(|i| z[2 * i - 2]).sum::<f64>();
            let rest: f64 = z[..2 * j].iter().sum();
            z[2 * j] = r * alg - 1.0 - rest;
        }
        // R*(z_{2j+2} + sum odd z) = 1 + z_1 + ... + z_j
        let odd_sum: f64 = (1..=j).map(|i| z[2 * i - 2]).sum();
        let adv: f64 = 1.0 + z[..j].iter().sum::<f64>();
        let even = adv / r - odd_sum;
        if j == n - 1 {
            z[2 * n - 2] = even; // z_{2n}
        } else {
            z[2 * j + 1] = even;
        }
    }
    let (lhs, rhs) = lb_rhs_odd(n, &z, r, n - 1);
    (z, rhs - lhs)
}

/// Solves the equalized lower-bound system for n branches by sign-change
/// bisection on R. The returned sequence satisfies the orderings
/// 1 > z_1 > ... > z_{2n} > 0 (ties within 1e-12 are tolerated; n = 2
/// degenerates to z_1 = z_2 at R = phi).
pub fn solve_lb_sequence(n: usize) -> Result<LBSequence> {
    if !(2..=12).contains(&n) {
        return Err(Error::TooLarge(format!("n = {n} outside 2..=12")));
    }
    let f = |r: f64| lb_backsolve(n, r).1;
    // Bracket the root by scanning; the paper's constants all lie inside.
    let (mut lo, mut hi) = (1.55f64, 1.78f64);
    let mut bracket = None;
    let scan = 920;
    let mut prev = f(lo);
    for k in 1..=scan {
        let r = lo + (hi - lo) * k as f64 / scan as f64;
        let cur = f(r);
        if prev == 0.0 || prev * cur < 0.0 {
            bracket = Some((lo + (hi - lo) * (k - 1) as f64 / scan as f64, r));
            break;
        }
        prev = cur;
    }
    let (mut a, mut b) = bracket.ok_or_else(|| {
        Error::NoSolution(format!("no sign change for n = {n} in [1.55, 1.78]"))
    })?;
    let fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if (fa < 0.0) == (fm < 0.0) {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    lo = 0.5 * (a + b);
    let (z, residual) = lb_backsolve(n, lo);
    if residual.abs() > 1e-10 {
        return Err(Error::NoSolution(format!(
            "closure residual {residual} too large for n = {n}"
        )));
    }
    let seq = LBSequence { n, z, r: lo };
    if !check_lb_inequalities(&seq) {
        return Err(Error::NoSolution(format!(
            "solved sequence violates its own constraints for n = {n}"
        )));
    }
    hi = seq.r;
    let _ = hi;
    Ok(seq)
}

/// All 2n inequalities within 1e-9 slack, plus the ordering chain
/// 1 > z_1 > ... > z_{2n} > 0 (strictness within 1e-12).
pub fn check_lb_inequalities(seq: &LBSequence) -> bool {
    let n = seq.n;
    let z = &seq.z;
    if z.len() != 2 * n - 1 {
        return false;
    }
    let mut prev = 1.0f64;
    for &v in z.iter() {
        if v > prev + 1e-12 || v <= 0.0 {
            return false;
        }
        prev = v;
    }
    for j in 0..n {
        let (lhs, rhs) = lb_rhs_odd(n, z, seq.r, j);
        if lhs > rhs + 1e-9 {
            return false;
        }
        let (lhs, rhs) = lb_rhs_even(n, z, seq.r, j);
        if lhs > rhs + 1e-9 {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Randomized queue lower bound (adaptive adversary, memoryless algorithms).

#[derive(Clone, Debug)]
pub struct RandQueueBound {
    pub n: usize,
    /// Geometric base a = 1 + 1/n.
    pub a: f64,
    /// Normalizer M = a^{n+1} - n(a-1).
    pub m: f64,
    /// The forced ratio R = a^{n+1}/M.
    pub r: f64,
    /// Adversary mixture over strategies 0..=n.
    pub v: Vec<f64>,
}

/// Mixture weights v_k = a^{n-k}(a-1)/M for k < n and v_n = (a-n(a-1))/M,
/// with M = a^{n+1} - n(a-1); the mixture forces ratio R = a^{n+1}/M.
pub fn randomized_queue_bound(n: usize) -> RandQueueBound {
    assert!(n >= 1);
    let nf = n as f64;
    let a = 1.0 + 1.0 / nf;
    let apow = a.powi(n as i32 + 1);
    let m = apow - nf * (a - 1.0);
    let mut v = Vec::with_capacity(n + 1);
    for k in 0..n {
        v.push(a.powi((n - k) as i32) * (a - 1.0) / m);
    }
    v.push((a - nf * (a - 1.0)) / m);
    RandQueueBound {
        n,
        a,
        m,
        r: apow / m,
        v,
    }
}

/// Exact-rational version for small n (R(1) = 4/3 exactly, and the mixture
/// sums to one identically).
pub fn randomized_queue_bound_exact(
    n: usize,
) -> Result<(BigRational, BigRational, BigRational, Vec<BigRational>)> {
    if n == 0 || n > 200 {
        return Err(Error::TooLarge(format!("n = {n} outside 1..=200")));
    }
    let a = rat((n + 1) as i64, n as i64);
    let mut apow = BigRational::one();
    for _ in 0..=n {
        apow *= &a;
    }
    let amin1 = &a - BigRational::one();
    let m = &apow - rat(n as i64, 1) * &amin1;
    let r = &apow / &m;
    let mut v = Vec::with_capacity(n + 1);
    for k in 0..n {
        let mut p = BigRational::one();
        for _ in 0..(n - k) {
            p *= &a;
        }
        v.push(p * &amin1 / &m);
    }
    v.push((&a - rat(n as i64, 1) * &amin1) / &m);
    Ok((a, m, r, v))
}

/// Best adversary strategy index against a memoryless pick distribution q
/// over the pending ladder a^0..a^n: maximizes
/// (a^k + sum_{j>k} q_j a^j) / (sum_j q_j a^j).
pub fn lb_randomized_queue_pressure(q: &[f64], n: usize) -> Result<(usize, f64)> {
    if q.len() != n + 1 {
        return Err(Error::BadDistribution(format!(
            "expected {} entries, got {}",
            n + 1,
            q.len()
        )));
    }
    if q.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::BadDistribution("negative entry".into()));
    }
    let total: f64 = q.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::BadDistribution(format!("sums to {total}")));
    }
    let a = 1.0 + 1.0 / n as f64;
    let pow: Vec<f64> = (0..=n).map(|j| a.powi(j as i32)).collect();
    let denom: f64 = (0..=n).map(|j| q[j] * pow[j]).sum();
    let mut best = (0usize, f64::NEG_INFINITY);
    for k in 0..=n {
        let tail: f64 = (k + 1..=n).map(|j| q[j] * pow[j]).sum();
        let ratio = (pow[k] + tail) / denom;
        if ratio > best.1 {
            best = (k, ratio);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e_table_small_entries() {
        let t = e_table(3);
        assert_eq!(t.get(1, 1), &rat(1, 1));
        assert_eq!(t.get(2, 2), &rat(3, 2));
        assert_eq!(t.get(3, 3), &rat(13, 6));
        assert_eq!(t.get(3, 2), &rat(5, 3));
    }

    #[test]
    fn e_bounds_hold_for_small_table() {
        assert!(check_e_bounds(&e_table(12)));
    }

    #[test]
    fn e_bounds_spot_check_a3() {
        // 19/9 <= 13/6 <= 4(1 - 1/e) + 1.
        let t = e_table(3);
        let lower = rat(19, 9);
        assert!(t.get(3, 3) >= &lower);
        let num = t.get_f64(3, 3);
        assert!(num <= 4.0 * (1.0 - (-1.0f64).exp()) + 1.0);
    }

    #[test]
    fn delete_only_strategy_gains_nothing() {
        for a in 1..=5 {
            for p in 0..=a {
                let s = Strategy(vec![ElemOp::Delete; a]);
                assert!(expected_gain(&s, a, p).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn natural_strategy_matches_table() {
        let t = e_table(8);
        for a in 1..=8 {
            for p in 0..=a {
                let s = Strategy::natural(a);
                assert_eq!(&expected_gain(&s, a, p).unwrap(), t.get(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn td_beats_dt_on_two_items() {
        // dttd violates the suffix condition but stays evaluable; the
        // inversion inequality holds regardless.
        let td = Strategy::parse("tdtd").unwrap();
        let dt = Strategy::parse("dttd").unwrap();
        let a = expected_gain(&td, 2, 2).unwrap();
        let b = expected_gain(&dt, 2, 2).unwrap();
        assert_eq!(a, rat(3, 2));
        assert_eq!(b, rat(1, 1));
        assert!(a >= b);
    }

    #[test]
    fn lemma_suite_small_is_clean() {
        let report = verify_strategy_lemmas(3).unwrap();
        assert!(report.ok(), "{:?}", report.counterexamples);
        assert!(report.strategies_checked > 0);
    }

    #[test]
    fn k_strategies_dominate_natural_on_three() {
        let base = expected_gain(&Strategy::natural(2), 2, 2).unwrap();
        for s in feasible_strategies(3) {
            if s.take_count() == 2 {
                assert!(expected_gain(&s, 3, 3).unwrap() >= base, "{}", s.word());
            }
        }
    }

    #[test]
    fn infeasible_words_are_rejected() {
        // Wrong delete count: not evaluable at all.
        let s = Strategy::parse("td").unwrap();
        assert!(expected_gain(&s, 2, 1).is_err());
        // Suffix condition: dttd has a suffix with more takes than deletes.
        assert!(!Strategy::parse("dttd").unwrap().feasible_for(2));
        assert!(!Strategy::parse("tddt").unwrap().feasible_for(2));
        assert!(Strategy::parse("ttdd").unwrap().feasible_for(2));
    }

    #[test]
    fn dominance_examples() {
        let empty = DominanceSet::new(vec![]);
        let x = DominanceSet::new(vec![5.0, 3.0]);
        assert!(dominates(&x, &empty, 1.0));
        let y = DominanceSet::new(vec![4.0, 3.0]);
        assert!(dominates(&x, &y, 1.0));
        let x2 = DominanceSet::new(vec![5.0]);
        let y2 = DominanceSet::new(vec![3.0, 2.0]);
        assert!(!dominates(&x2, &y2, 1.0));
    }

    #[test]
    fn sharp_counts() {
        let t = DominanceSet::new(vec![1.0, 2.0]);
        assert_eq!(sharp(0.0, &t), 2);
        assert_eq!(sharp(3.0, &t), 0);
        let t = DominanceSet::new(vec![1.0, 2.0, 5.0]);
        assert_eq!(sharp(2.0, &t), 2);
    }

    #[test]
    fn lb_sequence_n3_matches_quintic_root() {
        let seq = solve_lb_sequence(3).unwrap();
        assert!(seq.r > 1.6328 && seq.r < 1.6330, "r = {}", seq.r);
        let x = seq.z(2);
        assert!(x > 0.6123 && x < 0.6124, "x = {x}");
        // x solves x^5 + x^4 + 5x^3 - x^2 - 1 = 0.
        let poly = x.powi(5) + x.powi(4) + 5.0 * x.powi(3) - x.powi(2) - 1.0;
        assert!(poly.abs() < 1e-9, "poly residual {poly}");
        assert!(check_lb_inequalities(&seq));
    }

    #[test]
    fn lb_sequence_n2_degenerates_to_phi() {
        let seq = solve_lb_sequence(2).unwrap();
        assert!((seq.r - crate::algorithms::PHI).abs() < 1e-9);
    }

    #[test]
    fn lb_sequence_rejects_tampering() {
        let mut seq = solve_lb_sequence(3).unwrap();
        seq.r += 1e-3;
        assert!(!check_lb_inequalities(&seq));
        let mut seq = solve_lb_sequence(3).unwrap();
        let last = seq.z.len() - 1;
        seq.z[last] = 0.0;
        assert!(!check_lb_inequalities(&seq));
    }

    #[test]
    fn randomized_queue_bound_n1() {
        let (a, m, r, v) = randomized_queue_bound_exact(1).unwrap();
        assert_eq!(a, rat(2, 1));
        assert_eq!(m, rat(3, 1));
        assert_eq!(r, rat(4, 3));
        assert_eq!(v, vec![rat(2, 3), rat(1, 3)]);
        let f = randomized_queue_bound(1);
        assert!((f.r - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn randomized_queue_bound_n10() {
        let b = randomized_queue_bound(10);
        assert!((b.r - 1.5396).abs() < 1e-4, "r = {}", b.r);
        let sum: f64 = b.v.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pressure_examples_n1() {
        let (k, r) = lb_randomized_queue_pressure(&[0.0, 1.0], 1).unwrap();
        assert_eq!(k, 0);
        assert!((r - 1.5).abs() < 1e-12);
        let (_, r) = lb_randomized_queue_pressure(&[0.5, 0.5], 1).unwrap();
        assert!((r - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pressure_rejects_bad_vectors() {
        assert!(lb_randomized_queue_pressure(&[0.5, 0.4], 1).is_err());
        assert!(lb_randomized_queue_pressure(&[1.5, -0.5], 1).is_err());
        assert!(lb_randomized_queue_pressure(&[1.0], 1).is_err());
    }

    #[test]
    fn e_enclosure_brackets_euler() {
        let (lo, hi) = e_enclosure();
        let e = std::f64::consts::E;
        assert!(lo.to_f64().unwrap() <= e && e <= hi.to_f64().unwrap());
        assert!((&hi - &lo).to_f64().unwrap() < 1e-20);
    }
}
