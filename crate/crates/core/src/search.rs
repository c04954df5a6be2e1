//! Exhaustive and heuristic search for Zimin avoidance: f(n,q), maximal
//! avoiders, minimal instances, and the closed-form bound evaluations.
//!
//! The exhaustive searches walk the q-ary prefix tree of avoiding words,
//! pruning as soon as an appended letter creates an encounter. Only suffixes
//! ending at the new letter need testing, and those tests run on bit-packed
//! words with a content-keyed memo, so verdicts survive backtracking.

use crate::packed::{Packed, ZiminCache, MAX_LEN};
use crate::words::Word;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

/// Outcome of an avoidance search.
#[derive(Clone, Debug, Serialize)]
pub struct AvoidanceResult {
    pub n: u32,
    pub q: u8,
    /// Exact f(n,q) when the tree was exhausted.
    pub f_value: Option<u64>,
    /// Length of the deepest avoider seen (= f-1 when exhaustive).
    pub max_avoider_len: u32,
    /// All avoiders of maximal length, lexicographically sorted, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_avoiders: Option<Vec<String>>,
    pub nodes_explored: u64,
    pub budget_exhausted: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Collect {
    Nothing,
    Deepest,
    Everything,
}

struct TreeSearch {
    n: u8,
    q: u8,
    budget: u64,
    nodes: AtomicU64,
    exhausted: AtomicBool,
    collect: Collect,
}

#[derive(Default)]
struct TaskOutcome {
    deepest: u32,
    at_deepest: Vec<Packed>,
    all: Vec<Packed>,
}

impl TaskOutcome {
    fn visit(&mut self, w: Packed, collect: Collect) {
        match collect {
            Collect::Nothing => {
                if w.len() > self.deepest {
                    self.deepest = w.len();
                }
            }
            Collect::Deepest => {
                if w.len() > self.deepest {
                    self.deepest = w.len();
                    self.at_deepest.clear();
                }
                if w.len() == self.deepest {
                    self.at_deepest.push(w);
                }
            }
            Collect::Everything => {
                if w.len() > self.deepest {
                    self.deepest = w.len();
                }
                self.all.push(w);
            }
        }
    }

    fn merge(mut self, other: TaskOutcome, collect: Collect) -> TaskOutcome {
        match collect {
            Collect::Deepest => {
                if other.deepest > self.deepest {
                    return other.merge(self, collect);
                }
                if other.deepest == self.deepest {
                    self.at_deepest.extend(other.at_deepest);
                }
            }
            _ => {
                self.deepest = self.deepest.max(other.deepest);
                self.all.extend(other.all);
            }
        }
        self
    }
}

impl TreeSearch {
    fn charge_node(&self) -> bool {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    /// Sequential DFS below `w` (which already avoids Z_n).
    fn dfs(&self, w: Packed, cache: &mut ZiminCache, out: &mut TaskOutcome, letters: &[u8]) {
        if w.len() as usize >= MAX_LEN {
            // Unreachable for the supported parameters; stop extending.
            return;
        }
        for &c in letters {
            let child = w.append(c);
            if !self.charge_node() {
                return;
            }
            if !cache.suffix_instance(child, self.n) {
                out.visit(child, self.collect);
                self.dfs(child, cache, out, letters);
            }
        }
    }
}

fn check_search_params(n: u32, q: u8) -> Result<()> {
    if n == 0 || q < 2 {
        return Err(Error::InvalidInput("search requires n >= 1 and q >= 2".into()));
    }
    if q > 8 {
        return Err(Error::InvalidInput(format!(
            "exhaustive search is limited to q <= 8 (got q = {q})"
        )));
    }
    Ok(())
}

fn run_tree_search(
    n: u32,
    q: u8,
    budget: u64,
    collect: Collect,
    symmetry_reduction: bool,
    split_depth: u32,
) -> (TaskOutcome, u64, bool) {
    let search = TreeSearch {
        n: n as u8,
        q,
        budget,
        nodes: AtomicU64::new(0),
        exhausted: AtomicBool::new(false),
        collect,
    };
    let letters: Vec<u8> = (0..q).collect();
    let first_letters: Vec<u8> = if symmetry_reduction { vec![0] } else { letters.clone() };

    // Phase 1: enumerate the avoiding prefix tree to the split depth.
    let mut frontier: Vec<Packed> = Vec::new();
    let mut out = TaskOutcome::default();
    out.visit(Packed::empty(), collect);
    let mut cache = ZiminCache::new();
    let mut stack = vec![Packed::empty()];
    while let Some(w) = stack.pop() {
        let avail = if w.is_empty() { &first_letters } else { &letters };
        for &c in avail {
            let child = w.append(c);
            if !search.charge_node() {
                break;
            }
            if !cache.suffix_instance(child, search.n) {
                out.visit(child, collect);
                if child.len() < split_depth {
                    stack.push(child);
                } else {
                    frontier.push(child);
                }
            }
        }
    }

    // Phase 2: independent subtree tasks, merged deterministically.
    let merged = frontier
        .into_par_iter()
        .map(|start| {
            let mut cache = ZiminCache::new();
            let mut out = TaskOutcome::default();
            search.dfs(start, &mut cache, &mut out, &letters);
            out
        })
        .reduce(TaskOutcome::default, |a, b| a.merge(b, collect));
    let out = out.merge(merged, collect);
    let nodes = search.nodes.load(Ordering::Relaxed).min(budget);
    let exhausted = search.exhausted.load(Ordering::Relaxed);
    (out, nodes, exhausted)
}

/// Computes f(n,q) by exhausting the prefix tree of Z_n-avoiding words:
/// f = (length of the deepest avoider) + 1. On budget exhaustion the result
/// only carries the deepest avoider seen, as a lower-bound witness.
pub fn compute_f(n: u32, q: u8, budget: u64) -> Result<AvoidanceResult> {
    check_search_params(n, q)?;
    let (out, nodes, exhausted) =
        run_tree_search(n, q, budget, Collect::Nothing, true, split_depth_default(q));
    Ok(AvoidanceResult {
        n,
        q,
        f_value: if exhausted { None } else { Some(out.deepest as u64 + 1) },
        max_avoider_len: out.deepest,
        max_avoiders: None,
        nodes_explored: nodes,
        budget_exhausted: exhausted,
    })
}

fn split_depth_default(q: u8) -> u32 {
    match q {
        2 => 8,
        3 => 6,
        _ => 4,
    }
}

/// All words of length f(n,q)-1 avoiding Z_n, lexicographically sorted.
pub fn enumerate_max_avoiders(n: u32, q: u8, budget: u64) -> Result<AvoidanceResult> {
    check_search_params(n, q)?;
    let (out, nodes, exhausted) =
        run_tree_search(n, q, budget, Collect::Deepest, false, split_depth_default(q));
    if exhausted {
        return Err(Error::BudgetExhausted(budget));
    }
    let mut words: Vec<Word> = out.at_deepest.iter().map(|p| p.to_word()).collect();
    words.sort();
    Ok(AvoidanceResult {
        n,
        q,
        f_value: Some(out.deepest as u64 + 1),
        max_avoider_len: out.deepest,
        max_avoiders: Some(words.iter().map(|w| w.to_string()).collect()),
        nodes_explored: nodes,
        budget_exhausted: false,
    })
}

/// Every Z_n-avoiding word over [q], including the empty word, sorted by
/// length then lexicographically. Finite precisely because Z_n is unavoidable.
pub fn enumerate_all_avoiders(n: u32, q: u8, budget: u64) -> Result<Vec<Word>> {
    check_search_params(n, q)?;
    let (out, _, exhausted) =
        run_tree_search(n, q, budget, Collect::Everything, false, split_depth_default(q));
    if exhausted {
        return Err(Error::BudgetExhausted(budget));
    }
    let mut words: Vec<Word> = out.all.iter().map(|p| p.to_word()).collect();
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(words)
}

/// Result of minimal-instance enumeration.
#[derive(Clone, Debug, Serialize)]
pub struct MinimalInstances {
    pub n: u32,
    pub q: u8,
    pub count: u64,
    pub words: Vec<String>,
    /// Set when the length cap cannot guarantee completeness.
    pub cap_warning: bool,
    pub nodes_explored: u64,
}

/// Enumerates the minimal Z_n-instances over [q]: instances none of whose
/// proper factors is an instance. Walks the avoiding prefix tree; a child
/// whose whole word is an instance while every proper suffix still avoids is
/// exactly a minimal instance (its maximal proper factors both avoid).
pub fn enumerate_minimal_instances(
    n: u32,
    q: u8,
    max_len: u32,
    budget: u64,
) -> Result<MinimalInstances> {
    check_search_params(n, q)?;
    if max_len as usize >= MAX_LEN {
        return Err(Error::InvalidInput(format!(
            "length cap {max_len} exceeds packed capacity {MAX_LEN}"
        )));
    }
    let nodes = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    let letters: Vec<u8> = (0..q).collect();
    let zn = n as u8;

    // Extends `w` (all proper factors avoid, w itself avoids) by one letter
    // and classifies the child.
    enum Class {
        Dead,
        Minimal,
        Avoiding,
    }
    let classify = |child: Packed, cache: &mut ZiminCache| -> Class {
        let min_len = (1u32 << zn) - 1;
        let len = child.len();
        // Proper suffixes first: any instance there kills the subtree.
        if len > min_len {
            for a in 1..=(len - min_len) {
                if cache.is_zimin_instance(child.sub(a, len), zn) {
                    return Class::Dead;
                }
            }
        }
        if len >= min_len && cache.is_zimin_instance(child, zn) {
            Class::Minimal
        } else {
            Class::Avoiding
        }
    };

    let split = split_depth_default(q).min(max_len);
    let mut minimal: Vec<Packed> = Vec::new();
    let mut frontier: Vec<Packed> = Vec::new();
    let mut cache = ZiminCache::new();
    let mut stack = vec![Packed::empty()];
    while let Some(w) = stack.pop() {
        for &c in &letters {
            let child = w.append(c);
            if nodes.fetch_add(1, Ordering::Relaxed) >= budget {
                exhausted.store(true, Ordering::Relaxed);
                break;
            }
            match classify(child, &mut cache) {
                Class::Dead => {}
                Class::Minimal => minimal.push(child),
                Class::Avoiding => {
                    if child.len() < split {
                        stack.push(child);
                    } else if child.len() < max_len {
                        frontier.push(child);
                    }
                }
            }
        }
    }

    let task_results: Vec<Vec<Packed>> = frontier
        .into_par_iter()
        .map(|start| {
            let mut cache = ZiminCache::new();
            let mut found = Vec::new();
            let mut stack = vec![start];
            while let Some(w) = stack.pop() {
                for &c in &letters {
                    let child = w.append(c);
                    if nodes.fetch_add(1, Ordering::Relaxed) >= budget {
                        exhausted.store(true, Ordering::Relaxed);
                        return found;
                    }
                    match classify(child, &mut cache) {
                        Class::Dead => {}
                        Class::Minimal => found.push(child),
                        Class::Avoiding => {
                            if child.len() < max_len {
                                stack.push(child);
                            }
                        }
                    }
                }
            }
            found
        })
        .collect();
    for batch in task_results {
        minimal.extend(batch);
    }
    if exhausted.load(Ordering::Relaxed) {
        return Err(Error::BudgetExhausted(budget));
    }

    let mut words: Vec<Word> = minimal.iter().map(|p| p.to_word()).collect();
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    // Completeness requires every length-f window to contain an instance.
    let cap_warning = match compute_f_known(n, q) {
        Some(f) => (max_len as u64) < f,
        None => false,
    };
    Ok(MinimalInstances {
        n,
        q,
        count: words.len() as u64,
        words: words.iter().map(|w| w.to_string()).collect(),
        cap_warning,
        nodes_explored: nodes.load(Ordering::Relaxed),
    })
}

/// Known exact f values, used only for cap sanity warnings.
fn compute_f_known(n: u32, q: u8) -> Option<u64> {
    match (n, q) {
        (1, _) => Some(1),
        (2, q) => Some(2 * q as u64 + 1),
        (3, 2) => Some(29),
        _ => None,
    }
}

/// Closed-form count of minimal order-2 Zimin instances over [q]:
/// `m(2,q) = q! * sum_{i=0}^{q-1} 2^(q-1-i) / i!`, evaluated exactly.
///
/// Note the sum starts at i = 0; the commonly printed form starting at i = 1
/// fails the published anchor m(2,2) = 6 (see RECONCILIATION.md). Enumeration
/// pins this form for q <= 4 in tests.
pub fn m2_closed_form(q: u8) -> BigInt {
    let mut sum = BigInt::from(0);
    // q!/i! * 2^(q-1-i) is an integer for each i.
    for i in 0..q {
        let mut term = BigInt::one();
        for j in (i as u64 + 1)..=(q as u64) {
            term *= BigInt::from(j);
        }
        term *= BigInt::from(2u32).pow((q - 1 - i) as u32);
        sum += term;
    }
    debug_assert!(sum < factorial(q) * BigInt::from(2u32).pow(q as u32));
    sum
}

fn factorial(n: u8) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// An exponential tower: `height` copies of `base`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tetration {
    pub base: u64,
    pub height: u32,
}

impl Tetration {
    /// Evaluates the tower exactly when the result stays at or under
    /// `digit_cap` decimal digits; `None` means "astronomical".
    pub fn value_capped(&self, digit_cap: usize) -> Option<BigInt> {
        if self.height == 0 {
            return Some(BigInt::one());
        }
        let mut value = BigInt::from(self.base);
        for _ in 1..self.height {
            let exponent = value.to_f64()?;
            let digits = exponent * (self.base as f64).log10();
            if !digits.is_finite() || digits > digit_cap as f64 {
                return None;
            }
            let exp_u32: u32 = (&value).try_into().ok()?;
            value = BigInt::from(self.base).pow(exp_u32);
        }
        if value.to_string().len() > digit_cap {
            return None;
        }
        Some(value)
    }
}

impl std::fmt::Display for Tetration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "^{}({})", self.height, self.base)
    }
}

/// Every closed-form bound on f(n,q) the search module knows how to evaluate.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub n: u32,
    pub q: u8,
    /// Tower upper bound ^(n-1)(2q+1).
    pub tetration_upper: Tetration,
    pub tetration_upper_value: Option<String>,
    /// Tower upper bound ^(2n-1)(q), valid for n, q >= 2.
    pub tao_upper: Tetration,
    pub tao_upper_value: Option<String>,
    /// First-moment lower bound sqrt(2 q^(2^n) / (q^(n+1) e^((n-1)/(q-1)))) - 1.
    pub first_moment_lower: f64,
    /// Product lower bound sqrt(2 prod_{j<n} (q^(2^j - 1) - 1)) with the
    /// (1 + o(1)) factor omitted.
    pub tao_product_lower_nominal: f64,
    /// Chain bound (f(n-1,q)+1) m(n-1,q) + f(n-1,q) when both inputs are known.
    pub rs_chain_upper: Option<u64>,
    /// Asymptotic-form expression sqrt(e) 2^q (q+1)! + 2q + 1, reported as a
    /// float for n = 3 only; it cannot be an exact value.
    pub rs_asymptotic_form: Option<f64>,
}

/// Evaluates the closed-form bound collection for (n, q). `f_prev`/`m_prev`
/// are f(n-1,q) and m(n-1,q) when available (from searches or the caller).
pub fn bounds_report(
    n: u32,
    q: u8,
    f_prev: Option<u64>,
    m_prev: Option<u64>,
    digit_cap: usize,
) -> BoundReport {
    let qf = q as f64;
    let tetration_upper = Tetration { base: 2 * q as u64 + 1, height: n.saturating_sub(1) };
    let tao_upper = Tetration { base: q as u64, height: 2 * n - 1 };
    // log-space evaluation of the first-moment bound.
    let ln_q = qf.ln();
    let exponent = 0.5
        * (2f64.ln() + (2f64.powi(n as i32) - (n as f64 + 1.0)) * ln_q
            - (n as f64 - 1.0) / (qf - 1.0));
    let first_moment_lower = exponent.exp() - 1.0;
    let mut ln_prod = 0.0;
    for j in 1..n {
        ln_prod += (qf.powi((1i64 << j) as i32 - 1) - 1.0).ln();
    }
    let tao_product_lower_nominal = (0.5 * (2f64.ln() + ln_prod)).exp();
    let rs_chain_upper = match (f_prev, m_prev) {
        (Some(f), Some(m)) => Some((f + 1) * m + f),
        _ => None,
    };
    let rs_asymptotic_form = (n == 3).then(|| {
        let mut fact = 1.0;
        for k in 2..=(q as u64 + 1) {
            fact *= k as f64;
        }
        0.5f64.exp() * 2f64.powi(q as i32) * fact + 2.0 * qf + 1.0
    });
    BoundReport {
        n,
        q,
        tetration_upper,
        tetration_upper_value: tetration_upper.value_capped(digit_cap).map(|v| v.to_string()),
        tao_upper,
        tao_upper_value: tao_upper.value_capped(digit_cap).map(|v| v.to_string()),
        first_moment_lower,
        tao_product_lower_nominal,
        rs_chain_upper,
        rs_asymptotic_form,
    }
}

/// Independent appendix-style verifier: scans every substring of length at
/// least 2^n - 1 with the plain prefix-equals-suffix recursion and returns
/// the first Z_n-instance found as (start, end), or None when the word
/// avoids Z_n. Deliberately simple and separate from the search path.
pub fn first_zimin_encounter(w: &Word, n: u32) -> Option<(usize, usize)> {
    fn inst(v: &[u8], n: u32) -> bool {
        if v.is_empty() {
            return false;
        }
        if n == 1 {
            return true;
        }
        let lo = (1usize << (n - 1)) - 1;
        let hi = v.len().div_ceil(2);
        for i in lo..hi {
            if v[..i] == v[v.len() - i..] && inst(&v[..i], n - 1) {
                return true;
            }
        }
        false
    }
    let min_len = (1usize << n) - 1;
    let s = w.letters();
    for b in min_len..=s.len() {
        for a in 0..=(b - min_len) {
            if inst(&s[a..b], n) {
                return Some((a, b));
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LongAvoiderStrategy {
    Greedy,
    RestartBacktrack,
}

/// Randomized construction of a long Z_n-avoiding word: greedy letter choice
/// with optional k-step backtracking on dead ends. The returned word is
/// re-checked by the independent verifier; absence of a result proves
/// nothing.
pub fn find_long_avoider(
    n: u32,
    q: u8,
    target: usize,
    strategy: LongAvoiderStrategy,
    seed: u64,
    attempt_budget: u64,
) -> Result<Option<Word>> {
    if n < 2 || q < 2 {
        return Err(Error::InvalidInput("long-avoider search needs n >= 2 and q >= 2".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut word: Vec<u8> = Vec::with_capacity(target);
    let mut checker = SuffixChecker::new(n);
    let mut attempts: u64 = 0;
    let mut letters: Vec<u8> = (0..q).collect();
    while word.len() < target {
        letters.shuffle(&mut rng);
        let mut extended = false;
        for &c in &letters {
            attempts += 1;
            if attempts > attempt_budget {
                return Err(Error::BudgetExhausted(attempt_budget));
            }
            word.push(c);
            if checker.clean(&word) {
                extended = true;
                break;
            }
            word.pop();
        }
        if !extended {
            match strategy {
                LongAvoiderStrategy::Greedy => word.clear(),
                LongAvoiderStrategy::RestartBacktrack => {
                    let k = rng.gen_range(1..=8.min(word.len().max(1)));
                    for _ in 0..k.min(word.len()) {
                        word.pop();
                    }
                }
            }
        }
    }
    let out = Word::new(word);
    match first_zimin_encounter(&out, n) {
        None => Ok(Some(out)),
        Some((a, b)) => Err(Error::InvalidInput(format!(
            "internal inconsistency: constructed word encounters at ({a}, {b})"
        ))),
    }
}

/// Incremental suffix-instance checker over growing byte words of arbitrary
/// length, memoized by (start, len, content hash) so entries stay valid
/// across backtracking. Used only to steer the heuristic construction; final
/// words are re-verified exactly.
struct SuffixChecker {
    n: u32,
    memo: std::collections::HashMap<(usize, usize, u64), bool>,
}

impl SuffixChecker {
    fn new(n: u32) -> Self {
        SuffixChecker { n, memo: std::collections::HashMap::new() }
    }

    fn hash_range(w: &[u8], a: usize, b: usize) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        w[a..b].hash(&mut h);
        h.finish()
    }

    /// True when no suffix of `w` is a Z_n-instance.
    fn clean(&mut self, w: &[u8]) -> bool {
        let min_len = (1usize << self.n) - 1;
        if w.len() < min_len {
            return true;
        }
        for a in 0..=(w.len() - min_len) {
            if self.is_instance(w, a, w.len()) {
                return false;
            }
        }
        true
    }

    fn is_instance(&mut self, w: &[u8], a: usize, b: usize) -> bool {
        self.is_instance_n(w, a, b, self.n)
    }

    fn is_instance_n(&mut self, w: &[u8], a: usize, b: usize, n: u32) -> bool {
        let len = b - a;
        if n == 1 {
            return len >= 1;
        }
        let lo = (1usize << (n - 1)) - 1;
        if len < 2 * lo + 1 {
            return false;
        }
        let key = (a, len, Self::hash_range(w, a, b) ^ (n as u64) << 56);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let hi = len.div_ceil(2);
        let mut verdict = false;
        for i in lo..hi {
            if w[a..a + i] == w[b - i..b] && self.is_instance_n(w, a, a + i, n - 1) {
                verdict = true;
                break;
            }
        }
        self.memo.insert(key, verdict);
        verdict
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_small_values() {
        assert_eq!(compute_f(1, 2, 1 << 20).unwrap().f_value, Some(1));
        assert_eq!(compute_f(2, 2, 1 << 20).unwrap().f_value, Some(5));
        assert_eq!(compute_f(2, 3, 1 << 20).unwrap().f_value, Some(7));
        assert_eq!(compute_f(2, 4, 1 << 22).unwrap().f_value, Some(9));
    }

    #[test]
    fn budget_exhaustion_reports_partial() {
        let r = compute_f(3, 2, 50).unwrap();
        assert!(r.budget_exhausted);
        assert!(r.f_value.is_none());
        assert!(r.max_avoider_len > 0);
    }

    #[test]
    fn all_binary_z2_avoiders() {
        let avoiders = enumerate_all_avoiders(2, 2, 1 << 20).unwrap();
        let strings: Vec<String> = avoiders.iter().map(|w| w.to_string()).collect();
        assert_eq!(
            strings,
            ["ε", "0", "1", "00", "01", "10", "11", "001", "011", "100", "110", "0011", "1100"]
        );
    }

    #[test]
    fn max_avoiders_z2_binary() {
        let r = enumerate_max_avoiders(2, 2, 1 << 20).unwrap();
        assert_eq!(r.f_value, Some(5));
        assert_eq!(r.max_avoiders.unwrap(), ["0011", "1100"]);
    }

    #[test]
    fn minimal_instances_published_set() {
        let m = enumerate_minimal_instances(2, 2, 5, 1 << 20).unwrap();
        assert_eq!(m.count, 6);
        assert_eq!(m.words, ["000", "010", "101", "111", "0110", "1001"]);
        assert!(!m.cap_warning);
    }

    #[test]
    fn minimal_instance_counts_match_closed_form() {
        for q in 2..=4u8 {
            let cap = 2 * q as u32 + 1;
            let m = enumerate_minimal_instances(2, q, cap, 1 << 24).unwrap();
            assert_eq!(BigInt::from(m.count), m2_closed_form(q), "q = {q}");
        }
    }

    #[test]
    fn minimal_instances_recheck_definition() {
        use crate::patterns::{encounters, is_instance, zimin_word};
        let m = enumerate_minimal_instances(2, 2, 5, 1 << 20).unwrap();
        let z2 = zimin_word(2);
        for s in &m.words {
            let w = Word::parse(s).unwrap();
            assert!(is_instance(&w, &z2).is_some());
            let prefix = w.substring(0, w.len() - 1).unwrap();
            let suffix = w.substring(1, w.len()).unwrap();
            assert!(!encounters(&z2, &prefix));
            assert!(!encounters(&z2, &suffix));
        }
    }

    #[test]
    fn m2_closed_form_anchor() {
        assert_eq!(m2_closed_form(2), BigInt::from(6));
        // Bounded by q! 2^q.
        for q in 2..=10u8 {
            assert!(m2_closed_form(q) < factorial(q) * BigInt::from(2u32).pow(q as u32));
        }
    }

    #[test]
    fn tetration_evaluation() {
        assert_eq!(
            Tetration { base: 5, height: 1 }.value_capped(100),
            Some(BigInt::from(5))
        );
        assert_eq!(
            Tetration { base: 5, height: 2 }.value_capped(100),
            Some(BigInt::from(3125))
        );
        // ^3(5) has 2185 digits.
        let t3 = Tetration { base: 5, height: 3 }.value_capped(4000).unwrap();
        assert_eq!(t3.to_string().len(), 2185);
        assert_eq!(Tetration { base: 5, height: 4 }.value_capped(4000), None);
    }

    #[test]
    fn bounds_report_values() {
        let r = bounds_report(2, 2, None, None, 100);
        assert_eq!(r.tetration_upper_value.as_deref(), Some("5"));
        let r = bounds_report(4, 2, Some(29), Some(7882), 100);
        assert_eq!(r.rs_chain_upper, Some(236489));
        let r = bounds_report(3, 2, Some(5), Some(6), 100);
        assert_eq!(r.rs_chain_upper, Some(41));
        assert!(r.first_moment_lower >= 2.0 && r.first_moment_lower <= 29.0);
        assert!((r.tao_product_lower_nominal - 14f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn verifier_examples() {
        let ones15 = Word::parse(&"1".repeat(15)).unwrap();
        assert_eq!(first_zimin_encounter(&ones15, 4), Some((0, 15)));
        let avoider = Word::parse("0011").unwrap();
        assert_eq!(first_zimin_encounter(&avoider, 2), None);
    }

    #[test]
    fn long_avoider_small_targets() {
        let w = find_long_avoider(2, 2, 4, LongAvoiderStrategy::RestartBacktrack, 7, 1 << 16)
            .unwrap()
            .unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(first_zimin_encounter(&w, 2), None);
        let w = find_long_avoider(3, 2, 20, LongAvoiderStrategy::RestartBacktrack, 11, 1 << 22)
            .unwrap()
            .unwrap();
        assert!(w.len() >= 20);
        assert_eq!(first_zimin_encounter(&w, 3), None);
    }
}
