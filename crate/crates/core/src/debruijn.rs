//! Liminf-density lower-bound heuristics on the binary de Bruijn graph:
//! stationary distributions of probabilistic walks, the quadratic density
//! objective, numerical minimization, and exact verification of candidate
//! optima.
//!
//! Nodes of the k-dimensional graph are the 2^k length-k binary words,
//! encoded as integers; appending bit b moves node v to ((v << 1) | b)
//! masked to k bits. The probability tuple p gives, per node, the chance of
//! appending a 1. Outputs are labeled candidate bounds: the connection from
//! the minimized objective to a proved liminf bound is heuristic.

use crate::packed::{Packed, ZiminCache};
use crate::words::{prefix_function, Word};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

/// All order-2 Zimin instances over [q] of length at most `max_len` that
/// have no order-2 Zimin-instance bifix.
pub fn z2_bifixfree_instances(q: u8, max_len: usize) -> Result<Vec<Word>> {
    if q < 2 || max_len < 3 {
        return Err(Error::InvalidInput("need q >= 2 and max_len >= 3".into()));
    }
    if max_len >= crate::packed::MAX_LEN {
        return Err(Error::InvalidInput(format!("max_len {max_len} too large")));
    }
    let mut cache = ZiminCache::new();
    let mut out = Vec::new();
    for len in 3..=max_len {
        for word in crate::words::enumerate_words(q, len, 1 << 28)? {
            let packed = Packed::from_word(&word).expect("within packed capacity");
            if !cache.is_zimin_instance(packed, 2) {
                continue;
            }
            let pi = prefix_function(word.letters());
            let mut border = pi[len];
            let mut clean = true;
            while border > 0 {
                if cache.is_zimin_instance(packed.sub(0, border as u32), 2) {
                    clean = false;
                    break;
                }
                border = pi[border];
            }
            if clean {
                out.push(word);
            }
        }
    }
    Ok(out)
}

/// The k-dimensional binary de Bruijn graph with its tracked instance set.
#[derive(Clone, Debug)]
pub struct DeBruijnModel {
    pub k: u32,
    pub q: u8,
    /// Tracked instances: order-2 Zimin-bifix-free instances of length <= k.
    pub instance_set: Vec<Word>,
    /// For each node, the index of the instance its suffix completes, if any.
    pub node_instance: Vec<Option<usize>>,
}

impl DeBruijnModel {
    pub fn new(k: u32, q: u8) -> Result<Self> {
        if q != 2 {
            return Err(Error::InvalidInput(
                "de Bruijn walks are implemented for the binary alphabet".into(),
            ));
        }
        if !(2..=8).contains(&k) {
            return Err(Error::InvalidInput("need 2 <= k <= 8".into()));
        }
        let instance_set = z2_bifixfree_instances(q, k as usize)?;
        let nodes = 1usize << k;
        let mut node_instance = vec![None; nodes];
        for (v, slot) in node_instance.iter_mut().enumerate() {
            // Letters of the node word, most significant bit first.
            let letters: Vec<u8> =
                (0..k).rev().map(|i| ((v >> i) & 1) as u8).collect();
            // A node can complete at most one tracked instance: two suffix
            // instances would nest, contradicting minimality.
            for (idx, inst) in instance_set.iter().enumerate() {
                let len = inst.len();
                if len <= letters.len() && &letters[letters.len() - len..] == inst.letters() {
                    *slot = Some(idx);
                    break;
                }
            }
        }
        Ok(DeBruijnModel { k, q, instance_set, node_instance })
    }

    pub fn node_count(&self) -> usize {
        1 << self.k
    }

    fn successors(&self, v: usize) -> [usize; 2] {
        let mask = self.node_count() - 1;
        [((v << 1) & mask), ((v << 1) | 1) & mask]
    }

    pub fn node_word(&self, v: usize) -> Word {
        Word::new((0..self.k).rev().map(|i| ((v >> i) & 1) as u8).collect())
    }
}

/// Stationary outcome of a probabilistic walk.
#[derive(Clone, Debug, Serialize)]
pub struct StationarySolution {
    /// Per-node probability of appending a 1.
    pub p: Vec<f64>,
    /// Stationary node proportions.
    pub q_dist: Vec<f64>,
    /// Per-instance rates, aligned with the model's instance set.
    pub r: Vec<f64>,
    /// Quadratic objective d = sum of squared rates.
    pub objective: f64,
    /// Set when the walk's support is not a single irreducible class over
    /// all nodes.
    pub reducible: bool,
}

/// Exact-rational stationary outcome.
#[derive(Clone, Debug)]
pub struct ExactStationarySolution {
    pub q_dist: Vec<BigRational>,
    pub r: Vec<BigRational>,
    pub objective: BigRational,
    pub reducible: bool,
}

/// Minimal numeric abstraction shared by the f64 and exact solvers.
trait Field: Clone + PartialEq + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: u64, den: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn is_zero_val(&self) -> bool;
    fn abs_cmp_key(&self) -> f64;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero_val(&self) -> bool {
        self.abs() < 1e-14
    }
    fn abs_cmp_key(&self) -> f64 {
        self.abs()
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero_val(&self) -> bool {
        self.is_zero()
    }
    fn abs_cmp_key(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

/// Gaussian elimination with partial pivoting; returns None on a singular
/// system.
fn solve_linear<T: Field>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs_cmp_key()
                .partial_cmp(&a[j][col].abs_cmp_key())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].is_zero_val() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = T::one().div(&a[col][col]);
        for row in (col + 1)..n {
            if a[row][col].is_zero_val() {
                continue;
            }
            let factor = a[row][col].mul(&inv);
            for c in col..n {
                let delta = factor.mul(&a[col][c]);
                a[row][c] = a[row][c].sub(&delta);
            }
            let delta = factor.mul(&b[col]);
            b[row] = b[row].sub(&delta);
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for col in (row + 1)..n {
            let delta = a[row][col].mul(&x[col]);
            acc = acc.sub(&delta);
        }
        x[row] = acc.div(&a[row][row]);
    }
    Some(x)
}

/// Walk analysis over any Field: finds the recurrent classes of the
/// positive-probability transition graph, solves each class's stationary
/// equations exactly, and mixes the classes by their absorption
/// probabilities from the uniform start. This is the Cesàro limit of the
/// empirical node frequencies, which keeps every p well defined.
fn stationary_in<T: Field>(
    model: &DeBruijnModel,
    p: &[T],
) -> std::result::Result<(Vec<T>, bool), Error> {
    let n = model.node_count();
    assert_eq!(p.len(), n);
    let prob = |v: usize, bit: usize| -> T {
        if bit == 1 {
            p[v].clone()
        } else {
            T::one().sub(&p[v])
        }
    };
    // Positive-probability edges.
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let s = model.successors(v);
            let mut out = Vec::new();
            if !prob(v, 0).is_zero_val() {
                out.push(s[0]);
            }
            if !prob(v, 1).is_zero_val() {
                out.push(s[1]);
            }
            out
        })
        .collect();

    // Strongly connected components via iterative Tarjan.
    let mut comp = vec![usize::MAX; n];
    let mut order = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut count = 0usize;
    let mut ncomp = 0usize;
    for root in 0..n {
        if order[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut idx)) = call.last_mut() {
            if *idx == 0 {
                order[v] = count;
                low[v] = count;
                count += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *idx < succ[v].len() {
                let u = succ[v][*idx];
                *idx += 1;
                if order[u] == usize::MAX {
                    call.push((u, 0));
                } else if on_stack[u] {
                    low[v] = low[v].min(order[u]);
                }
            } else {
                if low[v] == order[v] {
                    loop {
                        let u = stack.pop().expect("tarjan stack");
                        on_stack[u] = false;
                        comp[u] = ncomp;
                        if u == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
                call.pop();
                if let Some(&mut (parent, _)) = call.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }

    // Recurrent classes: no edge leaves the component.
    let mut recurrent = vec![true; ncomp];
    for v in 0..n {
        for &u in &succ[v] {
            if comp[u] != comp[v] {
                recurrent[comp[v]] = false;
            }
        }
    }
    let rec_classes: Vec<usize> = (0..ncomp).filter(|&c| recurrent[c]).collect();
    if rec_classes.is_empty() {
        return Err(Error::SingularSystem("no recurrent class".into()));
    }
    let transient: Vec<usize> = (0..n).filter(|&v| !recurrent[comp[v]]).collect();
    let reducible = rec_classes.len() > 1 || !transient.is_empty();

    // Absorption weight per recurrent class from the uniform start.
    let uniform = T::from_ratio(1, n as u64);
    let mut class_weight: Vec<T> = vec![T::zero(); ncomp];
    for v in 0..n {
        if recurrent[comp[v]] {
            class_weight[comp[v]] = class_weight[comp[v]].add(&uniform);
        }
    }
    if !transient.is_empty() {
        let tindex: std::collections::HashMap<usize, usize> =
            transient.iter().copied().enumerate().map(|(i, v)| (v, i)).collect();
        let t = transient.len();
        // (I - T) h_c = b_c for each recurrent class c; columns share the
        // same matrix, so solve with multiple right-hand sides one by one.
        for &c in &rec_classes {
            let mut a = vec![vec![T::zero(); t]; t];
            let mut b = vec![T::zero(); t];
            for (i, &v) in transient.iter().enumerate() {
                a[i][i] = T::one();
                let s = model.successors(v);
                for (bit, &u) in s.iter().enumerate() {
                    let pr = prob(v, bit);
                    if pr.is_zero_val() {
                        continue;
                    }
                    if let Some(&j) = tindex.get(&u) {
                        a[i][j] = a[i][j].sub(&pr);
                    } else if comp[u] == c {
                        b[i] = b[i].add(&pr);
                    }
                }
            }
            let h = solve_linear(a, b)
                .ok_or_else(|| Error::SingularSystem("absorption system".into()))?;
            for (i, _) in transient.iter().enumerate() {
                let w = uniform.mul(&h[i]);
                class_weight[c] = class_weight[c].add(&w);
            }
        }
    }

    // Stationary distribution within each recurrent class: pi (P - I) = 0
    // with one balance equation replaced by normalization.
    let mut q_dist = vec![T::zero(); n];
    for &c in &rec_classes {
        let members: Vec<usize> = (0..n).filter(|&v| comp[v] == c).collect();
        let m = members.len();
        let mindex: std::collections::HashMap<usize, usize> =
            members.iter().copied().enumerate().map(|(i, v)| (v, i)).collect();
        let mut a = vec![vec![T::zero(); m]; m];
        let mut b = vec![T::zero(); m];
        // Row j (j < m-1): sum_v pi_v P(v, member_j) - pi_j = 0.
        for (i, &v) in members.iter().enumerate() {
            let s = model.successors(v);
            for (bit, &u) in s.iter().enumerate() {
                let pr = prob(v, bit);
                if pr.is_zero_val() {
                    continue;
                }
                if let Some(&j) = mindex.get(&u) {
                    if j < m - 1 {
                        a[j][i] = a[j][i].add(&pr);
                    }
                }
            }
        }
        for (i, row) in a.iter_mut().enumerate().take(m - 1) {
            row[i] = row[i].sub(&T::one());
        }
        for x in a[m - 1].iter_mut() {
            *x = T::one();
        }
        b[m - 1] = T::one();
        let pi = solve_linear(a, b)
            .ok_or_else(|| Error::SingularSystem("stationary system".into()))?;
        for (i, &v) in members.iter().enumerate() {
            q_dist[v] = class_weight[c].mul(&pi[i]);
        }
    }
    Ok((q_dist, reducible))
}

fn rates_from_q<T: Field>(model: &DeBruijnModel, q_dist: &[T]) -> (Vec<T>, T) {
    let mut r = vec![T::zero(); model.instance_set.len()];
    for (v, inst) in model.node_instance.iter().enumerate() {
        if let Some(idx) = *inst {
            r[idx] = r[idx].add(&q_dist[v]);
        }
    }
    let mut d = T::zero();
    for x in &r {
        d = d.add(&x.mul(x));
    }
    (r, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    Float,
    Rational,
}

/// Solves the walk's balance equations plus normalization for the given
/// probability tuple and reports the stationary proportions, per-instance
/// rates, and quadratic objective.
pub fn stationary(model: &DeBruijnModel, p: &[f64], mode: SolveMode) -> Result<StationarySolution> {
    if p.len() != model.node_count() {
        return Err(Error::InvalidInput(format!(
            "probability tuple needs {} entries",
            model.node_count()
        )));
    }
    if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidInput("probabilities must lie in [0, 1]".into()));
    }
    match mode {
        SolveMode::Float => {
            let (q_dist, reducible) = stationary_in(model, p)?;
            let (r, objective) = rates_from_q(model, &q_dist);
            Ok(StationarySolution { p: p.to_vec(), q_dist, r, objective, reducible })
        }
        SolveMode::Rational => {
            let p_rat: Vec<BigRational> = p
                .iter()
                .map(|&x| BigRational::from_float(x).unwrap_or_else(BigRational::zero))
                .collect();
            let exact = verify_candidate(model, &p_rat)?;
            Ok(StationarySolution {
                p: p.to_vec(),
                q_dist: exact.q_dist.iter().map(crate::series::to_f64).collect(),
                r: exact.r.iter().map(crate::series::to_f64).collect(),
                objective: crate::series::to_f64(&exact.objective),
                reducible: exact.reducible,
            })
        }
    }
}

/// Exact-rational stationary solve and objective for a candidate tuple.
pub fn verify_candidate(model: &DeBruijnModel, p: &[BigRational]) -> Result<ExactStationarySolution> {
    if p.len() != model.node_count() {
        return Err(Error::InvalidInput(format!(
            "probability tuple needs {} entries",
            model.node_count()
        )));
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    if p.iter().any(|x| x < &zero || x > &one) {
        return Err(Error::InvalidInput("probabilities must lie in [0, 1]".into()));
    }
    let (q_dist, reducible) = stationary_in(model, p)?;
    let (r, objective) = rates_from_q(model, &q_dist);
    Ok(ExactStationarySolution { q_dist, r, objective, reducible })
}

/// Parses a probability tuple like "-,4/5,0,3/5,...": `a/b` rationals,
/// plain integers/decimals, and `-` for nodes the walk never visits a
/// positive proportion of the time (assigned probability 1/2, which cannot
/// matter at stationarity).
pub fn parse_probability_tuple(text: &str, nodes: usize) -> Result<Vec<BigRational>> {
    let entries: Vec<&str> = text.split(',').map(str::trim).collect();
    if entries.len() != nodes {
        return Err(Error::InvalidInput(format!(
            "expected {nodes} comma-separated entries, got {}",
            entries.len()
        )));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    entries
        .iter()
        .map(|e| {
            if *e == "-" || *e == "–" || e.is_empty() {
                return Ok(half.clone());
            }
            if let Some((num, den)) = e.split_once('/') {
                let n: i64 = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad rational {e:?}")))?;
                let d: i64 = den
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad rational {e:?}")))?;
                if d == 0 {
                    return Err(Error::InvalidInput("zero denominator".into()));
                }
                return Ok(BigRational::new(BigInt::from(n), BigInt::from(d)));
            }
            let f: f64 =
                e.parse().map_err(|_| Error::InvalidInput(format!("bad probability {e:?}")))?;
            BigRational::from_float(f)
                .ok_or_else(|| Error::InvalidInput(format!("bad probability {e:?}")))
        })
        .collect()
}

/// Best solution from a multi-start minimization of the quadratic objective
/// over the unit cube: projected coordinate descent with a shrinking step,
/// then a Nelder-Mead polish. Never claims global optimality; the output is
/// a candidate lower bound in the de Bruijn heuristic sense.
pub fn minimize_objective(
    model: &DeBruijnModel,
    restarts: u32,
    seed: u64,
    tolerance: f64,
) -> Result<StationarySolution> {
    if restarts == 0 {
        return Err(Error::InvalidInput("need at least one restart".into()));
    }
    let n = model.node_count();
    let eval = |p: &[f64]| -> f64 {
        match stationary_in::<f64>(model, p) {
            Ok((q_dist, _)) => rates_from_q(model, &q_dist).1,
            Err(_) => f64::INFINITY,
        }
    };

    let results: Vec<(f64, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(restart as u64);
            let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let mut best = eval(&p);
            // Projected coordinate descent with shrinking step.
            let mut step = 0.5;
            while step > tolerance.max(1e-9) {
                let mut improved = false;
                for i in 0..n {
                    for dir in [-1.0, 1.0] {
                        let candidate = (p[i] + dir * step).clamp(0.0, 1.0);
                        if candidate == p[i] {
                            continue;
                        }
                        let old = p[i];
                        p[i] = candidate;
                        let value = eval(&p);
                        if value + 1e-15 < best {
                            best = value;
                            improved = true;
                        } else {
                            p[i] = old;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            let (polished, value) = nelder_mead(&eval, &p, 0.05, 400 * n);
            if value < best {
                (value, polished)
            } else {
                (best, p)
            }
        })
        .collect();

    // Deterministic best-of reduction: smallest objective, ties by tuple.
    let (_, best_p) = results
        .into_iter()
        .min_by(|(a, pa), (b, pb)| {
            a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal).then_with(|| {
                pa.partial_cmp(pb).unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .expect("at least one restart");
    stationary(model, &best_p, SolveMode::Float)
}

/// Nelder-Mead on [0,1]^n with clamping; returns (point, value).
fn nelder_mead(
    eval: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    scale: f64,
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let clamp = |p: &mut Vec<f64>| {
        for x in p.iter_mut() {
            *x = x.clamp(0.0, 1.0);
        }
    };
    let mut evals = 0usize;
    let mut run = |p: &[f64]| {
        evals += 1;
        eval(p)
    };
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((run(start), start.to_vec()));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] = (p[i] + scale).clamp(0.0, 1.0);
        if p[i] == start[i] {
            p[i] = (p[i] - scale).clamp(0.0, 1.0);
        }
        simplex.push((run(&p), p));
    }
    while evals < max_evals {
        simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].0;
        let worst = simplex[n].0;
        if (worst - best).abs() < 1e-13 {
            break;
        }
        // Centroid of all but the worst.
        let mut centroid = vec![0.0; n];
        for (_, p) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let reflect = |alpha: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].1)
                .map(|(c, w)| c + alpha * (c - w))
                .collect();
            clamp(&mut p);
            p
        };
        let pr = reflect(1.0);
        let fr = run(&pr);
        if fr < simplex[0].0 {
            let pe = reflect(2.0);
            let fe = run(&pe);
            simplex[n] = if fe < fr { (fe, pe) } else { (fr, pr) };
        } else if fr < simplex[n - 1].0 {
            simplex[n] = (fr, pr);
        } else {
            let pc = reflect(-0.5);
            let fc = run(&pc);
            if fc < simplex[n].0 {
                simplex[n] = (fc, pc);
            } else {
                // Shrink toward the best point.
                let best_p = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut p: Vec<f64> = entry
                        .1
                        .iter()
                        .zip(&best_p)
                        .map(|(x, b)| b + 0.5 * (x - b))
                        .collect();
                    clamp(&mut p);
                    *entry = (run(&p), p);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let (value, point) = simplex.swap_remove(0);
    (point, value)
}

/// Frequencies along one period of a cyclic word: exact node proportions,
/// the edge probabilities the word exhibits, and the quadratic density
/// estimate.
#[derive(Clone, Debug)]
pub struct WordFamilyAnalysis {
    pub period: usize,
    pub node_freq: Vec<BigRational>,
    /// Implied probability of appending 1, None for unvisited nodes.
    pub implied_p: Vec<Option<BigRational>>,
    pub r: Vec<BigRational>,
    /// Raw asymptotic estimate sum_V (R_V / period)^2.
    pub quadratic_estimate: BigRational,
    /// Finite-length estimate sum_V (C(c_V,2) - |V| c_V) / C(L+1,2) for the
    /// word repeated `periods_for_corrected` times.
    pub corrected_estimate: BigRational,
    pub periods_for_corrected: u64,
}

/// Analyzes one period of an eventually-periodic word as a closed walk.
pub fn word_family_frequencies(
    period_word: &Word,
    model: &DeBruijnModel,
    periods_for_corrected: u64,
) -> Result<WordFamilyAnalysis> {
    let p = period_word.len();
    let k = model.k as usize;
    if p < k {
        return Err(Error::InvalidInput("period must be at least k letters".into()));
    }
    let letters = period_word.letters();
    let at = |i: usize| letters[i % p];
    let node_at = |i: usize| -> usize {
        let mut v = 0usize;
        for j in 0..k {
            v = (v << 1) | at(i + j) as usize;
        }
        v
    };
    let n = model.node_count();
    let mut visits = vec![0u64; n];
    let mut ones = vec![0u64; n];
    for i in 0..p {
        let v = node_at(i);
        visits[v] += 1;
        if at(i + k) == 1 {
            ones[v] += 1;
        }
    }
    let node_freq: Vec<BigRational> = visits
        .iter()
        .map(|&c| BigRational::new(BigInt::from(c), BigInt::from(p as u64)))
        .collect();
    let implied_p: Vec<Option<BigRational>> = visits
        .iter()
        .zip(&ones)
        .map(|(&c, &o)| {
            (c > 0).then(|| BigRational::new(BigInt::from(o), BigInt::from(c)))
        })
        .collect();
    let (r, quadratic_estimate) = rates_from_q(model, &node_freq);

    // Finite-length corrected estimate over `periods` repetitions.
    let periods = periods_for_corrected.max(1);
    let mut corrected = BigRational::zero();
    let total_len = BigInt::from(periods * p as u64);
    let cn2 = (&total_len + BigInt::one()) * &total_len / BigInt::from(2);
    for (idx, inst) in model.instance_set.iter().enumerate() {
        let c_v = BigInt::from(periods)
            * (&r[idx] * BigRational::from_integer(BigInt::from(p as u64))).to_integer();
        let pairs = (&c_v * (&c_v - BigInt::one())) / BigInt::from(2);
        let correction = BigInt::from(inst.len() as u64) * &c_v;
        corrected += BigRational::new(pairs - correction, cn2.clone());
    }
    Ok(WordFamilyAnalysis {
        period: p,
        node_freq,
        implied_p,
        r,
        quadratic_estimate,
        corrected_estimate: corrected,
        periods_for_corrected: periods,
    })
}

/// Simulated random walk under p, for consistency spot checks: returns
/// empirical node frequencies over `steps` visits.
pub fn simulate_walk(model: &DeBruijnModel, p: &[f64], steps: u64, seed: u64) -> Vec<f64> {
    let n = model.node_count();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; n];
    let mut v = rng.gen_range(0..n);
    for _ in 0..steps {
        counts[v] += 1;
        let bit = usize::from(rng.gen::<f64>() < p[v]);
        v = model.successors(v)[bit];
    }
    counts.iter().map(|&c| c as f64 / steps as f64).collect()
}

/// The three candidate probability tuples attaining objective 1/28 on the
/// 4-dimensional graph, and the word families exhibiting two of them.
pub fn candidate_tuples() -> Vec<(&'static str, &'static str)> {
    vec![
        ("p1", "-,4/5,0,3/5,2/5,-,1/5,0,1,4/5,-,3/5,2/5,1,1/5,-"),
        ("p2", "-,1,0,3/4,1,-,1/2,0,1,1/2,-,0,1/4,1,0,-"),
        ("p3", "-,1,-,3/5,2/5,-,1/5,0,1,1,0,-,2/5,0,1/5,-"),
    ]
}

/// Periodic words exhibiting the p2 and p3 tuples.
pub fn candidate_word_families() -> Vec<(&'static str, String)> {
    let w2 = "0001110010011100011011000111".to_string();
    let mut w3 = String::new();
    for _ in 0..3 {
        w3.push_str("11010001");
    }
    for _ in 0..2 {
        w3.push_str("101001");
    }
    for _ in 0..12 {
        w3.push_str("110001");
    }
    for _ in 0..8 {
        w3.push_str("1001");
    }
    vec![("p2", w2), ("p3", w3)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn instance_sets_published() {
        let v4: Vec<String> = z2_bifixfree_instances(2, 4)
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(v4, ["000", "010", "101", "111", "0110", "1001"]);
        let v5: Vec<String> = z2_bifixfree_instances(2, 5)
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(
            v5,
            ["000", "010", "101", "111", "0110", "1001", "01001", "01101", "10010", "10110"]
        );
        let v3: Vec<String> = z2_bifixfree_instances(2, 3)
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(v3, ["000", "010", "101", "111"]);
    }

    #[test]
    fn node_instance_accounting() {
        let model = DeBruijnModel::new(4, 2).unwrap();
        let name = |v: usize| model.node_word(v).to_string();
        // r_000 collects nodes 0000 and 1000, r_0110 only node 0110.
        let idx_000 = model.instance_set.iter().position(|w| w.to_string() == "000").unwrap();
        let contributors: Vec<String> = (0..16)
            .filter(|&v| model.node_instance[v] == Some(idx_000))
            .map(name)
            .collect();
        assert_eq!(contributors, ["0000", "1000"]);
        let idx_0110 = model.instance_set.iter().position(|w| w.to_string() == "0110").unwrap();
        let contributors: Vec<String> = (0..16)
            .filter(|&v| model.node_instance[v] == Some(idx_0110))
            .map(name)
            .collect();
        assert_eq!(contributors, ["0110"]);
    }

    #[test]
    fn uniform_walk_objective() {
        let model = DeBruijnModel::new(4, 2).unwrap();
        let p = vec![0.5; 16];
        let sol = stationary(&model, &p, SolveMode::Float).unwrap();
        assert!(!sol.reducible);
        for x in &sol.q_dist {
            assert!((x - 1.0 / 16.0).abs() < 1e-12);
        }
        // d = 4 (1/8)^2 + 2 (1/16)^2 = 9/128.
        assert!((sol.objective - 9.0 / 128.0).abs() < 1e-12);
        // Exact mode agrees.
        let half = rat(1, 2);
        let exact = verify_candidate(&model, &vec![half; 16]).unwrap();
        assert_eq!(exact.objective, rat(9, 128));
    }

    #[test]
    fn candidates_give_exactly_1_28() {
        let model = DeBruijnModel::new(4, 2).unwrap();
        for (name, text) in candidate_tuples() {
            let p = parse_probability_tuple(text, 16).unwrap();
            let sol = verify_candidate(&model, &p).unwrap();
            assert_eq!(sol.objective, rat(1, 28), "{name}");
        }
    }

    #[test]
    fn degenerate_all_zero_tuple() {
        let model = DeBruijnModel::new(4, 2).unwrap();
        let p = vec![BigRational::zero(); 16];
        let sol = verify_candidate(&model, &p).unwrap();
        // The walk absorbs into node 0000, which completes 000 forever.
        assert!(sol.reducible);
        assert_eq!(sol.objective, rat(1, 1));
    }

    #[test]
    fn word_family_w2_matches_stationary() {
        let model = DeBruijnModel::new(4, 2).unwrap();
        let (_, w2) = &candidate_word_families()[0];
        let word = Word::parse(w2).unwrap();
        assert_eq!(word.len(), 28);
        let analysis = word_family_frequencies(&word, &model, 7).unwrap();
        assert_eq!(analysis.quadratic_estimate, rat(1, 28));
        // Node frequencies reproduce the stationary distribution of p2.
        let p2 = parse_probability_tuple(candidate_tuples()[1].1, 16).unwrap();
        let stationary = verify_candidate(&model, &p2).unwrap();
        assert_eq!(analysis.node_freq, stationary.q_dist);
        // Implied probabilities match p2 on visited nodes.
        for (v, implied) in analysis.implied_p.iter().enumerate() {
            if let Some(prob) = implied {
                assert_eq!(prob, &p2[v], "node {v}");
            }
        }
    }

    #[test]
    fn word_family_w3_matches_stationary() {
        let model = DeBruijnModel::new(4, 2).unwrap();
        let (_, w3) = &candidate_word_families()[1];
        let word = Word::parse(w3).unwrap();
        let analysis = word_family_frequencies(&word, &model, 3).unwrap();
        assert_eq!(analysis.quadratic_estimate, rat(1, 28));
        let p3 = parse_probability_tuple(candidate_tuples()[2].1, 16).unwrap();
        let stationary = verify_candidate(&model, &p3).unwrap();
        assert_eq!(analysis.node_freq, stationary.q_dist);
    }

    #[test]
    fn family_consistency_across_period_counts() {
        let model = DeBruijnModel::new(4, 2).unwrap();
        let (_, w2) = &candidate_word_families()[0];
        let once = Word::parse(w2).unwrap();
        let thrice = Word::parse(&w2.repeat(3)).unwrap();
        let a = word_family_frequencies(&once, &model, 1).unwrap();
        let b = word_family_frequencies(&thrice, &model, 1).unwrap();
        assert_eq!(a.node_freq, b.node_freq);
        assert_eq!(a.quadratic_estimate, b.quadratic_estimate);
    }

    #[test]
    fn period2_word_concentrates_on_two_nodes() {
        let model = DeBruijnModel::new(4, 2).unwrap();
        let word = Word::parse("0101").unwrap();
        let analysis = word_family_frequencies(&word, &model, 1).unwrap();
        let hot: Vec<String> = (0..16)
            .filter(|&v| !analysis.node_freq[v].is_zero())
            .map(|v| model.node_word(v).to_string())
            .collect();
        assert_eq!(hot, ["0101", "1010"]);
    }

    #[test]
    fn simulated_walk_close_to_stationary() {
        let model = DeBruijnModel::new(4, 2).unwrap();
        let p2 = parse_probability_tuple(candidate_tuples()[1].1, 16).unwrap();
        let exact = verify_candidate(&model, &p2).unwrap();
        let p_float: Vec<f64> = p2.iter().map(crate::series::to_f64).collect();
        let steps = 1_000_000u64;
        let freq = simulate_walk(&model, &p_float, steps, 99);
        for v in 0..16 {
            let expected = crate::series::to_f64(&exact.q_dist[v]);
            // 3 sigma on a Bernoulli proportion.
            let sigma = (expected * (1.0 - expected) / steps as f64).sqrt();
            // Correlated samples inflate the variance; allow a wide margin.
            let margin = (6.0 * sigma).max(1e-3);
            assert!(
                (freq[v] - expected).abs() <= margin,
                "node {v}: {} vs {expected}",
                freq[v]
            );
        }
    }

    #[test]
    fn five_dimensional_model_builds() {
        let model = DeBruijnModel::new(5, 2).unwrap();
        assert_eq!(model.instance_set.len(), 10);
        let p = vec![0.5; 32];
        let sol = stationary(&model, &p, SolveMode::Float).unwrap();
        assert!(sol.objective > 0.0);
    }
}
