//! Exact and sampled word densities: instance density, factor density,
//! finite-length instance probabilities, expected densities, the Zimin
//! density scatter data, and the liminf-density bound formulas.
//!
//! Densities are exact rationals end to end; floats appear only in the
//! Monte Carlo estimator and at serialization.

use crate::series::{qpow, to_f64};
use crate::words::{canonical_pattern, prefix_function, shortest_border_table, Pattern, Word};
use crate::{patterns, Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;

/// An exact substring-density value: `numerator` qualifying substrings out
/// of C(|W|+1, 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityValue {
    pub numerator: u64,
    pub denominator: u64,
}

impl DensityValue {
    pub fn as_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numerator), BigInt::from(self.denominator))
    }

    pub fn as_float(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

fn pairs(n: usize) -> u64 {
    (n as u64) * (n as u64 + 1) / 2
}

/// Counts substrings of `w` that are instances of the order-n Zimin word,
/// using per-start border tables: a substring is an order-2 instance iff its
/// shortest border b satisfies 2b < len, and an order-n instance iff some
/// border b with 2b < len has an order-(n-1)-instance prefix.
pub fn zimin_substring_count(w: &[u8], order: u32) -> u64 {
    if order == 0 {
        return 0;
    }
    if order == 1 {
        return pairs(w.len());
    }
    let n = w.len();
    let mut total = 0u64;
    for start in 0..n {
        let tail = &w[start..];
        let pi = prefix_function(tail);
        let shortest = shortest_border_table(&pi);
        // Order-2 verdicts per prefix length.
        let mut cur: Vec<bool> = (0..=tail.len())
            .map(|m| shortest[m] >= 1 && 2 * shortest[m] < m)
            .collect();
        for ord in 3..=order {
            let prev = cur.clone();
            for (m, slot) in cur.iter_mut().enumerate() {
                let mut verdict = false;
                let mut b = pi[m];
                while b > 0 {
                    if 2 * b < m && prev[b] {
                        verdict = true;
                        break;
                    }
                    b = pi[b];
                }
                *slot = verdict;
            }
            let _ = ord;
        }
        total += cur.iter().filter(|&&v| v).count() as u64;
    }
    total
}

/// Instance density of a pattern in a word: the proportion of the
/// C(|W|+1,2) substrings that are V-instances.
pub fn instance_density(v: &Pattern, w: &Word) -> Result<DensityValue> {
    if v.is_empty() || w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let denominator = pairs(w.len());
    // Zimin patterns get the border-table fast path.
    for order in 1..=6u32 {
        if (1usize << order) - 1 == v.len() && *v == patterns::zimin_word(order) {
            let numerator = zimin_substring_count(w.letters(), order);
            return Ok(DensityValue { numerator, denominator });
        }
    }
    let mut numerator = 0u64;
    let n = w.len();
    for a in 0..n {
        for b in (a + v.len())..=n {
            let sub = Word::new(w.letters()[a..b].to_vec());
            if patterns::is_instance(&sub, v).is_some() {
                numerator += 1;
            }
        }
    }
    Ok(DensityValue { numerator, denominator })
}

/// Factor density: occurrences of `v` as a factor of `w` over |W|+1-|V|
/// windows.
pub fn factor_density(v: &Word, w: &Word) -> Result<BigRational> {
    if v.is_empty() || w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if v.len() > w.len() {
        return Err(Error::IndexOutOfRange { i: 0, j: v.len(), len: w.len() });
    }
    let windows = w.len() + 1 - v.len();
    let hits = w
        .letters()
        .windows(v.len())
        .filter(|win| *win == v.letters())
        .count();
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(windows)))
}

/// Exact count of q-ary length-M words that are order-2 Zimin instances:
/// `sum_{l=1}^{ceil(M/2)-1} a_l q^(M-2l)` over bifix-free counts a_l.
pub fn z2_instance_count_exact(m: usize, q: u32) -> BigInt {
    if m < 3 {
        return BigInt::zero();
    }
    let top = m.div_ceil(2) - 1;
    let a = crate::series::bifix_free_counts(q, top);
    let mut total = BigInt::zero();
    for l in 1..=top {
        total += a.get(l) * BigInt::from(q).pow((m - 2 * l) as u32);
    }
    total
}

/// Probability that a uniform random length-n q-ary word is a V-instance,
/// exactly. Uses the closed count for the order-2 Zimin pattern and full
/// enumeration otherwise (subject to `budget`).
pub fn instance_probability_exact(
    v: &Pattern,
    q: u8,
    n: usize,
    budget: u128,
) -> Result<BigRational> {
    if v.is_empty() {
        return Err(Error::EmptyWord);
    }
    let qn = qpow(q as u32, n as i64);
    if *v == patterns::zimin_word(2) {
        return Ok(BigRational::from_integer(z2_instance_count_exact(n, q as u32)) / qn);
    }
    if v.len() > n {
        return Ok(BigRational::zero());
    }
    let mut count = 0u64;
    for w in crate::words::enumerate_words(q, n, budget)? {
        if patterns::is_instance(&w, v).is_some() {
            count += 1;
        }
    }
    Ok(BigRational::from_integer(BigInt::from(count)) / qn)
}

/// Expected density of V in a uniform random length-n word, exactly:
/// `[sum_{m=1}^{n} (n+1-m) I_m(V,q)] / C(n+1,2)`.
pub fn expected_density_exact(v: &Pattern, q: u8, n: usize, budget: u128) -> Result<BigRational> {
    if v.is_empty() || n == 0 {
        return Err(Error::EmptyWord);
    }
    let mut acc = BigRational::zero();
    for m in 1..=n {
        let im = instance_probability_exact(v, q, m, budget)?;
        acc += BigRational::from_integer(BigInt::from((n + 1 - m) as u64)) * im;
    }
    Ok(acc / BigRational::from_integer(BigInt::from(pairs(n))))
}

/// Monte Carlo estimate of the expected instance density.
#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Samples `samples` uniform words of [q]^n and averages the V-density.
/// Sample i draws from an independent ChaCha stream i of the seed, so the
/// result is byte-identical for any thread count.
pub fn monte_carlo_density(
    v: &Pattern,
    q: u8,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if v.is_empty() || n == 0 {
        return Err(Error::EmptyWord);
    }
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let zimin_order =
        (1..=6u32).find(|&o| (1usize << o) - 1 == v.len() && *v == patterns::zimin_word(o));
    let values: Result<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let side = Uniform::new(0u8, q);
            let letters: Vec<u8> = (0..n).map(|_| side.sample(&mut rng)).collect();
            let density = match zimin_order {
                Some(order) => {
                    zimin_substring_count(&letters, order) as f64 / pairs(n) as f64
                }
                None => instance_density(v, &Word::new(letters))?.as_float(),
            };
            Ok(density)
        })
        .collect();
    let values = values?;
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = if samples > 1 {
        values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (samples as f64 - 1.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate { mean, std_error: (var / samples as f64).sqrt(), samples })
}

/// The set of attained (Z2-density, Z3-density) pairs over all of [q]^n.
#[derive(Clone, Debug, Serialize)]
pub struct ScatterDataset {
    pub q: u8,
    pub n: usize,
    /// Substring-count pairs (z2, z3); shared denominator C(n+1,2).
    pub points: Vec<(u64, u64)>,
    pub denominator: u64,
    pub min_z2: (u64, u64),
    pub max_z2: (u64, u64),
}

impl ScatterDataset {
    pub fn csv(&self) -> String {
        let mut out = String::from("x_num,x_den,y_num,y_den\n");
        for (z2, z3) in &self.points {
            out.push_str(&format!("{z2},{d},{z3},{d}\n", d = self.denominator));
        }
        out
    }
}

/// Enumerates all of [q]^n and collects the distinct pairs of Z2/Z3
/// substring counts.
pub fn scatter_z2_z3(q: u8, n: usize, budget: u128) -> Result<ScatterDataset> {
    let count = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > budget {
        return Err(Error::EnumerationBudget { count, budget });
    }
    let total = count as u64;
    let chunks: u64 = 256.min(total.max(1));
    let per_chunk = total.div_ceil(chunks);
    let sets: Vec<BTreeSet<(u64, u64)>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut set = BTreeSet::new();
            let mut letters = vec![0u8; n];
            let start = chunk * per_chunk;
            let end = ((chunk + 1) * per_chunk).min(total);
            for index in start..end {
                // Decode index into the length-n base-q word.
                let mut rem = index;
                for slot in letters.iter_mut().rev() {
                    *slot = (rem % q as u64) as u8;
                    rem /= q as u64;
                }
                let z2 = zimin_substring_count(&letters, 2);
                let z3 = zimin_substring_count(&letters, 3);
                set.insert((z2, z3));
            }
            set
        })
        .collect();
    let mut points: BTreeSet<(u64, u64)> = BTreeSet::new();
    for s in sets {
        points.extend(s);
    }
    let points: Vec<(u64, u64)> = points.into_iter().collect();
    let min_z2 = points.iter().copied().min().unwrap_or((0, 0));
    let max_z2 = points.iter().copied().max().unwrap_or((0, 0));
    Ok(ScatterDataset { q, n, points, denominator: pairs(n), min_z2, max_z2 })
}

/// One labeled bound value in a liminf-density report.
#[derive(Clone, Debug, Serialize)]
pub struct BoundValue {
    pub label: String,
    pub num: String,
    pub den: String,
    pub float: f64,
}

fn bound_value(label: &str, value: BigRational) -> BoundValue {
    BoundValue {
        label: label.to_string(),
        num: value.numer().to_string(),
        den: value.denom().to_string(),
        float: to_f64(&value),
    }
}

/// Lower bounds on the liminf density of the order-n Zimin word over [q].
#[derive(Clone, Debug, Serialize)]
pub struct LiminfReport {
    pub n: u32,
    pub q: u8,
    pub lower_bounds: Vec<BoundValue>,
}

/// Evaluates every applicable closed-form liminf lower bound. `f_prev` and
/// `m_prev` are f(n-1,q) and m(n-1,q) when known.
pub fn liminf_bound_report(
    n: u32,
    q: u8,
    f_prev: Option<u64>,
    m_prev: Option<u64>,
) -> Result<LiminfReport> {
    if n < 2 || q < 2 {
        return Err(Error::InvalidInput("liminf bounds need n >= 2 and q >= 2".into()));
    }
    let mut lower_bounds = Vec::new();
    if n == 2 {
        lower_bounds.push(bound_value("exact", qpow(q as u32, -1)));
    }
    if n >= 3 {
        if let Some(f) = f_prev {
            let spliced = BigInt::from(f) - BigInt::from(2u32).pow(n - 1) + 2;
            let spliced_sq = &spliced * &spliced;
            lower_bounds.push(bound_value(
                "theorem form",
                BigRational::new(
                    BigInt::one(),
                    spliced_sq.clone() * BigInt::from(q).pow(f as u32 + 1),
                ),
            ));
            lower_bounds.push(bound_value(
                "appendix form",
                BigRational::new(
                    BigInt::one(),
                    BigInt::from(f * f) * BigInt::from(q).pow(f as u32 + 1),
                ),
            ));
            if let Some(m) = m_prev {
                lower_bounds.push(bound_value(
                    "minimal-instance form",
                    BigRational::new(BigInt::one(), spliced_sq * BigInt::from(m)),
                ));
            }
        }
        if n == 3 {
            // 1/((2q-1)^2 q! 2^q) in closed form.
            let mut den = BigInt::from((2 * q as u64 - 1) * (2 * q as u64 - 1));
            for k in 2..=(q as u64) {
                den *= BigInt::from(k);
            }
            den *= BigInt::from(2u32).pow(q as u32);
            lower_bounds.push(bound_value("closed form", BigRational::new(BigInt::one(), den)));
        }
    }
    Ok(LiminfReport { n, q, lower_bounds })
}

/// Constructs a word whose factor densities of a^k and a^l approximate a
/// requested point (d_k, d_l) of the attainable triangle, together with its
/// exact measured densities.
pub fn akal_density_family(
    k: u32,
    l: u32,
    d_k: &BigRational,
    d_l: &BigRational,
    r: u64,
) -> Result<(Word, BigRational, BigRational)> {
    if k == 0 || l <= k {
        return Err(Error::InvalidInput("need 0 < k < l".into()));
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    if d_l < &zero || d_l > d_k || d_k > &one {
        return Err(Error::InvalidInput("need 0 <= d_l <= d_k <= 1".into()));
    }
    // Region check k(d_l - 1) >= l(d_k - 1).
    let lhs = BigRational::from_integer(BigInt::from(k)) * (d_l - &one);
    let rhs = BigRational::from_integer(BigInt::from(l)) * (d_k - &one);
    if lhs < rhs {
        return Err(Error::InvalidInput(
            "(d_k, d_l) lies outside the attainable triangle".into(),
        ));
    }
    // Common denominator v with d_k = u_k/v, d_l = u_l/v.
    let v_den: BigInt = num_integer::lcm(d_k.denom().clone(), d_l.denom().clone());
    let v: u64 = (&v_den)
        .try_into()
        .map_err(|_| Error::InvalidInput("denominators too large".into()))?;
    let u_k: u64 = ((d_k * BigRational::from_integer(v_den.clone())).to_integer())
        .try_into()
        .map_err(|_| Error::InvalidInput("numerator too large".into()))?;
    let u_l: u64 = ((d_l * BigRational::from_integer(v_den)).to_integer())
        .try_into()
        .map_err(|_| Error::InvalidInput("numerator too large".into()))?;

    // W_r = a^(r u_l) (b a^(l-1))^t b^(r'), t = floor(r(u_k - u_l)/(l - k)),
    // r' chosen so that |W_r| = v r.
    let t = r * (u_k - u_l) / (l - k) as u64;
    let used = r * u_l + (l as u64) * t;
    let total = v * r;
    if used > total {
        return Err(Error::InvalidInput(format!(
            "r = {r} too small for this density point"
        )));
    }
    let r_prime = total - used;
    let mut letters = Vec::with_capacity(total as usize);
    letters.extend(std::iter::repeat(0u8).take((r * u_l) as usize));
    for _ in 0..t {
        letters.push(1);
        letters.extend(std::iter::repeat(0u8).take(l as usize - 1));
    }
    letters.extend(std::iter::repeat(1u8).take(r_prime as usize));
    let word = Word::new(letters);
    let ak = Word::new(vec![0; k as usize]);
    let al = Word::new(vec![0; l as usize]);
    let mk = factor_density(&ak, &word)?;
    let ml = factor_density(&al, &word)?;
    Ok((word, mk, ml))
}

/// The block word 0^k 1^k ... (q-1)^k and its exact order-2 Zimin density
/// q (C(k,2) - (k-1)) / C(qk+1, 2), which tends to 1/q.
pub fn extremal_z2_family(q: u8, k: u64) -> Result<(Word, BigRational)> {
    if q < 2 || k < 3 {
        return Err(Error::InvalidInput("need q >= 2 and k >= 3".into()));
    }
    let mut letters = Vec::with_capacity((q as u64 * k) as usize);
    for c in 0..q {
        letters.extend(std::iter::repeat(c).take(k as usize));
    }
    let word = Word::new(letters);
    let count = BigInt::from(q) * (BigInt::from(k * (k - 1) / 2) - BigInt::from(k - 1));
    let total = {
        let len = BigInt::from(q as u64 * k);
        (&len * (&len + BigInt::one())) / BigInt::from(2)
    };
    Ok((word, BigRational::new(count, total)))
}

/// Expectation reference point for scatter plots: exact expected densities
/// of the order-2 and order-3 Zimin words at length n.
pub fn expected_density_point(q: u8, n: usize, budget: u128) -> Result<(f64, f64)> {
    let z2 = expected_density_exact(&patterns::zimin_word(2), q, n, budget)?;
    let z3 = expected_density_exact(&patterns::zimin_word(3), q, n, budget)?;
    Ok((to_f64(&z2), to_f64(&z3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::zimin_word;
    use crate::words::enumerate_words;
    use num_traits::Signed;

    fn pat(s: &str) -> Pattern {
        Pattern::parse(s).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Brute-force instance density used as the oracle for the fast paths.
    fn density_oracle(v: &Pattern, word: &Word) -> (u64, u64) {
        let n = word.len();
        let mut num = 0;
        for a in 0..n {
            for b in (a + 1)..=n {
                let sub = Word::new(word.letters()[a..b].to_vec());
                if patterns::is_instance(&sub, v).is_some() {
                    num += 1;
                }
            }
        }
        (num, pairs(n))
    }

    #[test]
    fn instance_density_examples() {
        // banana (b=0,a=1,n=2): two of the 21 substrings are xx-instances.
        let d = instance_density(&pat("00"), &w("012121")).unwrap();
        assert_eq!((d.numerator, d.denominator), (2, 21));
        // Z_1 has density 1 in any nonempty word.
        let d = instance_density(&zimin_word(1), &w("0312")).unwrap();
        assert_eq!(d.numerator, d.denominator);
        // aba in 00000: all substrings of length >= 3.
        let d = instance_density(&pat("010"), &w("00000")).unwrap();
        let oracle = density_oracle(&pat("010"), &w("00000"));
        assert_eq!((d.numerator, d.denominator), oracle);
        assert_eq!(oracle.0, 6);
    }

    #[test]
    fn zimin_fast_path_matches_oracle() {
        for n in 0..=9usize {
            for word in enumerate_words(2, n, 1 << 14).unwrap() {
                for order in 2..=3u32 {
                    let fast = zimin_substring_count(word.letters(), order);
                    let (slow, _) = density_oracle(&zimin_word(order), &word);
                    assert_eq!(fast, slow, "word {word} order {order}");
                }
            }
        }
    }

    #[test]
    fn factor_density_examples() {
        assert_eq!(factor_density(&w("00"), &w("000")).unwrap(), rat(1, 1));
        assert_eq!(factor_density(&w("01"), &w("0101")).unwrap(), rat(2, 3));
        assert!(factor_density(&w("000"), &w("00")).is_err());
    }

    #[test]
    fn factor_density_monotone_in_power_length() {
        // d(a^l, W) <= d(a^k, W) for k < l over all binary words len <= 12.
        for n in 3..=12usize {
            for word in enumerate_words(2, n, 1 << 14).unwrap() {
                let d1 = factor_density(&w("0"), &word).unwrap();
                let d2 = factor_density(&w("00"), &word).unwrap();
                let d3 = factor_density(&w("000"), &word).unwrap();
                assert!(d2 <= d1);
                assert!(d3 <= d2);
            }
        }
    }

    #[test]
    fn z2_instance_counts() {
        assert_eq!(z2_instance_count_exact(4, 2), BigInt::from(8));
        assert_eq!(z2_instance_count_exact(3, 2), BigInt::from(4));
        // Oracle equivalence for all m <= 14 at q = 2.
        let z2 = zimin_word(2);
        for m in 1..=14usize {
            let brute = enumerate_words(2, m, 1 << 20)
                .unwrap()
                .filter(|word| patterns::is_instance(word, &z2).is_some())
                .count();
            assert_eq!(z2_instance_count_exact(m, 2), BigInt::from(brute), "m={m}");
        }
    }

    #[test]
    fn instance_probability_examples() {
        // I_4(aba, 2) = 8/16.
        let p = instance_probability_exact(&pat("010"), 2, 4, 1 << 20).unwrap();
        assert_eq!(p, rat(1, 2));
        // Doubled word too short.
        let p = instance_probability_exact(&pat("00"), 2, 1, 1 << 20).unwrap();
        assert_eq!(p, rat(0, 1));
    }

    #[test]
    fn z2_monotone_up_to_18() {
        let mut prev = BigRational::zero();
        for m in 1..=18usize {
            let p = BigRational::from_integer(z2_instance_count_exact(m, 2)) / qpow(2, m as i64);
            assert!(p >= prev, "m={m}");
            prev = p;
        }
    }

    #[test]
    fn expected_density_matches_average_oracle() {
        // Fact-EI identity against the brute-force average for small cases.
        for v in ["010", "00", "011"] {
            let v = pat(v);
            for n in 1..=8usize {
                let expected = expected_density_exact(&v, 2, n, 1 << 20).unwrap();
                let mut acc = BigRational::zero();
                let mut count = 0u64;
                for word in enumerate_words(2, n, 1 << 20).unwrap() {
                    let d = instance_density(&v, &word).unwrap();
                    acc += d.as_rational();
                    count += 1;
                }
                let avg = acc / BigRational::from_integer(BigInt::from(count));
                assert_eq!(expected, avg, "v={v} n={n}");
            }
        }
    }

    #[test]
    fn monte_carlo_reproducible_and_sane() {
        let v = zimin_word(2);
        let a = monte_carlo_density(&v, 2, 300, 64, 42).unwrap();
        let b = monte_carlo_density(&v, 2, 300, 64, 42).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        // Unary alphabet: density of Z_2 in 1^n counts all substrings len >= 3.
        let c = monte_carlo_density(&v, 1, 10, 4, 1).unwrap();
        assert!((c.mean - 36.0 / 55.0).abs() < 1e-12);
        assert_eq!(c.std_error, 0.0);
    }

    #[test]
    fn scatter_small_case() {
        let s = scatter_z2_z3(2, 8, 1 << 20).unwrap();
        // y <= x for every point.
        assert!(s.points.iter().all(|&(x, y)| y <= x));
        // Constant words attain the maximum.
        let max_count = zimin_substring_count(&[0; 8], 2);
        assert_eq!(s.max_z2.0, max_count);
    }

    #[test]
    fn liminf_bound_values() {
        let r = liminf_bound_report(3, 2, Some(5), Some(6)).unwrap();
        let minimal = r.lower_bounds.iter().find(|b| b.label == "minimal-instance form").unwrap();
        assert_eq!((minimal.num.as_str(), minimal.den.as_str()), ("1", "54"));
        let closed = r.lower_bounds.iter().find(|b| b.label == "closed form").unwrap();
        assert_eq!(closed.den, "54");

        let r = liminf_bound_report(4, 2, Some(29), Some(7882)).unwrap();
        let minimal = r.lower_bounds.iter().find(|b| b.label == "minimal-instance form").unwrap();
        assert_eq!(minimal.den, "4169578");
        let appendix = r.lower_bounds.iter().find(|b| b.label == "appendix form").unwrap();
        assert!((appendix.float / 1.11e-12 - 1.0).abs() < 5e-3);

        let r = liminf_bound_report(3, 3, None, None).unwrap();
        let closed = r.lower_bounds.iter().find(|b| b.label == "closed form").unwrap();
        assert_eq!(closed.den, "1200");
        assert!((closed.float / 8.33e-4 - 1.0).abs() < 5e-3);

        let r = liminf_bound_report(2, 5, None, None).unwrap();
        assert_eq!(r.lower_bounds[0].den, "5");
    }

    #[test]
    fn akal_family_examples() {
        let (word, dk, dl) = akal_density_family(1, 2, &rat(1, 2), &rat(0, 1), 40).unwrap();
        assert_eq!(word.len(), 80);
        assert_eq!(dl, rat(0, 1));
        let err = (to_f64(&dk) - 0.5).abs() / 0.5;
        assert!(err < 0.05, "relative error {err}");
        // Vertex (1 - k/l, 0) is reachable.
        let (_, dk, dl) = akal_density_family(1, 2, &rat(1, 2), &rat(0, 1), 200).unwrap();
        assert!((to_f64(&dk) - 0.5).abs() < 0.01);
        assert_eq!(dl, rat(0, 1));
        // (1,1) gives the constant word.
        let (word, dk, dl) = akal_density_family(1, 2, &rat(1, 1), &rat(1, 1), 5).unwrap();
        assert!(word.letters().iter().all(|&c| c == 0));
        assert_eq!(dk, rat(1, 1));
        assert_eq!(dl, rat(1, 1));
        // Region violations error.
        assert!(akal_density_family(1, 2, &rat(1, 2), &rat(3, 4), 10).is_err());
        assert!(akal_density_family(1, 2, &rat(9, 10), &rat(0, 1), 10).is_err());
    }

    #[test]
    fn extremal_family_examples() {
        let (word, d) = extremal_z2_family(2, 200).unwrap();
        assert_eq!(word.len(), 400);
        assert!((to_f64(&d) - 0.5).abs() / 0.5 < 0.02);
        let (_, d) = extremal_z2_family(3, 300).unwrap();
        assert!((to_f64(&d) - 1.0 / 3.0).abs() / (1.0 / 3.0) < 0.02);
        let (_, d) = extremal_z2_family(4, 3).unwrap();
        assert!(d.is_positive());
    }

    #[test]
    fn extremal_family_formula_matches_direct_count() {
        for q in 2..=3u8 {
            for k in [3u64, 5, 8, 12, 20] {
                let (word, formula) = extremal_z2_family(q, k).unwrap();
                let direct = instance_density(&zimin_word(2), &word).unwrap().as_rational();
                assert_eq!(formula, direct, "q={q} k={k}");
            }
        }
    }
}
