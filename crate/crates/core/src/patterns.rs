//! Pattern encounters: instance testing with witnesses, the Zimin-specialized
//! recursion, homomorphism counting, and the two unavoidability deciders
//! (Zimin encounter and reduction via free letters / identifications).

use crate::words::{canonical_pattern, prefix_function, Letter, Pattern, Word};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};

/// Certificate that `W[start, end)` is an instance of a pattern: the images
/// of the pattern letters concatenate, in pattern order, to that substring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncounterWitness {
    pub start: usize,
    pub end: usize,
    pub images: Vec<String>,
}

impl EncounterWitness {
    fn new(start: usize, end: usize, images: &[Vec<Letter>]) -> Self {
        EncounterWitness {
            start,
            end,
            images: images.iter().map(|im| Word::new(im.clone()).to_string()).collect(),
        }
    }
}

/// One step of a reduction: delete a free letter or identify two letters.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionStep {
    pub op: String,
    pub letters: Vec<String>,
    pub word: String,
}

/// Sequence of reduction steps ending, on success, at a length-1 word.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

/// Outcome of `is_unavoidable`, with whichever certificates were produced.
#[derive(Clone, Debug, Serialize)]
pub struct UnavoidabilityVerdict {
    pub unavoidable: bool,
    pub witness: Option<EncounterWitness>,
    pub trace: Option<ReductionTrace>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeciderMethod {
    Zimin,
    Bem,
    Both,
}

fn letter_name(c: Letter) -> String {
    if (c as usize) < 26 {
        ((b'a' + c) as char).to_string()
    } else {
        format!("x{c}")
    }
}

/// Searches for a nonerasing homomorphism mapping the pattern onto the whole
/// of `w`. Image lengths are assigned left to right; a repeated letter's
/// image is checked by direct comparison as soon as it is reached.
fn match_exact(w: &[Letter], v: &[Letter], k: usize) -> Option<Vec<Vec<Letter>>> {
    // Remaining minimum length if every unbound occurrence takes one letter.
    fn rec(
        w: &[Letter],
        v: &[Letter],
        vpos: usize,
        wpos: usize,
        images: &mut Vec<Vec<Letter>>,
    ) -> bool {
        if vpos == v.len() {
            return wpos == w.len();
        }
        let x = v[vpos] as usize;
        let rest_min: usize = v[vpos + 1..]
            .iter()
            .map(|&y| if images[y as usize].is_empty() { 1 } else { images[y as usize].len() })
            .sum();
        if !images[x].is_empty() {
            let im = &images[x];
            let end = wpos + im.len();
            if end + rest_min <= w.len() && &w[wpos..end] == im.as_slice() {
                return rec(w, v, vpos + 1, end, images);
            }
            return false;
        }
        let max_len = w.len().saturating_sub(wpos + rest_min);
        for len in 1..=max_len {
            images[x] = w[wpos..wpos + len].to_vec();
            if rec(w, v, vpos + 1, wpos + len, images) {
                return true;
            }
            images[x].clear();
        }
        false
    }

    let mut images: Vec<Vec<Letter>> = vec![Vec::new(); k];
    if rec(w, v, 0, 0, &mut images) {
        Some(images)
    } else {
        None
    }
}

/// Is `W` an instance of `V`? Returns the witness `(0, |W|, φ)` if so.
pub fn is_instance(w: &Word, v: &Pattern) -> Option<EncounterWitness> {
    if v.is_empty() || w.len() < v.len() {
        return None;
    }
    match_exact(w.letters(), v.word().letters(), v.distinct_letters())
        .map(|images| EncounterWitness::new(0, w.len(), &images))
}

/// Does some substring of `W` form a `V`-instance?
pub fn encounters(v: &Pattern, w: &Word) -> bool {
    find_encounter(v, w).is_some()
}

/// First encounter of `V` in `W` in order of (start, end), if any.
pub fn find_encounter(v: &Pattern, w: &Word) -> Option<EncounterWitness> {
    if v.is_empty() {
        return None;
    }
    let n = w.len();
    for a in 0..n {
        for b in (a + v.len())..=n {
            if let Some(images) =
                match_exact(&w.letters()[a..b], v.word().letters(), v.distinct_letters())
            {
                return Some(EncounterWitness::new(a, b, &images));
            }
        }
    }
    None
}

/// The n-th Zimin word: letter at position i (1-based) is the 2-adic
/// valuation of i, so |Z_n| = 2^n - 1.
pub fn zimin_word(n: u32) -> Pattern {
    let len = (1usize << n).saturating_sub(1);
    let letters: Vec<Letter> = (1..=len).map(|i| i.trailing_zeros() as Letter).collect();
    canonical_pattern(&Word::new(letters))
}

/// Zimin-instance test on unpacked words, borders precomputed once per word.
///
/// For n > 1 a word is a `Z_n`-instance iff some border of length
/// `i ∈ [2^(n-1)-1, ceil(|W|/2))` is itself a `Z_(n-1)`-instance. Memoized
/// over (prefix length, order); every recursive call lands on a prefix, whose
/// borders the failure chain of the prefix function enumerates.
pub fn is_zimin_instance(w: &Word, n: u32) -> bool {
    if n == 0 {
        return w.is_empty();
    }
    if w.is_empty() {
        return false;
    }
    if n == 1 {
        return true;
    }
    let pi = prefix_function(w.letters());
    let mut memo: HashMap<(usize, u32), bool> = HashMap::new();
    is_zimin_prefix(w.len(), n, &pi, &mut memo)
}

fn is_zimin_prefix(
    m: usize,
    n: u32,
    pi: &[usize],
    memo: &mut HashMap<(usize, u32), bool>,
) -> bool {
    if n == 1 {
        return m >= 1;
    }
    let min_border = (1usize << (n - 1)) - 1;
    if m < 2 * min_border + 1 {
        return false;
    }
    if let Some(&v) = memo.get(&(m, n)) {
        return v;
    }
    let top = m.div_ceil(2);
    let mut verdict = false;
    let mut b = pi[m];
    while b > 0 {
        if b < top && b >= min_border && is_zimin_prefix(b, n - 1, pi, memo) {
            verdict = true;
            break;
        }
        b = pi[b];
    }
    memo.insert((m, n), verdict);
    verdict
}

/// hom(V, W): the number of encounters (a, b, φ) of `V` in `W`.
pub fn hom_count(v: &Pattern, w: &Word) -> u64 {
    if v.is_empty() {
        return 0;
    }
    fn count_rec(
        w: &[Letter],
        v: &[Letter],
        vpos: usize,
        wpos: usize,
        images: &mut Vec<Vec<Letter>>,
    ) -> u64 {
        if vpos == v.len() {
            return u64::from(wpos == w.len());
        }
        let x = v[vpos] as usize;
        let rest_min: usize = v[vpos + 1..]
            .iter()
            .map(|&y| if images[y as usize].is_empty() { 1 } else { images[y as usize].len() })
            .sum();
        if !images[x].is_empty() {
            let im = &images[x];
            let end = wpos + im.len();
            if end + rest_min <= w.len() && &w[wpos..end] == im.as_slice() {
                return count_rec(w, v, vpos + 1, end, images);
            }
            return 0;
        }
        let mut total = 0;
        let max_len = w.len().saturating_sub(wpos + rest_min);
        for len in 1..=max_len {
            images[x] = w[wpos..wpos + len].to_vec();
            total += count_rec(w, v, vpos + 1, wpos + len, images);
            images[x].clear();
        }
        total
    }

    let n = w.len();
    let mut total = 0;
    for a in 0..n {
        for b in (a + v.len())..=n {
            let mut images: Vec<Vec<Letter>> = vec![Vec::new(); v.distinct_letters()];
            total += count_rec(&w.letters()[a..b], v.word().letters(), 0, 0, &mut images);
        }
    }
    total
}

/// Letters free for `W` in the reduction sense: `x` is free iff no chain
/// `xe0, f0e0, f0e1, f1e1, ..., fnen, fnx` of length-2 factors of `W` exists.
///
/// Such a chain is exactly a path between the edges `(x, e0)` and `(fn, x)`
/// in the bipartite adjacency relation R = {(f, e) : fe <= W}, so the test is
/// a fixed-point reachability computation rather than bounded enumeration.
pub fn free_letters(w: &Word) -> Result<Vec<Letter>> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut pairs: HashSet<(Letter, Letter)> = HashSet::new();
    for win in w.letters().windows(2) {
        pairs.insert((win[0], win[1]));
    }
    let alphabet: Vec<Letter> = {
        let mut seen = [false; 256];
        let mut v = Vec::new();
        for &c in w.letters() {
            if !seen[c as usize] {
                seen[c as usize] = true;
                v.push(c);
            }
        }
        v.sort_unstable();
        v
    };

    let mut free = Vec::new();
    for &x in &alphabet {
        // Grow the set of right letters reachable from x's initial factors,
        // alternating with the left letters adjacent to them.
        let mut rights: HashSet<Letter> =
            pairs.iter().filter(|&&(f, _)| f == x).map(|&(_, e)| e).collect();
        let mut lefts: HashSet<Letter> = HashSet::new();
        loop {
            let new_lefts: Vec<Letter> = pairs
                .iter()
                .filter(|&&(f, e)| rights.contains(&e) && !lefts.contains(&f))
                .map(|&(f, _)| f)
                .collect();
            if new_lefts.is_empty() {
                break;
            }
            lefts.extend(new_lefts);
            let new_rights: Vec<Letter> = pairs
                .iter()
                .filter(|&&(f, e)| lefts.contains(&f) && !rights.contains(&e))
                .map(|&(_, e)| e)
                .collect();
            if new_rights.is_empty() {
                break;
            }
            rights.extend(new_rights);
        }
        let blocked = lefts.iter().any(|&f| pairs.contains(&(f, x)));
        if !blocked {
            free.push(x);
        }
    }
    Ok(free)
}

fn delete_letter(w: &Word, x: Letter) -> Word {
    Word::new(w.letters().iter().copied().filter(|&c| c != x).collect())
}

fn identify(w: &Word, from: Letter, to: Letter) -> Word {
    Word::new(w.letters().iter().map(|&c| if c == from { to } else { c }).collect())
}

/// Breadth-first reduction search: delete-free-letter and identify-letters
/// moves over canonicalized words, states never grow, so the space is finite.
fn bem_reduces_to_single(v: &Pattern) -> Option<ReductionTrace> {
    #[derive(Clone)]
    struct Node {
        word: Pattern,
        steps: Vec<ReductionStep>,
    }
    let start = v.clone();
    if start.len() == 1 {
        return Some(ReductionTrace { steps: Vec::new() });
    }
    let mut seen: HashSet<Word> = HashSet::new();
    seen.insert(start.word().clone());
    let mut queue = VecDeque::new();
    queue.push_back(Node { word: start, steps: Vec::new() });
    while let Some(node) = queue.pop_front() {
        let w = node.word.word();
        let mut moves: Vec<(ReductionStep, Pattern)> = Vec::new();
        if let Ok(free) = free_letters(w) {
            for x in free {
                let reduced = canonical_pattern(&delete_letter(w, x));
                moves.push((
                    ReductionStep {
                        op: "delete-free-letter".into(),
                        letters: vec![letter_name(x)],
                        word: reduced.to_string(),
                    },
                    reduced,
                ));
            }
        }
        let k = node.word.distinct_letters() as u8;
        for from in 0..k {
            for to in 0..k {
                if from == to {
                    continue;
                }
                let reduced = canonical_pattern(&identify(w, from, to));
                moves.push((
                    ReductionStep {
                        op: "identify".into(),
                        letters: vec![letter_name(from), letter_name(to)],
                        word: reduced.to_string(),
                    },
                    reduced,
                ));
            }
        }
        for (step, reduced) in moves {
            if reduced.is_empty() || !seen.insert(reduced.word().clone()) {
                continue;
            }
            let mut steps = node.steps.clone();
            steps.push(step);
            if reduced.len() == 1 {
                return Some(ReductionTrace { steps });
            }
            queue.push_back(Node { word: reduced, steps });
        }
    }
    None
}

/// Decides unavoidability of `V` by the requested method. With
/// `DeciderMethod::Both` the two classifications must agree; disagreement is
/// reported as an error since it can only come from an implementation bug.
pub fn is_unavoidable(v: &Pattern, method: DeciderMethod) -> Result<UnavoidabilityVerdict> {
    if v.is_empty() {
        return Err(Error::EmptyWord);
    }
    let zimin = |v: &Pattern| -> (bool, Option<EncounterWitness>) {
        let k = v.distinct_letters() as u32;
        let z = zimin_word(k);
        match find_encounter(v, z.word()) {
            Some(w) => (true, Some(w)),
            None => (false, None),
        }
    };
    match method {
        DeciderMethod::Zimin => {
            let (unavoidable, witness) = zimin(v);
            Ok(UnavoidabilityVerdict { unavoidable, witness, trace: None })
        }
        DeciderMethod::Bem => {
            let trace = bem_reduces_to_single(v);
            Ok(UnavoidabilityVerdict { unavoidable: trace.is_some(), witness: None, trace })
        }
        DeciderMethod::Both => {
            let (zv, witness) = zimin(v);
            let trace = bem_reduces_to_single(v);
            let bv = trace.is_some();
            if zv != bv {
                return Err(Error::DeciderDisagreement(v.to_string(), zv, bv));
            }
            Ok(UnavoidabilityVerdict { unavoidable: zv, witness, trace })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::enumerate_words;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn pat(s: &str) -> Pattern {
        Pattern::parse(s).unwrap()
    }

    #[test]
    fn is_instance_examples() {
        // 1111 is an instance of aba (e.g. a->1, b->11).
        let witness = is_instance(&w("1111"), &pat("010")).unwrap();
        assert_eq!((witness.start, witness.end), (0, 4));
        // anan is an instance of xx with x->an (a=1, n=2).
        let witness = is_instance(&w("1212"), &pat("00")).unwrap();
        assert_eq!(witness.images, vec!["12"]);
        // Nonerasing images force |W| >= |V|.
        assert!(is_instance(&w("01"), &pat("010")).is_none());
    }

    #[test]
    fn witness_images_concatenate() {
        let word = w("0120112");
        for p in ["010", "001", "0102"] {
            if let Some(wit) = is_instance(&word, &pat(p)) {
                let joined: String = pat(p)
                    .word()
                    .letters()
                    .iter()
                    .map(|&x| wit.images[x as usize].clone())
                    .collect();
                assert_eq!(joined, word.to_string());
                assert!(wit.images.iter().all(|im| !im.is_empty()));
            }
        }
    }

    #[test]
    fn encounter_examples() {
        // banana encounters xx (anan, nana); codes: b=0,a=1,n=2.
        assert!(encounters(&pat("00"), &w("012121")));
        // 0011 avoids aba.
        assert!(!encounters(&pat("010"), &w("0011")));
        // W = V encounters V.
        assert!(encounters(&pat("0120"), &w("0120")));
    }

    #[test]
    fn zimin_word_construction() {
        assert_eq!(zimin_word(0).len(), 0);
        assert_eq!(zimin_word(1).to_string(), "a");
        assert_eq!(zimin_word(2).to_string(), "aba");
        assert_eq!(zimin_word(3).to_string(), "abacaba");
        assert_eq!(zimin_word(4).to_string(), "abacabadabacaba");
        for n in 1..=6 {
            let z = zimin_word(n);
            assert_eq!(z.len(), (1 << n) - 1);
            // The letter introduced last occurs exactly once.
            assert!(!z.is_doubled());
            let mut mults = z.multiplicities().to_vec();
            mults.sort_unstable();
            let expected: Vec<u32> = (0..n).map(|j| 1u32 << j).collect();
            assert_eq!(mults, expected);
        }
    }

    #[test]
    fn zimin_instance_recursion_examples() {
        assert!(is_zimin_instance(&w("7"), 1));
        assert!(is_zimin_instance(&w("111111111111111"), 4));
        assert!(!is_zimin_instance(&w("0011"), 2));
        assert!(is_zimin_instance(&w("0110"), 2));
    }

    #[test]
    fn zimin_specialization_matches_generic_matcher() {
        // is_zimin_instance(W, n) == is_instance(W, Z_n).is_some() for all
        // binary words up to length 10 and n in 1..=3.
        for n in 1..=3u32 {
            let z = zimin_word(n);
            for len in 0..=10 {
                for word in enumerate_words(2, len, 1 << 20).unwrap() {
                    assert_eq!(
                        is_zimin_instance(&word, n),
                        is_instance(&word, &z).is_some(),
                        "word {word} n {n}"
                    );
                }
            }
        }
    }

    #[test]
    fn hom_count_examples() {
        // hom(ab, cde) = 4.
        assert_eq!(hom_count(&pat("01"), &w("012")), 4);
        // hom(a, W) = |W|(|W|+1)/2.
        assert_eq!(hom_count(&pat("0"), &w("01210")), 15);
        // hom(aa, 0101): only 0101 = 01·01.
        assert_eq!(hom_count(&pat("00"), &w("0101")), 1);
    }

    #[test]
    fn free_letter_examples() {
        // Single letter: no length-2 factors at all.
        assert_eq!(free_letters(&w("0")).unwrap(), vec![0]);
        // aba: both letters are free (no chain can close).
        assert_eq!(free_letters(&w("010")).unwrap(), vec![0, 1]);
        // aa: the chain (aa, aa, aa) blocks a.
        assert_eq!(free_letters(&w("00")).unwrap(), Vec::<Letter>::new());
        // abba: ab, bb, ba connect everything.
        assert_eq!(free_letters(&w("0110")).unwrap(), Vec::<Letter>::new());
    }

    #[test]
    fn unavoidability_examples() {
        // aba is unavoidable.
        assert!(is_unavoidable(&pat("010"), DeciderMethod::Both).unwrap().unavoidable);
        // aa is doubled, hence avoidable.
        assert!(!is_unavoidable(&pat("00"), DeciderMethod::Both).unwrap().unavoidable);
        // abcba decided by both methods, which must agree.
        let verdict = is_unavoidable(&pat("01210"), DeciderMethod::Both).unwrap();
        assert!(verdict.unavoidable);
        assert!(verdict.trace.is_some());
    }

    #[test]
    fn encounter_is_factor_monotone() {
        let v = pat("010");
        let inner = w("0110");
        assert!(encounters(&v, &inner));
        assert!(encounters(&v, &w("220110")));
        assert!(encounters(&v, &w("011022")));
    }
}
