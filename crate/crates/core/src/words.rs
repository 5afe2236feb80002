//! Reduced words over a free group of finite rank: arithmetic, parsing and
//! formatting, exact ball/sphere counting, length-lexicographic enumeration,
//! and exact uniform sampling from balls.
//!
//! A [`Word`] is always stored freely reduced (no adjacent `x x⁻¹` pair), so
//! every operation can assume reduced inputs and produce reduced outputs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::Error;

/// Number of free generators; always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank(usize);

impl Rank {
    pub fn new(n: usize) -> Result<Rank, Error> {
        if n == 0 {
            Err(Error::ZeroRank)
        } else {
            Ok(Rank(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Size of the signed generator alphabet, `2n`.
    pub fn alphabet_size(self) -> usize {
        2 * self.0
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exponent carried by a single letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// One signed generator occurrence. The derived ordering is
/// `a < a⁻¹ < b < b⁻¹ < …`, which fixes enumeration and witness tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    gen: usize,
    sign: Sign,
}

impl Letter {
    /// `gen` is the zero-based generator index.
    pub fn new(gen: usize, sign: Sign) -> Letter {
        Letter { gen, sign }
    }

    pub fn gen(self) -> usize {
        self.gen
    }

    pub fn sign(self) -> Sign {
        self.sign
    }

    pub fn inverse(self) -> Letter {
        Letter {
            gen: self.gen,
            sign: self.sign.flip(),
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.sign != other.sign
    }

    /// Position in the fixed alphabet order `a, a⁻¹, b, b⁻¹, …`.
    fn alphabet_index(self) -> usize {
        2 * self.gen
            + match self.sign {
                Sign::Plus => 0,
                Sign::Minus => 1,
            }
    }

    fn from_alphabet_index(idx: usize) -> Letter {
        Letter {
            gen: idx / 2,
            sign: if idx % 2 == 0 { Sign::Plus } else { Sign::Minus },
        }
    }
}

/// A freely reduced word over `rank` generators. The empty word is the
/// identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: Rank,
    letters: Vec<Letter>,
}

impl Word {
    /// The identity element.
    pub fn identity(rank: Rank) -> Word {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// Single-letter word for the zero-based generator `gen`.
    pub fn generator(rank: Rank, gen: usize, sign: Sign) -> Result<Word, Error> {
        if gen >= rank.get() {
            return Err(Error::GeneratorOutOfRange {
                index: gen,
                rank: rank.get(),
            });
        }
        Ok(Word {
            rank,
            letters: vec![Letter::new(gen, sign)],
        })
    }

    /// Freely reduces an arbitrary letter sequence. Idempotent; rejects
    /// letters outside the rank.
    pub fn reduce(rank: Rank, raw: impl IntoIterator<Item = Letter>) -> Result<Word, Error> {
        let mut stack: Vec<Letter> = Vec::new();
        for letter in raw {
            if letter.gen() >= rank.get() {
                return Err(Error::GeneratorOutOfRange {
                    index: letter.gen(),
                    rank: rank.get(),
                });
            }
            push_reduced(&mut stack, letter);
        }
        Ok(Word {
            rank,
            letters: stack,
        })
    }

    /// Builds a word that is already known to be reduced and in-rank.
    /// Debug builds verify the invariant.
    fn from_reduced(rank: Rank, letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|w| !w[0].cancels(w[1])));
        debug_assert!(letters.iter().all(|l| l.gen() < rank.get()));
        Word { rank, letters }
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    /// Reduced word length `|w|`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &Word) -> Result<Word, Error> {
        self.check_rank(other)?;
        let mut stack = Vec::with_capacity(self.len() + other.len());
        stack.extend_from_slice(&self.letters);
        for &letter in &other.letters {
            push_reduced(&mut stack, letter);
        }
        Ok(Word::from_reduced(self.rank, stack))
    }

    /// Reversed sequence with flipped signs; `w · w⁻¹ = ε`.
    pub fn inverse(&self) -> Word {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        Word::from_reduced(self.rank, letters)
    }

    /// Number of letter pairs that cancel at the junction of `self · other`.
    /// Computed by a direct two-sided scan, independently of [`Word::concat`],
    /// so the length law `|xy| = |x| + |y| − 2·cancellation_len(x, y)` is a
    /// genuine cross-check between the two routes.
    pub fn cancellation_len(&self, other: &Word) -> Result<usize, Error> {
        self.check_rank(other)?;
        let max = self.len().min(other.len());
        let mut t = 0;
        while t < max && self.letters[self.len() - 1 - t].cancels(other.letters[t]) {
            t += 1;
        }
        Ok(t)
    }

    /// Contiguous subword `self[start..end)` as a word in the same group.
    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word::from_reduced(self.rank, self.letters[start..end].to_vec())
    }

    /// Signed number of occurrences of the zero-based generator `gen`.
    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen() == gen)
            .map(|l| match l.sign() {
                Sign::Plus => 1,
                Sign::Minus => -1,
            })
            .sum()
    }

    /// Length-lexicographic comparison: shorter words first, ties broken by
    /// the letter order `a < a⁻¹ < b < b⁻¹ < …`.
    pub fn length_lex_cmp(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }

    /// Zero-based position of this word in the length-lexicographic
    /// enumeration of its group, i.e. the number of words strictly before it.
    pub fn length_lex_rank(&self) -> BigUint {
        if self.is_empty() {
            return BigUint::zero();
        }
        let n = self.rank.get();
        let q = BigUint::from(2 * n - 1);
        let mut rank = ball_size(self.rank, self.len() - 1);
        // Offset within the sphere of this length: mixed-radix with the first
        // letter over 2n symbols and each later letter over the 2n−1 symbols
        // that do not cancel the previous one.
        let mut within = BigUint::zero();
        for (i, &letter) in self.letters.iter().enumerate() {
            let digit = if i == 0 {
                letter.alphabet_index()
            } else {
                let forbidden = self.letters[i - 1].inverse().alphabet_index();
                let idx = letter.alphabet_index();
                if idx > forbidden {
                    idx - 1
                } else {
                    idx
                }
            };
            within = within * &q + BigUint::from(digit);
        }
        rank += within;
        rank
    }

    fn check_rank(&self, other: &Word) -> Result<(), Error> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank.get(),
                found: other.rank.get(),
            });
        }
        Ok(())
    }
}

fn push_reduced(stack: &mut Vec<Letter>, letter: Letter) {
    match stack.last() {
        Some(&top) if top.cancels(letter) => {
            stack.pop();
        }
        _ => stack.push(letter),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(self))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_word(self))
    }
}

/// Formats a word: lowercase letters for `+1`, uppercase for `−1`, no
/// exponent compression, `"1"` for the identity. Ranks past 26 fall back to
/// the indexed form `g1 g1' g2 …` (apostrophe marks the inverse).
pub fn format_word(w: &Word) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut out = String::with_capacity(w.len());
    for letter in w.letters() {
        if w.rank().get() <= 26 {
            let base = b'a' + letter.gen() as u8;
            out.push(match letter.sign() {
                Sign::Plus => base as char,
                Sign::Minus => base.to_ascii_uppercase() as char,
            });
        } else {
            out.push('g');
            out.push_str(&(letter.gen() + 1).to_string());
            if letter.sign() == Sign::Minus {
                out.push('\'');
            }
        }
    }
    out
}

/// Parses the word grammar
/// `word := "1" | term+ ; term := letter exponent? ; letter := [a-z] | [A-Z] ;
/// exponent := "^" "-"? digit+`, ignoring whitespace, then freely reduces.
pub fn parse_word(text: &str, rank: Rank) -> Result<Word, Error> {
    let bytes = text.as_bytes();
    let mut raw: Vec<Letter> = Vec::new();
    let mut pos = 0;
    let mut saw_term = false;
    let mut saw_one = false;
    while pos < bytes.len() {
        let b = bytes[pos];
        if b.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if b == b'1' {
            saw_one = true;
            pos += 1;
            continue;
        }
        if !b.is_ascii_alphabetic() {
            return Err(Error::parse(pos, format!("unexpected character `{}`", b as char)));
        }
        let gen = (b.to_ascii_lowercase() - b'a') as usize;
        if gen >= rank.get() {
            return Err(Error::parse(
                pos,
                format!("letter `{}` is beyond rank {}", b as char, rank.get()),
            ));
        }
        let sign = if b.is_ascii_lowercase() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        pos += 1;
        let mut exponent: i64 = 1;
        // Optional exponent, possibly separated by whitespace.
        let mut lookahead = pos;
        while lookahead < bytes.len() && bytes[lookahead].is_ascii_whitespace() {
            lookahead += 1;
        }
        if lookahead < bytes.len() && bytes[lookahead] == b'^' {
            pos = lookahead + 1;
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let negative = pos < bytes.len() && bytes[pos] == b'-';
            if negative {
                pos += 1;
            }
            let digits_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == digits_start {
                return Err(Error::parse(digits_start, "exponent has no digits"));
            }
            let magnitude: i64 = text[digits_start..pos]
                .parse()
                .map_err(|_| Error::parse(digits_start, "exponent too large"))?;
            exponent = if negative { -magnitude } else { magnitude };
        }
        let letter = if exponent >= 0 {
            Letter::new(gen, sign)
        } else {
            Letter::new(gen, sign.flip())
        };
        for _ in 0..exponent.unsigned_abs() {
            raw.push(letter);
        }
        saw_term = true;
    }
    if saw_one && saw_term {
        return Err(Error::parse(0, "`1` cannot be combined with letters"));
    }
    Word::reduce(rank, raw)
}

/// Number of reduced words of length exactly `i`: `1` for `i = 0`, else
/// `2n(2n−1)^(i−1)`. Exact.
pub fn sphere_size(rank: Rank, i: usize) -> BigUint {
    if i == 0 {
        return BigUint::one();
    }
    let n = rank.get();
    BigUint::from(2 * n) * BigUint::from(2 * n - 1).pow(i as u32 - 1)
}

/// Number of reduced words of length at most `p`: `(n(2n−1)^p − 1)/(n−1)` for
/// `n ≥ 2` and `2p + 1` for `n = 1`. Exact.
pub fn ball_size(rank: Rank, p: usize) -> BigUint {
    let n = rank.get();
    if n == 1 {
        return BigUint::from(2 * p + 1);
    }
    let numerator = BigUint::from(n) * BigUint::from(2 * n - 1).pow(p as u32) - BigUint::one();
    numerator / BigUint::from(n - 1)
}

/// Length-lexicographic stream over all reduced words of length ≤ `max_len`:
/// shorter words first, ties broken by `a < a⁻¹ < b < b⁻¹ < …`. Yields
/// exactly `ball_size(rank, max_len)` words, each once.
pub fn enumerate_ball(rank: Rank, max_len: usize) -> BallIter {
    BallIter {
        rank,
        max_len,
        state: None,
        exhausted: false,
    }
}

pub struct BallIter {
    rank: Rank,
    max_len: usize,
    /// Alphabet indices of the word yielded most recently; `None` before the
    /// identity has been produced.
    state: Option<Vec<usize>>,
    exhausted: bool,
}

impl BallIter {
    fn emit(rank: Rank, state: &[usize]) -> Word {
        let letters = state
            .iter()
            .map(|&idx| Letter::from_alphabet_index(idx))
            .collect();
        Word::from_reduced(rank, letters)
    }

    /// Smallest valid continuation after alphabet index `prev`.
    fn smallest_after(prev: usize) -> usize {
        if prev ^ 1 == 0 {
            1
        } else {
            0
        }
    }

    /// Advances `state` to the next word of the same length, or returns
    /// false when the length is exhausted.
    fn advance(state: &mut [usize], alphabet: usize) -> bool {
        let len = state.len();
        for pos in (0..len).rev() {
            let forbidden = if pos == 0 {
                usize::MAX
            } else {
                state[pos - 1] ^ 1
            };
            let mut next = state[pos] + 1;
            if next == forbidden {
                next += 1;
            }
            if next < alphabet {
                state[pos] = next;
                for fill in pos + 1..len {
                    state[fill] = Self::smallest_after(state[fill - 1]);
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for BallIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.exhausted {
            return None;
        }
        let rank = self.rank;
        let alphabet = rank.alphabet_size();
        let state = match self.state.as_mut() {
            None => {
                self.state = Some(Vec::new());
                return Some(Word::identity(rank));
            }
            Some(state) => state,
        };
        if !state.is_empty() && Self::advance(state, alphabet) {
            return Some(Self::emit(rank, state));
        }
        // Grow to the next length, starting at a a a ….
        let next_len = state.len() + 1;
        if next_len > self.max_len {
            self.exhausted = true;
            return None;
        }
        let mut fresh = vec![0; next_len];
        for fill in 1..next_len {
            fresh[fill] = Self::smallest_after(fresh[fill - 1]);
        }
        let w = Self::emit(rank, &fresh);
        *state = fresh;
        Some(w)
    }
}

/// Exact uniform sampler over the ball `H_p`. Construction precomputes the
/// cumulative sphere sizes once; each draw picks the length with probability
/// `sphere_size(L)/ball_size(p)` via an exact big-integer inverse-CDF lookup,
/// then a uniform non-backtracking letter path of that length.
pub struct WordSampler {
    rank: Rank,
    /// `cumulative[i] = ball_size(rank, i)`.
    cumulative: Vec<BigUint>,
}

impl WordSampler {
    pub fn new(rank: Rank, p: usize) -> WordSampler {
        let n = rank.get();
        let q = BigUint::from(2 * n - 1);
        let mut cumulative = Vec::with_capacity(p + 1);
        let mut ball = BigUint::one();
        let mut sphere = BigUint::from(2 * n);
        cumulative.push(ball.clone());
        for _ in 1..=p {
            ball += &sphere;
            cumulative.push(ball.clone());
            sphere *= &q;
        }
        WordSampler { rank, cumulative }
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    /// Maximum length `p` of the ball being sampled.
    pub fn max_len(&self) -> usize {
        self.cumulative.len() - 1
    }

    pub fn ball_size(&self) -> &BigUint {
        self.cumulative.last().unwrap()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Word {
        let ticket = rng.gen_biguint_below(self.ball_size());
        let length = self.cumulative.partition_point(|b| *b <= ticket);
        let alphabet = self.rank.alphabet_size();
        let mut letters = Vec::with_capacity(length);
        let mut prev: Option<usize> = None;
        for _ in 0..length {
            let idx = match prev {
                None => rng.gen_range(0..alphabet),
                Some(prev) => {
                    let forbidden = prev ^ 1;
                    let r = rng.gen_range(0..alphabet - 1);
                    if r >= forbidden {
                        r + 1
                    } else {
                        r
                    }
                }
            };
            letters.push(Letter::from_alphabet_index(idx));
            prev = Some(idx);
        }
        Word::from_reduced(self.rank, letters)
    }
}

/// Draws one word uniformly from the ball `H_p`. For repeated draws at the
/// same `(rank, p)` build a [`WordSampler`] once instead.
pub fn sample_word<R: Rng + ?Sized>(rank: Rank, p: usize, rng: &mut R) -> Word {
    WordSampler::new(rank, p).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn rank(n: usize) -> Rank {
        Rank::new(n).unwrap()
    }

    pub(crate) fn word(text: &str, n: usize) -> Word {
        parse_word(text, rank(n)).unwrap()
    }

    /// Quadratic-time reduction oracle: repeatedly delete the first adjacent
    /// inverse pair until none remains.
    fn reduce_oracle(raw: &[Letter]) -> Vec<Letter> {
        let mut current = raw.to_vec();
        loop {
            let mut found = None;
            for i in 0..current.len().saturating_sub(1) {
                if current[i].cancels(current[i + 1]) {
                    found = Some(i);
                    break;
                }
            }
            match found {
                Some(i) => {
                    current.remove(i);
                    current.remove(i);
                }
                None => return current,
            }
        }
    }

    fn letter_strategy(n: usize) -> impl Strategy<Value = Letter> {
        (0..n, prop::bool::ANY)
            .prop_map(|(gen, plus)| Letter::new(gen, if plus { Sign::Plus } else { Sign::Minus }))
    }

    fn raw_strategy(n: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(letter_strategy(n), 0..=max_len)
    }

    fn word_strategy(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
        raw_strategy(n, max_len).prop_map(move |raw| Word::reduce(rank(n), raw).unwrap())
    }

    #[test]
    fn reduce_examples() {
        let a = Letter::new(0, Sign::Plus);
        let a_inv = Letter::new(0, Sign::Minus);
        let b = Letter::new(1, Sign::Plus);
        let b_inv = Letter::new(1, Sign::Minus);
        assert!(Word::reduce(rank(2), vec![a, a_inv]).unwrap().is_identity());
        assert!(Word::reduce(rank(2), vec![a, b, b_inv, a_inv])
            .unwrap()
            .is_identity());
        let reduced = Word::reduce(rank(2), vec![a, b, b_inv, a]).unwrap();
        assert_eq!(format_word(&reduced), "aa");
    }

    #[test]
    fn reduce_rejects_out_of_rank() {
        let c = Letter::new(2, Sign::Plus);
        assert_eq!(
            Word::reduce(rank(2), vec![c]),
            Err(Error::GeneratorOutOfRange { index: 2, rank: 2 })
        );
    }

    #[test]
    fn concat_examples() {
        let ab = word("ab", 2);
        assert!(ab.concat(&word("BA", 2)).unwrap().is_identity());
        assert_eq!(ab.concat(&Word::identity(rank(2))).unwrap(), ab);
        let left = word("babaa", 2);
        let right = word("aaBabbb", 2);
        let product = left.concat(&right).unwrap();
        assert_eq!(format_word(&product), "babaaaaBabbb");
        assert_eq!(product.len(), 12);
    }

    #[test]
    fn concat_rank_mismatch() {
        let x = word("a", 1);
        let y = word("b", 2);
        assert!(matches!(x.concat(&y), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn invert_examples() {
        assert!(Word::identity(rank(2)).inverse().is_identity());
        assert_eq!(format_word(&word("babaa", 2).inverse()), "AABAB");
        assert_eq!(format_word(&word("aaBabbb", 2).inverse()), "BBBAbAA");
    }

    #[test]
    fn cancellation_len_examples() {
        assert_eq!(word("ab", 2).cancellation_len(&word("BA", 2)).unwrap(), 2);
        assert_eq!(
            word("babaa", 2)
                .cancellation_len(&word("AABBBB", 2))
                .unwrap(),
            3
        );
        assert_eq!(word("bbb", 2).cancellation_len(&word("bab", 2)).unwrap(), 0);
    }

    #[test]
    fn parse_examples() {
        assert_eq!(format_word(&word("bab", 2)), "bab");
        assert_eq!(format_word(&word("b^4a^2", 2)), "bbbbaa");
        assert!(word("aA", 2).is_identity());
        assert!(word("1", 2).is_identity());
        assert_eq!(format_word(&word("b^-2", 2)), "BB");
        assert_eq!(format_word(&word(" b ^ 2 a", 2)), "bba");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_word("c", rank(2)), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("a^", rank(2)), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("a?", rank(2)), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("1a", rank(2)), Err(Error::Parse { .. })));
    }

    #[test]
    fn format_identity_and_inverse() {
        assert_eq!(format_word(&Word::identity(rank(2))), "1");
        assert_eq!(format_word(&word("A", 2)), "A");
        let big = Rank::new(27).unwrap();
        let w = Word::reduce(
            big,
            vec![Letter::new(26, Sign::Plus), Letter::new(0, Sign::Minus)],
        )
        .unwrap();
        assert_eq!(format_word(&w), "g27g1'");
    }

    #[test]
    fn sphere_sizes() {
        assert_eq!(sphere_size(rank(2), 1), BigUint::from(4u32));
        assert_eq!(sphere_size(rank(2), 3), BigUint::from(36u32));
        assert_eq!(sphere_size(rank(1), 5), BigUint::from(2u32));
        assert_eq!(sphere_size(rank(3), 0), BigUint::one());
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball_size(rank(2), 2), BigUint::from(17u32));
        assert_eq!(ball_size(rank(2), 0), BigUint::one());
        assert_eq!(ball_size(rank(1), 3), BigUint::from(7u32));
    }

    #[test]
    fn ball_size_matches_sphere_sum() {
        for n in 1..=4 {
            for p in 0..=12 {
                let total: BigUint = (0..=p).map(|i| sphere_size(rank(n), i)).sum();
                assert_eq!(ball_size(rank(n), p), total, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn enumerate_small_balls() {
        let words: Vec<String> = enumerate_ball(rank(1), 2).map(|w| format_word(&w)).collect();
        assert_eq!(words, vec!["1", "a", "A", "aa", "AA"]);
        let words: Vec<String> = enumerate_ball(rank(2), 1).map(|w| format_word(&w)).collect();
        assert_eq!(words, vec!["1", "a", "A", "b", "B"]);
        assert_eq!(enumerate_ball(rank(2), 3).count(), 53);
    }

    #[test]
    fn enumeration_is_sorted_unique_reduced() {
        for n in 1..=3 {
            let k = 6;
            let words: Vec<Word> = enumerate_ball(rank(n), k).collect();
            assert_eq!(BigUint::from(words.len()), ball_size(rank(n), k));
            for pair in words.windows(2) {
                assert_eq!(pair[0].length_lex_cmp(&pair[1]), Ordering::Less);
            }
            for w in &words {
                assert_eq!(Word::reduce(rank(n), w.letters().to_vec()).unwrap(), *w);
            }
        }
    }

    #[test]
    fn length_lex_rank_matches_enumeration() {
        for n in 1..=3 {
            let k = if n == 3 { 3 } else { 4 };
            for (position, w) in enumerate_ball(rank(n), k).enumerate() {
                assert_eq!(w.length_lex_rank(), BigUint::from(position), "word {w}");
            }
        }
    }

    #[test]
    fn sampler_ball_of_radius_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            assert!(sample_word(rank(2), 0, &mut rng).is_identity());
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let sampler = WordSampler::new(rank(3), 9);
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            assert_eq!(sampler.sample(&mut a), sampler.sample(&mut b));
        }
    }

    #[test]
    fn sampler_length_frequencies_match_sphere_weights() {
        // n = 2, p = 2: P(len) = 1/17, 4/17, 12/17.
        let sampler = WordSampler::new(rank(2), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let samples = 100_000u32;
        let mut counts = [0u32; 3];
        for _ in 0..samples {
            counts[sampler.sample(&mut rng).len()] += 1;
        }
        for (len, expected) in [(0usize, 1.0 / 17.0), (1, 4.0 / 17.0), (2, 12.0 / 17.0)] {
            let observed = f64::from(counts[len]) / f64::from(samples);
            let sigma = (expected * (1.0 - expected) / f64::from(samples)).sqrt();
            assert!(
                (observed - expected).abs() <= 4.0 * sigma,
                "len {len}: observed {observed}, expected {expected}"
            );
        }
    }

    #[test]
    fn sampler_only_produces_reduced_words_within_ball() {
        let sampler = WordSampler::new(rank(2), 5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2_000 {
            let w = sampler.sample(&mut rng);
            assert!(w.len() <= 5);
            assert_eq!(Word::reduce(rank(2), w.letters().to_vec()).unwrap(), w);
        }
    }

    #[test]
    fn rank1_sampling_is_uniform_on_integers() {
        // The rank-1 ball of radius p is {a^k : |k| <= p}, so the sampler
        // must draw exponents uniformly from the 2p+1 integers in [-p, p].
        let sampler = WordSampler::new(rank(1), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let samples = 70_000u32;
        let mut counts = [0u32; 7];
        for _ in 0..samples {
            let k = sampler.sample(&mut rng).exponent_sum(0);
            counts[(k + 3) as usize] += 1;
        }
        let expected = 1.0 / 7.0;
        let sigma = (expected * (1.0 - expected) / f64::from(samples)).sqrt();
        for (offset, &count) in counts.iter().enumerate() {
            let observed = f64::from(count) / f64::from(samples);
            assert!(
                (observed - expected).abs() <= 4.0 * sigma,
                "k = {}: observed {observed}",
                offset as i64 - 3
            );
        }
    }

    #[test]
    fn exponent_sums() {
        let w = word("aaBabbb", 2);
        assert_eq!(w.exponent_sum(0), 3);
        assert_eq!(w.exponent_sum(1), 2);
        assert_eq!(Word::identity(rank(2)).exponent_sum(0), 0);
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_matches_oracle(raw in raw_strategy(3, 24)) {
            let reduced = Word::reduce(rank(3), raw.clone()).unwrap();
            let again = Word::reduce(rank(3), reduced.letters().to_vec()).unwrap();
            prop_assert_eq!(&again, &reduced);
            let expected = reduce_oracle(&raw);
            prop_assert_eq!(reduced.letters(), expected.as_slice());
        }

        #[test]
        fn concat_is_associative(
            x in word_strategy(2, 10),
            y in word_strategy(2, 10),
            z in word_strategy(2, 10),
        ) {
            let left = x.concat(&y).unwrap().concat(&z).unwrap();
            let right = x.concat(&y.concat(&z).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn concat_with_inverse_is_identity(x in word_strategy(3, 12)) {
            prop_assert!(x.concat(&x.inverse()).unwrap().is_identity());
            prop_assert_eq!(x.inverse().len(), x.len());
        }

        #[test]
        fn concat_length_law(x in word_strategy(2, 12), y in word_strategy(2, 12)) {
            let c = x.cancellation_len(&y).unwrap();
            prop_assert!(c <= x.len().min(y.len()));
            let product = x.concat(&y).unwrap();
            prop_assert_eq!(product.len(), x.len() + y.len() - 2 * c);
        }

        #[test]
        fn format_parse_round_trip(x in word_strategy(4, 16)) {
            let text = format_word(&x);
            prop_assert_eq!(parse_word(&text, rank(4)).unwrap(), x);
        }
    }
}
