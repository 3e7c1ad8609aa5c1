//! Free homotopy classes of loops in the n-punctured plane.
//!
//! The fundamental group of the plane minus n punctures is free on `x_1..x_n`,
//! where `x_j` is the positively oriented loop about the j-th puncture in x-order,
//! read off with vertical downward cut rays. Unbased loops correspond to conjugacy
//! classes, stored as cyclically reduced words in a canonical rotation.
//!
//! Letters are signed generator indices: `j` is `x_j`, `-j` is `x_j⁻¹`.

mod artin;
mod certify;
mod coarsen;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use artin::{apply_generator, apply_word, generator_image, substitute, DEFAULT_WORD_CAP};
pub use certify::{certify, Certificate};
pub use coarsen::{coarsen, Clustering};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("letter {letter} out of range for {n} generators")]
    IndexOutOfRange { letter: i64, n: usize },
    #[error("slot {slot} out of range for {n} strands")]
    SlotOutOfRange { slot: usize, n: usize },
    #[error("word length {len} exceeds cap {cap}")]
    WordOverflow { len: usize, cap: usize },
    #[error("strand count mismatch: class has {class}, other side has {other}")]
    StrandMismatch { class: usize, other: usize },
    #[error("chart undefined: x-coordinates are not pairwise distinct")]
    ChartError,
    #[error("invalid clustering: {0}")]
    InvalidClustering(String),
    #[error("class cannot be pushed off the cluster disks")]
    NotCoarsenable,
    #[error("cannot parse word: {0}")]
    Parse(String),
}

pub type Letter = i32;

/// Free reduction of a word.
pub fn free_reduce(word: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inverse(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|&l| -l).collect()
}

/// Strips inverse pairs wrapping around the ends of a freely reduced word.
fn cyclic_reduce(mut word: Vec<Letter>) -> Vec<Letter> {
    let mut lo = 0;
    let mut hi = word.len();
    while hi - lo >= 2 && word[lo] == -word[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    word.truncate(hi);
    word.drain(..lo);
    word
}

/// Letter order x₁ < x₁⁻¹ < x₂ < x₂⁻¹ < ...
fn letter_key(l: Letter) -> u64 {
    2 * u64::from(l.unsigned_abs()) + u64::from(l < 0)
}

/// Start index of the lexicographically least rotation.
fn least_rotation(keys: &[u64]) -> usize {
    let n = keys.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = keys[(i + k) % n];
        let b = keys[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j).min(n.saturating_sub(1))
}

/// A conjugacy class in the free group on `n` generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LoopClass {
    n: usize,
    word: Vec<Letter>,
}

impl LoopClass {
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            word: Vec::new(),
        }
    }

    /// Canonical representative of the class of `raw`.
    pub fn canonical(n: usize, raw: &[Letter]) -> Result<Self, LoopError> {
        check_letters(n, raw)?;
        Ok(Self::from_checked(n, raw.iter().copied()))
    }

    pub(crate) fn from_checked(n: usize, raw: impl IntoIterator<Item = Letter>) -> Self {
        let mut word = cyclic_reduce(free_reduce(raw));
        if !word.is_empty() {
            let keys: Vec<u64> = word.iter().map(|&l| letter_key(l)).collect();
            let start = least_rotation(&keys);
            word.rotate_left(start);
        }
        Self { n, word }
    }

    /// `x_j x_{j+1} ... x_k`: the round curve enclosing punctures `j..=k`.
    pub fn round_loop(j: usize, k: usize, n: usize) -> Result<Self, LoopError> {
        if j == 0 || j > k || k > n {
            return Err(LoopError::IndexOutOfRange {
                letter: if j == 0 || j > k { j as i64 } else { k as i64 },
                n,
            });
        }
        Ok(Self::from_checked(n, (j..=k).map(|g| g as Letter)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.word.is_empty()
    }

    /// Exponent sum of each generator.
    pub fn winding(&self) -> Vec<i64> {
        let mut w = vec![0i64; self.n];
        for &l in &self.word {
            w[l.unsigned_abs() as usize - 1] += i64::from(l.signum());
        }
        w
    }

    /// Generators occurring in the cyclically reduced word, ascending.
    pub fn crossed(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for &l in &self.word {
            seen[l.unsigned_abs() as usize - 1] = true;
        }
        (1..=self.n).filter(|&j| seen[j - 1]).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(WordJson {
            n: self.n,
            word: self.word.clone(),
        })
        .expect("word serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, LoopError> {
        let w: WordJson =
            serde_json::from_value(v.clone()).map_err(|e| LoopError::Parse(e.to_string()))?;
        Self::canonical(w.n, &w.word)
    }
}

fn check_letters(n: usize, raw: &[Letter]) -> Result<(), LoopError> {
    match raw
        .iter()
        .find(|&&l| l == 0 || l.unsigned_abs() as usize > n)
    {
        Some(&l) => Err(LoopError::IndexOutOfRange {
            letter: i64::from(l),
            n,
        }),
        None => Ok(()),
    }
}

/// `{"n": int, "word": [int]}`, shared with braid words.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct WordJson {
    pub n: usize,
    pub word: Vec<Letter>,
}

/// Whitespace-separated signed integers.
pub fn parse_letters(text: &str) -> Result<Vec<Letter>, LoopError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<Letter>()
                .map_err(|_| LoopError::Parse(format!("bad letter {tok:?}")))
        })
        .collect()
}

pub fn format_letters(word: &[Letter]) -> String {
    word.iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for LoopClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.word))
    }
}

/// Parses a class given as `"n: letters"` or bare letters (n inferred from the
/// largest index).
impl FromStr for LoopClass {
    type Err = LoopError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, letters) = match s.split_once(':') {
            Some((n, rest)) => (
                Some(
                    n.trim()
                        .parse::<usize>()
                        .map_err(|_| LoopError::Parse(format!("bad strand count {n:?}")))?,
                ),
                rest,
            ),
            None => (None, s),
        };
        let word = parse_letters(letters)?;
        let n = n.unwrap_or_else(|| {
            word.iter()
                .map(|l| l.unsigned_abs() as usize)
                .max()
                .unwrap_or(0)
        });
        Self::canonical(n, &word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn class(n: usize, w: &[Letter]) -> LoopClass {
        LoopClass::canonical(n, w).unwrap()
    }

    #[test]
    fn cancellation_gives_trivial() {
        assert!(class(2, &[1, -1]).is_trivial());
        assert!(class(3, &[2, 1, 3, -3, -1, -2]).is_trivial());
    }

    #[test]
    fn rotation_invariance() {
        assert_eq!(class(2, &[2, 1]), class(2, &[1, 2]));
        assert_eq!(
            class(3, &[2, 3, 2, -3, -2, 1]).word(),
            &[1, 2, 3, 2, -3, -2]
        );
    }

    #[test]
    fn letter_order_puts_inverse_after_generator() {
        assert_eq!(class(2, &[-1, 2, 1, 2]).word(), &[1, 2, -1, 2]);
        assert_eq!(class(1, &[-1]).word(), &[-1]);
    }

    #[test]
    fn out_of_range_letters_rejected() {
        assert!(LoopClass::canonical(2, &[3]).is_err());
        assert!(LoopClass::canonical(2, &[0]).is_err());
    }

    #[test]
    fn round_loops() {
        assert_eq!(LoopClass::round_loop(1, 2, 3).unwrap().word(), &[1, 2]);
        assert_eq!(LoopClass::round_loop(2, 2, 3).unwrap().word(), &[2]);
        assert_eq!(
            LoopClass::round_loop(1, 3, 3).unwrap().crossed(),
            vec![1, 2, 3]
        );
        assert!(LoopClass::round_loop(2, 1, 3).is_err());
        assert!(LoopClass::round_loop(1, 4, 3).is_err());
    }

    #[test]
    fn text_and_json_forms() {
        let c: LoopClass = "1 2 3 2 -3 -2".parse().unwrap();
        assert_eq!(c.n(), 3);
        assert_eq!(c.to_string(), "1 2 3 2 -3 -2");
        let d: LoopClass = "5: 1 2".parse().unwrap();
        assert_eq!(d.n(), 5);
        assert_eq!(LoopClass::from_json(&d.to_json()).unwrap(), d);
        assert!("1 x".parse::<LoopClass>().is_err());
    }

    #[test]
    fn winding_and_crossed() {
        let c = class(4, &[1, 2, 3, 2, -3, -2]);
        assert_eq!(c.winding(), vec![1, 1, 0, 0]);
        assert_eq!(c.crossed(), vec![1, 2, 3]);
    }

    fn arb_word(n: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(
            (1..=n as Letter, any::<bool>()).prop_map(|(g, s)| if s { g } else { -g }),
            0..max_len,
        )
    }

    proptest! {
        #[test]
        fn canonical_form_is_idempotent(w in arb_word(4, 20)) {
            let c = class(4, &w);
            prop_assert_eq!(class(4, c.word()), c.clone());
            let wd = c.word();
            for pair in wd.windows(2) {
                prop_assert_ne!(pair[0], -pair[1]);
            }
            if wd.len() >= 2 {
                prop_assert_ne!(wd[0], -wd[wd.len() - 1]);
            }
        }

        #[test]
        fn conjugates_share_a_class(w in arb_word(3, 10), c in arb_word(3, 10)) {
            let mut raw = w.clone();
            raw.extend_from_slice(&c);
            raw.extend(inverse(&w));
            prop_assert_eq!(class(3, &raw), class(3, &c));
        }

        #[test]
        fn rotations_share_a_class(w in arb_word(3, 12), k in 0usize..12) {
            let mut r = w.clone();
            if !r.is_empty() {
                let k = k % r.len();
                r.rotate_left(k);
            }
            prop_assert_eq!(class(3, &r), class(3, &w));
        }
    }
}
