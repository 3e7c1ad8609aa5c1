//! Artin action of braid generators on the free group.
//!
//! `σ_i` is the counterclockwise half-twist of the punctures in slots `i, i+1`.
//! Pushing loops forward along it substitutes
//! `x_i ↦ x_i x_{i+1} x_i⁻¹`, `x_{i+1} ↦ x_i`; its inverse substitutes
//! `x_i ↦ x_{i+1}`, `x_{i+1} ↦ x_{i+1}⁻¹ x_i x_{i+1}`. Other generators are fixed.

use super::{free_reduce, Letter, LoopClass, LoopError};
use crate::braid::BraidWord;

pub const DEFAULT_WORD_CAP: usize = 1_000_000;

/// Image of the single letter `letter` under `σ_slot^sign`.
pub fn generator_image(letter: Letter, slot: usize, sign: i32) -> Vec<Letter> {
    let a = slot as Letter;
    let b = a + 1;
    let g = letter.abs();
    let image: Vec<Letter> = match (g == a, g == b, sign > 0) {
        (true, _, true) => vec![a, b, -a],
        (_, true, true) => vec![a],
        (true, _, false) => vec![b],
        (_, true, false) => vec![-b, a, b],
        _ => vec![g],
    };
    if letter > 0 {
        image
    } else {
        image.into_iter().rev().map(|l| -l).collect()
    }
}

/// Applies `σ_slot^sign` to a based word; the result is freely reduced.
pub fn substitute(word: &[Letter], slot: usize, sign: i32) -> Vec<Letter> {
    let a = slot as Letter;
    free_reduce(word.iter().flat_map(|&l| {
        if l.abs() == a || l.abs() == a + 1 {
            generator_image(l, slot, sign)
        } else {
            vec![l]
        }
    }))
}

pub fn apply_generator(
    c: &LoopClass,
    slot: usize,
    sign: i32,
    cap: usize,
) -> Result<LoopClass, LoopError> {
    if slot == 0 || slot >= c.n() {
        return Err(LoopError::SlotOutOfRange { slot, n: c.n() });
    }
    let out = LoopClass::from_checked(c.n(), substitute(c.word(), slot, sign));
    if out.len() > cap {
        return Err(LoopError::WordOverflow {
            len: out.len(),
            cap,
        });
    }
    Ok(out)
}

/// Left-to-right fold: the first letter of `w` acts first.
pub fn apply_word(c: &LoopClass, w: &BraidWord, cap: usize) -> Result<LoopClass, LoopError> {
    if w.n() != c.n() {
        return Err(LoopError::StrandMismatch {
            class: c.n(),
            other: w.n(),
        });
    }
    w.iter().try_fold(c.clone(), |acc, (slot, sign)| {
        apply_generator(&acc, slot, sign, cap)
    })
}
