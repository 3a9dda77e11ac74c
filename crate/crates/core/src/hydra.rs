//! The groups `G(k,a,t) = < a, t | [a,t,...,t] = 1 >` (k copies of t) and
//! their free-by-cyclic structure.
//!
//! With `a_0 = a` and `a_i = [a_{i-1}, t]`, the normal closure `H` of `a`
//! is free on `a_0, ..., a_{k-1}` and the whole group is `H` extended by
//! the infinite cyclic group on `t`, acting by `t^-1 a_i t = a_i a_{i+1}`
//! and fixing `a_{k-1}`. Every element has a unique normal form `h * t^n`
//! with `h` a free word in the `a_i`, which decides the word problem.
//!
//! The `a_i` words live over their own alphabet `a0..a{k-1}`, bridged to
//! the ambient `{a, t}` only through [`hydra_normal_form`] and
//! [`reconstruct`].

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{left_normed_commutator, Alphabet, Word};

/// Cap on the length of the H-coordinate word; hydra elements can be
/// enormously distorted in these coordinates.
const MAX_H_LETTERS: usize = 1_000_000;

/// The ambient alphabet `{a, t}`.
pub fn ambient_alphabet() -> Arc<Alphabet> {
    Alphabet::new(["a", "t"]).expect("valid alphabet")
}

/// The coordinate alphabet `a0, ..., a{k-1}` of the free normal subgroup.
pub fn h_alphabet(k: usize) -> Result<Arc<Alphabet>> {
    if k == 0 {
        return Err(Error::Invalid(
            "hydra parameter k must be at least 1".into(),
        ));
    }
    Alphabet::new((0..k).map(|i| format!("a{i}")))
}

/// The alphabet `c1, ..., ck` used by the rewriting of relators.
pub fn c_alphabet(k: usize) -> Result<Arc<Alphabet>> {
    if k == 0 {
        return Err(Error::Invalid(
            "hydra parameter k must be at least 1".into(),
        ));
    }
    Alphabet::new((1..=k).map(|i| format!("c{i}")))
}

/// Automorphism table of the free subgroup: index `i` holds the image of
/// `a_i`. `direction = -1` is conjugation by `t` (`a_i -> a_i a_{i+1}`,
/// `a_{k-1}` fixed); `direction = +1` is its exact inverse, computed and
/// verified to invert.
pub fn t_action(k: usize, direction: i8) -> Result<Vec<Word>> {
    if direction != 1 && direction != -1 {
        return Err(Error::Invalid("direction must be +1 or -1".into()));
    }
    let alphabet = h_alphabet(k)?;
    let forward: Vec<Word> = (0..k)
        .map(|i| {
            let ai = Word::generator(&alphabet, i)?;
            if i + 1 < k {
                ai.multiply(&Word::generator(&alphabet, i + 1)?)
            } else {
                Ok(ai)
            }
        })
        .collect::<Result<_>>()?;
    if direction == -1 {
        return Ok(forward);
    }
    // Invert from the top: a_{k-1} is fixed and
    // a_i -> a_i * inverse(image of a_{i+1}).
    let mut backward = vec![Word::identity(&alphabet); k];
    backward[k - 1] = Word::generator(&alphabet, k - 1)?;
    for i in (0..k.saturating_sub(1)).rev() {
        backward[i] = Word::generator(&alphabet, i)?.multiply(&backward[i + 1].inverse())?;
    }
    for i in 0..k {
        let round_trip = forward[i].substitute(&backward)?;
        if round_trip != Word::generator(&alphabet, i)? {
            return Err(Error::Internal(format!("t-action inverse fails on a{i}")));
        }
        let round_trip = backward[i].substitute(&forward)?;
        if round_trip != Word::generator(&alphabet, i)? {
            return Err(Error::Internal(format!("t-action inverse fails on a{i}")));
        }
    }
    Ok(backward)
}

/// Unique decomposition `w = h * t^n` in `G(k,a,t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HydraNormalForm {
    /// Freely reduced word over `a0..a{k-1}`.
    pub h: Word,
    pub t_exp: i64,
}

impl HydraNormalForm {
    pub fn is_identity(&self) -> bool {
        self.h.is_identity() && self.t_exp == 0
    }
}

/// Computes the normal form of a word over `{a, t}` in `G(k,a,t)`: push
/// every `t` to the right, rewriting `a`-letters through the t-action.
pub fn hydra_normal_form(k: usize, word: &Word) -> Result<HydraNormalForm> {
    let ambient = ambient_alphabet();
    if word.alphabet() != &ambient {
        return Err(Error::AlphabetMismatch {
            left: word.alphabet().names().join(","),
            right: ambient.names().join(","),
        });
    }
    let alphabet = h_alphabet(k)?;
    let forward = t_action(k, -1)?;
    let backward = t_action(k, 1)?;
    let a_index = 0;
    let t_index = 1;

    // `powers[n]` is `t^n a t^-n`, i.e. a_0 conjugated by t^-n: stepping
    // n up applies the inverse action, stepping down the forward one.
    let mut powers: HashMap<i64, Word> = HashMap::new();
    powers.insert(0, Word::generator(&alphabet, 0)?);
    let mut known_range = (0i64, 0i64);

    let mut h = Word::identity(&alphabet);
    let mut t_exp: i64 = 0;
    for letter in word.letters() {
        if letter.gen == t_index {
            t_exp += i64::from(letter.sign);
        } else {
            debug_assert_eq!(letter.gen, a_index);
            while known_range.1 < t_exp {
                let prev = powers[&known_range.1].clone();
                let next = prev.substitute(&backward)?;
                known_range.1 += 1;
                powers.insert(known_range.1, next);
            }
            while known_range.0 > t_exp {
                let prev = powers[&known_range.0].clone();
                let next = prev.substitute(&forward)?;
                known_range.0 -= 1;
                powers.insert(known_range.0, next);
            }
            let image = &powers[&t_exp];
            let piece = if letter.sign > 0 {
                image.clone()
            } else {
                image.inverse()
            };
            if h.len() + piece.len() > MAX_H_LETTERS {
                return Err(Error::Budget(format!(
                    "hydra normal form exceeds {MAX_H_LETTERS} coordinate letters"
                )));
            }
            h = h.multiply(&piece)?;
        }
    }
    Ok(HydraNormalForm { h, t_exp })
}

/// Word-problem decision for `G(k,a,t)`.
pub fn hydra_is_trivial(k: usize, word: &Word) -> Result<bool> {
    Ok(hydra_normal_form(k, word)?.is_identity())
}

/// The defining relator `[a, t, ..., t]` with `k` copies of `t`.
pub fn hydra_relator(k: usize) -> Result<Word> {
    if k == 0 {
        return Err(Error::Invalid(
            "hydra parameter k must be at least 1".into(),
        ));
    }
    let ambient = ambient_alphabet();
    let a = Word::generator(&ambient, 0)?;
    let t = Word::generator(&ambient, 1)?;
    let mut parts = vec![a];
    parts.extend(std::iter::repeat_n(t, k));
    left_normed_commutator(&parts)
}

/// Maps a normal form back to the ambient alphabet via
/// `a_i = [a, t, ..., t]` (i copies of t), times `t^n`.
pub fn reconstruct(k: usize, nf: &HydraNormalForm) -> Result<Word> {
    let ambient = ambient_alphabet();
    let a = Word::generator(&ambient, 0)?;
    let t = Word::generator(&ambient, 1)?;
    let images: Vec<Word> = (0..k)
        .map(|i| {
            let mut parts = vec![a.clone()];
            parts.extend(std::iter::repeat_n(t.clone(), i));
            left_normed_commutator(&parts)
        })
        .collect::<Result<_>>()?;
    nf.h.substitute(&images)?.multiply(&t.pow(nf.t_exp))
}

/// Rewrites the relator `[a, t,...,t, e,...,e]` (k-2 copies of t, l copies
/// of `e = [a,t,...,t]` with k-1 copies of t) into the generators
/// `c_j = [a, t,...,t]` (j-1 copies of t) of the normal closure of `a`.
/// The result is a word over `c1..ck`; it equals the left-normed commutator
/// `[c_{k-1}, c_k, ..., c_k]` with `l` copies of `c_k`.
pub fn rewrite_in_c(k: usize, l: usize) -> Result<Word> {
    if k < 2 {
        return Err(Error::Invalid("rewriting needs k >= 2".into()));
    }
    if l == 0 {
        return Err(Error::Invalid("rewriting needs l >= 1".into()));
    }
    let ambient = ambient_alphabet();
    let a = Word::generator(&ambient, 0)?;
    let t = Word::generator(&ambient, 1)?;
    let mut e_parts = vec![a.clone()];
    e_parts.extend(std::iter::repeat_n(t.clone(), k - 1));
    let e = left_normed_commutator(&e_parts)?;
    let mut parts = vec![a];
    parts.extend(std::iter::repeat_n(t, k - 2));
    parts.extend(std::iter::repeat_n(e, l));
    let relator = left_normed_commutator(&parts)?;

    let nf = hydra_normal_form(k, &relator)?;
    if nf.t_exp != 0 {
        return Err(Error::Internal("relator has nonzero t-exponent".into()));
    }
    // relabel a_{i} as c_{i+1}
    let c = c_alphabet(k)?;
    Word::from_letters(&c, nf.h.letters().iter().copied())
}
