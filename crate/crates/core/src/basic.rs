//! Hall basic sequences and basic commutators.
//!
//! A basic sequence over an alphabet `X` is an enumeration `b_1, b_2, ...`
//! of bracketed products such that (1) every element of `X` occurs, (2) the
//! sequence is sorted by weight, and (3) a product `u = b_i b_j` of weight
//! at least 2 occurs exactly when `j < i` and, if `b_i = b_k b_l`, also
//! `l <= j`. The weight-`n` terms project to a basis of the weight-`n`
//! factor of the lower central series of the free group, so their count is
//! the Witt number `(1/n) sum_{d|n} mu(d) q^{n/d}`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Word};

/// Default cap on the number of generated commutators.
pub const DEFAULT_SEQUENCE_CAP: usize = 1_000_000;

/// One term of a basic sequence: a leaf generator or a bracket of two
/// earlier terms, referenced by their sequence indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicKind {
    Leaf(usize),
    /// `Node { left, right }` is the bracket `[b_left, b_right]` where the
    /// fields are sequence indices.
    Node {
        left: usize,
        right: usize,
    },
}

/// A basic commutator inside a [`BasicSequence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasicCommutator {
    pub kind: BasicKind,
    pub weight: usize,
    /// Position in the ambient sequence.
    pub seq_index: usize,
}

/// The basic sequence over an alphabet up to a weight bound, in canonical
/// order: by weight, then by (left index, right index), with leaves in
/// alphabet order.
#[derive(Debug, Clone)]
pub struct BasicSequence {
    alphabet: Arc<Alphabet>,
    entries: Vec<BasicCommutator>,
}

impl BasicSequence {
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn entries(&self) -> &[BasicCommutator] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries of one weight, as a sub-slice.
    pub fn weight_class(&self, weight: usize) -> &[BasicCommutator] {
        let start = self.entries.partition_point(|e| e.weight < weight);
        let end = self.entries.partition_point(|e| e.weight <= weight);
        &self.entries[start..end]
    }

    /// Expands an entry to the group word obtained by reading each node as
    /// a commutator `[u,v] = u^-1 v^-1 u v`.
    pub fn expand(&self, index: usize) -> Result<Word> {
        if index >= self.entries.len() {
            return Err(Error::Invalid(format!(
                "sequence index {index} out of range"
            )));
        }
        let mut cache: Vec<Option<Word>> = vec![None; index + 1];
        self.expand_cached(index, &mut cache)
    }

    fn expand_cached(&self, index: usize, cache: &mut Vec<Option<Word>>) -> Result<Word> {
        if let Some(w) = &cache[index] {
            return Ok(w.clone());
        }
        let word = match self.entries[index].kind {
            BasicKind::Leaf(gen) => Word::generator(&self.alphabet, gen)?,
            BasicKind::Node { left, right } => {
                let l = self.expand_cached(left, cache)?;
                let r = self.expand_cached(right, cache)?;
                l.commutator(&r)?
            }
        };
        cache[index] = Some(word.clone());
        Ok(word)
    }

    /// Human-readable bracket notation, e.g. `[[x2,x1],x1]`.
    pub fn notation(&self, index: usize) -> String {
        match self.entries[index].kind {
            BasicKind::Leaf(gen) => self.alphabet.name(gen).to_string(),
            BasicKind::Node { left, right } => {
                format!("[{},{}]", self.notation(left), self.notation(right))
            }
        }
    }

    /// Checks condition (3) for a candidate pair of sequence indices.
    fn admissible(&self, left: usize, right: usize) -> bool {
        if right >= left {
            return false;
        }
        match self.entries[left].kind {
            BasicKind::Leaf(_) => true,
            BasicKind::Node { right: l_right, .. } => l_right <= right,
        }
    }
}

/// Generates the basic sequence of all basic commutators of weight at most
/// `max_weight`, with the default size cap.
pub fn basic_sequence(alphabet: &Arc<Alphabet>, max_weight: usize) -> Result<BasicSequence> {
    basic_sequence_with_cap(alphabet, max_weight, DEFAULT_SEQUENCE_CAP)
}

/// As [`basic_sequence`], failing with a budget error if more than `cap`
/// commutators would be generated.
pub fn basic_sequence_with_cap(
    alphabet: &Arc<Alphabet>,
    max_weight: usize,
    cap: usize,
) -> Result<BasicSequence> {
    if max_weight == 0 {
        return Err(Error::Invalid("max_weight must be at least 1".into()));
    }
    let mut seq = BasicSequence {
        alphabet: Arc::clone(alphabet),
        entries: Vec::new(),
    };
    for gen in 0..alphabet.len() {
        seq.entries.push(BasicCommutator {
            kind: BasicKind::Leaf(gen),
            weight: 1,
            seq_index: seq.entries.len(),
        });
    }
    for weight in 2..=max_weight {
        // Both halves already exist: iterate left entries in sequence
        // order, then right entries, and keep the admissible pairs. This
        // scan order is exactly the canonical within-weight order.
        let prior = seq.entries.len();
        for left in 0..prior {
            let lw = seq.entries[left].weight;
            if lw >= weight {
                break;
            }
            for right in 0..prior {
                if seq.entries[right].weight != weight - lw {
                    continue;
                }
                if !seq.admissible(left, right) {
                    continue;
                }
                if seq.entries.len() >= cap {
                    return Err(Error::Budget(format!(
                        "basic sequence exceeds cap of {cap} commutators"
                    )));
                }
                seq.entries.push(BasicCommutator {
                    kind: BasicKind::Node { left, right },
                    weight,
                    seq_index: seq.entries.len(),
                });
            }
        }
    }
    Ok(seq)
}

/// Exact Witt number: the rank of the weight-`n` factor of the lower
/// central series of a free group of rank `q`,
/// `(1/n) * sum_{d|n} mu(d) * q^(n/d)`.
pub fn witt_number(q: usize, n: usize) -> Result<BigUint> {
    if q == 0 || n == 0 {
        return Err(Error::Invalid("witt_number needs q >= 1 and n >= 1".into()));
    }
    let mut total = num_bigint::BigInt::zero();
    for d in divisors(n) {
        let mu = moebius(d);
        if mu == 0 {
            continue;
        }
        let term = num_bigint::BigInt::from(q).pow((n / d) as u32);
        total += term * mu;
    }
    let (quot, rem) = num_integer::Integer::div_rem(&total, &num_bigint::BigInt::from(n));
    if !rem.is_zero() || quot < BigUint::zero().into() {
        return Err(Error::Internal(format!(
            "Witt sum not divisible for q={q}, n={n}"
        )));
    }
    Ok(quot.to_biguint().expect("nonnegative"))
}

fn divisors(n: usize) -> Vec<usize> {
    let mut divs = Vec::new();
    for d in 1..=n {
        if n.is_multiple_of(d) {
            divs.push(d);
        }
    }
    divs
}

/// Moebius function via trial-division factorization.
fn moebius(mut n: usize) -> i64 {
    let mut primes = 0;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            primes += 1;
        }
        p += 1;
    }
    if n > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Expands a standalone basic commutator (by sequence index) over the given
/// sequence; convenience wrapper matching [`BasicSequence::expand`].
pub fn expand(seq: &BasicSequence, index: usize) -> Result<Word> {
    seq.expand(index)
}
