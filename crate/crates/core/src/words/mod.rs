//! Free-group words over a finite alphabet.
//!
//! Words are always kept freely reduced. The commutator convention is
//! `[x,y] = x^-1 y^-1 x y` and conjugation is `x^y = y^-1 x y`; longer
//! brackets are left-normed: `[x,y,z] = [[x,y],z]`.

mod parse;

pub use parse::parse_word;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered set of named generators. The order is fixed for the lifetime
/// of the alphabet and determines generator indices everywhere else.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet from generator names. Names must be nonempty,
    /// distinct identifiers (`[A-Za-z_][A-Za-z0-9_]*`).
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(names: I) -> Result<Arc<Self>> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Invalid("alphabet must be nonempty".into()));
        }
        for name in &names {
            if !is_identifier(name) {
                return Err(Error::Invalid(format!("bad generator name `{name}`")));
            }
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::Invalid(format!("duplicate generator `{name}`")));
            }
        }
        Ok(Arc::new(Alphabet { names }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    /// Index of a generator by name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// One letter of a word: a generator index together with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    /// `+1` or `-1`.
    pub sign: i8,
}

impl Letter {
    pub fn new(gen: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter { gen, sign }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            sign: -self.sign,
        }
    }
}

/// A freely reduced word over an [`Alphabet`]. Immutable; all operations
/// return fresh words.
#[derive(Debug, Clone)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    letters: Vec<Letter>,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.same_alphabet(other) && self.letters == other.letters
    }
}

impl Eq for Word {}

impl Word {
    /// The empty word.
    pub fn identity(alphabet: &Arc<Alphabet>) -> Self {
        Word {
            alphabet: Arc::clone(alphabet),
            letters: Vec::new(),
        }
    }

    /// The one-letter word for generator `index`.
    pub fn generator(alphabet: &Arc<Alphabet>, index: usize) -> Result<Self> {
        if index >= alphabet.len() {
            return Err(Error::Invalid(format!(
                "generator index {index} out of range (alphabet has {})",
                alphabet.len()
            )));
        }
        Ok(Word {
            alphabet: Arc::clone(alphabet),
            letters: vec![Letter::new(index, 1)],
        })
    }

    /// Builds a word from arbitrary letters, validating indices and freely
    /// reducing the result.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(
        alphabet: &Arc<Alphabet>,
        letters: I,
    ) -> Result<Self> {
        let mut reduced: Vec<Letter> = Vec::new();
        for letter in letters {
            if letter.gen >= alphabet.len() {
                return Err(Error::Invalid(format!(
                    "generator index {} out of range (alphabet has {})",
                    letter.gen,
                    alphabet.len()
                )));
            }
            if letter.sign != 1 && letter.sign != -1 {
                return Err(Error::Invalid(format!("bad letter sign {}", letter.sign)));
            }
            push_reduced(&mut reduced, letter);
        }
        Ok(Word {
            alphabet: Arc::clone(alphabet),
            letters: reduced,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    fn same_alphabet(&self, other: &Word) -> bool {
        Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet
    }

    fn check_alphabet(&self, other: &Word) -> Result<()> {
        if self.same_alphabet(other) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                left: self.alphabet.names().join(","),
                right: other.alphabet.names().join(","),
            })
        }
    }

    /// Freely reduced product `self * other`.
    pub fn multiply(&self, other: &Word) -> Result<Word> {
        self.check_alphabet(other)?;
        let mut letters = self.letters.clone();
        for &letter in &other.letters {
            push_reduced(&mut letters, letter);
        }
        Ok(Word {
            alphabet: Arc::clone(&self.alphabet),
            letters,
        })
    }

    pub fn inverse(&self) -> Word {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        Word {
            alphabet: Arc::clone(&self.alphabet),
            letters,
        }
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::new();
        for _ in 0..n.unsigned_abs() {
            for &letter in &base.letters {
                push_reduced(&mut letters, letter);
            }
        }
        Word {
            alphabet: Arc::clone(&self.alphabet),
            letters,
        }
    }

    /// Conjugate `self^g = g^-1 * self * g`.
    pub fn conjugate(&self, g: &Word) -> Result<Word> {
        g.inverse().multiply(self)?.multiply(g)
    }

    /// Commutator `[self, other] = self^-1 other^-1 self other`.
    pub fn commutator(&self, other: &Word) -> Result<Word> {
        self.inverse()
            .multiply(&other.inverse())?
            .multiply(self)?
            .multiply(other)
    }

    /// Applies the endomorphism sending generator `i` to `images[i]`. The
    /// images must all live over one alphabet, which becomes the result's.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        if images.len() != self.alphabet.len() {
            return Err(Error::Invalid(format!(
                "substitution needs {} images, got {}",
                self.alphabet.len(),
                images.len()
            )));
        }
        let target = match images.first() {
            Some(w) => Arc::clone(w.alphabet()),
            None => return Err(Error::Invalid("substitution into an empty alphabet".into())),
        };
        let mut acc = Word::identity(&target);
        for letter in &self.letters {
            let image = &images[letter.gen];
            let piece = if letter.sign > 0 {
                image.clone()
            } else {
                image.inverse()
            };
            acc = acc.multiply(&piece)?;
        }
        Ok(acc)
    }
}

/// Left-normed commutator `[w1, w2, ..., wk] = [[w1, ..., w(k-1)], wk]`.
/// A single argument is returned unchanged.
pub fn left_normed_commutator(words: &[Word]) -> Result<Word> {
    let (first, rest) = words.split_first().ok_or(Error::EmptyCommutator)?;
    let mut acc = first.clone();
    for w in rest {
        acc = acc.commutator(w)?;
    }
    Ok(acc)
}

/// Left side of the Hall-Witt identity,
/// `[A,B^-1,C]^B * [B,C^-1,A]^C * [C,A^-1,B]^A`,
/// which freely reduces to the empty word for all A, B, C.
pub fn hall_witt_left_side(a: &Word, b: &Word, c: &Word) -> Result<Word> {
    let t1 = a.commutator(&b.inverse())?.commutator(c)?.conjugate(b)?;
    let t2 = b.commutator(&c.inverse())?.commutator(a)?.conjugate(c)?;
    let t3 = c.commutator(&a.inverse())?.commutator(b)?.conjugate(a)?;
    t1.multiply(&t2)?.multiply(&t3)
}

fn push_reduced(letters: &mut Vec<Letter>, letter: Letter) {
    match letters.last() {
        Some(last) if last.gen == letter.gen && last.sign == -letter.sign => {
            letters.pop();
        }
        _ => letters.push(letter),
    }
}

impl fmt::Display for Word {
    /// Renders in the word grammar, with runs of a generator collapsed to
    /// powers, e.g. `a^-1*t^2*a`. The identity prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        let mut first = true;
        while i < self.letters.len() {
            let letter = self.letters[i];
            let mut run: i64 = letter.sign as i64;
            let mut j = i + 1;
            while j < self.letters.len()
                && self.letters[j].gen == letter.gen
                && self.letters[j].sign == letter.sign
            {
                run += letter.sign as i64;
                j += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = self.alphabet.name(letter.gen);
            if run == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{run}")?;
            }
            i = j;
        }
        Ok(())
    }
}
