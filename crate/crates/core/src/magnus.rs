//! The power-series embedding of a free group and its weight filtration.
//!
//! A generator `x` maps to `1 + X` in the ring of integer power series in
//! noncommuting variables, truncated above a degree cap; `x^-1` maps to the
//! truncated geometric series. A nontrivial word lies in the `n`-th lower
//! central term exactly when its image minus 1 starts in degree `n`, and
//! the degree-`n` homogeneous part is the word's leading Lie element. That
//! part is rewritten exactly in the Lyndon basis by triangular elimination,
//! which in turn decides whether a relator is a proper multiple in its
//! graded piece.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::words::Word;

/// A monomial in noncommuting variables: the sequence of generator indices.
pub type Monomial = Vec<usize>;

/// Integer polynomial in noncommuting variables, truncated above
/// `degree_cap`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    degree_cap: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl TruncatedSeries {
    /// The multiplicative unit.
    pub fn one(degree_cap: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), BigInt::one());
        TruncatedSeries { degree_cap, terms }
    }

    pub fn zero(degree_cap: usize) -> Self {
        TruncatedSeries {
            degree_cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, monomial: &[usize]) -> BigInt {
        self.terms
            .get(monomial)
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Vec::new()).is_some_and(|c| c.is_one())
    }

    fn insert(&mut self, monomial: Monomial, coeff: BigInt) {
        if monomial.len() > self.degree_cap || coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(monomial) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Truncated product.
    pub fn multiply(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let cap = self.degree_cap.min(other.degree_cap);
        let mut out = TruncatedSeries::zero(cap);
        for (m1, c1) in &self.terms {
            if m1.len() > cap {
                continue;
            }
            for (m2, c2) in &other.terms {
                if m1.len() + m2.len() > cap {
                    continue;
                }
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                out.insert(m, c1 * c2);
            }
        }
        out
    }

    /// Lowest degree of a nonzero term after subtracting 1, if any.
    fn augmentation_degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter(|m| !m.is_empty())
            .map(Vec::len)
            .min()
    }

    /// The homogeneous component of the given degree.
    fn homogeneous(&self, degree: usize) -> BTreeMap<Monomial, BigInt> {
        self.terms
            .iter()
            .filter(|(m, _)| m.len() == degree)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }
}

/// Series for one generator with the given sign: `1 + X` or its inverse
/// `1 - X + X^2 - ...` truncated.
fn generator_series(gen: usize, sign: i8, cap: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(cap);
    if sign > 0 {
        s.insert(Vec::new(), BigInt::one());
        s.insert(vec![gen], BigInt::one());
    } else {
        let mut coeff = BigInt::one();
        for degree in 0..=cap {
            s.insert(vec![gen; degree], coeff.clone());
            coeff = -coeff;
        }
    }
    s
}

/// Multiplicative embedding of a word, truncated above `degree_cap`.
pub fn embed(word: &Word, degree_cap: usize) -> Result<TruncatedSeries> {
    if degree_cap == 0 {
        return Err(Error::Invalid("degree cap must be at least 1".into()));
    }
    let mut acc = TruncatedSeries::one(degree_cap);
    for letter in word.letters() {
        acc = acc.multiply(&generator_series(letter.gen, letter.sign, degree_cap));
    }
    Ok(acc)
}

/// Result of [`weight_of`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordWeight {
    /// The empty word.
    Identity,
    /// Lowest degree of the embedded word minus 1.
    Weight(usize),
    /// The word is nontrivial but embeds to 1 under the cap.
    ExceedsCap,
}

/// Lower-central depth of a word in the free group, up to `cap`.
pub fn weight_of(word: &Word, cap: usize) -> Result<WordWeight> {
    if word.is_identity() {
        return Ok(WordWeight::Identity);
    }
    let series = embed(word, cap)?;
    match series.augmentation_degree() {
        Some(d) => Ok(WordWeight::Weight(d)),
        None => Ok(WordWeight::ExceedsCap),
    }
}

/// All Lyndon words of length `n` over `{0, .., q-1}` in lexicographic
/// order. A Lyndon word is strictly smaller than every proper rotation.
pub fn lyndon_words(q: usize, n: usize) -> Result<Vec<Monomial>> {
    if q == 0 || n == 0 {
        return Err(Error::Invalid(
            "lyndon_words needs q >= 1 and n >= 1".into(),
        ));
    }
    // Duval's generation of Lyndon words of length <= n in lex order.
    let mut out = Vec::new();
    let mut w: Vec<usize> = vec![0];
    loop {
        if w.len() == n {
            out.push(w.clone());
        }
        let base = w.clone();
        w.clear();
        while w.len() < n {
            w.push(base[w.len() % base.len()]);
        }
        while w.last() == Some(&(q - 1)) {
            w.pop();
        }
        if w.is_empty() {
            break;
        }
        *w.last_mut().unwrap() += 1;
    }
    Ok(out)
}

fn is_lyndon(word: &[usize]) -> bool {
    if word.is_empty() {
        return false;
    }
    for split in 1..word.len() {
        let rotation: Vec<usize> = word[split..]
            .iter()
            .chain(word[..split].iter())
            .copied()
            .collect();
        if rotation.as_slice() <= word {
            return false;
        }
    }
    true
}

/// Standard factorization of a Lyndon word of length >= 2: `w = uv` with
/// `v` the longest proper Lyndon suffix.
fn standard_factorization(word: &[usize]) -> (Vec<usize>, Vec<usize>) {
    debug_assert!(word.len() >= 2);
    for start in 1..word.len() {
        if is_lyndon(&word[start..]) {
            return (word[..start].to_vec(), word[start..].to_vec());
        }
    }
    unreachable!("every Lyndon word of length >= 2 has a proper Lyndon suffix")
}

/// Expansion of the standard bracketing of a Lyndon word into monomials.
fn bracket_polynomial(word: &[usize]) -> BTreeMap<Monomial, BigInt> {
    if word.len() == 1 {
        let mut p = BTreeMap::new();
        p.insert(word.to_vec(), BigInt::one());
        return p;
    }
    let (u, v) = standard_factorization(word);
    let p = bracket_polynomial(&u);
    let q = bracket_polynomial(&v);
    let mut out: BTreeMap<Monomial, BigInt> = BTreeMap::new();
    // p*q - q*p
    for (m1, c1) in &p {
        for (m2, c2) in &q {
            let mut m = m1.clone();
            m.extend_from_slice(m2);
            *out.entry(m).or_insert_with(BigInt::zero) += c1 * c2;
            let mut m = m2.clone();
            m.extend_from_slice(m1);
            *out.entry(m).or_insert_with(BigInt::zero) -= c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// A homogeneous element of the free Lie ring, written in the Lyndon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    pub weight: usize,
    /// Coefficients on Lyndon words of length `weight`; no zeros stored.
    pub coords: BTreeMap<Monomial, BigInt>,
}

/// Leading Lie element of a nontrivial word: the lowest-degree homogeneous
/// component of its embedding minus 1, rewritten exactly in the Lyndon
/// bracket basis.
pub fn leading_lie(word: &Word, cap: usize) -> Result<LieElement> {
    if word.is_identity() {
        return Err(Error::Invalid("leading_lie of the identity word".into()));
    }
    let series = embed(word, cap)?;
    let weight = match series.augmentation_degree() {
        Some(d) => d,
        None => return Err(Error::ExceedsCap { cap }),
    };
    let mut component = series.homogeneous(weight);
    let mut coords = BTreeMap::new();
    while let Some((monomial, coeff)) = component.iter().next().map(|(m, c)| (m.clone(), c.clone()))
    {
        if !is_lyndon(&monomial) {
            return Err(Error::Internal(format!(
                "leading term is not a Lie element: least monomial {monomial:?} is not Lyndon"
            )));
        }
        let bracket = bracket_polynomial(&monomial);
        // Triangularity: the bracket's lex-least monomial is the Lyndon
        // word itself, with coefficient 1.
        match bracket.iter().next() {
            Some((least, one)) if *least == monomial && one.is_one() => {}
            other => {
                return Err(Error::Internal(format!(
                    "Lyndon bracket of {monomial:?} is not triangular: leading {other:?}"
                )));
            }
        }
        for (m, c) in &bracket {
            let entry = component.entry(m.clone()).or_insert_with(BigInt::zero);
            *entry -= &coeff * c;
            if entry.is_zero() {
                component.remove(m);
            }
        }
        coords.insert(monomial, coeff);
    }
    Ok(LieElement { weight, coords })
}

/// Report of the primitivity check for a relator's leading Lie element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabuteReport {
    pub weight: usize,
    /// True when the leading Lie element is not a proper integer multiple,
    /// i.e. the gcd of its Lyndon coordinates is 1.
    pub primitive: bool,
    pub gcd: BigUint,
}

/// Decides whether a nontrivial word's leading Lie element is primitive
/// (not a proper multiple) in its graded piece.
pub fn labute_hypothesis(word: &Word, cap: usize) -> Result<LabuteReport> {
    if word.is_identity() {
        return Err(Error::Invalid(
            "labute_hypothesis of the identity word".into(),
        ));
    }
    let lie = leading_lie(word, cap)?;
    let mut gcd = BigInt::zero();
    for coeff in lie.coords.values() {
        gcd = gcd.gcd(coeff);
    }
    let gcd = gcd.abs().to_biguint().expect("nonnegative");
    Ok(LabuteReport {
        weight: lie.weight,
        primitive: gcd.is_one(),
        gcd,
    })
}
