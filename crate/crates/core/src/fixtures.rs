//! Named presentations shipped with the crate, plus the identity script
//! for the `theorem7` presentation.
//!
//! Parametric families:
//! - `hydra-k{K}`: `< a, t | [a,t,...,t] >` with K copies of t
//! - `theorem7`: `< a, t | [a,t,t], [a,t,a,a,a] >`
//! - `theorem7-stretch`: `theorem7` with every basic commutator of weight
//!   7 through 10 adjoined as a relator
//! - `example1-k{K}-l{L}`: `< a, t | [a,t^(K)], [a,t^(K-2),e^(L)] >` with
//!   `e = [a,t^(K-1)]`
//! - `example2-k{K}-s{S}`: `< a, t | [[a,t^(S)],[a,t^(K-1)]], [a,t^(K)] >`
//! - `remark-k{K}`: `< a, t | [a,t^(K-1),a], [a,t^(K)] >`
//! - `free-rank{N}`: free group on x1..xN

use std::sync::Arc;

use crate::basic::basic_sequence;
use crate::error::{Error, Result};
use crate::nq::Presentation;
use crate::words::{left_normed_commutator, parse_word, Alphabet, Word};

const THEOREM7_IDENTITIES: &str = include_str!("../data/theorem7_identities.txt");

fn ambient() -> Arc<Alphabet> {
    Alphabet::new(["a", "t"]).expect("valid alphabet")
}

fn a_then_ts(alphabet: &Arc<Alphabet>, ts: usize) -> Result<Word> {
    let a = Word::generator(alphabet, 0)?;
    let t = Word::generator(alphabet, 1)?;
    let mut parts = vec![a];
    parts.extend(std::iter::repeat_n(t, ts));
    left_normed_commutator(&parts)
}

/// `< a, t | [a,t,...,t] >` with `k` copies of t.
pub fn hydra(k: usize) -> Result<Presentation> {
    if k == 0 {
        return Err(Error::Invalid("hydra fixture needs k >= 1".into()));
    }
    let alphabet = ambient();
    let relator = a_then_ts(&alphabet, k)?;
    Presentation::new(alphabet, vec![relator])
}

/// `< a, t | [a,t,t], [a,t,a,a,a] >`.
pub fn theorem7() -> Presentation {
    let alphabet = ambient();
    let r1 = parse_word("[a,t,t]", &alphabet).expect("valid");
    let r2 = parse_word("[a,t,a,a,a]", &alphabet).expect("valid");
    Presentation::new(alphabet, vec![r1, r2]).expect("valid")
}

/// `theorem7` with all basic commutators of weight 7..=10 over `{a, t}`
/// adjoined as relators.
pub fn theorem7_stretch() -> Result<Presentation> {
    let base = theorem7();
    let seq = basic_sequence(base.alphabet(), 10)?;
    let mut relators = base.relators().to_vec();
    for entry in seq.entries() {
        if entry.weight >= 7 {
            relators.push(seq.expand(entry.seq_index)?);
        }
    }
    Presentation::new(base.alphabet().clone(), relators)
}

/// `< a, t | [a,t^(k)], [a,t^(k-2),e^(l)] >` with `e = [a,t^(k-1)]`.
/// `example1(3, 1)` is the simplest non-nilpotent member,
/// `< a, t | [a,t,t,t], [[a,t],[a,t,t]] >`.
pub fn example1(k: usize, l: usize) -> Result<Presentation> {
    if k < 2 || l == 0 {
        return Err(Error::Invalid("example1 needs k >= 2 and l >= 1".into()));
    }
    let alphabet = ambient();
    let r1 = a_then_ts(&alphabet, k)?;
    let e = a_then_ts(&alphabet, k - 1)?;
    let a = Word::generator(&alphabet, 0)?;
    let t = Word::generator(&alphabet, 1)?;
    let mut parts = vec![a];
    parts.extend(std::iter::repeat_n(t, k - 2));
    parts.extend(std::iter::repeat_n(e, l));
    let r2 = left_normed_commutator(&parts)?;
    Presentation::new(alphabet, vec![r1, r2])
}

/// `< a, t | [[a,t^(s)],[a,t^(k-1)]], [a,t^(k)] >`. `example2(4, 1)` is
/// `< a, t | [[a,t],[a,t,t,t]], [a,t,t,t,t] >`.
pub fn example2(k: usize, s: usize) -> Result<Presentation> {
    if k == 0 || s == 0 || s > k.saturating_sub(1) {
        return Err(Error::Invalid(
            "example2 needs k >= 2 and 1 <= s <= k-1".into(),
        ));
    }
    let alphabet = ambient();
    let u = a_then_ts(&alphabet, s)?;
    let v = a_then_ts(&alphabet, k - 1)?;
    let r1 = u.commutator(&v)?;
    let r2 = a_then_ts(&alphabet, k)?;
    Presentation::new(alphabet, vec![r1, r2])
}

/// `< a, t | [a,t^(k-1),a], [a,t^(k)] >`.
pub fn remark(k: usize) -> Result<Presentation> {
    if k == 0 {
        return Err(Error::Invalid("remark fixture needs k >= 1".into()));
    }
    let alphabet = ambient();
    let prefix = a_then_ts(&alphabet, k - 1)?;
    let a = Word::generator(&alphabet, 0)?;
    let r1 = left_normed_commutator(&[prefix, a])?;
    let r2 = a_then_ts(&alphabet, k)?;
    Presentation::new(alphabet, vec![r1, r2])
}

/// Free group on `x1..xN`.
pub fn free(rank: usize) -> Result<Presentation> {
    let alphabet = Alphabet::new((1..=rank).map(|i| format!("x{i}")))?;
    Presentation::new(alphabet, Vec::new())
}

/// Resolves a fixture name like `theorem7`, `hydra-k3`, `example1-k3-l1`,
/// `example2-k4-s1`, `remark-k3`, `free-rank2`, `theorem7-stretch`.
pub fn by_name(name: &str) -> Result<Presentation> {
    if name == "theorem7" {
        return Ok(theorem7());
    }
    if name == "theorem7-stretch" {
        return theorem7_stretch();
    }
    if let Some(k) = parse_param(name, "hydra-k") {
        return hydra(k);
    }
    if let Some(k) = parse_param(name, "remark-k") {
        return remark(k);
    }
    if let Some(rank) = parse_param(name, "free-rank") {
        return free(rank);
    }
    if let Some(rest) = name.strip_prefix("example1-k") {
        if let Some((k, l)) = parse_two(rest, "-l") {
            return example1(k, l);
        }
    }
    if let Some(rest) = name.strip_prefix("example2-k") {
        if let Some((k, s)) = parse_two(rest, "-s") {
            return example2(k, s);
        }
    }
    Err(Error::Invalid(format!("unknown fixture `{name}`")))
}

fn parse_param(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse().ok()
}

fn parse_two(rest: &str, sep: &str) -> Option<(usize, usize)> {
    let (first, second) = rest.split_once(sep)?;
    Some((first.parse().ok()?, second.parse().ok()?))
}

/// The canonical list of shipped fixture names with descriptions.
pub fn catalog() -> Vec<(String, String)> {
    let mut out = Vec::new();
    out.push(("free-rank2".into(), "free group of rank 2".into()));
    for k in 1..=5 {
        out.push((
            format!("hydra-k{k}"),
            format!("one commutator relator with {k} t's"),
        ));
    }
    out.push((
        "theorem7".into(),
        "two commutator relators with 2-torsion in the class-6 quotient".into(),
    ));
    out.push((
        "theorem7-stretch".into(),
        "theorem7 with all basic commutators of weight 7-10 adjoined".into(),
    ));
    out.push((
        "example1-k3-l1".into(),
        "simplest non-nilpotent member of the first family".into(),
    ));
    out.push(("example1-k4-l2".into(), "first family, k=4, l=2".into()));
    out.push(("example2-k4-s1".into(), "second family, k=4, s=1".into()));
    out.push(("remark-k3".into(), "central-extension family, k=3".into()));
    out
}

/// One entry of the identity script.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: String,
    pub class: usize,
    pub lhs: Word,
    pub rhs: Word,
}

/// The shipped identity script for the `theorem7` presentation: the
/// three-term commutator-identity instantiations and relation consequences
/// used in its torsion computation, all exact at class 6.
pub fn theorem7_identity_script() -> Result<Vec<IdentityCheck>> {
    let alphabet = ambient();
    let mut out = Vec::new();
    for line in THEOREM7_IDENTITIES.lines() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parts: Vec<&str> = content.split('|').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Internal(format!(
                "bad identity script line: {content}"
            )));
        }
        let class: usize = parts[1]
            .parse()
            .map_err(|_| Error::Internal(format!("bad class in script line: {content}")))?;
        out.push(IdentityCheck {
            name: parts[0].to_string(),
            class,
            lhs: parse_word(parts[2], &alphabet)?,
            rhs: parse_word(parts[3], &alphabet)?,
        });
    }
    if out.is_empty() {
        return Err(Error::Internal("empty identity script".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for (name, _) in catalog() {
            let p = by_name(&name).unwrap();
            assert!(!p.alphabet().names().is_empty(), "{name}");
        }
        assert!(by_name("nope").is_err());
        assert!(by_name("hydra-k0").is_err());
    }

    #[test]
    fn simplest_non_nilpotent_member() {
        let p = example1(3, 1).unwrap();
        let r1 = parse_word("[a,t,t,t]", p.alphabet()).unwrap();
        let r2 = parse_word("[[a,t],[a,t,t]]", p.alphabet()).unwrap();
        assert_eq!(p.relators(), &[r1, r2]);
    }

    #[test]
    fn example2_displayed_member() {
        let p = example2(4, 1).unwrap();
        let r1 = parse_word("[[a,t],[a,t,t,t]]", p.alphabet()).unwrap();
        let r2 = parse_word("[a,t,t,t,t]", p.alphabet()).unwrap();
        assert_eq!(p.relators(), &[r1, r2]);
    }

    #[test]
    fn stretch_has_expected_relator_count() {
        // 2 defining relators plus 18 + 30 + 56 + 99 basic commutators
        let p = theorem7_stretch().unwrap();
        assert_eq!(p.relators().len(), 2 + 18 + 30 + 56 + 99);
    }

    #[test]
    fn script_parses() {
        let script = theorem7_identity_script().unwrap();
        assert_eq!(script.len(), 18);
        assert!(script.iter().all(|c| c.class == 6));
        assert!(script.iter().any(|c| c.name == "eq9"));
        assert!(script.iter().any(|c| c.name == "eq2"));
    }

    #[test]
    fn hydra_fixture_matches_module_relator() {
        for k in 1..=5 {
            let p = hydra(k).unwrap();
            let expected = crate::hydra::hydra_relator(k).unwrap();
            assert_eq!(p.relators(), &[expected]);
        }
    }
}
