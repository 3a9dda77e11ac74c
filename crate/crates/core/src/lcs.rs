//! Analysis of lower-central structure on top of nilpotent quotients:
//! factor structures, exact element orders, identity verification, and
//! torsion probes across classes.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{order_in_quotient, smith_normal_form, IntMatrix};
use crate::nq::{nilpotent_quotient, Budget, NilpotentPresentation, Presentation};
use crate::words::Word;

/// Invariant-factor decomposition of one lower-central factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianFactorStructure {
    pub weight: usize,
    pub free_rank: usize,
    /// Invariant factors greater than 1, each dividing the next.
    pub torsion: Vec<BigUint>,
}

impl AbelianFactorStructure {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

impl std::fmt::Display for AbelianFactorStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Smith invariants of the weight-`k` factor of the quotient.
pub fn factor_structure(
    np: &NilpotentPresentation,
    weight: usize,
) -> Result<AbelianFactorStructure> {
    if weight == 0 || weight > np.class() {
        return Err(Error::Invalid(format!(
            "weight {weight} out of range 1..={}",
            np.class()
        )));
    }
    let size = np.section_range(weight).len();
    let rows = np.section_relation_rows(weight);
    if rows.is_empty() {
        return Ok(AbelianFactorStructure {
            weight,
            free_rank: size,
            torsion: Vec::new(),
        });
    }
    let snf = smith_normal_form(&IntMatrix::from_rows(rows)?);
    Ok(AbelianFactorStructure {
        weight,
        free_rank: size - snf.rank(),
        torsion: snf.torsion_factors(),
    })
}

/// All factor structures of a quotient, weights `1..=class`.
pub fn factor_structures(np: &NilpotentPresentation) -> Result<Vec<AbelianFactorStructure>> {
    (1..=np.class()).map(|w| factor_structure(np, w)).collect()
}

/// Exact order of an element of a finitely generated nilpotent group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(BigUint),
    Infinite,
}

impl std::fmt::Display for ElementOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ElementOrder::Finite(n) => write!(f, "{n}"),
            ElementOrder::Infinite => write!(f, "infinite"),
        }
    }
}

/// Exact order of the image of a word in the quotient.
pub fn element_order(np: &NilpotentPresentation, word: &Word) -> Result<ElementOrder> {
    let v = np.image(word)?;
    element_order_vec(np, &v)
}

/// Exact order of a normal-form element, by descending the weight
/// filtration: the order of the leading block in its graded section either
/// certifies infinitude or gives the exact factor to power by.
pub fn element_order_vec(np: &NilpotentPresentation, v: &[BigInt]) -> Result<ElementOrder> {
    let mut z = v.to_vec();
    let mut total = BigUint::one();
    loop {
        let Some(first) = z.iter().position(|c| !c.is_zero()) else {
            return Ok(ElementOrder::Finite(total));
        };
        let weight = np.weight(first);
        let range = np.section_range(weight);
        let block: Vec<BigInt> = z[range].to_vec();
        let rows = np.section_relation_rows(weight);
        match order_in_quotient(&block, &rows)? {
            None => return Ok(ElementOrder::Infinite),
            Some(d) => {
                if d.is_one() {
                    return Err(Error::Internal(
                        "nonzero leading block trivial in its section".into(),
                    ));
                }
                z = np.power(&z, &BigInt::from(d.clone()))?;
                total *= d;
            }
        }
    }
}

/// True iff two words have the same image in the class-`c` quotient.
pub fn verify_identity(
    presentation: &Presentation,
    class: usize,
    lhs: &Word,
    rhs: &Word,
    budget: &Budget,
) -> Result<bool> {
    let np = nilpotent_quotient(presentation, class, budget)?;
    verify_identity_in(&np, lhs, rhs)
}

/// As [`verify_identity`], reusing a computed quotient.
pub fn verify_identity_in(np: &NilpotentPresentation, lhs: &Word, rhs: &Word) -> Result<bool> {
    Ok(np.image(lhs)? == np.image(rhs)?)
}

/// Whether a positive integer is a power of two (1 counts).
pub fn is_power_of_two(n: &BigUint) -> bool {
    !n.is_zero() && n.count_ones() == 1
}

/// Outcome of one class in a torsion probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeOutcome {
    Order(ElementOrder),
    /// The class was not resolved; the budget error is recorded instead of
    /// aborting the probe.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeEntry {
    pub class: usize,
    pub outcome: ProbeOutcome,
}

/// Per-class element orders with summary verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionProbeReport {
    pub word: String,
    pub entries: Vec<ProbeEntry>,
    /// Every sampled class resolved to a finite order.
    pub all_finite: bool,
    /// Every sampled class resolved to a finite power of two.
    pub power_of_two_everywhere: bool,
    /// Classes where the image is nontrivial.
    pub nontrivial_classes: Vec<usize>,
}

/// Computes the order of `word`'s image at each listed class.
pub fn torsion_probe(
    presentation: &Presentation,
    word: &Word,
    classes: &[usize],
    budget: &Budget,
) -> Result<TorsionProbeReport> {
    if classes.is_empty() {
        return Err(Error::Invalid(
            "torsion probe needs at least one class".into(),
        ));
    }
    let mut entries = Vec::new();
    let mut all_finite = true;
    let mut power_of_two = true;
    let mut nontrivial = Vec::new();
    for &class in classes {
        let outcome = (|| -> Result<(ElementOrder, bool)> {
            let np = nilpotent_quotient(presentation, class, budget)?;
            let image = np.image(word)?;
            let order = element_order_vec(&np, &image)?;
            Ok((order, !np.is_identity_vec(&image)))
        })();
        match outcome {
            Ok((order, is_nontrivial)) => {
                match &order {
                    ElementOrder::Finite(n) => {
                        if !is_power_of_two(n) {
                            power_of_two = false;
                        }
                    }
                    ElementOrder::Infinite => {
                        all_finite = false;
                        power_of_two = false;
                    }
                }
                if is_nontrivial {
                    nontrivial.push(class);
                }
                entries.push(ProbeEntry {
                    class,
                    outcome: ProbeOutcome::Order(order),
                });
            }
            Err(err @ Error::Budget(_)) => {
                all_finite = false;
                power_of_two = false;
                entries.push(ProbeEntry {
                    class,
                    outcome: ProbeOutcome::Failed(err.to_string()),
                });
            }
            Err(other) => return Err(other),
        }
    }
    Ok(TorsionProbeReport {
        word: word.to_string(),
        entries,
        all_finite,
        power_of_two_everywhere: power_of_two,
        nontrivial_classes: nontrivial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nq::parse_presentation;
    use crate::words::parse_word;

    fn budget() -> Budget {
        Budget::default()
    }

    fn free2() -> Presentation {
        parse_presentation("gens: a, t\n").unwrap()
    }

    fn theorem7_presentation() -> Presentation {
        parse_presentation("gens: a, t\nrel: [a,t,t]\nrel: [a,t,a,a,a]\n").unwrap()
    }

    #[test]
    fn free_factors_are_torsion_free() {
        let np = nilpotent_quotient(&free2(), 6, &budget()).unwrap();
        let expected = [2usize, 1, 2, 3, 6, 9];
        for (i, want) in expected.iter().enumerate() {
            let fs = factor_structure(&np, i + 1).unwrap();
            assert_eq!(fs.free_rank, *want);
            assert!(fs.is_torsion_free());
        }
        assert!(factor_structure(&np, 7).is_err());
        assert!(factor_structure(&np, 0).is_err());
    }

    #[test]
    fn hydra2_weight3_factor() {
        let p = parse_presentation("gens: a, t\nrel: [a,t,t]\n").unwrap();
        let np = nilpotent_quotient(&p, 3, &budget()).unwrap();
        let fs = factor_structure(&np, 3).unwrap();
        assert_eq!(fs.free_rank, 1);
        assert!(fs.is_torsion_free());
    }

    #[test]
    fn order_basics() {
        let np = nilpotent_quotient(&free2(), 2, &budget()).unwrap();
        let a = parse_word("a", np.source().alphabet()).unwrap();
        assert_eq!(element_order(&np, &a).unwrap(), ElementOrder::Infinite);
        let id = Word::identity(np.source().alphabet());
        assert_eq!(
            element_order(&np, &id).unwrap(),
            ElementOrder::Finite(BigUint::one())
        );
        let comm = parse_word("[a,t]", np.source().alphabet()).unwrap();
        assert_eq!(element_order(&np, &comm).unwrap(), ElementOrder::Infinite);

        let z2 = parse_presentation("gens: x\nrel: x^2\n").unwrap();
        let np = nilpotent_quotient(&z2, 2, &budget()).unwrap();
        let x = parse_word("x", np.source().alphabet()).unwrap();
        assert_eq!(
            element_order(&np, &x).unwrap(),
            ElementOrder::Finite(BigUint::from(2u32))
        );
        let z4 = parse_presentation("gens: x\nrel: x^4\n").unwrap();
        let np = nilpotent_quotient(&z4, 2, &budget()).unwrap();
        let x3 = parse_word("x^3", np.source().alphabet()).unwrap();
        assert_eq!(
            element_order(&np, &x3).unwrap(),
            ElementOrder::Finite(BigUint::from(4u32))
        );
    }

    #[test]
    fn theorem7_order_two_element() {
        // The flagship computation: in the class-6 quotient of
        // < a, t | [a,t,t] = [a,t,a,a,a] = 1 >, the image of
        // [a,t,a,a,t,a] has order exactly 2.
        let p = theorem7_presentation();
        let np = nilpotent_quotient(&p, 6, &budget()).unwrap();
        let w = parse_word("[a,t,a,a,t,a]", p.alphabet()).unwrap();
        let image = np.image(&w).unwrap();
        assert!(!np.is_identity_vec(&image), "w is nontrivial at class 6");
        assert_eq!(
            element_order_vec(&np, &image).unwrap(),
            ElementOrder::Finite(BigUint::from(2u32))
        );
        // doubling collects to the identity
        let square = np.multiply(&image, &image).unwrap();
        assert!(np.is_identity_vec(&square));
        // the weight-6 factor carries even torsion
        let fs = factor_structure(&np, 6).unwrap();
        assert!(
            fs.torsion
                .iter()
                .any(|d| (d % BigUint::from(2u32)).is_zero()),
            "weight-6 torsion {fs}"
        );
    }

    #[test]
    fn identity_checks() {
        let p = theorem7_presentation();
        let a = parse_word("a", p.alphabet()).unwrap();
        assert!(verify_identity(&p, 2, &a, &a, &budget()).unwrap());
        let np = nilpotent_quotient(&p, 6, &budget()).unwrap();
        // relation-derived: [a,t^-1] = [t,a] given [a,t,t] = 1
        let lhs = parse_word("[a,t^-1]", p.alphabet()).unwrap();
        let rhs = parse_word("[t,a]", p.alphabet()).unwrap();
        assert!(verify_identity_in(&np, &lhs, &rhs).unwrap());
        // and something false
        let t = parse_word("t", p.alphabet()).unwrap();
        assert!(!verify_identity_in(&np, &a, &t).unwrap());
    }

    #[test]
    fn probe_reports() {
        let p = free2();
        let comm = parse_word("[a,t]", p.alphabet()).unwrap();
        let report = torsion_probe(&p, &comm, &[2, 3], &budget()).unwrap();
        assert!(!report.all_finite);
        assert!(!report.power_of_two_everywhere);
        assert_eq!(report.entries.len(), 2);
        for entry in &report.entries {
            assert_eq!(entry.outcome, ProbeOutcome::Order(ElementOrder::Infinite));
        }

        let a = parse_word("a", p.alphabet()).unwrap();
        let report = torsion_probe(&p, &a, &[2], &budget()).unwrap();
        assert!(!report.all_finite);

        // infinite abelianization image in the torsion presentation too
        let d = theorem7_presentation();
        let a = parse_word("a", d.alphabet()).unwrap();
        let report = torsion_probe(&d, &a, &[2], &budget()).unwrap();
        assert_eq!(
            report.entries[0].outcome,
            ProbeOutcome::Order(ElementOrder::Infinite)
        );

        assert!(torsion_probe(&p, &a, &[], &budget()).is_err());

        // a per-class budget failure is recorded, not fatal
        let tiny = Budget {
            max_pc_gens: 2,
            ..budget()
        };
        let report = torsion_probe(&p, &a, &[1, 3], &tiny).unwrap();
        assert!(matches!(report.entries[0].outcome, ProbeOutcome::Order(_)));
        assert!(matches!(report.entries[1].outcome, ProbeOutcome::Failed(_)));
        assert!(!report.power_of_two_everywhere);
    }

    #[test]
    fn shared_types_are_thread_safe() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<crate::words::Word>();
        assert_send_sync::<Presentation>();
        assert_send_sync::<NilpotentPresentation>();
        assert_send_sync::<TorsionProbeReport>();
        assert_send_sync::<AbelianFactorStructure>();
    }

    #[test]
    fn order_is_a_class_function() {
        let p = theorem7_presentation();
        let np = nilpotent_quotient(&p, 5, &budget()).unwrap();
        let words = ["[a,t,a,a,t]", "[a,t,a]", "a*t", "[a,t]^3*a"];
        let conjugators = ["t", "a*t^-1", "[a,t]*a"];
        for w in words {
            let w = parse_word(w, p.alphabet()).unwrap();
            let base = element_order(&np, &w).unwrap();
            for g in conjugators {
                let g = parse_word(g, p.alphabet()).unwrap();
                let conj = w.conjugate(&g).unwrap();
                assert_eq!(element_order(&np, &conj).unwrap(), base);
            }
        }
    }

    #[test]
    fn triviality_is_monotone_in_class() {
        let p = theorem7_presentation();
        // images trivial at class c stay trivial at smaller classes
        let words = ["[a,t,t]", "[a,t,a,a,a]", "[a,t,a]", "[a,t,a,a,t,a]", "a"];
        for text in words {
            let w = parse_word(text, p.alphabet()).unwrap();
            let mut nontrivial_at: Option<usize> = None;
            for class in 1..=5 {
                let np = nilpotent_quotient(&p, class, &budget()).unwrap();
                let is_trivial = np.is_identity_vec(&np.image(&w).unwrap());
                if let Some(at) = nontrivial_at {
                    assert!(
                        !is_trivial,
                        "{text} nontrivial at class {at} but trivial at class {class}"
                    );
                } else if !is_trivial {
                    nontrivial_at = Some(class);
                }
            }
        }
    }
}
