//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `--nocapture` to see them). Every tolerance is exact.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use comrel::basic::{basic_sequence, witt_number};
use comrel::fixtures;
use comrel::hydra;
use comrel::lcs::{
    element_order, element_order_vec, factor_structure, factor_structures, is_power_of_two,
    torsion_probe, verify_identity_in, AbelianFactorStructure, ElementOrder, ProbeOutcome,
};
use comrel::magnus::{labute_hypothesis, lyndon_words, weight_of, WordWeight};
use comrel::nq::{nilpotent_quotient, Budget, NilpotentPresentation, Presentation};
use comrel::words::{
    hall_witt_left_side, left_normed_commutator, parse_word, Alphabet, Letter, Word,
};

fn budget() -> Budget {
    Budget::default()
}

fn quotient(p: &Presentation, class: usize) -> NilpotentPresentation {
    nilpotent_quotient(p, class, &budget()).unwrap()
}

fn random_word(rng: &mut StdRng, alphabet: &std::sync::Arc<Alphabet>, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len).map(|_| {
        Letter::new(
            rng.gen_range(0..alphabet.len()),
            if rng.gen_bool(0.5) { 1 } else { -1 },
        )
    });
    Word::from_letters(alphabet, letters).unwrap()
}

#[test]
fn criterion_1_theorem7_replay() {
    // Class-6 quotient of < a, t | [a,t,t] = [a,t,a,a,a] = 1 >: the image
    // of [a,t,a,a,t,a] has order exactly 2.
    let p = fixtures::theorem7();
    let np = quotient(&p, 6);
    let w = parse_word("[a,t,a,a,t,a]", p.alphabet()).unwrap();
    let image = np.image(&w).unwrap();
    assert!(!np.is_identity_vec(&image));
    assert_eq!(
        element_order_vec(&np, &image).unwrap(),
        ElementOrder::Finite(BigUint::from(2u32))
    );
    let square = np.multiply(&image, &image).unwrap();
    assert!(np.is_identity_vec(&square));
    println!("criterion 1: PASS - order of [a,t,a,a,t,a] at class 6 is exactly 2");
}

#[test]
fn criterion_2_generalized_two_torsion() {
    // Orders at classes 6 and 7 are finite powers of two, and the element
    // is nontrivial at class 6 (so w is outside the weight-7 term while
    // its square is inside).
    let p = fixtures::theorem7();
    let w = parse_word("[a,t,a,a,t,a]", p.alphabet()).unwrap();
    let report = torsion_probe(&p, &w, &[6, 7], &budget()).unwrap();
    assert!(report.all_finite);
    assert!(report.power_of_two_everywhere);
    assert!(report.nontrivial_classes.contains(&6));
    let mut orders = Vec::new();
    for entry in &report.entries {
        match &entry.outcome {
            ProbeOutcome::Order(ElementOrder::Finite(n)) => {
                assert!(is_power_of_two(n), "class {}: order {n}", entry.class);
                orders.push((entry.class, n.clone()));
            }
            other => panic!("class {}: unexpected outcome {other:?}", entry.class),
        }
    }
    assert_eq!(orders[0], (6, BigUint::from(2u32)));
    assert!(
        orders[1].1 >= BigUint::from(2u32),
        "still nontrivial at class 7"
    );
    println!(
        "criterion 2: PASS - orders {:?} at classes [6,7] are powers of two",
        orders
            .iter()
            .map(|(_, n)| n.to_string())
            .collect::<Vec<_>>()
    );
}

#[test]
fn criterion_3_identity_chain_replay() {
    // Every scripted identity (the three-term instantiations and the
    // derived rewrites, including eq2 and eq9) holds exactly at class 6.
    let p = fixtures::theorem7();
    let np = quotient(&p, 6);
    let script = fixtures::theorem7_identity_script().unwrap();
    assert!(script.iter().any(|c| c.name == "eq2"));
    assert!(script.iter().any(|c| c.name == "eq9"));
    for check in &script {
        let np_c = if check.class == np.class() {
            np.clone()
        } else {
            np.truncate_to_class(check.class).unwrap()
        };
        assert!(
            verify_identity_in(&np_c, &check.lhs, &check.rhs).unwrap(),
            "identity {} fails at class {}",
            check.name,
            check.class
        );
    }
    println!(
        "criterion 3: PASS - all {} scripted identities hold exactly at class 6",
        script.len()
    );
}

#[test]
fn criterion_4_magnus_witt_consistency() {
    // Free rank 2: quotient factors at classes 1..=6 are torsion-free of
    // ranks 2,1,2,3,6,9, agreeing with the Witt formula, the basic
    // commutator counts, and the Lyndon word counts.
    let expected = [2usize, 1, 2, 3, 6, 9];
    let p = fixtures::free(2).unwrap();
    let np = quotient(&p, 6);
    let seq = basic_sequence(p.alphabet(), 6).unwrap();
    for (i, want) in expected.iter().enumerate() {
        let n = i + 1;
        let fs = factor_structure(&np, n).unwrap();
        assert_eq!(fs.free_rank, *want, "weight {n}");
        assert!(fs.is_torsion_free(), "weight {n}");
        assert_eq!(witt_number(2, n).unwrap(), BigUint::from(*want), "witt {n}");
        assert_eq!(seq.weight_class(n).len(), *want, "basic {n}");
        assert_eq!(lyndon_words(2, n).unwrap().len(), *want, "lyndon {n}");
    }
    println!("criterion 4: PASS - free rank-2 factors are Z^(2,1,2,3,6,9), four ways");
}

#[test]
fn criterion_5_weight_oracle_equivalence() {
    // For 500 random words of length <= 8 on two generators: the series
    // weight and the triviality depth in free nilpotent quotients agree:
    // weight >= n+1 iff the image at class n is trivial, for n <= 5.
    let p = fixtures::free(2).unwrap();
    let quotients: Vec<NilpotentPresentation> = (1..=5).map(|c| quotient(&p, c)).collect();
    let mut rng = StdRng::seed_from_u64(20260808);
    let mut nontrivial_samples = 0;
    for _ in 0..500 {
        let w = random_word(&mut rng, p.alphabet(), 8);
        let weight = weight_of(&w, 6).unwrap();
        for (n, np) in quotients.iter().enumerate() {
            let n = n + 1;
            let trivial = np.is_identity_vec(&np.image(&w).unwrap());
            let deep_enough = match weight {
                WordWeight::Identity => true,
                WordWeight::ExceedsCap => true, // weight >= 7 > n+1 for n <= 5
                WordWeight::Weight(k) => k > n,
            };
            assert_eq!(
                trivial, deep_enough,
                "word {w}, class {n}, weight {weight:?}"
            );
        }
        if !matches!(weight, WordWeight::Identity) {
            nontrivial_samples += 1;
        }
    }
    assert!(
        nontrivial_samples > 400,
        "sample set is overwhelmingly nontrivial"
    );
    println!("criterion 5: PASS - weight filtration agrees with quotient triviality on 500 words");
}

#[test]
fn criterion_6_hall_witt() {
    // Free reduction of the three-term identity vanishes for 1000 random
    // triples, and its image is trivial inside class-4 quotients of five
    // fixture presentations.
    let free2 = fixtures::free(2).unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..1000 {
        let a = random_word(&mut rng, free2.alphabet(), 6);
        let b = random_word(&mut rng, free2.alphabet(), 6);
        let c = random_word(&mut rng, free2.alphabet(), 6);
        let lhs = hall_witt_left_side(&a, &b, &c).unwrap();
        assert!(lhs.is_identity(), "A={a} B={b} C={c}");
    }
    let fixture_names = [
        "free-rank2",
        "hydra-k2",
        "hydra-k3",
        "theorem7",
        "example1-k3-l1",
    ];
    for name in fixture_names {
        let p = fixtures::by_name(name).unwrap();
        let np = quotient(&p, 4);
        let identity = Word::identity(p.alphabet());
        for _ in 0..20 {
            let a = random_word(&mut rng, p.alphabet(), 5);
            let b = random_word(&mut rng, p.alphabet(), 5);
            let c = random_word(&mut rng, p.alphabet(), 5);
            let lhs = hall_witt_left_side(&a, &b, &c).unwrap();
            assert!(
                verify_identity_in(&np, &lhs, &identity).unwrap(),
                "fixture {name}: A={a} B={b} C={c}"
            );
        }
    }
    println!("criterion 6: PASS - three-term identity: 1000 free reductions + 5 quotient checks");
}

#[test]
fn criterion_7_hydra_suite() {
    // Relator triviality, the action table, normal-form/quotient
    // cross-validation, and the c-generator rewriting.
    for k in 1..=5 {
        let relator = hydra::hydra_relator(k).unwrap();
        assert!(hydra::hydra_is_trivial(k, &relator).unwrap(), "k={k}");
    }
    for k in 1..=5 {
        let table = hydra::t_action(k, -1).unwrap();
        let h = hydra::h_alphabet(k).unwrap();
        for (i, image) in table.iter().enumerate() {
            let expected = if i + 1 < k {
                Word::generator(&h, i)
                    .unwrap()
                    .multiply(&Word::generator(&h, i + 1).unwrap())
                    .unwrap()
            } else {
                Word::generator(&h, i).unwrap()
            };
            assert_eq!(image, &expected, "k={k} i={i}");
        }
    }
    // cross-validation against the quotients, 200 words per k
    let mut rng = StdRng::seed_from_u64(7);
    for k in 1..=4 {
        let p = fixtures::hydra(k).unwrap();
        let class = 5;
        let np = quotient(&p, class);
        for _ in 0..200 {
            let w = random_word(&mut rng, p.alphabet(), 10);
            let nf = hydra::hydra_normal_form(k, &w).unwrap();
            let image = np.image(&w).unwrap();
            if nf.is_identity() {
                assert!(np.is_identity_vec(&image), "k={k} w={w}");
            } else {
                let back = hydra::reconstruct(k, &nf).unwrap();
                assert_eq!(np.image(&back).unwrap(), image, "k={k} w={w}");
            }
        }
    }
    // rewriting into the c-generators
    for k in 2..=5 {
        for l in 1..=3 {
            let got = hydra::rewrite_in_c(k, l).unwrap();
            let c = hydra::c_alphabet(k).unwrap();
            let mut parts = vec![Word::generator(&c, k - 2).unwrap()];
            parts.extend(std::iter::repeat_n(Word::generator(&c, k - 1).unwrap(), l));
            assert_eq!(got, left_normed_commutator(&parts).unwrap(), "k={k} l={l}");
        }
    }
    println!("criterion 7: PASS - hydra relators, action, 800 cross-validations, rewriting");
}

#[test]
fn criterion_8_labute_hypothesis_checks() {
    // Composite relators [u,v,...,v] with u, v basic commutators in
    // disjoint generators have weight m+kn and a primitive leading term.
    let cases: [(&[&str], &str, usize); 3] = [
        // u = [x1,x2] (m=2), v = y (n=1), k=2: weight 4
        (&["x1", "x2", "y"], "[[x1,x2],y,y]", 4),
        // u = x (m=1), v = [y1,y2] (n=2), k=2: weight 5
        (&["x", "y1", "y2"], "[x,[y1,y2],[y1,y2]]", 5),
        // u = [x1,x2] (m=2), v = [y1,y2] (n=2), k=2: weight 6
        (&["x1", "x2", "y1", "y2"], "[[x1,x2],[y1,y2],[y1,y2]]", 6),
    ];
    for (gens, text, want_weight) in cases {
        let alphabet = Alphabet::new(gens.iter().copied()).unwrap();
        let w = parse_word(text, &alphabet).unwrap();
        let report = labute_hypothesis(&w, want_weight + 1).unwrap();
        assert_eq!(report.weight, want_weight, "{text}");
        assert!(report.primitive, "{text}");
        assert_eq!(report.gcd, BigUint::one(), "{text}");
    }
    // u * v^-1 for the cyclically pinched example u = [x1,x2],
    // v = [[y1,y2],y2]: weight 2, primitive.
    let alphabet = Alphabet::new(["x1", "x2", "y1", "y2"]).unwrap();
    let w = parse_word("[x1,x2] * [[y1,y2],y2]^-1", &alphabet).unwrap();
    let report = labute_hypothesis(&w, 3).unwrap();
    assert_eq!((report.weight, report.primitive), (2, true));
    // proper powers are never primitive
    let xy = Alphabet::new(["x", "y"]).unwrap();
    for m in 2..=5i64 {
        let w = parse_word("x", &xy).unwrap().pow(m);
        let report = labute_hypothesis(&w, 3).unwrap();
        assert_eq!(report.weight, 1);
        assert!(!report.primitive, "x^{m}");
        assert_eq!(report.gcd, BigUint::from(m as u64));
        let w = parse_word("[x,y]", &xy).unwrap().pow(m);
        let report = labute_hypothesis(&w, 3).unwrap();
        assert_eq!(report.weight, 2);
        assert!(!report.primitive, "[x,y]^{m}");
    }
    println!("criterion 8: PASS - composite relators primitive at weight m+kn; powers are not");
}

#[test]
fn criterion_9_final_remark_stretch() {
    // Adjoining every basic commutator of weight 7..=10 leaves the class-6
    // quotient unchanged and keeps the order-2 element.
    let base = fixtures::theorem7();
    let stretched = fixtures::theorem7_stretch().unwrap();
    assert_eq!(stretched.relators().len(), 205);
    let np_base = quotient(&base, 6);
    let np_stretched = quotient(&stretched, 6);
    let base_factors: Vec<AbelianFactorStructure> = factor_structures(&np_base).unwrap();
    let stretched_factors: Vec<AbelianFactorStructure> = factor_structures(&np_stretched).unwrap();
    assert_eq!(base_factors, stretched_factors);
    let w = parse_word("[a,t,a,a,t,a]", base.alphabet()).unwrap();
    assert_eq!(
        element_order(&np_stretched, &w).unwrap(),
        ElementOrder::Finite(BigUint::from(2u32))
    );
    // identical images of the torsion element in both quotients
    assert_eq!(np_base.image(&w).unwrap(), np_stretched.image(&w).unwrap());
    println!("criterion 9: PASS - weight 7-10 relators leave the class-6 structure unchanged");
}

// Supporting regression: the engine notices when the adjoined relators do
// matter, so criterion 9 is not passing vacuously.
#[test]
fn stretch_control_lower_weight_relator_changes_factors() {
    let base = fixtures::theorem7();
    let mut relators = base.relators().to_vec();
    relators.push(parse_word("[a,t,a,a,t,a]", base.alphabet()).unwrap());
    let p = Presentation::new(base.alphabet().clone(), relators).unwrap();
    let np = quotient(&p, 6);
    let fs = factor_structure(&np, 6).unwrap();
    let base_fs = factor_structure(&quotient(&base, 6), 6).unwrap();
    assert_ne!(
        fs, base_fs,
        "a weight-6 relator must change the weight-6 factor"
    );
    let w = parse_word("[a,t,a,a,t,a]", base.alphabet()).unwrap();
    assert_eq!(
        element_order(&np, &w).unwrap(),
        ElementOrder::Finite(BigUint::one())
    );
}

// Functoriality across the tower on fixture presentations.
#[test]
fn tower_functoriality_on_fixtures() {
    for name in ["theorem7", "hydra-k2", "example1-k3-l1"] {
        let p = fixtures::by_name(name).unwrap();
        let top = quotient(&p, 6);
        for class in 1..=5 {
            let truncated = top.truncate_to_class(class).unwrap();
            let direct = quotient(&p, class);
            assert_eq!(
                factor_structures(&truncated).unwrap(),
                factor_structures(&direct).unwrap(),
                "{name} class {class}"
            );
        }
    }
}

// Completed quotients are immutable and shareable; independent
// computations running in parallel agree with the serial result.
#[test]
fn parallel_computations_agree() {
    let p = fixtures::theorem7();
    let serial = quotient(&p, 5);
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let p = p.clone();
            std::thread::spawn(move || {
                let np = nilpotent_quotient(&p, 5, &Budget::default()).unwrap();
                factor_structures(&np).unwrap()
            })
        })
        .collect();
    let expected = factor_structures(&serial).unwrap();
    for handle in handles {
        assert_eq!(handle.join().unwrap(), expected);
    }
    // and a shared quotient can be queried from several threads
    let shared = std::sync::Arc::new(serial);
    let word = parse_word("[a,t,a]", p.alphabet()).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let np = std::sync::Arc::clone(&shared);
            let w = word.clone();
            std::thread::spawn(move || element_order(&np, &w).unwrap())
        })
        .collect();
    for handle in handles {
        assert_eq!(handle.join().unwrap(), ElementOrder::Infinite);
    }
}

#[test]
fn power_of_two_helper() {
    assert!(is_power_of_two(&BigUint::from(1u32)));
    assert!(is_power_of_two(&BigUint::from(2u32)));
    assert!(is_power_of_two(&BigUint::from(64u32)));
    assert!(!is_power_of_two(&BigUint::from(6u32)));
    assert!(!is_power_of_two(&BigUint::from(0u32)));
}

// The weight-n basic commutators map onto a Z-basis of the weight-n
// section of the free class-5 quotient: the coordinate matrix of their
// images is unimodular.
#[test]
fn basic_commutators_are_a_section_basis() {
    let p = fixtures::free(2).unwrap();
    let np = quotient(&p, 5);
    let seq = basic_sequence(p.alphabet(), 5).unwrap();
    for weight in 1..=5 {
        let range = np.section_range(weight);
        let entries = seq.weight_class(weight);
        assert_eq!(entries.len(), range.len(), "weight {weight}");
        let mut rows = Vec::new();
        for entry in entries {
            let word = seq.expand(entry.seq_index).unwrap();
            let image = np.image(&word).unwrap();
            // a weight-n basic commutator lands inside the weight-n term
            assert!(
                image[..range.start].iter().all(Zero::is_zero),
                "weight {weight}: {}",
                seq.notation(entry.seq_index)
            );
            rows.push(image[range.clone()].to_vec());
        }
        let matrix = comrel::matrix::IntMatrix::from_rows(rows).unwrap();
        let snf = comrel::nq::smith_normal_form(&matrix);
        assert_eq!(snf.rank(), range.len(), "weight {weight}");
        assert!(
            snf.diagonal()
                .iter()
                .all(|d| d.magnitude() == &BigUint::one()),
            "weight {weight}: diagonal {:?}",
            snf.diagonal()
        );
    }
}
