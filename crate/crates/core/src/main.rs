//! Command-line interface over the library: quotient computation, element
//! orders, factor tables, torsion probes, identity verification, basic
//! commutators, weight analysis and Hydra normal forms.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use comrel::basic::{basic_sequence, witt_number};
use comrel::error::Error;
use comrel::fixtures;
use comrel::hydra;
use comrel::lcs::{
    element_order, factor_structures, is_power_of_two, torsion_probe, verify_identity_in,
    ElementOrder, ProbeOutcome,
};
use comrel::magnus::{labute_hypothesis, leading_lie, lyndon_words};
use comrel::nq::{
    nilpotent_quotient, parse_presentation, Budget, NilpotentPresentation, Presentation,
};
use comrel::words::{hall_witt_left_side, parse_word, Alphabet, Letter, Word};

#[derive(Parser)]
#[command(
    name = "comrel",
    version,
    about = "Exact computation in groups defined by commutator relators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PresSource {
    /// Presentation file (lines `gens: a, t` and `rel: <word>`)
    #[arg(long)]
    pres: Option<PathBuf>,
    /// Shipped fixture name (see the `fixtures` subcommand)
    #[arg(long)]
    fixture: Option<String>,
    /// Inline generator list, e.g. `--gens a,t`
    #[arg(long)]
    gens: Option<String>,
    /// Inline relator; may be repeated
    #[arg(long = "rel")]
    rels: Vec<String>,
}

impl PresSource {
    fn load(&self) -> Result<Presentation, Error> {
        let picked = usize::from(self.pres.is_some())
            + usize::from(self.fixture.is_some())
            + usize::from(self.gens.is_some());
        if picked != 1 {
            return Err(Error::Invalid(
                "give exactly one of --pres, --fixture, or --gens (with --rel)".into(),
            ));
        }
        if let Some(path) = &self.pres {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
            return parse_presentation(&text);
        }
        if let Some(name) = &self.fixture {
            return fixtures::by_name(name);
        }
        let gens = self.gens.as_ref().expect("checked");
        let alphabet = alphabet_from_list(gens)?;
        let relators = self
            .rels
            .iter()
            .map(|r| parse_word(r, &alphabet))
            .collect::<Result<Vec<_>, _>>()?;
        Presentation::new(alphabet, relators)
    }
}

fn alphabet_from_list(list: &str) -> Result<Arc<Alphabet>, Error> {
    Alphabet::new(list.split(',').map(str::trim).filter(|s| !s.is_empty()))
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Cap on pc generators (default from COMREL_BUDGET, else 4096)
    #[arg(long)]
    max_gens: Option<usize>,
    /// Cap on the nilpotency class
    #[arg(long)]
    max_class: Option<usize>,
    /// Cap on matrix entry bit-size during reduction
    #[arg(long)]
    max_entry_bits: Option<u64>,
}

impl BudgetArgs {
    fn build(&self) -> Result<Budget, Error> {
        let mut budget = Budget::default();
        if let Ok(env) = std::env::var("COMREL_BUDGET") {
            budget.max_pc_gens = env
                .parse()
                .map_err(|_| Error::Invalid(format!("bad COMREL_BUDGET value `{env}`")))?;
        }
        if let Some(v) = self.max_gens {
            budget.max_pc_gens = v;
        }
        if let Some(v) = self.max_class {
            budget.max_class = v;
        }
        if let Some(v) = self.max_entry_bits {
            budget.max_entry_bits = v;
        }
        Ok(budget)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the class-N nilpotent quotient as a weighted pc presentation
    Nq {
        #[command(flatten)]
        source: PresSource,
        #[arg(long)]
        class: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// Exact order of a word's image in the class-N quotient
    Order {
        #[command(flatten)]
        source: PresSource,
        #[arg(long)]
        class: usize,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// Table of lower-central factors of the class-N quotient
    Lcs {
        #[command(flatten)]
        source: PresSource,
        #[arg(long)]
        class: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// Element order across several classes, with a power-of-two verdict
    Probe {
        #[command(flatten)]
        source: PresSource,
        #[arg(long)]
        word: String,
        /// Comma-separated class list, e.g. 5,6,7
        #[arg(long)]
        classes: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check whether two words agree in the class-N quotient
    Verify {
        #[command(flatten)]
        source: PresSource,
        #[arg(long)]
        class: Option<usize>,
        #[arg(long)]
        lhs: Option<String>,
        #[arg(long)]
        rhs: Option<String>,
        /// Run the shipped identity script instead of a single check
        #[arg(long)]
        script: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// Weight, leading Lie element gcd, and primitivity of a word
    Labute {
        /// Generator list, e.g. `--gens x,y`
        #[arg(long)]
        gens: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Basic commutators up to a weight bound
    Basic {
        /// Number of generators (named x1..xq)
        #[arg(long)]
        gens: usize,
        #[arg(long)]
        max_weight: usize,
        #[arg(long)]
        json: bool,
    },
    /// Witt rank of the weight-n graded piece for q generators
    Witt {
        #[arg(long)]
        gens: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Normal form h * t^n in the k-th Hydra group
    #[command(name = "hydra-nf")]
    HydraNf {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        word: String,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite the second family relator into the c-generators
    #[command(name = "hydra-rewrite")]
    HydraRewrite {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        json: bool,
    },
    /// Random check of the three-term commutator identity
    #[command(name = "hall-witt-check")]
    HallWittCheck {
        /// Number of random triples
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Maximum word length per component
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// List shipped presentations; --emit prints one as a file
    Fixtures {
        #[arg(long)]
        emit: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Parse { .. } | Error::UnknownGenerator { .. } => 2,
                Error::Budget(_) => 3,
                Error::Internal(_) => 70,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn print_value(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn exp_vec_value(np: &NilpotentPresentation, v: &[BigInt]) -> Value {
    let mut map = serde_json::Map::new();
    for (gen, coeff) in v.iter().enumerate() {
        if !num_traits::Zero::is_zero(coeff) {
            map.insert(np.gen_name(gen), Value::String(coeff.to_string()));
        }
    }
    Value::Object(map)
}

fn exp_vec_text(np: &NilpotentPresentation, v: &[BigInt]) -> String {
    let mut parts = Vec::new();
    for (gen, coeff) in v.iter().enumerate() {
        if num_traits::Zero::is_zero(coeff) {
            continue;
        }
        if num_traits::One::is_one(coeff) {
            parts.push(np.gen_name(gen));
        } else {
            parts.push(format!("{}^{}", np.gen_name(gen), coeff));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

fn nq_value(np: &NilpotentPresentation) -> Result<Value, Error> {
    let mut generators = Vec::new();
    for g in 0..np.num_generators() {
        generators.push(json!({
            "name": np.gen_name(g),
            "weight": np.weight(g),
            "order": np.order(g).map(|m| m.to_string()),
            "definition": np.describe_definition(g),
        }));
    }
    let mut powers = Vec::new();
    for g in 0..np.num_generators() {
        if let (Some(m), Some(tail)) = (np.order(g), np.power_tail(g)) {
            powers.push(json!({
                "generator": np.gen_name(g),
                "exponent": m.to_string(),
                "value": exp_vec_value(np, tail),
            }));
        }
    }
    let mut conjugations = Vec::new();
    for i in 0..np.num_generators() {
        for j in i + 1..np.num_generators() {
            if let Some(tail) = np.conj_tail(i, j) {
                conjugations.push(json!({
                    "acting": np.gen_name(i),
                    "moved": np.gen_name(j),
                    "tail": exp_vec_value(np, tail),
                }));
            }
        }
    }
    let mut epimorphism = serde_json::Map::new();
    for (idx, name) in np.source().alphabet().names().iter().enumerate() {
        epimorphism.insert(name.clone(), exp_vec_value(np, np.epimorphism_image(idx)));
    }
    let factors: Vec<Value> = factor_structures(np)?
        .iter()
        .map(|f| {
            json!({
                "weight": f.weight,
                "free_rank": f.free_rank,
                "torsion": f.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "presentation": np.source().to_text(),
        "class": np.class(),
        "num_generators": np.num_generators(),
        "generators": generators,
        "power_relations": powers,
        "conjugation_relations": conjugations,
        "epimorphism": epimorphism,
        "factors": factors,
    }))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Nq {
            source,
            class,
            budget,
            json,
        } => {
            let presentation = source.load()?;
            let np = nilpotent_quotient(&presentation, class, &budget.build()?)?;
            if json {
                print_value(&nq_value(&np)?);
            } else {
                println!("class-{} quotient of {}", np.class(), presentation);
                println!("{} pc generators:", np.num_generators());
                for g in 0..np.num_generators() {
                    let order = match np.order(g) {
                        Some(m) => format!("order {m}"),
                        None => "infinite".to_string(),
                    };
                    println!(
                        "  {}  weight {}  {}  ({})",
                        np.gen_name(g),
                        np.weight(g),
                        order,
                        np.describe_definition(g)
                    );
                    if let Some(tail) = np.power_tail(g) {
                        let m = np.order(g).expect("torsion");
                        println!(
                            "      {}^{} = {}",
                            np.gen_name(g),
                            m,
                            exp_vec_text(&np, tail)
                        );
                    }
                }
                let mut printed = false;
                for i in 0..np.num_generators() {
                    for j in i + 1..np.num_generators() {
                        if let Some(tail) = np.conj_tail(i, j) {
                            if !printed {
                                println!("nontrivial conjugation relations:");
                                printed = true;
                            }
                            println!(
                                "  {}^{} = {}*{}",
                                np.gen_name(j),
                                np.gen_name(i),
                                np.gen_name(j),
                                exp_vec_text(&np, tail)
                            );
                        }
                    }
                }
                println!("epimorphism:");
                for (idx, name) in np.source().alphabet().names().iter().enumerate() {
                    println!(
                        "  {name} -> {}",
                        exp_vec_text(&np, np.epimorphism_image(idx))
                    );
                }
                println!("lower-central factors:");
                for f in factor_structures(&np)? {
                    println!("  weight {}: {}", f.weight, f);
                }
            }
            Ok(())
        }
        Command::Order {
            source,
            class,
            word,
            budget,
            json,
        } => {
            let presentation = source.load()?;
            let np = nilpotent_quotient(&presentation, class, &budget.build()?)?;
            let w = parse_word(&word, presentation.alphabet())?;
            let order = element_order(&np, &w)?;
            if json {
                print_value(&json!({
                    "word": w.to_string(),
                    "class": class,
                    "order": order.to_string(),
                    "finite": matches!(order, ElementOrder::Finite(_)),
                }));
            } else {
                println!("order of {w} in the class-{class} quotient: {order}");
            }
            Ok(())
        }
        Command::Lcs {
            source,
            class,
            budget,
            json,
        } => {
            let presentation = source.load()?;
            let np = nilpotent_quotient(&presentation, class, &budget.build()?)?;
            let factors = factor_structures(&np)?;
            if json {
                let list: Vec<Value> = factors
                    .iter()
                    .map(|f| {
                        json!({
                            "weight": f.weight,
                            "free_rank": f.free_rank,
                            "torsion": f.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                print_value(&json!({
                    "presentation": presentation.to_text(),
                    "class": class,
                    "factors": list,
                }));
            } else {
                println!("lower-central factors of {presentation} up to class {class}:");
                for f in factors {
                    println!("  weight {}: {}", f.weight, f);
                }
            }
            Ok(())
        }
        Command::Probe {
            source,
            word,
            classes,
            budget,
            json,
        } => {
            let presentation = source.load()?;
            let w = parse_word(&word, presentation.alphabet())?;
            let classes = classes
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Invalid(format!("bad class `{c}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let report = torsion_probe(&presentation, &w, &classes, &budget.build()?)?;
            if json {
                let entries: Vec<Value> = report
                    .entries
                    .iter()
                    .map(|e| match &e.outcome {
                        ProbeOutcome::Order(o) => json!({
                            "class": e.class,
                            "order": o.to_string(),
                            "power_of_two": matches!(o, ElementOrder::Finite(n) if is_power_of_two(n)),
                        }),
                        ProbeOutcome::Failed(msg) => json!({
                            "class": e.class,
                            "error": msg,
                        }),
                    })
                    .collect();
                print_value(&json!({
                    "word": report.word,
                    "entries": entries,
                    "all_finite": report.all_finite,
                    "power_of_two_everywhere": report.power_of_two_everywhere,
                    "nontrivial_classes": report.nontrivial_classes,
                }));
            } else {
                println!("torsion probe for {}:", report.word);
                for e in &report.entries {
                    match &e.outcome {
                        ProbeOutcome::Order(o) => println!("  class {}: order {o}", e.class),
                        ProbeOutcome::Failed(msg) => println!("  class {}: {msg}", e.class),
                    }
                }
                println!(
                    "verdict: power of two at every sampled class: {}",
                    report.power_of_two_everywhere
                );
            }
            Ok(())
        }
        Command::Verify {
            source,
            class,
            lhs,
            rhs,
            script,
            budget,
            json,
        } => {
            let presentation = source.load()?;
            let budget = budget.build()?;
            if script {
                let checks = fixtures::theorem7_identity_script()?;
                let max_class = checks.iter().map(|c| c.class).max().unwrap_or(1);
                let np = nilpotent_quotient(&presentation, max_class, &budget)?;
                let mut results = Vec::new();
                let mut all = true;
                for check in &checks {
                    let np_c = if check.class == np.class() {
                        np.clone()
                    } else {
                        np.truncate_to_class(check.class)?
                    };
                    let holds = verify_identity_in(&np_c, &check.lhs, &check.rhs)?;
                    all &= holds;
                    results.push((check.name.clone(), check.class, holds));
                }
                if json {
                    let list: Vec<Value> = results
                        .iter()
                        .map(|(name, class, holds)| {
                            json!({ "name": name, "class": class, "holds": holds })
                        })
                        .collect();
                    print_value(&json!({ "checks": list, "all_hold": all }));
                } else {
                    for (name, class, holds) in &results {
                        println!(
                            "{name} (class {class}): {}",
                            if *holds { "holds" } else { "FAILS" }
                        );
                    }
                    println!("all hold: {all}");
                }
                if !all {
                    return Err(Error::Invalid("identity script check failed".into()));
                }
                return Ok(());
            }
            let class = class.ok_or_else(|| Error::Invalid("--class is required".into()))?;
            let lhs = lhs.ok_or_else(|| Error::Invalid("--lhs is required".into()))?;
            let rhs = rhs.ok_or_else(|| Error::Invalid("--rhs is required".into()))?;
            let np = nilpotent_quotient(&presentation, class, &budget)?;
            let lhs = parse_word(&lhs, presentation.alphabet())?;
            let rhs = parse_word(&rhs, presentation.alphabet())?;
            let equal = verify_identity_in(&np, &lhs, &rhs)?;
            if json {
                print_value(&json!({
                    "class": class,
                    "lhs": lhs.to_string(),
                    "rhs": rhs.to_string(),
                    "equal": equal,
                }));
            } else {
                println!(
                    "{lhs} {} {rhs} in the class-{class} quotient",
                    if equal { "=" } else { "!=" }
                );
            }
            Ok(())
        }
        Command::Labute {
            gens,
            word,
            cap,
            json,
        } => {
            let alphabet = alphabet_from_list(&gens)?;
            let w = parse_word(&word, &alphabet)?;
            let report = labute_hypothesis(&w, cap)?;
            let lie = leading_lie(&w, cap)?;
            let coords: Vec<Value> = lie
                .coords
                .iter()
                .map(|(mono, coeff)| {
                    let name: Vec<&str> = mono.iter().map(|&g| alphabet.name(g)).collect();
                    json!({ "lyndon": name.join(" "), "coefficient": coeff.to_string() })
                })
                .collect();
            if json {
                print_value(&json!({
                    "word": w.to_string(),
                    "cap": cap,
                    "weight": report.weight,
                    "gcd": report.gcd.to_string(),
                    "primitive": report.primitive,
                    "leading_lie": coords,
                }));
            } else {
                println!("word: {w}");
                println!("weight: {}", report.weight);
                println!("leading Lie element (Lyndon basis):");
                for c in &coords {
                    println!(
                        "  {}  *  [{}]",
                        c["coefficient"].as_str().unwrap(),
                        c["lyndon"].as_str().unwrap()
                    );
                }
                println!("gcd of coordinates: {}", report.gcd);
                println!("primitive: {}", report.primitive);
            }
            Ok(())
        }
        Command::Basic {
            gens,
            max_weight,
            json,
        } => {
            let alphabet = Alphabet::new((1..=gens).map(|i| format!("x{i}")))?;
            let seq = basic_sequence(&alphabet, max_weight)?;
            let by_weight: Vec<usize> = (1..=max_weight)
                .map(|w| seq.weight_class(w).len())
                .collect();
            if json {
                let entries: Vec<Value> = seq
                    .entries()
                    .iter()
                    .map(|e| {
                        json!({
                            "index": e.seq_index,
                            "weight": e.weight,
                            "commutator": seq.notation(e.seq_index),
                            "expansion": seq.expand(e.seq_index).map(|w| w.to_string()).unwrap_or_default(),
                        })
                    })
                    .collect();
                print_value(&json!({
                    "generators": gens,
                    "max_weight": max_weight,
                    "count": seq.len(),
                    "count_by_weight": by_weight,
                    "entries": entries,
                }));
            } else {
                println!(
                    "{} basic commutators over {} generators up to weight {} ({:?} per weight):",
                    seq.len(),
                    gens,
                    max_weight,
                    by_weight
                );
                for e in seq.entries() {
                    println!(
                        "  b{}  weight {}  {}  ->  {}",
                        e.seq_index + 1,
                        e.weight,
                        seq.notation(e.seq_index),
                        seq.expand(e.seq_index)?
                    );
                }
            }
            Ok(())
        }
        Command::Witt { gens, n, json } => {
            let value = witt_number(gens, n)?;
            // cross-check against the Lyndon count in debug builds
            debug_assert_eq!(
                lyndon_words(gens, n).map(|l| l.len().to_string()).ok(),
                Some(value.to_string())
            );
            if json {
                print_value(&json!({ "gens": gens, "n": n, "rank": value.to_string() }));
            } else {
                println!("{value}");
            }
            Ok(())
        }
        Command::HydraNf { k, word, json } => {
            let w = parse_word(&word, &hydra::ambient_alphabet())?;
            let nf = hydra::hydra_normal_form(k, &w)?;
            if json {
                print_value(&json!({
                    "k": k,
                    "word": w.to_string(),
                    "h": nf.h.to_string(),
                    "t_exponent": nf.t_exp,
                    "trivial": nf.is_identity(),
                }));
            } else {
                println!("normal form of {w} in G({k}): ({}) * t^{}", nf.h, nf.t_exp);
                if nf.is_identity() {
                    println!("the word is trivial in G({k})");
                }
            }
            Ok(())
        }
        Command::HydraRewrite { k, l, json } => {
            let rewritten = hydra::rewrite_in_c(k, l)?;
            if json {
                print_value(&json!({ "k": k, "l": l, "word": rewritten.to_string() }));
            } else {
                println!("{rewritten}");
            }
            Ok(())
        }
        Command::HallWittCheck {
            count,
            max_len,
            seed,
            json,
        } => {
            use rand::rngs::StdRng;
            use rand::{Rng, SeedableRng};
            let alphabet = Alphabet::new(["a", "t"])?;
            let mut rng = StdRng::seed_from_u64(seed);
            let random_word = |rng: &mut StdRng| {
                let len = rng.gen_range(0..=max_len);
                let letters = (0..len).map(|_| {
                    Letter::new(rng.gen_range(0..2), if rng.gen_bool(0.5) { 1 } else { -1 })
                });
                Word::from_letters(&alphabet, letters).expect("valid")
            };
            let mut failures = 0usize;
            for _ in 0..count {
                let a = random_word(&mut rng);
                let b = random_word(&mut rng);
                let c = random_word(&mut rng);
                if !hall_witt_left_side(&a, &b, &c)?.is_identity() {
                    failures += 1;
                }
            }
            if json {
                print_value(&json!({
                    "triples": count,
                    "max_len": max_len,
                    "seed": seed,
                    "failures": failures,
                    "all_reduce_to_identity": failures == 0,
                }));
            } else {
                println!(
                    "{count} random triples (len <= {max_len}): {} failures",
                    failures
                );
            }
            if failures > 0 {
                return Err(Error::Internal(
                    "three-term identity failed to reduce".into(),
                ));
            }
            Ok(())
        }
        Command::Fixtures { emit, json } => {
            if let Some(name) = emit {
                let presentation = fixtures::by_name(&name)?;
                print!("{}", presentation.to_text());
                return Ok(());
            }
            let catalog = fixtures::catalog();
            if json {
                let list: Vec<Value> = catalog
                    .iter()
                    .map(|(name, desc)| json!({ "name": name, "description": desc }))
                    .collect();
                print_value(&json!({ "fixtures": list }));
            } else {
                for (name, desc) in catalog {
                    println!("{name:20} {desc}");
                }
            }
            Ok(())
        }
    }
}
