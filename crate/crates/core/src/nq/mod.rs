//! Nilpotent quotients of finitely presented groups.
//!
//! Given a presentation and a class bound `c`, [`nilpotent_quotient`]
//! produces a consistent weighted polycyclic presentation of the quotient
//! by the `(c+1)`-st lower central term, together with the epimorphism
//! from the source group. The construction is inductive: the class-1 layer
//! comes from integer row reduction of the relators' exponent sums, and
//! each further layer adds central generators as tails on the relations
//! that are not definitions, evaluates all consistency tests and all
//! relators, and reduces the resulting integer relation matrix on the new
//! central block by Hermite elimination, imposing torsion where pivots
//! exceed 1.

mod collect;

pub use collect::{ExpVec, PcLetter};

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{hermite_normal_form, IntMatrix};
pub use crate::matrix::{smith_normal_form, SmithForm};
use crate::words::{parse_word, Alphabet, Word};

use collect::{vec_is_zero, vec_zero, Pcp};

/// Resource limits for quotient computations. Exceeding any of them is an
/// explicit error, never a silent truncation.
#[derive(Debug, Clone)]
pub struct Budget {
    pub max_class: usize,
    pub max_pc_gens: usize,
    /// Bit-size bound for matrix entries during Hermite reduction.
    pub max_entry_bits: u64,
    /// Step bound for a single collection call.
    pub max_collect_ops: u64,
    /// Bound on |e| when conjugating by `a_g^e` letter by letter.
    pub max_conj_reps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_class: 16,
            max_pc_gens: 4096,
            max_entry_bits: 1 << 20,
            max_collect_ops: 200_000_000,
            max_conj_reps: 1 << 16,
        }
    }
}

/// A finite presentation: alphabet plus relators.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    alphabet: Arc<Alphabet>,
    relators: Vec<Word>,
}

impl Presentation {
    /// Relators must be nontrivial words over `alphabet`.
    pub fn new(alphabet: Arc<Alphabet>, relators: Vec<Word>) -> Result<Self> {
        for r in &relators {
            if r.is_identity() {
                return Err(Error::Invalid("trivial relator".into()));
            }
            let probe = Word::identity(&alphabet);
            probe.multiply(r)?;
        }
        Ok(Presentation { alphabet, relators })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Renders in the presentation file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("gens: {}\n", self.alphabet.names().join(", "));
        for r in &self.relators {
            out.push_str(&format!("rel: {r}\n"));
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} | ", self.alphabet.names().join(", "))?;
        let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        write!(f, "{} >", rels.join(", "))
    }
}

/// Parses the presentation file format: a `gens: a, t` line followed by
/// `rel: <word>` lines. `#` starts a comment; blank lines are ignored.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut alphabet: Option<Arc<Alphabet>> = None;
    let mut relators = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("gens:") {
            if alphabet.is_some() {
                return Err(Error::Parse {
                    pos: line_start,
                    msg: "duplicate gens line".into(),
                });
            }
            let names: Vec<String> = rest
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            alphabet = Some(Alphabet::new(names)?);
        } else if let Some(rest) = content.strip_prefix("rel:") {
            let alphabet = alphabet.as_ref().ok_or(Error::Parse {
                pos: line_start,
                msg: "rel line before gens line".into(),
            })?;
            let word = parse_word(rest.trim(), alphabet).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse {
                    pos: line_start + pos,
                    msg,
                },
                Error::UnknownGenerator { name, pos } => Error::UnknownGenerator {
                    name,
                    pos: line_start + pos,
                },
                other => other,
            })?;
            if word.is_identity() {
                return Err(Error::Parse {
                    pos: line_start,
                    msg: "trivial relator".into(),
                });
            }
            relators.push(word);
        } else {
            return Err(Error::Parse {
                pos: line_start,
                msg: format!("expected `gens:` or `rel:`, found `{content}`"),
            });
        }
    }
    let alphabet = alphabet.ok_or(Error::Parse {
        pos: 0,
        msg: "missing gens line".into(),
    })?;
    Presentation::new(alphabet, relators)
}

/// How a pc generator came into being. Definitions make the epimorphism
/// and all relator evaluations reproducible: a defined relation keeps its
/// generator as the exact tail at every later class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definition {
    /// The exact image of a source generator.
    Image { source: usize },
    /// Born as the tail on the image of a source generator.
    ImageTail { source: usize },
    /// Born as the tail of the conjugation relation for `[a_left, a_right]`
    /// with `right < left`.
    Commutator { left: usize, right: usize },
    /// Born as the tail of the power relation of `gen`.
    PowerTail { gen: usize },
}

/// A consistent weighted polycyclic presentation of `G/gamma_{c+1}(G)`.
#[derive(Debug, Clone)]
pub struct NilpotentPresentation {
    source: Presentation,
    pcp: Pcp,
    definitions: Vec<Definition>,
    epimorphism: Vec<ExpVec>,
}

impl NilpotentPresentation {
    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn class(&self) -> usize {
        self.pcp.class
    }

    pub fn num_generators(&self) -> usize {
        self.pcp.num_gens()
    }

    pub fn weight(&self, gen: usize) -> usize {
        self.pcp.weights[gen]
    }

    pub fn weights(&self) -> &[usize] {
        &self.pcp.weights
    }

    /// Relative order of a generator, when finite.
    pub fn order(&self, gen: usize) -> Option<&BigInt> {
        self.pcp.orders[gen].as_ref()
    }

    /// Normal form of `a_gen^{order}`, for finite-order generators.
    pub fn power_tail(&self, gen: usize) -> Option<&ExpVec> {
        self.pcp.power_tails[gen].as_ref()
    }

    /// Tail of `a_j^{a_i} = a_j * tail`; `None` means the trivial tail.
    pub fn conj_tail(&self, i: usize, j: usize) -> Option<&ExpVec> {
        self.pcp.conj.get(&(i, j))
    }

    /// Tail of `a_j^{a_i^-1} = a_j * tail`; `None` means the trivial tail.
    pub fn inv_conj_tail(&self, i: usize, j: usize) -> Option<&ExpVec> {
        self.pcp.invconj.get(&(i, j))
    }

    pub fn definition(&self, gen: usize) -> Definition {
        self.definitions[gen]
    }

    /// Image of a source generator under the epimorphism.
    pub fn epimorphism_image(&self, source: usize) -> &ExpVec {
        &self.epimorphism[source]
    }

    /// Display name of a pc generator.
    pub fn gen_name(&self, gen: usize) -> String {
        format!("g{}", gen + 1)
    }

    pub fn describe_definition(&self, gen: usize) -> String {
        match self.definitions[gen] {
            Definition::Image { source } => {
                format!("image of {}", self.source.alphabet().name(source))
            }
            Definition::ImageTail { source } => {
                format!("tail on image of {}", self.source.alphabet().name(source))
            }
            Definition::Commutator { left, right } => {
                format!("[{},{}]", self.gen_name(left), self.gen_name(right))
            }
            Definition::PowerTail { gen } => format!("tail on {}^m", self.gen_name(gen)),
        }
    }

    pub fn identity_vec(&self) -> ExpVec {
        self.pcp.identity()
    }

    pub fn is_identity_vec(&self, v: &[BigInt]) -> bool {
        vec_is_zero(v)
    }

    pub fn multiply(&self, u: &[BigInt], v: &[BigInt]) -> Result<ExpVec> {
        self.pcp.mul(u, v, &mut self.pcp.ctx())
    }

    pub fn inverse(&self, u: &[BigInt]) -> Result<ExpVec> {
        self.pcp.inverse(u, &mut self.pcp.ctx())
    }

    pub fn power(&self, u: &[BigInt], n: &BigInt) -> Result<ExpVec> {
        self.pcp.pow(u, n, &mut self.pcp.ctx())
    }

    pub fn conjugate_elem(&self, u: &[BigInt], v: &[BigInt]) -> Result<ExpVec> {
        self.pcp.conjugate(u, v, &mut self.pcp.ctx())
    }

    pub fn commutator_elem(&self, u: &[BigInt], v: &[BigInt]) -> Result<ExpVec> {
        self.pcp.commutator(u, v, &mut self.pcp.ctx())
    }

    /// Normal form of a product of pc letters.
    pub fn collect(&self, letters: &[PcLetter]) -> Result<ExpVec> {
        self.pcp.collect(letters, &mut self.pcp.ctx())
    }

    /// Image of a source word under the epimorphism, as a normal form.
    pub fn image(&self, word: &Word) -> Result<ExpVec> {
        let probe = Word::identity(self.source.alphabet());
        probe.multiply(word)?;
        image_raw(&self.pcp, &self.epimorphism, word)
    }

    /// Generator index range of one weight.
    pub fn section_range(&self, weight: usize) -> std::ops::Range<usize> {
        let start = self.pcp.weights.partition_point(|&w| w < weight);
        let end = self.pcp.weights.partition_point(|&w| w <= weight);
        start..end
    }

    /// Relation rows of the abelian section of one weight: for each
    /// finite-order generator in the section, `m_i * e_i` plus the
    /// in-section part of its power tail.
    pub fn section_relation_rows(&self, weight: usize) -> Vec<Vec<BigInt>> {
        let range = self.section_range(weight);
        let mut rows = Vec::new();
        for i in range.clone() {
            let Some(m) = &self.pcp.orders[i] else {
                continue;
            };
            let mut row = vec![BigInt::zero(); range.len()];
            row[i - range.start] = m.clone();
            if let Some(tail) = &self.pcp.power_tails[i] {
                for j in range.clone() {
                    if !tail[j].is_zero() {
                        row[j - range.start] += &tail[j];
                    }
                }
            }
            rows.push(row);
        }
        rows
    }

    /// Runs every consistency test, relator check, and structural
    /// invariant. Any failure is an internal error.
    pub fn check_consistency(&self) -> Result<()> {
        check_structure(&self.pcp)?;
        for (desc, lhs, rhs) in self.pcp.consistency_pairs(self.pcp.class + 1)? {
            if lhs != rhs {
                return Err(Error::Internal(format!("consistency test failed: {desc}")));
            }
        }
        for relator in self.source.relators() {
            let v = self.image(relator)?;
            if !vec_is_zero(&v) {
                return Err(Error::Internal(format!(
                    "relator {relator} has nonzero image"
                )));
            }
        }
        Ok(())
    }

    /// The class-`c` quotient of this presentation, obtained by forgetting
    /// all generators of weight above `c`.
    pub fn truncate_to_class(&self, class: usize) -> Result<NilpotentPresentation> {
        if class == 0 || class > self.class() {
            return Err(Error::Invalid(format!(
                "truncation class {class} out of range 1..={}",
                self.class()
            )));
        }
        let keep = self.pcp.weights.partition_point(|&w| w <= class);
        let truncate = |v: &ExpVec| v[..keep].to_vec();
        let mut pcp = Pcp {
            class,
            weights: self.pcp.weights[..keep].to_vec(),
            orders: self.pcp.orders[..keep].to_vec(),
            power_tails: self.pcp.power_tails[..keep]
                .iter()
                .map(|t| t.as_ref().map(truncate))
                .collect(),
            conj: self
                .pcp
                .conj
                .iter()
                .filter(|((_, j), _)| *j < keep)
                .map(|(&k, v)| (k, truncate(v)))
                .filter(|(_, v)| !vec_is_zero(v))
                .collect(),
            invconj: BTreeMap::new(),
            budget: self.pcp.budget.clone(),
        };
        pcp.rebuild_invconj()?;
        let np = NilpotentPresentation {
            source: self.source.clone(),
            pcp,
            definitions: self.definitions[..keep].to_vec(),
            epimorphism: self.epimorphism.iter().map(truncate).collect(),
        };
        np.check_consistency()?;
        Ok(np)
    }
}

fn image_raw(pcp: &Pcp, epimorphism: &[ExpVec], word: &Word) -> Result<ExpVec> {
    let mut ctx = pcp.ctx();
    let mut inverses: Vec<Option<ExpVec>> = vec![None; epimorphism.len()];
    let mut acc = pcp.identity();
    for letter in word.letters() {
        if letter.gen >= epimorphism.len() {
            return Err(Error::Invalid("letter outside the source alphabet".into()));
        }
        if letter.sign > 0 {
            acc = pcp.mul(&acc, &epimorphism[letter.gen], &mut ctx)?;
        } else {
            if inverses[letter.gen].is_none() {
                inverses[letter.gen] = Some(pcp.inverse(&epimorphism[letter.gen], &mut ctx)?);
            }
            acc = pcp.mul(&acc, inverses[letter.gen].as_ref().unwrap(), &mut ctx)?;
        }
    }
    Ok(acc)
}

/// Structural invariants of a weighted pc presentation.
fn check_structure(pcp: &Pcp) -> Result<()> {
    let n = pcp.num_gens();
    for pair in pcp.weights.windows(2) {
        if pair[0] > pair[1] {
            return Err(Error::Internal("weights not nondecreasing".into()));
        }
    }
    for i in 0..n {
        match (&pcp.orders[i], &pcp.power_tails[i]) {
            (Some(m), Some(tail)) => {
                if *m < BigInt::from(2) {
                    return Err(Error::Internal(format!("order of a_{i} below 2")));
                }
                if let Some(j) = tail[..=i].iter().position(|c| !c.is_zero()) {
                    return Err(Error::Internal(format!(
                        "power tail of a_{i} touches a_{j}"
                    )));
                }
            }
            (None, None) => {}
            _ => return Err(Error::Internal(format!("order/tail mismatch at a_{i}"))),
        }
    }
    for ((i, j), tail) in &pcp.conj {
        if i >= j || *j >= n {
            return Err(Error::Internal("bad conjugation key".into()));
        }
        let min_weight = pcp.weights[*i] + pcp.weights[*j];
        for (h, c) in tail.iter().enumerate() {
            if !c.is_zero() && (h <= *j || pcp.weights[h] < min_weight) {
                return Err(Error::Internal(format!(
                    "conjugation tail ({i},{j}) touches a_{h} of weight {}",
                    pcp.weights[h]
                )));
            }
        }
    }
    Ok(())
}

/// Computes the consistent weighted pc presentation of the quotient of the
/// presented group by the `(class+1)`-st lower central term.
pub fn nilpotent_quotient(
    presentation: &Presentation,
    class: usize,
    budget: &Budget,
) -> Result<NilpotentPresentation> {
    if class == 0 {
        return Err(Error::Invalid("class must be at least 1".into()));
    }
    if class > budget.max_class {
        return Err(Error::Budget(format!(
            "class {class} exceeds the budget of {}",
            budget.max_class
        )));
    }
    let mut engine = Engine::initial(presentation, budget.clone())?;
    for target in 2..=class {
        engine.extend(target)?;
    }
    let np = NilpotentPresentation {
        source: presentation.clone(),
        pcp: engine.pcp,
        definitions: engine.definitions,
        epimorphism: engine.epimorphism,
    };
    np.check_consistency()?;
    Ok(np)
}

/// What became of one column of the new central block after reduction.
#[derive(Debug, Clone)]
enum ColOutcome {
    Free,
    Torsion { order: BigInt, tail: ExpVec },
    Eliminated { expr: ExpVec },
}

/// Why a new generator was introduced.
#[derive(Debug, Clone, Copy)]
enum Origin {
    PowerTail(usize),
    Conj(usize, usize),
    ImageTail(usize),
}

struct Engine {
    pcp: Pcp,
    definitions: Vec<Definition>,
    epimorphism: Vec<ExpVec>,
    relators: Vec<Word>,
    budget: Budget,
}

impl Engine {
    /// Class-1 layer: one weight-1 generator per source generator, then
    /// the abelianized relators are imposed by Hermite reduction.
    fn initial(presentation: &Presentation, budget: Budget) -> Result<Engine> {
        let rank = presentation.alphabet().len();
        if rank > budget.max_pc_gens {
            return Err(Error::Budget(format!(
                "{rank} generators exceed the budget of {}",
                budget.max_pc_gens
            )));
        }
        let pcp = Pcp::free_abelian(rank, budget.clone());
        let mut engine = Engine {
            pcp,
            definitions: (0..rank)
                .map(|source| Definition::Image { source })
                .collect(),
            epimorphism: (0..rank)
                .map(|i| {
                    let mut v = vec_zero(rank);
                    v[i] = BigInt::one();
                    v
                })
                .collect(),
            relators: presentation.relators().to_vec(),
            budget,
        };
        let rows: Vec<ExpVec> = engine
            .relators
            .iter()
            .map(|r| image_raw(&engine.pcp, &engine.epimorphism, r))
            .collect::<Result<_>>()?;
        let origins = Vec::new();
        engine.reduce_block(0, rows, &origins)?;
        engine.pcp.rebuild_invconj()?;
        engine.verify_round()?;
        Ok(engine)
    }

    /// One inductive step: extend a consistent class-(target-1)
    /// presentation to class `target`.
    fn extend(&mut self, target: usize) -> Result<()> {
        let n0 = self.pcp.num_gens();
        let power_defs: HashSet<usize> = self
            .definitions
            .iter()
            .filter_map(|d| match d {
                Definition::PowerTail { gen } => Some(*gen),
                _ => None,
            })
            .collect();
        let comm_defs: HashSet<(usize, usize)> = self
            .definitions
            .iter()
            .filter_map(|d| match d {
                Definition::Commutator { left, right } => Some((*right, *left)),
                _ => None,
            })
            .collect();
        let image_defs: HashSet<usize> = self
            .definitions
            .iter()
            .filter_map(|d| match d {
                Definition::Image { source } | Definition::ImageTail { source } => Some(*source),
                _ => None,
            })
            .collect();

        let mut origins = Vec::new();
        for i in 0..n0 {
            if self.pcp.orders[i].is_some() && !power_defs.contains(&i) {
                origins.push(Origin::PowerTail(i));
            }
        }
        for i in 0..n0 {
            for j in i + 1..n0 {
                if self.pcp.weights[i] + self.pcp.weights[j] > target {
                    continue;
                }
                if !comm_defs.contains(&(i, j)) {
                    origins.push(Origin::Conj(i, j));
                }
            }
        }
        for source in 0..self.epimorphism.len() {
            if !image_defs.contains(&source) {
                origins.push(Origin::ImageTail(source));
            }
        }

        let added = origins.len();
        let n1 = n0 + added;
        if n1 > self.budget.max_pc_gens {
            return Err(Error::Budget(format!(
                "{n1} pc generators exceed the budget of {}",
                self.budget.max_pc_gens
            )));
        }

        // Grow every stored vector, then attach the tails.
        for tail in self.pcp.power_tails.iter_mut().flatten() {
            tail.resize(n1, BigInt::zero());
        }
        for tail in self.pcp.conj.values_mut() {
            tail.resize(n1, BigInt::zero());
        }
        for image in self.epimorphism.iter_mut() {
            image.resize(n1, BigInt::zero());
        }
        self.pcp.weights.extend(std::iter::repeat_n(target, added));
        self.pcp.orders.extend(std::iter::repeat_n(None, added));
        self.pcp
            .power_tails
            .extend(std::iter::repeat_n(None, added));
        for (offset, origin) in origins.iter().enumerate() {
            let col = n0 + offset;
            match origin {
                Origin::PowerTail(i) => {
                    let tail = self.pcp.power_tails[*i]
                        .as_mut()
                        .ok_or_else(|| Error::Internal("missing power tail".into()))?;
                    tail[col] = BigInt::one();
                }
                Origin::Conj(i, j) => {
                    let tail = self
                        .pcp
                        .conj
                        .entry((*i, *j))
                        .or_insert_with(|| vec_zero(n1));
                    tail.resize(n1, BigInt::zero());
                    tail[col] = BigInt::one();
                }
                Origin::ImageTail(source) => {
                    self.epimorphism[*source][col] = BigInt::one();
                }
            }
        }
        self.pcp.class = target;
        self.pcp.rebuild_invconj()?;

        // Relation rows on the new central block: consistency failures and
        // relator images.
        let mut rows: Vec<ExpVec> = Vec::new();
        for (desc, lhs, rhs) in self.pcp.consistency_pairs(target)? {
            if lhs[..n0] != rhs[..n0] {
                return Err(Error::Internal(format!(
                    "consistency discrepancy outside the central block: {desc}"
                )));
            }
            if lhs != rhs {
                let mut row = vec_zero(n1);
                for k in n0..n1 {
                    row[k] = &lhs[k] - &rhs[k];
                }
                rows.push(row);
            }
        }
        for relator in &self.relators.clone() {
            let v = image_raw(&self.pcp, &self.epimorphism, relator)?;
            if !vec_is_zero(&v[..n0]) {
                return Err(Error::Internal(format!(
                    "relator {relator} image leaks outside the central block"
                )));
            }
            if !vec_is_zero(&v) {
                rows.push(v);
            }
        }

        self.reduce_block(n0, rows, &origins)?;
        self.pcp.rebuild_invconj()?;
        self.verify_round()?;
        Ok(())
    }

    /// Imposes `rows` (supported on columns `start..`) on the generators of
    /// the block, eliminating unit pivots and recording torsion, then
    /// compacts the presentation and assigns definitions for the surviving
    /// block generators.
    fn reduce_block(&mut self, start: usize, rows: Vec<ExpVec>, origins: &[Origin]) -> Result<()> {
        let n = self.pcp.num_gens();
        let block = n - start;
        let block_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| r[start..].to_vec()).collect();
        let matrix = IntMatrix::from_rows(block_rows)?;
        let hermite = hermite_normal_form(&matrix, Some(self.budget.max_entry_bits))?;

        let mut outcomes: Vec<ColOutcome> = vec![ColOutcome::Free; block];
        for &(col, row) in &hermite.pivots {
            let pivot = hermite.matrix[(row, col)].clone();
            let mut rest = vec_zero(n);
            for k in col + 1..block {
                let entry = &hermite.matrix[(row, k)];
                if !entry.is_zero() {
                    rest[start + k] = -entry;
                }
            }
            outcomes[col] = if pivot.is_one() {
                ColOutcome::Eliminated { expr: rest }
            } else {
                ColOutcome::Torsion {
                    order: pivot,
                    tail: rest,
                }
            };
        }

        let normalize = |v: &mut ExpVec| {
            for p in start..n {
                match &outcomes[p - start] {
                    ColOutcome::Free => {}
                    ColOutcome::Eliminated { expr } => {
                        if !v[p].is_zero() {
                            let c = std::mem::take(&mut v[p]);
                            for k in p + 1..n {
                                if !expr[k].is_zero() {
                                    let add = &c * &expr[k];
                                    v[k] += add;
                                }
                            }
                        }
                    }
                    ColOutcome::Torsion { order, tail } => {
                        let (q, r) = v[p].div_mod_floor(order);
                        if !q.is_zero() {
                            v[p] = r;
                            for k in p + 1..n {
                                if !tail[k].is_zero() {
                                    let add = &q * &tail[k];
                                    v[k] += add;
                                }
                            }
                        }
                    }
                }
            }
        };

        for tail in self.pcp.power_tails.iter_mut().flatten() {
            normalize(tail);
        }
        for tail in self.pcp.conj.values_mut() {
            normalize(tail);
        }
        for image in self.epimorphism.iter_mut() {
            normalize(image);
        }

        // Record torsion on the surviving block generators.
        for (offset, outcome) in outcomes.iter().enumerate() {
            if let ColOutcome::Torsion { order, tail } = outcome {
                let gen = start + offset;
                let mut tail = tail.clone();
                normalize(&mut tail);
                self.pcp.orders[gen] = Some(order.clone());
                self.pcp.power_tails[gen] = Some(tail);
            }
        }

        // Compact: drop eliminated generators.
        let mut remap: Vec<Option<usize>> = Vec::with_capacity(n);
        let mut next = 0;
        for gen in 0..n {
            let eliminated =
                gen >= start && matches!(outcomes[gen - start], ColOutcome::Eliminated { .. });
            if eliminated {
                remap.push(None);
            } else {
                remap.push(Some(next));
                next += 1;
            }
        }

        let compact_vec = |v: &ExpVec| -> Result<ExpVec> {
            let mut out = vec_zero(next);
            for (gen, value) in v.iter().enumerate() {
                if value.is_zero() {
                    continue;
                }
                match remap[gen] {
                    Some(idx) => out[idx] = value.clone(),
                    None => {
                        return Err(Error::Internal(
                            "eliminated generator survived normalization".into(),
                        ))
                    }
                }
            }
            Ok(out)
        };

        let mut weights = Vec::with_capacity(next);
        let mut orders = Vec::with_capacity(next);
        let mut power_tails = Vec::with_capacity(next);
        for (gen, kept) in remap.iter().enumerate() {
            if kept.is_none() {
                continue;
            }
            weights.push(self.pcp.weights[gen]);
            orders.push(self.pcp.orders[gen].clone());
            power_tails.push(match &self.pcp.power_tails[gen] {
                Some(tail) => Some(compact_vec(tail)?),
                None => None,
            });
        }
        let mut conj = BTreeMap::new();
        for ((i, j), tail) in &self.pcp.conj {
            let (Some(ni), Some(nj)) = (remap[*i], remap[*j]) else {
                return Err(Error::Internal(
                    "conjugation relation on dropped generator".into(),
                ));
            };
            let tail = compact_vec(tail)?;
            if !vec_is_zero(&tail) {
                conj.insert((ni, nj), tail);
            }
        }
        self.pcp.weights = weights;
        self.pcp.orders = orders;
        self.pcp.power_tails = power_tails;
        self.pcp.conj = conj;
        self.pcp.invconj.clear();
        self.epimorphism = self
            .epimorphism
            .iter()
            .map(compact_vec)
            .collect::<Result<Vec<_>>>()?;

        // Definitions: keep the old ones (their generator indices are below
        // `start` and unchanged) and add one per surviving block origin.
        if start == 0 {
            // class-1 reduction: definitions are images of source generators
            self.definitions = (0..self.epimorphism.len())
                .filter(|&source| remap[source].is_some())
                .map(|source| Definition::Image { source })
                .collect();
        } else {
            self.definitions.truncate(start);
            for (offset, origin) in origins.iter().enumerate() {
                if remap[start + offset].is_none() {
                    continue;
                }
                self.definitions.push(match origin {
                    Origin::PowerTail(gen) => Definition::PowerTail { gen: *gen },
                    Origin::Conj(i, j) => Definition::Commutator {
                        left: *j,
                        right: *i,
                    },
                    Origin::ImageTail(source) => Definition::ImageTail { source: *source },
                });
            }
        }
        if self.definitions.len() != self.pcp.num_gens() {
            return Err(Error::Internal("definition count mismatch".into()));
        }
        Ok(())
    }

    /// End-of-round checks: the presentation must be consistent and every
    /// relator must map to the identity.
    fn verify_round(&self) -> Result<()> {
        check_structure(&self.pcp)?;
        for (desc, lhs, rhs) in self.pcp.consistency_pairs(self.pcp.class + 1)? {
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "consistency test failed after reduction: {desc}"
                )));
            }
        }
        for relator in &self.relators {
            let v = image_raw(&self.pcp, &self.epimorphism, relator)?;
            if !vec_is_zero(&v) {
                return Err(Error::Internal(format!(
                    "relator {relator} survives its own imposition"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn pres(text: &str) -> Presentation {
        parse_presentation(text).unwrap()
    }

    fn free2() -> Presentation {
        pres("gens: a, t\n")
    }

    fn nq(p: &Presentation, class: usize) -> NilpotentPresentation {
        nilpotent_quotient(p, class, &Budget::default()).unwrap()
    }

    fn section_rank(np: &NilpotentPresentation, weight: usize) -> usize {
        np.section_range(weight).len()
    }

    fn section_is_free(np: &NilpotentPresentation, weight: usize) -> bool {
        np.section_range(weight).all(|g| np.order(g).is_none())
    }

    #[test]
    fn free_rank2_layers_match_witt() {
        let expected = [2usize, 1, 2, 3, 6, 9];
        let np = nq(&free2(), 6);
        for (i, want) in expected.iter().enumerate() {
            let weight = i + 1;
            assert_eq!(section_rank(&np, weight), *want, "weight {weight}");
            assert!(section_is_free(&np, weight), "weight {weight}");
        }
        assert_eq!(np.num_generators(), expected.iter().sum::<usize>());
    }

    #[test]
    fn rank_one_free_group_stays_abelian() {
        let np = nq(&pres("gens: x\n"), 3);
        assert_eq!(np.num_generators(), 1);
        assert_eq!(np.order(0), None);
        assert_eq!(np.section_range(2).len(), 0);
        assert_eq!(np.section_range(3).len(), 0);
    }

    #[test]
    fn cyclic_of_order_two() {
        let np = nq(&pres("gens: x\nrel: x^2\n"), 3);
        assert_eq!(np.num_generators(), 1);
        assert_eq!(np.order(0), Some(&BigInt::from(2)));
        // gamma_2 onward is trivial
        assert_eq!(np.section_range(2).len(), 0);
        assert_eq!(np.section_range(3).len(), 0);
    }

    #[test]
    fn tietze_eliminated_generator() {
        // < x, y | x = y^2 > is infinite cyclic; the image of x needs an
        // epimorphism tail at every class until it re-anchors.
        let np = nq(&pres("gens: x, y\nrel: x * y^-2\n"), 3);
        assert_eq!(np.num_generators(), 1);
        assert_eq!(np.order(0), None);
        let x_image = np.epimorphism_image(0);
        assert_eq!(x_image, &vec![BigInt::from(2)]);
        let word = parse_word("x*y^-2", np.source().alphabet()).unwrap();
        assert!(np.is_identity_vec(&np.image(&word).unwrap()));
    }

    #[test]
    fn mixed_torsion_lattice() {
        // < x, y | x^2 y^3 > abelianizes to Z; the pc presentation keeps
        // two weight-1 generators with a relating power tail.
        let np = nq(&pres("gens: x, y\nrel: x^2 y^3\n"), 2);
        let rows = np.section_relation_rows(1);
        assert_eq!(rows.len(), 1);
        let snf = smith_normal_form(&IntMatrix::from_rows(rows).unwrap());
        assert_eq!(snf.torsion_factors(), Vec::<BigUint>::new());
        assert_eq!(snf.rank(), 1);
    }

    #[test]
    fn hydra_two_class_three() {
        // G(2) = < a, t | [a,t,t] >: weight-3 layer has rank 1 because the
        // relator kills one of the two weight-3 basis elements.
        let np = nq(&pres("gens: a, t\nrel: [a,t,t]\n"), 3);
        assert_eq!(section_rank(&np, 1), 2);
        assert_eq!(section_rank(&np, 2), 1);
        assert_eq!(section_rank(&np, 3), 1);
        assert!(section_is_free(&np, 3));
        let relator = parse_word("[a,t,t]", np.source().alphabet()).unwrap();
        assert!(np.is_identity_vec(&np.image(&relator).unwrap()));
        // [a,t,a] generates the surviving piece
        let survivor = parse_word("[a,t,a]", np.source().alphabet()).unwrap();
        let v = np.image(&survivor).unwrap();
        assert!(!np.is_identity_vec(&v));
        assert!(np.section_range(3).any(|g| !v[g].is_zero()));
    }

    #[test]
    fn collect_examples() {
        let np = nq(&free2(), 2);
        let one = BigInt::one();
        let v = np.collect(&[(0, one.clone())]).unwrap();
        assert_eq!(v, vec![BigInt::one(), BigInt::zero(), BigInt::zero()]);
        let v = np.collect(&[(0, one.clone()), (0, -one.clone())]).unwrap();
        assert!(np.is_identity_vec(&v));
        // image of [a,t] hits exactly the weight-2 generator
        let w = parse_word("[a,t]", np.source().alphabet()).unwrap();
        let v = np.image(&w).unwrap();
        assert_eq!(v[..2], vec![BigInt::zero(), BigInt::zero()][..]);
        assert_eq!(v[2].magnitude().to_string(), "1");
        // empty word
        assert!(np.is_identity_vec(&np.image(&Word::identity(np.source().alphabet())).unwrap()));
    }

    #[test]
    fn truncation_matches_direct_computation() {
        let p = pres("gens: a, t\nrel: [a,t,t]\n");
        let big = nq(&p, 5);
        for class in 1..=4 {
            let truncated = big.truncate_to_class(class).unwrap();
            let direct = nq(&p, class);
            assert_eq!(truncated.weights(), direct.weights(), "class {class}");
            for g in 0..direct.num_generators() {
                assert_eq!(truncated.order(g), direct.order(g), "class {class} gen {g}");
            }
        }
    }

    #[test]
    fn parse_presentation_errors() {
        assert!(matches!(parse_presentation(""), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_presentation("rel: a\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_presentation("gens: a\nrel: a*a^-1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_presentation("gens: a\nnonsense\n"),
            Err(Error::Parse { .. })
        ));
        let p = parse_presentation("# comment\ngens: a, t # inline\n\nrel: [a,t,t]\n").unwrap();
        assert_eq!(p.alphabet().names(), &["a".to_string(), "t".to_string()]);
        assert_eq!(p.relators().len(), 1);
    }

    #[test]
    fn budget_errors() {
        let tight = Budget {
            max_class: 2,
            ..Budget::default()
        };
        assert!(matches!(
            nilpotent_quotient(&free2(), 3, &tight),
            Err(Error::Budget(_))
        ));
        let tight = Budget {
            max_pc_gens: 2,
            ..Budget::default()
        };
        assert!(matches!(
            nilpotent_quotient(&free2(), 3, &tight),
            Err(Error::Budget(_))
        ));
    }

    fn arb_source_word(max_len: usize) -> impl Strategy<Value = Word> {
        proptest::collection::vec((0usize..2, prop_oneof![Just(1i8), Just(-1i8)]), 0..=max_len)
            .prop_map(|pairs| {
                let p = free2();
                Word::from_letters(
                    p.alphabet(),
                    pairs
                        .into_iter()
                        .map(|(g, s)| crate::words::Letter::new(g, s)),
                )
                .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn image_is_a_homomorphism(u in arb_source_word(8), v in arb_source_word(8)) {
            let p = pres("gens: a, t\nrel: [a,t,t]\n");
            let np = nq(&p, 4);
            let uv = u.multiply(&v).unwrap();
            let lhs = np.image(&uv).unwrap();
            let rhs = np.multiply(&np.image(&u).unwrap(), &np.image(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn image_is_conjugation_covariant(w in arb_source_word(6), g in arb_source_word(6)) {
            let p = pres("gens: a, t\nrel: [a,t,t]\n");
            let np = nq(&p, 4);
            let conj = w.conjugate(&g).unwrap();
            let lhs = np.image(&conj).unwrap();
            let rhs = np
                .conjugate_elem(&np.image(&w).unwrap(), &np.image(&g).unwrap())
                .unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
