//! Weighted polycyclic presentations and collection from the left.
//!
//! A presentation holds generators `a_1 < ... < a_n` with nondecreasing
//! weights, optional power relations `a_i^{m_i} = tail` (tail on later
//! generators), and conjugation relations `a_j^{a_i} = a_j * tail` for
//! `i < j` (tail on generators of weight at least `w_i + w_j`). Normal
//! forms are exponent vectors with the exponent of each finite-order
//! generator in `[0, m_i)`. Collection moves the least uncollected letter
//! into place first; commutator corrections strictly increase weight and
//! power corrections strictly increase the generator index, so the process
//! terminates.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::nq::Budget;

/// Normal form: one exact exponent per generator.
pub type ExpVec = Vec<BigInt>;

/// A letter for collection: generator index and exponent.
pub type PcLetter = (usize, BigInt);

pub(crate) fn vec_zero(n: usize) -> ExpVec {
    vec![BigInt::zero(); n]
}

pub(crate) fn vec_is_zero(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Mutable working state for one top-level collection call.
pub(crate) struct Ctx {
    ops: u64,
    max_ops: u64,
}

impl Ctx {
    fn step(&mut self) -> Result<()> {
        self.ops += 1;
        if self.ops > self.max_ops {
            Err(Error::Budget(format!(
                "collection exceeded {} steps",
                self.max_ops
            )))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Pcp {
    pub class: usize,
    pub weights: Vec<usize>,
    /// Relative order `m_i >= 2` for torsion generators, `None` for
    /// infinite relative order.
    pub orders: Vec<Option<BigInt>>,
    /// Normal form of `a_i^{m_i}`, supported on generators after `i`.
    /// Present exactly when `orders[i]` is.
    pub power_tails: Vec<Option<ExpVec>>,
    /// `(i, j) -> tail` with `i < j`: `a_j^{a_i} = a_j * tail`. Absent
    /// entries are trivial.
    pub conj: BTreeMap<(usize, usize), ExpVec>,
    /// Derived table: `a_j^{a_i^-1} = a_j * tail`.
    pub invconj: BTreeMap<(usize, usize), ExpVec>,
    pub budget: Budget,
}

impl Pcp {
    pub fn free_abelian(rank: usize, budget: Budget) -> Self {
        Pcp {
            class: 1,
            weights: vec![1; rank],
            orders: vec![None; rank],
            power_tails: vec![None; rank],
            conj: BTreeMap::new(),
            invconj: BTreeMap::new(),
            budget,
        }
    }

    pub fn num_gens(&self) -> usize {
        self.weights.len()
    }

    pub(crate) fn ctx(&self) -> Ctx {
        Ctx {
            ops: 0,
            max_ops: self.budget.max_collect_ops,
        }
    }

    pub fn identity(&self) -> ExpVec {
        vec_zero(self.num_gens())
    }

    pub fn gen_vec(&self, g: usize) -> ExpVec {
        let mut v = self.identity();
        v[g] = BigInt::one();
        v
    }

    /// Normal form of the product `u * v`.
    pub fn mul(&self, u: &[BigInt], v: &[BigInt], ctx: &mut Ctx) -> Result<ExpVec> {
        let mut acc = u.to_vec();
        for (g, e) in v.iter().enumerate() {
            if !e.is_zero() {
                acc = self.mul_letter_power(acc, g, e.clone(), ctx)?;
            }
        }
        Ok(acc)
    }

    /// Normal form of `u * a_g^e`.
    fn mul_letter_power(
        &self,
        mut u: ExpVec,
        g: usize,
        e: BigInt,
        ctx: &mut Ctx,
    ) -> Result<ExpVec> {
        ctx.step()?;
        if e.is_zero() {
            return Ok(u);
        }
        let mut suffix: Vec<PcLetter> = Vec::new();
        for (h, coeff) in u.iter_mut().enumerate().skip(g + 1) {
            if !coeff.is_zero() {
                suffix.push((h, std::mem::take(coeff)));
            }
        }
        if suffix.is_empty() {
            let c = std::mem::take(&mut u[g]) + e;
            match &self.orders[g] {
                None => {
                    u[g] = c;
                    Ok(u)
                }
                Some(m) => {
                    let (q, r) = c.div_mod_floor(m);
                    u[g] = r;
                    if q.is_zero() {
                        Ok(u)
                    } else {
                        let tail = self.power_tails[g]
                            .as_ref()
                            .ok_or_else(|| Error::Internal("missing power tail".into()))?;
                        let tail_pow = self.pow(tail, &q, ctx)?;
                        self.mul(&u, &tail_pow, ctx)
                    }
                }
            }
        } else {
            // u = base * suffix, so u * a_g^e = (base * a_g^e) * suffix^(a_g^e)
            let base = self.mul_letter_power(u, g, e.clone(), ctx)?;
            let conj = self.conj_letters(&suffix, g, &e, ctx)?;
            self.mul(&base, &conj, ctx)
        }
    }

    /// Conjugate of a normal-form segment (letters above `g`) by `a_g^e`,
    /// computed by |e| single-step conjugations.
    fn conj_letters(
        &self,
        letters: &[PcLetter],
        g: usize,
        e: &BigInt,
        ctx: &mut Ctx,
    ) -> Result<ExpVec> {
        let reps = e
            .magnitude()
            .try_into()
            .ok()
            .filter(|&r: &u64| r <= self.budget.max_conj_reps)
            .ok_or_else(|| {
                Error::Budget(format!(
                    "conjugation by a generator power of magnitude {} exceeds the limit of {}",
                    e.magnitude(),
                    self.budget.max_conj_reps
                ))
            })?;
        let positive = e.is_positive();
        let mut elem = self.identity();
        for (h, c) in letters {
            elem[*h] = c.clone();
        }
        for _ in 0..reps {
            elem = self.conj_elem_by_gen(&elem, g, positive, ctx)?;
        }
        Ok(elem)
    }

    /// Conjugate of an element supported above `g` by `a_g^{+1}` or
    /// `a_g^{-1}`.
    fn conj_elem_by_gen(
        &self,
        elem: &[BigInt],
        g: usize,
        positive: bool,
        ctx: &mut Ctx,
    ) -> Result<ExpVec> {
        let mut result = self.identity();
        for h in g + 1..elem.len() {
            if elem[h].is_zero() {
                continue;
            }
            let table = if positive { &self.conj } else { &self.invconj };
            match table.get(&(g, h)) {
                None => {
                    result = self.mul_letter_power(result, h, elem[h].clone(), ctx)?;
                }
                Some(tail) => {
                    let mut conjugate = tail.clone();
                    conjugate[h] += BigInt::one();
                    let powered = self.pow(&conjugate, &elem[h], ctx)?;
                    result = self.mul(&result, &powered, ctx)?;
                }
            }
        }
        Ok(result)
    }

    /// Normal form of `u^-1`.
    pub fn inverse(&self, u: &[BigInt], ctx: &mut Ctx) -> Result<ExpVec> {
        let mut acc = self.identity();
        for g in (0..u.len()).rev() {
            if !u[g].is_zero() {
                acc = self.mul_letter_power(acc, g, -u[g].clone(), ctx)?;
            }
        }
        Ok(acc)
    }

    /// Normal form of `u^n` by binary powering.
    pub fn pow(&self, u: &[BigInt], n: &BigInt, ctx: &mut Ctx) -> Result<ExpVec> {
        if n.is_zero() {
            return Ok(self.identity());
        }
        let base = if n.is_negative() {
            self.inverse(u, ctx)?
        } else {
            u.to_vec()
        };
        let mag = n.magnitude();
        let mut result = self.identity();
        let mut square = base;
        let bits = mag.bits();
        for bit in 0..bits {
            if mag.bit(bit) {
                result = self.mul(&result, &square, ctx)?;
            }
            if bit + 1 < bits {
                square = self.mul(&square, &square, ctx)?;
            }
        }
        Ok(result)
    }

    /// Normal form of an arbitrary letter sequence.
    pub fn collect(&self, letters: &[PcLetter], ctx: &mut Ctx) -> Result<ExpVec> {
        let mut acc = self.identity();
        for (g, e) in letters {
            if *g >= self.num_gens() {
                return Err(Error::Invalid(format!(
                    "pc generator index {g} out of range"
                )));
            }
            acc = self.mul_letter_power(acc, *g, e.clone(), ctx)?;
        }
        Ok(acc)
    }

    /// Conjugate `u^v = v^-1 u v` at the element level.
    pub fn conjugate(&self, u: &[BigInt], v: &[BigInt], ctx: &mut Ctx) -> Result<ExpVec> {
        let vi = self.inverse(v, ctx)?;
        let uv = self.mul(&vi, u, ctx)?;
        self.mul(&uv, v, ctx)
    }

    /// Commutator `[u, v] = u^-1 v^-1 u v` at the element level.
    pub fn commutator(&self, u: &[BigInt], v: &[BigInt], ctx: &mut Ctx) -> Result<ExpVec> {
        let ui = self.inverse(u, ctx)?;
        let vi = self.inverse(v, ctx)?;
        let p = self.mul(&ui, &vi, ctx)?;
        let p = self.mul(&p, u, ctx)?;
        self.mul(&p, v, ctx)
    }

    /// Recomputes the inverse-conjugation table from the forward one by
    /// solving `v^{a_i} = a_j` for `v`, in decreasing `j` so every lookup
    /// the solver needs is already available.
    pub fn rebuild_invconj(&mut self) -> Result<()> {
        self.invconj.clear();
        for j in (1..self.num_gens()).rev() {
            for i in 0..j {
                let Some(tail) = self.conj.get(&(i, j)).cloned() else {
                    continue;
                };
                let mut ctx = self.ctx();
                // v = a_j * z with z = (tail^-1)^(a_i^-1)
                let tail_inv = self.inverse(&tail, &mut ctx)?;
                let z = self.conj_elem_by_gen(&tail_inv, i, false, &mut ctx)?;
                if z[..=j].iter().any(|c| !c.is_zero()) {
                    return Err(Error::Internal(format!(
                        "inverse conjugate of a_{j} by a_{i} is not supported above {j}"
                    )));
                }
                if !vec_is_zero(&z) {
                    self.invconj.insert((i, j), z);
                }
            }
        }
        Ok(())
    }

    /// All consistency test pairs with total weight at most `weight_cap`:
    /// for each, the two collections of the same product. Any difference is
    /// supported on the central block during an extension and must be empty
    /// in a finished presentation.
    pub fn consistency_pairs(&self, weight_cap: usize) -> Result<Vec<(String, ExpVec, ExpVec)>> {
        let n = self.num_gens();
        let mut out = Vec::new();
        // a_l (a_j a_i) = (a_l a_j) a_i
        for l in 2..n {
            for j in 1..l {
                if self.weights[l] + self.weights[j] + 1 > weight_cap {
                    continue;
                }
                for i in 0..j {
                    if self.weights[l] + self.weights[j] + self.weights[i] > weight_cap {
                        continue;
                    }
                    let mut ctx = self.ctx();
                    let el = self.gen_vec(l);
                    let ej = self.gen_vec(j);
                    let ei = self.gen_vec(i);
                    let ji = self.mul(&ej, &ei, &mut ctx)?;
                    let lhs = self.mul(&el, &ji, &mut ctx)?;
                    let lj = self.mul(&el, &ej, &mut ctx)?;
                    let rhs = self.mul(&lj, &ei, &mut ctx)?;
                    out.push((format!("a{l}(a{j} a{i}) = (a{l} a{j})a{i}"), lhs, rhs));
                }
            }
        }
        // power/conjugation compatibility for pairs i < j
        for j in 1..n {
            for i in 0..j {
                if self.weights[i] + self.weights[j] > weight_cap {
                    continue;
                }
                let ei = self.gen_vec(i);
                let ej = self.gen_vec(j);
                if let Some(mj) = self.orders[j].clone() {
                    // a_j^{m_j} a_i = a_j^{m_j - 1} (a_j a_i)
                    let mut ctx = self.ctx();
                    let pj = self.power_tails[j].clone().expect("tail present");
                    let lhs = self.mul(&pj, &ei, &mut ctx)?;
                    let mut jm1 = self.identity();
                    jm1[j] = &mj - 1;
                    let ji = self.mul(&ej, &ei, &mut ctx)?;
                    let rhs = self.mul(&jm1, &ji, &mut ctx)?;
                    out.push((format!("a{j}^m a{i} = a{j}^(m-1)(a{j} a{i})"), lhs, rhs));
                }
                if let Some(mi) = self.orders[i].clone() {
                    // a_j (a_i^{m_i}) = (a_j a_i) a_i^{m_i - 1}
                    let mut ctx = self.ctx();
                    let pi = self.power_tails[i].clone().expect("tail present");
                    let lhs = self.mul(&ej, &pi, &mut ctx)?;
                    let ji = self.mul(&ej, &ei, &mut ctx)?;
                    let mut im1 = self.identity();
                    im1[i] = &mi - 1;
                    let rhs = self.mul(&ji, &im1, &mut ctx)?;
                    out.push((format!("a{j}(a{i}^m) = (a{j} a{i})a{i}^(m-1)"), lhs, rhs));
                } else {
                    // (a_j a_i^-1) a_i = a_j = (a_j a_i) a_i^-1
                    let mut ctx = self.ctx();
                    let minus = self.mul_letter_power(ej.clone(), i, -BigInt::one(), &mut ctx)?;
                    let lhs = self.mul_letter_power(minus, i, BigInt::one(), &mut ctx)?;
                    out.push((format!("(a{j} a{i}^-1)a{i} = a{j}"), lhs, ej.clone()));
                    let mut ctx = self.ctx();
                    let plus = self.mul_letter_power(ej.clone(), i, BigInt::one(), &mut ctx)?;
                    let lhs = self.mul_letter_power(plus, i, -BigInt::one(), &mut ctx)?;
                    out.push((format!("(a{j} a{i})a{i}^-1 = a{j}"), lhs, ej.clone()));
                }
            }
        }
        // a_i (a_i^{m_i}) = (a_i^{m_i}) a_i
        for i in 0..n {
            if let Some(_mi) = &self.orders[i] {
                let mut ctx = self.ctx();
                let ei = self.gen_vec(i);
                let pi = self.power_tails[i].clone().expect("tail present");
                let lhs = self.mul(&ei, &pi, &mut ctx)?;
                let rhs = self.mul(&pi, &ei, &mut ctx)?;
                out.push((format!("a{i} a{i}^m = a{i}^m a{i}"), lhs, rhs));
            }
        }
        Ok(out)
    }
}
