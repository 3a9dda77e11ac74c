//! Dense exact-integer matrices with Hermite and Smith normal forms.
//!
//! Hermite reduction (row operations only) is what the quotient engine uses
//! to impose relations; the Smith form with its unimodular transforms is
//! used to report invariant factors and to compute orders in quotients of
//! free abelian groups by row lattices.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Invalid("ragged rows in matrix".into()));
        }
        Ok(IntMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| BigInt::from(x)))
            .collect();
        IntMatrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn multiply(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Invalid("matrix dimension mismatch".into()));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let product = a * &other[(k, j)];
                    out[(i, j)] += product;
                }
            }
        }
        Ok(out)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(r, j)]);
            self[(r, j)] = v;
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let add = q * &self[(src, j)];
            self[(dst, j)] += add;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let add = q * &self[(i, src)];
            self[(i, dst)] += add;
        }
    }

    fn max_entry_bits(&self) -> u64 {
        self.data.iter().map(|x| x.bits()).max().unwrap_or(0)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

/// Row-reduced Hermite form: pivots are positive, entries below a pivot are
/// zero and entries above lie in `[0, pivot)`. Produced by row operations
/// only, so the row lattice is preserved and columns keep their meaning.
#[derive(Debug, Clone)]
pub struct HermiteForm {
    pub matrix: IntMatrix,
    /// `(col, row)` of each pivot, in increasing column order.
    pub pivots: Vec<(usize, usize)>,
}

pub fn hermite_normal_form(input: &IntMatrix, max_entry_bits: Option<u64>) -> Result<HermiteForm> {
    let mut m = input.clone();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..m.ncols() {
        if top == m.nrows() {
            break;
        }
        // Clear the column below `top` by repeated minimum-remainder steps.
        loop {
            if let Some(bits) = max_entry_bits {
                if m.max_entry_bits() > bits {
                    return Err(Error::Budget(format!(
                        "matrix entry exceeded {bits} bits during Hermite reduction"
                    )));
                }
            }
            let pivot_row = (top..m.nrows())
                .filter(|&i| !m[(i, col)].is_zero())
                .min_by_key(|&i| m[(i, col)].magnitude().clone());
            let Some(pivot_row) = pivot_row else { break };
            m.swap_rows(top, pivot_row);
            if m[(top, col)].is_negative() {
                m.negate_row(top);
            }
            let pivot = m[(top, col)].clone();
            let mut clean = true;
            for i in top + 1..m.nrows() {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let (q, r) = m[(i, col)].div_mod_floor(&pivot);
                m.add_row_multiple(i, top, &-q);
                if !r.is_zero() {
                    clean = false;
                }
            }
            if clean {
                // Reduce the entries above the pivot into [0, pivot).
                for i in 0..top {
                    let (q, _) = m[(i, col)].div_mod_floor(&pivot);
                    m.add_row_multiple(i, top, &-q);
                }
                pivots.push((col, top));
                top += 1;
                break;
            }
        }
    }
    Ok(HermiteForm { matrix: m, pivots })
}

/// Smith normal form `U * M * V = D` with unimodular `U`, `V` and diagonal
/// `D` whose entries are nonnegative and divide successively.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries, including zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Invariant factors greater than 1.
    pub fn torsion_factors(&self) -> Vec<BigUint> {
        self.diagonal()
            .iter()
            .filter(|x| !x.is_zero() && !x.is_one())
            .map(|x| x.magnitude().clone())
            .collect()
    }
}

pub fn smith_normal_form(input: &IntMatrix) -> SmithForm {
    let mut a = input.clone();
    let nrows = a.nrows();
    let ncols = a.ncols();
    let mut u = IntMatrix::identity(nrows);
    let mut v = IntMatrix::identity(ncols);

    let limit = nrows.min(ncols);
    for t in 0..limit {
        // Find the minimum-magnitude nonzero entry in the region.
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..nrows {
                for j in t..ncols {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    match pivot {
                        Some((pi, pj)) if a[(pi, pj)].magnitude() <= a[(i, j)].magnitude() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return SmithForm { d: a, u, v };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            if a[(t, t)].is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
            let pivot_value = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..nrows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let (q, r) = a[(i, t)].div_mod_floor(&pivot_value);
                a.add_row_multiple(i, t, &-q.clone());
                u.add_row_multiple(i, t, &-q);
                if !r.is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..ncols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let (q, r) = a[(t, j)].div_mod_floor(&pivot_value);
                a.add_col_multiple(j, t, &-q.clone());
                v.add_col_multiple(j, t, &-q);
                if !r.is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Fold in any region entry not divisible by the pivot.
            let mut offender = None;
            'search: for i in t + 1..nrows {
                for j in t + 1..ncols {
                    if !a[(i, j)].mod_floor(&pivot_value).is_zero() {
                        offender = Some(i);
                        break 'search;
                    }
                }
            }
            match offender {
                Some(i) => {
                    a.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
    }
    SmithForm { d: a, u, v }
}

/// Least `d >= 1` with `d * vector` inside the row lattice of
/// `relation_rows`, or `None` when no multiple lands in the lattice.
pub fn order_in_quotient(
    vector: &[BigInt],
    relation_rows: &[Vec<BigInt>],
) -> Result<Option<BigUint>> {
    let n = vector.len();
    if relation_rows.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("relation row length mismatch".into()));
    }
    if relation_rows.is_empty() {
        return Ok(if vector.iter().all(Zero::is_zero) {
            Some(BigUint::one())
        } else {
            None
        });
    }
    let r = IntMatrix::from_rows(relation_rows.to_vec())?;
    let snf = smith_normal_form(&r);
    // w = vector * V; the lattice becomes the span of d_j * e_j.
    let mut w = vec![BigInt::zero(); n];
    for (j, entry) in w.iter_mut().enumerate() {
        for (k, coord) in vector.iter().enumerate() {
            *entry += coord * &snf.v[(k, j)];
        }
    }
    let diag = snf.diagonal();
    let mut order = BigUint::one();
    for (j, value) in w.iter().enumerate() {
        if value.is_zero() {
            continue;
        }
        let dj = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
        if dj.is_zero() {
            return Ok(None);
        }
        let dj = dj.magnitude().clone();
        let g = dj.gcd(value.magnitude());
        order = order.lcm(&(dj / g));
    }
    Ok(Some(order))
}
