//! Linear algebra over F_q and F_{q^n}: rank, RREF, kernels, determinants,
//! Gaussian binomials and canonical enumeration of F_q-subspaces of F_{q^n}.

use num::{BigUint, One};

use crate::error::{Error, Result};
use crate::field::{FFElem, FieldCtx};
use crate::gf::{Fld, SmallField};

/// Dense matrix over F_q, entries as field codes.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl FqMatrix {
    pub fn zero(rows: usize, cols: usize) -> FqMatrix {
        FqMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> FqMatrix {
        let mut m = FqMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u8>>) -> FqMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        FqMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }
    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, f: &SmallField, other: &FqMatrix) -> FqMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = FqMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, f: &SmallField, v: &[u8]) -> Vec<u8> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u8;
                for (j, &x) in v.iter().enumerate() {
                    if x != 0 {
                        acc = f.add(acc, f.mul(self.get(i, j), x));
                    }
                }
                acc
            })
            .collect()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, f: &SmallField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(sel) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(row, sel);
            let inv = f.inv(self.get(row, col)).expect("pivot nonzero");
            if inv != 1 {
                for c in col..self.cols {
                    self.set(row, c, f.mul(self.get(row, c), inv));
                }
            }
            for r in 0..self.rows {
                if r != row {
                    let factor = self.get(r, col);
                    if factor != 0 {
                        for c in col..self.cols {
                            let v = f.sub(self.get(r, c), f.mul(factor, self.get(row, c)));
                            self.set(r, c, v);
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(mut self, f: &SmallField) -> usize {
        self.rref(f).len()
    }

    /// Basis of the right kernel, one vector per row, in RREF form.
    pub fn kernel(&self, f: &SmallField) -> FqMatrix {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = FqMatrix::zero(free.len(), self.cols);
        for (bi, &fc) in free.iter().enumerate() {
            basis.set(bi, fc, 1);
            for (pi, &pc) in pivots.iter().enumerate() {
                basis.set(bi, pc, f.neg(m.get(pi, fc)));
            }
        }
        // Rows already echelon-like on free columns; normalize ordering so the
        // basis is canonical: sort by pivot (free) column.
        basis
    }
}

/// Stacks the F_q-expansions of elements as matrix rows.
pub fn expansion_matrix(ctx: &FieldCtx, elems: &[FFElem]) -> FqMatrix {
    FqMatrix::from_rows(elems.iter().map(|&x| ctx.expand(x)).collect())
}

/// F_q-rank of a list of F_{q^n} elements.
pub fn fq_rank(ctx: &FieldCtx, elems: &[FFElem]) -> usize {
    expansion_matrix(ctx, elems).rank(ctx.base())
}

/// Determinant of a square FFElem matrix by Gaussian elimination over F_{q^n}.
pub fn det_ffelem(ctx: &FieldCtx, m: &[Vec<FFElem>]) -> Result<FFElem> {
    let k = m.len();
    for row in m {
        if row.len() != k {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
    }
    let mut a: Vec<Vec<FFElem>> = m.to_vec();
    let mut det = ctx.one();
    for col in 0..k {
        let Some(sel) = (col..k).find(|&r| !a[r][col].is_zero()) else {
            return Ok(ctx.zero());
        };
        if sel != col {
            a.swap(sel, col);
            det = ctx.neg(det);
        }
        let pivot = a[col][col];
        det = ctx.mul(det, pivot);
        let inv = ctx.inv(pivot)?;
        for r in col + 1..k {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = ctx.mul(a[r][col], inv);
            for c in col..k {
                let v = ctx.sub(a[r][c], ctx.mul(factor, a[col][c]));
                a[r][c] = v;
            }
        }
    }
    Ok(det)
}

/// Exact Gaussian binomial coefficient: the number of k-dimensional
/// F_q-subspaces of an n-dimensional space.
pub fn gaussian_binomial(q: u64, n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for t in 0..k {
        num *= num::pow::pow(q.clone(), (n - t) as usize) - 1u32;
        den *= num::pow::pow(q.clone(), (t + 1) as usize) - 1u32;
    }
    num / den
}

/// Canonical basis of a k-dimensional F_q-subspace of F_{q^n}: the expansion
/// matrix of the vectors is the unique RREF basis of the subspace.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub k: usize,
    pub vectors: Vec<FFElem>,
    pub matrix: FqMatrix,
}

/// Random-access enumeration of all k-subspaces in a fixed canonical order:
/// pivot-column sets lexicographically, free entries odometer-wise (the last
/// free position in row-major order varies fastest).
pub struct SubspaceEnum {
    q: u64,
    n: u32,
    k: u32,
    blocks: Vec<Block>,
    total: BigUint,
    /// q^c for c < n, present whenever q^n fits in a u64.
    pow_q: Option<Vec<u64>>,
}

struct Block {
    pivots: Vec<u32>,
    start: u128,
    size: u128,
    /// Free positions (row, col) in row-major order.
    free: Vec<(u32, u32)>,
}

impl SubspaceEnum {
    pub fn new(q: u64, n: u32, k: u32) -> Result<SubspaceEnum> {
        if k > n {
            return Err(Error::InvalidParameter(format!("k = {k} out of range for n = {n}")));
        }
        let mut blocks = Vec::new();
        let mut start: u128 = 0;
        let mut pivots: Vec<u32> = (0..k).collect();
        loop {
            let free = free_positions(n, &pivots);
            let size = (q as u128)
                .checked_pow(free.len() as u32)
                .ok_or_else(|| Error::InvalidParameter("subspace block size overflow".into()))?;
            blocks.push(Block { pivots: pivots.clone(), start, size, free });
            start = start
                .checked_add(size)
                .ok_or_else(|| Error::InvalidParameter("subspace count overflow".into()))?;
            if !next_combination(&mut pivots, n) {
                break;
            }
        }
        let total = blocks.iter().map(|b| BigUint::from(b.size)).sum();
        let pow_q = q.checked_pow(n).map(|_| (0..n).map(|c| q.pow(c)).collect());
        Ok(SubspaceEnum { q, n, k, blocks, total, pow_q })
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn total_u64(&self) -> Option<u64> {
        use num::ToPrimitive;
        self.total.to_u64()
    }

    /// Decodes the index-th canonical RREF matrix (k rows, n columns).
    pub fn matrix_at(&self, index: u128) -> FqMatrix {
        let bi = match self.blocks.binary_search_by(|b| b.start.cmp(&index)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let b = &self.blocks[bi];
        let mut off = index - b.start;
        debug_assert!(off < b.size);
        let mut m = FqMatrix::zero(self.k as usize, self.n as usize);
        for (r, &p) in b.pivots.iter().enumerate() {
            m.set(r, p as usize, 1);
        }
        for &(r, c) in b.free.iter().rev() {
            m.set(r as usize, c as usize, (off % self.q as u128) as u8);
            off /= self.q as u128;
        }
        m
    }

    /// Writes the canonical RREF rows as element codes (coefficient c in
    /// power-basis slot c contributes c * q^slot); allocation free, intended
    /// for chunked parallel consumption.
    pub fn rows_codes_at(&self, index: u128, out: &mut [u64]) {
        let pow_q = self.pow_q.as_ref().expect("field order fits u64");
        let bi = match self.blocks.binary_search_by(|b| b.start.cmp(&index)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let b = &self.blocks[bi];
        let mut off = index - b.start;
        debug_assert!(off < b.size);
        debug_assert_eq!(out.len(), self.k as usize);
        for (r, &p) in b.pivots.iter().enumerate() {
            out[r] = pow_q[p as usize];
        }
        for &(r, c) in b.free.iter().rev() {
            let d = (off % self.q as u128) as u64;
            off /= self.q as u128;
            if d != 0 {
                out[r as usize] += d * pow_q[c as usize];
            }
        }
    }

    pub fn basis_at(&self, ctx: &FieldCtx, index: u128) -> SubspaceBasis {
        let m = self.matrix_at(index);
        let vectors = (0..self.k as usize)
            .map(|r| ctx.from_coeffs(m.row(r)).expect("row has length n"))
            .collect();
        SubspaceBasis { k: self.k as usize, vectors, matrix: m }
    }
}

fn free_positions(n: u32, pivots: &[u32]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for (r, &p) in pivots.iter().enumerate() {
        for c in p + 1..n {
            if !pivots.contains(&c) {
                out.push((r as u32, c));
            }
        }
    }
    out
}

/// Advances a sorted combination in lexicographic order; false when done.
fn next_combination(comb: &mut [u32], n: u32) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - (k - i) as u32 {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Yields every k-subspace exactly once (convenience over matrix_at).
pub fn enumerate_subspaces<'a>(
    ctx: &'a FieldCtx,
    k: u32,
) -> Result<impl Iterator<Item = SubspaceBasis> + 'a> {
    if k < 1 || k > ctx.n() {
        return Err(Error::InvalidParameter(format!("k = {k} out of range")));
    }
    let en = SubspaceEnum::new(ctx.q(), ctx.n(), k)?;
    let total = en
        .total_u64()
        .ok_or_else(|| Error::InvalidParameter("subspace count exceeds u64".into()))?;
    Ok((0..total as u128).map(move |i| en.basis_at(ctx, i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_create;
    use std::collections::HashSet;

    #[test]
    fn expand_is_linear() {
        let ctx = field_create(3, 1, 4, None, None).unwrap();
        assert_eq!(ctx.expand(ctx.zero()), vec![0, 0, 0, 0]);
        assert_eq!(ctx.expand(ctx.one()), vec![1, 0, 0, 0]);
        for c in (0..81).step_by(7) {
            let x = ctx.elem_from_code(c).unwrap();
            let y = ctx.elem_from_code((c * 13 + 5) % 81).unwrap();
            let lhs = ctx.expand(ctx.add(x, y));
            let rhs: Vec<u8> = ctx
                .expand(x)
                .iter()
                .zip(ctx.expand(y))
                .map(|(&a, b)| ctx.base().add(a, b))
                .collect();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rank_examples_in_f4() {
        let ctx = field_create(2, 1, 2, None, None).unwrap();
        let one = ctx.one();
        let w = ctx.elem_from_code(2).unwrap();
        let w2 = ctx.mul(w, w);
        assert_eq!(fq_rank(&ctx, &[one, w]), 2);
        assert_eq!(fq_rank(&ctx, &[w, w]), 1);
        assert_eq!(fq_rank(&ctx, &[one, w, w2]), 2);
    }

    #[test]
    fn det_examples() {
        let ctx = field_create(2, 1, 2, None, None).unwrap();
        let one = ctx.one();
        let w = ctx.elem_from_code(2).unwrap();
        let id = vec![vec![one, ctx.zero()], vec![ctx.zero(), one]];
        assert_eq!(det_ffelem(&ctx, &id).unwrap(), one);
        let rep = vec![vec![one, w], vec![one, w]];
        assert_eq!(det_ffelem(&ctx, &rep).unwrap(), ctx.zero());
        // det [[1, w], [w, 1]] = 1 - w^2 = w in characteristic 2.
        let m = vec![vec![one, w], vec![w, one]];
        assert_eq!(det_ffelem(&ctx, &m).unwrap(), w);
        let bad = vec![vec![one], vec![w]];
        assert!(det_ffelem(&ctx, &bad).is_err());
    }

    #[test]
    fn gaussian_binomial_values() {
        assert_eq!(gaussian_binomial(2, 5, 2), BigUint::from(155u32));
        assert_eq!(gaussian_binomial(2, 4, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(3, 7, 2), BigUint::from(99_463u32));
        assert_eq!(gaussian_binomial(3, 7, 3), BigUint::from(925_771u32));
        assert_eq!(gaussian_binomial(7, 4, 0), BigUint::from(1u32));
        assert_eq!(gaussian_binomial(2, 3, 5), BigUint::ZERO);
    }

    #[test]
    fn subspace_enumeration_is_complete_and_canonical() {
        let ctx = field_create(2, 1, 4, None, None).unwrap();
        let en = SubspaceEnum::new(2, 4, 2).unwrap();
        assert_eq!(en.total(), &gaussian_binomial(2, 4, 2));
        let total = en.total_u64().unwrap();
        let mut seen = HashSet::new();
        let mut spans = HashSet::new();
        for i in 0..total {
            let b = en.basis_at(&ctx, i as u128);
            assert_eq!(fq_rank(&ctx, &b.vectors), 2);
            assert!(seen.insert(b.matrix.clone()), "duplicate RREF");
            // The span, as the sorted set of its q^k member codes.
            let mut members: Vec<u64> = Vec::new();
            for c0 in 0..2u64 {
                for c1 in 0..2u64 {
                    let mut acc = ctx.zero();
                    if c0 == 1 {
                        acc = ctx.add(acc, b.vectors[0]);
                    }
                    if c1 == 1 {
                        acc = ctx.add(acc, b.vectors[1]);
                    }
                    members.push(acc.code());
                }
            }
            members.sort_unstable();
            assert!(spans.insert(members), "two bases span the same subspace");
        }
    }

    #[test]
    fn subspace_counts_match_binomial() {
        for (q, n, k) in [(2u64, 5u32, 2u32), (3, 4, 2), (2, 6, 3), (3, 7, 1)] {
            let en = SubspaceEnum::new(q, n, k).unwrap();
            assert_eq!(en.total(), &gaussian_binomial(q, n, k));
        }
        // Whole space: exactly one subspace.
        let en = SubspaceEnum::new(3, 5, 5).unwrap();
        assert_eq!(en.total(), &BigUint::from(1u32));
        assert!(SubspaceEnum::new(2, 4, 5).is_err());
    }

    #[test]
    fn kernel_times_matrix_is_zero() {
        let ctx = field_create(3, 1, 3, None, None).unwrap();
        let f = ctx.base();
        let m = FqMatrix::from_rows(vec![vec![1, 2, 0], vec![0, 1, 1]]);
        let ker = m.kernel(f);
        assert_eq!(ker.rows(), 1);
        for r in 0..ker.rows() {
            for row in 0..m.rows() {
                let mut acc = 0u8;
                for c in 0..3 {
                    acc = f.add(acc, f.mul(m.get(row, c), ker.get(r, c)));
                }
                assert_eq!(acc, 0);
            }
        }
    }

    #[test]
    fn rref_is_idempotent() {
        let ctx = field_create(3, 1, 3, None, None).unwrap();
        let f = ctx.base();
        let mut m = FqMatrix::from_rows(vec![vec![2, 1, 1], vec![1, 1, 0], vec![0, 2, 2]]);
        m.rref(f);
        let once = m.clone();
        m.rref(f);
        assert_eq!(m, once);
    }
}
