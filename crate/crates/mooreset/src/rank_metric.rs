//! The MRD-code side of a Moore exponent set: the code C spanned by the
//! monomials X^{q^{i_j}}, codeword ranks, minimum rank distance and the left
//! and right idealiser dimensions.

use crate::error::{Error, Result};
use crate::field::{FFElem, FieldCtx};
use crate::gf::Fld;
use crate::linalg::FqMatrix;
use crate::linpoly::{lin_compose, lin_matrix, LinPoly};
use crate::moore::ExponentSet;
use crate::par::{tally, ParHint};

/// Rank of the codeword with coefficient tuple a: n minus its kernel
/// dimension as an F_q-linear map.
pub fn codeword_rank(ctx: &FieldCtx, a: &[FFElem], iset: &ExponentSet) -> Result<usize> {
    if a.len() != iset.k() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient tuple length {} does not match k = {}",
            a.len(),
            iset.k()
        )));
    }
    let f = LinPoly::from_coeffs(
        iset.exps().iter().copied().zip(a.iter().copied()),
    );
    Ok(lin_matrix(ctx, &f).rank(ctx.base()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceReport {
    pub min_rank_distance: usize,
    pub singleton: usize,
    pub is_mrd: bool,
    /// Projective codewords scanned: (q^{nk} - 1)/(q^n - 1).
    pub scanned: u64,
}

/// Minimum codeword rank over projective representatives (first nonzero
/// coefficient normalized to 1; rank is invariant under scaling).
pub fn min_rank_distance(
    ctx: &FieldCtx,
    iset: &ExponentSet,
    hint: ParHint,
    budget: Option<u64>,
) -> Result<DistanceReport> {
    let k = iset.k() as u32;
    let n = ctx.n();
    let size = ctx.size_u64() as u128;
    let mut total: u128 = 0;
    for j in 0..k {
        total = total
            .checked_add(size.pow(k - 1 - j))
            .ok_or_else(|| Error::BudgetExceeded {
                needed: "codeword count beyond u128".into(),
                budget: "u128 range".into(),
            })?;
    }
    let limit = budget.unwrap_or(u64::MAX);
    if total > limit as u128 {
        return Err(Error::BudgetExceeded { needed: total.to_string(), budget: limit.to_string() });
    }
    let total = total as u64;
    for &j in iset.exps() {
        ctx.prewarm_frobenius(j);
    }
    // basis_imgs[c][t] = (x^t)^{q^{i_c}}
    let basis_imgs: Vec<Vec<FFElem>> = iset
        .exps()
        .iter()
        .map(|&j| {
            (0..n)
                .map(|t| ctx.frobenius(ctx.elem_from_code_unchecked(ctx.q().pow(t)), j))
                .collect()
        })
        .collect();

    let decode_tuple = |mut idx: u64| -> Vec<FFElem> {
        // Position of the leading 1: largest j with idx >= offset_j.
        let mut a = vec![FFElem::ZERO; k as usize];
        let mut j = 0;
        loop {
            let block = (size as u128).pow(k - 1 - j) as u64;
            if idx < block {
                break;
            }
            idx -= block;
            j += 1;
        }
        a[j as usize] = FFElem::ONE;
        for slot in (j + 1..k).rev() {
            a[slot as usize] = ctx.elem_from_code_unchecked(idx % size as u64);
            idx /= size as u64;
        }
        a
    };

    let min = tally(
        total,
        hint,
        || usize::MAX,
        |acc, idx| {
            let a = decode_tuple(idx);
            // Rank of the map y -> sum a_c y^{q^{i_c}} via its basis images.
            let mut cols = [FFElem::ZERO; 64];
            for t in 0..n as usize {
                let mut img = FFElem::ZERO;
                for (c, &ac) in a.iter().enumerate() {
                    if !ac.is_zero() {
                        img = ctx.add(img, ctx.mul(ac, basis_imgs[c][t]));
                    }
                }
                cols[t] = img;
            }
            let m = FqMatrix::from_rows(
                cols[..n as usize].iter().map(|&x| ctx.expand(x)).collect(),
            );
            let rank = m.rank(ctx.base());
            *acc = (*acc).min(rank);
        },
        |a, b| a.min(b),
    );
    let singleton = n as usize - iset.k() + 1;
    Ok(DistanceReport {
        min_rank_distance: min,
        singleton,
        is_mrd: min == singleton,
        scanned: total,
    })
}

/// Configurable size guard for the idealiser solve.
#[derive(Copy, Clone, Debug)]
pub struct IdealiserBudget {
    pub max_n: u32,
    pub max_q: u64,
}

impl Default for IdealiserBudget {
    fn default() -> Self {
        IdealiserBudget { max_n: 8, max_q: 4 }
    }
}

/// F_q-dimensions of the left and right idealisers of C: maps phi with
/// phi.C in C (left) and C.phi in C (right). Each side is one exact
/// F_q-linear solve in the n^2 unknown coordinates of phi, with constraints
/// "coefficients of the composition outside the support I vanish" built
/// through lin_compose.
pub fn idealiser_dims(
    ctx: &FieldCtx,
    iset: &ExponentSet,
    budget: IdealiserBudget,
) -> Result<(usize, usize)> {
    let n = ctx.n();
    if n > budget.max_n || ctx.q() > budget.max_q {
        return Err(Error::BudgetExceeded {
            needed: format!("n = {n}, q = {}", ctx.q()),
            budget: format!("n <= {}, q <= {}", budget.max_n, budget.max_q),
        });
    }
    let left = idealiser_side(ctx, iset, true)?;
    let right = idealiser_side(ctx, iset, false)?;
    Ok((left, right))
}

fn idealiser_side(ctx: &FieldCtx, iset: &ExponentSet, left: bool) -> Result<usize> {
    let n = ctx.n() as usize;
    let exps = iset.exps();
    let outside: Vec<u32> = (0..ctx.n()).filter(|t| !exps.contains(t)).collect();
    if outside.is_empty() {
        // Full support: C is the whole twisted algebra, everything idealises.
        return Ok(n * n);
    }
    // Unknown phi = sum_m u_m X^{q^m}; unknown column index = m*n + b where
    // u_m = sum_b w_{m,b} x^b.
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut cons_idx = std::collections::HashMap::new();
    for &j in exps {
        let gen = LinPoly::monomial(j, ctx.one());
        for m in 0..n {
            for b in 0..n {
                let unit = LinPoly::monomial(
                    m as u32,
                    ctx.elem_from_code_unchecked(ctx.q().pow(b as u32)),
                );
                let comp = if left {
                    lin_compose(ctx, &unit, &gen)
                } else {
                    lin_compose(ctx, &gen, &unit)
                };
                for &t in &outside {
                    let coeff = comp.coeffs().get(&t).copied().unwrap_or(FFElem::ZERO);
                    if coeff.is_zero() {
                        continue;
                    }
                    for (r, &d) in ctx.expand(coeff).iter().enumerate() {
                        if d == 0 {
                            continue;
                        }
                        let key = (j, t, r);
                        let row = *cons_idx.entry(key).or_insert_with(|| {
                            rows.push(vec![0u8; n * n]);
                            rows.len() - 1
                        });
                        rows[row][m * n + b] = ctx.base().add(rows[row][m * n + b], d);
                    }
                }
            }
        }
    }
    if rows.is_empty() {
        return Ok(n * n);
    }
    let m = FqMatrix::from_rows(rows);
    Ok(n * n - m.rank(ctx.base()))
}

/// Full report: distance fields plus the idealiser dimensions.
#[derive(Clone, Debug)]
pub struct CodeReport {
    pub min_rank_distance: usize,
    pub singleton: usize,
    pub is_mrd: bool,
    pub scanned: u64,
    pub left_ideal_dim: usize,
    pub right_ideal_dim: usize,
}

pub fn code_report(
    ctx: &FieldCtx,
    iset: &ExponentSet,
    hint: ParHint,
    budget: Option<u64>,
    ideal_budget: IdealiserBudget,
) -> Result<CodeReport> {
    let d = min_rank_distance(ctx, iset, hint, budget)?;
    let (l, r) = idealiser_dims(ctx, iset, ideal_budget)?;
    Ok(CodeReport {
        min_rank_distance: d.min_rank_distance,
        singleton: d.singleton,
        is_mrd: d.is_mrd,
        scanned: d.scanned,
        left_ideal_dim: l,
        right_ideal_dim: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_create;
    use crate::moore::moore_check_kernel;

    #[test]
    fn codeword_rank_examples() {
        let ctx = field_create(2, 1, 3, None, None).unwrap();
        let iset = ExponentSet::new(vec![0, 1], 3).unwrap();
        // Zero codeword.
        assert_eq!(codeword_rank(&ctx, &[ctx.zero(), ctx.zero()], &iset).unwrap(), 0);
        // f = X is the identity map.
        assert_eq!(codeword_rank(&ctx, &[ctx.one(), ctx.zero()], &iset).unwrap(), 3);
        // f = X^q - X = X^2 + X has kernel F_2.
        assert_eq!(
            codeword_rank(&ctx, &[ctx.one(), ctx.one()], &iset).unwrap(),
            2
        );
    }

    #[test]
    fn gabidulin_is_mrd() {
        let ctx = field_create(2, 1, 5, None, None).unwrap();
        let iset = ExponentSet::new(vec![0, 1], 5).unwrap();
        let d = min_rank_distance(&ctx, &iset, ParHint::default(), None).unwrap();
        assert_eq!(d.scanned, 33);
        assert_eq!(d.min_rank_distance, 4);
        assert_eq!(d.singleton, 4);
        assert!(d.is_mrd);
    }

    #[test]
    fn non_moore_set_is_not_mrd() {
        let ctx = field_create(2, 1, 4, None, None).unwrap();
        let iset = ExponentSet::new(vec![0, 2], 4).unwrap();
        let d = min_rank_distance(&ctx, &iset, ParHint::default(), None).unwrap();
        assert!(d.min_rank_distance <= 2);
        assert!(!d.is_mrd);
    }

    #[test]
    fn k1_code_has_distance_n() {
        let ctx = field_create(3, 1, 4, None, None).unwrap();
        let iset = ExponentSet::new(vec![0], 4).unwrap();
        let d = min_rank_distance(&ctx, &iset, ParHint::default(), None).unwrap();
        assert_eq!(d.min_rank_distance, 4);
        assert!(d.is_mrd);
    }

    #[test]
    fn idealiser_examples() {
        // Full support: the whole n^2-dimensional algebra.
        let ctx = field_create(2, 1, 3, None, None).unwrap();
        let full = ExponentSet::new(vec![0, 1, 2], 3).unwrap();
        assert_eq!(idealiser_dims(&ctx, &full, IdealiserBudget::default()).unwrap(), (9, 9));

        // Gabidulin {0,1}: both idealisers are the field algebra, dim n.
        let ctx = field_create(2, 1, 5, None, None).unwrap();
        let iset = ExponentSet::new(vec![0, 1], 5).unwrap();
        assert_eq!(idealiser_dims(&ctx, &iset, IdealiserBudget::default()).unwrap(), (5, 5));

        let ctx = field_create(3, 1, 4, None, None).unwrap();
        let iset = ExponentSet::new(vec![0, 1], 4).unwrap();
        assert_eq!(idealiser_dims(&ctx, &iset, IdealiserBudget::default()).unwrap(), (4, 4));
    }

    #[test]
    fn idealisers_contain_field_multiplications() {
        for exps in [vec![0u32, 1], vec![0, 2], vec![0, 1, 3]] {
            let ctx = field_create(2, 1, 5, None, None).unwrap();
            let iset = ExponentSet::new(exps, 5).unwrap();
            let (l, r) = idealiser_dims(&ctx, &iset, IdealiserBudget::default()).unwrap();
            assert!(l >= 5 && r >= 5);
        }
    }

    #[test]
    fn rank_is_projective_invariant() {
        let ctx = field_create(3, 1, 4, None, None).unwrap();
        let iset = ExponentSet::new(vec![0, 2], 4).unwrap();
        let mut s = 17u64;
        for _ in 0..50 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ctx.elem_from_code(s % 81).unwrap();
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ctx.elem_from_code(s % 81).unwrap();
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let scale = ctx.elem_from_code(1 + s % 80).unwrap();
            let r1 = codeword_rank(&ctx, &[a, b], &iset).unwrap();
            let r2 = codeword_rank(&ctx, &[ctx.mul(scale, a), ctx.mul(scale, b)], &iset).unwrap();
            assert_eq!(r1, r2);
        }
    }

    #[test]
    fn moore_iff_mrd_small_sweep() {
        for q in [2u64, 3] {
            for n in 2..=4u32 {
                for d in 1..n {
                    let ctx = field_create(q, 1, n, None, None).unwrap();
                    let iset = ExponentSet::new(vec![0, d], n).unwrap();
                    let moore =
                        moore_check_kernel(&ctx, &iset, ParHint::default(), None).unwrap().is_moore;
                    let mrd = min_rank_distance(&ctx, &iset, ParHint::default(), None)
                        .unwrap()
                        .is_mrd;
                    assert_eq!(moore, mrd, "q={q} n={n} I={{0,{d}}}");
                }
            }
        }
    }

    #[test]
    fn budget_guards() {
        let ctx = field_create(2, 1, 5, None, None).unwrap();
        let iset = ExponentSet::new(vec![0, 1], 5).unwrap();
        assert!(matches!(
            min_rank_distance(&ctx, &iset, ParHint::default(), Some(10)),
            Err(Error::BudgetExceeded { .. })
        ));
        let big = IdealiserBudget { max_n: 4, max_q: 4 };
        assert!(idealiser_dims(&ctx, &iset, big).is_err());
    }
}
