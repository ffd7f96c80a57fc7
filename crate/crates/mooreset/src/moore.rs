//! Moore matrices, Moore determinants and the decision procedure: is I a
//! Moore exponent set for (q, n)?
//!
//! Two independent engines are kept permanently. The kernel engine walks all
//! (k-1)-dimensional subspaces, expands the Moore determinant along an
//! indeterminate last row into a linearized polynomial and tests that its
//! kernel is no larger than the pencil itself. The determinant engine walks
//! all k-dimensional subspaces and evaluates the determinant directly; it is
//! the oracle the kernel engine is cross-validated against.

use crate::error::{Error, Result};
use crate::field::{FFElem, FieldCtx};
use crate::gf::Fld;
use crate::linalg::{det_ffelem, fq_rank, FqMatrix, SubspaceEnum};
use crate::par::{find_first, ParHint};

const MAX_K: usize = 8;

/// A normalized exponent set: strictly increasing values in [0, n).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct ExponentSet {
    n: u32,
    exps: Vec<u32>,
}

impl ExponentSet {
    /// Accepts an already-normalized list (strictly increasing, inside [0,n)).
    pub fn new(exps: Vec<u32>, n: u32) -> Result<ExponentSet> {
        if exps.is_empty() {
            return Err(Error::BadExponentSet("empty exponent list".into()));
        }
        if exps.len() > n as usize {
            return Err(Error::BadExponentSet(format!("k = {} exceeds n = {n}", exps.len())));
        }
        if !exps.windows(2).all(|w| w[0] < w[1]) || *exps.last().unwrap() >= n {
            return Err(Error::BadExponentSet(
                "exponents must be strictly increasing in [0, n)".into(),
            ));
        }
        Ok(ExponentSet { n, exps })
    }

    pub fn k(&self) -> usize {
        self.exps.len()
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    /// (I + s) mod n, sorted.
    pub fn shift(&self, s: u32) -> ExponentSet {
        let mut exps: Vec<u32> = self.exps.iter().map(|&x| (x + s) % self.n).collect();
        exps.sort_unstable();
        ExponentSet { n: self.n, exps }
    }

    /// The lexicographically least among the n shifts mod n.
    pub fn canonical_shift(&self) -> ExponentSet {
        (0..self.n).map(|s| self.shift(s)).min_by(|a, b| a.exps.cmp(&b.exps)).unwrap()
    }
}

impl std::fmt::Display for ExponentSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.exps.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Result of normalization: the min-0 representative together with the
/// canonical shift-class representative.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub set: ExponentSet,
    pub canonical: ExponentSet,
}

/// Reduces mod n, sorts, rejects duplicates, shifts the minimum to 0.
/// Shifting is harmless: I is Moore exactly when I + s is.
pub fn normalize(raw: &[u64], n: u32) -> Result<Normalized> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if raw.is_empty() {
        return Err(Error::BadExponentSet("empty exponent list".into()));
    }
    let mut exps: Vec<u32> = raw.iter().map(|&x| (x % n as u64) as u32).collect();
    exps.sort_unstable();
    for w in exps.windows(2) {
        if w[0] == w[1] {
            return Err(Error::BadExponentSet(format!("duplicate exponent {} mod {n}", w[0])));
        }
    }
    let min = exps[0];
    for x in &mut exps {
        *x -= min;
    }
    let set = ExponentSet::new(exps, n)?;
    let canonical = set.canonical_shift();
    Ok(Normalized { set, canonical })
}

/// The k-by-k matrix with entry (i, j) = A_i^{q^{i_j}}.
pub fn moore_matrix(ctx: &FieldCtx, a: &[FFElem], iset: &ExponentSet) -> Result<Vec<Vec<FFElem>>> {
    if a.len() != iset.k() {
        return Err(Error::DimensionMismatch(format!(
            "tuple length {} does not match k = {}",
            a.len(),
            iset.k()
        )));
    }
    Ok(a.iter()
        .map(|&x| iset.exps().iter().map(|&j| ctx.frobenius(x, j)).collect())
        .collect())
}

pub fn moore_det(ctx: &FieldCtx, a: &[FFElem], iset: &ExponentSet) -> Result<FFElem> {
    det_ffelem(ctx, &moore_matrix(ctx, a, iset)?)
}

/// The classical product formula for I = {0, 1, ..., k-1}:
/// det(M_A) = prod over direction vectors c of (c_0 A_0 + ... + c_{k-1} A_{k-1}),
/// one representative per point of PG(k-1, q), normalized so the last nonzero
/// coordinate is 1 (the normalization that makes the identity exact, not just
/// up to scalar).
pub fn moore_det_product(ctx: &FieldCtx, a: &[FFElem]) -> FFElem {
    let q = ctx.q();
    let mut prod = ctx.one();
    for j in 0..a.len() {
        // c_j = 1, coordinates below j arbitrary, above j zero.
        let combos = q.pow(j as u32);
        for t in 0..combos {
            let mut form = a[j];
            let mut rest = t;
            for &am in a.iter().take(j) {
                let d = (rest % q) as u8;
                rest /= q;
                if d != 0 {
                    form = ctx.add(form, ctx.mul(ctx.embed_base(d), am));
                }
            }
            prod = ctx.mul(prod, form);
        }
    }
    prod
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Method {
    Kernel,
    Det,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Kernel => "kernel",
            Method::Det => "det",
        }
    }
}

/// A non-Moore certificate: an F_q-independent tuple with vanishing Moore
/// determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub tuple: Vec<FFElem>,
}

impl Witness {
    /// Re-checks both certificate conditions through the direct code paths.
    pub fn verify(&self, ctx: &FieldCtx, iset: &ExponentSet) -> bool {
        fq_rank(ctx, &self.tuple) == iset.k()
            && moore_det(ctx, &self.tuple, iset).map(|d| d.is_zero()).unwrap_or(false)
    }
}

#[derive(Clone, Debug)]
pub struct MooreVerdict {
    pub is_moore: bool,
    pub witness: Option<Witness>,
    pub method: Method,
    /// Subspaces examined up to the verdict point in canonical order; this is
    /// independent of the worker count.
    pub work: u64,
}

fn budget_check(en: &SubspaceEnum, budget: Option<u64>) -> Result<u64> {
    let total = en.total_u64();
    match (total, budget) {
        (Some(t), Some(b)) if t <= b => Ok(t),
        (Some(t), None) => Ok(t),
        _ => Err(Error::BudgetExceeded {
            needed: en.total().to_string(),
            budget: budget.map_or_else(|| "u64 range".into(), |b| b.to_string()),
        }),
    }
}

/// Writes the RREF rows of the index-th subspace directly as element codes.
fn rows_at(en: &SubspaceEnum, _ctx: &FieldCtx, index: u128, out: &mut [u64]) {
    en.rows_codes_at(index, out);
}

/// Determinant of the dim-by-dim top-left block, destroying the buffer.
fn det_small(ctx: &FieldCtx, a: &mut [[FFElem; MAX_K]; MAX_K], dim: usize) -> FFElem {
    let mut det = ctx.one();
    for col in 0..dim {
        let Some(sel) = (col..dim).find(|&r| !a[r][col].is_zero()) else {
            return ctx.zero();
        };
        if sel != col {
            a.swap(sel, col);
            det = ctx.neg(det);
        }
        let pivot = a[col][col];
        det = ctx.mul(det, pivot);
        let inv = ctx.inv(pivot).expect("pivot nonzero");
        for r in col + 1..dim {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = ctx.mul(a[r][col], inv);
            for c in col..dim {
                a[r][c] = ctx.sub(a[r][c], ctx.mul(factor, a[col][c]));
            }
        }
    }
    det
}

/// Rank over F_q of the expansions of the given elements.
fn rank_of_codes(ctx: &FieldCtx, cols: &[FFElem]) -> usize {
    if ctx.q() == 2 {
        let mut basis = [0u64; 64];
        let mut rank = 0;
        for &x in cols {
            let mut v = x.code();
            while v != 0 {
                let h = 63 - v.leading_zeros() as usize;
                if basis[h] == 0 {
                    basis[h] = v;
                    rank += 1;
                    break;
                }
                v ^= basis[h];
            }
        }
        return rank;
    }
    let n = ctx.n() as usize;
    let q = ctx.q();
    let f = ctx.base();
    let mut rows = [[0u8; 64]; 64];
    let mut piv = [usize::MAX; 64];
    let mut rank = 0;
    for &x in cols {
        let mut d = [0u8; 64];
        let mut code = x.code();
        for slot in d.iter_mut().take(n) {
            *slot = (code % q) as u8;
            code /= q;
        }
        for r in 0..rank {
            let lead = d[piv[r]];
            if lead != 0 {
                for c in 0..n {
                    d[c] = f.sub(d[c], f.mul(lead, rows[r][c]));
                }
            }
        }
        if let Some(pc) = (0..n).find(|&c| d[c] != 0) {
            let inv = f.inv(d[pc]).expect("nonzero lead");
            for c in 0..n {
                rows[rank][c] = f.mul(d[c], inv);
            }
            piv[rank] = pc;
            rank += 1;
        }
    }
    rank
}

/// Coefficients of the pencil polynomial g_B(Y): expanding the k-by-k Moore
/// determinant with last row Y along that row gives
/// g_B(Y) = sum_j (-1)^{(k-1)+j} minor_j Y^{q^{i_j}}.
fn pencil_coeffs(
    ctx: &FieldCtx,
    rows: &[u64],
    exps: &[u32],
    out: &mut [FFElem; MAX_K],
) -> bool {
    let k = exps.len();
    let mut frob = [[FFElem::ZERO; MAX_K]; MAX_K];
    for (r, &code) in rows.iter().enumerate() {
        let x = ctx.elem_from_code_unchecked(code);
        for (c, &j) in exps.iter().enumerate() {
            frob[r][c] = ctx.frobenius(x, j);
        }
    }
    let mut any_nonzero = false;
    let mut buf = [[FFElem::ZERO; MAX_K]; MAX_K];
    for del in 0..k {
        for r in 0..k - 1 {
            let mut cc = 0;
            for c in 0..k {
                if c == del {
                    continue;
                }
                buf[r][cc] = frob[r][c];
                cc += 1;
            }
        }
        let minor = det_small(ctx, &mut buf, k - 1);
        let signed = if (k - 1 + del) % 2 == 1 { ctx.neg(minor) } else { minor };
        out[del] = signed;
        any_nonzero |= !signed.is_zero();
    }
    any_nonzero
}

/// The kernel engine. For each canonical (k-1)-subspace B, I passes at B
/// exactly when g_B is nonzero and ker(g_B) is just span(B).
pub fn moore_check_kernel(
    ctx: &FieldCtx,
    iset: &ExponentSet,
    hint: ParHint,
    budget: Option<u64>,
) -> Result<MooreVerdict> {
    let k = iset.k();
    if k > MAX_K {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds supported bound {MAX_K}")));
    }
    if k == 1 {
        // det(M) = a^{q^{i_0}} vanishes only at a = 0.
        return Ok(MooreVerdict { is_moore: true, witness: None, method: Method::Kernel, work: 0 });
    }
    let n = ctx.n();
    let en = SubspaceEnum::new(ctx.q(), n, (k - 1) as u32)?;
    let total = budget_check(&en, budget)?;
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
    let expect_rank = n as usize - (k - 1);

    let probe = |idx: u64| -> Option<()> {
        let mut rows = [0u64; MAX_K];
        rows_at(&en, ctx, idx as u128, &mut rows[..k - 1]);
        let mut coeffs = [FFElem::ZERO; MAX_K];
        if !pencil_coeffs(ctx, &rows[..k - 1], iset.exps(), &mut coeffs) {
            return Some(()); // g identically zero: every extension vanishes
        }
        let mut cols = [FFElem::ZERO; 64];
        for t in 0..n as usize {
            let mut acc = FFElem::ZERO;
            for (c, &co) in coeffs.iter().enumerate().take(k) {
                if !co.is_zero() {
                    acc = ctx.add(acc, ctx.mul(co, basis_imgs[c][t]));
                }
            }
            cols[t] = acc;
        }
        (rank_of_codes(ctx, &cols[..n as usize]) != expect_rank).then_some(())
    };

    match find_first(total, hint, probe) {
        None => Ok(MooreVerdict { is_moore: true, witness: None, method: Method::Kernel, work: total }),
        Some((idx, ())) => {
            let witness = kernel_witness(ctx, iset, &en, idx as u128)?;
            debug_assert!(witness.verify(ctx, iset));
            Ok(MooreVerdict {
                is_moore: false,
                witness: Some(witness),
                method: Method::Kernel,
                work: idx + 1,
            })
        }
    }
}

/// Rebuilds the witness at a failing pencil: the pencil basis extended by the
/// lexicographically least kernel vector outside its span (coefficient
/// vectors compared constant term first).
fn kernel_witness(
    ctx: &FieldCtx,
    iset: &ExponentSet,
    en: &SubspaceEnum,
    idx: u128,
) -> Result<Witness> {
    let k = iset.k();
    let n = ctx.n() as usize;
    let basis = en.basis_at(ctx, idx);
    let mut rows = [0u64; MAX_K];
    for (r, v) in basis.vectors.iter().enumerate() {
        rows[r] = v.code();
    }
    let mut coeffs = [FFElem::ZERO; MAX_K];
    let degenerate = !pencil_coeffs(ctx, &rows[..k - 1], iset.exps(), &mut coeffs);

    // Kernel of y -> g_B(y) as an F_q matrix (everything if g_B = 0).
    let kernel = if degenerate {
        FqMatrix::identity(n)
    } else {
        let mut m = FqMatrix::zero(n, n);
        for t in 0..n {
            let e_t = ctx.elem_from_code_unchecked(ctx.q().pow(t as u32));
            let mut acc = FFElem::ZERO;
            for (c, &j) in iset.exps().iter().enumerate() {
                if !coeffs[c].is_zero() {
                    acc = ctx.add(acc, ctx.mul(coeffs[c], ctx.frobenius(e_t, j)));
                }
            }
            for (r, &d) in ctx.expand(acc).iter().enumerate() {
                m.set(r, t, d);
            }
        }
        m.kernel(ctx.base())
    };

    let dim = kernel.rows();
    let combos = (ctx.q() as u128).checked_pow(dim as u32);
    let in_span = |y: FFElem| -> bool {
        let mut all = basis.vectors.clone();
        all.push(y);
        fq_rank(ctx, &all) < k
    };
    let y = match combos {
        Some(c) if c <= 1 << 22 => {
            let mut best: Option<(Vec<u8>, FFElem)> = None;
            for t in 0..c {
                let mut acc = ctx.zero();
                let mut rest = t;
                for r in 0..dim {
                    let d = (rest % ctx.q() as u128) as u8;
                    rest /= ctx.q() as u128;
                    if d != 0 {
                        let v = ctx.from_coeffs(kernel.row(r))?;
                        acc = ctx.add(acc, ctx.mul(ctx.embed_base(d), v));
                    }
                }
                if acc.is_zero() || in_span(acc) {
                    continue;
                }
                let key = ctx.expand(acc);
                if best.as_ref().is_none_or(|(b, _)| key < *b) {
                    best = Some((key, acc));
                }
            }
            best.map(|(_, y)| y)
        }
        // Kernel too large to enumerate: take the first basis row outside
        // the span. Deterministic, though not digit-lex minimal.
        _ => (0..dim)
            .map(|r| ctx.from_coeffs(kernel.row(r)).expect("kernel row"))
            .find(|&y| !in_span(y)),
    };
    let y = y.ok_or_else(|| {
        Error::Precondition("kernel did not exceed the pencil span at a failing index".into())
    })?;
    let mut tuple = basis.vectors;
    tuple.push(y);
    Ok(Witness { tuple })
}

/// The determinant engine: canonical k-subspaces, direct Moore determinants.
/// Dependent tuples are skipped by construction since det vanishes on them
/// identically (checked separately as a sampled property).
pub fn moore_check_det(
    ctx: &FieldCtx,
    iset: &ExponentSet,
    hint: ParHint,
    budget: Option<u64>,
) -> Result<MooreVerdict> {
    let k = iset.k();
    if k > MAX_K {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds supported bound {MAX_K}")));
    }
    let en = SubspaceEnum::new(ctx.q(), ctx.n(), k as u32)?;
    let total = budget_check(&en, budget)?;
    for &j in iset.exps() {
        ctx.prewarm_frobenius(j);
    }

    let probe = |idx: u64| -> Option<()> {
        let mut rows = [0u64; MAX_K];
        rows_at(&en, ctx, idx as u128, &mut rows[..k]);
        let mut m = [[FFElem::ZERO; MAX_K]; MAX_K];
        for r in 0..k {
            let x = ctx.elem_from_code_unchecked(rows[r]);
            for (c, &j) in iset.exps().iter().enumerate() {
                m[r][c] = ctx.frobenius(x, j);
            }
        }
        det_small(ctx, &mut m, k).is_zero().then_some(())
    };

    match find_first(total, hint, probe) {
        None => Ok(MooreVerdict { is_moore: true, witness: None, method: Method::Det, work: total }),
        Some((idx, ())) => {
            let witness = Witness { tuple: en.basis_at(ctx, idx as u128).vectors };
            debug_assert!(witness.verify(ctx, iset));
            Ok(MooreVerdict {
                is_moore: false,
                witness: Some(witness),
                method: Method::Det,
                work: idx + 1,
            })
        }
    }
}

pub fn moore_check(
    ctx: &FieldCtx,
    iset: &ExponentSet,
    method: Method,
    hint: ParHint,
    budget: Option<u64>,
) -> Result<MooreVerdict> {
    match method {
        Method::Kernel => moore_check_kernel(ctx, iset, hint, budget),
        Method::Det => moore_check_det(ctx, iset, hint, budget),
    }
}

/// One entry of a shift-class search.
#[derive(Clone, Debug)]
pub struct SearchEntry {
    pub class_rep: ExponentSet,
    pub verdict: MooreVerdict,
}

/// Enumerates all size-k subsets of [0, n) containing 0, groups them into
/// shift classes mod n and decides one canonical representative per class.
pub fn search_moore_sets(
    ctx: &FieldCtx,
    k: u32,
    method: Method,
    hint: ParHint,
    budget: Option<u64>,
) -> Result<Vec<SearchEntry>> {
    let n = ctx.n();
    if k < 1 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} out of range for n = {n}")));
    }
    let mut out = Vec::new();
    let mut comb: Vec<u32> = (0..k - 1).map(|i| i + 1).collect();
    loop {
        let mut exps = vec![0u32];
        exps.extend(&comb);
        let set = ExponentSet::new(exps, n)?;
        if set.canonical_shift() == set {
            let verdict = moore_check(ctx, &set, method, hint, budget)?;
            out.push(SearchEntry { class_rep: set, verdict });
        }
        if comb.is_empty() || !next_comb_from_one(&mut comb, n) {
            break;
        }
    }
    Ok(out)
}

/// Advances a sorted combination drawn from [1, n); false when exhausted.
fn next_comb_from_one(comb: &mut [u32], n: u32) -> bool {
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
