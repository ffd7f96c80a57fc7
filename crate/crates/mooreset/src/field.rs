//! The tower F_p in F_q in F_{q^n} with fast Frobenius powers.
//!
//! An element of F_{q^n} is a length-n coefficient vector over F_q in the
//! power basis of the extension modulus; it is carried around as the integer
//! code sum c_i q^i. Small fields get multiplicative log/exp tables and
//! per-exponent Frobenius lookup tables; larger fields fall back to generic
//! polynomial arithmetic with the same observable behaviour.

use std::sync::OnceLock;

use num::BigUint;

use crate::error::{Error, Result};
use crate::gf::{self, Fld, SmallField};
use crate::linalg::FqMatrix;

/// Fields up to this order get log/exp and Frobenius tables.
pub const DEFAULT_TABLE_LIMIT: u64 = 1 << 20;

/// An element of F_{q^n}, valid only together with the ctx that made it.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FFElem(u64);

impl FFElem {
    pub const ZERO: FFElem = FFElem(0);
    pub const ONE: FFElem = FFElem(1);

    pub fn code(self) -> u64 {
        self.0
    }
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct FieldTables {
    /// log[code] for nonzero codes; log[0] is unused.
    log: Vec<u32>,
    /// exp[t] = code of g^t for t in [0, q^n - 1).
    exp: Vec<u32>,
    /// Per Frobenius power j in [0, n): code -> code^{q^j}. Filled on first use.
    frob: Vec<OnceLock<Vec<u32>>>,
    generator: u64,
}

/// Immutable description of the tower; safely shareable across threads.
pub struct FieldCtx {
    p: u64,
    e: u32,
    n: u32,
    q: u64,
    size: u64,
    base: SmallField,
    /// Monic irreducible of degree n over F_q, constant term first, length n+1.
    ext_modulus: Vec<u8>,
    frob_matrix: FqMatrix,
    /// Cached matrix powers of the Frobenius, index j in [0, n).
    frob_mats: Vec<OnceLock<FqMatrix>>,
    tables: Option<FieldTables>,
}

pub fn field_create(
    p: u64,
    e: u32,
    n: u32,
    base_override: Option<&[u64]>,
    ext_override: Option<&[u64]>,
) -> Result<FieldCtx> {
    field_create_with_limit(p, e, n, base_override, ext_override, DEFAULT_TABLE_LIMIT)
}

pub fn field_create_with_limit(
    p: u64,
    e: u32,
    n: u32,
    base_override: Option<&[u64]>,
    ext_override: Option<&[u64]>,
    table_limit: u64,
) -> Result<FieldCtx> {
    if n == 0 {
        return Err(Error::InvalidParameter("extension degree n must be >= 1".into()));
    }
    let base = SmallField::new(p, e, base_override)?;
    let q = base.q();
    let size = q
        .checked_pow(n)
        .ok_or_else(|| Error::InvalidParameter(format!("q^n = {q}^{n} does not fit in 64 bits")))?;
    let ext_modulus = match ext_override {
        Some(coeffs) => gf::validate_modulus(&base, coeffs, n)?,
        None => gf::lex_least_irreducible(&base, n),
    };

    let mut ctx = FieldCtx {
        p,
        e,
        n,
        q,
        size,
        base,
        ext_modulus,
        frob_matrix: FqMatrix::zero(0, 0),
        frob_mats: (0..n).map(|_| OnceLock::new()).collect(),
        tables: None,
    };

    // Column i of the Frobenius matrix is the expansion of (x^i)^q.
    let mut fm = FqMatrix::zero(ctx.n as usize, ctx.n as usize);
    for i in 0..ctx.n {
        let basis = FFElem(ctx.q.pow(i));
        let img = ctx.pow_generic(basis, ctx.q as u128);
        let col = ctx.expand(img);
        for (r, &c) in col.iter().enumerate() {
            fm.set(r, i as usize, c);
        }
    }
    ctx.frob_matrix = fm;

    if size <= table_limit {
        ctx.tables = Some(ctx.build_tables());
    }
    Ok(ctx)
}

impl FieldCtx {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// q^n as a machine word.
    pub fn size_u64(&self) -> u64 {
        self.size
    }
    pub fn size(&self) -> BigUint {
        BigUint::from(self.size)
    }
    pub fn base(&self) -> &SmallField {
        &self.base
    }
    pub fn ext_modulus(&self) -> &[u8] {
        &self.ext_modulus
    }
    pub fn frob_matrix(&self) -> &FqMatrix {
        &self.frob_matrix
    }

    pub fn zero(&self) -> FFElem {
        FFElem::ZERO
    }
    pub fn one(&self) -> FFElem {
        FFElem::ONE
    }

    pub fn elem_from_code(&self, code: u64) -> Result<FFElem> {
        if code < self.size {
            Ok(FFElem(code))
        } else {
            Err(Error::InvalidParameter(format!("element code {code} out of range")))
        }
    }

    pub(crate) fn elem_from_code_unchecked(&self, code: u64) -> FFElem {
        debug_assert!(code < self.size);
        FFElem(code)
    }

    /// Forces the Frobenius acceleration structure for exponent j into
    /// existence, so parallel scans never race on first use.
    pub fn prewarm_frobenius(&self, j: u32) {
        if j % self.n == 0 {
            return;
        }
        if self.tables.is_some() {
            let _ = self.frob_table(j);
        } else {
            let _ = self.frob_mat(j);
        }
    }

    /// All q^n elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FFElem> {
        (0..self.size).map(FFElem)
    }

    /// Coordinates in the power basis, F_q codes, constant term first.
    pub fn expand(&self, x: FFElem) -> Vec<u8> {
        let mut code = x.0;
        (0..self.n)
            .map(|_| {
                let d = (code % self.q) as u8;
                code /= self.q;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u8]) -> Result<FFElem> {
        if coeffs.len() != self.n as usize {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                self.n,
                coeffs.len()
            )));
        }
        let mut code = 0u64;
        for &c in coeffs.iter().rev() {
            if (c as u64) >= self.q {
                return Err(Error::InvalidParameter(format!("coordinate {c} out of range")));
            }
            code = code * self.q + c as u64;
        }
        Ok(FFElem(code))
    }

    /// Nested coordinates: per F_q coordinate, its F_p digits constant-first.
    pub fn coeffs_nested(&self, x: FFElem) -> Vec<Vec<u8>> {
        self.expand(x)
            .iter()
            .map(|&c| self.base.to_prime_digits(c))
            .collect()
    }

    /// The base-field constant c as an element of F_{q^n}.
    pub fn embed_base(&self, c: u8) -> FFElem {
        debug_assert!((c as u64) < self.q);
        FFElem(c as u64)
    }

    pub fn add(&self, x: FFElem, y: FFElem) -> FFElem {
        if self.q == 2 {
            return FFElem(x.0 ^ y.0);
        }
        let mut a = x.0;
        let mut b = y.0;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.n {
            let s = self.base.add((a % self.q) as u8, (b % self.q) as u8);
            out += s as u64 * place;
            place = place.wrapping_mul(self.q);
            a /= self.q;
            b /= self.q;
        }
        FFElem(out)
    }

    pub fn neg(&self, x: FFElem) -> FFElem {
        if self.q == 2 {
            return x;
        }
        let mut a = x.0;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.n {
            let s = self.base.neg((a % self.q) as u8);
            out += s as u64 * place;
            place = place.wrapping_mul(self.q);
            a /= self.q;
        }
        FFElem(out)
    }

    pub fn sub(&self, x: FFElem, y: FFElem) -> FFElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FFElem, y: FFElem) -> FFElem {
        if x.0 == 0 || y.0 == 0 {
            return FFElem::ZERO;
        }
        if let Some(t) = &self.tables {
            let ord = self.size - 1;
            let s = (t.log[x.0 as usize] as u64 + t.log[y.0 as usize] as u64) % ord;
            return FFElem(t.exp[s as usize] as u64);
        }
        self.mul_generic(x, y)
    }

    pub fn inv(&self, x: FFElem) -> Result<FFElem> {
        if x.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let ord = self.size - 1;
            let s = (ord - t.log[x.0 as usize] as u64) % ord;
            return Ok(FFElem(t.exp[s as usize] as u64));
        }
        Ok(self.pow_generic(x, (self.size - 2) as u128))
    }

    pub fn div(&self, x: FFElem, y: FFElem) -> Result<FFElem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// x^exp by square-and-multiply (log tables shortcut when available).
    pub fn pow(&self, x: FFElem, exp: u128) -> FFElem {
        if x.0 == 0 {
            return if exp == 0 { FFElem::ONE } else { FFElem::ZERO };
        }
        if let Some(t) = &self.tables {
            let ord = (self.size - 1) as u128;
            let l = t.log[x.0 as usize] as u128;
            let s = (l * (exp % ord)) % ord;
            return FFElem(t.exp[s as usize] as u64);
        }
        self.pow_generic(x, exp)
    }

    fn pow_generic(&self, x: FFElem, mut exp: u128) -> FFElem {
        let mut acc = FFElem::ONE;
        let mut base = x;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_generic_any(acc, base);
            }
            base = self.mul_generic_any(base, base);
            exp >>= 1;
        }
        acc
    }

    fn mul_generic_any(&self, x: FFElem, y: FFElem) -> FFElem {
        if x.0 == 0 || y.0 == 0 {
            return FFElem::ZERO;
        }
        self.mul_generic(x, y)
    }

    /// Schoolbook product of the coefficient vectors, reduced by the modulus.
    fn mul_generic(&self, x: FFElem, y: FFElem) -> FFElem {
        let n = self.n as usize;
        let mut a = [0u8; 64];
        let mut b = [0u8; 64];
        let mut prod = [0u8; 127];
        self.decode_into(x.0, &mut a[..n]);
        self.decode_into(y.0, &mut b[..n]);
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0 {
                    continue;
                }
                prod[i + j] = self.base.add(prod[i + j], self.base.mul(a[i], b[j]));
            }
        }
        // Reduce monomials x^d for d >= n by the monic modulus.
        for d in (n..2 * n - 1).rev() {
            let lead = prod[d];
            if lead == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &mc) in self.ext_modulus[..n].iter().enumerate() {
                let idx = d - n + i;
                prod[idx] = self.base.sub(prod[idx], self.base.mul(lead, mc));
            }
        }
        FFElem(self.encode(&prod[..n]))
    }

    fn decode_into(&self, mut code: u64, out: &mut [u8]) {
        for slot in out.iter_mut() {
            *slot = (code % self.q) as u8;
            code /= self.q;
        }
    }

    fn encode(&self, digits: &[u8]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.q + d as u64)
    }

    /// x^{q^j}; j is reduced mod n since the full Frobenius is the identity.
    pub fn frobenius(&self, x: FFElem, j: u32) -> FFElem {
        let j = j % self.n;
        if j == 0 {
            return x;
        }
        if self.tables.is_some() {
            let t = self.frob_table(j);
            return FFElem(t[x.0 as usize] as u64);
        }
        let m = self.frob_mat(j);
        let col = self.expand(x);
        let img = m.apply(&self.base, &col);
        FFElem(self.encode(&img))
    }

    /// The matrix of x -> x^{q^j} (cached; idempotent concurrent fill).
    pub fn frob_mat(&self, j: u32) -> &FqMatrix {
        let j = (j % self.n) as usize;
        self.frob_mats[j].get_or_init(|| {
            let mut m = FqMatrix::identity(self.n as usize);
            for _ in 0..j {
                m = self.frob_matrix.mul(&self.base, &m);
            }
            m
        })
    }

    fn frob_table(&self, j: u32) -> &[u32] {
        let t = self.tables.as_ref().expect("tables present");
        t.frob[(j % self.n) as usize].get_or_init(|| {
            // Compose the single-step table j times.
            let step = self.frob_one_table();
            let mut out: Vec<u32> = (0..self.size as usize).map(|c| c as u32).collect();
            for _ in 0..(j % self.n) {
                for c in 0..self.size as usize {
                    out[c] = step[out[c] as usize];
                }
            }
            out
        })
    }

    fn frob_one_table(&self) -> Vec<u32> {
        let n = self.n as usize;
        let mut out = vec![0u32; self.size as usize];
        let mut col = vec![0u8; n];
        for code in 0..self.size {
            self.decode_into(code, &mut col);
            let img = self.frob_matrix.apply(&self.base, &col);
            out[code as usize] = self.encode(&img) as u32;
        }
        out
    }

    fn build_tables(&self) -> FieldTables {
        let ord = self.size - 1;
        let factors = gf::prime_factors(ord);
        let generator = (1..self.size)
            .map(FFElem)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_generic(g, (ord / r) as u128) != FFElem::ONE)
            })
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; ord as usize];
        let mut log = vec![0u32; self.size as usize];
        let mut acc = FFElem::ONE;
        for t in 0..ord {
            exp[t as usize] = acc.0 as u32;
            log[acc.0 as usize] = t as u32;
            acc = self.mul_generic_any(acc, generator);
        }
        debug_assert_eq!(acc, FFElem::ONE);
        FieldTables {
            log,
            exp,
            frob: (0..self.n).map(|_| OnceLock::new()).collect(),
            generator: generator.0,
        }
    }

    /// A fixed multiplicative generator when the field is table backed.
    pub fn generator(&self) -> Option<FFElem> {
        self.tables.as_ref().map(|t| FFElem(t.generator))
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// Readable coefficient-vector form `[c0,c1,...]` with F_q codes.
    pub fn elem_string(&self, x: FFElem) -> String {
        let coeffs = self.expand(x);
        let inner: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
        format!("[{}]", inner.join(","))
    }
}
