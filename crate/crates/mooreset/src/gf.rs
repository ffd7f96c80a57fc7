//! Arithmetic in the small coefficient field F_q = F_p^e, table backed.
//!
//! Elements are coded as integers in [0, q): the element sum c_j y^j (y the
//! class of the base modulus variable) has code sum c_j p^j. Dense univariate
//! polynomial helpers over any such field live here too; they drive modulus
//! selection and irreducibility checks for both levels of the tower.

use crate::error::{Error, Result};

/// Field operations on u8-coded elements. Zero codes to 0 and one to 1.
pub trait Fld {
    fn q(&self) -> u64;
    fn add(&self, a: u8, b: u8) -> u8;
    fn neg(&self, a: u8) -> u8;
    fn mul(&self, a: u8, b: u8) -> u8;
    fn inv(&self, a: u8) -> Result<u8>;

    fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }
}

/// The prime field F_p with plain modular arithmetic.
pub struct PrimeOps {
    p: u64,
}

impl PrimeOps {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if p > 251 {
            return Err(Error::InvalidParameter(format!(
                "characteristic {p} exceeds the supported bound 251"
            )));
        }
        Ok(PrimeOps { p })
    }
}

impl Fld for PrimeOps {
    fn q(&self) -> u64 {
        self.p
    }
    fn add(&self, a: u8, b: u8) -> u8 {
        ((a as u64 + b as u64) % self.p) as u8
    }
    fn neg(&self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            (self.p - a as u64) as u8
        }
    }
    fn mul(&self, a: u8, b: u8) -> u8 {
        ((a as u64 * b as u64) % self.p) as u8
    }
    fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        // p is tiny; Fermat via square-and-multiply.
        let mut acc = 1u64;
        let mut base = a as u64 % self.p;
        let mut exp = self.p - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        Ok(acc as u8)
    }
}

/// Trial-division primality; arguments are desk scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// F_q = F_p^e with full add/mul/inv tables.
pub struct SmallField {
    p: u64,
    e: u32,
    q: u64,
    /// Monic irreducible of degree e over F_p, constant term first,
    /// length e+1 (leading coefficient 1). For e = 1 this is X itself.
    base_modulus: Vec<u8>,
    add_t: Vec<u8>,
    mul_t: Vec<u8>,
    inv_t: Vec<u8>,
    neg_t: Vec<u8>,
}

impl SmallField {
    /// Builds F_p^e. Without an override the modulus is the lexicographically
    /// least monic irreducible (coefficients compared from the constant term
    /// upward), so the representation is reproducible across runs.
    pub fn new(p: u64, e: u32, modulus_override: Option<&[u64]>) -> Result<SmallField> {
        let prime = PrimeOps::new(p)?;
        if e == 0 {
            return Err(Error::InvalidParameter("extension degree e must be >= 1".into()));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= 256)
            .ok_or_else(|| Error::InvalidParameter(format!("q = {p}^{e} exceeds the supported bound 256")))?;

        let base_modulus = match modulus_override {
            Some(coeffs) => {
                let m = validate_modulus(&prime, coeffs, e)?;
                m
            }
            None => lex_least_irreducible(&prime, e),
        };

        let qs = q as usize;
        let mut fld = SmallField {
            p,
            e,
            q,
            base_modulus,
            add_t: vec![0; qs * qs],
            mul_t: vec![0; qs * qs],
            inv_t: vec![0; qs],
            neg_t: vec![0; qs],
        };
        fld.fill_tables(&prime);
        Ok(fld)
    }

    fn fill_tables(&mut self, prime: &PrimeOps) {
        let qs = self.q as usize;
        let decode = |code: u64| -> Vec<u8> {
            let mut c = code;
            (0..self.e)
                .map(|_| {
                    let d = (c % self.p) as u8;
                    c /= self.p;
                    d
                })
                .collect()
        };
        let encode = |digits: &[u8]| -> u64 {
            digits.iter().rev().fold(0u64, |acc, &d| acc * self.p + d as u64)
        };
        for a in 0..self.q {
            let da = decode(a);
            for b in 0..self.q {
                let db = decode(b);
                let sum: Vec<u8> = da.iter().zip(&db).map(|(&x, &y)| prime.add(x, y)).collect();
                self.add_t[(a as usize) * qs + b as usize] = encode(&sum) as u8;
                let prod = poly_mulmod(prime, &da, &db, &self.base_modulus);
                let mut padded = prod;
                padded.resize(self.e as usize, 0);
                self.mul_t[(a as usize) * qs + b as usize] = encode(&padded) as u8;
            }
            let neg: Vec<u8> = da.iter().map(|&x| prime.neg(x)).collect();
            self.neg_t[a as usize] = encode(&neg) as u8;
        }
        for a in 1..self.q {
            for b in 1..self.q {
                if self.mul_t[(a as usize) * qs + b as usize] == 1 {
                    self.inv_t[a as usize] = b as u8;
                    break;
                }
            }
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    /// Modulus coefficients constant-first, including the leading 1.
    pub fn base_modulus(&self) -> &[u8] {
        &self.base_modulus
    }

    /// F_p digits of an element code, constant term first, length e.
    pub fn to_prime_digits(&self, a: u8) -> Vec<u8> {
        let mut c = a as u64;
        (0..self.e)
            .map(|_| {
                let d = (c % self.p) as u8;
                c /= self.p;
                d
            })
            .collect()
    }
}

impl Fld for SmallField {
    fn q(&self) -> u64 {
        self.q
    }
    fn add(&self, a: u8, b: u8) -> u8 {
        self.add_t[(a as usize) * self.q as usize + b as usize]
    }
    fn neg(&self, a: u8) -> u8 {
        self.neg_t[a as usize]
    }
    fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul_t[(a as usize) * self.q as usize + b as usize]
    }
    fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_t[a as usize])
    }
}

// ---------------------------------------------------------------------------
// Dense univariate polynomials over an Fld, coefficients constant-first.
// The zero polynomial is the empty vector.
// ---------------------------------------------------------------------------

pub fn poly_trim(c: &mut Vec<u8>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

pub fn poly_mul<F: Fld + ?Sized>(f: &F, a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of a modulo the monic m (constant-first, leading coeff 1).
pub fn poly_rem<F: Fld + ?Sized>(f: &F, a: &[u8], m: &[u8]) -> Vec<u8> {
    debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let deg_m = m.len() - 1;
    let mut r = a.to_vec();
    poly_trim(&mut r);
    while r.len() > deg_m {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - deg_m;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = f.sub(r[idx], f.mul(lead, mc));
            }
        }
        r.pop();
        poly_trim(&mut r);
    }
    r
}

pub fn poly_mulmod<F: Fld + ?Sized>(f: &F, a: &[u8], b: &[u8], m: &[u8]) -> Vec<u8> {
    poly_rem(f, &poly_mul(f, a, b), m)
}

/// a^q mod m by square-and-multiply on the exponent q.
pub fn poly_pow_q<F: Fld + ?Sized>(f: &F, a: &[u8], m: &[u8]) -> Vec<u8> {
    let mut acc = vec![1u8];
    let mut base = a.to_vec();
    let mut exp = f.q();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mulmod(f, &acc, &base, m);
        }
        base = poly_mulmod(f, &base, &base, m);
        exp >>= 1;
    }
    acc
}

pub fn poly_gcd<F: Fld + ?Sized>(f: &F, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        // Make y monic so poly_rem applies.
        let lead_inv = f.inv(*y.last().unwrap()).expect("nonzero lead");
        let monic: Vec<u8> = y.iter().map(|&c| f.mul(c, lead_inv)).collect();
        let r = poly_rem(f, &x, &monic);
        x = monic;
        y = r;
    }
    x
}

/// Irreducibility of a monic polynomial of degree >= 1 over F_q: requires
/// X^{q^m} = X mod f together with gcd(X^{q^{m/r}} - X, f) = 1 for every
/// prime r dividing m. The Frobenius powers are built by iterating the
/// q-th power map, so no large exponents ever appear.
pub fn is_irreducible<F: Fld + ?Sized>(f: &F, m: &[u8]) -> bool {
    let deg = m.len() - 1;
    if deg == 0 {
        return false;
    }
    if *m.last().unwrap() != 1 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    let x = vec![0u8, 1];
    // frob[d] = X^{q^d} mod m for d = 1..deg
    let mut t = x.clone();
    let mut frob = Vec::with_capacity(deg);
    for _ in 0..deg {
        t = poly_pow_q(f, &t, m);
        frob.push(t.clone());
    }
    // X^{q^deg} must reduce to X.
    if frob[deg - 1] != x {
        return false;
    }
    for r in prime_factors(deg as u64) {
        let d = deg / r as usize;
        let mut diff = frob[d - 1].clone();
        // diff -= X
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = f.sub(diff[1], 1);
        poly_trim(&mut diff);
        let g = poly_gcd(f, &diff, m);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The lexicographically least monic irreducible of degree m, comparing
/// coefficient vectors from the constant term upward.
pub fn lex_least_irreducible<F: Fld + ?Sized>(f: &F, m: u32) -> Vec<u8> {
    let q = f.q();
    let deg = m as usize;
    let total = q.checked_pow(m).expect("coefficient space fits u64");
    for t in 0..total {
        // The constant term is the most significant search digit.
        let mut coeffs = vec![0u8; deg + 1];
        coeffs[deg] = 1;
        let mut rest = t;
        for i in (0..deg).rev() {
            coeffs[i] = (rest % q) as u8;
            rest /= q;
        }
        if is_irreducible(f, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("an irreducible of every degree exists over a finite field")
}

/// Validates an override modulus: length e+1, monic, irreducible.
pub fn validate_modulus<F: Fld + ?Sized>(f: &F, coeffs: &[u64], deg: u32) -> Result<Vec<u8>> {
    if coeffs.len() != deg as usize + 1 {
        return Err(Error::BadModulus(format!(
            "expected {} coefficients (degree {deg}, constant first), got {}",
            deg + 1,
            coeffs.len()
        )));
    }
    let q = f.q();
    let m: Vec<u8> = coeffs
        .iter()
        .map(|&c| {
            if c < q {
                Ok(c as u8)
            } else {
                Err(Error::BadModulus(format!("coefficient {c} out of range for q = {q}")))
            }
        })
        .collect::<Result<_>>()?;
    if *m.last().unwrap() != 1 {
        return Err(Error::BadModulus("modulus must be monic".into()));
    }
    if !is_irreducible(f, &m) {
        return Err(Error::BadModulus("modulus is reducible".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_ops() {
        let f = PrimeOps::new(7).unwrap();
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.mul(5, 4), 6);
        assert_eq!(f.inv(3).unwrap(), 5);
        assert!(PrimeOps::new(6).is_err());
        assert!(PrimeOps::new(1).is_err());
    }

    #[test]
    fn f4_tables() {
        let f = SmallField::new(2, 2, None).unwrap();
        // Lex-least irreducible quadratic over F_2 is x^2 + x + 1.
        assert_eq!(f.base_modulus(), &[1, 1, 1]);
        let w = 2u8; // the class of x
        assert_eq!(f.mul(w, w), f.add(w, 1)); // w^2 = w + 1
        assert_eq!(f.mul(w, f.inv(w).unwrap()), 1);
        // w^2 + w + 1 = 0
        assert_eq!(f.add(f.mul(w, w), f.add(w, 1)), 0);
    }

    #[test]
    fn f9_tables() {
        let f = SmallField::new(3, 2, None).unwrap();
        // x^2 + 1 is the lex-least irreducible quadratic over F_3.
        assert_eq!(f.base_modulus(), &[1, 0, 1]);
        for a in 1..9u8 {
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv), 1);
        }
    }

    #[test]
    fn irreducibility_matches_gcd_oracle() {
        // Oracle: f of degree m over F_q is irreducible iff it divides
        // X^{q^m} - X and gcd(f, X^{q^d} - X) = 1 for all proper divisors d.
        let f2 = PrimeOps::new(2).unwrap();
        let all_deg4: Vec<Vec<u8>> = (0..16u8)
            .map(|t| vec![t & 1, (t >> 1) & 1, (t >> 2) & 1, (t >> 3) & 1, 1])
            .collect();
        let mut count = 0;
        for m in &all_deg4 {
            let fast = is_irreducible(&f2, m);
            let slow = {
                let x = vec![0u8, 1];
                let mut frob = x.clone();
                let mut divides = false;
                let mut coprime_proper = true;
                for d in 1..=4usize {
                    frob = poly_pow_q(&f2, &frob, m);
                    let mut diff = frob.clone();
                    while diff.len() < 2 {
                        diff.push(0);
                    }
                    diff[1] = f2.sub(diff[1], 1);
                    poly_trim(&mut diff);
                    if d == 4 {
                        divides = diff.is_empty();
                    } else if 4 % d == 0 {
                        let g = poly_gcd(&f2, &diff, m);
                        if g.len() != 1 {
                            coprime_proper = false;
                        }
                    }
                }
                divides && coprime_proper
            };
            assert_eq!(fast, slow, "mismatch on {m:?}");
            if fast {
                count += 1;
            }
        }
        // There are exactly 3 monic irreducible quartics over F_2.
        assert_eq!(count, 3);
    }

    #[test]
    fn lex_least_quartic_over_f2() {
        let f2 = PrimeOps::new(2).unwrap();
        // x^4 + 1 = (x+1)^4 is reducible; x^4 + x^3 + 1 is the first
        // irreducible in constant-term-first order.
        assert_eq!(lex_least_irreducible(&f2, 4), vec![1, 0, 0, 1, 1]);
    }

    #[test]
    fn override_validation() {
        let f2 = PrimeOps::new(2).unwrap();
        assert!(validate_modulus(&f2, &[1, 1, 1], 2).is_ok());
        // x^2 + 1 = (x+1)^2 over F_2
        assert!(validate_modulus(&f2, &[1, 0, 1], 2).is_err());
        assert!(validate_modulus(&f2, &[1, 1, 0], 2).is_err()); // not monic
        assert!(validate_modulus(&f2, &[1, 1], 2).is_err()); // wrong length
    }
}
