//! Arithmetic in `F_q = F_p[y]/(m(y))`.
//!
//! Field elements are `u32` indices: the element `Σ d_i y^i` (digits `d_i ∈ [0, p)`,
//! little-endian in the power basis) has index `Σ d_i p^i`. Addition is digitwise
//! mod `p`, multiplication is schoolbook polynomial product followed by reduction
//! modulo the monic modulus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted (irreducibility is checked exhaustively).
pub const MAX_FIELD_ORDER: u64 = 10_000;

/// Multiplication tables are cached up to this order.
const MUL_TABLE_MAX_Q: u32 = 729;

/// Built-in irreducible monic moduli, little-endian coefficients.
const BUILTIN_MODULI: &[(u32, &[u32])] = &[
    (3, &[0, 1]),
    (3, &[1, 0, 1]),    // y^2 + 1
    (3, &[1, 2, 0, 1]), // y^3 + 2y + 1
    (5, &[0, 1]),
    (5, &[2, 0, 1]),    // y^2 + 2
    (5, &[1, 1, 0, 1]), // y^3 + y + 1
    (7, &[0, 1]),
    (7, &[1, 0, 1]),    // y^2 + 1
    (7, &[2, 0, 0, 1]), // y^3 + 2
];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "FieldSpec", into = "FieldSpec")]
pub struct FieldCtx {
    p: u32,
    r: usize,
    modulus: Vec<u32>,
    q: u32,
    trace: Vec<u32>,
    mul_table: Option<Vec<u32>>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FieldSpec {
    p: u32,
    modulus: Vec<u32>,
}

impl TryFrom<FieldSpec> for FieldCtx {
    type Error = Error;
    fn try_from(spec: FieldSpec) -> Result<Self> {
        FieldCtx::new(spec.p, spec.modulus)
    }
}

impl From<FieldCtx> for FieldSpec {
    fn from(f: FieldCtx) -> Self {
        FieldSpec { p: f.p, modulus: f.modulus }
    }
}

impl FieldCtx {
    /// Builds `F_p[y]/(modulus)`, rejecting non-prime `p`, non-monic or reducible moduli.
    pub fn new(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::usage(format!("field characteristic {p} is not prime")));
        }
        if modulus.len() < 2 {
            return Err(Error::usage("modulus must have degree at least 1"));
        }
        let r = modulus.len() - 1;
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::usage(format!("modulus coefficients must lie in [0, {p})")));
        }
        if modulus[r] != 1 {
            return Err(Error::usage("modulus must be monic"));
        }
        let q = (p as u64)
            .checked_pow(r as u32)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or_else(|| Error::usage(format!("field order {p}^{r} exceeds {MAX_FIELD_ORDER}")))?
            as u32;
        if !is_irreducible(p, &modulus) {
            return Err(Error::usage(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        let mut ctx = FieldCtx { p, r, modulus, q, trace: Vec::new(), mul_table: None };
        if q <= MUL_TABLE_MAX_Q {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in a..q {
                    let c = ctx.mul_slow(a, b);
                    table[(a * q + b) as usize] = c;
                    table[(b * q + a) as usize] = c;
                }
            }
            ctx.mul_table = Some(table);
        }
        ctx.trace = (0..q).map(|a| ctx.trace_slow(a)).collect();
        Ok(ctx)
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, vec![0, 1])
    }

    /// `F_{p^r}` from the built-in modulus table (`p ∈ {3,5,7}`, `r ∈ {1,2,3}`).
    pub fn builtin(p: u32, r: usize) -> Result<Self> {
        BUILTIN_MODULI
            .iter()
            .find(|(bp, m)| *bp == p && m.len() == r + 1)
            .map(|(_, m)| Self::new(p, m.to_vec()))
            .unwrap_or_else(|| {
                Err(Error::usage(format!(
                    "no built-in modulus for p={p}, r={r}; supply one explicitly"
                )))
            })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn digits(&self, a: u32) -> Vec<u32> {
        let mut a = a;
        (0..self.r)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    /// Embeds an integer as an element of the prime subfield.
    pub fn from_int(&self, k: i64) -> u32 {
        k.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.r {
            out += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = self.p;
        let mut a = a;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.r {
            out += ((p - a % p) % p) * scale;
            a /= p;
            scale *= p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul_table {
            Some(t) => t[(a * self.q + b) as usize],
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * self.r - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for deg in (self.r..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &m) in self.modulus[..self.r].iter().enumerate() {
                let idx = deg - self.r + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let digits: Vec<u32> = prod[..self.r].iter().map(|&d| d as u32).collect();
        self.from_digits(&digits)
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1 % self.q.max(2);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.pow(a, self.q as u64 - 2))
    }

    /// Absolute trace `Tr_{F_q/F_p}(a) = Σ_{j<r} a^{p^j}`, as an element of `[0, p)`.
    pub fn trace(&self, a: u32) -> u32 {
        self.trace[a as usize]
    }

    fn trace_slow(&self, a: u32) -> u32 {
        let mut acc = 0;
        let mut frob = a;
        for _ in 0..self.r {
            acc = self.add(acc, frob);
            frob = self.pow(frob, self.p as u64);
        }
        debug_assert!(acc < self.p, "trace must land in the prime field");
        acc
    }
}

/// Remainder of `f` modulo the monic polynomial `g` over `F_p`.
fn poly_rem(p: u32, f: &[u32], g: &[u32]) -> Vec<u32> {
    let p = p as u64;
    let mut rem: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let lead = rem.pop().unwrap();
        if lead != 0 {
            let base = rem.len() - dg;
            for (i, &c) in g[..dg].iter().enumerate() {
                rem[base + i] = (rem[base + i] + (p - lead) * c as u64 % p) % p;
            }
        }
    }
    rem.into_iter().map(|c| c as u32).collect()
}

/// Exhaustive factor search over monic polynomials of degree `1..=deg/2`.
pub fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let r = modulus.len() - 1;
    for d in 1..=r / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                g.push((c % p as u64) as u32);
                c /= p as u64;
            }
            g.push(1);
            if poly_rem(p, modulus, &g).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> FieldCtx {
        FieldCtx::new(3, vec![1, 0, 1]).unwrap()
    }

    #[test]
    fn trace_in_f9() {
        let f = f9();
        // a = 1: Tr = 1 + 1^3 = 2
        assert_eq!(f.trace(1), 2);
        // a = y: y^3 = -y so Tr = y + y^3 = 0
        assert_eq!(f.trace(f.from_digits(&[0, 1])), 0);
        assert_eq!(f.trace(0), 0);
    }

    #[test]
    fn y_squared_reduces_to_two() {
        let f = f9();
        let y = f.from_digits(&[0, 1]);
        assert_eq!(f.mul(y, y), 2);
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for &(p, m) in BUILTIN_MODULI {
            assert!(is_irreducible(p, m), "{p} {m:?}");
            FieldCtx::builtin(p, m.len() - 1).unwrap();
        }
    }

    #[test]
    fn rejects_reducible_and_bad_input() {
        // y^2 + 2 = (y+1)(y+2) over F_3
        assert!(FieldCtx::new(3, vec![2, 0, 1]).is_err());
        // (y^2+1)^2 over F_3 has no roots but is reducible
        assert!(FieldCtx::new(3, vec![1, 0, 2, 0, 1]).is_err());
        assert!(FieldCtx::new(4, vec![0, 1]).is_err());
        assert!(FieldCtx::new(3, vec![1, 0, 2]).is_err());
        assert!(FieldCtx::new(7, vec![1, 0, 0, 0, 0, 1]).is_err());
    }

    #[test]
    fn degree_four_modulus_accepted() {
        // y^4 + y + 2 is irreducible over F_3
        let f = FieldCtx::new(3, vec![2, 1, 0, 0, 1]).unwrap();
        assert_eq!(f.q(), 81);
        for a in 1..f.q() {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn field_axioms_exhaustive_f25() {
        let f = FieldCtx::builtin(5, 2).unwrap();
        for a in 0..f.q() {
            assert_eq!(f.add(a, f.neg(a)), 0);
            for b in 0..f.q() {
                assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % 5);
                for c in [0, 1, 7, 24] {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
        assert!((0..f.q()).any(|a| f.trace(a) != 0));
    }
}
