//! Finite abelian ambient groups: cyclic `Z_M` and vector spaces `F_q^n`.
//!
//! Every group element has a canonical index in `[0, N)`. For `Z_M` the index is
//! the residue; for `F_q^n` it is the mixed-radix number whose digits are the
//! `n·r` prime-field digits (coordinate 0 least significant, each coordinate
//! little-endian in the power basis). Dense functions are arrays over this index.

pub mod field;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use field::FieldCtx;

/// Groups larger than this are rejected.
pub const MAX_ORDER: u64 = 1 << 48;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    /// `Z_M`. When `interval` is set the group models the integer interval
    /// `[0, interval)` and `M` has been padded so that the arithmetic used by
    /// the verifiers never wraps around.
    Cyclic { m: u64, interval: Option<u64> },
    VectorSpace { field: FieldCtx, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupKind", into = "GroupKind")]
pub struct GroupCtx {
    kind: GroupKind,
    order: usize,
    /// Prime-field digit count (`n·r`) for vector spaces, unused for cyclic groups.
    ndigits: usize,
}

impl TryFrom<GroupKind> for GroupCtx {
    type Error = Error;
    fn try_from(kind: GroupKind) -> Result<Self> {
        match kind {
            GroupKind::Cyclic { m, interval: None } => GroupCtx::cyclic(m),
            GroupKind::Cyclic { m, interval: Some(n) } => GroupCtx::interval_model(n, m),
            GroupKind::VectorSpace { field, n } => GroupCtx::vector_space(field, n),
        }
    }
}

impl From<GroupCtx> for GroupKind {
    fn from(g: GroupCtx) -> Self {
        g.kind
    }
}

/// A group element in its structured form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GElem {
    Cyclic(u64),
    /// One field-element index per coordinate.
    Vector(Vec<u32>),
}

impl GroupCtx {
    pub fn cyclic(m: u64) -> Result<Self> {
        if m == 0 || m > MAX_ORDER {
            return Err(Error::usage(format!("cyclic order {m} outside [1, 2^48]")));
        }
        Ok(GroupCtx { kind: GroupKind::Cyclic { m, interval: None }, order: m as usize, ndigits: 0 })
    }

    /// `Z_M` standing in for the interval `[0, n)`; requires `M >= 2n` so that
    /// differences of interval elements are represented faithfully.
    pub fn interval_model(n: u64, m: u64) -> Result<Self> {
        if n == 0 || m < 2 * n {
            return Err(Error::usage(format!(
                "interval model needs 1 <= n and M >= 2n (n={n}, M={m})"
            )));
        }
        let mut g = Self::cyclic(m)?;
        g.kind = GroupKind::Cyclic { m, interval: Some(n) };
        Ok(g)
    }

    pub fn vector_space(field: FieldCtx, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("vector space dimension must be >= 1"));
        }
        let order = (field.q() as u64)
            .checked_pow(n as u32)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or_else(|| Error::usage(format!("order {}^{n} exceeds 2^48", field.q())))?;
        let ndigits = n * field.r();
        Ok(GroupCtx { kind: GroupKind::VectorSpace { field, n }, order: order as usize, ndigits })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    /// `N = |G|`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self.kind, GroupKind::Cyclic { .. })
    }

    pub fn modulus(&self) -> Option<u64> {
        match self.kind {
            GroupKind::Cyclic { m, .. } => Some(m),
            _ => None,
        }
    }

    pub fn interval(&self) -> Option<u64> {
        match self.kind {
            GroupKind::Cyclic { interval, .. } => interval,
            _ => None,
        }
    }

    /// The length `N` used by the interval-flavoured lemmas: the modelled
    /// interval length when present, the group order otherwise.
    pub fn model_len(&self) -> u64 {
        self.interval().unwrap_or(self.order as u64)
    }

    pub fn field(&self) -> Option<&FieldCtx> {
        match &self.kind {
            GroupKind::VectorSpace { field, .. } => Some(field),
            _ => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self.kind {
            GroupKind::VectorSpace { n, .. } => Some(n),
            _ => None,
        }
    }

    fn prime(&self) -> u64 {
        match &self.kind {
            GroupKind::Cyclic { m, .. } => *m,
            GroupKind::VectorSpace { field, .. } => field.p() as u64,
        }
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        match self.kind {
            GroupKind::Cyclic { m, .. } => ((a as u64 + b as u64) % m) as usize,
            GroupKind::VectorSpace { .. } => self.digitwise(a, b, |x, y, p| (x + y) % p),
        }
    }

    pub fn neg(&self, a: usize) -> usize {
        match self.kind {
            GroupKind::Cyclic { m, .. } => ((m - a as u64 % m) % m) as usize,
            GroupKind::VectorSpace { .. } => self.digitwise(a, 0, |x, _, p| (p - x) % p),
        }
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        match self.kind {
            GroupKind::Cyclic { m, .. } => ((a as u64 + m - b as u64) % m) as usize,
            GroupKind::VectorSpace { .. } => self.digitwise(a, b, |x, y, p| (x + p - y) % p),
        }
    }

    /// `k·a` for an integer `k` (repeated addition).
    pub fn smul_int(&self, k: i64, a: usize) -> usize {
        let p = self.prime();
        let k = k.rem_euclid(p as i64) as u64;
        match self.kind {
            GroupKind::Cyclic { m, .. } => ((k as u128 * a as u128) % m as u128) as usize,
            GroupKind::VectorSpace { .. } => self.digitwise(a, 0, |x, _, p| (x * k) % p),
        }
    }

    /// `c·a` for a field scalar `c ∈ F_q`; only meaningful for vector spaces.
    pub fn smul_field(&self, c: u32, a: usize) -> Result<usize> {
        let field = self
            .field()
            .ok_or_else(|| Error::usage("field scalar multiplication needs a vector-space group"))?;
        if c >= field.q() {
            return Err(Error::usage(format!("scalar {c} is not an element of F_{}", field.q())));
        }
        let coords: Vec<u32> = self.coords(a).into_iter().map(|x| field.mul(c, x)).collect();
        Ok(self.from_coords(&coords))
    }

    fn digitwise(&self, a: usize, b: usize, op: impl Fn(u64, u64, u64) -> u64) -> usize {
        let p = self.prime();
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut scale = 1u64;
        for _ in 0..self.ndigits {
            out += op(a % p, b % p, p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out as usize
    }

    /// Field-element coordinates of a vector-space index.
    pub fn coords(&self, a: usize) -> Vec<u32> {
        match &self.kind {
            GroupKind::VectorSpace { field, n } => {
                let q = field.q() as usize;
                let mut a = a;
                (0..*n)
                    .map(|_| {
                        let c = (a % q) as u32;
                        a /= q;
                        c
                    })
                    .collect()
            }
            GroupKind::Cyclic { .. } => vec![a as u32],
        }
    }

    pub fn from_coords(&self, coords: &[u32]) -> usize {
        let q = self.field().map(|f| f.q() as usize).unwrap_or(self.order);
        coords.iter().rev().fold(0usize, |acc, &c| acc * q + c as usize)
    }

    /// The standard dot product in `F_q^n`, as a field element.
    pub fn dot(&self, x: usize, xi: usize) -> u32 {
        let field = self.field().expect("dot product needs a vector-space group");
        self.coords(x)
            .into_iter()
            .zip(self.coords(xi))
            .fold(0, |acc, (a, b)| field.add(acc, field.mul(a, b)))
    }

    /// The character pairing as an exact phase `num/den ∈ [0, 1)`:
    /// `xξ/M` for `Z_M`, `Tr(⟨x,ξ⟩)/p` for `F_q^n`.
    pub fn phase(&self, x: usize, xi: usize) -> (u64, u64) {
        match &self.kind {
            GroupKind::Cyclic { m, .. } => (((x as u128 * xi as u128) % *m as u128) as u64, *m),
            GroupKind::VectorSpace { field, .. } => {
                (field.trace(self.dot(x, xi)) as u64, field.p() as u64)
            }
        }
    }

    /// `χ_ξ(x)`: `e(xξ/M)` on `Z_M`, `e_q(⟨x,ξ⟩) = exp(2πi Tr(⟨x,ξ⟩)/p)` on `F_q^n`.
    pub fn character(&self, x: usize, xi: usize) -> Complex64 {
        let (num, den) = self.phase(x, xi);
        Complex64::from_polar(1.0, TAU * num as f64 / den as f64)
    }

    /// Signed representative in `(-M/2, M/2]` for cyclic groups.
    pub fn signed(&self, a: usize) -> i64 {
        let m = self.modulus().expect("signed representatives need a cyclic group") as i64;
        let a = a as i64;
        if 2 * a > m {
            a - m
        } else {
            a
        }
    }

    pub fn from_signed(&self, v: i64) -> usize {
        let m = self.modulus().expect("signed representatives need a cyclic group") as i64;
        v.rem_euclid(m) as usize
    }

    pub fn elem(&self, idx: usize) -> GElem {
        match self.kind {
            GroupKind::Cyclic { .. } => GElem::Cyclic(idx as u64),
            GroupKind::VectorSpace { .. } => GElem::Vector(self.coords(idx)),
        }
    }

    pub fn index(&self, e: &GElem) -> Result<usize> {
        match (&self.kind, e) {
            (GroupKind::Cyclic { m, .. }, GElem::Cyclic(r)) if r < m => Ok(*r as usize),
            (GroupKind::VectorSpace { field, n }, GElem::Vector(cs))
                if cs.len() == *n && cs.iter().all(|&c| c < field.q()) =>
            {
                Ok(self.from_coords(cs))
            }
            _ => Err(Error::usage(format!("element {e:?} is not valid in {self}"))),
        }
    }

    /// Textual element encoding: decimal residue, or `n` space-separated field
    /// elements each given as `r` comma-separated little-endian digits.
    pub fn format_elem(&self, idx: usize) -> String {
        match &self.kind {
            GroupKind::Cyclic { .. } => idx.to_string(),
            GroupKind::VectorSpace { field, .. } => self
                .coords(idx)
                .into_iter()
                .map(|c| {
                    field.digits(c).iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
                })
                .collect::<Vec<_>>()
                .join(" "),
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<usize> {
        let s = s.trim();
        match &self.kind {
            GroupKind::Cyclic { m, .. } => {
                let v: u64 = s.parse().map_err(|_| Error::parse(format!("bad residue '{s}'")))?;
                if v >= *m {
                    return Err(Error::parse(format!("residue {v} out of range for Z_{m}")));
                }
                Ok(v as usize)
            }
            GroupKind::VectorSpace { field, n } => {
                let parts: Vec<&str> = s.split_whitespace().collect();
                if parts.len() != *n {
                    return Err(Error::parse(format!("expected {n} coordinates in '{s}'")));
                }
                let mut coords = Vec::with_capacity(*n);
                for part in parts {
                    let digits = part
                        .split(',')
                        .map(|d| d.trim().parse::<u32>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| Error::parse(format!("bad field element '{part}'")))?;
                    if digits.len() != field.r() || digits.iter().any(|&d| d >= field.p()) {
                        return Err(Error::parse(format!(
                            "field element '{part}' needs {} digits in [0, {})",
                            field.r(),
                            field.p()
                        )));
                    }
                    coords.push(field.from_digits(&digits));
                }
                Ok(self.from_coords(&coords))
            }
        }
    }
}

/// `cyclic:<M>`, `cyclic:<M>@<interval>` or `fq:<p>:<r>:<n>:<m_0,…,m_r>`.
impl fmt::Display for GroupCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::Cyclic { m, interval: None } => write!(f, "cyclic:{m}"),
            GroupKind::Cyclic { m, interval: Some(n) } => write!(f, "cyclic:{m}@{n}"),
            GroupKind::VectorSpace { field, n } => {
                let modulus: Vec<String> = field.modulus().iter().map(|c| c.to_string()).collect();
                write!(f, "fq:{}:{}:{}:{}", field.p(), field.r(), n, modulus.join(","))
            }
        }
    }
}

impl FromStr for GroupCtx {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parse(format!("bad group encoding '{s}'"));
        if let Some(rest) = s.strip_prefix("cyclic:") {
            match rest.split_once('@') {
                Some((m, n)) => GroupCtx::interval_model(
                    n.parse().map_err(|_| bad())?,
                    m.parse().map_err(|_| bad())?,
                ),
                None => GroupCtx::cyclic(rest.parse().map_err(|_| bad())?),
            }
        } else if let Some(rest) = s.strip_prefix("fq:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 4 {
                return Err(bad());
            }
            let p: u32 = parts[0].parse().map_err(|_| bad())?;
            let r: usize = parts[1].parse().map_err(|_| bad())?;
            let n: usize = parts[2].parse().map_err(|_| bad())?;
            let modulus = parts[3]
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            if modulus.len() != r + 1 {
                return Err(Error::parse(format!("modulus in '{s}' must have {} coefficients", r + 1)));
            }
            GroupCtx::vector_space(FieldCtx::new(p, modulus)?, n)
        } else {
            Err(bad())
        }
    }
}
