use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{GroupCtx, GroupKind};

/// Coefficients of a translation-invariant equation `a_1 x_1 + ⋯ + a_k x_k = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct EquationSpec {
    coeffs: Vec<i64>,
}

impl TryFrom<Vec<i64>> for EquationSpec {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        EquationSpec::new(v)
    }
}

impl From<EquationSpec> for Vec<i64> {
    fn from(e: EquationSpec) -> Self {
        e.coeffs
    }
}

impl EquationSpec {
    /// Needs `k >= 3` nonzero coefficients. Whether they sum to zero depends on
    /// the ambient group and is checked by [`EquationSpec::validate`].
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::usage(format!("equation needs k >= 3 coefficients, got {}", coeffs.len())));
        }
        if coeffs.iter().any(|&a| a == 0) {
            return Err(Error::usage("equation coefficients must be nonzero"));
        }
        if coeffs.iter().any(|&a| a.unsigned_abs() > 1 << 20) {
            return Err(Error::usage("equation coefficients must be at most 2^20 in size"));
        }
        Ok(EquationSpec { coeffs })
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn abs_sum(&self) -> u64 {
        self.coeffs.iter().map(|a| a.unsigned_abs()).sum()
    }

    /// Checks translation invariance in `ctx`; for interval models also that `M`
    /// is large enough for group solutions in the window to be integer solutions.
    pub fn validate(&self, ctx: &GroupCtx) -> Result<()> {
        match ctx.kind() {
            GroupKind::Cyclic { m, interval } => {
                if self.coeffs.iter().sum::<i64>() != 0 {
                    return Err(Error::usage(format!("coefficients of {self} must sum to 0")));
                }
                if let Some(w) = interval {
                    let need = self.abs_sum() * w + 1;
                    if *m < need {
                        return Err(Error::usage(format!(
                            "modulus {m} too small for {self} on a window of {w}; minimal M is {need}"
                        )));
                    }
                }
                Ok(())
            }
            GroupKind::VectorSpace { field, .. } => {
                let p = field.p() as i64;
                if self.coeffs.iter().any(|a| a.rem_euclid(p) == 0) {
                    return Err(Error::usage(format!("coefficients of {self} must be nonzero mod {p}")));
                }
                if self.coeffs.iter().sum::<i64>().rem_euclid(p) != 0 {
                    return Err(Error::usage(format!("coefficients of {self} must sum to 0 mod {p}")));
                }
                Ok(())
            }
        }
    }

    /// `Σ a_i x_i` in the group.
    pub fn eval(&self, ctx: &GroupCtx, xs: &[usize]) -> usize {
        self.coeffs.iter().zip(xs).fold(0, |acc, (&a, &x)| ctx.add(acc, ctx.smul_int(a, x)))
    }

    /// Multiplier `u` with `u·a_j·x = x` for all `x`, when multiplication by `a_j` is invertible.
    pub fn inverse_multiplier(&self, ctx: &GroupCtx, j: usize) -> Option<i64> {
        let a = self.coeffs[j];
        let modulus = match ctx.kind() {
            GroupKind::Cyclic { m, .. } => *m as i64,
            GroupKind::VectorSpace { field, .. } => field.p() as i64,
        };
        mod_inverse(a.rem_euclid(modulus), modulus)
    }

    /// Number of `ξ` with `a_j ξ = 0`, the multiplicity of the dilation `ξ ↦ a_j ξ`.
    pub fn dilation_multiplicity(&self, ctx: &GroupCtx, j: usize) -> u64 {
        match ctx.kind() {
            GroupKind::Cyclic { m, .. } => gcd(self.coeffs[j].unsigned_abs(), *m),
            GroupKind::VectorSpace { .. } => 1,
        }
    }
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for EquationSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|c| c.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse(format!("bad equation '{s}'")))?;
        EquationSpec::new(coeffs)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1) = (m as i128, a.rem_euclid(m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as i64)
}

/// Smallest modulus `M >= (Σ|a_i|)·window + 1` coprime to every coefficient.
/// With it the interval window embeds without wraparound and every dilation
/// `ξ ↦ a_i ξ` is a bijection of `Z_M`.
pub fn padded_modulus(eq: &EquationSpec, window: u64) -> u64 {
    let mut m = (eq.abs_sum() * window + 1).max(2 * window);
    while eq.coeffs().iter().any(|a| gcd(a.unsigned_abs(), m) != 1) {
        m += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FieldCtx;

    #[test]
    fn parse_and_validate() {
        let eq: EquationSpec = "1,1,1,-1,-2".parse().unwrap();
        assert_eq!(eq.k(), 5);
        assert_eq!(eq.abs_sum(), 6);
        assert_eq!(eq.to_string(), "1,1,1,-1,-2");
        assert!("1,-1".parse::<EquationSpec>().is_err());
        assert!("1,0,-1".parse::<EquationSpec>().is_err());
        assert!("1,x,2".parse::<EquationSpec>().is_err());

        let z = GroupCtx::interval_model(10, 60).unwrap();
        let err = eq.validate(&z).unwrap_err().to_string();
        assert!(err.contains("minimal M is 61"), "{err}");
        assert!(eq.validate(&GroupCtx::interval_model(10, 61).unwrap()).is_ok());

        let f3 = GroupCtx::vector_space(FieldCtx::prime(3).unwrap(), 2).unwrap();
        assert!("1,1,1".parse::<EquationSpec>().unwrap().validate(&f3).is_ok());
        assert!("1,1,1".parse::<EquationSpec>().unwrap().validate(&GroupCtx::cyclic(9).unwrap()).is_err());
        assert!("1,3,-4".parse::<EquationSpec>().unwrap().validate(&f3).is_err());
    }

    #[test]
    fn padding_is_coprime() {
        let eq: EquationSpec = "1,1,1,-1,-2".parse().unwrap();
        let m = padded_modulus(&eq, 10);
        assert_eq!(m, 61);
        let m = padded_modulus(&"2,2,-4".parse().unwrap(), 10);
        assert!(m >= 81 && m % 2 == 1);
        assert_eq!(mod_inverse(3, 10), Some(7));
        assert_eq!(mod_inverse(2, 10), None);
    }
}
