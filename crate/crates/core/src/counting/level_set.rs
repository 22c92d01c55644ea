use crate::error::{Error, Result};
use crate::functions::Dfn;
use crate::report::{VerificationReport, FLOAT_LE};
use crate::sets::{Provenance, SetA};

/// `A_0 = {x : f(x) >= δ/2}` for a nonnegative `f` with `Σf >= δN`, with
/// the lower bound on `|A_0|` that follows from `Σ f^p = C·N` by Hölder.
pub fn level_set_extract(f: &Dfn, delta: f64, p: f64) -> Result<(SetA, VerificationReport)> {
    level_set_extract_in(f, delta, p, f.len() as u64)
}

/// As [`level_set_extract`] with `N = domain_len`, the size of a window
/// containing the support of `f`.
pub fn level_set_extract_in(f: &Dfn, delta: f64, p: f64, domain_len: u64) -> Result<(SetA, VerificationReport)> {
    if p <= 1.0 {
        return Err(Error::usage(format!("need p > 1, got {p}")));
    }
    if !(delta > 0.0) {
        return Err(Error::usage(format!("need delta > 0, got {delta}")));
    }
    let ctx = f.ctx();
    for (x, v) in f.values().iter().enumerate() {
        if v.re < 0.0 || v.im != 0.0 {
            return Err(Error::usage(format!("f({}) = {v} is not a nonnegative real", ctx.format_elem(x))));
        }
    }
    let n = domain_len as f64;
    let support = f.support();
    let total: f64 = f.values().iter().map(|v| v.re).sum();
    let moment: f64 = f.values().iter().map(|v| v.re.powf(p)).sum();
    let c = moment / n;
    let level: Vec<usize> = (0..f.len()).filter(|&x| f.get(x).re >= delta / 2.0).collect();
    let size = level.len() as f64;

    let mut r = VerificationReport::new("level_set");
    r.input("delta", delta).input("p", p).input("N", domain_len);
    r.qty("sum_f", total).qty("sum_f^p", moment).qty("C", c).qty("level_set_size", level.len());
    r.assert_le("|supp f| <= N", support.len(), domain_len);
    r.assert_le_f64("delta N <= sum f", delta * n, total, FLOAT_LE);
    let on_level: f64 = level.iter().map(|&x| f.get(x).re).sum();
    r.assert_le_f64("delta N / 2 <= sum_(A_0) f", delta * n / 2.0, on_level, FLOAT_LE);
    let e = p / (p - 1.0);
    let holder = (delta / 2.0).powf(e) * c.powf(-1.0 / (p - 1.0)) * n;
    r.qty("holder_bound", holder);
    r.assert_le_f64("|A_0| >= (delta/2)^(p/(p-1)) C^(-1/(p-1)) N", holder, size, FLOAT_LE);
    if c <= 1.0 {
        let pz = (delta / 2.0).powf(e) * n;
        r.assert_le_f64("|A_0| >= (delta/2)^(p/(p-1)) N", pz, size, FLOAT_LE);
    } else {
        r.note("sum f^p > N: only the C-dependent bound applies");
    }
    if holder > 0.0 {
        r.ratio("level_set_over_bound", size / holder);
    }
    let prov = Provenance::new("level_set").param("delta", delta).param("p", p);
    Ok((SetA::new(ctx, level, prov)?, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupCtx;
    use std::sync::Arc;

    #[test]
    fn examples() {
        let g = Arc::new(GroupCtx::cyclic(10).unwrap());
        let (a, r) = level_set_extract(&Dfn::constant(&g, 1.0), 1.0, 2.0).unwrap();
        assert_eq!(a.len(), 10);
        assert!(r.passed());
        let (a, r) = level_set_extract(&Dfn::delta(&g, 0).scale(2.0), 0.2, 2.0).unwrap();
        assert_eq!(a.elements(), &[0]);
        assert!(r.passed(), "{:?}", r.failed_assertions());
        assert!(level_set_extract(&Dfn::delta(&g, 3).scale(-1.0), 0.1, 2.0).is_err());
    }
}
