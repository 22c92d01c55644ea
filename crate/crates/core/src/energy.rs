//! Moment energies `E_s(f_1,…,f_h) = Σ_n (f_1 ∗ ⋯ ∗ f_h)(n)^s` and exact
//! verifiers for the inequalities that control them on K_{s,t}-free sets.
//!
//! Every assertion here is an integer comparison; powers that could overflow
//! are taken in `BigInt`.

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functions::{convolve, same_ctx, Dfn, IntFn, Method};
use crate::report::{Num, Status, VerificationReport};
use crate::sets::{rep_diff_int, require_kst_free, tuple_stats, SetA};

pub type EnergyReport = VerificationReport;

/// Saving exponent in the error term: `(s−2)/(s−1)` for `s > 2`, and `1` for
/// `s = 2`, where the argument is separate.
pub fn c_s(s: u32) -> f64 {
    if s <= 2 {
        1.0
    } else {
        (s - 2) as f64 / (s - 1) as f64
    }
}

fn pow_big(base: impl Into<BigInt>, e: u32) -> BigInt {
    base.into().pow(e)
}

/// Floating-point energy through fast convolutions.
pub fn energy(fs: &[Dfn], s: u32) -> Result<f64> {
    let (first, rest) = fs.split_first().ok_or_else(|| Error::usage("energy needs at least one function"))?;
    let mut acc = first.clone();
    for f in rest {
        same_ctx(&acc, f)?;
        acc = convolve(&acc, f, Method::Fast)?;
    }
    Ok(acc.values().iter().map(|v| v.powi(s as i32)).sum::<Complex64>().re)
}

/// Exact energy of integer-valued functions.
pub fn energy_int(fs: &[IntFn], s: u32) -> Result<i128> {
    let (first, rest) = fs.split_first().ok_or_else(|| Error::usage("energy needs at least one function"))?;
    let mut acc = first.clone();
    for f in rest {
        acc = acc.convolve(f)?;
    }
    acc.power_sum(s)
}

/// `E_s(1_A, 1_{−A}) = Σ_d r(d)^s`, exactly.
pub fn set_energy(a: &SetA, s: u32) -> Result<i128> {
    rep_diff_int(a).power_sum(s)
}

/// The `h` functions `1_A` / `1_{−A}` selected by `pattern` (true = `1_A`);
/// the default alternates starting with `1_A`.
pub fn pattern_functions(a: &SetA, h: usize, pattern: Option<&[bool]>) -> Result<Vec<IntFn>> {
    let pat: Vec<bool> = match pattern {
        Some(p) if p.len() == h => p.to_vec(),
        Some(p) => return Err(Error::usage(format!("pattern has {} entries, expected h = {h}", p.len()))),
        None => (0..h).map(|i| i % 2 == 0).collect(),
    };
    let plus = a.indicator_int();
    let minus = plus.reflect();
    Ok(pat.into_iter().map(|p| if p { plus.clone() } else { minus.clone() }).collect())
}

/// `|A|^h <= E_s <= |A|^{sh−s+1}`.
pub fn verify_trivial_bounds(a: &SetA, h: usize, s: u32, pattern: Option<&[bool]>) -> Result<EnergyReport> {
    if h < 2 || s < 1 {
        return Err(Error::usage(format!("need h >= 2 and s >= 1, got h={h}, s={s}")));
    }
    let fs = pattern_functions(a, h, pattern)?;
    let e = energy_int(&fs, s)?;
    let e1 = energy_int(&fs, 1)?;
    let n = a.len() as i128;
    let lower = pow_big(n, h as u32);
    let upper = pow_big(n, s * h as u32 - s + 1);
    let mut r = VerificationReport::new("trivial_energy_bounds");
    r.input("h", h).input("s", s).input("set_size", a.len());
    r.qty("energy", e).qty("energy_1", e1);
    r.assert_eq("E_1 = |A|^h", e1, lower.clone());
    r.assert_le("|A|^h <= E_s", lower, e);
    r.assert_le("E_s <= |A|^(sh-s+1)", e, upper.clone());
    if e > 0 {
        r.ratio("energy_over_upper", e as f64 / Num::from(upper).as_f64());
    }
    Ok(r)
}

/// Hölder interpolation between `E_1 = |A|²` and `E_s`:
/// `E_2^{s−1} <= (|A|²)^{s−2} E_s` and `E_{s−1}^{s−1} <= |A|² E_s^{s−2}`.
pub fn verify_lemma_e2(a: &SetA, s: u32) -> Result<EnergyReport> {
    if s < 2 {
        return Err(Error::usage(format!("need s >= 2, got {s}")));
    }
    let n = a.len() as i128;
    let e2 = set_energy(a, 2)?;
    let es = set_energy(a, s)?;
    let mut r = VerificationReport::new("lemma_e2");
    r.input("s", s).input("set_size", a.len());
    r.qty("E_2", e2).qty("E_s", es);
    r.assert_le("E_1 = |A|^2 <= E_s", n * n, es);
    r.assert_le(
        "E_2^(s-1) <= (|A|^2)^(s-2) * E_s",
        pow_big(e2, s - 1),
        pow_big(n * n, s - 2) * BigInt::from(es),
    );
    if s >= 3 {
        let esm1 = set_energy(a, s - 1)?;
        r.qty("E_s-1", esm1);
        r.assert_le(
            "E_(s-1)^(s-1) <= |A|^2 * E_s^(s-2)",
            pow_big(esm1, s - 1),
            BigInt::from(n * n) * pow_big(es, s - 2),
        );
        if n > 0 {
            let k = es as f64 / (n as f64).powi(s as i32);
            let bound = k.powf((s - 2) as f64 / (s - 1) as f64) * (n as f64).powf(s as f64 - c_s(s));
            r.ratio("E_s-1_over_holder_bound", esm1 as f64 / bound);
        }
    } else {
        r.note("s = 2: the E_2 clause is the identity E_2 <= E_2");
    }
    if n > 0 {
        let nf = n as f64;
        let k = es as f64 / nf.powi(s as i32);
        r.qty("K", k);
        let bound = k.powf(1.0 / (s - 1) as f64) * nf.powf(3.0 - 1.0 / (s - 1) as f64);
        r.ratio("E_2_over_holder_bound", e2 as f64 / bound);
        r.ratio("E_2_over_A^(3-1/(s-1))", e2 as f64 / nf.powf(3.0 - 1.0 / (s - 1) as f64));
    }
    Ok(r)
}

/// Exact decomposition of `E_s` over the common difference:
/// `E_s = |A|^s + Σ_{distinct} r_A + Σ_{degenerate} r_A`, with every
/// distinct-tuple term at most `t − 1`.
pub fn verify_lemma_es(a: &SetA, s: u32, t: u32) -> Result<EnergyReport> {
    require_kst_free(a, s as usize, t as usize)?;
    let n = a.len() as i128;
    let es = set_energy(a, s)?;
    let st = tuple_stats(a, s as usize, t as usize);
    let ns = pow_big(n, s);
    let t_big = BigInt::from(t);
    let mut r = VerificationReport::new("lemma_es");
    r.input("s", s).input("t", t).input("set_size", a.len());
    r.qty("E_s", es)
        .qty("distinct_tuples", st.distinct_tuples)
        .qty("sum_r_distinct", st.sum_r_distinct)
        .qty("degenerate_total", st.sum_r_degenerate)
        .qty("max_r_distinct", st.max_r_distinct)
        .qty("c_s", c_s(s));
    r.assert_eq(
        "E_s = |A|^s + sum_distinct r_A + sum_degenerate r_A",
        es,
        ns.clone() + BigInt::from(st.sum_r())
    );
    r.assert_le("max_distinct r_A <= t-1", st.max_r_distinct, t as u64 - 1);
    r.assert_le("max_distinct r_A <= t-2 (sharp)", st.max_r_distinct as i128, t as i128 - 2);
    r.assert_le(
        "sum_distinct r_A <= (t-1) * #distinct",
        st.sum_r_distinct,
        BigInt::from(t - 1) * BigInt::from(st.distinct_tuples),
    );
    r.assert_le(
        "E_s <= t|A|^s + degenerate_total",
        es,
        &t_big * &ns + BigInt::from(st.sum_r_degenerate),
    );
    if s == 2 {
        r.assert_le("E_2 <= t|A|^2 - (t-1)|A|", es, t as i128 * n * n - (t as i128 - 1) * n);
        r.note("s = 2 uses the separate argument giving c_2 = 1");
    }
    if n > 0 {
        let denom = (n as f64).powf(s as f64 - c_s(s));
        r.ratio("degenerate_total_over_A^(s-c_s)", st.sum_r_degenerate as f64 / denom);
        let excess = es as f64 - t as f64 * (n as f64).powi(s as i32);
        r.ratio("(E_s - t|A|^s)_over_A^(s-c_s)", excess / denom);
    }
    Ok(r)
}

/// `η = E_s/|A|^s − t` as the exact pair `(E_s − t|A|^s, |A|^s)`.
fn eta_parts(es: i128, n: i128, s: u32, t: u32) -> (BigInt, BigInt) {
    let ns = pow_big(n, s);
    (BigInt::from(es) - BigInt::from(t) * &ns, ns)
}

/// `#{tuples with r_A > t−1} <= (1 − (1−η)/t)|A|^s`, asserted as
/// `t·count <= E_s − |A|^s`, which is the same inequality cleared of denominators.
pub fn verify_ra_large(a: &SetA, s: u32, t: u32) -> Result<EnergyReport> {
    if s < 2 || s > t {
        return Err(Error::usage(format!("need 2 <= s <= t, got s={s}, t={t}")));
    }
    let n = a.len() as i128;
    if n == 0 {
        return Ok(VerificationReport::not_applicable("lemma_ra_large", "empty set: eta undefined"));
    }
    let es = set_energy(a, s)?;
    let (num, den) = eta_parts(es, n, s, t);
    let eta = Num::from(num.clone()).as_f64() / Num::from(den.clone()).as_f64();
    let mut r = VerificationReport::new("lemma_ra_large");
    r.input("s", s).input("t", t).input("set_size", a.len());
    r.qty("E_s", es).qty("eta", eta);
    if num >= den {
        r.status = Status::NotApplicable;
        r.note("eta >= 1");
        return Ok(r);
    }
    let st = tuple_stats(a, s as usize, t as usize);
    r.qty("count_above", st.above_threshold).qty("sum_r", st.sum_r());
    r.assert_eq("sum r_A = E_s - |A|^s", BigInt::from(st.sum_r()), BigInt::from(es) - &den);
    r.assert_le(
        "t * count(r_A > t-1) <= E_s - |A|^s",
        BigInt::from(t) * BigInt::from(st.above_threshold),
        BigInt::from(es) - &den,
    );
    let rhs = (1.0 - (1.0 - eta) / t as f64) * (n as f64).powi(s as i32);
    if rhs > 0.0 {
        r.ratio("count_over_rhs", st.above_threshold as f64 / rhs);
    }
    Ok(r)
}

/// `|A| <= 2(t²/(1−η))^{1/s} N^{1−1/s}` through the proof's double count.
/// `N` is the modelled interval length (or the group order), and for
/// interval models the free shifts range over `[0, 2N)`; in a group they
/// range over the group itself, which gives the bound without the factor 2.
pub fn verify_size_bound(a: &SetA, s: u32, t: u32) -> Result<EnergyReport> {
    if s < 2 || s > t {
        return Err(Error::usage(format!("need 2 <= s <= t, got s={s}, t={t}")));
    }
    let n = a.len() as i128;
    let big_n = a.ctx().model_len() as i128;
    let scale: i128 = if a.ctx().interval().is_some() { 2 } else { 1 };
    let mut r = VerificationReport::new("size_bound");
    r.input("s", s).input("t", t).input("set_size", a.len()).input("N", big_n).input("shift_range_factor", scale);
    if n == 0 {
        r.note("empty set");
        return Ok(r);
    }
    let es = set_energy(a, s)?;
    let (num, den) = eta_parts(es, n, s, t);
    let eta = Num::from(num.clone()).as_f64() / Num::from(den.clone()).as_f64();
    r.qty("E_s", es).qty("eta", eta);
    if num >= den {
        r.status = Status::NotApplicable;
        r.note("eta >= 1");
        return Ok(r);
    }
    let st = tuple_stats(a, s as usize, t as usize);
    let good = BigInt::from(st.tuples - st.above_threshold);
    r.qty("good_tuples", good.clone());
    // (1 − η)|A|^s = (t+1)|A|^s − E_s
    let one_minus_eta_ns = BigInt::from(t + 1) * &den - BigInt::from(es);
    r.assert_le("(1-eta)|A|^s <= t * good", one_minus_eta_ns.clone(), BigInt::from(t) * &good);
    r.assert_le(
        "good * N <= t * (shift_range * N)^s",
        &good * BigInt::from(big_n),
        BigInt::from(t) * pow_big(scale * big_n, s),
    );
    let lhs = if eta <= 0.0 {
        r.note("eta <= 0 treated as eta -> 0+");
        den.clone()
    } else {
        one_minus_eta_ns
    };
    let t2 = BigInt::from(t) * BigInt::from(t);
    r.assert_le(
        "(1-eta)|A|^s <= 2^s t^2 N^(s-1)",
        lhs.clone(),
        pow_big(2, s) * &t2 * pow_big(big_n, s - 1),
    );
    if scale == 1 {
        r.assert_le("(1-eta)|A|^s <= t^2 N^(s-1) (group form)", lhs, t2 * pow_big(big_n, s - 1));
    }
    let eta_eff = eta.max(0.0);
    let bound = 2.0 * (t as f64 * t as f64 / (1.0 - eta_eff)).powf(1.0 / s as f64)
        * (big_n as f64).powf(1.0 - 1.0 / s as f64);
    r.qty("size_bound", bound);
    r.ratio("set_size_over_bound", n as f64 / bound);
    Ok(r)
}

/// `Σ (r_A − (t−1))_+` vanishes on tuples with distinct entries; the
/// degenerate remainder is measured against `|A|^{s−c_s}`.
pub fn verify_vanishing(a: &SetA, s: u32, t: u32) -> Result<EnergyReport> {
    require_kst_free(a, s as usize, t as usize)?;
    let st = tuple_stats(a, s as usize, t as usize);
    let n = a.len();
    let mut r = VerificationReport::new("vanishing");
    r.input("s", s).input("t", t).input("set_size", n);
    r.qty("excess_distinct", st.excess_distinct)
        .qty("excess_degenerate", st.excess_degenerate)
        .qty("excess_total", st.excess());
    r.assert_eq("distinct-tuple excess = 0", st.excess_distinct, 0u64);
    if n > 0 {
        let nf = n as f64;
        let eta = st.excess() as f64 / nf.powi(s as i32);
        r.qty("eta", eta);
        r.ratio("excess_over_A^(s-c_s)", st.excess() as f64 / nf.powf(s as f64 - c_s(s)));
        r.ratio("eta_times_A^c_s", eta * nf.powf(c_s(s)));
    }
    Ok(r)
}
