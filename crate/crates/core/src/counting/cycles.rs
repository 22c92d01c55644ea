use std::collections::BTreeSet;

use super::{count_set_solutions, count_t, CountMethod, EquationSpec};
use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::sets::SetA;

/// Above this many enumerated tuples the solution count is taken from the
/// Fourier side instead.
const BRUTE_LIMIT: f64 = 2e7;

/// Number of `(x_1,…,x_k) ∈ X_1×⋯×X_k` with `x_1 + ⋯ + x_k = 0`, exactly.
pub fn count_k_cycles(sets: &[SetA]) -> Result<u128> {
    let (first, rest) = sets.split_first().ok_or_else(|| Error::usage("no sets given"))?;
    let ctx = first.ctx();
    if rest.iter().any(|x| x.ctx() != ctx) {
        return Err(Error::usage("sets live in different groups"));
    }
    let mut acc = first.indicator_int();
    for x in rest {
        acc = acc.convolve(&x.indicator_int())?;
    }
    Ok(acc.get(ctx.zero()) as u128)
}

/// Cycles in `a_1·A_0 × ⋯ × a_k·A_0` against solutions of the equation in `A_0^k`.
pub fn verify_supersaturation(eq: &EquationSpec, a0: &SetA, exponent: f64) -> Result<VerificationReport> {
    let ctx = a0.ctx();
    let field = ctx.field().ok_or_else(|| Error::usage("supersaturation needs a vector-space group"))?;
    let p = field.p() as i64;
    if let Some(a) = eq.coeffs().iter().find(|a| a.rem_euclid(p) == 0) {
        return Err(Error::usage(format!("coefficient {a} vanishes in F_{}", field.q())));
    }
    eq.validate(ctx)?;
    let xs: Vec<SetA> = eq.coeffs().iter().map(|&a| a0.dilate(a)).collect::<Result<_>>()?;
    let cycles = count_k_cycles(&xs)?;
    let enumeration = (a0.len() as f64).powi(eq.k() as i32 - 1);
    let (solutions, trivial, method) = if enumeration <= BRUTE_LIMIT {
        let c = count_set_solutions(eq, a0)?;
        (c.total, c.trivial, "brute")
    } else {
        let hs = vec![a0.indicator(); eq.k()];
        let t = count_t(eq, &hs, CountMethod::Fourier)?.total;
        (t.re.round().max(0.0) as u128, a0.len() as u128, "fourier")
    };

    let mut r = VerificationReport::new("supersaturation");
    r.input("eq", eq.to_string()).input("set_size", a0.len()).input("exponent", exponent);
    r.input("solution_count_method", method);
    r.qty("cycles", cycles).qty("solutions", solutions).qty("trivial", trivial);
    let diagonal_ok = a0.elements().iter().all(|&x| {
        let s = eq.coeffs().iter().fold(ctx.zero(), |acc, &a| ctx.add(acc, ctx.smul_int(a, x)));
        s == ctx.zero()
    });
    r.assert_true("diagonal tuples are cycles", diagonal_ok);
    for (i, &a) in eq.coeffs().iter().enumerate() {
        let images: BTreeSet<usize> = a0.elements().iter().map(|&x| ctx.smul_int(a, x)).collect();
        r.assert_eq(&format!("diagonal cycles distinct in coordinate {i}"), images.len(), a0.len());
    }
    r.assert_le("cycles >= |A_0|", a0.len(), cycles);
    r.assert_eq("cycles = solutions in A_0^k", cycles, solutions);
    let n = ctx.order() as f64;
    let k = eq.k() as f64;
    let rho = a0.len() as f64 / n;
    let density = cycles as f64 / n.powf(k - 1.0);
    let reference = (rho / (2.0 * k)).powf(exponent);
    r.ratio("cycles_over_N^(k-1)", density);
    r.ratio("reference_(rho/2k)^C", reference);
    if reference > 0.0 {
        r.ratio("density_over_reference", density / reference);
    }
    Ok(r)
}
