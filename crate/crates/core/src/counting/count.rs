use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EquationSpec;
use crate::error::{Error, Result, Witness};
use crate::functions::{fourier, same_ctx, Dfn};
use crate::groups::GroupCtx;
use crate::report::{Tolerance, VerificationReport};
use crate::sets::SetA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Brute,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    /// `T(h_1,…,h_k) = Σ_{Σ a_i x_i = 0} Π h_i(x_i)`.
    pub total: Complex64,
    /// Diagonal part `Σ_x Π h_i(x)`.
    pub trivial: Complex64,
    pub method: CountMethod,
}

/// Exact solution counts for an indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolutionCounts {
    pub total: u128,
    /// All coordinates equal.
    pub trivial: u128,
    /// All coordinates pairwise distinct.
    pub all_distinct: u128,
}

impl SolutionCounts {
    pub fn nontrivial(&self) -> u128 {
        self.total - self.trivial
    }
}

/// Outside interval models the window is the whole group.
fn check_window(ctx: &GroupCtx, hs: &[&Dfn]) -> Result<()> {
    if let Some(w) = ctx.interval() {
        for h in hs {
            if let Some(x) = h.support().into_iter().find(|&x| x as u64 >= w) {
                return Err(Error::usage(format!("support point {x} lies outside the window [0, {w})")));
            }
        }
    }
    Ok(())
}

pub(crate) fn check_args(eq: &EquationSpec, hs: &[Dfn]) -> Result<()> {
    if hs.len() != eq.k() {
        return Err(Error::usage(format!("{} functions for an equation in {} variables", hs.len(), eq.k())));
    }
    for h in &hs[1..] {
        same_ctx(&hs[0], h)?;
    }
    eq.validate(hs[0].ctx())?;
    check_window(hs[0].ctx(), &hs.iter().collect::<Vec<_>>())
}

pub fn count_t(eq: &EquationSpec, hs: &[Dfn], method: CountMethod) -> Result<CountResult> {
    check_args(eq, hs)?;
    let n = hs[0].len();
    let trivial = (0..n).map(|x| hs.iter().map(|h| h.get(x)).product::<Complex64>()).sum();
    let total = match method {
        CountMethod::Brute => count_brute(eq, hs),
        CountMethod::Fourier => {
            let hats: Vec<Dfn> = hs.par_iter().map(fourier).collect();
            fourier_count(eq, &hats)
        }
    };
    Ok(CountResult { total, trivial, method })
}

/// `(1/N) Σ_ξ Π_j ĥ_j(a_j ξ)` from precomputed transforms.
pub fn fourier_count(eq: &EquationSpec, hats: &[Dfn]) -> Complex64 {
    let ctx = hats[0].ctx();
    let n = ctx.order();
    let a = eq.coeffs();
    let partial: Vec<Complex64> = (0..n)
        .into_par_iter()
        .with_min_len(1024)
        .map(|xi| hats.iter().zip(a).map(|(h, &aj)| h.get(ctx.smul_int(aj, xi))).product())
        .collect();
    partial.iter().sum::<Complex64>() / n as f64
}

/// Picks the variable to solve for: one with invertible coefficient and
/// largest support, if any.
fn solve_var(eq: &EquationSpec, ctx: &GroupCtx, sizes: &[usize]) -> (usize, Option<i64>) {
    (0..eq.k())
        .filter_map(|j| eq.inverse_multiplier(ctx, j).map(|u| (j, u)))
        .max_by_key(|&(j, _)| (sizes[j], std::cmp::Reverse(j)))
        .map(|(j, u)| (j, Some(u)))
        .unwrap_or((0, None))
}

fn count_brute(eq: &EquationSpec, hs: &[Dfn]) -> Complex64 {
    let ctx = hs[0].ctx().clone();
    let supports: Vec<Vec<usize>> = hs.iter().map(|h| h.support()).collect();
    if supports.iter().any(|s| s.is_empty()) {
        return Complex64::new(0.0, 0.0);
    }
    let sizes: Vec<usize> = supports.iter().map(|s| s.len()).collect();
    let (j, inv) = solve_var(eq, &ctx, &sizes);
    let mut free: Vec<usize> = (0..eq.k()).filter(|&i| i != j).collect();
    free.sort_by_key(|&i| sizes[i]);
    let first = free[0];

    let parts: Vec<Complex64> = supports[first]
        .par_iter()
        .map(|&x0| {
            let mut xs = vec![0usize; eq.k()];
            xs[first] = x0;
            let mut acc = Complex64::new(0.0, 0.0);
            walk(eq, &ctx, hs, &supports, &free, 1, j, inv, &mut xs, hs[first].get(x0), &mut acc);
            acc
        })
        .collect();
    parts.iter().sum()
}

#[allow(clippy::too_many_arguments)]
fn walk(
    eq: &EquationSpec,
    ctx: &GroupCtx,
    hs: &[Dfn],
    supports: &[Vec<usize>],
    free: &[usize],
    depth: usize,
    j: usize,
    inv: Option<i64>,
    xs: &mut [usize],
    weight: Complex64,
    acc: &mut Complex64,
) {
    if depth == free.len() {
        xs[j] = 0;
        let target = ctx.neg(eq.eval(ctx, xs));
        match inv {
            Some(u) => *acc += weight * hs[j].get(ctx.smul_int(u, target)),
            None => {
                for &y in &supports[j] {
                    if ctx.smul_int(eq.coeffs()[j], y) == target {
                        *acc += weight * hs[j].get(y);
                    }
                }
            }
        }
        return;
    }
    let i = free[depth];
    for &x in &supports[i] {
        xs[i] = x;
        walk(eq, ctx, hs, supports, free, depth + 1, j, inv, xs, weight * hs[i].get(x), acc);
    }
}

/// Visits every solution in `A^k` whose first enumerated coordinate lies in
/// `lead`, in lexicographic order, stopping early when `visit` returns `true`.
pub fn for_each_solution(eq: &EquationSpec, a: &SetA, lead: &[usize], visit: &mut dyn FnMut(&[usize]) -> bool) {
    let ctx = a.ctx();
    let k = eq.k();
    let (j, inv) = solve_var(eq, ctx, &vec![a.len(); k]);
    let free: Vec<usize> = (0..k).filter(|&i| i != j).collect();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        eq: &EquationSpec,
        a: &SetA,
        free: &[usize],
        depth: usize,
        j: usize,
        inv: Option<i64>,
        xs: &mut Vec<usize>,
        pool: &[usize],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let ctx = a.ctx();
        if depth == free.len() {
            xs[j] = 0;
            let target = ctx.neg(eq.eval(ctx, xs));
            return match inv {
                Some(u) => {
                    let y = ctx.smul_int(u, target);
                    a.contains(y) && {
                        xs[j] = y;
                        visit(xs)
                    }
                }
                None => a.elements().iter().any(|&y| {
                    ctx.smul_int(eq.coeffs()[j], y) == target && {
                        xs[j] = y;
                        visit(xs)
                    }
                }),
            };
        }
        for &x in pool {
            xs[free[depth]] = x;
            if rec(eq, a, free, depth + 1, j, inv, xs, a.elements(), visit) {
                return true;
            }
        }
        false
    }
    rec(eq, a, &free, 0, j, inv, &mut vec![0; k], lead, visit);
}

fn classify(xs: &[usize]) -> (bool, bool) {
    let trivial = xs.iter().all(|&x| x == xs[0]);
    let distinct = xs.iter().enumerate().all(|(i, x)| !xs[..i].contains(x));
    (trivial, distinct)
}

/// Exact counts of solutions in `A^k`.
pub fn count_set_solutions(eq: &EquationSpec, a: &SetA) -> Result<SolutionCounts> {
    eq.validate(a.ctx())?;
    check_window(a.ctx(), &[&a.indicator()])?;
    if a.is_empty() {
        return Ok(SolutionCounts::default());
    }
    let parts: Vec<SolutionCounts> = a
        .elements()
        .par_iter()
        .map(|&x0| {
            let mut c = SolutionCounts::default();
            for_each_solution(eq, a, &[x0], &mut |xs| {
                let (t, d) = classify(xs);
                c.total += 1;
                c.trivial += t as u128;
                c.all_distinct += d as u128;
                false
            });
            c
        })
        .collect();
    let c = parts.into_iter().fold(SolutionCounts::default(), |acc, p| SolutionCounts {
        total: acc.total + p.total,
        trivial: acc.trivial + p.trivial,
        all_distinct: acc.all_distinct + p.all_distinct,
    });
    Ok(c)
}

/// First nontrivial solution in enumeration order, if any.
pub fn find_nontrivial_solution(eq: &EquationSpec, a: &SetA) -> Result<Option<Vec<usize>>> {
    eq.validate(a.ctx())?;
    let mut found = None;
    for_each_solution(eq, a, a.elements(), &mut |xs| {
        if !classify(xs).0 {
            found = Some(xs.to_vec());
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// `T(N^{1/s} 1_A) = N^{k/s}|A|` for sets with only diagonal solutions; the
/// closed form is checked against the Fourier count.
pub fn trivial_solution_value(eq: &EquationSpec, a: &SetA, s: u32) -> Result<(f64, VerificationReport)> {
    trivial_solution_value_with_len(eq, a, s, a.ctx().model_len())
}

/// As [`trivial_solution_value`] with an explicit `N`, for sets embedded in a
/// padded window.
pub fn trivial_solution_value_with_len(
    eq: &EquationSpec,
    a: &SetA,
    s: u32,
    n_len: u64,
) -> Result<(f64, VerificationReport)> {
    if let Some(xs) = find_nontrivial_solution(eq, a)? {
        return Err(Error::Precondition {
            msg: format!("set has a nontrivial solution of {eq}"),
            witness: Some(Witness::Solution { xs }),
        });
    }
    let n = n_len as f64;
    let scale = n.powf(1.0 / s as f64);
    let value = n.powf(eq.k() as f64 / s as f64) * a.len() as f64;
    let f = a.indicator().scale(scale);
    let hs = vec![f; eq.k()];
    let counted = count_t(eq, &hs, CountMethod::Fourier)?.total;
    let mut r = VerificationReport::new("trivial_solution_value");
    r.input("eq", eq.to_string()).input("s", s).input("set_size", a.len()).input("n", n);
    r.qty("closed_form", value).qty("fourier_count_re", counted.re).qty("fourier_count_im", counted.im);
    r.assert_close("T(F) = N^(k/s)|A|", counted.re, value, Tolerance::rel(1e-8));
    r.assert_close_scaled("imaginary part vanishes", counted.im, 0.0, value, Tolerance::rel(1e-8));
    Ok((value, r))
}
