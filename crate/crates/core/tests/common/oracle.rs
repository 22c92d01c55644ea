//! Brute-force reference computations. Each one follows the defining formula
//! directly and shares no code path with the library beyond group arithmetic.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use addlab::{GroupCtx, SetA};
use num_complex::Complex64;
use num_rational::Ratio;

/// `ĥ(ξ) = Σ_x h(x) e(−phase(x, ξ))`, straight from the definition.
pub fn dft(ctx: &GroupCtx, values: &[Complex64]) -> Vec<Complex64> {
    let n = ctx.order();
    (0..n)
        .map(|xi| {
            values
                .iter()
                .enumerate()
                .map(|(x, v)| {
                    let (num, den) = ctx.phase(x, xi);
                    let angle = -2.0 * std::f64::consts::PI * num as f64 / den as f64;
                    v * Complex64::new(angle.cos(), angle.sin())
                })
                .sum()
        })
        .collect()
}

pub fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// No `|B| = s`, `|C| = t` with `B + C ⊆ A`. Any such grid can be translated
/// so that its smallest `B` element `b` satisfies `C ⊆ A − b`.
pub fn kst_free(a: &SetA, s: usize, t: usize) -> bool {
    let ctx = a.ctx();
    let elems = a.elements();
    for b in subsets(elems, s) {
        let pool: Vec<usize> = elems.iter().map(|&x| ctx.sub(x, b[0])).collect();
        for c in subsets(&pool, t) {
            if b.iter().all(|&x| c.iter().all(|&y| a.contains(ctx.add(x, y)))) {
                return false;
            }
        }
    }
    true
}

/// `#{d ≠ 0 : a_i − d ∈ A for all i}` by scanning the whole group.
pub fn rep_tuple(a: &SetA, tuple: &[usize]) -> u64 {
    let ctx = a.ctx();
    (1..ctx.order()).filter(|&d| tuple.iter().all(|&x| a.contains(ctx.sub(x, d)))).count() as u64
}

/// `#{(a_1,…,a_s, a'_1,…,a'_s) : a_i − a'_i all equal}` by walking every
/// such tuple.
pub fn diff_energy(a: &SetA, s: usize) -> i128 {
    let ctx = a.ctx();
    let elems = a.elements();
    fn walk(a: &SetA, d: usize, left: usize) -> i128 {
        if left == 0 {
            return 1;
        }
        let ctx = a.ctx();
        let mut total = 0;
        for &x in a.elements() {
            if a.contains(ctx.sub(x, d)) {
                total += walk(a, d, left - 1);
            }
        }
        total
    }
    let mut total = 0;
    for &x in elems {
        for &y in elems {
            total += walk(a, ctx.sub(x, y), s - 1);
        }
    }
    total
}

/// `Σ_n (#{(x_1,…,x_h) : ±x_1 ± ⋯ = n})^s` over `A^h`, signs from `pattern`.
pub fn hfold_energy(a: &SetA, pattern: &[bool], s: u32) -> i128 {
    let ctx = a.ctx();
    let mut counts: BTreeMap<usize, i128> = BTreeMap::new();
    let h = pattern.len();
    let mut idx = vec![0usize; h];
    let elems = a.elements();
    if elems.is_empty() {
        return 0;
    }
    loop {
        let sum = idx.iter().zip(pattern).fold(ctx.zero(), |acc, (&i, &plus)| {
            let x = elems[i];
            ctx.add(acc, if plus { x } else { ctx.neg(x) })
        });
        *counts.entry(sum).or_default() += 1;
        let mut j = 0;
        loop {
            if j == h {
                return counts.values().map(|&c| c.pow(s)).sum();
            }
            idx[j] += 1;
            if idx[j] < elems.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Solutions of `Σ a_i x_i = 0` over the integers with `x_i ∈ xs`:
/// `(total, all equal, pairwise distinct)`.
pub fn count_over_z(coeffs: &[i64], xs: &[i64]) -> (u128, u128, u128) {
    let k = coeffs.len();
    let mut idx = vec![0usize; k];
    let (mut total, mut trivial, mut distinct) = (0, 0, 0);
    if xs.is_empty() {
        return (0, 0, 0);
    }
    loop {
        let v: i64 = idx.iter().zip(coeffs).map(|(&i, &a)| a * xs[i]).sum();
        if v == 0 {
            total += 1;
            if idx.iter().all(|&i| i == idx[0]) {
                trivial += 1;
            }
            if idx.iter().collect::<BTreeSet<_>>().len() == k {
                distinct += 1;
            }
        }
        let mut j = 0;
        loop {
            if j == k {
                return (total, trivial, distinct);
            }
            idx[j] += 1;
            if idx[j] < xs.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `Σ_{Σ a_i x_i = 0} Π h_i(x_i)` over all of `G^k`.
pub fn count_brute(ctx: &GroupCtx, coeffs: &[i64], hs: &[Vec<Complex64>]) -> Complex64 {
    let k = coeffs.len();
    let n = ctx.order();
    let mut idx = vec![0usize; k];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let v = idx.iter().zip(coeffs).fold(ctx.zero(), |acc, (&x, &a)| ctx.add(acc, ctx.smul_int(a, x)));
        if v == ctx.zero() {
            total += idx.iter().zip(hs).map(|(&x, h)| h[x]).product::<Complex64>();
        }
        let mut j = 0;
        loop {
            if j == k {
                return total;
            }
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `‖n·ξ/M‖_𝕋 < eps` through the nearest integer, in exact rationals.
pub fn torus_lt(n: i64, xi: u64, m: u64, eps: Ratio<i128>) -> bool {
    let theta = Ratio::new(n as i128 * xi as i128, m as i128);
    let nearest = theta.round();
    let diff = theta - nearest;
    let dist = if diff < Ratio::from_integer(0) { -diff } else { diff };
    dist < eps
}

/// All `F_q`-combinations of `vectors`, by closure under addition and
/// field scalars.
pub fn span_closure(ctx: &GroupCtx, vectors: &[usize]) -> BTreeSet<usize> {
    let q = ctx.field().expect("vector space").q();
    let mut out: BTreeSet<usize> = BTreeSet::from([ctx.zero()]);
    loop {
        let mut next = out.clone();
        for &x in &out {
            for &v in vectors {
                for c in 0..q {
                    next.insert(ctx.add(x, ctx.smul_field(c, v).unwrap()));
                }
            }
        }
        if next.len() == out.len() {
            return out;
        }
        out = next;
    }
}

/// `{x : χ_x(v) = 1 for every v in the span}`, i.e. the trace pairing vanishes.
pub fn annihilator_scan(ctx: &GroupCtx, vectors: &[usize]) -> Vec<usize> {
    let span = span_closure(ctx, vectors);
    (0..ctx.order()).filter(|&x| span.iter().all(|&v| ctx.phase(v, x).0 == 0)).collect()
}
