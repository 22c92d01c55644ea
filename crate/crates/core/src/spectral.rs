//! Large spectra, Bohr sets in `Z_M`, subspaces of `F_q^n` with their
//! annihilators, and numeric checks of the large sieve and of the
//! spectral dimension bound.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::set_energy;
use crate::error::{Error, Result};
use crate::functions::{fourier, Dfn, IntFn};
use crate::groups::{FieldCtx, GroupCtx};
use crate::report::{VerificationReport, FLOAT_LE};
use crate::sets::SetA;

pub type Rational = Ratio<u64>;

/// Relative slack on the spectrum threshold, absorbing FFT rounding at ties.
const TIE_SLACK: f64 = 1e-12;

/// Parses `p/q`, an integer, or a finite decimal such as `0.125`, exactly.
pub fn parse_ratio(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::parse(format!("bad rational '{s}'"));
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let whole: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let f: u64 = frac.parse().map_err(|_| bad())?;
        let num = whole.checked_mul(den).and_then(|w| w.checked_add(f)).ok_or_else(bad)?;
        return Ok(Rational::new(num, den));
    }
    let r: Rational = s.parse().map_err(|_| bad())?;
    Ok(r)
}

pub fn ratio_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    #[serde(skip)]
    ctx: Arc<GroupCtx>,
    pub eps: f64,
    pub set_size: usize,
    pub frequencies: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl Spectrum {
    pub fn ctx(&self) -> &Arc<GroupCtx> {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn contains(&self, xi: usize) -> bool {
        self.frequencies.contains(&xi)
    }
}

/// `{ξ : |1̂_A(ξ)| >= eps·|A|}`, sorted by `|1̂_A|` descending then index.
pub fn spectrum(a: &SetA, eps: f64) -> Result<Spectrum> {
    if a.is_empty() {
        return Err(Error::usage("spectrum of the empty set"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::usage(format!("spectrum threshold must lie in (0, 1], got {eps}")));
    }
    spectrum_of(&fourier(&a.indicator()), a.len(), eps, a.ctx())
}

/// Spectrum read off an already computed transform.
pub fn spectrum_of(hat: &Dfn, set_size: usize, eps: f64, ctx: &Arc<GroupCtx>) -> Result<Spectrum> {
    let threshold = eps * set_size as f64 * (1.0 - TIE_SLACK);
    let mut hits: Vec<(f64, usize)> = hat
        .values()
        .par_iter()
        .enumerate()
        .filter_map(|(xi, v)| (v.norm() >= threshold).then(|| (v.norm(), xi)))
        .collect();
    hits.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    Ok(Spectrum {
        ctx: ctx.clone(),
        eps,
        set_size,
        frequencies: hits.iter().map(|&(_, xi)| xi).collect(),
        values: hits.iter().map(|&(_, xi)| hat.get(xi)).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BohrSet {
    #[serde(skip)]
    ctx: Arc<GroupCtx>,
    /// `⌊εN⌋`, the largest admissible `|n|`.
    pub width: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub freq_eps: Rational,
    pub elements: Vec<usize>,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl BohrSet {
    pub fn ctx(&self) -> &Arc<GroupCtx> {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn indicator_int(&self) -> IntFn {
        IntFn::indicator(&self.ctx, &self.elements)
    }

    /// The uniform probability measure `μ_B`.
    pub fn measure(&self) -> Dfn {
        Dfn::indicator(&self.ctx, &self.elements).scale(1.0 / self.len() as f64)
    }
}

/// `‖num/den‖_𝕋 < eps`, exactly.
fn torus_lt(num: u64, den: u64, eps: &Rational) -> bool {
    let r = num % den;
    let dist = r.min(den - r) as u128;
    dist * (*eps.denom() as u128) < (*eps.numer() as u128) * den as u128
}

/// `{n : |n| <= εN, ‖nξ/M‖_𝕋 < ε for every ξ in the spectrum}`, with `N` the
/// modelled interval length.
pub fn bohr_set(spec: &Spectrum, eps: Rational, n_len: u64) -> Result<BohrSet> {
    let ctx = spec.ctx().clone();
    let m = ctx.modulus().ok_or_else(|| Error::usage("Bohr sets need a cyclic group"))?;
    if *eps.numer() == 0 || eps >= Rational::from_integer(1) {
        return Err(Error::usage("Bohr width must lie in (0, 1)"));
    }
    let width = (*eps.numer() as u128 * n_len as u128 / *eps.denom() as u128) as u64;
    if 2 * width >= m {
        return Err(Error::usage(format!("Bohr width {width} wraps around Z_{m}")));
    }
    let w = width as i64;
    let elements: Vec<usize> = (-w..=w)
        .into_par_iter()
        .filter_map(|n| {
            let x = ctx.from_signed(n);
            let ok = spec
                .frequencies
                .iter()
                .all(|&xi| torus_lt(((x as u128 * xi as u128) % m as u128) as u64, m, &eps));
            ok.then_some(x)
        })
        .collect();
    let mut elements = elements;
    elements.sort_unstable();
    Ok(BohrSet { ctx, width, freq_eps: eps, elements })
}

/// An `F_q`-subspace of `F_q^n`, kept as a reduced row echelon basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ctx: Arc<GroupCtx>,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

fn field_of(ctx: &GroupCtx) -> Result<&FieldCtx> {
    ctx.field().ok_or_else(|| Error::usage("subspaces need a vector-space group"))
}

fn rref(field: &FieldCtx, mut rows: Vec<Vec<u32>>) -> (Vec<Vec<u32>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(i) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, i);
        let inv = field.inv(rows[r][c]).expect("nonzero element is invertible");
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..ncols {
                    let sub = field.mul(f, rows[r][j]);
                    rows[i][j] = field.sub(rows[i][j], sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

impl Subspace {
    pub fn ctx(&self) -> &Arc<GroupCtx> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// `q^dim`.
    pub fn size(&self) -> usize {
        let q = self.ctx.field().map_or(1, |f| f.q() as usize);
        q.pow(self.dim() as u32)
    }

    /// Basis rows as coordinate vectors, in reduced echelon form.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn basis_indices(&self) -> Vec<usize> {
        self.rows.iter().map(|r| self.ctx.from_coords(r)).collect()
    }

    pub fn contains(&self, x: usize) -> bool {
        let field = self.ctx.field().expect("subspace lives in a vector space");
        let mut v = self.ctx.coords(x);
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c];
            if f != 0 {
                for (vj, &rj) in v.iter_mut().zip(row) {
                    *vj = field.sub(*vj, field.mul(f, rj));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    /// All `q^dim` elements, sorted.
    pub fn elements(&self) -> Vec<usize> {
        let field = self.ctx.field().expect("subspace lives in a vector space");
        let n = self.ctx.dim().unwrap_or(0);
        let mut out = vec![vec![0u32; n]];
        for row in &self.rows {
            let mut next = Vec::with_capacity(out.len() * field.q() as usize);
            for v in &out {
                for c in 0..field.q() {
                    next.push(v.iter().zip(row).map(|(&x, &r)| field.add(x, field.mul(c, r))).collect::<Vec<_>>());
                }
            }
            out = next;
        }
        let mut idx: Vec<usize> = out.iter().map(|v| self.ctx.from_coords(v)).collect();
        idx.sort_unstable();
        idx
    }

    pub fn to_set(&self) -> SetA {
        SetA::from_elements(&self.ctx, self.elements()).expect("subspace elements lie in the group")
    }

    /// The uniform probability measure `μ_H`.
    pub fn measure(&self) -> Dfn {
        Dfn::indicator(&self.ctx, &self.elements()).scale(1.0 / self.size() as f64)
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.rows == other.rows
    }
}

pub fn span(ctx: &Arc<GroupCtx>, vectors: &[usize]) -> Result<Subspace> {
    let field = field_of(ctx)?;
    if let Some(&v) = vectors.iter().find(|&&v| v >= ctx.order()) {
        return Err(Error::usage(format!("vector index {v} out of range")));
    }
    let (rows, pivots) = rref(field, vectors.iter().map(|&v| ctx.coords(v)).collect());
    Ok(Subspace { ctx: ctx.clone(), rows, pivots })
}

/// `V^⊥ = {x : ⟨x, v⟩ = 0 for all v ∈ V}` under the `F_q`-bilinear dot product.
pub fn annihilator(v: &Subspace) -> Subspace {
    let ctx = v.ctx.clone();
    let field = ctx.field().expect("subspace lives in a vector space");
    let n = ctx.dim().unwrap_or(0);
    let free: Vec<usize> = (0..n).filter(|c| !v.pivots.contains(c)).collect();
    let basis: Vec<Vec<u32>> = free
        .iter()
        .map(|&f| {
            let mut x = vec![0u32; n];
            x[f] = 1;
            for (row, &c) in v.rows.iter().zip(&v.pivots) {
                x[c] = field.neg(row[f]);
            }
            x
        })
        .collect();
    let (rows, pivots) = rref(field, basis);
    let out = Subspace { ctx, rows, pivots };
    debug_assert_eq!(out.dim() + v.dim(), n);
    out
}

/// `Σ_γ |Σ_{n<=N1} a(n) e(nγ)|² <= (N1 + 1/δ) Σ|a(n)|²` for points whose
/// `δ`-neighbourhoods are disjoint mod 1. `coeffs[i]` is `a(i+1)`.
pub fn large_sieve_check(points: &[f64], delta: f64, coeffs: &[Complex64]) -> Result<VerificationReport> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::usage(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            let d = (x - y).rem_euclid(1.0);
            if d.min(1.0 - d) < 2.0 * delta - 1e-12 {
                return Err(Error::usage(format!("points {x} and {y} are closer than 2*delta mod 1")));
            }
        }
    }
    let n1 = coeffs.len();
    let lhs: f64 = points
        .par_iter()
        .map(|&g| {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a * Complex64::from_polar(1.0, std::f64::consts::TAU * ((i + 1) as f64 * g).fract()))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    let mass: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
    let factor = n1 as f64 + 1.0 / delta;
    let mut r = VerificationReport::new("large_sieve");
    r.input("points", points.len()).input("delta", delta).input("N1", n1);
    r.qty("sum_S_squared", lhs).qty("coefficient_mass", mass);
    let ok = r.assert_le_f64("sum |S|^2 <= (N1 + 1/delta) sum |a|^2", lhs, factor * mass, FLOAT_LE);
    if !ok && lhs <= 2.0 * factor * mass {
        r.note("violates the sharp constant but satisfies the constant-2 relaxation");
    }
    if mass > 0.0 {
        r.ratio("lhs_over_rhs", lhs / (factor * mass));
    }
    Ok(r)
}

/// `dim Span(Spec) · ε⁴|A|⁴ <= Σ_{ξ∈Λ} |1̂_A(ξ)|⁴ <= N·E_2`, with `Λ` a
/// maximal independent subset of the spectrum picked greedily in spectrum order.
pub fn dimension_bound_check(a: &SetA, eps: Rational) -> Result<VerificationReport> {
    let ctx = a.ctx().clone();
    field_of(&ctx)?;
    let spec = spectrum(a, ratio_f64(&eps))?;
    let mut indep: Vec<usize> = Vec::new();
    let mut rank = 0;
    for &xi in &spec.frequencies {
        let mut trial = indep.clone();
        trial.push(xi);
        let d = span(&ctx, &trial)?.dim();
        if d > rank {
            rank = d;
            indep = trial;
        }
    }
    let v = span(&ctx, &spec.frequencies)?;
    let e2 = set_energy(a, 2)?;
    let n = ctx.order() as u64;
    let size = a.len() as u64;
    let fourth: f64 = indep
        .iter()
        .map(|&xi| spec.values[spec.frequencies.iter().position(|&f| f == xi).unwrap()].norm().powi(4))
        .sum();

    let mut r = VerificationReport::new("dimension_bound");
    r.input("eps", format!("{}/{}", eps.numer(), eps.denom())).input("set_size", a.len());
    r.qty("spectrum_size", spec.len()).qty("dim_span", v.dim()).qty("E_2", e2);
    r.assert_le("dim Span(Spec) <= |Spec|", v.dim(), spec.len());
    r.assert_eq("|independent subset| = dim Span(Spec)", indep.len(), v.dim());
    let (p, q) = (BigInt::from(*eps.numer()), BigInt::from(*eps.denom()));
    r.assert_le(
        "dim * eps^4 |A|^4 <= N * E_2",
        BigInt::from(v.dim()) * p.pow(4) * BigInt::from(size).pow(4),
        q.pow(4) * BigInt::from(n) * BigInt::from(e2),
    );
    let e4 = ratio_f64(&eps).powi(4) * (size as f64).powi(4);
    r.assert_le_f64("dim * eps^4 |A|^4 <= sum_Lambda |1_A^(xi)|^4", v.dim() as f64 * e4, fourth, FLOAT_LE);
    r.assert_le_f64("sum_Lambda |1_A^(xi)|^4 <= N * E_2", fourth, n as f64 * e2 as f64, FLOAT_LE);
    r.ratio("dim_over_bound", v.dim() as f64 * e4 / (n as f64 * e2 as f64));
    Ok(r)
}
