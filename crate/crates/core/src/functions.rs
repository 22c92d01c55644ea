//! Dense functions on a finite abelian group, with Fourier analysis.
//!
//! Conventions: `ĥ(ξ) = Σ_x h(x)·conj(χ_ξ(x))`, inverse with a `1/N` factor,
//! `(h1 ∗ h2)(x) = Σ_y h1(y) h2(x − y)`. Physical-side norms are plain sums,
//! Fourier-side norms are means over the dual group.

use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{GroupCtx, GroupKind};

/// Largest imaginary part tolerated in a real-tagged function.
pub const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Fast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dfn {
    ctx: Arc<GroupCtx>,
    values: Vec<Complex64>,
    tag: Tag,
}

impl Dfn {
    pub fn zeros(ctx: &Arc<GroupCtx>) -> Self {
        Dfn { ctx: ctx.clone(), values: vec![Complex64::new(0.0, 0.0); ctx.order()], tag: Tag::Real }
    }

    pub fn from_real(ctx: &Arc<GroupCtx>, values: Vec<f64>) -> Result<Self> {
        if values.len() != ctx.order() {
            return Err(Error::usage(format!(
                "function has {} values, group order is {}",
                values.len(),
                ctx.order()
            )));
        }
        Ok(Dfn {
            ctx: ctx.clone(),
            values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            tag: Tag::Real,
        })
    }

    pub fn from_complex(ctx: &Arc<GroupCtx>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != ctx.order() {
            return Err(Error::usage(format!(
                "function has {} values, group order is {}",
                values.len(),
                ctx.order()
            )));
        }
        Ok(Dfn { ctx: ctx.clone(), values, tag: Tag::Complex })
    }

    /// Indicator of a list of element indices.
    pub fn indicator(ctx: &Arc<GroupCtx>, elements: &[usize]) -> Self {
        let mut h = Self::zeros(ctx);
        for &x in elements {
            h.values[x] = Complex64::new(1.0, 0.0);
        }
        h
    }

    pub fn delta(ctx: &Arc<GroupCtx>, at: usize) -> Self {
        Self::indicator(ctx, &[at])
    }

    pub fn constant(ctx: &Arc<GroupCtx>, c: f64) -> Self {
        Dfn {
            ctx: ctx.clone(),
            values: vec![Complex64::new(c, 0.0); ctx.order()],
            tag: Tag::Real,
        }
    }

    pub fn ctx(&self) -> &Arc<GroupCtx> {
        &self.ctx
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: usize) -> Complex64 {
        self.values[x]
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Largest imaginary part, the quantity bounded by [`REAL_TOL`] for real functions.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Re-tags as real after checking the imaginary parts, dropping them.
    pub fn into_real(mut self, tol: f64) -> Result<Self> {
        let im = self.max_imag();
        if im > tol {
            return Err(Error::Mismatch(format!("imaginary part {im:e} exceeds {tol:e}")));
        }
        for v in &mut self.values {
            v.im = 0.0;
        }
        self.tag = Tag::Real;
        Ok(self)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i] != Complex64::new(0.0, 0.0)).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Dfn { ctx: self.ctx.clone(), values: self.values.iter().map(|&v| f(v)).collect(), tag: self.tag }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        let mut out = self.map(|v| v * c);
        out.tag = Tag::Complex;
        out
    }

    fn zip(&self, other: &Dfn, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        same_ctx(self, other)?;
        let tag = if self.tag == Tag::Real && other.tag == Tag::Real { Tag::Real } else { Tag::Complex };
        Ok(Dfn {
            ctx: self.ctx.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            tag,
        })
    }

    pub fn add(&self, other: &Dfn) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Dfn) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul_pointwise(&self, other: &Dfn) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    /// `x ↦ h(−x)`.
    pub fn reflect(&self) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for (x, &v) in self.values.iter().enumerate() {
            values[self.ctx.neg(x)] = v;
        }
        Dfn { ctx: self.ctx.clone(), values, tag: self.tag }
    }

    /// `x ↦ h(x − c)`.
    pub fn translate(&self, c: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for (x, &v) in self.values.iter().enumerate() {
            values[self.ctx.add(x, c)] = v;
        }
        Dfn { ctx: self.ctx.clone(), values, tag: self.tag }
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    /// Serializes as `ctx=<encoding> tag=<real|complex>` followed by one value per line.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let tag = match self.tag {
            Tag::Real => "real",
            Tag::Complex => "complex",
        };
        writeln!(w, "ctx={} tag={}", self.ctx, tag)?;
        for v in &self.values {
            match self.tag {
                Tag::Real => writeln!(w, "{}", v.re)?,
                Tag::Complex => writeln!(w, "{} {}", v.re, v.im)?,
            }
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::parse("empty function file"))??;
        let mut ctx = None;
        let mut tag = None;
        for field in header.split_whitespace() {
            if let Some(enc) = field.strip_prefix("ctx=") {
                ctx = Some(enc.parse::<GroupCtx>()?);
            } else if let Some(t) = field.strip_prefix("tag=") {
                tag = Some(match t {
                    "real" => Tag::Real,
                    "complex" => Tag::Complex,
                    other => return Err(Error::parse(format!("unknown tag '{other}'"))),
                });
            }
        }
        let ctx = Arc::new(ctx.ok_or_else(|| Error::parse("missing ctx= in header"))?);
        let tag = tag.ok_or_else(|| Error::parse("missing tag= in header"))?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(format!("bad number '{s}'")));
        let mut values = Vec::with_capacity(ctx.order());
        for line in lines {
            let line = line?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            match (tag, parts.as_slice()) {
                (_, []) => continue,
                (Tag::Real, [re]) => values.push(Complex64::new(num(re)?, 0.0)),
                (Tag::Complex, [re, im]) => values.push(Complex64::new(num(re)?, num(im)?)),
                _ => return Err(Error::parse(format!("bad value line '{line}'"))),
            }
        }
        let mut h = Dfn::from_complex(&ctx, values)?;
        h.tag = tag;
        Ok(h)
    }
}

pub(crate) fn same_ctx(a: &Dfn, b: &Dfn) -> Result<()> {
    if Arc::ptr_eq(&a.ctx, &b.ctx) || a.ctx == b.ctx {
        Ok(())
    } else {
        Err(Error::usage(format!("group mismatch: {} vs {}", a.ctx, b.ctx)))
    }
}

/// Fourier transform by the fast route: mixed-radix/Bluestein FFT on `Z_M`,
/// coordinate-by-coordinate length-`q` transforms on `F_q^n`.
pub fn fourier(h: &Dfn) -> Dfn {
    transform_fast(h, false)
}

/// `O(N²)` reference transform summing characters directly.
pub fn fourier_direct(h: &Dfn) -> Dfn {
    let ctx = &h.ctx;
    let n = ctx.order();
    let support: Vec<(usize, Complex64)> =
        h.values.iter().copied().enumerate().filter(|(_, v)| v.norm_sqr() > 0.0).collect();
    let values = (0..n)
        .map(|xi| support.iter().map(|&(x, v)| v * ctx.character(x, xi).conj()).sum())
        .collect();
    Dfn { ctx: ctx.clone(), values, tag: Tag::Complex }
}

/// Inverse transform, `h(x) = (1/N) Σ_ξ H(ξ) χ_ξ(x)`.
pub fn inverse_fourier(big_h: &Dfn) -> Dfn {
    transform_fast(big_h, true)
}

pub fn inverse_fourier_direct(big_h: &Dfn) -> Dfn {
    let ctx = &big_h.ctx;
    let n = ctx.order();
    let values = (0..n)
        .map(|x| {
            let s: Complex64 = (0..n).map(|xi| big_h.values[xi] * ctx.character(x, xi)).sum();
            s / n as f64
        })
        .collect();
    Dfn { ctx: ctx.clone(), values, tag: Tag::Complex }
}

fn transform_fast(h: &Dfn, inverse: bool) -> Dfn {
    let ctx = &h.ctx;
    let n = ctx.order();
    let mut data = h.values.clone();
    match ctx.kind() {
        GroupKind::Cyclic { .. } => {
            let mut planner = FftPlanner::<f64>::new();
            let fft =
                if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
            fft.process(&mut data);
        }
        GroupKind::VectorSpace { field, n: dim } => {
            let q = field.q() as usize;
            let p = field.p() as usize;
            let sign = if inverse { 1.0 } else { -1.0 };
            let roots: Vec<Complex64> = (0..p)
                .map(|k| Complex64::from_polar(1.0, sign * std::f64::consts::TAU * k as f64 / p as f64))
                .collect();
            // table[a*q + b] = e_q(±ab)
            let mut table = vec![Complex64::new(0.0, 0.0); q * q];
            for a in 0..q {
                for b in 0..q {
                    table[a * q + b] = roots[field.trace(field.mul(a as u32, b as u32)) as usize];
                }
            }
            let mut buf = vec![Complex64::new(0.0, 0.0); q];
            let mut stride = 1;
            for _ in 0..*dim {
                let block = stride * q;
                for base in (0..n).step_by(block) {
                    for off in 0..stride {
                        for (c, b) in buf.iter_mut().enumerate() {
                            *b = data[base + off + c * stride];
                        }
                        for xi in 0..q {
                            let row = &table[xi * q..(xi + 1) * q];
                            data[base + off + xi * stride] =
                                row.iter().zip(&buf).map(|(w, v)| w * v).sum();
                        }
                    }
                }
                stride = block;
            }
        }
    }
    if inverse {
        let inv = 1.0 / n as f64;
        for v in &mut data {
            *v *= inv;
        }
    }
    Dfn { ctx: ctx.clone(), values: data, tag: Tag::Complex }
}

/// `(h1 ∗ h2)(x) = Σ_y h1(y) h2(x − y)`.
pub fn convolve(h1: &Dfn, h2: &Dfn, method: Method) -> Result<Dfn> {
    same_ctx(h1, h2)?;
    let real = h1.tag == Tag::Real && h2.tag == Tag::Real;
    let out = match method {
        Method::Direct => {
            let ctx = &h1.ctx;
            let mut values = vec![Complex64::new(0.0, 0.0); ctx.order()];
            let s1: Vec<usize> = h1.support();
            let s2: Vec<usize> = h2.support();
            for &y in &s1 {
                for &z in &s2 {
                    values[ctx.add(y, z)] += h1.values[y] * h2.values[z];
                }
            }
            Dfn { ctx: ctx.clone(), values, tag: Tag::Complex }
        }
        Method::Fast => {
            let prod = fourier(h1).mul_pointwise(&fourier(h2))?;
            inverse_fourier(&prod)
        }
    };
    Ok(if real {
        Dfn { tag: Tag::Real, values: out.values.into_iter().map(|v| Complex64::new(v.re, 0.0)).collect(), ..out }
    } else {
        out
    })
}

/// `Σ_x |h(x)|^p`.
pub fn sum_pow(h: &Dfn, p: f64) -> f64 {
    h.values.iter().map(|v| v.norm().powf(p)).sum()
}

/// Dual-group mean `(1/N) Σ_ξ |H(ξ)|^p` of a Fourier table.
pub fn mean_pow(big_h: &Dfn, p: f64) -> f64 {
    sum_pow(big_h, p) / big_h.len() as f64
}

pub fn sup_abs(h: &Dfn) -> f64 {
    h.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// `Σ|h|`.
    pub l1: f64,
    /// `(Σ|h|²)^{1/2}`.
    pub l2: f64,
    pub p: f64,
    /// `Σ|h|^p`.
    pub lp_sum: f64,
    pub sup: f64,
    /// `max_ξ |ĥ(ξ)|`.
    pub fourier_sup: f64,
    /// `((1/N) Σ_ξ |ĥ(ξ)|^p)^{1/p}`.
    pub fourier_lp: f64,
}

pub fn norms(h: &Dfn, p: f64) -> Result<Norms> {
    if !(p >= 1.0) {
        return Err(Error::usage(format!("norm exponent must be >= 1, got {p}")));
    }
    let hat = fourier(h);
    Ok(Norms {
        l1: sum_pow(h, 1.0),
        l2: sum_pow(h, 2.0).sqrt(),
        p,
        lp_sum: sum_pow(h, p),
        sup: sup_abs(h),
        fourier_sup: sup_abs(&hat),
        fourier_lp: mean_pow(&hat, p).powf(1.0 / p),
    })
}

/// Integer-valued function, used wherever an assertion must be exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntFn {
    ctx: Arc<GroupCtx>,
    values: Vec<i64>,
}

impl IntFn {
    pub fn zeros(ctx: &Arc<GroupCtx>) -> Self {
        IntFn { ctx: ctx.clone(), values: vec![0; ctx.order()] }
    }

    pub fn indicator(ctx: &Arc<GroupCtx>, elements: &[usize]) -> Self {
        let mut f = Self::zeros(ctx);
        for &x in elements {
            f.values[x] = 1;
        }
        f
    }

    pub fn ctx(&self) -> &Arc<GroupCtx> {
        &self.ctx
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, x: usize) -> i64 {
        self.values[x]
    }

    pub fn reflect(&self) -> Self {
        let mut values = vec![0; self.values.len()];
        for (x, &v) in self.values.iter().enumerate() {
            values[self.ctx.neg(x)] = v;
        }
        IntFn { ctx: self.ctx.clone(), values }
    }

    pub fn sum(&self) -> i128 {
        self.values.iter().map(|&v| v as i128).sum()
    }

    /// Exact `Σ_x f(x)^s`.
    pub fn power_sum(&self, s: u32) -> Result<i128> {
        self.values.iter().try_fold(0i128, |acc, &v| {
            (v as i128).checked_pow(s).and_then(|t| acc.checked_add(t)).ok_or(Error::Overflow("power sum"))
        })
    }

    /// Exact convolution by enumeration of both supports.
    pub fn convolve(&self, other: &IntFn) -> Result<IntFn> {
        if !(Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx) {
            return Err(Error::usage(format!("group mismatch: {} vs {}", self.ctx, other.ctx)));
        }
        let s1: Vec<usize> = (0..self.values.len()).filter(|&i| self.values[i] != 0).collect();
        let s2: Vec<usize> = (0..other.values.len()).filter(|&i| other.values[i] != 0).collect();
        let mut values = vec![0i64; self.values.len()];
        for &y in &s1 {
            for &z in &s2 {
                let t = self.values[y].checked_mul(other.values[z]).ok_or(Error::Overflow("convolution"))?;
                let slot = &mut values[self.ctx.add(y, z)];
                *slot = slot.checked_add(t).ok_or(Error::Overflow("convolution"))?;
            }
        }
        Ok(IntFn { ctx: self.ctx.clone(), values })
    }

    pub fn to_dfn(&self) -> Dfn {
        Dfn {
            ctx: self.ctx.clone(),
            values: self.values.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect(),
            tag: Tag::Real,
        }
    }
}
