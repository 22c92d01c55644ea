//! Dense models of sparse K_{s,t}-free sets: `f = N^{1/s}·1_A ∗ μ`, with `μ`
//! uniform on a Bohr set (cyclic model of an interval) or on the annihilator
//! of the span of the large spectrum (`F_q^n`).
//!
//! The smoothed function is stored in floating point, but every exact claim
//! is also checked on the integer object `1_A ∗ 1_smoother`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::c_s;
use crate::error::{Error, Result};
use crate::functions::{fourier, sup_abs, Dfn, IntFn};
use crate::report::{Tolerance, VerificationReport, FLOAT_LE};
use crate::sets::{rep_tuple, require_kst_free, tuple_stats, SetA};
use crate::spectral::{annihilator, bohr_set, ratio_f64, span, spectrum, BohrSet, Rational, Spectrum, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelMode {
    IntegerModel,
    FiniteField,
}

impl FromStr for ModelMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integer" | "integer_model" | "int" => Ok(ModelMode::IntegerModel),
            "ffield" | "finite_field" | "ff" => Ok(ModelMode::FiniteField),
            _ => Err(Error::parse(format!("unknown model mode '{s}'"))),
        }
    }
}

impl fmt::Display for ModelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelMode::IntegerModel => "integer_model",
            ModelMode::FiniteField => "finite_field",
        })
    }
}

#[derive(Debug, Clone)]
pub enum Smoother {
    Bohr(BohrSet),
    Subspace(Subspace),
}

impl Smoother {
    pub fn len(&self) -> usize {
        match self {
            Smoother::Bohr(b) => b.len(),
            Smoother::Subspace(h) => h.size(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn elements(&self) -> Vec<usize> {
        match self {
            Smoother::Bohr(b) => b.elements.clone(),
            Smoother::Subspace(h) => h.elements(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub mass: f64,
    pub fourier_gap: f64,
    /// `Σ f^s`.
    pub ls_norm: f64,
    pub smoother_size: usize,
    pub spectrum_size: usize,
}

#[derive(Debug, Clone)]
pub struct DenseModel {
    pub f: Dfn,
    pub mode: ModelMode,
    pub smoother: Smoother,
    pub spectrum: Spectrum,
    pub s: u32,
    pub t: u32,
    pub eps: Rational,
    /// The length `N` whose `s`-th root scales the model.
    pub n_len: u64,
    /// `1_A ∗ 1_smoother`, so that `f = N^{1/s}/|smoother| · smoothed`.
    pub smoothed: IntFn,
    pub diagnostics: Diagnostics,
}

impl DenseModel {
    pub fn scale(&self) -> f64 {
        (self.n_len as f64).powf(1.0 / self.s as f64)
    }
}

/// `⌈εN⌉`: how far the Bohr smoothing of a subset of `[0, N)` can spill
/// past either end of the interval.
pub fn window_margin(n_len: u64, eps: Rational) -> u64 {
    (*eps.numer() as u128 * n_len as u128).div_ceil(*eps.denom() as u128) as u64
}

/// Re-embeds a subset of `[0, N)` at offset `⌈εN⌉` inside an interval of
/// length `N + 2⌈εN⌉ + 1`, modelled in `Z_M` with `M = modulus(window)`.
pub fn integer_window(a: &SetA, eps: Rational, modulus: impl FnOnce(u64) -> u64) -> Result<SetA> {
    if !a.ctx().is_cyclic() {
        return Err(Error::usage("integer window needs a cyclic set"));
    }
    let n = a.ctx().model_len();
    let e = window_margin(n, eps);
    let window = n + 2 * e + 1;
    let ctx = std::sync::Arc::new(crate::groups::GroupCtx::interval_model(window, modulus(window))?);
    a.embed(&ctx, e)
}

pub fn build_dense_model(a: &SetA, s: u32, t: u32, eps: Rational, mode: ModelMode) -> Result<DenseModel> {
    build_dense_model_with_len(a, s, t, eps, mode, a.ctx().model_len())
}

/// As [`build_dense_model`] with an explicit `N`, for sets embedded in a
/// padded window of a larger cyclic group.
pub fn build_dense_model_with_len(
    a: &SetA,
    s: u32,
    t: u32,
    eps: Rational,
    mode: ModelMode,
    n_len: u64,
) -> Result<DenseModel> {
    if *eps.numer() == 0 || eps >= Rational::from_integer(1) {
        return Err(Error::usage("eps must lie in (0, 1)"));
    }
    match (mode, a.ctx().is_cyclic()) {
        (ModelMode::IntegerModel, false) => return Err(Error::usage("integer model needs a cyclic group")),
        (ModelMode::FiniteField, true) => return Err(Error::usage("finite-field model needs a vector-space group")),
        _ => {}
    }
    if a.is_empty() {
        return Err(Error::usage("dense model of the empty set"));
    }
    require_kst_free(a, s as usize, t as usize)?;
    let spec = spectrum(a, ratio_f64(&eps))?;
    let smoother = match mode {
        ModelMode::IntegerModel => Smoother::Bohr(bohr_set(&spec, eps, n_len)?),
        ModelMode::FiniteField => Smoother::Subspace(annihilator(&span(a.ctx(), &spec.frequencies)?)),
    };
    let smoothed = a.indicator_int().convolve(&IntFn::indicator(a.ctx(), &smoother.elements()))?;
    let scale = (n_len as f64).powf(1.0 / s as f64);
    let factor = scale / smoother.len() as f64;
    let f = Dfn::from_real(a.ctx(), smoothed.values().iter().map(|&v| v as f64 * factor).collect())?;
    let gap = {
        let fh = fourier(&f);
        let ah = fourier(&a.indicator());
        fh.values().iter().zip(ah.values()).map(|(x, y)| (x - y * scale).norm()).fold(0.0, f64::max)
    };
    let diagnostics = Diagnostics {
        mass: f.sum().re,
        fourier_gap: gap,
        ls_norm: f.values().iter().map(|v| v.re.powi(s as i32)).sum(),
        smoother_size: smoother.len(),
        spectrum_size: spec.len(),
    };
    Ok(DenseModel { f, mode, smoother, spectrum: spec, s, t, eps, n_len, smoothed, diagnostics })
}

/// Properties (i)–(iii): mass, Fourier closeness, and the `L^s` bound.
pub fn verify_model_properties(m: &DenseModel, a: &SetA, s: u32, t: u32) -> Result<VerificationReport> {
    let ctx = a.ctx();
    let n = m.n_len as f64;
    let scale = m.scale();
    let eps = ratio_f64(&m.eps);
    let size = a.len() as i128;
    let sm = m.smoother.len() as i128;
    let mut r = VerificationReport::new("dense_model_properties");
    r.input("mode", m.mode.to_string())
        .input("s", s)
        .input("t", t)
        .input("eps", format!("{}/{}", m.eps.numer(), m.eps.denom()))
        .input("N", m.n_len)
        .input("set_size", a.len());
    r.qty("smoother_size", sm).qty("spectrum_size", m.spectrum.len()).qty("N^(1/s)", scale);

    // (i)
    let mut mass = VerificationReport::new("mass");
    mass.assert_eq("sum 1_A*1_smoother = |A||smoother|", m.smoothed.sum(), size * sm);
    mass.assert_close("sum f = N^(1/s)|A|", m.f.sum().re, scale * size as f64, Tolerance::rel(1e-10));
    mass.assert_true("f >= 0", m.smoothed.values().iter().all(|&v| v >= 0));
    r.section(mass);

    // (ii)
    let fh = fourier(&m.f);
    let ah = fourier(&a.indicator());
    let mu = fourier(&Dfn::indicator(ctx, &m.smoother.elements()).scale(1.0 / sm as f64));
    let mut close = VerificationReport::new("fourier_closeness");
    let prod_err = fh
        .values()
        .par_iter()
        .zip(ah.values().par_iter().zip(mu.values().par_iter()))
        .map(|(x, (y, z))| (x - y * z * scale).norm())
        .reduce(|| 0.0, f64::max);
    close.assert_close_scaled(
        "f^ = N^(1/s) 1_A^ mu^",
        prod_err,
        0.0,
        scale * size as f64,
        Tolerance::rel(1e-9),
    );
    let spec_mask: Vec<bool> = {
        let mut v = vec![false; ctx.order()];
        for &xi in &m.spectrum.frequencies {
            v[xi] = true;
        }
        v
    };
    let gap = |mask: &(dyn Fn(usize) -> bool + Sync)| {
        (0..ctx.order())
            .into_par_iter()
            .filter(|&xi| mask(xi))
            .map(|xi| (fh.get(xi) - ah.get(xi) * scale).norm())
            .reduce(|| 0.0, f64::max)
    };
    let total_gap = gap(&|_| true);
    close.qty("fourier_gap", total_gap);
    match &m.smoother {
        Smoother::Subspace(h) => {
            let v = annihilator(h);
            let off_v: Vec<usize> = (0..ctx.order()).filter(|&xi| !v.contains(xi)).collect();
            close.assert_true(
                "xi not in V implies xi not in Spec",
                off_v.iter().all(|&xi| ah.get(xi).norm() < eps * size as f64),
            );
            let off = off_v.iter().map(|&xi| fh.get(xi).norm()).fold(0.0, f64::max);
            close.assert_le_f64("|f^| vanishes off V", off, 1e-8 * ctx.order() as f64, Tolerance::new(0.0, 0.0));
            close.assert_le_f64("||f^ - N^(1/s) 1_A^||_inf <= eps N^(1/s)|A|", total_gap, eps * scale * size as f64, FLOAT_LE);
        }
        Smoother::Bohr(_) => {
            let on = m
                .spectrum
                .frequencies
                .iter()
                .map(|&xi| (Complex64::new(1.0, 0.0) - mu.get(xi)).norm())
                .fold(0.0, f64::max);
            close.qty("max_on_spec_|1-mu^|", on);
            close.assert_le_f64(
                "|1 - mu_B^(xi)| <= 2 pi eps on Spec",
                on,
                std::f64::consts::TAU * eps,
                FLOAT_LE,
            );
            let off = gap(&|xi| !spec_mask[xi]);
            close.assert_le_f64("off Spec gap <= 2 eps N^(1/s)|A|", off, 2.0 * eps * scale * size as f64, FLOAT_LE);
            close.assert_le_f64(
                "gap <= 2 pi eps N^(1/s)|A|",
                total_gap,
                std::f64::consts::TAU * eps * scale * size as f64,
                FLOAT_LE,
            );
        }
    }
    close.ratio("gap_over_eps_N", total_gap / (eps * n));
    close.ratio("gap_over_eps_N^(1/s)|A|", total_gap / (eps * scale * size as f64));
    r.section(close);

    // (iii)
    let st = tuple_stats(a, s as usize, t as usize);
    let big_s = m.smoothed.power_sum(s)?;
    let excess = st.excess();
    let mut ls = VerificationReport::new("ls_bound");
    ls.qty("S", big_s).qty("excess", excess);
    ls.assert_le(
        "t*S <= t^2 |smoother|^s + excess*|smoother|",
        BigInt::from(t) * BigInt::from(big_s),
        BigInt::from(t * t) * BigInt::from(sm).pow(s) + BigInt::from(excess) * BigInt::from(sm),
    );
    let lsn: f64 = m.f.values().iter().map(|v| v.re.powi(s as i32)).sum();
    let bound = n * (t as f64 + excess as f64 / (t as f64 * (sm as f64).powi(s as i32 - 1)));
    ls.qty("sum_f^s", lsn);
    ls.assert_le_f64("sum f^s <= N(t + excess/(t|smoother|^(s-1)))", lsn, bound, FLOAT_LE);
    ls.ratio("sum_f^s_over_N", lsn / n);
    let eta = excess as f64 / (size as f64).powi(s as i32);
    ls.ratio("eta_times_A^c_s", eta * (size as f64).powf(c_s(s)));
    ls.ratio("smoother_density", sm as f64 / ctx.order() as f64);
    if let Smoother::Bohr(_) = m.smoother {
        // |B| = exp(-eps^-C) N solved for C
        let l = (n / sm as f64).ln();
        if l > 0.0 {
            ls.ratio("bohr_exponent", l.ln() / (1.0 / eps).ln());
        }
    }
    r.section(ls);
    Ok(r)
}

/// The finite-field count `S = Σ_x (1_A ∗ 1_H)(x)^s` through the sets
/// `S_h = {x : x − h_i ∈ A for all i}`, `h ∈ H^s`.
pub fn verify_s_decomposition(a: &SetA, s: u32, t: u32, h: &Subspace) -> Result<VerificationReport> {
    if a.ctx().is_cyclic() || a.ctx() != h.ctx() {
        return Err(Error::usage("decomposition needs A and H in the same vector space"));
    }
    if s < 2 {
        return Err(Error::usage("need s >= 2"));
    }
    require_kst_free(a, s as usize, t as usize)?;
    let ctx = a.ctx();
    let hs = h.elements();
    let hsize = hs.len() as u128;
    let direct = a.indicator_int().convolve(&IntFn::indicator(ctx, &hs))?.power_sum(s)?;
    let excess = tuple_stats(a, s as usize, t as usize).excess();

    // Tuples with h_1 = 0; translating h by a common element translates S_h.
    let rest = s as usize - 1;
    let total = hs.len().pow(rest as u32);
    let per: Vec<(u128, u128, u128, u64)> = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut shifts = Vec::with_capacity(rest);
            for _ in 0..rest {
                shifts.push(hs[code % hs.len()]);
                code /= hs.len();
            }
            let members: Vec<usize> = a
                .elements()
                .iter()
                .copied()
                .filter(|&x| shifts.iter().all(|&g| a.contains(ctx.sub(x, g))))
                .collect();
            let k = members.len() as u128;
            let over = k.saturating_sub(t as u128);
            let mut bad = 0u64;
            for &x in &members {
                let mut tuple = vec![x];
                tuple.extend(shifts.iter().map(|&g| ctx.sub(x, g)));
                if rep_tuple(a, &tuple).map_or(true, |r| r as u128 + 1 != k) {
                    bad += 1;
                }
            }
            (k, over, k * over, bad)
        })
        .collect();
    let sum_size: u128 = per.iter().map(|p| p.0).sum();
    let sum_over: u128 = per.iter().map(|p| p.1).sum();
    let sum_weighted: u128 = per.iter().map(|p| p.2).sum();
    let mismatches: u64 = per.iter().map(|p| p.3).sum();

    let mut r = VerificationReport::new("s_decomposition");
    r.input("s", s).input("t", t).input("set_size", a.len()).input("H_dim", h.dim());
    r.qty("S", direct).qty("excess", excess).qty("H_size", hsize);
    r.assert_eq("S = |H| * sum_(h_1=0) |S_h|", direct, BigInt::from(hsize) * BigInt::from(sum_size));
    r.assert_eq("r_A(a(x)) = |S_h| - 1 mismatches", mismatches, 0u64);
    r.assert_le(
        "t * sum (|S_h|-t)_+ <= sum |S_h|(|S_h|-t)_+",
        BigInt::from(t) * BigInt::from(sum_over),
        BigInt::from(sum_weighted),
    );
    r.assert_le("sum |S_h|(|S_h|-t)_+ <= excess (h_1 = 0)", sum_weighted, excess);
    r.assert_le(
        "t*S <= t^2 |H|^s + excess*|H|",
        BigInt::from(t) * BigInt::from(direct),
        BigInt::from(t * t) * BigInt::from(hsize).pow(s) + BigInt::from(excess) * BigInt::from(hsize),
    );
    Ok(r)
}

/// `‖f‖_∞` of the model, used to report how far `f` is from bounded.
pub fn model_sup(m: &DenseModel) -> f64 {
    sup_abs(&m.f)
}
