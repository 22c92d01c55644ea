//! End-to-end transference run: dense model, the two counts `T(f)` and
//! `T(F)`, the chain bounding their difference, the level set of `f`, and
//! (in `F_q^n`) supersaturation on that level set.

use serde::Serialize;

use super::{
    find_nontrivial_solution, level_set_extract_in, padded_modulus, trivial_solution_value_with_len,
    verify_counting_lemma, verify_supersaturation, verify_telescoping, EquationSpec,
};
use crate::dense_model::{build_dense_model_with_len, integer_window, verify_model_properties, ModelMode};
use crate::energy::c_s;
use crate::error::{Error, Result};
use crate::functions::{convolve, fourier, Dfn, Method};
use crate::report::VerificationReport;
use crate::sets::{require_kst_free, tuple_stats, SetA};
use crate::spectral::{ratio_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineParams {
    pub s: u32,
    pub t: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub eps: Rational,
    /// Exponent `C` in the reference curve `(ρ/2k)^C` for supersaturation.
    pub supersat_exponent: f64,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl PipelineParams {
    pub fn new(s: u32, t: u32, eps: Rational) -> Self {
        PipelineParams { s, t, eps, supersat_exponent: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub report: VerificationReport,
    /// `N`: the interval length, or the group order in `F_q^n`.
    pub n: u64,
    /// `(window, modulus)` of the padded cyclic group, if one was used.
    pub padding: Option<(u64, u64)>,
    pub equation_free: bool,
    pub level_set: SetA,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

pub fn run_transference_pipeline(a: &SetA, eq: &EquationSpec, s: u32, t: u32, eps: Rational) -> Result<PipelineReport> {
    run_pipeline(a, eq, &PipelineParams::new(s, t, eps))
}

/// Cyclic input is read as a subset of `[0, N)` with `N` the modelled
/// length, shifted by `⌈εN⌉` into a window of length `N + 2⌈εN⌉ + 1` so that
/// the Bohr smoothing stays inside it, and counted in `Z_M` with `M` padded
/// for the equation.
pub fn run_pipeline(a: &SetA, eq: &EquationSpec, params: &PipelineParams) -> Result<PipelineReport> {
    let PipelineParams { s, t, eps, supersat_exponent } = *params;
    if a.is_empty() {
        return Err(Error::usage("pipeline needs a nonempty set"));
    }
    let cyclic = a.ctx().is_cyclic();
    let n = a.ctx().model_len();
    let (work, mode, padding, domain) = if cyclic {
        let work = integer_window(a, eps, |w| padded_modulus(eq, w))?;
        let (window, m) = (work.ctx().model_len(), work.ctx().order() as u64);
        (work, ModelMode::IntegerModel, Some((window, m)), window)
    } else {
        (a.clone(), ModelMode::FiniteField, None, n)
    };
    eq.validate(work.ctx())?;
    require_kst_free(&work, s as usize, t as usize)?;

    let k = eq.k();
    let nf = n as f64;
    let mut r = VerificationReport::new("transference_pipeline");
    r.input("eq", eq.to_string())
        .input("s", s)
        .input("t", t)
        .input("eps", format!("{}/{}", eps.numer(), eps.denom()))
        .input("N", n)
        .input("set_size", a.len())
        .input("mode", mode.to_string());
    if let Some((w, m)) = padding {
        r.input("window", w).input("modulus", m);
    }

    let witness = find_nontrivial_solution(eq, &work)?;
    let equation_free = witness.is_none();
    r.input("equation_free", equation_free);
    if let Some(xs) = &witness {
        r.note(format!("nontrivial solution present: {xs:?}; T(F) is not diagonal"));
    }

    let model = build_dense_model_with_len(&work, s, t, eps, mode, n)?;
    r.section(verify_model_properties(&model, &work, s, t)?);
    r.qty("smoother_size", model.smoother.len()).qty("spectrum_size", model.spectrum.len());

    let scale = nf.powf(1.0 / s as f64);
    let f = model.f.clone();
    let big_f = work.indicator().scale(scale);
    if equation_free {
        let (_, diag) = trivial_solution_value_with_len(eq, &work, s, n)?;
        r.section(diag);
    }
    let tele = verify_telescoping(eq, &f, &big_f)?;
    if k >= 5 {
        r.section(verify_counting_lemma(eq, &f, &vec![f.clone(); k])?);
    }

    let sum_f = f.sum().re;
    let delta = sum_f / domain as f64;
    let (level, lrep) = level_set_extract_in(&f, delta, s as f64, domain)?;
    r.section(lrep);
    if !cyclic {
        r.section(verify_supersaturation(eq, &level, supersat_exponent)?);
    }

    // measured ledger
    let qty = |name: &str| tele.quantities.get(name).map(|v| v.as_f64()).unwrap_or(0.0);
    let t_f = qty("T_f_re");
    let t_big = qty("T_F_re");
    let diff = qty("difference_abs");
    let ghat = qty("ghat_sup");
    let nu = Dfn::from_real(
        f.ctx(),
        f.values().iter().zip(big_f.values()).map(|(x, y)| x.norm() + y.norm()).collect(),
    )?;
    let sum_nu = nu.sum().re;
    let e2_nu: f64 = convolve(&nu, &nu, Method::Fast)?.values().iter().map(|v| v.norm_sqr()).sum();
    let big_delta = big_f.sum().re / nf;
    let diagonal = big_delta * nf.powf(1.0 + (k as f64 - 1.0) / s as f64);
    let st = tuple_stats(&work, s as usize, t as usize);
    let eta = st.excess() as f64 / (a.len() as f64).powi(s as i32);
    let fh = fourier(&f);
    let f_gap = fh
        .values()
        .iter()
        .zip(fourier(&big_f).values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);

    r.qty("T_f", t_f).qty("T_F", t_big).qty("T_difference_abs", diff).qty("ghat_sup", ghat);
    r.qty("sum_nu", sum_nu).qty("E2_nu", e2_nu).qty("delta_F", big_delta).qty("delta_f", delta);
    r.qty("diagonal_value", diagonal).qty("level_set_size", level.len()).qty("eta", eta);
    r.section(tele);

    r.ratio("T(f)/N^(k-1)", t_f / nf.powi(k as i32 - 1));
    r.ratio("ghat_sup/(eps N)", ghat / (ratio_f64(&eps) * nf));
    r.ratio("fourier_gap/(eps N)", f_gap / (ratio_f64(&eps) * nf));
    r.ratio("sum_nu/N", sum_nu / nf);
    r.ratio("E2(nu)/N^3", e2_nu / nf.powi(3));
    r.ratio("T(F)/(N^(k/s)|A|)", t_big / (nf.powf(k as f64 / s as f64) * a.len() as f64));
    r.ratio("T(F)/diagonal_value", t_big / diagonal);
    if ghat > 0.0 {
        r.ratio("|T(f)-T(F)|/(N^(k-2) ghat_sup)", diff / (nf.powi(k as i32 - 2) * ghat));
    }
    r.ratio("level_set_density", level.len() as f64 / domain as f64);
    r.ratio("eta_times_A^c_s", eta * (a.len() as f64).powf(c_s(s)));
    r.ratio("delta_F", big_delta);
    r.ratio("smoother_size/N", model.smoother.len() as f64 / nf);

    Ok(PipelineReport { report: r, n, padding, equation_free, level_set: level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FieldCtx, GroupCtx};
    use std::sync::Arc;
    use crate::sets::{equation_free_greedy, erdos_turan_sidon};

    #[test]
    fn sidon_pipeline_passes() {
        let a = erdos_turan_sidon(11, None).unwrap();
        let eq: EquationSpec = "1,1,1,-1,-2".parse().unwrap();
        let p = run_transference_pipeline(&a, &eq, 2, 2, Rational::new(1, 8)).unwrap();
        assert!(p.passed(), "{:?}", p.report.failed_assertions());
        assert!(p.report.find_section("telescoping").is_some());
    }

    #[test]
    fn singleton_pipeline() {
        let g = Arc::new(GroupCtx::interval_model(50, 100).unwrap());
        let a = SetA::from_elements(&g, vec![7]).unwrap();
        let eq: EquationSpec = "1,1,-2".parse().unwrap();
        let p = run_transference_pipeline(&a, &eq, 2, 2, Rational::new(1, 8)).unwrap();
        assert!(p.equation_free);
        assert!(p.passed(), "{:?}", p.report.failed_assertions());
        let ratio = p.report.measured_ratios["T(F)/(N^(k/s)|A|)"].as_f64();
        assert!((ratio - 1.0).abs() < 1e-8);
    }

    #[test]
    fn finite_field_pipeline() {
        let g = Arc::new(GroupCtx::vector_space(FieldCtx::prime(3).unwrap(), 4).unwrap());
        let eq: EquationSpec = "1,1,1".parse().unwrap();
        let a = equation_free_greedy(&g, &eq, 3, Some((2, 3))).unwrap();
        let p = run_transference_pipeline(&a, &eq, 2, 3, Rational::new(1, 4)).unwrap();
        assert!(p.equation_free);
        assert!(p.passed(), "{:?}", p.report.failed_assertions());
        assert!(p.report.find_section("supersaturation").is_some());
    }
}
