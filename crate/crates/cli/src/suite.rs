//! The verification suite: a corpus of generated sets for every configured
//! size, equation, `(s, t)` pair and `ε`, each fed to the verifiers of one
//! area. Jobs run on a bounded pool and are merged back in plan order, each
//! drawing randomness from a stream keyed by the run seed and its own name.

use std::sync::Arc;

use addlab::counting::{
    count_set_solutions, count_t, padded_modulus, run_pipeline, verify_counting_lemma, verify_telescoping,
    CountMethod, EquationSpec, PipelineParams,
};
use addlab::dense_model::{
    build_dense_model, build_dense_model_with_len, integer_window, verify_model_properties, verify_s_decomposition,
    ModelMode, Smoother,
};
use addlab::energy::{
    verify_lemma_e2, verify_lemma_es, verify_ra_large, verify_size_bound, verify_trivial_bounds, verify_vanishing,
};
use addlab::report::{Tolerance, FLOAT_LE};
use addlab::rng;
use addlab::sets::{equation_free_greedy, erdos_turan_sidon, greedy_kst_free, greedy_kst_free_interval, random_subset};
use addlab::spectral::{bohr_set, dimension_bound_check, large_sieve_check, ratio_f64, spectrum, Rational};
use addlab::{Dfn, FieldCtx, GroupCtx, SetA, VerificationReport};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::config::{Fault, SuiteConfig, SuiteName};
use crate::{error_report, CliError};

/// One row of the transference ledger, for plotting density against `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub n: u64,
    pub model: &'static str,
    pub eps: String,
    pub eq: String,
    pub set_size: usize,
    pub delta_f: f64,
    pub delta_big_f: f64,
    pub level_set_density: f64,
    pub ghat_ratio: f64,
    pub t_f_ratio: f64,
}

pub struct SuiteRun {
    pub report: VerificationReport,
    /// Sorted by `N`.
    pub ledger: Vec<LedgerRow>,
}

impl SuiteRun {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

type JobFn = Box<dyn Fn(u64) -> addlab::Result<(VerificationReport, Option<LedgerRow>)> + Send + Sync>;

struct Job {
    name: String,
    run: JobFn,
}

fn job<F>(jobs: &mut Vec<Job>, name: String, f: F)
where
    F: Fn(u64) -> addlab::Result<(VerificationReport, Option<LedgerRow>)> + Send + Sync + 'static,
{
    jobs.push(Job { name, run: Box::new(f) });
}

fn eps_tag(e: &Rational) -> String {
    format!("eps{}_{}", e.numer(), e.denom())
}

fn eq_tag(eq: &EquationSpec) -> String {
    eq.coeffs().iter().map(|a| a.to_string()).collect::<Vec<_>>().join("_")
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Largest prime `p` whose Erdős–Turán set fits in `[0, n)`.
fn sidon_prime(n: u64) -> Option<u64> {
    (2..n).take_while(|p| 2 * p * p + p <= n).filter(|&p| is_prime(p)).last()
}

/// Largest `d <= 6` with `3^d <= n`.
fn ternary_dim(n: u64) -> usize {
    (1..=6).take_while(|&d| 3u64.pow(d as u32) <= n).last().unwrap_or(1)
}

fn f3(dim: usize) -> addlab::Result<Arc<GroupCtx>> {
    Ok(Arc::new(GroupCtx::vector_space(FieldCtx::prime(3)?, dim)?))
}

fn random_complex(r: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
}

fn energy_jobs(cfg: &SuiteConfig, jobs: &mut Vec<Job>) {
    let mut primes = Vec::new();
    for &n in &cfg.sizes {
        for &(s, t) in &cfg.pairs {
            job(jobs, format!("energy/N{n}/s{s}t{t}"), move |seed| {
                let a = greedy_kst_free_interval(s as usize, t as usize, n, seed)?;
                Ok((energy_sections(&a, s, t)?, None))
            });
        }
        if let Some(p) = sidon_prime(n).filter(|p| !primes.contains(p)) {
            primes.push(p);
            job(jobs, format!("energy/sidon_p{p}"), move |_| Ok((energy_sections(&erdos_turan_sidon(p, None)?, 2, 2)?, None)));
        }
    }
    if cfg.fault == Some(Fault::NonFree) {
        job(jobs, "energy/injected_nonfree".into(), |_| {
            let ctx = Arc::new(GroupCtx::interval_model(20, 40)?);
            let a = SetA::from_elements(&ctx, vec![0, 1, 2, 3])?;
            Ok((verify_lemma_es(&a, 2, 2)?, None))
        });
    }
}

fn energy_sections(a: &SetA, s: u32, t: u32) -> addlab::Result<VerificationReport> {
    let mut r = VerificationReport::new("energy");
    r.input("set", a.provenance()).input("set_size", a.len()).input("s", s).input("t", t);
    r.section(verify_trivial_bounds(a, 2, s, None)?);
    r.section(verify_lemma_e2(a, s)?);
    r.section(verify_lemma_es(a, s, t)?);
    r.section(verify_ra_large(a, s, t)?);
    r.section(verify_size_bound(a, s, t)?);
    r.section(verify_vanishing(a, s, t)?);
    Ok(r)
}

fn spectral_jobs(cfg: &SuiteConfig, jobs: &mut Vec<Job>) {
    let mut dims = Vec::new();
    for &n in &cfg.sizes {
        for &eps in &cfg.eps {
            job(jobs, format!("spectral/N{n}/{}", eps_tag(&eps)), move |seed| {
                let a = greedy_kst_free_interval(2, 2, n, seed)?;
                Ok((spectral_interval(&a, eps, n, seed)?, None))
            });
        }
        let dim = ternary_dim(n);
        if !dims.contains(&dim) {
            dims.push(dim);
            for &eps in &cfg.eps {
                job(jobs, format!("spectral/F3^{dim}/{}", eps_tag(&eps)), move |seed| {
                    let a = greedy_kst_free(&f3(dim)?, 2, 2, seed)?;
                    Ok((dimension_bound_check(&a, eps)?, None))
                });
            }
        }
    }
}

fn spectral_interval(a: &SetA, eps: Rational, n: u64, seed: u64) -> addlab::Result<VerificationReport> {
    let ctx = a.ctx();
    let m = ctx.order();
    let spec = spectrum(a, ratio_f64(&eps))?;
    let bohr = bohr_set(&spec, eps, n)?;
    let mut r = VerificationReport::new("spectral");
    r.input("set_size", a.len()).input("eps", format!("{}/{}", eps.numer(), eps.denom())).input("M", m);
    r.qty("spectrum_size", spec.len()).qty("bohr_size", bohr.len()).qty("bohr_width", bohr.width);
    r.assert_true("0 in Spec", spec.contains(0));
    let e = ratio_f64(&eps);
    r.assert_le_f64(
        "|Spec| eps^2 |A|^2 <= M |A|",
        spec.len() as f64 * e * e * (a.len() as f64).powi(2),
        m as f64 * a.len() as f64,
        FLOAT_LE,
    );
    r.assert_true("0 in Bohr", bohr.elements.contains(&0));
    r.assert_true("Bohr = -Bohr", bohr.elements.iter().all(|&x| bohr.elements.contains(&ctx.neg(x))));
    r.assert_true("|n| <= width on Bohr", bohr.elements.iter().all(|&x| ctx.signed(x).unsigned_abs() <= bohr.width));
    r.ratio("spectrum_size_over_M", spec.len() as f64 / m as f64);
    r.ratio("bohr_size_over_N", bohr.len() as f64 / n as f64);

    let mut points: Vec<f64> = spec.frequencies.iter().map(|&xi| xi as f64 / m as f64).collect();
    points.sort_by(f64::total_cmp);
    let gap = points
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain(points.first().zip(points.last()).map(|(lo, hi)| 1.0 - hi + lo))
        .fold(1.0, f64::min);
    let delta = (gap / 2.0).min(0.5);
    let mut rr = rng::stream(seed, rng::label("large_sieve"));
    if points.len() > 1 && delta > 0.0 {
        r.section(large_sieve_check(&points, delta, &random_complex(&mut rr, n as usize))?);
    }
    Ok(r)
}

fn dense_jobs(cfg: &SuiteConfig, jobs: &mut Vec<Job>) {
    let mut dims = Vec::new();
    for &n in &cfg.sizes {
        for &eps in &cfg.eps {
            job(jobs, format!("dense_model/N{n}/{}", eps_tag(&eps)), move |seed| {
                let a = greedy_kst_free_interval(2, 2, n, seed)?;
                let work = integer_window(&a, eps, |w| 2 * w)?;
                let m = build_dense_model_with_len(&work, 2, 2, eps, ModelMode::IntegerModel, n)?;
                Ok((verify_model_properties(&m, &work, 2, 2)?, None))
            });
        }
        let dim = ternary_dim(n);
        if !dims.contains(&dim) {
            dims.push(dim);
            for &eps in &cfg.eps {
                job(jobs, format!("dense_model/F3^{dim}/{}", eps_tag(&eps)), move |seed| {
                    let a = greedy_kst_free(&f3(dim)?, 2, 3, seed)?;
                    let m = build_dense_model(&a, 2, 3, eps, ModelMode::FiniteField)?;
                    let mut r = verify_model_properties(&m, &a, 2, 3)?;
                    if let Smoother::Subspace(h) = &m.smoother {
                        r.section(verify_s_decomposition(&a, 2, 3, h)?);
                    }
                    Ok((r, None))
                });
            }
        }
    }
}

fn compare_counts(r: &mut VerificationReport, eq: &EquationSpec, a: &SetA, label: &str) -> addlab::Result<u128> {
    let c = count_set_solutions(eq, a)?;
    let fourier = count_t(eq, &vec![a.indicator(); eq.k()], CountMethod::Fourier)?.total;
    r.qty(&format!("{label}_brute"), c.total).qty(&format!("{label}_fourier_re"), fourier.re);
    let scale = (c.total as f64).max(1.0);
    r.assert_close_scaled(&format!("{label}: brute = Fourier"), fourier.re, c.total as f64, scale, Tolerance::rel(1e-9));
    r.assert_le_f64(&format!("{label}: Fourier count is real"), fourier.im.abs(), 1e-9 * scale, FLOAT_LE);
    r.assert_eq(&format!("{label}: trivial solutions = |A|"), c.trivial, a.len());
    Ok(c.total)
}

fn counting_jobs(cfg: &SuiteConfig, jobs: &mut Vec<Job>) {
    let mut dims = Vec::new();
    for &n in &cfg.sizes {
        let dim = ternary_dim(n);
        let new_dim = !dims.contains(&dim);
        dims.push(dim);
        for eq in &cfg.equations {
            let tag = eq_tag(eq);
            let e = eq.clone();
            job(jobs, format!("counting/N{n}/eq{tag}"), move |seed| {
                let ctx = Arc::new(GroupCtx::interval_model(n, padded_modulus(&e, n))?);
                Ok((counting_sections(&e, &ctx, seed)?, None))
            });
            let fits_f3 = eq.coeffs().iter().all(|a| a % 3 != 0);
            if new_dim && fits_f3 {
                let e = eq.clone();
                job(jobs, format!("counting/F3^{dim}/eq{tag}"), move |seed| {
                    Ok((counting_sections(&e, &f3(dim)?, seed)?, None))
                });
            }
            let e = eq.clone();
            job(jobs, format!("counting/Z{n}/eq{tag}/transference"), move |seed| {
                let ctx = Arc::new(GroupCtx::cyclic(n)?);
                let mut r = VerificationReport::new("transference_checks");
                let mut rr = rng::stream(seed, rng::label("families"));
                let nu: Vec<f64> = (0..n).map(|_| rr.gen_range(0.0..2.0)).collect();
                let f: Vec<f64> = (0..n).map(|_| rr.gen_range(0.0..2.0)).collect();
                let nu_fn = Dfn::from_real(&ctx, nu.clone())?;
                if e.k() >= 5 {
                    let fs = (0..e.k())
                        .map(|_| {
                            let vals = nu.iter().map(|&v| v * Complex64::from_polar(rr.gen_range(0.0..1.0), rr.gen_range(0.0..6.3))).collect();
                            Dfn::from_complex(&ctx, vals)
                        })
                        .collect::<addlab::Result<Vec<_>>>()?;
                    r.section(verify_counting_lemma(&e, &nu_fn, &fs)?);
                }
                r.section(verify_telescoping(&e, &Dfn::from_real(&ctx, f)?, &nu_fn)?);
                Ok((r, None))
            });
        }
    }
}

fn counting_sections(eq: &EquationSpec, ctx: &Arc<GroupCtx>, seed: u64) -> addlab::Result<VerificationReport> {
    let mut r = VerificationReport::new("counting");
    r.input("eq", eq.to_string()).input("group", ctx.to_string());
    let free = equation_free_greedy(ctx, eq, seed, None)?;
    r.qty("equation_free_size", free.len());
    let total = compare_counts(&mut r, eq, &free, "equation_free")?;
    r.assert_eq("equation-free: count = |A|", total, free.len());
    let density = (40.0 / ctx.order() as f64).min(0.3);
    let rnd = random_subset(ctx, density, rng::split_seed(seed, 1))?;
    r.qty("random_size", rnd.len());
    compare_counts(&mut r, eq, &rnd, "random")?;
    Ok(r)
}

fn ledger_row(p: &addlab::counting::PipelineReport, model: &'static str, eps: Rational, eq: &EquationSpec, set_size: usize) -> LedgerRow {
    let q = |k: &str| p.report.quantities.get(k).map_or(f64::NAN, |v| v.as_f64());
    let m = |k: &str| p.report.measured_ratios.get(k).map_or(f64::NAN, |v| v.as_f64());
    LedgerRow {
        n: p.n,
        model,
        eps: format!("{}/{}", eps.numer(), eps.denom()),
        eq: eq.to_string(),
        set_size,
        delta_f: q("delta_f"),
        delta_big_f: q("delta_F"),
        level_set_density: m("level_set_density"),
        ghat_ratio: m("ghat_sup/(eps N)"),
        t_f_ratio: m("T(f)/N^(k-1)"),
    }
}

fn pipeline_jobs(cfg: &SuiteConfig, jobs: &mut Vec<Job>) {
    let mut dims = Vec::new();
    for &n in &cfg.sizes {
        let dim = ternary_dim(n);
        let new_dim = !dims.contains(&dim);
        dims.push(dim);
        for eq in &cfg.equations {
            for &eps in &cfg.eps {
                let e = eq.clone();
                job(jobs, format!("pipeline/N{n}/eq{}/{}", eq_tag(eq), eps_tag(&eps)), move |seed| {
                    let a = greedy_kst_free_interval(2, 2, n, seed)?;
                    let p = run_pipeline(&a, &e, &PipelineParams::new(2, 2, eps))?;
                    let row = ledger_row(&p, "integer", eps, &e, a.len());
                    Ok((p.report, Some(row)))
                });
                if new_dim && eq.coeffs().iter().all(|a| a % 3 != 0) {
                    let e = eq.clone();
                    job(jobs, format!("pipeline/F3^{dim}/eq{}/{}", eq_tag(eq), eps_tag(&eps)), move |seed| {
                        let a = equation_free_greedy(&f3(dim)?, &e, seed, Some((2, 3)))?;
                        let p = run_pipeline(&a, &e, &PipelineParams::new(2, 3, eps))?;
                        let row = ledger_row(&p, "finite_field", eps, &e, a.len());
                        Ok((p.report, Some(row)))
                    });
                }
            }
        }
    }
}

fn plan(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    for s in suites {
        match s {
            SuiteName::Energy => energy_jobs(cfg, &mut jobs),
            SuiteName::Spectral => spectral_jobs(cfg, &mut jobs),
            SuiteName::DenseModel => dense_jobs(cfg, &mut jobs),
            SuiteName::Counting => counting_jobs(cfg, &mut jobs),
            SuiteName::Pipeline => pipeline_jobs(cfg, &mut jobs),
        }
    }
    jobs
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteRun, CliError> {
    cfg.validate()?;
    let jobs = plan(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let results: Vec<_> = pool.install(|| {
        jobs.par_iter()
            .map(|j| {
                let seed = rng::split_seed(cfg.seed, rng::label(&j.name));
                (seed, (j.run)(seed))
            })
            .collect()
    });

    let mut top = VerificationReport::new("verify_suite");
    top.input("seed", cfg.seed)
        .input("suites", cfg.suites.iter().map(|s| s.to_string()).collect::<Vec<_>>())
        .input("sizes", &cfg.sizes)
        .input("pairs", cfg.pairs.iter().map(|(s, t)| format!("{s}:{t}")).collect::<Vec<_>>())
        .input("equations", cfg.equations.iter().map(|e| e.to_string()).collect::<Vec<_>>())
        .input("eps", cfg.eps.iter().map(|e| format!("{}/{}", e.numer(), e.denom())).collect::<Vec<_>>())
        .input("inject_fault", if cfg.fault.is_some() { "nonfree" } else { "none" });
    let mut ledger = Vec::new();
    let mut failed = 0usize;
    for (j, (seed, res)) in jobs.iter().zip(results) {
        let mut w = VerificationReport::new(&j.name);
        w.input("seed", seed);
        match res {
            Ok((r, row)) => {
                w.section(r);
                ledger.extend(row);
            }
            Err(e) => {
                w.section(error_report(&j.name, &e));
            }
        }
        if !w.passed() {
            failed += 1;
        }
        top.section(w);
    }
    top.qty("jobs", jobs.len()).qty("failed_jobs", failed);
    ledger.sort_by_key(|r| r.n);
    Ok(SuiteRun { report: top, ledger })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers() {
        assert_eq!(sidon_prime(64), Some(5));
        assert_eq!(sidon_prime(256), Some(11));
        assert_eq!(sidon_prime(9), None);
        assert_eq!(ternary_dim(64), 3);
        assert_eq!(ternary_dim(5000), 6);
        assert_eq!(eq_tag(&"1,1,-2".parse().unwrap()), "1_1_-2");
    }

    #[test]
    fn small_suite_passes_and_is_reproducible() {
        let mut cfg = SuiteConfig::default();
        cfg.sizes = vec![32];
        cfg.eps = vec![Rational::new(1, 4)];
        cfg.threads = Some(2);
        let a = run_suite(&cfg).unwrap();
        assert!(a.passed(), "{:?}", a.report.failed_assertions());
        cfg.threads = Some(1);
        let b = run_suite(&cfg).unwrap();
        assert_eq!(a.report.to_json(), b.report.to_json());
        assert!(a.ledger.windows(2).all(|w| w[0].n <= w[1].n));
    }

    #[test]
    fn injected_fault_fails_with_witness() {
        let mut cfg = SuiteConfig::default();
        cfg.suites = vec![SuiteName::Energy];
        cfg.sizes = vec![16];
        cfg.pairs = vec![(2, 2)];
        cfg.fault = Some(Fault::NonFree);
        let run = run_suite(&cfg).unwrap();
        assert!(!run.passed());
        let bad = run.report.find_section("energy/injected_nonfree").unwrap();
        assert!(!bad.passed());
        assert!(bad.sections[0].inputs.contains_key("witness"));
    }
}
