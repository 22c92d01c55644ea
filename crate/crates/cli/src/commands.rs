//! One function per subcommand. Each returns whether every hard assertion
//! passed; errors that stop a command before checking come back as `Err`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::sync::Arc;

use addlab::counting::{count_set_solutions, count_t, padded_modulus, run_pipeline, CountMethod, EquationSpec, PipelineParams};
use addlab::dense_model::{build_dense_model_with_len, integer_window, verify_model_properties, verify_s_decomposition, ModelMode, Smoother};
use addlab::report::Tolerance;
use addlab::sets::{equation_free_greedy, erdos_turan_sidon, greedy_kst_free, random_subset, subspace};
use addlab::spectral::{parse_ratio, ratio_f64, spectrum};
use addlab::{GroupCtx, SetA, VerificationReport};
use serde_json::json;

use crate::emit::{write_ledger_csv, write_ratio_csv, write_report};
use crate::{or_failure, CliError, SuiteConfig};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn parse(raw: &[String]) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for p in raw {
            let (k, v) = p.split_once('=').ok_or_else(|| usage(format!("parameter '{p}' should be key=value")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Params(map))
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    fn need<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, CliError> {
        let v = self.take(key).ok_or_else(|| usage(format!("missing parameter {key}")))?;
        v.parse().map_err(|_| usage(format!("bad value for {key}: '{v}'")))
    }

    fn opt<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| usage(format!("bad value for {key}: '{v}'"))),
        }
    }

    /// `ctx=<encoding>`, or `n=<N>` for `[0, N)` modelled in `Z_M` with `M = modulus(N)`.
    fn group(&mut self, modulus: impl FnOnce(u64) -> u64) -> Result<Arc<GroupCtx>, CliError> {
        match (self.take("ctx"), self.opt::<u64>("n")?) {
            (Some(enc), None) => Ok(Arc::new(enc.parse()?)),
            (None, Some(n)) => Ok(Arc::new(GroupCtx::interval_model(n, modulus(n))?)),
            _ => Err(usage("give exactly one of ctx=<encoding> or n=<length>")),
        }
    }

    fn finish(self) -> Result<(), CliError> {
        match self.0.keys().next() {
            Some(k) => Err(usage(format!("unknown parameter '{k}'"))),
            None => Ok(()),
        }
    }
}

pub fn construct(kind: &str, raw: &[String], seed: u64, out: &Path) -> Result<bool, CliError> {
    let mut p = Params::parse(raw)?;
    let a = match kind.replace('-', "_").as_str() {
        "erdos_turan_sidon" => erdos_turan_sidon(p.need("p")?, p.opt("m")?)?,
        "greedy_kst_free" => {
            let (s, t) = (p.need("s")?, p.need("t")?);
            greedy_kst_free(&p.group(|n| 2 * n)?, s, t, seed)?
        }
        "random_subset" => {
            let density = p.need("density")?;
            random_subset(&p.group(|n| 2 * n)?, density, seed)?
        }
        "subspace" => {
            let ctx: Arc<GroupCtx> = Arc::new(p.need::<String>("ctx")?.parse()?);
            let basis = p.take("basis").unwrap_or_default();
            let vs = basis
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|s| ctx.parse_elem(s))
                .collect::<addlab::Result<Vec<_>>>()?;
            subspace(&ctx, &vs)?
        }
        "equation_free_greedy" => {
            let eq: EquationSpec = p.need::<String>("eq")?.parse()?;
            let kst = match (p.opt::<usize>("s")?, p.opt::<usize>("t")?) {
                (Some(s), Some(t)) => Some((s, t)),
                (None, None) => None,
                _ => return Err(usage("give both s and t, or neither")),
            };
            let ctx = p.group(|n| padded_modulus(&eq, n))?;
            equation_free_greedy(&ctx, &eq, seed, kst)?
        }
        other => return Err(usage(format!("unknown construction '{other}'"))),
    };
    p.finish()?;
    a.save(out)?;
    println!("{}: {} elements in {}", out.display(), a.len(), a.ctx());
    Ok(true)
}

fn load(input: &Path) -> Result<SetA, CliError> {
    SetA::load(input).map_err(|e| match e {
        addlab::Error::Io(source) => CliError::Io { path: input.to_path_buf(), source },
        other => other.into(),
    })
}

fn emit(report: &VerificationReport, path: Option<&Path>) -> Result<bool, CliError> {
    match path {
        Some(p) => {
            write_report(p, report)?;
            println!("{}: {}", report.lemma, if report.passed() { "pass" } else { "FAIL" });
        }
        None => println!("{}", report.to_json()),
    }
    for f in report.failed_assertions() {
        eprintln!("failed: {f}");
    }
    Ok(report.passed())
}

pub fn spectrum_cmd(input: &Path, eps: &str, out: &Path) -> Result<bool, CliError> {
    let a = load(input)?;
    let eps = parse_ratio(eps)?;
    let spec = spectrum(&a, ratio_f64(&eps))?;
    let doc = json!({
        "ctx": a.ctx().to_string(),
        "eps": format!("{}/{}", eps.numer(), eps.denom()),
        "set_size": a.len(),
        "frequencies": spec.frequencies,
        "values": spec.values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&doc).expect("spectrum serializes") + "\n";
    std::fs::write(out, text).map_err(|source| CliError::Io { path: out.to_path_buf(), source })?;
    println!("{}: {} frequencies", out.display(), spec.len());
    Ok(true)
}

pub fn dense_model_cmd(
    input: &Path,
    s: u32,
    t: u32,
    eps: &str,
    mode: &str,
    report: Option<&Path>,
    emit_f: Option<&Path>,
) -> Result<bool, CliError> {
    let a = load(input)?;
    let eps = parse_ratio(eps)?;
    let mode: ModelMode = mode.parse()?;
    let (work, n_len) = match mode {
        ModelMode::IntegerModel => (integer_window(&a, eps, |w| 2 * w)?, a.ctx().model_len()),
        ModelMode::FiniteField => (a.clone(), a.ctx().model_len()),
    };
    let built = build_dense_model_with_len(&work, s, t, eps, mode, n_len);
    let r = match built {
        Ok(m) => {
            let mut r = verify_model_properties(&m, &work, s, t)?;
            if let Smoother::Subspace(h) = &m.smoother {
                r.section(verify_s_decomposition(&work, s, t, h)?);
            }
            if let Some(path) = emit_f {
                let file = File::create(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
                m.f.write_to(BufWriter::new(file))?;
            }
            r
        }
        Err(e) => or_failure("dense_model", Err(e))?,
    };
    emit(&r, report)
}

pub fn count_cmd(eq: &str, input: &Path, method: &str, report: Option<&Path>) -> Result<bool, CliError> {
    let a = load(input)?;
    let eq: EquationSpec = eq.parse()?;
    eq.validate(a.ctx())?;
    let (brute, fourier) = match method {
        "brute" => (true, false),
        "fourier" => (false, true),
        "both" => (true, true),
        other => return Err(usage(format!("unknown method '{other}' (brute, fourier or both)"))),
    };
    let mut r = VerificationReport::new("count");
    r.input("eq", eq.to_string()).input("group", a.ctx().to_string()).input("set_size", a.len());
    let mut exact = None;
    if brute {
        let c = count_set_solutions(&eq, &a)?;
        r.qty("total", c.total).qty("trivial", c.trivial).qty("all_distinct", c.all_distinct);
        r.qty("nontrivial", c.nontrivial());
        exact = Some(c.total);
    }
    if fourier {
        let t = count_t(&eq, &vec![a.indicator(); eq.k()], CountMethod::Fourier)?.total;
        r.qty("fourier_re", t.re).qty("fourier_im", t.im);
        if let Some(total) = exact {
            let scale = (total as f64).max(1.0);
            r.assert_close_scaled("brute = Fourier", t.re, total as f64, scale, Tolerance::rel(1e-9));
        }
    }
    emit(&r, report)
}

pub fn pipeline_cmd(
    input: &Path,
    eq: &str,
    params: PipelineParams,
    report: Option<&Path>,
    ratios: Option<&Path>,
) -> Result<bool, CliError> {
    let a = load(input)?;
    let eq: EquationSpec = eq.parse()?;
    let r = match run_pipeline(&a, &eq, &params) {
        Ok(p) => p.report,
        Err(e) => or_failure("transference_pipeline", Err(e))?,
    };
    if let Some(path) = ratios {
        write_ratio_csv(path, &r)?;
    }
    emit(&r, report)
}

pub fn verify(cfg: &SuiteConfig) -> Result<bool, CliError> {
    let run = crate::run_suite(cfg)?;
    let out = &cfg.out;
    let report_path = out.join("report.json");
    write_report(&report_path, &run.report)?;
    write_ratio_csv(&out.join("ratios.csv"), &run.report)?;
    write_ledger_csv(&out.join("pipeline_ledger.csv"), &run.ledger)?;
    for job in &run.report.sections {
        println!("{:<8} {}", if job.passed() { "pass" } else { "FAIL" }, job.lemma);
    }
    if !run.passed() {
        for f in run.report.failed_assertions() {
            eprintln!("failed: {f}");
        }
        eprintln!("see {}", report_path.display());
    }
    Ok(run.passed())
}
