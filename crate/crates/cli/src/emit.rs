//! Report and table files. Reports are pretty-printed JSON with keys in a
//! fixed order; tables are CSV with a header row.

use std::fs;
use std::path::Path;

use addlab::VerificationReport;

use crate::{CliError, LedgerRow};

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    fs::write(path, text).map_err(io(path))
}

pub fn write_report(path: &Path, report: &VerificationReport) -> Result<(), CliError> {
    write(path, &(report.to_json() + "\n"))
}

pub fn read_report(path: &Path) -> Result<VerificationReport, CliError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Every measured ratio in the report tree, keyed by the `/`-joined path of
/// section names leading to it.
pub fn ratio_rows(report: &VerificationReport) -> Vec<(String, String, f64)> {
    fn walk(r: &VerificationReport, prefix: &str, out: &mut Vec<(String, String, f64)>) {
        let path = if prefix.is_empty() { r.lemma.clone() } else { format!("{prefix}/{}", r.lemma) };
        for (k, v) in &r.measured_ratios {
            out.push((path.clone(), k.clone(), v.as_f64()));
        }
        for s in &r.sections {
            walk(s, &path, out);
        }
    }
    let mut out = Vec::new();
    walk(report, "", &mut out);
    out
}

pub fn ratio_csv(report: &VerificationReport) -> String {
    let mut s = String::from("section,ratio,value\n");
    for (path, name, v) in ratio_rows(report) {
        s += &format!("{},{},{v}\n", field(&path), field(&name));
    }
    s
}

pub fn ledger_csv(rows: &[LedgerRow]) -> String {
    let mut s = String::from("N,model,eps,eq,set_size,delta_f,delta_F,level_set_density,ghat_sup_over_eps_N,T_f_over_N_pow_k_minus_1\n");
    for r in rows {
        s += &format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.model,
            r.eps,
            field(&r.eq),
            r.set_size,
            r.delta_f,
            r.delta_big_f,
            r.level_set_density,
            r.ghat_ratio,
            r.t_f_ratio
        );
    }
    s
}

pub fn write_ratio_csv(path: &Path, report: &VerificationReport) -> Result<(), CliError> {
    write(path, &ratio_csv(report))
}

pub fn write_ledger_csv(path: &Path, rows: &[LedgerRow]) -> Result<(), CliError> {
    write(path, &ledger_csv(rows))
}
