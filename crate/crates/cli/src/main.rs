use std::path::PathBuf;
use std::process::ExitCode;

use addlab::counting::PipelineParams;
use addlab::spectral::parse_ratio;
use addlab_cli::{commands, CliError, SuiteConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "addlab", version, about = "Energies, spectra, dense models and solution counts for K_{s,t}-free sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a set and write it to a set file.
    Construct {
        /// erdos-turan-sidon, greedy-kst-free, random-subset, subspace or equation-free-greedy
        kind: String,
        /// Construction parameters as key=value, e.g. `p=11`, `n=200`, `ctx=fq:3:1:4:0,1`.
        #[arg(long, num_args = 0.., value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Large spectrum of a set.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dense model of a set, with its properties checked.
    DenseModel {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, default_value = "1/8")]
        eps: String,
        /// integer or ffield
        #[arg(long, default_value = "ffield")]
        mode: String,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the model function here.
        #[arg(long)]
        emit_f: Option<PathBuf>,
    },
    /// Solutions of a linear equation inside a set.
    Count {
        #[arg(long, allow_hyphen_values = true)]
        eq: String,
        #[arg(long)]
        input: PathBuf,
        /// brute, fourier or both
        #[arg(long, default_value = "both")]
        method: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Full transference run on one set.
    Pipeline {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eq: String,
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, default_value_t = 2)]
        t: u32,
        #[arg(long, default_value = "1/8")]
        eps: String,
        /// Exponent of the supersaturation reference curve.
        #[arg(long, default_value_t = 1.0)]
        supersat_exponent: f64,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Measured ratios as CSV.
        #[arg(long)]
        ratios: Option<PathBuf>,
    },
    /// Seeded verification suite over a generated corpus.
    Verify {
        /// key = value file; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// `all` or a comma list of energy, spectral, dense_model, counting, pipeline
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        sizes: Option<String>,
        /// Comma list of s:t
        #[arg(long)]
        pairs: Option<String>,
        /// `;`-separated coefficient lists
        #[arg(long, allow_hyphen_values = true)]
        equations: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// none or nonfree
        #[arg(long)]
        inject_fault: Option<String>,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Cmd::Construct { kind, params, seed, out } => commands::construct(&kind, &params, seed, &out),
        Cmd::Spectrum { input, eps, out } => commands::spectrum_cmd(&input, &eps, &out),
        Cmd::DenseModel { input, s, t, eps, mode, report, emit_f } => {
            commands::dense_model_cmd(&input, s, t, &eps, &mode, report.as_deref(), emit_f.as_deref())
        }
        Cmd::Count { eq, input, method, report } => commands::count_cmd(&eq, &input, &method, report.as_deref()),
        Cmd::Pipeline { input, eq, s, t, eps, supersat_exponent, report, ratios } => {
            let mut params = PipelineParams::new(s, t, parse_ratio(&eps)?);
            params.supersat_exponent = supersat_exponent;
            commands::pipeline_cmd(&input, &eq, params, report.as_deref(), ratios.as_deref())
        }
        Cmd::Verify { config, suite, seed, sizes, pairs, equations, eps, out, threads, inject_fault } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path, source })?;
                    SuiteConfig::from_text(&text)?
                }
                None => SuiteConfig::default(),
            };
            let overrides = [
                ("suites", suite),
                ("seed", seed.map(|s| s.to_string())),
                ("sizes", sizes),
                ("pairs", pairs),
                ("equations", equations),
                ("eps", eps),
                ("out", out.map(|p| p.display().to_string())),
                ("threads", threads.map(|n| n.to_string())),
                ("inject_fault", inject_fault),
            ];
            for (key, value) in overrides {
                if let Some(v) = value {
                    cfg.set(key, &v)?;
                }
            }
            commands::verify(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("ADDLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Lib(err) = &e {
                if let Some(w) = err.witness() {
                    eprintln!("witness: {}", serde_json::to_string(w).unwrap_or_default());
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
