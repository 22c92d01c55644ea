//! Suite configuration. A config file holds one `key = value` per line;
//! blank lines and lines starting with `#` are ignored. Command-line flags
//! are applied on top of the file.
//!
//! Keys:
//!
//! | key            | value                                              | default                 |
//! |----------------|----------------------------------------------------|-------------------------|
//! | `suites`       | `all` or a comma list of suite names               | `all`                   |
//! | `seed`         | unsigned 64-bit integer                            | `42`                    |
//! | `sizes`        | comma list of interval lengths `N`                 | `64,128,256`            |
//! | `pairs`        | comma list of `s:t`                                | `2:2,2:3,3:3`           |
//! | `equations`    | `;`-separated coefficient lists                    | `1,1,-2;1,1,1,-1,-2`    |
//! | `eps`          | comma list of rationals `p/q`                      | `1/4,1/8`               |
//! | `out`          | output directory                                   | `addlab-out`            |
//! | `threads`      | worker count (capped by `ADDLAB_THREADS`)          | all cores               |
//! | `inject_fault` | `none` or `nonfree`                                | `none`                  |

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use addlab::counting::EquationSpec;
use addlab::spectral::{parse_ratio, Rational};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteName {
    Energy,
    Spectral,
    DenseModel,
    Counting,
    Pipeline,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] =
        [SuiteName::Energy, SuiteName::Spectral, SuiteName::DenseModel, SuiteName::Counting, SuiteName::Pipeline];
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteName::Energy => "energy",
            SuiteName::Spectral => "spectral",
            SuiteName::DenseModel => "dense_model",
            SuiteName::Counting => "counting",
            SuiteName::Pipeline => "pipeline",
        })
    }
}

impl FromStr for SuiteName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.to_string() == s.replace('-', "_"))
            .ok_or_else(|| CliError::Usage(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Feed a set that is not K_{2,2}-free to a verifier that requires it.
    NonFree,
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suites: Vec<SuiteName>,
    pub seed: u64,
    pub sizes: Vec<u64>,
    pub pairs: Vec<(u32, u32)>,
    pub equations: Vec<EquationSpec>,
    pub eps: Vec<Rational>,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: SuiteName::ALL.to_vec(),
            seed: 42,
            sizes: vec![64, 128, 256],
            pairs: vec![(2, 2), (2, 3), (3, 3)],
            equations: vec!["1,1,-2".parse().unwrap(), "1,1,1,-1,-2".parse().unwrap()],
            eps: vec![Rational::new(1, 4), Rational::new(1, 8)],
            out: PathBuf::from("addlab-out"),
            threads: None,
            fault: None,
        }
    }
}

fn list<T>(value: &str, sep: char, item: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    value.split(sep).map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

fn number<T: FromStr>(key: &str, s: &str) -> Result<T, CliError> {
    s.parse().map_err(|_| CliError::Usage(format!("{key}: '{s}' is not a valid number")))
}

impl SuiteConfig {
    /// Reads `key = value` lines on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = SuiteConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| CliError::Usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "suites" => {
                self.suites = if value == "all" {
                    SuiteName::ALL.to_vec()
                } else {
                    list(value, ',', str::parse)?
                };
            }
            "seed" => self.seed = number(key, value)?,
            "sizes" => self.sizes = list(value, ',', |s| number(key, s))?,
            "pairs" => {
                self.pairs = list(value, ',', |s| {
                    let (a, b) = s
                        .split_once(':')
                        .ok_or_else(|| CliError::Usage(format!("pairs: '{s}' should look like s:t")))?;
                    Ok((number(key, a)?, number(key, b)?))
                })?
            }
            "equations" => {
                self.equations = list(value, ';', |s| s.parse().map_err(|e: addlab::Error| CliError::Usage(e.to_string())))?
            }
            "eps" => self.eps = list(value, ',', |s| parse_ratio(s).map_err(|e| CliError::Usage(e.to_string())))?,
            "out" => self.out = PathBuf::from(value),
            "threads" => self.threads = Some(number(key, value)?),
            "inject_fault" => {
                self.fault = match value {
                    "none" | "" => None,
                    "nonfree" => Some(Fault::NonFree),
                    other => return Err(CliError::Usage(format!("inject_fault: unknown fault '{other}'"))),
                }
            }
            other => return Err(CliError::Usage(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.suites.is_empty() {
            return bad("no suites selected".into());
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| !(8..=1 << 14).contains(&n)) {
            return bad(format!("sizes must be a nonempty list of values in [8, 16384], got {:?}", self.sizes));
        }
        if self.pairs.is_empty() || self.pairs.iter().any(|&(s, t)| s < 2 || s > t || t > 6) {
            return bad(format!("pairs must satisfy 2 <= s <= t <= 6, got {:?}", self.pairs));
        }
        if self.equations.is_empty() || self.equations.iter().any(|e| e.coeffs().iter().sum::<i64>() != 0) {
            return bad("equations must be a nonempty list with zero coefficient sum".into());
        }
        if self.equations.iter().any(|e| e.k() > 6) {
            return bad("equations may have at most 6 variables".into());
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| *e.numer() == 0 || *e.numer() >= *e.denom()) {
            return bad("eps must be a nonempty list of rationals in (0, 1)".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        Ok(())
    }

    /// Worker count: the configured value, capped by `ADDLAB_THREADS`.
    pub fn worker_count(&self) -> usize {
        let env = std::env::var("ADDLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0);
        let base = self.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        env.map_or(base, |cap| base.min(cap)).max(1)
    }
}
