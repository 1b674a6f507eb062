//! Run configuration: flags, config file values and defaults merged into one
//! validated `RunConfig`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use acl_core::fq::{prime_power, MAX_FIELD_ORDER};
use acl_core::quadfield::SearchBound;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "acl", version, about = "Exact point counts, zero-cycle counts and Peyre constants over F_q(t)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Sub {
    /// Verified point counts.
    Count {
        #[arg(value_enum)]
        kind: CountKind,
    },
    /// Effective and prime 0-cycle counts on P^2 over F_q.
    Cycles,
    /// Peyre-type constants.
    Peyre {
        #[arg(value_enum)]
        kind: PeyreKind,
    },
    /// Ratio checks for the asymptotic lemmas.
    Verify {
        #[arg(value_enum)]
        what: VerifyKind,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountKind {
    Rational,
    Pairs,
    Quadratic,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeyreKind {
    Pn,
    Hilb2,
    Hilbm,
    Cm,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyKind {
    Lemmas,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Order of the constant field.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Dimension of projective space.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Number of points m (Sym^m, Hilb^m) or lemma exponent.
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Height exponent.
    #[arg(long = "M", global = true)]
    pub big_m: Option<u32>,
    /// Last height exponent of a range starting at --M.
    #[arg(long = "M-max", global = true)]
    pub big_m_max: Option<u32>,
    /// Last m for cycle tables.
    #[arg(long = "m-max", global = true)]
    pub m_max: Option<u32>,
    /// Slope mu as a rational "a/b" for Hilb^m constants.
    #[arg(long, global = true)]
    pub mu: Option<String>,
    #[arg(long = "deg-cut", global = true)]
    pub deg_cut: Option<u32>,
    #[arg(long, global = true)]
    pub digits: Option<usize>,
    /// Worker threads for enumerations.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Cache directory; defaults to $ACL_CACHE_DIR, no caching when neither is set.
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write a data file and plotting script into DIR (default: current directory).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = ".")]
    pub plot: Option<PathBuf>,
    /// Print quadratic counts even when the search bound is not stable.
    #[arg(long = "allow-unstable", global = true)]
    pub allow_unstable: bool,
    /// Largest deg D searched for quadratic points.
    #[arg(long = "max-deg-d", global = true)]
    pub max_deg_d: Option<u32>,
    /// Largest coordinate degree searched for quadratic points.
    #[arg(long = "max-coord-deg", global = true)]
    pub max_coord_deg: Option<u32>,
    /// key=value file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CountRational,
    CountPairs,
    CountQuadratic,
    Cycles,
    Peyre(PeyreKind),
    VerifyLemmas,
}

impl Command {
    pub fn from_sub(s: Sub) -> Self {
        match s {
            Sub::Count { kind: CountKind::Rational } => Command::CountRational,
            Sub::Count { kind: CountKind::Pairs } => Command::CountPairs,
            Sub::Count { kind: CountKind::Quadratic } => Command::CountQuadratic,
            Sub::Cycles => Command::Cycles,
            Sub::Peyre { kind } => Command::Peyre(kind),
            Sub::Verify { .. } => Command::VerifyLemmas,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::CountRational => "count rational",
            Command::CountPairs => "count pairs",
            Command::CountQuadratic => "count quadratic",
            Command::Cycles => "cycles",
            Command::Peyre(PeyreKind::Pn) => "peyre pn",
            Command::Peyre(PeyreKind::Hilb2) => "peyre hilb2",
            Command::Peyre(PeyreKind::Hilbm) => "peyre hilbm",
            Command::Peyre(PeyreKind::Cm) => "peyre cm",
            Command::VerifyLemmas => "verify lemmas",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub q: u64,
    pub n: u32,
    pub m: u32,
    pub big_m: u32,
    pub big_m_max: u32,
    pub m_max: u32,
    pub mu: Option<String>,
    pub deg_cut: u32,
    pub digits: usize,
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub plot: Option<PathBuf>,
    pub allow_unstable: bool,
    pub bound: Option<SearchBound>,
}

pub const MAX_DIGITS: usize = 2000;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn take<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {v:?}"))))
        .transpose()
}

/// Fills unset flags from the config file.
pub fn merge_file(flags: &mut Flags, file: &BTreeMap<String, String>) -> Result<(), CliError> {
    const KNOWN: [&str; 16] = [
        "q", "n", "m", "M", "M-max", "m-max", "mu", "deg-cut", "digits", "jobs", "cache-dir", "format", "plot",
        "allow-unstable", "max-deg-d", "max-coord-deg",
    ];
    if let Some(k) = file.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(CliError::Usage(format!("unknown config key {k:?}")));
    }
    flags.q = flags.q.or(take(file, "q")?);
    flags.n = flags.n.or(take(file, "n")?);
    flags.m = flags.m.or(take(file, "m")?);
    flags.big_m = flags.big_m.or(take(file, "M")?);
    flags.big_m_max = flags.big_m_max.or(take(file, "M-max")?);
    flags.m_max = flags.m_max.or(take(file, "m-max")?);
    flags.mu = flags.mu.take().or(take(file, "mu")?);
    flags.deg_cut = flags.deg_cut.or(take(file, "deg-cut")?);
    flags.digits = flags.digits.or(take(file, "digits")?);
    flags.jobs = flags.jobs.or(take(file, "jobs")?);
    flags.cache_dir = flags.cache_dir.take().or(take(file, "cache-dir")?);
    flags.plot = flags.plot.take().or(take(file, "plot")?);
    flags.max_deg_d = flags.max_deg_d.or(take(file, "max-deg-d")?);
    flags.max_coord_deg = flags.max_coord_deg.or(take(file, "max-coord-deg")?);
    if flags.format.is_none() {
        flags.format = match file.get("format").map(String::as_str) {
            None => None,
            Some("csv") => Some(Format::Csv),
            Some("json") => Some(Format::Json),
            Some(other) => return Err(CliError::Usage(format!("unknown format {other:?}"))),
        };
    }
    if !flags.allow_unstable {
        flags.allow_unstable = take::<bool>(file, "allow-unstable")?.unwrap_or(false);
    }
    Ok(())
}

impl RunConfig {
    pub fn resolve(command: Command, f: &Flags) -> Result<Self, CliError> {
        let big_m = f.big_m.unwrap_or(1);
        let bound = match (f.max_deg_d, f.max_coord_deg) {
            (None, None) => None,
            (d, c) => {
                let dflt = SearchBound::default_for(f.big_m_max.unwrap_or(big_m).max(big_m));
                Some(SearchBound { d_deg: d.unwrap_or(dflt.d_deg), coord_deg: c.unwrap_or(dflt.coord_deg) })
            }
        };
        let cfg = RunConfig {
            command,
            q: f.q.unwrap_or(3),
            n: f.n.unwrap_or(2),
            m: f.m.unwrap_or(if command == Command::VerifyLemmas { 5 } else { 2 }),
            big_m,
            big_m_max: f.big_m_max.unwrap_or(big_m),
            m_max: f.m_max.unwrap_or(12),
            mu: f.mu.clone(),
            deg_cut: f.deg_cut.unwrap_or(10),
            digits: f.digits.unwrap_or(30),
            jobs: f.jobs,
            cache_dir: f.cache_dir.clone().or_else(|| std::env::var_os("ACL_CACHE_DIR").map(PathBuf::from)),
            format: f.format.unwrap_or(Format::Csv),
            plot: f.plot.clone(),
            allow_unstable: f.allow_unstable,
            bound,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if prime_power(self.q).is_none() {
            return Err(CliError::Usage(format!("q = {} is not a prime power", self.q)));
        }
        if self.q > MAX_FIELD_ORDER as u64 {
            return Err(CliError::Guard(format!("q = {} exceeds {}", self.q, MAX_FIELD_ORDER)));
        }
        if self.big_m_max < self.big_m {
            return Err(CliError::Usage("--M-max must be at least --M".into()));
        }
        if self.digits == 0 || self.digits > MAX_DIGITS {
            return Err(CliError::Guard(format!("digits must be in 1..={MAX_DIGITS}")));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        if self.command == Command::CountQuadratic && self.q % 2 == 0 {
            return Err(CliError::Usage("quadratic points need odd q".into()));
        }
        Ok(())
    }

    /// Canonical serialization of the fields that determine the output rows.
    pub fn fingerprint(&self) -> String {
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("command", self.command.name().into());
        kv.insert("q", self.q.to_string());
        match self.command {
            Command::CountRational => {
                kv.insert("n", self.n.to_string());
                kv.insert("M", format!("{}..{}", self.big_m, self.big_m_max));
            }
            Command::CountPairs => {
                kv.insert("M", format!("{}..{}", self.big_m, self.big_m_max));
            }
            Command::CountQuadratic => {
                kv.insert("M", format!("{}..{}", self.big_m, self.big_m_max));
                let b = self.bound.map(|b| format!("{}/{}", b.d_deg, b.coord_deg)).unwrap_or_else(|| "default".into());
                kv.insert("bound", b);
            }
            Command::Cycles => {
                kv.insert("m-max", self.m_max.to_string());
            }
            Command::Peyre(_) => {
                kv.insert("n", self.n.to_string());
                kv.insert("m", self.m.to_string());
                kv.insert("mu", self.mu.clone().unwrap_or_default());
                kv.insert("deg-cut", self.deg_cut.to_string());
                kv.insert("digits", self.digits.to_string());
            }
            Command::VerifyLemmas => {
                kv.insert("m", self.m.to_string());
                kv.insert("M-max", self.lemma_max().to_string());
                kv.insert("digits", self.digits.to_string());
            }
        }
        kv.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Last M of the lemma doubling sequence 50, 100, 200, ...
    pub fn lemma_max(&self) -> u32 {
        if self.big_m_max > self.big_m || self.big_m > 1 {
            self.big_m_max.max(50)
        } else {
            400
        }
    }
}
