//! The `acl` command line: argument parsing, caching and table output over
//! `acl-core`.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod table;

use std::ffi::OsString;
use std::io::Write;

use acl_core::record::CountRecord;
use clap::error::ErrorKind;
use clap::Parser;

use cache::{Cache, CacheEntry, Lookup};
use config::{merge_file, parse_config_text, Cli, Command, Format, RunConfig};
use error::CliError;

/// Exit status plus how many times a producer was invoked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Report {
    pub code: i32,
    pub computed: usize,
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_report(args, out, err).code
}

pub fn run_report<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Report
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
            return Report { code, computed: 0 };
        }
    };
    let mut computed = 0;
    match execute(cli, out, &mut computed) {
        Ok(()) => Report { code: 0, computed },
        Err(e) => {
            let _ = writeln!(err, "acl: {e}");
            Report { code: e.exit_code(), computed }
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, computed: &mut usize) -> Result<(), CliError> {
    let mut flags = cli.flags;
    if let Some(path) = flags.config.clone() {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        merge_file(&mut flags, &parse_config_text(&text)?)?;
    }
    let cfg = RunConfig::resolve(Command::from_sub(cli.command), &flags)?;
    let records = records_for(&cfg, computed)?;

    if cfg.command == Command::CountQuadratic && !cfg.allow_unstable {
        let bad = commands::unstable_rows(&records);
        if !bad.is_empty() {
            return Err(CliError::Unstable(format!(
                "count changes when the search bound grows (M = {}); widen --max-deg-d/--max-coord-deg or pass --allow-unstable",
                bad.join(",")
            )));
        }
    }

    let layout = commands::layout(cfg.command);
    let text = match cfg.format {
        Format::Csv => layout.csv(&records),
        Format::Json => layout.json(&records),
    };
    out.write_all(text.as_bytes())?;

    if let Some(dir) = &cfg.plot {
        let (data, script) = plot::write(dir, cfg.command, &records)?;
        log::info!("plot data {} script {}", data.display(), script.display());
    }
    Ok(())
}

fn compute(cfg: &RunConfig, computed: &mut usize) -> Result<Vec<CountRecord>, CliError> {
    *computed += 1;
    match cfg.jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
            pool.install(|| commands::produce(cfg))
        }
        None => commands::produce(cfg),
    }
}

fn records_for(cfg: &RunConfig, computed: &mut usize) -> Result<Vec<CountRecord>, CliError> {
    let Some(dir) = &cfg.cache_dir else { return compute(cfg, computed) };
    let cache = Cache::open(dir).map_err(|e| CliError::Io(format!("cache dir {}: {e}", dir.display())))?;
    let fp = cfg.fingerprint();
    if let Lookup::Hit(entry) = cache.load(&fp) {
        log::debug!("cache hit {}", cache.path_for(&fp).display());
        return Ok(entry.records);
    }
    let records = compute(cfg, computed)?;
    if let Err(e) = cache.store(&CacheEntry::new(&fp, records.clone())) {
        log::warn!("could not write cache entry: {e}");
    }
    Ok(records)
}
