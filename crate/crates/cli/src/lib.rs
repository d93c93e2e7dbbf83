//! Command-line front end: argument parsing, config layering, batch
//! orchestration and report emission.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use pairsec::asymptotic::{Variant, COMPARED};
use pairsec::config::{OutputFormat, RunConfig};
use pairsec::cost::Model;
use pairsec::families::Registry;
use pairsec::pairing::rank;
use pairsec::report::{self, CurveListing, RankingAtLevel, Report, Table};
use pairsec::security::{crossover_sweep, min_p_for_level, profile, SecurityProfile};
use pairsec::Error;

#[derive(Debug, Parser)]
#[command(name = "pairsec", version, about = "Security estimates for pairing-friendly curves")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command. Precedence: flag > config file > default.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Cost model (BD or GS).
    #[arg(long, global = true)]
    pub model: Option<Model>,
    /// Monte-Carlo samples per norm estimate.
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Master RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Reduced sample count for quick runs (ignored if --samples is given).
    #[arg(long, global = true)]
    pub fast: bool,
    /// Output format: json, csv or markdown.
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full security profile of one or more registered curves.
    Estimate {
        #[arg(required = true)]
        curves: Vec<String>,
    },
    /// Profiles of every registered curve.
    Table7,
    /// Smallest characteristic size per family and security level.
    Table8 {
        /// Comma-separated levels (default: from config).
        #[arg(long, value_delimiter = ',')]
        levels: Vec<u64>,
        /// Comma-separated families (default: all).
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
    },
    /// Curve-side and field-side security over a range of p sizes.
    Sweep {
        family: String,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
        #[arg(long)]
        step: Option<u64>,
        #[arg(long)]
        fine: Option<u64>,
    },
    /// Families ranked by pairing cost at each level.
    Compare {
        /// Levels (default: 100,160,192,256).
        #[arg(value_delimiter = ',')]
        levels: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
    },
    /// L_Q(1/3, c) costs of the NFS variants.
    Asymptote {
        /// Sizes of Q in bits (default: 1024,3072,12288).
        #[arg(value_delimiter = ',')]
        q_bits: Vec<u64>,
        /// Variants (default: the five compared ones).
        #[arg(long, value_delimiter = ',')]
        variants: Vec<Variant>,
    },
    /// Registered curves and their sizes.
    ListCurves,
}

/// A rendered report and the process exit code it implies.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub code: u8,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Core(e) => ExitCode::from(core_exit_code(e)),
        }
    }
}

fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::Unknown(_) | Error::InvalidArgument(_) | Error::Config(_) => 2,
        _ => 1,
    }
}

/// Defaults, then the config file, then flags.
pub fn resolve_config(g: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut c = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(m) = g.model {
        c.run.model = m;
    }
    if g.fast {
        c.set_fast();
    }
    if let Some(s) = g.samples {
        c.run.samples = s;
    }
    if let Some(s) = g.seed {
        c.run.seed = s;
    }
    if let Some(f) = g.format {
        c.run.format = f;
    }
    if c.run.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    Ok(c)
}

fn registry(config: &RunConfig) -> Result<Registry, CliError> {
    let mut reg = Registry::builtin().clone();
    if let Some(path) = &config.run.registry {
        reg.merge(&Registry::load(path)?)?;
    }
    Ok(reg)
}

#[derive(Debug, Serialize)]
pub struct CurveEntry {
    pub curve: String,
    pub profile: Option<SecurityProfile>,
    pub error: Option<String>,
}

fn estimate_curve(reg: &Registry, config: &RunConfig, name: &str) -> Result<SecurityProfile, Error> {
    let curve = reg.curve(name)?;
    let family = reg.family(&curve.family)?;
    let instance = reg.instance(name)?;
    let cfg = config.security_config();
    let mut p = profile(family, &instance, &cfg.grid, &cfg, config.run.seed)?;
    p.curve = Some(curve.name.clone());
    Ok(p)
}

fn emit<T: Serialize>(
    command: &str,
    config: &RunConfig,
    results: T,
    table: &Table,
    code: u8,
) -> Result<Output, CliError> {
    let text = Report::new(command, config, results).render(table, config.run.format)?;
    Ok(Output { text, code })
}

fn pick_families<'r>(
    reg: &'r Registry,
    names: &[String],
) -> Result<Vec<&'r pairsec::families::FamilySpec>, CliError> {
    if names.is_empty() {
        Ok(reg.families().iter().collect())
    } else {
        Ok(names.iter().map(|n| reg.family(n)).collect::<Result<_, _>>()?)
    }
}

/// Runs one parsed command and renders its report.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let config = resolve_config(&cli.global)?;
    let reg = registry(&config)?;
    let cfg = config.security_config();
    let seed = config.run.seed;
    match &cli.command {
        Command::Estimate { curves } => {
            for c in curves {
                reg.curve(c)?;
            }
            let profiles = curves
                .iter()
                .map(|c| estimate_curve(&reg, &config, c))
                .collect::<Result<Vec<_>, _>>()?;
            let table = report::profiles_table(&profiles);
            emit("estimate", &config, profiles, &table, 0)
        }
        Command::Table7 => {
            let names: Vec<String> = reg.curves().iter().map(|c| c.name.clone()).collect();
            let entries: Vec<CurveEntry> = names
                .par_iter()
                .map(|n| match estimate_curve(&reg, &config, n) {
                    Ok(p) => CurveEntry { curve: n.clone(), profile: Some(p), error: None },
                    Err(e) => CurveEntry { curve: n.clone(), profile: None, error: Some(e.to_string()) },
                })
                .collect();
            let profiles: Vec<SecurityProfile> =
                entries.iter().filter_map(|e| e.profile.clone()).collect();
            let table = report::profiles_table(&profiles);
            emit("table7", &config, entries, &table, 0)
        }
        Command::Table8 { levels, families } => {
            let levels = if levels.is_empty() { config.security.levels.clone() } else { levels.clone() };
            let fams = pick_families(&reg, families)?;
            let jobs: Vec<(usize, u64)> = (0..fams.len())
                .flat_map(|i| levels.iter().map(move |&l| (i, l)))
                .collect();
            let results = jobs
                .par_iter()
                .map(|&(i, l)| min_p_for_level(fams[i], l, &cfg, seed))
                .collect::<Result<Vec<_>, _>>()?;
            let table = report::levels_table(&levels, &results);
            emit("table8", &config, results, &table, 0)
        }
        Command::Sweep { family, from, to, step, fine } => {
            let fam = reg.family(family)?;
            let s = &config.sweep;
            let sweep = crossover_sweep(
                fam,
                from.unwrap_or(s.from_bits),
                to.unwrap_or(s.to_bits),
                step.unwrap_or(s.step_bits),
                fine.unwrap_or(s.fine_step_bits),
                &cfg,
                seed,
            )?;
            let code = if sweep.points.is_empty() { 1 } else { 0 };
            let table = report::sweep_table(&sweep);
            emit("sweep", &config, sweep, &table, code)
        }
        Command::Compare { levels, families } => {
            let levels = if levels.is_empty() { vec![100, 160, 192, 256] } else { levels.clone() };
            let fams = pick_families(&reg, families)?;
            let rankings = levels
                .iter()
                .map(|&l| {
                    let results = fams
                        .par_iter()
                        .map(|f| min_p_for_level(f, l, &cfg, seed))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(RankingAtLevel {
                        level_bits: l,
                        ranking: rank(&fams, results, &config.pairing)?,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let table = report::ranking_table(&rankings);
            emit("compare", &config, rankings, &table, 0)
        }
        Command::Asymptote { q_bits, variants } => {
            let q = if q_bits.is_empty() { vec![1024, 3072, 12288] } else { q_bits.clone() };
            let v = if variants.is_empty() { COMPARED.to_vec() } else { variants.clone() };
            let rows = report::asymptotic_rows(&q, &v)?;
            let table = report::asymptotic_table(&rows);
            emit("asymptote", &config, rows, &table, 0)
        }
        Command::ListCurves => {
            let listing = reg
                .curves()
                .iter()
                .map(|c| {
                    Ok(CurveListing { curve: c.clone(), instance: reg.instance(&c.name)? })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let table = report::curves_table(&listing);
            emit("list-curves", &config, listing, &table, 0)
        }
    }
}

/// Parses `args`, runs the command, writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let run = || -> Result<u8, CliError> {
        let out = execute(&cli)?;
        match &cli.global.out {
            Some(path) => std::fs::write(path, &out.text).map_err(Error::from)?,
            None => print!("{}", out.text),
        }
        Ok(out.code)
    };
    let result = match cli.global.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(CliError::Usage(e.to_string())),
        },
        None => run(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
