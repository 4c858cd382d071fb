use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "kacmoody", version, about = "Experiments on right-angled Fuchsian Kac-Moody groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Weyl growth coefficients and the lattice criterion.
    Growth,
    /// Cartan matrix diagnostics: Coxeter data, admissibility, root pairs.
    Gcm,
    /// Ball statistics, panel and link audits of the building.
    Building,
    /// Property suite on the tree-wall.
    Treewall,
    /// Conjugated stabilizers and their Chabauty limit.
    Chabauty,
    /// Every command in turn.
    All,
}

#[derive(Args, Debug, Default)]
pub struct Opts {
    /// Polygon size.
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Field orders or thickness parameters, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub q: Option<Vec<u32>>,
    /// Degree, ball radius or observation level, depending on the command.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Largest conjugation exponent.
    #[arg(long, global = true)]
    pub nmax: Option<i64>,
    /// Precision window for series and monomial ranges.
    #[arg(long, global = true)]
    pub window: Option<i64>,
    /// JSON file holding a Cartan matrix as a list of rows.
    #[arg(long = "gcm-file", global = true)]
    pub gcm_file: Option<PathBuf>,
    /// Directory for reports and tables.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Path of the apartment SVG.
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with any of the options above; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Options after merging the config file under the flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub r: Option<usize>,
    pub q: Option<Vec<u32>>,
    pub depth: Option<u32>,
    pub nmax: Option<i64>,
    pub window: Option<i64>,
    pub gcm_file: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Settings {
    pub fn resolve(opts: &Opts) -> Result<Settings> {
        let file = match &opts.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => Settings::default(),
        };
        let s = Settings {
            r: opts.r.or(file.r),
            q: opts.q.clone().or(file.q),
            depth: opts.depth.or(file.depth),
            nmax: opts.nmax.or(file.nmax),
            window: opts.window.or(file.window),
            gcm_file: opts.gcm_file.clone().or(file.gcm_file),
            out: opts.out.clone().or(file.out),
            svg: opts.svg.clone().or(file.svg),
            seed: opts.seed.or(file.seed),
        };
        if s.q.as_ref().is_some_and(|q| q.is_empty()) {
            bail!("--q needs at least one value");
        }
        Ok(s)
    }

    pub fn qs(&self, default: &[u32]) -> Vec<u32> {
        self.q.clone().unwrap_or_else(|| default.to_vec())
    }
}
