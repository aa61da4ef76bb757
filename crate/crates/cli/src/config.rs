//! Run configuration: a TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use sc_ldpc::cpo::{CpoConfig, PowerCandidates};
use sc_ldpc::optimizer::{OptimizerConfig, Strategy};

pub const OUT_DIR_ENV: &str = "SCLDPC_OUT_DIR";

/// Flags shared by every command. Unset flags fall back to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Column weight γ.
    #[arg(long, global = true)]
    pub gamma: Option<usize>,
    /// Row weight κ.
    #[arg(long, global = true)]
    pub kappa: Option<usize>,
    /// Circulant size (defaults to κ).
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Memory.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Coupling length.
    #[arg(long = "L", global = true)]
    pub l: Option<usize>,
    /// Cutting vector, comma separated; repeat once per component boundary.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1.., action = clap::ArgAction::Append)]
    pub zeta: Option<Vec<usize>>,
    /// Independent overlap vector, comma separated, canonical order.
    #[arg(long, global = true, value_delimiter = ',')]
    pub overlaps: Option<Vec<i64>>,
    /// Partition grid file.
    #[arg(long, global = true)]
    pub partition: Option<PathBuf>,
    /// Take the partition from the optimal-overlap search.
    #[arg(long, global = true)]
    pub optimize: bool,
    /// Circulant power grid file (defaults to f = i·j mod p).
    #[arg(long, global = true)]
    pub powers: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// exhaustive | branch-and-bound | local-search
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Per-component balance slack, in circulants.
    #[arg(long, global = true)]
    pub slack: Option<usize>,
    /// Stop CPO at this many lifted cycles-6.
    #[arg(long, global = true)]
    pub target: Option<u64>,
    /// Stop CPO after this many rounds without improvement.
    #[arg(long, global = true)]
    pub stale: Option<usize>,
    /// Reorder partition columns for the fewest cycles-6 before CPO.
    #[arg(long, global = true)]
    pub arrange: bool,
    /// Skip CPO in the pipeline.
    #[arg(long, global = true)]
    pub no_cpo: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    code: CodeSection,
    #[serde(default)]
    partition: PartitionSection,
    #[serde(default)]
    optimizer: OptimizerSection,
    #[serde(default)]
    cpo: CpoSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeSection {
    gamma: Option<usize>,
    kappa: Option<usize>,
    p: Option<usize>,
    m: Option<usize>,
    #[serde(rename = "L")]
    l: Option<usize>,
    powers: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionSection {
    zeta: Option<Vec<Vec<usize>>>,
    overlaps: Option<Vec<i64>>,
    file: Option<PathBuf>,
    #[serde(default)]
    optimize: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizerSection {
    strategy: Option<String>,
    balance_tolerance: Option<usize>,
    restarts: Option<usize>,
    time_budget_secs: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CpoSection {
    enabled: Option<bool>,
    target_f_sc: Option<u64>,
    max_stale_rounds: Option<usize>,
    subset_sizes: Option<Vec<usize>>,
    power_sample: Option<usize>,
    top_pool: Option<usize>,
    random_subsets: Option<usize>,
    time_budget_secs: Option<u64>,
    arrange: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionSource {
    CuttingVectors(Vec<Vec<usize>>),
    Overlaps(Vec<i64>),
    File(PathBuf),
    Optimize,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub gamma: usize,
    pub kappa: usize,
    pub p: usize,
    pub m: Option<usize>,
    pub l: usize,
    pub partition: Option<PartitionSource>,
    pub powers: Option<PathBuf>,
    pub optimizer: OptimizerConfig,
    pub cpo: CpoConfig,
    pub cpo_enabled: bool,
    pub arrange: bool,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
}

fn parse_strategy(s: &str) -> Result<Strategy> {
    Ok(match s {
        "exhaustive" => Strategy::Exhaustive,
        "branch-and-bound" | "bnb" => Strategy::BranchAndBound,
        "local-search" | "local" => Strategy::LocalSearch,
        other => bail!("unknown strategy {other:?} (exhaustive | branch-and-bound | local-search)"),
    })
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Resolves a path from the config file relative to the file's directory.
fn relative_to(base: Option<&Path>, p: PathBuf) -> PathBuf {
    match base.and_then(Path::parent) {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let base = args.config.as_deref();

        let gamma = args.gamma.or(file.code.gamma).context("missing --gamma")?;
        let kappa = args.kappa.or(file.code.kappa).context("missing --kappa")?;
        let p = args.p.or(file.code.p).unwrap_or(kappa);
        let l = args.l.or(file.code.l).context("missing --L")?;
        let m = args.m.or(file.code.m);

        let mut sources = Vec::new();
        if let Some(z) = &args.zeta {
            sources.push(PartitionSource::CuttingVectors(split_zeta(z, gamma)?));
        }
        if let Some(t) = &args.overlaps {
            sources.push(PartitionSource::Overlaps(t.clone()));
        }
        if let Some(f) = &args.partition {
            sources.push(PartitionSource::File(f.clone()));
        }
        if args.optimize {
            sources.push(PartitionSource::Optimize);
        }
        if sources.len() > 1 {
            bail!("--zeta, --overlaps, --partition and --optimize are mutually exclusive");
        }
        if sources.is_empty() {
            let fp = &file.partition;
            if let Some(z) = &fp.zeta {
                sources.push(PartitionSource::CuttingVectors(z.clone()));
            }
            if let Some(t) = &fp.overlaps {
                sources.push(PartitionSource::Overlaps(t.clone()));
            }
            if let Some(f) = &fp.file {
                sources.push(PartitionSource::File(relative_to(base, f.clone())));
            }
            if fp.optimize {
                sources.push(PartitionSource::Optimize);
            }
            if sources.len() > 1 {
                bail!("[partition] sets more than one of zeta, overlaps, file, optimize");
            }
        }
        let partition = sources.pop();

        let mut optimizer = OptimizerConfig::default();
        if let Some(s) = args
            .strategy
            .as_deref()
            .or(file.optimizer.strategy.as_deref())
        {
            optimizer.strategy = parse_strategy(s)?;
        }
        if let Some(t) = args.slack.or(file.optimizer.balance_tolerance) {
            optimizer.balance_tolerance = t;
        }
        if let Some(r) = file.optimizer.restarts {
            optimizer.restarts = r;
        }
        optimizer.time_budget = file.optimizer.time_budget_secs.map(Duration::from_secs);

        let seed = args.seed.or(file.output.seed);
        let mut cpo = CpoConfig::default();
        let fc = &file.cpo;
        if let Some(t) = args.target.or(fc.target_f_sc) {
            cpo.target_f_sc = t;
        }
        if let Some(s) = args.stale.or(fc.max_stale_rounds) {
            cpo.max_stale_rounds = s;
        }
        if let Some(s) = &fc.subset_sizes {
            cpo.subset_size_schedule = s.clone();
        }
        if let Some(s) = fc.power_sample {
            cpo.power_candidates = PowerCandidates::Sample(s);
        }
        if let Some(n) = fc.top_pool {
            cpo.top_pool = n;
        }
        if let Some(n) = fc.random_subsets {
            cpo.random_subsets = n;
        }
        cpo.time_budget = fc.time_budget_secs.map(Duration::from_secs);
        if let Some(s) = seed {
            cpo.seed = s;
            optimizer.seed = s;
        }

        let out_dir = args
            .out
            .clone()
            .or_else(|| file.output.dir.clone().map(|d| relative_to(base, d)))
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("scldpc-out"));

        Ok(Self {
            gamma,
            kappa,
            p,
            m,
            l,
            partition,
            powers: args
                .powers
                .clone()
                .or_else(|| file.code.powers.clone().map(|p| relative_to(base, p))),
            optimizer,
            cpo,
            cpo_enabled: !args.no_cpo && fc.enabled.unwrap_or(true),
            arrange: args.arrange || fc.arrange.unwrap_or(false),
            seed,
            out_dir,
        })
    }

    /// Seed for a heuristic stage; runs must be reproducible.
    pub fn require_seed(&self, stage: &str) -> Result<u64> {
        self.seed
            .with_context(|| format!("{stage} is heuristic: pass --seed (or [output] seed)"))
    }

    pub fn memory(&self) -> Result<usize> {
        match (&self.m, &self.partition) {
            (Some(m), _) => Ok(*m),
            (None, Some(PartitionSource::CuttingVectors(z))) => Ok(z.len()),
            _ => bail!("missing --m"),
        }
    }
}

/// Splits a flat `--zeta` list into vectors of length γ.
fn split_zeta(flat: &[usize], gamma: usize) -> Result<Vec<Vec<usize>>> {
    if gamma == 0 || flat.is_empty() || !flat.len().is_multiple_of(gamma) {
        bail!(
            "--zeta needs a multiple of gamma = {gamma} entries, got {}",
            flat.len()
        );
    }
    Ok(flat.chunks(gamma).map(<[usize]>::to_vec).collect())
}
