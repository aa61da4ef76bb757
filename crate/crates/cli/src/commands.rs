use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use sc_ldpc::census::{active_cycles6, brute_force_cycles4, brute_force_cycles6, census_spec};
use sc_ldpc::code::{
    ab_powers, partition_from_cutting_vectors, CirculantBlockCode, PartitionMatrix, ScCodeSpec,
};
use sc_ldpc::cpo::{arrange_columns, run_cpo, CpoState};
use sc_ldpc::io;
use sc_ldpc::objects::{enumerate_objects, species_templates};
use sc_ldpc::optimizer::{optimize, Optimum, Strategy};
use sc_ldpc::overlaps::{partition_from_overlaps, validate_realizable, IndependentOverlaps};

use crate::config::{PartitionSource, RunConfig};

/// Distinct column layouts scored exhaustively before falling back to swaps.
const MAX_ARRANGEMENTS: usize = 20_000;

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run_optimizer(cfg: &RunConfig, m: usize) -> Result<Optimum> {
    if cfg.optimizer.strategy == Strategy::LocalSearch {
        cfg.require_seed("local search")?;
    }
    Ok(optimize(cfg.kappa, cfg.gamma, m, cfg.l, &cfg.optimizer)?)
}

fn print_optimum(opt: &Optimum) {
    println!("t* = {:?}", opt.t_star.values());
    println!("F* = {} ({})", opt.f_star, opt.proof.as_str());
}

/// The partition named by the config, plus the optimum when it came from
/// the optimizer.
fn partition(
    cfg: &RunConfig,
    default: Option<PartitionSource>,
) -> Result<(PartitionMatrix, Option<Optimum>)> {
    if cfg.partition.is_none() && cfg.m == Some(0) {
        return Ok((PartitionMatrix::uncoupled(cfg.gamma, cfg.kappa, 0)?, None));
    }
    let source =
        cfg.partition.clone().or(default).context(
            "no partition: pass --zeta, --overlaps, --partition or --optimize (or --m 0)",
        )?;
    Ok(match source {
        PartitionSource::CuttingVectors(z) => {
            if cfg.m.is_some_and(|m| m != z.len()) {
                bail!(
                    "--m {} disagrees with {} cutting vectors",
                    cfg.m.unwrap_or(0),
                    z.len()
                );
            }
            (
                partition_from_cutting_vectors(cfg.gamma, cfg.kappa, &z)?,
                None,
            )
        }
        PartitionSource::Overlaps(t) => {
            let ind = IndependentOverlaps::new(cfg.gamma, cfg.memory()?, cfg.kappa, t)?;
            if let Err(diag) = validate_realizable(&ind) {
                bail!("overlap vector is not realizable: {diag}");
            }
            (partition_from_overlaps(&ind)?, None)
        }
        PartitionSource::File(path) => {
            let p = io::read_partition(&read(&path)?, cfg.m)?;
            if (p.gamma(), p.kappa()) != (cfg.gamma, cfg.kappa) {
                bail!(
                    "{} is {}x{}, expected {}x{}",
                    path.display(),
                    p.gamma(),
                    p.kappa(),
                    cfg.gamma,
                    cfg.kappa
                );
            }
            (p, None)
        }
        PartitionSource::Optimize => {
            let opt = run_optimizer(cfg, cfg.memory()?)?;
            print_optimum(&opt);
            (opt.partition(), Some(opt))
        }
    })
}

fn powers(cfg: &RunConfig) -> Result<Vec<usize>> {
    match &cfg.powers {
        None => Ok(ab_powers(cfg.gamma, cfg.kappa, cfg.p)),
        Some(path) => {
            let (g, k, f) = io::read_powers(&read(path)?)?;
            if (g, k) != (cfg.gamma, cfg.kappa) {
                bail!(
                    "{} is {g}x{k}, expected {}x{}",
                    path.display(),
                    cfg.gamma,
                    cfg.kappa
                );
            }
            Ok(f)
        }
    }
}

fn spec(cfg: &RunConfig, part: PartitionMatrix, f: Vec<usize>) -> Result<ScCodeSpec> {
    let block = CirculantBlockCode::new(cfg.gamma, cfg.kappa, cfg.p, f)?;
    Ok(ScCodeSpec::new(block, part, cfg.l)?)
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<()> {
    let opt = run_optimizer(cfg, cfg.memory()?)?;
    print_optimum(&opt);
    write(&cfg.out_dir, "optimum.csv", &io::optimum_csv(&opt))?;
    write(
        &cfg.out_dir,
        "partition.txt",
        &io::write_partition(&opt.partition()),
    )?;
    Ok(())
}

pub fn cmd_census(cfg: Option<&RunConfig>, matrix: Option<&Path>, species: bool) -> Result<()> {
    if let Some(path) = matrix {
        let h =
            io::from_alist(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        let (c4, c6) = (brute_force_cycles4(&h), brute_force_cycles6(&h));
        println!(
            "{}x{} matrix: {c4} cycles-4, {c6} cycles-6",
            h.rows(),
            h.cols()
        );
        if let Some(cfg) = cfg {
            write(
                &cfg.out_dir,
                "census.csv",
                &format!("quantity,value\ncycles4,{c4}\ncycles6,{c6}\n"),
            )?;
        }
        return Ok(());
    }
    let cfg = cfg.context("census needs code parameters or --matrix")?;
    let (part, _) = partition(cfg, None)?;
    let s = spec(cfg, part, powers(cfg)?)?;
    let proto = census_spec(&s);
    let lifted = active_cycles6(&s).lifted_census();
    println!("protograph cycles-6: {}", proto.total);
    println!("lifted cycles-6: {}", lifted.total);
    write(
        &cfg.out_dir,
        "census.csv",
        &io::census_csv(&[proto, lifted]),
    )?;
    if species {
        let mut rows = Vec::new();
        for t in species_templates(cfg.gamma) {
            let sp = t.species()?;
            match enumerate_objects(&s, &sp) {
                Ok(c) => {
                    println!("{sp}: {}", c.total);
                    rows.push((sp, c));
                }
                Err(e) => println!("{sp}: skipped ({e})"),
            }
        }
        write(&cfg.out_dir, "species.csv", &io::species_csv(&rows))?;
    }
    Ok(())
}

fn optimize_powers(cfg: &RunConfig, s: ScCodeSpec) -> Result<(ScCodeSpec, CpoState)> {
    let seed = cfg.require_seed("CPO")?;
    let s = if cfg.arrange {
        let (part, f) = arrange_columns(s.block(), s.partition(), cfg.l, MAX_ARRANGEMENTS)?;
        println!("arranged columns: {f} lifted cycles-6 before CPO");
        ScCodeSpec::new(s.block().clone(), part, cfg.l)?
    } else {
        s
    };
    let mut cpo = cfg.cpo.clone();
    cpo.seed = seed;
    let before = active_cycles6(&s).f_sc();
    let state = run_cpo(&s, &cpo)?;
    println!(
        "CPO: {before} -> {} lifted cycles-6 ({} rounds, {} accepted moves)",
        state.f_sc,
        state.rounds,
        state.accepted_moves()
    );
    Ok((state.apply_to(&s)?, state))
}

pub fn cmd_cpo(cfg: &RunConfig) -> Result<()> {
    let (part, _) = partition(cfg, None)?;
    let s = spec(cfg, part, powers(cfg)?)?;
    let (tuned, state) = optimize_powers(cfg, s)?;
    write(
        &cfg.out_dir,
        "powers.txt",
        &io::write_powers(&state.powers, cfg.gamma, cfg.kappa),
    )?;
    write(
        &cfg.out_dir,
        "partition.txt",
        &io::write_partition(tuned.partition()),
    )?;
    write(&cfg.out_dir, "trace.csv", &io::trace_csv(&state.trace))?;
    Ok(())
}

pub fn cmd_lift(cfg: &RunConfig) -> Result<()> {
    let (part, _) = partition(cfg, None)?;
    let s = spec(cfg, part, powers(cfg)?)?;
    let h = s.lift();
    println!("H_SC: {} x {}, {} ones", h.rows(), h.cols(), h.nnz());
    write(&cfg.out_dir, "h_sc.alist", &io::to_alist(&h))?;
    Ok(())
}

pub fn cmd_export(cfg: &RunConfig) -> Result<()> {
    let (part, _) = partition(cfg, None)?;
    let s = spec(cfg, part, powers(cfg)?)?;
    write(
        &cfg.out_dir,
        "h_sc_protograph.alist",
        &io::to_alist(&s.protograph()),
    )?;
    write(
        &cfg.out_dir,
        "partition.txt",
        &io::write_partition(s.partition()),
    )?;
    write(
        &cfg.out_dir,
        "powers.txt",
        &io::write_powers(s.block().powers(), cfg.gamma, cfg.kappa),
    )?;
    Ok(())
}

pub fn cmd_pipeline(cfg: &RunConfig) -> Result<()> {
    let (part, opt) = partition(cfg, Some(PartitionSource::Optimize))?;
    if let Some(opt) = &opt {
        write(&cfg.out_dir, "optimum.csv", &io::optimum_csv(opt))?;
    }
    let s = spec(cfg, part, powers(cfg)?)?;
    let s = if cfg.cpo_enabled {
        let (tuned, state) = optimize_powers(cfg, s)?;
        write(&cfg.out_dir, "trace.csv", &io::trace_csv(&state.trace))?;
        tuned
    } else {
        s
    };
    write(
        &cfg.out_dir,
        "partition.txt",
        &io::write_partition(s.partition()),
    )?;
    write(
        &cfg.out_dir,
        "powers.txt",
        &io::write_powers(s.block().powers(), cfg.gamma, cfg.kappa),
    )?;
    let proto = census_spec(&s);
    let lifted = active_cycles6(&s).lifted_census();
    println!("protograph cycles-6: {}", proto.total);
    println!("lifted cycles-6: {}", lifted.total);
    write(
        &cfg.out_dir,
        "census.csv",
        &io::census_csv(&[proto, lifted]),
    )?;
    write(&cfg.out_dir, "h_sc.alist", &io::to_alist(&s.lift()))?;
    Ok(())
}
