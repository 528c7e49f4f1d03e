//! `nagata`: command line front end.
//!
//! Exit codes: 0 on success, PASS or EVIDENCE-ONLY; 1 on FAIL; 2 on error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use nagata_core::catalog::{
    build_cover_file, builtin_catalog, canonical_model, compare_to_prediction, load_record, lookup, run_experiment,
    verify_cover_file, write_record, ExperimentContext, ExperimentOutput, ExperimentRecord, Verdict, VerdictKind,
};
use nagata_core::cover_engine::{ControlEntry, CoverFile};
use nagata_core::group_models::ball::{cached_ball, write_csv};
use nagata_core::group_models::{bfs_ball, lamplighter_model, sol_lattice_model, GroupModel, Heisenberg, Zn, CAT_MAP};
use nagata_core::lie_algebra::{algebras, classify, LieAlgebra};

#[derive(Parser)]
#[command(name = "nagata", version, about = "Assouad-Nagata dimension experiments on groups")]
struct Cli {
    /// Ball cache directory.
    #[arg(long, global = true, env = "NAGATA_CACHE")]
    cache: Option<PathBuf>,
    /// Print JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Print CSV where the result has a tabular form.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lie algebra tools.
    Lie {
        #[command(subcommand)]
        cmd: LieCmd,
    },
    /// Enumerate (and cache) a word ball.
    Ball {
        model: String,
        #[arg(long)]
        radius: u32,
    },
    /// Subgroup distortion: center of the Heisenberg group, fiber of SOL.
    Distortion {
        model: String,
        #[arg(long, default_value = "center")]
        subgroup: String,
        #[arg(long)]
        radius: u32,
        #[command(flatten)]
        save: Save,
    },
    /// Compare the word length with the layered quasi-norm.
    Karidi {
        model: String,
        #[arg(long)]
        radius: u32,
        #[command(flatten)]
        save: Save,
    },
    /// Build or verify covers.
    Cover {
        #[command(subcommand)]
        cmd: CoverCmd,
    },
    /// Greedy (heuristic) control curve.
    ControlCurve {
        model: String,
        #[arg(long)]
        families: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        scales: Vec<f64>,
        #[arg(long, default_value_t = 12)]
        radius: u32,
        #[command(flatten)]
        save: Save,
    },
    /// Diameters of translated intervals in the filiform group.
    FiliformDiameter {
        #[arg(long, default_value = "e3")]
        axis: String,
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        x1: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[command(flatten)]
        save: Save,
    },
    /// Run a JSON experiment spec.
    Run {
        spec: PathBuf,
        #[command(flatten)]
        save: Save,
    },
    /// Compare a stored record with a catalog entry.
    Compare { record: PathBuf, entry: String },
    /// List catalog entries, or show one.
    Catalog { name: Option<String> },
}

#[derive(Subcommand)]
enum LieCmd {
    /// Classify an algebra from a file (or a built-in name).
    Classify { file: String },
}

#[derive(Subcommand)]
enum CoverCmd {
    /// Build a cover; with one scale and `--out`, also write the cover file.
    Build {
        #[arg(long)]
        construction: String,
        #[arg(long)]
        model: String,
        #[arg(long)]
        radius: u32,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        scales: Vec<f64>,
        /// Cover file to write (requires a single scale).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        save: Save,
    },
    /// Verify a cover file.
    Verify {
        cover: PathBuf,
        #[arg(long)]
        scale: Option<f64>,
    },
}

#[derive(Args)]
struct Save {
    /// Persist the record under this directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Catalog entry to compare the result with.
    #[arg(long)]
    compare: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn ctx(cli: &Cli) -> ExperimentContext {
    ExperimentContext { cache_dir: cli.cache.clone() }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Lie { cmd: LieCmd::Classify { file } } => {
            let alg = load_algebra(file)?;
            let report = classify(&alg);
            if cli.json {
                print_json(&report)?;
            } else {
                println!("{}: dim {}", report.name, report.topological_dim);
                println!("  lower central dims {:?}", report.lower_central_dims);
                println!("  derived dims       {:?}", report.derived_dims);
                println!(
                    "  nilpotent {} solvable {} semisimple {}",
                    report.is_nilpotent, report.is_solvable, report.is_semisimple_by_killing
                );
                println!("  Killing determinant {}", report.killing_determinant);
                println!("  predicted asdim_AN {:?}", report.predicted_asdim_an);
            }
            Ok(0)
        }
        Cmd::Ball { model, radius } => ball(cli, model, *radius),
        Cmd::Distortion { model, subgroup, radius, save } => experiment(
            cli,
            json!({"experiment": "distortion", "model": model, "subgroup": subgroup, "radius": radius}),
            save,
        ),
        Cmd::Karidi { model, radius, save } => {
            experiment(cli, json!({"experiment": "karidi", "model": model, "radius": radius}), save)
        }
        Cmd::ControlCurve { model, families, scales, radius, save } => experiment(
            cli,
            json!({"experiment": "control-curve", "model": model, "families": families,
                   "scales": scales, "radius": radius}),
            save,
        ),
        Cmd::FiliformDiameter { axis, c, x1, h, points, save } => experiment(
            cli,
            json!({"experiment": "filiform-diameter", "axis": axis, "c": c, "x1": x1, "h": h, "points": points}),
            save,
        ),
        Cmd::Run { spec, save } => {
            let text = fs::read_to_string(spec).with_context(|| format!("reading {}", spec.display()))?;
            let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", spec.display()))?;
            experiment(cli, v, save)
        }
        Cmd::Cover { cmd: CoverCmd::Build { construction, model, radius, scales, out, save } } => {
            if let Some(path) = out {
                let [s] = scales.as_slice() else {
                    bail!("--out writes a single cover; pass exactly one scale");
                };
                let file = build_cover_file(construction, model, *radius, *s, &ctx(cli))?;
                fs::write(path, serde_json::to_string(&file)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {} ({} families)", path.display(), file.families.len());
                return Ok(0);
            }
            experiment(
                cli,
                json!({"experiment": "cover", "construction": construction, "model": model,
                       "radius": radius, "scales": scales}),
                save,
            )
        }
        Cmd::Cover { cmd: CoverCmd::Verify { cover, scale } } => {
            let text = fs::read_to_string(cover).with_context(|| format!("reading {}", cover.display()))?;
            let file: CoverFile = serde_json::from_str(&text).context("parsing cover file")?;
            let entry = verify_cover_file(&file, *scale, &ctx(cli))?;
            print_entry(cli, &entry)?;
            Ok(if entry.pass { 0 } else { 1 })
        }
        Cmd::Compare { record, entry } => {
            let rec = load_record(record)?;
            let e = lookup(entry).ok_or_else(|| anyhow!("no catalog entry named {entry:?}"))?;
            let v = compare_to_prediction(&rec, &e)?;
            print_verdict(cli, &v)?;
            Ok(v.verdict.exit_code() as u8)
        }
        Cmd::Catalog { name } => {
            let entries = match name {
                Some(n) => vec![lookup(n).ok_or_else(|| anyhow!("no catalog entry named {n:?}"))?],
                None => builtin_catalog(),
            };
            if cli.json {
                print_json(&entries)?;
            } else {
                for e in &entries {
                    let show = |p: &Option<nagata_core::catalog::Prediction>| {
                        p.as_ref().map_or("-".to_string(), |p| p.value.to_string())
                    };
                    println!(
                        "{:<20} asdim {:<3} asdim_AN {:<3} dim_AN {:<3} hirsch {:<3}",
                        e.name,
                        show(&e.asdim),
                        show(&e.asdim_an),
                        show(&e.dim_an),
                        show(&e.hirsch)
                    );
                    if name.is_some() {
                        for (what, p) in e.predictions() {
                            println!("  {what}: {} ({})", p.value, p.citation);
                        }
                        if !e.notes.is_empty() {
                            println!("  note: {}", e.notes);
                        }
                    }
                }
            }
            Ok(0)
        }
    }
}

fn load_algebra(file: &str) -> Result<LieAlgebra> {
    let path = Path::new(file);
    if !path.exists() {
        if let Some(a) = algebras::builtin(file) {
            return Ok(a);
        }
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {file}"))?;
    Ok(LieAlgebra::parse(&text)?)
}

fn ball(cli: &Cli, model: &str, radius: u32) -> Result<u8> {
    fn go<G: GroupModel>(cli: &Cli, m: &G, radius: u32) -> Result<u8> {
        let ball = match &cli.cache {
            Some(dir) => cached_ball(m, radius, dir)?,
            None => bfs_ball(m, radius)?,
        };
        if cli.csv {
            write_csv(m, &ball, io::stdout().lock())?;
            return Ok(0);
        }
        let mut spheres = vec![0u64; radius as usize + 1];
        for &l in ball.lengths() {
            spheres[l as usize] += 1;
        }
        if cli.json {
            print_json(&json!({"model": m.name(), "radius": radius, "size": ball.len(), "spheres": spheres}))?;
        } else {
            println!("{} radius {}: {} elements", m.name(), radius, ball.len());
            println!("sphere sizes {spheres:?}");
        }
        Ok(0)
    }
    match canonical_model(model) {
        Some("Z^1") => go(cli, &Zn::<1>, radius),
        Some("Z^2") => go(cli, &Zn::<2>, radius),
        Some("Z^3") => go(cli, &Zn::<3>, radius),
        Some("heisenberg") => go(cli, &Heisenberg, radius),
        Some("sol") => go(cli, &sol_lattice_model(CAT_MAP)?, radius),
        Some(_) => go(cli, &lamplighter_model(), radius),
        None => bail!("unknown model {model:?}"),
    }
}

fn experiment(cli: &Cli, spec: Value, save: &Save) -> Result<u8> {
    // resolve the entry first so a typo fails before a long run
    let entry = match &save.compare {
        Some(n) => Some(lookup(n).ok_or_else(|| anyhow!("no catalog entry named {n:?}"))?),
        None => None,
    };
    let rec = run_experiment(&spec, &ctx(cli))?;
    if let Some(dir) = &save.out_dir {
        fs::create_dir_all(dir)?;
        let d = write_record(dir, &rec)?;
        eprintln!("record written to {}", d.display());
    }
    print_record(cli, &rec)?;
    match entry {
        Some(e) => {
            let v = compare_to_prediction(&rec, &e)?;
            print_verdict(cli, &v)?;
            Ok(v.verdict.exit_code() as u8)
        }
        None => Ok(match &rec.output {
            ExperimentOutput::Cover { certificate, .. } if !certificate.pass => 1,
            _ => 0,
        }),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn print_record(cli: &Cli, rec: &ExperimentRecord) -> Result<()> {
    if cli.json {
        return print_json(rec);
    }
    if cli.csv {
        match &rec.csv {
            Some(c) => print!("{c}"),
            None => bail!("{} results have no CSV form", rec.spec.kind()),
        }
        return Ok(());
    }
    println!("{} [{}]", rec.spec.kind(), rec.id);
    match &rec.output {
        ExperimentOutput::Distortion { pairs, interior_pairs, power, log, linear, warning, .. } => {
            println!("  {pairs} pairs, {interior_pairs} interior");
            for (name, f) in [("power", power), ("log", log), ("linear", linear)] {
                if let Some(f) = f {
                    println!(
                        "  {name:<6} a {:.4} b {:.4} alpha {:.4} residual {:.4}",
                        f.a, f.b, f.alpha, f.max_relative_residual
                    );
                }
            }
            if let Some(w) = warning {
                println!("  warning: {w}");
            }
        }
        ExperimentOutput::Karidi { estimate } => {
            println!("  kappa {:.4} over {} samples (worst {:?})", estimate.kappa_hat, estimate.samples, estimate.worst);
        }
        ExperimentOutput::Cover { certificate, .. } => {
            println!("  {} on {} R={}, {} families", certificate.construction, certificate.model, certificate.radius, certificate.families);
            for e in &certificate.entries {
                print_entry_line(e);
            }
            match (&certificate.fit, &certificate.fit_error) {
                (Some(f), _) => println!("  linear fit residual {:.4}", f.max_relative_residual),
                (None, Some(e)) => println!("  linear fit: {e}"),
                _ => {}
            }
            println!("  certificate {}", if certificate.pass { "passes" } else { "fails" });
        }
        ExperimentOutput::ControlCurve { samples, linear, power, .. } => {
            for c in samples {
                match (c.bound, c.rho) {
                    (Some(b), Some(r)) => println!(
                        "  s {:<6} bound {:<6} rho {:<4} clusters {:<7} colours {}",
                        c.scale, b, r, c.clusters, c.colors
                    ),
                    _ => println!("  s {:<6} no cover found", c.scale),
                }
            }
            if let Some(f) = linear {
                println!("  linear residual {:.4}", f.max_relative_residual);
            }
            if let Some(f) = power {
                println!("  power exponent {:.4} residual {:.4}", f.alpha, f.max_relative_residual);
            }
            println!("  (heuristic upper estimate)");
        }
        ExperimentOutput::FiliformDiameter { rows } => {
            for r in rows {
                println!(
                    "  x1 {:<4} diameter {:.4} claim {:.4} ratio {:.3} refined {:.4} change {:.3}",
                    r.x1, r.diameter, r.claim, r.ratio, r.refined_diameter, r.refinement_change
                );
            }
        }
        ExperimentOutput::LieClassify { report } => {
            println!("  {} dim {} lower central {:?}", report.name, report.topological_dim, report.lower_central_dims);
            println!("  predicted asdim_AN {:?}", report.predicted_asdim_an);
        }
    }
    Ok(())
}

fn print_entry_line(e: &ControlEntry) {
    println!(
        "  s {:<6} claimed {:<8} verified {:<8} interior {:<8} components {:<7} {}",
        e.scale,
        e.claimed_bound,
        e.verified_bound,
        e.interior_bound,
        e.components,
        if e.pass { "ok" } else { "over" }
    );
}

fn print_entry(cli: &Cli, e: &ControlEntry) -> Result<()> {
    if cli.json {
        return print_json(e);
    }
    print_entry_line(e);
    Ok(())
}

fn print_verdict(cli: &Cli, v: &Verdict) -> Result<()> {
    if cli.json {
        return print_json(v);
    }
    println!("{}: {} vs {}", v.verdict, v.experiment, v.entry);
    println!("  rule: {}", v.rule);
    println!("  {}", v.detail);
    println!("  prediction: {}", v.citation);
    if v.verdict == VerdictKind::EvidenceOnly {
        println!("  (evidence only, not a proof)");
    }
    Ok(())
}
