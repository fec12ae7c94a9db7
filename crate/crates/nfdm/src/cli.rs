use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nfdm_core::nft::{forward_nft, inverse_nft, inverse_nft_exact, scattering_to_spectrum};
use nfdm_core::signal::relative_l2;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::harness::{run_experiment_with_threads, threads_from_env, Aggregate, RunOutput};
use crate::io::{read_dump, read_records, write_dump, write_records, Dump, Units};
use crate::plot::{emit_plot, PlotSpec};
use crate::presets::{preset, PRESET_NAMES};

#[derive(Debug, Parser)]
#[command(name = "nfdm", version, about = "PDM-NFDM and OFDM link simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment config, or every experiment of a preset.
    Run {
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Records file for a config run, directory for a preset run.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to NFDM_THREADS, then all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config and print the resolved parameter table.
    Validate { config: PathBuf },
    /// Render records to SVG and CSV.
    Plot { records: PathBuf, spec: PathBuf },
    /// Debug helpers for the transform itself.
    Nft {
        #[command(subcommand)]
        command: NftCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum NftCommand {
    /// Forward then inverse transform of a normalized signal dump.
    Roundtrip {
        signal: PathBuf,
        /// Use the first-order inverse instead of the exact one.
        #[arg(long)]
        first_order: bool,
        /// Where to write the reconstructed signal.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn summary_line(a: &Aggregate) -> String {
    let mut s = format!("{:<24} {:>7.2} dBm", a.experiment_id, a.power_dbm);
    if let Some(o) = a.osnr_db {
        s += &format!("  OSNR {o:>5.1} dB");
    }
    if let Some(t) = a.n_taps {
        s += &format!("  {t:>3} taps");
    }
    let q = a.q_db.map_or("   -  ".into(), |q| format!("{q:>6.2}"));
    s += &format!("  BER {:.3e}  Q {q} dB  ({} bits", a.ber, a.bits_compared);
    if a.n_failed > 0 {
        s += &format!(", {} failed", a.n_failed);
    }
    s + ")"
}

fn run_one(config: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutput> {
    for w in config.validate()? {
        eprintln!("warning: {w}");
    }
    let out = run_experiment_with_threads(config, threads)?;
    for a in &out.aggregates {
        println!("{}", summary_line(a));
    }
    Ok(out)
}

fn run_preset(name: &str, dir: &Path, threads: Option<usize>) -> Result<()> {
    let p = preset(name).ok_or_else(|| {
        Error::Config(format!(
            "unknown preset {name:?}; known: {}",
            PRESET_NAMES.join(", ")
        ))
    })?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut all = RunOutput::default();
    for c in &p.experiments {
        let out = run_one(c, threads)?;
        all.records.extend(out.records);
        all.aggregates.extend(out.aggregates);
    }
    let records = dir.join(format!("{name}.jsonl"));
    write_records(&records, &all.entries())?;
    println!("wrote {}", records.display());
    for spec in &p.plots {
        let spec = PlotSpec {
            output: dir.join(&spec.output),
            ..spec.clone()
        };
        let (svg, csv) = emit_plot(&all, &spec)?;
        println!("wrote {} and {}", svg.display(), csv.display());
    }
    Ok(())
}

/// Relative L² error of the round trip, and the reconstructed dump.
pub fn nft_roundtrip(dump: &Dump, first_order: bool) -> Result<(f64, Dump)> {
    if dump.units != Units::Normalized {
        return Err(Error::Config(
            "nft roundtrip expects a normalized signal dump".into(),
        ));
    }
    let signal = dump.clone().into_signal()?;
    let cs = scattering_to_spectrum(&forward_nft(&signal)?)?;
    let back = if first_order {
        inverse_nft(&cs, &signal.grid)?
    } else {
        inverse_nft_exact(&cs, &signal.grid)?
    };
    let err = relative_l2(&[&back.q1, &back.q2], &[&signal.q1, &signal.q2]);
    Ok((err, Dump::from_signal(&back)))
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            preset,
            out,
            threads,
        } => {
            let threads = threads.or_else(threads_from_env);
            match (config, preset) {
                (_, Some(name)) => {
                    run_preset(&name, &out.unwrap_or_else(|| PathBuf::from(&name)), threads)
                }
                (Some(path), None) => {
                    let c = ExperimentConfig::load(&path)?;
                    let result = run_one(&c, threads)?;
                    let out =
                        out.unwrap_or_else(|| PathBuf::from(format!("{}.jsonl", c.experiment_id)));
                    write_records(&out, &result.entries())?;
                    println!("wrote {}", out.display());
                    Ok(())
                }
                (None, None) => Err(Error::Config("run needs a config file or --preset".into())),
            }
        }
        Command::Validate { config } => {
            let c = ExperimentConfig::load(&config)?;
            let warnings = c.validate()?;
            print!("{}", c.resolved_table()?);
            for w in warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Plot { records, spec } => {
            let run = RunOutput::from_entries(read_records(&records)?);
            let (svg, csv) = emit_plot(&run, &PlotSpec::load(&spec)?)?;
            println!("wrote {} and {}", svg.display(), csv.display());
            Ok(())
        }
        Command::Nft {
            command:
                NftCommand::Roundtrip {
                    signal,
                    first_order,
                    out,
                },
        } => {
            let (err, back) = nft_roundtrip(&read_dump(&signal)?, first_order)?;
            println!("relative L2 error {err:.3e}");
            if let Some(o) = out {
                write_dump(&o, &back)?;
            }
            Ok(())
        }
    }
}
