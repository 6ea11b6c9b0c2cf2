//! Batch experiment runner. One experiment per invocation: load a config (or
//! name a catalog system to reproduce), run it, and emit a single JSON report
//! plus optional CSV time-series for external plotting.
//!
//! Exit codes: 0 witnessed/ok, 2 refuted-at-resolution, 3 inconclusive or
//! not-found, 1 error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nads_core::experiment::{
    repro, resolve_system, run, verify_report, ExperimentConfig, Outcome, Report,
};
use nads_core::properties::Evidence;
use nads_core::specification::SearchResult;
use nads_core::systems::orbit;

#[derive(Parser, Debug)]
#[command(
    name = "nads",
    about = "Property checks, specification-witness searches and report verification for non-autonomous discrete systems"
)]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Catalog system id; overrides the config's system.
    #[arg(long, value_name = "ID")]
    system: Option<String>,

    /// Seed override (mandatory part of every report).
    #[arg(long)]
    seed: Option<u64>,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Re-verify a previously written report (no searching).
    #[arg(long, value_name = "REPORT")]
    verify: Option<PathBuf>,

    /// Run a catalog entry's full expected-verdict table.
    #[arg(long, value_name = "ID")]
    repro: Option<String>,

    /// Worker threads (NADS_THREADS as fallback). Execution is currently
    /// sequential; the value is validated and echoed into the report.
    #[arg(long)]
    threads: Option<u32>,

    /// Write plot-ready CSV time-series (orbit traces, hit times) here.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,

    /// List catalog system ids and exit.
    #[arg(long)]
    list_systems: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn threads_from(cli: &Cli) -> Result<Option<u32>, String> {
    if let Some(t) = cli.threads {
        return Ok(Some(t));
    }
    match std::env::var("NADS_THREADS") {
        Ok(v) => v
            .parse::<u32>()
            .map(Some)
            .map_err(|_| format!("NADS_THREADS must be an integer, got {v:?}")),
        Err(_) => Ok(None),
    }
}

fn dispatch(cli: &Cli) -> Result<u8, String> {
    if cli.list_systems {
        for id in nads_core::catalog::list() {
            println!("{id}");
        }
        return Ok(0);
    }

    if let Some(report_path) = &cli.verify {
        let text = fs::read_to_string(report_path)
            .map_err(|e| format!("cannot read {}: {e}", report_path.display()))?;
        let report: Report = serde_json::from_str(&text).map_err(|e| format!("bad report: {e}"))?;
        let ok = verify_report(&report).map_err(|e| e.to_string())?;
        println!(
            "{}",
            if ok {
                "verified"
            } else {
                "verification FAILED"
            }
        );
        return Ok(if ok { 0 } else { 1 });
    }

    let report = if let Some(id) = &cli.repro {
        repro(id, cli.seed.unwrap_or(0)).map_err(|e| e.to_string())?
    } else if let Some(config_path) = &cli.config {
        let text = fs::read_to_string(config_path)
            .map_err(|e| format!("cannot read {}: {e}", config_path.display()))?;
        let mut config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| format!("config error: {e}"))?;
        if let Some(id) = &cli.system {
            config.system = nads_core::experiment::SystemRef::Catalog { id: id.clone() };
        }
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        config.threads = threads_from(cli)?;
        run(&config).map_err(|e| e.to_string())?
    } else {
        return Err("one of --config, --repro, --verify or --list-systems is required".into());
    };

    if let Some(csv_path) = &cli.csv {
        let rows = csv_rows(&report).map_err(|e| e.to_string())?;
        let mut text = String::from("series,step,value\n");
        for (series, step, value) in rows {
            text.push_str(&format!("{series},{step},{value}\n"));
        }
        fs::write(csv_path, text).map_err(|e| format!("cannot write csv: {e}"))?;
    }

    let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    match &cli.out {
        Some(path) => fs::write(path, json).map_err(|e| format!("cannot write report: {e}"))?,
        None => println!("{json}"),
    }
    let code: u8 = report.exit_code.clamp(0, 255) as u8;
    Ok(code)
}

/// Plot-ready rows: witness orbit traces and hit/separation times. Values are
/// compact JSON so circle angles, interval values and words all fit one column.
fn csv_rows(report: &Report) -> nads_core::Result<Vec<(String, u64, String)>> {
    let mut rows = Vec::new();
    let fam = resolve_system(&report.config.system)?;
    let witness_orbit = |tag: &str,
                         point: &nads_core::spaces::SpacePoint,
                         steps: u64,
                         rows: &mut Vec<(String, u64, String)>|
     -> nads_core::Result<()> {
        for (n, p) in orbit(&fam, point, steps)?.iter().enumerate() {
            let js = serde_json::to_string(p)
                .unwrap_or_default()
                .replace(',', ";");
            rows.push((
                tag.to_string(),
                n as u64,
                format!("\"{}\"", js.replace('"', "'")),
            ));
        }
        Ok(())
    };
    let verdict_rows = |verdict: &nads_core::properties::PropertyVerdict,
                        rows: &mut Vec<(String, u64, String)>| {
        match &verdict.evidence {
            Evidence::Hits { witnesses, .. } | Evidence::MixingThreshold { witnesses, .. } => {
                for w in witnesses {
                    rows.push(("hit".into(), w.time, "1".into()));
                }
            }
            Evidence::Sensitivity { witnesses, .. } => {
                for w in witnesses {
                    rows.push(("separation".into(), w.time, format!("{}", w.separation)));
                }
            }
            Evidence::MeasureMixing { base_hits, .. } => {
                for t in base_hits {
                    rows.push(("measure-hit".into(), *t, "1".into()));
                }
            }
            _ => {}
        }
    };
    match &report.outcome {
        Outcome::Witness {
            spec,
            search: SearchResult::Found { certificate },
        } => {
            witness_orbit(
                "witness-orbit",
                &certificate.witness,
                spec.last_time(),
                &mut rows,
            )?;
        }
        Outcome::Witness { .. } => {}
        Outcome::Verdict { verdict } => verdict_rows(verdict, &mut rows),
        Outcome::Repro { results, .. } => {
            for r in results {
                verdict_rows(&r.actual, &mut rows);
            }
        }
        _ => {}
    }
    Ok(rows)
}
