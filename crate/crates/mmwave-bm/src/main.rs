//! Thin CLI over the simulation library: dataset generation, classifier
//! training, overhead sweeps, tracking runs, and scenario validation.

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

use mmwave_bm::config::AppConfig;
use mmwave_bm::engine::{
    overhead_sweep, tracking_sim, train_classifier, validate_zone_structure,
};
use mmwave_bm::error::EngineError;
use mmwave_bm::learning::{load_model, save_model, MlpModel};
use mmwave_bm::report::{emit_report, SimReport};
use mmwave_bm::scenario::{build_fingerprint_dataset, write_fingerprint_csv};

#[derive(Parser)]
#[command(name = "mmwave-bm", about = "Beam-management simulator for IRS-assisted mmWave networks", version)]
struct Cli {
    /// TOML configuration file (defaults to the built-in study case).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configured one.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the fingerprint dataset (train/holdout CSVs).
    Fingerprint,
    /// Train the access-point classifier and save it as model.json.
    Train,
    /// Run initial-access overhead sweeps over the configured protocols.
    OverheadSweep {
        /// Pretrained model file; trains in-process when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Run the slot-by-slot tracking simulation.
    Track {
        /// Pretrained model file; trains in-process when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Validate the scenario's coverage-zone structure.
    Validate,
}

fn load_config(cli: &Cli) -> Result<AppConfig, EngineError> {
    let mut cfg = match &cli.config {
        Some(path) => AppConfig::load(path)?,
        None => AppConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn classifier(cfg: &AppConfig, model_path: &Option<PathBuf>) -> Result<MlpModel, EngineError> {
    match model_path {
        Some(path) => load_model(path).map_err(EngineError::Learning),
        None => {
            let s = cfg.scenario()?;
            let (model, acc) = train_classifier(
                &s,
                &cfg.link(),
                &cfg.grid_spec(),
                &cfg.train.hidden,
                &cfg.train_config(),
            )?;
            eprintln!("note: trained classifier in-process (holdout accuracy {acc:.4})");
            Ok(model)
        }
    }
}

fn write_records(
    records: &[mmwave_bm::scenario::FingerprintRecord],
    path: &Path,
) -> Result<(), EngineError> {
    let mut f = std::fs::File::create(path).map_err(|e| EngineError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    write_fingerprint_csv(records, &mut f).map_err(|e| EngineError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn ensure_out(dir: &Path) -> Result<(), EngineError> {
    std::fs::create_dir_all(dir).map_err(|e| EngineError::Io {
        path: dir.display().to_string(),
        source: e,
    })
}

fn run(cli: &Cli) -> Result<(), EngineError> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Fingerprint => {
            let s = cfg.scenario()?;
            let (train, holdout) = build_fingerprint_dataset(&s, &cfg.link(), &cfg.grid_spec())?;
            ensure_out(&cli.out)?;
            write_records(&train, &cli.out.join("fingerprint_train.csv"))?;
            write_records(&holdout, &cli.out.join("fingerprint_holdout.csv"))?;
            println!(
                "fingerprint: train={} holdout={} out={}",
                train.len(),
                holdout.len(),
                cli.out.display()
            );
        }
        Command::Train => {
            let s = cfg.scenario()?;
            let (model, acc) = train_classifier(
                &s,
                &cfg.link(),
                &cfg.grid_spec(),
                &cfg.train.hidden,
                &cfg.train_config(),
            )?;
            ensure_out(&cli.out)?;
            let path = cli.out.join("model.json");
            save_model(&model, &path).map_err(EngineError::Learning)?;
            println!("train: holdout_accuracy={acc:.6} model={}", path.display());
        }
        Command::OverheadSweep { model } => {
            let s = cfg.scenario()?;
            let protocols = cfg.protocols()?;
            let needs_model = protocols.contains(&mmwave_bm::ProtocolKind::Ml);
            let trained = if needs_model {
                Some(classifier(&cfg, model)?)
            } else {
                None
            };
            let rows = overhead_sweep(
                &s,
                &cfg.link(),
                &cfg.frame(),
                trained
                    .as_ref()
                    .map(|m| m as &dyn mmwave_bm::AccessPredictor),
                &protocols,
                &cfg.sweep.user_counts,
                cfg.seed,
            )?;
            let report = SimReport {
                config_echo: cfg.echo(),
                seed: cfg.seed,
                slot_us: cfg.frame().slot_us,
                overhead: rows,
                ..SimReport::default()
            };
            emit_report(&report, &cli.out)?;
            println!("overhead-sweep: {} rows out={}", report.overhead.len(), cli.out.display());
        }
        Command::Track { model } => {
            let s = cfg.scenario()?;
            let trained = classifier(&cfg, model)?;
            let spec = cfg.tracking_spec()?;
            let mut report = tracking_sim(&s, &cfg.link(), &cfg.frame(), &trained, &spec)?;
            report.config_echo = cfg.echo();
            report.seed = cfg.seed;
            emit_report(&report, &cli.out)?;
            let aware = &report.summary["mobility_aware"];
            println!(
                "track: slots={} handovers={} mean_se[mobility_aware]={:.4} out={}",
                report.total_slots,
                aware.handover_count,
                aware.mean_se,
                cli.out.display()
            );
        }
        Command::Validate => {
            let s = cfg.scenario()?;
            validate_zone_structure(&s, &cfg.link())?;
            println!(
                "validate: ok bs_elements={} irss={} obstacles={}",
                s.bs.array_elements,
                s.irss.len(),
                s.obstacles.len()
            );
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
