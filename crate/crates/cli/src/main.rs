use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sigclass::synthgen::Group;
use sigclass_cli::{
    cmd_eval, cmd_heatmap, cmd_rows, cmd_synth, cmd_train, CliResult, PipelineConfig, CHECKPOINT_FILE,
    ROWS_FILE,
};

#[derive(Parser, Debug)]
#[command(name = "sigclass", version, about = "Multi-sensor signature classification pipeline")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Flat key-value config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory shared by all stages.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Target group: Group1 (7 targets) or Group2 (4 targets).
    #[arg(long, global = true)]
    group: Option<Group>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render synthetic recordings for every target of the group.
    Synth {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        sample_rate: Option<u32>,
    },
    /// Extract blocks, compute spectra and write fused 301-column rows.
    Rows {
        /// Total row target.
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        blocks: Option<usize>,
    },
    /// Write a PGM and CSV heat map for one target.
    Heatmap { label: String },
    /// Select frequency bins, train the network and score the test split.
    Train {
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        learn_rate: Option<f64>,
    },
    /// Score a checkpoint on a rows file.
    Eval {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        rows: Option<PathBuf>,
    },
}

fn resolve(cli: &Cli) -> CliResult<PipelineConfig> {
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &g.out {
        cfg.out = out.clone();
    }
    if let Some(group) = g.group {
        cfg.group = group;
    }
    match &cli.command {
        Command::Synth {
            trials,
            duration,
            sample_rate,
        } => {
            cfg.trials = trials.unwrap_or(cfg.trials);
            cfg.duration_s = duration.unwrap_or(cfg.duration_s);
            cfg.sample_rate_hz = sample_rate.unwrap_or(cfg.sample_rate_hz);
        }
        Command::Rows { rows, blocks } => {
            cfg.rows = rows.unwrap_or(cfg.rows);
            cfg.blocks_per_recording = blocks.unwrap_or(cfg.blocks_per_recording);
        }
        Command::Train {
            runs,
            threshold,
            learn_rate,
        } => {
            cfg.runs = runs.unwrap_or(cfg.runs);
            cfg.threshold = threshold.unwrap_or(cfg.threshold);
            cfg.learn_rate = learn_rate.unwrap_or(cfg.learn_rate);
        }
        Command::Heatmap { .. } | Command::Eval { .. } => {}
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = resolve(&cli)?;
    match &cli.command {
        Command::Synth { .. } => {
            let m = cmd_synth(&cfg)?;
            println!("wrote {} recordings to {}", m.recordings.len(), cfg.out.display());
        }
        Command::Rows { .. } => {
            let rows = cmd_rows(&cfg)?;
            println!("wrote {} rows to {}", rows.len(), cfg.out.join(ROWS_FILE).display());
        }
        Command::Heatmap { label } => {
            let map = cmd_heatmap(&cfg, label)?;
            println!("heat map {label}: {} rows", map.rows.len());
        }
        Command::Train { .. } => {
            let out = cmd_train(&cfg)?;
            let last = out.runlog().last().expect("at least one run");
            println!("mask size: {}", out.mask.len());
            println!(
                "runs: {}  final train loss: {:.5}  train accuracy: {:.4}  test accuracy: {:.4}",
                out.runlog().records.len(),
                last.train_loss,
                last.train_acc,
                out.test.accuracy
            );
            println!("test element agreement: {:.4}", out.test.element_accuracy);
            print!("{}", out.test.confusion);
        }
        Command::Eval { checkpoint, rows } => {
            let ck = checkpoint.clone().unwrap_or_else(|| cfg.out.join(CHECKPOINT_FILE));
            let rows = rows.clone().unwrap_or_else(|| cfg.out.join(ROWS_FILE));
            let ev = cmd_eval(&cfg, &ck, &rows)?;
            println!("accuracy: {:.4}  element agreement: {:.4}", ev.accuracy, ev.element_accuracy);
            print!("{}", ev.confusion);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
