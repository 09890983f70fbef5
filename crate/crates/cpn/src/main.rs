use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cpn::commands::{self, LabelgenOptions, ProposeOptions, Report, DEFAULT_K_LIST};
use cpn::synth::SynthOptions;
use cpn::{CpnError, RunConfig};

#[derive(Parser)]
#[command(name = "cpn", version, about = "Semantic and geometric text proposals: labels, proposals, evaluation")]
struct Cli {
    /// key = value configuration file; omitted keys keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for image-level parallelism (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Log progress (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build S.pfm, L.pgm, D.pfm and meta.json per annotated image.
    Labelgen {
        #[arg(long)]
        ann: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Image size as WIDTHxHEIGHT; defaults to the annotation extent.
        #[arg(long)]
        size: Option<String>,
    },
    /// Semantic proposals from S/D maps, plus geometric ones from regression outputs.
    Propose {
        #[arg(long)]
        maps: PathBuf,
        /// Directory of <image_id>.reg files, or one file for a single image.
        #[arg(long)]
        reg: Option<PathBuf>,
        /// Output JSON file.
        #[arg(long)]
        out: PathBuf,
        /// Apply rotated NMS across both sources after concatenation.
        #[arg(long)]
        merge_nms: bool,
    },
    /// Recall curves, complementarity and P/R/F of a proposals file.
    Eval {
        #[arg(long)]
        proposals: PathBuf,
        #[arg(long)]
        ann: PathBuf,
        /// Output directory for recall.csv and summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Recall, precision and F at IoU 0.5 for several balanced_k values.
    Sweep {
        #[arg(long)]
        maps: PathBuf,
        #[arg(long)]
        reg: PathBuf,
        #[arg(long)]
        ann: PathBuf,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated k values.
        #[arg(long)]
        k_list: Option<String>,
        #[arg(long)]
        merge_nms: bool,
    },
    /// Write a synthetic corpus: annotations, maps, regression files, config.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 12)]
        images: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "256x256")]
        size: String,
    },
    /// Check analytic loss gradients against finite differences.
    Losscheck {
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
    /// Write seeded fusion weights (CPNW0001 format).
    GenWeights {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 256)]
        in_channels: usize,
    },
    /// Run the fusion block on seeded random features.
    Ifa {
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        in_channels: usize,
        #[arg(long, default_value = "16x16")]
        size: String,
    },
}

fn run(cli: Cli) -> cpn::Result<Report> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let threads = cli.threads;
    match cli.command {
        Command::Labelgen { ann, out, size } => {
            let size = size.as_deref().map(commands::parse_size).transpose()?;
            commands::cmd_labelgen(&cfg, &LabelgenOptions { ann, out, size, threads })
        }
        Command::Propose { maps, reg, out, merge_nms } => {
            commands::cmd_propose(&cfg, &ProposeOptions { maps, reg, merge_nms, threads }, &out)
        }
        Command::Eval { proposals, ann, out } => commands::cmd_eval(&proposals, &ann, &out, threads),
        Command::Sweep { maps, reg, ann, out, k_list, merge_nms } => {
            let ks = match k_list {
                Some(s) => commands::parse_k_list(&s)?,
                None => DEFAULT_K_LIST.to_vec(),
            };
            commands::cmd_sweep(&cfg, &ProposeOptions { maps, reg: Some(reg), merge_nms, threads }, &ann, &ks, &out)
        }
        Command::Synth { out, images, seed, size } => {
            let (width, height) = commands::parse_size(&size)?;
            commands::cmd_synth(&out, &SynthOptions { images, width, height, seed })
        }
        Command::Losscheck { cases } => commands::cmd_losscheck(&cfg, cases),
        Command::GenWeights { out, in_channels } => commands::cmd_gen_weights(&cfg, in_channels, &out),
        Command::Ifa { weights, in_channels, size } => {
            commands::cmd_ifa(&cfg, weights.as_deref(), in_channels, commands::parse_size(&size)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(r) if r.ok() => ExitCode::SUCCESS,
        Ok(r) => {
            eprintln!("{} failure(s)", r.failures.len());
            ExitCode::from(1)
        }
        Err(e @ (CpnError::Usage(_) | CpnError::Config { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
