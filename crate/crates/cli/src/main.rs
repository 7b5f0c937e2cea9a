use bft_cli::{exit_code, render_report, run_config};
use clap::Parser;
use std::path::PathBuf;

/// Exact free-Boolean-group computations, batch style: one JSON config in,
/// one JSON report out.
#[derive(Parser)]
#[command(name = "bft", version, about)]
struct Args {
    /// Path to the JSON config document.
    #[arg(long)]
    config: PathBuf,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Overrides bounds.search in the config.
    #[arg(long)]
    bound: Option<u64>,

    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Suppress the report on stdout (still written to --out).
    #[arg(long)]
    quiet: bool,
}

fn main() {
    let args = Args::parse();
    let mut text = match std::fs::read_to_string(&args.config) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("bft: cannot read {}: {e}", args.config.display());
            std::process::exit(exit_code::USAGE);
        }
    };
    // flag overrides are applied to the document so the report echo stays
    // faithful to what actually ran
    if args.bound.is_some() || args.seed.is_some() {
        match serde_json::from_str::<serde_json::Value>(&text) {
            Ok(mut doc) => {
                if let Some(bound) = args.bound {
                    doc["bounds"]["search"] = serde_json::json!(bound);
                }
                if let Some(seed) = args.seed {
                    doc["seed"] = serde_json::json!(seed);
                }
                text = doc.to_string();
            }
            Err(e) => {
                eprintln!("bft: config is not valid JSON: {e}");
                std::process::exit(exit_code::USAGE);
            }
        }
    }

    match run_config(&text) {
        Ok(outcome) => {
            let rendered = render_report(&outcome.report);
            if let Some(out) = &args.out {
                if let Err(e) = std::fs::write(out, &rendered) {
                    eprintln!("bft: cannot write {}: {e}", out.display());
                    std::process::exit(exit_code::USAGE);
                }
            }
            if !args.quiet {
                print!("{rendered}");
            }
            std::process::exit(outcome.code);
        }
        Err(e) => {
            eprintln!("bft: {e}");
            std::process::exit(e.code);
        }
    }
}
