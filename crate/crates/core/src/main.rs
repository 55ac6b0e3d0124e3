use clap::Parser;
use ingham_core::cli::{run, ExperimentConfig};

fn main() {
    let config = ExperimentConfig::parse();
    if let Err(e) = run(&config) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
