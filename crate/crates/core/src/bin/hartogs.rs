use std::path::PathBuf;

use clap::Parser;

/// Kähler geometry checks on Hartogs domains.
#[derive(Parser)]
#[command(name = "hartogs", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report path; overrides `output` in the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Suppress the summary line.
    #[arg(long)]
    quiet: bool,
}

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() {
                hartogs::cli::EXIT_CONFIG
            } else {
                0
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(hartogs::cli::execute(
        &args.config,
        args.output.as_deref(),
        args.quiet,
    ));
}
