//! Runs a config through the same pipeline as the `hartogs` binary.
//!
//! `cargo run --example full_suite -- examples/configs/classify.toml`

use hartogs::cli::{run, RunConfig};

fn main() -> hartogs::error::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/configs/full_suite.toml"
        )
        .into()
    });
    let cfg = RunConfig::load(&path)?;
    let report = run(&cfg)?;
    println!("{}", report.to_json()?);
    println!("verdict {} (expected {})", report.verdict, report.expected);
    Ok(())
}
