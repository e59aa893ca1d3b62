//! A profile given as `(x, F)` samples.

use hartogs::classification::{classify, ClassifyOptions};
use hartogs::grid::GridSpec;
use hartogs::profile::{Profile, TableProfile};

fn main() -> hartogs::error::Result<()> {
    let mut csv = String::from("# F = exp(-x) on a uniform grid\nx,F\n");
    for i in 0..=60 {
        let x = i as f64 * 0.05;
        csv.push_str(&format!("{x},{}\n", (-x).exp()));
    }
    let table = Profile::table(TableProfile::from_csv_reader(csv.as_bytes())?);
    let exact = Profile::exponential(1.0)?;

    for x in [0.5, 1.25, 2.0] {
        println!(
            "x = {x}: indicator {:.8} (exact {:.8}), derivative consistency {:.2e}",
            table.kahler_indicator(x)?,
            exact.kahler_indicator(x)?,
            table.derivative_consistency(x, 1e-3)?
        );
    }
    println!("low precision: {}", table.is_low_precision());

    let grid = GridSpec {
        x_cap: 2.5,
        ..GridSpec::with_points(60)
    };
    let r = classify(&table, 2, &grid, &ClassifyOptions::default())?;
    println!(
        "{}: max|L| = {:.4} -> {}",
        r.profile,
        r.max_abs_l,
        r.verdict.as_str()
    );
    Ok(())
}
