//! Which profiles give the complex hyperbolic metric.

use hartogs::classification::{classify, pullback_check, ClassifyOptions, HyperbolicMap};
use hartogs::grid::GridSpec;
use hartogs::profile::Profile;
use hartogs::C64;

fn main() -> hartogs::error::Result<()> {
    let map = HyperbolicMap::new(2.0, 0.5)?;
    let z = [C64::new(1.0, 0.5), C64::new(0.3, -0.2)];
    println!("phi(z) = {:?}", map.apply(&z));

    let grid = GridSpec::default();
    let pb = pullback_check(2.0, 0.5, 3, &grid, 1e-10)?;
    println!(
        "pullback error for F = 2 - x/2, n = 3: {:.3e}",
        pb.max_error
    );

    let opts = ClassifyOptions::default();
    let profiles = [
        Profile::hyperbolic(),
        Profile::linear(2.0, 0.5)?,
        Profile::exponential(1.0)?,
        Profile::power(2.0)?,
    ];
    for p in &profiles {
        let r = classify(p, 2, &grid, &opts)?;
        println!(
            "{:<22} max|L| {:>12.4e}  rho spread {:?}  {}",
            r.profile,
            r.max_abs_l,
            r.rho_spread
                .iter()
                .map(|s| format!("{s:.2e}"))
                .collect::<Vec<_>>(),
            r.verdict.as_str()
        );
    }
    Ok(())
}
