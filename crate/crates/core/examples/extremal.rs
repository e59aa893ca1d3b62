//! The extremal-metric residual and the two reduced radial conditions.

use hartogs::extremal::{
    extremal_residual, extremal_test, hamiltonian_field, reduced_conditions, ExtremalOptions,
};
use hartogs::geometry::{DomainPoint, DEFAULT_STEP};
use hartogs::grid::GridSpec;
use hartogs::profile::Profile;
use hartogs::C64;

fn main() -> hartogs::error::Result<()> {
    let exp = Profile::exponential(1.0)?;
    let z = DomainPoint::new(vec![C64::new(0.7, 0.0), C64::new(0.4, 0.0)], &exp)?;
    println!("exp: X at (0.7, 0.4) = {:?}", hamiltonian_field(&z, &exp)?);
    let res = extremal_residual(&z, &exp, DEFAULT_STEP)?;
    println!("exp: max |dX/dzbar| at (0.7, 0.4) = {:.6}", res.max_abs);

    for x in [0.5, 1.0, 2.0] {
        let (r1, r2) = reduced_conditions(&exp, x)?;
        println!("exp: x = {x}: r1 = {r1:.2e}, r2 = {r2:.12}");
    }

    let grid = GridSpec::with_points(100);
    for profile in [Profile::hyperbolic(), exp, Profile::power(2.0)?] {
        let r = extremal_test(&profile, 2, &grid, &ExtremalOptions::default())?;
        println!(
            "{:<22} max residual {:.3e}  certificate {:.3e}  {}",
            r.profile,
            r.max_residual,
            r.certificate_residual,
            r.verdict.as_str()
        );
    }
    Ok(())
}
