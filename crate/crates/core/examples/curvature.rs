//! Ricci and scalar curvature with their numerical cross-checks.

use hartogs::curvature::{
    ricci_closed_form, ricci_numeric, scalar_by_contraction, scalar_curvature, CurvatureRecord,
};
use hartogs::geometry::{DomainPoint, DEFAULT_STEP};
use hartogs::profile::Profile;
use hartogs::C64;

fn main() -> hartogs::error::Result<()> {
    let exp = Profile::exponential(1.0)?;
    let z = DomainPoint::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &exp)?;
    println!("exp, z = (1, 0): scal = {}", scalar_curvature(&z, &exp)?);

    let w = DomainPoint::new(vec![C64::new(0.4, 0.3), C64::new(0.2, 0.5)], &exp)?;
    let closed = ricci_closed_form(&w, &exp)?;
    let numeric = ricci_numeric(&w, &exp, DEFAULT_STEP)?;
    println!(
        "max |Ric - (-d dbar log det h)| = {:.3e}",
        closed.max_abs_diff(&numeric)
    );
    println!(
        "scal {:.12} vs trace(h^-1 Ric) {:.12}",
        scalar_curvature(&w, &exp)?,
        scalar_by_contraction(&w, &exp)?
    );

    // The ball is Einstein with scal = -n(n+1).
    let ball = Profile::hyperbolic();
    let b = DomainPoint::new(
        vec![C64::new(0.3, 0.0), C64::new(0.1, 0.4), C64::new(-0.2, 0.1)],
        &ball,
    )?;
    println!("ball, n = 3: scal = {}", scalar_curvature(&b, &ball)?);

    let record = CurvatureRecord::at(&w, &exp)?;
    println!("{}", serde_json::to_string(&record)?);
    Ok(())
}
