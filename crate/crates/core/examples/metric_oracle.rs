//! Closed-form metric, determinant and inverse against brute force.

use hartogs::geometry::{
    det_closed_form, inverse_metric_closed_form, metric_closed_form, metric_numeric,
    principal_minor, DomainPoint, HermitianMatrix, DEFAULT_STEP,
};
use hartogs::profile::Profile;
use hartogs::C64;

fn main() -> hartogs::error::Result<()> {
    let profile = Profile::exponential(1.0)?;
    let z = DomainPoint::new(
        vec![C64::new(0.6, 0.2), C64::new(0.3, -0.1), C64::new(0.0, 0.25)],
        &profile,
    )?;

    let h = metric_closed_form(&z, &profile)?;
    let num = metric_numeric(&z, &profile, DEFAULT_STEP)?;
    println!("max |h - Hess(-log A)| = {:.3e}", h.max_abs_diff(&num));

    let det = det_closed_form(&z, &profile)?;
    println!("det h: closed {det:.12}, LU {:.12}", h.det());

    let inv = inverse_metric_closed_form(&z, &profile)?;
    let id = HermitianMatrix::from_matrix(h.as_matrix() * inv.as_matrix());
    println!(
        "max |h h^-1 - I| = {:.3e}",
        id.max_abs_diff(&HermitianMatrix::identity(3))
    );

    for alpha in 1..3 {
        println!(
            "minor of A^2 h from index {alpha}: {:.6}",
            principal_minor(&z, &profile, alpha)?
        );
    }
    println!("leading minors of h: {:?}", h.leading_principal_minors());
    println!(
        "kahler indicator at |z0|^2: {}",
        profile.kahler_indicator(z.x())?
    );
    Ok(())
}
