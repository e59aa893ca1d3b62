//! Generalized scalar curvatures from the closed form and from
//! `det(I + t h^-1 Ric)`.

use hartogs::curvature::{generalized_scalars_closed, generalized_scalars_poly};
use hartogs::geometry::DomainPoint;
use hartogs::profile::Profile;
use hartogs::C64;

fn show(label: &str, profile: &Profile, coords: Vec<C64>) -> hartogs::error::Result<()> {
    let z = DomainPoint::new(coords, profile)?;
    let closed = generalized_scalars_closed(&z, profile)?;
    let poly = generalized_scalars_poly(&z, profile)?;
    println!("{label}");
    for (k, (c, p)) in closed.iter().zip(&poly).enumerate() {
        println!(
            "  rho_{k}: closed {c:>14.9}  poly {p:>14.9}  diff {:.1e}",
            (c - p).abs()
        );
    }
    Ok(())
}

fn main() -> hartogs::error::Result<()> {
    let c = C64::new;
    // (1 - 4t)^3 = 1 - 12t + 48t^2 - 64t^3
    show(
        "ball, n = 3",
        &Profile::hyperbolic(),
        vec![c(0.2, 0.1), c(0.3, 0.0), c(0.0, -0.4)],
    )?;
    show(
        "exp, n = 4",
        &Profile::exponential(1.0)?,
        vec![c(0.5, 0.3), c(0.1, 0.2), c(-0.3, 0.1), c(0.0, 0.2)],
    )?;
    show(
        "(1-x)^2, n = 2",
        &Profile::power(2.0)?,
        vec![c(0.4, 0.0), c(0.2, 0.3)],
    )?;
    Ok(())
}
