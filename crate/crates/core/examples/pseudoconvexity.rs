//! Levi form on the boundary and the sign check against `(x F'/F)'`.

use hartogs::profile::Profile;
use hartogs::pseudoconvexity::{
    boundary_point, equivalence_check, levi_form, restricted_levi, sign_changing_profile,
    tangent_vector,
};
use hartogs::C64;

fn main() -> hartogs::error::Result<()> {
    let c = C64::new;
    let exp = Profile::exponential(1.0)?;
    let bp = boundary_point(&exp, c(0.8, 0.3), &[c(1.0, 0.0), c(0.0, 1.0)])?;
    let y = [c(0.2, -0.1), c(0.5, 0.4)];
    if let Some(x) = tangent_vector(&bp, &y, &exp)?.regular() {
        println!("tangency pairing: {:.1e}", bp.tangency_pairing(&x).norm());
        println!("Levi form on X: {:.12}", levi_form(&bp, &x, &exp)?);
    }
    if let Some(v) = restricted_levi(&bp, &y, &exp)?.regular() {
        println!("restricted Levi form on Y: {v:.12}");
    }

    for profile in [Profile::hyperbolic(), exp, sign_changing_profile()] {
        let r = equivalence_check(&profile, 500, 1)?;
        println!(
            "{:<20} min Levi {:>10.4} at x = {:.3}  max indicator {:>8.4}  {}",
            r.profile,
            r.min_levi,
            r.argmin_x,
            r.max_indicator,
            r.verdict.as_str()
        );
    }
    Ok(())
}
