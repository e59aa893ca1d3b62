use hartogs::curvature::{scalar_curvature, CurvatureRecord};
use hartogs::geometry::{metric_closed_form, potential, DomainPoint};
use hartogs::profile::Profile;
use hartogs::pseudoconvexity::{boundary_point, restricted_levi};
use hartogs::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn profile(i: usize) -> Profile {
    match i {
        0 => Profile::hyperbolic(),
        1 => Profile::linear(2.0, 0.5).unwrap(),
        2 => Profile::exponential(1.0).unwrap(),
        _ => Profile::power(2.0).unwrap(),
    }
}

/// Interior point of `D_F` for `n = 3` from bounded parameters.
fn interior(p: &Profile, x_frac: f64, th: f64, r_frac: f64, a: f64, b: f64, c: f64) -> DomainPoint {
    let x_hi = p.x0().capped(3.0);
    let x = 0.9 * x_frac * x_hi;
    let radius = (r_frac * 0.9 * p.value(x)).sqrt();
    let z0 = C64::from_polar(x.sqrt(), th);
    let z1 = C64::from_polar(radius * a.cos(), b);
    let z2 = C64::from_polar(radius * a.sin(), c);
    DomainPoint::new(vec![z0, z1, z2], p).unwrap()
}

fn unitary(a: f64, b: f64, c: f64) -> DMatrix<C64> {
    let (s, co) = a.sin_cos();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::from_polar(co, b),
            -C64::from_polar(s, c),
            C64::from_polar(s, -c),
            C64::from_polar(co, -b),
        ],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_invariance(
        k in 0usize..4, x in 0.0..1.0f64, th in 0.0..6.3f64, r in 0.0..1.0f64,
        a in 0.0..1.6f64, b in 0.0..6.3f64, c in 0.0..6.3f64,
        phase in 0.0..6.3f64, ua in 0.0..3.2f64, ub in 0.0..6.3f64, uc in 0.0..6.3f64,
    ) {
        let p = profile(k);
        let pt = interior(&p, x, th, r, a, b, c);
        let mut d = DMatrix::<C64>::zeros(3, 3);
        d[(0, 0)] = C64::from_polar(1.0, phase);
        d.view_mut((1, 1), (2, 2)).copy_from(&unitary(ua, ub, uc));
        let z = DMatrix::from_column_slice(3, 1, pt.coords());
        let moved = DomainPoint::new((&d * z).iter().copied().collect(), &p).unwrap();

        let phi = potential(&pt, &p).unwrap();
        prop_assert!((phi - potential(&moved, &p).unwrap()).abs() <= 1e-12 * (1.0 + phi.abs()));

        let h = metric_closed_form(&pt, &p).unwrap();
        let h_moved = metric_closed_form(&moved, &p).unwrap();
        let back = d.transpose() * h_moved.as_matrix() * d.map(|v| v.conj());
        let err = (h.as_matrix() - back).iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * (1.0 + h.max_abs()), "{err}");
    }

    #[test]
    fn hermitian_and_record_shape(k in 0usize..4, x in 0.0..1.0f64, r in 0.0..1.0f64, a in 0.0..1.6f64) {
        let p = profile(k);
        let pt = interior(&p, x, 0.3, r, a, 1.0, -0.5);
        let h = metric_closed_form(&pt, &p).unwrap();
        let m = h.as_matrix();
        prop_assert_eq!(m.clone(), m.adjoint());
        prop_assert!(h.is_positive_definite());
        let rec = CurvatureRecord::at(&pt, &p).unwrap();
        prop_assert_eq!(rec.rho.len(), 3);
        prop_assert_eq!(rec.rho[0], rec.scal);
    }

    #[test]
    fn scal_depends_on_radii_only(k in 0usize..4, x in 0.0..1.0f64, r in 0.0..1.0f64, a in 0.0..1.6f64, th in 0.0..6.3f64) {
        let p = profile(k);
        let s1 = scalar_curvature(&interior(&p, x, 0.0, r, a, 0.0, 0.0), &p).unwrap();
        let s2 = scalar_curvature(&interior(&p, x, th, r, 1.6 - a, th, -th), &p).unwrap();
        prop_assert!((s1 - s2).abs() <= 1e-12 * (1.0 + s1.abs()));
    }

    #[test]
    fn indicator_is_scale_invariant(k in 0usize..4, x in 0.0..0.9f64, lambda in 0.01..100.0f64) {
        let p = profile(k);
        let q = p.scaled(lambda).unwrap();
        let x = x * p.x0().capped(3.0);
        let (a, b) = (p.kahler_indicator(x).unwrap(), q.kahler_indicator(x).unwrap());
        prop_assert!((a - b).abs() <= 1e-14 * (1.0 + a.abs()));
    }

    #[test]
    fn restricted_levi_bounded_below_for_admissible_profiles(
        k in 0usize..4, x in 0.001..0.9f64, th in 0.0..6.3f64,
        d in prop::array::uniform4(-1.0..1.0f64), y in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let p = profile(k);
        let x = x * p.x0().capped(3.0);
        let dir = [C64::new(d[0], d[1]), C64::new(d[2], d[3])];
        prop_assume!(dir.iter().map(|v| v.norm_sqr()).sum::<f64>() > 1e-6);
        let bp = boundary_point(&p, C64::from_polar(x.sqrt(), th), &dir).unwrap();
        let y = [C64::new(y[0], y[1]), C64::new(y[2], y[3])];
        let levi = restricted_levi(&bp, &y, &p).unwrap().regular().unwrap();
        let z = &bp.coords()[1..];
        let z2: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        let y2: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        let proj: C64 = z.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
        // Kähler profiles satisfy (F' + F'' x) F < F'^2 x, so the form dominates
        // the component of Y orthogonal to the fiber point.
        let floor = y2 - proj.norm_sqr() / z2;
        prop_assert!(levi >= floor - 1e-10 * (1.0 + y2), "{levi} < {floor}");
    }
}
