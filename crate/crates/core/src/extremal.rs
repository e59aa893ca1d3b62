//! Extremality of `g_F`: the holomorphy defect of the `(1,0)` gradient of
//! the scalar curvature, and the two scalar conditions it reduces to.
//!
//! The residual matrix is obtained by differentiating the closed-form
//! Hamiltonian field numerically; the reduced conditions are evaluated in
//! closed form and serve as the symbolic cross-check.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::scalar_at;
use crate::error::{Error, Result};
use crate::geometry::{
    conjugate_gradient, conjugate_jacobian, inverse_metric_at, metric_at, DomainPoint, Local,
    RadialCoefficients, DEFAULT_STEP,
};
use crate::grid::{sample_interior, x_grid, GridSpec};
use crate::profile::Profile;
use crate::C64;

/// Closed-form `(d scal / dz̄_0, ..., d scal / dz̄_{n-1})`:
/// `G' z_0 A + z_0 G F'` for the first slot and `-G z_i` for the others.
pub fn scal_conjugate_gradient(point: &DomainPoint, profile: &Profile) -> Result<Vec<C64>> {
    scal_gradient_at(point.coords(), profile)
}

fn scal_gradient_at(z: &[C64], profile: &Profile) -> Result<Vec<C64>> {
    let loc = Local::at(z, profile)?;
    let rad = RadialCoefficients::from_jet(&loc.jet, loc.x)?;
    let mut out = Vec::with_capacity(z.len());
    out.push(z[0] * (rad.g1 * loc.a + rad.g * loc.jet[1]));
    out.extend(z[1..].iter().map(|&zi| -zi * rad.g));
    Ok(out)
}

/// Finite-difference Wirtinger gradient of the scalar curvature.
pub fn scal_gradient_numeric(
    point: &DomainPoint,
    profile: &Profile,
    step: f64,
) -> Result<Vec<C64>> {
    conjugate_gradient(|z| scalar_at(z, profile), point.coords(), step)
}

/// `X^a = sum_b g^{b ā} d scal / dz̄_b`.
pub fn hamiltonian_field(point: &DomainPoint, profile: &Profile) -> Result<Vec<C64>> {
    field_at(point.coords(), profile)
}

fn field_at(z: &[C64], profile: &Profile) -> Result<Vec<C64>> {
    let grad = scal_gradient_at(z, profile)?;
    let ginv = inverse_metric_at(z, profile)?;
    let m = ginv.as_matrix();
    Ok((0..z.len())
        .map(|a| (0..z.len()).map(|b| m[(b, a)] * grad[b]).sum())
        .collect())
}

/// The same field through a dense solve of `h^T X = grad`, bypassing the
/// closed-form inverse.
pub fn hamiltonian_field_solve(point: &DomainPoint, profile: &Profile) -> Result<Vec<C64>> {
    let z = point.coords();
    let h = metric_at(z, profile)?;
    let grad = DVector::from_vec(scal_gradient_at(z, profile)?);
    let x = h
        .as_matrix()
        .transpose()
        .lu()
        .solve(&grad)
        .ok_or_else(|| Error::NumericFailure("metric is singular".into()))?;
    Ok(x.iter().copied().collect())
}

/// `d X^a / dz̄_c` at a point. Vanishing entries certify extremality there.
#[derive(Clone, Debug)]
pub struct ExtremalResidual {
    /// Entry `(a, c)` is `d X^a / dz̄_c`.
    pub residual: DMatrix<C64>,
    pub max_abs: f64,
    pub point: DomainPoint,
}

pub fn extremal_residual(
    point: &DomainPoint,
    profile: &Profile,
    step: f64,
) -> Result<ExtremalResidual> {
    let residual = conjugate_jacobian(|z| field_at(z, profile), point.coords(), step)?;
    let max_abs = residual.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(ExtremalResidual {
        residual,
        max_abs,
        point: point.clone(),
    })
}

/// `r1 = (G F)'` and `r2 = (G F' x)'` at `x`.
///
/// Extremality forces both to vanish; `r1 = 0` gives `G = c/F`, after which
/// `r2 = c (x F'/F)'` forces `c = 0` for a Kähler profile.
pub fn reduced_conditions(profile: &Profile, x: f64) -> Result<(f64, f64)> {
    if x == 0.0 && profile.is_low_precision() {
        return Err(Error::Domain(
            "reduced conditions at x = 0 need a closed-form profile".into(),
        ));
    }
    let rad = RadialCoefficients::at(profile, x)?;
    reduced_conditions_with(profile, x, rad.g, rad.g1)
}

/// Reduced conditions for a caller-supplied `G(x)` and `G'(x)`.
pub fn reduced_conditions_with(profile: &Profile, x: f64, g: f64, g1: f64) -> Result<(f64, f64)> {
    let j = profile.jet(x)?;
    let (f, f1, f2) = (j[0], j[1], j[2]);
    let r1 = g1 * f + g * f1;
    let r2 = g1 * f1 * x + g * (f1 + f2 * x);
    Ok((r1, r2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExtremalVerdict {
    Extremal,
    NotExtremal,
}

impl ExtremalVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtremalVerdict::Extremal => "EXTREMAL",
            ExtremalVerdict::NotExtremal => "NOT_EXTREMAL",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExtremalOptions {
    pub step: f64,
    /// Grid-max residual at or below this passes.
    pub threshold: f64,
    /// Certificate points need `|z_0 z_1|` above this.
    pub certificate_min: f64,
    pub reduced_points: usize,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            threshold: 1e-5,
            certificate_min: 0.05,
            reduced_points: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReducedSample {
    pub x: f64,
    pub r1: f64,
    pub r2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalReport {
    pub profile: String,
    pub n: usize,
    pub grid: GridSpec,
    pub options: ExtremalOptions,
    pub max_residual: f64,
    pub argmax_point: DomainPoint,
    /// Largest residual among points with `|z_0 z_1| > certificate_min`.
    pub certificate_residual: f64,
    pub certificate_point: Option<DomainPoint>,
    pub certificate_points: usize,
    pub reduced: Vec<ReducedSample>,
    pub max_abs_r1: f64,
    pub max_abs_r2: f64,
    pub verdict: ExtremalVerdict,
}

/// Sweeps the extremal residual over an interior grid and the reduced
/// conditions over a radial grid.
pub fn extremal_test(
    profile: &Profile,
    n: usize,
    grid: &GridSpec,
    options: &ExtremalOptions,
) -> Result<ExtremalReport> {
    let points = sample_interior(profile, n, grid)?;
    let maxima: Vec<f64> = points
        .par_iter()
        .map(|p| extremal_residual(p, profile, options.step).map(|r| r.max_abs))
        .collect::<Result<_>>()?;

    let mut best = 0;
    let mut cert: Option<usize> = None;
    let mut cert_count = 0;
    for (i, &m) in maxima.iter().enumerate() {
        if m > maxima[best] {
            best = i;
        }
        let z = points[i].coords();
        if (z[0] * z[1]).norm() > options.certificate_min {
            cert_count += 1;
            if cert.is_none_or(|c| m > maxima[c]) {
                cert = Some(i);
            }
        }
    }

    let reduced: Vec<ReducedSample> = x_grid(profile, options.reduced_points, grid.x_cap)
        .into_iter()
        .map(|x| reduced_conditions(profile, x).map(|(r1, r2)| ReducedSample { x, r1, r2 }))
        .collect::<Result<_>>()?;
    let max_abs_r1 = reduced.iter().map(|s| s.r1.abs()).fold(0.0, f64::max);
    let max_abs_r2 = reduced.iter().map(|s| s.r2.abs()).fold(0.0, f64::max);

    let max_residual = maxima[best];
    let verdict = if max_residual <= options.threshold {
        ExtremalVerdict::Extremal
    } else {
        ExtremalVerdict::NotExtremal
    };
    Ok(ExtremalReport {
        profile: profile.label(),
        n,
        grid: *grid,
        options: *options,
        max_residual,
        argmax_point: points[best].clone(),
        certificate_residual: cert.map_or(0.0, |c| maxima[c]),
        certificate_point: cert.map(|c| points[c].clone()),
        certificate_points: cert_count,
        reduced,
        max_abs_r1,
        max_abs_r2,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[(f64, f64)], p: &Profile) -> DomainPoint {
        DomainPoint::new(coords.iter().map(|&(a, b)| C64::new(a, b)).collect(), p).unwrap()
    }

    #[test]
    fn linear_gradient_and_field_vanish() {
        let lin = Profile::linear(2.0, 0.5).unwrap();
        let p = pt(&[(0.4, 0.3), (0.2, -0.5), (0.1, 0.1)], &lin);
        assert!(scal_conjugate_gradient(&p, &lin)
            .unwrap()
            .iter()
            .all(|v| v.norm() == 0.0));
        assert!(hamiltonian_field(&p, &lin)
            .unwrap()
            .iter()
            .all(|v| v.norm() == 0.0));
        assert!(extremal_residual(&p, &lin, 1e-3).unwrap().max_abs <= 1e-6);
    }

    #[test]
    fn exponential_gradient_example() {
        let exp = Profile::exponential(1.0).unwrap();
        let p = pt(&[(0.5, 0.0), (0.3, 0.0)], &exp);
        let g = scal_conjugate_gradient(&p, &exp).unwrap();
        let expect = -2.0 * 0.25f64.exp() * 0.3;
        assert!((g[1].re - expect).abs() < 1e-12 && g[1].im.abs() < 1e-15);
        assert!((g[1].re + 0.770_415_25).abs() < 1e-7);
        let num = scal_gradient_numeric(&p, &exp, 1e-3).unwrap();
        for (a, b) in g.iter().zip(&num) {
            assert!((a - b).norm() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn field_vanishes_at_origin() {
        let exp = Profile::exponential(1.0).unwrap();
        for n in 2..=4 {
            let o = pt(&vec![(0.0, 0.0); n], &exp);
            assert!(hamiltonian_field(&o, &exp)
                .unwrap()
                .iter()
                .all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn field_matches_linear_solve() {
        let p = Profile::power(2.0).unwrap();
        let q = pt(&[(0.3, -0.2), (0.1, 0.4), (-0.2, 0.1)], &p);
        let a = hamiltonian_field(&q, &p).unwrap();
        let b = hamiltonian_field_solve(&q, &p).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() <= 1e-8 * (1.0 + v.norm()), "{u} vs {v}");
        }
    }

    #[test]
    fn exponential_residual_is_large() {
        let exp = Profile::exponential(1.0).unwrap();
        let p = pt(&[(0.7, 0.0), (0.4, 0.0)], &exp);
        let r = extremal_residual(&p, &exp, 1e-3).unwrap();
        assert!(r.max_abs > 0.01, "{}", r.max_abs);
    }

    #[test]
    fn reduced_conditions_examples() {
        let lin = Profile::hyperbolic();
        assert_eq!(reduced_conditions(&lin, 0.3).unwrap(), (0.0, 0.0));
        let exp = Profile::exponential(1.0).unwrap();
        for x in [0.0, 0.1, 1.0, 2.9] {
            let (r1, r2) = reduced_conditions(&exp, x).unwrap();
            assert!(r1.abs() < 1e-10, "r1={r1}");
            assert!((r2 + 2.0).abs() < 1e-8, "r2={r2}");
        }
    }

    #[test]
    fn synthetic_g_over_f() {
        let p = Profile::power(3.0).unwrap();
        let c = 1.7;
        for x in [0.1, 0.4, 0.8] {
            let j = p.jet(x).unwrap();
            let g = c / j[0];
            let g1 = -c * j[1] / (j[0] * j[0]);
            let (r1, r2) = reduced_conditions_with(&p, x, g, g1).unwrap();
            assert!(r1.abs() < 1e-12);
            let ind = p.kahler_indicator(x).unwrap();
            assert!((r2 - c * ind).abs() < 1e-10 * (1.0 + r2.abs()));
            assert!(r2 < 0.0);
        }
    }

    #[test]
    fn reduction_identities() {
        use crate::geometry::coefficient_bundle;
        for p in [
            Profile::exponential(1.0).unwrap(),
            Profile::power(2.0).unwrap(),
            Profile::exponential(0.5).unwrap().scaled(2.0).unwrap(),
        ] {
            for x0 in [0.2, 0.5, 0.8] {
                let q = pt(&[(x0, 0.1), (0.05, 0.0)], &p);
                let cb = coefficient_bundle(&q, &p).unwrap();
                let rad = RadialCoefficients::at(&p, q.x()).unwrap();
                let (r1, r2) = reduced_conditions(&p, q.x()).unwrap();
                let lhs1 = cb.q00 * rad.g1 + rad.g * cb.q0a;
                let lhs2 = -rad.g1 * q.x() * cb.q0a + rad.g * cb.raa;
                assert!((lhs1 + r1 / cb.b).abs() <= 1e-10 * (1.0 + lhs1.abs()));
                assert!((lhs2 - r2 / cb.b).abs() <= 1e-10 * (1.0 + lhs2.abs()));
            }
        }
    }

    #[test]
    fn table_profile_rejects_origin() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
        let fs: Vec<f64> = xs.iter().map(|x| 1.0 - x * 0.5).collect();
        let t = Profile::table(crate::profile::TableProfile::new(xs, fs).unwrap());
        assert!(matches!(reduced_conditions(&t, 0.0), Err(Error::Domain(_))));
    }
}
