//! Ricci, scalar and generalized scalar curvatures of `(D_F, g_F)`.
//!
//! Every closed form has an independent numerical route:
//! `Ric = -d dbar log det h` by finite differences, `scal` by the trace
//! `sum g^{b ā} Ric_{a b̄}`, and the `rho_k` by interpolating
//! `t -> det(I + t h^{-1} Ric)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    self, inverse_metric_at, metric_at, wirtinger_hessian, DomainPoint, HermitianMatrix, Local,
    RadialCoefficients,
};
use crate::profile::Profile;
use crate::C64;

/// `Ric = -(n+1) h - L E_00`.
pub fn ricci_closed_form(point: &DomainPoint, profile: &Profile) -> Result<HermitianMatrix> {
    ricci_at(point.coords(), profile)
}

pub(crate) fn ricci_at(z: &[C64], profile: &Profile) -> Result<HermitianMatrix> {
    let loc = Local::at(z, profile)?;
    let rad = RadialCoefficients::from_jet(&loc.jet, loc.x)?;
    let h = metric_at(z, profile)?;
    let mut m = h.scale(-((z.len() + 1) as f64)).into_matrix();
    m[(0, 0)] -= rad.l;
    Ok(HermitianMatrix::from_matrix(m))
}

/// `-d dbar log det h`, with `det h` from its closed form and the complex
/// Hessian from finite differences.
pub fn ricci_numeric(point: &DomainPoint, profile: &Profile, step: f64) -> Result<HermitianMatrix> {
    let hess = wirtinger_hessian(
        |z| {
            let d = geometry::det_at(z, profile)?;
            if d > 0.0 {
                Ok(d.ln())
            } else {
                Err(Error::Domain(format!("det h = {d} is not positive")))
            }
        },
        point.coords(),
        step,
    )?;
    Ok(hess.scale(-1.0))
}

fn dimension_term(n: usize) -> f64 {
    (n * (n + 1)) as f64
}

/// `scal = -(A/B) F L - n(n+1)`.
pub fn scalar_curvature(point: &DomainPoint, profile: &Profile) -> Result<f64> {
    scalar_at(point.coords(), profile)
}

pub(crate) fn scalar_at(z: &[C64], profile: &Profile) -> Result<f64> {
    let loc = Local::at(z, profile)?;
    let rad = RadialCoefficients::from_jet(&loc.jet, loc.x)?;
    Ok(-loc.a / rad.b * loc.jet[0] * rad.l - dimension_term(z.len()))
}

/// Both algebraic forms of the scalar curvature:
/// `-(A/B) F L - n(n+1)` and `-n(n+1) + G A`.
pub fn scalar_curvature_routes(point: &DomainPoint, profile: &Profile) -> Result<(f64, f64)> {
    let loc = Local::at(point.coords(), profile)?;
    let rad = RadialCoefficients::from_jet(&loc.jet, loc.x)?;
    let nn = dimension_term(point.dim());
    Ok((
        -loc.a / rad.b * loc.jet[0] * rad.l - nn,
        -nn + rad.g * loc.a,
    ))
}

/// `sum_{a,b} g^{b ā} Ric_{a b̄}` from the closed-form matrices.
pub fn scalar_by_contraction(point: &DomainPoint, profile: &Profile) -> Result<f64> {
    let ginv = inverse_metric_at(point.coords(), profile)?;
    let ric = ricci_at(point.coords(), profile)?;
    Ok((ginv.as_matrix() * ric.as_matrix()).trace().re)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `rho_k = (n+1)^k (-1)^(k+1) C(n-1, k) [n(n+1)/(k+1) + A F L / B]`.
pub fn generalized_scalars_closed(point: &DomainPoint, profile: &Profile) -> Result<Vec<f64>> {
    let loc = Local::at(point.coords(), profile)?;
    let rad = RadialCoefficients::from_jet(&loc.jet, loc.x)?;
    let n = point.dim();
    let afl_b = loc.a * loc.jet[0] * rad.l / rad.b;
    Ok((0..n)
        .map(|k| {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            ((n + 1) as f64).powi(k as i32)
                * sign
                * binomial(n - 1, k)
                * (dimension_term(n) / (k + 1) as f64 + afl_b)
        })
        .collect())
}

/// Coefficients of `t^1..t^n` in `det(I + t M)`, found by evaluating the
/// determinant at `n+1` nodes and solving the interpolation system.
///
/// The nodes are `t_j = j tau`, `tau = 1 / (2 (n+1) (1 + |M|_max))`. The
/// constant coefficient must come out as 1; if it does not, the nodes are
/// halved once before giving up.
pub fn characteristic_coefficients(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let m_max = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let base = 1.0 / (2.0 * (n + 1) as f64 * (1.0 + m_max));
    let mut last = f64::NAN;
    for tau in [base, base / 2.0] {
        let coeffs = interpolate(m, tau)?;
        if (coeffs[0] - 1.0).abs() <= 1e-10 {
            return Ok(coeffs[1..].to_vec());
        }
        last = coeffs[0];
    }
    Err(Error::NumericFailure(format!(
        "interpolated constant term {last} differs from 1"
    )))
}

fn interpolate(m: &DMatrix<C64>, tau: f64) -> Result<Vec<f64>> {
    let n = m.nrows();
    let eye = DMatrix::<C64>::identity(n, n);
    // In the scaled variable s = t / tau the nodes are 0, 1, ..., n.
    let values = DVector::from_iterator(
        n + 1,
        (0..=n).map(|j| {
            (&eye + m * C64::new(j as f64 * tau, 0.0))
                .lu()
                .determinant()
                .re
        }),
    );
    let vander = DMatrix::from_fn(n + 1, n + 1, |j, k| (j as f64).powi(k as i32));
    let scaled = vander
        .lu()
        .solve(&values)
        .ok_or_else(|| Error::NumericFailure("singular interpolation system".into()))?;
    Ok(scaled
        .iter()
        .enumerate()
        .map(|(k, c)| c / tau.powi(k as i32))
        .collect())
}

/// Generalized scalar curvatures from the coefficients of
/// `det(h + t Ric) / det h = det(I + t h^{-1} Ric)`.
pub fn generalized_scalars_poly(point: &DomainPoint, profile: &Profile) -> Result<Vec<f64>> {
    let ginv = inverse_metric_at(point.coords(), profile)?;
    let ric = ricci_at(point.coords(), profile)?;
    characteristic_coefficients(&(ginv.as_matrix() * ric.as_matrix()))
}

/// Curvature data at one point.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureRecord {
    pub point: DomainPoint,
    pub ricci: HermitianMatrix,
    pub scal: f64,
    pub rho: Vec<f64>,
}

impl CurvatureRecord {
    pub fn at(point: &DomainPoint, profile: &Profile) -> Result<Self> {
        let ricci = ricci_closed_form(point, profile)?;
        let mut rho = generalized_scalars_closed(point, profile)?;
        let scal = scalar_curvature(point, profile)?;
        rho[0] = scal;
        Ok(Self {
            point: point.clone(),
            ricci,
            scal,
            rho,
        })
    }
}
