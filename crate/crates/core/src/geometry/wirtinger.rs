//! Finite-difference Wirtinger derivatives on `C^n`.
//!
//! These are the independent oracles for every closed form in the crate.
//! Real coordinates are ordered `(Re z_0, Im z_0, Re z_1, ...)`. Each
//! derivative is a second-order central difference, Richardson-extrapolated
//! over the steps `h` and `h / 2`.

use nalgebra::DMatrix;

use super::HermitianMatrix;
use crate::error::{Error, Result};
use crate::C64;

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Argument(format!("step must be > 0, got {step}")));
    }
    Ok(())
}

fn displaced(coords: &[C64], moves: &[(usize, f64)]) -> Vec<C64> {
    let mut out = coords.to_vec();
    for &(var, d) in moves {
        let slot = &mut out[var / 2];
        if var % 2 == 0 {
            slot.re += d;
        } else {
            slot.im += d;
        }
    }
    out
}

/// Any evaluation failure inside the stencil means the stencil left the domain.
fn eval<T>(f: &impl Fn(&[C64]) -> Result<T>, z: &[C64], step: f64) -> Result<T> {
    f(z).map_err(|_| Error::StepTooLarge { step })
}

fn real_hessian(
    f: &impl Fn(&[C64]) -> Result<f64>,
    coords: &[C64],
    h: f64,
    step: f64,
) -> Result<DMatrix<f64>> {
    let m = 2 * coords.len();
    let f0 = eval(f, coords, step)?;
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    for i in 0..m {
        plus[i] = eval(f, &displaced(coords, &[(i, h)]), step)?;
        minus[i] = eval(f, &displaced(coords, &[(i, -h)]), step)?;
    }
    let mut hess = DMatrix::zeros(m, m);
    for i in 0..m {
        hess[(i, i)] = (plus[i] - 2.0 * f0 + minus[i]) / (h * h);
        for j in i + 1..m {
            let pp = eval(f, &displaced(coords, &[(i, h), (j, h)]), step)?;
            let pm = eval(f, &displaced(coords, &[(i, h), (j, -h)]), step)?;
            let mp = eval(f, &displaced(coords, &[(i, -h), (j, h)]), step)?;
            let mm = eval(f, &displaced(coords, &[(i, -h), (j, -h)]), step)?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Matrix of `d^2 f / dz_a dz̄_b` for a real scalar field `f`.
///
/// Uses `d/dz = (d/dx - i d/dy) / 2` and `d/dz̄ = (d/dx + i d/dy) / 2`; the
/// result is symmetrized to exact Hermitian form. Fails with
/// [`Error::StepTooLarge`] if `f` errors anywhere on the stencil.
pub fn wirtinger_hessian(
    f: impl Fn(&[C64]) -> Result<f64>,
    coords: &[C64],
    step: f64,
) -> Result<HermitianMatrix> {
    check_step(step)?;
    let coarse = real_hessian(&f, coords, step, step)?;
    let fine = real_hessian(&f, coords, step / 2.0, step)?;
    let real = (fine * 4.0 - coarse) / 3.0;
    let n = coords.len();
    Ok(HermitianMatrix::from_fn(n, |a, b| {
        let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        C64::new(
            real[(xa, xb)] + real[(ya, yb)],
            real[(xa, yb)] - real[(ya, xb)],
        ) * 0.25
    }))
}

fn central<T>(
    f: &impl Fn(&[C64]) -> Result<Vec<T>>,
    coords: &[C64],
    var: usize,
    h: f64,
    step: f64,
) -> Result<Vec<T>>
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let p = eval(f, &displaced(coords, &[(var, h)]), step)?;
    let m = eval(f, &displaced(coords, &[(var, -h)]), step)?;
    Ok(p.iter()
        .zip(&m)
        .map(|(&a, &b)| (a - b) * (0.5 / h))
        .collect())
}

/// Conjugate Jacobian `d V_a / dz̄_c` of a complex vector field `V`.
///
/// Row `a` is the component, column `c` the coordinate.
pub fn conjugate_jacobian(
    f: impl Fn(&[C64]) -> Result<Vec<C64>>,
    coords: &[C64],
    step: f64,
) -> Result<DMatrix<C64>> {
    check_step(step)?;
    let n = coords.len();
    let dim = eval(&f, coords, step)?.len();
    let mut out = DMatrix::zeros(dim, n);
    for c in 0..n {
        let partial = |var: usize| -> Result<Vec<C64>> {
            let coarse = central(&f, coords, var, step, step)?;
            let fine = central(&f, coords, var, step / 2.0, step)?;
            Ok(fine
                .iter()
                .zip(&coarse)
                .map(|(&a, &b)| (a * 4.0 - b) / 3.0)
                .collect())
        };
        let dx = partial(2 * c)?;
        let dy = partial(2 * c + 1)?;
        for a in 0..dim {
            out[(a, c)] = (dx[a] + C64::i() * dy[a]) * 0.5;
        }
    }
    Ok(out)
}

/// `(df/dz̄_0, ..., df/dz̄_{n-1})` for a real scalar field.
pub fn conjugate_gradient(
    f: impl Fn(&[C64]) -> Result<f64>,
    coords: &[C64],
    step: f64,
) -> Result<Vec<C64>> {
    let jac = conjugate_jacobian(|z| f(z).map(|v| vec![C64::new(v, 0.0)]), coords, step)?;
    Ok(jac.row(0).iter().copied().collect())
}
