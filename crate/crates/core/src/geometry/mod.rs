//! Kähler potential, metric matrix, determinant, inverse and the scalar
//! coefficients of a Hartogs domain.
//!
//! With `x = |z_0|^2` and `A = F(x) - |z_1|^2 - ... - |z_{n-1}|^2`, the
//! potential is `Phi = -log A` and the metric coefficients are
//! `g_{a b̄} = d^2 Phi / dz_a dz̄_b`.

mod hermitian;
pub mod wirtinger;

pub use hermitian::HermitianMatrix;
pub use wirtinger::{conjugate_gradient, conjugate_jacobian, wirtinger_hessian, DEFAULT_STEP};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::{indicator_from_jet, Jet, Profile};
use crate::C64;

/// Denominators below this magnitude are treated as singular.
pub const SINGULAR_EPS: f64 = 1e-14;

/// A point of `C^n`, `n >= 2`, strictly inside `D_F`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainPoint {
    coords: Vec<C64>,
}

impl DomainPoint {
    /// Validates `|z_0|^2 < x0` and `A > 0`.
    pub fn new(coords: Vec<C64>, profile: &Profile) -> Result<Self> {
        Local::at(&coords, profile)?;
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `|z_0|^2`
    pub fn x(&self) -> f64 {
        self.coords[0].norm_sqr()
    }

    /// `|z_1|^2 + ... + |z_{n-1}|^2`
    pub fn fiber_norm_sqr(&self) -> f64 {
        fiber_norm_sqr(&self.coords)
    }

    /// Coordinates as `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.coords.iter().map(|z| [z.re, z.im]).collect()
    }
}

impl Serialize for DomainPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

pub(crate) fn fiber_norm_sqr(coords: &[C64]) -> f64 {
    coords[1..].iter().map(|z| z.norm_sqr()).sum()
}

/// Membership data shared by all closed forms at a point.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Local {
    pub x: f64,
    pub a: f64,
    pub jet: Jet,
}

impl Local {
    pub fn at(coords: &[C64], profile: &Profile) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Argument(format!(
                "Hartogs domains need n >= 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        let x = coords[0].norm_sqr();
        let jet = profile.jet(x)?;
        let fiber = fiber_norm_sqr(coords);
        let a = jet[0] - fiber;
        if !(a > 0.0) {
            return Err(Error::Domain(format!(
                "point is not interior: A = {a} (F = {}, fiber = {fiber})",
                jet[0]
            )));
        }
        Ok(Self { x, a, jet })
    }

    /// `C = F'^2 x - (F'' x + F') A`
    pub fn c(&self) -> f64 {
        let (f1, f2) = (self.jet[1], self.jet[2]);
        f1 * f1 * self.x - (f2 * self.x + f1) * self.a
    }
}

/// Functions of `x = |z_0|^2` alone: `B` and its derivatives, `L`, `G`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RadialCoefficients {
    pub x: f64,
    /// `B = F'^2 x - F (F' + F'' x)`
    pub b: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    /// `L = (x (log B)')'`
    pub l: f64,
    pub l1: f64,
    /// `G = -L F / B`
    pub g: f64,
    pub g1: f64,
    /// `F' + F'' x`
    pub k: f64,
}

impl RadialCoefficients {
    pub fn from_jet(jet: &Jet, x: f64) -> Result<Self> {
        let [f, f1, f2, f3, f4, f5] = *jet;
        let b = f1 * f1 * x - f * (f1 + f2 * x);
        if !(b.abs() >= SINGULAR_EPS) {
            return Err(Error::SingularCoefficient(format!("B({x}) = {b}")));
        }
        let b1 = f1 * f2 * x - f * (2.0 * f2 + f3 * x);
        let b2 = f2 * f2 * x - f1 * f2 - f * (3.0 * f3 + f4 * x);
        let b3 = 2.0 * f2 * f3 * x - 4.0 * f1 * f3 - f1 * f4 * x - f * (4.0 * f4 + f5 * x);
        // u = B'/B, L = u + x u', L' = 2u' + x u''
        let u = b1 / b;
        let u1 = b2 / b - u * u;
        let u2 = b3 / b - b2 * b1 / (b * b) - 2.0 * u * u1;
        let l = u + x * u1;
        let l1 = 2.0 * u1 + x * u2;
        let g = -l * f / b;
        let g1 = -(l1 * f + l * f1) / b + l * f * b1 / (b * b);
        Ok(Self {
            x,
            b,
            b1,
            b2,
            b3,
            l,
            l1,
            g,
            g1,
            k: f1 + f2 * x,
        })
    }

    pub fn at(profile: &Profile, x: f64) -> Result<Self> {
        Self::from_jet(&profile.jet(x)?, x)
    }
}

/// Scalar coefficients at a point, as they enter the curvature and
/// extremality computations.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoefficientBundle {
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub l: f64,
    pub g: f64,
    pub p00: f64,
    pub q00: f64,
    pub p0a: f64,
    pub q0a: f64,
    pub paa: f64,
    pub qaa: f64,
    pub raa: f64,
    pub pab: f64,
    pub qab: f64,
}

/// `Phi = -log A`.
pub fn potential(point: &DomainPoint, profile: &Profile) -> Result<f64> {
    potential_at(point.coords(), profile)
}

pub(crate) fn potential_at(coords: &[C64], profile: &Profile) -> Result<f64> {
    Ok(-Local::at(coords, profile)?.a.ln())
}

/// Complex Hessian of the potential by finite differences.
pub fn metric_numeric(
    point: &DomainPoint,
    profile: &Profile,
    step: f64,
) -> Result<HermitianMatrix> {
    wirtinger_hessian(|z| potential_at(z, profile), point.coords(), step)
}

/// The metric matrix `h = (g_{a b̄})` in closed form.
///
/// The matrix is returned even when the profile fails the Kähler condition;
/// check [`Profile::kahler_indicator`] for admissibility.
pub fn metric_closed_form(point: &DomainPoint, profile: &Profile) -> Result<HermitianMatrix> {
    metric_at(point.coords(), profile)
}

pub(crate) fn metric_at(z: &[C64], profile: &Profile) -> Result<HermitianMatrix> {
    let loc = Local::at(z, profile)?;
    Ok(metric_from_local(z, &loc))
}

fn metric_from_local(z: &[C64], loc: &Local) -> HermitianMatrix {
    let n = z.len();
    let f1 = loc.jet[1];
    let inv_a2 = 1.0 / (loc.a * loc.a);
    HermitianMatrix::from_fn(n, |r, s| {
        let v = match (r, s) {
            (0, 0) => C64::new(loc.c(), 0.0),
            (0, s) => -z[0].conj() * z[s] * f1,
            (r, 0) => -z[0] * z[r].conj() * f1,
            (r, s) => {
                let d = if r == s { loc.a } else { 0.0 };
                z[r].conj() * z[s] + d
            }
        };
        v * inv_a2
    })
}

/// `det h = -(F^2 / A^(n+1)) (x F'/F)'` at `x = |z_0|^2`.
pub fn det_closed_form(point: &DomainPoint, profile: &Profile) -> Result<f64> {
    det_at(point.coords(), profile)
}

pub(crate) fn det_at(z: &[C64], profile: &Profile) -> Result<f64> {
    let loc = Local::at(z, profile)?;
    let f = loc.jet[0];
    let n = z.len() as i32;
    Ok(-f * f / loc.a.powi(n + 1) * indicator_from_jet(&loc.jet, loc.x))
}

/// Minor of `A^2 h` on rows and columns `alpha..n`:
/// `A^(n-alpha) + A^(n-alpha-1) (|z_alpha|^2 + ... + |z_{n-1}|^2)`.
pub fn principal_minor(point: &DomainPoint, profile: &Profile, alpha: usize) -> Result<f64> {
    let n = point.dim();
    if alpha == 0 || alpha >= n {
        return Err(Error::Argument(format!(
            "alpha must be in 1..{}, got {alpha}",
            n - 1
        )));
    }
    let loc = Local::at(point.coords(), profile)?;
    let tail: f64 = point.coords()[alpha..].iter().map(|z| z.norm_sqr()).sum();
    let m = (n - alpha) as i32;
    Ok(loc.a.powi(m) + loc.a.powi(m - 1) * tail)
}

/// The inverse metric; entry `(b, a)` is `g^{b ā}` with
/// `sum_a g^{b ā} g_{a c̄} = delta_{bc}`.
pub fn inverse_metric_closed_form(
    point: &DomainPoint,
    profile: &Profile,
) -> Result<HermitianMatrix> {
    inverse_metric_at(point.coords(), profile)
}

pub(crate) fn inverse_metric_at(z: &[C64], profile: &Profile) -> Result<HermitianMatrix> {
    let loc = Local::at(z, profile)?;
    let (f, f1, f2) = (loc.jet[0], loc.jet[1], loc.jet[2]);
    let b = f1 * f1 * loc.x - f * (f1 + f2 * loc.x);
    if !(b.abs() >= SINGULAR_EPS) {
        return Err(Error::SingularCoefficient(format!("B({}) = {b}", loc.x)));
    }
    let k = f1 + f2 * loc.x;
    let s = loc.a / b;
    Ok(HermitianMatrix::from_fn(z.len(), |r, c| {
        let v = match (r, c) {
            (0, 0) => C64::new(f, 0.0),
            (r, 0) => z[0] * z[r].conj() * f1,
            (0, c) => z[0].conj() * z[c] * f1,
            (r, c) if r == c => C64::new(b + k * z[r].norm_sqr(), 0.0),
            (r, c) => z[c] * z[r].conj() * k,
        };
        v * s
    }))
}

/// Evaluates `A, B, C, L, G` and the coefficient functions that split the
/// inverse metric into its `|z_0|^2`-dependent parts.
pub fn coefficient_bundle(point: &DomainPoint, profile: &Profile) -> Result<CoefficientBundle> {
    let loc = Local::at(point.coords(), profile)?;
    let rad = RadialCoefficients::from_jet(&loc.jet, loc.x)?;
    let (f, f1) = (loc.jet[0], loc.jet[1]);
    let b = rad.b;
    let kb = rad.k / b;
    Ok(CoefficientBundle {
        x: loc.x,
        a: loc.a,
        b,
        c: loc.c(),
        l: rad.l,
        g: rad.g,
        p00: f * f / b,
        q00: -f / b,
        p0a: f1 * f / b,
        q0a: -f1 / b,
        paa: f * kb - 1.0,
        qaa: kb,
        raa: kb,
        pab: f * kb,
        qab: -kb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn point(coords: &[(f64, f64)], p: &Profile) -> DomainPoint {
        DomainPoint::new(coords.iter().map(|&(a, b)| c(a, b)).collect(), p).unwrap()
    }

    #[test]
    fn potential_examples() {
        let lin = Profile::hyperbolic();
        assert_eq!(
            potential(&point(&[(0.0, 0.0), (0.0, 0.0)], &lin), &lin).unwrap(),
            0.0
        );
        let v = potential(&point(&[(0.0, 0.0), (0.6, 0.0)], &lin), &lin).unwrap();
        assert!((v - 0.446_287_102_628_419_5).abs() < 1e-12);
        let exp = Profile::exponential(1.0).unwrap();
        let v = potential(&point(&[(1.0, 0.0), (0.0, 0.0)], &exp), &exp).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn membership_errors() {
        let lin = Profile::hyperbolic();
        assert!(matches!(
            DomainPoint::new(vec![c(0.0, 0.0), c(1.0, 0.0)], &lin),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            DomainPoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)], &lin),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            DomainPoint::new(vec![c(0.1, 0.0)], &lin),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn metric_at_origin() {
        let lin = Profile::hyperbolic();
        let h = metric_closed_form(&point(&[(0.0, 0.0), (0.0, 0.0)], &lin), &lin).unwrap();
        assert!(h.max_abs_diff(&HermitianMatrix::identity(2)) < 1e-15);

        let p = Profile::exponential(0.7).unwrap().scaled(1.3).unwrap();
        let h = metric_closed_form(&point(&[(0.0, 0.0); 3], &p), &p).unwrap();
        let (f0, f1) = (p.deriv(0, 0.0), p.deriv(1, 0.0));
        let expect = [-f1 / f0, 1.0 / f0, 1.0 / f0];
        for (r, &d) in expect.iter().enumerate() {
            for s in 0..3 {
                let e = if r == s { d } else { 0.0 };
                assert!((h.get(r, s) - c(e, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn determinant_examples() {
        let lin = Profile::hyperbolic();
        let d = det_closed_form(&point(&[(0.0, 0.0), (0.0, 0.0)], &lin), &lin).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let pt = point(&[(0.0, 0.0), (0.6, 0.0)], &lin);
        let d = det_closed_form(&pt, &lin).unwrap();
        assert!((d - 1.0 / 0.64f64.powi(3)).abs() < 1e-12);
        assert!((d - 3.814_697_265_625).abs() < 1e-9);
        let brute = metric_closed_form(&pt, &lin).unwrap().det();
        assert!((d - brute).abs() / d < 1e-12);
    }

    #[test]
    fn principal_minor_examples() {
        let lin = Profile::hyperbolic();
        let pt = point(&[(0.0, 0.0), (0.6, 0.0)], &lin);
        assert!((principal_minor(&pt, &lin, 1).unwrap() - 1.0).abs() < 1e-15);
        let exp = Profile::exponential(1.0).unwrap();
        let origin = point(&[(0.0, 0.0); 3], &exp);
        assert!((principal_minor(&origin, &exp, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            principal_minor(&origin, &exp, 0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            principal_minor(&origin, &exp, 3),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn principal_minor_matches_brute_force() {
        let p = Profile::power(2.0).unwrap();
        let pt = point(&[(0.3, 0.1), (0.1, -0.2), (0.25, 0.05), (-0.1, 0.15)], &p);
        let loc = Local::at(pt.coords(), &p).unwrap();
        let scaled = metric_closed_form(&pt, &p).unwrap().scale(loc.a * loc.a);
        for alpha in 1..4 {
            let m = scaled.as_matrix();
            let sub = m.view((alpha, alpha), (4 - alpha, 4 - alpha)).clone_owned();
            let brute = sub.lu().determinant().re;
            let closed = principal_minor(&pt, &p, alpha).unwrap();
            assert!(
                (brute - closed).abs() < 1e-10,
                "alpha={alpha}: {brute} vs {closed}"
            );
        }
    }

    #[test]
    fn inverse_examples() {
        let lin = Profile::hyperbolic();
        let g = inverse_metric_closed_form(&point(&[(0.0, 0.0), (0.0, 0.0)], &lin), &lin).unwrap();
        assert!(g.max_abs_diff(&HermitianMatrix::identity(2)) < 1e-15);

        let p = Profile::exponential(1.0).unwrap().scaled(2.0).unwrap();
        let g = inverse_metric_closed_form(&point(&[(0.0, 0.0); 3], &p), &p).unwrap();
        let (f0, f1) = (p.deriv(0, 0.0), p.deriv(1, 0.0));
        let expect = [-f0 / f1, f0, f0];
        for (r, e) in expect.iter().enumerate() {
            assert!((g.get(r, r).re - e).abs() < 1e-14);
        }

        let pt = point(&[(0.5, 0.2), (0.2, -0.3), (0.1, 0.1)], &p);
        let h = metric_closed_form(&pt, &p).unwrap();
        let prod = h.as_matrix() * g_at(&pt, &p);
        let eye = nalgebra::DMatrix::<C64>::identity(3, 3);
        assert!(hermitian::max_abs_diff(&prod, &eye) < 1e-12);
    }

    fn g_at(pt: &DomainPoint, p: &Profile) -> nalgebra::DMatrix<C64> {
        inverse_metric_closed_form(pt, p).unwrap().into_matrix()
    }

    #[test]
    fn singular_b_is_reported() {
        let flat = Profile::linear(1.0, 0.0).unwrap();
        let pt = point(&[(0.3, 0.0), (0.2, 0.0)], &flat);
        assert!(matches!(
            inverse_metric_closed_form(&pt, &flat),
            Err(Error::SingularCoefficient(_))
        ));
        assert!(matches!(
            coefficient_bundle(&pt, &flat),
            Err(Error::SingularCoefficient(_))
        ));
    }

    #[test]
    fn bundle_linear_and_exponential() {
        let lin = Profile::hyperbolic();
        let pt = point(&[(0.0, 0.0), (0.3, 0.2)], &lin);
        let cb = coefficient_bundle(&pt, &lin).unwrap();
        assert!((cb.b - 1.0).abs() < 1e-15);
        assert_eq!(cb.l, 0.0);
        assert_eq!(cb.g, 0.0);
        assert!((cb.q00 + 1.0).abs() < 1e-15);
        assert!((cb.p00 - 1.0).abs() < 1e-15);

        let exp = Profile::exponential(1.0).unwrap();
        for &x0 in &[0.0, 0.4, 1.1] {
            let pt = point(&[(x0, 0.0), (0.1, 0.0)], &exp);
            let cb = coefficient_bundle(&pt, &exp).unwrap();
            let x = x0 * x0;
            assert!((cb.b - (-2.0 * x).exp()).abs() < 1e-14);
            assert!((cb.l + 2.0).abs() < 1e-12);
            assert!((cb.g - 2.0 * x.exp()).abs() < 1e-11);
            assert!((cb.qab + cb.qaa).abs() < 1e-15);
            assert!((cb.pab - cb.paa - 1.0).abs() < 1e-12);
            assert_eq!(cb.qaa, cb.raa);
        }
    }

    /// Derivatives of B, L, G checked against central differences of the
    /// lower-order closed forms.
    #[test]
    fn radial_derivatives_match_finite_differences() {
        let profiles = [
            Profile::exponential(1.0).unwrap(),
            Profile::power(2.0).unwrap(),
            Profile::power(3.5).unwrap(),
            Profile::exponential(0.6).unwrap().scaled(3.0).unwrap(),
        ];
        let h = 1e-5;
        for p in &profiles {
            for &x in &[0.1, 0.3, 0.55] {
                let r = RadialCoefficients::at(p, x).unwrap();
                let rp = RadialCoefficients::at(p, x + h).unwrap();
                let rm = RadialCoefficients::at(p, x - h).unwrap();
                let d = |a: f64, b: f64| (a - b) / (2.0 * h);
                let tol = |v: f64| 1e-6 * (1.0 + v.abs());
                assert!((d(rp.b, rm.b) - r.b1).abs() < tol(r.b1), "{} B'", p.label());
                assert!(
                    (d(rp.b1, rm.b1) - r.b2).abs() < tol(r.b2),
                    "{} B''",
                    p.label()
                );
                assert!(
                    (d(rp.b2, rm.b2) - r.b3).abs() < tol(r.b3),
                    "{} B'''",
                    p.label()
                );
                assert!((d(rp.l, rm.l) - r.l1).abs() < tol(r.l1), "{} L'", p.label());
                assert!((d(rp.g, rm.g) - r.g1).abs() < tol(r.g1), "{} G'", p.label());
                // L from its definition (x (log B)')', log B by finite differences
                let xl = |t: f64| {
                    let e = 1e-4;
                    let lb = |s: f64| RadialCoefficients::at(p, s).unwrap().b.abs().ln();
                    t * (lb(t + e) - lb(t - e)) / (2.0 * e)
                };
                let e = 1e-3;
                let l_fd = (xl(x + e) - xl(x - e)) / (2.0 * e);
                assert!(
                    (l_fd - r.l).abs() < 1e-5 * (1.0 + r.l.abs()),
                    "{} L",
                    p.label()
                );
            }
        }
    }

    #[test]
    fn power_two_has_l_minus_two_over_square() {
        let p = Profile::power(2.0).unwrap();
        for &x in &[0.0, 0.2, 0.7] {
            let r = RadialCoefficients::at(&p, x).unwrap();
            assert!((r.b - 2.0 * (1.0 - x).powi(2)).abs() < 1e-14);
            assert!((r.l + 2.0 / (1.0 - x).powi(2)).abs() < 1e-12);
        }
    }
}
