//! Levi-form tests on the boundary of `D_F`.
//!
//! At a boundary point `|z_1|^2 + ... + |z_{n-1}|^2 = F(|z_0|^2)` the
//! defining function is `rho = |z_1|^2 + ... + |z_{n-1}|^2 - F(|z_0|^2)`.
//! Away from `z_0 = 0` the complex tangent space is parametrized by the
//! fiber components `Y`, with `X_0` solved from the tangency condition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{fiber_norm_sqr, SINGULAR_EPS};
use crate::grid::x_window;
use crate::profile::{Endpoint, Profile};
use crate::C64;

/// Tolerance for the boundary identity `rho(z) = 0`.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// A point of the boundary with `|z_0|^2 < x0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint {
    #[serde(serialize_with = "pairs")]
    coords: Vec<C64>,
    /// `(d rho / dz_0, ..., d rho / dz_{n-1}) = (-F' z̄_0, z̄_1, ..., z̄_{n-1})`.
    #[serde(serialize_with = "pairs")]
    dz_rho: Vec<C64>,
}

fn pairs<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    to_pairs(v).serialize(s)
}

fn to_pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl BoundaryPoint {
    /// Validates the boundary identity and a nonvanishing gradient.
    pub fn new(coords: Vec<C64>, profile: &Profile) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Argument(format!(
                "n must be >= 2, got {}",
                coords.len()
            )));
        }
        let x = coords[0].norm_sqr();
        let j = profile.jet(x)?;
        let rho = fiber_norm_sqr(&coords) - j[0];
        if rho.abs() > BOUNDARY_TOL * (1.0 + j[0]) {
            return Err(Error::Domain(format!("not a boundary point: rho = {rho}")));
        }
        let mut dz_rho = Vec::with_capacity(coords.len());
        dz_rho.push(-coords[0].conj() * j[1]);
        dz_rho.extend(coords[1..].iter().map(|z| z.conj()));
        // The fiber part has squared norm F > 0, so the gradient cannot vanish.
        Ok(Self { coords, dz_rho })
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dz_rho(&self) -> &[C64] {
        &self.dz_rho
    }

    pub fn x(&self) -> f64 {
        self.coords[0].norm_sqr()
    }

    /// `sum_a d rho / dz_a X_a`; zero exactly on the complex tangent space.
    pub fn tangency_pairing(&self, v: &[C64]) -> C64 {
        self.dz_rho.iter().zip(v).map(|(g, x)| g * x).sum()
    }
}

/// `rho(z) = |z_1|^2 + ... + |z_{n-1}|^2 - F(|z_0|^2)`.
pub fn defining_function(coords: &[C64], profile: &Profile) -> Result<f64> {
    Ok(fiber_norm_sqr(coords) - profile.jet(coords[0].norm_sqr())?[0])
}

/// `(z0, sqrt(F(|z0|^2)) * direction)`, with `direction` normalized.
pub fn boundary_point(profile: &Profile, z0: C64, direction: &[C64]) -> Result<BoundaryPoint> {
    let x = z0.norm_sqr();
    if !profile.x0().contains(x) {
        return Err(Error::Domain(format!(
            "|z0|^2 = {x} is not below x0 = {}",
            profile.x0().as_f64()
        )));
    }
    let norm = direction.iter().map(|d| d.norm_sqr()).sum::<f64>().sqrt();
    if direction.is_empty() || !(norm > 0.0) {
        return Err(Error::Argument(
            "fiber direction must be a nonzero vector".into(),
        ));
    }
    let radius = profile.jet(x)?[0].sqrt();
    let mut coords = Vec::with_capacity(direction.len() + 1);
    coords.push(z0);
    coords.extend(direction.iter().map(|d| d * (radius / norm)));
    BoundaryPoint::new(coords, profile)
}

/// Levi form of `rho` applied to `X`:
/// `|X_1|^2 + ... + |X_{n-1}|^2 - (F' + F'' |z_0|^2) |X_0|^2`.
pub fn levi_form(point: &BoundaryPoint, v: &[C64], profile: &Profile) -> Result<f64> {
    check_len(v.len(), point.coords.len())?;
    let x = point.x();
    let j = profile.jet(x)?;
    Ok(fiber_norm_sqr(v) - (j[1] + j[2] * x) * v[0].norm_sqr())
}

fn check_len(got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Argument(format!(
            "expected {want} components, got {got}"
        )));
    }
    Ok(())
}

/// Result of a computation that only applies away from `z_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Stratum<T> {
    Regular(T),
    /// `z_0 = 0`: the unrestricted Levi form must be used instead.
    Origin,
}

impl<T> Stratum<T> {
    pub fn regular(self) -> Option<T> {
        match self {
            Stratum::Regular(v) => Some(v),
            Stratum::Origin => None,
        }
    }
}

/// Completes fiber components `Y` to a complex tangent vector by solving
/// `X_0 = (z̄_1 Y_1 + ... + z̄_{n-1} Y_{n-1}) / (F' z̄_0)`.
pub fn tangent_vector(
    point: &BoundaryPoint,
    y: &[C64],
    profile: &Profile,
) -> Result<Stratum<Vec<C64>>> {
    check_len(y.len() + 1, point.coords.len())?;
    let z = &point.coords;
    if z[0].norm() == 0.0 {
        return Ok(Stratum::Origin);
    }
    let f1 = profile.jet(point.x())?[1];
    if f1.abs() < SINGULAR_EPS {
        return Err(Error::SingularCoefficient(format!(
            "F'({}) = {f1}",
            point.x()
        )));
    }
    let num: C64 = z[1..].iter().zip(y).map(|(zk, yk)| zk.conj() * yk).sum();
    let mut out = Vec::with_capacity(z.len());
    out.push(num / (z[0].conj() * f1));
    out.extend_from_slice(y);
    Ok(Stratum::Regular(out))
}

/// The Levi form on the complex tangent space, in the fiber parametrization:
/// `|Y|^2 - (F' + F'' x) / (F'^2 x) |z̄_1 Y_1 + ... + z̄_{n-1} Y_{n-1}|^2`.
pub fn restricted_levi(
    point: &BoundaryPoint,
    y: &[C64],
    profile: &Profile,
) -> Result<Stratum<f64>> {
    check_len(y.len() + 1, point.coords.len())?;
    let z = &point.coords;
    if z[0].norm() == 0.0 {
        return Ok(Stratum::Origin);
    }
    let x = point.x();
    let j = profile.jet(x)?;
    let denom = j[1] * j[1] * x;
    if denom.abs() < SINGULAR_EPS {
        return Err(Error::SingularCoefficient(format!("F'^2 x = {denom}")));
    }
    let proj: C64 = z[1..].iter().zip(y).map(|(zk, yk)| zk.conj() * yk).sum();
    let y2: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    Ok(Stratum::Regular(
        y2 - (j[1] + j[2] * x) / denom * proj.norm_sqr(),
    ))
}

/// `F(x) = 1 + exp(-x)`: decreasing, but `(x F'/F)'` turns positive past the
/// root of `e^x + 1 = x e^x` (about 1.2785), so the Kähler condition fails
/// on an unbounded interval.
pub fn sign_changing_profile() -> Profile {
    Profile::custom("1+exp(-x)", Endpoint::Infinite, |k, x| {
        let e = (-x).exp();
        match k {
            0 => 1.0 + e,
            k if k % 2 == 1 => -e,
            _ => e,
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EquivalenceVerdict {
    Consistent,
    Inconsistent,
}

impl EquivalenceVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquivalenceVerdict::Consistent => "CONSISTENT",
            EquivalenceVerdict::Inconsistent => "INCONSISTENT",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EquivalenceOptions {
    pub n: usize,
    /// Sampling bound for `|z_0|^2` when `x0` is infinite.
    pub x_cap: f64,
    /// Relative distance kept from both ends of the `|z_0|^2` window.
    pub edge: f64,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        Self {
            n: 3,
            x_cap: 5.0,
            edge: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub profile: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub min_levi: f64,
    pub argmin_point: Vec<[f64; 2]>,
    pub argmin_direction: Vec<[f64; 2]>,
    pub argmin_x: f64,
    pub max_indicator: f64,
    pub argmax_indicator_x: f64,
    /// Samples whose restricted Levi value is not positive.
    pub nonpositive_levi: usize,
    /// Samples where the indicator sign and the Levi sign disagree.
    pub disagreements: usize,
    /// Minimum of the unrestricted Levi form over unit vectors at `z_0 = 0`.
    pub origin_min_levi: f64,
    pub verdict: EquivalenceVerdict,
}

struct Sample {
    x: f64,
    indicator: f64,
    levi: f64,
    point: Vec<C64>,
    direction: Vec<C64>,
}

fn sample_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 step on a per-sample counter
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_unit(rng: &mut ChaCha8Rng, m: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..m)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

fn draw(
    profile: &Profile,
    opts: &EquivalenceOptions,
    lo: f64,
    hi: f64,
    seed: u64,
) -> Result<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = lo + (hi - lo) * rng.random::<f64>();
    let z0 = C64::from_polar(x.sqrt(), std::f64::consts::TAU * rng.random::<f64>());
    let dir = gaussian_unit(&mut rng, opts.n - 1);
    let y = gaussian_unit(&mut rng, opts.n - 1);
    let bp = boundary_point(profile, z0, &dir)?;
    let random = restricted_levi(&bp, &y, profile)?;
    // The fiber direction itself is where positivity is hardest.
    let along = restricted_levi(&bp, &dir, profile)?;
    let (levi, direction) = match (random, along) {
        (Stratum::Regular(a), Stratum::Regular(b)) if a <= b => (a, y),
        (Stratum::Regular(_), Stratum::Regular(b)) => (b, dir),
        _ => return Err(Error::NumericFailure("sampled z_0 = 0".into())),
    };
    Ok(Sample {
        x,
        indicator: profile.kahler_indicator(x)?,
        levi,
        point: bp.coords,
        direction,
    })
}

/// Samples boundary points with `0 < |z_0|^2 < x0` and tangent directions,
/// comparing the sign of `(x F'/F)'` with that of the restricted Levi form.
pub fn equivalence_check(
    profile: &Profile,
    samples: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    equivalence_check_with(profile, samples, seed, &EquivalenceOptions::default())
}

pub fn equivalence_check_with(
    profile: &Profile,
    samples: usize,
    seed: u64,
    opts: &EquivalenceOptions,
) -> Result<EquivalenceReport> {
    if samples == 0 {
        return Err(Error::Argument("samples must be >= 1".into()));
    }
    if opts.n < 2 {
        return Err(Error::Argument(format!("n must be >= 2, got {}", opts.n)));
    }
    let (lo, hi) = x_window(profile, opts.x_cap);
    let margin = opts.edge * (hi - lo);
    let (lo, hi) = ((lo + margin).max(f64::MIN_POSITIVE), hi - margin);

    let drawn: Vec<Sample> = (0..samples as u64)
        .into_par_iter()
        .map(|i| draw(profile, opts, lo, hi, sample_seed(seed, i)))
        .collect::<Result<_>>()?;

    let mut min_i = 0;
    let mut max_i = 0;
    let mut nonpositive = 0;
    let mut disagreements = 0;
    for (i, s) in drawn.iter().enumerate() {
        if s.levi < drawn[min_i].levi {
            min_i = i;
        }
        if s.indicator > drawn[max_i].indicator {
            max_i = i;
        }
        if s.levi <= 0.0 {
            nonpositive += 1;
        }
        if (s.indicator < 0.0) != (s.levi > 0.0) {
            disagreements += 1;
        }
    }

    let origin_min_levi = origin_stratum_min(profile, opts.n, samples.min(64), seed)?;
    let min_levi = drawn[min_i].levi;
    let max_indicator = drawn[max_i].indicator;
    let verdict = if (max_indicator < 0.0) == (min_levi > 0.0) {
        EquivalenceVerdict::Consistent
    } else {
        EquivalenceVerdict::Inconsistent
    };
    Ok(EquivalenceReport {
        profile: profile.label(),
        n: opts.n,
        samples,
        seed,
        min_levi,
        argmin_point: to_pairs(&drawn[min_i].point),
        argmin_direction: to_pairs(&drawn[min_i].direction),
        argmin_x: drawn[min_i].x,
        max_indicator,
        argmax_indicator_x: drawn[max_i].x,
        nonpositive_levi: nonpositive,
        disagreements,
        origin_min_levi,
        verdict,
    })
}

/// Unrestricted Levi form at a `z_0 = 0` boundary point, minimized over
/// random unit vectors and the coordinate axis `e_0`.
fn origin_stratum_min(profile: &Profile, n: usize, draws: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, u64::MAX));
    let dir = gaussian_unit(&mut rng, n - 1);
    let bp = boundary_point(profile, C64::new(0.0, 0.0), &dir)?;
    let mut e0 = vec![C64::new(0.0, 0.0); n];
    e0[0] = C64::new(1.0, 0.0);
    let mut min = levi_form(&bp, &e0, profile)?;
    for _ in 0..draws {
        let v = gaussian_unit(&mut rng, n);
        min = min.min(levi_form(&bp, &v, profile)?);
    }
    Ok(min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::wirtinger_hessian;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn boundary_point_examples() {
        let lin = Profile::hyperbolic();
        let bp = boundary_point(&lin, c(0.0, 0.0), &[c(1.0, 0.0)]).unwrap();
        assert_eq!(bp.coords(), &[c(0.0, 0.0), c(1.0, 0.0)]);

        let exp = Profile::exponential(1.0).unwrap();
        let bp = boundary_point(&exp, c(1.0, 0.0), &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((bp.coords()[1].re - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(bp.coords()[2], c(0.0, 0.0));

        let bp = boundary_point(&lin, c(0.6, 0.0), &[c(0.3, 0.4)]).unwrap();
        assert!((bp.coords()[1].norm() - 0.8).abs() < 1e-15);
        assert!(defining_function(bp.coords(), &lin).unwrap().abs() < 1e-15);

        assert!(matches!(
            boundary_point(&lin, c(1.0, 0.0), &[c(1.0, 0.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            boundary_point(&lin, c(0.1, 0.0), &[c(0.0, 0.0)]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn levi_form_examples() {
        let exp = Profile::exponential(1.0).unwrap();
        let bp = boundary_point(&exp, c(0.0, 0.0), &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let x = [c(0.5, 0.1), c(-0.2, 0.3), c(0.0, 1.0)];
        let v = levi_form(&bp, &x, &exp).unwrap();
        let expect = 0.04 + 0.09 + 1.0 + 1.0 * x[0].norm_sqr();
        assert!((v - expect).abs() < 1e-14);
        assert_eq!(levi_form(&bp, &[c(0.0, 0.0); 3], &exp).unwrap(), 0.0);

        let lin = Profile::hyperbolic();
        let bp = boundary_point(&lin, c(0.5, 0.2), &[c(1.0, 0.0)]).unwrap();
        let x = [c(0.3, -0.4), c(1.0, 2.0)];
        assert!((levi_form(&bp, &x, &lin).unwrap() - (5.0 + 0.25)).abs() < 1e-14);
    }

    #[test]
    fn levi_form_is_hessian_of_defining_function() {
        let p = Profile::power(2.0).unwrap();
        let bp = boundary_point(&p, c(0.4, 0.3), &[c(0.6, 0.1), c(-0.2, 0.5)]).unwrap();
        let x = [c(0.7, -0.1), c(0.2, 0.3), c(-0.4, 0.1)];
        for lambda in [1.0, 3.5] {
            let hess = wirtinger_hessian(
                |z| Ok(lambda * defining_function(z, &p)?),
                bp.coords(),
                1e-3,
            )
            .unwrap();
            let mut q = C64::new(0.0, 0.0);
            for a in 0..3 {
                for b in 0..3 {
                    q += hess.get(a, b) * x[a] * x[b].conj();
                }
            }
            let closed = levi_form(&bp, &x, &p).unwrap();
            assert!(
                (q.re - lambda * closed).abs() < 1e-7,
                "{} vs {}",
                q.re,
                lambda * closed
            );
        }
    }

    #[test]
    fn tangent_vector_examples() {
        let lin = Profile::hyperbolic();
        let bp = BoundaryPoint::new(vec![c(0.6, 0.0), c(0.8, 0.0)], &lin).unwrap();
        let x = tangent_vector(&bp, &[c(1.0, 0.0)], &lin)
            .unwrap()
            .regular()
            .unwrap();
        assert!((x[0] - c(-4.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(bp.tangency_pairing(&x).norm() <= 1e-12);

        let exp = Profile::exponential(1.0).unwrap();
        let bp = boundary_point(&exp, c(0.5, 0.5), &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let x = tangent_vector(&bp, &[c(0.0, 0.0), c(0.3, 0.7)], &exp)
            .unwrap()
            .regular()
            .unwrap();
        assert_eq!(x[0], c(0.0, 0.0));

        let origin = boundary_point(&exp, c(0.0, 0.0), &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(
            tangent_vector(&origin, &[c(1.0, 0.0); 2], &exp).unwrap(),
            Stratum::Origin
        );
        assert_eq!(
            restricted_levi(&origin, &[c(1.0, 0.0); 2], &exp).unwrap(),
            Stratum::Origin
        );
    }

    #[test]
    fn restricted_levi_special_vectors() {
        let p = Profile::power(2.0).unwrap();
        let bp = boundary_point(&p, c(0.3, 0.4), &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let x = bp.x();
        let j = p.jet(x).unwrap();
        let along: Vec<C64> = bp.coords()[1..].to_vec();
        let v = restricted_levi(&bp, &along, &p).unwrap().regular().unwrap();
        let expect = j[0] * (1.0 - (j[1] + j[2] * x) / (j[1] * j[1] * x) * j[0]);
        assert!((v - expect).abs() < 1e-12);

        let orth = [c(0.8, 0.0), c(0.0, -0.6)];
        let proj: C64 = bp.coords()[1..]
            .iter()
            .zip(&orth)
            .map(|(z, y)| z.conj() * y)
            .sum();
        assert!(proj.norm() < 1e-15);
        let v = restricted_levi(&bp, &orth, &p).unwrap().regular().unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn equivalence_for_admissible_profiles() {
        for p in [Profile::hyperbolic(), Profile::exponential(1.0).unwrap()] {
            let r = equivalence_check(&p, 500, 3).unwrap();
            assert_eq!(r.verdict, EquivalenceVerdict::Consistent);
            assert!(r.min_levi > 0.0 && r.max_indicator < 0.0, "{r:?}");
            assert!(r.origin_min_levi > 0.0);
            assert_eq!(r.disagreements, 0);
        }
    }

    #[test]
    fn violating_profile_is_flagged() {
        let p = sign_changing_profile();
        assert!(p.kahler_indicator(1.0).unwrap() < 0.0);
        assert!(p.kahler_indicator(1.5).unwrap() > 0.0);
        let r = equivalence_check(&p, 500, 11).unwrap();
        assert!(r.min_levi <= 0.0);
        assert!(r.nonpositive_levi > 0);
        assert!(r.argmin_x > 1.278 && r.argmin_x < 5.0, "{}", r.argmin_x);
        assert_eq!(r.verdict, EquivalenceVerdict::Consistent);
    }

    #[test]
    fn report_is_deterministic() {
        let p = Profile::power(2.0).unwrap();
        let a = serde_json::to_string(&equivalence_check(&p, 50, 9).unwrap()).unwrap();
        let b = serde_json::to_string(&equivalence_check(&p, 50, 9).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
