//! Deterministic sampling of interior points and radial abscissae.
//!
//! Interior points come from a Halton sequence with a seeded
//! Cranley–Patterson rotation, laid out in polar form: `|z_0|^2`, the phase
//! of `z_0`, the squared fiber radius, and a fiber direction obtained from
//! Box–Muller pairs. Points with `A < a_margin * F(0)` are never produced.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainPoint;
use crate::profile::Profile;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub points: usize,
    pub seed: u64,
    /// Minimum gap `A`, as a fraction of `F(0)`.
    pub a_margin: f64,
    /// Upper sampling bound for `|z_0|^2` when `x0` is infinite.
    pub x_cap: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 200,
            seed: 17,
            a_margin: 0.05,
            x_cap: 5.0,
        }
    }
}

impl GridSpec {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::Argument("grid needs at least one point".into()));
        }
        if !(self.a_margin > 0.0 && self.a_margin < 1.0) {
            return Err(Error::Argument(format!(
                "a_margin must be in (0, 1), got {}",
                self.a_margin
            )));
        }
        if !(self.x_cap > 0.0 && self.x_cap.is_finite()) {
            return Err(Error::Argument(format!(
                "x_cap must be > 0, got {}",
                self.x_cap
            )));
        }
        Ok(())
    }
}

/// Sampling window `[lo, hi)` for `x = |z_0|^2`.
///
/// Tabulated profiles keep away from their first node, where interpolated
/// derivatives are least reliable.
pub fn x_window(profile: &Profile, x_cap: f64) -> (f64, f64) {
    let hi = profile.x0().capped(x_cap);
    let lo = profile.x_min();
    if profile.is_low_precision() {
        (lo + 1e-3 * (hi - lo), hi)
    } else {
        (lo, hi)
    }
}

/// `count` midpoints of equal subintervals of the open sampling window.
pub fn x_grid(profile: &Profile, count: usize, x_cap: f64) -> Vec<f64> {
    let (lo, hi) = x_window(profile, x_cap);
    (0..count)
        .map(|i| lo + (i as f64 + 0.5) * (hi - lo) / count as f64)
        .collect()
}

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while out.len() < count {
        if out
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            out.push(candidate);
        }
        candidate += 1;
    }
    out
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut factor = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * factor;
        index /= base;
        factor *= inv;
    }
    out
}

/// Rotated Halton points in `[0, 1)^dim`.
pub struct Halton {
    bases: Vec<u64>,
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            bases: primes(dim),
            shift: (0..dim).map(|_| rng.random::<f64>()).collect(),
            index: 0,
        }
    }
}

impl Iterator for Halton {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        self.index += 1;
        let i = self.index;
        Some(
            self.bases
                .iter()
                .zip(&self.shift)
                .map(|(&b, &s)| (radical_inverse(i, b) + s).fract())
                .collect(),
        )
    }
}

/// Maps `2m` uniforms to a unit vector in `C^m`.
pub(crate) fn unit_direction(uniforms: &[f64]) -> Vec<C64> {
    let mut out: Vec<C64> = uniforms
        .chunks(2)
        .map(|uv| {
            let r = (-2.0 * uv[0].max(1e-300).ln()).sqrt();
            let t = std::f64::consts::TAU * uv[1];
            C64::new(r * t.cos(), r * t.sin())
        })
        .collect();
    let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        out.iter_mut().for_each(|z| *z /= norm);
    } else {
        out[0] = C64::new(1.0, 0.0);
    }
    out
}

/// Quasi-random interior points of `D_F` with `A >= a_margin * F(0)`.
pub fn sample_interior(profile: &Profile, n: usize, spec: &GridSpec) -> Result<Vec<DomainPoint>> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::Argument(format!("n must be >= 2, got {n}")));
    }
    let (lo, hi) = x_window(profile, spec.x_cap);
    let hi = hi - 1e-3 * (hi - lo);
    let delta = spec.a_margin * profile.jet(profile.x_min().max(lo))?[0];
    let dim = 3 + 2 * (n - 1);
    let mut out = Vec::with_capacity(spec.points);
    let max_draws = 1000 * spec.points;
    for u in Halton::new(dim, spec.seed).take(max_draws) {
        let x = lo + u[0] * (hi - lo);
        let room = match profile.jet(x) {
            Ok(j) => j[0] - delta,
            Err(_) => continue,
        };
        if room <= 0.0 {
            continue;
        }
        let z0 = C64::from_polar(x.sqrt(), std::f64::consts::TAU * u[1]);
        let radius = (u[2] * room).sqrt();
        let mut coords = Vec::with_capacity(n);
        coords.push(z0);
        coords.extend(unit_direction(&u[3..]).into_iter().map(|d| d * radius));
        if let Ok(p) = DomainPoint::new(coords, profile) {
            out.push(p);
            if out.len() == spec.points {
                return Ok(out);
            }
        }
    }
    Err(Error::NumericFailure(format!(
        "only {} of {} interior points found for {} with a_margin {}",
        out.len(),
        spec.points,
        profile.label(),
        spec.a_margin
    )))
}
