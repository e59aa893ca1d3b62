//! Radial profiles `F: [0, x0) -> (0, inf)` defining Hartogs domains.
//!
//! A profile exposes exact derivatives up to [`MAX_ORDER`]. Built-in families
//! use closed forms; tabulated profiles are differentiated through local
//! interpolating polynomials and are flagged as lower precision.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Highest derivative order any profile must supply.
///
/// The metric needs `F''`, the Ricci correction `L` needs `F''''`, and the
/// derivative of `G = -L F / B` one more.
pub const MAX_ORDER: usize = 5;

/// `F, F', ..., F^(5)` at a single abscissa.
pub type Jet = [f64; MAX_ORDER + 1];

/// Right endpoint `x0` of the profile domain `[0, x0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Endpoint {
    Finite(f64),
    Infinite,
}

impl Endpoint {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Endpoint::Finite(x0) => x < x0,
            Endpoint::Infinite => x.is_finite(),
        }
    }

    /// Upper end of the sampling window: `x0` itself, or `x_cap` when unbounded.
    pub fn capped(&self, x_cap: f64) -> f64 {
        match *self {
            Endpoint::Finite(x0) => x0.min(x_cap),
            Endpoint::Infinite => x_cap,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Endpoint::Finite(x0) => x0,
            Endpoint::Infinite => f64::INFINITY,
        }
    }
}

type DerivFn = dyn Fn(usize, f64) -> f64 + Send + Sync;

/// A profile given by an arbitrary derivative oracle `(k, x) -> F^(k)(x)`.
#[derive(Clone)]
pub struct CustomProfile {
    name: String,
    x0: Endpoint,
    derivs: Arc<DerivFn>,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("name", &self.name)
            .field("x0", &self.x0)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum ProfileKind {
    /// `F(x) = c1 - c2 x`; `c2 = 0` gives the constant profile.
    Linear {
        c1: f64,
        c2: f64,
    },
    /// `F(x) = exp(-scale x)` on `[0, inf)`.
    Exponential {
        scale: f64,
    },
    /// `F(x) = (1 - x)^p` on `[0, 1)`.
    Power {
        p: f64,
    },
    Table(TableProfile),
    Custom(CustomProfile),
}

/// A decreasing radial profile, optionally multiplied by a positive factor.
#[derive(Clone, Debug)]
pub struct Profile {
    kind: ProfileKind,
    factor: f64,
}

impl Profile {
    pub fn linear(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 > 0.0 && c1.is_finite()) || !(c2 >= 0.0 && c2.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "linear profile needs c1 > 0 and c2 >= 0, got c1={c1}, c2={c2}"
            )));
        }
        Ok(Self::from_kind(ProfileKind::Linear { c1, c2 }))
    }

    /// The profile of the unit ball, `F(x) = 1 - x`.
    pub fn hyperbolic() -> Self {
        Self::from_kind(ProfileKind::Linear { c1: 1.0, c2: 1.0 })
    }

    pub fn exponential(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "exponential profile needs scale > 0, got {scale}"
            )));
        }
        Ok(Self::from_kind(ProfileKind::Exponential { scale }))
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "power profile needs p > 0, got {p}"
            )));
        }
        Ok(Self::from_kind(ProfileKind::Power { p }))
    }

    pub fn table(table: TableProfile) -> Self {
        Self::from_kind(ProfileKind::Table(table))
    }

    /// Wraps a derivative oracle. `derivs(k, x)` must return `F^(k)(x)` for
    /// `k = 0..=MAX_ORDER`.
    pub fn custom<F>(name: impl Into<String>, x0: Endpoint, derivs: F) -> Self
    where
        F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_kind(ProfileKind::Custom(CustomProfile {
            name: name.into(),
            x0,
            derivs: Arc::new(derivs),
        }))
    }

    fn from_kind(kind: ProfileKind) -> Self {
        Self { kind, factor: 1.0 }
    }

    /// Returns `lambda * F`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Argument(format!(
                "scale factor must be > 0, got {lambda}"
            )));
        }
        Ok(Self {
            kind: self.kind.clone(),
            factor: self.factor * lambda,
        })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn x0(&self) -> Endpoint {
        match &self.kind {
            ProfileKind::Linear { c1, c2 } => {
                if *c2 == 0.0 {
                    Endpoint::Infinite
                } else {
                    Endpoint::Finite(c1 / c2)
                }
            }
            ProfileKind::Exponential { .. } => Endpoint::Infinite,
            ProfileKind::Power { .. } => Endpoint::Finite(1.0),
            ProfileKind::Table(t) => Endpoint::Finite(t.x_max()),
            ProfileKind::Custom(c) => c.x0,
        }
    }

    /// Smallest abscissa at which the profile may be evaluated.
    pub fn x_min(&self) -> f64 {
        match &self.kind {
            ProfileKind::Table(t) => t.x_min(),
            _ => 0.0,
        }
    }

    /// Tabulated profiles have interpolated derivatives.
    pub fn is_low_precision(&self) -> bool {
        matches!(self.kind, ProfileKind::Table(_))
    }

    /// `true` for the linear family `c1 - c2 x` with `c2 > 0`.
    pub fn is_linear_family(&self) -> bool {
        matches!(self.kind, ProfileKind::Linear { c2, .. } if c2 > 0.0)
    }

    pub fn label(&self) -> String {
        let base = match &self.kind {
            ProfileKind::Linear { c1, c2 } => format!("linear(c1={c1}, c2={c2})"),
            ProfileKind::Exponential { scale } => format!("exp(scale={scale})"),
            ProfileKind::Power { p } => format!("power(p={p})"),
            ProfileKind::Table(t) => format!("table({} nodes)", t.len()),
            ProfileKind::Custom(c) => c.name.clone(),
        };
        if self.factor == 1.0 {
            base
        } else {
            format!("{}*{base}", self.factor)
        }
    }

    /// `F^(k)(x)` without domain checks. Orders above [`MAX_ORDER`] are not
    /// supported and return NaN.
    pub fn deriv(&self, k: usize, x: f64) -> f64 {
        if k > MAX_ORDER {
            return f64::NAN;
        }
        let raw = match &self.kind {
            ProfileKind::Linear { c1, c2 } => match k {
                0 => c1 - c2 * x,
                1 => -c2,
                _ => 0.0,
            },
            ProfileKind::Exponential { scale } => (-scale).powi(k as i32) * (-scale * x).exp(),
            ProfileKind::Power { p } => {
                let mut coef = 1.0;
                for j in 0..k {
                    coef *= -(p - j as f64);
                }
                if coef == 0.0 {
                    0.0
                } else {
                    coef * (1.0 - x).powf(p - k as f64)
                }
            }
            ProfileKind::Table(t) => t.jet(x)[k],
            ProfileKind::Custom(c) => (c.derivs)(k, x),
        };
        self.factor * raw
    }

    pub fn value(&self, x: f64) -> f64 {
        self.deriv(0, x)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !x.is_finite() || x < self.x_min() || !self.x0().contains(x) {
            return Err(Error::Domain(format!(
                "x = {x} outside [{}, {}) for {}",
                self.x_min(),
                self.x0().as_f64(),
                self.label()
            )));
        }
        Ok(())
    }

    /// All derivatives at `x`, checking `x` is in `[0, x0)` and `F(x) > 0`.
    pub fn jet(&self, x: f64) -> Result<Jet> {
        self.check_domain(x)?;
        let jet = match &self.kind {
            ProfileKind::Table(t) => {
                let mut j = t.jet(x);
                j.iter_mut().for_each(|v| *v *= self.factor);
                j
            }
            _ => std::array::from_fn(|k| self.deriv(k, x)),
        };
        if !(jet[0] > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "F({x}) = {} is not positive for {}",
                jet[0],
                self.label()
            )));
        }
        Ok(jet)
    }

    /// `(x F'/F)'(x)`; the profile defines a Kähler metric iff this is
    /// negative on `[0, x0)`.
    pub fn kahler_indicator(&self, x: f64) -> Result<f64> {
        let j = self.jet(x)?;
        Ok(indicator_from_jet(&j, x))
    }

    /// Largest relative mismatch, over `k = 1..=4`, between `F^(k)(x)` and a
    /// central difference of `F^(k-1)` with the given step.
    pub fn derivative_consistency(&self, x: f64, step: f64) -> Result<f64> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Argument(format!("step must be > 0, got {step}")));
        }
        for probe in [x - 2.0 * step, x + 2.0 * step] {
            if probe <= self.x_min() || !self.x0().contains(probe) {
                return Err(Error::Domain(format!(
                    "stencil point {probe} outside ({}, {})",
                    self.x_min(),
                    self.x0().as_f64()
                )));
            }
        }
        let mut worst: f64 = 0.0;
        for k in 1..=4 {
            // Richardson-combined central difference of the next-lower order.
            let d = |h: f64| (self.deriv(k - 1, x + h) - self.deriv(k - 1, x - h)) / (2.0 * h);
            let estimate = (4.0 * d(step) - d(2.0 * step)) / 3.0;
            let exact = self.deriv(k, x);
            worst = worst.max((estimate - exact).abs() / (1.0 + exact.abs()));
        }
        Ok(worst)
    }
}

/// `(x F'/F)'` from a jet.
pub(crate) fn indicator_from_jet(j: &Jet, x: f64) -> f64 {
    let (f, f1, f2) = (j[0], j[1], j[2]);
    (f1 + x * f2) / f - x * f1 * f1 / (f * f)
}

/// Number of nodes in each local interpolation window.
const TABLE_WINDOW: usize = 8;

/// A profile sampled at strictly increasing abscissae.
///
/// Derivatives come from the degree-7 polynomial through the eight nodes
/// nearest the evaluation point.
#[derive(Clone, Debug)]
pub struct TableProfile {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl TableProfile {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::InvalidProfile(
                "table columns differ in length".into(),
            ));
        }
        if xs.len() < TABLE_WINDOW {
            return Err(Error::InvalidProfile(format!(
                "table needs at least {TABLE_WINDOW} rows, got {}",
                xs.len()
            )));
        }
        if xs.iter().chain(&fs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(
                "table contains non-finite values".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile(
                "table x column must be strictly increasing".into(),
            ));
        }
        if xs[0] < 0.0 {
            return Err(Error::InvalidProfile(
                "table x column must be nonnegative".into(),
            ));
        }
        Ok(Self { xs, fs })
    }

    /// Reads `x,F` pairs. A header row is allowed if it does not parse as numbers.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let (mut xs, mut fs) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::InvalidProfile(format!(
                    "table row {} has {} columns, expected 2",
                    i + 1,
                    rec.len()
                )));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(x), Ok(f)) => {
                    xs.push(x);
                    fs.push(f);
                }
                _ if i == 0 => continue,
                _ => {
                    return Err(Error::InvalidProfile(format!(
                        "table row {} is not numeric",
                        i + 1
                    )))
                }
            }
        }
        Self::new(xs, fs)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    fn window(&self, x: f64) -> std::ops::Range<usize> {
        let idx = self.xs.partition_point(|&v| v < x);
        let start = idx
            .saturating_sub(TABLE_WINDOW / 2)
            .min(self.xs.len() - TABLE_WINDOW);
        start..start + TABLE_WINDOW
    }

    /// Taylor coefficients of the local interpolant, turned into derivatives.
    fn jet(&self, x: f64) -> Jet {
        let w = self.window(x);
        let nodes = &self.xs[w.clone()];
        let mut dd: Vec<f64> = self.fs[w].to_vec();
        // Newton divided differences, in place.
        for level in 1..nodes.len() {
            for i in (level..nodes.len()).rev() {
                dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
            }
        }
        // Expand the Newton form in powers of (t - x) by nested multiplication.
        let m = nodes.len();
        let mut taylor = vec![0.0; m];
        taylor[0] = dd[m - 1];
        for j in (0..m - 1).rev() {
            let shift = x - nodes[j];
            for k in (1..m).rev() {
                taylor[k] = taylor[k - 1] + shift * taylor[k];
            }
            taylor[0] = shift * taylor[0] + dd[j];
        }
        let mut out = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, slot) in out.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *slot = taylor.get(k).copied().unwrap_or(0.0) * fact;
        }
        out
    }
}
