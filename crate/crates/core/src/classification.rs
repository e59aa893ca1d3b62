//! Constant holomorphic sectional curvature test.
//!
//! `F(x) = c1 - c2 x` makes `D_F` a rescaled unit ball, and `h_F` is the
//! pullback of the ball metric by the diagonal map
//! `(z_0, z_k) -> (z_0 / sqrt(c1 / c2), z_k / sqrt(c1))`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::generalized_scalars_closed;
use crate::error::{Error, Result};
use crate::extremal::{extremal_test, ExtremalOptions, ExtremalVerdict};
use crate::geometry::{metric_closed_form, DomainPoint, HermitianMatrix, RadialCoefficients};
use crate::grid::{sample_interior, x_grid, GridSpec};
use crate::profile::Profile;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HyperbolicMap {
    pub c1: f64,
    pub c2: f64,
}

impl HyperbolicMap {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite()) {
            return Err(Error::Argument(format!(
                "need c1 > 0 and c2 > 0, got ({c1}, {c2})"
            )));
        }
        Ok(Self { c1, c2 })
    }

    fn scales(&self, n: usize) -> Vec<f64> {
        let mut s = vec![1.0 / self.c1.sqrt(); n];
        s[0] = (self.c2 / self.c1).sqrt();
        s
    }

    pub fn apply(&self, z: &[C64]) -> Vec<C64> {
        z.iter()
            .zip(self.scales(z.len()))
            .map(|(v, s)| v * s)
            .collect()
    }

    /// Holomorphic Jacobian; `[a][b] = d w_a / d z_b`.
    pub fn jacobian(&self, n: usize) -> DMatrix<C64> {
        let s = self.scales(n);
        DMatrix::from_fn(n, n, |a, b| {
            if a == b {
                C64::new(s[a], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `J^T g(phi(z)) J̄`, the metric induced on `D_F`.
    pub fn pullback(&self, z: &[C64]) -> Result<HermitianMatrix> {
        let g = hyperbolic_metric(&self.apply(z))?;
        let j = self.jacobian(z.len());
        Ok(HermitianMatrix::from_matrix(
            j.transpose() * g.as_matrix() * j.map(|v| v.conj()),
        ))
    }
}

/// `d dbar (-log(1 - |w|^2))` on the unit ball.
pub fn hyperbolic_metric(w: &[C64]) -> Result<HermitianMatrix> {
    let r = 1.0 - w.iter().map(|v| v.norm_sqr()).sum::<f64>();
    if !(r > 0.0) {
        return Err(Error::Domain(format!(
            "point outside the unit ball (1 - |w|^2 = {r})"
        )));
    }
    Ok(HermitianMatrix::from_fn(w.len(), |a, b| {
        let delta = if a == b { r } else { 0.0 };
        (w[a].conj() * w[b] + delta) / (r * r)
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct PullbackReport {
    pub c1: f64,
    pub c2: f64,
    pub n: usize,
    pub points: usize,
    /// `max |pullback - h_F| / (1 + max |h_F|)` over the grid.
    pub max_error: f64,
    pub argmax_point: DomainPoint,
    pub passed: bool,
}

/// Compares the closed-form metric of `F = c1 - c2 x` with the ball pullback.
pub fn pullback_check(
    c1: f64,
    c2: f64,
    n: usize,
    grid: &GridSpec,
    tol: f64,
) -> Result<PullbackReport> {
    let map = HyperbolicMap::new(c1, c2)?;
    let profile = Profile::linear(c1, c2)?;
    let points = sample_interior(&profile, n, grid)?;
    let errors: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let h = metric_closed_form(p, &profile)?;
            let pb = map.pullback(p.coords())?;
            Ok(h.max_abs_diff(&pb) / (1.0 + h.max_abs()))
        })
        .collect::<Result<_>>()?;
    let (best, &max_error) =
        errors.iter().enumerate().fold(
            (0, &errors[0]),
            |acc, (i, e)| if *e > *acc.1 { (i, e) } else { acc },
        );
    Ok(PullbackReport {
        c1,
        c2,
        n,
        points: points.len(),
        max_error,
        argmax_point: points[best].clone(),
        passed: max_error <= tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassVerdict {
    Hyperbolic,
    NonConstantCurvature,
    Inconsistent,
}

impl ClassVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassVerdict::Hyperbolic => "HYPERBOLIC",
            ClassVerdict::NonConstantCurvature => "NON_CONSTANT_CURVATURE",
            ClassVerdict::Inconsistent => "INCONSISTENT",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassifyOptions {
    /// Bound on `|L|` and on the relative linear-fit and pullback errors.
    pub tol: f64,
    /// Radial samples for `L` and the linear fit.
    pub x_points: usize,
    /// Interior points used for the curvature and extremal summaries.
    pub summary_points: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            x_points: 200,
            summary_points: 40,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearFit {
    pub c1: f64,
    pub c2: f64,
    /// `max |F - (c1 - c2 x)| / (1 + |F|)` over the radial grid.
    pub max_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalSummary {
    pub max_residual: f64,
    pub max_abs_r1: f64,
    pub max_abs_r2: f64,
    pub verdict: ExtremalVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub profile: String,
    pub n: usize,
    pub options: ClassifyOptions,
    pub max_abs_l: f64,
    pub argmax_l_x: f64,
    pub fit: Option<LinearFit>,
    pub pullback: Option<PullbackReport>,
    /// `max - min` of each generalized scalar curvature over the summary points.
    pub rho_spread: Vec<f64>,
    pub extremal: Option<ExtremalSummary>,
    pub verdict: ClassVerdict,
}

/// Decides whether `D_F` carries a metric of constant holomorphic sectional
/// curvature by checking `L = 0`, fitting `F` to a line and confirming the
/// ball pullback.
pub fn classify(
    profile: &Profile,
    n: usize,
    grid: &GridSpec,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    if opts.x_points == 0 || opts.summary_points == 0 {
        return Err(Error::Argument(
            "classification needs at least one sample".into(),
        ));
    }
    let xs = x_grid(profile, opts.x_points, grid.x_cap);
    let ls: Vec<f64> = xs
        .iter()
        .map(|&x| RadialCoefficients::at(profile, x).map(|r| r.l))
        .collect::<Result<_>>()?;
    let mut arg = 0;
    for (i, l) in ls.iter().enumerate() {
        if l.abs() > ls[arg].abs() {
            arg = i;
        }
    }
    let max_abs_l = ls[arg].abs();

    let summary_grid = GridSpec {
        points: opts.summary_points.min(grid.points),
        ..*grid
    };
    let points = sample_interior(profile, n, &summary_grid)?;
    let rho_spread = rho_spread(&points, profile)?;

    let mut report = ClassificationReport {
        profile: profile.label(),
        n,
        options: *opts,
        max_abs_l,
        argmax_l_x: xs[arg],
        fit: None,
        pullback: None,
        rho_spread,
        extremal: None,
        verdict: ClassVerdict::Inconsistent,
    };

    if max_abs_l > opts.tol {
        let ext = extremal_test(profile, n, &summary_grid, &ExtremalOptions::default())?;
        report.extremal = Some(ExtremalSummary {
            max_residual: ext.max_residual,
            max_abs_r1: ext.max_abs_r1,
            max_abs_r2: ext.max_abs_r2,
            verdict: ext.verdict,
        });
        report.verdict = ClassVerdict::NonConstantCurvature;
        return Ok(report);
    }

    let fit = fit_line(profile, &xs)?;
    if fit.max_error <= opts.tol && fit.c1 > 0.0 && fit.c2 > 0.0 {
        let pb = pullback_check(fit.c1, fit.c2, n, grid, opts.tol)?;
        if pb.passed {
            report.verdict = ClassVerdict::Hyperbolic;
        }
        report.pullback = Some(pb);
    }
    report.fit = Some(fit);
    Ok(report)
}

fn fit_line(profile: &Profile, xs: &[f64]) -> Result<LinearFit> {
    let x_ref = profile.x_min();
    let j = profile.jet(x_ref)?;
    let c2 = -j[1];
    let c1 = j[0] + c2 * x_ref;
    let mut max_error: f64 = 0.0;
    for &x in xs {
        let f = profile.jet(x)?[0];
        max_error = max_error.max((f - (c1 - c2 * x)).abs() / (1.0 + f.abs()));
    }
    Ok(LinearFit { c1, c2, max_error })
}

fn rho_spread(points: &[DomainPoint], profile: &Profile) -> Result<Vec<f64>> {
    let rhos: Vec<Vec<f64>> = points
        .par_iter()
        .map(|p| generalized_scalars_closed(p, profile))
        .collect::<Result<_>>()?;
    let len = rhos.first().map_or(0, Vec::len);
    Ok((0..len)
        .map(|k| {
            let (lo, hi) = rhos
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[k]), hi.max(r[k]))
                });
            hi - lo
        })
        .collect())
}
