//! Grid sweeps comparing every closed form with its numerical route.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{
    generalized_scalars_closed, generalized_scalars_poly, ricci_closed_form, ricci_numeric,
    scalar_by_contraction, scalar_curvature_routes, CurvatureRecord,
};
use crate::error::Result;
use crate::geometry::{
    coefficient_bundle, det_closed_form, inverse_metric_closed_form, metric_closed_form,
    metric_numeric, DomainPoint, HermitianMatrix,
};
use crate::grid::{sample_interior, GridSpec};
use crate::profile::Profile;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Metric against the potential Hessian, relative to `1 + max |h|`.
    pub oracle: f64,
    /// Ricci against `-d dbar log det h`, absolute.
    pub ricci: f64,
    /// Algebraic identities: determinant, inverse, contraction, `rho_k` routes.
    pub identity: f64,
    pub extremal: f64,
    pub classify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            oracle: 1e-5,
            ricci: 1e-4,
            identity: 1e-8,
            extremal: 1e-5,
            classify: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

/// Largest value of a per-point error together with where it occurs.
#[derive(Clone, Debug, Serialize)]
pub struct Extreme {
    pub value: f64,
    pub point: DomainPoint,
}

fn extreme(points: &[DomainPoint], values: &[f64]) -> Extreme {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] || values[best].is_nan() {
            best = i;
        }
    }
    Extreme {
        value: values[best],
        point: points[best].clone(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricSweep {
    pub profile: String,
    pub n: usize,
    pub points: usize,
    /// `max |h - Hess Phi| / (1 + max |h|)`
    pub metric_error: Extreme,
    /// `|det_closed - det(h)| / |det_closed|`
    pub det_error: Extreme,
    /// `max |h h^{-1} - I|`
    pub inverse_error: Extreme,
    /// Points where positive definiteness and `(x F'/F)' < 0` disagree.
    pub positivity_mismatches: usize,
    /// Every sampled `x` has a negative Kähler indicator.
    pub admissible: bool,
    pub verdict: Verdict,
}

struct MetricRow {
    metric: f64,
    det: f64,
    inverse: f64,
    mismatch: bool,
    admissible: bool,
}

fn metric_row(p: &DomainPoint, profile: &Profile, step: f64) -> Result<MetricRow> {
    let h = metric_closed_form(p, profile)?;
    let num = metric_numeric(p, profile, step)?;
    let det = det_closed_form(p, profile)?;
    let inv = inverse_metric_closed_form(p, profile)?;
    let prod = HermitianMatrix::from_matrix(h.as_matrix() * inv.as_matrix());
    let indicator = profile.kahler_indicator(p.x())?;
    Ok(MetricRow {
        metric: h.max_abs_diff(&num) / (1.0 + h.max_abs()),
        det: (det - h.det()).abs() / det.abs(),
        inverse: prod.max_abs_diff(&HermitianMatrix::identity(p.dim())),
        mismatch: h.is_positive_definite() != (indicator < 0.0),
        admissible: indicator < 0.0,
    })
}

pub fn metric_sweep(
    profile: &Profile,
    n: usize,
    grid: &GridSpec,
    step: f64,
    tol: &Tolerances,
) -> Result<MetricSweep> {
    let points = sample_interior(profile, n, grid)?;
    let rows: Vec<MetricRow> = points
        .par_iter()
        .map(|p| metric_row(p, profile, step))
        .collect::<Result<_>>()?;
    let col = |f: fn(&MetricRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let metric_error = extreme(&points, &col(|r| r.metric));
    let det_error = extreme(&points, &col(|r| r.det));
    let inverse_error = extreme(&points, &col(|r| r.inverse));
    let positivity_mismatches = rows.iter().filter(|r| r.mismatch).count();
    let ok = metric_error.value <= tol.oracle
        && det_error.value <= tol.identity
        && inverse_error.value <= tol.identity
        && positivity_mismatches == 0;
    Ok(MetricSweep {
        profile: profile.label(),
        n,
        points: points.len(),
        metric_error,
        det_error,
        inverse_error,
        positivity_mismatches,
        admissible: rows.iter().all(|r| r.admissible),
        verdict: Verdict::from_bool(ok),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureSweep {
    pub profile: String,
    pub n: usize,
    pub points: usize,
    /// `max |Ric_closed - Ric_numeric|`
    pub ricci_error: Extreme,
    /// `max |Ric + (n+1) h|`, reported for linear profiles only.
    pub einstein_error: Option<Extreme>,
    /// Gap between the two closed-form scalar curvature routes.
    pub scal_route_gap: f64,
    /// `|trace(h^{-1} Ric) - scal| / (1 + |scal|)`
    pub contraction_error: Extreme,
    /// `max_k |rho_k(poly) - rho_k(closed)| / (1 + |rho_k|)`
    pub rho_error: Extreme,
    pub scal_min: f64,
    pub scal_max: f64,
    pub verdict: Verdict,
    pub records: Vec<CurvatureRecord>,
}

struct CurvatureRow {
    ricci: f64,
    einstein: f64,
    route_gap: f64,
    contraction: f64,
    rho: f64,
    record: CurvatureRecord,
}

/// Step for the Ricci oracle: `log det h` varies on the scale of `A`, so the
/// stencil shrinks near the boundary.
pub fn ricci_step(step: f64, a: f64) -> f64 {
    step * (4.0 * a).min(1.0)
}

fn curvature_row(p: &DomainPoint, profile: &Profile, step: f64) -> Result<CurvatureRow> {
    let ric = ricci_closed_form(p, profile)?;
    let a = profile.value(p.x()) - p.fiber_norm_sqr();
    let num = ricci_numeric(p, profile, ricci_step(step, a))?;
    let h = metric_closed_form(p, profile)?;
    let einstein =
        HermitianMatrix::from_matrix(ric.as_matrix() + h.scale((p.dim() + 1) as f64).as_matrix());
    let (s1, s2) = scalar_curvature_routes(p, profile)?;
    let contracted = scalar_by_contraction(p, profile)?;
    let closed = generalized_scalars_closed(p, profile)?;
    let poly = generalized_scalars_poly(p, profile)?;
    let rho = closed
        .iter()
        .zip(&poly)
        .map(|(c, q)| (c - q).abs() / (1.0 + c.abs()))
        .fold(0.0, f64::max);
    Ok(CurvatureRow {
        ricci: ric.max_abs_diff(&num),
        einstein: einstein.max_abs(),
        route_gap: (s1 - s2).abs(),
        contraction: (contracted - s1).abs() / (1.0 + s1.abs()),
        rho,
        record: CurvatureRecord::at(p, profile)?,
    })
}

pub fn curvature_sweep(
    profile: &Profile,
    n: usize,
    grid: &GridSpec,
    step: f64,
    tol: &Tolerances,
) -> Result<CurvatureSweep> {
    let points = sample_interior(profile, n, grid)?;
    let rows: Vec<CurvatureRow> = points
        .par_iter()
        .map(|p| curvature_row(p, profile, step))
        .collect::<Result<_>>()?;
    let col = |f: fn(&CurvatureRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let ricci_error = extreme(&points, &col(|r| r.ricci));
    let einstein_error = profile
        .is_linear_family()
        .then(|| extreme(&points, &col(|r| r.einstein)));
    let contraction_error = extreme(&points, &col(|r| r.contraction));
    let rho_error = extreme(&points, &col(|r| r.rho));
    let scal_route_gap = rows.iter().map(|r| r.route_gap).fold(0.0, f64::max);
    let scal_min = rows
        .iter()
        .map(|r| r.record.scal)
        .fold(f64::INFINITY, f64::min);
    let scal_max = rows
        .iter()
        .map(|r| r.record.scal)
        .fold(f64::NEG_INFINITY, f64::max);
    let ok = ricci_error.value <= tol.ricci
        && einstein_error
            .as_ref()
            .is_none_or(|e| e.value <= tol.identity)
        && contraction_error.value <= tol.identity
        && rho_error.value <= tol.identity;
    Ok(CurvatureSweep {
        profile: profile.label(),
        n,
        points: points.len(),
        ricci_error,
        einstein_error,
        scal_route_gap,
        contraction_error,
        rho_error,
        scal_min,
        scal_max,
        verdict: Verdict::from_bool(ok),
        records: rows.into_iter().map(|r| r.record).collect(),
    })
}

/// One row of a grid dump.
#[derive(Clone, Debug)]
pub struct GridRow {
    pub point: DomainPoint,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub l: f64,
    pub g: f64,
    pub det: f64,
    pub min_eig: f64,
}

pub fn grid_rows(profile: &Profile, n: usize, grid: &GridSpec) -> Result<Vec<GridRow>> {
    sample_interior(profile, n, grid)?
        .into_par_iter()
        .map(|p| {
            let cb = coefficient_bundle(&p, profile)?;
            let h = metric_closed_form(&p, profile)?;
            Ok(GridRow {
                a: cb.a,
                b: cb.b,
                c: cb.c,
                l: cb.l,
                g: cb.g,
                det: det_closed_form(&p, profile)?,
                min_eig: h.min_eigenvalue(),
                point: p,
            })
        })
        .collect()
}

/// Header of a grid dump: `z0_re, z0_im, ..., A, B, C, L, G, det, min_eig`.
pub fn grid_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = (0..n)
        .flat_map(|k| [format!("z{k}_re"), format!("z{k}_im")])
        .collect();
    h.extend(["A", "B", "C", "L", "G", "det", "min_eig"].map(String::from));
    h
}

pub fn write_grid_csv<W: std::io::Write>(rows: &[GridRow], n: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(grid_header(n))?;
    for r in rows {
        let mut rec: Vec<String> = r
            .point
            .coords()
            .iter()
            .flat_map(|z| [z.re.to_string(), z.im.to_string()])
            .collect();
        rec.extend([r.a, r.b, r.c, r.l, r.g, r.det, r.min_eig].map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column CSV with the given header.
pub fn write_curve_csv<W: std::io::Write>(
    header: [&str; 2],
    rows: &[(f64, f64)],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for (x, y) in rows {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
