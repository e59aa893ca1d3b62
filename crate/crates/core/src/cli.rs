//! Config-driven pipelines behind the `hartogs` binary.
//!
//! A run reads a TOML config, executes one command, writes a JSON report
//! that embeds the resolved config, and optionally a grid dump and curve
//! CSVs. Relative paths in the config resolve against its directory.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classification::{classify, ClassVerdict, ClassificationReport, ClassifyOptions};
use crate::curvature::scalar_curvature;
use crate::error::{Error, Result};
use crate::extremal::{extremal_test, ExtremalOptions, ExtremalReport, ExtremalVerdict};
use crate::geometry::{DomainPoint, RadialCoefficients, DEFAULT_STEP};
use crate::grid::{x_grid, GridSpec};
use crate::profile::{Profile, TableProfile};
use crate::pseudoconvexity::{
    equivalence_check_with, EquivalenceOptions, EquivalenceReport, EquivalenceVerdict,
};
use crate::sweep::{
    curvature_sweep, grid_rows, metric_sweep, write_curve_csv, write_grid_csv, CurvatureSweep,
    MetricSweep, Tolerances, Verdict,
};
use crate::C64;

pub const SCHEMA: u32 = 1;

/// Exit status for a successful run whose verdict matched.
pub const EXIT_OK: i32 = 0;
/// Verdict mismatch or a failure while computing.
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckKahler,
    CurvatureReport,
    ExtremalTest,
    PseudoconvexityTest,
    Classify,
    FullSuite,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::CheckKahler => "check-kahler",
            Command::CurvatureReport => "curvature-report",
            Command::ExtremalTest => "extremal-test",
            Command::PseudoconvexityTest => "pseudoconvexity-test",
            Command::Classify => "classify",
            Command::FullSuite => "full-suite",
        }
    }

    fn verdicts(&self) -> &'static [&'static str] {
        match self {
            Command::CheckKahler | Command::CurvatureReport | Command::FullSuite => {
                &["PASS", "FAIL"]
            }
            Command::ExtremalTest => &["EXTREMAL", "NOT_EXTREMAL"],
            Command::PseudoconvexityTest => &["CONSISTENT", "INCONSISTENT"],
            Command::Classify => &["HYPERBOLIC", "NON_CONSTANT_CURVATURE", "INCONSISTENT"],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `F = c1 - c2 x`
    Linear { c1: f64, c2: f64 },
    /// `F = exp(-scale x)`
    Exp {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `F = (1 - x)^p`
    Power { p: f64 },
    /// CSV of `(x, F)` rows.
    Table { path: String },
}

fn one() -> f64 {
    1.0
}

impl ProfileSpec {
    pub fn build(&self, base: &Path) -> Result<Profile> {
        let built = match self {
            ProfileSpec::Linear { c1, c2 } => Profile::linear(*c1, *c2),
            ProfileSpec::Exp { scale } => Profile::exponential(*scale),
            ProfileSpec::Power { p } => Profile::power(*p),
            ProfileSpec::Table { path } => {
                TableProfile::from_csv_path(base.join(path)).map(Profile::table)
            }
        };
        built.map_err(|e| Error::Config(format!("profile: {e}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSpec {
    /// Output for `x, L`.
    pub l: Option<String>,
    /// Output for `x, scal` along `z = (sqrt(x), 0, ..., 0)`.
    pub scal: Option<String>,
    #[serde(default = "default_plot_points")]
    pub points: usize,
}

fn default_plot_points() -> usize {
    100
}

fn default_n() -> usize {
    2
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

fn default_samples() -> usize {
    500
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Required except for `full-suite`, which appends it to the built-ins.
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_step")]
    pub fd_step: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Boundary samples for the pseudoconvexity test.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub output: Option<String>,
    /// Expected verdict; defaults depend on the command and the profile.
    #[serde(default)]
    pub expect: Option<String>,
    /// Grid dump destination.
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub plot: Option<PlotSpec>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = dir.into();
        self
    }

    pub fn resolve(&self, path: &str) -> PathBuf {
        self.base_dir.join(path)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 2 {
            return bad(format!("n must be >= 2, got {}", self.n));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return bad(format!("fd_step must be positive, got {}", self.fd_step));
        }
        self.grid
            .validate()
            .map_err(|e| Error::Config(format!("grid: {e}")))?;
        let t = &self.tolerances;
        if [t.oracle, t.ricci, t.identity, t.extremal, t.classify]
            .iter()
            .any(|v| !(*v > 0.0 && v.is_finite()))
        {
            return bad("tolerances must be positive".into());
        }
        if self.samples == 0 {
            return bad("samples must be >= 1".into());
        }
        if self.profile.is_none() && self.command != Command::FullSuite {
            return bad("missing [profile] section".into());
        }
        if let Some(e) = &self.expect {
            if !self.command.verdicts().contains(&e.as_str()) {
                return bad(format!(
                    "expect = {e:?} is not a verdict of this command ({})",
                    self.command.verdicts().join(", ")
                ));
            }
        }
        if let Some(p) = &self.plot {
            if p.points == 0 {
                return bad("plot.points must be >= 1".into());
            }
        }
        Ok(())
    }

    fn profile(&self) -> Result<Option<Profile>> {
        self.profile
            .as_ref()
            .map(|s| s.build(&self.base_dir))
            .transpose()
    }
}

/// One profile's line in a full-suite report.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteEntry {
    pub profile: String,
    pub linear: bool,
    pub kahler: Verdict,
    pub metric_error: f64,
    pub curvature: Verdict,
    pub ricci_error: f64,
    pub extremal: ExtremalVerdict,
    pub max_residual: f64,
    pub pseudoconvexity: EquivalenceVerdict,
    pub min_levi: f64,
    pub classification: ClassVerdict,
    pub max_abs_l: f64,
    /// Extremal and hyperbolic exactly when linear, every other check passing.
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub n: usize,
    pub entries: Vec<SuiteEntry>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum RunResult {
    Kahler(MetricSweep),
    Curvature(CurvatureSweep),
    Extremal(ExtremalReport),
    Pseudoconvexity(EquivalenceReport),
    Classify(ClassificationReport),
    Suite(SuiteReport),
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: Command,
    pub verdict: String,
    pub expected: String,
    pub config: RunConfig,
    pub result: RunResult,
}

impl Report {
    pub fn matches(&self) -> bool {
        self.verdict == self.expected
    }

    pub fn status(&self) -> i32 {
        if self.matches() {
            EXIT_OK
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn builtin_profiles() -> Vec<Profile> {
    vec![
        Profile::hyperbolic(),
        Profile::linear(2.0, 0.5).expect("valid"),
        Profile::exponential(1.0).expect("valid"),
        Profile::power(2.0).expect("valid"),
    ]
}

fn extremal_options(cfg: &RunConfig) -> ExtremalOptions {
    ExtremalOptions {
        step: cfg.fd_step,
        threshold: cfg.tolerances.extremal,
        ..ExtremalOptions::default()
    }
}

fn equivalence_options(cfg: &RunConfig) -> EquivalenceOptions {
    EquivalenceOptions {
        n: cfg.n,
        x_cap: cfg.grid.x_cap,
        ..EquivalenceOptions::default()
    }
}

fn classify_options(cfg: &RunConfig) -> ClassifyOptions {
    ClassifyOptions {
        tol: cfg.tolerances.classify,
        ..ClassifyOptions::default()
    }
}

fn suite_entry(cfg: &RunConfig, profile: &Profile) -> Result<SuiteEntry> {
    let (n, grid, tol) = (cfg.n, &cfg.grid, &cfg.tolerances);
    let metric = metric_sweep(profile, n, grid, cfg.fd_step, tol)?;
    let curv = curvature_sweep(profile, n, grid, cfg.fd_step, tol)?;
    let ext = extremal_test(profile, n, grid, &extremal_options(cfg))?;
    let eq = equivalence_check_with(profile, cfg.samples, grid.seed, &equivalence_options(cfg))?;
    let class = classify(profile, n, grid, &classify_options(cfg))?;
    let linear = profile.is_linear_family();
    let consistent = metric.verdict == Verdict::Pass
        && curv.verdict == Verdict::Pass
        && (ext.verdict == ExtremalVerdict::Extremal) == linear
        && eq.verdict == EquivalenceVerdict::Consistent
        && (class.verdict == ClassVerdict::Hyperbolic) == linear
        && class.verdict != ClassVerdict::Inconsistent;
    Ok(SuiteEntry {
        profile: profile.label(),
        linear,
        kahler: metric.verdict,
        metric_error: metric.metric_error.value,
        curvature: curv.verdict,
        ricci_error: curv.ricci_error.value,
        extremal: ext.verdict,
        max_residual: ext.max_residual,
        pseudoconvexity: eq.verdict,
        min_levi: eq.min_levi,
        classification: class.verdict,
        max_abs_l: class.max_abs_l,
        consistent,
    })
}

/// Executes the configured command; nothing is written to disk.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let profile = cfg.profile()?;
    let linear = profile.as_ref().is_some_and(Profile::is_linear_family);
    let (n, grid, tol) = (cfg.n, &cfg.grid, &cfg.tolerances);
    let (result, verdict, default_expect): (RunResult, &str, &str) = match (cfg.command, &profile) {
        (Command::FullSuite, _) => {
            let mut profiles = builtin_profiles();
            profiles.extend(profile.clone());
            let entries = profiles
                .iter()
                .map(|p| suite_entry(cfg, p))
                .collect::<Result<Vec<_>>>()?;
            let ok = entries.iter().all(|e| e.consistent);
            (
                RunResult::Suite(SuiteReport { n, entries }),
                Verdict::from_bool(ok).as_str(),
                "PASS",
            )
        }
        (_, None) => return Err(Error::Config("missing [profile] section".into())),
        (Command::CheckKahler, Some(p)) => {
            let r = metric_sweep(p, n, grid, cfg.fd_step, tol)?;
            let v = r.verdict.as_str();
            (RunResult::Kahler(r), v, "PASS")
        }
        (Command::CurvatureReport, Some(p)) => {
            let r = curvature_sweep(p, n, grid, cfg.fd_step, tol)?;
            let v = r.verdict.as_str();
            (RunResult::Curvature(r), v, "PASS")
        }
        (Command::ExtremalTest, Some(p)) => {
            let r = extremal_test(p, n, grid, &extremal_options(cfg))?;
            let v = r.verdict.as_str();
            let e = if linear { "EXTREMAL" } else { "NOT_EXTREMAL" };
            (RunResult::Extremal(r), v, e)
        }
        (Command::PseudoconvexityTest, Some(p)) => {
            let r = equivalence_check_with(p, cfg.samples, grid.seed, &equivalence_options(cfg))?;
            let v = r.verdict.as_str();
            (RunResult::Pseudoconvexity(r), v, "CONSISTENT")
        }
        (Command::Classify, Some(p)) => {
            let r = classify(p, n, grid, &classify_options(cfg))?;
            let v = r.verdict.as_str();
            let e = if linear {
                "HYPERBOLIC"
            } else {
                "NON_CONSTANT_CURVATURE"
            };
            (RunResult::Classify(r), v, e)
        }
    };
    Ok(Report {
        schema: SCHEMA,
        command: cfg.command,
        verdict: verdict.to_string(),
        expected: cfg
            .expect
            .clone()
            .unwrap_or_else(|| default_expect.to_string()),
        config: cfg.clone(),
        result,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes the grid dump and curve CSVs requested by the config.
pub fn write_side_outputs(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let Some(profile) = cfg.profile()? else {
        return Ok(Vec::new());
    };
    let mut written = Vec::new();
    if let Some(csv) = &cfg.csv {
        let path = cfg.resolve(csv);
        let rows = grid_rows(&profile, cfg.n, &cfg.grid)?;
        write_grid_csv(&rows, cfg.n, create(&path)?)?;
        written.push(path);
    }
    if let Some(plot) = &cfg.plot {
        let xs = x_grid(&profile, plot.points, cfg.grid.x_cap);
        if let Some(l) = &plot.l {
            let rows = xs
                .iter()
                .map(|&x| RadialCoefficients::at(&profile, x).map(|r| (x, r.l)))
                .collect::<Result<Vec<_>>>()?;
            let path = cfg.resolve(l);
            write_curve_csv(["x", "L"], &rows, create(&path)?)?;
            written.push(path);
        }
        if let Some(s) = &plot.scal {
            let rows = xs
                .iter()
                .map(|&x| {
                    let mut z = vec![C64::new(0.0, 0.0); cfg.n];
                    z[0] = C64::new(x.sqrt(), 0.0);
                    let p = DomainPoint::new(z, &profile)?;
                    Ok((x, scalar_curvature(&p, &profile)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let path = cfg.resolve(s);
            write_curve_csv(["x", "scal"], &rows, create(&path)?)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Entry point shared by the binary and tests; returns the exit status.
pub fn execute(config: &Path, output: Option<&Path>, quiet: bool) -> i32 {
    let cfg = match RunConfig::load(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hartogs: {e}");
            return EXIT_CONFIG;
        }
    };
    let out = match (output, &cfg.output) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => cfg.resolve(p),
        (None, None) => {
            eprintln!("hartogs: config error: no output path (set `output` or pass --output)");
            return EXIT_CONFIG;
        }
    };
    let outcome = run(&cfg).and_then(|report| {
        let mut w = create(&out)?;
        w.write_all(report.to_json()?.as_bytes())?;
        w.flush()?;
        write_side_outputs(&cfg)?;
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            if !quiet {
                println!(
                    "{}: {} (expected {}) -> {}",
                    report.command.as_str(),
                    report.verdict,
                    report.expected,
                    out.display()
                );
            }
            report.status()
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("hartogs: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("hartogs: {e}");
            EXIT_FAIL
        }
    }
}
