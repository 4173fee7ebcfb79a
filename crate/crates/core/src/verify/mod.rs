//! Verification suite: exact identity residuals, quadrature checks of the
//! orthogonality and moment relations, and truncation checks of the
//! expansions.
//!
//! [`run_suite`] expands a [`SuiteConfig`] into independent jobs, runs them
//! (in parallel with the `parallel` feature) and returns the reports in a
//! deterministic order.

pub mod checks;
pub mod identities;
pub mod quadrature;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::awpoly::CondDensityParams;
use crate::error::{Error, Result};
use crate::qcore::{QParam, TruncationPolicy};
use checks::ExactGrid;

/// Outcome of one check at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    pub fn new(name: &str, params: &[(&str, f64)], residual: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            error: None,
        }
    }

    /// A failing report carrying the error raised by the check.
    pub fn failed(name: &str, params: &[(&str, f64)], tolerance: f64, err: &Error) -> Self {
        CheckReport {
            error: Some(err.to_string()),
            pass: false,
            ..CheckReport::new(name, params, f64::INFINITY, tolerance)
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(
            f,
            "{} {} [{}] residual={:.3e} tol={:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            params.join(" "),
            self.residual,
            self.tolerance
        )?;
        if let Some(e) = &self.error {
            write!(f, " error: {e}")?;
        }
        Ok(())
    }
}

/// Named check families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckName {
    ExactIdentities,
    Representation,
    Normalization,
    OrthogonalityH,
    CondExpectation,
    OrthogonalityP,
    ChapmanKolmogorov,
    SnSeries,
    AwOrthogonality,
    Vnm,
    Moments,
    Collapses,
    Expansion,
    RatioBounds,
    Bounds,
}

impl CheckName {
    pub const ALL: [CheckName; 15] = [
        CheckName::ExactIdentities,
        CheckName::Representation,
        CheckName::Normalization,
        CheckName::OrthogonalityH,
        CheckName::CondExpectation,
        CheckName::OrthogonalityP,
        CheckName::ChapmanKolmogorov,
        CheckName::SnSeries,
        CheckName::AwOrthogonality,
        CheckName::Vnm,
        CheckName::Moments,
        CheckName::Collapses,
        CheckName::Expansion,
        CheckName::RatioBounds,
        CheckName::Bounds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::ExactIdentities => "exact_identities",
            CheckName::Representation => "representation",
            CheckName::Normalization => "normalization",
            CheckName::OrthogonalityH => "orthogonality_H",
            CheckName::CondExpectation => "cond_expectation",
            CheckName::OrthogonalityP => "orthogonality_P",
            CheckName::ChapmanKolmogorov => "chapman_kolmogorov",
            CheckName::SnSeries => "sn_series",
            CheckName::AwOrthogonality => "aw_orthogonality",
            CheckName::Vnm => "Vnm",
            CheckName::Moments => "moments",
            CheckName::Collapses => "collapses",
            CheckName::Expansion => "expansion",
            CheckName::RatioBounds => "ratio_bounds",
            CheckName::Bounds => "bounds",
        }
    }

    /// Default pass threshold.
    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckName::ExactIdentities => 0.0,
            CheckName::Representation => 1e-10,
            CheckName::Normalization => 1e-9,
            CheckName::OrthogonalityH | CheckName::CondExpectation | CheckName::OrthogonalityP => 1e-8,
            CheckName::ChapmanKolmogorov | CheckName::AwOrthogonality | CheckName::Moments => 1e-7,
            CheckName::SnSeries => 1e-10,
            CheckName::Vnm => 1e-6,
            CheckName::Collapses => 1e-12,
            CheckName::Expansion => 1e-6,
            CheckName::RatioBounds | CheckName::Bounds => 1e-12,
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .iter()
            .copied()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
                Error::Config(format!("unknown check '{s}'; expected one of {}", names.join(", ")))
            })
    }
}

/// A conditioning point `(y, z)`, either absolute or as multiples of the
/// support half-width `2/sqrt(1-q)` (taken as 2 at `q = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    Absolute(f64, f64),
    Scaled(f64, f64),
}

impl GridPoint {
    pub fn resolve(self, q: QParam) -> (f64, f64) {
        match self {
            GridPoint::Absolute(y, z) => (y, z),
            GridPoint::Scaled(a, b) => {
                let h = if q.is_gaussian_branch() { 2.0 } else { q.support_half_width() };
                (a * h, b * h)
            }
        }
    }
}

/// What to run and where.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub checks: Vec<CheckName>,
    pub q_values: Vec<f64>,
    /// `(rho1, rho2)` pairs; single-correlation checks use every distinct
    /// value appearing in them.
    pub rho_pairs: Vec<(f64, f64)>,
    pub points: Vec<GridPoint>,
    pub nmax: usize,
    /// Overrides every numerical tolerance; exact identities stay at zero.
    pub tol: Option<f64>,
    pub policy: TruncationPolicy,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let rhos = [0.0, 0.3, 0.6];
        SuiteConfig {
            checks: CheckName::ALL.to_vec(),
            q_values: vec![-0.5, 0.0, 0.3, 0.7],
            rho_pairs: rhos.iter().flat_map(|a| rhos.iter().map(move |b| (*a, *b))).collect(),
            points: vec![
                GridPoint::Absolute(0.0, 0.0),
                GridPoint::Absolute(0.5, -0.5),
                GridPoint::Scaled(0.6, -0.3),
            ],
            nmax: 8,
            tol: None,
            policy: TruncationPolicy::default(),
        }
    }
}

impl SuiteConfig {
    /// Same grid with no checks selected.
    pub fn empty() -> Self {
        SuiteConfig {
            checks: Vec::new(),
            ..SuiteConfig::default()
        }
    }

    fn tolerance(&self, c: CheckName) -> f64 {
        match (c, self.tol) {
            (CheckName::ExactIdentities, _) => 0.0,
            (_, Some(t)) => t,
            (_, None) => c.default_tolerance(),
        }
    }

    fn rho_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.rho_pairs.iter().flat_map(|(a, b)| [*a, *b]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

type Job = Box<dyn Fn() -> Vec<CheckReport> + Send + Sync>;

fn one(name: &'static str, params: Vec<(&'static str, f64)>, tol: f64, f: impl Fn() -> Result<CheckReport> + Send + Sync + 'static) -> Job {
    many(name, params, tol, move || f().map(|r| vec![r]))
}

fn many(
    name: &'static str,
    params: Vec<(&'static str, f64)>,
    tol: f64,
    f: impl Fn() -> Result<Vec<CheckReport>> + Send + Sync + 'static,
) -> Job {
    Box::new(move || f().unwrap_or_else(|e| vec![CheckReport::failed(name, &params, tol, &e)]))
}

fn cond(y: f64, rho1: f64, z: f64, rho2: f64, q: f64) -> Result<CondDensityParams> {
    let p = CondDensityParams::new(y, rho1, z, rho2, q)?;
    p.require_interior()?;
    Ok(p)
}

fn cond_params(q: f64, y: f64, z: f64, r1: f64, r2: f64) -> Vec<(&'static str, f64)> {
    vec![("q", q), ("y", y), ("z", z), ("rho1", r1), ("rho2", r2)]
}

fn jobs(cfg: &SuiteConfig) -> Result<Vec<Job>> {
    let qs: Vec<QParam> = cfg.q_values.iter().map(|&q| QParam::new(q)).collect::<Result<_>>()?;
    let rhos = cfg.rho_values();
    let nmax = cfg.nmax;
    let mut out: Vec<Job> = Vec::new();
    for &c in &cfg.checks {
        let tol = cfg.tolerance(c);
        let pol = cfg.policy;
        match c {
            CheckName::ExactIdentities => {
                out.push(many("exact_identities", vec![], tol, || checks::check_exact_identities(&ExactGrid::default())));
            }
            CheckName::OrthogonalityH => {
                for &q in &qs {
                    out.push(many(c.as_str(), vec![("q", q.value())], tol, move || {
                        checks::check_orthogonality_h(nmax, q, tol, &pol)
                    }));
                }
            }
            CheckName::SnSeries => {
                let mut ts: Vec<f64> = rhos.iter().flat_map(|r| [*r, -*r]).collect();
                ts.sort_by(f64::total_cmp);
                ts.dedup();
                for &q in qs.iter().filter(|q| !q.is_gaussian_branch()) {
                    for &t in &ts {
                        out.push(one(c.as_str(), vec![("q", q.value()), ("t", t)], tol, move || {
                            checks::check_sn_series(t, q, tol, &pol)
                        }));
                    }
                }
            }
            CheckName::Bounds => {
                for &q in qs.iter().filter(|q| !q.is_gaussian_branch()) {
                    for &(r1, r2) in &cfg.rho_pairs {
                        out.push(one(c.as_str(), vec![("q", q.value()), ("rho1", r1), ("rho2", r2)], tol, move || {
                            checks::check_bounds(nmax, r1, r2, q, tol)
                        }));
                    }
                }
            }
            CheckName::CondExpectation | CheckName::OrthogonalityP | CheckName::RatioBounds | CheckName::Expansion => {
                single_rho_jobs(c, cfg, &qs, &rhos, tol, &mut out);
                if c == CheckName::Expansion {
                    pair_jobs(c, cfg, &qs, tol, &mut out);
                }
            }
            _ => pair_jobs(c, cfg, &qs, tol, &mut out),
        }
    }
    Ok(out)
}

/// Jobs indexed by `(q, y, rho)`.
fn single_rho_jobs(c: CheckName, cfg: &SuiteConfig, qs: &[QParam], rhos: &[f64], tol: f64, out: &mut Vec<Job>) {
    let pol = cfg.policy;
    let nmax = cfg.nmax;
    let strict = cfg.tol.unwrap_or(1e-8);
    for &q in qs {
        if q.is_gaussian_branch() && matches!(c, CheckName::RatioBounds | CheckName::Expansion) {
            continue;
        }
        let mut ys: Vec<f64> = cfg.points.iter().map(|p| p.resolve(q).0).collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        for &y in &ys {
            for &rho in rhos {
                let params = vec![("q", q.value()), ("y", y), ("rho", rho)];
                let guard = move || -> Result<()> { cond(y, rho, 0.0, 0.0, q.value()).map(|_| ()) };
                out.push(match c {
                    CheckName::CondExpectation => many(c.as_str(), params, tol, move || {
                        guard()?;
                        checks::check_cond_expectation(nmax, y, rho, q, tol, &pol)
                    }),
                    CheckName::OrthogonalityP => many(c.as_str(), params, tol, move || {
                        guard()?;
                        checks::check_orthogonality_p(nmax, y, rho, q, tol, &pol)
                    }),
                    CheckName::RatioBounds => one(c.as_str(), params, tol, move || {
                        guard()?;
                        checks::check_ratio_bounds(y, rho, q, tol, &pol)
                    }),
                    _ => one("expansion/poisson_mehler", params, strict, move || {
                        guard()?;
                        checks::check_poisson_mehler(y, rho, q, 60, strict, &pol)
                    }),
                });
            }
        }
    }
}

/// Jobs indexed by `(q, rho1, rho2, point)`.
fn pair_jobs(c: CheckName, cfg: &SuiteConfig, qs: &[QParam], tol: f64, out: &mut Vec<Job>) {
    let pol = cfg.policy;
    let nmax = cfg.nmax;
    // Gaussian-branch moments use the tighter closed-form threshold.
    let strict = cfg.tol.unwrap_or(1e-8);
    for &q in qs {
        let gauss = q.is_gaussian_branch();
        if gauss && matches!(c, CheckName::Representation | CheckName::Expansion) {
            continue;
        }
        if c == CheckName::Collapses && !(gauss || q.value() == 0.0) {
            continue;
        }
        for &(r1, r2) in &cfg.rho_pairs {
            for pt in &cfg.points {
                let (y, z) = pt.resolve(q);
                let qv = q.value();
                let params = cond_params(qv, y, z, r1, r2);
                let h = if gauss { 2.0 } else { q.support_half_width() };
                out.push(match c {
                    CheckName::Representation => one(c.as_str(), params, tol, move || {
                        let xs = [-0.7 * h, 0.1 * h, 0.55 * h];
                        checks::check_representation(nmax, &cond(y, r1, z, r2, qv)?, &xs, tol)
                    }),
                    CheckName::Normalization => one(c.as_str(), params, tol, move || {
                        checks::check_normalization(&cond(y, r1, z, r2, qv)?, tol, &pol)
                    }),
                    CheckName::ChapmanKolmogorov => one(c.as_str(), params, tol, move || {
                        cond(y, r1, z, r2, qv)?;
                        checks::check_chapman_kolmogorov(y, z, r1, r2, q, tol, &pol)
                    }),
                    CheckName::AwOrthogonality => many(c.as_str(), params, tol, move || {
                        checks::check_aw_orthogonality(nmax.min(6), &cond(y, r1, z, r2, qv)?, tol, &pol)
                    }),
                    CheckName::Vnm => many(c.as_str(), params, tol, move || {
                        cond(y, r1, z, r2, qv)?;
                        checks::check_vnm_family(nmax.min(4), y, z, r1, r2, q, tol, &pol)
                    }),
                    CheckName::Moments => many(c.as_str(), params, tol, move || {
                        let t = if gauss { strict } else { tol };
                        checks::check_moments(nmax, &cond(y, r1, z, r2, qv)?, t, &pol)
                    }),
                    CheckName::Collapses if gauss => many("collapses/gaussian_moments", params, strict, move || {
                        checks::check_moments(nmax.min(6), &cond(y, r1, z, r2, qv)?, strict, &pol).map(|v| {
                            v.into_iter()
                                .map(|mut r| {
                                    r.name = "collapses/gaussian_moments".into();
                                    r
                                })
                                .collect()
                        })
                    }),
                    CheckName::Collapses => one("collapses/free_densities", params, tol, move || {
                        checks::check_free_densities(&cond(y, r1, z, r2, qv)?, tol, &pol)
                    }),
                    _ => one("expansion/density", params, tol, move || {
                        checks::check_density_expansion(&cond(y, r1, z, r2, qv)?, 40, tol, &pol)
                    }),
                });
            }
        }
    }
}

/// Runs every job of `cfg`. The report order depends only on the
/// configuration.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let jobs = jobs(cfg)?;
    #[cfg(feature = "parallel")]
    let nested: Vec<Vec<CheckReport>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(|j| j()).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let nested: Vec<Vec<CheckReport>> = jobs.iter().map(|j| j()).collect();
    Ok(nested.into_iter().flatten().collect())
}

/// Pass and fail counts.
pub fn summarize(reports: &[CheckReport]) -> (usize, usize) {
    let pass = reports.iter().filter(|r| r.pass).count();
    (pass, reports.len() - pass)
}

/// One line per report followed by a totals line.
pub fn format_text(reports: &[CheckReport]) -> String {
    let mut s: String = reports.iter().map(|r| format!("{r}\n")).collect();
    let (p, f) = summarize(reports);
    s.push_str(&format!("{p} passed, {f} failed\n"));
    s
}

/// Reports as a JSON array.
pub fn format_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports contain only plain data")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(c.as_str().parse::<CheckName>().unwrap(), c);
        }
        assert!("nope".parse::<CheckName>().is_err());
    }

    #[test]
    fn empty_config_runs_nothing() {
        assert!(run_suite(&SuiteConfig::empty()).unwrap().is_empty());
    }

    #[test]
    fn failures_are_reported_not_raised() {
        let r = CheckReport::failed("x", &[("q", 0.5)], 1e-8, &Error::Domain("bad".into()));
        assert!(!r.pass && r.residual.is_infinite());
        let js = format_json(&[r.clone(), CheckReport::new("y", &[], 0.0, 0.0)]);
        assert!(js.contains("\"error\": \"domain error: bad\"") || js.contains("bad"));
        assert_eq!(js.matches("\"error\"").count(), 1);
        assert!(format_text(&[r]).contains("FAIL x"));
    }

    #[test]
    fn small_suite_passes() {
        let cfg = SuiteConfig {
            checks: vec![CheckName::OrthogonalityH, CheckName::Moments, CheckName::SnSeries],
            q_values: vec![0.3, 1.0],
            rho_pairs: vec![(0.3, 0.6)],
            points: vec![GridPoint::Absolute(0.5, -0.5)],
            nmax: 4,
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(!r.is_empty());
        for rep in &r {
            assert!(rep.pass, "{rep}");
        }
        assert_eq!(r, run_suite(&cfg).unwrap());
    }
}
