//! The five subcommands. Each returns an [`Outcome`] (text and JSON forms of
//! its report plus a verdict) or a [`CliError`] carrying the exit code.

use crate::examples::{self, Check};
use crate::scenario::{LoadError, Scenario, State};
use hs_core::eulerian::Violation;
use hs_core::metric::{
    dhat_bracket, dhat_lower, euler_quotient_bracket, j_bracket, pair_constants, semi_metric_d_with, DOptions, DReport,
    GVariant, SearchOptions, W1InfNorm,
};
use hs_core::piecewise::Atom;
use hs_core::solver::{evolve, BreakingSchedule, Trajectory};
use hs_core::transform::{to_eulerian, to_lagrangian};
use hs_core::{EulerianY, HsError, LagrangianX, Tolerances};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Uniform sample count for the `u` and cumulative-measure CSVs.
pub const UNIFORM_SAMPLES: usize = 256;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input: exit 2.
    Usage(String),
    /// Well-formed input outside the domain: exit 1.
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Parse(m) => CliError::Usage(m),
            LoadError::Domain(e) => CliError::Domain(e.to_string()),
        }
    }
}

impl From<HsError> for CliError {
    fn from(e: HsError) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Domain(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: Tolerances,
    pub alpha_term: bool,
    pub w1inf: W1InfNorm,
}

impl Settings {
    fn d_options(&self, variant: GVariant) -> DOptions {
        DOptions { alpha_term: self.alpha_term, variant }
    }

    fn search(&self) -> SearchOptions {
        SearchOptions { d: self.d_options(GVariant::General), w1inf: self.w1inf, ..SearchOptions::default() }
    }
}

/// A finished command: human-readable text, machine-readable JSON, and
/// whether everything it checked passed.
#[derive(Debug)]
pub struct Outcome {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

fn fmt_violations(out: &mut String, label: &str, vs: &[Violation]) {
    for v in vs {
        let _ = writeln!(out, "  {label} {} at {}: {:e}", v.check, v.location, v.magnitude);
    }
}

/// A loaded, validated scenario together with its trajectory.
pub struct Run {
    pub scenario: Scenario,
    pub initial: State,
    pub x0: LagrangianX,
    pub traj: Trajectory,
}

impl Run {
    pub fn load(path: &Path, horizon: f64, s: &Settings) -> Result<Self, CliError> {
        let scenario = Scenario::load(path)?;
        let initial = scenario.state(&s.tol)?;
        let report = initial.validate(&s.tol, scenario.allow_invalid_alpha);
        if !report.is_valid() {
            let mut m = format!("{}: scenario is not admissible\n", path.display());
            fmt_violations(&mut m, "violation", &report.violations);
            return Err(CliError::Domain(m.trim_end().to_string()));
        }
        let x0 = match &initial {
            State::Eulerian(y) => to_lagrangian(y, &s.tol)?,
            State::Lagrangian(x) => x.clone(),
        };
        let traj = evolve(&x0, horizon.max(scenario.horizon), &s.tol)?;
        Ok(Self { scenario, initial, x0, traj })
    }

    pub fn lagrangian(&self, t: f64) -> Result<LagrangianX, CliError> {
        Ok(if t == 0.0 { self.x0.clone() } else { self.traj.state_at(t)? })
    }

    pub fn schedule(&self, t: f64) -> Result<BreakingSchedule, CliError> {
        Ok(self.traj.schedule_at(t, false)?)
    }

    /// The Eulerian state at `t`; at `t = 0` an Eulerian input is returned
    /// unchanged.
    pub fn eulerian(&self, t: f64, s: &Settings) -> Result<EulerianY, CliError> {
        match (&self.initial, t == 0.0) {
            (State::Eulerian(y), true) => Ok(y.clone()),
            _ => Ok(to_eulerian(&self.lagrangian(t)?, &s.tol)?),
        }
    }
}

fn check_times(times: &[f64]) -> Result<(), CliError> {
    match times.iter().find(|t| !t.is_finite() || **t < 0.0) {
        Some(t) => Err(CliError::Usage(format!("times must be finite and nonnegative, got {t}"))),
        None => Ok(()),
    }
}

/// Times from the command line, else the scenario's `sample_times`, else `0`.
fn resolve_times(given: &[f64], path: &Path) -> Result<Vec<f64>, CliError> {
    check_times(given)?;
    if !given.is_empty() {
        return Ok(given.to_vec());
    }
    let sc = Scenario::load(path)?;
    check_times(&sc.sample_times)?;
    Ok(if sc.sample_times.is_empty() { vec![0.0] } else { sc.sample_times })
}

fn max_time(times: &[f64]) -> f64 {
    times.iter().fold(0.0, |m, &t| m.max(t))
}

// ---------------------------------------------------------------- validate

pub fn validate(path: &Path, s: &Settings) -> Result<Outcome, CliError> {
    let sc = Scenario::load(path)?;
    let report = sc.state(&s.tol)?.validate(&s.tol, sc.allow_invalid_alpha);
    let ok = report.is_valid();
    let mut text = format!("{}: {}\n", sc.name, if ok { "valid" } else { "INVALID" });
    fmt_violations(&mut text, "violation", &report.violations);
    fmt_violations(&mut text, "warning", &report.warnings);
    Ok(Outcome { ok, text, json: json!({ "name": sc.name, "valid": ok, "report": report }) })
}

// ---------------------------------------------------------------- solve

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Breakpoints of `u`, `μ`, `ν` together with uniform points over their
/// hull widened by one on each side.
pub fn sample_points(y: &EulerianY) -> Vec<f64> {
    let mut pts: Vec<f64> = y.u.grid().to_vec();
    pts.extend(y.mu.support_points(0.0));
    pts.extend(y.nu.support_points(0.0));
    let lo = pts.iter().fold(f64::INFINITY, |m, &x| m.min(x)) - 1.0;
    let hi = pts.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)) + 1.0;
    pts.extend(linspace(lo, hi, UNIFORM_SAMPLES));
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

fn atoms_json(atoms: &[Atom]) -> String {
    serde_json::to_string_pretty(atoms).expect("atoms serialize")
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| io_err(path, e))
}

#[derive(Debug, Serialize)]
struct SolveRow {
    t: f64,
    energy: f64,
    mu_mass: f64,
    mu_atoms: usize,
    files: Vec<PathBuf>,
}

pub fn solve(path: &Path, times: &[f64], out: &Path, s: &Settings) -> Result<Outcome, CliError> {
    let times = resolve_times(times, path)?;
    let run = Run::load(path, max_time(&times), s)?;
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let name = &run.scenario.name;
    let mut rows = Vec::new();
    for &t in &times {
        let y = run.eulerian(t, s)?;
        let pts = sample_points(&y);
        let stem = out.join(format!("{name}_t{t}"));
        let file = |suffix: &str| PathBuf::from(format!("{}_{suffix}", stem.display()));
        let mut u_csv = String::from("x,u\n");
        let mut m_csv = String::from("x,F_mu,F_nu\n");
        for &x in &pts {
            let _ = writeln!(u_csv, "{x},{}", y.u.eval(x));
            let _ = writeln!(m_csv, "{x},{},{}", y.mu.cdf_right(x), y.nu.cdf_right(x));
        }
        let files = vec![file("u.csv"), file("measures.csv"), file("atoms.json"), file("nu_atoms.json"), file("snapshot.json")];
        write(&files[0], &u_csv)?;
        write(&files[1], &m_csv)?;
        write(&files[2], &atoms_json(y.mu.atoms()))?;
        write(&files[3], &atoms_json(y.nu.atoms()))?;
        let snap = Scenario::from_eulerian(format!("{name}@t={t}"), &y, run.scenario.allow_invalid_alpha);
        write(&files[4], &snap.to_json())?;
        rows.push(SolveRow { t, energy: run.traj.energy_at(t)?, mu_mass: y.mu.total_mass(), mu_atoms: y.mu.atoms().len(), files });
    }
    let events: Vec<f64> = run.traj.events().iter().map(|e| e.t).collect();
    let mut text = format!("{name}: breaking events at {events:?}\n{:>8} {:>14} {:>14} {:>6}\n", "t", "V∞", "μ(ℝ)", "atoms");
    for r in &rows {
        let _ = writeln!(text, "{:>8} {:>14.10} {:>14.10} {:>6}", r.t, r.energy, r.mu_mass, r.mu_atoms);
    }
    let _ = writeln!(text, "wrote {} files to {}", 5 * rows.len(), out.display());
    Ok(Outcome { ok: true, text, json: json!({ "name": name, "events": events, "rows": rows }) })
}

// ---------------------------------------------------------------- distance

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceLevel {
    D,
    J,
    DHat,
    Euler,
}

#[derive(Debug, Serialize)]
struct DistanceRow {
    t: f64,
    level: &'static str,
    lower: f64,
    upper: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms: Option<DReport>,
    #[serde(skip_serializing_if = "String::is_empty")]
    witness: String,
}

fn d_at(a: &Run, b: &Run, t: f64, variant: GVariant, s: &Settings) -> Result<DReport, CliError> {
    let (xa, xb) = (a.lagrangian(t)?, b.lagrangian(t)?);
    Ok(semi_metric_d_with(&xa, &xb, &a.schedule(t)?, &b.schedule(t)?, &s.d_options(variant), &s.tol)?)
}

fn nu_family(run: &Run, y: &EulerianY, t: f64, s: &Settings) -> Result<Vec<hs_core::Measure>, CliError> {
    let mut out = vec![y.nu.clone()];
    if t == 0.0 {
        out.extend(run.scenario.nu_candidates(&s.tol)?);
    }
    Ok(out)
}

pub fn distance(pa: &Path, pb: &Path, level: DistanceLevel, times: &[f64], s: &Settings) -> Result<Outcome, CliError> {
    let times = resolve_times(times, pa)?;
    let h = max_time(&times);
    let (a, b) = (Run::load(pa, h, s)?, Run::load(pb, h, s)?);
    let opts = s.search();
    let mut rows = Vec::new();
    for &t in &times {
        let row = match level {
            DistanceLevel::D => {
                let r = d_at(&a, &b, t, GVariant::General, s)?;
                DistanceRow { t, level: "D", lower: r.total, upper: r.total, terms: Some(r), witness: String::new() }
            }
            DistanceLevel::J | DistanceLevel::DHat => {
                let (xa, xb) = (a.lagrangian(t)?, b.lagrangian(t)?);
                let (name, r) = if level == DistanceLevel::J {
                    ("J", j_bracket(&xa, &xb, &opts, &s.tol)?)
                } else {
                    ("dhat", dhat_bracket(&xa, &xb, &opts, &s.tol)?)
                };
                DistanceRow { t, level: name, lower: r.lower, upper: r.upper, terms: None, witness: r.witness }
            }
            DistanceLevel::Euler => {
                let (ya, yb) = (a.eulerian(t, s)?, b.eulerian(t, s)?);
                let (na, nb) = (nu_family(&a, &ya, t, s)?, nu_family(&b, &yb, t, s)?);
                let r = euler_quotient_bracket(&ya.project(), &yb.project(), &na, &nb, &opts, &s.tol)?;
                DistanceRow { t, level: "euler", lower: r.lower, upper: r.upper, terms: None, witness: r.witness }
            }
        };
        rows.push(row);
    }
    let ordered = rows.iter().all(|r| r.lower <= r.upper + s.tol.metric);
    let mut text = format!("{} vs {}\n{:>8} {:>6} {:>14} {:>14}  detail\n", a.scenario.name, b.scenario.name, "t", "level", "lower", "upper");
    for r in &rows {
        let detail = match &r.terms {
            Some(d) => format!(
                "|Δy|∞={:.6} |ΔU|∞={:.6} |Δy_ξ|₂={:.6} |ΔU_ξ|₂={:.6} |ΔH|∞={:.6} |G|₁={:.6} |G|₂={:.6} |Δα|∞={:.6}",
                d.dy_sup, d.du_sup, d.dy_xi_l2, d.du_xi_l2, d.dh_sup, d.g_l1, d.g_l2, d.dalpha
            ),
            None => format!("{}{}", if r.lower <= r.upper + s.tol.metric { "lower ≤ upper" } else { "ORDER VIOLATED" }, if r.witness.is_empty() { String::new() } else { format!("; {}", r.witness) }),
        };
        let _ = writeln!(text, "{:>8} {:>6} {:>14.10} {:>14.10}  {detail}", r.t, r.level, r.lower, r.upper);
    }
    Ok(Outcome { ok: ordered, text, json: json!({ "a": a.scenario.name, "b": b.scenario.name, "rows": rows }) })
}

// ---------------------------------------------------------------- lipschitz

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzLevel {
    D,
    DHat,
}

/// Which growth rate to test against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    /// `C_{A,B}` for `D`, `R_M^L` for `d̂`.
    General,
    /// `3/2`, valid when both α are constant.
    Constant,
}

/// Rate of the simplified estimate for two constant α's.
pub const CONSTANT_ALPHA_RATE: f64 = 1.5;

#[derive(Debug, Serialize)]
struct LipschitzRow {
    t: f64,
    lhs: f64,
    bound: f64,
    margin: f64,
    pass: bool,
}

pub fn lipschitz(pa: &Path, pb: &Path, level: LipschitzLevel, exponent: Exponent, times: &[f64], s: &Settings) -> Result<Outcome, CliError> {
    let times = resolve_times(times, pa)?;
    let h = max_time(&times);
    let (a, b) = (Run::load(pa, h, s)?, Run::load(pb, h, s)?);
    let k = pair_constants(&a.x0, &b.x0);
    let constant = a.x0.alpha().constant_value().is_some() && b.x0.alpha().constant_value().is_some();
    if exponent == Exponent::Constant && !constant {
        return Err(CliError::Domain("the 3/2 exponent needs two constant α's".into()));
    }
    let variant = if exponent == Exponent::Constant { GVariant::ConstantAlpha } else { GVariant::General };
    let (rate, rate_name) = match (level, exponent) {
        (_, Exponent::Constant) => (CONSTANT_ALPHA_RATE, "3/2"),
        (LipschitzLevel::D, Exponent::General) => (k.c_ab, "C_AB"),
        (LipschitzLevel::DHat, Exponent::General) => (k.r_ml, "R_M^L"),
    };
    let opts = s.search();
    // D is evaluated exactly; for d̂ the certified comparison is
    // lower(t) ≤ e^{rate·t}·upper(0).
    let rhs = match level {
        LipschitzLevel::D => d_at(&a, &b, 0.0, variant, s)?.total,
        LipschitzLevel::DHat => dhat_bracket(&a.x0, &b.x0, &opts, &s.tol)?.upper,
    };
    let mut rows = Vec::new();
    for &t in &times {
        let lhs = match level {
            LipschitzLevel::D => d_at(&a, &b, t, variant, s)?.total,
            LipschitzLevel::DHat => dhat_lower(&a.lagrangian(t)?, &b.lagrangian(t)?, &opts, &s.tol)?,
        };
        let bound = (rate * t).exp() * rhs;
        let margin = bound - lhs;
        rows.push(LipschitzRow { t, lhs, bound, margin, pass: margin >= -s.tol.metric });
    }
    let ok = rows.iter().all(|r| r.pass);
    let lvl = if level == LipschitzLevel::D { "D" } else { "dhat" };
    let mut text = format!(
        "{} vs {}: level {lvl}, rate {rate_name} = {rate:.6}, rhs at t=0 = {rhs:.10}\n{:>8} {:>16} {:>16} {:>16}  verdict\n",
        a.scenario.name, b.scenario.name, "t", "lhs", "e^{rate·t}·rhs", "margin"
    );
    for r in &rows {
        let _ = writeln!(text, "{:>8} {:>16.10} {:>16.10} {:>16.6e}  {}", r.t, r.lhs, r.bound, r.margin, if r.pass { "PASS" } else { "FAIL" });
    }
    let json = json!({ "a": a.scenario.name, "b": b.scenario.name, "level": lvl, "rate": rate, "rhs": rhs, "constants": k, "rows": rows });
    Ok(Outcome { ok, text, json })
}

// ---------------------------------------------------------------- example

pub fn example(name: &str, s: &Settings) -> Result<Outcome, CliError> {
    let checks: Vec<Check> = match examples::run_example(name, &s.tol) {
        None => return Err(CliError::Usage(format!("unknown example `{name}`; known: {}", examples::NAMES.join(", ")))),
        Some(r) => r?,
    };
    let ok = checks.iter().all(|c| c.pass);
    let mut text = format!("example {name}\n");
    for c in &checks {
        let rel = if c.at_least { ">" } else { "≤" };
        let _ = write!(text, "  {} {}: {:.3e} {rel} {:.1e} (margin {:.3e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.limit, c.margin());
        let _ = writeln!(text, "{}", if c.note.is_empty() { String::new() } else { format!(" — {}", c.note) });
    }
    Ok(Outcome { ok, text, json: json!({ "example": name, "pass": ok, "checks": checks }) })
}
