//! Scenario files: JSON with explicit breakpoint/value arrays.
//!
//! ```json
//! {
//!   "name": "exmp1",
//!   "coordinates": "eulerian",
//!   "u": { "x": [-1, 0, 1], "v": [0, 1, 0] },
//!   "mu": { "density": { "x": [-1, 0, 1], "v": [1, 1] }, "atoms": [[2.0, 0.5]] },
//!   "alpha": { "kind": "constant", "constant": 0.5 },
//!   "horizon": 3,
//!   "sample_times": [0, 1, 2, 3]
//! }
//! ```
//!
//! Density tables list one value per finite cell (`v.len() == x.len() − 1`);
//! the tails are zero. `nu` defaults to `mu` (or to `V` in Lagrangian
//! coordinates, where `y` holds samples of the full map `ξ ↦ y(ξ)`).

use hs_core::eulerian::{validate_eulerian, ValidationReport};
use hs_core::lagrangian::validate_lagrangian;
use hs_core::piecewise::{Atom, Measure, PwConstant, PwLinear};
use hs_core::{AlphaFn, EulerianY, HsError, LagrangianX, Tolerances};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Table>,
    /// `[position, mass]` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AlphaSpec {
    One,
    Constant {
        constant: f64,
    },
    Pw {
        x: Vec<f64>,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lipschitz: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    Eulerian,
    Lagrangian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub coordinates: Coordinates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Table>,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub big_u: Option<Table>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Table>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Table>,
    pub alpha: AlphaSpec,
    #[serde(default)]
    pub horizon: f64,
    #[serde(default)]
    pub sample_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nu_candidates: Vec<MeasureSpec>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_invalid_alpha: bool,
}

/// Initial datum in whichever coordinates the file used.
#[derive(Debug, Clone)]
pub enum State {
    Eulerian(EulerianY),
    Lagrangian(LagrangianX),
}

/// Why a scenario could not be loaded: unreadable/malformed input (usage)
/// or well-formed data outside the domain.
#[derive(Debug)]
pub enum LoadError {
    Parse(String),
    Domain(HsError),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Parse(m) => write!(f, "parse error: {m}"),
            LoadError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<HsError> for LoadError {
    fn from(e: HsError) -> Self {
        LoadError::Domain(e)
    }
}

fn missing(field: &str, coords: &str) -> LoadError {
    LoadError::Parse(format!("{coords} scenario needs field `{field}`"))
}

impl Table {
    fn linear(&self, identity: bool) -> Result<PwLinear, HsError> {
        PwLinear::from_samples(identity, self.x.clone(), self.v.clone())
    }

    fn bounded(f: &PwLinear) -> Self {
        Self { x: f.grid().to_vec(), v: f.values().to_vec() }
    }
}

impl MeasureSpec {
    pub fn build(&self, tol: &Tolerances) -> Result<Measure, HsError> {
        let density = match &self.density {
            Some(t) => PwConstant::compact(t.x.clone(), t.v.clone())?,
            None => PwConstant::zero(),
        };
        let atoms = self.atoms.iter().map(|&[x, mass]| Atom { x, mass }).collect();
        Measure::new(density, atoms, tol)
    }

    pub fn of(m: &Measure) -> Self {
        let d = m.density();
        Self {
            density: (!d.grid().is_empty()).then(|| Table { x: d.grid().to_vec(), v: d.inner().to_vec() }),
            atoms: m.atoms().iter().map(|a| [a.x, a.mass]).collect(),
        }
    }
}

impl AlphaSpec {
    pub fn build(&self) -> Result<AlphaFn, HsError> {
        match self {
            AlphaSpec::One => Ok(AlphaFn::One),
            AlphaSpec::Constant { constant } => Ok(AlphaFn::Constant(*constant)),
            AlphaSpec::Pw { x, values, lipschitz } => AlphaFn::pw(x.clone(), values.clone(), *lipschitz),
        }
    }

    pub fn of(a: &AlphaFn) -> Self {
        match a {
            AlphaFn::One => AlphaSpec::One,
            AlphaFn::Constant(c) => AlphaSpec::Constant { constant: *c },
            AlphaFn::Pw { f, lipschitz } => {
                AlphaSpec::Pw { x: f.grid().to_vec(), values: f.values().to_vec(), lipschitz: Some(*lipschitz) }
            }
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            LoadError::Parse(m) => LoadError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Snapshot of an Eulerian state; parsing it back reproduces the
    /// piecewise data bit for bit.
    pub fn from_eulerian(name: impl Into<String>, y: &EulerianY, allow_invalid_alpha: bool) -> Self {
        Self {
            name: name.into(),
            coordinates: Coordinates::Eulerian,
            u: Some(Table::bounded(&y.u)),
            mu: Some(MeasureSpec::of(&y.mu)),
            nu: Some(MeasureSpec::of(&y.nu)),
            y: None,
            big_u: None,
            h: None,
            v: None,
            alpha: AlphaSpec::of(&y.alpha),
            horizon: 0.0,
            sample_times: vec![],
            nu_candidates: vec![],
            allow_invalid_alpha,
        }
    }

    pub fn state(&self, tol: &Tolerances) -> Result<State, LoadError> {
        let alpha = self.alpha.build()?;
        match self.coordinates {
            Coordinates::Eulerian => {
                let u = self.u.as_ref().ok_or_else(|| missing("u", "eulerian"))?.linear(false)?;
                let mu = self.mu.as_ref().map(|m| m.build(tol)).transpose()?.unwrap_or_else(Measure::zero);
                let nu = match &self.nu {
                    Some(n) => n.build(tol)?,
                    None => mu.clone(),
                };
                Ok(State::Eulerian(EulerianY { u, mu, nu, alpha }))
            }
            Coordinates::Lagrangian => {
                fn get<'a>(t: &'a Option<Table>, name: &str) -> Result<&'a Table, LoadError> {
                    t.as_ref().ok_or_else(|| missing(name, "lagrangian"))
                }
                let y = get(&self.y, "y")?.linear(true)?;
                let u = get(&self.big_u, "U")?.linear(false)?;
                let v = get(&self.v, "V")?.linear(false)?;
                let h = match &self.h {
                    Some(h) => h.linear(false)?,
                    None => v.clone(),
                };
                Ok(State::Lagrangian(LagrangianX::new(y, u, h, v, alpha, tol)?))
            }
        }
    }

    pub fn nu_candidates(&self, tol: &Tolerances) -> Result<Vec<Measure>, HsError> {
        self.nu_candidates.iter().map(|m| m.build(tol)).collect()
    }
}

impl State {
    pub fn validate(&self, tol: &Tolerances, allow_invalid_alpha: bool) -> ValidationReport {
        match self {
            State::Eulerian(y) => validate_eulerian(y, tol, allow_invalid_alpha),
            State::Lagrangian(x) => validate_lagrangian(x, tol, allow_invalid_alpha),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_kinds_parse() {
        let s: AlphaSpec = serde_json::from_str(r#"{"kind":"pw","x":[0,1],"values":[0.2,0.4]}"#).unwrap();
        assert!(matches!(s.build().unwrap(), AlphaFn::Pw { .. }));
        let s: AlphaSpec = serde_json::from_str(r#"{"kind":"one"}"#).unwrap();
        assert_eq!(s.build().unwrap(), AlphaFn::One);
    }

    #[test]
    fn unknown_field_is_rejected() {
        let e = Scenario::parse(r#"{"name":"x","coordinates":"eulerian","alpha":{"kind":"one"},"bogus":1}"#);
        assert!(matches!(e, Err(LoadError::Parse(_))));
    }

    #[test]
    fn nu_defaults_to_mu() {
        let s = Scenario::parse(
            r#"{"name":"x","coordinates":"eulerian","u":{"x":[0,1],"v":[0,1]},
                "mu":{"density":{"x":[0,1],"v":[1]}},"alpha":{"kind":"one"}}"#,
        )
        .unwrap();
        let State::Eulerian(y) = s.state(&Tolerances::default()).unwrap() else { panic!() };
        assert_eq!(y.mu, y.nu);
    }
}
