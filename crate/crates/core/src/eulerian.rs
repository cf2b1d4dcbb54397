//! Eulerian data: the velocity `u`, the energy measure `μ`, the auxiliary
//! measure `ν ≥ μ`, and the dissipation function `α`.

use crate::error::{HsError, Result};
use crate::piecewise::{common_refinement, Atom, Measure, PwConstant, PwLinear};
use crate::Tolerances;
use serde::{Deserialize, Serialize};

/// Fraction of concentrating energy removed at a breaking point.
///
/// Admissible choices are `α ≡ 1` or `α ∈ W^{1,∞}` with values in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AlphaFn {
    One,
    Constant(f64),
    /// Piecewise-linear `α` with a declared Lipschitz bound.
    Pw { f: PwLinear, lipschitz: f64 },
}

impl AlphaFn {
    /// Piecewise α from breakpoint values; the Lipschitz bound defaults to
    /// the largest cell slope.
    pub fn pw(grid: Vec<f64>, values: Vec<f64>, lipschitz: Option<f64>) -> Result<Self> {
        let f = PwLinear::new(false, grid, values)?;
        let steep = f.slopes().iter().fold(0.0f64, |m, s| m.max(s.abs()));
        Ok(Self::Pw { f, lipschitz: lipschitz.unwrap_or(steep) })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::One => 1.0,
            Self::Constant(a) => *a,
            Self::Pw { f, .. } => f.eval(x),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Self::One => true,
            Self::Constant(a) => *a == 1.0,
            Self::Pw { .. } => false,
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Self::One => Some(1.0),
            Self::Constant(a) => Some(*a),
            Self::Pw { .. } => None,
        }
    }

    /// `‖α'‖_∞` computed from the data (not the declared bound).
    pub fn derivative_sup(&self) -> f64 {
        match self {
            Self::Pw { f, .. } => f.slopes().iter().fold(0.0f64, |m, s| m.max(s.abs())),
            _ => 0.0,
        }
    }

    pub fn grid(&self) -> &[f64] {
        match self {
            Self::Pw { f, .. } => f.grid(),
            _ => &[],
        }
    }

    pub fn as_pw(&self) -> PwLinear {
        match self {
            Self::Pw { f, .. } => f.clone(),
            other => PwLinear::constant(other.eval(0.0)),
        }
    }

    /// `‖α_A − α_B‖_∞`.
    pub fn sup_diff(&self, other: &AlphaFn) -> f64 {
        self.as_pw().sup_norm_diff(&other.as_pw()).expect("both bounded")
    }

    /// Membership checks for the admissible set.
    pub fn violations(&self, tol: &Tolerances) -> Vec<Violation> {
        let mut out = Vec::new();
        match self {
            Self::One => {}
            Self::Constant(a) => {
                if !(0.0..=1.0).contains(a) {
                    out.push(Violation::new("alpha_range", "constant", (a - a.clamp(0.0, 1.0)).abs()));
                }
            }
            Self::Pw { f, lipschitz } => {
                if f.is_identity_shifted() {
                    out.push(Violation::new("alpha_bounded", "tails", f64::INFINITY));
                }
                let hi = 1.0 - tol.alpha_eps;
                for (x, v) in f.grid().iter().zip(f.values()) {
                    if *v < 0.0 || *v > hi {
                        out.push(Violation::new("alpha_range", format!("x={x}"), (v - v.clamp(0.0, hi)).abs()));
                    }
                }
                let steep = self.derivative_sup();
                if steep > lipschitz * (1.0 + 1e-12) + 1e-15 {
                    out.push(Violation::new("alpha_lipschitz", format!("declared {lipschitz}"), steep - lipschitz));
                }
            }
        }
        out
    }
}

/// One failed (or merely suspicious) check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub location: String,
    pub magnitude: f64,
}

impl Violation {
    pub fn new(check: impl Into<String>, location: impl Into<String>, magnitude: f64) -> Self {
        Self { check: check.into(), location: location.into(), magnitude }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, check: &str) -> bool {
        self.violations.iter().any(|v| v.check == check)
    }

    pub(crate) fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub(crate) fn warn(&mut self, v: Violation) {
        self.warnings.push(v);
    }
}

/// Eulerian state `Y = (u, μ, ν, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerianY {
    pub u: PwLinear,
    pub mu: Measure,
    pub nu: Measure,
    pub alpha: AlphaFn,
}

/// Eulerian state without the auxiliary measure, `Z = (u, μ, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerianZ {
    pub u: PwLinear,
    pub mu: Measure,
    pub alpha: AlphaFn,
}

impl EulerianY {
    pub fn project(&self) -> EulerianZ {
        EulerianZ { u: self.u.clone(), mu: self.mu.clone(), alpha: self.alpha.clone() }
    }
}

impl EulerianZ {
    pub fn with_nu(&self, nu: Measure) -> EulerianY {
        EulerianY { u: self.u.clone(), mu: self.mu.clone(), nu, alpha: self.alpha.clone() }
    }
}

fn rel(a: f64) -> f64 {
    a.abs().max(1.0)
}

fn cell_label(w: &[f64]) -> String {
    format!("({}, {})", w[0], w[1])
}

/// `μ_ac = u_x²` cell by cell.
fn check_energy_density(u: &PwLinear, mu: &Measure, tol: &Tolerances, report: &mut ValidationReport) {
    let ux = u.derivative();
    let grid = common_refinement(&[u.grid(), mu.density().grid()], tol.x);
    if ux.values()[0] != 0.0 || *ux.values().last().unwrap() != 0.0 {
        report.push(Violation::new("u_bounded_tails", "tails", f64::INFINITY));
    }
    for w in grid.windows(2) {
        let m = 0.5 * (w[0] + w[1]);
        let e = ux.eval(m).powi(2);
        let d = mu.density().eval(m);
        if (d - e).abs() > tol.v * rel(e) {
            report.push(Violation::new("mu_ac_eq_ux2", cell_label(w), (d - e).abs()));
        }
    }
}

/// Checks `(Y, α) ∈ 𝒟`. With `allow_invalid_alpha`, violations of the
/// admissible set for `α` are downgraded to warnings.
pub fn validate_eulerian(y: &EulerianY, tol: &Tolerances, allow_invalid_alpha: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    if y.u.is_identity_shifted() {
        report.push(Violation::new("u_bounded", "identity coefficient", f64::INFINITY));
        return report;
    }
    check_energy_density(&y.u, &y.mu, tol, &mut report);

    let grid = common_refinement(&[y.u.grid(), y.mu.density().grid(), y.nu.density().grid()], tol.x);
    let ux = y.u.derivative();
    for w in grid.windows(2) {
        let m = 0.5 * (w[0] + w[1]);
        let (dm, dn) = (y.mu.density().eval(m), y.nu.density().eval(m));
        if dm > dn + tol.v * rel(dn) {
            report.push(Violation::new("mu_le_nu", cell_label(w), dm - dn));
            report.push(Violation::new("mu_ac_le_nu_ac", cell_label(w), dm - dn));
        }
        if y.alpha.is_one() {
            if (dn - dm).abs() > tol.v * rel(dn) {
                report.push(Violation::new("nu_ac_eq_mu", cell_label(w), (dn - dm).abs()));
            }
        } else {
            if dn > tol.v && dm <= tol.v {
                report.push(Violation::new("dmu_dnu_positive", cell_label(w), dn));
            }
            if ux.eval(m) < 0.0 && (dn - dm).abs() > tol.v * rel(dn) {
                report.push(Violation::new("dmu_dnu_one_where_ux_negative", cell_label(w), (dn - dm).abs()));
            }
        }
    }
    for a in y.mu.atoms() {
        let na = y.nu.atom_at(a.x, tol.x);
        if a.mass > na + tol.v * rel(na) {
            report.push(Violation::new("mu_le_nu", format!("atom x={}", a.x), a.mass - na));
        }
        if y.alpha.is_one() {
            report.push(Violation::new("mu_singular_vanishes", format!("atom x={}", a.x), a.mass));
        }
    }
    if !y.alpha.is_one() {
        for a in y.nu.atoms() {
            if y.mu.atom_at(a.x, tol.x) <= tol.v {
                report.push(Violation::new("dmu_dnu_positive", format!("atom x={}", a.x), a.mass));
            }
        }
    }
    for v in y.alpha.violations(tol) {
        if allow_invalid_alpha {
            report.warn(v);
        } else {
            report.push(v);
        }
    }
    report
}

/// Checks the reduced triple `(u, μ, α)`.
pub fn validate_eulerian_z(z: &EulerianZ, tol: &Tolerances, allow_invalid_alpha: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    if z.u.is_identity_shifted() {
        report.push(Violation::new("u_bounded", "identity coefficient", f64::INFINITY));
        return report;
    }
    check_energy_density(&z.u, &z.mu, tol, &mut report);
    if z.alpha.is_one() {
        for a in z.mu.atoms() {
            report.push(Violation::new("mu_singular_vanishes", format!("atom x={}", a.x), a.mass));
        }
    }
    for v in z.alpha.violations(tol) {
        if allow_invalid_alpha {
            report.warn(v);
        } else {
            report.push(v);
        }
    }
    report
}

/// `dμ/dν`: a cellwise ratio of densities plus a ratio per atom of `ν`.
/// Cells where both densities vanish get ratio 0.
pub fn radon_nikodym(mu: &Measure, nu: &Measure, tol: &Tolerances) -> Result<(PwConstant, Vec<Atom>)> {
    let grid = common_refinement(&[mu.density().grid(), nu.density().grid()], tol.x);
    let mut inner = Vec::with_capacity(grid.len().saturating_sub(1));
    for w in grid.windows(2) {
        let m = 0.5 * (w[0] + w[1]);
        let (dm, dn) = (mu.density().eval(m), nu.density().eval(m));
        if dm > dn + tol.v * rel(dn) {
            return Err(HsError::DominanceViolation(format!("μ density {dm} exceeds ν density {dn} on {}", cell_label(w))));
        }
        inner.push(if dn > 0.0 { (dm / dn).min(1.0) } else { 0.0 });
    }
    let density = if grid.len() < 2 { PwConstant::zero() } else { PwConstant::compact(grid, inner)? };
    for a in mu.atoms() {
        if nu.atom_at(a.x, tol.x) <= 0.0 {
            return Err(HsError::DominanceViolation(format!("μ has an atom at {} where ν has none", a.x)));
        }
    }
    let mut atoms = Vec::with_capacity(nu.atoms().len());
    for a in nu.atoms() {
        let m = mu.atom_at(a.x, tol.x);
        if m > a.mass + tol.v * rel(a.mass) {
            return Err(HsError::DominanceViolation(format!("μ atom {m} exceeds ν atom {} at {}", a.mass, a.x)));
        }
        atoms.push(Atom { x: a.x, mass: (m / a.mass).min(1.0) });
    }
    Ok((density, atoms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn tent() -> (PwLinear, Measure) {
        let t = tol();
        let u = PwLinear::new(false, vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let mu = Measure::absolutely_continuous(PwConstant::compact(vec![-1.0, 1.0], vec![1.0]).unwrap(), &t).unwrap();
        (u, mu)
    }

    #[test]
    fn tent_with_equal_measures_is_valid() {
        let (u, mu) = tent();
        let y = EulerianY { u, nu: mu.clone(), mu, alpha: AlphaFn::Constant(0.5) };
        let r = validate_eulerian(&y, &tol(), false);
        assert!(r.is_valid(), "{r:?}");
    }

    #[test]
    fn wrong_energy_density_is_reported() {
        let t = tol();
        let (u, _) = tent();
        let mu = Measure::absolutely_continuous(PwConstant::compact(vec![-1.0, 1.0], vec![2.0]).unwrap(), &t).unwrap();
        let y = EulerianY { u, nu: mu.clone(), mu, alpha: AlphaFn::One };
        assert!(validate_eulerian(&y, &t, false).has("mu_ac_eq_ux2"));
    }

    #[test]
    fn dominance_checks_are_reported_separately() {
        let t = tol();
        let (u, mu) = tent();
        let nu = Measure::absolutely_continuous(PwConstant::compact(vec![-1.0, 1.0], vec![0.5]).unwrap(), &t).unwrap();
        let y = EulerianY { u, mu, nu, alpha: AlphaFn::Constant(0.3) };
        let r = validate_eulerian(&y, &t, false);
        assert!(r.has("mu_le_nu") && r.has("mu_ac_le_nu_ac"));
    }

    #[test]
    fn alpha_one_forbids_atoms_in_mu() {
        let t = tol();
        let (u, mu) = tent();
        let mu = Measure::new(mu.density().clone(), vec![Atom { x: 0.0, mass: 1.0 }], &t).unwrap();
        let y = EulerianY { u, nu: mu.clone(), mu, alpha: AlphaFn::One };
        assert!(validate_eulerian(&y, &t, false).has("mu_singular_vanishes"));
    }

    #[test]
    fn alpha_range_and_bypass() {
        let t = tol();
        let (u, mu) = tent();
        let alpha = AlphaFn::pw(vec![0.8125, 1.0], vec![1.0, 0.5], None).unwrap();
        let y = EulerianY { u, nu: mu.clone(), mu, alpha };
        let strict = validate_eulerian(&y, &t, false);
        assert!(strict.has("alpha_range"));
        let relaxed = validate_eulerian(&y, &t, true);
        assert!(relaxed.is_valid() && !relaxed.warnings.is_empty());
    }

    #[test]
    fn rn_derivative_of_final_example_measures() {
        // ν = μ + 3·1_(0,1] u_x² + δ_½ against μ = u_x² + δ_{-½} + δ_½
        let t = tol();
        let mu = Measure::new(
            PwConstant::compact(vec![-1.0, 1.0], vec![1.0]).unwrap(),
            vec![Atom { x: -0.5, mass: 1.0 }, Atom { x: 0.5, mass: 1.0 }],
            &t,
        )
        .unwrap();
        let nu = Measure::new(
            PwConstant::compact(vec![-1.0, 0.0, 1.0], vec![1.0, 4.0]).unwrap(),
            vec![Atom { x: -0.5, mass: 1.0 }, Atom { x: 0.5, mass: 2.0 }],
            &t,
        )
        .unwrap();
        let (d, atoms) = radon_nikodym(&mu, &nu, &t).unwrap();
        assert_eq!(d.eval(0.5), 0.25);
        assert_eq!(d.eval(-0.5), 1.0);
        assert_eq!(atoms[1], Atom { x: 0.5, mass: 0.5 });
        assert!(matches!(radon_nikodym(&nu, &mu, &t), Err(HsError::DominanceViolation(_))));
    }
}
