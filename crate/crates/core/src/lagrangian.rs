//! Lagrangian states `X = (y, U, H, V, α)`, relabellings and the
//! normalisation onto `y + H = id`.

use crate::error::{HsError, Result};
use crate::eulerian::{AlphaFn, ValidationReport, Violation};
use crate::piecewise::{common_refinement, PwLinear};
use crate::Tolerances;
use serde::{Deserialize, Serialize};

/// A Lagrangian state. `y` carries identity tails, `U`, `H`, `V` are
/// bounded; all four live on one shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianX {
    y: PwLinear,
    u: PwLinear,
    h: PwLinear,
    v: PwLinear,
    alpha: AlphaFn,
}

/// Per-cell derivatives on the shared grid (finite cells only).
#[derive(Debug, Clone, PartialEq)]
pub struct CellSlopes {
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub h: Vec<f64>,
    pub v: Vec<f64>,
}

fn slopes_of(f: &PwLinear) -> Vec<f64> {
    f.slopes()
}

impl LagrangianX {
    /// Components are moved onto their common refinement.
    pub fn new(y: PwLinear, u: PwLinear, h: PwLinear, v: PwLinear, alpha: AlphaFn, tol: &Tolerances) -> Result<Self> {
        if !y.is_identity_shifted() {
            return Err(HsError::ShapeMismatch("y must have identity tails".into()));
        }
        if u.is_identity_shifted() || h.is_identity_shifted() || v.is_identity_shifted() {
            return Err(HsError::ShapeMismatch("U, H and V must be bounded".into()));
        }
        let grid = common_refinement(&[y.grid(), u.grid(), h.grid(), v.grid()], tol.x);
        Ok(Self::on_grid(&grid, &y, &u, &h, &v, alpha))
    }

    fn on_grid(grid: &[f64], y: &PwLinear, u: &PwLinear, h: &PwLinear, v: &PwLinear, alpha: AlphaFn) -> Self {
        Self { y: y.refine_to(grid), u: u.refine_to(grid), h: h.refine_to(grid), v: v.refine_to(grid), alpha }
    }

    /// Assemble from bounded-part values already on a shared grid.
    pub fn from_values(grid: Vec<f64>, by: Vec<f64>, u: Vec<f64>, h: Vec<f64>, v: Vec<f64>, alpha: AlphaFn) -> Result<Self> {
        Ok(Self {
            y: PwLinear::new(true, grid.clone(), by)?,
            u: PwLinear::new(false, grid.clone(), u)?,
            h: PwLinear::new(false, grid.clone(), h)?,
            v: PwLinear::new(false, grid, v)?,
            alpha,
        })
    }

    pub fn y(&self) -> &PwLinear {
        &self.y
    }
    pub fn u(&self) -> &PwLinear {
        &self.u
    }
    pub fn h(&self) -> &PwLinear {
        &self.h
    }
    pub fn v(&self) -> &PwLinear {
        &self.v
    }
    pub fn alpha(&self) -> &AlphaFn {
        &self.alpha
    }
    pub fn grid(&self) -> &[f64] {
        self.y.grid()
    }

    pub fn with_alpha(&self, alpha: AlphaFn) -> Self {
        Self { alpha, ..self.clone() }
    }

    /// `V(+∞)`, the total energy.
    pub fn v_inf(&self) -> f64 {
        self.v.tail_values().1
    }

    pub fn slopes(&self) -> CellSlopes {
        CellSlopes { y: slopes_of(&self.y), u: slopes_of(&self.u), h: slopes_of(&self.h), v: slopes_of(&self.v) }
    }

    pub fn refine_to(&self, grid: &[f64]) -> Self {
        Self::on_grid(grid, &self.y, &self.u, &self.h, &self.v, self.alpha.clone())
    }

    /// `X ∘ f`.
    pub fn relabel(&self, f: &Relabelling, tol: &Tolerances) -> Result<Self> {
        let g = f.map();
        Ok(Self {
            y: self.y.compose(g, tol)?,
            u: self.u.compose(g, tol)?,
            h: self.h.compose(g, tol)?,
            v: self.v.compose(g, tol)?,
            alpha: self.alpha.clone(),
        })
    }

    /// `Π(X) = X ∘ (y + H)⁻¹`, returned together with `(y + H)⁻¹`.
    /// The output satisfies `y + H = id` exactly (H is rebuilt from y).
    pub fn pi_normalize(&self, tol: &Tolerances) -> Result<(Self, Relabelling)> {
        let s = self.y.add(&self.h, tol)?;
        let sinv = Relabelling::new(s.invert(tol)?, tol)?;
        let mut out = self.relabel(&sinv, tol)?;
        out.h = PwLinear::new(false, out.y.grid().to_vec(), out.y.values().iter().map(|b| -b).collect())?;
        Ok((out, sinv))
    }

    /// `sup |y + H - id|`.
    pub fn f0_defect(&self) -> f64 {
        self.y.values().iter().zip(self.h.values()).fold(0.0, |m, (b, h)| m.max((b + h).abs()))
    }

    pub fn in_f0(&self, tol: &Tolerances) -> bool {
        self.f0_defect() <= tol.v
    }
}

/// `‖X_A − X_B‖ = ‖Δy‖_∞ + ‖ΔU‖_∞ + ‖ΔH‖_∞ + ¼‖ΔV‖_∞ + ‖Δα‖_∞`.
pub fn lag_comparison_norm(a: &LagrangianX, b: &LagrangianX) -> f64 {
    let d = |p: &PwLinear, q: &PwLinear| p.sup_norm_diff(q).expect("matching identity coefficients");
    d(&a.y, &b.y) + d(&a.u, &b.u) + d(&a.h, &b.h) + 0.25 * d(&a.v, &b.v) + a.alpha.sup_diff(&b.alpha)
}

/// A strictly increasing, identity-tailed piecewise-linear map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relabelling(PwLinear);

impl Relabelling {
    pub fn new(f: PwLinear, tol: &Tolerances) -> Result<Self> {
        if !f.is_identity_shifted() {
            return Err(HsError::NotMonotone("relabelling must have identity tails".into()));
        }
        if let Some((i, s)) = f.slopes().iter().enumerate().find(|(_, s)| **s <= tol.slope_floor) {
            return Err(HsError::NotMonotone(format!("relabelling has slope {s} on cell {i}")));
        }
        Ok(Self(f))
    }

    pub fn identity() -> Self {
        Self(PwLinear::id())
    }

    pub fn map(&self) -> &PwLinear {
        &self.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.eval(x)
    }

    pub fn inverse(&self, tol: &Tolerances) -> Result<Self> {
        Ok(Self(self.0.invert(tol)?))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Relabelling, tol: &Tolerances) -> Result<Self> {
        Ok(Self(self.0.compose(&inner.0, tol)?))
    }
}

fn rel(a: f64) -> f64 {
    a.abs().max(1.0)
}

/// Checks membership of the Lagrangian set `ℱ` cell by cell.
pub fn validate_lagrangian(x: &LagrangianX, tol: &Tolerances, allow_invalid_alpha: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (h_left, _) = x.h.tail_values();
    let (v_left, _) = x.v.tail_values();
    if h_left.abs() > tol.v {
        report.push(Violation::new("h_vanishes_at_minus_inf", "left tail", h_left.abs()));
    }
    if v_left.abs() > tol.v {
        report.push(Violation::new("v_vanishes_at_minus_inf", "left tail", v_left.abs()));
    }
    let s = x.slopes();
    let g = x.grid();
    // slopes are differences of stored values: their rounding noise grows
    // like ε·|values| / cell length, which matters on short or flat cells
    let mag = |f: &PwLinear| f.values().iter().chain(g.iter().filter(|_| f.is_identity_shifted())).fold(1.0f64, |m, v| m.max(v.abs()));
    let (my, mu, mh, mv) = (mag(&x.y), mag(&x.u), mag(&x.h), mag(&x.v));
    let mut min_sum = f64::INFINITY;
    let mut kappa: Vec<Option<f64>> = vec![None; s.y.len()];
    for i in 0..s.y.len() {
        let loc = format!("({}, {})", g[i], g[i + 1]);
        let (yx, ux, hx, vx) = (s.y[i], s.u[i], s.h[i], s.v[i]);
        let noise = |m: f64| 8.0 * f64::EPSILON * m / (g[i + 1] - g[i]);
        let (ny, nu, nh, nv) = (noise(my), noise(mu), noise(mh), noise(mv));
        if yx < -tol.slope_floor {
            report.push(Violation::new("y_xi_nonnegative", &loc, -yx));
        }
        if hx < -tol.v {
            report.push(Violation::new("h_xi_nonnegative", &loc, -hx));
        }
        min_sum = min_sum.min(yx + hx);
        let gap = (yx * vx - ux * ux).abs();
        if gap > tol.v * rel(ux * ux).max(rel(yx * vx)) + ny * vx.abs() + nv * yx.abs() + 2.0 * nu * ux.abs() {
            report.push(Violation::new("y_xi_v_xi_eq_u_xi_sq", &loc, gap));
        }
        if vx < -tol.v {
            report.push(Violation::new("v_xi_nonnegative", &loc, -vx));
        }
        if vx > hx + tol.v * rel(hx) + nv + nh {
            report.push(Violation::new("v_xi_le_h_xi", &loc, vx - hx));
        }
        if x.alpha.is_one() {
            if yx <= tol.slope_floor && vx.abs() > tol.v {
                report.push(Violation::new("collapsed_cells_carry_no_energy", &loc, vx.abs()));
            }
            if yx > tol.slope_floor && (vx - hx).abs() > tol.v * rel(hx) + nv + nh {
                report.push(Violation::new("v_xi_eq_h_xi", &loc, (vx - hx).abs()));
            }
        } else if hx > tol.v {
            let k = vx / hx;
            kappa[i] = Some(k);
            if k <= tol.v {
                report.warn(Violation::new("kappa_zero", &loc, k));
            }
            if ux < -tol.v && (vx - hx).abs() > tol.v * hx + nv + nh {
                report.push(Violation::new("kappa_one_where_u_xi_negative", &loc, (k - 1.0).abs()));
            }
        }
    }
    if min_sum <= tol.slope_floor {
        report.push(Violation::new("y_xi_plus_h_xi_positive", "min over cells", min_sum));
    }
    // κ is a function of x = y(ξ): it must agree along every collapsed run.
    let ys = x.y.samples();
    let mut i = 0;
    while i < s.y.len() {
        if s.y[i] > tol.slope_floor {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < s.y.len() && s.y[j + 1] <= tol.slope_floor {
            j += 1;
        }
        let ks: Vec<f64> = kappa[i..=j].iter().flatten().copied().collect();
        if let (Some(lo), Some(hi)) = (ks.iter().copied().reduce(f64::min), ks.iter().copied().reduce(f64::max)) {
            if hi - lo > tol.v {
                report.push(Violation::new("kappa_function_of_y", format!("x={}", ys[i]), hi - lo));
            }
        }
        i = j + 1;
    }
    for v in x.alpha.violations(tol) {
        if allow_invalid_alpha {
            report.warn(v);
        } else {
            report.push(v);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    /// adiss data at t = 0 (knots -2, 0, 2, 4)
    fn adiss_x0(alpha: AlphaFn) -> LagrangianX {
        let g = vec![-2.0, 0.0, 2.0, 4.0];
        let y = PwLinear::from_samples(true, g.clone(), vec![-2.0, -1.0, 1.0, 2.0]).unwrap();
        let u = PwLinear::new(false, g.clone(), vec![1.0, 0.0, 0.0, -1.0]).unwrap();
        let h = PwLinear::new(false, g.clone(), vec![0.0, 1.0, 1.0, 2.0]).unwrap();
        LagrangianX::new(y, u, h.clone(), h, alpha, &tol()).unwrap()
    }

    #[test]
    fn adiss_initial_state_is_in_f0() {
        let x = adiss_x0(AlphaFn::Constant(1.0 / 3.0));
        let r = validate_lagrangian(&x, &tol(), false);
        assert!(r.is_valid(), "{r:?}");
        assert!(x.in_f0(&tol()));
        assert_eq!(x.v_inf(), 2.0);
    }

    #[test]
    fn broken_identity_is_reported() {
        let x = adiss_x0(AlphaFn::One);
        let bad = LagrangianX::new(
            x.y().clone(),
            x.u().map_bounded(|v| 2.0 * v),
            x.h().clone(),
            x.v().clone(),
            AlphaFn::One,
            &tol(),
        )
        .unwrap();
        assert!(validate_lagrangian(&bad, &tol(), false).has("y_xi_v_xi_eq_u_xi_sq"));
    }

    #[test]
    fn relabel_then_normalize_round_trips() {
        let t = tol();
        let x = adiss_x0(AlphaFn::Constant(0.5));
        let f = Relabelling::new(PwLinear::from_samples(true, vec![-1.0, 1.0, 3.0], vec![-1.5, 1.0, 3.5]).unwrap(), &t)
            .unwrap();
        let xf = x.relabel(&f, &t).unwrap();
        assert!(validate_lagrangian(&xf, &t, false).is_valid());
        assert!(!xf.in_f0(&t));
        let (p, _) = xf.pi_normalize(&t).unwrap();
        assert!(lag_comparison_norm(&p, &x) < 1e-12);
    }

    #[test]
    fn non_monotone_relabelling_is_rejected() {
        let f = PwLinear::from_samples(true, vec![0.0, 1.0], vec![0.0, -1.0]).unwrap();
        assert!(matches!(Relabelling::new(f, &tol()), Err(HsError::NotMonotone(_))));
    }

    #[test]
    fn comparison_norm_counts_alpha() {
        let a = adiss_x0(AlphaFn::Constant(1.0 / 3.0));
        let b = adiss_x0(AlphaFn::Constant(0.0));
        assert!((lag_comparison_norm(&a, &b) - 1.0 / 3.0).abs() < 1e-15);
    }
}
