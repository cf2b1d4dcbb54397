//! The maps between Eulerian and Lagrangian coordinates.
//!
//! `to_lagrangian` uses the generalised inverse
//! `y(ξ) = sup{x : x + ν((-∞, x)) < ξ}`, so every atom of `ν` becomes a flat
//! cell of `y` whose length equals the atom's mass; `to_eulerian` pushes
//! `V_ξ dξ` and `H_ξ dξ` forward along `y`.

use crate::error::{HsError, Result};
use crate::eulerian::EulerianY;
use crate::lagrangian::{LagrangianX, Relabelling};
use crate::piecewise::{common_refinement, pushforward, PwLinear};
use crate::Tolerances;

/// `L̂(Y)`: the output lies in `ℱ₀` (`y + H = id`).
pub fn to_lagrangian(e: &EulerianY, tol: &Tolerances) -> Result<LagrangianX> {
    if e.u.is_identity_shifted() {
        return Err(HsError::ShapeMismatch("u must be bounded".into()));
    }
    let mu_atoms: Vec<f64> = e.mu.atoms().iter().map(|a| a.x).collect();
    let nu_atoms: Vec<f64> = e.nu.atoms().iter().map(|a| a.x).collect();
    let pts = common_refinement(
        &[e.u.grid(), e.mu.density().grid(), e.nu.density().grid(), &mu_atoms, &nu_atoms],
        tol.x,
    );
    if pts.is_empty() {
        let c = e.u.eval(0.0);
        return LagrangianX::new(PwLinear::id(), PwLinear::constant(c), PwLinear::constant(0.0), PwLinear::constant(0.0), e.alpha.clone(), tol);
    }

    for a in e.mu.atoms() {
        if e.nu.atom_at(a.x, tol.x) <= 0.0 {
            return Err(HsError::DominanceViolation(format!("μ has an atom at {} where ν has none", a.x)));
        }
    }

    let (mut xi, mut ys, mut us, mut vs) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut nu_acc = 0.0;
    let mut mu_acc = 0.0;
    for (k, &p) in pts.iter().enumerate() {
        if k > 0 {
            let (a, b) = (pts[k - 1], p);
            let m = 0.5 * (a + b);
            let (dm, dn) = (e.mu.density().eval(m), e.nu.density().eval(m));
            if dm > dn + tol.v * dn.abs().max(1.0) {
                return Err(HsError::DominanceViolation(format!("μ density {dm} exceeds ν density {dn} on ({a}, {b})")));
            }
            nu_acc += dn * (b - a);
            mu_acc += dm * (b - a);
        }
        let up = e.u.eval(p);
        xi.push(p + nu_acc);
        ys.push(p);
        us.push(up);
        vs.push(mu_acc);
        let (an, am) = (e.nu.atom_at(p, tol.x), e.mu.atom_at(p, tol.x));
        if an > 0.0 {
            if am > an + tol.v * an.max(1.0) {
                return Err(HsError::DominanceViolation(format!("μ atom {am} exceeds ν atom {an} at {p}")));
            }
            nu_acc += an;
            mu_acc += am;
            xi.push(p + nu_acc);
            ys.push(p);
            us.push(up);
            vs.push(mu_acc);
        }
    }
    let by: Vec<f64> = ys.iter().zip(&xi).map(|(y, x)| y - x).collect();
    let h: Vec<f64> = by.iter().map(|b| -b).collect();
    LagrangianX::from_values(xi, by, us, h, vs, e.alpha.clone())
}

/// `M(X)`: `u(y(ξ)) = U(ξ)`, `μ = y#(V_ξ dξ)`, `ν = y#(H_ξ dξ)`.
pub fn to_eulerian(x: &LagrangianX, tol: &Tolerances) -> Result<EulerianY> {
    let g = x.grid();
    let ys = x.y().samples();
    let us = x.u().values();
    if let Some((i, w)) = ys.windows(2).enumerate().find(|(_, w)| w[1] < w[0] - tol.x) {
        return Err(HsError::NotMonotone(format!("y decreases on cell {i}: {} -> {}", w[0], w[1])));
    }
    let (mut xs, mut uvals): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for i in 0..g.len() {
        match xs.last() {
            Some(&l) if ys[i] - l <= tol.x => {
                let u0 = *uvals.last().unwrap();
                if (us[i] - u0).abs() > tol.v * u0.abs().max(1.0) {
                    return Err(HsError::InconsistentU(format!(
                        "U takes values {u0} and {} where y = {l}",
                        us[i]
                    )));
                }
            }
            _ => {
                xs.push(ys[i]);
                uvals.push(us[i]);
            }
        }
    }
    let u = PwLinear::new(false, xs, uvals)?;
    let mu = pushforward(x.y(), &x.v().derivative(), tol)?;
    let nu = pushforward(x.y(), &x.h().derivative(), tol)?;
    Ok(EulerianY { u, mu, nu, alpha: x.alpha().clone() })
}

/// Component that failed when testing whether two states are relabellings.
#[derive(Debug, Clone, PartialEq)]
pub struct RelabelMismatch {
    pub component: &'static str,
    pub magnitude: f64,
    /// The canonical candidate `(y_A + H_A)⁻¹ ∘ (y_B + H_B)`, when it exists.
    pub candidate: Option<Relabelling>,
}

impl std::fmt::Display for RelabelMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}∘f differs from {} by {:e}", self.component, self.component, self.magnitude)
    }
}

/// The only possible `f` with `X_A ∘ f = X_B` is
/// `(y_A + H_A)⁻¹ ∘ (y_B + H_B)`; it is built and then verified.
pub fn relabelling_match(a: &LagrangianX, b: &LagrangianX, tol: &Tolerances) -> std::result::Result<Relabelling, RelabelMismatch> {
    let fail = |component, magnitude, candidate| RelabelMismatch { component, magnitude, candidate };
    let da = a.alpha().sup_diff(b.alpha());
    if da > tol.v {
        return Err(fail("alpha", da, None));
    }
    let build = || -> Result<Relabelling> {
        let sa = a.y().add(a.h(), tol)?;
        let sb = b.y().add(b.h(), tol)?;
        Relabelling::new(sa.invert(tol)?.compose(&sb, tol)?, tol)
    };
    let f = build().map_err(|_| fail("y+H", f64::INFINITY, None))?;
    let af = a.relabel(&f, tol).map_err(|_| fail("y+H", f64::INFINITY, None))?;
    let checks = [("y", af.y(), b.y()), ("U", af.u(), b.u()), ("H", af.h(), b.h()), ("V", af.v(), b.v())];
    for (name, p, q) in checks {
        let d = p.sup_norm_diff(q).unwrap_or(f64::INFINITY);
        let scale = q.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if d > tol.v * scale {
            return Err(fail(name, d, Some(f)));
        }
    }
    Ok(f)
}

pub fn is_relabelling_of(a: &LagrangianX, b: &LagrangianX, tol: &Tolerances) -> Option<Relabelling> {
    relabelling_match(a, b, tol).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulerian::{validate_eulerian, AlphaFn};
    use crate::lagrangian::validate_lagrangian;
    use crate::piecewise::{Atom, Measure, PwConstant};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn adiss_y0() -> EulerianY {
        let t = tol();
        let u = PwLinear::new(false, vec![-2.0, -1.0, 1.0, 2.0], vec![1.0, 0.0, 0.0, -1.0]).unwrap();
        let mu = Measure::absolutely_continuous(
            PwConstant::compact(vec![-2.0, -1.0, 1.0, 2.0], vec![1.0, 0.0, 1.0]).unwrap(),
            &t,
        )
        .unwrap();
        EulerianY { u, nu: mu.clone(), mu, alpha: AlphaFn::Constant(1.0 / 3.0) }
    }

    #[test]
    fn adiss_lagrangian_coordinates() {
        let x = to_lagrangian(&adiss_y0(), &tol()).unwrap();
        assert_eq!(x.grid(), &[-2.0, 0.0, 2.0, 4.0]);
        assert_eq!(x.y().samples(), vec![-2.0, -1.0, 1.0, 2.0]);
        assert_eq!(x.u().values(), &[1.0, 0.0, 0.0, -1.0]);
        assert_eq!(x.h().values(), &[0.0, 1.0, 1.0, 2.0]);
        assert_eq!(x.v().values(), &[0.0, 1.0, 1.0, 2.0]);
        assert!(x.in_f0(&tol()));
    }

    #[test]
    fn atoms_become_flat_cells() {
        let t = tol();
        let u = PwLinear::new(false, vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]).unwrap();
        let dens = PwConstant::compact(vec![-1.0, 1.0], vec![1.0]).unwrap();
        let mu = Measure::new(dens.clone(), vec![Atom { x: 0.5, mass: 1.0 }], &t).unwrap();
        let nu = Measure::new(dens, vec![Atom { x: 0.5, mass: 2.0 }], &t).unwrap();
        let e = EulerianY { u, mu, nu, alpha: AlphaFn::Constant(0.5) };
        assert!(validate_eulerian(&e, &t, false).is_valid());
        let x = to_lagrangian(&e, &t).unwrap();
        assert!(validate_lagrangian(&x, &t, false).is_valid());
        // flat cell [2, 4] at y = 1/2 carrying V_ξ = 1/2
        assert_eq!(x.y().eval(3.0), 0.5);
        assert_eq!(x.y().eval(4.0), 0.5);
        assert_eq!(x.v().eval(4.0) - x.v().eval(2.0), 1.0);
        let back = to_eulerian(&x, &t).unwrap();
        assert_eq!(back.mu.atoms(), &[Atom { x: 0.5, mass: 1.0 }]);
        assert_eq!(back.nu.atoms(), &[Atom { x: 0.5, mass: 2.0 }]);
        assert!(back.u.sup_norm_diff(&e.u).unwrap() < 1e-14);
    }

    #[test]
    fn dominance_is_enforced() {
        let t = tol();
        let mut e = adiss_y0();
        e.nu = Measure::zero();
        assert!(matches!(to_lagrangian(&e, &t), Err(HsError::DominanceViolation(_))));
    }

    #[test]
    fn inconsistent_u_on_flat_cell() {
        let t = tol();
        let x = LagrangianX::from_values(
            vec![0.0, 1.0],
            vec![0.0, -1.0],
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![0.0, 0.0],
            AlphaFn::One,
        )
        .unwrap();
        assert!(matches!(to_eulerian(&x, &t), Err(HsError::InconsistentU(_))));
    }

    #[test]
    fn relabelled_state_is_recognised() {
        let t = tol();
        let x = to_lagrangian(&adiss_y0(), &t).unwrap();
        let f = Relabelling::new(PwLinear::from_samples(true, vec![-1.0, 2.0], vec![-0.5, 3.0]).unwrap(), &t).unwrap();
        let xf = x.relabel(&f, &t).unwrap();
        let g = is_relabelling_of(&x, &xf, &t).expect("relabelling");
        assert!(g.map().sup_norm_diff(f.map()).unwrap() < 1e-12);
        let other = x.with_alpha(AlphaFn::Constant(0.0));
        assert_eq!(relabelling_match(&other, &xf, &t).unwrap_err().component, "alpha");
    }
}
