//! Worked examples with known closed-form solutions: initial data plus the
//! exact `u`, `y`, `U`, `V` as functions of position/label and time.
//!
//! Branch tables are right-closed: cell `k` is `(b_{k-1}, b_k]`.
//!
//! * [`exmp1`]: a tent in `u`, one breaking at `(t, x) = (2, 2)` with `α = ½`.
//! * [`adiss`]: two simultaneous breakings at `x = ±1`, `t = 2`; any `α` with
//!   `α(±1) = ⅓` gives the same solution.
//! * [`alphfn1`]: `α(13/16) = 1`, `α(1) = ½` — mixing full and partial
//!   dissipation breaks relabelling invariance of `L̂ ∘ M`.
//! * [`nu_invariance`]: the same `(u, μ)` with two different `ν`.

use crate::eulerian::{AlphaFn, EulerianY};
use crate::lagrangian::LagrangianX;
use crate::piecewise::{Atom, Measure, PwConstant, PwLinear};
use crate::Tolerances;

/// Value of the branch containing `x`, cells `(b_{k-1}, b_k]`.
pub fn branch(x: f64, breaks: &[f64], vals: &[f64]) -> f64 {
    debug_assert_eq!(vals.len(), breaks.len() + 1);
    vals[breaks.iter().filter(|&&b| x > b).count()]
}

fn ac(u: &PwLinear, tol: &Tolerances) -> Measure {
    let d = u.derivative().map(|s| s * s);
    Measure::absolutely_continuous(d, tol).expect("compactly supported density")
}

pub mod exmp1 {
    use super::*;

    pub const BREAK_TIME: f64 = 2.0;
    pub const BREAK_X: f64 = 2.0;

    pub fn alpha() -> AlphaFn {
        AlphaFn::Constant(0.5)
    }

    pub fn initial(tol: &Tolerances) -> EulerianY {
        let u = PwLinear::new(false, vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let mu = ac(&u, tol);
        EulerianY { u, nu: mu.clone(), mu, alpha: alpha() }
    }

    /// `u(x, t)`; at `t = 2` the middle-right cell has shrunk to `x = 2`
    /// where `u(2, 2) = 1`.
    pub fn u(x: f64, t: f64) -> f64 {
        if t <= 2.0 {
            // at t = 2 the third cell is empty and its (0/0) entry unused
            let b = [-0.25 * t * t - 1.0, t, 0.25 * t * t + 1.0];
            let v = [-0.5 * t, (2.0 - t + 2.0 * x) / (t + 2.0), (-2.0 - t + 2.0 * x) / (t - 2.0), 0.5 * t];
            branch(x, &b, &v)
        } else {
            let b = [
                -3.0 / 16.0 * t * t - 0.25 * t - 0.75,
                t * t / 16.0 + 0.75 * t + 0.25,
                3.0 / 16.0 * t * t + 0.25 * t + 0.75,
            ];
            let v = [
                -0.25 - 0.375 * t,
                (2.0 - t + 4.0 * x) / (2.0 * (t + 2.0)),
                (-2.0 - t + 2.0 * x) / (t - 2.0),
                0.25 + 0.375 * t,
            ];
            branch(x, &b, &v)
        }
    }
}

pub mod adiss {
    use super::*;

    pub const BREAK_TIME: f64 = 2.0;
    pub const V_INF_BEFORE: f64 = 2.0;
    pub const V_INF_AFTER: f64 = 4.0 / 3.0;

    pub fn alpha_a() -> AlphaFn {
        AlphaFn::Constant(1.0 / 3.0)
    }

    /// Agrees with `α_A` at both breaking points `x = ±1` only.
    pub fn alpha_b() -> AlphaFn {
        AlphaFn::pw(vec![-1.0, 0.0, 1.0], vec![1.0 / 3.0, 0.5, 1.0 / 3.0], None).unwrap()
    }

    pub fn initial(alpha: AlphaFn, tol: &Tolerances) -> EulerianY {
        let u = PwLinear::new(false, vec![-2.0, -1.0, 1.0, 2.0], vec![1.0, 0.0, 0.0, -1.0]).unwrap();
        let mu = ac(&u, tol);
        EulerianY { u, nu: mu.clone(), mu, alpha }
    }

    /// The Lagrangian initial data (already in `ℱ₀`).
    pub fn initial_lagrangian(alpha: AlphaFn) -> LagrangianX {
        let g = vec![-2.0, 0.0, 2.0, 4.0];
        let by: Vec<f64> = g.iter().zip([-2.0, -1.0, 1.0, 2.0]).map(|(x, y)| y - x).collect();
        let h = vec![0.0, 1.0, 1.0, 2.0];
        LagrangianX::from_values(g, by, vec![1.0, 0.0, 0.0, -1.0], h.clone(), h, alpha).unwrap()
    }

    const B: [f64; 4] = [-2.0, 0.0, 2.0, 4.0];

    pub fn y(xi: f64, t: f64) -> f64 {
        let s = (t - 2.0).powi(2);
        let v = if t < 2.0 {
            [t - 0.25 * t * t + xi, -1.0 + s * xi / 8.0, -1.0 + xi, t - 0.25 * t * t + s * xi / 8.0, -2.0 - t + 0.25 * t * t + xi]
        } else {
            let c = 1.0 / 3.0 + 2.0 / 3.0 * t - t * t / 6.0;
            [c + xi, -1.0 + s * xi / 12.0, -1.0 + xi, c + s * xi / 12.0, -7.0 / 3.0 - 2.0 / 3.0 * t + t * t / 6.0 + xi]
        };
        branch(xi, &B, &v)
    }

    pub fn u_lag(xi: f64, t: f64) -> f64 {
        let v = if t < 2.0 {
            [1.0 - 0.5 * t, 0.25 * (t - 2.0) * xi, 0.0, 1.0 - 0.5 * t + 0.25 * (t - 2.0) * xi, -1.0 + 0.5 * t]
        } else {
            let c = 2.0 / 3.0 - t / 3.0;
            [c, (t - 2.0) * xi / 6.0, 0.0, c + (t - 2.0) * xi / 6.0, -c]
        };
        branch(xi, &B, &v)
    }

    pub fn h(xi: f64) -> f64 {
        branch(xi, &B, &[0.0, 1.0 + 0.5 * xi, 1.0, 0.5 * xi, 2.0])
    }

    pub fn v(xi: f64, t: f64) -> f64 {
        if t < 2.0 {
            h(xi)
        } else {
            branch(xi, &B, &[0.0, 2.0 / 3.0 + xi / 3.0, 2.0 / 3.0, xi / 3.0, 4.0 / 3.0])
        }
    }
}

pub mod alphfn1 {
    use super::*;

    pub const EVENT_TIMES: [f64; 2] = [1.0, 2.0];
    pub const V_INF_AFTER: f64 = 0.25;

    /// Two-point data `α(13/16) = 1`, `α(1) = ½`, interpolated linearly and
    /// extended by constants. Not admissible: it mixes the value `1` with
    /// values below `1`.
    pub fn alpha() -> AlphaFn {
        AlphaFn::pw(vec![13.0 / 16.0, 1.0], vec![1.0, 0.5], None).unwrap()
    }

    pub fn initial(tol: &Tolerances) -> EulerianY {
        let u = PwLinear::new(false, vec![0.0, 0.5, 1.0], vec![1.0, 0.5, -0.5]).unwrap();
        let mu = ac(&u, tol);
        EulerianY { u, nu: mu.clone(), mu, alpha: alpha() }
    }

    const B: [f64; 3] = [0.0, 1.0, 3.5];

    pub fn y(xi: f64, t: f64) -> f64 {
        let v = if t < 1.0 {
            let c = -5.0 / 16.0 * t * t + t;
            [c + xi, c + (t - 2.0).powi(2) * xi / 8.0, 0.3 + 0.9 * t - 31.0 / 80.0 * t * t + (t - 1.0).powi(2) * xi / 5.0, -2.5 - 0.5 * t + 5.0 / 16.0 * t * t + xi]
        } else if t < 2.0 {
            let c = 0.25 + 0.5 * t - t * t / 16.0;
            [c + xi, c + (t - 2.0).powi(2) * xi / 8.0, 0.75 + t * t / 16.0, -2.75 + t * t / 16.0 + xi]
        } else {
            let c = 0.375 + 0.375 * t - t * t / 32.0;
            [c + xi, c + (t - 2.0).powi(2) * xi / 16.0, 0.625 + 0.125 * t + t * t / 32.0, -23.0 / 8.0 + 0.125 * t + t * t / 32.0 + xi]
        };
        branch(xi, &B, &v)
    }

    pub fn u_lag(xi: f64, t: f64) -> f64 {
        let v = if t < 1.0 {
            let c = 1.0 - 0.625 * t;
            [c, c + 0.25 * (t - 2.0) * xi, 0.4 * (t - 1.0) * xi + 0.9 - 31.0 / 40.0 * t, -0.5 + 0.625 * t]
        } else if t < 2.0 {
            let c = 0.5 - 0.125 * t;
            [c, c + 0.25 * (t - 2.0) * xi, 0.125 * t, 0.125 * t]
        } else {
            let c = 0.375 - t / 16.0;
            [c, c + 0.125 * (t - 2.0) * xi, 0.125 + t / 16.0, 0.125 + t / 16.0]
        };
        branch(xi, &B, &v)
    }

    pub fn h(xi: f64) -> f64 {
        branch(xi, &B, &[0.0, 0.5 * xi, -0.3 + 0.8 * xi, 2.5])
    }

    pub fn v(xi: f64, t: f64) -> f64 {
        if t < 1.0 {
            h(xi)
        } else if t < 2.0 {
            branch(xi, &B, &[0.0, 0.5 * xi, 0.5, 0.5])
        } else {
            branch(xi, &B, &[0.0, 0.25 * xi, 0.25, 0.25])
        }
    }

    /// `X̄ = L̂(M(X(2)))`: all mass has collapsed onto `x = 1`.
    pub fn x_bar() -> LagrangianX {
        let g = vec![1.0, 3.5];
        LagrangianX::from_values(g, vec![0.0, -2.5], vec![0.25, 0.25], vec![0.0, 2.5], vec![0.0, 0.25], alpha()).unwrap()
    }

    /// The only candidate with `ȳ ∘ f = y(·, 2)` and `V̄ ∘ f = V(·, 2)`; it is
    /// not strictly increasing and `H̄ ∘ f ≠ H`.
    pub fn f_candidate(xi: f64) -> f64 {
        branch(xi, &B, &[1.0 + xi, 1.0 + 2.5 * xi, 3.5, xi])
    }
}

pub mod nu_invariance {
    use super::*;

    pub const BREAK_TIME: f64 = 2.0;

    pub fn alpha() -> AlphaFn {
        AlphaFn::Constant(0.5)
    }

    pub fn u0() -> PwLinear {
        PwLinear::new(false, vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]).unwrap()
    }

    /// `μ₀ = u₀ₓ² dx + δ_{-½} + δ_{½}`.
    pub fn mu0(tol: &Tolerances) -> Measure {
        let d = PwConstant::compact(vec![-1.0, 1.0], vec![1.0]).unwrap();
        Measure::new(d, vec![Atom { x: -0.5, mass: 1.0 }, Atom { x: 0.5, mass: 1.0 }], tol).unwrap()
    }

    /// `ν = μ₀ + 3·1_{(0,1]} u₀ₓ² dx + δ_{½}`.
    pub fn nu_b(tol: &Tolerances) -> Measure {
        let d = PwConstant::compact(vec![-1.0, 0.0, 1.0], vec![1.0, 4.0]).unwrap();
        Measure::new(d, vec![Atom { x: -0.5, mass: 1.0 }, Atom { x: 0.5, mass: 2.0 }], tol).unwrap()
    }

    pub fn initial_a(tol: &Tolerances) -> EulerianY {
        let mu = mu0(tol);
        EulerianY { u: u0(), nu: mu.clone(), mu, alpha: alpha() }
    }

    pub fn initial_b(tol: &Tolerances) -> EulerianY {
        EulerianY { u: u0(), mu: mu0(tol), nu: nu_b(tol), alpha: alpha() }
    }

    const BA: [f64; 7] = [-1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
    const BB: [f64; 7] = [-1.0, 0.0, 1.0, 2.0, 4.5, 6.5, 9.0];

    pub fn v_a(xi: f64, t: f64) -> f64 {
        if t < 2.0 {
            branch(xi, &BA, &[0.0, 0.5 + 0.5 * xi, 0.5 + xi, 1.0 + 0.5 * xi, 1.0 + 0.5 * xi, -0.5 + xi, 1.5 + 0.5 * xi, 4.0])
        } else {
            branch(xi, &BA, &[0.0, 0.25 + 0.25 * xi, 0.25 + xi, 1.0 + 0.25 * xi, 0.5 + 0.5 * xi, -1.0 + xi, 1.0 + 0.5 * xi, 3.5])
        }
    }

    pub fn v_b(xi: f64, t: f64) -> f64 {
        if t < 2.0 {
            branch(xi, &BB, &[0.0, 0.5 + 0.5 * xi, 0.5 + xi, 1.0 + 0.5 * xi, 1.6 + 0.2 * xi, 0.25 + 0.5 * xi, 2.2 + 0.2 * xi, 4.0])
        } else {
            branch(xi, &BB, &[0.0, 0.25 + 0.25 * xi, 0.25 + xi, 1.0 + 0.25 * xi, 1.1 + 0.2 * xi, -0.25 + 0.5 * xi, 1.7 + 0.2 * xi, 3.5])
        }
    }

    pub fn u_a(xi: f64, t: f64) -> f64 {
        let v = if t < 2.0 {
            [
                1.0 - t,
                0.5 - 0.75 * t + 0.25 * (t - 2.0) * xi,
                0.5 - 0.75 * t + 0.5 * t * xi,
                1.0 - 0.5 * t + 0.25 * (t - 2.0) * xi,
                -1.0 - 0.5 * t + 0.25 * (t + 2.0) * xi,
                0.5 - 1.25 * t + 0.5 * t * xi,
                -1.5 - 0.25 * t + 0.25 * (t + 2.0) * xi,
                1.0 + t,
            ]
        } else {
            [
                0.75 - 0.875 * t,
                0.5 - 0.75 * t + 0.125 * (t - 2.0) * xi,
                0.5 - 0.75 * t + 0.5 * t * xi,
                0.75 - 0.375 * t + 0.125 * (t - 2.0) * xi,
                -0.75 - 0.625 * t + 0.25 * (t + 2.0) * xi,
                0.75 - 11.0 / 8.0 * t + 0.5 * t * xi,
                -1.25 - 0.375 * t + 0.25 * (t + 2.0) * xi,
                1.25 + 0.875 * t,
            ]
        };
        branch(xi, &BA, &v)
    }

    pub fn y_a(xi: f64, t: f64) -> f64 {
        let (m, p, t2) = ((t - 2.0).powi(2), (t + 2.0).powi(2), t * t);
        let v = if t < 2.0 {
            [
                t - 0.5 * t2 + xi,
                -0.5 + 0.5 * t - 0.375 * t2 + m * xi / 8.0,
                -0.5 + 0.5 * t - 0.375 * t2 + 0.25 * t2 * xi,
                -1.0 + t - 0.25 * t2 + m * xi / 8.0,
                -1.0 - t - 0.25 * t2 + p * xi / 8.0,
                0.5 + 0.5 * t - 0.625 * t2 + 0.25 * t2 * xi,
                -1.5 - 1.5 * t - 0.125 * t2 + p * xi / 8.0,
                -4.0 + t + 0.5 * t2 + xi,
            ]
        } else {
            [
                0.25 + 0.75 * t - 7.0 / 16.0 * t2 + xi,
                -0.5 + 0.5 * t - 0.375 * t2 + m * xi / 16.0,
                -0.5 + 0.5 * t - 0.375 * t2 + 0.25 * t2 * xi,
                -0.75 + 0.75 * t - 3.0 / 16.0 * t2 + m * xi / 16.0,
                -1.25 - 0.75 * t - 5.0 / 16.0 * t2 + p * xi / 8.0,
                0.25 + 0.75 * t - 11.0 / 16.0 * t2 + 0.25 * t2 * xi,
                -1.75 - 1.25 * t - 3.0 / 16.0 * t2 + p * xi / 8.0,
                -4.25 + 1.25 * t + 7.0 / 16.0 * t2 + xi,
            ]
        };
        branch(xi, &BA, &v)
    }

    pub fn u_b(xi: f64, t: f64) -> f64 {
        let v = if t < 2.0 {
            [
                1.0 - t,
                0.5 - 0.75 * t + 0.25 * (t - 2.0) * xi,
                0.5 - 0.75 * t + 0.5 * t * xi,
                1.0 - 0.5 * t + 0.25 * (t - 2.0) * xi,
                -0.4 - 0.2 * t + 0.1 * (t + 2.0) * xi,
                0.5 - 0.875 * t + 0.25 * t * xi,
                -0.8 + 0.1 * t + 0.1 * (t + 2.0) * xi,
                1.0 + t,
            ]
        } else {
            [
                0.75 - 0.875 * t,
                0.5 - 0.75 * t + 0.125 * (t - 2.0) * xi,
                0.5 - 0.75 * t + 0.5 * t * xi,
                0.75 - 0.375 * t + 0.125 * (t - 2.0) * xi,
                -0.15 - 13.0 / 40.0 * t + 0.1 * (t + 2.0) * xi,
                0.75 - t + 0.25 * t * xi,
                -0.55 - t / 40.0 + 0.1 * (t + 2.0) * xi,
                1.25 + 0.875 * t,
            ]
        };
        branch(xi, &BB, &v)
    }

    pub fn y_b(xi: f64, t: f64) -> f64 {
        let (m, p, t2) = ((t - 2.0).powi(2), (t + 2.0).powi(2), t * t);
        let v = if t < 2.0 {
            [
                t - 0.5 * t2 + xi,
                -0.5 + 0.5 * t - 0.375 * t2 + m * xi / 8.0,
                -0.5 + 0.5 * t - 0.375 * t2 + 0.25 * t2 * xi,
                -1.0 + t - 0.25 * t2 + m * xi / 8.0,
                -0.4 - 0.4 * t - 0.1 * t2 + p * xi / 20.0,
                0.5 + 0.5 * t - 7.0 / 16.0 * t2 + 0.125 * t2 * xi,
                -0.8 - 0.8 * t + 0.05 * t2 + p * xi / 20.0,
                -8.0 + t + 0.5 * t2 + xi,
            ]
        } else {
            [
                0.25 + 0.75 * t - 7.0 / 16.0 * t2 + xi,
                -0.5 + 0.5 * t - 0.375 * t2 + m * xi / 16.0,
                -0.5 + 0.5 * t - 0.375 * t2 + 0.25 * t2 * xi,
                -0.75 + 0.75 * t - 3.0 / 16.0 * t2 + m * xi / 16.0,
                -0.65 - 0.15 * t - 13.0 / 80.0 * t2 + p * xi / 20.0,
                0.25 + 0.75 * t - 0.5 * t2 + 0.125 * t2 * xi,
                -1.05 - 0.55 * t - t2 / 80.0 + p * xi / 20.0,
                -8.25 + 1.25 * t + 7.0 / 16.0 * t2 + xi,
            ]
        };
        branch(xi, &BB, &v)
    }

    /// Eulerian velocity, shared by both `ν`-choices.
    pub fn u(x: f64, t: f64) -> f64 {
        let t2 = t * t;
        if t < 2.0 {
            let b = [
                -1.0 + t - 0.5 * t2,
                -0.5 + 0.5 * t - 0.375 * t2,
                -0.5 + 0.5 * t - 0.125 * t2,
                0.0,
                0.5 + 0.5 * t + 0.125 * t2,
                0.5 + 0.5 * t + 0.375 * t2,
                1.0 + t + 0.5 * t2,
            ];
            let v = [
                1.0 - t,
                (t + 2.0 * x) / (t - 2.0),
                if t > 0.0 { (2.0 - t + 4.0 * x) / (2.0 * t) } else { f64::NAN },
                2.0 * x / (t - 2.0),
                2.0 * x / (t + 2.0),
                if t > 0.0 { (-2.0 - t + 4.0 * x) / (2.0 * t) } else { f64::NAN },
                (t + 2.0 * x) / (t + 2.0),
                1.0 + t,
            ];
            branch(x, &b, &v)
        } else {
            let b = [
                -0.75 + 0.75 * t - 7.0 / 16.0 * t2,
                -0.5 + 0.5 * t - 0.375 * t2,
                -0.5 + 0.5 * t - 0.125 * t2,
                -0.25 + 0.25 * t - t2 / 16.0,
                0.25 + 0.75 * t + t2 / 16.0,
                0.25 + 0.75 * t + 5.0 / 16.0 * t2,
                0.75 + 1.25 * t + 7.0 / 16.0 * t2,
            ];
            let v = [
                0.75 - 0.875 * t,
                (t + 2.0 * x) / (t - 2.0),
                (2.0 - t + 4.0 * x) / (2.0 * t),
                2.0 * x / (t - 2.0),
                (2.0 - t + 4.0 * x) / (2.0 * (t + 2.0)),
                (-2.0 - 3.0 * t + 8.0 * x) / (4.0 * t),
                (2.0 + t + 4.0 * x) / (2.0 * (t + 2.0)),
                1.25 + 0.875 * t,
            ];
            branch(x, &b, &v)
        }
    }
}
