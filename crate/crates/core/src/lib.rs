//! Exact α-dissipative solutions of the Hunter–Saxton equation
//! `u_t + u u_x = ½ ∫_{-∞}^x u_x² dx` on piecewise-linear initial data,
//! together with the Lagrangian Lipschitz metric machinery built on them.
//!
//! Pipeline: Eulerian data `(u, μ, ν, α)` → [`transform::to_lagrangian`] →
//! [`solver::evolve`] (closed-form characteristics between wave-breaking
//! events) → [`transform::to_eulerian`]. The [`metric`] module compares two
//! solutions via the functional `D`, infimum brackets over relabellings and
//! the bounded-Lipschitz norm of measures.

pub mod error;
pub mod eulerian;
pub mod golden;
pub mod lagrangian;
pub mod metric;
pub mod piecewise;
pub mod solver;
pub mod transform;

pub use error::{HsError, Result};
pub use eulerian::{AlphaFn, EulerianY, EulerianZ};
pub use lagrangian::{LagrangianX, Relabelling};
pub use piecewise::{CellwiseAffine, Measure, PwConstant, PwLinear, SignedMeasure};
pub use solver::Trajectory;

use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Breakpoints closer than this are merged.
    pub x: f64,
    /// Function values / identities are compared to this.
    pub v: f64,
    /// Cells with `y_ξ` below this are treated as collapsed.
    pub slope_floor: f64,
    /// Piecewise α must stay below `1 - alpha_eps`.
    pub alpha_eps: f64,
    /// Breaking times closer than this are merged into one event.
    pub t: f64,
    /// Slack for metric inequalities.
    pub metric: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { x: 1e-12, v: 1e-10, slope_floor: 1e-12, alpha_eps: 1e-9, t: 1e-12, metric: 1e-7 }
    }
}

impl Tolerances {
    /// Scale every tolerance by the same factor (used by the `--tol` CLI flag).
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            x: self.x * factor,
            v: self.v * factor,
            slope_floor: self.slope_floor * factor,
            alpha_eps: self.alpha_eps,
            t: self.t * factor,
            metric: self.metric * factor,
        }
    }
}
