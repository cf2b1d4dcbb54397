//! Exact evolution in Lagrangian coordinates.
//!
//! Between wave-breaking events every characteristic obeys
//! `y_t = U`, `U_t = ½V − ¼V_∞`, `H_t = V_t = 0`, so on a segment starting at
//! `t₀` the state is a quadratic (in time) of the state at `t₀` and stays
//! piecewise linear on the same grid. A cell with `U_ξ < 0` breaks at
//! `τ = −2y_ξ/U_ξ` (measured from the segment start); at that moment the
//! cell collapses to a point `x` and its energy density is multiplied by
//! `1 − α(x)`.

use crate::error::{HsError, Result};
use crate::eulerian::{AlphaFn, EulerianY};
use crate::lagrangian::{validate_lagrangian, LagrangianX};
use crate::piecewise::locate;
use crate::transform::{to_eulerian, to_lagrangian};
use crate::Tolerances;
use serde::{Deserialize, Serialize};

/// Remaining time until breaking, per finite cell of `grid`.
///
/// `∞` marks cells that never break, `0` cells that are collapsed or have
/// already broken (`U_ξ ≥ 0`). A tiny positive value marks cells about to
/// break, which is how left limits at an event are represented.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakingSchedule {
    grid: Vec<f64>,
    remaining: Vec<f64>,
}

impl BreakingSchedule {
    pub fn new(grid: Vec<f64>, remaining: Vec<f64>) -> Result<Self> {
        if remaining.len() + 1 != grid.len().max(1) {
            return Err(HsError::ShapeMismatch(format!("{} breakpoints but {} cells", grid.len(), remaining.len())));
        }
        Ok(Self { grid, remaining })
    }

    /// Read the schedule off the state itself: `τ = −2y_ξ/U_ξ` where `U_ξ < 0`.
    pub fn from_state(x: &LagrangianX, tol: &Tolerances) -> Self {
        let s = x.slopes();
        let remaining = s
            .y
            .iter()
            .zip(&s.u)
            .map(|(&yx, &ux)| {
                if ux < 0.0 && yx > tol.slope_floor {
                    -2.0 * yx / ux
                } else if yx <= tol.slope_floor {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        Self { grid: x.grid().to_vec(), remaining }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn remaining(&self) -> &[f64] {
        &self.remaining
    }

    /// Value on the cell containing `x` (tails never break).
    pub fn at(&self, x: f64) -> f64 {
        let k = locate(&self.grid, x);
        if k == 0 || k == self.grid.len() {
            f64::INFINITY
        } else {
            self.remaining[k - 1]
        }
    }

    /// Cell values on a finer grid (midpoint lookup).
    pub fn refine_to(&self, grid: &[f64]) -> Vec<f64> {
        grid.windows(2).map(|w| self.at(0.5 * (w[0] + w[1]))).collect()
    }

    /// Cell `k` is in `𝒜 = {U_ξ ≥ 0}` iff it is not scheduled to break.
    pub fn is_settled(remaining: f64) -> bool {
        remaining == 0.0 || remaining == f64::INFINITY
    }
}

/// One wave-breaking event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    /// Indices of the finite cells that collapsed.
    pub cells: Vec<usize>,
    /// One entry per maximal run of collapsing cells.
    pub collapses: Vec<Collapse>,
    pub v_inf_before: f64,
    pub v_inf_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collapse {
    pub x: f64,
    pub alpha: f64,
    pub energy_before: f64,
    pub energy_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    t0: f64,
    y: Vec<f64>,
    u: Vec<f64>,
    h: Vec<f64>,
    v: Vec<f64>,
}

impl Segment {
    fn v_inf(&self) -> f64 {
        *self.v.last().unwrap()
    }

    /// Bounded-part values of `(y, U)` after time `s`.
    fn advance(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        let q = 0.25 * self.v_inf();
        let mut y = Vec::with_capacity(self.y.len());
        let mut u = Vec::with_capacity(self.u.len());
        for i in 0..self.y.len() {
            let acc = 0.5 * self.v[i] - q;
            y.push(self.y[i] + self.u[i] * s + 0.5 * acc * s * s);
            u.push(self.u[i] + acc * s);
        }
        (y, u)
    }
}

/// The full solution on `[0, horizon]`: a piecewise-quadratic-in-time
/// description on one fixed Lagrangian grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: Vec<f64>,
    alpha: AlphaFn,
    tau: Vec<f64>,
    segments: Vec<Segment>,
    events: Vec<Event>,
    horizon: f64,
    tol: Tolerances,
}

fn same_time(a: f64, b: f64, tol: &Tolerances) -> bool {
    (a - b).abs() <= tol.t * a.abs().max(b.abs()).max(1.0)
}

/// Breaking time of each finite cell measured from the state's own time.
pub fn breaking_times(x: &LagrangianX, tol: &Tolerances) -> Vec<f64> {
    BreakingSchedule::from_state(x, tol).remaining
}

/// Evolve `x0` on `[0, horizon]`. The state must lie in `ℱ` (the admissible
/// set for α is not enforced here, so bypassed α's still evolve).
pub fn evolve(x0: &LagrangianX, horizon: f64, tol: &Tolerances) -> Result<Trajectory> {
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(HsError::OutOfHorizon { t: horizon, horizon: f64::INFINITY });
    }
    let report = validate_lagrangian(x0, tol, true);
    if !report.is_valid() {
        let v = &report.violations[0];
        return Err(HsError::InvalidState(format!("{} at {} (magnitude {:e})", v.check, v.location, v.magnitude)));
    }
    let grid = x0.grid().to_vec();
    let tau = breaking_times(x0, tol);
    let mut seg = Segment {
        t0: 0.0,
        y: x0.y().values().to_vec(),
        u: x0.u().values().to_vec(),
        h: x0.h().values().to_vec(),
        v: x0.v().values().to_vec(),
    };

    let mut times: Vec<f64> = tau.iter().copied().filter(|t| *t > 0.0 && *t <= horizon + tol.t).collect();
    times.sort_by(|a, b| a.total_cmp(b));
    let mut clusters: Vec<f64> = Vec::new();
    for t in times {
        if !clusters.last().is_some_and(|&c| same_time(c, t, tol)) {
            clusters.push(t);
        }
    }

    let mut segments = Vec::with_capacity(clusters.len() + 1);
    let mut events = Vec::with_capacity(clusters.len());
    for te in clusters {
        let (mut y, mut u) = seg.advance(te - seg.t0);
        let breaking: Vec<bool> = tau.iter().map(|&t| t > 0.0 && t.is_finite() && same_time(t, te, tol)).collect();
        let mut inc: Vec<f64> = seg.v.windows(2).map(|w| w[1] - w[0]).collect();
        let mut collapses = Vec::new();
        let mut k = 0;
        while k < breaking.len() {
            if !breaking[k] {
                k += 1;
                continue;
            }
            let mut j = k;
            while j + 1 < breaking.len() && breaking[j + 1] {
                j += 1;
            }
            // cells k..=j share the points k..=j+1
            let pts = k..=j + 1;
            let n = (j + 2 - k) as f64;
            let xc = pts.clone().map(|p| y[p] + grid[p]).sum::<f64>() / n;
            let uc = pts.clone().map(|p| u[p]).sum::<f64>() / n;
            for p in pts {
                y[p] = xc - grid[p];
                u[p] = uc;
            }
            let a = x0.alpha().eval(xc);
            let before: f64 = inc[k..=j].iter().sum();
            for c in &mut inc[k..=j] {
                *c *= 1.0 - a;
            }
            collapses.push(Collapse { x: xc, alpha: a, energy_before: before, energy_after: inc[k..=j].iter().sum() });
            k = j + 1;
        }
        let mut v = Vec::with_capacity(seg.v.len());
        v.push(seg.v[0]);
        for c in &inc {
            v.push(v.last().unwrap() + c);
        }
        let v_inf_before = seg.v_inf();
        let next = Segment { t0: te, y, u, h: seg.h.clone(), v };
        events.push(Event {
            t: te,
            cells: breaking.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect(),
            collapses,
            v_inf_before,
            v_inf_after: next.v_inf(),
        });
        segments.push(std::mem::replace(&mut seg, next));
    }
    segments.push(seg);
    Ok(Trajectory { grid, alpha: x0.alpha().clone(), tau, segments, events, horizon, tol: *tol })
}

impl Trajectory {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn alpha(&self) -> &AlphaFn {
        &self.alpha
    }

    /// Absolute breaking time of each finite cell of the initial state.
    pub fn breaking_times(&self) -> &[f64] {
        &self.tau
    }

    fn check(&self, t: f64) -> Result<()> {
        if t < -self.tol.t || t > self.horizon + self.tol.t || t.is_nan() {
            return Err(HsError::OutOfHorizon { t, horizon: self.horizon });
        }
        Ok(())
    }

    fn build(&self, seg: &Segment, t: f64) -> LagrangianX {
        let s = t - seg.t0;
        let (y, u) = if same_time(t, seg.t0, &self.tol) { (seg.y.clone(), seg.u.clone()) } else { seg.advance(s) };
        LagrangianX::from_values(self.grid.clone(), y, u, seg.h.clone(), seg.v.clone(), self.alpha.clone())
            .expect("trajectory grid is valid")
    }

    fn segment_index(&self, t: f64) -> usize {
        let k = self.segments.partition_point(|s| s.t0 <= t || same_time(s.t0, t, &self.tol));
        k.max(1) - 1
    }

    /// `X(t)`. At an event time the returned state is already dissipated.
    pub fn state_at(&self, t: f64) -> Result<LagrangianX> {
        self.check(t)?;
        Ok(self.build(&self.segments[self.segment_index(t)], t))
    }

    /// `X(t⁻)`: at an event time, the state just before dissipation.
    pub fn state_before(&self, t: f64) -> Result<LagrangianX> {
        self.check(t)?;
        let k = self.segments.partition_point(|s| s.t0 < t && !same_time(s.t0, t, &self.tol));
        Ok(self.build(&self.segments[k.max(1) - 1], t))
    }

    /// `V(+∞, t)`.
    pub fn energy_at(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.segments[self.segment_index(t)].v_inf())
    }

    /// Remaining breaking times at `t` (or `t⁻` when `left_limit`).
    pub fn schedule_at(&self, t: f64, left_limit: bool) -> Result<BreakingSchedule> {
        self.check(t)?;
        let remaining = self
            .tau
            .iter()
            .map(|&tau| {
                if tau == f64::INFINITY {
                    f64::INFINITY
                } else if tau == 0.0 {
                    0.0
                } else if same_time(tau, t, &self.tol) {
                    if left_limit {
                        f64::MIN_POSITIVE
                    } else {
                        0.0
                    }
                } else if tau > t {
                    tau - t
                } else {
                    0.0
                }
            })
            .collect();
        BreakingSchedule::new(self.grid.clone(), remaining)
    }
}

/// `Y(t)` for each requested time: `M ∘ S_t ∘ L̂`.
pub fn evolve_eulerian(y0: &EulerianY, times: &[f64], tol: &Tolerances) -> Result<Vec<EulerianY>> {
    let x0 = to_lagrangian(y0, tol)?;
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let traj = evolve(&x0, horizon, tol)?;
    times.iter().map(|&t| to_eulerian(&traj.state_at(t)?, tol)).collect()
}
