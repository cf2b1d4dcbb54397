//! Stability functionals between two Lagrangian solutions.
//!
//! The functional `D` combines sup-norms of `y`, `U`, `H`, L² norms of the
//! derivatives `y_ξ`, `U_ξ`, and the L¹/L² norms of a function `G` that
//! tracks how far the two energy densities can drift apart through wave
//! breaking. `G` depends on where each solution has already broken
//! (`𝒜 = {U_ξ ≥ 0}`) and where both will break simultaneously (`ℬ`).

pub mod lipschitz;
pub mod optimize;
pub mod quotient;

use crate::error::{HsError, Result};
use crate::lagrangian::LagrangianX;
use crate::piecewise::{common_refinement, CellwiseAffine};
use crate::solver::BreakingSchedule;
use crate::Tolerances;
use serde::{Deserialize, Serialize};

pub use lipschitz::{bounded_lipschitz, W1InfNorm};
pub use optimize::{dhat_bracket, dhat_lower, euler_distance, euler_quotient_bracket, j_bracket, DistanceBracket, SearchOptions};
pub use quotient::{quotient_metric, quotient_metric_of};

/// Which of the three disjoint regions a cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Neither solution will break here any more (`𝒜_A ∩ 𝒜_B`).
    Settled,
    /// Both break here at the same future time (`ℬ`).
    Simultaneous,
    /// Everything else (`Ω^c`).
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellClass {
    pub region: Region,
    /// Cell lies in `𝒜_A` / `𝒜_B`.
    pub settled_a: bool,
    pub settled_b: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub grid: Vec<f64>,
    pub cells: Vec<CellClass>,
}

impl Classification {
    pub fn measure_of(&self, region: Region) -> f64 {
        self.grid.windows(2).zip(&self.cells).filter(|(_, c)| c.region == region).map(|(w, _)| w[1] - w[0]).sum()
    }
}

fn classify_cell(ra: f64, rb: f64, tol: &Tolerances) -> CellClass {
    let settled_a = BreakingSchedule::is_settled(ra);
    let settled_b = BreakingSchedule::is_settled(rb);
    let region = if settled_a && settled_b {
        Region::Settled
    } else if !settled_a && !settled_b && (ra - rb).abs() <= tol.t * ra.max(rb).max(1.0) {
        Region::Simultaneous
    } else {
        Region::Mixed
    };
    CellClass { region, settled_a, settled_b }
}

/// Which variant of `G` enters `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GVariant {
    /// The form valid for any pair of admissible α.
    General,
    /// The simplified form for two constant α's.
    ConstantAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DOptions {
    /// Include `‖α_A − α_B‖_∞` (switching it off gives `D̂`).
    pub alpha_term: bool,
    pub variant: GVariant,
}

impl Default for DOptions {
    fn default() -> Self {
        Self { alpha_term: true, variant: GVariant::General }
    }
}

/// Two states moved onto their common refinement (α breakpoints included),
/// with their remaining breaking times per cell.
struct Pair {
    grid: Vec<f64>,
    a: LagrangianX,
    b: LagrangianX,
    classes: Vec<CellClass>,
}

fn prepare(a: &LagrangianX, b: &LagrangianX, sa: &BreakingSchedule, sb: &BreakingSchedule, tol: &Tolerances) -> Pair {
    let grid = common_refinement(&[a.grid(), b.grid(), a.alpha().grid(), b.alpha().grid()], tol.x);
    let ra = sa.refine_to(&grid);
    let rb = sb.refine_to(&grid);
    let classes = ra.iter().zip(&rb).map(|(&x, &y)| classify_cell(x, y, tol)).collect();
    Pair { a: a.refine_to(&grid), b: b.refine_to(&grid), grid, classes }
}

/// Partition of the common grid into `𝒜_{A,B}`, `ℬ`, `Ω^c`, using the
/// breaking times read off the states.
pub fn classify_segments(a: &LagrangianX, b: &LagrangianX, tol: &Tolerances) -> Classification {
    classify_with(a, b, &BreakingSchedule::from_state(a, tol), &BreakingSchedule::from_state(b, tol), tol)
}

pub fn classify_with(a: &LagrangianX, b: &LagrangianX, sa: &BreakingSchedule, sb: &BreakingSchedule, tol: &Tolerances) -> Classification {
    let p = prepare(a, b, sa, sb, tol);
    Classification { grid: p.grid, cells: p.classes }
}

/// `‖α'_{A,B}‖_∞ = ‖α'_A‖_∞ ∨ ‖α'_B‖_∞`.
pub fn alpha_derivative_bound(a: &LagrangianX, b: &LagrangianX) -> f64 {
    a.alpha().derivative_sup().max(b.alpha().derivative_sup())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GReport {
    pub g: CellwiseAffine,
    pub l1: f64,
    pub l2: f64,
    pub classification: Classification,
}

/// Values at one label of every affine quantity entering `G`.
#[derive(Clone, Copy)]
struct Probe {
    dy: f64,
    du: f64,
    ya: f64,
    yb: f64,
    ua: f64,
    ub: f64,
    aa: f64,
    ab: f64,
}

impl Probe {
    fn at(p: &Pair, xi: f64) -> Self {
        let (ya, yb) = (p.a.y().bounded_at(xi), p.b.y().bounded_at(xi));
        let (ua, ub) = (p.a.u().bounded_at(xi), p.b.u().bounded_at(xi));
        Self { dy: ya - yb, du: ua - ub, ya, yb, ua, ub, aa: p.a.alpha().eval(xi), ab: p.b.alpha().eval(xi) }
    }

    fn lerp(a: &Self, b: &Self, s: f64) -> Self {
        let l = |x: f64, y: f64| x + s * (y - x);
        Self {
            dy: l(a.dy, b.dy),
            du: l(a.du, b.du),
            ya: l(a.ya, b.ya),
            yb: l(a.yb, b.yb),
            ua: l(a.ua, b.ua),
            ub: l(a.ub, b.ub),
            aa: l(a.aa, b.aa),
            ab: l(a.ab, b.ab),
        }
    }
}

struct CellData {
    dv: f64,
    vmin: f64,
    class: CellClass,
}

struct GConstants {
    dalpha: f64,
    lip: f64,
    v_l1_sum: f64,
}

fn g_general(c: &CellData, k: &GConstants, q: &Probe) -> f64 {
    let na = if c.class.settled_a { 0.0 } else { 1.0 };
    let nb = if c.class.settled_b { 0.0 } else { 1.0 };
    let main = match c.class.region {
        Region::Settled => c.dv,
        Region::Simultaneous => c.dv + k.dalpha * c.vmin + k.lip * c.vmin * (q.dy.abs() + q.du.abs()),
        Region::Mixed => {
            c.dv + c.vmin * (q.aa * na + q.ab * nb)
                + k.lip * c.vmin * (q.ya.abs() * na + q.yb.abs() * nb + (q.ua.abs() + q.ub.abs()) * (na + nb))
        }
    };
    let extra = if c.class.region == Region::Simultaneous {
        0.0
    } else {
        0.25 * k.lip * c.vmin * (k.v_l1_sum + 1.0) * (na + nb)
    };
    main + extra
}

/// Affine quantities whose sign changes create kinks in `G` on this cell.
fn kink_sources(c: &CellData, k: &GConstants, q: &Probe) -> Vec<f64> {
    if k.lip == 0.0 || c.vmin == 0.0 {
        return vec![];
    }
    match c.class.region {
        Region::Settled => vec![],
        Region::Simultaneous => vec![q.dy, q.du],
        Region::Mixed => vec![q.ya, q.yb, q.ua, q.ub],
    }
}

fn g_constant(c: &CellData, alpha_a: f64, alpha_b: f64, va: f64, vb: f64) -> f64 {
    let vd = |alpha: f64, v: f64, settled: bool| if settled { 0.0 } else { alpha * v };
    let (da, db) = (vd(alpha_a, va, c.class.settled_a), vd(alpha_b, vb, c.class.settled_b));
    let (ca, cb) = (va - da, vb - db);
    match c.class.region {
        Region::Settled => (va - vb).abs(),
        Region::Simultaneous => (ca - cb).abs() + (da - db).abs(),
        Region::Mixed => (ca - cb).abs() + da.max(db),
    }
}

fn build_g(p: &Pair, variant: GVariant) -> Result<GReport> {
    let sa = p.a.slopes();
    let sb = p.b.slopes();
    let k = GConstants {
        dalpha: p.a.alpha().sup_diff(p.b.alpha()),
        lip: alpha_derivative_bound(&p.a, &p.b),
        v_l1_sum: p.a.v().derivative().l1_norm()? + p.b.v().derivative().l1_norm()?,
    };
    let constants = match variant {
        GVariant::General => None,
        GVariant::ConstantAlpha => match (p.a.alpha().constant_value(), p.b.alpha().constant_value()) {
            (Some(x), Some(y)) => Some((x, y)),
            _ => return Err(HsError::UnsupportedAlpha("the constant-α form of G needs two constant α's".into())),
        },
    };
    let mut grid: Vec<f64> = Vec::with_capacity(p.grid.len());
    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(p.grid.len());
    if let Some(&first) = p.grid.first() {
        grid.push(first);
    }
    for (i, w) in p.grid.windows(2).enumerate() {
        let (va, vb) = (sa.v[i], sb.v[i]);
        let cell = CellData { dv: (va - vb).abs(), vmin: va.min(vb).max(0.0), class: p.classes[i].clone() };
        if let Some((aa, ab)) = constants {
            let g = g_constant(&cell, aa, ab, va, vb);
            grid.push(w[1]);
            pieces.push((g, g));
            continue;
        }
        let (qa, qb) = (Probe::at(p, w[0]), Probe::at(p, w[1]));
        let ends_a = kink_sources(&cell, &k, &qa);
        let ends_b = kink_sources(&cell, &k, &qb);
        let mut cuts: Vec<f64> = ends_a
            .iter()
            .zip(&ends_b)
            .filter(|(x, y)| **x * **y < 0.0)
            .map(|(x, y)| x / (x - y))
            .filter(|s| *s > 0.0 && *s < 1.0)
            .collect();
        cuts.sort_by(|x, y| x.total_cmp(y));
        cuts.dedup();
        let mut s_prev = 0.0;
        for s in cuts.into_iter().chain(std::iter::once(1.0)) {
            let xl = w[0] + s_prev * (w[1] - w[0]);
            let xr = if s == 1.0 { w[1] } else { w[0] + s * (w[1] - w[0]) };
            if xr - xl <= 0.0 {
                continue;
            }
            let gl = g_general(&cell, &k, &Probe::lerp(&qa, &qb, s_prev));
            let gr = g_general(&cell, &k, &Probe::lerp(&qa, &qb, s));
            grid.push(xr);
            pieces.push((gl, gr));
            s_prev = s;
        }
    }
    let g = CellwiseAffine::new(grid, pieces)?;
    Ok(GReport {
        l1: g.l1_norm(),
        l2: g.l2_norm(),
        g,
        classification: Classification { grid: p.grid.clone(), cells: p.classes.clone() },
    })
}

/// `G` with the breaking schedules read off the states.
pub fn compute_g(a: &LagrangianX, b: &LagrangianX, variant: GVariant, tol: &Tolerances) -> Result<GReport> {
    compute_g_with(a, b, &BreakingSchedule::from_state(a, tol), &BreakingSchedule::from_state(b, tol), variant, tol)
}

/// `G` with explicit schedules (needed for left limits at an event).
pub fn compute_g_with(
    a: &LagrangianX,
    b: &LagrangianX,
    sa: &BreakingSchedule,
    sb: &BreakingSchedule,
    variant: GVariant,
    tol: &Tolerances,
) -> Result<GReport> {
    build_g(&prepare(a, b, sa, sb, tol), variant)
}

/// Every term of `D`, plus the total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DReport {
    pub dy_sup: f64,
    pub du_sup: f64,
    pub dy_xi_l2: f64,
    pub du_xi_l2: f64,
    pub dh_sup: f64,
    pub g_l1: f64,
    pub g_l2: f64,
    pub dalpha: f64,
    pub total: f64,
}

pub fn semi_metric_d(a: &LagrangianX, b: &LagrangianX, opts: &DOptions, tol: &Tolerances) -> Result<DReport> {
    semi_metric_d_with(a, b, &BreakingSchedule::from_state(a, tol), &BreakingSchedule::from_state(b, tol), opts, tol)
}

pub fn semi_metric_d_with(
    a: &LagrangianX,
    b: &LagrangianX,
    sa: &BreakingSchedule,
    sb: &BreakingSchedule,
    opts: &DOptions,
    tol: &Tolerances,
) -> Result<DReport> {
    let p = prepare(a, b, sa, sb, tol);
    let g = build_g(&p, opts.variant)?;
    let sup = |x: &[f64], y: &[f64]| x.iter().zip(y).fold(0.0f64, |m, (s, t)| m.max((s - t).abs()));
    let (pa, pb) = (&p.a, &p.b);
    let (sa, sb) = (pa.slopes(), pb.slopes());
    let l2 = |x: &[f64], y: &[f64]| {
        p.grid.windows(2).zip(x.iter().zip(y)).map(|(w, (s, t))| (s - t).powi(2) * (w[1] - w[0])).sum::<f64>().sqrt()
    };
    let dalpha = pa.alpha().sup_diff(pb.alpha());
    let mut r = DReport {
        dy_sup: sup(pa.y().values(), pb.y().values()),
        du_sup: sup(pa.u().values(), pb.u().values()),
        dy_xi_l2: l2(&sa.y, &sb.y),
        du_xi_l2: l2(&sa.u, &sb.u),
        dh_sup: sup(pa.h().values(), pb.h().values()),
        g_l1: g.l1,
        g_l2: g.l2,
        dalpha,
        total: 0.0,
    };
    r.total = r.dy_sup + r.du_sup + r.dy_xi_l2 + r.du_xi_l2 + r.dh_sup + 0.25 * r.g_l1 + 0.5 * r.g_l2;
    if opts.alpha_term {
        r.total += dalpha;
    }
    Ok(r)
}

/// Constants attached to a pair of initial states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairConstants {
    /// `M_{A,B} = max ‖V_i(·, 0)‖_∞`.
    pub m: f64,
    /// `max(M, 1)`.
    pub m_bar: f64,
    /// `‖α'_{A,B}‖_∞`.
    pub lip: f64,
    /// Exponent of the Lipschitz estimate for `D`.
    pub c_ab: f64,
    /// Exponent of the Lipschitz estimate for `d̂`.
    pub r_ml: f64,
    /// Exponent `2M̄ + ¼` of the relabelling comparison estimate.
    pub relabel_rate: f64,
}

pub fn c_ab(m: f64, lip: f64) -> f64 {
    2.0 + 0.25 * lip * (m + 2.0 * m.sqrt())
}

pub fn r_ml(m: f64, lip: f64) -> f64 {
    4.0 * m.max(1.0) + 2.5 + 0.25 * lip * (m + 2.0 * m.sqrt())
}

pub fn pair_constants(a0: &LagrangianX, b0: &LagrangianX) -> PairConstants {
    let m = a0.v().sup_norm().unwrap_or(f64::INFINITY).max(b0.v().sup_norm().unwrap_or(f64::INFINITY));
    let lip = alpha_derivative_bound(a0, b0);
    PairConstants {
        m,
        m_bar: m.max(1.0),
        lip,
        c_ab: c_ab(m, lip),
        r_ml: r_ml(m, lip),
        relabel_rate: 2.0 * m.max(1.0) + 0.25,
    }
}
