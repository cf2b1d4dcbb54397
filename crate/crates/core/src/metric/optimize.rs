//! Brackets `[lower, upper]` for the infimum quantities built from `D`.
//!
//! Upper bounds come from explicit relabellings: a seed map (the identity or
//! the canonical candidate matching `y + H`) composed with a monotone
//! piecewise-linear perturbation whose ordinates are tuned by Nelder–Mead.
//! Lower bounds come from norm comparisons that hold for every relabelling.

use super::{lipschitz::bounded_lipschitz, semi_metric_d, DOptions, W1InfNorm};
use crate::error::{HsError, Result};
use crate::eulerian::{validate_eulerian, EulerianY, EulerianZ};
use crate::lagrangian::{lag_comparison_norm, LagrangianX, Relabelling};
use crate::piecewise::{common_refinement, Measure, PwLinear};
use crate::transform::to_lagrangian;
use crate::Tolerances;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceBracket {
    pub lower: f64,
    pub upper: f64,
    pub witness: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Interior knots of the tuned perturbation (at most 8).
    pub knots: usize,
    /// Objective evaluations per Nelder–Mead run.
    pub max_evals: usize,
    pub d: DOptions,
    pub w1inf: W1InfNorm,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { knots: 6, max_evals: 240, d: DOptions::default(), w1inf: W1InfNorm::Max }
    }
}

/// Minimise `f` from `x0` with the classic Nelder–Mead simplex moves.
/// Returns the best point and value seen.
pub fn nelder_mead(f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    if n == 0 {
        return simplex.remove(0);
    }
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() <= 1e-14 * simplex[0].1.abs().max(1e-300) && spread.is_finite() {
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(gamma);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = along(if fr < simplex[n].1 { rho } else { -rho });
            let fc = eval(&xc, &mut evals);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    s.0 = best.iter().zip(&s.0).map(|(b, x)| b + sigma * (x - b)).collect();
                    s.1 = eval(&s.0, &mut evals);
                }
            }
        }
    }
    simplex.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap()
}

/// Monotone perturbation with ordinates `φ(k₁) = k₁ + p₀` and gaps
/// `(k_{j+1} − k_j)·e^{p_j}`; `p = 0` is the identity.
fn perturbation(knots: &[f64], p: &[f64], tol: &Tolerances) -> Result<Relabelling> {
    let mut vals = Vec::with_capacity(knots.len());
    let mut cur = knots[0] + p[0];
    vals.push(cur);
    for j in 1..knots.len() {
        cur += (knots[j] - knots[j - 1]) * p[j].clamp(-20.0, 20.0).exp();
        vals.push(cur);
    }
    Relabelling::new(PwLinear::from_samples(true, knots.to_vec(), vals)?, tol)
}

fn quantile_knots(grid: &[f64], k: usize) -> Vec<f64> {
    if grid.len() <= k {
        return grid.to_vec();
    }
    let n = grid.len();
    let mut out: Vec<f64> = (0..k).map(|j| grid[((2 * j + 1) * n / (2 * k)).min(n - 1)]).collect();
    out.dedup();
    out
}

/// `(y_B + H_B)⁻¹ ∘ (y_A + H_A)`: the relabelling of `B` that matches
/// `y + H` with `A`.
fn canonical(a: &LagrangianX, b: &LagrangianX, tol: &Tolerances) -> Result<Relabelling> {
    let sa = a.y().add(a.h(), tol)?;
    let sb = b.y().add(b.h(), tol)?;
    Relabelling::new(sb.invert(tol)?.compose(&sa, tol)?, tol)
}

/// `inf_f D(A, B ∘ f)` from above.
fn one_sided(a: &LagrangianX, b: &LagrangianX, swapped: bool, opts: &SearchOptions, tol: &Tolerances) -> Result<(f64, String)> {
    let d = |p: &LagrangianX, q: &LagrangianX| -> f64 {
        let r = if swapped { semi_metric_d(q, p, &opts.d, tol) } else { semi_metric_d(p, q, &opts.d, tol) };
        r.map(|r| r.total).unwrap_or(f64::INFINITY)
    };
    let mut seeds = vec![("id", Relabelling::identity())];
    if let Ok(c) = canonical(a, b, tol) {
        seeds.push(("canonical", c));
    }
    let mut best = (f64::INFINITY, String::new());
    for (name, seed) in seeds {
        let bs = b.relabel(&seed, tol)?;
        let at_seed = d(a, &bs);
        if at_seed < best.0 {
            best = (at_seed, format!("{name} seed"));
        }
        if at_seed == 0.0 || opts.knots == 0 || opts.max_evals == 0 {
            continue;
        }
        let grid = common_refinement(&[a.grid(), bs.grid()], tol.x);
        let knots = quantile_knots(&grid, opts.knots.min(8));
        if knots.is_empty() {
            continue;
        }
        let mut obj = |p: &[f64]| match perturbation(&knots, p, tol).and_then(|phi| bs.relabel(&phi, tol)) {
            Ok(bp) => d(a, &bp),
            Err(_) => f64::INFINITY,
        };
        let (_, v) = nelder_mead(&mut obj, &vec![0.0; knots.len()], 0.25, opts.max_evals);
        if v < best.0 {
            best = (v, format!("{name} seed + {}-knot perturbation", knots.len()));
        }
    }
    Ok(best)
}

fn lower_from_norm(a: &LagrangianX, b: &LagrangianX, opts: &SearchOptions) -> f64 {
    let mut n = lag_comparison_norm(a, b);
    if !opts.d.alpha_term {
        n -= a.alpha().sup_diff(b.alpha());
    }
    0.4 * n.max(0.0)
}

/// `J(X_A, X_B) = inf_{f,g} D(X_A, X_B∘f) + D(X_A∘g, X_B)`.
/// The lower bound `(2/5)‖X_A − X_B‖` is used when both states are in `ℱ₀`.
pub fn j_bracket(a: &LagrangianX, b: &LagrangianX, opts: &SearchOptions, tol: &Tolerances) -> Result<DistanceBracket> {
    let (u1, w1) = one_sided(a, b, false, opts, tol)?;
    let (u2, w2) = one_sided(b, a, true, opts, tol)?;
    let lower = if a.in_f0(tol) && b.in_f0(tol) { lower_from_norm(a, b, opts) } else { 0.0 };
    Ok(DistanceBracket { lower, upper: u1 + u2, witness: format!("f: {w1}; g: {w2}") })
}

/// `d̂`: the upper bound is the one-link chain `J(ΠX_A, ΠX_B)`, the lower
/// bound `(2/5)‖ΠX_A − ΠX_B‖` holds along any chain.
pub fn dhat_bracket(a: &LagrangianX, b: &LagrangianX, opts: &SearchOptions, tol: &Tolerances) -> Result<DistanceBracket> {
    let (pa, _) = a.pi_normalize(tol)?;
    let (pb, _) = b.pi_normalize(tol)?;
    let j = j_bracket(&pa, &pb, opts, tol)?;
    Ok(DistanceBracket { lower: lower_from_norm(&pa, &pb, opts), upper: j.upper, witness: j.witness })
}

/// Only the lower end of [`dhat_bracket`]; no search is run.
pub fn dhat_lower(a: &LagrangianX, b: &LagrangianX, opts: &SearchOptions, tol: &Tolerances) -> Result<f64> {
    let (pa, _) = a.pi_normalize(tol)?;
    let (pb, _) = b.pi_normalize(tol)?;
    Ok(lower_from_norm(&pa, &pb, opts))
}

/// `d_𝒟(Y_A, Y_B) = d̂(L̂ Y_A, L̂ Y_B)`.
pub fn euler_distance(ya: &EulerianY, yb: &EulerianY, opts: &SearchOptions, tol: &Tolerances) -> Result<DistanceBracket> {
    dhat_bracket(&to_lagrangian(ya, tol)?, &to_lagrangian(yb, tol)?, opts, tol)
}

/// Positive root `d` of `(5 + 2M̄)d + √(5M/2)·√d = n`.
pub fn quotient_lower_root(n: f64, m: f64) -> f64 {
    let a = 5.0 + 2.0 * m.max(1.0);
    let b = (2.5 * m).sqrt();
    let s = (-b + (b * b + 4.0 * a * n).sqrt()) / (2.0 * a);
    s * s
}

/// Bracket for the distance between reduced triples `(u, μ, α)`: the
/// upper bound minimises over the supplied `ν` candidates (always including
/// `ν = μ`); the lower bound inverts the estimate in terms of
/// `‖Δu‖_∞ + ‖Δμ‖_BL + ‖Δα‖_∞`.
pub fn euler_quotient_bracket(
    za: &EulerianZ,
    zb: &EulerianZ,
    nu_a: &[Measure],
    nu_b: &[Measure],
    opts: &SearchOptions,
    tol: &Tolerances,
) -> Result<DistanceBracket> {
    let candidates = |z: &EulerianZ, extra: &[Measure]| -> Vec<EulerianY> {
        std::iter::once(z.mu.clone())
            .chain(extra.iter().cloned())
            .map(|nu| z.with_nu(nu))
            .filter(|y| validate_eulerian(y, tol, true).is_valid())
            .collect()
    };
    let (ca, cb) = (candidates(za, nu_a), candidates(zb, nu_b));
    if ca.is_empty() || cb.is_empty() {
        return Err(HsError::InvalidState("no admissible ν candidate".into()));
    }
    let mut upper = f64::INFINITY;
    let mut witness = String::new();
    for (i, ya) in ca.iter().enumerate() {
        for (j, yb) in cb.iter().enumerate() {
            let r = euler_distance(ya, yb, opts, tol)?;
            if r.upper < upper {
                upper = r.upper;
                witness = format!("ν_A candidate {i}, ν_B candidate {j}; {}", r.witness);
            }
        }
    }
    let mut n = za.u.sup_norm_diff(&zb.u)? + bounded_lipschitz(&za.mu.minus(&zb.mu, tol), opts.w1inf)?;
    if opts.d.alpha_term {
        n += za.alpha.sup_diff(&zb.alpha);
    }
    let m = za.mu.total_mass().max(zb.mu.total_mass());
    Ok(DistanceBracket { lower: quotient_lower_root(n, m), upper, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let mut f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let (x, v) = nelder_mead(&mut f, &[0.0, 0.0], 0.5, 400);
        assert!(v < 1e-10, "{v}");
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 0.5).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_respects_budget() {
        let mut calls = 0;
        let mut f = |x: &[f64]| {
            calls += 1;
            x.iter().map(|v| v.abs()).sum::<f64>()
        };
        nelder_mead(&mut f, &[3.0, -2.0, 1.0], 0.1, 50);
        assert!(calls <= 50 + 4);
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let t = Tolerances::default();
        let phi = perturbation(&[-1.0, 0.5, 2.0], &[0.0, 0.0, 0.0], &t).unwrap();
        assert!(phi.map().sup_norm_diff(&PwLinear::id()).unwrap() == 0.0);
    }

    #[test]
    fn lower_root_solves_the_quadratic() {
        let (n, m) = (0.7, 3.0);
        let d = quotient_lower_root(n, m);
        assert!(((5.0 + 6.0) * d + (7.5f64).sqrt() * d.sqrt() - n).abs() < 1e-14);
        assert_eq!(quotient_lower_root(0.0, 2.0), 0.0);
    }
}
