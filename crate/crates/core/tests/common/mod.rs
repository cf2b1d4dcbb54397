//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use hs_core::eulerian::validate_eulerian;
use hs_core::piecewise::{Atom, Measure, PwConstant, PwLinear, SignedMeasure};
use hs_core::{AlphaFn, EulerianY, LagrangianX, Relabelling, Tolerances};
use rand::rngs::StdRng;
use rand::RngExt;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

/// Sorted, well-separated abscissae in `[lo, hi]`.
pub fn knots(rng: &mut StdRng, n: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    loop {
        let mut xs: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        if xs.windows(2).all(|w| w[1] - w[0] >= gap) {
            return xs;
        }
    }
}

/// A random admissible `α`: `1`, a constant in `[0, 0.9]`, or piecewise
/// linear with values in `[0, 0.9]` and slopes at most `lip`.
pub fn random_alpha(rng: &mut StdRng, lip: f64) -> AlphaFn {
    match rng.random_range(0..4) {
        0 => AlphaFn::One,
        1 => AlphaFn::Constant(rng.random_range(0.0..0.9)),
        _ => {
            let n = rng.random_range(2..5);
            let g = knots(rng, n, -3.0, 3.0, 0.2);
            let mut v = vec![rng.random_range(0.0..0.9)];
            for w in g.windows(2) {
                let step = lip * (w[1] - w[0]);
                let prev = *v.last().unwrap();
                v.push(rng.random_range((prev - step).max(0.0)..=(prev + step).min(0.9)));
            }
            AlphaFn::pw(g, v, Some(lip)).unwrap()
        }
    }
}

/// A random valid Eulerian state with at most `max_knots` velocity knots and
/// total energy at most `max_energy`.
pub fn random_eulerian(rng: &mut StdRng, max_knots: usize, max_energy: f64, alpha: AlphaFn) -> EulerianY {
    let t = tol();
    let n = rng.random_range(2..=max_knots);
    let g = knots(rng, n, -3.0, 3.0, 0.05);
    let mut vals: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let energy = |v: &[f64]| g.windows(2).zip(v.windows(2)).map(|(x, u)| (u[1] - u[0]).powi(2) / (x[1] - x[0])).sum::<f64>();
    let budget = 0.7 * max_energy;
    let e = energy(&vals);
    if e > budget {
        let s = (budget / e).sqrt();
        vals.iter_mut().for_each(|v| *v *= s);
    }
    let u = PwLinear::new(false, g.clone(), vals).unwrap();
    let ux = u.derivative();
    let dens = ux.map(|s| s * s);
    let allow_atoms = !alpha.is_one();
    let mut mu_atoms = Vec::new();
    let mut nu_atoms = Vec::new();
    if allow_atoms && rng.random_bool(0.5) {
        let x = rng.random_range(-3.0..3.0);
        let m = rng.random_range(0.05..0.15 * max_energy);
        mu_atoms.push(Atom { x, mass: m });
        nu_atoms.push(Atom { x, mass: m * rng.random_range(1.0..2.0) });
    }
    let mu = Measure::new(dens.clone(), mu_atoms, &t).unwrap();
    let nu_dens = if allow_atoms && rng.random_bool(0.5) {
        // extra ν only where u_x > 0
        let extra = rng.random_range(0.0..1.0);
        ux.map(|s| if s > 0.0 { s * s * (1.0 + extra) } else { s * s })
    } else {
        dens
    };
    let nu = Measure::new(nu_dens, nu_atoms, &t).unwrap();
    let y = EulerianY { u, mu, nu, alpha };
    let report = validate_eulerian(&y, &t, false);
    assert!(report.is_valid(), "generator produced an invalid state: {:?}", report.violations);
    y
}

/// `random_eulerian` with a random `α` (Lipschitz bound 2, ≤ 8 knots,
/// energy ≤ 4).
pub fn random_state(rng: &mut StdRng) -> EulerianY {
    let alpha = random_alpha(rng, 2.0);
    random_eulerian(rng, 8, 4.0, alpha)
}

/// A perturbation of `y` on the same knots: velocities are moved by at most
/// `eps` (energies recomputed); `α` is kept.
pub fn perturb(rng: &mut StdRng, y: &EulerianY, eps: f64) -> EulerianY {
    let t = tol();
    let g = y.u.grid().to_vec();
    let vals: Vec<f64> = y.u.values().iter().map(|v| v + rng.random_range(-eps..eps)).collect();
    let u = PwLinear::new(false, g, vals).unwrap();
    let dens = u.derivative().map(|s| s * s);
    let mu = Measure::new(dens.clone(), y.mu.atoms().to_vec(), &t).unwrap();
    let nu_atoms = y.nu.atoms().to_vec();
    let nu = Measure::new(dens, nu_atoms, &t).unwrap();
    EulerianY { u, mu, nu, alpha: y.alpha.clone() }
}

/// A random relabelling: identity tails, slopes in `[0.3, 3]`.
pub fn random_relabelling(rng: &mut StdRng, max_knots: usize) -> Relabelling {
    let n = rng.random_range(2..=max_knots);
    let g = knots(rng, n, -4.0, 8.0, 0.1);
    let mut f = vec![g[0] + rng.random_range(-0.5..0.5)];
    for w in g.windows(2) {
        let s = rng.random_range(0.3..3.0);
        f.push(f.last().unwrap() + s * (w[1] - w[0]));
    }
    Relabelling::new(PwLinear::from_samples(true, g, f).unwrap(), &tol()).unwrap()
}

/// `sup |f − g|` over the union of both grids and the given extra points.
pub fn sup_diff_pl(f: &PwLinear, g: &PwLinear) -> f64 {
    f.sup_norm_diff(g).unwrap_or(f64::INFINITY)
}

/// Largest component-wise distance between two Lagrangian states.
pub fn lag_sup_diff(a: &LagrangianX, b: &LagrangianX) -> f64 {
    [sup_diff_pl(a.y(), b.y()), sup_diff_pl(a.u(), b.u()), sup_diff_pl(a.h(), b.h()), sup_diff_pl(a.v(), b.v())]
        .into_iter()
        .fold(0.0, f64::max)
}

/// `n` uniform points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// A random signed measure: at most 6 density cells and 3 atoms, all
/// breakpoints and atom positions on the grid `k/1000`.
pub fn random_signed_measure(rng: &mut StdRng) -> SignedMeasure {
    let cells = rng.random_range(0..=6usize);
    let n_atoms = rng.random_range(if cells == 0 { 1 } else { 0 }..=3usize);
    let on_grid = |x: f64| (x * 1000.0).round() / 1000.0;
    let density = if cells == 0 {
        PwConstant::zero()
    } else {
        let mut g = knots(rng, cells + 1, -2.0, 2.0, 0.05);
        g.iter_mut().for_each(|x| *x = on_grid(*x));
        let inner = (0..cells).map(|_| rng.random_range(-0.5..0.5)).collect();
        PwConstant::compact(g, inner).unwrap()
    };
    let mut atoms: Vec<Atom> = Vec::new();
    for _ in 0..n_atoms {
        let x = on_grid(rng.random_range(-2.5..2.5));
        if atoms.iter().all(|a| a.x != x) {
            atoms.push(Atom { x, mass: rng.random_range(-0.3..0.3) });
        }
    }
    SignedMeasure::new(density, atoms, &tol()).unwrap()
}

/// Brute-force bounded-Lipschitz norm (max convention): `φ` sampled on the
/// grid `x_i = i·h` with levels `k·h`, `|k| ≤ 1/h`, moving by at most one
/// level per step; dynamic programming over levels with a sliding max.
/// Density mass is lumped onto grid points by exact integration over the
/// dual cells `[x_i − h/2, x_i + h/2]`.
pub fn bounded_lipschitz_brute_force(m: &SignedMeasure, h: f64) -> f64 {
    let support = m.support_points(0.0);
    if support.is_empty() {
        return 0.0;
    }
    let lo = ((support[0] - 1.0) / h).floor() as i64;
    let hi = ((support[support.len() - 1] + 1.0) / h).ceil() as i64;
    let dens = m.density();
    let cdf = |x: f64| -> f64 {
        // ∫_{-∞}^x ρ for a compactly supported step function
        let g = dens.grid();
        let v = dens.values();
        let mut acc = 0.0;
        for k in 0..g.len().saturating_sub(1) {
            let (a, b) = (g[k], g[k + 1]);
            if x <= a {
                break;
            }
            acc += v[k + 1] * (x.min(b) - a);
        }
        acc
    };
    let npts = (hi - lo + 1) as usize;
    let mut c = vec![0.0; npts];
    for (i, ci) in c.iter_mut().enumerate() {
        let x = (lo + i as i64) as f64 * h;
        *ci = cdf(x + 0.5 * h) - cdf(x - 0.5 * h);
    }
    for a in m.atoms() {
        let i = ((a.x / h).round() as i64 - lo) as usize;
        c[i] += a.mass;
    }
    let levels = (1.0 / h).round() as i64;
    let nl = (2 * levels + 1) as usize;
    let phi = |k: usize| (k as i64 - levels) as f64 * h;
    let mut best: Vec<f64> = (0..nl).map(|k| c[0] * phi(k)).collect();
    let mut next = vec![0.0; nl];
    for ci in c.iter().skip(1) {
        for k in 0..nl {
            let mut m = best[k];
            if k > 0 {
                m = m.max(best[k - 1]);
            }
            if k + 1 < nl {
                m = m.max(best[k + 1]);
            }
            next[k] = m + ci * phi(k);
        }
        std::mem::swap(&mut best, &mut next);
    }
    best.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Shortest chain between every pair by enumerating all simple paths.
pub fn chain_enumeration(f: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = f.len();
    let mut out = vec![vec![f64::INFINITY; n]; n];
    fn dfs(f: &[Vec<f64>], start: usize, at: usize, cost: f64, seen: &mut Vec<bool>, out: &mut [Vec<f64>]) {
        if cost < out[start][at] {
            out[start][at] = cost;
        }
        for next in 0..f.len() {
            if !seen[next] {
                seen[next] = true;
                dfs(f, start, next, cost + f[at][next], seen, out);
                seen[next] = false;
            }
        }
    }
    for s in 0..n {
        let mut seen = vec![false; n];
        seen[s] = true;
        dfs(f, s, s, 0.0, &mut seen, &mut out);
    }
    out
}
