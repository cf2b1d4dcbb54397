//! Benchmarks for evolution, `D`, the relabelling search and the
//! bounded-Lipschitz LP on deterministic fixtures of growing size.

use criterion::{BenchmarkId, Criterion};
use hs_core::metric::{bounded_lipschitz, j_bracket, semi_metric_d, DOptions, SearchOptions, W1InfNorm};
use hs_core::piecewise::{Measure, PwLinear};
use hs_core::solver::evolve;
use hs_core::transform::to_lagrangian;
use hs_core::{AlphaFn, EulerianY, LagrangianX, Tolerances};
use std::hint::black_box;

pub const SIZES: [usize; 3] = [8, 32, 128];

/// An oscillating profile with `n` knots on `[-2, 2]`, energy of order one.
/// `phase` shifts the oscillation so two fixtures differ.
pub fn fixture(n: usize, phase: f64, alpha: AlphaFn) -> EulerianY {
    let tol = Tolerances::default();
    let grid: Vec<f64> = (0..n).map(|k| -2.0 + 4.0 * k as f64 / (n - 1) as f64).collect();
    let h = 4.0 / (n - 1) as f64;
    let mut vals: Vec<f64> = grid.iter().map(|&x| (3.0 * x + phase).sin() * (1.0 - 0.2 * x * x)).collect();
    // keep ∫u_x² bounded as n grows
    let amp = (h * n as f64 / 4.0).sqrt();
    vals.iter_mut().for_each(|v| *v *= amp);
    *vals.first_mut().unwrap() = 0.0;
    *vals.last_mut().unwrap() = 0.0;
    let u = PwLinear::new(false, grid, vals).unwrap();
    let mu = Measure::absolutely_continuous(u.derivative().map(|s| s * s), &tol).unwrap();
    EulerianY { u, nu: mu.clone(), mu, alpha }
}

pub fn lagrangian(n: usize, phase: f64) -> LagrangianX {
    to_lagrangian(&fixture(n, phase, AlphaFn::Constant(0.5)), &Tolerances::default()).unwrap()
}

pub fn benchmarks(c: &mut Criterion) {
    let tol = Tolerances::default();

    let mut g = c.benchmark_group("evolve");
    for n in SIZES {
        let x = lagrangian(n, 0.0);
        g.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| b.iter(|| evolve(black_box(x), 5.0, &tol).unwrap()));
    }
    g.finish();

    let mut g = c.benchmark_group("semi_metric_d");
    for n in SIZES {
        let (a, b) = (lagrangian(n, 0.0), lagrangian(n, 0.3));
        g.bench_with_input(BenchmarkId::from_parameter(n), &(a, b), |bn, (a, b)| {
            bn.iter(|| semi_metric_d(black_box(a), black_box(b), &DOptions::default(), &tol).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("j_bracket");
    g.sample_size(10);
    for n in [8, 32] {
        let (a, b) = (lagrangian(n, 0.0), lagrangian(n, 0.3));
        g.bench_with_input(BenchmarkId::from_parameter(n), &(a, b), |bn, (a, b)| {
            bn.iter(|| j_bracket(black_box(a), black_box(b), &SearchOptions::default(), &tol).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("bounded_lipschitz");
    g.sample_size(10);
    for n in SIZES {
        let (a, b) = (fixture(n, 0.0, AlphaFn::One), fixture(n, 0.3, AlphaFn::One));
        let diff = a.mu.minus(&b.mu, &tol);
        g.bench_with_input(BenchmarkId::from_parameter(n), &diff, |bn, m| {
            bn.iter(|| bounded_lipschitz(black_box(m), W1InfNorm::Max).unwrap())
        });
    }
    g.finish();
}

#[cfg(test)]
mod tests {
    use super::*;
    use hs_core::eulerian::validate_eulerian;

    #[test]
    fn fixtures_are_admissible() {
        let tol = Tolerances::default();
        for n in SIZES {
            let y = fixture(n, 0.3, AlphaFn::Constant(0.5));
            assert!(validate_eulerian(&y, &tol, false).is_valid());
            assert!(y.mu.total_mass() < 50.0);
        }
    }
}
