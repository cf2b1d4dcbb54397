//! Piecewise-linear functions, piecewise-constant functions and finite
//! measures on ℝ.
//!
//! A [`PwLinear`] is `c·x + b(x)` with `c ∈ {0, 1}` and `b` continuous,
//! linear between breakpoints and constant on both tails. A [`PwConstant`]
//! has one value per cell, tails included. Measures carry a piecewise-constant
//! density (zero on the tails) plus finitely many atoms.

use crate::error::{HsError, Result};
use crate::Tolerances;
use serde::{Deserialize, Serialize};

fn check_grid(grid: &[f64]) -> Result<()> {
    if let Some(bad) = grid.iter().find(|x| !x.is_finite()) {
        return Err(HsError::InvalidGrid(format!("non-finite breakpoint {bad}")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(HsError::InvalidGrid(format!(
            "breakpoints not strictly increasing: {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Sorted union of several grids; points within `tol_x` of the previously
/// kept point are merged into it.
pub fn common_refinement(grids: &[&[f64]], tol_x: f64) -> Vec<f64> {
    let mut all: Vec<f64> = grids.iter().flat_map(|g| g.iter().copied()).collect();
    all.sort_by(|a, b| a.total_cmp(b));
    merge_sorted(all, tol_x)
}

fn merge_sorted(sorted: Vec<f64>, tol_x: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(sorted.len());
    for x in sorted {
        match out.last() {
            Some(&l) if x - l <= tol_x => {}
            _ => out.push(x),
        }
    }
    out
}

/// Index of the cell containing `x`: `0` is the left tail, `grid.len()` the
/// right tail, and `k` in between is `[grid[k-1], grid[k])`.
pub fn locate(grid: &[f64], x: f64) -> usize {
    grid.partition_point(|&g| g <= x)
}

/// `c·x + b(x)` with `c ∈ {0,1}` and `b` piecewise linear with constant tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwLinear {
    identity: bool,
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl PwLinear {
    /// `values` are the bounded part `b` at each breakpoint.
    pub fn new(identity: bool, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        if grid.is_empty() {
            return Err(HsError::InvalidGrid("a piecewise-linear function needs at least one breakpoint".into()));
        }
        if grid.len() != values.len() {
            return Err(HsError::ShapeMismatch(format!(
                "{} breakpoints but {} values",
                grid.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(HsError::InvalidGrid(format!("non-finite value {v}")));
        }
        Ok(Self { identity, grid, values })
    }

    /// Build from samples of the full function `f(x_i)`.
    pub fn from_samples(identity: bool, grid: Vec<f64>, full: Vec<f64>) -> Result<Self> {
        let c = if identity { 1.0 } else { 0.0 };
        let values = grid.iter().zip(&full).map(|(x, f)| f - c * x).collect();
        Self::new(identity, grid, values)
    }

    pub fn constant(c: f64) -> Self {
        Self { identity: false, grid: vec![0.0], values: vec![c] }
    }

    pub fn id() -> Self {
        Self { identity: true, grid: vec![0.0], values: vec![0.0] }
    }

    pub fn is_identity_shifted(&self) -> bool {
        self.identity
    }

    pub fn identity_coefficient(&self) -> f64 {
        if self.identity {
            1.0
        } else {
            0.0
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Bounded part at the breakpoints.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Full function value at each breakpoint.
    pub fn samples(&self) -> Vec<f64> {
        let c = self.identity_coefficient();
        self.grid.iter().zip(&self.values).map(|(x, b)| b + c * x).collect()
    }

    pub fn bounded_at(&self, x: f64) -> f64 {
        let g = &self.grid;
        let k = locate(g, x);
        if k == 0 {
            self.values[0]
        } else if k == g.len() {
            self.values[g.len() - 1]
        } else {
            let (x0, x1) = (g[k - 1], g[k]);
            let (v0, v1) = (self.values[k - 1], self.values[k]);
            let s = (x - x0) / (x1 - x0);
            v0 + s * (v1 - v0)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.bounded_at(x) + self.identity_coefficient() * x
    }

    /// Bounded-part values at the left and right tails.
    pub fn tail_values(&self) -> (f64, f64) {
        (self.values[0], *self.values.last().unwrap())
    }

    /// Full slope on each finite cell.
    pub fn slopes(&self) -> Vec<f64> {
        let c = self.identity_coefficient();
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]) + c)
            .collect()
    }

    pub fn derivative(&self) -> PwConstant {
        let c = self.identity_coefficient();
        let mut values = Vec::with_capacity(self.grid.len() + 1);
        values.push(c);
        values.extend(self.slopes());
        values.push(c);
        PwConstant { grid: self.grid.clone(), values }
    }

    /// Re-express on `grid` (which should contain every own breakpoint).
    pub fn refine_to(&self, grid: &[f64]) -> Self {
        let values = grid.iter().map(|&x| self.bounded_at(x)).collect();
        Self { identity: self.identity, grid: grid.to_vec(), values }
    }

    pub fn refine(&self, other_grid: &[f64], tol: &Tolerances) -> Self {
        self.refine_to(&common_refinement(&[&self.grid, other_grid], tol.x))
    }

    /// Pointwise combination `op(b_self, b_other)` on the common refinement;
    /// `identity` is the identity coefficient of the result.
    pub fn zip_with(&self, other: &Self, identity: bool, tol: &Tolerances, op: impl Fn(f64, f64) -> f64) -> Self {
        let grid = common_refinement(&[&self.grid, &other.grid], tol.x);
        let values = grid.iter().map(|&x| op(self.bounded_at(x), other.bounded_at(x))).collect();
        Self { identity, grid, values }
    }

    pub fn add(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        if self.identity && other.identity {
            return Err(HsError::ShapeMismatch("sum of two identity-shifted functions has slope 2 tails".into()));
        }
        Ok(self.zip_with(other, self.identity || other.identity, tol, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        if self.identity != other.identity {
            if self.identity {
                return Ok(self.zip_with(other, true, tol, |a, b| a - b));
            }
            return Err(HsError::ShapeMismatch("difference would have slope -1 tails".into()));
        }
        Ok(self.zip_with(other, false, tol, |a, b| a - b))
    }

    pub fn map_bounded(&self, op: impl Fn(f64) -> f64) -> Self {
        Self { identity: self.identity, grid: self.grid.clone(), values: self.values.iter().map(|&v| op(v)).collect() }
    }

    /// `self ∘ r` for a strictly increasing `r` with identity tails.
    pub fn compose(&self, r: &PwLinear, tol: &Tolerances) -> Result<Self> {
        if !r.identity {
            return Err(HsError::NotMonotone("inner map must tend to ±∞ (identity coefficient 1)".into()));
        }
        if let Some((i, s)) = r.slopes().iter().enumerate().find(|(_, s)| **s <= 0.0) {
            return Err(HsError::NotMonotone(format!("inner map has slope {s} on cell {i}")));
        }
        Ok(self.compose_unchecked(r, tol))
    }

    /// `self ∘ r` for a nondecreasing `r` with identity tails; flat cells of
    /// `r` become constant cells of the result.
    pub fn compose_monotone(&self, r: &PwLinear, tol: &Tolerances) -> Result<Self> {
        if !r.identity {
            return Err(HsError::NotMonotone("inner map must tend to ±∞ (identity coefficient 1)".into()));
        }
        if let Some((i, s)) = r.slopes().iter().enumerate().find(|(_, s)| **s < -tol.slope_floor) {
            return Err(HsError::NotMonotone(format!("inner map has slope {s} on cell {i}")));
        }
        Ok(self.compose_unchecked(r, tol))
    }

    fn compose_unchecked(&self, r: &PwLinear, tol: &Tolerances) -> Self {
        let rs = r.samples();
        let rg = &r.grid;
        let n = rg.len();
        let mut pre: Vec<f64> = Vec::with_capacity(self.grid.len());
        for &x in &self.grid {
            if x < rs[0] {
                pre.push(rg[0] + (x - rs[0]));
            } else if x > rs[n - 1] {
                pre.push(rg[n - 1] + (x - rs[n - 1]));
            } else {
                // first sample ≥ x; the crossing lies in the cell ending there
                let k = rs.partition_point(|&v| v < x);
                if rs[k] == x || k == 0 {
                    pre.push(rg[k]);
                } else if rs[k] > rs[k - 1] {
                    let s = (x - rs[k - 1]) / (rs[k] - rs[k - 1]);
                    pre.push(rg[k - 1] + s * (rg[k] - rg[k - 1]));
                }
            }
        }
        let grid = common_refinement(&[rg, &pre], tol.x);
        let c = self.identity_coefficient();
        let values = grid.iter().map(|&xi| self.eval(r.eval(xi)) - c * xi).collect();
        Self { identity: self.identity, grid, values }
    }

    /// Inverse of a strictly increasing identity-shifted function.
    pub fn invert(&self, tol: &Tolerances) -> Result<Self> {
        if !self.identity {
            return Err(HsError::NotInvertible("bounded functions are not invertible on ℝ".into()));
        }
        if let Some((i, s)) = self.slopes().iter().enumerate().find(|(_, s)| **s <= tol.slope_floor) {
            return Err(HsError::NotInvertible(format!("slope {s} on cell {i}")));
        }
        let xs = self.samples();
        check_grid(&xs).map_err(|e| HsError::NotInvertible(e.to_string()))?;
        Self::new(true, xs, self.values.iter().map(|v| -v).collect())
    }

    pub fn sup_norm(&self) -> Result<f64> {
        if self.identity {
            return Err(HsError::Unbounded("identity-shifted function".into()));
        }
        Ok(self.values.iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    /// `‖f - g‖_∞`; defined only when the identity coefficients agree.
    pub fn sup_norm_diff(&self, other: &Self) -> Result<f64> {
        if self.identity != other.identity {
            return Err(HsError::Unbounded("identity coefficients differ".into()));
        }
        let a = self.grid.iter().map(|&x| (self.bounded_at(x) - other.bounded_at(x)).abs());
        let b = other.grid.iter().map(|&x| (self.bounded_at(x) - other.bounded_at(x)).abs());
        Ok(a.chain(b).fold(0.0, f64::max))
    }

    pub fn as_cellwise(&self) -> Result<CellwiseAffine> {
        let (l, r) = self.tail_values();
        if self.identity || l != 0.0 || r != 0.0 {
            return Err(HsError::Unbounded("function does not have compact support".into()));
        }
        let pieces = self.values.windows(2).map(|w| (w[0], w[1])).collect();
        CellwiseAffine::new(self.grid.clone(), pieces)
    }

    pub fn l1_norm(&self) -> Result<f64> {
        Ok(self.as_cellwise()?.l1_norm())
    }

    pub fn l2_norm(&self) -> Result<f64> {
        Ok(self.as_cellwise()?.l2_norm())
    }
}

/// One value per cell: `values[0]` on `(-∞, grid[0])`, `values[k]` on
/// `[grid[k-1], grid[k])`, `values[n]` on `[grid[n-1], ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwConstant {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl PwConstant {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        if values.len() != grid.len() + 1 {
            return Err(HsError::ShapeMismatch(format!(
                "{} breakpoints need {} cell values, got {}",
                grid.len(),
                grid.len() + 1,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(HsError::InvalidGrid(format!("non-finite cell value {v}")));
        }
        Ok(Self { grid, values })
    }

    /// Zero tails, `inner[k]` on `[grid[k], grid[k+1])`.
    pub fn compact(grid: Vec<f64>, inner: Vec<f64>) -> Result<Self> {
        if grid.is_empty() && inner.is_empty() {
            return Ok(Self::zero());
        }
        if inner.len() + 1 != grid.len() {
            return Err(HsError::ShapeMismatch(format!(
                "{} breakpoints need {} finite-cell values, got {}",
                grid.len(),
                grid.len().saturating_sub(1),
                inner.len()
            )));
        }
        let mut values = Vec::with_capacity(grid.len() + 1);
        values.push(0.0);
        values.extend(inner);
        values.push(0.0);
        Self::new(grid, values)
    }

    pub fn zero() -> Self {
        Self { grid: vec![], values: vec![0.0] }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values on the finite cells only.
    pub fn inner(&self) -> &[f64] {
        if self.grid.is_empty() {
            return &[];
        }
        &self.values[1..self.values.len() - 1]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.values[locate(&self.grid, x)]
    }

    pub fn has_zero_tails(&self) -> bool {
        self.values[0] == 0.0 && *self.values.last().unwrap() == 0.0
    }

    /// Re-express on a finer grid; each new cell takes the value at its midpoint.
    pub fn refine_to(&self, grid: &[f64]) -> Self {
        let mut values = Vec::with_capacity(grid.len() + 1);
        values.push(self.values[0]);
        for w in grid.windows(2) {
            values.push(self.eval(0.5 * (w[0] + w[1])));
        }
        values.push(*self.values.last().unwrap());
        Self { grid: grid.to_vec(), values }
    }

    pub fn zip_with(&self, other: &Self, tol: &Tolerances, op: impl Fn(f64, f64) -> f64) -> Self {
        let grid = common_refinement(&[&self.grid, &other.grid], tol.x);
        let a = self.refine_to(&grid);
        let b = other.refine_to(&grid);
        let values = a.values.iter().zip(&b.values).map(|(x, y)| op(*x, *y)).collect();
        Self { grid, values }
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| op(v)).collect() }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn require_compact(&self) -> Result<()> {
        if self.has_zero_tails() {
            Ok(())
        } else {
            Err(HsError::Unbounded("nonzero tail value".into()))
        }
    }

    /// `∫ f` over the finite cells (tails must vanish).
    pub fn integral(&self) -> Result<f64> {
        self.require_compact()?;
        Ok(self.grid.windows(2).zip(self.inner()).map(|(w, v)| v * (w[1] - w[0])).sum())
    }

    pub fn l1_norm(&self) -> Result<f64> {
        self.require_compact()?;
        Ok(self.grid.windows(2).zip(self.inner()).map(|(w, v)| v.abs() * (w[1] - w[0])).sum())
    }

    pub fn l2_norm(&self) -> Result<f64> {
        self.require_compact()?;
        Ok(self.grid.windows(2).zip(self.inner()).map(|(w, v)| v * v * (w[1] - w[0])).sum::<f64>().sqrt())
    }

    /// Antiderivative vanishing at -∞ (tails must vanish).
    pub fn antiderivative(&self) -> Result<PwLinear> {
        self.require_compact()?;
        if self.grid.is_empty() {
            return Ok(PwLinear::constant(0.0));
        }
        let mut acc = 0.0;
        let mut values = vec![0.0];
        for (w, v) in self.grid.windows(2).zip(self.inner()) {
            acc += v * (w[1] - w[0]);
            values.push(acc);
        }
        PwLinear::new(false, self.grid.clone(), values)
    }
}

/// A function that is affine on each finite cell (possibly discontinuous at
/// breakpoints) and zero on both tails. `pieces[k] = (left, right)` values on
/// `[grid[k], grid[k+1]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellwiseAffine {
    grid: Vec<f64>,
    pieces: Vec<(f64, f64)>,
}

impl CellwiseAffine {
    pub fn new(grid: Vec<f64>, pieces: Vec<(f64, f64)>) -> Result<Self> {
        check_grid(&grid)?;
        if pieces.len() + 1 != grid.len().max(1) {
            return Err(HsError::ShapeMismatch(format!("{} breakpoints but {} pieces", grid.len(), pieces.len())));
        }
        Ok(Self { grid, pieces })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    /// One-sided limits `(f(x-), f(x+))`.
    pub fn one_sided(&self, x: f64) -> (f64, f64) {
        let g = &self.grid;
        let n = g.len();
        let value_in = |k: usize, x: f64| -> f64 {
            let (p, q) = self.pieces[k];
            let s = (x - g[k]) / (g[k + 1] - g[k]);
            p + s * (q - p)
        };
        if n < 2 || x < g[0] || x > g[n - 1] {
            return (0.0, 0.0);
        }
        let k = g.partition_point(|&b| b < x);
        if k < n && g[k] == x {
            let left = if k == 0 { 0.0 } else { self.pieces[k - 1].1 };
            let right = if k == n - 1 { 0.0 } else { self.pieces[k].0 };
            (left, right)
        } else {
            let v = value_in(k - 1, x);
            (v, v)
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, &(p, q))| {
                let h = w[1] - w[0];
                if p * q >= 0.0 {
                    0.5 * h * (p.abs() + q.abs())
                } else {
                    0.5 * h * (p * p + q * q) / (p.abs() + q.abs())
                }
            })
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, &(p, q))| (w[1] - w[0]) * (p * p + p * q + q * q) / 3.0)
            .sum::<f64>()
            .sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.pieces.iter().fold(0.0, |m, &(p, q)| m.max(p.abs()).max(q.abs()))
    }
}

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
}

fn normalize_atoms(mut atoms: Vec<Atom>, tol_x: f64) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(l) if a.x - l.x <= tol_x => l.mass += a.mass,
            _ => out.push(a),
        }
    }
    out.retain(|a| a.mass != 0.0);
    out
}

fn cdf(density: &PwConstant, atoms: &[Atom], x: f64, closed: bool) -> f64 {
    let g = density.grid();
    let mut acc = 0.0;
    for (w, v) in g.windows(2).zip(density.inner()) {
        if x <= w[0] {
            break;
        }
        acc += v * (x.min(w[1]) - w[0]);
    }
    for a in atoms {
        if a.x < x || (closed && a.x == x) {
            acc += a.mass;
        }
    }
    acc
}

/// A finite nonnegative measure: density with zero tails plus atoms of
/// positive mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    density: PwConstant,
    atoms: Vec<Atom>,
}

impl Measure {
    pub fn new(density: PwConstant, atoms: Vec<Atom>, tol: &Tolerances) -> Result<Self> {
        if !density.has_zero_tails() {
            return Err(HsError::Unbounded("measure density must vanish on the tails".into()));
        }
        if let Some(v) = density.values().iter().find(|v| **v < 0.0) {
            return Err(HsError::DominanceViolation(format!("negative density {v}")));
        }
        if let Some(a) = atoms.iter().find(|a| !(a.mass > 0.0) || !a.x.is_finite() || !a.mass.is_finite()) {
            return Err(HsError::DominanceViolation(format!("atom at {} has mass {}", a.x, a.mass)));
        }
        Ok(Self { density, atoms: normalize_atoms(atoms, tol.x) })
    }

    pub fn zero() -> Self {
        Self { density: PwConstant::zero(), atoms: vec![] }
    }

    pub fn absolutely_continuous(density: PwConstant, tol: &Tolerances) -> Result<Self> {
        Self::new(density, vec![], tol)
    }

    pub fn density(&self) -> &PwConstant {
        &self.density
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_at(&self, x: f64, tol_x: f64) -> f64 {
        self.atoms.iter().filter(|a| (a.x - x).abs() <= tol_x).map(|a| a.mass).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.density.integral().unwrap_or(0.0) + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    /// `μ((-∞, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        cdf(&self.density, &self.atoms, x, false)
    }

    /// `μ((-∞, x])`.
    pub fn cdf_right(&self, x: f64) -> f64 {
        cdf(&self.density, &self.atoms, x, true)
    }

    /// Breakpoints of the density plus atom positions, sorted and merged.
    pub fn support_points(&self, tol_x: f64) -> Vec<f64> {
        let ax: Vec<f64> = self.atoms.iter().map(|a| a.x).collect();
        common_refinement(&[self.density.grid(), &ax], tol_x)
    }

    pub fn to_signed(&self) -> SignedMeasure {
        SignedMeasure { density: self.density.clone(), atoms: self.atoms.clone() }
    }

    pub fn minus(&self, other: &Measure, tol: &Tolerances) -> SignedMeasure {
        self.to_signed().minus(&other.to_signed(), tol)
    }

    /// `sup_x |μ((-∞,x)) - ρ((-∞,x))|` including one-sided limits at atoms.
    /// Points closer than `tol.x` count as one point, so an atom moved by
    /// rounding is not reported as a jump of its full mass.
    pub fn cdf_sup_distance(&self, other: &Measure, tol: &Tolerances) -> f64 {
        let pts = common_refinement(&[&self.support_points(tol.x), &other.support_points(tol.x)], tol.x);
        pts.iter()
            .flat_map(|&x| {
                // a merged cluster of atoms lies inside [x, x + tol.x]
                let right = |m: &Measure| {
                    m.cdf_right(x) + m.atoms.iter().filter(|a| a.x > x && a.x <= x + tol.x).map(|a| a.mass).sum::<f64>()
                };
                [(self.cdf_left(x) - other.cdf_left(x)).abs(), (right(self) - right(other)).abs()]
            })
            .fold(0.0, f64::max)
    }
}

/// A finite signed measure: density with zero tails plus signed atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedMeasure {
    density: PwConstant,
    atoms: Vec<Atom>,
}

impl SignedMeasure {
    pub fn new(density: PwConstant, atoms: Vec<Atom>, tol: &Tolerances) -> Result<Self> {
        if !density.has_zero_tails() {
            return Err(HsError::Unbounded("measure density must vanish on the tails".into()));
        }
        Ok(Self { density, atoms: normalize_atoms(atoms, tol.x) })
    }

    pub fn density(&self) -> &PwConstant {
        &self.density
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn minus(&self, other: &SignedMeasure, tol: &Tolerances) -> SignedMeasure {
        let density = self.density.zip_with(&other.density, tol, |a, b| a - b);
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().map(|a| Atom { x: a.x, mass: -a.mass }));
        SignedMeasure { density, atoms: normalize_atoms(atoms, tol.x) }
    }

    pub fn total_variation(&self) -> f64 {
        self.density.l1_norm().unwrap_or(0.0) + self.atoms.iter().map(|a| a.mass.abs()).sum::<f64>()
    }

    pub fn support_points(&self, tol_x: f64) -> Vec<f64> {
        let ax: Vec<f64> = self.atoms.iter().map(|a| a.x).collect();
        common_refinement(&[self.density.grid(), &ax], tol_x)
    }

    /// `∫ φ d(self)` for a continuous piecewise-linear `φ` whose breakpoints
    /// include every density breakpoint (exact on each cell).
    pub fn integrate_pl(&self, phi: &PwLinear) -> f64 {
        let grid = common_refinement(&[self.density.grid(), phi.grid()], 0.0);
        let mut acc = 0.0;
        for w in grid.windows(2) {
            let rho = self.density.eval(0.5 * (w[0] + w[1]));
            acc += rho * 0.5 * (phi.eval(w[0]) + phi.eval(w[1])) * (w[1] - w[0]);
        }
        acc + self.atoms.iter().map(|a| a.mass * phi.eval(a.x)).sum::<f64>()
    }
}

/// Pushforward `map#(weight dξ)` along a nondecreasing identity-shifted map.
/// Cells where the map is flat (slope below the floor, or image shorter than
/// `tol.x`) become atoms.
pub fn pushforward(map: &PwLinear, weight: &PwConstant, tol: &Tolerances) -> Result<Measure> {
    if !map.is_identity_shifted() {
        return Err(HsError::NotMonotone("pushforward map must have identity tails".into()));
    }
    if !weight.has_zero_tails() {
        return Err(HsError::Unbounded("pushforward weight must vanish on the tails".into()));
    }
    let grid = common_refinement(&[map.grid(), weight.grid()], tol.x);
    let mut cells: Vec<(f64, f64, f64)> = Vec::new();
    let mut atoms: Vec<Atom> = Vec::new();
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut rho = weight.eval(0.5 * (a + b));
        if rho < 0.0 {
            if rho < -tol.v {
                return Err(HsError::DominanceViolation(format!("negative weight {rho} on [{a}, {b}]")));
            }
            rho = 0.0;
        }
        let (xa, xb) = (map.eval(a), map.eval(b));
        let slope = (xb - xa) / (b - a);
        if slope < -tol.slope_floor {
            return Err(HsError::NotMonotone(format!("map decreases on [{a}, {b}]")));
        }
        let mass = rho * (b - a);
        if slope < tol.slope_floor || xb - xa <= tol.x {
            if mass > 0.0 {
                atoms.push(Atom { x: xa, mass });
            }
        } else {
            cells.push((xa, xb, mass / (xb - xa)));
        }
    }
    let ends: Vec<f64> = cells.iter().flat_map(|c| [c.0, c.1]).collect();
    let xgrid = common_refinement(&[&ends], tol.x);
    let mut inner = Vec::with_capacity(xgrid.len().saturating_sub(1));
    for w in xgrid.windows(2) {
        let m = 0.5 * (w[0] + w[1]);
        let k = cells.partition_point(|c| c.1 <= m);
        inner.push(match cells.get(k) {
            Some(c) if c.0 <= m => c.2,
            _ => 0.0,
        });
    }
    let density = if xgrid.len() < 2 { PwConstant::zero() } else { PwConstant::compact(xgrid, inner)? };
    Measure::new(density, atoms, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn adiss_u0() -> PwLinear {
        PwLinear::new(false, vec![-2.0, -1.0, 1.0, 2.0], vec![1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn eval_on_tails_and_cells() {
        let u = adiss_u0();
        assert_eq!(u.eval(-5.0), 1.0);
        assert_eq!(u.eval(-1.5), 0.5);
        assert_eq!(u.eval(0.3), 0.0);
        assert_eq!(u.eval(9.0), -1.0);
        let y = PwLinear::from_samples(true, vec![-2.0, 0.0, 2.0, 4.0], vec![-2.0, -1.0, 1.0, 2.0]).unwrap();
        assert_eq!(y.eval(-1.0), -1.5);
        assert_eq!(y.eval(10.0), 8.0);
        assert_eq!(y.eval(-10.0), -10.0);
    }

    #[test]
    fn refinement_merges_close_points() {
        let g = common_refinement(&[&[0.0, 1.0], &[1.0 + 1e-14, 2.0], &[]], 1e-12);
        assert_eq!(g, vec![0.0, 1.0, 2.0]);
        assert_eq!(common_refinement(&[&[0.0], &[]], 1e-12), vec![0.0]);
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        assert!(matches!(PwLinear::new(false, vec![0.0, 1.0], vec![1.0]), Err(HsError::ShapeMismatch(_))));
        assert!(matches!(PwLinear::new(false, vec![1.0, 0.0], vec![1.0, 2.0]), Err(HsError::InvalidGrid(_))));
        assert!(matches!(PwConstant::new(vec![0.0], vec![1.0]), Err(HsError::ShapeMismatch(_))));
    }

    #[test]
    fn compose_requires_increasing_map() {
        let flat = PwLinear::from_samples(true, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let u = adiss_u0();
        assert!(matches!(u.compose(&flat, &tol()), Err(HsError::NotMonotone(_))));
        let c = u.compose_monotone(&flat, &tol()).unwrap();
        assert_eq!(c.eval(0.5), u.eval(0.0));
    }

    #[test]
    fn sup_norm_of_mixed_identity_is_unbounded() {
        assert!(matches!(PwLinear::id().sup_norm_diff(&PwLinear::constant(0.0)), Err(HsError::Unbounded(_))));
    }

    #[test]
    fn cellwise_norms_split_at_sign_change() {
        // f = 1 - 2x on [0,1]: ∫|f| = 1/2, ∫f² = 1/3
        let f = CellwiseAffine::new(vec![0.0, 1.0], vec![(1.0, -1.0)]).unwrap();
        assert_abs_diff_eq!(f.l1_norm(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.l2_norm(), (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_eq!(f.one_sided(1.0), (-1.0, 0.0));
    }

    #[test]
    fn pushforward_turns_flat_cells_into_atoms() {
        // y flat on [1,3], slope 1/2 on [-1,1]
        let y = PwLinear::from_samples(true, vec![-1.0, 1.0, 3.0, 4.0], vec![-1.0, 0.0, 0.0, 1.0]).unwrap();
        let w = PwConstant::compact(vec![-1.0, 1.0, 3.0, 4.0], vec![0.5, 2.0, 0.0]).unwrap();
        let m = pushforward(&y, &w, &tol()).unwrap();
        assert_eq!(m.atoms(), &[Atom { x: 0.0, mass: 4.0 }]);
        assert_abs_diff_eq!(m.density().eval(-0.5), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.total_mass(), 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.cdf_right(0.0) - m.cdf_left(0.0), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn cdf_distance_sees_atoms() {
        let t = tol();
        let a = Measure::new(PwConstant::zero(), vec![Atom { x: 0.0, mass: 1.0 }], &t).unwrap();
        let b = Measure::new(PwConstant::compact(vec![0.0, 1.0], vec![1.0]).unwrap(), vec![], &t).unwrap();
        assert_abs_diff_eq!(a.cdf_sup_distance(&b, &t), 1.0, epsilon = 1e-15);
    }

    fn arb_increasing() -> impl Strategy<Value = PwLinear> {
        (prop::collection::vec((0.1f64..2.0, 0.2f64..3.0), 1..6), -3.0f64..3.0, -2.0f64..2.0).prop_map(
            |(steps, x0, f0)| {
                let mut xs = vec![x0];
                let mut fs = vec![f0];
                for (dx, s) in steps {
                    xs.push(xs.last().unwrap() + dx);
                    fs.push(fs.last().unwrap() + s * dx);
                }
                PwLinear::from_samples(true, xs, fs).unwrap()
            },
        )
    }

    fn arb_bounded() -> impl Strategy<Value = PwLinear> {
        prop::collection::vec((0.1f64..2.0, -2.0f64..2.0), 1..6).prop_map(|pts| {
            let mut xs = vec![-1.0];
            let mut vs = vec![0.3];
            for (dx, v) in pts {
                xs.push(xs.last().unwrap() + dx);
                vs.push(v);
            }
            PwLinear::new(false, xs, vs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(f in arb_increasing(), x in -10.0f64..10.0) {
            let t = tol();
            let finv = f.invert(&t).unwrap();
            prop_assert!((finv.eval(f.eval(x)) - x).abs() < 1e-11);
            let id = f.compose(&finv, &t).unwrap();
            prop_assert!(id.sup_norm_diff(&PwLinear::id()).unwrap() < 1e-11);
        }

        #[test]
        fn compose_agrees_pointwise(g in arb_bounded(), f in arb_increasing(), x in -10.0f64..10.0) {
            let c = g.compose(&f, &tol()).unwrap();
            prop_assert!((c.eval(x) - g.eval(f.eval(x))).abs() < 1e-11);
        }

        #[test]
        fn pushforward_conserves_mass(f in arb_increasing(), vals in prop::collection::vec(0.0f64..3.0, 5)) {
            let g = f.grid().to_vec();
            let inner: Vec<f64> = (0..g.len() - 1).map(|k| vals[k % vals.len()]).collect();
            let w = PwConstant::compact(g, inner).unwrap();
            let m = pushforward(&f, &w, &tol()).unwrap();
            prop_assert!((m.total_mass() - w.integral().unwrap()).abs() < 1e-11);
        }

        #[test]
        fn l2_matches_midpoint_quadrature(g in arb_bounded()) {
            let gz = PwLinear::new(false, g.grid().to_vec(), {
                let mut v = g.values().to_vec();
                let n = v.len();
                v[0] = 0.0; v[n - 1] = 0.0; v
            }).unwrap();
            let (a, b) = (gz.grid()[0], *gz.grid().last().unwrap());
            let n = 20000;
            let h = (b - a) / n as f64;
            let quad: f64 = (0..n).map(|i| { let v = gz.eval(a + (i as f64 + 0.5) * h); v * v * h }).sum();
            prop_assert!((gz.l2_norm().unwrap().powi(2) - quad).abs() < 1e-5);
        }
    }
}
