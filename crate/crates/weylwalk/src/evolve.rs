//! Discrete-vs-continuum agreement: restricted operator norms over the
//! momentum ball, the analytic one-step bound, scaling fits and dispersion
//! tables.
//!
//! Translation invariance block-diagonalizes both evolutions over momentum,
//! so the restricted operator norm on {|p| ≤ Λ} is the sup over the ball of
//! the 2-norm of the per-momentum block difference. The sup is estimated on
//! a uniform grid of the ball plus one level of local refinement (3×
//! resolution) around the grid maximum; the integrand is a finite
//! trigonometric polynomial against an entire function, so grid error is
//! controlled (and checked by the grid-stability tests).

use rayon::prelude::*;

use crate::continuum::{hamiltonian_symbol, BMatrices};
use crate::error::WalkError;
use crate::linalg::{self, CMat};
use crate::walk::{LatticeScale, WalkSpec};

/// One-step constant C′ = e − 2 of the massless bound.
pub const C_PRIME: f64 = std::f64::consts::E - 2.0;

/// Parameters of a convergence study.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub lambda: f64,
    pub grid_per_dim: usize,
    pub t: f64,
    pub ratio: f64,
    pub a_schedule: Vec<f64>,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<(), WalkError> {
        for &a in &self.a_schedule {
            let limit = std::f64::consts::PI / a;
            if self.lambda >= limit {
                return Err(WalkError::CutoffOutsideZone { lambda: self.lambda, limit });
            }
        }
        if self.grid_per_dim < 16 {
            return Err(WalkError::ScheduleTooShort { needed: 16, got: self.grid_per_dim });
        }
        Ok(())
    }
}

/// Measured sup-norm difference against the analytic Appendix-A value.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub measured: f64,
    pub analytic: f64,
    /// Number of nonzero coins K.
    pub coin_count: usize,
    /// Largest |q| over the support.
    pub qmax: f64,
    pub lambda: f64,
    pub satisfied: bool,
}

/// n-step norm together with the one-step value on the same grid, so the
/// triangle chain ‖Uⁿ − Vⁿ‖ ≤ n‖U − V‖ can be checked directly.
#[derive(Debug, Clone)]
pub struct NStepReport {
    pub measured: f64,
    pub one_step: f64,
    pub steps: u64,
}

impl NStepReport {
    pub fn triangle_ok(&self) -> bool {
        self.measured <= self.steps as f64 * self.one_step + 1e-12
    }
}

/// Log-log fit of one-step norms against lattice spacing.
#[derive(Debug, Clone)]
pub struct ScalingFit {
    pub exponent: f64,
    pub r_squared: f64,
    /// (a, measured one-step norm) pairs.
    pub points: Vec<(f64, f64)>,
}

/// Eigenphase curves along a momentum segment, against the continuum
/// eigenvalues.
#[derive(Debug, Clone)]
pub struct DispersionTable {
    pub k: usize,
    pub rows: Vec<DispersionRow>,
}

#[derive(Debug, Clone)]
pub struct DispersionRow {
    /// Path parameter in [0, 1].
    pub s: f64,
    pub p: Vec<f64>,
    /// Eigenphases of U(p) divided by dt, ascending.
    pub theta_over_dt: Vec<f64>,
    /// Eigenvalues of H(p), ascending.
    pub continuum: Vec<f64>,
}

/// Uniform cell-centered grid over the cube [−Λ, Λ]^d, filtered to the ball
/// |p| ≤ Λ. Deterministic ordering.
pub fn ball_grid(d: usize, lambda: f64, per_dim: usize) -> Vec<Vec<f64>> {
    let coords: Vec<f64> = (0..per_dim)
        .map(|j| -lambda + 2.0 * lambda * (j as f64 + 0.5) / per_dim as f64)
        .collect();
    let mut points = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let p: Vec<f64> = idx.iter().map(|&j| coords[j]).collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= lambda * lambda {
            points.push(p);
        }
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == d {
                return points;
            }
            idx[axis] += 1;
            if idx[axis] < per_dim {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

fn check_cutoff(spec: &WalkSpec, lambda: f64) -> Result<(), WalkError> {
    let limit = std::f64::consts::PI / spec.scale().a;
    if lambda >= limit {
        return Err(WalkError::CutoffOutsideZone { lambda, limit });
    }
    Ok(())
}

/// Per-momentum block error ‖e^{−iH(p)·t} − U(p)ⁿ‖₂.
fn block_error(spec: &WalkSpec, bm: &BMatrices, p: &[f64], steps: u64) -> f64 {
    let u = spec.momentum_symbol(p);
    let un = if steps == 1 { u } else { linalg::matrix_power(&u, steps) };
    let h = hamiltonian_symbol(bm, p);
    let cont = linalg::expm_i_hermitian(&h, spec.scale().dt * steps as f64);
    linalg::norm2(&(cont - un))
}

/// Max of `f` over the grid plus one refinement pass (3× resolution) in the
/// cell neighborhood of the grid argmax. The reduction is an exact max with
/// an index tiebreak, so the result is identical for any thread count.
fn refined_sup<F>(d: usize, lambda: f64, per_dim: usize, f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let grid = ball_grid(d, lambda, per_dim);
    let (best, best_idx) = grid
        .par_iter()
        .enumerate()
        .map(|(i, p)| (f(p), i))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    if best_idx == usize::MAX {
        return 0.0;
    }
    let center = &grid[best_idx];
    let h = lambda / per_dim as f64; // half cell width... full cell is 2Λ/G
    let cell = 2.0 * h;
    let offsets: Vec<f64> = (-3..=3).map(|j| cell * j as f64 / 3.0).collect();
    let mut refined = Vec::new();
    let mut idx = vec![0usize; d];
    'outer: loop {
        let p: Vec<f64> = center
            .iter()
            .zip(&idx)
            .map(|(&c, &j)| c + offsets[j])
            .collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= lambda * lambda {
            refined.push(p);
        }
        let mut axis = 0;
        loop {
            if axis == d {
                break 'outer;
            }
            idx[axis] += 1;
            if idx[axis] < offsets.len() {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
    let local = refined
        .par_iter()
        .map(|p| f(p))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    best.max(local)
}

/// Restricted one-step norm sup_{|p|≤Λ} ‖e^{−iH(p)dt} − U(p)‖₂.
pub fn one_step_norm(
    spec: &WalkSpec,
    bm: &BMatrices,
    lambda: f64,
    grid_per_dim: usize,
) -> Result<f64, WalkError> {
    check_cutoff(spec, lambda)?;
    Ok(refined_sup(spec.dim(), lambda, grid_per_dim, |p| {
        block_error(spec, bm, p, 1)
    }))
}

/// Restricted n-step norm for t = n·dt, plus the one-step value on the same
/// grid.
pub fn n_step_norm(
    spec: &WalkSpec,
    bm: &BMatrices,
    lambda: f64,
    grid_per_dim: usize,
    t: f64,
) -> Result<NStepReport, WalkError> {
    check_cutoff(spec, lambda)?;
    let dt = spec.scale().dt;
    let n_real = t / dt;
    let steps = n_real.round();
    if steps < 1.0 || (n_real - steps).abs() > 1e-9 * n_real.max(1.0) {
        return Err(WalkError::NonIntegerSteps { t, dt });
    }
    let steps = steps as u64;
    let measured = refined_sup(spec.dim(), lambda, grid_per_dim, |p| {
        block_error(spec, bm, p, steps)
    });
    let one_step = refined_sup(spec.dim(), lambda, grid_per_dim, |p| {
        block_error(spec, bm, p, 1)
    });
    Ok(NStepReport { measured, one_step, steps })
}

/// The hard massless bound: measured one-step norm against
/// 2(e−2)(K·qmax·Λ·a)², valid for Λa ≤ 1/(K·qmax).
pub fn appendix_a_bound(
    spec: &WalkSpec,
    bm: &BMatrices,
    lambda: f64,
    grid_per_dim: usize,
) -> Result<BoundReport, WalkError> {
    check_cutoff(spec, lambda)?;
    let k_coins = spec.coin_count();
    let qmax = spec.max_displacement();
    let a = spec.scale().a;
    let lambda_a = lambda * a;
    let limit = 1.0 / (k_coins as f64 * qmax);
    if lambda_a > limit {
        return Err(WalkError::BoundValidity { lambda_a, limit });
    }
    let alpha = k_coins as f64 * qmax * lambda_a;
    let analytic = 2.0 * C_PRIME * alpha * alpha;
    let measured = one_step_norm(spec, bm, lambda, grid_per_dim)?;
    Ok(BoundReport {
        measured,
        analytic,
        coin_count: k_coins,
        qmax,
        lambda,
        satisfied: measured <= analytic,
    })
}

/// Least-squares slope of log(one-step norm) against log(a) over a schedule
/// of lattice spacings at fixed a/dt ratio and fixed Λ.
///
/// The builder is invoked per scale so walks whose coins depend on dt
/// (massive walks) are rebuilt honestly at each point.
pub fn scaling_fit<F>(
    build: F,
    lambda: f64,
    grid_per_dim: usize,
    a_schedule: &[f64],
    ratio: f64,
) -> Result<ScalingFit, WalkError>
where
    F: Fn(LatticeScale) -> Result<(WalkSpec, BMatrices), WalkError>,
{
    if a_schedule.len() < 4 {
        return Err(WalkError::ScheduleTooShort { needed: 4, got: a_schedule.len() });
    }
    let mut points = Vec::with_capacity(a_schedule.len());
    for &a in a_schedule {
        let scale = LatticeScale::new(a, a / ratio)?;
        let (spec, bm) = build(scale)?;
        let norm = one_step_norm(&spec, &bm, lambda, grid_per_dim)?;
        if norm <= 1e-14 {
            return Err(WalkError::ExactlySolvable);
        }
        points.push((a, norm));
    }
    let xs: Vec<f64> = points.iter().map(|(a, _)| a.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, n)| n.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ScalingFit { exponent: slope, r_squared, points })
}

/// Eigenphases of U(p) per unit time against eigenvalues of H(p), sampled
/// along the straight segment from `p_start` to `p_end`.
pub fn dispersion(
    spec: &WalkSpec,
    bm: &BMatrices,
    p_start: &[f64],
    p_end: &[f64],
    samples: usize,
) -> DispersionTable {
    let dt = spec.scale().dt;
    let rows: Vec<DispersionRow> = (0..samples)
        .map(|j| {
            let s = if samples == 1 { 0.0 } else { j as f64 / (samples - 1) as f64 };
            let p: Vec<f64> = p_start
                .iter()
                .zip(p_end)
                .map(|(a, b)| a + s * (b - a))
                .collect();
            let u = spec.momentum_symbol(&p);
            let theta_over_dt: Vec<f64> =
                linalg::eigenphases(&u).into_iter().map(|t| t / dt).collect();
            let continuum = linalg::eigvalsh(&hamiltonian_symbol(bm, &p));
            DispersionRow { s, p, theta_over_dt, continuum }
        })
        .collect();
    DispersionTable { k: spec.internal_dim(), rows }
}

/// Singular value by power iteration on A†A; test-facing independent check
/// of the SVD-based 2-norm.
pub fn norm2_power_iteration(m: &CMat, iters: usize) -> f64 {
    let ata = linalg::dagger(m).dot(m);
    let k = ata.nrows();
    let mut v = ndarray::Array1::from_elem(k, num_complex::Complex64::new(1.0, 0.3));
    let mut norm = 0.0;
    for _ in 0..iters {
        let w = ata.dot(&v);
        norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v = w.mapv(|z| z / norm);
    }
    norm.sqrt()
}
