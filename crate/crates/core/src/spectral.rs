//! First eigenpairs of the radial Schrodinger-type operators `-Delta - W`
//! on `[0, R]` with outer Dirichlet data and the regularity condition
//! `phi'(0) = 0`.
//!
//! The discretization is the conservative flux form of `-(1/r)(r phi')'` at
//! half nodes, symmetrized by the diagonal mass matrix `M_ii = 2 pi r_i h`
//! (quarter cell at the origin). Eigenvalues come from Sturm-sequence
//! bisection on the symmetrized tridiagonal matrix, eigenvectors from
//! shifted inverse iteration.
//!
//! The linearized operator at a stationary solution has its potential well
//! on the scale `epsilon`, far below any uniform unit-disk grid for the
//! exponents of interest, so its eigenpair is computed on the rescaled
//! domain where the potential is order one and mapped back through the
//! exact scaling `lambda = lambda_tilde / epsilon^2`,
//! `phi(r) = phi_tilde(r/epsilon) / epsilon`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::liouville::{self, ProfileKind, RescaledProfile};
use crate::shooting::StationarySolution;

/// Assembled generalized eigenproblem `A x = lambda M x` for `-Delta - W`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialOperator {
    grid: RadialGrid,
    /// Diagonal of the symmetric tridiagonal stiffness-plus-potential matrix.
    diag: Vec<f64>,
    /// Off-diagonal (sub equals super by construction).
    off: Vec<f64>,
    /// Diagonal mass matrix, strictly positive.
    mass: Vec<f64>,
}

/// First (or k-th) eigenvalue with its positive normalized eigenfunction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenPair {
    pub eigenvalue: f64,
    /// Samples on the grid nodes, including the boundary zero.
    pub eigenfunction: Vec<f64>,
    pub grid: RadialGrid,
    /// Relative residual of the discrete eigen-equation.
    pub residual: f64,
}

impl RadialOperator {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Interior problem size (grid nodes minus the Dirichlet node).
    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    pub(crate) fn symmetrized(&self) -> (Vec<f64>, Vec<f64>) {
        let d: Vec<f64> = self
            .diag
            .iter()
            .zip(&self.mass)
            .map(|(a, m)| a / m)
            .collect();
        let e: Vec<f64> = self
            .off
            .iter()
            .enumerate()
            .map(|(i, a)| a / (self.mass[i] * self.mass[i + 1]).sqrt())
            .collect();
        (d, e)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn eigenvalues_below(&self, sigma: f64) -> usize {
        let (d, e) = self.symmetrized();
        sturm_count(&d, &e, sigma)
    }

    /// Dense reconstruction of `A`, for small-problem checks.
    pub fn dense_matrix(&self) -> Vec<Vec<f64>> {
        let m = self.diag.len();
        let mut a = vec![vec![0.0; m]; m];
        for i in 0..m {
            a[i][i] = self.diag[i];
            if i + 1 < m {
                a[i][i + 1] = self.off[i];
                a[i + 1][i] = self.off[i];
            }
        }
        a
    }
}

/// Assemble `-Delta - W` on the grid with outer Dirichlet data.
pub fn assemble(grid: &RadialGrid, potential: &[f64]) -> Result<RadialOperator> {
    let n = grid.len();
    if potential.len() != n {
        return Err(Error::invalid(format!(
            "potential has {} samples for {} nodes",
            potential.len(),
            n
        )));
    }
    let h = grid.spacing();
    let tau = 2.0 * std::f64::consts::PI;
    let m = n - 1;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m - 1];
    let mut mass = vec![0.0; m];

    // Origin cell [0, h/2]: zero flux through r = 0.
    mass[0] = tau * h * h / 8.0;
    diag[0] = tau * (h / 2.0) / h - potential[0] * mass[0];
    off[0] = -tau * (h / 2.0) / h;

    for i in 1..m {
        let r = grid.nodes()[i];
        mass[i] = tau * r * h;
        let flux_left = tau * (r - h / 2.0) / h;
        let flux_right = tau * (r + h / 2.0) / h;
        diag[i] = flux_left + flux_right - potential[i] * mass[i];
        if i + 1 < m {
            off[i] = -flux_right;
        }
    }

    Ok(RadialOperator {
        grid: grid.clone(),
        diag,
        off,
        mass,
    })
}

/// Negative-pivot count of the LDL factorization of `B - sigma I`.
fn sturm_count(d: &[f64], e: &[f64], sigma: f64) -> usize {
    let mut count = 0usize;
    let mut q = d[0] - sigma;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let denom = if q.abs() < 1e-300 { -1e-300 } else { q };
        q = (d[i] - sigma) - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Bisect the k-th smallest eigenvalue (1-based) of the symmetrized matrix.
fn bisect_eigenvalue(d: &[f64], e: &[f64], k: usize, tol: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d.len() {
        let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
        let right = if i < e.len() { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - left - right);
        hi = hi.max(d[i] + left + right);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi || hi - lo <= tol {
            break;
        }
        if sturm_count(d, e, mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Solve `(T - sigma I) x = b` for symmetric tridiagonal `T` given by
/// `(d, e)`, with partial pivoting between adjacent rows.
fn shifted_tridiagonal_solve(d: &[f64], e: &[f64], sigma: f64, b: &[f64]) -> Vec<f64> {
    let m = d.len();
    // Bands of the upper triangular factor; u2 is the pivoting fill-in.
    let mut u0: Vec<f64> = d.iter().map(|di| di - sigma).collect();
    let mut u1 = vec![0.0; m];
    let mut u2 = vec![0.0; m];
    let mut low = vec![0.0; m];
    let mut rhs = b.to_vec();
    u1[..m - 1].copy_from_slice(e);
    low[1..].copy_from_slice(e);
    for i in 0..m - 1 {
        if low[i + 1].abs() > u0[i].abs() {
            // Exchange rows i and i+1; row i+1 never has a col i+3 entry yet.
            let (a0, a1, a2) = (u0[i], u1[i], u2[i]);
            u0[i] = low[i + 1];
            u1[i] = u0[i + 1];
            u2[i] = u1[i + 1];
            low[i + 1] = a0;
            u0[i + 1] = a1;
            u1[i + 1] = a2;
            rhs.swap(i, i + 1);
        }
        let pivot = if u0[i].abs() < 1e-300 {
            1e-300_f64.copysign(u0[i])
        } else {
            u0[i]
        };
        let factor = low[i + 1] / pivot;
        u0[i + 1] -= factor * u1[i];
        u1[i + 1] -= factor * u2[i];
        rhs[i + 1] -= factor * rhs[i];
        low[i + 1] = 0.0;
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut acc = rhs[i];
        if i + 1 < m {
            acc -= u1[i] * x[i + 1];
        }
        if i + 2 < m {
            acc -= u2[i] * x[i + 2];
        }
        let pivot = if u0[i].abs() < 1e-300 {
            1e-300_f64.copysign(u0[i])
        } else {
            u0[i]
        };
        x[i] = acc / pivot;
    }
    x
}

fn tridiagonal_apply(d: &[f64], e: &[f64], x: &[f64]) -> Vec<f64> {
    let m = d.len();
    let mut y = vec![0.0; m];
    for i in 0..m {
        let mut acc = d[i] * x[i];
        if i > 0 {
            acc += e[i - 1] * x[i - 1];
        }
        if i + 1 < m {
            acc += e[i] * x[i + 1];
        }
        y[i] = acc;
    }
    y
}

/// k-th smallest eigenvalue of the operator (1-based), bisection only.
pub fn eigenvalue_k(op: &RadialOperator, k: usize, tol: f64) -> Result<f64> {
    if k == 0 || k > op.dimension() {
        return Err(Error::invalid(format!(
            "eigenvalue index {k} out of range 1..={}",
            op.dimension()
        )));
    }
    let (d, e) = op.symmetrized();
    let (lo, hi) = bisect_eigenvalue(&d, &e, k, tol);
    Ok(0.5 * (lo + hi))
}

/// Smallest eigenvalue and its positive L2-normalized eigenfunction.
pub fn first_eigenpair(op: &RadialOperator, tol: f64) -> Result<EigenPair> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let (d, e) = op.symmetrized();
    let m = d.len();
    let scale = d
        .iter()
        .enumerate()
        .map(|(i, &di)| {
            let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let right = if i < e.len() { e[i].abs() } else { 0.0 };
            di.abs() + left + right
        })
        .fold(0.0_f64, f64::max);
    let width_target = tol.min(1e-10 * scale.max(1.0));
    let (lo, hi) = bisect_eigenvalue(&d, &e, 1, width_target);
    let width = (hi - lo).max(1e-14 * scale);
    // A shift strictly below the smallest eigenvalue keeps B - sigma I an
    // M-matrix, so the inverse iterate stays entrywise positive.
    let sigma = lo - 10.0 * width;

    let mut x = vec![1.0; m];
    let mut lambda = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    for _ in 0..60 {
        let mut y = shifted_tridiagonal_solve(&d, &e, sigma, &x);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::SolverFailure(
                "inverse iteration produced a degenerate vector".into(),
            ));
        }
        y.iter_mut().for_each(|v| *v /= norm);
        let by = tridiagonal_apply(&d, &e, &y);
        lambda = y.iter().zip(&by).map(|(a, b)| a * b).sum::<f64>();
        residual = by
            .iter()
            .zip(&y)
            .map(|(b, v)| (b - lambda * v).abs())
            .fold(0.0_f64, f64::max)
            / scale.max(1e-300);
        x = y;
        if residual < 1e-13 {
            break;
        }
    }
    if residual > 1e-9 {
        return Err(Error::SolverFailure(format!(
            "inverse iteration stalled with relative residual {residual:e}"
        )));
    }

    let total: f64 = x.iter().sum();
    if total < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::SolverFailure(
            "computed ground state is not positive".into(),
        ));
    }

    // Back to nodal values and L2(disk) normalization.
    let mut phi: Vec<f64> = x
        .iter()
        .zip(&op.mass)
        .map(|(xi, mi)| xi / mi.sqrt())
        .collect();
    phi.push(0.0);
    let norm_sq = op
        .grid
        .integrate(&phi.iter().map(|v| v * v).collect::<Vec<_>>())
        .expect("lengths agree");
    let inv = 1.0 / norm_sq.sqrt();
    phi.iter_mut().for_each(|v| *v *= inv);

    Ok(EigenPair {
        eigenvalue: lambda,
        eigenfunction: phi,
        grid: op.grid.clone(),
        residual,
    })
}

/// First eigenpair of the limit operator `-Delta - e^{z*}` truncated to
/// `[0, truncation_radius]` with outer Dirichlet data.
pub fn limit_eigenpair(truncation_radius: f64, node_count: usize) -> Result<EigenPair> {
    if truncation_radius < 20.0 {
        return Err(Error::invalid(format!(
            "truncation radius {truncation_radius} too small to hold the bound state; need >= 20"
        )));
    }
    let grid = RadialGrid::uniform(node_count, truncation_radius)?;
    let potential: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| liouville::e_z_star(r))
        .collect();
    let op = assemble(&grid, &potential)?;
    first_eigenpair(&op, 1e-12)
}

/// Rescaled solve of the linearized operator at a stationary solution:
/// grid on `[0, min(radius, 1/epsilon)]`, potential `V_p`; returns the grid,
/// the positive L2-normalized eigenfunction, and the eigenvalue.
pub(crate) fn linearized_rescaled_solve(
    sol: &StationarySolution,
    radius: f64,
    node_count: usize,
    tol: f64,
) -> Result<(RadialGrid, Vec<f64>, f64)> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::invalid("truncation radius must be positive"));
    }
    let r_t = radius.min(sol.rescaled_radius());
    let grid = RadialGrid::uniform(node_count, r_t)?;
    let pot = liouville::potential_profile(sol, &grid)?;
    let op = assemble(&grid, pot.values())?;
    let pair = first_eigenpair(&op, tol)?;
    Ok((grid, pair.eigenfunction, pair.eigenvalue))
}

/// First eigenpair of the linearized operator `-Delta - p |u|^{p-1}` on the
/// unit disk, computed on the rescaled domain and mapped back by the exact
/// scaling. The returned eigenfunction lives on the `epsilon`-scaled grid
/// that resolves the potential well.
pub fn lane_emden_eigenpair(
    sol: &StationarySolution,
    truncation_radius: f64,
    node_count: usize,
) -> Result<EigenPair> {
    let (grid, phi_tilde, lambda_tilde) =
        linearized_rescaled_solve(sol, truncation_radius, node_count, 1e-12)?;
    let eps = sol.epsilon();
    let physical = RadialGrid::uniform(node_count, eps * grid.outer_radius())?;
    let eigenfunction: Vec<f64> = phi_tilde.iter().map(|v| v / eps).collect();
    Ok(EigenPair {
        eigenvalue: lambda_tilde / (eps * eps),
        eigenfunction,
        grid: physical,
        residual: f64::NAN,
    })
}

/// `lambda_tilde(p) = epsilon_p^2 lambda_1(p)`.
pub fn rescaled_eigenvalue(sol: &StationarySolution, pair: &EigenPair) -> f64 {
    sol.epsilon() * sol.epsilon() * pair.eigenvalue
}

/// `phi_tilde(x) = epsilon phi(epsilon x)`, extended by zero, sampled on
/// `target_grid`. The change of variables preserves the L2 normalization.
pub fn rescaled_eigenfunction(
    sol: &StationarySolution,
    pair: &EigenPair,
    target_grid: &RadialGrid,
) -> Result<RescaledProfile> {
    if target_grid.outer_radius() > sol.rescaled_radius() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "target grid radius {} exceeds the rescaled domain radius {}",
            target_grid.outer_radius(),
            sol.rescaled_radius()
        )));
    }
    let eps = sol.epsilon();
    let values: Vec<f64> = target_grid
        .nodes()
        .iter()
        .map(|&y| {
            let r = eps * y;
            if r > pair.grid.outer_radius() {
                0.0
            } else {
                eps * pair.grid.interp_cubic(&pair.eigenfunction, r)
            }
        })
        .collect();
    Ok(RescaledProfile::new(
        target_grid.clone(),
        values,
        ProfileKind::Eigenfunction,
        sol.p(),
        sol.nodal_regions(),
    ))
}

/// Rayleigh functional `int (|w'|^2 - W w^2) dx` over the disk of the grid.
pub fn rayleigh(w: &[f64], potential: &[f64], grid: &RadialGrid) -> Result<f64> {
    if w.len() != grid.len() || potential.len() != grid.len() {
        return Err(Error::invalid("sample lengths must match the grid"));
    }
    let dw = grid.derivative(w)?;
    let integrand: Vec<f64> = dw
        .iter()
        .zip(w)
        .zip(potential)
        .map(|((d, v), p)| d * d - p * v * v)
        .collect();
    grid.integrate(&integrand)
}
