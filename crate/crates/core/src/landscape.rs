//! Localization landscape: the solution of `H u = 1` and its reciprocal
//! `W = 1/u`, the effective potential that drives the landscape law.

use crate::cyclic;
use crate::error::{Error, Result};
use crate::lattice::LatticeModel;

/// Default bound on `‖H u − 1‖∞`.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// CG iteration cap per lattice side.
const CG_ITERATIONS_PER_SIDE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandscapeSolver {
    /// Periodic tridiagonal elimination, 1D only.
    Direct,
    /// Jacobi-preconditioned conjugate gradient, any dimension.
    ConjugateGradient,
}

#[derive(Debug, Clone)]
pub struct Landscape {
    u: Vec<f64>,
    w: Vec<f64>,
    residual_norm: f64,
}

impl Landscape {
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// Effective potential `W = 1/u`.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// `‖H u − 1‖∞` as measured after the solve.
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    pub fn min_w(&self) -> f64 {
        self.w.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_w(&self) -> f64 {
        self.w.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Solve `H u = 1`; direct elimination in 1D, conjugate gradient in 2D.
pub fn solve_landscape(model: &LatticeModel, tol: f64) -> Result<Landscape> {
    let solver = if model.spec().dimension() == 1 {
        LandscapeSolver::Direct
    } else {
        LandscapeSolver::ConjugateGradient
    };
    solve_landscape_with(model, tol, solver)
}

pub fn solve_landscape_with(model: &LatticeModel, tol: f64, solver: LandscapeSolver) -> Result<Landscape> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if model.potential().iter().all(|&v| v == 0.0) {
        return Err(Error::Singular(
            "potential is identically zero; H has the constant vector in its kernel".into(),
        ));
    }
    let u = match solver {
        LandscapeSolver::Direct => {
            if model.spec().dimension() != 1 {
                return Err(Error::InvalidArgument(
                    "direct landscape solve is only available in 1D".into(),
                ));
            }
            let diag: Vec<f64> = (0..model.sites()).map(|i| model.diagonal(i)).collect();
            let rhs = vec![1.0; diag.len()];
            cyclic::solve(&diag, &rhs).ok_or_else(|| Error::Singular("non-positive pivot in landscape solve".into()))?
        }
        LandscapeSolver::ConjugateGradient => {
            let cap = CG_ITERATIONS_PER_SIDE * model.spec().side();
            conjugate_gradient(model, tol, cap)?
        }
    };
    let residual_norm = residual_inf(model, &u);
    if !(residual_norm <= tol) {
        return Err(Error::Convergence {
            iterations: 0,
            residual: residual_norm,
        });
    }
    if let Some(bad) = u.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::Singular(format!("landscape lost positivity: u = {bad}")));
    }
    let w = u.iter().map(|x| 1.0 / x).collect();
    Ok(Landscape { u, w, residual_norm })
}

fn residual_inf(model: &LatticeModel, u: &[f64]) -> f64 {
    let mut hu = vec![0.0; u.len()];
    model.apply_into(u, &mut hu);
    hu.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn conjugate_gradient(model: &LatticeModel, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = model.sites();
    let inv_diag: Vec<f64> = (0..n).map(|i| 1.0 / model.diagonal(i)).collect();
    // Initial guess from the diagonal alone.
    let mut x = inv_diag.clone();
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];

    let mut iterations = 0;
    let mut achieved = f64::INFINITY;
    // Outer loop restarts from the true residual when the recursive one drifts.
    while iterations < max_iter {
        model.apply_into(&x, &mut ap);
        for i in 0..n {
            r[i] = 1.0 - ap[i];
        }
        achieved = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if achieved <= tol {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            iterations += 1;
            model.apply_into(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let r_inf = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if r_inf <= 0.5 * tol {
                break;
            }
            for i in 0..n {
                z[i] = inv_diag[i] * r[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
    model.apply_into(&x, &mut ap);
    let final_residual = ap.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    if final_residual <= tol {
        return Ok(x);
    }
    Err(Error::Convergence {
        iterations,
        residual: final_residual.min(achieved),
    })
}

/// Relative mismatch in the landscape identity
///
/// ```text
/// ⟨ψ, Hψ⟩ = Σ_{⟨i,j⟩} u_i u_j (ψ_i/u_i − ψ_j/u_j)² + Σ_i ψ_i² / u_i
/// ```
///
/// summed over undirected edges, normalised by `max(|⟨ψ, Hψ⟩|, 1)`.
pub fn landscape_identity_residual(model: &LatticeModel, land: &Landscape, psi: &[f64]) -> Result<f64> {
    let n = model.sites();
    if psi.len() != n || land.u.len() != n {
        return Err(Error::InvalidArgument(format!(
            "vector lengths {} / {} do not match {} sites",
            psi.len(),
            land.u.len(),
            n
        )));
    }
    let h_psi = model.apply_hamiltonian(psi)?;
    let lhs = dot(psi, &h_psi);

    let u = &land.u;
    let spec = model.spec();
    let l = spec.side();
    let mut gradient = 0.0;
    for i in 0..n {
        // +x and +y neighbours enumerate each undirected edge once (L ≥ 3).
        let x = i % l;
        let mut forward = [Some(i - x + (x + 1) % l), None];
        if spec.dimension() == 2 {
            forward[1] = Some((i + l) % n);
        }
        for j in forward.into_iter().flatten() {
            let diff = psi[i] / u[i] - psi[j] / u[j];
            gradient += u[i] * u[j] * diff * diff;
        }
    }
    let potential: f64 = psi.iter().zip(u).map(|(p, ui)| p * p / ui).sum();
    Ok((lhs - gradient - potential).abs() / lhs.abs().max(1.0))
}
