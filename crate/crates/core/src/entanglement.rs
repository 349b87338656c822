//! Coin-position entanglement of single realizations and of the
//! disorder-averaged mixed state.
//!
//! For a pure state the measure is the von Neumann entropy of the reduced
//! coin density. For the ensemble `rho = (1/N) sum_i |psi_i><psi_i|` it is
//! the negativity `(||rho^{T_c}||_1 - 1) / 2` of the partial transpose over
//! the coin. Matrices are built on the active sites only: sites where some
//! realization has a nonzero amplitude. All other rows and columns of `rho`
//! vanish identically, so the restriction leaves every eigenvalue intact.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
// Redundant when another crate in the graph links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::state::WalkState;

const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues in `(-CLIP_TOL, 0)` are roundoff and read as zero.
const CLIP_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;

/// Hermitian 2x2 reduced density matrix in `(up, down)` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinDensity {
    pub m: [[Complex64; 2]; 2],
}

impl CoinDensity {
    pub fn trace(&self) -> f64 {
        self.m[0][0].re + self.m[1][1].re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let (a, d) = (self.m[0][0].re, self.m[1][1].re);
        let b = self.m[0][1];
        let disc = ((a - d) * (a - d) + 4.0 * b.norm_sqr()).sqrt();
        [(a + d - disc) / 2.0, (a + d + disc) / 2.0]
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> Result<f64> {
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Trace(tr));
        }
        let mut s = 0.0;
        for lambda in self.eigenvalues() {
            if lambda <= -CLIP_TOL {
                return Err(Error::NegativeEigenvalue(lambda));
            }
            if lambda > 0.0 {
                s -= lambda * lambda.ln();
            }
        }
        Ok(s)
    }
}

/// `rho_c = sum_x v_x v_x^dagger` over the site spinors `v_x`.
pub fn reduced_coin_density(state: &WalkState) -> CoinDensity {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in state.support() {
        let v = state.spinor(i);
        for (a, row) in m.iter_mut().enumerate() {
            for (b, e) in row.iter_mut().enumerate() {
                *e += v[a] * v[b].conj();
            }
        }
    }
    CoinDensity { m }
}

pub fn entanglement_entropy(rho: &CoinDensity) -> Result<f64> {
    rho.entropy()
}

/// Entropy of the reduced coin density of a pure state.
pub fn state_entropy(state: &WalkState) -> Result<f64> {
    reduced_coin_density(state).entropy()
}

/// `(1/N) sum_i S(psi_i)`, summed in slice order.
pub fn mean_realization_entropy(states: &[WalkState]) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut acc = 0.0;
    for s in states {
        acc += state_entropy(s)?;
    }
    Ok(acc / states.len() as f64)
}

/// Ensemble density matrix restricted to the active sites.
///
/// Row and column `2 a + sigma` belong to site `active_sites()[a]` and coin
/// state `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleDensity {
    geometry: Geometry,
    time: usize,
    realizations: usize,
    active: Vec<usize>,
    rho: DMatrix<Complex64>,
}

pub fn ensemble_density(states: &[WalkState]) -> Result<EnsembleDensity> {
    let first = states.first().ok_or(Error::EmptyEnsemble)?;
    let geometry = *first.geometry();
    let time = first.time();
    let mut is_active = vec![false; geometry.sites()];
    for s in states {
        if *s.geometry() != geometry {
            return Err(Error::GeometryMismatch);
        }
        if s.time() != time {
            return Err(Error::TimeMismatch {
                expected: time,
                found: s.time(),
            });
        }
        for i in s.support() {
            let v = s.spinor(i);
            if v[0] != Complex64::new(0.0, 0.0) || v[1] != Complex64::new(0.0, 0.0) {
                is_active[i] = true;
            }
        }
    }
    let active: Vec<usize> = (0..geometry.sites()).filter(|&i| is_active[i]).collect();
    let dim = 2 * active.len();
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    for s in states {
        for (a, &site) in active.iter().enumerate() {
            let v = s.spinor(site);
            psi[2 * a] = v[0];
            psi[2 * a + 1] = v[1];
        }
        for c in 0..dim {
            let conj = psi[c].conj();
            if conj == Complex64::new(0.0, 0.0) {
                continue;
            }
            for r in 0..dim {
                rho[(r, c)] += psi[r] * conj;
            }
        }
    }
    let n = states.len() as f64;
    rho.iter_mut().for_each(|e| *e /= n);
    Ok(EnsembleDensity {
        geometry,
        time,
        realizations: states.len(),
        active,
        rho,
    })
}

impl EnsembleDensity {
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn realizations(&self) -> usize {
        self.realizations
    }

    pub fn active_sites(&self) -> &[usize] {
        &self.active
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// The restricted matrix itself.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    /// The density matrix over every lattice site.
    pub fn full_matrix(&self) -> DMatrix<Complex64> {
        let n = 2 * self.geometry.sites();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for (a, &i) in self.active.iter().enumerate() {
            for (b, &j) in self.active.iter().enumerate() {
                for s in 0..2 {
                    for t in 0..2 {
                        out[(2 * i + s, 2 * j + t)] = self.rho[(2 * a + s, 2 * b + t)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).sum()
    }

    /// Partial trace over position.
    pub fn coin_reduced(&self) -> CoinDensity {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for a in 0..self.active.len() {
            for (s, row) in m.iter_mut().enumerate() {
                for (t, e) in row.iter_mut().enumerate() {
                    *e += self.rho[(2 * a + s, 2 * a + t)];
                }
            }
        }
        CoinDensity { m }
    }

    /// Diagonal of the position marginal, indexed like the lattice sites.
    pub fn site_populations(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.geometry.sites()];
        for (a, &i) in self.active.iter().enumerate() {
            p[i] = self.rho[(2 * a, 2 * a)].re + self.rho[(2 * a + 1, 2 * a + 1)].re;
        }
        p
    }

    /// `tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|e| e.norm_sqr()).sum()
    }
}

/// Transpose over the coin factor:
/// `rho'_{(x, s), (x', s')} = rho_{(x, s'), (x', s)}`.
pub fn partial_transpose(rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = rho.nrows();
    DMatrix::from_fn(dim, dim, |r, c| {
        let (x, s) = (r / 2, r % 2);
        let (y, t) = (c / 2, c % 2);
        rho[(2 * x + t, 2 * y + s)]
    })
}

/// Eigenvalues of a Hermitian matrix, checked through the eigenpair residuals.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    if dim != m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    let scale = m.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 1000 * dim).ok_or_else(|| {
        Error::Eigensolver {
            dim,
            reason: "iteration limit reached".into(),
        }
    })?;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if !lambda.is_finite() {
            return Err(Error::Eigensolver {
                dim,
                reason: format!("eigenvalue {k} is not finite"),
            });
        }
        let v = eig.eigenvectors.column(k);
        let residual = (m * v - v * Complex64::new(lambda, 0.0)).norm();
        if residual > RESIDUAL_TOL * scale.max(1.0) {
            return Err(Error::Eigensolver {
                dim,
                reason: format!("residual {residual:e} for eigenvalue {lambda}"),
            });
        }
    }
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// `N = (sum |lambda(rho^{T_c})| - 1) / 2`, clamped at zero.
pub fn negativity(density: &EnsembleDensity) -> Result<f64> {
    let tr = density.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::Trace(tr));
    }
    let eigs = hermitian_eigenvalues(&partial_transpose(density.matrix()))?;
    let trace_norm: f64 = eigs.iter().map(|l| l.abs()).sum();
    Ok(((trace_norm - 1.0) / 2.0).max(0.0))
}
