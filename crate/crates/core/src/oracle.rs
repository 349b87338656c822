//! Closed-form solution of the clean Hadamard walk on the infinite line.
//!
//! The walk is diagonal in momentum: a localized spinor evolves by powers of
//! the 2x2 matrix `J_k = J_+ e^{ik} + J_- e^{-ik}`, whose eigenphases are
//! `-omega_k` and `pi + omega_k` with `sin omega_k = sin k / sqrt 2`. Back in
//! real space each amplitude is an integral over `k` of
//! `e^{-i (k x + omega_k t)}` times a smooth periodic weight, evaluated here
//! with the uniform trapezoidal rule.
//!
//! Spinors in this module are ordered `(down, up)` and the recursion is
//! `psi_x(t+1) = J_+ psi_{x-1}(t) + J_- psi_{x+1}(t)`. This is the spatial
//! mirror of the engine's convention, so the two are compared through
//! occupation probabilities only.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Redundant when another crate in the graph links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::disorder::CoinField;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::observables::{occupation, ProbDist};
use crate::state::{evolve, initial_state};

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;
const PI: f64 = core::f64::consts::PI;
/// Largest change allowed when the number of quadrature points doubles.
pub const RICHARDSON_TOL: f64 = 1e-8;

/// `J_k` in `(down, up)` order.
pub fn jk_matrix(k: f64) -> [[Complex64; 2]; 2] {
    let ep = Complex64::from_polar(FRAC_1_SQRT_2, k);
    let em = Complex64::from_polar(FRAC_1_SQRT_2, -k);
    // J_+ fills the second row, J_- the first.
    [[em, em], [ep, -ep]]
}

/// `(lambda_+, lambda_-) = ((+-sqrt(1 + cos^2 k) - i sin k) / sqrt 2)`.
pub fn jk_eigenvalues(k: f64) -> (Complex64, Complex64) {
    let root = (1.0 + k.cos() * k.cos()).sqrt();
    let im = -k.sin();
    (
        Complex64::new(root, im) * FRAC_1_SQRT_2,
        Complex64::new(-root, im) * FRAC_1_SQRT_2,
    )
}

/// `omega_k` on the principal branch `[-pi/2, pi/2]`.
pub fn dispersion(k: f64) -> f64 {
    (k.sin() * FRAC_1_SQRT_2).asin()
}

/// Coin amplitudes `(a, b) = (<down|coin>, <up|coin>)` of a walker
/// localized at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCoin {
    pub down: Complex64,
    pub up: Complex64,
}

impl InitialCoin {
    /// `(|down> + i |up>) / sqrt 2`, the start that spreads symmetrically.
    pub fn symmetric() -> Self {
        InitialCoin {
            down: Complex64::new(FRAC_1_SQRT_2, 0.0),
            up: Complex64::new(0.0, FRAC_1_SQRT_2),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.down.norm_sqr() + self.up.norm_sqr()
    }
}

pub fn default_quad_points(t: usize) -> usize {
    16 * (t + 1)
}

/// Momentum grid samples shared by every `x`.
struct Grid {
    k: Vec<f64>,
    ratio: Vec<f64>,
    inv_root: Vec<f64>,
    omega: Vec<f64>,
}

impl Grid {
    fn new(points: usize) -> Self {
        let k: Vec<f64> = (0..points)
            .map(|j| -PI + 2.0 * PI * j as f64 / points as f64)
            .collect();
        let inv_root: Vec<f64> = k
            .iter()
            .map(|k| 1.0 / (1.0 + k.cos() * k.cos()).sqrt())
            .collect();
        let ratio = k.iter().zip(&inv_root).map(|(k, r)| k.cos() * r).collect();
        let omega = k.iter().map(|&k| dispersion(k)).collect();
        Grid {
            k,
            ratio,
            inv_root,
            omega,
        }
    }

    /// `(psi_down, psi_up)` at `(x, t)` by the trapezoidal rule.
    fn amplitudes(&self, x: i64, t: usize, coin: &InitialCoin) -> [Complex64; 2] {
        if (t as i64 + x).rem_euclid(2) == 1 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        let (mut down, mut up) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for j in 0..self.k.len() {
            let k = self.k[j];
            let phase = Complex64::from_polar(1.0, -(k * x as f64 + self.omega[j] * t as f64));
            let shift = Complex64::from_polar(self.inv_root[j], k);
            down += coin.down * (1.0 + self.ratio[j]) * phase + coin.up * shift.conj() * phase;
            up += coin.down * shift * phase + coin.up * (1.0 - self.ratio[j]) * phase;
        }
        // The parity factor 2 cancels the 1/2 in front of each integral.
        let m = self.k.len() as f64;
        [down / m, up / m]
    }
}

fn check_points(t: usize, quad_points: usize) -> Result<()> {
    if quad_points < 8 * (t + 1) {
        return Err(Error::InvalidArgument(alloc::format!(
            "{quad_points} quadrature points cannot resolve t = {t}; need at least {}",
            8 * (t + 1)
        )));
    }
    Ok(())
}

fn richardson(
    x: i64,
    t: usize,
    points: usize,
    a: [Complex64; 2],
    b: [Complex64; 2],
) -> Result<[Complex64; 2]> {
    let change = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    if change > RICHARDSON_TOL {
        return Err(Error::Quadrature {
            x,
            t,
            points,
            change,
        });
    }
    Ok(b)
}

/// `(psi_down, psi_up)` at site `x` after `t` steps, with the result at
/// `2 * quad_points` returned once it agrees with `quad_points`.
pub fn analytic_amplitudes(
    x: i64,
    t: usize,
    coin: &InitialCoin,
    quad_points: usize,
) -> Result<[Complex64; 2]> {
    check_points(t, quad_points)?;
    let coarse = Grid::new(quad_points).amplitudes(x, t, coin);
    let fine = Grid::new(2 * quad_points).amplitudes(x, t, coin);
    richardson(x, t, quad_points, coarse, fine)
}

/// Occupation on `Geometry::line(max(t, 1))` after `t` steps.
pub fn analytic_occupation(t: usize, coin: &InitialCoin, quad_points: usize) -> Result<ProbDist> {
    check_points(t, quad_points)?;
    let geometry = Geometry::line(t.max(1));
    let (coarse, fine) = (Grid::new(quad_points), Grid::new(2 * quad_points));
    let mut p = vec![0.0; geometry.sites()];
    for (i, v) in p.iter_mut().enumerate() {
        let x = geometry.position(i);
        let a = coarse.amplitudes(x, t, coin);
        let b = fine.amplitudes(x, t, coin);
        let psi = richardson(x, t, quad_points, a, b)?;
        *v = psi[0].norm_sqr() + psi[1].norm_sqr();
    }
    Ok(ProbDist {
        p,
        time: t,
        geometry,
    })
}

/// `max_x |p_x(analytic) - p_x(engine)|` for the symmetric start on the clean
/// line after `t` steps.
pub fn compare_with_engine(t: usize, quad_points: usize) -> Result<f64> {
    let analytic = analytic_occupation(t, &InitialCoin::symmetric(), quad_points)?;
    let geometry = analytic.geometry;
    let field = CoinField::hadamard(&geometry);
    let state = evolve(initial_state(&geometry), &field, t, &[])?
        .pop()
        .expect("evolve returns the final state");
    let engine = occupation(&state);
    Ok(analytic
        .p
        .iter()
        .zip(&engine.p)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M2 = [[Complex64; 2]; 2];

    fn mul(a: &M2, b: &M2) -> M2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    fn adjoint(a: &M2) -> M2 {
        [
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ]
    }

    /// Quasi-random momenta from the golden-ratio sequence.
    fn momenta(n: usize) -> impl Iterator<Item = f64> {
        let g = 0.5 * (5.0f64.sqrt() - 1.0);
        (0..n).map(move |j| -PI + 2.0 * PI * ((j as f64 * g) % 1.0))
    }

    #[test]
    fn jk_is_unitary() {
        for k in momenta(1000) {
            let j = jk_matrix(k);
            let p = mul(&adjoint(&j), &j);
            for a in 0..2 {
                for b in 0..2 {
                    let id = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (p[a][b] - Complex64::new(id, 0.0)).norm() < 1e-14,
                        "k = {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn jk_at_zero_is_hadamard() {
        let j = jk_matrix(0.0);
        let s = FRAC_1_SQRT_2;
        let h = [[s, s], [s, -s]];
        for a in 0..2 {
            for b in 0..2 {
                assert!((j[a][b] - Complex64::new(h[a][b], 0.0)).norm() < 1e-16);
            }
        }
    }

    #[test]
    fn eigenvalues_match_jk_and_lie_on_unit_circle() {
        for k in momenta(1000) {
            let (lp, lm) = jk_eigenvalues(k);
            assert!((lp.norm() - 1.0).abs() < 1e-14);
            assert!((lm.norm() - 1.0).abs() < 1e-14);
            assert!((lp + lm.conj()).norm() < 1e-15);
            let j = jk_matrix(k);
            let trace = j[0][0] + j[1][1];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            assert!((lp + lm - trace).norm() < 1e-14);
            assert!((lp * lm - det).norm() < 1e-14);
            let omega = dispersion(k);
            assert!((lp - Complex64::from_polar(1.0, -omega)).norm() < 1e-14);
        }
    }

    #[test]
    fn dispersion_branch() {
        assert_eq!(dispersion(0.0), 0.0);
        for k in momenta(200) {
            assert!((dispersion(-k) + dispersion(k)).abs() < 1e-15);
            assert!(dispersion(k).sin().abs() <= FRAC_1_SQRT_2 + 1e-16);
            assert!(dispersion(k).abs() <= PI / 2.0);
        }
    }

    #[test]
    fn identity_at_time_zero_and_parity_zeros() {
        let coin = InitialCoin::symmetric();
        let psi = analytic_amplitudes(0, 0, &coin, 64).unwrap();
        assert!((psi[0] - coin.down).norm() < 1e-12);
        assert!((psi[1] - coin.up).norm() < 1e-12);
        for (x, t) in [(1, 0), (0, 3), (-4, 7), (2, 1)] {
            assert_eq!(
                analytic_amplitudes(x, t, &coin, 8 * (t + 1)).unwrap(),
                [Complex64::new(0.0, 0.0); 2]
            );
        }
        for x in [-2, 2, 4] {
            let psi = analytic_amplitudes(x, 0, &coin, 64).unwrap();
            assert!(psi[0].norm() < 1e-12 && psi[1].norm() < 1e-12);
        }
    }

    #[test]
    fn two_step_occupation() {
        let d = analytic_occupation(2, &InitialCoin::symmetric(), default_quad_points(2)).unwrap();
        for (x, p) in [(-2, 0.25), (-1, 0.0), (0, 0.5), (1, 0.0), (2, 0.25)] {
            assert!((d.at(x) - p).abs() < 1e-12, "x = {x}: {}", d.at(x));
        }
    }

    #[test]
    fn too_few_points_is_an_error() {
        let coin = InitialCoin::symmetric();
        assert!(matches!(
            analytic_amplitudes(0, 10, &coin, 87),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn unresolved_quadrature_trips_the_richardson_check() {
        let coin = InitialCoin::symmetric();
        let (t, x) = (30, 10);
        let coarse = Grid::new(16).amplitudes(x, t, &coin);
        let fine = Grid::new(32).amplitudes(x, t, &coin);
        assert!(matches!(
            richardson(x, t, 16, coarse, fine),
            Err(Error::Quadrature { points: 16, .. })
        ));
        assert!(analytic_amplitudes(x, t, &coin, default_quad_points(t)).is_ok());
    }

    #[test]
    fn normalized_and_symmetric() {
        let coin = InitialCoin::symmetric();
        for t in [1, 7, 20, 55, 100] {
            let d = analytic_occupation(t, &coin, default_quad_points(t)).unwrap();
            assert!((d.total() - 1.0).abs() < 1e-9, "t = {t}: {}", d.total());
            for x in 0..=t as i64 {
                assert!((d.at(x) - d.at(-x)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn agrees_with_engine_up_to_one_hundred_steps() {
        for t in 1..=100 {
            let diff = compare_with_engine(t, default_quad_points(t)).unwrap();
            assert!(diff < 1e-8, "t = {t}: {diff:e}");
        }
    }
}
