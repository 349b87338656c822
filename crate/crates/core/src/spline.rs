//! Natural cubic smoothing splines.
//!
//! Minimizes `sum_i (y_i - g(x_i))^2 + alpha * integral g''(x)^2 dx` in the
//! Reinsch formulation: with knot spacings `h`, the tridiagonal matrices
//! `Q` (n x n-2) and `R` (n-2 x n-2) give the interior second derivatives
//! `gamma` from `(R + alpha Q^T Q) gamma = Q^T y` and the fitted values from
//! `g = y - alpha Q gamma`. The pentadiagonal system is solved with a banded
//! LDL^T factorization in O(n).
//!
//! `Smoothing::Gcv` picks `alpha` by minimizing the generalized
//! cross-validation score `n RSS / tr(I - A)^2`; the trace uses the band of
//! `(R + alpha Q^T Q)^{-1}` from the Hutchinson-de Hoog recursion.

use alloc::vec;
use alloc::vec::Vec;

// Redundant when another crate in the graph links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    /// Penalty weight chosen by generalized cross-validation.
    Gcv,
    /// Explicit penalty weight `alpha > 0`.
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct SmoothingSpline {
    x: Vec<f64>,
    fitted: Vec<f64>,
    /// Second derivative at every knot, zero at both ends.
    curvature: Vec<f64>,
    penalty: f64,
}

/// Pentadiagonal symmetric system in three bands.
struct Banded {
    d0: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

struct Factor {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

struct Problem<'a> {
    h: Vec<f64>,
    y: &'a [f64],
    r: Banded,
    qtq: Banded,
    qty: Vec<f64>,
}

struct Solution {
    gamma: Vec<f64>,
    fitted: Vec<f64>,
    factor: Factor,
}

impl<'a> Problem<'a> {
    fn new(x: &[f64], y: &'a [f64]) -> Self {
        let n = x.len();
        let m = n - 2;
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        // Column j of Q (interior knot j + 1) has entries at rows j, j+1, j+2.
        let q = |j: usize| {
            let (a, b) = (1.0 / h[j], 1.0 / h[j + 1]);
            [a, -a - b, b]
        };
        let mut r = Banded {
            d0: vec![0.0; m],
            d1: vec![0.0; m],
            d2: vec![0.0; m],
        };
        let mut qtq = Banded {
            d0: vec![0.0; m],
            d1: vec![0.0; m],
            d2: vec![0.0; m],
        };
        let mut qty = vec![0.0; m];
        for j in 0..m {
            let cj = q(j);
            r.d0[j] = (h[j] + h[j + 1]) / 3.0;
            if j + 1 < m {
                r.d1[j] = h[j + 1] / 6.0;
            }
            qtq.d0[j] = cj[0] * cj[0] + cj[1] * cj[1] + cj[2] * cj[2];
            if j + 1 < m {
                let cn = q(j + 1);
                qtq.d1[j] = cj[1] * cn[0] + cj[2] * cn[1];
            }
            if j + 2 < m {
                let cn = q(j + 2);
                qtq.d2[j] = cj[2] * cn[0];
            }
            qty[j] = cj[0] * y[j] + cj[1] * y[j + 1] + cj[2] * y[j + 2];
        }
        Problem { h, y, r, qtq, qty }
    }

    fn factor(&self, alpha: f64) -> Result<Factor> {
        let m = self.qty.len();
        let (mut d, mut l1, mut l2) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for j in 0..m {
            let b0 = self.r.d0[j] + alpha * self.qtq.d0[j];
            let b1 = self.r.d1[j] + alpha * self.qtq.d1[j];
            let b2 = self.r.d2[j] + alpha * self.qtq.d2[j];
            let mut dj = b0;
            if j >= 1 {
                dj -= l1[j - 1] * l1[j - 1] * d[j - 1];
            }
            if j >= 2 {
                dj -= l2[j - 2] * l2[j - 2] * d[j - 2];
            }
            if dj.is_nan() || dj <= 0.0 || dj.is_infinite() {
                return Err(Error::InvalidArgument(alloc::format!(
                    "smoothing system not positive definite at alpha = {alpha:e}"
                )));
            }
            d[j] = dj;
            let mut c1 = b1;
            if j >= 1 {
                c1 -= l2[j - 1] * l1[j - 1] * d[j - 1];
            }
            l1[j] = c1 / dj;
            l2[j] = b2 / dj;
        }
        Ok(Factor { d, l1, l2 })
    }

    fn solve(&self, alpha: f64) -> Result<Solution> {
        let factor = self.factor(alpha)?;
        let m = self.qty.len();
        let Factor { d, l1, l2 } = &factor;
        let mut z = self.qty.clone();
        for j in 0..m {
            if j >= 1 {
                z[j] -= l1[j - 1] * z[j - 1];
            }
            if j >= 2 {
                z[j] -= l2[j - 2] * z[j - 2];
            }
        }
        for j in 0..m {
            z[j] /= d[j];
        }
        for j in (0..m).rev() {
            if j + 1 < m {
                z[j] -= l1[j] * z[j + 1];
            }
            if j + 2 < m {
                z[j] -= l2[j] * z[j + 2];
            }
        }
        let gamma = z;
        let n = m + 2;
        let mut fitted = self.y.to_vec();
        for (j, &g) in gamma.iter().enumerate() {
            let (a, b) = (1.0 / self.h[j], 1.0 / self.h[j + 1]);
            fitted[j] -= alpha * a * g;
            fitted[j + 1] -= alpha * (-a - b) * g;
            fitted[j + 2] -= alpha * b * g;
        }
        debug_assert_eq!(fitted.len(), n);
        Ok(Solution {
            gamma,
            fitted,
            factor,
        })
    }

    /// `tr(I - A) = alpha tr((R + alpha Q^T Q)^{-1} Q^T Q)`.
    fn residual_dof(&self, alpha: f64, factor: &Factor) -> f64 {
        let m = self.qty.len();
        let Factor { d, l1, l2 } = factor;
        let (mut s0, mut s1, mut s2) = (vec![0.0; m + 2], vec![0.0; m + 1], vec![0.0; m]);
        for j in (0..m).rev() {
            let (a, b) = (l1[j], l2[j]);
            if j + 2 < m {
                s2[j] = -a * s1[j + 1] - b * s0[j + 2];
            }
            if j + 1 < m {
                // Sigma_{j+2, j+1} is stored as s1[j + 1] by symmetry.
                s1[j] = -a * s0[j + 1] - b * if j + 2 < m { s1[j + 1] } else { 0.0 };
            }
            let t1 = if j + 1 < m { s1[j] } else { 0.0 };
            let t2 = if j + 2 < m { s2[j] } else { 0.0 };
            s0[j] = 1.0 / d[j] - a * t1 - b * t2;
        }
        let mut tr = 0.0;
        for j in 0..m {
            tr += s0[j] * self.qtq.d0[j];
            if j + 1 < m {
                tr += 2.0 * s1[j] * self.qtq.d1[j];
            }
            if j + 2 < m {
                tr += 2.0 * s2[j] * self.qtq.d2[j];
            }
        }
        alpha * tr
    }

    fn gcv_score(&self, log_alpha: f64) -> f64 {
        let alpha = log_alpha.exp();
        let Ok(sol) = self.solve(alpha) else {
            return f64::INFINITY;
        };
        let n = self.y.len() as f64;
        let rss: f64 = self
            .y
            .iter()
            .zip(&sol.fitted)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let dof = self.residual_dof(alpha, &sol.factor);
        if dof.is_nan() || dof <= 0.0 {
            return f64::INFINITY;
        }
        n * rss / (dof * dof)
    }

    fn gcv_alpha(&self) -> f64 {
        let tr_r: f64 = self.r.d0.iter().sum();
        let tr_qtq: f64 = self.qtq.d0.iter().sum();
        let centre = (tr_r / tr_qtq).ln();
        let ln10 = core::f64::consts::LN_10;
        let grid: Vec<f64> = (-24..=32)
            .map(|k| centre + 0.25 * k as f64 * ln10)
            .collect();
        let scores: Vec<f64> = grid.iter().map(|&g| self.gcv_score(g)).collect();
        let best = (0..grid.len())
            .min_by(|&a, &b| scores[a].total_cmp(&scores[b]))
            .unwrap_or(0);
        let lo = grid[best.saturating_sub(1)];
        let hi = grid[(best + 1).min(grid.len() - 1)];
        golden_section(|g| self.gcv_score(g), lo, hi, 60).exp()
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let ratio = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

impl SmoothingSpline {
    /// Fits the spline to strictly increasing `x`. At least three points.
    pub fn fit(x: &[f64], y: &[f64], smoothing: Smoothing) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument("x and y differ in length".into()));
        }
        if x.len() < 3 {
            return Err(Error::InvalidArgument(
                "a smoothing spline needs three points".into(),
            ));
        }
        if x.windows(2).any(|w| w[1].is_nan() || w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "knots must be strictly increasing".into(),
            ));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "knots and values must be finite".into(),
            ));
        }
        let problem = Problem::new(x, y);
        let penalty = match smoothing {
            Smoothing::Fixed(alpha) if alpha > 0.0 && alpha.is_finite() => alpha,
            Smoothing::Fixed(alpha) => {
                return Err(Error::InvalidArgument(alloc::format!(
                    "smoothing weight must be positive, got {alpha}"
                )))
            }
            Smoothing::Gcv => problem.gcv_alpha(),
        };
        let sol = problem.solve(penalty)?;
        let mut curvature = Vec::with_capacity(x.len());
        curvature.push(0.0);
        curvature.extend_from_slice(&sol.gamma);
        curvature.push(0.0);
        Ok(SmoothingSpline {
            x: x.to_vec(),
            fitted: sol.fitted,
            curvature,
            penalty,
        })
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn fitted(&self) -> &[f64] {
        &self.fitted
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.curvature
    }

    /// First derivative of the fitted spline at each knot.
    pub fn knot_derivatives(&self) -> Vec<f64> {
        let (g, c, n) = (&self.fitted, &self.curvature, self.x.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n - 1 {
            let h = self.x[i + 1] - self.x[i];
            out.push((g[i + 1] - g[i]) / h - h * (2.0 * c[i] + c[i + 1]) / 6.0);
        }
        let h = self.x[n - 1] - self.x[n - 2];
        out.push((g[n - 1] - g[n - 2]) / h + h * (c[n - 2] + 2.0 * c[n - 1]) / 6.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense reference: solve `(I + alpha Q R^{-1} Q^T) g = y` by Gaussian
    /// elimination and form the influence matrix explicitly.
    fn dense_fit(x: &[f64], y: &[f64], alpha: f64) -> (Vec<f64>, f64) {
        let n = x.len();
        let m = n - 2;
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut q = vec![vec![0.0; m]; n];
        let mut r = vec![vec![0.0; m]; m];
        for j in 0..m {
            q[j][j] = 1.0 / h[j];
            q[j + 1][j] = -1.0 / h[j] - 1.0 / h[j + 1];
            q[j + 2][j] = 1.0 / h[j + 1];
            r[j][j] = (h[j] + h[j + 1]) / 3.0;
            if j + 1 < m {
                r[j][j + 1] = h[j + 1] / 6.0;
                r[j + 1][j] = h[j + 1] / 6.0;
            }
        }
        let rinv = invert(&r);
        // K = Q R^{-1} Q^T; A = (I + alpha K)^{-1}
        let mut k = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let mut s = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        s += q[a][i] * rinv[i][j] * q[b][j];
                    }
                }
                k[a][b] = s;
            }
        }
        let mut sys = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                sys[a][b] = alpha * k[a][b] + if a == b { 1.0 } else { 0.0 };
            }
        }
        let infl = invert(&sys);
        let g: Vec<f64> = (0..n)
            .map(|a| (0..n).map(|b| infl[a][b] * y[b]).sum())
            .collect();
        let tr: f64 = (0..n).map(|a| 1.0 - infl[a][a]).sum();
        (g, tr)
    }

    fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                r
            })
            .collect();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
                .unwrap();
            m.swap(c, p);
            let piv = m[c][c];
            for v in m[c].iter_mut() {
                *v /= piv;
            }
            for r in 0..n {
                if r != c {
                    let f = m[r][c];
                    if f != 0.0 {
                        for k in 0..2 * n {
                            m[r][k] -= f * m[c][k];
                        }
                    }
                }
            }
        }
        m.into_iter().map(|r| r[n..].to_vec()).collect()
    }

    fn sample() -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (1..=14).map(|t| (t as f64).ln()).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 0.3 * v * v - v + 0.05 * ((i * 7 % 5) as f64 - 2.0))
            .collect();
        (x, y)
    }

    #[test]
    fn banded_fit_matches_dense_reference() {
        let (x, y) = sample();
        for &alpha in &[1e-3, 0.1, 3.0] {
            let fit = SmoothingSpline::fit(&x, &y, Smoothing::Fixed(alpha)).unwrap();
            let (g, tr_dense) = dense_fit(&x, &y, alpha);
            for (a, b) in fit.fitted().iter().zip(&g) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
            let p = Problem::new(&x, &y);
            let sol = p.solve(alpha).unwrap();
            let tr = p.residual_dof(alpha, &sol.factor);
            assert!((tr - tr_dense).abs() < 1e-9, "trace {tr} vs {tr_dense}");
        }
    }

    #[test]
    fn linear_data_is_reproduced() {
        let x: Vec<f64> = (0..20)
            .map(|i| 0.1 * i as f64 + 0.01 * (i * i) as f64)
            .collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        for s in [
            Smoothing::Gcv,
            Smoothing::Fixed(1e4),
            Smoothing::Fixed(1e-4),
        ] {
            let fit = SmoothingSpline::fit(&x, &y, s).unwrap();
            for d in fit.knot_derivatives() {
                assert!((d - 3.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences_of_cubic_pieces() {
        let (x, y) = sample();
        let fit = SmoothingSpline::fit(&x, &y, Smoothing::Fixed(0.05)).unwrap();
        let (g, c) = (fit.fitted(), fit.second_derivatives());
        // Evaluate piece i just right of knot i and difference numerically.
        let eval = |i: usize, t: f64| {
            let h = x[i + 1] - x[i];
            let (a, b) = (t - x[i], x[i + 1] - t);
            (a * g[i + 1] + b * g[i]) / h
                - a * b / 6.0 * ((1.0 + a / h) * c[i + 1] + (1.0 + b / h) * c[i])
        };
        let der = fit.knot_derivatives();
        for i in 0..x.len() - 1 {
            let e = 1e-6;
            let fd = (eval(i, x[i] + e) - eval(i, x[i])) / e;
            assert!((fd - der[i]).abs() < 1e-4, "knot {i}: {fd} vs {}", der[i]);
        }
    }

    #[test]
    fn gcv_recovers_smooth_trend() {
        let x: Vec<f64> = (0..80).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| v.sin() + 0.02 * (((i * 37) % 11) as f64 - 5.0))
            .collect();
        let fit = SmoothingSpline::fit(&x, &y, Smoothing::Gcv).unwrap();
        let d = fit.knot_derivatives();
        for i in 10..70 {
            assert!(
                (d[i] - x[i].cos()).abs() < 0.15,
                "at {}: {} vs {}",
                x[i],
                d[i],
                x[i].cos()
            );
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SmoothingSpline::fit(&[0.0, 1.0], &[0.0, 1.0], Smoothing::Gcv).is_err());
        assert!(SmoothingSpline::fit(&[0.0, 1.0, 1.0], &[0.0, 1.0, 2.0], Smoothing::Gcv).is_err());
        assert!(
            SmoothingSpline::fit(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0], Smoothing::Fixed(0.0))
                .is_err()
        );
    }
}
