//! Distribution-level observables of single walks and disorder ensembles.

use alloc::vec;
use alloc::vec::Vec;

// Redundant when another crate in the graph links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryKind};
use crate::spline::{Smoothing, SmoothingSpline};
use crate::state::WalkState;

/// Walker occupation probabilities `p_x` indexed like the lattice sites.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    pub p: Vec<f64>,
    pub time: usize,
    pub geometry: Geometry,
}

impl ProbDist {
    pub fn at(&self, x: i64) -> f64 {
        self.geometry.index(x).map_or(0.0, |i| self.p[i])
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    fn check_compatible(&self, other: &ProbDist) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch);
        }
        if self.time != other.time {
            return Err(Error::TimeMismatch {
                expected: self.time,
                found: other.time,
            });
        }
        Ok(())
    }
}

/// `p_x = |psi_{x,up}|^2 + |psi_{x,down}|^2`.
pub fn occupation(state: &WalkState) -> ProbDist {
    let p = state
        .amplitudes()
        .chunks_exact(2)
        .map(|s| s[0].norm_sqr() + s[1].norm_sqr())
        .collect();
    ProbDist {
        p,
        time: state.time(),
        geometry: *state.geometry(),
    }
}

fn check_ensemble(states: &[WalkState]) -> Result<&WalkState> {
    let first = states.first().ok_or(Error::EmptyEnsemble)?;
    for s in &states[1..] {
        if s.geometry() != first.geometry() {
            return Err(Error::GeometryMismatch);
        }
        if s.time() != first.time() {
            return Err(Error::TimeMismatch {
                expected: first.time(),
                found: s.time(),
            });
        }
    }
    Ok(first)
}

/// Mean of the per-realization occupations, summed in slice order.
pub fn ensemble_occupation(states: &[WalkState]) -> Result<ProbDist> {
    let first = check_ensemble(states)?;
    let mut p = vec![0.0; first.geometry().sites()];
    for s in states {
        for (acc, pair) in p.iter_mut().zip(s.amplitudes().chunks_exact(2)) {
            *acc += pair[0].norm_sqr() + pair[1].norm_sqr();
        }
    }
    let n = states.len() as f64;
    p.iter_mut().for_each(|v| *v /= n);
    Ok(ProbDist {
        p,
        time: first.time(),
        geometry: *first.geometry(),
    })
}

/// Probability of finding the walker back on its initial site.
pub fn return_probability(dist: &ProbDist) -> f64 {
    dist.p[dist.geometry.origin()]
}

/// Reference flat distribution for the mixing ratio.
///
/// On the line it is uniform over the `t + 1` sites inside the light cone
/// that match the parity of `t`; on finite lattices it is `1/L`.
pub fn flat_distribution(geometry: &Geometry, t: usize) -> ProbDist {
    let n = geometry.sites();
    let p = match geometry.kind() {
        GeometryKind::Line => {
            let w = 1.0 / (t as f64 + 1.0);
            (0..n)
                .map(|i| {
                    let x = geometry.position(i);
                    let inside =
                        x.unsigned_abs() as usize <= t && (t as i64 - x).rem_euclid(2) == 0;
                    if inside {
                        w
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        GeometryKind::Ring | GeometryKind::ReflectiveSegment => vec![1.0 / n as f64; n],
    };
    ProbDist {
        p,
        time: t,
        geometry: *geometry,
    }
}

/// `M = || p - p_flat ||_1`, bounded by 2.
pub fn mixing_ratio(dist: &ProbDist, flat: &ProbDist) -> Result<f64> {
    dist.check_compatible(flat)?;
    Ok(dist.p.iter().zip(&flat.p).map(|(a, b)| (a - b).abs()).sum())
}

/// `<x^2> = sum_x p_x x^2` about the origin site.
pub fn msd(dist: &ProbDist) -> f64 {
    dist.p
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let x = dist.geometry.position(i) as f64;
            p * x * x
        })
        .sum()
}

/// `F = (1/N) sum_i |<psi_i|phi>|^2` against a reference state at the same
/// time.
pub fn fidelity(states: &[WalkState], reference: &WalkState) -> Result<f64> {
    let first = check_ensemble(states)?;
    if first.time() != reference.time() {
        return Err(Error::TimeMismatch {
            expected: reference.time(),
            found: first.time(),
        });
    }
    let mut acc = 0.0;
    for s in states {
        acc += s.inner(reference)?.norm_sqr();
    }
    Ok(acc / states.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsdSeries {
    pub times: Vec<usize>,
    pub msd: Vec<f64>,
    pub disorder: f64,
}

/// Logarithmic growth rate `d ln<x^2> / d ln t` at every sample time.
///
/// A cubic smoothing spline is fitted to `(ln t, ln <x^2>)` and
/// differentiated at the knots. Needs at least 10 samples, all at `t > 0`
/// with positive `<x^2>`.
pub fn growth_exponent(series: &MsdSeries, smoothing: Smoothing) -> Result<Vec<(usize, f64)>> {
    if series.times.len() != series.msd.len() {
        return Err(Error::InvalidArgument(
            "times and msd differ in length".into(),
        ));
    }
    if series.times.len() < 10 {
        return Err(Error::InvalidArgument(alloc::format!(
            "growth exponent needs at least 10 samples, got {}",
            series.times.len()
        )));
    }
    if let Some(&t) = series.times.iter().find(|&&t| t == 0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "sample at t = {t} has no logarithm"
        )));
    }
    if let Some(&m) = series.msd.iter().find(|&&m| m.is_nan() || m <= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "mean squared displacement must be positive, got {m}"
        )));
    }
    let x: Vec<f64> = series.times.iter().map(|&t| (t as f64).ln()).collect();
    let y: Vec<f64> = series.msd.iter().map(|m| m.ln()).collect();
    let spline = SmoothingSpline::fit(&x, &y, smoothing)?;
    Ok(series
        .times
        .iter()
        .copied()
        .zip(spline.knot_derivatives())
        .collect())
}
