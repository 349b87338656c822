//! Walker-coin state vectors and the coin-then-shift evolution.
//!
//! Amplitudes are stored site-major with the coin index varying fastest:
//! `amplitudes[2 * i]` is `(site i, up)` and `amplitudes[2 * i + 1]` is
//! `(site i, down)`. Spin up hops to `x + 1`, spin down to `x - 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_complex::Complex64;
// Redundant when another crate in the graph links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::disorder::CoinField;
use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryKind};

pub const UP: usize = 0;
pub const DOWN: usize = 1;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
const fn up(i: usize) -> usize {
    2 * i
}

#[inline]
const fn down(i: usize) -> usize {
    2 * i + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    geometry: Geometry,
    amplitudes: Vec<Complex64>,
    time: usize,
    /// Site indices outside this range hold exact zeros.
    support: (usize, usize),
}

/// The localized symmetric start `|0> (|down> + i|up>) / sqrt 2`.
pub fn initial_state(geometry: &Geometry) -> WalkState {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let o = geometry.origin();
    let mut amplitudes = vec![ZERO; 2 * geometry.sites()];
    amplitudes[up(o)] = Complex64::new(0.0, s);
    amplitudes[down(o)] = Complex64::new(s, 0.0);
    WalkState {
        geometry: *geometry,
        amplitudes,
        time: 0,
        support: (o, o),
    }
}

impl WalkState {
    /// Wraps raw amplitudes in `(site, coin)` order. The vector is taken as
    /// given; callers that need a physical state normalize it first.
    pub fn from_amplitudes(
        geometry: &Geometry,
        amplitudes: Vec<Complex64>,
        time: usize,
    ) -> Result<Self> {
        if amplitudes.len() != 2 * geometry.sites() {
            return Err(Error::SizeMismatch {
                expected: 2 * geometry.sites(),
                found: amplitudes.len() / 2,
            });
        }
        let mut state = WalkState {
            geometry: *geometry,
            amplitudes,
            time,
            support: (0, geometry.sites() - 1),
        };
        state.shrink_support();
        Ok(state)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, site: usize, coin: usize) -> Complex64 {
        self.amplitudes[2 * site + coin]
    }

    /// `(up, down)` amplitudes at array index `site`.
    pub fn spinor(&self, site: usize) -> [Complex64; 2] {
        [self.amplitudes[up(site)], self.amplitudes[down(site)]]
    }

    /// Site indices that may carry nonzero amplitude.
    pub fn support(&self) -> RangeInclusive<usize> {
        self.support.0..=self.support.1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &WalkState) -> Result<Complex64> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn shrink_support(&mut self) {
        let nonzero =
            |i: &usize| self.amplitudes[up(*i)] != ZERO || self.amplitudes[down(*i)] != ZERO;
        let lo = (0..self.geometry.sites()).find(nonzero);
        let hi = (0..self.geometry.sites()).rev().find(nonzero);
        self.support = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (self.geometry.origin(), self.geometry.origin()),
        };
    }

    /// Multiplies every site spinor by its local gate `G(r_x)`. Site
    /// populations are unchanged.
    pub fn apply_coin(&mut self, field: &CoinField) -> Result<()> {
        if field.len() != self.geometry.sites() {
            return Err(Error::SizeMismatch {
                expected: self.geometry.sites(),
                found: field.len(),
            });
        }
        let (lo, hi) = self.support;
        let weights = &field.weights()[lo..=hi];
        let amps = &mut self.amplitudes[up(lo)..=down(hi)];
        for (pair, &(a, b)) in amps.chunks_exact_mut(2).zip(weights) {
            let (u, d) = (pair[0], pair[1]);
            pair[0] = u * a + d * b;
            pair[1] = u * b - d * a;
        }
        Ok(())
    }

    /// Conditional shift. On the line an amplitude about to leave the
    /// window is an error, never silently dropped.
    pub fn apply_shift(&mut self) -> Result<()> {
        let n = self.geometry.sites();
        let a = &mut self.amplitudes;
        match self.geometry.kind() {
            GeometryKind::Line => {
                if a[up(n - 1)] != ZERO || a[down(0)] != ZERO {
                    return Err(Error::WindowOverflow { time: self.time });
                }
                let (lo, hi) = self.support;
                for i in (lo..=hi.min(n - 2)).rev() {
                    a[up(i + 1)] = a[up(i)];
                }
                a[up(lo)] = ZERO;
                for i in lo.max(1)..=hi {
                    a[down(i - 1)] = a[down(i)];
                }
                a[down(hi)] = ZERO;
                self.support = (lo.saturating_sub(1), (hi + 1).min(n - 1));
            }
            GeometryKind::Ring => {
                let wrap_up = a[up(n - 1)];
                for i in (0..n - 1).rev() {
                    a[up(i + 1)] = a[up(i)];
                }
                a[up(0)] = wrap_up;
                let wrap_down = a[down(0)];
                for i in 1..n {
                    a[down(i - 1)] = a[down(i)];
                }
                a[down(n - 1)] = wrap_down;
                self.support = (0, n - 1);
            }
            GeometryKind::ReflectiveSegment => {
                let edge_up = a[up(n - 1)];
                let edge_down = a[down(0)];
                for i in (0..n - 1).rev() {
                    a[up(i + 1)] = a[up(i)];
                }
                a[up(0)] = edge_down;
                for i in 1..n {
                    a[down(i - 1)] = a[down(i)];
                }
                a[down(n - 1)] = edge_up;
                self.support = (0, n - 1);
            }
        }
        Ok(())
    }

    /// One step `|psi(t+1)> = S C |psi(t)>`.
    pub fn step(&mut self, field: &CoinField) -> Result<()> {
        self.apply_coin(field)?;
        self.apply_shift()?;
        self.time += 1;
        Ok(())
    }
}

/// Evolves `state` for `steps` steps and returns copies at each of
/// `snapshot_times` (sorted, at most `steps`) followed by the final state
/// unless the last snapshot already is the final time.
pub fn evolve(
    mut state: WalkState,
    field: &CoinField,
    steps: usize,
    snapshot_times: &[usize],
) -> Result<Vec<WalkState>> {
    if snapshot_times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "snapshot times must be sorted".into(),
        ));
    }
    let start = state.time;
    let end = start + steps;
    if let Some(&bad) = snapshot_times.iter().find(|&&t| t < start || t > end) {
        return Err(Error::InvalidArgument(alloc::format!(
            "snapshot t = {bad} outside [{start}, {end}]"
        )));
    }
    let mut out = Vec::with_capacity(snapshot_times.len() + 1);
    let mut pending = snapshot_times.iter().peekable();
    loop {
        while pending.next_if(|&&t| t == state.time).is_some() {
            if out.last().map(|s: &WalkState| s.time) != Some(state.time) {
                out.push(state.clone());
            }
        }
        if state.time == end {
            break;
        }
        state.step(field)?;
    }
    if out.last().map(|s| s.time) != Some(end) {
        out.push(state);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::sample_coin_field;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    fn basis(geometry: &Geometry, site: usize, coin: usize) -> WalkState {
        let mut amps = vec![ZERO; 2 * geometry.sites()];
        amps[2 * site + coin] = Complex64::new(1.0, 0.0);
        WalkState::from_amplitudes(geometry, amps, 0).unwrap()
    }

    #[test]
    fn initial_state_is_normalized_and_local() {
        let g = Geometry::line(5);
        let s = initial_state(&g);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(s.support(), 5..=5);
        assert_eq!(s.time(), 0);
    }

    #[test]
    fn line_shift_moves_up_right() {
        let g = Geometry::line(3);
        let mut s = basis(&g, g.origin(), UP);
        s.apply_shift().unwrap();
        assert!(close(
            s.amplitude(g.origin() + 1, UP),
            Complex64::new(1.0, 0.0)
        ));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_shift_moves_down_left() {
        let g = Geometry::line(3);
        let mut s = basis(&g, g.origin(), DOWN);
        s.apply_shift().unwrap();
        assert!(close(
            s.amplitude(g.origin() - 1, DOWN),
            Complex64::new(1.0, 0.0)
        ));
    }

    #[test]
    fn ring_wraps_around() {
        let g = Geometry::ring(3).unwrap();
        let mut s = basis(&g, 2, UP);
        s.apply_shift().unwrap();
        assert_eq!(s.amplitude(0, UP), Complex64::new(1.0, 0.0));
        let mut s = basis(&g, 0, DOWN);
        s.apply_shift().unwrap();
        assert_eq!(s.amplitude(2, DOWN), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn segment_reflects_by_flipping_coin() {
        let g = Geometry::segment(5).unwrap();
        let mut s = basis(&g, 4, UP);
        s.apply_shift().unwrap();
        assert_eq!(s.amplitude(4, DOWN), Complex64::new(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
        let mut s = basis(&g, 0, DOWN);
        s.apply_shift().unwrap();
        assert_eq!(s.amplitude(0, UP), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn line_overflow_is_an_error() {
        let g = Geometry::line(2);
        let mut s = basis(&g, g.sites() - 1, UP);
        assert_eq!(s.apply_shift(), Err(Error::WindowOverflow { time: 0 }));
        let field = CoinField::hadamard(&g);
        let mut s = initial_state(&g);
        s.step(&field).unwrap();
        s.step(&field).unwrap();
        assert!(matches!(
            s.step(&field),
            Err(Error::WindowOverflow { time: 2 })
        ));
    }

    #[test]
    fn z_coin_flips_down_sign() {
        let g = Geometry::line(2);
        let mut s = initial_state(&g);
        let before = s.spinor(g.origin());
        let mut r = vec![0.5; g.sites()];
        r[g.origin()] = 1.0;
        s.apply_coin(&CoinField::from_values(r).unwrap()).unwrap();
        let after = s.spinor(g.origin());
        assert_eq!(after[0], before[0]);
        assert_eq!(after[1], -before[1]);
    }

    #[test]
    fn coin_matches_explicit_gate() {
        let g = Geometry::ring(7).unwrap();
        let field = sample_coin_field(&g, 1.0, 5).unwrap();
        let amps: Vec<Complex64> = (0..14)
            .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let mut s = WalkState::from_amplitudes(&g, amps, 0).unwrap();
        let reference: Vec<[Complex64; 2]> =
            (0..7).map(|i| field.gate(i).apply(s.spinor(i))).collect();
        s.apply_coin(&field).unwrap();
        for (i, v) in reference.iter().enumerate() {
            assert!(close(s.spinor(i)[0], v[0]) && close(s.spinor(i)[1], v[1]));
        }
    }

    #[test]
    fn coin_size_mismatch_is_rejected() {
        let g = Geometry::line(3);
        let other = Geometry::line(4);
        let mut s = initial_state(&g);
        assert!(s.apply_coin(&CoinField::hadamard(&other)).is_err());
    }

    #[test]
    fn first_hadamard_steps_by_hand() {
        let g = Geometry::line(2);
        let field = CoinField::hadamard(&g);
        let mut s = initial_state(&g);
        s.step(&field).unwrap();
        let o = g.origin();
        // H (i, 1)/sqrt2 = ((1+i)/2, (i-1)/2)
        assert!(close(s.amplitude(o + 1, UP), Complex64::new(0.5, 0.5)));
        assert!(close(s.amplitude(o - 1, DOWN), Complex64::new(-0.5, 0.5)));
        s.step(&field).unwrap();
        let p = |i: usize| s.spinor(i).iter().map(|a| a.norm_sqr()).sum::<f64>();
        assert!((p(o - 2) - 0.25).abs() < 1e-15);
        assert!((p(o) - 0.5).abs() < 1e-15);
        assert!((p(o + 2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn evolve_snapshots() {
        let g = Geometry::line(10);
        let field = CoinField::hadamard(&g);
        let only = evolve(initial_state(&g), &field, 0, &[]).unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0], initial_state(&g));

        let snaps = evolve(initial_state(&g), &field, 10, &[0, 4, 4, 10]).unwrap();
        let times: Vec<usize> = snaps.iter().map(|s| s.time()).collect();
        assert_eq!(times, vec![0, 4, 10]);

        let snaps = evolve(initial_state(&g), &field, 10, &[3]).unwrap();
        let times: Vec<usize> = snaps.iter().map(|s| s.time()).collect();
        assert_eq!(times, vec![3, 10]);

        assert!(evolve(initial_state(&g), &field, 10, &[5, 2]).is_err());
        assert!(evolve(initial_state(&g), &field, 10, &[11]).is_err());
    }
}
