//! The one-parameter coin family `G(r) = sqrt(r) Z + sqrt(1 - r) X`.
//!
//! Coin basis order is `(up, down)`: index 0 is spin up, index 1 spin down,
//! so `Z = diag(1, -1)` and `G(1) = Z` hold literally.

use core::ops::Mul;

use num_complex::Complex64;
// Redundant when another crate in the graph links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix {
    pub entries: [[Complex64; 2]; 2],
}

/// `[[sqrt r, sqrt(1-r)], [sqrt(1-r), -sqrt r]]`.
pub fn make_gate(r: f64) -> Result<CoinMatrix> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfUnitInterval {
            name: "r",
            value: r,
        });
    }
    let (a, b) = gate_weights(r);
    Ok(CoinMatrix::real(a, b, b, -a))
}

/// `(sqrt r, sqrt(1 - r))`, the two distinct magnitudes in `G(r)`.
#[inline]
pub(crate) fn gate_weights(r: f64) -> (f64, f64) {
    (r.sqrt(), (1.0 - r).sqrt())
}

impl CoinMatrix {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Self {
        CoinMatrix { entries }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        CoinMatrix {
            entries: [
                [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
                [Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
            ],
        }
    }

    pub fn identity() -> Self {
        CoinMatrix::new([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn pauli_x() -> Self {
        CoinMatrix::real(0.0, 1.0, 1.0, 0.0)
    }

    pub fn pauli_z() -> Self {
        CoinMatrix::real(1.0, 0.0, 0.0, -1.0)
    }

    pub fn hadamard() -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        CoinMatrix::real(s, s, s, -s)
    }

    pub fn dagger(&self) -> Self {
        let e = &self.entries;
        CoinMatrix::new([
            [e[0][0].conj(), e[1][0].conj()],
            [e[0][1].conj(), e[1][1].conj()],
        ])
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let e = &self.entries;
        [
            e[0][0] * v[0] + e[0][1] * v[1],
            e[1][0] * v[0] + e[1][1] * v[1],
        ]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CoinMatrix) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        m
    }
}

impl Mul for CoinMatrix {
    type Output = CoinMatrix;

    fn mul(self, rhs: CoinMatrix) -> CoinMatrix {
        let (a, b) = (&self.entries, &rhs.entries);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        CoinMatrix::new(out)
    }
}
