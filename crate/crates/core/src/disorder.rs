//! Quenched coin disorder: one random coin parameter per lattice site,
//! drawn once per realization.
//!
//! Site values are `r_x = (1 + W xi_x) / 2` with `xi_x` uniform on
//! `[-1, 1)`. The generator is ChaCha8 seeded through
//! `SeedableRng::seed_from_u64(seed)`; each `xi_x` consumes one `u64`
//! in site order, mapped as `xi = 2 * (u >> 11) * 2^-53 - 1`.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::coin::{gate_weights, make_gate, CoinMatrix};
use crate::error::{Error, Result};
use crate::geometry::Geometry;

#[derive(Debug, Clone, PartialEq)]
pub struct CoinField {
    r: Vec<f64>,
    /// `(sqrt r_x, sqrt(1 - r_x))` per site, cached for the coin sweep.
    weights: Vec<(f64, f64)>,
    disorder_strength: f64,
    seed: u64,
}

/// Uniform draw on `[-1, 1)` from the top 53 bits of one `u64`.
#[inline]
fn symmetric_unit(rng: &mut ChaCha8Rng) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    2.0 * u - 1.0
}

pub fn sample_coin_field(geometry: &Geometry, w: f64, seed: u64) -> Result<CoinField> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::OutOfUnitInterval {
            name: "W",
            value: w,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r: Vec<f64> = (0..geometry.sites())
        .map(|_| {
            let xi = symmetric_unit(&mut rng);
            0.5 * (1.0 + w * xi)
        })
        .collect();
    let mut field = CoinField::from_values(r)?;
    field.disorder_strength = w;
    field.seed = seed;
    Ok(field)
}

impl CoinField {
    /// A field with explicit per-site parameters (disorder strength and seed
    /// are recorded as zero).
    pub fn from_values(r: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = r.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutOfUnitInterval {
                name: "r",
                value: bad,
            });
        }
        let weights = r.iter().map(|&v| gate_weights(v)).collect();
        Ok(CoinField {
            r,
            weights,
            disorder_strength: 0.0,
            seed: 0,
        })
    }

    /// Same coin `G(r)` at every site.
    pub fn uniform(geometry: &Geometry, r: f64) -> Result<Self> {
        Self::from_values(alloc::vec![r; geometry.sites()])
    }

    /// The clean Hadamard walk, `r_x = 1/2` everywhere.
    pub fn hadamard(geometry: &Geometry) -> Self {
        Self::uniform(geometry, 0.5).expect("1/2 lies in [0, 1]")
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn disorder_strength(&self) -> f64 {
        self.disorder_strength
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn gate(&self, index: usize) -> CoinMatrix {
        make_gate(self.r[index]).expect("field values are validated on construction")
    }

    #[inline]
    pub(crate) fn weights(&self) -> &[(f64, f64)] {
        &self.weights
    }
}
