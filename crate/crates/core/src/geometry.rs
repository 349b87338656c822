//! Lattice descriptors. Sites are stored by array index `0..sites`; the
//! physical position of index `i` is `i - origin`.

use alloc::format;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    /// Finite window `[-T, T]` standing in for the infinite line.
    Line,
    /// Periodic chain of `sites` sites.
    Ring,
    /// Open chain whose edges reflect the walker by flipping its coin.
    ReflectiveSegment,
}

impl GeometryKind {
    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Line => "line",
            GeometryKind::Ring => "ring",
            GeometryKind::ReflectiveSegment => "segment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Geometry {
    kind: GeometryKind,
    sites: usize,
}

impl Geometry {
    /// `sites` must be odd and at least 3 so that the origin is the unique
    /// centre site.
    pub fn new(kind: GeometryKind, sites: usize) -> Result<Self> {
        if sites < 3 || sites % 2 == 0 {
            return Err(Error::InvalidGeometry(format!(
                "{} needs an odd number of sites >= 3, got {sites}",
                kind.name()
            )));
        }
        Ok(Geometry { kind, sites })
    }

    /// Smallest line window that holds the light cone of `max_steps` steps.
    pub fn line(max_steps: usize) -> Self {
        Geometry {
            kind: GeometryKind::Line,
            sites: 2 * max_steps.max(1) + 1,
        }
    }

    pub fn ring(sites: usize) -> Result<Self> {
        Self::new(GeometryKind::Ring, sites)
    }

    pub fn segment(sites: usize) -> Result<Self> {
        Self::new(GeometryKind::ReflectiveSegment, sites)
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Array index of the site `x = 0`.
    pub fn origin(&self) -> usize {
        self.sites / 2
    }

    /// Largest `|x|` on the lattice.
    pub fn half_width(&self) -> usize {
        self.sites / 2
    }

    pub fn position(&self, index: usize) -> i64 {
        index as i64 - self.origin() as i64
    }

    pub fn index(&self, x: i64) -> Option<usize> {
        let i = x + self.origin() as i64;
        (0..self.sites as i64).contains(&i).then_some(i as usize)
    }

    /// Whether `steps` steps fit without the line's light cone reaching past
    /// the window. Ring and segment hold any number of steps.
    pub fn supports(&self, steps: usize) -> bool {
        match self.kind {
            GeometryKind::Line => self.sites > 2 * steps,
            _ => true,
        }
    }
}
