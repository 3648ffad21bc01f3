//! Digital twin of a reconfigurable two-dimensional dipole-trap array.
//!
//! The optics chain (illumination beam, pixelated light modulator, microlens
//! array, relay telescope) produces per-site trap powers; [`trap`] turns them
//! into depths, frequencies and light-shift dephasing scales; [`spin`]
//! evolves clock-state qubits of thermal ensembles under global or
//! mask-addressed pulse sequences; [`experiments`] orchestrates the Ramsey,
//! spin-echo and spin-texture protocols; [`io`] holds configuration and
//! bit-exact output formats.

// `!(x > 0.0)` style checks deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod experiments;
pub mod io;
pub mod optics;
pub mod spin;
pub mod trap;

pub use error::{Error, Result};

/// Index of a lens in the microlens array, and of the trap site it produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct LensIndex {
    pub i: usize,
    pub j: usize,
}

impl LensIndex {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl std::fmt::Display for LensIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Inclusive-exclusive rectangle of lens indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LensRect {
    pub i0: usize,
    pub j0: usize,
    pub n_i: usize,
    pub n_j: usize,
}

impl LensRect {
    pub const fn new(i0: usize, j0: usize, n_i: usize, n_j: usize) -> Self {
        Self { i0, j0, n_i, n_j }
    }

    pub fn contains(&self, idx: LensIndex) -> bool {
        idx.i >= self.i0 && idx.i < self.i0 + self.n_i && idx.j >= self.j0 && idx.j < self.j0 + self.n_j
    }

    pub fn len(&self) -> usize {
        self.n_i * self.n_j
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major iteration: `j` outer, `i` inner.
    pub fn iter(&self) -> impl Iterator<Item = LensIndex> + '_ {
        (self.j0..self.j0 + self.n_j).flat_map(move |j| (self.i0..self.i0 + self.n_i).map(move |i| LensIndex::new(i, j)))
    }
}
