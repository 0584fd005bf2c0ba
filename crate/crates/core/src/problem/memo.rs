use alloc::vec::Vec;

use super::space::{DecisionSpace, SpaceKind};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over the little-endian bytes of each integer.
pub fn fnv1a_i64(values: impl IntoIterator<Item = i64>) -> u64 {
    let mut h = FNV_OFFSET;
    for v in values {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// `round(x_j / resolution)` per coordinate, hashed.
pub fn memo_key(x: &[f64], resolution: f64) -> u64 {
    fnv1a_i64(x.iter().map(|&v| libm::round(v / resolution) as i64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cell {
    Round(f64),
    Floor(f64),
}

/// Per-dimension grid used for memo keys.
///
/// Continuous dimensions round to `(upper - lower) / 2^32`, integer
/// dimensions round to 1. Selection dimensions floor to 1 so two vectors
/// share a key only when they decode to the same indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    cells: Vec<Cell>,
}

impl Quantizer {
    pub fn for_space(space: &DecisionSpace) -> Self {
        let cells = space
            .lower()
            .iter()
            .zip(space.upper())
            .map(|(&l, &u)| match space.kind() {
                SpaceKind::Continuous => Cell::Round((u - l) / 4_294_967_296.0),
                SpaceKind::Integer => Cell::Round(1.0),
                SpaceKind::Selection { .. } => Cell::Floor(1.0),
            })
            .collect();
        Self { cells }
    }

    /// Uniform rounding grid, as in [`memo_key`].
    pub fn uniform(dim: usize, resolution: f64) -> Self {
        Self {
            cells: alloc::vec![Cell::Round(resolution); dim],
        }
    }

    pub fn key(&self, x: &[f64]) -> u64 {
        fnv1a_i64(x.iter().zip(&self.cells).map(|(&v, c)| match *c {
            Cell::Round(r) => libm::round(v / r) as i64,
            Cell::Floor(r) => libm::floor(v / r) as i64,
        }))
    }
}
