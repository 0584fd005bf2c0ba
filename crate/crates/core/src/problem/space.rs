use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Continuous,
    Integer,
    /// `k` distinct indices into an `n`-element candidate list.
    Selection {
        k: usize,
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("decision space needs at least one dimension")]
    Empty,
    #[error("lower and upper bound vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("dimension {dim}: lower bound {lower} is not below upper bound {upper}")]
    EmptyInterval { dim: usize, lower: f64, upper: f64 },
    #[error("selection of {k} from {n} candidates is impossible")]
    SelectionTooLarge { k: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
    kind: SpaceKind,
}

impl DecisionSpace {
    pub fn continuous(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SpaceError> {
        Self::build(lower, upper, SpaceKind::Continuous)
    }

    /// `[lo, hi]^dim`.
    pub fn uniform_box(dim: usize, lo: f64, hi: f64) -> Result<Self, SpaceError> {
        Self::continuous(vec![lo; dim], vec![hi; dim])
    }

    pub fn integer(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SpaceError> {
        Self::build(lower, upper, SpaceKind::Integer)
    }

    /// Bounds are `[0, n)` in every one of the `k` dimensions; the upper
    /// bound is the largest float below `n` so flooring never reaches `n`.
    pub fn selection(k: usize, n: usize) -> Result<Self, SpaceError> {
        if k == 0 {
            return Err(SpaceError::Empty);
        }
        if k > n {
            return Err(SpaceError::SelectionTooLarge { k, n });
        }
        let upper = f64::from_bits((n as f64).to_bits() - 1);
        Self::build(vec![0.0; k], vec![upper; k], SpaceKind::Selection { k, n })
    }

    fn build(lower: Vec<f64>, upper: Vec<f64>, kind: SpaceKind) -> Result<Self, SpaceError> {
        if lower.len() != upper.len() {
            return Err(SpaceError::LengthMismatch(lower.len(), upper.len()));
        }
        if lower.is_empty() {
            return Err(SpaceError::Empty);
        }
        for (dim, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l < u) || !l.is_finite() || !u.is_finite() {
                return Err(SpaceError::EmptyInterval {
                    dim,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(Self { lower, upper, kind })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&l, &u))| v >= l && v <= u)
    }

    /// Coordinate-wise clip into the box. NaN coordinates go to the lower
    /// bound.
    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (&l, &u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = if v.is_nan() { l } else { v.clamp(l, u) };
        }
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| 0.5 * (l + u))
            .collect()
    }
}

/// Floors each coordinate to a candidate index; a repeated index moves to
/// the next unused index, wrapping around. Returned ascending.
pub fn decode_selection(x: &[f64], n: usize) -> Vec<usize> {
    let mut used = vec![false; n];
    for &v in x {
        let mut idx = if v.is_nan() || v < 0.0 {
            0
        } else {
            (libm::floor(v) as usize).min(n - 1)
        };
        while used[idx] {
            idx = (idx + 1) % n;
        }
        used[idx] = true;
    }
    used.iter()
        .enumerate()
        .filter_map(|(i, &u)| u.then_some(i))
        .collect()
}
