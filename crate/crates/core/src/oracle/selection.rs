use alloc::vec::Vec;

use thiserror::Error;

use crate::problem::{EvalError, Fitness, Objective, SpaceKind};

/// Largest subset count enumerated.
pub const MAX_SUBSETS: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("decision space is not a selection space")]
    NotSelection,
    #[error("{combinations} subsets exceed the enumeration limit of 1000000")]
    OracleTooLarge { combinations: u128 },
    #[error(transparent)]
    Evaluation(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOptimum {
    pub indices: Vec<usize>,
    pub fitness: Fitness,
    pub subsets: u128,
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    c
}

/// Evaluates every `k`-subset in lexicographic order and keeps the first
/// strict minimum, so ties go to the lexicographically smallest set.
pub fn brute_force_selection<O: Objective + ?Sized>(
    objective: &mut O,
) -> Result<SelectionOptimum, SelectionError> {
    let (k, n) = match objective.space().kind() {
        SpaceKind::Selection { k, n } => (k, n),
        _ => return Err(SelectionError::NotSelection),
    };
    let combinations = binomial(n, k);
    if combinations > MAX_SUBSETS {
        return Err(SelectionError::OracleTooLarge { combinations });
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut x: Vec<f64> = Vec::with_capacity(k);
    let mut best: Option<(Vec<usize>, Fitness)> = None;
    loop {
        x.clear();
        x.extend(idx.iter().map(|&i| i as f64));
        let f = objective.evaluate(&x)?;
        if best.as_ref().is_none_or(|(_, b)| f.total < b.total) {
            best = Some((idx.clone(), f));
        }
        // Advance to the next combination.
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        for j in pos..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    let (indices, fitness) = best.expect("at least one subset");
    Ok(SelectionOptimum {
        indices,
        fitness,
        subsets: combinations,
    })
}
