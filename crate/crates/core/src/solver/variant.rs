use super::{Population, Variant};
use crate::problem::DecisionSpace;
use crate::rng::Stream;

/// Members playing "best" and "worst" for one proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guides {
    pub best: usize,
    pub worst: usize,
}

/// Writes member `i`'s candidate (before clipping) into `out`.
pub fn propose(
    variant: Variant,
    pop: &Population,
    i: usize,
    guides: &Guides,
    space: &DecisionSpace,
    rng: &mut Stream,
    out: &mut [f64],
) {
    let x = pop.x(i);
    let best = pop.x(guides.best);
    let worst = pop.x(guides.worst);
    match variant {
        Variant::Jaya | Variant::SampJaya | Variant::EhrJaya => {
            for j in 0..x.len() {
                let r1 = rng.uniform();
                let r2 = rng.uniform();
                out[j] = jaya(x[j], best[j], worst[j], r1, r2);
            }
        }
        Variant::Rao1 | Variant::QoRao => {
            for j in 0..x.len() {
                let r1 = rng.uniform();
                out[j] = rao1(x[j], best[j], worst[j], r1);
            }
        }
        Variant::Bmr | Variant::Bwr | Variant::Bmwr => {
            let r4 = rng.uniform();
            let t = (1 + rng.below(2)) as f64;
            let mut k = rng.below(pop.len() - 1);
            if k >= i {
                k += 1;
            }
            let rand = pop.x(k);
            let mean = pop.mean();
            if r4 > 0.5 {
                for j in 0..x.len() {
                    let r1 = rng.uniform();
                    let r2 = rng.uniform();
                    out[j] = match variant {
                        Variant::Bmr => {
                            x[j] + r1 * (best[j] - t * mean[j]) + r2 * (best[j] - rand[j])
                        }
                        Variant::Bwr => {
                            x[j] + r1 * (best[j] - t * rand[j]) - r2 * (worst[j] - rand[j])
                        }
                        _ => {
                            let r3 = rng.uniform();
                            x[j] + r1 * (best[j] - t * mean[j]) + r2 * (best[j] - rand[j])
                                - r3 * (worst[j] - rand[j])
                        }
                    };
                }
            } else {
                for (j, o) in out.iter_mut().enumerate() {
                    let (l, u) = (space.lower()[j], space.upper()[j]);
                    *o = u - (u - l) * rng.uniform();
                }
            }
        }
    }
}

/// SAMP group-count rule: one more group after an improving iteration, one
/// fewer otherwise, within `1..=max`.
pub fn adapt_subpopulations(groups: usize, max: usize, improved: bool) -> usize {
    if improved {
        (groups + 1).min(max)
    } else {
        groups.saturating_sub(1).max(1)
    }
}

/// `x + r1 (best - |x|) - r2 (worst - |x|)`.
pub fn jaya(x: f64, best: f64, worst: f64, r1: f64, r2: f64) -> f64 {
    x + r1 * (best - x.abs()) - r2 * (worst - x.abs())
}

/// `x + r1 (best - worst)`.
pub fn rao1(x: f64, best: f64, worst: f64, r1: f64) -> f64 {
    x + r1 * (best - worst)
}
