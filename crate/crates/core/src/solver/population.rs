use alloc::vec::Vec;

use crate::problem::Fitness;

/// Members, their fitness, and the best/worst/mean summaries.
#[derive(Debug, Clone)]
pub struct Population {
    xs: Vec<Vec<f64>>,
    fitness: Vec<Fitness>,
    best: usize,
    worst: usize,
    mean: Vec<f64>,
}

impl Population {
    pub fn new(members: Vec<(Vec<f64>, Fitness)>) -> Self {
        assert!(!members.is_empty(), "empty population");
        let (xs, fitness): (Vec<_>, Vec<_>) = members.into_iter().unzip();
        let mut p = Self {
            xs,
            fitness,
            best: 0,
            worst: 0,
            mean: Vec::new(),
        };
        p.rescan_extremes();
        p.resync_mean();
        p
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.xs[0].len()
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.xs[i]
    }

    pub fn fitness(&self, i: usize) -> &Fitness {
        &self.fitness[i]
    }

    pub fn best(&self) -> usize {
        self.best
    }

    pub fn worst(&self) -> usize {
        self.worst
    }

    pub fn best_total(&self) -> f64 {
        self.fitness[self.best].total
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Recomputes the column mean from scratch.
    pub fn resync_mean(&mut self) {
        self.mean = column_mean(&self.xs);
    }

    pub fn replace(&mut self, i: usize, x: &[f64], f: Fitness) {
        let n = self.len() as f64;
        for ((m, new), old) in self.mean.iter_mut().zip(x).zip(&self.xs[i]) {
            *m += (new - old) / n;
        }
        self.xs[i].copy_from_slice(x);
        self.fitness[i] = f;
        self.rescan_extremes();
    }

    /// Lowest total first, then lowest index.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.fitness[a]
                .total
                .total_cmp(&self.fitness[b].total)
                .then(a.cmp(&b))
        });
        idx
    }

    /// Best and worst within `members`, ties to the lowest index.
    pub fn extremes_of(&self, members: &[usize]) -> (usize, usize) {
        let mut best = members[0];
        let mut worst = members[0];
        for &i in members {
            let t = self.fitness[i].total;
            if t < self.fitness[best].total || (t == self.fitness[best].total && i < best) {
                best = i;
            }
            if t > self.fitness[worst].total || (t == self.fitness[worst].total && i < worst) {
                worst = i;
            }
        }
        (best, worst)
    }

    /// Keeps the best `len()` of the current members and `others`. Current
    /// members win ties.
    pub fn merge_elitist(&mut self, others: Vec<(Vec<f64>, Fitness)>) {
        let n = self.len();
        let mut all: Vec<(Vec<f64>, Fitness)> = core::mem::take(&mut self.xs)
            .into_iter()
            .zip(core::mem::take(&mut self.fitness))
            .chain(others)
            .collect();
        let mut order: Vec<usize> = (0..all.len()).collect();
        order.sort_by(|&a, &b| all[a].1.total.total_cmp(&all[b].1.total).then(a.cmp(&b)));
        order.truncate(n);
        order.sort_unstable();
        let mut keep = alloc::vec![false; all.len()];
        for &i in &order {
            keep[i] = true;
        }
        let mut k = keep.iter();
        all.retain(|_| *k.next().unwrap());
        let (xs, fitness) = all.into_iter().unzip();
        self.xs = xs;
        self.fitness = fitness;
        self.rescan_extremes();
        self.resync_mean();
    }

    fn rescan_extremes(&mut self) {
        let all: Vec<usize> = (0..self.len()).collect();
        let (b, w) = self.extremes_of(&all);
        self.best = b;
        self.worst = w;
    }
}

pub(crate) fn column_mean(xs: &[Vec<f64>]) -> Vec<f64> {
    let n = xs.len() as f64;
    let mut mean = alloc::vec![0.0; xs[0].len()];
    for x in xs {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    mean
}
