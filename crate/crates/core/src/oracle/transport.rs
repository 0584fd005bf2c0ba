use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("cost matrix must be {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
    #[error("cost[{0}][{1}] is negative or not finite")]
    InvalidCost(usize, usize),
    #[error("supplies and capacities must be finite and non-negative")]
    InvalidQuantity,
    #[error("total supply {supply} exceeds total capacity {capacity}")]
    InfeasibleTransport { supply: f64, capacity: f64 },
}

/// Ship every supply to sinks with limited capacity at minimum cost.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportationInstance {
    cost: Vec<Vec<f64>>,
    supply: Vec<f64>,
    capacity: Vec<f64>,
}

impl TransportationInstance {
    pub fn new(
        cost: Vec<Vec<f64>>,
        supply: Vec<f64>,
        capacity: Vec<f64>,
    ) -> Result<Self, TransportError> {
        let (rows, cols) = (supply.len(), capacity.len());
        if cost.len() != rows || cost.iter().any(|r| r.len() != cols) {
            return Err(TransportError::Shape { rows, cols });
        }
        for (i, row) in cost.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(TransportError::InvalidCost(i, j));
                }
            }
        }
        if supply
            .iter()
            .chain(&capacity)
            .any(|&q| !(q >= 0.0 && q.is_finite()))
        {
            return Err(TransportError::InvalidQuantity);
        }
        let s: f64 = supply.iter().sum();
        let c: f64 = capacity.iter().sum();
        if s > c + TOLERANCE * s.max(1.0) {
            return Err(TransportError::InfeasibleTransport {
                supply: s,
                capacity: c,
            });
        }
        Ok(Self {
            cost,
            supply,
            capacity,
        })
    }

    pub fn cost(&self) -> &[Vec<f64>] {
        &self.cost
    }

    pub fn supply(&self) -> &[f64] {
        &self.supply
    }

    pub fn capacity(&self) -> &[f64] {
        &self.capacity
    }

    /// Cost of an arbitrary flow matrix.
    pub fn flow_cost(&self, flow: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for (fr, cr) in flow.iter().zip(&self.cost) {
            for (f, c) in fr.iter().zip(cr) {
                total += f * c;
            }
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportSolution {
    pub flow: Vec<Vec<f64>>,
    pub cost: f64,
}

const TOLERANCE: f64 = 1e-9;

struct Arc {
    to: usize,
    cap: f64,
    cost: f64,
}

/// Successive shortest paths with Dijkstra on reduced costs.
///
/// Network: source -> supply row -> sink column -> target, with unbounded
/// row-to-column arcs. Reduced costs above `-1e-9` are treated as zero.
pub fn solve_transportation(
    inst: &TransportationInstance,
) -> Result<TransportSolution, TransportError> {
    let rows = inst.supply.len();
    let cols = inst.capacity.len();
    let source = rows + cols;
    let target = source + 1;
    let n = target + 1;
    let mut arcs: Vec<Arc> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let add = |arcs: &mut Vec<Arc>,
               adj: &mut Vec<Vec<usize>>,
               a: usize,
               b: usize,
               cap: f64,
               cost: f64| {
        adj[a].push(arcs.len());
        arcs.push(Arc { to: b, cap, cost });
        adj[b].push(arcs.len());
        arcs.push(Arc {
            to: a,
            cap: 0.0,
            cost: -cost,
        });
    };
    for (i, &s) in inst.supply.iter().enumerate() {
        add(&mut arcs, &mut adj, source, i, s, 0.0);
    }
    let mut flow_arc = vec![vec![0usize; cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            flow_arc[i][j] = arcs.len();
            add(
                &mut arcs,
                &mut adj,
                i,
                rows + j,
                f64::INFINITY,
                inst.cost[i][j],
            );
        }
    }
    for (j, &c) in inst.capacity.iter().enumerate() {
        add(&mut arcs, &mut adj, rows + j, target, c, 0.0);
    }

    let total: f64 = inst.supply.iter().sum();
    let eps = TOLERANCE * total.max(1.0);
    let mut shipped = 0.0;
    let mut potential = vec![0.0f64; n];
    while total - shipped > eps {
        // Dense Dijkstra; the network is small.
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let mut done = vec![false; n];
        dist[source] = 0.0;
        loop {
            let mut u = usize::MAX;
            for v in 0..n {
                if !done[v] && dist[v].is_finite() && (u == usize::MAX || dist[v] < dist[u]) {
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            for &a in &adj[u] {
                let arc = &arcs[a];
                if arc.cap <= eps {
                    continue;
                }
                let reduced = (arc.cost + potential[u] - potential[arc.to]).max(0.0);
                let nd = dist[u] + reduced;
                if nd < dist[arc.to] {
                    dist[arc.to] = nd;
                    parent[arc.to] = a;
                }
            }
        }
        if !dist[target].is_finite() {
            return Err(TransportError::InfeasibleTransport {
                supply: total,
                capacity: inst.capacity.iter().sum(),
            });
        }
        for v in 0..n {
            if dist[v].is_finite() {
                potential[v] += dist[v];
            }
        }
        let mut push = total - shipped;
        let mut v = target;
        while v != source {
            let a = parent[v];
            push = push.min(arcs[a].cap);
            v = arcs[a ^ 1].to;
        }
        let mut v = target;
        while v != source {
            let a = parent[v];
            arcs[a].cap -= push;
            arcs[a ^ 1].cap += push;
            v = arcs[a ^ 1].to;
        }
        shipped += push;
    }

    let flow: Vec<Vec<f64>> = flow_arc
        .iter()
        .map(|row| row.iter().map(|&a| arcs[a ^ 1].cap).collect())
        .collect();
    let cost = inst.flow_cost(&flow);
    Ok(TransportSolution { flow, cost })
}
