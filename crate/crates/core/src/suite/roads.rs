use alloc::vec::Vec;

use crate::graph::{GraphError, NodeId, PropertyGraph, PropertyValue};
use crate::props;
use crate::rng::Stream;

pub(crate) const ROAD: &str = "ROAD";

fn round_to(v: f64, step: f64) -> f64 {
    libm::round(v / step) * step
}

/// Junctions uniform in a 100 km square. Each junction links to its nearest
/// predecessor (so the network is connected) and to every junction within
/// `radius`. Edges carry `distance_km` and, when `speeds` is given, a
/// `travel_time` in hours at a per-edge speed drawn from that range.
pub(crate) struct RoadNetwork {
    pub junctions: Vec<NodeId>,
    pub positions: Vec<(f64, f64)>,
}

pub(crate) fn road_network(
    graph: &mut PropertyGraph,
    rng: &mut Stream,
    count: usize,
    radius: f64,
    speeds: Option<(f64, f64)>,
) -> Result<RoadNetwork, GraphError> {
    let mut junctions = Vec::with_capacity(count);
    let mut positions = Vec::with_capacity(count);
    for i in 0..count {
        let p = (
            round_to(rng.range(0.0, 100.0), 0.01),
            round_to(rng.range(0.0, 100.0), 0.01),
        );
        positions.push(p);
        junctions.push(graph.add_node(
            ["Junction"],
            props! {"id" => i as i64, "x" => p.0, "y" => p.1},
        )?);
    }
    let dist = |a: (f64, f64), b: (f64, f64)| libm::hypot(a.0 - b.0, a.1 - b.1);
    for i in 1..count {
        let nearest = (0..i)
            .min_by(|&a, &b| {
                dist(positions[i], positions[a]).total_cmp(&dist(positions[i], positions[b]))
            })
            .unwrap();
        for j in 0..i {
            let d = dist(positions[i], positions[j]);
            if j == nearest || d <= radius {
                link(graph, rng, junctions[i], junctions[j], d, speeds)?;
            }
        }
    }
    Ok(RoadNetwork {
        junctions,
        positions,
    })
}

/// Connects `node` to the junction nearest `at` with a short access road.
pub(crate) fn attach(
    graph: &mut PropertyGraph,
    rng: &mut Stream,
    net: &RoadNetwork,
    node: NodeId,
    at: (f64, f64),
    speeds: Option<(f64, f64)>,
) -> Result<(), GraphError> {
    let dist = |b: (f64, f64)| libm::hypot(at.0 - b.0, at.1 - b.1);
    let k = (0..net.junctions.len())
        .min_by(|&a, &b| dist(net.positions[a]).total_cmp(&dist(net.positions[b])))
        .unwrap();
    let d = dist(net.positions[k]).max(0.1);
    link(graph, rng, node, net.junctions[k], d, speeds)
}

fn link(
    graph: &mut PropertyGraph,
    rng: &mut Stream,
    a: NodeId,
    b: NodeId,
    d: f64,
    speeds: Option<(f64, f64)>,
) -> Result<(), GraphError> {
    let mut p = props! {"distance_km" => round_to(d, 0.01)};
    if let Some((lo, hi)) = speeds {
        let speed = rng.range(lo, hi);
        p.insert(
            "travel_time".into(),
            PropertyValue::Float(round_to(d / speed, 1e-4)),
        );
    }
    graph.add_undirected(a, ROAD, b, p)?;
    Ok(())
}
