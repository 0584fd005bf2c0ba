//! In-memory property graph.
//!
//! Nodes and edges get dense ids in insertion order. The graph is built
//! mutably, then [`PropertyGraph::freeze`]d; queries and solvers only ever see
//! frozen graphs, which are plain immutable data and can be shared across
//! threads behind an `Arc`.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

/// Dense node identifier, `0..node_count()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// Dense edge identifier, `0..edge_count()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A typed property value.
///
/// `Null` is the query layer's marker for "no value" (empty `min`/`max`/`avg`,
/// a missing property in a projection). It can never be stored on a node or
/// edge.
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    List(Vec<PropertyValue>),
}

impl PropertyValue {
    /// Numeric view with integer-to-float coercion.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            PropertyValue::Int(i) => Some(*i as f64),
            PropertyValue::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            PropertyValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            PropertyValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, PropertyValue::Null)
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            PropertyValue::Null => "null",
            PropertyValue::Bool(_) => "bool",
            PropertyValue::Int(_) => "int",
            PropertyValue::Float(_) => "float",
            PropertyValue::Text(_) => "text",
            PropertyValue::List(_) => "list",
        }
    }

    /// Checks the storage invariants: no null, finite floats, flat and
    /// homogeneous lists (ints and floats count as one numeric kind).
    pub fn validate_storable(&self) -> Result<(), PropertyError> {
        match self {
            PropertyValue::Null => Err(PropertyError::NullStored),
            PropertyValue::Float(f) if !f.is_finite() => Err(PropertyError::NonFinite),
            PropertyValue::List(items) => {
                let mut kind: Option<u8> = None;
                for item in items {
                    let k = match item {
                        PropertyValue::List(_) => return Err(PropertyError::NestedList),
                        PropertyValue::Null => return Err(PropertyError::NullStored),
                        PropertyValue::Float(f) if !f.is_finite() => {
                            return Err(PropertyError::NonFinite)
                        }
                        PropertyValue::Bool(_) => 0,
                        PropertyValue::Int(_) | PropertyValue::Float(_) => 1,
                        PropertyValue::Text(_) => 2,
                    };
                    match kind {
                        None => kind = Some(k),
                        Some(prev) if prev != k => return Err(PropertyError::MixedList),
                        Some(_) => {}
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Null => f.write_str("null"),
            PropertyValue::Bool(b) => write!(f, "{b}"),
            PropertyValue::Int(i) => write!(f, "{i}"),
            PropertyValue::Float(x) => {
                if libm::trunc(*x) == *x && libm::fabs(*x) < 1e15 {
                    write!(f, "{x:.1}")
                } else {
                    write!(f, "{x}")
                }
            }
            PropertyValue::Text(s) => {
                f.write_str("'")?;
                for ch in s.chars() {
                    match ch {
                        '\'' => f.write_str("\\'")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("'")
            }
            PropertyValue::List(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl From<i64> for PropertyValue {
    fn from(v: i64) -> Self {
        PropertyValue::Int(v)
    }
}

impl From<f64> for PropertyValue {
    fn from(v: f64) -> Self {
        PropertyValue::Float(v)
    }
}

impl From<bool> for PropertyValue {
    fn from(v: bool) -> Self {
        PropertyValue::Bool(v)
    }
}

impl From<&str> for PropertyValue {
    fn from(v: &str) -> Self {
        PropertyValue::Text(v.to_string())
    }
}

impl From<String> for PropertyValue {
    fn from(v: String) -> Self {
        PropertyValue::Text(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PropertyError {
    #[error("null cannot be stored as a property")]
    NullStored,
    #[error("float property is not finite")]
    NonFinite,
    #[error("lists cannot be nested")]
    NestedList,
    #[error("list elements must share one type")]
    MixedList,
}

pub type Properties = BTreeMap<String, PropertyValue>;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub labels: BTreeSet<String>,
    pub properties: Properties,
}

impl Node {
    pub fn has_label(&self, label: &str) -> bool {
        self.labels.contains(label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub edge_type: String,
    pub src: NodeId,
    pub dst: NodeId,
    pub properties: Properties,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph is frozen")]
    Frozen,
    #[error("graph must be frozen first")]
    NotFrozen,
    #[error("node needs at least one label")]
    EmptyLabels,
    #[error("edge endpoint {0} does not exist")]
    DanglingEndpoint(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("property `{name}`: {source}")]
    InvalidProperty { name: String, source: PropertyError },
    #[error("edge {edge} has a negative or missing `{property}` weight")]
    NegativeOrMissingWeight { edge: EdgeId, property: String },
}

/// Labeled property graph with a label index and outgoing adjacency lists.
#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    label_index: BTreeMap<String, Vec<NodeId>>,
    outgoing: Vec<Vec<EdgeId>>,
    frozen: bool,
}

/// Distances keyed by `(source, node)`.
pub type DistanceMap = BTreeMap<(NodeId, NodeId), f64>;

impl PropertyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node<L, S>(
        &mut self,
        labels: L,
        properties: Properties,
    ) -> Result<NodeId, GraphError>
    where
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if self.frozen {
            return Err(GraphError::Frozen);
        }
        let labels: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(GraphError::EmptyLabels);
        }
        validate_properties(&properties)?;
        let id = NodeId(self.nodes.len());
        // ids grow monotonically, so pushing keeps every index list sorted
        for label in &labels {
            self.label_index.entry(label.clone()).or_default().push(id);
        }
        self.nodes.push(Node {
            id,
            labels,
            properties,
        });
        self.outgoing.push(Vec::new());
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        src: NodeId,
        edge_type: impl Into<String>,
        dst: NodeId,
        properties: Properties,
    ) -> Result<EdgeId, GraphError> {
        if self.frozen {
            return Err(GraphError::Frozen);
        }
        for end in [src, dst] {
            if end.0 >= self.nodes.len() {
                return Err(GraphError::DanglingEndpoint(end));
            }
        }
        validate_properties(&properties)?;
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge {
            id,
            edge_type: edge_type.into(),
            src,
            dst,
            properties,
        });
        self.outgoing[src.0].push(id);
        Ok(id)
    }

    /// Stores an undirected connection as two directed edges sharing the
    /// same properties.
    pub fn add_undirected(
        &mut self,
        a: NodeId,
        edge_type: &str,
        b: NodeId,
        properties: Properties,
    ) -> Result<(EdgeId, EdgeId), GraphError> {
        let forward = self.add_edge(a, edge_type, b, properties.clone())?;
        let backward = self.add_edge(b, edge_type, a, properties)?;
        Ok((forward, backward))
    }

    /// Sets (or replaces) a node property before freezing.
    pub fn set_node_property(
        &mut self,
        node: NodeId,
        name: &str,
        value: PropertyValue,
    ) -> Result<(), GraphError> {
        if self.frozen {
            return Err(GraphError::Frozen);
        }
        value
            .validate_storable()
            .map_err(|source| GraphError::InvalidProperty {
                name: name.to_string(),
                source,
            })?;
        let n = self
            .nodes
            .get_mut(node.0)
            .ok_or(GraphError::UnknownNode(node))?;
        n.properties.insert(name.to_string(), value);
        Ok(())
    }

    /// Idempotent.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Unfrozen deep copy, for deriving a modified graph from a frozen one.
    pub fn thawed_copy(&self) -> PropertyGraph {
        let mut copy = self.clone();
        copy.frozen = false;
        copy
    }

    /// Removes a property from every node carrying `label`.
    pub fn remove_node_property(&mut self, label: &str, name: &str) -> Result<usize, GraphError> {
        if self.frozen {
            return Err(GraphError::Frozen);
        }
        let ids = self.label_index.get(label).cloned().unwrap_or_default();
        let mut removed = 0;
        for id in ids {
            if self.nodes[id.0].properties.remove(name).is_some() {
                removed += 1;
            }
        }
        Ok(removed)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.0)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn outgoing(&self, id: NodeId) -> &[EdgeId] {
        self.outgoing.get(id.0).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Nodes carrying `label`, ascending. Unknown labels give an empty slice.
    pub fn nodes_by_label(&self, label: &str) -> &[NodeId] {
        self.label_index
            .get(label)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Label cardinalities, the only graph metadata exposed to solvers.
    pub fn label_counts(&self) -> BTreeMap<&str, usize> {
        self.label_index
            .iter()
            .map(|(k, v)| (k.as_str(), v.len()))
            .collect()
    }

    /// Single-source Dijkstra over edges of `edge_type`, one entry per node
    /// (`None` when unreachable).
    pub fn dijkstra(
        &self,
        source: NodeId,
        weight_property: &str,
        edge_type: &str,
    ) -> Result<Vec<Option<f64>>, GraphError> {
        let weights = self.edge_weights(weight_property, edge_type)?;
        if source.0 >= self.nodes.len() {
            return Err(GraphError::UnknownNode(source));
        }
        Ok(self.dijkstra_with(source, &weights))
    }

    /// Exact shortest-path distances from every source. Unreachable pairs are
    /// absent from the map.
    pub fn shortest_paths(
        &self,
        sources: &[NodeId],
        weight_property: &str,
        edge_type: &str,
    ) -> Result<DistanceMap, GraphError> {
        if !self.frozen {
            return Err(GraphError::NotFrozen);
        }
        let weights = self.edge_weights(weight_property, edge_type)?;
        let mut out = DistanceMap::new();
        for &source in sources {
            if source.0 >= self.nodes.len() {
                return Err(GraphError::UnknownNode(source));
            }
            for (node, d) in self.dijkstra_with(source, &weights).into_iter().enumerate() {
                if let Some(d) = d {
                    out.insert((source, NodeId(node)), d);
                }
            }
        }
        Ok(out)
    }

    /// Per-edge weight, `None` for edges of other types.
    fn edge_weights(
        &self,
        weight_property: &str,
        edge_type: &str,
    ) -> Result<Vec<Option<f64>>, GraphError> {
        self.edges
            .iter()
            .map(|e| {
                if e.edge_type != edge_type {
                    return Ok(None);
                }
                match e
                    .properties
                    .get(weight_property)
                    .and_then(PropertyValue::as_f64)
                {
                    Some(w) if w >= 0.0 && w.is_finite() => Ok(Some(w)),
                    _ => Err(GraphError::NegativeOrMissingWeight {
                        edge: e.id,
                        property: weight_property.to_string(),
                    }),
                }
            })
            .collect()
    }

    fn dijkstra_with(&self, source: NodeId, weights: &[Option<f64>]) -> Vec<Option<f64>> {
        let mut dist: Vec<Option<f64>> = vec![None; self.nodes.len()];
        let mut settled = vec![false; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        dist[source.0] = Some(0.0);
        heap.push(HeapEntry {
            dist: 0.0,
            node: source.0,
        });
        while let Some(HeapEntry { dist: d, node }) = heap.pop() {
            if settled[node] {
                continue;
            }
            settled[node] = true;
            for &eid in &self.outgoing[node] {
                let Some(w) = weights[eid.0] else { continue };
                let next = self.edges[eid.0].dst.0;
                let candidate = d + w;
                if dist[next].is_none_or(|cur| candidate < cur) {
                    dist[next] = Some(candidate);
                    heap.push(HeapEntry {
                        dist: candidate,
                        node: next,
                    });
                }
            }
        }
        dist
    }
}

fn validate_properties(properties: &Properties) -> Result<(), GraphError> {
    for (name, value) in properties {
        value
            .validate_storable()
            .map_err(|source| GraphError::InvalidProperty {
                name: name.clone(),
                source,
            })?;
    }
    Ok(())
}

/// Min-heap entry; ties broken by node id for determinism.
#[derive(Debug, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Builds a property map from `(name, value)` pairs.
#[macro_export]
macro_rules! props {
    () => { $crate::graph::Properties::new() };
    ($($k:expr => $v:expr),+ $(,)?) => {{
        let mut m = $crate::graph::Properties::new();
        $( m.insert(::core::convert::Into::into($k), $crate::graph::PropertyValue::from($v)); )+
        m
    }};
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn dense_ids_from_zero() {
        let mut g = PropertyGraph::new();
        let a = g
            .add_node(["Drug"], props! {"side_effect_count" => 4i64})
            .unwrap();
        let b = g.add_node(["Drug"], props!()).unwrap();
        assert_eq!((a, b), (NodeId(0), NodeId(1)));
    }

    #[test]
    fn empty_labels_rejected() {
        let mut g = PropertyGraph::new();
        let labels: [&str; 0] = [];
        assert_eq!(g.add_node(labels, props!()), Err(GraphError::EmptyLabels));
    }

    #[test]
    fn edges_and_properties_round_trip() {
        let mut g = PropertyGraph::new();
        let a = g.add_node(["City"], props!()).unwrap();
        let b = g.add_node(["City"], props!()).unwrap();
        assert_eq!(g.add_edge(a, "TARGETS", b, props!()).unwrap(), EdgeId(0));
        let e = g
            .add_edge(a, "ROAD", b, props! {"distance_km" => 3.5})
            .unwrap();
        assert_eq!(
            g.edge(e).unwrap().properties.get("distance_km"),
            Some(&PropertyValue::Float(3.5))
        );
        assert_eq!(
            g.add_edge(a, "X", NodeId(99), props!()),
            Err(GraphError::DanglingEndpoint(NodeId(99)))
        );
    }

    #[test]
    fn frozen_graph_rejects_mutation() {
        let mut g = PropertyGraph::new();
        let a = g.add_node(["A"], props!()).unwrap();
        g.freeze();
        g.freeze();
        assert!(g.is_frozen());
        assert_eq!(g.add_node(["A"], props!()), Err(GraphError::Frozen));
        assert_eq!(g.add_edge(a, "T", a, props!()), Err(GraphError::Frozen));
        assert_eq!(
            g.set_node_property(a, "x", PropertyValue::Int(1)),
            Err(GraphError::Frozen)
        );
    }

    #[test]
    fn invalid_properties_rejected() {
        let mut g = PropertyGraph::new();
        let nested = PropertyValue::List(alloc::vec![PropertyValue::List(Vec::new())]);
        let mut p = Properties::new();
        p.insert("x".to_string(), nested);
        assert!(matches!(
            g.add_node(["A"], p),
            Err(GraphError::InvalidProperty {
                source: PropertyError::NestedList,
                ..
            })
        ));
        assert!(g.add_node(["A"], props! {"x" => f64::NAN}).is_err());
        let mixed =
            PropertyValue::List(alloc::vec![PropertyValue::Int(1), PropertyValue::from("a")]);
        assert_eq!(mixed.validate_storable(), Err(PropertyError::MixedList));
        let numeric = PropertyValue::List(alloc::vec![
            PropertyValue::Int(1),
            PropertyValue::Float(2.5)
        ]);
        assert_eq!(numeric.validate_storable(), Ok(()));
    }

    #[test]
    fn label_lookup() {
        let mut g = PropertyGraph::new();
        g.add_node(["Drug"], props!()).unwrap();
        g.add_node(["Gene"], props!()).unwrap();
        g.add_node(["Drug"], props!()).unwrap();
        g.freeze();
        assert_eq!(g.nodes_by_label("Drug"), &[NodeId(0), NodeId(2)]);
        assert!(g.nodes_by_label("Missing").is_empty());
        assert_eq!(g.label_counts().get("Gene"), Some(&1));
    }

    #[test]
    fn hundred_cities_sorted() {
        let mut g = PropertyGraph::new();
        for _ in 0..100 {
            g.add_node(["City"], props!()).unwrap();
        }
        g.freeze();
        let ids = g.nodes_by_label("City");
        assert_eq!(ids.len(), 100);
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
    }

    fn path_graph() -> PropertyGraph {
        let mut g = PropertyGraph::new();
        let n: Vec<_> = (0..6)
            .map(|_| g.add_node(["Junction"], props!()).unwrap())
            .collect();
        g.add_undirected(n[0], "ROAD", n[1], props! {"distance_km" => 1.0})
            .unwrap();
        g.add_undirected(n[1], "ROAD", n[2], props! {"distance_km" => 1.0})
            .unwrap();
        g.add_undirected(n[4], "ROAD", n[5], props! {"distance_km" => 1.0})
            .unwrap();
        g.add_edge(n[2], "RAIL", n[3], props!()).unwrap();
        g.freeze();
        g
    }

    #[test]
    fn path_distances() {
        let g = path_graph();
        let d = g
            .shortest_paths(&[NodeId(0)], "distance_km", "ROAD")
            .unwrap();
        assert_eq!(d.get(&(NodeId(0), NodeId(2))), Some(&2.0));
        assert_eq!(d.get(&(NodeId(0), NodeId(0))), Some(&0.0));
        assert!(!d.contains_key(&(NodeId(0), NodeId(5))));
        // RAIL edge is ignored, so 3 is unreachable.
        assert!(!d.contains_key(&(NodeId(0), NodeId(3))));
    }

    #[test]
    fn negative_or_missing_weight() {
        let mut g = PropertyGraph::new();
        let a = g.add_node(["J"], props!()).unwrap();
        let b = g.add_node(["J"], props!()).unwrap();
        g.add_edge(a, "ROAD", b, props! {"distance_km" => -1.0})
            .unwrap();
        g.add_edge(b, "ROAD", a, props!()).unwrap();
        g.freeze();
        assert!(matches!(
            g.shortest_paths(&[a], "distance_km", "ROAD"),
            Err(GraphError::NegativeOrMissingWeight {
                edge: EdgeId(0),
                ..
            })
        ));
    }

    #[test]
    fn shortest_paths_needs_frozen_graph() {
        let mut g = PropertyGraph::new();
        let a = g.add_node(["J"], props!()).unwrap();
        assert_eq!(
            g.shortest_paths(&[a], "w", "ROAD"),
            Err(GraphError::NotFrozen)
        );
    }

    #[test]
    fn display_quotes_text() {
        assert_eq!(PropertyValue::from("it's").to_string(), "'it\\'s'");
        assert_eq!(PropertyValue::Float(3.0).to_string(), "3.0");
        let l = PropertyValue::List(alloc::vec![3i64.into(), 17i64.into(), 42i64.into()]);
        assert_eq!(l.to_string(), "[3, 17, 42]");
    }
}
