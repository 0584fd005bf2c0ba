use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::graph::{NodeId, PropertyGraph, PropertyValue};
use crate::props;

fn no_scalars() -> BTreeMap<alloc::string::String, PropertyValue> {
    BTreeMap::new()
}

fn lists(
    name: &str,
    items: Vec<PropertyValue>,
) -> BTreeMap<alloc::string::String, Vec<PropertyValue>> {
    let mut m = BTreeMap::new();
    m.insert(name.to_string(), items);
    m
}

fn ints(v: &[i64]) -> Vec<PropertyValue> {
    v.iter().map(|&i| PropertyValue::Int(i)).collect()
}

/// Drugs 0..3 with side effects {4, 2, 7}; genes 3..6.
fn drug_graph() -> PropertyGraph {
    let mut g = PropertyGraph::new();
    for (i, se) in [4i64, 2, 7].into_iter().enumerate() {
        g.add_node(
            ["Drug"],
            props! {"id" => i as i64, "side_effect_count" => se},
        )
        .unwrap();
    }
    for j in 0..3i64 {
        g.add_node(["Gene"], props! {"id" => 100 + j}).unwrap();
    }
    // drug 0 -> genes 100, 101; drug 2 -> genes 101, 102; drug 1 -> 100
    for (d, gene) in [(0, 3), (0, 4), (2, 4), (2, 5), (1, 3)] {
        g.add_edge(NodeId(d), "TARGETS", NodeId(gene), props!())
            .unwrap();
    }
    g.freeze();
    g
}

#[test]
fn parse_single_node_template() {
    let t = QueryTemplate::parse(
        "MATCH (d:Drug) WHERE d.id IN $selected RETURN sum(d.side_effect_count)",
    )
    .unwrap();
    assert_eq!(t.placeholders().len(), 1);
    assert_eq!(t.placeholders().get("selected"), Some(&ParamSlot::List));
}

#[test]
fn parse_two_hop_template() {
    let t = QueryTemplate::parse(
        "MATCH (d:Drug)-[:TARGETS]->(g:Gene) WHERE d.id IN $selected RETURN count(DISTINCT g.id)",
    )
    .unwrap();
    assert!(t.ast().pattern.hop.is_some());
    assert_eq!(
        t.placeholders().keys().collect::<Vec<_>>(),
        vec!["selected"]
    );
}

#[test]
fn malformed_pattern_reports_offset() {
    let err = QueryTemplate::parse("MATCH (d:Drug RETURN").unwrap_err();
    // the `)` is missing where RETURN starts
    assert_eq!(err.offset, 14);
}

#[test]
fn unknown_aggregate_and_variable() {
    let err = QueryTemplate::parse("MATCH (d:Drug) RETURN median(d.x)").unwrap_err();
    assert!(err.message.contains("unknown aggregate"));
    assert_eq!(err.offset, 22);
    let err = QueryTemplate::parse("MATCH (d:Drug) WHERE q.x > 1 RETURN d.x").unwrap_err();
    assert!(err.message.contains("unknown variable"));
    assert!(QueryTemplate::parse("").is_err());
    assert!(QueryTemplate::parse("MATCH (d:Drug) WHERE sum(d.x) > 1 RETURN d.x").is_err());
}

#[test]
fn list_substitution_renders_literal() {
    let t = QueryTemplate::parse(
        "MATCH (d:Drug) WHERE d.id IN $selected RETURN sum(d.side_effect_count)",
    )
    .unwrap();
    let q = t
        .substitute(&no_scalars(), &lists("$selected", ints(&[3, 17, 42])))
        .unwrap();
    assert_eq!(
        q.to_string(),
        "MATCH (d:Drug) WHERE d.id IN [3, 17, 42] RETURN sum(d.side_effect_count)"
    );
}

#[test]
fn scalar_substitution_and_errors() {
    let t = QueryTemplate::parse("MATCH (x:Item) WHERE x.n > $k RETURN x.n").unwrap();
    let mut s = BTreeMap::new();
    s.insert("k".to_string(), PropertyValue::Int(5));
    let q = t.substitute(&s, &BTreeMap::new()).unwrap();
    assert_eq!(q.to_string(), "MATCH (x:Item) WHERE x.n > 5 RETURN x.n");

    assert_eq!(
        t.substitute(&no_scalars(), &BTreeMap::new()),
        Err(SubstitutionError::Unbound("k".to_string()))
    );
    assert_eq!(
        t.substitute(&no_scalars(), &lists("k", ints(&[1]))),
        Err(SubstitutionError::ListForScalar("k".to_string()))
    );
    assert_eq!(
        t.substitute(&s, &lists("k", ints(&[1]))),
        Err(SubstitutionError::BoundTwice("k".to_string()))
    );
    let sel = QueryTemplate::parse("MATCH (x:Item) WHERE x.id IN $s RETURN count(*)").unwrap();
    let mut s = BTreeMap::new();
    s.insert("s".to_string(), PropertyValue::Int(5));
    assert_eq!(
        sel.substitute(&s, &BTreeMap::new()),
        Err(SubstitutionError::ScalarForList("s".to_string()))
    );
    let huge = vec![PropertyValue::Int(0); MAX_LIST_LEN + 1];
    assert_eq!(
        sel.substitute(&no_scalars(), &lists("s", huge)),
        Err(SubstitutionError::ListTooLong("s".to_string()))
    );
}

#[test]
fn unbound_message_names_placeholder() {
    let t = QueryTemplate::parse("MATCH (d:Drug) WHERE d.id IN $selected RETURN count(*)").unwrap();
    let err = t.substitute(&no_scalars(), &BTreeMap::new()).unwrap_err();
    assert_eq!(err.to_string(), "placeholder `$selected` is not bound");
}

fn run(g: &PropertyGraph, text: &str, selected: &[i64]) -> ResultTable {
    let t = QueryTemplate::parse(text).unwrap();
    let q = if t.placeholders().is_empty() {
        t.bind_none().unwrap()
    } else {
        t.substitute(&no_scalars(), &lists("selected", ints(selected)))
            .unwrap()
    };
    execute(g, &q).unwrap()
}

#[test]
fn sum_over_selection() {
    let g = drug_graph();
    let r = run(
        &g,
        "MATCH (d:Drug) WHERE d.id IN $selected RETURN sum(d.side_effect_count)",
        &[0, 2],
    );
    assert_eq!(r.scalar(), Some(&PropertyValue::Int(11)));
    assert_eq!(r.columns, vec!["sum(d.side_effect_count)"]);
}

#[test]
fn count_distinct_counts_shared_gene_once() {
    let g = drug_graph();
    let r = run(
        &g,
        "MATCH (d:Drug)-[:TARGETS]->(g:Gene) WHERE d.id IN $selected RETURN count(DISTINCT g.id)",
        &[0, 2],
    );
    // genes 100, 101, 101, 102
    assert_eq!(r.scalar(), Some(&PropertyValue::Int(3)));
    let r = run(
        &g,
        "MATCH (d:Drug)-[:TARGETS]->(g:Gene) WHERE d.id IN $selected RETURN count(g.id)",
        &[0, 2],
    );
    assert_eq!(r.scalar(), Some(&PropertyValue::Int(4)));
}

#[test]
fn empty_aggregates() {
    let g = drug_graph();
    let r = run(
        &g,
        "MATCH (d:Drug) WHERE d.id IN $selected RETURN sum(d.side_effect_count), count(*), min(d.side_effect_count), max(d.side_effect_count), avg(d.side_effect_count), collect(d.id)",
        &[],
    );
    assert_eq!(
        r.rows,
        vec![vec![
            PropertyValue::Int(0),
            PropertyValue::Int(0),
            PropertyValue::Null,
            PropertyValue::Null,
            PropertyValue::Null,
            PropertyValue::List(Vec::new()),
        ]]
    );
}

#[test]
fn aggregates_over_values() {
    let g = drug_graph();
    let r = run(
        &g,
        "MATCH (d:Drug) RETURN min(d.side_effect_count) AS lo, max(d.side_effect_count) AS hi, avg(d.side_effect_count), collect(DISTINCT d.side_effect_count > 3)",
        &[],
    );
    assert_eq!(r.columns[0], "lo");
    assert_eq!(r.rows[0][0], PropertyValue::Int(2));
    assert_eq!(r.rows[0][1], PropertyValue::Int(7));
    assert_eq!(r.rows[0][2], PropertyValue::Float(13.0 / 3.0));
    assert_eq!(
        r.rows[0][3],
        PropertyValue::List(vec![PropertyValue::Bool(true), PropertyValue::Bool(false)])
    );
}

#[test]
fn grouping_with_aggregates() {
    let g = drug_graph();
    let r = run(
        &g,
        "MATCH (d:Drug)-[:TARGETS]->(g:Gene) RETURN g.id, count(*)",
        &[],
    );
    // first appearance order: 100 (drug 0), 101 (drug 0), 102 (drug 2)
    assert_eq!(
        r.rows,
        vec![
            vec![PropertyValue::Int(100), PropertyValue::Int(2)],
            vec![PropertyValue::Int(101), PropertyValue::Int(2)],
            vec![PropertyValue::Int(102), PropertyValue::Int(1)],
        ]
    );
}

#[test]
fn missing_properties_fail_filters_and_are_counted() {
    let mut g = PropertyGraph::new();
    g.add_node(
        ["Country"],
        props! {"who_region" => "AFR", "density" => 2.5},
    )
    .unwrap();
    g.add_node(["Country"], props! {"density" => 30.0}).unwrap();
    g.add_node(["Country"], props! {"who_region" => "EUR"})
        .unwrap();
    g.freeze();
    let r = run(
        &g,
        "MATCH (c:Country) WHERE c.who_region <> 'X' RETURN c.id",
        &[],
    );
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.missing_property_count, 1);
    let r = run(&g, "MATCH (c:Country) RETURN c.who_region, c.density", &[]);
    assert_eq!(r.rows[1][0], PropertyValue::Null);
    assert_eq!(r.rows[2][1], PropertyValue::Null);
    assert_eq!(r.missing_property_count, 2);
    let r = run(
        &g,
        "MATCH (c:Country) RETURN sum(c.density), count(DISTINCT c.who_region)",
        &[],
    );
    assert_eq!(
        r.rows[0],
        vec![PropertyValue::Float(32.5), PropertyValue::Int(2)]
    );
    assert_eq!(r.missing_property_count, 2);
}

#[test]
fn comparisons_and_arithmetic() {
    let g = drug_graph();
    let r = run(
        &g,
        "MATCH (d:Drug) WHERE d.side_effect_count * 2 - 1 >= 7.0 AND NOT d.id = 2 RETURN d.id, d.side_effect_count / 2",
        &[],
    );
    assert_eq!(
        r.rows,
        vec![vec![PropertyValue::Int(0), PropertyValue::Float(2.0)]]
    );
    let r = run(
        &g,
        "MATCH (d:Drug) WHERE d.id IN [0, 1.0] OR d.side_effect_count < -1 RETURN d.id",
        &[],
    );
    assert_eq!(r.rows.len(), 2);
}

#[test]
fn type_mismatch_is_an_error() {
    let g = drug_graph();
    let t = QueryTemplate::parse("MATCH (d:Drug) WHERE d.id = 'zero' RETURN d.id").unwrap();
    assert!(matches!(
        execute(&g, &t.bind_none().unwrap()),
        Err(ExecutionError::TypeMismatch { .. })
    ));
    let t = QueryTemplate::parse("MATCH (d:Drug) WHERE d.id RETURN d.id").unwrap();
    assert!(execute(&g, &t.bind_none().unwrap()).is_err());
}

#[test]
fn unfrozen_graph_rejected() {
    let mut g = PropertyGraph::new();
    g.add_node(["A"], props!()).unwrap();
    let t = QueryTemplate::parse("MATCH (a:A) RETURN count(*)").unwrap();
    assert_eq!(
        execute(&g, &t.bind_none().unwrap()),
        Err(ExecutionError::GraphNotFrozen)
    );
}

#[test]
fn relationship_variable_exposes_edge_properties() {
    let mut g = PropertyGraph::new();
    let a = g.add_node(["J"], props!()).unwrap();
    let b = g.add_node(["J"], props!()).unwrap();
    g.add_edge(a, "ROAD", b, props! {"distance_km" => 3.5})
        .unwrap();
    g.add_edge(a, "RAIL", b, props! {"distance_km" => 9.0})
        .unwrap();
    g.freeze();
    let r = run(
        &g,
        "MATCH (a:J)-[r:ROAD]->(b:J) RETURN a.id, r.distance_km, b.id",
        &[],
    );
    assert_eq!(
        r.rows,
        vec![vec![
            PropertyValue::Int(0),
            PropertyValue::Float(3.5),
            PropertyValue::Int(1)
        ]]
    );
}

fn random_graph(n: usize, labels: &[u8], values: &[i64]) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    for i in 0..n {
        let label = if labels[i % labels.len()].is_multiple_of(3) {
            "Other"
        } else {
            "Item"
        };
        g.add_node([label], props! {"v" => values[i % values.len()]})
            .unwrap();
    }
    g.freeze();
    g
}

proptest! {
    #[test]
    fn in_substitution_equals_membership_filter(
        n in 1usize..100,
        labels in proptest::collection::vec(any::<u8>(), 1..20),
        values in proptest::collection::vec(-50i64..50, 1..20),
        selection in proptest::collection::vec(0i64..120, 0..30),
    ) {
        let g = random_graph(n, &labels, &values);
        let t = QueryTemplate::parse("MATCH (x:Item) WHERE x.id IN $selected RETURN x.id, x.v").unwrap();
        let q = t.substitute(&no_scalars(), &lists("selected", ints(&selection))).unwrap();
        let filtered = execute(&g, &q).unwrap();

        let all = QueryTemplate::parse("MATCH (x:Item) RETURN x.id, x.v").unwrap();
        let full = execute(&g, &all.bind_none().unwrap()).unwrap();
        let expected: Vec<_> = full
            .rows
            .into_iter()
            .filter(|row| selection.contains(&row[0].as_i64().unwrap()))
            .collect();
        prop_assert_eq!(filtered.rows, expected);
    }

    #[test]
    fn execution_is_pure_and_deterministic(
        n in 1usize..60,
        labels in proptest::collection::vec(any::<u8>(), 1..10),
        values in proptest::collection::vec(-50i64..50, 1..10),
    ) {
        let g = random_graph(n, &labels, &values);
        let before = g.clone();
        let t = QueryTemplate::parse("MATCH (x:Item) WHERE x.v > 0 RETURN x.v, count(*), sum(x.v)").unwrap();
        let q = t.bind_none().unwrap();
        let a = execute(&g, &q).unwrap();
        let b = execute(&g, &q).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(g.nodes(), before.nodes());
        prop_assert_eq!(g.edges(), before.edges());
    }
}
