use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::models::{
    region_buckets, Coverage, Dispatch, EmissionMode, FlowAssignment, Model, RegionalSelection,
};
use super::roads::{attach, road_network, ROAD};
use super::spec::{matrix, SpecSnapshot, SpecValue};
use super::{Binding, Coefficients, Instance, OracleKind, ProblemId, Scale, SuiteError};
use crate::graph::{NodeId, PropertyGraph, PropertyValue};
use crate::oracle::{DispatchInstance, Generator, TransportationInstance};
use crate::problem::{
    materialize, DecisionSpace, Materialized, PatternABinding, PatternBBinding, TemplateTerm,
};
use crate::props;
use crate::query::{execute, Query, QueryTemplate};
use crate::rng::Stream;

/// Instance dimensions for one (problem, scale).
#[derive(Debug, Clone, Copy)]
struct Shape {
    /// Candidates, cities, centroids, generators or subclasses.
    n: usize,
    /// Genes, ports, exits, hours or pathogens.
    m: usize,
    k: usize,
    junctions: usize,
    radius: f64,
}

fn shape(id: ProblemId, scale: Scale) -> Shape {
    let s = |n, m, k, junctions, radius| Shape {
        n,
        m,
        k,
        junctions,
        radius,
    };
    match (id, scale) {
        (ProblemId::P1, Scale::Small) => s(20, 30, 4, 0, 0.0),
        (ProblemId::P1, Scale::Medium) => s(60, 120, 6, 0, 0.0),
        (ProblemId::P2, Scale::Small) => s(20, 0, 5, 0, 0.0),
        (ProblemId::P2, Scale::Medium) => s(80, 0, 8, 0, 0.0),
        (ProblemId::P3, Scale::Small) => s(10, 4, 0, 30, 25.0),
        (ProblemId::P3, Scale::Medium) => s(100, 8, 0, 200, 12.0),
        (ProblemId::P4, Scale::Small) => s(25, 0, 6, 0, 0.0),
        (ProblemId::P4, Scale::Medium) => s(60, 0, 10, 0, 0.0),
        (ProblemId::P5, Scale::Small) => s(4, 24, 0, 0, 0.0),
        (ProblemId::P5, Scale::Medium) => s(8, 24, 0, 0, 0.0),
        (ProblemId::P6, Scale::Small) => s(15, 12, 4, 0, 0.0),
        (ProblemId::P6, Scale::Medium) => s(40, 30, 6, 0, 0.0),
        (ProblemId::P7, Scale::Small) => s(8, 3, 0, 20, 30.0),
        (ProblemId::P7, Scale::Medium) => s(30, 6, 0, 80, 18.0),
    }
}

const REGIONS: [(&str, &[&str]); 6] = [
    ("AFR", &["NGA", "KEN", "ZAF", "GHA"]),
    ("AMR", &["USA", "BRA", "CAN", "MEX"]),
    ("SEAR", &["IND", "THA", "BGD"]),
    ("EUR", &["DEU", "FRA", "GBR", "POL"]),
    ("EMR", &["EGY", "PAK", "JOR"]),
    ("WPR", &["CHN", "JPN", "AUS", "VNM"]),
];

fn round_to(v: f64, step: f64) -> f64 {
    libm::round(v / step) * step
}

/// Seed values above `i64::MAX` are recorded as text.
fn seed_value(seed: u64) -> SpecValue {
    i64::try_from(seed).map_or_else(|_| SpecValue::Text(seed.to_string()), SpecValue::Int)
}

pub(crate) fn generate(
    id: ProblemId,
    scale: Scale,
    seed: u64,
    coef: &Coefficients,
) -> Result<Instance, SuiteError> {
    let sh = shape(id, scale);
    let mut rng = Stream::new(seed, id.index() as u64 + 1);
    let mut g = PropertyGraph::new();
    match id {
        ProblemId::P1 => graph_p1(&mut g, &mut rng, sh)?,
        ProblemId::P2 => graph_p2(&mut g, &mut rng, sh)?,
        ProblemId::P3 => graph_p3(&mut g, &mut rng, sh)?,
        ProblemId::P4 => graph_p4(&mut g, &mut rng, sh)?,
        ProblemId::P5 => graph_p5(&mut g, &mut rng, sh)?,
        ProblemId::P6 => graph_p6(&mut g, &mut rng, sh)?,
        ProblemId::P7 => graph_p7(&mut g, &mut rng, sh)?,
    }
    g.freeze();
    ground(id, scale, seed, coef, Arc::new(g))
}

/// Binds a problem to an already built graph.
fn ground(
    id: ProblemId,
    scale: Scale,
    seed: u64,
    coef: &Coefficients,
    graph: Arc<PropertyGraph>,
) -> Result<Instance, SuiteError> {
    let sh = shape(id, scale);
    let (binding, mut spec, oracle) = match id {
        ProblemId::P1 => bind_p1(&graph, sh, coef)?,
        ProblemId::P2 | ProblemId::P4 => bind_regional(id, &graph, sh, coef)?,
        ProblemId::P3 | ProblemId::P7 => bind_flow(id, &graph, coef)?,
        ProblemId::P5 => bind_dispatch(&graph, coef)?,
        ProblemId::P6 => bind_coverage(&graph, sh, coef)?,
    };
    spec.set("problem", id.code());
    spec.set("scale", scale.name());
    spec.set("seed", seed_value(seed));
    spec.set("pattern", binding.pattern_name());
    Ok(Instance {
        id,
        scale,
        seed,
        coefficients: coef.clone(),
        graph,
        binding,
        spec,
        oracle,
        disruption: None,
    })
}

fn query(text: &str) -> Result<Query, SuiteError> {
    Ok(QueryTemplate::parse(text)?.bind_none()?)
}

fn grounded(graph: &PropertyGraph, texts: &[&str]) -> Result<Materialized, SuiteError> {
    let queries = texts
        .iter()
        .map(|t| query(t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(materialize(graph, &queries)?)
}

fn spec_column(m: &Materialized, name: &str) -> Result<SpecValue, SuiteError> {
    Ok(SpecValue::List(
        m.column(name)?.iter().map(spec_of).collect(),
    ))
}

fn spec_of(v: &PropertyValue) -> SpecValue {
    match v {
        PropertyValue::Null => SpecValue::Null,
        PropertyValue::Bool(b) => SpecValue::Int(*b as i64),
        PropertyValue::Int(i) => SpecValue::Int(*i),
        PropertyValue::Float(f) => SpecValue::Float(*f),
        PropertyValue::Text(s) => SpecValue::Text(s.clone()),
        PropertyValue::List(items) => SpecValue::List(items.iter().map(spec_of).collect()),
    }
}

type Parts = (Binding, SpecSnapshot, OracleKind);

fn pattern_b(model: Model, space: DecisionSpace, m: &[&Materialized], extra: &[String]) -> Binding {
    let mut queries: Vec<String> = m.iter().flat_map(|m| m.queries().iter().cloned()).collect();
    queries.extend(extra.iter().cloned());
    let missing = m.iter().map(|m| m.missing_property_count()).sum();
    Binding::PatternB(PatternBBinding::new(
        Arc::new(model),
        space,
        queries,
        missing,
    ))
}

// P1: drugs and target genes, per-evaluation queries.

fn graph_p1(g: &mut PropertyGraph, rng: &mut Stream, sh: Shape) -> Result<(), SuiteError> {
    let mut drugs = Vec::with_capacity(sh.n);
    for i in 0..sh.n {
        let se = rng.below(8) as i64;
        drugs.push(g.add_node(
            ["Drug"],
            props! {"id" => i as i64, "name" => format!("DRUG-{:03}", i + 1), "side_effect_count" => se},
        )?);
    }
    let genes = (0..sh.m)
        .map(|j| {
            g.add_node(
                ["Gene"],
                props! {"id" => j as i64, "symbol" => format!("GENE-{:03}", j + 1)},
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    for &d in &drugs {
        let count = 2 + rng.below(4);
        let mut targets = rng.sample_without_replacement(sh.m, count);
        targets.sort_unstable();
        for t in targets {
            g.add_edge(d, "TARGETS", genes[t], props!())?;
        }
    }
    Ok(())
}

const P1_COVERAGE: &str =
    "MATCH (d:Drug)-[:TARGETS]->(g:Gene) WHERE d.id IN $selected RETURN count(DISTINCT g.id)";
const P1_SIDE_EFFECTS: &str =
    "MATCH (d:Drug) WHERE d.id IN $selected RETURN sum(d.side_effect_count)";

fn bind_p1(
    graph: &Arc<PropertyGraph>,
    sh: Shape,
    coef: &Coefficients,
) -> Result<Parts, SuiteError> {
    let drugs = grounded(
        graph,
        &["MATCH (d:Drug) RETURN d.id, d.name, d.side_effect_count"],
    )?;
    let ids = drugs.column("d.id")?.to_vec();
    let pairs = execute(
        graph,
        &query("MATCH (d:Drug)-[:TARGETS]->(g:Gene) RETURN d.id, g.symbol")?,
    )
    .map_err(|e| SuiteError::Grounding(e.to_string()))?;
    let mut targets: BTreeMap<i64, Vec<SpecValue>> = BTreeMap::new();
    for row in &pairs.rows {
        if let (Some(d), PropertyValue::Text(s)) = (row[0].as_i64(), &row[1]) {
            targets
                .entry(d)
                .or_default()
                .push(SpecValue::Text(s.clone()));
        }
    }
    let target_lists: Vec<SpecValue> = ids
        .iter()
        .map(|id| {
            SpecValue::List(
                id.as_i64()
                    .and_then(|i| targets.remove(&i))
                    .unwrap_or_default(),
            )
        })
        .collect();

    let space = DecisionSpace::selection(sh.k, ids.len())?;
    let terms = vec![
        TemplateTerm::objective("coverage", QueryTemplate::parse(P1_COVERAGE)?, -1.0),
        TemplateTerm::objective(
            "side_effects",
            QueryTemplate::parse(P1_SIDE_EFFECTS)?,
            coef.p1_lambda,
        ),
    ];
    let binding = PatternABinding::new(Arc::clone(graph), space, terms, ids, "selected");
    let spec = SpecSnapshot::new()
        .with("candidates", spec_column(&drugs, "d.name")?)
        .with("targets", SpecValue::List(target_lists))
        .with(
            "side_effect_counts",
            spec_column(&drugs, "d.side_effect_count")?,
        )
        .with("k", sh.k)
        .with("lambda", coef.p1_lambda);
    Ok((Binding::PatternA(binding), spec, OracleKind::Selection))
}

// P2 and P4: regional selection.

fn graph_p2(g: &mut PropertyGraph, rng: &mut Stream, sh: Shape) -> Result<(), SuiteError> {
    for i in 0..sh.n {
        let (region, countries) = REGIONS[rng.below(REGIONS.len())];
        let country = countries[rng.below(countries.len())];
        let trials = 5 + rng.below(196) as i64;
        g.add_node(
            ["Site"],
            props! {
                "id" => i as i64,
                "name" => format!("SITE-{:03}", i + 1),
                "country" => country,
                "region" => region,
                "trial_count" => trials
            },
        )?;
    }
    Ok(())
}

fn graph_p4(g: &mut PropertyGraph, rng: &mut Stream, sh: Shape) -> Result<(), SuiteError> {
    for i in 0..sh.n {
        let (region, countries) = REGIONS[rng.below(REGIONS.len())];
        let code = countries[rng.below(countries.len())];
        let density = round_to(rng.range(0.5, 45.0), 0.1);
        g.add_node(
            ["Country"],
            props! {
                "id" => i as i64,
                "name" => format!("{code}-{:02}", i + 1),
                "who_region" => region,
                "physician_density" => density
            },
        )?;
    }
    Ok(())
}

/// Label and region property of the regional problems.
fn region_property(id: ProblemId) -> Option<(&'static str, &'static str)> {
    match id {
        ProblemId::P2 => Some(("Site", "region")),
        ProblemId::P4 => Some(("Country", "who_region")),
        _ => None,
    }
}

const P2_SITES: &str = "MATCH (s:Site) RETURN s.id, s.name, s.country, s.region, s.trial_count";
const P4_COUNTRIES: &str =
    "MATCH (c:Country) RETURN c.id, c.name, c.who_region, c.physician_density";

fn bind_regional(
    id: ProblemId,
    graph: &Arc<PropertyGraph>,
    sh: Shape,
    coef: &Coefficients,
) -> Result<Parts, SuiteError> {
    let (m, region_col, values, value_term) = if id == ProblemId::P2 {
        let m = grounded(graph, &[P2_SITES])?;
        let v = m.floats("s.trial_count")?;
        (m, "s.region", v, "trial_throughput")
    } else {
        let m = grounded(graph, &[P4_COUNTRIES])?;
        let v = m
            .floats("c.physician_density")?
            .into_iter()
            .map(|d| (coef.p4_threshold - d).max(0.0))
            .collect();
        (m, "c.who_region", v, "physician_deficit")
    };
    let buckets = region_buckets(&m.texts(region_col)?);
    let space = DecisionSpace::selection(sh.k, values.len())?;
    let model = Model::Regional(RegionalSelection {
        value_term,
        values,
        buckets,
        beta: coef.diversity_beta,
    });
    let spec = if id == ProblemId::P2 {
        SpecSnapshot::new()
            .with("facilities", spec_column(&m, "s.name")?)
            .with("countries", spec_column(&m, "s.country")?)
            .with("trial_counts", spec_column(&m, "s.trial_count")?)
            .with("k", sh.k)
            .with("regions", spec_column(&m, "s.region")?)
            .with("beta", coef.diversity_beta)
    } else {
        SpecSnapshot::new()
            .with("names", spec_column(&m, "c.name")?)
            .with("regions", spec_column(&m, "c.who_region")?)
            .with("densities", spec_column(&m, "c.physician_density")?)
            .with("threshold", coef.p4_threshold)
            .with("k", sh.k)
            .with("beta", coef.diversity_beta)
    };
    Ok((
        pattern_b(model, space, &[&m], &[]),
        spec,
        OracleKind::Selection,
    ))
}

/// The P2 instance bound through per-evaluation queries instead of arrays.
pub fn regional_pattern_a(instance: &Instance) -> Result<PatternABinding, SuiteError> {
    if instance.id != ProblemId::P2 {
        return Err(SuiteError::WrongProblem {
            operation: "query-bound site selection",
            problem: instance.id,
        });
    }
    let m = grounded(&instance.graph, &[P2_SITES])?;
    let ids = m.column("s.id")?.to_vec();
    let terms = vec![
        TemplateTerm::objective(
            "trial_throughput",
            QueryTemplate::parse(
                "MATCH (s:Site) WHERE s.id IN $selected RETURN sum(s.trial_count)",
            )?,
            -1.0,
        ),
        TemplateTerm::objective(
            "region_diversity",
            QueryTemplate::parse(
                "MATCH (s:Site) WHERE s.id IN $selected RETURN count(DISTINCT s.region)",
            )?,
            -instance.coefficients.diversity_beta,
        ),
    ];
    Ok(PatternABinding::new(
        Arc::clone(&instance.graph),
        instance.space().clone(),
        terms,
        ids,
        "selected",
    ))
}

/// Removes the region property from every node of a P2 or P4 instance and
/// binds the problem again from the modified graph.
pub fn strip_regions(instance: &Instance) -> Result<Instance, SuiteError> {
    let (label, property) = region_property(instance.id).ok_or(SuiteError::WrongProblem {
        operation: "region stripping",
        problem: instance.id,
    })?;
    let mut g = instance.graph.thawed_copy();
    g.remove_node_property(label, property)?;
    g.freeze();
    let mut out = ground(
        instance.id,
        instance.scale,
        instance.seed,
        &instance.coefficients,
        Arc::new(g),
    )?;
    out.spec.set("stripped_property", property);
    Ok(out)
}

// P3 and P7: fractional routing over a road network.

fn graph_p3(g: &mut PropertyGraph, rng: &mut Stream, sh: Shape) -> Result<(), SuiteError> {
    let net = road_network(g, rng, sh.junctions, sh.radius, None)?;
    let mut total = 0.0;
    for i in 0..sh.n {
        let demand = round_to(rng.range(10.0, 100.0), 0.1);
        total += demand;
        let at = (rng.range(0.0, 100.0), rng.range(0.0, 100.0));
        let c = g.add_node(
            ["City"],
            props! {"id" => i as i64, "name" => format!("CITY-{:03}", i + 1), "demand" => demand},
        )?;
        attach(g, rng, &net, c, at, None)?;
    }
    let weights: Vec<f64> = (0..sh.m).map(|_| rng.range(0.5, 1.5)).collect();
    let wsum: f64 = weights.iter().sum();
    for (j, w) in weights.iter().enumerate() {
        let capacity = round_to(2.2 * total * w / wsum, 0.1);
        let at = (rng.range(0.0, 100.0), rng.range(0.0, 100.0));
        let p = g.add_node(
            ["Port"],
            props! {"id" => j as i64, "name" => format!("PORT-{:02}", j + 1), "capacity" => capacity},
        )?;
        attach(g, rng, &net, p, at, None)?;
    }
    Ok(())
}

fn graph_p7(g: &mut PropertyGraph, rng: &mut Stream, sh: Shape) -> Result<(), SuiteError> {
    let speeds = Some((30.0, 80.0));
    let net = road_network(g, rng, sh.junctions, sh.radius, speeds)?;
    let mut total = 0.0;
    for i in 0..sh.n {
        let pop = (100 + rng.below(901)) as f64;
        total += pop;
        let at = (rng.range(0.0, 100.0), rng.range(0.0, 100.0));
        let c = g.add_node(
            ["Centroid"],
            props! {"id" => i as i64, "name" => format!("ZONE-{:03}", i + 1), "pop" => pop},
        )?;
        attach(g, rng, &net, c, at, speeds)?;
    }
    let weights: Vec<f64> = (0..sh.m).map(|_| rng.range(0.5, 1.5)).collect();
    let wsum: f64 = weights.iter().sum();
    for (j, w) in weights.iter().enumerate() {
        let capacity = libm::round(1.5 * total * w / wsum);
        let at = (rng.range(0.0, 100.0), rng.range(0.0, 100.0));
        let e = g.add_node(
            ["Exit"],
            props! {"id" => j as i64, "name" => format!("EXIT-{:02}", j + 1), "capacity" => capacity},
        )?;
        attach(g, rng, &net, e, at, speeds)?;
    }
    Ok(())
}

struct FlowSchema {
    rows: &'static str,
    cols: &'static str,
    row_query: &'static str,
    col_query: &'static str,
    demand: &'static str,
    weight: &'static str,
    cost_term: &'static str,
}

fn flow_schema(id: ProblemId) -> FlowSchema {
    if id == ProblemId::P3 {
        FlowSchema {
            rows: "City",
            cols: "Port",
            row_query: "MATCH (c:City) RETURN c.id, c.name, c.demand AS supply",
            col_query: "MATCH (p:Port) RETURN p.id, p.name, p.capacity AS capacity",
            demand: "supply",
            weight: "distance_km",
            cost_term: "transport_cost",
        }
    } else {
        FlowSchema {
            rows: "Centroid",
            cols: "Exit",
            row_query: "MATCH (c:Centroid) RETURN c.id, c.name, c.pop AS supply",
            col_query: "MATCH (e:Exit) RETURN e.id, e.name, e.capacity AS capacity",
            demand: "supply",
            weight: "travel_time",
            cost_term: "person_hours",
        }
    }
}

fn bind_flow(
    id: ProblemId,
    graph: &Arc<PropertyGraph>,
    coef: &Coefficients,
) -> Result<Parts, SuiteError> {
    let s = flow_schema(id);
    let rows_m = grounded(graph, &[s.row_query])?;
    let cols_m = grounded(graph, &[s.col_query])?;
    let row_nodes: Vec<NodeId> = graph.nodes_by_label(s.rows).to_vec();
    let col_nodes: Vec<NodeId> = graph.nodes_by_label(s.cols).to_vec();
    let dist = graph.shortest_paths(&row_nodes, s.weight, ROAD)?;
    let mut unit_cost = Vec::with_capacity(row_nodes.len() * col_nodes.len());
    for &r in &row_nodes {
        for &c in &col_nodes {
            let d = dist.get(&(r, c)).ok_or_else(|| {
                SuiteError::Grounding(format!("{} {} cannot reach {} {}", s.rows, r, s.cols, c))
            })?;
            unit_cost.push(*d);
        }
    }
    let mean_cost = unit_cost.iter().sum::<f64>() / unit_cost.len() as f64;
    let weight = coef.penalty_factor * mean_cost;
    let model = FlowAssignment {
        cost_term: s.cost_term,
        rows: row_nodes.len(),
        cols: col_nodes.len(),
        unit_cost,
        demand: rows_m.floats(s.demand)?,
        capacity: cols_m.floats("capacity")?,
        balance_weight: weight,
        capacity_weight: weight,
    };
    let oracle = flow_oracle(&model)?;
    let spec = flow_spec(id, &model, &rows_m, &cols_m)?;
    let space = DecisionSpace::uniform_box(model.rows * model.cols, 0.0, 1.0)?;
    let paths = format!(
        "shortest paths {} -> {} over {ROAD}.{}",
        s.rows, s.cols, s.weight
    );
    Ok((
        pattern_b(Model::Flow(model), space, &[&rows_m, &cols_m], &[paths]),
        spec,
        oracle,
    ))
}

pub(crate) fn flow_oracle(model: &FlowAssignment) -> Result<OracleKind, SuiteError> {
    Ok(OracleKind::Transportation(TransportationInstance::new(
        model.cost_matrix(),
        model.demand.clone(),
        model.capacity.clone(),
    )?))
}

fn flow_spec(
    id: ProblemId,
    model: &FlowAssignment,
    rows: &Materialized,
    cols: &Materialized,
) -> Result<SpecSnapshot, SuiteError> {
    let spec = if id == ProblemId::P3 {
        SpecSnapshot::new()
            .with("distance_km", model.unit_cost.as_slice())
            .with("demands", model.demand.as_slice())
            .with("capacities", model.capacity.as_slice())
            .with("n_cities", model.rows)
            .with("n_ports", model.cols)
            .with("cities", spec_column(rows, "c.name")?)
            .with("ports", spec_column(cols, "p.name")?)
    } else {
        SpecSnapshot::new()
            .with("n_centroids", model.rows)
            .with("n_exits", model.cols)
            .with("pop", model.demand.as_slice())
            .with("capacity", model.capacity.as_slice())
            .with("travel_time", matrix(&model.cost_matrix()))
            .with("centroids", spec_column(rows, "c.name")?)
            .with("exits", spec_column(cols, "e.name")?)
    };
    Ok(spec
        .with("balance_weight", model.balance_weight)
        .with("capacity_weight", model.capacity_weight))
}

// P5: economic dispatch.

fn graph_p5(g: &mut PropertyGraph, rng: &mut Stream, sh: Shape) -> Result<(), SuiteError> {
    const BASE: [(f64, f64, f64, f64); 4] = [
        (18.0, 0.95, 120.0, 35.0),
        (32.0, 0.55, 90.0, 45.0),
        (45.0, 0.35, 70.0, 55.0),
        (70.0, 0.05, 50.0, 50.0),
    ];
    let mut total_max = 0.0;
    for i in 0..sh.n {
        let (cost, emission, max, ramp) = BASE[i % BASE.len()];
        let cost = round_to(cost * rng.range(0.9, 1.1), 0.01);
        let emission = round_to(emission * rng.range(0.9, 1.1), 0.001);
        total_max += max;
        g.add_node(
            ["Generator"],
            props! {
                "id" => i as i64,
                "name" => format!("GEN-{:02}", i + 1),
                "cost_rate" => cost,
                "emission_rate" => emission,
                "min_out" => 0.0,
                "max_out" => max,
                "ramp" => ramp
            },
        )?;
    }
    for h in 0..sh.m {
        let phase = core::f64::consts::PI * (h as f64 - 6.0) / 12.0;
        let level = 0.45 + 0.2 * libm::sin(phase) + rng.range(-0.03, 0.03);
        let demand = round_to(level * total_max, 0.1);
        g.add_node(["Hour"], props! {"hour" => h as i64, "demand" => demand})?;
    }
    Ok(())
}

fn bind_dispatch(graph: &Arc<PropertyGraph>, coef: &Coefficients) -> Result<Parts, SuiteError> {
    let gens_m = grounded(
        graph,
        &["MATCH (g:Generator) RETURN g.id, g.name, g.cost_rate, g.emission_rate, g.min_out, g.max_out, g.ramp"],
    )?;
    let hours_m = grounded(graph, &["MATCH (h:Hour) RETURN h.hour, h.demand"])?;
    let cost = gens_m.floats("g.cost_rate")?;
    let emission = gens_m.floats("g.emission_rate")?;
    let min = gens_m.floats("g.min_out")?;
    let max = gens_m.floats("g.max_out")?;
    let ramp = gens_m.floats("g.ramp")?;
    let demand = hours_m.floats("h.demand")?;
    let generators: Vec<Generator> = (0..cost.len())
        .map(|g| Generator {
            cost_rate: cost[g],
            emission_rate: emission[g],
            min_out: min[g],
            max_out: max[g],
            ramp: ramp[g],
        })
        .collect();
    let instance = DispatchInstance::new(generators, demand.clone())?;
    let ew = coef.p5_emission_weight;
    let rates = instance.effective_rates(ew);
    let weight = coef.penalty_factor * rates.iter().sum::<f64>() / rates.len() as f64;
    let hours = demand.len();
    let mut lower = Vec::with_capacity(cost.len() * hours);
    let mut upper = Vec::with_capacity(cost.len() * hours);
    for g in 0..cost.len() {
        lower.extend(core::iter::repeat_n(min[g], hours));
        upper.extend(core::iter::repeat_n(max[g], hours));
    }
    let space = DecisionSpace::continuous(lower, upper)?;
    let oracle = match coef.p5_mode {
        EmissionMode::Linear => OracleKind::MeritOrder {
            instance: instance.clone(),
            emission_weight: ew,
        },
        EmissionMode::Quadratic => OracleKind::Unavailable("no oracle (non-linear mode)"),
    };
    let spec = SpecSnapshot::new()
        .with("n_generators", cost.len())
        .with("n_hours", hours)
        .with("cost_rate", cost)
        .with("emission_rate", emission)
        .with("min_out", min)
        .with("max_out", max)
        .with("ramp", ramp)
        .with("demand", demand)
        .with("emission_weight", ew)
        .with("mode", coef.p5_mode.name())
        .with("balance_weight", weight)
        .with("ramp_weight", weight);
    let model = Model::Dispatch(Dispatch {
        instance,
        emission_weight: ew,
        mode: coef.p5_mode,
        balance_weight: weight,
        ramp_weight: weight,
    });
    Ok((
        pattern_b(model, space, &[&gens_m, &hours_m], &[]),
        spec,
        oracle,
    ))
}

// P6: antibiotic subclasses and resistance genes.

fn graph_p6(g: &mut PropertyGraph, rng: &mut Stream, sh: Shape) -> Result<(), SuiteError> {
    let subclasses = (0..sh.n)
        .map(|i| {
            g.add_node(
                ["Subclass"],
                props! {"id" => i as i64, "name" => format!("SUBCLASS-{:02}", i + 1)},
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    for p in 0..sh.m {
        g.add_node(
            ["Pathogen"],
            props! {"id" => p as i64, "name" => format!("PATHOGEN-{:02}", p + 1)},
        )?;
    }
    let mut serial = 0;
    for (s, &sub) in subclasses.iter().enumerate() {
        for p in 0..sh.m {
            let count = if rng.uniform() < 0.3 {
                0
            } else {
                1 + rng.below(4)
            };
            for _ in 0..count {
                serial += 1;
                let gene = g.add_node(
                    ["ResistanceGene"],
                    props! {"name" => format!("ARG-{serial:04}"), "pathogen" => p as i64, "subclass" => s as i64},
                )?;
                g.add_edge(gene, "CONFERS", sub, props!())?;
            }
        }
    }
    Ok(())
}

const P6_COUNTS: &str =
    "MATCH (g:ResistanceGene)-[:CONFERS]->(s:Subclass) RETURN s.id, g.pathogen, count(*)";

fn bind_coverage(
    graph: &Arc<PropertyGraph>,
    sh: Shape,
    coef: &Coefficients,
) -> Result<Parts, SuiteError> {
    let subs = grounded(graph, &["MATCH (s:Subclass) RETURN s.id, s.name"])?;
    let paths = grounded(graph, &["MATCH (p:Pathogen) RETURN p.id, p.name"])?;
    let sub_ids: Vec<i64> = subs
        .column("s.id")?
        .iter()
        .filter_map(PropertyValue::as_i64)
        .collect();
    let path_ids: Vec<i64> = paths
        .column("p.id")?
        .iter()
        .filter_map(PropertyValue::as_i64)
        .collect();
    let table =
        execute(graph, &query(P6_COUNTS)?).map_err(|e| SuiteError::Grounding(e.to_string()))?;
    let mut counts = vec![vec![0i64; path_ids.len()]; sub_ids.len()];
    for row in &table.rows {
        let (Some(s), Some(p), Some(c)) = (row[0].as_i64(), row[1].as_i64(), row[2].as_i64())
        else {
            continue;
        };
        if let (Some(si), Some(pi)) = (
            sub_ids.iter().position(|&x| x == s),
            path_ids.iter().position(|&x| x == p),
        ) {
            counts[si][pi] = c;
        }
    }
    let efficacy: Vec<Vec<f64>> = counts
        .iter()
        .map(|r| r.iter().map(|&c| 1.0 / (1.0 + c as f64)).collect())
        .collect();
    let burden: Vec<f64> = counts
        .iter()
        .map(|r| r.iter().sum::<i64>() as f64)
        .collect();
    let space = DecisionSpace::selection(sh.k, sub_ids.len())?;
    let spec = SpecSnapshot::new()
        .with("subclasses", spec_column(&subs, "s.name")?)
        .with("pathogens", spec_column(&paths, "p.name")?)
        .with(
            "resistance_counts",
            SpecValue::List(
                counts
                    .iter()
                    .map(|r| SpecValue::from(r.as_slice()))
                    .collect(),
            ),
        )
        .with("burden", burden.as_slice())
        .with("k", sh.k)
        .with("lambda", coef.p6_lambda);
    let model = Model::Coverage(Coverage {
        efficacy,
        burden,
        lambda: coef.p6_lambda,
    });
    let counts_text = query(P6_COUNTS)?.to_string();
    Ok((
        pattern_b(model, space, &[&subs, &paths], &[counts_text]),
        spec,
        OracleKind::Selection,
    ))
}
