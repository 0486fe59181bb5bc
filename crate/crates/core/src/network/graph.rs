use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::gauge::FieldRecord;

/// Half-integer edge label stored as twice its value, so 0, 1/2, 1, 3/2, ...
/// are exact and anything else is rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinLabel {
    twice: u32,
}

impl SpinLabel {
    pub fn from_twice(twice: u32) -> Self {
        SpinLabel { twice }
    }

    pub fn from_value(j: f64) -> Result<Self> {
        if !j.is_finite() || j < 0.0 {
            return Err(Error::Domain(format!("spin label must be >= 0, got {j}")));
        }
        let twice = (2.0 * j).round();
        if (2.0 * j - twice).abs() > 1e-9 || twice > u32::MAX as f64 {
            return Err(Error::Domain(format!(
                "spin label must be a half-integer, got {j}"
            )));
        }
        Ok(SpinLabel {
            twice: twice as u32,
        })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

/// Directed edge with its quantum labels. The spin label is carried and
/// exported but never enters the helicity dynamics; the optional gauge
/// record likewise tags the edge with a field configuration.
#[derive(Debug, Clone)]
pub struct Edge {
    id: String,
    from: String,
    to: String,
    spin: SpinLabel,
    gauge: Option<FieldRecord>,
}

impl Edge {
    pub fn new(
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        spin: SpinLabel,
    ) -> Self {
        Edge {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            spin,
            gauge: None,
        }
    }

    pub fn with_gauge(mut self, gauge: FieldRecord) -> Self {
        self.gauge = Some(gauge);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn from_vertex(&self) -> &str {
        &self.from
    }

    pub fn to_vertex(&self) -> &str {
        &self.to
    }

    pub fn spin(&self) -> SpinLabel {
        self.spin
    }

    pub fn gauge(&self) -> Option<&FieldRecord> {
        self.gauge.as_ref()
    }
}

/// Finite directed graph whose edges carry the helicity amplitudes. The
/// downstream table lists, for each edge, the edges leaving its head vertex;
/// transport flows along it. An explicit table may override the derived one.
#[derive(Debug, Clone)]
pub struct SpinNetwork {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    downstream: Vec<Vec<usize>>,
}

impl SpinNetwork {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        SpinNetwork::build(vertices, edges, None)
    }

    /// Explicit adjacency: edge id -> downstream edge ids.
    pub fn with_adjacency(
        vertices: Vec<String>,
        edges: Vec<Edge>,
        adjacency: &BTreeMap<String, Vec<String>>,
    ) -> Result<Self> {
        SpinNetwork::build(vertices, edges, Some(adjacency))
    }

    fn build(
        vertices: Vec<String>,
        edges: Vec<Edge>,
        adjacency: Option<&BTreeMap<String, Vec<String>>>,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        let mut vertex_set = HashSet::new();
        for v in &vertices {
            if !vertex_set.insert(v.as_str()) {
                problems.push(format!("duplicate vertex id '{v}'"));
            }
        }
        let mut edge_ids = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if edge_ids.insert(e.id.clone(), i).is_some() {
                problems.push(format!("duplicate edge id '{}'", e.id));
            }
            for v in [&e.from, &e.to] {
                if !vertex_set.contains(v.as_str()) {
                    problems.push(format!("edge '{}' references unknown vertex '{v}'", e.id));
                }
            }
            if let Some(record) = &e.gauge {
                if let Err(err) = record.clone().into_field() {
                    problems.push(format!("edge '{}' gauge label invalid: {err}", e.id));
                }
            }
        }
        let downstream = match adjacency {
            Some(map) => {
                let mut table = vec![Vec::new(); edges.len()];
                for (id, neighbors) in map {
                    match edge_ids.get(id) {
                        Some(&i) => {
                            for n in neighbors {
                                match edge_ids.get(n) {
                                    Some(&j) => table[i].push(j),
                                    None => problems.push(format!(
                                        "adjacency for '{id}' references unknown edge '{n}'"
                                    )),
                                }
                            }
                        }
                        None => problems.push(format!("adjacency references unknown edge '{id}'")),
                    }
                }
                table
            }
            None => edges
                .iter()
                .map(|e| {
                    edges
                        .iter()
                        .enumerate()
                        .filter(|(_, other)| other.from == e.to)
                        .map(|(j, _)| j)
                        .collect()
                })
                .collect(),
        };
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }
        Ok(SpinNetwork {
            vertices,
            edges,
            downstream,
        })
    }

    /// Closed loop of n edges: v_k -> v_{k+1 mod n}, every spin 1/2. Each
    /// edge has exactly one downstream neighbor, making the transport term a
    /// one-sided difference; this is the discrete line used for continuum
    /// comparisons.
    pub fn ring(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("ring needs at least one edge".into()));
        }
        let vertices: Vec<String> = (0..n).map(|k| format!("v{k}")).collect();
        let edges: Vec<Edge> = (0..n)
            .map(|k| {
                Edge::new(
                    format!("e{k}"),
                    format!("v{k}"),
                    format!("v{}", (k + 1) % n),
                    SpinLabel::from_twice(1),
                )
            })
            .collect();
        SpinNetwork::new(vertices, edges)
    }

    /// Open chain of n edges over n+1 vertices; the last edge has no
    /// downstream neighbor and is reported as isolated by the transport term.
    pub fn chain(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("chain needs at least one edge".into()));
        }
        let vertices: Vec<String> = (0..=n).map(|k| format!("v{k}")).collect();
        let edges: Vec<Edge> = (0..n)
            .map(|k| {
                Edge::new(
                    format!("e{k}"),
                    format!("v{k}"),
                    format!("v{}", k + 1),
                    SpinLabel::from_twice(1),
                )
            })
            .collect();
        SpinNetwork::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn downstream(&self, edge: usize) -> &[usize] {
        &self.downstream[edge]
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertices.iter().any(|v| v == id)
    }
}
