//! On-disk forms for networks, foams, and their outputs.
//!
//! Networks are JSON with edges {id, from, to, j, gauge?} and an optional
//! explicit adjacency map; foam vertex tables are keyed by helicity strings
//! like "+-", one character per incident face in listed order. Time series
//! go to long-form CSV and constraint reports to JSON.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::FieldRecord;
use crate::io_util::{fmt_f64, CsvWriter};

use super::constraints::ConstraintReport;
use super::dynamics::EdgeAmplitudes;
use super::foam::{FoamFace, FoamSpec, FoamVertex};
use super::graph::{Edge, SpinLabel, SpinNetwork};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    pub from: String,
    pub to: String,
    pub j: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<FieldRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkRecord {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    /// Edge id -> downstream edge ids. Omitted on input, the table is derived
    /// from shared vertices; exports always write it out explicitly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<BTreeMap<String, Vec<String>>>,
}

impl From<&SpinNetwork> for NetworkRecord {
    fn from(net: &SpinNetwork) -> Self {
        let adjacency = net
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let ids = net
                    .downstream(i)
                    .iter()
                    .map(|&j| net.edges()[j].id().to_string())
                    .collect();
                (e.id().to_string(), ids)
            })
            .collect();
        NetworkRecord {
            vertices: net.vertices().to_vec(),
            edges: net
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    id: e.id().to_string(),
                    from: e.from_vertex().to_string(),
                    to: e.to_vertex().to_string(),
                    j: e.spin().value(),
                    gauge: e.gauge().cloned(),
                })
                .collect(),
            adjacency: Some(adjacency),
        }
    }
}

impl NetworkRecord {
    pub fn into_network(self) -> Result<SpinNetwork> {
        let mut problems = Vec::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in self.edges {
            let spin = match SpinLabel::from_value(e.j) {
                Ok(spin) => spin,
                Err(err) => {
                    problems.push(format!("edge '{}': {err}", e.id));
                    SpinLabel::from_twice(0)
                }
            };
            let mut edge = Edge::new(e.id, e.from, e.to, spin);
            if let Some(gauge) = e.gauge {
                edge = edge.with_gauge(gauge);
            }
            edges.push(edge);
        }
        let built = match &self.adjacency {
            Some(map) => SpinNetwork::with_adjacency(self.vertices, edges, map),
            None => SpinNetwork::new(self.vertices, edges),
        };
        match built {
            Ok(net) if problems.is_empty() => Ok(net),
            Ok(_) => Err(Error::Config(problems)),
            Err(Error::Config(mut more)) => {
                problems.append(&mut more);
                Err(Error::Config(problems))
            }
            Err(other) => Err(other),
        }
    }
}

pub fn write_network_json(path: &Path, net: &SpinNetwork) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(
        path,
        serde_json::to_string_pretty(&NetworkRecord::from(net))?,
    )?;
    Ok(())
}

pub fn read_network_json(path: &Path) -> Result<SpinNetwork> {
    let record: NetworkRecord = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    record.into_network()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaceRecord {
    pub id: String,
    pub w_plus: [f64; 2],
    pub w_minus: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoamVertexRecord {
    pub id: String,
    /// Incident face ids; character j of every table key refers to faces[j].
    pub faces: Vec<String>,
    pub table: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoamRecord {
    pub faces: Vec<FaceRecord>,
    pub vertices: Vec<FoamVertexRecord>,
}

fn assignment_key(mask: usize, len: usize) -> String {
    (0..len)
        .map(|j| if mask >> j & 1 == 1 { '+' } else { '-' })
        .collect()
}

fn assignment_index(key: &str, len: usize) -> Option<usize> {
    if key.chars().count() != len {
        return None;
    }
    let mut mask = 0usize;
    for (j, c) in key.chars().enumerate() {
        match c {
            '+' => mask |= 1 << j,
            '-' => {}
            _ => return None,
        }
    }
    Some(mask)
}

impl From<&FoamSpec> for FoamRecord {
    fn from(spec: &FoamSpec) -> Self {
        FoamRecord {
            faces: spec
                .faces()
                .iter()
                .map(|f| FaceRecord {
                    id: f.id().to_string(),
                    w_plus: [f.weight_plus().re, f.weight_plus().im],
                    w_minus: [f.weight_minus().re, f.weight_minus().im],
                })
                .collect(),
            vertices: spec
                .vertices()
                .iter()
                .map(|v| {
                    let ids = v
                        .faces()
                        .iter()
                        .map(|&f| spec.faces()[f].id().to_string())
                        .collect();
                    let table = v
                        .table()
                        .iter()
                        .enumerate()
                        .map(|(mask, z)| (assignment_key(mask, v.faces().len()), [z.re, z.im]))
                        .collect();
                    FoamVertexRecord {
                        id: v.id().to_string(),
                        faces: ids,
                        table,
                    }
                })
                .collect(),
        }
    }
}

impl FoamRecord {
    pub fn into_foam(self) -> Result<FoamSpec> {
        let mut problems = Vec::new();
        let mut index_of = BTreeMap::new();
        for (i, f) in self.faces.iter().enumerate() {
            index_of.insert(f.id.clone(), i);
        }
        let faces: Vec<FoamFace> = self
            .faces
            .iter()
            .map(|f| {
                FoamFace::new(
                    f.id.clone(),
                    Complex64::new(f.w_plus[0], f.w_plus[1]),
                    Complex64::new(f.w_minus[0], f.w_minus[1]),
                )
            })
            .collect();
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for v in self.vertices {
            let mut indices = Vec::with_capacity(v.faces.len());
            for id in &v.faces {
                match index_of.get(id) {
                    Some(&i) => indices.push(i),
                    None => {
                        problems.push(format!("vertex '{}' references unknown face '{id}'", v.id));
                    }
                }
            }
            if indices.len() != v.faces.len() {
                continue;
            }
            let k = indices.len();
            let mut table = vec![None; 1 << k];
            for (key, z) in &v.table {
                match assignment_index(key, k) {
                    Some(mask) => table[mask] = Some(Complex64::new(z[0], z[1])),
                    None => problems.push(format!(
                        "vertex '{}' table key '{key}' is not a {k}-face assignment",
                        v.id
                    )),
                }
            }
            let missing: Vec<String> = table
                .iter()
                .enumerate()
                .filter(|(_, entry)| entry.is_none())
                .map(|(mask, _)| assignment_key(mask, k))
                .collect();
            if !missing.is_empty() {
                problems.push(format!(
                    "vertex '{}' table is missing assignments {missing:?}",
                    v.id
                ));
                continue;
            }
            vertices.push(FoamVertex::new(
                v.id,
                indices,
                table.into_iter().map(|entry| entry.unwrap()).collect(),
            ));
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }
        FoamSpec::new(faces, vertices)
    }
}

pub fn write_foam_json(path: &Path, spec: &FoamSpec) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(&FoamRecord::from(spec))?)?;
    Ok(())
}

pub fn read_foam_json(path: &Path) -> Result<FoamSpec> {
    let record: FoamRecord = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    record.into_foam()
}

/// Long-form time series: one row per edge per sample.
pub struct AmplitudeSeriesWriter {
    out: CsvWriter,
    ids: Vec<String>,
}

impl AmplitudeSeriesWriter {
    pub fn create(path: &Path, net: &SpinNetwork) -> Result<Self> {
        let out = CsvWriter::create(path, "t,edge_id,re_plus,im_plus,re_minus,im_minus")?;
        Ok(AmplitudeSeriesWriter {
            out,
            ids: net.edges().iter().map(|e| e.id().to_string()).collect(),
        })
    }

    pub fn record(&mut self, t: f64, amps: &EdgeAmplitudes) -> Result<()> {
        if amps.len() != self.ids.len() {
            return Err(Error::Dimension(format!(
                "{} amplitudes in a series over {} edges",
                amps.len(),
                self.ids.len()
            )));
        }
        for (e, id) in self.ids.iter().enumerate() {
            self.out.row(&[
                fmt_f64(t),
                id.clone(),
                fmt_f64(amps.plus()[e].re),
                fmt_f64(amps.plus()[e].im),
                fmt_f64(amps.minus()[e].re),
                fmt_f64(amps.minus()[e].im),
            ])?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        self.out.finish()
    }
}

#[derive(Serialize)]
struct ConstraintReportRecord<'a> {
    per_edge: Vec<EdgeResidualRecord<'a>>,
    global: f64,
}

#[derive(Serialize)]
struct EdgeResidualRecord<'a> {
    edge: &'a str,
    residual: f64,
}

pub fn write_constraint_report(
    path: &Path,
    net: &SpinNetwork,
    report: &ConstraintReport,
) -> Result<()> {
    if report.per_edge.len() != net.n_edges() {
        return Err(Error::Dimension(format!(
            "{} residuals for a {}-edge network",
            report.per_edge.len(),
            net.n_edges()
        )));
    }
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let record = ConstraintReportRecord {
        per_edge: net
            .edges()
            .iter()
            .zip(report.per_edge.iter())
            .map(|(e, &residual)| EdgeResidualRecord {
                edge: e.id(),
                residual,
            })
            .collect(),
        global: report.global,
    };
    std::fs::write(path, serde_json::to_string_pretty(&record)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::constraints::flip_constraint_residuals;
    use num_complex::Complex64 as C;

    #[test]
    fn network_round_trips_through_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.json");
        let net = SpinNetwork::ring(4).unwrap();
        write_network_json(&path, &net).unwrap();
        let back = read_network_json(&path).unwrap();
        assert_eq!(back.vertices(), net.vertices());
        assert_eq!(back.n_edges(), 4);
        for e in 0..4 {
            assert_eq!(back.downstream(e), net.downstream(e));
            assert_eq!(back.edges()[e].spin(), net.edges()[e].spin());
        }
    }

    #[test]
    fn adjacency_is_derived_when_the_record_omits_it() {
        let json = r#"{
            "vertices": ["a", "b"],
            "edges": [
                {"id": "e0", "from": "a", "to": "b", "j": 0.5},
                {"id": "e1", "from": "b", "to": "a", "j": 1.0}
            ]
        }"#;
        let record: NetworkRecord = serde_json::from_str(json).unwrap();
        let net = record.into_network().unwrap();
        assert_eq!(net.downstream(0), &[1]);
        assert_eq!(net.downstream(1), &[0]);

        let bad: NetworkRecord = serde_json::from_str(
            r#"{"vertices": ["a"], "edges": [{"id": "e", "from": "a", "to": "a", "j": 0.3}]}"#,
        )
        .unwrap();
        assert!(matches!(bad.into_network(), Err(Error::Config(_))));
    }

    #[test]
    fn foam_round_trips_with_assignment_keys() {
        let faces = vec![
            FoamFace::new("f0", C::new(0.5, 0.1), C::new(0.5, -0.1)),
            FoamFace::new("f1", C::new(0.3, 0.0), C::new(0.7, 0.0)),
        ];
        let vertices = vec![FoamVertex::new(
            "v0",
            vec![0, 1],
            vec![
                C::new(1.0, 0.0),
                C::new(2.0, 0.0),
                C::new(3.0, 0.0),
                C::new(4.0, 0.0),
            ],
        )];
        let spec = FoamSpec::new(faces, vertices).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("foam.json");
        write_foam_json(&path, &spec).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"-+\""), "{text}");

        let back = read_foam_json(&path).unwrap();
        assert_eq!(back.vertices()[0].table(), spec.vertices()[0].table());
        use crate::network::foam::{foam_amplitude, FoamStrategy};
        assert_eq!(
            foam_amplitude(&back, FoamStrategy::BruteForce).unwrap(),
            foam_amplitude(&spec, FoamStrategy::BruteForce).unwrap()
        );
    }

    #[test]
    fn incomplete_foam_tables_are_rejected_with_the_missing_keys() {
        let json = r#"{
            "faces": [{"id": "f", "w_plus": [1.0, 0.0], "w_minus": [1.0, 0.0]}],
            "vertices": [{"id": "v", "faces": ["f"], "table": {"+": [1.0, 0.0]}}]
        }"#;
        let record: FoamRecord = serde_json::from_str(json).unwrap();
        match record.into_foam() {
            Err(Error::Config(problems)) => {
                assert!(problems[0].contains("missing"), "{problems:?}");
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn series_and_constraint_files_have_the_expected_shape() {
        let dir = tempfile::tempdir().unwrap();
        let net = SpinNetwork::ring(2).unwrap();
        let amps = EdgeAmplitudes::uniform(2, C::ONE, C::ZERO);

        let series = dir.path().join("series.csv");
        let mut writer = AmplitudeSeriesWriter::create(&series, &net).unwrap();
        writer.record(0.0, &amps).unwrap();
        writer.record(0.5, &amps).unwrap();
        writer.finish().unwrap();
        let text = std::fs::read_to_string(&series).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("t,edge_id,re_plus"));

        let report = flip_constraint_residuals(&amps);
        let path = dir.path().join("constraints.json");
        write_constraint_report(&path, &net, &report).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"edge\": \"e0\""));
        assert!(text.contains("\"global\""));
    }
}
