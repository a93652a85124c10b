//! File formats: graph and domain JSON, generator specs, and report output.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use dpt_core::domain::DiscreteDomain;
use dpt_core::generate::{generate, Family};
use dpt_core::graph::{EmbeddedGraph, Point};
use dpt_core::harness::RatioReport;

#[derive(Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Domain file: an inline graph or a path to one, plus the interior ids.
#[derive(Serialize, Deserialize)]
pub struct DomainFile {
    pub graph: GraphRef,
    pub interior: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRef {
    Path(String),
    Inline(GraphFile),
}

/// Generator spec: family name, key=value parameters, seed.
#[derive(Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn family(&self) -> Result<Family> {
        Family::from_params(&self.family, &self.params)
            .map_err(|e| anyhow::anyhow!("bad generator spec: {e}"))
    }
}

pub fn build_graph(file: &GraphFile) -> Result<EmbeddedGraph> {
    let n = file.vertices.len();
    let mut positions = vec![Point::new(f64::NAN, f64::NAN); n];
    for v in &file.vertices {
        if v.id >= n {
            bail!("vertex ids must be dense from 0; id {} out of range", v.id);
        }
        if !v.x.is_finite() || !v.y.is_finite() {
            bail!("vertex {} has a non-finite position", v.id);
        }
        positions[v.id] = Point::new(v.x, v.y);
    }
    if positions.iter().any(|p| p.x.is_nan()) {
        bail!("vertex ids must be dense from 0");
    }
    let edges: Vec<(usize, usize, f64)> = file
        .edges
        .iter()
        .map(|e| {
            if !e.w.is_finite() {
                bail!("edge ({}, {}) has a non-finite weight", e.u, e.v);
            }
            Ok((e.u, e.v, e.w))
        })
        .collect::<Result<_>>()?;
    EmbeddedGraph::build(positions, edges).map_err(|e| anyhow::anyhow!("invalid graph: {e}"))
}

pub fn graph_to_file(graph: &EmbeddedGraph) -> GraphFile {
    GraphFile {
        vertices: (0..graph.vertex_count())
            .map(|v| {
                let p = graph.position(v);
                VertexRecord { id: v, x: p.x, y: p.y }
            })
            .collect(),
        edges: (0..graph.edge_count())
            .map(|e| {
                let (u, v, w) = graph.edge(e);
                EdgeRecord { u, v, w }
            })
            .collect(),
    }
}

pub fn load_domain(path: &Path) -> Result<DiscreteDomain> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read domain file {}", path.display()))?;
    let file: DomainFile = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse domain file {}", path.display()))?;
    let graph_file = match file.graph {
        GraphRef::Inline(g) => g,
        GraphRef::Path(rel) => {
            let gp = path.parent().unwrap_or(Path::new(".")).join(rel);
            serde_json::from_str(
                &fs::read_to_string(&gp)
                    .with_context(|| format!("cannot read graph file {}", gp.display()))?,
            )
            .with_context(|| format!("cannot parse graph file {}", gp.display()))?
        }
    };
    let graph = Arc::new(build_graph(&graph_file)?);
    DiscreteDomain::new(graph, &file.interior).map_err(|e| anyhow::anyhow!("invalid domain: {e}"))
}

pub fn generate_domain(spec: &GeneratorSpec) -> Result<DiscreteDomain> {
    let family = spec.family()?;
    generate(&family, spec.seed).map_err(|e| anyhow::anyhow!("generator failed: {e}"))
}

pub fn save_domain(dom: &DiscreteDomain, spec: Option<&GeneratorSpec>, path: &Path) -> Result<()> {
    let file = DomainFile {
        graph: GraphRef::Inline(graph_to_file(dom.graph())),
        interior: dom.interior().to_vec(),
        generator: spec.cloned(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// One CSV row per configuration, fixed column order.
pub fn report_csv(report: &RatioReport) -> String {
    let mut out = String::from(
        "id,Z,X,Y,EL,Z_dual,Y_dual,EL_dual,EL_dual_network,checks,failures,error\n",
    );
    for cfg in &report.configs {
        let inv = cfg.invariants.as_ref();
        let field = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let failures = cfg.rows.iter().filter(|r| !r.pass).count();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            cfg.id,
            field(inv.map(|i| i.z)),
            field(inv.map(|i| i.x)),
            field(inv.map(|i| i.y)),
            field(inv.map(|i| i.el)),
            field(inv.map(|i| i.z_dual)),
            field(inv.map(|i| i.y_dual)),
            field(inv.map(|i| i.el_dual)),
            field(inv.map(|i| i.el_dual_network)),
            cfg.rows.len(),
            failures,
            cfg.error.clone().unwrap_or_default(),
        ));
    }
    out
}
