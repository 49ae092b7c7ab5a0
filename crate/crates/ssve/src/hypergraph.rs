//! Weighted hypergraphs and hyperedge expansion.

use serde::{Deserialize, Serialize};

use crate::graph::CutSet;
use crate::{Denominator, Error, Result};

/// Volume convention for hyperedge expansion denominators: the definition in
/// Eq. (2) uses degree volume, but the algorithm's accounting divides by the
/// vertex weight W(S). Reduced instances use vertex weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Volume {
    VertexWeight,
    Degree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub members: Vec<usize>,
    pub w: f64,
}

/// Hypergraph with hyperedge weights w and vertex weights W, plus the
/// optional one-to-one hyperedge->vertex map pi produced by the reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHypergraph {
    vertex_weights: Vec<f64>,
    edges: Vec<Hyperedge>,
    /// pi[e] = the vertex assigned to hyperedge e; present for reduced instances.
    pi: Option<Vec<usize>>,
    /// incident hyperedge ids per vertex
    incidence: Vec<Vec<usize>>,
    arity: usize,
}

impl WeightedHypergraph {
    pub fn new(
        vertex_weights: Vec<f64>,
        edges: Vec<Hyperedge>,
        pi: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = vertex_weights.len();
        if let Some(w) = vertex_weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidHypergraph(format!("bad vertex weight {w}")));
        }
        let mut incidence = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            if e.members.is_empty() {
                return Err(Error::InvalidHypergraph(format!("hyperedge {idx} empty")));
            }
            if !e.w.is_finite() || e.w < 0.0 {
                return Err(Error::InvalidHypergraph(format!("bad edge weight {}", e.w)));
            }
            let mut sorted = e.members.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != e.members.len() {
                return Err(Error::InvalidHypergraph(format!(
                    "hyperedge {idx} repeats a vertex"
                )));
            }
            for &v in &sorted {
                if v >= n {
                    return Err(Error::InvalidHypergraph(format!(
                        "hyperedge {idx} member {v} out of range"
                    )));
                }
                incidence[v].push(idx);
            }
        }
        if let Some(pi) = &pi {
            if pi.len() != edges.len() {
                return Err(Error::InvalidHypergraph("pi length mismatch".into()));
            }
            let mut seen = std::collections::HashSet::new();
            for (e, &v) in pi.iter().enumerate() {
                if !edges[e].members.contains(&v) {
                    return Err(Error::InvalidHypergraph(format!(
                        "pi({e}) = {v} not a member of the hyperedge"
                    )));
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidHypergraph(format!("pi not injective at {v}")));
                }
            }
        }
        let arity = edges.iter().map(|e| e.members.len()).max().unwrap_or(0);
        Ok(WeightedHypergraph {
            vertex_weights,
            edges,
            pi,
            incidence,
            arity,
        })
    }

    pub fn n(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn pi(&self) -> Option<&[usize]> {
        self.pi.as_deref()
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Max hyperedge size.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Max number of hyperedges meeting a vertex.
    pub fn max_vertex_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn vertex_weight(&self, v: usize) -> f64 {
        self.vertex_weights[v]
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn total_vertex_weight(&self) -> f64 {
        self.vertex_weights.iter().sum()
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn set_weight(&self, s: &CutSet) -> f64 {
        (0..self.n())
            .filter(|&v| s.contains(v))
            .map(|v| self.vertex_weights[v])
            .sum()
    }

    /// Degree volume: sum over v in S of sum of w(e) over incident e.
    pub fn degree_volume(&self, s: &CutSet) -> f64 {
        (0..self.n())
            .filter(|&v| s.contains(v))
            .map(|v| self.incidence[v].iter().map(|&e| self.edges[e].w).sum::<f64>())
            .sum()
    }

    /// Is hyperedge e cut by S (members on both sides)?
    pub fn is_cut(&self, e: usize, s: &CutSet) -> bool {
        let members = &self.edges[e].members;
        let inside = members.iter().any(|&v| s.contains(v));
        let outside = members.iter().any(|&v| !s.contains(v));
        inside && outside
    }

    /// Total weight of hyperedges straddling (S, S^c).
    pub fn boundary_weight(&self, s: &CutSet) -> f64 {
        (0..self.edges.len())
            .filter(|&e| self.is_cut(e, s))
            .map(|e| self.edges[e].w)
            .sum()
    }

    pub fn to_json(&self) -> String {
        let doc = HypergraphDoc {
            vertices: (0..self.n())
                .map(|id| VertexDoc {
                    id,
                    weight: self.vertex_weights[id],
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| EdgeDoc {
                    members: e.members.clone(),
                    w: e.w,
                    pi: self.pi.as_ref().map(|p| p[i]),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("hypergraph serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: HypergraphDoc = serde_json::from_str(text)?;
        let n = doc.vertices.len();
        let mut weights = vec![1.0; n];
        for v in &doc.vertices {
            if v.id >= n {
                return Err(Error::Parse(format!("vertex id {} out of range", v.id)));
            }
            weights[v.id] = v.weight;
        }
        let has_pi = doc.edges.iter().all(|e| e.pi.is_some()) && !doc.edges.is_empty();
        let pi = if has_pi {
            Some(doc.edges.iter().map(|e| e.pi.unwrap()).collect())
        } else {
            None
        };
        let edges = doc
            .edges
            .into_iter()
            .map(|e| Hyperedge {
                members: e.members,
                w: e.w,
            })
            .collect();
        Self::new(weights, edges, pi)
    }
}

#[derive(Serialize, Deserialize)]
struct HypergraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
struct VertexDoc {
    id: usize,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    members: Vec<usize>,
    w: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pi: Option<usize>,
}

/// Hyperedge expansion of S: cut hyperedge weight over the chosen volume of
/// the chosen side.
pub fn hyperedge_expansion(
    h: &WeightedHypergraph,
    s: &CutSet,
    volume: Volume,
    convention: Denominator,
) -> Result<f64> {
    let vol = |set: &CutSet| match volume {
        Volume::VertexWeight => h.set_weight(set),
        Volume::Degree => h.degree_volume(set),
    };
    let vs = vol(s);
    let denom = match convention {
        Denominator::SetSize => vs,
        Denominator::MinSide => vs.min(vol(&s.complement())),
    };
    if denom <= 0.0 {
        return Err(Error::ZeroWeightSide);
    }
    Ok(h.boundary_weight(s) / denom)
}
