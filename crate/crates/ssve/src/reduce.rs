//! Instance transformations: vertex expansion -> hypergraph expansion, the
//! rollback that converts a good hypergraph cut back into a vertex cut, gap
//! instance generators, and the replacement-product degree reducer.

use crate::gaussian::stream_rng;
use crate::graph::{self, CutSet, Graph};
use crate::hypergraph::{Hyperedge, WeightedHypergraph};
use crate::pd::VectorSolution;
use crate::{Denominator, Error, Result};

/// A graph together with its two-step transformation into a weighted
/// hypergraph: first a bipartite graph over V u E with edge-vertices of
/// weight zero, then one hyperedge per vertex closing off its neighborhood.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub g: Graph,
    pub g_sym: Graph,
    pub h: WeightedHypergraph,
    /// number of original vertices; ids below this are originals, the rest
    /// are edge-vertices in the order of `edge_of`
    pub n_orig: usize,
    /// edge-vertex id - n_orig -> original endpoints
    pub edge_of: Vec<(usize, usize)>,
}

/// Bipartite blow-up: keep every vertex with its weight, add a weight-zero
/// vertex in the middle of every edge. The maximum degree of the originals is
/// unchanged; edge-vertices have degree 2.
pub fn vertex_to_symmetric(g: &Graph) -> (Graph, Vec<(usize, usize)>) {
    let n = g.n();
    let edge_of = g.edges();
    let m = edge_of.len();
    let mut weights = Vec::with_capacity(n + m);
    weights.extend_from_slice(g.vertex_weights());
    weights.extend(std::iter::repeat(0.0).take(m));
    let mut edges = Vec::with_capacity(2 * m);
    for (idx, &(u, v)) in edge_of.iter().enumerate() {
        edges.push((u, n + idx));
        edges.push((v, n + idx));
    }
    let g_sym = Graph::from_edges_weighted(n + m, &edges, weights)
        .expect("blow-up of a valid graph is valid");
    (g_sym, edge_of)
}

/// One hyperedge {v} u N(v) per vertex, weighted by the vertex weight; the
/// correspondence pi(e_v) = v is recorded. Vertex weights carry over, so for
/// every subset S the hyperedge expansion equals the symmetric vertex
/// expansion of S in the source graph.
pub fn symmetric_to_hypergraph(g_sym: &Graph) -> WeightedHypergraph {
    let n = g_sym.n();
    let mut edges = Vec::with_capacity(n);
    let mut pi = Vec::with_capacity(n);
    for v in 0..n {
        let mut members = vec![v];
        members.extend_from_slice(g_sym.neighbors(v));
        members.sort_unstable();
        edges.push(Hyperedge {
            members,
            w: g_sym.vertex_weight(v),
        });
        pi.push(v);
    }
    WeightedHypergraph::new(g_sym.vertex_weights().to_vec(), edges, Some(pi))
        .expect("neighborhood closure of a valid graph is valid")
}

pub fn ssve_to_hsse(g: &Graph) -> ReducedInstance {
    let (g_sym, edge_of) = vertex_to_symmetric(g);
    let h = symmetric_to_hypergraph(&g_sym);
    ReducedInstance {
        g: g.clone(),
        g_sym,
        h,
        n_orig: g.n(),
        edge_of,
    }
}

/// Canonical low-expansion image of a vertex set: S itself plus every
/// edge-vertex with an endpoint in S.
pub fn completeness_image(red: &ReducedInstance, s: &CutSet) -> CutSet {
    let mut img = CutSet::empty(red.g_sym.n());
    for v in s.indices() {
        img.insert(v);
    }
    for (idx, &(u, v)) in red.edge_of.iter().enumerate() {
        if s.contains(u) || s.contains(v) {
            img.insert(red.n_orig + idx);
        }
    }
    img
}

/// Convert a low-expansion hypergraph cut back into a vertex set of the
/// source graph: drop every vertex with a neighbor across the cut, then keep
/// the originals. With eps = hyperedge expansion of S and delta' =
/// w(S)/w(V), the result has size in [(1-eps) delta' n, delta' n] and vertex
/// expansion at most 2 eps; both bounds are checked.
pub fn rollback_set(red: &ReducedInstance, s: &CutSet, eps_prime: f64) -> Result<CutSet> {
    let w_s = graph::set_weight(&red.g_sym, s);
    if w_s <= 0.0 {
        return Err(Error::RollbackPrecondition(
            "cut has zero weight".to_string(),
        ));
    }
    let observed = graph::symmetric_vertex_expansion(&red.g_sym, s)?;
    if observed > eps_prime + 1e-12 {
        return Err(Error::RollbackPrecondition(format!(
            "cut expands by {observed}, above the stated {eps_prime}"
        )));
    }
    let interior = graph::vertex_boundary(&red.g_sym, &s.complement());
    let trimmed = s.minus(&interior);
    let mut s_g = CutSet::empty(red.n_orig);
    for v in trimmed.indices() {
        if v < red.n_orig {
            s_g.insert(v);
        }
    }
    if s_g.is_empty() {
        // The trimming only exists to certify the expansion bound; on
        // high-expansion inputs it can erase every original vertex. Fall
        // back to the untrimmed originals, which still face the same size
        // and expansion checks below.
        for v in s.indices() {
            if v < red.n_orig {
                s_g.insert(v);
            }
        }
    }
    if s_g.is_empty() {
        return Err(Error::RollbackGuarantee(
            "the cut contains no original vertices".to_string(),
        ));
    }
    let delta_n = w_s; // original vertices have unit weight in reduced instances
    let size = s_g.len() as f64;
    if size < (1.0 - eps_prime) * delta_n - 1e-9 || size > delta_n + 1e-9 {
        return Err(Error::RollbackGuarantee(format!(
            "size {size} outside [{}, {delta_n}]",
            (1.0 - eps_prime) * delta_n
        )));
    }
    let phi = graph::vertex_expansion(&red.g, &s_g, Denominator::SetSize)?;
    if phi > 2.0 * eps_prime + 1e-9 {
        return Err(Error::RollbackGuarantee(format!(
            "expansion {phi} above 2*{eps_prime}"
        )));
    }
    Ok(s_g)
}

/// Single d-hyperedge instance together with the vector assignment that gives
/// the relaxation a value of 1/d at delta = 1/d while every feasible set cuts
/// the edge: u_i = delta phibar + sqrt(delta - delta^2) zhat_i with the
/// zhat_i pairwise orthogonal.
pub fn gap_single_edge(d: usize) -> (WeightedHypergraph, VectorSolution) {
    assert!(d >= 2);
    let h = WeightedHypergraph::new(
        vec![1.0; d],
        vec![Hyperedge {
            members: (0..d).collect(),
            w: 1.0,
        }],
        None,
    )
    .expect("single hyperedge is valid");
    let delta = 1.0 / d as f64;
    let spread = (delta - delta * delta).sqrt();
    let mut phibar = vec![0.0; d + 1];
    phibar[0] = 1.0;
    let vs = (0..d)
        .map(|i| {
            // v_i = phibar - 2 u_i
            let mut v = vec![0.0; d + 1];
            v[0] = 1.0 - 2.0 * delta;
            v[i + 1] = -2.0 * spread;
            v
        })
        .collect();
    (h, VectorSolution::from_vectors(phibar, vs))
}

/// d-uniform random hypergraph with r = ceil(C n log2(d)) uniform d-subsets,
/// unit weights; at delta = 1/d every small set cuts a constant fraction of
/// the hyperedges with high probability.
pub fn random_gap_hypergraph(d: usize, n: usize, c: f64, seed: u64) -> Result<WeightedHypergraph> {
    if d < 2 || n < d {
        return Err(Error::InvalidHypergraph(format!(
            "need n >= d >= 2, got d={d} n={n}"
        )));
    }
    let r = (c * n as f64 * (d as f64).log2()).ceil() as usize;
    let mut rng = stream_rng(seed, 0x6A9);
    let mut edges = Vec::with_capacity(r);
    for _ in 0..r {
        let mut members: Vec<usize> = rand::seq::index::sample(&mut rng, n, d).into_vec();
        members.sort_unstable();
        edges.push(Hyperedge { members, w: 1.0 });
    }
    WeightedHypergraph::new(vec![1.0; n], edges, None)
}

/// Replacement product: blow each vertex of a d-regular graph up into a copy
/// of a g-regular expander on d vertices (the cloud), and route each original
/// edge between the unique ports the endpoints reserve for each other. The
/// port a vertex reserves for a neighbor is the neighbor's position in its
/// sorted adjacency list.
pub fn replacement_product(g: &Graph, h_exp: &Graph) -> Result<Graph> {
    if !g.is_regular() {
        return Err(Error::InvalidGraph("base graph is not regular".to_string()));
    }
    if !h_exp.is_regular() {
        return Err(Error::InvalidGraph("cloud graph is not regular".to_string()));
    }
    let d = g.max_degree();
    if h_exp.n() != d {
        return Err(Error::InvalidGraph(format!(
            "cloud graph has {} vertices, need the base degree {d}",
            h_exp.n()
        )));
    }
    let n = g.n();
    let mut edges = Vec::new();
    for v in 0..n {
        for (a, b) in h_exp.edges() {
            edges.push((v * d + a, v * d + b));
        }
    }
    for (u, v) in g.edges() {
        let pu = g.neighbors(u).binary_search(&v).expect("adjacency sorted");
        let pv = g.neighbors(v).binary_search(&u).expect("adjacency sorted");
        edges.push((u * d + pu, v * d + pv));
    }
    Graph::from_edges(n * d, &edges)
}

/// All cloud copies of the vertices in S.
pub fn lift_cloud_set(g: &Graph, s: &CutSet) -> CutSet {
    let d = g.max_degree();
    let mut lifted = CutSet::empty(g.n() * d);
    for v in s.indices() {
        for p in 0..d {
            lifted.insert(v * d + p);
        }
    }
    lifted
}
