//! Simple undirected vertex-weighted graphs and the vertex-expansion
//! quantities defined on them.

use crate::{Denominator, Error, Result};

/// Simple undirected graph with nonnegative vertex weights.
///
/// Immutable after construction; all derived quantities are pure functions.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    vertex_weights: Vec<f64>,
    max_degree: usize,
}

impl Graph {
    /// Build from an edge list. Rejects self-loops and duplicate edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges_weighted(n, edges, vec![1.0; n])
    }

    pub fn from_edges_weighted(
        n: usize,
        edges: &[(usize, usize)],
        vertex_weights: Vec<f64>,
    ) -> Result<Self> {
        if vertex_weights.len() != n {
            return Err(Error::InvalidGraph(format!(
                "{} weights for {} vertices",
                vertex_weights.len(),
                n
            )));
        }
        if let Some(w) = vertex_weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidGraph(format!("bad vertex weight {w}")));
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph {
            n,
            adj,
            vertex_weights,
            max_degree,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Maximum degree d.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn vertex_weight(&self, v: usize) -> f64 {
        self.vertex_weights[v]
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn total_weight(&self) -> f64 {
        self.vertex_weights.iter().sum()
    }

    /// Edges as sorted (u, v) pairs with u < v, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    pub fn is_regular(&self) -> bool {
        self.adj.iter().all(|l| l.len() == self.max_degree)
    }

    /// Line-based format: header "n m", then "u v" per edge, then optional
    /// "# weight v w" lines for non-unit vertex weights.
    pub fn to_file_string(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edge_count());
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        for v in 0..self.n {
            if self.vertex_weights[v] != 1.0 {
                s.push_str(&format!("# weight {} {}\n", v, self.vertex_weights[v]));
            }
        }
        s
    }

    pub fn from_file_string(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad header".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad header".into()))?;
        let mut edges = Vec::with_capacity(m);
        let mut weights = vec![1.0; n];
        for line in lines {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() == 3 && toks[0] == "weight" {
                    let v: usize = toks[1]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad weight line: {line}")))?;
                    let w: f64 = toks[2]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad weight line: {line}")))?;
                    if v >= n {
                        return Err(Error::Parse(format!("weight vertex {v} out of range")));
                    }
                    weights[v] = w;
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line}")))?;
            let v: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line}")))?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header promises {m} edges, found {}",
                edges.len()
            )));
        }
        Self::from_edges_weighted(n, &edges, weights)
    }
}

/// A vertex subset stored as a bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutSet {
    words: Vec<u64>,
    n: usize,
}

impl CutSet {
    pub fn empty(n: usize) -> Self {
        CutSet {
            words: vec![0; n.div_ceil(64)],
            n,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut s = Self::empty(n);
        for &v in indices {
            assert!(v < n, "index {v} out of range for CutSet of size {n}");
            s.insert(v);
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn complement(&self) -> CutSet {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        // mask off the tail beyond n
        let tail = self.n % 64;
        if tail != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        out
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.contains(v)).collect()
    }

    pub fn union(&self, other: &CutSet) -> CutSet {
        assert_eq!(self.n, other.n);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        CutSet { words, n: self.n }
    }

    pub fn intersect(&self, other: &CutSet) -> CutSet {
        assert_eq!(self.n, other.n);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        CutSet { words, n: self.n }
    }

    pub fn minus(&self, other: &CutSet) -> CutSet {
        assert_eq!(self.n, other.n);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & !b)
            .collect();
        CutSet { words, n: self.n }
    }
}

/// Vertex boundary of S: the vertices of S^c with a neighbor in S.
pub fn vertex_boundary(g: &Graph, s: &CutSet) -> CutSet {
    assert_eq!(s.n(), g.n(), "cut set size mismatch");
    let mut out = CutSet::empty(g.n());
    for v in 0..g.n() {
        if s.contains(v) {
            for &u in g.neighbors(v) {
                if !s.contains(u) {
                    out.insert(u);
                }
            }
        }
    }
    out
}

/// Weight of a vertex set under the graph's vertex weights.
pub fn set_weight(g: &Graph, s: &CutSet) -> f64 {
    (0..g.n()).filter(|&v| s.contains(v)).map(|v| g.vertex_weight(v)).sum()
}

/// Vertex expansion of S: boundary count divided per the chosen convention.
///
/// Unweighted counts, matching the introduction's definition; the two
/// conventions agree whenever |S| <= n/2.
pub fn vertex_expansion(g: &Graph, s: &CutSet, convention: Denominator) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::DegenerateDenominator("empty S".into()));
    }
    let boundary = vertex_boundary(g, s).len() as f64;
    let denom = match convention {
        Denominator::SetSize => s.len() as f64,
        Denominator::MinSide => {
            let c = g.n() - s.len();
            if c == 0 {
                return Err(Error::DegenerateDenominator("S = V with min-side".into()));
            }
            s.len().min(c) as f64
        }
    };
    Ok(boundary / denom)
}

/// Symmetric vertex boundary of S: vertices straddling the cut on either side,
/// i.e. boundary(S) union boundary(S^c).
pub fn symmetric_vertex_boundary(g: &Graph, s: &CutSet) -> CutSet {
    vertex_boundary(g, s).union(&vertex_boundary(g, &s.complement()))
}

/// Symmetric vertex expansion: weighted symmetric boundary over w(S).
pub fn symmetric_vertex_expansion(g: &Graph, s: &CutSet) -> Result<f64> {
    let ws = set_weight(g, s);
    if ws <= 0.0 {
        return Err(Error::ZeroWeightSide);
    }
    Ok(set_weight(g, &symmetric_vertex_boundary(g, s)) / ws)
}

/// Edge expansion |E(S, S^c)| / |S| (unweighted); used for the degree
/// sandwich phi^V <= phi^E <= d * phi^V.
pub fn edge_expansion(g: &Graph, s: &CutSet, convention: Denominator) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::DegenerateDenominator("empty S".into()));
    }
    let mut crossing = 0usize;
    for v in 0..g.n() {
        if s.contains(v) {
            crossing += g.neighbors(v).iter().filter(|&&u| !s.contains(u)).count();
        }
    }
    let denom = match convention {
        Denominator::SetSize => s.len() as f64,
        Denominator::MinSide => {
            let c = g.n() - s.len();
            if c == 0 {
                return Err(Error::DegenerateDenominator("S = V with min-side".into()));
            }
            s.len().min(c) as f64
        }
    };
    Ok(crossing as f64 / denom)
}
