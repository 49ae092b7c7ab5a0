//! Instance generators: random graphs, the exhaustive connected-graph corpus
//! (up to isomorphism) used by the acceptance suite, planted low-expansion
//! instances, and the small hardcoded expanders for degree reduction.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::gaussian::stream_rng;
use crate::graph::{CutSet, Graph};

/// Erdos-Renyi graph, deterministic per seed.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = stream_rng(seed, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("generated edges are simple")
}

/// Connected Erdos-Renyi graph: draws until connected, then gives up and
/// patches components together with a deterministic spanning chain.
pub fn random_connected_graph(n: usize, p: f64, seed: u64) -> Graph {
    for attempt in 0..50 {
        let g = random_graph(n, p, seed.wrapping_add(attempt).wrapping_mul(0x9e3779b97f4a7c15));
        if g.is_connected() {
            return g;
        }
    }
    // patch: add a chain through component representatives
    let g = random_graph(n, p, seed);
    let mut edges = g.edges();
    let mut comp = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        reps.push(start);
        let mut stack = vec![start];
        comp[start] = start;
        while let Some(u) = stack.pop() {
            for &v in g.neighbors(u) {
                if comp[v] == usize::MAX {
                    comp[v] = start;
                    stack.push(v);
                }
            }
        }
    }
    for w in reps.windows(2) {
        edges.push((w[0], w[1]));
    }
    Graph::from_edges(n, &edges).expect("patched edges are simple")
}

/// Random graph with vertex weights drawn from {0.5, 1.0, 1.5, 2.0, 3.0}.
pub fn random_weighted_graph(n: usize, p: f64, seed: u64) -> Graph {
    let g = random_graph(n, p, seed);
    let mut rng = stream_rng(seed, 1);
    let choices = [0.5, 1.0, 1.5, 2.0, 3.0];
    let weights = (0..n).map(|_| *choices.choose(&mut rng).unwrap()).collect();
    Graph::from_edges_weighted(n, &g.edges(), weights).unwrap()
}

fn edge_bit(n: usize, u: usize, v: usize) -> usize {
    // lexicographic index of the pair (u,v), u < v
    let (u, v) = (u.min(v), u.max(v));
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

fn mask_degrees(n: usize, mask: u32) -> Vec<usize> {
    let mut deg = vec![0usize; n];
    for u in 0..n {
        for v in (u + 1)..n {
            if mask >> edge_bit(n, u, v) & 1 == 1 {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
    }
    deg
}

fn mask_connected(n: usize, mask: u32) -> bool {
    let mut adj = vec![0u32; n];
    for u in 0..n {
        for v in (u + 1)..n {
            if mask >> edge_bit(n, u, v) & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
    }
    let mut seen: u32 = 1;
    let mut frontier: u32 = 1;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let u = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[u] & !seen;
        }
        seen |= next;
        frontier = next;
    }
    seen.count_ones() as usize == n
}

/// Backtracking isomorphism test on adjacency masks, degree-pruned.
fn masks_isomorphic(n: usize, a: u32, b: u32) -> bool {
    if a.count_ones() != b.count_ones() {
        return false;
    }
    let build = |mask: u32| {
        let mut adj = vec![0u32; n];
        for u in 0..n {
            for v in (u + 1)..n {
                if mask >> edge_bit(n, u, v) & 1 == 1 {
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                }
            }
        }
        adj
    };
    let adj_a = build(a);
    let adj_b = build(b);
    let deg_a: Vec<usize> = adj_a.iter().map(|m| m.count_ones() as usize).collect();
    let deg_b: Vec<usize> = adj_b.iter().map(|m| m.count_ones() as usize).collect();
    {
        let mut sa = deg_a.clone();
        let mut sb = deg_b.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return false;
        }
    }
    // map vertices of `a` in order; image[] holds the chosen b-vertex
    fn rec(
        u: usize,
        n: usize,
        adj_a: &[u32],
        adj_b: &[u32],
        deg_a: &[usize],
        deg_b: &[usize],
        image: &mut Vec<usize>,
        used: &mut u32,
    ) -> bool {
        if u == n {
            return true;
        }
        for cand in 0..n {
            if *used >> cand & 1 == 1 || deg_a[u] != deg_b[cand] {
                continue;
            }
            // adjacency with already-mapped vertices must agree
            let ok = (0..u).all(|w| {
                let a_edge = adj_a[u] >> w & 1 == 1;
                let b_edge = adj_b[cand] >> image[w] & 1 == 1;
                a_edge == b_edge
            });
            if ok {
                image.push(cand);
                *used |= 1 << cand;
                if rec(u + 1, n, adj_a, adj_b, deg_a, deg_b, image, used) {
                    return true;
                }
                image.pop();
                *used &= !(1 << cand);
            }
        }
        false
    }
    rec(0, n, &adj_a, &adj_b, &deg_a, &deg_b, &mut Vec::new(), &mut 0)
}

fn invariant_key(n: usize, mask: u32) -> u64 {
    let deg = mask_degrees(n, mask);
    let mut adj = vec![0u32; n];
    for u in 0..n {
        for v in (u + 1)..n {
            if mask >> edge_bit(n, u, v) & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
    }
    // per-vertex signature: (degree, sorted neighbor degrees, triangles at v)
    let mut sigs: Vec<u64> = (0..n)
        .map(|u| {
            let mut nd: Vec<usize> = (0..n)
                .filter(|&v| adj[u] >> v & 1 == 1)
                .map(|v| deg[v])
                .collect();
            nd.sort_unstable();
            let mut tri = 0u64;
            for v in 0..n {
                if adj[u] >> v & 1 == 1 {
                    tri += (adj[u] & adj[v]).count_ones() as u64;
                }
            }
            let mut h = 1469598103934665603u64 ^ deg[u] as u64;
            for d in nd {
                h = h.wrapping_mul(1099511628211) ^ d as u64;
            }
            h.wrapping_mul(1099511628211) ^ tri
        })
        .collect();
    sigs.sort_unstable();
    let mut h = 14695981039346656037u64 ^ mask.count_ones() as u64;
    for s in sigs {
        h = h.wrapping_mul(1099511628211) ^ s;
    }
    h
}

/// All connected graphs on exactly n vertices, one representative per
/// isomorphism class. Counts match the known sequence 1, 1, 2, 6, 21, 112, 853
/// for n = 1..7.
pub fn connected_graphs_upto_iso(n: usize) -> Vec<Graph> {
    assert!(n >= 1 && n <= 7, "corpus enumeration supports n <= 7");
    if n == 1 {
        return vec![Graph::from_edges(1, &[]).unwrap()];
    }
    let bits = n * (n - 1) / 2;
    let mut buckets: std::collections::HashMap<u64, Vec<u32>> = std::collections::HashMap::new();
    let mut reps: Vec<u32> = Vec::new();
    for mask in 0..(1u32 << bits) {
        if (mask.count_ones() as usize) < n - 1 || !mask_connected(n, mask) {
            continue;
        }
        let key = invariant_key(n, mask);
        let bucket = buckets.entry(key).or_default();
        if !bucket.iter().any(|&r| masks_isomorphic(n, mask, r)) {
            bucket.push(mask);
            reps.push(mask);
        }
    }
    reps.sort_unstable();
    reps.iter()
        .map(|&mask| {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if mask >> edge_bit(n, u, v) & 1 == 1 {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
        .collect()
}

/// A planted low-vertex-expansion instance: a well-connected planted set of
/// size k attached to the rest of the graph through `boundary` outside
/// vertices, the remainder wired as a moderate-degree connected graph.
/// Returns the graph and the planted set; phi^V(planted) = boundary / k.
pub fn planted_instance(
    n: usize,
    k: usize,
    boundary: usize,
    max_degree: usize,
    seed: u64,
) -> (Graph, CutSet) {
    assert!(k >= 3 && k < n && boundary <= n - k && max_degree >= 4);
    let mut rng: ChaCha12Rng = stream_rng(seed, 2);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut deg = vec![0usize; n];
    let add = |edges: &mut Vec<(usize, usize)>, deg: &mut Vec<usize>, u: usize, v: usize| {
        if u != v && !edges.contains(&(u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
            deg[u] += 1;
            deg[v] += 1;
            true
        } else {
            false
        }
    };
    // planted ring 0..k plus chords, degree capped one below max to leave
    // room for the attachment edges
    for i in 0..k {
        add(&mut edges, &mut deg, i, (i + 1) % k);
    }
    for _ in 0..k {
        let u = rng.gen_range(0..k);
        let v = rng.gen_range(0..k);
        if deg[u] < max_degree - 1 && deg[v] < max_degree - 1 {
            add(&mut edges, &mut deg, u, v);
        }
    }
    // outside ring k..n plus chords
    let m = n - k;
    for i in 0..m {
        add(&mut edges, &mut deg, k + i, k + (i + 1) % m);
    }
    for _ in 0..2 * m {
        let u = k + rng.gen_range(0..m);
        let v = k + rng.gen_range(0..m);
        if deg[u] < max_degree - 1 && deg[v] < max_degree - 1 {
            add(&mut edges, &mut deg, u, v);
        }
    }
    // attachment: `boundary` distinct outside vertices, one edge each into
    // distinct planted vertices
    for b in 0..boundary {
        let outside = k + b * (m / boundary.max(1)) % m;
        let inside = b % k;
        add(&mut edges, &mut deg, inside, outside);
    }
    let g = Graph::from_edges(n, &edges).expect("planted construction is simple");
    (g, CutSet::from_indices(n, &(0..k).collect::<Vec<_>>()))
}

/// Complete graph K_d ((d-1)-regular).
pub fn complete_graph(d: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..d {
        for v in (u + 1)..d {
            edges.push((u, v));
        }
    }
    Graph::from_edges(d, &edges).unwrap()
}

/// Cycle C_d (2-regular).
pub fn cycle_graph(d: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..d).map(|i| (i, (i + 1) % d)).collect();
    Graph::from_edges(d, &edges).unwrap()
}

/// Circulant graph on d vertices with the given offsets; regular of degree
/// 2*|offsets| (one less per offset equal to d/2).
pub fn circulant_graph(d: usize, offsets: &[usize]) -> Graph {
    let mut edges = std::collections::BTreeSet::new();
    for i in 0..d {
        for &o in offsets {
            let j = (i + o) % d;
            if i != j {
                edges.insert((i.min(j), i.max(j)));
            }
        }
    }
    Graph::from_edges(d, &edges.into_iter().collect::<Vec<_>>()).unwrap()
}

/// Hardcoded expander on d <= 16 vertices for the replacement product:
/// complete graph for small d, a circulant otherwise.
pub fn default_expander(d: usize) -> Graph {
    assert!(d >= 2 && d <= 16, "hardcoded expanders cover d <= 16");
    if d <= 5 {
        complete_graph(d)
    } else {
        circulant_graph(d, &[1, 2])
    }
}
