//! Exact brute-force optima for small instances; the ground truth every
//! approximation result is measured against.

use crate::graph::{CutSet, Graph};
use crate::hypergraph::WeightedHypergraph;
use crate::reduce::{completeness_image, ReducedInstance};
use crate::{Denominator, Error, Result};

const MAX_SSVE_N: usize = 24;
const MAX_HSSE_N: usize = 20;

/// Visit all k-subsets of 0..n in lexicographic order of their index lists.
fn for_each_ksubset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    assert!(k >= 1 && k <= n);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact minimum vertex expansion over all sets of size round(delta n).
/// Deterministic tie-break: the lexicographically smallest argmin.
pub fn exact_ssve(g: &Graph, delta: f64, convention: Denominator) -> Result<(f64, CutSet)> {
    let n = g.n();
    if n > MAX_SSVE_N {
        return Err(Error::OracleScale(format!(
            "{n} vertices exceeds the enumeration cap {MAX_SSVE_N}"
        )));
    }
    let k = (delta * n as f64).round() as usize;
    if k == 0 || k > n {
        return Err(Error::DegenerateDenominator(format!(
            "target size round({delta} * {n}) = {k}"
        )));
    }
    if k == n && convention == Denominator::MinSide {
        return Err(Error::DegenerateDenominator("S = V with min-side".into()));
    }
    let nb_mask: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let weights = g.vertex_weights();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_ksubset(n, k, |idx| {
        let mut s_mask = 0u32;
        let mut nb = 0u32;
        let mut w_s = 0.0;
        for &v in idx {
            s_mask |= 1 << v;
            nb |= nb_mask[v];
            w_s += weights[v];
        }
        let mut boundary = nb & !s_mask;
        let mut w_b = 0.0;
        while boundary != 0 {
            let v = boundary.trailing_zeros() as usize;
            boundary &= boundary - 1;
            w_b += weights[v];
        }
        let denom = match convention {
            Denominator::SetSize => w_s,
            Denominator::MinSide => w_s.min(g.total_weight() - w_s),
        };
        if denom <= 0.0 {
            return;
        }
        let value = w_b / denom;
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, idx.to_vec()));
        }
    });
    let (value, idx) =
        best.ok_or_else(|| Error::DegenerateDenominator("no set with positive weight".into()))?;
    Ok((value, CutSet::from_indices(n, &idx)))
}

/// Exact minimum hyperedge expansion over all subsets whose vertex weight is
/// within weight_tol of delta * W(V). The sweep walks subsets in Gray-code
/// order with incremental cut bookkeeping; the first strict minimum in that
/// fixed order is the reported argmin.
pub fn exact_hsse(
    h: &WeightedHypergraph,
    delta: f64,
    weight_tol: Option<f64>,
    convention: Denominator,
) -> Result<(f64, CutSet)> {
    let n = h.n();
    if n > MAX_HSSE_N {
        return Err(Error::OracleScale(format!(
            "{n} vertices exceeds the sweep cap {MAX_HSSE_N}"
        )));
    }
    let tol = weight_tol.unwrap_or_else(|| {
        h.vertex_weights()
            .iter()
            .cloned()
            .filter(|&w| w > 0.0)
            .fold(f64::INFINITY, f64::min)
            / 2.0
    });
    let w_total = h.total_vertex_weight();
    let target = delta * w_total;
    let edges = h.edges();
    let mut inside: Vec<usize> = vec![0; edges.len()];
    let mut cut_weight = 0.0;
    let mut w_s = 0.0;
    let mut members = 0usize;
    let mut current = 0u32;
    let mut best: Option<(f64, u32)> = None;
    let mut feasible = false;
    for step in 1u64..(1 << n) {
        let v = step.trailing_zeros() as usize;
        let entering = current >> v & 1 == 0;
        current ^= 1 << v;
        if entering {
            w_s += h.vertex_weight(v);
            members += 1;
        } else {
            w_s -= h.vertex_weight(v);
            members -= 1;
        }
        for &e in h.incident_edges(v) {
            let size = edges[e].members.len();
            let was_cut = inside[e] > 0 && inside[e] < size;
            if entering {
                inside[e] += 1;
            } else {
                inside[e] -= 1;
            }
            let is_cut = inside[e] > 0 && inside[e] < size;
            if is_cut != was_cut {
                cut_weight += if is_cut { edges[e].w } else { -edges[e].w };
            }
        }
        if (w_s - target).abs() > tol || members == n {
            continue;
        }
        let denom = match convention {
            Denominator::SetSize => w_s,
            Denominator::MinSide => w_s.min(w_total - w_s),
        };
        if denom <= 0.0 {
            continue;
        }
        feasible = true;
        let value = cut_weight.max(0.0) / denom;
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, current));
        }
    }
    if !feasible {
        return Err(Error::InfeasibleWeightTarget { delta, tol });
    }
    let (value, mask) = best.unwrap();
    let idx: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    Ok((value, CutSet::from_indices(n, &idx)))
}

/// Exact minimum, over all k-subsets S of the original vertices, of the
/// hyperedge boundary weight of S's canonical image divided by k. Every such
/// image is feasible for the relaxation, so this upper-bounds its optimum.
pub fn exact_reduced_hsse(red: &ReducedInstance, k: usize) -> Result<(f64, CutSet)> {
    let n = red.n_orig;
    if n > MAX_SSVE_N {
        return Err(Error::OracleScale(format!(
            "{n} original vertices exceeds the enumeration cap {MAX_SSVE_N}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::DegenerateDenominator(format!("target size {k}")));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_ksubset(n, k, |idx| {
        let s = CutSet::from_indices(n, idx);
        let img = completeness_image(red, &s);
        let value = red.h.boundary_weight(&img) / k as f64;
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, idx.to_vec()));
        }
    });
    let (value, idx) = best.unwrap();
    Ok((value, CutSet::from_indices(n, &idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_graph, cycle_graph, random_graph};
    use crate::graph;
    use crate::hypergraph::Hyperedge;
    use crate::reduce::{gap_single_edge, ssve_to_hsse};

    #[test]
    fn two_disjoint_cliques() {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((i, j));
                edges.push((i + 4, j + 4));
            }
        }
        let g = Graph::from_edges(8, &edges).unwrap();
        let (value, s) = exact_ssve(&g, 0.5, Denominator::SetSize).unwrap();
        assert_eq!(value, 0.0);
        assert_eq!(s.indices(), vec![0, 1, 2, 3]); // lexicographic tie-break
    }

    #[test]
    fn cycle_six_third() {
        let g = cycle_graph(6);
        let (value, s) = exact_ssve(&g, 1.0 / 3.0, Denominator::SetSize).unwrap();
        assert_eq!(value, 1.0); // adjacent pair: two boundary vertices
        assert_eq!(s.len(), 2);
        let re = graph::vertex_expansion(&g, &s, Denominator::SetSize).unwrap();
        assert_eq!(re, value);
    }

    #[test]
    fn clique_five_pairs() {
        let g = complete_graph(5);
        let (value, _) = exact_ssve(&g, 0.4, Denominator::SetSize).unwrap();
        assert_eq!(value, 1.5); // every pair sees the other three vertices
    }

    #[test]
    fn oracle_scale_guard() {
        let g = random_graph(25, 0.2, 0);
        assert!(matches!(
            exact_ssve(&g, 0.2, Denominator::SetSize),
            Err(Error::OracleScale(_))
        ));
    }

    #[test]
    fn isolated_vertex_never_hurts() {
        for seed in 0..10 {
            let g = random_graph(7, 0.4, seed);
            let mut edges = g.edges();
            edges.sort_unstable();
            let g_plus = Graph::from_edges(8, &edges).unwrap();
            for k in 1..=3usize {
                let d7 = k as f64 / 7.0;
                let d8 = k as f64 / 8.0;
                let (v7, _) = exact_ssve(&g, d7, Denominator::SetSize).unwrap();
                let (v8, _) = exact_ssve(&g_plus, d8, Denominator::SetSize).unwrap();
                assert!(v8 <= v7 + 1e-12, "seed {seed} k {k}: {v8} > {v7}");
            }
        }
    }

    #[test]
    fn single_gap_edge_expansion_is_one() {
        let (h, _) = gap_single_edge(4);
        let (value, s) = exact_hsse(&h, 0.25, None, Denominator::SetSize).unwrap();
        assert_eq!(value, 1.0);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn disjoint_hyperedges_aligned_delta() {
        let h = WeightedHypergraph::new(
            vec![1.0; 6],
            vec![
                Hyperedge {
                    members: vec![0, 1, 2],
                    w: 1.0,
                },
                Hyperedge {
                    members: vec![3, 4, 5],
                    w: 1.0,
                },
            ],
            None,
        )
        .unwrap();
        let (value, s) = exact_hsse(&h, 0.5, None, Denominator::SetSize).unwrap();
        assert_eq!(value, 0.0);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn infeasible_weight_window() {
        let h = WeightedHypergraph::new(
            vec![2.0, 2.0],
            vec![Hyperedge {
                members: vec![0, 1],
                w: 1.0,
            }],
            None,
        )
        .unwrap();
        // delta * W(V) = 0.8 and tol = 1, but every nonempty proper subset weighs 2
        assert!(matches!(
            exact_hsse(&h, 0.2, None, Denominator::SetSize),
            Err(Error::InfeasibleWeightTarget { .. })
        ));
    }

    #[test]
    fn reduced_clique_cross_enumeration() {
        let g = complete_graph(4);
        let red = ssve_to_hsse(&g);
        let k = 2;
        let delta = k as f64 / red.h.total_vertex_weight();
        let (full, _) = exact_hsse(&red.h, delta, None, Denominator::SetSize).unwrap();
        let (via_images, s) = exact_reduced_hsse(&red, k).unwrap();
        assert!(full <= via_images + 1e-12);
        assert!((full - via_images).abs() < 1e-12);
        assert_eq!(s.len(), k);
    }

    #[test]
    fn reduced_hsse_matches_image_evaluation() {
        for seed in 0..5 {
            let g = crate::generators::random_connected_graph(7, 0.4, seed);
            let red = ssve_to_hsse(&g);
            let (value, s) = exact_reduced_hsse(&red, 2).unwrap();
            let img = completeness_image(&red, &s);
            let direct = red.h.boundary_weight(&img) / 2.0;
            assert!((value - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn hsse_argmin_reevaluates() {
        for seed in 0..5 {
            let g = random_graph(5, 0.5, seed);
            let red = ssve_to_hsse(&g);
            if red.h.n() > 20 {
                continue;
            }
            let delta = 2.0 / red.h.total_vertex_weight();
            let (value, s) = exact_hsse(&red.h, delta, None, Denominator::SetSize).unwrap();
            let re = crate::hypergraph::hyperedge_expansion(
                &red.h,
                &s,
                crate::hypergraph::Volume::VertexWeight,
                Denominator::SetSize,
            )
            .unwrap();
            assert!((value - re).abs() < 1e-12, "seed {seed}");
        }
    }
}
