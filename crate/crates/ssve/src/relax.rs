//! The SDP relaxation of hypergraph small-set expansion.
//!
//! Variables are the moments of a degree-R pseudo-distribution over +-1
//! indicators, arranged as a moment matrix indexed by monomials (subsets of
//! size <= R/2); entries with the same symmetric difference are tied together
//! by consistency rows. Per hyperedge an epigraph scalar c_e dominates every
//! pairwise disagreement probability inside the edge, and the objective is
//! sum_e w(e) c_e / (delta W(V)). The cardinality constraint fixes the
//! expected set weight; optionally it is also enforced conditioned on each
//! single vertex (which at degree 2 is what keeps the optimizer from the
//! all-correlated solution), and pairwise local distributions are kept
//! nonnegative.

use std::collections::HashMap;

use crate::hypergraph::WeightedHypergraph;
use crate::pd::PseudoDistribution;
use crate::sdp::{self, ConicProblem, SolveStats, SparseMatrix, SQRT2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RelaxOptions {
    /// Enforce the cardinality constraint conditioned on each single vertex
    /// as well as at the root.
    pub spread_cardinality: bool,
    /// Keep all pairwise local distributions (within hyperedges) nonnegative.
    pub pair_locals: bool,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        RelaxOptions {
            spread_cardinality: true,
            pair_locals: true,
        }
    }
}

/// Options for the weakest useful relaxation: root cardinality only. This is
/// the variant the gap instances are measured against.
pub fn basic_options() -> RelaxOptions {
    RelaxOptions {
        spread_cardinality: false,
        pair_locals: true,
    }
}

#[derive(Debug, Clone)]
pub struct RelaxationProblem {
    pub delta: f64,
    pub r: usize,
    /// variable (vertex) count
    pub n: usize,
    /// moment-matrix side: monomials of degree <= R/2
    pub side: usize,
    /// unique unordered pairs appearing inside some hyperedge
    pub pair_list: Vec<(usize, usize)>,
    /// hyperedges carrying an epigraph variable (positive weight)
    pub epigraph_edges: Vec<usize>,
    pub problem: ConicProblem,
    /// representative matrix entry (row <= col) for each moment subset
    reps: HashMap<Vec<usize>, (usize, usize)>,
    /// all matrix entries per moment subset, for averaged read-back
    groups: HashMap<Vec<usize>, Vec<(usize, usize)>>,
    pub total_weight: f64,
    pub options: RelaxOptions,
}

fn monomials(n: usize, half: usize) -> Vec<Vec<usize>> {
    let mut basis = vec![Vec::new()];
    if half >= 1 {
        for i in 0..n {
            basis.push(vec![i]);
        }
    }
    if half >= 2 {
        for i in 0..n {
            for j in (i + 1)..n {
                basis.push(vec![i, j]);
            }
        }
    }
    assert!(half <= 2, "degree cap is R = 4");
    basis
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).cloned().collect();
    out.sort_unstable();
    let mut reduced = Vec::with_capacity(out.len());
    for v in out {
        if reduced.last() == Some(&v) {
            reduced.pop();
        } else {
            reduced.push(v);
        }
    }
    reduced
}

impl RelaxationProblem {
    /// Coefficient placement for reading/writing the moment of `subset`
    /// through its representative matrix entry: returns (svec column,
    /// multiplier) such that multiplier * x[column] = moment.
    fn moment_col(&self, subset: &[usize]) -> (usize, f64) {
        let mut key = subset.to_vec();
        key.sort_unstable();
        let &(i, j) = self
            .reps
            .get(&key)
            .unwrap_or_else(|| panic!("moment {key:?} outside basis"));
        let col = sdp::svec_index(self.side, i, j);
        let mult = if i == j { 1.0 } else { 1.0 / SQRT2 };
        (col, mult)
    }

    /// Entry for a constraint row: coefficient `alpha` on the moment of
    /// `subset`.
    fn row_entry(&self, subset: &[usize], alpha: f64) -> (usize, f64) {
        let (col, mult) = self.moment_col(subset);
        (col, alpha * mult)
    }
}

pub fn build_relaxation(
    h: &WeightedHypergraph,
    delta: f64,
    r: usize,
    options: RelaxOptions,
) -> Result<RelaxationProblem> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::Relaxation(format!("delta {delta} outside (0, 1/2]")));
    }
    if r != 2 && r != 4 {
        return Err(Error::Relaxation(format!("degree {r} not in {{2, 4}}")));
    }
    let n = h.n();
    let w_total = h.total_vertex_weight();
    if w_total <= 0.0 {
        return Err(Error::Relaxation("zero total vertex weight".into()));
    }
    let basis = monomials(n, r / 2);
    let side = basis.len();

    // group matrix entries by the subset their moment represents
    let mut groups: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
    for i in 0..side {
        for j in i..side {
            let u = sym_diff(&basis[i], &basis[j]);
            groups.entry(u).or_default().push((i, j));
        }
    }
    let reps: HashMap<Vec<usize>, (usize, usize)> = groups
        .iter()
        .map(|(u, entries)| (u.clone(), entries[0]))
        .collect();

    let mut pair_list: Vec<(usize, usize)> = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        for e in h.edges() {
            for (a, &i) in e.members.iter().enumerate() {
                for &j in &e.members[(a + 1)..] {
                    let key = (i.min(j), i.max(j));
                    if seen.insert(key) {
                        pair_list.push(key);
                    }
                }
            }
        }
        pair_list.sort_unstable();
    }
    let epigraph_edges: Vec<usize> = (0..h.edges().len())
        .filter(|&e| h.edges()[e].w > 0.0)
        .collect();

    let svec = sdp::svec_len(side);
    let free = epigraph_edges.len();
    let mut edge_var: HashMap<usize, usize> = HashMap::new();
    for (k, &e) in epigraph_edges.iter().enumerate() {
        edge_var.insert(e, svec + k);
    }

    let mut rel = RelaxationProblem {
        delta,
        r,
        n,
        side,
        pair_list,
        epigraph_edges,
        problem: ConicProblem {
            m: side,
            free,
            slacks: 0,
            c: Vec::new(),
            a: SparseMatrix::new(0),
            b: Vec::new(),
        },
        reps,
        groups,
        total_weight: w_total,
        options,
    };

    // count slack rows first so column indices are final
    let epi_rows: usize = rel
        .epigraph_edges
        .iter()
        .map(|&e| {
            let k = h.edges()[e].members.len();
            k * (k - 1) / 2
        })
        .sum();
    let local_rows = if options.pair_locals {
        4 * rel.pair_list.len()
    } else {
        0
    };
    let slacks = epi_rows + local_rows;
    let nvars = svec + free + slacks;
    let mut a = SparseMatrix::new(nvars);
    let mut b = Vec::new();

    let entry = |i: usize, j: usize, v: f64| -> (usize, f64) {
        let (lo, hi) = (i.min(j), i.max(j));
        let scale = if lo == hi { 1.0 } else { SQRT2 };
        (sdp::svec_index(side, lo, hi), v * scale)
    };

    // Booleanity: every entry representing the empty moment equals 1
    for &(i, j) in &rel.groups[&Vec::new()] {
        a.push_row(vec![entry(i, j, 1.0)]);
        b.push(1.0);
    }
    // consistency: tie every duplicate entry to its representative
    for entries in rel.groups.values() {
        let (ri, rj) = entries[0];
        for &(i, j) in &entries[1..] {
            a.push_row(vec![entry(i, j, 1.0), entry(ri, rj, -1.0)]);
            b.push(0.0);
        }
    }
    // cardinality at the root: sum_i W_i (1 - m_i)/2 = delta W(V)
    {
        let mut row = Vec::new();
        for i in 0..n {
            let w = h.vertex_weight(i);
            if w != 0.0 {
                row.push(rel.row_entry(&[i], -w / 2.0));
            }
        }
        a.push_row(row);
        b.push(delta * w_total - w_total / 2.0);
    }
    // cardinality conditioned on each vertex:
    // sum_i W_i p11(i, j) = delta W(V) mu_j, with p11(j, j) = mu_j
    if options.spread_cardinality {
        for j in 0..n {
            let w_j = h.vertex_weight(j);
            let mut coef_mj = 0.0;
            let mut row = Vec::new();
            let mut constant = 0.0;
            for i in 0..n {
                let w = h.vertex_weight(i);
                if w == 0.0 {
                    continue;
                }
                if i == j {
                    // W_j (1 - m_j)/2
                    constant += w_j / 2.0;
                    coef_mj += -w_j / 2.0;
                } else {
                    // W_i (1 - m_i - m_j + m_ij)/4
                    constant += w / 4.0;
                    row.push(rel.row_entry(&[i], -w / 4.0));
                    coef_mj += -w / 4.0;
                    row.push(rel.row_entry(&[i, j], w / 4.0));
                }
            }
            // minus delta W(V) (1 - m_j)/2
            constant -= delta * w_total / 2.0;
            coef_mj += delta * w_total / 2.0;
            row.push(rel.row_entry(&[j], coef_mj));
            a.push_row(row);
            b.push(-constant);
        }
    }
    // epigraph: (1 - m_ij)/2 <= c_e for every pair inside a weighted edge
    let mut slack_col = svec + free;
    for &e in &rel.epigraph_edges {
        let members = &h.edges()[e].members;
        let ce = edge_var[&e];
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[(x + 1)..] {
                let mut row = vec![rel.row_entry(&[i, j], -0.5), (ce, -1.0), (slack_col, 1.0)];
                row.sort_unstable_by_key(|&(c, _)| c);
                a.push_row(row);
                b.push(-0.5);
                slack_col += 1;
            }
        }
    }
    // pairwise local nonnegativity: (1 + sa m_i + sb m_j + sa sb m_ij)/4 >= 0
    if options.pair_locals {
        for &(i, j) in &rel.pair_list {
            for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let row = vec![
                    rel.row_entry(&[i], sa / 4.0),
                    rel.row_entry(&[j], sb / 4.0),
                    rel.row_entry(&[i, j], sa * sb / 4.0),
                    (slack_col, -1.0),
                ];
                a.push_row(row);
                b.push(-0.25);
                slack_col += 1;
            }
        }
    }
    debug_assert_eq!(slack_col, nvars);

    let mut c = vec![0.0; nvars];
    for &e in &rel.epigraph_edges {
        c[edge_var[&e]] = h.edges()[e].w / (delta * w_total);
    }
    rel.problem = ConicProblem {
        m: side,
        free,
        slacks,
        c,
        a,
        b,
    };
    Ok(rel)
}

/// Read a pseudo-distribution off a solved moment matrix. The diagonal is
/// renormalized to exactly 1 (D^{-1/2} M D^{-1/2}), then each moment is the
/// average of all matrix entries representing it.
fn read_pd(rel: &RelaxationProblem, x: &[f64]) -> Result<PseudoDistribution> {
    let side = rel.side;
    let mut m = sdp::unpack_matrix(x, side);
    let mut scale = vec![0.0; side];
    for i in 0..side {
        let d = m[(i, i)];
        if d < 1e-8 {
            return Err(Error::SolverNonConvergence(format!(
                "moment-matrix diagonal {d} at {i}"
            )));
        }
        scale[i] = 1.0 / d.sqrt();
    }
    for i in 0..side {
        for j in 0..side {
            m[(i, j)] *= scale[i] * scale[j];
        }
    }
    let mut moments = HashMap::new();
    for (u, entries) in &rel.groups {
        if u.is_empty() {
            continue;
        }
        let avg: f64 =
            entries.iter().map(|&(i, j)| m[(i, j)]).sum::<f64>() / entries.len() as f64;
        moments.insert(u.clone(), avg.clamp(-1.0, 1.0));
    }
    Ok(PseudoDistribution::new(rel.n, rel.r, moments))
}

/// The true objective value of a pseudo-distribution: each edge contributes
/// its worst pairwise disagreement probability.
pub fn objective_of(rel: &RelaxationProblem, h: &WeightedHypergraph, pd: &PseudoDistribution) -> f64 {
    let mut total = 0.0;
    for e in h.edges() {
        if e.w == 0.0 {
            continue;
        }
        let mut worst = 0.0f64;
        for (x, &i) in e.members.iter().enumerate() {
            for &j in &e.members[(x + 1)..] {
                worst = worst.max(pd.pr_neq(i, j));
            }
        }
        total += e.w * worst;
    }
    total / (rel.delta * rel.total_weight)
}

/// Solve the relaxation and return the pseudo-distribution, its objective
/// value (recomputed from the returned moments, so the reported number is
/// attained by the reported solution), and solver statistics.
pub fn solve_relaxation(
    rel: &RelaxationProblem,
    h: &WeightedHypergraph,
    tol: f64,
    max_iter: usize,
) -> Result<(PseudoDistribution, f64, SolveStats)> {
    let (x, stats) = sdp::solve(&rel.problem, tol, max_iter)?;
    let pd = read_pd(rel, &x)?;
    let value = objective_of(rel, h, &pd);
    Ok((pd, value, stats))
}

/// [`solve_relaxation`] with warm starting. Useful when sweeping the density
/// parameter on a fixed hypergraph: the relaxations share their variable
/// layout, so the previous optimum is an excellent initial iterate.
pub fn solve_relaxation_warm(
    rel: &RelaxationProblem,
    h: &WeightedHypergraph,
    tol: f64,
    max_iter: usize,
    warm: Option<&sdp::WarmStart>,
) -> Result<(PseudoDistribution, f64, SolveStats, sdp::WarmStart)> {
    let (x, stats, state) = sdp::solve_warm(&rel.problem, tol, max_iter, warm)?;
    let pd = read_pd(rel, &x)?;
    let value = objective_of(rel, h, &pd);
    Ok((pd, value, stats, state))
}
