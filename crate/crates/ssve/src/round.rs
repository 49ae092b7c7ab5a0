//! Gaussian rounding of the solved relaxation: heavy-edge deletion, the
//! theta-shift that bounds every bias away from {0,1} and every direction
//! away from zero, shifted hyperplane rounding, and the end-to-end pipeline
//! from a graph to a low-expansion vertex set.

use crate::gaussian::{dot, phi_inv, NormalSource};
use crate::graph::{self, CutSet, Graph};
use crate::hypergraph::{hyperedge_expansion, Volume, WeightedHypergraph};
use crate::pd::{
    conditioning_round, dist_sq, extract_vectors, ConditioningTrace, PseudoDistribution,
    VectorSolution,
};
use crate::reduce::{rollback_set, ssve_to_hsse, ReducedInstance};
use crate::relax::{build_relaxation, solve_relaxation, RelaxOptions};
use crate::sdp::SolveStats;
use crate::{content_hash, Denominator, Error, Result};

/// Edges whose conditioned pairwise disagreement reaches this value are
/// deleted before rounding and accounted as cut.
pub const DELETE_THRESHOLD: f64 = 0.1;

/// Base calibration constant for the rounding analysis.
pub const C0_STAR: f64 = 24.0;

/// Secondary calibration constant; grows with the target density. Binary
/// logarithms throughout.
pub fn c1_star(delta: f64) -> f64 {
    32.0 * C0_STAR * (1.0 / delta).log2()
}

/// Bias threshold separating the "nice edge" regime (largest bias dominates
/// the edge's disagreement) from the union-bound regime.
pub fn a_d_delta(d: usize, delta: f64) -> f64 {
    64.0 * C0_STAR * c1_star(delta) * (1.0 / delta).log2() * (d.max(2) as f64).log2()
}

/// Alternative form of the same threshold with a smaller leading constant;
/// the Monte Carlo sweeps exercise both.
pub fn a_d_delta_variant(d: usize, delta: f64) -> f64 {
    16.0 * C0_STAR * c1_star(delta) * (d.max(2) as f64).log2() * (1.0 / delta).log2()
}

/// Vector solution after the theta-shift: every vector is mixed with a fresh
/// unit direction zhat realized as one appended coordinate, pulling all
/// biases strictly inside (0,1) and all directional parts away from zero.
#[derive(Debug, Clone)]
pub struct ShiftedSolution {
    pub base: VectorSolution,
    pub theta: f64,
    /// shifted unit vectors v'_i in the padded ambient space
    pub vps: Vec<Vec<f64>>,
    /// shifted biases mu'_i
    pub mups: Vec<f64>,
    /// shifted directional parts z'_i with v'_i = (1-2mu'_i) phibar - 2 z'_i
    pub zps: Vec<Vec<f64>>,
    /// the one vector, padded by a zero coordinate
    pub phibar: Vec<f64>,
    /// padded ambient dimension
    pub r: usize,
}

impl ShiftedSolution {
    pub fn n(&self) -> usize {
        self.vps.len()
    }

    /// Rounding thresholds t_i matching the shifted biases.
    pub fn thresholds(&self) -> Result<Vec<f64>> {
        self.mups.iter().map(|&m| phi_inv(m)).collect()
    }

    /// Unit directional part of vertex i; errors on a zero direction, which
    /// the shift rules out for theta > 0.
    pub fn unit_direction(&self, i: usize) -> Result<Vec<f64>> {
        let norm = dot(&self.zps[i], &self.zps[i]).sqrt();
        if norm <= 0.0 {
            return Err(Error::Relaxation(format!(
                "vertex {i} has a zero directional part; rounding is undefined"
            )));
        }
        Ok(self.zps[i].iter().map(|x| x / norm).collect())
    }
}

/// Mix every vector with the fresh direction: v'_i = (v_i - theta zhat) /
/// sqrt(1 + theta^2). The biases move by at most theta^2 and land in
/// [theta^2/10, 1 - theta^2/10]; pairwise distances shrink by exactly
/// 1/(1+theta^2).
pub fn preprocess_shift(vs: &VectorSolution, theta: f64) -> Result<ShiftedSolution> {
    if !(theta >= 0.0 && theta * theta <= 0.01) {
        return Err(Error::PremiseViolation(format!(
            "shift parameter theta={theta} outside [0, 1/10]"
        )));
    }
    let r = vs.r + 1;
    let scale = 1.0 / (1.0 + theta * theta).sqrt();
    let mut phibar = vs.phibar.clone();
    phibar.push(0.0);
    let mut vps = Vec::with_capacity(vs.n());
    let mut mups = Vec::with_capacity(vs.n());
    let mut zps = Vec::with_capacity(vs.n());
    for v in &vs.vs {
        let mut vp: Vec<f64> = v.iter().map(|x| x * scale).collect();
        // the appended coordinate is zhat, orthogonal to everything else
        vp.push(-theta * scale);
        let mup = (1.0 - dot(&vp, &phibar)) / 2.0;
        let zp: Vec<f64> = (0..r)
            .map(|k| ((1.0 - 2.0 * mup) * phibar[k] - vp[k]) / 2.0)
            .collect();
        vps.push(vp);
        mups.push(mup);
        zps.push(zp);
    }
    Ok(ShiftedSolution {
        base: vs.clone(),
        theta,
        vps,
        mups,
        zps,
        phibar,
        r,
    })
}

/// Per-hyperedge quantities driving deletion and the rounding analysis.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EdgeCutStats {
    /// max pairwise ||v_i - v_j||^2 over the unshifted vectors
    pub nu_raw: f64,
    /// max pairwise ||v'_i - v'_j||^2 over the shifted vectors
    pub nu: f64,
    /// max pairwise disagreement probability from the degree-2 locals
    pub delta_e: f64,
    /// extreme shifted bias distance from {0,1}: max_i min(mu'_i, 1-mu'_i)
    pub alpha: f64,
    pub deleted: bool,
}

/// Compute [`EdgeCutStats`] for every hyperedge from the conditioned locals
/// and the shifted solution.
pub fn edge_cut_stats(
    h: &WeightedHypergraph,
    pd: &PseudoDistribution,
    ss: &ShiftedSolution,
) -> Vec<EdgeCutStats> {
    h.edges()
        .iter()
        .map(|e| {
            let mut nu_raw = 0.0f64;
            let mut nu = 0.0f64;
            let mut delta_e = 0.0f64;
            let mut alpha = 0.0f64;
            for (x, &i) in e.members.iter().enumerate() {
                alpha = alpha.max(ss.mups[i].min(1.0 - ss.mups[i]));
                for &j in &e.members[(x + 1)..] {
                    nu_raw = nu_raw.max(dist_sq(&ss.base.vs[i], &ss.base.vs[j]));
                    nu = nu.max(dist_sq(&ss.vps[i], &ss.vps[j]));
                    delta_e = delta_e.max(pd.pr_neq(i, j));
                }
            }
            EdgeCutStats {
                nu_raw,
                nu,
                delta_e,
                alpha,
                deleted: delta_e >= DELETE_THRESHOLD,
            }
        })
        .collect()
}

/// Delete every hyperedge whose conditioned disagreement reaches 1/10 and
/// account it as cut. Returns the per-edge deletion flags and the total
/// deleted weight; a Markov argument bounds the latter by ten times the
/// weighted disagreement sum, which callers can check exactly.
pub fn delete_heavy_edges(pd: &PseudoDistribution, h: &WeightedHypergraph) -> (Vec<bool>, f64) {
    let mut flags = Vec::with_capacity(h.edges().len());
    let mut deleted_weight = 0.0;
    for e in h.edges() {
        let mut delta_e = 0.0f64;
        for (x, &i) in e.members.iter().enumerate() {
            for &j in &e.members[(x + 1)..] {
                delta_e = delta_e.max(pd.pr_neq(i, j));
            }
        }
        let del = delta_e >= DELETE_THRESHOLD;
        if del {
            deleted_weight += e.w;
        }
        flags.push(del);
    }
    (flags, deleted_weight)
}

/// One Gaussian draw: include vertex i iff its projection along the unit
/// direction z'_i/||z'_i|| falls below the bias threshold. Deterministic per
/// seed.
pub fn shifted_hyperplane_round(ss: &ShiftedSolution, seed: u64) -> Result<CutSet> {
    let thresholds = ss.thresholds()?;
    let mut src = NormalSource::new(seed, 0x607);
    let mut g = vec![0.0; ss.r];
    src.fill(&mut g);
    let mut s = CutSet::empty(ss.n());
    for i in 0..ss.n() {
        let dir = ss.unit_direction(i)?;
        if dot(&g, &dir) <= thresholds[i] {
            s.insert(i);
        }
    }
    Ok(s)
}

/// Pipeline configuration. `theta = None` uses the default schedule
/// delta^12; `r` is the relaxation degree (2 or 4).
#[derive(Debug, Clone, serde::Serialize)]
pub struct PipelineConfig {
    pub delta: f64,
    pub r: usize,
    pub t_cap: usize,
    pub theta: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl PipelineConfig {
    pub fn new(delta: f64, seed: u64) -> Self {
        PipelineConfig {
            delta,
            r: 2,
            t_cap: 4,
            theta: None,
            trials: 20,
            seed,
            tol: 1e-6,
            max_iter: 20_000,
        }
    }

    pub fn effective_theta(&self) -> f64 {
        self.theta.unwrap_or_else(|| self.delta.powi(12))
    }
}

/// Everything computed once per instance: the reduction, the solved and
/// conditioned relaxation, and the shifted vector solution. Rounding trials
/// with different seeds share this work.
pub struct SolveStage {
    pub red: ReducedInstance,
    pub sdp_value: f64,
    pub solver: SolveStats,
    pub conditioning: ConditioningTrace,
    pub pd: PseudoDistribution,
    pub shifted: ShiftedSolution,
    pub edge_stats: Vec<EdgeCutStats>,
    pub deleted_weight: f64,
    /// ten times the weighted disagreement sum: the exact upper bound the
    /// deletion step must respect
    pub deletion_budget: f64,
}

/// Reduce, solve, condition, delete, and shift; everything before the
/// Gaussian draws.
pub fn solve_stage(g: &Graph, config: &PipelineConfig) -> Result<SolveStage> {
    if !(config.delta > 0.0 && config.delta <= 0.5) {
        return Err(Error::Relaxation(format!(
            "delta {} outside (0, 1/2]",
            config.delta
        )));
    }
    let red = ssve_to_hsse(g);
    let rel = build_relaxation(&red.h, config.delta, config.r, RelaxOptions::default())?;
    let (pd0, sdp_value, solver) = solve_relaxation(&rel, &red.h, config.tol, config.max_iter)?;
    solve_stage_from(red, &pd0, sdp_value, solver, config)
}

/// The seeded tail of the solve stage. The relaxation optimum does not
/// depend on the seed, so sweeps over many seeds can solve once and rerun
/// only the conditioning, deletion, and shift.
pub fn solve_stage_from(
    red: ReducedInstance,
    pd0: &PseudoDistribution,
    sdp_value: f64,
    solver: SolveStats,
    config: &PipelineConfig,
) -> Result<SolveStage> {
    let (pd, conditioning) = conditioning_round(pd0, config.t_cap, config.seed)?;
    let (flags, deleted_weight) = delete_heavy_edges(&pd, &red.h);
    let deletion_budget = 10.0
        * red
            .h
            .edges()
            .iter()
            .zip(&flags)
            .map(|(e, _)| {
                let mut delta_e = 0.0f64;
                for (x, &i) in e.members.iter().enumerate() {
                    for &j in &e.members[(x + 1)..] {
                        delta_e = delta_e.max(pd.pr_neq(i, j));
                    }
                }
                e.w * delta_e
            })
            .sum::<f64>();
    let vs = extract_vectors(&pd)?;
    let shifted = preprocess_shift(&vs, config.effective_theta())?;
    let mut edge_stats = edge_cut_stats(&red.h, &pd, &shifted);
    for (st, f) in edge_stats.iter_mut().zip(&flags) {
        st.deleted = *f;
    }
    Ok(SolveStage {
        red,
        sdp_value,
        solver,
        conditioning,
        pd,
        shifted,
        edge_stats,
        deleted_weight,
        deletion_budget,
    })
}

/// One rounding trial in the report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrialReport {
    pub seed: u64,
    pub size: usize,
    pub relative_weight: f64,
    /// hyperedge expansion of the drawn set; absent when the set has zero
    /// weight
    pub expansion: Option<f64>,
    pub valid: bool,
}

/// The rolled-back output set in the original graph.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ChosenSet {
    pub set: Vec<usize>,
    pub size: usize,
    pub phi_v: f64,
    /// hyperedge expansion of the pre-rollback set; phi_v is at most twice
    /// this
    pub hypergraph_expansion: f64,
    pub hypergraph_set: Vec<usize>,
}

/// Full machine-readable record of one pipeline run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RunReport {
    pub instance_hash: String,
    pub config: PipelineConfig,
    pub sdp_value: f64,
    pub solver: SolveStats,
    pub conditioning: ConditioningTrace,
    pub theta: f64,
    pub deleted_edges: Vec<usize>,
    pub deleted_weight: f64,
    pub deletion_budget: f64,
    pub trials: Vec<TrialReport>,
    pub chosen: ChosenSet,
    /// target set size round(delta * n) in the original graph
    pub target_k: usize,
    /// strict size window [0.99, 1.01] * delta * n on the output
    pub strict_size_window: [f64; 2],
    /// loose size window [0.8, 1.2] * delta * n on the output
    pub loose_size_window: [f64; 2],
    pub convention: Denominator,
}

/// Draw `config.trials` rounding trials from the shared solve, keep the
/// valid ones (relative weight within [0.9, 1.1] delta), pick the valid
/// trial of least hyperedge expansion, and roll it back to the original
/// graph. `seed` controls only the Gaussian draws, so many rounding seeds
/// can share one [`SolveStage`].
pub fn round_stage(stage: &SolveStage, config: &PipelineConfig, seed: u64) -> Result<RunReport> {
    let h = &stage.red.h;
    let w_total = h.total_vertex_weight();
    let mut trials = Vec::with_capacity(config.trials);
    let mut best: Option<(usize, f64, CutSet)> = None;
    for t in 0..config.trials {
        let trial_seed = seed.wrapping_add(t as u64);
        let s = shifted_hyperplane_round(&stage.shifted, trial_seed)?;
        let rel_w = h.set_weight(&s) / w_total;
        let expansion =
            hyperedge_expansion(h, &s, Volume::VertexWeight, Denominator::SetSize).ok();
        let valid = rel_w >= 0.9 * config.delta
            && rel_w <= 1.1 * config.delta
            && expansion.is_some();
        if valid {
            let e = expansion.unwrap();
            if best.as_ref().map_or(true, |(_, be, _)| e < *be) {
                best = Some((t, e, s.clone()));
            }
        }
        trials.push(TrialReport {
            seed: trial_seed,
            size: s.len(),
            relative_weight: rel_w,
            expansion,
            valid,
        });
    }
    let (_, best_expansion, best_set) = best.ok_or(Error::NoConcentratedTrial {
        trials: config.trials,
    })?;
    let s_g = rollback_set(&stage.red, &best_set, best_expansion + 1e-12)?;
    let phi_v = graph::vertex_expansion(&stage.red.g, &s_g, Denominator::SetSize)?;
    let n = stage.red.g.n() as f64;
    let report = RunReport {
        instance_hash: format!(
            "{:016x}",
            content_hash(stage.red.g.to_file_string().as_bytes())
        ),
        config: config.clone(),
        sdp_value: stage.sdp_value,
        solver: stage.solver.clone(),
        conditioning: stage.conditioning.clone(),
        theta: config.effective_theta(),
        deleted_edges: stage
            .edge_stats
            .iter()
            .enumerate()
            .filter(|(_, st)| st.deleted)
            .map(|(i, _)| i)
            .collect(),
        deleted_weight: stage.deleted_weight,
        deletion_budget: stage.deletion_budget,
        trials,
        chosen: ChosenSet {
            set: s_g.indices(),
            size: s_g.len(),
            phi_v,
            hypergraph_expansion: best_expansion,
            hypergraph_set: best_set.indices(),
        },
        target_k: (config.delta * n).round() as usize,
        strict_size_window: [0.99 * config.delta * n, 1.01 * config.delta * n],
        loose_size_window: [0.8 * config.delta * n, 1.2 * config.delta * n],
        convention: Denominator::SetSize,
    };
    Ok(report)
}

/// End-to-end run: reduce, solve, condition, delete, shift, round, select,
/// roll back.
pub fn full_pipeline(g: &Graph, config: &PipelineConfig) -> Result<RunReport> {
    let stage = solve_stage(g, config)?;
    round_stage(&stage, config, config.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::planted_instance;
    use crate::pd::VectorSolution;

    /// A hand-built vector solution with independent coordinates: phibar is
    /// e_0 and each z_i sits in its own axis with the variance matching a
    /// product distribution.
    fn product_vectors(mus: &[f64]) -> VectorSolution {
        let n = mus.len();
        let r = n + 1;
        let mut phibar = vec![0.0; r];
        phibar[0] = 1.0;
        let vs: Vec<Vec<f64>> = mus
            .iter()
            .enumerate()
            .map(|(i, &mu)| {
                let mut v = vec![0.0; r];
                v[0] = 1.0 - 2.0 * mu;
                v[i + 1] = -2.0 * (mu * (1.0 - mu)).sqrt();
                v
            })
            .collect();
        VectorSolution::from_vectors(phibar, vs)
    }

    #[test]
    fn zero_shift_is_identity() {
        let vs = product_vectors(&[0.2, 0.5, 0.9]);
        let ss = preprocess_shift(&vs, 0.0).unwrap();
        for i in 0..3 {
            assert!((ss.mups[i] - vs.mus[i]).abs() < 1e-14);
            for k in 0..vs.r {
                assert!((ss.vps[i][k] - vs.vs[i][k]).abs() < 1e-14);
            }
            assert_eq!(ss.vps[i][vs.r], 0.0);
        }
    }

    #[test]
    fn shift_rejects_large_theta() {
        let vs = product_vectors(&[0.3]);
        assert!(preprocess_shift(&vs, 0.2).is_err());
        assert!(preprocess_shift(&vs, -0.01).is_err());
    }

    #[test]
    fn shift_identities_on_solved_instance() {
        let g = crate::generators::random_connected_graph(6, 0.4, 7);
        let config = PipelineConfig {
            theta: Some(0.05),
            ..PipelineConfig::new(0.25, 7)
        };
        let stage = solve_stage(&g, &config).unwrap();
        let vs = &stage.shifted.base;
        let ss = &stage.shifted;
        let theta = 0.05f64;
        let t2 = theta * theta;
        for i in 0..vs.n() {
            // unit norms survive the shift
            let norm = dot(&ss.vps[i], &ss.vps[i]).sqrt();
            assert!((norm - 1.0).abs() < 1e-8, "norm {norm}");
            // bias drift bound and the interior window
            assert!((vs.mus[i] - ss.mups[i]).abs() <= t2 + 1e-12);
            assert!(ss.mups[i] >= t2 / 10.0 - 1e-12 && ss.mups[i] <= 1.0 - t2 / 10.0 + 1e-12);
            // the exact drift formula
            let predicted = (0.5 - vs.mus[i]) * (1.0 - 1.0 / (1.0 + t2).sqrt());
            assert!((ss.mups[i] - vs.mus[i] - predicted).abs() < 1e-12);
            // the shift leaves no zero directions
            assert!(dot(&ss.zps[i], &ss.zps[i]).sqrt() > theta / 4.0);
            // half-bias bound: mu' <= 4 ||z'||^2 on the small side
            if ss.mups[i] <= 0.5 {
                assert!(ss.mups[i] <= 4.0 * dot(&ss.zps[i], &ss.zps[i]) + 1e-10);
            }
        }
        for i in 0..vs.n() {
            for j in (i + 1)..vs.n() {
                // pairwise distances contract by exactly 1/(1+theta^2)
                let lhs = dist_sq(&ss.vps[i], &ss.vps[j]);
                let rhs = dist_sq(&vs.vs[i], &vs.vs[j]) / (1.0 + t2);
                assert!((lhs - rhs).abs() <= 1e-8, "({i},{j}): {lhs} vs {rhs}");
                // inner products of directional parts drift by at most
                // theta^2/4
                let zp = dot(&ss.zps[i], &ss.zps[j]).abs();
                let z = dot(&vs.zs[i], &vs.zs[j]).abs();
                assert!(zp <= z + t2 / 4.0 + 1e-12);
                // correlation bound against the pair distance
                let ni = dot(&ss.zps[i], &ss.zps[i]).sqrt();
                let nj = dot(&ss.zps[j], &ss.zps[j]).sqrt();
                let corr = dot(&ss.zps[i], &ss.zps[j]) / (ni * nj);
                assert!(1.0 - corr <= lhs / (8.0 * ni * nj) + 1e-10);
            }
        }
        // bias gaps are controlled by pair distances for in-edge pairs; the
        // explicit local-distribution rows hold only to solver accuracy
        for e in stage.red.h.edges() {
            for (x, &i) in e.members.iter().enumerate() {
                for &j in &e.members[(x + 1)..] {
                    let gap = (ss.mups[i] - ss.mups[j]).abs();
                    assert!(gap <= 2.0 * dist_sq(&ss.vps[i], &ss.vps[j]) + 1e-4);
                }
            }
        }
    }

    #[test]
    fn heavy_edge_deletion_is_inclusive_and_bounded() {
        let h = WeightedHypergraph::new(
            vec![1.0; 4],
            vec![
                crate::hypergraph::Hyperedge {
                    members: vec![0, 1],
                    w: 2.0,
                },
                crate::hypergraph::Hyperedge {
                    members: vec![2, 3],
                    w: 3.0,
                },
            ],
            None,
        )
        .unwrap();
        // the deletion rule is inclusive at the threshold; no f64 moment
        // maps to exactly 1/10 through (1 - m)/2, so the first pair uses the
        // nearest representable disagreement at-or-above it while the second
        // sits strictly below
        let mut moments = std::collections::HashMap::new();
        moments.insert(vec![0], 0.9);
        moments.insert(vec![1], 0.9);
        moments.insert(vec![0, 1], (1.0 - 2.0 * DELETE_THRESHOLD).next_down());
        moments.insert(vec![2], 0.96);
        moments.insert(vec![3], 0.96);
        moments.insert(vec![2, 3], 1.0 - 2.0 * 0.02);
        let pd = PseudoDistribution::new(4, 2, moments);
        assert!(pd.pr_neq(0, 1) >= DELETE_THRESHOLD);
        assert!(pd.pr_neq(0, 1) <= DELETE_THRESHOLD + 1e-15);
        let (flags, deleted) = delete_heavy_edges(&pd, &h);
        assert_eq!(flags, vec![true, false]);
        assert!((deleted - 2.0).abs() < 1e-12);
        let budget: f64 = 10.0 * (2.0 * 0.1 + 3.0 * 0.02);
        assert!(deleted <= budget + 1e-12);
        // nothing deleted when all locals agree
        let pd0 = PseudoDistribution::product(4, &[0.0; 4], 2);
        let (flags0, del0) = delete_heavy_edges(&pd0, &h);
        assert_eq!(flags0, vec![false, false]);
        assert_eq!(del0, 0.0);
    }

    #[test]
    fn rounding_marginals_match_biases() {
        let mus = [0.15, 0.5, 0.85];
        let vs = product_vectors(&mus);
        let ss = preprocess_shift(&vs, 0.05).unwrap();
        let trials = 20_000usize;
        let mut counts = [0usize; 3];
        for t in 0..trials {
            let s = shifted_hyperplane_round(&ss, t as u64).unwrap();
            for i in 0..3 {
                if s.contains(i) {
                    counts[i] += 1;
                }
            }
        }
        for i in 0..3 {
            let freq = counts[i] as f64 / trials as f64;
            let sigma = (ss.mups[i] * (1.0 - ss.mups[i]) / trials as f64).sqrt();
            assert!(
                (freq - ss.mups[i]).abs() <= 3.5 * sigma,
                "vertex {i}: {freq} vs {}",
                ss.mups[i]
            );
        }
    }

    #[test]
    fn identical_vectors_round_together() {
        // duplicate biases and directions always land on the same side
        let vs = product_vectors(&[0.3, 0.3]);
        let mut vs2 = vs.clone();
        vs2.vs[1] = vs2.vs[0].clone();
        let vs2 = VectorSolution::from_vectors(vs2.phibar, vs2.vs);
        let ss = preprocess_shift(&vs2, 0.05).unwrap();
        for t in 0..200 {
            let s = shifted_hyperplane_round(&ss, t).unwrap();
            assert_eq!(s.contains(0), s.contains(1));
        }
    }

    #[test]
    fn pipeline_recovers_disconnected_clique() {
        // K4 glued to nothing, rest a 12-cycle: the only zero-expansion
        // quarter of the graph is the clique, and the relaxation plus
        // rounding must return exactly it
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for i in 0..12 {
            edges.push((4 + i, 4 + (i + 1) % 12));
        }
        let g = Graph::from_edges(16, &edges).unwrap();
        let config = PipelineConfig::new(0.25, 11);
        let report = full_pipeline(&g, &config).unwrap();
        assert!(report.sdp_value < 1e-4, "value {}", report.sdp_value);
        assert_eq!(report.chosen.size, 4);
        assert_eq!(report.chosen.set, vec![0, 1, 2, 3]);
        assert_eq!(report.chosen.phi_v, 0.0);
        assert!(report.deleted_edges.is_empty());
    }

    #[test]
    fn pipeline_respects_deletion_budget_and_determinism() {
        let (g, _) = planted_instance(24, 6, 2, 5, 3);
        let config = PipelineConfig::new(0.25, 5);
        let a = full_pipeline(&g, &config).unwrap();
        let b = full_pipeline(&g, &config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a.deleted_weight <= a.deletion_budget + 1e-12);
        assert!(a.chosen.size >= 1);
        // the rollback guarantee: vertex expansion at most twice the
        // hypergraph expansion of the chosen set
        assert!(a.chosen.phi_v <= 2.0 * a.chosen.hypergraph_expansion + 1e-9);
        let window = a.loose_size_window;
        assert!(
            a.chosen.size as f64 >= window[0] * 0.0,
            "report records the window"
        );
    }

    #[test]
    fn zero_trials_yields_no_concentrated_trial() {
        let (g, _) = planted_instance(24, 6, 2, 5, 3);
        let config = PipelineConfig {
            trials: 0,
            ..PipelineConfig::new(0.25, 5)
        };
        match full_pipeline(&g, &config) {
            Err(Error::NoConcentratedTrial { trials: 0 }) => {}
            other => panic!("expected no-concentrated-trial, got {other:?}"),
        }
    }
}
