//! The acceptance gate: twelve end-to-end checks covering the reduction, the
//! relaxation, the rounding pipeline, and the verification suites. Each test
//! prints a single `criterion N: PASS` line on success; failures carry the
//! offending instance in the assertion message.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use ssve::gaussian::dot;
use ssve::generators::{
    connected_graphs_upto_iso, planted_instance, random_connected_graph, random_weighted_graph,
};
use ssve::graph::{self, CutSet};
use ssve::hypergraph::{hyperedge_expansion, Volume, WeightedHypergraph};
use ssve::oracle::{exact_hsse, exact_reduced_hsse};
use ssve::pd::{dist_sq, extract_vectors, PseudoDistribution, VectorSolution};
use ssve::reduce::{completeness_image, gap_single_edge, ssve_to_hsse, ReducedInstance};
use ssve::relax::{basic_options, build_relaxation, solve_relaxation_warm, RelaxOptions};
use ssve::round::{
    full_pipeline, preprocess_shift, round_stage, shifted_hyperplane_round, solve_stage,
    solve_stage_from, PipelineConfig,
};
use ssve::verify::{cdf_fact_check, concentration_check, rounding_lemma_sweep, CALIBRATION_K};
use ssve::Denominator;

/// One solved corpus entry: the reduction, the target size, the relaxation
/// optimum with its locals, and the matching brute-force optimum.
struct SolvedInstance {
    red: ReducedInstance,
    k: usize,
    sdp_value: f64,
    pd: PseudoDistribution,
    exact: f64,
}

struct Corpus {
    instances: Vec<SolvedInstance>,
    elapsed: Duration,
}

/// Every connected graph on up to 7 vertices plus 100 random connected
/// graphs on 5..=10 vertices, each solved for every target size k <= n/2.
/// Solved once and shared by criteria 1, 4, 5, and 6.
fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let start = Instant::now();
        let mut graphs = Vec::new();
        for n in 1..=7 {
            graphs.extend(connected_graphs_upto_iso(n));
        }
        for i in 0..100u64 {
            let n = 5 + (i % 6) as usize;
            graphs.push(random_connected_graph(n, 0.3, 10_000 + i));
        }
        let mut instances = Vec::new();
        for g in &graphs {
            let red = ssve_to_hsse(g);
            let mut warm = None;
            for k in 1..=(g.n() / 2) {
                let delta = k as f64 / red.h.total_vertex_weight();
                let rel = build_relaxation(&red.h, delta, 2, RelaxOptions::default())
                    .expect("corpus relaxation");
                // a handful of corpus instances need more than the default
                // iteration cap to clear the convergence check at 1e-6
                let (pd, sdp_value, _, state) =
                    solve_relaxation_warm(&rel, &red.h, 1e-6, 30_000, warm.as_ref())
                        .expect("corpus solve");
                warm = Some(state);
                let (exact, _) = exact_reduced_hsse(&red, k).expect("corpus oracle");
                instances.push(SolvedInstance {
                    red: red.clone(),
                    k,
                    sdp_value,
                    pd,
                    exact,
                });
            }
        }
        Corpus {
            instances,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn criterion_01_sdp_lower_bounds_the_exact_optimum() {
    let corpus = corpus();
    for inst in &corpus.instances {
        assert!(
            inst.sdp_value <= inst.exact + 1e-5,
            "relaxation {} above exact {} on n={} k={}",
            inst.sdp_value,
            inst.exact,
            inst.red.n_orig,
            inst.k
        );
    }
    assert!(
        corpus.elapsed <= Duration::from_secs(600),
        "corpus took {:?}",
        corpus.elapsed
    );
    println!(
        "criterion 1: PASS ({} solves, {:?})",
        corpus.instances.len(),
        corpus.elapsed
    );
}

#[test]
fn criterion_02_single_hyperedge_integrality_gap() {
    for d in [4usize, 8, 16] {
        let (h, witness) = gap_single_edge(d);
        let delta = 1.0 / d as f64;
        // the witness biases are exactly delta each, so it meets the
        // cardinality constraint of the relaxation it certifies
        assert!(witness.mus.iter().all(|&m| (m - delta).abs() <= 1e-12));
        let rel = build_relaxation(&h, delta, 2, basic_options()).unwrap();
        let (_, sdp, _, _) = solve_relaxation_warm(&rel, &h, 1e-7, 20_000, None).unwrap();
        let (exact, _) = exact_hsse(&h, delta, None, Denominator::SetSize).unwrap();
        assert_eq!(exact, 1.0, "every feasible set cuts the single hyperedge");
        assert!(sdp <= 1.0 / d as f64 + 1e-6, "d={d}: sdp {sdp}");
        assert!(
            exact / sdp.max(1e-12) >= d as f64 * (1.0 - 1e-4),
            "d={d}: gap ratio {} too small",
            exact / sdp.max(1e-12)
        );
    }
    println!("criterion 2: PASS");
}

#[test]
fn criterion_03_reduction_is_exact_on_all_subsets() {
    for trial in 0..30u64 {
        let n = 4 + (trial % 9) as usize; // 4..=12
        let g = random_weighted_graph(n, 0.45, 500 + trial);
        let red = ssve_to_hsse(&g);
        let total = red.g_sym.n();
        for mask in 1u64..(1 << n) {
            // the canonical image of the subset, plus a deterministic
            // perturbation of the edge-vertices to cover arbitrary cuts
            let s = CutSet::from_indices(
                n,
                &(0..n).filter(|v| mask >> v & 1 == 1).collect::<Vec<_>>(),
            );
            let mut img = completeness_image(&red, &s);
            for variant in 0..2 {
                if variant == 1 {
                    for e in 0..red.edge_of.len() {
                        if (mask.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> (e % 61)) & 1 == 1 {
                            let v = red.n_orig + e;
                            if img.contains(v) {
                                img.remove(v);
                            } else {
                                img.insert(v);
                            }
                        }
                    }
                    if img.is_empty() || img.len() == total {
                        continue;
                    }
                }
                let lhs =
                    hyperedge_expansion(&red.h, &img, Volume::VertexWeight, Denominator::SetSize);
                let rhs = graph::symmetric_vertex_expansion(&red.g_sym, &img);
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) => assert!(
                        (a - b).abs() <= 1e-12,
                        "mismatch {a} vs {b} on trial {trial} mask {mask} variant {variant}"
                    ),
                    (Err(_), Err(_)) => {}
                    (a, b) => panic!("one side degenerate: {a:?} vs {b:?}"),
                }
            }
        }
    }
    println!("criterion 3: PASS");
}

#[test]
fn criterion_04_reduction_bookkeeping_and_rollback_bounds() {
    let corpus = corpus();
    for inst in &corpus.instances {
        let h = &inst.red.h;
        let edge_total: f64 = h.edges().iter().map(|e| e.w).sum();
        let vertex_total = h.total_vertex_weight();
        let n = inst.red.n_orig as f64;
        // unit-weight sums are exact in floating point
        assert_eq!(edge_total, n);
        assert_eq!(vertex_total, n);
        let pi = h.pi().expect("reduced instances carry the edge-vertex map");
        let mut seen = vec![false; h.n()];
        for &v in pi {
            assert!(!seen[v], "pi repeats vertex {v}");
            seen[v] = true;
        }
        assert_eq!(pi.len(), h.edges().len());
    }
    // rollback bounds on full pipeline runs over a few corpus graphs
    let mut runs = 0;
    for (i, g) in connected_graphs_upto_iso(6).iter().enumerate().step_by(20) {
        let delta = 2.0 / g.n() as f64;
        let config = PipelineConfig::new(delta, 40 + i as u64);
        if let Ok(report) = full_pipeline(g, &config) {
            let eps = report.chosen.hypergraph_expansion + 1e-12;
            let size = report.chosen.size as f64;
            let target = g.n() as f64 * delta;
            assert!(size >= (1.0 - eps) * 0.9 * target - 1e-9);
            assert!(size <= 1.1 * target + 1e-9);
            assert!(report.chosen.phi_v <= 2.0 * eps + 1e-9);
            runs += 1;
        }
    }
    assert!(runs >= 3, "too few pipeline runs succeeded");
    println!("criterion 4: PASS ({runs} pipeline runs checked)");
}

fn check_vector_identities(pd: &PseudoDistribution, vs: &VectorSolution, tol: f64) {
    let n = pd.n();
    assert!((dot(&vs.phibar, &vs.phibar) - 1.0).abs() <= tol);
    for i in 0..n {
        let u_i = vs.u(i);
        // (i) u_i = (phibar - v_i)/2 = mu_i phibar + z_i, coordinatewise
        for ((u, (p, v)), z) in u_i
            .iter()
            .zip(vs.phibar.iter().zip(&vs.vs[i]))
            .zip(&vs.zs[i])
        {
            assert!((u - (p - v) / 2.0).abs() <= tol);
            assert!((u - (vs.mus[i] * p + z)).abs() <= tol);
        }
        // (ii) mu_i matches the locals and ||z_i||^2 = mu_i (1 - mu_i)
        assert!((vs.mus[i] - pd.pr1(i)).abs() <= tol);
        assert!((dot(&vs.zs[i], &vs.zs[i]) - vs.mus[i] * (1.0 - vs.mus[i])).abs() <= tol);
        assert!((dot(&vs.vs[i], &vs.vs[i]) - 1.0).abs() <= tol);
        for j in (i + 1)..n {
            // (iii) <z_i, z_j> is the covariance of the locals
            assert!((dot(&vs.zs[i], &vs.zs[j]) - pd.cov(i, j)).abs() <= tol);
            // (iv) (1/4)||v_i - v_j||^2 is the disagreement probability
            assert!((dist_sq(&vs.vs[i], &vs.vs[j]) / 4.0 - pd.pr_neq(i, j)).abs() <= tol);
        }
    }
}

#[test]
fn criterion_05_vector_solution_identities() {
    let corpus = corpus();
    for inst in &corpus.instances {
        let vs = extract_vectors(&inst.pd).expect("corpus locals factor");
        check_vector_identities(&inst.pd, &vs, 1e-7);
    }
    println!(
        "criterion 5: PASS ({} instances)",
        corpus.instances.len()
    );
}

#[test]
fn criterion_06_preprocessing_claims() {
    let corpus = corpus();
    let theta = 0.05;
    let scale = 1.0 + theta * theta;
    for inst in &corpus.instances {
        let vs = extract_vectors(&inst.pd).expect("corpus locals factor");
        let ss = preprocess_shift(&vs, theta).expect("shift");
        let n = vs.n();
        // pairs with enforced local distributions: members of a common
        // hyperedge (the only pairs the cut analysis applies the l1 bias
        // bound to; for other pairs the degree-2 solution does not
        // guarantee valid locals)
        let mut local_pair = vec![false; n * n];
        for e in inst.red.h.edges() {
            for (a, &i) in e.members.iter().enumerate() {
                for &j in &e.members[a + 1..] {
                    local_pair[i * n + j] = true;
                    local_pair[j * n + i] = true;
                }
            }
        }
        for i in 0..n {
            // bias drift and range
            assert!((ss.mups[i] - vs.mus[i]).abs() <= theta * theta + 1e-8);
            assert!(ss.mups[i] >= theta * theta / 10.0 - 1e-8);
            assert!(ss.mups[i] <= 1.0 - theta * theta / 10.0 + 1e-8);
            // shifted vectors stay unit and the mu' <= 4||z'||^2 guard
            assert!((dot(&ss.vps[i], &ss.vps[i]) - 1.0).abs() <= 1e-8);
            if ss.mups[i] <= 0.5 {
                let z2 = dot(&ss.zps[i], &ss.zps[i]);
                assert!(ss.mups[i] <= 4.0 * z2 + 1e-8);
            }
            for j in (i + 1)..n {
                // exact distance contraction by 1 + theta^2
                let before = dist_sq(&vs.vs[i], &vs.vs[j]);
                let after = dist_sq(&ss.vps[i], &ss.vps[j]);
                assert!((after * scale - before).abs() <= 1e-8 * (1.0 + before));
                // l1 bias closeness against the contracted distance; its
                // premise |mu_i - mu_j| <= Pr[x_i != x_j] is an SDP
                // constraint the solver meets only to tolerance, so bound
                // the premise residual separately and pass it through
                if local_pair[i * n + j] {
                    let premise_viol = ((inst.pd.pr1(i) - inst.pd.pr1(j)).abs()
                        - inst.pd.pr_neq(i, j))
                    .max(0.0);
                    assert!(premise_viol <= 5e-5, "local validity off by {premise_viol}");
                    assert!(
                        (ss.mups[i] - ss.mups[j]).abs() <= 2.0 * after + premise_viol + 1e-7
                    );
                }
                // inner products of the centered parts shrink controllably
                let zij = dot(&vs.zs[i], &vs.zs[j]).abs();
                let zpij = dot(&ss.zps[i], &ss.zps[j]).abs();
                assert!(zpij <= zij + theta * theta / 4.0 + 1e-8);
                // correlation floor used by the rounding analysis
                let ni = dot(&ss.zps[i], &ss.zps[i]).sqrt();
                let nj = dot(&ss.zps[j], &ss.zps[j]).sqrt();
                if ni > 0.0 && nj > 0.0 {
                    let corr = dot(&ss.zps[i], &ss.zps[j]) / (ni * nj);
                    assert!(1.0 - corr <= after / (8.0 * ni * nj) + 1e-7);
                }
            }
        }
    }
    println!(
        "criterion 6: PASS ({} instances, theta {theta})",
        corpus.instances.len()
    );
}

#[test]
fn criterion_07_cdf_facts() {
    let start = Instant::now();
    let checks = cdf_fact_check(7, 100_000).unwrap();
    for c in &checks {
        assert!(c.pass, "{c:?}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed <= Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 7: PASS ({} checks, {elapsed:?})", checks.len());
}

#[test]
fn criterion_08_rounding_lemma_sweep() {
    let start = Instant::now();
    let mut cells = Vec::new();
    // sidedness violations abort the sweep, so reaching the assertions at
    // all means every sample passed the two threshold implications
    cells.extend(rounding_lemma_sweep(200_000, 8, false, false).unwrap());
    cells.extend(rounding_lemma_sweep(200_000, 9, false, true).unwrap());
    cells.extend(rounding_lemma_sweep(200_000, 10, true, false).unwrap());
    for c in &cells {
        assert!(
            c.ratio <= CALIBRATION_K,
            "cell d={} delta={} ratio {}",
            c.d,
            c.delta,
            c.ratio
        );
        assert!(c.pass, "{c:?}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed <= Duration::from_secs(900), "took {elapsed:?}");
    println!("criterion 8: PASS ({} cells, {elapsed:?})", cells.len());
}

#[test]
fn criterion_09_rounding_concentration() {
    for instance in 0..5u64 {
        let (g, _) = planted_instance(60, 15, 0, 5, 42 + instance);
        let red = ssve_to_hsse(&g);
        let delta = 15.0 / red.h.total_vertex_weight();
        let mut config = PipelineConfig::new(delta, instance);
        // the ADMM objective tail on these degenerate optima is long: the
        // biases only sharpen to near-integral in the last stretch before
        // the residuals actually reach tolerance, so give the solver room
        config.tol = 1e-6;
        config.max_iter = 150_000;
        let rel = build_relaxation(&red.h, delta, 2, RelaxOptions::default()).unwrap();
        let (pd0, value, stats, _) =
            solve_relaxation_warm(&rel, &red.h, config.tol, config.max_iter, None).unwrap();
        let stage = solve_stage_from(red, &pd0, value, stats, &config).unwrap();
        let w_total = stage.red.h.total_vertex_weight();
        let mut weights = Vec::with_capacity(200);
        for t in 0..200u64 {
            let s = shifted_hyperplane_round(&stage.shifted, config.seed.wrapping_add(t)).unwrap();
            weights.push(stage.red.h.set_weight(&s) / w_total);
        }
        let report = concentration_check(&weights, delta).unwrap();
        assert!(
            report.frequency >= 0.8,
            "instance {instance}: only {}/{} trials in window",
            report.inside,
            report.trials
        );
    }
    println!("criterion 9: PASS (5 instances, 200 trials each)");
}

#[test]
fn criterion_10_edge_deletion_budget() {
    for (i, g) in connected_graphs_upto_iso(6).iter().enumerate().step_by(15) {
        let delta = 2.0 / g.n() as f64;
        let config = PipelineConfig::new(delta, 60 + i as u64);
        let stage = solve_stage(g, &config).unwrap();
        assert!(
            stage.deleted_weight <= stage.deletion_budget,
            "graph {i}: deleted {} above budget {}",
            stage.deleted_weight,
            stage.deletion_budget
        );
    }
    println!("criterion 10: PASS");
}

#[test]
fn criterion_11_planted_recovery() {
    let start = Instant::now();
    let (g, planted) = planted_instance(60, 15, 2, 8, 77);
    let d = g.max_degree();
    assert!(d <= 8);
    let eps = graph::vertex_expansion(&g, &planted, Denominator::SetSize).unwrap();
    assert!(eps <= 0.2 + 1e-12);
    let red = ssve_to_hsse(&g);
    let delta = 15.0 / red.h.total_vertex_weight();
    let log2 = |x: f64| x.log2();
    let bound = (10.0 * (eps * log2(d as f64) * log2(1.0 / delta)).sqrt()
        + 10.0 * d as f64 * eps * log2(1.0 / delta).powi(2))
    .min(1.0);
    let mut base = PipelineConfig::new(delta, 0);
    base.tol = 1e-6;
    base.max_iter = 40_000;
    base.trials = 60;
    let rel = build_relaxation(&red.h, delta, 2, RelaxOptions::default()).unwrap();
    let (pd0, value, stats, _) =
        solve_relaxation_warm(&rel, &red.h, base.tol, base.max_iter, None).unwrap();
    let mut successes = 0;
    for s in 0..20u64 {
        // spread the per-run seeds so their trial windows do not overlap
        let seed = s.wrapping_mul(7919);
        let mut config = base.clone();
        config.seed = seed;
        let stage =
            solve_stage_from(red.clone(), &pd0, value, stats.clone(), &config).unwrap();
        if let Ok(report) = round_stage(&stage, &config, seed) {
            let size = report.chosen.size as f64;
            if size >= 0.8 * 15.0 && size <= 1.2 * 15.0 && report.chosen.phi_v <= bound {
                successes += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        successes >= 10,
        "only {successes}/20 seeds recovered a planted-scale set"
    );
    assert!(elapsed <= Duration::from_secs(1800), "took {elapsed:?}");
    println!("criterion 11: PASS ({successes}/20 seeds, {elapsed:?})");
}

#[test]
fn criterion_12_reports_are_reproducible() {
    let (g, _) = planted_instance(24, 6, 2, 5, 3);
    let config = PipelineConfig::new(0.25, 11);
    let a = serde_json::to_string(&full_pipeline(&g, &config).unwrap()).unwrap();
    let b = serde_json::to_string(&full_pipeline(&g, &config).unwrap()).unwrap();
    assert_eq!(a, b);
    // the verification sweeps reproduce too
    let s1 = serde_json::to_string(&rounding_lemma_sweep(10_000, 5, false, false).unwrap()).unwrap();
    let s2 = serde_json::to_string(&rounding_lemma_sweep(10_000, 5, false, false).unwrap()).unwrap();
    assert_eq!(s1, s2);
    let c1 = serde_json::to_string(&cdf_fact_check(5, 20_000).unwrap()).unwrap();
    let c2 = serde_json::to_string(&cdf_fact_check(5, 20_000).unwrap()).unwrap();
    assert_eq!(c1, c2);
    println!("criterion 12: PASS");
}

// keep the hypergraph JSON path honest for the corpus instances used above
#[test]
fn corpus_hypergraphs_roundtrip_through_json() {
    let g = random_connected_graph(7, 0.4, 123);
    let h = ssve_to_hsse(&g).h;
    let h2 = WeightedHypergraph::from_json(&h.to_json()).unwrap();
    assert_eq!(h.to_json(), h2.to_json());
}
