use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ssve::generators::planted_instance;
use ssve::graph::Graph;
use ssve::hypergraph::WeightedHypergraph;
use ssve::oracle::{exact_hsse, exact_ssve};
use ssve::reduce::{gap_single_edge, random_gap_hypergraph, replacement_product, ssve_to_hsse};
use ssve::relax::{build_relaxation, solve_relaxation, RelaxOptions};
use ssve::round::{
    full_pipeline, shifted_hyperplane_round, solve_stage, PipelineConfig,
};
use ssve::verify::{
    cdf_fact_check, concentration_check, fact_csv, rounding_lemma_sweep, sweep_csv,
};
use ssve::{content_hash, Denominator, Error};

#[derive(Parser)]
#[command(
    name = "ssve",
    version,
    about = "Small-set vertex expansion: reductions, SDP relaxation, rounding, and verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    /// divide boundary weight by the size of the set
    Size,
    /// divide by the smaller of the two sides
    Min,
}

impl From<Convention> for Denominator {
    fn from(c: Convention) -> Denominator {
        match c {
            Convention::Size => Denominator::SetSize,
            Convention::Min => Denominator::MinSide,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Transform a vertex-weighted graph into its hypergraph instance
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the moment relaxation only and report its optimum
    Solve {
        #[arg(long, conflicts_with = "hypergraph")]
        graph: Option<PathBuf>,
        #[arg(long)]
        hypergraph: Option<PathBuf>,
        #[arg(long)]
        delta: f64,
        /// moment degree of the relaxation
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full solve-condition-shift-round-rollback pipeline
    Pipeline {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[arg(long, default_value_t = 4)]
        tcap: usize,
        /// bias shift; defaults to delta^12
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact brute-force optimum for small instances
    Oracle {
        #[arg(long, conflicts_with = "hypergraph")]
        graph: Option<PathBuf>,
        #[arg(long)]
        hypergraph: Option<PathBuf>,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Convention::Size)]
        convention: Convention,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrality-gap hypergraph instances
    Gap {
        #[command(subcommand)]
        kind: GapCmd,
    },
    /// Replacement product of a regular graph with a cloud expander
    Degreduce {
        #[arg(long)]
        graph: PathBuf,
        /// cloud graph; defaults to a built-in expander on max-degree vertices
        #[arg(long)]
        expander: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cut-probability sweep over the premise-satisfying grid
    VerifyLemma {
        #[arg(long, default_value_t = 200_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// use the alternative premise-cap coefficient
        #[arg(long)]
        variant: bool,
        /// run the mirrored-bias grid
        #[arg(long)]
        mirrored: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Normal-CDF inequality grid and max-of-Gaussians Monte Carlo
    VerifyCdf {
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Relative-weight concentration of rounding trials
    VerifyConc {
        /// instance to round; defaults to a planted instance on 24 vertices
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        tcap: usize,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GapCmd {
    /// one hyperedge over d equal-weight vertices
    Single {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// random sparse gap instance
    Random {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// edge density multiplier
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(threads) = std::env::var("SSVE_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            // affects speed only; all results are seed-deterministic
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for infeasible or degenerate input, 1 for internal failures.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidGraph(_)
        | Error::InvalidHypergraph(_)
        | Error::DegenerateDenominator(_)
        | Error::ZeroWeightSide
        | Error::InfeasibleWeightTarget { .. }
        | Error::OracleScale(_)
        | Error::PremiseViolation(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn load_graph(path: &Path) -> Result<Graph, Error> {
    Graph::from_file_string(&std::fs::read_to_string(path)?)
}

fn load_hypergraph(path: &Path) -> Result<WeightedHypergraph, Error> {
    WeightedHypergraph::from_json(&std::fs::read_to_string(path)?)
}

fn write_report(out: &Option<PathBuf>, report: &serde_json::Value) -> Result<(), Error> {
    if let Some(path) = out {
        let mut text = serde_json::to_string_pretty(report)?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn hash_of(bytes: &[u8]) -> String {
    format!("{:016x}", content_hash(bytes))
}

fn run(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::Reduce { graph, out } => {
            let g = load_graph(&graph)?;
            let red = ssve_to_hsse(&g);
            let report = json!({
                "instance_hash": hash_of(g.to_file_string().as_bytes()),
                "config": { "graph": graph, "subcommand": "reduce" },
                "n": g.n(),
                "hypergraph": serde_json::from_str::<serde_json::Value>(&red.h.to_json())?,
                "symmetric_graph": red.g_sym.to_file_string(),
                "edge_vertices": red.edge_of,
            });
            write_report(&out, &report)?;
            println!(
                "reduce: {} vertices, {} edge-vertices, {} hyperedges",
                red.n_orig,
                red.edge_of.len(),
                red.h.edges().len()
            );
        }
        Cmd::Solve {
            graph,
            hypergraph,
            delta,
            rounds,
            tol,
            max_iter,
            out,
        } => {
            let (h, hash, source) = match (&graph, &hypergraph) {
                (Some(p), None) => {
                    let g = load_graph(p)?;
                    let hash = hash_of(g.to_file_string().as_bytes());
                    (ssve_to_hsse(&g).h, hash, p.clone())
                }
                (None, Some(p)) => {
                    let h = load_hypergraph(p)?;
                    let hash = hash_of(h.to_json().as_bytes());
                    (h, hash, p.clone())
                }
                _ => {
                    return Err(Error::Parse(
                        "solve needs exactly one of --graph or --hypergraph".to_string(),
                    ))
                }
            };
            let rel = build_relaxation(&h, delta, rounds, RelaxOptions::default())?;
            let (_, value, stats) = solve_relaxation(&rel, &h, tol, max_iter)?;
            let report = json!({
                "instance_hash": hash,
                "config": {
                    "subcommand": "solve", "input": source, "delta": delta,
                    "rounds": rounds, "tol": tol, "max_iter": max_iter,
                },
                "objective": value,
                "solver": stats,
            });
            write_report(&out, &report)?;
            println!(
                "solve: objective {value:.6} in {} iterations",
                stats.iterations
            );
        }
        Cmd::Pipeline {
            graph,
            delta,
            rounds,
            tcap,
            theta,
            trials,
            tol,
            seed,
            out,
        } => {
            let g = load_graph(&graph)?;
            let mut config = PipelineConfig::new(delta, seed);
            config.r = rounds;
            config.t_cap = tcap;
            config.theta = theta;
            config.trials = trials;
            config.tol = tol;
            let report = full_pipeline(&g, &config)?;
            let value = serde_json::to_value(&report)?;
            write_report(&out, &value)?;
            println!(
                "pipeline: |S|={} phi_v={:.6} from {} trials (sdp {:.6})",
                report.chosen.size,
                report.chosen.phi_v,
                report.trials.len(),
                report.sdp_value
            );
        }
        Cmd::Oracle {
            graph,
            hypergraph,
            delta,
            convention,
            out,
        } => match (&graph, &hypergraph) {
            (Some(p), None) => {
                let g = load_graph(p)?;
                let (value, set) = exact_ssve(&g, delta, convention.into())?;
                let report = json!({
                    "instance_hash": hash_of(g.to_file_string().as_bytes()),
                    "config": { "subcommand": "oracle", "input": p, "delta": delta },
                    "value": value,
                    "set": set.indices(),
                });
                write_report(&out, &report)?;
                println!("oracle: value {value:.6}, set {:?}", set.indices());
            }
            (None, Some(p)) => {
                let h = load_hypergraph(p)?;
                let (value, set) = exact_hsse(&h, delta, None, convention.into())?;
                let report = json!({
                    "instance_hash": hash_of(h.to_json().as_bytes()),
                    "config": { "subcommand": "oracle", "input": p, "delta": delta },
                    "value": value,
                    "set": set.indices(),
                });
                write_report(&out, &report)?;
                println!("oracle: value {value:.6}, set {:?}", set.indices());
            }
            _ => {
                return Err(Error::Parse(
                    "oracle needs exactly one of --graph or --hypergraph".to_string(),
                ))
            }
        },
        Cmd::Gap { kind } => match kind {
            GapCmd::Single { d, out } => {
                let (h, _) = gap_single_edge(d);
                if let Some(path) = &out {
                    let mut text = h.to_json();
                    text.push('\n');
                    std::fs::write(path, text)?;
                }
                println!(
                    "gap single: d={d}, one hyperedge, integral optimum 1, relaxation value 1/{d}"
                );
            }
            GapCmd::Random { d, n, c, seed, out } => {
                let h = random_gap_hypergraph(d, n, c, seed)?;
                if let Some(path) = &out {
                    let mut text = h.to_json();
                    text.push('\n');
                    std::fs::write(path, text)?;
                }
                println!(
                    "gap random: {} vertices, {} hyperedges of arity {d}",
                    h.n(),
                    h.edges().len()
                );
            }
        },
        Cmd::Degreduce {
            graph,
            expander,
            out,
        } => {
            let g = load_graph(&graph)?;
            let cloud = match &expander {
                Some(p) => load_graph(p)?,
                None => ssve::generators::default_expander(g.max_degree()),
            };
            let product = replacement_product(&g, &cloud)?;
            if let Some(path) = &out {
                std::fs::write(path, product.to_file_string())?;
            }
            println!(
                "degreduce: {} x {} -> {} vertices, max degree {}",
                g.n(),
                cloud.n(),
                product.n(),
                product.max_degree()
            );
        }
        Cmd::VerifyLemma {
            trials,
            seed,
            variant,
            mirrored,
            out,
            csv,
        } => {
            let cells = rounding_lemma_sweep(trials, seed, variant, mirrored)?;
            if let Some(path) = &csv {
                std::fs::write(path, sweep_csv(&cells))?;
            }
            let all_pass = cells.iter().all(|c| c.pass);
            let max_ratio = cells.iter().fold(0.0f64, |m, c| m.max(c.ratio));
            let report = json!({
                "config": {
                    "subcommand": "verify-lemma", "trials": trials, "seed": seed,
                    "variant": variant, "mirrored": mirrored,
                },
                "cells": cells,
                "all_pass": all_pass,
                "max_ratio": max_ratio,
            });
            write_report(&out, &report)?;
            println!(
                "verify-lemma: {} cells, max ratio {max_ratio:.3}, {}",
                report["cells"].as_array().map_or(0, |c| c.len()),
                if all_pass { "all pass" } else { "FAIL" }
            );
            if !all_pass {
                return Err(Error::PremiseViolation(
                    "sweep ratio above calibration".to_string(),
                ));
            }
        }
        Cmd::VerifyCdf {
            trials,
            seed,
            out,
            csv,
        } => {
            let checks = cdf_fact_check(seed, trials)?;
            if let Some(path) = &csv {
                std::fs::write(path, fact_csv(&checks))?;
            }
            let failures: Vec<&ssve::verify::FactCheck> =
                checks.iter().filter(|c| !c.pass).collect();
            let report = json!({
                "config": { "subcommand": "verify-cdf", "trials": trials, "seed": seed },
                "checks": checks,
                "all_pass": failures.is_empty(),
            });
            write_report(&out, &report)?;
            println!(
                "verify-cdf: {} checks, {}",
                checks.len(),
                if failures.is_empty() {
                    "all pass".to_string()
                } else {
                    format!("{} FAIL (first: {:?})", failures.len(), failures[0])
                }
            );
            if !failures.is_empty() {
                return Err(Error::PremiseViolation(format!(
                    "CDF fact {} failed at {}",
                    failures[0].fact, failures[0].grid_point
                )));
            }
        }
        Cmd::VerifyConc {
            graph,
            delta,
            trials,
            tcap,
            theta,
            tol,
            seed,
            out,
        } => {
            let g = match &graph {
                Some(p) => load_graph(p)?,
                None => planted_instance(24, 6, 2, 5, seed).0,
            };
            let mut config = PipelineConfig::new(delta, seed);
            config.t_cap = tcap;
            config.theta = theta;
            config.tol = tol;
            config.trials = trials;
            let stage = solve_stage(&g, &config)?;
            let w_total = stage.red.h.total_vertex_weight();
            let mut weights = Vec::with_capacity(trials);
            for t in 0..trials as u64 {
                let s = shifted_hyperplane_round(&stage.shifted, seed.wrapping_add(t))?;
                weights.push(stage.red.h.set_weight(&s) / w_total);
            }
            let conc = concentration_check(&weights, delta)?;
            let report = json!({
                "instance_hash": hash_of(g.to_file_string().as_bytes()),
                "config": {
                    "subcommand": "verify-conc", "delta": delta, "trials": trials,
                    "tcap": tcap, "theta": config.effective_theta(), "seed": seed,
                },
                "concentration": conc,
                "relative_weights": weights,
            });
            write_report(&out, &report)?;
            println!(
                "verify-conc: {}/{} trials in [{:.4}, {:.4}] ({:.1}%)",
                conc.inside,
                conc.trials,
                conc.window[0],
                conc.window[1],
                100.0 * conc.frequency
            );
        }
    }
    Ok(())
}
