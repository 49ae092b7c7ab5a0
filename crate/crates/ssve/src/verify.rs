//! Monte Carlo and grid verification of the quantitative facts the rounding
//! analysis rests on: the hyperedge cut-probability bound, threshold
//! sidedness, Gaussian CDF inequalities, and size concentration. Binary
//! logarithms throughout.

use crate::gaussian::{phi, phi_inv, GaussianEnsembleSpec, NormalSource};
use crate::pd::PseudoDistribution;
use crate::round::{a_d_delta, a_d_delta_variant, C0_STAR};
use crate::{Error, Result};

/// Frozen calibration constant for the cut-probability ratio; fixed once
/// from the initial sweep and then used as a regression gate.
pub const CALIBRATION_K: f64 = 30.0;

/// z-score for 99% two-sided confidence intervals.
const Z99: f64 = 2.575829303549;

fn log2_inv(x: f64) -> f64 {
    (1.0 / x).log2()
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Estimated probability of the separation event with its 99% interval.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CutEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
}

/// Whether one draw separates the thresholds: some coordinate at-or-below
/// its threshold and some other strictly above.
pub fn is_separated(gs: &[f64], thresholds: &[f64]) -> bool {
    let mut below = false;
    let mut above = false;
    for (g, t) in gs.iter().zip(thresholds) {
        if *g <= *t {
            below = true;
        } else {
            above = true;
        }
    }
    below && above
}

/// Monte Carlo frequency of the separation event for a correlated Gaussian
/// ensemble with per-coordinate thresholds. Deterministic per seed.
pub fn estimate_cut_probability(
    spec: &GaussianEnsembleSpec,
    thresholds: &[f64],
    trials: usize,
    seed: u64,
) -> Result<CutEstimate> {
    if spec.d() != thresholds.len() {
        return Err(Error::PremiseViolation(format!(
            "{} thresholds for a {}-dimensional ensemble",
            thresholds.len(),
            spec.d()
        )));
    }
    if trials < 10_000 {
        return Err(Error::PremiseViolation(format!(
            "cut estimation needs at least 10000 trials, got {trials}"
        )));
    }
    let mut src = NormalSource::new(seed, 0xE57);
    let mut hits = 0usize;
    for _ in 0..trials {
        let gs = spec.sample_with(&mut src, None);
        if is_separated(&gs, thresholds) {
            hits += 1;
        }
    }
    let (ci_low, ci_high) = wilson_interval(hits, trials, Z99);
    Ok(CutEstimate {
        p_hat: hits as f64 / trials as f64,
        ci_low,
        ci_high,
        trials,
    })
}

/// A constructed hyperedge in the "nice" regime: equal biases mu, pairwise
/// Gaussian correlation 1 - beta^2 realized by placing each unit direction
/// as sqrt(1-beta^2) e_0 + beta e_i. With the dictionary ||z'_i||^2 =
/// mu(1-mu), the largest pairwise vector distance is nu = 8 mu (1-mu)
/// beta^2, so beta is chosen to hit the requested fraction of the premise
/// cap nu <= mu / A_{d,delta}.
#[derive(Debug, Clone)]
pub struct NiceEdge {
    pub d: usize,
    pub delta: f64,
    /// common bias; mirrored instances use 1 - mu per coordinate
    pub mu: f64,
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub nu_fraction: f64,
    pub variant: bool,
    pub mirrored: bool,
    pub mus: Vec<f64>,
    pub thresholds: Vec<f64>,
}

impl NiceEdge {
    /// Explicit unit directions matching the correlation structure.
    pub fn ensemble(&self) -> Result<GaussianEnsembleSpec> {
        let root = (1.0 - self.beta * self.beta).sqrt();
        let directions: Vec<Vec<f64>> = (0..self.d)
            .map(|i| {
                let mut b = vec![0.0; self.d + 1];
                b[0] = root;
                b[i + 1] = self.beta;
                b
            })
            .collect();
        GaussianEnsembleSpec::from_directions(directions)
    }
}

/// Build a premise-satisfying nice edge and assert the consequences the
/// analysis relies on (bias closeness and ratio, correlation floor, bias
/// floor, threshold bound) before any sampling.
pub fn nice_edge_instance(
    d: usize,
    delta: f64,
    nu_fraction: f64,
    variant: bool,
    mirrored: bool,
) -> Result<NiceEdge> {
    if d < 2 || !(delta > 0.0 && delta <= 0.25) || !(0.0..=1.0).contains(&nu_fraction) {
        return Err(Error::PremiseViolation(format!(
            "nice edge parameters d={d}, delta={delta}, nu_fraction={nu_fraction}"
        )));
    }
    let a = if variant {
        a_d_delta_variant(d, delta)
    } else {
        a_d_delta(d, delta)
    };
    let mu = delta;
    let nu = nu_fraction * mu / a;
    let beta = (nu / (8.0 * mu * (1.0 - mu))).sqrt();
    let rho = 1.0 - beta * beta;
    // premises of the cut-probability lemma
    if !(mu >= a * nu - 1e-15 && mu >= delta.powi(C0_STAR as i32)) {
        return Err(Error::PremiseViolation(format!(
            "bias {mu} below max({}, {})",
            a * nu,
            delta.powi(C0_STAR as i32)
        )));
    }
    // consequences that must hold by construction: equal biases are
    // trivially 2 nu - close with ratio 1; correlation floor 0.9; threshold
    // magnitude bound
    if nu > 0.0 && rho < 0.9 {
        return Err(Error::PremiseViolation(format!(
            "pairwise correlation {rho} below 0.9"
        )));
    }
    let theta_m = 1.0 - rho * rho;
    if theta_m > 2.0 * nu / mu + 1e-15 {
        return Err(Error::PremiseViolation(format!(
            "correlation defect {theta_m} above 2 nu / mu"
        )));
    }
    let t = phi_inv(mu)?;
    if t.abs() > 2.0 * (C0_STAR * log2_inv(delta / 2.0)).sqrt() {
        return Err(Error::PremiseViolation(format!(
            "threshold {t} outside the bias-floor bound"
        )));
    }
    let (mus, thresholds): (Vec<f64>, Vec<f64>) = if mirrored {
        (vec![1.0 - mu; d], vec![-t; d])
    } else {
        (vec![mu; d], vec![t; d])
    };
    Ok(NiceEdge {
        d,
        delta,
        mu,
        nu,
        alpha: mu.min(1.0 - mu),
        beta,
        rho,
        nu_fraction,
        variant,
        mirrored,
        mus,
        thresholds,
    })
}

/// One grid point of the cut-probability sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepCell {
    pub d: usize,
    pub delta: f64,
    pub nu_fraction: f64,
    pub variant: bool,
    pub mirrored: bool,
    pub nu: f64,
    pub alpha: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// sqrt(alpha nu log2 d log2(1/delta))
    pub bound: f64,
    /// p_hat / bound, the calibrated quantity
    pub ratio: f64,
    pub zeta_mean: f64,
    pub zeta_sq_mean: f64,
    /// samples where each sidedness implication had a nonvacuous premise
    pub sidedness_low: usize,
    pub sidedness_high: usize,
    pub pass: bool,
}

/// Sample one grid point. Every draw is checked against the two threshold
/// sidedness implications as hard assertions: a violation is an error, not
/// a statistic.
pub fn rounding_lemma_cell(
    edge: &NiceEdge,
    trials: usize,
    seed: u64,
) -> Result<SweepCell> {
    if trials < 10_000 {
        return Err(Error::PremiseViolation(format!(
            "sweep needs at least 10000 trials per cell, got {trials}"
        )));
    }
    let d = edge.d;
    let beta = edge.beta;
    let root = (1.0 - beta * beta).sqrt();
    let rho = edge.rho;
    let theta_m = 1.0 - rho * rho;
    // canonical (unmirrored) thresholds drive the sidedness checks; the
    // mirrored event corresponds one-to-one under negation
    let t = phi_inv(edge.mu)?;
    let t_prime = if rho > 0.0 { t / rho } else { t };
    let mut src = NormalSource::new(seed, 0xCE11);
    let mut hits = 0usize;
    let mut zeta_sum = 0.0;
    let mut zeta_sq_sum = 0.0;
    let mut sidedness_low = 0usize;
    let mut sidedness_high = 0usize;
    let mut gamma = vec![0.0; d + 1];
    let mut gs = vec![0.0; d];
    for _ in 0..trials {
        // g_i = <g, b_i> expands to root * gamma_0 + beta * gamma_i for the
        // structured directions; exact, not an approximation
        for x in gamma.iter_mut() {
            *x = src.next();
        }
        for i in 0..d {
            gs[i] = root * gamma[0] + beta * gamma[i + 1];
        }
        if edge.mirrored {
            // the mirrored event on (-g, -t); sidedness below runs in the
            // canonical frame on the negated draws
            for g in gs.iter_mut() {
                *g = -*g;
            }
        }
        if is_separated(&gs, &edge.thresholds) {
            hits += 1;
        }
        let canonical: Vec<f64> = if edge.mirrored {
            gs.iter().map(|g| -g).collect()
        } else {
            gs.clone()
        };
        if theta_m > 0.0 {
            let g1 = canonical[0];
            let denom = (1.0 - rho * rho).sqrt();
            let mut zeta_max = 0.0f64;
            for j in 1..d {
                let zeta = (canonical[j] - rho * g1) / denom;
                zeta_max = zeta_max.max(zeta.abs());
            }
            zeta_sum += zeta_max;
            zeta_sq_sum += zeta_max * zeta_max;
            let margin = 2.0 * zeta_max * theta_m.sqrt();
            if g1 <= t_prime - margin {
                sidedness_low += 1;
                for (j, &gj) in canonical.iter().enumerate().skip(1) {
                    if gj >= t {
                        return Err(Error::PremiseViolation(format!(
                            "low-side implication violated at coordinate {j}: g={gj}, t={t}"
                        )));
                    }
                }
            }
            if g1 >= t + margin {
                sidedness_high += 1;
                for (j, &gj) in canonical.iter().enumerate().skip(1) {
                    if gj <= t {
                        return Err(Error::PremiseViolation(format!(
                            "high-side implication violated at coordinate {j}: g={gj}, t={t}"
                        )));
                    }
                }
            }
        }
    }
    let (ci_low, ci_high) = wilson_interval(hits, trials, Z99);
    let p_hat = hits as f64 / trials as f64;
    let bound = (edge.alpha * edge.nu * (d.max(2) as f64).log2() * log2_inv(edge.delta)).sqrt();
    let ratio = if bound > 0.0 { p_hat / bound } else { 0.0 };
    let n = trials as f64;
    Ok(SweepCell {
        d,
        delta: edge.delta,
        nu_fraction: edge.nu_fraction,
        variant: edge.variant,
        mirrored: edge.mirrored,
        nu: edge.nu,
        alpha: edge.alpha,
        p_hat,
        ci_low,
        ci_high,
        bound,
        ratio,
        zeta_mean: zeta_sum / n,
        zeta_sq_mean: zeta_sq_sum / n,
        sidedness_low,
        sidedness_high,
        pass: bound == 0.0 && p_hat == 0.0 || ratio <= CALIBRATION_K,
    })
}

/// The full sweep over the standard grid: d in {4,16,64}, delta in
/// {2^-2..2^-6}, two disagreement levels relative to the premise cap.
pub fn rounding_lemma_sweep(
    trials: usize,
    seed: u64,
    variant: bool,
    mirrored: bool,
) -> Result<Vec<SweepCell>> {
    let mut cells = Vec::new();
    let mut cell_idx = 0u64;
    for &d in &[4usize, 16, 64] {
        for k in 2..=6u32 {
            let delta = 0.5f64.powi(k as i32);
            for &frac in &[1.0f64, 0.25] {
                let edge = nice_edge_instance(d, delta, frac, variant, mirrored)?;
                let mut cell =
                    rounding_lemma_cell(&edge, trials, seed.wrapping_add(cell_idx))?;
                cell.nu_fraction = frac;
                cell.variant = variant;
                cells.push(cell);
                cell_idx += 1;
            }
        }
    }
    Ok(cells)
}

/// CSV rendering of sweep results.
pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut out =
        String::from("d,delta,nu_fraction,variant,mirrored,nu,alpha,p_hat,ci_low,ci_high,bound,ratio,pass\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6},{}\n",
            c.d,
            c.delta,
            c.nu_fraction,
            c.variant,
            c.mirrored,
            c.nu,
            c.alpha,
            c.p_hat,
            c.ci_low,
            c.ci_high,
            c.bound,
            c.ratio,
            c.pass
        ));
    }
    out
}

/// One inequality check on a grid point.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FactCheck {
    pub fact: String,
    pub grid_point: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl FactCheck {
    fn leq(fact: &str, grid_point: String, lhs: f64, rhs: f64) -> Self {
        FactCheck {
            fact: fact.to_string(),
            grid_point,
            lhs,
            rhs,
            pass: lhs <= rhs,
        }
    }
}

/// CSV rendering of fact checks.
pub fn fact_csv(checks: &[FactCheck]) -> String {
    let mut out = String::from("fact,grid_point,lhs,rhs,pass\n");
    for c in checks {
        out.push_str(&format!(
            "{},{},{:.9e},{:.9e},{}\n",
            c.fact, c.grid_point, c.lhs, c.rhs, c.pass
        ));
    }
    out
}

/// Grid and Monte Carlo checks of the normal-CDF inequalities: the Lipschitz
/// difference bound, the Mills-ratio sandwich, the inverse-CDF magnitude
/// bound, the two relative-increment bounds (constants 4 and 24), and the
/// max-of-Gaussians tail and moment bounds (Monte Carlo, 2x slack).
pub fn cdf_fact_check(seed: u64, mc_trials: usize) -> Result<Vec<FactCheck>> {
    let mut checks = Vec::new();
    let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
    let xs = [-6.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 6.0];
    let zs = [-2.0, -1.0, -0.25, -0.01, 0.01, 0.25, 1.0, 2.0];
    // difference bound |Phi(x+z) - Phi(x)| <= |z| / sqrt(2 pi)
    for &x in &xs {
        for &z in &zs {
            let lhs = (phi(x + z)? - phi(x)?).abs();
            checks.push(FactCheck::leq(
                "cdf-difference",
                format!("x={x};z={z}"),
                lhs,
                z.abs() / sqrt_2pi,
            ));
        }
    }
    // Mills-ratio sandwich for t < 0
    for &t in &[-8.0f64, -6.0, -4.0, -3.0, -2.0, -1.0, -0.5, -0.1] {
        let density = (-t * t / 2.0).exp() / sqrt_2pi;
        let lower = density / ((2.0 + t * t).sqrt() + t.abs());
        let upper = density / t.abs();
        let v = phi(t)?;
        checks.push(FactCheck::leq(
            "cdf-sandwich-lower",
            format!("t={t}"),
            lower,
            v,
        ));
        checks.push(FactCheck::leq(
            "cdf-sandwich-upper",
            format!("t={t}"),
            v,
            upper,
        ));
    }
    // inverse magnitude: |Phi^-1(mu)| <= max(2 sqrt(log2(1/mu)), 2)
    for &mu in &[1e-9, 1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.25, 0.4, 0.49] {
        let lhs = phi_inv(mu)?.abs();
        let rhs = (2.0 * log2_inv(mu).sqrt()).max(2.0);
        checks.push(FactCheck::leq(
            "cdf-inverse-magnitude",
            format!("mu={mu}"),
            lhs,
            rhs,
        ));
    }
    // left-decrement bound, small eps: Phi(t) - Phi(t-eps) <= 4 eps Phi(t)
    // sqrt(log2(1/Phi(t)))
    for &t in &[-6.0, -4.0, -2.0, -1.0, -0.5, 0.0] {
        for &eps in &[0.001, 0.01, 0.05, 0.0625] {
            let pt = phi(t)?;
            let lhs = pt - phi(t - eps)?;
            let rhs = 4.0 * eps * pt * log2_inv(pt).sqrt();
            checks.push(FactCheck::leq(
                "cdf-left-decrement",
                format!("t={t};eps={eps}"),
                lhs,
                rhs,
            ));
        }
    }
    // right-increment bound with C = 24, valid while delta |t| <= 1
    for &t in &[-6.0f64, -4.0, -2.0, -1.0, -0.5, -0.25] {
        for &step in &[0.05f64, 0.1, 0.25, 0.5, 0.9] {
            if step * t.abs() > 1.0 {
                continue;
            }
            let pt = phi(t)?;
            let lhs = phi(t + step)? - pt;
            let rhs = 24.0 * pt * step * log2_inv(pt).sqrt();
            checks.push(FactCheck::leq(
                "cdf-right-increment",
                format!("t={t};step={step}"),
                lhs,
                rhs,
            ));
        }
    }
    // max-of-Gaussians bounds for jointly distributed marginally standard
    // families: independent and uniformly correlated ensembles
    if mc_trials < 10_000 {
        return Err(Error::PremiseViolation(format!(
            "CDF Monte Carlo needs at least 10000 trials, got {mc_trials}"
        )));
    }
    let c = 4.0;
    for &d in &[8usize, 64] {
        for &rho in &[0.0f64, 0.6] {
            let mut src = NormalSource::new(seed, 0xFAC7 + d as u64 + (rho * 10.0) as u64);
            let shared = rho.sqrt();
            let fresh = (1.0 - rho).sqrt();
            let mut tail_hits = 0usize;
            let mut max_abs_sum = 0.0;
            let mut max_sq_sum = 0.0;
            let logd = (d as f64).log2();
            let tail_level = (c * logd).sqrt();
            for _ in 0..mc_trials {
                let g0 = src.next();
                let mut max_abs = 0.0f64;
                for _ in 0..d {
                    let g = shared * g0 + fresh * src.next();
                    max_abs = max_abs.max(g.abs());
                }
                if max_abs >= tail_level {
                    tail_hits += 1;
                }
                max_abs_sum += max_abs;
                max_sq_sum += max_abs * max_abs;
            }
            let n = mc_trials as f64;
            let point = format!("d={d};rho={rho}");
            // 2x Monte Carlo slack on all three, as these are sampled
            checks.push(FactCheck::leq(
                "gauss-max-tail",
                point.clone(),
                tail_hits as f64 / n,
                2.0 * (-c * logd / 4.0).exp(),
            ));
            checks.push(FactCheck::leq(
                "gauss-max-square",
                point.clone(),
                max_sq_sum / n,
                2.0 * c * logd,
            ));
            checks.push(FactCheck::leq(
                "gauss-max-abs",
                point,
                max_abs_sum / n,
                2.0 * (c * logd).sqrt(),
            ));
        }
    }
    Ok(checks)
}

/// Summary of how often rounded sets land in the relative-weight window
/// [0.9, 1.1] delta.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConcentrationReport {
    pub trials: usize,
    pub inside: usize,
    pub frequency: f64,
    pub delta: f64,
    pub window: [f64; 2],
}

/// Tally relative weights of rounded sets against the concentration window.
pub fn concentration_check(relative_weights: &[f64], delta: f64) -> Result<ConcentrationReport> {
    if relative_weights.len() < 100 {
        return Err(Error::PremiseViolation(format!(
            "concentration check needs at least 100 trials, got {}",
            relative_weights.len()
        )));
    }
    let window = [0.9 * delta, 1.1 * delta];
    let inside = relative_weights
        .iter()
        .filter(|&&w| w >= window[0] && w <= window[1])
        .count();
    Ok(ConcentrationReport {
        trials: relative_weights.len(),
        inside,
        frequency: inside as f64 / relative_weights.len() as f64,
        delta,
        window,
    })
}

/// Information-theoretic sanity on the conditioned locals: each pairwise
/// mutual information lies in [0,1] bits and dominates the squared
/// covariance.
pub fn information_diagnostics(pd: &PseudoDistribution) -> Vec<FactCheck> {
    let mut out = Vec::new();
    for i in 0..pd.n() {
        for j in (i + 1)..pd.n() {
            let mi = pd.pair_mi(i, j);
            out.push(FactCheck {
                fact: "mi-range".into(),
                grid_point: format!("i={i};j={j}"),
                lhs: mi,
                rhs: 1.0,
                pass: (0.0..=1.0).contains(&mi),
            });
            out.push(FactCheck::leq(
                "cov-vs-mi",
                format!("i={i};j={j}"),
                pd.cov(i, j).abs(),
                mi.sqrt() + 1e-9,
            ));
        }
    }
    out
}
