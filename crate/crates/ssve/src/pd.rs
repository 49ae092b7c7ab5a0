//! Pseudo-distributions over Boolean variables and their vector form.
//!
//! A degree-R pseudo-distribution is stored as the table of +-1 moments
//! Etilde[prod_{i in T} X_i] for |T| <= R, with X_i = 1 - 2 x_i (so X_i = +1
//! means x_i = 0). Conditioning on x_i = a multiplies by the indicator
//! (1 + s_a X_i)/2 and renormalizes, consuming two degrees per the calculus
//! used here. The degree-2 block factors into a vector solution
//! v_i = (1 - 2 mu_i) phibar - 2 z_i.

use std::collections::HashMap;

use rand::prelude::*;

use crate::gaussian::stream_rng;
use crate::graph::CutSet;
use crate::{Error, Result};

/// Tolerance below which a conditioning probability is considered degenerate.
pub const MIN_CONDITION_PROB: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct PseudoDistribution {
    n: usize,
    degree: usize,
    /// moments keyed by sorted variable subsets; the empty key is implicit 1
    moments: HashMap<Vec<usize>, f64>,
}

impl PseudoDistribution {
    pub fn new(n: usize, degree: usize, moments: HashMap<Vec<usize>, f64>) -> Self {
        assert!(degree >= 2 && degree % 2 == 0, "degree must be even >= 2");
        PseudoDistribution { n, degree, moments }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Point mass on the indicator of S, at any even degree.
    pub fn integral(n: usize, s: &CutSet, degree: usize) -> Self {
        let signs: Vec<f64> = (0..n).map(|i| if s.contains(i) { -1.0 } else { 1.0 }).collect();
        let mut moments = HashMap::new();
        let mut subset = Vec::new();
        fill_products(&signs, 0, degree, &mut subset, 1.0, &mut moments);
        Self::new(n, degree, moments)
    }

    /// Independent product distribution with the given biases.
    pub fn product(n: usize, mus: &[f64], degree: usize) -> Self {
        assert_eq!(mus.len(), n);
        let means: Vec<f64> = mus.iter().map(|m| 1.0 - 2.0 * m).collect();
        let mut moments = HashMap::new();
        let mut subset = Vec::new();
        fill_products(&means, 0, degree, &mut subset, 1.0, &mut moments);
        Self::new(n, degree, moments)
    }

    /// Moment of the +-1 monomial over the given variable multiset; repeated
    /// variables cancel (X_i^2 = 1).
    pub fn moment(&self, vars: &[usize]) -> f64 {
        let mut t: Vec<usize> = vars.to_vec();
        t.sort_unstable();
        // cancel equal adjacent pairs
        let mut reduced = Vec::with_capacity(t.len());
        for v in t {
            if reduced.last() == Some(&v) {
                reduced.pop();
            } else {
                reduced.push(v);
            }
        }
        if reduced.is_empty() {
            return 1.0;
        }
        assert!(
            reduced.len() <= self.degree,
            "moment of degree {} beyond pd degree {}",
            reduced.len(),
            self.degree
        );
        *self.moments.get(&reduced).unwrap_or(&0.0)
    }

    /// widetilde-Pr[x_i = 1].
    pub fn pr1(&self, i: usize) -> f64 {
        (1.0 - self.moment(&[i])) / 2.0
    }

    /// Pairwise local distribution [p00, p01, p10, p11] (indices x_i, x_j).
    pub fn pair_locals(&self, i: usize, j: usize) -> [f64; 4] {
        let mi = self.moment(&[i]);
        let mj = self.moment(&[j]);
        let mij = self.moment(&[i, j]);
        let p = |sa: f64, sb: f64| (1.0 + sa * mi + sb * mj + sa * sb * mij) / 4.0;
        [p(1.0, 1.0), p(1.0, -1.0), p(-1.0, 1.0), p(-1.0, -1.0)]
    }

    /// widetilde-Pr[x_i != x_j].
    pub fn pr_neq(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        (1.0 - self.moment(&[i, j])) / 2.0
    }

    /// widetilde-Cov(x_i, x_j).
    pub fn cov(&self, i: usize, j: usize) -> f64 {
        let locals = self.pair_locals(i, j);
        locals[3] - self.pr1(i) * self.pr1(j)
    }

    /// Degree-2 moment matrix of side n+1 (row 0 is the constant monomial).
    pub fn degree2_matrix(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n;
        let mut m = nalgebra::DMatrix::zeros(n + 1, n + 1);
        m[(0, 0)] = 1.0;
        for i in 0..n {
            let v = self.moment(&[i]);
            m[(0, i + 1)] = v;
            m[(i + 1, 0)] = v;
            m[(i + 1, i + 1)] = 1.0;
            for j in (i + 1)..n {
                let v = self.moment(&[i, j]);
                m[(i + 1, j + 1)] = v;
                m[(j + 1, i + 1)] = v;
            }
        }
        m
    }

    /// Build a degree-2 pd from a moment matrix (side n+1).
    pub fn from_degree2_matrix(m: &nalgebra::DMatrix<f64>) -> Self {
        let n = m.nrows() - 1;
        let mut moments = HashMap::new();
        for i in 0..n {
            moments.insert(vec![i], m[(0, i + 1)]);
            for j in (i + 1)..n {
                moments.insert(vec![i, j], m[(i + 1, j + 1)]);
            }
        }
        Self::new(n, 2, moments)
    }

    /// Condition on x_i = a. Requires degree >= 4; the result has degree R-2.
    pub fn condition(&self, i: usize, a: u8) -> Result<Self> {
        if self.degree < 4 {
            return Err(Error::Relaxation(format!(
                "conditioning needs degree >= 4, have {}",
                self.degree
            )));
        }
        let s_a = if a == 0 { 1.0 } else { -1.0 };
        let p = (1.0 + s_a * self.moment(&[i])) / 2.0;
        if p < MIN_CONDITION_PROB {
            return Err(Error::DegenerateConditioning { i, a, p });
        }
        let new_degree = self.degree - 2;
        let mut moments = HashMap::new();
        for (t, &m) in &self.moments {
            if t.len() > new_degree {
                continue;
            }
            let mut with_i = t.clone();
            with_i.push(i);
            let cross = self.moment(&with_i);
            moments.insert(t.clone(), (m + s_a * cross) / (2.0 * p));
        }
        Ok(Self::new(self.n, new_degree, moments))
    }

    /// Average pairwise mutual information (base-2) over all unordered pairs,
    /// computed from the pairwise locals, clamped into [0, 1].
    pub fn avg_pairwise_mi(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                total += self.pair_mi(i, j);
                pairs += 1;
            }
        }
        total / pairs as f64
    }

    /// Mutual information I(x_i; x_j) in bits from the pair locals; negative
    /// local probabilities within solver tolerance are clamped to zero.
    pub fn pair_mi(&self, i: usize, j: usize) -> f64 {
        let mut p = self.pair_locals(i, j);
        let mut sum = 0.0;
        for q in &mut p {
            *q = q.max(0.0);
            sum += *q;
        }
        if sum <= 0.0 {
            return 0.0;
        }
        for q in &mut p {
            *q /= sum;
        }
        let pi1 = p[2] + p[3];
        let pj1 = p[1] + p[3];
        let marg = [
            (1.0 - pi1) * (1.0 - pj1),
            (1.0 - pi1) * pj1,
            pi1 * (1.0 - pj1),
            pi1 * pj1,
        ];
        let mut mi = 0.0;
        for k in 0..4 {
            if p[k] > 0.0 && marg[k] > 0.0 {
                mi += p[k] * (p[k] / marg[k]).log2();
            }
        }
        mi.clamp(0.0, 1.0)
    }

    /// Largest violation of pairwise local nonnegativity, for diagnostics.
    pub fn worst_pair_local_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                for p in self.pair_locals(i, j) {
                    worst = worst.max(-p);
                }
            }
        }
        worst
    }

    /// Smallest eigenvalue of the degree-2 moment matrix.
    pub fn min_degree2_eigenvalue(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.degree2_matrix());
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn fill_products(
    means: &[f64],
    start: usize,
    budget: usize,
    subset: &mut Vec<usize>,
    value: f64,
    out: &mut HashMap<Vec<usize>, f64>,
) {
    for i in start..means.len() {
        if subset.len() >= budget {
            break;
        }
        subset.push(i);
        let v = value * means[i];
        out.insert(subset.clone(), v);
        fill_products(means, i + 1, budget, subset, v, out);
        subset.pop();
    }
}

/// One step of the conditioning trace.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionStep {
    pub variable: usize,
    pub value: u8,
    pub probability: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditioningTrace {
    pub requested_rounds: usize,
    pub performed_rounds: usize,
    pub steps: Vec<ConditionStep>,
    pub mi_before: f64,
    pub mi_after: f64,
}

/// Sample a uniformly random subset of size <= t_cap (capped by the degree
/// budget: each conditioned variable consumes two degrees) and condition on
/// an assignment drawn from the pd's own local distribution, sequentially.
pub fn conditioning_round(
    pd: &PseudoDistribution,
    t_cap: usize,
    seed: u64,
) -> Result<(PseudoDistribution, ConditioningTrace)> {
    let budget = (pd.degree() - 2) / 2;
    let t_eff = t_cap.min(budget);
    let mi_before = pd.avg_pairwise_mi();
    let mut rng = stream_rng(seed, 0xC0DD);
    let mut vars: Vec<usize> = (0..pd.n()).collect();
    vars.shuffle(&mut rng);
    vars.truncate(t_eff);
    let mut current = pd.clone();
    let mut steps = Vec::new();
    for &i in &vars {
        let mu = current.pr1(i);
        let a: u8 = if rng.gen::<f64>() < mu { 1 } else { 0 };
        let p = if a == 1 { mu } else { 1.0 - mu };
        current = current.condition(i, a)?;
        steps.push(ConditionStep {
            variable: i,
            value: a,
            probability: p,
        });
    }
    let mi_after = current.avg_pairwise_mi();
    let trace = ConditioningTrace {
        requested_rounds: t_cap,
        performed_rounds: t_eff,
        steps,
        mi_before,
        mi_after,
    };
    Ok((current, trace))
}

/// Unit vectors realizing a degree-2 pseudo-distribution: v_i = (1-2mu_i)
/// phibar - 2 z_i with z_i orthogonal to phibar in expectation.
#[derive(Debug, Clone)]
pub struct VectorSolution {
    pub phibar: Vec<f64>,
    pub vs: Vec<Vec<f64>>,
    pub mus: Vec<f64>,
    pub zs: Vec<Vec<f64>>,
    pub r: usize,
}

impl VectorSolution {
    /// Derive mus and zs from phibar and the v_i.
    pub fn from_vectors(phibar: Vec<f64>, vs: Vec<Vec<f64>>) -> Self {
        let r = phibar.len();
        let mus: Vec<f64> = vs
            .iter()
            .map(|v| ((1.0 - crate::gaussian::dot(v, &phibar)) / 2.0).clamp(0.0, 1.0))
            .collect();
        let zs: Vec<Vec<f64>> = vs
            .iter()
            .zip(&mus)
            .map(|(v, &mu)| {
                (0..r)
                    .map(|k| ((1.0 - 2.0 * mu) * phibar[k] - v[k]) / 2.0)
                    .collect()
            })
            .collect();
        VectorSolution {
            phibar,
            vs,
            mus,
            zs,
            r,
        }
    }

    pub fn n(&self) -> usize {
        self.vs.len()
    }

    /// u_i = (phibar - v_i)/2 = mu_i phibar + z_i.
    pub fn u(&self, i: usize) -> Vec<f64> {
        (0..self.r)
            .map(|k| (self.phibar[k] - self.vs[i][k]) / 2.0)
            .collect()
    }

    /// Pairwise disagreement read off the vectors: ||v_i - v_j||^2 / 4.
    pub fn pr_neq(&self, i: usize, j: usize) -> f64 {
        dist_sq(&self.vs[i], &self.vs[j]) / 4.0
    }

    /// Gram matrix of [phibar, v_1..v_n]; rebuilding it is the roundtrip test
    /// against the degree-2 block.
    pub fn gram(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        let mut rows: Vec<&[f64]> = Vec::with_capacity(n + 1);
        rows.push(&self.phibar);
        for v in &self.vs {
            rows.push(v);
        }
        let mut m = nalgebra::DMatrix::zeros(n + 1, n + 1);
        for i in 0..=n {
            for j in i..=n {
                let d = crate::gaussian::dot(rows[i], rows[j]);
                m[(i, j)] = d;
                m[(j, i)] = d;
            }
        }
        m
    }
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Factor the degree-2 block M = V^T V and read off the vector solution.
/// Rows are renormalized to exactly unit length (they agree with 1 to within
/// the solver tolerance already), so the dictionary identities hold to
/// floating-point accuracy.
pub fn extract_vectors(pd: &PseudoDistribution) -> Result<VectorSolution> {
    let m = pd.degree2_matrix();
    let side = m.nrows();
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut vecs: Vec<Vec<f64>> = vec![vec![0.0; side]; side];
    for k in 0..side {
        let lam = eig.eigenvalues[k];
        if lam < -1e-6 {
            return Err(Error::Relaxation(format!(
                "moment matrix indefinite: eigenvalue {lam}"
            )));
        }
        let s = lam.max(0.0).sqrt();
        for row in 0..side {
            vecs[row][k] = s * eig.eigenvectors[(row, k)];
        }
    }
    for (row, v) in vecs.iter_mut().enumerate() {
        let norm = crate::gaussian::dot(v, v).sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Relaxation(format!(
                "moment-matrix row {row} has norm {norm}, expected 1"
            )));
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    let phibar = vecs[0].clone();
    let vs = vecs[1..].to_vec();
    Ok(VectorSolution::from_vectors(phibar, vs))
}
