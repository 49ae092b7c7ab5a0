//! Self-contained splitting solver for the moment-matrix SDPs.
//!
//! Problems are posed in conic form: minimize c'x subject to Ax = b and
//! x in K, where x stacks the scaled upper triangle of a symmetric matrix
//! (off-diagonals times sqrt 2, so Euclidean and Frobenius norms agree),
//! a block of free scalars, and a block of nonnegative slacks. The solver is
//! ADMM with over-relaxation: the affine step projects onto {Ax = b} by a
//! conjugate-gradient solve of the normal equations, the cone step is an
//! eigenvalue clamp plus a slack clamp. Everything is deterministic.

use crate::{Error, Result};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Row-compressed sparse matrix.
#[derive(Debug, Clone, Default)]
pub struct SparseMatrix {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub cols: usize,
}

impl SparseMatrix {
    pub fn new(cols: usize) -> Self {
        SparseMatrix {
            rows: Vec::new(),
            cols,
        }
    }

    pub fn push_row(&mut self, mut entries: Vec<(usize, f64)>) {
        // merge duplicate column indices so rows stay canonical
        entries.sort_unstable_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            debug_assert!(c < self.cols);
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        self.rows.push(merged);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// y = A x
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (r, row) in self.rows.iter().enumerate() {
            y[r] = row.iter().map(|&(c, v)| v * x[c]).sum();
        }
    }

    /// x += A' y
    pub fn mul_transpose_add(&self, y: &[f64], x: &mut [f64]) {
        for (r, row) in self.rows.iter().enumerate() {
            let yr = y[r];
            if yr != 0.0 {
                for &(c, v) in row {
                    x[c] += v * yr;
                }
            }
        }
    }
}

/// Index of the (i, j) entry, i <= j, in the packed upper triangle of an
/// m x m symmetric matrix.
pub fn svec_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < m);
    i * (2 * m - i - 1) / 2 + j
}

pub fn svec_len(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Conic program: minimize c'x with Ax = b,
/// x = [svec(X) | free scalars | nonnegative slacks], X PSD.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    /// PSD block side
    pub m: usize,
    /// number of free scalar variables after the matrix block
    pub free: usize,
    /// number of nonnegative slack variables at the end
    pub slacks: usize,
    pub c: Vec<f64>,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
}

impl ConicProblem {
    pub fn nvars(&self) -> usize {
        svec_len(self.m) + self.free + self.slacks
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub constraint_residual: f64,
    pub objective: f64,
}

struct AffineProjector {
    a: SparseMatrix,
    b: Vec<f64>,
    /// warm-started normal-equation solution
    y: Vec<f64>,
    scratch_ax: Vec<f64>,
    scratch_r: Vec<f64>,
    scratch_p: Vec<f64>,
    scratch_ap: Vec<f64>,
    scratch_atp: Vec<f64>,
}

const CG_REG: f64 = 1e-9;

impl AffineProjector {
    fn new(a: SparseMatrix, b: Vec<f64>) -> Self {
        let rows = a.nrows();
        let cols = a.cols;
        AffineProjector {
            a,
            b,
            y: vec![0.0; rows],
            scratch_ax: vec![0.0; rows],
            scratch_r: vec![0.0; rows],
            scratch_p: vec![0.0; rows],
            scratch_ap: vec![0.0; rows],
            scratch_atp: vec![0.0; cols],
        }
    }

    /// w = (A A' + reg I) v
    fn normal_mul(&mut self, v: &[f64], w: &mut [f64]) {
        self.scratch_atp.iter_mut().for_each(|x| *x = 0.0);
        self.a.mul_transpose_add(v, &mut self.scratch_atp);
        self.a.mul(&self.scratch_atp, w);
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi += CG_REG * vi;
        }
    }

    /// Overwrite x with its Euclidean projection onto {x : Ax = b}.
    fn project(&mut self, x: &mut [f64], tol: f64) {
        let rows = self.a.nrows();
        if rows == 0 {
            return;
        }
        // solve (AA' + reg) y = Ax - b, then x -= A'y; warm start from the
        // previous projection's multipliers
        self.a.mul(x, &mut self.scratch_ax);
        let mut rhs = std::mem::take(&mut self.scratch_ax);
        for r in 0..rows {
            rhs[r] -= self.b[r];
        }
        let mut y = std::mem::take(&mut self.y);
        let mut ap = std::mem::take(&mut self.scratch_ap);
        self.normal_mul(&y, &mut ap);
        let mut res = std::mem::take(&mut self.scratch_r);
        for r in 0..rows {
            res[r] = rhs[r] - ap[r];
        }
        let mut p = std::mem::take(&mut self.scratch_p);
        p.copy_from_slice(&res);
        let mut rr: f64 = res.iter().map(|v| v * v).sum();
        let rhs_norm: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        let limit = (tol * rhs_norm).powi(2);
        let max_cg = 4 * rows.max(32);
        let mut it = 0;
        while rr > limit && it < max_cg {
            self.normal_mul(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rr / pap;
            for r in 0..rows {
                y[r] += alpha * p[r];
                res[r] -= alpha * ap[r];
            }
            let rr_new: f64 = res.iter().map(|v| v * v).sum();
            let beta = rr_new / rr;
            rr = rr_new;
            for r in 0..rows {
                p[r] = res[r] + beta * p[r];
            }
            it += 1;
        }
        self.scratch_atp.iter_mut().for_each(|v| *v = 0.0);
        self.a.mul_transpose_add(&y, &mut self.scratch_atp);
        for (xi, d) in x.iter_mut().zip(&self.scratch_atp) {
            *xi -= d;
        }
        self.scratch_ax = rhs;
        self.y = y;
        self.scratch_ap = ap;
        self.scratch_r = res;
        self.scratch_p = p;
    }
}

/// Eigenvalue clamp of the packed scaled upper triangle.
fn project_psd(x: &mut [f64], m: usize) {
    if m == 0 {
        return;
    }
    let mut mat = nalgebra::DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = x[svec_index(m, i, j)];
            let entry = if i == j { v } else { v / SQRT2 };
            mat[(i, j)] = entry;
            mat[(j, i)] = entry;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(mat);
    let mut out = nalgebra::DMatrix::zeros(m, m);
    for k in 0..m {
        let lam = eig.eigenvalues[k];
        if lam > 0.0 {
            let col = eig.eigenvectors.column(k);
            for i in 0..m {
                let li = lam * col[i];
                if li != 0.0 {
                    for j in 0..m {
                        out[(i, j)] += li * col[j];
                    }
                }
            }
        }
    }
    for i in 0..m {
        for j in i..m {
            x[svec_index(m, i, j)] = if i == j {
                out[(i, j)]
            } else {
                out[(i, j)] * SQRT2
            };
        }
    }
}

/// Saved ADMM state. Passing the state of a finished solve into
/// [`solve_warm`] on a nearby problem (same variable layout, perturbed data)
/// typically cuts the iteration count by a large factor.
#[derive(Debug, Clone)]
pub struct WarmStart {
    z: Vec<f64>,
    u: Vec<f64>,
    rho: f64,
}

/// ADMM with over-relaxation and adaptive penalty. Returns the cone-feasible
/// iterate z (exactly PSD and nonnegative where required, affine-feasible up
/// to the reported residual).
pub fn solve(problem: &ConicProblem, tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveStats)> {
    let (z, stats, _) = solve_warm(problem, tol, max_iter, None)?;
    Ok((z, stats))
}

/// [`solve`] with optional warm starting. The returned [`WarmStart`] captures
/// the final iterate and can seed the next solve.
pub fn solve_warm(
    problem: &ConicProblem,
    tol: f64,
    max_iter: usize,
    warm: Option<&WarmStart>,
) -> Result<(Vec<f64>, SolveStats, WarmStart)> {
    let n = problem.nvars();
    if problem.c.len() != n || problem.a.cols != n || problem.a.nrows() != problem.b.len() {
        return Err(Error::Relaxation(format!(
            "conic problem shape mismatch: {} vars, c {}, A {}x{}, b {}",
            n,
            problem.c.len(),
            problem.a.nrows(),
            problem.a.cols,
            problem.b.len()
        )));
    }
    // normalize rows of [A | b] so residuals are comparable across rows
    let mut a = SparseMatrix::new(n);
    let mut b = Vec::with_capacity(problem.b.len());
    for (row, &rhs) in problem.a.rows.iter().zip(&problem.b) {
        let norm: f64 = row.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            if rhs.abs() > 1e-12 {
                return Err(Error::Relaxation("inconsistent empty row".into()));
            }
            continue;
        }
        a.rows
            .push(row.iter().map(|&(c, v)| (c, v / norm)).collect());
        b.push(rhs / norm);
    }
    let mut projector = AffineProjector::new(a, b);

    let svec = svec_len(problem.m);
    let slack_start = svec + problem.free;
    let alpha = 1.6;
    let mut rho: f64 = 1.0;
    let mut x = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut u = vec![0.0; n];
    if let Some(w) = warm {
        if w.z.len() == n {
            z.copy_from_slice(&w.z);
            u.copy_from_slice(&w.u);
            rho = w.rho;
        }
    }
    let mut z_prev = vec![0.0; n];
    let mut stats = SolveStats {
        iterations: 0,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        constraint_residual: f64::INFINITY,
        objective: f64::NAN,
    };
    let scale = (n as f64).sqrt();
    for it in 0..max_iter {
        // x-step: projection of z - u - c/rho onto the affine set; the inner
        // solve only needs to outpace the outer residual (inexact ADMM)
        for i in 0..n {
            x[i] = z[i] - u[i] - problem.c[i] / rho;
        }
        let cg_tol = (0.05 * stats.primal_residual).clamp((tol * 1e-2).max(1e-12), 1e-3);
        projector.project(&mut x, cg_tol);
        // over-relaxed cone step
        z_prev.copy_from_slice(&z);
        for i in 0..n {
            z[i] = alpha * x[i] + (1.0 - alpha) * z_prev[i] + u[i];
        }
        project_psd(&mut z[..svec], problem.m);
        for v in &mut z[slack_start..] {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        for i in 0..n {
            u[i] += alpha * x[i] + (1.0 - alpha) * z_prev[i] - z[i];
        }
        let pri: f64 = x
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            / scale;
        let dua: f64 = z
            .iter()
            .zip(&z_prev)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            * rho
            / scale;
        stats.iterations = it + 1;
        stats.primal_residual = pri;
        stats.dual_residual = dua;
        if pri < tol && dua < tol {
            break;
        }
        // adaptive penalty keeps the two residuals balanced
        if (it + 1) % 25 == 0 {
            if pri > 10.0 * dua && rho < 1e6 {
                rho *= 2.0;
                for v in &mut u {
                    *v *= 0.5;
                }
            } else if dua > 10.0 * pri && rho > 1e-6 {
                rho *= 0.5;
                for v in &mut u {
                    *v *= 2.0;
                }
            }
        }
    }
    if !(stats.primal_residual < tol * 50.0 && stats.dual_residual < tol * 50.0) {
        return Err(Error::SolverNonConvergence(format!(
            "after {} iterations: primal {:.3e}, dual {:.3e}",
            stats.iterations, stats.primal_residual, stats.dual_residual
        )));
    }
    // report constraint violation of the cone-feasible iterate
    let mut ax = vec![0.0; projector.a.nrows()];
    projector.a.mul(&z, &mut ax);
    stats.constraint_residual = ax
        .iter()
        .zip(&projector.b)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    stats.objective = problem.c.iter().zip(&z).map(|(c, z)| c * z).sum();
    let state = WarmStart {
        z: z.clone(),
        u,
        rho,
    };
    Ok((z, stats, state))
}

/// Unpack the PSD block of a solution vector into a full symmetric matrix.
pub fn unpack_matrix(x: &[f64], m: usize) -> nalgebra::DMatrix<f64> {
    let mut mat = nalgebra::DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = x[svec_index(m, i, j)];
            let entry = if i == j { v } else { v / SQRT2 };
            mat[(i, j)] = entry;
            mat[(j, i)] = entry;
        }
    }
    mat
}
