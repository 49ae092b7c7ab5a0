//! Gaussian CDF numerics and correlated-Gaussian sampling.
//!
//! `phi` evaluates the standard normal CDF through the complementary error
//! function (power series below 1.5, Lentz continued fraction above), which
//! keeps full relative accuracy deep into the tail. `phi_inv` is bracketed
//! monotone root-finding on `phi`. Standard normals come from an exact
//! Box-Muller transform over a counter-based ChaCha12 stream, so every trial
//! is reproducible from `(seed, trial-index)`.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// erf by its Maclaurin series; accurate for |x| <= 1.5.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for n in 1..200 {
        term *= -x2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// erfc for x >= 1.5 via the Laplace continued fraction (modified Lentz).
fn erfc_cf(x: f64) -> f64 {
    let x2 = x * x;
    // erfc(x) = exp(-x^2)/(x*sqrt(pi)) * 1/(1 + a1/(1 + a2/(1 + ...))), a_n = n/(2x^2)
    let tiny = 1e-300;
    let mut f: f64 = 1.0;
    let mut c: f64 = f;
    let mut d: f64 = 0.0;
    for n in 1..300 {
        let a = n as f64 / (2.0 * x2);
        d = 1.0 + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    // f now holds 1 + a1/(1 + a2/(...)); the fraction itself is its reciprocal
    (-x2).exp() / (x * std::f64::consts::PI.sqrt()) / f
}

/// Complementary error function, full double accuracy over the real line.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 1.5 {
        1.0 - erf_series(x)
    } else if x > 27.0 {
        0.0 // below 4e-319, under f64
    } else {
        erfc_cf(x)
    }
}

/// Standard normal CDF.
pub fn phi(t: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(Error::Parse("phi of NaN".into()));
    }
    Ok(0.5 * erfc(-t * FRAC_1_SQRT_2))
}

/// Standard normal density.
pub fn normal_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse standard normal CDF via bisection on the monotone `phi` bracket.
pub fn phi_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::CdfRange(p));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let v = phi(mid)?;
        if v == p {
            return Ok(mid);
        }
        if v < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    // a couple of Newton polish steps; the density is available in closed form
    for _ in 0..3 {
        let f = phi(t)? - p;
        let d = normal_pdf(t);
        if d > 0.0 {
            let step = f / d;
            if step.is_finite() && step.abs() < 1.0 {
                t -= step;
            }
        }
    }
    Ok(t)
}

/// Deterministic per-(seed, stream) RNG; streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard normal source: exact Box-Muller over uniform draws.
pub struct NormalSource {
    rng: ChaCha12Rng,
    spare: Option<f64>,
}

impl NormalSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        NormalSource {
            rng: stream_rng(seed, stream),
            spare: None,
        }
    }

    pub fn from_rng(rng: ChaCha12Rng) -> Self {
        NormalSource { rng, spare: None }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0,1] so the log is finite
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.next();
        }
    }
}

/// Correlated Gaussian ensemble: unit directions in ambient dimension r.
/// Sampling draws one ambient standard Gaussian and projects.
#[derive(Debug, Clone)]
pub struct GaussianEnsembleSpec {
    directions: Vec<Vec<f64>>,
    ambient: usize,
}

impl GaussianEnsembleSpec {
    pub fn from_directions(directions: Vec<Vec<f64>>) -> Result<Self> {
        let ambient = directions.first().map(|d| d.len()).unwrap_or(0);
        for d in &directions {
            if d.len() != ambient {
                return Err(Error::NotPsd("direction dimensions differ".into()));
            }
            let norm: f64 = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::NotPsd(format!("direction norm {norm} != 1")));
            }
        }
        Ok(GaussianEnsembleSpec { directions, ambient })
    }

    /// Build directions realizing a given correlation matrix via its
    /// eigendecomposition; rejects matrices indefinite beyond 1e-9.
    pub fn from_correlation(rho: &[Vec<f64>]) -> Result<Self> {
        let d = rho.len();
        let mut m = nalgebra::DMatrix::zeros(d, d);
        for i in 0..d {
            if rho[i].len() != d {
                return Err(Error::NotPsd("correlation matrix not square".into()));
            }
            if (rho[i][i] - 1.0).abs() > 1e-9 {
                return Err(Error::NotPsd(format!("diagonal {} != 1", rho[i][i])));
            }
            for j in 0..d {
                if (rho[i][j] - rho[j][i]).abs() > 1e-9 {
                    return Err(Error::NotPsd("correlation matrix not symmetric".into()));
                }
                m[(i, j)] = 0.5 * (rho[i][j] + rho[j][i]);
            }
        }
        let eig = nalgebra::SymmetricEigen::new(m);
        let mut directions = vec![vec![0.0; d]; d];
        for k in 0..d {
            let lam = eig.eigenvalues[k];
            if lam < -1e-9 {
                return Err(Error::NotPsd(format!("eigenvalue {lam}")));
            }
            let s = lam.max(0.0).sqrt();
            for i in 0..d {
                directions[i][k] = s * eig.eigenvectors[(i, k)];
            }
        }
        // renormalize against rounding so each direction is exactly unit
        for dvec in &mut directions {
            let norm: f64 = dvec.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= 0.0 {
                return Err(Error::NotPsd("zero-variance direction".into()));
            }
            for x in dvec.iter_mut() {
                *x /= norm;
            }
        }
        Self::from_directions(directions)
    }

    pub fn d(&self) -> usize {
        self.directions.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        dot(&self.directions[i], &self.directions[j])
    }

    /// One draw g_1..g_d from a provided normal source (the caller owns the
    /// (seed, trial) stream discipline).
    pub fn sample_with(&self, src: &mut NormalSource, ambient_out: Option<&mut Vec<f64>>) -> Vec<f64> {
        let mut g = vec![0.0; self.ambient];
        src.fill(&mut g);
        let out = self.directions.iter().map(|z| dot(z, &g)).collect();
        if let Some(amb) = ambient_out {
            *amb = g;
        }
        out
    }

    /// Deterministic single draw for (seed, trial).
    pub fn sample(&self, seed: u64, trial: u64) -> Vec<f64> {
        let mut src = NormalSource::new(seed, trial);
        self.sample_with(&mut src, None)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
