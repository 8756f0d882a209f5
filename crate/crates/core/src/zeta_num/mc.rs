//! Deterministic, chunked Monte Carlo with importance-sampling proposals.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{sample_wishart, wishart_log_density, RectMatrix, SymMatrix};
use crate::specfun::ln_gamma_real;

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: Complex64,
    pub stderr: f64,
    pub n_samples: usize,
    pub method: String,
}

impl MCEstimate {
    pub fn exact(value: Complex64, method: &str) -> Self {
        Self { value, stderr: 0.0, n_samples: 0, method: method.into() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { value: self.value * c, stderr: self.stderr * c.norm(), ..self.clone() }
    }

    pub fn relative_stderr(&self) -> f64 {
        self.stderr / self.value.norm()
    }

    /// `|self - other|` in units of the combined standard error.
    pub fn z_score(&self, other: &MCEstimate) -> f64 {
        let se = (self.stderr * self.stderr + other.stderr * other.stderr).sqrt();
        (self.value - other.value).norm() / se
    }
}

/// Sample count, seed and chunking of a Monte Carlo run.
///
/// Chunk `k` draws from `ChaCha8` seeded with `seed` on stream `k`, and chunk
/// sums are reduced in chunk order, so results do not depend on the number
/// of worker threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub chunk: usize,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, chunk: 1 << 14 }
    }

    /// An independent configuration for a second quantity.
    pub fn substream(&self, tag: u64) -> Self {
        Self { seed: self.seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15), ..*self }
    }
}

/// Runs `draw` once per sample; `draw` fills one value per channel.
/// Non-finite draws are an error of the caller's proposal and panic.
pub fn run<F>(cfg: &McConfig, channels: usize, method: &str, draw: F) -> Vec<MCEstimate>
where
    F: Fn(&mut ChaCha8Rng, &mut [Complex64]) + Sync,
{
    let chunks = cfg.samples.div_ceil(cfg.chunk);
    let partial: Vec<(Vec<Complex64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            let count = cfg.chunk.min(cfg.samples - k * cfg.chunk);
            let mut sum = vec![Complex64::new(0.0, 0.0); channels];
            let mut sq = vec![0.0; channels];
            let mut buf = vec![Complex64::new(0.0, 0.0); channels];
            for _ in 0..count {
                buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
                draw(&mut rng, &mut buf);
                for c in 0..channels {
                    assert!(buf[c].re.is_finite() && buf[c].im.is_finite(), "non-finite Monte Carlo weight");
                    sum[c] += buf[c];
                    sq[c] += buf[c].norm_sqr();
                }
            }
            (sum, sq)
        })
        .collect();
    let n = cfg.samples as f64;
    (0..channels)
        .map(|c| {
            let s: Complex64 = partial.iter().map(|p| p.0[c]).sum();
            let q: f64 = partial.iter().map(|p| p.1[c]).sum();
            let mean = s / n;
            let var = (q / n - mean.norm_sqr()).max(0.0);
            MCEstimate { value: mean, stderr: (var / n).sqrt(), n_samples: cfg.samples, method: method.into() }
        })
        .collect()
}

/// `z = scale · W` with `W ~ W_n(1_n, dof)`, and `log q(z)`.
pub fn scaled_wishart<R: Rng + ?Sized>(n: usize, dof: f64, scale: f64, rng: &mut R) -> (SymMatrix, f64) {
    let w = sample_wishart(n, dof, rng);
    let logq = wishart_log_density(&w, dof) - 0.5 * (n * (n + 1)) as f64 * scale.ln();
    (w.scale(scale), logq)
}

/// Samples `y ∈ M_{n,d}` with density proportional to
/// `det(ᵗy y)^α exp(-Tr ᵗy y / (2τ²))`; requires `n + 2α > d - 1`.
#[derive(Clone, Copy, Debug)]
pub struct RadialSampler {
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub tau2: f64,
    log_norm: f64,
}

impl RadialSampler {
    pub fn new(n: usize, d: usize, alpha: f64, tau2: f64) -> Self {
        assert!(n as f64 + 2.0 * alpha > d as f64 - 1.0, "radial sampler exponent too small");
        let (nf, df) = (n as f64, d as f64);
        let mut log_norm = 0.5 * nf * df * (2.0 * std::f64::consts::PI * tau2).ln() + df * alpha * (2.0 * tau2).ln();
        for j in 0..d {
            let h = 0.5 * j as f64;
            log_norm += ln_gamma_real(0.5 * nf + alpha - h) - ln_gamma_real(0.5 * nf - h);
        }
        Self { n, d, alpha, tau2, log_norm }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (RectMatrix, f64) {
        let (n, d) = (self.n, self.d);
        let g = RectMatrix::from_fn(n, d, |_, _| rng.sample(StandardNormal));
        let lg = g.gram().cholesky().expect("Gaussian matrix has full rank");
        let s = sample_wishart(d, n as f64 + 2.0 * self.alpha, rng).scale(self.tau2);
        let ls = s.cholesky().expect("Wishart draw is positive definite");
        // y = g · L_g^{-T} · ᵗL_s
        let mut m = vec![0.0; d * d];
        for col in 0..d {
            // column `col` of L_g^{-T} ᵗL_s solves ᵗL_g x = (ᵗL_s)[:, col] = L_s[col, :]
            let mut x = vec![0.0; d];
            for i in (0..d).rev() {
                let mut v = ls.get(col, i);
                for k in i + 1..d {
                    v -= lg.get(k, i) * x[k];
                }
                x[i] = v / lg.get(i, i);
            }
            for i in 0..d {
                m[i * d + col] = x[i];
            }
        }
        let y = RectMatrix::from_fn(n, d, |a, b| (0..d).map(|k| g.get(a, k) * m[k * d + b]).sum());
        let logq = self.log_density(&y);
        (y, logq)
    }

    pub fn log_density(&self, y: &RectMatrix) -> f64 {
        let gram = y.gram();
        self.alpha * gram.determinant().ln() - gram.trace() / (2.0 * self.tau2) - self.log_norm
    }
}

/// Independent normals `x_k ~ N(c_k, v_k)`; returns `log q(x)`.
pub fn gaussian_coords<R: Rng + ?Sized>(center: &[f64], var: &[f64], rng: &mut R, out: &mut [f64]) -> f64 {
    let mut logq = 0.0;
    for k in 0..center.len() {
        let e: f64 = rng.sample(StandardNormal);
        out[k] = center[k] + var[k].sqrt() * e;
        logq -= 0.5 * e * e + 0.5 * (2.0 * std::f64::consts::PI * var[k]).ln();
    }
    logq
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_thread_independent() {
        let cfg = McConfig { samples: 50_000, seed: 7, chunk: 1000 };
        let f = |rng: &mut ChaCha8Rng, out: &mut [Complex64]| {
            let x: f64 = rng.sample(StandardNormal);
            out[0] = Complex64::new(x * x, 0.0);
        };
        let a = run(&cfg, 1, "t", f);
        let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run(&cfg, 1, "t", f));
        assert_eq!(a, b);
        assert!((a[0].value.re - 1.0).abs() < 4.0 * a[0].stderr);
    }

    #[test]
    fn radial_sampler_normalized() {
        // E_q[1/q · g] = ∫ g for g a Gaussian: ∫ e^{-|y|²} dy = π^{nd/2}.
        for (n, d, alpha) in [(1, 1, -0.3), (2, 1, 0.4), (3, 2, -0.2), (2, 2, 0.0)] {
            let sampler = RadialSampler::new(n, d, alpha, 0.6);
            let cfg = McConfig::new(100_000, 11);
            let est = run(&cfg, 1, "radial", |rng, out| {
                let (y, logq) = sampler.sample(rng);
                let f = (-y.gram().trace()).exp();
                out[0] = Complex64::new(f * (-logq).exp(), 0.0);
            });
            let exact = std::f64::consts::PI.powf(0.5 * (n * d) as f64);
            assert!((est[0].value.re - exact).abs() < 4.0 * est[0].stderr, "{n},{d}: {:?} vs {exact}", est[0]);
            assert!(est[0].relative_stderr() < 0.02);
        }
    }

    #[test]
    fn scaled_wishart_normalized() {
        let cfg = McConfig::new(100_000, 3);
        let est = run(&cfg, 1, "wishart", |rng, out| {
            let (z, logq) = scaled_wishart(2, 4.0, 0.3, rng);
            out[0] = Complex64::new((-z.frobenius_sq() - logq).exp(), 0.0);
        });
        // Gaussian on Sym_2 with density ∝ e^{-Tr z²}: P(z ∈ Ω) = (2 - √2)/4.
        let all = std::f64::consts::PI.powf(1.5) * 2f64.powf(-0.5);
        let p = (2.0 - 2f64.sqrt()) / 4.0;
        assert!((est[0].value.re - p * all).abs() < 4.0 * est[0].stderr, "{:?}", est[0]);
    }
}
