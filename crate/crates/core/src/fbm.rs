//! Exact fractional Brownian motion on the dyadic grid.
//!
//! Fractional Gaussian noise is generated by circulant embedding
//! (Davies–Harte / Wood–Chan). If the embedding has materially negative
//! eigenvalues the generator falls back to a dense Cholesky factor, which is
//! only affordable on small grids; the method used is recorded on the path.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::path::{PathKind, SamplePath};
use crate::rng::CounterRng;

pub const MAX_FBM_LEVEL: u32 = 14;

/// Dense fallback is refused above this many increments.
pub const MAX_CHOLESKY_INCREMENTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FbmMethod {
    CirculantEmbedding,
    Cholesky,
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`:
/// `½(|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) + (k - 1.0).abs().powf(h2) - 2.0 * k.powf(h2))
}

fn check_hurst(hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Config(format!("hurst index {hurst} outside (0, 1)")));
    }
    Ok(())
}

enum Factor {
    Circulant {
        sqrt_eig: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Cholesky {
        lower: Vec<f64>,
    },
}

/// Reusable sampler for one `(hurst, level)`; the factorization is computed
/// once and shared by every path drawn from it.
pub struct FbmGenerator {
    hurst: f64,
    level: u32,
    increments: usize,
    factor: Factor,
}

impl FbmGenerator {
    /// Circulant embedding, falling back to Cholesky when the embedding is
    /// not nonnegative definite.
    pub fn new(hurst: f64, level: u32) -> Result<Self> {
        check_hurst(hurst)?;
        check_level(level)?;
        match Self::circulant(hurst, level) {
            Ok(g) => Ok(g),
            Err(Error::Numeric(_)) => Self::with_method(hurst, level, FbmMethod::Cholesky),
            Err(e) => Err(e),
        }
    }

    pub fn with_method(hurst: f64, level: u32, method: FbmMethod) -> Result<Self> {
        check_hurst(hurst)?;
        check_level(level)?;
        match method {
            FbmMethod::CirculantEmbedding => Self::circulant(hurst, level),
            FbmMethod::Cholesky => Self::cholesky(hurst, level),
        }
    }

    pub fn method(&self) -> FbmMethod {
        match self.factor {
            Factor::Circulant { .. } => FbmMethod::CirculantEmbedding,
            Factor::Cholesky { .. } => FbmMethod::Cholesky,
        }
    }

    fn circulant(hurst: f64, level: u32) -> Result<Self> {
        let n = 2usize << level;
        let m = 2 * n;
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|j| {
                let lag = if j <= n { j } else { m - j };
                Complex::new(fgn_autocovariance(hurst, lag), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re).fold(0.0f64, f64::max);
        let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min < -1e-10 * max {
            return Err(Error::Numeric(format!(
                "circulant embedding has eigenvalue {min:e} (H={hurst}, level {level})"
            )));
        }
        let sqrt_eig = row.iter().map(|c| (c.re.max(0.0) / m as f64).sqrt()).collect();
        Ok(Self {
            hurst,
            level,
            increments: n,
            factor: Factor::Circulant { sqrt_eig, fft },
        })
    }

    fn cholesky(hurst: f64, level: u32) -> Result<Self> {
        let n = 2usize << level;
        if n > MAX_CHOLESKY_INCREMENTS {
            return Err(Error::Numeric(format!(
                "dense fBm fallback refused for {n} increments (max {MAX_CHOLESKY_INCREMENTS})"
            )));
        }
        let acov: Vec<f64> = (0..n).map(|k| fgn_autocovariance(hurst, k)).collect();
        let mut lower = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = acov[i - j];
                for k in 0..j {
                    s -= lower[i * n + k] * lower[j * n + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::Numeric(format!(
                            "fGn covariance not positive definite at row {i}"
                        )));
                    }
                    lower[i * n + i] = s.sqrt();
                } else {
                    lower[i * n + j] = s / lower[j * n + j];
                }
            }
        }
        Ok(Self {
            hurst,
            level,
            increments: n,
            factor: Factor::Cholesky { lower },
        })
    }

    /// Unit-step fractional Gaussian noise, `increments` values.
    fn noise(&self, seed: u64) -> Vec<f64> {
        let rng = CounterRng::new(seed);
        let n = self.increments;
        match &self.factor {
            Factor::Circulant { sqrt_eig, fft } => {
                let m = sqrt_eig.len();
                let mut z = vec![0.0; 2 * m];
                rng.fill_normals(0, &mut z);
                let mut buf: Vec<Complex<f64>> = sqrt_eig
                    .iter()
                    .zip(z.chunks_exact(2))
                    .map(|(s, p)| Complex::new(s * p[0], s * p[1]))
                    .collect();
                fft.process(&mut buf);
                buf[..n].iter().map(|c| c.re).collect()
            }
            Factor::Cholesky { lower } => {
                let mut z = vec![0.0; n];
                rng.fill_normals(0, &mut z);
                (0..n)
                    .map(|i| {
                        lower[i * n..i * n + i + 1]
                            .iter()
                            .zip(&z)
                            .map(|(l, x)| l * x)
                            .sum()
                    })
                    .collect()
            }
        }
    }

    pub fn sample(&self, seed: u64) -> Result<SamplePath> {
        let scale = (-(self.level as f64) * self.hurst).exp2();
        let noise = self.noise(seed);
        let mut values = Vec::with_capacity(noise.len() + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for x in noise {
            acc += x * scale;
            values.push(acc);
        }
        let mut path = SamplePath::from_values(PathKind::Fbm, self.level, values, seed)?;
        path.hurst = Some(self.hurst);
        path.fbm_method = Some(self.method());
        Ok(path)
    }
}

fn check_level(level: u32) -> Result<()> {
    if !(1..=MAX_FBM_LEVEL).contains(&level) {
        return Err(Error::Config(format!(
            "fBm level {level} outside 1..={MAX_FBM_LEVEL}"
        )));
    }
    Ok(())
}

/// Fractional Brownian motion with Hurst index `hurst` on `[0, 2]`.
pub fn sample_fbm(seed: u64, hurst: f64, level: u32) -> Result<SamplePath> {
    FbmGenerator::new(hurst, level)?.sample(seed)
}
