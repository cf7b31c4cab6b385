//! Channel and generator matrices for the `y = H·G·d + v` link.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rng::complex_normal;
use crate::error::{Error, Result};
use crate::io::read_matrix;
use crate::CMatrix;

fn default_taps() -> usize {
    16
}

fn default_decay() -> f64 {
    3.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelSpec {
    /// `H = I`.
    AwgnIdentity,
    /// Diagonal `H` holding the `m`-point DFT of `taps` i.i.d. proper complex
    /// Gaussian taps with an exponential power-delay profile (unit total
    /// average energy).
    FrequencySelective {
        #[serde(default = "default_taps")]
        taps: usize,
        #[serde(default = "default_decay")]
        decay_db_per_tap: f64,
    },
    /// Diagonal matrix loaded from the JSON matrix format.
    FromFile { path: PathBuf },
}

impl ChannelSpec {
    pub fn is_random(&self) -> bool {
        matches!(self, ChannelSpec::FrequencySelective { .. })
    }
}

/// Power-delay profile `p_l ∝ 10^(−decay·l/10)`, normalized to sum 1.
pub fn power_delay_profile(taps: usize, decay_db_per_tap: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..taps)
        .map(|l| 10f64.powf(-decay_db_per_tap * l as f64 / 10.0))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// Diagonal channel matrix with entries `H_kk = Σ_l h_l e^{−j2πkl/m}`.
pub fn channel_from_taps(taps: &[Complex64], m: usize) -> Result<CMatrix> {
    if taps.is_empty() || taps.len() > m {
        return Err(Error::BadSpec(format!(
            "{} channel taps do not fit a {m}-point DFT",
            taps.len()
        )));
    }
    let diag: Vec<Complex64> = (0..m)
        .map(|k| {
            taps.iter().enumerate().fold(Complex64::zero(), |acc, (l, &h)| {
                let phase = -2.0 * PI * ((k * l) % m) as f64 / m as f64;
                acc + h * Complex64::from_polar(1.0, phase)
            })
        })
        .collect();
    Ok(CMatrix::from_diagonal(&diag))
}

/// Generates an `m x m` diagonal channel matrix.
pub fn gen_channel(spec: &ChannelSpec, m: usize, seed: u64) -> Result<CMatrix> {
    match spec {
        ChannelSpec::AwgnIdentity => Ok(CMatrix::identity(m)),
        &ChannelSpec::FrequencySelective { taps, decay_db_per_tap } => {
            if taps == 0 || !decay_db_per_tap.is_finite() || decay_db_per_tap < 0.0 {
                return Err(Error::BadSpec(format!(
                    "frequency-selective channel needs taps >= 1 and a finite non-negative decay, got {taps} taps, {decay_db_per_tap} dB"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h: Vec<Complex64> = power_delay_profile(taps, decay_db_per_tap)
                .into_iter()
                .map(|p| complex_normal(&mut rng, p))
                .collect();
            channel_from_taps(&h, m)
        }
        ChannelSpec::FromFile { path } => {
            let h: CMatrix = read_matrix(path)?;
            if h.shape() != (m, m) {
                return Err(Error::BadSpec(format!(
                    "channel file {} is {}x{}, expected {m}x{m}",
                    path.display(),
                    h.rows(),
                    h.cols()
                )));
            }
            let off_diagonal = (0..m).any(|i| (0..m).any(|j| i != j && !h[(i, j)].is_zero()));
            if off_diagonal {
                return Err(Error::BadSpec(format!(
                    "channel file {} is not diagonal",
                    path.display()
                )));
            }
            Ok(h)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// `[I_n; 0]`.
    Identity {
        m: usize,
        n: usize,
    },
    /// Orthonormalized seeded Gaussian matrix, `GᴴG = I_n`.
    RandomSemiUnitary {
        m: usize,
        n: usize,
    },
    FromFile {
        path: PathBuf,
    },
}

/// Generates (or loads) the `m x n` generator matrix.
pub fn gen_generator(spec: &GeneratorSpec, seed: u64) -> Result<CMatrix> {
    let check = |m: usize, n: usize| {
        if n == 0 || m < n {
            Err(Error::BadSpec(format!(
                "generator must be m x n with m >= n >= 1, got {m}x{n}"
            )))
        } else {
            Ok(())
        }
    };
    match spec {
        &GeneratorSpec::Identity { m, n } => {
            check(m, n)?;
            Ok(CMatrix::from_fn(m, n, |i, j| {
                if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::zero()
                }
            }))
        }
        &GeneratorSpec::RandomSemiUnitary { m, n } => {
            check(m, n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = CMatrix::from_fn(m, n, |_, _| complex_normal(&mut rng, 1.0));
            orthonormalize_columns(&a)
        }
        GeneratorSpec::FromFile { path } => {
            let g: CMatrix = read_matrix(path)?;
            check(g.rows(), g.cols())?;
            Ok(g)
        }
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
fn orthonormalize_columns(a: &CMatrix) -> Result<CMatrix> {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k].iter().zip(&cols[j]).map(|(q, v)| q.conj() * v).sum();
                let qk = cols[k].clone();
                for (v, q) in cols[j].iter_mut().zip(&qk) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::BadSpec("generator columns are linearly dependent".into()));
        }
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    Ok(CMatrix::from_fn(m, n, |i, j| cols[j][i]))
}
