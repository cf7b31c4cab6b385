//! Seed derivation and complex Gaussian sampling.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for `(master, stream, index)`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)
}

// stream tags
pub(crate) const STREAM_GENERATOR: u64 = 0x0067_656e;
pub(crate) const STREAM_CHANNEL: u64 = 0x6368_616e;
pub(crate) const STREAM_TRIAL: u64 = 0x0074_7269_616c;
pub(crate) const STREAM_MODEL: u64 = 0x006d_6f64_656c;

/// Seed of trial `trial` at SNR point `snr_index`.
pub fn trial_seed(master: u64, snr_index: usize, trial: usize) -> u64 {
    derive_seed(master, STREAM_TRIAL ^ ((snr_index as u64) << 40), trial as u64)
}

/// Proper complex Gaussian sample with variance `var` (`var/2` per part).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}
