//! Symbol alphabets with bit labels and second-order statistics.
//!
//! Built-in constellations use a per-axis reflected Gray code with the
//! in-phase bits first. Levels on each axis are labelled from the largest
//! amplitude downwards, so QPSK label `00` sits at `(1 + i)/√2`. Symbol `q`
//! of a built-in constellation always carries label `q`.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::MatrixFile;
use crate::scalar::{is_finite, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Constellation<T> {
    name: String,
    symbols: Vec<Complex<T>>,
    labels: Vec<u32>,
    bits_per_symbol: usize,
    variance: T,
    pseudo_variance: Complex<T>,
}

/// Per bit position, the symbol indices whose label carries a one and a zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSets {
    pub ones: Vec<Vec<usize>>,
    pub zeros: Vec<Vec<usize>>,
}

impl BitSets {
    pub fn bits(&self) -> usize {
        self.ones.len()
    }
}

/// Reflected Gray code of `i`.
fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

/// Amplitude levels `{..., 3, 1, -1, -3, ...}` for one axis with `bits` bits,
/// paired with their Gray labels (largest level gets label 0).
fn axis_levels(bits: u32) -> Vec<(i32, u32)> {
    let count = 1i32 << bits;
    (0..count).map(|k| (count - 1 - 2 * k, gray(k as u32))).collect()
}

/// Rectangular grid constellation with `bi` in-phase and `bq` quadrature bits,
/// normalized to unit average energy.
fn grid<T: Real>(name: &str, bi: u32, bq: u32) -> Constellation<T> {
    let k = (bi + bq) as usize;
    let mut points = vec![Complex::zero(); 1 << k];
    for &(li, gi) in &axis_levels(bi) {
        for &(lq, gq) in &axis_levels(bq) {
            let label = (gi << bq) | gq;
            points[label as usize] = Complex::new(T::lit(li as f64), T::lit(lq as f64));
        }
    }
    let labels = (0..1u32 << k).collect();
    Constellation::new(name, points, labels).expect("built-in grids are valid")
}

impl<T: Real> Constellation<T> {
    /// Validates and normalizes a custom alphabet.
    ///
    /// `symbols.len()` must be a power of two, `labels` a permutation of
    /// `0..symbols.len()`, and the symbols must have zero mean. The points are
    /// scaled to unit average energy.
    pub fn new(name: impl Into<String>, symbols: Vec<Complex<T>>, labels: Vec<u32>) -> Result<Self> {
        let size = symbols.len();
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::BadConstellation(format!(
                "alphabet size {size} is not a power of two >= 2"
            )));
        }
        if labels.len() != size {
            return Err(Error::BadConstellation(format!(
                "{} labels for {size} symbols",
                labels.len()
            )));
        }
        let mut seen = vec![false; size];
        for &l in &labels {
            match seen.get_mut(l as usize) {
                Some(s) if !*s => *s = true,
                _ => {
                    return Err(Error::BadConstellation(format!(
                        "labels are not a permutation of 0..{size} (label {l})"
                    )))
                }
            }
        }
        if !symbols.iter().all(|&s| is_finite(s)) {
            return Err(Error::BadConstellation("non-finite symbol".into()));
        }
        let count = T::lit(size as f64);
        let energy = symbols.iter().map(|s| s.norm_sqr()).sum::<T>() / count;
        if !(energy > T::zero()) {
            return Err(Error::BadConstellation("all symbols are zero".into()));
        }
        let mean = symbols.iter().fold(Complex::zero(), |a, &s| a + s) / count;
        if mean.norm() > T::tol(1e-9) * energy.sqrt() {
            return Err(Error::BadConstellation(format!("symbol mean {mean} is not zero")));
        }
        let scale = energy.sqrt().recip();
        let symbols: Vec<Complex<T>> = symbols.into_iter().map(|s| s.scale(scale)).collect();
        let variance = symbols.iter().map(|s| s.norm_sqr()).sum::<T>() / count;
        let pseudo_variance = symbols.iter().fold(Complex::zero(), |a, &s| a + s * s) / count;
        Ok(Constellation {
            name: name.into(),
            symbols,
            labels,
            bits_per_symbol: size.trailing_zeros() as usize,
            variance,
            pseudo_variance,
        })
    }

    /// QPSK, `(±1 ± i)/√2`.
    pub fn qpsk() -> Self {
        grid("qpsk", 1, 1)
    }

    /// Square 16-QAM on the `{±1, ±3}²` grid, scaled by `1/√10`.
    pub fn qam16() -> Self {
        grid("16qam", 2, 2)
    }

    /// Rectangular 8-QAM on `{±1, ±3} x {±1}`, scaled by `1/√6`. Improper,
    /// with pseudo-variance 2/3.
    pub fn qam8_rect() -> Self {
        grid("8qam-rect", 2, 1)
    }

    /// Looks up a built-in constellation by its CLI name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "qpsk" => Ok(Self::qpsk()),
            "16qam" => Ok(Self::qam16()),
            "8qam-rect" => Ok(Self::qam8_rect()),
            other => Err(Error::BadConstellation(format!(
                "unknown constellation '{other}' (expected qpsk, 16qam or 8qam-rect)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[Complex<T>] {
        &self.symbols
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// `E[|x|²]`.
    pub fn variance(&self) -> T {
        self.variance
    }

    /// `E[x²]`.
    pub fn pseudo_variance(&self) -> Complex<T> {
        self.pseudo_variance
    }

    pub fn is_proper(&self) -> bool {
        self.pseudo_variance.norm() < T::tol(1e-12)
    }

    /// Bit `k` (0 = first, in-phase-most bit) of symbol `q`'s label.
    pub fn bit(&self, q: usize, k: usize) -> bool {
        (self.labels[q] >> (self.bits_per_symbol - 1 - k)) & 1 == 1
    }

    /// Index of the symbol carrying `label`.
    pub fn index_of_label(&self, label: u32) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn bit_sets(&self) -> BitSets {
        let k = self.bits_per_symbol;
        let mut ones = vec![Vec::with_capacity(self.len() / 2); k];
        let mut zeros = vec![Vec::with_capacity(self.len() / 2); k];
        for q in 0..self.len() {
            for b in 0..k {
                if self.bit(q, b) {
                    ones[b].push(q);
                } else {
                    zeros[b].push(q);
                }
            }
        }
        BitSets { ones, zeros }
    }

    /// Nearest symbol to `z`; ties go to the lowest index.
    pub fn hard_decide(&self, z: Complex<T>) -> usize {
        let mut best = 0;
        let mut best_d = (z - self.symbols[0]).norm_sqr();
        for (q, &s) in self.symbols.iter().enumerate().skip(1) {
            let d = (z - s).norm_sqr();
            if d < best_d {
                best = q;
                best_d = d;
            }
        }
        best
    }
}

/// Free-function spelling of [`Constellation::bit_sets`].
pub fn bit_sets<T: Real>(c: &Constellation<T>) -> BitSets {
    c.bit_sets()
}

/// Free-function spelling of [`Constellation::hard_decide`].
pub fn hard_decide<T: Real>(c: &Constellation<T>, z: Complex<T>) -> usize {
    c.hard_decide(z)
}

/// JSON layout of a custom constellation: the symbols as a `1 x 2^k` complex
/// matrix plus one integer label per symbol.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstellationFile {
    pub name: String,
    pub symbols: MatrixFile,
    pub labels: Vec<u32>,
}

impl<T: Real> TryFrom<ConstellationFile> for Constellation<T> {
    type Error = Error;

    fn try_from(f: ConstellationFile) -> Result<Self> {
        if f.symbols.rows != 1 {
            return Err(Error::BadConstellation(format!(
                "symbols must be a single row, got {} rows",
                f.symbols.rows
            )));
        }
        let row = crate::linalg::Matrix::<T>::try_from(f.symbols)?;
        Constellation::new(f.name, row.as_slice().to_vec(), f.labels)
    }
}

impl<T: Real> From<&Constellation<T>> for ConstellationFile {
    fn from(c: &Constellation<T>) -> Self {
        ConstellationFile {
            name: c.name.clone(),
            symbols: MatrixFile {
                rows: 1,
                cols: c.len(),
                re: c.symbols.iter().map(|s| s.re.as_f64()).collect(),
                im: c.symbols.iter().map(|s| s.im.as_f64()).collect(),
            },
            labels: c.labels.clone(),
        }
    }
}
