//! Per-transmit-symbol 2-D histograms and moments of estimates.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SymbolAcc {
    counts: Vec<u64>,
    count: u64,
    sum: Complex64,
    sum_sq: f64,
}

/// Running histogram of one estimator's outputs, split by transmit symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct HistogramAcc {
    bins: usize,
    range: f64,
    symbols: Vec<SymbolAcc>,
}

impl HistogramAcc {
    pub fn new(symbols: usize, bins: usize, range: f64) -> Self {
        HistogramAcc {
            bins,
            range,
            symbols: vec![
                SymbolAcc {
                    counts: vec![0; bins * bins],
                    count: 0,
                    sum: Complex64::zero(),
                    sum_sq: 0.0,
                };
                symbols
            ],
        }
    }

    fn bin(&self, v: f64) -> Option<usize> {
        let pos = (v + self.range) / (2.0 * self.range) * self.bins as f64;
        (pos >= 0.0 && pos < self.bins as f64).then_some(pos as usize)
    }

    /// Records estimate `x` of a component whose transmit symbol was `q`.
    /// Values outside the grid still contribute to the moments.
    pub fn record(&mut self, q: usize, x: Complex64) {
        let cell = self.bin(x.re).zip(self.bin(x.im)).map(|(r, i)| r * self.bins + i);
        let s = &mut self.symbols[q];
        if let Some(c) = cell {
            s.counts[c] += 1;
        }
        s.count += 1;
        s.sum += x;
        s.sum_sq += x.norm_sqr();
    }

    pub fn merge(&mut self, other: &HistogramAcc) {
        for (a, b) in self.symbols.iter_mut().zip(&other.symbols) {
            for (x, y) in a.counts.iter_mut().zip(&b.counts) {
                *x += y;
            }
            a.count += b.count;
            a.sum += b.sum;
            a.sum_sq += b.sum_sq;
        }
    }

    pub fn finish(&self, estimator: &str, ebn0_db: f64, symbols: &[Complex64], labels: &[u32]) -> EstimateHistogram {
        let per_symbol = self
            .symbols
            .iter()
            .enumerate()
            .map(|(q, s)| {
                let n = s.count as f64;
                let (mean, std_error) = if s.count == 0 {
                    (Complex64::zero(), 0.0)
                } else {
                    let mean = s.sum / n;
                    let var = (s.sum_sq / n - mean.norm_sqr()).max(0.0);
                    (mean, (var / n).sqrt())
                };
                SymbolHistogram {
                    symbol_index: q,
                    label: labels[q],
                    symbol: [symbols[q].re, symbols[q].im],
                    count: s.count,
                    mean: [mean.re, mean.im],
                    std_error,
                    relative_frequency: s
                        .counts
                        .iter()
                        .map(|&c| if s.count == 0 { 0.0 } else { c as f64 / n })
                        .collect(),
                }
            })
            .collect();
        EstimateHistogram {
            estimator: estimator.to_string(),
            ebn0_db,
            bins: self.bins,
            range: self.range,
            symbols: per_symbol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolHistogram {
    pub symbol_index: usize,
    pub label: u32,
    pub symbol: [f64; 2],
    pub count: u64,
    /// Sample mean of the estimates conditioned on this symbol.
    pub mean: [f64; 2],
    /// Standard error of `mean`, `sqrt(E|x̂ − mean|² / count)`.
    pub std_error: f64,
    /// `bins x bins` relative frequencies, real-part index major.
    #[serde(skip)]
    pub relative_frequency: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateHistogram {
    pub estimator: String,
    pub ebn0_db: f64,
    pub bins: usize,
    pub range: f64,
    pub symbols: Vec<SymbolHistogram>,
}

impl EstimateHistogram {
    /// Center of bin `k` along either axis.
    pub fn bin_center(&self, k: usize) -> f64 {
        -self.range + (k as f64 + 0.5) * 2.0 * self.range / self.bins as f64
    }
}
